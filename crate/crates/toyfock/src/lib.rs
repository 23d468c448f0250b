//! Exact operator calculus on the toy Fock space.
//!
//! The toy Fock space is the algebra spanned by finite products of Rademacher
//! functions (Walsh functions), the discrete analog of Gaussian chaos. This
//! crate implements that algebra with arbitrary-precision rational scalars and
//! builds the operator theory on top of it:
//!
//! * [`dyadic`] — bit-vector calculus for finitary 0-1 sequences: generalized
//!   powers, brackets, Paley indexing, subset enumeration.
//! * [`chaos`] — the algebra of finite Walsh series: xor-convolution product,
//!   inner product, Riesz products and their diamond composition, a fast
//!   Walsh-Hadamard transform between coefficients and dyadic atoms, and
//!   composition with polynomials.
//! * [`operators`] — the seven chaos operators (number, anti-number,
//!   annihilation, creation, replacement, symmetry, asymmetry), their
//!   coordinate powers and operator Riesz products, the multiplication table,
//!   Ornstein-Uhlenbeck semigroup analog, dyadic derivatives, and the Leibnitz
//!   formula / chain rule identities.
//! * [`signed`] — the signed group of double binary sequences `±[s;p]`:
//!   product with sign twist, signum and commutativity functions, the action
//!   on chaos, basicness via GF(2) rank, and the constructive embedding of
//!   arbitrary sign/commutativity patterns.
//! * [`matrep`] — matrix representation by quadrupling: `2^n x 2^n` matrices
//!   over Gaussian rationals, transpose/trace laws, Hilbert-Schmidt geometry,
//!   constructive eigensystems, block-averaging adjoints, and Clifford-algebra
//!   verification.
//! * [`rigged`] — the finite computable core of the directed system of those
//!   matrix spaces: isometric embeddings, eventual inner product, NQ cores,
//!   distance to lower strata, and the finite-depth duality pairing.
//! * [`verify`] — seeded identity-verification campaigns behind the CLI
//!   `verify` subcommand.
//!
//! Every scalar is an exact rational (or Gaussian rational); every identity
//! the crate checks is asserted with exact equality, never a tolerance.

pub mod chaos;
pub mod dyadic;
pub mod matrep;
pub mod operators;
pub mod rigged;
pub mod signed;
pub mod verify;

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A sequence position beyond the fixed 64-position capacity.
    #[error("position {0} exceeds the 64-position mask capacity")]
    CapacityOverflow(u64),

    /// Text input that does not match one of the documented formats.
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// Matrix or vector dimensions that do not line up.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An argument outside an operation's stated domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An embedding specification that is not symmetric with unit diagonal.
    #[error("invalid embedding spec: {0}")]
    InvalidEmbedSpec(String),

    /// An augmentation pattern that violates one of the numbered rules.
    #[error("augmentation violates rule {rule}: {msg}")]
    AugmentRule { rule: u8, msg: String },

    /// A real-valued operation applied to a matrix with imaginary entries.
    #[error("matrix has nonzero imaginary entries")]
    NonRealMatrix,

    /// Composition requested outside the five-operator multiplication table.
    #[error("operator {0} is outside the multiplication table")]
    NotInTable(String),

    /// Verification suite name that does not exist.
    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),

    /// An internal law failed to hold; indicates a bug in this crate.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// A sign, `+1` or `-1`.
///
/// Signs multiply, flip, and arise as parities; keeping them out of the
/// rational scalars makes the group-theoretic code exact by construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `(-1)^k`.
    pub fn from_parity(k: u32) -> Sign {
        if k.is_multiple_of(2) {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn from_i8(v: i8) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn is_positive(self) -> bool {
        self == Sign::Plus
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        self.flip()
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sign::Plus => write!(f, "+1"),
            Sign::Minus => write!(f, "-1"),
        }
    }
}
