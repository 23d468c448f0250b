//! Finite computable core of the directed system of matrix Hilbert spaces.
//!
//! The principal quadrupling `Q = Q^0_0` embeds the space of `2^n x 2^n`
//! real matrices (with the normalized pairing `<A,B>_n = 2^-n tr(A^T B)`)
//! isometrically into the next level; its adjoint `P` is the diagonal block
//! average, and `P Q = id`. A [`RiggedVector`] represents the inductive-side
//! class of the eventually-quadrupled sequence `(A_k, Q A_k, Q^2 A_k, ...)`
//! by the matrix `A_k` alone; a [`ProjectiveVector`] represents the dual
//! side by its top level, the lower levels being `P`-averages. The eventual
//! inner product, NQ cores, quadrupling indices, distances to lower strata,
//! and the finite-depth duality pairing are all exact rational computations.

use num_rational::BigRational;

use crate::dyadic::DyadicMask;
use crate::matrep::{adjoint_p, hs_inner, quadruple, DyadicMatrix};
use crate::{Error, Result};

/// Lift a real matrix from its depth to depth `m` by principal quadrupling.
pub fn embed_up(a: &DyadicMatrix, m: u32) -> Result<DyadicMatrix> {
    if m < a.depth() {
        return Err(Error::InvalidArgument(format!(
            "cannot embed depth {} down to {}",
            a.depth(),
            m
        )));
    }
    let mut out = a.clone();
    while out.depth() < m {
        out = quadruple(false, false, &out)?;
    }
    Ok(out)
}

/// Project a matrix down to depth `j` by iterated principal `P` (diagonal
/// block average). This is the closest depth-`j` matrix to `a` in the sense
/// that `Q^(k-j) project_down(a, j)` minimizes the distance to `a`.
pub fn project_down(a: &DyadicMatrix, j: u32) -> Result<DyadicMatrix> {
    if j > a.depth() {
        return Err(Error::InvalidArgument(format!(
            "cannot project depth {} up to {}",
            a.depth(),
            j
        )));
    }
    let mut out = a.clone();
    while out.depth() > j {
        out = adjoint_p(&out, DyadicMask::EMPTY, DyadicMask::EMPTY, 1)?;
    }
    Ok(out)
}

/// Is the matrix a principal quadruple `Q(B)`? If so, return `B`.
fn unquadruple(a: &DyadicMatrix) -> Option<DyadicMatrix> {
    if a.depth() == 0 {
        return None;
    }
    let half = a.dim() / 2;
    // Off-diagonal half-blocks must vanish and the diagonal blocks agree.
    for r in 0..half {
        for c in 0..half {
            if !a.get(r, c + half).is_zero() || !a.get(r + half, c).is_zero() {
                return None;
            }
            if a.get(r, c) != a.get(r + half, c + half) {
                return None;
            }
        }
    }
    let mut b = DyadicMatrix::zero(a.depth() - 1).expect("smaller depth is valid");
    for r in 0..half {
        for c in 0..half {
            b.set(r, c, a.get(r, c).clone());
        }
    }
    Some(b)
}

/// Strip principal quadruplings: the unique `(core, strips)` with
/// `a = Q^strips core` and `core` not quadrupled (NQ).
pub fn nq_core(a: &DyadicMatrix) -> (DyadicMatrix, u32) {
    let mut core = a.clone();
    let mut strips = 0;
    while let Some(inner) = unquadruple(&core) {
        core = inner;
        strips += 1;
    }
    (core, strips)
}

fn require_real(a: &DyadicMatrix) -> Result<()> {
    if a.is_real() {
        Ok(())
    } else {
        Err(Error::NonRealMatrix)
    }
}

fn real_inner(a: &DyadicMatrix, b: &DyadicMatrix) -> Result<BigRational> {
    hs_inner(a, b)?.to_rational()
}

/// Inductive-side vector: the class of `(0,...,0, A_k, Q A_k, ...)`
/// represented by its first nonzero level `A_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RiggedVector {
    core: DyadicMatrix,
}

impl RiggedVector {
    pub fn new(core: DyadicMatrix) -> Result<RiggedVector> {
        require_real(&core)?;
        Ok(RiggedVector { core })
    }

    /// The representative's depth `k`.
    pub fn base_depth(&self) -> u32 {
        self.core.depth()
    }

    pub fn representative(&self) -> &DyadicMatrix {
        &self.core
    }

    /// The level-`m` entry `Q^(m-k) A_k` of the represented sequence.
    pub fn level(&self, m: u32) -> Result<DyadicMatrix> {
        embed_up(&self.core, m)
    }

    /// Minimal depth at which the class has a representative.
    pub fn quadrupling_index(&self) -> u32 {
        let (_, strips) = nq_core(&self.core);
        self.core.depth() - strips
    }

    /// The fully stripped representative and its depth.
    pub fn nq_representative(&self) -> (DyadicMatrix, u32) {
        let (core, strips) = nq_core(&self.core);
        let depth = self.core.depth() - strips;
        (core, depth)
    }
}

/// The eventual inner product `<A~, B~> = lim_k <A_k, B_k>_k`: both cores
/// are lifted to the larger depth, where the sequence is already constant.
pub fn rigged_inner(u: &RiggedVector, v: &RiggedVector) -> Result<BigRational> {
    let depth = u.base_depth().max(v.base_depth());
    real_inner(&u.level(depth)?, &v.level(depth)?)
}

/// Squared distance from `theta_k(a)` to the depth-`j` stratum:
/// `dist^2 = <a,a> - <P^(k-j) a, P^(k-j) a>` (the Pythagoras form of the
/// regression identity; the minimizer is `project_down(a, j)`).
pub fn distance_to_stratum(a: &DyadicMatrix, j: u32) -> Result<BigRational> {
    require_real(a)?;
    if j > a.depth() {
        return Err(Error::InvalidArgument(format!(
            "stratum {} above the matrix depth {}",
            j,
            a.depth()
        )));
    }
    let projected = project_down(a, j)?;
    Ok(real_inner(a, a)? - real_inner(&projected, &projected)?)
}

/// Projective-side vector: levels `A_j = P^(k-j) top` for `j <= k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectiveVector {
    top: DyadicMatrix,
}

impl ProjectiveVector {
    pub fn new(top: DyadicMatrix) -> Result<ProjectiveVector> {
        require_real(&top)?;
        Ok(ProjectiveVector { top })
    }

    pub fn top_depth(&self) -> u32 {
        self.top.depth()
    }

    pub fn top(&self) -> &DyadicMatrix {
        &self.top
    }

    pub fn level(&self, j: u32) -> Result<DyadicMatrix> {
        project_down(&self.top, j)
    }
}

/// The duality pairing `<A_m, B_m>_m` evaluated where it has stabilized.
///
/// With `q` the quadrupling index of `v`, adjointness gives
/// `<A_m, Q^(m-q) B_q>_m = <P^(m-q) A_m, B_q>_q = <P^(k-q) A_k, B_q>_q`
/// for every `q <= m <= k`, so the projective side must reach at least
/// depth `q`.
pub fn dual_pair(d: &ProjectiveVector, v: &RiggedVector) -> Result<BigRational> {
    let (core, q) = v.nq_representative();
    if q > d.top_depth() {
        return Err(Error::InvalidArgument(format!(
            "projective vector of depth {} cannot pair with a class of quadrupling index {}",
            d.top_depth(),
            q
        )));
    }
    real_inner(&d.level(q)?, &core)
}
