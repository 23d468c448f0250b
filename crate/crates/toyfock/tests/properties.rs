//! Property-based checks of the algebraic laws, over arbitrary exact inputs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use toyfock::chaos::{diamond, from_atoms, riesz, to_atoms, ChaosElement};
use toyfock::dyadic::{DyadicMask, ScalarSeq};
use toyfock::operators::ou_semigroup;
use toyfock::signed::{embed, is_basic, verify_embedding, EmbedSpec, SignedWord};
use toyfock::Sign;

fn arb_rational() -> impl Strategy<Value = BigRational> {
    (-24i64..=24, 1i64..=12).prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn arb_mask() -> impl Strategy<Value = DyadicMask> {
    (0u64..256).prop_map(DyadicMask::from_bits)
}

fn arb_chaos() -> impl Strategy<Value = ChaosElement> {
    prop::collection::vec((arb_mask(), arb_rational()), 0..6).prop_map(ChaosElement::from_terms)
}

fn arb_scalar_seq() -> impl Strategy<Value = ScalarSeq> {
    prop::collection::vec((1u32..=8, arb_rational()), 0..5)
        .prop_map(|pairs| ScalarSeq::from_pairs(pairs).unwrap())
}

fn arb_word() -> impl Strategy<Value = SignedWord> {
    (any::<bool>(), 0u64..64, 0u64..64).prop_map(|(neg, s, p)| {
        SignedWord::new(
            if neg { Sign::Minus } else { Sign::Plus },
            DyadicMask::from_bits(s),
            DyadicMask::from_bits(p),
        )
    })
}

proptest! {
    #[test]
    fn walsh_ring_laws(f in arb_chaos(), g in arb_chaos(), h in arb_chaos()) {
        prop_assert_eq!(&f * &g, &g * &f);
        prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
        prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
        prop_assert_eq!(&f * &ChaosElement::unit(), f.clone());
    }

    #[test]
    fn inner_product_is_positive_definite(f in arb_chaos(), g in arb_chaos()) {
        prop_assert_eq!(f.inner(&g), g.inner(&f));
        let norm = f.norm_sq();
        prop_assert!(norm >= BigRational::zero());
        prop_assert_eq!(norm.is_zero(), f.is_zero());
    }

    #[test]
    fn expectation_of_product_is_inner(f in arb_chaos(), g in arb_chaos()) {
        // <f, g> = E(f g) because E r^(p+q) = [p = q].
        prop_assert_eq!((&f * &g).expectation(), f.inner(&g));
    }

    #[test]
    fn diamond_laws(x in arb_rational(), y in arb_rational(), z in arb_rational()) {
        prop_assert_eq!(diamond(&x, &y), diamond(&y, &x));
        prop_assert_eq!(diamond(&x, &BigRational::zero()), x.clone());
        // Associativity away from the degenerate branch.
        let products_fine = |a: &BigRational, b: &BigRational| a * b != -BigRational::one();
        let xy = diamond(&x, &y);
        let yz = diamond(&y, &z);
        if products_fine(&x, &y) && products_fine(&y, &z)
            && products_fine(&xy, &z) && products_fine(&x, &yz)
        {
            prop_assert_eq!(diamond(&xy, &z), diamond(&x, &yz));
        }
    }

    #[test]
    fn riesz_coefficients_are_generalized_powers(x in arb_scalar_seq()) {
        let f = riesz(&x);
        for (mask, coeff) in f.terms() {
            prop_assert_eq!(coeff.clone(), x.gen_power(*mask));
        }
        prop_assert_eq!(f.expectation(), BigRational::one());
    }

    #[test]
    fn transform_roundtrip(f in arb_chaos()) {
        let n = f.depth();
        prop_assert_eq!(from_atoms(&to_atoms(&f, n).unwrap()), f);
    }

    #[test]
    fn transform_carries_products_to_pointwise(f in arb_chaos(), g in arb_chaos()) {
        let n = f.depth().max(g.depth());
        let pointwise = to_atoms(&f, n).unwrap()
            .pointwise_mul(&to_atoms(&g, n).unwrap())
            .unwrap();
        prop_assert_eq!(from_atoms(&pointwise), &f * &g);
    }

    #[test]
    fn paley_indexing_is_monotone(a in 0u64..4096, b in 0u64..4096) {
        let (p, q) = (DyadicMask::paley_mask(a), DyadicMask::paley_mask(b));
        prop_assert_eq!(p.paley_index(), a);
        prop_assert_eq!(p < q, a < b);
    }

    #[test]
    fn bracket_expansion_identity(x in arb_scalar_seq(), d in arb_scalar_seq()) {
        // sum over submasks of 1..8 of d^p x^p = prod_j (1 + d_j x_j).
        let full = DyadicMask::full(8).unwrap();
        let mut lhs = BigRational::zero();
        for p in full.subsets() {
            lhs += d.gen_power(p) * x.gen_power(p);
        }
        let mut rhs = BigRational::one();
        for j in 1..=8 {
            rhs *= BigRational::one() + d.get(j) * x.get(j);
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn gen_power_is_multiplicative_on_disjoint_masks(
        x in arb_scalar_seq(),
        c in arb_mask(),
        d in arb_mask(),
    ) {
        let d = d.diff(c);
        prop_assert_eq!(
            x.gen_power(c) * x.gen_power(d),
            x.gen_power(c.or(d))
        );
    }

    #[test]
    fn signed_group_laws(a in arb_word(), b in arb_word(), c in arb_word()) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&a.inverse()), SignedWord::identity());
        let sq = a.mul(&a);
        prop_assert!(sq.is_scalar());
        prop_assert_eq!(sq.sign(), a.sigma());
        let (ab, ba) = (a.mul(&b), b.mul(&a));
        match a.comm(&b) {
            Sign::Plus => prop_assert_eq!(ab, ba),
            Sign::Minus => prop_assert_eq!(ab, ba.negate()),
        }
    }

    #[test]
    fn word_action_is_group_action(a in arb_word(), b in arb_word(), f in arb_chaos()) {
        prop_assert_eq!(a.mul(&b).apply(&f), a.apply(&b.apply(&f)));
        // The action preserves the L2 norm: words act by signed permutations.
        prop_assert_eq!(a.apply(&f).norm_sq(), f.norm_sq());
    }

    #[test]
    fn ou_semigroup_composes(f in arb_chaos(), q1 in arb_rational(), q2 in arb_rational()) {
        let (q1, q2) = (q1.abs(), q2.abs());
        prop_assume!(!q1.is_zero() && !q2.is_zero());
        let lhs = ou_semigroup(&q1, &ou_semigroup(&q2, &f).unwrap()).unwrap();
        prop_assert_eq!(lhs, ou_semigroup(&(q1 * q2), &f).unwrap());
    }

    #[test]
    fn embeddings_always_satisfy_their_spec(
        signs in prop::collection::vec(any::<bool>(), 1..7),
        comm_bits in any::<u64>(),
    ) {
        let m = signs.len();
        let signs: Vec<i8> = signs.iter().map(|&b| if b { 1 } else { -1 }).collect();
        let mut comm = vec![vec![1i8; m]; m];
        let mut bit = 0;
        for i in 0..m {
            for j in 0..i {
                let v = if comm_bits >> (bit % 64) & 1 == 1 { 1 } else { -1 };
                comm[i][j] = v;
                comm[j][i] = v;
                bit += 1;
            }
        }
        let spec = EmbedSpec { signs, comm };
        let words = embed(&spec).unwrap();
        let check = verify_embedding(&words, &spec).unwrap();
        prop_assert!(check.ok());
        prop_assert!(is_basic(&words));
    }
}
