use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use kmsolve::catalog;
use kmsolve::field::{bareiss, gauss_jordan};
use kmsolve::linalg;
use kmsolve::solver::{commuting_matrices, SolveOptions};
use kmsolve::{km_matrix, Exponents, Field, MultiPoly, PrimeField, Rationals, WeightOrder};

const P: u64 = 9716633;

fn vars3() -> Arc<[String]> {
    MultiPoly::<Rationals>::ring_vars(3)
}

fn poly_q() -> impl Strategy<Value = MultiPoly<Rationals>> {
    prop::collection::vec((prop::array::uniform3(0u16..4), (-20i64..=20, 1i64..=4)), 0..7).prop_map(|terms| {
        let terms =
            terms.into_iter().map(|(e, (n, d))| (Exponents::from_slice(&e), BigRational::new(n.into(), d.into())));
        MultiPoly::from_terms(Rationals, vars3(), terms).unwrap()
    })
}

fn poly_p() -> impl Strategy<Value = MultiPoly<PrimeField>> {
    let f = PrimeField::new(P).unwrap();
    prop::collection::vec((prop::array::uniform3(0u16..4), 0u64..P), 0..7).prop_map(move |terms| {
        let terms = terms.into_iter().map(|(e, c)| (Exponents::from_slice(&e), c));
        MultiPoly::from_terms(f, vars3(), terms).unwrap()
    })
}

fn order() -> impl Strategy<Value = WeightOrder> {
    prop::collection::vec(-5i64..=5, 3).prop_map(WeightOrder::new)
}

fn int_matrix() -> impl Strategy<Value = (Vec<Vec<i64>>, usize)> {
    (1usize..7, 1usize..7).prop_flat_map(|(r, c)| {
        // small range so rank drops happen regularly
        (prop::collection::vec(prop::collection::vec(-2i64..=2, c), r), Just(c))
    })
}

proptest! {
    #[test]
    fn ring_axioms_q(a in poly_q(), b in poly_q(), c in poly_q()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn ring_axioms_p(a in poly_p(), b in poly_p(), c in poly_p()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert!((&(&(&a + &b) - &b) - &a).is_zero());
    }

    #[test]
    fn leading_exponent_is_multiplicative(a in poly_q(), b in poly_q(), w in order()) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        let la = a.leading_exponent(&w).unwrap();
        let lb = b.leading_exponent(&w).unwrap();
        prop_assert_eq!((&a * &b).leading_exponent(&w).unwrap(), la.add(&lb));
    }

    #[test]
    fn display_parse_round_trip(a in poly_q()) {
        let text = a.to_string();
        let back = MultiPoly::parse(Rationals, vars3(), &text).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn display_parse_round_trip_p(a in poly_p()) {
        let back = MultiPoly::parse(*a.field(), vars3(), &a.to_string()).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn evaluation_is_a_ring_map(a in poly_q(), b in poly_q(), t in prop::array::uniform3(-4i64..=4)) {
        let t: Vec<BigRational> = t.iter().map(|&x| Rationals.from_i64(x)).collect();
        let prod = (&a * &b).evaluate(&t).unwrap();
        prop_assert_eq!(prod, a.evaluate(&t).unwrap() * b.evaluate(&t).unwrap());
    }

    #[test]
    fn bareiss_matches_plain_rref((m, ncols) in int_matrix()) {
        let big: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let q: Vec<Vec<BigRational>> = m.iter().map(|r| r.iter().map(|&x| Rationals.from_i64(x)).collect()).collect();
        let (rq, pq) = gauss_jordan(&Rationals, q, ncols, true);
        let (rb, pb) = bareiss(big, ncols, true);
        prop_assert_eq!(&pq, &pb);
        // every pivot entry equals the common scale; dividing it out gives the RREF
        for (i, &c) in pq.iter().enumerate() {
            let scale = &rb[i][c];
            prop_assert_eq!(scale, &rb[pq.len() - 1][pq[pq.len() - 1]]);
            let row: Vec<BigRational> = rb[i].iter().map(|x| BigRational::new(x.clone(), scale.clone())).collect();
            prop_assert_eq!(&row, &rq[i]);
        }
    }

    #[test]
    fn rank_plus_nullity((m, ncols) in int_matrix()) {
        let f = PrimeField::new(101).unwrap();
        let rows: Vec<Vec<u64>> = m.iter().map(|r| r.iter().map(|&x| f.from_i64(x)).collect()).collect();
        let kernel = linalg::nullspace(&f, &rows, ncols);
        prop_assert_eq!(linalg::rank(&f, &rows, ncols) + kernel.len(), ncols);
        for v in &kernel {
            prop_assert!(linalg::mat_vec(&f, &rows, v).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn subduction_round_trip(coeffs in prop::collection::vec(-30i64..=30, 14)) {
        let par = catalog::duffing_parameterization(Rationals);
        let basis = par.basis(2);
        let want: Vec<BigRational> = coeffs.iter().map(|&c| Rationals.from_i64(c)).collect();
        let mut g = MultiPoly::zero(Rationals, par.vars().clone());
        for (c, b) in want.iter().zip(basis.elements()) {
            g = &g + &b.scale(c);
        }
        let r = par.subduct(&g, 2);
        prop_assert!(r.is_member());
        prop_assert_eq!(r.coeffs, want);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn multiplication_matrices_commute(seed in any::<u64>()) {
        let f = PrimeField::new(P).unwrap();
        let inst = catalog::duffing_random(f, seed);
        let opts = SolveOptions { dreg: Some(3), seed, ..Default::default() };
        let rep = commuting_matrices(&inst.sys, &opts).unwrap();
        prop_assert_eq!(rep.mult.delta, 5);
        prop_assert!(rep.mult.commutes());
        prop_assert!(rep.mult.h_is_identity());
    }

    #[test]
    fn reduction_preserves_kernel(seed in any::<u64>()) {
        let f = PrimeField::new(P).unwrap();
        let inst = catalog::del_pezzo_instance(f, 1, seed);
        let full = km_matrix(&inst.sys, 3, false).unwrap();
        let red = km_matrix(&inst.sys, 3, true).unwrap();
        prop_assert_eq!(
            linalg::nullspace(&f, &full.entries, full.ncols()),
            linalg::nullspace(&f, &red.entries, red.ncols())
        );
    }
}
