use cycpair::bar::suite::{draw_samples, SampleSpec};
use cycpair::bar::{BarLin, BarOps};
use cycpair::dga::{zoo, MfAlgebra};
use cycpair::exact::matrix::solve_columns;
use cycpair::exact::{q, Rational, SVec};
use cycpair::poly::{hessian, milnor_data, WPoly, WeightSystem};
use cycpair::trace::Retract;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..40, 1i64..12).prop_map(|(n, d)| q(n, d))
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// `x^a + y^b` with the weights that make it homogeneous.
fn brieskorn(a: u32, b: u32) -> (WPoly, WeightSystem) {
    let (a64, b64) = (a as i64, b as i64);
    let w = a64 * b64 / gcd(a64, b64);
    let f = WPoly::from_terms(2, [(q(1, 1), vec![a, 0]), (q(1, 1), vec![0, b])]);
    (f, WeightSystem::new(vec![w / a64, w / b64], w).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn rationals_form_a_field(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, Rational::zero());
        if !a.is_zero() {
            prop_assert!((&a * &a.recip()).is_one());
        }
        prop_assert_eq!(a.to_string().parse::<Rational>().unwrap(), a);
    }

    #[test]
    fn sparse_solver_recovers_a_consistent_right_hand_side(
        entries in prop::collection::vec(prop::collection::vec(-3i64..4, 6), 5),
        x in prop::collection::vec(-5i64..6, 5),
    ) {
        // five columns of length six
        let cols: Vec<SVec> = entries
            .iter()
            .map(|c| c.iter().enumerate().filter(|(_, v)| **v != 0).map(|(i, v)| (i, q(*v, 1))).collect())
            .collect();
        let mut rhs = vec![Rational::zero(); 6];
        for (col, xj) in entries.iter().zip(&x) {
            for (i, v) in col.iter().enumerate() {
                rhs[i] = &rhs[i] + &q(v * xj, 1);
            }
        }
        let rhs_sparse: SVec = rhs.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (i, v.clone())).collect();
        let y = solve_columns(&cols, &rhs_sparse).expect("consistent system");
        let mut back = vec![Rational::zero(); 6];
        for (j, yj) in &y {
            for (i, v) in &cols[*j] {
                back[*i] = &back[*i] + &(v * yj);
            }
        }
        prop_assert_eq!(back, rhs);
    }

    #[test]
    fn milnor_number_of_brieskorn_sums(a in 2u32..6, b in 2u32..6) {
        let (f, ws) = brieskorn(a, b);
        let md = milnor_data(&f, &ws).unwrap();
        // oracle: product of (W / w_i - 1)
        prop_assert_eq!(md.mu(), ((a - 1) * (b - 1)) as usize);
    }

    #[test]
    fn residue_pairing_is_symmetric_nondegenerate_and_normalized(a in 2u32..5, b in 2u32..5) {
        let (f, ws) = brieskorn(a, b);
        let md = milnor_data(&f, &ws).unwrap();
        let mu = md.mu();
        let basis: Vec<WPoly> = (0..mu).map(|i| md.basis_poly(i)).collect();
        for p in &basis {
            let partners = basis.iter().filter(|r| !md.residue_pairing(p, r).is_zero()).count();
            prop_assert!(partners > 0);
            for r in &basis {
                prop_assert_eq!(md.residue_pairing(p, r), md.residue_pairing(r, p));
            }
        }
        let one = WPoly::monomial(vec![0, 0]);
        prop_assert_eq!(md.residue_pairing(&one, &hessian(&f)), Rational::from_int(mu as i64));
    }

    #[test]
    fn cyclic_differentials_square_to_zero(zoo_index in 0usize..9, seed in 0u64..1000) {
        let names = zoo::names();
        let name = names[zoo_index % names.len()];
        let a = zoo::random_test_dga(name, seed).unwrap();
        let ops = BarOps::new(&a);
        let spec = SampleSpec { samples: 4, max_length: 4, ..SampleSpec::default() };
        for s in draw_samples(&a, &a.basis(), 0, seed, &spec) {
            let t: BarLin<usize> = ops.normalize(BarLin::basis(s.t.clone()));
            let bt = ops.lin(&t, |x| ops.b(x));
            let big_bt = ops.lin(&t, |x| ops.connes(x));
            prop_assert!(ops.lin(&bt, |x| ops.b(x)).is_zero(), "{name}: b^2 != 0");
            prop_assert!(ops.lin(&big_bt, |x| ops.connes(x)).is_zero(), "{name}: B^2 != 0");
            let mut anti = ops.lin(&bt, |x| ops.connes(x));
            anti.add_lin(&ops.lin(&big_bt, |x| ops.b(x)));
            prop_assert!(anti.is_zero(), "{name}: bB + Bb != 0");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn retracts_of_monomial_factorizations(n in 2u32..6) {
        let f = WPoly::monomial(vec![n]);
        let ws = WeightSystem::new(vec![1], n as i64).unwrap();
        let a = MfAlgebra::new(&f, &ws, None).unwrap();
        let r = Retract::new(&a).unwrap();
        prop_assert_eq!(r.verify(), Ok(()));
        prop_assert_eq!(r.ha_dim(), 2);
    }
}
