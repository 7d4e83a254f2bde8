use jetcalc::algebra::{q, sign_of, Parity};
use jetcalc::bicomplex::{gamma_degree, horizontal_d, top_form, vertical_delta};
use jetcalc::evolutionary::{jacobi, EvolutionaryField};
use jetcalc::random::{self, Shape};
use jetcalc::variational::total_derivative;
use jetcalc::{GradedPoly, Generator, Signature};
use proptest::prelude::*;
use rand::Rng;

fn x(sig: &Signature, a: u16, idx: &[u16]) -> GradedPoly {
    GradedPoly::generator(Generator::Jet(sig.coord_sorted(a, idx)))
}

fn shape(max_order: usize) -> Shape {
    Shape {
        terms: 3,
        max_degree: 3,
        max_order,
        coeff: 6,
        with_t: false,
    }
}

fn random_parity(rng: &mut random::TestRng) -> Parity {
    if rng.gen_bool(0.5) {
        Parity::Odd
    } else {
        Parity::Even
    }
}

#[test]
fn prolongation_examples() {
    let sig = Signature::even(1, 2);
    let constant = EvolutionaryField::new(&sig, vec![GradedPoly::one(), GradedPoly::zero()], Parity::Even).unwrap();
    let p = constant.prolong();
    assert!(p.coefficients(3).iter().all(|(c, y)| c.order() == 0 || y.is_zero()));

    let scaling = EvolutionaryField::new(&sig, vec![x(&sig, 1, &[]), GradedPoly::zero()], Parity::Even).unwrap();
    let p = scaling.prolong();
    assert_eq!(p.coefficient(&sig.coord_sorted(1, &[1])), x(&sig, 1, &[1]));
    assert_eq!(p.coefficient(&sig.coord_sorted(1, &[1, 1])), x(&sig, 1, &[1, 1]));

    let y = EvolutionaryField::new(&sig, vec![&x(&sig, 1, &[]) * &x(&sig, 2, &[1]), GradedPoly::zero()], Parity::Even)
        .unwrap();
    let expected = &(&x(&sig, 1, &[1]) * &x(&sig, 2, &[1])) + &(&x(&sig, 1, &[]) * &x(&sig, 2, &[1, 1]));
    assert_eq!(y.prolong().coefficient(&sig.coord_sorted(1, &[1])), expected);
    assert!(y.prolong().apply(&GradedPoly::constant(q(7))).is_zero());
    assert_eq!(y.prolong().apply(&x(&sig, 1, &[1])), expected);
}

#[test]
fn field_parity_is_checked() {
    let sig = Signature::with_parities(1, 0, &[Parity::Even, Parity::Odd]);
    assert!(EvolutionaryField::new(&sig, vec![x(&sig, 2, &[]), GradedPoly::zero()], Parity::Even).is_err());
    assert!(EvolutionaryField::new(&sig, vec![x(&sig, 2, &[]), x(&sig, 1, &[])], Parity::Odd).is_ok());
}

#[test]
fn jacobi_examples() {
    let sig = Signature::even(1, 1);
    let d = EvolutionaryField::new(&sig, vec![GradedPoly::one()], Parity::Even).unwrap();
    let e = EvolutionaryField::new(&sig, vec![x(&sig, 1, &[])], Parity::Even).unwrap();
    assert_eq!(jacobi(&d, &e).components, vec![GradedPoly::one()]);
    assert!(jacobi(&e, &e).components.iter().all(|c| c.is_zero()));
}

#[test]
fn interior_on_canonical_form() {
    let sig = Signature::even(1, 2);
    let y = EvolutionaryField::new(&sig, vec![x(&sig, 2, &[1]), x(&sig, 1, &[])], Parity::Even).unwrap();
    let b = &x(&sig, 1, &[]) * &x(&sig, 2, &[]);
    let gamma = GradedPoly::generator(Generator::Gamma(sig.x(1)));
    let w = &(&gamma * &b) * &top_form(&sig);
    assert_eq!(y.prolong().interior(&w), &(&x(&sig, 2, &[1]) * &b) * &top_form(&sig));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn interior_identities(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let sig = random::signature(&mut rng, 2, 2, 3, true);
        let parity = random_parity(&mut rng);
        let y = random::field(&mut rng, &sig, &shape(1), parity);
        let p = y.prolong();
        let (pd, qd) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
        let w = random::jet_form(&mut rng, &sig, pd, qd, &shape(2));
        let s = parity.sign();
        let d_iota = &horizontal_d(&sig, &p.interior(&w)) + &p.interior(&horizontal_d(&sig, &w)).scale(&s);
        prop_assert!(d_iota.is_zero());
        let delta_iota = &vertical_delta(&p.interior(&w)) + &p.interior(&vertical_delta(&w)).scale(&s);
        prop_assert_eq!(delta_iota, p.lie_on_forms(&w).scale(&s));
        let lie_d = &p.lie_on_forms(&horizontal_d(&sig, &w)) - &horizontal_d(&sig, &p.lie_on_forms(&w)).scale(&s);
        prop_assert!(lie_d.is_zero());
        let iota = p.interior(&w);
        for (m, _) in iota.terms() {
            prop_assert_eq!(gamma_degree(m) as usize, pd - 1);
        }
        if pd == 0 {
            prop_assert!(iota.is_zero());
        }
    }

    #[test]
    fn lie_derivative_on_lagrangians(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let sig = random::signature(&mut rng, 2, 1, 3, true);
        let parity = random_parity(&mut rng);
        let p = random::field(&mut rng, &sig, &shape(1), parity).prolong();
        let l = random::poly(&mut rng, &sig, &shape(2));
        let lt = &l * &top_form(&sig);
        prop_assert_eq!(p.lie_on_forms(&lt), &p.apply(&l) * &top_form(&sig));
        prop_assert_eq!(p.lie_on_forms(&lt), p.interior(&vertical_delta(&lt)));
    }

    #[test]
    fn prolongation_commutes_with_total_derivatives(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let sig = random::signature(&mut rng, 2, 2, 3, true);
        let parity = random_parity(&mut rng);
        let p = random::field(&mut rng, &sig, &shape(1), parity).prolong();
        let f = random::poly(&mut rng, &sig, &Shape { with_t: true, ..shape(2) });
        for i in sig.params() {
            let sign = sign_of(parity.koszul(sig.param_parity(i)));
            let lhs = &p.apply(&total_derivative(&sig, &f, i)) - &total_derivative(&sig, &p.apply(&f), i).scale(&sign);
            prop_assert!(lhs.is_zero());
        }
    }

    #[test]
    fn bracket_of_prolongations(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let sig = random::signature(&mut rng, 2, 2, 3, true);
        let (py, pz) = (random_parity(&mut rng), random_parity(&mut rng));
        let y = random::field(&mut rng, &sig, &shape(1), py);
        let z = random::field(&mut rng, &sig, &shape(1), pz);
        let f = random::poly(&mut rng, &sig, &shape(2));
        let (a, b) = (y.prolong(), z.prolong());
        let lhs = &a.apply(&b.apply(&f)) - &b.apply(&a.apply(&f)).scale(&sign_of(py.koszul(pz)));
        prop_assert_eq!(lhs, jacobi(&y, &z).prolong().apply(&f));
        prop_assert_eq!(jacobi(&y, &z).parity, py + pz);
    }

    #[test]
    fn jacobi_identity_for_even_fields(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let sig = random::signature(&mut rng, 2, 1, 2, false);
        let fields: Vec<EvolutionaryField> =
            (0..3).map(|_| random::field(&mut rng, &sig, &shape(1), Parity::Even)).collect();
        let (a, b, c) = (&fields[0], &fields[1], &fields[2]);
        let total: Vec<GradedPoly> = (0..sig.fiber_dim() as usize)
            .map(|k| {
                &(&jacobi(a, &jacobi(b, c)).components[k] + &jacobi(b, &jacobi(c, a)).components[k])
                    + &jacobi(c, &jacobi(a, b)).components[k]
            })
            .collect();
        prop_assert!(total.iter().all(|p| p.is_zero()));
        let anti: Vec<GradedPoly> =
            (0..sig.fiber_dim() as usize).map(|k| &jacobi(a, b).components[k] + &jacobi(b, a).components[k]).collect();
        prop_assert!(anti.iter().all(|p| p.is_zero()));
    }
}
