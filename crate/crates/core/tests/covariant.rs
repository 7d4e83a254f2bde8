use jetcalc::algebra::{q, Parity};
use jetcalc::covariant::{
    check_covariance, check_covariance_basis, compose, lagrangian_of_form, lie_vs_euler, ConstantForm, ParamField,
    EXTERIOR_D_APPENDS,
};
use jetcalc::evolutionary::EvolutionaryField;
use jetcalc::random::{self, Shape};
use jetcalc::variational::{dbar, weight_linear_in_last, Lagrangian};
use jetcalc::{GradedPoly, Generator, Signature};
use proptest::prelude::*;
use rand::Rng;

fn x(sig: &Signature, a: u16, idx: &[u16]) -> GradedPoly {
    GradedPoly::generator(Generator::Jet(sig.coord_sorted(a, idx)))
}

fn t(sig: &Signature, i: u16) -> GradedPoly {
    GradedPoly::generator(sig.t(i))
}

fn shape(max_order: usize) -> Shape {
    Shape {
        terms: 3,
        max_degree: 2,
        max_order,
        coeff: 6,
        with_t: false,
    }
}

fn scaling(sig: &Signature, i: u16) -> ParamField {
    let mut components = vec![GradedPoly::zero(); sig.n_params() as usize];
    components[i as usize - 1] = t(sig, i);
    ParamField {
        components,
        parity: Parity::Even,
    }
}

#[test]
fn form_lagrangian_examples() {
    let sig = Signature::even(1, 2);
    let mut w = ConstantForm::new(1);
    w.add(&[2], x(&sig, 1, &[]));
    assert_eq!(lagrangian_of_form(&w, &sig).unwrap().body, &x(&sig, 1, &[]) * &x(&sig, 2, &[1]));

    let plane = Signature::even(2, 2);
    let mut w = ConstantForm::new(2);
    w.add(&[1, 2], GradedPoly::one());
    let expected = &(&x(&plane, 1, &[1]) * &x(&plane, 2, &[2])) - &(&x(&plane, 2, &[1]) * &x(&plane, 1, &[2]));
    assert_eq!(lagrangian_of_form(&w, &plane).unwrap().body, expected);
    let mut swapped = ConstantForm::new(2);
    swapped.add(&[2, 1], GradedPoly::one());
    assert_eq!(lagrangian_of_form(&swapped, &plane).unwrap().body, -expected);

    assert!(lagrangian_of_form(&w, &sig).is_err());
    assert!(lagrangian_of_form(&w, &Signature::with_parities(2, 0, &[Parity::Odd, Parity::Even])).is_err());
}

#[test]
fn exterior_derivative_convention() {
    // d(x¹ dx²) = dx² dx¹ when the new differential is appended.
    assert!(EXTERIOR_D_APPENDS);
    let sig = Signature::even(1, 2);
    let mut w = ConstantForm::new(1);
    w.add(&[2], x(&sig, 1, &[]));
    let mut expected = ConstantForm::new(2);
    expected.add(&[2, 1], GradedPoly::one());
    assert_eq!(w.exterior_derivative(&sig), expected);
    let l = lagrangian_of_form(&w, &sig).unwrap();
    let ld = lagrangian_of_form(&w.exterior_derivative(&sig), &sig.extended()).unwrap();
    assert_eq!(dbar(&sig, &l.body), ld.body);
}

#[test]
fn covariance_examples() {
    let sig = Signature::even(1, 2);
    let mut w = ConstantForm::new(1);
    w.add(&[2], &x(&sig, 1, &[]) * &x(&sig, 1, &[]));
    let lw = lagrangian_of_form(&w, &sig).unwrap();
    assert!(check_covariance(&lw, &q(1), &scaling(&sig, 1)).unwrap().is_zero());

    let bad = Lagrangian::new(sig.clone(), x(&sig, 1, &[1, 1]));
    assert!(!check_covariance(&bad, &q(1), &scaling(&sig, 1)).unwrap().is_zero());

    let translation = ParamField {
        components: vec![GradedPoly::one()],
        parity: Parity::Even,
    };
    let any = Lagrangian::new(sig.clone(), &bad.body * &x(&sig, 2, &[]));
    assert!(check_covariance(&any, &q(3), &translation).unwrap().is_zero());

    let quadratic = Lagrangian::new(sig.clone(), &x(&sig, 1, &[1]) * &x(&sig, 1, &[1]));
    assert!(check_covariance(&quadratic, &q(2), &scaling(&sig, 1)).unwrap().is_zero());
    assert!(!check_covariance(&quadratic, &q(1), &scaling(&sig, 1)).unwrap().is_zero());
}

#[test]
fn covariance_basis_examples() {
    let sig = Signature::even(2, 3);
    let mut w = ConstantForm::new(2);
    w.add(&[1, 3], x(&sig, 2, &[]));
    w.add(&[2, 3], GradedPoly::one());
    let report = check_covariance_basis(&lagrangian_of_form(&w, &sig).unwrap(), &q(1), 1).unwrap();
    assert!(report.passed());
    assert!(!report.chain.is_empty());
    let constant = Lagrangian::new(sig.clone(), GradedPoly::constant(q(5)));
    assert!(check_covariance_basis(&constant, &q(0), 1).unwrap().passed());
    let second = Lagrangian::new(sig.clone(), x(&sig, 1, &[1, 2]));
    assert!(!check_covariance_basis(&second, &q(1), 2).unwrap().passed());
}

#[test]
fn composition_examples() {
    let sig = Signature::even(1, 1);
    let l = Lagrangian::new(sig.clone(), &x(&sig, 1, &[1]) * &x(&sig, 1, &[]));
    assert_eq!(compose(&l, &sig, &[x(&sig, 1, &[])]).unwrap().body, l.body);
    let y1 = Lagrangian::new(sig.clone(), x(&sig, 1, &[1]));
    let square = &x(&sig, 1, &[]) * &x(&sig, 1, &[]);
    let expected = (&x(&sig, 1, &[]) * &x(&sig, 1, &[1])).scale(&q(2));
    assert_eq!(compose(&y1, &sig, &[square]).unwrap().body, expected);
    let odd = Signature::with_parities(1, 0, &[Parity::Odd]);
    assert!(compose(&y1, &odd, &[x(&odd, 1, &[])]).is_err());
}

#[test]
fn lie_vs_euler_examples() {
    let sig = Signature::even(1, 2);
    let l = Lagrangian::new(sig.clone(), &x(&sig, 2, &[]) * &x(&sig, 2, &[1]));
    let x1 = EvolutionaryField::new(&sig, vec![GradedPoly::one(), GradedPoly::zero()], Parity::Even).unwrap();
    let r = lie_vs_euler(&l, &x1).unwrap();
    assert!(r.lie.is_zero() && r.xf.is_zero() && r.is_divergence());
    let jet_field = EvolutionaryField::new(&sig, vec![x(&sig, 1, &[1]), GradedPoly::zero()], Parity::Even).unwrap();
    assert!(lie_vs_euler(&l, &jet_field).is_err());
}

/// y(s) = x(As): y^a_j = Σ_k A_{kj} x^a_k, so a first-order L picks up det A.
fn linear_pullback(sig: &Signature, l: &GradedPoly, a: &[[i64; 2]; 2]) -> GradedPoly {
    l.substitute(|g| match g {
        Generator::Jet(c) if c.order() == 1 => {
            let j = c.multi.indices()[0] as usize - 1;
            let mut out = GradedPoly::zero();
            for k in 0..2 {
                out += &x(sig, c.fiber, &[k as u16 + 1]).scale(&q(a[k][j]));
            }
            Some(out)
        }
        _ => None,
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn form_correspondence(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let r = rng.gen_range(1..=2u16);
        let m = rng.gen_range(r as usize + 1..=4);
        let sig = Signature::even(r, m);
        let w = random::constant_form(&mut rng, &sig, r as usize, &shape(0));
        let l = lagrangian_of_form(&w, &sig).unwrap();
        let ld = lagrangian_of_form(&w.exterior_derivative(&sig), &sig.extended()).unwrap();
        prop_assert_eq!(dbar(&sig, &l.body), ld.body);
        prop_assert!(check_covariance_basis(&l, &q(1), 1).unwrap().passed());
        prop_assert!(w.exterior_derivative(&sig).exterior_derivative(&sig.extended()).is_zero());
    }

    #[test]
    fn form_lagrangians_scale_by_the_jacobian(seed in any::<u64>(), a in prop::array::uniform2(prop::array::uniform2(-3i64..=3))) {
        let mut rng = random::rng(seed);
        let sig = Signature::even(2, 3);
        let w = random::constant_form(&mut rng, &sig, 2, &shape(0));
        let l = lagrangian_of_form(&w, &sig).unwrap().body;
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        prop_assert_eq!(linear_pullback(&sig, &l, &a), l.scale(&q(det)));
    }

    #[test]
    fn composition_preserves_closedness(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let base = random::signature(&mut rng, 1, 1, 2, true);
        let target = base.extended();
        let inner = random::poly(&mut rng, &base, &shape(1));
        let l = Lagrangian::new(target.clone(), dbar(&base, &inner));
        prop_assert!(weight_linear_in_last(&target, &l.body));
        let source = Signature::with_parities(target.r, target.s, &[Parity::Even, Parity::Odd]);
        let f: Vec<GradedPoly> = (1..=target.fiber_dim())
            .map(|a| random::homogeneous(&mut rng, &source, &shape(1), target.fiber_parity(a)))
            .collect();
        let lf = compose(&l, &source, &f).unwrap();
        prop_assert!(dbar(&source, &lf.body).is_zero());
    }

    #[test]
    fn composition_with_point_maps_keeps_covariance(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let sig = Signature::even(2, 3);
        let w = random::constant_form(&mut rng, &sig, 2, &shape(0));
        let l = lagrangian_of_form(&w, &sig).unwrap();
        let f: Vec<GradedPoly> = (0..3).map(|_| random::poly(&mut rng, &sig, &shape(0))).collect();
        let lf = compose(&l, &sig, &f).unwrap();
        prop_assert!(check_covariance_basis(&lf, &q(1), 1).unwrap().passed());
    }

    #[test]
    fn lie_derivative_differs_by_divergence(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let sig = random::signature(&mut rng, 2, 1, 3, true);
        let l = Lagrangian::new(sig.clone(), random::poly(&mut rng, &sig, &shape(2)));
        let parity = if rng.gen_bool(0.5) { Parity::Odd } else { Parity::Even };
        let field = random::field(&mut rng, &sig, &shape(0), parity);
        prop_assert!(lie_vs_euler(&l, &field).unwrap().is_divergence());
    }

    #[test]
    fn lie_derivative_of_form_lagrangian_stays_covariant(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let sig = Signature::even(2, 3);
        let w = random::constant_form(&mut rng, &sig, 2, &shape(0));
        let l = lagrangian_of_form(&w, &sig).unwrap();
        let linear = Shape { max_degree: 1, ..shape(0) };
        let field = random::field(&mut rng, &sig, &linear, Parity::Even);
        let lie = Lagrangian::new(sig.clone(), lie_vs_euler(&l, &field).unwrap().lie);
        prop_assert_eq!(jetcalc::variational::order_of(&lie.body) <= 1, true);
        prop_assert!(check_covariance_basis(&lie, &q(1), 1).unwrap().passed());
    }
}
