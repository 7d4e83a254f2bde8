use std::f64::consts::PI;

use jetcalc::numeric::{
    discrete_variation_check, eval_poly, gauss_bonnet_density, gauss_bonnet_sum, gauss_map_density,
    grassmann_form_value, grassmann_lagrangian, integrate, reparametrization_check, sphere_patch, transport,
    BuiltinLagrangian, Chart, Diffeo, NumericJet, PathPoly, PolyChart, QuadraticDiffeo, SphereChart, SurfacePatch,
};
use jetcalc::random::{self, Shape};
use jetcalc::selftest::{displayed_density_oracle, random_diffeo, random_poly_chart, random_surface_jet};
use jetcalc::variational::{dbar, total_derivative, Lagrangian};
use jetcalc::{Error, GradedPoly, Generator, Signature};
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::Rng;

fn x(sig: &Signature, a: u16, idx: &[u16]) -> GradedPoly {
    GradedPoly::generator(Generator::Jet(sig.coord_sorted(a, idx)))
}

fn flat_jet(m: usize) -> NumericJet {
    let mut j = NumericJet::new(2, m, 2);
    for a in 1..=m as u16 {
        for s in [&[][..], &[1], &[2], &[1, 1], &[1, 2], &[2, 2]] {
            j.set(a, s, 0.0);
        }
    }
    j.set(1, &[1], 1.0);
    j.set(2, &[2], 1.0);
    j
}

#[test]
fn polynomial_evaluation() {
    let sig = Signature::even(1, 2);
    let l = &x(&sig, 1, &[]) * &x(&sig, 2, &[1]);
    let mut j = NumericJet::new(1, 2, 1);
    j.set(1, &[], 2.0);
    j.set(2, &[1], 3.0);
    assert_eq!(eval_poly(&l, &j).unwrap(), 6.0);
    assert_eq!(eval_poly(&GradedPoly::zero(), &j).unwrap(), 0.0);
    assert!(matches!(eval_poly(&x(&sig, 1, &[1, 1]), &j), Err(Error::MissingJet(..))));
}

#[test]
fn curvature_of_plane_and_sphere() {
    for m in 3..=5 {
        assert_eq!(gauss_bonnet_density(&flat_jet(m)).unwrap(), 0.0);
    }
    assert_eq!(gauss_map_density(&flat_jet(3)).unwrap(), 0.0);
    let equator = SphereChart.jet(&[PI / 2.0, 0.3], 2);
    assert!((gauss_bonnet_density(&equator).unwrap() - 2.0).abs() < 1e-14);
    for th in [0.3, 1.0, 2.5] {
        let j = SphereChart.jet(&[th, 1.1], 2);
        assert!((gauss_map_density(&j).unwrap() - th.sin()).abs() < 1e-12);
        assert!((gauss_bonnet_sum(&j).unwrap() - th.sin()).abs() < 1e-12);
    }
}

#[test]
fn degenerate_metric_is_an_error() {
    let mut j = flat_jet(3);
    j.set(2, &[2], 0.0);
    assert!(matches!(gauss_bonnet_density(&j), Err(Error::Degenerate(_))));
}

fn swap_parameters(j: &NumericJet) -> NumericJet {
    let mut out = NumericJet::new(2, j.m, 2);
    let swap = |s: &[u16]| -> Vec<u16> {
        let mut v: Vec<u16> = s.iter().map(|i| 3 - i).collect();
        v.sort_unstable();
        v
    };
    for ((a, s), v) in j.entries() {
        out.set(*a, &swap(s), *v);
    }
    out
}

#[test]
fn gauss_map_under_orientation_reversal() {
    // For surfaces in ℝ³ the cofactor normal flips along with the frame, so the density is even.
    let j = SphereChart.jet(&[1.0, 0.4], 2);
    let swapped = swap_parameters(&j);
    assert!((gauss_map_density(&swapped).unwrap() - gauss_map_density(&j).unwrap()).abs() < 1e-12);
    // For plane curves reversing t is odd: the unit circle has density 1 and its reversal −1.
    let circle = |t: f64, sign: f64| {
        let mut c = NumericJet::new(1, 2, 2);
        c.set(1, &[], t.cos());
        c.set(2, &[], sign * t.sin());
        c.set(1, &[1], -t.sin());
        c.set(2, &[1], sign * t.cos());
        c.set(1, &[1, 1], -t.cos());
        c.set(2, &[1, 1], -sign * t.sin());
        c
    };
    let forward = gauss_map_density(&circle(0.7, 1.0)).unwrap();
    let backward = gauss_map_density(&circle(0.7, -1.0)).unwrap();
    assert!((forward.abs() - 1.0).abs() < 1e-12);
    assert!((forward + backward).abs() < 1e-12);
}

#[test]
fn grassmann_form_examples() {
    let u1 = [1.0, 0.0, 0.0, 0.0];
    let u2 = [0.0, 1.0, 0.0, 0.0];
    let v = [0.0, 0.0, 2.0, -1.0];
    let w = [0.0, 0.5, 3.0, 4.0];
    assert!((grassmann_form_value(&u1, &u2, &v, &w).unwrap() - 2.0).abs() < 1e-15);
    assert!(grassmann_form_value(&u1, &u2, &u1, &w).unwrap().abs() < 1e-15);
    assert!(grassmann_form_value(&u1, &u1, &v, &w).is_err());
}

#[test]
fn sphere_integrals() {
    let patch = sphere_patch(1e-3, 200);
    let gb = integrate(&gauss_bonnet_density, &patch).unwrap();
    let gm = integrate(&gauss_map_density, &patch).unwrap();
    assert!((gb.value - 8.0 * PI).abs() / (8.0 * PI) < 1e-3);
    assert!((gm.value - 4.0 * PI).abs() / (4.0 * PI) < 1e-3);
    assert!(gb.error_estimate < 1e-3);
    let zero = integrate(&|_: &NumericJet| Ok(0.0), &patch).unwrap();
    assert_eq!(zero.value, 0.0);
}

#[test]
fn midpoint_rule_is_second_order() {
    // ∫∫ sin θ cos² φ over [0, π] × [0, π] = 2 · π/2 = π.
    let chart = SphereChart;
    let patch = |n| SurfacePatch {
        chart: &chart,
        lower: vec![0.0, 0.0],
        upper: vec![PI, PI],
        resolution: n,
    };
    let f = |j: &NumericJet| Ok(j.t[0].sin() * j.t[1].cos().powi(2));
    let e1 = (integrate(&f, &patch(40)).unwrap().value - PI).abs();
    let e2 = (integrate(&f, &patch(80)).unwrap().value - PI).abs();
    let ratio = e1 / e2;
    assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
    let r = integrate(&f, &patch(80)).unwrap();
    assert!((r.richardson - PI).abs() < e2 / 10.0);
}

#[test]
fn reparametrization_examples() {
    let patch = SurfacePatch {
        chart: &SphereChart,
        lower: vec![1.0, 0.5],
        upper: vec![1.4, 0.9],
        resolution: 5,
    };
    let gb = BuiltinLagrangian::gauss_bonnet(3);
    assert_eq!(reparametrization_check(&gb, &patch, &QuadraticDiffeo::identity(2)).unwrap(), 0.0);
    let mut affine = QuadraticDiffeo::identity(2);
    affine.a = vec![vec![1.3, 0.2], vec![-0.1, 0.7]];
    affine.b = vec![-0.2, 0.4];
    let moved = SurfacePatch {
        lower: vec![1.0, 0.2],
        upper: vec![1.3, 0.5],
        ..patch
    };
    assert!(reparametrization_check(&gb, &moved, &affine).unwrap() < 1e-9);
    let mut flip = QuadraticDiffeo::identity(2);
    flip.a = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
    flip.b = vec![0.0, 0.0];
    let square = SurfacePatch {
        chart: &SphereChart,
        lower: vec![1.0, 1.0],
        upper: vec![1.2, 1.2],
        resolution: 3,
    };
    assert!(matches!(reparametrization_check(&gb, &square, &flip), Err(Error::Orientation(_))));
}

#[test]
fn variation_examples() {
    let sig = Signature::even(1, 2);
    let l = Lagrangian::new(
        sig.clone(),
        &(&x(&sig, 1, &[1]) * &x(&sig, 1, &[1])) + &(&x(&sig, 1, &[]) * &x(&sig, 2, &[1])),
    );
    let path = PathPoly {
        components: vec![vec![0.5, 1.0], vec![-1.0, 2.0]],
    };
    let bump = PathPoly::bump(&[1.0, -2.0]);
    let report = discrete_variation_check(&l, &path, &bump, 1e-4).unwrap();
    assert!(report.deviation < 1e-6, "{report:?}");
    assert!(report.predicted.abs() > 1e-3);
    let none = discrete_variation_check(&l, &path, &PathPoly::zero(2), 1e-4).unwrap();
    assert_eq!(none.deviation, 0.0);
    let div = Lagrangian::new(sig.clone(), total_derivative(&sig, &(&x(&sig, 1, &[]) * &x(&sig, 2, &[])), 1));
    let report = discrete_variation_check(&div, &path, &bump, 1e-4).unwrap();
    assert!(report.predicted.abs() < 1e-14 && report.finite_difference.abs() < 1e-9);
}

/// First-order dual numbers for an exact chain-rule oracle.
#[derive(Clone, Copy)]
struct Dual(f64, f64);

impl Dual {
    fn mul(self, o: Dual) -> Dual {
        Dual(self.0 * o.0, self.0 * o.1 + self.1 * o.0)
    }
}

/// d/dt of p along the path, where generators x^a_{1…1} take values of the path derivatives.
fn dual_eval(p: &GradedPoly, path: &PathPoly, t: f64) -> f64 {
    let mut total = Dual(0.0, 0.0);
    for (m, c) in p.terms() {
        let mut v = Dual(c.to_f64().expect("finite"), 0.0);
        for (g, e) in m.factors() {
            let Generator::Jet(j) = g else { panic!("jet generators only") };
            let (a, k) = (j.fiber as usize - 1, j.order());
            let d = Dual(path.derivative(a, k, t), path.derivative(a, k + 1, t));
            for _ in 0..*e {
                v = v.mul(d);
            }
        }
        total = Dual(total.0 + v.0, total.1 + v.1);
    }
    total.1
}

fn rotate(j: &NumericJet, rng: &mut random::TestRng) -> NumericJet {
    let m = j.m;
    let mut rot = vec![vec![0.0; m]; m];
    for (k, row) in rot.iter_mut().enumerate() {
        row[k] = 1.0;
    }
    for _ in 0..6 {
        let (p, q) = (rng.gen_range(0..m), rng.gen_range(0..m));
        if p == q {
            continue;
        }
        let th: f64 = rng.gen_range(0.0..6.0);
        for row in rot.iter_mut() {
            let (a, b) = (row[p], row[q]);
            row[p] = th.cos() * a - th.sin() * b;
            row[q] = th.sin() * a + th.cos() * b;
        }
    }
    let mut out = NumericJet::new(j.r, m, j.order);
    for s in [&[][..], &[1], &[2], &[1, 1], &[1, 2], &[2, 2]] {
        let v = j.vector(s).unwrap();
        for a in 0..m {
            out.set(a as u16 + 1, s, (0..m).map(|b| rot[a][b] * v[b]).sum());
        }
    }
    out
}

/// K√g from the first fundamental form alone.
fn brioschi(chart: &PolyChart, s: &[f64]) -> f64 {
    let d = |sigma: &[u16]| -> Vec<f64> { (0..chart.ambient()).map(|a| chart.derivative(a, sigma, s)).collect() };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let (xu, xv, xuu, xuv, xvv) = (d(&[1]), d(&[2]), d(&[1, 1]), d(&[1, 2]), d(&[2, 2]));
    let (xuuv, xuvv) = (d(&[1, 1, 2]), d(&[1, 2, 2]));
    let (e, f, g) = (dot(&xu, &xu), dot(&xu, &xv), dot(&xv, &xv));
    let (eu, ev) = (2.0 * dot(&xuu, &xu), 2.0 * dot(&xuv, &xu));
    let (gu, gv) = (2.0 * dot(&xuv, &xv), 2.0 * dot(&xvv, &xv));
    let fu = dot(&xuu, &xv) + dot(&xu, &xuv);
    let fv = dot(&xuv, &xv) + dot(&xu, &xvv);
    let evv = 2.0 * (dot(&xuvv, &xu) + dot(&xuv, &xuv));
    let guu = 2.0 * (dot(&xuuv, &xv) + dot(&xuv, &xuv));
    let fuv = dot(&xuuv, &xv) + dot(&xuu, &xvv) + dot(&xuv, &xuv) + dot(&xu, &xuvv);
    let det3 = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let a = det3([
        [-0.5 * evv + fuv - 0.5 * guu, 0.5 * eu, fu - 0.5 * ev],
        [fv - 0.5 * gu, e, f],
        [0.5 * gv, f, g],
    ]);
    let b = det3([[0.0, 0.5 * ev, 0.5 * gu], [0.5 * ev, e, f], [0.5 * gu, f, g]]);
    let w = e * g - f * f;
    (a - b) / (w * w) * w.sqrt()
}

fn compose_diffeos(f: &dyn Diffeo, g: &dyn Diffeo, s: &[f64]) -> (Vec<Vec<f64>>, Vec<Vec<Vec<f64>>>) {
    let r = s.len();
    let (gs, dg, d2g) = g.eval(s);
    let (_, df, d2f) = f.eval(&gs);
    let mut d1 = vec![vec![0.0; r]; r];
    let mut d2 = vec![vec![vec![0.0; r]; r]; r];
    for k in 0..r {
        for i in 0..r {
            for l in 0..r {
                d1[k][i] += df[k][l] * dg[l][i];
            }
            for j in 0..r {
                for l in 0..r {
                    d2[k][i][j] += df[k][l] * d2g[l][i][j];
                    for n in 0..r {
                        d2[k][i][j] += d2f[k][l][n] * dg[l][i] * dg[n][j];
                    }
                }
            }
        }
    }
    (d1, d2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn dbar_of_functions_is_the_chain_rule(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let sig = Signature::even(0, 3);
        let l = random::poly(&mut rng, &sig, &Shape { max_order: 0, max_degree: 4, ..Shape::default() });
        let path = PathPoly { components: (0..3).map(|_| (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect() };
        let t: f64 = rng.gen_range(0.0..1.0);
        let got = eval_poly(&dbar(&sig, &l), &path.jet(t, 1)).unwrap();
        let want = dual_eval(&l, &path, t);
        prop_assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn total_derivative_is_the_chain_rule(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let sig = Signature::even(1, 2);
        let l = random::poly(&mut rng, &sig, &Shape { max_order: 2, ..Shape::default() });
        let path = PathPoly { components: (0..2).map(|_| (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect() };
        let t: f64 = rng.gen_range(0.0..1.0);
        let got = eval_poly(&total_derivative(&sig, &l, 1), &path.jet(t, 3)).unwrap();
        prop_assert!((got - dual_eval(&l, &path, t)).abs() < 1e-10);
    }

    #[test]
    fn curvature_is_rotation_invariant(seed in any::<u64>(), m in 3usize..=5) {
        let mut rng = random::rng(seed);
        let j = random_surface_jet(&mut rng, m);
        let rotated = rotate(&j, &mut rng);
        let (a, b) = (gauss_bonnet_density(&j).unwrap(), gauss_bonnet_density(&rotated).unwrap());
        prop_assert!((a - b).abs() < 1e-10 * a.abs().max(1.0));
    }

    #[test]
    fn grassmann_composition_matches_displayed_density(seed in any::<u64>(), m in 3usize..=5) {
        let mut rng = random::rng(seed);
        let j = random_surface_jet(&mut rng, m);
        prop_assert!((grassmann_lagrangian(&j).unwrap() - displayed_density_oracle(&j)).abs() < 1e-9);
        prop_assert!((gauss_bonnet_sum(&j).unwrap() - displayed_density_oracle(&j)).abs() < 1e-9);
    }

    #[test]
    fn curvature_matches_intrinsic_formula(seed in any::<u64>(), m in 3usize..=5) {
        let mut rng = random::rng(seed);
        let chart = random_poly_chart(&mut rng, m);
        let s = [rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2)];
        let extrinsic = gauss_bonnet_sum(&chart.jet(&s, 2)).unwrap();
        prop_assert!((extrinsic - brioschi(&chart, &s)).abs() < 1e-8, "{extrinsic}");
    }

    #[test]
    fn gauss_map_matches_curvature_in_three_dimensions(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let j = random_surface_jet(&mut rng, 3);
        prop_assert!((gauss_map_density(&j).unwrap() - gauss_bonnet_sum(&j).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn transport_composes(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let center = [0.1, -0.1];
        let (f, g) = (random_diffeo(&mut rng, &center), random_diffeo(&mut rng, &center));
        let chart = random_poly_chart(&mut rng, 3);
        let s = [rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1)];
        let (gs, dg, d2g) = g.eval(&s);
        let (fgs, df, d2f) = f.eval(&gs);
        let stepwise = transport(&transport(&chart.jet(&fgs, 2), &df, &d2f).unwrap(), &dg, &d2g).unwrap();
        let (d1, d2) = compose_diffeos(&f, &g, &s);
        let direct = transport(&chart.jet(&fgs, 2), &d1, &d2).unwrap();
        for ((key, v), (key2, w)) in stepwise.entries().zip(direct.entries()) {
            prop_assert_eq!(key, key2);
            prop_assert!((v - w).abs() < 1e-10);
        }
    }

    #[test]
    fn nonlinear_reparametrization(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let chart = random_poly_chart(&mut rng, 4);
        let f = random_diffeo(&mut rng, &[0.0, 0.0]);
        let patch = SurfacePatch { chart: &chart, lower: vec![-0.2, -0.2], upper: vec![0.2, 0.2], resolution: 4 };
        let dev = reparametrization_check(&BuiltinLagrangian::gauss_bonnet(4), &patch, &f).unwrap();
        prop_assert!(dev < 1e-8);
    }
}
