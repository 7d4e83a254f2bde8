//! Seeded random generators for signatures, polynomials and forms.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

use crate::algebra::{q, GradedPoly, Generator, Parity};
use crate::jet::{enumerate_coords, JetCoord, Signature};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of a random polynomial.
#[derive(Clone, Debug)]
pub struct Shape {
    pub terms: usize,
    pub max_degree: usize,
    pub max_order: usize,
    pub coeff: i64,
    pub with_t: bool,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            terms: 3,
            max_degree: 3,
            max_order: 2,
            coeff: 5,
            with_t: false,
        }
    }
}

pub fn signature(rng: &mut TestRng, r_max: u16, s_max: u16, fiber_max: usize, odd_fiber: bool) -> Signature {
    let r = rng.gen_range(0..=r_max);
    let s = rng.gen_range(0..=s_max);
    let (r, s) = if r + s == 0 { (1, s) } else { (r, s) };
    let n = rng.gen_range(1..=fiber_max);
    let parities: Vec<Parity> = (0..n)
        .map(|_| {
            if odd_fiber && rng.gen_bool(0.4) {
                Parity::Odd
            } else {
                Parity::Even
            }
        })
        .collect();
    Signature::with_parities(r, s, &parities)
}

fn coefficient(rng: &mut TestRng, bound: i64) -> i64 {
    loop {
        let c = rng.gen_range(-bound..=bound);
        if c != 0 {
            return c;
        }
    }
}

/// Random polynomial in the jet coordinates (and optionally t).
pub fn poly(rng: &mut TestRng, sig: &Signature, shape: &Shape) -> GradedPoly {
    let coords = enumerate_coords(sig, shape.max_order);
    let mut pool: Vec<Generator> = coords.into_iter().map(Generator::Jet).collect();
    if shape.with_t {
        pool.extend(sig.params().map(|i| sig.t(i)));
    }
    poly_from_pool(rng, &pool, shape)
}

pub fn poly_from_pool(rng: &mut TestRng, pool: &[Generator], shape: &Shape) -> GradedPoly {
    let mut out = GradedPoly::zero();
    for _ in 0..shape.terms {
        let deg = rng.gen_range(0..=shape.max_degree);
        let factors: Vec<(Generator, u32)> = (0..deg)
            .filter_map(|_| pool.choose(rng).cloned())
            .map(|g| (g, 1))
            .collect();
        out += &GradedPoly::product(&factors, q(coefficient(rng, shape.coeff)));
    }
    out
}

/// Random homogeneous polynomial of the given parity (may be zero).
pub fn homogeneous(rng: &mut TestRng, sig: &Signature, shape: &Shape, parity: Parity) -> GradedPoly {
    let p = poly(rng, sig, shape);
    let (even, odd) = p.split_parity();
    if parity.is_odd() {
        odd
    } else {
        even
    }
}

/// Random jet form: Σ c · f · dt^{I} · Γ_{σ₁} ⋯ Γ_{σ_p}, with |I| = q.
pub fn jet_form(rng: &mut TestRng, sig: &Signature, p: usize, qdeg: usize, shape: &Shape) -> GradedPoly {
    let coords: Vec<JetCoord> = enumerate_coords(sig, shape.max_order);
    let mut out = GradedPoly::zero();
    for _ in 0..shape.terms {
        let f = poly(rng, sig, &Shape { terms: 1, ..shape.clone() });
        let mut factors: Vec<(Generator, u32)> = Vec::new();
        for _ in 0..qdeg {
            let i = rng.gen_range(1..=sig.n_params());
            factors.push((sig.dt(i), 1));
        }
        for _ in 0..p {
            let c = coords.choose(rng).expect("nonempty").clone();
            factors.push((Generator::Gamma(c), 1));
        }
        out += &(&f * &GradedPoly::product(&factors, q(1)));
    }
    out
}

/// Random polynomial linear in Γ, with Γ placed in front.
pub fn gamma_linear(rng: &mut TestRng, sig: &Signature, shape: &Shape) -> GradedPoly {
    let coords: Vec<JetCoord> = enumerate_coords(sig, shape.max_order);
    let mut out = GradedPoly::zero();
    for _ in 0..shape.terms {
        let c = coords.choose(rng).expect("nonempty").clone();
        let f = poly(rng, sig, &Shape { terms: 1, ..shape.clone() });
        out += &(&GradedPoly::generator(Generator::Gamma(c)) * &f);
    }
    out
}

/// Random integral form Σ c_I 𝒟x_I with c of Γ-degree p and |I| ≤ max_k.
pub fn integral_form(
    rng: &mut TestRng,
    sig: &Signature,
    p: usize,
    max_k: usize,
    shape: &Shape,
) -> crate::bicomplex::IntegralForm {
    let mut out = crate::bicomplex::IntegralForm::zero(sig);
    for _ in 0..shape.terms {
        let k = rng.gen_range(0..=max_k);
        let idx: Vec<u16> = (0..k).map(|_| rng.gen_range(1..=sig.n_params())).collect();
        let c = jet_form(rng, sig, p, 0, &Shape { terms: 1, ..shape.clone() });
        let term = crate::bicomplex::IntegralForm::symbol(sig, &idx, c).expect("valid indices");
        out = out.add(&term);
    }
    out
}

/// Random evolutionary field of the given parity.
pub fn field(rng: &mut TestRng, sig: &Signature, shape: &Shape, parity: Parity) -> crate::evolutionary::EvolutionaryField {
    let components = (1..=sig.fiber_dim())
        .map(|a| homogeneous(rng, sig, shape, sig.fiber_parity(a) + parity))
        .collect();
    crate::evolutionary::EvolutionaryField::new(sig, components, parity).expect("parities match")
}

/// Random constant-coefficient-in-jets form with polynomial coefficients in x.
pub fn constant_form(rng: &mut TestRng, sig: &Signature, degree: usize, shape: &Shape) -> crate::covariant::ConstantForm {
    let mut w = crate::covariant::ConstantForm::new(degree);
    let m = sig.fiber_dim();
    let order0 = Shape { max_order: 0, ..shape.clone() };
    for _ in 0..shape.terms {
        let mut idx: Vec<u16> = (1..=m).collect();
        idx.shuffle(rng);
        idx.truncate(degree);
        let c = poly(rng, sig, &order0);
        w.add(&idx, c);
    }
    w
}

pub fn uniform(rng: &mut TestRng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}
