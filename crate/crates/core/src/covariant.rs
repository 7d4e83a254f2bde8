//! Covariance of Lagrangians under reparametrization, L_ω, and composition.

use std::collections::{BTreeMap, HashMap};

use crate::algebra::{q, sign_of, GradedPoly, Generator, Q};
use crate::error::{Error, Result};
use crate::evolutionary::EvolutionaryField;
use crate::jet::{JetCoord, MultiIndex, Signature};
use crate::variational::{euler, total_derivative, Lagrangian};

/// Sign convention of the exterior derivative: dω = Σ ∂_b ω_A dx^A dx^b (new differential appended).
pub const EXTERIOR_D_APPENDS: bool = true;

#[derive(Clone, Debug, PartialEq)]
pub struct CovariantClaim {
    pub lagrangian: Lagrangian,
    pub weight: Q,
    pub verified_to_order: Option<usize>,
}

/// Field K = K^i ∂/∂t^i on the parameter space.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamField {
    pub components: Vec<GradedPoly>,
    pub parity: crate::algebra::Parity,
}

/// K^{(∞)}L + w Σ_i (−1)^{ĩ(K̃+1)} ∂K^i/∂t^i L, with K^{(∞)} = K^i D_i − P_{K^i x^a_i ∂/∂x^a}.
pub fn check_covariance(l: &Lagrangian, w: &Q, k: &ParamField) -> Result<GradedPoly> {
    let sig = &l.sig;
    if k.components.len() != sig.n_params() as usize {
        return Err(Error::Degree("one field component per parameter".into()));
    }
    let mut out = GradedPoly::zero();
    let mut q_comp = vec![GradedPoly::zero(); sig.fiber_dim() as usize];
    for (idx, ki) in k.components.iter().enumerate() {
        if ki.is_zero() {
            continue;
        }
        let i = idx as u16 + 1;
        out += &(ki * &total_derivative(sig, &l.body, i));
        for (a, qa) in q_comp.iter_mut().enumerate() {
            let xi = GradedPoly::generator(Generator::Jet(sig.coord_sorted(a as u16 + 1, &[i])));
            *qa += &(ki * &xi);
        }
        let neg = sig.param_parity(i).koszul(k.parity.flip());
        let div = ki.partial(&sig.t(i)).scale(&(w * sign_of(neg)));
        out += &(&div * &l.body);
    }
    let qf = EvolutionaryField::new(sig, q_comp, k.parity)?;
    out -= &qf.prolong().apply(&l.body);
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct CovarianceReport {
    /// (J, i, residual of the field t^J ∂/∂t^i).
    pub fields: Vec<(Vec<u16>, u16, GradedPoly)>,
    /// (J, i, identity-chain value at t = 0), even parameters only.
    pub chain: Vec<(Vec<u16>, u16, GradedPoly)>,
}

impl CovarianceReport {
    pub fn passed(&self) -> bool {
        self.fields.iter().chain(&self.chain).all(|(_, _, r)| r.is_zero())
    }
}

/// Monomial fields t^J ∂/∂t^i with 1 ≤ |J| ≤ n + 1, plus the direct identity chain.
pub fn check_covariance_basis(l: &Lagrangian, w: &Q, n: usize) -> Result<CovarianceReport> {
    let sig = &l.sig;
    let mut fields = Vec::new();
    let mut chain = Vec::new();
    for deg in 1..=n + 1 {
        for j in sig.multi_indices(deg) {
            let tj_factors: Vec<(Generator, u32)> = j.indices().iter().map(|&i| (sig.t(i), 1)).collect();
            let tj = GradedPoly::product(&tj_factors, q(1));
            for i in sig.params() {
                let mut comps = vec![GradedPoly::zero(); sig.n_params() as usize];
                comps[i as usize - 1] = tj.clone();
                let parity = j.parity() + sig.param_parity(i);
                let k = ParamField { components: comps, parity };
                fields.push((j.indices().to_vec(), i, check_covariance(l, w, &k)?));
                if sig.s == 0 {
                    chain.push((j.indices().to_vec(), i, identity_chain(l, w, &j, i)));
                }
            }
        }
    }
    Ok(CovarianceReport { fields, chain })
}

/// Σ_{σ ⊇ J} σ!/(σ−J)! x^a_{i(σ−J)} ∂L/∂x^a_σ − w [J = {i}] L, for even parameters.
fn identity_chain(l: &Lagrangian, w: &Q, j: &MultiIndex, i: u16) -> GradedPoly {
    let sig = &l.sig;
    let mut out = GradedPoly::zero();
    for g in l.body.generators() {
        let Generator::Jet(c) = &g else { continue };
        let Some(rest) = multiset_minus(c.multi.indices(), j.indices()) else { continue };
        let ratio = falling(c.multi.indices(), j.indices());
        let mut idx = rest;
        idx.push(i);
        idx.sort_unstable();
        let x = GradedPoly::generator(Generator::Jet(sig.coord_sorted(c.fiber, &idx)));
        out += &(&x * &l.body.partial(&g)).scale(&q(ratio as i64));
    }
    if j.indices() == [i] {
        out -= &l.body.scale(w);
    }
    out
}

fn multiset_minus(sigma: &[u16], j: &[u16]) -> Option<Vec<u16>> {
    let mut rest = sigma.to_vec();
    for x in j {
        let pos = rest.iter().position(|y| y == x)?;
        rest.remove(pos);
    }
    Some(rest)
}

// σ!/(σ−J)! as a product over distinct indices.
fn falling(sigma: &[u16], j: &[u16]) -> u64 {
    let mut out = 1u64;
    let mut distinct = j.to_vec();
    distinct.dedup();
    for x in distinct {
        let n = sigma.iter().filter(|&&y| y == x).count() as u64;
        let k = j.iter().filter(|&&y| y == x).count() as u64;
        for t in 0..k {
            out *= n - t;
        }
    }
    out
}

/// ω = Σ_{A increasing} ω_A dx^{a₁} ⋯ dx^{a_k} with coefficients in the order-0 coordinates.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ConstantForm {
    pub degree: usize,
    pub coefficients: BTreeMap<Vec<u16>, GradedPoly>,
}

impl ConstantForm {
    pub fn new(degree: usize) -> ConstantForm {
        ConstantForm {
            degree,
            coefficients: BTreeMap::new(),
        }
    }

    /// Add c dx^{a₁} ⋯ dx^{a_k} for indices in any order (even fiber).
    pub fn add(&mut self, indices: &[u16], c: GradedPoly) {
        if indices.len() != self.degree {
            panic!("degree mismatch");
        }
        let Some((sorted, neg)) = sort_antisymmetric(indices) else { return };
        let slot = self.coefficients.entry(sorted.clone()).or_default();
        *slot += &c.scale(&sign_of(neg));
        if slot.is_zero() {
            self.coefficients.remove(&sorted);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// dω = Σ_A Σ_b ∂_b ω_A dx^A dx^b.
    pub fn exterior_derivative(&self, sig: &Signature) -> ConstantForm {
        let mut out = ConstantForm::new(self.degree + 1);
        for (a, c) in &self.coefficients {
            for b in 1..=sig.fiber_dim() {
                let dc = c.partial(&Generator::Jet(sig.x(b)));
                if dc.is_zero() {
                    continue;
                }
                let mut idx = a.clone();
                if EXTERIOR_D_APPENDS {
                    idx.push(b);
                } else {
                    idx.insert(0, b);
                }
                out.add(&idx, dc);
            }
        }
        out
    }
}

fn sort_antisymmetric(indices: &[u16]) -> Option<(Vec<u16>, bool)> {
    let mut v = indices.to_vec();
    let mut neg = false;
    for x in 0..v.len() {
        for y in x + 1..v.len() {
            if v[x] == v[y] {
                return None;
            }
            if v[x] > v[y] {
                neg = !neg;
            }
        }
    }
    v.sort_unstable();
    Some((v, neg))
}

/// L_ω = Σ_A ω_A det[x^{a_k}_j], over an even (r|0) signature with r = deg ω.
pub fn lagrangian_of_form(w: &ConstantForm, sig: &Signature) -> Result<Lagrangian> {
    if sig.s != 0 || sig.fiber.iter().any(|f| f.parity.is_odd()) {
        return Err(Error::Parity("form Lagrangians need even parameters and fiber".into()));
    }
    if w.degree != sig.r as usize {
        return Err(Error::Degree(format!("form degree {} but r = {}", w.degree, sig.r)));
    }
    let mut body = GradedPoly::zero();
    for (a, c) in &w.coefficients {
        body += &(c * &determinant(sig, a));
    }
    let mut l = Lagrangian::new(sig.clone(), body);
    l.weight = Some(q(1));
    Ok(l)
}

// det[x^{a_k}_j]_{k,j}
fn determinant(sig: &Signature, a: &[u16]) -> GradedPoly {
    let r = a.len();
    let mut out = GradedPoly::zero();
    for perm in permutations(r) {
        let neg = inversions(&perm) % 2 == 1;
        let mut term = GradedPoly::constant(sign_of(neg));
        for (k, &j) in perm.iter().enumerate() {
            let x = GradedPoly::generator(Generator::Jet(sig.coord_sorted(a[k], &[j as u16 + 1])));
            term = &term * &x;
        }
        out += &term;
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn inversions(p: &[usize]) -> usize {
    let mut n = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                n += 1;
            }
        }
    }
    n
}

/// Substitute y^μ_σ ↦ D_σ F^μ. `target` is the signature of L (fiber y), `source` that of F.
pub fn compose(l: &Lagrangian, source: &Signature, f: &[GradedPoly]) -> Result<Lagrangian> {
    let target = &l.sig;
    if target.r != source.r || target.s != source.s {
        return Err(Error::Signature("composition needs equal parameter signatures".into()));
    }
    if f.len() != target.fiber_dim() as usize {
        return Err(Error::Degree("one component per target coordinate".into()));
    }
    for (k, fm) in f.iter().enumerate() {
        let want = target.fiber_parity(k as u16 + 1);
        if !fm.is_zero() && fm.parity() != Some(want) {
            return Err(Error::Parity(format!("component {} must have parity {want:?}", k + 1)));
        }
    }
    let mut memo: HashMap<JetCoord, GradedPoly> = HashMap::new();
    let body = l.body.substitute(|g| match g {
        Generator::Jet(c) => Some(d_sigma(source, f, c, &mut memo)),
        Generator::Gamma(_) | Generator::Dt(_) => None,
        Generator::Param(_) => None,
    })?;
    Ok(Lagrangian::new(source.clone(), body))
}

fn d_sigma(sig: &Signature, f: &[GradedPoly], c: &JetCoord, memo: &mut HashMap<JetCoord, GradedPoly>) -> GradedPoly {
    if let Some(v) = memo.get(c) {
        return v.clone();
    }
    let v = match c.multi.split_first(sig) {
        None => f[c.fiber as usize - 1].clone(),
        Some((i, rest)) => {
            let inner = d_sigma(sig, f, &c.with_multi(rest), memo);
            total_derivative(sig, &inner, i)
        }
    };
    memo.insert(c.clone(), v.clone());
    v
}

pub struct LieVsEuler {
    pub lie: GradedPoly,
    pub xf: GradedPoly,
    /// euler(lie − xf), which vanishes when the difference is a divergence.
    pub certificate: Vec<GradedPoly>,
}

impl LieVsEuler {
    pub fn is_divergence(&self) -> bool {
        self.certificate.iter().all(GradedPoly::is_zero)
    }
}

/// Compare P_X L with Σ X^a F_a(L) for X = X^a(x) ∂/∂x^a.
pub fn lie_vs_euler(l: &Lagrangian, x: &EvolutionaryField) -> Result<LieVsEuler> {
    for c in &x.components {
        if c.generators().iter().any(|g| !matches!(g, Generator::Jet(j) if j.order() == 0)) {
            return Err(Error::Degree("vector field on M must depend on x only".into()));
        }
    }
    let lie = x.prolong().apply(&l.body);
    let mut xf = GradedPoly::zero();
    for (xa, fa) in x.components.iter().zip(euler(&l.sig, &l.body)) {
        xf += &(xa * &fa);
    }
    let certificate = euler(&l.sig, &(&lie - &xf));
    Ok(LieVsEuler { lie, xf, certificate })
}
