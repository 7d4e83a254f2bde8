use super::jet::NumericJet;

/// A closed-form map ℝ^r → ℝ^m with analytic derivatives.
pub trait Chart: Sync {
    fn params(&self) -> usize;
    fn ambient(&self) -> usize;
    /// Jet of order ≤ `order` at s.
    fn jet(&self, s: &[f64], order: usize) -> NumericJet;
}

/// Unit sphere, (θ, φ) ↦ (sin θ cos φ, sin θ sin φ, cos θ). Outward normal is x_θ × x_φ.
#[derive(Clone, Copy, Debug, Default)]
pub struct SphereChart;

impl Chart for SphereChart {
    fn params(&self) -> usize {
        2
    }

    fn ambient(&self) -> usize {
        3
    }

    fn jet(&self, s: &[f64], order: usize) -> NumericJet {
        assert!(order <= 2, "sphere chart provides derivatives up to order 2");
        let (th, ph) = (s[0], s[1]);
        let (st, ct, sp, cp) = (th.sin(), th.cos(), ph.sin(), ph.cos());
        let x = [st * cp, st * sp, ct];
        let x1 = [ct * cp, ct * sp, -st];
        let x2 = [-st * sp, st * cp, 0.0];
        let x11 = [-st * cp, -st * sp, -ct];
        let x12 = [-ct * sp, ct * cp, 0.0];
        let x22 = [-st * cp, -st * sp, 0.0];
        let mut j = NumericJet::new(2, 3, order);
        j.t = s.to_vec();
        for a in 0..3 {
            let f = a as u16 + 1;
            j.set(f, &[], x[a]);
            if order >= 1 {
                j.set(f, &[1], x1[a]);
                j.set(f, &[2], x2[a]);
            }
            if order >= 2 {
                j.set(f, &[1, 1], x11[a]);
                j.set(f, &[1, 2], x12[a]);
                j.set(f, &[2, 2], x22[a]);
            }
        }
        j
    }
}

/// Polynomial chart x^a(s) = Σ_k c^a_k s^{e_k}.
#[derive(Clone, Debug)]
pub struct PolyChart {
    pub r: usize,
    /// Per ambient coordinate: (coefficient, exponent vector).
    pub components: Vec<Vec<(f64, Vec<u32>)>>,
}

impl PolyChart {
    /// ∂^{σ} x^a at s.
    pub fn derivative(&self, a: usize, sigma: &[u16], s: &[f64]) -> f64 {
        let mut order = vec![0u32; self.r];
        for &i in sigma {
            order[i as usize - 1] += 1;
        }
        let mut total = 0.0;
        for (c, e) in &self.components[a] {
            let mut v = *c;
            for k in 0..self.r {
                if e[k] < order[k] {
                    v = 0.0;
                    break;
                }
                let mut fall = 1.0;
                for t in 0..order[k] {
                    fall *= (e[k] - t) as f64;
                }
                v *= fall * s[k].powi((e[k] - order[k]) as i32);
            }
            total += v;
        }
        total
    }
}

impl Chart for PolyChart {
    fn params(&self) -> usize {
        self.r
    }

    fn ambient(&self) -> usize {
        self.components.len()
    }

    fn jet(&self, s: &[f64], order: usize) -> NumericJet {
        let mut j = NumericJet::new(self.r, self.ambient(), order);
        j.t = s.to_vec();
        let mut sigmas: Vec<Vec<u16>> = vec![vec![]];
        let mut frontier: Vec<Vec<u16>> = vec![vec![]];
        for _ in 0..order {
            let mut next = Vec::new();
            for sig in &frontier {
                let start = sig.last().copied().unwrap_or(1);
                for i in start..=self.r as u16 {
                    let mut t = sig.clone();
                    t.push(i);
                    next.push(t);
                }
            }
            sigmas.extend(next.iter().cloned());
            frontier = next;
        }
        for a in 0..self.ambient() {
            for sig in &sigmas {
                j.set(a as u16 + 1, sig, self.derivative(a, sig, s));
            }
        }
        j
    }
}
