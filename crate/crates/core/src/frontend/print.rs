use num_traits::{One, Signed};

use crate::algebra::{GradedPoly, Generator};
use crate::bicomplex::IntegralForm;
use crate::jet::{JetCoord, Signature};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Style {
    /// `x[2; 1]`, `G[1;]`: fiber by index.
    #[default]
    Generic,
    /// `y[; 1]`, `G[y;]`: fiber by name.
    Named,
}

fn multi(c: &JetCoord) -> String {
    if c.multi.is_empty() {
        String::new()
    } else {
        format!(" {}", c.multi)
    }
}

fn generator(g: &Generator, sig: &Signature, style: Style) -> String {
    match (style, g) {
        (Style::Named, Generator::Jet(c)) => {
            let name = &sig.fiber[c.fiber as usize - 1].name;
            if c.multi.is_empty() {
                name.clone()
            } else {
                format!("{name}[;{}]", multi(c))
            }
        }
        (Style::Named, Generator::Gamma(c)) => {
            format!("G[{};{}]", sig.fiber[c.fiber as usize - 1].name, multi(c))
        }
        _ => g.to_string(),
    }
}

/// Canonical rendering: terms in monomial order joined by " + " / " - ".
pub fn print(p: &GradedPoly, sig: &Signature, style: Style) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (m, c)) in p.terms().enumerate() {
        let sign = if c.is_negative() { "-" } else { "+" };
        if k == 0 {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(&format!(" {sign} "));
        }
        let abs = c.abs();
        let mut parts = Vec::new();
        if m.is_one() || !abs.is_one() {
            parts.push(abs.to_string());
        }
        for (g, e) in m.factors() {
            let name = generator(g, sig, style);
            parts.push(if *e == 1 { name } else { format!("{name}^{e}") });
        }
        out.push_str(&parts.join("*"));
    }
    out
}

/// Σ (c_I)*Vol[I].
pub fn print_integral(w: &IntegralForm, style: Style) -> String {
    if w.is_zero() {
        return "0".into();
    }
    let parts: Vec<String> = w
        .terms()
        .map(|(idx, c)| {
            let idx: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
            format!("({})*Vol[{}]", print(c, &w.sig, style), idx.join(" "))
        })
        .collect();
    parts.join(" + ")
}
