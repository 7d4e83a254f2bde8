use crate::algebra::{GradedPoly, Generator, Q};
use crate::error::{Error, Result};
use crate::jet::{JetCoord, Signature};

/// Integration by parts on forms linear in Γ.
///
/// While some Γ^a_σ with |σ| > 0 remains, take the highest one, write the form as
/// Γ^a_σ B + (rest), and subtract D(τ₀)/c where τ₀ = `build(Γ^a_{σ'}, i, B)` for
/// σ = iσ'. The constant c is read off from ∂D(τ₀)/∂Γ^a_σ = c B and checked exactly.
/// Returns the reduced form and the list of (τ₀, −1/c) whose sum is the witness.
pub(crate) fn peel<T>(
    sig: &Signature,
    start: &GradedPoly,
    build: impl Fn(&JetCoord, u16, &GradedPoly) -> T,
    d_of: impl Fn(&T) -> Result<GradedPoly>,
) -> Result<(GradedPoly, Vec<(T, Q)>)> {
    let mut cur = start.clone();
    let mut pieces = Vec::new();
    loop {
        let top = cur
            .generators()
            .into_iter()
            .filter_map(|g| match g {
                Generator::Gamma(c) if c.order() > 0 => Some(c),
                _ => None,
            })
            .max();
        let Some(top) = top else { break };
        let (first, rest) = top.multi.split_first(sig).expect("positive order");
        let lower = top.with_multi(rest);
        let gamma = Generator::Gamma(top.clone());
        let coeff = cur.partial(&gamma);
        let (even, odd) = coeff.split_parity();
        for part in [even, odd] {
            if part.is_zero() {
                continue;
            }
            let tau0 = build(&lower, first, &part);
            let d = d_of(&tau0)?;
            let lead = d.partial(&gamma);
            let (m, cb) = part.terms().next().expect("nonzero part");
            let c = lead.coefficient(m) / cb;
            if c == Q::from_integer(0.into()) || lead != part.scale(&c) {
                return Err(Error::Property(format!("integration by parts stalled at {gamma}")));
            }
            let inv = Q::from_integer(1.into()) / c;
            cur -= &d.scale(&inv);
            pieces.push((tau0, -inv));
        }
    }
    Ok((cur, pieces))
}
