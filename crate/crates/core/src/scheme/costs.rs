use crate::error::{Error, Result};
use crate::poly::SchemeParams;

/// Total upload in bits: `N (rs/K + m sc/L) ceil(log2 q)`.
pub fn upload_cost_bits(p: &SchemeParams, r: usize, s: usize, c: usize) -> Result<u128> {
    if !r.is_multiple_of(p.k) {
        return Err(Error::IndivisibleDimensions {
            what: "r",
            dim: r,
            parts: p.k,
        });
    }
    if !c.is_multiple_of(p.l) {
        return Err(Error::IndivisibleDimensions {
            what: "c",
            dim: c,
            parts: p.l,
        });
    }
    let per_worker = (r * s / p.k + p.m * s * c / p.l) as u128;
    Ok(p.n as u128 * per_worker * u128::from(p.q.bits()))
}

/// Largest `m` that fits a per-worker budget counted in equal-sized matrix
/// partitions: one partition holds `A(x_i)`, the rest hold B-derivatives.
pub fn max_m_for_budget(budget: usize, l: usize) -> Result<usize> {
    if budget < 2 {
        return Err(Error::BudgetTooSmall(budget));
    }
    Ok((budget - 1).min(l))
}
