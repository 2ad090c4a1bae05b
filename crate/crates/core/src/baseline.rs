//! Analytical model of the multi-message extension of GASP codes: each
//! worker gets `m` coded partitions of both `A` and `B`, so `T` colluders see
//! `mT` evaluations and the threshold is GASP's with `T` replaced by `mT`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GaspParams {
    pub k: usize,
    pub l: usize,
    pub t: usize,
    pub m: usize,
}

impl GaspParams {
    pub fn new(k: usize, l: usize, t: usize, m: usize) -> Self {
        Self { k, l, t, m }
    }
}

/// Recovery threshold of multi-message GASP. Only defined for `L <= K`.
pub fn gasp_rth(g: &GaspParams) -> Result<usize> {
    let (k, l, mt) = (g.k, g.l, g.m * g.t);
    if mt == 0 {
        return Err(Error::UnsupportedRegime(format!(
            "mT must be at least 1 (m = {}, T = {})",
            g.m, g.t
        )));
    }
    if l > k {
        return Err(Error::UnsupportedRegime(format!(
            "thresholds are only tabulated for L <= K (K = {k}, L = {l})"
        )));
    }
    let rth = if mt == 1 && 1 < l {
        k * l + k + l
    } else if 1 < mt && mt < l {
        k * l + k + l + mt * mt + mt - 3
    } else if l <= mt && mt < k {
        (k + mt) * (l + 1) - 1
    } else if l <= mt && k <= mt {
        2 * k * l + 2 * mt - 1
    } else {
        return Err(Error::UnsupportedRegime(format!(
            "no case for K = {k}, L = {l}, mT = {mt}"
        )));
    };
    Ok(rth)
}

/// `floor(budget / 2)`: each sub-task needs a fresh partition of both
/// matrices.
pub fn gasp_max_m(budget: usize) -> Result<usize> {
    if budget < 2 {
        return Err(Error::BudgetTooSmall(budget));
    }
    Ok(budget / 2)
}

/// `N m (rs/K + sc/L) ceil(log2 q)` bits.
pub fn gasp_upload_cost_bits(
    g: &GaspParams,
    n: usize,
    r: usize,
    s: usize,
    c: usize,
    bits_per_element: u64,
) -> Result<u128> {
    if !r.is_multiple_of(g.k) {
        return Err(Error::IndivisibleDimensions {
            what: "r",
            dim: r,
            parts: g.k,
        });
    }
    if !c.is_multiple_of(g.l) {
        return Err(Error::IndivisibleDimensions {
            what: "c",
            dim: c,
            parts: g.l,
        });
    }
    let per_task = (r * s / g.k + s * c / g.l) as u128;
    Ok(n as u128 * g.m as u128 * per_task * u128::from(bits_per_element))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FieldOrder, MERSENNE_31};
    use crate::poly::SchemeParams;
    use crate::scheme::upload_cost_bits;

    #[test]
    fn threshold_table() {
        let rth = |m| gasp_rth(&GaspParams::new(5, 5, 3, m)).unwrap();
        assert_eq!(rth(1), 44);
        assert_eq!(rth(2), 61);
        assert_eq!(rth(3), 67);
        assert_eq!(rth(4), 73);
        assert_eq!(rth(5), 79);
    }

    #[test]
    fn each_case_is_reachable() {
        // (a) mT = 1 < L <= K
        assert_eq!(gasp_rth(&GaspParams::new(4, 3, 1, 1)).unwrap(), 12 + 4 + 3);
        // (b) 1 < mT < L <= K
        assert_eq!(
            gasp_rth(&GaspParams::new(5, 4, 1, 2)).unwrap(),
            20 + 5 + 4 + 4 + 2 - 3
        );
        // (c) L <= mT < K
        assert_eq!(gasp_rth(&GaspParams::new(6, 2, 1, 3)).unwrap(), 9 * 3 - 1);
        // (d) L <= K <= mT
        assert_eq!(gasp_rth(&GaspParams::new(2, 2, 2, 2)).unwrap(), 8 + 8 - 1);
        // L = K = mT = 1 falls in (d)
        assert_eq!(gasp_rth(&GaspParams::new(1, 1, 1, 1)).unwrap(), 3);
    }

    #[test]
    fn rejects_outside_table() {
        assert!(matches!(
            gasp_rth(&GaspParams::new(2, 3, 1, 1)),
            Err(Error::UnsupportedRegime(_))
        ));
        assert!(matches!(
            gasp_rth(&GaspParams::new(3, 3, 0, 1)),
            Err(Error::UnsupportedRegime(_))
        ));
    }

    #[test]
    fn monotone_in_m() {
        for k in 1..=8 {
            for l in 1..=k {
                for t in 1..=3 {
                    let series: Vec<usize> = (1..=l)
                        .map(|m| gasp_rth(&GaspParams::new(k, l, t, m)).unwrap())
                        .collect();
                    assert!(
                        series.windows(2).all(|w| w[0] <= w[1]),
                        "{k} {l} {t}: {series:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn case_boundaries_jump_upward() {
        // sweep mT directly across each boundary with T = 1
        for k in 2..=8 {
            for l in 2..=k {
                let series: Vec<usize> = (1..=2 * k)
                    .map(|m| gasp_rth(&GaspParams::new(k, l, 1, m)).unwrap())
                    .collect();
                assert!(
                    series.windows(2).all(|w| w[0] < w[1]),
                    "{k} {l}: {series:?}"
                );
            }
        }
    }

    #[test]
    fn budget_mapping() {
        let expected = [
            (2, 1),
            (3, 1),
            (4, 2),
            (5, 2),
            (6, 3),
            (7, 3),
            (8, 4),
            (9, 4),
            (10, 5),
        ];
        for (budget, m) in expected {
            assert_eq!(gasp_max_m(budget).unwrap(), m);
        }
        assert!(gasp_max_m(1).is_err());
    }

    #[test]
    fn upload_cost() {
        let bits = FieldOrder::new(MERSENNE_31).unwrap().bits();
        let g = GaspParams::new(5, 5, 3, 3);
        assert_eq!(
            gasp_upload_cost_bits(&g, 51, 100, 100, 100, bits).unwrap(),
            51 * 3 * (2000 + 2000) * 31
        );
        let g1 = GaspParams::new(5, 5, 3, 1);
        let p1 = SchemeParams::new(5, 5, 3, 1, 51, MERSENNE_31).unwrap();
        assert_eq!(
            gasp_upload_cost_bits(&g1, 51, 100, 100, 100, bits).unwrap(),
            upload_cost_bits(&p1, 100, 100, 100).unwrap()
        );
        let g2 = GaspParams::new(5, 5, 3, 2);
        assert_eq!(
            gasp_upload_cost_bits(&g2, 51, 100, 100, 100, bits).unwrap(),
            2 * gasp_upload_cost_bits(&g1, 51, 100, 100, 100, bits).unwrap()
        );
    }
}
