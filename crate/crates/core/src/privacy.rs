//! Checks that `T` colluding workers learn nothing about `A` and `B`.
//!
//! A coalition sees `T` A-shares and `mT` B-shares. Each observation is a
//! data term plus a linear combination of the masks; if the mask
//! coefficient matrices are square and invertible, the uniform masks make the
//! observations uniform whatever the data, i.e. a one-time pad.
//! [`exhaustive_mi_check`] confirms this from the definition of mutual
//! information on instances small enough to enumerate.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::field::FieldOrder;
use crate::matrix::FieldMatrix;
use crate::poly::{eval_a, eval_db, EvalPoint, SchemeParams};

/// Coefficients of the masks in a coalition's observations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskCoefficientMatrices {
    /// `T x T`: row `i` is worker `i`'s A-share, column `j` is mask `R_j`,
    /// entry `x_i^(K+j)`.
    pub ma: FieldMatrix,
    /// `mT x mT`: row `i*m + o` is worker `i`'s order-`o` B-share, column
    /// `j*m + j'` is mask `S_{j,j'}`, entry `fall(j', o) x_i^(K+j) y_i^(j'-o)`.
    pub mb: FieldMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskKind {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrivacyVerdict {
    Pass,
    Fail {
        kind: MaskKind,
        rank: usize,
        expected: usize,
        witness: FieldMatrix,
    },
}

impl PrivacyVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, PrivacyVerdict::Pass)
    }
}

fn unchecked_mask_matrices(points: &[EvalPoint], p: &SchemeParams) -> MaskCoefficientMatrices {
    let q = p.q;
    let t = points.len();
    let m = p.m;
    let mut ma = FieldMatrix::zeros(t, t);
    let mut mb = FieldMatrix::zeros(m * t, m * t);
    for (i, pt) in points.iter().enumerate() {
        for j in 0..t {
            let xk = q.pow(pt.x, (p.k + j) as u64);
            ma.set(i, j, xk);
            for o in 0..m {
                for jp in o..m {
                    let coeff = q.falling(jp as u64, o as u64);
                    let v = q.mul(q.mul(coeff, xk), q.pow(pt.y, (jp - o) as u64));
                    mb.set(i * m + o, j * m + jp, v);
                }
            }
        }
    }
    MaskCoefficientMatrices { ma, mb }
}

fn check_coalition(points: &[EvalPoint], p: &SchemeParams) -> Result<()> {
    if points.len() > p.t {
        return Err(Error::InvalidParams(format!(
            "a coalition of {} workers exceeds T = {}",
            points.len(),
            p.t
        )));
    }
    Ok(())
}

/// Mask coefficient matrices for a coalition with the given points.
pub fn mask_matrices(points: &[EvalPoint], p: &SchemeParams) -> Result<MaskCoefficientMatrices> {
    check_coalition(points, p)?;
    for (i, a) in points.iter().enumerate() {
        if points[i + 1..].contains(a) {
            return Err(Error::DuplicatePoints);
        }
    }
    Ok(unchecked_mask_matrices(points, p))
}

/// Passes iff both mask coefficient matrices have full rank. Degenerate
/// points are allowed and produce a `Fail` with the offending matrix.
pub fn perfect_privacy_check(points: &[EvalPoint], p: &SchemeParams) -> Result<PrivacyVerdict> {
    check_coalition(points, p)?;
    let mats = unchecked_mask_matrices(points, p);
    for (kind, mat) in [(MaskKind::A, mats.ma), (MaskKind::B, mats.mb)] {
        let rank = mat.rank(p.q);
        if rank < mat.rows() {
            return Ok(PrivacyVerdict::Fail {
                kind,
                rank,
                expected: mat.rows(),
                witness: mat,
            });
        }
    }
    Ok(PrivacyVerdict::Pass)
}

/// All `t`-subsets of `0..n` in lexicographic order.
pub fn coalitions(n: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if t > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..t).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..t).rev().find(|&i| idx[i] != i + n - t) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..t {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Largest number of `(A, B, masks)` tuples [`exhaustive_mi_check`] will walk.
pub const MAX_ENUMERATION: u64 = 5_000_000;

/// Iterates over all vectors in `F_q^len`, in base-q order.
fn for_each_vector(len: usize, q: u64, mut f: impl FnMut(&[u64])) {
    let mut v = vec![0u64; len];
    loop {
        f(&v);
        let mut i = 0;
        loop {
            if i == len {
                return;
            }
            v[i] += 1;
            if v[i] < q {
                break;
            }
            v[i] = 0;
            i += 1;
        }
    }
}

fn pack(values: impl IntoIterator<Item = u64>, q: u64) -> u64 {
    values.into_iter().fold(0, |acc, v| acc * q + v)
}

/// Exact mutual information, in bits, between the scalar inputs `(A, B)` and
/// what a coalition at `points` observes, by enumerating every input and mask
/// assignment. With `zero_masks` the masks are fixed to zero instead of
/// uniform.
///
/// Requires `K = 1`, `L <= 2`, `T <= 2`, `m <= 2`, `q <= 7` and 1x1 blocks.
pub fn exhaustive_mi_check(
    p: &SchemeParams,
    points: &[EvalPoint],
    zero_masks: bool,
) -> Result<f64> {
    check_coalition(points, p)?;
    let q = p.q.q();
    if p.k != 1 || p.l > 2 || p.t > 2 || p.m > 2 || q > 7 {
        return Err(Error::TooLargeToEnumerate(format!(
            "need K = 1, L <= 2, T <= 2, m <= 2, q <= 7 (got K = {}, L = {}, T = {}, m = {}, q = {q})",
            p.k, p.l, p.t, p.m
        )));
    }
    let data_len = 1 + p.l;
    let mask_len = if zero_masks { 0 } else { p.t + p.t * p.m };
    let tuples = q
        .checked_pow((data_len + mask_len) as u32)
        .unwrap_or(u64::MAX);
    if tuples > MAX_ENUMERATION {
        return Err(Error::TooLargeToEnumerate(format!("{tuples} tuples")));
    }

    let field: FieldOrder = p.q;
    let shape = p.shape();
    let scalar = |v: u64| FieldMatrix::from_vec(1, 1, vec![v], field).expect("1x1");
    let mut joint: HashMap<(u64, u64), u64> = HashMap::new();
    let mut view_counts: HashMap<u64, u64> = HashMap::new();
    let mut secret_counts: HashMap<u64, u64> = HashMap::new();
    let mut failure = None;

    for_each_vector(data_len, q, |data| {
        let a_parts = [scalar(data[0])];
        let b_parts: Vec<FieldMatrix> = data[1..].iter().map(|&v| scalar(v)).collect();
        let secret = pack(data.iter().copied(), q);
        for_each_vector(mask_len, q, |mask| {
            if failure.is_some() {
                return;
            }
            let (r, s) = if zero_masks {
                (vec![scalar(0); p.t], vec![vec![scalar(0); p.m]; p.t])
            } else {
                let r: Vec<FieldMatrix> = mask[..p.t].iter().map(|&v| scalar(v)).collect();
                let s: Vec<Vec<FieldMatrix>> = mask[p.t..]
                    .chunks(p.m)
                    .map(|row| row.iter().map(|&v| scalar(v)).collect())
                    .collect();
                (r, s)
            };
            let mut observed = Vec::with_capacity(points.len() * (1 + p.m));
            for &pt in points {
                match eval_a(&a_parts, &r, pt.x, field) {
                    Ok(v) => observed.push(v.get(0, 0)),
                    Err(e) => failure = Some(e),
                }
                for order in 0..p.m {
                    match eval_db(&b_parts, &s, pt, order, &shape, field) {
                        Ok(v) => observed.push(v.get(0, 0)),
                        Err(e) => failure = Some(e),
                    }
                }
            }
            let view = pack(observed, q);
            *joint.entry((secret, view)).or_default() += 1;
            *view_counts.entry(view).or_default() += 1;
            *secret_counts.entry(secret).or_default() += 1;
        });
    });
    if let Some(e) = failure {
        return Err(e);
    }

    let total: u64 = secret_counts.values().sum();
    let mut mi = 0.0;
    for (&(secret, view), &c) in &joint {
        let num = c as u128 * total as u128;
        let den = secret_counts[&secret] as u128 * view_counts[&view] as u128;
        if num != den {
            mi += c as f64 / total as f64 * (num as f64 / den as f64).log2();
        }
    }
    Ok(mi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coalition_counts() {
        assert_eq!(coalitions(4, 2).len(), 6);
        assert_eq!(coalitions(51, 3).len(), 20825);
        assert_eq!(coalitions(3, 0), vec![Vec::<usize>::new()]);
        assert!(coalitions(2, 3).is_empty());
        assert_eq!(coalitions(3, 3), vec![vec![0, 1, 2]]);
    }
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(x: u64, y: u64) -> EvalPoint {
        EvalPoint::new(x, y)
    }

    #[test]
    fn single_colluder_matrices() {
        let p = SchemeParams::new(2, 1, 1, 1, 3, 7).unwrap();
        let mats = mask_matrices(&[pt(3, 5)], &p).unwrap();
        let x_k = p.q.pow(3, 2);
        assert_eq!(mats.ma.as_slice(), &[x_k]);
        assert_eq!(mats.mb.as_slice(), &[x_k]);
    }

    #[test]
    fn two_colluders_ma() {
        let p = SchemeParams::new(1, 1, 2, 1, 3, 7).unwrap();
        let mats = mask_matrices(&[pt(1, 0), pt(2, 0)], &p).unwrap();
        let expected = FieldMatrix::from_rows(&[vec![1, 1], vec![2, 4]], p.q).unwrap();
        assert_eq!(mats.ma, expected);
        // det = 1*4 - 1*2 = 2
        assert_eq!(mats.ma.rank(p.q), 2);
    }

    #[test]
    fn empty_coalition_and_duplicates() {
        let p = SchemeParams::new(1, 1, 0, 1, 3, 7).unwrap();
        let mats = mask_matrices(&[], &p).unwrap();
        assert_eq!(mats.ma.shape(), (0, 0));
        assert_eq!(mats.mb.shape(), (0, 0));
        let p2 = SchemeParams::new(1, 1, 2, 1, 3, 7).unwrap();
        assert!(matches!(
            mask_matrices(&[pt(1, 1), pt(1, 1)], &p2),
            Err(Error::DuplicatePoints)
        ));
        assert!(mask_matrices(&[pt(1, 1), pt(2, 1), pt(3, 1)], &p2).is_err());
    }

    #[test]
    fn zero_x_fails() {
        let p = SchemeParams::new(2, 2, 1, 2, 4, 101).unwrap();
        assert!(perfect_privacy_check(&[pt(5, 9)], &p).unwrap().passed());
        match perfect_privacy_check(&[pt(0, 9)], &p).unwrap() {
            PrivacyVerdict::Fail { kind, rank, .. } => {
                assert_eq!(kind, MaskKind::A);
                assert_eq!(rank, 0);
            }
            PrivacyVerdict::Pass => panic!("x = 0 leaks A_1"),
        }
    }

    #[test]
    fn sweep_small_params() {
        let p = SchemeParams::new(2, 2, 1, 2, 4, 101).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let points = crate::scheme::sample_points(&p, &mut rng).unwrap();
            for w in &points {
                assert!(perfect_privacy_check(&[*w], &p).unwrap().passed());
            }
        }
    }

    #[test]
    fn distinct_nonzero_x_gives_full_rank() {
        // every pair of distinct nonzero x over F_7 and F_11, y arbitrary
        for qv in [7u64, 11] {
            let p = SchemeParams::new(1, 2, 2, 2, 4, qv).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(qv);
            for x1 in 1..qv {
                for x2 in 1..qv {
                    if x1 == x2 {
                        continue;
                    }
                    let pts = [pt(x1, rng.gen_range(0..qv)), pt(x2, rng.gen_range(0..qv))];
                    let mats = mask_matrices(&pts, &p).unwrap();
                    assert_eq!(mats.ma.rank(p.q), 2);
                    assert_eq!(mats.mb.rank(p.q), 4);
                }
            }
        }
    }

    #[test]
    fn rank_is_permutation_invariant() {
        let p = SchemeParams::new(2, 3, 3, 2, 10, 101).unwrap();
        let pts = [pt(4, 1), pt(9, 2), pt(4, 7)];
        let mats = mask_matrices(&pts, &p).unwrap();
        let rev: Vec<EvalPoint> = pts.iter().rev().copied().collect();
        let mats_rev = mask_matrices(&rev, &p).unwrap();
        assert_eq!(mats.ma.rank(p.q), mats_rev.ma.rank(p.q));
        assert_eq!(mats.mb.rank(p.q), mats_rev.mb.rank(p.q));
        // repeated x: A-mask rank drops
        assert_eq!(mats.ma.rank(p.q), 2);
    }

    #[test]
    fn mi_zero_with_masks() {
        let p = SchemeParams::new(1, 1, 1, 1, 2, 3).unwrap();
        assert_eq!(exhaustive_mi_check(&p, &[pt(1, 1)], false).unwrap(), 0.0);
    }

    #[test]
    fn mi_without_masks_reveals_everything() {
        let p = SchemeParams::new(1, 1, 1, 1, 2, 3).unwrap();
        let mi = exhaustive_mi_check(&p, &[pt(1, 1)], true).unwrap();
        // the view is (A_1, B_1) itself: log2(9) bits
        assert!((mi - 9f64.log2()).abs() < 1e-12, "{mi}");
    }

    #[test]
    fn mi_positive_for_rank_deficient_coalition() {
        // shared x with m = 1: the y^1 coefficient B_2 carries no mask, and
        // two distinct y values expose it
        let p = SchemeParams::new(1, 2, 2, 1, 3, 5).unwrap();
        let pts = [pt(2, 1), pt(2, 3)];
        match perfect_privacy_check(&pts, &p).unwrap() {
            PrivacyVerdict::Fail { kind, .. } => assert_eq!(kind, MaskKind::A),
            PrivacyVerdict::Pass => panic!("shared x must fail"),
        }
        let mats = mask_matrices(&pts, &p).unwrap();
        assert_eq!(mats.mb.rank(p.q), 1);
        assert!(exhaustive_mi_check(&p, &pts, false).unwrap() > 0.0);
    }

    #[test]
    fn mi_positive_at_zero_x() {
        let p = SchemeParams::new(1, 1, 1, 1, 2, 5).unwrap();
        let mi = exhaustive_mi_check(&p, &[pt(0, 2)], false).unwrap();
        assert!((mi - 25f64.log2()).abs() < 1e-12, "{mi}");
    }

    #[test]
    fn rejects_large_instances() {
        let p = SchemeParams::new(2, 2, 1, 1, 3, 7).unwrap();
        assert!(matches!(
            exhaustive_mi_check(&p, &[pt(1, 1)], false),
            Err(Error::TooLargeToEnumerate(_))
        ));
    }
}
