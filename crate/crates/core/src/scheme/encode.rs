use std::collections::HashSet;

use rand::Rng;

use super::WorkerShare;
use crate::error::{Error, Result};
use crate::matrix::FieldMatrix;
use crate::poly::{eval_a, eval_db, EvalPoint, SchemeParams};

/// Splits `A` into `K` row blocks and `B` into `L` column blocks.
pub fn partition(
    a: &FieldMatrix,
    b: &FieldMatrix,
    p: &SchemeParams,
) -> Result<(Vec<FieldMatrix>, Vec<FieldMatrix>)> {
    if a.cols() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "A is {:?} but B is {:?}",
            a.shape(),
            b.shape()
        )));
    }
    if !a.rows().is_multiple_of(p.k) {
        return Err(Error::IndivisibleDimensions {
            what: "r",
            dim: a.rows(),
            parts: p.k,
        });
    }
    if !b.cols().is_multiple_of(p.l) {
        return Err(Error::IndivisibleDimensions {
            what: "c",
            dim: b.cols(),
            parts: p.l,
        });
    }
    let h = a.rows() / p.k;
    let w = b.cols() / p.l;
    let a_parts = (0..p.k).map(|i| a.row_block(i * h, h)).collect();
    let b_parts = (0..p.l).map(|j| b.col_block(j * w, w)).collect();
    Ok((a_parts, b_parts))
}

/// Draws `N` evaluation points. The `x_i` are pairwise distinct, and nonzero
/// when `T >= 1` (at `x = 0` the A-share is the bare partition `A_1`). The
/// `y_i` are uniform over the field.
pub fn sample_points<R: Rng + ?Sized>(p: &SchemeParams, rng: &mut R) -> Result<Vec<EvalPoint>> {
    let q = p.q.q();
    let lowest = u64::from(p.t > 0);
    let pool = q - lowest;
    if pool < p.n as u64 {
        return Err(Error::FieldTooSmall { q, n: p.n });
    }
    let mut seen = HashSet::with_capacity(p.n);
    let mut points = Vec::with_capacity(p.n);
    while points.len() < p.n {
        let x = rng.gen_range(lowest..q);
        if seen.insert(x) {
            points.push(EvalPoint::new(x, rng.gen_range(0..q)));
        }
    }
    Ok(points)
}

/// Mask matrices `R_1..R_T` (for `A`) and the `T x m` grid `S` (for `B`).
/// Kept only by the master; never part of a [`WorkerShare`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Masks {
    pub r: Vec<FieldMatrix>,
    pub s: Vec<Vec<FieldMatrix>>,
}

impl Masks {
    pub fn random<R: Rng + ?Sized>(
        p: &SchemeParams,
        a_block: (usize, usize),
        b_block: (usize, usize),
        rng: &mut R,
    ) -> Self {
        let r = (0..p.t)
            .map(|_| FieldMatrix::random(a_block.0, a_block.1, p.q, rng))
            .collect();
        let s = (0..p.t)
            .map(|_| {
                (0..p.m)
                    .map(|_| FieldMatrix::random(b_block.0, b_block.1, p.q, rng))
                    .collect()
            })
            .collect();
        Self { r, s }
    }

    pub fn zero(p: &SchemeParams, a_block: (usize, usize), b_block: (usize, usize)) -> Self {
        Self {
            r: vec![FieldMatrix::zeros(a_block.0, a_block.1); p.t],
            s: vec![vec![FieldMatrix::zeros(b_block.0, b_block.1); p.m]; p.t],
        }
    }
}

#[derive(Debug, Clone)]
pub struct Encoding {
    pub shares: Vec<WorkerShare>,
    pub masks: Masks,
}

/// Partitions `A` and `B`, draws points and masks, and builds every worker's
/// share.
pub fn encode<R: Rng + ?Sized>(
    a: &FieldMatrix,
    b: &FieldMatrix,
    p: &SchemeParams,
    rng: &mut R,
) -> Result<Encoding> {
    let (a_parts, b_parts) = partition(a, b, p)?;
    let points = sample_points(p, rng)?;
    let masks = Masks::random(p, a_parts[0].shape(), b_parts[0].shape(), rng);
    let shares = encode_with(&a_parts, &b_parts, &masks, &points, p)?;
    Ok(Encoding { shares, masks })
}

/// Deterministic core of [`encode`]: evaluates the encoding polynomials at
/// the given points with the given masks.
pub fn encode_with(
    a_parts: &[FieldMatrix],
    b_parts: &[FieldMatrix],
    masks: &Masks,
    points: &[EvalPoint],
    p: &SchemeParams,
) -> Result<Vec<WorkerShare>> {
    if a_parts.len() != p.k || masks.r.len() != p.t {
        return Err(Error::DimensionMismatch(format!(
            "expected {} A partitions and {} masks",
            p.k, p.t
        )));
    }
    let shape = p.shape();
    points
        .iter()
        .enumerate()
        .map(|(i, &point)| {
            let share_a = eval_a(a_parts, &masks.r, point.x, p.q)?;
            let shares_b = (0..p.m)
                .map(|order| eval_db(b_parts, &masks.s, point, order, &shape, p.q))
                .collect::<Result<Vec<_>>>()?;
            Ok(WorkerShare {
                worker_id: i + 1,
                point,
                share_a,
                shares_b,
            })
        })
        .collect()
}
