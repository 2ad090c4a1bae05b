//! The bivariate Hermitian polynomial code: encoding, ordered worker
//! computation and interpolation-based decoding.

mod costs;
mod decode;
mod encode;
pub mod wire;

pub use costs::{max_m_for_budget, upload_cost_bits};
pub use decode::{build_interpolation_matrix, decode, DecodedProduct};
pub use encode::{encode, encode_with, partition, sample_points, Encoding, Masks};

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::FieldOrder;
use crate::matrix::{mat_mul, FieldMatrix};
use crate::poly::EvalPoint;

/// Everything the master uploads to one worker: one coded partition of `A`
/// and `m` derivative evaluations of `B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkerShare {
    /// 1-based.
    pub worker_id: usize,
    pub point: EvalPoint,
    pub share_a: FieldMatrix,
    pub shares_b: Vec<FieldMatrix>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialResult {
    pub worker_id: usize,
    /// Derivative order of the B share used, `0..m`.
    pub order: usize,
    pub point: EvalPoint,
    pub product: FieldMatrix,
}

/// The `order`-th sub-task of a worker: `A(x_i) * d^order B(x_i, y_i)`.
/// Drivers must request orders in increasing sequence per worker.
pub fn worker_compute(share: &WorkerShare, order: usize, q: FieldOrder) -> Result<PartialResult> {
    let b = share.shares_b.get(order).ok_or(Error::InvalidOrder {
        order,
        m: share.shares_b.len(),
    })?;
    Ok(PartialResult {
        worker_id: share.worker_id,
        order,
        point: share.point,
        product: mat_mul(&share.share_a, b, q)?,
    })
}

/// Results collected by the master.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResponseSet {
    pub results: Vec<PartialResult>,
}

impl ResponseSet {
    pub fn new(results: Vec<PartialResult>) -> Self {
        Self { results }
    }

    pub fn len(&self) -> usize {
        self.results.len()
    }

    pub fn is_empty(&self) -> bool {
        self.results.is_empty()
    }

    /// Results sorted by `(worker_id, order)`, after checking that every
    /// worker's orders form a prefix `0, 1, ..` without repeats and that a
    /// worker always reports the same evaluation point.
    pub fn ordered(&self) -> Result<Vec<&PartialResult>> {
        let mut sorted: Vec<&PartialResult> = self.results.iter().collect();
        sorted.sort_by_key(|r| (r.worker_id, r.order));
        let mut expected = 0;
        for (i, r) in sorted.iter().enumerate() {
            let same_worker = i > 0 && sorted[i - 1].worker_id == r.worker_id;
            if !same_worker {
                expected = 0;
            } else if sorted[i - 1].point != r.point {
                return Err(Error::InvalidParams(format!(
                    "worker {} reported two different evaluation points",
                    r.worker_id
                )));
            }
            if same_worker && sorted[i - 1].order == r.order {
                return Err(Error::DuplicateResult {
                    worker: r.worker_id,
                    order: r.order,
                });
            }
            if r.order != expected {
                return Err(Error::OrderViolation {
                    worker: r.worker_id,
                    order: r.order,
                });
            }
            expected += 1;
        }
        Ok(sorted)
    }
}

/// Picks `count` results at random such that every worker contributes a
/// prefix `0..j` of its orders.
pub fn sample_prefix_subset<R: Rng + ?Sized>(
    responses: &ResponseSet,
    count: usize,
    rng: &mut R,
) -> Result<ResponseSet> {
    let ordered = responses.ordered()?;
    if ordered.len() < count {
        return Err(Error::NotEnoughResponses {
            got: ordered.len(),
            need: count,
        });
    }
    let mut by_worker: BTreeMap<usize, Vec<&PartialResult>> = BTreeMap::new();
    for r in ordered {
        by_worker.entry(r.worker_id).or_default().push(r);
    }
    let mut queues: Vec<(Vec<&PartialResult>, usize)> =
        by_worker.into_values().map(|rs| (rs, 0)).collect();
    let mut picked = Vec::with_capacity(count);
    while picked.len() < count {
        let open: Vec<usize> = (0..queues.len())
            .filter(|&i| queues[i].1 < queues[i].0.len())
            .collect();
        let (rs, taken) = &mut queues[open[rng.gen_range(0..open.len())]];
        picked.push(rs[*taken].clone());
        *taken += 1;
    }
    Ok(ResponseSet::new(picked))
}
