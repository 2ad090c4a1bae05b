use super::ResponseSet;
use crate::error::{Error, Result};
use crate::field::FieldOrder;
use crate::matrix::{solve_linear, FieldMatrix};
use crate::poly::{derivative_row, MonomialSupport, SchemeParams};

/// The recovered product `AB` as a `K x L` grid of blocks `A_k B_l`, plus the
/// assembled `r x c` matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedProduct {
    pub blocks: Vec<Vec<FieldMatrix>>,
    pub assembled: FieldMatrix,
}

/// One row per response, in `(worker_id, order)` order.
pub fn build_interpolation_matrix(
    responses: &ResponseSet,
    support: &MonomialSupport,
    q: FieldOrder,
) -> Result<FieldMatrix> {
    let ordered = responses.ordered()?;
    let rows: Vec<Vec<u64>> = ordered
        .iter()
        .map(|r| derivative_row(support, r.point, r.order, q))
        .collect();
    if rows.is_empty() {
        return Ok(FieldMatrix::zeros(0, support.len()));
    }
    FieldMatrix::from_rows(&rows, q)
}

/// Interpolates `A(x)B(x, y)` from the first `R_th` responses in
/// `(worker_id, order)` order and reads off the blocks `A_k B_l`, which are
/// the coefficients of `x^k y^l` for `k < K`, `l < L`.
pub fn decode(responses: &ResponseSet, p: &SchemeParams) -> Result<DecodedProduct> {
    let shape = p.shape();
    let need = shape.recovery_threshold();
    if responses.len() < need {
        return Err(Error::NotEnoughResponses {
            got: responses.len(),
            need,
        });
    }
    let ordered = responses.ordered()?;
    if let Some(r) = ordered.iter().find(|r| r.order >= p.m) {
        return Err(Error::InvalidOrder {
            order: r.order,
            m: p.m,
        });
    }
    let chosen = &ordered[..need];
    let (bh, bw) = chosen[0].product.shape();
    if chosen.iter().any(|r| r.product.shape() != (bh, bw)) {
        return Err(Error::DimensionMismatch(
            "sub-products differ in shape".into(),
        ));
    }

    let support = shape.support();
    let subset = ResponseSet::new(chosen.iter().map(|&r| r.clone()).collect());
    let m = build_interpolation_matrix(&subset, &support, p.q)?;
    let mut rhs = FieldMatrix::zeros(need, bh * bw);
    for (i, r) in chosen.iter().enumerate() {
        for (j, &v) in r.product.as_slice().iter().enumerate() {
            rhs.set(i, j, v);
        }
    }
    let coeffs = solve_linear(&m, &rhs, p.q)?.ok_or(Error::DecodeSingular)?;

    let blocks: Vec<Vec<FieldMatrix>> = (0..p.k)
        .map(|k| {
            (0..p.l)
                .map(|l| {
                    let col = support.position(k, l).expect("x^k y^l is in the support");
                    FieldMatrix::from_vec(bh, bw, coeffs.row(col).to_vec(), p.q)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let assembled = FieldMatrix::from_blocks(&blocks)?;
    Ok(DecodedProduct { blocks, assembled })
}
