//! Code parameters, the monomial support of the product polynomial
//! `A(x)B(x, y)`, and evaluation of the encoding polynomials.
//!
//! The encoding polynomials are
//!
//! ```text
//! A(x)    = sum_{k<K} A_k x^k + sum_{t<T} R_t x^(K+t)
//! B(x, y) = sum_{l<L} B_l y^l + sum_{t<T} sum_{j<m} S_{t,j} x^(K+t) y^j
//! ```
//!
//! (zero-based indices). Workers receive `A(x_i)` and the formal
//! y-derivatives of `B` of orders `0..m` at `(x_i, y_i)`.

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldOrder};
use crate::matrix::FieldMatrix;

/// Partitioning, privacy and task-cap parameters of the code, independent of
/// worker count and field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodeShape {
    /// Row partitions of `A`.
    pub k: usize,
    /// Column partitions of `B`.
    pub l: usize,
    /// Number of colluding workers tolerated.
    pub t: usize,
    /// Maximum sub-tasks per worker.
    pub m: usize,
}

impl CodeShape {
    pub fn new(k: usize, l: usize, t: usize, m: usize) -> Result<Self> {
        if k == 0 || l == 0 || m == 0 {
            return Err(Error::InvalidParams(format!(
                "K, L and m must be positive (K = {k}, L = {l}, m = {m})"
            )));
        }
        if m > l {
            return Err(Error::InvalidParams(format!(
                "m <= L violated (m = {m}, L = {l})"
            )));
        }
        Ok(Self { k, l, t, m })
    }

    /// Highest x-degree of `A(x)B(x, y)`: `2K + 2T - 2`.
    pub fn max_x_degree(&self) -> usize {
        2 * (self.k + self.t) - 2
    }

    /// Highest y-degree of `A(x)B(x, y)`: `L - 1`.
    pub fn max_y_degree(&self) -> usize {
        self.l - 1
    }

    /// `(K + T) L + m (K + T - 1)`.
    pub fn recovery_threshold(&self) -> usize {
        let a = self.k + self.t;
        a * self.l + self.m * (a - 1)
    }

    /// The closed-form degree bound `d` of the failure probability `d/q`.
    ///
    /// Evaluated verbatim; it is `m K` below [`support_degree_sum`] and can be
    /// negative for degenerate shapes (e.g. `K = L = m = 1, T = 0` gives -1).
    pub fn failure_bound_d(&self) -> Result<i64> {
        let (k, l, t, m) = (
            self.k as i128,
            self.l as i128,
            self.t as i128,
            self.m as i128,
        );
        let a = k + t;
        let twice = m * (3 * a * a + m * a - 8 * k - 6 * t - m + 3) + a * l * (k + l + t - 2);
        if twice.rem_euclid(2) != 0 {
            return Err(Error::NonIntegerBound(twice.unsigned_abs() as u64));
        }
        Ok((twice / 2) as i64)
    }

    pub fn support(&self) -> MonomialSupport {
        build_support(self)
    }
}

/// Full scheme parameters: the code shape plus worker count and field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemeParams {
    pub k: usize,
    pub l: usize,
    pub t: usize,
    pub m: usize,
    pub n: usize,
    pub q: FieldOrder,
}

impl SchemeParams {
    pub fn new(k: usize, l: usize, t: usize, m: usize, n: usize, q: u64) -> Result<Self> {
        let shape = CodeShape::new(k, l, t, m)?;
        let field = FieldOrder::new(q)?;
        Self::from_shape(shape, n, field)
    }

    pub fn from_shape(shape: CodeShape, n: usize, q: FieldOrder) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("N must be positive".into()));
        }
        let qv = q.q();
        if qv <= shape.max_x_degree() as u64 {
            return Err(Error::InvalidParams(format!(
                "q > 2K + 2T - 2 violated (q = {qv}, 2K + 2T - 2 = {})",
                shape.max_x_degree()
            )));
        }
        if qv <= shape.max_y_degree() as u64 {
            return Err(Error::InvalidParams(format!(
                "q > L - 1 violated (q = {qv}, L - 1 = {})",
                shape.max_y_degree()
            )));
        }
        if qv < n as u64 {
            return Err(Error::InvalidParams(format!(
                "q >= N violated (q = {qv}, N = {n})"
            )));
        }
        Ok(Self {
            k: shape.k,
            l: shape.l,
            t: shape.t,
            m: shape.m,
            n,
            q,
        })
    }

    pub fn shape(&self) -> CodeShape {
        CodeShape {
            k: self.k,
            l: self.l,
            t: self.t,
            m: self.m,
        }
    }

    pub fn recovery_threshold(&self) -> usize {
        self.shape().recovery_threshold()
    }
}

/// Evaluation point `(x_i, y_i)` of one worker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EvalPoint {
    pub x: FieldElement,
    pub y: FieldElement,
}

impl EvalPoint {
    pub fn new(x: FieldElement, y: FieldElement) -> Self {
        Self { x, y }
    }
}

/// Exponent pairs `(dx, dy)` of the monomials of `A(x)B(x, y)`, sorted
/// lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialSupport {
    entries: Vec<(usize, usize)>,
}

impl MonomialSupport {
    pub fn entries(&self) -> &[(usize, usize)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Column of monomial `x^dx y^dy`, if it is in the support.
    pub fn position(&self, dx: usize, dy: usize) -> Option<usize> {
        self.entries.binary_search(&(dx, dy)).ok()
    }
}

/// The support is the rectangle `[0, K+T-1] x [0, L-1]` plus the strip
/// `[K+T, 2K+2T-2] x [0, m-1]`.
pub fn build_support(shape: &CodeShape) -> MonomialSupport {
    let a = shape.k + shape.t;
    let mut entries = Vec::with_capacity(shape.recovery_threshold());
    for dx in 0..a {
        entries.extend((0..shape.l).map(|dy| (dx, dy)));
    }
    for dx in a..=shape.max_x_degree() {
        entries.extend((0..shape.m).map(|dy| (dx, dy)));
    }
    MonomialSupport { entries }
}

fn powers(base: FieldElement, max: usize, q: FieldOrder) -> Vec<FieldElement> {
    let mut out = Vec::with_capacity(max + 1);
    let mut acc = 1 % q.q();
    for _ in 0..=max {
        out.push(acc);
        acc = q.mul(acc, base);
    }
    out
}

/// Horner evaluation of `sum_i coeffs[i] * z^i`.
fn horner(coeffs: &[FieldMatrix], z: FieldElement, q: FieldOrder) -> Result<FieldMatrix> {
    let (last, rest) = coeffs
        .split_last()
        .ok_or_else(|| Error::DimensionMismatch("no coefficients".into()))?;
    let mut acc = last.clone();
    for c in rest.iter().rev() {
        acc = acc.scale(z, q);
        acc.add_scaled(c, 1, q)?;
    }
    Ok(acc)
}

fn check_same_shape(mats: &[&FieldMatrix], what: &str) -> Result<()> {
    if let Some(first) = mats.first() {
        if let Some(bad) = mats.iter().find(|m| m.shape() != first.shape()) {
            return Err(Error::DimensionMismatch(format!(
                "{what}: {:?} differs from {:?}",
                bad.shape(),
                first.shape()
            )));
        }
    }
    Ok(())
}

/// `A(x)`: the `K` partitions followed by the `T` masks as coefficients of
/// `x^0 .. x^(K+T-1)`.
pub fn eval_a(
    partitions: &[FieldMatrix],
    masks: &[FieldMatrix],
    x: FieldElement,
    q: FieldOrder,
) -> Result<FieldMatrix> {
    let coeffs: Vec<FieldMatrix> = partitions.iter().chain(masks).cloned().collect();
    check_same_shape(&coeffs.iter().collect::<Vec<_>>(), "A partitions and masks")?;
    horner(&coeffs, x, q)
}

/// The `order`-th formal y-derivative of `B(x, y)` at `point`.
///
/// `masks[t][j]` is the coefficient matrix of `x^(K+t) y^j`; the grid must be
/// `T x m`.
pub fn eval_db(
    partitions: &[FieldMatrix],
    masks: &[Vec<FieldMatrix>],
    point: EvalPoint,
    order: usize,
    shape: &CodeShape,
    q: FieldOrder,
) -> Result<FieldMatrix> {
    if order >= shape.m {
        return Err(Error::InvalidOrder { order, m: shape.m });
    }
    if partitions.len() != shape.l {
        return Err(Error::DimensionMismatch(format!(
            "{} B partitions, expected L = {}",
            partitions.len(),
            shape.l
        )));
    }
    if masks.len() != shape.t || masks.iter().any(|row| row.len() != shape.m) {
        return Err(Error::DimensionMismatch(format!(
            "mask grid must be T x m = {} x {}",
            shape.t, shape.m
        )));
    }
    let all: Vec<&FieldMatrix> = partitions.iter().chain(masks.iter().flatten()).collect();
    check_same_shape(&all, "B partitions and masks")?;

    // y-coefficients of B at fixed x: C_j = B_j + x^K sum_t S_{t,j} x^t
    let x_k = q.pow(point.x, shape.k as u64);
    let mut y_coeffs = partitions.to_vec();
    if shape.t > 0 {
        for (j, coeff) in y_coeffs.iter_mut().enumerate().take(shape.m) {
            let column: Vec<FieldMatrix> = masks.iter().map(|row| row[j].clone()).collect();
            let mask_part = horner(&column, point.x, q)?;
            coeff.add_scaled(&mask_part, x_k, q)?;
        }
    }
    // differentiate: d^o/dy^o y^j = fall(j, o) y^(j-o)
    let derived: Vec<FieldMatrix> = y_coeffs
        .iter()
        .enumerate()
        .skip(order)
        .map(|(j, c)| c.scale(q.falling(j as u64, order as u64), q))
        .collect();
    horner(&derived, point.y, q)
}

/// Row of the interpolation matrix for one response: each support monomial
/// differentiated `order` times in y and evaluated at `point`.
pub fn derivative_row(
    support: &MonomialSupport,
    point: EvalPoint,
    order: usize,
    q: FieldOrder,
) -> Vec<FieldElement> {
    let max_dx = support.entries.iter().map(|e| e.0).max().unwrap_or(0);
    let max_dy = support.entries.iter().map(|e| e.1).max().unwrap_or(0);
    let xp = powers(point.x, max_dx, q);
    let yp = powers(point.y, max_dy, q);
    support
        .entries
        .iter()
        .map(|&(dx, dy)| {
            if dy < order {
                0
            } else {
                let coeff = q.falling(dy as u64, order as u64);
                q.mul(q.mul(coeff, xp[dx]), yp[dy - order])
            }
        })
        .collect()
}

/// Sum of total degrees over the rectangle `[0, a] x [0, b]`.
pub fn xi(a: u64, b: u64) -> u64 {
    a * (a + 1) / 2 * (b + 1) + b * (b + 1) / 2 * (a + 1)
}

/// Sum of `dx + dy` over the support, by direct enumeration.
pub fn support_degree_sum(support: &MonomialSupport) -> u64 {
    support
        .entries
        .iter()
        .map(|&(dx, dy)| (dx + dy) as u64)
        .sum()
}
