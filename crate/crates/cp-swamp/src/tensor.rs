//! Dense tensor storage, mode-n matricization, and rank-one reconstruction.
//!
//! A tensor of order `N` with extents `(I_1, ..., I_N)` is stored as a flat
//! array in generalized column-major order: index `i_1` varies fastest, then
//! `i_2`, and so on. With this layout the mode-1 matricization is a plain
//! reshape of the stored values.
//!
//! Modes are numbered `1..=N` throughout, matching the usual multilinear
//! algebra convention ("mode-1 fibers" and so on).

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::FactorSet;

/// Dense real matrix, column-major storage.
pub type Matrix = nalgebra::DMatrix<f64>;

/// Dense order-N tensor over `f64`.
///
/// Immutable after construction; cheap to share across threads by reference.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    dims: Vec<usize>,
    values: Vec<f64>,
}

impl DenseTensor {
    /// Builds a tensor from extents and flat values in storage order
    /// (first index fastest).
    pub fn new(dims: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::argument("tensor must have order >= 1"));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::argument("tensor extents must all be >= 1"));
        }
        let expected: usize = dims.iter().product();
        if values.len() != expected {
            return Err(Error::argument(format!(
                "value count {} does not match extents product {}",
                values.len(),
                expected
            )));
        }
        Ok(DenseTensor { dims, values })
    }

    /// All-zero tensor with the given extents.
    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        let len: usize = dims.iter().product();
        DenseTensor::new(dims, vec![0.0; len])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Tensor order N (number of modes).
    pub fn order(&self) -> usize {
        self.dims.len()
    }

    /// Total number of stored entries.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Flat values in storage order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Entry at a 0-based multi-index.
    ///
    /// Panics if the index length or any component is out of range.
    pub fn get(&self, index: &[usize]) -> f64 {
        self.values[self.linear_index(index)]
    }

    fn linear_index(&self, index: &[usize]) -> usize {
        assert_eq!(index.len(), self.order(), "multi-index order mismatch");
        let mut linear = 0;
        let mut stride = 1;
        for (k, (&i, &d)) in index.iter().zip(&self.dims).enumerate() {
            assert!(i < d, "index {i} out of range for mode {}", k + 1);
            linear += i * stride;
            stride *= d;
        }
        linear
    }

    /// Squared Frobenius norm: the sum of all entries squared.
    pub fn frobenius_norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }
}

fn check_mode(order: usize, mode: usize) -> Result<usize> {
    if mode == 0 || mode > order {
        return Err(Error::argument(format!(
            "mode {mode} out of range for an order-{order} tensor"
        )));
    }
    Ok(mode - 1)
}

/// Column strides of the mode-n unfolding: entry `k != n` holds the stride of
/// index `i_k` in the unfolded column index; entry `n` is unused (zero).
fn unfold_strides(dims: &[usize], n: usize) -> (Vec<usize>, usize) {
    let mut strides = vec![0; dims.len()];
    let mut acc = 1;
    for (k, &d) in dims.iter().enumerate() {
        if k != n {
            strides[k] = acc;
            acc *= d;
        }
    }
    (strides, acc)
}

/// Mode-n matricization: rearranges the tensor into an `I_n x (prod of the
/// other extents)` matrix whose columns are the mode-n fibers. The column
/// holding indices `(i_1, ..., i_N)` (without `i_n`) is
/// `sum_{k != n} i_k * J_k` with `J_k = prod_{m < k, m != n} I_m`, all 0-based.
pub fn matricize(t: &DenseTensor, mode: usize) -> Result<Matrix> {
    let n = check_mode(t.order(), mode)?;
    let rows = t.dims[n];
    let cols = t.len() / rows;

    // Mode 1 shares the storage layout: a single reshape suffices.
    if n == 0 {
        return Ok(Matrix::from_column_slice(rows, cols, &t.values));
    }

    let (strides, _) = unfold_strides(&t.dims, n);
    let mut out = Matrix::zeros(rows, cols);
    let mut index = vec![0usize; t.order()];
    for &v in &t.values {
        let j: usize = index
            .iter()
            .zip(&strides)
            .map(|(&i, &s)| i * s)
            .sum();
        out[(index[n], j)] = v;
        for (i, &d) in index.iter_mut().zip(&t.dims) {
            *i += 1;
            if *i < d {
                break;
            }
            *i = 0;
        }
    }
    Ok(out)
}

/// Inverse of [`matricize`]: rebuilds the tensor with extents `dims` from its
/// mode-n unfolding. Exact inverse on stored values.
pub fn dematricize(m: &Matrix, dims: &[usize], mode: usize) -> Result<DenseTensor> {
    if dims.is_empty() || dims.iter().any(|&d| d == 0) {
        return Err(Error::argument("tensor extents must all be >= 1"));
    }
    let n = check_mode(dims.len(), mode)?;
    let len: usize = dims.iter().product();
    if m.nrows() != dims[n] || m.ncols() != len / dims[n] {
        return Err(Error::argument(format!(
            "matrix shape {}x{} does not match mode-{mode} unfolding of extents {dims:?}",
            m.nrows(),
            m.ncols()
        )));
    }

    if n == 0 {
        return DenseTensor::new(dims.to_vec(), m.as_slice().to_vec());
    }

    let (strides, _) = unfold_strides(dims, n);
    let mut values = vec![0.0; len];
    let mut index = vec![0usize; dims.len()];
    for v in values.iter_mut() {
        let j: usize = index
            .iter()
            .zip(&strides)
            .map(|(&i, &s)| i * s)
            .sum();
        *v = m[(index[n], j)];
        for (i, &d) in index.iter_mut().zip(dims) {
            *i += 1;
            if *i < d {
                break;
            }
            *i = 0;
        }
    }
    DenseTensor::new(dims.to_vec(), values)
}

/// Evaluates the CP model: the sum of R rank-one tensors whose mode-n vectors
/// are the columns of the n-th factor matrix. Entry-wise,
/// `t(i_1, ..., i_N) = sum_r prod_n F_n[i_n, r]`.
pub fn from_rank_one_sum(factors: &FactorSet) -> DenseTensor {
    let dims = factors.row_dims();
    // Mode-1 unfolding of the model is F_1 * K^T with K the Khatri-Rao
    // product of the remaining factors; its storage equals the tensor's.
    let k = factors.khatri_rao_excluding(1);
    let m = factors.factors()[0].clone() * k.transpose();
    DenseTensor {
        dims,
        values: m.as_slice().to_vec(),
    }
}

/// Total entries squared; see [`DenseTensor::frobenius_norm_sq`].
pub fn frobenius_norm_sq(t: &DenseTensor) -> f64 {
    t.frobenius_norm_sq()
}

/// Formats a float with 17 significant digits, enough to round-trip `f64`.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes the tensor text format: `tensor N`, the N extents, then one value
/// per line in storage order.
pub fn write_tensor(t: &DenseTensor, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    let _ = writeln!(out, "tensor {}", t.order());
    let dims: Vec<String> = t.dims.iter().map(|d| d.to_string()).collect();
    let _ = writeln!(out, "{}", dims.join(" "));
    for &v in &t.values {
        let _ = writeln!(out, "{}", fmt_f64(v));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads the tensor text format written by [`write_tensor`].
///
/// Errors carry the path and 1-based line number of the offending line.
pub fn read_tensor(path: impl AsRef<Path>) -> Result<DenseTensor> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "empty file; expected `tensor N` header"))?;
    let order: usize = match header.split_whitespace().collect::<Vec<_>>()[..] {
        ["tensor", n] => n
            .parse()
            .map_err(|_| Error::parse(path, 1, format!("invalid tensor order {n:?}")))?,
        _ => {
            return Err(Error::parse(
                path,
                1,
                format!("expected `tensor N` header, found {header:?}"),
            ))
        }
    };
    if order == 0 {
        return Err(Error::parse(path, 1, "tensor order must be >= 1"));
    }

    let (_, dim_line) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 2, "missing extents line"))?;
    let dims: Vec<usize> = dim_line
        .split_whitespace()
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| Error::parse(path, 2, format!("invalid extent {s:?}")))
        })
        .collect::<Result<_>>()?;
    if dims.len() != order {
        return Err(Error::parse(
            path,
            2,
            format!("expected {order} extents, found {}", dims.len()),
        ));
    }
    if dims.iter().any(|&d| d == 0) {
        return Err(Error::parse(path, 2, "tensor extents must all be >= 1"));
    }

    let expected: usize = dims.iter().product();
    let mut values = Vec::with_capacity(expected);
    for (idx, line) in lines {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let v: f64 = trimmed
            .parse()
            .map_err(|_| Error::parse(path, line_no, format!("invalid value {trimmed:?}")))?;
        if !v.is_finite() {
            return Err(Error::parse(path, line_no, "non-finite value"));
        }
        if values.len() == expected {
            return Err(Error::parse(
                path,
                line_no,
                format!("more than {expected} values"),
            ));
        }
        values.push(v);
    }
    if values.len() != expected {
        return Err(Error::parse(
            path,
            text.lines().count(),
            format!("expected {expected} values, found {}", values.len()),
        ));
    }
    DenseTensor::new(dims, values)
}
