//! Dense third-order tensors over (sector, agent, time) and their rank-1 analysis.
//!
//! Storage is row-major in the fixed axis order sector, agent, time, so the
//! time index varies fastest: `values[(i * n_agents + j) * n_periods + k]`.

mod als;

pub use als::{rank1_approx, AlsConfig, FactorTriple, Rank1Fit};

use crate::error::{invalid, Axis, Result};
use crate::matrix::Matrix;
use crate::scalar::{all_finite, norm2, Scalar};

/// Axis lengths of a [`Tensor3`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub n_sectors: usize,
    pub n_agents: usize,
    pub n_periods: usize,
}

impl Dims {
    pub fn new(n_sectors: usize, n_agents: usize, n_periods: usize) -> Self {
        Self { n_sectors, n_agents, n_periods }
    }

    pub fn len(&self) -> usize {
        self.n_sectors * self.n_agents * self.n_periods
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn axis_len(&self, axis: Axis) -> usize {
        match axis {
            Axis::Sector => self.n_sectors,
            Axis::Agent => self.n_agents,
            Axis::Time => self.n_periods,
        }
    }

    pub fn as_array(&self) -> [usize; 3] {
        [self.n_sectors, self.n_agents, self.n_periods]
    }
}

/// The money tensor: currency units per (sector, agent, period) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3<T> {
    dims: Dims,
    values: Vec<T>,
}

impl<T: Scalar> Tensor3<T> {
    pub fn new(dims: Dims, values: Vec<T>) -> Result<Self> {
        if dims.n_sectors == 0 || dims.n_agents == 0 || dims.n_periods == 0 {
            return Err(invalid(format!("tensor dimensions must be >= 1, got {:?}", dims.as_array())));
        }
        if values.len() != dims.len() {
            return Err(invalid(format!(
                "tensor {:?} needs {} values, got {}",
                dims.as_array(),
                dims.len(),
                values.len()
            )));
        }
        if !all_finite(&values) {
            return Err(invalid("tensor values must be finite"));
        }
        Ok(Self { dims, values })
    }

    pub fn zeros(dims: Dims) -> Result<Self> {
        Self::new(dims, vec![T::zero(); dims.len()])
    }

    pub fn from_fn(dims: Dims, mut f: impl FnMut(usize, usize, usize) -> T) -> Result<Self> {
        let mut values = Vec::with_capacity(dims.len());
        for i in 0..dims.n_sectors {
            for j in 0..dims.n_agents {
                for k in 0..dims.n_periods {
                    values.push(f(i, j, k));
                }
            }
        }
        Self::new(dims, values)
    }

    /// Stacks equally shaped sector x agent matrices along the time axis.
    pub fn from_time_slices(slices: &[Matrix<T>]) -> Result<Self> {
        let first = slices.first().ok_or_else(|| invalid("at least one time slice is required"))?;
        for s in slices {
            first.ensure_same_shape(s)?;
        }
        let dims = Dims::new(first.rows(), first.cols(), slices.len());
        Self::from_fn(dims, |i, j, k| slices[k].get(i, j))
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    #[inline]
    pub fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims.n_agents + j) * self.dims.n_periods + k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> T {
        assert!(
            i < self.dims.n_sectors && j < self.dims.n_agents && k < self.dims.n_periods,
            "tensor index out of bounds"
        );
        self.values[self.offset(i, j, k)]
    }

    /// Adds `amount` to one cell. The amount must be finite.
    pub fn add_at(&mut self, i: usize, j: usize, k: usize, amount: T) -> Result<()> {
        if !amount.is_finite() {
            return Err(invalid("non-finite increment"));
        }
        if i >= self.dims.n_sectors || j >= self.dims.n_agents || k >= self.dims.n_periods {
            return Err(invalid(format!("cell ({i}, {j}, {k}) out of bounds")));
        }
        let o = self.offset(i, j, k);
        self.values[o] = self.values[o] + amount;
        Ok(())
    }

    pub fn sum(&self) -> T {
        self.values.iter().copied().sum()
    }

    pub fn scale(&self, c: T) -> Self {
        Self { dims: self.dims, values: self.values.iter().map(|&v| v * c).collect() }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        if self.dims != other.dims {
            return Err(invalid(format!("shape mismatch: {:?} vs {:?}", self.dims.as_array(), other.dims.as_array())));
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { dims: self.dims, values })
    }

    pub fn frobenius_norm(&self) -> T {
        norm2(&self.values)
    }

    /// The sector x agent matrix at period `k`.
    pub fn time_slice(&self, k: usize) -> Matrix<T> {
        assert!(k < self.dims.n_periods, "period index out of bounds");
        let mut data = Vec::with_capacity(self.dims.n_sectors * self.dims.n_agents);
        for i in 0..self.dims.n_sectors {
            for j in 0..self.dims.n_agents {
                data.push(self.values[self.offset(i, j, k)]);
            }
        }
        Matrix::from_parts_unchecked(self.dims.n_sectors, self.dims.n_agents, data)
    }

    /// Mode-n unfolding. Rows follow `mode`; columns enumerate the two remaining
    /// axes in canonical (sector, agent, time) order with the later axis varying
    /// fastest. For the agent mode, column `i * n_periods + k` holds `t[i, j, k]`.
    pub fn unfold(&self, mode: Axis) -> Matrix<T> {
        let Dims { n_sectors, n_agents, n_periods } = self.dims;
        let rows = self.dims.axis_len(mode);
        let cols = self.dims.len() / rows;
        let mut data = vec![T::zero(); rows * cols];
        for i in 0..n_sectors {
            for j in 0..n_agents {
                for k in 0..n_periods {
                    let (r, c) = match mode {
                        Axis::Sector => (i, j * n_periods + k),
                        Axis::Agent => (j, i * n_periods + k),
                        Axis::Time => (k, i * n_agents + j),
                    };
                    data[r * cols + c] = self.values[self.offset(i, j, k)];
                }
            }
        }
        Matrix::from_parts_unchecked(rows, cols, data)
    }

    /// Sums over the time axis: `out[i, j] = sum_k t[i, j, k]`.
    pub fn contract_time(&self) -> Matrix<T> {
        let Dims { n_sectors, n_agents, n_periods } = self.dims;
        let data = self.values.chunks(n_periods).map(|c| c.iter().copied().sum()).collect();
        Matrix::from_parts_unchecked(n_sectors, n_agents, data)
    }

    /// Contracts the tensor with vectors on the two axes other than `keep`.
    pub(crate) fn contract_except(&self, keep: Axis, u: &[T], v: &[T]) -> Vec<T> {
        let Dims { n_sectors, n_agents, n_periods } = self.dims;
        let mut out = vec![T::zero(); self.dims.axis_len(keep)];
        for i in 0..n_sectors {
            for j in 0..n_agents {
                let base = (i * n_agents + j) * n_periods;
                for k in 0..n_periods {
                    let t = self.values[base + k];
                    match keep {
                        Axis::Sector => out[i] = out[i] + t * u[j] * v[k],
                        Axis::Agent => out[j] = out[j] + t * u[i] * v[k],
                        Axis::Time => out[k] = out[k] + t * u[i] * v[j],
                    }
                }
            }
        }
        out
    }
}

/// `result[i, j, k] = x[i] * y[j] * z[k]`.
pub fn outer_product3<T: Scalar>(x: &[T], y: &[T], z: &[T]) -> Result<Tensor3<T>> {
    if x.is_empty() || y.is_empty() || z.is_empty() {
        return Err(invalid("outer product factors must be non-empty"));
    }
    if !(all_finite(x) && all_finite(y) && all_finite(z)) {
        return Err(invalid("outer product factors must be finite"));
    }
    Tensor3::from_fn(Dims::new(x.len(), y.len(), z.len()), |i, j, k| x[i] * y[j] * z[k])
}
