//! Amplifier model of economic momentum.
//!
//! Foundational productivity over an input-side resistance drives momentum;
//! advanced-sector productivity over an output-side resistance draws it down,
//! and the difference is scaled by the amplification factor β. All five
//! matrices share one sector x agent grid; the time index is the simulation
//! step.

use crate::error::{invalid, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::tensor::Tensor3;

/// Scalar form of the amplifier: `β·(p1/r_in − (p2+p3)/r_out)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplifierParams<T> {
    pub beta: T,
    pub p1: T,
    pub p2: T,
    pub p3: T,
    pub r_in: T,
    pub r_out: T,
}

impl<T: Scalar> AmplifierParams<T> {
    pub fn new(beta: T, p1: T, p2: T, p3: T, r_in: T, r_out: T) -> Result<Self> {
        if [beta, p1, p2, p3, r_in, r_out].iter().any(|v| !v.is_finite()) {
            return Err(invalid("amplifier parameters must be finite"));
        }
        if !(r_in > T::zero() && r_out > T::zero()) {
            return Err(invalid("resistances must be positive"));
        }
        if p1 < T::zero() || p2 < T::zero() || p3 < T::zero() {
            return Err(invalid("productivity levels must be non-negative"));
        }
        Ok(Self { beta, p1, p2, p3, r_in, r_out })
    }
}

pub fn gdp_amplifier<T: Scalar>(p: &AmplifierParams<T>) -> T {
    p.beta * (p.p1 / p.r_in - (p.p2 + p.p3) / p.r_out)
}

/// One step's productivity layers and resistances.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumInputs<T> {
    pub(crate) m1: Matrix<T>,
    pub(crate) m2: Matrix<T>,
    pub(crate) m3: Matrix<T>,
    pub(crate) r1: Matrix<T>,
    pub(crate) r2: Matrix<T>,
    pub(crate) beta: T,
}

impl<T: Scalar> MomentumInputs<T> {
    pub fn new(m1: Matrix<T>, m2: Matrix<T>, m3: Matrix<T>, r1: Matrix<T>, r2: Matrix<T>, beta: T) -> Result<Self> {
        for (name, m) in [("m2", &m2), ("m3", &m3), ("r1", &r1), ("r2", &r2)] {
            m1.ensure_same_shape(m).map_err(|e| invalid(format!("{name}: {e}")))?;
        }
        if !beta.is_finite() {
            return Err(invalid("beta must be finite"));
        }
        for (name, r) in [("r1", &r1), ("r2", &r2)] {
            if let Some(v) = r.as_slice().iter().find(|&&v| !(v > T::zero())) {
                return Err(invalid(format!("{name} entries must be positive, found {v}")));
            }
        }
        Ok(Self { m1, m2, m3, r1, r2, beta })
    }

    /// Uniform inputs on an `rows x cols` grid.
    pub fn uniform(rows: usize, cols: usize, m: [T; 3], r: [T; 2], beta: T) -> Result<Self> {
        let f = |v| Matrix::filled(rows, cols, v);
        Self::new(f(m[0])?, f(m[1])?, f(m[2])?, f(r[0])?, f(r[1])?, beta)
    }

    pub fn m1(&self) -> &Matrix<T> {
        &self.m1
    }
    pub fn m2(&self) -> &Matrix<T> {
        &self.m2
    }
    pub fn m3(&self) -> &Matrix<T> {
        &self.m3
    }
    pub fn r1(&self) -> &Matrix<T> {
        &self.r1
    }
    pub fn r2(&self) -> &Matrix<T> {
        &self.r2
    }
    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn shape(&self) -> (usize, usize) {
        self.m1.shape()
    }

    pub fn with_beta(&self, beta: T) -> Result<Self> {
        Self::new(self.m1.clone(), self.m2.clone(), self.m3.clone(), self.r1.clone(), self.r2.clone(), beta)
    }

    pub fn with_m1(&self, m1: Matrix<T>) -> Result<Self> {
        Self::new(m1, self.m2.clone(), self.m3.clone(), self.r1.clone(), self.r2.clone(), self.beta)
    }

    pub fn with_resistances(&self, r1: Matrix<T>, r2: Matrix<T>) -> Result<Self> {
        Self::new(self.m1.clone(), self.m2.clone(), self.m3.clone(), r1, r2, self.beta)
    }
}

/// Momentum on the sector x agent grid (currency/period per unit resistance).
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumMatrix<T>(pub Matrix<T>);

impl<T: Scalar> MomentumMatrix<T> {
    pub fn matrix(&self) -> &Matrix<T> {
        &self.0
    }

    pub fn total(&self) -> T {
        self.0.sum()
    }
}

/// `g[i,j] = β·(m1[i,j]/r1[i,j] − (m2[i,j]+m3[i,j])/r2[i,j])`.
pub fn momentum_slice<T: Scalar>(inp: &MomentumInputs<T>) -> MomentumMatrix<T> {
    let (rows, cols) = inp.shape();
    let data = (0..rows * cols)
        .map(|n| {
            let at = |m: &Matrix<T>| m.as_slice()[n];
            inp.beta * (at(&inp.m1) / at(&inp.r1) - (at(&inp.m2) + at(&inp.m3)) / at(&inp.r2))
        })
        .collect();
    MomentumMatrix(Matrix::from_parts_unchecked(rows, cols, data))
}

/// Stacks per-step momentum slices along the time axis.
pub fn momentum_tensor<T: Scalar>(per_step: &[MomentumInputs<T>]) -> Result<Tensor3<T>> {
    let first = per_step.first().ok_or_else(|| invalid("momentum_tensor needs at least one step"))?;
    if let Some(bad) = per_step.iter().position(|s| s.shape() != first.shape()) {
        return Err(invalid(format!("step {bad} has shape {:?}, expected {:?}", per_step[bad].shape(), first.shape())));
    }
    let slices: Vec<_> = per_step.iter().map(|s| momentum_slice(s).0).collect();
    Tensor3::from_time_slices(&slices)
}

/// Time-averaged flow: `g[i,j] = (Σ_k t[i,j,k]) / n_periods`.
pub fn momentum_matrix_from_flows<T: Scalar>(t: &Tensor3<T>) -> MomentumMatrix<T> {
    let n = T::from_usize(t.dims().n_periods).expect("period count representable");
    MomentumMatrix(t.contract_time().map(|v| v / n))
}

/// Arithmetic mean over every entry of `r1` and `r2`.
pub fn aggregate_resistance<T: Scalar>(inp: &MomentumInputs<T>) -> T {
    let count = T::from_usize(inp.r1.as_slice().len() + inp.r2.as_slice().len()).expect("count representable");
    (inp.r1.sum() + inp.r2.sum()) / count
}
