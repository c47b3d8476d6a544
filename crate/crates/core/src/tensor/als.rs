//! Best rank-1 approximation by alternating least squares (higher-order power
//! iteration with unit-norm factors and the scale absorbed into a weight).

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

use super::{outer_product3, Tensor3};
use crate::error::{invalid, Axis, Result};
use crate::matrix::Matrix;
use crate::scalar::{all_finite, norm2, Scalar};

/// Rank-1 factors `weight * x ⊗ y ⊗ z` of a money tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorTriple<T> {
    pub weight: T,
    /// Sector profile.
    pub x: Vec<T>,
    /// Agent profile.
    pub y: Vec<T>,
    /// Time profile.
    pub z: Vec<T>,
}

impl<T: Scalar> FactorTriple<T> {
    /// Validates that the weight is finite and non-negative and that every factor
    /// has unit norm, or that all factors are zero with a zero weight.
    pub fn new(weight: T, x: Vec<T>, y: Vec<T>, z: Vec<T>) -> Result<Self> {
        if !weight.is_finite() || weight < T::zero() {
            return Err(invalid("factor weight must be finite and non-negative"));
        }
        if x.is_empty() || y.is_empty() || z.is_empty() {
            return Err(invalid("factor vectors must be non-empty"));
        }
        if !(all_finite(&x) && all_finite(&y) && all_finite(&z)) {
            return Err(invalid("factor vectors must be finite"));
        }
        let tol = T::epsilon().sqrt();
        let unit = |v: &[T]| (norm2(v) - T::one()).abs() <= tol;
        let zero = |v: &[T]| v.iter().all(|a| a.is_zero());
        let all_zero = zero(&x) && zero(&y) && zero(&z);
        if all_zero {
            if !weight.is_zero() {
                return Err(invalid("all-zero factors require weight 0"));
            }
        } else if !(unit(&x) && unit(&y) && unit(&z)) {
            return Err(invalid("factor vectors must have unit norm"));
        }
        Ok(Self { weight, x, y, z })
    }

    /// Builds normalized factors from arbitrary vectors, absorbing their norms
    /// (and any negative scale) into the weight.
    pub fn from_unnormalized(scale: T, x: &[T], y: &[T], z: &[T]) -> Result<Self> {
        let (nx, ny, nz) = (norm2(x), norm2(y), norm2(z));
        let w = scale * nx * ny * nz;
        if w.is_zero() {
            return Self::zero(x.len(), y.len(), z.len());
        }
        let unit = |v: &[T], n: T| v.iter().map(|&a| a / n).collect::<Vec<_>>();
        let mut x = unit(x, nx);
        if w < T::zero() {
            x.iter_mut().for_each(|a| *a = -*a);
        }
        let mut f = Self::new(w.abs(), x, unit(y, ny), unit(z, nz))?;
        f.normalize_signs();
        Ok(f)
    }

    pub fn zero(n_sectors: usize, n_agents: usize, n_periods: usize) -> Result<Self> {
        Self::new(T::zero(), vec![T::zero(); n_sectors], vec![T::zero(); n_agents], vec![T::zero(); n_periods])
    }

    /// `weight * x ⊗ y ⊗ z`.
    pub fn reconstruct(&self) -> Result<Tensor3<T>> {
        Ok(outer_product3(&self.x, &self.y, &self.z)?.scale(self.weight))
    }

    /// Fixes the sign ambiguity: the first significant entry of `x` and of `y` is
    /// made positive, with `z` absorbing the compensating flips. The represented
    /// tensor is unchanged.
    pub fn normalize_signs(&mut self) {
        let thresh = T::epsilon().sqrt();
        let leading_negative = |v: &[T]| v.iter().find(|a| a.abs() > thresh).is_some_and(|&a| a < T::zero());
        if leading_negative(&self.x) {
            self.x.iter_mut().for_each(|a| *a = -*a);
            self.z.iter_mut().for_each(|a| *a = -*a);
        }
        if leading_negative(&self.y) {
            self.y.iter_mut().for_each(|a| *a = -*a);
            self.z.iter_mut().for_each(|a| *a = -*a);
        }
    }

    /// Frobenius distance between `t` and the represented rank-1 tensor.
    pub fn residual(&self, t: &Tensor3<T>) -> T {
        residual_of(t, self.weight, &self.x, &self.y, &self.z)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlsConfig<T> {
    pub max_iters: usize,
    /// Stop once the residual changes by at most `tol * ‖t‖_F` between sweeps.
    pub tol: T,
    /// Seeds the start vectors of the power iterations that initialize the factors.
    pub seed: u64,
}

impl<T: Scalar> AlsConfig<T> {
    pub fn new(max_iters: usize, tol: T, seed: u64) -> Result<Self> {
        if max_iters == 0 {
            return Err(invalid("max_iters must be >= 1"));
        }
        if !(tol > T::zero()) || !tol.is_finite() {
            return Err(invalid("tol must be positive and finite"));
        }
        Ok(Self { max_iters, tol, seed })
    }
}

impl<T: Scalar> Default for AlsConfig<T> {
    fn default() -> Self {
        Self { max_iters: 200, tol: T::lit(1e-10), seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rank1Fit<T> {
    pub factors: FactorTriple<T>,
    /// `‖t − weight·x⊗y⊗z‖_F` at termination.
    pub residual: T,
    /// Completed sweeps.
    pub iterations: usize,
    /// Residual after each sweep.
    pub residual_history: Vec<T>,
}

/// Best rank-1 approximation of `t` (locally optimal in the Frobenius norm).
///
/// Factors start from the leading left singular vectors of the three mode
/// unfoldings and are then refined by cyclic sector, agent, time updates. Each
/// update is the exact least-squares solution for that factor, so the residual
/// sequence never increases. The zero tensor returns zero factors at once.
pub fn rank1_approx<T: Scalar>(t: &Tensor3<T>, cfg: &AlsConfig<T>) -> Rank1Fit<T> {
    let dims = t.dims();
    let norm_t = t.frobenius_norm();
    if norm_t.is_zero() {
        let factors =
            FactorTriple::zero(dims.n_sectors, dims.n_agents, dims.n_periods).expect("zero factors are well-formed");
        return Rank1Fit { factors, residual: T::zero(), iterations: 0, residual_history: Vec::new() };
    }

    let mut rng = Xoshiro256StarStar::seed_from_u64(cfg.seed);
    let mut x = leading_left_singular_vector(&t.unfold(Axis::Sector), &mut rng);
    let mut y = leading_left_singular_vector(&t.unfold(Axis::Agent), &mut rng);
    let mut z = leading_left_singular_vector(&t.unfold(Axis::Time), &mut rng);
    let mut weight = T::zero();

    let mut history = Vec::new();
    let mut prev: Option<T> = None;
    for _ in 0..cfg.max_iters {
        x = t.contract_except(Axis::Sector, &y, &z);
        if !normalize(&mut x) {
            break;
        }
        y = t.contract_except(Axis::Agent, &x, &z);
        if !normalize(&mut y) {
            break;
        }
        z = t.contract_except(Axis::Time, &x, &y);
        weight = norm2(&z);
        if !normalize(&mut z) {
            break;
        }
        let res = residual_of(t, weight, &x, &y, &z);
        history.push(res);
        if let Some(p) = prev {
            if (p - res).abs() <= cfg.tol * norm_t {
                break;
            }
        }
        prev = Some(res);
    }

    let iterations = history.len();
    let mut factors = match FactorTriple::new(weight, x, y, z) {
        Ok(f) if !weight.is_zero() => f,
        // t is orthogonal to every rank-1 direction reached; the best we found is zero.
        _ => FactorTriple::zero(dims.n_sectors, dims.n_agents, dims.n_periods).expect("zero factors are well-formed"),
    };
    factors.normalize_signs();
    let residual = factors.residual(t);
    Rank1Fit { factors, residual, iterations, residual_history: history }
}

fn normalize<T: Scalar>(v: &mut [T]) -> bool {
    let n = norm2(v);
    if n.is_zero() || !n.is_finite() {
        return false;
    }
    v.iter_mut().for_each(|a| *a = *a / n);
    true
}

fn residual_of<T: Scalar>(t: &Tensor3<T>, w: T, x: &[T], y: &[T], z: &[T]) -> T {
    let mut fibers = t.values().chunks_exact(z.len());
    let mut acc = T::zero();
    for &xi in x {
        for &yj in y {
            let wxy = w * xi * yj;
            let fiber = fibers.next().expect("dims match factor lengths");
            for (&v, &zk) in fiber.iter().zip(z) {
                let e = v - wxy * zk;
                acc = acc + e * e;
            }
        }
    }
    acc.sqrt()
}

/// Leading eigenvector of `a·aᵀ` by power iteration from a seeded start vector.
fn leading_left_singular_vector<T: Scalar>(a: &Matrix<T>, rng: &mut Xoshiro256StarStar) -> Vec<T> {
    let n = a.rows();
    let mut gram = vec![T::zero(); n * n];
    for r in 0..n {
        for c in r..n {
            let dot: T = a.row(r).iter().zip(a.row(c)).map(|(&p, &q)| p * q).sum();
            gram[r * n + c] = dot;
            gram[c * n + r] = dot;
        }
    }

    let mut v: Vec<T> = (0..n)
        .map(|_| {
            let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            T::lit(2.0 * u - 1.0)
        })
        .collect();
    if !normalize(&mut v) {
        v = vec![T::zero(); n];
        v[0] = T::one();
    }

    let tol = T::epsilon() * T::lit(16.0);
    for _ in 0..1000 {
        let mut next: Vec<T> = (0..n).map(|r| (0..n).map(|c| gram[r * n + c] * v[c]).sum()).collect();
        if !normalize(&mut next) {
            // start vector orthogonal to the range: fall back to the heaviest row
            let best =
                (0..n).max_by(|&p, &q| gram[p * n + p].partial_cmp(&gram[q * n + q]).expect("finite")).unwrap_or(0);
            let mut e = vec![T::zero(); n];
            e[best] = T::one();
            return e;
        }
        let delta = norm2(&next.iter().zip(&v).map(|(&p, &q)| p - q).collect::<Vec<_>>());
        v = next;
        if delta <= tol {
            break;
        }
    }
    v
}
