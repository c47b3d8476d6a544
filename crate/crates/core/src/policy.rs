//! Intervention operators: stimulus on foundational productivity, regulatory
//! reduction of resistance, and additive feedback on momentum. Discrete agent
//! actions (spending, tax cuts, subsidies) are routed onto the first two.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{Float, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::ledger::Taxonomy;
use crate::matrix::Matrix;
use crate::momentum::MomentumMatrix;
use crate::scalar::Scalar;
use crate::tensor::Tensor3;

/// Lowest resistance any regulatory adjustment can produce.
pub const RESISTANCE_FLOOR: f64 = 1e-6;

/// Tax-cut conversion from currency units to resistance reduction.
pub const DEFAULT_KAPPA: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct StimulusPlan<T> {
    pub lambda: T,
    pub s: Matrix<T>,
}

impl<T: Scalar> StimulusPlan<T> {
    pub fn new(lambda: T, s: Matrix<T>) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= T::zero()) {
            return Err(invalid("stimulus lambda must be finite and non-negative"));
        }
        if s.as_slice().iter().any(|&v| v < T::zero()) {
            return Err(invalid("stimulus matrix entries must be non-negative"));
        }
        Ok(Self { lambda, s })
    }

    pub fn identity(rows: usize, cols: usize) -> Result<Self> {
        Self::new(T::zero(), Matrix::zeros(rows, cols)?)
    }

    pub fn is_identity(&self) -> bool {
        self.lambda.is_zero() || self.s.as_slice().iter().all(|v| v.is_zero())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegulatoryPlan<T> {
    pub mu: T,
    pub theta: Matrix<T>,
}

impl<T: Scalar> RegulatoryPlan<T> {
    pub fn new(mu: T, theta: Matrix<T>) -> Result<Self> {
        if !(mu.is_finite() && mu >= T::zero()) {
            return Err(invalid("regulatory mu must be finite and non-negative"));
        }
        if theta.as_slice().iter().any(|&v| v < T::zero()) {
            return Err(invalid("regulatory theta entries must be non-negative"));
        }
        Ok(Self { mu, theta })
    }

    pub fn identity(rows: usize, cols: usize) -> Result<Self> {
        Self::new(T::zero(), Matrix::zeros(rows, cols)?)
    }

    pub fn is_identity(&self) -> bool {
        self.mu.is_zero() || self.theta.as_slice().iter().all(|v| v.is_zero())
    }
}

/// `m1 + λ·S`, elementwise.
pub fn apply_stimulus<T: Scalar>(m1: &Matrix<T>, plan: &StimulusPlan<T>) -> Result<Matrix<T>> {
    m1.zip_map(&plan.s, |m, s| m + plan.lambda * s)
}

/// `max(r − μ·Θ, ε)` with ε = [`RESISTANCE_FLOOR`].
pub fn adjust_resistance<T: Scalar>(r: &Matrix<T>, plan: &RegulatoryPlan<T>) -> Result<Matrix<T>> {
    if r.as_slice().iter().any(|&v| !(v > T::zero())) {
        return Err(invalid("resistance entries must be positive"));
    }
    let floor = T::lit(RESISTANCE_FLOOR);
    r.zip_map(&plan.theta, |r, th| (r - plan.mu * th).max(floor))
}

/// Anything the feedback operator can shift: a momentum matrix or a full
/// momentum tensor.
pub trait FeedbackField: Clone {
    type Scalar: Scalar;

    /// `self + gamma·f`, elementwise.
    fn shifted(&self, gamma: Self::Scalar, f: &Self) -> Result<Self>;
}

impl<T: Scalar> FeedbackField for MomentumMatrix<T> {
    type Scalar = T;

    fn shifted(&self, gamma: T, f: &Self) -> Result<Self> {
        Ok(MomentumMatrix(self.0.zip_map(&f.0, |g, f| g + gamma * f)?))
    }
}

impl<T: Scalar> FeedbackField for Tensor3<T> {
    type Scalar = T;

    fn shifted(&self, gamma: T, f: &Self) -> Result<Self> {
        self.zip_map(f, |g, f| g + gamma * f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackPlan<F: FeedbackField> {
    pub gamma: F::Scalar,
    pub f: F,
}

impl<F: FeedbackField> FeedbackPlan<F> {
    pub fn new(gamma: F::Scalar, f: F) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(invalid("feedback gamma must be finite"));
        }
        Ok(Self { gamma, f })
    }
}

/// `g + γ·F`. A zero γ returns `g` untouched.
pub fn apply_feedback<F: FeedbackField>(g: &F, plan: &FeedbackPlan<F>) -> Result<F> {
    if plan.gamma.is_zero() {
        return Ok(g.clone());
    }
    g.shifted(plan.gamma, &plan.f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    Spending,
    TaxCut,
    Subsidy,
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ActionKind::Spending => "spending",
            ActionKind::TaxCut => "tax_cut",
            ActionKind::Subsidy => "subsidy",
        })
    }
}

/// A discrete intervention aimed at the cells `target_sectors × target_agents`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyAction {
    pub kind: ActionKind,
    /// Currency units per period.
    pub magnitude: f64,
    pub target_sectors: Vec<usize>,
    pub target_agents: Vec<usize>,
}

impl PolicyAction {
    /// Checks magnitude and targets against a grid of `n_sectors x n_agents`.
    pub fn validate(&self, n_sectors: usize, n_agents: usize) -> Result<()> {
        if !(self.magnitude.is_finite() && self.magnitude >= 0.0) {
            return Err(invalid(format!("{} magnitude must be finite and non-negative", self.kind)));
        }
        if self.target_sectors.is_empty() || self.target_agents.is_empty() {
            return Err(invalid(format!("{} needs at least one target sector and agent", self.kind)));
        }
        if let Some(s) = self.target_sectors.iter().find(|&&s| s >= n_sectors) {
            return Err(invalid(format!("target sector {s} out of range (n_sectors = {n_sectors})")));
        }
        if let Some(a) = self.target_agents.iter().find(|&&a| a >= n_agents) {
            return Err(invalid(format!("target agent {a} out of range (n_agents = {n_agents})")));
        }
        Ok(())
    }

    /// Distinct targeted cells, row-major.
    pub fn cells(&self) -> Vec<(usize, usize)> {
        let sectors: BTreeSet<_> = self.target_sectors.iter().copied().collect();
        let agents: BTreeSet<_> = self.target_agents.iter().copied().collect();
        sectors.iter().flat_map(|&i| agents.iter().map(move |&j| (i, j))).collect()
    }
}

/// How actions translate into operator plans.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionRouting {
    /// Resistance reduction per currency unit of tax cut.
    pub kappa: f64,
}

impl Default for ActionRouting {
    fn default() -> Self {
        Self { kappa: DEFAULT_KAPPA }
    }
}

/// Routes an action onto stimulus and regulatory plans.
///
/// Spending and subsidy spread `magnitude` equally over the targeted cells as
/// stimulus with λ = 1. A tax cut spreads `magnitude·κ` equally as Θ with μ = 1.
/// The plan an action does not use is the identity.
pub fn action_to_plans(
    a: &PolicyAction,
    tax: &Taxonomy,
    routing: &ActionRouting,
) -> Result<(StimulusPlan<f64>, RegulatoryPlan<f64>)> {
    let d = tax.dims();
    let (rows, cols) = (d.n_sectors, d.n_agents);
    a.validate(rows, cols)?;
    let cells = a.cells();
    let share = a.magnitude / cells.len() as f64;
    let spread = |per_cell: f64| -> Result<Matrix<f64>> {
        let mut m = Matrix::zeros(rows, cols)?;
        for &(i, j) in &cells {
            m.data_mut()[i * cols + j] = per_cell;
        }
        Ok(m)
    };
    if a.magnitude == 0.0 {
        return Ok((StimulusPlan::identity(rows, cols)?, RegulatoryPlan::identity(rows, cols)?));
    }
    match a.kind {
        ActionKind::Spending | ActionKind::Subsidy => {
            Ok((StimulusPlan::new(1.0, spread(share)?)?, RegulatoryPlan::identity(rows, cols)?))
        }
        ActionKind::TaxCut => {
            if !(routing.kappa.is_finite() && routing.kappa >= 0.0) {
                return Err(invalid("kappa must be finite and non-negative"));
            }
            Ok((StimulusPlan::identity(rows, cols)?, RegulatoryPlan::new(1.0, spread(share * routing.kappa)?)?))
        }
    }
}
