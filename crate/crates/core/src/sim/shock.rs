use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::ledger::Taxonomy;
use crate::matrix::Matrix;
use crate::momentum::MomentumInputs;

/// Largest fraction of foundational productivity a pandemic can remove.
const PANDEMIC_CAP: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShockKind {
    FinancialCrisis,
    Pandemic,
    GreenTransition,
}

/// A perturbation active for steps `start_step .. start_step + duration`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Shock {
    pub kind: ShockKind,
    pub start_step: usize,
    pub duration: usize,
    pub severity: f64,
}

impl Shock {
    pub fn new(kind: ShockKind, start_step: usize, duration: usize, severity: f64) -> Result<Self> {
        let s = Self { kind, start_step, duration, severity };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.duration == 0 {
            return Err(invalid("shock duration must be >= 1"));
        }
        if !(self.severity.is_finite() && self.severity >= 0.0) {
            return Err(invalid("shock severity must be finite and non-negative"));
        }
        Ok(())
    }

    pub fn is_active(&self, step: usize) -> bool {
        step >= self.start_step && step - self.start_step < self.duration
    }
}

/// Applies `shock` to the inputs used at `step`. Inactive shocks return the
/// inputs unchanged.
///
/// * financial crisis: every resistance entry ×(1 + severity).
/// * pandemic: foundational productivity ×(1 − min(severity, 0.95)) in service
///   sectors and ×(1 − min(severity/2, 0.95)) elsewhere.
/// * green transition: at the e-th active step (0-based) a fraction
///   `min(severity·(e+1)/duration, 1)` of each agent's brown-sector
///   productivity moves, split equally, into that agent's green sectors.
///   Total foundational productivity is unchanged.
pub fn apply_shock(
    inputs: &MomentumInputs<f64>,
    shock: &Shock,
    step: usize,
    tax: &Taxonomy,
) -> Result<MomentumInputs<f64>> {
    shock.validate()?;
    if !shock.is_active(step) || shock.severity == 0.0 {
        return Ok(inputs.clone());
    }
    let (rows, cols) = inputs.shape();
    match shock.kind {
        ShockKind::FinancialCrisis => {
            let factor = 1.0 + shock.severity;
            inputs.with_resistances(inputs.r1().map(|r| r * factor), inputs.r2().map(|r| r * factor))
        }
        ShockKind::Pandemic => {
            let service = tax.sector_indices(tax.service_sectors())?;
            let hit = 1.0 - shock.severity.min(PANDEMIC_CAP);
            let other = 1.0 - (shock.severity / 2.0).min(PANDEMIC_CAP);
            let mut m1 = inputs.m1().clone();
            for i in 0..rows {
                let factor = if service.contains(&i) { hit } else { other };
                for v in &mut m1.data_mut()[i * cols..(i + 1) * cols] {
                    *v *= factor;
                }
            }
            inputs.with_m1(m1)
        }
        ShockKind::GreenTransition => {
            let brown = tax.sector_indices(tax.brown_sectors())?;
            let green: Vec<usize> =
                tax.sector_indices(tax.green_sectors())?.into_iter().filter(|g| !brown.contains(g)).collect();
            if brown.is_empty() || green.is_empty() {
                return Ok(inputs.clone());
            }
            let elapsed = (step - shock.start_step + 1) as f64;
            let fraction = (shock.severity * elapsed / shock.duration as f64).min(1.0);
            let mut m1: Matrix<f64> = inputs.m1().clone();
            let data = m1.data_mut();
            for j in 0..cols {
                let mut moved = 0.0;
                for &i in &brown {
                    let take = data[i * cols + j] * fraction;
                    data[i * cols + j] -= take;
                    moved += take;
                }
                let share = moved / green.len() as f64;
                for &i in &green {
                    data[i * cols + j] += share;
                }
            }
            inputs.with_m1(m1)
        }
    }
}
