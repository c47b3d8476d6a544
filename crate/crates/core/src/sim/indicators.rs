use crate::error::{invalid, Result};
use crate::momentum::{aggregate_resistance, MomentumInputs, MomentumMatrix};

use super::rng::SimRng;

/// Lower bound on the growth denominator `|previous total momentum|`.
pub const GROWTH_EPSILON: f64 = 1e-9;

/// Demand-pull sensitivity of inflation to the growth gap.
const INFLATION_GAP_WEIGHT: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorParams {
    /// Target growth per period; also the drift applied to foundational productivity.
    pub g_star: f64,
    pub pi_star: f64,
    /// Okun coefficient: unemployment change per unit growth gap.
    pub okun_b: f64,
    pub u0: f64,
    pub u_min: f64,
    pub u_max: f64,
    pub export_sectors: Vec<usize>,
    pub import_propensity: f64,
    /// Standard deviation of the inflation and unemployment noise.
    pub noise_sd: f64,
}

impl Default for IndicatorParams {
    fn default() -> Self {
        Self {
            g_star: 0.02,
            pi_star: 0.02,
            okun_b: 0.5,
            u0: 0.05,
            u_min: 0.0,
            u_max: 1.0,
            export_sectors: Vec::new(),
            import_propensity: 0.0,
            noise_sd: 0.0,
        }
    }
}

impl IndicatorParams {
    pub fn validate(&self, n_sectors: usize) -> Result<()> {
        let named = [
            ("g_star", self.g_star),
            ("pi_star", self.pi_star),
            ("okun_b", self.okun_b),
            ("u0", self.u0),
            ("u_min", self.u_min),
            ("u_max", self.u_max),
            ("import_propensity", self.import_propensity),
            ("noise_sd", self.noise_sd),
        ];
        if let Some((name, _)) = named.iter().find(|(_, v)| !v.is_finite()) {
            return Err(invalid(format!("{name} must be finite")));
        }
        if !(0.0 <= self.u_min && self.u_min < self.u0 && self.u0 < self.u_max && self.u_max <= 1.0) {
            return Err(invalid(format!(
                "need 0 <= u_min < u0 < u_max <= 1, got u_min={}, u0={}, u_max={}",
                self.u_min, self.u0, self.u_max
            )));
        }
        if !(0.0..=1.0).contains(&self.import_propensity) {
            return Err(invalid("import_propensity must lie in [0, 1]"));
        }
        if self.noise_sd < 0.0 {
            return Err(invalid("noise_sd must be non-negative"));
        }
        if let Some(s) = self.export_sectors.iter().find(|&&s| s >= n_sectors) {
            return Err(invalid(format!("export sector {s} out of range")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Indicators {
    pub gdp_growth: f64,
    pub inflation: f64,
    pub unemployment: f64,
    pub trade_balance: f64,
    pub economic_resistance: f64,
}

/// Maps one step's momentum onto the reported indicators.
///
/// * growth: `(Σg − prev_total) / max(|prev_total|, 1e-9)`
/// * inflation: `pi_star + 0.5·(growth − g_star) + noise`
/// * unemployment: `clamp(u_prev − okun_b·(growth − g_star) + noise, u_min, u_max)`
/// * trade balance: export-sector momentum minus `import_propensity·Σ max(g, 0)`
/// * resistance: mean of all resistance entries
///
/// Noise is `noise_sd` times a standard normal; the inflation draw is taken
/// before the unemployment draw, and both are taken even when `noise_sd` is 0.
pub fn derive_indicators(
    prev_total: f64,
    g: &MomentumMatrix<f64>,
    inputs: &MomentumInputs<f64>,
    params: &IndicatorParams,
    u_prev: f64,
    rng: &mut SimRng,
) -> Indicators {
    let total = g.total();
    let gdp_growth = (total - prev_total) / prev_total.abs().max(GROWTH_EPSILON);
    let gap = gdp_growth - params.g_star;

    let inflation_noise = params.noise_sd * rng.standard_normal();
    let unemployment_noise = params.noise_sd * rng.standard_normal();

    let inflation = params.pi_star + INFLATION_GAP_WEIGHT * gap + inflation_noise;
    let unemployment = (u_prev - params.okun_b * gap + unemployment_noise).clamp(params.u_min, params.u_max);

    let m = g.matrix();
    let exports: f64 = params.export_sectors.iter().map(|&i| m.row(i).iter().sum::<f64>()).sum();
    let positive: f64 = m.as_slice().iter().map(|&v| v.max(0.0)).sum();
    let trade_balance = exports - params.import_propensity * positive;

    Indicators { gdp_growth, inflation, unemployment, trade_balance, economic_resistance: aggregate_resistance(inputs) }
}
