//! Discrete-time economy driven by the momentum model.
//!
//! Each step runs, in this order:
//!
//! 1. active shocks perturb a working copy of the inputs (shocks are
//!    transient and never written back),
//! 2. interventions become stimulus/regulatory plans applied to both the
//!    working copy and the persistent inputs,
//! 3. momentum is computed from the working copy,
//! 4. optional feedback shifts the momentum,
//! 5. indicators are derived,
//! 6. foundational productivity of the persistent inputs drifts by `g_star`.

mod indicators;
mod rng;
mod shock;

pub use indicators::{derive_indicators, IndicatorParams, Indicators, GROWTH_EPSILON};
pub use rng::SimRng;
pub use shock::{apply_shock, Shock, ShockKind};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::ledger::Taxonomy;
use crate::matrix::Matrix;
use crate::momentum::{momentum_slice, MomentumInputs, MomentumMatrix};
use crate::policy::{
    action_to_plans, adjust_resistance, apply_feedback, apply_stimulus, ActionRouting, FeedbackPlan, PolicyAction,
};

/// Validated simulation configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub taxonomy: Taxonomy,
    pub inputs: MomentumInputs<f64>,
    pub indicators: IndicatorParams,
    pub routing: ActionRouting,
    pub seed: u64,
    pub steps: usize,
}

impl SimConfig {
    pub fn new(
        taxonomy: Taxonomy,
        inputs: MomentumInputs<f64>,
        indicators: IndicatorParams,
        routing: ActionRouting,
        seed: u64,
        steps: usize,
    ) -> Result<Self> {
        let d = taxonomy.dims();
        if inputs.shape() != (d.n_sectors, d.n_agents) {
            return Err(invalid(format!(
                "inputs are {:?} but the taxonomy has {} sectors x {} agents",
                inputs.shape(),
                d.n_sectors,
                d.n_agents
            )));
        }
        indicators.validate(d.n_sectors)?;
        if !(routing.kappa.is_finite() && routing.kappa >= 0.0) {
            return Err(invalid("kappa must be finite and non-negative"));
        }
        if steps == 0 {
            return Err(invalid("steps must be >= 1"));
        }
        Ok(Self { taxonomy, inputs, indicators, routing, seed, steps })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EconomyState {
    pub step: usize,
    /// Persistent inputs: policy effects and drift accumulate here.
    pub inputs: MomentumInputs<f64>,
    /// Total (post-feedback) momentum of the previous step.
    pub g_prev_total: f64,
    pub u_prev: f64,
    pub rng: SimRng,
}

/// One step's six indicators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorFrame {
    pub step: usize,
    pub gdp_growth: f64,
    pub inflation: f64,
    pub unemployment: f64,
    pub trade_balance: f64,
    pub economic_resistance: f64,
    pub actions: Vec<PolicyAction>,
}

/// Feedback request: `γ` and an optional signal matrix. Without a matrix the
/// signal is all ones, which shifts every cell's momentum by `γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackInput {
    pub gamma: f64,
    pub f: Option<Matrix<f64>>,
}

impl FeedbackInput {
    pub fn plan(&self, rows: usize, cols: usize) -> Result<FeedbackPlan<MomentumMatrix<f64>>> {
        let f = match &self.f {
            Some(f) => f.clone(),
            None => Matrix::filled(rows, cols, 1.0)?,
        };
        if f.shape() != (rows, cols) {
            return Err(invalid(format!("feedback matrix is {:?}, expected {:?}", f.shape(), (rows, cols))));
        }
        FeedbackPlan::new(self.gamma, MomentumMatrix(f))
    }
}

/// Interventions scheduled for one step.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScheduledStep {
    pub actions: Vec<PolicyAction>,
    pub feedback: Option<FeedbackInput>,
}

pub type Schedule = BTreeMap<usize, ScheduledStep>;

/// A named configuration with its shocks and intervention schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub config: SimConfig,
    pub shocks: Vec<Shock>,
    pub schedule: Schedule,
}

pub fn init_state(cfg: &SimConfig) -> EconomyState {
    EconomyState {
        step: 0,
        inputs: cfg.inputs.clone(),
        g_prev_total: momentum_slice(&cfg.inputs).total(),
        u_prev: cfg.indicators.u0,
        rng: SimRng::seed(cfg.seed),
    }
}

/// Advances the economy one step. Inactive entries of `shocks` are ignored.
pub fn step(
    cfg: &SimConfig,
    state: &EconomyState,
    interventions: &[PolicyAction],
    feedback: Option<&FeedbackPlan<MomentumMatrix<f64>>>,
    shocks: &[Shock],
) -> Result<(EconomyState, IndicatorFrame)> {
    let mut working = state.inputs.clone();
    for s in shocks {
        working = apply_shock(&working, s, state.step, &cfg.taxonomy)?;
    }

    let mut persistent = state.inputs.clone();
    for action in interventions {
        let (stimulus, regulation) = action_to_plans(action, &cfg.taxonomy, &cfg.routing)?;
        if !stimulus.is_identity() {
            working = working.with_m1(apply_stimulus(working.m1(), &stimulus)?)?;
            persistent = persistent.with_m1(apply_stimulus(persistent.m1(), &stimulus)?)?;
        }
        if !regulation.is_identity() {
            let adjust = |inp: &MomentumInputs<f64>| -> Result<MomentumInputs<f64>> {
                inp.with_resistances(
                    adjust_resistance(inp.r1(), &regulation)?,
                    adjust_resistance(inp.r2(), &regulation)?,
                )
            };
            working = adjust(&working)?;
            persistent = adjust(&persistent)?;
        }
    }

    let mut g = momentum_slice(&working);
    if let Some(plan) = feedback {
        g = apply_feedback(&g, plan)?;
    }

    let mut rng = state.rng.clone();
    let ind = derive_indicators(state.g_prev_total, &g, &working, &cfg.indicators, state.u_prev, &mut rng);

    let drift = 1.0 + cfg.indicators.g_star;
    persistent = persistent.with_m1(persistent.m1().map(|v| v * drift))?;

    let frame = IndicatorFrame {
        step: state.step,
        gdp_growth: ind.gdp_growth,
        inflation: ind.inflation,
        unemployment: ind.unemployment,
        trade_balance: ind.trade_balance,
        economic_resistance: ind.economic_resistance,
        actions: interventions.to_vec(),
    };
    let next = EconomyState {
        step: state.step + 1,
        inputs: persistent,
        g_prev_total: g.total(),
        u_prev: ind.unemployment,
        rng,
    };
    Ok((next, frame))
}

/// Runs `cfg.steps` steps with the given shocks and schedule.
pub fn run(cfg: &SimConfig, shocks: &[Shock], schedule: &Schedule) -> Result<Vec<IndicatorFrame>> {
    let scenario =
        Scenario { name: String::new(), config: cfg.clone(), shocks: shocks.to_vec(), schedule: schedule.clone() };
    let mut sim = Simulation::new(scenario);
    let mut frames = Vec::with_capacity(cfg.steps);
    while !sim.is_finished() {
        frames.push(sim.advance(&[], None)?);
    }
    Ok(frames)
}

/// Extra input supplied to one step on top of the scenario schedule.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepOverride {
    pub actions: Vec<PolicyAction>,
    pub feedback: Option<FeedbackInput>,
}

/// A steerable run of a scenario. Keeps the frames so far and a log of the
/// per-step overrides, so any prefix can be replayed exactly.
#[derive(Debug, Clone)]
pub struct Simulation {
    scenario: Scenario,
    state: EconomyState,
    history: Vec<IndicatorFrame>,
    log: Vec<StepOverride>,
}

impl Simulation {
    pub fn new(scenario: Scenario) -> Self {
        let state = init_state(&scenario.config);
        Self { scenario, state, history: Vec::new(), log: Vec::new() }
    }

    /// Re-runs `log` from the initial state.
    pub fn replay(scenario: Scenario, log: &[StepOverride]) -> Result<Self> {
        let mut sim = Self::new(scenario);
        for o in log {
            sim.advance(&o.actions, o.feedback.clone())?;
        }
        Ok(sim)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn state(&self) -> &EconomyState {
        &self.state
    }

    pub fn history(&self) -> &[IndicatorFrame] {
        &self.history
    }

    pub fn log(&self) -> &[StepOverride] {
        &self.log
    }

    pub fn is_finished(&self) -> bool {
        self.state.step >= self.scenario.config.steps
    }

    /// One step: scheduled actions first, then `extra_actions`. A feedback
    /// override replaces the scheduled feedback for this step.
    pub fn advance(
        &mut self,
        extra_actions: &[PolicyAction],
        feedback: Option<FeedbackInput>,
    ) -> Result<IndicatorFrame> {
        if self.is_finished() {
            return Err(invalid(format!("simulation already at its final step {}", self.scenario.config.steps)));
        }
        let cfg = &self.scenario.config;
        let scheduled = self.scenario.schedule.get(&self.state.step);
        let mut actions: Vec<PolicyAction> = scheduled.map(|s| s.actions.clone()).unwrap_or_default();
        actions.extend_from_slice(extra_actions);
        let fb = feedback.as_ref().or_else(|| scheduled.and_then(|s| s.feedback.as_ref()));
        let (rows, cols) = cfg.inputs.shape();
        let plan = fb.map(|f| f.plan(rows, cols)).transpose()?;

        let (next, frame) = step(cfg, &self.state, &actions, plan.as_ref(), &self.scenario.shocks)?;
        self.state = next;
        self.history.push(frame.clone());
        self.log.push(StepOverride { actions: extra_actions.to_vec(), feedback });
        Ok(frame)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::ActionKind;

    fn labels(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    fn config(inputs: MomentumInputs<f64>, params: IndicatorParams, steps: usize) -> SimConfig {
        let (r, c) = inputs.shape();
        let tax = Taxonomy::new(labels("s", r), labels("a", c), vec!["t".into()]).unwrap();
        SimConfig::new(tax, inputs, params, ActionRouting::default(), 11, steps).unwrap()
    }

    fn quiet() -> IndicatorParams {
        IndicatorParams { noise_sd: 0.0, ..IndicatorParams::default() }
    }

    #[test]
    fn init_examples() {
        let cfg = config(MomentumInputs::uniform(2, 2, [1.0; 3], [1.0; 2], 1.0).unwrap(), quiet(), 3);
        let a = init_state(&cfg);
        assert_eq!(a.step, 0);
        assert_eq!(a.g_prev_total, -4.0);
        assert_eq!(a, init_state(&cfg));
    }

    #[test]
    fn config_validation() {
        let inputs = MomentumInputs::uniform(2, 2, [1.0; 3], [1.0; 2], 1.0).unwrap();
        let tax = Taxonomy::new(labels("s", 3), labels("a", 2), vec!["t".into()]).unwrap();
        assert!(SimConfig::new(tax, inputs.clone(), quiet(), ActionRouting::default(), 0, 1).is_err());
        let tax = Taxonomy::new(labels("s", 2), labels("a", 2), vec!["t".into()]).unwrap();
        assert!(SimConfig::new(tax.clone(), inputs.clone(), quiet(), ActionRouting::default(), 0, 0).is_err());
        let bad_u = IndicatorParams { u0: 0.9, u_max: 0.5, ..quiet() };
        assert!(SimConfig::new(tax, inputs, bad_u, ActionRouting::default(), 0, 1).is_err());
    }

    #[test]
    fn balanced_one_cell_step_by_hand() {
        // m1/r1 = (m2+m3)/r2 = 2, so momentum starts at zero
        let inputs = MomentumInputs::uniform(1, 1, [2.0, 1.5, 0.5], [1.0, 1.0], 1.0).unwrap();
        let params = IndicatorParams { g_star: 0.02, okun_b: 0.0, ..quiet() };
        let cfg = config(inputs, params, 3);
        let s0 = init_state(&cfg);
        let (s1, f0) = step(&cfg, &s0, &[], None, &[]).unwrap();
        assert_eq!(f0.gdp_growth, 0.0);
        assert_eq!(s1.inputs.m1().get(0, 0), 2.0 * 1.02);
        let (s2, f1) = step(&cfg, &s1, &[], None, &[]).unwrap();
        let g1 = 2.0 * 1.02 - 2.0;
        assert!((s2.g_prev_total - g1).abs() < 1e-15);
        assert!((f1.gdp_growth - g1 / GROWTH_EPSILON).abs() <= 1e-9 * f1.gdp_growth);
        let (_, f2) = step(&cfg, &s2, &[], None, &[]).unwrap();
        let g2 = 2.0 * 1.02 * 1.02 - 2.0;
        assert!((f2.gdp_growth - (g2 - g1) / g1).abs() < 1e-12);
        assert_eq!(f2.unemployment, cfg.indicators.u0);
    }

    #[test]
    fn step_is_deterministic() {
        let inputs = MomentumInputs::uniform(2, 3, [3.0, 1.0, 0.5], [1.0, 1.2], 1.1).unwrap();
        let cfg = config(inputs, IndicatorParams { noise_sd: 0.01, ..IndicatorParams::default() }, 5);
        let s = init_state(&cfg);
        let a = step(&cfg, &s, &[], None, &[]).unwrap();
        let b = step(&cfg, &s, &[], None, &[]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_spending_is_identity() {
        let inputs = MomentumInputs::uniform(2, 2, [3.0, 1.0, 0.5], [1.0, 1.2], 1.1).unwrap();
        let cfg = config(inputs, IndicatorParams { noise_sd: 0.01, ..IndicatorParams::default() }, 5);
        let s = init_state(&cfg);
        let action = PolicyAction {
            kind: ActionKind::Spending,
            magnitude: 0.0,
            target_sectors: vec![0],
            target_agents: vec![1],
        };
        let (sa, fa) = step(&cfg, &s, std::slice::from_ref(&action), None, &[]).unwrap();
        let (sb, mut fb) = step(&cfg, &s, &[], None, &[]).unwrap();
        fb.actions = vec![action];
        assert_eq!(fa, fb);
        assert_eq!(sa, sb);
    }

    #[test]
    fn spending_never_lowers_m1() {
        let inputs = MomentumInputs::uniform(2, 2, [3.0, 1.0, 0.5], [1.0, 1.2], 1.1).unwrap();
        let cfg = config(inputs, quiet(), 5);
        let s = init_state(&cfg);
        let action = PolicyAction {
            kind: ActionKind::Spending,
            magnitude: 10.0,
            target_sectors: vec![1],
            target_agents: vec![0, 1],
        };
        let (with, _) = step(&cfg, &s, &[action], None, &[]).unwrap();
        let (without, _) = step(&cfg, &s, &[], None, &[]).unwrap();
        for (a, b) in with.inputs.m1().as_slice().iter().zip(without.inputs.m1().as_slice()) {
            assert!(a >= b);
        }
    }

    #[test]
    fn feedback_shifts_momentum() {
        let inputs = MomentumInputs::uniform(1, 2, [2.0, 1.0, 1.0], [1.0, 1.0], 1.0).unwrap();
        let cfg = config(inputs, quiet(), 5);
        let s = init_state(&cfg);
        let plan = FeedbackInput { gamma: 0.5, f: None }.plan(1, 2).unwrap();
        let (next, _) = step(&cfg, &s, &[], Some(&plan), &[]).unwrap();
        assert_eq!(next.g_prev_total, 1.0);
        let wrong = FeedbackInput { gamma: 0.5, f: Some(Matrix::zeros(2, 2).unwrap()) };
        assert!(wrong.plan(1, 2).is_err());
    }

    #[test]
    fn run_examples() {
        let inputs = MomentumInputs::uniform(2, 2, [3.0, 1.0, 0.5], [1.0, 1.2], 1.1).unwrap();
        let noisy = IndicatorParams { noise_sd: 0.01, ..IndicatorParams::default() };
        let one = run(&config(inputs.clone(), noisy.clone(), 1), &[], &Schedule::new()).unwrap();
        assert_eq!(one.len(), 1);
        let cfg = config(inputs, noisy, 12);
        assert_eq!(run(&cfg, &[], &Schedule::new()).unwrap(), run(&cfg, &[], &Schedule::new()).unwrap());
    }

    #[test]
    fn crisis_raises_resistance_only_in_window() {
        let inputs = MomentumInputs::uniform(2, 2, [3.0, 1.0, 0.5], [1.0, 1.2], 1.1).unwrap();
        let cfg = config(inputs, quiet(), 12);
        let shock = Shock::new(ShockKind::FinancialCrisis, 5, 3, 0.5).unwrap();
        let base = run(&cfg, &[], &Schedule::new()).unwrap();
        let hit = run(&cfg, &[shock], &Schedule::new()).unwrap();
        assert_eq!(base[..5], hit[..5]);
        for k in 5..8 {
            assert!(hit[k].economic_resistance > base[k].economic_resistance);
        }
        assert_eq!(hit[8].economic_resistance, base[8].economic_resistance);
    }

    #[test]
    fn advance_refuses_past_end() {
        let inputs = MomentumInputs::uniform(1, 1, [1.0; 3], [1.0; 2], 1.0).unwrap();
        let cfg = config(inputs, quiet(), 1);
        let mut sim =
            Simulation::new(Scenario { name: "x".into(), config: cfg, shocks: vec![], schedule: Schedule::new() });
        sim.advance(&[], None).unwrap();
        assert!(sim.is_finished());
        assert!(sim.advance(&[], None).is_err());
    }
}
