//! Scenario files.
//!
//! TOML on disk; the same schema as a JSON object inline in API requests.
//! Unknown keys are rejected and every validation error names the offending
//! path. Omitted optional fields take defaults, and writing always emits the
//! fully explicit form.
//!
//! ```toml
//! name = "demo"
//! seed = 7
//! steps = 40
//! beta = 1.2
//!
//! [taxonomy]
//! sectors = ["manufacturing", "services"]
//! agents = ["household", "business"]
//!
//! [inputs]
//! m1 = 2.0                       # scalar fill
//! r1 = [[1.0, 1.2], [0.9, 1.1]]  # or explicit rows
//!
//! [[shocks]]
//! kind = "financial_crisis"
//! start_step = 10
//! duration = 6
//! severity = 0.4
//!
//! [[schedule]]
//! step = 12
//! actions = [{ kind = "spending", magnitude = 50.0, target_sectors = [1], target_agents = [0, 1] }]
//! ```

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ledger::Taxonomy;
use crate::matrix::Matrix;
use crate::momentum::MomentumInputs;
use crate::policy::{ActionRouting, PolicyAction, DEFAULT_KAPPA};
use crate::sim::{FeedbackInput, IndicatorParams, Scenario, ScheduledStep, Shock, SimConfig};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    #[serde(default)]
    name: String,
    #[serde(default, with = "seed_repr")]
    seed: u64,
    #[serde(default = "default_steps")]
    steps: usize,
    #[serde(default = "default_beta")]
    beta: f64,
    taxonomy: TaxonomyDoc,
    #[serde(default)]
    inputs: InputsDoc,
    #[serde(default)]
    indicators: IndicatorsDoc,
    #[serde(default)]
    policy: PolicyDoc,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    shocks: Vec<Shock>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    schedule: Vec<ScheduleDoc>,
}

/// TOML integers are signed 64-bit, so seeds above `i64::MAX` are written as
/// decimal strings. Both forms are accepted on read.
mod seed_repr {
    use serde::{de, Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Int(u64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(*v) {
            Ok(i) => s.serialize_i64(i),
            Err(_) => s.serialize_str(&v.to_string()),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Int(v) => Ok(v),
            Repr::Text(t) => {
                t.parse().map_err(|_| de::Error::custom(format!("seed `{t}` is not a 64-bit unsigned integer")))
            }
        }
    }
}

fn default_steps() -> usize {
    40
}

fn default_beta() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TaxonomyDoc {
    sectors: Vec<String>,
    agents: Vec<String>,
    /// Defaults to `t0 .. t{steps-1}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    periods: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    service_sectors: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    brown_sectors: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    green_sectors: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum MatrixDoc {
    Fill(f64),
    Rows(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InputsDoc {
    #[serde(default = "fill::<2>")]
    m1: MatrixDoc,
    #[serde(default = "fill::<1>")]
    m2: MatrixDoc,
    #[serde(default = "half")]
    m3: MatrixDoc,
    #[serde(default = "fill::<1>")]
    r1: MatrixDoc,
    #[serde(default = "fill::<1>")]
    r2: MatrixDoc,
}

fn fill<const N: u8>() -> MatrixDoc {
    MatrixDoc::Fill(f64::from(N))
}

fn half() -> MatrixDoc {
    MatrixDoc::Fill(0.5)
}

impl Default for InputsDoc {
    fn default() -> Self {
        Self { m1: fill::<2>(), m2: fill::<1>(), m3: half(), r1: fill::<1>(), r2: fill::<1>() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct IndicatorsDoc {
    g_star: f64,
    pi_star: f64,
    okun_b: f64,
    u0: f64,
    u_min: f64,
    u_max: f64,
    /// Sector labels.
    export_sectors: Vec<String>,
    import_propensity: f64,
    noise_sd: f64,
}

impl Default for IndicatorsDoc {
    fn default() -> Self {
        let p = IndicatorParams::default();
        Self {
            g_star: p.g_star,
            pi_star: p.pi_star,
            okun_b: p.okun_b,
            u0: p.u0,
            u_min: p.u_min,
            u_max: p.u_max,
            export_sectors: Vec::new(),
            import_propensity: p.import_propensity,
            noise_sd: p.noise_sd,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct PolicyDoc {
    kappa: f64,
}

impl Default for PolicyDoc {
    fn default() -> Self {
        Self { kappa: DEFAULT_KAPPA }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleDoc {
    step: usize,
    #[serde(default)]
    actions: Vec<PolicyAction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    feedback: Option<FeedbackDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FeedbackDoc {
    gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    f: Option<Vec<Vec<f64>>>,
}

fn err(path: impl Into<String>, message: impl std::fmt::Display) -> Error {
    Error::Scenario { path: path.into(), message: message.to_string().trim_end().to_owned() }
}

fn decode<'de, D, T>(de: D) -> Result<T>
where
    D: serde::Deserializer<'de>,
    D::Error: std::fmt::Display,
    T: DeserializeOwned,
{
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { "scenario".to_owned() } else { path };
        err(path, e.into_inner())
    })
}

/// Parses and validates a TOML scenario.
pub fn read_scenario(bytes: &[u8]) -> Result<Scenario> {
    let text = std::str::from_utf8(bytes).map_err(|e| err("scenario", format!("not UTF-8: {e}")))?;
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| err("scenario", e.message()))?;
    let doc: ScenarioDoc = decode(toml::Value::Table(table))?;
    build(doc)
}

/// Parses and validates a scenario given as a JSON object.
pub fn read_scenario_json(value: &serde_json::Value) -> Result<Scenario> {
    let doc: ScenarioDoc = decode(value)?;
    build(doc)
}

/// Canonical TOML with every field explicit.
pub fn write_scenario(s: &Scenario) -> Result<String> {
    toml::to_string(&to_doc(s)).map_err(|e| err("scenario", e))
}

pub fn scenario_to_json(s: &Scenario) -> serde_json::Value {
    serde_json::to_value(to_doc(s)).expect("scenario serializes")
}

fn matrix(path: &str, doc: &MatrixDoc, rows: usize, cols: usize) -> Result<Matrix<f64>> {
    let m = match doc {
        MatrixDoc::Fill(v) => Matrix::filled(rows, cols, *v),
        MatrixDoc::Rows(r) => Matrix::from_rows(r.clone()),
    }
    .map_err(|e| err(path, e))?;
    if m.shape() != (rows, cols) {
        return Err(err(path, format!("expected {rows}x{cols} (sectors x agents), got {}x{}", m.rows(), m.cols())));
    }
    Ok(m)
}

fn build(doc: ScenarioDoc) -> Result<Scenario> {
    if doc.steps == 0 {
        return Err(err("steps", "must be >= 1"));
    }
    let periods = doc.taxonomy.periods.clone().unwrap_or_else(|| (0..doc.steps).map(|k| format!("t{k}")).collect());
    let taxonomy = Taxonomy::new(doc.taxonomy.sectors.clone(), doc.taxonomy.agents.clone(), periods)
        .map_err(|e| err("taxonomy", e))?
        .with_flags(
            doc.taxonomy.service_sectors.clone(),
            doc.taxonomy.brown_sectors.clone(),
            doc.taxonomy.green_sectors.clone(),
        )
        .map_err(|e| err("taxonomy", e))?;
    let d = taxonomy.dims();
    let (rows, cols) = (d.n_sectors, d.n_agents);

    let i = &doc.inputs;
    let inputs = MomentumInputs::new(
        matrix("inputs.m1", &i.m1, rows, cols)?,
        matrix("inputs.m2", &i.m2, rows, cols)?,
        matrix("inputs.m3", &i.m3, rows, cols)?,
        matrix("inputs.r1", &i.r1, rows, cols)?,
        matrix("inputs.r2", &i.r2, rows, cols)?,
        doc.beta,
    )
    .map_err(|e| err("inputs", e))?;
    if !inputs.m1().as_slice().iter().chain(inputs.m2().as_slice()).chain(inputs.m3().as_slice()).all(|&v| v >= 0.0) {
        return Err(err("inputs", "productivity entries must be non-negative"));
    }

    let ind = &doc.indicators;
    let export_sectors =
        taxonomy.sector_indices(&ind.export_sectors).map_err(|e| err("indicators.export_sectors", e))?;
    let params = IndicatorParams {
        g_star: ind.g_star,
        pi_star: ind.pi_star,
        okun_b: ind.okun_b,
        u0: ind.u0,
        u_min: ind.u_min,
        u_max: ind.u_max,
        export_sectors,
        import_propensity: ind.import_propensity,
        noise_sd: ind.noise_sd,
    };
    params.validate(rows).map_err(|e| err("indicators", e))?;
    let routing = ActionRouting { kappa: doc.policy.kappa };

    for (n, s) in doc.shocks.iter().enumerate() {
        s.validate().map_err(|e| err(format!("shocks[{n}]"), e))?;
    }

    let mut schedule = BTreeMap::new();
    for (n, entry) in doc.schedule.iter().enumerate() {
        if entry.step >= doc.steps {
            return Err(err(
                format!("schedule[{n}].step"),
                format!("step {} is beyond the last step {}", entry.step, doc.steps - 1),
            ));
        }
        for (k, a) in entry.actions.iter().enumerate() {
            a.validate(rows, cols).map_err(|e| err(format!("schedule[{n}].actions[{k}]"), e))?;
        }
        let feedback = entry
            .feedback
            .as_ref()
            .map(|f| -> Result<FeedbackInput> {
                let m =
                    f.f.as_ref()
                        .map(|r| matrix(&format!("schedule[{n}].feedback.f"), &MatrixDoc::Rows(r.clone()), rows, cols))
                        .transpose()?;
                let fb = FeedbackInput { gamma: f.gamma, f: m };
                fb.plan(rows, cols).map_err(|e| err(format!("schedule[{n}].feedback"), e))?;
                Ok(fb)
            })
            .transpose()?;
        let step = ScheduledStep { actions: entry.actions.clone(), feedback };
        if schedule.insert(entry.step, step).is_some() {
            return Err(err(format!("schedule[{n}].step"), format!("step {} scheduled twice", entry.step)));
        }
    }

    let config =
        SimConfig::new(taxonomy, inputs, params, routing, doc.seed, doc.steps).map_err(|e| err("scenario", e))?;
    Ok(Scenario { name: doc.name, config, shocks: doc.shocks, schedule })
}

fn to_doc(s: &Scenario) -> ScenarioDoc {
    let c = &s.config;
    let t = &c.taxonomy;
    let rows = |m: &Matrix<f64>| MatrixDoc::Rows(m.to_rows());
    let p = &c.indicators;
    ScenarioDoc {
        name: s.name.clone(),
        seed: c.seed,
        steps: c.steps,
        beta: c.inputs.beta(),
        taxonomy: TaxonomyDoc {
            sectors: t.sectors().to_vec(),
            agents: t.agents().to_vec(),
            periods: Some(t.periods().to_vec()),
            service_sectors: t.service_sectors().to_vec(),
            brown_sectors: t.brown_sectors().to_vec(),
            green_sectors: t.green_sectors().to_vec(),
        },
        inputs: InputsDoc {
            m1: rows(c.inputs.m1()),
            m2: rows(c.inputs.m2()),
            m3: rows(c.inputs.m3()),
            r1: rows(c.inputs.r1()),
            r2: rows(c.inputs.r2()),
        },
        indicators: IndicatorsDoc {
            g_star: p.g_star,
            pi_star: p.pi_star,
            okun_b: p.okun_b,
            u0: p.u0,
            u_min: p.u_min,
            u_max: p.u_max,
            export_sectors: p.export_sectors.iter().map(|&i| t.sectors()[i].clone()).collect(),
            import_propensity: p.import_propensity,
            noise_sd: p.noise_sd,
        },
        policy: PolicyDoc { kappa: c.routing.kappa },
        shocks: s.shocks.clone(),
        schedule: s
            .schedule
            .iter()
            .map(|(&step, e)| ScheduleDoc {
                step,
                actions: e.actions.clone(),
                feedback: e
                    .feedback
                    .as_ref()
                    .map(|f| FeedbackDoc { gamma: f.gamma, f: f.f.as_ref().map(Matrix::to_rows) }),
            })
            .collect(),
    }
}
