//! Request handlers and wire types.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::Json;
use mtensor::io::read_scenario_json;
use mtensor::matrix::Matrix;
use mtensor::policy::PolicyAction;
use mtensor::scenarios;
use mtensor::sim::{FeedbackInput, IndicatorFrame, Scenario, Simulation};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::ApiError;
use crate::registry::{Parent, Registry, Session};
use crate::SCHEMA_VERSION;

pub type AppState = Arc<Registry>;
type Reply = Result<(StatusCode, Json<Value>), ApiError>;

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ScenarioRef {
    Named(String),
    Inline(Value),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateRequest {
    scenario: ScenarioRef,
    #[serde(default)]
    seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepRequest {
    #[serde(default)]
    actions: Vec<PolicyAction>,
    #[serde(default)]
    feedback: Option<FeedbackRequest>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FeedbackRequest {
    gamma: f64,
    #[serde(default)]
    f: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ForkRequest {
    at_step: usize,
}

fn parse_body<T: DeserializeOwned>(body: &[u8], code: &'static str) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(code, e.to_string()))
}

fn reply(status: StatusCode, mut body: Value) -> Reply {
    body["schema_version"] = json!(SCHEMA_VERSION);
    Ok((status, Json(body)))
}

/// Taxonomy and run metadata the console builds its controls from.
pub fn scenario_meta(s: &Scenario) -> Value {
    let c = &s.config;
    json!({
        "name": s.name,
        "seed": c.seed,
        "steps": c.steps,
        "sectors": c.taxonomy.sectors(),
        "agents": c.taxonomy.agents(),
        "periods": c.taxonomy.periods(),
        "action_kinds": ["spending", "tax_cut", "subsidy"],
        "shocks": s.shocks,
    })
}

pub fn frame_json(f: &IndicatorFrame) -> Value {
    serde_json::to_value(f).expect("frames serialize")
}

fn summary(s: &Session) -> Value {
    json!({
        "id": s.id,
        "step": s.sim.state().step,
        "steps": s.sim.scenario().config.steps,
        "parent": s.parent.as_ref().map(|p| json!({"id": p.id, "step": p.step})),
        "scenario": scenario_meta(s.sim.scenario()),
    })
}

fn lookup(reg: &Registry, id: &str) -> Result<Arc<crate::registry::Entry>, ApiError> {
    reg.get(id).ok_or_else(|| ApiError::not_found("session_not_found", format!("no session {id}")))
}

async fn created(reg: &Registry, parent: Option<Parent>, sim: Simulation) -> Reply {
    let id = reg.insert(parent, sim);
    let entry = lookup(reg, &id)?;
    let session = entry.session.lock().await;
    reply(StatusCode::CREATED, summary(&session))
}

pub async fn healthz() -> Reply {
    reply(StatusCode::OK, json!({"status": "ok"}))
}

pub async fn list_scenarios() -> Reply {
    let mut list = Vec::new();
    for name in scenarios::names() {
        let s = scenarios::load(name)
            .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?;
        list.push(scenario_meta(&s));
    }
    reply(StatusCode::OK, json!({"scenarios": list}))
}

pub async fn create_session(State(reg): State<AppState>, body: Bytes) -> Reply {
    let req: CreateRequest = parse_body(&body, "invalid_request")?;
    let mut scenario = match req.scenario {
        ScenarioRef::Named(name) => scenarios::builtin(&name)
            .ok_or_else(|| ApiError::not_found("scenario_not_found", format!("unknown scenario {name:?}")))?
            .map_err(|e| ApiError::bad_request("invalid_scenario", e.to_string()))?,
        ScenarioRef::Inline(v) => {
            read_scenario_json(&v).map_err(|e| ApiError::bad_request("invalid_scenario", e.to_string()))?
        }
    };
    if let Some(seed) = req.seed {
        scenario.config.seed = seed;
    }
    created(&reg, None, Simulation::new(scenario)).await
}

pub async fn step_session(State(reg): State<AppState>, Path(id): Path<String>, body: Bytes) -> Reply {
    let entry = lookup(&reg, &id)?;
    let req: StepRequest = if body.iter().all(u8::is_ascii_whitespace) {
        StepRequest::default()
    } else {
        parse_body(&body, "invalid_intervention")?
    };
    let feedback = match req.feedback {
        None => None,
        Some(f) => Some(FeedbackInput {
            gamma: f.gamma,
            f: f.f
                .map(Matrix::from_rows)
                .transpose()
                .map_err(|e| ApiError::bad_request("invalid_feedback", e.to_string()))?,
        }),
    };

    let mut session = entry.session.lock().await;
    if session.sim.is_finished() {
        let steps = session.sim.scenario().config.steps;
        return Err(ApiError::conflict("max_steps_reached", format!("session is at its final step {steps}")));
    }
    let frame = session
        .sim
        .advance(&req.actions, feedback)
        .map_err(|e| ApiError::bad_request("invalid_intervention", e.to_string()))?;
    reply(StatusCode::OK, json!({"id": session.id, "step": session.sim.state().step, "frame": frame_json(&frame)}))
}

pub async fn fork_session(State(reg): State<AppState>, Path(id): Path<String>, body: Bytes) -> Reply {
    let entry = lookup(&reg, &id)?;
    let req: ForkRequest = parse_body(&body, "invalid_request")?;
    let (scenario, log) = {
        let session = entry.session.lock().await;
        let len = session.sim.history().len();
        if req.at_step > len {
            return Err(ApiError::bad_request(
                "step_out_of_range",
                format!("at_step {} exceeds the parent's history length {len}", req.at_step),
            ));
        }
        (session.sim.scenario().clone(), session.sim.log()[..req.at_step].to_vec())
    };
    let sim = Simulation::replay(scenario, &log)
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "replay_failed", e.to_string()))?;
    created(&reg, Some(Parent { id, step: req.at_step }), sim).await
}

pub async fn get_series(State(reg): State<AppState>, Path(id): Path<String>) -> Reply {
    let entry = lookup(&reg, &id)?;
    let session = entry.session.lock().await;
    let mut body = summary(&session);
    body["frames"] = session.sim.history().iter().map(frame_json).collect();
    reply(StatusCode::OK, body)
}

pub async fn not_found() -> ApiError {
    ApiError::not_found("route_not_found", "no such endpoint")
}

pub async fn method_not_allowed() -> ApiError {
    ApiError::new(StatusCode::METHOD_NOT_ALLOWED, "method_not_allowed", "method not allowed on this endpoint")
}
