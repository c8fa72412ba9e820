//! HTTP play service.
//!
//! | method | path | |
//! |---|---|---|
//! | GET  | `/instances` | bundled instance names |
//! | POST | `/sessions` | new session; engine moves first if it holds P1 |
//! | GET  | `/sessions/{id}?reveal=true` | state; solve values only with `reveal` |
//! | POST | `/sessions/{id}/moves` | human move plus engine replies |
//! | POST | `/sessions/{id}/whatif` | value after a hypothetical move |
//!
//! Errors are `{code, message, detail}`. Moves within one session are
//! serialized; a mutation arriving while another runs gets 409.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use uuid::Uuid;

use crate::district::{Assign, DistrictLanguage, Party};
use crate::engine::Solver;

mod error;
mod session;
mod store;

pub use error::ApiError;
pub use session::{
    whatif, AtomView, Controller, GameResult, InstanceView, PlayedMove, Projection, Session, SessionRecord, SessionView,
};
pub use store::Store;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub data_dir: PathBuf,
    pub instances_dir: PathBuf,
}

struct Slot {
    /// Held for the whole of a mutation; `try_lock` failing means 409.
    session: tokio::sync::Mutex<Session>,
    lang: Arc<DistrictLanguage>,
    solver: Mutex<Solver<DistrictLanguage>>,
    view: RwLock<Arc<SessionView>>,
}

pub struct AppState {
    config: ServiceConfig,
    store: Store,
    sessions: RwLock<HashMap<Uuid, Arc<Slot>>>,
}

impl AppState {
    /// Open the store and restore every session in it.
    pub fn open(config: ServiceConfig) -> std::io::Result<Arc<Self>> {
        let store = Store::open(&config.data_dir)?;
        let mut sessions = HashMap::new();
        for record in store.records() {
            let id = record.id;
            match Session::restore(record).and_then(slot) {
                Ok(s) => {
                    sessions.insert(id, Arc::new(s));
                }
                Err(e) => log::warn!("dropping stored session {id}: {e}"),
            }
        }
        log::info!("restored {} sessions from {}", sessions.len(), config.data_dir.display());
        Ok(Arc::new(Self { config, store, sessions: RwLock::new(sessions) }))
    }

    fn slot(&self, id: &str) -> Result<Arc<Slot>, ApiError> {
        let id = Uuid::parse_str(id).map_err(|_| ApiError::not_found(format!("no session {id}")))?;
        self.sessions.read().unwrap().get(&id).cloned().ok_or_else(|| ApiError::not_found(format!("no session {id}")))
    }

    fn instance_names(&self) -> Vec<String> {
        let mut names: Vec<String> = std::fs::read_dir(&self.config.instances_dir)
            .into_iter()
            .flatten()
            .flatten()
            .filter_map(|e| {
                let p = e.path();
                (p.extension()? == "state").then(|| p.file_stem()?.to_str().map(String::from))?
            })
            .collect();
        names.sort();
        names
    }

    fn instance_text(&self, name: &str) -> Result<String, ApiError> {
        let valid = !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
        if !valid {
            return Err(session::invalid_instance(format!("bad instance name {name:?}")));
        }
        let path = self.config.instances_dir.join(format!("{name}.state"));
        std::fs::read_to_string(&path).map_err(|_| session::invalid_instance(format!("unknown instance {name:?}")))
    }
}

fn slot(session: Session) -> Result<Slot, ApiError> {
    let mut solver = Solver::new();
    let view = session.view(&mut solver)?;
    Ok(Slot {
        lang: session.lang().clone(),
        session: tokio::sync::Mutex::new(session),
        solver: Mutex::new(solver),
        view: RwLock::new(Arc::new(view)),
    })
}

#[derive(Debug, Deserialize)]
pub struct CreateSession {
    /// Name of a file in the instances directory, without `.state`.
    pub instance: Option<String>,
    /// An inline instance in the state-file format.
    pub instance_text: Option<String>,
    #[serde(default = "default_party")]
    pub first_party: Party,
    #[serde(default = "default_controllers")]
    pub controllers: [Controller; 2],
}

fn default_party() -> Party {
    Party::A
}

fn default_controllers() -> [Controller; 2] {
    [Controller::Human, Controller::Engine]
}

#[derive(Debug, Deserialize)]
pub struct MoveRequest {
    pub atom: usize,
    pub district: usize,
    /// Seat the caller plays, 1 or 2; checked against the mover if given.
    pub player: Option<u8>,
}

#[derive(Debug, Default, Deserialize)]
pub struct ViewQuery {
    #[serde(default)]
    pub reveal: bool,
}

#[derive(Debug, Serialize)]
pub struct MoveResponse {
    pub played: Vec<PlayedMove>,
    pub state: SessionView,
}

#[derive(Debug, Serialize)]
pub struct WhatIfResponse {
    pub hypothetical: Assign,
    pub value: Projection,
}

fn body<T>(json: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    json.map(|Json(t)| t).map_err(|e| ApiError::bad_request("bad_request", e.body_text()))
}

fn redact(view: &SessionView, reveal: bool) -> SessionView {
    let mut v = view.clone();
    if !reveal {
        v.projection = None;
    }
    v
}

async fn list_instances(State(app): State<Arc<AppState>>) -> Json<Vec<String>> {
    Json(app.instance_names())
}

async fn create_session(
    State(app): State<Arc<AppState>>,
    Query(q): Query<ViewQuery>,
    req: Result<Json<CreateSession>, JsonRejection>,
) -> Result<(StatusCode, Json<SessionView>), ApiError> {
    let req = body(req)?;
    let (name, text) = match (req.instance, req.instance_text) {
        (Some(name), None) => {
            let text = app.instance_text(&name)?;
            (name, text)
        }
        (None, Some(text)) => ("inline".to_string(), text),
        _ => return Err(session::invalid_instance("give exactly one of `instance` and `instance_text`")),
    };
    let record = SessionRecord {
        id: Uuid::new_v4(),
        instance_name: name,
        instance_text: text,
        first_party: req.first_party,
        controllers: req.controllers,
        prefix: Vec::new(),
    };
    let mut session = Session::restore(record)?;
    let mut solver = Solver::new();
    session.run_engine(&mut solver)?;
    let view = session.view(&mut solver)?;
    app.store.put(session.record.clone()).map_err(|e| ApiError::internal(e.to_string()))?;
    let id = session.record.id;
    let s = Slot {
        lang: session.lang().clone(),
        session: tokio::sync::Mutex::new(session),
        solver: Mutex::new(solver),
        view: RwLock::new(Arc::new(view.clone())),
    };
    app.sessions.write().unwrap().insert(id, Arc::new(s));
    log::info!("session {id} created");
    Ok((StatusCode::CREATED, Json(redact(&view, q.reveal))))
}

async fn get_session(
    State(app): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<ViewQuery>,
) -> Result<Json<SessionView>, ApiError> {
    let slot = app.slot(&id)?;
    let view = slot.view.read().unwrap().clone();
    Ok(Json(redact(&view, q.reveal)))
}

async fn post_move(
    State(app): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<ViewQuery>,
    req: Result<Json<MoveRequest>, JsonRejection>,
) -> Result<Json<MoveResponse>, ApiError> {
    let slot = app.slot(&id)?;
    let req = body(req)?;
    let mut session = slot
        .session
        .try_lock()
        .map_err(|_| ApiError::conflict("busy", "another move on this session is in progress"))?;
    let before = session.record.prefix.len();
    let outcome = {
        let mut solver = slot.solver.lock().unwrap();
        session
            .play(Assign::new(req.atom, req.district), req.player, &mut solver)
            .and_then(|played| Ok((played, session.view(&mut solver)?)))
    };
    let (played, view) = match outcome {
        Ok(v) => v,
        Err(e) => {
            session.record.prefix.truncate(before);
            return Err(e);
        }
    };
    if let Err(e) = app.store.put(session.record.clone()) {
        session.record.prefix.truncate(before);
        return Err(ApiError::internal(format!("could not persist the move: {e}")));
    }
    *slot.view.write().unwrap() = Arc::new(view.clone());
    Ok(Json(MoveResponse { played, state: redact(&view, q.reveal) }))
}

async fn post_whatif(
    State(app): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    req: Result<Json<MoveRequest>, JsonRejection>,
) -> Result<Json<WhatIfResponse>, ApiError> {
    let slot = app.slot(&id)?;
    let req = body(req)?;
    let prefix: Vec<Assign> = {
        let view = slot.view.read().unwrap();
        view.prefix.iter().map(|m| Assign::new(m.atom, m.district)).collect()
    };
    let mv = Assign::new(req.atom, req.district);
    let value = whatif(&slot.lang, &prefix, mv, &mut slot.solver.lock().unwrap())?;
    Ok(Json(WhatIfResponse { hypothetical: mv, value }))
}

async fn not_found() -> ApiError {
    ApiError::not_found("no such endpoint")
}

pub fn router(app: Arc<AppState>) -> Router {
    Router::new()
        .route("/instances", get(list_instances))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/moves", post(post_move))
        .route("/sessions/{id}/whatif", post(post_whatif))
        .fallback(not_found)
        .with_state(app)
}

pub async fn serve(config: ServiceConfig, port: u16) -> std::io::Result<()> {
    let app = AppState::open(config)?;
    let addr = SocketAddr::from(([127, 0, 0, 1], port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(app)).await
}

/// Instances bundled with the crate.
pub fn bundled_instances_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/data"))
}
