use std::sync::Arc;

use axum::http::StatusCode;
use serde::{Deserialize, Serialize};
use serde_json::json;
use uuid::Uuid;

use super::error::ApiError;
use crate::district::{
    enumerate_maps, parse_state, Assign, DistrictLanguage, Districting, IllegalReason, Party, SeatCount, StateInstance,
};
use crate::engine::{GameValue, Language, Player, Solver};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Controller {
    Human,
    Engine,
}

/// What the store keeps: enough to rebuild the session from scratch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub id: Uuid,
    pub instance_name: String,
    /// The instance in the state-file format, copied at creation.
    pub instance_text: String,
    /// Party of player 1.
    pub first_party: Party,
    /// Controller of player 1 and player 2.
    pub controllers: [Controller; 2],
    pub prefix: Vec<Assign>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomView {
    pub id: usize,
    pub name: String,
    pub population: u64,
    pub votes_a: u64,
    pub votes_b: u64,
    pub coords: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceView {
    pub name: String,
    /// Display names of party A and party B.
    pub parties: [String; 2],
    pub k: usize,
    pub grid: Option<(usize, usize)>,
    pub atoms: Vec<AtomView>,
    pub edges: Vec<(usize, usize)>,
    pub admissible_maps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlayedMove {
    pub player: u8,
    pub atom: usize,
    pub district: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Projection {
    /// Seats of player 1's and player 2's party under optimal play.
    pub u1: f64,
    pub u2: f64,
    pub principal_move: Option<Assign>,
}

impl From<GameValue<Assign>> for Projection {
    fn from(v: GameValue<Assign>) -> Self {
        Self { u1: v.u1, u2: v.u2, principal_move: v.principal_move }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameResult {
    pub seats: SeatCount,
    /// Atom ids per district, districts numbered as played.
    pub districts: Vec<Vec<usize>>,
}

/// Everything `GET /sessions/{id}` returns, computed when the session last
/// changed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionView {
    pub id: Uuid,
    pub instance: InstanceView,
    pub first_party: Party,
    pub controllers: [Controller; 2],
    pub prefix: Vec<PlayedMove>,
    /// District of each atom, `null` while unassigned.
    pub board: Vec<Option<usize>>,
    pub status: &'static str,
    /// 1 or 2; absent once finished.
    pub mover: Option<u8>,
    pub mover_party: Option<Party>,
    pub legal_moves: Vec<Assign>,
    pub result: Option<GameResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projection: Option<Projection>,
}

/// Live session: the record plus the language built from it.
pub struct Session {
    pub record: SessionRecord,
    instance: StateInstance,
    lang: Arc<DistrictLanguage>,
    maps: usize,
}

pub fn invalid_instance(message: impl Into<String>) -> ApiError {
    ApiError::bad_request("invalid_instance", message)
}

fn illegal(reason: IllegalReason, mv: Assign) -> ApiError {
    ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "illegal_move", format!("{mv} is illegal: {reason}"))
        .with_detail(json!({ "reason": reason.to_string(), "atom": mv.atom, "district": mv.district }))
}

impl Session {
    /// Build the language for a record and replay its prefix.
    pub fn restore(record: SessionRecord) -> Result<Self, ApiError> {
        let instance = parse_state(&record.instance_text).map_err(|e| invalid_instance(e.to_string()))?;
        let maps: Vec<Districting> =
            enumerate_maps(&instance.graph, &instance.constraints).map_err(|e| invalid_instance(e.to_string()))?;
        let lang = DistrictLanguage::new(&maps, instance.graph.atoms(), instance.constraints.k, record.first_party);
        for (i, &mv) in record.prefix.iter().enumerate() {
            let reason = lang.explain(&record.prefix[..i], mv).map_err(|e| ApiError::internal(e.to_string()))?;
            if let Some(reason) = reason {
                return Err(ApiError::internal(format!("stored move {i} {mv} is illegal: {reason}")));
            }
        }
        Ok(Self { record, instance, lang: Arc::new(lang), maps: maps.len() })
    }

    pub fn lang(&self) -> &Arc<DistrictLanguage> {
        &self.lang
    }

    pub fn mover(&self) -> Option<Player> {
        (!self.is_finished()).then(|| Player::to_move(self.record.prefix.len()))
    }

    pub fn is_finished(&self) -> bool {
        self.record.prefix.len() == self.instance.graph.len()
    }

    fn controller(&self, p: Player) -> Controller {
        self.record.controllers[p.number() as usize - 1]
    }

    /// Let the engine move while it holds the turn.
    pub fn run_engine(&mut self, solver: &mut Solver<DistrictLanguage>) -> Result<Vec<PlayedMove>, ApiError> {
        let mut played = Vec::new();
        while let Some(p) = self.mover() {
            if self.controller(p) != Controller::Engine {
                break;
            }
            let mv = solver.best_move(&self.lang, &self.record.prefix).map_err(|e| ApiError::internal(e.to_string()))?;
            self.record.prefix.push(mv);
            played.push(PlayedMove { player: p.number(), atom: mv.atom, district: mv.district });
        }
        Ok(played)
    }

    /// A human move, then any engine replies.
    pub fn play(
        &mut self,
        mv: Assign,
        as_player: Option<u8>,
        solver: &mut Solver<DistrictLanguage>,
    ) -> Result<Vec<PlayedMove>, ApiError> {
        let p = self.mover().ok_or_else(|| ApiError::conflict("game_over", "the game is finished"))?;
        if self.controller(p) == Controller::Engine || as_player.is_some_and(|n| n != p.number()) {
            return Err(ApiError::conflict("not_your_turn", format!("it is {p}'s turn"))
                .with_detail(json!({ "mover": p.number() })));
        }
        self.check(mv)?;
        self.record.prefix.push(mv);
        let mut played = vec![PlayedMove { player: p.number(), atom: mv.atom, district: mv.district }];
        played.extend(self.run_engine(solver)?);
        Ok(played)
    }

    fn check(&self, mv: Assign) -> Result<(), ApiError> {
        match self.lang.explain(&self.record.prefix, mv).map_err(|e| ApiError::internal(e.to_string()))? {
            Some(reason) => Err(illegal(reason, mv)),
            None => Ok(()),
        }
    }

    pub fn view(&self, solver: &mut Solver<DistrictLanguage>) -> Result<SessionView, ApiError> {
        let internal = |e: crate::engine::GhostError| ApiError::internal(e.to_string());
        let g = &self.instance.graph;
        let mut board = vec![None; g.len()];
        let mut prefix = Vec::with_capacity(self.record.prefix.len());
        for (i, a) in self.record.prefix.iter().enumerate() {
            board[a.atom] = Some(a.district);
            prefix.push(PlayedMove { player: Player::to_move(i).number(), atom: a.atom, district: a.district });
        }
        let mover = self.mover();
        let result = if self.is_finished() {
            let seats = self.lang.word_seats(&self.record.prefix).map_err(internal)?;
            let mut districts = vec![Vec::new(); self.instance.constraints.k];
            for (atom, d) in board.iter().enumerate() {
                districts[d.expect("finished board is full")].push(atom);
            }
            Some(GameResult { seats, districts })
        } else {
            None
        };
        let party = |p: Player| match p {
            Player::First => self.record.first_party,
            Player::Second => self.record.first_party.other(),
        };
        Ok(SessionView {
            id: self.record.id,
            instance: InstanceView {
                name: self.record.instance_name.clone(),
                parties: self.instance.parties.clone(),
                k: self.instance.constraints.k,
                grid: self.instance.grid,
                atoms: g
                    .atoms()
                    .iter()
                    .map(|a| AtomView {
                        id: a.id,
                        name: a.name.clone(),
                        population: a.population,
                        votes_a: a.votes_a,
                        votes_b: a.votes_b,
                        coords: a.coords,
                    })
                    .collect(),
                edges: g.edges(),
                admissible_maps: self.maps,
            },
            first_party: self.record.first_party,
            controllers: self.record.controllers,
            prefix,
            board,
            status: if self.is_finished() { "finished" } else { "in_progress" },
            mover: mover.map(Player::number),
            mover_party: mover.map(party),
            legal_moves: self.lang.legal_moves(&self.record.prefix).map_err(internal)?,
            result,
            projection: Some(solver.solve(&self.lang, &self.record.prefix).map_err(internal)?.into()),
        })
    }
}

/// Value after a hypothetical move from `prefix`; nothing is mutated.
pub fn whatif(
    lang: &DistrictLanguage,
    prefix: &[Assign],
    mv: Assign,
    solver: &mut Solver<DistrictLanguage>,
) -> Result<Projection, ApiError> {
    if let Some(reason) = lang.explain(prefix, mv).map_err(|e| ApiError::internal(e.to_string()))? {
        return Err(illegal(reason, mv));
    }
    let mut next = prefix.to_vec();
    next.push(mv);
    Ok(solver.solve(lang, &next).map_err(|e| ApiError::internal(e.to_string()))?.into())
}
