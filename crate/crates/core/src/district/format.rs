//! Text format for state instances.
//!
//! ```text
//! # comment
//! [meta]
//! name = six_county
//! party_a = Red
//! party_b = Blue
//! grid: 3x2
//!
//! [atoms]
//! # id name population votes_a votes_b [other=N] [x=F y=F]
//! 0 TL 1 1 0
//!
//! [edges]
//! 0 1          # undirected pair
//! 2: 0 3 4     # adjacency list; must be reciprocated
//!
//! [constraints]
//! k = 2
//! balance = exact            # or: balance = deviation 0.10
//! contiguity = true
//! ```
//!
//! `grid: RxC` (rows by columns) creates `R*C` atoms numbered row-major with
//! population 1, no votes and rook adjacency; `[atoms]` lines then override
//! individual atoms. Atoms in `[edges]` may be given by id or by name.

use std::path::Path;

use super::{Atom, Balance, Constraints, DistrictError, StateGraph};

#[derive(Debug, Clone, PartialEq)]
pub struct StateInstance {
    pub name: String,
    pub graph: StateGraph,
    pub constraints: Constraints,
    /// Display names of party A and party B.
    pub parties: [String; 2],
    pub grid: Option<(usize, usize)>,
}

pub fn ingest_state(path: impl AsRef<Path>) -> Result<StateInstance, DistrictError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| DistrictError::Io(format!("{}: {e}", path.display())))?;
    let mut inst = parse_state(&text)?;
    if inst.name.is_empty() {
        inst.name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    }
    Ok(inst)
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Meta,
    Atoms,
    Edges,
    Constraints,
}

pub fn parse_state(text: &str) -> Result<StateInstance, DistrictError> {
    let mut section = Section::None;
    let mut name = String::new();
    let mut parties = ["A".to_string(), "B".to_string()];
    let mut grid: Option<(usize, usize)> = None;
    let mut atom_lines: Vec<(usize, Atom)> = Vec::new();
    let mut edge_lines: Vec<(usize, String)> = Vec::new();
    let mut k = None;
    let mut balance = None;
    let mut contiguity = true;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let perr = |message: String| DistrictError::Parse { line: line_no, message };
        if line.starts_with('[') {
            section = match line {
                "[meta]" => Section::Meta,
                "[atoms]" => Section::Atoms,
                "[edges]" => Section::Edges,
                "[constraints]" => Section::Constraints,
                other => return Err(perr(format!("unknown section {other}"))),
            };
            continue;
        }
        if let Some(spec) = line.strip_prefix("grid:") {
            grid = Some(parse_grid(spec.trim()).ok_or_else(|| perr(format!("bad grid spec {:?}", spec.trim())))?);
            continue;
        }
        match section {
            Section::None => return Err(perr("content outside any section".into())),
            Section::Meta => {
                let (key, value) = key_value(line).ok_or_else(|| perr("expected key = value".into()))?;
                match key {
                    "name" => name = value.to_string(),
                    "party_a" => parties[0] = value.to_string(),
                    "party_b" => parties[1] = value.to_string(),
                    other => return Err(perr(format!("unknown meta key {other}"))),
                }
            }
            Section::Atoms => atom_lines.push((line_no, parse_atom(line).map_err(perr)?)),
            Section::Edges => edge_lines.push((line_no, line.to_string())),
            Section::Constraints => {
                let (key, value) = key_value(line).ok_or_else(|| perr("expected key = value".into()))?;
                match key {
                    "k" => k = Some(value.parse::<usize>().map_err(|_| perr(format!("bad k {value:?}")))?),
                    "balance" => balance = Some(parse_balance(value).ok_or_else(|| perr(format!("bad balance {value:?}")))?),
                    "contiguity" => {
                        contiguity = value.parse::<bool>().map_err(|_| perr(format!("bad contiguity {value:?}")))?
                    }
                    other => return Err(perr(format!("unknown constraint {other}"))),
                }
            }
        }
    }

    let mut atoms: Vec<Atom> = Vec::new();
    let mut arcs: Vec<(usize, usize)> = Vec::new();
    if let Some((rows, cols)) = grid {
        for r in 0..rows {
            for c in 0..cols {
                let id = r * cols + c;
                let mut atom = Atom::new(id, format!("r{r}c{c}"), 1, 0, 0);
                atom.coords = Some((c as f64, r as f64));
                atoms.push(atom);
                if c + 1 < cols {
                    arcs.extend([(id, id + 1), (id + 1, id)]);
                }
                if r + 1 < rows {
                    arcs.extend([(id, id + cols), (id + cols, id)]);
                }
            }
        }
        for (line_no, mut atom) in atom_lines {
            let slot = atoms.get_mut(atom.id).ok_or(DistrictError::Parse {
                line: line_no,
                message: format!("atom {} outside the {rows}x{cols} grid", atom.id),
            })?;
            if atom.coords.is_none() {
                atom.coords = slot.coords;
            }
            *slot = atom;
        }
    } else {
        for (line_no, atom) in atom_lines {
            if atom.id != atoms.len() {
                return Err(DistrictError::Parse {
                    line: line_no,
                    message: format!("expected atom id {}, found {}", atoms.len(), atom.id),
                });
            }
            atoms.push(atom);
        }
    }
    let mut names = std::collections::HashSet::new();
    for a in &atoms {
        if !names.insert(a.name.as_str()) {
            return Err(DistrictError::Validation(format!("duplicate atom name {:?}", a.name)));
        }
    }

    let resolve = |tok: &str, line: usize| -> Result<usize, DistrictError> {
        if let Ok(id) = tok.parse::<usize>() {
            return Ok(id);
        }
        atoms.iter().position(|a| a.name == tok).ok_or(DistrictError::Parse {
            line,
            message: format!("unknown atom {tok:?}"),
        })
    };
    for (line_no, line) in &edge_lines {
        if let Some((head, rest)) = line.split_once(':') {
            let from = resolve(head.trim(), *line_no)?;
            for tok in rest.split_whitespace() {
                arcs.push((from, resolve(tok, *line_no)?));
            }
        } else {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 2 {
                return Err(DistrictError::Parse {
                    line: *line_no,
                    message: "edge line needs two atoms or `atom: neighbours`".into(),
                });
            }
            let (a, b) = (resolve(toks[0], *line_no)?, resolve(toks[1], *line_no)?);
            arcs.extend([(a, b), (b, a)]);
        }
    }

    let constraints = Constraints {
        k: k.ok_or_else(|| DistrictError::Validation("constraints: k is required".into()))?,
        balance: balance.ok_or_else(|| DistrictError::Validation("constraints: balance is required".into()))?,
        contiguity,
    };
    let graph = StateGraph::from_arcs(atoms, &arcs)?;
    constraints.validate(graph.len())?;
    Ok(StateInstance { name, graph, constraints, parties, grid })
}

fn key_value(line: &str) -> Option<(&str, &str)> {
    let (k, v) = line.split_once('=')?;
    Some((k.trim(), v.trim()))
}

fn parse_grid(spec: &str) -> Option<(usize, usize)> {
    let (r, c) = spec.split_once(['x', 'X'])?;
    let (r, c) = (r.trim().parse().ok()?, c.trim().parse().ok()?);
    (r > 0 && c > 0 && r * c <= 64).then_some((r, c))
}

fn parse_balance(value: &str) -> Option<Balance> {
    let toks: Vec<&str> = value.split_whitespace().collect();
    match toks.as_slice() {
        ["exact"] => Some(Balance::ExactSize),
        ["deviation", t] => Some(Balance::PopulationDeviation { tolerance: t.parse().ok()? }),
        _ => None,
    }
}

fn parse_atom(line: &str) -> Result<Atom, String> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() < 5 {
        return Err("atom line needs: id name population votes_a votes_b".into());
    }
    let num = |field: &str, s: &str| s.parse::<u64>().map_err(|_| format!("{field}: not a non-negative integer: {s:?}"));
    let mut atom = Atom::new(
        num("id", toks[0])? as usize,
        toks[1],
        num("population", toks[2])?,
        num("votes_a", toks[3])?,
        num("votes_b", toks[4])?,
    );
    let (mut x, mut y) = (None, None);
    for tok in &toks[5..] {
        let (key, value) = tok.split_once('=').ok_or_else(|| format!("expected key=value, found {tok:?}"))?;
        let float = || value.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| format!("{key}: bad number {value:?}"));
        match key {
            "other" => atom.votes_other = num("other", value)?,
            "x" => x = Some(float()?),
            "y" => y = Some(float()?),
            _ => return Err(format!("unknown atom field {key:?}")),
        }
    }
    match (x, y) {
        (Some(x), Some(y)) => atom.coords = Some((x, y)),
        (None, None) => {}
        _ => return Err("x and y must be given together".into()),
    }
    Ok(atom)
}
