//! Independent oracles shared by the integration tests. Nothing here calls
//! into the enumeration or the solver under test.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::PathBuf;

use utility_ghost::district::{Balance, Constraints, StateGraph};

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

/// Every k-colouring of the atoms as a restricted growth string (labels
/// appear in order of first use), filtered by contiguity and balance.
pub fn oracle_maps(graph: &StateGraph, c: &Constraints) -> BTreeSet<Vec<usize>> {
    let n = graph.len();
    let mut out = BTreeSet::new();
    let mut a = vec![0usize; n];
    rgs(graph, c, 0, 0, &mut a, &mut out);
    out
}

fn rgs(graph: &StateGraph, c: &Constraints, i: usize, used: usize, a: &mut Vec<usize>, out: &mut BTreeSet<Vec<usize>>) {
    if i == a.len() {
        if used == c.k && admissible(graph, c, a) {
            out.insert(a.clone());
        }
        return;
    }
    for d in 0..(used + 1).min(c.k) {
        a[i] = d;
        rgs(graph, c, i + 1, used.max(d + 1), a, out);
    }
}

fn admissible(graph: &StateGraph, c: &Constraints, a: &[usize]) -> bool {
    let atoms = graph.atoms();
    let n = a.len();
    for d in 0..c.k {
        let members: Vec<usize> = (0..n).filter(|&i| a[i] == d).collect();
        if members.is_empty() {
            return false;
        }
        if c.contiguity {
            let mut seen = vec![false; n];
            let mut queue = VecDeque::from([members[0]]);
            seen[members[0]] = true;
            let mut reached = 1;
            while let Some(u) = queue.pop_front() {
                for &v in graph.neighbors(u) {
                    if a[v] == d && !seen[v] {
                        seen[v] = true;
                        reached += 1;
                        queue.push_back(v);
                    }
                }
            }
            if reached != members.len() {
                return false;
            }
        }
    }
    match c.balance {
        Balance::ExactSize => (0..c.k).all(|d| a.iter().filter(|&&x| x == d).count() * c.k == n),
        Balance::PopulationDeviation { tolerance } => {
            let mut pops = vec![0u64; c.k];
            for (i, &d) in a.iter().enumerate() {
                pops[d] += atoms[i].population;
            }
            let total: u64 = pops.iter().sum();
            let spread = pops.iter().max().unwrap() - pops.iter().min().unwrap();
            (spread as f64) < tolerance * total as f64
        }
    }
}

/// Number of words of the redistricting language: orderings of distinct
/// atoms with a district each whose induced labelled map is admissible.
/// Counted by walking every sequence, not by formula.
pub fn brute_force_word_count(graph: &StateGraph, c: &Constraints) -> usize {
    let maps = oracle_maps(graph, c);
    let labeled: BTreeSet<Vec<usize>> = maps
        .iter()
        .flat_map(|m| permutations(c.k).into_iter().map(move |p| m.iter().map(|&d| p[d]).collect::<Vec<_>>()))
        .collect();
    let n = graph.len();
    let mut board = vec![usize::MAX; n];
    count_sequences(&labeled, c.k, &mut board, 0)
}

fn count_sequences(labeled: &BTreeSet<Vec<usize>>, k: usize, board: &mut Vec<usize>, placed: usize) -> usize {
    if placed == board.len() {
        return usize::from(labeled.contains(board));
    }
    let mut total = 0;
    for atom in 0..board.len() {
        if board[atom] != usize::MAX {
            continue;
        }
        for d in 0..k {
            board[atom] = d;
            total += count_sequences(labeled, k, board, placed + 1);
            board[atom] = usize::MAX;
        }
    }
    total
}

pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for i in 0..k {
            let mut q = p.clone();
            q.insert(i, k - 1);
            out.push(q);
        }
    }
    out
}

/// Plain minimax over an explicit word set. A word that has another word as a
/// proper prefix is unreachable and ignored. Returns `(u1, u2, move)`.
pub fn brute_minimax(words: &BTreeMap<String, (f64, f64)>, prefix: &str) -> (f64, f64, Option<char>) {
    let live: Vec<(&String, &(f64, f64))> = words
        .iter()
        .filter(|(w, _)| !words.keys().any(|v| v.len() < w.len() && w.starts_with(v.as_str())))
        .collect();
    minimax(&live, prefix)
}

fn minimax(live: &[(&String, &(f64, f64))], prefix: &str) -> (f64, f64, Option<char>) {
    if let Some((_, &(u1, u2))) = live.iter().find(|(w, _)| w.as_str() == prefix) {
        return (u1, u2, None);
    }
    let next: BTreeSet<char> = live
        .iter()
        .filter(|(w, _)| w.len() > prefix.len() && w.starts_with(prefix))
        .map(|(w, _)| w[prefix.len()..].chars().next().unwrap())
        .collect();
    let first_mover = prefix.chars().count() % 2 == 0;
    let mut best: Option<(f64, f64, char)> = None;
    for c in next {
        let (u1, u2, _) = minimax(live, &format!("{prefix}{c}"));
        let (own, opp) = if first_mover { (u1, u2) } else { (u2, u1) };
        let better = match best {
            None => true,
            Some((b1, b2, _)) => {
                let (bown, bopp) = if first_mover { (b1, b2) } else { (b2, b1) };
                own > bown || (own == bown && opp < bopp)
            }
        };
        if better {
            best = Some((u1, u2, c));
        }
    }
    let (u1, u2, c) = best.expect("prefix of some word");
    (u1, u2, Some(c))
}
