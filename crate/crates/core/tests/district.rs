mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use utility_ghost::district::{
    enumerate_maps, ingest_state, is_admissible, parse_state, seats, Assign, Atom, Balance, Constraints, DistrictError,
    DistrictLanguage, Districting, IllegalReason, Party, StateGraph,
};
use utility_ghost::engine::Language;

fn assignments(maps: &[Districting]) -> BTreeSet<Vec<usize>> {
    maps.iter().map(|m| m.assignment().to_vec()).collect()
}

#[test]
fn grid_2x3_has_three_maps() {
    let inst = ingest_state(common::data("six_county.state")).unwrap();
    let maps = enumerate_maps(&inst.graph, &inst.constraints).unwrap();
    assert_eq!(maps.len(), 3);
    assert_eq!(assignments(&maps), common::oracle_maps(&inst.graph, &inst.constraints));
    for m in &maps {
        assert!(is_admissible(&inst.graph, &inst.constraints, m));
    }
    // Column split plus the two L shapes.
    let parts: BTreeSet<Vec<Vec<usize>>> = maps.iter().map(|m| m.parts()).collect();
    assert!(parts.contains(&vec![vec![0, 2, 4], vec![1, 3, 5]]));
    assert!(parts.contains(&vec![vec![0, 1, 2], vec![3, 4, 5]]));
    assert!(parts.contains(&vec![vec![0, 1, 3], vec![2, 4, 5]]));
}

#[test]
fn grid_2x3_word_count() {
    let inst = ingest_state(common::data("six_county.state")).unwrap();
    assert_eq!(common::brute_force_word_count(&inst.graph, &inst.constraints), 4320);
    let maps = enumerate_maps(&inst.graph, &inst.constraints).unwrap();
    let lang = DistrictLanguage::new(&maps, inst.graph.atoms(), 2, Party::A);
    assert_eq!(lang.labeled_maps(), 6);
}

#[test]
fn six_county_prefix_rules_out_a_shared_district() {
    let inst = ingest_state(common::data("six_county.state")).unwrap();
    let maps = enumerate_maps(&inst.graph, &inst.constraints).unwrap();
    let lang = DistrictLanguage::new(&maps, inst.graph.atoms(), 2, Party::A);
    let (tl, bl, br) = (0, 4, 5);
    let prefix = [Assign::new(tl, 0), Assign::new(bl, 1)];
    let legal = lang.legal_moves(&prefix).unwrap();
    assert!(!legal.contains(&Assign::new(br, 0)));
    assert!(legal.contains(&Assign::new(br, 1)));
    assert_eq!(lang.explain(&prefix, Assign::new(br, 0)).unwrap(), Some(IllegalReason::NoAdmissibleCompletion));
    assert_eq!(lang.explain(&prefix, Assign::new(tl, 1)).unwrap(), Some(IllegalReason::AtomTaken));
    assert_eq!(lang.explain(&prefix, Assign::new(9, 0)).unwrap(), Some(IllegalReason::AtomOutOfRange));
    assert_eq!(lang.explain(&prefix, Assign::new(1, 2)).unwrap(), Some(IllegalReason::DistrictOutOfRange));
    // Every legal move keeps a completion alive.
    for mv in legal {
        let mut p = prefix.to_vec();
        p.push(mv);
        assert!(lang.completion(&p).is_ok());
    }
}

#[test]
fn decomino_seven_maps_separate_the_corners() {
    let inst = ingest_state(common::data("decomino.state")).unwrap();
    let maps = enumerate_maps(&inst.graph, &inst.constraints).unwrap();
    assert_eq!(maps.len(), 7);
    assert_eq!(assignments(&maps), common::oracle_maps(&inst.graph, &inst.constraints));
    let tr = inst.graph.atom_by_name("TR").unwrap();
    let bl = inst.graph.atom_by_name("BL").unwrap();
    for m in &maps {
        assert_ne!(m.district_of(tr), m.district_of(bl));
    }
}

#[test]
fn nh_counties_match_the_oracle() {
    let inst = ingest_state(common::data("nh_counties.state")).unwrap();
    assert_eq!(inst.graph.len(), 10);
    let maps = enumerate_maps(&inst.graph, &inst.constraints).unwrap();
    assert_eq!(assignments(&maps), common::oracle_maps(&inst.graph, &inst.constraints));
    // With true county borders and 2010 populations the strict 10% rule
    // admits ten maps.
    assert_eq!(maps.len(), 10);
    let two_zero = maps.iter().filter(|m| seats(m, inst.graph.atoms()).seats_a == 2).count();
    assert_eq!(two_zero, 1);
}

#[test]
fn ingest_rejects_bad_files() {
    let asym = "[atoms]\n0 a 1 0 0\n1 b 1 0 0\n2 c 1 0 0\n[edges]\n0: 1\n1: 2\n2: 1\n[constraints]\nk = 2\nbalance = exact\n";
    assert!(matches!(parse_state(asym), Err(DistrictError::Validation(m)) if m.contains("not symmetric")));
    let disconnected = "[atoms]\n0 a 1 0 0\n1 b 1 0 0\n[constraints]\nk = 1\nbalance = exact\n";
    assert!(matches!(parse_state(disconnected), Err(DistrictError::Validation(m)) if m.contains("not connected")));
    let no_k = "[atoms]\n0 a 1 0 0\n[constraints]\nbalance = exact\n";
    assert!(matches!(parse_state(no_k), Err(DistrictError::Validation(_))));
    assert!(matches!(parse_state("[bogus]\n"), Err(DistrictError::Parse { line: 1, .. })));
    assert!(matches!(ingest_state("/nonexistent/x.state"), Err(DistrictError::Io(_))));
}

#[test]
fn impossible_constraints_have_no_maps() {
    let text = "grid: 1x3\n[constraints]\nk = 2\nbalance = deviation 0.01\n";
    let inst = parse_state(text).unwrap();
    assert_eq!(enumerate_maps(&inst.graph, &inst.constraints), Err(DistrictError::NoAdmissibleMap));
}

fn small_graph() -> impl Strategy<Value = (StateGraph, Constraints)> {
    (3usize..=8)
        .prop_flat_map(|n| {
            let extra = proptest::collection::vec((0..n, 0..n), 0..n * 2);
            let pops = proptest::collection::vec(1u64..20, n);
            let votes = proptest::collection::vec((0u64..5, 0u64..5), n);
            (Just(n), extra, pops, votes, 1usize..=3, prop_oneof![Just(None), (1u32..8).prop_map(Some)], any::<bool>())
        })
        .prop_map(|(n, extra, pops, votes, k, tol, contiguity)| {
            // A path keeps the graph connected; extra chords vary the shape.
            let mut edges: BTreeSet<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
            for (a, b) in extra {
                if a != b {
                    edges.insert((a.min(b), a.max(b)));
                }
            }
            let atoms =
                (0..n).map(|i| Atom::new(i, format!("a{i}"), pops[i], votes[i].0, votes[i].1)).collect::<Vec<_>>();
            let edges: Vec<_> = edges.into_iter().collect();
            let graph = StateGraph::new(atoms, &edges).unwrap();
            let balance = match tol {
                Some(t) => Balance::PopulationDeviation { tolerance: t as f64 / 8.0 },
                None if n % k == 0 => Balance::ExactSize,
                None => Balance::PopulationDeviation { tolerance: 0.5 },
            };
            (graph, Constraints { k, balance, contiguity })
        })
}

proptest! {
    #[test]
    fn enumeration_matches_exhaustive_colouring((graph, c) in small_graph()) {
        let oracle = common::oracle_maps(&graph, &c);
        match enumerate_maps(&graph, &c) {
            Ok(maps) => {
                prop_assert_eq!(maps.len(), oracle.len());
                prop_assert_eq!(assignments(&maps), oracle);
            }
            Err(DistrictError::NoAdmissibleMap) => prop_assert!(oracle.is_empty()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn colour_swap_swaps_seats((graph, c) in small_graph()) {
        let swapped = graph.color_swapped();
        if let Ok(maps) = enumerate_maps(&graph, &c) {
            for m in &maps {
                let s = seats(m, graph.atoms());
                let t = seats(m, swapped.atoms());
                prop_assert_eq!((s.seats_a, s.seats_b, s.ties), (t.seats_b, t.seats_a, t.ties));
            }
        }
    }

    #[test]
    fn every_legal_prefix_completes((graph, c) in small_graph(), picks in proptest::collection::vec(any::<prop::sample::Index>(), 8)) {
        let Ok(maps) = enumerate_maps(&graph, &c) else { return Ok(()) };
        let lang = DistrictLanguage::new(&maps, graph.atoms(), c.k, Party::A);
        let mut prefix = Vec::new();
        for pick in picks {
            let moves = lang.legal_moves(&prefix).unwrap();
            if moves.is_empty() {
                let seats_now = lang.word_seats(&prefix).unwrap();
                let m = Districting::from_assignment(&lang.completion(&prefix).unwrap());
                prop_assert_eq!(seats_now, seats(&m, graph.atoms()));
                break;
            }
            prefix.push(*pick.get(&moves));
            prop_assert!(lang.completion(&prefix).is_ok());
        }
    }
}
