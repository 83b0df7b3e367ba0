use std::collections::BTreeSet;

use lrc_core::chains::*;
use lrc_core::polytope::{feasible, verify_certificate, LinIneq, LinSystem};
use lrc_core::q;

fn golden(text: &str) -> Vec<WeakChain> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.parse().unwrap())
        .collect()
}

fn forbidden_pairs() -> Vec<WeakChain> {
    [
        "<342||423|000||112>",
        "<342||3423|000||1112>",
        "<324||243|000||112>",
    ]
    .iter()
    .map(|s| s.parse().unwrap())
    .collect()
}

fn constrained() -> ChainConstraints {
    ChainConstraints::default().with_late_first_two_bridge()
}

#[test]
fn weak_one_chains_match_table() {
    let stats = SearchStats::default();
    let found = enumerate_weak_chains(1, &ChainConstraints::default(), &stats).unwrap();
    let want = golden(include_str!("data/weak_1_chains.txt"));
    assert_eq!(want.len(), 44);
    let got: BTreeSet<String> = found.iter().map(|c| c.chain.to_string()).collect();
    let want: BTreeSet<String> = want.iter().map(|c| c.to_string()).collect();
    assert_eq!(got, want);
    for c in &found {
        let sys = weak_chain_system(&c.chain).unwrap();
        verify_certificate(&sys, &c.result).unwrap();
        assert!(c.result.is_feasible());
    }
}

#[test]
fn golden_two_chains_are_admissible_and_satisfy_the_extra_row() {
    let chains = golden(include_str!("data/weak_2_chains_constrained.txt"));
    assert_eq!(chains.len(), 47);
    let row = ChainConstraints::late_first_two_bridge(&q(1, 6));
    for c in &chains {
        c.validate_structure().unwrap();
        let sys = weak_chain_system(c).unwrap().with_row(row.clone()).unwrap();
        let res = feasible(&sys).unwrap();
        verify_certificate(&sys, &res).unwrap();
        assert!(res.is_feasible(), "{c}");
    }
}

#[test]
fn system_of_2434_contains_the_listed_rows() {
    for a in 1..=3i64 {
        let chain: WeakChain = format!("<2434|000{a}>").parse().unwrap();
        let sys = weak_chain_system(&chain).unwrap();
        let listed = [
            "1 - 3*h2 > 0".to_string(),
            "-1 + 3*h4 > 0".to_string(),
            "rho2 + 3*h2 - 3*h4 > 0".to_string(),
            "-rho2 - 3*h2 + 3*h3 > 0".to_string(),
            "rho4 - 3*h3 + 3*h4 > 0".to_string(),
            format!("rho3 - {}*rho4 + 3*h3 - 3*h4 > 0", 3 * a),
            "3 - rho3 - 3*h3 > 0".to_string(),
            format!("-3 + {}*rho4 + 3*h4 > 0", 3 * a + 1),
        ];
        let listed: Vec<LinIneq> = listed.iter().map(|r| r.parse().unwrap()).collect();
        let have: Vec<_> = sys.rows.iter().map(LinIneq::primitive).collect();
        for r in &listed {
            assert!(have.contains(&r.primitive()), "missing {r} for a={a}");
        }
        // every generated row follows from the listed ones and the global rows
        let mut base = LinSystem::new(CHAIN_VARIABLES);
        for r in global_rows().into_iter().chain(listed.iter().cloned()) {
            base.push(r).unwrap();
        }
        for r in &sys.rows {
            let refuted = base.with_row(r.negated()).unwrap();
            let res = feasible(&refuted).unwrap();
            verify_certificate(&refuted, &res).unwrap();
            assert!(!res.is_feasible(), "{r} is not implied for a={a}");
        }
    }
}

#[test]
fn only_small_jumps_of_2434_are_admissible() {
    let admissible = |a: i64| {
        let chain: WeakChain = format!("<2434|000{a}>").parse().unwrap();
        let sys = weak_chain_system(&chain).unwrap();
        let res = feasible(&sys).unwrap();
        verify_certificate(&sys, &res).unwrap();
        res.is_feasible()
    };
    assert!(admissible(1));
    assert!(!admissible(3));
}

#[test]
fn label_graph_matches_figure_up_to_documented_arrows() {
    let graph = label_graph(&labeled_families(), &[]).unwrap();
    let computed: BTreeSet<(String, String)> = graph.edge_names().into_iter().collect();
    let mut expected: BTreeSet<(String, String)> = figure_edges()
        .into_iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    let e = |a: &str, b: &str| (a.to_string(), b.to_string());
    for drawn_only in [e("H", "D"), e("H", "H")] {
        assert!(expected.remove(&drawn_only));
    }
    for computed_only in [e("E", "Γ"), e("H", "O"), e("H", "R")] {
        assert!(expected.insert(computed_only));
    }
    assert_eq!(computed, expected);
    assert_eq!(computed.len(), 64);
}

#[test]
fn arrows_from_h_to_d_and_h_are_structurally_impossible() {
    let fams = labeled_families();
    let family = |l: &str| fams.iter().find(|f| f.label == l).unwrap();
    for x in &family("H").members {
        for target in ["D", "H"] {
            for y in &family(target).members {
                // the middle block of H never equals the first block of D or H
                assert_ne!(x.blocks[1].indices, y.blocks[0].indices, "{x} {y}");
                assert!(transfer(x, y, &[]).unwrap().is_none());
            }
        }
    }
}

#[test]
fn forbidden_pairs_are_admissible_on_their_own() {
    let stats = SearchStats::default();
    let found =
        forbidden_subchain_search(&forbidden_pairs(), 2, &ChainConstraints::default(), &stats)
            .unwrap();
    // each forbidden pair is itself admissible
    assert!(!found.is_empty());
    for c in &found {
        let sys = weak_chain_system(&c.chain).unwrap();
        verify_certificate(&sys, &c.result).unwrap();
    }
}

#[test]
fn forbidden_search_at_length_three_is_certified() {
    let stats = SearchStats::default();
    let found =
        forbidden_subchain_search(&forbidden_pairs(), 3, &ChainConstraints::default(), &stats)
            .unwrap();
    for c in &found {
        let sys = weak_chain_system(&c.chain).unwrap();
        verify_certificate(&sys, &c.result).unwrap();
        assert!(c.result.is_feasible());
        let pairs: Vec<String> = forbidden_pairs()
            .iter()
            .map(|p| p.normalized().to_string())
            .collect();
        let contains =
            (0..2).any(|p| pairs.contains(&c.chain.window(p, 2).unwrap().normalized().to_string()));
        assert!(contains, "{}", c.chain);
    }
}

#[test]
fn forbidden_search_at_length_six_is_empty() {
    if std::env::var_os("LRC_LONG").is_none() {
        eprintln!("skipped: set LRC_LONG=1 to run the length-6 search");
        return;
    }
    let stats = SearchStats::default();
    let found =
        forbidden_subchain_search(&forbidden_pairs(), 6, &ChainConstraints::default(), &stats)
            .unwrap();
    assert!(found.is_empty());
}

#[test]
fn prefixes_46_and_47_imply_the_bound() {
    let chains = golden(include_str!("data/weak_2_chains_constrained.txt"));
    let negated: LinIneq = "5*rho3 - 3*rho2 > 0".parse().unwrap();
    let stats = SearchStats::default();
    for prefix in &chains[45..47] {
        assert!(
            implied_inequality_check(prefix, &negated, 6, &constrained(), &stats).unwrap(),
            "{prefix}"
        );
    }
}

#[test]
fn enumeration_is_deterministic() {
    let a =
        enumerate_weak_chains(1, &ChainConstraints::default(), &SearchStats::default()).unwrap();
    let b =
        enumerate_weak_chains(1, &ChainConstraints::default(), &SearchStats::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn blocks_of_constrained_two_chains_are_one_chains() {
    let ones = golden(include_str!("data/weak_1_chains.txt"));
    let twos = golden(include_str!("data/weak_2_chains_constrained.txt"));
    // every block of a constrained 2-chain is an admissible 1-chain
    let ones: BTreeSet<String> = ones.iter().map(|c| c.normalized().to_string()).collect();
    for c in &twos {
        for r in 0..2 {
            let w = c.window(r, 1).unwrap().normalized();
            assert!(ones.contains(&w.to_string()), "{c} block {r}");
        }
    }
}
