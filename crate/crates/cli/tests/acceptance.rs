//! One status line per acceptance criterion: PASS, FAIL or DEVIATION.
//!
//! Runs without the test harness so the lines always reach stdout. Long
//! runs are gated by `LRC_LONG=1`; gated criteria report DEVIATION with the
//! reason. Exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::Instant;

use lrc_core::analysis::{self, RunnerInstance};
use lrc_core::chains::*;
use lrc_core::geometry::{self, CoveringConfig};
use lrc_core::polytope::{verify_certificate, LinIneq};
use lrc_core::treecover::{self, CompactRegion, CoverOptions, Sampling};
use lrc_core::{q, Rational};
use rand::{rngs::StdRng, Rng, SeedableRng};

enum Status {
    Pass,
    Fail,
    Deviation,
}

struct Report {
    failed: bool,
}

impl Report {
    fn line(&mut self, n: usize, status: Status, detail: String) {
        let tag = match status {
            Status::Pass => "PASS",
            Status::Fail => {
                self.failed = true;
                "FAIL"
            }
            Status::Deviation => "DEVIATION",
        };
        println!("criterion {n:>2}: {tag} {detail}");
    }

    fn check(&mut self, n: usize, ok: bool, detail: String) {
        self.line(n, if ok { Status::Pass } else { Status::Fail }, detail);
    }
}

fn long_runs() -> bool {
    std::env::var_os("LRC_LONG").is_some()
}

fn golden(name: &str) -> Vec<WeakChain> {
    let path = format!("{}/../core/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.parse().unwrap())
        .collect()
}

fn canonical_lines(chains: &[WeakChain]) -> BTreeSet<String> {
    chains.iter().map(|c| c.to_string()).collect()
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

/// Re-verifies every result against its own system plus `extra`.
fn all_certified(found: &[EnumeratedChain], extra: &[LinIneq]) -> bool {
    found.iter().all(|c| {
        let mut sys = weak_chain_system(&c.chain).unwrap();
        sys.rows.extend(extra.iter().cloned());
        verify_certificate(&sys, &c.result).is_ok()
    })
}

fn secs(t: Instant) -> String {
    format!("{:.1}s", t.elapsed().as_secs_f64())
}

fn main() {
    let mut r = Report { failed: false };
    let mut certified = Vec::new();
    let mut stats_ok = Vec::new();

    // 1: weak 1-chains through the command-line tool
    let t = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_lrc"))
        .args(["chains-enumerate", "--L", "1"])
        .output()
        .unwrap();
    let printed: BTreeSet<String> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(String::from)
        .collect();
    let want = canonical_lines(&golden("weak_1_chains.txt"));
    r.check(
        1,
        out.status.success() && printed == want,
        format!(
            "{} chains, table has {} ({})",
            printed.len(),
            want.len(),
            secs(t)
        ),
    );
    let stats = SearchStats::default();
    let ones = enumerate_weak_chains(1, &ChainConstraints::default(), &stats).unwrap();
    certified.push(all_certified(&ones, &[]));
    stats_ok.push(
        stats.certificates_verified() == stats.feasibility_checks() + stats.witnesses_reused(),
    );

    // 2: weak 3-chains
    let t = Instant::now();
    let stats = SearchStats::default();
    let threes = enumerate_weak_chains(3, &ChainConstraints::default(), &stats).unwrap();
    r.check(
        2,
        threes.len() == 438,
        format!("{} chains ({})", threes.len(), secs(t)),
    );
    certified.push(all_certified(&threes, &[]));
    stats_ok.push(
        stats.certificates_verified() == stats.feasibility_checks() + stats.witnesses_reused(),
    );

    // 3: constrained weak 2-chains
    let t = Instant::now();
    let stats = SearchStats::default();
    let late = ChainConstraints::late_first_two_bridge(&q(1, 6));
    let constraints = ChainConstraints::default()
        .with_late_first_two_bridge()
        .extendable_to(6);
    let twos = enumerate_weak_chains(2, &constraints, &stats).unwrap();
    let got = canonical_lines(&twos.iter().map(|c| c.chain.clone()).collect::<Vec<_>>());
    let want = canonical_lines(&golden("weak_2_chains_constrained.txt"));
    r.check(
        3,
        got == want,
        format!(
            "{} chains, table has {} ({})",
            got.len(),
            want.len(),
            secs(t)
        ),
    );
    certified.push(all_certified(&twos, std::slice::from_ref(&late)));
    stats_ok.push(
        stats.certificates_verified() == stats.feasibility_checks() + stats.witnesses_reused(),
    );

    // 4: label transfer graph against the reference arrow list
    let t = Instant::now();
    let graph = label_graph(&labeled_families(), &[]).unwrap();
    let computed: BTreeSet<(String, String)> = graph.edge_names().into_iter().collect();
    let drawn: BTreeSet<(String, String)> = figure_edges()
        .into_iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    let extra: Vec<String> = computed
        .difference(&drawn)
        .map(|(a, b)| format!("{a}->{b}"))
        .collect();
    let missing: Vec<String> = drawn
        .difference(&computed)
        .map(|(a, b)| format!("{a}->{b}"))
        .collect();
    let documented = extra == ["E->Γ", "H->O", "H->R"] && missing == ["H->D", "H->H"];
    let detail = format!(
        "{} computed arrows, {} drawn; computed only {:?}, drawn only {:?} ({})",
        computed.len(),
        drawn.len(),
        extra,
        missing,
        secs(t)
    );
    match (extra.is_empty() && missing.is_empty(), documented) {
        (true, _) => r.line(4, Status::Pass, detail),
        (false, true) => r.line(
            4,
            Status::Deviation,
            format!("{detail}; reference arrows differ as documented"),
        ),
        _ => r.line(4, Status::Fail, detail),
    }

    // 5: forbidden subchains
    let t = Instant::now();
    let stats = SearchStats::default();
    let len = if long_runs() { 6 } else { 3 };
    let found = forbidden_subchain_search(
        &forbidden_pairs(),
        len,
        &ChainConstraints::default(),
        &stats,
    )
    .unwrap();
    certified.push(all_certified(&found, &[]));
    stats_ok.push(
        stats.certificates_verified() == stats.feasibility_checks() + stats.witnesses_reused(),
    );
    if long_runs() {
        r.check(
            5,
            found.is_empty(),
            format!("length 6: {} chains ({})", found.len(), secs(t)),
        );
    } else {
        r.line(
            5,
            Status::Deviation,
            format!(
                "gated: length 6 needs LRC_LONG=1; ran length 3 instead, {} chains ({})",
                found.len(),
                secs(t)
            ),
        );
    }

    // 6: implied inequality for the last two constrained chains
    let t = Instant::now();
    let stats = SearchStats::default();
    let table = golden("weak_2_chains_constrained.txt");
    let negated: LinIneq = "5*rho3 - 3*rho2 > 0".parse().unwrap();
    let base = ChainConstraints::default().with_late_first_two_bridge();
    let implied = table[45..47]
        .iter()
        .all(|p| implied_inequality_check(p, &negated, 6, &base, &stats).unwrap());
    stats_ok.push(
        stats.certificates_verified() == stats.feasibility_checks() + stats.witnesses_reused(),
    );
    r.check(6, implied, format!("prefixes 46 and 47 ({})", secs(t)));

    // 7: small-dimensional coverings
    let t = Instant::now();
    let cases = [
        (1, q(1, 3), q(100, 1)),
        (2, q(1, 4), q(6, 1)),
        (3, q(1, 5), q(4, 1)),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (d, delta, c) in cases {
        let config = CoveringConfig::with_delta(d, 1, delta).unwrap();
        let rep =
            treecover::verify_cover(&CompactRegion::cube(d, c.clone()).unwrap(), &config).unwrap();
        ok &= rep.covered && !rep.heuristic;
        parts.push(format!("d={d} [1,{c}]: {} nodes", rep.totals.nodes));
    }
    r.check(7, ok, format!("{} ({})", parts.join(", "), secs(t)));

    // 8: four runners need two rounds
    let t = Instant::now();
    let eps = [q(1, 1000), q(3, 1000), q(2, 1000), q(4, 1000)];
    let rep = analysis::counterexample_verify(&eps).unwrap();
    r.check(
        8,
        rep.separates(),
        format!(
            "one round {}, two rounds witness {:?} ({})",
            rep.residual_one_round,
            rep.witness_two_rounds.map(|w| w.to_string()),
            secs(t)
        ),
    );

    // 9: six runners
    let t = Instant::now();
    let speeds = [10285, 26740, 35319, 46187, 61005]
        .map(|v| q(v, 1))
        .to_vec();
    let inst = RunnerInstance::classic(speeds, q(1, 6), q(1, 8000));
    let w = analysis::loneliness_windows(&inst).unwrap();
    let early = w.intersect(&lrc_core::IntervalSet::open(q(0, 1), q(1, 10285)));
    r.check(
        9,
        early.is_empty() && w.contains(&q(5, 41140)),
        format!(
            "windows start at {:?} ({})",
            w.min().map(|x| x.to_string()),
            secs(t)
        ),
    );

    // 10: measure suite
    let t = Instant::now();
    let value = analysis::k0_measure(&q(5, 1), &q(1, 6)).unwrap().measure;
    let mut rng = StdRng::seed_from_u64(10);
    let mut violations = 0;
    for _ in 0..10_000 {
        let delta = q(rng.gen_range(1..=100), 300).min(q(1, 3));
        let z = q(rng.gen_range(1000..=50_000), 1000);
        let m = analysis::k0_measure(&z, &delta).unwrap();
        if m.measure > m.bound {
            violations += 1;
        }
    }
    let tight = (3..=12).all(|k| {
        let m = analysis::k0_measure(&q(k - 1, 1), &q(1, k)).unwrap();
        m.measure == m.bound
    });
    r.check(
        10,
        value == q(4, 15) && violations == 0 && tight,
        format!(
            "M(5) = {value}, {violations} violations, tight for k=3..12 ({})",
            secs(t)
        ),
    );

    // 11: the three membership tests agree
    let t = Instant::now();
    let mut disagreements = 0;
    let mut rng = StdRng::seed_from_u64(11);
    for d in 1..=4usize {
        for rounds in 1..=2 {
            let config = CoveringConfig::new(d, rounds).unwrap();
            let max = if d == 4 { 36 } else { 96 };
            for _ in 0..1000 {
                let z: Vec<Rational> = (0..d)
                    .map(|_| {
                        let den = rng.gen_range(1..=12);
                        q(rng.gen_range(den..=max * den / 12), den)
                    })
                    .collect();
                let a = !geometry::membership_residual(&z, &config)
                    .unwrap()
                    .is_empty();
                let b = geometry::beam_lattice_point(&z, &config).unwrap().is_some();
                let c = geometry::find_feather(&z, &config).unwrap().is_some();
                if a != b || b != c {
                    disagreements += 1;
                }
            }
        }
    }
    r.check(
        11,
        disagreements == 0,
        format!("8000 points, {disagreements} disagreements ({})", secs(t)),
    );

    // 12: certificates of criteria 1-6
    let all = certified.iter().all(|x| *x) && stats_ok.iter().all(|x| *x);
    r.check(12, all, format!("stored results re-verified for {} searches; every search verdict checked when produced", certified.len()));

    // 13: four-dimensional tree
    let t = Instant::now();
    let two_rounds = treecover::verify_cover(
        &CompactRegion::cube(4, q(31, 5)).unwrap(),
        &CoveringConfig::new(4, 2).unwrap(),
    )
    .unwrap();
    let detail = format!(
        "[1,31/5]^4 with two rounds: covered={} in {}",
        two_rounds.covered,
        secs(t)
    );
    if long_runs() {
        let t = Instant::now();
        let region = CompactRegion::four_dim_compact_part().excluding_open_cube(q(31, 5));
        let opts = CoverOptions {
            sampling: Some(Sampling {
                fraction: 0.01,
                seed: 1,
            }),
            checkpoint: None,
        };
        let rep = treecover::verify_cover_with(&region, &CoveringConfig::new(4, 1).unwrap(), &opts)
            .unwrap();
        r.check(
            13,
            two_rounds.covered && rep.covered,
            format!(
                "{detail}; one-round sample {}/{} subtrees, {} leaves, {} failing ({})",
                rep.subtrees_visited.len(),
                rep.subtrees_total,
                rep.totals.leaves,
                rep.totals.failing.len(),
                secs(t)
            ),
        );
    } else if two_rounds.covered {
        r.line(13, Status::Deviation, format!("gated: the 1% one-round sample needs LRC_LONG=1 (about 10 min per subtree); {detail}"));
    } else {
        r.line(13, Status::Fail, detail);
    }

    if r.failed {
        std::process::exit(1);
    }
}
