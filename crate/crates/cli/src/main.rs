//! `lrc`: command-line access to every verification in `lrc_core`.
//!
//! Exit status is 0 when the checked statement holds, 1 when it is refuted
//! (a witness is printed), and 2 on usage or input errors.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use lrc_core::analysis::{self, RunnerInstance};
use lrc_core::chains::{self, ChainConstraints, SearchStats, WeakChain};
use lrc_core::geometry::{self, CoveringConfig, FeatherIndex};
use lrc_core::polytope::{self, EliminationOrder, LinIneq, LinSystem};
use lrc_core::treecover::{self, CompactRegion, CoverOptions, Sampling};
use lrc_core::{Error, Rational};

/// Lengths above which the forbidden-subchain search needs `--long`.
const FORBIDDEN_QUICK_LENGTH: usize = 4;

#[derive(Parser, Debug, Serialize)]
#[command(
    name = "lrc",
    version,
    about = "Exact verification toolkit for the lonely runner problem"
)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Worker threads; defaults to LRC_JOBS, then to the number of CPUs.
    #[arg(long, env = "LRC_JOBS", global = true)]
    jobs: Option<usize>,
    /// Allow runs expected to take more than ten minutes.
    #[arg(long, global = true)]
    long: bool,
    /// Also write the run manifest to this file.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Whether z ∈ 𝒦^d(δ)/𝒦_⟦0,N−1⟧(δ), with the residual and a witness.
    Membership(MembershipArgs),
    /// Whether z lies in the feather F_{k,l}(δ).
    Feather(FeatherArgs),
    /// Feasibility of a linear system read from a file ("-" for stdin).
    Polytope(PolytopeArgs),
    /// Admissible weak chains of a given length.
    ChainsEnumerate(EnumerateArgs),
    /// Transfer graph between the labelled weak 2-chains.
    ChainsTransfers(TransfersArgs),
    /// Chains containing one of the forbidden 2-chains.
    ChainsForbidden(ForbiddenArgs),
    /// Tree covering of a compact region.
    Treecover(TreecoverArgs),
    /// The four-runner point separating one and two rounds.
    Counterexample(CounterexampleArgs),
    /// 𝒦₀-measure of the scaled bridges, or a CSV curve.
    Measure(MeasureArgs),
    /// Times at which a static runner is lonely.
    Runner(RunnerArgs),
    /// Bounds on the one-round gap of loneliness.
    GapBounds(GapArgs),
}

#[derive(Args, Debug, Serialize)]
struct MembershipArgs {
    /// Speed ratios, comma-separated rationals ≥ 1.
    #[arg(long, value_delimiter = ',', required = true)]
    z: Vec<Rational>,
    #[arg(long, default_value_t = 1)]
    rounds: usize,
    /// Defaults to 1/(d+2).
    #[arg(long)]
    delta: Option<Rational>,
}

#[derive(Args, Debug, Serialize)]
struct FeatherArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    z: Vec<Rational>,
    /// Kwai indices, comma-separated.
    #[arg(long, value_delimiter = ',')]
    k: Vec<u64>,
    #[arg(long, default_value_t = 0)]
    l: u64,
    #[arg(long)]
    delta: Option<Rational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Elimination,
    Simplex,
}

#[derive(Args, Debug, Serialize)]
struct PolytopeArgs {
    file: PathBuf,
    /// Require a nonempty interior (all rows made strict).
    #[arg(long)]
    interior: bool,
    #[arg(long, value_enum, default_value_t = Method::Elimination)]
    method: Method,
    /// Elimination order as variable names, comma-separated.
    #[arg(long, value_delimiter = ',')]
    order: Vec<String>,
}

#[derive(Args, Debug, Serialize)]
struct ChainArgs {
    #[arg(long, default_value = "1/6")]
    delta: Rational,
    /// Add the row h₂ > 2δ + 2δ·ρ₂.
    #[arg(long)]
    late_first_two_bridge: bool,
    /// Extra rows over rho2..h4, e.g. "5*rho3 - 3*rho2 <= 0".
    #[arg(long = "row")]
    rows: Vec<String>,
}

impl ChainArgs {
    fn constraints(&self) -> Result<ChainConstraints, Error> {
        let mut c = ChainConstraints {
            delta: self.delta.clone(),
            ..Default::default()
        };
        if self.late_first_two_bridge {
            c = c.with_late_first_two_bridge();
        }
        for r in &self.rows {
            c = c.with_row(r.parse::<LinIneq>()?);
        }
        Ok(c)
    }
}

#[derive(Args, Debug, Serialize)]
struct EnumerateArgs {
    #[arg(long = "L")]
    len: usize,
    /// Keep chains that extend to an admissible chain of this length.
    #[arg(long)]
    extendable_to: Option<usize>,
    /// Enumerate extensions of this prefix instead of all chains.
    #[arg(long)]
    prefix: Option<String>,
    #[command(flatten)]
    chain: ChainArgs,
}

#[derive(Args, Debug, Serialize)]
struct TransfersArgs {
    /// Chains file (one per line); defaults to the labelled families.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Compare the label graph with the reference arrow list.
    #[arg(long)]
    compare_figure: bool,
    #[command(flatten)]
    chain: ChainArgs,
}

#[derive(Args, Debug, Serialize)]
struct ForbiddenArgs {
    #[arg(long = "L")]
    len: usize,
    /// Forbidden 2-chains; defaults to the three built-in ones.
    #[arg(long = "chain")]
    chains: Vec<String>,
    /// Instead, check that this inequality holds for extensions of the prefix.
    #[arg(long, requires = "prefix")]
    implied: Option<String>,
    #[arg(long)]
    prefix: Option<String>,
    #[command(flatten)]
    chain: ChainArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum RegionKind {
    Cube,
    FourDim,
}

#[derive(Args, Debug, Serialize)]
struct TreecoverArgs {
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    rounds: usize,
    #[arg(long)]
    delta: Option<Rational>,
    #[arg(long, value_enum, default_value_t = RegionKind::Cube)]
    region: RegionKind,
    /// Cube side C for `--region cube`.
    #[arg(long = "box")]
    box_hi: Option<Rational>,
    /// Remove the open cube (1, b)^d from the region.
    #[arg(long)]
    exclude_cube: Option<Rational>,
    /// Fraction of the depth-1 subtrees to visit.
    #[arg(long)]
    sample: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Progress file; finished subtrees are skipped on the next run.
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Also test this many random region points directly.
    #[arg(long, default_value_t = 0)]
    spot: usize,
    /// Statement assumed for the complement of the region.
    #[arg(long, default_value = "")]
    premise: String,
}

#[derive(Args, Debug, Serialize)]
struct CounterexampleArgs {
    /// ε₁,ε₂,ε₃,ε₄ with 0 < ε₁ < ε₃ < ε₂ < ε₄ < 32/3211.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "1/1000,3/1000,2/1000,4/1000"
    )]
    eps: Vec<Rational>,
}

#[derive(Args, Debug, Serialize)]
struct MeasureArgs {
    #[arg(long)]
    z: Option<Rational>,
    #[arg(long)]
    delta: Rational,
    /// CSV curve over z: from,to,steps.
    #[arg(long, value_delimiter = ',')]
    csv: Vec<String>,
}

#[derive(Args, Debug, Serialize)]
struct RunnerArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    speeds: Vec<Rational>,
    /// Starting positions; default all zero.
    #[arg(long, value_delimiter = ',')]
    starts: Option<Vec<Rational>>,
    #[arg(long)]
    delta: Rational,
    #[arg(long)]
    horizon: Rational,
}

#[derive(Args, Debug, Serialize)]
struct GapArgs {
    #[arg(long)]
    d: usize,
}

/// Result of one subcommand: the verdict and its two renderings.
struct Outcome {
    holds: bool,
    text: String,
    json: Value,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    subcommand: &'a str,
    parameters: &'a Command,
    tool_version: &'static str,
    inputs: Vec<String>,
    outputs: Vec<String>,
    wall_clock_seconds: f64,
    verdict: &'static str,
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Membership(_) => "membership",
        Command::Feather(_) => "feather",
        Command::Polytope(_) => "polytope",
        Command::ChainsEnumerate(_) => "chains-enumerate",
        Command::ChainsTransfers(_) => "chains-transfers",
        Command::ChainsForbidden(_) => "chains-forbidden",
        Command::Treecover(_) => "treecover",
        Command::Counterexample(_) => "counterexample",
        Command::Measure(_) => "measure",
        Command::Runner(_) => "runner",
        Command::GapBounds(_) => "gap-bounds",
    }
}

fn files_of(c: &Command) -> (Vec<String>, Vec<String>) {
    let show = |p: &PathBuf| p.display().to_string();
    match c {
        Command::Polytope(a) => (vec![show(&a.file)], vec![]),
        Command::ChainsTransfers(a) => (a.file.iter().map(show).collect(), vec![]),
        Command::Treecover(a) => (
            a.resume.iter().map(show).collect(),
            a.resume.iter().map(show).collect(),
        ),
        _ => (vec![], vec![]),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let (inputs, mut outputs) = files_of(&cli.command);
    if let Some(m) = &cli.manifest {
        outputs.push(m.display().to_string());
    }
    let manifest = RunManifest {
        subcommand: subcommand_name(&cli.command),
        parameters: &cli.command,
        tool_version: env!("CARGO_PKG_VERSION"),
        inputs,
        outputs,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        verdict: if outcome.holds { "verified" } else { "refuted" },
    };
    let manifest = serde_json::to_value(&manifest).expect("serializable");
    match cli.format {
        Format::Text => {
            print!("{}", outcome.text);
            eprintln!("manifest: {manifest}");
        }
        Format::Json => {
            let out = json!({ "result": outcome.json, "manifest": manifest });
            println!(
                "{}",
                serde_json::to_string_pretty(&out).expect("serializable")
            );
        }
    }
    if let Some(m) = &cli.manifest {
        let text = serde_json::to_string_pretty(&manifest).expect("serializable");
        if let Err(e) = std::fs::write(m, text) {
            eprintln!("error: manifest: {e}");
            return ExitCode::from(2);
        }
    }
    ExitCode::from(if outcome.holds { 0 } else { 1 })
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Membership(a) => membership(a),
        Command::Feather(a) => feather(a),
        Command::Polytope(a) => polytope_cmd(a),
        Command::ChainsEnumerate(a) => chains_enumerate(a),
        Command::ChainsTransfers(a) => chains_transfers(a),
        Command::ChainsForbidden(a) => chains_forbidden(a, cli.long),
        Command::Treecover(a) => treecover_cmd(a, cli.long),
        Command::Counterexample(a) => counterexample(a),
        Command::Measure(a) => measure(a),
        Command::Runner(a) => runner(a),
        Command::GapBounds(a) => gap(a),
    }
}

fn config_for(d: usize, rounds: usize, delta: &Option<Rational>) -> Result<CoveringConfig, Error> {
    match delta {
        Some(x) => CoveringConfig::with_delta(d, rounds, x.clone()),
        None => CoveringConfig::new(d, rounds),
    }
}

fn membership(a: &MembershipArgs) -> Result<Outcome, Error> {
    let config = config_for(a.z.len(), a.rounds, &a.delta)?;
    let residual = geometry::membership_residual(&a.z, &config)?;
    let witness = geometry::canonical_witness(&residual);
    let beam = geometry::beam_lattice_point(&a.z, &config)?;
    let holds = witness.is_some();
    let mut text = format!("residual: {residual}\n");
    match (&witness, &beam) {
        (Some(w), Some(f)) => {
            text += &format!(
                "covered: yes\nwitness: {w}\nfeather: k={:?} l={}\n",
                f.k, f.l
            )
        }
        _ => text += "covered: no\n",
    }
    let json = json!({ "covered": holds, "residual": residual, "witness": witness, "feather": beam, "delta": config.delta });
    Ok(Outcome { holds, text, json })
}

fn feather(a: &FeatherArgs) -> Result<Outcome, Error> {
    if a.k.len() != a.z.len() {
        return Err(Error::Parameter("z and k must have the same length".into()));
    }
    let delta = a
        .delta
        .clone()
        .unwrap_or_else(|| geometry::default_delta(a.z.len()));
    let f = FeatherIndex {
        k: a.k.clone(),
        l: a.l,
    };
    let holds = geometry::feather_contains(&a.z, &f, &delta);
    let face = geometry::on_feather_lower_face(&a.z, &f, &delta);
    let text = format!("in feather: {}\non lower face: {}\n", yes(holds), yes(face));
    Ok(Outcome {
        holds,
        text,
        json: json!({ "contains": holds, "on_lower_face": face, "delta": delta }),
    })
}

fn read_input(path: &PathBuf) -> Result<String, Error> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)
            .map_err(|e| Error::Parse(e.to_string()))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }
}

fn polytope_cmd(a: &PolytopeArgs) -> Result<Outcome, Error> {
    let mut sys: LinSystem = read_input(&a.file)?.parse()?;
    if a.interior {
        sys = sys.strictified();
    }
    let res = match a.method {
        Method::Simplex => polytope::feasible_simplex(&sys.variables, &sys.rows)?,
        Method::Elimination if a.order.is_empty() => polytope::feasible(&sys)?,
        Method::Elimination => {
            let idx: Vec<usize> = a
                .order
                .iter()
                .map(|v| {
                    sys.variables
                        .iter()
                        .position(|x| x == v)
                        .ok_or_else(|| Error::Parameter(format!("unknown variable {v}")))
                })
                .collect::<Result<_, _>>()?;
            polytope::feasible_with(&sys, EliminationOrder::Fixed(&idx))?
        }
    };
    polytope::verify_certificate(&sys, &res).map_err(Error::Internal)?;
    let mut text = format!(
        "{}\n",
        if res.is_feasible() {
            "feasible"
        } else {
            "infeasible"
        }
    );
    if let Some(w) = &res.witness {
        for (v, x) in w {
            text += &format!("  {v} = {x}\n");
        }
    }
    if let Some(c) = &res.certificate {
        for (i, m) in &c.multipliers {
            text += &format!("  {m} × ({})\n", sys.rows[*i]);
        }
    }
    Ok(Outcome {
        holds: res.is_feasible(),
        text,
        json: serde_json::to_value(&res).expect("serializable"),
    })
}

fn chains_enumerate(a: &EnumerateArgs) -> Result<Outcome, Error> {
    let mut c = a.chain.constraints()?;
    if let Some(n) = a.extendable_to {
        c = c.extendable_to(n);
    }
    let stats = SearchStats::default();
    let found = match &a.prefix {
        Some(p) => chains::extensions(&p.parse::<WeakChain>()?, a.len, &c, &stats)?,
        None => chains::enumerate_weak_chains(a.len, &c, &stats)?,
    };
    let text: String = found.iter().map(|e| format!("{}\n", e.chain)).collect();
    let json = json!({
        "count": found.len(),
        "chains": found.iter().map(|e| e.chain.to_string()).collect::<Vec<_>>(),
        "feasibility_checks": stats.feasibility_checks(),
        "certificates_verified": stats.certificates_verified(),
    });
    Ok(Outcome {
        holds: true,
        text,
        json,
    })
}

fn chains_transfers(a: &TransfersArgs) -> Result<Outcome, Error> {
    let c = a.chain.constraints()?;
    let graph = match &a.file {
        Some(p) => {
            let chains: Vec<WeakChain> = read_input(p)?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::parse)
                .collect::<Result<_, _>>()?;
            chains::transfer_graph(&chains, &c.extra_rows)?
        }
        None => chains::label_graph(&chains::labeled_families(), &c.extra_rows)?,
    };
    let mut text = graph.edge_list();
    let mut json = json!({ "edges": graph.edge_names(), "adjacency": graph.adjacency_json() });
    let mut holds = true;
    if a.compare_figure {
        let computed: std::collections::BTreeSet<(String, String)> =
            graph.edge_names().into_iter().collect();
        let drawn: std::collections::BTreeSet<(String, String)> = chains::figure_edges()
            .into_iter()
            .map(|(x, y)| (x.to_string(), y.to_string()))
            .collect();
        let only_computed: Vec<_> = computed.difference(&drawn).cloned().collect();
        let only_drawn: Vec<_> = drawn.difference(&computed).cloned().collect();
        holds = only_computed.is_empty() && only_drawn.is_empty();
        for (x, y) in &only_computed {
            text += &format!("computed, not drawn: {x} -> {y}\n");
        }
        for (x, y) in &only_drawn {
            text += &format!("drawn, not computed: {x} -> {y}\n");
        }
        json["computed_not_drawn"] = json!(only_computed);
        json["drawn_not_computed"] = json!(only_drawn);
    }
    Ok(Outcome { holds, text, json })
}

fn default_forbidden() -> Vec<String> {
    [
        "<342||423|000||112>",
        "<342||3423|000||1112>",
        "<324||243|000||112>",
    ]
    .map(String::from)
    .to_vec()
}

fn chains_forbidden(a: &ForbiddenArgs, long: bool) -> Result<Outcome, Error> {
    if a.len > FORBIDDEN_QUICK_LENGTH && !long {
        return Err(Error::Parameter(format!(
            "length {} can take hours; pass --long",
            a.len
        )));
    }
    let c = a.chain.constraints()?;
    let stats = SearchStats::default();
    if let Some(ineq) = &a.implied {
        let prefix: WeakChain = a.prefix.as_deref().expect("required by clap").parse()?;
        let holds_row: LinIneq = ineq.parse()?;
        let holds =
            chains::implied_inequality_check(&prefix, &holds_row.negated(), a.len, &c, &stats)?;
        let text = format!(
            "{ineq} {} on every length-{} extension of {prefix}\n",
            if holds { "holds" } else { "fails" },
            a.len
        );
        return Ok(Outcome {
            holds,
            text,
            json: json!({ "implied": holds, "prefix": prefix.to_string(), "inequality": ineq }),
        });
    }
    let list = if a.chains.is_empty() {
        default_forbidden()
    } else {
        a.chains.clone()
    };
    let bad: Vec<WeakChain> = list.iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
    let found = chains::forbidden_subchain_search(&bad, a.len, &c, &stats)?;
    let text = if found.is_empty() {
        format!(
            "no admissible length-{} chain contains a forbidden subchain\n",
            a.len
        )
    } else {
        found.iter().map(|e| format!("{}\n", e.chain)).collect()
    };
    let json = json!({ "length": a.len, "found": found.iter().map(|e| e.chain.to_string()).collect::<Vec<_>>() });
    Ok(Outcome {
        holds: found.is_empty(),
        text,
        json,
    })
}

fn treecover_cmd(a: &TreecoverArgs, long: bool) -> Result<Outcome, Error> {
    let config = config_for(a.d, a.rounds, &a.delta)?;
    let mut region = match a.region {
        RegionKind::Cube => {
            let c = a
                .box_hi
                .clone()
                .ok_or_else(|| Error::Parameter("--box is required for a cube".into()))?;
            CompactRegion::cube(a.d, c)?
        }
        RegionKind::FourDim => {
            if a.d != 4 {
                return Err(Error::Parameter(
                    "the four-dimensional region needs --d 4".into(),
                ));
            }
            CompactRegion::four_dim_compact_part()
        }
    };
    if let Some(b) = &a.exclude_cube {
        region = region.excluding_open_cube(b.clone());
    }
    let full_four_dim_tree =
        a.region == RegionKind::FourDim && a.rounds == 1 && a.sample.map_or(true, |f| f > 0.01);
    if full_four_dim_tree && !long {
        return Err(Error::Parameter(
            "this tree takes hours; pass --long or --sample ≤ 0.01".into(),
        ));
    }
    let opts = CoverOptions {
        sampling: a.sample.map(|fraction| Sampling {
            fraction,
            seed: a.seed,
        }),
        checkpoint: a.resume.clone(),
    };
    let (report, seconds) = treecover::verify_cover_timed(&region, &config, &opts)?;
    let premise = if a.premise.is_empty() {
        "ordered tuples outside the region are covered"
    } else {
        &a.premise
    };
    let mut cert = treecover::certificate(&region, &config, &report, premise, seconds);
    let mut holds = report.covered;
    let mut text = format!(
        "covered: {}{}\nsubtrees: {}/{}\nnodes: {}\nleaves: {}\ndead ends: {}\nfailing leaves: {}\n",
        yes(report.covered),
        if report.heuristic { " (heuristic threshold)" } else { "" },
        report.subtrees_visited.len(),
        report.subtrees_total,
        report.totals.nodes,
        report.totals.leaves,
        report.totals.dead_ends,
        report.totals.failing.len(),
    );
    for leaf in report.totals.failing.iter().take(20) {
        text += &format!("  {}\n", join(leaf));
    }
    if a.spot > 0 {
        let spot = treecover::spot_check(&region, &config, a.spot, a.seed)?;
        holds &= spot.all_covered();
        text += &format!(
            "spot check: {}/{} covered\n",
            spot.samples.len() - spot.uncovered.len(),
            spot.samples.len()
        );
        cert["spot_check"] = serde_json::to_value(&spot).expect("serializable");
    }
    Ok(Outcome {
        holds,
        text,
        json: cert,
    })
}

fn counterexample(a: &CounterexampleArgs) -> Result<Outcome, Error> {
    let r = analysis::counterexample_verify(&a.eps)?;
    let holds = r.separates();
    let text = format!(
        "z: {}\none round: {}\ntwo rounds: {}\nwitness: {}\nseparates: {}\n",
        join(&r.z),
        r.residual_one_round,
        r.residual_two_rounds,
        r.witness_two_rounds
            .as_ref()
            .map_or("none".into(), |w| w.to_string()),
        yes(holds),
    );
    Ok(Outcome {
        holds,
        text,
        json: serde_json::to_value(&r).expect("serializable"),
    })
}

fn measure(a: &MeasureArgs) -> Result<Outcome, Error> {
    if !a.csv.is_empty() {
        if a.csv.len() != 3 {
            return Err(Error::Parameter("--csv takes from,to,steps".into()));
        }
        let from: Rational = a.csv[0].parse()?;
        let to: Rational = a.csv[1].parse()?;
        let steps: u32 = a.csv[2]
            .parse()
            .map_err(|_| Error::Parse(format!("steps {:?}", a.csv[2])))?;
        let csv = analysis::measure_curve_csv(&a.delta, &from, &to, steps)?;
        return Ok(Outcome {
            holds: true,
            json: json!({ "csv": csv }),
            text: csv,
        });
    }
    let z =
        a.z.clone()
            .ok_or_else(|| Error::Parameter("--z or --csv is required".into()))?;
    let r = analysis::k0_measure(&z, &a.delta)?;
    let holds = r.measure <= r.bound;
    let text = format!(
        "measure: {}\nbound: {}\ntight: {}\n",
        r.measure,
        r.bound,
        yes(r.tight)
    );
    Ok(Outcome {
        holds,
        text,
        json: serde_json::to_value(&r).expect("serializable"),
    })
}

fn runner(a: &RunnerArgs) -> Result<Outcome, Error> {
    let mut inst = RunnerInstance::classic(a.speeds.clone(), a.delta.clone(), a.horizon.clone());
    if let Some(s) = &a.starts {
        if s.len() != a.speeds.len() {
            return Err(Error::Parameter(
                "speeds and starts must have the same length".into(),
            ));
        }
        inst.starts = s.clone();
    }
    let windows = analysis::loneliness_windows(&inst)?;
    let holds = !windows.is_empty();
    let text = format!("lonely at: {windows}\n");
    Ok(Outcome {
        holds,
        text,
        json: json!({ "windows": windows, "first": windows.min() }),
    })
}

fn gap(a: &GapArgs) -> Result<Outcome, Error> {
    let (lo, hi) = analysis::gap_bounds(a.d)?;
    Ok(Outcome {
        holds: true,
        text: format!("{lo} <= gap <= {hi}\n"),
        json: json!({ "lower": lo, "upper": hi }),
    })
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn join(v: &[Rational]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}
