use clap::{Parser, Subcommand, ValueEnum};
use netshare::cost::perturb_for_ties;
use netshare::engine::{
    best_response_dynamics, brute_force_optimum, is_nash, opt_path_table, poa_report,
    AnalysisReport, BrdStatus, EngineError, StrategyProfile,
};
use netshare::fileio::{
    instance_digest, instance_to_file, read_instance, report_to_file, InstanceFile,
    RuntimeStats,
};
use netshare::gen::{
    gen_dag_convex_lb, gen_multicast_const_lb, gen_multicast_convex_lb, gen_overcharge_lb,
    gen_static_share_lb, random_dag_instance, random_spg_instance, Shape,
};
use netshare::protocol::{nwa_context, static_share_rule, Protocol};
use netshare::rat::Rat;
use netshare::sp::{annotate, parse_sp_tree, SpDesc};
use netshare::verify::{run_paper_facts, run_properties, SuiteResult};
use netshare::cost::GameInstance;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

const EXIT_OK: u8 = 0;
const EXIT_BAD_INPUT: u8 = 2;
const EXIT_CAP_EXCEEDED: u8 = 3;
const EXIT_VERIFY_FAILED: u8 = 4;
const EXIT_TIE_DETECTED: u8 = 5;

#[derive(Parser)]
#[command(
    name = "netshare",
    about = "Network cost-sharing games: generation, equilibrium analysis, verification"
)]
struct Cli {
    /// Cap on the number of strategy profiles enumerated per analysis.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    max_profiles: usize,
    /// Cap on the number of s-t paths enumerated per terminal pair.
    #[arg(long, global = true, default_value_t = 100_000)]
    max_paths: usize,
    /// Worker cap for enumeration (the current engine runs one worker).
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Seed for randomized suites and generators.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Output path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    MulticastConstLb,
    DagConvexLb,
    OverchargeLb,
    StaticShareLb,
    MulticastConvexLb,
    RandomDag,
    RandomSpg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Concave,
    StrictlyConcave,
    Convex,
    Constant,
}

impl From<ShapeArg> for Shape {
    fn from(s: ShapeArg) -> Shape {
        match s {
            ShapeArg::Concave => Shape::Concave,
            ShapeArg::StrictlyConcave => Shape::StrictlyConcave,
            ShapeArg::Convex => Shape::Convex,
            ShapeArg::Constant => Shape::Constant,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Enumerate,
    Brd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    PaperFacts,
    Properties,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated instance file.
    Gen {
        #[arg(long, value_enum)]
        family: Family,
        /// Player count (multicast-const-lb, dag-convex-lb, multicast-convex-lb,
        /// random families).
        #[arg(long)]
        n: Option<usize>,
        /// Hub cost for multicast-const-lb, as an exact rational.
        #[arg(long)]
        c: Option<Rat>,
        /// Parallel-bundle exponent for static-share-lb.
        #[arg(long)]
        k: Option<usize>,
        /// Decimal digits for irrational approximations (overcharge-lb).
        #[arg(long, default_value_t = 12)]
        digits: u32,
        /// Cost shape for the random families.
        #[arg(long, value_enum, default_value_t = ShapeArg::Concave)]
        shape: ShapeArg,
        /// Apply the tie-breaking perturbation with grid 10^-r.
        #[arg(long)]
        perturb: Option<u32>,
    },
    /// Analyze an instance file under a protocol and write a report.
    Analyze {
        #[arg(long)]
        instance: PathBuf,
        /// equal-split, incremental, spg, static-share, or nwa.
        #[arg(long)]
        protocol: String,
        #[arg(long, value_enum, default_value_t = Mode::Enumerate)]
        mode: Mode,
    },
    /// Run a named check suite; exit 0 iff every check passes.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
    },
    /// Dump the enumerated s-t paths of an instance as edge-id arrays.
    Paths {
        #[arg(long)]
        instance: PathBuf,
        /// Source vertex; defaults to player 0's source.
        #[arg(long)]
        source: Option<u32>,
        /// Sink vertex; defaults to player 0's sink.
        #[arg(long)]
        sink: Option<u32>,
    },
}

fn fail(code: u8, msg: String) -> ExitCode {
    eprintln!("error: {}", msg);
    ExitCode::from(code)
}

fn emit(out: &Option<PathBuf>, text: String) -> Result<(), std::io::Error> {
    match out {
        Some(p) => std::fs::write(p, text + "\n"),
        None => {
            println!("{}", text);
            Ok(())
        }
    }
}

fn cmd_gen(cli: &Cli) -> ExitCode {
    let Command::Gen {
        family,
        n,
        c,
        k,
        digits,
        shape,
        perturb,
    } = &cli.command
    else {
        unreachable!()
    };
    let need_n = |what: &str| (*n).ok_or_else(|| format!("--n is required for {}", what));
    let built: Result<(GameInstance, Option<SpDesc>), String> = (|| {
        let shape: Shape = (*shape).into();
        match family {
            Family::MulticastConstLb => {
                let n = need_n("multicast-const-lb")?;
                let c = c.clone().ok_or("--c is required for multicast-const-lb")?;
                Ok((gen_multicast_const_lb(n, c).map_err(|e| e.to_string())?, None))
            }
            Family::DagConvexLb => {
                let n = need_n("dag-convex-lb")?;
                Ok((gen_dag_convex_lb(n).map_err(|e| e.to_string())?, None))
            }
            Family::OverchargeLb => {
                Ok((gen_overcharge_lb(*digits).map_err(|e| e.to_string())?, None))
            }
            Family::StaticShareLb => {
                let k = (*k).ok_or("--k is required for static-share-lb")?;
                Ok((gen_static_share_lb(k).map_err(|e| e.to_string())?, None))
            }
            Family::MulticastConvexLb => {
                let n = need_n("multicast-convex-lb")?;
                Ok((gen_multicast_convex_lb(n).map_err(|e| e.to_string())?, None))
            }
            Family::RandomDag => {
                let n = need_n("random-dag")?;
                Ok((random_dag_instance(cli.seed, 6, 10, n, shape, 8), None))
            }
            Family::RandomSpg => {
                let n = need_n("random-spg")?;
                let (inst, desc) = random_spg_instance(cli.seed, 12, n, shape, 6);
                Ok((inst, Some(desc)))
            }
        }
    })();
    let (mut instance, sp) = match built {
        Ok(x) => x,
        Err(msg) => return fail(EXIT_BAD_INPUT, msg),
    };
    if let Some(r) = perturb {
        instance = match perturb_for_ties(&instance, *r) {
            Ok(p) => p,
            Err(e) => return fail(EXIT_BAD_INPUT, e.to_string()),
        };
    }
    let file = instance_to_file(&instance, sp.as_ref(), None);
    let text = serde_json::to_string_pretty(&file).expect("instance serializes");
    match emit(&cli.out, text) {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(e) => fail(EXIT_BAD_INPUT, e.to_string()),
    }
}

/// Build the requested protocol against the instance; `spg` and
/// `static-share` need the composition tree from the instance file.
fn build_protocol(
    name: &str,
    instance: &GameInstance,
    sp: &Option<SpDesc>,
) -> Result<Protocol, String> {
    match name {
        "equal-split" => Ok(Protocol::EqualSplit),
        "incremental" => Ok(Protocol::Incremental),
        "nwa" => nwa_context(instance)
            .map(Protocol::Nwa)
            .map_err(|e| format!("protocol inapplicable: {}", e)),
        "spg" | "static-share" => {
            let desc = sp
                .as_ref()
                .ok_or("protocol needs an sp_tree in the instance file")?;
            let tree = parse_sp_tree(&instance.graph, desc).map_err(|e| e.to_string())?;
            let opt = opt_path_table(instance, instance.n_max)
                .map_err(|e| format!("protocol inapplicable: {}", e))?;
            let ann = annotate(&tree, instance, opt.paths());
            if name == "spg" {
                Ok(Protocol::Spg { ann, opt })
            } else {
                let rule = static_share_rule(instance, &opt, &ann.psi_e)
                    .map_err(|e| format!("protocol inapplicable: {}", e))?;
                Ok(Protocol::LeaderBased(rule))
            }
        }
        other => Err(format!("unknown protocol {:?}", other)),
    }
}

fn original_instance(instance: &GameInstance) -> GameInstance {
    match &instance.perturbation {
        None => instance.clone(),
        Some(p) => GameInstance::new(
            instance.graph.clone(),
            p.original.clone(),
            instance.players.clone(),
            instance.n_max,
        )
        .expect("original tables are well-formed"),
    }
}

fn cmd_analyze(cli: &Cli) -> ExitCode {
    let Command::Analyze {
        instance: path,
        protocol: proto_name,
        mode,
    } = &cli.command
    else {
        unreachable!()
    };
    let file = match read_instance(path) {
        Ok(f) => f,
        Err(e) => return fail(EXIT_BAD_INPUT, e.to_string()),
    };
    let (instance, sp) = match netshare::fileio::instance_from_file(&file) {
        Ok(x) => x,
        Err(e) => return fail(EXIT_BAD_INPUT, e.to_string()),
    };
    let protocol = match build_protocol(proto_name, &instance, &sp) {
        Ok(p) => p,
        Err(msg) => return fail(EXIT_BAD_INPUT, msg),
    };
    let start = Instant::now();
    let report = match *mode {
        Mode::Enumerate => poa_report(&instance, &protocol, cli.max_profiles, cli.max_paths),
        Mode::Brd => brd_report(&instance, &protocol, cli.max_profiles, cli.max_paths),
    };
    let report = match report {
        Ok(r) => r,
        Err(e @ EngineError::PathExplosion(..)) => {
            return fail(EXIT_CAP_EXCEEDED, e.to_string())
        }
        Err(e) => return fail(EXIT_BAD_INPUT, e.to_string()),
    };
    let runtime = RuntimeStats {
        millis: start.elapsed().as_millis() as u64,
        profiles_checked: report.pne.len(),
    };
    let out = report_to_file(&report, instance_digest(&file), runtime);
    let text = serde_json::to_string_pretty(&out).expect("report serializes");
    if let Err(e) = emit(&cli.out, text) {
        return fail(EXIT_BAD_INPUT, e.to_string());
    }
    if report.tie_detector_hits > 0 {
        return fail(
            EXIT_TIE_DETECTED,
            format!("{} tie-detector hits", report.tie_detector_hits),
        );
    }
    // spg and nwa guarantee an equilibrium; report its absence as a failure
    if report.no_equilibrium && matches!(protocol, Protocol::Spg { .. } | Protocol::Nwa(_)) {
        return fail(EXIT_VERIFY_FAILED, "no equilibrium under a stable protocol".into());
    }
    ExitCode::from(EXIT_OK)
}

/// Best-response dynamics from the lexicographically first profile; the
/// report carries the converged equilibrium (or none on a cycle / iteration
/// cap).
fn brd_report(
    instance: &GameInstance,
    protocol: &Protocol,
    max_iters: usize,
    path_cap: usize,
) -> Result<AnalysisReport, EngineError> {
    let start = StrategyProfile::new(
        instance,
        instance
            .players
            .iter()
            .map(|&(s, t)| {
                instance
                    .graph
                    .enumerate_paths(s, t, path_cap)
                    .map(|ps| ps[0].clone())
            })
            .collect::<Result<_, _>>()?,
    )?;
    let (profile, status, _) = best_response_dynamics(instance, protocol, start, max_iters, path_cap)?;
    let check = is_nash(instance, protocol, &profile, path_cap)?;
    let original = original_instance(instance);
    let (opt_profile, opt_cost) = brute_force_optimum(&original, max_iters.max(1_000_000))?;
    let converged = matches!(status, BrdStatus::Converged) && check.is_nash;
    let eq_cost = converged.then(|| {
        netshare::engine::profile_cost(&profile, protocol.eval_tables(instance))
    });
    let poa = eq_cost
        .clone()
        .map(|c| &c / &opt_cost);
    Ok(AnalysisReport {
        protocol: protocol.name().to_string(),
        pne: if converged { vec![profile] } else { vec![] },
        worst_eq_cost: eq_cost.clone(),
        best_eq_cost: eq_cost,
        opt_cost,
        opt_profile,
        poa,
        no_equilibrium: !converged,
        tie_detector_hits: check.tie_hits,
        eps1: instance.perturbation.as_ref().map(|p| p.eps1.clone()),
        eps2: protocol.eps2(),
    })
}

fn cmd_verify(cli: &Cli) -> ExitCode {
    let Command::Verify { suite } = &cli.command else {
        unreachable!()
    };
    let result: SuiteResult = match suite {
        Suite::PaperFacts => run_paper_facts(),
        Suite::Properties => run_properties(cli.seed),
    };
    let text = serde_json::to_string_pretty(&result).expect("summary serializes");
    if let Err(e) = emit(&cli.out, text) {
        return fail(EXIT_BAD_INPUT, e.to_string());
    }
    for check in &result.checks {
        eprintln!(
            "{} {}: {}",
            if check.passed { "PASS" } else { "FAIL" },
            check.name,
            check.detail
        );
    }
    if result.all_passed() {
        ExitCode::from(EXIT_OK)
    } else {
        ExitCode::from(EXIT_VERIFY_FAILED)
    }
}

fn cmd_paths(cli: &Cli) -> ExitCode {
    let Command::Paths {
        instance: path,
        source,
        sink,
    } = &cli.command
    else {
        unreachable!()
    };
    let file: InstanceFile = match read_instance(path) {
        Ok(f) => f,
        Err(e) => return fail(EXIT_BAD_INPUT, e.to_string()),
    };
    let (instance, _) = match netshare::fileio::instance_from_file(&file) {
        Ok(x) => x,
        Err(e) => return fail(EXIT_BAD_INPUT, e.to_string()),
    };
    let (ds, dt) = instance.players[0];
    let (s, t) = (source.unwrap_or(ds), sink.unwrap_or(dt));
    let paths = match instance.graph.enumerate_paths(s, t, cli.max_paths) {
        Ok(p) => p,
        Err(e) => return fail(EXIT_CAP_EXCEEDED, e.to_string()),
    };
    let arr: Vec<Vec<usize>> = paths.iter().map(|p| p.edges().to_vec()).collect();
    let text = serde_json::to_string_pretty(&arr).expect("paths serialize");
    match emit(&cli.out, text) {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(e) => fail(EXIT_BAD_INPUT, e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads == 0 {
        return fail(EXIT_BAD_INPUT, "--threads must be at least 1".into());
    }
    match cli.command {
        Command::Gen { .. } => cmd_gen(&cli),
        Command::Analyze { .. } => cmd_analyze(&cli),
        Command::Verify { .. } => cmd_verify(&cli),
        Command::Paths { .. } => cmd_paths(&cli),
    }
}
