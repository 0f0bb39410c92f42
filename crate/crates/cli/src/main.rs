//! `kx`: run, compare and audit local search on k-exchange instances.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kexchange_core::baselines::{self, naive_marginal_nols, naive_weights, BaselineResult};
use kexchange_core::campaign::{
    run_campaign, run_cells, write_csv, Algorithm, CampaignSpec, RunOptions,
};
use kexchange_core::exact::{check_lemma3_and_theorem1, DEFAULT_BRUTE_CAP};
use kexchange_core::generate::{generate_linear_packing, generate_packing};
use kexchange_core::io::{load_instance, parse_instance, serialize_instance};
use kexchange_core::objective::{
    certify_monotone_submodular, Certification, Oracle, DEFAULT_CERTIFY_CAP,
};
use kexchange_core::rational::{parse_rational, to_decimal};
use kexchange_core::search::{self, AcceptanceRule, Caps, SearchConfig, DEFAULT_MAX_CANDIDATES};
use kexchange_core::{fixtures, Error, Instance, Rational, Result};

#[derive(Parser)]
#[command(
    name = "kx",
    version,
    about = "Local search for submodular maximization over k-exchange systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm on one instance.
    Run(RunArgs),
    /// Run a grid of algorithms and epsilons and write a CSV table.
    Compare(CompareArgs),
    /// Run the search and audit the locality-gap argument on its output.
    Audit(AuditArgs),
    /// Generate a random k-set packing instance.
    Gen(GenArgs),
    /// Certify that an instance's objective is monotone submodular.
    Check(CheckArgs),
    /// Show marginal weights cycling on the bundled two-bases instance.
    DemoCycle(DemoArgs),
}

#[derive(Args)]
struct SearchArgs {
    /// Accuracy parameter, e.g. 0.5 or 1/4.
    #[arg(long, default_value = "1/2", value_parser = parse_epsilon)]
    epsilon: Rational,
    /// Refuse neighborhoods estimated larger than this.
    #[arg(long, default_value_t = DEFAULT_MAX_CANDIDATES)]
    cap_candidates: u128,
    /// Compare against w²(S) instead of w²(B) when accepting a move.
    #[arg(long)]
    literal_pseudocode: bool,
    /// Expected exchange parameter; rejected if the instance disagrees.
    #[arg(long)]
    k: Option<usize>,
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        let mut config = SearchConfig::new(self.epsilon);
        config.caps = self.caps();
        config.rule = self.rule();
        config
    }

    fn caps(&self) -> Caps {
        Caps {
            max_candidates: self.cap_candidates,
        }
    }

    fn rule(&self) -> AcceptanceRule {
        if self.literal_pseudocode {
            AcceptanceRule::WholeSolution
        } else {
            AcceptanceRule::RemovedSet
        }
    }

    fn check_k(&self, instance: &Instance) -> Result<()> {
        match self.k {
            Some(k) if k != instance.k() => Err(Error::Semantic(format!(
                "--k {k} does not match the instance's k = {}",
                instance.k()
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value = "nols", value_parser = parse_algorithm)]
    algorithm: Algorithm,
    #[command(flatten)]
    search: SearchArgs,
    /// Iteration cap for the naive variant.
    #[arg(long, default_value_t = 100)]
    max_iters: usize,
    /// Write the per-improvement trace (nols) or trajectory here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Run on this instance instead of a generated grid.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Comma-separated algorithms.
    #[arg(long, value_delimiter = ',', default_value = "nols,oblivious,greedy", value_parser = parse_algorithm)]
    algorithm: Vec<Algorithm>,
    /// Comma-separated epsilons.
    #[arg(long, value_delimiter = ',', default_value = "1/4,1/2", value_parser = parse_epsilon)]
    epsilon: Vec<Rational>,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 4)]
    n_min: usize,
    #[arg(long, default_value_t = 8)]
    n_max: usize,
    #[arg(long)]
    universe: Option<usize>,
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    repetitions: usize,
    #[arg(long, default_value_t = DEFAULT_BRUTE_CAP)]
    brute_cap: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_CANDIDATES)]
    cap_candidates: u128,
    #[arg(long)]
    literal_pseudocode: bool,
    /// Audit every nols row.
    #[arg(long)]
    audit: bool,
    /// Omit the wall_ms column, making reruns byte-identical.
    #[arg(long)]
    no_wall_time: bool,
    #[arg(long, default_value_t = 100)]
    max_iters: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long, default_value_t = DEFAULT_BRUTE_CAP)]
    brute_cap: usize,
    /// Write the per-check CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long)]
    universe: Option<usize>,
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Linear objective with random integer weights.
    #[arg(long, conflicts_with = "unit")]
    linear: bool,
    /// Linear objective with unit weights.
    #[arg(long)]
    unit: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Largest ground set to certify exhaustively.
    #[arg(long, default_value_t = DEFAULT_CERTIFY_CAP)]
    max_n: usize,
}

#[derive(Args)]
struct DemoArgs {
    /// Defaults to the bundled two-bases instance.
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long, default_value = "1/2", value_parser = parse_epsilon)]
    epsilon: Rational,
    #[arg(long, default_value_t = 10)]
    max_iters: usize,
}

fn parse_epsilon(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn parse_algorithm(s: &str) -> std::result::Result<Algorithm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Syntax { .. } | Error::Semantic(_) | Error::Io(_) => 2,
        Error::CapRefusal { .. } | Error::SizeCap { .. } => 3,
        Error::Invariant(_) | Error::Audit(_) | Error::Overflow => 4,
        Error::UnknownElement(_)
        | Error::Domain(_)
        | Error::Precondition(_)
        | Error::Degenerate => 1,
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn show_value(r: &Rational) -> String {
    if r.is_integer() {
        r.to_string()
    } else {
        format!("{r} ({})", to_decimal(r, 6))
    }
}

fn print_baseline(instance: &Instance, r: &BaselineResult) {
    println!("solution {}", instance.format_set(&r.solution));
    println!("value {}", show_value(&r.value.get()));
    println!("iterations {}", r.iterations);
    println!("terminated {}", r.terminated);
    if let Some(p) = r.cycle_period {
        println!("cycle period {p}");
    }
    println!("oracle_calls {}", r.oracle_calls);
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let instance = load_instance(&args.instance)?;
    args.search.check_k(&instance)?;
    let caps = args.search.caps();
    let eps = &args.search.epsilon;
    let result = match args.algorithm {
        Algorithm::Nols => {
            let (state, trace) = search::run(&instance, &args.search.config())?;
            println!("solution {}", instance.format_set(&state.set));
            println!("value {}", show_value(&state.value.get()));
            println!("improvements {}", trace.improvement_count());
            println!("improvement_bound {}", trace.improvement_bound);
            println!(
                "potential {} (units of alpha^2, alpha = {})",
                state.potential, trace.alpha
            );
            println!("oracle_calls {}", trace.oracle_calls);
            if let Some(path) = &args.out {
                let mut out = output(Some(path))?;
                trace.write_log(&mut out)?;
                out.flush()?;
            }
            return Ok(());
        }
        Algorithm::Oblivious => baselines::oblivious_ls(&instance, eps, &caps)?,
        Algorithm::Greedy => baselines::greedy(&instance)?,
        Algorithm::LinearNols => baselines::linear_nols(&instance, eps, &caps)?,
        Algorithm::Naive => naive_marginal_nols(&instance, None, args.max_iters, &caps)?,
    };
    print_baseline(&instance, &result);
    if let Some(path) = &args.out {
        let mut out = output(Some(path))?;
        for (i, s) in result.trajectory.iter().enumerate() {
            writeln!(out, "{i} {}", instance.format_set(s))?;
        }
        out.flush()?;
    }
    Ok(())
}

fn cmd_compare(args: &CompareArgs) -> Result<()> {
    let options = RunOptions {
        caps: Caps {
            max_candidates: args.cap_candidates,
        },
        rule: if args.literal_pseudocode {
            AcceptanceRule::WholeSolution
        } else {
            AcceptanceRule::RemovedSet
        },
        brute_cap: args.brute_cap,
        audit: args.audit,
        naive_max_iters: args.max_iters,
    };
    let rows = match &args.instance {
        Some(path) => {
            let instance = load_instance(path)?;
            run_cells(&[instance], &args.algorithm, &args.epsilon, &options)
        }
        None => {
            let mut spec = CampaignSpec::new(args.n_min, args.n_max, args.k, args.seed);
            spec.universe_size = args.universe.unwrap_or(2 * args.k + 2);
            spec.density = args.density;
            spec.repetitions = args.repetitions;
            spec.epsilons = args.epsilon.clone();
            spec.algorithms = args.algorithm.clone();
            spec.options = options;
            run_campaign(&spec)?
        }
    };
    let mut out = output(args.out.as_deref())?;
    write_csv(&rows, &mut out, !args.no_wall_time)?;
    out.flush()?;
    Ok(())
}

fn cmd_audit(args: &AuditArgs) -> Result<()> {
    let instance = load_instance(&args.instance)?;
    args.search.check_k(&instance)?;
    let eps = &args.search.epsilon;
    let (state, trace) = search::run(&instance, &args.search.config())?;
    let report = check_lemma3_and_theorem1(
        &instance,
        &state,
        &trace,
        eps,
        &args.search.caps(),
        args.brute_cap,
    )?;
    {
        let mut out = output(args.out.as_deref())?;
        report.write_csv(&mut out)?;
        out.flush()?;
    }
    let ratio = report
        .ratio
        .map_or("undefined".to_string(), |r| to_decimal(&r, 6));
    let verdict = if report.passed() { "PASS" } else { "FAIL" };
    eprintln!(
        "S = {} f(S) = {}; O = {} f(O) = {}",
        instance.format_set(&report.solution),
        report.value,
        instance.format_set(&report.opt_set),
        report.opt_value
    );
    eprintln!(
        "ratio {ratio} <= bound {}: {verdict}",
        to_decimal(&report.bound, 6)
    );
    match report.first_failure() {
        None => Ok(()),
        Some(c) => Err(Error::Audit(format!(
            "{} failed for {}: {} > {}",
            c.name, c.subject, c.lhs, c.rhs
        ))),
    }
}

fn cmd_gen(args: &GenArgs) -> Result<()> {
    let universe = args.universe.unwrap_or(2 * args.k + 2);
    let instance = if args.linear || args.unit {
        generate_linear_packing(args.n, args.k, universe, args.unit, args.seed)?
    } else {
        generate_packing(args.n, args.k, universe, args.density, args.seed)?
    };
    let mut out = output(args.out.as_deref())?;
    out.write_all(serialize_instance(&instance)?.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn cmd_check(args: &CheckArgs) -> Result<()> {
    let instance = load_instance(&args.instance)?;
    let set = |s: &[usize]| instance.format_set(s);
    match certify_monotone_submodular(&instance.objective, args.max_n)? {
        Certification::Pass { subsets } => {
            println!("monotone submodular: certified over {subsets} subsets");
            Ok(())
        }
        Certification::NotMonotone { set: s, element } => Err(Error::Semantic(format!(
            "not monotone: adding {} to {} decreases f",
            instance.label(element),
            set(&s)
        ))),
        Certification::NotSubmodular {
            smaller,
            larger,
            element,
        } => Err(Error::Semantic(format!(
            "not submodular: {} gains more on {} than on {}",
            instance.label(element),
            set(&larger),
            set(&smaller)
        ))),
    }
}

fn format_weights(instance: &Instance, weights: &[Rational]) -> String {
    let parts: Vec<String> = weights
        .iter()
        .enumerate()
        .map(|(e, w)| format!("w({})={w}", instance.label(e)))
        .collect();
    parts.join(" ")
}

fn cmd_demo(args: &DemoArgs) -> Result<()> {
    let instance = match &args.instance {
        Some(path) => load_instance(path)?,
        None => parse_instance(fixtures::TWO_BASES_KX)?,
    };
    let caps = Caps::default();
    let start = baselines::greedy(&instance)?.solution;
    println!(
        "instance {} (n={}, k={})",
        instance.name,
        instance.n(),
        instance.k()
    );
    println!("start {} (greedy)", instance.format_set(&start));

    let naive = naive_marginal_nols(&instance, Some(&start), args.max_iters, &caps)?;
    let oracle = Oracle::new(&instance.objective);
    for (i, pair) in naive.trajectory.windows(2).enumerate() {
        let weights = naive_weights(&oracle, &pair[0])?;
        println!(
            "naive weights at {}: {}",
            instance.format_set(&pair[0]),
            format_weights(&instance, &weights)
        );
        println!(
            "naive iteration {}: {} -> {}",
            i + 1,
            instance.format_set(&pair[0]),
            instance.format_set(&pair[1])
        );
    }
    match naive.cycle_period {
        Some(p) => println!(
            "naive: cycle of period {p} detected after {} iterations (terminated = {})",
            naive.iterations, naive.terminated
        ),
        None if naive.terminated => {
            println!("naive: terminated after {} iterations", naive.iterations)
        }
        None => println!(
            "naive: iteration cap {} reached (terminated = false)",
            args.max_iters
        ),
    }

    let (state, trace) = search::run(&instance, &SearchConfig::new(args.epsilon))?;
    println!(
        "nols: terminated after {} improvements at {} with f = {}",
        trace.improvement_count(),
        instance.format_set(&state.set),
        state.value
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Audit(a) => cmd_audit(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Check(a) => cmd_check(a),
        Command::DemoCycle(a) => cmd_demo(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
