mod args;

use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use num_bigint::BigInt;
use tempfile::NamedTempFile;

use ils_core::bench::{self, Algorithm, BenchError, FigureSweepConfig, Preset, ScenarioConfig};
use ils_core::decomposition::ChunkPlan;
use ils_core::fuzz::run_fuzz;
use ils_core::guard::{check_adds, check_ds, check_mdid, check_rounded_div, GuardReport};
use ils_core::oracle::exact_nearest_half_up;
use ils_core::{
    additive_direct_search, direct_search, mdid, plan_chunks, round_half_up_div, NearestSolution, ScaleError,
    ScaleProblem, Sign, Width,
};

use args::{BenchArgs, CheckAlgo, CheckArgs, Cli, Command, FuzzArgs, Instance, SolveAlgo, SolveArgs, SweepArgs};

const EXIT_USAGE: u8 = 1;
const EXIT_OVERFLOW: u8 = 2;
const EXIT_FUZZ: u8 = 3;

/// A failed command: message for stderr and exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<ScaleError> for Failure {
    fn from(e: ScaleError) -> Self {
        match e {
            ScaleError::InvalidInput(_) => Failure::usage(e.to_string()),
            _ => Failure {
                code: EXIT_OVERFLOW,
                message: e.to_string(),
            },
        }
    }
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Check(a) => check(a),
        Command::Fuzz(a) => fuzz(a),
        Command::Bench(a) => run_bench(a),
        Command::Sweep(a) => sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn problem(x: &Instance) -> Result<(ScaleProblem, Width), Failure> {
    Ok((ScaleProblem::new(x.i, x.d, x.a)?, x.width.into()))
}

fn adds_plan(x: &Instance, p: &ScaleProblem, w: Width) -> Result<ChunkPlan, ScaleError> {
    match x.chunks {
        Some(n) => ChunkPlan::even(p.i, n, w),
        None => plan_chunks(p.i, p.d, p.a, w),
    }
}

fn solve(args: SolveArgs) -> Result<(), Failure> {
    let x = &args.instance;
    let (p, w) = problem(x)?;
    let sign = if args.negative { Sign::Negative } else { Sign::Positive };
    let truth = exact_nearest_half_up(p.i, p.d, p.a);
    let (j, delta) = match args.algo {
        SolveAlgo::Oracle => {
            let (j, delta) = (truth.j.clone(), truth.delta.clone());
            match sign {
                Sign::Positive => (j, delta),
                Sign::Negative => (-j, -delta),
            }
        }
        algo => {
            let sol = match algo {
                SolveAlgo::Div => round_half_up_div(&p, w)?,
                SolveAlgo::Mdid => mdid(&p, w)?,
                SolveAlgo::Ds => direct_search(&p, x.kappa.unwrap_or(p.i), 0, w)?,
                SolveAlgo::Adds => {
                    let s = additive_direct_search(&adds_plan(x, &p, w)?, p.d, p.a)?;
                    NearestSolution { j: s.j, delta: s.delta }
                }
                SolveAlgo::Oracle => unreachable!(),
            };
            // |j| and |delta| fit the lane, so negation cannot overflow.
            let apply = |v: i64| BigInt::from(sign.apply(v).expect("lane value negates"));
            (apply(sol.j), apply(sol.delta))
        }
    };
    let name = match args.algo {
        SolveAlgo::Div => "div",
        SolveAlgo::Mdid => "mdid",
        SolveAlgo::Ds => "ds",
        SolveAlgo::Adds => "adds",
        SolveAlgo::Oracle => "oracle",
    };
    println!("j={j} delta={delta} algo={name} ties={}", truth.tie);
    Ok(())
}

fn check(args: CheckArgs) -> Result<(), Failure> {
    let x = &args.instance;
    let (p, w) = problem(x)?;
    let report: GuardReport = match args.algo {
        CheckAlgo::Div => check_rounded_div(&p, w),
        CheckAlgo::Mdid => check_mdid(&p, w),
        CheckAlgo::Ds => check_ds(&p, x.kappa.unwrap_or(p.i), 0, w),
        CheckAlgo::Adds => {
            let plan = adds_plan(x, &p, w)?;
            println!("chunks={}", plan.len());
            check_adds(&plan, p.d, p.a)
        }
    };
    println!("algorithm={} satisfied={}", report.algorithm, report.satisfied());
    for c in &report.violated {
        println!("violated={c}");
    }
    Ok(())
}

fn fuzz(args: FuzzArgs) -> Result<(), Failure> {
    let report = run_fuzz(args.width.into(), args.trials, args.seed)?;
    print!("{report}");
    if report.passed() {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_FUZZ,
            message: format!("{} invariant violations", report.failures()),
        })
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so a failed run never leaves a partial file.
fn write_atomically(path: &Path, body: impl FnOnce(&mut NamedTempFile) -> Result<(), Failure>) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir)?;
    body(&mut tmp)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Failure::usage(e.to_string()))?;
    Ok(())
}

fn scenario(args: &BenchArgs) -> Result<Preset, Failure> {
    let mut preset = match &args.scenario {
        Some(name) => bench::preset(name, args.seed).ok_or_else(|| {
            Failure::usage(format!(
                "unknown scenario `{name}`; expected one of {}",
                bench::PRESET_NAMES.join(", ")
            ))
        })?,
        None => {
            let (Some(width), Some(d)) = (args.width, args.d) else {
                return Err(Failure::usage("either --scenario or --width, --d and --i are required"));
            };
            let mut cfg = ScenarioConfig::new(width.into(), d, args.i.clone());
            cfg.seed = args.seed;
            Preset::Table(cfg)
        }
    };
    match &mut preset {
        Preset::Table(cfg) => {
            if let Some(w) = args.width {
                cfg.width = w.into();
            }
            if let Some(d) = args.d {
                cfg.d = d;
            }
            if !args.i.is_empty() {
                cfg.i_values = args.i.clone();
                cfg.adds_n_override.clear();
            }
            if !args.n.is_empty() {
                if args.n.len() != cfg.i_values.len() {
                    return Err(Failure::usage("--n needs one chunk count per i"));
                }
                cfg.adds_n_override = cfg.i_values.iter().copied().zip(args.n.iter().copied()).collect();
            }
            if args.auto_n {
                cfg.adds_n_override.clear();
            }
            if !args.algorithms.is_empty() {
                cfg.algorithms = args
                    .algorithms
                    .iter()
                    .map(|s| s.parse::<Algorithm>())
                    .collect::<Result<_, _>>()
                    .map_err(Failure::usage)?;
            }
            if let Some(s) = args.samples {
                cfg.samples = s;
            }
            if let Some(s) = args.skew_ppm {
                cfg.skew_ppm = s;
            }
            cfg.validate()?;
        }
        Preset::Sweep(cfg) => {
            if let Some(s) = args.samples {
                cfg.samples = s;
            }
            cfg.validate()?;
        }
    }
    Ok(preset)
}

fn run_sweep(cfg: &FigureSweepConfig, out: &Path) -> Result<(), Failure> {
    let outcome = bench::run_zeroed_sweep(cfg)?;
    write_atomically(out, |f| Ok(bench::write_sweep_csv(cfg, &outcome.rows, f)?))?;
    println!("wrote {} rows={}", out.display(), outcome.rows.len());
    for (n, e) in &outcome.max_abs {
        println!("N={n} max_abs_error={e}");
    }
    println!("violations={}", outcome.violations);
    Ok(())
}

fn run_bench(args: BenchArgs) -> Result<(), Failure> {
    match scenario(&args)? {
        Preset::Table(cfg) => {
            let rows = bench::run_table_experiment(&cfg)?;
            write_atomically(&args.out, |f| Ok(bench::write_table_csv(&rows, f)?))?;
            println!("wrote {} rows={}", args.out.display(), rows.len());
            if cfg.algorithms.iter().any(|a| a.is_float()) {
                println!("note: float rows are approximate; they depend on the evaluation order i*(D/A)");
            }
            Ok(())
        }
        Preset::Sweep(cfg) => run_sweep(&cfg, &args.out),
    }
}

fn sweep(args: SweepArgs) -> Result<(), Failure> {
    let cfg = FigureSweepConfig {
        width: args.width.into(),
        i_equals_d: args.i_equals_d,
        u_range: args.u_range,
        n_values: args.n,
        samples: args.samples,
        seed: args.seed,
    };
    run_sweep(&cfg, &args.out)
}
