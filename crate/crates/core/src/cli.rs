//! The `corefair` command line.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for invalid input or I/O
//! failures, 3 when a verification suite fails.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::algorithms::alg_greedy_ball;
use crate::audit::{audit, AuditQuery};
use crate::baselines::ObjectiveKind;
use crate::bench::{run_algorithm, run_bench, verify_bounds, AlgorithmSpec, BenchConfig, LambdaChoice, SuiteStatus};
use crate::error::{Error, Result};
use crate::instance::{
    gen_appendix_tree, gen_clique, gen_gaussian, gen_k4, gen_kmedians_bad, gen_line_alpha_lb,
    gen_line_beta_lb, load_clustering, load_instance, save_clustering, save_instance, Candidates,
    GaussianParams, Instance, DEFAULT_PART_SPACING,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "corefair", version, about = "Proportionally fair clustering with core audits")]
struct Cli {
    /// Worker threads for parallel work (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a built-in instance as JSON.
    Generate {
        #[arg(long, value_enum)]
        name: Generator,
        /// Generator parameters as a JSON object, e.g. '{"k": 6}'.
        #[arg(long)]
        params: Option<String>,
        /// Replace the instance's k.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a clustering procedure on an instance file.
    Cluster {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        alg: Alg,
        /// `quota` (⌈n/k⌉), `quota-plus-one` (⌈n/(k+1)⌉) or an integer.
        #[arg(long, default_value = "quota")]
        lambda: String,
        /// Objective for the refined procedure.
        #[arg(long, value_enum, default_value = "kmeans")]
        obj: Obj,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the greedy event log here (greedy only).
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Audit a clustering against the core.
    Audit {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        clustering: PathBuf,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        /// Result JSON; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a comparison grid from a JSON config.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a verification suite (or `all`).
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the reports as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Generator {
    K4,
    LineBeta,
    LineAlpha,
    Clique,
    AppendixTree,
    KmediansBad,
    Gaussian,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Alg {
    Line,
    Tree,
    Greedy,
    Mst,
    Refined,
    Kmeans,
    Kmedians,
    Optimal,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Obj {
    Kmeans,
    Kmedians,
    Medoid,
}

impl From<Obj> for ObjectiveKind {
    fn from(o: Obj) -> Self {
        match o {
            Obj::Kmeans => ObjectiveKind::KMeansSq,
            Obj::Kmedians => ObjectiveKind::KMediansL1,
            Obj::Medoid => ObjectiveKind::MetricMedoid,
        }
    }
}

fn param(params: &Value, key: &str, default: usize) -> Result<usize> {
    match params.get(key) {
        None => Ok(default),
        Some(v) => v
            .as_u64()
            .map(|x| x as usize)
            .ok_or_else(|| Error::validation(format!("params.{key}"), "expected a non-negative integer")),
    }
}

fn generate(name: Generator, params: Option<&str>, k: Option<usize>) -> Result<Instance> {
    let params: Value = match params {
        Some(text) => serde_json::from_str(text)?,
        None => Value::Object(Default::default()),
    };
    if !params.is_object() {
        return Err(Error::validation("params", "expected a JSON object"));
    }
    let inst = match name {
        Generator::K4 => gen_k4(),
        Generator::LineBeta => gen_line_beta_lb(param(&params, "k", 6)?)?,
        Generator::LineAlpha => {
            let spacing = match params.get("spacing") {
                None => DEFAULT_PART_SPACING,
                Some(v) => v
                    .as_f64()
                    .ok_or_else(|| Error::validation("params.spacing", "expected a number"))?,
            };
            gen_line_alpha_lb(param(&params, "c", 10)?, spacing)?
        }
        Generator::Clique => gen_clique(param(&params, "n", 10)?)?,
        Generator::AppendixTree => gen_appendix_tree(),
        Generator::KmediansBad => gen_kmedians_bad(param(&params, "m", 7)?)?,
        Generator::Gaussian => gen_gaussian(&serde_json::from_value::<GaussianParams>(params)?)?,
    };
    match k {
        Some(k) => inst.with_k(k),
        None => Ok(inst),
    }
}

fn lambda_choice(text: &str) -> Result<LambdaChoice> {
    match text {
        "quota" => Ok(LambdaChoice::Quota),
        "quota-plus-one" => Ok(LambdaChoice::QuotaPlusOne),
        other => other
            .parse()
            .map(LambdaChoice::Fixed)
            .map_err(|_| Error::validation("lambda", format!("`{other}` is not quota, quota-plus-one or an integer"))),
    }
}

fn write_json(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, format!("{text}\n"))?;
    Ok(())
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Generate { name, params, k, out } => {
            let inst = generate(name, params.as_deref(), k)?;
            save_instance(&inst, &out)?;
            println!("{}: n = {}, k = {} -> {}", inst.label, inst.n(), inst.k(), out.display());
        }
        Command::Cluster { instance, alg, lambda, obj, seed, trace, out } => {
            let inst = load_instance(&instance)?;
            let choice = lambda_choice(&lambda)?;
            if trace.is_some() && !matches!(alg, Alg::Greedy) {
                return Err(Error::validation("trace", "only the greedy procedure records a trace"));
            }
            let y = match alg {
                Alg::Greedy => {
                    let finite = match inst.candidates() {
                        Candidates::ContinuousLine => inst.with_agent_candidates(),
                        Candidates::Finite(_) => inst.clone(),
                    };
                    let (y, log) = alg_greedy_ball(&finite)?;
                    if let Some(path) = &trace {
                        write_json(path, &serde_json::to_string_pretty(&log)?)?;
                    }
                    y
                }
                Alg::Line => run_algorithm(&inst, AlgorithmSpec::Line(choice), seed)?,
                Alg::Tree => run_algorithm(&inst, AlgorithmSpec::Tree(choice), seed)?,
                Alg::Mst => run_algorithm(&inst, AlgorithmSpec::Mst, seed)?,
                Alg::Refined => run_algorithm(&inst, AlgorithmSpec::Refined(obj.into()), seed)?,
                Alg::Kmeans => run_algorithm(&inst, AlgorithmSpec::KMeans, seed)?,
                Alg::Kmedians => run_algorithm(&inst, AlgorithmSpec::KMedians, seed)?,
                Alg::Optimal => run_algorithm(&inst, AlgorithmSpec::Optimal, seed)?,
            };
            save_clustering(&y, &out)?;
            println!("{} centers -> {}", y.centers.len(), out.display());
        }
        Command::Audit { instance, clustering, alpha, beta, out } => {
            let inst = load_instance(&instance)?;
            let y = load_clustering(&clustering)?.validate_for(&inst)?;
            let result = audit(&inst, &y.centers, AuditQuery { alpha, beta })?;
            let text = result.to_json()?;
            match out {
                Some(path) => {
                    write_json(&path, &text)?;
                    println!(
                        "beta_min = {}, alpha_sup = {}, in_core = {}",
                        result.beta_min, result.alpha_sup, result.in_core
                    );
                }
                None => println!("{text}"),
            }
        }
        Command::Bench { config, out } => {
            let config = BenchConfig::load(&config)?;
            let dir = run_bench(&config, &out)?;
            println!("{}", dir.display());
        }
        Command::Verify { suite, trials, seed, json } => {
            let reports = verify_bounds(&suite, trials, seed)?;
            for r in &reports {
                println!("{}", r.summary());
            }
            if let Some(path) = json {
                write_json(&path, &serde_json::to_string_pretty(&reports)?)?;
            }
            if reports.iter().any(|r| r.status == SuiteStatus::Failed) {
                return Ok(EXIT_VERIFY_FAILED);
            }
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return EXIT_USAGE;
        }
        pool = pool.num_threads(jobs);
    }
    let pool = match pool.build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    match pool.install(|| dispatch(cli.command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}

pub fn main() -> i32 {
    run(std::env::args_os())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors() {
        assert_eq!(run(["corefair"]), EXIT_USAGE);
        assert_eq!(run(["corefair", "cluster", "--alg", "nope"]), EXIT_USAGE);
        assert_eq!(run(["corefair", "--help"]), EXIT_OK);
        assert_eq!(run(["corefair", "--jobs", "0", "verify", "--suite", "k4-empty"]), EXIT_USAGE);
    }

    #[test]
    fn generate_params() {
        let inst = generate(Generator::LineBeta, Some(r#"{"k": 2}"#), None).unwrap();
        assert_eq!((inst.n(), inst.k()), (6, 2));
        let inst = generate(Generator::Clique, None, Some(3)).unwrap();
        assert_eq!((inst.n(), inst.k()), (10, 3));
        assert!(generate(Generator::Clique, Some(r#"{"n": "x"}"#), None).is_err());
        assert!(generate(Generator::Clique, Some("[1]"), None).is_err());
        let g = generate(Generator::Gaussian, Some(r#"{"n": 40, "seed": 2}"#), None).unwrap();
        assert_eq!(g.n(), 40);
    }

    #[test]
    fn lambda_parsing() {
        assert_eq!(lambda_choice("quota").unwrap(), LambdaChoice::Quota);
        assert_eq!(lambda_choice("7").unwrap(), LambdaChoice::Fixed(7));
        assert!(lambda_choice("seven").is_err());
    }

    #[test]
    fn unknown_suite_is_invalid_input() {
        assert_eq!(run(["corefair", "verify", "--suite", "nope"]), EXIT_INVALID);
        assert_eq!(run(["corefair", "--jobs", "2", "verify", "--suite", "k4-empty"]), EXIT_OK);
    }
}
