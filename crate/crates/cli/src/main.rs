//! `palin`: command-line front end for palindromic binary tables.

mod casestudy;
mod io;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use palindromic::gaussian::{corr_from_data, median_dichotomize, DataMatrix};
use palindromic::graphs::{fit_graph, FitMethod, Graph, IpfOptions, ModelFit};
use palindromic::params::{
    eta_from_pi, lambda_from_pi, pi_from_eta, pi_from_lambda, pi_from_xi, xi_from_pi, SolverOptions,
};
use palindromic::symmetry::wilks_palindromic;
use palindromic::{CountTable, ParamKind, ProbabilityTable, Subset};
use serde_json::{json, Value};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use io::{read_graph, read_system, read_text, CliError, CliResult, ParamFile, TableFile};

#[derive(Parser)]
#[command(name = "palin", version, about = "Parameters, tests and graphical models for palindromic binary tables")]
struct Cli {
    #[command(flatten)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Format {
    /// Print JSON (default)
    #[arg(long, global = true, conflicts_with = "text")]
    json: bool,
    /// Print a plain-text report
    #[arg(long, global = true)]
    text: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a table or parameter file to another parameterization
    Transform {
        #[arg(long)]
        input: PathBuf,
        /// What the input file holds
        #[arg(long, value_enum, default_value_t = Param::Pi)]
        from: Param,
        #[arg(long, value_enum)]
        to: Param,
        /// Convergence tolerance when inverting eta
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Fit a palindromic concentration-graph model to counts
    Fit {
        #[arg(long)]
        input: PathBuf,
        /// Graph file, or "saturated" for the complete graph
        #[arg(long, default_value = "saturated")]
        graph: String,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        /// Sup-norm tolerance for iterative fitting
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Likelihood-ratio tests of central symmetry and of a graph model
    Test {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        graph: Option<String>,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Median-split each column of a CSV file and tabulate
    Dichotomize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exact table or simulated counts from a triangular system
    Generate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print the exact probabilities instead of sampling
        #[arg(long)]
        exact: bool,
        /// Check feasibility history by history instead of by row sums
        #[arg(long)]
        strict: bool,
    },
    /// Reproduce the grades case study
    Casestudy {
        /// Binary counts to use instead of the bundled table
        #[arg(long)]
        counts: Option<PathBuf>,
        /// Grades CSV to use instead of the bundled data
        #[arg(long)]
        data: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Param {
    Pi,
    Lambda,
    Xi,
    Eta,
}

impl Param {
    fn kind(self) -> Option<ParamKind> {
        match self {
            Param::Pi => None,
            Param::Lambda => Some(ParamKind::LogLinear),
            Param::Xi => Some(ParamKind::Moment),
            Param::Eta => Some(ParamKind::MvLogistic),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Auto,
    Decomposable,
    Ipf,
}

impl From<Method> for FitMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Auto => FitMethod::Auto,
            Method::Decomposable => FitMethod::Decomposable,
            Method::Ipf => FitMethod::Ipf,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(report) => {
            if cli.format.text {
                print!("{}", render::text(&report));
            } else {
                println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("palin: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> CliResult<Value> {
    match command {
        Command::Transform { input, from, to, tol } => transform(&input, from, to, tol),
        Command::Fit { input, graph, method, tol } => {
            let counts = TableFile::read(&input)?.counts()?;
            let g = load_graph(&graph, counts.dim())?;
            let fit = fit_graph(&counts, &g, method.into(), IpfOptions { tol, ..IpfOptions::default() })?;
            Ok(fit_report(&counts, &g, &fit))
        }
        Command::Test { input, graph, method, tol } => {
            let counts = TableFile::read(&input)?.counts()?;
            test(&counts, graph.as_deref(), method, tol)
        }
        Command::Dichotomize { input, seed } => {
            let data = DataMatrix::from_csv(&read_text(&input)?)?;
            dichotomize(&data, seed)
        }
        Command::Generate { input, n, seed, exact, strict } => {
            let sys = read_system(&input, strict)?;
            if exact {
                to_value(&TableFile::from_probabilities(&sys.exact_table()?))
            } else {
                let n = n.ok_or_else(|| CliError::Input("--n is required unless --exact is given".into()))?;
                if n == 0 {
                    return Err(CliError::Input("--n must be at least 1".into()));
                }
                to_value(&TableFile::from_counts(&sys.sample(n, seed)?))
            }
        }
        Command::Casestudy { counts, data } => casestudy::run(counts.as_deref(), data.as_deref()),
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> CliResult<Value> {
    Ok(serde_json::to_value(x).expect("file types serialize"))
}

fn load_graph(spec: &str, d: usize) -> CliResult<Graph> {
    let g = if spec == "saturated" { Graph::complete(d)? } else { read_graph(&PathBuf::from(spec))? };
    if g.dim() != d {
        return Err(CliError::Input(format!("graph has {} nodes but the table has {d} variables", g.dim())));
    }
    Ok(g)
}

fn transform(input: &std::path::Path, from: Param, to: Param, tol: f64) -> CliResult<Value> {
    let pi: ProbabilityTable = match from.kind() {
        None => TableFile::read(input)?.probabilities()?,
        Some(kind) => {
            let p = ParamFile::read(input, kind)?;
            match kind {
                ParamKind::LogLinear => pi_from_lambda(&p)?,
                ParamKind::Moment => pi_from_xi(&p)?,
                ParamKind::MvLogistic => pi_from_eta(&p, SolverOptions { tol, ..SolverOptions::default() })?,
            }
        }
    };
    let out = match to {
        Param::Pi => return to_value(&TableFile::from_probabilities(&pi)),
        Param::Lambda => lambda_from_pi(&pi),
        Param::Xi => xi_from_pi(&pi),
        Param::Eta => eta_from_pi(&pi),
    };
    to_value(&ParamFile::from_params(&out))
}

/// Upper tail of χ²(df); 1 for zero degrees of freedom.
pub(crate) fn p_value(w: f64, df: usize) -> f64 {
    match ChiSquared::new(df as f64) {
        Ok(chi) => 1.0 - chi.cdf(w.max(0.0)),
        Err(_) => 1.0,
    }
}

pub(crate) fn keyed(sets: &[Subset]) -> Value {
    Value::from(sets.iter().map(|s| s.key()).collect::<Vec<_>>())
}

fn test_entry(w: f64, df: usize) -> Value {
    json!({ "w": w, "df": df, "p_value": p_value(w, df) })
}

pub(crate) fn fit_report(counts: &CountTable, g: &Graph, fit: &ModelFit) -> Value {
    let lambda = fit
        .lambda_hat
        .as_ref()
        .map(|l| l.iter().map(|(b, x)| (b.key(), Value::from(x))).collect::<serde_json::Map<_, _>>());
    json!({
        "d": counts.dim(),
        "order": palindromic::tensor::ORDER_TAG,
        "edges": g.edges().iter().map(|&(u, v)| [u, v]).collect::<Vec<_>>(),
        "generators": keyed(&fit.generators),
        "method": if fit.iterations == 0 { "decomposable" } else { "ipf" },
        "iterations": fit.iterations,
        "total": counts.total(),
        "observed": counts.counts(),
        "fitted": fit.fitted.counts(),
        "tests": {
            "total": test_entry(fit.wilks_total, fit.df_total),
            "symmetry": test_entry(fit.wilks_symmetry, fit.df_symmetry),
            "independence": test_entry(fit.wilks_independence, fit.df_independence),
        },
        "lambda": lambda,
        "studentized": fit.studentized.iter().map(|s| json!({
            "subset": s.subset.key(),
            "estimate": s.estimate,
            "se": s.se,
            "z": s.z,
        })).collect::<Vec<_>>(),
    })
}

fn test(counts: &CountTable, graph: Option<&str>, method: Method, tol: f64) -> CliResult<Value> {
    let (w, df) = wilks_palindromic(counts)?;
    let mut report = json!({
        "d": counts.dim(),
        "total": counts.total(),
        "symmetry": test_entry(w, df),
    });
    if let Some(spec) = graph {
        let g = load_graph(spec, counts.dim())?;
        let fit = fit_graph(counts, &g, method.into(), IpfOptions { tol, ..IpfOptions::default() })?;
        report["model"] = json!({
            "generators": keyed(&fit.generators),
            "total": test_entry(fit.wilks_total, fit.df_total),
            "independence": test_entry(fit.wilks_independence, fit.df_independence),
        });
    }
    Ok(report)
}

fn dichotomize(data: &DataMatrix, seed: u64) -> CliResult<Value> {
    let counts = median_dichotomize(data, seed)?;
    let d = counts.dim();
    let margins: Vec<Vec<f64>> = (1..=d).map(|v| counts.marginal(Subset::from_vars(&[v]))).collect();
    let xi_matrix = cross_moments(&counts);
    let mut report = to_value(&TableFile::from_counts(&counts))?;
    report["summary"] = json!({
        "n": data.n(),
        "seed": seed,
        "margins": margins,
        "xi": xi_matrix,
        "pearson": corr_from_data(data).ok().map(|r| {
            (1..=d).map(|s| (1..=d).map(|t| r.get(s, t)).collect::<Vec<_>>()).collect::<Vec<_>>()
        }),
    });
    Ok(report)
}

/// Pairwise `E[(−1)^{a_s + a_t}]` straight from the counts.
fn cross_moments(c: &CountTable) -> Vec<Vec<f64>> {
    let d = c.dim();
    let n = c.total();
    (1..=d)
        .map(|s| {
            (1..=d)
                .map(|t| {
                    let mask = Subset::from_vars(&[s, t]).mask();
                    c.counts()
                        .iter()
                        .enumerate()
                        .map(|(k, x)| if (k & mask).count_ones() % 2 == 0 { *x } else { -*x })
                        .sum::<f64>()
                        / n
                })
                .collect()
        })
        .collect()
}
