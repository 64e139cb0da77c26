//! `gfz`: apply, verify, fit, profile and time graph filters from the shell.
//!
//! Exit codes: 0 success, 1 domain or verification failure, 2 usage error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use gfz_core::approx::{
    chebyshev_fit, convergence_curve, curve_csv, poly_fit, rational_fit, FitResult, TargetKind, TargetResponse,
    DEFAULT_SAMPLES,
};
use gfz_core::bench::{bench_csv, ordering_violations, run_bench, BenchConfig};
use gfz_core::diagnostics::{is_bipartite_spectrum, smoothing_trajectory};
use gfz_core::generators::random_features;
use gfz_core::io::{fmt_sig, format_matrix, load_features};
use gfz_core::sampler::{sample_walks, sample_walks_2nd};
use gfz_core::spectral::{decompose_graph, BasisCache, SpectralBasis};
use gfz_core::zoo::{apply_spatial, apply_spectral, catalog_table, lookup, registry, verify_with_basis, REGISTRY};
use gfz_core::{load_edge_list, Family, Graph, NormKind, OperatorSpec, SpectralConfig};
use nalgebra::DMatrix;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "gfz", version, about = "Dual-route graph filters", arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Route {
    Spatial,
    Spectral,
}

#[derive(clap::Args)]
struct Input {
    /// Edge list: `u<TAB>v[<TAB>weight]` per line
    #[arg(long)]
    graph: PathBuf,
    /// Feature CSV; random normal features (see --width, --seed) when omitted
    #[arg(long)]
    features: Option<PathBuf>,
    /// Columns of the random features
    #[arg(long, default_value_t = 8)]
    width: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

impl Input {
    fn load(&self) -> Result<(Graph, DMatrix<f64>)> {
        let g = load_edge_list(&self.graph).with_context(|| format!("reading {}", self.graph.display()))?;
        let x = match &self.features {
            Some(p) => load_features(p).with_context(|| format!("reading {}", p.display()))?,
            None => random_features(g.n(), self.width, self.seed),
        };
        Ok((g, x))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the operator catalog
    List {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Filter features with one operator
    Apply {
        #[command(flatten)]
        input: Input,
        /// `name[:key=value,...]`, list values separated by `/`
        #[arg(long)]
        op: String,
        #[arg(long)]
        norm: Option<NormKind>,
        #[arg(long, value_enum, default_value_t = Route::Spatial)]
        route: Route,
        /// Directory for cached eigenbases
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare spatial and spectral routes; JSON report
    Verify {
        #[command(flatten)]
        input: Input,
        /// Operators to check (repeatable); all registry operators by default
        #[arg(long)]
        op: Vec<String>,
        #[arg(long)]
        norm: Option<NormKind>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit a target response with polynomial, Chebyshev and rational fitters
    Approx {
        #[arg(long, default_value = "sign")]
        target: TargetKind,
        /// Least-squares polynomial degree
        #[arg(long)]
        poly: Option<usize>,
        /// Chebyshev interpolation degree
        #[arg(long)]
        chebyshev: Option<usize>,
        /// Rational type as `m,n`
        #[arg(long)]
        rational: Option<String>,
        /// Comma-separated budgets; emits a convergence curve instead
        #[arg(long)]
        budgets: Option<String>,
        #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        hi: f64,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        /// Half-width of the window left out around a jump
        #[arg(long)]
        exclusion: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Over-smoothing trajectory of repeated propagation
    Oversmooth {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        op: String,
        #[arg(long)]
        norm: Option<NormKind>,
        /// Number of applications
        #[arg(long, default_value_t = 50)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time the operator families on synthetic graphs
    Bench {
        /// Comma-separated: linear, polynomial, rational
        #[arg(long, default_value = "linear,polynomial,rational")]
        families: String,
        /// Comma-separated ascending node counts
        #[arg(long, default_value = "500,1000,2000")]
        sizes: String,
        /// Polynomial order
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a random-walk corpus
    Sample {
        #[arg(long)]
        graph: PathBuf,
        /// Walks started from each node
        #[arg(long, default_value_t = 10)]
        walks: usize,
        /// Nodes per walk
        #[arg(long, default_value_t = 10)]
        len: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Return parameter of a second-order walk
        #[arg(long)]
        p: Option<f64>,
        /// In-out parameter of a second-order walk
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn operator(text: &str, norm: Option<NormKind>) -> Result<OperatorSpec> {
    let spec = lookup(text)?;
    Ok(match norm {
        Some(kind) => spec.with_norm(kind)?,
        None => spec,
    })
}

fn partner_basis(spec: &OperatorSpec, g: &Graph, cache: Option<&Path>) -> Result<SpectralBasis> {
    let Some(kind) = spec.norm_kind.spectral_partner() else {
        bail!("{} has no spectral route over {}", spec.name, spec.norm_kind);
    };
    let cfg = SpectralConfig::from_env()?;
    Ok(match cache {
        Some(dir) => BasisCache::new(dir).get_or_compute(g, kind, &cfg)?,
        None => decompose_graph(g, kind, &cfg)?,
    })
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| anyhow::anyhow!("bad {what} entry {s:?}")))
        .collect()
}

#[derive(Serialize)]
struct VerifyEntry {
    name: String,
    norm_kind: String,
    max_err: f64,
    mean_err: f64,
    pass: bool,
    bipartite: bool,
}

fn verify(input: &Input, ops: &[String], norm: Option<NormKind>, tol: f64, out: Option<&Path>) -> Result<ExitCode> {
    if tol.is_nan() || tol < 0.0 {
        bail!("tolerance must be ≥ 0, got {tol}");
    }
    let (g, x) = input.load()?;
    let specs: Vec<OperatorSpec> = if ops.is_empty() {
        REGISTRY.iter().map(|n| operator(n, norm)).collect::<Result<_>>()?
    } else {
        ops.iter().map(|n| operator(n, norm)).collect::<Result<_>>()?
    };
    let mut bases: Vec<(NormKind, SpectralBasis)> = Vec::new();
    let mut entries = Vec::new();
    for spec in &specs {
        let Some(kind) = spec.norm_kind.spectral_partner() else {
            bail!("{} has no spectral route over {}", spec.name, spec.norm_kind);
        };
        if !bases.iter().any(|(k, _)| *k == kind) {
            bases.push((kind, partner_basis(spec, &g, None)?));
        }
        let basis = &bases.iter().find(|(k, _)| *k == kind).unwrap().1;
        let rep = verify_with_basis(spec, &g, basis, &x, tol)?;
        entries.push(VerifyEntry {
            name: rep.name,
            norm_kind: spec.norm_kind.to_string(),
            max_err: rep.max_err,
            mean_err: rep.mean_err,
            pass: rep.pass,
            bipartite: is_bipartite_spectrum(basis),
        });
    }
    let mut text = serde_json::to_string_pretty(&entries)?;
    text.push('\n');
    emit(out, &text)?;
    Ok(if entries.iter().all(|e| e.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn fit_row(target: &TargetResponse, fit: &FitResult) -> String {
    format!(
        "{},{},{},{},{},{},{}\n",
        target.kind,
        fit.fitter.name(),
        fit.num_degree(),
        fit.den_degree(),
        fmt_sig(fit.max_error, 12),
        fmt_sig(fit.full_error, 12),
        fit.iterations
    )
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::List { out } => emit(out.as_deref(), &catalog_table(&registry()))?,
        Command::Apply { input, op, norm, route, cache, out } => {
            let (g, x) = input.load()?;
            let spec = operator(&op, norm)?;
            let z = match route {
                Route::Spatial => apply_spatial(&spec, &g, &x)?,
                Route::Spectral => apply_spectral(&spec, &partner_basis(&spec, &g, cache.as_deref())?, &x)?,
            };
            emit(out.as_deref(), &format_matrix(&z))?;
        }
        Command::Verify { input, op, norm, tol, out } => return verify(&input, &op, norm, tol, out.as_deref()),
        Command::Approx { target, poly, chebyshev, rational, budgets, lo, hi, samples, exclusion, out } => {
            let mut t = TargetResponse::new(target, lo, hi, samples)?;
            if let Some(d) = exclusion {
                t = t.with_exclusion(d);
            }
            if let Some(b) = budgets {
                let rows = convergence_curve(&t, &parse_list::<usize>(&b, "budget")?)?;
                for r in rows.iter().filter_map(|r| r.note.as_ref().map(|n| (r.budget, n))) {
                    eprintln!("K={}: {}", r.0, r.1);
                }
                emit(out.as_deref(), &curve_csv(&rows))?;
                return Ok(ExitCode::SUCCESS);
            }
            if poly.is_none() && chebyshev.is_none() && rational.is_none() {
                bail!("nothing to fit: pass --poly, --chebyshev, --rational or --budgets");
            }
            let mut text = String::from("target,fitter,num_degree,den_degree,max_error,full_error,iterations\n");
            if let Some(k) = poly {
                text.push_str(&fit_row(&t, &poly_fit(&t, k)?));
            }
            if let Some(k) = chebyshev {
                text.push_str(&fit_row(&t, &chebyshev_fit(&t, k)?));
            }
            if let Some(mn) = rational {
                let v = parse_list::<usize>(&mn, "rational type")?;
                let [m, n] = v[..] else {
                    bail!("--rational expects `m,n`, got {mn:?}");
                };
                text.push_str(&fit_row(&t, &rational_fit(&t, m, n)?));
            }
            emit(out.as_deref(), &text)?;
        }
        Command::Oversmooth { input, op, norm, k, out } => {
            let (g, x) = input.load()?;
            let spec = operator(&op, norm)?;
            emit(out.as_deref(), &smoothing_trajectory(&spec, &g, &x, k)?.to_csv())?;
        }
        Command::Bench { families, sizes, k, reps, seed, out } => {
            let cfg = BenchConfig {
                families: parse_list::<Family>(&families, "family")?,
                sizes: parse_list::<usize>(&sizes, "size")?,
                k,
                reps,
                seed,
                ..Default::default()
            };
            let records = run_bench(&cfg)?;
            for v in ordering_violations(&records) {
                eprintln!("ordering inversion: {v}");
            }
            emit(out.as_deref(), &bench_csv(&records))?;
        }
        Command::Sample { graph, walks, len, seed, p, q, out } => {
            let g = load_edge_list(&graph).with_context(|| format!("reading {}", graph.display()))?;
            let corpus = match (p, q) {
                (None, None) => sample_walks(&g, len, walks, seed)?,
                (p, q) => sample_walks_2nd(&g, p.unwrap_or(1.0), q.unwrap_or(1.0), len, walks, seed)?,
            };
            emit(out.as_deref(), &corpus.to_text())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
