use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use percolab::census::{census, giant_ratio, isolated_tree_spectrum};
use percolab::generators::GeneratorSpec;
use percolab::graph::{read_graph_file, write_graph_file};
use percolab::harness::{self, ExperimentConfig};
use percolab::percolation::{percolate_m, percolate_p, write_mask};
use percolab::spectral::{self, SpectralError};
use percolab::theory::TheoryProfile;

#[derive(Parser)]
#[command(name = "percolab", version, about = "Edge percolation on d-regular pseudo-random graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    P,
    M,
}

#[derive(Subcommand)]
enum Command {
    /// Build a host graph and write it as an edge list.
    Generate {
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate the second-largest absolute adjacency eigenvalue.
    Spectra {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = spectral::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = spectral::DEFAULT_MAX_ITER)]
        max_iter: usize,
        /// Force the dense eigensolver.
        #[arg(long)]
        exact: bool,
    },
    /// Audit the edge-discrepancy bound on random vertex-set pairs.
    Mixing {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use this lambda instead of estimating it.
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Percolate a graph once and print its component census.
    Census {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        model: ModelArg,
        /// p for the p-model, m (edge count) for the m-model.
        #[arg(long)]
        param: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
        /// Also dump the percolation mask here.
        #[arg(long)]
        mask_out: Option<PathBuf>,
    },
    /// Print every analytic prediction for alpha as JSON.
    Theory {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        omega: Option<f64>,
    },
    /// Run a configured experiment; exit code 0 iff every check passes.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run a configured experiment at several alphas and write sweep.csv.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        alphas: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn load_config(path: &PathBuf, workers: Option<usize>) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut config = ExperimentConfig::from_json(&text)?;
    if workers.is_some() {
        config.workers = workers;
    }
    Ok(config)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate { family, n, d, q, seed, out } => {
            let spec = GeneratorSpec::from_parts(&family, n, d, q, seed)?;
            let g = spec.generate()?;
            write_graph_file(&g, &out)?;
            println!("{}: n={} d={} m={} -> {}", spec.label(), g.n(), g.d(), g.m(), out.display());
        }
        Command::Spectra { graph, tol, max_iter, exact } => {
            let g = read_graph_file(&graph)?;
            let result = if exact {
                spectral::dense_exact(&g)
            } else {
                spectral::estimate_lambda(&g, tol, max_iter)
            };
            let (est, converged) = match result {
                Ok(est) => (est, true),
                Err(SpectralError::NotConverged { best }) => (best, false),
                Err(e) => return Err(e.into()),
            };
            println!("lambda {:.12}", est.lambda);
            println!("method {:?}", est.method);
            println!("iterations {}", est.iterations);
            println!("residual {:.3e}", est.residual);
            println!("d {}", g.d());
            if !converged {
                eprintln!("warning: not converged within {max_iter} iterations");
                return Ok(ExitCode::from(2));
            }
        }
        Command::Mixing { graph, samples, seed, lambda } => {
            let g = read_graph_file(&graph)?;
            let lambda = match lambda {
                Some(l) => l,
                None => match spectral::estimate_lambda(&g, spectral::DEFAULT_TOL, spectral::DEFAULT_MAX_ITER) {
                    Ok(e) => e.lambda,
                    Err(SpectralError::NotConverged { best }) => best.lambda,
                    Err(e) => return Err(e.into()),
                },
            };
            let audit = spectral::mixing_audit(&g, lambda, samples, seed);
            println!("lambda {lambda:.12}");
            println!("samples {}", audit.samples);
            println!("violations {}", audit.violations);
            println!("worst_discrepancy_over_bound {:.9}", audit.worst_ratio);
            if audit.violations > 0 {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Census { graph, model, param, seed, json, mask_out } => {
            let g = read_graph_file(&graph)?;
            let sample = match model {
                ModelArg::P => percolate_p(&g, param, seed)?,
                ModelArg::M => {
                    if param < 0.0 || param.fract() != 0.0 {
                        bail!("m must be a non-negative integer, got {param}");
                    }
                    percolate_m(&g, param as usize, seed)?
                }
            };
            if let Some(path) = mask_out {
                write_mask(&sample, fs::File::create(&path)?)?;
            }
            let c = census(&g, &sample)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&c)?);
            } else {
                let (frac, ratio) = giant_ratio(&c);
                let (tree, tree_frac) = isolated_tree_spectrum(&c);
                println!("retained {}", sample.retained);
                println!("giant_size {} ({frac:.6} of n)", c.giant_size);
                println!("giant_edges {} ({ratio:.6} per vertex)", c.giant_edges);
                println!("second_size {}", c.second_size);
                println!("largest_isolated_tree {tree}");
                println!("tree_vertex_fraction {tree_frac:.6}");
                println!("unicyclic_vertices {}", c.unicyclic_vertices());
                println!("complex_components {}", c.comp.total());
            }
        }
        Command::Theory { alpha, n, omega } => {
            let profile = TheoryProfile::new(alpha, n, omega)?;
            println!("{}", serde_json::to_string_pretty(&profile)?);
        }
        Command::Experiment { config, out, workers } => {
            let config = load_config(&config, workers)?;
            let report = harness::run_experiment(&config)?;
            harness::write_outputs(&report, &out)?;
            for v in &report.verdicts {
                println!(
                    "{:<26} {} predicted={:.6} observed={:.6} margin={:.6}  {}",
                    serde_json::to_value(v.check)?.as_str().unwrap_or_default(),
                    if v.pass { "PASS" } else { "FAIL" },
                    v.predicted,
                    v.observed,
                    v.margin,
                    v.detail
                );
            }
            if !report.all_pass() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Sweep { config, alphas, out, workers } => {
            let config = load_config(&config, workers)?;
            let reports = harness::sweep_alpha(&config, &alphas)?;
            harness::write_sweep(&reports, &out)?;
            print!("{}", harness::sweep_csv(&reports)?);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
