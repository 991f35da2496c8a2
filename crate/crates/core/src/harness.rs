//! Config-driven Monte Carlo runs: one host graph, many percolation trials,
//! observed statistics compared against the analytic predictions.

use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::census::{census, giant_ratio, isolated_tree_spectrum, CensusError};
use crate::generators::{GeneratorError, GeneratorSpec};
use crate::graph::Graph;
use crate::percolation::{alpha_to_p, percolate_alpha, Model, PercolationError};
use crate::rng::{trial_seed, RNG_NAME, STREAM_SPLIT_RULE};
use crate::spectral::{self, SpectralError};
use crate::theory::{self, TheoryError, TheoryProfile};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    ConfigInvalid(String),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Percolation(#[from] PercolationError),
    #[error(transparent)]
    Census(#[from] CensusError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    GiantFraction,
    GiantEdgeRatio,
    SecondComponent,
    TreeFraction,
    LargestIsolatedTree,
    ForbiddenInterval,
    UnicyclicBudget,
    ComplexSmallComponents,
    MixingAudit,
}

/// Finite-n pass/fail thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Max `|mean giant fraction - predicted|`.
    pub giant_fraction: f64,
    /// Max `|mean giant edges/vertices - predicted|`.
    pub giant_edge_ratio: f64,
    /// Below criticality: every trial's tree-vertex fraction must reach this.
    pub tree_fraction_floor: f64,
    /// Above criticality: every trial's tree-vertex fraction within this of `alpha_bar/alpha`.
    pub tree_fraction_abs: f64,
    /// Share of trials whose largest isolated tree must fall in the window.
    pub largest_tree_pass_rate: f64,
    /// Max mean number of vertices on unicyclic components.
    pub unicyclic_mean_max: f64,
    /// Share of trials that must have no complex component besides the giant.
    pub complex_free_pass_rate: f64,
    /// Random `(B, C)` pairs for the mixing audit.
    pub mixing_samples: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            giant_fraction: 0.02,
            giant_edge_ratio: 0.03,
            tree_fraction_floor: 0.99,
            tree_fraction_abs: 0.02,
            largest_tree_pass_rate: 0.9,
            unicyclic_mean_max: 20.0,
            complex_free_pass_rate: 0.9,
            mixing_samples: 200,
        }
    }
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub generator: GeneratorSpec,
    pub model: Model,
    pub alpha: f64,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub checks: Vec<Check>,
    /// Half-width of the largest-tree window; defaults to `2 ln ln n`.
    #[serde(default)]
    pub omega: Option<f64>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::ConfigInvalid(msg));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!("unsupported schema_version {}", self.schema_version));
        }
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        if (self.alpha - 1.0).abs() < theory::CRITICAL_BAND {
            return bad("alpha = 1 is excluded".into());
        }
        if self.alpha < 1.0 && self.checks.contains(&Check::GiantEdgeRatio) {
            return bad("giant_edge_ratio is only predicted for alpha > 1".into());
        }
        if self.workers == Some(0) {
            return bad("workers must be >= 1".into());
        }
        Ok(())
    }
}

/// Statistics of one percolation trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRow {
    pub trial: usize,
    pub seed: u64,
    pub retained: usize,
    pub giant_size: usize,
    pub second_size: usize,
    pub giant_edges: usize,
    pub giant_fraction: f64,
    pub giant_edge_ratio: f64,
    pub largest_isolated_tree: usize,
    pub tree_vertex_fraction: f64,
    pub unicyclic_vertices: u64,
    /// Complex components other than the giant (all of them below criticality).
    pub complex_small_count: u64,
    /// Components whose size lies in the forbidden interval.
    pub forbidden_hits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnStat {
    pub column: &'static str,
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub check: Check,
    pub predicted: f64,
    pub observed: f64,
    /// Distance to the failure threshold; negative when failing.
    pub margin: f64,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphSummary {
    pub label: String,
    pub n: usize,
    pub d: usize,
    pub m: usize,
    pub fingerprint: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub graph: GraphSummary,
    pub theory: TheoryProfile,
    pub lambda: Option<f64>,
    pub rows: Vec<TrialRow>,
    pub aggregates: Vec<ColumnStat>,
    pub verdicts: Vec<Verdict>,
}

impl ExperimentReport {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn verdict(&self, check: Check) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.check == check)
    }

    pub fn column(&self, name: &str) -> Option<&ColumnStat> {
        self.aggregates.iter().find(|c| c.column == name)
    }
}

/// Mean and sample standard deviation.
pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn run_trial(g: &Graph, config: &ExperimentConfig, trial: usize, forbidden: Option<(f64, f64)>) -> Result<TrialRow, HarnessError> {
    let seed = trial_seed(config.master_seed, trial as u64);
    let sample = percolate_alpha(g, config.model, config.alpha, seed)?;
    let c = census(g, &sample)?;
    let (giant_fraction, giant_edge_ratio) = giant_ratio(&c);
    let (largest_isolated_tree, tree_vertex_fraction) = isolated_tree_spectrum(&c);
    let forbidden_hits = forbidden.map_or(0, |(lo, hi)| {
        c.records
            .iter()
            .filter(|r| (r.size as f64) >= lo && (r.size as f64) <= hi)
            .count()
    });
    Ok(TrialRow {
        trial,
        seed,
        retained: sample.retained,
        giant_size: c.giant_size,
        second_size: c.second_size,
        giant_edges: c.giant_edges,
        giant_fraction,
        giant_edge_ratio,
        largest_isolated_tree,
        tree_vertex_fraction,
        unicyclic_vertices: c.unicyclic_vertices(),
        complex_small_count: c.complex_count(config.alpha > 1.0),
        forbidden_hits,
    })
}

fn aggregates(rows: &[TrialRow]) -> Vec<ColumnStat> {
    type Column = (&'static str, fn(&TrialRow) -> f64);
    let columns: [Column; 10] = [
        ("retained", |r| r.retained as f64),
        ("giant_size", |r| r.giant_size as f64),
        ("second_size", |r| r.second_size as f64),
        ("giant_edges", |r| r.giant_edges as f64),
        ("giant_fraction", |r| r.giant_fraction),
        ("giant_edge_ratio", |r| r.giant_edge_ratio),
        ("largest_isolated_tree", |r| r.largest_isolated_tree as f64),
        ("tree_vertex_fraction", |r| r.tree_vertex_fraction),
        ("unicyclic_vertices", |r| r.unicyclic_vertices as f64),
        ("complex_small_count", |r| r.complex_small_count as f64),
    ];
    columns
        .iter()
        .map(|(column, get)| {
            let xs: Vec<f64> = rows.iter().map(get).collect();
            let (mean, sd) = mean_sd(&xs);
            ColumnStat { column, mean, sd }
        })
        .collect()
}

fn verdict(check: Check, predicted: f64, observed: f64, margin: f64, detail: String) -> Verdict {
    Verdict {
        check,
        predicted,
        observed,
        margin,
        pass: margin >= 0.0,
        detail,
    }
}

/// Runs `config` on an already generated host graph.
pub fn run_on_graph(g: &Graph, config: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    config.validate()?;
    if config.model == Model::Gp {
        alpha_to_p(config.alpha, g.d())?;
    }
    let theory = TheoryProfile::new(config.alpha, Some(g.n()), config.omega)?;
    let forbidden = theory::forbidden_interval(g.n(), config.alpha).ok();

    let run_all = || -> Result<Vec<TrialRow>, HarnessError> {
        (0..config.trials)
            .into_par_iter()
            .map(|t| run_trial(g, config, t, forbidden))
            .collect()
    };
    let rows = match config.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| HarnessError::ConfigInvalid(e.to_string()))?
            .install(run_all)?,
        None => run_all()?,
    };
    let aggregates = aggregates(&rows);
    let tol = &config.tolerances;
    let trials = rows.len() as f64;
    let mean_of = |name: &str| aggregates.iter().find(|c| c.column == name).unwrap().mean;
    let supercritical = config.alpha > 1.0;

    let mut lambda = None;
    let mut verdicts = Vec::new();
    for &check in &config.checks {
        let v = match check {
            Check::GiantFraction => {
                let (pred, obs) = (theory.giant_fraction, mean_of("giant_fraction"));
                verdict(check, pred, obs, tol.giant_fraction - (obs - pred).abs(), format!("|mean - predicted| <= {}", tol.giant_fraction))
            }
            Check::GiantEdgeRatio => {
                let pred = theory.giant_edge_ratio.expect("validated: alpha > 1");
                let obs = mean_of("giant_edge_ratio");
                verdict(check, pred, obs, tol.giant_edge_ratio - (obs - pred).abs(), format!("|mean - predicted| <= {}", tol.giant_edge_ratio))
            }
            Check::SecondComponent => {
                let (lo, _) = forbidden.ok_or_else(|| HarnessError::ConfigInvalid("forbidden interval empty for this n".into()))?;
                let worst = rows
                    .iter()
                    .map(|r| if supercritical { r.second_size } else { r.giant_size })
                    .max()
                    .unwrap_or(0) as f64;
                let which = if supercritical { "second-largest" } else { "largest" };
                verdict(check, lo, worst, lo - worst, format!("{which} component < ln(n)/(alpha gamma) in every trial"))
            }
            Check::ForbiddenInterval => {
                let (lo, hi) = forbidden.ok_or_else(|| HarnessError::ConfigInvalid("forbidden interval empty for this n".into()))?;
                let hits: usize = rows.iter().map(|r| r.forbidden_hits).sum();
                verdict(check, 0.0, hits as f64, -(hits as f64), format!("no component size in [{lo:.3}, {hi:.3}]"))
            }
            Check::TreeFraction => {
                let pred = theory.f_alpha;
                if supercritical {
                    let worst = rows.iter().map(|r| (r.tree_vertex_fraction - pred).abs()).fold(0.0, f64::max);
                    verdict(check, pred, mean_of("tree_vertex_fraction"), tol.tree_fraction_abs - worst, format!("every trial within {} of alpha_bar/alpha", tol.tree_fraction_abs))
                } else {
                    let min = rows.iter().map(|r| r.tree_vertex_fraction).fold(1.0, f64::min);
                    verdict(check, pred, min, min - tol.tree_fraction_floor, format!("every trial >= {}", tol.tree_fraction_floor))
                }
            }
            Check::LargestIsolatedTree => {
                let sizes = theory.sizes.as_ref().expect("n given");
                let (lo, hi) = sizes
                    .largest_tree_window
                    .ok_or_else(|| HarnessError::ConfigInvalid("largest-tree window undefined for this n".into()))?;
                let inside = rows
                    .iter()
                    .filter(|r| (r.largest_isolated_tree as f64) >= lo && (r.largest_isolated_tree as f64) <= hi)
                    .count() as f64;
                verdict(check, 0.5 * (lo + hi), mean_of("largest_isolated_tree"), inside / trials - tol.largest_tree_pass_rate, format!("{inside}/{trials} trials in [{lo:.3}, {hi:.3}], need rate {}", tol.largest_tree_pass_rate))
            }
            Check::UnicyclicBudget => {
                let obs = mean_of("unicyclic_vertices");
                verdict(check, 0.0, obs, tol.unicyclic_mean_max - obs, format!("mean <= {}", tol.unicyclic_mean_max))
            }
            Check::ComplexSmallComponents => {
                let clean = rows.iter().filter(|r| r.complex_small_count == 0).count() as f64;
                verdict(check, 0.0, mean_of("complex_small_count"), clean / trials - tol.complex_free_pass_rate, format!("{clean}/{trials} trials free of small complex components, need rate {}", tol.complex_free_pass_rate))
            }
            Check::MixingAudit => {
                let est = match spectral::estimate_lambda(g, spectral::DEFAULT_TOL, spectral::DEFAULT_MAX_ITER) {
                    Ok(e) => e,
                    Err(SpectralError::NotConverged { best }) => best,
                    Err(e) => return Err(e.into()),
                };
                lambda = Some(est.lambda);
                let audit = spectral::mixing_audit(g, est.lambda, tol.mixing_samples, trial_seed(config.master_seed, u64::MAX));
                verdict(check, 1.0, audit.worst_ratio, -(audit.violations as f64), format!("{} violations in {} samples, lambda = {:.9} ({:?})", audit.violations, audit.samples, est.lambda, est.method))
            }
        };
        verdicts.push(v);
    }

    Ok(ExperimentReport {
        config: config.clone(),
        graph: GraphSummary {
            label: config.generator.label(),
            n: g.n(),
            d: g.d(),
            m: g.m(),
            fingerprint: format!("{:016x}", g.fingerprint()),
        },
        theory,
        lambda,
        rows,
        aggregates,
        verdicts,
    })
}

/// Generates the host graph and runs every trial.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    config.validate()?;
    let g = config.generator.generate()?;
    run_on_graph(&g, config)
}

/// One report per alpha on a single host graph.
pub fn sweep_alpha(base: &ExperimentConfig, alphas: &[f64]) -> Result<Vec<ExperimentReport>, HarnessError> {
    if alphas.is_empty() {
        return Err(HarnessError::ConfigInvalid("no alphas given".into()));
    }
    let configs: Vec<ExperimentConfig> = alphas
        .iter()
        .map(|&alpha| ExperimentConfig { alpha, ..base.clone() })
        .collect();
    for c in &configs {
        c.validate()?;
    }
    let g = base.generator.generate()?;
    configs.iter().map(|c| run_on_graph(&g, c)).collect()
}

fn metadata_line() -> String {
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("# generated_at_unix={now} rng={RNG_NAME} stream_split={STREAM_SPLIT_RULE}\n")
}

fn csv_body<F>(write: F) -> Result<String, HarnessError>
where
    F: FnOnce(&mut csv::Writer<&mut Vec<u8>>) -> Result<(), HarnessError>,
{
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        write(&mut w)?;
        w.flush()?;
    }
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// Per-trial rows as CSV, without the metadata line.
pub fn rows_csv(report: &ExperimentReport) -> Result<String, HarnessError> {
    csv_body(|w| {
        for row in &report.rows {
            w.serialize(row)?;
        }
        Ok(())
    })
}

/// `check,predicted,observed,margin,pass` as CSV, without the metadata line.
pub fn verdicts_csv(report: &ExperimentReport) -> Result<String, HarnessError> {
    csv_body(|w| {
        w.write_record(["check", "predicted", "observed", "margin", "pass"])?;
        for v in &report.verdicts {
            let name = serde_json::to_value(v.check)?;
            w.write_record([
                name.as_str().unwrap_or_default().to_string(),
                v.predicted.to_string(),
                v.observed.to_string(),
                v.margin.to_string(),
                v.pass.to_string(),
            ])?;
        }
        Ok(())
    })
}

/// `alpha,predicted_fraction,observed_mean,observed_sd`, one line per report.
pub fn sweep_csv(reports: &[ExperimentReport]) -> Result<String, HarnessError> {
    csv_body(|w| {
        w.write_record(["alpha", "predicted_fraction", "observed_mean", "observed_sd"])?;
        for r in reports {
            let col = r.column("giant_fraction").expect("always aggregated");
            w.write_record([
                r.config.alpha.to_string(),
                r.theory.giant_fraction.to_string(),
                col.mean.to_string(),
                col.sd.to_string(),
            ])?;
        }
        Ok(())
    })
}

/// Writes `report.json`, `rows.csv` and `verdicts.csv` into `dir`.
pub fn write_outputs(report: &ExperimentReport, dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir)?;
    let meta = metadata_line();
    let json = serde_json::json!({
        "metadata": {
            "generated_at_unix": SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            "rng": RNG_NAME,
            "stream_split": STREAM_SPLIT_RULE,
        },
        "report": report,
    });
    fs::write(dir.join("report.json"), serde_json::to_string_pretty(&json)?)?;
    fs::write(dir.join("rows.csv"), meta.clone() + &rows_csv(report)?)?;
    fs::write(dir.join("verdicts.csv"), meta + &verdicts_csv(report)?)?;
    Ok(())
}

/// Writes `sweep.csv` into `dir`.
pub fn write_sweep(reports: &[ExperimentReport], dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("sweep.csv"), metadata_line() + &sweep_csv(reports)?)?;
    Ok(())
}
