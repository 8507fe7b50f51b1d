use std::collections::HashSet;
use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::precode::PrecoderKind;
use crate::rfadapt::{apply_policy, RfMode};
use crate::scenario::{draw_realization, Codebook, NetworkConfig};
use crate::search::{search, Algorithm, BccMode, Metric, SearchProblem, SearchSettings, DEFAULT_BUDGET};

pub const DEFAULT_MC_RUNS: usize = 500;

/// Environment variable that caps the worker pool size.
pub const WORKERS_ENV: &str = "CFMIMO_WORKERS";

/// One `[[cell]]` table: search settings plus an RF policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    /// Defaults to the settings label, e.g. `linear-II-rate`.
    #[serde(default)]
    pub name: Option<String>,
    pub algorithm: Algorithm,
    #[serde(default)]
    pub metric: Option<Metric>,
    #[serde(default)]
    pub bcc_mode: BccMode,
    #[serde(default = "one")]
    pub n_init: usize,
    #[serde(default = "one")]
    pub n_iter: usize,
    #[serde(default)]
    pub precoder: PrecoderKind,
    #[serde(default = "default_budget")]
    pub exhaustive_budget: u64,
    #[serde(default)]
    pub rf: RfMode,
}

fn one() -> usize {
    1
}

fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

impl CellSpec {
    pub fn from_settings(settings: &SearchSettings, rf: RfMode) -> Self {
        Self {
            name: None,
            algorithm: settings.algorithm,
            metric: Some(settings.metric),
            bcc_mode: settings.bcc_mode,
            n_init: settings.n_init,
            n_iter: settings.n_iter,
            precoder: settings.precoder,
            exhaustive_budget: settings.exhaustive_budget,
            rf,
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn settings(&self) -> SearchSettings {
        SearchSettings {
            algorithm: self.algorithm,
            metric: self.metric.unwrap_or(self.algorithm.default_metric()),
            bcc_mode: self.bcc_mode,
            n_init: self.n_init,
            n_iter: self.n_iter,
            precoder: self.precoder,
            exhaustive_budget: self.exhaustive_budget,
        }
    }

    pub fn resolve(&self) -> Cell {
        let settings = self.settings();
        let name = self.name.clone().unwrap_or_else(|| match self.rf {
            RfMode::Full => settings.label(),
            rf => format!("{}-{rf}", settings.label()),
        });
        Cell { name, settings, rf: self.rf }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub name: String,
    pub settings: SearchSettings,
    pub rf: RfMode,
}

/// Optional output files; command-line flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub records: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub dump: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub network: NetworkConfig,
    #[serde(rename = "cell", default)]
    pub cells: Vec<CellSpec>,
    #[serde(default = "default_runs")]
    pub mc_runs: usize,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_runs() -> usize {
    DEFAULT_MC_RUNS
}

impl ExperimentSpec {
    pub fn new(network: NetworkConfig, cells: Vec<CellSpec>, mc_runs: usize) -> Self {
        Self { network, cells, mc_runs, output: OutputSpec::default() }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Checks everything that can fail before the first run.
    pub fn validate(&self) -> Result<Vec<Cell>> {
        self.network.validate()?;
        if self.mc_runs == 0 {
            return Err(Error::InvalidConfig("mc_runs must be at least 1".into()));
        }
        if self.cells.is_empty() {
            return Err(Error::InvalidConfig("experiment has no cells".into()));
        }
        let cells: Vec<Cell> = self.cells.iter().map(CellSpec::resolve).collect();
        let mut names = HashSet::new();
        for cell in &cells {
            if !names.insert(cell.name.as_str()) {
                return Err(Error::InvalidConfig(format!("duplicate cell name `{}`", cell.name)));
            }
            cell.settings
                .check_network(self.network.users, self.network.codebook_size())
                .map_err(|e| match e {
                    Error::ConfigConflict(m) => Error::ConfigConflict(format!("cell `{}`: {m}", cell.name)),
                    other => other,
                })?;
            if let RfMode::Naive(n) = cell.rf {
                if n == 0 || n > self.network.users {
                    return Err(Error::InvalidConfig(format!("cell `{}`: naive({n}) needs 1 <= n <= K", cell.name)));
                }
            }
        }
        Ok(cells)
    }
}

/// Outcome of one cell on one realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub cell: String,
    pub run_index: u64,
    /// Hash of the realization, identical across cells of one run.
    pub fingerprint: String,
    pub sum_rate: f64,
    /// Per-user rates joined by `;`.
    pub rates: String,
    pub dl_sum: f64,
    pub evaluation_count: u64,
    pub fallback_count: u64,
    pub conflicts: usize,
    /// Sum-rate with every RF chain on (equals `sum_rate` for full RF mode).
    pub full_sum_rate: f64,
    pub saving: f64,
    pub loss: f64,
    pub assignment: String,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub cell: String,
    pub runs: usize,
    pub mean_sum_rate: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    pub mean_user_rate: f64,
    pub mean_evaluations: f64,
    pub fallback_total: u64,
    pub conflict_runs: usize,
    pub mean_saving: f64,
    /// `1 - mean(reduced)/mean(full)`.
    pub loss: f64,
    pub mean_wall_time_s: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub cells: Vec<Cell>,
    /// Sorted by run index, then cell order.
    pub records: Vec<RunRecord>,
    pub summaries: Vec<CellSummary>,
}

impl ExperimentResult {
    pub fn summary(&self, cell: &str) -> Option<&CellSummary> {
        self.summaries.iter().find(|s| s.cell == cell)
    }

    pub fn cell_records<'s>(&'s self, cell: &'s str) -> impl Iterator<Item = &'s RunRecord> + 's {
        self.records.iter().filter(move |r| r.cell == cell)
    }
}

fn worker_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("{WORKERS_ENV} must be a positive integer, got `{v}`")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))
}

/// Runs every cell on `mc_runs` realizations. Each realization is drawn once
/// and shared by all cells.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    let cells = spec.validate()?;
    let net = &spec.network;
    let codebook = Codebook::dft(net.antennas, net.codebook_size())?;
    let p_t_w = net.p_t_watts();
    let per_run = |run: u64| -> Result<Vec<RunRecord>> {
        let realization = draw_realization(net, run)?;
        let fingerprint = format!("{:016x}", realization.fingerprint());
        let problem = SearchProblem::new(&realization, &codebook, p_t_w, net.master_seed);
        cells
            .iter()
            .map(|cell| {
                let (out, full_sum_rate, saving, loss, mask) = match cell.rf {
                    RfMode::Full => {
                        let out = search(&problem, &cell.settings)?;
                        let full = out.report.sum_rate;
                        (out, full, 0.0, 0.0, None)
                    }
                    mode => {
                        let p = apply_policy(&problem, mode, &cell.settings)?;
                        (p.reduced, p.full.report.sum_rate, p.saving, p.loss, Some(p.mask))
                    }
                };
                let rates: Vec<String> = out.report.rates.iter().map(|r| r.to_string()).collect();
                Ok(RunRecord {
                    cell: cell.name.clone(),
                    run_index: run,
                    fingerprint: fingerprint.clone(),
                    sum_rate: out.report.sum_rate,
                    rates: rates.join(";"),
                    dl_sum: out.report.dl_sum,
                    evaluation_count: out.report.evaluation_count,
                    fallback_count: out.report.fallback_count,
                    conflicts: out.assignment.conflicts(mask.as_ref()),
                    full_sum_rate,
                    saving,
                    loss,
                    assignment: out.assignment.to_string(),
                    wall_time_s: out.report.wall_time_s,
                })
            })
            .collect()
    };
    let pool = worker_pool()?;
    let runs: Vec<Result<Vec<RunRecord>>> =
        pool.install(|| (0..spec.mc_runs as u64).into_par_iter().map(per_run).collect());
    let runs: Vec<Vec<RunRecord>> = runs.into_iter().collect::<Result<_>>()?;
    let records: Vec<RunRecord> = runs.into_iter().flatten().collect();
    let summaries = cells.iter().map(|c| summarize(&c.name, records.iter().filter(|r| r.cell == c.name))).collect();
    Ok(ExperimentResult { cells, records, summaries })
}

/// Mean and normal-approximation 95% interval over a cell's records.
pub fn summarize<'r>(cell: &str, records: impl Iterator<Item = &'r RunRecord>) -> CellSummary {
    let records: Vec<&RunRecord> = records.collect();
    let n = records.len();
    let nf = n.max(1) as f64;
    let mean = |f: &dyn Fn(&RunRecord) -> f64| records.iter().map(|r| f(r)).sum::<f64>() / nf;
    let mean_sum_rate = mean(&|r| r.sum_rate);
    let var = if n > 1 {
        records.iter().map(|r| (r.sum_rate - mean_sum_rate).powi(2)).sum::<f64>() / (nf - 1.0)
    } else {
        0.0
    };
    let half = 1.96 * (var / nf).sqrt();
    let users = records.first().map_or(1, |r| r.rates.split(';').count()).max(1);
    let mean_full = mean(&|r| r.full_sum_rate);
    CellSummary {
        cell: cell.to_string(),
        runs: n,
        mean_sum_rate,
        ci95_low: mean_sum_rate - half,
        ci95_high: mean_sum_rate + half,
        mean_user_rate: mean_sum_rate / users as f64,
        mean_evaluations: mean(&|r| r.evaluation_count as f64),
        fallback_total: records.iter().map(|r| r.fallback_count).sum(),
        conflict_runs: records.iter().filter(|r| r.conflicts > 0).count(),
        mean_saving: mean(&|r| r.saving),
        loss: if mean_full > 0.0 { 1.0 - mean_sum_rate / mean_full } else { 0.0 },
        mean_wall_time_s: mean(&|r| r.wall_time_s),
    }
}

pub fn write_records<W: Write>(out: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summaries<W: Write>(out: W, summaries: &[CellSummary]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for s in summaries {
        w.serialize(s)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> ExperimentSpec {
        let cells = vec![
            CellSpec::from_settings(&SearchSettings::linear(1, 1), RfMode::Full).named("a"),
            CellSpec::from_settings(&SearchSettings::linear(1, 1), RfMode::Full).named("b"),
        ];
        ExperimentSpec::new(NetworkConfig::reference(2, 2, 4), cells, 8)
    }

    #[test]
    fn identical_cells_give_identical_runs() {
        let res = run_experiment(&tiny()).unwrap();
        let a: Vec<_> = res.cell_records("a").collect();
        let b: Vec<_> = res.cell_records("b").collect();
        assert_eq!(a.len(), 8);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.sum_rate.to_bits(), y.sum_rate.to_bits());
            assert_eq!(x.fingerprint, y.fingerprint);
            assert_eq!(x.assignment, y.assignment);
        }
        assert!(res.records.windows(2).all(|w| w[0].run_index <= w[1].run_index));
    }

    #[test]
    fn conflicts_rejected_before_running() {
        let mut spec = tiny();
        spec.network.codebook_size = Some(1);
        assert!(matches!(run_experiment(&spec), Err(Error::ConfigConflict(_))));
        let mut spec = tiny();
        spec.cells[1].name = Some("a".into());
        assert!(run_experiment(&spec).is_err());
        let mut spec = tiny();
        spec.mc_runs = 0;
        assert!(run_experiment(&spec).is_err());
    }

    #[test]
    fn toml_spec() {
        let text = r#"
            mc_runs = 3
            [network]
            L = 2
            K = 2
            M = 4
            [[cell]]
            algorithm = "disjoint_linear_dl"
            [[cell]]
            algorithm = "linear"
            n_init = 2
            rf = { naive = 1 }
        "#;
        let spec = ExperimentSpec::from_toml(text).unwrap();
        let cells = spec.validate().unwrap();
        assert_eq!(cells[0].name, "disjoint-linear-DL");
        assert_eq!(cells[1].name, "linear-II-rate-naive(1)");
        assert_eq!(cells[1].rf, RfMode::Naive(1));
        assert!(ExperimentSpec::from_toml("mc_run = 3").is_err());
    }

    #[test]
    fn summary_interval() {
        let rec = |x: f64| RunRecord {
            cell: "c".into(),
            run_index: 0,
            fingerprint: String::new(),
            sum_rate: x,
            rates: "1;2".into(),
            dl_sum: 0.0,
            evaluation_count: 4,
            fallback_count: 0,
            conflicts: 0,
            full_sum_rate: 2.0 * x,
            saving: 0.25,
            loss: 0.5,
            assignment: String::new(),
            wall_time_s: 0.0,
        };
        let recs = [rec(1.0), rec(3.0)];
        let s = summarize("c", recs.iter());
        assert_eq!(s.mean_sum_rate, 2.0);
        // sample std sqrt(2), half width 1.96 * sqrt(2) / sqrt(2)
        assert!((s.ci95_high - 3.96).abs() < 1e-12);
        assert!((s.loss - 0.5).abs() < 1e-15);
        assert_eq!(s.mean_user_rate, 1.0);
    }
}
