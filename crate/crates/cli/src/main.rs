use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use cfmimo::harness::{
    export_dataset, read_assignments, run_experiment, score_assignments, write_records, write_summaries,
    DatasetOptions, ExperimentSpec,
};
use cfmimo::scenario::{draw_realization, read_dump, write_dump, DumpHeader};
use cfmimo::search::{complexity_formula, settings_complexity, SearchFamily};
use cfmimo::{Algorithm, BccMode, Metric, NetworkConfig, PrecoderKind, SearchSettings};

#[derive(Parser)]
#[command(name = "cfmimo", version, about = "Joint analog beam selection and digital precoding for cell-free mm-wave MIMO")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo experiment described by a TOML file.
    Run(RunArgs),
    /// Write teacher-labelled feature rows for beam-selection learning.
    ExportDataset(ExportArgs),
    /// Score beam assignments on dumped channel realizations.
    Score(ScoreArgs),
    /// Print closed-form search costs.
    Complexity(ComplexityArgs),
    /// List search algorithms and their metrics.
    ListAlgorithms,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Per-run records CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-cell summary CSV; printed to stdout when omitted.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Also write the realizations as a channel dump.
    #[arg(long)]
    dump: Option<PathBuf>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct NetworkArgs {
    /// TOML file with a `[network]` table (an experiment file works).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "L")]
    aps: Option<usize>,
    #[arg(long = "K")]
    users: Option<usize>,
    #[arg(long = "M")]
    antennas: Option<usize>,
    #[arg(long = "B")]
    beams: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

impl NetworkArgs {
    fn resolve(&self) -> Result<NetworkConfig> {
        let mut net = match &self.config {
            Some(p) => load_spec(p)?.network,
            None => NetworkConfig::default(),
        };
        if let Some(v) = self.aps {
            net.aps = v;
        }
        if let Some(v) = self.users {
            net.users = v;
        }
        if let Some(v) = self.antennas {
            net.antennas = v;
        }
        if self.beams.is_some() {
            net.codebook_size = self.beams;
        }
        if let Some(v) = self.seed {
            net.master_seed = v;
        }
        net.validate()?;
        Ok(net)
    }
}

#[derive(Args)]
struct TeacherArgs {
    #[arg(long, default_value = "linear")]
    teacher: Algorithm,
    /// Defaults to the algorithm's own metric.
    #[arg(long)]
    metric: Option<Metric>,
    #[arg(long, default_value = "full")]
    bcc: BccMode,
    #[arg(long, default_value_t = 2)]
    init: usize,
    #[arg(long, default_value_t = 2)]
    iter: usize,
    #[arg(long, default_value = "zf")]
    precoder: PrecoderKind,
}

impl TeacherArgs {
    fn settings(&self) -> SearchSettings {
        let mut s = SearchSettings::new(self.teacher)
            .with_bcc(self.bcc)
            .with_restarts(self.init, self.iter)
            .with_precoder(self.precoder);
        if let Some(m) = self.metric {
            s = s.with_metric(m);
        }
        s
    }
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    network: NetworkArgs,
    #[command(flatten)]
    teacher: TeacherArgs,
    #[arg(long)]
    rows: usize,
    #[arg(long, default_value_t = 0)]
    first_run: u64,
    /// Add `|beta|` of the strongest path per link.
    #[arg(long)]
    gains: bool,
    #[arg(long)]
    out: PathBuf,
    /// Channel dump of the same rows, for scoring.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(long)]
    dump: PathBuf,
    /// CSV with `run_index` and `label_l_k` columns.
    #[arg(long)]
    assign: PathBuf,
    #[arg(long, default_value = "zf")]
    precoder: PrecoderKind,
    /// JSON lines output; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ComplexityArgs {
    #[arg(long = "L")]
    aps: usize,
    #[arg(long = "K")]
    users: usize,
    #[arg(long = "B")]
    beams: usize,
    /// Algorithm or family (`semicentralized` is formula only); all when omitted.
    #[arg(long)]
    alg: Option<String>,
    #[arg(long, default_value = "off")]
    bcc: BccMode,
    /// Scale by restart loops.
    #[arg(long, default_value_t = 1)]
    init: usize,
    #[arg(long, default_value_t = 1)]
    iter: usize,
}

fn load_spec(path: &Path) -> Result<ExperimentSpec> {
    ExperimentSpec::from_file(path).with_context(|| format!("reading {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn write_realization_dump(net: &NetworkConfig, runs: std::ops::Range<u64>, path: &Path) -> Result<()> {
    let reals = runs.map(|r| draw_realization(net, r)).collect::<cfmimo::Result<Vec<_>>>()?;
    let mut out = create(path)?;
    write_dump(&mut out, &DumpHeader::from_config(net), &reals)?;
    out.flush()?;
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let mut spec = load_spec(&args.config)?;
    if let Some(n) = args.runs {
        spec.mc_runs = n;
    }
    if let Some(s) = args.seed {
        spec.network.master_seed = s;
    }
    let res = run_experiment(&spec)?;
    if let Some(path) = args.out.or(spec.output.records.clone()) {
        write_records(create(&path)?, &res.records)?;
    }
    match args.summary.or(spec.output.summary.clone()) {
        Some(path) => write_summaries(create(&path)?, &res.summaries)?,
        None => write_summaries(io::stdout().lock(), &res.summaries)?,
    }
    if let Some(path) = args.dump.or(spec.output.dump.clone()) {
        write_realization_dump(&spec.network, 0..spec.mc_runs as u64, &path)?;
    }
    Ok(())
}

fn cmd_export(args: ExportArgs) -> Result<()> {
    let net = args.network.resolve()?;
    let teacher = args.teacher.settings();
    let opts = DatasetOptions { include_gains: args.gains, first_run: args.first_run };
    let mut out = create(&args.out)?;
    let rows = export_dataset(&net, &teacher, args.rows, opts, &mut out)?;
    out.flush()?;
    if let Some(path) = &args.dump {
        write_realization_dump(&net, args.first_run..args.first_run + rows as u64, path)?;
    }
    eprintln!("wrote {rows} rows labelled by {}", teacher.label());
    Ok(())
}

fn cmd_score(args: ScoreArgs) -> Result<()> {
    let file = File::open(&args.dump).with_context(|| format!("opening {}", args.dump.display()))?;
    let (header, reals) = read_dump(BufReader::new(file))?;
    let file = File::open(&args.assign).with_context(|| format!("opening {}", args.assign.display()))?;
    let assignments = read_assignments(file, header.aps, header.users)?;
    let scores = score_assignments(&header, &reals, &assignments, args.precoder)?;
    let mut out: Box<dyn Write> = match &args.out {
        Some(p) => Box::new(create(p)?),
        None => Box::new(io::stdout().lock()),
    };
    for s in &scores {
        serde_json::to_writer(&mut out, s)?;
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_complexity(args: ComplexityArgs) -> Result<()> {
    let (l, k, b) = (args.aps, args.users, args.beams);
    match &args.alg {
        Some(name) => {
            let count = match name.parse::<Algorithm>() {
                Ok(alg) => {
                    let s = SearchSettings::new(alg).with_bcc(args.bcc).with_restarts(args.init, args.iter);
                    settings_complexity(&s, l, k, b)?
                }
                Err(_) => {
                    if args.init != 1 || args.iter != 1 {
                        bail!("restart loops only apply to runnable algorithms");
                    }
                    complexity_formula(SearchFamily::parse(name)?, l, k, b, args.bcc)?
                }
            };
            println!("{count}");
        }
        None => {
            println!("family,L,K,B,bcc,evaluations");
            for f in SearchFamily::ALL {
                let c = complexity_formula(f, l, k, b, args.bcc)?;
                println!("{},{l},{k},{b},{},{c}", f.name(), args.bcc);
            }
        }
    }
    Ok(())
}

fn cmd_list() {
    println!("algorithm,metrics,label");
    for a in Algorithm::ALL {
        let metrics = match a {
            Algorithm::DisjointLinearDl => "dl",
            Algorithm::Linear | Algorithm::Semilinear => "rate|dl",
            Algorithm::Exhaustive | Algorithm::LinearIis => "rate",
        };
        println!("{a},{metrics},{}", SearchSettings::new(a).label());
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(a) => cmd_run(a),
        Command::ExportDataset(a) => cmd_export(a),
        Command::Score(a) => cmd_score(a),
        Command::Complexity(a) => cmd_complexity(a),
        Command::ListAlgorithms => {
            cmd_list();
            Ok(())
        }
    }
}
