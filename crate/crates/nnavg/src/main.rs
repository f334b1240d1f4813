use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nnavg::config::{parse_grid, parse_methods, ExperimentConfig};
use nnavg::csv_io::{read_panel_file, write_panel};
use nnavg::experiment::{asof_range, cross_validate, diagnose, forecast_records, run, with_pool};
use nnavg::report;
use nnavg_core::dtw::{cross_distance, dtw_on_matrix, DtwOptions, StepPattern};
use nnavg_core::synth::generate_panel;

#[derive(Parser)]
#[command(name = "nnavg", version, about = "Nearest-neighbour forecast averaging for short panels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Forecast, cross-validate, evaluate and diagnose.
    Run {
        #[command(flatten)]
        common: Common,
        /// Skip the neighbourhood evolution and theory checks.
        #[arg(long)]
        no_diagnostics: bool,
    },
    /// Cross-validate the neighbourhood size on the training period.
    Cv {
        #[command(flatten)]
        common: Common,
    },
    /// Write one-step forecasts of every method for every target time.
    Forecast {
        #[command(flatten)]
        common: Common,
    },
    /// Neighbourhood evolution and theory checks.
    Diagnose {
        #[command(flatten)]
        common: Common,
    },
    /// Write a synthetic ANN panel as CSV.
    Synth {
        #[command(flatten)]
        common: Common,
    },
    /// Dump the accumulated DTW matrix of two series from a panel.
    Dtw {
        /// Panel CSV.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        query: String,
        #[arg(long)]
        reference: String,
        #[arg(long, value_enum, default_value_t = Pattern::Asymmetric)]
        pattern: Pattern,
        #[arg(long)]
        open_begin: bool,
        #[arg(long)]
        open_end: bool,
        /// Output CSV; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Pattern {
    Symmetric,
    Asymmetric,
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Panel CSV with columns id,time,value.
    #[arg(long, conflicts_with = "synth")]
    input: Option<PathBuf>,
    /// Use the synthetic panel even if the configuration names an input.
    #[arg(long)]
    synth: bool,
    /// End of the initial cross-validation window.
    #[arg(long)]
    t0: Option<i64>,
    /// Last training time.
    #[arg(long)]
    ttrain: Option<i64>,
    /// Comma-separated neighbourhood sizes.
    #[arg(long)]
    grid: Option<String>,
    /// Comma-separated method tags, or `all`.
    #[arg(long)]
    methods: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed of the synthetic panel and the Monte-Carlo checks.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    jobs: Option<usize>,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_file(p)?,
            None => ExperimentConfig::default(),
        };
        if self.synth {
            cfg.input = None;
        }
        if let Some(p) = &self.input {
            cfg.input = Some(p.clone());
        }
        if let Some(t) = self.t0 {
            cfg.t0 = t;
        }
        if let Some(t) = self.ttrain {
            cfg.t_train = t;
        }
        if let Some(g) = &self.grid {
            cfg.grid = parse_grid(g)?;
        }
        if let Some(m) = &self.methods {
            cfg.methods = parse_methods(m)?;
        }
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        if self.seed.is_some() {
            cfg.seed = self.seed;
        }
        if let Some(j) = self.jobs {
            cfg.jobs = j;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run { common, no_diagnostics } => {
            let cfg = common.config()?;
            let panel = cfg.load_panel()?;
            let out = with_pool(cfg.jobs, || run(&cfg, &panel, !no_diagnostics))??;
            report::write_run(&cfg.out, &panel, &out)?;
            for row in &out.eval.set_level {
                println!("{:<10} train {:.4} test {:.4}", row.method.to_string(), row.train_rmsse, row.test_rmsse);
            }
        }
        Command::Cv { common } => {
            let cfg = common.config()?;
            let panel = cfg.load_panel()?;
            let stage = with_pool(cfg.jobs, || cross_validate(&cfg, &panel, cfg.t_train))??;
            report::write_cv_stage(&cfg.out, &stage.cv)?;
        }
        Command::Forecast { common } => {
            let cfg = common.config()?;
            let panel = cfg.load_panel()?;
            let pcfg = cfg.pipeline();
            let records = with_pool(cfg.jobs, || forecast_records(&panel, &pcfg, asof_range(&panel, cfg.t0, panel.horizon())))??;
            report::write_json(&cfg.out, "forecast_records.json", &records)?;
            report::write_raw_forecasts(&cfg.out, &panel, &records)?;
        }
        Command::Diagnose { common } => {
            let cfg = common.config()?;
            let panel = cfg.load_panel()?;
            let d = with_pool(cfg.jobs, || diagnose(&cfg, &panel))??;
            report::write_diagnostics_stage(&cfg.out, &d)?;
        }
        Command::Synth { common } => {
            let cfg = common.config()?;
            let (panel, truth) = generate_panel(&cfg.synth_config())?;
            std::fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
            let path = cfg.out.join("panel.csv");
            let f = std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            write_panel(&panel, std::io::BufWriter::new(f))?;
            report::write_json(&cfg.out, "ground_truth.json", &truth)?;
        }
        Command::Dtw { input, query, reference, pattern, open_begin, open_end, out } => {
            let panel = read_panel_file(&input)?;
            let get = |id: &str| panel.get(id).with_context(|| format!("no series `{id}` in {}", input.display()));
            let (x, y) = (get(&query)?, get(&reference)?);
            let pattern = match pattern {
                Pattern::Symmetric => StepPattern::Symmetric2,
                Pattern::Asymmetric => StepPattern::Asymmetric,
            };
            if pattern == StepPattern::Symmetric2 && (open_begin || open_end) {
                bail!("open ends need the asymmetric pattern");
            }
            let opts = DtwOptions { pattern, open_begin, open_end, keep_matrix: true };
            let r = dtw_on_matrix(&cross_distance(x.values(), y.values()), opts)?;
            eprintln!("distance {} normalized {}", r.distance, r.normalized());
            match out {
                Some(p) => {
                    let f = std::fs::File::create(&p).with_context(|| format!("creating {}", p.display()))?;
                    report::write_dtw_dump(&r, std::io::BufWriter::new(f))?;
                }
                None => {
                    let stdout = std::io::stdout();
                    let mut lock = stdout.lock();
                    report::write_dtw_dump(&r, &mut lock)?;
                    lock.flush()?;
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
