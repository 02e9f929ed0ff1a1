use clap::{Args, Parser, Subcommand};
use optscale::config::RunConfig;
use optscale::experiments::{
    default_rwm_ell, optimal_scaling_table, run_compare, write_acf_csv, write_compare_summary_csv,
    write_table_csv, CompareConfig, TMCMC_ELL, TRUNCATED_NORMAL,
};
use optscale::kernel::{
    run_chain_into, Algorithm, KernelConfig, ScaleSchedule, ScheduleKind, Space,
};
use optscale::proposal::ProposalFamily;
use optscale::scaling::optimal_scaling;
use optscale::target::{ProductTarget, TargetDensity};
use optscale::trace_io::{CsvWriter, TraceWriter};
use optscale::{Error, Result};
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

const DEFAULT_ITERS: u64 = 100_000;

#[derive(Parser)]
#[command(
    name = "optscale",
    version,
    about = "Optimal scaling for additive TMCMC and random-walk Metropolis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal scale and acceptance rate for every table proposal on both targets
    Table1 {
        #[arg(long)]
        out: PathBuf,
    },
    /// Run TMCMC and RWM side by side and write acceptance, ESJD, ESS and ACF
    Compare(RunArgs),
    /// Run a single chain and write its binary trace
    Sample(RunArgs),
    /// Time transitions per second for both kernels (informational only)
    Bench(RunArgs),
}

#[derive(Args, Default)]
struct RunArgs {
    /// key = value file; flags given here take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    algorithm: Option<Algorithm>,
    #[arg(long)]
    proposal: Option<ProposalFamily>,
    #[arg(long)]
    target: Option<TargetDensity>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    iters: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    ell: Option<f64>,
    #[arg(long)]
    tmcmc_ell: Option<f64>,
    #[arg(long)]
    rwm_ell: Option<f64>,
    #[arg(long)]
    schedule: Option<ScheduleKind>,
    #[arg(long)]
    space: Option<Space>,
    #[arg(long)]
    max_lag: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    out_prefix: Option<String>,
    /// Also write the trace as CSV
    #[arg(long)]
    csv: Option<PathBuf>,
}

impl RunArgs {
    fn resolve(self) -> Result<RunConfig> {
        let flags = RunConfig {
            algorithm: self.algorithm,
            proposal: self.proposal,
            target: self.target,
            d: self.d,
            iters: self.iters,
            seed: self.seed,
            ell: self.ell,
            tmcmc_ell: self.tmcmc_ell,
            rwm_ell: self.rwm_ell,
            schedule: self.schedule,
            space: self.space,
            max_lag: self.max_lag,
            out: self.out,
            out_prefix: self.out_prefix,
            csv: self.csv,
        };
        Ok(match &self.config {
            Some(path) => RunConfig::from_file(path)?.overridden_by(flags),
            None => flags,
        })
    }
}

fn create(path: &Path) -> Result<File> {
    Ok(File::create(path)?)
}

fn default_target() -> TargetDensity {
    TRUNCATED_NORMAL.parse().expect("valid target")
}

fn table1(out: &Path) -> Result<()> {
    let rows = optimal_scaling_table()?;
    write_table_csv(&rows, create(out)?)?;
    println!(
        "{:<10} {:<12} {:>7} {:>7} {:>7} {:>7}",
        "proposal", "target", "ell*", "I", "ell_opt", "alpha"
    );
    for r in &rows {
        let s = &r.scaling;
        let flag = if s.conjecture_only {
            "  (conjecture)"
        } else {
            ""
        };
        println!(
            "{:<10} {:<12} {:>7.3} {:>7.3} {:>7.3} {:>7.3}{flag}",
            s.proposal.to_string(),
            r.target_label,
            s.ell_star,
            s.fisher.value,
            s.ell_opt,
            s.alpha_opt
        );
    }
    Ok(())
}

fn compare(cfg: RunConfig) -> Result<()> {
    let d = cfg.d.unwrap_or(10);
    let rwm_ell = cfg.rwm_ell.or_else(|| default_rwm_ell(d)).ok_or_else(|| {
        Error::InvalidParameter(format!("no default RWM scale for d = {d}; pass --rwm-ell"))
    })?;
    let compare = CompareConfig {
        d,
        n_iter: cfg.iters.unwrap_or(DEFAULT_ITERS),
        seed: cfg.seed.unwrap_or(0),
        tmcmc_ell: cfg.tmcmc_ell.unwrap_or(TMCMC_ELL),
        rwm_ell,
        max_lag: cfg.max_lag.unwrap_or(50),
        proposal: cfg.proposal.unwrap_or(ProposalFamily::Cauchy),
        target: cfg.target.unwrap_or_else(default_target),
    };
    let report = run_compare(&compare)?;
    let prefix = cfg.out_prefix.unwrap_or_else(|| format!("compare_d{d}"));
    write_compare_summary_csv(
        &report,
        create(Path::new(&format!("{prefix}_summary.csv")))?,
    )?;
    write_acf_csv(&report, create(Path::new(&format!("{prefix}_acf.csv")))?)?;

    println!(
        "{:<6} {:>7} {:>9} {:>7} {:>7} {:>10} {:>7}",
        "kernel", "ell", "scale", "accept", "esjd", "ess", "ks"
    );
    for s in [&report.tmcmc, &report.rwm] {
        println!(
            "{:<6} {:>7.3} {:>9.3} {:>7.3} {:>7.3} {:>10.3} {:>7.3}",
            s.algorithm.to_string(),
            s.ell,
            s.scale,
            s.acceptance,
            s.esjd,
            s.ess,
            s.ks
        );
    }
    for lag in [1, 5, 10, 50] {
        if let (Some(t), Some(r)) = (report.tmcmc.acf.get(lag), report.rwm.acf.get(lag)) {
            println!("acf[{lag:>2}]  tmcmc {t:.3}  rwm {r:.3}");
        }
    }
    Ok(())
}

fn kernel_config(cfg: &RunConfig) -> Result<KernelConfig> {
    let algorithm = cfg.algorithm.unwrap_or(Algorithm::Tmcmc);
    let proposal = cfg.proposal.unwrap_or(ProposalFamily::Cauchy);
    let component = cfg.target.unwrap_or_else(default_target);
    let d = cfg.d.unwrap_or(10);
    let target = ProductTarget::new(component, d)?;
    let ell = match (cfg.ell, algorithm) {
        (Some(ell), _) => ell,
        (None, Algorithm::Tmcmc) => {
            optimal_scaling(proposal, &component, component.logit_map().as_ref())?.ell_opt
        }
        (None, Algorithm::Rwm) => default_rwm_ell(d).ok_or_else(|| {
            Error::InvalidParameter(format!("no default RWM scale for d = {d}; pass --ell"))
        })?,
    };
    let schedule = ScaleSchedule::new(cfg.schedule.unwrap_or(algorithm.default_schedule()), ell, d);
    let space = cfg.space.unwrap_or(algorithm.default_space(&target));
    KernelConfig::new(algorithm, proposal, target, schedule, space)
}

fn sample(cfg: RunConfig) -> Result<()> {
    let out = cfg
        .out
        .clone()
        .ok_or_else(|| Error::InvalidParameter("sample needs --out".into()))?;
    let kc = kernel_config(&cfg)?;
    let iters = cfg.iters.unwrap_or(DEFAULT_ITERS);
    let seed = cfg.seed.unwrap_or(0);

    let binary = TraceWriter::new(create(&out)?);
    let accepted = match &cfg.csv {
        Some(path) => {
            let mut tee = (binary, CsvWriter::new(create(path)?));
            run_chain_into(&kc, iters, seed, 0, &mut tee)?
        }
        None => {
            let mut sink = binary;
            run_chain_into(&kc, iters, seed, 0, &mut sink)?
        }
    };
    let acceptance = if iters > 0 {
        accepted as f64 / iters as f64
    } else {
        f64::NAN
    };

    let mut meta_path = out.into_os_string();
    meta_path.push(".meta");
    let mut meta = create(Path::new(&meta_path))?;
    writeln!(meta, "seed={seed}")?;
    writeln!(meta, "algorithm={}", kc.algorithm)?;
    writeln!(meta, "proposal={}", kc.proposal)?;
    writeln!(meta, "target={}", kc.target.component)?;
    writeln!(meta, "d={}", kc.dim())?;
    writeln!(meta, "iters={iters}")?;
    writeln!(meta, "ell={:?}", kc.schedule.ell)?;
    writeln!(meta, "schedule={}", kc.schedule.kind)?;
    writeln!(meta, "scale={:?}", kc.scale())?;
    writeln!(meta, "space={}", kc.space)?;
    writeln!(meta, "accepted={accepted}")?;
    writeln!(meta, "acceptance={acceptance:?}")?;

    println!("{}", kc.describe());
    println!("acceptance {acceptance:.3} ({accepted}/{iters})");
    Ok(())
}

struct Discard;

impl optscale::kernel::TraceSink for Discard {
    fn start(&mut self, _: usize, _: u64, _: u64) -> Result<()> {
        Ok(())
    }
    fn initial(&mut self, _: &[f64]) -> Result<()> {
        Ok(())
    }
    fn transition(&mut self, _: &[f64], _: bool) -> Result<()> {
        Ok(())
    }
}

fn bench(cfg: RunConfig) -> Result<()> {
    let d = cfg.d.unwrap_or(100);
    let iters = cfg.iters.unwrap_or(DEFAULT_ITERS);
    let seed = cfg.seed.unwrap_or(0);
    for algorithm in [Algorithm::Tmcmc, Algorithm::Rwm] {
        let run = RunConfig {
            algorithm: Some(algorithm),
            d: Some(d),
            ell: Some(match algorithm {
                Algorithm::Tmcmc => cfg.tmcmc_ell.unwrap_or(TMCMC_ELL),
                Algorithm::Rwm => cfg.rwm_ell.or_else(|| default_rwm_ell(d)).unwrap_or(1.0),
            }),
            ..cfg.clone()
        };
        let kc = kernel_config(&run)?;
        let start = Instant::now();
        run_chain_into(&kc, iters, seed, 0, &mut Discard)?;
        let secs = start.elapsed().as_secs_f64();
        println!(
            "{:<6} d={d} {:>12.3} steps/s",
            algorithm.to_string(),
            iters as f64 / secs
        );
    }
    Ok(())
}

fn init_threads() -> Result<()> {
    let Ok(value) = std::env::var("OPTSCALE_THREADS") else {
        return Ok(());
    };
    let n: usize = value.trim().parse().map_err(|_| {
        Error::InvalidParameter(format!("OPTSCALE_THREADS={value:?} is not a thread count"))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidParameter(e.to_string()))
}

fn run(cli: Cli) -> Result<()> {
    init_threads()?;
    match cli.command {
        Command::Table1 { out } => table1(&out),
        Command::Compare(args) => compare(args.resolve()?),
        Command::Sample(args) => sample(args.resolve()?),
        Command::Bench(args) => bench(args.resolve()?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("optscale: {e}");
            ExitCode::FAILURE
        }
    }
}
