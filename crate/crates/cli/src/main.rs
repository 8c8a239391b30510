use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use tilam::cloud::Label;
use tilam::ekf::write_ekf_log;
use tilam::io::{fmt_num, write_cloud_csv, write_ply, write_trajectory_csv};
use tilam::pipeline::{
    convergence_study, paired_run, run_mode, scan_at, scan_ticks, simulate_truth, write_alignment_log,
    write_convergence_csv, write_stats_report, Mode, RunConfig, RunOutput, TruthRun,
};
use tilam::scan::{cloud_to_world, separate_ground};
use tilam::terrain_model::write_model_csv;

#[derive(Parser)]
#[command(name = "tilam", version, about = "Terrain-inclination aided localization and mapping on simulated runs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the seed from the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the world and the ground-truth trajectory.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Run one localization mode on one seed.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        mode: Option<Mode>,
    },
    /// Paired runs of all modes over consecutive seeds.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Number of seeds, starting at `--seed`.
        #[arg(long, default_value_t = 10)]
        seeds: u64,
    },
    /// Settling time of the filter from offset initial estimates.
    Converge {
        #[command(flatten)]
        common: Common,
    },
    /// Dump the scans, map, models and trajectories of one run as PLY and CSV.
    Export {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        mode: Option<Mode>,
    },
}

fn load_config(c: &Common) -> Result<RunConfig> {
    let mut cfg = match &c.config {
        Some(p) => RunConfig::load(p).with_context(|| format!("reading {}", p.display()))?,
        None => RunConfig::default(),
    };
    if let Some(seed) = c.seed {
        cfg = cfg.with_seed(seed);
    }
    cfg.validate()?;
    fs::create_dir_all(&c.out).with_context(|| format!("creating {}", c.out.display()))?;
    Ok(cfg)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    Ok(BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?))
}

fn write_run(dir: &Path, out: &RunOutput) -> Result<()> {
    write_trajectory_csv(create(dir, "trajectory.csv")?, &out.trajectory)?;
    write_stats_report(create(dir, "stats.txt")?, out)?;
    if let Some(map) = &out.global_map {
        write_ply(create(dir, "map.ply")?, &map.cloud, Some(&map.labels))?;
        write_alignment_log(create(dir, "alignments.csv")?, &out.alignments)?;
    }
    if !out.ekf_log.is_empty() {
        write_ekf_log(create(dir, "ekf_log.csv")?, &out.ekf_log)?;
    }
    for m in &out.models {
        if let Some(model) = &m.model {
            write_model_csv(create(dir, &format!("model_{:02}.csv", m.interval))?, model)?;
        }
    }
    Ok(())
}

fn simulate(c: &Common) -> Result<TruthRun> {
    let cfg = load_config(c)?;
    let truth = simulate_truth(&cfg)?;
    fs::write(c.out.join("world.toml"), cfg.to_toml_string()?)?;
    write_trajectory_csv(create(&c.out, "truth.csv")?, &truth.trajectory())?;
    println!("ticks: {}", truth.ticks());
    println!("duration: {}", fmt_num(truth.duration()));
    println!("path_length: {}", fmt_num(truth.planned.length()));
    Ok(truth)
}

fn run(c: &Common, mode: Option<Mode>) -> Result<()> {
    let cfg = load_config(c)?;
    let mode = mode.unwrap_or(cfg.mode);
    let truth = simulate_truth(&cfg)?;
    let out = run_mode(&cfg, &truth, mode)?;
    write_trajectory_csv(create(&c.out, "truth.csv")?, &truth.trajectory())?;
    write_run(&c.out, &out)?;
    write_stats_report(std::io::stdout().lock(), &out)?;
    Ok(())
}

fn compare(c: &Common, seeds: u64) -> Result<()> {
    let cfg = load_config(c)?;
    let first = cfg.seed();
    let runs = (first..first + seeds)
        .into_par_iter()
        .map(|s| paired_run(&cfg, s))
        .collect::<Result<Vec<_>, _>>()?;
    let mut w = create(&c.out, "compare.csv")?;
    writeln!(w, "seed,tilam_d_mean,icp_d_mean,dr_d_mean,tilam_total_seconds,icp_total_seconds")?;
    let mut sum = [0.0; 5];
    for r in &runs {
        let row = [
            r.tilam.stats.d_mean,
            r.baseline.stats.d_mean,
            r.dead_reckoning.stats.d_mean,
            r.tilam.timing.total_seconds(),
            r.baseline.timing.total_seconds(),
        ];
        writeln!(w, "{},{}", r.seed, row.map(fmt_num).join(","))?;
        for (s, v) in sum.iter_mut().zip(row) {
            *s += v;
        }
    }
    w.flush()?;
    let n = runs.len().max(1) as f64;
    let mut report = create(&c.out, "compare.txt")?;
    let keys = [
        "tilam_d_mean",
        "icp_d_mean",
        "dr_d_mean",
        "tilam_total_seconds",
        "icp_total_seconds",
    ];
    let mut lines = vec![format!("seeds: {}", runs.len())];
    lines.extend(keys.iter().zip(sum).map(|(k, s)| format!("{k}: {}", fmt_num(s / n))));
    for l in &lines {
        writeln!(report, "{l}")?;
        println!("{l}");
    }
    Ok(())
}

fn converge(c: &Common) -> Result<()> {
    let cfg = load_config(c)?;
    let truth = simulate_truth(&cfg)?;
    let records = convergence_study(&cfg, &truth, &cfg.convergence.offsets)?;
    write_convergence_csv(create(&c.out, "convergence.csv")?, &records)?;
    write_convergence_csv(std::io::stdout().lock(), &records)?;
    Ok(())
}

fn export(c: &Common, mode: Option<Mode>) -> Result<()> {
    let cfg = load_config(c)?;
    let mode = mode.unwrap_or(cfg.mode);
    let truth = simulate_truth(&cfg)?;
    let out = run_mode(&cfg, &truth, mode)?;
    write_trajectory_csv(create(&c.out, "truth.csv")?, &truth.trajectory())?;
    write_run(&c.out, &out)?;
    if let Some(map) = &out.global_map {
        write_cloud_csv(create(&c.out, "map.csv")?, &map.cloud, Some(&map.labels))?;
    }
    // Scans at the true stop poses, labeled by the ground filter.
    let mount = cfg.world.scanner.mount();
    for (k, tick) in cfg.scan_spacing(mode).map(|s| scan_ticks(&cfg, s)).unwrap_or_default().into_iter().enumerate() {
        let scan = scan_at(&cfg, &truth, tick);
        let world = cloud_to_world(&scan.cloud, &truth.poses[tick], &mount)?;
        let labeled = separate_ground(&world, &cfg.separation)?;
        let labels: &[Label] = &labeled.labels;
        write_ply(create(&c.out, &format!("scan_{k:02}.ply"))?, &labeled.cloud, Some(labels))?;
        write_cloud_csv(create(&c.out, &format!("scan_{k:02}.csv"))?, &labeled.cloud, Some(labels))?;
    }
    println!("exported: {}", c.out.display());
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Simulate { common } => simulate(&common).map(|_| ()),
        Command::Run { common, mode } => run(&common, mode),
        Command::Compare { common, seeds } => compare(&common, seeds),
        Command::Converge { common } => converge(&common),
        Command::Export { common, mode } => export(&common, mode),
    }
}
