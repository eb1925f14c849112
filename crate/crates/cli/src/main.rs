use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use qacd_cli::config::{ExperimentConfig, Method};
use qacd_cli::emit;
use qacd_cli::run::{
    self, load_network, oracle_study, run_experiment, summarize, sweep_sample_size,
};
use qacd_core::ci::{ChiSquareProvider, CiProvider, CiQuery};

#[derive(Parser)]
#[command(name = "qacd", version, about = "Causal structure learning benchmarks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// One discovery run; prints the estimated graph and its metrics.
    Discover(CommonArgs),
    /// Multi-seed benchmark; writes records.csv, summary.csv, summary.json.
    Benchmark(CommonArgs),
    /// F1 versus sample size for qacd and pc; writes f1_vs_n.csv.
    Sweep(SweepArgs),
    /// Run against the exact d-separation oracle instead of sampled data.
    Oracle(CommonArgs),
    /// Print the CI test table for one sampled dataset.
    CiDump(CiDumpArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// BIF network file.
    #[arg(long)]
    network: Option<PathBuf>,
    #[arg(long)]
    method: Option<Method>,
    /// Rows to sample per seed.
    #[arg(long)]
    samples: Option<usize>,
    /// Comma-separated seed list.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Significance level for both methods.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    delta_cand: Option<f64>,
    #[arg(long)]
    delta0: Option<f64>,
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    t_max: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Cap on conditioning sets per size per pair.
    #[arg(long)]
    max_sets: Option<usize>,
    /// Compute SID bounds (default on).
    #[arg(long, overrides_with = "no_sid")]
    sid: bool,
    #[arg(long, overrides_with = "sid")]
    no_sid: bool,
    #[arg(long)]
    sid_cap: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',', default_value = "500,1000,2000,5000")]
    sizes: Vec<usize>,
}

#[derive(Args)]
struct CiDumpArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Largest conditioning-set size to print.
    #[arg(long, default_value_t = 1)]
    max_z: usize,
}

fn build_config(args: &CommonArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_toml_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(v) = &args.network {
        cfg.network_path = v.clone();
    }
    if let Some(v) = args.method {
        cfg.method = v;
    }
    if let Some(v) = args.samples {
        cfg.n_samples = v;
    }
    if let Some(v) = &args.seeds {
        cfg.seeds = v.clone();
    }
    if let Some(v) = args.alpha {
        cfg.qacd.alpha = v;
        cfg.pc.alpha = v;
    }
    if let Some(v) = args.delta_cand {
        cfg.qacd.delta_cand = v;
    }
    if let Some(v) = args.delta0 {
        cfg.qacd.delta0 = v;
    }
    if let Some(v) = args.k_max {
        cfg.qacd.k_max = v;
        cfg.pc.max_k = Some(v);
    }
    if let Some(v) = args.lambda {
        cfg.qacd.lambda = v;
    }
    if let Some(v) = args.t_max {
        cfg.qacd.t_max = v;
    }
    if let Some(v) = args.epsilon {
        cfg.qacd.epsilon = v;
    }
    if let Some(v) = args.max_sets {
        cfg.qacd.max_sets_per_size = v;
    }
    if args.sid {
        cfg.compute_sid = true;
    } else if args.no_sid {
        cfg.compute_sid = false;
    }
    if let Some(v) = args.sid_cap {
        cfg.sid_cap = v;
    }
    if let Some(v) = &args.out {
        cfg.output_dir = v.clone();
    }
    Ok(cfg)
}

fn cmd_discover(args: &CommonArgs) -> Result<()> {
    let mut cfg = build_config(args)?;
    cfg.seeds.truncate(1);
    let (est, record) = run::single_run(&cfg)?;
    println!("{}", est.dump());
    println!("{}", serde_json::to_string_pretty(&record)?);
    Ok(())
}

fn cmd_benchmark(args: &CommonArgs) -> Result<()> {
    let cfg = build_config(args)?;
    let records = run_experiment(&cfg)?;
    let rows = summarize(&records);
    std::fs::create_dir_all(&cfg.output_dir)
        .with_context(|| format!("creating {}", cfg.output_dir.display()))?;
    emit::write_records_csv(&cfg.output_dir.join("records.csv"), &records)?;
    emit::write_summary_csv(&cfg.output_dir.join("summary.csv"), &rows)?;
    emit::write_summary_json(&cfg.output_dir.join("summary.json"), &rows)?;
    for row in &rows {
        if row.metric == "f1" || row.metric == "nshd" {
            println!(
                "{} {}: {:.4} ± {:.4} (n={})",
                row.method, row.metric, row.mean, row.std, row.count
            );
        }
    }
    println!("wrote {}", cfg.output_dir.join("records.csv").display());
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let cfg = build_config(&args.common)?;
    let rows = sweep_sample_size(&cfg, &args.sizes)?;
    std::fs::create_dir_all(&cfg.output_dir)
        .with_context(|| format!("creating {}", cfg.output_dir.display()))?;
    let path = cfg.output_dir.join("f1_vs_n.csv");
    emit::write_f1_vs_n_csv(&path, &rows)?;
    for r in &rows {
        println!("N={:<6} {:<6} F1 {:.4} ± {:.4}", r.size, r.method.to_string(), r.mean_f1, r.std_f1);
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_oracle(args: &CommonArgs) -> Result<()> {
    let cfg = build_config(args)?;
    let record = oracle_study(&cfg)?;
    println!("{}", serde_json::to_string_pretty(&record)?);
    Ok(())
}

fn cmd_ci_dump(args: &CiDumpArgs) -> Result<()> {
    let cfg = build_config(&args.common)?;
    anyhow::ensure!(
        !cfg.network_path.as_os_str().is_empty(),
        "no network file given (set network_path or pass --network)"
    );
    let net = load_network(&cfg.network_path)?;
    let seed = cfg.seeds.first().copied().unwrap_or(0);
    let ss = run::sampler_seed(
        &cfg.network_path.file_stem().unwrap_or_default().to_string_lossy(),
        seed,
    );
    let data = qacd_core::bn::forward_sample(&net, cfg.n_samples, ss);
    let provider = ChiSquareProvider::new(&data);
    let n = net.n();
    println!("x,y,z,p_value,statistic,dof,effective");
    for x in 0..n {
        for y in (x + 1)..n {
            let others: Vec<usize> = (0..n).filter(|&v| v != x && v != y).collect();
            let mut stack = vec![vec![]];
            for k in 1..=args.max_z.min(others.len()) {
                let mut idx: Vec<usize> = (0..k).collect();
                loop {
                    stack.push(idx.iter().map(|&i| others[i]).collect::<Vec<_>>());
                    let mut i = k;
                    let done = loop {
                        if i == 0 {
                            break true;
                        }
                        i -= 1;
                        if idx[i] != others.len() - k + i {
                            break false;
                        }
                    };
                    if done {
                        break;
                    }
                    idx[i] += 1;
                    for j in (i + 1)..k {
                        idx[j] = idx[j - 1] + 1;
                    }
                }
            }
            for z in stack {
                let r = provider.query(&CiQuery::new(x, y, &z));
                let zs: Vec<String> = z.iter().map(|v| net.variables[*v].name.clone()).collect();
                println!(
                    "{},{},{},{},{},{},{}",
                    net.variables[x].name,
                    net.variables[y].name,
                    zs.join(";"),
                    r.p_value,
                    r.statistic,
                    r.dof,
                    r.effective
                );
            }
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match &cli.cmd {
        Cmd::Discover(args) => cmd_discover(args),
        Cmd::Benchmark(args) => cmd_benchmark(args),
        Cmd::Sweep(args) => cmd_sweep(args),
        Cmd::Oracle(args) => cmd_oracle(args),
        Cmd::CiDump(args) => cmd_ci_dump(args),
    }
}
