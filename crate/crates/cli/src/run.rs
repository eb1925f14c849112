//! Experiment execution: multi-seed benchmarks, sample-size sweeps, oracle
//! studies, and summary statistics.

use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use qacd_core::bn::{forward_sample, parse_bif, BayesNet};
use qacd_core::ci::{cached, ChiSquareProvider, CiCache, CiProvider, OracleProvider};
use qacd_core::graph::{ExtendError, Pdag};
use qacd_core::metrics::{
    nshd, nsid, shd, sid_bounds, skeleton_f1, SidBounds, SkeletonReport,
};
use qacd_core::pc::pc_discover;
use qacd_core::qacd::{qacd_discover, QacdParams};
use qacd_core::util::splitmix64;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, Method};

/// One seed's worth of results.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub seed: u64,
    pub method: Method,
    pub wall_time_s: f64,
    #[serde(flatten)]
    pub skeleton: SkeletonReport,
    pub shd: usize,
    pub nshd: f64,
    pub sid: Option<SidBounds>,
    pub nsid: Option<(f64, f64)>,
    pub iterations: usize,
    pub converged: bool,
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Stable mix of the network identity and a config seed entry, so adding
/// networks or seeds never perturbs existing runs.
pub fn sampler_seed(network_stem: &str, seed: u64) -> u64 {
    splitmix64(fnv1a(network_stem.as_bytes()) ^ seed)
}

pub fn load_network(path: &Path) -> Result<BayesNet> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading network {}", path.display()))?;
    parse_bif(&text).with_context(|| format!("parsing network {}", path.display()))
}

fn network_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Runs one method against one provider, returning the estimate plus the
/// revision trace fields (zero/true for methods without an iteration loop).
pub fn discover_with(
    method: Method,
    provider: &dyn CiProvider,
    n_vars: usize,
    cfg: &ExperimentConfig,
    subset_seed: u64,
) -> Result<(Pdag, usize, bool)> {
    match method {
        Method::Qacd => {
            let params = QacdParams { seed: subset_seed, ..cfg.qacd.clone() };
            let (p, trace) = qacd_discover(provider, n_vars, &params)?;
            Ok((p, trace.iterations, trace.converged))
        }
        Method::QacdAblationT0 => {
            let params = QacdParams { seed: subset_seed, t_max: 0, ..cfg.qacd.clone() };
            let (p, trace) = qacd_discover(provider, n_vars, &params)?;
            Ok((p, trace.iterations, trace.converged))
        }
        Method::Pc => {
            let (p, _) = pc_discover(provider, n_vars, &cfg.pc)?;
            Ok((p, 0, true))
        }
    }
}

struct Metrics {
    skeleton: SkeletonReport,
    shd: usize,
    nshd: f64,
    sid: Option<SidBounds>,
    nsid: Option<(f64, f64)>,
}

/// Scores an estimate against the generating network. SHD and NSHD compare
/// the estimated graph with the true DAG's marks; F1 compares skeletons;
/// SID bounds range over the estimate's consistent extensions.
fn score(est: &Pdag, net: &BayesNet, compute_sid: bool, sid_cap: usize) -> Result<Metrics> {
    let truth = Pdag::from_dag(&net.dag);
    let skeleton = skeleton_f1(&est.skeleton(), &truth.skeleton());
    let shd_v = shd(est, &truth);
    let nshd_v = nshd(est, &truth, net.dag.n_edges())?;
    let sid = if compute_sid {
        match sid_bounds(est, &net.dag, sid_cap) {
            Ok(b) => Some(b),
            Err(ExtendError::CapExceeded { cap }) => {
                log::warn!("{}: more than {cap} extensions, SID not computed", net.name);
                None
            }
            Err(ExtendError::NoExtension) => {
                log::warn!("{}: estimate has no consistent extension, SID not computed", net.name);
                None
            }
        }
    } else {
        None
    };
    let nsid_v = match &sid {
        Some(b) => Some(nsid(b, net.dag.n_edges())?),
        None => None,
    };
    Ok(Metrics { skeleton, shd: shd_v, nshd: nshd_v, sid, nsid: nsid_v })
}

fn run_one_seed(
    net: &BayesNet,
    stem: &str,
    seed: u64,
    method: Method,
    cfg: &ExperimentConfig,
) -> Result<(Pdag, RunRecord)> {
    let ss = sampler_seed(stem, seed);
    let data = forward_sample(net, cfg.n_samples, ss);
    let provider = cached(ChiSquareProvider::new(&data), CiCache::new());
    let subset_seed = splitmix64(ss ^ cfg.qacd.seed);
    let start = Instant::now();
    let (est, iterations, converged) = discover_with(method, &provider, net.n(), cfg, subset_seed)?;
    let wall_time_s = start.elapsed().as_secs_f64();
    let m = score(&est, net, cfg.compute_sid, cfg.sid_cap)?;
    let record = RunRecord {
        seed,
        method,
        wall_time_s,
        skeleton: m.skeleton,
        shd: m.shd,
        nshd: m.nshd,
        sid: m.sid,
        nsid: m.nsid,
        iterations,
        converged,
    };
    Ok((est, record))
}

/// One run on the first configured seed, returning the estimate with its
/// record.
pub fn single_run(cfg: &ExperimentConfig) -> Result<(Pdag, RunRecord)> {
    cfg.validate()?;
    let net = load_network(&cfg.network_path)?;
    let stem = network_stem(&cfg.network_path);
    run_one_seed(&net, &stem, cfg.seeds[0], cfg.method, cfg)
}

/// Multi-seed benchmark of the configured method. Seeds run in parallel;
/// the record order follows the seed list.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let net = load_network(&cfg.network_path)?;
    let stem = network_stem(&cfg.network_path);
    cfg.seeds
        .par_iter()
        .map(|&seed| Ok(run_one_seed(&net, &stem, seed, cfg.method, cfg)?.1))
        .collect()
}

/// Single deterministic run against the d-separation oracle instead of
/// sampled data.
pub fn oracle_study(cfg: &ExperimentConfig) -> Result<RunRecord> {
    if cfg.network_path.as_os_str().is_empty() {
        anyhow::bail!("no network file given (set network_path or pass --network)");
    }
    let net = load_network(&cfg.network_path)?;
    let provider = OracleProvider::new(&net);
    let start = Instant::now();
    let (est, iterations, converged) =
        discover_with(cfg.method, &provider, net.n(), cfg, cfg.qacd.seed)?;
    let wall_time_s = start.elapsed().as_secs_f64();
    let m = score(&est, &net, cfg.compute_sid, cfg.sid_cap)?;
    Ok(RunRecord {
        seed: 0,
        method: cfg.method,
        wall_time_s,
        skeleton: m.skeleton,
        shd: m.shd,
        nshd: m.nshd,
        sid: m.sid,
        nsid: m.nsid,
        iterations,
        converged,
    })
}

/// One row of the F1-versus-sample-size table.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub size: usize,
    pub method: Method,
    pub mean_f1: f64,
    pub std_f1: f64,
}

/// Runs both qacd and pc over the configured seeds at each sample size,
/// sharing one dataset and CI cache per (seed, size).
pub fn sweep_sample_size(cfg: &ExperimentConfig, sizes: &[usize]) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    anyhow::ensure!(!sizes.is_empty(), "the size list must be nonempty");
    let net = load_network(&cfg.network_path)?;
    let stem = network_stem(&cfg.network_path);
    let methods = [Method::Qacd, Method::Pc];
    let mut rows = Vec::new();
    for &size in sizes {
        let per_seed: Vec<[f64; 2]> = cfg
            .seeds
            .par_iter()
            .map(|&seed| -> Result<[f64; 2]> {
                let ss = sampler_seed(&stem, seed);
                let data = forward_sample(&net, size, ss);
                let provider = cached(ChiSquareProvider::new(&data), CiCache::new());
                let subset_seed = splitmix64(ss ^ cfg.qacd.seed);
                let mut f1 = [0.0; 2];
                for (slot, &method) in methods.iter().enumerate() {
                    let (est, _, _) =
                        discover_with(method, &provider, net.n(), cfg, subset_seed)?;
                    let truth = Pdag::from_dag(&net.dag);
                    f1[slot] = skeleton_f1(&est.skeleton(), &truth.skeleton()).f1;
                }
                Ok(f1)
            })
            .collect::<Result<_>>()?;
        for (slot, &method) in methods.iter().enumerate() {
            let values: Vec<f64> = per_seed.iter().map(|f| f[slot]).collect();
            let (mean, std) = mean_std(&values);
            rows.push(SweepRow { size, method, mean_f1: mean, std_f1: std });
        }
    }
    Ok(rows)
}

/// Population mean and standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.max(0.0).sqrt())
}

/// Mean and population std of one metric for one method, over the seeds
/// where the metric was computed.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub method: Method,
    pub metric: String,
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    let metrics: [(&str, fn(&RunRecord) -> Option<f64>); 11] = [
        ("f1", |r| Some(r.skeleton.f1)),
        ("precision", |r| Some(r.skeleton.precision)),
        ("recall", |r| Some(r.skeleton.recall)),
        ("shd", |r| Some(r.shd as f64)),
        ("nshd", |r| Some(r.nshd)),
        ("sid_low", |r| r.sid.map(|b| b.low as f64)),
        ("sid_high", |r| r.sid.map(|b| b.high as f64)),
        ("nsid_low", |r| r.nsid.map(|b| b.0)),
        ("nsid_high", |r| r.nsid.map(|b| b.1)),
        ("iterations", |r| Some(r.iterations as f64)),
        ("wall_time_s", |r| Some(r.wall_time_s)),
    ];
    let mut methods = Vec::new();
    for r in records {
        if !methods.contains(&r.method) {
            methods.push(r.method);
        }
    }
    let mut rows = Vec::new();
    for &method in &methods {
        for (name, get) in metrics {
            let values: Vec<f64> = records
                .iter()
                .filter(|r| r.method == method)
                .filter_map(get)
                .collect();
            let (mean, std) = mean_std(&values);
            rows.push(SummaryRow {
                method,
                metric: name.to_string(),
                mean,
                std,
                count: values.len(),
            });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn quick_cfg(network: &str, method: Method, seeds: Vec<u64>, n: usize) -> ExperimentConfig {
        ExperimentConfig {
            network_path: PathBuf::from(network),
            method,
            n_samples: n,
            seeds,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn sampler_seed_mixes_name_and_entry() {
        let a = sampler_seed("asia", 0);
        let b = sampler_seed("asia", 1);
        let c = sampler_seed("survey", 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, sampler_seed("asia", 0), "stable across calls");
    }

    #[test]
    fn mean_std_matches_hand_arithmetic() {
        let (m, s) = mean_std(&[0.9, 0.7]);
        assert!((m - 0.8).abs() < 1e-15);
        assert!((s - 0.1).abs() < 1e-15);
        let (m, s) = mean_std(&[0.42]);
        assert_eq!(m, 0.42);
        assert_eq!(s, 0.0, "single value has zero population std");
    }

    #[test]
    fn earthquake_benchmark_runs_and_repeats_identically() {
        let cfg = quick_cfg("../../networks/earthquake.bif", Method::Qacd, vec![0, 1, 2], 2000);
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a.len(), 3);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.seed, y.seed);
            assert_eq!(x.skeleton, y.skeleton);
            assert_eq!(x.shd, y.shd);
            assert_eq!(x.sid, y.sid);
            assert_eq!(x.iterations, y.iterations);
        }
    }

    #[test]
    fn seed_isolation_holds() {
        let full = run_experiment(&quick_cfg(
            "../../networks/earthquake.bif",
            Method::Pc,
            vec![0, 1, 2],
            1000,
        ))
        .unwrap();
        let partial = run_experiment(&quick_cfg(
            "../../networks/earthquake.bif",
            Method::Pc,
            vec![0, 2],
            1000,
        ))
        .unwrap();
        assert_eq!(full[0].shd, partial[0].shd);
        assert_eq!(full[2].shd, partial[1].shd);
        assert_eq!(full[0].skeleton, partial[0].skeleton);
        assert_eq!(full[2].skeleton, partial[1].skeleton);
    }

    #[test]
    fn oracle_earthquake_is_perfect_for_both_methods() {
        for method in [Method::Qacd, Method::Pc] {
            let cfg = quick_cfg("../../networks/earthquake.bif", method, vec![0], 10);
            let r = oracle_study(&cfg).unwrap();
            assert_eq!(r.skeleton.f1, 1.0, "{method}");
            assert_eq!(r.nshd, 0.0, "{method}");
            assert_eq!(r.sid, Some(qacd_core::metrics::SidBounds {
                low: 0,
                high: 0,
                extensions_used: 1,
            }));
        }
    }

    #[test]
    fn summaries_group_by_method_and_count_missing() {
        let cfg = quick_cfg("../../networks/earthquake.bif", Method::Qacd, vec![0, 1], 500);
        let mut records = run_experiment(&cfg).unwrap();
        records[1].sid = None;
        records[1].nsid = None;
        let rows = summarize(&records);
        let f1 = rows.iter().find(|r| r.metric == "f1").unwrap();
        assert_eq!(f1.count, 2);
        let sid_low = rows.iter().find(|r| r.metric == "sid_low").unwrap();
        assert_eq!(sid_low.count, 1, "absent metrics summarize over present values");
    }

    #[test]
    fn sweep_produces_one_row_per_size_and_method() {
        let cfg = quick_cfg("../../networks/earthquake.bif", Method::Qacd, vec![0, 1], 500);
        let rows = sweep_sample_size(&cfg, &[300, 600]).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].size, 300);
        assert_eq!(rows[0].method, Method::Qacd);
        assert_eq!(rows[1].method, Method::Pc);
        assert_eq!(rows[3].size, 600);
    }
}
