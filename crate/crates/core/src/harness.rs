//! Seed streams, trial setup, parameter sweeps and CSV output.

use std::io::Write;
use std::path::{Path, PathBuf};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::PhaseMode;
use crate::consensus::{self, Algorithm, RunConfig};
use crate::error::{invalid, Error, Result};
use crate::ledger::{RunResult, CSV_HEADER};
use crate::quantizer::DitherMode;
use crate::topology::{gossip_radius, is_connected, place_nodes, NodePlacement};

/// Placement attempts beyond the first when the gossip graph is disconnected.
pub const MAX_RESAMPLES: u32 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    Placement,
    /// Initial measurements `z(0)`.
    Measurements,
    Matching,
    Pairs,
    Dither,
    Coin,
}

impl Purpose {
    fn tag(self) -> u8 {
        match self {
            Purpose::Placement => 1,
            Purpose::Measurements => 2,
            Purpose::Matching => 3,
            Purpose::Pairs => 4,
            Purpose::Dither => 5,
            Purpose::Coin => 6,
        }
    }

    /// Placement and measurements are common to every algorithm, so all
    /// algorithms of one `(N, trial)` see the same network and data.
    fn shared(self) -> bool {
        matches!(self, Purpose::Placement | Purpose::Measurements)
    }
}

fn algorithm_tag(a: Algorithm) -> u8 {
    match a {
        Algorithm::Randomized => 1,
        Algorithm::Path => 2,
        Algorithm::Hierarchical => 3,
        Algorithm::QConsensus => 4,
        Algorithm::QHierarchical => 5,
    }
}

/// Stream for one `(master_seed, algorithm, N, trial, purpose)` tuple. The
/// tuple is packed into the ChaCha key without hashing, so distinct tuples
/// always get distinct keys.
pub fn derive_stream(master_seed: u64, algorithm: Algorithm, n: usize, trial: u32, purpose: Purpose) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8] = if purpose.shared() { 0 } else { algorithm_tag(algorithm) };
    key[9..17].copy_from_slice(&(n as u64).to_le_bytes());
    key[17..21].copy_from_slice(&trial.to_le_bytes());
    key[21] = purpose.tag();
    ChaCha8Rng::from_seed(key)
}

/// Placement for a trial: redrawn until the gossip graph at
/// `sqrt(c ln N / N)` is connected. Returns the attempts beyond the first.
pub fn trial_placement(cfg: &RunConfig) -> Result<(NodePlacement, u32)> {
    let mut rng = derive_stream(cfg.seed, cfg.algorithm, cfg.n, cfg.trial, Purpose::Placement);
    let radius = gossip_radius(cfg.n, cfg.radius_c);
    for resamples in 0..=MAX_RESAMPLES {
        let placement = place_nodes(cfg.n, rng.next_u64())?;
        if is_connected(&placement, radius) {
            return Ok((placement, resamples));
        }
    }
    invalid(format!(
        "no connected placement for N = {} at radius constant {} after {MAX_RESAMPLES} resamples",
        cfg.n, cfg.radius_c
    ))
}

pub fn trial_measurements(cfg: &RunConfig) -> Vec<f64> {
    let mut rng = derive_stream(cfg.seed, cfg.algorithm, cfg.n, cfg.trial, Purpose::Measurements);
    (0..cfg.n).map(|_| rng.gen::<f64>()).collect()
}

/// Full trial: derived placement and measurements, then the algorithm.
pub fn run_trial(cfg: &RunConfig) -> Result<RunResult> {
    cfg.validate()?;
    let (placement, resamples) = trial_placement(cfg)?;
    let z0 = trial_measurements(cfg);
    let mut result = consensus::run(cfg, &placement, &z0)?;
    result.resamples = resamples;
    Ok(result)
}

/// One experiment grid. Field names double as the JSON config keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(alias = "algorithms")]
    pub algorithm: Vec<Algorithm>,
    pub n: Vec<usize>,
    pub trials: u32,
    pub alpha: f64,
    #[serde(alias = "gamma-db")]
    pub gamma_db: f64,
    pub epsilon: f64,
    pub kappa: f64,
    #[serde(alias = "k-slots", alias = "K")]
    pub k_slots: u32,
    pub u: f64,
    pub phase: PhaseMode,
    #[serde(alias = "radius-c")]
    pub radius_c: f64,
    pub seed: u64,
    #[serde(alias = "max-slots")]
    pub max_slots: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub dither: DitherMode,
    pub headroom: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        let base = RunConfig::new(Algorithm::Randomized, 16);
        Self {
            algorithm: vec![Algorithm::Randomized, Algorithm::Path, Algorithm::Hierarchical, Algorithm::QHierarchical],
            n: vec![16, 64, 256, 1024],
            trials: 50,
            alpha: base.alpha,
            gamma_db: base.gamma_db,
            epsilon: base.epsilon,
            kappa: base.kappa,
            k_slots: base.k_slots,
            u: base.u,
            phase: base.phase,
            radius_c: base.radius_c,
            seed: 0,
            max_slots: None,
            workers: None,
            out: None,
            dither: base.dither,
            headroom: base.headroom,
        }
    }
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SweepSpec = serde_json::from_str(text)?;
        Ok(spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.algorithm.is_empty() {
            return invalid("sweep lists no algorithms");
        }
        if self.n.is_empty() {
            return invalid("sweep lists no N values");
        }
        if let Some(n) = self.n.iter().find(|&&n| n < 4) {
            return invalid(format!("N values must be at least 4, got {n}"));
        }
        if self.trials == 0 {
            return invalid("trials must be at least 1");
        }
        if self.workers == Some(0) {
            return invalid("workers must be at least 1");
        }
        for cfg in self.configs() {
            cfg.validate()?;
            if cfg.algorithm == Algorithm::QConsensus && cfg.quantizer()?.is_exact() {
                return invalid(format!(
                    "qconsensus at N = {} needs a finite alphabet; K = {} at {} dB is effectively exact",
                    cfg.n, cfg.k_slots, cfg.gamma_db
                ));
            }
        }
        Ok(())
    }

    /// Every `(algorithm, N, trial)` configuration, in output order.
    pub fn configs(&self) -> Vec<RunConfig> {
        let mut algorithms = self.algorithm.clone();
        algorithms.sort_by_key(|a| a.as_str());
        algorithms.dedup();
        let mut ns = self.n.clone();
        ns.sort_unstable();
        ns.dedup();
        let mut out = Vec::new();
        for &algorithm in &algorithms {
            for &n in &ns {
                for trial in 0..self.trials {
                    out.push(RunConfig {
                        algorithm,
                        n,
                        alpha: self.alpha,
                        gamma_db: self.gamma_db,
                        epsilon: self.epsilon,
                        kappa: self.kappa,
                        k_slots: self.k_slots,
                        phase: self.phase,
                        u: self.u,
                        seed: self.seed,
                        trial,
                        radius_c: self.radius_c,
                        max_slots: self.max_slots,
                        g: None,
                        dither: self.dither,
                        headroom: self.headroom,
                        keep_history: false,
                    });
                }
            }
        }
        out
    }
}

/// Runs every trial of `spec`, up to `spec.workers` at a time. Results come
/// back sorted by `(algorithm, N, trial)` whatever the schedule.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<RunResult>> {
    spec.validate()?;
    let configs = spec.configs();
    let run_all = || configs.par_iter().map(run_trial).collect::<Result<Vec<_>>>();
    let results = match spec.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("cannot start {w} workers: {e}")))?
            .install(run_all)?,
        None => run_all()?,
    };
    for r in &results {
        log::debug!(
            "{} N={} trial={} T={} converged={} in {:.2?}",
            r.config.algorithm,
            r.config.n,
            r.config.trial,
            r.t_slots,
            r.converged,
            r.wall_time
        );
    }
    Ok(results)
}

pub fn write_csv<W: Write>(results: &[RunResult], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for r in results {
        w.write_record(r.csv_record())?;
    }
    w.flush()?;
    Ok(())
}

/// Runs the sweep and writes its CSV to `spec.out`, or stdout.
pub fn run_sweep_to_output(spec: &SweepSpec) -> Result<()> {
    let results = run_sweep(spec)?;
    match &spec.out {
        Some(path) => write_csv(&results, std::io::BufWriter::new(std::fs::File::create(path)?)),
        None => write_csv(&results, std::io::stdout().lock()),
    }
}

/// Process exit status for a failed command: 2 for bad input, 3 for I/O.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => 3,
        Error::Csv(e) if matches!(e.kind(), csv::ErrorKind::Io(_)) => 3,
        Error::Invariant(_) => 1,
        _ => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_tuple_same_stream() {
        let mut a = derive_stream(7, Algorithm::Path, 64, 3, Purpose::Pairs);
        let mut b = derive_stream(7, Algorithm::Path, 64, 3, Purpose::Pairs);
        for _ in 0..10 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn distinct_tuples_differ() {
        let first = |s, a, n, t, p| derive_stream(s, a, n, t, p).next_u64();
        let base = first(7, Algorithm::Path, 64, 3, Purpose::Pairs);
        assert_ne!(base, first(8, Algorithm::Path, 64, 3, Purpose::Pairs));
        assert_ne!(base, first(7, Algorithm::Randomized, 64, 3, Purpose::Pairs));
        assert_ne!(base, first(7, Algorithm::Path, 65, 3, Purpose::Pairs));
        assert_ne!(base, first(7, Algorithm::Path, 64, 4, Purpose::Pairs));
        assert_ne!(base, first(7, Algorithm::Path, 64, 3, Purpose::Coin));
    }

    #[test]
    fn placements_shared_across_algorithms_but_not_trials() {
        let a = RunConfig { seed: 5, ..RunConfig::new(Algorithm::Randomized, 64) };
        let b = RunConfig { algorithm: Algorithm::Hierarchical, ..a.clone() };
        let c = RunConfig { trial: 1, ..a.clone() };
        assert_eq!(trial_placement(&a).unwrap().0.positions(), trial_placement(&b).unwrap().0.positions());
        assert_ne!(trial_placement(&a).unwrap().0.positions(), trial_placement(&c).unwrap().0.positions());
        assert_eq!(trial_measurements(&a), trial_measurements(&b));
    }

    #[test]
    fn substream_first_outputs_are_uniform() {
        // chi-square over 20 bins, 1% critical value for 19 dof is 36.19
        let bins = 20;
        let mut counts = vec![0u32; bins];
        for trial in 0..10_000 {
            let x: f64 = derive_stream(1, Algorithm::Randomized, 256, trial, Purpose::Matching).gen();
            counts[(x * bins as f64) as usize] += 1;
        }
        let expected = 10_000.0 / bins as f64;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        assert!(chi2 < 36.19, "chi2 = {chi2}");
    }

    #[test]
    fn json_config_keys() {
        let spec = SweepSpec::from_json(r#"{"algorithm": ["path", "hierarchical"], "n": [16, 64], "trials": 3, "gamma_db": 0, "phase": "uniform"}"#).unwrap();
        assert_eq!(spec.algorithm, vec![Algorithm::Path, Algorithm::Hierarchical]);
        assert_eq!(spec.trials, 3);
        assert_eq!(spec.phase, PhaseMode::Uniform);
        assert_eq!(spec.alpha, 4.0);
        assert!(SweepSpec::from_json(r#"{"bogus": 1}"#).is_err());
        assert!(SweepSpec::from_json(r#"{"algorithm": ["nope"]}"#).is_err());
    }

    #[test]
    fn validation_rejects_bad_grids() {
        let ok = SweepSpec { n: vec![16], trials: 1, ..Default::default() };
        ok.validate().unwrap();
        assert!(SweepSpec { n: vec![3], ..ok.clone() }.validate().is_err());
        assert!(SweepSpec { trials: 0, ..ok.clone() }.validate().is_err());
        assert!(SweepSpec { algorithm: vec![], ..ok.clone() }.validate().is_err());
        assert!(SweepSpec { epsilon: 2.0, ..ok.clone() }.validate().is_err());
        assert!(SweepSpec { algorithm: vec![Algorithm::QConsensus], k_slots: 20, ..ok.clone() }.validate().is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::InvalidArgument("x".into())), 2);
        assert_eq!(exit_code(&Error::Io(std::io::Error::other("x"))), 3);
    }
}
