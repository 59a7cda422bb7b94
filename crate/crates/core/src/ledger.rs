//! Per-slot resource accounting and the metrics derived from it.

use std::time::Duration;

use crate::channel::PhaseMode;
use crate::consensus::RunConfig;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SlotRecord {
    pub slot: u64,
    /// Sum of transmit powers over every transmitting node.
    pub power: f64,
    /// Frequency slots `B(t)`.
    pub freq_slots: u64,
    /// Transmitting stations (nodes, or clusters in cooperative slots).
    pub transmitters: u64,
    /// Largest receiver neighborhood in the slot.
    pub max_neighborhood: u64,
    /// Largest degree of the colored two-hop graph.
    pub max_conflict_degree: u64,
}

impl SlotRecord {
    /// `max_n |N_n(t)| <= B(t) <= maxdeg(G2(t)) + 1`.
    pub fn satisfies_sandwich(&self) -> bool {
        if self.transmitters == 0 {
            return self.freq_slots == 0 && self.max_neighborhood == 0;
        }
        self.max_neighborhood <= self.freq_slots && self.freq_slots <= self.max_conflict_degree + 1
    }
}

/// One multi-hop exchange of path averaging.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExchangeRecord {
    /// Nodes on the route, endpoints included.
    pub path_len: u64,
    pub first_slot: u64,
    pub last_slot: u64,
}

#[derive(Debug, Clone)]
pub struct Ledger {
    k: u32,
    keep_history: bool,
    last_slot: Option<u64>,
    slots: u64,
    power_total: f64,
    freq_total: u64,
    history: Vec<SlotRecord>,
    exchanges: Vec<ExchangeRecord>,
}

impl Ledger {
    pub fn new(k: u32, keep_history: bool) -> Self {
        Self {
            k,
            keep_history,
            last_slot: None,
            slots: 0,
            power_total: 0.0,
            freq_total: 0,
            history: Vec::new(),
            exchanges: Vec::new(),
        }
    }

    pub fn record_slot(&mut self, record: SlotRecord) -> Result<()> {
        if let Some(last) = self.last_slot {
            if record.slot <= last {
                return invalid(format!("slot {} recorded after slot {last}", record.slot));
            }
        }
        if !(record.power >= 0.0 && record.power.is_finite()) {
            return invalid(format!("slot {} has invalid power {}", record.slot, record.power));
        }
        if record.transmitters > 0 && record.freq_slots == 0 {
            return invalid(format!("slot {} has transmitters but no frequency slots", record.slot));
        }
        self.last_slot = Some(record.slot);
        self.slots += 1;
        self.power_total += record.power;
        self.freq_total += record.freq_slots;
        if self.keep_history {
            self.history.push(record);
        }
        Ok(())
    }

    pub fn record_exchange(&mut self, exchange: ExchangeRecord) {
        if self.keep_history {
            self.exchanges.push(exchange);
        }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Number of slots recorded.
    pub fn slots(&self) -> u64 {
        self.slots
    }

    pub fn last_slot(&self) -> Option<u64> {
        self.last_slot
    }

    /// `K * sum_t sum_n P_n(t)`.
    pub fn energy(&self) -> f64 {
        self.k as f64 * self.power_total
    }

    /// `K * sum_t B(t)`.
    pub fn time_bandwidth(&self) -> u64 {
        self.k as u64 * self.freq_total
    }

    pub fn history(&self) -> &[SlotRecord] {
        &self.history
    }

    pub fn exchanges(&self) -> &[ExchangeRecord] {
        &self.exchanges
    }
}

pub fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `||z - z_ave 1|| / ||z(0)|| < eps`.
pub fn epsilon_stop(z: &[f64], z_ave: f64, z0_norm: f64, eps: f64) -> Result<bool> {
    if !(z0_norm > 0.0) {
        return invalid("initial estimate vector has zero norm");
    }
    if !(eps > 0.0) {
        return invalid(format!("tolerance must be positive, got {eps}"));
    }
    let dev = z.iter().map(|x| (x - z_ave) * (x - z_ave)).sum::<f64>().sqrt();
    Ok(dev / z0_norm < eps)
}

pub fn mse(estimates: &[f64], z_ave: f64) -> f64 {
    estimates.iter().map(|z| (z - z_ave) * (z - z_ave)).sum::<f64>() / estimates.len() as f64
}

/// Outcome of one simulated trial.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub config: RunConfig,
    pub t_slots: u64,
    pub b_tbp: u64,
    pub e_energy: f64,
    /// Only for the quantized schemes.
    pub mse: Option<f64>,
    pub converged: bool,
    pub resamples: u32,
    pub wall_time: Duration,
    pub final_estimates: Vec<f64>,
    pub ledger: Ledger,
}

impl RunResult {
    pub(crate) fn from_ledger(config: &RunConfig, ledger: Ledger, final_estimates: Vec<f64>, mse: Option<f64>, converged: bool) -> Self {
        Self {
            config: config.clone(),
            t_slots: ledger.slots(),
            b_tbp: ledger.time_bandwidth(),
            e_energy: ledger.energy(),
            mse,
            converged,
            resamples: 0,
            wall_time: Duration::ZERO,
            final_estimates,
            ledger,
        }
    }

    pub fn csv_record(&self) -> Vec<String> {
        let c = &self.config;
        vec![
            c.algorithm.as_str().to_string(),
            c.phase.as_str().to_string(),
            c.n.to_string(),
            fmt_f64(c.alpha),
            fmt_f64(c.gamma_db),
            fmt_f64(c.epsilon),
            fmt_f64(c.kappa),
            c.k_slots.to_string(),
            fmt_f64(c.u),
            c.seed.to_string(),
            c.trial.to_string(),
            self.t_slots.to_string(),
            self.b_tbp.to_string(),
            fmt_f64(self.e_energy),
            self.mse.map(fmt_f64).unwrap_or_default(),
            self.converged.to_string(),
            self.resamples.to_string(),
        ]
    }
}

pub const CSV_HEADER: [&str; 17] = [
    "algorithm",
    "phase_mode",
    "N",
    "alpha",
    "gamma_db",
    "epsilon",
    "kappa",
    "K",
    "u",
    "seed",
    "trial",
    "T_slots",
    "B_tbp",
    "E_energy",
    "mse",
    "converged",
    "resamples",
];

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// Scheme whose scaling law [`theory_curve`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Any ideal-link algorithm.
    LowerBound,
    /// Any rate-limited algorithm.
    QuantizedLowerBound,
    RandomizedGossip,
    PathAveraging,
    Hierarchical,
    QuantizedConsensus,
    QuantizedHierarchical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Time,
    TimeBandwidth,
    Energy,
    Mse,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryParams {
    pub alpha: f64,
    pub epsilon: f64,
    pub kappa: f64,
    pub k: u32,
    pub u: f64,
    pub phase: PhaseMode,
}

/// Dominant term of the scaling law for `(scheme, metric)` at `n`, without
/// constants.
pub fn theory_curve(scheme: Scheme, metric: Metric, n: f64, p: &TheoryParams) -> Result<f64> {
    use Metric::*;
    use Scheme::*;
    let ln_n = n.ln();
    let ln_eps = (1.0 / p.epsilon).ln();
    let a = p.alpha;
    let k = p.k as f64;
    let hier_energy_exp = match p.phase {
        PhaseMode::Fixed => 1.0 - a / 2.0 + p.kappa * a / 2.0,
        PhaseMode::Uniform => p.kappa * a / 2.0,
    };
    let value = match (scheme, metric) {
        (LowerBound, Time | TimeBandwidth) => 1.0,
        (LowerBound, Energy) => n.powf(1.0 - a / 2.0),
        (QuantizedLowerBound, Time | TimeBandwidth) => k,
        (QuantizedLowerBound, Energy) => k * n.powf(1.0 + p.u - a / 2.0),
        (QuantizedLowerBound, Mse) => n.powf(-2.0 * k * p.u),
        (RandomizedGossip, Time) => n * ln_eps / ln_n,
        (RandomizedGossip, TimeBandwidth) => n * ln_eps,
        (RandomizedGossip, Energy) => n.powf(2.0 - a / 2.0) * ln_n.powf(a / 2.0 - 1.0) * ln_eps,
        (PathAveraging, Time | TimeBandwidth) => (n / ln_n).sqrt(),
        (PathAveraging, Energy) => n.powf(1.0 - a / 2.0) * ln_n.powf(a / 2.0) * ln_eps,
        (Hierarchical, Time | TimeBandwidth) => n.powf(p.kappa),
        (Hierarchical, Energy) => n.powf(hier_energy_exp),
        (QuantizedConsensus, Time) => k * n,
        (QuantizedConsensus, TimeBandwidth) => k * n * ln_n,
        (QuantizedConsensus, Energy) => k * n.powf(2.0 - a / 2.0 + p.u) * ln_n.powf(a / 2.0),
        (QuantizedConsensus, Mse) => n.powf(-2.0 * k * p.u - 1.0),
        (QuantizedHierarchical, Time | TimeBandwidth) => k * n.powf(p.kappa),
        (QuantizedHierarchical, Energy) => k * n.powf(hier_energy_exp + p.u),
        (QuantizedHierarchical, Mse) => n.powf(-2.0 * k * p.u),
        (s, m) => return invalid(format!("no scaling law for {m:?} of {s:?}")),
    };
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn rec(slot: u64, power: f64, freq: u64, tx: u64) -> SlotRecord {
        SlotRecord { slot, power, freq_slots: freq, transmitters: tx, ..Default::default() }
    }

    #[test]
    fn single_slot_energy() {
        let mut l = Ledger::new(10, true);
        l.record_slot(rec(1, 2.5, 1, 1)).unwrap();
        assert_eq!(l.energy(), 25.0);
        assert_eq!(l.slots(), 1);
    }

    #[test]
    fn empty_ledger() {
        let l = Ledger::new(10, true);
        assert_eq!(l.energy(), 0.0);
        assert_eq!(l.time_bandwidth(), 0);
    }

    #[test]
    fn time_bandwidth_sum() {
        let mut l = Ledger::new(10, true);
        l.record_slot(rec(1, 1.0, 3, 3)).unwrap();
        l.record_slot(rec(2, 1.0, 4, 4)).unwrap();
        assert_eq!(l.time_bandwidth(), 70);
    }

    #[test]
    fn rejects_bad_records() {
        let mut l = Ledger::new(1, true);
        l.record_slot(rec(3, 1.0, 1, 1)).unwrap();
        assert!(l.record_slot(rec(3, 1.0, 1, 1)).is_err());
        assert!(l.record_slot(rec(2, 1.0, 1, 1)).is_err());
        assert!(l.record_slot(rec(4, -1.0, 1, 1)).is_err());
        assert!(l.record_slot(rec(4, 1.0, 0, 1)).is_err());
        assert_eq!(l.slots(), 1);
    }

    #[test]
    fn k_scales_energy_and_bandwidth() {
        let mut a = Ledger::new(3, false);
        let mut b = Ledger::new(6, false);
        for s in 1..=5 {
            a.record_slot(rec(s, s as f64, s, s)).unwrap();
            b.record_slot(rec(s, s as f64, s, s)).unwrap();
        }
        assert_eq!(b.energy(), 2.0 * a.energy());
        assert_eq!(b.time_bandwidth(), 2 * a.time_bandwidth());
        assert!(a.history().is_empty());
    }

    #[test]
    fn stop_at_consensus() {
        assert!(epsilon_stop(&[0.5, 0.5], 0.5, 1.0, 1e-9).unwrap());
        assert!(!epsilon_stop(&[0.0, 1.0], 0.5, 1.0, 1e-3).unwrap());
        assert!(epsilon_stop(&[0.5], 0.5, 0.0, 1e-3).is_err());
    }

    #[test]
    fn stop_threshold_two_nodes() {
        // z0 = (0, 1): ||z0|| = 1, deviation of (0.5 - d, 0.5 + d) is d sqrt(2)
        let eps = 1e-2;
        for d in [0.006, 0.0075, 0.007, 0.0071] {
            let stops = epsilon_stop(&[0.5 - d, 0.5 + d], 0.5, 1.0, eps).unwrap();
            assert_eq!(stops, d * 2f64.sqrt() < eps, "d = {d}");
        }
    }

    #[test]
    fn mse_examples() {
        assert_eq!(mse(&[0.3, 0.3], 0.3), 0.0);
        assert_relative_eq!(mse(&[0.7, 0.9], 0.5), 0.1, max_relative = 1e-12);
        assert_relative_eq!(mse(&[0.4, 0.6], 0.5), 0.01, max_relative = 1e-12);
    }

    fn tp(alpha: f64, phase: PhaseMode) -> TheoryParams {
        TheoryParams { alpha, epsilon: 1e-4, kappa: 1e-4, k: 10, u: 0.0, phase }
    }

    #[test]
    fn gossip_time_ratio() {
        let p = tp(2.0, PhaseMode::Fixed);
        let n = 100.0;
        let a = theory_curve(Scheme::RandomizedGossip, Metric::Time, n, &p).unwrap();
        let b = theory_curve(Scheme::RandomizedGossip, Metric::Time, 4.0 * n, &p).unwrap();
        assert_relative_eq!(b / a, 4.0 * n.ln() / (4.0 * n).ln(), max_relative = 1e-12);
    }

    #[test]
    fn hierarchical_uniform_energy_at_alpha2() {
        let p = TheoryParams { kappa: 0.1, ..tp(2.0, PhaseMode::Uniform) };
        let a = theory_curve(Scheme::Hierarchical, Metric::Energy, 100.0, &p).unwrap();
        let b = theory_curve(Scheme::Hierarchical, Metric::Energy, 1000.0, &p).unwrap();
        assert_relative_eq!((b / a).log10(), 0.1, max_relative = 1e-9);
    }

    #[test]
    fn lower_bound_energy_flat_at_alpha2() {
        let p = tp(2.0, PhaseMode::Fixed);
        for n in [10.0, 1e3, 1e6] {
            assert_relative_eq!(theory_curve(Scheme::LowerBound, Metric::Energy, n, &p).unwrap(), 1.0);
        }
    }

    #[test]
    fn unknown_law_is_rejected() {
        let p = tp(2.0, PhaseMode::Fixed);
        assert!(theory_curve(Scheme::RandomizedGossip, Metric::Mse, 10.0, &p).is_err());
        assert!(theory_curve(Scheme::LowerBound, Metric::Mse, 10.0, &p).is_err());
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1e-4, 4.0, 1e-20, 123456.789, 2.5937424601e10] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }
}
