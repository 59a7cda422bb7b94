//! Path-loss channel, SNR-threshold connectivity and minimal power control.
//!
//! A transmission at power `P` over distance `d` arrives with power
//! `G d^(-alpha) P`; a link exists when that reaches the threshold `gamma`.
//! Cooperating clusters combine either coherently (fixed phase: amplitudes
//! add) or incoherently (uniform phase: powers add, the large-block
//! expectation).

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::topology::NodePlacement;

/// Relative slack on threshold comparisons. Power control solves for
/// equality at the worst receiver; recomputing received power from that
/// solution can land an ulp or two below `gamma`.
pub const LINK_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseMode {
    Fixed,
    Uniform,
}

impl PhaseMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            PhaseMode::Fixed => "fixed",
            PhaseMode::Uniform => "uniform",
        }
    }
}

impl std::str::FromStr for PhaseMode {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(PhaseMode::Fixed),
            "uniform" => Ok(PhaseMode::Uniform),
            other => invalid(format!("unknown phase mode '{other}'")),
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    alpha: f64,
    g: f64,
    gamma: f64,
    phase: PhaseMode,
}

impl ChannelParams {
    pub fn new(alpha: f64, g: f64, gamma: f64, phase: PhaseMode) -> Result<Self> {
        if !(alpha >= 2.0 && alpha.is_finite()) {
            return invalid(format!("path-loss exponent must be >= 2, got {alpha}"));
        }
        if !(g > 0.0 && g.is_finite()) {
            return invalid(format!("path-loss constant must be positive, got {g}"));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return invalid(format!("SNR threshold must be positive, got {gamma}"));
        }
        Ok(Self { alpha, g, gamma, phase })
    }

    /// Uses `G = 10^(-3 alpha / 2)`.
    pub fn with_default_g(alpha: f64, gamma: f64, phase: PhaseMode) -> Result<Self> {
        Self::new(alpha, default_g(alpha), gamma, phase)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn phase(&self) -> PhaseMode {
        self.phase
    }

    pub fn with_phase(mut self, phase: PhaseMode) -> Self {
        self.phase = phase;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return invalid(format!("SNR threshold must be positive, got {gamma}"));
        }
        self.gamma = gamma;
        Ok(self)
    }

    /// `(gamma / G) d^alpha`: the least power reaching distance `d`.
    pub fn required_power(&self, d: f64) -> f64 {
        self.gamma / self.g * d.powf(self.alpha)
    }

    pub fn received_power(&self, d: f64, power: f64) -> f64 {
        self.g * d.powf(-self.alpha) * power
    }

    pub fn meets_threshold(&self, received: f64) -> bool {
        received >= self.gamma * (1.0 - LINK_TOLERANCE)
    }

    /// Whether a node transmitting at `power` is heard at distance `d`.
    pub fn hears(&self, d: f64, power: f64) -> bool {
        power > 0.0 && self.meets_threshold(self.received_power(d, power))
    }

    /// Logs a warning if some pair on `placement` has a gain above one.
    /// Returns the largest gain magnitude.
    pub fn check_gains(&self, placement: &NodePlacement) -> f64 {
        let mut d_min = f64::INFINITY;
        for a in 0..placement.len() {
            for b in a + 1..placement.len() {
                d_min = d_min.min(placement.distance(a, b));
            }
        }
        let worst = self.g.sqrt() * d_min.powf(-self.alpha / 2.0);
        if worst > 1.0 {
            log::warn!("channel gain {worst:.3e} exceeds unity at distance {d_min:.3e}");
        }
        worst
    }
}

pub fn default_g(alpha: f64) -> f64 {
    10f64.powf(-1.5 * alpha)
}

pub fn gain_magnitude(params: &ChannelParams, d: f64) -> Result<f64> {
    if !(d > 0.0) {
        return invalid(format!("gain requires a positive distance, got {d}"));
    }
    Ok(params.g.sqrt() * d.powf(-params.alpha / 2.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransmitterKind {
    Node,
    Cluster,
}

/// Per-node transmit powers in one slot. A node with zero power is silent.
/// For cluster slots the powers are still stored per node; cluster
/// membership is supplied separately.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAssignment {
    pub slot: u64,
    pub kind: TransmitterKind,
    powers: Vec<f64>,
}

impl PowerAssignment {
    pub fn new(slot: u64, kind: TransmitterKind, powers: Vec<f64>) -> Result<Self> {
        if let Some(p) = powers.iter().find(|p| !(**p >= 0.0 && p.is_finite())) {
            return invalid(format!("transmit power must be finite and non-negative, got {p}"));
        }
        Ok(Self { slot, kind, powers })
    }

    pub fn silent(slot: u64, kind: TransmitterKind, n_nodes: usize) -> Self {
        Self { slot, kind, powers: vec![0.0; n_nodes] }
    }

    pub fn set(&mut self, node: usize, power: f64) {
        assert!(power >= 0.0 && power.is_finite(), "bad power {power}");
        self.powers[node] = power;
    }

    pub fn power(&self, node: usize) -> f64 {
        self.powers[node]
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn is_active(&self, node: usize) -> bool {
        self.powers[node] > 0.0
    }

    pub fn active(&self) -> impl Iterator<Item = usize> + '_ {
        self.powers.iter().enumerate().filter(|(_, p)| **p > 0.0).map(|(i, _)| i)
    }

    pub fn total(&self) -> f64 {
        self.powers.iter().sum()
    }
}

/// Active transmitters heard by node `n`, in ascending id order.
pub fn node_neighborhood(
    params: &ChannelParams,
    placement: &NodePlacement,
    powers: &PowerAssignment,
    n: usize,
) -> Vec<usize> {
    powers
        .active()
        .filter(|&m| m != n && params.hears(placement.distance(m, n), powers.power(m)))
        .collect()
}

/// Power a cooperating cluster delivers to node `n`.
pub fn cluster_received_power(
    params: &ChannelParams,
    placement: &NodePlacement,
    cluster: &[usize],
    powers: &PowerAssignment,
    n: usize,
) -> Result<f64> {
    if cluster.contains(&n) {
        return invalid(format!("receiver {n} belongs to the transmitting cluster"));
    }
    Ok(received_from_cluster(params, placement, cluster, powers.powers(), n))
}

fn received_from_cluster(params: &ChannelParams, placement: &NodePlacement, cluster: &[usize], powers: &[f64], n: usize) -> f64 {
    match params.phase {
        PhaseMode::Fixed => {
            let amplitude: f64 = cluster
                .iter()
                .map(|&m| placement.distance(m, n).powf(-params.alpha / 2.0) * powers[m].sqrt())
                .sum();
            params.g * amplitude * amplitude
        }
        PhaseMode::Uniform => {
            let total: f64 = cluster.iter().map(|&m| placement.distance(m, n).powf(-params.alpha) * powers[m]).sum();
            params.g * total
        }
    }
}

/// Ids of clusters heard by node `n`. The cluster containing `n`, and
/// clusters with no active member, are never included.
pub fn cluster_neighborhood(
    params: &ChannelParams,
    placement: &NodePlacement,
    clusters: &[Vec<usize>],
    powers: &PowerAssignment,
    n: usize,
) -> Vec<usize> {
    clusters
        .iter()
        .enumerate()
        .filter(|(_, members)| !members.contains(&n) && members.iter().any(|&m| powers.is_active(m)))
        .filter(|(_, members)| params.meets_threshold(received_from_cluster(params, placement, members, powers.powers(), n)))
        .map(|(j, _)| j)
        .collect()
}

/// Clusters heard by at least one node of `clusters[receiver]`.
pub fn cluster_of_cluster_neighborhood(
    params: &ChannelParams,
    placement: &NodePlacement,
    clusters: &[Vec<usize>],
    powers: &PowerAssignment,
    receiver: usize,
) -> Vec<usize> {
    receiver_set_neighborhood(params, placement, clusters, powers, &clusters[receiver])
}

/// Clusters heard by at least one node of `receivers`.
pub fn receiver_set_neighborhood(
    params: &ChannelParams,
    placement: &NodePlacement,
    clusters: &[Vec<usize>],
    powers: &PowerAssignment,
    receivers: &[usize],
) -> Vec<usize> {
    let mut out: Vec<usize> = receivers
        .iter()
        .flat_map(|&n| cluster_neighborhood(params, placement, clusters, powers, n))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Least power letting node `n` reach every node in `targets`.
pub fn min_broadcast_power_node(params: &ChannelParams, placement: &NodePlacement, n: usize, targets: &[usize]) -> Result<f64> {
    if targets.is_empty() {
        return invalid("broadcast needs at least one target");
    }
    let farthest = targets
        .iter()
        .filter(|&&m| m != n)
        .map(|&m| placement.distance(n, m))
        .fold(0.0, f64::max);
    if farthest == 0.0 {
        return Ok(0.0);
    }
    Ok(params.required_power(farthest))
}

/// Least common per-node power letting `cluster` reach every receiver
/// outside it when all members transmit together.
pub fn min_cooperative_power_cluster(
    params: &ChannelParams,
    placement: &NodePlacement,
    cluster: &[usize],
    receivers: &[usize],
) -> Result<f64> {
    if cluster.is_empty() {
        return invalid("cooperative broadcast needs a nonempty cluster");
    }
    let mut worst = f64::INFINITY;
    let mut any = false;
    for &n in receivers.iter().filter(|n| !cluster.contains(n)) {
        any = true;
        let coupling = match params.phase {
            PhaseMode::Fixed => {
                let s: f64 = cluster.iter().map(|&m| placement.distance(m, n).powf(-params.alpha / 2.0)).sum();
                s * s
            }
            PhaseMode::Uniform => cluster.iter().map(|&m| placement.distance(m, n).powf(-params.alpha)).sum(),
        };
        worst = worst.min(coupling);
    }
    if !any {
        return invalid("no receivers outside the transmitting cluster");
    }
    Ok(params.gamma / params.g / worst)
}
