//! The simulated consensus algorithms.
//!
//! Every algorithm runs slot by slot on a fixed placement and initial
//! measurement vector, charges each slot to a [`Ledger`], and reports state
//! to an [`Observer`] after every state change.

mod gossip;
mod hierarchical;
mod path;
mod quantized;

pub use gossip::{random_matching, randomized_gossip_run, GossipGraph};
pub use hierarchical::{hierarchical_run, quantized_hierarchical_run, quantized_hierarchical_with_dither};
pub use path::{path_averaging_run, route};
pub use quantized::{pair_update, quantized_consensus_run};

use serde::{Deserialize, Serialize};

use crate::channel::{db_to_linear, default_g, ChannelParams, PhaseMode};
use crate::error::{invalid, Result};
use crate::ledger::{self, RunResult};
use crate::quantizer::{DitherMode, QuantizerSpec};
use crate::topology::NodePlacement;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Randomized,
    Path,
    Hierarchical,
    #[serde(rename = "qconsensus")]
    QConsensus,
    #[serde(rename = "qhierarchical")]
    QHierarchical,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] =
        [Algorithm::Randomized, Algorithm::Path, Algorithm::Hierarchical, Algorithm::QConsensus, Algorithm::QHierarchical];

    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Randomized => "randomized",
            Algorithm::Path => "path",
            Algorithm::Hierarchical => "hierarchical",
            Algorithm::QConsensus => "qconsensus",
            Algorithm::QHierarchical => "qhierarchical",
        }
    }

    pub fn is_quantized(&self) -> bool {
        matches!(self, Algorithm::QConsensus | Algorithm::QHierarchical)
    }

    /// Whether the algorithm exchanges over the fixed-radius gossip graph
    /// and so needs a connected placement.
    pub fn needs_gossip_graph(&self) -> bool {
        matches!(self, Algorithm::Randomized | Algorithm::Path | Algorithm::QConsensus)
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .map_or_else(|| invalid(format!("unknown algorithm '{s}'")), Ok)
    }
}

/// Parameters of one simulated trial.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub n: usize,
    pub alpha: f64,
    pub gamma_db: f64,
    pub epsilon: f64,
    pub kappa: f64,
    /// Channel uses per slot.
    pub k_slots: u32,
    pub phase: PhaseMode,
    /// SNR growth exponent: quantized runs use `gamma * N^u`.
    pub u: f64,
    /// Master seed; per-purpose streams are derived from it.
    pub seed: u64,
    pub trial: u32,
    /// Gossip radius constant `c` in `sqrt(c ln N / N)`.
    pub radius_c: f64,
    /// Safety cap on slots; `None` means `50 N^2`.
    pub max_slots: Option<u64>,
    /// Path-loss constant; `None` means `10^(-1.5 alpha)`.
    pub g: Option<f64>,
    pub dither: DitherMode,
    /// Quantized hierarchical averaging sends `value / headroom` for cell
    /// values past the first round, so that cells holding more than their
    /// share of nodes do not clip at 1.
    pub headroom: f64,
    /// Keep per-slot records in the ledger.
    pub keep_history: bool,
}

impl RunConfig {
    /// Paper defaults: `alpha = 4`, 10 dB, `eps = 1e-4`, `kappa = 1e-4`, `K = 10`.
    pub fn new(algorithm: Algorithm, n: usize) -> Self {
        Self {
            algorithm,
            n,
            alpha: 4.0,
            gamma_db: 10.0,
            epsilon: 1e-4,
            kappa: 1e-4,
            k_slots: 10,
            phase: PhaseMode::Fixed,
            u: 0.0,
            seed: 0,
            trial: 0,
            radius_c: 2.0,
            max_slots: None,
            g: None,
            dither: DitherMode::Subtractive,
            headroom: 2.0,
            keep_history: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return invalid(format!("need at least 2 nodes, got {}", self.n));
        }
        if !(self.alpha >= 2.0 && self.alpha.is_finite()) {
            return invalid(format!("path-loss exponent must be >= 2, got {}", self.alpha));
        }
        if !self.gamma_db.is_finite() {
            return invalid(format!("SNR threshold must be finite, got {} dB", self.gamma_db));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return invalid(format!("epsilon must lie in (0, 1), got {}", self.epsilon));
        }
        if !(self.kappa > 0.0 && self.kappa < 1.0) {
            return invalid(format!("kappa must lie in (0, 1), got {}", self.kappa));
        }
        if self.k_slots == 0 {
            return invalid("K must be at least 1");
        }
        if !(self.u >= 0.0 && self.u.is_finite()) {
            return invalid(format!("u must be non-negative, got {}", self.u));
        }
        if !(self.radius_c > 0.0 && self.radius_c.is_finite()) {
            return invalid(format!("radius constant must be positive, got {}", self.radius_c));
        }
        if self.max_slots == Some(0) {
            return invalid("max_slots must be positive");
        }
        if let Some(g) = self.g {
            if !(g > 0.0 && g.is_finite()) {
                return invalid(format!("path-loss constant must be positive, got {g}"));
            }
        }
        if !(self.headroom >= 1.0 && self.headroom.is_finite()) {
            return invalid(format!("headroom must be >= 1, got {}", self.headroom));
        }
        Ok(())
    }

    pub fn gamma(&self) -> f64 {
        db_to_linear(self.gamma_db)
    }

    /// Link SNR in effect: grown by `N^u` for quantized runs.
    pub fn gamma_eff(&self) -> f64 {
        if self.algorithm.is_quantized() {
            self.gamma() * (self.n as f64).powf(self.u)
        } else {
            self.gamma()
        }
    }

    pub fn channel(&self) -> Result<ChannelParams> {
        ChannelParams::new(self.alpha, self.g.unwrap_or_else(|| default_g(self.alpha)), self.gamma_eff(), self.phase)
    }

    pub fn quantizer(&self) -> Result<QuantizerSpec> {
        QuantizerSpec::new(self.k_slots, self.gamma_eff())
    }

    pub fn slot_cap(&self) -> u64 {
        self.max_slots.unwrap_or(50 * (self.n as u64).pow(2))
    }
}

/// Current estimates together with the immutable initial measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateVector {
    pub z: Vec<f64>,
    pub t: u64,
    z0: Vec<f64>,
    z_ave: f64,
    z0_norm: f64,
}

impl EstimateVector {
    /// Measurements must lie in `[0, 1)`.
    pub fn new(z0: Vec<f64>) -> Result<Self> {
        if z0.is_empty() {
            return invalid("no measurements");
        }
        if let Some(z) = z0.iter().find(|z| !(**z >= 0.0 && **z < 1.0)) {
            return invalid(format!("measurement {z} outside [0, 1)"));
        }
        let z_ave = mean(&z0);
        let z0_norm = ledger::l2_norm(&z0);
        Ok(Self { z: z0.clone(), t: 0, z0, z_ave, z0_norm })
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn z0(&self) -> &[f64] {
        &self.z0
    }

    pub fn z_ave(&self) -> f64 {
        self.z_ave
    }

    pub fn z0_norm(&self) -> f64 {
        self.z0_norm
    }

    pub fn mean(&self) -> f64 {
        mean(&self.z)
    }

    pub fn reached(&self, eps: f64) -> Result<bool> {
        ledger::epsilon_stop(&self.z, self.z_ave, self.z0_norm, eps)
    }

    pub fn mse(&self) -> f64 {
        ledger::mse(&self.z, self.z_ave)
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// State snapshot handed to an [`Observer`].
#[derive(Debug, Clone, Copy)]
pub struct SlotView<'a> {
    /// Last slot charged so far.
    pub slot: u64,
    pub estimates: &'a [f64],
    /// Symbol indices, for quantized consensus.
    pub indices: Option<&'a [u64]>,
    /// Hierarchy level just completed, for (quantized) hierarchical runs.
    pub level: Option<u32>,
}

/// Receives the state after every update. `()` ignores it.
pub trait Observer {
    fn observe(&mut self, view: SlotView<'_>);
}

impl Observer for () {
    fn observe(&mut self, _: SlotView<'_>) {}
}

impl<F: FnMut(SlotView<'_>)> Observer for F {
    fn observe(&mut self, view: SlotView<'_>) {
        self(view)
    }
}

/// Runs `cfg.algorithm` on `placement` from measurements `z0`.
pub fn run(cfg: &RunConfig, placement: &NodePlacement, z0: &[f64]) -> Result<RunResult> {
    run_observed(cfg, placement, z0, &mut ())
}

pub fn run_observed(cfg: &RunConfig, placement: &NodePlacement, z0: &[f64], obs: &mut dyn Observer) -> Result<RunResult> {
    cfg.validate()?;
    if placement.len() != cfg.n || z0.len() != cfg.n {
        return invalid(format!(
            "config has N = {} but placement has {} nodes and {} measurements",
            cfg.n,
            placement.len(),
            z0.len()
        ));
    }
    let started = std::time::Instant::now();
    let mut result = match cfg.algorithm {
        Algorithm::Randomized => randomized_gossip_run(cfg, placement, z0, obs),
        Algorithm::Path => path_averaging_run(cfg, placement, z0, obs),
        Algorithm::Hierarchical => hierarchical_run(cfg, placement, z0, obs),
        Algorithm::QConsensus => quantized_consensus_run(cfg, placement, z0, obs),
        Algorithm::QHierarchical => quantized_hierarchical_run(cfg, placement, z0, obs),
    }?;
    result.wall_time = started.elapsed();
    Ok(result)
}
