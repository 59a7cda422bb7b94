//! Averaging consensus over a path-loss wireless network.
//!
//! The crate simulates four consensus schemes (randomized gossip, path
//! averaging, hierarchical averaging, quantized consensus) plus quantized
//! hierarchical averaging, slot by slot, on nodes dropped uniformly in the
//! unit square. Every slot is charged against a [`ledger::Ledger`] that
//! folds transmit powers and frequency-slot counts into the resource metrics:
//! averaging time, transmit energy, time-bandwidth product and, for the
//! quantized schemes, mean-squared error.
//!
//! Connectivity follows an SNR-threshold ("protocol") model: a receiver hears
//! a transmitter (or a cooperating cluster) iff the received power reaches
//! the threshold. The number of frequency slots a time slot needs is the
//! greedy color count of the two-hop conflict graph of that slot.
//!
//! Modules, bottom-up:
//!
//! - [`topology`]: placements, regions, the 4-ary cell hierarchy
//! - [`channel`]: path-loss gains, neighborhoods, minimal power control
//! - [`spectrum`]: conflict graphs, two-hop squares, greedy coloring
//! - [`quantizer`]: dithered quantization onto the alphabet `Z`
//! - [`consensus`]: the simulated algorithms
//! - [`ledger`]: slot records, stopping rule, metrics, theory curves
//! - [`harness`]: seed streams, sweeps, CSV output
//! - [`oracle`]: brute-force reference computations

pub mod channel;
pub mod consensus;
pub mod error;
pub mod harness;
pub mod ledger;
pub mod oracle;
pub mod quantizer;
pub mod spectrum;
pub mod topology;

pub use channel::{ChannelParams, PhaseMode, PowerAssignment, TransmitterKind};
pub use consensus::{Algorithm, EstimateVector, RunConfig};
pub use error::{Error, Result};
pub use harness::{derive_stream, run_sweep, run_trial, Purpose, SweepSpec};
pub use ledger::{Ledger, RunResult, SlotRecord};
pub use quantizer::QuantizerSpec;
pub use topology::{HierarchyPartition, NodePlacement, Point, Region};
