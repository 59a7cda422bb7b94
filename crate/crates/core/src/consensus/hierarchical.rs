use super::{Observer, RunConfig, SlotView};
use crate::channel::{
    cluster_neighborhood, min_broadcast_power_node, min_cooperative_power_cluster, node_neighborhood, ChannelParams,
    PowerAssignment, TransmitterKind,
};
use crate::error::{Error, Result};
use crate::harness::{derive_stream, Purpose};
use crate::ledger::{mse, Ledger, RunResult, SlotRecord};
use crate::quantizer::QuantizerSpec;
use crate::spectrum::slot_spectrum;
use crate::topology::{build_hierarchy, HierarchyPartition, NodePlacement};

/// Hierarchical averaging: one broadcast round inside each level-1 cell,
/// then one cooperative round per level in which every cell broadcasts its
/// common value to the rest of its parent cell. Always takes `T` slots.
pub fn hierarchical_run(cfg: &RunConfig, placement: &NodePlacement, z0: &[f64], obs: &mut dyn Observer) -> Result<RunResult> {
    let hierarchy = build_hierarchy(placement, cfg.kappa)?;
    let (ledger, z) = run_levels(cfg, placement, &hierarchy, z0, &mut |v, _| v, obs)?;
    Ok(RunResult::from_ledger(cfg, ledger, z, None, true))
}

/// Hierarchical averaging over rate-limited links: every transmitted value
/// is dithered and quantized. Round one sends measurements as they are;
/// later rounds send `value / headroom`.
pub fn quantized_hierarchical_run(cfg: &RunConfig, placement: &NodePlacement, z0: &[f64], obs: &mut dyn Observer) -> Result<RunResult> {
    let hierarchy = build_hierarchy(placement, cfg.kappa)?;
    let spec = cfg.quantizer()?;
    let mut rng = derive_stream(cfg.seed, cfg.algorithm, cfg.n, cfg.trial, Purpose::Dither);
    let mut send = |value: f64, level: u32| {
        let scale = if level == 1 { 1.0 } else { cfg.headroom };
        scale * spec.dithered_quantize(value / scale, &mut rng).reconstruct(cfg.dither)
    };
    let (ledger, z) = run_levels(cfg, placement, &hierarchy, z0, &mut send, obs)?;
    let z_ave = z0.iter().sum::<f64>() / z0.len() as f64;
    let err = mse(&z, z_ave);
    Ok(RunResult::from_ledger(cfg, ledger, z, Some(err), true))
}

/// Like [`quantized_hierarchical_run`] with a caller-chosen dither.
pub fn quantized_hierarchical_with_dither(
    cfg: &RunConfig,
    placement: &NodePlacement,
    hierarchy: &HierarchyPartition,
    z0: &[f64],
    spec: &QuantizerSpec,
    dither: &mut dyn FnMut() -> f64,
) -> Result<Vec<f64>> {
    let mut send = |value: f64, level: u32| {
        let scale = if level == 1 { 1.0 } else { cfg.headroom };
        scale * spec.quantize_with_dither(value / scale, dither()).reconstruct(cfg.dither)
    };
    Ok(run_levels(cfg, placement, hierarchy, z0, &mut send, &mut ())?.1)
}

/// Drives the `T` rounds. `send(value, level)` is what receivers recover
/// when a station transmits `value` during round `level`; it is only called
/// for stations that actually transmit.
fn run_levels(
    cfg: &RunConfig,
    placement: &NodePlacement,
    hierarchy: &HierarchyPartition,
    z0: &[f64],
    send: &mut dyn FnMut(f64, u32) -> f64,
    obs: &mut dyn Observer,
) -> Result<(Ledger, Vec<f64>)> {
    let params = cfg.channel()?;
    let n = placement.len();
    let levels = hierarchy.levels();
    let mut ledger = Ledger::new(cfg.k_slots, cfg.keep_history);
    let scale = |t: u32| 4f64.powi(t as i32 - levels as i32) * n as f64;

    let (record, sent) = broadcast_round(&params, placement, hierarchy, z0, send)?;
    ledger.record_slot(record)?;
    let mut values: Vec<f64> =
        hierarchy.cells(1).iter().map(|cell| cell.iter().map(|&m| sent[m]).sum::<f64>() / scale(1)).collect();
    let mut z: Vec<f64> = (0..n).map(|m| values[hierarchy.cell_of(m, 1)]).collect();
    obs.observe(SlotView { slot: 1, estimates: &z, indices: None, level: Some(1) });

    for t in 2..=levels {
        let (record, sent) = cooperative_round(&params, placement, hierarchy, t, &values, send)?;
        ledger.record_slot(record)?;
        values = (0..hierarchy.cells(t).len())
            .map(|p| 0.25 * hierarchy.children(t, p).iter().map(|&c| sent[c]).sum::<f64>())
            .collect();
        for (m, zm) in z.iter_mut().enumerate() {
            *zm = values[hierarchy.cell_of(m, t)];
        }
        obs.observe(SlotView { slot: t as u64, estimates: &z, indices: None, level: Some(t) });
    }
    Ok((ledger, z))
}

/// Round 1: each node reaches the rest of its level-1 cell. Returns the
/// slot record and the value every node contributes to its cell sum.
fn broadcast_round(
    params: &ChannelParams,
    placement: &NodePlacement,
    hierarchy: &HierarchyPartition,
    z0: &[f64],
    send: &mut dyn FnMut(f64, u32) -> f64,
) -> Result<(SlotRecord, Vec<f64>)> {
    let n = placement.len();
    let mut powers = PowerAssignment::silent(1, TransmitterKind::Node, n);
    for m in 0..n {
        let cell = hierarchy.cell(1, hierarchy.cell_of(m, 1));
        powers.set(m, min_broadcast_power_node(params, placement, m, cell)?);
    }
    let heard: Vec<Vec<usize>> = (0..n).map(|m| node_neighborhood(params, placement, &powers, m)).collect();
    for (m, hs) in heard.iter().enumerate() {
        let cell = hierarchy.cell(1, hierarchy.cell_of(m, 1));
        if let Some(&miss) = cell.iter().find(|&&k| k != m && hs.binary_search(&k).is_err()) {
            return Err(Error::Invariant(format!("node {m} does not hear cell-mate {miss} in round 1")));
        }
    }
    let transmitters: Vec<usize> = powers.active().collect();
    let spectrum = slot_spectrum(&heard, &transmitters);
    let sent = (0..n).map(|m| if powers.is_active(m) { send(z0[m], 1) } else { z0[m] }).collect();
    let record = SlotRecord {
        slot: 1,
        power: powers.total(),
        freq_slots: spectrum.freq_slots as u64,
        transmitters: transmitters.len() as u64,
        max_neighborhood: spectrum.max_neighborhood as u64,
        max_conflict_degree: spectrum.max_conflict_degree as u64,
    };
    Ok((record, sent))
}

/// Round `t >= 2`: level-`(t-1)` cells broadcast cooperatively to their
/// parent cell. Returns the slot record and the value each child cell
/// contributes to its parent (zero for empty cells).
fn cooperative_round(
    params: &ChannelParams,
    placement: &NodePlacement,
    hierarchy: &HierarchyPartition,
    t: u32,
    values: &[f64],
    send: &mut dyn FnMut(f64, u32) -> f64,
) -> Result<(SlotRecord, Vec<f64>)> {
    let n = placement.len();
    let clusters = hierarchy.cells(t - 1);
    let mut powers = PowerAssignment::silent(t as u64, TransmitterKind::Cluster, n);
    let mut active = vec![false; clusters.len()];
    for (j, cluster) in clusters.iter().enumerate() {
        let receivers = hierarchy.cell(t, hierarchy.parent(t - 1, j));
        if cluster.is_empty() || receivers.len() == cluster.len() {
            continue;
        }
        let p = min_cooperative_power_cluster(params, placement, cluster, receivers)?;
        for &m in cluster {
            powers.set(m, p);
        }
        active[j] = true;
    }

    let mut heard = vec![Vec::new(); clusters.len()];
    for m in 0..n {
        let own = hierarchy.cell_of(m, t - 1);
        let hs = cluster_neighborhood(params, placement, clusters, &powers, m);
        let parent = hierarchy.parent(t - 1, own);
        if let Some(&miss) =
            hierarchy.children(t, parent).iter().find(|&&c| c != own && active[c] && hs.binary_search(&c).is_err())
        {
            return Err(Error::Invariant(format!("node {m} does not hear sibling cell {miss} at level {t}")));
        }
        heard[own].extend(hs);
    }
    for hs in &mut heard {
        hs.sort_unstable();
        hs.dedup();
    }
    let transmitters: Vec<usize> = (0..clusters.len()).filter(|&j| active[j]).collect();
    let spectrum = slot_spectrum(&heard, &transmitters);
    let sent = (0..clusters.len())
        .map(|j| match (clusters[j].is_empty(), active[j]) {
            (true, _) => 0.0,
            (false, true) => send(values[j], t),
            (false, false) => values[j],
        })
        .collect();
    let record = SlotRecord {
        slot: t as u64,
        power: powers.total(),
        freq_slots: spectrum.freq_slots as u64,
        transmitters: transmitters.len() as u64,
        max_neighborhood: spectrum.max_neighborhood as u64,
        max_conflict_degree: spectrum.max_conflict_degree as u64,
    };
    Ok((record, sent))
}
