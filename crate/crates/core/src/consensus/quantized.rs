use rand::Rng;

use super::gossip::{connected_graph, random_matching};
use super::{Observer, RunConfig, SlotView};
use crate::error::{invalid, Result};
use crate::harness::{derive_stream, Purpose};
use crate::ledger::{mse, Ledger, RunResult};
use crate::quantizer::QuantizerSpec;
use crate::topology::NodePlacement;

/// Quantized consensus: matched pairs move to the two alphabet points
/// enclosing their midpoint, one rounding up and the other down. The state
/// is kept as symbol indices, so the network sum is preserved exactly.
pub fn quantized_consensus_run(cfg: &RunConfig, placement: &NodePlacement, z0: &[f64], obs: &mut dyn Observer) -> Result<RunResult> {
    let spec = cfg.quantizer()?;
    if spec.is_exact() {
        return invalid("quantized consensus needs a finite alphabet; lower K or the SNR");
    }
    let (_, graph) = connected_graph(cfg, placement)?;
    let mut dither_rng = derive_stream(cfg.seed, cfg.algorithm, cfg.n, cfg.trial, Purpose::Dither);
    let mut match_rng = derive_stream(cfg.seed, cfg.algorithm, cfg.n, cfg.trial, Purpose::Matching);
    let mut coin_rng = derive_stream(cfg.seed, cfg.algorithm, cfg.n, cfg.trial, Purpose::Coin);

    let mut q: Vec<u64> = z0
        .iter()
        .map(|&z| spec.dithered_quantize(z, &mut dither_rng).index.expect("finite alphabet"))
        .collect();
    let mut values: Vec<f64> = q.iter().map(|&i| spec.point(i)).collect();
    let mut ledger = Ledger::new(cfg.k_slots, cfg.keep_history);
    let cap = cfg.slot_cap();
    let mut t = 0;
    let mut transmitters = Vec::with_capacity(cfg.n);
    let mut counts = Vec::new();
    let mut converged = spread(&q) <= 1;
    while !converged && t < cap {
        let pairs = random_matching(&graph.links, &mut match_rng);
        t += 1;
        transmitters.clear();
        for &(a, b) in &pairs {
            let s = q[a] + q[b];
            let (up, down) = (s.div_ceil(2), s / 2);
            let (hi, lo) = if coin_rng.gen::<bool>() { (a, b) } else { (b, a) };
            q[hi] = up;
            q[lo] = down;
            values[hi] = spec.point(up);
            values[lo] = spec.point(down);
            transmitters.push(a);
            transmitters.push(b);
        }
        transmitters.sort_unstable();
        ledger.record_slot(graph.slot_record(t, &transmitters, &mut counts))?;
        obs.observe(SlotView { slot: t, estimates: &values, indices: Some(&q), level: None });
        converged = spread(&q) <= 1;
    }
    let z_ave = z0.iter().sum::<f64>() / z0.len() as f64;
    let err = mse(&values, z_ave);
    Ok(RunResult::from_ledger(cfg, ledger, values, Some(err), converged))
}

fn spread(q: &[u64]) -> u64 {
    let (lo, hi) = q.iter().fold((u64::MAX, 0), |(lo, hi), &i| (lo.min(i), hi.max(i)));
    hi - lo
}

/// `(round_up, round_down)` of the midpoint of two alphabet points, by value.
pub fn pair_update(spec: &QuantizerSpec, a: f64, b: f64) -> Result<(f64, f64)> {
    let mid = 0.5 * (a + b);
    Ok((spec.round_up_in_z(mid)?, spec.round_down_in_z(mid)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consensus::Algorithm;
    use crate::topology::place_nodes;

    #[test]
    fn two_symbol_pair() {
        let spec = QuantizerSpec::from_levels(2).unwrap();
        assert_eq!(pair_update(&spec, 0.25, 0.75).unwrap(), (0.75, 0.25));
    }

    #[test]
    fn index_update_matches_value_rounding() {
        let spec = QuantizerSpec::from_levels(16).unwrap();
        for i in 0..16u64 {
            for j in 0..16u64 {
                let s = i + j;
                let (up, down) = pair_update(&spec, spec.point(i), spec.point(j)).unwrap();
                assert_eq!(up, spec.point(s.div_ceil(2)));
                assert_eq!(down, spec.point(s / 2));
            }
        }
    }

    #[test]
    fn sum_is_constant_and_run_terminates() {
        let n = 64;
        let p = place_nodes(n, 21).unwrap();
        let z0: Vec<f64> = (0..n).map(|i| (i as f64 * 0.31).fract()).collect();
        let cfg = RunConfig { alpha: 2.0, k_slots: 2, gamma_db: 0.0, seed: 4, ..RunConfig::new(Algorithm::QConsensus, n) };
        let mut sums = Vec::new();
        let mut obs = |v: SlotView<'_>| sums.push(v.indices.unwrap().iter().sum::<u64>());
        let r = quantized_consensus_run(&cfg, &p, &z0, &mut obs).unwrap();
        assert!(r.converged);
        assert!(sums.windows(2).all(|w| w[0] == w[1]));
        let spec = cfg.quantizer().unwrap();
        let (lo, hi) = r.final_estimates.iter().fold((1.0f64, 0.0f64), |(lo, hi), &z| (lo.min(z), hi.max(z)));
        assert!(hi - lo <= spec.delta() + 1e-15);
        assert!(r.mse.is_some());
        assert!(r.final_estimates.iter().all(|&z| z >= -spec.delta() && z <= 1.0 + spec.delta()));
    }

    #[test]
    fn exact_alphabet_is_rejected() {
        let p = place_nodes(16, 1).unwrap();
        let cfg = RunConfig { alpha: 2.0, k_slots: 20, ..RunConfig::new(Algorithm::QConsensus, 16) };
        assert!(quantized_consensus_run(&cfg, &p, &[0.5; 16], &mut ()).is_err());
    }
}
