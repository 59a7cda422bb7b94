//! Randomized gossip averaging time against N.
//!
//! cargo run --example gossip_scaling -- 64,128,256 5

use wcsim::{run_trial, Algorithm, RunConfig};

fn main() -> wcsim::Result<()> {
    let mut args = std::env::args().skip(1);
    let ns: Vec<usize> = args
        .next()
        .map(|s| s.split(',').map(|x| x.parse().expect("N list")).collect())
        .unwrap_or_else(|| vec![64, 128, 256]);
    let trials: u32 = args.next().map(|s| s.parse().expect("trial count")).unwrap_or(5);

    println!("{:>6} {:>10} {:>12} {:>14}", "N", "median T", "median B", "median E");
    for n in ns {
        let mut rows = Vec::new();
        for trial in 0..trials {
            let cfg = RunConfig { alpha: 2.0, trial, keep_history: false, ..RunConfig::new(Algorithm::Randomized, n) };
            let r = run_trial(&cfg)?;
            rows.push((r.t_slots, r.b_tbp, r.e_energy));
        }
        rows.sort_by_key(|r| r.0);
        let mid = rows[rows.len() / 2];
        println!("{n:>6} {:>10} {:>12} {:>14.4e}", mid.0, mid.1, mid.2);
    }
    Ok(())
}
