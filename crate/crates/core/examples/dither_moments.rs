//! Subtractive dither makes the quantization error uniform on a bin.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wcsim::quantizer::{DitherMode, QuantizerSpec};

fn main() -> wcsim::Result<()> {
    let spec = QuantizerSpec::new(4, 1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let z = 0.3;
    for mode in [DitherMode::Subtractive, DitherMode::NonSubtractive] {
        let draws = 100_000;
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..draws {
            let v = spec.dithered_quantize(z, &mut rng).reconstruct(mode) - z;
            s1 += v;
            s2 += v * v;
        }
        let d = spec.delta();
        println!("{mode:?}: mean {:.3e}, E[v^2] = {:.4} * delta^2/12", s1 / draws as f64, s2 / draws as f64 / (d * d / 12.0));
    }
    Ok(())
}
