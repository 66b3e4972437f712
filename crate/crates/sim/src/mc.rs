//! Block-parallel Monte Carlo.
//!
//! Blocks of `BLOCK_TRIALS` draws use independent ChaCha streams keyed by
//! `(seed, block)`, and block statistics are merged in block order, so the
//! result is bit-identical to the sequential core routine for any thread count.

use cnoma_core::capacity::{block_count, simulate_block, CapacityStats, Scheme, SchemeCapacities};
use cnoma_core::{Error, OperatingPoint};
use rayon::prelude::*;

pub fn ergodic_capacities(
    scheme: Scheme,
    point: &OperatingPoint,
    trials: u64,
    seed: u64,
) -> Result<SchemeCapacities, Error> {
    if trials < 1 {
        return Err(Error::InvalidParameter(
            "Monte Carlo needs at least one trial",
        ));
    }
    let blocks: Vec<CapacityStats> = (0..block_count(trials))
        .into_par_iter()
        .map(|b| simulate_block(scheme, point, trials, seed, b))
        .collect();
    let mut total = CapacityStats::default();
    for b in &blocks {
        total.merge(b);
    }
    total.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_sequential_bit_for_bit() {
        let point = OperatingPoint::reference();
        for scheme in Scheme::ALL {
            for trials in [1, 4095, 4096, 4097, 50_000] {
                let par = ergodic_capacities(scheme, &point, trials, 3).unwrap();
                let seq =
                    cnoma_core::capacity::ergodic_capacities(scheme, &point, trials, 3).unwrap();
                assert_eq!(par, seq, "{scheme} {trials}");
            }
        }
    }

    #[test]
    fn rejects_zero_trials() {
        assert!(ergodic_capacities(Scheme::Cnoma, &OperatingPoint::reference(), 0, 1).is_err());
    }
}
