//! Independent Z flips on measured vertices and seed derivation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::atg::{AtgGraph, MeasurementPattern};
use crate::error::{AtgError, Result};
use crate::gf2::BitVector;

/// SplitMix64 finaliser.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `index` in stream `stream` of a run with seed `master`.
pub fn trial_seed(master: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master).wrapping_add(stream)).wrapping_add(index))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseConfig {
    pub p: f64,
    pub seed: u64,
}

impl NoiseConfig {
    pub fn new(p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(AtgError::InvalidConfig(format!("p = {p} is outside [0, 1]")));
        }
        Ok(Self { p, seed })
    }
}

/// Z-error support over all ATG vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErrorPattern {
    pub bits: BitVector,
}

impl ErrorPattern {
    pub fn zeros(g: &AtgGraph) -> Self {
        Self {
            bits: BitVector::zeros(g.num_vertices()),
        }
    }

    pub fn weight(&self) -> usize {
        self.bits.weight()
    }

    /// Code-qubit errors on layer `t`.
    pub fn code_layer(&self, g: &AtgGraph, t: usize) -> BitVector {
        g.code_slice(&self.bits, t)
    }

    /// Check-qubit errors on layer `t`.
    pub fn check_layer(&self, g: &AtgGraph, t: usize) -> BitVector {
        g.check_slice(&self.bits, t)
    }
}

/// Draws one flip decision per measured vertex, in vertex order.
pub fn sample_with<R: Rng>(g: &AtgGraph, pattern: &MeasurementPattern, p: f64, rng: &mut R) -> ErrorPattern {
    let mut bits = BitVector::zeros(g.num_vertices());
    for v in pattern.measured.iter_ones() {
        if rng.gen::<f64>() < p {
            bits.set(v, true);
        }
    }
    ErrorPattern { bits }
}

pub fn sample_error(g: &AtgGraph, pattern: &MeasurementPattern, cfg: &NoiseConfig) -> ErrorPattern {
    sample_with(g, pattern, cfg.p, &mut rng_from_seed(cfg.seed))
}

#[derive(Clone, Debug, Serialize)]
pub struct SubsetFrequency {
    pub size: usize,
    pub hits: u64,
    pub frequency: f64,
    pub bound: f64,
    pub band: f64,
    pub flagged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LsReport {
    pub samples: u64,
    pub subsets: Vec<SubsetFrequency>,
}

impl LsReport {
    pub fn any_flagged(&self) -> bool {
        self.subsets.iter().any(|s| s.flagged)
    }
}

/// Empirical `P[S ⊆ supp(E)]` for each subset against `p^|S|`, flagged when
/// the frequency exceeds the bound by more than four binomial standard deviations.
pub fn verify_ls_bound(
    g: &AtgGraph,
    pattern: &MeasurementPattern,
    cfg: &NoiseConfig,
    subsets: &[Vec<usize>],
    samples: u64,
) -> Result<LsReport> {
    if subsets.is_empty() || subsets.iter().any(Vec::is_empty) {
        return Err(AtgError::InvalidConfig("subsets must be nonempty".into()));
    }
    if samples == 0 {
        return Err(AtgError::InvalidConfig("need at least one sample".into()));
    }
    let masks: Vec<BitVector> = subsets
        .iter()
        .map(|s| BitVector::from_support(g.num_vertices(), s))
        .collect();
    let mut hits = vec![0u64; subsets.len()];
    for s in 0..samples {
        let e = sample_with(g, pattern, cfg.p, &mut rng_from_seed(trial_seed(cfg.seed, 0, s)));
        for (h, m) in hits.iter_mut().zip(&masks) {
            if m.and(&e.bits) == *m {
                *h += 1;
            }
        }
    }
    let n = samples as f64;
    let subsets = subsets
        .iter()
        .zip(hits)
        .map(|(s, h)| {
            let bound = cfg.p.powi(s.len() as i32);
            let band = 4.0 * (bound * (1.0 - bound) / n).sqrt();
            let frequency = h as f64 / n;
            SubsetFrequency {
                size: s.len(),
                hits: h,
                frequency,
                bound,
                band,
                flagged: frequency > bound + band,
            }
        })
        .collect();
    Ok(LsReport { samples, subsets })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atg::{bell_pattern, build_atg};
    use crate::code::fixtures;

    #[test]
    fn extremes() {
        let g = build_atg(&fixtures::steane(), 2).unwrap();
        let pat = bell_pattern(&g);
        let zero = sample_error(&g, &pat, &NoiseConfig::new(0.0, 1).unwrap());
        assert_eq!(zero.weight(), 0);
        let all = sample_error(&g, &pat, &NoiseConfig::new(1.0, 1).unwrap());
        assert_eq!(all.bits, pat.measured);
    }

    #[test]
    fn rejects_bad_p() {
        assert!(NoiseConfig::new(1.5, 0).is_err());
        assert!(NoiseConfig::new(-0.1, 0).is_err());
    }

    #[test]
    fn reproducible() {
        let g = build_atg(&fixtures::c422(), 2).unwrap();
        let pat = bell_pattern(&g);
        let cfg = NoiseConfig::new(0.3, 99).unwrap();
        assert_eq!(sample_error(&g, &pat, &cfg), sample_error(&g, &pat, &cfg));
    }

    #[test]
    fn mean_weight_within_three_sigma() {
        let g = build_atg(&fixtures::steane(), 2).unwrap();
        let pat = bell_pattern(&g);
        let trials = 10_000u64;
        let total: usize = (0..trials)
            .map(|i| {
                let cfg = NoiseConfig::new(0.1, trial_seed(5, 0, i)).unwrap();
                sample_error(&g, &pat, &cfg).weight()
            })
            .sum();
        let mean = total as f64 / trials as f64;
        let sigma = (36.0 * 0.1 * 0.9 / trials as f64).sqrt();
        assert!((mean - 3.6).abs() < 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn ls_bound_singletons_and_pairs() {
        let g = build_atg(&fixtures::c422(), 2).unwrap();
        let pat = bell_pattern(&g);
        let bulk: Vec<usize> = pat.measured.support();
        let subsets = vec![
            vec![bulk[0]],
            vec![bulk[3]],
            vec![bulk[1], bulk[2]],
            vec![bulk[0], bulk[5]],
        ];
        let cfg = NoiseConfig::new(0.2, 17).unwrap();
        let r = verify_ls_bound(&g, &pat, &cfg, &subsets, 20_000).unwrap();
        assert!(!r.any_flagged());
        assert!((r.subsets[0].frequency - 0.2).abs() < 0.02);
        assert!((r.subsets[2].frequency - 0.04).abs() < 0.01);

        let cfg = NoiseConfig::new(0.0, 17).unwrap();
        let r = verify_ls_bound(&g, &pat, &cfg, &subsets, 100).unwrap();
        assert!(r.subsets.iter().all(|s| s.hits == 0));
    }
}
