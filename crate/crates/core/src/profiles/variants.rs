//! Variants of a base trace built by statistical bootstrapping.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Dist, FailureProfileModel, FailureTrace, ProfileError};

/// Number of bootstrap resamples.
pub const BOOTSTRAP_RESAMPLES: usize = 1_000;

/// Smallest group size kept for the bigburst variant.
pub const TAIL_FGS_THRESHOLD: f64 = 100.0;

/// Smallest inter-arrival time kept for the bigburst variant.
pub const TAIL_IAT_THRESHOLD_S: f64 = 1_000.0;

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sd(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

fn resample<R: Rng>(xs: &[f64], rng: &mut R) -> Vec<f64> {
    (0..xs.len()).map(|_| xs[rng.random_range(0..xs.len())]).collect()
}

/// Means of `resamples` bootstrap resamples of `xs`.
pub fn bootstrap_means<R: Rng>(xs: &[f64], resamples: usize, rng: &mut R) -> Vec<f64> {
    (0..resamples)
        .map(|_| resample(xs, rng).iter().sum::<f64>() / xs.len() as f64)
        .collect()
}

/// Mean time between bursts of a trace, counting the wrap-around to the next window.
fn mean_iat(base: &FailureTrace) -> f64 {
    base.duration_s / base.groups.len() as f64
}

/// Normally distributed group sizes from the bootstrap means of the base
/// sizes, with twice their spread; constant inter-arrival time.
pub fn derive_uniform_variant(base: &FailureTrace, seed: u64) -> Result<FailureProfileModel, ProfileError> {
    let sizes: Vec<f64> = base.group_sizes().into_iter().map(|s| s as f64).collect();
    if sizes.is_empty() {
        return Err(ProfileError::MalformedTrace("base trace has no groups".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let means = bootstrap_means(&sizes, BOOTSTRAP_RESAMPLES, &mut rng);
    Ok(FailureProfileModel {
        name: "uniform".into(),
        fgs: Dist::Normal {
            mean: mean(&means),
            sd: 2.0 * sd(&means),
        },
        iat: Dist::Constant(mean_iat(base)),
        fet_s: base.fet_s,
        bursts: sizes.len(),
        duration_s: base.duration_s,
    })
}

/// One failure per burst, spread evenly over the base duration.
pub fn derive_single_variant(base: &FailureTrace) -> FailureProfileModel {
    let n = base.density().max(1);
    FailureProfileModel {
        name: "single".into(),
        fgs: Dist::Constant(1.0),
        iat: Dist::Constant(base.duration_s / n as f64),
        fet_s: 0.0,
        bursts: n,
        duration_s: base.duration_s,
    }
}

/// Large bursts only: group sizes bootstrapped from the base groups of at
/// least 100 failures, inter-arrival times from the base gaps of at least 1000 s.
pub fn derive_bigburst_variant(base: &FailureTrace, seed: u64) -> Result<FailureProfileModel, ProfileError> {
    let tail: Vec<f64> = base
        .group_sizes()
        .into_iter()
        .map(|s| s as f64)
        .filter(|&s| s >= TAIL_FGS_THRESHOLD)
        .collect();
    if tail.is_empty() {
        return Err(ProfileError::InsufficientTailSamples(TAIL_FGS_THRESHOLD));
    }
    let gaps: Vec<f64> = base
        .inter_arrival_times()
        .into_iter()
        .filter(|&g| g >= TAIL_IAT_THRESHOLD_S)
        .collect();
    if gaps.is_empty() {
        return Err(ProfileError::InsufficientTailSamples(TAIL_IAT_THRESHOLD_S));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let means = bootstrap_means(&tail, BOOTSTRAP_RESAMPLES, &mut rng);
    let fgs_mean = mean(&means);
    let pooled: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .flat_map(|_| resample(&gaps, &mut rng))
        .collect();
    let bursts = ((base.density() as f64 / fgs_mean).round() as usize).max(1);
    Ok(FailureProfileModel {
        name: "bigburst".into(),
        fgs: Dist::Normal {
            mean: fgs_mean,
            sd: 2.0 * sd(&means),
        },
        iat: Dist::Normal {
            mean: mean(&pooled),
            sd: sd(&pooled),
        },
        fet_s: base.fet_s,
        bursts,
        duration_s: base.duration_s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{generate_realistic, grid5000_reference_trace, REFERENCE_DENSITY};

    #[test]
    fn single_resample_of_whole_set_is_its_mean() {
        let xs = [3.0, 3.0, 3.0];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(bootstrap_means(&xs, 1, &mut rng), vec![3.0]);
    }

    #[test]
    fn uniform_variant_parameters() {
        let base = grid5000_reference_trace();
        let m = derive_uniform_variant(&base, 1).unwrap();
        let Dist::Normal { mean: mu, .. } = m.fgs else { panic!() };
        assert!((mu - REFERENCE_DENSITY as f64 / 50.0).abs() < 3.0);
        assert_eq!(m.iat, Dist::Constant(1_728.0));
        assert_eq!(m.bursts, 50);
        let t = generate_realistic(&m, 1, Some(REFERENCE_DENSITY)).unwrap();
        assert_eq!(t.density(), REFERENCE_DENSITY);
    }

    #[test]
    fn single_variant_parameters() {
        let m = derive_single_variant(&grid5000_reference_trace());
        assert_eq!(m.bursts, REFERENCE_DENSITY);
        let Dist::Constant(iat) = m.iat else { panic!() };
        assert!((iat - 77.4).abs() < 0.05);
        assert_eq!(generate_realistic(&m, 0, None).unwrap().density(), REFERENCE_DENSITY);
    }

    #[test]
    fn bigburst_needs_tail() {
        let mut base = grid5000_reference_trace();
        for g in &mut base.groups {
            g.1 = g.1.min(99);
        }
        assert_eq!(
            derive_bigburst_variant(&base, 0),
            Err(ProfileError::InsufficientTailSamples(TAIL_FGS_THRESHOLD))
        );
    }

    #[test]
    fn bigburst_variant_density() {
        let base = grid5000_reference_trace();
        let m = derive_bigburst_variant(&base, 2).unwrap();
        let Dist::Normal { mean: mu, .. } = m.fgs else { panic!() };
        assert!(mu >= TAIL_FGS_THRESHOLD);
        assert!(m.bursts <= 12);
        for seed in 0..20 {
            let t = generate_realistic(&m, seed, Some(REFERENCE_DENSITY)).unwrap();
            assert_eq!(t.density(), REFERENCE_DENSITY);
        }
    }
}
