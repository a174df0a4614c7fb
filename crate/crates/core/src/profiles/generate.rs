use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{FailureProfileModel, FailureTrace, ProfileError, TargetSelector, TraceEntry};
use crate::model::FailureKind;

/// Rounds to whole microseconds so traces survive the CSV round trip bit-exactly.
fn micros(t: f64) -> f64 {
    (t * 1e6).round() / 1e6
}

/// Scales group sizes to sum to `target`, keeping every group at least 1 and
/// distributing the remainder by largest fractional part.
pub fn normalize_sizes(sizes: &[usize], target: usize) -> Result<Vec<usize>, ProfileError> {
    let n = sizes.len();
    if n == 0 || n > target {
        return Err(ProfileError::DensityTooSmall {
            density: target,
            bursts: n,
        });
    }
    let total: usize = sizes.iter().sum();
    let quota: Vec<f64> = sizes
        .iter()
        .map(|&s| s as f64 * target as f64 / total as f64)
        .collect();
    let mut out: Vec<usize> = quota.iter().map(|q| (q.floor() as usize).max(1)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let fa = quota[a] - quota[a].floor();
        let fb = quota[b] - quota[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    let mut sum: usize = out.iter().sum();
    let mut i = 0;
    while sum < target {
        out[order[i % n]] += 1;
        sum += 1;
        i += 1;
    }
    while sum > target {
        // shave the largest groups first
        let j = (0..n).max_by_key(|&j| (out[j], std::cmp::Reverse(j))).expect("non-empty");
        out[j] -= 1;
        sum -= 1;
    }
    Ok(out)
}

/// Balanced, shuffled failure kinds for `density` failures.
fn kinds(density: usize, rng: &mut ChaCha8Rng) -> Vec<FailureKind> {
    let mut k: Vec<FailureKind> = (0..density).map(|j| FailureKind::COMPONENT[j % 3]).collect();
    k.shuffle(rng);
    k
}

fn assemble(
    model: &FailureProfileModel,
    seed: u64,
    groups: Vec<(f64, usize)>,
    rng: &mut ChaCha8Rng,
) -> FailureTrace {
    let density: usize = groups.iter().map(|g| g.1).sum();
    let offsets = (model.fet_s > 0.0)
        .then(|| Normal::new(model.fet_s / 2.0, model.fet_s / 6.0).expect("positive sd"));
    let kinds = kinds(density, rng);
    let mut entries = Vec::with_capacity(density);
    for &(start, size) in &groups {
        for _ in 0..size {
            let offset = match &offsets {
                Some(normal) => loop {
                    let o = normal.sample(rng);
                    if (0.0..=model.fet_s).contains(&o) {
                        break o;
                    }
                },
                None => 0.0,
            };
            entries.push(TraceEntry {
                time_s: micros(start + offset),
                kind: kinds[entries.len()],
                target: TargetSelector::Random(rng.random()),
            });
        }
    }
    entries.sort_by(|a, b| a.time_s.total_cmp(&b.time_s));
    FailureTrace {
        model: model.name.clone(),
        fgs: model.fgs.to_string(),
        iat: model.iat.to_string(),
        fet_s: model.fet_s,
        duration_s: model.duration_s,
        seed,
        groups,
        entries,
    }
}

/// Samples a trace of `model.bursts` bursts.
///
/// Random inter-arrival samples are rescaled so the bursts span the model's
/// duration minus one exposure window; constant inter-arrival times are kept.
/// With `density` set, group sizes are normalized to that total.
pub fn generate_realistic(
    model: &FailureProfileModel,
    seed: u64,
    density: Option<usize>,
) -> Result<FailureTrace, ProfileError> {
    model.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = model.bursts;
    let mut sizes: Vec<usize> = (0..n)
        .map(|_| (model.fgs.sample(&mut rng).round().max(1.0)) as usize)
        .collect();
    if let Some(d) = density {
        sizes = normalize_sizes(&sizes, d)?;
    }
    let gaps: Vec<f64> = (1..n).map(|_| model.iat.sample_positive(&mut rng)).collect();
    let mut starts = Vec::with_capacity(n);
    let mut t = 0.0;
    starts.push(0.0);
    for g in &gaps {
        t += g;
        starts.push(t);
    }
    if !model.iat.is_constant() && t > 0.0 {
        let span = model.duration_s - model.fet_s;
        for s in &mut starts {
            *s *= span / t;
        }
    }
    let groups = starts.into_iter().map(micros).zip(sizes).collect();
    Ok(assemble(model, seed, groups, &mut rng))
}

/// `runs` groups of exactly `fgs` simultaneous failures, `iat_s` apart.
pub fn generate_synthetic(fgs: usize, runs: usize, iat_s: f64, seed: u64) -> Result<FailureTrace, ProfileError> {
    if fgs == 0 || runs == 0 || iat_s.is_nan() || iat_s <= 0.0 {
        return Err(ProfileError::InvalidParameters(format!(
            "fgs {fgs} runs {runs} iat {iat_s}"
        )));
    }
    let model = FailureProfileModel::synthetic(fgs, runs, iat_s);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups = (0..runs).map(|i| (micros(i as f64 * iat_s), fgs)).collect();
    Ok(assemble(&model, seed, groups, &mut rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{TraceLength, DAY};

    #[test]
    fn synthetic_density() {
        assert_eq!(generate_synthetic(10, 4, 1_728.0, 0).unwrap().density(), 40);
        let big = generate_synthetic(1_000, 50, 1_728.0, 0).unwrap();
        assert_eq!(big.density(), 50_000);
        assert_eq!(big.duration_s, DAY);
        let one = generate_synthetic(1, 1, 1_728.0, 0).unwrap();
        assert_eq!(one.density(), 1);
        assert_eq!(one.entries[0].time_s, 0.0);
    }

    #[test]
    fn synthetic_groups_simultaneous_and_balanced() {
        let t = generate_synthetic(30, 3, 100.0, 5).unwrap();
        for (i, chunk) in t.entries.chunks(30).enumerate() {
            assert!(chunk.iter().all(|e| e.time_s == i as f64 * 100.0));
        }
        for k in FailureKind::COMPONENT {
            assert_eq!(t.entries.iter().filter(|e| e.kind == k).count(), 30);
        }
    }

    #[test]
    fn realistic_shape() {
        let m = FailureProfileModel::grid5000(TraceLength::Short);
        let t = generate_realistic(&m, 9, None).unwrap();
        assert_eq!(t.groups.len(), 50);
        assert_eq!(t.groups[0].0, 0.0);
        assert!((t.groups[49].0 - (DAY - 250.0)).abs() < 1e-6);
        assert!(t.entries.iter().all(|e| (0.0..=DAY).contains(&e.time_s)));
        assert!(t.entries.windows(2).all(|w| w[0].time_s <= w[1].time_s));
        assert_eq!(t.density(), t.group_sizes().iter().sum::<usize>());
        // each failure lies inside its burst's exposure window
        for (start, _) in &t.groups {
            assert!(t.entries.iter().any(|e| e.time_s >= *start && e.time_s <= start + 250.0));
        }
    }

    #[test]
    fn zero_fet_puts_failures_at_burst_start() {
        let mut m = FailureProfileModel::lri(TraceLength::Short);
        m.fet_s = 0.0;
        let t = generate_realistic(&m, 2, None).unwrap();
        let starts: Vec<f64> = t.groups.iter().map(|g| g.0).collect();
        assert!(t.entries.iter().all(|e| starts.contains(&e.time_s)));
    }

    #[test]
    fn deterministic_and_byte_identical() {
        let m = FailureProfileModel::deug(TraceLength::Short);
        let a = generate_realistic(&m, 4, None).unwrap().to_csv();
        let b = generate_realistic(&m, 4, None).unwrap().to_csv();
        assert_eq!(a, b);
        assert_ne!(a, generate_realistic(&m, 5, None).unwrap().to_csv());
        assert_eq!(FailureTrace::from_csv(&a).unwrap().to_csv(), a);
    }

    #[test]
    fn normalization_exact() {
        assert_eq!(normalize_sizes(&[1, 1, 1], 10).unwrap().iter().sum::<usize>(), 10);
        assert_eq!(normalize_sizes(&[100, 1, 1], 3).unwrap(), vec![1, 1, 1]);
        assert_eq!(normalize_sizes(&[5, 5], 10).unwrap(), vec![5, 5]);
        assert!(normalize_sizes(&[1, 1, 1], 2).is_err());
        let forced = generate_realistic(&FailureProfileModel::lri(TraceLength::Short), 1, Some(1_116)).unwrap();
        assert_eq!(forced.density(), 1_116);
    }
}
