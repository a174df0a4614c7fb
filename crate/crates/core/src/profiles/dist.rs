use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, LogNormal, Normal};

use super::ProfileError;

/// Distribution of failure-group sizes or inter-arrival times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dist {
    /// Parameters of the underlying normal distribution.
    LogNormal { mu: f64, sigma: f64 },
    Normal { mean: f64, sd: f64 },
    Constant(f64),
}

impl Dist {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Dist::LogNormal { mu, sigma } => LogNormal::new(mu, sigma).expect("valid sigma").sample(rng),
            Dist::Normal { mean, sd } => Normal::new(mean, sd).expect("valid sd").sample(rng),
            Dist::Constant(v) => v,
        }
    }

    /// Samples until the value is strictly positive.
    pub fn sample_positive<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let v = self.sample(rng);
            if v > 0.0 {
                return v;
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Dist::Constant(_))
    }

    pub fn validate(&self) -> Result<(), ProfileError> {
        let ok = match *self {
            Dist::LogNormal { mu, sigma } => mu.is_finite() && sigma.is_finite() && sigma >= 0.0,
            Dist::Normal { mean, sd } => mean.is_finite() && sd.is_finite() && sd >= 0.0,
            Dist::Constant(v) => v.is_finite() && v > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(ProfileError::InvalidParameters(self.to_string()))
        }
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dist::LogNormal { mu, sigma } => write!(f, "LOGN({mu},{sigma})"),
            Dist::Normal { mean, sd } => write!(f, "N({mean},{sd})"),
            Dist::Constant(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for Dist {
    type Err = ProfileError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ProfileError::InvalidParameters(s.to_string());
        let s = s.trim();
        let args = |inner: &str| -> Result<(f64, f64), ProfileError> {
            let (a, b) = inner.split_once(',').ok_or_else(bad)?;
            Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
        };
        let upper = s.to_ascii_uppercase();
        let d = if let Some(inner) = upper.strip_prefix("LOGN(").and_then(|r| r.strip_suffix(')')) {
            let (mu, sigma) = args(inner)?;
            Dist::LogNormal { mu, sigma }
        } else if let Some(inner) = upper.strip_prefix("N(").and_then(|r| r.strip_suffix(')')) {
            let (mean, sd) = args(inner)?;
            Dist::Normal { mean, sd }
        } else {
            Dist::Constant(s.parse().map_err(|_| bad())?)
        };
        d.validate()?;
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["LOGN(1.88,1.25)", "LOGN(-1.39,1.03)", "N(22.85,20.68)", "1728", "77.4"] {
            let d: Dist = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
        assert!("N(1)".parse::<Dist>().is_err());
        assert!("LOGN(1,-2)".parse::<Dist>().is_err());
        assert!("zero".parse::<Dist>().is_err());
    }

    #[test]
    fn positive_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let d = Dist::Normal { mean: 1.0, sd: 10.0 };
        assert!((0..1000).all(|_| d.sample_positive(&mut rng) > 0.0));
    }
}
