//! Correlation, resampling and rank-test primitives.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

pub const DEFAULT_SEED: u64 = 20250101;

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(Error::TooFewObservations(format!("{} < 3 pairs", x.len())));
    }
    Ok(())
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample standard deviation (n − 1 denominator).
pub fn sd(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() as f64 - 1.0)).sqrt()
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if !(sxx > 0.0 && syy > 0.0) {
        return Err(Error::DegenerateVariance);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// 1-based ranks; tied values share the average of their positions.
pub fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && v[order[j + 1]] == v[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    pearson(&average_ranks(x), &average_ranks(y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationMethod {
    Pearson,
    Spearman,
}

impl CorrelationMethod {
    pub fn apply(self, x: &[f64], y: &[f64]) -> Result<f64> {
        match self {
            CorrelationMethod::Pearson => pearson(x, y),
            CorrelationMethod::Spearman => spearman(x, y),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CorrelationMethod::Pearson => "pearson",
            CorrelationMethod::Spearman => "spearman",
        }
    }
}

impl std::str::FromStr for CorrelationMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pearson" => Ok(CorrelationMethod::Pearson),
            "spearman" => Ok(CorrelationMethod::Spearman),
            _ => Err(Error::InvalidArgument(format!("unknown correlation method {s}"))),
        }
    }
}

/// Linear-interpolation quantile of sorted data (Hyndman–Fan type 7).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// `(q1, median, q3)` with type-7 interpolation.
pub fn quartiles(v: &[f64]) -> Result<(f64, f64, f64)> {
    if v.is_empty() {
        return Err(Error::TooFewObservations("empty vector".into()));
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    Ok((quantile_sorted(&s, 0.25), quantile_sorted(&s, 0.5), quantile_sorted(&s, 0.75)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapConfig {
    pub reps: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            reps: 10_000,
            alpha: 0.05,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapOutcome {
    pub estimate: f64,
    pub low: f64,
    pub high: f64,
    /// Resampled statistics, in resample order.
    pub replicates: Vec<f64>,
}

/// Basic (reverse-percentile) bootstrap. Resample `i` draws from its own
/// ChaCha stream `i` of the master seed, so results do not depend on evaluation
/// order. Resamples on which `statistic` is undefined are redrawn from the same
/// stream; more than `10 × reps` redraws in total is an error.
pub fn bootstrap<T, F>(data: &[T], statistic: F, cfg: &BootstrapConfig) -> Result<BootstrapOutcome>
where
    T: Clone,
    F: Fn(&[T]) -> Option<f64>,
{
    if cfg.reps == 0 {
        return Err(Error::InvalidArgument("bootstrap reps must be positive".into()));
    }
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha {} outside (0,1)", cfg.alpha)));
    }
    if data.is_empty() {
        return Err(Error::TooFewObservations("empty bootstrap sample".into()));
    }
    let estimate = statistic(data).ok_or(Error::DegenerateVariance)?;
    let n = data.len();
    let budget = 10 * cfg.reps;
    let mut redraws = 0usize;
    let mut replicates = Vec::with_capacity(cfg.reps);
    let mut buf: Vec<T> = Vec::with_capacity(n);
    for i in 0..cfg.reps {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(i as u64);
        loop {
            buf.clear();
            buf.extend((0..n).map(|_| data[rng.random_range(0..n)].clone()));
            match statistic(&buf) {
                Some(v) if v.is_finite() => {
                    replicates.push(v);
                    break;
                }
                _ => {
                    redraws += 1;
                    if redraws > budget {
                        return Err(Error::BootstrapNoConvergence(redraws));
                    }
                }
            }
        }
    }
    let mut sorted = replicates.clone();
    sorted.sort_by(f64::total_cmp);
    let q_lo = quantile_sorted(&sorted, cfg.alpha / 2.0);
    let q_hi = quantile_sorted(&sorted, 1.0 - cfg.alpha / 2.0);
    Ok(BootstrapOutcome {
        estimate,
        low: 2.0 * estimate - q_hi,
        high: 2.0 * estimate - q_lo,
        replicates,
    })
}

pub fn bootstrap_ci<T, F>(data: &[T], statistic: F, cfg: &BootstrapConfig) -> Result<(f64, f64)>
where
    T: Clone,
    F: Fn(&[T]) -> Option<f64>,
{
    bootstrap(data, statistic, cfg).map(|o| (o.low, o.high))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationResult {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub method: CorrelationMethod,
    pub n: usize,
    pub bootstrap_reps: usize,
    pub seed: u64,
}

/// Correlation with a paired basic-bootstrap interval.
pub fn correlate(x: &[f64], y: &[f64], method: CorrelationMethod, cfg: &BootstrapConfig) -> Result<CorrelationResult> {
    let estimate = method.apply(x, y)?;
    let pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    let (ci_low, ci_high) = bootstrap_ci(
        &pairs,
        |s| {
            let (a, b): (Vec<f64>, Vec<f64>) = s.iter().copied().unzip();
            method.apply(&a, &b).ok()
        },
        cfg,
    )?;
    Ok(CorrelationResult {
        estimate,
        ci_low,
        ci_high,
        method,
        n: x.len(),
        bootstrap_reps: cfg.reps,
        seed: cfg.seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alternative {
    /// `x` tends to exceed `y`.
    Greater,
    Less,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WilcoxonResult {
    /// Sum of ranks of positive differences `x − y`.
    pub statistic: f64,
    pub p_value: f64,
    pub n_effective: usize,
    pub alternative: Alternative,
    pub exact: bool,
}

/// Largest effective sample size for which the exact null distribution is used.
pub const WILCOXON_EXACT_MAX: usize = 25;

/// Number of subsets of `{1..n}` with each possible rank sum.
fn signed_rank_counts(n: usize) -> Vec<u64> {
    let max = n * (n + 1) / 2;
    let mut c = vec![0u64; max + 1];
    c[0] = 1;
    for k in 1..=n {
        for s in (k..=max).rev() {
            c[s] += c[s - k];
        }
    }
    c
}

/// One-sided paired signed-rank test. Zero differences are dropped; tied
/// magnitudes get average ranks. Without ties and with at most
/// [`WILCOXON_EXACT_MAX`] nonzero differences the exact null distribution is
/// used, otherwise the normal approximation with tie and continuity corrections.
pub fn wilcoxon_one_sided(x: &[f64], y: &[f64], alternative: Alternative) -> Result<WilcoxonResult> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).filter(|d| *d != 0.0).collect();
    let n = d.len();
    if n == 0 {
        return Err(Error::NoNonzeroDifferences);
    }
    let mags: Vec<f64> = d.iter().map(|v| v.abs()).collect();
    let ranks = average_ranks(&mags);
    let w_plus: f64 = d.iter().zip(&ranks).filter(|(v, _)| **v > 0.0).map(|(_, r)| r).sum();

    let mut sorted = mags.clone();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let has_ties = tie_term > 0.0;

    let (p, exact) = if !has_ties && n <= WILCOXON_EXACT_MAX {
        let counts = signed_rank_counts(n);
        let w = w_plus.round() as usize;
        let total = (1u64 << n) as f64;
        let tail: u64 = match alternative {
            Alternative::Greater => counts[w..].iter().sum(),
            Alternative::Less => counts[..=w].iter().sum(),
        };
        (tail as f64 / total, true)
    } else {
        let nf = n as f64;
        let mu = nf * (nf + 1.0) / 4.0;
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
        let normal = Normal::standard();
        let p = match alternative {
            Alternative::Greater => normal.cdf(-((w_plus - mu - 0.5) / var.sqrt())),
            Alternative::Less => normal.cdf((w_plus - mu + 0.5) / var.sqrt()),
        };
        (p, false)
    };
    Ok(WilcoxonResult {
        statistic: w_plus,
        p_value: p.clamp(f64::MIN_POSITIVE, 1.0),
        n_effective: n,
        alternative,
        exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    /// Exact one-sided p-value by enumerating every sign assignment.
    fn enumerate_p(d: &[f64], alt: Alternative) -> f64 {
        let mags: Vec<f64> = d.iter().map(|v| v.abs()).collect();
        let ranks = average_ranks(&mags);
        let obs: f64 = d.iter().zip(&ranks).filter(|(v, _)| **v > 0.0).map(|(_, r)| r).sum();
        let n = d.len();
        let mut hits = 0u64;
        for mask in 0u64..(1 << n) {
            let w: f64 = (0..n).filter(|k| mask >> k & 1 == 1).map(|k| ranks[k]).sum();
            let hit = match alt {
                Alternative::Greater => w >= obs - 1e-9,
                Alternative::Less => w <= obs + 1e-9,
            };
            hits += hit as u64;
        }
        hits as f64 / (1u64 << n) as f64
    }

    #[test]
    fn affine_correlations() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
        let x = [0.5, 1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| v.ln() * 3.0 + v.powi(3)).collect();
        assert!((spearman(&x, &y).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn correlation_errors() {
        assert!(matches!(pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(Error::DegenerateVariance)));
        assert!(matches!(pearson(&[1.0, 2.0], &[1.0, 2.0, 3.0]), Err(Error::LengthMismatch(2, 3))));
    }

    #[test]
    fn ties_get_average_ranks() {
        assert_eq!(average_ranks(&[10.0, 20.0, 10.0, 30.0]), vec![1.5, 3.0, 1.5, 4.0]);
    }

    #[test]
    fn quartiles_type7() {
        assert_eq!(quartiles(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap(), (2.0, 3.0, 4.0));
        assert_eq!(quartiles(&[4.0, 1.0, 3.0, 2.0]).unwrap(), (1.75, 2.5, 3.25));
        assert_eq!(quartiles(&[7.0]).unwrap(), (7.0, 7.0, 7.0));
        assert!(quartiles(&[]).is_err());
    }

    #[test]
    fn constant_statistic_gives_point_interval() {
        let cfg = BootstrapConfig { reps: 1000, ..Default::default() };
        let (lo, hi) = bootstrap_ci(&[1.0, 2.0, 3.0], |_| Some(0.7), &cfg).unwrap();
        assert!((lo - 0.7).abs() < 1e-15 && (hi - 0.7).abs() < 1e-15);
    }

    #[test]
    fn bootstrap_redraws_then_gives_up() {
        let cfg = BootstrapConfig { reps: 1000, ..Default::default() };
        let err = bootstrap_ci(&[1.0, 2.0, 3.0], |s: &[f64]| (s.len() > 5).then_some(1.0), &cfg);
        assert!(matches!(err, Err(Error::DegenerateVariance)));
        let err = bootstrap_ci(
            &[1.0, 2.0, 3.0],
            |s: &[f64]| if s == [1.0, 2.0, 3.0] { Some(1.0) } else { None },
            &cfg,
        );
        assert!(matches!(err, Err(Error::BootstrapNoConvergence(_))));
    }

    #[test]
    fn bootstrap_deterministic() {
        let x: Vec<f64> = (0..24).map(|i| (i as f64 * 1.3).sin() * 10.0 + i as f64).collect();
        let y: Vec<f64> = (0..24).map(|i| (i as f64 * 0.7).cos() * 5.0 + i as f64).collect();
        let cfg = BootstrapConfig { reps: 2000, ..Default::default() };
        let a = correlate(&x, &y, CorrelationMethod::Pearson, &cfg).unwrap();
        let b = correlate(&x, &y, CorrelationMethod::Pearson, &cfg).unwrap();
        assert_eq!(a.ci_low.to_bits(), b.ci_low.to_bits());
        assert_eq!(a.ci_high.to_bits(), b.ci_high.to_bits());
        assert!(a.ci_low <= a.ci_high);
        let c = correlate(&x, &y, CorrelationMethod::Pearson, &BootstrapConfig { seed: 7, ..cfg }).unwrap();
        assert_ne!(a.ci_low.to_bits(), c.ci_low.to_bits());
    }

    #[test]
    fn wilcoxon_three_positive() {
        let r = wilcoxon_one_sided(&[2.0, 3.0, 5.0], &[1.0, 1.0, 1.0], Alternative::Greater).unwrap();
        assert!(r.exact);
        assert_eq!(r.statistic, 6.0);
        assert_eq!(r.p_value, enumerate_p(&[1.0, 2.0, 4.0], Alternative::Greater));
        assert_eq!(r.p_value, 0.125);
        let r = wilcoxon_one_sided(&[2.0, 3.0, 5.0], &[1.0, 1.0, 1.0], Alternative::Less).unwrap();
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn wilcoxon_zero_handling() {
        assert!(matches!(
            wilcoxon_one_sided(&[1.0, 2.0], &[1.0, 2.0], Alternative::Greater),
            Err(Error::NoNonzeroDifferences)
        ));
        let r = wilcoxon_one_sided(&[1.0, 2.0, 4.0], &[1.0, 1.0, 1.0], Alternative::Greater).unwrap();
        assert_eq!(r.n_effective, 2);
    }

    #[test]
    fn wilcoxon_ties_use_normal_approximation() {
        let x = [3.0, 3.0, 5.0, 1.0, 4.0, 6.0];
        let y = [1.0, 1.0, 2.0, 2.0, 1.0, 1.0];
        let r = wilcoxon_one_sided(&x, &y, Alternative::Greater).unwrap();
        assert!(!r.exact);
        // d = 2,2,3,-1,3,5 -> ranks 2.5,2.5,4.5,1,4.5,6 ; W+ = 20
        assert_eq!(r.statistic, 20.0);
        let var = 6.0 * 7.0 * 13.0 / 24.0 - (6.0 + 6.0) / 48.0;
        let z = (20.0 - 10.5 - 0.5) / f64::sqrt(var);
        let expect = Normal::standard().cdf(-z);
        assert!((r.p_value - expect).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn wilcoxon_matches_enumeration(
            d in prop::collection::vec(prop_oneof![-50.0f64..-0.01, 0.01f64..50.0], 1..=10),
            greater in any::<bool>(),
        ) {
            let alt = if greater { Alternative::Greater } else { Alternative::Less };
            let zeros = vec![0.0; d.len()];
            let r = wilcoxon_one_sided(&d, &zeros, alt).unwrap();
            prop_assert!(r.exact);
            prop_assert!((r.p_value - enumerate_p(&d, alt)).abs() < 1e-15);
        }

        #[test]
        fn pearson_affine_invariant(
            xy in prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 3..40),
            a in 0.01f64..50.0, b in -100.0f64..100.0,
        ) {
            let (x, y): (Vec<f64>, Vec<f64>) = xy.into_iter().unzip();
            if let Ok(r) = pearson(&x, &y) {
                let x2: Vec<f64> = x.iter().map(|v| a * v + b).collect();
                let r2 = pearson(&x2, &y).unwrap();
                prop_assert!(r.abs() <= 1.0);
                prop_assert!((r - r2).abs() < 1e-12);
                prop_assert!((pearson(&x, &x).unwrap() - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn spearman_monotone_invariant(
            xy in prop::collection::vec((-10.0f64..10.0, -100.0f64..100.0), 3..40),
        ) {
            let (x, y): (Vec<f64>, Vec<f64>) = xy.into_iter().unzip();
            if let Ok(r) = spearman(&x, &y) {
                let x2: Vec<f64> = x.iter().map(|v| v.powi(3) + v.exp()).collect();
                prop_assert!((r - spearman(&x2, &y).unwrap()).abs() < 1e-12);
            }
        }

        #[test]
        fn quartiles_permutation_invariant(mut v in prop::collection::vec(-1e3f64..1e3, 1..50), seed in any::<u64>()) {
            let q = quartiles(&v).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in (1..v.len()).rev() {
                v.swap(i, rng.random_range(0..=i));
            }
            prop_assert_eq!(q, quartiles(&v).unwrap());
        }
    }
}
