//! Tail distributions of bucket occupancies and heavy-tail model checks.
//!
//! Fits use continuous maximum-likelihood formulas even for integer data.
//! Every model is evaluated conditionally on `x ≥ x_min`; an untruncated
//! log-normal fit has `x_min = 0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Upper bound on x_min candidates scanned by [`fit_powerlaw`].
pub const MAX_XMIN_CANDIDATES: usize = 500;

/// Smallest bootstrap accepted by [`gof_bootstrap`].
pub const MIN_REPLICATES: usize = 100;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Empirical `P(X ≥ x)` at each distinct value, ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailDistribution {
    pub x: Vec<f64>,
    pub ccdf: Vec<f64>,
}

impl TailDistribution {
    /// Two-column CSV `x,ccdf`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["x", "ccdf"])?;
        for (x, p) in self.x.iter().zip(&self.ccdf) {
            w.write_record([x.to_string(), p.to_string()])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Sample(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

pub fn tail_ccdf(values: &[f64]) -> Result<TailDistribution> {
    if values.is_empty() {
        return Err(Error::Sample("empty sample".into()));
    }
    let sorted = sorted_finite(values)?;
    let total = sorted.len() as f64;
    let mut x = Vec::new();
    let mut ccdf = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        x.push(sorted[i]);
        ccdf.push((sorted.len() - i) as f64 / total);
        i += sorted[i..].iter().take_while(|&&v| v == sorted[i]).count();
    }
    Ok(TailDistribution { x, ccdf })
}

fn sorted_finite(values: &[f64]) -> Result<Vec<f64>> {
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Sample(format!("non-finite value {v}")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Lognormal,
    Powerlaw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Params {
    Lognormal { mu: f64, sigma: f64 },
    Powerlaw { alpha: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: Model,
    pub params: Params,
    pub x_min: f64,
    /// Sample points at or above `x_min`.
    pub n_tail: usize,
    pub log_likelihood: f64,
    pub ks_distance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gof_p_value: Option<f64>,
}

impl FitResult {
    fn lognormal(mu: f64, sigma: f64, x_min: f64, tail: &[f64]) -> Self {
        let mut fit = FitResult {
            model: Model::Lognormal,
            params: Params::Lognormal { mu, sigma },
            x_min,
            n_tail: tail.len(),
            log_likelihood: 0.0,
            ks_distance: 0.0,
            gof_p_value: None,
        };
        fit.log_likelihood = if sigma > 0.0 {
            tail.iter().map(|&x| fit.ln_pdf_above(x, x_min)).sum()
        } else {
            f64::INFINITY
        };
        fit.ks_distance = if sigma > 0.0 { ks_distance(tail, &fit) } else { 0.0 };
        fit
    }

    fn powerlaw(alpha: f64, x_min: f64, tail: &[f64], ks: f64) -> Self {
        let mut fit = FitResult {
            model: Model::Powerlaw,
            params: Params::Powerlaw { alpha },
            x_min,
            n_tail: tail.len(),
            log_likelihood: 0.0,
            ks_distance: ks,
            gof_p_value: None,
        };
        fit.log_likelihood = tail.iter().map(|&x| fit.ln_pdf_above(x, x_min)).sum();
        fit
    }

    /// Log-density at `x` conditional on `X ≥ threshold`
    /// (`threshold ≥ x_min`).
    pub fn ln_pdf_above(&self, x: f64, threshold: f64) -> f64 {
        match self.params {
            Params::Powerlaw { alpha } => {
                (alpha - 1.0).ln() - threshold.ln() - alpha * (x / threshold).ln()
            }
            Params::Lognormal { mu, sigma } => {
                let z = (x.ln() - mu) / sigma;
                -0.5 * z * z - LN_SQRT_2PI - sigma.ln() - x.ln() - ln_normal_sf(mu, sigma, threshold)
            }
        }
    }

    /// `P(X ≤ x | X ≥ x_min)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self.params {
            Params::Powerlaw { alpha } => 1.0 - (x / self.x_min).powf(1.0 - alpha),
            Params::Lognormal { mu, sigma } => {
                let sf_x = ln_normal_sf(mu, sigma, x);
                let sf_min = ln_normal_sf(mu, sigma, self.x_min);
                1.0 - (sf_x - sf_min).exp()
            }
        }
    }

    /// One draw from the fitted tail.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen();
        match self.params {
            Params::Powerlaw { alpha } => self.x_min * (1.0 - u).powf(-1.0 / (alpha - 1.0)),
            Params::Lognormal { mu, sigma } => {
                let std = Normal::new(0.0, 1.0).expect("standard normal");
                let sf_min = ln_normal_sf(mu, sigma, self.x_min).exp();
                // upper-tail inversion keeps precision deep in the tail
                let q = ((1.0 - u) * sf_min).max(f64::MIN_POSITIVE);
                (mu - sigma * std.inverse_cdf(q)).exp()
            }
        }
    }
}

/// `ln P(Z > (ln t - mu) / sigma)` for a standard normal `Z`; 0 for `t ≤ 0`.
fn ln_normal_sf(mu: f64, sigma: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let z = (t.ln() - mu) / sigma;
    let sf = 0.5 * erfc(z / std::f64::consts::SQRT_2);
    if sf > 0.0 {
        sf.ln()
    } else {
        // asymptotic Mills ratio
        -0.5 * z * z - z.ln() - LN_SQRT_2PI
    }
}

/// Kolmogorov-Smirnov distance between a sorted tail and a fitted model.
pub fn ks_distance(sorted_tail: &[f64], fit: &FitResult) -> f64 {
    let m = sorted_tail.len() as f64;
    sorted_tail
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = fit.cdf(x);
            (f - i as f64 / m).abs().max(((i + 1) as f64 / m - f).abs())
        })
        .fold(0.0, f64::max)
}

fn positive_sorted(sample: &[f64]) -> Result<Vec<f64>> {
    if sample.len() < 2 {
        return Err(Error::Sample(format!(
            "need at least 2 values, got {}",
            sample.len()
        )));
    }
    let sorted = sorted_finite(sample)?;
    if sorted[0] <= 0.0 {
        return Err(Error::Sample(format!("non-positive value {}", sorted[0])));
    }
    Ok(sorted)
}

fn log_moments(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let mu = values.iter().map(|x| x.ln()).sum::<f64>() / m;
    let var = values.iter().map(|x| (x.ln() - mu).powi(2)).sum::<f64>() / m;
    (mu, var.sqrt())
}

/// Maximum-likelihood log-normal over the whole sample.
pub fn fit_lognormal(sample: &[f64]) -> Result<FitResult> {
    let sorted = positive_sorted(sample)?;
    let (mu, sigma) = log_moments(&sorted);
    Ok(FitResult::lognormal(mu, sigma, 0.0, &sorted))
}

/// Maximum-likelihood log-normal truncated to `x ≥ x_min`.
pub fn fit_lognormal_tail(sample: &[f64], x_min: f64) -> Result<FitResult> {
    let sorted = positive_sorted(sample)?;
    let start = sorted.partition_point(|&x| x < x_min);
    let tail = &sorted[start..];
    if tail.len() < 2 {
        return Err(Error::Sample(format!("fewer than 2 values above {x_min}")));
    }
    let (mu0, sigma0) = log_moments(tail);
    if sigma0 == 0.0 {
        return Err(Error::Sample("tail values are all equal".into()));
    }
    let logs: Vec<f64> = tail.iter().map(|x| x.ln()).collect();
    let m = tail.len() as f64;
    let nll = |p: [f64; 2]| {
        let (mu, sigma) = (p[0], p[1].exp());
        let sq: f64 = logs.iter().map(|l| ((l - mu) / sigma).powi(2)).sum();
        0.5 * sq + m * sigma.ln() + m * ln_normal_sf(mu, sigma, x_min)
    };
    let best = nelder_mead(nll, [mu0, sigma0.ln()], [sigma0.max(0.1), 0.5]);
    Ok(FitResult::lognormal(best[0], best[1].exp(), x_min, tail))
}

/// Two-parameter Nelder-Mead minimiser.
fn nelder_mead<F: Fn([f64; 2]) -> f64>(f: F, start: [f64; 2], step: [f64; 2]) -> [f64; 2] {
    let mut simplex = [
        start,
        [start[0] + step[0], start[1]],
        [start[0], start[1] + step[1]],
    ];
    let mut values = simplex.map(&f);
    for _ in 0..2000 {
        let mut idx = [0, 1, 2];
        idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let [best, mid, worst] = idx;
        if (values[worst] - values[best]).abs() <= 1e-12 * (1.0 + values[best].abs()) {
            break;
        }
        let centroid = [
            (simplex[best][0] + simplex[mid][0]) / 2.0,
            (simplex[best][1] + simplex[mid][1]) / 2.0,
        ];
        let toward = |t: f64| {
            [
                centroid[0] + t * (simplex[worst][0] - centroid[0]),
                centroid[1] + t * (simplex[worst][1] - centroid[1]),
            ]
        };
        let reflected = toward(-1.0);
        let fr = f(reflected);
        if fr < values[best] {
            let expanded = toward(-2.0);
            let fe = f(expanded);
            (simplex[worst], values[worst]) = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < values[mid] {
            (simplex[worst], values[worst]) = (reflected, fr);
        } else {
            let contracted = if fr < values[worst] { toward(-0.5) } else { toward(0.5) };
            let fc = f(contracted);
            if fc < values[worst].min(fr) {
                (simplex[worst], values[worst]) = (contracted, fc);
            } else {
                for i in [mid, worst] {
                    simplex[i] = [
                        simplex[best][0] + 0.5 * (simplex[i][0] - simplex[best][0]),
                        simplex[best][1] + 0.5 * (simplex[i][1] - simplex[best][1]),
                    ];
                    values[i] = f(simplex[i]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    simplex[best]
}

/// Continuous power law with `x_min` chosen by minimal KS distance.
///
/// Candidates are the distinct sample values that leave at least two
/// points in the tail; above [`MAX_XMIN_CANDIDATES`] distinct values an
/// evenly spaced subset (by rank) is scanned.
pub fn fit_powerlaw(sample: &[f64]) -> Result<FitResult> {
    let sorted = positive_sorted(sample)?;
    let len = sorted.len();
    let mut suffix_ln = vec![0.0; len + 1];
    for i in (0..len).rev() {
        suffix_ln[i] = suffix_ln[i + 1] + sorted[i].ln();
    }
    let mut starts: Vec<usize> = (0..len - 1)
        .filter(|&i| i == 0 || sorted[i] != sorted[i - 1])
        .collect();
    if starts.len() > MAX_XMIN_CANDIDATES {
        let stride = starts.len() as f64 / MAX_XMIN_CANDIDATES as f64;
        starts = (0..MAX_XMIN_CANDIDATES)
            .map(|j| starts[(j as f64 * stride) as usize])
            .collect();
    }

    let mut best: Option<FitResult> = None;
    for start in starts {
        let x_min = sorted[start];
        let tail = &sorted[start..];
        let m = tail.len() as f64;
        let log_sum = suffix_ln[start] - m * x_min.ln();
        if log_sum <= 0.0 {
            continue;
        }
        let alpha = 1.0 + m / log_sum;
        let probe = FitResult {
            model: Model::Powerlaw,
            params: Params::Powerlaw { alpha },
            x_min,
            n_tail: tail.len(),
            log_likelihood: 0.0,
            ks_distance: 0.0,
            gof_p_value: None,
        };
        let ks = ks_distance(tail, &probe);
        if best.as_ref().is_none_or(|b| ks < b.ks_distance) {
            best = Some(FitResult::powerlaw(alpha, x_min, tail, ks));
        }
    }
    best.ok_or_else(|| Error::Sample("degenerate sample: no x_min leaves a varying tail".into()))
}

/// Power law with a fixed `x_min`.
pub fn fit_powerlaw_at(sample: &[f64], x_min: f64) -> Result<FitResult> {
    let sorted = positive_sorted(sample)?;
    let tail = &sorted[sorted.partition_point(|&x| x < x_min)..];
    let log_sum: f64 = tail.iter().map(|x| (x / x_min).ln()).sum();
    if tail.len() < 2 || log_sum <= 0.0 {
        return Err(Error::Sample(format!("degenerate tail above {x_min}")));
    }
    let alpha = 1.0 + tail.len() as f64 / log_sum;
    let mut fit = FitResult::powerlaw(alpha, x_min, tail, 0.0);
    fit.ks_distance = ks_distance(tail, &fit);
    Ok(fit)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonResult {
    /// Sum of pointwise log-likelihood differences, first model minus second.
    pub log_likelihood_ratio: f64,
    /// The ratio divided by its standard error.
    pub normalized_ratio: f64,
    pub p_value: f64,
    pub x_min: f64,
    pub n_tail: usize,
}

/// Likelihood-ratio test of two fitted models on their common tail
/// `x ≥ max(x_min)`. Positive ratios favour `first`.
pub fn compare_models(sample: &[f64], first: &FitResult, second: &FitResult) -> Result<ComparisonResult> {
    let sorted = positive_sorted(sample)?;
    let threshold = first.x_min.max(second.x_min);
    let tail = &sorted[sorted.partition_point(|&x| x < threshold)..];
    if tail.is_empty() {
        return Err(Error::Sample(format!("no values above {threshold}")));
    }
    let diffs: Vec<f64> = tail
        .iter()
        .map(|&x| first.ln_pdf_above(x, threshold) - second.ln_pdf_above(x, threshold))
        .collect();
    let m = diffs.len() as f64;
    let ratio: f64 = diffs.iter().sum();
    let mean = ratio / m;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / m;
    let sd = var.sqrt();
    let (normalized, p_value) = if ratio == 0.0 {
        (0.0, 1.0)
    } else if sd == 0.0 {
        (ratio.signum() * f64::INFINITY, 0.0)
    } else {
        let z = ratio / (sd * m.sqrt());
        (z, erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0))
    };
    Ok(ComparisonResult {
        log_likelihood_ratio: ratio,
        normalized_ratio: normalized,
        p_value,
        x_min: threshold,
        n_tail: tail.len(),
    })
}

/// Refits a synthetic sample the same way `fit` was obtained.
fn refit(sample: &[f64], fit: &FitResult) -> Result<FitResult> {
    match fit.model {
        Model::Powerlaw => fit_powerlaw(sample),
        Model::Lognormal if fit.x_min > 0.0 => fit_lognormal_tail(sample, fit.x_min),
        Model::Lognormal => fit_lognormal(sample),
    }
}

/// Semi-parametric bootstrap p-value of the KS distance of `fit`.
///
/// Each replicate keeps the sample size, draws values below `x_min` from
/// the empirical body and values above it from the fitted tail, refits and
/// records whether its KS distance reaches the observed one. Replicate `r`
/// uses ChaCha8 seeded with `seed` on stream `r`, so results do not depend
/// on scheduling.
pub fn gof_bootstrap(sample: &[f64], fit: &FitResult, replicates: usize, seed: u64) -> Result<f64> {
    if replicates < MIN_REPLICATES {
        return Err(Error::InvalidParameter(format!(
            "bootstrap needs at least {MIN_REPLICATES} replicates, got {replicates}"
        )));
    }
    let sorted = positive_sorted(sample)?;
    let body = &sorted[..sorted.partition_point(|&x| x < fit.x_min)];
    let p_body = body.len() as f64 / sorted.len() as f64;
    let observed = fit.ks_distance;

    let mut hits = 0usize;
    let mut synthetic = vec![0.0; sorted.len()];
    for r in 0..replicates {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        for v in synthetic.iter_mut() {
            *v = if !body.is_empty() && rng.gen::<f64>() < p_body {
                body[rng.gen_range(0..body.len())]
            } else {
                fit.sample(&mut rng)
            };
        }
        // a degenerate replicate fits nothing and counts as a miss
        if let Ok(f) = refit(&synthetic, fit) {
            if f.ks_distance >= observed {
                hits += 1;
            }
        }
    }
    Ok(hits as f64 / replicates as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, LogNormal, Pareto};

    fn pareto_sample(alpha: f64, x_min: f64, len: usize, seed: u64) -> Vec<f64> {
        let dist = Pareto::new(x_min, alpha - 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..len).map(|_| dist.sample(&mut rng)).collect()
    }

    fn lognormal_sample(mu: f64, sigma: f64, len: usize, seed: u64) -> Vec<f64> {
        let dist = LogNormal::new(mu, sigma).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..len).map(|_| dist.sample(&mut rng)).collect()
    }

    #[test]
    fn ccdf_examples() {
        let t = tail_ccdf(&[1.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(t.x, vec![1.0, 2.0, 3.0]);
        assert_eq!(t.ccdf, vec![1.0, 0.5, 0.25]);
        let flat = tail_ccdf(&[4.0; 5]).unwrap();
        assert_eq!((flat.x, flat.ccdf), (vec![4.0], vec![1.0]));
        assert!(tail_ccdf(&[]).is_err());
        assert_eq!(
            t.to_csv().unwrap(),
            "x,ccdf\n1,1\n2,0.5\n3,0.25\n"
        );
    }

    #[test]
    fn lognormal_of_constant_sample() {
        let e = std::f64::consts::E;
        let fit = fit_lognormal(&[e; 4]).unwrap();
        assert_eq!(fit.params, Params::Lognormal { mu: 1.0, sigma: 0.0 });
        assert!(fit_lognormal(&[1.0]).is_err());
        assert!(fit_lognormal(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn lognormal_recovery() {
        let fit = fit_lognormal(&lognormal_sample(0.5, 1.2, 50_000, 1)).unwrap();
        let Params::Lognormal { mu, sigma } = fit.params else { unreachable!() };
        assert!((mu - 0.5).abs() < 0.02 && (sigma - 1.2).abs() < 0.02, "{mu} {sigma}");
    }

    #[test]
    fn truncated_lognormal_recovers_parent() {
        let sample = lognormal_sample(0.0, 1.0, 40_000, 2);
        let fit = fit_lognormal_tail(&sample, 1.0).unwrap();
        let Params::Lognormal { mu, sigma } = fit.params else { unreachable!() };
        assert!(mu.abs() < 0.1 && (sigma - 1.0).abs() < 0.05, "{mu} {sigma}");
        assert_eq!(fit.n_tail, sample.iter().filter(|&&x| x >= 1.0).count());
    }

    #[test]
    fn powerlaw_recovery() {
        let fit = fit_powerlaw(&pareto_sample(2.5, 1.0, 50_000, 3)).unwrap();
        let Params::Powerlaw { alpha } = fit.params else { unreachable!() };
        assert!((alpha - 2.5).abs() < 0.05, "{alpha}");
    }

    #[test]
    fn powerlaw_finds_splice_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut sample: Vec<f64> = (0..20_000).map(|_| 1.0 + 9.0 * rng.gen::<f64>()).collect();
        sample.extend(pareto_sample(2.5, 10.0, 20_000, 5));
        let fit = fit_powerlaw(&sample).unwrap();
        // any x_min above the splice fits; KS noise moves it upwards a little
        assert!((9.5..15.0).contains(&fit.x_min), "{}", fit.x_min);
        let Params::Powerlaw { alpha } = fit.params else { unreachable!() };
        assert!((alpha - 2.5).abs() < 0.1, "{alpha}");
    }

    #[test]
    fn powerlaw_rejects_degenerate() {
        assert!(fit_powerlaw(&[3.0; 10]).is_err());
        assert!(fit_powerlaw_at(&[3.0; 10], 3.0).is_err());
    }

    #[test]
    fn comparison_signs() {
        // common tail above the median keeps the test well powered
        let ln = lognormal_sample(0.5, 1.2, 20_000, 6);
        let pl_fit = fit_powerlaw_at(&ln, 0.5f64.exp()).unwrap();
        let c = compare_models(&ln, &fit_lognormal(&ln).unwrap(), &pl_fit).unwrap();
        assert!(c.log_likelihood_ratio > 0.0 && c.p_value < 0.05, "{c:?}");
        assert_eq!(c.x_min, 0.5f64.exp());
        let pl = pareto_sample(2.5, 1.0, 20_000, 7);
        let c = compare_models(&pl, &fit_lognormal(&pl).unwrap(), &fit_powerlaw(&pl).unwrap()).unwrap();
        assert!(c.log_likelihood_ratio < 0.0 && c.p_value < 0.05, "{c:?}");
    }

    #[test]
    fn comparison_is_antisymmetric() {
        let s = lognormal_sample(0.0, 1.0, 2_000, 8);
        let a = fit_lognormal(&s).unwrap();
        let b = fit_powerlaw(&s).unwrap();
        let ab = compare_models(&s, &a, &b).unwrap();
        let ba = compare_models(&s, &b, &a).unwrap();
        assert!((ab.log_likelihood_ratio + ba.log_likelihood_ratio).abs() < 1e-9);
        assert_eq!(ab.p_value, ba.p_value);
        let same = compare_models(&s, &a, &a).unwrap();
        assert_eq!((same.log_likelihood_ratio, same.p_value), (0.0, 1.0));
    }

    #[test]
    fn truncated_sampling_stays_above_x_min() {
        let fit = fit_lognormal_tail(&lognormal_sample(0.0, 1.0, 5_000, 9), 3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!((0..1_000).all(|_| fit.sample(&mut rng) >= 3.0 * (1.0 - 1e-12)));
    }

    #[test]
    fn bootstrap_contract() {
        let s = lognormal_sample(0.0, 1.0, 500, 10);
        let fit = fit_lognormal(&s).unwrap();
        assert!(gof_bootstrap(&s, &fit, 99, 1).is_err());
        let p = gof_bootstrap(&s, &fit, 100, 1).unwrap();
        assert!((0.0..=1.0).contains(&p));
        assert_eq!(p, gof_bootstrap(&s, &fit, 100, 1).unwrap());
    }

    #[test]
    fn bootstrap_rejects_wrong_model() {
        let s = pareto_sample(2.0, 1.0, 2_000, 11);
        let fit = fit_lognormal(&s).unwrap();
        assert!(gof_bootstrap(&s, &fit, 100, 2).unwrap() < 0.05);
    }
}
