//! Classical post-processing: confusion-matrix readout mitigation,
//! exponential relaxation fitting and bootstrap uncertainty quantification.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::noise::ConfusionMatrix;
use crate::rng::ShotSeeder;

/// Probabilities over a set of measurement outcomes, with the sample count
/// they were estimated from. Mitigated vectors keep their pre-clip values
/// for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationVector {
    probs: Vec<f64>,
    samples: u64,
    preclip: Option<Vec<f64>>,
}

impl PopulationVector {
    pub fn new(probs: Vec<f64>, samples: u64) -> Result<Self> {
        Self::build(probs, samples, None)
    }

    pub fn with_preclip(probs: Vec<f64>, samples: u64, preclip: Vec<f64>) -> Result<Self> {
        Self::build(probs, samples, Some(preclip))
    }

    fn build(probs: Vec<f64>, samples: u64, preclip: Option<Vec<f64>>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidParameter("empty population vector".into()));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < -1e-12) {
            return Err(Error::InvalidParameter("population entries must be non-negative".into()));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "populations sum to {sum}, expected 1 within 1e-9"
            )));
        }
        // Exact renormalization absorbs accumulated rounding.
        let probs = probs.iter().map(|p| p.max(0.0) / sum).collect();
        Ok(PopulationVector { probs, samples, preclip })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn preclip(&self) -> Option<&[f64]> {
        self.preclip.as_deref()
    }

    /// Total probability clipped away during mitigation.
    pub fn clipped_mass(&self) -> f64 {
        self.preclip
            .as_ref()
            .map(|pre| pre.iter().filter(|&&p| p < 0.0).map(|p| -p).sum())
            .unwrap_or(0.0)
    }
}

/// Linear readout mitigation.
///
/// The outcome index is interpreted bitwise: bit `k` was produced by the
/// readout whose confusion matrix sits at `confusions[k]` (`None` for an
/// ideal readout). The joint confusion is the tensor product of the per-bit
/// matrices; its inverse is applied axis by axis, negative entries are
/// clipped to zero and the vector renormalized, keeping the pre-clip values.
pub fn mitigate_readout(
    raw: &PopulationVector,
    confusions: &[Option<ConfusionMatrix>],
) -> Result<PopulationVector> {
    let n_bits = confusions.len();
    if raw.len() != 1usize << n_bits {
        return Err(Error::DimensionMismatch(format!(
            "{} populations vs {} readout bits",
            raw.len(),
            n_bits
        )));
    }
    let mut values = raw.probs().to_vec();
    for (bit, confusion) in confusions.iter().enumerate() {
        let Some(c) = confusion else { continue };
        if c.is_identity() {
            continue;
        }
        let inv = c.inverse()?;
        let mask = 1usize << bit;
        for base in 0..values.len() {
            if base & mask != 0 {
                continue;
            }
            let (v0, v1) = (values[base], values[base | mask]);
            values[base] = inv[0][0] * v0 + inv[0][1] * v1;
            values[base | mask] = inv[1][0] * v0 + inv[1][1] * v1;
        }
    }
    let preclip = values.clone();
    let clipped: Vec<f64> = values.iter().map(|v| v.max(0.0)).collect();
    let sum: f64 = clipped.iter().sum();
    if sum <= 0.0 {
        return Err(Error::InvalidParameter("mitigation clipped all probability away".into()));
    }
    let renormalized: Vec<f64> = clipped.iter().map(|v| v / sum).collect();
    PopulationVector::with_preclip(renormalized, raw.samples(), preclip)
}

/// Binomial standard deviation of a frequency estimate from `hits` of `n`,
/// with a (k+1)/(n+2) floor so endpoint frequencies keep a finite weight.
pub fn binomial_sigma(hits: u64, n: u64) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    let p = (hits as f64 + 1.0) / (n as f64 + 2.0);
    (p * (1.0 - p) / n as f64).sqrt()
}

/// One observation of the relaxation curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitPoint {
    pub t_ms: f64,
    pub p: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone)]
pub struct FitOptions {
    /// Multi-start grid for the relaxation time: (lo, hi, count), log-spaced.
    pub t1l_grid: (f64, f64, usize),
    /// Weight points by 1/sigma^2; otherwise all weights are one.
    pub weighted: bool,
    /// Parametric bootstrap resamples for the confidence intervals.
    pub bootstrap_resamples: usize,
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { t1l_grid: (1.0, 1000.0, 25), weighted: true, bootstrap_resamples: 1000, seed: 0 }
    }
}

/// Result of fitting p = p_i exp(-t / T1L) + p_f.
#[derive(Debug, Clone, Copy)]
pub struct FitResult {
    pub p_i: f64,
    pub t1l_ms: f64,
    pub p_f: f64,
    /// 68% confidence intervals (parametric bootstrap percentiles, widened
    /// to contain the point estimate).
    pub ci_p_i: (f64, f64),
    pub ci_t1l: (f64, f64),
    pub ci_p_f: (f64, f64),
    /// Weighted residual sum of squares at the optimum.
    pub rss: f64,
    /// Set when the data cannot bound the relaxation time (flat data);
    /// `t1l_ms` is meaningless (infinity) in that case.
    pub t1l_unbounded: bool,
}

struct Design {
    t: Vec<f64>,
    p: Vec<f64>,
    w: Vec<f64>,
}

impl Design {
    /// Profiled weighted least squares: for fixed T the model is linear in
    /// (p_i, p_f). Returns (p_i, p_f, rss); None when the basis degenerates.
    fn solve_at(&self, t1l: f64) -> Option<(f64, f64, f64)> {
        let mut s11 = 0.0;
        let mut s12 = 0.0;
        let mut s22 = 0.0;
        let mut y1 = 0.0;
        let mut y2 = 0.0;
        for i in 0..self.t.len() {
            let f = (-self.t[i] / t1l).exp();
            let w = self.w[i];
            s11 += w * f * f;
            s12 += w * f;
            s22 += w;
            y1 += w * f * self.p[i];
            y2 += w * self.p[i];
        }
        let det = s11 * s22 - s12 * s12;
        if det.abs() < 1e-14 * s22 * s22 {
            return None;
        }
        let a = (y1 * s22 - y2 * s12) / det;
        let c = (s11 * y2 - s12 * y1) / det;
        let mut rss = 0.0;
        for i in 0..self.t.len() {
            let f = (-self.t[i] / t1l).exp();
            let r = self.p[i] - a * f - c;
            rss += self.w[i] * r * r;
        }
        Some((a, c, rss))
    }

    fn constant_rss(&self) -> f64 {
        let sw: f64 = self.w.iter().sum();
        let mean: f64 = self.w.iter().zip(&self.p).map(|(w, p)| w * p).sum::<f64>() / sw;
        self.w.iter().zip(&self.p).map(|(w, p)| w * (p - mean) * (p - mean)).sum()
    }
}

fn best_t1l(design: &Design, grid: (f64, f64, usize)) -> Option<(f64, f64, f64, f64)> {
    let (lo, hi, count) = grid;
    let ratio = (hi / lo).powf(1.0 / (count.max(2) - 1) as f64);
    let mut best: Option<(f64, f64, f64, f64)> = None; // (t1l, p_i, p_f, rss)
    let mut t = lo;
    for _ in 0..count {
        if let Some((a, c, rss)) = design.solve_at(t) {
            let better = match &best {
                None => true,
                // Ties (within fp wobble) break toward the smaller T1L.
                Some((bt, _, _, brss)) => rss < brss - 1e-15 || (rss <= brss + 1e-15 && t < *bt),
            };
            if better {
                best = Some((t, a, c, rss));
            }
        }
        t *= ratio;
    }
    let (t_best, _, _, _) = best?;
    // Golden-section refinement within one grid cell on either side.
    let mut a_br = t_best / ratio;
    let mut b_br = t_best * ratio;
    let inv_phi = 0.618_033_988_749_894_9_f64;
    let rss_of = |t: f64| design.solve_at(t).map(|(_, _, r)| r).unwrap_or(f64::INFINITY);
    let mut x1 = b_br - inv_phi * (b_br - a_br);
    let mut x2 = a_br + inv_phi * (b_br - a_br);
    let mut f1 = rss_of(x1);
    let mut f2 = rss_of(x2);
    for _ in 0..200 {
        if (b_br - a_br) <= 1e-13 * b_br {
            break;
        }
        if f1 <= f2 {
            b_br = x2;
            x2 = x1;
            f2 = f1;
            x1 = b_br - inv_phi * (b_br - a_br);
            f1 = rss_of(x1);
        } else {
            a_br = x1;
            x1 = x2;
            f1 = f2;
            x2 = a_br + inv_phi * (b_br - a_br);
            f2 = rss_of(x2);
        }
    }
    let t_final = if f1 <= f2 { x1 } else { x2 };
    let candidates = [t_final, t_best];
    let mut result: Option<(f64, f64, f64, f64)> = None;
    for t in candidates {
        if let Some((a, c, rss)) = design.solve_at(t) {
            let better = match &result {
                None => true,
                Some((bt, _, _, brss)) => rss < brss - 1e-15 || (rss <= brss + 1e-15 && t < *bt),
            };
            if better {
                result = Some((t, a, c, rss));
            }
        }
    }
    result
}

/// Weighted least-squares fit of p = p_i exp(-t/T1L) + p_f with a log-spaced
/// multi-start over T1L and local golden-section refinement. Confidence
/// intervals come from a parametric bootstrap (resampling the fitted model
/// with the per-point sigmas).
pub fn fit_exponential(points: &[FitPoint], options: &FitOptions) -> Result<FitResult> {
    if points.len() < 4 {
        return Err(Error::FitFailed(format!("need at least 4 points, got {}", points.len())));
    }
    for (i, a) in points.iter().enumerate() {
        if !a.t_ms.is_finite() || !a.p.is_finite() {
            return Err(Error::FitFailed("non-finite data point".into()));
        }
        if options.weighted && (!a.sigma.is_finite() || a.sigma <= 0.0) {
            return Err(Error::FitFailed(format!(
                "weighted fit requires positive sigma (point {i})"
            )));
        }
        for b in &points[i + 1..] {
            if a.t_ms == b.t_ms {
                return Err(Error::FitFailed(format!("duplicate time value {}", a.t_ms)));
            }
        }
    }
    let (lo, hi, count) = options.t1l_grid;
    if !(lo > 0.0 && hi > lo && count >= 2) {
        return Err(Error::FitFailed("invalid T1L grid".into()));
    }
    let design = Design {
        t: points.iter().map(|p| p.t_ms).collect(),
        p: points.iter().map(|p| p.p).collect(),
        w: points
            .iter()
            .map(|p| if options.weighted { 1.0 / (p.sigma * p.sigma) } else { 1.0 })
            .collect(),
    };
    let rss_const = design.constant_rss();
    let best = best_t1l(&design, options.t1l_grid);
    let Some((t1l, p_i, p_f, rss)) = best else {
        return Err(Error::FitFailed("no T1L start converged".into()));
    };
    // Flat data: the exponential term buys nothing over a constant.
    if rss_const - rss <= 1e-12 * rss_const.max(1e-12) {
        let sw: f64 = design.w.iter().sum();
        let mean = design.w.iter().zip(&design.p).map(|(w, p)| w * p).sum::<f64>() / sw;
        return Ok(FitResult {
            p_i: 0.0,
            t1l_ms: f64::INFINITY,
            p_f: mean,
            ci_p_i: (0.0, 0.0),
            ci_t1l: (f64::INFINITY, f64::INFINITY),
            ci_p_f: (mean, mean),
            rss: rss_const,
            t1l_unbounded: true,
        });
    }

    // Parametric bootstrap around the fitted curve.
    let noise_scale: Vec<f64> = if options.weighted {
        points.iter().map(|p| p.sigma).collect()
    } else {
        let dof = (points.len() as f64 - 3.0).max(1.0);
        let s = (rss / dof).sqrt();
        vec![s; points.len()]
    };
    let seeder = ShotSeeder::new(options.seed);
    let resamples: Vec<(f64, f64, f64)> = (0..options.bootstrap_resamples as u64)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = seeder.shot_rng(i);
            let resampled: Vec<FitPoint> = points
                .iter()
                .zip(&noise_scale)
                .map(|(pt, &s)| {
                    let model = p_i * (-pt.t_ms / t1l).exp() + p_f;
                    FitPoint { t_ms: pt.t_ms, p: model + s * standard_normal(&mut rng), sigma: pt.sigma }
                })
                .collect();
            let d = Design {
                t: resampled.iter().map(|p| p.t_ms).collect(),
                p: resampled.iter().map(|p| p.p).collect(),
                w: design.w.clone(),
            };
            best_t1l(&d, options.t1l_grid).map(|(t, a, c, _)| (a, t, c))
        })
        .collect();
    let ci = |extract: fn(&(f64, f64, f64)) -> f64, center: f64| -> (f64, f64) {
        if resamples.is_empty() {
            return (center, center);
        }
        let mut values: Vec<f64> = resamples.iter().map(extract).collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let (lo, hi) = (percentile(&values, 0.16), percentile(&values, 0.84));
        (lo.min(center), hi.max(center))
    };
    Ok(FitResult {
        p_i,
        t1l_ms: t1l,
        p_f,
        ci_p_i: ci(|r| r.0, p_i),
        ci_t1l: ci(|r| r.1, t1l),
        ci_p_f: ci(|r| r.2, p_f),
        rss,
        t1l_unbounded: false,
    })
}

fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; u1 floored away from zero.
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = pos - lo as f64;
        sorted[lo] * (1.0 - frac) + sorted[hi] * frac
    }
}

/// Percentile 68% bootstrap interval of `statistic` under shot-level
/// resampling with replacement. Deterministic for a fixed seed regardless of
/// thread count.
pub fn bootstrap_ci<F>(data: &[f64], statistic: F, resamples: usize, seed: u64) -> Result<(f64, f64)>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if data.is_empty() {
        return Err(Error::EmptyRecords);
    }
    if resamples < 100 {
        return Err(Error::InvalidParameter(format!(
            "bootstrap needs at least 100 resamples, got {resamples}"
        )));
    }
    let seeder = ShotSeeder::new(seed);
    let mut values: Vec<f64> = (0..resamples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeder.shot_rng(i);
            let resample: Vec<f64> =
                (0..data.len()).map(|_| data[rng.gen_range(0..data.len())]).collect();
            statistic(&resample)
        })
        .collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok((percentile(&values, 0.16), percentile(&values, 0.84)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_confusion_is_identity_mitigation() {
        let raw = PopulationVector::new(vec![0.5, 0.25, 0.125, 0.125], 1000).unwrap();
        let out = mitigate_readout(&raw, &[None, Some(ConfusionMatrix::identity())]).unwrap();
        for (a, b) in raw.probs().iter().zip(out.probs()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn forward_corrupt_then_mitigate_recovers_truth() {
        // Exact linear algebra on an infinite-sample vector.
        let c = ConfusionMatrix::from_fidelities(0.809, 0.988);
        let truth = vec![0.4, 0.1, 0.3, 0.05, 0.05, 0.02, 0.03, 0.05];
        let mut corrupted = vec![0.0; 8];
        for (idx, &p) in truth.iter().enumerate() {
            for obs in 0..8usize {
                let mut weight = 1.0;
                for bit in 0..3 {
                    weight *= c.prob(((obs >> bit) & 1) as u8, ((idx >> bit) & 1) as u8);
                }
                corrupted[obs] += weight * p;
            }
        }
        let raw = PopulationVector::new(corrupted, 0).unwrap();
        let mitigated =
            mitigate_readout(&raw, &[Some(c), Some(c), Some(c)]).unwrap();
        for (a, b) in truth.iter().zip(mitigated.probs()) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
        assert!(mitigated.clipped_mass() < 1e-12);
    }

    #[test]
    fn mitigation_clips_and_reports() {
        let c = ConfusionMatrix::from_fidelities(0.8, 0.8);
        // A vector that inverts to something slightly negative.
        let raw = PopulationVector::new(vec![0.95, 0.05], 100).unwrap();
        let out = mitigate_readout(&raw, &[Some(c)]).unwrap();
        assert!(out.preclip().is_some());
        assert!(out.probs().iter().all(|&p| p >= 0.0));
        let sum: f64 = out.probs().iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert!(out.clipped_mass() > 0.0);
    }

    #[test]
    fn population_vector_validation() {
        assert!(PopulationVector::new(vec![], 0).is_err());
        assert!(PopulationVector::new(vec![0.5, 0.6], 0).is_err());
        assert!(PopulationVector::new(vec![-0.1, 1.1], 0).is_err());
    }

    fn synthetic(p_i: f64, t1l: f64, p_f: f64, sigma: f64) -> Vec<FitPoint> {
        (0..13)
            .map(|k| {
                let t = 5.0 * k as f64;
                FitPoint { t_ms: t, p: p_i * (-t / t1l).exp() + p_f, sigma }
            })
            .collect()
    }

    #[test]
    fn noiseless_exponential_recovered_exactly() {
        let points = synthetic(0.8, 31.0, 0.23, 0.01);
        let fit = fit_exponential(&points, &FitOptions { bootstrap_resamples: 0, ..Default::default() })
            .unwrap();
        assert!(fit.rss < 1e-12, "rss {}", fit.rss);
        assert!((fit.p_i - 0.8).abs() < 1e-6);
        assert!((fit.t1l_ms - 31.0).abs() / 31.0 < 1e-6);
        assert!((fit.p_f - 0.23).abs() < 1e-6);
        assert!(!fit.t1l_unbounded);
    }

    #[test]
    fn noisy_synthetic_recovery() {
        // A single noise draw: the Fisher floor here is sigma_T/T ~ 5%, so
        // this smoke test only checks the ~3 sigma ballpark; the recovery
        // statistics over many draws live in the acceptance suite.
        let seeder = ShotSeeder::new(77);
        let mut rng = seeder.shot_rng(0);
        let points: Vec<FitPoint> = synthetic(0.8, 31.0, 0.23, 0.01)
            .into_iter()
            .map(|pt| FitPoint { p: pt.p + 0.01 * standard_normal(&mut rng), ..pt })
            .collect();
        let fit = fit_exponential(
            &points,
            &FitOptions { bootstrap_resamples: 200, seed: 1, ..Default::default() },
        )
        .unwrap();
        assert!((fit.t1l_ms - 31.0).abs() / 31.0 < 0.16, "T1L {}", fit.t1l_ms);
        assert!(fit.ci_t1l.0 <= fit.t1l_ms && fit.t1l_ms <= fit.ci_t1l.1);
        assert!(fit.ci_t1l.1 - fit.ci_t1l.0 > 0.5, "CI should have finite width");
    }

    #[test]
    fn flat_data_reports_unbounded() {
        let points: Vec<FitPoint> =
            (0..8).map(|k| FitPoint { t_ms: k as f64, p: 0.5, sigma: 0.01 }).collect();
        let fit = fit_exponential(&points, &FitOptions::default()).unwrap();
        assert!(fit.t1l_unbounded);
        assert!((fit.p_f - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fit_input_validation() {
        let few = synthetic(0.8, 31.0, 0.23, 0.01).into_iter().take(3).collect::<Vec<_>>();
        assert!(fit_exponential(&few, &FitOptions::default()).is_err());
        let mut dup = synthetic(0.8, 31.0, 0.23, 0.01);
        dup[1].t_ms = dup[0].t_ms;
        assert!(fit_exponential(&dup, &FitOptions::default()).is_err());
        let mut bad_sigma = synthetic(0.8, 31.0, 0.23, 0.01);
        bad_sigma[0].sigma = 0.0;
        assert!(fit_exponential(&bad_sigma, &FitOptions::default()).is_err());
    }

    #[test]
    fn fit_is_scale_consistent() {
        // Doubling every time value (and the grid) exactly doubles T1L.
        let seeder = ShotSeeder::new(3);
        let mut rng = seeder.shot_rng(9);
        let base: Vec<FitPoint> = synthetic(0.8, 31.0, 0.23, 0.01)
            .into_iter()
            .map(|pt| FitPoint { p: pt.p + 0.01 * standard_normal(&mut rng), ..pt })
            .collect();
        let doubled: Vec<FitPoint> =
            base.iter().map(|pt| FitPoint { t_ms: 2.0 * pt.t_ms, ..*pt }).collect();
        let opt1 = FitOptions { bootstrap_resamples: 50, seed: 5, ..Default::default() };
        let opt2 = FitOptions { t1l_grid: (2.0, 2000.0, 25), ..opt1.clone() };
        let fit1 = fit_exponential(&base, &opt1).unwrap();
        let fit2 = fit_exponential(&doubled, &opt2).unwrap();
        assert_eq!(fit2.t1l_ms, 2.0 * fit1.t1l_ms);
        assert_eq!(fit2.ci_t1l.0, 2.0 * fit1.ci_t1l.0);
        assert_eq!(fit2.ci_t1l.1, 2.0 * fit1.ci_t1l.1);
        assert_eq!(fit2.p_i, fit1.p_i);
        assert_eq!(fit2.p_f, fit1.p_f);
    }

    #[test]
    fn bootstrap_constant_data_zero_width() {
        let data = vec![0.7; 50];
        let (lo, hi) = bootstrap_ci(&data, |d| d.iter().sum::<f64>() / d.len() as f64, 200, 1)
            .unwrap();
        assert_eq!(lo, hi);
        assert!((lo - 0.7).abs() < 1e-12);
    }

    #[test]
    fn bootstrap_is_deterministic() {
        let data: Vec<f64> = (0..100).map(|i| (i % 7) as f64).collect();
        let stat = |d: &[f64]| d.iter().sum::<f64>() / d.len() as f64;
        let a = bootstrap_ci(&data, stat, 300, 9).unwrap();
        let b = bootstrap_ci(&data, stat, 300, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bootstrap_width_matches_binomial() {
        // Binomial p = 0.5, n = 10^4: interval width about 2 * 0.005.
        let seeder = ShotSeeder::new(4);
        let mut rng = seeder.shot_rng(0);
        let data: Vec<f64> = (0..10_000).map(|_| f64::from(rng.gen::<bool>())).collect();
        let stat = |d: &[f64]| d.iter().sum::<f64>() / d.len() as f64;
        let (lo, hi) = bootstrap_ci(&data, stat, 500, 2).unwrap();
        let width = hi - lo;
        assert!((width - 0.01).abs() < 0.004, "width {width}");
    }

    #[test]
    fn bootstrap_input_validation() {
        let stat = |d: &[f64]| d.len() as f64;
        assert!(bootstrap_ci(&[], stat, 200, 0).is_err());
        assert!(bootstrap_ci(&[1.0], stat, 50, 0).is_err());
    }

    #[test]
    fn binomial_sigma_behaviour() {
        assert!(binomial_sigma(0, 0).is_infinite());
        assert!(binomial_sigma(0, 1000) > 0.0);
        let s = binomial_sigma(500, 1000);
        assert!((s - 0.0158).abs() < 0.001);
    }
}
