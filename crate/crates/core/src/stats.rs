//! Compensated sums, sample statistics and log-log fits.

use crate::error::{Error, Result};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: Neumaier) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn neumaier_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = Neumaier::default();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

/// Sample mean and standard error of the mean (unbiased variance).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = neumaier_sum(xs.iter().copied()) / n as f64;
    if n < 2 {
        return (mean, f64::NAN);
    }
    (mean, (sample_variance(xs) / n as f64).sqrt())
}

/// Unbiased sample variance; zero for fewer than two samples.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let mean = neumaier_sum(xs.iter().copied()) / n as f64;
    neumaier_sum(xs.iter().map(|x| (x - mean).powi(2))) / (n - 1) as f64
}

/// Ordinary least-squares line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            found: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::InvalidArgument("a line fit needs at least two points".into()));
    }
    let n = xs.len() as f64;
    let mx = neumaier_sum(xs.iter().copied()) / n;
    let my = neumaier_sum(ys.iter().copied()) / n;
    let sxx = neumaier_sum(xs.iter().map(|x| (x - mx).powi(2)));
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("abscissae are all equal".into()));
    }
    let sxy = neumaier_sum(xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)));
    let syy = neumaier_sum(ys.iter().map(|y| (y - my).powi(2)));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LineFit { slope, intercept, r2 })
}

/// Least-squares fit of `ln y` against `ln x`; needs at least three positive points.
pub fn fit_decay_exponent(points: &[(f64, f64)]) -> Result<LineFit> {
    if points.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "decay fit needs at least three points, got {}",
            points.len()
        )));
    }
    if let Some(&(x, y)) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "decay fit needs positive values, got ({x}, {y})"
        )));
    }
    let xs: Vec<f64> = points.iter().map(|(x, _)| x.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, y)| y.ln()).collect();
    fit_line(&xs, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(neumaier_sum(xs), 2.0);
        let mut a = Neumaier::default();
        a.add(1e16);
        a.add(1.0);
        let mut b = Neumaier::default();
        b.add(-1e16);
        b.add(1.0);
        a.merge(b);
        assert_eq!(a.value(), 2.0);
    }

    #[test]
    fn mean_and_stderr() {
        let (m, s) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_stderr(&[0.0; 10]), (0.0, 0.0));
        assert!(mean_stderr(&[]).0.is_nan());
        assert_eq!(sample_variance(&[3.0]), 0.0);
    }

    #[test]
    fn decay_fits() {
        let inv: Vec<(f64, f64)> = [4.0, 8.0, 16.0, 32.0].iter().map(|&p| (p, 5.0 / p)).collect();
        let fit = fit_decay_exponent(&inv).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12);
        assert!((fit.intercept - 5f64.ln()).abs() < 1e-12);
        assert!((fit.r2 - 1.0).abs() < 1e-12);

        let flat: Vec<(f64, f64)> = [4.0, 8.0, 16.0].iter().map(|&p| (p, 0.3)).collect();
        assert!(fit_decay_exponent(&flat).unwrap().slope.abs() < 1e-12);

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let noisy: Vec<(f64, f64)> = (2..=8)
            .map(|k| {
                let p = (1u32 << k) as f64;
                (p, 3.0 / (p * p) * (1.0 + 0.01 * rng.gen_range(-1.0..1.0)))
            })
            .collect();
        let fit = fit_decay_exponent(&noisy).unwrap();
        assert!((fit.slope + 2.0).abs() <= 0.05, "{}", fit.slope);

        assert!(fit_decay_exponent(&[(1.0, 1.0), (2.0, 0.5)]).is_err());
        assert!(fit_decay_exponent(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).is_err());
        assert!(fit_decay_exponent(&[(1.0, 1.0), (2.0, -1.0), (3.0, 1.0)]).is_err());
        assert!(fit_line(&[1.0, 1.0], &[2.0, 3.0]).is_err());
    }
}
