//! Sweep drivers. Instances are seeded `base_seed + i` and shared across every cell
//! of a sweep, so comparisons across `p`, `Δ` and simulators are paired.

use rayon::prelude::*;

use super::config::SweepConfig;
use super::ExperimentRecord;
use crate::annealing::annealing_energy;
use crate::error::Result;
use crate::qgms::{
    empirical_concentration, monte_carlo_disorder_average, qgms_energy_exact, quadrature_disorder_average, Simulator,
};
use crate::schedules::DiscreteAngles;
use crate::sk::{CostVector, SkInstance};
use crate::statevector::qaoa_energy;
use crate::stats::{fit_decay_exponent, mean_stderr, LineFit};

/// Cells with `1 − AR_QA` below this are flagged instead of dividing.
pub const DEGENERACY_THRESHOLD: f64 = 1e-9;

struct RecordSink<'a> {
    experiment: &'a str,
    instances: usize,
    base_seed: u64,
    out: Vec<ExperimentRecord>,
}

impl RecordSink<'_> {
    #[allow(clippy::too_many_arguments)]
    fn push(&mut self, p: usize, n: usize, delta: f64, total_time: f64, metric: &str, value: f64, stderr: f64) {
        self.out.push(ExperimentRecord {
            experiment: self.experiment.to_string(),
            p,
            n,
            delta,
            total_time,
            metric: metric.to_string(),
            value,
            stderr,
            instances: self.instances,
            base_seed: self.base_seed,
        });
    }

    fn push_fit(&mut self, n: usize, delta: f64, total_time: f64, fit: &LineFit) {
        self.push(0, n, delta, total_time, "slope", fit.slope, f64::NAN);
        self.push(0, n, delta, total_time, "intercept", fit.intercept, f64::NAN);
        self.push(0, n, delta, total_time, "r2", fit.r2, f64::NAN);
    }
}

fn instance_costs(n: usize, cfg: &SweepConfig) -> Result<Vec<CostVector>> {
    (0..cfg.instances)
        .into_par_iter()
        .map(|i| SkInstance::sample(n, cfg.base_seed.wrapping_add(i as u64))?.cost_values())
        .collect()
}

/// `|ν_{p,n} − ν_{∞,n}|` at fixed total time `T`, with `Δ = T/p`.
///
/// Rows per `(p, n)`: `qaoa_energy`, `anneal_energy`, `abs_error` (modulus of the mean
/// paired difference) and `mean_abs_error`. Per `n`, a log-log fit of `abs_error`
/// against `p` is written under `constant_time_fit` with `p = 0`.
pub fn run_constant_time_sweep(cfg: &SweepConfig) -> Result<Vec<ExperimentRecord>> {
    cfg.validate()?;
    let t = cfg.total_time;
    let schedule = cfg.schedule.with_scale(t);
    let angles: Vec<DiscreteAngles> = cfg
        .ps
        .iter()
        .map(|&p| schedule.discretize(cfg.rule, p))
        .collect::<Result<_>>()?;
    let mut sink = RecordSink {
        experiment: "constant_time",
        instances: cfg.instances,
        base_seed: cfg.base_seed,
        out: Vec::new(),
    };
    let mut fits = Vec::new();
    for &n in &cfg.ns {
        let costs = instance_costs(n, cfg)?;
        // the annealing energy does not depend on p when T is fixed
        let per_instance: Vec<(f64, Vec<f64>)> = costs
            .par_iter()
            .map(|c| {
                let anneal = annealing_energy(c, &schedule, cfg.tol)?;
                let qaoa = angles.iter().map(|a| qaoa_energy(c, a)).collect::<Result<Vec<_>>>()?;
                Ok((anneal, qaoa))
            })
            .collect::<Result<_>>()?;
        let anneal: Vec<f64> = per_instance.iter().map(|(a, _)| *a).collect();
        let (anneal_mean, anneal_se) = mean_stderr(&anneal);
        let mut points = Vec::new();
        for (k, &p) in cfg.ps.iter().enumerate() {
            let delta = t / p as f64;
            let qaoa: Vec<f64> = per_instance.iter().map(|(_, q)| q[k]).collect();
            let diffs: Vec<f64> = qaoa.iter().zip(&anneal).map(|(q, a)| q - a).collect();
            let abs_diffs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
            let (q_mean, q_se) = mean_stderr(&qaoa);
            let (d_mean, d_se) = mean_stderr(&diffs);
            let (ad_mean, ad_se) = mean_stderr(&abs_diffs);
            sink.push(p, n, delta, t, "qaoa_energy", q_mean, q_se);
            sink.push(p, n, delta, t, "anneal_energy", anneal_mean, anneal_se);
            sink.push(p, n, delta, t, "abs_error", d_mean.abs(), d_se);
            sink.push(p, n, delta, t, "mean_abs_error", ad_mean, ad_se);
            points.push((p as f64, d_mean.abs()));
        }
        if let Ok(fit) = fit_decay_exponent(&points) {
            fits.push((n, fit));
        }
    }
    let mut out = sink.out;
    let mut fit_sink = RecordSink {
        experiment: "constant_time_fit",
        instances: cfg.instances,
        base_seed: cfg.base_seed,
        out: Vec::new(),
    };
    for (n, fit) in fits {
        fit_sink.push_fit(n, 0.0, t, &fit);
    }
    out.extend(fit_sink.out);
    Ok(out)
}

/// `(value, stderr, degenerate)` of `(AR_A − AR_B)/(1 − AR_B)` from per-instance ratios.
///
/// The stderr treats the denominator as exact.
pub fn residual_ar(ar_a: &[f64], ar_b: &[f64]) -> (f64, f64, bool) {
    let (mean_a, _) = mean_stderr(ar_a);
    let (mean_b, _) = mean_stderr(ar_b);
    let denom = 1.0 - mean_b;
    if denom.abs() < DEGENERACY_THRESHOLD {
        return (f64::NAN, f64::NAN, true);
    }
    let diffs: Vec<f64> = ar_a.iter().zip(ar_b).map(|(a, b)| a - b).collect();
    let (_, d_se) = mean_stderr(&diffs);
    ((mean_a - mean_b) / denom, d_se / denom.abs(), false)
}

/// Approximation ratios against the extreme the schedule drives toward.
///
/// Positive angles raise `⟨C⟩`, so the reference optimum is `max_σ C(σ)/n`.
fn approximation_ratio(energy: f64, costs: &CostVector) -> f64 {
    energy / (costs.max_energy() / costs.n() as f64)
}

/// QAOA vs annealing approximation ratios at `Δ·p` total time.
///
/// Rows per `(Δ, p, n)`: `ar_qaoa`, `ar_qa`, `residual_ar` and `degenerate` (1 when
/// the residual is undefined).
pub fn run_delta_sweep(cfg: &SweepConfig) -> Result<Vec<ExperimentRecord>> {
    cfg.validate()?;
    let mut sink = RecordSink {
        experiment: "delta",
        instances: cfg.instances,
        base_seed: cfg.base_seed,
        out: Vec::new(),
    };
    for &n in &cfg.ns {
        let costs = instance_costs(n, cfg)?;
        for &delta in &cfg.deltas {
            for &p in &cfg.ps {
                let t = delta * p as f64;
                let schedule = cfg.schedule.with_scale(t);
                let angles = schedule.discretize(cfg.rule, p)?;
                let ars: Vec<(f64, f64)> = costs
                    .par_iter()
                    .map(|c| {
                        let q = qaoa_energy(c, &angles)?;
                        let a = annealing_energy(c, &schedule, cfg.tol)?;
                        Ok((approximation_ratio(q, c), approximation_ratio(a, c)))
                    })
                    .collect::<Result<_>>()?;
                let (ar_q, ar_a): (Vec<f64>, Vec<f64>) = ars.into_iter().unzip();
                let (mq, sq) = mean_stderr(&ar_q);
                let (ma, sa) = mean_stderr(&ar_a);
                let (res, res_se, degenerate) = residual_ar(&ar_q, &ar_a);
                sink.push(p, n, delta, t, "ar_qaoa", mq, sq);
                sink.push(p, n, delta, t, "ar_qa", ma, sa);
                sink.push(p, n, delta, t, "residual_ar", res, res_se);
                sink.push(p, n, delta, t, "degenerate", if degenerate { 1.0 } else { 0.0 }, 0.0);
            }
        }
    }
    Ok(sink.out)
}

/// Energy variance across instances at each `n` for one discretized schedule.
///
/// Rows per `n`: `mean` and `variance`; with three or more positive variances a
/// `concentration_fit` of variance against `n` follows.
pub fn run_concentration(
    ns: &[usize],
    angles: &DiscreteAngles,
    delta: f64,
    instances: usize,
    base_seed: u64,
) -> Result<Vec<ExperimentRecord>> {
    let report = empirical_concentration(ns, angles, instances, base_seed)?;
    let p = angles.p();
    let t = delta * p as f64;
    let mut sink = RecordSink {
        experiment: "concentration",
        instances,
        base_seed,
        out: Vec::new(),
    };
    for row in &report.rows {
        sink.push(p, row.n, delta, t, "mean", row.mean, f64::NAN);
        sink.push(p, row.n, delta, t, "variance", row.variance, f64::NAN);
    }
    let mut out = sink.out;
    if let Some(fit) = report.fit {
        let mut fit_sink = RecordSink {
            experiment: "concentration_fit",
            instances,
            base_seed,
            out: Vec::new(),
        };
        fit_sink.push_fit(0, delta, t, &fit);
        out.extend(fit_sink.out);
    }
    Ok(out)
}

/// Exact, quadrature and Monte-Carlo disorder averages at `n = 3`, one layer.
///
/// Each angle point `k` is written under experiment `oracle_check_k`, with rows
/// `gamma`, `beta`, `qgms_exact`, `quadrature` and `monte_carlo`.
pub fn run_oracle_check(
    points: &[(f64, f64)],
    nodes: usize,
    mc_instances: usize,
    base_seed: u64,
) -> Result<Vec<ExperimentRecord>> {
    let n = 3;
    let mut out = Vec::new();
    for (k, &(gamma, beta)) in points.iter().enumerate() {
        let angles = DiscreteAngles::from_layers(&[gamma], &[beta])?;
        let name = format!("oracle_check_{k}");
        let mut sink = RecordSink {
            experiment: &name,
            instances: mc_instances,
            base_seed,
            out: Vec::new(),
        };
        let exact = qgms_energy_exact(n, &angles)?;
        let quad = quadrature_disorder_average(n, &angles, nodes)?;
        let (mc, mc_se) = monte_carlo_disorder_average(n, Simulator::Qaoa(&angles), mc_instances, base_seed)?;
        sink.push(1, n, 0.0, 0.0, "gamma", gamma, 0.0);
        sink.push(1, n, 0.0, 0.0, "beta", beta, 0.0);
        sink.push(1, n, 0.0, 0.0, "qgms_exact", exact, 0.0);
        sink.push(1, n, 0.0, 0.0, "quadrature", quad, 0.0);
        sink.push(1, n, 0.0, 0.0, "monte_carlo", mc, mc_se);
        out.extend(sink.out);
    }
    Ok(out)
}
