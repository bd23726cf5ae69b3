//! Disorder-averaged finite-n QAOA energy: exact multinomial sum, tensor Gauss–Hermite
//! quadrature over couplings, and Monte-Carlo sampling.

use std::num::NonZeroUsize;

use gauss_quad::hermite::GaussHermite;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::annealing::annealing_energy;
use crate::error::{Error, Result};
use crate::gmatrix::{expand_config, QVector};
use crate::schedules::{ContinuousSchedule, DiscreteAngles};
use crate::sk::SkInstance;
use crate::statevector::qaoa_energy;
use crate::stats::{fit_decay_exponent, mean_stderr, sample_variance, LineFit, Neumaier};

/// Largest composition count [`qgms_energy_exact`] will enumerate.
pub const MAX_COMPOSITIONS: f64 = 1e7;

/// Imaginary-part threshold for [`qgms_energy_exact`].
pub const QGMS_IMAG_THRESHOLD: f64 = 1e-9;

/// Largest coupling count for the tensor quadrature.
pub const MAX_QUADRATURE_COUPLINGS: usize = 3;

/// `C(n + s − 1, s − 1)`, the number of ways to write `n` as an ordered sum of `s` parts.
pub fn composition_count(n: usize, s: usize) -> f64 {
    if s == 0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let k = (s - 1).min(n);
    (0..k)
        .fold(1.0, |acc, i| acc * (n + s - 1 - i) as f64 / (i + 1) as f64)
        .round()
}

/// Calls `visit` with the nonzero `(part, count)` entries of every composition of `n`
/// into `s` parts, parts in increasing order.
pub fn for_each_composition(n: usize, s: usize, mut visit: impl FnMut(&[(usize, u32)])) {
    if s == 0 {
        if n == 0 {
            visit(&[]);
        }
        return;
    }
    let mut stack = Vec::with_capacity(n);
    compositions_from(0, n, s, &mut stack, &mut visit);
}

fn compositions_from(
    first: usize,
    remaining: usize,
    s: usize,
    stack: &mut Vec<(usize, u32)>,
    visit: &mut impl FnMut(&[(usize, u32)]),
) {
    if remaining == 0 {
        visit(stack);
        return;
    }
    if first == s - 1 {
        stack.push((first, remaining as u32));
        visit(stack);
        stack.pop();
        return;
    }
    // part `first` takes c units; the rest go to later parts
    for c in (0..=remaining).rev() {
        if c > 0 {
            stack.push((first, c as u32));
        }
        compositions_from(first + 1, remaining - c, s, stack, visit);
        if c > 0 {
            stack.pop();
        }
    }
}

struct QgmsTables {
    n: usize,
    dim: usize,
    q: Vec<Complex64>,
    /// `Φ_c²` by reduced configuration.
    phi2: Vec<f64>,
    /// `a_p·a_l` by reduced configuration, row-major in `l`.
    corr: Vec<f64>,
    big_gamma: Vec<f64>,
    log_factorials: Vec<f64>,
}

impl QgmsTables {
    fn new(n: usize, angles: &DiscreteAngles) -> Result<Self> {
        let p = angles.p();
        let q = QVector::new(angles.betas())?;
        let dim = 2 * p + 2;
        let big_gamma = angles.big_gamma().to_vec();
        let mut phi2 = Vec::with_capacity(q.len());
        let mut corr = Vec::with_capacity(q.len() * dim);
        for r in 0..q.len() {
            let config = expand_config(p, r);
            let a = |j: usize| if (config >> j) & 1 == 0 { 1.0 } else { -1.0 };
            let phi: f64 = (0..dim).map(|l| big_gamma[l] * a(l)).sum();
            phi2.push(phi * phi);
            corr.extend((0..dim).map(|l| a(p) * a(l)));
        }
        let mut log_factorials = vec![0.0; n + 1];
        for k in 1..=n {
            log_factorials[k] = log_factorials[k - 1] + (k as f64).ln();
        }
        Ok(Self {
            n,
            dim,
            q: q.entries().to_vec(),
            phi2,
            corr,
            big_gamma,
            log_factorials,
        })
    }

    /// Summand of one composition, given by its nonzero entries.
    fn term(&self, parts: &[(usize, u32)]) -> Complex64 {
        let nf = self.n as f64;
        let mut log_mag = self.log_factorials[self.n];
        let mut phase = Complex64::new(1.0, 0.0);
        for &(a, c) in parts {
            let qa = self.q[a];
            if qa == Complex64::new(0.0, 0.0) {
                return Complex64::new(0.0, 0.0);
            }
            log_mag += c as f64 * qa.norm().ln() - self.log_factorials[c as usize];
            phase *= Complex64::from_polar(1.0, qa.arg() * c as f64);
        }
        let mut quad = 0.0;
        for (i, &(a, ca)) in parts.iter().enumerate() {
            quad += self.phi2[0] * (ca as f64).powi(2);
            for &(b, cb) in &parts[..i] {
                quad += 2.0 * self.phi2[a ^ b] * ca as f64 * cb as f64;
            }
        }
        let mut energy = 0.0;
        for l in 0..self.dim {
            let m: f64 = parts
                .iter()
                .map(|&(a, c)| self.corr[a * self.dim + l] * c as f64)
                .sum::<f64>()
                / nf;
            energy += self.big_gamma[l] * m * m;
        }
        phase * (log_mag - quad / (4.0 * nf)).exp() * energy
    }
}

fn check_composition_cap(n: usize, p: usize) -> Result<()> {
    let count = composition_count(n, 1 << (2 * p + 1));
    if count > MAX_COMPOSITIONS {
        Err(Error::TooManyCompositions {
            count,
            cap: MAX_COMPOSITIONS,
        })
    } else {
        Ok(())
    }
}

fn finish(sum_re: f64, sum_im: f64) -> Result<f64> {
    // (i/2)·(x + iy) = −y/2 + i·x/2
    let imag = 0.5 * sum_re;
    if imag.abs() > QGMS_IMAG_THRESHOLD {
        return Err(Error::ImaginaryResidue {
            imag,
            threshold: QGMS_IMAG_THRESHOLD,
        });
    }
    Ok(-0.5 * sum_im)
}

fn validate_exact(n: usize, angles: &DiscreteAngles) -> Result<bool> {
    if n == 0 {
        return Err(Error::EmptyInstance);
    }
    if angles.p() == 0 {
        return Ok(false);
    }
    check_composition_cap(n, angles.p())?;
    Ok(true)
}

/// `E_J⟨C⟩/n` from the exact sum over compositions of `n` into bitstring types.
pub fn qgms_energy_exact(n: usize, angles: &DiscreteAngles) -> Result<f64> {
    if !validate_exact(n, angles)? {
        return Ok(0.0);
    }
    let tables = QgmsTables::new(n, angles)?;
    let s = tables.q.len();
    // partition by the count assigned to the first configuration
    let partials: Vec<(Neumaier, Neumaier)> = (0..=n)
        .into_par_iter()
        .map(|c0| {
            let (mut re, mut im) = (Neumaier::default(), Neumaier::default());
            let mut stack = Vec::with_capacity(n);
            if c0 > 0 {
                stack.push((0usize, c0 as u32));
            }
            let mut visit = |parts: &[(usize, u32)]| {
                let t = tables.term(parts);
                re.add(t.re);
                im.add(t.im);
            };
            if s == 1 {
                if c0 == n {
                    visit(&stack);
                }
            } else {
                compositions_from(1, n - c0, s, &mut stack, &mut visit);
            }
            (re, im)
        })
        .collect();
    let (mut re, mut im) = (Neumaier::default(), Neumaier::default());
    for (r, i) in partials {
        re.merge(r);
        im.merge(i);
    }
    finish(re.value(), im.value())
}

/// Single-threaded [`qgms_energy_exact`], summing in enumeration order.
pub fn qgms_energy_exact_sequential(n: usize, angles: &DiscreteAngles) -> Result<f64> {
    if !validate_exact(n, angles)? {
        return Ok(0.0);
    }
    let tables = QgmsTables::new(n, angles)?;
    let (mut re, mut im) = (Neumaier::default(), Neumaier::default());
    for_each_composition(n, tables.q.len(), |parts| {
        let t = tables.term(parts);
        re.add(t.re);
        im.add(t.im);
    });
    finish(re.value(), im.value())
}

/// Tensor Gauss–Hermite average of [`qaoa_energy`] over standard normal couplings.
pub fn quadrature_disorder_average(n: usize, angles: &DiscreteAngles, nodes_per_coupling: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::EmptyInstance);
    }
    let couplings = n * (n - 1) / 2;
    if couplings > MAX_QUADRATURE_COUPLINGS {
        return Err(Error::InvalidArgument(format!(
            "tensor quadrature supports at most {MAX_QUADRATURE_COUPLINGS} couplings, got {couplings}"
        )));
    }
    if nodes_per_coupling < 8 {
        return Err(Error::InvalidArgument(format!(
            "quadrature needs at least 8 nodes, got {nodes_per_coupling}"
        )));
    }
    let rule = GaussHermite::new(NonZeroUsize::new(nodes_per_coupling).expect("checked above"));
    // weight e^{−x²} → standard normal via J = √2·x, w/√π
    let norm = std::f64::consts::PI.sqrt();
    let pts: Vec<(f64, f64)> = rule
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (std::f64::consts::SQRT_2 * x, w / norm))
        .collect();
    let total = pts.len().pow(couplings as u32);
    let mut acc = Neumaier::default();
    let mut js = vec![0.0; couplings];
    for flat in 0..total {
        let mut rest = flat;
        let mut weight = 1.0;
        for j in js.iter_mut() {
            let (x, w) = pts[rest % pts.len()];
            rest /= pts.len();
            *j = x;
            weight *= w;
        }
        let costs = SkInstance::from_couplings(n, js.clone())?.cost_values()?;
        acc.add(weight * qaoa_energy(&costs, angles)?);
    }
    Ok(acc.value())
}

/// Per-instance energy source for disorder averages.
#[derive(Debug, Clone, Copy)]
pub enum Simulator<'a> {
    Qaoa(&'a DiscreteAngles),
    Annealing { schedule: &'a ContinuousSchedule, tol: f64 },
}

impl Simulator<'_> {
    pub fn energy(&self, instance: &SkInstance) -> Result<f64> {
        let costs = instance.cost_values()?;
        match self {
            Simulator::Qaoa(angles) => qaoa_energy(&costs, angles),
            Simulator::Annealing { schedule, tol } => annealing_energy(&costs, schedule, *tol),
        }
    }
}

/// Per-instance energies for seeds `base_seed + i`, `i < num_instances`, in seed order.
pub fn instance_energies(n: usize, sim: Simulator<'_>, num_instances: usize, base_seed: u64) -> Result<Vec<f64>> {
    (0..num_instances)
        .into_par_iter()
        .map(|i| sim.energy(&SkInstance::sample(n, base_seed.wrapping_add(i as u64))?))
        .collect()
}

/// Sample mean and standard error over `num_instances` seeded instances.
pub fn monte_carlo_disorder_average(
    n: usize,
    sim: Simulator<'_>,
    num_instances: usize,
    base_seed: u64,
) -> Result<(f64, f64)> {
    if num_instances < 2 {
        return Err(Error::InvalidArgument(format!(
            "Monte-Carlo average needs at least two instances, got {num_instances}"
        )));
    }
    Ok(mean_stderr(&instance_energies(n, sim, num_instances, base_seed)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationRow {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationReport {
    pub rows: Vec<ConcentrationRow>,
    /// Log-log fit of variance against `n`; absent with fewer than three positive variances.
    pub fit: Option<LineFit>,
}

/// Empirical variance of the per-instance QAOA energy at each size.
pub fn empirical_concentration(
    ns: &[usize],
    angles: &DiscreteAngles,
    num_instances: usize,
    base_seed: u64,
) -> Result<ConcentrationReport> {
    let rows = ns
        .iter()
        .map(|&n| {
            let energies = instance_energies(n, Simulator::Qaoa(angles), num_instances, base_seed)?;
            Ok(ConcentrationRow {
                n,
                mean: mean_stderr(&energies).0,
                variance: sample_variance(&energies),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.variance)).collect();
    let fit = fit_decay_exponent(&points).ok();
    Ok(ConcentrationReport { rows, fit })
}
