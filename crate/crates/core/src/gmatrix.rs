//! Infinite-size SK-QAOA energy from the `G` saddle-point fixed point.
//!
//! Indices run over `0..=2p+1`. A configuration `a ∈ {±1}^{2p+2}` with `a_p = a_{p+1}`
//! is stored by its reduced index `r` of `2p+1` bits: bits `0..=p` of `r` are slots
//! `0..=p`, and bits `p+1..=2p` of `r` are slots `p+2..=2p+1`. Bit value 0 means `+1`.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::schedules::DiscreteAngles;

/// Largest layer count accepted by [`QVector::new`].
pub const MAX_LAYERS: usize = 11;

const PARALLEL_THRESHOLD: usize = 1 << 12;

/// Full `2p+2`-bit configuration of a reduced index.
pub fn expand_config(p: usize, r: usize) -> u64 {
    let low_mask = (1u64 << (p + 1)) - 1;
    let r = r as u64;
    let low = r & low_mask;
    let mid = (r >> p) & 1;
    let high = r >> (p + 1);
    low | (mid << (p + 1)) | (high << (p + 2))
}

fn spin(config: u64, slot: usize) -> f64 {
    if (config >> slot) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn check_layers(p: usize) -> Result<()> {
    if p == 0 {
        Err(Error::InvalidArgument("layer count must be at least 1".into()))
    } else if p > MAX_LAYERS {
        Err(Error::TooManyLayers { p, cap: MAX_LAYERS })
    } else {
        Ok(())
    }
}

/// Path weights `Q_a = ½·∏_t ⟨a_t|e^{iβ̃_t X}|a_{t−1}⟩` of the mixer-only circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct QVector {
    p: usize,
    entries: Vec<Complex64>,
}

impl QVector {
    pub fn new(betas: &[f64]) -> Result<Self> {
        let p = betas.len();
        check_layers(p)?;
        let mut beta_tilde = vec![0.0];
        beta_tilde.extend(betas.iter().map(|b| -b));
        beta_tilde.push(0.0);
        beta_tilde.extend(betas.iter().rev());
        let factors: Vec<(f64, f64)> = beta_tilde.iter().map(|b| (b.cos(), b.sin())).collect();
        let len = 1usize << (2 * p + 1);
        let entries = (0..len)
            .map(|r| {
                let config = expand_config(p, r);
                let mut q = Complex64::new(0.5, 0.0);
                for (t, &(c, s)) in factors.iter().enumerate().skip(1) {
                    let flip = ((config >> t) ^ (config >> (t - 1))) & 1 == 1;
                    q *= if flip {
                        Complex64::new(0.0, s)
                    } else {
                        Complex64::new(c, 0.0)
                    };
                }
                q
            })
            .collect();
        Ok(Self { p, entries })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Entries indexed by reduced configuration.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `Σ_a Q_a ∏_r a_{j_r}` by exhaustive summation.
    pub fn moment(&self, indices: &[usize]) -> Result<Complex64> {
        let dim = 2 * self.p + 2;
        if let Some(&j) = indices.iter().find(|&&j| j >= dim) {
            return Err(Error::InvalidArgument(format!("index {j} out of range 0..{dim}")));
        }
        Ok(self
            .entries
            .iter()
            .enumerate()
            .map(|(r, q)| {
                let config = expand_config(self.p, r);
                q * indices.iter().map(|&j| spin(config, j)).product::<f64>()
            })
            .sum())
    }
}

/// Closed form `exp(−2i·Σ_r (B_{j(2r)} − B_{j(2r−1)}))` over the sorted indices.
pub fn noninteracting_correlation(big_b: &[f64], indices: &[usize]) -> Result<Complex64> {
    if indices.len() % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "noninteracting correlation needs an even index count, got {}",
            indices.len()
        )));
    }
    if let Some(&j) = indices.iter().find(|&&j| j >= big_b.len()) {
        return Err(Error::InvalidArgument(format!(
            "index {j} out of range 0..{}",
            big_b.len()
        )));
    }
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    let phase: f64 = sorted.chunks_exact(2).map(|w| big_b[w[1]] - big_b[w[0]]).sum();
    Ok(Complex64::from_polar(1.0, -2.0 * phase))
}

/// Square complex matrix over slots `0..=2p+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl GMatrix {
    fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    /// `Ḡ_{jk} = exp(−2i(B_k − B_j))` for `j ≤ k`, mirrored below the diagonal.
    pub fn noninteracting(big_b: &[f64]) -> Self {
        let dim = big_b.len();
        let mut g = Self::zeros(dim);
        for j in 0..dim {
            for k in j..dim {
                let v = Complex64::from_polar(1.0, -2.0 * (big_b[k] - big_b[j]));
                g.set_sym(j, k, v);
            }
        }
        g
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.entries[j * self.dim + k]
    }

    fn set_sym(&mut self, j: usize, k: usize, v: Complex64) {
        self.entries[j * self.dim + k] = v;
        self.entries[k * self.dim + j] = v;
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn max_diagonal_defect(&self) -> f64 {
        (0..self.dim).fold(0.0, |m, j| m.max((self.get(j, j) - 1.0).norm()))
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.dim {
            for k in 0..j {
                worst = worst.max((self.get(j, k) - self.get(k, j)).norm());
            }
        }
        worst
    }

    fn max_diff(&self, other: &GMatrix) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// `j,k,re,im` rows in row-major order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,k,re,im\n");
        for j in 0..self.dim {
            for k in 0..self.dim {
                let z = self.get(j, k);
                let _ = writeln!(out, "{j},{k},{:.17e},{:.17e}", z.re, z.im);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub damping: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-13,
            damping: 0.5,
            max_iter: 20_000,
        }
    }
}

/// Converged fixed point with its diagnostics.
#[derive(Debug, Clone)]
pub struct GSolution {
    pub g: GMatrix,
    pub iterations: usize,
    pub residual: f64,
}

const EXPLOSION_NORM: f64 = 1e3;

/// Per-configuration data reused by every fixed-point sweep.
struct Workspace {
    dim: usize,
    /// `Γ_r a_r` for slots outside the middle pair, zero on it.
    v: Vec<Vec<f64>>,
    q: Vec<Complex64>,
    spins: Vec<Vec<f64>>,
}

impl Workspace {
    fn new(q: &QVector, big_gamma: &[f64]) -> Result<Self> {
        let p = q.p;
        let dim = 2 * p + 2;
        if big_gamma.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: big_gamma.len(),
            });
        }
        let mut v = Vec::with_capacity(q.len());
        let mut spins = Vec::with_capacity(q.len());
        for r in 0..q.len() {
            let config = expand_config(p, r);
            let a: Vec<f64> = (0..dim).map(|j| spin(config, j)).collect();
            v.push(
                (0..dim)
                    .map(|j| if j == p || j == p + 1 { 0.0 } else { big_gamma[j] * a[j] })
                    .collect(),
            );
            spins.push(a);
        }
        Ok(Self {
            dim,
            v,
            q: q.entries.clone(),
            spins,
        })
    }

    /// `Q_a·exp(−½ vᵀGv)` for configuration `r`.
    fn weight(&self, g: &GMatrix, r: usize) -> Complex64 {
        let v = &self.v[r];
        let mut quad = Complex64::new(0.0, 0.0);
        for j in 0..self.dim {
            if v[j] == 0.0 {
                continue;
            }
            let mut row = Complex64::new(0.0, 0.0);
            for k in 0..self.dim {
                row += g.get(j, k) * v[k];
            }
            quad += row * v[j];
        }
        self.q[r] * (-0.5 * quad).exp()
    }

    fn accumulate(&self, g: &GMatrix, range: std::ops::Range<usize>) -> (Vec<Complex64>, Complex64) {
        let mut acc = vec![Complex64::new(0.0, 0.0); self.dim * self.dim];
        let mut z = Complex64::new(0.0, 0.0);
        for r in range {
            let w = self.weight(g, r);
            z += w;
            let a = &self.spins[r];
            for j in 0..self.dim {
                let wj = w * a[j];
                for k in j..self.dim {
                    acc[j * self.dim + k] += wj * a[k];
                }
            }
        }
        (acc, z)
    }

    /// Right-hand side `F(G)` and the partition sum `Z = Σ_a Q_a exp(…)`.
    fn apply(&self, g: &GMatrix) -> (GMatrix, Complex64) {
        let len = self.q.len();
        let (acc, z) = if len >= PARALLEL_THRESHOLD {
            let chunk = PARALLEL_THRESHOLD;
            (0..len.div_ceil(chunk))
                .into_par_iter()
                .map(|c| self.accumulate(g, c * chunk..((c + 1) * chunk).min(len)))
                .reduce(
                    || {
                        (
                            vec![Complex64::new(0.0, 0.0); self.dim * self.dim],
                            Complex64::new(0.0, 0.0),
                        )
                    },
                    |(mut a, za), (b, zb)| {
                        for (x, y) in a.iter_mut().zip(b) {
                            *x += y;
                        }
                        (a, za + zb)
                    },
                )
        } else {
            self.accumulate(g, 0..len)
        };
        let mut out = GMatrix::zeros(self.dim);
        for j in 0..self.dim {
            for k in j..self.dim {
                out.set_sym(j, k, acc[j * self.dim + k]);
            }
        }
        (out, z)
    }
}

/// Damped iteration `G ← (1−η)G + η·F(G)` from the noninteracting matrix.
pub fn solve_g_matrix(q: &QVector, angles: &DiscreteAngles, opts: &SolverOptions) -> Result<GSolution> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {}",
            opts.tol
        )));
    }
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "damping must lie in (0, 1], got {}",
            opts.damping
        )));
    }
    if angles.p() != q.p {
        return Err(Error::DimensionMismatch {
            expected: q.p,
            found: angles.p(),
        });
    }
    let ws = Workspace::new(q, angles.big_gamma())?;
    let mut g = GMatrix::noninteracting(angles.big_b());
    let eta = opts.damping;
    let mut residual = f64::INFINITY;
    for iteration in 0..opts.max_iter {
        let (f, _) = ws.apply(&g);
        residual = f.max_diff(&g);
        if !residual.is_finite() || f.max_abs() > EXPLOSION_NORM {
            return Err(Error::FixedPointDiverged {
                iteration,
                norm: f.max_abs(),
            });
        }
        if residual < opts.tol {
            return Ok(GSolution {
                g,
                iterations: iteration,
                residual,
            });
        }
        for j in 0..ws.dim {
            for k in j..ws.dim {
                let v = if j == k {
                    Complex64::new(1.0, 0.0)
                } else {
                    g.get(j, k) * (1.0 - eta) + f.get(j, k) * eta
                };
                g.set_sym(j, k, v);
            }
        }
    }
    Err(Error::FixedPointNotConverged {
        iterations: opts.max_iter,
        residual,
    })
}

/// `|Σ_a Q_a exp(−½ vᵀGv) − 1|`.
pub fn z_star_residual(q: &QVector, angles: &DiscreteAngles, g: &GMatrix) -> Result<f64> {
    let ws = Workspace::new(q, angles.big_gamma())?;
    let z: Complex64 = (0..ws.q.len()).map(|r| ws.weight(g, r)).sum();
    Ok((z - 1.0).norm())
}

/// Imaginary-part threshold for [`infinite_size_energy`].
pub const IMAG_THRESHOLD: f64 = 1e-8;

/// `Re[(i/2)·Σ_r Γ_r·G_{r,p+1}²]`.
pub fn infinite_size_energy(g: &GMatrix, big_gamma: &[f64]) -> Result<f64> {
    if big_gamma.len() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: big_gamma.len(),
        });
    }
    let col = g.dim() / 2;
    let sum: Complex64 = big_gamma
        .iter()
        .enumerate()
        .map(|(r, gam)| g.get(r, col).powu(2) * gam)
        .sum();
    let nu = Complex64::new(0.0, 0.5) * sum;
    if nu.im.abs() > IMAG_THRESHOLD {
        return Err(Error::ImaginaryResidue {
            imag: nu.im,
            threshold: IMAG_THRESHOLD,
        });
    }
    Ok(nu.re)
}

/// Solves for `G` and returns `(ν_∞, solution)`.
pub fn infinite_size_energy_for(angles: &DiscreteAngles, opts: &SolverOptions) -> Result<(f64, GSolution)> {
    let q = QVector::new(angles.betas())?;
    let sol = solve_g_matrix(&q, angles, opts)?;
    let nu = infinite_size_energy(&sol.g, angles.big_gamma())?;
    Ok((nu, sol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn random_betas(rng: &mut impl Rng, p: usize) -> Vec<f64> {
        (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    /// `⟨a_end|∏ e^{iβ̃X}|a_0⟩` style chain evaluated with explicit 2×2 matrix products.
    fn chain_weight(betas: &[f64], config: u64) -> Complex64 {
        let p = betas.len();
        let mut bt = vec![0.0];
        bt.extend(betas.iter().map(|b| -b));
        bt.push(0.0);
        bt.extend(betas.iter().rev());
        let mut w = Complex64::new(0.5, 0.0);
        for t in 1..2 * p + 2 {
            let (c, s) = (bt[t].cos(), bt[t].sin());
            let m = [
                [Complex64::new(c, 0.0), Complex64::new(0.0, s)],
                [Complex64::new(0.0, s), Complex64::new(c, 0.0)],
            ];
            let to = ((config >> t) & 1) as usize;
            let from = ((config >> (t - 1)) & 1) as usize;
            w *= m[to][from];
        }
        w
    }

    #[test]
    fn expand_config_duplicates_middle_bit() {
        let p = 2;
        for r in 0..32usize {
            let c = expand_config(p, r);
            assert_eq!((c >> 2) & 1, (c >> 3) & 1);
            assert_eq!(c & 0b111, r as u64 & 0b111);
            assert_eq!(c >> 4, r as u64 >> 3);
        }
    }

    #[test]
    fn q_with_zero_betas() {
        let q = QVector::new(&[0.0, 0.0]).unwrap();
        for (r, z) in q.entries().iter().enumerate() {
            let expect = if r == 0 || r == q.len() - 1 { 0.5 } else { 0.0 };
            assert_eq!(*z, Complex64::new(expect, 0.0));
        }
        assert!(QVector::new(&[]).is_err());
        assert!(matches!(QVector::new(&[0.1; 12]), Err(Error::TooManyLayers { .. })));
    }

    #[test]
    fn q_matches_matrix_chain_at_quarter_pi() {
        let betas = [PI / 4.0];
        let q = QVector::new(&betas).unwrap();
        assert_eq!(q.len(), 8);
        for (r, z) in q.entries().iter().enumerate() {
            assert!((z.norm() - 0.25).abs() < 1e-15);
            let oracle = chain_weight(&betas, expand_config(1, r));
            assert!((z - oracle).norm() < 1e-15);
        }
    }

    #[test]
    fn q_normalization_and_reversal() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for p in 1..=4 {
            let betas = random_betas(&mut rng, p);
            let q = QVector::new(&betas).unwrap();
            let total: Complex64 = q.entries().iter().sum();
            assert!((total - 1.0).norm() < 1e-13);
            let dim = 2 * p + 2;
            let full_to_reduced = |c: u64| -> usize {
                let low = c & ((1 << (p + 1)) - 1);
                (low | ((c >> (p + 2)) << (p + 1))) as usize
            };
            for r in 0..q.len() {
                let c = expand_config(p, r);
                let rev = (0..dim).fold(0u64, |acc, j| acc | (((c >> j) & 1) << (dim - 1 - j)));
                let z = q.entries()[r];
                let zr = q.entries()[full_to_reduced(rev)];
                assert!((z.conj() - zr).norm() < 1e-15);
                assert!((z - chain_weight(&betas, c)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn noninteracting_closed_form_matches_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for p in 1..=3 {
            let betas = random_betas(&mut rng, p);
            let angles = DiscreteAngles::from_layers(&vec![0.0; p], &betas).unwrap();
            let q = QVector::new(&betas).unwrap();
            let dim = 2 * p + 2;
            for d in 1..=3 {
                for _ in 0..40 {
                    let idx: Vec<usize> = (0..2 * d).map(|_| rng.gen_range(0..dim)).collect();
                    let closed = noninteracting_correlation(angles.big_b(), &idx).unwrap();
                    let brute = q.moment(&idx).unwrap();
                    assert!((closed - brute).norm() < 1e-12, "p={p} idx={idx:?}");
                }
            }
        }
    }

    #[test]
    fn noninteracting_correlation_edge_cases() {
        let b = [0.0, -0.4, -0.4, 0.0];
        assert!(noninteracting_correlation(&b, &[0, 1, 2]).is_err());
        assert!(noninteracting_correlation(&b, &[0, 9]).is_err());
        assert_eq!(
            noninteracting_correlation(&[0.0; 6], &[1, 4, 2, 5]).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        let z = noninteracting_correlation(&b, &[2, 0]).unwrap();
        assert!((z - Complex64::from_polar(1.0, -2.0 * (-0.4))).norm() < 1e-15);
    }

    #[test]
    fn zero_gamma_fixed_point_is_immediate() {
        let angles = DiscreteAngles::from_layers(&[0.0, 0.0], &[0.3, 0.2]).unwrap();
        let q = QVector::new(angles.betas()).unwrap();
        let sol = solve_g_matrix(&q, &angles, &SolverOptions::default()).unwrap();
        assert_eq!(sol.iterations, 0);
        assert_eq!(sol.g, GMatrix::noninteracting(angles.big_b()));
        let nu = infinite_size_energy(&sol.g, angles.big_gamma()).unwrap();
        assert!(nu.abs() < 1e-15);
    }

    #[test]
    fn zero_beta_gives_all_ones() {
        let angles = DiscreteAngles::from_layers(&[0.3, 0.2], &[0.0, 0.0]).unwrap();
        let (nu, sol) = infinite_size_energy_for(&angles, &SolverOptions::default()).unwrap();
        for j in 0..6 {
            for k in 0..6 {
                assert!((sol.g.get(j, k) - 1.0).norm() < 1e-13);
            }
        }
        assert!(nu.abs() < 1e-13);
    }

    #[test]
    fn p1_energy_matches_closed_form() {
        // ν = γ·sin4β·exp(−2γ²) in the infinite-size limit at one layer
        for &(g, b) in &[(0.5, PI / 8.0), (0.2, 0.3), (-0.35, 0.7), (0.4, 0.3)] {
            let angles = DiscreteAngles::from_layers(&[g], &[b]).unwrap();
            let (nu, sol) = infinite_size_energy_for(&angles, &SolverOptions::default()).unwrap();
            let closed = g * (4.0 * b).sin() * (-2.0 * g * g).exp();
            assert!((nu - closed).abs() < 1e-11, "{nu} vs {closed}");
            let q = QVector::new(angles.betas()).unwrap();
            assert!(z_star_residual(&q, &angles, &sol.g).unwrap() < 1e-10);
        }
        let peak = DiscreteAngles::from_layers(&[0.5], &[PI / 8.0]).unwrap();
        let (nu, _) = infinite_size_energy_for(&peak, &SolverOptions::default()).unwrap();
        assert!((nu - 0.5 * (-0.5f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn solver_identities_at_small_gamma() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for p in 1..=3 {
            let gammas: Vec<f64> = (0..p).map(|_| rng.gen_range(-0.3..0.3)).collect();
            let angles = DiscreteAngles::from_layers(&gammas, &random_betas(&mut rng, p)).unwrap();
            let q = QVector::new(angles.betas()).unwrap();
            let sol = solve_g_matrix(&q, &angles, &SolverOptions::default()).unwrap();
            assert!(z_star_residual(&q, &angles, &sol.g).unwrap() < 1e-10);
            assert!(sol.g.max_diagonal_defect() < 1e-10);
            assert!(sol.g.max_asymmetry() < 1e-10);
            assert!(sol.g.max_abs() <= 2.0);
        }
    }

    #[test]
    fn energy_ignores_placeholder() {
        let angles = DiscreteAngles::new(vec![0.2, -0.1, 0.25, 0.0], vec![0.4, 0.3, 0.1]).unwrap();
        let (base, _) = infinite_size_energy_for(&angles, &SolverOptions::default()).unwrap();
        for ph in [0.7, -3.0, 10.0] {
            let (other, _) =
                infinite_size_energy_for(&angles.with_placeholder(ph).unwrap(), &SolverOptions::default()).unwrap();
            assert!((base - other).abs() < 1e-12);
        }
    }

    #[test]
    fn solver_rejects_bad_options() {
        let angles = DiscreteAngles::from_layers(&[0.2], &[0.3]).unwrap();
        let q = QVector::new(angles.betas()).unwrap();
        let bad = |tol, damping| SolverOptions {
            tol,
            damping,
            max_iter: 10,
        };
        assert!(solve_g_matrix(&q, &angles, &bad(0.0, 0.5)).is_err());
        assert!(solve_g_matrix(&q, &angles, &bad(1e-10, 0.0)).is_err());
        assert!(solve_g_matrix(&q, &angles, &bad(1e-10, 1.5)).is_err());
        let two = DiscreteAngles::from_layers(&[0.2, 0.1], &[0.3, 0.1]).unwrap();
        assert!(solve_g_matrix(&q, &two, &SolverOptions::default()).is_err());
        let strict = SolverOptions {
            tol: 1e-300,
            damping: 0.5,
            max_iter: 3,
        };
        assert!(matches!(
            solve_g_matrix(&q, &angles, &strict),
            Err(Error::FixedPointNotConverged { iterations: 3, .. })
        ));
    }

    #[test]
    fn large_gamma_reports_divergence_or_converges() {
        let angles = DiscreteAngles::from_layers(&[6.0, 6.0], &[0.7, 0.7]).unwrap();
        match infinite_size_energy_for(
            &angles,
            &SolverOptions {
                max_iter: 200,
                ..Default::default()
            },
        ) {
            Ok((nu, _)) => assert!(nu.is_finite()),
            Err(e) => assert!(matches!(
                e,
                Error::FixedPointDiverged { .. }
                    | Error::FixedPointNotConverged { .. }
                    | Error::ImaginaryResidue { .. }
            )),
        }
    }

    #[test]
    fn csv_export_shape() {
        let g = GMatrix::noninteracting(&[0.0, -0.2, -0.2, 0.0]);
        let csv = g.to_csv();
        assert_eq!(csv.lines().count(), 17);
        assert!(csv.starts_with("j,k,re,im\n0,0,1.00000000000000000e0,"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn small_gamma_fixed_points(
            gb in proptest::collection::vec((-0.3f64..0.3, -1.5f64..1.5), 1..4),
        ) {
            let (g, b): (Vec<f64>, Vec<f64>) = gb.into_iter().unzip();
            let angles = DiscreteAngles::from_layers(&g, &b).unwrap();
            let q = QVector::new(angles.betas()).unwrap();
            let sol = solve_g_matrix(&q, &angles, &SolverOptions::default()).unwrap();
            prop_assert!(z_star_residual(&q, &angles, &sol.g).unwrap() < 1e-10);
            prop_assert!(sol.g.max_abs() <= 2.0);
            let nu = infinite_size_energy(&sol.g, angles.big_gamma()).unwrap();
            let moved = angles.with_placeholder(1.7).unwrap();
            let sol2 = solve_g_matrix(&q, &moved, &SolverOptions::default()).unwrap();
            let nu2 = infinite_size_energy(&sol2.g, moved.big_gamma()).unwrap();
            prop_assert!((nu - nu2).abs() < 1e-12);
        }
    }
}
