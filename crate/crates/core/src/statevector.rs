//! Dense statevector simulation of the QAOA circuit.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::schedules::DiscreteAngles;
use crate::sk::{CostVector, MAX_QUBITS};

/// `2ⁿ` complex amplitudes; bit `i` of an index is qubit `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amplitudes: Vec<Complex64>,
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::EmptyInstance)
    } else if n > MAX_QUBITS {
        Err(Error::TooManyQubits { n, cap: MAX_QUBITS })
    } else {
        Ok(())
    }
}

impl StateVector {
    /// The uniform superposition `|+⟩^⊗n`.
    pub fn plus_state(n: usize) -> Result<Self> {
        check_qubits(n)?;
        let amp = Complex64::new(((1usize << n) as f64).sqrt().recip(), 0.0);
        Ok(Self {
            n,
            amplitudes: vec![amp; 1 << n],
        })
    }

    pub fn basis_state(n: usize, index: usize) -> Result<Self> {
        check_qubits(n)?;
        if index >= 1 << n {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for {n} qubits"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amplitudes })
    }

    pub fn from_amplitudes(n: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_qubits(n)?;
        if amplitudes.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: amplitudes.len(),
            });
        }
        Ok(Self { n, amplitudes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Euclidean distance `‖self − other‖₂`.
    pub fn distance(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Multiplies each amplitude by `exp(−i·γ·C(σ))`.
    pub fn apply_phase(&mut self, costs: &CostVector, gamma: f64) -> Result<()> {
        if costs.len() != self.amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amplitudes.len(),
                found: costs.len(),
            });
        }
        if gamma == 0.0 {
            return Ok(());
        }
        for (amp, &c) in self.amplitudes.iter_mut().zip(costs.values()) {
            let (s, co) = (gamma * c).sin_cos();
            *amp *= Complex64::new(co, -s);
        }
        Ok(())
    }

    /// Applies `exp(−i·β·X)` to every qubit in turn.
    pub fn apply_mixer(&mut self, beta: f64) {
        if beta == 0.0 {
            return;
        }
        let (s, c) = beta.sin_cos();
        for q in 0..self.n {
            let stride = 1usize << q;
            for block in self.amplitudes.chunks_exact_mut(2 * stride) {
                let (lo, hi) = block.split_at_mut(stride);
                for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                    // (c·a − i·s·b, c·b − i·s·a)
                    let (ar, ai, br, bi) = (a.re, a.im, b.re, b.im);
                    *a = Complex64::new(c * ar + s * bi, c * ai - s * br);
                    *b = Complex64::new(c * br + s * ai, c * bi - s * ar);
                }
            }
        }
    }

    /// Amplitudes as `index,re,im` CSV rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,re,im\n");
        for (i, a) in self.amplitudes.iter().enumerate() {
            let _ = writeln!(out, "{i},{:.17e},{:.17e}", a.re, a.im);
        }
        out
    }
}

/// Runs `p` layers of phase-then-mixer on `|+⟩^⊗n`, using `γ₁..γ_p` only.
pub fn qaoa_state_layers(costs: &CostVector, gammas: &[f64], betas: &[f64]) -> Result<StateVector> {
    if gammas.len() < betas.len() {
        return Err(Error::LengthMismatch {
            gammas: gammas.len(),
            betas: betas.len(),
        });
    }
    let mut state = StateVector::plus_state(costs.n())?;
    for (&g, &b) in gammas.iter().zip(betas) {
        state.apply_phase(costs, g)?;
        state.apply_mixer(b);
    }
    Ok(state)
}

/// The QAOA state `∏ e^{−iβ_t B} e^{−iγ_t C} |+⟩`.
pub fn qaoa_state(costs: &CostVector, angles: &DiscreteAngles) -> Result<StateVector> {
    qaoa_state_layers(costs, angles.layer_gammas(), angles.betas())
}

/// Energy density `⟨C⟩/n` of the QAOA state on one instance.
pub fn qaoa_energy(costs: &CostVector, angles: &DiscreteAngles) -> Result<f64> {
    costs.energy_density(&qaoa_state(costs, angles)?)
}
