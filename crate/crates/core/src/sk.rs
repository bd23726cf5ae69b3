//! Sherrington–Kirkpatrick instances and their dense cost diagonal.
//!
//! Spin convention: bit `b` of a basis index for qubit `i` maps to
//! `σ_i = 1 − 2b`, so the all-zeros index is the all-up configuration.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::statevector::StateVector;

/// Largest qubit count for which dense vectors are materialized.
pub const MAX_QUBITS: usize = 24;

/// A random SK instance with upper-triangular couplings `J_{j,k}`, `j < k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SkInstance {
    n: usize,
    seed: u64,
    couplings: Vec<f64>,
}

/// Diagonal of the cost Hamiltonian over all `2ⁿ` basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct CostVector {
    n: usize,
    values: Vec<f64>,
}

/// Position of pair `(j, k)`, `j < k`, in row-major upper-triangular order.
#[inline]
pub fn pair_index(n: usize, j: usize, k: usize) -> usize {
    debug_assert!(j < k && k < n);
    j * (2 * n - j - 1) / 2 + (k - j - 1)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Draws the coupling for pair `(j, k)` from a ChaCha stream keyed by
/// `(n, seed)` and selected by the pair index, so every coupling can be
/// regenerated independently of the others.
fn coupling(n: usize, seed: u64, pair: usize) -> f64 {
    let key = splitmix64(splitmix64(seed) ^ (n as u64).rotate_left(32));
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(pair as u64);
    rng.sample(StandardNormal)
}

impl SkInstance {
    /// Samples i.i.d. standard normal couplings for an `n`-spin instance.
    pub fn sample(n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInstance);
        }
        let count = n * (n - 1) / 2;
        let couplings = (0..count).map(|pair| coupling(n, seed, pair)).collect();
        Ok(Self { n, seed, couplings })
    }

    /// Builds an instance from explicit couplings in upper-triangular order.
    pub fn from_couplings(n: usize, couplings: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInstance);
        }
        let expected = n * (n - 1) / 2;
        if couplings.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: couplings.len(),
            });
        }
        Ok(Self { n, seed: 0, couplings })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn coupling(&self, j: usize, k: usize) -> f64 {
        let (a, b) = if j < k { (j, k) } else { (k, j) };
        self.couplings[pair_index(self.n, a, b)]
    }

    /// Instance with every coupling negated (`C → −C`).
    pub fn negated(&self) -> Self {
        Self {
            n: self.n,
            seed: self.seed,
            couplings: self.couplings.iter().map(|j| -j).collect(),
        }
    }

    /// Cost `C(σ)` of a single basis index, evaluated directly from the couplings.
    pub fn cost_of(&self, index: usize) -> f64 {
        let spin = |i: usize| if (index >> i) & 1 == 0 { 1.0 } else { -1.0 };
        let mut acc = 0.0;
        for j in 0..self.n {
            for k in (j + 1)..self.n {
                acc += self.coupling(j, k) * spin(j) * spin(k);
            }
        }
        acc / (self.n as f64).sqrt()
    }

    /// Dense cost diagonal, built in `O(2ⁿ)` by flipping one spin at a time.
    pub fn cost_values(&self) -> Result<CostVector> {
        let n = self.n;
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits { n, cap: MAX_QUBITS });
        }
        let norm = 1.0 / (n as f64).sqrt();
        let mut values = vec![0.0; 1 << n];
        values[0] = self.couplings.iter().sum::<f64>() * norm;
        let mut field = vec![0.0; 1 << n.saturating_sub(1)];
        for k in 0..n {
            // field[σ] = Σ_{j<k} J_{jk} σ_j for σ over the lower k bits
            field[0] = (0..k).map(|j| self.coupling(j, k)).sum();
            for m in 0..k {
                let jmk = self.coupling(m, k);
                for s in 0..(1usize << m) {
                    field[s | (1 << m)] = field[s] - 2.0 * jmk;
                }
            }
            let upper: f64 = ((k + 1)..n).map(|j| self.coupling(k, j)).sum();
            for s in 0..(1usize << k) {
                values[s | (1 << k)] = values[s] - 2.0 * (field[s] + upper) * norm;
            }
        }
        Ok(CostVector { n, values })
    }

    /// Plain-text `sk v1` serialization with 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::from("sk v1\n");
        let _ = writeln!(out, "{} {}", self.n, self.seed);
        for j in 0..self.n {
            for k in (j + 1)..self.n {
                let _ = writeln!(out, "{} {} {:.16e}", j + 1, k + 1, self.coupling(j, k));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let parse_err = |line: usize, msg: &str| Error::Parse {
            line,
            msg: msg.to_string(),
        };
        match lines.next() {
            Some((_, "sk v1")) => {}
            Some((line, _)) => return Err(parse_err(line, "expected `sk v1` header")),
            None => return Err(parse_err(1, "empty input")),
        }
        let (line, header) = lines.next().ok_or_else(|| parse_err(2, "missing `n seed` line"))?;
        let mut fields = header.split_whitespace();
        let n: usize = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| parse_err(line, "bad qubit count"))?;
        let seed: u64 = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| parse_err(line, "bad seed"))?;
        if n == 0 {
            return Err(Error::EmptyInstance);
        }
        let mut couplings = vec![f64::NAN; n * (n - 1) / 2];
        for (line, row) in lines {
            let parts: Vec<&str> = row.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(parse_err(line, "expected `j k J`"));
            }
            let j: usize = parts[0].parse().map_err(|_| parse_err(line, "bad j"))?;
            let k: usize = parts[1].parse().map_err(|_| parse_err(line, "bad k"))?;
            let value: f64 = parts[2].parse().map_err(|_| parse_err(line, "bad J"))?;
            if !(1 <= j && j < k && k <= n) {
                return Err(parse_err(line, "pair out of range"));
            }
            couplings[pair_index(n, j - 1, k - 1)] = value;
        }
        if couplings.iter().any(|c| c.is_nan()) {
            return Err(parse_err(0, "missing couplings"));
        }
        Ok(Self { n, seed, couplings })
    }
}

impl CostVector {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Exact minimum over all basis states together with its index.
    pub fn ground_state(&self) -> (f64, usize) {
        self.values.iter().copied().enumerate().fold(
            (f64::INFINITY, 0),
            |(best, arg), (i, v)| {
                if v < best {
                    (v, i)
                } else {
                    (best, arg)
                }
            },
        )
    }

    pub fn ground_energy(&self) -> f64 {
        self.ground_state().0
    }

    /// Exact maximum over all basis states.
    pub fn max_energy(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `⟨ψ|C|ψ⟩ / n`, evaluated as a real quadratic form.
    pub fn energy_density(&self, state: &StateVector) -> Result<f64> {
        if state.len() != self.values.len() {
            return Err(Error::DimensionMismatch {
                expected: self.values.len(),
                found: state.len(),
            });
        }
        let total: f64 = state
            .amplitudes()
            .iter()
            .zip(&self.values)
            .map(|(a, c)| a.norm_sqr() * c)
            .sum();
        Ok(total / self.n as f64)
    }
}
