//! Continuous schedules, Fourier-IV extrapolation and discretization into QAOA angles.
//!
//! A [`ContinuousSchedule`] holds two profiles on `s ∈ [0, 1]` and a common `scale`
//! (`Δ·p`). Fourier profiles use the sine-IV basis for γ and the cosine-IV basis for β.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Layer count of the reference optimized angles.
pub const REFERENCE_P0: usize = 17;

/// Reference optimized γ angles at `p = 17`.
pub const REFERENCE_GAMMAS: [f64; 17] = [
    0.1735, 0.3376, 0.3562, 0.3789, 0.3844, 0.3907, 0.3946, 0.4016, 0.4099, 0.4217, 0.4370, 0.4565, 0.4816, 0.5138,
    0.5530, 0.5962, 0.6429,
];

/// Reference optimized β angles at `p = 17`.
pub const REFERENCE_BETAS: [f64; 17] = [
    0.6375, 0.5197, 0.4697, 0.4499, 0.4255, 0.4054, 0.3832, 0.3603, 0.3358, 0.3092, 0.2807, 0.2501, 0.2171, 0.1816,
    0.1426, 0.1001, 0.0536,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Basis {
    Sine,
    Cosine,
}

fn freq(k: usize) -> f64 {
    PI * (k as f64 + 0.5)
}

/// Shape of one schedule component before scaling.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// `(1/p₀)·Σ_k c_k·f(π(k−½)s)` with `f = sin` for γ and `f = cos` for β.
    Fourier {
        p0: usize,
        coeffs: Vec<f64>,
    },
    Constant(f64),
    /// Piecewise-linear interpolation of values on a uniform grid over `[0, 1]`.
    Table(Vec<f64>),
}

impl Profile {
    fn validate(&self) -> Result<()> {
        match self {
            Profile::Fourier { p0, coeffs } => {
                if *p0 == 0 {
                    return Err(Error::InvalidArgument("Fourier p0 must be positive".into()));
                }
                if coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidArgument("non-finite Fourier coefficient".into()));
                }
            }
            Profile::Constant(v) => {
                if !v.is_finite() {
                    return Err(Error::InvalidArgument("non-finite constant profile".into()));
                }
            }
            Profile::Table(v) => {
                if v.len() < 2 {
                    return Err(Error::InvalidArgument(
                        "tabulated profile needs at least two values".into(),
                    ));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidArgument("non-finite tabulated value".into()));
                }
            }
        }
        Ok(())
    }

    fn eval(&self, basis: Basis, s: f64) -> f64 {
        match self {
            Profile::Fourier { p0, coeffs } => {
                let sum: f64 = coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, c)| match basis {
                        Basis::Sine => c * (freq(k) * s).sin(),
                        Basis::Cosine => c * (freq(k) * s).cos(),
                    })
                    .sum();
                sum / *p0 as f64
            }
            Profile::Constant(v) => *v,
            Profile::Table(v) => {
                let m = v.len() - 1;
                let x = s.clamp(0.0, 1.0) * m as f64;
                let i = (x.floor() as usize).min(m - 1);
                let frac = x - i as f64;
                v[i] * (1.0 - frac) + v[i + 1] * frac
            }
        }
    }

    /// Exact `∫_a^b` of the profile.
    fn integral(&self, basis: Basis, a: f64, b: f64) -> f64 {
        match self {
            Profile::Fourier { p0, coeffs } => {
                let sum: f64 = coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, c)| {
                        let w = freq(k);
                        match basis {
                            Basis::Sine => c * ((w * a).cos() - (w * b).cos()) / w,
                            Basis::Cosine => c * ((w * b).sin() - (w * a).sin()) / w,
                        }
                    })
                    .sum();
                sum / *p0 as f64
            }
            Profile::Constant(v) => v * (b - a),
            Profile::Table(v) => {
                let (lo, hi, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
                let m = v.len() - 1;
                let h = 1.0 / m as f64;
                let mut knots = vec![lo];
                for i in 1..m {
                    let x = i as f64 * h;
                    if x > lo && x < hi {
                        knots.push(x);
                    }
                }
                knots.push(hi);
                let total: f64 = knots
                    .windows(2)
                    .map(|w| 0.5 * (w[1] - w[0]) * (self.eval(basis, w[0]) + self.eval(basis, w[1])))
                    .sum();
                sign * total
            }
        }
    }

    fn lipschitz(&self) -> f64 {
        match self {
            Profile::Fourier { p0, coeffs } => {
                coeffs.iter().enumerate().map(|(k, c)| freq(k) * c.abs()).sum::<f64>() / *p0 as f64
            }
            Profile::Constant(_) => 0.0,
            Profile::Table(v) => {
                let m = (v.len() - 1) as f64;
                v.windows(2).map(|w| (w[1] - w[0]).abs() * m).fold(0.0, f64::max)
            }
        }
    }

    fn to_text(&self) -> String {
        let list = |xs: &[f64]| xs.iter().map(|x| format!("{x:.17e}")).collect::<Vec<_>>().join(" ");
        match self {
            Profile::Fourier { p0, coeffs } => format!("fourier4 {p0} {}", list(coeffs)),
            Profile::Constant(v) => format!("const {v:.17e}"),
            Profile::Table(v) => format!("table {}", list(v)),
        }
    }

    fn parse(tokens: &[&str], line: usize) -> Result<Self> {
        let err = |msg: &str| Error::Parse {
            line,
            msg: msg.to_string(),
        };
        let num = |t: &str| t.parse::<f64>().map_err(|_| err(&format!("bad number '{t}'")));
        let profile = match tokens.first() {
            Some(&"fourier4") => {
                let p0 = tokens
                    .get(1)
                    .ok_or_else(|| err("missing p0"))?
                    .parse::<usize>()
                    .map_err(|_| err("bad p0"))?;
                let coeffs = tokens[2..].iter().map(|t| num(t)).collect::<Result<Vec<_>>>()?;
                Profile::Fourier { p0, coeffs }
            }
            Some(&"const") => {
                if tokens.len() != 2 {
                    return Err(err("const takes one value"));
                }
                Profile::Constant(num(tokens[1])?)
            }
            Some(&"table") => Profile::Table(tokens[1..].iter().map(|t| num(t)).collect::<Result<Vec<_>>>()?),
            Some(other) => return Err(err(&format!("unknown profile kind '{other}'"))),
            None => return Err(err("missing profile kind")),
        };
        profile.validate().map_err(|e| err(&e.to_string()))?;
        Ok(profile)
    }
}

/// `γᶜᵒⁿᵗ(s) = scale·γ-profile(s)`, `βᶜᵒⁿᵗ(s) = scale·β-profile(s)` on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousSchedule {
    gamma: Profile,
    beta: Profile,
    scale: f64,
}

/// Which discretization maps a continuous schedule to QAOA angles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Discretization {
    Midpoint,
    Theory,
}

impl ContinuousSchedule {
    pub fn new(gamma: Profile, beta: Profile, scale: f64) -> Result<Self> {
        gamma.validate()?;
        beta.validate()?;
        if !scale.is_finite() {
            return Err(Error::InvalidArgument("scale must be finite".into()));
        }
        Ok(Self { gamma, beta, scale })
    }

    /// Fourier-IV schedule with `p₀ = K` coefficients per component.
    pub fn fourier(gamma_coeffs: Vec<f64>, beta_coeffs: Vec<f64>, scale: f64) -> Result<Self> {
        if gamma_coeffs.len() != beta_coeffs.len() {
            return Err(Error::LengthMismatch {
                gammas: gamma_coeffs.len(),
                betas: beta_coeffs.len(),
            });
        }
        let p0 = gamma_coeffs.len();
        Self::new(
            Profile::Fourier {
                p0,
                coeffs: gamma_coeffs,
            },
            Profile::Fourier {
                p0,
                coeffs: beta_coeffs,
            },
            scale,
        )
    }

    pub fn constant(gamma: f64, beta: f64) -> Result<Self> {
        Self::new(Profile::Constant(gamma), Profile::Constant(beta), 1.0)
    }

    /// Fourier fit of the `p = 17` reference angles, scaled by `Δ·p`.
    pub fn reference(delta: f64, p: usize) -> Self {
        let (g, b) = fourier_analyze(&REFERENCE_GAMMAS, &REFERENCE_BETAS).expect("reference lengths agree");
        Self::fourier(g, b, delta * p as f64).expect("reference coefficients are finite")
    }

    pub fn gamma_profile(&self) -> &Profile {
        &self.gamma
    }

    pub fn beta_profile(&self) -> &Profile {
        &self.beta
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn with_scale(&self, scale: f64) -> Self {
        Self { scale, ..self.clone() }
    }

    pub fn gamma(&self, s: f64) -> f64 {
        self.scale * self.gamma.eval(Basis::Sine, s)
    }

    pub fn beta(&self, s: f64) -> f64 {
        self.scale * self.beta.eval(Basis::Cosine, s)
    }

    pub fn integrate_gamma(&self, a: f64, b: f64) -> f64 {
        self.scale * self.gamma.integral(Basis::Sine, a, b)
    }

    pub fn integrate_beta(&self, a: f64, b: f64) -> f64 {
        self.scale * self.beta.integral(Basis::Cosine, a, b)
    }

    /// Upper bound `M_γ` on the Lipschitz constant of `γᶜᵒⁿᵗ`.
    pub fn gamma_lipschitz_bound(&self) -> f64 {
        self.scale.abs() * self.gamma.lipschitz()
    }

    pub fn beta_lipschitz_bound(&self) -> f64 {
        self.scale.abs() * self.beta.lipschitz()
    }

    /// `max |γᶜᵒⁿᵗ|` sampled on `samples + 1` equispaced points.
    pub fn gamma_max(&self, samples: usize) -> f64 {
        grid_max(samples, |s| self.gamma(s))
    }

    pub fn beta_max(&self, samples: usize) -> f64 {
        grid_max(samples, |s| self.beta(s))
    }

    pub fn discretize(&self, rule: Discretization, p: usize) -> Result<DiscreteAngles> {
        match rule {
            Discretization::Midpoint => extrapolate(self, p),
            Discretization::Theory => discretize_theory(self, p),
        }
    }

    pub fn to_text(&self) -> String {
        format!(
            "sched v1\nscale {:.17e}\ngamma {}\nbeta {}\n",
            self.scale,
            self.gamma.to_text(),
            self.beta.to_text()
        )
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        match lines.next() {
            Some((_, "sched v1")) => {}
            Some((line, _)) => {
                return Err(Error::Parse {
                    line,
                    msg: "expected 'sched v1' header".into(),
                })
            }
            None => {
                return Err(Error::Parse {
                    line: 0,
                    msg: "empty schedule file".into(),
                })
            }
        }
        let (mut scale, mut gamma, mut beta) = (None, None, None);
        for (line, l) in lines {
            let tokens: Vec<&str> = l.split_whitespace().collect();
            match tokens[0] {
                "scale" => {
                    if tokens.len() != 2 {
                        return Err(Error::Parse {
                            line,
                            msg: "scale takes one value".into(),
                        });
                    }
                    scale = Some(tokens[1].parse::<f64>().map_err(|_| Error::Parse {
                        line,
                        msg: format!("bad scale '{}'", tokens[1]),
                    })?);
                }
                "gamma" => gamma = Some(Profile::parse(&tokens[1..], line)?),
                "beta" => beta = Some(Profile::parse(&tokens[1..], line)?),
                other => {
                    return Err(Error::Parse {
                        line,
                        msg: format!("unknown key '{other}'"),
                    });
                }
            }
        }
        let missing = |what: &str| Error::Parse {
            line: 0,
            msg: format!("missing '{what}' entry"),
        };
        Self::new(
            gamma.ok_or_else(|| missing("gamma"))?,
            beta.ok_or_else(|| missing("beta"))?,
            scale.unwrap_or(1.0),
        )
    }
}

fn grid_max(samples: usize, f: impl Fn(f64) -> f64) -> f64 {
    let m = samples.max(1);
    (0..=m).map(|i| f(i as f64 / m as f64).abs()).fold(0.0, f64::max)
}

/// `S_{kt} = sin(π(k−½)(t−½)/p₀)`, an orthogonal matrix up to the factor `p₀/2`.
fn sine_iv(p0: usize, k: usize, t: usize) -> f64 {
    (freq(k) * (t as f64 + 0.5) / p0 as f64).sin()
}

fn cosine_iv(p0: usize, k: usize, t: usize) -> f64 {
    (freq(k) * (t as f64 + 0.5) / p0 as f64).cos()
}

/// Coefficients `γ̂ = 2·S·γ`, `β̂ = 2·C·β` so that `γ_t = (1/p₀)Σ_k γ̂_k S_{kt}`.
pub fn fourier_analyze(gammas: &[f64], betas: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if gammas.len() != betas.len() {
        return Err(Error::LengthMismatch {
            gammas: gammas.len(),
            betas: betas.len(),
        });
    }
    let p0 = gammas.len();
    let transform = |xs: &[f64], m: fn(usize, usize, usize) -> f64| -> Vec<f64> {
        (0..p0)
            .map(|k| 2.0 * xs.iter().enumerate().map(|(t, x)| m(p0, k, t) * x).sum::<f64>())
            .collect()
    };
    Ok((transform(gammas, sine_iv), transform(betas, cosine_iv)))
}

/// Inverse of [`fourier_analyze`] at `p₀` equal to the coefficient count.
pub fn fourier_synthesize(gamma_coeffs: &[f64], beta_coeffs: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if gamma_coeffs.len() != beta_coeffs.len() {
        return Err(Error::LengthMismatch {
            gammas: gamma_coeffs.len(),
            betas: beta_coeffs.len(),
        });
    }
    let p0 = gamma_coeffs.len();
    let transform = |cs: &[f64], m: fn(usize, usize, usize) -> f64| -> Vec<f64> {
        (0..p0)
            .map(|t| cs.iter().enumerate().map(|(k, c)| m(p0, k, t) * c).sum::<f64>() / p0 as f64)
            .collect()
    };
    Ok((transform(gamma_coeffs, sine_iv), transform(beta_coeffs, cosine_iv)))
}

fn check_layers(p: usize) -> Result<()> {
    if p == 0 {
        Err(Error::InvalidArgument("layer count must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Midpoint rule `γ_t = γᶜᵒⁿᵗ((t−½)/p)/p`, `β_t = βᶜᵒⁿᵗ((t−½)/p)/p`.
pub fn extrapolate(schedule: &ContinuousSchedule, p: usize) -> Result<DiscreteAngles> {
    check_layers(p)?;
    let pf = p as f64;
    let s = |t: usize| ((t as f64 - 0.5) / pf).min(1.0);
    let gammas = (1..=p + 1).map(|t| schedule.gamma(s(t)) / pf).collect();
    let betas = (1..=p).map(|t| schedule.beta(s(t)) / pf).collect();
    DiscreteAngles::new(gammas, betas)
}

/// Left-endpoint γ on the grid `(t−1)/(p+½)` and interval-integrated β.
pub fn discretize_theory(schedule: &ContinuousSchedule, p: usize) -> Result<DiscreteAngles> {
    check_layers(p)?;
    let w = 1.0 / (p as f64 + 0.5);
    let gammas = (1..=p + 1)
        .map(|t| schedule.gamma((t - 1) as f64 * w) / (p as f64 + 1.0))
        .collect();
    let betas = (1..=p)
        .map(|t| schedule.integrate_beta((t - 1) as f64 * w, t as f64 * w))
        .collect();
    DiscreteAngles::new(gammas, betas)
}

/// QAOA angles `γ₁..γ_{p+1}`, `β₁..β_p` together with the `Γ` and `B` sequences.
///
/// `γ_{p+1}` is a placeholder: it enters `Γ` only at the two middle slots, where it cancels.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteAngles {
    gammas: Vec<f64>,
    betas: Vec<f64>,
    big_gamma: Vec<f64>,
    big_b: Vec<f64>,
}

impl DiscreteAngles {
    /// `gammas` has `p + 1` entries, `betas` has `p`.
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if gammas.len() != betas.len() + 1 {
            return Err(Error::LengthMismatch {
                gammas: gammas.len(),
                betas: betas.len(),
            });
        }
        if gammas.iter().chain(&betas).any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite angle".into()));
        }
        let (big_gamma, big_b) = build_gamma_b(&gammas, &betas);
        Ok(Self {
            gammas,
            betas,
            big_gamma,
            big_b,
        })
    }

    /// `p` layers with a zero placeholder for `γ_{p+1}`.
    pub fn from_layers(gammas: &[f64], betas: &[f64]) -> Result<Self> {
        if gammas.len() != betas.len() {
            return Err(Error::LengthMismatch {
                gammas: gammas.len(),
                betas: betas.len(),
            });
        }
        let mut g = gammas.to_vec();
        g.push(0.0);
        Self::new(g, betas.to_vec())
    }

    pub fn p(&self) -> usize {
        self.betas.len()
    }

    /// `γ₁..γ_{p+1}`.
    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    /// `γ₁..γ_p`.
    pub fn layer_gammas(&self) -> &[f64] {
        &self.gammas[..self.p()]
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn placeholder(&self) -> f64 {
        self.gammas[self.p()]
    }

    pub fn with_placeholder(&self, value: f64) -> Result<Self> {
        let mut g = self.gammas.clone();
        let p = self.p();
        g[p] = value;
        Self::new(g, self.betas.clone())
    }

    /// `Γ₀..Γ_{2p+1}`.
    pub fn big_gamma(&self) -> &[f64] {
        &self.big_gamma
    }

    /// `B₀..B_{2p+1}`.
    pub fn big_b(&self) -> &[f64] {
        &self.big_b
    }

    /// `β̃₀..β̃_{2p+1} = (0, −β₁,…,−β_p, 0, β_p,…,β₁)`.
    pub fn beta_tilde(&self) -> Vec<f64> {
        beta_tilde(&self.betas)
    }

    /// `(Σ_{t≤p}|γ_t|, Σ|β_t|)`.
    pub fn total_angles(&self) -> (f64, f64) {
        (
            self.layer_gammas().iter().map(|g| g.abs()).sum(),
            self.betas.iter().map(|b| b.abs()).sum(),
        )
    }

    pub fn gamma_max(&self) -> f64 {
        self.layer_gammas().iter().fold(0.0, |m, g| m.max(g.abs()))
    }

    pub fn beta_max(&self) -> f64 {
        self.betas.iter().fold(0.0, |m, b| m.max(b.abs()))
    }

    /// `t,gamma,beta` rows; the last row carries the placeholder with an empty β.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,gamma,beta\n");
        for (t, g) in self.gammas.iter().enumerate() {
            match self.betas.get(t) {
                Some(b) => {
                    let _ = writeln!(out, "{},{g:.17e},{b:.17e}", t + 1);
                }
                None => {
                    let _ = writeln!(out, "{},{g:.17e},", t + 1);
                }
            }
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut gammas = Vec::new();
        let mut betas = Vec::new();
        let mut saw_header = false;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let l = raw.trim();
            if l.is_empty() {
                continue;
            }
            if !saw_header {
                if l.replace(' ', "") != "t,gamma,beta" {
                    return Err(Error::Parse {
                        line,
                        msg: "expected header 't,gamma,beta'".into(),
                    });
                }
                saw_header = true;
                continue;
            }
            let cols: Vec<&str> = l.split(',').map(str::trim).collect();
            if cols.len() != 3 {
                return Err(Error::Parse {
                    line,
                    msg: "expected three columns".into(),
                });
            }
            let bad = |what: &str| Error::Parse {
                line,
                msg: format!("bad {what}"),
            };
            let t: usize = cols[0].parse().map_err(|_| bad("t"))?;
            if t != gammas.len() + 1 {
                return Err(bad("row order"));
            }
            gammas.push(cols[1].parse::<f64>().map_err(|_| bad("gamma"))?);
            if !cols[2].is_empty() {
                if betas.len() + 1 != gammas.len() {
                    return Err(bad("beta after placeholder row"));
                }
                betas.push(cols[2].parse::<f64>().map_err(|_| bad("beta"))?);
            }
        }
        if gammas.len() == betas.len() {
            gammas.push(0.0);
        }
        Self::new(gammas, betas)
    }
}

fn beta_tilde(betas: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * betas.len() + 2);
    out.push(0.0);
    out.extend(betas.iter().map(|b| -b));
    out.push(0.0);
    out.extend(betas.iter().rev());
    out
}

/// `Γ_j = −γ_{j+1}` for `j ≤ p`, `Γ_j = γ_{2p+2−j}` above; `B_r = Σ_{s≤r} β̃_s`.
pub fn build_gamma_b(gammas: &[f64], betas: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let p = betas.len();
    let big_gamma = (0..2 * p + 2)
        .map(|j| if j <= p { -gammas[j] } else { gammas[2 * p + 1 - j] })
        .collect();
    let mut acc = 0.0;
    let mut big_b: Vec<f64> = beta_tilde(betas)
        .into_iter()
        .map(|b| {
            acc += b;
            acc
        })
        .collect();
    // the two halves cancel term by term; pin the exact zero
    big_b[2 * p + 1] = 0.0;
    (big_gamma, big_b)
}
