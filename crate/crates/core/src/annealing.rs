//! Linear-time annealing `i dψ/du = (γᶜᵒⁿᵗ(u)·C + βᶜᵒⁿᵗ(u)·B)ψ` on `u ∈ [0, 1]`.
//!
//! Integrated with Strang splitting, coefficients sampled at step midpoints. The step
//! count doubles from [`INITIAL_STEPS`] until the energy density settles within `tol`.

use crate::error::{Error, Result};
use crate::schedules::ContinuousSchedule;
use crate::sk::CostVector;
use crate::statevector::StateVector;

pub const INITIAL_STEPS: usize = 64;
pub const MAX_STEPS: usize = 1 << 20;

/// Output of an adaptive [`evolve`] run.
#[derive(Debug, Clone)]
pub struct Annealed {
    pub state: StateVector,
    pub energy: f64,
    /// Step count of the returned (finer) state.
    pub steps: usize,
    /// Energy change between the last two refinements.
    pub residual: f64,
}

/// Strang splitting with a fixed number of steps.
pub fn evolve_fixed(costs: &CostVector, schedule: &ContinuousSchedule, steps: usize) -> Result<StateVector> {
    if steps == 0 {
        return Err(Error::InvalidArgument("step count must be positive".into()));
    }
    let h = 1.0 / steps as f64;
    let mut state = StateVector::plus_state(costs.n())?;
    let mid = |m: usize| (m as f64 + 0.5) * h;
    // consecutive half-phases are merged into one diagonal step
    let mut pending = 0.5 * h * schedule.gamma(mid(0));
    for m in 0..steps {
        state.apply_phase(costs, pending)?;
        state.apply_mixer(h * schedule.beta(mid(m)));
        let half = 0.5 * h * schedule.gamma(mid(m));
        pending = if m + 1 < steps {
            half + 0.5 * h * schedule.gamma(mid(m + 1))
        } else {
            half
        };
    }
    state.apply_phase(costs, pending)?;
    Ok(state)
}

/// Doubles the step count until successive energy densities differ by less than `tol`.
pub fn evolve(costs: &CostVector, schedule: &ContinuousSchedule, tol: f64) -> Result<Annealed> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let mut steps = INITIAL_STEPS;
    let mut prev = costs.energy_density(&evolve_fixed(costs, schedule, steps)?)?;
    let mut residual = f64::INFINITY;
    while steps < MAX_STEPS {
        steps *= 2;
        let state = evolve_fixed(costs, schedule, steps)?;
        let energy = costs.energy_density(&state)?;
        residual = (energy - prev).abs();
        if residual < tol {
            return Ok(Annealed {
                state,
                energy,
                steps,
                residual,
            });
        }
        prev = energy;
    }
    Err(Error::AnnealingNotConverged { steps, residual })
}

/// Energy density of the converged annealing state.
pub fn annealing_energy(costs: &CostVector, schedule: &ContinuousSchedule, tol: f64) -> Result<f64> {
    Ok(evolve(costs, schedule, tol)?.energy)
}
