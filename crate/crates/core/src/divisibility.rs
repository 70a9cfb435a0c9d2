//! Decay rates of the time-local generator and Markovianity classification.
//!
//! For a mixture with transfer eigenvalues `lambda_i(t) = 1 - 2 p(t) (1 - x_i)`
//! the generator `d rho/dt = sum_i gamma_i(t) (s_i rho s_i - rho)` has
//!
//! ```text
//! gamma_i = ((1-x_j)/lambda_j + (1-x_k)/lambda_k - (1-x_i)/lambda_i) * p'/2
//! ```
//!
//! with `{j, k}` the other two axes; equivalently
//! `gamma_i = -(1/4) d/dt ln(lambda_j lambda_k / lambda_i)`. A temporarily
//! negative rate witnesses CP-indivisibility; the same conclusion is reachable
//! through the intermediate propagator's Choi positivity, and the module
//! exposes both routes plus a trace-distance monitor.

use serde::{Deserialize, Serialize};

use crate::channels::{DecoherenceFunction, PauliAxis, PauliMixture};
use crate::error::{Error, Result};
use crate::qmath::{
    eigh, trace_distance, ComplexMatrix, DensityMatrix, C64,
};

/// Default tolerance on the rate sign when classifying.
pub const DEFAULT_RATE_TOL: f64 = 1e-9;
/// Default tolerance on the Choi-positivity margins.
pub const DEFAULT_CP_TOL: f64 = 1e-10;
/// Default analysis window.
pub const DEFAULT_T_START: f64 = 0.0;
pub const DEFAULT_T_END: f64 = 1.5;
/// Default number of grid points over the analysis window.
pub const DEFAULT_GRID_POINTS: usize = 151;

/// The three decay rates at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRates {
    pub t: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
}

impl DecayRates {
    pub fn as_array(&self) -> [f64; 3] {
        [self.gamma1, self.gamma2, self.gamma3]
    }

    pub fn min_rate(&self) -> f64 {
        self.gamma1.min(self.gamma2).min(self.gamma3)
    }
}

/// Decay rates sampled along a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateTrajectory {
    pub mixture: PauliMixture,
    pub grid: Vec<f64>,
    pub rates: Vec<DecayRates>,
}

impl RateTrajectory {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

/// Overall verdict of the sign criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Markovian,
    NonMarkovian,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Markovian => write!(f, "Markovian"),
            Verdict::NonMarkovian => write!(f, "NonMarkovian"),
        }
    }
}

/// First grid point at which a rate falls below the negativity tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateWitness {
    pub t: f64,
    pub axis: PauliAxis,
}

/// Classification result; a witness is present exactly when non-Markovian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum MarkovClass {
    Markovian,
    NonMarkovian { witness: RateWitness },
}

impl MarkovClass {
    pub fn verdict(&self) -> Verdict {
        match self {
            MarkovClass::Markovian => Verdict::Markovian,
            MarkovClass::NonMarkovian { .. } => Verdict::NonMarkovian,
        }
    }

    pub fn witness(&self) -> Option<RateWitness> {
        match self {
            MarkovClass::Markovian => None,
            MarkovClass::NonMarkovian { witness } => Some(*witness),
        }
    }

    pub fn is_markovian(&self) -> bool {
        matches!(self, MarkovClass::Markovian)
    }
}

/// Choi positivity of an intermediate propagator with Bloch multipliers
/// `mu_i = lambda_i(t2) / lambda_i(t1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CpCheck {
    pub is_cp: bool,
    /// `{1 + m1 + m2 + m3, 1 + m1 - m2 - m3, 1 - m1 + m2 - m3, 1 - m1 - m2 + m3} / 4`.
    pub margins: [f64; 4],
}

/// Uniform grid of `n >= 2` points including both endpoints.
pub fn linspace(start: f64, end: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidGrid(format!("need n >= 2 points, got {n}")));
    }
    if !start.is_finite() || !end.is_finite() || start >= end {
        return Err(Error::InvalidGrid(format!(
            "need start < end, got [{start}, {end}]"
        )));
    }
    let step = (end - start) / (n - 1) as f64;
    let mut grid: Vec<f64> = (0..n).map(|i| start + step * i as f64).collect();
    grid[n - 1] = end;
    Ok(grid)
}

/// Evaluates the three decay rates of a mixture at time `t`.
pub fn decay_rates(m: &PauliMixture, t: f64) -> Result<DecayRates> {
    let p = m.decoherence().p(t)?;
    let p_dot = m.decoherence().p_dot(t)?;
    let x = m.weights().as_array();
    let mut term = [0.0f64; 3];
    for i in 0..3 {
        let lambda = 1.0 - 2.0 * (1.0 - x[i]) * p;
        if lambda <= 0.0 {
            return Err(Error::SingularDenominator(t));
        }
        term[i] = (1.0 - x[i]) / lambda;
    }
    let half_pdot = 0.5 * p_dot;
    Ok(DecayRates {
        t,
        gamma1: (term[1] + term[2] - term[0]) * half_pdot,
        gamma2: (term[0] + term[2] - term[1]) * half_pdot,
        gamma3: (term[0] + term[1] - term[2]) * half_pdot,
    })
}

/// Closed form of `gamma1` for the two-way mixture with weights `(0, 1-a, a)`:
///
/// ```text
/// gamma1 = -2 a (1-a) p (1-p) p' / ((1-2p) (1-2ap) (1-2(1-a)p))
/// ```
///
/// Algebraically identical to [`decay_rates`] restricted to `x1 = 0`, and
/// strictly negative for every `a` in (0, 1) and `t > 0`.
pub fn two_mix_gamma1(a: f64, f: &DecoherenceFunction, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::OutOfRange {
            name: "a",
            value: a,
            min: 0.0,
            max: 1.0,
        });
    }
    let p = f.p(t)?;
    let p_dot = f.p_dot(t)?;
    let denom = (1.0 - 2.0 * p) * (1.0 - 2.0 * a * p) * (1.0 - 2.0 * (1.0 - a) * p);
    if denom <= 0.0 {
        return Err(Error::SingularDenominator(t));
    }
    Ok(-2.0 * a * (1.0 - a) * p * (1.0 - p) * p_dot / denom)
}

/// Samples the decay rates on a uniform grid over `[t_start, t_end]`.
pub fn rate_trajectory(
    m: &PauliMixture,
    t_start: f64,
    t_end: f64,
    n: usize,
) -> Result<RateTrajectory> {
    if t_start < 0.0 {
        return Err(Error::NegativeTime(t_start));
    }
    rate_trajectory_on(m, &linspace(t_start, t_end, n)?)
}

/// Samples the decay rates on an explicit strictly increasing grid.
pub fn rate_trajectory_on(m: &PauliMixture, grid: &[f64]) -> Result<RateTrajectory> {
    check_grid(grid)?;
    let rates = grid
        .iter()
        .map(|&t| decay_rates(m, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(RateTrajectory {
        mixture: *m,
        grid: grid.to_vec(),
        rates,
    })
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("empty grid".into()));
    }
    if grid[0] < 0.0 {
        return Err(Error::NegativeTime(grid[0]));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidGrid("grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Non-Markovian iff any sampled rate falls below `-tol`; the witness records
/// the first offending grid point and axis.
pub fn classify(traj: &RateTrajectory, tol: f64) -> Result<MarkovClass> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    for rates in &traj.rates {
        for axis in PauliAxis::ALL {
            if rates.as_array()[axis.index() - 1] < -tol {
                return Ok(MarkovClass::NonMarkovian {
                    witness: RateWitness { t: rates.t, axis },
                });
            }
        }
    }
    Ok(MarkovClass::Markovian)
}

/// Bloch multipliers of the propagator connecting times `t1` and `t2`.
fn propagator_mu(m: &PauliMixture, t1: f64, t2: f64) -> Result<[f64; 3]> {
    let l1 = m.ptm(t1)?.as_array();
    let l2 = m.ptm(t2)?.as_array();
    let mut mu = [0.0; 3];
    for i in 0..3 {
        if l1[i] == 0.0 {
            return Err(Error::SingularDenominator(t1));
        }
        mu[i] = l2[i] / l1[i];
    }
    Ok(mu)
}

/// Checks complete positivity of the intermediate propagator via the four
/// positivity margins of a diagonal Pauli map.
pub fn propagator_cp_check(m: &PauliMixture, t1: f64, t2: f64) -> Result<CpCheck> {
    let [m1, m2, m3] = propagator_mu(m, t1, t2)?;
    let margins = [
        0.25 * (1.0 + m1 + m2 + m3),
        0.25 * (1.0 + m1 - m2 - m3),
        0.25 * (1.0 - m1 + m2 - m3),
        0.25 * (1.0 - m1 - m2 + m3),
    ];
    Ok(CpCheck {
        is_cp: margins.iter().all(|&q| q >= -DEFAULT_CP_TOL),
        margins,
    })
}

/// Choi matrix `(V ⊗ id)(|Omega><Omega|)` of the intermediate propagator,
/// with `|Omega>` the maximally entangled two-qubit state. Its eigenvalues
/// coincide with the margins of [`propagator_cp_check`].
pub fn propagator_choi(m: &PauliMixture, t1: f64, t2: f64) -> Result<ComplexMatrix> {
    let mu = propagator_mu(m, t1, t2)?;
    let mut choi = ComplexMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            let mut unit = ComplexMatrix::zeros(2, 2);
            unit.set(i, j, C64::ONE);
            let mapped = apply_diagonal_map(mu, &unit);
            let block = mapped.tensor(&unit).scale(C64::new(0.5, 0.0));
            choi = &choi + &block;
        }
    }
    Ok(choi)
}

/// Eigenvalues of the propagator's Choi matrix, ascending. Agreement with the
/// sorted margins is the cross-check between the two CP routes.
pub fn propagator_choi_eigenvalues(m: &PauliMixture, t1: f64, t2: f64) -> Result<Vec<f64>> {
    Ok(eigh(&propagator_choi(m, t1, t2)?).values)
}

/// Applies a diagonal Pauli map with Bloch multipliers `mu` to an arbitrary
/// (not necessarily Hermitian) 2x2 matrix via its Pauli decomposition.
fn apply_diagonal_map(mu: [f64; 3], mat: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(2, 2);
    for k in 0..4 {
        let sigma = crate::channels::pauli_operator(k);
        let coeff = sigma.trace_product(mat) * 0.5;
        let scaled = if k == 0 { coeff } else { coeff * mu[k - 1] };
        out = &out + &sigma.scale(scaled);
    }
    out
}

/// Trace distance between two evolving states at each grid time.
pub fn blp_monitor(
    m: &PauliMixture,
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    check_grid(grid)?;
    grid.iter()
        .map(|&t| {
            let a = m.apply(rho1, t)?;
            let b = m.apply(rho2, t)?;
            Ok((t, trace_distance(&a, &b)?))
        })
        .collect()
}
