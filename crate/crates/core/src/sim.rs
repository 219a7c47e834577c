//! Numerical integration and certification of the predicted dynamics.
//!
//! The integrator is the Dormand–Prince 5(4) pair with the usual step-size
//! controller. Certification integrates, locates the steady state of the
//! starting point's invariant polyhedron, and checks the Lyapunov function
//! `L(x) = Σ x_i (ln x_i − ln x*_i − 1)` along the accepted steps.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::model::{FloatField, PolySystem};
use crate::steady::{conservation_laws, steady_states, to_f64_vec, SteadyError};
use crate::wr0::Realization;

#[derive(Clone, Debug, PartialEq)]
pub struct IntegrateOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Integration aborts once a coordinate of an accepted state drops below this.
    pub positivity_floor: f64,
    pub max_steps: usize,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            positivity_floor: 1e-12,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Accepted steps of a solution, starting with the initial state.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub stats: StepStats,
}

impl Trajectory {
    pub fn terminal_state(&self) -> &[f64] {
        self.states
            .last()
            .expect("a trajectory holds its initial state")
    }

    pub fn terminal_time(&self) -> f64 {
        *self
            .times
            .last()
            .expect("a trajectory holds its initial time")
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("initial state must be strictly positive")]
    NonPositiveInitial,
    #[error("relative tolerance {0:e} is outside (1e-12, 1e-2)")]
    InvalidTolerance(f64),
    #[error("end time must be positive and finite, got {0}")]
    InvalidHorizon(f64),
    #[error("state has length {found}, system has dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("positivity lost at t = {time}")]
    PositivityViolated { time: f64, state: Vec<f64> },
    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),
    #[error("step limit reached at t = {0}")]
    TooManySteps(f64),
}

// Dormand–Prince 5(4) tableau. The system is autonomous, so the nodes are unused.
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Fifth-order weights minus fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `sys` from `x0` over `[0, t_end]` with default tolerances
/// apart from `rel_tol`.
pub fn integrate(
    sys: &PolySystem,
    x0: &[f64],
    t_end: f64,
    rel_tol: f64,
) -> Result<Trajectory, SimError> {
    let options = IntegrateOptions {
        rel_tol,
        ..IntegrateOptions::default()
    };
    integrate_with(sys, x0, t_end, &options)
}

pub fn integrate_with(
    sys: &PolySystem,
    x0: &[f64],
    t_end: f64,
    options: &IntegrateOptions,
) -> Result<Trajectory, SimError> {
    let n = sys.dim();
    if x0.len() != n {
        return Err(SimError::DimensionMismatch {
            expected: n,
            found: x0.len(),
        });
    }
    if x0.iter().any(|&x| x.is_nan() || x <= 0.0 || !x.is_finite()) {
        return Err(SimError::NonPositiveInitial);
    }
    if !(options.rel_tol > 1e-12 && options.rel_tol < 1e-2) {
        return Err(SimError::InvalidTolerance(options.rel_tol));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(SimError::InvalidHorizon(t_end));
    }

    let field = FloatField::new(sys);
    let mut stats = StepStats::default();

    let mut times = vec![0.0];
    let mut states = vec![x0.to_vec()];
    let mut t = 0.0;
    let mut x = x0.to_vec();
    let mut k: [Vec<f64>; 7] = core::array::from_fn(|_| vec![0.0; n]);
    field.eval_into(&x, &mut k[0]);
    stats.evaluations += 1;

    let scale = |a: f64, b: f64| options.abs_tol + options.rel_tol * a.abs().max(b.abs());
    let mut h = initial_step(&x, &k[0], t_end, options, &field, &mut stats);
    let mut stage = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut previous_error: f64 = 1e-4;
    let mut steps = 0usize;

    while t < t_end {
        if steps >= options.max_steps {
            return Err(SimError::TooManySteps(t));
        }
        steps += 1;
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        if h.is_nan() || h <= 16.0 * f64::EPSILON * t.abs() {
            return Err(SimError::StepUnderflow(t));
        }

        for s in 1..7 {
            for i in 0..n {
                let mut acc = x[i];
                for (r, a) in A[s][..s].iter().enumerate() {
                    acc += h * a * k[r][i];
                }
                stage[i] = acc;
            }
            if s == 6 {
                next.copy_from_slice(&stage);
            }
            field.eval_into(&stage, &mut k[s]);
            stats.evaluations += 1;
        }

        let mut err_sq = 0.0;
        let mut finite = true;
        for i in 0..n {
            let e: f64 = (0..7).map(|s| E[s] * k[s][i]).sum::<f64>() * h;
            let r = e / scale(x[i], next[i]);
            err_sq += r * r;
            finite &= next[i].is_finite();
        }
        let err = if finite {
            Float::sqrt(err_sq / n as f64)
        } else {
            f64::INFINITY
        };

        if err <= 1.0 {
            stats.accepted += 1;
            t = if last { t_end } else { t + h };
            core::mem::swap(&mut x, &mut next);
            // First-same-as-last: the seventh stage is f at the new state.
            k.swap(0, 6);
            if x.iter().any(|&v| v < options.positivity_floor) {
                return Err(SimError::PositivityViolated { time: t, state: x });
            }
            times.push(t);
            states.push(x.clone());
            // PI controller with the customary exponents for this pair.
            let factor = if err == 0.0 {
                5.0
            } else {
                0.9 * Float::powf(err, -0.17) * Float::powf(previous_error, 0.04)
            };
            h *= factor.clamp(0.2, 5.0);
            previous_error = err.max(1e-4);
        } else {
            stats.rejected += 1;
            let factor = if err.is_finite() {
                (0.9 * Float::powf(err, -0.2)).max(0.2)
            } else {
                0.1
            };
            h *= factor;
        }
    }

    Ok(Trajectory {
        times,
        states,
        stats,
    })
}

/// Starting step from the standard two-evaluation estimate.
fn initial_step(
    x: &[f64],
    f0: &[f64],
    t_end: f64,
    options: &IntegrateOptions,
    field: &FloatField,
    stats: &mut StepStats,
) -> f64 {
    let n = x.len() as f64;
    let sc: Vec<f64> = x
        .iter()
        .map(|v| options.abs_tol + options.rel_tol * v.abs())
        .collect();
    let rms = |v: &[f64]| {
        Float::sqrt(
            v.iter()
                .zip(&sc)
                .map(|(a, s)| (a / s) * (a / s))
                .sum::<f64>()
                / n,
        )
    };
    let d0 = rms(x);
    let d1 = rms(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(t_end);
    let x1: Vec<f64> = x.iter().zip(f0).map(|(a, b)| a + h0 * b).collect();
    let mut f1 = vec![0.0; x.len()];
    field.eval_into(&x1, &mut f1);
    stats.evaluations += 1;
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = rms(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        Float::powf(0.01 / d1.max(d2), 1.0 / 5.0)
    };
    (100.0 * h0).min(h1).min(t_end)
}

/// `Σ x_i (ln x_i − ln x*_i − 1)`.
pub fn lyapunov_value(x: &[f64], x_star: &[f64]) -> f64 {
    x.iter()
        .zip(x_star)
        .map(|(&xi, &si)| xi * (Float::ln(xi) - Float::ln(si) - 1.0))
        .sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertifyOptions {
    pub integrate: IntegrateOptions,
    /// Largest terminal distance `‖x(t_end) − x*‖∞` counted as converged.
    pub convergence_tol: f64,
    /// Allowed increase of `L` between accepted steps, relative to `|L(x0)|`.
    pub monotone_slack: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            integrate: IntegrateOptions::default(),
            convergence_tol: 1e-4,
            monotone_slack: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificationReport {
    pub lyapunov_monotone: bool,
    /// Largest step-to-step increase of `L`, or 0 if it never increased.
    pub max_lyapunov_increase: f64,
    /// Per conservation law `v`, `max_t |vᵀ(x(t) − x0)|`.
    pub conservation_drift: Vec<f64>,
    pub terminal_distance: f64,
    pub converged: bool,
    pub x_star: Vec<f64>,
    pub terminal_state: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certification {
    pub trajectory: Trajectory,
    /// `L(x(t))` at every accepted step.
    pub lyapunov: Vec<f64>,
    pub conservation_laws: Vec<Vec<f64>>,
    pub report: CertificationReport,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum CertifyError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Steady(#[from] SteadyError),
}

pub fn certify(
    sys: &PolySystem,
    realization: &Realization,
    x0: &[f64],
    t_end: f64,
) -> Result<Certification, CertifyError> {
    certify_with(sys, realization, x0, t_end, &CertifyOptions::default())
}

pub fn certify_with(
    sys: &PolySystem,
    realization: &Realization,
    x0: &[f64],
    t_end: f64,
    options: &CertifyOptions,
) -> Result<Certification, CertifyError> {
    let trajectory = integrate_with(sys, x0, t_end, &options.integrate)?;
    let x_star = steady_states(realization)?.steady_state_in_polyhedron(x0)?;

    let lyapunov: Vec<f64> = trajectory
        .states
        .iter()
        .map(|x| lyapunov_value(x, &x_star))
        .collect();
    let slack = options.monotone_slack * lyapunov[0].abs();
    let max_increase = lyapunov.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);

    let laws: Vec<Vec<f64>> = conservation_laws(sys)
        .vectors
        .iter()
        .map(|v| to_f64_vec(v))
        .collect();
    let conservation_drift = laws
        .iter()
        .map(|v| {
            trajectory
                .states
                .iter()
                .map(|x| {
                    v.iter()
                        .zip(x.iter().zip(x0))
                        .map(|(vi, (xi, x0i))| vi * (xi - x0i))
                        .sum::<f64>()
                        .abs()
                })
                .fold(0.0, f64::max)
        })
        .collect();

    let terminal_state = trajectory.terminal_state().to_vec();
    let terminal_distance = terminal_state
        .iter()
        .zip(&x_star)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let report = CertificationReport {
        lyapunov_monotone: max_increase <= slack,
        max_lyapunov_increase: max_increase,
        conservation_drift,
        terminal_distance,
        converged: terminal_distance < options.convergence_tol,
        x_star,
        terminal_state,
    };
    Ok(Certification {
        trajectory,
        lyapunov,
        conservation_laws: laws,
        report,
    })
}
