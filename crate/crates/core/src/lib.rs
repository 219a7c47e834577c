//! Weakly reversible deficiency-zero realizations of polynomial dynamical
//! systems `dx/dt = Σ_i x^{y_i} w_i`.
//!
//! The crate is `no_std` and needs only `alloc`. Exact linear algebra runs
//! over big rationals; only steady-state coordinates and simulation use `f64`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cone;
pub mod model;
#[cfg(feature = "random")]
pub mod random;
pub mod ratmat;
pub mod sim;
pub mod steady;
pub mod wr0;

pub use cone::{extreme_rays, is_consistent, supports_partition, ConeRays};
pub use model::{
    dynamically_equivalent, parse_system, ComponentPartition, Deficiency, Edge, ModelError,
    PolySystem, Vertex, WeightedEGraph,
};
pub use ratmat::{RatMatrix, Rational};
pub use sim::{certify, integrate, lyapunov_value, CertificationReport, SimError, Trajectory};
pub use steady::{
    build_dj, complex_balance_residual, conservation_laws, solve_steady, steady_states,
    ConservationBasis, SteadyError, SteadyStateParam,
};
pub use wr0::{find_wr0, FailureReason, Realization};
