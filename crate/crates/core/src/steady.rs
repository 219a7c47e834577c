//! Positive steady states of a system with a WR₀ realization.
//!
//! For each component with base vertex `y_b` (its smallest index) and cone
//! generator `α`, the rows `y_j − y_b` of `D` and entries `ln(α_j / α_b)` of
//! `J` describe the steady states: `x` is a positive steady state iff
//! `D ln x = J`. The solution set is `exp(z* + ker D)`.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Float, ToPrimitive};

use crate::model::PolySystem;
use crate::ratmat::{RatMatrix, Rational};
use crate::wr0::Realization;

/// Absolute tolerance on `‖Dz* − J‖∞`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SteadyError {
    #[error("rows of D are linearly dependent (rank {rank} < {rows})")]
    RankDeficient { rank: usize, rows: usize },
    #[error("residual {0:e} of Dz = J exceeds tolerance")]
    Residual(f64),
    #[error("state must have length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("state must be strictly positive")]
    NonPositiveState,
    #[error("steady-state search within the invariant polyhedron did not converge")]
    NoConvergence,
}

/// `D` (exact) and `J = ln(ratios)` stacked in component order.
#[derive(Clone, Debug, PartialEq)]
pub struct LogLinearSystem {
    pub d: RatMatrix,
    /// Exact `α_j / α_b` for every row of `D`.
    pub ratios: Vec<Rational>,
    pub j: Vec<f64>,
}

/// The positive steady-state set `exp(z* + span(kernel))`.
#[derive(Clone, Debug, PartialEq)]
pub struct SteadyStateParam {
    pub d: RatMatrix,
    pub j: Vec<f64>,
    /// Minimum-norm solution of `Dz = J`.
    pub z_star: Vec<f64>,
    /// Exact basis of `ker D`.
    pub kernel: Vec<Vec<Rational>>,
    pub residual: f64,
}

/// Exact basis of `{v : vᵀW = 0}`; each `vᵀx` is conserved along solutions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConservationBasis {
    pub vectors: Vec<Vec<Rational>>,
}

impl ConservationBasis {
    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.vectors.iter().map(|v| to_f64_vec(v)).collect()
    }
}

pub(crate) fn to_f64_vec(v: &[Rational]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
}

/// Builds `D` and `J` from a realization's components and cone generators.
pub fn build_dj(realization: &Realization) -> LogLinearSystem {
    let vertices = realization.graph.vertices();
    let dim = realization.graph.dim();
    let mut rows = Vec::new();
    let mut ratios = Vec::new();
    for (p, block) in realization.components.blocks().iter().enumerate() {
        let alpha = realization.generator(p);
        let base = block[0];
        for &j in &block[1..] {
            rows.push(vertices[base].edge_to(&vertices[j]));
            ratios.push(Rational::new(alpha[j].clone(), alpha[base].clone()));
        }
    }
    let j = ratios
        .iter()
        .map(|r| r.to_f64().unwrap_or(f64::NAN).ln())
        .collect();
    LogLinearSystem {
        d: RatMatrix::from_rows(dim, &rows),
        ratios,
        j,
    }
}

/// Solves `Dz = J` for the minimum-norm `z* = Dᵀ(DDᵀ)⁻¹J`.
pub fn solve_steady(d: &RatMatrix, j: &[f64]) -> Result<SteadyStateParam, SteadyError> {
    let rows = d.rows();
    if j.len() != rows {
        return Err(SteadyError::DimensionMismatch {
            expected: rows,
            found: j.len(),
        });
    }
    let rank = d.rank();
    if rank < rows {
        return Err(SteadyError::RankDeficient { rank, rows });
    }
    let gram = d.mul(&d.transpose());
    // (DDᵀ)⁻¹ column by column, exactly.
    let mut inverse = vec![vec![0.0; rows]; rows];
    for c in 0..rows {
        let mut e = vec![Rational::from_integer(0.into()); rows];
        e[c] = Rational::from_integer(1.into());
        let sol = gram
            .solve_exact(&e)
            .expect("Gram matrix of independent rows is invertible");
        for (r, x) in sol.particular.iter().enumerate() {
            inverse[r][c] = x.to_f64().unwrap_or(f64::NAN);
        }
    }
    let y: Vec<f64> = inverse
        .iter()
        .map(|row| row.iter().zip(j).map(|(a, b)| a * b).sum())
        .collect();
    let n = d.cols();
    let mut z_star = vec![0.0; n];
    for (r, yr) in y.iter().enumerate() {
        for (zc, dc) in z_star.iter_mut().zip(d.row(r)) {
            *zc += dc.to_f64().unwrap_or(f64::NAN) * yr;
        }
    }
    let residual = (0..rows)
        .map(|r| {
            let dz: f64 = d
                .row(r)
                .iter()
                .zip(&z_star)
                .map(|(a, z)| a.to_f64().unwrap_or(f64::NAN) * z)
                .sum();
            (dz - j[r]).abs()
        })
        .fold(0.0, f64::max);
    if residual.is_nan() || residual > RESIDUAL_TOLERANCE {
        return Err(SteadyError::Residual(residual));
    }
    Ok(SteadyStateParam {
        d: d.clone(),
        j: j.to_vec(),
        z_star,
        kernel: d.kernel_basis(),
        residual,
    })
}

/// Builds `D`, `J` and solves for the steady-state parametrization.
pub fn steady_states(realization: &Realization) -> Result<SteadyStateParam, SteadyError> {
    let dj = build_dj(realization);
    solve_steady(&dj.d, &dj.j)
}

impl SteadyStateParam {
    pub fn dim(&self) -> usize {
        self.z_star.len()
    }

    fn kernel_f64(&self) -> Vec<Vec<f64>> {
        self.kernel.iter().map(|v| to_f64_vec(v)).collect()
    }

    /// `exp(z* + Σ_k t_k b_k)` for kernel basis vectors `b_k`.
    pub fn point(&self, params: &[f64]) -> Vec<f64> {
        assert_eq!(
            params.len(),
            self.kernel.len(),
            "one parameter per kernel vector"
        );
        let basis = self.kernel_f64();
        let mut z = self.z_star.clone();
        for (t, b) in params.iter().zip(&basis) {
            for (zi, bi) in z.iter_mut().zip(b) {
                *zi += t * bi;
            }
        }
        z.into_iter().map(Float::exp).collect()
    }

    /// Points of the steady-state set with kernel parameters on the grid
    /// `{−1, 0, 1}^k`. Above four kernel dimensions only the origin and the
    /// `±1` axis points are returned.
    pub fn sample_points(&self) -> Vec<Vec<f64>> {
        let k = self.kernel.len();
        let mut params: Vec<Vec<f64>> = Vec::new();
        if k <= 4 {
            let total = 3usize.pow(k as u32);
            for code in 0..total {
                let mut c = code;
                let mut t = vec![0.0; k];
                for slot in t.iter_mut() {
                    *slot = (c % 3) as f64 - 1.0;
                    c /= 3;
                }
                params.push(t);
            }
        } else {
            params.push(vec![0.0; k]);
            for axis in 0..k {
                for s in [-1.0, 1.0] {
                    let mut t = vec![0.0; k];
                    t[axis] = s;
                    params.push(t);
                }
            }
        }
        params.iter().map(|t| self.point(t)).collect()
    }

    /// The unique steady state in the invariant polyhedron `(x0 + S) ∩ R^n_>`.
    ///
    /// `ker D` is `S⊥`, so the steady state is `exp(z* + Bt)` with `t` chosen
    /// so that `Bᵀx = Bᵀx0`. That `t` minimizes the strictly convex
    /// `φ(t) = Σ_i exp(z*_i + (Bt)_i) − (Bᵀx0)ᵀt`; damped Newton finds it.
    pub fn steady_state_in_polyhedron(&self, x0: &[f64]) -> Result<Vec<f64>, SteadyError> {
        let n = self.dim();
        if x0.len() != n {
            return Err(SteadyError::DimensionMismatch {
                expected: n,
                found: x0.len(),
            });
        }
        if x0.iter().any(|&x| x.is_nan() || x <= 0.0) {
            return Err(SteadyError::NonPositiveState);
        }
        let basis = self.kernel_f64();
        let k = basis.len();
        if k == 0 {
            return Ok(self.point(&[]));
        }
        let target: Vec<f64> = basis.iter().map(|b| dot(b, x0)).collect();
        let scale = target.iter().fold(1.0f64, |a, c| a.max(c.abs()));
        let objective = |t: &[f64]| -> f64 {
            let x = self.point(t);
            x.iter().sum::<f64>() - dot(&target, t)
        };

        let mut t = vec![0.0; k];
        let mut value = objective(&t);
        for _ in 0..500 {
            let x = self.point(&t);
            let grad: Vec<f64> = basis
                .iter()
                .zip(&target)
                .map(|(b, c)| dot(b, &x) - c)
                .collect();
            if grad.iter().all(|g| g.abs() <= 1e-13 * scale) {
                return Ok(x);
            }
            let hessian: Vec<Vec<f64>> = basis
                .iter()
                .map(|a| {
                    basis
                        .iter()
                        .map(|b| {
                            a.iter()
                                .zip(b)
                                .zip(&x)
                                .map(|((ai, bi), xi)| ai * bi * xi)
                                .sum()
                        })
                        .collect()
                })
                .collect();
            let neg_grad: Vec<f64> = grad.iter().map(|g| -g).collect();
            let Some(step) = solve_dense(hessian, neg_grad) else {
                return Err(SteadyError::NoConvergence);
            };
            let slope = dot(&grad, &step);
            let mut alpha = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                let trial: Vec<f64> = t.iter().zip(&step).map(|(a, s)| a + alpha * s).collect();
                let trial_value = objective(&trial);
                if trial_value.is_finite() && trial_value <= value + 1e-4 * alpha * slope {
                    t = trial;
                    value = trial_value;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !accepted {
                // No further decrease representable: accept if the gradient is small.
                let x = self.point(&t);
                let g = basis
                    .iter()
                    .zip(&target)
                    .map(|(b, c)| (dot(b, &x) - c).abs())
                    .fold(0.0, f64::max);
                return if g <= 1e-9 * scale {
                    Ok(x)
                } else {
                    Err(SteadyError::NoConvergence)
                };
            }
        }
        Err(SteadyError::NoConvergence)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting; `None` if singular.
pub(crate) fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col] == 0.0 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let (top, rest) = a.split_at_mut(col + 1);
        let pivot_row = &top[col];
        for (k, target) in rest.iter_mut().enumerate() {
            let f = target[col] / pivot_row[col];
            if f == 0.0 {
                continue;
            }
            for (t, p) in target[col..].iter_mut().zip(&pivot_row[col..]) {
                *t -= f * p;
            }
            b[col + 1 + k] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Per-vertex out-flux minus in-flux, `Σ_j κ_ij x^{y_i} − Σ_j κ_ji x^{y_j}`.
/// Zero at a complex-balanced steady state.
pub fn complex_balance_residual(realization: &Realization, x: &[f64]) -> Vec<f64> {
    let graph = &realization.graph;
    let monomials: Vec<f64> = graph.vertices().iter().map(|v| v.monomial(x)).collect();
    let mut residual = vec![0.0; graph.vertices().len()];
    for e in graph.edges() {
        let flux = e.kappa.to_f64().unwrap_or(f64::NAN) * monomials[e.from];
        residual[e.from] += flux;
        residual[e.to] -= flux;
    }
    residual
}

/// Basis of the left kernel of `W`, integer-primitive.
pub fn conservation_laws(system: &PolySystem) -> ConservationBasis {
    ConservationBasis {
        vectors: system.net_matrix().transpose().kernel_basis(),
    }
}
