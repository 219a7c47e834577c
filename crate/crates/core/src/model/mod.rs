//! Polynomial systems `dx/dt = Σ x^{y_i} w_i` and weighted E-graphs.
//!
//! Both kinds of object keep their vertices (exponent vectors) in a single
//! canonical order: descending lexicographic, so `x1` sorts before `x2^2`
//! which sorts before `x3^2`. Indices reported anywhere in this crate refer
//! to that order.

mod graph;
mod parse;

pub use graph::{dynamically_equivalent, ComponentPartition, Deficiency, Edge, WeightedEGraph};
pub use parse::{parse_system, Parsed};

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt::{self, Write};

use num_traits::{Signed, ToPrimitive, Zero};

use crate::ratmat::{RatMatrix, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("inconsistent variable count: {0}")]
    InconsistentVariables(String),
    #[error("system is empty after merging monomials")]
    EmptySystem,
    #[error("state dimension must be at least 1")]
    ZeroDimension,
    #[error("expected a vector of length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("edge {from} -> {to} has non-positive weight")]
    NonPositiveWeight { from: Vertex, to: Vertex },
    #[error("duplicate edge {from} -> {to}")]
    DuplicateEdge { from: Vertex, to: Vertex },
    #[error("vertex index {0} out of range")]
    VertexIndex(usize),
    #[error("vertex {0} has no incident edge")]
    IsolatedVertex(Vertex),
    #[error("Kirchhoff kernel does not match the terminal strongly connected components")]
    KernelSupportMismatch,
}

/// A point of `Z^n_≥`: the exponent vector of a monomial.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Vertex(Vec<u32>);

impl Vertex {
    pub fn new(exponents: Vec<u32>) -> Self {
        Vertex(exponents)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `self` as a rational vector.
    pub fn to_rational(&self) -> Vec<Rational> {
        self.0
            .iter()
            .map(|&e| Rational::from_integer(e.into()))
            .collect()
    }

    /// The edge vector `to - self`.
    pub fn edge_to(&self, to: &Vertex) -> Vec<Rational> {
        self.0
            .iter()
            .zip(&to.0)
            .map(|(&a, &b)| Rational::from_integer((i64::from(b) - i64::from(a)).into()))
            .collect()
    }

    /// Evaluates the monomial `x^self`.
    pub fn monomial(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).fold(1.0, |acc, (&e, &xi)| {
            acc * num_traits::Float::powi(xi, e as i32)
        })
    }

    /// Canonical vertex order: descending lexicographic on exponents.
    pub fn canonical_cmp(&self, other: &Vertex) -> Ordering {
        other.0.cmp(&self.0)
    }
}

/// Renders as a monomial, e.g. `x1*x3^2`; the origin renders as `1`.
impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_char('*')?;
            }
            first = false;
            write!(f, "x{}", i + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        if first {
            f.write_char('1')?;
        }
        Ok(())
    }
}

/// The pair `(Y_s, W)`: distinct source monomials and their nonzero
/// coefficient (net direction) vectors.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolySystem {
    dim: usize,
    sources: Vec<Vertex>,
    net_vectors: Vec<Vec<Rational>>,
}

impl PolySystem {
    /// Builds a system from `(monomial, coefficient vector)` terms.
    ///
    /// Terms with equal monomials are merged by adding coefficients. Monomials
    /// whose merged vector is zero are dropped and returned alongside the
    /// system.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<(PolySystem, Vec<Vertex>), ModelError>
    where
        I: IntoIterator<Item = (Vertex, Vec<Rational>)>,
    {
        if dim == 0 {
            return Err(ModelError::ZeroDimension);
        }
        let mut merged: BTreeMap<Vertex, Vec<Rational>> = BTreeMap::new();
        for (vertex, coeffs) in terms {
            if vertex.dim() != dim {
                return Err(ModelError::DimensionMismatch {
                    expected: dim,
                    found: vertex.dim(),
                });
            }
            if coeffs.len() != dim {
                return Err(ModelError::DimensionMismatch {
                    expected: dim,
                    found: coeffs.len(),
                });
            }
            let slot = merged
                .entry(vertex)
                .or_insert_with(|| vec![Rational::zero(); dim]);
            for (s, c) in slot.iter_mut().zip(coeffs) {
                *s += c;
            }
        }
        let mut dropped = Vec::new();
        let mut sources = Vec::new();
        let mut net_vectors = Vec::new();
        // BTreeMap iterates ascending; canonical order is descending.
        for (vertex, w) in merged.into_iter().rev() {
            if w.iter().all(Zero::is_zero) {
                dropped.push(vertex);
            } else {
                sources.push(vertex);
                net_vectors.push(w);
            }
        }
        if sources.is_empty() {
            return Err(ModelError::EmptySystem);
        }
        Ok((
            PolySystem {
                dim,
                sources,
                net_vectors,
            },
            dropped,
        ))
    }

    /// Builds a system from monomial exponent vectors and the matching
    /// columns of `W`.
    pub fn from_columns(
        dim: usize,
        monomials: Vec<Vec<u32>>,
        columns: Vec<Vec<Rational>>,
    ) -> Result<(PolySystem, Vec<Vertex>), ModelError> {
        if monomials.len() != columns.len() {
            return Err(ModelError::DimensionMismatch {
                expected: monomials.len(),
                found: columns.len(),
            });
        }
        Self::from_terms(dim, monomials.into_iter().map(Vertex::new).zip(columns))
    }

    /// The zero vector field, which has no source monomials.
    pub(crate) fn zero_field(dim: usize) -> PolySystem {
        PolySystem {
            dim,
            sources: Vec::new(),
            net_vectors: Vec::new(),
        }
    }

    /// Assumes sources are canonical, distinct and paired with nonzero vectors.
    pub(crate) fn from_canonical(
        dim: usize,
        sources: Vec<Vertex>,
        net_vectors: Vec<Vec<Rational>>,
    ) -> PolySystem {
        debug_assert!(sources
            .windows(2)
            .all(|w| w[0].canonical_cmp(&w[1]) == Ordering::Less));
        PolySystem {
            dim,
            sources,
            net_vectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of source monomials `m`.
    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    pub fn sources(&self) -> &[Vertex] {
        &self.sources
    }

    pub fn net_vectors(&self) -> &[Vec<Rational>] {
        &self.net_vectors
    }

    /// Index of a source monomial, if present.
    pub fn source_index(&self, vertex: &Vertex) -> Option<usize> {
        self.sources
            .binary_search_by(|probe| probe.canonical_cmp(vertex))
            .ok()
    }

    /// `Y_s`: n × m matrix whose columns are the source exponent vectors.
    pub fn source_matrix(&self) -> RatMatrix {
        let cols: Vec<Vec<Rational>> = self.sources.iter().map(Vertex::to_rational).collect();
        RatMatrix::from_columns(self.dim, &cols)
    }

    /// `W`: n × m matrix whose columns are the net direction vectors.
    pub fn net_matrix(&self) -> RatMatrix {
        RatMatrix::from_columns(self.dim, &self.net_vectors)
    }

    /// The system with each column scaled, `w_i ← a_i w_i`.
    pub fn scaled(&self, factors: &[Rational]) -> PolySystem {
        assert_eq!(factors.len(), self.len(), "one factor per source");
        assert!(
            factors.iter().all(Signed::is_positive),
            "factors must be positive"
        );
        let net_vectors = self
            .net_vectors
            .iter()
            .zip(factors)
            .map(|(w, a)| w.iter().map(|x| x * a).collect())
            .collect();
        PolySystem {
            dim: self.dim,
            sources: self.sources.clone(),
            net_vectors,
        }
    }

    /// Floating-point evaluation of the vector field.
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        FloatField::new(self).eval(x)
    }

    /// Renders the system in the text grammar accepted by [`parse_system`].
    pub fn render(&self) -> String {
        let mut out = String::new();
        for k in 0..self.dim {
            let _ = write!(out, "dx{}/dt =", k + 1);
            let mut first = true;
            for (vertex, w) in self.sources.iter().zip(&self.net_vectors) {
                let c = &w[k];
                if c.is_zero() {
                    continue;
                }
                let sign = if c.is_negative() { "-" } else { "+" };
                if first {
                    if c.is_negative() {
                        out.push_str(" -");
                    }
                } else {
                    let _ = write!(out, " {sign}");
                }
                first = false;
                if vertex.exponents().iter().all(|&e| e == 0) {
                    let _ = write!(out, " {}", c.abs());
                } else {
                    let _ = write!(out, " {}*{}", c.abs(), vertex);
                }
            }
            if first {
                out.push_str(" 0");
            }
            out.push('\n');
        }
        out
    }
}

/// Floating-point copy of a polynomial system for fast evaluation.
#[derive(Clone, Debug)]
pub struct FloatField {
    dim: usize,
    exponents: Vec<Vec<i32>>,
    coefficients: Vec<Vec<f64>>,
}

impl FloatField {
    pub fn new(system: &PolySystem) -> Self {
        FloatField {
            dim: system.dim,
            exponents: system
                .sources
                .iter()
                .map(|v| v.exponents().iter().map(|&e| e as i32).collect())
                .collect(),
            coefficients: system
                .net_vectors
                .iter()
                .map(|w| w.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect())
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn monomials(&self, x: &[f64]) -> Vec<f64> {
        self.exponents
            .iter()
            .map(|ex| {
                ex.iter()
                    .zip(x)
                    .fold(1.0, |acc, (&e, &xi)| acc * num_traits::Float::powi(xi, e))
            })
            .collect()
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (ex, w) in self.exponents.iter().zip(&self.coefficients) {
            let mono = ex
                .iter()
                .zip(x)
                .fold(1.0, |acc, (&e, &xi)| acc * num_traits::Float::powi(xi, e));
            for (o, c) in out.iter_mut().zip(w) {
                *o += c * mono;
            }
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(x, &mut out);
        out
    }

    /// Largest single-term flux `max_i |w_i| x^{y_i}`, used to scale residuals.
    pub fn flux_scale(&self, x: &[f64]) -> f64 {
        self.monomials(x)
            .iter()
            .zip(&self.coefficients)
            .map(|(m, w)| w.iter().fold(0.0f64, |a, c| a.max((c * m).abs())))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratmat::{rat, rat_vec};

    #[test]
    fn vertex_display() {
        assert_eq!(alloc::format!("{}", Vertex::new(vec![1, 0, 2])), "x1*x3^2");
        assert_eq!(alloc::format!("{}", Vertex::new(vec![0, 0])), "1");
    }

    #[test]
    fn terms_merge_and_sort() {
        let terms = vec![
            (Vertex::new(vec![0]), rat_vec(&[1])),
            (Vertex::new(vec![1]), rat_vec(&[-1])),
            (Vertex::new(vec![2]), rat_vec(&[3])),
            (Vertex::new(vec![2]), rat_vec(&[-3])),
        ];
        let (sys, dropped) = PolySystem::from_terms(1, terms).unwrap();
        assert_eq!(sys.sources(), &[Vertex::new(vec![1]), Vertex::new(vec![0])]);
        assert_eq!(sys.net_vectors(), &[rat_vec(&[-1]), rat_vec(&[1])]);
        assert_eq!(dropped, vec![Vertex::new(vec![2])]);
        assert_eq!(sys.source_index(&Vertex::new(vec![0])), Some(1));
        assert_eq!(sys.source_index(&Vertex::new(vec![5])), None);
    }

    #[test]
    fn empty_after_merge() {
        let terms = vec![
            (Vertex::new(vec![1]), rat_vec(&[1])),
            (Vertex::new(vec![1]), rat_vec(&[-1])),
        ];
        assert_eq!(
            PolySystem::from_terms(1, terms),
            Err(ModelError::EmptySystem)
        );
    }

    #[test]
    fn eval_matches_polynomial() {
        let (sys, _) = PolySystem::from_terms(
            2,
            vec![
                (Vertex::new(vec![0, 0]), rat_vec(&[6, 6])),
                (Vertex::new(vec![2, 0]), rat_vec(&[-10, 10])),
            ],
        )
        .unwrap();
        let f = sys.eval(&[2.0, 3.0]);
        assert_eq!(f, vec![6.0 - 40.0, 6.0 + 40.0]);
        let scaled = sys.scaled(&[rat(2), rat(1)]);
        assert_eq!(scaled.net_vectors()[0], rat_vec(&[-20, 20]));
    }
}
