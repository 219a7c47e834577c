//! JSON, DOT, CSV and plain-text renderings of results.
//!
//! Exact values are written as strings (`"7"`, `"55/2"`); floating-point
//! values as JSON numbers.

use std::fmt::Write as _;

use serde::Serialize;
use wr0_core::cone::ConeRays;
use wr0_core::model::PolySystem;
use wr0_core::ratmat::RatMatrix;
use wr0_core::sim::Certification;
use wr0_core::steady::SteadyStateParam;
use wr0_core::wr0::{FailureReason, Realization};

fn strings<T: ToString>(values: &[T]) -> Vec<String> {
    values.iter().map(ToString::to_string).collect()
}

fn matrix_rows(m: &RatMatrix) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| strings(m.row(i))).collect()
}

#[derive(Serialize)]
pub struct CheckJson {
    pub n: usize,
    pub m: usize,
    pub monomials: Vec<Vec<u32>>,
    pub consistent: bool,
    pub rays: Vec<Vec<String>>,
    /// Ray supports when they partition the monomials.
    pub partition: Option<Vec<Vec<usize>>>,
}

impl CheckJson {
    pub fn new(
        system: &PolySystem,
        rays: &ConeRays,
        consistent: bool,
        partition: Option<Vec<Vec<usize>>>,
    ) -> Self {
        CheckJson {
            n: system.dim(),
            m: system.len(),
            monomials: system
                .sources()
                .iter()
                .map(|v| v.exponents().to_vec())
                .collect(),
            consistent,
            rays: rays.rays().iter().map(|r| strings(r)).collect(),
            partition,
        }
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "n = {}, m = {}", self.n, self.m);
        let _ = writeln!(s, "consistent: {}", self.consistent);
        for r in &self.rays {
            let _ = writeln!(s, "ray: ({})", r.join(", "));
        }
        match &self.partition {
            Some(blocks) => {
                let _ = writeln!(s, "partition: {}", blocks_text(blocks));
            }
            None => {
                let _ = writeln!(s, "partition: none");
            }
        }
        s
    }
}

fn blocks_text(blocks: &[Vec<usize>]) -> String {
    let inner: Vec<String> = blocks
        .iter()
        .map(|b| format!("{{{}}}", strings(b).join(", ")))
        .collect();
    inner.join(" ")
}

#[derive(Serialize)]
pub struct EdgeJson {
    pub from: usize,
    pub to: usize,
    pub kappa: String,
}

#[derive(Serialize)]
pub struct RealizationJson {
    pub vertices: Vec<Vec<u32>>,
    pub edges: Vec<EdgeJson>,
    pub components: Vec<Vec<usize>>,
    pub deficiency: usize,
}

impl RealizationJson {
    pub fn new(r: &Realization) -> Self {
        RealizationJson {
            vertices: r
                .graph
                .vertices()
                .iter()
                .map(|v| v.exponents().to_vec())
                .collect(),
            edges: r
                .graph
                .edges()
                .iter()
                .map(|e| EdgeJson {
                    from: e.from,
                    to: e.to,
                    kappa: e.kappa.to_string(),
                })
                .collect(),
            components: r.components.blocks().to_vec(),
            deficiency: r.deficiency,
        }
    }
}

pub fn realization_text(r: &Realization) -> String {
    let v = r.graph.vertices();
    let mut s = String::new();
    for e in r.graph.edges() {
        let _ = writeln!(s, "{} -> {}  kappa = {}", v[e.from], v[e.to], e.kappa);
    }
    let _ = writeln!(s, "components: {}", blocks_text(r.components.blocks()));
    let _ = writeln!(s, "deficiency: {}", r.deficiency);
    s
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// A DOT digraph with monomial vertex labels and weight edge labels.
pub fn realization_dot(r: &Realization) -> String {
    let mut s = String::from("digraph wr0 {\n");
    for (i, v) in r.graph.vertices().iter().enumerate() {
        let _ = writeln!(s, "  v{i} [label=\"{}\"];", dot_escape(&v.to_string()));
    }
    for e in r.graph.edges() {
        let _ = writeln!(s, "  v{} -> v{} [label=\"{}\"];", e.from, e.to, e.kappa);
    }
    s.push_str("}\n");
    s
}

#[derive(Serialize)]
pub struct FailureJson {
    pub reason: &'static str,
    pub detail: FailureDetail,
}

#[derive(Serialize)]
pub struct FailureDetail {
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source_index: Option<usize>,
    /// Exponent vector of the failing source monomial.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monomial: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub component: Option<usize>,
    pub rays: Vec<Vec<String>>,
}

impl FailureJson {
    pub fn new(system: &PolySystem, reason: &FailureReason, rays: &ConeRays) -> Self {
        let (name, source_index, component) = match *reason {
            FailureReason::Inconsistent => ("Inconsistent", None, None),
            FailureReason::NotPartition => ("NotPartition", None, None),
            FailureReason::NotAffinelyIndependent { component } => {
                ("NotAffinelyIndependent", None, Some(component))
            }
            FailureReason::NotInCone {
                source_index,
                component,
            } => ("NotInCone", Some(source_index), Some(component)),
        };
        FailureJson {
            reason: name,
            detail: FailureDetail {
                message: reason.to_string(),
                source_index,
                monomial: source_index.map(|i| system.sources()[i].exponents().to_vec()),
                component,
                rays: rays.rays().iter().map(|r| strings(r)).collect(),
            },
        }
    }

    pub fn text(&self, system: &PolySystem) -> String {
        let mut s = format!("no WR0 realization: {}\n", self.detail.message);
        if let Some(i) = self.detail.source_index {
            let _ = writeln!(s, "failing monomial: {}", system.sources()[i]);
        }
        s
    }
}

#[derive(Serialize)]
pub struct SteadyJson {
    #[serde(rename = "D")]
    pub d: Vec<Vec<String>>,
    #[serde(rename = "J")]
    pub j: Vec<f64>,
    pub z_star: Vec<f64>,
    pub kernel: Vec<Vec<String>>,
    pub residual: f64,
    pub sample_points: Vec<Vec<f64>>,
}

impl SteadyJson {
    pub fn new(p: &SteadyStateParam) -> Self {
        SteadyJson {
            d: matrix_rows(&p.d),
            j: p.j.clone(),
            z_star: p.z_star.clone(),
            kernel: p.kernel.iter().map(|k| strings(k)).collect(),
            residual: p.residual,
            sample_points: p.sample_points(),
        }
    }

    pub fn text(&self) -> String {
        let mut s = String::from("D z = J\n");
        for (row, j) in self.d.iter().zip(&self.j) {
            let _ = writeln!(s, "  [{}]  {j:.12}", row.join(", "));
        }
        let z: Vec<String> = self.z_star.iter().map(|v| format!("{v:.12}")).collect();
        let _ = writeln!(s, "z* = ({})", z.join(", "));
        if self.kernel.is_empty() {
            let _ = writeln!(s, "ker D = {{0}}: unique positive steady state exp(z*)");
        }
        for k in &self.kernel {
            let _ = writeln!(s, "ker D basis: ({})", k.join(", "));
        }
        let _ = writeln!(s, "steady states: exp(z* + ker D)");
        s
    }
}

#[derive(Serialize)]
pub struct ReportJson {
    pub lyapunov_monotone: bool,
    pub max_lyapunov_increase: f64,
    pub conservation_laws: Vec<Vec<f64>>,
    pub conservation_drift: Vec<f64>,
    pub terminal_distance: f64,
    pub converged: bool,
    pub x_star: Vec<f64>,
    pub terminal_state: Vec<f64>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl ReportJson {
    pub fn new(c: &Certification) -> Self {
        let r = &c.report;
        ReportJson {
            lyapunov_monotone: r.lyapunov_monotone,
            max_lyapunov_increase: r.max_lyapunov_increase,
            conservation_laws: c.conservation_laws.clone(),
            conservation_drift: r.conservation_drift.clone(),
            terminal_distance: r.terminal_distance,
            converged: r.converged,
            x_star: r.x_star.clone(),
            terminal_state: r.terminal_state.clone(),
            accepted_steps: c.trajectory.stats.accepted,
            rejected_steps: c.trajectory.stats.rejected,
        }
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "lyapunov monotone: {} (max increase {:e})",
            self.lyapunov_monotone, self.max_lyapunov_increase
        );
        for (v, d) in self.conservation_laws.iter().zip(&self.conservation_drift) {
            let _ = writeln!(s, "conservation {v:?}: drift {d:e}");
        }
        let _ = writeln!(s, "x* = {:?}", self.x_star);
        let _ = writeln!(s, "terminal state = {:?}", self.terminal_state);
        let _ = writeln!(s, "terminal distance: {:e}", self.terminal_distance);
        let _ = writeln!(s, "converged: {}", self.converged);
        s
    }
}

/// Trajectory CSV with header `t,x1,…,xn,L`.
pub fn trajectory_csv(c: &Certification) -> String {
    let n = c.report.x_star.len();
    let mut s = String::from("t");
    for i in 1..=n {
        let _ = write!(s, ",x{i}");
    }
    s.push_str(",L\n");
    for ((t, x), l) in c
        .trajectory
        .times
        .iter()
        .zip(&c.trajectory.states)
        .zip(&c.lyapunov)
    {
        let _ = write!(s, "{t}");
        for v in x {
            let _ = write!(s, ",{v}");
        }
        let _ = writeln!(s, ",{l}");
    }
    s
}
