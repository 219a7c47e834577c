//! Reading systems from the polynomial text grammar or JSON.
//!
//! JSON comes in two shapes. A system lists its monomials and the matching
//! columns of `W`:
//!
//! ```json
//! {"n": 1, "monomials": [[1], [0]], "W": [["-1"], ["1"]]}
//! ```
//!
//! A graph, such as the output of `realize`, lists vertices and weighted
//! edges and stands for its associated system.

use std::str::FromStr;

use serde::Deserialize;
use wr0_core::model::{parse_system, ModelError, PolySystem, Vertex, WeightedEGraph};
use wr0_core::ratmat::Rational;

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid rational {0:?}: expected an integer or p/q")]
    Rational(String),
    #[error("{0}")]
    Model(#[from] ModelError),
    #[error("graph has no source with a nonzero net direction vector")]
    ZeroField,
}

#[derive(Clone, Debug)]
pub struct Loaded {
    pub system: PolySystem,
    /// Monomials removed because their coefficients cancelled.
    pub dropped: Vec<Vertex>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemJson {
    n: usize,
    monomials: Vec<Vec<u32>>,
    #[serde(rename = "W")]
    w: Vec<Vec<String>>,
}

#[derive(Deserialize)]
struct GraphJson {
    vertices: Vec<Vec<u32>>,
    edges: Vec<EdgeJson>,
}

#[derive(Deserialize)]
struct EdgeJson {
    from: usize,
    to: usize,
    kappa: String,
}

pub fn parse_rational(text: &str) -> Result<Rational, InputError> {
    Rational::from_str(text.trim()).map_err(|_| InputError::Rational(text.to_string()))
}

/// Loads a system from text, choosing JSON when the first non-blank
/// character is `{`.
pub fn load_system(text: &str) -> Result<Loaded, InputError> {
    if text.trim_start().starts_with('{') {
        load_json(text)
    } else {
        let parsed = parse_system(text)?;
        Ok(Loaded {
            system: parsed.system,
            dropped: parsed.dropped,
        })
    }
}

fn load_json(text: &str) -> Result<Loaded, InputError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.get("edges").is_some() {
        let graph: GraphJson = serde_json::from_value(value)?;
        let system = graph_from_json(graph)?.associated_system();
        if system.is_empty() {
            return Err(InputError::ZeroField);
        }
        return Ok(Loaded {
            system,
            dropped: Vec::new(),
        });
    }
    let spec: SystemJson = serde_json::from_value(value)?;
    let columns = spec
        .w
        .iter()
        .map(|col| col.iter().map(|s| parse_rational(s)).collect())
        .collect::<Result<Vec<Vec<Rational>>, _>>()?;
    let (system, dropped) = PolySystem::from_columns(spec.n, spec.monomials, columns)?;
    Ok(Loaded { system, dropped })
}

fn graph_from_json(graph: GraphJson) -> Result<WeightedEGraph, InputError> {
    let dim = graph.vertices.first().map_or(0, Vec::len);
    let vertices: Vec<Vertex> = graph.vertices.into_iter().map(Vertex::new).collect();
    let edges = graph
        .edges
        .iter()
        .map(|e| Ok((e.from, e.to, parse_rational(&e.kappa)?)))
        .collect::<Result<Vec<_>, InputError>>()?;
    Ok(WeightedEGraph::from_indexed(dim, &vertices, &edges)?)
}
