//! Random graph generators for property tests and benchmarks.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{Vertex, WeightedEGraph};
use crate::ratmat::{RatMatrix, Rational};

/// Shape limits for [`random_wr0_graph`].
#[derive(Clone, Debug, PartialEq)]
pub struct Wr0GraphSpec {
    pub max_dim: usize,
    pub max_components: usize,
    /// Largest coordinate of a vertex.
    pub max_exponent: u32,
    /// Numerators and denominators of weights are drawn from `1..=max_weight`.
    pub max_weight: i64,
    /// Probability of each edge beyond the spanning cycle of a component.
    pub extra_edge_probability: f64,
}

impl Default for Wr0GraphSpec {
    fn default() -> Self {
        Wr0GraphSpec {
            max_dim: 5,
            max_components: 3,
            max_exponent: 3,
            max_weight: 100,
            extra_edge_probability: 0.3,
        }
    }
}

pub fn random_weight<R: Rng + ?Sized>(rng: &mut R, max_weight: i64) -> Rational {
    let num = rng.gen_range(1..=max_weight);
    let den = rng.gen_range(1..=max_weight);
    Rational::new(num.into(), den.into())
}

fn random_point<R: Rng + ?Sized>(rng: &mut R, dim: usize, max_exponent: u32) -> Vertex {
    Vertex::new((0..dim).map(|_| rng.gen_range(0..=max_exponent)).collect())
}

/// A random weakly reversible, deficiency-zero weighted E-graph.
///
/// Component `p` has `d_p + 1` vertices with `Σ d_p ≤ n`, and the stacked
/// differences `y_j − y_base` have full rank `Σ d_p`. Each component is a
/// random Hamiltonian cycle plus independent extra edges.
pub fn random_wr0_graph<R: Rng + ?Sized>(rng: &mut R, spec: &Wr0GraphSpec) -> WeightedEGraph {
    let dim = rng.gen_range(1..=spec.max_dim);
    let components = rng.gen_range(1..=spec.max_components.min(dim));
    // Split a random total budget `Σ d_p ∈ [components, dim]` into positive parts.
    let budget = rng.gen_range(components..=dim);
    let mut sizes = vec![1usize; components];
    for _ in components..budget {
        let p = rng.gen_range(0..components);
        sizes[p] += 1;
    }

    let blocks = loop {
        let mut used: Vec<Vertex> = Vec::new();
        let mut blocks: Vec<Vec<Vertex>> = Vec::new();
        for &d in &sizes {
            let mut block = Vec::with_capacity(d + 1);
            while block.len() < d + 1 {
                let y = random_point(rng, dim, spec.max_exponent);
                if !used.contains(&y) {
                    used.push(y.clone());
                    block.push(y);
                }
            }
            blocks.push(block);
        }
        let rows: Vec<Vec<Rational>> = blocks
            .iter()
            .flat_map(|b| b[1..].iter().map(|y| b[0].edge_to(y)))
            .collect();
        if RatMatrix::from_rows(dim, &rows).rank() == budget {
            break blocks;
        }
    };

    let mut triples = Vec::new();
    for block in &blocks {
        let k = block.len();
        let mut order: Vec<usize> = (0..k).collect();
        order.shuffle(rng);
        let mut present = vec![vec![false; k]; k];
        for i in 0..k {
            let (a, b) = (order[i], order[(i + 1) % k]);
            present[a][b] = true;
        }
        for (a, row) in present.iter_mut().enumerate() {
            for (b, on) in row.iter_mut().enumerate() {
                if a != b && !*on && rng.gen_bool(spec.extra_edge_probability) {
                    *on = true;
                }
            }
        }
        for (a, row) in present.iter().enumerate() {
            for (b, &on) in row.iter().enumerate() {
                if on {
                    triples.push((
                        block[a].clone(),
                        block[b].clone(),
                        random_weight(rng, spec.max_weight),
                    ));
                }
            }
        }
    }
    WeightedEGraph::new(dim, triples).expect("generated edges are valid")
}

/// A random weighted E-graph on at most `max_vertices` vertices with no
/// structural guarantees beyond having at least one edge.
pub fn random_weighted_graph<R: Rng + ?Sized>(
    rng: &mut R,
    max_vertices: usize,
    max_weight: i64,
) -> WeightedEGraph {
    assert!(max_vertices >= 2, "a graph with an edge needs two vertices");
    let dim = rng.gen_range(1..=3);
    // Coordinates in 0..=4 give 5^dim distinct points.
    let count = rng.gen_range(2..=max_vertices.min(5usize.pow(dim as u32)));
    let mut vertices: Vec<Vertex> = Vec::with_capacity(count);
    while vertices.len() < count {
        let y = random_point(rng, dim, 4);
        if !vertices.contains(&y) {
            vertices.push(y);
        }
    }
    let density = rng.gen_range(0.1..0.6);
    loop {
        let mut triples = Vec::new();
        for a in &vertices {
            for b in &vertices {
                if a != b && rng.gen_bool(density) {
                    triples.push((a.clone(), b.clone(), random_weight(rng, max_weight)));
                }
            }
        }
        if !triples.is_empty() {
            return WeightedEGraph::new(dim, triples).expect("generated edges are valid");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_graphs_are_wr0() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let g = random_wr0_graph(&mut rng, &Wr0GraphSpec::default());
            assert!(g.is_weakly_reversible());
            assert_eq!(g.deficiency().total, 0);
            assert!(g.connected_components().len() <= 3);
            assert!(g.dim() <= 5);
            for block in g.connected_components().blocks() {
                assert!(block.len() <= g.dim() + 1);
            }
        }
    }

    #[test]
    fn weighted_graphs_respect_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let g = random_weighted_graph(&mut rng, 8, 100);
            assert!(g.vertices().len() <= 8);
            assert!(!g.edges().is_empty());
        }
    }
}
