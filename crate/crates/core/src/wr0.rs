//! Search for the weakly reversible deficiency-zero (WR₀) realization of a
//! polynomial system.
//!
//! The steps, in order:
//! 1. `ker W` must meet the open orthant (consistency).
//! 2. The extreme rays of `ker W ∩ R^m_≥` must have supports partitioning the
//!    monomials; the blocks are the candidate connected components.
//! 3. Each block must be affinely independent.
//! 4. Every `w_i` must be a non-negative combination of the edge vectors
//!    `y_j − y_i` inside its block. The coefficients are the edge weights.

use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::cone::{extreme_rays, rays_cover_all, supports_partition, ConeRays};
use crate::model::{ComponentPartition, PolySystem, Vertex, WeightedEGraph};
use crate::ratmat::{RatMatrix, Rational};

/// The unique WR₀ realization of a system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Realization {
    pub graph: WeightedEGraph,
    pub components: ComponentPartition,
    pub deficiency: usize,
    pub generators: ConeRays,
}

impl Realization {
    /// The cone generator supported on component `p`.
    pub fn generator(&self, p: usize) -> &[num_bigint::BigInt] {
        self.generators
            .ray_with_support(&self.components.blocks()[p])
            .expect("every component is the support of a generator")
    }
}

/// Why a system has no WR₀ realization. Indices are 0-based positions in the
/// system's canonical monomial order and in component order.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FailureReason {
    #[error("ker W has no strictly positive vector, so no positive steady state exists")]
    Inconsistent,
    #[error("supports of the generators of ker W ∩ R^m_≥ do not partition the monomials")]
    NotPartition,
    #[error("monomials of component {component} are not affinely independent")]
    NotAffinelyIndependent { component: usize },
    #[error("net direction vector of monomial {source_index} is outside the cone of its component {component}")]
    NotInCone {
        source_index: usize,
        component: usize,
    },
}

/// `{y_j − y_0}` is linearly independent.
pub fn affinely_independent(vertices: &[&Vertex]) -> bool {
    let Some((base, rest)) = vertices.split_first() else {
        return true;
    };
    if rest.is_empty() {
        return true;
    }
    let columns: Vec<Vec<Rational>> = rest.iter().map(|y| base.edge_to(y)).collect();
    RatMatrix::from_columns(base.dim(), &columns).rank() == rest.len()
}

/// Writes `w = Σ_j κ_j (others_j − base)` with every `κ_j ≥ 0`.
///
/// Returns `None` when no such decomposition exists. The vertices must be
/// affinely independent, which makes the decomposition unique.
pub fn decompose_in_cone(
    w: &[Rational],
    base: &Vertex,
    others: &[&Vertex],
) -> Option<Vec<Rational>> {
    let columns: Vec<Vec<Rational>> = others.iter().map(|y| base.edge_to(y)).collect();
    let m = RatMatrix::from_columns(base.dim(), &columns);
    let solution = m.solve_exact(w)?;
    debug_assert!(
        solution.kernel.is_empty(),
        "vertices must be affinely independent"
    );
    if solution.particular.iter().any(Signed::is_negative) {
        return None;
    }
    Some(solution.particular)
}

/// Runs the WR₀ search on `system`.
///
/// On success the returned graph's associated system equals `system`.
/// On failure the reason names the first failing test.
pub fn find_wr0(system: &PolySystem) -> Result<Realization, FailureReason> {
    let w = system.net_matrix();
    let generators = extreme_rays(&w);
    if !rays_cover_all(&generators) {
        return Err(FailureReason::Inconsistent);
    }
    let components = supports_partition(&generators).ok_or(FailureReason::NotPartition)?;

    let sources = system.sources();
    for (p, block) in components.blocks().iter().enumerate() {
        let members: Vec<&Vertex> = block.iter().map(|&i| &sources[i]).collect();
        if !affinely_independent(&members) {
            return Err(FailureReason::NotAffinelyIndependent { component: p });
        }
    }

    let mut edges = Vec::new();
    for (p, block) in components.blocks().iter().enumerate() {
        for &i in block {
            let targets: Vec<usize> = block.iter().copied().filter(|&j| j != i).collect();
            let others: Vec<&Vertex> = targets.iter().map(|&j| &sources[j]).collect();
            let kappas = decompose_in_cone(&system.net_vectors()[i], &sources[i], &others).ok_or(
                FailureReason::NotInCone {
                    source_index: i,
                    component: p,
                },
            )?;
            for (&j, kappa) in targets.iter().zip(kappas) {
                if !kappa.is_zero() {
                    edges.push((i, j, kappa));
                }
            }
        }
    }

    let graph = WeightedEGraph::from_indexed(system.dim(), sources, &edges)
        .expect("decomposition yields a valid graph");
    let deficiency = graph.deficiency().total;

    assert_eq!(
        graph.vertices(),
        sources,
        "realization vertices are the sources"
    );
    assert_eq!(
        &graph.associated_system(),
        system,
        "realization must reproduce W"
    );
    assert_eq!(deficiency, 0, "realization must have deficiency zero");
    assert!(
        graph.is_weakly_reversible(),
        "realization must be weakly reversible"
    );
    assert_eq!(graph.connected_components(), components);

    Ok(Realization {
        graph,
        components,
        deficiency,
        generators,
    })
}

/// Checks that column scaling `w_i ← a_i w_i` preserves the outcome of
/// [`find_wr0`] and scales the weights out of `y_i` by exactly `a_i`.
pub fn scaled_equivalence_check(system: &PolySystem, factors: &[Rational]) -> bool {
    let scaled = system.scaled(factors);
    match (find_wr0(system), find_wr0(&scaled)) {
        (Ok(base), Ok(other)) => {
            base.graph.edges().len() == other.graph.edges().len()
                && base
                    .graph
                    .edges()
                    .iter()
                    .zip(other.graph.edges())
                    .all(|(e, f)| {
                        e.from == f.from && e.to == f.to && f.kappa == &e.kappa * &factors[e.from]
                    })
        }
        (Err(_), Err(_)) => true,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_system;
    use crate::ratmat::{rat, rat_vec, ratio};

    const TRIANGLE: &str = "dx1/dt = -12*x1 + x3^2; dx2/dt = 14*x1 - 4*x2^2 + 8*x3^2; dx3/dt = 10*x1 + 4*x2^2 - 10*x3^2";
    const OUTSIDE_CONE: &str = "dx1/dt = -1/2*x1 + x3^2; dx2/dt = -2*x1 - 4*x2^2 + 8*x3^2; dx3/dt = 3*x1 + 4*x2^2 - 10*x3^2";

    fn v(e: &[u32]) -> Vertex {
        Vertex::new(e.to_vec())
    }

    #[test]
    fn affine_independence() {
        assert!(affinely_independent(&[
            &v(&[1, 0, 0]),
            &v(&[0, 2, 0]),
            &v(&[0, 0, 2])
        ]));
        assert!(!affinely_independent(&[
            &v(&[0, 0]),
            &v(&[2, 0]),
            &v(&[0, 2]),
            &v(&[2, 2])
        ]));
        assert!(affinely_independent(&[&v(&[3, 1])]));
    }

    #[test]
    fn cone_decomposition() {
        let y1 = v(&[1, 0, 0]);
        let y2 = v(&[0, 2, 0]);
        let y3 = v(&[0, 0, 2]);
        assert_eq!(
            decompose_in_cone(&rat_vec(&[0, -4, 4]), &y2, &[&y1, &y3]),
            Some(rat_vec(&[0, 2]))
        );
        let w = [ratio(-1, 2), rat(-2), rat(3)];
        assert_eq!(decompose_in_cone(&w, &y1, &[&y2, &y3]), None);
        assert_eq!(
            decompose_in_cone(&y1.edge_to(&y2), &y1, &[&y2, &y3]),
            Some(rat_vec(&[1, 0]))
        );
        // Outside the affine span entirely.
        assert_eq!(
            decompose_in_cone(&rat_vec(&[1, 1, 1]), &y1, &[&y2, &y3]),
            None
        );
    }

    #[test]
    fn example_realization() {
        let sys = parse_system(TRIANGLE).unwrap().system;
        let r = find_wr0(&sys).unwrap();
        let g = &r.graph;
        let (y1, y2, y3) = (0, 1, 2);
        assert_eq!(g.vertices()[y1], v(&[1, 0, 0]));
        assert_eq!(g.kappa(y1, y2), Some(&rat(7)));
        assert_eq!(g.kappa(y1, y3), Some(&rat(5)));
        assert_eq!(g.kappa(y2, y3), Some(&rat(2)));
        assert_eq!(g.kappa(y3, y1), Some(&rat(1)));
        assert_eq!(g.kappa(y3, y2), Some(&rat(4)));
        assert_eq!(g.kappa(y2, y1), None);
        assert_eq!(g.edges().len(), 5);
        assert_eq!(r.components.len(), 1);
        assert_eq!(r.deficiency, 0);
    }

    #[test]
    fn example_without_realization() {
        let sys = parse_system(OUTSIDE_CONE).unwrap().system;
        assert_eq!(
            find_wr0(&sys),
            Err(FailureReason::NotInCone {
                source_index: 0,
                component: 0
            })
        );
    }

    #[test]
    fn inconsistent_and_not_partition() {
        let sys = parse_system("dx1/dt = 1 + x1").unwrap().system;
        assert_eq!(find_wr0(&sys), Err(FailureReason::Inconsistent));
        // 1 -> x1 -> 2 x1 style chain with overlapping cone generators.
        let sys = parse_system("dx1/dt = 1 - x1 + x1^2 - x1^3")
            .unwrap()
            .system;
        assert_eq!(find_wr0(&sys), Err(FailureReason::NotPartition));
    }

    #[test]
    fn not_affinely_independent() {
        let sys = parse_system("dx1/dt = 2 - x1 - x1^2").unwrap().system;
        // ker W ∩ R^3_≥ is 2-dimensional with overlapping supports.
        assert!(find_wr0(&sys).is_err());
        // Three collinear monomials 1, x1*x2, x1^2*x2^2 with ker W = span{(1,1,1)}.
        let sys = parse_system("dx1/dt = 1 - x1^2*x2^2; dx2/dt = x1*x2 - x1^2*x2^2")
            .unwrap()
            .system;
        assert_eq!(
            find_wr0(&sys),
            Err(FailureReason::NotAffinelyIndependent { component: 0 })
        );
    }

    #[test]
    fn scaling_preserves_outcome() {
        let sys = parse_system(TRIANGLE).unwrap().system;
        assert!(scaled_equivalence_check(&sys, &[rat(1), rat(1), rat(1)]));
        let a = [rat(2), rat(3), rat(5)];
        assert!(scaled_equivalence_check(&sys, &a));
        let r = find_wr0(&sys.scaled(&a)).unwrap();
        assert_eq!(r.graph.kappa(0, 1), Some(&rat(14)));
        assert_eq!(r.graph.kappa(1, 2), Some(&rat(6)));
        assert_eq!(r.graph.kappa(2, 0), Some(&rat(5)));

        let sys = parse_system(OUTSIDE_CONE).unwrap().system;
        assert!(scaled_equivalence_check(
            &sys,
            &[ratio(1, 7), rat(9), rat(2)]
        ));
    }
}
