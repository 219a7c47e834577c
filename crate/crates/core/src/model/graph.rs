//! Weighted E-graphs: directed graphs on lattice points with positive
//! rational edge weights.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use super::{ModelError, PolySystem, Vertex};
use crate::ratmat::{normalize_kernel_vector, RatMatrix, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub kappa: Rational,
}

/// Partition of vertex indices into disjoint blocks.
///
/// Each block is sorted and blocks are ordered by their smallest member.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ComponentPartition {
    blocks: Vec<Vec<usize>>,
}

impl ComponentPartition {
    pub fn new(mut blocks: Vec<Vec<usize>>) -> Self {
        for b in blocks.iter_mut() {
            b.sort_unstable();
        }
        blocks.retain(|b| !b.is_empty());
        blocks.sort_unstable_by_key(|b| b[0]);
        ComponentPartition { blocks }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Index of the block containing `vertex`.
    pub fn block_of(&self, vertex: usize) -> Option<usize> {
        self.blocks
            .iter()
            .position(|b| b.binary_search(&vertex).is_ok())
    }
}

/// Deficiency `δ = |V| − ℓ − dim S` and the per-component values
/// `δ_p = |V_p| − 1 − dim S(V_p)`, listed in component order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deficiency {
    pub total: usize,
    pub per_component: Vec<usize>,
}

/// A weighted E-graph `(V, E, κ)` in canonical form.
///
/// Vertices are sorted in canonical order and edges by `(from, to)`, so two
/// graphs compare equal exactly when they have the same vertices, edges and
/// weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedEGraph {
    dim: usize,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

impl WeightedEGraph {
    /// Builds a graph from `(source, target, κ)` triples.
    ///
    /// The vertex set is the set of edge endpoints, so there are no isolated
    /// vertices. Rejects self-loops, duplicate edges, non-positive weights and
    /// vertices of the wrong dimension.
    pub fn new<I>(dim: usize, edges: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (Vertex, Vertex, Rational)>,
    {
        if dim == 0 {
            return Err(ModelError::ZeroDimension);
        }
        let mut by_pair: BTreeMap<(Vertex, Vertex), Rational> = BTreeMap::new();
        for (from, to, kappa) in edges {
            for v in [&from, &to] {
                if v.dim() != dim {
                    return Err(ModelError::DimensionMismatch {
                        expected: dim,
                        found: v.dim(),
                    });
                }
            }
            if from == to {
                return Err(ModelError::SelfLoop(from));
            }
            if !kappa.is_positive() {
                return Err(ModelError::NonPositiveWeight { from, to });
            }
            if by_pair.contains_key(&(from.clone(), to.clone())) {
                return Err(ModelError::DuplicateEdge { from, to });
            }
            by_pair.insert((from, to), kappa);
        }
        let mut vertices: Vec<Vertex> = by_pair
            .keys()
            .flat_map(|(a, b)| [a.clone(), b.clone()])
            .collect();
        vertices.sort_unstable_by(Vertex::canonical_cmp);
        vertices.dedup();
        let index = |v: &Vertex| {
            vertices
                .binary_search_by(|probe| probe.canonical_cmp(v))
                .expect("endpoint is a vertex")
        };
        let mut edges: Vec<Edge> = by_pair
            .iter()
            .map(|((a, b), kappa)| Edge {
                from: index(a),
                to: index(b),
                kappa: kappa.clone(),
            })
            .collect();
        edges.sort_unstable_by_key(|e| (e.from, e.to));
        Ok(WeightedEGraph {
            dim,
            vertices,
            edges,
        })
    }

    /// Builds a graph from an explicit vertex list and index-based edges.
    /// Every listed vertex must be incident to some edge.
    pub fn from_indexed(
        dim: usize,
        vertices: &[Vertex],
        edges: &[(usize, usize, Rational)],
    ) -> Result<Self, ModelError> {
        let mut used = vec![false; vertices.len()];
        let mut triples = Vec::with_capacity(edges.len());
        for (from, to, kappa) in edges {
            for &i in [from, to] {
                if i >= vertices.len() {
                    return Err(ModelError::VertexIndex(i));
                }
                used[i] = true;
            }
            triples.push((
                vertices[*from].clone(),
                vertices[*to].clone(),
                kappa.clone(),
            ));
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(ModelError::IsolatedVertex(vertices[i].clone()));
        }
        Self::new(dim, triples)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_index(&self, v: &Vertex) -> Option<usize> {
        self.vertices
            .binary_search_by(|probe| probe.canonical_cmp(v))
            .ok()
    }

    /// Weight of the edge `from -> to`, if present.
    pub fn kappa(&self, from: usize, to: usize) -> Option<&Rational> {
        self.edges
            .binary_search_by_key(&(from, to), |e| (e.from, e.to))
            .ok()
            .map(|k| &self.edges[k].kappa)
    }

    /// Net direction vector `Σ_j κ_ij (y_j − y_i)` of every vertex.
    pub fn net_direction_vectors(&self) -> Vec<Vec<Rational>> {
        let mut net = vec![vec![Rational::zero(); self.dim]; self.vertices.len()];
        for e in &self.edges {
            let v = self.vertices[e.from].edge_to(&self.vertices[e.to]);
            for (acc, d) in net[e.from].iter_mut().zip(v) {
                *acc += &e.kappa * d;
            }
        }
        net
    }

    /// The associated mass-action system `Σ κ_ij x^{y_i} (y_j − y_i)`,
    /// keeping the sources whose net direction vector is nonzero.
    pub fn associated_system(&self) -> PolySystem {
        let (sources, net_vectors): (Vec<_>, Vec<_>) = self
            .vertices
            .iter()
            .cloned()
            .zip(self.net_direction_vectors())
            .filter(|(_, w)| w.iter().any(|x| !x.is_zero()))
            .unzip();
        if sources.is_empty() {
            PolySystem::zero_field(self.dim)
        } else {
            PolySystem::from_canonical(self.dim, sources, net_vectors)
        }
    }

    fn undirected_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.from].push(e.to);
            adj[e.to].push(e.from);
        }
        adj
    }

    fn out_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.from].push(e.to);
        }
        adj
    }

    /// Connected components of the underlying undirected graph.
    pub fn connected_components(&self) -> ComponentPartition {
        let adj = self.undirected_adjacency();
        let mut label = vec![usize::MAX; self.vertices.len()];
        let mut blocks = Vec::new();
        for start in 0..self.vertices.len() {
            if label[start] != usize::MAX {
                continue;
            }
            let id = blocks.len();
            let mut block = vec![start];
            label[start] = id;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &u in &adj[v] {
                    if label[u] == usize::MAX {
                        label[u] = id;
                        block.push(u);
                        stack.push(u);
                    }
                }
            }
            blocks.push(block);
        }
        ComponentPartition::new(blocks)
    }

    /// Strongly connected components (Tarjan), each sorted, ordered by
    /// smallest member.
    pub fn strongly_connected_components(&self) -> Vec<Vec<usize>> {
        let adj = self.out_adjacency();
        let n = self.vertices.len();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut next_index = 0;
        let mut sccs = Vec::new();

        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            // (vertex, next neighbour position)
            let mut call: Vec<(usize, usize)> = vec![(root, 0)];
            index[root] = next_index;
            low[root] = next_index;
            next_index += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut pos)) = call.last_mut() {
                if *pos < adj[v].len() {
                    let u = adj[v][*pos];
                    *pos += 1;
                    if index[u] == usize::MAX {
                        index[u] = next_index;
                        low[u] = next_index;
                        next_index += 1;
                        stack.push(u);
                        on_stack[u] = true;
                        call.push((u, 0));
                    } else if on_stack[u] {
                        low[v] = low[v].min(index[u]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        let mut scc = Vec::new();
                        loop {
                            let w = stack.pop().expect("tarjan stack");
                            on_stack[w] = false;
                            scc.push(w);
                            if w == v {
                                break;
                            }
                        }
                        scc.sort_unstable();
                        sccs.push(scc);
                    }
                }
            }
        }
        sccs.sort_unstable_by_key(|s| s[0]);
        sccs
    }

    /// SCCs with no edge leaving them, ordered by smallest member.
    pub fn terminal_sccs(&self) -> Vec<Vec<usize>> {
        let sccs = self.strongly_connected_components();
        let mut scc_of = vec![0usize; self.vertices.len()];
        for (k, s) in sccs.iter().enumerate() {
            for &v in s {
                scc_of[v] = k;
            }
        }
        let mut has_exit = vec![false; sccs.len()];
        for e in &self.edges {
            if scc_of[e.from] != scc_of[e.to] {
                has_exit[scc_of[e.from]] = true;
            }
        }
        sccs.into_iter()
            .zip(has_exit)
            .filter_map(|(s, exit)| (!exit).then_some(s))
            .collect()
    }

    /// Every edge lies inside a strongly connected component.
    pub fn is_weakly_reversible(&self) -> bool {
        let sccs = self.strongly_connected_components();
        let mut scc_of = vec![0usize; self.vertices.len()];
        for (k, s) in sccs.iter().enumerate() {
            for &v in s {
                scc_of[v] = k;
            }
        }
        self.edges.iter().all(|e| scc_of[e.from] == scc_of[e.to])
    }

    fn edge_vector_rank<'a>(&self, edges: impl Iterator<Item = &'a Edge>) -> usize {
        let columns: Vec<Vec<Rational>> = edges
            .map(|e| self.vertices[e.from].edge_to(&self.vertices[e.to]))
            .collect();
        if columns.is_empty() {
            return 0;
        }
        RatMatrix::from_columns(self.dim, &columns).rank()
    }

    pub fn deficiency(&self) -> Deficiency {
        let components = self.connected_components();
        let dim_s = self.edge_vector_rank(self.edges.iter());
        let total = self.vertices.len() - components.len() - dim_s;
        let per_component = components
            .blocks()
            .iter()
            .map(|block| {
                let inside = self
                    .edges
                    .iter()
                    .filter(|e| block.binary_search(&e.from).is_ok());
                block.len() - 1 - self.edge_vector_rank(inside)
            })
            .collect();
        Deficiency {
            total,
            per_component,
        }
    }

    /// Kirchhoff matrix `A_κ`: column `i` carries the out-rates of vertex `i`,
    /// entry `(j, i) = κ_ij` and `(i, i) = −Σ_j κ_ij`, so `ẋ = Y A_κ x^Y`.
    pub fn kirchhoff_matrix(&self) -> RatMatrix {
        let m = self.vertices.len();
        let mut a = RatMatrix::zeros(m, m);
        for e in &self.edges {
            a[(e.to, e.from)] += &e.kappa;
            a[(e.from, e.from)] -= &e.kappa;
        }
        a
    }

    /// Basis of `ker A_κ` with one non-negative vector per terminal strongly
    /// connected component, positive exactly on it.
    ///
    /// Vectors are integer-primitive and listed in terminal-SCC order.
    pub fn kirchhoff_kernel(&self) -> Result<Vec<Vec<Rational>>, ModelError> {
        let a = self.kirchhoff_matrix();
        let terminal = self.terminal_sccs();
        let nullity = a.cols() - a.rank();
        if nullity != terminal.len() {
            return Err(ModelError::KernelSupportMismatch);
        }
        let m = self.vertices.len();
        let mut basis = Vec::with_capacity(terminal.len());
        for block in &terminal {
            let sub = kernel_of_block(&a, block);
            let [v] = sub.as_slice() else {
                return Err(ModelError::KernelSupportMismatch);
            };
            let mut full = vec![Rational::zero(); m];
            for (&i, x) in block.iter().zip(v) {
                full[i] = x.clone();
            }
            // Kernel vectors come normalized with the first entry positive.
            if !full.iter().zip(0..).all(|(x, i)| {
                if block.binary_search(&i).is_ok() {
                    x.is_positive()
                } else {
                    x.is_zero()
                }
            }) {
                return Err(ModelError::KernelSupportMismatch);
            }
            if !a.mul_vec(&full).iter().all(Zero::is_zero) {
                return Err(ModelError::KernelSupportMismatch);
            }
            basis.push(normalize_kernel_vector(&full));
        }
        Ok(basis)
    }
}

/// Kernel of `A` restricted to the rows and columns in `block`.
fn kernel_of_block(a: &RatMatrix, block: &[usize]) -> Vec<Vec<Rational>> {
    let rows: Vec<Vec<Rational>> = block
        .iter()
        .map(|&i| block.iter().map(|&j| a[(i, j)].clone()).collect())
        .collect();
    RatMatrix::from_rows(block.len(), &rows).kernel_basis()
}

/// Two graphs are dynamically equivalent iff every vertex has the same net
/// direction vector in both (a missing source counts as the zero vector).
pub fn dynamically_equivalent(g1: &WeightedEGraph, g2: &WeightedEGraph) -> bool {
    g1.dim == g2.dim && g1.associated_system() == g2.associated_system()
}
