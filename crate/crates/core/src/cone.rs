//! Extreme rays of the pointed cone `ker W ∩ R^m_≥`.
//!
//! Double description: start from the orthant, whose extreme rays are the
//! unit vectors, and intersect with one equality `a·ν = 0` at a time. After
//! each step the surviving rays are those on the hyperplane plus one new ray
//! for every adjacent pair straddling it. Two rays are adjacent when the
//! constraints active at both have rank `m − 2`.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::model::ComponentPartition;
use crate::ratmat::{primitive_integer, RatMatrix, Rational};

/// Minimal generators of a pointed cone inside `R^m_≥`.
///
/// Every ray is a nonzero non-negative integer vector with gcd 1; rays are
/// sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConeRays {
    m: usize,
    rays: Vec<Vec<BigInt>>,
}

impl ConeRays {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rays(&self) -> &[Vec<BigInt>] {
        &self.rays
    }

    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }

    pub fn rational_rays(&self) -> Vec<Vec<Rational>> {
        self.rays
            .iter()
            .map(|r| r.iter().cloned().map(Rational::from_integer).collect())
            .collect()
    }

    pub fn supports(&self) -> Vec<Vec<usize>> {
        self.rays.iter().map(|r| support(r)).collect()
    }

    /// The ray whose support is exactly `block`, if any.
    pub fn ray_with_support(&self, block: &[usize]) -> Option<&[BigInt]> {
        self.rays
            .iter()
            .find(|r| support(r) == block)
            .map(Vec::as_slice)
    }
}

fn support(v: &[BigInt]) -> Vec<usize> {
    v.iter()
        .enumerate()
        .filter_map(|(i, x)| (!x.is_zero()).then_some(i))
        .collect()
}

fn support_mask(v: &[BigInt]) -> Vec<u64> {
    let mut mask = vec![0u64; v.len().div_ceil(64)];
    for (i, x) in v.iter().enumerate() {
        if !x.is_zero() {
            mask[i / 64] |= 1 << (i % 64);
        }
    }
    mask
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn make_primitive(v: &mut [BigInt]) {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && g != BigInt::from(1) {
        for x in v.iter_mut() {
            *x /= &g;
        }
    }
}

/// Computes the extreme rays of `{ν ∈ R^m : Wν = 0, ν ≥ 0}`.
///
/// Returns an empty ray list when the cone is `{0}`.
pub fn extreme_rays(w: &RatMatrix) -> ConeRays {
    let m = w.cols();
    // Integer-scaled basis of the row space, in pivot order.
    let equalities: Vec<Vec<BigInt>> = {
        let basis = w.row_basis();
        (0..basis.rows())
            .map(|i| primitive_integer(basis.row(i)))
            .collect()
    };

    let mut rays: Vec<Vec<BigInt>> = (0..m)
        .map(|i| {
            let mut e = vec![BigInt::zero(); m];
            e[i] = BigInt::from(1);
            e
        })
        .collect();

    for (k, a) in equalities.iter().enumerate() {
        let inserted = &equalities[..k];
        let values: Vec<BigInt> = rays.iter().map(|r| dot(a, r)).collect();
        let masks: Vec<Vec<u64>> = rays.iter().map(|r| support_mask(r)).collect();
        let mut next: Vec<Vec<BigInt>> = Vec::new();
        let mut positive = Vec::new();
        let mut negative = Vec::new();
        for (i, val) in values.iter().enumerate() {
            if val.is_zero() {
                next.push(rays[i].clone());
            } else if val.is_positive() {
                positive.push(i);
            } else {
                negative.push(i);
            }
        }
        for &p in &positive {
            for &q in &negative {
                // Adjacency needs |supp p ∪ supp q| ≤ k + 2; check that on bits first.
                let union: u32 = masks[p]
                    .iter()
                    .zip(&masks[q])
                    .map(|(x, y)| (x | y).count_ones())
                    .sum();
                if union as usize > k + 2 || !adjacent(&rays[p], &rays[q], inserted) {
                    continue;
                }
                // (a·p) q − (a·q) p lies on the hyperplane with non-negative entries.
                let mut r: Vec<BigInt> = rays[q]
                    .iter()
                    .zip(&rays[p])
                    .map(|(xq, xp)| &values[p] * xq - &values[q] * xp)
                    .collect();
                make_primitive(&mut r);
                next.push(r);
            }
        }
        next.sort_unstable();
        next.dedup();
        rays = next;
        if rays.is_empty() {
            break;
        }
    }
    rays.sort_unstable();
    ConeRays { m, rays }
}

/// Algebraic adjacency test in the cone cut out by `inserted` and `ν ≥ 0`.
///
/// The active set at both rays is the inserted equalities plus the coordinate
/// constraints on their common zeros `Z`; its rank is `|Z| + rank(E_U)` with
/// `U` the union of supports, so adjacency means `rank(E_U) = |U| − 2`.
fn adjacent(p: &[BigInt], q: &[BigInt], inserted: &[Vec<BigInt>]) -> bool {
    let union: Vec<usize> = (0..p.len())
        .filter(|&i| !p[i].is_zero() || !q[i].is_zero())
        .collect();
    let target = union.len() - 2;
    if target > inserted.len() {
        return false;
    }
    if target == 0 {
        return true;
    }
    let rows: Vec<Vec<Rational>> = inserted
        .iter()
        .map(|row| {
            union
                .iter()
                .map(|&i| Rational::from_integer(row[i].clone()))
                .collect()
        })
        .collect();
    RatMatrix::from_rows(union.len(), &rows).rank() == target
}

/// The supports of the rays, when they are pairwise disjoint and cover
/// `{0, …, m−1}`.
pub fn supports_partition(rays: &ConeRays) -> Option<ComponentPartition> {
    let mut owner = vec![false; rays.m];
    let supports = rays.supports();
    for s in &supports {
        for &i in s {
            if core::mem::replace(&mut owner[i], true) {
                return None;
            }
        }
    }
    if owner.iter().all(|&o| o) {
        Some(ComponentPartition::new(supports))
    } else {
        None
    }
}

/// True iff the union of ray supports is every index, i.e. the cone meets
/// the open orthant.
pub fn rays_cover_all(rays: &ConeRays) -> bool {
    let mut covered = vec![false; rays.m];
    for r in &rays.rays {
        for (c, x) in covered.iter_mut().zip(r) {
            *c |= !x.is_zero();
        }
    }
    covered.into_iter().all(|c| c)
}

/// Consistency: `ker W` contains a strictly positive vector.
pub fn is_consistent(w: &RatMatrix) -> bool {
    rays_cover_all(&extreme_rays(w))
}
