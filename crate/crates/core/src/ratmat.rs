//! Exact rational scalars, vectors and matrices.
//!
//! Everything here works over `BigRational`, so kernels, ranks and solutions
//! are exact. Elimination is plain Gauss-Jordan with the first nonzero entry
//! of a column taken as pivot, which makes every output a deterministic
//! function of the input.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational number, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// Shorthand for an integral rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `num / den`.
///
/// Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Converts a slice of integers into a rational vector.
pub fn rat_vec(values: &[i64]) -> Vec<Rational> {
    values.iter().map(|&v| rat(v)).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Scales `v` to the unique integer vector on the same ray whose entries have
/// gcd 1. The direction (sign) is preserved. The zero vector maps to itself.
pub fn primitive_integer(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let gcd = scaled.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if gcd.is_zero() {
        return scaled;
    }
    scaled.into_iter().map(|x| x / &gcd).collect()
}

/// Integer-primitive normalization with the first nonzero entry made positive.
pub fn normalize_kernel_vector(v: &[Rational]) -> Vec<Rational> {
    let mut ints = primitive_integer(v);
    if ints
        .iter()
        .find(|x| !x.is_zero())
        .is_some_and(|x| x.is_negative())
    {
        for x in ints.iter_mut() {
            *x = -core::mem::take(x);
        }
    }
    ints.into_iter().map(Rational::from_integer).collect()
}

/// Dense row-major matrix of rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

/// Reduced row-echelon form together with its pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub matrix: RatMatrix,
    /// `pivots[k]` is the column of the leading one in row `k`.
    pub pivots: Vec<usize>,
}

/// Solution set `particular + span(kernel)` of a consistent linear system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub particular: Vec<Rational>,
    pub kernel: Vec<Vec<Rational>>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m[(i, i)] = Rational::one();
        }
        m
    }

    /// Builds a matrix from its rows. Every row must have `cols` entries.
    pub fn from_rows(cols: usize, rows: &[Vec<Rational>]) -> Self {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged row in RatMatrix::from_rows");
            entries.extend(row.iter().cloned());
        }
        RatMatrix {
            rows: rows.len(),
            cols,
            entries,
        }
    }

    /// Builds a matrix from its columns. Every column must have `rows` entries.
    pub fn from_columns(rows: usize, columns: &[Vec<Rational>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "ragged column in RatMatrix::from_columns");
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<Rational>> = rows.iter().map(|r| rat_vec(r)).collect();
        Self::from_rows(cols, &rows)
    }

    pub fn from_i64_columns(columns: &[&[i64]]) -> Self {
        let rows = columns.first().map_or(0, |c| c.len());
        let columns: Vec<Vec<Rational>> = columns.iter().map(|c| rat_vec(c)).collect();
        Self::from_columns(rows, &columns)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Submatrix made of the given columns, in the given order.
    pub fn select_columns(&self, columns: &[usize]) -> RatMatrix {
        let mut m = RatMatrix::zeros(self.rows, columns.len());
        for i in 0..self.rows {
            for (k, &j) in columns.iter().enumerate() {
                m[(i, k)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "dimension mismatch in mul_vec");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let mut out = RatMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Gauss-Jordan elimination over the leading `limit` columns.
    fn eliminate(&mut self, limit: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..limit {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self[(r, col)].is_zero()) else {
                continue;
            };
            self.swap_rows(row, p);
            let inv = self[(row, col)].recip();
            for j in col..self.cols {
                let scaled = &self[(row, j)] * &inv;
                self[(row, j)] = scaled;
            }
            for r in 0..self.rows {
                if r == row || self[(r, col)].is_zero() {
                    continue;
                }
                let factor = self[(r, col)].clone();
                for j in col..self.cols {
                    let delta = &factor * &self[(row, j)];
                    self[(r, j)] -= delta;
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rref(&self) -> Rref {
        let mut matrix = self.clone();
        let pivots = matrix.eliminate(self.cols);
        Rref { matrix, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the right null space.
    ///
    /// One vector per free column, in increasing column order; each vector is
    /// integer-primitive with its first nonzero entry positive.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        let rref = self.rref();
        kernel_from_rref(&rref, self.cols)
    }

    /// Nonzero rows of the reduced row-echelon form: a canonical basis of the
    /// row space.
    pub fn row_basis(&self) -> RatMatrix {
        let rref = self.rref();
        let k = rref.pivots.len();
        let rows: Vec<Vec<Rational>> = (0..k).map(|i| rref.matrix.row(i).to_vec()).collect();
        RatMatrix::from_rows(self.cols, &rows)
    }

    /// Solves `self * x = b` exactly.
    ///
    /// Returns `None` iff the system is inconsistent. Free variables of the
    /// particular solution are zero.
    pub fn solve_exact(&self, b: &[Rational]) -> Option<Solution> {
        assert_eq!(b.len(), self.rows, "dimension mismatch in solve_exact");
        let mut aug = RatMatrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let pivots = aug.eliminate(self.cols);
        // A nonzero right-hand side below the last pivot row means inconsistency.
        if (pivots.len()..self.rows).any(|r| !aug[(r, self.cols)].is_zero()) {
            return None;
        }
        let mut particular = vec![Rational::zero(); self.cols];
        for (k, &col) in pivots.iter().enumerate() {
            particular[col] = aug[(k, self.cols)].clone();
        }
        let rref = Rref {
            matrix: aug,
            pivots,
        };
        let kernel = kernel_from_rref(&rref, self.cols);
        Some(Solution { particular, kernel })
    }
}

fn kernel_from_rref(rref: &Rref, cols: usize) -> Vec<Vec<Rational>> {
    let mut is_pivot = vec![false; cols];
    for &p in &rref.pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (k, &p) in rref.pivots.iter().enumerate() {
                v[p] = -rref.matrix[(k, f)].clone();
            }
            normalize_kernel_vector(&v)
        })
        .collect()
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rational;

    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}
