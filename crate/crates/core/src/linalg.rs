//! Exact integer and rational linear algebra.
//!
//! Everything here works over arbitrary-precision integers and rationals.
//! Matrices are small (at most a few dozen entries) so the algorithms favour
//! determinism and obvious correctness over asymptotics.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

/// Convenience constructor for `num / den`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows of machine integers.
    ///
    /// Panics if the rows are ragged.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().map(|&x| BigInt::from(x)));
        }
        IntMatrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Matrix whose columns are the given vectors, all of length `height`.
    pub fn from_columns<C: AsRef<[i64]>>(height: usize, columns: &[C]) -> Self {
        let mut m = Self::zeros(height, columns.len());
        for (j, c) in columns.iter().enumerate() {
            let c = c.as_ref();
            assert_eq!(c.len(), height, "column length mismatch");
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = BigInt::from(*x);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    /// Diagonal entries `D[i][i]` for `i < min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)].clone())
            .collect()
    }

    /// Determinant by fraction-free (Bareiss) elimination. Square only.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[(i, k)].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * &a[(n - 1, n - 1)]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += factor * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, factor: &BigInt) {
        for j in 0..self.cols {
            let v = factor * &self[(src, j)];
            self[(dst, j)] += v;
        }
    }

    /// col[dst] += factor * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, factor: &BigInt) {
        for i in 0..self.rows {
            let v = factor * &self[(i, src)];
            self[(i, dst)] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// `u * a * v == d` with `u`, `v` unimodular and `d` in Smith normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    /// The nonzero invariant factors `d_1 | d_2 | ...`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.d
            .diagonal()
            .into_iter()
            .filter(|x| !x.is_zero())
            .collect()
    }
}

/// Smith normal form with transformation matrices.
///
/// Pivot is the entry of smallest nonzero absolute value in the active
/// submatrix (ties broken by lowest row, then lowest column). Each round
/// clears the pivot column with row operations, then the pivot row with
/// column operations.
pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    for t in 0..m.min(n) {
        loop {
            let Some((pi, pj)) = smallest_pivot(&d, t) else {
                return SmithDecomposition { u, d, v };
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -(&d[(i, t)] / &d[(t, t)]);
                d.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                clean &= d[(i, t)].is_zero();
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -(&d[(t, j)] / &d[(t, t)]);
                d.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                clean &= d[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }

            let pivot = d[(t, t)].clone();
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d[(i, j)].is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    SmithDecomposition { u, d, v }
}

fn smallest_pivot(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), BigInt)> = None;
    for i in t..d.rows {
        for j in t..d.cols {
            let x = d[(i, j)].abs();
            if x.is_zero() {
                continue;
            }
            if best.as_ref().is_none_or(|(_, b)| x < *b) {
                best = Some(((i, j), x));
            }
        }
    }
    best.map(|(idx, _)| idx)
}

/// True iff the gcd of the entries is 1.
pub fn is_primitive(v: &[i64]) -> bool {
    let g = v.iter().fold(BigInt::zero(), |g, &x| g.gcd(&BigInt::from(x)));
    g.is_one()
}

/// Reduced row echelon form with leftmost pivots. Returns the pivot columns.
pub fn rref(m: &mut [Vec<Rational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for j in 0..cols {
                let v = &f * &m[r][j];
                m[i][j] -= v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<Rational>]) -> usize {
    let mut work = m.to_vec();
    rref(&mut work).len()
}

/// Exact solution of `a x = b`.
///
/// Underdetermined systems get the solution with every free variable set to
/// zero (leftmost-pivot reduced row echelon form). `None` if inconsistent.
pub fn solve_rational(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    assert_eq!(a.len(), b.len(), "row count mismatch");
    let cols = a.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            assert_eq!(row.len(), cols, "ragged system");
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][cols].clone();
    }
    Some(x)
}

/// Basis of `{x : a x = 0}`, one vector per free column.
pub fn nullspace(a: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let mut work = a.to_vec();
    let pivots = rref(&mut work);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rational::zero(); cols];
            x[f] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                x[p] = -work[r][f].clone();
            }
            x
        })
        .collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One linear inequality `coeffs · y >= bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inequality {
    pub coeffs: Vec<Rational>,
    pub bound: Rational,
}

/// Finds a point satisfying every inequality, by Fourier-Motzkin elimination.
///
/// Returns `None` if the system is infeasible. Intended for systems with a
/// handful of variables.
pub fn feasible_point(system: &[Inequality], vars: usize) -> Option<Vec<Rational>> {
    if vars == 0 {
        return system
            .iter()
            .all(|c| !c.bound.is_positive())
            .then(Vec::new);
    }
    let k = vars - 1;
    let mut reduced = Vec::new();
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for c in system {
        assert_eq!(c.coeffs.len(), vars, "inequality width mismatch");
        let a = &c.coeffs[k];
        if a.is_zero() {
            reduced.push(Inequality {
                coeffs: c.coeffs[..k].to_vec(),
                bound: c.bound.clone(),
            });
        } else if a.is_positive() {
            lower.push(c);
        } else {
            upper.push(c);
        }
    }
    for lo in &lower {
        for up in &upper {
            let sl = lo.coeffs[k].recip();
            let su = (-&up.coeffs[k]).recip();
            let coeffs: Vec<Rational> = (0..k)
                .map(|j| &lo.coeffs[j] * &sl + &up.coeffs[j] * &su)
                .collect();
            let bound = &lo.bound * &sl + &up.bound * &su;
            let c = Inequality { coeffs, bound };
            if !reduced.contains(&c) {
                reduced.push(c);
            }
        }
    }
    let mut y = feasible_point(&reduced, k)?;
    // Bound on y_k from each constraint: a_k y_k >= bound - sum_j a_j y_j.
    let limit = |c: &Inequality| (&c.bound - dot(&c.coeffs[..k], &y)) / &c.coeffs[k];
    let lo = lower.iter().map(|c| limit(c)).max();
    let hi = upper.iter().map(|c| limit(c)).min();
    let value = match (lo, hi) {
        (Some(l), _) => l,
        (None, Some(h)) => h,
        (None, None) => Rational::zero(),
    };
    y.push(value);
    Some(y)
}
