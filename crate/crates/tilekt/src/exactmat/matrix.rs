//! Dense integer and rational matrices with exact arithmetic.
//!
//! Matrices with zero rows or zero columns are legal everywhere and denote
//! zero maps; one-dimensional complexes rely on this.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// An integer matrix in row-major order. All arithmetic is exact.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        IntMatrix { rows, cols, data }
    }

    /// Builds a matrix from rows of `i64` entries. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntMatrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().map(|&x| BigInt::from(x)).collect(),
        }
    }

    pub fn from_bigint_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && self.entries_indexed().all(|(i, j, x)| {
                if i == j {
                    x.is_one()
                } else {
                    x.is_zero()
                }
            })
    }

    pub fn entries_indexed(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> {
        let cols = self.cols;
        self.data
            .iter()
            .enumerate()
            .map(move |(k, x)| (k / cols, k % cols, x))
    }

    pub fn transpose(&self) -> IntMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            let (a_idx, b_idx) = (a * self.cols + j, b * self.cols + j);
            self.data.swap(a_idx, b_idx);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            let (a_idx, b_idx) = (i * self.cols + a, i * self.cols + b);
            self.data.swap(a_idx, b_idx);
        }
    }

    /// row[a] += c * row[b]
    pub fn add_row_multiple(&mut self, a: usize, b: usize, c: &BigInt) {
        for j in 0..self.cols {
            let t = &self[(b, j)] * c;
            self[(a, j)] += t;
        }
    }

    /// col[a] += c * col[b]
    pub fn add_col_multiple(&mut self, a: usize, b: usize, c: &BigInt) {
        for i in 0..self.rows {
            let t = &self[(i, b)] * c;
            self[(i, a)] += t;
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let t = -self[(i, j)].clone();
            self[(i, j)] = t;
        }
    }

    pub fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let t = -self[(i, j)].clone();
            self[(i, j)] = t;
        }
    }

    /// Submatrix of the given row and column index lists.
    pub fn submatrix(&self, row_idx: &[usize], col_idx: &[usize]) -> IntMatrix {
        Self::from_fn(row_idx.len(), col_idx.len(), |i, j| {
            self[(row_idx[i], col_idx[j])].clone()
        })
    }

    /// Horizontal concatenation [self | other].
    pub fn hstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    /// Block-diagonal assembly diag(self, other).
    pub fn block_diag(&self, other: &IntMatrix) -> IntMatrix {
        Self::from_fn(self.rows + other.rows, self.cols + other.cols, |i, j| {
            if i < self.rows && j < self.cols {
                self[(i, j)].clone()
            } else if i >= self.rows && j >= self.cols {
                other[(i - self.rows, j - self.cols)].clone()
            } else {
                BigInt::zero()
            }
        })
    }

    pub fn pow(&self, k: u64) -> IntMatrix {
        assert!(self.is_square());
        let mut acc = IntMatrix::identity(self.rows);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Entrywise residues in [0, m).
    pub fn mod_reduce(&self, m: &BigInt) -> IntMatrix {
        assert!(m.is_positive());
        Self::from_fn(self.rows, self.cols, |i, j| {
            ((&self[(i, j)] % m) + m) % m
        })
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square(), "det of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = &a[(k, k)] * &a[(i, j)] - &a[(i, k)] * &a[(k, j)];
                    let (q, r) = num::Integer::div_rem(&t, &prev);
                    debug_assert!(r.is_zero());
                    a[(i, j)] = q;
                }
                a[(i, k)] = BigInt::zero();
            }
            prev = a[(k, k)].clone();
        }
        sign * a[(n - 1, n - 1)].clone()
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_square() && self.det().abs().is_one()
    }

    /// Inverse of a unimodular matrix (exact, integral). Panics otherwise.
    pub fn unimodular_inverse(&self) -> IntMatrix {
        let inv = self.to_rational().inverse().expect("singular matrix");
        inv.to_integer().expect("inverse not integral")
    }

    pub fn to_rational(&self) -> RatMatrix {
        RatMatrix::from_fn(self.rows, self.cols, |i, j| {
            BigRational::from_integer(self[(i, j)].clone())
        })
    }

    pub fn to_i64_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|x| i64::try_from(x).expect("entry exceeds i64"))
                    .collect()
            })
            .collect()
    }

    /// Compact bracket rendering, e.g. `[[3,1],[1,6]]`.
    pub fn bracket_string(&self) -> String {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let entries: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
                format!("[{}]", entries.join(","))
            })
            .collect();
        format!("[{}]", rows.join(","))
    }

    /// Text format: first line `rows cols`, then row-major whitespace-separated entries.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            let entries: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            s.push_str(&entries.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn parse_text(input: &str) -> Result<IntMatrix, String> {
        let mut tokens = input.split_whitespace();
        let rows: usize = tokens
            .next()
            .ok_or("empty matrix text")?
            .parse()
            .map_err(|e| format!("bad row count: {e}"))?;
        let cols: usize = tokens
            .next()
            .ok_or("missing column count")?
            .parse()
            .map_err(|e| format!("bad column count: {e}"))?;
        let mut data = Vec::with_capacity(rows * cols);
        for k in 0..rows * cols {
            let tok = tokens
                .next()
                .ok_or_else(|| format!("expected {} entries, got {}", rows * cols, k))?;
            data.push(
                tok.parse::<BigInt>()
                    .map_err(|e| format!("bad entry {tok:?}: {e}"))?,
            );
        }
        if tokens.next().is_some() {
            return Err("trailing tokens after matrix entries".into());
        }
        Ok(IntMatrix { rows, cols, data })
    }

    /// Lexicographic comparison by (rows, cols, entries); used for canonical
    /// ordering of residual limit terms.
    pub fn lex_cmp(&self, other: &IntMatrix) -> std::cmp::Ordering {
        (self.rows, self.cols)
            .cmp(&(other.rows, other.cols))
            .then_with(|| self.data.cmp(&other.data))
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = IntMatrix::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let t = a * &rhs[(k, j)];
                    out[(i, j)] += t;
                }
            }
        }
        out
    }
}

impl Add for &IntMatrix {
    type Output = IntMatrix;
    fn add(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        IntMatrix::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] + &rhs[(i, j)])
    }
}

impl Sub for &IntMatrix {
    type Output = IntMatrix;
    fn sub(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        IntMatrix::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] - &rhs[(i, j)])
    }
}

impl Neg for &IntMatrix {
    type Output = IntMatrix;
    fn neg(self) -> IntMatrix {
        IntMatrix::from_fn(self.rows, self.cols, |i, j| -self[(i, j)].clone())
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix({}x{}){}", self.rows, self.cols, self.bracket_string())
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bracket_string())
    }
}

/// A rational matrix; carries the change-of-basis maps that use the
/// pseudo-inverse of a Smith diagonal.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RatMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigRational::one();
        }
        m
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> BigRational,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RatMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mul_int(&self, rhs: &IntMatrix) -> RatMatrix {
        self.mul(&rhs.to_rational())
    }

    pub fn mul(&self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = RatMatrix::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let t = a * &rhs[(k, j)];
                    out[(i, j)] += t;
                }
            }
        }
        out
    }

    /// Returns the integer matrix if every entry is integral.
    pub fn to_integer(&self) -> Option<IntMatrix> {
        if self.data.iter().all(|x| x.is_integer()) {
            Some(IntMatrix::from_fn(self.rows, self.cols, |i, j| {
                self[(i, j)].to_integer()
            }))
        } else {
            None
        }
    }

    /// Exact inverse by Gauss-Jordan elimination; None if singular.
    pub fn inverse(&self) -> Option<RatMatrix> {
        assert!(self.rows == self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = RatMatrix::identity(n);
        for k in 0..n {
            let pivot = (k..n).find(|&i| !a[(i, k)].is_zero())?;
            if pivot != k {
                for j in 0..n {
                    let (pi, ki) = (pivot * n + j, k * n + j);
                    a.data.swap(pi, ki);
                    inv.data.swap(pi, ki);
                }
            }
            let d = a[(k, k)].clone();
            for j in 0..n {
                a[(k, j)] = &a[(k, j)] / &d;
                inv[(k, j)] = &inv[(k, j)] / &d;
            }
            for i in 0..n {
                if i == k || a[(i, k)].is_zero() {
                    continue;
                }
                let c = a[(i, k)].clone();
                for j in 0..n {
                    let t = &c * &a[(k, j)];
                    a[(i, j)] -= t;
                    let t = &c * &inv[(k, j)];
                    inv[(i, j)] -= t;
                }
            }
        }
        Some(inv)
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let entries: Vec<String> = (0..self.cols)
                    .map(|j| self[(i, j)].to_string())
                    .collect();
                format!("[{}]", entries.join(","))
            })
            .collect();
        write!(f, "RatMatrix({}x{})[{}]", self.rows, self.cols, rows.join(","))
    }
}
