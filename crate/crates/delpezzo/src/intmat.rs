//! Arbitrary-precision integer matrices and the normal-form algorithms the
//! rest of the crate is built on: Hermite normal form with transform,
//! saturated integer kernels, Bareiss determinants, Faddeev–LeVerrier
//! characteristic polynomials, and exact congruence diagonalization.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

/// Convenience constructor for small integers.
pub fn int(v: i64) -> Int {
    Int::from(v)
}

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl std::fmt::Debug for IntMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "IntMat {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self[(r, c)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for IntMat {
    type Output = Int;
    fn index(&self, (r, c): (usize, usize)) -> &Int {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Int {
        &mut self.data[r * self.cols + c]
    }
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat {
            rows,
            cols,
            data: vec![Int::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Int::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Int) -> Self {
        let mut m = IntMat::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Build from row slices of machine integers (test/data ergonomics).
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntMat::from_fn(r, c, |i, j| int(rows[i][j]))
    }

    pub fn from_rows(rows: Vec<Vec<Int>>) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let mut m = IntMat::zeros(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn diag(entries: &[i64]) -> Self {
        let n = entries.len();
        IntMat::from_fn(n, n, |i, j| if i == j { int(entries[i]) } else { Int::zero() })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> Vec<Int> {
        (0..self.cols).map(|c| self[(r, c)].clone()).collect()
    }

    pub fn col(&self, c: usize) -> Vec<Int> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for r in 0..self.rows {
            for c in (r + 1)..self.cols {
                if self[(r, c)] != self[(c, r)] {
                    return false;
                }
            }
        }
        true
    }

    pub fn transpose(&self) -> IntMat {
        IntMat::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let mut out = IntMat::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let t = a * &other[(k, c)];
                    out[(r, c)] += t;
                }
            }
        }
        out
    }

    /// Matrix-vector product (vector as coordinates column).
    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in mul_vec");
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| &self[(r, c)] * &v[c]).sum())
            .collect()
    }

    pub fn add(&self, other: &IntMat) -> IntMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMat::from_fn(self.rows, self.cols, |r, c| &self[(r, c)] + &other[(r, c)])
    }

    pub fn sub(&self, other: &IntMat) -> IntMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMat::from_fn(self.rows, self.cols, |r, c| &self[(r, c)] - &other[(r, c)])
    }

    pub fn neg(&self) -> IntMat {
        IntMat::from_fn(self.rows, self.cols, |r, c| -self[(r, c)].clone())
    }

    pub fn scale(&self, k: &Int) -> IntMat {
        IntMat::from_fn(self.rows, self.cols, |r, c| &self[(r, c)] * k)
    }

    pub fn pow(&self, mut e: u64) -> IntMat {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = IntMat::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn trace(&self) -> Int {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)].clone()).sum()
    }

    /// Determinant by the Bareiss fraction-free algorithm.
    pub fn det(&self) -> Int {
        assert!(self.is_square());
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut m = self.clone();
        let mut sign = Int::one();
        let mut prev = Int::one();
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                let swap = ((k + 1)..n).find(|&r| !m[(r, k)].is_zero());
                match swap {
                    Some(r) => {
                        for c in 0..n {
                            let t = m[(k, c)].clone();
                            m[(k, c)] = m[(r, c)].clone();
                            m[(r, c)] = t;
                        }
                        sign = -sign;
                    }
                    None => return Int::zero(),
                }
            }
            for i in (k + 1)..n {
                for j in (k + 1)..n {
                    let num = &m[(k, k)] * &m[(i, j)] - &m[(i, k)] * &m[(k, j)];
                    m[(i, j)] = &num / &prev;
                }
                m[(i, k)] = Int::zero();
            }
            prev = m[(k, k)].clone();
        }
        sign * m[(n - 1, n - 1)].clone()
    }

    /// Rank over the rationals (fraction-free elimination).
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let (rows, cols) = (m.rows, m.cols);
        let mut rank = 0;
        let mut col = 0;
        while rank < rows && col < cols {
            let pivot = (rank..rows).find(|&r| !m[(r, col)].is_zero());
            let Some(p) = pivot else {
                col += 1;
                continue;
            };
            if p != rank {
                for c in 0..cols {
                    let t = m[(rank, c)].clone();
                    m[(rank, c)] = m[(p, c)].clone();
                    m[(p, c)] = t;
                }
            }
            for r in (rank + 1)..rows {
                if m[(r, col)].is_zero() {
                    continue;
                }
                let a = m[(rank, col)].clone();
                let b = m[(r, col)].clone();
                for c in col..cols {
                    m[(r, c)] = &m[(r, c)] * &a - &m[(rank, c)] * &b;
                }
            }
            rank += 1;
            col += 1;
        }
        rank
    }

    /// Rank of the reduction mod 2.
    pub fn rank_mod2(&self) -> usize {
        let (rows, cols) = (self.rows, self.cols);
        let mut bits: Vec<Vec<bool>> = (0..rows)
            .map(|r| (0..cols).map(|c| self[(r, c)].is_odd()).collect())
            .collect();
        let mut rank = 0;
        for col in 0..cols {
            let Some(p) = (rank..rows).find(|&r| bits[r][col]) else {
                continue;
            };
            bits.swap(rank, p);
            for r in 0..rows {
                if r != rank && bits[r][col] {
                    let (head, tail) = if r < rank {
                        let (a, b) = bits.split_at_mut(rank);
                        (&mut a[r], &b[0])
                    } else {
                        let (a, b) = bits.split_at_mut(r);
                        (&mut b[0], &a[rank])
                    };
                    for c in 0..cols {
                        head[c] ^= tail[c];
                    }
                }
            }
            rank += 1;
            if rank == rows {
                break;
            }
        }
        rank
    }

    /// Row-style Hermite normal form: pivots positive, entries above each
    /// pivot reduced into `[0, pivot)`, zero rows dropped. Canonical for the
    /// row span over Z.
    pub fn row_hnf(&self) -> IntMat {
        let (h, _) = self.row_hnf_with_transform();
        h
    }

    /// Hermite normal form together with a unimodular transform `U` such
    /// that `U * self = H` (with `H` keeping its zero rows at the bottom, so
    /// the row counts match).
    pub fn row_hnf_with_transform(&self) -> (IntMat, IntMat) {
        let mut h = self.clone();
        let mut u = IntMat::identity(self.rows);
        let (rows, cols) = (h.rows, h.cols);
        let mut pivot_row = 0;
        let mut pivot_cols = Vec::new();
        for col in 0..cols {
            if pivot_row == rows {
                break;
            }
            // Clear the column below pivot_row by gcd row operations.
            loop {
                let nonzero: Vec<usize> =
                    (pivot_row..rows).filter(|&r| !h[(r, col)].is_zero()).collect();
                if nonzero.is_empty() {
                    break;
                }
                if nonzero.len() == 1 {
                    let r = nonzero[0];
                    if r != pivot_row {
                        h.swap_rows(r, pivot_row);
                        u.swap_rows(r, pivot_row);
                    }
                    break;
                }
                // Find the row with the smallest nonzero |entry| and reduce
                // the others by it.
                let &rmin = nonzero
                    .iter()
                    .min_by_key(|&&r| h[(r, col)].abs())
                    .expect("nonempty");
                for &r in &nonzero {
                    if r == rmin {
                        continue;
                    }
                    let q = h[(r, col)].div_euclid(&h[(rmin, col)]);
                    h.row_axpy(r, rmin, &-q.clone());
                    u.row_axpy(r, rmin, &-q);
                }
            }
            if h[(pivot_row, col)].is_zero() {
                continue;
            }
            if h[(pivot_row, col)].is_negative() {
                h.negate_row(pivot_row);
                u.negate_row(pivot_row);
            }
            pivot_cols.push((pivot_row, col));
            pivot_row += 1;
        }
        // Reduce entries above each pivot into [0, pivot).
        for &(pr, pc) in pivot_cols.iter() {
            for r in 0..pr {
                if h[(r, pc)].is_zero() {
                    continue;
                }
                let q = h[(r, pc)].div_euclid(&h[(pr, pc)]);
                h.row_axpy(r, pr, &-q.clone());
                u.row_axpy(r, pr, &-q);
            }
        }
        (h, u)
    }

    /// Number of nonzero rows (meaningful after HNF).
    pub fn nonzero_row_count(&self) -> usize {
        (0..self.rows)
            .filter(|&r| (0..self.cols).any(|c| !self[(r, c)].is_zero()))
            .count()
    }

    /// Drop all-zero rows.
    pub fn drop_zero_rows(&self) -> IntMat {
        let keep: Vec<usize> = (0..self.rows)
            .filter(|&r| (0..self.cols).any(|c| !self[(r, c)].is_zero()))
            .collect();
        IntMat::from_fn(keep.len(), self.cols, |r, c| self[(keep[r], c)].clone())
    }

    /// Basis (as rows, HNF-canonical) of the right kernel
    /// `{ x : self · x = 0 }`. The kernel of an integer matrix is
    /// automatically saturated.
    pub fn kernel(&self) -> IntMat {
        let (h, u) = self.transpose().row_hnf_with_transform();
        let mut rows = Vec::new();
        for r in 0..h.nrows() {
            if (0..h.ncols()).all(|c| h[(r, c)].is_zero()) {
                rows.push(u.row(r));
            }
        }
        if rows.is_empty() {
            IntMat::zeros(0, self.cols)
        } else {
            IntMat::from_rows(rows).row_hnf().drop_zero_rows()
        }
    }

    /// Inverse of a matrix with determinant ±1 (exact, integral).
    pub fn inverse_unimodular(&self) -> IntMat {
        assert!(self.is_square());
        let d = self.det();
        assert!(
            d.clone().abs().is_one(),
            "inverse_unimodular requires det = ±1, got {d}"
        );
        let n = self.rows;
        let adj = IntMat::from_fn(n, n, |r, c| {
            // adj[r][c] = cofactor(c, r)
            let minor = IntMat::from_fn(n - 1, n - 1, |i, j| {
                let ii = if i < c { i } else { i + 1 };
                let jj = if j < r { j } else { j + 1 };
                self[(ii, jj)].clone()
            });
            let cof = minor.det();
            if (r + c) % 2 == 0 {
                cof
            } else {
                -cof
            }
        });
        if d.is_one() {
            adj
        } else {
            adj.neg()
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            let t = self[(a, c)].clone();
            self[(a, c)] = self[(b, c)].clone();
            self[(b, c)] = t;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -self[(r, c)].clone();
            self[(r, c)] = v;
        }
    }

    /// row[dst] += k * row[src]
    fn row_axpy(&mut self, dst: usize, src: usize, k: &Int) {
        if k.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let t = &self[(src, c)] * k;
            self[(dst, c)] += t;
        }
    }

    /// Characteristic polynomial coefficients `c_0..c_n` (constant term
    /// first, leading coefficient 1) via Faddeev–LeVerrier; all divisions are
    /// exact.
    pub fn char_poly(&self) -> Vec<Int> {
        assert!(self.is_square());
        let n = self.rows;
        let mut coeffs = vec![Int::zero(); n + 1];
        coeffs[n] = Int::one();
        let mut m = IntMat::identity(n);
        for k in 1..=n {
            let am = self.mul(&m);
            let c = -am.trace() / int(k as i64);
            coeffs[n - k] = c.clone();
            m = am;
            for i in 0..n {
                m[(i, i)] += &c;
            }
        }
        coeffs
    }
}

/// Euclidean-style division helper on `BigInt` (quotient rounding toward
/// minus infinity of the ratio against a nonzero divisor, so the remainder
/// has the divisor's sign handled uniformly).
trait DivEuclidExt {
    fn div_euclid(&self, other: &Int) -> Int;
}

impl DivEuclidExt for Int {
    fn div_euclid(&self, other: &Int) -> Int {
        use num_integer::Integer;
        self.div_floor(other)
    }
}

trait OddExt {
    fn is_odd(&self) -> bool;
}

impl OddExt for Int {
    fn is_odd(&self) -> bool {
        use num_integer::Integer;
        Integer::is_odd(self)
    }
}

// ---------------------------------------------------------------------------
// Polynomial helpers over Z (dense, constant term first).
// ---------------------------------------------------------------------------

pub fn poly_deg(p: &[Int]) -> usize {
    p.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
}

pub fn poly_trim(p: &mut Vec<Int>) {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub fn poly_mul(a: &[Int], b: &[Int]) -> Vec<Int> {
    let mut out = vec![Int::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    poly_trim(&mut out);
    out
}

/// Try exact division of `a` by monic-leading `b` over Z; returns the
/// quotient when the remainder is zero and every intermediate division is
/// exact.
pub fn poly_div_exact(a: &[Int], b: &[Int]) -> Option<Vec<Int>> {
    let mut rem: Vec<Int> = a.to_vec();
    poly_trim(&mut rem);
    let db = poly_deg(b);
    let lead = &b[db];
    if rem.iter().all(|c| c.is_zero()) {
        return Some(vec![Int::zero()]);
    }
    let da = poly_deg(&rem);
    if da < db {
        return None;
    }
    let mut quot = vec![Int::zero(); da - db + 1];
    for k in (0..=(da - db)).rev() {
        let c = rem[k + db].clone();
        if c.is_zero() {
            continue;
        }
        if !(&c % lead).is_zero() {
            return None;
        }
        let q = &c / lead;
        quot[k] = q.clone();
        for j in 0..=db {
            let t = &b[j] * &q;
            rem[k + j] -= t;
        }
    }
    if rem.iter().all(|c| c.is_zero()) {
        Some(quot)
    } else {
        None
    }
}

/// The d-th cyclotomic polynomial, computed by exact division of `x^d − 1`
/// by the cyclotomic polynomials of the proper divisors of `d`.
pub fn cyclotomic(d: u64) -> Vec<Int> {
    let mut num = vec![Int::zero(); d as usize + 1];
    num[0] = -Int::one();
    num[d as usize] = Int::one();
    for e in 1..d {
        if d % e == 0 {
            let phi_e = cyclotomic(e);
            num = poly_div_exact(&num, &phi_e).expect("cyclotomic division is exact");
        }
    }
    num
}

/// Euler's totient.
pub fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

// ---------------------------------------------------------------------------
// Exact rational symmetric diagonalization (inertia).
// ---------------------------------------------------------------------------

/// Inertia `(p_plus, p_minus, p_zero)` of a symmetric integer matrix,
/// computed by exact rational congruence diagonalization (symmetric Gaussian
/// elimination with the standard rank-2 fix for zero diagonals).
pub fn inertia(g: &IntMat) -> (usize, usize, usize) {
    assert!(g.is_symmetric(), "inertia requires a symmetric matrix");
    let n = g.nrows();
    let mut a: Vec<Vec<Rat>> = (0..n)
        .map(|r| (0..n).map(|c| Rat::from(g[(r, c)].clone())).collect())
        .collect();
    let mut plus = 0;
    let mut minus = 0;
    let mut zero = 0;
    let mut idx: Vec<usize> = (0..n).collect();
    while !idx.is_empty() {
        // Prefer a nonzero diagonal pivot.
        if let Some(pos) = idx.iter().position(|&i| !a[i][i].is_zero()) {
            let p = idx.remove(pos);
            let piv = a[p][p].clone();
            if piv.is_positive() {
                plus += 1;
            } else {
                minus += 1;
            }
            for &i in idx.iter() {
                if a[i][p].is_zero() {
                    continue;
                }
                let f = &a[i][p] / &piv;
                for &j in idx.iter() {
                    let t = &f * &a[p][j];
                    a[i][j] = &a[i][j] - &t;
                }
                a[i][p] = Rat::zero();
            }
            // Symmetrize the cleared column/row (the updates above keep the
            // remaining principal block symmetric because we only read row p).
            for &j in idx.iter() {
                a[p][j] = Rat::zero();
                a[j][p] = Rat::zero();
            }
            continue;
        }
        // All remaining diagonal entries are zero; find an off-diagonal
        // nonzero pair and split it into a hyperbolic ±1 pair.
        let mut pair = None;
        'outer: for (pi, &i) in idx.iter().enumerate() {
            for &j in idx.iter().skip(pi + 1) {
                if !a[i][j].is_zero() {
                    pair = Some((i, j));
                    break 'outer;
                }
            }
        }
        let Some((i, j)) = pair else {
            zero += idx.len();
            break;
        };
        // Replace basis vector e_i by e_i + e_j: the diagonal entry at i
        // becomes 2·a[i][j] ≠ 0, and we loop back to the diagonal case.
        let row_j: Vec<Rat> = (0..n).map(|c| a[j][c].clone()).collect();
        for c in 0..n {
            let t = row_j[c].clone();
            a[i][c] = &a[i][c] + &t;
        }
        for r in 0..n {
            let t = a[r][j].clone();
            a[r][i] = &a[r][i] + &t;
        }
    }
    (plus, minus, zero)
}
