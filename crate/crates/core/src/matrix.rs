//! Exact integer matrices: determinants, Hermite normal form, saturated
//! kernels, integer linear solving, and strictly positive kernel points.
//!
//! All arithmetic is over `BigInt`/`BigRational`; nothing here is ever
//! rounded. Kernel bases are saturated (they generate the full integer
//! kernel lattice, not a finite-index sublattice), which matters downstream:
//! a weight family parameterized by a non-saturated basis would miss
//! primitive solutions.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl std::fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self[(r, c)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (r, c): (usize, usize)) -> &BigInt {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("determinant requires a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Outcome of `kernel_data`: determinant (square matrices only), rank, and a
/// saturated basis of the integer kernel lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelData {
    pub det: Option<BigInt>,
    pub rank: usize,
    pub kernel: Vec<Vec<BigInt>>,
}

/// Solution set of `A x = b` over the integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinearSolution {
    /// No rational solution, or a rational solution exists but no integer one.
    None,
    /// Exactly one solution over the rationals, and it is integral.
    Unique(Vec<BigInt>),
    /// Infinitely many: one particular solution plus a kernel lattice basis.
    Affine { particular: Vec<BigInt>, kernel: Vec<Vec<BigInt>> },
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> IntMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|r| {
                let mut acc = BigInt::zero();
                for c in 0..self.cols {
                    acc += &self[(r, c)] * &v[c];
                }
                acc
            })
            .collect()
    }

    pub fn mul_mat(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self[(r, k)].is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let add = &self[(r, k)] * &other[(k, c)];
                    out[(r, c)] += add;
                }
            }
        }
        out
    }

    /// Fraction-free determinant (Bareiss). Errors on non-square input.
    pub fn det_bareiss(&self) -> Result<BigInt, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !m[(i, k)].is_zero()) {
                    Some(i) => {
                        for c in 0..n {
                            let tmp = m[(k, c)].clone();
                            m[(k, c)] = m[(i, c)].clone();
                            m[(i, c)] = tmp;
                        }
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = &m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)];
                    let (q, r) = t.div_rem(&prev);
                    debug_assert!(r.is_zero(), "Bareiss division not exact");
                    m[(i, j)] = q;
                }
                m[(i, k)] = BigInt::zero();
            }
            prev = m[(k, k)].clone();
        }
        Ok(sign * m[(n - 1, n - 1)].clone())
    }

    /// Column-style Hermite reduction tracking unimodular column operations:
    /// returns `(h, u)` with `self * u == h`, `u` unimodular, and the pivot
    /// columns of `h` in staircase form. Kernel vectors are the columns of
    /// `u` over the zero columns of `h`.
    fn column_echelon(&self) -> (IntMatrix, IntMatrix, usize) {
        let mut h = self.clone();
        let mut u = IntMatrix::identity(self.cols);
        let mut next = 0usize; // next pivot column
        for r in 0..self.rows {
            if next == self.cols {
                break;
            }
            // gcd-reduce the entries of row r across columns next..
            loop {
                let mut piv: Option<usize> = None;
                for j in next..self.cols {
                    if !h[(r, j)].is_zero() {
                        piv = match piv {
                            None => Some(j),
                            Some(p) => {
                                if h[(r, j)].abs() < h[(r, p)].abs() {
                                    Some(j)
                                } else {
                                    Some(p)
                                }
                            }
                        };
                    }
                }
                let Some(p) = piv else { break };
                // reduce every other column in the row by the pivot column
                let mut all_zero = true;
                for j in next..self.cols {
                    if j == p || h[(r, j)].is_zero() {
                        continue;
                    }
                    let q = div_round(&h[(r, j)], &h[(r, p)]);
                    if !q.is_zero() {
                        for row in 0..self.rows {
                            let t = &h[(row, j)] - &q * &h[(row, p)];
                            h[(row, j)] = t;
                        }
                        for row in 0..self.cols {
                            let t = &u[(row, j)] - &q * &u[(row, p)];
                            u[(row, j)] = t;
                        }
                    }
                    if !h[(r, j)].is_zero() {
                        all_zero = false;
                    }
                }
                if all_zero {
                    // move pivot column into place and normalize its sign
                    if p != next {
                        h.swap_cols(p, next);
                        u.swap_cols(p, next);
                    }
                    if h[(r, next)].is_negative() {
                        h.negate_col(next);
                        u.negate_col(next);
                    }
                    next += 1;
                    break;
                }
            }
        }
        (h, u, next)
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    fn negate_col(&mut self, c: usize) {
        for r in 0..self.rows {
            let v = -std::mem::take(&mut self[(r, c)]);
            self[(r, c)] = v;
        }
    }

    /// Determinant (square input only), rank, and a saturated integer kernel
    /// basis, all computed exactly.
    pub fn kernel_data(&self) -> KernelData {
        let (h, u, rank) = self.column_echelon();
        let mut kernel = Vec::new();
        for j in rank..self.cols {
            debug_assert!((0..self.rows).all(|r| h[(r, j)].is_zero()));
            let col: Vec<BigInt> = (0..self.cols).map(|r| u[(r, j)].clone()).collect();
            kernel.push(col);
        }
        let det = if self.rows == self.cols {
            Some(self.det_bareiss().expect("square"))
        } else {
            None
        };
        KernelData { det, rank, kernel }
    }

    pub fn rank(&self) -> usize {
        self.column_echelon().2
    }

    /// Solves `A x = b` over the integers, classifying the solution set.
    pub fn solve(&self, b: &[BigInt]) -> LinearSolution {
        assert_eq!(b.len(), self.rows, "rhs length mismatch");
        let (h, u, rank) = self.column_echelon();
        // pivot positions: for column k, the first nonzero row
        let mut y = vec![BigInt::zero(); self.cols];
        let mut resid: Vec<BigInt> = b.to_vec();
        for k in 0..rank {
            let r = (0..self.rows)
                .find(|&r| !h[(r, k)].is_zero())
                .expect("pivot column is nonzero");
            // rows above the pivot row are zero in columns >= k, so resid[r]
            // must be produced by column k alone
            let (q, rem) = resid[r].div_rem(&h[(r, k)]);
            if !rem.is_zero() {
                return LinearSolution::None;
            }
            for row in 0..self.rows {
                let t = &resid[row] - &q * &h[(row, k)];
                resid[row] = t;
            }
            y[k] = q;
        }
        if resid.iter().any(|v| !v.is_zero()) {
            return LinearSolution::None;
        }
        let x = u.mul_vec(&y);
        debug_assert_eq!(self.mul_vec(&x), b.to_vec());
        if rank == self.cols {
            LinearSolution::Unique(x)
        } else {
            let kernel = (rank..self.cols)
                .map(|j| (0..self.cols).map(|r| u[(r, j)].clone()).collect())
                .collect();
            LinearSolution::Affine { particular: x, kernel }
        }
    }
}

/// Quotient rounded to nearest (ties toward zero), used to keep Hermite
/// reduction entries small.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut q, r) = a.div_rem(b);
    let two_r = BigInt::from(2) * r.abs();
    if two_r > b.abs() {
        if (a.is_negative()) == (b.is_negative()) {
            q += 1;
        } else {
            q -= 1;
        }
    }
    q
}

/// Canonical row Hermite normal form of the lattice spanned by the given
/// rows: pivots positive, entries above each pivot reduced into `[0, pivot)`,
/// zero rows dropped, rows sorted by pivot column. Two generating sets span
/// the same row lattice iff their canonical forms are equal.
pub fn row_hnf_canonical(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let cols = rows[0].len();
    assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let mut pivot_rows: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut top = 0usize;
    for col in 0..cols {
        // gcd-reduce column `col` among rows top..
        loop {
            let mut piv: Option<usize> = None;
            for i in top..m.len() {
                if !m[i][col].is_zero() {
                    piv = match piv {
                        None => Some(i),
                        Some(p) => {
                            if m[i][col].abs() < m[p][col].abs() {
                                Some(i)
                            } else {
                                Some(p)
                            }
                        }
                    };
                }
            }
            let Some(p) = piv else { break };
            let mut done = true;
            for i in top..m.len() {
                if i == p || m[i][col].is_zero() {
                    continue;
                }
                let q = div_round(&m[i][col], &m[p][col]);
                if !q.is_zero() {
                    for c in 0..cols {
                        let t = &m[i][c] - &q * &m[p][c];
                        m[i][c] = t;
                    }
                }
                if !m[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                m.swap(top, p);
                if m[top][col].is_negative() {
                    for c in 0..cols {
                        m[top][c] = -std::mem::take(&mut m[top][c]);
                    }
                }
                pivot_rows.push((top, col));
                top += 1;
                break;
            }
        }
    }
    m.truncate(top);
    // reduce entries above each pivot into [0, pivot)
    for &(pr, pc) in pivot_rows.iter() {
        for i in 0..pr {
            let q = m[i][pc].div_floor(&m[pr][pc]);
            if !q.is_zero() {
                for c in 0..cols {
                    let t = &m[i][c] - &q * &m[pr][c];
                    m[i][c] = t;
                }
            }
        }
    }
    m
}

/// Searches for a strictly positive integer point in the kernel of `a`,
/// i.e. `v` with `a v = 0` and every coordinate `>= 1`. Exact rational
/// feasibility via Fourier-Motzkin over the saturated kernel basis, then
/// denominator clearing. Returns `None` exactly when no such point exists.
pub fn positive_integer_kernel_point(a: &IntMatrix) -> Option<Vec<BigInt>> {
    let kd = a.kernel_data();
    positive_point_in_row_span(&kd.kernel, a.n_cols())
}

/// Same search, but over the row span of an explicit (saturated) basis.
pub fn positive_point_in_row_span(basis: &[Vec<BigInt>], n: usize) -> Option<Vec<BigInt>> {
    if basis.is_empty() {
        return None;
    }
    assert!(basis.iter().all(|r| r.len() == n), "basis width mismatch");
    let r = basis.len();
    // constraints: for each coordinate j, sum_i t_i * basis[i][j] >= 1
    let mut cons: Vec<(Vec<BigRational>, BigRational)> = Vec::new();
    for j in 0..n {
        let row: Vec<BigRational> = (0..r)
            .map(|i| BigRational::from_integer(basis[i][j].clone()))
            .collect();
        cons.push((row, BigRational::one()));
    }
    let t = fourier_motzkin_feasible(cons, r)?;
    // v = basis^T t, then clear denominators
    let mut denom = BigInt::one();
    for ti in &t {
        denom = denom.lcm(ti.denom());
    }
    let scaled: Vec<BigInt> = t
        .iter()
        .map(|ti| (ti * BigRational::from_integer(denom.clone())).to_integer())
        .collect();
    let mut v = vec![BigInt::zero(); n];
    for (i, row) in basis.iter().enumerate() {
        for j in 0..n {
            v[j] += &scaled[i] * &row[j];
        }
    }
    debug_assert!(v.iter().all(|x| x.is_positive()));
    // make the witness primitive for reproducibility
    let mut g = BigInt::zero();
    for x in &v {
        g = g.gcd(x);
    }
    if !g.is_one() && !g.is_zero() {
        for x in &mut v {
            *x = &*x / &g;
        }
    }
    Some(v)
}

/// Feasibility of `row . t >= c` systems by Fourier-Motzkin elimination;
/// returns a satisfying rational point if one exists.
fn fourier_motzkin_feasible(
    cons: Vec<(Vec<BigRational>, BigRational)>,
    n_vars: usize,
) -> Option<Vec<BigRational>> {
    // eliminate variables from the end; keep each level for back-substitution
    let mut levels: Vec<Vec<(Vec<BigRational>, BigRational)>> = vec![normalize_cons(cons)];
    for var in (0..n_vars).rev() {
        let current = levels.last().unwrap();
        let mut next: Vec<(Vec<BigRational>, BigRational)> = Vec::new();
        let mut lowers: Vec<(Vec<BigRational>, BigRational)> = Vec::new(); // coeff > 0
        let mut uppers: Vec<(Vec<BigRational>, BigRational)> = Vec::new(); // coeff < 0
        for (row, c) in current {
            let a = &row[var];
            if a.is_zero() {
                next.push((row.clone(), c.clone()));
            } else if a.is_positive() {
                lowers.push((row.clone(), c.clone()));
            } else {
                uppers.push((row.clone(), c.clone()));
            }
        }
        for (lr, lc) in &lowers {
            for (ur, uc) in &uppers {
                // lr.t >= lc with lr[var] > 0, ur.t >= uc with ur[var] < 0;
                // scale and add to cancel var
                let la = &lr[var];
                let ua = &ur[var];
                let mut row: Vec<BigRational> = Vec::with_capacity(n_vars);
                for k in 0..n_vars {
                    row.push(&lr[k] / la + &ur[k] / -ua);
                }
                let c = lc / la + uc / -ua;
                row[var] = BigRational::zero();
                next.push((row, c));
            }
        }
        levels.push(normalize_cons(next));
    }
    // after eliminating everything, rows are all-zero: need 0 >= c
    for (row, c) in levels.last().unwrap() {
        debug_assert!(row.iter().all(|a| a.is_zero()));
        if c.is_positive() {
            return None;
        }
    }
    // back-substitute
    let mut t = vec![BigRational::zero(); n_vars];
    for var in 0..n_vars {
        // level `levels[n_vars - var]` has vars var.. eliminated; use the
        // previous level, where `var` is the highest-index live variable
        let level = &levels[n_vars - var - 1];
        let mut lo: Option<BigRational> = None;
        let mut hi: Option<BigRational> = None;
        for (row, c) in level {
            let a = &row[var];
            if a.is_zero() {
                continue;
            }
            let mut rest = c.clone();
            for k in 0..var {
                rest -= &row[k] * &t[k];
            }
            let bound = rest / a;
            if a.is_positive() {
                lo = Some(match lo {
                    None => bound,
                    Some(l) => l.max(bound),
                });
            } else {
                hi = Some(match hi {
                    None => bound,
                    Some(h) => h.min(bound),
                });
            }
        }
        t[var] = match (lo, hi) {
            (Some(l), Some(h)) => {
                debug_assert!(l <= h, "inconsistent bounds after feasibility check");
                (l + h) / BigRational::from_integer(BigInt::from(2))
            }
            (Some(l), None) => l,
            (None, Some(h)) => h,
            (None, None) => BigRational::zero(),
        };
    }
    Some(t)
}

/// Scales each constraint to a primitive integer normal and deduplicates,
/// keeping only the strongest bound per normal direction.
fn normalize_cons(
    cons: Vec<(Vec<BigRational>, BigRational)>,
) -> Vec<(Vec<BigRational>, BigRational)> {
    let mut out: Vec<(Vec<BigRational>, BigRational)> = Vec::new();
    'outer: for (row, c) in cons {
        // clear denominators and divide by gcd
        let mut denom = c.denom().clone();
        for a in &row {
            denom = denom.lcm(a.denom());
        }
        let scale = BigRational::from_integer(denom);
        let ints: Vec<BigInt> = row.iter().map(|a| (a * &scale).to_integer()).collect();
        let cint = (&c * &scale).to_integer();
        let mut g = BigInt::zero();
        for a in &ints {
            g = g.gcd(a);
        }
        if g.is_zero() {
            // all-zero normal: keep only if it is binding (c > 0 marks infeasible)
            if cint.is_positive() {
                out.push((row.iter().map(|_| BigRational::zero()).collect(), BigRational::one()));
            }
            continue;
        }
        let norm: Vec<BigRational> = ints
            .iter()
            .map(|a| BigRational::from_integer(a / &g))
            .collect();
        let bound = BigRational::new(cint, g);
        for (erow, ec) in out.iter_mut() {
            if *erow == norm {
                if bound > *ec {
                    *ec = bound;
                }
                continue 'outer;
            }
        }
        out.push((norm, bound));
    }
    out
}
