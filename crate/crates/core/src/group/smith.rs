//! Integer matrices, Smith normal form and the Hermite form used to
//! canonicalize subgroup lattices.

use std::fmt;

use num_integer::Integer;

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i128>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    /// Builds a matrix from row vectors. All rows must share one length.
    pub fn from_rows<R: AsRef<[i128]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[i128] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i128]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> i128 {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut a = self.clone();
        let mut sign = 1;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[(k, k)] == 0 {
                let Some(p) = (k + 1..n).find(|&i| a[(i, k)] != 0) else {
                    return 0;
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[(i, j)] = (a[(i, j)] * a[(k, k)] - a[(i, k)] * a[(k, j)]) / prev;
                }
            }
            prev = a[(k, k)];
        }
        sign * a[(n - 1, n - 1)]
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

    /// row[dst] += q * row[src]
    fn add_row(&mut self, dst: usize, src: usize, q: i128) {
        if q == 0 {
            return;
        }
        for j in 0..self.cols {
            let v = self[(src, j)];
            self[(dst, j)] += q * v;
        }
    }

    /// col[dst] += q * col[src]
    fn add_col(&mut self, dst: usize, src: usize, q: i128) {
        if q == 0 {
            return;
        }
        for i in 0..self.rows {
            let v = self[(i, src)];
            self[(i, dst)] += q * v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            self[(r, j)] = -self[(r, j)];
        }
    }

    fn negate_col(&mut self, c: usize) {
        for i in 0..self.rows {
            self[(i, c)] = -self[(i, c)];
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i128;
    fn index(&self, (i, j): (usize, usize)) -> &i128 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i128 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

/// `u * a * v == s` with `u`, `v` unimodular and `s` diagonal with
/// non-negative entries forming a divisibility chain.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SmithForm {
    /// Diagonal entries `s_1 | s_2 | ...`, zeros included.
    pub fn diagonal(&self) -> Vec<i128> {
        (0..self.s.nrows().min(self.s.ncols()))
            .map(|i| self.s[(i, i)])
            .collect()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let (m, n) = (a.nrows(), a.ncols());
    let mut s = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut u_inv = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let mut v_inv = IntMatrix::identity(n);

    for t in 0..m.min(n) {
        loop {
            // smallest nonzero magnitude in the trailing block
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let x = s[(i, j)];
                    if x != 0 && pivot.is_none_or(|(pi, pj)| x.abs() < s[(pi, pj)].abs()) {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                return finish(u, s, v, u_inv, v_inv);
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            u_inv.swap_cols(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);
            v_inv.swap_rows(t, pj);

            let p = s[(t, t)];
            let mut dirty = false;
            for i in t + 1..m {
                let q = Integer::div_floor(&s[(i, t)], &p);
                if q != 0 {
                    s.add_row(i, t, -q);
                    u.add_row(i, t, -q);
                    u_inv.add_col(t, i, q);
                }
                dirty |= s[(i, t)] != 0;
            }
            for j in t + 1..n {
                let q = Integer::div_floor(&s[(t, j)], &p);
                if q != 0 {
                    s.add_col(j, t, -q);
                    v.add_col(j, t, -q);
                    v_inv.add_row(t, j, q);
                }
                dirty |= s[(t, j)] != 0;
            }
            if dirty {
                continue;
            }
            // divisibility: fold an offending row into the pivot row
            let offending = (t + 1..m).find(|&i| (t + 1..n).any(|j| s[(i, j)] % p != 0));
            if let Some(i) = offending {
                s.add_row(t, i, 1);
                u.add_row(t, i, 1);
                u_inv.add_col(i, t, -1);
                continue;
            }
            break;
        }
        if s[(t, t)] < 0 {
            s.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
    }
    finish(u, s, v, u_inv, v_inv)
}

fn finish(
    u: IntMatrix,
    s: IntMatrix,
    v: IntMatrix,
    u_inv: IntMatrix,
    v_inv: IntMatrix,
) -> SmithForm {
    SmithForm {
        u,
        s,
        v,
        u_inv,
        v_inv,
    }
}

/// Canonical Hermite basis of the lattice spanned by `generators` together
/// with `m_j e_j` for every modulus. The result is square, upper triangular,
/// with positive diagonal `h_jj | m_j`-compatible and entries above each
/// pivot reduced into `[0, h_jj)`; it depends only on the lattice.
pub fn lattice_hermite_basis(generators: &[Vec<i128>], moduli: &[u64]) -> IntMatrix {
    let k = moduli.len();
    let reduce_tail = |row: &mut Vec<i128>, from: usize| {
        for c in from..k {
            row[c] = row[c].rem_euclid(moduli[c] as i128);
        }
    };
    let mut work: Vec<Vec<i128>> = Vec::with_capacity(generators.len());
    for g in generators {
        assert_eq!(g.len(), k, "generator length mismatch");
        let mut row = g.clone();
        reduce_tail(&mut row, 0);
        if row.iter().any(|&x| x != 0) {
            work.push(row);
        }
    }

    // The unit rows m_c e_c stay out of `work`, so reducing column c
    // modulo m_c never changes the lattice.
    let mut basis = IntMatrix::zeros(k, k);
    for j in 0..k {
        let mut pivot = vec![0i128; k];
        pivot[j] = moduli[j] as i128;
        let mut rest = Vec::with_capacity(work.len());
        for row in work.drain(..) {
            if row[j] == 0 {
                rest.push(row);
                continue;
            }
            let (a, b) = (pivot[j], row[j]);
            let eg = a.extended_gcd(&b);
            let (g, x, y) = (eg.gcd, eg.x, eg.y);
            let (ca, cb) = (a / g, b / g);
            let mut other: Vec<i128> = pivot
                .iter()
                .zip(&row)
                .map(|(&pa, &rb)| cb * pa - ca * rb)
                .collect();
            let mut next: Vec<i128> = pivot
                .iter()
                .zip(&row)
                .map(|(&pa, &rb)| x * pa + y * rb)
                .collect();
            debug_assert_eq!(other[j], 0);
            reduce_tail(&mut other, j + 1);
            reduce_tail(&mut next, j + 1);
            if other.iter().any(|&x| x != 0) {
                rest.push(other);
            }
            pivot = next;
        }
        if pivot[j] < 0 {
            pivot.iter_mut().for_each(|x| *x = -*x);
            reduce_tail(&mut pivot, j + 1);
        }
        for (c, &x) in pivot.iter().enumerate() {
            basis[(j, c)] = x;
        }
        work = rest;
    }

    // reduce entries above each pivot
    for j in 0..k {
        let h = basis[(j, j)];
        for i in 0..j {
            let q = Integer::div_floor(&basis[(i, j)], &h);
            if q != 0 {
                basis.add_row(i, j, -q);
            }
        }
    }
    basis
}
