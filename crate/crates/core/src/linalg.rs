//! Dense exact linear algebra over a tower level: echelon forms, rank,
//! kernels, subspaces and quotient coordinates.

use crate::gf::{Fe, Tower};

/// Row-major dense matrix of field codes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Fe>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Fe>], cols: usize) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Matrix { rows: rows.len(), cols, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<Fe>], rows: usize) -> Matrix {
        let mut m = Matrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "ragged columns");
            for (i, &x) in c.iter().enumerate() {
                m.data[i * m.cols + j] = x;
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Fe {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Fe) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Fe] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Fe> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul(&self, t: &Tower, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                let orow = other.row(k);
                let base = i * other.cols;
                for (j, &b) in orow.iter().enumerate() {
                    if b != 0 {
                        out.data[base + j] = t.add(out.data[base + j], t.mul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, t: &Tower, v: &[Fe]) -> Vec<Fe> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| if a == 0 || b == 0 { acc } else { t.add(acc, t.mul(a, b)) })
            })
            .collect()
    }

    pub fn add(&self, t: &Tower, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| t.add(a, b)).collect(),
        }
    }

    pub fn sub(&self, t: &Tower, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| t.sub(a, b)).collect(),
        }
    }

    pub fn scale(&self, t: &Tower, c: Fe) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| t.mul(a, c)).collect() }
    }

    /// Kronecker product with `self` as the outer (slow) factor.
    pub fn kron(&self, t: &Tower, other: &Matrix) -> Matrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Matrix::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == 0 {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.data[(i * other.rows + k) * cols + j * other.cols + l] = t.mul(a, other.get(k, l));
                    }
                }
            }
        }
        out
    }

    /// Stack blocks vertically.
    pub fn vstack(blocks: &[Matrix]) -> Matrix {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            assert_eq!(b.cols, cols);
            data.extend_from_slice(&b.data);
            rows += b.rows;
        }
        Matrix { rows, cols, data }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self, t: &Tower) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else { continue };
            if pr != r {
                for j in 0..m.cols {
                    m.data.swap(pr * m.cols + j, r * m.cols + j);
                }
            }
            let inv = t.inv(m.get(r, c)).expect("pivot is nonzero");
            for j in c..m.cols {
                let v = m.get(r, j);
                m.set(r, j, t.mul(v, inv));
            }
            let pivot_row: Vec<Fe> = m.row(r).to_vec();
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c);
                if f == 0 {
                    continue;
                }
                let base = i * m.cols;
                for j in c..m.cols {
                    let pv = pivot_row[j];
                    if pv != 0 {
                        m.data[base + j] = t.sub(m.data[base + j], t.mul(f, pv));
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, t: &Tower) -> usize {
        self.rref(t).1.len()
    }

    /// Basis of the right null space {v : M v = 0}, in reduced echelon form.
    pub fn kernel(&self, t: &Tower) -> Subspace {
        let (r, pivots) = self.rref(t);
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut vecs = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0; self.cols];
            v[free] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = t.neg(r.get(i, free));
            }
            vecs.push(v);
        }
        Subspace::from_vectors(t, self.cols, &vecs)
    }

    /// Column space as a subspace.
    pub fn image(&self, t: &Tower) -> Subspace {
        let cols: Vec<Vec<Fe>> = (0..self.cols).map(|j| self.col(j)).collect();
        Subspace::from_vectors(t, self.rows, &cols)
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self, t: &Tower) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let (r, pivots) = aug.rref(t);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j));
            }
        }
        Some(inv)
    }

    /// Some solution x of M x = b, if one exists.
    pub fn solve(&self, t: &Tower, b: &[Fe]) -> Option<Vec<Fe>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, b[i]);
        }
        let (r, pivots) = aug.rref(t);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0; self.cols];
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(i, self.cols);
        }
        Some(x)
    }
}

/// A subspace of F^n held as a reduced row echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    rows: Vec<Vec<Fe>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Subspace {
        Subspace { ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Subspace {
        let rows = (0..ambient)
            .map(|i| {
                let mut v = vec![0; ambient];
                v[i] = 1;
                v
            })
            .collect();
        Subspace { ambient, rows, pivots: (0..ambient).collect() }
    }

    pub fn from_vectors(t: &Tower, ambient: usize, vecs: &[Vec<Fe>]) -> Subspace {
        if vecs.is_empty() {
            return Subspace::zero(ambient);
        }
        let m = Matrix::from_rows(vecs, ambient);
        let (r, pivots) = m.rref(t);
        let rows = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        Subspace { ambient, rows, pivots }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<Fe>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Columns that are not pivots: a monomial basis of a complement.
    pub fn non_pivots(&self) -> Vec<usize> {
        let mut is_p = vec![false; self.ambient];
        for &c in &self.pivots {
            is_p[c] = true;
        }
        (0..self.ambient).filter(|&c| !is_p[c]).collect()
    }

    /// Remainder of v after clearing every pivot column.
    pub fn reduce(&self, t: &Tower, v: &[Fe]) -> Vec<Fe> {
        let mut w = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = w[pc];
            if c == 0 {
                continue;
            }
            for (x, &r) in w.iter_mut().zip(row) {
                if r != 0 {
                    *x = t.sub(*x, t.mul(c, r));
                }
            }
        }
        w
    }

    pub fn contains(&self, t: &Tower, v: &[Fe]) -> bool {
        self.reduce(t, v).iter().all(|&x| x == 0)
    }

    pub fn contains_all(&self, t: &Tower, other: &Subspace) -> bool {
        other.rows.iter().all(|v| self.contains(t, v))
    }

    /// Add a vector; returns whether the dimension grew.
    pub fn insert(&mut self, t: &Tower, v: &[Fe]) -> bool {
        let w = self.reduce(t, v);
        if w.iter().all(|&x| x == 0) {
            return false;
        }
        let mut all = self.rows.clone();
        all.push(w);
        *self = Subspace::from_vectors(t, self.ambient, &all);
        true
    }

    pub fn sum(&self, t: &Tower, other: &Subspace) -> Subspace {
        let mut all = self.rows.clone();
        all.extend(other.rows.iter().cloned());
        Subspace::from_vectors(t, self.ambient, &all)
    }

    /// Intersection via the kernel of [A; -B]^T.
    pub fn intersect(&self, t: &Tower, other: &Subspace) -> Subspace {
        let n = self.ambient;
        let a = self.dim();
        let b = other.dim();
        if a == 0 || b == 0 {
            return Subspace::zero(n);
        }
        let mut m = Matrix::zeros(n, a + b);
        for (j, v) in self.rows.iter().enumerate() {
            for i in 0..n {
                m.set(i, j, v[i]);
            }
        }
        for (j, v) in other.rows.iter().enumerate() {
            for i in 0..n {
                m.set(i, a + j, t.neg(v[i]));
            }
        }
        let k = m.kernel(t);
        let vecs: Vec<Vec<Fe>> = k
            .basis()
            .iter()
            .map(|c| {
                let mut v = vec![0; n];
                for (j, row) in self.rows.iter().enumerate() {
                    if c[j] != 0 {
                        for i in 0..n {
                            v[i] = t.add(v[i], t.mul(c[j], row[i]));
                        }
                    }
                }
                v
            })
            .collect();
        Subspace::from_vectors(t, n, &vecs)
    }

    /// Quotient coordinates of v: its reduced form read at the non-pivot columns.
    pub fn quotient_coords(&self, t: &Tower, v: &[Fe]) -> Vec<Fe> {
        let w = self.reduce(t, v);
        self.non_pivots().into_iter().map(|c| w[c]).collect()
    }

    /// Lift quotient coordinates to the canonical representative.
    pub fn lift(&self, coords: &[Fe]) -> Vec<Fe> {
        let mut v = vec![0; self.ambient];
        for (c, &x) in self.non_pivots().into_iter().zip(coords) {
            v[c] = x;
        }
        v
    }

    /// Matrix of the basis, one vector per row.
    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_rows(&self.rows, self.ambient)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tower() -> Tower {
        Tower::new(5, 1).unwrap()
    }

    #[test]
    fn identity_and_zero() {
        let t = tower();
        assert_eq!(Matrix::identity(4).rank(&t), 4);
        let z = Matrix::zeros(3, 4);
        assert_eq!(z.rank(&t), 0);
        assert_eq!(z.kernel(&t).dim(), 4);
    }

    #[test]
    fn kernel_vectors_are_killed() {
        let t = tower();
        let m = Matrix::from_rows(&[vec![1, 2, 3, 4], vec![2, 4, 1, 3], vec![3, 1, 4, 2]], 4);
        let k = m.kernel(&t);
        assert_eq!(k.dim() + m.rank(&t), 4);
        for v in k.basis() {
            assert!(m.mul_vec(&t, v).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn inverse_and_solve() {
        let t = tower();
        let m = Matrix::from_rows(&[vec![1, 2], vec![3, 4]], 2);
        let inv = m.inverse(&t).unwrap();
        assert_eq!(m.mul(&t, &inv), Matrix::identity(2));
        let x = m.solve(&t, &[1, 0]).unwrap();
        assert_eq!(m.mul_vec(&t, &x), vec![1, 0]);
        let sing = Matrix::from_rows(&[vec![1, 2], vec![2, 4]], 2);
        assert!(sing.inverse(&t).is_none());
        assert!(sing.solve(&t, &[1, 0]).is_none());
    }

    #[test]
    fn subspace_ops() {
        let t = tower();
        let a = Subspace::from_vectors(&t, 3, &[vec![1, 0, 0], vec![0, 1, 0]]);
        let b = Subspace::from_vectors(&t, 3, &[vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(a.intersect(&t, &b).dim(), 1);
        assert_eq!(a.sum(&t, &b).dim(), 3);
        assert!(a.contains(&t, &[3, 4, 0]));
        assert!(!a.contains(&t, &[0, 0, 1]));
        let q = a.quotient_coords(&t, &[1, 2, 3]);
        assert_eq!(q, vec![3]);
        assert_eq!(a.lift(&q), vec![0, 0, 3]);
    }
}
