//! Dense matrices of field-element codes and Gaussian elimination over
//! GF(p^e). Everything here is exact; reduced row echelon form (unit pivots,
//! strictly increasing pivot columns, zero rows dropped) is the canonical
//! representative used for subspace identity throughout the crate.

use crate::gf::FiniteField;

/// Row-major matrix of raw element codes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<u32>,
}

impl Mat {
    pub fn zero(rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, a: vec![0; rows * cols] }
    }

    pub fn from_rows(cols: usize, rows: &[Vec<u32>]) -> Mat {
        let mut a = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "row length mismatch");
            a.extend_from_slice(r);
        }
        Mat { rows: rows.len(), cols, a }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            m.a[i * n + i] = 1;
        }
        m
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> u32 {
        self.a[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.a[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.a[r * self.cols..(r + 1) * self.cols]
    }

    pub fn push_row(&mut self, row: &[u32]) {
        assert_eq!(row.len(), self.cols);
        self.a.extend_from_slice(row);
        self.rows += 1;
    }

    pub fn stack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols);
        let mut a = self.a.clone();
        a.extend_from_slice(&other.a);
        Mat { rows: self.rows + other.rows, cols: self.cols, a }
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[u32]> {
        self.a.chunks(self.cols.max(1)).take(self.rows)
    }
}

/// In-place reduced row echelon form; returns the pivot columns. Zero rows
/// sink to the bottom but are not removed.
pub fn rref_in_place(f: &FiniteField, m: &mut Mat) -> Vec<usize> {
    let (rows, cols) = (m.rows, m.cols);
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let mut pr = None;
        for i in r..rows {
            if m.at(i, c) != 0 {
                pr = Some(i);
                break;
            }
        }
        let Some(pr) = pr else { continue };
        if pr != r {
            for j in 0..cols {
                m.a.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = f.inv(m.at(r, c));
        if inv != 1 {
            for j in c..cols {
                let v = m.at(r, j);
                m.set(r, j, f.mul(v, inv));
            }
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = m.at(i, c);
            if factor == 0 {
                continue;
            }
            for j in c..cols {
                let t = f.mul(factor, m.at(r, j));
                let v = m.at(i, j);
                m.set(i, j, f.sub(v, t));
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Canonical row space: RREF with zero rows dropped.
pub fn row_space(f: &FiniteField, m: &Mat) -> (Mat, Vec<usize>) {
    let mut w = m.clone();
    let pivots = rref_in_place(f, &mut w);
    w.a.truncate(pivots.len() * w.cols);
    w.rows = pivots.len();
    (w, pivots)
}

pub fn rank(f: &FiniteField, m: &Mat) -> usize {
    let mut w = m.clone();
    rref_in_place(f, &mut w).len()
}

/// Canonical basis of { y : m·y = 0 } (the right kernel), as the RREF of the
/// standard free-column basis.
pub fn nullspace(f: &FiniteField, m: &Mat) -> Mat {
    let (r, pivots) = row_space(f, m);
    let cols = m.cols;
    let pivot_set: Vec<bool> = {
        let mut v = vec![false; cols];
        for &c in &pivots {
            v[c] = true;
        }
        v
    };
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_set[free] {
            continue;
        }
        let mut v = vec![0u32; cols];
        v[free] = 1;
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = f.neg(r.at(i, free));
        }
        basis.push(v);
    }
    let (ns, _) = row_space(f, &Mat::from_rows(cols, &basis));
    ns
}

pub fn mat_mul(f: &FiniteField, a: &Mat, b: &Mat) -> Mat {
    assert_eq!(a.cols, b.rows);
    let mut out = Mat::zero(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a.at(i, k);
            if aik == 0 {
                continue;
            }
            for j in 0..b.cols {
                let t = f.mul(aik, b.at(k, j));
                let v = out.at(i, j);
                out.set(i, j, f.add(v, t));
            }
        }
    }
    out
}

/// v·m for a row vector v.
pub fn row_mul(f: &FiniteField, v: &[u32], m: &Mat) -> Vec<u32> {
    assert_eq!(v.len(), m.rows);
    let mut out = vec![0u32; m.cols];
    for (k, &vk) in v.iter().enumerate() {
        if vk == 0 {
            continue;
        }
        for j in 0..m.cols {
            out[j] = f.add(out[j], f.mul(vk, m.at(k, j)));
        }
    }
    out
}

/// Inverse of a square matrix, or None if singular.
pub fn inverse(f: &FiniteField, m: &Mat) -> Option<Mat> {
    assert_eq!(m.rows, m.cols);
    let n = m.rows;
    let mut aug = Mat::zero(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug.set(i, j, m.at(i, j));
        }
        aug.set(i, n + i, 1);
    }
    let pivots = rref_in_place(f, &mut aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    let mut out = Mat::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, aug.at(i, n + j));
        }
    }
    Some(out)
}

/// Solves x·rows = v when v lies in the row space; `rows` need not be square.
/// Returns None when v is outside the row space.
pub fn express_in_rows(f: &FiniteField, rows: &Mat, v: &[u32]) -> Option<Vec<u32>> {
    assert_eq!(rows.cols, v.len());
    // Transpose to the column convention and eliminate the augmented system.
    let n = rows.rows;
    let mut aug = Mat::zero(rows.cols, n + 1);
    for i in 0..rows.cols {
        for j in 0..n {
            aug.set(i, j, rows.at(j, i));
        }
        aug.set(i, n, v[i]);
    }
    let pivots = rref_in_place(f, &mut aug);
    if pivots.contains(&n) {
        return None; // inconsistent
    }
    let mut x = vec![0u32; n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug.at(r, n);
    }
    Some(x)
}

/// True iff every one of `rows` reduces to zero against the RREF matrix
/// `rref` — i.e. the row space of `rows` is contained in that of `rref`.
pub fn reduces_to_zero(f: &FiniteField, rows: &Mat, rref: &Mat, rref_pivots: &[usize]) -> bool {
    debug_assert_eq!(rref_pivots.len(), rref.rows);
    let cols = rref.cols;
    let mut buf = vec![0u32; cols];
    for row in rows.rows_iter() {
        buf.copy_from_slice(row);
        for (i, &pc) in rref_pivots.iter().enumerate() {
            let factor = buf[pc];
            if factor == 0 {
                continue;
            }
            for j in pc..cols {
                let t = f.mul(factor, rref.at(i, j));
                buf[j] = f.sub(buf[j], t);
            }
        }
        if buf.iter().any(|&x| x != 0) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FiniteField;

    #[test]
    fn rref_is_canonical_for_equal_row_spaces() {
        let f = FiniteField::new(3, 1, None).unwrap();
        let a = Mat::from_rows(3, &[vec![1, 2, 0], vec![0, 1, 1]]);
        let b = Mat::from_rows(3, &[vec![2, 1, 0], vec![1, 0, 1]]);
        let (ra, _) = row_space(&f, &a);
        let (rb, _) = row_space(&f, &b);
        assert_eq!(ra, rb);
    }

    #[test]
    fn nullspace_annihilates_the_matrix() {
        let f = FiniteField::new(5, 1, None).unwrap();
        let m = Mat::from_rows(4, &[vec![1, 2, 3, 4], vec![0, 1, 1, 2]]);
        let ns = nullspace(&f, &m);
        assert_eq!(ns.rows, 2);
        for nrow in ns.rows_iter() {
            for mrow in m.rows_iter() {
                let mut dot = 0u32;
                for i in 0..4 {
                    dot = f.add(dot, f.mul(nrow[i], mrow[i]));
                }
                assert_eq!(dot, 0);
            }
        }
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let f = FiniteField::new(7, 1, None).unwrap();
        let m = Mat::from_rows(3, &[vec![1, 2, 3], vec![0, 1, 4], vec![5, 6, 0]]);
        let inv = inverse(&f, &m).unwrap();
        assert_eq!(mat_mul(&f, &m, &inv), Mat::identity(3));
        let singular = Mat::from_rows(2, &[vec![1, 2], vec![2, 4]]);
        assert!(inverse(&f, &singular).is_none());
    }

    #[test]
    fn express_in_rows_solves_row_combinations() {
        let f = FiniteField::new(3, 1, None).unwrap();
        let rows = Mat::from_rows(4, &[vec![1, 0, 2, 1], vec![0, 1, 1, 1]]);
        let v = row_mul(&f, &[2, 1], &rows);
        let x = express_in_rows(&f, &rows, &v).unwrap();
        assert_eq!(row_mul(&f, &x, &rows), v);
        assert!(express_in_rows(&f, &rows, &[1, 1, 0, 0]).is_none());
    }

    #[test]
    fn containment_check_matches_rank_comparison() {
        let f = FiniteField::new(3, 1, None).unwrap();
        let big = Mat::from_rows(4, &[vec![1, 0, 0, 1], vec![0, 1, 0, 2], vec![0, 0, 1, 1]]);
        let (rref, pivots) = row_space(&f, &big);
        let inside = Mat::from_rows(4, &[row_mul(&f, &[1, 2, 0], &rref)]);
        let outside = Mat::from_rows(4, &[vec![1, 1, 1, 0]]);
        assert!(reduces_to_zero(&f, &inside, &rref, &pivots));
        assert!(!reduces_to_zero(&f, &outside, &rref, &pivots));
    }
}
