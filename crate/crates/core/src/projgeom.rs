//! Projective geometry PG(d,q): subspaces as canonical row spaces, span and
//! meet, annihilators under the standard dot form, point enumeration,
//! projections, and projectivity fitting.
//!
//! A subspace is stored as the reduced row echelon form of any spanning set,
//! so two subspaces are equal exactly when their matrices are equal. Points
//! are coordinate vectors normalized to leading coefficient 1.

use std::collections::HashMap;
use std::sync::Arc;

use crate::gf::FiniteField;
use crate::linalg::{self, Mat};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GeomError {
    #[error("expected {expected} points, got {got}")]
    WrongPointCount { expected: usize, got: usize },
    #[error("frame points are not in general position")]
    DegenerateFrame,
    #[error("coordinate vectors have mismatched lengths: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("the zero vector is not a projective point")]
    ZeroVector,
}

/// A subspace of PG(d,q), canonically represented: `m` is in reduced row
/// echelon form with no zero rows, `pivots` lists its pivot columns.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subspace {
    pub m: Mat,
    pub pivots: Vec<usize>,
}

impl Subspace {
    /// Canonicalizes a spanning set. `vdim` is the number of coordinates
    /// (one more than the projective dimension of the ambient space).
    pub fn from_rows(f: &FiniteField, vdim: usize, rows: &[Vec<u32>]) -> Subspace {
        let (m, pivots) = linalg::row_space(f, &Mat::from_rows(vdim, rows));
        Subspace { m, pivots }
    }

    pub fn from_mat(f: &FiniteField, m: &Mat) -> Subspace {
        let (m, pivots) = linalg::row_space(f, m);
        Subspace { m, pivots }
    }

    pub fn empty(vdim: usize) -> Subspace {
        Subspace { m: Mat::zero(0, vdim), pivots: Vec::new() }
    }

    pub fn full(vdim: usize) -> Subspace {
        let m = Mat::identity(vdim);
        Subspace { m, pivots: (0..vdim).collect() }
    }

    /// Number of coordinates of the ambient space.
    pub fn vdim(&self) -> usize {
        self.m.cols
    }

    /// Projective dimension: -1 for the empty subspace.
    pub fn dim(&self) -> i64 {
        self.m.rows as i64 - 1
    }

    /// Vector-space dimension (number of basis rows).
    pub fn rank(&self) -> usize {
        self.m.rows
    }

    pub fn is_empty(&self) -> bool {
        self.m.rows == 0
    }

    pub fn contains_point(&self, f: &FiniteField, p: &[u32]) -> bool {
        linalg::reduces_to_zero(f, &Mat::from_rows(self.vdim(), &[p.to_vec()]), &self.m, &self.pivots)
    }

    pub fn contains(&self, f: &FiniteField, other: &Subspace) -> bool {
        linalg::reduces_to_zero(f, &other.m, &self.m, &self.pivots)
    }

    pub fn meets(&self, f: &FiniteField, other: &Subspace) -> bool {
        !meet(f, self, other).is_empty()
    }

    /// Number of projective points: (q^rank - 1)/(q - 1).
    pub fn point_count(&self, f: &FiniteField) -> u64 {
        let q = f.q() as u64;
        let mut acc = 0u64;
        for _ in 0..self.m.rows {
            acc = acc * q + 1;
        }
        acc
    }

    /// All points, deterministically ordered, each normalized to leading
    /// coefficient 1.
    pub fn points(&self, f: &FiniteField) -> Vec<Vec<u32>> {
        let k = self.m.rows;
        let q = f.q();
        let mut out = Vec::with_capacity(self.point_count(f) as usize);
        // First nonzero weight fixed to 1; tail weights run in odometer order.
        for lead in (0..k).rev() {
            let tail = k - lead - 1;
            let mut weights = vec![0u32; tail];
            'block: loop {
                let mut p = self.m.row(lead).to_vec();
                for (t, &w) in weights.iter().enumerate() {
                    if w != 0 {
                        let row = self.m.row(lead + 1 + t);
                        for (pj, &rj) in p.iter_mut().zip(row) {
                            *pj = f.add(*pj, f.mul(w, rj));
                        }
                    }
                }
                out.push(p);
                let mut i = tail;
                loop {
                    if i == 0 {
                        break 'block;
                    }
                    i -= 1;
                    weights[i] += 1;
                    if weights[i] < q {
                        break;
                    }
                    weights[i] = 0;
                }
            }
        }
        out
    }

    /// Coordinates of `p` with respect to the basis rows, or None when `p`
    /// is not in the subspace. Because the basis is in reduced row echelon
    /// form these are read off the pivot columns.
    pub fn coords_of(&self, f: &FiniteField, p: &[u32]) -> Option<Vec<u32>> {
        let x: Vec<u32> = self.pivots.iter().map(|&c| p[c]).collect();
        let back = linalg::row_mul(f, &x, &self.m);
        if back == p { Some(x) } else { None }
    }

    /// The point with internal coordinates `x` (inverse of `coords_of`).
    pub fn point_at(&self, f: &FiniteField, x: &[u32]) -> Vec<u32> {
        linalg::row_mul(f, x, &self.m)
    }
}

/// Span of any number of subspaces.
pub fn span(f: &FiniteField, parts: &[&Subspace]) -> Subspace {
    assert!(!parts.is_empty());
    let vdim = parts[0].vdim();
    let mut stacked = Mat::zero(0, vdim);
    for s in parts {
        assert_eq!(s.vdim(), vdim);
        stacked = stacked.stack(&s.m);
    }
    Subspace::from_mat(f, &stacked)
}

/// Span of a subspace and extra points.
pub fn span_with_points(f: &FiniteField, s: &Subspace, pts: &[&[u32]]) -> Subspace {
    let mut stacked = s.m.clone();
    for p in pts {
        stacked.push_row(p);
    }
    Subspace::from_mat(f, &stacked)
}

/// Annihilator under the standard dot form: { y : x·y = 0 for all x in s }.
pub fn annihilator(f: &FiniteField, s: &Subspace) -> Subspace {
    if s.is_empty() {
        return Subspace::full(s.vdim());
    }
    let m = linalg::nullspace(f, &s.m);
    let pivots = pivot_columns(&m);
    Subspace { m, pivots }
}

fn pivot_columns(rref: &Mat) -> Vec<usize> {
    rref.rows_iter()
        .map(|row| row.iter().position(|&x| x != 0).expect("zero row in RREF basis"))
        .collect()
}

/// Intersection of two subspaces, via annihilators.
pub fn meet(f: &FiniteField, a: &Subspace, b: &Subspace) -> Subspace {
    let (aa, ab) = (annihilator(f, a), annihilator(f, b));
    annihilator(f, &span(f, &[&aa, &ab]))
}

/// Projection of `x` (a subspace) from `center` into `target`:
/// span(center, x) ∩ target.
pub fn project_through(f: &FiniteField, center: &Subspace, target: &Subspace, x: &Subspace) -> Subspace {
    meet(f, &span(f, &[center, x]), target)
}

/// Projection of a single point from `center` into `target`.
pub fn project_point_through(
    f: &FiniteField,
    center: &Subspace,
    target: &Subspace,
    p: &[u32],
) -> Subspace {
    meet(f, &span_with_points(f, center, &[p]), target)
}

/// Scales a nonzero vector so its first nonzero coordinate is 1.
pub fn normalize_point(f: &FiniteField, v: &[u32]) -> Result<Vec<u32>, GeomError> {
    let Some(lead) = v.iter().position(|&x| x != 0) else {
        return Err(GeomError::ZeroVector);
    };
    let inv = f.inv(v[lead]);
    Ok(v.iter().map(|&x| f.mul(x, inv)).collect())
}

/// Line through two distinct points.
pub fn line_through(f: &FiniteField, p: &[u32], q: &[u32]) -> Subspace {
    Subspace::from_rows(f, p.len(), &[p.to_vec(), q.to_vec()])
}

/// All points of PG(vdim-1, q), deterministically ordered and normalized.
pub fn all_points(f: &FiniteField, vdim: usize) -> Vec<Vec<u32>> {
    Subspace::full(vdim).points(f)
}

/// Image of a subspace under the row-vector map x ↦ x·m.
pub fn apply_map(f: &FiniteField, m: &Mat, s: &Subspace) -> Subspace {
    Subspace::from_mat(f, &linalg::mat_mul(f, &s.m, m))
}

/// Fits the unique projectivity sending a frame to a frame. Both slices must
/// hold exactly n+1 points of coordinate length n, every n of which are
/// linearly independent. Returns M with the row-vector convention x ↦ x·M,
/// normalized so its first nonzero entry is 1.
pub fn fit_projectivity(
    f: &FiniteField,
    src: &[Vec<u32>],
    dst: &[Vec<u32>],
) -> Result<Mat, GeomError> {
    if src.is_empty() {
        return Err(GeomError::WrongPointCount { expected: 1, got: 0 });
    }
    let n = src[0].len();
    if src.len() != n + 1 {
        return Err(GeomError::WrongPointCount { expected: n + 1, got: src.len() });
    }
    if dst.len() != n + 1 {
        return Err(GeomError::WrongPointCount { expected: n + 1, got: dst.len() });
    }
    for v in src.iter().chain(dst) {
        if v.len() != n {
            return Err(GeomError::DimensionMismatch(v.len(), n));
        }
    }
    let half = |pts: &[Vec<u32>]| -> Result<Mat, GeomError> {
        let a = Mat::from_rows(n, &pts[..n].to_vec());
        let a_inv = linalg::inverse(f, &a).ok_or(GeomError::DegenerateFrame)?;
        let lambda = linalg::row_mul(f, &pts[n], &a_inv);
        if lambda.iter().any(|&x| x == 0) {
            return Err(GeomError::DegenerateFrame);
        }
        let mut scaled = a;
        for (i, &l) in lambda.iter().enumerate() {
            for j in 0..n {
                let v = scaled.at(i, j);
                scaled.set(i, j, f.mul(l, v));
            }
        }
        Ok(scaled)
    };
    let sa = half(src)?;
    let sb = half(dst)?;
    let sa_inv = linalg::inverse(f, &sa).ok_or(GeomError::DegenerateFrame)?;
    let m = linalg::mat_mul(f, &sa_inv, &sb);
    // Normalize the global scalar for a canonical representative.
    let lead = m.a.iter().find(|&&x| x != 0).copied().ok_or(GeomError::DegenerateFrame)?;
    let inv = f.inv(lead);
    let mut out = m;
    for x in &mut out.a {
        *x = f.mul(*x, inv);
    }
    Ok(out)
}

/// Index of every point of PG(vdim-1, q) for O(1) point → id lookups.
pub struct AmbientIndex {
    pub field: Arc<FiniteField>,
    pub points: Vec<Vec<u32>>,
    map: HashMap<Vec<u32>, u32>,
}

impl AmbientIndex {
    pub fn new(field: &Arc<FiniteField>, vdim: usize) -> AmbientIndex {
        let points = all_points(field, vdim);
        let mut map = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            map.insert(p.clone(), i as u32);
        }
        AmbientIndex { field: Arc::clone(field), points, map }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of an arbitrary nonzero vector (normalized internally).
    pub fn index_of(&self, v: &[u32]) -> u32 {
        let p = normalize_point(&self.field, v).expect("zero vector has no index");
        self.map[&p]
    }

    /// Index of an already normalized point, if present.
    pub fn get(&self, p: &[u32]) -> Option<u32> {
        self.map.get(p).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FiniteField;

    #[test]
    fn point_counts_match_the_gaussian_coefficient_formula() {
        let f = FiniteField::new(3, 1, None).unwrap();
        assert_eq!(all_points(&f, 3).len(), 13); // PG(2,3)
        assert_eq!(all_points(&f, 4).len(), 40); // PG(3,3)
        let f2 = FiniteField::new(2, 1, None).unwrap();
        assert_eq!(all_points(&f2, 3).len(), 7); // PG(2,2)
        let f4 = FiniteField::new(2, 2, None).unwrap();
        assert_eq!(all_points(&f4, 3).len(), 21); // PG(2,4)
    }

    #[test]
    fn enumerated_points_are_normalized_distinct_and_members() {
        let f = FiniteField::new(3, 1, None).unwrap();
        let s = Subspace::from_rows(&f, 4, &[vec![1, 0, 2, 1], vec![0, 1, 1, 2]]);
        let pts = s.points(&f);
        assert_eq!(pts.len() as u64, s.point_count(&f));
        let mut seen = std::collections::HashSet::new();
        for p in &pts {
            let lead = p.iter().position(|&x| x != 0).unwrap();
            assert_eq!(p[lead], 1, "point not normalized: {p:?}");
            assert!(s.contains_point(&f, p));
            assert!(seen.insert(p.clone()), "duplicate point {p:?}");
        }
    }

    #[test]
    fn grassmann_identity_holds_for_span_and_meet() {
        let f = FiniteField::new(2, 1, None).unwrap();
        // Two distinct planes of PG(3,2) meet in a line.
        let a = Subspace::from_rows(&f, 4, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0]]);
        let b = Subspace::from_rows(&f, 4, &[vec![1, 0, 0, 1], vec![0, 1, 0, 1], vec![0, 0, 1, 1]]);
        let s = span(&f, &[&a, &b]);
        let m = meet(&f, &a, &b);
        assert_eq!(s.rank(), 4);
        assert_eq!(m.rank(), 2);
        assert_eq!(a.rank() + b.rank(), s.rank() + m.rank());
        assert!(a.contains(&f, &m) && b.contains(&f, &m));
    }

    #[test]
    fn annihilator_is_an_involution_with_complementary_rank() {
        let f = FiniteField::new(5, 1, None).unwrap();
        let s = Subspace::from_rows(&f, 5, &[vec![1, 2, 3, 4, 0], vec![0, 1, 0, 1, 1]]);
        let a = annihilator(&f, &s);
        assert_eq!(a.rank(), 3);
        assert_eq!(annihilator(&f, &a), s);
        assert!(annihilator(&f, &Subspace::empty(4)).rank() == 4);
        assert!(annihilator(&f, &Subspace::full(4)).is_empty());
    }

    #[test]
    fn projection_from_a_point_lands_on_the_target_line() {
        let f = FiniteField::new(3, 1, None).unwrap();
        // In PG(2,3): project x = (1,1,1) from center (0,0,1) onto z = 0.
        let center = Subspace::from_rows(&f, 3, &[vec![0, 0, 1]]);
        let target = Subspace::from_rows(&f, 3, &[vec![1, 0, 0], vec![0, 1, 0]]);
        let image = project_point_through(&f, &center, &target, &[1, 1, 1]);
        assert_eq!(image, Subspace::from_rows(&f, 3, &[vec![1, 1, 0]]));
    }

    #[test]
    fn subspace_coordinates_round_trip() {
        let f = FiniteField::new(2, 2, None).unwrap();
        let s = Subspace::from_rows(&f, 4, &[vec![1, 0, 2, 3], vec![0, 1, 1, 2]]);
        for p in s.points(&f) {
            let x = s.coords_of(&f, &p).unwrap();
            assert_eq!(s.point_at(&f, &x), p);
        }
        assert!(s.coords_of(&f, &[0, 0, 1, 0]).is_none());
    }

    /// Brute-force oracle on PG(1,3): among all 48 invertible 2x2 matrices,
    /// exactly one projective class maps a given frame to a given frame, and
    /// the fitter finds it.
    #[test]
    fn fitted_projectivity_matches_exhaustive_search_on_the_projective_line() {
        let f = FiniteField::new(3, 1, None).unwrap();
        let src = vec![vec![1, 0], vec![0, 1], vec![1, 1]];
        let dst = vec![vec![1, 2], vec![1, 1], vec![1, 0]];
        let fitted = fit_projectivity(&f, &src, &dst).unwrap();
        let mut matches = Vec::new();
        for code in 0..81u32 {
            let m = Mat::from_rows(2, &[vec![code % 3, code / 3 % 3], vec![code / 9 % 3, code / 27 % 3]]);
            if linalg::inverse(&f, &m).is_none() {
                continue;
            }
            let ok = src.iter().zip(&dst).all(|(s, d)| {
                let img = linalg::row_mul(&f, s, &m);
                normalize_point(&f, &img).unwrap() == normalize_point(&f, d).unwrap()
            });
            if ok {
                // Normalize the scalar class the same way the fitter does.
                let lead = m.a.iter().find(|&&x| x != 0).copied().unwrap();
                let inv = f.inv(lead);
                let mut n = m.clone();
                for x in &mut n.a {
                    *x = f.mul(*x, inv);
                }
                matches.push(n);
            }
        }
        // The two scalar multiples of the unique class normalize identically.
        assert_eq!(matches.len(), 2);
        matches.dedup();
        assert_eq!(matches.len(), 1);
        assert_eq!(fitted, matches[0]);
    }

    #[test]
    fn fitting_a_degenerate_frame_is_rejected() {
        let f = FiniteField::new(3, 1, None).unwrap();
        let src = vec![vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 0], vec![0, 0, 1]];
        let dst = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 1]];
        assert_eq!(fit_projectivity(&f, &src, &dst).unwrap_err(), GeomError::DegenerateFrame);
    }

    #[test]
    fn duality_and_modular_law_hold_on_seeded_random_subspaces() {
        use rand::{Rng, SeedableRng};
        let f = FiniteField::new(3, 1, None).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        let random_subspace = |rng: &mut rand_chacha::ChaCha8Rng| {
            let rows: Vec<Vec<u32>> = (0..rng.gen_range(0..=8usize))
                .map(|_| (0..8).map(|_| rng.gen_range(0..3u32)).collect())
                .collect();
            Subspace::from_rows(&f, 8, &rows)
        };
        for _ in 0..10_000 {
            let s = random_subspace(&mut rng);
            let a = annihilator(&f, &s);
            assert_eq!(s.rank() + a.rank(), 8);
            assert_eq!(annihilator(&f, &a), s);
            // Modular law with a ⊆ c: (a + b) ∩ c = a + (b ∩ c).
            let c = random_subspace(&mut rng);
            let b = random_subspace(&mut rng);
            let a_in_c = if c.is_empty() {
                Subspace::empty(8)
            } else {
                let picks: Vec<Vec<u32>> = c
                    .points(&f)
                    .into_iter()
                    .filter(|_| rng.gen_bool(0.4))
                    .take(3)
                    .collect();
                Subspace::from_rows(&f, 8, &picks)
            };
            let lhs = meet(&f, &span(&f, &[&a_in_c, &b]), &c);
            let rhs = span(&f, &[&a_in_c, &meet(&f, &b, &c)]);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn ambient_index_round_trips_unnormalized_vectors() {
        let f = FiniteField::new(3, 1, None).unwrap();
        let idx = AmbientIndex::new(&f, 3);
        assert_eq!(idx.len(), 13);
        for (i, p) in idx.points.iter().enumerate() {
            assert_eq!(idx.index_of(p) as usize, i);
            let doubled: Vec<u32> = p.iter().map(|&x| idx.field.mul(2, x)).collect();
            assert_eq!(idx.index_of(&doubled) as usize, i);
        }
    }
}
