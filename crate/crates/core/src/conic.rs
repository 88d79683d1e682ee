//! Conics in planes of PG(d,q): fitting from point and tangency constraints,
//! tangent lines, nuclei in even characteristic, and nonsingularity.
//!
//! A conic is a quadratic form in the internal coordinates of a plane
//! (a rank-3 subspace). All formulas go through the polarization
//! B(x,y) = f(x+y) − f(x) − f(y), which is characteristic-uniform.

use crate::gf::FiniteField;
use crate::linalg::{self, Mat};
use crate::projgeom::{self, Subspace};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ConicError {
    #[error("the carrier subspace is not a plane (rank {0})")]
    NotAPlane(usize),
    #[error("a constraint point lies outside the plane")]
    NotInPlane,
    #[error("a tangency line is not a line of the plane through its point")]
    BadTangencyLine,
    #[error("no conic satisfies the constraints")]
    NoFit,
    #[error("constraints admit a {0}-dimensional solution space, not a unique conic")]
    AmbiguousFit(usize),
    #[error("the point is not on the conic")]
    NotOnConic,
    #[error("the conic has no tangent line at this point (degenerate form)")]
    DegeneratePoint,
    #[error("nuclei exist only in even characteristic")]
    OddCharacteristic,
}

/// Coefficients (a,b,c,d,e,f) of
/// a·x₀² + b·x₁² + c·x₂² + d·x₀x₁ + e·x₀x₂ + f·x₁x₂
/// in the internal coordinates of the carrier plane.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConicForm {
    pub coeffs: [u32; 6],
}

impl ConicForm {
    pub fn eval(&self, f: &FiniteField, x: &[u32]) -> u32 {
        let [a, b, c, d, e, ff] = self.coeffs;
        let mut acc = f.mul(a, f.mul(x[0], x[0]));
        acc = f.add(acc, f.mul(b, f.mul(x[1], x[1])));
        acc = f.add(acc, f.mul(c, f.mul(x[2], x[2])));
        acc = f.add(acc, f.mul(d, f.mul(x[0], x[1])));
        acc = f.add(acc, f.mul(e, f.mul(x[0], x[2])));
        f.add(acc, f.mul(ff, f.mul(x[1], x[2])))
    }

    /// Matrix of the polarization B(x,y) = f(x+y) − f(x) − f(y).
    pub fn polar_matrix(&self, f: &FiniteField) -> Mat {
        let [a, b, c, d, e, ff] = self.coeffs;
        let two = f.add(1, 1);
        Mat::from_rows(
            3,
            &[
                vec![f.mul(two, a), d, e],
                vec![d, f.mul(two, b), ff],
                vec![e, ff, f.mul(two, c)],
            ],
        )
    }

    /// Line coefficients of the polar line of x: ℓ = x·B.
    pub fn polar_coeffs(&self, f: &FiniteField, x: &[u32]) -> Vec<u32> {
        linalg::row_mul(f, x, &self.polar_matrix(f))
    }
}

/// The linear functional (as a 6-vector over the coefficient space) sending a
/// form to B(s,y).
fn bilinear_row(f: &FiniteField, s: &[u32], y: &[u32]) -> Vec<u32> {
    let two = f.add(1, 1);
    vec![
        f.mul(two, f.mul(s[0], y[0])),
        f.mul(two, f.mul(s[1], y[1])),
        f.mul(two, f.mul(s[2], y[2])),
        f.add(f.mul(s[0], y[1]), f.mul(s[1], y[0])),
        f.add(f.mul(s[0], y[2]), f.mul(s[2], y[0])),
        f.add(f.mul(s[1], y[2]), f.mul(s[2], y[1])),
    ]
}

/// The linear functional sending a form to its value at p.
fn point_row(f: &FiniteField, p: &[u32]) -> Vec<u32> {
    vec![
        f.mul(p[0], p[0]),
        f.mul(p[1], p[1]),
        f.mul(p[2], p[2]),
        f.mul(p[0], p[1]),
        f.mul(p[0], p[2]),
        f.mul(p[1], p[2]),
    ]
}

/// A conic carried by a plane of an ambient projective space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conic {
    pub plane: Subspace,
    pub form: ConicForm,
}

impl Conic {
    /// Ambient points of the conic, in the deterministic order of the
    /// internal point enumeration.
    pub fn points(&self, f: &FiniteField) -> Vec<Vec<u32>> {
        projgeom::all_points(f, 3)
            .into_iter()
            .filter(|x| self.form.eval(f, x) == 0)
            .map(|x| projgeom::normalize_point(f, &self.plane.point_at(f, &x)).expect("conic point"))
            .collect()
    }

    pub fn contains(&self, f: &FiniteField, p: &[u32]) -> bool {
        match self.plane.coords_of(f, &normalized(f, p)) {
            Some(x) => self.form.eval(f, &x) == 0,
            None => false,
        }
    }

    /// Tangent line at a conic point, as an ambient line.
    pub fn tangent_at(&self, f: &FiniteField, p: &[u32]) -> Result<Subspace, ConicError> {
        let x = self
            .plane
            .coords_of(f, &normalized(f, p))
            .ok_or(ConicError::NotInPlane)?;
        if self.form.eval(f, &x) != 0 {
            return Err(ConicError::NotOnConic);
        }
        let l = self.form.polar_coeffs(f, &x);
        if l.iter().all(|&c| c == 0) {
            return Err(ConicError::DegeneratePoint);
        }
        let kernel = linalg::nullspace(f, &Mat::from_rows(3, &[l]));
        let rows: Vec<Vec<u32>> = kernel.rows_iter().map(|r| self.plane.point_at(f, r)).collect();
        Ok(Subspace::from_rows(f, self.plane.vdim(), &rows))
    }

    /// Nucleus in even characteristic: the common point of all tangents.
    pub fn nucleus(&self, f: &FiniteField) -> Result<Vec<u32>, ConicError> {
        if !f.is_even() {
            return Err(ConicError::OddCharacteristic);
        }
        let b = self.form.polar_matrix(f);
        let kernel = linalg::nullspace(f, &b);
        if kernel.rows != 1 {
            return Err(ConicError::DegeneratePoint);
        }
        let n = self.plane.point_at(f, kernel.row(0));
        projgeom::normalize_point(f, &n).map_err(|_| ConicError::DegeneratePoint)
    }

    /// A conic is nonsingular when it has exactly q+1 points, none of which
    /// has an identically zero polar line. This catches repeated lines, line
    /// pairs (rational or conjugate), and every other degeneration, in both
    /// characteristics.
    pub fn is_nonsingular(&self, f: &FiniteField) -> bool {
        let mut count = 0u64;
        for x in projgeom::all_points(f, 3) {
            if self.form.eval(f, &x) != 0 {
                continue;
            }
            count += 1;
            if self.form.polar_coeffs(f, &x).iter().all(|&c| c == 0) {
                return false;
            }
        }
        count == f.q() as u64 + 1
    }
}

fn normalized(f: &FiniteField, p: &[u32]) -> Vec<u32> {
    projgeom::normalize_point(f, p).expect("nonzero point")
}

/// Fits the unique conic through the given ambient points, tangent at each
/// `(point, line)` pair to the given ambient line. Tangency pairs count as
/// point constraints as well. Fails unless the constraint system has a
/// one-dimensional solution space.
pub fn fit_conic(
    f: &FiniteField,
    plane: &Subspace,
    points: &[Vec<u32>],
    tangencies: &[(Vec<u32>, Subspace)],
) -> Result<Conic, ConicError> {
    if plane.rank() != 3 {
        return Err(ConicError::NotAPlane(plane.rank()));
    }
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for p in points {
        let x = plane
            .coords_of(f, &normalized(f, p))
            .ok_or(ConicError::NotInPlane)?;
        rows.push(point_row(f, &x));
    }
    for (p, line) in tangencies {
        let s = plane
            .coords_of(f, &normalized(f, p))
            .ok_or(ConicError::NotInPlane)?;
        if line.rank() != 2
            || !plane.contains(f, line)
            || !line.contains_point(f, &normalized(f, p))
        {
            return Err(ConicError::BadTangencyLine);
        }
        rows.push(point_row(f, &s));
        for r in line.m.rows_iter() {
            let y = plane.coords_of(f, r).ok_or(ConicError::BadTangencyLine)?;
            rows.push(bilinear_row(f, &s, &y));
        }
    }
    let system = Mat::from_rows(6, &rows);
    let kernel = linalg::nullspace(f, &system);
    match kernel.rows {
        0 => Err(ConicError::NoFit),
        1 => {
            let r = kernel.row(0);
            Ok(Conic {
                plane: plane.clone(),
                form: ConicForm { coeffs: [r[0], r[1], r[2], r[3], r[4], r[5]] },
            })
        }
        n => Err(ConicError::AmbiguousFit(n)),
    }
}

/// All nonsingular conics of the plane through the given ambient points.
///
/// With fewer than five points the constraint system is underdetermined;
/// every projective combination of its solution space is then screened for
/// nonsingularity. A four-point arc, for instance, determines a pencil
/// holding exactly one nonsingular conic besides degenerate line pairs.
/// Solution spaces of dimension above three are refused as `AmbiguousFit`.
pub fn conics_through(
    f: &FiniteField,
    plane: &Subspace,
    points: &[Vec<u32>],
) -> Result<Vec<Conic>, ConicError> {
    if plane.rank() != 3 {
        return Err(ConicError::NotAPlane(plane.rank()));
    }
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for p in points {
        let x = plane
            .coords_of(f, &normalized(f, p))
            .ok_or(ConicError::NotInPlane)?;
        rows.push(point_row(f, &x));
    }
    let kernel = linalg::nullspace(f, &Mat::from_rows(6, &rows));
    if kernel.rows == 0 {
        return Ok(Vec::new());
    }
    if kernel.rows > 3 {
        return Err(ConicError::AmbiguousFit(kernel.rows));
    }
    let mut found = Vec::new();
    for combo in projgeom::all_points(f, kernel.rows) {
        let mut coeffs = [0u32; 6];
        for (ci, &c) in combo.iter().enumerate() {
            for (k, slot) in coeffs.iter_mut().enumerate() {
                *slot = f.add(*slot, f.mul(c, kernel.at(ci, k)));
            }
        }
        let candidate = Conic { plane: plane.clone(), form: ConicForm { coeffs } };
        if candidate.is_nonsingular(f) {
            found.push(candidate);
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FiniteField;
    use crate::projgeom::{all_points, line_through, Subspace};

    fn plane3(_f: &FiniteField) -> Subspace {
        Subspace::full(3)
    }

    #[test]
    fn five_points_of_a_parabola_determine_it() {
        let f = FiniteField::new(5, 1, None).unwrap();
        let plane = plane3(&f);
        // Points (1, t, t²): five of the six points of x₀x₂ = x₁².
        let pts: Vec<Vec<u32>> = (0..5).map(|t| vec![1, t, f.mul(t, t)]).collect();
        let conic = fit_conic(&f, &plane, &pts, &[]).unwrap();
        assert!(conic.is_nonsingular(&f));
        let on = conic.points(&f);
        assert_eq!(on.len(), 6);
        assert!(on.contains(&vec![0, 0, 1]));
        // The recovered form vanishes on x₀x₂ − x₁² and nothing else:
        for x in all_points(&f, 3) {
            let reference = f.sub(f.mul(x[0], x[2]), f.mul(x[1], x[1]));
            assert_eq!(conic.form.eval(&f, &x) == 0, reference == 0);
        }
    }

    #[test]
    fn three_points_and_two_tangents_determine_a_conic() {
        let f = FiniteField::new(3, 1, None).unwrap();
        let plane = plane3(&f);
        // y² = xz again: tangent at (1,0,0) is x₂ = 0, at (0,0,1) is x₀ = 0.
        let t1 = line_through(&f, &[1, 0, 0], &[0, 1, 0]);
        let t2 = line_through(&f, &[0, 0, 1], &[0, 1, 0]);
        let conic = fit_conic(
            &f,
            &plane,
            &[vec![1, 1, 1]],
            &[(vec![1, 0, 0], t1.clone()), (vec![0, 0, 1], t2.clone())],
        )
        .unwrap();
        assert!(conic.is_nonsingular(&f));
        assert_eq!(conic.points(&f).len(), 4);
        assert_eq!(conic.tangent_at(&f, &[1, 0, 0]).unwrap(), t1);
        assert_eq!(conic.tangent_at(&f, &[0, 0, 1]).unwrap(), t2);
        assert!(conic.contains(&f, &[2, 2, 2]));
    }

    /// Independent oracle for the fitter: enumerate all 3⁶ coefficient
    /// vectors over GF(3) and count the ones satisfying the same constraints.
    #[test]
    fn fitted_conic_agrees_with_exhaustive_coefficient_search() {
        let f = FiniteField::new(3, 1, None).unwrap();
        let plane = plane3(&f);
        let t1 = line_through(&f, &[1, 0, 0], &[0, 1, 0]);
        let t2 = line_through(&f, &[0, 0, 1], &[0, 1, 0]);
        let fitted = fit_conic(
            &f,
            &plane,
            &[vec![1, 1, 1]],
            &[(vec![1, 0, 0], t1.clone()), (vec![0, 0, 1], t2.clone())],
        )
        .unwrap();
        let mut survivors = Vec::new();
        for code in 1..729u32 {
            let mut c = [0u32; 6];
            let mut rem = code;
            for slot in &mut c {
                *slot = rem % 3;
                rem /= 3;
            }
            let form = ConicForm { coeffs: c };
            let conic = Conic { plane: plane.clone(), form };
            let on = |p: &[u32]| conic.form.eval(&f, p) == 0;
            if !(on(&[1, 1, 1]) && on(&[1, 0, 0]) && on(&[0, 0, 1])) {
                continue;
            }
            let tangent_matches = |p: &[u32], line: &Subspace| match conic.tangent_at(&f, p) {
                Ok(t) => &t == line,
                Err(_) => false,
            };
            if tangent_matches(&[1, 0, 0], &t1) && tangent_matches(&[0, 0, 1], &t2) {
                survivors.push(c);
            }
        }
        // Exactly one projective class: the two scalar multiples of it.
        assert_eq!(survivors.len(), 2);
        let normalized: Vec<[u32; 6]> = survivors
            .iter()
            .map(|c| {
                let lead = c.iter().find(|&&x| x != 0).copied().unwrap();
                let inv = f.inv(lead);
                let mut n = *c;
                for x in &mut n {
                    *x = f.mul(*x, inv);
                }
                n
            })
            .collect();
        assert_eq!(normalized[0], normalized[1]);
        assert_eq!(fitted.form.coeffs, normalized[0]);
    }

    #[test]
    fn degenerate_forms_are_rejected_as_singular() {
        let f = FiniteField::new(3, 1, None).unwrap();
        let plane = plane3(&f);
        // Line pair x₀x₁ = 0: 2q+1 = 7 points.
        let pair = Conic { plane: plane.clone(), form: ConicForm { coeffs: [0, 0, 0, 1, 0, 0] } };
        assert!(!pair.is_nonsingular(&f));
        // Repeated line x₀² = 0: q+1 points but zero polars.
        let rep = Conic { plane: plane.clone(), form: ConicForm { coeffs: [1, 0, 0, 0, 0, 0] } };
        assert!(!rep.is_nonsingular(&f));
        // Same in even characteristic.
        let f4 = FiniteField::new(2, 2, None).unwrap();
        let rep4 = Conic { plane: plane3(&f4), form: ConicForm { coeffs: [1, 0, 0, 0, 0, 0] } };
        assert!(!rep4.is_nonsingular(&f4));
    }

    #[test]
    fn every_tangent_of_an_even_order_conic_passes_through_the_nucleus() {
        let f = FiniteField::new(2, 2, None).unwrap();
        let plane = plane3(&f);
        // x₀x₂ = x₁² over GF(4).
        let conic = Conic { plane: plane.clone(), form: ConicForm { coeffs: [0, 1, 0, 0, 1, 0] } };
        assert!(conic.is_nonsingular(&f));
        let n = conic.nucleus(&f).unwrap();
        assert_eq!(n, vec![0, 1, 0]);
        let pts = conic.points(&f);
        assert_eq!(pts.len(), 5);
        for p in &pts {
            let t = conic.tangent_at(&f, p).unwrap();
            assert!(t.contains_point(&f, &n));
        }
        // Odd characteristic has no nucleus.
        let f3 = FiniteField::new(3, 1, None).unwrap();
        let c3 = Conic { plane: plane3(&f3), form: ConicForm { coeffs: [0, 1, 0, 0, f3.neg(1), 0] } };
        assert_eq!(c3.nucleus(&f3).unwrap_err(), ConicError::OddCharacteristic);
    }

    #[test]
    fn tangent_lines_meet_the_conic_only_at_their_footpoint() {
        for (p, e) in [(5u64, 1u32), (2, 3)] {
            let f = FiniteField::new(p, e, None).unwrap();
            let plane = plane3(&f);
            let conic = Conic {
                plane: plane.clone(),
                form: ConicForm { coeffs: [0, 1, 0, 0, f.neg(1), 0] },
            };
            assert!(conic.is_nonsingular(&f));
            for pt in conic.points(&f) {
                let t = conic.tangent_at(&f, &pt).unwrap();
                let hits: Vec<Vec<u32>> = t
                    .points(&f)
                    .into_iter()
                    .filter(|x| conic.contains(&f, x))
                    .collect();
                assert_eq!(hits, vec![pt.clone()]);
            }
        }
    }

    /// Sweep of the classical tangent facts over every nonsingular form for
    /// q ≤ 5 and a seeded sample for q ∈ {7,8,9}: q+1 points, distinct
    /// tangents, concurrent in the nucleus (q even) or meeting pairwise in
    /// distinct points (q odd).
    #[test]
    fn nonsingular_conic_tangent_geometry_holds_across_characteristics() {
        use rand::{Rng, SeedableRng};
        let mut checked = 0u64;
        for (p, e) in [(3u64, 1u32), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)] {
            let f = FiniteField::new(p, e, None).unwrap();
            let q = f.q();
            let plane = plane3(&f);
            let mut forms: Vec<[u32; 6]> = Vec::new();
            if q <= 5 {
                for code in 1..q.pow(6) {
                    let mut c = [0u32; 6];
                    let mut rem = code;
                    for slot in &mut c {
                        *slot = rem % q;
                        rem /= q;
                    }
                    forms.push(c);
                }
            } else {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(q as u64);
                forms.push([0, 1, 0, 0, f.neg(1), 0]); // xz = y², always present
                for _ in 0..2000 {
                    let mut c = [0u32; 6];
                    for slot in &mut c {
                        *slot = rng.gen_range(0..q);
                    }
                    if c.iter().any(|&x| x != 0) {
                        forms.push(c);
                    }
                }
            }
            let mut nonsingular_seen = 0u64;
            for coeffs in forms {
                let conic = Conic { plane: plane.clone(), form: ConicForm { coeffs } };
                if !conic.is_nonsingular(&f) {
                    continue;
                }
                nonsingular_seen += 1;
                let pts = conic.points(&f);
                assert_eq!(pts.len() as u32, q + 1);
                let tangents: Vec<Subspace> =
                    pts.iter().map(|p| conic.tangent_at(&f, p).unwrap()).collect();
                for i in 0..tangents.len() {
                    for j in i + 1..tangents.len() {
                        assert_ne!(tangents[i], tangents[j]);
                    }
                }
                if f.is_even() {
                    let n = conic.nucleus(&f).unwrap();
                    assert!(!conic.contains(&f, &n));
                    assert!(tangents.iter().all(|t| t.contains_point(&f, &n)));
                } else {
                    let mut meets = std::collections::HashSet::new();
                    for i in 0..tangents.len() {
                        for j in i + 1..tangents.len() {
                            let x = crate::projgeom::meet(&f, &tangents[i], &tangents[j]);
                            assert_eq!(x.rank(), 1);
                            assert!(meets.insert(x.m.row(0).to_vec()));
                        }
                    }
                }
                checked += 1;
            }
            assert!(nonsingular_seen > 0, "no nonsingular conic found for q={q}");
        }
        assert!(checked > 1000);
    }

    #[test]
    fn underdetermined_and_inconsistent_fits_are_reported() {
        let f = FiniteField::new(3, 1, None).unwrap();
        let plane = plane3(&f);
        match fit_conic(&f, &plane, &[vec![1, 0, 0], vec![0, 1, 0]], &[]) {
            Err(ConicError::AmbiguousFit(n)) => assert_eq!(n, 4),
            other => panic!("expected ambiguity, got {other:?}"),
        }
        // A point off its own claimed tangent line is rejected.
        let bad_line = line_through(&f, &[0, 1, 0], &[0, 0, 1]);
        assert_eq!(
            fit_conic(&f, &plane, &[], &[(vec![1, 0, 0], bad_line)]).unwrap_err(),
            ConicError::BadTangencyLine
        );
    }

    #[test]
    fn a_four_point_arc_over_gf3_lies_on_exactly_one_nonsingular_conic() {
        let f = FiniteField::new(3, 1, None).unwrap();
        let plane = plane3(&f);
        // x0x2 = x1² holds at these four points, no three collinear.
        let arc =
            vec![vec![1, 0, 0], vec![0, 0, 1], vec![1, 1, 1], vec![1, 2, 4 % 3]];
        let conics = conics_through(&f, &plane, &arc).unwrap();
        assert_eq!(conics.len(), 1);
        for p in &arc {
            assert!(conics[0].contains(&f, p));
        }
        // Through three points the pencil widens but stays finite.
        let wider = conics_through(&f, &plane, &arc[..3].to_vec()).unwrap();
        assert!(wider.len() > 1);
        assert!(wider.iter().all(|c| c.is_nonsingular(&f)));
    }
}
