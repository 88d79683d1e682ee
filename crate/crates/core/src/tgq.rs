//! The projective model T(n,m,q) of a translation generalized quadrangle:
//! built from an egg inside PG(2n+m,q) with a distinguished hyperplane at
//! infinity, together with codecs between geometric data and abstract
//! indices, the translation group, axes of symmetry, and translation-point
//! verdicts.
//!
//! Point indices: the q^{2n+m} affine points first (lexicographic affine
//! coordinates), then the span points grouped by egg element, then the
//! base point ∞ last. Line indices: the affine lines grouped by egg
//! element, then the q^m+1 egg-element lines.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::egg::{Egg, EggError};
use crate::gf::FiniteField;
use crate::gq::{Collineation, GQOrder, GqError, GqMode, IncidenceStructure, gq_check};
use crate::linalg::Mat;
use crate::projgeom::{Subspace, apply_map, span_with_points};

#[derive(Debug, Clone, thiserror::Error)]
pub enum TgqError {
    #[error(transparent)]
    Egg(#[from] EggError),
    #[error(transparent)]
    Gq(#[from] GqError),
    #[error("model order ({got_s},{got_t}) does not match the expected ({want_s},{want_t})")]
    WrongOrder { got_s: u64, got_t: u64, want_s: u64, want_t: u64 },
    #[error("translation vector must have {expected} coordinates below q, got {got:?}")]
    BadVector { expected: usize, got: Vec<u32> },
    #[error("index {0} out of range")]
    NoSuchIndex(usize),
    #[error("vector {vector:?} of element {element} failed symmetry verification")]
    SymmetryFailed { element: usize, vector: Vec<u32> },
}

/// What a global point index denotes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TPointKind {
    /// Affine coordinates (length 2n+m, hyperplane coordinate dropped).
    Affine(Vec<u32>),
    /// An (n+m)-space over the tangent space of `element`, off the
    /// hyperplane at infinity.
    Span { element: u32, space: Subspace },
    Infinity,
}

/// What a global line index denotes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TLineKind {
    /// An n-space meeting the hyperplane exactly in egg element `element`.
    Affine { element: u32, space: Subspace },
    /// An egg element, viewed inside the hyperplane at infinity.
    EggElement(u32),
}

/// A translation: a vector of GF(q)^{2n+m} with its induced collineation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Translation {
    pub vector: Vec<u32>,
    pub collineation: Collineation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationVerdict {
    pub point: u32,
    pub is_translation_point: bool,
    /// (line, symmetry group order) for every line through the point.
    pub axes: Vec<(u32, u64)>,
    /// First line whose symmetry group falls short of order s.
    pub witness: Option<u32>,
}

pub struct TModel {
    pub egg: Egg,
    pub structure: IncidenceStructure,
    pub order: GQOrder,
    affine: Vec<Vec<u32>>,
    /// Span points grouped by element, q^n per element.
    type2: Vec<Subspace>,
    type2_index: HashMap<Subspace, u32>,
    /// Affine lines as (element, space), grouped by element.
    type_a: Vec<(u32, Subspace)>,
    type_a_index: HashMap<Subspace, u32>,
}

impl std::fmt::Debug for TModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TModel")
            .field("q", &self.egg.field.q())
            .field("n", &self.egg.n)
            .field("m", &self.egg.m)
            .field("v", &self.structure.v)
            .field("b", &self.structure.b)
            .finish()
    }
}

impl TModel {
    fn field(&self) -> &FiniteField {
        &self.egg.field
    }

    /// Number of coordinates of an affine point: 2n+m.
    pub fn affine_dim(&self) -> usize {
        (2 * self.egg.n + self.egg.m) as usize
    }

    pub fn affine_count(&self) -> usize {
        self.affine.len()
    }

    pub fn spans_per_element(&self) -> usize {
        let q = self.field().q() as usize;
        q.pow(self.egg.n)
    }

    pub fn infinity_index(&self) -> u32 {
        (self.structure.v - 1) as u32
    }

    /// Global line index of the egg-element line `i`.
    pub fn element_line_index(&self, i: usize) -> u32 {
        (self.type_a.len() + i) as u32
    }

    /// Lexicographic index of normalized affine coordinates.
    fn affine_lex_index(&self, coords: &[u32]) -> u32 {
        let q = self.field().q();
        coords.iter().fold(0u32, |acc, &c| acc * q + c)
    }

    /// Normalizes a projective point off the hyperplane to affine
    /// coordinates (last coordinate scaled to 1, then dropped).
    pub fn to_affine(&self, p: &[u32]) -> Option<Vec<u32>> {
        let f = self.field();
        let last = *p.last()?;
        if last == 0 {
            return None;
        }
        let inv = f.inv(last);
        Some(p[..p.len() - 1].iter().map(|&c| f.mul(c, inv)).collect())
    }

    /// Global point index of a projective point off the hyperplane.
    pub fn affine_point_index(&self, projective: &[u32]) -> Option<u32> {
        let a = self.to_affine(projective)?;
        if a.len() != self.affine_dim() {
            return None;
        }
        Some(self.affine_lex_index(&a))
    }

    pub fn point_kind(&self, idx: u32) -> Result<TPointKind, TgqError> {
        let i = idx as usize;
        if i < self.affine.len() {
            let dim = self.affine_dim();
            Ok(TPointKind::Affine(self.affine[i][..dim].to_vec()))
        } else if i < self.affine.len() + self.type2.len() {
            let j = i - self.affine.len();
            Ok(TPointKind::Span {
                element: (j / self.spans_per_element()) as u32,
                space: self.type2[j].clone(),
            })
        } else if i == self.structure.v - 1 {
            Ok(TPointKind::Infinity)
        } else {
            Err(TgqError::NoSuchIndex(i))
        }
    }

    pub fn line_kind(&self, idx: u32) -> Result<TLineKind, TgqError> {
        let i = idx as usize;
        if i < self.type_a.len() {
            let (e, s) = &self.type_a[i];
            Ok(TLineKind::Affine { element: *e, space: s.clone() })
        } else if i < self.structure.b {
            Ok(TLineKind::EggElement((i - self.type_a.len()) as u32))
        } else {
            Err(TgqError::NoSuchIndex(i))
        }
    }

    /// The collineation translating every affine point by `vec`, fixing
    /// the hyperplane at infinity pointwise.
    pub fn translation_action(&self, vec: &[u32]) -> Result<Translation, TgqError> {
        let f = self.field();
        let q = f.q();
        let dim = self.affine_dim();
        if vec.len() != dim || vec.iter().any(|&c| c >= q) {
            return Err(TgqError::BadVector { expected: dim, got: vec.to_vec() });
        }
        let mut point_map = vec![0u32; self.structure.v];
        for (i, a) in self.affine.iter().enumerate() {
            let shifted: Vec<u32> = a.iter().zip(vec).map(|(&c, &v)| f.add(c, v)).collect();
            point_map[i] = self.affine_lex_index(&shifted);
        }
        // Projective matrix of the translation, row-vector convention.
        let mut tmat = Mat::identity(dim + 1);
        for (k, &c) in vec.iter().enumerate() {
            tmat.set(dim, k, c);
        }
        let base = self.affine.len();
        for (j, s) in self.type2.iter().enumerate() {
            let img = apply_map(f, &tmat, s);
            point_map[base + j] = *self.type2_index.get(&img).ok_or_else(|| {
                TgqError::NoSuchIndex(base + j)
            })?;
        }
        let inf = self.structure.v - 1;
        point_map[inf] = inf as u32;
        let mut line_map = vec![0u32; self.structure.b];
        for (l, (_, s)) in self.type_a.iter().enumerate() {
            let img = apply_map(f, &tmat, s);
            line_map[l] = *self.type_a_index.get(&img).ok_or(TgqError::NoSuchIndex(l))?;
        }
        for l in self.type_a.len()..self.structure.b {
            line_map[l] = l as u32;
        }
        Ok(Translation {
            vector: vec.to_vec(),
            collineation: Collineation { point_map, line_map },
        })
    }

    /// The q^n symmetries about the egg-element line `i`: translations
    /// whose vector lies in the vector space underlying the element. Each
    /// is verified to fix every concurrent line.
    pub fn line_symmetries(&self, i: usize) -> Result<Vec<Translation>, TgqError> {
        let f = self.field();
        let q = f.q();
        if i >= self.egg.elements.len() {
            return Err(TgqError::NoSuchIndex(i));
        }
        let rows: Vec<Vec<u32>> = self.egg.elements[i]
            .m
            .rows_iter()
            .map(|r| r.to_vec())
            .collect();
        let line = self.element_line_index(i);
        let mut out = Vec::new();
        let mut coeffs = vec![0u32; rows.len()];
        loop {
            let mut vec = vec![0u32; self.affine_dim()];
            for (c, row) in coeffs.iter().zip(&rows) {
                for (k, &r) in row.iter().enumerate() {
                    vec[k] = f.add(vec[k], f.mul(*c, r));
                }
            }
            let t = self.translation_action(&vec)?;
            if !self.structure.is_symmetry_about(line, &t.collineation) {
                return Err(TgqError::SymmetryFailed { element: i, vector: vec });
            }
            out.push(t);
            // Odometer over the coefficient vector.
            let mut k = coeffs.len();
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                coeffs[k] += 1;
                if coeffs[k] < q {
                    break;
                }
                coeffs[k] = 0;
            }
        }
    }

    /// Decides whether every line through `p` is an axis of symmetry of
    /// full order s. At ∞ the axes come from `line_symmetries`; elsewhere
    /// each group is found by brute-force search.
    pub fn translation_point_check(&self, p: u32) -> Result<TranslationVerdict, TgqError> {
        let s_order = self.order.s;
        if p == self.infinity_index() {
            let mut axes = Vec::new();
            let mut witness = None;
            for i in 0..self.egg.elements.len() {
                let line = self.element_line_index(i);
                let count = self.line_symmetries(i)?.len() as u64;
                axes.push((line, count));
                if count != s_order && witness.is_none() {
                    witness = Some(line);
                }
            }
            return Ok(TranslationVerdict {
                point: p,
                is_translation_point: witness.is_none(),
                axes,
                witness,
            });
        }
        if p as usize >= self.structure.v {
            return Err(TgqError::NoSuchIndex(p as usize));
        }
        let lines = self.structure.point_lines[p as usize].clone();
        let sizes: Result<Vec<(u32, u64)>, TgqError> = lines
            .par_iter()
            .map(|&l| {
                let group = self.structure.symmetry_group_about(l)?;
                Ok((l, group.len() as u64))
            })
            .collect();
        let axes = sizes?;
        let witness = axes.iter().find(|(_, c)| *c != s_order).map(|(l, _)| *l);
        Ok(TranslationVerdict {
            point: p,
            is_translation_point: witness.is_none(),
            axes,
            witness,
        })
    }

    /// Rank over GF(q) of the union of all element vector spaces: the
    /// symmetry directions generate the full translation group exactly
    /// when this equals 2n+m.
    pub fn symmetry_span_rank(&self) -> usize {
        let f = self.field();
        let mut stacked = Mat::zero(0, self.affine_dim());
        for e in &self.egg.elements {
            for r in e.m.rows_iter() {
                stacked.push_row(r);
            }
        }
        crate::linalg::rank(f, &stacked)
    }
}

/// Options for building a T(n,m,q) model.
#[derive(Debug, Clone, Copy)]
pub struct TBuildOptions {
    pub mode: GqMode,
}

impl Default for TBuildOptions {
    fn default() -> Self {
        TBuildOptions { mode: GqMode::Auto { seed: 0 } }
    }
}

/// Builds the T(O) model of an egg and verifies the GQ axioms on the
/// resulting incidence structure.
pub fn build_t_model(egg: Egg, opts: &TBuildOptions) -> Result<TModel, TgqError> {
    let f = egg.field.clone();
    let q = f.q();
    let dim = (2 * egg.n + egg.m) as usize;
    let vdim = dim + 1;
    let elements = egg.elements.len();
    let egg_n = egg.n;

    // Embed the egg (living in PG(2n+m-1,q)) into the hyperplane x_last=0.
    let embed = |s: &Subspace| -> Subspace {
        let rows: Vec<Vec<u32>> = s
            .m
            .rows_iter()
            .map(|r| {
                let mut v = r.to_vec();
                v.push(0);
                v
            })
            .collect();
        Subspace::from_rows(&f, vdim, &rows)
    };
    let pi_emb: Vec<Subspace> = egg.elements.iter().map(&embed).collect();
    let tau_emb: Vec<Subspace> = (0..elements)
        .map(|i| embed(egg.tangent_space(i)))
        .collect();

    // Affine points in lexicographic order.
    let affine_count = (q as usize).pow(dim as u32);
    let mut affine: Vec<Vec<u32>> = Vec::with_capacity(affine_count);
    let mut digits = vec![0u32; dim];
    loop {
        let mut coords = digits.clone();
        coords.push(1);
        affine.push(coords);
        let mut k = dim;
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < q {
                break;
            }
            digits[k] = 0;
        }
        if digits.iter().all(|&d| d == 0) {
            break;
        }
    }
    let lex_of = |p: &[u32]| -> u32 {
        // p is projective with nonzero last coordinate.
        let inv = f.inv(*p.last().unwrap());
        p[..dim].iter().fold(0u32, |acc, &c| acc * q + f.mul(c, inv))
    };

    // Per element: the q^n span points over its tangent space and the
    // q^{n+m} affine lines over the element, via coset marking.
    struct PerElement {
        spans: Vec<Subspace>,
        affine_to_span: Vec<u32>,
        lines: Vec<Subspace>,
    }
    let per: Vec<PerElement> = (0..elements)
        .into_par_iter()
        .map(|i| {
            let mut spans = Vec::new();
            let mut affine_to_span = vec![u32::MAX; affine_count];
            for idx in 0..affine_count {
                if affine_to_span[idx] != u32::MAX {
                    continue;
                }
                let s = span_with_points(&f, &tau_emb[i], &[&affine[idx]]);
                let label = spans.len() as u32;
                for p in s.points(&f) {
                    if *p.last().unwrap() != 0 {
                        affine_to_span[lex_of(&p) as usize] = label;
                    }
                }
                spans.push(s);
            }
            let mut lines = Vec::new();
            let mut line_seen = vec![false; affine_count];
            for idx in 0..affine_count {
                if line_seen[idx] {
                    continue;
                }
                let l = span_with_points(&f, &pi_emb[i], &[&affine[idx]]);
                for p in l.points(&f) {
                    if *p.last().unwrap() != 0 {
                        line_seen[lex_of(&p) as usize] = true;
                    }
                }
                lines.push(l);
            }
            PerElement { spans, affine_to_span, lines }
        })
        .collect();

    // Global point codec.
    let spans_per_element = (q as usize).pow(egg_n);
    let mut type2: Vec<Subspace> = Vec::with_capacity(elements * spans_per_element);
    let mut type2_index: HashMap<Subspace, u32> = HashMap::new();
    for pe in &per {
        for s in &pe.spans {
            let g = (affine_count + type2.len()) as u32;
            type2_index.insert(s.clone(), g);
            type2.push(s.clone());
        }
    }
    let v = affine_count + type2.len() + 1;
    let inf = (v - 1) as u32;

    // Global line codec and incidence lists.
    let mut type_a: Vec<(u32, Subspace)> = Vec::new();
    let mut type_a_index: HashMap<Subspace, u32> = HashMap::new();
    let mut line_points: Vec<Vec<u32>> = Vec::new();
    for (i, pe) in per.iter().enumerate() {
        for l in &pe.lines {
            let mut pts: Vec<u32> = Vec::new();
            for p in l.points(&f) {
                if *p.last().unwrap() != 0 {
                    pts.push(lex_of(&p));
                }
            }
            let span_label = pe.affine_to_span[pts[0] as usize];
            pts.push(affine_count as u32 + (i * spans_per_element) as u32 + span_label);
            type_a_index.insert(l.clone(), type_a.len() as u32);
            type_a.push((i as u32, l.clone()));
            line_points.push(pts);
        }
    }
    for i in 0..elements {
        let start = affine_count + i * spans_per_element;
        let mut pts: Vec<u32> = (start..start + spans_per_element).map(|x| x as u32).collect();
        pts.push(inf);
        line_points.push(pts);
    }

    let mut structure = IncidenceStructure::from_line_points(v, line_points)?;
    let mut point_labels: Vec<String> = affine
        .iter()
        .map(|a| {
            let body: Vec<String> = a[..dim].iter().map(|c| c.to_string()).collect();
            format!("A({})", body.join(","))
        })
        .collect();
    for i in 0..elements {
        for j in 0..spans_per_element {
            point_labels.push(format!("S{i}.{j}"));
        }
    }
    point_labels.push("inf".to_string());
    structure.point_labels = Some(point_labels);
    let mut line_labels: Vec<String> = (0..type_a.len())
        .map(|l| {
            let (e, _) = type_a[l];
            format!("L{e}.{l}")
        })
        .collect();
    for i in 0..elements {
        line_labels.push(format!("E{i}"));
    }
    structure.line_labels = Some(line_labels);

    let order = gq_check(&structure, opts.mode)?;
    let want = GQOrder { s: (q as u64).pow(egg.n), t: (q as u64).pow(egg.m) };
    if order != want {
        return Err(TgqError::WrongOrder {
            got_s: order.s,
            got_t: order.t,
            want_s: want.s,
            want_t: want.t,
        });
    }
    Ok(TModel {
        egg,
        structure,
        order,
        affine,
        type2,
        type2_index,
        type_a,
        type_a_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::egg::{EggCheckOptions, conic_oval, egg_from_field_reduction, elliptic_quadric_ovoid};
    use crate::gf::FieldExt;

    fn model_123() -> TModel {
        let f = FiniteField::new(3, 1, None).unwrap();
        let ext = FieldExt::search(f, 1).unwrap();
        let pts = elliptic_quadric_ovoid(&ext);
        let egg = egg_from_field_reduction(&ext, &pts, &EggCheckOptions::default()).unwrap();
        build_t_model(egg, &TBuildOptions::default()).unwrap()
    }

    #[test]
    fn classical_q3_model_has_order_3_9() {
        let t = model_123();
        assert_eq!(t.order, GQOrder { s: 3, t: 9 });
        assert_eq!((t.structure.v, t.structure.b), (112, 280));
        assert_eq!(t.affine_count(), 81);
        assert_eq!(t.spans_per_element(), 3);
    }

    #[test]
    fn even_characteristic_model_has_order_2_4() {
        let f = FiniteField::new(2, 1, None).unwrap();
        let ext = FieldExt::search(f, 1).unwrap();
        let pts = elliptic_quadric_ovoid(&ext);
        let egg = egg_from_field_reduction(&ext, &pts, &EggCheckOptions::default()).unwrap();
        let t = build_t_model(egg, &TBuildOptions::default()).unwrap();
        assert_eq!(t.order, GQOrder { s: 2, t: 4 });
        assert_eq!((t.structure.v, t.structure.b), (27, 45));
    }

    #[test]
    fn pseudo_oval_model_is_a_gq_of_order_9_9() {
        // O(2,2,3) from a conic of PG(2,9): order (q^n, q^n).
        let f = FiniteField::new(3, 1, None).unwrap();
        let ext = FieldExt::search(f, 2).unwrap();
        let pts = conic_oval(&ext);
        let egg = egg_from_field_reduction(&ext, &pts, &EggCheckOptions::default()).unwrap();
        let t = build_t_model(egg, &TBuildOptions::default()).unwrap();
        assert_eq!(t.order, GQOrder { s: 9, t: 9 });
        assert_eq!((t.structure.v, t.structure.b), (820, 820));
    }

    #[test]
    fn point_and_line_kinds_round_trip() {
        let t = model_123();
        match t.point_kind(0).unwrap() {
            TPointKind::Affine(a) => assert_eq!(a, vec![0, 0, 0, 0]),
            other => panic!("expected affine, got {other:?}"),
        }
        match t.point_kind(80).unwrap() {
            TPointKind::Affine(a) => assert_eq!(a, vec![2, 2, 2, 2]),
            other => panic!("expected affine, got {other:?}"),
        }
        match t.point_kind(81).unwrap() {
            TPointKind::Span { element, .. } => assert_eq!(element, 0),
            other => panic!("expected span, got {other:?}"),
        }
        assert_eq!(t.point_kind(111).unwrap(), TPointKind::Infinity);
        assert!(t.point_kind(112).is_err());
        match t.line_kind(0).unwrap() {
            TLineKind::Affine { element, .. } => assert_eq!(element, 0),
            other => panic!("expected affine line, got {other:?}"),
        }
        assert_eq!(t.line_kind(270).unwrap(), TLineKind::EggElement(0));
        assert_eq!(t.line_kind(279).unwrap(), TLineKind::EggElement(9));
    }

    #[test]
    fn infinity_is_incident_with_exactly_the_element_lines() {
        let t = model_123();
        let inf = t.infinity_index();
        let lines = &t.structure.point_lines[inf as usize];
        let expected: Vec<u32> = (0..10).map(|i| t.element_line_index(i)).collect();
        assert_eq!(*lines, expected);
    }

    #[test]
    fn translations_form_a_regular_abelian_action_on_affine_points() {
        let t = model_123();
        let f = FiniteField::new(3, 1, None).unwrap();
        // Zero vector: identity.
        let id = t.translation_action(&[0, 0, 0, 0]).unwrap();
        assert!(id.collineation.is_identity());
        // Every nonzero vector is a fixed-point-free collineation on the
        // affine points, and the orbit of 0 covers all of them.
        let mut orbit = std::collections::HashSet::new();
        for code in 0..81u32 {
            let vec = vec![code / 27 % 3, code / 9 % 3, code / 3 % 3, code % 3];
            let tr = t.translation_action(&vec).unwrap();
            assert!(t.structure.verify_collineation(&tr.collineation));
            orbit.insert(tr.collineation.point_map[0]);
            if vec.iter().any(|&c| c != 0) {
                for p in 0..t.affine_count() as u32 {
                    assert_ne!(tr.collineation.point_map[p as usize], p);
                }
            }
        }
        assert_eq!(orbit.len(), 81);
        // Composition matches vector addition.
        let v = [1, 2, 0, 1];
        let w = [2, 2, 1, 0];
        let sum: Vec<u32> = v.iter().zip(&w).map(|(&a, &b)| f.add(a, b)).collect();
        let tv = t.translation_action(&v).unwrap();
        let tw = t.translation_action(&w).unwrap();
        let tsum = t.translation_action(&sum).unwrap();
        assert_eq!(tv.collineation.compose(&tw.collineation), tsum.collineation);
        assert_eq!(tw.collineation.compose(&tv.collineation), tsum.collineation);
    }

    #[test]
    fn element_lines_are_axes_with_exactly_s_symmetries() {
        let t = model_123();
        for i in 0..10 {
            let syms = t.line_symmetries(i).unwrap();
            assert_eq!(syms.len(), 3);
            assert!(syms.iter().any(|s| s.collineation.is_identity()));
            // Brute-force search finds no additional symmetries.
            let line = t.element_line_index(i);
            let brute = t.structure.symmetry_group_about(line).unwrap();
            assert_eq!(brute.len(), 3);
            let mut from_translations: Vec<Collineation> =
                syms.into_iter().map(|s| s.collineation).collect();
            from_translations.sort();
            assert_eq!(from_translations, brute);
        }
    }

    #[test]
    fn infinity_is_a_translation_point() {
        let t = model_123();
        let verdict = t.translation_point_check(t.infinity_index()).unwrap();
        assert!(verdict.is_translation_point);
        assert_eq!(verdict.axes.len(), 10);
        assert!(verdict.axes.iter().all(|&(_, c)| c == 3));
    }

    #[test]
    fn every_point_of_the_classical_q3_model_is_a_translation_point() {
        let t = model_123();
        // Group order per line, computed once and shared by all points.
        let full: Vec<bool> = (0..t.structure.b as u32)
            .into_par_iter()
            .map(|l| {
                t.structure.symmetry_group_about(l).unwrap().len() as u64 == t.order.s
            })
            .collect();
        assert!(full.iter().all(|&x| x));
        // Spot-check the per-point interface on an affine point.
        let verdict = t.translation_point_check(0).unwrap();
        assert!(verdict.is_translation_point);
    }

    #[test]
    fn symmetry_directions_generate_the_full_translation_group() {
        let t = model_123();
        assert_eq!(t.symmetry_span_rank(), 4);
    }

    #[test]
    fn infinity_is_coregular_in_the_classical_q3_model() {
        let t = model_123();
        let verdict = t
            .structure
            .coregularity(t.order, t.infinity_index())
            .unwrap();
        assert!(verdict.regular, "{:?}", verdict.witness);
        assert_eq!(verdict.object, crate::gq::RegularityObject::Coregularity(111));
    }

    #[test]
    fn bad_translation_vectors_are_rejected() {
        let t = model_123();
        assert!(matches!(
            t.translation_action(&[0, 0, 0]),
            Err(TgqError::BadVector { .. })
        ));
        assert!(matches!(
            t.translation_action(&[0, 0, 0, 3]),
            Err(TgqError::BadVector { .. })
        ));
    }
}
