//! Conics on the point union of an egg O(n, 2n, q) and the structures
//! built from them: Segre families, Π₀-sets, the δ-frame of a distinguished
//! element, and the goodness pipeline that runs on top of those.
//!
//! Throughout, the distinguished element is the one at index 0. Three
//! distinct elements πᵢ, πⱼ, π_k and a marked point s ∈ π_k determine a
//! unique nonsingular conic C ⊂ Õ: the (2n)-space ρ = ⟨πᵢ, πⱼ, s⟩ cuts the
//! tangent spaces τᵢ, τⱼ in n-spaces γᵢ, γⱼ meeting in a single point u;
//! projecting from u splits off the unique plane σ through u and s that
//! meets both elements, and C is the conic in σ through s tangent at
//! σ ∩ πᵢ and σ ∩ πⱼ to the lines through u. Each of its q+1 points lies
//! on a distinct element, and the tangent line at every point lies inside
//! the tangent space of that point's element. When C meets π₀ we call it a
//! π₀-conic.
//!
//! The same conic also arises inside the translation quadrangle T(O) from
//! any regular pair of affine lines: the grid they span carries a unique
//! hyperbolic quadric whose ρ-traces are exactly the conic's points.
//! [`grid_conic`] runs that construction and is the independent
//! quadrangle-side oracle for [`pi0_conic_through`].

use std::collections::BTreeSet;

use crate::conic::{self, Conic, ConicError};
use crate::egg::{Egg, EggError};
use crate::gf::FiniteField;
use crate::gq::{GqError, RegularityReport};
use crate::linalg::{self, Mat};
use crate::projgeom::{self, GeomError, Subspace};
use crate::tgq::{TgqError, TLineKind, TModel, TPointKind};

pub mod family;
pub mod frame;
pub mod goodness;
pub mod pi0set;

pub use family::{big_pi0_conic, eta_configuration, segre_family, BigPi0Conic, EtaConfiguration, SegreFamily};
pub use frame::{
    alpha_linearity, delta_frame, parallel_class_tangents, regulus_census, xi_star_flat,
    z_projection_census, AlphaReport, DeltaFrame, ParallelClassReport, RegulusCensus,
    XiStarReport, ZLineCensus,
};
pub use goodness::{
    classify, goodness_pipeline, regular_line_witness, Classification, EvidenceSuite,
    PipelineReport, RegularLineWitness,
};
pub use pi0set::{
    pi0_set_conic_closure, pi0_set_from, pi0_set_partition, Pi0Set, Pi0SetPartition,
};

#[derive(Debug, thiserror::Error)]
pub enum ConicsError {
    #[error("egg failure: {0}")]
    Egg(#[from] EggError),
    #[error("conic fit failure: {0}")]
    ConicFit(#[from] ConicError),
    #[error("geometry failure: {0}")]
    Geom(#[from] GeomError),
    #[error("quadrangle failure: {0}")]
    Gq(#[from] GqError),
    #[error("model failure: {0}")]
    Tgq(#[from] TgqError),
    #[error("the construction needs three distinct element roles, one of them element 0")]
    NotThroughPi0,
    #[error("the marked point does not lie on the element playing its role")]
    PointNotOnElement,
    #[error("expected ρ of projective dimension {want}, got {got}")]
    RhoDimension { want: usize, got: usize },
    #[error("expected {role} of projective dimension {want}, got {got}")]
    BadDimension { role: &'static str, want: usize, got: usize },
    #[error("degenerate plane: {0}")]
    DegeneratePlane(&'static str),
    #[error("the fitted conic is singular")]
    SingularConic,
    #[error("conic point {point:?} does not lie on the egg")]
    ConicOffEgg { point: Vec<u32> },
    #[error("two conic points share element {element}")]
    ContactCollision { element: u32 },
    #[error("the conic tangent at its point on element {element} leaves that tangent space")]
    TangentViolation { element: u32 },
    #[error("the line pair spans only {got} lines of the dual grid, expected {want}")]
    PairNotRegular { got: u64, want: u64 },
    #[error("the span holds {got} elements, expected {want}")]
    SpanTooSmall { want: u64, got: u64 },
    #[error("γ is not an n-space inside the tangent space of element 0")]
    GammaNotInTau0,
    #[error("Φ is not a complement of element 0: {0}")]
    PhiNotComplementary(&'static str),
    #[error("no nondegenerate frame among the correspondence points")]
    NoFrame,
    #[error("the projected points do not form an affine subspace: {0}")]
    NotAffineSubspace(&'static str),
    #[error("pipeline hypothesis not met: {0}")]
    HypothesisFail(String),
    #[error("pipeline finding: {0}")]
    PipelineFinding(String),
    #[error("q = 2 egg: the classification of this case is open")]
    QTwoOpenCase,
    #[error("unsupported instance: {0}")]
    BadInstance(&'static str),
}

/// A conic on the point union of an egg, with its contact bookkeeping.
///
/// `points`, `elements` and `tangent_lines` run in parallel: `points[p]`
/// lies on element `elements[p]` and the conic's tangent line there is
/// `tangent_lines[p]`, a line inside that element's tangent space. Points
/// are in the deterministic order of the carrier plane's internal point
/// enumeration.
#[derive(Debug, Clone)]
pub struct Pi0Conic {
    pub conic: Conic,
    pub points: Vec<Vec<u32>>,
    pub elements: Vec<u32>,
    pub tangent_lines: Vec<Subspace>,
    /// The (2n)-space ⟨πᵢ, πⱼ, s⟩ the construction ran in, when one ran.
    pub rho: Option<Subspace>,
}

impl Pi0Conic {
    /// Does the conic touch the given element?
    pub fn is_through(&self, element: u32) -> bool {
        self.elements.contains(&element)
    }

    /// Index (into the parallel vectors) of the contact on an element.
    pub fn contact_on(&self, element: u32) -> Option<usize> {
        self.elements.iter().position(|&e| e == element)
    }

    /// Point set as a sorted, deduplicated key for comparisons.
    pub fn point_key(&self) -> Vec<Vec<u32>> {
        let mut k = self.points.clone();
        k.sort();
        k
    }
}

/// Verifies a fitted conic against the egg's contact discipline and
/// packages it: q+1 points, each on its own element, tangent line at each
/// point inside that element's tangent space.
fn finish_conic(egg: &Egg, conic: Conic, rho: Option<Subspace>) -> Result<Pi0Conic, ConicsError> {
    let f = egg.field.as_ref();
    egg.tangents()?;
    if !conic.is_nonsingular(f) {
        return Err(ConicsError::SingularConic);
    }
    let points = conic.points(f);
    debug_assert_eq!(points.len() as u64, f.q() as u64 + 1);
    let mut elements = Vec::with_capacity(points.len());
    let mut tangent_lines = Vec::with_capacity(points.len());
    for p in &points {
        let e = egg
            .element_of(p)
            .ok_or_else(|| ConicsError::ConicOffEgg { point: p.clone() })? as u32;
        if elements.contains(&e) {
            return Err(ConicsError::ContactCollision { element: e });
        }
        let t = conic.tangent_at(f, p)?;
        if !egg.tangent_space(e as usize).contains(f, &t) {
            return Err(ConicsError::TangentViolation { element: e });
        }
        elements.push(e);
        tangent_lines.push(t);
    }
    Ok(Pi0Conic { conic, points, elements, tangent_lines, rho })
}

/// The unique conic on Õ through the marked point s ∈ π_k meeting πᵢ and
/// πⱼ, for distinct roles i, j, k with element 0 among them.
///
/// Runs entirely on subspace arithmetic: ρ = ⟨πᵢ, πⱼ, s⟩, the contact
/// point u = (ρ ∩ τᵢ) ∩ (ρ ∩ τⱼ) of the two tangent traces, the unique
/// plane σ through u and s meeting both elements (found by splitting s over
/// πᵢ ⊕ πⱼ ⊕ ⟨u⟩), and the conic fit from s plus the two tangencies at
/// σ ∩ πᵢ and σ ∩ πⱼ.
pub fn pi0_conic_through(
    egg: &Egg,
    i: usize,
    j: usize,
    k: usize,
    s: &[u32],
) -> Result<Pi0Conic, ConicsError> {
    if egg.m != 2 * egg.n {
        return Err(ConicsError::BadInstance("conics need an egg with m = 2n"));
    }
    if i == j || j == k || i == k || ![i, j, k].contains(&0) {
        return Err(ConicsError::NotThroughPi0);
    }
    let f = egg.field.as_ref();
    let n = egg.n as usize;
    let s = projgeom::normalize_point(f, s)?;
    if egg.element_of(&s) != Some(k) {
        return Err(ConicsError::PointNotOnElement);
    }
    egg.tangents()?;
    let (pi_i, pi_j) = (&egg.elements[i], &egg.elements[j]);
    let (tau_i, tau_j) = (egg.tangent_space(i), egg.tangent_space(j));

    let pair_span = projgeom::span(f, &[pi_i, pi_j]);
    let rho = projgeom::span_with_points(f, &pair_span, &[&s]);
    if rho.rank() != 2 * n + 1 {
        return Err(ConicsError::RhoDimension { want: 2 * n, got: rho.rank() - 1 });
    }
    let gamma_i = projgeom::meet(f, &rho, tau_i);
    let gamma_j = projgeom::meet(f, &rho, tau_j);
    for g in [&gamma_i, &gamma_j] {
        if g.rank() != n + 1 {
            return Err(ConicsError::BadDimension {
                role: "tangent trace ρ ∩ τ",
                want: n,
                got: g.rank() - 1,
            });
        }
    }
    let u_space = projgeom::meet(f, &gamma_i, &gamma_j);
    if u_space.rank() != 1 {
        return Err(ConicsError::BadDimension {
            role: "tangent trace meet",
            want: 0,
            got: u_space.rank().wrapping_sub(1),
        });
    }
    let u = projgeom::normalize_point(f, u_space.m.row(0))?;

    // Split s = a + b + λu with a ∈ ⟨πᵢ⟩, b ∈ ⟨πⱼ⟩. The three parts span ρ,
    // so the split is unique; a and b are the contacts of the plane.
    let mut basis = Mat::zero(0, egg.vdim());
    for r in pi_i.m.rows_iter().chain(pi_j.m.rows_iter()) {
        basis.push_row(r);
    }
    basis.push_row(&u);
    if linalg::rank(f, &basis) != 2 * n + 1 {
        return Err(ConicsError::DegeneratePlane("u falls into the span of the two elements"));
    }
    let coeffs = linalg::express_in_rows(f, &basis, &s)
        .ok_or(ConicsError::DegeneratePlane("marked point escapes ⟨πᵢ, πⱼ, u⟩"))?;
    let a = linalg::row_mul(f, &coeffs[..n], &pi_i.m);
    let b = linalg::row_mul(f, &coeffs[n..2 * n], &pi_j.m);
    if a.iter().all(|&c| c == 0) || b.iter().all(|&c| c == 0) {
        return Err(ConicsError::DegeneratePlane("the plane through s misses an element"));
    }
    let s_i = projgeom::normalize_point(f, &a)?;
    let s_j = projgeom::normalize_point(f, &b)?;

    let sigma = Subspace::from_rows(f, egg.vdim(), &[u.clone(), s_i.clone(), s_j.clone()]);
    if sigma.rank() != 3 {
        return Err(ConicsError::DegeneratePlane("contact points and u are collinear"));
    }
    debug_assert!(sigma.contains_point(f, &s));
    let t_i = projgeom::line_through(f, &s_i, &u);
    let t_j = projgeom::line_through(f, &s_j, &u);
    let fitted = conic::fit_conic(f, &sigma, &[s], &[(s_i, t_i), (s_j, t_j)])?;
    let out = finish_conic(egg, fitted, Some(rho))?;
    debug_assert!(out.is_through(i as u32) && out.is_through(j as u32) && out.is_through(k as u32));
    Ok(out)
}

/// Census of all conics on Õ through a marked point that meet two fixed
/// elements and obey the contact discipline, found by brute enumeration.
///
/// Scans every plane ⟨s, a, b⟩ with a ∈ πᵢ, b ∈ πⱼ, collects the egg
/// points in it, and screens every small arc through s for nonsingular
/// conics whose points all lie on distinct elements with tangents inside
/// the matching tangent spaces. Independent of [`pi0_conic_through`];
/// the expected census size is one.
#[derive(Debug, Clone)]
pub struct ConicCensus {
    pub planes_scanned: u64,
    pub arcs_tested: u64,
    pub conics: Vec<Pi0Conic>,
}

pub fn conic_census(egg: &Egg, i: usize, j: usize, s: &[u32]) -> Result<ConicCensus, ConicsError> {
    if egg.m != 2 * egg.n {
        return Err(ConicsError::BadInstance("conics need an egg with m = 2n"));
    }
    let f = egg.field.as_ref();
    let q = f.q() as usize;
    let s = projgeom::normalize_point(f, s)?;
    let k = egg.element_of(&s).ok_or(ConicsError::PointNotOnElement)?;
    if k == i || k == j || i == j {
        return Err(ConicsError::NotThroughPi0);
    }
    let mut planes_scanned = 0u64;
    let mut arcs_tested = 0u64;
    let mut seen: BTreeSet<Vec<Vec<u32>>> = BTreeSet::new();
    let mut conics = Vec::new();
    // A conic has q+1 points; beyond the marked point, min(q, 4) more pin
    // down the pencil (five points are a full determination, and for q = 3
    // the whole conic is only four points).
    let pick = q.min(4);
    for a in egg.elements[i].points(f) {
        for b in egg.elements[j].points(f) {
            let sigma = Subspace::from_rows(f, egg.vdim(), &[s.clone(), a.clone(), b.clone()]);
            if sigma.rank() != 3 {
                continue;
            }
            planes_scanned += 1;
            let on_egg: Vec<Vec<u32>> = sigma
                .points(f)
                .into_iter()
                .filter(|p| *p != s && egg.element_of(p).is_some())
                .collect();
            if on_egg.len() + 1 < q + 1 {
                continue;
            }
            for combo in combinations(on_egg.len(), pick) {
                let mut arc = vec![s.clone()];
                arc.extend(combo.iter().map(|&x| on_egg[x].clone()));
                arcs_tested += 1;
                for cand in conic::conics_through(f, &sigma, &arc).unwrap_or_default() {
                    let Ok(pc) = finish_conic(egg, cand, None) else { continue };
                    if !pc.is_through(i as u32) || !pc.is_through(j as u32) {
                        continue;
                    }
                    if seen.insert(pc.point_key()) {
                        conics.push(pc);
                    }
                }
            }
        }
    }
    Ok(ConicCensus { planes_scanned, arcs_tested, conics })
}

/// All index combinations of size `r` from `0..m`, in lexicographic order.
fn combinations(m: usize, r: usize) -> Vec<Vec<usize>> {
    if r > m {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        out.push(idx.clone());
        // Advance the rightmost index that can still move.
        let mut i = r;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + m - r {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// The hyperplane at infinity of the model's ambient space.
fn hyperplane_at_infinity(f: &FiniteField, egg_vdim: usize) -> Subspace {
    let rows: Vec<Vec<u32>> = (0..egg_vdim)
        .map(|r| {
            let mut v = vec![0u32; egg_vdim + 1];
            v[r] = 1;
            v
        })
        .collect();
    Subspace::from_rows(f, egg_vdim + 1, &rows)
}

/// Strips the hyperplane coordinate from a subspace lying inside it.
fn unembed(f: &FiniteField, s: &Subspace, egg_vdim: usize) -> Result<Subspace, ConicsError> {
    let mut rows = Vec::with_capacity(s.rank());
    for r in s.m.rows_iter() {
        if r[egg_vdim] != 0 {
            return Err(ConicsError::BadInstance("subspace leaves the hyperplane at infinity"));
        }
        rows.push(r[..egg_vdim].to_vec());
    }
    Ok(Subspace::from_rows(f, egg_vdim, &rows))
}

/// Ambient projective coordinates of a model point; only affine points
/// qualify here.
fn affine_coords(model: &TModel, idx: u32) -> Result<Vec<u32>, ConicsError> {
    match model.point_kind(idx)? {
        TPointKind::Affine(mut v) => {
            v.push(1);
            Ok(v)
        }
        _ => Err(ConicsError::BadInstance("expected an affine model point")),
    }
}

/// Builds a conic on Õ from a regular pair of affine lines of T(O), the
/// quadrangle-side counterpart of [`pi0_conic_through`].
///
/// The pair's double perp is a dual grid over q^n + 1 elements. Three of
/// its lines L₀, L₁, L₂ and the matching transversals M₀, M₁, M₂ give grid
/// points n_ij = L_i ∩ M_j; the contact on L₂'s element is the trace
/// s₂ = n₂₀n₂₁ ∩ ρ with ρ = ⟨L₀, L₁⟩ ∩ H, the contacts on the base
/// elements come from the cross lines n₀₁n₀₂ ∩ n₁₀n₂₀ and
/// n₁₀n₁₂ ∩ n₀₁n₂₁, and each remaining point of n₂₀n₂₁ is a quadrangle
/// point whose feet on L₀ and L₁ span a line tracing one more contact.
/// The q+1 contacts form the conic; its tangent at each contact is the
/// trace of that element's tangent space on the conic plane.
pub fn grid_conic(
    model: &TModel,
    l0: u32,
    l1: u32,
) -> Result<(Pi0Conic, RegularityReport), ConicsError> {
    let egg = &model.egg;
    let f = egg.field.as_ref();
    let vdim = egg.vdim();
    egg.tangents()?;
    let TLineKind::Affine { element: e0, space: sp0 } = model.line_kind(l0)? else {
        return Err(ConicsError::BadInstance("grid conics need affine lines"));
    };
    let TLineKind::Affine { element: e1, space: sp1 } = model.line_kind(l1)? else {
        return Err(ConicsError::BadInstance("grid conics need affine lines"));
    };
    if e0 == e1 || model.structure.lines_meet(l0, l1) {
        return Err(ConicsError::BadInstance("grid conics need nonconcurrent lines over distinct elements"));
    }
    let report = model.structure.line_pair_regularity(model.order, l0, l1)?;
    let want = model.order.s + 1;
    if !report.regular {
        return Err(ConicsError::PairNotRegular {
            got: report.double_perp_size.unwrap_or(0),
            want,
        });
    }

    // Label the grid: element of every double-perp line, and the
    // transversal over the same element as each.
    let dperp = model.structure.line_double_perp(l0, l1);
    let perp = model.structure.line_perp(l0, l1);
    let element_of_line = |l: u32| -> Result<u32, ConicsError> {
        match model.line_kind(l)? {
            TLineKind::Affine { element, .. } => Ok(element),
            TLineKind::EggElement(_) => {
                Err(ConicsError::BadInstance("the grid touches the hyperplane at infinity"))
            }
        }
    };
    let l2 = *dperp
        .iter()
        .find(|&&l| l != l0 && l != l1)
        .ok_or(ConicsError::PairNotRegular { got: dperp.len() as u64, want })?;
    let e2 = element_of_line(l2)?;
    let transversal_over = |e: u32| -> Result<u32, ConicsError> {
        for &m in &perp {
            if element_of_line(m)? == e {
                return Ok(m);
            }
        }
        Err(ConicsError::BadInstance("missing transversal over a grid element"))
    };
    let (m0, m1, m2) = (transversal_over(e0)?, transversal_over(e1)?, transversal_over(e2)?);

    let grid_pt = |l: u32, m: u32| -> Result<Vec<u32>, ConicsError> {
        let p = model
            .structure
            .meet_point(l, m)
            .ok_or(ConicsError::BadInstance("expected concurrent grid lines"))?;
        affine_coords(model, p)
    };
    let n01 = grid_pt(l0, m1)?;
    let n02 = grid_pt(l0, m2)?;
    let n10 = grid_pt(l1, m0)?;
    let n12 = grid_pt(l1, m2)?;
    let n20 = grid_pt(l2, m0)?;
    let n21 = grid_pt(l2, m1)?;

    let h = hyperplane_at_infinity(f, vdim);
    let rho_model = projgeom::meet(f, &projgeom::span(f, &[&sp0, &sp1]), &h);
    if rho_model.rank() != 2 * egg.n as usize + 1 {
        return Err(ConicsError::RhoDimension {
            want: 2 * egg.n as usize,
            got: rho_model.rank().wrapping_sub(1),
        });
    }

    let point_of = |s: &Subspace, role: &'static str| -> Result<Vec<u32>, ConicsError> {
        if s.rank() != 1 {
            return Err(ConicsError::BadDimension { role, want: 0, got: s.rank().wrapping_sub(1) });
        }
        Ok(projgeom::normalize_point(f, s.m.row(0))?)
    };
    let cross = projgeom::line_through(f, &n20, &n21);
    let s2 = point_of(&projgeom::meet(f, &cross, &rho_model), "trace of n₂₀n₂₁ on ρ")?;
    debug_assert!(projgeom::line_through(f, &n02, &n12).contains_point(f, &s2));
    let s0 = point_of(
        &projgeom::meet(
            f,
            &projgeom::line_through(f, &n01, &n02),
            &projgeom::line_through(f, &n10, &n20),
        ),
        "cross-line meet over the first base element",
    )?;
    let s1 = point_of(
        &projgeom::meet(
            f,
            &projgeom::line_through(f, &n10, &n12),
            &projgeom::line_through(f, &n01, &n21),
        ),
        "cross-line meet over the second base element",
    )?;

    let mut contacts_model = vec![s0, s1, s2.clone()];
    // The base grid points come back from the model unnormalized; the
    // cross-line enumeration is normalized.
    let skip0 = projgeom::normalize_point(f, &n20)?;
    let skip1 = projgeom::normalize_point(f, &n21)?;
    for p in cross.points(f) {
        if p == skip0 || p == skip1 || p == s2 {
            continue;
        }
        let idx = model
            .affine_point_index(&p)
            .ok_or(ConicsError::BadInstance("a further grid point is not affine"))?;
        let f0 = model
            .structure
            .foot(idx, l0)
            .ok_or(ConicsError::BadInstance("missing foot on the first base line"))?;
        let f1 = model
            .structure
            .foot(idx, l1)
            .ok_or(ConicsError::BadInstance("missing foot on the second base line"))?;
        let foot_line =
            projgeom::line_through(f, &affine_coords(model, f0)?, &affine_coords(model, f1)?);
        contacts_model.push(point_of(
            &projgeom::meet(f, &foot_line, &rho_model),
            "foot-line trace on ρ",
        )?);
    }
    debug_assert_eq!(contacts_model.len() as u64, f.q() as u64 + 1);

    // Everything so far lives one dimension up; the contacts are inside H.
    let mut contacts = Vec::with_capacity(contacts_model.len());
    for c in &contacts_model {
        if c[vdim] != 0 {
            return Err(ConicsError::BadInstance("a contact escaped the hyperplane at infinity"));
        }
        contacts.push(projgeom::normalize_point(f, &c[..vdim])?);
    }
    let rho = unembed(f, &rho_model, vdim)?;
    let sigma = Subspace::from_rows(f, vdim, &contacts);
    if sigma.rank() != 3 {
        return Err(ConicsError::DegeneratePlane("grid contacts do not span a plane"));
    }
    let tangency = |s: &Vec<u32>, e: u32| -> Result<(Vec<u32>, Subspace), ConicsError> {
        let t = projgeom::meet(f, &sigma, egg.tangent_space(e as usize));
        if t.rank() != 2 {
            return Err(ConicsError::BadDimension {
                role: "tangent trace on the conic plane",
                want: 1,
                got: t.rank().wrapping_sub(1),
            });
        }
        Ok((s.clone(), t))
    };
    let fitted = conic::fit_conic(
        f,
        &sigma,
        &contacts[2..],
        &[tangency(&contacts[0], e0)?, tangency(&contacts[1], e1)?],
    )?;
    let pc = finish_conic(egg, fitted, Some(rho))?;
    for e in [e0, e1, e2] {
        if !pc.is_through(e) {
            return Err(ConicsError::PipelineFinding(format!(
                "grid conic misses element {e} of its own grid"
            )));
        }
    }
    Ok((pc, report))
}

#[cfg(test)]
pub(crate) mod fixtures {
    use std::sync::Arc;

    use once_cell::sync::Lazy;

    use crate::egg::{egg_from_field_reduction, elliptic_quadric_ovoid, Egg, EggCheckOptions};
    use crate::gf::{FieldExt, FiniteField};
    use crate::tgq::{build_t_model, TBuildOptions, TModel};

    fn classical(p: u64, e: u32, deg: usize) -> Egg {
        let base = FiniteField::new(p, e, None).unwrap();
        let ext = FieldExt::search(base, deg).unwrap();
        let pts = elliptic_quadric_ovoid(&ext);
        egg_from_field_reduction(&ext, &pts, &EggCheckOptions::default()).unwrap()
    }

    pub static O123: Lazy<Arc<Egg>> = Lazy::new(|| Arc::new(classical(3, 1, 1)));
    pub static O124: Lazy<Arc<Egg>> = Lazy::new(|| Arc::new(classical(2, 2, 1)));
    pub static O125: Lazy<Arc<Egg>> = Lazy::new(|| Arc::new(classical(5, 1, 1)));
    pub static O243: Lazy<Arc<Egg>> = Lazy::new(|| Arc::new(classical(3, 1, 2)));

    pub static T123: Lazy<Arc<TModel>> = Lazy::new(|| {
        Arc::new(build_t_model(classical(3, 1, 1), &TBuildOptions::default()).unwrap())
    });
    pub static T124: Lazy<Arc<TModel>> = Lazy::new(|| {
        Arc::new(build_t_model(classical(2, 2, 1), &TBuildOptions::default()).unwrap())
    });
    pub static T243: Lazy<Arc<TModel>> = Lazy::new(|| {
        Arc::new(build_t_model(classical(3, 1, 2), &TBuildOptions::default()).unwrap())
    });

    /// First affine line of the model over the given egg element.
    pub fn affine_line_over(model: &TModel, element: u32) -> u32 {
        use crate::tgq::TLineKind;
        (0..model.structure.b as u32)
            .find(|&l| {
                matches!(model.line_kind(l), Ok(TLineKind::Affine { element: e, .. }) if e == element)
            })
            .expect("an affine line over every element")
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn the_conic_through_three_ovoid_points_touches_four_elements_with_the_right_tangents() {
        let egg = &*O123;
        let s = egg.elements[0].points(&egg.field)[0].clone();
        let pc = pi0_conic_through(egg, 1, 2, 0, &s).unwrap();
        assert_eq!(pc.points.len(), 4);
        assert_eq!(pc.elements.len(), 4);
        for e in [0, 1, 2] {
            assert!(pc.is_through(e));
        }
        assert!(pc.points.contains(&s));
        let rho = pc.rho.as_ref().unwrap();
        assert_eq!(rho.rank(), 3);
        for (p, t) in pc.points.iter().zip(&pc.tangent_lines) {
            assert!(t.contains_point(&egg.field, p));
        }
    }

    #[test]
    fn the_census_finds_exactly_the_constructed_conic() {
        let egg = &*O123;
        for k in [0usize, 3, 5] {
            let (i, j) = if k == 0 { (1, 2) } else { (0, 1) };
            let s = egg.elements[k].points(&egg.field)[0].clone();
            let direct = pi0_conic_through(egg, i, j, k, &s).unwrap();
            let census = conic_census(egg, i, j, &s).unwrap();
            assert_eq!(census.conics.len(), 1, "roles ({i},{j},{k})");
            assert_eq!(census.conics[0].point_key(), direct.point_key());
        }
    }

    #[test]
    fn conic_uniqueness_holds_at_every_marked_point_across_characteristics() {
        for egg in [&*O123, &*O124, &*O125] {
            let f = egg.field.as_ref();
            for k in 0..egg.elements.len() {
                if k == 1 || k == 2 {
                    continue;
                }
                let (i, j) = (1usize, 2usize);
                let s = egg.elements[k].points(f)[0].clone();
                let census = conic_census(egg, i, j, &s).unwrap();
                assert_eq!(census.conics.len(), 1, "q = {}, element {k}", f.q());
            }
        }
    }

    #[test]
    fn reconstruction_from_any_touched_element_returns_the_same_conic() {
        let egg = &*O123;
        let s = egg.elements[3].points(&egg.field)[0].clone();
        let pc = pi0_conic_through(egg, 0, 1, 3, &s).unwrap();
        // Rebuild from a different marked point of the same conic and two
        // other touched elements; uniqueness forces the same point set.
        let other = pc
            .elements
            .iter()
            .position(|&e| ![0, 1, 3].contains(&(e as usize)))
            .unwrap();
        let e_other = pc.elements[other] as usize;
        let p_other = pc.points[other].clone();
        let again = pi0_conic_through(egg, 0, 1, e_other, &p_other).unwrap();
        assert_eq!(again.point_key(), pc.point_key());
        let third = pi0_conic_through(egg, 0, 3, e_other, &p_other).unwrap();
        assert_eq!(third.point_key(), pc.point_key());
    }

    #[test]
    fn pseudo_elements_carry_conics_with_the_same_discipline() {
        let egg = &*O243;
        let f = egg.field.as_ref();
        let s = egg.elements[0].points(f)[0].clone();
        let pc = pi0_conic_through(egg, 1, 2, 0, &s).unwrap();
        assert_eq!(pc.points.len(), 4);
        assert_eq!(pc.rho.as_ref().unwrap().rank(), 5);
        let census = conic_census(egg, 1, 2, &s).unwrap();
        assert_eq!(census.planes_scanned, 16);
        assert_eq!(census.conics.len(), 1);
        assert_eq!(census.conics[0].point_key(), pc.point_key());
    }

    #[test]
    fn grid_conics_agree_with_the_direct_construction() {
        let model = &*T123;
        let egg = &model.egg;
        let l0 = affine_line_over(model, 0);
        let l1 = (0..model.structure.b as u32)
            .find(|&l| {
                matches!(model.line_kind(l), Ok(TLineKind::Affine { element: 1, .. }))
                    && !model.structure.lines_meet(l0, l)
            })
            .unwrap();
        let (pc, report) = grid_conic(model, l0, l1).unwrap();
        assert!(report.regular);
        assert_eq!(pc.points.len(), 4);
        assert!(pc.is_through(0) && pc.is_through(1));
        // The subspace-side construction from one of its contacts gives the
        // same conic.
        let k = *pc.elements.iter().find(|&&e| e != 0 && e != 1).unwrap() as usize;
        let s = pc.points[pc.contact_on(k as u32).unwrap()].clone();
        let direct = pi0_conic_through(egg, 0, 1, k, &s).unwrap();
        assert_eq!(direct.point_key(), pc.point_key());
    }

    #[test]
    fn degenerate_requests_are_rejected() {
        let egg = &*O123;
        let f = egg.field.as_ref();
        let s = egg.elements[3].points(f)[0].clone();
        assert!(matches!(
            pi0_conic_through(egg, 1, 2, 3, &s),
            Err(ConicsError::NotThroughPi0)
        ));
        assert!(matches!(
            pi0_conic_through(egg, 0, 1, 2, &s),
            Err(ConicsError::PointNotOnElement)
        ));
        assert!(matches!(
            pi0_conic_through(egg, 0, 1, 1, &s),
            Err(ConicsError::NotThroughPi0)
        ));
    }

    #[test]
    fn index_combinations_enumerate_without_repeats() {
        let c = combinations(5, 3);
        assert_eq!(c.len(), 10);
        assert!(c.windows(2).all(|w| w[0] < w[1]));
        assert!(combinations(3, 4).is_empty());
        assert_eq!(combinations(4, 4).len(), 1);
    }
}
