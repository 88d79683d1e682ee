//! Families of conics through the points of element 0.
//!
//! Fixing two other elements πᵢ, πⱼ, each point s of π₀ determines the
//! unique conic through s meeting πᵢ and πⱼ. The resulting family of
//! (qⁿ−1)/(q−1) conics lives inside the (3n−1)-space M = ⟨π₀, πᵢ, πⱼ⟩ and
//! carries the structure of a Segre variety: every conic plane also meets
//! the (n−1)-space η₀ = (τᵢ ∩ M) ∩ (τⱼ ∩ M), any two planes correspond
//! under a projectivity matching contacts element by element, and the
//! union of all family conics is the full point set of exactly q+1
//! elements — the "big conic" through π₀, πᵢ and πⱼ.
//!
//! The traces τ̄₀, τ̄ᵢ, τ̄ⱼ of the three tangent spaces on M pairwise meet
//! in (n−1)-spaces η₀, ηᵢ, ηⱼ (indexed by the element they avoid). In even
//! characteristic the three coincide and collect the nuclei of all family
//! conics; in odd characteristic they are spread apart, but the three
//! (2n−1)-spaces ⟨π₀, η₀⟩, ⟨πᵢ, ηᵢ⟩, ⟨πⱼ, ηⱼ⟩ still share an (n−1)-space.

use std::collections::{BTreeMap, BTreeSet};

use super::{pi0_conic_through, ConicsError, Pi0Conic};
use crate::egg::Egg;
use crate::linalg;
use crate::projgeom::{self, Subspace};

/// A family of conics through the points of element 0 meeting two fixed
/// elements, together with its verified Segre structure.
#[derive(Debug, Clone)]
pub struct SegreFamily {
    pub i: usize,
    pub j: usize,
    /// One conic per point of element 0, in point-enumeration order.
    pub conics: Vec<Pi0Conic>,
    /// ⟨π₀, πᵢ, πⱼ⟩, the (3n−1)-space carrying the family.
    pub span: Subspace,
    /// Pairwise traces of the tangent spaces on `span`, indexed by the
    /// element whose tangent space does *not* participate.
    pub eta0: Subspace,
    pub eta_i: Subspace,
    pub eta_j: Subspace,
    /// The q+1 elements whose union is the union of the family conics.
    pub v_elements: Vec<u32>,
    /// Plane pairs related by a verified projectivity.
    pub pairs_checked: u64,
    /// Contact and η-trace correspondences reproduced by those maps.
    pub correspondences_checked: u64,
}

fn eta_traces(
    egg: &Egg,
    span: &Subspace,
    i: usize,
    j: usize,
) -> Result<(Subspace, Subspace, Subspace), ConicsError> {
    let f = egg.field.as_ref();
    let n = egg.n as usize;
    egg.tangents()?;
    let bar = |e: usize| -> Result<Subspace, ConicsError> {
        let t = projgeom::meet(f, egg.tangent_space(e), span);
        if t.rank() != 2 * n {
            return Err(ConicsError::BadDimension {
                role: "tangent trace on the family span",
                want: 2 * n - 1,
                got: t.rank().wrapping_sub(1),
            });
        }
        Ok(t)
    };
    let (bar0, bar_i, bar_j) = (bar(0)?, bar(i)?, bar(j)?);
    let pair = |a: &Subspace, b: &Subspace, role: &'static str| -> Result<Subspace, ConicsError> {
        let e = projgeom::meet(f, a, b);
        if e.rank() != n {
            return Err(ConicsError::BadDimension { role, want: n - 1, got: e.rank().wrapping_sub(1) });
        }
        Ok(e)
    };
    Ok((
        pair(&bar_i, &bar_j, "η trace avoiding element 0")?,
        pair(&bar0, &bar_j, "η trace avoiding the first fixed element")?,
        pair(&bar0, &bar_i, "η trace avoiding the second fixed element")?,
    ))
}

/// Trace of a subspace on a conic plane, required to be a single point;
/// returned in the plane's internal coordinates.
fn plane_trace(
    f: &crate::gf::FiniteField,
    plane: &Subspace,
    sub: &Subspace,
    role: &'static str,
) -> Result<Vec<u32>, ConicsError> {
    let t = projgeom::meet(f, plane, sub);
    if t.rank() != 1 {
        return Err(ConicsError::BadDimension { role, want: 0, got: t.rank().wrapping_sub(1) });
    }
    plane
        .coords_of(f, &projgeom::normalize_point(f, t.m.row(0))?)
        .ok_or(ConicsError::DegeneratePlane("trace point escapes its own plane"))
}

/// Builds and verifies the family of conics through the points of element
/// 0 meeting elements i and j.
pub fn segre_family(egg: &Egg, i: usize, j: usize) -> Result<SegreFamily, ConicsError> {
    if i == 0 || j == 0 || i == j {
        return Err(ConicsError::NotThroughPi0);
    }
    let f = egg.field.as_ref();
    let span = projgeom::span(f, &[&egg.elements[0], &egg.elements[i], &egg.elements[j]]);
    if span.rank() != 3 * egg.n as usize {
        return Err(ConicsError::BadDimension {
            role: "family span",
            want: 3 * egg.n as usize - 1,
            got: span.rank().wrapping_sub(1),
        });
    }
    let (eta0, eta_i, eta_j) = eta_traces(egg, &span, i, j)?;

    let mut conics = Vec::new();
    let mut planes: BTreeSet<Subspace> = BTreeSet::new();
    for s in egg.elements[0].points(f) {
        let pc = pi0_conic_through(egg, i, j, 0, &s)?;
        if !span.contains(f, &pc.conic.plane) {
            return Err(ConicsError::PipelineFinding(
                "a family conic leaves the span of its three elements".into(),
            ));
        }
        planes.insert(pc.conic.plane.clone());
        conics.push(pc);
    }
    if planes.len() != conics.len() {
        return Err(ConicsError::PipelineFinding("family conics share a plane".into()));
    }

    // Projectivities between plane pairs: fitted on the three contacts over
    // elements 0, i, j and the η₀-trace, then required to reproduce every
    // contact correspondence and the remaining two η-traces.
    let frame_of = |pc: &Pi0Conic| -> Result<(Vec<Vec<u32>>, BTreeMap<u32, Vec<u32>>), ConicsError> {
        let plane = &pc.conic.plane;
        let mut contacts = BTreeMap::new();
        for (p, &e) in pc.points.iter().zip(&pc.elements) {
            let c = plane
                .coords_of(f, p)
                .ok_or(ConicsError::DegeneratePlane("conic point escapes its plane"))?;
            contacts.insert(e, c);
        }
        let l0 = plane_trace(f, plane, &eta0, "η₀ trace on a conic plane")?;
        let li = plane_trace(f, plane, &eta_i, "ηᵢ trace on a conic plane")?;
        let lj = plane_trace(f, plane, &eta_j, "ηⱼ trace on a conic plane")?;
        let frame = vec![
            contacts[&0].clone(),
            contacts[&(i as u32)].clone(),
            contacts[&(j as u32)].clone(),
            l0.clone(),
        ];
        let mut traces = BTreeMap::new();
        traces.insert(u32::MAX, l0);
        traces.insert(u32::MAX - 1, li);
        traces.insert(u32::MAX - 2, lj);
        for (e, c) in contacts {
            traces.insert(e, c);
        }
        Ok((frame, traces))
    };
    let mut pairs_checked = 0u64;
    let mut correspondences_checked = 0u64;
    for a in 0..conics.len() {
        for b in a + 1..conics.len() {
            let (frame_a, all_a) = frame_of(&conics[a])?;
            let (frame_b, all_b) = frame_of(&conics[b])?;
            let theta = projgeom::fit_projectivity(f, &frame_a, &frame_b)?;
            if all_a.len() != all_b.len() {
                return Err(ConicsError::PipelineFinding(
                    "family conics touch different element sets".into(),
                ));
            }
            for (key, ca) in &all_a {
                let image = projgeom::normalize_point(f, &linalg::row_mul(f, ca, &theta))?;
                let expect = projgeom::normalize_point(f, &all_b[key])?;
                if image != expect {
                    return Err(ConicsError::PipelineFinding(format!(
                        "plane projectivity breaks the correspondence at key {key}"
                    )));
                }
                correspondences_checked += 1;
            }
            pairs_checked += 1;
        }
    }

    // The union of the family conics is the full point set of exactly q+1
    // elements.
    let mut by_element: BTreeMap<u32, BTreeSet<Vec<u32>>> = BTreeMap::new();
    for pc in &conics {
        for (p, &e) in pc.points.iter().zip(&pc.elements) {
            by_element.entry(e).or_default().insert(p.clone());
        }
    }
    let want = f.q() as u64 + 1;
    if by_element.len() as u64 != want {
        return Err(ConicsError::SpanTooSmall { want, got: by_element.len() as u64 });
    }
    for (&e, pts) in &by_element {
        let full: BTreeSet<Vec<u32>> = egg.elements[e as usize].points(f).into_iter().collect();
        if *pts != full {
            return Err(ConicsError::PipelineFinding(format!(
                "family conics cover element {e} only partially"
            )));
        }
    }
    let v_elements: Vec<u32> = by_element.into_keys().collect();

    Ok(SegreFamily {
        i,
        j,
        conics,
        span,
        eta0,
        eta_i,
        eta_j,
        v_elements,
        pairs_checked,
        correspondences_checked,
    })
}

/// The η-configuration of a family: coincidence and nuclei in even
/// characteristic, the shared (n−1)-space of the ⟨π, η⟩ spans in odd.
#[derive(Debug, Clone)]
pub struct EtaConfiguration {
    pub even: bool,
    pub eta0: Subspace,
    pub eta_i: Subspace,
    pub eta_j: Subspace,
    /// The common value of the three traces (even characteristic only).
    pub common: Option<Subspace>,
    /// Nuclei of the family conics, all inside `common` (even only).
    pub nuclei: Vec<Vec<u32>>,
    /// The (n−1)-space shared by ⟨π₀, η₀⟩, ⟨πᵢ, ηᵢ⟩, ⟨πⱼ, ηⱼ⟩ (odd only).
    pub triple_meet: Option<Subspace>,
}

pub fn eta_configuration(egg: &Egg, i: usize, j: usize) -> Result<EtaConfiguration, ConicsError> {
    let f = egg.field.as_ref();
    let n = egg.n as usize;
    let fam = segre_family(egg, i, j)?;
    let (eta0, eta_i, eta_j) = (fam.eta0.clone(), fam.eta_i.clone(), fam.eta_j.clone());
    if f.is_even() {
        if eta0 != eta_i || eta0 != eta_j {
            return Err(ConicsError::PipelineFinding(
                "η traces differ in even characteristic".into(),
            ));
        }
        let mut nuclei = Vec::new();
        for pc in &fam.conics {
            let nu = pc.conic.nucleus(f)?;
            if !eta0.contains_point(f, &nu) {
                return Err(ConicsError::PipelineFinding(
                    "a conic nucleus escapes the common η trace".into(),
                ));
            }
            nuclei.push(nu);
        }
        Ok(EtaConfiguration {
            even: true,
            common: Some(eta0.clone()),
            eta0,
            eta_i,
            eta_j,
            nuclei,
            triple_meet: None,
        })
    } else {
        let b0 = projgeom::span(f, &[&egg.elements[0], &eta0]);
        let bi = projgeom::span(f, &[&egg.elements[i], &eta_i]);
        let bj = projgeom::span(f, &[&egg.elements[j], &eta_j]);
        for b in [&b0, &bi, &bj] {
            if b.rank() != 2 * n {
                return Err(ConicsError::BadDimension {
                    role: "⟨element, η⟩ span",
                    want: 2 * n - 1,
                    got: b.rank().wrapping_sub(1),
                });
            }
        }
        let triple = projgeom::meet(f, &projgeom::meet(f, &b0, &bi), &bj);
        if triple.rank() != n {
            return Err(ConicsError::BadDimension {
                role: "triple meet of the ⟨element, η⟩ spans",
                want: n - 1,
                got: triple.rank().wrapping_sub(1),
            });
        }
        Ok(EtaConfiguration {
            even: false,
            eta0,
            eta_i,
            eta_j,
            common: None,
            nuclei: Vec::new(),
            triple_meet: Some(triple),
        })
    }
}

/// The q+1 elements whose union carries a whole conic family, with the
/// family span and each member's tangent-space trace on it.
#[derive(Debug, Clone)]
pub struct BigPi0Conic {
    pub elements: Vec<u32>,
    pub span: Subspace,
    /// τ_e ∩ span per member, in `elements` order; each of dimension 2n−1.
    pub tangent_spaces: Vec<Subspace>,
}

pub fn big_pi0_conic(egg: &Egg, i: usize, j: usize) -> Result<BigPi0Conic, ConicsError> {
    let f = egg.field.as_ref();
    let n = egg.n as usize;
    let fam = segre_family(egg, i, j)?;
    let mut tangent_spaces = Vec::with_capacity(fam.v_elements.len());
    for &e in &fam.v_elements {
        let t = projgeom::meet(f, egg.tangent_space(e as usize), &fam.span);
        if t.rank() != 2 * n {
            return Err(ConicsError::BadDimension {
                role: "member tangent trace",
                want: 2 * n - 1,
                got: t.rank().wrapping_sub(1),
            });
        }
        tangent_spaces.push(t);
    }
    Ok(BigPi0Conic { elements: fam.v_elements, span: fam.span, tangent_spaces })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn the_small_ovoid_family_is_a_single_conic_covering_four_points() {
        let egg = &*O123;
        let fam = segre_family(egg, 1, 2).unwrap();
        assert_eq!(fam.conics.len(), 1);
        assert_eq!(fam.v_elements.len(), 4);
        assert_eq!(fam.pairs_checked, 0);
        assert!(fam.v_elements.contains(&0));
        assert_eq!(fam.span.rank(), 3);
    }

    #[test]
    fn the_pseudo_family_has_four_conics_related_by_plane_projectivities() {
        let egg = &*O243;
        let fam = segre_family(egg, 1, 2).unwrap();
        assert_eq!(fam.conics.len(), 4);
        assert_eq!(fam.pairs_checked, 6);
        // Four contacts plus three η traces per related pair.
        assert_eq!(fam.correspondences_checked, 6 * 7);
        assert_eq!(fam.v_elements.len(), 4);
        assert_eq!(fam.span.rank(), 6);
        assert_eq!(fam.eta0.rank(), 2);
    }

    #[test]
    fn odd_characteristic_eta_spans_share_a_common_space() {
        for egg in [&*O123, &*O125] {
            let cfg = eta_configuration(egg, 1, 2).unwrap();
            assert!(!cfg.even);
            let t = cfg.triple_meet.unwrap();
            assert_eq!(t.rank(), egg.n as usize);
        }
        let cfg = eta_configuration(&O243, 1, 2).unwrap();
        assert_eq!(cfg.triple_meet.unwrap().rank(), 2);
    }

    #[test]
    fn even_characteristic_eta_traces_coincide_and_hold_the_nuclei() {
        let egg = &*O124;
        let cfg = eta_configuration(egg, 1, 2).unwrap();
        assert!(cfg.even);
        let common = cfg.common.unwrap();
        assert_eq!(common.rank(), 1);
        assert_eq!(cfg.nuclei.len(), 1);
        assert!(common.contains_point(&egg.field, &cfg.nuclei[0]));
    }

    #[test]
    fn the_big_conic_lists_the_elements_inside_the_span_of_a_good_triple() {
        let egg = &*O123;
        let f = egg.field.as_ref();
        let big = big_pi0_conic(egg, 1, 2).unwrap();
        assert_eq!(big.elements.len(), 4);
        let direct: Vec<u32> = (0..egg.elements.len() as u32)
            .filter(|&e| big.span.contains(f, &egg.elements[e as usize]))
            .collect();
        assert_eq!(big.elements, direct);
        for t in &big.tangent_spaces {
            assert_eq!(t.rank(), 2);
        }
    }

    #[test]
    fn the_pseudo_big_conic_is_a_proper_subset_of_the_span_members() {
        let egg = &*O243;
        let f = egg.field.as_ref();
        let big = big_pi0_conic(egg, 1, 2).unwrap();
        assert_eq!(big.elements.len(), 4);
        let members: Vec<u32> = (0..egg.elements.len() as u32)
            .filter(|&e| big.span.contains(f, &egg.elements[e as usize]))
            .collect();
        assert_eq!(members.len(), 10);
        assert!(big.elements.iter().all(|e| members.contains(e)));
    }
}
