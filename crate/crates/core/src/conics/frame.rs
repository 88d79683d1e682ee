//! The δ-frame of element 0: a complement Φ of π₀ and the projection
//! δ : x ↦ ⟨π₀, x⟩ ∩ Φ of everything off π₀ into it.
//!
//! The tangent space projects to the (2n−1)-space τ*₀ = τ₀ ∩ Φ, and every
//! other element πⱼ to the (n−1)-space π*ⱼ = ⟨π₀, πⱼ⟩ ∩ Φ. Together with
//! τ*₀ the q²ⁿ stars partition the points of Φ. The 2n-spaces of Φ
//! containing τ*₀ — the ξᵢ — slice the stars into affine pictures
//! AG(2n, q) (one point ξᵢ ∩ π*ⱼ per element), where conics turn into
//! affine lines, Π₀-sets into affine n-flats, and big-conic tangent
//! spaces into directions at infinity:
//!
//! * any three stars π*ᵢ, π*ⱼ and their trace π*ᵢⱼ on τ*₀ span a regulus
//!   whose remaining members are q more stars ([`regulus_census`]);
//! * two points of Zᵢ = {πⱼ ∩ ξ̄ᵢ} lie on one conic, whose projection is a
//!   full affine line of ξᵢ ([`z_projection_census`]);
//! * the correspondence ξᵢ ∩ π*ⱼ ↦ ξ_k ∩ π*ⱼ between two slices is a
//!   linear projectivity fixing τ*₀ ([`alpha_linearity`]);
//! * all conic lines of one direction come from big conics sharing their
//!   tangent space at π₀ ([`parallel_class_tangents`]);
//! * a Π₀-set slices to an affine n-flat whose lines through the
//!   projected γ₀ are exactly the conics with tangent inside γ₀
//!   ([`xi_star_flat`]).

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use super::{pi0_conic_through, ConicsError, Pi0Set};
use crate::egg::Egg;
use crate::gf::FiniteField;
use crate::linalg::{self, Mat};
use crate::projgeom::{self, Subspace};

/// The δ-frame of element 0.
#[derive(Debug, Clone)]
pub struct DeltaFrame {
    /// A (3n−1)-dimensional complement of π₀.
    pub phi: Subspace,
    /// τ₀ ∩ Φ.
    pub tau_star0: Subspace,
    /// π*ⱼ = ⟨π₀, πⱼ⟩ ∩ Φ, indexed by j−1 for j = 1, …, q²ⁿ.
    pub pi_star: Vec<Subspace>,
    /// The (qⁿ−1)/(q−1) spaces of Φ of dimension 2n containing τ*₀.
    pub xis: Vec<Subspace>,
    /// ξ̄ᵢ = ⟨π₀, ξᵢ⟩.
    pub xi_bars: Vec<Subspace>,
    /// Affine Φ-point → index j of the star π*ⱼ holding it.
    point_element: HashMap<Vec<u32>, u32>,
}

impl DeltaFrame {
    pub fn pi_star_of(&self, j: usize) -> &Subspace {
        &self.pi_star[j - 1]
    }

    /// The element whose star holds a point of Φ ∖ τ*₀.
    pub fn element_of_projected(&self, p: &[u32]) -> Option<u32> {
        self.point_element.get(p).copied()
    }

    /// π*ᵢⱼ = ⟨π*ᵢ, π*ⱼ⟩ ∩ τ*₀.
    pub fn pair_trace(&self, f: &FiniteField, i: usize, j: usize) -> Subspace {
        projgeom::meet(
            f,
            &projgeom::span(f, &[self.pi_star_of(i), self.pi_star_of(j)]),
            &self.tau_star0,
        )
    }
}

/// Builds the δ-frame over the given complement, or over the canonical
/// coordinate complement of π₀ when none is supplied.
pub fn delta_frame(egg: &Egg, phi: Option<Subspace>) -> Result<DeltaFrame, ConicsError> {
    if egg.m != 2 * egg.n {
        return Err(ConicsError::BadInstance("the δ-frame needs an egg with m = 2n"));
    }
    let f = egg.field.as_ref();
    let n = egg.n as usize;
    let vdim = egg.vdim();
    egg.tangents()?;
    let pi0 = &egg.elements[0];
    let phi = match phi {
        Some(phi) => phi,
        None => {
            let rows: Vec<Vec<u32>> = (0..vdim)
                .filter(|c| !pi0.pivots.contains(c))
                .map(|c| {
                    let mut v = vec![0u32; vdim];
                    v[c] = 1;
                    v
                })
                .collect();
            Subspace::from_rows(f, vdim, &rows)
        }
    };
    if phi.rank() != 3 * n {
        return Err(ConicsError::PhiNotComplementary("wrong dimension"));
    }
    if projgeom::meet(f, &phi, pi0).rank() != 0 {
        return Err(ConicsError::PhiNotComplementary("meets element 0"));
    }

    let tau_star0 = projgeom::meet(f, egg.tangent_space(0), &phi);
    if tau_star0.rank() != 2 * n {
        return Err(ConicsError::BadDimension {
            role: "projected tangent space τ*₀",
            want: 2 * n - 1,
            got: tau_star0.rank().wrapping_sub(1),
        });
    }

    let mut pi_star = Vec::with_capacity(egg.elements.len() - 1);
    let mut point_element: HashMap<Vec<u32>, u32> = HashMap::new();
    for j in 1..egg.elements.len() {
        let star = projgeom::meet(f, &projgeom::span(f, &[pi0, &egg.elements[j]]), &phi);
        if star.rank() != n {
            return Err(ConicsError::BadDimension {
                role: "projected element star",
                want: n - 1,
                got: star.rank().wrapping_sub(1),
            });
        }
        for p in star.points(f) {
            if point_element.insert(p, j as u32).is_some() {
                return Err(ConicsError::PipelineFinding(format!(
                    "element stars {j} and an earlier one overlap in Φ"
                )));
            }
        }
        pi_star.push(star);
    }
    // Together with τ*₀ the stars partition Φ.
    for p in tau_star0.points(f) {
        if point_element.contains_key(&p) {
            return Err(ConicsError::PipelineFinding("an element star cuts into τ*₀".into()));
        }
    }
    if point_element.len() as u64 + tau_star0.point_count(f) != phi.point_count(f) {
        return Err(ConicsError::PipelineFinding("element stars do not fill Φ".into()));
    }

    // The 2n-spaces over τ*₀, one per point of a complement of τ*₀ in Φ.
    let internal: Vec<Vec<u32>> = tau_star0
        .m
        .rows_iter()
        .map(|r| phi.coords_of(f, r).expect("τ*₀ lies in Φ"))
        .collect();
    let internal_sub = Subspace::from_rows(f, 3 * n, &internal);
    let complement_rows: Vec<Vec<u32>> = (0..3 * n)
        .filter(|c| !internal_sub.pivots.contains(c))
        .map(|c| {
            let mut v = vec![0u32; 3 * n];
            v[c] = 1;
            phi.point_at(f, &v)
        })
        .collect();
    let mut xis = Vec::new();
    let mut xi_bars = Vec::new();
    let k_sub = Subspace::from_rows(f, vdim, &complement_rows);
    debug_assert_eq!(k_sub.rank(), n);
    for kp in k_sub.points(f) {
        let xi = projgeom::span_with_points(f, &tau_star0, &[&kp]);
        if xi.rank() != 2 * n + 1 {
            return Err(ConicsError::BadDimension {
                role: "slice ξ",
                want: 2 * n,
                got: xi.rank().wrapping_sub(1),
            });
        }
        xi_bars.push(projgeom::span(f, &[pi0, &xi]));
        xis.push(xi);
    }
    Ok(DeltaFrame { phi, tau_star0, pi_star, xis, xi_bars, point_element })
}

/// Exhaustive regulus check over the star pairs: the regulus through
/// π*ᵢ, π*ⱼ and their trace on τ*₀ consists of that trace and exactly q
/// stars.
#[derive(Debug, Clone)]
pub struct RegulusCensus {
    pub pairs: u64,
    pub members_per_regulus: u64,
}

pub fn regulus_census(egg: &Egg, frame: &DeltaFrame) -> Result<RegulusCensus, ConicsError> {
    let f = egg.field.as_ref();
    let n = egg.n as usize;
    let star_index: HashMap<Subspace, u32> = frame
        .pi_star
        .iter()
        .enumerate()
        .map(|(idx, s)| (s.clone(), idx as u32 + 1))
        .collect();
    let count = frame.pi_star.len();
    let pairs: Vec<(usize, usize)> = (1..=count)
        .flat_map(|i| (i + 1..=count).map(move |j| (i, j)))
        .collect();
    let directions = projgeom::all_points(f, 2);
    pairs
        .par_iter()
        .try_for_each(|&(i, j)| -> Result<(), ConicsError> {
            let a = frame.pi_star_of(i);
            let b = frame.pi_star_of(j);
            let trace = frame.pair_trace(f, i, j);
            if trace.rank() != n {
                return Err(ConicsError::BadDimension {
                    role: "star pair trace on τ*₀",
                    want: n - 1,
                    got: trace.rank().wrapping_sub(1),
                });
            }
            // Split each trace row over ⟨a⟩ ⊕ ⟨b⟩; the regulus members are
            // the graphs of the scaled splittings.
            let mut basis = Mat::zero(0, egg.vdim());
            for r in a.m.rows_iter().chain(b.m.rows_iter()) {
                basis.push_row(r);
            }
            let mut split = Vec::with_capacity(n);
            for r in trace.m.rows_iter() {
                let coeffs = linalg::express_in_rows(f, &basis, r).ok_or_else(|| {
                    ConicsError::PipelineFinding(format!(
                        "trace of stars {i},{j} escapes their span"
                    ))
                })?;
                split.push((
                    linalg::row_mul(f, &coeffs[..n], &a.m),
                    linalg::row_mul(f, &coeffs[n..], &b.m),
                ));
            }
            let mut star_members = 0u64;
            let mut trace_members = 0u64;
            for dir in &directions {
                let rows: Vec<Vec<u32>> = split
                    .iter()
                    .map(|(ra, rb)| {
                        (0..egg.vdim())
                            .map(|c| f.add(f.mul(dir[0], ra[c]), f.mul(dir[1], rb[c])))
                            .collect()
                    })
                    .collect();
                let member = Subspace::from_rows(f, egg.vdim(), &rows);
                if member.rank() != n {
                    return Err(ConicsError::PipelineFinding(format!(
                        "a regulus member of stars {i},{j} degenerates"
                    )));
                }
                if member == trace {
                    trace_members += 1;
                } else if star_index.contains_key(&member) {
                    star_members += 1;
                } else {
                    return Err(ConicsError::PipelineFinding(format!(
                        "a regulus member of stars {i},{j} is neither a star nor the trace"
                    )));
                }
            }
            if star_members != f.q() as u64 || trace_members != 1 {
                return Err(ConicsError::PipelineFinding(format!(
                    "regulus of stars {i},{j} holds {star_members} stars and {trace_members} traces"
                )));
            }
            Ok(())
        })?;
    Ok(RegulusCensus { pairs: pairs.len() as u64, members_per_regulus: f.q() as u64 + 1 })
}

/// Z-points of a slice: one trace πⱼ ∩ ξ̄ᵢ per element, indexed by j.
fn z_points(egg: &Egg, frame: &DeltaFrame, xi: usize) -> Result<Vec<(u32, Vec<u32>)>, ConicsError> {
    let f = egg.field.as_ref();
    let mut out = Vec::with_capacity(egg.elements.len() - 1);
    for j in 1..egg.elements.len() {
        let t = projgeom::meet(f, &egg.elements[j], &frame.xi_bars[xi]);
        if t.rank() != 1 {
            return Err(ConicsError::BadDimension {
                role: "element trace on ξ̄",
                want: 0,
                got: t.rank().wrapping_sub(1),
            });
        }
        out.push((j as u32, projgeom::normalize_point(f, t.m.row(0))?));
    }
    Ok(out)
}

/// Conic-to-line projection check on a slice: two Z-points lie on one
/// conic, its plane stays inside ξ̄ᵢ, and its projection into Φ is a full
/// affine line of ξᵢ.
#[derive(Debug, Clone)]
pub struct ZLineCensus {
    pub xi: usize,
    pub z_count: u64,
    pub pairs_checked: u64,
}

pub fn z_projection_census(
    egg: &Egg,
    frame: &DeltaFrame,
    xi: usize,
    max_pairs: Option<u64>,
) -> Result<ZLineCensus, ConicsError> {
    let f = egg.field.as_ref();
    let zs = z_points(egg, frame, xi)?;
    let by_element: HashMap<u32, &Vec<u32>> = zs.iter().map(|(j, p)| (*j, p)).collect();
    let pi0 = &egg.elements[0];
    let mut pairs_checked = 0u64;
    let budget = max_pairs.unwrap_or(u64::MAX);
    'outer: for a in 0..zs.len() {
        for b in a + 1..zs.len() {
            if pairs_checked >= budget {
                break 'outer;
            }
            let (ja, pa) = &zs[a];
            let (jb, _) = &zs[b];
            let pc = pi0_conic_through(egg, 0, *jb as usize, *ja as usize, pa)?;
            if !frame.xi_bars[xi].contains(f, &pc.conic.plane) {
                return Err(ConicsError::PipelineFinding(format!(
                    "the conic of Z-points {ja},{jb} leaves its slice"
                )));
            }
            let mut images = Vec::new();
            for (p, &e) in pc.points.iter().zip(&pc.elements) {
                if e == 0 {
                    continue;
                }
                if by_element.get(&e) != Some(&p) {
                    return Err(ConicsError::PipelineFinding(format!(
                        "a contact of the conic of Z-points {ja},{jb} is not the Z-point of element {e}"
                    )));
                }
                let img = projgeom::project_point_through(f, pi0, &frame.phi, p);
                if img.rank() != 1 {
                    return Err(ConicsError::BadDimension {
                        role: "projected conic point",
                        want: 0,
                        got: img.rank().wrapping_sub(1),
                    });
                }
                images.push(projgeom::normalize_point(f, img.m.row(0))?);
            }
            let line = projgeom::line_through(f, &images[0], &images[1]);
            if !frame.xis[xi].contains(f, &line)
                || !images.iter().all(|p| line.contains_point(f, p))
            {
                return Err(ConicsError::PipelineFinding(format!(
                    "projection of the conic of Z-points {ja},{jb} is not a line of the slice"
                )));
            }
            let at_infinity = projgeom::meet(f, &line, &frame.tau_star0);
            if at_infinity.rank() != 1 {
                return Err(ConicsError::PipelineFinding(
                    "a projected conic line misses τ*₀".into(),
                ));
            }
            let inf = projgeom::normalize_point(f, at_infinity.m.row(0))?;
            if images.contains(&inf) {
                return Err(ConicsError::PipelineFinding(
                    "a projected conic point falls onto τ*₀".into(),
                ));
            }
            pairs_checked += 1;
        }
    }
    Ok(ZLineCensus { xi, z_count: zs.len() as u64, pairs_checked })
}

/// The slice-to-slice correspondence ξᵢ ∩ π*ⱼ ↦ ξ_k ∩ π*ⱼ fitted as a
/// projectivity and verified on every star.
#[derive(Debug, Clone)]
pub struct AlphaReport {
    pub from: usize,
    pub to: usize,
    /// The fitted map on internal slice coordinates.
    pub matrix: Mat,
    /// Star correspondences reproduced by the map.
    pub verified: u64,
    /// True when the plain linear fit already reproduces everything.
    pub linear: bool,
    /// Field automorphism exponent needed when the linear fit fails.
    pub automorphism: Option<u32>,
    /// The map fixes τ*₀ as a set.
    pub infinity_ok: bool,
}

fn slice_trace(
    f: &FiniteField,
    slice: &Subspace,
    star: &Subspace,
) -> Result<Vec<u32>, ConicsError> {
    let t = projgeom::meet(f, slice, star);
    if t.rank() != 1 {
        return Err(ConicsError::BadDimension {
            role: "star trace on a slice",
            want: 0,
            got: t.rank().wrapping_sub(1),
        });
    }
    let p = projgeom::normalize_point(f, t.m.row(0))?;
    slice
        .coords_of(f, &p)
        .ok_or(ConicsError::DegeneratePlane("slice trace escapes the slice"))
}

pub fn alpha_linearity(
    egg: &Egg,
    frame: &DeltaFrame,
    from: usize,
    to: usize,
) -> Result<AlphaReport, ConicsError> {
    if from == to || from >= frame.xis.len() || to >= frame.xis.len() {
        return Err(ConicsError::BadInstance("the correspondence needs two distinct slices"));
    }
    let f = egg.field.as_ref();
    let dim = 2 * egg.n as usize + 1;
    let src_slice = &frame.xis[from];
    let dst_slice = &frame.xis[to];
    let mut src = Vec::with_capacity(frame.pi_star.len());
    let mut dst = Vec::with_capacity(frame.pi_star.len());
    for j in 1..=frame.pi_star.len() {
        src.push(slice_trace(f, src_slice, frame.pi_star_of(j))?);
        dst.push(slice_trace(f, dst_slice, frame.pi_star_of(j))?);
    }

    // Frame selection: a maximal independent prefix plus one more point
    // making a valid projectivity frame on both sides.
    let mut basis_idx = Vec::new();
    let mut basis = Mat::zero(0, dim);
    for (idx, p) in src.iter().enumerate() {
        let mut trial = basis.clone();
        trial.push_row(p);
        if linalg::rank(f, &trial) > basis.rows {
            basis = trial;
            basis_idx.push(idx);
            if basis.rows == dim {
                break;
            }
        }
    }
    if basis.rows != dim {
        return Err(ConicsError::NoFrame);
    }
    let mut theta = None;
    for (idx, _) in src.iter().enumerate() {
        if basis_idx.contains(&idx) {
            continue;
        }
        let mut frame_src: Vec<Vec<u32>> = basis_idx.iter().map(|&i| src[i].clone()).collect();
        let mut frame_dst: Vec<Vec<u32>> = basis_idx.iter().map(|&i| dst[i].clone()).collect();
        frame_src.push(src[idx].clone());
        frame_dst.push(dst[idx].clone());
        if let Ok(m) = projgeom::fit_projectivity(f, &frame_src, &frame_dst) {
            theta = Some(m);
            break;
        }
    }
    let theta = theta.ok_or(ConicsError::NoFrame)?;

    let check = |twist: u32| -> u64 {
        let mut good = 0u64;
        for (x, y) in src.iter().zip(&dst) {
            let mut xt = x.clone();
            for _ in 0..twist {
                for c in xt.iter_mut() {
                    *c = f.frobenius(*c);
                }
            }
            let image = linalg::row_mul(f, &xt, &theta);
            match (projgeom::normalize_point(f, &image), projgeom::normalize_point(f, y)) {
                (Ok(a), Ok(b)) if a == b => good += 1,
                _ => {}
            }
        }
        good
    };
    let total = src.len() as u64;
    let plain = check(0);
    let (linear, automorphism, verified) = if plain == total {
        (true, None, plain)
    } else {
        let mut twisted = None;
        for t in 1..f.e() {
            if check(t) == total {
                twisted = Some(t);
                break;
            }
        }
        match twisted {
            Some(t) => (false, Some(t), total),
            None => {
                return Err(ConicsError::PipelineFinding(format!(
                    "slice correspondence {from}→{to} reproduces only {plain} of {total} stars"
                )))
            }
        }
    };

    // The map must fix τ*₀ as a set.
    let inf_rows: Vec<Vec<u32>> = frame
        .tau_star0
        .m
        .rows_iter()
        .map(|r| src_slice.coords_of(f, r).expect("τ*₀ lies in every slice"))
        .map(|x| linalg::row_mul(f, &x, &theta))
        .collect();
    let image = Subspace::from_rows(f, dim, &inf_rows);
    let inf_dst: Vec<Vec<u32>> = frame
        .tau_star0
        .m
        .rows_iter()
        .map(|r| dst_slice.coords_of(f, r).expect("τ*₀ lies in every slice"))
        .collect();
    let infinity_ok = image == Subspace::from_rows(f, dim, &inf_dst);

    Ok(AlphaReport { from, to, matrix: theta, verified, linear, automorphism, infinity_ok })
}

/// Parallel-class tangents on a slice: the conic lines of one direction
/// all come from big conics sharing a tangent space at π₀ containing that
/// direction.
#[derive(Debug, Clone)]
pub struct ParallelClassReport {
    pub xi: usize,
    /// Direction point of τ*₀ → common tangent space of its class.
    pub classes: Vec<(Vec<u32>, Subspace)>,
    pub lines_checked: u64,
}

pub fn parallel_class_tangents(
    egg: &Egg,
    frame: &DeltaFrame,
    xi: usize,
) -> Result<ParallelClassReport, ConicsError> {
    let f = egg.field.as_ref();
    let n = egg.n as usize;
    let q = f.q() as u64;
    let slice = &frame.xis[xi];
    let affine: Vec<Vec<u32>> = slice
        .points(f)
        .into_iter()
        .filter(|p| !frame.tau_star0.contains_point(f, p))
        .collect();
    let mut classes = Vec::new();
    let mut lines_checked = 0u64;
    for d in frame.tau_star0.points(f) {
        let mut lines: BTreeMap<Subspace, Vec<u32>> = BTreeMap::new();
        for a in &affine {
            let line = projgeom::line_through(f, &d, a);
            let e = frame
                .element_of_projected(a)
                .ok_or(ConicsError::PipelineFinding("an affine slice point has no star".into()))?;
            lines.entry(line).or_default().push(e);
        }
        let mut common: Option<Subspace> = None;
        for (_, elems) in lines {
            if elems.len() as u64 != q {
                return Err(ConicsError::PipelineFinding(format!(
                    "a line of direction {d:?} holds {} stars instead of {q}",
                    elems.len()
                )));
            }
            let span = projgeom::span(
                f,
                &[
                    &egg.elements[0],
                    &egg.elements[elems[0] as usize],
                    &egg.elements[elems[1] as usize],
                ],
            );
            for &e in &elems[2..] {
                if !span.contains(f, &egg.elements[e as usize]) {
                    return Err(ConicsError::PipelineFinding(format!(
                        "the elements over a line of direction {d:?} span more than a big conic"
                    )));
                }
            }
            let eta = projgeom::meet(f, &span, egg.tangent_space(0));
            if eta.rank() != 2 * n {
                return Err(ConicsError::BadDimension {
                    role: "big-conic tangent space at π₀",
                    want: 2 * n - 1,
                    got: eta.rank().wrapping_sub(1),
                });
            }
            if !eta.contains_point(f, &d) {
                return Err(ConicsError::PipelineFinding(format!(
                    "the common tangent space of direction {d:?} misses its own direction"
                )));
            }
            match &common {
                None => common = Some(eta),
                Some(c) if *c == eta => {}
                Some(_) => {
                    return Err(ConicsError::PipelineFinding(format!(
                        "two parallel lines of direction {d:?} disagree on the tangent space"
                    )))
                }
            }
            lines_checked += 1;
        }
        classes.push((d, common.expect("every direction carries lines")));
    }
    Ok(ParallelClassReport { xi, classes, lines_checked })
}

/// The affine picture of a Π₀-set on a slice.
#[derive(Debug, Clone)]
pub struct XiStarReport {
    pub xi: usize,
    /// One slice trace per member other than 0, parallel to
    /// `set.elements[1..]`.
    pub points: Vec<Vec<u32>>,
    /// Projective closure of the picture, an n-space.
    pub flat: Subspace,
    /// flat ∩ τ*₀, the hyperplane at infinity of the picture.
    pub infinity: Subspace,
    /// Projection of γ₀, a point of that hyperplane.
    pub x_star0: Vec<u32>,
    /// The (2n−1)-space through π₀ holding every conic tangent.
    pub beta: Subspace,
    pub lines_checked: u64,
    pub tangents_inside_gamma0: u64,
    pub tangents_outside_gamma0: u64,
}

pub fn xi_star_flat(
    egg: &Egg,
    frame: &DeltaFrame,
    set: &Pi0Set,
    xi: usize,
) -> Result<XiStarReport, ConicsError> {
    let f = egg.field.as_ref();
    let n = egg.n as usize;
    let slice = &frame.xis[xi];
    let mut points = Vec::new();
    let mut element_at: HashMap<Vec<u32>, u32> = HashMap::new();
    for &e in &set.elements[1..] {
        let t = projgeom::meet(f, slice, frame.pi_star_of(e as usize));
        if t.rank() != 1 {
            return Err(ConicsError::BadDimension {
                role: "member trace on the slice",
                want: 0,
                got: t.rank().wrapping_sub(1),
            });
        }
        let p = projgeom::normalize_point(f, t.m.row(0))?;
        element_at.insert(p.clone(), e);
        points.push(p);
    }

    let flat = Subspace::from_rows(f, egg.vdim(), &points);
    if flat.rank() != n + 1 {
        return Err(ConicsError::NotAffineSubspace("the traces span the wrong dimension"));
    }
    let infinity = projgeom::meet(f, &flat, &frame.tau_star0);
    if infinity.rank() != n {
        return Err(ConicsError::NotAffineSubspace("no hyperplane at infinity"));
    }
    let affine_of_flat: Vec<Vec<u32>> = flat
        .points(f)
        .into_iter()
        .filter(|p| !infinity.contains_point(f, p))
        .collect();
    if affine_of_flat.len() != points.len()
        || !affine_of_flat.iter().all(|p| element_at.contains_key(p))
    {
        return Err(ConicsError::NotAffineSubspace("affine points and member traces differ"));
    }

    let x0 = projgeom::meet(f, &set.gammas[0], &frame.phi);
    if x0.rank() != 1 {
        return Err(ConicsError::BadDimension {
            role: "projected γ₀",
            want: 0,
            got: x0.rank().wrapping_sub(1),
        });
    }
    let x_star0 = projgeom::normalize_point(f, x0.m.row(0))?;
    if !infinity.contains_point(f, &x_star0) {
        return Err(ConicsError::PipelineFinding(
            "the projected γ₀ misses the picture's hyperplane at infinity".into(),
        ));
    }

    let zs = z_points(egg, frame, xi)?;
    let z_of: HashMap<u32, Vec<u32>> = zs.into_iter().collect();
    let gamma0 = &set.gammas[0];
    let mut tangent_rows: Vec<Vec<u32>> = egg.elements[0].m.rows_iter().map(|r| r.to_vec()).collect();
    let mut lines_checked = 0u64;
    let mut inside = 0u64;
    let mut outside = 0u64;
    for d in infinity.points(f) {
        let mut lines: BTreeMap<Subspace, Vec<u32>> = BTreeMap::new();
        for p in &points {
            lines
                .entry(projgeom::line_through(f, &d, p))
                .or_default()
                .push(element_at[p]);
        }
        for (_, members) in lines {
            debug_assert_eq!(members.len() as u64, f.q() as u64);
            let (k1, k2) = (members[0] as usize, members[1] as usize);
            let pc = pi0_conic_through(egg, 0, k2, k1, &z_of[&members[0]])?;
            let mut expected: Vec<u32> = members.clone();
            expected.push(0);
            expected.sort_unstable();
            let mut got = pc.elements.clone();
            got.sort_unstable();
            if got != expected {
                return Err(ConicsError::PipelineFinding(
                    "a picture line and its conic disagree on the touched elements".into(),
                ));
            }
            if !frame.xi_bars[xi].contains(f, &pc.conic.plane) {
                return Err(ConicsError::PipelineFinding(
                    "a picture-line conic leaves its slice".into(),
                ));
            }
            let contact = pc.contact_on(0).expect("the conic meets element 0");
            let tangent = &pc.tangent_lines[contact];
            for r in tangent.m.rows_iter() {
                tangent_rows.push(r.to_vec());
            }
            let in_gamma = gamma0.contains(f, tangent);
            if in_gamma != (d == x_star0) {
                return Err(ConicsError::PipelineFinding(
                    "tangent-in-γ₀ disagrees with passing through the projected γ₀".into(),
                ));
            }
            if in_gamma {
                inside += 1;
            } else {
                outside += 1;
            }
            lines_checked += 1;
        }
    }
    let beta = Subspace::from_rows(f, egg.vdim(), &tangent_rows);
    if beta.rank() != 2 * n {
        return Err(ConicsError::BadDimension {
            role: "span of π₀ and the conic tangents",
            want: 2 * n - 1,
            got: beta.rank().wrapping_sub(1),
        });
    }
    Ok(XiStarReport {
        xi,
        points,
        flat,
        infinity,
        x_star0,
        beta,
        lines_checked,
        tangents_inside_gamma0: inside,
        tangents_outside_gamma0: outside,
    })
}
