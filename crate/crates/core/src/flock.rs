//! Flocks of a quadratic cone in PG(3, q) and the coset quadrangles they
//! induce.
//!
//! The cone has vertex (0,0,0,1) and base conic x₀x₂ = x₁² in the plane
//! x₃ = 0. A flock is a set of q planes, none through the vertex, whose
//! sections partition the cone minus the vertex. Every plane avoiding the
//! vertex is normalized to coefficients [a, b, c, 1], so a flock is a table
//! t ↦ (a_t, b_t, c_t) over GF(q).
//!
//! [`flock_validate`] is the arbiter: it checks the partition point by point
//! and re-derives each section as the point set of a unique nonsingular
//! conic. [`linear_test`] and [`semifield_test`] classify a validated flock,
//! and [`qclan_gq`] builds the generalized quadrangle of order (q², q)
//! attached to it (odd q): a group of order q⁵ together with a four-gonal
//! family of subgroups, turned into a point-line geometry by right cosets.
//! The construction is verified on the spot — the four-gonal conditions are
//! checked exhaustively, the geometry goes through [`gq_check`], and the
//! right-translation action is certified line by line as a group of elations
//! about the base point acting regularly on the opposite points.

use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::bitset::BitVec;
use crate::conic::{conics_through, ConicError};
use crate::gf::FiniteField;
use crate::gq::{gq_check, Collineation, GQOrder, GqError, GqMode, IncidenceStructure};
use crate::projgeom::{self, Subspace};

#[derive(Debug, Error)]
pub enum FlockError {
    #[error("a flock of the quadratic cone in PG(3,{q}) needs exactly {q} planes, got {got}")]
    WrongPlaneCount { q: u32, got: usize },
    #[error("plane {0} is malformed: need 4 coefficients, not all zero")]
    BadPlane(usize),
    #[error("plane {0} passes through the cone vertex")]
    VertexOnPlane(usize),
    #[error("planes {t} and {u} both contain the cone point {point:?}")]
    Overlap { t: usize, u: usize, point: Vec<u32> },
    #[error("no plane contains the cone point {0:?}")]
    Gap(Vec<u32>),
    #[error("the section of plane {0} is not the point set of a unique nonsingular conic")]
    ReducibleSection(usize),
    #[error("plane leading coefficients do not exhaust the field; cannot re-index for the additivity test")]
    NormalizationFail,
    #[error("this construction needs odd field order, got q = {0}")]
    EvenOrder(u32),
    #[error("the defining subgroups do not form a four-gonal family: {0}")]
    FourGonalFail(String),
    #[error("right translation by group element {0} is not an elation of the coset geometry")]
    ElationFail(u32),
    #[error("coset geometry of order ({s},{t}) expected, found {got:?}")]
    WrongOrder { s: u64, t: u64, got: GQOrder },
    #[error(transparent)]
    Gq(#[from] GqError),
    #[error("conic screening of a section failed: {0}")]
    Conic(#[from] ConicError),
}

// ---------------------------------------------------------------------------
// The cone
// ---------------------------------------------------------------------------

/// The quadratic cone of PG(3, q): all points with x₀x₂ = x₁².
#[derive(Debug, Clone)]
pub struct QuadraticCone {
    pub vertex: Vec<u32>,
    /// All cone points (vertex included), normalized, in enumeration order.
    pub points: Vec<Vec<u32>>,
    /// The q+1 points of the base conic in the plane x₃ = 0.
    pub base: Vec<Vec<u32>>,
    /// The q+1 generator lines, one through each base point and the vertex.
    pub generators: Vec<Subspace>,
}

pub fn quadratic_cone(f: &FiniteField) -> QuadraticCone {
    let vertex = vec![0, 0, 0, 1];
    let points: Vec<Vec<u32>> = projgeom::all_points(f, 4)
        .into_iter()
        .filter(|p| f.sub(f.mul(p[0], p[2]), f.mul(p[1], p[1])) == 0)
        .collect();
    let base: Vec<Vec<u32>> = points.iter().filter(|p| p[3] == 0).cloned().collect();
    let generators = base.iter().map(|b| projgeom::line_through(f, b, &vertex)).collect();
    QuadraticCone { vertex, points, base, generators }
}

// ---------------------------------------------------------------------------
// Flocks
// ---------------------------------------------------------------------------

/// A validated flock: q vertex-free planes whose sections partition the cone.
#[derive(Debug, Clone)]
pub struct Flock {
    pub field: Arc<FiniteField>,
    /// Plane coefficients [a, b, c, 1], in input order.
    pub planes: Vec<[u32; 4]>,
    /// Section point sets, parallel to `planes`; each has q+1 points.
    pub sections: Vec<Vec<Vec<u32>>>,
}

fn plane_eval(f: &FiniteField, pl: &[u32; 4], p: &[u32]) -> u32 {
    let mut acc = f.mul(pl[0], p[0]);
    acc = f.add(acc, f.mul(pl[1], p[1]));
    acc = f.add(acc, f.mul(pl[2], p[2]));
    f.add(acc, f.mul(pl[3], p[3]))
}

fn plane_carrier(f: &FiniteField, pl: &[u32; 4]) -> Subspace {
    projgeom::annihilator(f, &Subspace::from_rows(f, 4, &[pl.to_vec()]))
}

/// Checks that `planes` is a flock of the quadratic cone and returns it with
/// its sections. Planes are normalized so the x₃ coefficient is 1; a plane
/// admitting no such normalization passes through the vertex and is
/// rejected. The partition is checked point by point, and every section is
/// re-derived as the exact point set of a unique nonsingular conic.
pub fn flock_validate(f: &Arc<FiniteField>, planes_in: &[Vec<u32>]) -> Result<Flock, FlockError> {
    let q = f.q() as usize;
    if planes_in.len() != q {
        return Err(FlockError::WrongPlaneCount { q: f.q(), got: planes_in.len() });
    }
    let mut planes: Vec<[u32; 4]> = Vec::with_capacity(q);
    for (i, p) in planes_in.iter().enumerate() {
        if p.len() != 4 || p.iter().all(|&x| x == 0) {
            return Err(FlockError::BadPlane(i));
        }
        if p[3] == 0 {
            return Err(FlockError::VertexOnPlane(i));
        }
        let inv = f.inv(p[3]);
        planes.push([f.mul(p[0], inv), f.mul(p[1], inv), f.mul(p[2], inv), 1]);
    }

    let cone = quadratic_cone(f);
    let mut sections: Vec<Vec<Vec<u32>>> = vec![Vec::new(); q];
    for pt in &cone.points {
        if *pt == cone.vertex {
            continue;
        }
        let mut owner: Option<usize> = None;
        for (i, pl) in planes.iter().enumerate() {
            if plane_eval(f, pl, pt) == 0 {
                match owner {
                    None => owner = Some(i),
                    Some(j) => return Err(FlockError::Overlap { t: j, u: i, point: pt.clone() }),
                }
            }
        }
        match owner {
            Some(i) => sections[i].push(pt.clone()),
            None => return Err(FlockError::Gap(pt.clone())),
        }
    }

    for (i, sec) in sections.iter().enumerate() {
        if sec.len() != q + 1 {
            return Err(FlockError::ReducibleSection(i));
        }
        let carrier = plane_carrier(f, &planes[i]);
        let fits = conics_through(f, &carrier, sec)?;
        let mut want = sec.clone();
        want.sort();
        let ok = fits.len() == 1 && {
            let mut got = fits[0].points(f);
            got.sort();
            got == want
        };
        if !ok {
            return Err(FlockError::ReducibleSection(i));
        }
    }

    Ok(Flock { field: f.clone(), planes, sections })
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct LinearReport {
    /// True iff all flock planes share a common line.
    pub linear: bool,
    /// The intersection of all flock planes (the common line when `linear`).
    pub common: Subspace,
}

pub fn linear_test(fl: &Flock) -> LinearReport {
    let f = &fl.field;
    let mut common = Subspace::full(4);
    for pl in &fl.planes {
        common = projgeom::meet(f, &common, &plane_carrier(f, pl));
    }
    LinearReport { linear: common.rank() == 2, common }
}

#[derive(Debug, Clone)]
pub struct SemifieldReport {
    /// True iff, after re-indexing so that a_t = t, the remaining plane
    /// coefficients are additive: b_{t+u} = b_t + b_u and c_{t+u} = c_t + c_u
    /// for all q² pairs.
    pub semifield: bool,
    /// First failing pair (t, u), if any.
    pub witness: Option<(u32, u32)>,
    /// Planes re-indexed by their leading coefficient: table[t] has a_t = t.
    pub table: Vec<[u32; 4]>,
}

pub fn semifield_test(fl: &Flock) -> Result<SemifieldReport, FlockError> {
    let f = &fl.field;
    let q = f.q() as usize;
    let mut slots: Vec<Option<[u32; 4]>> = vec![None; q];
    for pl in &fl.planes {
        if slots[pl[0] as usize].replace(*pl).is_some() {
            return Err(FlockError::NormalizationFail);
        }
    }
    // q planes with pairwise distinct leading coefficients fill every slot.
    let table: Vec<[u32; 4]> = slots.into_iter().map(Option::unwrap).collect();

    for t in 0..q as u32 {
        for u in 0..q as u32 {
            let s = f.add(t, u) as usize;
            let bad = table[s][1] != f.add(table[t as usize][1], table[u as usize][1])
                || table[s][2] != f.add(table[t as usize][2], table[u as usize][2]);
            if bad {
                return Ok(SemifieldReport { semifield: false, witness: Some((t, u)), table });
            }
        }
    }
    Ok(SemifieldReport { semifield: true, witness: None, table })
}

// ---------------------------------------------------------------------------
// Constructions
// ---------------------------------------------------------------------------

/// Least field code that is not a square (odd q).
pub fn first_nonsquare(f: &FiniteField) -> Option<u32> {
    if f.is_even() {
        return None;
    }
    let q = f.q();
    let mut sq = vec![false; q as usize];
    for x in 1..q {
        sq[f.mul(x, x) as usize] = true;
    }
    (1..q).find(|&x| !sq[x as usize])
}

/// The linear flock: planes [t, 0, −mt, 1] with m a fixed nonsquare. All its
/// planes share the line x₃ = 0, x₀ = m·x₂.
pub fn linear_flock(f: &Arc<FiniteField>) -> Result<Vec<Vec<u32>>, FlockError> {
    let m = first_nonsquare(f).ok_or_else(|| FlockError::EvenOrder(f.q()))?;
    Ok((0..f.q()).map(|t| vec![t, 0, f.neg(f.mul(m, t)), 1]).collect())
}

/// The twisted flock with planes [t, 0, −m·t^σ, 1], where σ is the `frob`-th
/// Frobenius power and m a chosen coefficient. With m a nonsquare this is a
/// semifield flock for every odd q; with σ ≠ id it is not linear.
/// Validity is not assumed here — run the planes through [`flock_validate`].
pub fn kantor_knuth(f: &Arc<FiniteField>, frob: u32, m: u32) -> Result<Vec<Vec<u32>>, FlockError> {
    if f.is_even() {
        return Err(FlockError::EvenOrder(f.q()));
    }
    let sigma = |x: u32| (0..frob).fold(x, |y, _| f.frobenius(y));
    Ok((0..f.q()).map(|t| vec![t, 0, f.neg(f.mul(m, sigma(t))), 1]).collect())
}

// ---------------------------------------------------------------------------
// The coset quadrangle of a flock (odd q)
// ---------------------------------------------------------------------------

/// Group elements are 5-digit base-q words [α₀, α₁, c, β₀, β₁] encoding
/// (α, c, β) ∈ GF(q)² × GF(q) × GF(q)², multiplied by
/// (α, c, β)·(α′, c′, β′) = (α + α′, c + c′ + β·α′, β + β′).
#[inline]
fn enc(q: u64, w: [u32; 5]) -> u32 {
    w.iter().fold(0u64, |acc, &d| acc * q + d as u64) as u32
}

#[inline]
fn dec(q: u64, i: u32) -> [u32; 5] {
    let mut i = i as u64;
    let mut w = [0u32; 5];
    for j in (0..5).rev() {
        w[j] = (i % q) as u32;
        i /= q;
    }
    w
}

#[inline]
fn gmul(f: &FiniteField, q: u64, x: u32, y: u32) -> u32 {
    let a = dec(q, x);
    let b = dec(q, y);
    let dot = f.add(f.mul(a[3], b[0]), f.mul(a[4], b[1]));
    enc(
        q,
        [
            f.add(a[0], b[0]),
            f.add(a[1], b[1]),
            f.add(f.add(a[2], b[2]), dot),
            f.add(a[3], b[3]),
            f.add(a[4], b[4]),
        ],
    )
}

/// The generalized quadrangle of order (q², q) built from a flock, together
/// with the evidence gathered while building it.
#[derive(Debug)]
pub struct QClanGQ {
    pub field: Arc<FiniteField>,
    pub structure: IncidenceStructure,
    pub order: GQOrder,
    /// q⁵, the order of the underlying group.
    pub group_order: u64,
    /// Ordered pairs (s, t) checked for A*(s) ∩ A(t) = 1.
    pub family_pairs: u64,
    /// Ordered triples (s, t, u) checked for A(s)A(t) ∩ A(u) = 1.
    pub family_triples: u64,
    /// Point id of the base point (∞).
    pub infinity: u32,
    /// Points not collinear with (∞); always q⁵, and exactly the group points.
    pub opposite_count: u64,
    /// Non-identity right translations certified as elations about (∞).
    pub elations_checked: u64,
    /// True when every non-identity group element was certified.
    pub elations_exhaustive: bool,
}

/// Builds and verifies the coset quadrangle of a validated flock, q odd.
///
/// For each plane [a, b, c, 1] the subgroup A(t) consists of the elements
/// (α, αA_tαᵀ, αK_t) with A_t = [[a, b], [0, c]] and K_t = A_t + A_tᵀ, and
/// A*(t) relaxes the middle coordinate; A(∞) = {(0, 0, β)} and
/// A*(∞) = {(0, c, β)}. Points are the q⁵ group elements, the right cosets
/// of the A*(t), and a symbol (∞); lines are the right cosets of the A(t)
/// and a symbol [A(t)] per member. All four-gonal family conditions are
/// checked exhaustively before the geometry is assembled.
pub fn qclan_gq(fl: &Flock) -> Result<QClanGQ, FlockError> {
    let f = &fl.field;
    if f.is_even() {
        return Err(FlockError::EvenOrder(f.q()));
    }
    let q = f.q() as u64;
    let (q2, q3) = (q * q, q * q * q);
    let q5 = q3 * q2;
    let nt = (q + 1) as usize;
    let two = f.add(1, 1);

    // Family members. Index t < q is the plane of leading code t after the
    // flock's own order; index q is ∞.
    let mut a_elems: Vec<Vec<u32>> = Vec::with_capacity(nt);
    let mut astar_elems: Vec<Vec<u32>> = Vec::with_capacity(nt);
    let mut a_bits: Vec<BitVec> = Vec::with_capacity(nt);
    let mut astar_bits: Vec<BitVec> = Vec::with_capacity(nt);
    for pl in &fl.planes {
        let [pa, pb, pc, _] = *pl;
        let mut elems = Vec::with_capacity(q2 as usize);
        let mut stars = Vec::with_capacity(q3 as usize);
        let mut bits = BitVec::new(q5 as usize);
        let mut sbits = BitVec::new(q5 as usize);
        for x in 0..f.q() {
            for y in 0..f.q() {
                let xx = f.mul(pa, f.mul(x, x));
                let xy = f.mul(pb, f.mul(x, y));
                let yy = f.mul(pc, f.mul(y, y));
                let form = f.add(f.add(xx, xy), yy);
                let k0 = f.add(f.mul(two, f.mul(pa, x)), f.mul(pb, y));
                let k1 = f.add(f.mul(pb, x), f.mul(two, f.mul(pc, y)));
                let e = enc(q, [x, y, form, k0, k1]);
                elems.push(e);
                bits.set(e as usize);
                for c in 0..f.q() {
                    let s = enc(q, [x, y, c, k0, k1]);
                    stars.push(s);
                    sbits.set(s as usize);
                }
            }
        }
        a_elems.push(elems);
        astar_elems.push(stars);
        a_bits.push(bits);
        astar_bits.push(sbits);
    }
    {
        // The member at ∞.
        let mut elems = Vec::with_capacity(q2 as usize);
        let mut stars = Vec::with_capacity(q3 as usize);
        let mut bits = BitVec::new(q5 as usize);
        let mut sbits = BitVec::new(q5 as usize);
        for b0 in 0..f.q() {
            for b1 in 0..f.q() {
                let e = enc(q, [0, 0, 0, b0, b1]);
                elems.push(e);
                bits.set(e as usize);
                for c in 0..f.q() {
                    let s = enc(q, [0, 0, c, b0, b1]);
                    stars.push(s);
                    sbits.set(s as usize);
                }
            }
        }
        a_elems.push(elems);
        astar_elems.push(stars);
        a_bits.push(bits);
        astar_bits.push(sbits);
    }

    // Subgroup closure. A*(t) = A(t)·{(0, c, 0)} with a central second
    // factor, so closure of A(t) carries over to A*(t).
    for (t, elems) in a_elems.iter().enumerate() {
        for &g in elems {
            for &h in elems {
                if !a_bits[t].get(gmul(f, q, g, h) as usize) {
                    return Err(FlockError::FourGonalFail(format!(
                        "member {t} is not closed under the group law"
                    )));
                }
            }
        }
    }

    // A*(s) ∩ A(t) = 1 for s ≠ t.
    let mut family_pairs = 0u64;
    for s in 0..nt {
        for t in 0..nt {
            if s == t {
                continue;
            }
            let mut m = astar_bits[s].clone();
            m.and_assign(&a_bits[t]);
            if m.count_ones() != 1 || !m.get(0) {
                return Err(FlockError::FourGonalFail(format!(
                    "A*({s}) meets A({t}) beyond the identity"
                )));
            }
            family_pairs += 1;
        }
    }

    // A(s)A(t) ∩ A(u) = 1 for distinct s, t, u.
    let st_pairs: Vec<(usize, usize)> =
        (0..nt).flat_map(|s| (0..nt).filter(move |&t| t != s).map(move |t| (s, t))).collect();
    let violation = st_pairs.par_iter().find_map_first(|&(s, t)| {
        for &gs in &a_elems[s] {
            for &gt in &a_elems[t] {
                let p = gmul(f, q, gs, gt);
                if p == 0 {
                    continue;
                }
                for u in 0..nt {
                    if u != s && u != t && a_bits[u].get(p as usize) {
                        return Some((s, t, u, p));
                    }
                }
            }
        }
        None
    });
    if let Some((s, t, u, p)) = violation {
        return Err(FlockError::FourGonalFail(format!(
            "A({s})A({t}) meets A({u}) at element {p}"
        )));
    }
    let family_triples = (nt * (nt - 1) * (nt - 2)) as u64;

    // Right-coset geometry. Coset ids are assigned in ascending order of the
    // least element, which is also the stored representative.
    let v = (q5 + nt as u64 * q2 + 1) as usize;
    let n_coset_lines = nt as u64 * q3;
    let inf = (v - 1) as u32;

    let mut sc_of: Vec<Vec<u32>> = vec![vec![u32::MAX; q5 as usize]; nt];
    let mut sc_reps: Vec<Vec<u32>> = vec![Vec::new(); nt];
    for t in 0..nt {
        for g in 0..q5 as u32 {
            if sc_of[t][g as usize] != u32::MAX {
                continue;
            }
            let cid = sc_reps[t].len() as u32;
            sc_reps[t].push(g);
            for &h in &astar_elems[t] {
                sc_of[t][gmul(f, q, h, g) as usize] = cid;
            }
        }
        debug_assert_eq!(sc_reps[t].len() as u64, q2);
    }

    let mut acoset_of: Vec<Vec<u32>> = vec![vec![u32::MAX; q5 as usize]; nt];
    let mut a_reps: Vec<Vec<u32>> = vec![Vec::new(); nt];
    let mut line_points: Vec<Vec<u32>> = Vec::with_capacity(n_coset_lines as usize + nt);
    for t in 0..nt {
        for g in 0..q5 as u32 {
            if acoset_of[t][g as usize] != u32::MAX {
                continue;
            }
            let cid = a_reps[t].len() as u32;
            a_reps[t].push(g);
            let mut pts: Vec<u32> = a_elems[t].iter().map(|&h| gmul(f, q, h, g)).collect();
            for &e in &pts {
                acoset_of[t][e as usize] = cid;
            }
            pts.push((q5 + t as u64 * q2 + sc_of[t][g as usize] as u64) as u32);
            line_points.push(pts);
        }
        debug_assert_eq!(a_reps[t].len() as u64, q3);
    }
    for t in 0..nt as u64 {
        let mut pts: Vec<u32> = (0..q2).map(|c| (q5 + t * q2 + c) as u32).collect();
        pts.push(inf);
        line_points.push(pts);
    }

    let structure = IncidenceStructure::from_line_points(v, line_points)?;
    let order = gq_check(&structure, GqMode::Auto { seed: 0 })?;
    if order.s != q2 || order.t != q {
        return Err(FlockError::WrongOrder { s: q2, t: q, got: order });
    }

    // The points opposite (∞) are exactly the group points.
    let mut opposite_count = 0u64;
    for x in 0..inf {
        if !structure.collinear(inf, x) {
            if x as u64 >= q5 {
                return Err(FlockError::FourGonalFail(
                    "a coset point is opposite the base point".into(),
                ));
            }
            opposite_count += 1;
        }
    }
    if opposite_count != q5 {
        return Err(FlockError::FourGonalFail(format!(
            "expected {q5} points opposite the base point, found {opposite_count}"
        )));
    }

    // Right translations are elations about (∞): they fix (∞) linewise and,
    // being a regular group action on the q⁵ group points, they witness the
    // translation structure. Exhaustive for small groups, else a fixed
    // deterministic sample.
    let exhaustive = q5 <= 4096;
    let hs: Vec<u32> = if exhaustive {
        (1..q5 as u32).collect()
    } else {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5e1f);
        let mut picks: Vec<u32> = (0..64).map(|_| rng.gen_range(1..q5 as u32)).collect();
        picks.sort_unstable();
        picks.dedup();
        picks
    };
    let bad = hs.par_iter().find_map_first(|&h| {
        let mut pm = vec![0u32; v];
        let mut lm = vec![0u32; structure.b];
        for g in 0..q5 as u32 {
            pm[g as usize] = gmul(f, q, g, h);
        }
        for t in 0..nt {
            for (cid, &rep) in sc_reps[t].iter().enumerate() {
                let img = sc_of[t][gmul(f, q, rep, h) as usize] as u64;
                pm[(q5 + t as u64 * q2) as usize + cid] = (q5 + t as u64 * q2 + img) as u32;
            }
        }
        pm[inf as usize] = inf;
        for t in 0..nt {
            for (cid, &rep) in a_reps[t].iter().enumerate() {
                let img = acoset_of[t][gmul(f, q, rep, h) as usize] as u64;
                lm[t * q3 as usize + cid] = (t as u64 * q3 + img) as u32;
            }
        }
        for t in 0..nt {
            lm[n_coset_lines as usize + t] = (n_coset_lines as usize + t) as u32;
        }
        let c = Collineation { point_map: pm, line_map: lm };
        if !structure.verify_collineation(&c) {
            return Some(h);
        }
        // A non-identity translation moves every group point.
        if (0..q5 as usize).any(|g| c.point_map[g] == g as u32) {
            return Some(h);
        }
        None
    });
    if let Some(h) = bad {
        return Err(FlockError::ElationFail(h));
    }

    Ok(QClanGQ {
        field: fl.field.clone(),
        structure,
        order,
        group_order: q5,
        family_pairs,
        family_triples,
        infinity: inf,
        opposite_count,
        elations_checked: hs.len() as u64,
        elations_exhaustive: exhaustive,
    })
}
