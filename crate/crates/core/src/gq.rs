//! Finite point-line incidence structures and generalized quadrangle (GQ)
//! machinery: axiom checking, orders, perps and double perps, triads,
//! regularity, grids, and a brute-force search for symmetries about a line.
//!
//! The performance backbone is a per-point collinearity bitset; perps are
//! word-wise intersections. Line-side questions go through transversals
//! rather than a line-collinearity table, which would be quadratic in the
//! (much larger) line count.

use std::collections::HashMap;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::bitset::BitVec;

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum GqError {
    #[error("incidence out of range or repeated: {0}")]
    BadIncidence(String),
    #[error("degrees are not constant: {0}")]
    NotConstantDegree(String),
    #[error("axiom ({axiom}) fails: {witness}")]
    AxiomFail { axiom: &'static str, witness: String },
    #[error("order ({s},{t}) is inconsistent with v={v}, b={b}")]
    InconsistentCounts { s: u64, t: u64, v: u64, b: u64 },
    #[error("points are not pairwise noncollinear")]
    NotATriad,
    #[error("line pair is not regular")]
    PairNotRegular,
    #[error("structure too large for brute-force search (v={v} > {bound})")]
    TooLarge { v: usize, bound: usize },
    #[error("index out of range")]
    NoSuchIndex,
}

/// How exhaustively a sweep ran.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GqMode {
    /// Full when v·b ≤ 10⁸, else seeded sampling.
    Auto { seed: u64 },
    Full,
    Sampled { seed: u64, samples: u64 },
}

pub const AXIOM3_FULL_BUDGET: u64 = 100_000_000;
pub const DEFAULT_SAMPLES: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GQOrder {
    pub s: u64,
    pub t: u64,
}

/// A finite incidence structure with both adjacency directions materialized.
pub struct IncidenceStructure {
    pub v: usize,
    pub b: usize,
    /// Sorted line indices through each point.
    pub point_lines: Vec<Vec<u32>>,
    /// Sorted point indices on each line.
    pub line_points: Vec<Vec<u32>>,
    pub point_labels: Option<Vec<String>>,
    pub line_labels: Option<Vec<String>>,
    collinearity: OnceLock<Vec<BitVec>>,
}

impl std::fmt::Debug for IncidenceStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IncidenceStructure")
            .field("v", &self.v)
            .field("b", &self.b)
            .finish()
    }
}

impl IncidenceStructure {
    /// Builds from explicit (point, line) incidence pairs.
    pub fn new(v: usize, b: usize, incidences: &[(u32, u32)]) -> Result<Self, GqError> {
        let mut line_points: Vec<Vec<u32>> = vec![Vec::new(); b];
        for &(p, l) in incidences {
            if p as usize >= v || l as usize >= b {
                return Err(GqError::BadIncidence(format!("({p},{l}) out of range")));
            }
            line_points[l as usize].push(p);
        }
        Self::from_line_points(v, line_points)
    }

    /// Builds from each line's point list.
    pub fn from_line_points(v: usize, mut line_points: Vec<Vec<u32>>) -> Result<Self, GqError> {
        let b = line_points.len();
        let mut point_lines: Vec<Vec<u32>> = vec![Vec::new(); v];
        for (l, pts) in line_points.iter_mut().enumerate() {
            pts.sort_unstable();
            if pts.windows(2).any(|w| w[0] == w[1]) {
                return Err(GqError::BadIncidence(format!("line {l} repeats a point")));
            }
            for &p in pts.iter() {
                if p as usize >= v {
                    return Err(GqError::BadIncidence(format!("point {p} out of range")));
                }
                point_lines[p as usize].push(l as u32);
            }
        }
        for pl in &mut point_lines {
            pl.sort_unstable();
        }
        Ok(IncidenceStructure {
            v,
            b,
            point_lines,
            line_points,
            point_labels: None,
            line_labels: None,
            collinearity: OnceLock::new(),
        })
    }

    /// The dual structure: points become lines and vice versa.
    pub fn dual(&self) -> IncidenceStructure {
        IncidenceStructure {
            v: self.b,
            b: self.v,
            point_lines: self.line_points.clone(),
            line_points: self.point_lines.clone(),
            point_labels: self.line_labels.clone(),
            line_labels: self.point_labels.clone(),
            collinearity: OnceLock::new(),
        }
    }

    pub fn incident(&self, p: u32, l: u32) -> bool {
        self.line_points[l as usize].binary_search(&p).is_ok()
    }

    /// Collinearity rows; x is collinear with itself.
    pub fn collinearity(&self) -> &Vec<BitVec> {
        self.collinearity.get_or_init(|| {
            let mut rows: Vec<BitVec> = (0..self.v).map(|_| BitVec::new(self.v)).collect();
            for pts in &self.line_points {
                for &a in pts {
                    for &c in pts {
                        rows[a as usize].set(c as usize);
                    }
                }
            }
            for (x, row) in rows.iter_mut().enumerate() {
                row.set(x);
            }
            rows
        })
    }

    pub fn collinear(&self, x: u32, y: u32) -> bool {
        self.collinearity()[x as usize].get(y as usize)
    }

    /// The unique line through two distinct collinear points, if any.
    pub fn line_through(&self, x: u32, y: u32) -> Option<u32> {
        sorted_intersect_first(&self.point_lines[x as usize], &self.point_lines[y as usize])
    }

    /// The meet point of two lines, if any.
    pub fn meet_point(&self, l: u32, m: u32) -> Option<u32> {
        if l == m {
            return None;
        }
        sorted_intersect_first(&self.line_points[l as usize], &self.line_points[m as usize])
    }

    pub fn lines_meet(&self, l: u32, m: u32) -> bool {
        l == m || self.meet_point(l, m).is_some()
    }

    /// Perp of a point set: ∩ x^⊥ as a sorted index list.
    pub fn perp(&self, xs: &[u32]) -> Vec<u32> {
        assert!(!xs.is_empty());
        let rows = self.collinearity();
        let mut acc = rows[xs[0] as usize].clone();
        for &x in &xs[1..] {
            acc.and_assign(&rows[x as usize]);
        }
        acc.iter_ones().map(|i| i as u32).collect()
    }

    pub fn double_perp(&self, xs: &[u32]) -> Vec<u32> {
        self.perp(&self.perp(xs))
    }

    /// Centers of a triad of pairwise noncollinear points.
    pub fn triad_centers(&self, x: u32, y: u32, z: u32) -> Result<Vec<u32>, GqError> {
        let distinct = x != y && y != z && x != z;
        if !distinct || self.collinear(x, y) || self.collinear(y, z) || self.collinear(x, z) {
            return Err(GqError::NotATriad);
        }
        Ok(self.perp(&[x, y, z]))
    }

    /// Foot of a point on a line it does not lie on: the unique point of the
    /// line collinear with it (exists in a GQ).
    pub fn foot(&self, x: u32, l: u32) -> Option<u32> {
        let row = &self.collinearity()[x as usize];
        self.line_points[l as usize]
            .iter()
            .copied()
            .find(|&p| p != x && row.get(p as usize))
    }

    /// The transversals {L,M}^⊥ of two disjoint lines: one line per point
    /// of L, each meeting M.
    pub fn line_perp(&self, l: u32, m: u32) -> Vec<u32> {
        let mut out = Vec::new();
        for &p in &self.line_points[l as usize] {
            if let Some(q) = self.foot(p, m) {
                if let Some(t) = self.line_through(p, q) {
                    out.push(t);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// {L,M}^⊥⊥ for disjoint lines: lines meeting every transversal.
    pub fn line_double_perp(&self, l: u32, m: u32) -> Vec<u32> {
        let perp = self.line_perp(l, m);
        if perp.len() < 2 {
            return Vec::new();
        }
        // Candidates are the transversals of the first two perp lines.
        let candidates = self.line_perp(perp[0], perp[1]);
        candidates
            .into_iter()
            .filter(|&c| perp.iter().all(|&t| self.lines_meet(c, t)))
            .collect()
    }
}

fn sorted_intersect_first(a: &[u32], b: &[u32]) -> Option<u32> {
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return Some(a[i]),
        }
    }
    None
}

/// Verifies the GQ axioms and returns the order (s,t).
///
/// (i) every point on t+1 lines and two points on at most one common line;
/// (ii) every line has s+1 points (the two-lines-share-at-most-one-point
/// half is equivalent to the pair half of (i), so no line-pair sweep runs);
/// (iii) for every non-incident (x,L) exactly one collinear point of L.
/// Afterwards the count identities v=(s+1)(st+1), b=(t+1)(st+1) and the
/// divisibility (s+t) | st(s+1)(t+1) are checked.
pub fn gq_check(s: &IncidenceStructure, mode: GqMode) -> Result<GQOrder, GqError> {
    if s.v == 0 || s.b == 0 {
        return Err(GqError::NotConstantDegree("empty structure".into()));
    }
    let t_plus_1 = s.point_lines[0].len();
    if let Some(x) = (0..s.v).find(|&x| s.point_lines[x].len() != t_plus_1) {
        return Err(GqError::NotConstantDegree(format!(
            "point {x} lies on {} lines, expected {t_plus_1}",
            s.point_lines[x].len()
        )));
    }
    let s_plus_1 = s.line_points[0].len();
    if let Some(l) = (0..s.b).find(|&l| s.line_points[l].len() != s_plus_1) {
        return Err(GqError::NotConstantDegree(format!(
            "line {l} holds {} points, expected {s_plus_1}",
            s.line_points[l].len()
        )));
    }
    if t_plus_1 < 2 || s_plus_1 < 2 {
        return Err(GqError::NotConstantDegree(
            "a GQ needs s \u{2265} 1 and t \u{2265} 1".into(),
        ));
    }
    // Pair half of axiom (i): no two points on two common lines. Scan each
    // point's star and count co-point multiplicities.
    let pair_violation = (0..s.v)
        .into_par_iter()
        .find_map_first(|x| {
            let mut seen: HashMap<u32, u32> = HashMap::new();
            for &l in &s.point_lines[x] {
                for &y in &s.line_points[l as usize] {
                    if y as usize != x {
                        let c = seen.entry(y).or_insert(0);
                        *c += 1;
                        if *c > 1 {
                            return Some((x, y));
                        }
                    }
                }
            }
            None
        });
    if let Some((x, y)) = pair_violation {
        return Err(GqError::AxiomFail {
            axiom: "i",
            witness: format!("points {x} and {y} lie on two common lines"),
        });
    }
    // Axiom (iii).
    let check_pair = |x: u32, l: u32| -> Result<(), GqError> {
        let row = &s.collinearity()[x as usize];
        let hits = s.line_points[l as usize]
            .iter()
            .filter(|&&y| row.get(y as usize))
            .count();
        if hits != 1 {
            return Err(GqError::AxiomFail {
                axiom: "iii",
                witness: format!("point {x}, line {l}: {hits} collinear feet, expected 1"),
            });
        }
        Ok(())
    };
    let total_pairs = s.v as u64 * s.b as u64;
    let resolved = match mode {
        GqMode::Full => GqMode::Full,
        GqMode::Auto { seed } => {
            if total_pairs <= AXIOM3_FULL_BUDGET {
                GqMode::Full
            } else {
                GqMode::Sampled { seed, samples: DEFAULT_SAMPLES }
            }
        }
        m => m,
    };
    match resolved {
        GqMode::Full => {
            let bad = (0..s.b as u32)
                .into_par_iter()
                .find_map_first(|l| {
                    for x in 0..s.v as u32 {
                        if !s.incident(x, l) {
                            if let Err(e) = check_pair(x, l) {
                                return Some(e);
                            }
                        }
                    }
                    None
                });
            if let Some(e) = bad {
                return Err(e);
            }
        }
        GqMode::Sampled { seed, samples } => {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let picked: Vec<(u32, u32)> = (0..samples)
                .map(|_| loop {
                    let x = rng.gen_range(0..s.v as u32);
                    let l = rng.gen_range(0..s.b as u32);
                    if !s.incident(x, l) {
                        break (x, l);
                    }
                })
                .collect();
            if let Some(e) = picked
                .par_iter()
                .find_map_first(|&(x, l)| check_pair(x, l).err())
            {
                return Err(e);
            }
        }
        GqMode::Auto { .. } => unreachable!(),
    }
    let (ss, tt) = (s_plus_1 as u64 - 1, t_plus_1 as u64 - 1);
    let (v, b) = (s.v as u64, s.b as u64);
    if v != (ss + 1) * (ss * tt + 1) || b != (tt + 1) * (ss * tt + 1) {
        return Err(GqError::InconsistentCounts { s: ss, t: tt, v, b });
    }
    let prod = (ss as u128) * (tt as u128) * (ss as u128 + 1) * (tt as u128 + 1);
    if prod % (ss as u128 + tt as u128) != 0 {
        return Err(GqError::InconsistentCounts { s: ss, t: tt, v, b });
    }
    Ok(GQOrder { s: ss, t: tt })
}

// ---------------------------------------------------------------------------
// Regularity
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegularityObject {
    PointPair(u32, u32),
    LinePair(u32, u32),
    Point(u32),
    Line(u32),
    /// All lines through the given point.
    Coregularity(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularityReport {
    pub object: RegularityObject,
    /// Perp / double-perp sizes for single-pair objects.
    pub perp_size: Option<u64>,
    pub double_perp_size: Option<u64>,
    pub pairs_checked: u64,
    pub regular: bool,
    /// First irregular pair, as a human-readable description.
    pub witness: Option<String>,
    /// Set when a finding contradicts general GQ theory (e.g. a regular
    /// point pair although 1 < s < t).
    pub note: Option<String>,
}

impl IncidenceStructure {
    /// Regularity of a noncollinear point pair: |{x,y}^⊥⊥| = t+1.
    pub fn point_pair_regularity(&self, order: GQOrder, x: u32, y: u32) -> Result<RegularityReport, GqError> {
        if x == y || self.collinear(x, y) {
            return Err(GqError::NotATriad);
        }
        let perp = self.perp(&[x, y]);
        let dp = self.double_perp(&[x, y]);
        let regular = dp.len() as u64 == order.t + 1;
        let note = if regular && order.s > 1 && order.s < order.t {
            Some("regular point pair although 1 < s < t, contradicting GQ theory".to_string())
        } else {
            None
        };
        Ok(RegularityReport {
            object: RegularityObject::PointPair(x, y),
            perp_size: Some(perp.len() as u64),
            double_perp_size: Some(dp.len() as u64),
            pairs_checked: 1,
            regular,
            witness: if regular { None } else { Some(format!("{{{x},{y}}}: |dp| = {}", dp.len())) },
            note,
        })
    }

    /// Regularity of a disjoint line pair: |{L,M}^⊥⊥| = s+1.
    pub fn line_pair_regularity(&self, order: GQOrder, l: u32, m: u32) -> Result<RegularityReport, GqError> {
        if l == m || self.lines_meet(l, m) {
            return Err(GqError::NotATriad);
        }
        let perp = self.line_perp(l, m);
        let dp = self.line_double_perp(l, m);
        let regular = dp.len() as u64 == order.s + 1;
        let note = if regular && order.t > 1 && order.t < order.s {
            Some("regular line pair although 1 < t < s, contradicting GQ theory".to_string())
        } else {
            None
        };
        Ok(RegularityReport {
            object: RegularityObject::LinePair(l, m),
            perp_size: Some(perp.len() as u64),
            double_perp_size: Some(dp.len() as u64),
            pairs_checked: 1,
            regular,
            witness: if regular { None } else { Some(format!("{{{l},{m}}}: |dp| = {}", dp.len())) },
            note,
        })
    }

    /// A point is regular when every noncollinear pair through it is.
    pub fn point_regularity(&self, order: GQOrder, x: u32) -> Result<RegularityReport, GqError> {
        let mut pairs = 0u64;
        let mut witness = None;
        let mut note = None;
        for y in 0..self.v as u32 {
            if y == x || self.collinear(x, y) {
                continue;
            }
            pairs += 1;
            let r = self.point_pair_regularity(order, x, y)?;
            if !r.regular && witness.is_none() {
                witness = r.witness;
            }
            if r.note.is_some() && note.is_none() {
                note = r.note;
            }
        }
        Ok(RegularityReport {
            object: RegularityObject::Point(x),
            perp_size: None,
            double_perp_size: None,
            pairs_checked: pairs,
            regular: witness.is_none(),
            witness,
            note,
        })
    }

    /// A line is regular when every disjoint line pair through it is.
    pub fn line_regularity(&self, order: GQOrder, l: u32) -> Result<RegularityReport, GqError> {
        let results: Vec<(u64, Option<String>)> = (0..self.b as u32)
            .into_par_iter()
            .filter(|&m| m != l && !self.lines_meet(l, m))
            .map(|m| {
                let r = self.line_pair_regularity(order, l, m).expect("disjoint pair");
                (1u64, if r.regular { None } else { r.witness })
            })
            .collect();
        let pairs = results.iter().map(|(c, _)| c).sum();
        let witness = results.into_iter().find_map(|(_, w)| w);
        Ok(RegularityReport {
            object: RegularityObject::Line(l),
            perp_size: None,
            double_perp_size: None,
            pairs_checked: pairs,
            regular: witness.is_none(),
            witness,
            note: None,
        })
    }

    /// A point is coregular when every line through it is regular.
    pub fn coregularity(&self, order: GQOrder, x: u32) -> Result<RegularityReport, GqError> {
        let mut pairs = 0u64;
        let mut witness = None;
        for &l in &self.point_lines[x as usize] {
            let r = self.line_regularity(order, l)?;
            pairs += r.pairs_checked;
            if !r.regular && witness.is_none() {
                witness = r.witness.map(|w| format!("line {l}: {w}"));
            }
        }
        Ok(RegularityReport {
            object: RegularityObject::Coregularity(x),
            perp_size: None,
            double_perp_size: None,
            pairs_checked: pairs,
            regular: witness.is_none(),
            witness,
            note: None,
        })
    }

    /// The (s+1)×(s+1) grid on a regular disjoint line pair: points are the
    /// transversal meets, lines are {L,M}^⊥ ∪ {L,M}^⊥⊥, labels record the
    /// source indices.
    pub fn grid_of(&self, order: GQOrder, l: u32, m: u32) -> Result<IncidenceStructure, GqError> {
        let r = self.line_pair_regularity(order, l, m)?;
        if !r.regular {
            return Err(GqError::PairNotRegular);
        }
        let perp = self.line_perp(l, m);
        let dperp = self.line_double_perp(l, m);
        let mut point_ids: Vec<u32> = Vec::new();
        for &t in &perp {
            for &u in &dperp {
                let p = self.meet_point(t, u).expect("grid lines meet");
                point_ids.push(p);
            }
        }
        point_ids.sort_unstable();
        point_ids.dedup();
        let index_of: HashMap<u32, u32> = point_ids
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i as u32))
            .collect();
        let mut lines: Vec<Vec<u32>> = Vec::new();
        let mut line_labels = Vec::new();
        for &t in dperp.iter().chain(&perp) {
            let pts: Vec<u32> = self.line_points[t as usize]
                .iter()
                .filter_map(|p| index_of.get(p).copied())
                .collect();
            lines.push(pts);
            line_labels.push(format!("L{t}"));
        }
        let mut grid = IncidenceStructure::from_line_points(point_ids.len(), lines)?;
        grid.point_labels = Some(point_ids.iter().map(|p| format!("P{p}")).collect());
        grid.line_labels = Some(line_labels);
        Ok(grid)
    }
}

// ---------------------------------------------------------------------------
// Collineations and symmetries about a line
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Collineation {
    pub point_map: Vec<u32>,
    pub line_map: Vec<u32>,
}

impl Collineation {
    pub fn identity(v: usize, b: usize) -> Collineation {
        Collineation {
            point_map: (0..v as u32).collect(),
            line_map: (0..b as u32).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.point_map.iter().enumerate().all(|(i, &x)| i as u32 == x)
            && self.line_map.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// self ∘ other: apply other first.
    pub fn compose(&self, other: &Collineation) -> Collineation {
        Collineation {
            point_map: other.point_map.iter().map(|&x| self.point_map[x as usize]).collect(),
            line_map: other.line_map.iter().map(|&x| self.line_map[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Collineation {
        let mut pm = vec![0u32; self.point_map.len()];
        let mut lm = vec![0u32; self.line_map.len()];
        for (i, &x) in self.point_map.iter().enumerate() {
            pm[x as usize] = i as u32;
        }
        for (i, &x) in self.line_map.iter().enumerate() {
            lm[x as usize] = i as u32;
        }
        Collineation { point_map: pm, line_map: lm }
    }
}

impl IncidenceStructure {
    /// True iff the maps are inverse-consistent bijections preserving
    /// incidence in both directions.
    pub fn verify_collineation(&self, c: &Collineation) -> bool {
        if c.point_map.len() != self.v || c.line_map.len() != self.b {
            return false;
        }
        let mut seen = vec![false; self.v];
        for &x in &c.point_map {
            if x as usize >= self.v || std::mem::replace(&mut seen[x as usize], true) {
                return false;
            }
        }
        let mut seen_l = vec![false; self.b];
        for &l in &c.line_map {
            if l as usize >= self.b || std::mem::replace(&mut seen_l[l as usize], true) {
                return false;
            }
        }
        for (l, pts) in self.line_points.iter().enumerate() {
            let img = c.line_map[l] as usize;
            let mut mapped: Vec<u32> = pts.iter().map(|&p| c.point_map[p as usize]).collect();
            mapped.sort_unstable();
            if mapped != self.line_points[img] {
                return false;
            }
        }
        true
    }

    /// True iff `c` is a collineation fixing every line concurrent with `l`
    /// (including `l` itself).
    pub fn is_symmetry_about(&self, l: u32, c: &Collineation) -> bool {
        if !self.verify_collineation(c) {
            return false;
        }
        (0..self.b as u32).all(|m| !self.lines_meet(l, m) || c.line_map[m as usize] == m)
    }

    /// Brute-force search bound for `symmetry_group_about`.
    pub const SYMMETRY_SEARCH_BOUND: usize = 500;

    /// All symmetries about the line `l`, found by constraint propagation
    /// from the image of one off-line point. Returns the full group
    /// (identity included), sorted for determinism.
    pub fn symmetry_group_about(&self, l: u32) -> Result<Vec<Collineation>, GqError> {
        if self.v > Self::SYMMETRY_SEARCH_BOUND {
            return Err(GqError::TooLarge { v: self.v, bound: Self::SYMMETRY_SEARCH_BOUND });
        }
        let fixed: Vec<u32> = (0..self.b as u32).filter(|&m| self.lines_meet(l, m)).collect();
        // Base point: first point not on l.
        let x0 = (0..self.v as u32)
            .find(|&x| !self.incident(x, l))
            .ok_or(GqError::NoSuchIndex)?;
        // Its image must stay on the fixed connector line through it.
        let m0 = *self.point_lines[x0 as usize]
            .iter()
            .find(|&&n| self.lines_meet(l, n))
            .ok_or(GqError::NoSuchIndex)?;
        let mut out: Vec<Collineation> = Vec::new();
        for &y0 in &self.line_points[m0 as usize] {
            let mut st = SearchState::new(self.v, self.b);
            let mut ok = true;
            for &m in &fixed {
                ok = ok && st.assign_line(self, m, m);
            }
            ok = ok && st.assign_point(self, x0, y0);
            if ok {
                let mut found = Vec::new();
                self.complete_symmetry(st, &mut found);
                out.extend(
                    found
                        .into_iter()
                        .filter(|c| self.is_symmetry_about(l, c)),
                );
            }
        }
        out.sort();
        out.dedup();
        // A symmetry group is closed; verify rather than assume.
        for a in &out {
            for b in &out {
                let ab = a.compose(b);
                if !out.contains(&ab) {
                    return Err(GqError::AxiomFail {
                        axiom: "closure",
                        witness: "symmetry set not closed under composition".into(),
                    });
                }
            }
            if !out.contains(&a.inverse()) {
                return Err(GqError::AxiomFail {
                    axiom: "closure",
                    witness: "symmetry set not closed under inverse".into(),
                });
            }
        }
        Ok(out)
    }

    /// Propagate-then-branch search. Propagation closes under (a) the image
    /// of a line with two mapped points, (b) the image of a point on two
    /// mapped lines, and (c) feet: a mapped point's foot on a mapped line
    /// maps to the image's foot on the image line. Thin structures (t = 1)
    /// can stall with points on a single determined line, so any remainder
    /// is resolved by branching over consistent candidates.
    fn complete_symmetry(&self, mut st: SearchState, out: &mut Vec<Collineation>) {
        if !self.propagate(&mut st) {
            return;
        }
        let undetermined = (0..self.v as u32).find(|&x| st.pmap[x as usize].is_none());
        let Some(x) = undetermined else {
            // All points known; lines follow via rule (a) inside propagate.
            let Some(c) = st.into_collineation() else { return };
            if self.verify_collineation(&c) {
                out.push(c);
            }
            return;
        };
        for y in 0..self.v as u32 {
            if !st.point_candidate_ok(self, x, y) {
                continue;
            }
            let mut branch = st.clone();
            if branch.assign_point(self, x, y) {
                self.complete_symmetry(branch, out);
            }
        }
    }

    fn propagate(&self, st: &mut SearchState) -> bool {
        let mut changed = true;
        while changed {
            changed = false;
            // (a) lines with two determined points.
            for n in 0..self.b as u32 {
                if st.lmap[n as usize].is_some() {
                    continue;
                }
                let mut imgs = self.line_points[n as usize]
                    .iter()
                    .filter_map(|&p| st.pmap[p as usize]);
                if let (Some(a), Some(b)) = (imgs.next(), imgs.next()) {
                    let Some(target) = self.line_through(a, b) else { return false };
                    if !st.assign_line(self, n, target) {
                        return false;
                    }
                    changed = true;
                }
            }
            // (b) points on two determined lines.
            for x in 0..self.v as u32 {
                if st.pmap[x as usize].is_some() {
                    continue;
                }
                let mut imgs = self.point_lines[x as usize]
                    .iter()
                    .filter_map(|&n| st.lmap[n as usize]);
                if let (Some(a), Some(b)) = (imgs.next(), imgs.next()) {
                    if a == b {
                        return false;
                    }
                    let Some(target) = self.meet_point(a, b) else { return false };
                    if !st.assign_point(self, x, target) {
                        return false;
                    }
                    changed = true;
                }
            }
            // (c) feet of determined points on determined lines.
            for x in 0..self.v as u32 {
                let Some(y) = st.pmap[x as usize] else { continue };
                for n in 0..self.b as u32 {
                    let Some(n_img) = st.lmap[n as usize] else { continue };
                    if self.incident(x, n) {
                        continue; // consistency enforced at assignment time
                    }
                    let Some(foot) = self.foot(x, n) else { continue };
                    let Some(foot_img) = self.foot(y, n_img) else { return false };
                    match st.pmap[foot as usize] {
                        None => {
                            if !st.assign_point(self, foot, foot_img) {
                                return false;
                            }
                            changed = true;
                        }
                        Some(cur) if cur != foot_img => return false,
                        _ => {}
                    }
                }
            }
        }
        true
    }
}

/// Partial collineation under construction: optional images plus used-image
/// masks for injectivity.
#[derive(Clone)]
struct SearchState {
    pmap: Vec<Option<u32>>,
    lmap: Vec<Option<u32>>,
    used_p: Vec<bool>,
    used_l: Vec<bool>,
}

impl SearchState {
    fn new(v: usize, b: usize) -> SearchState {
        SearchState {
            pmap: vec![None; v],
            lmap: vec![None; b],
            used_p: vec![false; v],
            used_l: vec![false; b],
        }
    }

    /// Candidate test: `y` unused and incidence with every determined line
    /// mirrors that of `x`.
    fn point_candidate_ok(&self, s: &IncidenceStructure, x: u32, y: u32) -> bool {
        if self.used_p[y as usize] {
            return false;
        }
        for n in 0..s.b as u32 {
            if let Some(n_img) = self.lmap[n as usize] {
                if s.incident(x, n) != s.incident(y, n_img) {
                    return false;
                }
            }
        }
        true
    }

    fn assign_point(&mut self, s: &IncidenceStructure, x: u32, y: u32) -> bool {
        match self.pmap[x as usize] {
            Some(cur) => return cur == y,
            None => {}
        }
        if !self.point_candidate_ok(s, x, y) {
            return false;
        }
        self.pmap[x as usize] = Some(y);
        self.used_p[y as usize] = true;
        true
    }

    fn assign_line(&mut self, s: &IncidenceStructure, n: u32, m: u32) -> bool {
        match self.lmap[n as usize] {
            Some(cur) => return cur == m,
            None => {}
        }
        if self.used_l[m as usize] {
            return false;
        }
        // Determined points must keep their incidence relation with n.
        for x in 0..s.v as u32 {
            if let Some(y) = self.pmap[x as usize] {
                if s.incident(x, n) != s.incident(y, m) {
                    return false;
                }
            }
        }
        self.lmap[n as usize] = Some(m);
        self.used_l[m as usize] = true;
        true
    }

    fn into_collineation(self) -> Option<Collineation> {
        let point_map: Option<Vec<u32>> = self.pmap.into_iter().collect();
        let line_map: Option<Vec<u32>> = self.lmap.into_iter().collect();
        Some(Collineation { point_map: point_map?, line_map: line_map? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// k×k grid: points r·k+c; lines are the k rows then the k columns.
    fn grid(k: usize) -> IncidenceStructure {
        let mut lines = Vec::new();
        for r in 0..k {
            lines.push((0..k).map(|c| (r * k + c) as u32).collect());
        }
        for c in 0..k {
            lines.push((0..k).map(|r| (r * k + c) as u32).collect());
        }
        IncidenceStructure::from_line_points(k * k, lines).unwrap()
    }

    /// W(3): points of PG(3,3), lines the totally isotropic lines of the
    /// symplectic form x₀y₁ − x₁y₀ + x₂y₃ − x₃y₂. A GQ of order (3,3).
    fn w3() -> IncidenceStructure {
        use crate::gf::FiniteField;
        use crate::projgeom::{all_points, line_through};
        let f = FiniteField::new(3, 1, None).unwrap();
        let pts = all_points(&f, 4);
        let idx: HashMap<Vec<u32>, u32> = pts
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i as u32))
            .collect();
        let bform = |u: &[u32], w: &[u32]| {
            let mut acc = f.sub(f.mul(u[0], w[1]), f.mul(u[1], w[0]));
            acc = f.add(acc, f.sub(f.mul(u[2], w[3]), f.mul(u[3], w[2])));
            acc
        };
        let mut lines: Vec<Vec<u32>> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                if bform(&pts[i], &pts[j]) != 0 {
                    continue;
                }
                let line = line_through(&f, &pts[i], &pts[j]);
                let mut ids: Vec<u32> = line.points(&f).iter().map(|p| idx[p]).collect();
                ids.sort_unstable();
                if seen.insert(ids.clone()) {
                    lines.push(ids);
                }
            }
        }
        IncidenceStructure::from_line_points(pts.len(), lines).unwrap()
    }

    #[test]
    fn a_3x3_grid_is_a_gq_of_order_2_1() {
        let g = grid(3);
        assert_eq!((g.v, g.b), (9, 6));
        let order = gq_check(&g, GqMode::Full).unwrap();
        assert_eq!(order, GQOrder { s: 2, t: 1 });
        // Sampling mode agrees.
        let order2 = gq_check(&g, GqMode::Sampled { seed: 7, samples: 1000 }).unwrap();
        assert_eq!(order, order2);
    }

    #[test]
    fn w3_is_a_gq_of_order_3_3_with_forty_self_dual_lines() {
        let s = w3();
        assert_eq!((s.v, s.b), (40, 40));
        let order = gq_check(&s, GqMode::Auto { seed: 0 }).unwrap();
        assert_eq!(order, GQOrder { s: 3, t: 3 });
        let dual = s.dual();
        assert_eq!(gq_check(&dual, GqMode::Full).unwrap(), GQOrder { s: 3, t: 3 });
    }

    #[test]
    fn repeated_line_through_a_pair_fails_axiom_i() {
        // Two lines with the same two points.
        let s = IncidenceStructure::from_line_points(
            4,
            vec![vec![0, 1], vec![0, 1], vec![2, 3], vec![2, 3]],
        )
        .unwrap();
        match gq_check(&s, GqMode::Full) {
            Err(GqError::AxiomFail { axiom: "i", .. }) => {}
            other => panic!("expected axiom (i) failure, got {other:?}"),
        }
    }

    #[test]
    fn a_triangle_fails_axiom_iii() {
        let s = IncidenceStructure::from_line_points(3, vec![vec![0, 1], vec![1, 2], vec![2, 0]])
            .unwrap();
        match gq_check(&s, GqMode::Full) {
            Err(GqError::AxiomFail { axiom: "iii", .. }) => {}
            other => panic!("expected axiom (iii) failure, got {other:?}"),
        }
    }

    #[test]
    fn perp_sizes_follow_collinearity() {
        let g = grid(3);
        // x ∈ x^⊥.
        assert!(g.perp(&[4]).contains(&4));
        // Collinear pair: the full row, s+1 = 3 points.
        assert_eq!(g.perp(&[0, 1]).len(), 3);
        // Noncollinear pair: t+1 = 2.
        assert_eq!(g.perp(&[0, 4]).len(), 2);
        let s = w3();
        let order = gq_check(&s, GqMode::Full).unwrap();
        let y_noncoll = (1..s.v as u32).find(|&y| !s.collinear(0, y)).unwrap();
        assert_eq!(s.perp(&[0, y_noncoll]).len() as u64, order.t + 1);
        let y_coll = (1..s.v as u32).find(|&y| s.collinear(0, y)).unwrap();
        assert_eq!(s.perp(&[0, y_coll]).len() as u64, order.s + 1);
    }

    #[test]
    fn triads_require_pairwise_noncollinearity() {
        let g = grid(3);
        // Main diagonal: pairwise noncollinear, no centers in a grid.
        assert_eq!(g.triad_centers(0, 4, 8).unwrap(), Vec::<u32>::new());
        assert_eq!(g.triad_centers(0, 1, 4).unwrap_err(), GqError::NotATriad);
        // W(3): triads exist and have centers.
        let s = w3();
        let mut found = None;
        'outer: for y in 0..s.v as u32 {
            for z in 0..s.v as u32 {
                if s.triad_centers(0, y, z).is_ok() {
                    found = Some((y, z));
                    break 'outer;
                }
            }
        }
        let (y, z) = found.unwrap();
        assert!(!s.triad_centers(0, y, z).unwrap().is_empty());
    }

    #[test]
    fn every_grid_pair_is_regular_and_grid_of_returns_the_grid() {
        let g = grid(3);
        let order = gq_check(&g, GqMode::Full).unwrap();
        let r = g.point_pair_regularity(order, 0, 4).unwrap();
        assert!(r.regular);
        assert_eq!(r.perp_size, Some(2));
        assert_eq!(r.double_perp_size, Some(2));
        // Lines 0,1 are two rows: disjoint and regular.
        let lr = g.line_pair_regularity(order, 0, 1).unwrap();
        assert!(lr.regular);
        assert_eq!(lr.perp_size, Some(3));
        assert_eq!(lr.double_perp_size, Some(3));
        let sub = g.grid_of(order, 0, 1).unwrap();
        assert_eq!((sub.v, sub.b), (9, 6));
        assert_eq!(gq_check(&sub, GqMode::Full).unwrap(), GQOrder { s: 2, t: 1 });
    }

    #[test]
    fn w3_points_are_regular_and_lines_are_not() {
        let s = w3();
        let order = gq_check(&s, GqMode::Full).unwrap();
        // Symplectic GQs of odd order: all points regular, no line regular.
        let pr = s.point_regularity(order, 0).unwrap();
        assert!(pr.regular, "{:?}", pr.witness);
        assert!(pr.note.is_none());
        let lr = s.line_regularity(order, 0).unwrap();
        assert!(!lr.regular);
        assert!(lr.witness.is_some());
    }

    #[test]
    fn dual_line_side_equals_primal_point_side() {
        let s = w3();
        let order = gq_check(&s, GqMode::Full).unwrap();
        let dual = s.dual();
        let dual_order = gq_check(&dual, GqMode::Full).unwrap();
        for l in [0u32, 7, 19] {
            let primal = s.line_regularity(order, l).unwrap();
            let dualized = dual.point_regularity(dual_order, l).unwrap();
            assert_eq!(primal.regular, dualized.regular);
            assert_eq!(primal.pairs_checked, dualized.pairs_checked);
        }
    }

    #[test]
    fn grid_symmetries_about_a_row_swap_the_other_rows() {
        let g = grid(3);
        let syms = g.symmetry_group_about(0).unwrap();
        // Identity plus the swap of rows 1 and 2 within each column.
        assert_eq!(syms.len(), 2);
        assert!(syms.iter().any(|c| c.is_identity()));
        let swap = syms.iter().find(|c| !c.is_identity()).unwrap();
        assert!(g.is_symmetry_about(0, swap));
        // Row 0 is fixed pointwise.
        for p in 0..3u32 {
            assert_eq!(swap.point_map[p as usize], p);
        }
    }

    #[test]
    fn symmetry_search_refuses_oversized_structures() {
        // A fake giant structure: only sizes matter for the bound check.
        let lines: Vec<Vec<u32>> = (0..600u32).map(|i| vec![i, (i + 1) % 600]).collect();
        let s = IncidenceStructure::from_line_points(600, lines).unwrap();
        assert_eq!(
            s.symmetry_group_about(0).unwrap_err(),
            GqError::TooLarge { v: 600, bound: 500 }
        );
    }
}
