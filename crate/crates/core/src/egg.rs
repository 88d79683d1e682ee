//! Eggs O(n,m,q): q^m+1 pairwise disjoint (n−1)-spaces of PG(2n+m−1,q),
//! every three of which span a (3n−1)-space. This module validates candidate
//! eggs, computes tangent spaces by their point-collection characterization,
//! tests goodness, forms the translation dual, and supplies the classical
//! instances (elliptic quadric ovoids and conic ovals, optionally field
//! reduced over a subfield).

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;

use crate::bitset::BitVec;
use crate::gf::{ExtElem, FieldExt, FiniteField, GfError};
use crate::linalg;
use crate::projgeom::{self, AmbientIndex, Subspace};

/// Exhaustive triple-sweep budget; larger instances fall back to seeded
/// sampling unless `full` is requested.
pub const TRIPLE_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum EggError {
    #[error("expected {expected} elements, got {got}")]
    WrongCount { expected: u64, got: u64 },
    #[error("element {index} has rank {got}, expected rank {expected} in a {vdim}-coordinate space")]
    WrongDim { index: usize, expected: usize, got: usize, vdim: usize },
    #[error("elements {0} and {1} share a point")]
    DisjointnessFailure(usize, usize),
    #[error("elements {0}, {1}, {2} fail to span a (3n-1)-space")]
    TripleSpanFailure(usize, usize, usize),
    #[error("no tangent space of dimension n+m-1 exists at element {0}")]
    TangentFailure(usize),
    #[error("goodness is defined only for m = 2n")]
    NotM2N,
    #[error("the translation dual requires n \u{2260} m or odd q")]
    DualHypothesisFailed,
    #[error("input point set is not an ovoid/oval: {0}")]
    InputNotOvoid(String),
    #[error(transparent)]
    Field(#[from] GfError),
}

/// How the triple-span condition was checked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckMode {
    Exhaustive { triples: u64 },
    Sampled { seed: u64, samples: u64, total: u64 },
}

#[derive(Debug, Clone, Copy)]
pub struct EggCheckOptions {
    /// Force the exhaustive triple sweep regardless of budget.
    pub full: bool,
    /// Seed for the sampled fallback.
    pub seed: u64,
}

impl Default for EggCheckOptions {
    fn default() -> Self {
        EggCheckOptions { full: false, seed: 0 }
    }
}

pub struct Egg {
    pub field: Arc<FiniteField>,
    pub n: u32,
    pub m: u32,
    /// q^m+1 canonical (n−1)-spaces; all downstream objects refer to these
    /// by index.
    pub elements: Vec<Subspace>,
    /// Parameter-constraint warnings (never errors): for even q an egg must
    /// have n = m or m = 2n.
    pub warnings: Vec<String>,
    pub triple_check: CheckMode,
    tangents: OnceLock<Result<Vec<Subspace>, EggError>>,
    ambient: OnceLock<AmbientIndex>,
    union: OnceLock<UnionCache>,
}

struct UnionCache {
    points: Vec<Vec<u32>>,
    element_of: HashMap<Vec<u32>, u32>,
}

impl std::fmt::Debug for Egg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Egg")
            .field("q", &self.field.q())
            .field("n", &self.n)
            .field("m", &self.m)
            .field("elements", &self.elements.len())
            .finish()
    }
}

impl Egg {
    /// Wraps elements without any validation — for constructed
    /// counterexamples and internal use. Prefer `egg_validate`.
    pub fn new_unchecked(field: Arc<FiniteField>, n: u32, m: u32, elements: Vec<Subspace>) -> Egg {
        Egg {
            field,
            n,
            m,
            elements,
            warnings: Vec::new(),
            triple_check: CheckMode::Exhaustive { triples: 0 },
            tangents: OnceLock::new(),
            ambient: OnceLock::new(),
            union: OnceLock::new(),
        }
    }

    /// Number of coordinates of the ambient PG(2n+m−1,q).
    pub fn vdim(&self) -> usize {
        (2 * self.n + self.m) as usize
    }

    pub fn ambient_index(&self) -> &AmbientIndex {
        self.ambient.get_or_init(|| AmbientIndex::new(&self.field, self.vdim()))
    }

    /// All tangent spaces, computed on first use and cached.
    pub fn tangents(&self) -> Result<&[Subspace], EggError> {
        let r = self.tangents.get_or_init(|| {
            let idx = self.ambient_index();
            (0..self.elements.len())
                .into_par_iter()
                .map(|i| self.compute_tangent(i, idx))
                .collect()
        });
        match r {
            Ok(v) => Ok(v),
            Err(e) => Err(e.clone()),
        }
    }

    /// Tangent space at element i (valid eggs only).
    pub fn tangent_space(&self, i: usize) -> &Subspace {
        match self.tangents() {
            Ok(v) => &v[i],
            Err(e) => panic!("tangent computation failed: {e}"),
        }
    }

    /// The tangent space τᵢ is the span of πᵢ together with every point x
    /// outside the egg's point union such that ⟨πᵢ,x⟩ meets no other
    /// element. Since ⟨πᵢ,x⟩ meets πⱼ exactly when x ∈ ⟨πᵢ,πⱼ⟩, those
    /// points are the complement of ∪_{j≠i}⟨πᵢ,πⱼ⟩; the computation marks
    /// that union and verifies the collected set is exactly the point set of
    /// an (n+m−1)-space avoiding every other element.
    fn compute_tangent(&self, i: usize, idx: &AmbientIndex) -> Result<Subspace, EggError> {
        let f = &self.field;
        let mut marked = BitVec::new(idx.len());
        for (j, pj) in self.elements.iter().enumerate() {
            if j == i {
                continue;
            }
            let joint = projgeom::span(f, &[&self.elements[i], pj]);
            for p in joint.points(f) {
                marked.set(idx.get(&p).expect("ambient point") as usize);
            }
        }
        let mut rows: Vec<Vec<u32>> = self.elements[i].m.rows_iter().map(|r| r.to_vec()).collect();
        let mut collected = 0u64;
        for pi in 0..idx.len() {
            if !marked.get(pi) {
                rows.push(idx.points[pi].clone());
                collected += 1;
            }
        }
        let tau = Subspace::from_rows(f, self.vdim(), &rows);
        let expected_rank = (self.n + self.m) as usize;
        if tau.rank() != expected_rank {
            return Err(EggError::TangentFailure(i));
        }
        // The collected points all lie in τ by construction; exactness is
        // the count identity |τ| = |collected| + |πᵢ|.
        if tau.point_count(f) != collected + self.elements[i].point_count(f) {
            return Err(EggError::TangentFailure(i));
        }
        for (j, pj) in self.elements.iter().enumerate() {
            if j != i && linalg::rank(f, &tau.m.stack(&pj.m)) != expected_rank + pj.rank() {
                return Err(EggError::TangentFailure(i));
            }
        }
        Ok(tau)
    }

    fn union_cache(&self) -> &UnionCache {
        self.union.get_or_init(|| {
            let mut points = Vec::new();
            let mut element_of = HashMap::new();
            for (i, el) in self.elements.iter().enumerate() {
                for p in el.points(&self.field) {
                    element_of.insert(p.clone(), i as u32);
                    points.push(p);
                }
            }
            UnionCache { points, element_of }
        })
    }

    /// The egg's point union Õ, ordered by element index then element-local
    /// point order.
    pub fn point_union(&self) -> &[Vec<u32>] {
        &self.union_cache().points
    }

    /// Index of the element containing the given (not necessarily
    /// normalized) point, if any.
    pub fn element_of(&self, p: &[u32]) -> Option<usize> {
        let p = projgeom::normalize_point(&self.field, p).ok()?;
        self.union_cache().element_of.get(&p).map(|&i| i as usize)
    }

    /// Goodness at element i: every (3n−1)-space spanned by πᵢ and two
    /// other elements must contain exactly q^n+1 elements. Coinciding spans
    /// are deduplicated by their canonical matrices.
    pub fn goodness_test(&self, i: usize) -> Result<GoodnessReport, EggError> {
        if self.m != 2 * self.n {
            return Err(EggError::NotM2N);
        }
        let f = &self.field;
        let count = self.elements.len();
        let mut first_witness: HashMap<Subspace, (usize, usize, usize)> = HashMap::new();
        for j in 0..count {
            if j == i {
                continue;
            }
            for k in j + 1..count {
                if k == i {
                    continue;
                }
                let sp = projgeom::span(f, &[&self.elements[i], &self.elements[j], &self.elements[k]]);
                first_witness.entry(sp).or_insert((i, j, k));
            }
        }
        let mut spans: Vec<(Subspace, (usize, usize, usize))> = first_witness.into_iter().collect();
        spans.sort_by_key(|(_, w)| *w);
        let target = (f.q() as u64).pow(self.n) + 1;
        let mut span_counts: BTreeMap<u64, u64> = BTreeMap::new();
        let mut counterexample = None;
        for (sub, witness) in &spans {
            let inside = self
                .elements
                .iter()
                .filter(|el| sub.contains(f, el))
                .count() as u64;
            *span_counts.entry(inside).or_insert(0) += 1;
            if inside != target && counterexample.is_none() {
                counterexample = Some(*witness);
            }
        }
        Ok(GoodnessReport {
            element: i,
            good: counterexample.is_none(),
            span_counts,
            spans_tested: spans.len() as u64,
            counterexample,
        })
    }

    /// Goodness at every element, in parallel.
    pub fn good_at_all(&self) -> Result<Vec<GoodnessReport>, EggError> {
        (0..self.elements.len())
            .into_par_iter()
            .map(|i| self.goodness_test(i))
            .collect()
    }
}

/// Per-element goodness verdict with the span census and, when bad, the
/// first offending triple in index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodnessReport {
    pub element: usize,
    pub good: bool,
    /// elements-per-span → number of distinct spans with that count.
    pub span_counts: BTreeMap<u64, u64>,
    pub spans_tested: u64,
    pub counterexample: Option<(usize, usize, usize)>,
}

fn binom3(n: u64) -> u64 {
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

/// Validates candidate elements as an egg O(n,m,q): count, dimensions,
/// pairwise disjointness, the triple-span condition (exhaustive within
/// budget, else seeded sampling), and tangent existence at every element.
pub fn egg_validate(
    field: &Arc<FiniteField>,
    n: u32,
    m: u32,
    elements: Vec<Subspace>,
    opts: &EggCheckOptions,
) -> Result<Egg, EggError> {
    let q = field.q() as u64;
    let expected = q.pow(m) + 1;
    if elements.len() as u64 != expected {
        return Err(EggError::WrongCount { expected, got: elements.len() as u64 });
    }
    let vdim = (2 * n + m) as usize;
    for (index, el) in elements.iter().enumerate() {
        if el.vdim() != vdim || el.rank() != n as usize {
            return Err(EggError::WrongDim {
                index,
                expected: n as usize,
                got: el.rank(),
                vdim,
            });
        }
    }
    let count = elements.len();
    for i in 0..count {
        for j in i + 1..count {
            let stacked = elements[i].m.stack(&elements[j].m);
            if linalg::rank(field, &stacked) != 2 * n as usize {
                return Err(EggError::DisjointnessFailure(i, j));
            }
        }
    }
    let total = binom3(count as u64);
    let span_rank = 3 * n as usize;
    let check_triple = |i: usize, j: usize, k: usize| -> bool {
        let stacked = elements[i].m.stack(&elements[j].m).stack(&elements[k].m);
        linalg::rank(field, &stacked) == span_rank
    };
    let triple_check;
    if opts.full || total <= TRIPLE_BUDGET {
        let failure = (0..count)
            .into_par_iter()
            .filter_map(|i| {
                for j in i + 1..count {
                    for k in j + 1..count {
                        if !check_triple(i, j, k) {
                            return Some((i, j, k));
                        }
                    }
                }
                None
            })
            .min();
        if let Some((i, j, k)) = failure {
            return Err(EggError::TripleSpanFailure(i, j, k));
        }
        triple_check = CheckMode::Exhaustive { triples: total };
    } else {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(opts.seed);
        let samples: Vec<(usize, usize, usize)> = (0..TRIPLE_BUDGET)
            .map(|_| {
                loop {
                    let mut t = [
                        rng.gen_range(0..count),
                        rng.gen_range(0..count),
                        rng.gen_range(0..count),
                    ];
                    t.sort_unstable();
                    if t[0] < t[1] && t[1] < t[2] {
                        break (t[0], t[1], t[2]);
                    }
                }
            })
            .collect();
        let failure = samples
            .par_iter()
            .filter_map(|&(i, j, k)| if check_triple(i, j, k) { None } else { Some((i, j, k)) })
            .min();
        if let Some((i, j, k)) = failure {
            return Err(EggError::TripleSpanFailure(i, j, k));
        }
        triple_check = CheckMode::Sampled { seed: opts.seed, samples: TRIPLE_BUDGET, total };
    }
    let mut warnings = Vec::new();
    if field.is_even() && n != m && m != 2 * n {
        warnings.push(format!(
            "even-order egg parameters must satisfy n = m or m = 2n; got n={n}, m={m}"
        ));
    }
    let egg = Egg {
        field: Arc::clone(field),
        n,
        m,
        elements,
        warnings,
        triple_check,
        tangents: OnceLock::new(),
        ambient: OnceLock::new(),
        union: OnceLock::new(),
    };
    egg.tangents()?;
    Ok(egg)
}

/// Translation dual O*: the annihilators of the tangent spaces, revalidated
/// as an egg with the same parameters.
pub fn translation_dual(egg: &Egg, opts: &EggCheckOptions) -> Result<Egg, EggError> {
    if egg.field.is_even() && egg.n == egg.m {
        return Err(EggError::DualHypothesisFailed);
    }
    let taus = egg.tangents()?;
    let duals: Vec<Subspace> = taus.iter().map(|t| projgeom::annihilator(&egg.field, t)).collect();
    egg_validate(&egg.field, egg.n, egg.m, duals, opts)
}

// ---------------------------------------------------------------------------
// Classical instances over GF(q^n), represented through the extension tower
// so field reduction to GF(q) is coefficient surgery, not an isomorphism
// search.
// ---------------------------------------------------------------------------

/// Rank of a matrix with entries in the extension field.
fn ext_rank(ext: &FieldExt, rows: &[Vec<ExtElem>]) -> usize {
    let mut rows: Vec<Vec<ExtElem>> = rows.to_vec();
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let mut rank = 0usize;
    for c in 0..ncols {
        let Some(pr) = (rank..rows.len()).find(|&r| !ext.is_zero(&rows[r][c])) else {
            continue;
        };
        rows.swap(rank, pr);
        let inv = ext.inv(&rows[rank][c]).expect("nonzero pivot");
        for x in &mut rows[rank] {
            *x = ext.mul(x, &inv);
        }
        for r in rank + 1..rows.len() {
            if !ext.is_zero(&rows[r][c]) {
                let factor = rows[r][c].clone();
                for cc in 0..ncols {
                    let t = ext.mul(&factor, &rows[rank][cc]);
                    rows[r][cc] = ext.sub(&rows[r][cc], &t);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// First (b,c) in code order with x² + bx + c irreducible over the field.
fn irreducible_binary_quadratic(ext: &FieldExt) -> (ExtElem, ExtElem) {
    for b_code in 0..ext.order() {
        let b = ext.elem_of(b_code);
        for c_code in 0..ext.order() {
            let c = ext.elem_of(c_code);
            let has_root = ext.elements().any(|t| {
                let v = ext.add(&ext.add(&ext.mul(&t, &t), &ext.mul(&b, &t)), &c);
                ext.is_zero(&v)
            });
            if !has_root {
                return (b, c);
            }
        }
    }
    unreachable!("every finite field admits an irreducible quadratic")
}

/// Elliptic quadric ovoid of PG(3,Q): the zero set of
/// x₀x₁ + x₂² + b·x₂x₃ + c·x₃² with x² + bx + c irreducible.
/// Exactly Q²+1 points, no three collinear.
pub fn elliptic_quadric_ovoid(ext: &FieldExt) -> Vec<Vec<ExtElem>> {
    let (b, c) = irreducible_binary_quadratic(ext);
    let mut pts = Vec::with_capacity(ext.order() as usize * ext.order() as usize + 1);
    pts.push(vec![ext.zero(), ext.one(), ext.zero(), ext.zero()]);
    for x2_code in 0..ext.order() {
        let x2 = ext.elem_of(x2_code);
        for x3_code in 0..ext.order() {
            let x3 = ext.elem_of(x3_code);
            let g = ext.add(
                &ext.add(&ext.mul(&x2, &x2), &ext.mul(&b, &ext.mul(&x2, &x3))),
                &ext.mul(&c, &ext.mul(&x3, &x3)),
            );
            pts.push(vec![ext.one(), ext.neg(&g), x2.clone(), x3]);
        }
    }
    pts
}

/// Conic oval of PG(2,Q): (1, t, t²) for all t, plus (0,0,1).
pub fn conic_oval(ext: &FieldExt) -> Vec<Vec<ExtElem>> {
    let mut pts: Vec<Vec<ExtElem>> = (0..ext.order())
        .map(|t_code| {
            let t = ext.elem_of(t_code);
            vec![ext.one(), t.clone(), ext.mul(&t, &t)]
        })
        .collect();
    pts.push(vec![ext.zero(), ext.zero(), ext.one()]);
    pts
}

/// Checks that `pts` is a cap of the expected size: `expected` distinct
/// nonzero points with `vdim` coordinates, no three collinear.
pub fn validate_cap(
    ext: &FieldExt,
    pts: &[Vec<ExtElem>],
    vdim: usize,
    expected: u64,
) -> Result<(), EggError> {
    if pts.len() as u64 != expected {
        return Err(EggError::InputNotOvoid(format!(
            "expected {expected} points, got {}",
            pts.len()
        )));
    }
    for (i, p) in pts.iter().enumerate() {
        if p.len() != vdim {
            return Err(EggError::InputNotOvoid(format!("point {i} has {} coordinates", p.len())));
        }
        if p.iter().all(|x| ext.is_zero(x)) {
            return Err(EggError::InputNotOvoid(format!("point {i} is the zero vector")));
        }
    }
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if ext_rank(ext, &[pts[i].clone(), pts[j].clone()]) < 2 {
                return Err(EggError::InputNotOvoid(format!("points {i} and {j} coincide")));
            }
            for k in j + 1..pts.len() {
                if ext_rank(ext, &[pts[i].clone(), pts[j].clone(), pts[k].clone()]) < 3 {
                    return Err(EggError::InputNotOvoid(format!(
                        "points {i}, {j}, {k} are collinear"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Field reduction: each point of PG(3,q^n) (ovoid) or PG(2,q^n) (oval)
/// becomes an (n−1)-space of PG(4n−1,q) or PG(3n−1,q) by expanding
/// GF(q^n)-coordinates over a GF(q)-basis. The result is validated as an
/// egg O(n,2n,q) or a pseudo-oval O(n,n,q).
pub fn egg_from_field_reduction(
    ext: &FieldExt,
    pts: &[Vec<ExtElem>],
    opts: &EggCheckOptions,
) -> Result<Egg, EggError> {
    let vdim_ext = match pts.first() {
        Some(p) if p.len() == 3 || p.len() == 4 => p.len(),
        _ => {
            return Err(EggError::InputNotOvoid(
                "input must be points of PG(2,q^n) or PG(3,q^n)".into(),
            ))
        }
    };
    let big_q = ext.order();
    let expected = if vdim_ext == 4 { big_q * big_q + 1 } else { big_q + 1 };
    validate_cap(ext, pts, vdim_ext, expected)?;
    let n = ext.deg as u32;
    let m = if vdim_ext == 4 { 2 * n } else { n };
    let base = &ext.base;
    let vdim = vdim_ext * ext.deg;
    let elements: Vec<Subspace> = pts
        .iter()
        .map(|p| {
            // Row t is the expansion of (x^t)·p over the GF(q)-basis
            // 1, x, ..., x^{n-1} of GF(q^n).
            let rows: Vec<Vec<u32>> = (0..ext.deg)
                .map(|t| {
                    let mut basis_t = ext.zero();
                    basis_t[t] = 1;
                    let mut row = Vec::with_capacity(vdim);
                    for coord in p {
                        row.extend(ext.mul(&basis_t, coord));
                    }
                    row
                })
                .collect();
            Subspace::from_rows(base, vdim, &rows)
        })
        .collect();
    egg_validate(base, n, m, elements, opts)
}

/// The classical egg O(n, 2n, q) over GF(q) = GF(p^e): the field reduction
/// of the elliptic quadric ovoid of PG(3, qⁿ). For n = 1 this is the ovoid
/// itself viewed as an egg.
pub fn classical_egg(p: u64, e: u32, n: usize, opts: &EggCheckOptions) -> Result<Egg, EggError> {
    let base = FiniteField::new(p, e, None)?;
    let ext = FieldExt::search(base, n)?;
    let pts = elliptic_quadric_ovoid(&ext);
    egg_from_field_reduction(&ext, &pts, opts)
}
