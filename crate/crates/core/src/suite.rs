//! Named check bundles: `smoke`, `lemmas`, and `classify`.
//!
//! A suite builds its instance from (q, n), runs a fixed list of checks in
//! declaration order, and returns a [`RunReport`]. Failures inside a check
//! become failing records with an error witness; only instance construction
//! problems abort the run. All sampling is ChaCha-seeded, so a suite is a
//! pure function of (name, q, n, seed, full) and its report renders
//! byte-identically across runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::conics::{
    alpha_linearity, big_pi0_conic, classify, conic_census, delta_frame, eta_configuration,
    goodness_pipeline, parallel_class_tangents, pi0_conic_through, pi0_set_conic_closure,
    pi0_set_partition, regular_line_witness, regulus_census, segre_family, xi_star_flat,
    z_projection_census, ConicsError,
};
use crate::egg::{classical_egg, Egg, EggCheckOptions, EggError};
use crate::gq::{GqError, GqMode};
use crate::io::FieldSpec;
use crate::projgeom;
use crate::report::{CheckRecord, RunReport};
use crate::tgq::{build_t_model, TBuildOptions, TModel, TgqError};

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("unknown suite `{0}`; expected smoke, lemmas, or classify")]
    UnknownSuite(String),
    #[error("q = {0} is not a prime power")]
    NotPrimePower(u32),
    #[error("n = {0} is out of the supported desk-scale range 1..=2")]
    UnsupportedN(u32),
    #[error(transparent)]
    Egg(#[from] EggError),
    #[error(transparent)]
    Tgq(#[from] TgqError),
    #[error(transparent)]
    Conics(#[from] ConicsError),
    #[error(transparent)]
    Gq(#[from] GqError),
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteParams {
    pub q: u32,
    pub n: u32,
    pub seed: u64,
    /// Lift sampling budgets to exhaustive sweeps.
    pub full: bool,
    /// Attach wall-clock times to records (breaks byte-identity on purpose).
    pub timings: bool,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams { q: 3, n: 1, seed: 0, full: false, timings: false }
    }
}

pub fn run_suite(name: &str, params: &SuiteParams) -> Result<RunReport, SuiteError> {
    match name {
        "smoke" => smoke(params),
        "lemmas" => lemmas(params),
        "classify" => classify_suite(params),
        other => Err(SuiteError::UnknownSuite(other.to_string())),
    }
}

/// Splits a prime power q = p^e.
pub fn factor_prime_power(q: u32) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    let q = q as u64;
    while p * p <= q {
        if q % p == 0 {
            let mut rest = q;
            let mut e = 0u32;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            return (rest == 1).then_some((p, e));
        }
        p += 1;
    }
    Some((q, 1))
}

fn instance(params: &SuiteParams) -> Result<Egg, SuiteError> {
    let (p, e) = factor_prime_power(params.q).ok_or(SuiteError::NotPrimePower(params.q))?;
    if !(1..=2).contains(&params.n) {
        return Err(SuiteError::UnsupportedN(params.n));
    }
    Ok(classical_egg(p, e, params.n as usize, &EggCheckOptions::default())?)
}

fn egg_label(egg: &Egg) -> String {
    format!("O({},{},{})", egg.n, egg.m, egg.field.q())
}

fn model_label(model: &TModel) -> String {
    format!("T({},{},{})", model.egg.n, model.egg.m, model.egg.field.q())
}

/// Converts a check body's error into a failing record with a witness.
fn guard<E: std::fmt::Display>(
    fallback: CheckRecord,
    outcome: Result<CheckRecord, E>,
) -> CheckRecord {
    match outcome {
        Ok(rec) => rec,
        Err(e) => fallback.outcome(false).witness(json!({ "error": e.to_string() })),
    }
}

/// Draws `want` distinct indices below `n` (all of them when `want >= n`).
fn sample_indices(rng: &mut ChaCha8Rng, n: usize, want: usize) -> Vec<usize> {
    if want >= n {
        return (0..n).collect();
    }
    let mut picked = std::collections::BTreeSet::new();
    while picked.len() < want {
        picked.insert(rng.gen_range(0..n));
    }
    picked.into_iter().collect()
}

// ---------------------------------------------------------------------------
// smoke: q = 3, n = 1 end to end
// ---------------------------------------------------------------------------

fn smoke(params: &SuiteParams) -> Result<RunReport, SuiteError> {
    let egg = classical_egg(3, 1, 1, &EggCheckOptions::default())?;
    let field_spec = FieldSpec::of(&egg.field);
    let elements = egg.elements.len() as u64;
    let model = build_t_model(egg, &TBuildOptions { mode: GqMode::Full })?;
    let command = format!("suite smoke --seed {}", params.seed);
    let mut report =
        RunReport::new(&command, &model_label(&model), params.seed).with_field(field_spec);

    report.push_timed(params.timings, || {
        CheckRecord::full("egg-axioms")
            .count("elements", elements)
            .count("n", model.egg.n as u64)
            .count("m", model.egg.m as u64)
    });

    report.push_timed(params.timings, || {
        CheckRecord::full("model-axioms")
            .count("v", model.structure.v as u64)
            .count("b", model.structure.b as u64)
            .count("s", model.order.s)
            .count("t", model.order.t)
            .outcome(model.structure.v == 112 && model.structure.b == 280)
    });

    report.push_timed(params.timings, || {
        guard(
            CheckRecord::full("triad-centers"),
            (|| -> Result<CheckRecord, GqError> {
                let s = &model.structure;
                let want = model.order.s + 1;
                let mut triads = 0u64;
                let mut bad = None;
                for x in 0..s.v as u32 {
                    for y in x + 1..s.v as u32 {
                        if s.collinear(x, y) {
                            continue;
                        }
                        for z in y + 1..s.v as u32 {
                            if s.collinear(x, z) || s.collinear(y, z) {
                                continue;
                            }
                            triads += 1;
                            let centers = s.triad_centers(x, y, z)?.len() as u64;
                            if centers != want && bad.is_none() {
                                bad = Some((x, y, z, centers));
                            }
                        }
                    }
                }
                let mut rec = CheckRecord::full("triad-centers")
                    .count("triads", triads)
                    .count("centers_each", want);
                if let Some((x, y, z, got)) = bad {
                    rec = rec
                        .outcome(false)
                        .witness(json!({ "triad": [x, y, z], "centers": got }));
                }
                Ok(rec)
            })(),
        )
    });

    report.push_timed(params.timings, || {
        guard(
            CheckRecord::full("coregularity-at-infinity"),
            model.structure.coregularity(model.order, model.infinity_index()).map(|r| {
                CheckRecord::full("coregularity-at-infinity")
                    .count("lines", model.egg.elements.len() as u64)
                    .count("pairs_checked", r.pairs_checked)
                    .outcome(r.regular)
            }),
        )
    });

    report.push_timed(params.timings, || {
        guard(
            CheckRecord::full("goodness-direct"),
            (|| -> Result<CheckRecord, EggError> {
                let reports = model.egg.good_at_all()?;
                let all_good = reports.iter().all(|r| r.good);
                let spans: u64 = reports.iter().map(|r| r.spans_tested).sum();
                Ok(CheckRecord::full("goodness-direct")
                    .count("elements", reports.len() as u64)
                    .count("spans_tested", spans)
                    .outcome(all_good))
            })(),
        )
    });

    report.push_timed(params.timings, || {
        guard(
            CheckRecord::full("classification"),
            classify(&model).map(|c| {
                CheckRecord::full("classification")
                    .count("dual_elements", c.dual_elements.unwrap_or(0))
                    .witness(json!({ "verdict": c.verdict }))
                    .outcome(c.odd && c.pipeline.good_at_zero)
            }),
        )
    });

    Ok(report)
}

// ---------------------------------------------------------------------------
// lemmas: the conic/Segre/regulus checks on O(n, 2n, q)
// ---------------------------------------------------------------------------

fn lemmas(params: &SuiteParams) -> Result<RunReport, SuiteError> {
    let egg = instance(params)?;
    let f = egg.field.clone();
    let frame = delta_frame(&egg, None)?;
    let command = format!(
        "suite lemmas --q {} --n {} --seed {}{}",
        params.q,
        params.n,
        params.seed,
        if params.full { " --full" } else { "" }
    );
    let mut report =
        RunReport::new(&command, &egg_label(&egg), params.seed).with_field(FieldSpec::of(&f));
    let nonzero = egg.elements.len() - 1;
    let qn = (f.q() as u64).pow(egg.n);

    // Unique Π₀-conic per (i, j, 0, s) tuple, cross-checked by plane census.
    report.push_timed(params.timings, || {
        let pi0_points = egg.elements[0].points(&f);
        let mut tuples: Vec<(usize, usize, usize)> = Vec::new();
        for i in 1..=nonzero {
            for j in 1..=nonzero {
                if i == j {
                    continue;
                }
                for s_idx in 0..pi0_points.len() {
                    tuples.push((i, j, s_idx));
                }
            }
        }
        let want = if params.full { tuples.len() } else { 1000 };
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let picked = sample_indices(&mut rng, tuples.len(), want);
        let exhaustive = picked.len() == tuples.len();
        let base = if exhaustive {
            CheckRecord::full("pi0-conic-uniqueness")
        } else {
            CheckRecord::sampled("pi0-conic-uniqueness", params.seed)
        };
        let outcome: Result<(), ConicsError> = picked
            .par_iter()
            .try_for_each(|&idx| {
                let (i, j, s_idx) = tuples[idx];
                let s = &pi0_points[s_idx];
                let pc = pi0_conic_through(&egg, i, j, 0, s)?;
                let census = conic_census(&egg, i, j, s)?;
                let unique = census.conics.len() == 1
                    && census.conics[0].elements == pc.elements
                    && census.conics[0].points == pc.points;
                if unique {
                    Ok(())
                } else {
                    Err(ConicsError::PipelineFinding(format!(
                        "census of ({i},{j},s#{s_idx}) found {} conics",
                        census.conics.len()
                    )))
                }
            });
        guard(
            base.clone().count("tuples", picked.len() as u64),
            outcome.map(|()| {
                base.count("tuples", picked.len() as u64).count("conics_per_tuple", 1)
            }),
        )
    });

    // Segre families: per-pair projectivities and the q+1-element V-set.
    let mut family_pairs: Vec<(usize, usize)> = Vec::new();
    for i in 1..=nonzero {
        for j in i + 1..=nonzero {
            family_pairs.push((i, j));
        }
    }
    {
        let want = if params.full { family_pairs.len() } else { 100 };
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(1));
        let picked = sample_indices(&mut rng, family_pairs.len(), want);
        let exhaustive = picked.len() == family_pairs.len();
        let families: Result<Vec<_>, ConicsError> = picked
            .par_iter()
            .map(|&idx| {
                let (i, j) = family_pairs[idx];
                segre_family(&egg, i, j)
            })
            .collect();
        let mode = |check: &str| {
            if exhaustive {
                CheckRecord::full(check)
            } else {
                CheckRecord::sampled(check, params.seed)
            }
        };
        match families {
            Ok(fams) => {
                let planes = fams.first().map_or(0, |fam| fam.conics.len() as u64);
                let pairs: u64 = fams.iter().map(|fam| fam.pairs_checked).sum();
                let corr: u64 = fams.iter().map(|fam| fam.correspondences_checked).sum();
                report.push_timed(params.timings, || {
                    mode("segre-projectivity")
                        .count("families", fams.len() as u64)
                        .count("planes_per_family", planes)
                        .count("plane_pairs", pairs)
                        .count("correspondences", corr)
                });
                let v_ok = fams.iter().all(|fam| fam.v_elements.len() as u64 == f.q() as u64 + 1);
                report.push_timed(params.timings, || {
                    mode("family-element-set")
                        .count("families", fams.len() as u64)
                        .count("elements_per_family", f.q() as u64 + 1)
                        .outcome(v_ok)
                });
            }
            Err(e) => {
                let witness = json!({ "error": e.to_string() });
                report.push_timed(params.timings, || {
                    mode("segre-projectivity").outcome(false).witness(witness.clone())
                });
                report.push_timed(params.timings, || {
                    mode("family-element-set").outcome(false).witness(witness.clone())
                });
            }
        }
    }

    // η-configuration: parity-specific coincidence/triple-meet structure.
    report.push_timed(params.timings, || {
        let want = if params.full { family_pairs.len() } else { 100 };
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(2));
        let picked = sample_indices(&mut rng, family_pairs.len(), want);
        let exhaustive = picked.len() == family_pairs.len();
        let base = if exhaustive {
            CheckRecord::full("eta-configuration")
        } else {
            CheckRecord::sampled("eta-configuration", params.seed)
        };
        let n = egg.n as usize;
        let outcome: Result<u64, ConicsError> = picked
            .par_iter()
            .map(|&idx| {
                let (i, j) = family_pairs[idx];
                let eta = eta_configuration(&egg, i, j)?;
                if eta.even {
                    let common = eta.common.as_ref().ok_or(ConicsError::PipelineFinding(
                        format!("no common η trace for pair ({i},{j})"),
                    ))?;
                    for nu in &eta.nuclei {
                        if !common.contains_point(&f, nu) {
                            return Err(ConicsError::PipelineFinding(format!(
                                "a nucleus of pair ({i},{j}) escapes the common η"
                            )));
                        }
                    }
                    Ok(eta.nuclei.len() as u64)
                } else {
                    let meet = eta.triple_meet.as_ref().ok_or(ConicsError::PipelineFinding(
                        format!("no triple meet for pair ({i},{j})"),
                    ))?;
                    if meet.rank() != n {
                        return Err(ConicsError::PipelineFinding(format!(
                            "triple meet of pair ({i},{j}) has rank {}",
                            meet.rank()
                        )));
                    }
                    Ok(0)
                }
            })
            .sum();
        guard(
            base.clone().count("pairs", picked.len() as u64),
            outcome.map(|nuclei| {
                let rec = base.count("pairs", picked.len() as u64);
                if f.is_even() {
                    rec.count("nuclei", nuclei)
                } else {
                    rec.count("triple_meet_dim", egg.n as u64 - 1)
                }
            }),
        )
    });

    // Π₀-conics at family width: the q+1 covered elements, each tangent
    // trace of dimension 2n−1 (the construction itself verifies the rank).
    report.push_timed(params.timings, || {
        let want = if params.full { family_pairs.len() } else { 20 };
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(3));
        let picked = sample_indices(&mut rng, family_pairs.len(), want);
        let exhaustive = picked.len() == family_pairs.len();
        let base = if exhaustive {
            CheckRecord::full("big-conic-tangents")
        } else {
            CheckRecord::sampled("big-conic-tangents", params.seed)
        };
        let width = f.q() as u64 + 1;
        let outcome: Result<(), ConicsError> = picked.par_iter().try_for_each(|&idx| {
            let (i, j) = family_pairs[idx];
            let big = big_pi0_conic(&egg, i, j)?;
            if big.elements.len() as u64 != width || big.tangent_spaces.len() as u64 != width {
                return Err(ConicsError::PipelineFinding(format!(
                    "big conic of ({i},{j}) holds {} elements",
                    big.elements.len()
                )));
            }
            Ok(())
        });
        guard(
            base.clone().count("pairs", picked.len() as u64),
            outcome.map(|()| {
                base.count("pairs", picked.len() as u64).count("elements_per_conic", width)
            }),
        )
    });

    // Reguli of star pairs: q stars and one trace each.
    report.push_timed(params.timings, || {
        guard(
            CheckRecord::full("regulus-census"),
            regulus_census(&egg, &frame).map(|c| {
                CheckRecord::full("regulus-census")
                    .count("pairs", c.pairs)
                    .count("members_per_regulus", c.members_per_regulus)
            }),
        )
    });

    // Π₀-set partitions: member counts, pairwise γ meets, conic closure.
    let tau_points = frame.tau_star0.points(&f);
    let gamma_budget = if params.full { tau_points.len() } else { 2.min(tau_points.len()) };
    let mut first_partition = None;
    report.push_timed(params.timings, || {
        guard(
            CheckRecord::full("pi0-set-structure"),
            (|| -> Result<CheckRecord, ConicsError> {
                let mut sets = 0u64;
                let mut closures = 0u64;
                for x in tau_points.iter().take(gamma_budget) {
                    let gamma0 = projgeom::span_with_points(&f, &egg.elements[0], &[x]);
                    let partition = pi0_set_partition(&egg, &gamma0)?;
                    for set in &partition.sets {
                        if set.elements.len() as u64 != qn + 1 {
                            return Err(ConicsError::PipelineFinding(format!(
                                "a Π₀-set holds {} members",
                                set.elements.len()
                            )));
                        }
                        closures += pi0_set_conic_closure(&egg, set)?;
                        sets += 1;
                    }
                    if first_partition.is_none() {
                        first_partition = Some(partition);
                    }
                }
                Ok(CheckRecord::full("pi0-set-structure")
                    .count("gammas", gamma_budget as u64)
                    .count("sets", sets)
                    .count("members_per_set", qn + 1)
                    .count("closure_pairs", closures))
            })(),
        )
    });

    // Even characteristic: every Π₀-set's γ's share a kernel point whose
    // tangent spaces are exactly those of the set.
    if f.is_even() {
        report.push_timed(params.timings, || {
            guard(
                CheckRecord::full("kernel-point"),
                (|| -> Result<CheckRecord, ConicsError> {
                    let mut sets_checked = 0u64;
                    for x in &tau_points {
                        let gamma0 = projgeom::span_with_points(&f, &egg.elements[0], &[x]);
                        let partition = pi0_set_partition(&egg, &gamma0)?;
                        for set in &partition.sets {
                            let kp = set.kernel.as_ref().ok_or_else(|| {
                                ConicsError::PipelineFinding(
                                    "a Π₀-set has no kernel point in even characteristic"
                                        .into(),
                                )
                            })?;
                            for e in 0..egg.elements.len() {
                                let through =
                                    egg.tangent_space(e).contains_point(&f, kp);
                                let member = set.elements.contains(&(e as u32));
                                if through != member {
                                    return Err(ConicsError::PipelineFinding(format!(
                                        "tangent space {e} disagrees with membership at the kernel point"
                                    )));
                                }
                            }
                            sets_checked += 1;
                        }
                    }
                    Ok(CheckRecord::full("kernel-point")
                        .count("gammas", tau_points.len() as u64)
                        .count("sets", sets_checked))
                })(),
            )
        });
    }

    // Z-point conics project to full slice lines.
    report.push_timed(params.timings, || {
        let budget = if params.full { None } else { Some(150) };
        let base = if params.full {
            CheckRecord::full("z-projection")
        } else {
            CheckRecord::sampled("z-projection", params.seed)
        };
        guard(
            base.clone(),
            (|| -> Result<CheckRecord, ConicsError> {
                let mut pairs = 0u64;
                let mut zs = 0u64;
                for xi in 0..frame.xis.len() {
                    let census = z_projection_census(&egg, &frame, xi, budget)?;
                    pairs += census.pairs_checked;
                    zs = census.z_count;
                }
                Ok(base
                    .clone()
                    .count("slices", frame.xis.len() as u64)
                    .count("z_points_per_slice", zs)
                    .count("pairs", pairs))
            })(),
        )
    });

    // Slice-to-slice star correspondences are linear projectivities.
    report.push_timed(params.timings, || {
        guard(
            CheckRecord::full("alpha-linearity"),
            (|| -> Result<CheckRecord, ConicsError> {
                let slices = frame.xis.len();
                let mut pairs = 0u64;
                let mut verified = 0u64;
                let mut all_linear = true;
                let mut infinity_ok = true;
                for a in 0..slices {
                    for b in 0..slices {
                        if a == b {
                            continue;
                        }
                        let rep = alpha_linearity(&egg, &frame, a, b)?;
                        pairs += 1;
                        verified += rep.verified;
                        all_linear &= rep.linear && rep.automorphism.is_none();
                        infinity_ok &= rep.infinity_ok;
                    }
                }
                Ok(CheckRecord::full("alpha-linearity")
                    .count("ordered_pairs", pairs)
                    .count("correspondences", verified)
                    .outcome(all_linear && infinity_ok))
            })(),
        )
    });

    // Per-direction parallel classes name a single tangent space.
    report.push_timed(params.timings, || {
        guard(
            CheckRecord::full("parallel-class-tangents"),
            (|| -> Result<CheckRecord, ConicsError> {
                let mut classes = 0u64;
                let mut lines = 0u64;
                for xi in 0..frame.xis.len() {
                    let rep = parallel_class_tangents(&egg, &frame, xi)?;
                    classes += rep.classes.len() as u64;
                    lines += rep.lines_checked;
                }
                Ok(CheckRecord::full("parallel-class-tangents")
                    .count("slices", frame.xis.len() as u64)
                    .count("classes", classes)
                    .count("lines", lines))
            })(),
        )
    });

    // Π₀-set slice pictures are affine flats with qⁿ points.
    report.push_timed(params.timings, || {
        guard(
            CheckRecord::full("xi-star-flats"),
            (|| -> Result<CheckRecord, ConicsError> {
                let partition = first_partition.as_ref().ok_or_else(|| {
                    ConicsError::PipelineFinding(
                        "no Π₀-set partition available for the flat check".into(),
                    )
                })?;
                let mut flats = 0u64;
                for set in &partition.sets {
                    for xi in 0..frame.xis.len() {
                        let rep = xi_star_flat(&egg, &frame, set, xi)?;
                        if rep.points.len() as u64 != qn {
                            return Err(ConicsError::PipelineFinding(format!(
                                "a slice picture holds {} points",
                                rep.points.len()
                            )));
                        }
                        flats += 1;
                    }
                }
                Ok(CheckRecord::full("xi-star-flats")
                    .count("flats", flats)
                    .count("points_per_flat", qn))
            })(),
        )
    });

    Ok(report)
}

// ---------------------------------------------------------------------------
// classify: witness, staged pipeline, and the parity verdict
// ---------------------------------------------------------------------------

fn classify_suite(params: &SuiteParams) -> Result<RunReport, SuiteError> {
    let egg = instance(params)?;
    let field_spec = FieldSpec::of(&egg.field);
    let model = build_t_model(egg, &TBuildOptions { mode: GqMode::Auto { seed: params.seed } })?;
    let command = format!(
        "suite classify --q {} --n {} --seed {}",
        params.q, params.n, params.seed
    );
    let mut report =
        RunReport::new(&command, &model_label(&model), params.seed).with_field(field_spec);

    report.push_timed(params.timings, || {
        CheckRecord::full("model-axioms")
            .count("v", model.structure.v as u64)
            .count("b", model.structure.b as u64)
            .count("s", model.order.s)
            .count("t", model.order.t)
    });

    let witness = match regular_line_witness(&model, 0) {
        Ok(w) => {
            report.push_timed(params.timings, || {
                CheckRecord::full("regular-line-witness")
                    .count("line", w.line as u64)
                    .count("pairs_checked", w.report.pairs_checked)
            });
            Some(w)
        }
        Err(e) => {
            report.push_timed(params.timings, || {
                CheckRecord::full("regular-line-witness")
                    .outcome(false)
                    .witness(json!({ "error": e.to_string() }))
            });
            None
        }
    };

    if let Some(w) = witness {
        let frame = delta_frame(&model.egg, None)?;
        report.push_timed(params.timings, || {
            guard(
                CheckRecord::full("goodness-pipeline"),
                goodness_pipeline(&model.egg, &frame, &w).map(|p| {
                    CheckRecord::full("goodness-pipeline")
                        .count("gammas", p.gammas)
                        .count("sets_per_gamma", p.sets_per_gamma)
                        .count("pair_spans", p.pair_spans_checked)
                        .count("elements_per_span", p.elements_per_span)
                        .count("eta_classes", p.eta_classes)
                        .count("gammas_per_class", p.gammas_per_class)
                        .count("slices", p.slices_checked)
                        .count("directions", p.directions_matched)
                        .count("pairs_covered", p.pairs_covered)
                        .outcome(p.good_at_zero)
                }),
            )
        });
    }

    report.push_timed(params.timings, || {
        guard(
            CheckRecord::full("classification"),
            classify(&model).map(|c| {
                let mut rec = CheckRecord::full("classification")
                    .count("s", c.order.s)
                    .count("t", c.order.t)
                    .witness(json!({ "verdict": c.verdict }));
                if let Some(n) = &c.note {
                    rec = rec.witness(json!({ "note": n }));
                }
                if let Some(d) = c.dual_elements {
                    rec = rec.count("dual_elements", d);
                }
                if let Some(ev) = &c.evidence {
                    rec = rec
                        .count("sub_order_s", ev.sub_order.s)
                        .count("sub_elements", ev.sub_elements)
                        .outcome(
                            ev.sub_lines_regular
                                && ev.full_lines_regular
                                && ev.good_everywhere,
                        );
                }
                rec
            }),
        )
    });

    Ok(report)
}
