//! Acceptance gate: one test per criterion, each printing a pass line with
//! its headline numbers. Run with `--nocapture` to see the details; the
//! harness itself shows one ok/FAILED line per criterion.

use std::collections::BTreeSet;
use std::time::Instant;

use once_cell::sync::Lazy;

use quadlab_core::conics::{classify, delta_frame, eta_configuration, goodness_pipeline, regular_line_witness};
use quadlab_core::egg::{classical_egg, Egg, EggCheckOptions};
use quadlab_core::flock::{
    first_nonsquare, flock_validate, kantor_knuth, linear_flock, linear_test, qclan_gq,
    semifield_test,
};
use quadlab_core::gf::FiniteField;
use quadlab_core::gq::{GqMode, GQOrder};
use quadlab_core::io::{render_json, Certificate};
use quadlab_core::projgeom::{meet, span_with_points};
use quadlab_core::suite::{run_suite, SuiteParams};
use quadlab_core::tgq::{build_t_model, TBuildOptions, TModel};

fn egg_of(p: u64, e: u32, n: usize) -> Egg {
    classical_egg(p, e, n, &EggCheckOptions::default()).expect("classical egg")
}

fn model_of(p: u64, e: u32, n: usize) -> TModel {
    build_t_model(egg_of(p, e, n), &TBuildOptions::default()).expect("model")
}

static T123: Lazy<TModel> = Lazy::new(|| {
    build_t_model(egg_of(3, 1, 1), &TBuildOptions { mode: GqMode::Full }).expect("model")
});
static T124: Lazy<TModel> = Lazy::new(|| model_of(2, 2, 1));
static T125: Lazy<TModel> = Lazy::new(|| model_of(5, 1, 1));
static T243: Lazy<TModel> = Lazy::new(|| model_of(3, 1, 2));

#[test]
fn a01_small_translation_model_has_order_3_9_with_exact_counts() {
    let start = Instant::now();
    let egg = egg_of(3, 1, 1);
    let model =
        build_t_model(egg, &TBuildOptions { mode: GqMode::Full }).expect("full axiom check");
    let elapsed = start.elapsed();
    assert_eq!(model.order, GQOrder { s: 3, t: 9 });
    assert_eq!(model.structure.v, 112);
    assert_eq!(model.structure.b, 280);
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}");
    println!(
        "acceptance 01 PASS — T(1,2,3) order (3,9), v=112, b=280, full axioms in {elapsed:?}"
    );
}

#[test]
fn a02_every_triad_of_the_small_model_has_exactly_four_centers() {
    let s = &T123.structure;
    let mut triads = 0u64;
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
                let centers = s.triad_centers(x, y, z).expect("triad").len();
                assert_eq!(centers, 4, "triad ({x},{y},{z}) has {centers} centers");
            }
        }
    }
    assert_eq!(triads, 90_720);
    println!("acceptance 02 PASS — all {triads} triads have exactly 4 centers");
}

#[test]
fn a03_infinity_is_coregular_in_both_desk_models() {
    let mut totals = Vec::new();
    for model in [&*T123, &*T243] {
        let report = model
            .structure
            .coregularity(model.order, model.infinity_index())
            .expect("coregularity");
        assert!(
            report.regular,
            "irregular line through infinity: {:?}",
            report.witness
        );
        let lines = model.egg.elements.len() as u64;
        let opposite = model.structure.b as u64 - 1 - (model.order.s + 1) * model.order.t;
        assert_eq!(report.pairs_checked, lines * opposite);
        totals.push(report.pairs_checked);
    }
    println!(
        "acceptance 03 PASS — (∞) coregular in T(1,2,3) and T(2,4,3); {} and {} line pairs",
        totals[0], totals[1]
    );
}

#[test]
fn a04_the_pseudo_ovoid_is_good_at_every_element() {
    let start = Instant::now();
    let egg = egg_of(3, 1, 2);
    let reports = egg.good_at_all().expect("goodness");
    let elapsed = start.elapsed();
    assert_eq!(reports.len(), 82);
    let mut spans = 0u64;
    for r in &reports {
        assert!(r.good, "element {} is not good: {:?}", r.element, r.counterexample);
        assert_eq!(r.spans_tested, 90);
        assert_eq!(r.span_counts.len(), 1);
        assert_eq!(r.span_counts.get(&10), Some(&90));
        spans += r.spans_tested;
    }
    // 82·90 span slots name each distinct span once per member, so there
    // are 738 spans of 10 elements — C(10,3) triples each, together all
    // C(82,3) = 88,560 triples of the egg.
    assert_eq!(spans / 10 * 120, 88_560);
    assert!(elapsed.as_secs() < 300, "took {elapsed:?}");
    println!(
        "acceptance 04 PASS — O(2,4,3) good at all 82 elements, 88560 triples of span width 10 in {elapsed:?}"
    );
}

#[test]
fn a05_the_lemma_suite_passes_on_the_pseudo_ovoid() {
    let params = SuiteParams { q: 3, n: 2, ..SuiteParams::default() };
    let report = run_suite("lemmas", &params).expect("suite");
    assert!(report.pass, "{}", report.render());
    let count = |check: &str, key: &str| -> u64 {
        let rec = report
            .records
            .iter()
            .find(|r| r.check == check)
            .unwrap_or_else(|| panic!("missing record {check}"));
        rec.counts[key]
    };
    assert!(count("pi0-conic-uniqueness", "tuples") >= 1000);
    assert_eq!(count("pi0-conic-uniqueness", "conics_per_tuple"), 1);
    assert!(count("segre-projectivity", "families") >= 100);
    assert_eq!(count("segre-projectivity", "planes_per_family"), 4);
    assert_eq!(count("family-element-set", "elements_per_family"), 4);
    assert_eq!(count("regulus-census", "members_per_regulus"), 4);
    assert!(count("pi0-set-structure", "sets") >= 10);
    assert_eq!(count("pi0-set-structure", "members_per_set"), 10);
    assert_eq!(count("alpha-linearity", "ordered_pairs"), 12);
    assert_eq!(count("alpha-linearity", "correspondences"), 12 * 81);
    assert_eq!(count("xi-star-flats", "points_per_flat"), 9);
    println!(
        "acceptance 05 PASS — lemma suite on O(2,4,3): {} checks, zero failures",
        report.records.len()
    );
}

#[test]
fn a06_pipeline_and_direct_goodness_agree_with_a_partition_certificate() {
    for model in [&*T123, &*T124, &*T125, &*T243] {
        let egg = &model.egg;
        let witness = regular_line_witness(model, 0).expect("witness");
        let frame = delta_frame(egg, None).expect("frame");
        let pipeline = goodness_pipeline(egg, &frame, &witness).expect("pipeline");
        let direct = egg.goodness_test(0).expect("direct");
        assert_eq!(
            pipeline.good_at_zero,
            direct.good,
            "verdicts differ at q={}",
            egg.field.q()
        );
        assert!(pipeline.good_at_zero);
    }

    // The slice spaces of the O(2,4,3) frame partition Φ about τ*₀: each
    // contains τ*₀, any two meet exactly in it, and together they cover Φ.
    let egg = &T243.egg;
    let f = egg.field.as_ref();
    let frame = delta_frame(egg, None).expect("frame");
    assert_eq!(frame.xis.len(), 4);
    let tau_points = frame.tau_star0.points(f).len() as u64;
    let phi_points: BTreeSet<Vec<u32>> = frame.phi.points(f).into_iter().collect();
    let mut covered: BTreeSet<Vec<u32>> = BTreeSet::new();
    for (a, xi) in frame.xis.iter().enumerate() {
        assert!(xi.contains(f, &frame.tau_star0));
        for other in frame.xis.iter().skip(a + 1) {
            assert_eq!(meet(f, xi, other), frame.tau_star0);
        }
        covered.extend(xi.points(f));
    }
    assert_eq!(covered, phi_points);
    let xi_points = frame.xis[0].points(f).len() as u64;
    let cert = Certificate {
        check: "sigma-star-partition".into(),
        instance: "O(2,4,3)".into(),
        counts: [
            ("spaces".to_string(), frame.xis.len() as u64),
            ("points_per_space".to_string(), xi_points),
            ("shared_points".to_string(), tau_points),
            ("ambient_points".to_string(), phi_points.len() as u64),
        ]
        .into_iter()
        .collect(),
        witnesses: vec![],
        pass: true,
    };
    let text = render_json(&cert).expect("render certificate");
    let back: Certificate = serde_json::from_str(&text).expect("certificate round-trip");
    assert_eq!(back.counts["spaces"], 4);
    assert!(back.pass);
    // Partition arithmetic recomputed from the certificate itself.
    assert_eq!(
        back.counts["spaces"] * (back.counts["points_per_space"] - back.counts["shared_points"]),
        back.counts["ambient_points"] - back.counts["shared_points"]
    );
    println!(
        "acceptance 06 PASS — pipeline = direct goodness on 4 instances; Σ* certificate: 4 spaces partition Φ about τ*₀"
    );
}

#[test]
fn a07_even_characteristic_model_is_classical_by_evidence() {
    let c = classify(&T124).expect("classification");
    assert_eq!(c.verdict, "classical (evidence suite)");
    let ev = c.evidence.as_ref().expect("evidence suite");
    assert_eq!(ev.sub_order, GQOrder { s: 4, t: 4 });
    assert_eq!(ev.sub_elements, 5);
    assert!(ev.sub_lines_regular);
    assert!(ev.full_lines_regular);
    assert!(ev.good_everywhere);
    let note = c.note.as_ref().expect("scope note");
    assert!(note.contains("out of scope"), "note: {note}");
    assert!(note.contains("Q(5, q)"), "note: {note}");
    println!(
        "acceptance 07 PASS — T(1,2,4): all lines regular, good everywhere, verdict \"{}\"",
        c.verdict
    );
}

#[test]
fn a08_even_characteristic_sets_share_a_kernel_point() {
    let egg = &T124.egg;
    let f = egg.field.as_ref();
    let frame = delta_frame(egg, None).expect("frame");
    let mut sets_checked = 0u64;
    for x in frame.tau_star0.points(f) {
        let gamma0 = span_with_points(f, &egg.elements[0], &[&x]);
        let partition =
            quadlab_core::conics::pi0_set_partition(egg, &gamma0).expect("partition");
        for set in &partition.sets {
            let kernel = set.kernel.as_ref().expect("kernel point");
            for e in 0..egg.elements.len() {
                let through = egg.tangent_space(e).contains_point(f, kernel);
                let member = set.elements.contains(&(e as u32));
                assert_eq!(
                    through, member,
                    "tangent space {e} through the kernel point disagrees with membership"
                );
            }
            sets_checked += 1;
        }
    }
    assert!(sets_checked >= 20, "only {sets_checked} sets");
    println!(
        "acceptance 08 PASS — {sets_checked} Π₀-sets of O(1,2,4) each match the tangent pencil through their kernel point"
    );
}

#[test]
fn a09_eta_spaces_behave_by_parity() {
    // Odd characteristic: the three η-spaces of a pair meet in dimension
    // n−1 (rank n). At least 100 pairs of O(2,4,3).
    let odd = &T243.egg;
    let count = odd.elements.len();
    let mut pairs = Vec::new();
    'outer: for i in 1..count {
        for j in i + 1..count {
            pairs.push((i, j));
            if pairs.len() == 120 {
                break 'outer;
            }
        }
    }
    assert!(pairs.len() >= 100);
    for &(i, j) in &pairs {
        let eta = eta_configuration(odd, i, j).expect("eta");
        assert!(!eta.even);
        let tm = eta.triple_meet.as_ref().expect("triple meet");
        assert_eq!(tm.rank(), 2, "pair ({i},{j})");
    }

    // Even characteristic: the η-spaces coincide and every nucleus lies on
    // the common space. Exhaustive over all pairs of O(1,2,4).
    let even = &T124.egg;
    let f = even.field.as_ref();
    let n = even.elements.len();
    let mut even_pairs = 0u64;
    for i in 1..n {
        for j in i + 1..n {
            let eta = eta_configuration(even, i, j).expect("eta");
            assert!(eta.even);
            let common = eta.common.as_ref().expect("common eta");
            assert!(!eta.nuclei.is_empty());
            for nu in &eta.nuclei {
                assert!(common.contains_point(f, nu), "pair ({i},{j})");
            }
            even_pairs += 1;
        }
    }
    assert_eq!(even_pairs, 120);
    println!(
        "acceptance 09 PASS — {} odd pairs with rank-2 triple meets; {even_pairs} even pairs with coincident η and interior nuclei",
        pairs.len()
    );
}

#[test]
fn a10_element_lines_are_maximal_axes_and_infinity_is_a_translation_point() {
    let model = &*T123;
    let s = model.order.s;
    for i in 0..model.egg.elements.len() {
        let symmetries = model.line_symmetries(i).expect("symmetries");
        assert_eq!(symmetries.len() as u64, s, "element line {i}");
        // Maximality by brute force: the full symmetry group about the
        // line is no larger.
        let line = model.element_line_index(i);
        let brute = model.structure.symmetry_group_about(line).expect("group");
        assert_eq!(brute.len() as u64, s, "element line {i}");
    }
    let verdict = model
        .translation_point_check(model.infinity_index())
        .expect("translation point");
    assert!(verdict.is_translation_point, "witness: {:?}", verdict.witness);
    assert_eq!(verdict.axes.len() as u64, model.order.t + 1);
    assert!(verdict.axes.iter().all(|&(_, o)| o == s));
    // The symmetry directions generate the whole translation group, which
    // has rank 2n+m over the field.
    assert_eq!(model.symmetry_span_rank(), (2 * model.egg.n + model.egg.m) as usize);
    println!(
        "acceptance 10 PASS — 10 axes of order 3, (∞) is a translation point, directions span the full group"
    );
}

#[test]
fn a11_flocks_validate_classify_and_build_the_coset_quadrangle() {
    let start = Instant::now();
    for q in [3u32, 5, 9] {
        let (p, e) = if q == 9 { (3, 2) } else { (q as u64, 1) };
        let f = FiniteField::new(p, e, None).expect("field");
        let planes = linear_flock(&f).expect("linear planes");
        let fl = flock_validate(&f, &planes).expect("valid flock");
        assert!(linear_test(&fl).linear, "q={q}");
        assert!(semifield_test(&fl).expect("semifield test").semifield, "q={q}");
    }

    let f9 = FiniteField::new(3, 2, None).expect("field");
    let m = first_nonsquare(&f9).expect("nonsquare");
    let planes = kantor_knuth(&f9, 1, m).expect("planes");
    let kk = flock_validate(&f9, &planes).expect("valid flock");
    assert!(semifield_test(&kk).expect("semifield test").semifield);
    assert!(!linear_test(&kk).linear);

    let f3 = FiniteField::new(3, 1, None).expect("field");
    let planes = linear_flock(&f3).expect("linear planes");
    let fl = flock_validate(&f3, &planes).expect("valid flock");
    let gq = qclan_gq(&fl).expect("coset quadrangle");
    assert_eq!(gq.order, GQOrder { s: 9, t: 3 });
    assert_eq!(gq.structure.v, 280);
    assert_eq!(gq.structure.b, 112);
    assert_eq!(gq.opposite_count, 243);
    assert_eq!(gq.group_order, 243);
    assert!(gq.elations_exhaustive);
    assert_eq!(gq.elations_checked, 242);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 120, "took {elapsed:?}");
    println!(
        "acceptance 11 PASS — linear flocks at q=3,5,9; twisted flock semifield-not-linear; coset GQ (9,3) with a regular elation action in {elapsed:?}"
    );
}

#[test]
fn a12_lemma_suite_reports_are_byte_identical() {
    let params = SuiteParams { q: 3, n: 2, ..SuiteParams::default() };
    let first = run_suite("lemmas", &params).expect("suite").render();
    let second = run_suite("lemmas", &params).expect("suite").render();
    assert!(!first.is_empty());
    assert_eq!(first, second);
    println!(
        "acceptance 12 PASS — two lemma-suite runs render identical {}-byte reports",
        first.len()
    );
}
