//! Argument parsing and command dispatch for the `quadlab` binary.
//!
//! Every command builds a [`RunReport`] and prints it as a text summary or,
//! with `--json`, as the full JSON document. Exit codes: 0 all checks passed,
//! 1 a check produced a finding, 2 usage or input error. Malformed input
//! files are reported as errors, never panics.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde_json::json;

use quadlab_core::conics::{
    alpha_linearity, classify, conic_census, delta_frame, eta_configuration, goodness_pipeline,
    pi0_conic_through, pi0_set_partition, regular_line_witness, regulus_census, segre_family,
};
use quadlab_core::egg::{classical_egg, translation_dual, Egg, EggCheckOptions};
use quadlab_core::flock::{
    first_nonsquare, flock_validate, kantor_knuth, linear_test, qclan_gq, semifield_test, Flock,
};
use quadlab_core::gf::FiniteField;
use quadlab_core::gq::{gq_check, GqMode, IncidenceStructure, RegularityReport};
use quadlab_core::io::{read_json, write_json, EggFile, FieldSpec, FlockFile, IncidenceFile, IoError};
use quadlab_core::projgeom::span_with_points;
use quadlab_core::report::{CheckRecord, RunReport};
use quadlab_core::suite::{factor_prime_power, run_suite, SuiteParams};
use quadlab_core::tgq::{build_t_model, TBuildOptions, TModel};

#[derive(Parser)]
#[command(
    name = "quadlab",
    version,
    about = "Exact-arithmetic workbench for eggs, translation generalized quadrangles, and flocks"
)]
struct Cli {
    #[command(subcommand)]
    noun: Noun,
    #[command(flatten)]
    globals: Globals,
}

#[derive(Args, Clone)]
struct Globals {
    /// Emit the full JSON report instead of the text summary.
    #[arg(long, global = true)]
    json: bool,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Run exhaustively where a check would otherwise sample.
    #[arg(long, global = true)]
    full: bool,
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Attach wall-clock times to check records.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Noun {
    /// Egg and pseudo-ovoid commands.
    #[command(subcommand)]
    Egg(EggCmd),
    /// Generalized-quadrangle commands on incidence files and models.
    #[command(subcommand)]
    Gq(GqCmd),
    /// Conic, Segre, Π₀-set, and goodness-pipeline commands.
    #[command(subcommand)]
    Conics(ConicsCmd),
    /// Flock and q-clan commands.
    #[command(subcommand)]
    Flock(FlockCmd),
    /// Named check bundles.
    #[command(subcommand)]
    Suite(SuiteCmd),
}

#[derive(Subcommand)]
enum EggCmd {
    /// Check the egg axioms of a stored element set.
    Validate {
        #[arg(long)]
        egg: PathBuf,
    },
    /// Compute and cross-check the tangent spaces.
    Tangents {
        #[arg(long)]
        egg: PathBuf,
    },
    /// Test goodness at one element or at all of them.
    Good {
        #[arg(long)]
        egg: PathBuf,
        #[arg(long)]
        element: Option<usize>,
    },
    /// Build the translation dual from the tangent spaces.
    Dual {
        #[arg(long)]
        egg: PathBuf,
        /// Write the dual egg as a JSON file.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Field-reduce the elliptic quadric ovoid of PG(3, qⁿ) to O(n, 2n, q).
    FromOvoid {
        #[arg(long)]
        q: u32,
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// Write the egg as a JSON file.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GqCmd {
    /// Verify the quadrangle axioms and determine the order.
    Check {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Perp and double perp of one or more points.
    Perps {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        points: Vec<u32>,
    },
    /// Regularity of a point, line, or noncollinear/nonconcurrent pair.
    Regularity {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        point: Option<u32>,
        #[arg(long)]
        line: Option<u32>,
        /// Noncollinear point pair "x,y".
        #[arg(long)]
        pair: Option<String>,
        /// Nonconcurrent line pair "l,m".
        #[arg(long)]
        line_pair: Option<String>,
    },
    /// Centers of a triad of pairwise noncollinear points.
    Triads {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        points: Vec<u32>,
    },
    /// The grid on a regular pair of nonconcurrent lines.
    Grid {
        #[arg(long = "in")]
        input: PathBuf,
        /// Nonconcurrent line pair "l,m".
        #[arg(long, required = true)]
        lines: String,
        /// Write the grid as an incidence JSON file.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// The full group of symmetries about a line.
    Symmetries {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        line: u32,
    },
    /// Build the translation model T(O) of an egg.
    BuildTq {
        #[arg(long)]
        egg: PathBuf,
        /// Write the model as an incidence JSON file.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Check whether a point of T(O) is a translation point.
    TranslationPoint {
        #[arg(long)]
        egg: PathBuf,
        /// Point index; defaults to the point at infinity.
        #[arg(long)]
        point: Option<u32>,
    },
    /// Symmetries of T(O) about the line over one egg element.
    Axes {
        #[arg(long)]
        egg: PathBuf,
        #[arg(long)]
        element: usize,
    },
}

#[derive(Subcommand)]
enum ConicsCmd {
    /// The unique conic through base points on three elements.
    Conic {
        #[arg(long)]
        egg: PathBuf,
        #[arg(long, default_value_t = 1)]
        i: usize,
        #[arg(long, default_value_t = 2)]
        j: usize,
        #[arg(long, default_value_t = 0)]
        k: usize,
        /// Index of the base point within element k.
        #[arg(long, default_value_t = 0)]
        point: usize,
    },
    /// The Segre family of a pair of elements and its projectivities.
    Family {
        #[arg(long)]
        egg: PathBuf,
        #[arg(long, default_value_t = 1)]
        i: usize,
        #[arg(long, default_value_t = 2)]
        j: usize,
    },
    /// The η-spaces of a pair: coincidence and nuclei (even q) or the
    /// triple meet (odd q).
    Eta {
        #[arg(long)]
        egg: PathBuf,
        #[arg(long, default_value_t = 1)]
        i: usize,
        #[arg(long, default_value_t = 2)]
        j: usize,
    },
    /// The Π₀-set partition attached to one direction of τ*₀.
    Pi0set {
        #[arg(long)]
        egg: PathBuf,
        /// Index of the defining direction among the points of τ*₀.
        #[arg(long, default_value_t = 0)]
        direction: usize,
    },
    /// The affine frame: complement, stars, slices, and the regulus census.
    Frame {
        #[arg(long)]
        egg: PathBuf,
    },
    /// Linearity of the slice-to-slice star correspondences.
    Alpha {
        #[arg(long)]
        egg: PathBuf,
        #[arg(long)]
        from: Option<usize>,
        #[arg(long)]
        to: Option<usize>,
    },
    /// The staged goodness derivation from one regular affine line.
    Goodness {
        #[arg(long)]
        egg: PathBuf,
    },
    /// The parity classification of the translation model.
    Classify {
        #[arg(long)]
        egg: PathBuf,
    },
}

#[derive(Subcommand)]
enum FlockCmd {
    /// Check the flock axioms of a stored plane set.
    Validate {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Linear and semifield tests.
    Classify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Build a Kantor–Knuth flock from (q, σ, m).
    Kk {
        #[arg(long)]
        q: u32,
        /// Frobenius power defining σ = x ↦ x^(p^sigma).
        #[arg(long, default_value_t = 1)]
        sigma: u32,
        /// Field code of the nonsquare m; defaults to the first nonsquare.
        #[arg(long)]
        m: Option<u32>,
        /// Write the flock as a JSON file.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Build the coset quadrangle of a flock and verify its order.
    GqBuild {
        #[arg(long = "in")]
        input: PathBuf,
        /// Write the quadrangle as an incidence JSON file.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SuiteCmd {
    /// End-to-end construction and axiom checks at q = 3, n = 1.
    Smoke,
    /// The conic/Segre/regulus lemma checks on O(n, 2n, q).
    Lemmas {
        #[arg(long, default_value_t = 3)]
        q: u32,
        #[arg(long, default_value_t = 1)]
        n: u32,
    },
    /// Witness, staged pipeline, and parity verdict on O(n, 2n, q).
    Classify {
        #[arg(long, default_value_t = 3)]
        q: u32,
        #[arg(long, default_value_t = 1)]
        n: u32,
    },
}

/// A usage or input problem: exit code 2.
struct InputError(String);

type CmdResult = Result<RunReport, InputError>;

/// Runs the CLI with the given arguments (excluding argv[0]) and returns the
/// process exit code: 0 all checks passed, 1 a check produced findings,
/// 2 usage or input error.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv = std::iter::once("quadlab".to_string()).chain(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    if let Some(workers) = cli.globals.workers {
        // A failure here means a pool already exists; sizing is best-effort.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    }
    let report = match dispatch(&cli.noun, &cli.globals) {
        Ok(report) => report,
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    let text = if cli.globals.json { report.render() } else { human(&report) };
    if let Some(path) = &cli.globals.out {
        if let Err(e) = std::fs::write(path, &text) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return 2;
        }
    } else {
        print!("{text}");
    }
    if report.pass {
        0
    } else {
        1
    }
}

fn human(report: &RunReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} — {}", report.tool, report.version, report.command);
    let _ = writeln!(out, "instance: {}   seed: {}", report.instance, report.seed);
    for r in &report.records {
        let status = if r.pass { "PASS" } else { "FAIL" };
        let counts =
            r.counts.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ");
        let ms = r.wall_ms.map(|m| format!("  ({m} ms)")).unwrap_or_default();
        let _ = writeln!(out, "[{status}] {}  [{}]  {counts}{ms}", r.check, r.mode);
        for w in &r.witnesses {
            let _ = writeln!(out, "        {w}");
        }
    }
    let _ = writeln!(out, "verdict: {}", if report.pass { "PASS" } else { "FAIL" });
    out
}

fn dispatch(noun: &Noun, g: &Globals) -> CmdResult {
    match noun {
        Noun::Egg(cmd) => egg_cmd(cmd, g),
        Noun::Gq(cmd) => gq_cmd(cmd, g),
        Noun::Conics(cmd) => conics_cmd(cmd, g),
        Noun::Flock(cmd) => flock_cmd(cmd, g),
        Noun::Suite(cmd) => suite_cmd(cmd, g),
    }
}

// ---------------------------------------------------------------------------
// Shared input helpers
// ---------------------------------------------------------------------------

/// Reads a JSON input file; parse and IO problems are input errors.
fn read_input<T: DeserializeOwned>(path: &Path) -> Result<T, InputError> {
    read_json(path).map_err(|e| InputError(e.to_string()))
}

/// A failing record carrying a finding's message as witness.
fn finding(check: &str, e: impl std::fmt::Display) -> CheckRecord {
    CheckRecord::full(check).outcome(false).witness(json!({ "error": e.to_string() }))
}

fn egg_instance(egg: &Egg) -> String {
    format!("O({},{},{})", egg.n, egg.m, egg.field.q())
}

fn model_instance(model: &TModel) -> String {
    format!("T({},{},{})", model.egg.n, model.egg.m, model.egg.field.q())
}

fn inc_instance(s: &IncidenceStructure) -> String {
    format!("incidence v={} b={}", s.v, s.b)
}

/// Loads and validates an egg file. A validation failure is a finding, not
/// an input error, so it becomes a failing report.
fn load_egg(path: &Path, g: &Globals, command: &str) -> Result<Result<Egg, RunReport>, InputError> {
    let file: EggFile = read_input(path)?;
    let opts = EggCheckOptions { full: g.full, seed: g.seed };
    match file.build(&opts) {
        Ok(egg) => Ok(Ok(egg)),
        Err(IoError::Json(e)) => Err(InputError(e.to_string())),
        Err(e) => {
            let mut report = RunReport::new(command, "egg file", g.seed);
            report.push(finding("egg-axioms", e));
            Ok(Err(report))
        }
    }
}

fn load_incidence(
    path: &Path,
    g: &Globals,
    command: &str,
) -> Result<Result<IncidenceStructure, RunReport>, InputError> {
    let file: IncidenceFile = read_input(path)?;
    match file.build() {
        Ok(s) => Ok(Ok(s)),
        Err(e) => {
            let mut report = RunReport::new(command, "incidence file", g.seed);
            report.push(finding("gq-axioms", e));
            Ok(Err(report))
        }
    }
}

fn load_flock(path: &Path, g: &Globals, command: &str) -> Result<Result<Flock, RunReport>, InputError> {
    let file: FlockFile = read_input(path)?;
    match file.build() {
        Ok(fl) => Ok(Ok(fl)),
        Err(IoError::Json(e)) => Err(InputError(e.to_string())),
        Err(e) => {
            let mut report = RunReport::new(command, "flock file", g.seed);
            report.push(finding("flock-axioms", e));
            Ok(Err(report))
        }
    }
}

/// Builds T(O) from a validated egg; a model failure is a finding.
fn model_of(egg: Egg, g: &Globals, command: &str) -> Result<TModel, RunReport> {
    let instance = egg_instance(&egg);
    let mode = if g.full { GqMode::Full } else { GqMode::Auto { seed: g.seed } };
    build_t_model(egg, &TBuildOptions { mode }).map_err(|e| {
        let mut report = RunReport::new(command, &instance, g.seed);
        report.push(finding("model-axioms", e));
        report
    })
}

fn parse_pair(text: &str, what: &str) -> Result<(u32, u32), InputError> {
    let mut parts = text.split(',');
    let a = parts.next().and_then(|t| t.trim().parse().ok());
    let b = parts.next().and_then(|t| t.trim().parse().ok());
    match (a, b, parts.next()) {
        (Some(a), Some(b), None) => Ok((a, b)),
        _ => Err(InputError(format!("expected {what} as two comma-separated indices, got `{text}`"))),
    }
}

fn regularity_record(check: &str, r: &RegularityReport) -> CheckRecord {
    let mut rec = CheckRecord::full(check)
        .count("pairs_checked", r.pairs_checked)
        .witness(json!({ "object": format!("{:?}", r.object) }))
        .outcome(r.regular);
    if let Some(p) = r.perp_size {
        rec = rec.count("perp", p);
    }
    if let Some(p) = r.double_perp_size {
        rec = rec.count("double_perp", p);
    }
    if let Some(w) = &r.witness {
        rec = rec.witness(json!({ "irregular_pair": w }));
    }
    if let Some(n) = &r.note {
        rec = rec.witness(json!({ "note": n }));
    }
    rec
}

// ---------------------------------------------------------------------------
// egg
// ---------------------------------------------------------------------------

fn egg_cmd(cmd: &EggCmd, g: &Globals) -> CmdResult {
    match cmd {
        EggCmd::Validate { egg: path } => {
            let command = format!("egg validate --egg {}", path.display());
            let egg = match load_egg(path, g, &command)? {
                Ok(egg) => egg,
                Err(report) => return Ok(report),
            };
            let mut report = RunReport::new(&command, &egg_instance(&egg), g.seed)
                .with_field(FieldSpec::of(&egg.field));
            report.push_timed(g.timings, || {
                let mut rec = CheckRecord::full("egg-axioms")
                    .count("elements", egg.elements.len() as u64)
                    .count("n", egg.n as u64)
                    .count("m", egg.m as u64)
                    .count("warnings", egg.warnings.len() as u64);
                for w in &egg.warnings {
                    rec = rec.witness(json!({ "warning": w }));
                }
                rec
            });
            Ok(report)
        }
        EggCmd::Tangents { egg: path } => {
            let command = format!("egg tangents --egg {}", path.display());
            let egg = match load_egg(path, g, &command)? {
                Ok(egg) => egg,
                Err(report) => return Ok(report),
            };
            let mut report = RunReport::new(&command, &egg_instance(&egg), g.seed)
                .with_field(FieldSpec::of(&egg.field));
            report.push_timed(g.timings, || match egg.tangents() {
                Ok(tangents) => CheckRecord::full("egg-tangents")
                    .count("spaces", tangents.len() as u64)
                    .count("rank", tangents.first().map_or(0, |t| t.rank() as u64)),
                Err(e) => finding("egg-tangents", e),
            });
            Ok(report)
        }
        EggCmd::Good { egg: path, element } => {
            let command = match element {
                Some(i) => format!("egg good --egg {} --element {i}", path.display()),
                None => format!("egg good --egg {}", path.display()),
            };
            let egg = match load_egg(path, g, &command)? {
                Ok(egg) => egg,
                Err(report) => return Ok(report),
            };
            if let Some(i) = element {
                if *i >= egg.elements.len() {
                    return Err(InputError(format!(
                        "element {i} is out of range; the egg has {} elements",
                        egg.elements.len()
                    )));
                }
            }
            let mut report = RunReport::new(&command, &egg_instance(&egg), g.seed)
                .with_field(FieldSpec::of(&egg.field));
            report.push_timed(g.timings, || {
                let outcome = match element {
                    Some(i) => egg.goodness_test(*i).map(|r| vec![r]),
                    None => egg.good_at_all(),
                };
                match outcome {
                    Ok(reports) => {
                        let all_good = reports.iter().all(|r| r.good);
                        let spans: u64 = reports.iter().map(|r| r.spans_tested).sum();
                        let mut rec = CheckRecord::full("egg-goodness")
                            .count("elements_tested", reports.len() as u64)
                            .count("spans_tested", spans)
                            .outcome(all_good);
                        for r in reports.iter().filter(|r| !r.good) {
                            rec = rec.witness(json!({
                                "element": r.element,
                                "counterexample": r.counterexample,
                            }));
                        }
                        rec
                    }
                    Err(e) => finding("egg-goodness", e),
                }
            });
            Ok(report)
        }
        EggCmd::Dual { egg: path, emit } => {
            let command = format!("egg dual --egg {}", path.display());
            let egg = match load_egg(path, g, &command)? {
                Ok(egg) => egg,
                Err(report) => return Ok(report),
            };
            let mut report = RunReport::new(&command, &egg_instance(&egg), g.seed)
                .with_field(FieldSpec::of(&egg.field));
            let opts = EggCheckOptions { full: g.full, seed: g.seed };
            match translation_dual(&egg, &opts) {
                Ok(dual) => {
                    emit_artifact(emit.as_deref(), &EggFile::of(&dual))?;
                    report.push_timed(g.timings, || {
                        CheckRecord::full("egg-dual")
                            .count("elements", dual.elements.len() as u64)
                            .count("n", dual.n as u64)
                            .count("m", dual.m as u64)
                    });
                }
                Err(e) => report.push(finding("egg-dual", e)),
            }
            Ok(report)
        }
        EggCmd::FromOvoid { q, n, emit } => {
            let command = format!("egg from-ovoid --q {q} --n {n}");
            let (p, e) = factor_prime_power(*q)
                .ok_or_else(|| InputError(format!("q = {q} is not a prime power")))?;
            let opts = EggCheckOptions { full: g.full, seed: g.seed };
            match classical_egg(p, e, *n as usize, &opts) {
                Ok(egg) => {
                    emit_artifact(emit.as_deref(), &EggFile::of(&egg))?;
                    let mut report = RunReport::new(&command, &egg_instance(&egg), g.seed)
                        .with_field(FieldSpec::of(&egg.field));
                    report.push_timed(g.timings, || {
                        CheckRecord::full("egg-from-ovoid")
                            .count("elements", egg.elements.len() as u64)
                            .count("n", egg.n as u64)
                            .count("m", egg.m as u64)
                    });
                    Ok(report)
                }
                Err(e) => {
                    let mut report = RunReport::new(&command, "O(n,2n,q)", g.seed);
                    report.push(finding("egg-from-ovoid", e));
                    Ok(report)
                }
            }
        }
    }
}

/// Writes a JSON artifact beside the report when a path was given.
fn emit_artifact<T: serde::Serialize>(path: Option<&Path>, value: &T) -> Result<(), InputError> {
    if let Some(path) = path {
        write_json(path, value).map_err(|e| InputError(e.to_string()))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// gq
// ---------------------------------------------------------------------------

/// Determines the order of a structure for the regularity commands.
fn order_of(
    s: &IncidenceStructure,
    g: &Globals,
) -> Result<quadlab_core::gq::GQOrder, quadlab_core::gq::GqError> {
    let mode = if g.full { GqMode::Full } else { GqMode::Auto { seed: g.seed } };
    gq_check(s, mode)
}

fn gq_cmd(cmd: &GqCmd, g: &Globals) -> CmdResult {
    match cmd {
        GqCmd::Check { input } => {
            let command = format!("gq check --in {}", input.display());
            let s = match load_incidence(input, g, &command)? {
                Ok(s) => s,
                Err(report) => return Ok(report),
            };
            let mut report = RunReport::new(&command, &inc_instance(&s), g.seed);
            report.push_timed(g.timings, || match order_of(&s, g) {
                Ok(order) => CheckRecord::full("gq-axioms")
                    .count("v", s.v as u64)
                    .count("b", s.b as u64)
                    .count("s", order.s)
                    .count("t", order.t),
                Err(e) => finding("gq-axioms", e),
            });
            Ok(report)
        }
        GqCmd::Perps { input, points } => {
            let command = format!(
                "gq perps --in {} --points {}",
                input.display(),
                points.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
            );
            let s = match load_incidence(input, g, &command)? {
                Ok(s) => s,
                Err(report) => return Ok(report),
            };
            if let Some(&x) = points.iter().find(|&&x| x >= s.v as u32) {
                return Err(InputError(format!("point {x} is out of range; v = {}", s.v)));
            }
            let mut report = RunReport::new(&command, &inc_instance(&s), g.seed);
            report.push_timed(g.timings, || {
                let perp = s.perp(points);
                let double = s.double_perp(points);
                CheckRecord::full("gq-perp")
                    .count("points", points.len() as u64)
                    .count("perp", perp.len() as u64)
                    .count("double_perp", double.len() as u64)
                    .witness(json!({ "perp": perp, "double_perp": double }))
            });
            Ok(report)
        }
        GqCmd::Regularity { input, point, line, pair, line_pair } => {
            let command = format!("gq regularity --in {}", input.display());
            let s = match load_incidence(input, g, &command)? {
                Ok(s) => s,
                Err(report) => return Ok(report),
            };
            let mut report = RunReport::new(&command, &inc_instance(&s), g.seed);
            let order = match order_of(&s, g) {
                Ok(order) => order,
                Err(e) => {
                    report.push(finding("gq-axioms", e));
                    return Ok(report);
                }
            };
            let picked = [point.is_some(), line.is_some(), pair.is_some(), line_pair.is_some()]
                .iter()
                .filter(|&&b| b)
                .count();
            if picked != 1 {
                return Err(InputError(
                    "pass exactly one of --point, --line, --pair, --line-pair".into(),
                ));
            }
            let outcome = if let Some(x) = point {
                s.point_regularity(order, *x)
            } else if let Some(l) = line {
                s.line_regularity(order, *l)
            } else if let Some(text) = pair {
                let (x, y) = parse_pair(text, "--pair")?;
                s.point_pair_regularity(order, x, y)
            } else {
                let (l, m) = parse_pair(line_pair.as_ref().unwrap(), "--line-pair")?;
                s.line_pair_regularity(order, l, m)
            };
            report.push_timed(g.timings, || match &outcome {
                Ok(r) => regularity_record("gq-regularity", r),
                Err(e) => finding("gq-regularity", e),
            });
            Ok(report)
        }
        GqCmd::Triads { input, points } => {
            let command = format!(
                "gq triads --in {} --points {}",
                input.display(),
                points.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
            );
            let s = match load_incidence(input, g, &command)? {
                Ok(s) => s,
                Err(report) => return Ok(report),
            };
            let [x, y, z]: [u32; 3] = points
                .as_slice()
                .try_into()
                .map_err(|_| InputError("a triad needs exactly three points".into()))?;
            let mut report = RunReport::new(&command, &inc_instance(&s), g.seed);
            report.push_timed(g.timings, || match s.triad_centers(x, y, z) {
                Ok(centers) => CheckRecord::full("gq-triad")
                    .count("centers", centers.len() as u64)
                    .witness(json!({ "triad": [x, y, z], "centers": centers })),
                Err(e) => finding("gq-triad", e),
            });
            Ok(report)
        }
        GqCmd::Grid { input, lines, emit } => {
            let command = format!("gq grid --in {} --lines {lines}", input.display());
            let s = match load_incidence(input, g, &command)? {
                Ok(s) => s,
                Err(report) => return Ok(report),
            };
            let (l, m) = parse_pair(lines, "--lines")?;
            let mut report = RunReport::new(&command, &inc_instance(&s), g.seed);
            let order = match order_of(&s, g) {
                Ok(order) => order,
                Err(e) => {
                    report.push(finding("gq-axioms", e));
                    return Ok(report);
                }
            };
            match s.grid_of(order, l, m) {
                Ok(grid) => {
                    emit_artifact(emit.as_deref(), &IncidenceFile::of(&grid))?;
                    report.push_timed(g.timings, || {
                        CheckRecord::full("gq-grid")
                            .count("v", grid.v as u64)
                            .count("b", grid.b as u64)
                    });
                }
                Err(e) => report.push(finding("gq-grid", e)),
            }
            Ok(report)
        }
        GqCmd::Symmetries { input, line } => {
            let command = format!("gq symmetries --in {} --line {line}", input.display());
            let s = match load_incidence(input, g, &command)? {
                Ok(s) => s,
                Err(report) => return Ok(report),
            };
            let mut report = RunReport::new(&command, &inc_instance(&s), g.seed);
            report.push_timed(g.timings, || match s.symmetry_group_about(*line) {
                Ok(group) => CheckRecord::full("gq-symmetries")
                    .count("line", *line as u64)
                    .count("group_order", group.len() as u64),
                Err(e) => finding("gq-symmetries", e),
            });
            Ok(report)
        }
        GqCmd::BuildTq { egg: path, emit } => {
            let command = format!("gq build-tq --egg {}", path.display());
            let egg = match load_egg(path, g, &command)? {
                Ok(egg) => egg,
                Err(report) => return Ok(report),
            };
            let field = FieldSpec::of(&egg.field);
            let model = match model_of(egg, g, &command) {
                Ok(model) => model,
                Err(report) => return Ok(report),
            };
            emit_artifact(emit.as_deref(), &IncidenceFile::of(&model.structure))?;
            let mut report =
                RunReport::new(&command, &model_instance(&model), g.seed).with_field(field);
            report.push_timed(g.timings, || {
                CheckRecord::full("model-axioms")
                    .count("v", model.structure.v as u64)
                    .count("b", model.structure.b as u64)
                    .count("s", model.order.s)
                    .count("t", model.order.t)
            });
            Ok(report)
        }
        GqCmd::TranslationPoint { egg: path, point } => {
            let command = format!("gq translation-point --egg {}", path.display());
            let egg = match load_egg(path, g, &command)? {
                Ok(egg) => egg,
                Err(report) => return Ok(report),
            };
            let field = FieldSpec::of(&egg.field);
            let model = match model_of(egg, g, &command) {
                Ok(model) => model,
                Err(report) => return Ok(report),
            };
            let p = point.unwrap_or_else(|| model.infinity_index());
            if p >= model.structure.v as u32 {
                return Err(InputError(format!(
                    "point {p} is out of range; v = {}",
                    model.structure.v
                )));
            }
            let mut report =
                RunReport::new(&command, &model_instance(&model), g.seed).with_field(field);
            report.push_timed(g.timings, || match model.translation_point_check(p) {
                Ok(v) => {
                    let orders: Vec<u64> = v.axes.iter().map(|&(_, o)| o).collect();
                    CheckRecord::full("translation-point")
                        .count("point", v.point as u64)
                        .count("axes", v.axes.len() as u64)
                        .witness(json!({ "symmetry_orders": orders }))
                        .outcome(v.is_translation_point)
                }
                Err(e) => finding("translation-point", e),
            });
            Ok(report)
        }
        GqCmd::Axes { egg: path, element } => {
            let command = format!("gq axes --egg {} --element {element}", path.display());
            let egg = match load_egg(path, g, &command)? {
                Ok(egg) => egg,
                Err(report) => return Ok(report),
            };
            if *element >= egg.elements.len() {
                return Err(InputError(format!(
                    "element {element} is out of range; the egg has {} elements",
                    egg.elements.len()
                )));
            }
            let field = FieldSpec::of(&egg.field);
            let model = match model_of(egg, g, &command) {
                Ok(model) => model,
                Err(report) => return Ok(report),
            };
            let mut report =
                RunReport::new(&command, &model_instance(&model), g.seed).with_field(field);
            report.push_timed(g.timings, || match model.line_symmetries(*element) {
                Ok(symmetries) => CheckRecord::full("line-symmetries")
                    .count("element", *element as u64)
                    .count("group_order", symmetries.len() as u64)
                    .outcome(symmetries.len() as u64 == model.order.s),
                Err(e) => finding("line-symmetries", e),
            });
            Ok(report)
        }
    }
}

// ---------------------------------------------------------------------------
// conics
// ---------------------------------------------------------------------------

fn conics_cmd(cmd: &ConicsCmd, g: &Globals) -> CmdResult {
    match cmd {
        ConicsCmd::Conic { egg: path, i, j, k, point } => {
            let command = format!(
                "conics conic --egg {} --i {i} --j {j} --k {k} --point {point}",
                path.display()
            );
            let egg = match load_egg(path, g, &command)? {
                Ok(egg) => egg,
                Err(report) => return Ok(report),
            };
            let count = egg.elements.len();
            for idx in [*i, *j, *k] {
                if idx >= count {
                    return Err(InputError(format!(
                        "element {idx} is out of range; the egg has {count} elements"
                    )));
                }
            }
            if i == j || i == k || j == k || ![*i, *j, *k].contains(&0) {
                return Err(InputError(
                    "--i, --j, --k must be distinct and one of them must be 0".into(),
                ));
            }
            let base_points = egg.elements[*k].points(&egg.field);
            let s = base_points.get(*point).ok_or_else(|| {
                InputError(format!(
                    "point index {point} is out of range; element {k} has {} points",
                    base_points.len()
                ))
            })?;
            let mut report = RunReport::new(&command, &egg_instance(&egg), g.seed)
                .with_field(FieldSpec::of(&egg.field));
            report.push_timed(g.timings, || {
                let outcome = pi0_conic_through(&egg, *i, *j, *k, s).and_then(|pc| {
                    let census = conic_census(&egg, *i, *j, s)?;
                    Ok((pc, census))
                });
                match outcome {
                    Ok((pc, census)) => {
                        let unique = census.conics.len() == 1
                            && census.conics[0].points == pc.points;
                        CheckRecord::full("pi0-conic")
                            .count("points", pc.points.len() as u64)
                            .count("elements_on_conic", pc.elements.len() as u64)
                            .count("census_planes", census.planes_scanned)
                            .count("census_conics", census.conics.len() as u64)
                            .witness(json!({ "elements": pc.elements }))
                            .outcome(unique)
                    }
                    Err(e) => finding("pi0-conic", e),
                }
            });
            Ok(report)
        }
        ConicsCmd::Family { egg: path, i, j } => {
            let command = format!("conics family --egg {} --i {i} --j {j}", path.display());
            let egg = match load_egg(path, g, &command)? {
                Ok(egg) => egg,
                Err(report) => return Ok(report),
            };
            check_pair(&egg, *i, *j)?;
            let mut report = RunReport::new(&command, &egg_instance(&egg), g.seed)
                .with_field(FieldSpec::of(&egg.field));
            report.push_timed(g.timings, || match segre_family(&egg, *i, *j) {
                Ok(fam) => CheckRecord::full("segre-family")
                    .count("planes", fam.conics.len() as u64)
                    .count("v_elements", fam.v_elements.len() as u64)
                    .count("plane_pairs", fam.pairs_checked)
                    .count("correspondences", fam.correspondences_checked)
                    .witness(json!({ "v_elements": fam.v_elements })),
                Err(e) => finding("segre-family", e),
            });
            Ok(report)
        }
        ConicsCmd::Eta { egg: path, i, j } => {
            let command = format!("conics eta --egg {} --i {i} --j {j}", path.display());
            let egg = match load_egg(path, g, &command)? {
                Ok(egg) => egg,
                Err(report) => return Ok(report),
            };
            check_pair(&egg, *i, *j)?;
            let mut report = RunReport::new(&command, &egg_instance(&egg), g.seed)
                .with_field(FieldSpec::of(&egg.field));
            report.push_timed(g.timings, || match eta_configuration(&egg, *i, *j) {
                Ok(eta) => {
                    let mut rec = CheckRecord::full("eta-configuration")
                        .count("even", eta.even as u64)
                        .count("eta0_rank", eta.eta0.rank() as u64);
                    if let Some(c) = &eta.common {
                        rec = rec.count("common_rank", c.rank() as u64);
                    }
                    if !eta.nuclei.is_empty() {
                        rec = rec.count("nuclei", eta.nuclei.len() as u64);
                    }
                    if let Some(m) = &eta.triple_meet {
                        rec = rec.count("triple_meet_rank", m.rank() as u64);
                    }
                    rec
                }
                Err(e) => finding("eta-configuration", e),
            });
            Ok(report)
        }
        ConicsCmd::Pi0set { egg: path, direction } => {
            let command =
                format!("conics pi0set --egg {} --direction {direction}", path.display());
            let egg = match load_egg(path, g, &command)? {
                Ok(egg) => egg,
                Err(report) => return Ok(report),
            };
            let mut report = RunReport::new(&command, &egg_instance(&egg), g.seed)
                .with_field(FieldSpec::of(&egg.field));
            let frame = match delta_frame(&egg, None) {
                Ok(frame) => frame,
                Err(e) => {
                    report.push(finding("delta-frame", e));
                    return Ok(report);
                }
            };
            let dirs = frame.tau_star0.points(&egg.field);
            let x = dirs.get(*direction).ok_or_else(|| {
                InputError(format!(
                    "direction {direction} is out of range; τ*₀ has {} points",
                    dirs.len()
                ))
            })?;
            let gamma0 = span_with_points(&egg.field, &egg.elements[0], &[x]);
            report.push_timed(g.timings, || match pi0_set_partition(&egg, &gamma0) {
                Ok(partition) => {
                    let members =
                        partition.sets.first().map_or(0, |s| s.elements.len() as u64);
                    let kernels =
                        partition.sets.iter().filter(|s| s.kernel.is_some()).count() as u64;
                    let mut rec = CheckRecord::full("pi0-partition")
                        .count("sets", partition.sets.len() as u64)
                        .count("members_per_set", members);
                    if egg.field.is_even() {
                        rec = rec.count("kernel_points", kernels);
                    }
                    rec
                }
                Err(e) => finding("pi0-partition", e),
            });
            Ok(report)
        }
        ConicsCmd::Frame { egg: path } => {
            let command = format!("conics frame --egg {}", path.display());
            let egg = match load_egg(path, g, &command)? {
                Ok(egg) => egg,
                Err(report) => return Ok(report),
            };
            let mut report = RunReport::new(&command, &egg_instance(&egg), g.seed)
                .with_field(FieldSpec::of(&egg.field));
            match delta_frame(&egg, None) {
                Ok(frame) => {
                    report.push_timed(g.timings, || {
                        CheckRecord::full("delta-frame")
                            .count("phi_rank", frame.phi.rank() as u64)
                            .count("stars", frame.pi_star.len() as u64)
                            .count("slices", frame.xis.len() as u64)
                    });
                    report.push_timed(g.timings, || match regulus_census(&egg, &frame) {
                        Ok(c) => CheckRecord::full("regulus-census")
                            .count("pairs", c.pairs)
                            .count("members_per_regulus", c.members_per_regulus),
                        Err(e) => finding("regulus-census", e),
                    });
                }
                Err(e) => report.push(finding("delta-frame", e)),
            }
            Ok(report)
        }
        ConicsCmd::Alpha { egg: path, from, to } => {
            let command = format!("conics alpha --egg {}", path.display());
            let egg = match load_egg(path, g, &command)? {
                Ok(egg) => egg,
                Err(report) => return Ok(report),
            };
            let mut report = RunReport::new(&command, &egg_instance(&egg), g.seed)
                .with_field(FieldSpec::of(&egg.field));
            let frame = match delta_frame(&egg, None) {
                Ok(frame) => frame,
                Err(e) => {
                    report.push(finding("delta-frame", e));
                    return Ok(report);
                }
            };
            let slices = frame.xis.len();
            let pairs: Vec<(usize, usize)> = match (from, to) {
                (Some(a), Some(b)) => {
                    if *a >= slices || *b >= slices || a == b {
                        return Err(InputError(format!(
                            "--from/--to must be distinct slice indices below {slices}"
                        )));
                    }
                    vec![(*a, *b)]
                }
                (None, None) => {
                    let mut all = Vec::new();
                    for a in 0..slices {
                        for b in 0..slices {
                            if a != b {
                                all.push((a, b));
                            }
                        }
                    }
                    all
                }
                _ => return Err(InputError("pass both --from and --to, or neither".into())),
            };
            report.push_timed(g.timings, || {
                let mut checked = 0u64;
                let mut verified = 0u64;
                let mut ok = true;
                let mut witness = None;
                for &(a, b) in &pairs {
                    match alpha_linearity(&egg, &frame, a, b) {
                        Ok(rep) => {
                            checked += 1;
                            verified += rep.verified;
                            if !(rep.linear && rep.infinity_ok && rep.automorphism.is_none()) {
                                ok = false;
                                witness.get_or_insert(json!({
                                    "pair": [a, b],
                                    "automorphism": rep.automorphism,
                                }));
                            }
                        }
                        Err(e) => {
                            ok = false;
                            witness
                                .get_or_insert(json!({ "pair": [a, b], "error": e.to_string() }));
                        }
                    }
                }
                let mut rec = CheckRecord::full("alpha-linearity")
                    .count("ordered_pairs", checked)
                    .count("correspondences", verified)
                    .outcome(ok);
                if let Some(w) = witness {
                    rec = rec.witness(w);
                }
                rec
            });
            Ok(report)
        }
        ConicsCmd::Goodness { egg: path } => {
            let command = format!("conics goodness --egg {}", path.display());
            let egg = match load_egg(path, g, &command)? {
                Ok(egg) => egg,
                Err(report) => return Ok(report),
            };
            let field = FieldSpec::of(&egg.field);
            let model = match model_of(egg, g, &command) {
                Ok(model) => model,
                Err(report) => return Ok(report),
            };
            let mut report =
                RunReport::new(&command, &model_instance(&model), g.seed).with_field(field);
            let witness = match regular_line_witness(&model, 0) {
                Ok(w) => {
                    report.push_timed(g.timings, || {
                        CheckRecord::full("regular-line-witness")
                            .count("line", w.line as u64)
                            .count("pairs_checked", w.report.pairs_checked)
                    });
                    w
                }
                Err(e) => {
                    report.push(finding("regular-line-witness", e));
                    return Ok(report);
                }
            };
            let frame = match delta_frame(&model.egg, None) {
                Ok(frame) => frame,
                Err(e) => {
                    report.push(finding("goodness-pipeline", e));
                    return Ok(report);
                }
            };
            report.push_timed(g.timings, || {
                match goodness_pipeline(&model.egg, &frame, &witness) {
                    Ok(p) => CheckRecord::full("goodness-pipeline")
                        .count("gammas", p.gammas)
                        .count("sets_per_gamma", p.sets_per_gamma)
                        .count("pair_spans", p.pair_spans_checked)
                        .count("elements_per_span", p.elements_per_span)
                        .count("eta_classes", p.eta_classes)
                        .count("gammas_per_class", p.gammas_per_class)
                        .count("slices", p.slices_checked)
                        .count("directions", p.directions_matched)
                        .count("pairs_covered", p.pairs_covered)
                        .outcome(p.good_at_zero),
                    Err(e) => finding("goodness-pipeline", e),
                }
            });
            Ok(report)
        }
        ConicsCmd::Classify { egg: path } => {
            let command = format!("conics classify --egg {}", path.display());
            let egg = match load_egg(path, g, &command)? {
                Ok(egg) => egg,
                Err(report) => return Ok(report),
            };
            let field = FieldSpec::of(&egg.field);
            let model = match model_of(egg, g, &command) {
                Ok(model) => model,
                Err(report) => return Ok(report),
            };
            let mut report =
                RunReport::new(&command, &model_instance(&model), g.seed).with_field(field);
            report.push_timed(g.timings, || match classify(&model) {
                Ok(c) => {
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
                        rec = rec.count("sub_elements", ev.sub_elements).outcome(
                            ev.sub_lines_regular && ev.full_lines_regular && ev.good_everywhere,
                        );
                    }
                    rec
                }
                Err(e) => finding("classification", e),
            });
            Ok(report)
        }
    }
}

fn check_pair(egg: &Egg, i: usize, j: usize) -> Result<(), InputError> {
    let count = egg.elements.len();
    if i >= count || j >= count || i == j || i == 0 || j == 0 {
        return Err(InputError(format!(
            "--i and --j must be distinct nonzero element indices below {count}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// flock
// ---------------------------------------------------------------------------

fn flock_cmd(cmd: &FlockCmd, g: &Globals) -> CmdResult {
    match cmd {
        FlockCmd::Validate { input } => {
            let command = format!("flock validate --in {}", input.display());
            let fl = match load_flock(input, g, &command)? {
                Ok(fl) => fl,
                Err(report) => return Ok(report),
            };
            let q = fl.field.q() as u64;
            let mut report = RunReport::new(&command, &format!("flock over GF({q})"), g.seed)
                .with_field(FieldSpec::of(&fl.field));
            report.push_timed(g.timings, || {
                CheckRecord::full("flock-axioms")
                    .count("planes", fl.planes.len() as u64)
                    .count("points_per_section", q + 1)
            });
            Ok(report)
        }
        FlockCmd::Classify { input } => {
            let command = format!("flock classify --in {}", input.display());
            let fl = match load_flock(input, g, &command)? {
                Ok(fl) => fl,
                Err(report) => return Ok(report),
            };
            let q = fl.field.q() as u64;
            let mut report = RunReport::new(&command, &format!("flock over GF({q})"), g.seed)
                .with_field(FieldSpec::of(&fl.field));
            let linear = linear_test(&fl);
            report.push_timed(g.timings, || {
                CheckRecord::full("flock-linear")
                    .count("linear", linear.linear as u64)
                    .count("common_rank", linear.common.rank() as u64)
            });
            report.push_timed(g.timings, || match semifield_test(&fl) {
                Ok(sr) => {
                    let mut rec = CheckRecord::full("flock-semifield")
                        .count("semifield", sr.semifield as u64)
                        .count("pairs_checked", q * q);
                    if let Some((t, u)) = sr.witness {
                        rec = rec.witness(json!({ "nonadditive_pair": [t, u] }));
                    }
                    rec
                }
                Err(e) => finding("flock-semifield", e),
            });
            Ok(report)
        }
        FlockCmd::Kk { q, sigma, m, emit } => {
            let command = format!("flock kk --q {q} --sigma {sigma}");
            let (p, e) = factor_prime_power(*q)
                .ok_or_else(|| InputError(format!("q = {q} is not a prime power")))?;
            let f = FiniteField::new(p, e, None).map_err(|e| InputError(e.to_string()))?;
            let m = match m {
                Some(m) => {
                    if *m >= f.q() {
                        return Err(InputError(format!("--m {m} is not a field code below {q}")));
                    }
                    *m
                }
                None => first_nonsquare(&f)
                    .ok_or_else(|| InputError(format!("GF({q}) has no nonsquare — q must be odd")))?,
            };
            let mut report = RunReport::new(&command, &format!("flock over GF({q})"), g.seed)
                .with_field(FieldSpec::of(&f));
            match kantor_knuth(&f, *sigma, m).and_then(|planes| flock_validate(&f, &planes)) {
                Ok(fl) => {
                    emit_artifact(emit.as_deref(), &FlockFile::of(&fl))?;
                    let semifield = semifield_test(&fl);
                    report.push_timed(g.timings, || {
                        let mut rec = CheckRecord::full("kantor-knuth")
                            .count("planes", fl.planes.len() as u64)
                            .count("sigma", *sigma as u64)
                            .count("m", m as u64);
                        match &semifield {
                            Ok(sr) => rec = rec.count("semifield", sr.semifield as u64),
                            Err(e) => {
                                rec = rec
                                    .outcome(false)
                                    .witness(json!({ "error": e.to_string() }));
                            }
                        }
                        rec
                    });
                }
                Err(e) => report.push(finding("kantor-knuth", e)),
            }
            Ok(report)
        }
        FlockCmd::GqBuild { input, emit } => {
            let command = format!("flock gq-build --in {}", input.display());
            let fl = match load_flock(input, g, &command)? {
                Ok(fl) => fl,
                Err(report) => return Ok(report),
            };
            let q = fl.field.q() as u64;
            let mut report = RunReport::new(&command, &format!("flock over GF({q})"), g.seed)
                .with_field(FieldSpec::of(&fl.field));
            match qclan_gq(&fl) {
                Ok(gq) => {
                    emit_artifact(emit.as_deref(), &IncidenceFile::of(&gq.structure))?;
                    report.push_timed(g.timings, || {
                        CheckRecord::full("qclan-gq")
                            .count("v", gq.structure.v as u64)
                            .count("b", gq.structure.b as u64)
                            .count("s", gq.order.s)
                            .count("t", gq.order.t)
                            .count("group_order", gq.group_order)
                            .count("family_pairs", gq.family_pairs)
                            .count("family_triples", gq.family_triples)
                            .count("opposite_points", gq.opposite_count)
                            .count("elations_checked", gq.elations_checked)
                            .witness(json!({ "elations_exhaustive": gq.elations_exhaustive }))
                    });
                }
                Err(e) => report.push(finding("qclan-gq", e)),
            }
            Ok(report)
        }
    }
}

// ---------------------------------------------------------------------------
// suite
// ---------------------------------------------------------------------------

fn suite_cmd(cmd: &SuiteCmd, g: &Globals) -> CmdResult {
    let (name, q, n) = match cmd {
        SuiteCmd::Smoke => ("smoke", 3, 1),
        SuiteCmd::Lemmas { q, n } => ("lemmas", *q, *n),
        SuiteCmd::Classify { q, n } => ("classify", *q, *n),
    };
    let params = SuiteParams { q, n, seed: g.seed, full: g.full, timings: g.timings };
    run_suite(name, &params).map_err(|e| InputError(e.to_string()))
}
