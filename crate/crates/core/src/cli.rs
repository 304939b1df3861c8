//! Command-line front end: file inputs in, one JSON report out.
//!
//! Exit codes: 0 ok or PASS, 2 parse and usage errors, 3 domain errors and
//! FAIL verdicts, 4 numeric failures and INCONCLUSIVE verdicts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::algebra::{center, characters, radical, subalgebra, AlgebraInput, Character, LinearOp};
use crate::dersys::{DerivativeSystem, SystemFile};
use crate::diffcalc::{
    check_diffsys_characterization, check_stabilization, diff_order_checked, poly_operator, z_tower, RelativeOp,
};
use crate::envelope::{
    confirm_degenerate, envelope_verdict, jet_surjectivity_check, Condition, GeneratorFile, Status, Witness,
};
use crate::error::{Error, Result};
use crate::geometry::{check_duality, cotangent_space, tangent_space};
use crate::jets::space_for;
use crate::linalg::{from_pairs, matrix_from_pairs, to_pairs, Matrix, Tolerances, Vector};
use crate::multiindex::{IndexTable, MultiIndex};
use crate::poly::Poly;
use crate::report::{digest, Report, ViolationEntry};
use crate::selftest;
use crate::spectra::{central_subalgebras, dauns_hofmann_check, fourier_check, FiniteAbelianGroup};

#[derive(Debug, Parser)]
#[command(name = "diffalg", version, about = "Finite-dimensional differential-algebraic checks with JSON reports")]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Seed for every randomized step; recorded in the report.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Absolute zero test.
    #[arg(long, global = true)]
    pub tol_zero: Option<f64>,
    /// Relative pivot and vanishing threshold.
    #[arg(long, global = true)]
    pub tol_rank: Option<f64>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Size of randomized sweeps (selftest uses per-criterion defaults).
    #[arg(long, global = true)]
    pub instances: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Axioms, center, radical and characters of an algebra.
    AlgebraCheck { input: PathBuf },
    /// Check a derivative system and its series homomorphism.
    DersysVerify { input: PathBuf },
    /// Order of an operator as a relative differential operator.
    Difforder { input: PathBuf },
    /// The tower Z^0 ⊆ Z^1 ⊆ ... of a homomorphism.
    Ztower {
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Refuse maps that are not involutive.
        #[arg(long)]
        require_involutive: bool,
    },
    /// Jet coordinates and quotient seminorm of a polynomial.
    Jet { input: PathBuf },
    /// Tangent and cotangent spaces at characters.
    Tangent { input: PathBuf },
    /// Sufficient conditions for the smooth envelope to be everything.
    Envelope { input: PathBuf },
    /// Section map over central subalgebras.
    DaunsHofmann { input: PathBuf },
    /// Convolution and involution laws of a finite abelian group algebra.
    Fourier {
        /// Group such as "Z4xZ2".
        group: String,
    },
    /// Run the full invariant suite.
    Selftest,
}

impl Command {
    fn kind(&self) -> &'static str {
        match self {
            Command::AlgebraCheck { .. } => "algebra-check",
            Command::DersysVerify { .. } => "dersys-verify",
            Command::Difforder { .. } => "difforder",
            Command::Ztower { .. } => "ztower",
            Command::Jet { .. } => "jet",
            Command::Tangent { .. } => "tangent",
            Command::Envelope { .. } => "envelope",
            Command::DaunsHofmann { .. } => "dauns-hofmann",
            Command::Fourier { .. } => "fourier",
            Command::Selftest => "selftest",
        }
    }
}

/// What a subcommand produced before it is wrapped into a [`Report`].
struct Outcome {
    status: &'static str,
    results: Value,
    violations: Vec<ViolationEntry>,
    code: i32,
}

impl Outcome {
    fn ok(results: Value) -> Self {
        Outcome {
            status: "ok",
            results,
            violations: Vec::new(),
            code: 0,
        }
    }

    fn failed(results: Value, violations: Vec<ViolationEntry>) -> Self {
        Outcome {
            status: "fail",
            results,
            violations,
            code: 3,
        }
    }

    fn judged(results: Value, violations: Vec<ViolationEntry>) -> Self {
        if violations.is_empty() {
            Outcome::ok(results)
        } else {
            Outcome::failed(results, violations)
        }
    }
}

struct Ctx {
    seed: u64,
    instances: Option<usize>,
    tol: Tolerances,
}

/// Parse the process arguments and run; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            code
        }
    }
}

pub fn run(cli: &Cli) -> i32 {
    let defaults = Tolerances::default();
    let ctx = Ctx {
        seed: cli.opts.seed,
        instances: cli.opts.instances,
        tol: Tolerances {
            zero: cli.opts.tol_zero.unwrap_or(defaults.zero),
            rank: cli.opts.tol_rank.unwrap_or(defaults.rank),
        },
    };
    let kind = cli.command.kind();
    let (inputs, options, outcome) = match read_inputs(&cli.command, &ctx) {
        Ok((bytes, options)) => {
            let out = dispatch(&cli.command, &bytes, &ctx);
            (bytes, options, out)
        }
        Err(e) => (Vec::new(), String::new(), Err(e)),
    };
    let outcome = outcome.unwrap_or_else(|e| Outcome {
        status: "error",
        results: Value::Null,
        violations: vec![ViolationEntry::from_error(&e)],
        code: e.exit_code(),
    });
    let report = Report {
        kind: kind.to_string(),
        inputs_digest: digest(kind, &[&inputs, options.as_bytes()]),
        seed: ctx.seed,
        tolerances: ctx.tol,
        status: outcome.status.to_string(),
        results: outcome.results,
        violations: outcome.violations,
    };
    let text = report.to_json();
    match &cli.opts.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("cannot write {}: {e}", path.display());
                return 2;
            }
        }
        None => print!("{text}"),
    }
    eprintln!("{kind}: {}", report.status);
    for v in &report.violations {
        eprintln!("  {}: {}", v.kind, v.message);
    }
    outcome.code
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Raw input bytes, plus the options that change the result and therefore
/// belong in the digest.
fn read_inputs(cmd: &Command, ctx: &Ctx) -> Result<(Vec<u8>, String)> {
    let sweep = format!("instances={:?}", ctx.instances);
    match cmd {
        Command::AlgebraCheck { input }
        | Command::DersysVerify { input }
        | Command::Jet { input }
        | Command::Tangent { input }
        | Command::Envelope { input } => Ok((read_file(input)?, String::new())),
        Command::Difforder { input } | Command::DaunsHofmann { input } => Ok((read_file(input)?, sweep)),
        Command::Ztower {
            input,
            depth,
            require_involutive,
        } => Ok((
            read_file(input)?,
            format!("depth={depth} require_involutive={require_involutive}"),
        )),
        Command::Fourier { group } => Ok((group.clone().into_bytes(), sweep)),
        Command::Selftest => Ok((Vec::new(), sweep)),
    }
}

fn dispatch(cmd: &Command, bytes: &[u8], ctx: &Ctx) -> Result<Outcome> {
    match cmd {
        Command::AlgebraCheck { .. } => algebra_check(&parse(bytes)?, ctx),
        Command::DersysVerify { .. } => dersys_verify(&parse(bytes)?, ctx),
        Command::Difforder { .. } => difforder(&parse(bytes)?, ctx),
        Command::Ztower {
            depth,
            require_involutive,
            ..
        } => ztower(&parse(bytes)?, *depth, *require_involutive, ctx),
        Command::Jet { .. } => jet(&parse(bytes)?, ctx),
        Command::Tangent { .. } => tangent(&parse(bytes)?, ctx),
        Command::Envelope { .. } => envelope(&parse(bytes)?, ctx),
        Command::DaunsHofmann { .. } => dauns_hofmann(&parse(bytes)?, ctx),
        Command::Fourier { group } => fourier(group, ctx),
        Command::Selftest => run_selftest(ctx),
    }
}

fn parse<T: serde::de::DeserializeOwned>(bytes: &[u8]) -> Result<T> {
    Ok(serde_json::from_slice(bytes)?)
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

type Pairs = Vec<[f64; 2]>;

fn matrix_input(rows: &[Pairs], shape: (usize, usize), what: &str) -> Result<Matrix> {
    matrix_from_pairs(rows)
        .filter(|m| m.shape() == shape)
        .ok_or_else(|| Error::parse(format!("{what} must be a {}x{} matrix of [re, im] pairs", shape.0, shape.1)))
}

fn vector_input(v: &[[f64; 2]], len: usize, what: &str) -> Result<Vector> {
    if v.len() != len {
        return Err(Error::parse(format!("{what} must have {len} entries, got {}", v.len())));
    }
    Ok(from_pairs(v))
}

/// Polynomial given as `{"i,j,...": coeff}` with one exponent per variable.
fn sparse_poly(m: usize, terms: &BTreeMap<String, f64>) -> Result<Poly> {
    let parsed = terms
        .iter()
        .map(|(k, &c)| {
            let exps = k
                .split(',')
                .map(|e| e.trim().parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::parse(format!("bad exponent list {k:?}")))?;
            if exps.len() != m {
                return Err(Error::parse(format!("exponent list {k:?} needs {m} entries")));
            }
            Ok((MultiIndex::new(exps), c))
        })
        .collect::<Result<Vec<_>>>()?;
    Poly::from_terms(m, parsed)
}

// ---------------------------------------------------------------------------
// algebra-check

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraFile {
    algebra: AlgebraInput,
}

const AXIOM_BOUND: f64 = 1e-10;

fn algebra_check(f: &AlgebraFile, ctx: &Ctx) -> Result<Outcome> {
    let a = f.algebra.build()?;
    let axioms = a.check_axioms();
    let commutative = a.is_commutative(&ctx.tol);
    let chars = if commutative {
        Some(characters(&a, &ctx.tol)?.iter().map(|c| to_pairs(&c.functional)).collect::<Vec<_>>())
    } else {
        None
    };
    let results = json!({
        "name": a.name(),
        "dim": a.dim(),
        "axioms": axioms,
        "commutative": commutative,
        "has_involution": a.has_involution(),
        "center_dim": center(&a, &ctx.tol).dim(),
        "radical_dim": radical(&a, &ctx.tol).dim(),
        "characters": chars,
    });
    let mut violations = Vec::new();
    if !axioms.holds(AXIOM_BOUND) {
        violations.push(
            ViolationEntry::new("axiom", format!("axiom residual {:.3e} exceeds {AXIOM_BOUND:e}", axioms.max_residual()))
                .with_witness(to_value(&axioms)),
        );
    }
    Ok(Outcome::judged(results, violations))
}

// ---------------------------------------------------------------------------
// dersys-verify

fn dersys_verify(f: &SystemFile, ctx: &Ctx) -> Result<Outcome> {
    let sys = DerivativeSystem::from_file(f)?;
    let report = sys.verify(&ctx.tol);
    if !report.is_valid() {
        let violations = report
            .violations
            .iter()
            .map(|v| {
                ViolationEntry::new(
                    "axiom",
                    format!("{:?} fails at index {:?} (residual {:.3e})", v.axiom, v.index, v.residual),
                )
                .with_witness(to_value(v))
            })
            .collect();
        return Ok(Outcome::failed(json!({ "verify": report }), violations));
    }
    let h = sys.to_homomorphism(&ctx.tol)?;
    let back = DerivativeSystem::from_homomorphism(&h, &ctx.tol)?;
    let roundtrip = sys
        .ops()
        .iter()
        .zip(back.ops())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    let ch = check_diffsys_characterization(&sys, &ctx.tol)?;
    let mut violations = Vec::new();
    if !ch.agree {
        violations.push(
            ViolationEntry::new("characterization", "differential predicates disagree")
                .with_witness(to_value(&ch.witness)),
        );
    }
    Ok(Outcome::judged(
        json!({
            "verify": report,
            "homomorphism": {
                "multiplicative_residual": h.multiplicative_residual(),
                "unital_residual": h.unital_residual(),
                "involutive_residual": h.involutive_residual(),
                "roundtrip_residual": roundtrip,
            },
            "characterization": ch,
        }),
        violations,
    ))
}

// ---------------------------------------------------------------------------
// difforder

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyTerm {
    coeff: BTreeMap<String, f64>,
    derivative: Vec<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyOperatorSpec {
    m: usize,
    degree: u32,
    #[serde(default)]
    drop: Option<u32>,
    #[serde(default)]
    point: Option<Vec<f64>>,
    terms: Vec<PolyTerm>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OperatorFile {
    Poly {
        poly_operator: PolyOperatorSpec,
        #[serde(default)]
        max_order: Option<usize>,
    },
    Explicit {
        source: AlgebraInput,
        target: AlgebraInput,
        /// Homomorphism the operator is relative to; identity by default.
        #[serde(default)]
        action: Option<Vec<Pairs>>,
        matrix: Vec<Pairs>,
        #[serde(default)]
        max_order: Option<usize>,
    },
}

const DEFAULT_MAX_ORDER: usize = 6;

fn build_operator(f: &OperatorFile) -> Result<(RelativeOp, usize)> {
    match f {
        OperatorFile::Poly { poly_operator: p, max_order } => {
            let terms = p
                .terms
                .iter()
                .map(|t| {
                    if t.derivative.len() != p.m {
                        return Err(Error::parse(format!("derivative index needs {} entries", p.m)));
                    }
                    Ok((sparse_poly(p.m, &t.coeff)?, MultiIndex::new(t.derivative.clone())))
                })
                .collect::<Result<Vec<_>>>()?;
            let top = terms.iter().map(|(_, k)| k.degree()).max().unwrap_or(0);
            let s = p.point.clone().unwrap_or_else(|| vec![0.0; p.m]);
            let op = poly_operator(p.m, p.degree, &terms, p.drop.unwrap_or(top), &s)?;
            Ok((op, max_order.unwrap_or(DEFAULT_MAX_ORDER)))
        }
        OperatorFile::Explicit {
            source,
            target,
            action,
            matrix,
            max_order,
        } => {
            let (a, b) = (source.build()?, target.build()?);
            let shape = (b.dim(), a.dim());
            let phi = match action {
                Some(rows) => matrix_input(rows, shape, "action")?,
                None if a.dim() == b.dim() => Matrix::identity(a.dim(), a.dim()),
                None => return Err(Error::usage("an action is required when source and target differ")),
            };
            let action = LinearOp::new(a, b, phi)?;
            let op = RelativeOp::new(matrix_input(matrix, shape, "matrix")?, action)?;
            Ok((op, max_order.unwrap_or(DEFAULT_MAX_ORDER)))
        }
    }
}

fn difforder(f: &OperatorFile, ctx: &Ctx) -> Result<Outcome> {
    let (op, max_n) = build_operator(f)?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let samples = ctx.instances.unwrap_or(100);
    let r = diff_order_checked(&op, max_n, samples, &mut rng, &ctx.tol);
    Ok(Outcome::ok(json!({
        "order": r.order,
        "max_order": max_n,
        "depth_residuals": r.depth_residuals,
        "random_cross_check": r.cross_check,
        "random_samples": samples,
        "source_dim": op.source().dim(),
        "target_dim": op.target().dim(),
    })))
}

// ---------------------------------------------------------------------------
// ztower

#[derive(Deserialize)]
#[serde(untagged)]
enum MapFile {
    /// Inclusion of the subalgebra spanned by `subalgebra` into `ambient`.
    Inclusion { ambient: AlgebraInput, subalgebra: Vec<Pairs> },
    Map {
        source: AlgebraInput,
        target: AlgebraInput,
        matrix: Vec<Pairs>,
    },
}

fn build_map(f: &MapFile, tol: &Tolerances) -> Result<LinearOp> {
    match f {
        MapFile::Inclusion { ambient, subalgebra: basis } => {
            let b = ambient.build()?;
            let vs = basis
                .iter()
                .map(|v| vector_input(v, b.dim(), "subalgebra vector"))
                .collect::<Result<Vec<_>>>()?;
            Ok(subalgebra(&b, &vs, tol)?.1)
        }
        MapFile::Map { source, target, matrix } => {
            let (a, b) = (source.build()?, target.build()?);
            let m = matrix_input(matrix, (b.dim(), a.dim()), "matrix")?;
            LinearOp::new(a, b, m)
        }
    }
}

fn ztower(f: &MapFile, depth: usize, require_involutive: bool, ctx: &Ctx) -> Result<Outcome> {
    let phi = build_map(f, &ctx.tol)?;
    if !phi.is_homomorphism(&ctx.tol) {
        return Err(Error::domain(format!(
            "map is not a unital homomorphism (unit residual {:.3e}, product residual {:.3e})",
            phi.unital_residual(),
            phi.multiplicative_residual()
        )));
    }
    let depth = depth.max(2);
    if require_involutive {
        check_stabilization(&phi, true, &ctx.tol)?;
    }
    let tower = z_tower(&phi, depth, &ctx.tol);
    let stabilized = tower.levels[1].same_as(&tower.levels[2], &ctx.tol);
    Ok(Outcome::ok(json!({
        "dims": tower.dims(),
        "stabilized": stabilized,
        "monotone": tower.is_monotone(&ctx.tol),
        "involutive_residual": phi.involutive_residual().ok(),
        "precondition_checked": require_involutive,
        "source_dim": phi.source.dim(),
        "target_dim": phi.target.dim(),
    })))
}

// ---------------------------------------------------------------------------
// jet

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JetFile {
    point: Vec<f64>,
    order: u32,
    poly: BTreeMap<String, f64>,
}

fn jet(f: &JetFile, ctx: &Ctx) -> Result<Outcome> {
    let m = f.point.len();
    if m == 0 {
        return Err(Error::usage("point must have at least one coordinate"));
    }
    let p = sparse_poly(m, &f.poly)?;
    let js = space_for(&p, &f.point, f.order, &ctx.tol)?;
    let a = js.jet_taylor(&p);
    let b = js.jet_linear(&p)?;
    let diff = a.coords.iter().zip(&b.coords).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let indices: Vec<Vec<u32>> = IndexTable::new(m, f.order).iter().map(|k| k.entries().to_vec()).collect();
    let mut violations = Vec::new();
    if !ctx.tol.negligible(diff, 1.0 + p.norm()) {
        violations.push(ViolationEntry::new(
            "numeric",
            format!("Taylor and quotient jets differ by {diff:.3e}"),
        ));
    }
    let results = json!({
        "dim": js.dim(),
        "indices": indices,
        "jet": a.coords,
        "quotient_jet": b.coords,
        "oracle_difference": diff,
        "seminorm": js.seminorm(&p)?,
    });
    Ok(match violations.is_empty() {
        true => Outcome::ok(results),
        false => Outcome {
            status: "error",
            results,
            violations,
            code: 4,
        },
    })
}

// ---------------------------------------------------------------------------
// tangent

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TangentFile {
    algebra: AlgebraInput,
    /// A character as a functional; every character when absent.
    #[serde(default)]
    character: Option<Pairs>,
}

fn tangent(f: &TangentFile, ctx: &Ctx) -> Result<Outcome> {
    let a = f.algebra.build()?;
    let chars = match &f.character {
        Some(c) => vec![Character::new(vector_input(c, a.dim(), "character")?)],
        None => characters(&a, &ctx.tol)?,
    };
    let mut entries = Vec::new();
    let mut violations = Vec::new();
    for s in &chars {
        let t = tangent_space(&a, s, &ctx.tol)?;
        let c = cotangent_space(&a, s, &ctx.tol)?;
        let d = check_duality(&a, s, &ctx.tol)?;
        if !d.holds {
            violations.push(
                ViolationEntry::new("duality", "tangent and cotangent spaces are not dual")
                    .with_witness(json!({ "character": to_pairs(&s.functional), "report": d })),
            );
        }
        entries.push(json!({
            "character": to_pairs(&s.functional),
            "tangent_dim": t.dim(),
            "real_dim": t.real.as_ref().map(Vec::len),
            "tangent_basis": t.complex.iter().map(|v| to_pairs(&v.functional)).collect::<Vec<_>>(),
            "cotangent_dim": c.dim(),
            "cotangent_basis": c.basis.iter().map(to_pairs).collect::<Vec<_>>(),
            "duality": d,
        }));
    }
    Ok(Outcome::judged(json!({ "dim": a.dim(), "points": entries }), violations))
}

// ---------------------------------------------------------------------------
// envelope

fn envelope(f: &GeneratorFile, ctx: &Ctx) -> Result<Outcome> {
    let (gens, sample, opts) = f.parse()?;
    let v = envelope_verdict(&gens, &sample, &opts, &ctx.tol)?;
    // independent re-evaluation of every witness
    let mut violations = Vec::new();
    for r in &v.reasons {
        let confirmation = match (&r.condition, &r.witness) {
            (Condition::Separation, Witness::Pair(p, q)) => {
                let gap = gens.iter().map(|g| (g.eval(p) - g.eval(q)).abs()).fold(0.0, f64::max);
                let scale = gens.iter().map(|g| g.eval(p).abs()).fold(0.0, f64::max);
                json!({
                    "max_value_gap": gap,
                    "confirmed": gap <= ctx.tol.zero * (1.0 + scale),
                })
            }
            (Condition::Tangent, Witness::Point(p)) => json!({
                "finite_difference_rank_deficient": confirm_degenerate(&gens, p, &ctx.tol),
            }),
            (Condition::Jet, Witness::Point(p)) => {
                let n = opts.jet_order.unwrap_or(0);
                let len = opts.word_len.unwrap_or(n.max(1));
                let again = jet_surjectivity_check(&gens, p, n, len, &ctx.tol)?;
                json!({ "dim": again.dim, "target_dim": again.target_dim, "confirmed": !again.surjective })
            }
            _ => Value::Null,
        };
        violations.push(ViolationEntry::new(to_value(&r.condition).as_str().unwrap_or("condition"), &r.detail).with_witness(
            json!({ "witness": r.witness, "confirmation": confirmation }),
        ));
    }
    let (status, code) = match v.status {
        Status::Pass => ("PASS", 0),
        Status::Fail => ("FAIL", 3),
        Status::Inconclusive => ("INCONCLUSIVE", 4),
    };
    Ok(Outcome {
        status,
        results: json!({ "verdict": v, "sample_points": sample.len() }),
        violations,
        code,
    })
}

// ---------------------------------------------------------------------------
// dauns-hofmann

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DaunsHofmannFile {
    algebra: AlgebraInput,
    /// Basis of a central subalgebra; the center and every unital
    /// subalgebra of it when absent.
    #[serde(default)]
    central: Option<Vec<Pairs>>,
}

fn dauns_hofmann(f: &DaunsHofmannFile, ctx: &Ctx) -> Result<Outcome> {
    let a = f.algebra.build()?;
    let cases: Vec<Vec<Vector>> = match &f.central {
        Some(basis) => vec![basis
            .iter()
            .map(|v| vector_input(v, a.dim(), "central vector"))
            .collect::<Result<_>>()?],
        None => central_subalgebras(&a, &ctx.tol)?,
    };
    let pairs = ctx.instances.unwrap_or(100);
    let mut entries = Vec::new();
    let mut violations = Vec::new();
    for (i, basis) in cases.iter().enumerate() {
        let r = dauns_hofmann_check(&a, basis, pairs, ctx.seed, &ctx.tol)?;
        if !r.isomorphism {
            violations.push(
                ViolationEntry::new("isomorphism", format!("section map over subalgebra {i} is not an isomorphism"))
                    .with_witness(json!({ "central_basis": basis.iter().map(to_pairs).collect::<Vec<_>>() })),
            );
        }
        entries.push(json!({ "central_dim": basis.len(), "report": r }));
    }
    Ok(Outcome::judged(json!({ "dim": a.dim(), "subalgebras": entries }), violations))
}

// ---------------------------------------------------------------------------
// fourier

fn fourier(group: &str, ctx: &Ctx) -> Result<Outcome> {
    let g = FiniteAbelianGroup::parse(group)?;
    let r = fourier_check(&g, ctx.instances.unwrap_or(100), ctx.seed, &ctx.tol)?;
    let violations = if r.holds {
        Vec::new()
    } else {
        vec![ViolationEntry::new("fourier", "a Fourier law fails").with_witness(to_value(&r))]
    };
    Ok(Outcome::judged(to_value(&r), violations))
}

// ---------------------------------------------------------------------------
// selftest

fn run_selftest(ctx: &Ctx) -> Result<Outcome> {
    let cfg = selftest::Config {
        seed: ctx.seed,
        instances: ctx.instances,
        tol: ctx.tol,
    };
    let criteria = selftest::run_all(&cfg);
    let violations: Vec<ViolationEntry> = criteria
        .iter()
        .filter(|c| !c.passed)
        .map(|c| ViolationEntry::new(format!("criterion {}", c.id), c.name.clone()).with_witness(json!(c.failures)))
        .collect();
    let passed = criteria.iter().filter(|c| c.passed).count();
    Ok(Outcome::judged(
        json!({ "passed": passed, "total": criteria.len(), "criteria": criteria }),
        violations,
    ))
}
