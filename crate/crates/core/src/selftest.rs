//! The invariant suite behind `selftest`: one function per acceptance
//! criterion, each returning measured residuals and a pass flag.
//!
//! Every function is deterministic given its seed.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{
    direct_sum, function_algebra, jet_algebra, matrix_algebra, subalgebra, Algebra, Character,
};
use crate::dersys::{random_system, taylor_system, DerivativeSystem, RandomSystemSpec, Twist};
use crate::diffcalc::{check_diffsys_characterization, check_stabilization, random_star_subalgebra, z_tower};
use crate::envelope::{envelope_verdict, Condition, EnvelopeOptions, Sample, Status, Verdict, Witness};
use crate::error::Result;
use crate::expr::Expr;
use crate::geometry::{check_duality, cusp_at, evaluation_character};
use crate::jets::{jet_dim, JetSpace};
use crate::linalg::{max_abs_matrix, unit_vector, Tolerances};
use crate::multiindex::{IndexTable, MultiIndex};
use crate::poly::Poly;
use crate::series::{Mode, SeriesSpace};
use crate::spectra::{central_subalgebras, dauns_hofmann_check, fourier_check, FiniteAbelianGroup};

#[derive(Clone, Debug, Serialize)]
pub struct Criterion {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub metrics: BTreeMap<String, Value>,
    pub failures: Vec<String>,
}

impl Criterion {
    fn new(id: u32, name: &str) -> Self {
        Criterion {
            id,
            name: name.to_string(),
            passed: true,
            metrics: BTreeMap::new(),
            failures: Vec::new(),
        }
    }

    fn metric(&mut self, key: &str, v: impl Into<Value>) {
        self.metrics.insert(key.to_string(), v.into());
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.passed = false;
            self.failures.push(what.into());
        }
    }

    fn fail_on<T>(&mut self, r: Result<T>, ctx: &str) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.require(false, format!("{ctx}: {e}"));
                None
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Config {
    pub seed: u64,
    /// Overrides the sweep sizes of the randomized criteria.
    pub instances: Option<usize>,
    pub tol: Tolerances,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 1,
            instances: None,
            tol: Tolerances::default(),
        }
    }
}

impl Config {
    fn count(&self, default: usize) -> usize {
        self.instances.unwrap_or(default)
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt)
    }
}

pub const SERIES_BOUND: f64 = 1e-10;
pub const ROUNDTRIP_BOUND: f64 = 1e-12;
pub const HOMOMORPHISM_BOUND: f64 = 1e-10;
pub const COMMUTATOR_BOUND: f64 = 1e-10;
pub const JET_BOUND: f64 = 1e-9;
pub const IDEMPOTENCE_BOUND: f64 = 1e-12;
pub const CONGRUENCE_BOUND: f64 = 1e-9;
pub const FOURIER_BOUND: f64 = 1e-10;

/// Coefficient algebras for the series sweep.
pub fn series_coefficients() -> Vec<(&'static str, Algebra)> {
    vec![
        ("C", function_algebra(1)),
        ("M2", matrix_algebra(2)),
        ("M3", matrix_algebra(3)),
        ("C4", function_algebra(4)),
    ]
}

/// `(m, N)` shapes for the series sweep.
pub const SERIES_SHAPES: [(usize, u32); 6] = [(1, 5), (2, 2), (2, 4), (3, 1), (3, 3), (3, 5)];

/// Associativity, unit and `(xy)* = y* x*` in `B[[m]]≤N`.
pub fn series_axioms(cfg: &Config) -> Criterion {
    let mut c = Criterion::new(1, "series axioms");
    let triples = cfg.count(100);
    let mut rng = cfg.rng(1);
    let (mut assoc, mut unit, mut star) = (0.0f64, 0.0f64, 0.0f64);
    for (name, b) in series_coefficients() {
        for &(m, n) in &SERIES_SHAPES {
            let Some(space) = c.fail_on(SeriesSpace::new(b.clone(), m, n, Mode::Series), name) else {
                continue;
            };
            let one = space.unit();
            for t in 0..triples {
                let fill = [1.0, 0.5, 0.2][t % 3];
                let x = space.random(&mut rng, fill);
                let y = space.random(&mut rng, fill);
                let z = space.random(&mut rng, fill);
                let r = (|| -> Result<(f64, f64, f64)> {
                    let a = x.mul(&y)?.mul(&z)?.distance(&x.mul(&y.mul(&z)?)?)?;
                    let u = one.mul(&x)?.distance(&x)?.max(x.mul(&one)?.distance(&x)?);
                    let s = x.mul(&y)?.involve()?.distance(&y.involve()?.mul(&x.involve()?)?)?;
                    Ok((a, u, s))
                })();
                if let Some((a, u, s)) = c.fail_on(r, name) {
                    assoc = assoc.max(a);
                    unit = unit.max(u);
                    star = star.max(s);
                }
            }
        }
    }
    c.metric("triples_per_shape", triples);
    c.metric("associativity", assoc);
    c.metric("unit", unit);
    c.metric("star_antihomomorphism", star);
    c.require(assoc < SERIES_BOUND, format!("associativity residual {assoc:.3e}"));
    c.require(unit < SERIES_BOUND, format!("unit residual {unit:.3e}"));
    c.require(star < SERIES_BOUND, format!("involution residual {star:.3e}"));
    c
}

/// The random system specs used by the bijection and characterization
/// sweeps; `i` picks the shape deterministically.
pub fn system_spec(i: usize) -> RandomSystemSpec {
    let shapes: [(usize, u32); 5] = [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2)];
    let blocks: [&[usize]; 4] = [&[1], &[2], &[1, 1], &[2, 1]];
    let twists = [Twist::None, Twist::Central, Twist::General];
    let (m, order) = shapes[i % shapes.len()];
    RandomSystemSpec {
        m,
        order,
        blocks: blocks[(i / 2) % blocks.len()].to_vec(),
        twist: twists[i % twists.len()],
    }
}

/// `D ↦ h ↦ D` and `h ↦ D ↦ h` round trips, and multiplicativity of `h`.
pub fn bijection(cfg: &Config) -> Criterion {
    let mut c = Criterion::new(2, "derivative-system bijection");
    let count = cfg.count(50);
    let mut rng = cfg.rng(2);
    let (mut rt_sys, mut rt_hom, mut mult, mut unital) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut star: f64 = 0.0;
    for i in 0..count {
        let spec = system_spec(i);
        let r = (|| -> Result<(f64, f64, f64, f64, f64)> {
            let sys = random_system(&mut rng, &spec)?;
            let h = sys.to_homomorphism(&cfg.tol)?;
            let back = DerivativeSystem::from_homomorphism(&h, &cfg.tol)?;
            let a = sys
                .ops()
                .iter()
                .zip(back.ops())
                .map(|(x, y)| max_abs_matrix(&(x - y)))
                .fold(0.0, f64::max);
            let h2 = back.to_homomorphism(&cfg.tol)?;
            let b = max_abs_matrix(&(&h.op.matrix - &h2.op.matrix));
            Ok((a, b, h.multiplicative_residual(), h.unital_residual(), h.involutive_residual().unwrap_or(0.0)))
        })();
        if let Some((a, b, m, u, s)) = c.fail_on(r, &format!("system {i}")) {
            rt_sys = rt_sys.max(a);
            rt_hom = rt_hom.max(b);
            mult = mult.max(m);
            unital = unital.max(u);
            star = star.max(s);
        }
    }
    c.metric("systems", count);
    c.metric("roundtrip_system", rt_sys);
    c.metric("roundtrip_homomorphism", rt_hom);
    c.metric("multiplicative", mult);
    c.metric("unital", unital);
    c.metric("involutive", star);
    c.require(rt_sys <= ROUNDTRIP_BOUND, format!("system round trip {rt_sys:.3e}"));
    c.require(rt_hom <= ROUNDTRIP_BOUND, format!("homomorphism round trip {rt_hom:.3e}"));
    c.require(mult < HOMOMORPHISM_BOUND, format!("multiplicativity {mult:.3e}"));
    c.require(unital < HOMOMORPHISM_BOUND, format!("unit {unital:.3e}"));
    c.require(star < HOMOMORPHISM_BOUND, format!("involution {star:.3e}"));
    c
}

/// One system of the characterization sweep and whether the construction
/// makes it a negative instance (values of `D_1` outside `Z^1(D_0)`).
pub fn characterization_instance<R: Rng + ?Sized>(rng: &mut R, i: usize) -> Result<(DerivativeSystem, Option<bool>)> {
    match i % 5 {
        0 => {
            let m = 1 + (i / 5) % 2;
            let order = 1 + ((i / 10) % 3) as u32;
            let s: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
            Ok((taylor_system(m, order, order + 1, &s)?, Some(true)))
        }
        r => {
            let spec = RandomSystemSpec {
                m: 1 + (i / 5) % 2,
                order: 1 + ((i / 10) % 3) as u32,
                blocks: match r {
                    1 | 2 => vec![1, 1],
                    3 => vec![2, 1],
                    _ => vec![2],
                },
                twist: match r {
                    1 | 3 => Twist::General,
                    2 => Twist::Central,
                    _ => Twist::General,
                },
            };
            let positive = !(spec.twist == Twist::General && spec.blocks.len() >= 2);
            Ok((random_system(rng, &spec)?, Some(positive)))
        }
    }
}

/// Predicates (i)-(iii) agree, and the commutator formula for `[D_k, a]`.
pub fn characterization(cfg: &Config) -> Criterion {
    let mut c = Criterion::new(3, "differential characterization");
    let count = cfg.count(50);
    let mut rng = cfg.rng(3);
    let (mut negatives, mut positives, mut disagreements, mut mismatched) = (0usize, 0usize, 0usize, 0usize);
    let mut comm: f64 = 0.0;
    let mut cross: f64 = 0.0;
    let mut max_order = 0u32;
    for i in 0..count {
        let Some((sys, expected)) = c.fail_on(characterization_instance(&mut rng, i), &format!("system {i}")) else {
            continue;
        };
        max_order = max_order.max(sys.order());
        let Some(r) = c.fail_on(check_diffsys_characterization(&sys, &cfg.tol), &format!("system {i}")) else {
            continue;
        };
        if !r.agree {
            disagreements += 1;
            c.failures.push(format!("system {i}: predicates disagree at {:?}", r.witness));
        }
        if r.predicate_i {
            positives += 1;
        } else {
            negatives += 1;
        }
        if expected.is_some_and(|e| e != r.predicate_i) {
            mismatched += 1;
        }
        comm = comm.max(r.commutator_residual);
        cross = cross.max(r.cross_check);
    }
    c.metric("systems", count);
    c.metric("positives", positives);
    c.metric("negatives", negatives);
    c.metric("disagreements", disagreements);
    c.metric("construction_mismatches", mismatched);
    c.metric("commutator_residual", comm);
    c.metric("random_cross_check", cross);
    c.metric("max_order", max_order);
    c.require(disagreements == 0, format!("{disagreements} disagreements"));
    c.require(negatives >= 5.min(count / 5), format!("only {negatives} negatives"));
    c.require(mismatched == 0, format!("{mismatched} systems contradict their construction"));
    c.require(comm < COMMUTATOR_BOUND, format!("commutator formula residual {comm:.3e}"));
    c
}

/// `span{1, E_12} ⊆ M_2`
pub fn nonstar_inclusion(tol: &Tolerances) -> Result<crate::algebra::LinearOp> {
    let m2 = matrix_algebra(2);
    Ok(subalgebra(&m2, &[m2.unit().clone(), unit_vector(4, 1)], tol)?.1)
}

/// `Z^1 = Z^2` for random `*`-subalgebras of `M_d`, and the non-`*`-closed
/// counterexample.
pub fn stabilization(cfg: &Config) -> Criterion {
    let mut c = Criterion::new(4, "Z-tower stabilization");
    let count = cfg.count(100);
    let mut rng = cfg.rng(4);
    let mut failures = 0usize;
    let mut dims_seen = std::collections::BTreeSet::new();
    for i in 0..count {
        let d = 1 + i % 5;
        let r = random_star_subalgebra(&mut rng, d, &cfg.tol)
            .and_then(|(a, inc)| Ok((a.dim(), check_stabilization(&inc, true, &cfg.tol)?)));
        if let Some((ad, rep)) = c.fail_on(r, &format!("instance {i}")) {
            dims_seen.insert((d, ad));
            if !rep.stabilized {
                failures += 1;
                c.failures.push(format!("instance {i}: dims {:?}", rep.dims));
            }
        }
    }
    c.metric("instances", count);
    c.metric("distinct_shapes", dims_seen.len());
    c.metric("unstabilized", failures);
    c.require(failures == 0, format!("{failures} instances fail to stabilize"));
    if let Some(phi) = c.fail_on(nonstar_inclusion(&cfg.tol), "non-*-closed instance") {
        let dims = z_tower(&phi, 2, &cfg.tol).dims();
        let refused = check_stabilization(&phi, true, &cfg.tol).is_err();
        c.metric("nonstar_dims", json!(dims));
        c.metric("nonstar_refused", refused);
        c.require(dims == vec![0, 2, 3], format!("non-*-closed dims {dims:?}"));
        c.require(refused, "precondition check accepted a non-involutive map");
    }
    c
}

fn random_poly<R: Rng + ?Sized>(rng: &mut R, m: usize, degree: u32) -> Poly {
    let table = IndexTable::new(m, degree);
    let mut terms: Vec<(MultiIndex, f64)> = Vec::new();
    for k in table.iter() {
        if rng.random::<f64>() < 0.7 {
            terms.push((k.clone(), rng.random_range(-1.0..1.0)));
        }
    }
    Poly::from_terms(m, terms).expect("matching variable count")
}

fn random_point<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<f64> {
    (0..m).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Taylor jets equal linear-algebra quotient jets; `dim J = C(m+n, m)`.
pub fn jet_oracles(cfg: &Config) -> Criterion {
    let mut c = Criterion::new(5, "jet oracle equivalence");
    let count = cfg.count(200);
    let mut rng = cfg.rng(5);
    let mut worst: f64 = 0.0;
    let mut bad_dims = 0usize;
    for i in 0..count {
        let m = 1 + i % 3;
        let n = rng.random_range(0..=4u32);
        // keep the ambient spaces small in three variables
        let extra = if m == 3 { rng.random_range(0..=1) } else { rng.random_range(0..=2) };
        let deg = n + extra;
        let s = random_point(&mut rng, m);
        let f = random_poly(&mut rng, m, deg);
        let Some(js) = c.fail_on(JetSpace::new(&s, n, Some(deg), &cfg.tol), &format!("instance {i}")) else {
            continue;
        };
        if js.dim() as u128 != jet_dim(m, n) {
            bad_dims += 1;
        }
        let a = js.jet_taylor(&f);
        if let Some(b) = c.fail_on(js.jet_linear(&f), &format!("instance {i}")) {
            let scale = 1.0 + a.coords.iter().fold(0.0f64, |x, y| x.max(y.abs()));
            let d = a.coords.iter().zip(&b.coords).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            worst = worst.max(d / scale);
        }
    }
    c.metric("instances", count);
    c.metric("max_relative_difference", worst);
    c.metric("dimension_mismatches", bad_dims);
    c.require(worst <= JET_BOUND, format!("jet oracles differ by {worst:.3e}"));
    c.require(bad_dims == 0, format!("{bad_dims} jet spaces with wrong dimension"));
    c
}

/// Idempotence of `E_s^n` and multiplicativity modulo `I_s^{n+1}`.
pub fn truncation_laws(cfg: &Config) -> Criterion {
    let mut c = Criterion::new(6, "Taylor truncation laws");
    let count = cfg.count(100);
    let mut rng = cfg.rng(6);
    let (mut idem, mut cong, mut retrunc) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..count {
        let m = 1 + i % 2;
        let p = rng.random_range(0..=3u32);
        let q = p + rng.random_range(0..=2u32);
        let s = random_point(&mut rng, m);
        let f = random_poly(&mut rng, m, 4);
        let g = random_poly(&mut rng, m, 4);
        let ep = f.taylor(&s, p);
        let scale = 1.0 + ep.norm();
        idem = idem.max((&ep.taylor(&s, q) - &ep).norm() / scale);

        let n = p;
        let fg = &f * &g;
        let prod = &f.taylor(&s, n) * &g.taylor(&s, n);
        let lhs = fg.taylor(&s, n);
        let deg = fg.degree().unwrap_or(0).max(prod.degree().unwrap_or(0)).max(n);
        if let Some(js) = c.fail_on(JetSpace::new(&s, n, Some(deg), &cfg.tol), &format!("pair {i} s={s:?} n={n} deg={deg}")) {
            if let Some(r) = c.fail_on(js.congruence_residual(&lhs, &prod), &format!("pair {i}")) {
                cong = cong.max(r / (1.0 + lhs.norm() + prod.norm()));
            }
        }
        retrunc = retrunc.max((&lhs - &prod.taylor(&s, n)).norm() / (1.0 + lhs.norm()));
    }
    c.metric("pairs", count);
    c.metric("idempotence", idem);
    c.metric("congruence", cong);
    c.metric("retruncated_equality", retrunc);
    c.require(idem <= IDEMPOTENCE_BOUND, format!("idempotence residual {idem:.3e}"));
    c.require(cong < CONGRUENCE_BOUND, format!("congruence residual {cong:.3e}"));
    c.require(retrunc < CONGRUENCE_BOUND, format!("re-truncated residual {retrunc:.3e}"));
    c
}

/// The algebra and character families of the duality sweep.
pub fn duality_cases(tol: &Tolerances) -> Result<Vec<(String, Algebra, Character)>> {
    let points = [-1.0, -0.4, 0.0, 0.5, 1.3];
    let mut out = Vec::new();
    for m in 1..=3usize {
        for (i, &x) in points.iter().enumerate() {
            let s: Vec<f64> = (0..m).map(|j| x + 0.1 * j as f64 * i as f64).collect();
            out.push((format!("poly m={m} at {s:?}"), jet_algebra(m, 3, &s)?, evaluation_character(m, 3, &s)));
        }
    }
    for &x in &points {
        let (a, ev) = cusp_at(6, x, tol)?;
        out.push((format!("cusp at {x}"), a, ev));
    }
    let c5 = function_algebra(5);
    for i in 0..5 {
        out.push((format!("C^5 at {i}"), c5.clone(), Character::new(unit_vector(5, i))));
    }
    Ok(out)
}

/// Tangent and cotangent dimensions agree and the pairing is nondegenerate.
pub fn duality(cfg: &Config) -> Criterion {
    let mut c = Criterion::new(7, "tangent-cotangent duality");
    let Some(cases) = c.fail_on(duality_cases(&cfg.tol), "cases") else {
        return c;
    };
    let mut held = 0usize;
    let mut annihilation: f64 = 0.0;
    let mut dims = BTreeMap::new();
    for (name, a, s) in &cases {
        if let Some(r) = c.fail_on(check_duality(a, s, &cfg.tol), name) {
            annihilation = annihilation.max(r.annihilation_residual);
            dims.entry(r.tangent_dim).and_modify(|n| *n += 1).or_insert(1usize);
            if r.holds {
                held += 1;
            } else {
                c.failures.push(format!("{name}: {r:?}"));
                c.passed = false;
            }
        }
    }
    c.metric("cases", cases.len());
    c.metric("held", held);
    c.metric("annihilation", annihilation);
    c.metric("tangent_dims", json!(dims));
    c.require(held == cases.len(), format!("{held} of {} cases", cases.len()));
    c
}

pub const PERIODIC: [&str; 2] = [
    "(sin (* (const 6.283185307179586) (var 0)))",
    "(cos (* (const 6.283185307179586) (var 0)))",
];

/// Label, generator sources, expected status and expected failing condition.
pub type CanonicalCase = (&'static str, Vec<&'static str>, Status, Option<(Condition, Witness)>);

/// The four canonical generator sets with their expected outcome: status,
/// failing condition and witness.
pub fn canonical_cases() -> Vec<CanonicalCase> {
    vec![
        ("{x}", vec!["(var 0)"], Status::Pass, None),
        (
            "{x^2, x^3}",
            vec!["(pow (var 0) 2)", "(pow (var 0) 3)"],
            Status::Fail,
            Some((Condition::Tangent, Witness::Point(vec![0.0]))),
        ),
        (
            "{sin 2pi x, cos 2pi x}",
            PERIODIC.to_vec(),
            Status::Fail,
            Some((Condition::Separation, Witness::Pair(vec![0.0], vec![1.0]))),
        ),
        (
            "{flat-bump}",
            vec!["(flatbump (var 0))"],
            Status::Fail,
            Some((Condition::Tangent, Witness::Point(vec![0.0]))),
        ),
    ]
}

fn verdict_matches(v: &Verdict, status: Status, expect: &Option<(Condition, Witness)>) -> bool {
    v.status == status
        && expect
            .as_ref()
            .is_none_or(|(cond, w)| v.reasons.iter().any(|r| r.condition == *cond && r.witness == *w))
}

/// PASS for `{x}`, the right failing condition and witness for the others.
pub fn envelope_cases(cfg: &Config) -> Criterion {
    let mut c = Criterion::new(8, "envelope classifier");
    let sample = Sample::new(vec![[-1.0, 1.0]], 201).expect("valid box");
    let opts = EnvelopeOptions::default();
    let mut matched = 0usize;
    let mut deterministic = true;
    for (name, srcs, status, expect) in canonical_cases() {
        let gens: Vec<Expr> = srcs.iter().map(|s| Expr::parse(s).expect("canonical expression")).collect();
        let Some(v) = c.fail_on(envelope_verdict(&gens, &sample, &opts, &cfg.tol), name) else {
            continue;
        };
        let again = envelope_verdict(&gens, &sample, &opts, &cfg.tol).ok();
        deterministic &= again.as_ref() == Some(&v);
        let summary: Vec<String> = v
            .reasons
            .iter()
            .map(|r| format!("{:?} at {:?}", r.condition, r.witness))
            .collect();
        c.metric(name, json!({"status": v.status, "reasons": summary}));
        if verdict_matches(&v, status, &expect) {
            matched += 1;
        } else {
            c.require(false, format!("{name}: got {:?} {summary:?}", v.status));
        }
    }
    c.metric("grid", sample.grid);
    c.metric("matched", matched);
    c.metric("deterministic", deterministic);
    c.require(deterministic, "repeated runs differ");
    c
}

/// The algebras of the Dauns-Hofmann sweep.
pub fn dauns_hofmann_algebras() -> Result<Vec<(&'static str, Algebra)>> {
    Ok(vec![
        ("M2+M3", direct_sum(&[matrix_algebra(2), matrix_algebra(3)])?),
        ("M3", matrix_algebra(3)),
        ("C4", function_algebra(4)),
        ("M2+C2", direct_sum(&[matrix_algebra(2), function_algebra(2)])?),
    ])
}

/// `v: F -> ⊕ fibers` is a unital `*`-isomorphism for `C = Z(F)` and for up
/// to two proper unital subalgebras of `Z(F)`.
pub fn dauns_hofmann(cfg: &Config) -> Criterion {
    let mut c = Criterion::new(9, "finite Dauns-Hofmann");
    let Some(algebras) = c.fail_on(dauns_hofmann_algebras(), "algebras") else {
        return c;
    };
    let mut checked = 0usize;
    let mut worst: f64 = 0.0;
    for (name, f) in algebras {
        let Some(subs) = c.fail_on(central_subalgebras(&f, &cfg.tol), name) else {
            continue;
        };
        let (full, proper) = subs.split_last().expect("center is always listed");
        let mut chosen = vec![("Z(F)".to_string(), full.clone())];
        chosen.extend(proper.iter().take(2).map(|b| (format!("{}-block", b.len()), b.clone())));
        c.metric(&format!("{name} proper central subalgebras"), proper.len());
        for (label, basis) in chosen {
            let ctx = format!("{name} over {label}");
            if let Some(r) = c.fail_on(dauns_hofmann_check(&f, &basis, 10, cfg.seed, &cfg.tol), &ctx) {
                checked += 1;
                worst = worst
                    .max(r.multiplicative_residual)
                    .max(r.unital_residual)
                    .max(r.involutive_residual.unwrap_or(f64::INFINITY));
                let ledger: usize = r.fiber_dims.iter().sum();
                c.metric(&ctx, json!({"fibers": r.fiber_dims, "dim": r.dim}));
                c.require(ledger == r.dim, format!("{ctx}: fibers sum to {ledger}, dim {}", r.dim));
                c.require(r.isomorphism, format!("{ctx}: not an isomorphism"));
            }
        }
    }
    c.metric("pairs_checked", checked);
    c.metric("max_residual", worst);
    c
}

pub const FOURIER_GROUPS: [&str; 6] = ["Z2", "Z3", "Z4", "Z2xZ2", "Z6", "Z8xZ2"];

/// Convolution theorem, involution compatibility and `|characters| = |G|`.
pub fn fourier(cfg: &Config) -> Criterion {
    let mut c = Criterion::new(10, "discrete Fourier analogue");
    let mut worst: f64 = 0.0;
    for spec in FOURIER_GROUPS {
        let g = FiniteAbelianGroup::parse(spec).expect("valid group");
        if let Some(r) = c.fail_on(fourier_check(&g, 20, cfg.seed, &cfg.tol), spec) {
            worst = worst.max(r.convolution_residual).max(r.involution_residual);
            c.metric(spec, json!({"characters": r.characters_found, "order": r.order}));
            c.require(r.characters_found == Some(g.order()), format!("{spec}: {:?} characters", r.characters_found));
            c.require(r.characters_matched == Some(true), format!("{spec}: characters not dual-group evaluations"));
            c.require(r.holds, format!("{spec}: {r:?}"));
        }
    }
    c.metric("max_residual", worst);
    c.require(worst < FOURIER_BOUND, format!("residual {worst:.3e}"));
    c
}

pub fn run_all(cfg: &Config) -> Vec<Criterion> {
    vec![
        series_axioms(cfg),
        bijection(cfg),
        characterization(cfg),
        stabilization(cfg),
        jet_oracles(cfg),
        truncation_laws(cfg),
        duality(cfg),
        envelope_cases(cfg),
        dauns_hofmann(cfg),
        fourier(cfg),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::cusp;

    fn small() -> Config {
        Config {
            instances: Some(6),
            ..Config::default()
        }
    }

    #[test]
    fn small_sweeps_pass() {
        let cfg = small();
        for c in [bijection(&cfg), stabilization(&cfg), jet_oracles(&cfg), truncation_laws(&cfg)] {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn cusp_duality() {
        let t = Tolerances::default();
        let a = cusp(6).unwrap();
        let r = check_duality(&a, &Character::new(unit_vector(6, 0)), &t).unwrap();
        assert!(r.holds);
    }
}
