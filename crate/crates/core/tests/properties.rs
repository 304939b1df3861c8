use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use diffalg::algebra::Algebra;
use diffalg::diffcalc::{diff_order, poly_operator, random_star_subalgebra, z_tower, RelativeOp};
use diffalg::envelope::{envelope_verdict, EnvelopeOptions, Sample, Verdict};
use diffalg::expr::Expr;
use diffalg::jets::JetSpace;
use diffalg::linalg::{max_abs, random_vector, Tolerances, Vector, C64};
use diffalg::multiindex::{IndexTable, MultiIndex};
use diffalg::poly::Poly;
use diffalg::selftest::nonstar_inclusion;
use diffalg::series::{Mode, SeriesSpace};
use diffalg::spectra::{fourier_matrix, FiniteAbelianGroup};

fn tol() -> Tolerances {
    Tolerances::default()
}

fn choose(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn basis(a: &Algebra) -> Vec<Vector> {
    (0..a.dim()).map(|i| a.basis_vector(i)).collect()
}

fn poly_from(rng: &mut ChaCha8Rng, m: usize, degree: u32) -> Poly {
    let terms: Vec<(MultiIndex, f64)> = IndexTable::new(m, degree)
        .iter()
        .map(|k| (k.clone(), rng.random_range(-1.0..1.0)))
        .collect();
    Poly::from_terms(m, terms).unwrap()
}

proptest! {
    #[test]
    fn binomial_rows_sum_to_powers_of_two(k in prop::collection::vec(0u32..6, 1..4)) {
        let k = MultiIndex::new(k);
        let lower = k.lower_set();
        let boxes: usize = k.entries().iter().map(|&e| e as usize + 1).product();
        prop_assert_eq!(lower.len(), boxes);
        let sum: u128 = lower.iter().map(|l| k.binomial(l).unwrap()).sum();
        prop_assert_eq!(sum, 1u128 << k.degree());
    }

    #[test]
    fn multiindex_add_sub_round_trip(
        a in prop::collection::vec(0u32..8, 3),
        b in prop::collection::vec(0u32..8, 3),
    ) {
        let (a, b) = (MultiIndex::new(a), MultiIndex::new(b));
        let s = a.add(&b).unwrap();
        prop_assert!(a.le(&s) && b.le(&s));
        prop_assert_eq!(s.sub(&b).unwrap(), a.clone());
        prop_assert_eq!(s.degree(), a.degree() + b.degree());
        prop_assert_eq!(s.factorial() / a.factorial() / b.factorial(), s.binomial(&a).unwrap());
    }

    #[test]
    fn index_table_is_graded_and_invertible(m in 1usize..4, n in 0u32..7) {
        let t = IndexTable::new(m, n);
        prop_assert_eq!(t.len() as u64, choose(m as u64 + n as u64, m as u64));
        for i in 0..t.len() {
            prop_assert_eq!(t.position(t.get(i)), Some(i));
            if i > 0 {
                prop_assert!(t.get(i - 1).degree() <= t.get(i).degree());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn series_ring_laws(seed in any::<u64>(), shape in 0usize..4, fill in 0.2f64..1.0) {
        let (name, m, n) = [("matrix:2", 2, 3), ("func:3", 1, 5), ("matrix:3", 3, 2), ("func:1", 3, 4)][shape];
        let b = diffalg::algebra::from_name(name).unwrap();
        let space = SeriesSpace::new(b, m, n, Mode::Series).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y, z) = (space.random(&mut rng, fill), space.random(&mut rng, fill), space.random(&mut rng, fill));
        let assoc = x.mul(&y).unwrap().mul(&z).unwrap().distance(&x.mul(&y.mul(&z).unwrap()).unwrap()).unwrap();
        let dist = x.mul(&y.add(&z).unwrap()).unwrap()
            .distance(&x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap()).unwrap();
        let star = x.mul(&y).unwrap().involve().unwrap()
            .distance(&y.involve().unwrap().mul(&x.involve().unwrap()).unwrap()).unwrap();
        let twice = x.involve().unwrap().involve().unwrap().distance(&x).unwrap();
        prop_assert!(assoc < 1e-10 && dist < 1e-10 && star < 1e-10 && twice < 1e-12,
            "assoc {assoc:e} dist {dist:e} star {star:e} twice {twice:e}");
    }

    /// On a commutative source the iterated commutators are symmetric, and
    /// one commutator lowers the order: P ∈ Diff^n implies [P, a] ∈ Diff^(n-1).
    #[test]
    fn commutators_lower_the_order(seed in any::<u64>(), n in 3u32..6, top in 1u32..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = [rng.random_range(-1.0..1.0)];
        let terms: Vec<(Poly, MultiIndex)> = (0..=top)
            .map(|k| (poly_from(&mut rng, 1, 1), MultiIndex::from([k])))
            .collect();
        let p = poly_operator(1, n, &terms, top, &s).unwrap();
        let src = p.source().clone();
        let gens = basis(&src);
        let t = tol();
        let a = random_vector(&mut rng, src.dim());
        let b = random_vector(&mut rng, src.dim());
        let ab = p.commutator(&a).commutator(&b);
        let ba = p.commutator(&b).commutator(&a);
        prop_assert!((&ab.matrix - &ba.matrix).norm() < 1e-9 * (1.0 + ab.norm()));

        let order = diff_order(&p, &gens, n as usize + 1, &t).order;
        prop_assert!(order.is_some_and(|o| o <= top as usize), "order {order:?} above {top}");
        let o = order.unwrap();
        let lowered = diff_order(&p.commutator(&a), &gens, n as usize + 1, &t).order;
        prop_assert!(lowered.is_some_and(|l| l < o.max(1)), "[P, a] has order {lowered:?}, P has {o}");
    }

    #[test]
    fn jets_commute_with_translation(seed in any::<u64>(), m in 1usize..3, n in 0u32..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f = poly_from(&mut rng, m, n + 1);
        let at_s = JetSpace::new(&s, n, Some(n + 1), &tol()).unwrap();
        let at_0 = JetSpace::new(&vec![0.0; m], n, Some(n + 1), &tol()).unwrap();
        let moved = at_0.jet_linear(&f.translate(&s)).unwrap().coords;
        let direct = at_s.jet_linear(&f).unwrap().coords;
        let taylor = at_s.jet_taylor(&f).coords;
        for ((x, y), z) in moved.iter().zip(&direct).zip(&taylor) {
            prop_assert!((x - y).abs() < 1e-9 && (x - z).abs() < 1e-9, "{moved:?} {direct:?} {taylor:?}");
        }
    }
}

fn module_tower_agrees(phi: &diffalg::algebra::LinearOp, b: &Vector, depth: usize) -> Result<(), TestCaseError> {
    let t = tol();
    let tower = z_tower(phi, depth + 1, &t);
    let scaled = RelativeOp::of_action(phi).left_scale(b);
    let order = diff_order(&scaled, &basis(&phi.source), depth, &t).order;
    for n in 0..=depth {
        let in_diff = order.is_some_and(|o| o <= n);
        let in_z = tower.levels[n + 1].contains(b, &t);
        prop_assert_eq!(in_diff, in_z, "n = {}, order {:?}, dims {:?}", n, order, tower.dims());
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// b·φ ∈ Diff^n exactly when b ∈ Z^(n+1).
    #[test]
    fn scaled_homomorphism_order_matches_tower(seed in any::<u64>(), pick in prop::collection::vec(0usize..3, 4)) {
        let phi = nonstar_inclusion(&tol()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // coordinates drawn from {0, 1, random} so every tower level is hit
        let b = Vector::from_iterator(4, pick.iter().map(|&p| match p {
            0 => C64::new(0.0, 0.0),
            1 => C64::new(1.0, 0.0),
            _ => C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        }));
        module_tower_agrees(&phi, &b, 2)?;
    }

    #[test]
    fn scaled_star_inclusion_order_matches_tower(seed in any::<u64>(), d in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, phi) = random_star_subalgebra(&mut rng, d, &tol()).unwrap();
        let tower = z_tower(&phi, 1, &tol());
        // one element of the commutant and one generic element
        let z1 = &tower.levels[1];
        let inside = z1.basis().iter().fold(Vector::zeros(d * d), |acc, v| acc + v * C64::new(rng.random_range(-1.0..1.0), 0.0));
        module_tower_agrees(&phi, &inside, 1)?;
        module_tower_agrees(&phi, &random_vector(&mut rng, d * d), 1)?;
    }

    #[test]
    fn fourier_transform_round_trips(spec in prop::sample::select(vec!["Z2", "Z5", "Z3xZ3", "Z4xZ2", "Z2xZ2xZ2", "Z12"]), seed in any::<u64>()) {
        let g = FiniteAbelianGroup::parse(spec).unwrap();
        let n = g.order();
        let f = fourier_matrix(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_vector(&mut rng, n);
        let fx = &f * &x;
        let back = f.adjoint() * &fx / C64::new(n as f64, 0.0);
        prop_assert!(max_abs(&(back - &x)) < 1e-12);
        // Plancherel
        prop_assert!((fx.norm_squared() - n as f64 * x.norm_squared()).abs() < 1e-9 * (1.0 + fx.norm_squared()));
    }
}

fn verdict(srcs: &[String]) -> Verdict {
    let gens: Vec<Expr> = srcs.iter().map(|s| Expr::parse(s).unwrap()).collect();
    let sample = Sample::new(vec![[-1.0, 1.0]], 41).unwrap();
    envelope_verdict(&gens, &sample, &EnvelopeOptions::default(), &tol()).unwrap()
}

const GENERATORS: [&str; 5] = [
    "(var 0)",
    "(pow (var 0) 2)",
    "(pow (var 0) 3)",
    "(sin (* (const 6.283185307179586) (var 0)))",
    "(cos (* (const 6.283185307179586) (var 0)))",
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Rescaling generators by nonzero constants changes neither the
    /// status nor the failing conditions.
    #[test]
    fn envelope_verdict_ignores_rescaling(
        chosen in prop::sample::subsequence(GENERATORS.to_vec(), 1..3),
        scale in prop::sample::select(vec![-2.5, -0.5, 0.75, 3.0]),
    ) {
        let plain: Vec<String> = chosen.iter().map(|s| s.to_string()).collect();
        let scaled: Vec<String> = chosen.iter().map(|s| format!("(* (const {scale}) {s})")).collect();
        let (a, b) = (verdict(&plain), verdict(&scaled));
        prop_assert_eq!(a.status, b.status);
        let conds = |v: &Verdict| v.reasons.iter().map(|r| r.condition).collect::<Vec<_>>();
        prop_assert_eq!(conds(&a), conds(&b));
    }
}
