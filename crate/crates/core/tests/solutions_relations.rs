use pivlab::exactalg::{Poly, RatFunc};
use pivlab::families::{adler_moser_wronskian, hermite, hermite_wronskian, HermiteSequence, TauVector};
use pivlab::monodromy::{trivial_monodromy_exact, trivial_monodromy_report};
use pivlab::relations::{calogero_report, generalized_stieltjes_check, stieltjes_report, theorem1_check, ChargeConfig};
use pivlab::roots::complex_roots;
use pivlab::solutions::{build_f, partial_fractions, piv_w_from_f, potential_from_f, SolutionSpec};
use pivlab::{mp, Complex, Rational};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const P: u32 = 256;

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

/// `Σ m_i/(z − a_i) + ν − μz`.
fn class_int(poles: &[(Rational, i64)], nu: &Rational, mu: &Rational) -> RatFunc {
    let mut f = RatFunc::from_poly(Poly::new(vec![nu.clone(), Rational::from(-mu)]));
    for (a, m) in poles {
        let term = RatFunc::new(
            Poly::from_ints(&[*m]),
            Poly::new(vec![Rational::from(-a), Rational::from(1)]),
        )
        .unwrap();
        f = &f + &term;
    }
    f
}

fn distinct_poles() -> impl Strategy<Value = Vec<(Rational, i64)>> {
    prop::collection::btree_map(
        (-12i64..=12, 1i64..=4),
        prop::sample::select(vec![-3i64, -2, -1, 1, 2, 3]),
        1..=5,
    )
    .prop_map(|m| m.into_iter().map(|((n, d), r)| (q(n, d), r)).collect::<Vec<_>>())
    .prop_map(|mut v| {
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v.dedup_by(|a, b| a.0 == b.0);
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn partial_fraction_round_trip(
        poles in distinct_poles(),
        nu in (-5i64..=5, 1i64..=3),
        mu in (-3i64..=3, 1i64..=2),
    ) {
        let (nu, mu) = (q(nu.0, nu.1), q(mu.0, mu.1));
        let f = class_int(&poles, &nu, &mu);
        let d = partial_fractions(&f, 128).unwrap();
        prop_assert_eq!(&d.nu, &nu);
        prop_assert_eq!(&d.mu, &mu);
        prop_assert_eq!(d.rebuild(), f);
        prop_assert_eq!(d.poles.len(), poles.len());
        for (a, m) in &poles {
            let hit = d.poles.iter().find(|p| p.location.exact.as_ref() == Some(a));
            prop_assert!(hit.is_some_and(|p| p.residue == *m), "pole {} missing", a);
        }
    }
}

#[test]
fn irrational_poles_round_trip() {
    // 2 (log(z² + z + 3))' − (log(z² − 2))' + 1/2 − z
    let g1 = Poly::from_ints(&[3, 1, 1]);
    let g2 = Poly::from_ints(&[-2, 0, 1]);
    let f = &(&RatFunc::log_derivative(&g1).unwrap().scale(&q(2, 1)) - &RatFunc::log_derivative(&g2).unwrap())
        + &RatFunc::from_poly(Poly::new(vec![q(1, 2), q(-1, 1)]));
    let d = partial_fractions(&f, 128).unwrap();
    assert_eq!(d.rebuild(), f);
    assert_eq!(d.poles.len(), 4);
    assert!(d.poles.iter().all(|p| p.location.exact.is_none()));
    let mut ms: Vec<i64> = d.poles.iter().map(|p| p.residue).collect();
    ms.sort();
    assert_eq!(ms, vec![-1, -1, 2, 2]);
}

#[test]
fn outside_the_class_is_rejected() {
    let half = RatFunc::new(Poly::from_ints(&[1]), Poly::from_ints(&[0, 2])).unwrap();
    assert!(partial_fractions(&half, 128).is_err());
    let double = RatFunc::new(Poly::from_ints(&[1]), Poly::from_ints(&[0, 0, 1])).unwrap();
    assert!(partial_fractions(&double, 128).is_err());
    let quad = RatFunc::from_poly(Poly::from_ints(&[0, 0, 1]));
    assert!(partial_fractions(&quad, 128).is_err());
}

#[test]
fn stieltjes_implies_calogero_at_hermite_zeros() {
    for n in 1..=12 {
        let zs: Vec<Complex> = complex_roots(&hermite(n), P)
            .unwrap()
            .into_iter()
            .map(|r| r.value)
            .collect();
        let cfg = ChargeConfig::unit(zs);
        let s = stieltjes_report(&cfg).unwrap();
        let c = calogero_report(&cfg).unwrap();
        assert!(s.pass && s.max_residual() < 1e-60, "n = {n}");
        assert!(c.pass && c.max_residual() < 1e-25, "n = {n}");
    }
}

#[test]
fn calogero_without_stieltjes() {
    let ks = HermiteSequence::new(vec![1, 2]).unwrap();
    let zs: Vec<Complex> = complex_roots(&hermite_wronskian(&ks), P)
        .unwrap()
        .into_iter()
        .map(|r| r.value)
        .collect();
    let cfg = ChargeConfig::unit(zs);
    assert!(calogero_report(&cfg).unwrap().pass);
    let s = stieltjes_report(&cfg).unwrap();
    assert!(!s.pass);
    let sqrt2 = rug::Float::with_val(P, 2).sqrt();
    for r in &s.residuals {
        assert!(rug::Float::with_val(P, r - &sqrt2).abs() < 1e-30);
    }
}

#[test]
fn perturbation_breaks_stieltjes() {
    for n in 2..=12 {
        let mut zs: Vec<Complex> = complex_roots(&hermite(n), P)
            .unwrap()
            .into_iter()
            .map(|r| r.value)
            .collect();
        zs[0] += rug::Float::with_val(P, 1e-3);
        let s = stieltjes_report(&ChargeConfig::unit(zs)).unwrap();
        assert!(!s.pass && s.max_residual() > 1e-4, "n = {n}");
    }
}

fn hermite_mode_f(ks: &[u32], k: u32) -> RatFunc {
    build_f(&SolutionSpec::Hermite {
        ks: HermiteSequence::new(ks.to_vec()).unwrap(),
        k_extra: k,
    })
    .unwrap()
}

#[test]
fn hermite_mode_potential_shape() {
    // u − (z² − 2(log W(ks))'') is constant
    for (ks, k) in [
        (vec![], 1),
        (vec![1], 2),
        (vec![1, 2], 4),
        (vec![2, 3], 1),
        (vec![1, 3, 4], 6),
    ] {
        let f = hermite_mode_f(&ks, k);
        let u = potential_from_f(&f);
        let w = hermite_wronskian(&HermiteSequence::new(ks.clone()).unwrap());
        let z = RatFunc::z();
        let shape = &(&z * &z) - &RatFunc::log_derivative(&w).unwrap().derivative().scale(&q(2, 1));
        assert!((&u - &shape).is_constant(), "ks = {ks:?}, k = {k}");
        assert_eq!(piv_w_from_f(&f), (&f + &z).scale(&q(-1, 1)));
    }
}

/// A mix of constructed solutions (which pass) and random members of the
/// class (which mostly fail); the two verifiers must agree on all of them.
fn equivalence_corpus(count: usize, seed: u64) -> Vec<RatFunc> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let f = match out.len() % 5 {
            0 => {
                // (log W_{n+1}/W_n)' at τ = 0 is (n+1)/z
                let n = rng.gen_range(0..3usize);
                let zero = |k: usize| TauVector(vec![Rational::new(); k.saturating_sub(1)]);
                let a = adler_moser_wronskian(n + 1, &zero(n + 1)).unwrap();
                let b = adler_moser_wronskian(n, &zero(n)).unwrap();
                &RatFunc::log_derivative(&a).unwrap() - &RatFunc::log_derivative(&b).unwrap()
            }
            1 => {
                let a = rng.gen_range(-3i64..=3);
                class_int(
                    &[(q(a, 1), rng.gen_range(-3i64..=-1))],
                    &Rational::from(rng.gen_range(-2..=2)),
                    &Rational::new(),
                )
            }
            2 => {
                let n = rng.gen_range(1..=5u32);
                let hn = RatFunc::log_derivative(&hermite(n)).unwrap();
                &hn - &RatFunc::z()
            }
            _ => {
                let k = rng.gen_range(1..=4);
                let mut poles = Vec::new();
                for _ in 0..k {
                    let a = q(rng.gen_range(-8..=8), rng.gen_range(1..=3));
                    if poles.iter().all(|(b, _)| *b != a) {
                        let m = [-3, -2, -1, 1, 2, 3][rng.gen_range(0..6)];
                        poles.push((a, m));
                    }
                }
                let mu = Rational::from(rng.gen_range(0..=2));
                class_int(&poles, &Rational::from(rng.gen_range(-2..=2)), &mu)
            }
        };
        out.push(f);
    }
    out
}

#[test]
fn stieltjes_and_monodromy_agree() {
    let corpus = equivalence_corpus(50, 11);
    let mut passes = 0;
    let mut max_residue = 0;
    for f in &corpus {
        let s = generalized_stieltjes_check(f, P).unwrap();
        let m = trivial_monodromy_report(&potential_from_f(f), P).unwrap();
        assert_eq!(s.pass, m.pass, "f = {f:?}");
        if s.pass {
            passes += 1;
        }
        let d = partial_fractions(f, 128).unwrap();
        max_residue = max_residue.max(d.poles.iter().map(|p| p.residue.abs()).max().unwrap_or(0));
    }
    assert!((10..50).contains(&passes), "passes = {passes}");
    assert_eq!(max_residue, 3);
}

#[test]
fn adler_moser_potentials_have_trivial_monodromy() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 1..=4usize {
        for _ in 0..3 {
            let taus = TauVector((1..n).map(|_| q(rng.gen_range(-9..=9), rng.gen_range(1..=3))).collect());
            let w = adler_moser_wronskian(n, &taus).unwrap();
            let u = RatFunc::log_derivative(&w).unwrap().derivative().scale(&q(-2, 1));
            let rep = trivial_monodromy_report(&u, P).unwrap();
            assert!(rep.pass, "n = {n}, taus = {taus:?}");
            assert!(trivial_monodromy_exact(&u, P).unwrap());
            let bent = u.scale(&q(101, 100));
            assert!(!trivial_monodromy_report(&bent, P).unwrap().pass);
        }
    }
}

#[test]
fn square_residue_vanishes_on_hermite_mode() {
    for (ks, k) in [(vec![], 1), (vec![1], 2), (vec![1, 2], 3), (vec![2], 3)] {
        let w = piv_w_from_f(&hermite_mode_f(&ks, k));
        assert!(theorem1_check(&w, P).unwrap().pass, "ks = {ks:?}");
        let shifted = &w + &RatFunc::constant(q(1, 1));
        assert!(!theorem1_check(&shifted, P).unwrap().pass);
    }
}

#[test]
fn charge_config_json() {
    let v = serde_json::json!({"points": [[0, 1], {"re": "0", "im": "-1"}], "charges": [1, 1], "nu": "0", "mu": "1"});
    let cfg = ChargeConfig::from_json(&v, 128).unwrap();
    assert_eq!(cfg.points[1], mp::cx_f64(0.0, -1.0, 128));
    let bad = serde_json::json!({"points": [[0, 1]], "charges": [1, 2]});
    assert!(ChargeConfig::from_json(&bad, 128).is_err());
}

fn linear_product(roots: &[Rational]) -> Poly {
    roots.iter().fold(Poly::one(), |p, a| {
        &p * &Poly::new(vec![Rational::from(-a), Rational::from(1)])
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Exact divisibility and the numeric residue test agree on
    /// `A'/A − B'/B + ν − μz` with simple rational roots.
    #[test]
    fn exact_and_numeric_stieltjes_agree(
        roots in prop::collection::btree_set((-6i64..=6, 1i64..=2), 1..=5),
        split in 0usize..=5,
        nu in -2i64..=2,
        mu in 0i64..=2,
    ) {
        let mut rs: Vec<Rational> = roots.into_iter().map(|(n, d)| q(n, d)).collect();
        rs.sort();
        rs.dedup();
        let cut = split.min(rs.len());
        let (a, b) = (linear_product(&rs[..cut]), linear_product(&rs[cut..]));
        let (nu, mu) = (Rational::from(nu), Rational::from(mu));
        let exact = pivlab::relations::stieltjes_exact_simple(&a, &b, &nu, &mu).unwrap();
        let f = &(&RatFunc::log_derivative(&a).unwrap() - &RatFunc::log_derivative(&b).unwrap())
            + &RatFunc::from_poly(Poly::new(vec![nu, (-mu)]));
        let numeric = generalized_stieltjes_check(&f, P).unwrap();
        prop_assert_eq!(exact, numeric.pass);
    }
}

#[test]
fn exact_stieltjes_examples() {
    let (zero, one) = (Rational::new(), Rational::from(1));
    let h1 = hermite(1);
    assert!(pivlab::relations::stieltjes_exact_simple(&Poly::from_ints(&[4, 0, 8]), &h1, &zero, &one).unwrap());
    assert!(
        !pivlab::relations::stieltjes_exact_simple(&Poly::from_ints(&[-1, 0, 4]), &Poly::one(), &zero, &one).unwrap()
    );
    assert!(
        pivlab::relations::stieltjes_exact_simple(&Poly::from_ints(&[0, 0, 1]), &Poly::one(), &zero, &one).is_err()
    );
}
