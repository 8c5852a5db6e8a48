//! Equilibria of the electrostatic systems: charged particles in the field
//! `ν − μz` (the Stieltjes system for unit charges) and the Calogero–Moser
//! system. Solved by damped Newton on the residual system with analytic
//! Jacobians, optionally deflated away from known solutions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::{Complex, Float, Rational};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactalg::Poly;
use crate::mp;
use crate::relations::{calogero_residual, stieltjes_residual, ChargeConfig};
use crate::roots::roots_with_multiplicity;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum System {
    /// `Σ_{j≠k} m_j/(z_k − z_j) + ν − μ z_k = 0`.
    Charged {
        nu: Rational,
        mu: Rational,
        charges: Vec<i64>,
    },
    /// `2 Σ_{j≠k} (z_k − z_j)^{−3} − z_k = 0`.
    Calogero,
}

impl System {
    /// Unit charges, `ν = 0`, `μ = 1`.
    pub fn stieltjes(n: usize) -> Self {
        System::Charged {
            nu: Rational::new(),
            mu: Rational::from(1),
            charges: vec![1; n],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            System::Charged { .. } => "stieltjes",
            System::Calogero => "calogero",
        }
    }

    fn config(&self, z: &[Complex]) -> ChargeConfig {
        match self {
            System::Charged { nu, mu, charges } => ChargeConfig {
                points: z.to_vec(),
                charges: charges.clone(),
                nu: nu.clone(),
                mu: mu.clone(),
            },
            System::Calogero => ChargeConfig::unit(z.to_vec()),
        }
    }

    pub fn residual(&self, z: &[Complex]) -> Result<Vec<Complex>> {
        match self {
            System::Charged { .. } => stieltjes_residual(&self.config(z)),
            System::Calogero => calogero_residual(&self.config(z)),
        }
    }

    pub fn jacobian(&self, z: &[Complex]) -> Vec<Vec<Complex>> {
        let n = z.len();
        let prec = z.first().map(mp::prec_of).unwrap_or(64);
        let mut jac = vec![vec![mp::cx_zero(prec); n]; n];
        for k in 0..n {
            let mut diag = mp::cx_zero(prec);
            for j in (0..n).filter(|&j| j != k) {
                let d = Complex::with_val(prec, &z[k] - &z[j]);
                let d2 = Complex::with_val(prec, &d * &d);
                let entry = match self {
                    System::Charged { charges, .. } => Complex::with_val(prec, charges[j] / d2),
                    System::Calogero => Complex::with_val(prec, 6 / Complex::with_val(prec, &d2 * &d2)),
                };
                diag -= &entry;
                jac[k][j] = entry;
            }
            match self {
                System::Charged { mu, .. } => diag -= mp::cx(mu, prec),
                System::Calogero => diag -= 1,
            }
            jac[k][k] = diag;
        }
        jac
    }

    fn dimension_check(&self, n: usize) -> Result<()> {
        if let System::Charged { charges, .. } = self {
            if charges.len() != n {
                return Err(Error::Arity {
                    expected: charges.len(),
                    got: n,
                });
            }
        }
        Ok(())
    }
}

fn check_distinct(z: &[Complex]) -> Result<()> {
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            if z[i] == z[j] {
                return Err(Error::Domain(format!("points {i} and {j} coincide")));
            }
        }
    }
    Ok(())
}

/// Potential value and its complex gradient.
///
/// * charged: `V = μ Σ m_j (z_j − ν/μ)² − Σ_{j<k} m_j m_k ln (z_j − z_k)²`
///   (for `μ = 0` the field term is `−2ν Σ m_j z_j`);
/// * Calogero: `V_CM = Σ z_j² + 2 Σ_{j<k} (z_j − z_k)^{−2}`.
///
/// In both cases `∂V/∂z_k = −2 m_k · residual_k`.
pub fn potential_and_gradient(system: &System, z: &[Complex]) -> Result<(Complex, Vec<Complex>)> {
    system.dimension_check(z.len())?;
    check_distinct(z)?;
    let prec = z.first().map(mp::prec_of).unwrap_or(64);
    let n = z.len();
    let mut value = mp::cx_zero(prec);
    match system {
        System::Charged { nu, mu, charges } => {
            let nu_c = mp::cx(nu, prec);
            let mu_c = mp::cx(mu, prec);
            for (k, zk) in z.iter().enumerate() {
                let field = if mu.cmp0().is_ne() {
                    let c = mp::cx(&Rational::from(nu / mu), prec);
                    let t = Complex::with_val(prec, zk - &c);
                    Complex::with_val(prec, &mu_c * Complex::with_val(prec, &t * &t))
                } else {
                    Complex::with_val(prec, zk * &nu_c) * -2
                };
                value += Complex::with_val(prec, field * charges[k]);
            }
            for j in 0..n {
                for k in j + 1..n {
                    let d = Complex::with_val(prec, &z[j] - &z[k]);
                    let lg = Complex::with_val(prec, &d * &d).ln();
                    value -= Complex::with_val(prec, lg * (charges[j] * charges[k]));
                }
            }
        }
        System::Calogero => {
            for zk in z {
                value += Complex::with_val(prec, zk * zk);
            }
            for j in 0..n {
                for k in j + 1..n {
                    let d = Complex::with_val(prec, &z[j] - &z[k]);
                    value += Complex::with_val(prec, 2 / Complex::with_val(prec, &d * &d));
                }
            }
        }
    }
    let r = system.residual(z)?;
    let grad = r
        .iter()
        .enumerate()
        .map(|(k, rk)| {
            let m = match system {
                System::Charged { charges, .. } => charges[k],
                System::Calogero => 1,
            };
            Complex::with_val(prec, rk * (-2 * m))
        })
        .collect();
    Ok((value, grad))
}

#[derive(Clone, Debug)]
pub struct EquilibriumProblem {
    pub system: System,
    pub initial: Vec<Complex>,
    pub prec: u32,
    pub max_iterations: usize,
    /// Smallest step fraction tried by the backtracking line search, as a
    /// power of two.
    pub min_damping_log2: u32,
    /// Configurations to deflate away from.
    pub deflate: Vec<Vec<Complex>>,
    pub seed: Option<u64>,
}

impl EquilibriumProblem {
    pub fn new(system: System, initial: Vec<Complex>, prec: u32) -> Self {
        EquilibriumProblem {
            system,
            initial,
            prec,
            max_iterations: 200,
            min_damping_log2: 12,
            deflate: Vec::new(),
            seed: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RootMatch {
    pub label: String,
    pub matched: bool,
    /// Distance from each configuration point to its assigned root.
    pub distances: Vec<Float>,
    pub assignment: Vec<usize>,
}

impl RootMatch {
    pub fn max_distance(&self) -> Float {
        self.distances
            .iter()
            .cloned()
            .fold(Float::new(64), |a, b| if b > a { b } else { a })
    }
}

#[derive(Clone, Debug)]
pub struct EquilibriumResult {
    pub system: String,
    pub config: Vec<Complex>,
    pub point_residuals: Vec<Float>,
    pub residual: Float,
    pub iterations: usize,
    pub restarts: usize,
    pub converged: bool,
    pub seed: Option<u64>,
    pub matched: Option<RootMatch>,
    pub prec: u32,
}

impl EquilibriumResult {
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "system": self.system,
            "config": self.config.iter().map(mp::complex_json).collect::<Vec<_>>(),
            "residual_max": mp::fmt_float_short(&self.residual),
            "iterations": self.iterations,
            "restarts": self.restarts,
            "converged": self.converged,
            "seed": self.seed,
            "precision_bits": self.prec,
        });
        if let Some(m) = &self.matched {
            v["match"] = json!({
                "label": m.label,
                "matched": m.matched,
                "max_distance": mp::fmt_float_short(&m.max_distance()),
                "distances": m.distances.iter().map(mp::fmt_float_short).collect::<Vec<_>>(),
            });
        }
        v
    }

    /// Rows `index,re,im,residual`.
    pub fn csv_rows(&self) -> Vec<[String; 4]> {
        self.config
            .iter()
            .zip(&self.point_residuals)
            .enumerate()
            .map(|(i, (z, r))| {
                [
                    i.to_string(),
                    mp::fmt_float(z.real()),
                    mp::fmt_float(z.imag()),
                    mp::fmt_float_short(r),
                ]
            })
            .collect()
    }
}

fn max_norm(v: &[Complex], prec: u32) -> Float {
    mp::max_abs(v, prec)
}

fn min_distance(z: &[Complex], prec: u32) -> Float {
    let mut m = Float::with_val(prec, f64::INFINITY);
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            let d = mp::abs(&Complex::with_val(prec, &z[i] - &z[j]));
            if d < m {
                m = d;
            }
        }
    }
    m
}

/// Coefficients of `Π (x − z_k)` (low to high, monic).
fn elementary(z: &[Complex], prec: u32) -> Vec<Complex> {
    let mut c = vec![Complex::with_val(prec, 1)];
    for zk in z {
        let mut next = vec![mp::cx_zero(prec); c.len() + 1];
        for (i, ci) in c.iter().enumerate() {
            next[i + 1] += ci;
            next[i] -= Complex::with_val(prec, ci * zk);
        }
        c = next;
    }
    c
}

/// Deflation factor `M(z) = Π_s (1/D_s + 1)` with the permutation-invariant
/// `D_s = Σ_i (c_i(z) − c_i(z*_s))²` over the coefficients of `Π (x − z_k)`,
/// and its gradient.
fn deflation(z: &[Complex], known: &[Vec<Complex>], prec: u32) -> (Complex, Vec<Complex>) {
    let n = z.len();
    let c = elementary(z, prec);
    // dc_i/dz_k = −(coefficient i−1 of Π_{j≠k}(x − z_j))
    let partials: Vec<Vec<Complex>> = (0..n)
        .map(|k| {
            let others: Vec<Complex> = (0..n).filter(|&j| j != k).map(|j| z[j].clone()).collect();
            let q = elementary(&others, prec);
            let mut d = vec![mp::cx_zero(prec); n + 1];
            for (i, qi) in q.iter().enumerate() {
                d[i] = Complex::with_val(prec, -qi);
            }
            d
        })
        .collect();
    let mut factors = Vec::with_capacity(known.len());
    let mut grads = Vec::with_capacity(known.len());
    for star in known {
        let cs = elementary(star, prec);
        let diff: Vec<Complex> = c.iter().zip(&cs).map(|(a, b)| Complex::with_val(prec, a - b)).collect();
        let dsum = diff
            .iter()
            .fold(mp::cx_zero(prec), |acc, d| acc + Complex::with_val(prec, d * d));
        let inv = mp::recip(&dsum).unwrap_or_else(|| Complex::with_val(prec, 1e300));
        let inv2 = Complex::with_val(prec, &inv * &inv);
        factors.push(Complex::with_val(prec, &inv + 1));
        // d(1/D)/dz_k = −D^{-2} · 2 Σ_i diff_i · dc_i/dz_k
        let g: Vec<Complex> = (0..n)
            .map(|k| {
                let mut s = mp::cx_zero(prec);
                for i in 0..=n {
                    s += Complex::with_val(prec, &diff[i] * &partials[k][i]);
                }
                let t: Complex = Complex::with_val(prec, &inv2 * &s) * 2u32;
                Complex::with_val(prec, -t)
            })
            .collect();
        grads.push(g);
    }
    let total = factors.iter().fold(Complex::with_val(prec, 1), |a, f| a * f);
    let mut grad = vec![mp::cx_zero(prec); n];
    for s in 0..known.len() {
        let others = factors
            .iter()
            .enumerate()
            .filter(|&(t, _)| t != s)
            .fold(Complex::with_val(prec, 1), |a, (_, f)| a * f);
        for k in 0..n {
            grad[k] += Complex::with_val(prec, &grads[s][k] * &others);
        }
    }
    (total, grad)
}

fn newton_direction(problem: &EquilibriumProblem, z: &[Complex], r: &[Complex]) -> Option<Vec<Complex>> {
    let prec = problem.prec;
    let jac = problem.system.jacobian(z);
    let rhs: Vec<Complex> = r.iter().map(|x| Complex::with_val(prec, -x)).collect();
    let singular = mp::pow2_neg(prec - prec / 8, prec);
    let step = mp::solve_linear(jac, rhs, &singular)?;
    if problem.deflate.is_empty() {
        return Some(step);
    }
    let (m, g) = deflation(z, &problem.deflate, prec);
    let gd = g
        .iter()
        .zip(&step)
        .fold(mp::cx_zero(prec), |acc, (a, b)| acc + Complex::with_val(prec, a * b));
    let denom = Complex::with_val(prec, &m + &gd);
    let scale = Complex::with_val(prec, &m * mp::recip(&denom)?);
    Some(step.into_iter().map(|s| Complex::with_val(prec, s * &scale)).collect())
}

fn jitter(z: &mut [Complex], rng: &mut ChaCha8Rng, size: f64, prec: u32) {
    for zk in z.iter_mut() {
        *zk += mp::cx_f64(rng.gen_range(-size..size), rng.gen_range(-size..size), prec);
    }
}

const POLISH_STEPS: usize = 2;
const MAX_RESTARTS: usize = 3;

pub fn solve_equilibrium(problem: &EquilibriumProblem) -> Result<EquilibriumResult> {
    let prec = problem.prec;
    let n = problem.initial.len();
    problem.system.dimension_check(n)?;
    check_distinct(&problem.initial)?;
    let target = mp::pow2_neg(prec / 2, prec);
    let guard = mp::pow2_neg(prec / 4, prec);
    let mut rng = ChaCha8Rng::seed_from_u64(problem.seed.unwrap_or(0) ^ 0x5eed);
    let mut z: Vec<Complex> = problem.initial.iter().map(|c| Complex::with_val(prec, c)).collect();
    let mut r = problem.system.residual(&z)?;
    let mut norm = max_norm(&r, prec);
    let mut iterations = 0;
    let mut restarts = 0;
    let mut converged = norm < target;

    while !converged && iterations < problem.max_iterations {
        iterations += 1;
        let Some(step) = newton_direction(problem, &z, &r) else {
            if restarts == MAX_RESTARTS {
                break;
            }
            restarts += 1;
            jitter(&mut z, &mut rng, 1e-2, prec);
            r = problem.system.residual(&z)?;
            norm = max_norm(&r, prec);
            continue;
        };
        // backtracking on the residual max-norm, damping near collisions
        let mut lambda = Float::with_val(prec, 1);
        let floor = mp::pow2_neg(problem.min_damping_log2, prec);
        let mut accepted = None;
        loop {
            let trial: Vec<Complex> = z
                .iter()
                .zip(&step)
                .map(|(a, s)| Complex::with_val(prec, a + Complex::with_val(prec, s * &lambda)))
                .collect();
            let ok_spacing = min_distance(&trial, prec) > guard;
            if ok_spacing {
                if let Ok(tr) = problem.system.residual(&trial) {
                    let tn = max_norm(&tr, prec);
                    if tn < norm || lambda <= floor {
                        accepted = Some((trial, tr, tn));
                        break;
                    }
                }
            }
            if lambda <= floor {
                break;
            }
            lambda /= 2;
        }
        match accepted {
            Some((trial, tr, tn)) => {
                z = trial;
                r = tr;
                norm = tn;
            }
            None => {
                if restarts == MAX_RESTARTS {
                    break;
                }
                restarts += 1;
                jitter(&mut z, &mut rng, 1e-2, prec);
                r = problem.system.residual(&z)?;
                norm = max_norm(&r, prec);
            }
        }
        converged = norm < target;
    }

    if converged {
        for _ in 0..POLISH_STEPS {
            let plain = EquilibriumProblem {
                deflate: Vec::new(),
                ..problem.clone()
            };
            if let Some(step) = newton_direction(&plain, &z, &r) {
                let trial: Vec<Complex> = z
                    .iter()
                    .zip(&step)
                    .map(|(a, s)| Complex::with_val(prec, a + s))
                    .collect();
                if let Ok(tr) = problem.system.residual(&trial) {
                    let tn = max_norm(&tr, prec);
                    if tn <= norm {
                        z = trial;
                        r = tr;
                        norm = tn;
                    }
                }
            }
        }
    }

    Ok(EquilibriumResult {
        system: problem.system.name().into(),
        point_residuals: r.iter().map(mp::abs).collect(),
        config: z,
        residual: norm,
        iterations,
        restarts,
        converged,
        seed: problem.seed,
        matched: None,
        prec,
    })
}

/// Scaled roots of unity with seeded jitter.
pub fn default_start(n: usize, seed: u64, prec: u32) -> Vec<Complex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = (n as f64 / 2.0).sqrt() * rng.gen_range(0.6..1.4) + 0.3;
    let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    (0..n)
        .map(|k| {
            let t = phase + std::f64::consts::TAU * k as f64 / n as f64;
            let jr: f64 = rng.gen_range(-0.15..0.15);
            let ji: f64 = rng.gen_range(-0.15..0.15);
            mp::cx_f64(radius * t.cos() + jr, radius * t.sin() + ji, prec)
        })
        .collect()
}

/// Per-start seeds derived from a master seed.
pub fn start_seeds(seed: u64, starts: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..starts).map(|_| rng.gen()).collect()
}

/// Independent solves from `starts` seeded initial configurations, run in
/// parallel; results are in start order.
pub fn multistart(system: &System, n: usize, prec: u32, starts: usize, seed: u64) -> Result<Vec<EquilibriumResult>> {
    start_seeds(seed, starts)
        .into_par_iter()
        .map(|s| {
            let mut p = EquilibriumProblem::new(system.clone(), default_start(n, s, prec), prec);
            p.seed = Some(s);
            solve_equilibrium(&p)
        })
        .collect()
}

/// Sequential deflated search: each converged equilibrium is deflated before
/// the next start, so repeated solutions are suppressed.
pub fn distinct_equilibria(
    system: &System,
    n: usize,
    prec: u32,
    starts: usize,
    seed: u64,
) -> Result<Vec<EquilibriumResult>> {
    let mut found: Vec<EquilibriumResult> = Vec::new();
    for s in start_seeds(seed, starts) {
        let mut p = EquilibriumProblem::new(system.clone(), default_start(n, s, prec), prec);
        p.seed = Some(s);
        p.deflate = found.iter().map(|r| r.config.clone()).collect();
        let r = solve_equilibrium(&p)?;
        if r.converged && !found.iter().any(|f| same_multiset(&f.config, &r.config, prec)) {
            found.push(r);
        }
    }
    Ok(found)
}

fn same_multiset(a: &[Complex], b: &[Complex], prec: u32) -> bool {
    let tol = mp::pow2_neg(prec / 4, prec);
    let mut used = vec![false; b.len()];
    a.iter().all(|x| {
        (0..b.len()).any(|j| {
            if !used[j] && mp::abs(&Complex::with_val(prec, x - &b[j])) < tol {
                used[j] = true;
                true
            } else {
                false
            }
        })
    })
}

/// Match `config` with the roots of `p` (with multiplicity): greedy nearest
/// assignment, then pairwise swaps while they reduce the larger distance.
pub fn match_to_roots(config: &[Complex], p: &Poly, tol: &Float, label: &str) -> Result<RootMatch> {
    if p.degree() != config.len() || p.is_zero() {
        return Err(Error::Domain(format!(
            "degree {} does not match configuration size {}",
            p.degree(),
            config.len()
        )));
    }
    let prec = config.first().map(mp::prec_of).unwrap_or(128);
    let mut roots = Vec::new();
    for (r, m) in roots_with_multiplicity(p, prec)? {
        for _ in 0..m {
            roots.push(r.value.clone());
        }
    }
    let n = config.len();
    let dist = |i: usize, j: usize| mp::abs(&Complex::with_val(prec, &config[i] - &roots[j]));
    let mut assignment = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for i in 0..n {
        let j = (0..n)
            .filter(|&j| !used[j])
            .min_by(|&a, &b| dist(i, a).partial_cmp(&dist(i, b)).unwrap_or(std::cmp::Ordering::Equal))
            .expect("free root");
        used[j] = true;
        assignment[i] = j;
    }
    let mut improved = true;
    while improved {
        improved = false;
        for a in 0..n {
            for b in a + 1..n {
                let cur = dist(a, assignment[a]).max(&dist(b, assignment[b]));
                let swp = dist(a, assignment[b]).max(&dist(b, assignment[a]));
                if swp < cur {
                    assignment.swap(a, b);
                    improved = true;
                }
            }
        }
    }
    let distances: Vec<Float> = (0..n).map(|i| Float::with_val(64, dist(i, assignment[i]))).collect();
    let matched = distances.iter().all(|d| d < tol);
    Ok(RootMatch {
        label: label.into(),
        matched,
        distances,
        assignment,
    })
}
