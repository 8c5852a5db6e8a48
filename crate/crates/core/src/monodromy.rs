//! Pole discovery, Laurent windows and the trivial-monodromy test for
//! Schrödinger potentials `−ψ'' + uψ = λψ`.
//!
//! At a double pole `u = c₋₂/t² + c₋₁/t + c₀ + …` the indicial exponents solve
//! `s(s−1) = c₋₂`; with `c₋₂ = m(m+1)` they are `−m` and `m+1`, and the
//! solutions are free of logarithms for every λ iff `c_{2k−1} = 0` for
//! `k = 0, …, m`.
//!
//! Rational pole locations are handled exactly. Irrational ones are handled in
//! multiprecision with 64 guard bits; each coefficient carries an error
//! estimate obtained by recomputing the window at the root displaced by its
//! inclusion radius.

use std::collections::BTreeMap;

use rug::{Complex, Float, Rational};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactalg::{Poly, RatFunc};
use crate::laurent::{laurent_coeffs, CoeffRing, ComplexField, RationalField, ResidueRing};
use crate::mp;
use crate::roots::{cmp_complex, complex_roots, rational_root_near};
use crate::solutions::PoleLocation;

/// Extra bits carried internally beyond the requested precision.
pub const GUARD_BITS: u32 = 64;

#[derive(Clone, Debug)]
pub struct PoleDatum {
    pub location: PoleLocation,
    pub order: usize,
    /// The squarefree factor of the denominator this pole is a root of.
    pub factor: Poly,
    /// Inclusion radius of the numeric location (zero when exact).
    pub radius: Float,
    /// Laurent coefficients filled in by the analyses.
    pub laurent: BTreeMap<i64, Complex>,
    pub residue_m: Option<i64>,
}

/// All poles of `f` with their orders, sorted by location.
pub fn find_poles(f: &RatFunc, prec: u32) -> Result<Vec<PoleDatum>> {
    let work = prec + GUARD_BITS;
    let mut out = Vec::new();
    for (g, mult) in f.den().squarefree_decomposition() {
        if g.is_constant() {
            continue;
        }
        for r in complex_roots(&g, work)? {
            let location = match rational_root_near(&g, &r.value) {
                Some(q) => PoleLocation::exact(q, work),
                None => PoleLocation {
                    value: r.value,
                    exact: None,
                },
            };
            let radius = if location.exact.is_some() {
                Float::new(work)
            } else {
                r.radius
            };
            out.push(PoleDatum {
                location,
                order: mult,
                factor: g.clone(),
                radius,
                laurent: BTreeMap::new(),
                residue_m: None,
            });
        }
    }
    out.sort_by(|a, b| cmp_complex(&a.location.value, &b.location.value));
    Ok(out)
}

/// Laurent coefficients `c_lo..=c_hi` at one pole.
#[derive(Clone, Debug)]
pub struct LaurentWindow {
    pub lo: i64,
    pub coeffs: Vec<Complex>,
    /// Estimated absolute error per coefficient (zero on the exact path).
    pub errors: Vec<Float>,
    /// Exact coefficients when the location is rational.
    pub exact: Option<Vec<Rational>>,
    /// Coefficients at the displaced location (equal to `coeffs` when exact).
    pub displaced: Vec<Complex>,
}

impl LaurentWindow {
    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn get(&self, e: i64) -> &Complex {
        &self.coeffs[(e - self.lo) as usize]
    }

    pub fn error(&self, e: i64) -> &Float {
        &self.errors[(e - self.lo) as usize]
    }

    /// Evaluate a statistic of the window together with an error estimate.
    pub fn statistic(&self, stat: impl Fn(&ComplexField, &[Complex]) -> Complex) -> (Complex, Float) {
        let prec = mp::prec_of(&self.coeffs[0]);
        let field = ComplexField { prec };
        if self.exact.is_some() {
            return (stat(&field, &self.coeffs), Float::new(64));
        }
        let a = stat(&field, &self.coeffs);
        let b = stat(&field, &self.displaced);
        let err = Float::with_val(64, mp::abs(&Complex::with_val(prec, &a - &b)) * 2u32) + rounding_floor(prec);
        (a, err)
    }
}

fn rounding_floor(prec: u32) -> Float {
    mp::pow2_neg(prec.saturating_sub(16), 64)
}

/// Laurent coefficients of `f` at `pole` for exponents `lo..=hi`.
///
/// Raises a precision error when the estimated error of a coefficient is not
/// comfortably below the pass threshold `10^{−(prec/4)}`.
pub fn laurent_window(f: &RatFunc, pole: &PoleDatum, lo: i64, hi: i64, prec: u32) -> Result<LaurentWindow> {
    if hi < lo {
        return Err(Error::Domain(format!("empty Laurent window [{lo}, {hi}]")));
    }
    let work = prec + GUARD_BITS;
    if let Some(q) = &pole.location.exact {
        let ex = laurent_coeffs(&RationalField, f.num(), f.den(), q, pole.order, lo, hi)?;
        let coeffs: Vec<Complex> = ex.iter().map(|c| mp::cx(c, work)).collect();
        return Ok(LaurentWindow {
            lo,
            errors: vec![Float::new(64); coeffs.len()],
            displaced: coeffs.clone(),
            coeffs,
            exact: Some(ex),
        });
    }
    let field = ComplexField { prec: work };
    let z0 = Complex::with_val(work, &pole.location.value);
    let coeffs = laurent_coeffs(&field, f.num(), f.den(), &z0, pole.order, lo, hi)?;
    let eta = Float::with_val(work, &pole.radius).max(&mp::pow2_neg(work - 8, work));
    let z1 = Complex::with_val(work, &z0 + &eta);
    let displaced = laurent_coeffs(&field, f.num(), f.den(), &z1, pole.order, lo, hi)?;
    let errors: Vec<Float> = coeffs
        .iter()
        .zip(&displaced)
        .map(|(a, b)| Float::with_val(64, mp::abs(&Complex::with_val(work, a - b)) * 2u32) + rounding_floor(work))
        .collect();
    let limit = Float::with_val(64, mp::bits_tolerance(prec) * mp::pow2_neg(16, 64));
    if let Some((i, e)) = errors.iter().enumerate().find(|(_, e)| **e > limit) {
        return Err(Error::Precision(format!(
            "Laurent coefficient c_{} at {} has error estimate {} at {prec} bits",
            lo + i as i64,
            mp::fmt_float_short(z0.real()),
            mp::fmt_float_short(e)
        )));
    }
    Ok(LaurentWindow {
        lo,
        coeffs,
        errors,
        exact: None,
        displaced,
    })
}

#[derive(Clone, Debug)]
pub struct PoleReport {
    pub location: PoleLocation,
    pub order: usize,
    pub c_minus2: Complex,
    pub m: Option<i64>,
    /// `(exponent, |c_exponent|)` for the odd coefficients checked.
    pub odd_coeffs: Vec<(i64, Float)>,
    /// Indicial exponents `(−m, m+1)`.
    pub exponents: Option<(i64, i64)>,
    pub pass: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug)]
pub struct MonodromyReport {
    pub poles: Vec<PoleReport>,
    pub pass: bool,
    pub precision_bits: u32,
}

impl MonodromyReport {
    pub fn to_json(&self) -> Value {
        json!({
            "relation": "trivial_monodromy",
            "verdict": if self.pass { "pass" } else { "fail" },
            "precision_bits": self.precision_bits,
            "poles": self.poles.iter().map(|p| json!({
                "location": p.location.to_json(),
                "order": p.order,
                "c_minus2": mp::complex_json(&p.c_minus2),
                "m": p.m,
                "indicial_exponents": p.exponents.map(|(a, b)| vec![a, b]),
                "odd_coefficients": p.odd_coeffs.iter().map(|(e, v)| json!({
                    "exponent": e,
                    "magnitude": mp::fmt_float_short(v),
                })).collect::<Vec<_>>(),
                "verdict": if p.pass { "pass" } else { "fail" },
                "witness": p.witness,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Nearest `m ≥ 0` with `m(m+1) ≈ c`, or `None` when `c` is off the lattice.
fn infer_m(c: &Complex, tol: &Float) -> Option<i64> {
    let re = c.real().to_f64();
    let disc = (1.0 + 4.0 * re).max(0.0);
    let m = ((disc.sqrt() - 1.0) / 2.0).round().max(0.0) as i64;
    let prec = mp::prec_of(c);
    let target = mp::cx(&Rational::from(m * (m + 1)), prec);
    if mp::abs(&Complex::with_val(prec, c - &target)) < *tol {
        Some(m)
    } else {
        None
    }
}

pub fn trivial_monodromy_report(u: &RatFunc, prec: u32) -> Result<MonodromyReport> {
    let tol = mp::bits_tolerance(prec);
    let mut reports = Vec::new();
    for pole in find_poles(u, prec)? {
        reports.push(pole_report(u, &pole, prec, &tol)?);
    }
    let pass = reports.iter().all(|r| r.pass);
    Ok(MonodromyReport {
        poles: reports,
        pass,
        precision_bits: prec,
    })
}

fn pole_report(u: &RatFunc, pole: &PoleDatum, prec: u32, tol: &Float) -> Result<PoleReport> {
    let mut rep = PoleReport {
        location: pole.location.clone(),
        order: pole.order,
        c_minus2: mp::cx_zero(prec),
        m: None,
        odd_coeffs: Vec::new(),
        exponents: None,
        pass: false,
        witness: None,
    };
    if pole.order > 2 {
        rep.witness = Some(format!("pole of order {} (> 2)", pole.order));
        return Ok(rep);
    }
    let head = laurent_window(u, pole, -2, -1, prec)?;
    rep.c_minus2 = Complex::with_val(prec, head.get(-2));
    if pole.order == 1 {
        rep.m = Some(0);
        rep.exponents = Some((0, 1));
        rep.odd_coeffs.push((-1, mp::abs(head.get(-1))));
        rep.witness = Some("simple pole: c_-1 != 0".into());
        return Ok(rep);
    }
    let Some(m) = infer_m(head.get(-2), tol) else {
        rep.witness = Some(format!(
            "c_-2 = {} is not of the form m(m+1)",
            mp::fmt_float_short(head.get(-2).real())
        ));
        return Ok(rep);
    };
    rep.m = Some(m);
    rep.exponents = Some((-m, m + 1));
    let win = laurent_window(u, pole, -2, 2 * m - 1, prec)?;
    rep.pass = true;
    for k in 0..=m {
        let e = 2 * k - 1;
        let mag = mp::abs(win.get(e));
        if mag >= *tol && rep.pass {
            rep.pass = false;
            rep.witness = Some(format!("c_{e} = {} != 0", mp::fmt_float_short(&mag)));
        }
        rep.odd_coeffs.push((e, Float::with_val(prec, mag)));
    }
    Ok(rep)
}

/// Exact trivial-monodromy certificate: every condition is decided in
/// `ℚ[z]/(g)` for each squarefree factor `g` of the denominator, so the
/// verdict covers all roots of `g` at once with no rounding.
///
/// Factors whose roots carry different `m` are split by
/// `gcd(g, c₋₂ − m(m+1))`, with candidate `m` read from a numeric pass.
pub fn trivial_monodromy_exact(u: &RatFunc, prec: u32) -> Result<bool> {
    let tol = mp::bits_tolerance(prec);
    for (g, mult) in u.den().squarefree_decomposition() {
        if g.is_constant() {
            continue;
        }
        if mult != 2 {
            return Ok(false);
        }
        let ring = ResidueRing::new(g.clone())?;
        let c = laurent_coeffs(&ring, u.num(), u.den(), &ring.generator(), 2, -2, -2)?;
        let c2 = &c[0];
        // candidate m values from the numeric roots
        let mut ms: Vec<i64> = Vec::new();
        for r in complex_roots(&g, prec + GUARD_BITS)? {
            let v = eval_residue_class(c2, &r.value);
            match infer_m(&v, &tol) {
                Some(m) => ms.push(m),
                None => return Ok(false),
            }
        }
        ms.sort_unstable();
        ms.dedup();
        let mut covered = 0;
        for m in ms {
            let target = Poly::constant(Rational::from(m * (m + 1)));
            let gm = g.gcd(&(c2 - &target));
            if gm.is_constant() {
                return Ok(false);
            }
            covered += gm.degree();
            let sub = ResidueRing::new(gm)?;
            let win = laurent_coeffs(&sub, u.num(), u.den(), &sub.generator(), 2, -2, 2 * m - 1)?;
            if sub.reduce(&(&win[0] - &target)) != Poly::zero() {
                return Ok(false);
            }
            for k in 0..=m {
                if !win[(2 * k - 1 + 2) as usize].is_zero() {
                    return Ok(false);
                }
            }
        }
        if covered != g.degree() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Evaluate a residue class (a polynomial in the generator) at a numeric root.
pub fn eval_residue_class(class: &Poly, z: &Complex) -> Complex {
    crate::solutions::eval_cx(class, z)
}

/// Exact Laurent coefficients of `f` at every root of the squarefree factor
/// `g` of its denominator, as residue classes modulo `g`.
pub fn laurent_window_exact(f: &RatFunc, g: &Poly, order: usize, lo: i64, hi: i64) -> Result<Vec<Poly>> {
    let ring = ResidueRing::new(g.clone())?;
    laurent_coeffs(&ring, f.num(), f.den(), &ring.generator(), order, lo, hi)
}

/// Coefficient of `t^{-1}` in `(Σ_{i≥0} s_i t^{i−1})^p`, i.e. the residue of
/// `f^p` at a simple pole with Laurent coefficients `s_0 = c₋₁, s_1 = c₀, …`.
pub fn residue_of_power<R: CoeffRing>(ring: &R, s: &[R::Elem], p: usize) -> R::Elem {
    // need coefficient p-1 of s(t)^p
    let want = p - 1;
    let trunc = |v: &[R::Elem]| -> Vec<R::Elem> { v.iter().take(want + 1).cloned().collect() };
    let base = trunc(s);
    let mut acc: Vec<R::Elem> = vec![ring.from_rational(&Rational::from(1))];
    for _ in 0..p {
        let mut next = vec![ring.zero(); want + 1];
        for (i, a) in acc.iter().enumerate() {
            for (j, b) in base.iter().enumerate() {
                if i + j <= want {
                    let t = ring.mul(a, b);
                    next[i + j] = ring.add(&next[i + j], &t);
                }
            }
        }
        acc = next;
    }
    acc.get(want).cloned().unwrap_or_else(|| ring.zero())
}
