//! Verifiers for the Stieltjes / charged-particle system, the Calogero
//! relations, and the residue conditions `Res f^{2k} = 0` at the poles of `f`.
//!
//! Numeric verdicts pass iff every residual is below `10^{−(bits/4)}`.

use rug::{Complex, Float, Rational};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactalg::{divides, Poly, RatFunc};
use crate::laurent::{laurent_coeffs, ResidueRing};
use crate::monodromy::{eval_residue_class, find_poles, laurent_window, residue_of_power, GUARD_BITS};
use crate::mp;
use crate::roots::complex_roots;
use crate::solutions::partial_fractions;

/// Particles `z_k` with integer charges `m_k` in the field `ν − μz`.
#[derive(Clone, Debug)]
pub struct ChargeConfig {
    pub points: Vec<Complex>,
    pub charges: Vec<i64>,
    pub nu: Rational,
    pub mu: Rational,
}

impl ChargeConfig {
    /// Unit charges, `ν = 0`, `μ = 1`.
    pub fn unit(points: Vec<Complex>) -> Self {
        let n = points.len();
        ChargeConfig {
            points,
            charges: vec![1; n],
            nu: Rational::new(),
            mu: Rational::from(1),
        }
    }

    /// `{"points": [{"re","im"} | [re, im] | re, ...], "charges": [..],
    /// "nu": "p/q", "mu": "p/q"}`; charges default to 1, `ν` to 0, `μ` to 1.
    /// Errors name the offending field.
    pub fn from_json(v: &Value, prec: u32) -> Result<Self> {
        let at = |path: String| move |e: Error| Error::Parse(format!("{path}: {e}"));
        let points = v
            .get("points")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("points: missing or not an array".into()))?
            .iter()
            .enumerate()
            .map(|(i, p)| mp::complex_from_json(p, prec).map_err(at(format!("points[{i}]"))))
            .collect::<Result<Vec<_>>>()?;
        let charges = match v.get("charges") {
            None => vec![1; points.len()],
            Some(c) => c
                .as_array()
                .ok_or_else(|| Error::Parse("charges: not an array".into()))?
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    m.as_i64()
                        .ok_or_else(|| Error::Parse(format!("charges[{i}]: expected an integer, got {m}")))
                })
                .collect::<Result<Vec<_>>>()?,
        };
        let rat = |key: &str, default: i64| match v.get(key) {
            None => Ok(Rational::from(default)),
            Some(x) => crate::exactalg::json::rational_from_json(x).map_err(at(key.to_string())),
        };
        let cfg = ChargeConfig {
            points,
            charges,
            nu: rat("nu", 0)?,
            mu: rat("mu", 1)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn prec(&self) -> u32 {
        self.points.first().map(mp::prec_of).unwrap_or(crate::DEFAULT_BITS)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.len() != self.charges.len() {
            return Err(Error::Arity {
                expected: self.points.len(),
                got: self.charges.len(),
            });
        }
        if self.charges.contains(&0) {
            return Err(Error::Domain("charges must be nonzero".into()));
        }
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                if self.points[i] == self.points[j] {
                    return Err(Error::Domain(format!("points {i} and {j} coincide")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct RelationReport {
    pub relation: String,
    pub residuals: Vec<Float>,
    pub pass: bool,
    pub precision_bits: u32,
    /// Relation-specific diagnostics.
    pub details: Value,
}

impl RelationReport {
    fn from_residuals(relation: &str, residuals: Vec<Float>, prec: u32) -> Self {
        let tol = mp::bits_tolerance(prec);
        let pass = residuals.iter().all(|r| *r < tol);
        RelationReport {
            relation: relation.into(),
            residuals,
            pass,
            precision_bits: prec,
            details: Value::Null,
        }
    }

    pub fn max_residual(&self) -> Float {
        self.residuals
            .iter()
            .cloned()
            .fold(Float::new(64), |a, b| if b > a { b } else { a })
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "relation": self.relation,
            "residuals": self.residuals.iter().map(mp::fmt_float_short).collect::<Vec<_>>(),
            "verdict": if self.pass { "pass" } else { "fail" },
            "precision_bits": self.precision_bits,
        });
        if !self.details.is_null() {
            v["details"] = self.details.clone();
        }
        v
    }
}

/// Component `k`: `Σ_{j≠k} m_j/(z_k − z_j) + ν − μ z_k`.
pub fn stieltjes_residual(cfg: &ChargeConfig) -> Result<Vec<Complex>> {
    cfg.validate()?;
    let prec = cfg.prec();
    let nu = mp::cx(&cfg.nu, prec);
    let mu = mp::cx(&cfg.mu, prec);
    let n = cfg.points.len();
    Ok((0..n)
        .map(|k| {
            let zk = &cfg.points[k];
            let mut s = Complex::with_val(prec, &nu - Complex::with_val(prec, &mu * zk));
            for j in (0..n).filter(|&j| j != k) {
                let d = Complex::with_val(prec, zk - &cfg.points[j]);
                s += Complex::with_val(prec, cfg.charges[j] / d);
            }
            s
        })
        .collect())
}

fn check_calogero_case(cfg: &ChargeConfig) -> Result<()> {
    if cfg.charges.iter().any(|&m| m != 1) {
        return Err(Error::Unsupported(
            "Calogero relations are defined for unit charges only".into(),
        ));
    }
    if cfg.nu.cmp0().is_ne() || cfg.mu != 1 {
        return Err(Error::Unsupported(
            "Calogero relations are defined for nu = 0, mu = 1".into(),
        ));
    }
    Ok(())
}

/// Component `k`: `2 Σ_{j≠k} (z_k − z_j)^{−3} − z_k`.
pub fn calogero_residual(cfg: &ChargeConfig) -> Result<Vec<Complex>> {
    cfg.validate()?;
    check_calogero_case(cfg)?;
    let prec = cfg.prec();
    let n = cfg.points.len();
    Ok((0..n)
        .map(|k| {
            let zk = &cfg.points[k];
            let mut s = Complex::with_val(prec, -zk);
            for j in (0..n).filter(|&j| j != k) {
                let d = Complex::with_val(prec, zk - &cfg.points[j]);
                let d3 = Complex::with_val(prec, &d * &d) * &d;
                s += Complex::with_val(prec, 2 / d3);
            }
            s
        })
        .collect())
}

fn magnitudes(v: &[Complex]) -> Vec<Float> {
    v.iter().map(mp::abs).collect()
}

pub fn stieltjes_report(cfg: &ChargeConfig) -> Result<RelationReport> {
    let r = stieltjes_residual(cfg)?;
    Ok(RelationReport::from_residuals("stieltjes", magnitudes(&r), cfg.prec()))
}

pub fn calogero_report(cfg: &ChargeConfig) -> Result<RelationReport> {
    let r = calogero_residual(cfg)?;
    Ok(RelationReport::from_residuals("calogero", magnitudes(&r), cfg.prec()))
}

/// Exact test of `Res f² = 0` at every pole of `f = A'/A − B'/B + ν − μz`
/// with `A`, `B` squarefree and coprime:
/// `A | A''B − 2A'B' + 2(ν − μz)A'B` and `B | 2A'B' − AB'' + 2(ν − μz)AB'`.
pub fn stieltjes_exact_simple(a: &Poly, b: &Poly, nu: &Rational, mu: &Rational) -> Result<bool> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::Precondition("A and B must be nonzero".into()));
    }
    if !a.is_squarefree() || !b.is_squarefree() {
        return Err(Error::Precondition(
            "A and B must be squarefree; use generalized_stieltjes_check for multiple roots".into(),
        ));
    }
    if !a.gcd(b).is_constant() {
        return Err(Error::Precondition("A and B must be coprime".into()));
    }
    let field = Poly::new(vec![nu.clone(), Rational::from(-mu)]);
    let two = Rational::from(2);
    let (a1, a2) = (a.derivative(), a.nth_derivative(2));
    let (b1, b2) = (b.derivative(), b.nth_derivative(2));
    let lhs_a = &(&(&a2 * b) - &(&a1 * &b1).scale(&two)) + &(&(&field * &a1) * b).scale(&two);
    let lhs_b = &(&(&a1 * &b1).scale(&two) - &(a * &b2)) + &(&(&field * a) * &b1).scale(&two);
    Ok(divides(a, &lhs_a)? && divides(b, &lhs_b)?)
}

/// `Res f^{2k} = 0`, `k = 1..|m|`, at every pole of `f` (residue `m`).
pub fn generalized_stieltjes_check(f: &RatFunc, prec: u32) -> Result<RelationReport> {
    partial_fractions(f, prec)?;
    let tol = mp::bits_tolerance(prec);
    let mut residuals = Vec::new();
    let mut per_pole = Vec::new();
    for pole in find_poles(f, prec)? {
        let head = laurent_window(f, &pole, -1, -1, prec)?;
        let m = head.get(-1).real().to_f64().round() as i64;
        let am = m.unsigned_abs() as usize;
        let win = laurent_window(f, &pole, -1, 2 * am as i64 - 2, prec)?;
        let mut worst = Float::new(64);
        let mut values = Vec::new();
        for k in 1..=am {
            let (res, err) = win.statistic(|ring, s| residue_of_power(ring, s, 2 * k));
            let mag = Float::with_val(64, mp::abs(&res));
            if err >= tol {
                return Err(Error::Precision(format!(
                    "Res f^{} error estimate {} exceeds tolerance",
                    2 * k,
                    mp::fmt_float_short(&err)
                )));
            }
            if mag > worst {
                worst = mag.clone();
            }
            values.push(json!({"power": 2 * k, "magnitude": mp::fmt_float_short(&mag)}));
        }
        per_pole.push(json!({
            "location": pole.location.to_json(),
            "residue": m,
            "residues_of_powers": values,
        }));
        residuals.push(worst);
    }
    let mut rep = RelationReport::from_residuals("generalized_stieltjes", residuals, prec);
    rep.details = json!({ "poles": per_pole });
    Ok(rep)
}

/// `Res (z + w)² = 0` at every pole of `w`, decided exactly modulo each
/// squarefree factor of the denominator.
pub fn theorem1_check(w: &RatFunc, prec: u32) -> Result<RelationReport> {
    let zw = &RatFunc::z() + w;
    let sq = &zw * &zw;
    let mut residuals = Vec::new();
    let mut exact_pass = true;
    let mut per_factor = Vec::new();
    for (g, mult) in sq.den().squarefree_decomposition() {
        if g.is_constant() {
            continue;
        }
        let ring = ResidueRing::new(g.clone())?;
        let c = laurent_coeffs(&ring, sq.num(), sq.den(), &ring.generator(), mult, -1, -1)?;
        let class = &c[0];
        let zero = class.is_zero();
        exact_pass &= zero;
        per_factor.push(json!({
            "factor": g,
            "order": mult,
            "residue_class": class,
            "vanishes": zero,
        }));
        for r in complex_roots(&g, prec + GUARD_BITS)? {
            let v = if zero {
                Float::new(prec)
            } else {
                Float::with_val(prec, mp::abs(&eval_residue_class(class, &r.value)))
            };
            residuals.push(v);
        }
    }
    let mut rep = RelationReport::from_residuals("theorem1", residuals, prec);
    rep.pass = exact_pass;
    rep.details = json!({ "exact": true, "factors": per_factor });
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::parse_ratfunc;
    use crate::families::hermite;

    const P: u32 = 256;

    fn sqrt_half() -> Float {
        Float::with_val(P, 0.5).sqrt()
    }

    #[test]
    fn stieltjes_examples() {
        let s = sqrt_half();
        let cfg = ChargeConfig::unit(vec![Complex::with_val(P, &s), Complex::with_val(P, -&s)]);
        assert!(stieltjes_report(&cfg).unwrap().pass);
        let cfg = ChargeConfig::unit(vec![mp::cx_zero(P)]);
        assert!(stieltjes_report(&cfg).unwrap().pass);
        let cfg = ChargeConfig::unit(vec![Complex::with_val(P, (0, &s)), Complex::with_val(P, (0, -&s))]);
        let r = stieltjes_report(&cfg).unwrap();
        assert!(!r.pass);
        let sqrt2 = Float::with_val(P, 2).sqrt();
        for x in &r.residuals {
            assert!(Float::with_val(P, x - &sqrt2).abs() < 1e-60);
        }
        // Calogero holds there
        assert!(calogero_report(&cfg).unwrap().pass);
    }

    #[test]
    fn coincident_points_rejected() {
        let cfg = ChargeConfig::unit(vec![mp::cx_zero(P), mp::cx_zero(P)]);
        assert!(matches!(stieltjes_residual(&cfg), Err(Error::Domain(_))));
        let mut cfg = ChargeConfig::unit(vec![mp::cx_zero(P)]);
        cfg.charges = vec![2];
        assert!(matches!(calogero_residual(&cfg), Err(Error::Unsupported(_))));
    }

    #[test]
    fn exact_simple_examples() {
        let one = Poly::one();
        let (nu, mu) = (Rational::new(), Rational::from(1));
        for n in 1..=12 {
            assert!(stieltjes_exact_simple(&hermite(n), &one, &nu, &mu).unwrap());
        }
        assert!(!stieltjes_exact_simple(&Poly::from_ints(&[-1, 0, 4]), &one, &nu, &mu).unwrap());
        assert!(stieltjes_exact_simple(&Poly::from_ints(&[4, 0, 8]), &hermite(1), &nu, &mu).unwrap());
        assert!(matches!(
            stieltjes_exact_simple(&Poly::from_ints(&[0, 0, 1]), &one, &nu, &mu),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn generalized_examples() {
        let f = parse_ratfunc("1/z - z").unwrap();
        assert!(generalized_stieltjes_check(&f, P).unwrap().pass);
        let f = parse_ratfunc("2/z").unwrap();
        assert!(generalized_stieltjes_check(&f, P).unwrap().pass);
        let f = parse_ratfunc("1/z - z + 1").unwrap();
        let r = generalized_stieltjes_check(&f, P).unwrap();
        assert!(!r.pass);
        assert!(Float::with_val(64, &r.residuals[0] - 2u32).abs() < 1e-15);
        // irrational poles: (log W(H_1,H_2))' - (log H_1)' - z
        let f = &(&RatFunc::log_derivative(&Poly::from_ints(&[4, 0, 8])).unwrap()
            - &RatFunc::log_derivative(&hermite(1)).unwrap())
            - &RatFunc::z();
        assert!(generalized_stieltjes_check(&f, P).unwrap().pass);
    }

    #[test]
    fn square_residue_examples() {
        assert!(theorem1_check(&parse_ratfunc("-1/z").unwrap(), P).unwrap().pass);
        let r = theorem1_check(&parse_ratfunc("-1/z + 1").unwrap(), P).unwrap();
        assert!(!r.pass);
        assert!(Float::with_val(64, &r.residuals[0] - 2u32).abs() < 1e-15);
        let r = theorem1_check(&RatFunc::zero(), P).unwrap();
        assert!(r.pass && r.residuals.is_empty());
    }
}
