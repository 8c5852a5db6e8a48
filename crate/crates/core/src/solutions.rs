//! Rational solutions `f` of the PIV hierarchy built from Wronskians, the
//! associated PIV function `w = −(z + f)` and Schrödinger potential
//! `u = f' + f²`, and partial-fraction analysis of `f`.

use rug::{Complex, Float, Rational};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactalg::json::{rational_str, rational_to_string};
use crate::exactalg::{Poly, RatFunc};
use crate::families::{adler_moser_wronskian, exp_augmented_wronskian, hermite_wronskian, HermiteSequence, TauVector};
use crate::mp;
use crate::roots::{cmp_complex, complex_roots, rational_root_near};

/// Which Wronskian formula produces `f`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SolutionSpec {
    /// `f = (log W(ks ∪ {k_extra}) / W(ks))' − z`.
    Hermite { ks: HermiteSequence, k_extra: u32 },
    /// `f = (log W_{n±1} / W_n)'` with Adler–Moser Wronskians.
    AdlerMoserStep {
        n: usize,
        direction: i8,
        #[serde(default)]
        taus: TauVector,
    },
    /// `f = (log Ŵ_n / W_n)'` with `Ŵ_n = W(P_1, …, P_n, e^{νz})`.
    Exp {
        n: usize,
        #[serde(with = "rational_str")]
        nu: Rational,
        #[serde(default)]
        taus: TauVector,
    },
}

impl SolutionSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            SolutionSpec::Hermite { ks, k_extra } => {
                if *k_extra == 0 {
                    return Err(Error::Domain("k_extra must be positive".into()));
                }
                if ks.contains(*k_extra) {
                    return Err(Error::Domain(format!("k_extra = {k_extra} already in ks")));
                }
            }
            SolutionSpec::AdlerMoserStep { n, direction, taus } => {
                let needed = match direction {
                    1 => *n,
                    -1 => {
                        if *n == 0 {
                            return Err(Error::Domain("direction -1 needs n >= 1".into()));
                        }
                        n - 1
                    }
                    d => return Err(Error::Domain(format!("direction must be +1 or -1, got {d}"))),
                };
                if taus.len() != needed {
                    return Err(Error::Arity {
                        expected: needed,
                        got: taus.len(),
                    });
                }
            }
            SolutionSpec::Exp { n, nu, taus } => {
                if nu.cmp0().is_eq() {
                    return Err(Error::Domain("exp mode needs nu != 0".into()));
                }
                let needed = n.saturating_sub(1);
                if taus.len() != needed {
                    return Err(Error::Arity {
                        expected: needed,
                        got: taus.len(),
                    });
                }
            }
        }
        Ok(())
    }
}

fn nonzero(p: Poly, what: &str) -> Result<Poly> {
    if p.is_zero() {
        Err(Error::Degenerate(format!("{what} vanishes identically")))
    } else {
        Ok(p)
    }
}

fn taus_prefix(taus: &TauVector, n: usize) -> TauVector {
    TauVector(taus.0[..n.saturating_sub(1).min(taus.len())].to_vec())
}

pub fn build_f(spec: &SolutionSpec) -> Result<RatFunc> {
    spec.validate()?;
    match spec {
        SolutionSpec::Hermite { ks, k_extra } => {
            let top = nonzero(hermite_wronskian(&ks.with(*k_extra)?), "W(ks ∪ {k})")?;
            let bottom = nonzero(hermite_wronskian(ks), "W(ks)")?;
            Ok(&(&RatFunc::log_derivative(&top)? - &RatFunc::log_derivative(&bottom)?) - &RatFunc::z())
        }
        SolutionSpec::AdlerMoserStep { n, direction, taus } => {
            let m = if *direction > 0 { n + 1 } else { n - 1 };
            let wm = nonzero(adler_moser_wronskian(m, &taus_prefix(taus, m))?, "W_{n±1}")?;
            let wn = nonzero(adler_moser_wronskian(*n, &taus_prefix(taus, *n))?, "W_n")?;
            Ok(&RatFunc::log_derivative(&wm)? - &RatFunc::log_derivative(&wn)?)
        }
        SolutionSpec::Exp { n, nu, taus } => {
            let q = exp_augmented_wronskian(*n, taus, nu)?;
            let qp = nonzero(q.poly, "exp-augmented Wronskian")?;
            let wn = nonzero(adler_moser_wronskian(*n, taus)?, "W_n")?;
            let f = &RatFunc::log_derivative(&qp)? - &RatFunc::log_derivative(&wn)?;
            Ok(&f + &RatFunc::constant(nu.clone()))
        }
    }
}

/// `w = −(z + f)`.
pub fn piv_w_from_f(f: &RatFunc) -> RatFunc {
    -(&RatFunc::z() + f)
}

/// `u = f' + f²`.
pub fn potential_from_f(f: &RatFunc) -> RatFunc {
    &f.derivative() + &(f * f)
}

/// A pole position: always numeric, exact as well when it is rational.
#[derive(Clone, Debug)]
pub struct PoleLocation {
    pub value: Complex,
    pub exact: Option<Rational>,
}

impl PoleLocation {
    pub fn exact(q: Rational, prec: u32) -> Self {
        PoleLocation {
            value: mp::cx(&q, prec),
            exact: Some(q),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = mp::complex_json(&self.value);
        if let Some(q) = &self.exact {
            v["exact"] = json!(rational_to_string(q));
        }
        v
    }
}

#[derive(Clone, Debug)]
pub struct PoleResidue {
    pub location: PoleLocation,
    pub residue: i64,
}

/// `f = Σ m_i/(z − z_i) + ν − μz`.
#[derive(Clone, Debug)]
pub struct PartialFractionData {
    pub poles: Vec<PoleResidue>,
    pub nu: Rational,
    pub mu: Rational,
    /// Squarefree factors of the denominator grouped by residue: `(m, g_m)`,
    /// so that `f = Σ m·g_m'/g_m + ν − μz` exactly.
    pub residue_factors: Vec<(i64, Poly)>,
}

impl PartialFractionData {
    /// Exact rational function rebuilt from the residue factors.
    pub fn rebuild(&self) -> RatFunc {
        let mut f = RatFunc::from_poly(Poly::new(vec![self.nu.clone(), Rational::from(-&self.mu)]));
        for (m, g) in &self.residue_factors {
            let term = RatFunc::log_derivative(g).expect("factor is nonzero");
            f = &f + &term.scale(&Rational::from(*m));
        }
        f
    }

    pub fn to_json(&self) -> Value {
        json!({
            "poles": self.poles.iter().map(|p| json!({
                "location": p.location.to_json(),
                "residue": p.residue,
            })).collect::<Vec<_>>(),
            "nu": rational_to_string(&self.nu),
            "mu": rational_to_string(&self.mu),
        })
    }
}

const RESIDUE_TOL: f64 = 1e-10;

/// Decompose `f` into the shape `Σ m_i/(z − z_i) + ν − μz` with integer `m_i`.
///
/// Residues are estimated at the numeric roots of the denominator and rounded;
/// the rounding is then certified exactly by splitting the denominator with
/// `gcd(den, num − m·den')` and checking that the rebuilt function equals `f`.
pub fn partial_fractions(f: &RatFunc, prec: u32) -> Result<PartialFractionData> {
    let (poly_part, rem) = f.polynomial_part();
    if poly_part.degree() > 1 {
        return Err(Error::NotInClass(format!(
            "polynomial part has degree {} (> 1)",
            poly_part.degree()
        )));
    }
    let nu = poly_part.coeff(0);
    let mu = -poly_part.coeff(1);
    let den = f.den();
    if den.is_constant() {
        return Ok(PartialFractionData {
            poles: Vec::new(),
            nu,
            mu,
            residue_factors: Vec::new(),
        });
    }
    if !den.is_squarefree() {
        return Err(Error::NotInClass("f has a pole of order > 1".into()));
    }
    let dden = den.derivative();
    let work = prec + 64;
    let roots = complex_roots(den, work)?;
    let tol = Float::with_val(64, RESIDUE_TOL);

    let mut found: Vec<(Complex, i64)> = Vec::with_capacity(roots.len());
    for r in roots {
        let z = &r.value;
        let num = eval_cx(&rem, z);
        let d = eval_cx(&dden, z);
        let res = Complex::with_val(work, &num / &d);
        let re = res.real().to_f64();
        let m = re.round();
        let dist = Float::with_val(64, (Float::with_val(64, res.real()) - m).abs())
            + Float::with_val(64, res.imag().clone().abs());
        if dist > tol || m == 0.0 {
            return Err(Error::NotInClass(format!(
                "residue {} + {}i at z = {} is not a nonzero integer",
                mp::fmt_float_short(res.real()),
                mp::fmt_float_short(res.imag()),
                mp::fmt_float_short(z.real())
            )));
        }
        found.push((r.value, m as i64));
    }

    let mut ms: Vec<i64> = found.iter().map(|(_, m)| *m).collect();
    ms.sort_unstable();
    ms.dedup();
    let mut residue_factors = Vec::new();
    let mut total_degree = 0;
    for &m in &ms {
        let g = den.gcd(&(&rem - &dden.scale(&Rational::from(m))));
        let expected = found.iter().filter(|(_, mm)| *mm == m).count();
        if g.degree() != expected {
            return Err(Error::NotInClass(format!(
                "residue {m} certified at {} poles, expected {expected}",
                g.degree()
            )));
        }
        total_degree += g.degree();
        residue_factors.push((m, g));
    }
    if total_degree != den.degree() {
        return Err(Error::NotInClass("residue factors do not cover the denominator".into()));
    }

    let mut poles: Vec<PoleResidue> = found
        .into_iter()
        .map(|(z, m)| {
            let z = Complex::with_val(prec, &z);
            let exact = rational_root_near(den, &z);
            PoleResidue {
                location: match exact {
                    Some(q) => PoleLocation::exact(q, prec),
                    None => PoleLocation { value: z, exact: None },
                },
                residue: m,
            }
        })
        .collect();
    poles.sort_by(|a, b| cmp_complex(&a.location.value, &b.location.value));

    let data = PartialFractionData {
        poles,
        nu,
        mu,
        residue_factors,
    };
    if data.rebuild() != *f {
        return Err(Error::NotInClass(
            "partial-fraction rebuild does not reproduce f".into(),
        ));
    }
    Ok(data)
}

pub(crate) fn eval_cx(p: &Poly, z: &Complex) -> Complex {
    let prec = mp::prec_of(z);
    let mut acc = mp::cx_zero(prec);
    for c in p.coeffs().iter().rev() {
        acc = Complex::with_val(prec, &acc * z) + mp::cx(c, prec);
    }
    acc
}
