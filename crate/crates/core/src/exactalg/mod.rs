//! Exact arithmetic kernel: polynomials and rational functions over ℚ,
//! Wronskians, divisibility and Taylor recentering.

mod expr;
pub mod json;
mod poly;
mod ratfunc;
mod wronskian;

use rug::{Complex, Float, Rational};

pub use expr::parse_ratfunc;
pub use poly::Poly;
pub use ratfunc::{ratfunc_normalize, RatFunc};
pub use wronskian::{bareiss_det, wronskian, wronskian_polys, ExpPoly, Func};

use crate::error::{Error, Result};
use crate::mp;

/// Exact test `d | p`.
pub fn divides(d: &Poly, p: &Poly) -> Result<bool> {
    if d.is_zero() {
        return Err(Error::Domain("divisibility by the zero polynomial".into()));
    }
    Ok(p.rem(d)?.is_zero())
}

/// Coefficients of `p(z + a)`, exact.
pub fn taylor_shift(p: &Poly, a: &Rational) -> Vec<Rational> {
    let mut c = p.taylor_shift(a).into_coeffs();
    c.resize(p.coeffs().len(), Rational::new());
    c
}

/// Multiprecision Taylor shift with a running forward error bound.
#[derive(Clone, Debug)]
pub struct MpShift {
    pub coeffs: Vec<Complex>,
    /// Upper estimate of `|computed - exact|` per coefficient.
    pub error: Vec<Float>,
}

/// Coefficients of `p(z + a)` for a multiprecision complex shift, computed at
/// the precision of `a` by repeated synthetic division.
///
/// The error bound follows each update `b_j += a·b_{j+1}` with the standard
/// first-order model: inherited error `e_j + |a| e_{j+1}` plus a rounding term
/// proportional to the magnitudes involved.
pub fn taylor_shift_mp(p: &Poly, a: &Complex) -> MpShift {
    let prec = mp::prec_of(a);
    let ulp = mp::pow2_neg(prec.saturating_sub(3), 64);
    let abs_a = Float::with_val(64, a.abs_ref());
    let mut b: Vec<Complex> = p.coeffs().iter().map(|c| mp::cx(c, prec)).collect();
    let mut e: Vec<Float> = b.iter().map(|c| Float::with_val(64, c.abs_ref()) * &ulp).collect();
    let n = b.len();
    for k in 0..n {
        for j in (k..n.saturating_sub(1)).rev() {
            let t = Complex::with_val(prec, a * &b[j + 1]);
            let mag = Float::with_val(64, b[j].abs_ref()) + Float::with_val(64, t.abs_ref());
            b[j] += t;
            let inherited = Float::with_val(64, &abs_a * &e[j + 1]);
            e[j] += inherited;
            e[j] += mag * &ulp;
        }
    }
    for x in e.iter_mut() {
        *x *= 2;
    }
    MpShift { coeffs: b, error: e }
}
