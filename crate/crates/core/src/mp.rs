//! Multiprecision complex helpers over MPFR/MPC.
//!
//! Every value carries its own precision in bits; helpers derive result
//! precision from their inputs and never round to a coarser one.

use rug::float::Round;
use rug::ops::Pow;
use rug::{Complex, Float, Rational};
use serde_json::{json, Value};

pub fn cx(q: &Rational, prec: u32) -> Complex {
    Complex::with_val(prec, (q, 0))
}

pub fn cx_f64(re: f64, im: f64, prec: u32) -> Complex {
    Complex::with_val(prec, (re, im))
}

pub fn cx_zero(prec: u32) -> Complex {
    Complex::new(prec)
}

pub fn prec_of(c: &Complex) -> u32 {
    let (a, b) = c.prec();
    a.max(b)
}

pub fn abs(c: &Complex) -> Float {
    Float::with_val(prec_of(c), c.abs_ref())
}

/// `10^{-k}` at the given precision.
pub fn pow10_neg(k: u32, prec: u32) -> Float {
    let ten = Float::with_val(prec, 10);
    ten.pow(-(k as i32))
}

/// Pass threshold tied to working precision: `10^{-(bits/4)}`.
pub fn bits_tolerance(bits: u32) -> Float {
    pow10_neg(bits / 4, bits.max(64))
}

/// `2^{-k}` at the given precision.
pub fn pow2_neg(k: u32, prec: u32) -> Float {
    Float::with_val(prec, Float::i_exp(1, -(k as i32)))
}

pub fn decimal_digits(prec: u32) -> usize {
    ((prec as f64) * std::f64::consts::LOG10_2).ceil() as usize
}

/// Decimal rendering with as many digits as the precision supports.
pub fn fmt_float(x: &Float) -> String {
    x.to_string_radix_round(10, Some(decimal_digits(x.prec())), Round::Nearest)
}

/// Short decimal rendering (for magnitudes in reports).
pub fn fmt_float_short(x: &Float) -> String {
    x.to_string_radix_round(10, Some(20), Round::Nearest)
}

/// `{"re": .., "im": .., "bits": ..}`.
pub fn complex_json(c: &Complex) -> Value {
    json!({
        "re": fmt_float(c.real()),
        "im": fmt_float(c.imag()),
        "bits": prec_of(c),
    })
}

/// Inverse of [`complex_json`]; also accepts `[re, im]` and plain numbers.
/// Components may be JSON numbers or decimal strings.
pub fn complex_from_json(v: &Value, prec: u32) -> crate::Result<Complex> {
    let part = |x: &Value, what: &str| -> crate::Result<Float> {
        let bad = || crate::Error::Parse(format!("{what}: expected a decimal number, got {x}"));
        match x {
            Value::Number(n) => n.as_f64().map(|f| Float::with_val(prec, f)).ok_or_else(bad),
            Value::String(s) => Float::parse(s).map(|p| Float::with_val(prec, p)).map_err(|_| bad()),
            _ => Err(bad()),
        }
    };
    match v {
        Value::Object(m) => {
            let re = m
                .get("re")
                .ok_or_else(|| crate::Error::Parse("missing field \"re\"".into()))?;
            let zero = Value::from(0);
            let im = m.get("im").unwrap_or(&zero);
            Ok(Complex::with_val(prec, (part(re, "re")?, part(im, "im")?)))
        }
        Value::Array(a) if a.len() == 2 => Ok(Complex::with_val(prec, (part(&a[0], "[0]")?, part(&a[1], "[1]")?))),
        other => Ok(Complex::with_val(prec, part(other, "value")?)),
    }
}

pub fn max_abs<'a>(values: impl IntoIterator<Item = &'a Complex>, prec: u32) -> Float {
    let mut m = Float::new(prec);
    for v in values {
        let a = abs(v);
        if a > m {
            m = a;
        }
    }
    m
}

/// `1/c`, `None` for exact zero.
pub fn recip(c: &Complex) -> Option<Complex> {
    if c.real().is_zero() && c.imag().is_zero() {
        return None;
    }
    Some(Complex::with_val(prec_of(c), c.recip_ref()))
}

pub fn is_zero(c: &Complex) -> bool {
    c.real().is_zero() && c.imag().is_zero()
}

/// Solve `A x = b` by Gaussian elimination with partial pivoting.
///
/// Returns `None` when a pivot magnitude falls below `singular_tol`.
pub fn solve_linear(mut a: Vec<Vec<Complex>>, mut b: Vec<Complex>, singular_tol: &Float) -> Option<Vec<Complex>> {
    let n = b.len();
    let prec = b.first().map(prec_of).unwrap_or(64);
    for k in 0..n {
        let (piv, mag) = (k..n)
            .map(|i| (i, abs(&a[i][k])))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap_or(std::cmp::Ordering::Equal))?;
        if mag <= *singular_tol {
            return None;
        }
        a.swap(k, piv);
        b.swap(k, piv);
        let inv = recip(&a[k][k])?;
        for i in k + 1..n {
            let factor = Complex::with_val(prec, &a[i][k] * &inv);
            if is_zero(&factor) {
                continue;
            }
            for j in k..n {
                let t = Complex::with_val(prec, &factor * &a[k][j]);
                a[i][j] -= t;
            }
            let t = Complex::with_val(prec, &factor * &b[k]);
            b[i] -= t;
        }
    }
    let mut x = vec![cx_zero(prec); n];
    for k in (0..n).rev() {
        let mut s = b[k].clone();
        for j in k + 1..n {
            s -= Complex::with_val(prec, &a[k][j] * &x[j]);
        }
        x[k] = Complex::with_val(prec, &s / &a[k][k]);
    }
    Some(x)
}
