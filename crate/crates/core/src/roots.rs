//! Simultaneous polynomial root finding (Aberth–Ehrlich) in multiprecision.
//!
//! Roots are first located at 64 bits, then iterated to the requested
//! precision. Each returned root carries an inclusion radius
//! `n·|p(z)/p'(z)|`; the disc of that radius around `z` contains a root.

use rug::{Complex, Float, Rational};

use crate::error::{Error, Result};
use crate::exactalg::Poly;
use crate::mp;

#[derive(Clone, Debug)]
pub struct RootApprox {
    pub value: Complex,
    pub radius: Float,
}

const COARSE_PREC: u32 = 64;

fn horner(coeffs: &[Complex], z: &Complex, prec: u32) -> (Complex, Complex) {
    let mut p = mp::cx_zero(prec);
    let mut dp = mp::cx_zero(prec);
    for c in coeffs.iter().rev() {
        dp = Complex::with_val(prec, &dp * z);
        dp += &p;
        p = Complex::with_val(prec, &p * z);
        p += c;
    }
    (p, dp)
}

/// One Aberth sweep (Gauss–Seidel order); returns the largest relative correction.
fn aberth_sweep(coeffs: &[Complex], zs: &mut [Complex], prec: u32) -> Float {
    let n = zs.len();
    let mut worst = Float::new(prec);
    for i in 0..n {
        let (p, dp) = horner(coeffs, &zs[i], prec);
        if mp::is_zero(&p) {
            continue;
        }
        let ratio = match mp::recip(&dp) {
            Some(inv) => Complex::with_val(prec, &p * &inv),
            None => {
                // stationary point: nudge off it
                let nudge = mp::cx_f64(1e-3, 1e-3, prec);
                zs[i] += nudge;
                worst = Float::with_val(prec, 1);
                continue;
            }
        };
        let mut s = mp::cx_zero(prec);
        for j in 0..n {
            if j != i {
                let d = Complex::with_val(prec, &zs[i] - &zs[j]);
                if let Some(r) = mp::recip(&d) {
                    s += r;
                }
            }
        }
        let denom = Complex::with_val(prec, 1 - Complex::with_val(prec, &ratio * &s));
        let w = match mp::recip(&denom) {
            Some(inv) => Complex::with_val(prec, &ratio * &inv),
            None => ratio,
        };
        let scale = mp::abs(&zs[i]).max(&Float::with_val(prec, 1));
        let rel = Float::with_val(prec, mp::abs(&w) / scale);
        if rel > worst {
            worst = rel;
        }
        zs[i] -= w;
    }
    worst
}

fn initial_guesses(coeffs: &[Complex], prec: u32) -> Vec<Complex> {
    let n = coeffs.len() - 1;
    // Fujiwara-type radius bound for the monic polynomial
    let mut radius = Float::with_val(prec, 0);
    for i in 1..=n {
        let a = mp::abs(&coeffs[n - i]);
        if a.is_zero() {
            continue;
        }
        let r = a.root(i as u32);
        if r > radius {
            radius = r;
        }
    }
    let radius = radius.to_f64().max(1e-3);
    let center = Complex::with_val(prec, &coeffs[n - 1] / (-(n as i32)));
    (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + 0.4;
            let mut z = mp::cx_f64(radius * theta.cos(), radius * theta.sin(), prec);
            z += &center;
            z
        })
        .collect()
}

/// All complex roots of a squarefree polynomial at `prec` bits.
pub fn complex_roots(p: &Poly, prec: u32) -> Result<Vec<RootApprox>> {
    let n = p.degree();
    if p.is_zero() || n == 0 {
        return Ok(Vec::new());
    }
    let lc_inv = Rational::from(p.leading().expect("nonzero").recip_ref());
    let monic: Vec<Rational> = p.coeffs().iter().map(|c| Rational::from(c * &lc_inv)).collect();
    if n == 1 {
        let root = mp::cx(&Rational::from(-&monic[0]), prec);
        return Ok(vec![RootApprox {
            value: root,
            radius: Float::new(prec),
        }]);
    }

    let coarse: Vec<Complex> = monic.iter().map(|c| mp::cx(c, COARSE_PREC)).collect();
    let mut zs = initial_guesses(&coarse, COARSE_PREC);
    let coarse_tol = mp::pow2_neg(COARSE_PREC - 12, COARSE_PREC);
    for _ in 0..(200 + 20 * n) {
        if aberth_sweep(&coarse, &mut zs, COARSE_PREC) < coarse_tol {
            break;
        }
    }

    let fine: Vec<Complex> = monic.iter().map(|c| mp::cx(c, prec)).collect();
    let mut zs: Vec<Complex> = zs.into_iter().map(|z| Complex::with_val(prec, z)).collect();
    let tol = mp::pow2_neg(prec.saturating_sub(8), prec);
    let budget = 200 + 20 * n;
    let floor = mp::pow2_neg(prec / 2, prec);
    let mut converged = false;
    let mut last = Float::with_val(prec, 1);
    for _ in 0..budget {
        let rel = aberth_sweep(&fine, &mut zs, prec);
        // below 2^{-P/2} a correction that no longer halves means rounding noise
        let stalled = rel < floor && Float::with_val(prec, &rel * 2u32) > last;
        last = rel;
        if last < tol || stalled {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Precision(format!(
            "Aberth iteration did not converge for degree {n} at {prec} bits \
             (last relative correction {})",
            mp::fmt_float_short(&last)
        )));
    }
    // one polishing sweep after convergence
    aberth_sweep(&fine, &mut zs, prec);

    let cluster = mp::pow2_neg(prec / 2, prec);
    for i in 0..n {
        for j in i + 1..n {
            let d = mp::abs(&Complex::with_val(prec, &zs[i] - &zs[j]));
            if d < cluster {
                return Err(Error::Precision(format!(
                    "unresolved root cluster: two roots of a squarefree factor of degree {n} \
                     closer than 2^-{} at {prec} bits",
                    prec / 2
                )));
            }
        }
    }

    Ok(zs
        .into_iter()
        .map(|z| {
            let (pz, dpz) = horner(&fine, &z, prec);
            let radius = match mp::recip(&dpz) {
                Some(inv) => Float::with_val(prec, mp::abs(&Complex::with_val(prec, &pz * &inv)) * n as u32),
                None => Float::with_val(prec, 1),
            };
            RootApprox { value: z, radius }
        })
        .collect())
}

/// Roots of an arbitrary nonzero polynomial, listed with multiplicity
/// (squarefree decomposition first, then [`complex_roots`] per factor).
pub fn roots_with_multiplicity(p: &Poly, prec: u32) -> Result<Vec<(RootApprox, usize)>> {
    let mut out = Vec::new();
    for (factor, mult) in p.squarefree_decomposition() {
        for r in complex_roots(&factor, prec)? {
            out.push((r, mult));
        }
    }
    Ok(out)
}

/// The exact rational root of `p` near `z`, if there is one.
///
/// Any rational root has a denominator dividing the leading coefficient of
/// the primitive integer form, so rounding `lc·Re z` gives the only candidate;
/// it is then checked exactly.
pub fn rational_root_near(p: &Poly, z: &Complex) -> Option<Rational> {
    let prec = mp::prec_of(z);
    if p.is_constant() || mp::abs(&Complex::with_val(prec, z.imag())) > mp::pow2_neg(prec / 2, prec) {
        return None;
    }
    let lc = p.primitive_integer().pop()?;
    let scaled = Float::with_val(prec, z.real() * &lc);
    let num = scaled.round().to_integer()?;
    let cand = Rational::from((num, lc));
    if p.eval(&cand).cmp0().is_eq() {
        Some(cand)
    } else {
        None
    }
}

/// Order by real part, then imaginary part.
pub fn cmp_complex(a: &Complex, b: &Complex) -> std::cmp::Ordering {
    use std::cmp::Ordering::Equal;
    a.real()
        .partial_cmp(b.real())
        .unwrap_or(Equal)
        .then(a.imag().partial_cmp(b.imag()).unwrap_or(Equal))
}

pub fn sort_roots(roots: &mut [Complex]) {
    roots.sort_by(cmp_complex);
}
