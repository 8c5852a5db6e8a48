//! Laurent coefficients of a rational function at a pole, over a choice of
//! coefficient ring.
//!
//! Three rings are provided:
//!
//! * [`RationalField`]: the pole is a rational number.
//! * [`ResidueRing`]: arithmetic in `ℚ[z]/(g)` for a squarefree `g`. Working
//!   modulo `g` evaluates at every root of `g` simultaneously, so a
//!   coefficient that reduces to zero vanishes at all of them, exactly.
//! * [`ComplexField`]: multiprecision complex numbers at a numeric location.
//!
//! The kernel Taylor-shifts numerator and denominator to the pole, drops the
//! `k` leading denominator coefficients that vanish there (`k` = pole order)
//! and divides the resulting power series.

use rug::{Complex, Rational};

use crate::error::{Error, Result};
use crate::exactalg::Poly;
use crate::mp;

pub trait CoeffRing {
    type Elem: Clone + std::fmt::Debug;

    fn from_rational(&self, q: &Rational) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;

    fn zero(&self) -> Self::Elem {
        self.from_rational(&Rational::new())
    }

    /// First `len` coefficients of `p(t + at)` in powers of `t`.
    fn shift(&self, p: &Poly, at: &Self::Elem, len: usize) -> Vec<Self::Elem> {
        synthetic_shift(self, p, at, len)
    }
}

/// Taylor shift by repeated synthetic division, valid in any commutative ring.
pub fn synthetic_shift<R: CoeffRing + ?Sized>(ring: &R, p: &Poly, at: &R::Elem, len: usize) -> Vec<R::Elem> {
    let mut b: Vec<R::Elem> = p.coeffs().iter().map(|c| ring.from_rational(c)).collect();
    let n = b.len();
    for k in 0..n.min(len) {
        for j in (k..n.saturating_sub(1)).rev() {
            let t = ring.mul(at, &b[j + 1]);
            b[j] = ring.add(&b[j], &t);
        }
    }
    b.resize(len, ring.zero());
    b
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RationalField;

impl CoeffRing for RationalField {
    type Elem = Rational;

    fn from_rational(&self, q: &Rational) -> Rational {
        q.clone()
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        Rational::from(a + b)
    }
    fn sub(&self, a: &Rational, b: &Rational) -> Rational {
        Rational::from(a - b)
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        Rational::from(a * b)
    }
    fn inv(&self, a: &Rational) -> Result<Rational> {
        if a.cmp0().is_eq() {
            return Err(Error::Domain("division by zero in Laurent series".into()));
        }
        Ok(Rational::from(a.recip_ref()))
    }
}

/// `ℚ[z]/(modulus)`, elements kept reduced.
#[derive(Clone, Debug)]
pub struct ResidueRing {
    modulus: Poly,
}

impl ResidueRing {
    pub fn new(modulus: Poly) -> Result<Self> {
        if modulus.is_constant() {
            return Err(Error::Domain("residue ring needs a nonconstant modulus".into()));
        }
        Ok(ResidueRing {
            modulus: modulus.monic(),
        })
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    /// The class of `z`, i.e. a generic root of the modulus.
    pub fn generator(&self) -> Poly {
        self.reduce(&Poly::z())
    }

    pub fn reduce(&self, p: &Poly) -> Poly {
        p.rem(&self.modulus).expect("modulus is nonzero")
    }
}

impl CoeffRing for ResidueRing {
    type Elem = Poly;

    fn from_rational(&self, q: &Rational) -> Poly {
        Poly::constant(q.clone())
    }
    fn add(&self, a: &Poly, b: &Poly) -> Poly {
        a + b
    }
    fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        a - b
    }
    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        self.reduce(&(a * b))
    }
    fn inv(&self, a: &Poly) -> Result<Poly> {
        a.inverse_mod(&self.modulus)
            .ok_or_else(|| Error::Domain("leading Laurent coefficient is not invertible modulo the pole factor".into()))
    }

    fn shift(&self, p: &Poly, at: &Poly, len: usize) -> Vec<Poly> {
        if *at != self.generator() {
            return synthetic_shift(self, p, at, len);
        }
        // coefficient j of p(t + a) is p^{(j)}(a)/j!
        let mut out = Vec::with_capacity(len);
        let mut d = p.clone();
        let mut fact = Rational::from(1);
        for j in 0..len {
            if j > 0 {
                d = d.derivative();
                fact *= j as u32;
            }
            if d.is_zero() {
                out.push(Poly::zero());
            } else {
                out.push(self.reduce(&d.scale(&Rational::from(fact.recip_ref()))));
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ComplexField {
    pub prec: u32,
}

impl CoeffRing for ComplexField {
    type Elem = Complex;

    fn from_rational(&self, q: &Rational) -> Complex {
        mp::cx(q, self.prec)
    }
    fn add(&self, a: &Complex, b: &Complex) -> Complex {
        Complex::with_val(self.prec, a + b)
    }
    fn sub(&self, a: &Complex, b: &Complex) -> Complex {
        Complex::with_val(self.prec, a - b)
    }
    fn mul(&self, a: &Complex, b: &Complex) -> Complex {
        Complex::with_val(self.prec, a * b)
    }
    fn inv(&self, a: &Complex) -> Result<Complex> {
        mp::recip(a).ok_or_else(|| Error::Precision("leading Laurent coefficient vanished numerically".into()))
    }
}

/// Laurent coefficients `c_lo, …, c_hi` of `num/den` at `at`, where `at` is
/// a zero of `den` of exact order `order` (and `num/den` is reduced).
///
/// Entries with index below `−order` are zero.
pub fn laurent_coeffs<R: CoeffRing>(
    ring: &R,
    num: &Poly,
    den: &Poly,
    at: &R::Elem,
    order: usize,
    lo: i64,
    hi: i64,
) -> Result<Vec<R::Elem>> {
    if hi < lo {
        return Ok(Vec::new());
    }
    let k = order as i64;
    if hi < -k {
        return Ok(vec![ring.zero(); (hi - lo + 1) as usize]);
    }
    // series index i corresponds to exponent i - k
    let len = (hi + k + 1) as usize;
    let n = ring.shift(num, at, len);
    let d_full = ring.shift(den, at, len + order);
    let d = &d_full[order..];
    let d0_inv = ring.inv(&d[0])?;
    let mut q: Vec<R::Elem> = Vec::with_capacity(len);
    for i in 0..len {
        let mut acc = n[i].clone();
        for l in 1..=i {
            let t = ring.mul(&d[l], &q[i - l]);
            acc = ring.sub(&acc, &t);
        }
        q.push(ring.mul(&acc, &d0_inv));
    }
    Ok((lo..=hi)
        .map(|e| {
            let i = e + k;
            if i < 0 {
                ring.zero()
            } else {
                q[i as usize].clone()
            }
        })
        .collect())
}
