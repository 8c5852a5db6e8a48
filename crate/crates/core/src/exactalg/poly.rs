use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::{Integer, Rational};

use crate::error::{Error, Result};

/// Dense univariate polynomial over ℚ; `coeffs[i]` is the coefficient of `z^i`.
///
/// The coefficient vector never carries trailing zeros, so the zero
/// polynomial is the empty vector.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.cmp0().is_eq()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Rational::from(c)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rational::from(1))
    }

    /// The identity polynomial `z`.
    pub fn z() -> Self {
        Poly::monomial(Rational::from(1), 1)
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::new(); k + 1];
        coeffs[k] = c;
        Poly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| Rational::from(c * Integer::from(i)))
                .collect(),
        )
    }

    pub fn nth_derivative(&self, k: usize) -> Poly {
        (0..k).fold(self.clone(), |p, _| p.derivative())
    }

    /// Antiderivative with the given constant term.
    pub fn integrate(&self, constant: Rational) -> Poly {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(constant);
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs.push(Rational::from(c / Integer::from(i + 1)));
        }
        Poly::new(coeffs)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| Rational::from(a * c)).collect())
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(lc) => {
                let inv = Rational::from(lc.recip_ref());
                self.scale(&inv)
            }
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Euclidean division `self = q·d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        let lc = d
            .leading()
            .ok_or_else(|| Error::Domain("polynomial division by zero".into()))?;
        let lc_inv = Rational::from(lc.recip_ref());
        let dd = d.degree();
        let mut rem = self.coeffs.clone();
        if rem.len() < d.coeffs.len() {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![Rational::new(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = Rational::from(&rem[k + dd] * &lc_inv);
            if c.cmp0().is_ne() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[k + j] -= Rational::from(&c * dc);
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    pub fn rem(&self, d: &Poly) -> Result<Poly> {
        Ok(self.div_rem(d)?.1)
    }

    /// Quotient of a division known to be exact.
    ///
    /// Panics if `d` is zero or the remainder is nonzero; callers use it only
    /// where exactness holds by construction.
    pub fn exact_div(&self, d: &Poly) -> Poly {
        let (q, r) = self.div_rem(d).expect("exact_div by zero polynomial");
        assert!(r.is_zero(), "exact_div: nonzero remainder");
        q
    }

    /// Monic greatest common divisor (zero iff both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.monic();
        let mut b = other.monic();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r.monic();
        }
        a
    }

    /// Inverse of `self` modulo `m`, if `gcd(self, m) = 1`.
    pub fn inverse_mod(&self, m: &Poly) -> Option<Poly> {
        // extended Euclid tracking only the cofactor of `self`
        let mut r0 = m.clone();
        let mut r1 = self.rem(m).ok()?;
        let mut s0 = Poly::zero();
        let mut s1 = Poly::one();
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1).ok()?;
            let s = &s0 - &(&q * &s1);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        if r0.degree() != 0 {
            return None;
        }
        let inv = Rational::from(r0.leading()?.recip_ref());
        s0.scale(&inv).rem(m).ok()
    }

    /// Yun's squarefree decomposition: `self = lc · Π aᵢ^i` with every `aᵢ`
    /// monic, squarefree and pairwise coprime. Factors equal to 1 are omitted.
    pub fn squarefree_decomposition(&self) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        if self.degree() == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let b = f.gcd(&df);
        let mut c = f.exact_div(&b);
        let mut d = &df.exact_div(&b) - &c.derivative();
        let mut i = 1;
        while c.degree() > 0 {
            let a = c.gcd(&d);
            c = c.exact_div(&a);
            d = &d.exact_div(&a) - &c.derivative();
            if a.degree() > 0 {
                out.push((a, i));
            }
            i += 1;
        }
        out
    }

    pub fn squarefree_part(&self) -> Poly {
        self.squarefree_decomposition()
            .into_iter()
            .fold(Poly::one(), |acc, (a, _)| &acc * &a)
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == 0
    }

    /// `p(β z)`.
    pub fn scale_arg(&self, beta: &Rational) -> Poly {
        let mut pw = Rational::from(1);
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            coeffs.push(Rational::from(c * &pw));
            pw *= beta;
        }
        Poly::new(coeffs)
    }

    /// Coefficients of `p(z + a)` by repeated synthetic division.
    pub fn taylor_shift(&self, a: &Rational) -> Poly {
        let mut b = self.coeffs.clone();
        let n = b.len();
        for k in 0..n {
            for j in (k..n.saturating_sub(1)).rev() {
                let t = Rational::from(a * &b[j + 1]);
                b[j] += t;
            }
        }
        Poly::new(b)
    }

    /// Integer coefficients of the primitive integer multiple of `self`
    /// with positive leading coefficient.
    pub fn primitive_integer(&self) -> Vec<Integer> {
        let mut lcm = Integer::from(1);
        for c in &self.coeffs {
            lcm.lcm_mut(c.denom());
        }
        let mut ints: Vec<Integer> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * Integer::from(&lcm / c.denom()))
            .collect();
        let mut g = Integer::new();
        for c in &ints {
            g.gcd_mut(c);
        }
        if g.cmp0().is_ne() {
            if ints.last().is_some_and(|c| c.cmp0().is_lt()) {
                g = -g;
            }
            for c in ints.iter_mut() {
                *c /= &g;
            }
        }
        ints
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new(
            (0..n)
                .map(|i| match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                    (Some(a), Some(b)) => Rational::from(a + b),
                    (Some(a), None) | (None, Some(a)) => a.clone(),
                    (None, None) => unreachable!(),
                })
                .collect(),
        )
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| Rational::from(-c)).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::new(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.cmp0().is_eq() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += Rational::from(a * b);
            }
        }
        Poly::new(out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.cmp0().is_eq() {
                continue;
            }
            let mag = Rational::from(c.abs_ref());
            if first {
                if c.cmp0().is_lt() {
                    write!(f, "-")?;
                }
            } else if c.cmp0().is_lt() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            let unit = mag == 1;
            match (i, unit) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "z")?,
                (1, false) => write!(f, "{mag}*z")?,
                (_, true) => write!(f, "z^{i}")?,
                (_, false) => write!(f, "{mag}*z^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn trims_trailing_zeros() {
        let p = Poly::from_ints(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), 1);
        assert!(Poly::from_ints(&[0, 0]).is_zero());
    }

    #[test]
    fn division_and_remainder() {
        // (z^3 - 1) = (z - 1)(z^2 + z + 1)
        let p = Poly::from_ints(&[-1, 0, 0, 1]);
        let d = Poly::from_ints(&[-1, 1]);
        let (qq, r) = p.div_rem(&d).unwrap();
        assert_eq!(qq, Poly::from_ints(&[1, 1, 1]));
        assert!(r.is_zero());
        assert!(matches!(p.div_rem(&Poly::zero()), Err(Error::Domain(_))));
    }

    #[test]
    fn gcd_is_monic() {
        let a = &Poly::from_ints(&[-1, 0, 1]) * &Poly::from_ints(&[3]);
        let b = Poly::from_ints(&[-2, 2]);
        assert_eq!(a.gcd(&b), Poly::from_ints(&[-1, 1]));
    }

    #[test]
    fn yun_decomposition() {
        // z^2 (z - 1)
        let p = Poly::from_ints(&[0, 0, -1, 1]);
        let sq = p.squarefree_decomposition();
        assert_eq!(sq, vec![(Poly::from_ints(&[-1, 1]), 1), (Poly::z(), 2)]);
        assert_eq!(p.squarefree_part(), Poly::from_ints(&[0, -1, 1]));
    }

    #[test]
    fn inverse_modulo() {
        let m = Poly::from_ints(&[2, 0, 1]); // z^2 + 2
        let a = Poly::from_ints(&[1, 1]);
        let inv = a.inverse_mod(&m).unwrap();
        assert_eq!((&a * &inv).rem(&m).unwrap(), Poly::one());
        assert!(Poly::from_ints(&[0, 1])
            .inverse_mod(&Poly::from_ints(&[0, 1]))
            .is_none());
    }

    #[test]
    fn shift_examples() {
        let z2 = Poly::from_ints(&[0, 0, 1]);
        assert_eq!(z2.taylor_shift(&q(0, 1)), z2);
        assert_eq!(z2.taylor_shift(&q(1, 1)), Poly::from_ints(&[1, 2, 1]));
        let h2 = Poly::from_ints(&[-2, 0, 4]);
        assert_eq!(h2.taylor_shift(&q(1, 2)), Poly::from_ints(&[-1, 4, 4]));
    }

    #[test]
    fn display() {
        let p = Poly::new(vec![q(-1, 1), q(0, 1), q(0, 1), q(1, 3)]);
        assert_eq!(p.to_string(), "1/3*z^3 - 1");
        assert_eq!(Poly::from_ints(&[4, 0, 8]).to_string(), "8*z^2 + 4");
    }

    #[test]
    fn primitive_integer_form() {
        let p = Poly::new(vec![q(-1, 2), q(0, 1), q(-3, 4)]);
        let ints = p.primitive_integer();
        assert_eq!(ints, vec![Integer::from(2), Integer::from(0), Integer::from(3)]);
    }
}
