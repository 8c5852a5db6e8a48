use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::Rational;

use super::Poly;
use crate::error::{Error, Result};

/// Reduced quotient `num / den` of polynomials over ℚ.
///
/// Invariant: `gcd(num, den) = 1` and `den` is monic. Every arithmetic
/// operation re-establishes it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

/// Cancel the gcd and make the denominator monic.
pub fn ratfunc_normalize(num: Poly, den: Poly) -> Result<RatFunc> {
    if den.is_zero() {
        return Err(Error::Domain("rational function with zero denominator".into()));
    }
    if num.is_zero() {
        return Ok(RatFunc::zero());
    }
    let g = num.gcd(&den);
    let (num, den) = if g.degree() > 0 {
        (num.exact_div(&g), den.exact_div(&g))
    } else {
        (num, den)
    };
    let lc_inv = Rational::from(den.leading().expect("nonzero").recip_ref());
    Ok(RatFunc {
        num: num.scale(&lc_inv),
        den: den.scale(&lc_inv),
    })
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        ratfunc_normalize(num, den)
    }

    pub fn zero() -> Self {
        RatFunc {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn constant(c: Rational) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }

    /// The identity function `z`.
    pub fn z() -> Self {
        RatFunc::from_poly(Poly::z())
    }

    /// Logarithmic derivative `p'/p`.
    pub fn log_derivative(p: &Poly) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::Domain("logarithmic derivative of zero".into()));
        }
        ratfunc_normalize(p.derivative(), p.clone())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// True for degree-0 (constant) functions, including zero.
    pub fn is_constant(&self) -> bool {
        self.den.degree() == 0 && self.num.is_constant()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        self.is_constant().then(|| self.num.coeff(0))
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        (self.den.degree() == 0).then_some(&self.num)
    }

    pub fn derivative(&self) -> RatFunc {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        ratfunc_normalize(n, &self.den * &self.den).expect("nonzero denominator")
    }

    pub fn scale(&self, c: &Rational) -> RatFunc {
        if c.cmp0().is_eq() {
            return RatFunc::zero();
        }
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn recip(&self) -> Result<RatFunc> {
        ratfunc_normalize(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, rhs: &RatFunc) -> Result<RatFunc> {
        Ok(self * &rhs.recip()?)
    }

    pub fn pow(&self, k: u32) -> RatFunc {
        RatFunc {
            num: self.num.pow(k),
            den: self.den.pow(k),
        }
    }

    /// `f(β z)`.
    pub fn scale_arg(&self, beta: &Rational) -> Result<RatFunc> {
        ratfunc_normalize(self.num.scale_arg(beta), self.den.scale_arg(beta))
    }

    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        let d = self.den.eval(x);
        (d.cmp0().is_ne()).then(|| self.num.eval(x) / d)
    }

    /// Polynomial part and proper remainder: `f = q + r/den`.
    pub fn polynomial_part(&self) -> (Poly, Poly) {
        self.num.div_rem(&self.den).expect("nonzero denominator")
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.den == rhs.den {
            return ratfunc_normalize(&self.num + &rhs.num, self.den.clone()).expect("nonzero");
        }
        let g = self.den.gcd(&rhs.den);
        let a = rhs.den.exact_div(&g);
        let b = self.den.exact_div(&g);
        let num = &(&self.num * &a) + &(&rhs.num * &b);
        ratfunc_normalize(num, &self.den * &a).expect("nonzero")
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        ratfunc_normalize(&self.num * &rhs.num, &self.den * &rhs.den).expect("nonzero")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: RatFunc) -> RatFunc {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

impl From<Poly> for RatFunc {
    fn from(p: Poly) -> Self {
        RatFunc::from_poly(p)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}
