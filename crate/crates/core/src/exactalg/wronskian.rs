use rug::Rational;

use super::Poly;
use crate::error::{Error, Result};

/// `e^{rate·z} · poly(z)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExpPoly {
    pub rate: Rational,
    pub poly: Poly,
}

impl ExpPoly {
    pub fn new(rate: Rational, poly: Poly) -> Self {
        ExpPoly { rate, poly }
    }

    /// `e^{νz}` itself.
    pub fn exp(rate: Rational) -> Self {
        ExpPoly::new(rate, Poly::one())
    }

    /// `(e^{νz} p)' = e^{νz} (ν p + p')`.
    pub fn derivative(&self) -> ExpPoly {
        ExpPoly {
            rate: self.rate.clone(),
            poly: &self.poly.scale(&self.rate) + &self.poly.derivative(),
        }
    }
}

/// An entry of a Wronskian: a polynomial or an exponential-polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Func {
    Poly(Poly),
    Exp(ExpPoly),
}

impl From<Poly> for Func {
    fn from(p: Poly) -> Self {
        Func::Poly(p)
    }
}

impl From<ExpPoly> for Func {
    fn from(e: ExpPoly) -> Self {
        Func::Exp(e)
    }
}

impl Func {
    pub fn into_poly(self) -> Option<Poly> {
        match self {
            Func::Poly(p) => Some(p),
            Func::Exp(_) => None,
        }
    }

    pub fn into_exp(self) -> Option<ExpPoly> {
        match self {
            Func::Exp(e) => Some(e),
            Func::Poly(_) => None,
        }
    }
}

/// Wronskian `det(f_j^{(i)})`.
///
/// At most one exponential entry is allowed; its factor `e^{νz}` is pulled
/// out of its column (using `(e^{νz})^{(i)} = ν^i e^{νz}` via the product
/// rule), so the result is an [`ExpPoly`] whenever one is present. The empty
/// Wronskian is 1.
pub fn wronskian(fs: &[Func]) -> Result<Func> {
    let exps = fs.iter().filter(|f| matches!(f, Func::Exp(_))).count();
    if exps > 1 {
        return Err(Error::Unsupported(format!(
            "Wronskian with {exps} exponential entries (at most one supported)"
        )));
    }
    let n = fs.len();
    let mut rate = None;
    // columns[j][i] = i-th derivative of f_j with e^{νz} stripped
    let columns: Vec<Vec<Poly>> = fs
        .iter()
        .map(|f| match f {
            Func::Poly(p) => {
                let mut col = Vec::with_capacity(n);
                let mut d = p.clone();
                for _ in 0..n {
                    let next = d.derivative();
                    col.push(d);
                    d = next;
                }
                col
            }
            Func::Exp(e) => {
                rate = Some(e.rate.clone());
                let mut col = Vec::with_capacity(n);
                let mut d = e.clone();
                for _ in 0..n {
                    let next = d.derivative();
                    col.push(d.poly);
                    d = next;
                }
                col
            }
        })
        .collect();
    let matrix: Vec<Vec<Poly>> = (0..n)
        .map(|i| columns.iter().map(|col| col[i].clone()).collect())
        .collect();
    let det = bareiss_det(matrix);
    Ok(match rate {
        Some(rate) => Func::Exp(ExpPoly::new(rate, det)),
        None => Func::Poly(det),
    })
}

/// Wronskian of polynomials only.
pub fn wronskian_polys(ps: &[Poly]) -> Poly {
    let fs: Vec<Func> = ps.iter().cloned().map(Func::Poly).collect();
    wronskian(&fs)
        .expect("no exponential entries")
        .into_poly()
        .expect("polynomial Wronskian")
}

/// Fraction-free (Bareiss) determinant over ℚ[z]; every division is exact.
pub fn bareiss_det(mut m: Vec<Vec<Poly>>) -> Poly {
    let n = m.len();
    if n == 0 {
        return Poly::one();
    }
    let mut negate = false;
    let mut prev = Poly::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    negate = !negate;
                }
                None => return Poly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = t.exact_div(&prev);
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn single_entry_is_itself() {
        assert_eq!(wronskian_polys(&[Poly::z()]), Poly::z());
    }

    #[test]
    fn adler_moser_pair() {
        for tau in [q(0, 1), q(1, 1), q(-3, 7)] {
            let p2 = Poly::new(vec![tau.clone(), q(0, 1), q(0, 1), q(1, 6)]);
            let w = wronskian_polys(&[Poly::z(), p2]);
            // z·(z²/2) − (z³/6 + τ) = z³/3 − τ
            let expected = Poly::new(vec![Rational::from(-&tau), q(0, 1), q(0, 1), q(1, 3)]);
            assert_eq!(w, expected);
        }
    }

    #[test]
    fn hermite_pair() {
        let h1 = Poly::from_ints(&[0, 2]);
        let h2 = Poly::from_ints(&[-2, 0, 4]);
        assert_eq!(wronskian_polys(&[h1, h2]), Poly::from_ints(&[4, 0, 8]));
    }

    #[test]
    fn exponential_column() {
        // W(z, e^{νz}) = e^{νz}(νz − 1)
        let nu = q(3, 2);
        let w = wronskian(&[Poly::z().into(), ExpPoly::exp(nu.clone()).into()])
            .unwrap()
            .into_exp()
            .unwrap();
        assert_eq!(w.rate, nu);
        assert_eq!(w.poly, Poly::new(vec![q(-1, 1), q(3, 2)]));
    }

    #[test]
    fn two_exponentials_unsupported() {
        let e = Func::Exp(ExpPoly::exp(q(1, 1)));
        assert!(matches!(wronskian(&[e.clone(), e]), Err(Error::Unsupported(_))));
    }

    #[test]
    fn dependent_columns_vanish() {
        let p = Poly::from_ints(&[1, 2, 3]);
        assert!(wronskian_polys(&[p.clone(), p.scale(&q(5, 1))]).is_zero());
    }
}
