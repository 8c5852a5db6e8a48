//! Explicit polynomial families: Hermite, Adler–Moser (with τ parameters),
//! Hermite Wronskians and exponential-augmented Adler–Moser Wronskians.

use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::{json::rational_vec, wronskian, wronskian_polys, ExpPoly, Func, Poly};

/// Distinct positive Hermite indices, stored ascending.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct HermiteSequence(Vec<u32>);

impl HermiteSequence {
    pub fn new(mut ks: Vec<u32>) -> Result<Self> {
        if ks.contains(&0) {
            return Err(Error::Domain("Hermite indices must be positive".into()));
        }
        ks.sort_unstable();
        if ks.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Domain(format!("repeated Hermite index in {ks:?}")));
        }
        Ok(HermiteSequence(ks))
    }

    pub fn empty() -> Self {
        HermiteSequence(Vec::new())
    }

    pub fn indices(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, k: u32) -> bool {
        self.0.binary_search(&k).is_ok()
    }

    pub fn with(&self, k: u32) -> Result<Self> {
        let mut ks = self.0.clone();
        ks.push(k);
        HermiteSequence::new(ks)
    }

    pub fn without(&self, k: u32) -> Self {
        HermiteSequence(self.0.iter().copied().filter(|&x| x != k).collect())
    }

    /// `Σ k_i − n(n−1)/2`.
    pub fn wronskian_degree(&self) -> usize {
        let n = self.0.len();
        self.0.iter().map(|&k| k as usize).sum::<usize>() - n * n.saturating_sub(1) / 2
    }
}

impl TryFrom<Vec<u32>> for HermiteSequence {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        HermiteSequence::new(v)
    }
}

impl From<HermiteSequence> for Vec<u32> {
    fn from(h: HermiteSequence) -> Self {
        h.0
    }
}

/// τ parameters of the Adler–Moser polynomials; `taus[k-1]` is τ_k.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TauVector(#[serde(with = "rational_vec")] pub Vec<Rational>);

impl TauVector {
    pub fn zeros(len: usize) -> Self {
        TauVector(vec![Rational::new(); len])
    }

    pub fn from_ints(v: &[i64]) -> Self {
        TauVector(v.iter().map(|&x| Rational::from(x)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Physicists' Hermite polynomial via `H_{n+1} = 2z H_n − 2n H_{n−1}`.
pub fn hermite(n: u32) -> Poly {
    let two_z = Poly::from_ints(&[0, 2]);
    let mut prev = Poly::one();
    if n == 0 {
        return prev;
    }
    let mut cur = two_z.clone();
    for k in 1..n {
        let next = &(&two_z * &cur) - &prev.scale(&Rational::from(2 * k));
        prev = cur;
        cur = next;
    }
    cur
}

/// All of `P_1, …, P_n`; requires at least `n − 1` τ's.
fn adler_moser_all(n: usize, taus: &TauVector) -> Vec<Poly> {
    let mut ps = Vec::with_capacity(n);
    let mut p = Poly::z();
    for k in 1..=n {
        if k > 1 {
            // two integrations: linear coefficient 0, constant term τ_{k-1}
            p = p.integrate(Rational::new()).integrate(taus.0[k - 2].clone());
        }
        ps.push(p.clone());
    }
    ps
}

fn check_taus(n: usize, taus: &TauVector) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("Adler–Moser index must be positive".into()));
    }
    if taus.len() != n - 1 {
        return Err(Error::Arity {
            expected: n - 1,
            got: taus.len(),
        });
    }
    Ok(())
}

/// Adler–Moser polynomial `P_n` with `P_k'' = P_{k−1}`, `P_1 = z`.
///
/// Each double integration adds a zero linear term and the constant τ_{k−1},
/// so `P_2 = z³/6 + τ₁` and `P_3 = z⁵/120 + τ₁ z²/2 + τ₂`.
pub fn adler_moser(n: usize, taus: &TauVector) -> Result<Poly> {
    check_taus(n, taus)?;
    Ok(adler_moser_all(n, taus).pop().expect("n >= 1"))
}

/// `W_n = W(P_1, …, P_n)`; `W_0 = 1`.
pub fn adler_moser_wronskian(n: usize, taus: &TauVector) -> Result<Poly> {
    if n == 0 {
        return Ok(Poly::one());
    }
    check_taus(n, taus)?;
    Ok(wronskian_polys(&adler_moser_all(n, taus)))
}

/// `W(H_{k_1}, …, H_{k_n})`; the empty sequence gives 1.
pub fn hermite_wronskian(ks: &HermiteSequence) -> Poly {
    let hs: Vec<Poly> = ks.indices().iter().map(|&k| hermite(k)).collect();
    wronskian_polys(&hs)
}

/// `Ŵ_n = W(P_1, …, P_n, e^{νz}) = e^{νz} Q(z)`.
pub fn exp_augmented_wronskian(n: usize, taus: &TauVector, nu: &Rational) -> Result<ExpPoly> {
    if nu.cmp0().is_eq() {
        return Err(Error::Domain("exp-augmented Wronskian needs nu != 0".into()));
    }
    let mut fs: Vec<Func> = if n == 0 {
        Vec::new()
    } else {
        check_taus(n, taus)?;
        adler_moser_all(n, taus).into_iter().map(Func::Poly).collect()
    };
    fs.push(Func::Exp(ExpPoly::exp(nu.clone())));
    Ok(wronskian(&fs)?.into_exp().expect("exponential entry present"))
}
