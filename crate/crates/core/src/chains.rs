//! Dressing chains `(f_i + f_{i+1})' = f_i² − f_{i+1}² + α_i` of odd period,
//! their reduction to PIV, and the residue cycles of the correspondence
//! `(x + y)(x − y + 1) = 0`.

use std::fmt;

use itertools::Itertools;
use rayon::prelude::*;
use rug::{Complex, Rational};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactalg::json::rational_to_string;
use crate::exactalg::{Poly, RatFunc};
use crate::families::{hermite_wronskian, HermiteSequence};
use crate::laurent::{laurent_coeffs, ResidueRing};
use crate::monodromy::{eval_residue_class, GUARD_BITS};
use crate::mp;
use crate::roots::complex_roots;

/// `"-2"` for integers, `"p/q"` otherwise.
pub fn rational_plain(q: &Rational) -> String {
    if *q.denom() == 1 {
        q.numer().to_string()
    } else {
        rational_to_string(q)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DressingChain {
    pub fs: Vec<RatFunc>,
    pub alphas: Vec<Rational>,
}

impl DressingChain {
    pub fn period(&self) -> usize {
        self.fs.len()
    }

    pub fn alpha_sum(&self) -> Rational {
        self.alphas.iter().fold(Rational::new(), |a, b| a + b)
    }

    /// `f_i ↦ β f_i(βz)`, which multiplies every `α_i` by `β²`.
    pub fn rescale(&self, beta: &Rational) -> Result<DressingChain> {
        let fs = self
            .fs
            .iter()
            .map(|f| Ok(f.scale_arg(beta)?.scale(beta)))
            .collect::<Result<Vec<_>>>()?;
        let b2 = Rational::from(beta * beta);
        let alphas = self.alphas.iter().map(|a| Rational::from(a * &b2)).collect();
        Ok(DressingChain { fs, alphas })
    }
}

impl Serialize for DressingChain {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(3))?;
        m.serialize_entry("N", &self.fs.len())?;
        m.serialize_entry("fs", &self.fs)?;
        m.serialize_entry("alphas", &self.alphas.iter().map(rational_plain).collect::<Vec<_>>())?;
        m.end()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainVerdict {
    pub pass: bool,
    /// `α_i` where `g_i` is constant.
    pub alphas: Vec<Option<Rational>>,
    /// 1-based index of the first non-constant `g_i`.
    pub failed_at: Option<usize>,
}

impl ChainVerdict {
    pub fn to_json(&self) -> Value {
        json!({
            "relation": "dressing_chain",
            "verdict": if self.pass { "pass" } else { "fail" },
            "alphas": self.alphas.iter().map(|a| a.as_ref().map(rational_plain)).collect::<Vec<_>>(),
            "failed_at": self.failed_at,
        })
    }
}

/// `g_i = (f_i + f_{i+1})' − f_i² + f_{i+1}²` with `f_{N+1} = f_1`.
pub fn chain_defects(fs: &[RatFunc]) -> Vec<RatFunc> {
    let n = fs.len();
    (0..n)
        .map(|i| {
            let (a, b) = (&fs[i], &fs[(i + 1) % n]);
            &(&(a + b).derivative() - &(a * a)) + &(b * b)
        })
        .collect()
}

pub fn verify_chain(fs: &[RatFunc]) -> Result<ChainVerdict> {
    if fs.len() < 3 || fs.len().is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "chain period must be odd and >= 3, got {}",
            fs.len()
        )));
    }
    let alphas: Vec<Option<Rational>> = chain_defects(fs).iter().map(|g| g.as_constant()).collect();
    let failed_at = alphas.iter().position(|a| a.is_none()).map(|i| i + 1);
    Ok(ChainVerdict {
        pass: failed_at.is_none(),
        alphas,
        failed_at,
    })
}

/// Parse `"[]<[1]<[1,2]"`.
pub fn parse_flag(s: &str) -> Result<Vec<HermiteSequence>> {
    s.split('<')
        .map(|part| {
            let t = part.trim();
            let inner = t
                .strip_prefix('[')
                .and_then(|t| t.strip_suffix(']'))
                .ok_or_else(|| Error::Parse(format!("flag entry {t:?} is not of the form [k1,k2,...]")))?;
            let ks = inner
                .split(',')
                .map(str::trim)
                .filter(|x| !x.is_empty())
                .map(|x| {
                    x.parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad index {x:?} in flag")))
                })
                .collect::<Result<Vec<_>>>()?;
            HermiteSequence::new(ks)
        })
        .collect()
}

fn validate_flag(flag: &[HermiteSequence]) -> Result<()> {
    if flag.len() < 2 {
        return Err(Error::Domain("flag needs at least two members".into()));
    }
    if !flag[0].is_empty() {
        return Err(Error::Domain("flag must start at the empty sequence".into()));
    }
    for w in flag.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if b.len() != a.len() + 1 || !a.indices().iter().all(|&k| b.contains(k)) {
            return Err(Error::Domain(format!(
                "flag step {:?} -> {:?} must add exactly one index",
                a.indices(),
                b.indices()
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
enum Step {
    /// `(log W(to)/W(from))'` plus `±μz`.
    Ladder {
        from: HermiteSequence,
        to: HermiteSequence,
        natural: i8,
    },
    /// `±μz` alone.
    Trivial,
}

fn log_ratio(to: &HermiteSequence, from: &HermiteSequence) -> Result<RatFunc> {
    let wt = hermite_wronskian(to);
    let wf = hermite_wronskian(from);
    Ok(&RatFunc::log_derivative(&wt)? - &RatFunc::log_derivative(&wf)?)
}

/// Step sequence: up to the top of the flag, down to the empty sequence in
/// the given removal order, the trivial step, then back up the flag.
fn step_plan(flag: &[HermiteSequence], removal: &[u32]) -> Vec<Step> {
    let h = flag.len() - 1;
    let mut steps = vec![Step::Ladder {
        from: flag[h - 1].clone(),
        to: flag[h].clone(),
        natural: -1,
    }];
    let mut cur = flag[h].clone();
    for &k in removal {
        let next = cur.without(k);
        steps.push(Step::Ladder {
            from: cur,
            to: next.clone(),
            natural: 1,
        });
        cur = next;
    }
    steps.push(Step::Trivial);
    for i in 0..h - 1 {
        steps.push(Step::Ladder {
            from: flag[i].clone(),
            to: flag[i + 1].clone(),
            natural: -1,
        });
    }
    steps
}

/// Build an odd-period chain whose first function is
/// `(log W(S_h)/W(S_{h−1}))' − μz` for the flag `∅ = S_0 ⊂ … ⊂ S_h`.
///
/// Candidates differ in the sign of the `μz` term of every step and in the
/// order indices are removed on the way down; the natural signs and the
/// ascending removal order are tried first. The first candidate passing
/// [`verify_chain`] is returned.
pub fn build_chain(flag: &[HermiteSequence], mu: &Rational) -> Result<DressingChain> {
    validate_flag(flag)?;
    if mu.cmp0().is_eq() {
        return Err(Error::Domain("mu must be nonzero".into()));
    }
    let top = flag.last().expect("validated");
    let muz = RatFunc::from_poly(Poly::monomial(mu.clone(), 1));
    let target = &log_ratio(top, &flag[flag.len() - 2])? - &muz;

    let orders: Vec<Vec<u32>> = top.indices().iter().copied().permutations(top.len()).collect();
    let n = 2 * (flag.len() - 1) + 1;
    let mut candidates = Vec::new();
    for order in &orders {
        let plan = step_plan(flag, order);
        let bases: Vec<(RatFunc, i8)> = plan
            .iter()
            .map(|s| match s {
                Step::Ladder { from, to, natural } => Ok((log_ratio(to, from)?, *natural)),
                Step::Trivial => Ok((RatFunc::zero(), -1)),
            })
            .collect::<Result<_>>()?;
        for mask in 0u32..(1 << n) {
            candidates.push((order.clone(), bases.clone(), mask));
        }
    }

    let found = candidates.par_iter().find_map_first(|(_, bases, mask)| {
        let fs: Vec<RatFunc> = bases
            .iter()
            .enumerate()
            .map(|(i, (base, natural))| {
                let flip = (mask >> i) & 1 == 1;
                let sign = if flip { -natural } else { *natural };
                if sign > 0 {
                    base + &muz
                } else {
                    base - &muz
                }
            })
            .collect();
        if fs[0] != target {
            return None;
        }
        let v = verify_chain(&fs).ok()?;
        v.pass.then(|| DressingChain {
            alphas: v.alphas.into_iter().map(|a| a.expect("pass")).collect(),
            fs,
        })
    });
    found.ok_or_else(|| {
        Error::Construction(format!(
            "no sign assignment or removal order closes the chain for flag {} with mu = {} ({} candidates tried)",
            flag.iter().map(|s| format!("{:?}", s.indices())).join("<"),
            rational_plain(mu),
            candidates.len()
        ))
    })
}

/// A rational PIV solution with its parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PIVSolution {
    pub w: RatFunc,
    pub a: Rational,
    pub b: Rational,
}

/// `2ww'' − w'² − 3w⁴ − 8zw³ − 4(z² − a)w² − 2b`.
pub fn piv_defect(w: &RatFunc, a: &Rational, b: &Rational) -> RatFunc {
    let e0 = piv_defect_base(w);
    let w2 = w * w;
    &(&e0 + &w2.scale(&Rational::from(a * 4))) - &RatFunc::constant(Rational::from(b * 2))
}

/// The parameter-free part `2ww'' − w'² − 3w⁴ − 8zw³ − 4z²w²`.
fn piv_defect_base(w: &RatFunc) -> RatFunc {
    let w1 = w.derivative();
    let w2 = w1.derivative();
    let ww = w * w;
    let z = RatFunc::z();
    let zz = &z * &z;
    let mut d = (w * &w2).scale(&Rational::from(2));
    d = &d - &(&w1 * &w1);
    d = &d - &(&ww * &ww).scale(&Rational::from(3));
    d = &d - &(&(&z * &ww) * w).scale(&Rational::from(8));
    &d - &(&zz * &ww).scale(&Rational::from(4))
}

pub fn verify_piv(sol: &PIVSolution) -> bool {
    piv_defect(&sol.w, &sol.a, &sol.b).is_zero()
}

/// Solution set of the PIV identity in `(a, b)`: a particular pair and, when
/// the system is underdetermined, a direction along which it is free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PivParams {
    pub a: Rational,
    pub b: Rational,
    pub free: Option<(Rational, Rational)>,
}

/// The defect is `E₀ + a·4w² − 2b`; collect it over a common denominator and
/// solve the coefficient equations exactly.
pub fn solve_piv_params(w: &RatFunc) -> Option<PivParams> {
    let e0 = piv_defect_base(w);
    let ea = (w * w).scale(&Rational::from(4));
    // common denominator
    let den = (e0.den() * ea.den()).exact_div(&e0.den().gcd(ea.den()));
    let n0 = e0.num() * &den.exact_div(e0.den());
    let na = ea.num() * &den.exact_div(ea.den());
    let nb = den.scale(&Rational::from(-2));
    let len = n0.coeffs().len().max(na.coeffs().len()).max(nb.coeffs().len());
    let rows: Vec<[Rational; 3]> = (0..len).map(|j| [na.coeff(j), nb.coeff(j), (-n0.coeff(j))]).collect();
    solve_two_unknowns(rows)
}

/// Exact solution of `x·r0 + y·r1 = r2` over all rows.
fn solve_two_unknowns(mut rows: Vec<[Rational; 3]>) -> Option<PivParams> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..2 {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c].cmp0().is_ne()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::from(rows[r][c].recip_ref());
        for k in 0..3 {
            rows[r][k] *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c].cmp0().is_ne() {
                let factor = rows[i][c].clone();
                for k in 0..3 {
                    let t = Rational::from(&factor * &rows[r][k]);
                    rows[i][k] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| row[2].cmp0().is_ne()) {
        return None;
    }
    let mut sol = [Rational::new(), Rational::new()];
    for (i, &c) in pivots.iter().enumerate() {
        sol[c] = rows[i][2].clone();
    }
    let free = match pivots.as_slice() {
        [0, 1] => None,
        [0] => Some((Rational::from(-&rows[0][1]), Rational::from(1))),
        [1] => Some((Rational::from(1), Rational::new())),
        _ => Some((Rational::from(1), Rational::new())),
    };
    let [a, b] = sol;
    Some(PivParams { a, b, free })
}

/// Comparison of the exact PIV parameters with the chain-derived ones.
#[derive(Clone, Debug)]
pub struct ChainPivNote {
    pub alpha_sum: Rational,
    pub normalized: bool,
    /// `(½(α₃ − α₁), −½α₂²)`.
    pub mapped: (Rational, Rational),
    pub mapped_matches: bool,
    pub a_free: bool,
    /// The same comparison after `f ↦ βf(βz)` with `β² = −2/Σα`, when `β`
    /// is rational.
    pub rescaled: Option<Box<(Rational, PIVSolution, ChainPivNote)>>,
}

impl ChainPivNote {
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "alpha_sum": rational_plain(&self.alpha_sum),
            "normalized": self.normalized,
            "mapped_a": rational_plain(&self.mapped.0),
            "mapped_b": rational_plain(&self.mapped.1),
            "mapped_matches": self.mapped_matches,
            "a_free": self.a_free,
        });
        if let Some(r) = &self.rescaled {
            let (beta, sol, note) = r.as_ref();
            v["rescaled"] = json!({
                "beta": rational_plain(beta),
                "w": sol.w,
                "a": rational_plain(&sol.a),
                "b": rational_plain(&sol.b),
                "note": note.to_json(),
            });
        }
        v
    }
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.cmp0().is_lt() {
        return None;
    }
    let (n, d) = (q.numer(), q.denom());
    if n.is_perfect_square() && d.is_perfect_square() {
        Some(Rational::from((n.clone().sqrt(), d.clone().sqrt())))
    } else {
        None
    }
}

fn chain_to_piv_inner(chain: &DressingChain, allow_rescale: bool) -> Result<(PIVSolution, ChainPivNote)> {
    if chain.period() != 3 {
        return Err(Error::Domain(format!(
            "chain_to_piv needs N = 3, got {}",
            chain.period()
        )));
    }
    let w = crate::solutions::piv_w_from_f(&chain.fs[0]);
    let params =
        solve_piv_params(&w).ok_or_else(|| Error::Construction("w = -(z + f_1) satisfies PIV for no (a, b)".into()))?;
    let al = &chain.alphas;
    let mapped = (
        Rational::from(&al[2] - &al[0]) / 2u32,
        -(Rational::from(&al[1] * &al[1]) / 2u32),
    );
    let alpha_sum = chain.alpha_sum();
    let normalized = alpha_sum == -2;
    let mapped_matches = verify_piv(&PIVSolution {
        w: w.clone(),
        a: mapped.0.clone(),
        b: mapped.1.clone(),
    });
    let rescaled = if allow_rescale && !normalized && alpha_sum.cmp0().is_ne() {
        rational_sqrt(&(Rational::from(-2) / &alpha_sum)).map(|beta| {
            let scaled = chain.rescale(&beta)?;
            let (sol, note) = chain_to_piv_inner(&scaled, false)?;
            Ok::<_, Error>(Box::new((beta, sol, note)))
        })
    } else {
        None
    }
    .transpose()?;
    let sol = PIVSolution {
        w,
        a: params.a,
        b: params.b,
    };
    let note = ChainPivNote {
        alpha_sum,
        normalized,
        mapped,
        mapped_matches,
        a_free: params.free.is_some(),
        rescaled,
    };
    Ok((sol, note))
}

/// `w = −(z + f_1)` with exactly solved `(a, b)`, and a note comparing them
/// with `(½(α₃ − α₁), −½α₂²)` and the normalization `Σα = −2`.
pub fn chain_to_piv(chain: &DressingChain) -> Result<(PIVSolution, ChainPivNote)> {
    chain_to_piv_inner(chain, true)
}

#[derive(Clone, Debug)]
pub struct PoleExpansionEntry {
    pub factor: Poly,
    pub order: usize,
    /// Numeric residues at the roots of `factor`.
    pub residues: Vec<Complex>,
    pub locations: Vec<Complex>,
    pub residue_ok: bool,
    pub constant_ok: bool,
}

#[derive(Clone, Debug)]
pub struct PoleExpansionReport {
    pub poles: Vec<PoleExpansionEntry>,
    pub pass: bool,
}

impl PoleExpansionReport {
    pub fn to_json(&self) -> Value {
        json!({
            "relation": "piv_pole_expansion",
            "verdict": if self.pass { "pass" } else { "fail" },
            "factors": self.poles.iter().map(|p| json!({
                "factor": p.factor,
                "order": p.order,
                "locations": p.locations.iter().map(mp::complex_json).collect::<Vec<_>>(),
                "residues": p.residues.iter().map(mp::complex_json).collect::<Vec<_>>(),
                "residue_is_pm1": p.residue_ok,
                "constant_term_is_minus_z0": p.constant_ok,
            })).collect::<Vec<_>>(),
        })
    }
}

/// At every pole `z₀` of `w`: simple, residue `±1`, constant term `−z₀`.
/// Decided exactly modulo each squarefree factor of the denominator.
pub fn piv_pole_expansion_check(w: &RatFunc, prec: u32) -> Result<PoleExpansionReport> {
    let mut poles = Vec::new();
    for (g, mult) in w.den().squarefree_decomposition() {
        if g.is_constant() {
            continue;
        }
        let ring = ResidueRing::new(g.clone())?;
        let c = laurent_coeffs(&ring, w.num(), w.den(), &ring.generator(), mult, -1, 0)?;
        let (res, c0) = (&c[0], &c[1]);
        let (residue_ok, constant_ok) = if mult == 1 {
            let r2 = ring.reduce(&(res * res));
            (r2 == Poly::one(), ring.reduce(&(c0 + &Poly::z())).is_zero())
        } else {
            (false, false)
        };
        let roots = complex_roots(&g, prec + GUARD_BITS)?;
        let residues = roots
            .iter()
            .map(|r| Complex::with_val(prec, eval_residue_class(res, &r.value)))
            .collect();
        let locations = roots.iter().map(|r| Complex::with_val(prec, &r.value)).collect();
        poles.push(PoleExpansionEntry {
            factor: g,
            order: mult,
            residues,
            locations,
            residue_ok,
            constant_ok,
        });
    }
    let pass = poles.iter().all(|p| p.residue_ok && p.constant_ok);
    Ok(PoleExpansionReport { poles, pass })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Branch {
    /// `y = −x`
    #[serde(rename = "NEG")]
    Neg,
    /// `y = x + 1`
    #[serde(rename = "INC")]
    Inc,
}

impl Branch {
    fn apply(self, x: &Rational) -> Rational {
        match self {
            Branch::Neg => Rational::from(-x),
            Branch::Inc => Rational::from(x + 1u32),
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Neg => "NEG",
            Branch::Inc => "INC",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ResidueCycle {
    pub values: Vec<i64>,
    pub branch_word: Vec<Branch>,
}

impl ResidueCycle {
    /// Equal as cyclic sequences.
    pub fn same_up_to_rotation(&self, values: &[i64]) -> bool {
        let n = self.values.len();
        n == values.len() && (0..n).any(|r| (0..n).all(|i| self.values[(i + r) % n] == values[i]))
    }
}

/// Every periodic trajectory of period `n` of the correspondence, one per
/// rotation class, with exact (possibly non-integer) values.
///
/// A branch word composes to `x ↦ sx + l`. For `s = −1` the unique fixed
/// point is `l/2`. For `s = +1` a periodic point needs `l = 0`; with `n` odd
/// that never happens, since `l` is then a sum of an odd number of `±1`.
pub fn periodic_trajectories(n: usize) -> Result<Vec<(Vec<Rational>, Vec<Branch>)>> {
    if n == 0 || n.is_multiple_of(2) {
        return Err(Error::Domain(format!("period must be odd, got {n}")));
    }
    let words: Vec<Vec<Branch>> = (0u64..(1 << n))
        .map(|bits| {
            (0..n)
                .map(|i| if (bits >> i) & 1 == 1 { Branch::Inc } else { Branch::Neg })
                .collect()
        })
        .collect();
    let mut found: Vec<(Vec<Rational>, Vec<Branch>)> = words
        .par_iter()
        .filter_map(|word| {
            // x -> s x + l
            let (mut s, mut l) = (1i64, Rational::new());
            for b in word {
                match b {
                    Branch::Neg => {
                        s = -s;
                        l = -l;
                    }
                    Branch::Inc => l += 1u32,
                }
            }
            let x0 = if s == -1 {
                l / 2u32
            } else if l.cmp0().is_eq() {
                unreachable!("odd period never composes to the identity")
            } else {
                return None;
            };
            let mut values = Vec::with_capacity(n);
            let mut x = x0;
            for b in word {
                values.push(x.clone());
                x = b.apply(&x);
            }
            Some(canonical_rotation(values, word.clone()))
        })
        .collect();
    found.sort();
    found.dedup();
    Ok(found)
}

fn canonical_rotation(values: Vec<Rational>, word: Vec<Branch>) -> (Vec<Rational>, Vec<Branch>) {
    let n = values.len();
    (0..n)
        .map(|r| {
            let v: Vec<Rational> = (0..n).map(|i| values[(i + r) % n].clone()).collect();
            let w: Vec<Branch> = (0..n).map(|i| word[(i + r) % n]).collect();
            (v, w)
        })
        .min_by(|a, b| {
            // rotations starting at 0 first, then lexicographic
            let za = a.0[0].cmp0().is_ne();
            let zb = b.0[0].cmp0().is_ne();
            za.cmp(&zb).then_with(|| a.0.cmp(&b.0))
        })
        .expect("nonempty")
}

/// Integer residue cycles of period `n` with all values in `[−bound, bound]`.
pub fn enumerate_residue_cycles(n: usize, bound: i64) -> Result<Vec<ResidueCycle>> {
    let p = (n as i64 - 1) / 2;
    if bound < p {
        return Err(Error::Domain(format!("bound must be at least (N-1)/2 = {p}")));
    }
    Ok(periodic_trajectories(n)?
        .into_iter()
        .filter_map(|(values, word)| {
            let ints: Option<Vec<i64>> = values
                .iter()
                .map(|v| if *v.denom() == 1 { v.numer().to_i64() } else { None })
                .collect();
            let ints = ints?;
            ints.iter().all(|x| x.abs() <= bound).then_some(ResidueCycle {
                values: ints,
                branch_word: word,
            })
        })
        .collect())
}
