//! Negative continued fractions `[a0, ..., al]^- = a0 - 1/(a1 - 1/(...))`.
//!
//! Two validity modes exist. The canonical form produced by [`expand`] has
//! `a0 = ceil(p/q)` and every later term `>= 2`; it is the unique such
//! expansion of a positive rational. The relaxed form additionally allows the
//! final term to equal 1, which is what the slope-interpolation machinery
//! produces via the identity `[a0,...,al]^- = [a0,...,al+1,1]^-`. Expansion
//! never emits the relaxed form; only interpolation and extension code
//! consumes it.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::PosRational;

/// A negative continued fraction expansion.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NegCf {
    terms: Vec<i64>,
    canonical: bool,
}

impl NegCf {
    /// Wraps raw terms, classifying them as canonical or relaxed.
    ///
    /// Canonical: `a0 >= 1`, all later terms `>= 2`.
    /// Relaxed: `a0 >= 1`, interior terms `>= 2`, last term `>= 1`.
    pub fn new(terms: Vec<i64>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidSlope("empty continued fraction".into()));
        }
        if terms[0] < 1 {
            return Err(Error::InvalidSlope(format!(
                "leading term {} must be >= 1",
                terms[0]
            )));
        }
        let l = terms.len() - 1;
        for (i, &a) in terms.iter().enumerate().skip(1) {
            let min = if i == l { 1 } else { 2 };
            if a < min {
                return Err(Error::InvalidSlope(format!(
                    "term a{i} = {a} below minimum {min}"
                )));
            }
        }
        let canonical = l == 0 || terms[l] >= 2;
        Ok(NegCf { terms, canonical })
    }

    pub fn terms(&self) -> &[i64] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every term after the first is `>= 2`.
    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    /// Evaluates the expansion exactly, rejecting tails that hit zero.
    pub fn evaluate(&self) -> Result<PosRational> {
        // Fold from the innermost term: value = a_i - 1/value_prev.
        let mut value: Option<BigRational> = None;
        for &a in self.terms.iter().rev() {
            let a = BigRational::from_integer(BigInt::from(a));
            let next = match value {
                None => a,
                Some(v) => {
                    if v.is_zero() {
                        return Err(Error::ZeroTail);
                    }
                    a - v.recip()
                }
            };
            value = Some(next);
        }
        let v = value.expect("nonempty");
        if !v.is_positive() {
            return Err(Error::InvalidSlope(format!(
                "expansion {:?} evaluates to non-positive {v}",
                self.terms
            )));
        }
        PosRational::from_bigint(v.numer().clone(), v.denom().clone())
    }

    /// Same cf with the trailing-1 identity applied: `[.., al] -> [.., al+1, 1]`.
    pub fn with_trailing_one(&self) -> NegCf {
        let mut terms = self.terms.clone();
        let last = terms.len() - 1;
        terms[last] += 1;
        terms.push(1);
        NegCf {
            terms,
            canonical: false,
        }
    }
}

impl std::fmt::Display for NegCf {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for (i, a) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "]")
    }
}

/// Canonical expansion by the ceiling-division recurrence:
/// `a0 = ceil(p/q)`, then recurse on `q / (a0*q - p)`.
pub fn expand(r: &PosRational) -> NegCf {
    let mut terms = Vec::new();
    let mut p = r.num().clone();
    let mut q = r.den().clone();
    loop {
        // a = ceil(p/q)
        let a = (&p + &q - BigInt::one()) / &q;
        terms.push(i64::try_from(&a).expect("cf term exceeds i64"));
        let rem = &a * &q - &p;
        if rem.is_zero() {
            break;
        }
        p = std::mem::replace(&mut q, rem);
    }
    NegCf {
        terms,
        canonical: true,
    }
}

/// The decomposition `p/q = n - rem/q` with `n = ceil(p/q)` and `0 <= rem < q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlopeSplit {
    pub n: i64,
    pub rem: i64,
    pub q: i64,
}

pub fn split_slope(r: &PosRational) -> SlopeSplit {
    let n = r.ceil();
    let rem = &n * r.den() - r.num();
    SlopeSplit {
        n: i64::try_from(&n).expect("split n exceeds i64"),
        rem: i64::try_from(&rem).expect("split rem exceeds i64"),
        q: r.den_i64(),
    }
}

/// The increasing slope sequence `r = r0 < r1 < ... < rM = r2` in which each
/// consecutive pair is related by one legal move: truncating a canonical
/// tail, or bumping the last term by one (equivalently appending `[1]` to the
/// larger slope's expansion).
pub fn interpolation_sequence(r: &PosRational, r2: &PosRational) -> Result<Vec<NegCf>> {
    if r >= r2 {
        return Err(Error::Precondition(format!("need {r} < {r2}")));
    }
    let a = expand(r);
    let mut target = expand(r2).terms().to_vec();

    let mut m = 0;
    while m < a.len() && m < target.len() && a.terms()[m] == target[m] {
        m += 1;
    }
    // A strict prefix of the target would evaluate above the target,
    // contradicting r < r2; so the first differing index exists in `a`.
    assert!(m < a.len(), "source cf cannot be a prefix of the target");
    if m == target.len() {
        // Target is a strict prefix of the source: rewrite it in relaxed
        // trailing-1 form so a first differing term exists.
        target[m - 1] += 1;
        target.push(1);
        m -= 1;
    }
    debug_assert!(target[m] > a.terms()[m]);

    let mut seq = vec![a.clone()];
    if a.len() > m + 1 {
        seq.push(NegCf::new(a.terms()[..=m].to_vec())?);
    }

    // Climb the differing term one unit at a time, descending into the
    // target's tail via the trailing-1 identity at each boundary.
    let mut stem: Vec<i64> = target[..m].to_vec();
    let mut pos = m;
    let mut x = a.terms()[m] + 1;
    let goal = r2.to_big_rational();
    loop {
        let last_val = seq.last().unwrap().evaluate()?.to_big_rational();
        if last_val == goal {
            break;
        }
        if pos + 1 == target.len() {
            if x > target[pos] {
                break;
            }
            let mut t = stem.clone();
            t.push(x);
            seq.push(NegCf::new(t)?);
            x += 1;
        } else if x < target[pos] {
            let mut t = stem.clone();
            t.push(x);
            seq.push(NegCf::new(t)?);
            x += 1;
        } else {
            // [stem, target[pos] - 1] = [stem, target[pos], 1]: descend.
            stem.push(target[pos]);
            pos += 1;
            x = 2;
        }
    }

    // Defensive validation of the construction.
    let mut prev: Option<BigRational> = None;
    for cf in &seq {
        let v = cf.evaluate()?.to_big_rational();
        if let Some(p) = prev {
            assert!(p < v, "interpolation sequence must strictly increase");
        }
        prev = Some(v);
    }
    assert_eq!(seq.first().unwrap().evaluate()?, *r);
    assert_eq!(seq.last().unwrap().evaluate()?, *r2);
    Ok(seq)
}
