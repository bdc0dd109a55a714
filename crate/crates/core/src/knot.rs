//! Alexander polynomials, torsion coefficients, V/H sequences, and the
//! d-invariants of surgeries computed by two independent routes: the Ni-Wu
//! residue formula and evaluation on lattice representatives.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::Serialize;

use crate::cf::split_slope;
use crate::error::{Error, Result};
use crate::lattice::{CharVec, LinearLattice};
use crate::linalg::big_rat;
use crate::rational::{rational_string, PosRational};

/// Symmetric half of an Alexander polynomial in L-space form:
/// `Delta(t) = a_0 + sum_{i>=1} a_i (t^i + t^{-i})` with the nonzero `a_i`
/// alternating in sign, valued in `{-1, +1}`, and `a_g = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlexPoly {
    /// `coeffs[i] = a_i` for `0 <= i <= g`.
    coeffs: Vec<i64>,
}

impl AlexPoly {
    pub fn new(coeffs: Vec<i64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidPolynomial("empty coefficient list".into()));
        }
        let g = coeffs.len() - 1;
        if coeffs[g] != 1 {
            return Err(Error::InvalidPolynomial(format!(
                "top coefficient a_{g} = {} must be 1",
                coeffs[g]
            )));
        }
        let mut expect = 1i64;
        for i in (0..=g).rev() {
            let a = coeffs[i];
            if a == 0 {
                if i == 0 {
                    return Err(Error::InvalidPolynomial("a_0 must be nonzero".into()));
                }
                continue;
            }
            if a != expect {
                return Err(Error::InvalidPolynomial(format!(
                    "coefficients do not alternate in {{-1,1}} (a_{i} = {a})"
                )));
            }
            expect = -expect;
        }
        let at_one: i64 = coeffs[0] + 2 * coeffs[1..].iter().sum::<i64>();
        if at_one.abs() != 1 {
            return Err(Error::InvalidPolynomial(format!(
                "Delta(1) = {at_one}, expected +-1"
            )));
        }
        Ok(AlexPoly { coeffs })
    }

    pub fn unknot() -> Self {
        AlexPoly { coeffs: vec![1] }
    }

    pub fn genus(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// Torsion coefficients `t_i = sum_{j>=1} j a_{i+j}`.
    pub fn torsion(&self) -> TorsionSeq {
        let g = self.genus();
        let mut t = vec![0i64; g + 1];
        for (i, ti) in t.iter_mut().enumerate() {
            *ti = (1..)
                .take_while(|j| i + j <= g)
                .map(|j| j as i64 * self.coeffs[i + j])
                .sum();
        }
        TorsionSeq::new(t).expect("valid polynomial yields valid torsion")
    }

    /// Alexander polynomial of the positive torus knot `T_{r,s}`, obtained by
    /// exact division `(t^{rs} - 1)(t - 1) / ((t^r - 1)(t^s - 1))` and
    /// symmetrisation.
    pub fn torus(r: i64, s: i64) -> Result<Self> {
        if !(r > s && s > 1) || gcd(r, s) != 1 {
            return Err(Error::Precondition(format!(
                "torus knot requires r > s > 1 coprime, got ({r},{s})"
            )));
        }
        let num = poly_mul(&cyclo_like(r * s), &cyclo_like(1));
        let den = poly_mul(&cyclo_like(r), &cyclo_like(s));
        let quot = poly_div_exact(&num, &den)?;
        let g = ((r - 1) * (s - 1) / 2) as usize;
        assert_eq!(quot.len(), 2 * g + 1, "quotient degree must be 2g");
        for i in 0..=g {
            assert_eq!(quot[g + i], quot[g - i], "quotient must be symmetric");
        }
        AlexPoly::new(quot[g..].to_vec())
    }
}

/// `t^n - 1` as a coefficient vector.
fn cyclo_like(n: i64) -> Vec<i64> {
    let mut v = vec![0i64; n as usize + 1];
    v[0] = -1;
    v[n as usize] = 1;
    v
}

fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Result<Vec<i64>> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    assert_eq!(den[dd], 1);
    if rem.len() < den.len() {
        return Err(Error::InvalidPolynomial(
            "degree underflow in division".into(),
        ));
    }
    let mut quot = vec![0i64; rem.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dd];
        quot[k] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                rem[k + j] -= c * d;
            }
        }
    }
    if rem.iter().any(|&x| x != 0) {
        return Err(Error::InvalidPolynomial(
            "inexact polynomial division".into(),
        ));
    }
    Ok(quot)
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

/// Torsion coefficients `t_0, t_1, ...` (zero beyond the stored prefix).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TorsionSeq {
    t: Vec<i64>,
}

impl TorsionSeq {
    /// Validates non-negativity and monotonicity, trimming trailing zeros.
    pub fn new(mut t: Vec<i64>) -> Result<Self> {
        while t.last() == Some(&0) {
            t.pop();
        }
        for (i, &x) in t.iter().enumerate() {
            if x < 0 {
                return Err(Error::NotRealizable);
            }
            if i > 0 && x > t[i - 1] {
                return Err(Error::NotRealizable);
            }
        }
        if t.last().is_some_and(|&x| x < 1) {
            return Err(Error::NotRealizable);
        }
        Ok(TorsionSeq { t })
    }

    pub fn zero() -> Self {
        TorsionSeq { t: Vec::new() }
    }

    pub fn get(&self, i: usize) -> i64 {
        self.t.get(i).copied().unwrap_or(0)
    }

    pub fn values(&self) -> &[i64] {
        &self.t
    }

    /// Smallest `g` with `t_i = 0` for all `i >= g`.
    pub fn support_len(&self) -> usize {
        self.t.len()
    }

    /// Inverts the torsion map via the second-difference formula
    /// `a_{j+1} = t_j - 2 t_{j+1} + t_{j+2}`, fixing `a_0` by alternation.
    pub fn to_alex(&self) -> Result<AlexPoly> {
        let g = self.t.len();
        if g == 0 {
            return Ok(AlexPoly::unknot());
        }
        let mut coeffs = vec![0i64; g + 1];
        for j in 0..g {
            coeffs[j + 1] = self.get(j) - 2 * self.get(j + 1) + self.get(j + 2);
        }
        let first_sign = coeffs[1..]
            .iter()
            .find(|&&a| a != 0)
            .map(|&a| a.signum())
            .unwrap_or(-1);
        coeffs[0] = -first_sign;
        AlexPoly::new(coeffs).map_err(|_| Error::NotRealizable)
    }
}

/// The monotone sequence controlling surgery d-invariants; `H` is derived
/// from `V` by `H_{-i} = V_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VhSeq {
    v: Vec<i64>,
}

impl VhSeq {
    /// Wraps a raw non-increasing, non-negative, eventually-zero sequence.
    pub fn from_raw(v: Vec<i64>) -> Result<Self> {
        for (i, &x) in v.iter().enumerate() {
            if x < 0 || (i > 0 && x > v[i - 1]) {
                return Err(Error::Precondition(
                    "V must be non-negative and non-increasing".into(),
                ));
            }
        }
        let mut v = v;
        while v.last() == Some(&0) {
            v.pop();
        }
        Ok(VhSeq { v })
    }

    /// For L-space knots `V_i = t_i`.
    pub fn from_torsion(t: &TorsionSeq) -> Self {
        VhSeq { v: t.t.clone() }
    }

    pub fn zero() -> Self {
        VhSeq { v: Vec::new() }
    }

    pub fn v(&self, i: i64) -> i64 {
        if i < 0 {
            panic!("V index must be non-negative");
        }
        self.v.get(i as usize).copied().unwrap_or(0)
    }

    /// `H_j` for `j <= 0` via the reflection `H_{-i} = V_i`.
    pub fn h(&self, j: i64) -> i64 {
        assert!(j <= 0, "only non-positive H indices are used");
        self.v(-j)
    }

    /// Smallest index with `V = 0`.
    pub fn vanishing_index(&self) -> i64 {
        self.v.len() as i64
    }

    pub fn values(&self) -> &[i64] {
        &self.v
    }
}

/// Relative d-invariants `D(i) = d(S^3_{p/q}(K), i) - d(S^3_{p/q}(U), i)` per
/// residue `i` in `0..p`, computed by both displayed formulas and checked
/// equal:
///   `-2 max{ V_{floor(i/q)}, H_{floor((i-p)/q)} }`
///   `-2 V_{min{ floor(i/q), ceil((p-i)/q) }}`
pub fn d_by_residue(slope: &PosRational, v: &VhSeq) -> Vec<i64> {
    let p = slope.num_i64();
    let q = slope.den_i64();
    (0..p)
        .map(|i| {
            let lo = i.div_euclid(q);
            let hi = -(i - p).div_euclid(q); // ceil((p-i)/q)
            let via_max = -2 * v.v(lo).max(v.h((i - p).div_euclid(q)));
            let via_min = -2 * v.v(lo.min(hi));
            assert_eq!(via_max, via_min, "the two residue formulas must agree");
            via_min
        })
        .collect()
}

/// d-invariant of the lens space `S^3_{p/q}(U)` in the class of a short
/// covector: `(|s|^2 - b_2(W)) / 4`.
pub fn lens_d(lat: &LinearLattice, s: &CharVec) -> Result<BigRational> {
    if !lat.is_short(s) {
        return Err(Error::NotShort);
    }
    let b2 = big_rat(lat.rank() as i64);
    Ok((lat.norm(s)? - b2) / big_rat(4))
}

/// Relative d-invariant per spin-c class, evaluated over the trough-free
/// representatives with the left-full case split:
/// left-full with `0 <= c_0 < a_0` contributes `-2 V_{(a_0 - 2 - c_0)/2}`,
/// everything else `-2 V_{(a_0 - |c_0|)/2}`.
pub fn d_by_class(lat: &LinearLattice, v: &VhSeq) -> Vec<(CharVec, i64)> {
    let a0 = lat.weights()[0];
    lat.canonical_reps()
        .iter()
        .map(|s| {
            let c0 = s.coords()[0];
            let d = if c0 >= 0 && c0 < a0 && lat.is_left_full(s) {
                -2 * v.v((a0 - 2 - c0) / 2)
            } else {
                -2 * v.v((a0 - c0.abs()) / 2)
            };
            (s.clone(), d)
        })
        .collect()
}

/// Same values computed over the shifted representatives with the plain
/// integer-surgery formula; agrees with [`d_by_class`] classwise.
pub fn d_by_class_via_shifted(lat: &LinearLattice, v: &VhSeq) -> Vec<(CharVec, i64)> {
    let a0 = lat.weights()[0];
    lat.shifted_reps()
        .iter()
        .map(|s| {
            let c0 = s.coords()[0];
            (s.clone(), -2 * v.v((a0 - c0.abs()) / 2))
        })
        .collect()
}

/// The total-sum identity: writing `p/q = n - r/q`,
/// `sum_i D^{p/q}(i) = 2 r V_{floor(n/2)} + q * sum_j D^{n}(j)`.
pub fn sum_identity_holds(slope: &PosRational, v: &VhSeq) -> bool {
    let split = split_slope(slope);
    let lhs: i64 = d_by_residue(slope, v).iter().sum();
    let int_slope = PosRational::from_integer(split.n).expect("n >= 1");
    let rhs_sum: i64 = d_by_residue(&int_slope, v).iter().sum();
    let rhs = 2 * split.rem * v.v(split.n.div_euclid(2)) + split.q * rhs_sum;
    lhs == rhs
}

/// Both d-invariant routes for one slope and knot, with the multiset check.
#[derive(Debug, Clone, Serialize)]
pub struct DTable {
    pub slope: String,
    #[serde(rename = "byResidue")]
    pub by_residue: Vec<String>,
    #[serde(rename = "byClassMultiset")]
    pub by_class_multiset: Vec<String>,
    #[serde(skip)]
    pub by_class: Vec<(CharVec, i64)>,
    #[serde(skip)]
    pub multisets_equal: bool,
    #[serde(skip)]
    pub sum_identity: bool,
}

impl DTable {
    pub fn build(lat: &LinearLattice, slope: &PosRational, v: &VhSeq) -> Result<DTable> {
        if lat.p() != slope.num_i64() || lat.q() != slope.den_i64() {
            return Err(Error::Precondition("lattice does not match slope".into()));
        }
        let residues = d_by_residue(slope, v);
        let classes = d_by_class(lat, v);

        #[cfg(debug_assertions)]
        {
            // The shifted-representative route must agree classwise.
            let direct: BTreeMap<u64, i64> = classes
                .iter()
                .map(|(s, d)| (lat.class_index(s).expect("reps are characteristic"), *d))
                .collect();
            for (s, d) in d_by_class_via_shifted(lat, v) {
                let idx = lat
                    .class_index(&s)
                    .expect("shifted reps are characteristic");
                assert_eq!(direct[&idx], d, "route disagreement at {s}");
            }
        }

        let mut res_sorted: Vec<i64> = residues.clone();
        res_sorted.sort_unstable();
        let mut cls_sorted: Vec<i64> = classes.iter().map(|(_, d)| *d).collect();
        cls_sorted.sort_unstable();
        let multisets_equal = res_sorted == cls_sorted;
        let sum_identity = sum_identity_holds(slope, v);

        let as_rat = |d: i64| rational_string(&big_rat(d));
        Ok(DTable {
            slope: slope.to_string(),
            by_residue: residues.iter().map(|&d| as_rat(d)).collect(),
            by_class_multiset: cls_sorted.iter().map(|&d| as_rat(d)).collect(),
            by_class: classes,
            multisets_equal,
            sum_identity,
        })
    }

    /// Multiset of values keyed by multiplicity, for reporting.
    pub fn value_histogram(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for (_, d) in &self.by_class {
            *out.entry(*d).or_insert(0) += 1;
        }
        out
    }
}

/// Full d-invariant (not just relative): `d = lens_d + D` assembled per class.
pub fn absolute_d(lat: &LinearLattice, s: &CharVec, v: &VhSeq) -> Result<BigRational> {
    let rep = lat.remove_troughs(s)?;
    let lens = lens_d(lat, &rep)?;
    let a0 = lat.weights()[0];
    let c0 = rep.coords()[0];
    let d = if c0 >= 0 && c0 < a0 && lat.is_left_full(&rep) {
        -2 * v.v((a0 - 2 - c0) / 2)
    } else {
        -2 * v.v((a0 - c0.abs()) / 2)
    };
    Ok(lens + big_rat(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::NegCf;
    use num_bigint::BigInt;

    fn pr(n: i64, d: i64) -> PosRational {
        PosRational::new(n, d).unwrap()
    }

    fn lat(terms: &[i64]) -> LinearLattice {
        LinearLattice::new(NegCf::new(terms.to_vec()).unwrap()).unwrap()
    }

    fn trefoil() -> AlexPoly {
        AlexPoly::new(vec![-1, 1]).unwrap()
    }

    #[test]
    fn lspace_form_validation() {
        assert!(AlexPoly::new(vec![1]).is_ok());
        assert!(AlexPoly::new(vec![-1, 1]).is_ok());
        // T_{5,4} half coefficients
        assert!(AlexPoly::new(vec![-1, 0, 1, 0, 0, -1, 1]).is_ok());
        // non-alternating
        assert!(AlexPoly::new(vec![1, 1]).is_err());
        // top coefficient must be 1
        assert!(AlexPoly::new(vec![1, -1]).is_err());
        // a_0 must be nonzero
        assert!(AlexPoly::new(vec![0, 1]).is_err());
        // gaps between nonzero coefficients are fine
        assert!(AlexPoly::new(vec![-1, 0, 1]).is_ok());
    }

    #[test]
    fn torsion_of_unknot_and_trefoil() {
        assert_eq!(AlexPoly::unknot().torsion().values(), &[] as &[i64]);
        assert_eq!(trefoil().torsion().values(), &[1]);
    }

    #[test]
    fn torus_polynomials() {
        let t32 = AlexPoly::torus(3, 2).unwrap();
        assert_eq!(t32.coeffs(), &[-1, 1]);
        let t54 = AlexPoly::torus(5, 4).unwrap();
        assert_eq!(t54.genus(), 6);
        assert_eq!(t54.coeffs(), &[-1, 0, 1, 0, 0, -1, 1]);
        let t43 = AlexPoly::torus(4, 3).unwrap();
        assert_eq!(t43.genus(), 3);
        assert!(AlexPoly::torus(4, 6).is_err());
        assert!(AlexPoly::torus(2, 3).is_err());
    }

    #[test]
    fn torus_torsion_from_expansion() {
        // frozen from the polynomial-expansion oracle above
        assert_eq!(
            AlexPoly::torus(5, 4).unwrap().torsion().values(),
            &[3, 2, 1, 1, 1, 1]
        );
        assert_eq!(
            AlexPoly::torus(11, 2).unwrap().torsion().values(),
            &[3, 2, 2, 1, 1]
        );
        assert_eq!(
            AlexPoly::torus(4, 3).unwrap().torsion().values(),
            &[1, 1, 1]
        );
        assert_eq!(AlexPoly::torus(5, 2).unwrap().torsion().values(), &[1, 1]);
    }

    #[test]
    fn torsion_roundtrip() {
        for (r, s) in [(3i64, 2i64), (4, 3), (5, 4), (5, 2), (7, 2)] {
            let poly = AlexPoly::torus(r, s).unwrap();
            assert_eq!(poly.torsion().to_alex().unwrap(), poly, "T({r},{s})");
        }
        assert_eq!(TorsionSeq::zero().to_alex().unwrap(), AlexPoly::unknot());
        assert_eq!(
            TorsionSeq::new(vec![1]).unwrap().to_alex().unwrap(),
            trefoil()
        );
    }

    #[test]
    fn torsion_rejects_unrealizable() {
        assert!(TorsionSeq::new(vec![1, 2]).is_err());
        assert!(TorsionSeq::new(vec![-1]).is_err());
        // second differences give |a| = 2
        let t = TorsionSeq::new(vec![2]).unwrap();
        assert!(t.to_alex().is_err());
    }

    #[test]
    fn residue_table_trefoil() {
        let v = VhSeq::from_torsion(&trefoil().torsion());
        assert_eq!(d_by_residue(&pr(5, 2), &v), vec![-2, -2, 0, 0, 0]);
        assert_eq!(d_by_residue(&pr(7, 1), &v), vec![-2, 0, 0, 0, 0, 0, 0]);
        let unknot = VhSeq::zero();
        assert!(d_by_residue(&pr(9, 1), &unknot).iter().all(|&d| d == 0));
    }

    #[test]
    fn lens_d_examples() {
        let l2 = lat(&[2]);
        assert_eq!(
            lens_d(&l2, &CharVec(vec![0])).unwrap(),
            BigRational::new(BigInt::from(-1), BigInt::from(4))
        );
        assert_eq!(
            lens_d(&l2, &CharVec(vec![2])).unwrap(),
            BigRational::new(BigInt::from(1), BigInt::from(4))
        );
        let l7 = lat(&[7]);
        assert_eq!(
            lens_d(&l7, &CharVec(vec![7])).unwrap(),
            BigRational::new(BigInt::from(3), BigInt::from(2))
        );
        assert!(lens_d(&lat(&[3, 2]), &CharVec(vec![3, 2])).is_err());
    }

    #[test]
    fn class_route_trefoil_5_2() {
        let l = lat(&[3, 2]);
        let v = VhSeq::from_torsion(&trefoil().torsion());
        let by_class = d_by_class(&l, &v);
        let lookup: BTreeMap<Vec<i64>, i64> = by_class
            .iter()
            .map(|(s, d)| (s.coords().to_vec(), *d))
            .collect();
        assert_eq!(lookup[&vec![-1, 0]], 0);
        assert_eq!(lookup[&vec![-1, 2]], 0);
        assert_eq!(lookup[&vec![1, 0]], 0);
        assert_eq!(lookup[&vec![1, 2]], -2);
        assert_eq!(lookup[&vec![3, 0]], -2);
    }

    #[test]
    fn shifted_route_agrees_classwise() {
        let l = lat(&[6, 2, 2, 2]);
        let v = VhSeq::from_torsion(&AlexPoly::torus(5, 4).unwrap().torsion());
        let direct: BTreeMap<u64, i64> = d_by_class(&l, &v)
            .into_iter()
            .map(|(s, d)| (l.class_index(&s).unwrap(), d))
            .collect();
        for (s, d) in d_by_class_via_shifted(&l, &v) {
            assert_eq!(direct[&l.class_index(&s).unwrap()], d);
        }
    }

    #[test]
    fn dtable_multiset_and_sum() {
        let l = lat(&[6, 2, 2, 2]);
        let slope = pr(21, 4);
        let v = VhSeq::from_torsion(&AlexPoly::torus(5, 4).unwrap().torsion());
        let table = DTable::build(&l, &slope, &v).unwrap();
        assert!(table.multisets_equal);
        assert!(table.sum_identity);
        assert!(table.by_class.iter().all(|(_, d)| *d <= 0 && d % 2 == 0));
    }

    #[test]
    fn sum_identity_examples() {
        let v = VhSeq::from_torsion(&trefoil().torsion());
        assert!(sum_identity_holds(&pr(5, 2), &v));
        assert!(sum_identity_holds(&pr(7, 3), &v));
        assert!(sum_identity_holds(&pr(9, 1), &VhSeq::zero()));
    }

    #[test]
    fn json_schema_is_stable() {
        let l = lat(&[3, 2]);
        let v = VhSeq::from_torsion(&trefoil().torsion());
        let table = DTable::build(&l, &pr(5, 2), &v).unwrap();
        let json = serde_json::to_value(&table).unwrap();
        assert_eq!(json["slope"], "5/2");
        assert_eq!(json["byResidue"][0], "-2/1");
        assert_eq!(json["byClassMultiset"][4], "0/1");
    }

    #[test]
    fn validates_arbitrary_v_sequences() {
        assert!(VhSeq::from_raw(vec![3, 1, 1]).is_ok());
        assert!(VhSeq::from_raw(vec![1, 2]).is_err());
        assert!(VhSeq::from_raw(vec![-1]).is_err());
    }
}
