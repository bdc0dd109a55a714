//! The linear lattice of a chain of 2-handles: tridiagonal intersection form,
//! characteristic covectors, residue classes, and the short-representative
//! sets used to organise d-invariants.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::cf::NegCf;
use crate::error::{Error, Result};
use crate::linalg::{self, RatMatrix};

/// Default cap on `p` for the exact class-minimum search.
pub const DEFAULT_BRUTE_BOUND: u64 = 200;

/// An integer tuple `(c_0, ..., c_l)` representing a characteristic covector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CharVec(pub Vec<i64>);

impl CharVec {
    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn neg(&self) -> CharVec {
        CharVec(self.0.iter().map(|&c| -c).collect())
    }
}

impl std::fmt::Display for CharVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A spin-c structure on the surgered manifold, identified by its unique
/// trough-free short representative.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SpincClass {
    pub rep: CharVec,
    pub index: u64,
}

/// The lattice of a linear plumbing with weights `a_0, ..., a_l`.
///
/// Immutable after construction; every accessor is re-entrant.
#[derive(Debug, Clone)]
pub struct LinearLattice {
    cf: NegCf,
    /// Tridiagonal pairing matrix: diagonal `a_i`, off-diagonal -1.
    m: Vec<Vec<i64>>,
    minv: RatMatrix,
    /// Integer adjugate `p * Minv`.
    adj: Vec<Vec<i64>>,
    p: i64,
    q: i64,
    /// Functional inducing the class isomorphism onto `Z/p`.
    cok: Vec<i64>,
    /// Parity base point: `pi_i = a_i mod 2`.
    parity: Vec<i64>,
    reps: Vec<CharVec>,
    class_lookup: BTreeMap<u64, usize>,
}

impl LinearLattice {
    pub fn new(cf: NegCf) -> Result<Self> {
        let a = cf.terms().to_vec();
        let n = a.len();

        // Positive definiteness via leading principal minors (continuants).
        let mut minors = Vec::with_capacity(n);
        let (mut prev2, mut prev1) = (1i64, 1i64);
        for (k, &ak) in a.iter().enumerate() {
            let d = if k == 0 { ak } else { ak * prev1 - prev2 };
            if d <= 0 {
                return Err(Error::InvalidSlope(format!(
                    "chain {cf} is not positive definite (minor {k} = {d})"
                )));
            }
            minors.push(d);
            prev2 = prev1;
            prev1 = d;
        }
        let p = *minors.last().unwrap();

        let slope = cf.evaluate()?;
        if slope.num_i64() != p {
            return Err(Error::InvalidSlope(format!(
                "determinant {p} does not match slope {slope}"
            )));
        }
        let q = slope.den_i64();

        let mut m = vec![vec![0i64; n]; n];
        for i in 0..n {
            m[i][i] = a[i];
            if i + 1 < n {
                m[i][i + 1] = -1;
                m[i + 1][i] = -1;
            }
        }
        let m_rat: RatMatrix = m
            .iter()
            .map(|row| row.iter().map(|&x| linalg::big_rat(x)).collect())
            .collect();
        let minv = linalg::invert(&m_rat);
        let adj: Vec<Vec<i64>> = minv
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| {
                        let scaled = x * linalg::big_rat(p);
                        assert!(scaled.is_integer(), "adjugate entry not integral");
                        scaled.to_integer().to_i64().expect("adjugate exceeds i64")
                    })
                    .collect()
            })
            .collect();
        // M * adj = p * I, i.e. Minv * M is exactly the identity.
        for (i, row) in m.iter().enumerate() {
            for j in 0..n {
                let entry: i128 = row
                    .iter()
                    .zip(adj.iter().map(|r| r[j]))
                    .map(|(&a, b)| a as i128 * b as i128)
                    .sum();
                let want = if i == j { p as i128 } else { 0 };
                assert_eq!(entry, want, "inverse verification failed at ({i},{j})");
            }
        }

        // A row of the adjugate whose entries generate Z/p classifies the
        // residue classes; the chain shape guarantees a cyclic quotient.
        let cok = adj
            .iter()
            .find(|row| {
                let mut g = p;
                for &x in row.iter() {
                    g = gcd(g, x);
                }
                g.abs() == 1
            })
            .cloned()
            .unwrap_or_else(|| panic!("no cyclic classifier for {cf}"));

        let parity: Vec<i64> = a.iter().map(|&ai| ai.rem_euclid(2)).collect();

        let mut lat = LinearLattice {
            cf,
            m,
            minv,
            adj,
            p,
            q,
            cok,
            parity,
            reps: Vec::new(),
            class_lookup: BTreeMap::new(),
        };
        let reps = lat.enumerate_trough_free();
        let mut class_lookup = BTreeMap::new();
        for (i, s) in reps.iter().enumerate() {
            let idx = lat.class_index(s).expect("reps are characteristic");
            let dup = class_lookup.insert(idx, i);
            assert!(dup.is_none(), "class index collision in representative set");
        }
        lat.reps = reps;
        lat.class_lookup = class_lookup;
        Ok(lat)
    }

    pub fn cf(&self) -> &NegCf {
        &self.cf
    }

    pub fn weights(&self) -> &[i64] {
        self.cf.terms()
    }

    pub fn rank(&self) -> usize {
        self.m.len()
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    /// `rem` in `p/q = a_0 - rem/q`.
    pub fn rem(&self) -> i64 {
        self.weights()[0] * self.q - self.p
    }

    pub fn pairing_matrix(&self) -> &[Vec<i64>] {
        &self.m
    }

    pub fn inverse_matrix(&self) -> &RatMatrix {
        &self.minv
    }

    fn check_dim(&self, s: &CharVec) -> Result<()> {
        if s.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                got: s.len(),
            });
        }
        Ok(())
    }

    pub fn is_characteristic(&self, s: &CharVec) -> bool {
        s.len() == self.rank()
            && s.coords()
                .iter()
                .zip(self.weights())
                .all(|(&c, &a)| (c - a).rem_euclid(2) == 0)
    }

    /// Exact norm `s M^{-1} s^T = (s adj(M) s^T) / p`; its denominator
    /// divides `p`. Computed through the verified integer adjugate.
    pub fn norm(&self, s: &CharVec) -> Result<BigRational> {
        self.check_dim(s)?;
        let mut acc: i128 = 0;
        for (&ci, row) in s.coords().iter().zip(&self.adj) {
            if ci == 0 {
                continue;
            }
            let inner: i128 = row
                .iter()
                .zip(s.coords())
                .map(|(&a, &cj)| a as i128 * cj as i128)
                .sum();
            acc += ci as i128 * inner;
        }
        Ok(BigRational::new(BigInt::from(acc), BigInt::from(self.p)))
    }

    /// `s + sign * 2 PD(h_i)`, i.e. shifting by twice the i-th pairing row.
    pub fn pd_shift(&self, s: &CharVec, i: usize, sign: i64) -> CharVec {
        let mut out = s.0.clone();
        for (j, x) in out.iter_mut().enumerate() {
            *x += 2 * sign * self.m[i][j];
        }
        CharVec(out)
    }

    /// Whether `(s1 - s2)/2` lies in the integer row span of the pairing
    /// matrix, i.e. the two covectors restrict to the same spin-c structure.
    /// The solve `x = M^{-1} h` is integral exactly when every coordinate of
    /// `adj(M) h` is divisible by `p`.
    pub fn same_class(&self, s1: &CharVec, s2: &CharVec) -> Result<bool> {
        self.check_dim(s1)?;
        self.check_dim(s2)?;
        let mut half = Vec::with_capacity(self.rank());
        for (a, b) in s1.coords().iter().zip(s2.coords()) {
            let d = a - b;
            if d.rem_euclid(2) != 0 {
                return Err(Error::NotCharacteristic);
            }
            half.push(d / 2);
        }
        let p = self.p as i128;
        Ok(self.adj.iter().all(|row| {
            let num: i128 = row
                .iter()
                .zip(&half)
                .map(|(&a, &h)| a as i128 * h as i128)
                .sum();
            num % p == 0
        }))
    }

    /// Class label in `0..p`, constant exactly on residue classes.
    pub fn class_index(&self, s: &CharVec) -> Result<u64> {
        self.check_dim(s)?;
        if !self.is_characteristic(s) {
            return Err(Error::NotCharacteristic);
        }
        let p = self.p as i128;
        let mut acc: i128 = 0;
        for ((&c, &pi), &u) in s.coords().iter().zip(&self.parity).zip(&self.cok) {
            acc += (u as i128) * (((c - pi) / 2) as i128);
            acc = acc.rem_euclid(p);
        }
        Ok(acc as u64)
    }

    /// The spin-c class of a characteristic covector, keyed by the unique
    /// trough-free representative.
    pub fn class_of(&self, s: &CharVec) -> Result<SpincClass> {
        let index = self.class_index(s)?;
        let i = self.class_lookup[&index];
        Ok(SpincClass {
            rep: self.reps[i].clone(),
            index,
        })
    }

    /// True if some `i < j` have `c_i = a_i`, `c_j = a_j` and `c_k = a_k - 2`
    /// strictly between.
    pub fn has_full_tank(&self, s: &CharVec) -> bool {
        let a = self.weights();
        let c = s.coords();
        let l = a.len();
        for i in 0..l {
            if c[i] == a[i] {
                let mut j = i + 1;
                while j < l && c[j] == a[j] - 2 {
                    j += 1;
                }
                if j < l && c[j] == a[j] {
                    return true;
                }
            }
        }
        false
    }

    /// True if some `k > 0` has `c_k = a_k` with `c_j = a_j - 2` for all
    /// `0 < j < k`. Always false on rank-one lattices.
    pub fn is_left_full(&self, s: &CharVec) -> bool {
        let a = self.weights();
        let c = s.coords();
        for k in 1..a.len() {
            if c[k] == a[k] {
                return true;
            }
            if c[k] != a[k] - 2 {
                return false;
            }
        }
        false
    }

    /// Witness index for a left-full covector.
    pub fn left_full_witness(&self, s: &CharVec) -> Option<usize> {
        let a = self.weights();
        let c = s.coords();
        for k in 1..a.len() {
            if c[k] == a[k] {
                return Some(k);
            }
            if c[k] != a[k] - 2 {
                return None;
            }
        }
        None
    }

    /// Membership in the short-vector region: `|c_i| <= a_i` with no full
    /// tank in either `s` or `-s`.
    pub fn is_short(&self, s: &CharVec) -> bool {
        if !self.is_characteristic(s) {
            return false;
        }
        let in_box = s
            .coords()
            .iter()
            .zip(self.weights())
            .all(|(&c, &a)| c.abs() <= a);
        in_box && !self.has_full_tank(s) && !self.has_full_tank(&s.neg())
    }

    fn enumerate_trough_free(&self) -> Vec<CharVec> {
        // DFS over the box 2 - a_i <= c_i <= a_i, pruning as soon as a full
        // tank closes. Inside this box -s can never contain a tank.
        let a = self.weights();
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(a.len());
        fn rec(a: &[i64], cur: &mut Vec<i64>, open: bool, out: &mut Vec<CharVec>) {
            let t = cur.len();
            if t == a.len() {
                out.push(CharVec(cur.clone()));
                return;
            }
            let mut v = 2 - a[t];
            while v <= a[t] {
                let next_open = if v == a[t] {
                    if open {
                        v += 2;
                        continue;
                    }
                    true
                } else {
                    open && v == a[t] - 2
                };
                cur.push(v);
                rec(a, cur, next_open, out);
                cur.pop();
                v += 2;
            }
        }
        rec(a, &mut cur, false, &mut out);
        out
    }

    /// The complete trough-free set of short representatives: one covector
    /// per spin-c structure, lexicographically ordered.
    pub fn canonical_reps(&self) -> &[CharVec] {
        &self.reps
    }

    /// The shifted representative set: left-full covectors with `c_0 >= 0`
    /// are pushed off the first handle so the d-invariant only sees `c_0`.
    pub fn shifted_reps(&self) -> Vec<CharVec> {
        let a = self.weights();
        let l = a.len() - 1;
        self.reps
            .iter()
            .map(|s| {
                let c = s.coords();
                if c[0] < 0 {
                    return s.clone();
                }
                let Some(k) = self.left_full_witness(s) else {
                    return s.clone();
                };
                let mut out = c.to_vec();
                out[0] = c[0] + 2;
                if k == 1 {
                    out[1] = -a[1];
                    if l >= 2 {
                        out[2] = c[2] + 2;
                    }
                } else {
                    out[1] = -a[1];
                    for j in 2..=k {
                        out[j] = 2 - a[j];
                    }
                    if k < l {
                        out[k + 1] = c[k + 1] + 2;
                    }
                }
                let shifted = CharVec(out);
                debug_assert_eq!(shifted, self.shift_off_left_full(s, k));
                shifted
            })
            .collect()
    }

    /// `s - 2 sum_{i=1}^{k} PD(h_i)`, the raw pairing-row form of the shift.
    fn shift_off_left_full(&self, s: &CharVec, k: usize) -> CharVec {
        let mut out = s.clone();
        for i in 1..=k {
            out = self.pd_shift(&out, i, -1);
        }
        out
    }

    /// Normalises a short covector to the trough-free set by repeatedly
    /// filling the leftmost trough; class and norm are preserved.
    pub fn remove_troughs(&self, s: &CharVec) -> Result<CharVec> {
        if !self.is_short(s) {
            return Err(Error::NotInShortRegion);
        }
        let a = self.weights();
        let mut cur = s.clone();
        for _ in 0..20_000 {
            let Some(k) = cur.coords().iter().zip(a).position(|(&c, &ai)| c == -ai) else {
                debug_assert!(self.is_short(&cur));
                return Ok(cur);
            };
            let mut j = k;
            while j > 0 && cur.coords()[j - 1] == 2 - a[j - 1] {
                j -= 1;
            }
            for i in j..=k {
                cur = self.pd_shift(&cur, i, 1);
            }
        }
        panic!("trough removal failed to terminate");
    }

    /// Exact minimum of the norm over the whole residue class of `s`.
    ///
    /// Parametrising the class as `s + 2yM`, the norm equals
    /// `4 (y + z0) M (y + z0)^T` with `z0 = s M^{-1} / 2`, so the minimum is a
    /// closest-vector computation for the chain form `M`. Because the form
    /// only couples neighbouring coordinates it decomposes along the chain,
    /// and a dynamic program over exactly bounded per-coordinate windows
    /// yields the minimum in scaled integer arithmetic. Every short covector
    /// lies in the box `|c_i| <= a_i`, so this also equals the box-restricted
    /// minimum.
    pub fn min_norm_in_class(&self, s: &CharVec) -> Result<BigRational> {
        self.min_norm_in_class_with_bound(s, DEFAULT_BRUTE_BOUND)
    }

    pub fn min_norm_in_class_with_bound(&self, s: &CharVec, bound: u64) -> Result<BigRational> {
        if self.p as u64 > bound {
            return Err(Error::BoundExceeded {
                p: self.p as u64,
                bound,
            });
        }
        self.check_dim(s)?;
        if !self.is_characteristic(s) {
            return Err(Error::NotCharacteristic);
        }
        let n = self.rank();
        let a: Vec<i128> = self.weights().iter().map(|&x| x as i128).collect();
        let p = self.p as i128;

        // R_i = adj(M) s = 2p z0; scaled coordinates X = 2p(y + z0) are
        // integers congruent to R_i mod 2p.
        let r: Vec<i128> = self
            .adj
            .iter()
            .map(|row| {
                row.iter()
                    .zip(s.coords())
                    .map(|(&m, &c)| (m as i128) * (c as i128))
                    .sum()
            })
            .collect();

        // Scaled budget: (2p)^2 Q(z0) = p * (s adj s^T).
        let budget: i128 = p * r
            .iter()
            .zip(s.coords())
            .map(|(&ri, &c)| ri * (c as i128))
            .sum::<i128>();
        debug_assert!(budget >= 0);

        // |X_i|^2 <= budget * adj_ii / p for any solution within budget.
        let windows: Vec<Vec<i128>> = (0..n)
            .map(|i| {
                let w2 = budget * (self.adj[i][i] as i128) / p + 1;
                let xb = isqrt(w2) + 1;
                let lo = div_ceil(-xb - r[i], 2 * p);
                let hi = div_floor(xb - r[i], 2 * p);
                (lo..=hi).map(|y| 2 * p * y + r[i]).collect()
            })
            .collect();

        const INF: i128 = i128::MAX / 4;
        let mut dp: Vec<i128> = windows[0].iter().map(|&x| a[0] * x * x).collect();
        for i in 1..n {
            let next: Vec<i128> = windows[i]
                .iter()
                .map(|&x| {
                    let mut best = INF;
                    for (vj, &xp) in dp.iter().zip(&windows[i - 1]) {
                        let cand = vj - 2 * xp * x;
                        if cand < best {
                            best = cand;
                        }
                    }
                    best + a[i] * x * x
                })
                .collect();
            dp = next;
        }
        let fmin = dp.into_iter().min().expect("nonempty window");
        assert!(fmin >= 0, "positive-definite form cannot go negative");
        assert!(
            fmin <= budget,
            "query vector must lie within its own budget"
        );
        Ok(BigRational::new(BigInt::from(fmin), BigInt::from(p * p)))
    }
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

fn isqrt(v: i128) -> i128 {
    assert!(v >= 0);
    if v < 2 {
        return v;
    }
    let mut x = (v as f64).sqrt() as i128 + 2;
    while x * x > v {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= v {
        x += 1;
    }
    x
}

fn div_floor(a: i128, b: i128) -> i128 {
    debug_assert!(b > 0);
    a.div_euclid(b)
}

fn div_ceil(a: i128, b: i128) -> i128 {
    debug_assert!(b > 0);
    -((-a).div_euclid(b))
}
