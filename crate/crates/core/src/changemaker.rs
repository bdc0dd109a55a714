//! Changemaker lattices: construction of the defining vectors, orthogonal
//! complements, Alexander-polynomial recovery by quadratic-form minimisation
//! over residue classes, and the search for all changemaker structures
//! isometric to a given complement.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::cf::{expand, NegCf};
use crate::error::{Error, Result};
use crate::knot::TorsionSeq;
use crate::linalg::{self, big_rat};
use crate::rational::PosRational;

/// Default cap on the ambient rank for the isometry search.
pub const DEFAULT_RANK_BOUND: usize = 8;

/// The changemaker condition: `0 <= s_1 <= 1` and
/// `s_{i-1} <= s_i <= s_1 + ... + s_{i-1} + 1`.
pub fn is_changemaker(sigma: &[i64]) -> bool {
    let mut sum = 0i64;
    for (i, &s) in sigma.iter().enumerate() {
        if s < 0 {
            return false;
        }
        if i == 0 {
            if s > 1 {
                return false;
            }
        } else if s < sigma[i - 1] || s > sum + 1 {
            return false;
        }
        sum += s;
    }
    true
}

/// A coefficient tuple together with its ambient form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChangemakerVec {
    pub sigma: Vec<i64>,
    pub non_integral: bool,
    /// `|w0|^2`.
    pub n: i64,
}

/// Summary of the stable-coefficient genus bound chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StableBound {
    /// `B = sum rho_i^2 + 2 rho_t`, or 0 by convention when stable is empty.
    pub b: i64,
    pub empty_stable: bool,
    /// `4g - (rho_t - 2)^2 + 4` (equals `4g + 4` when stable is empty).
    pub middle: i64,
    pub four_g_plus_4: i64,
}

/// The lattice `< w_0, ..., w_l >^perp` in `Z^N` defined by a slope and a
/// changemaker tuple.
#[derive(Debug, Clone)]
pub struct ChangemakerLattice {
    sigma: Vec<i64>,
    slope: PosRational,
    cf: NegCf,
    non_integral: bool,
    n: i64,
    ambient: usize,
    w: Vec<Vec<i64>>,
    basis: Vec<Vec<i64>>,
    gram: Vec<Vec<i64>>,
    stable: Vec<i64>,
}

impl ChangemakerLattice {
    pub fn build(slope: &PosRational, sigma: &[i64]) -> Result<Self> {
        if !is_changemaker(sigma) {
            return Err(Error::ChangemakerViolation);
        }
        let cf = expand(slope);
        let sigma_norm: i64 = sigma.iter().map(|&s| s * s).sum();
        let non_integral = !slope.is_integer();

        let (n, ambient, w) = if non_integral {
            // All interior and final terms of a canonical expansion are >= 2,
            // so the defining chain vectors below pair tridiagonally.
            let a = cf.terms();
            let n = a[0];
            if sigma_norm + 1 != n {
                return Err(Error::NormMismatch {
                    norm: sigma_norm + 1,
                    required: n,
                });
            }
            let l = a.len() - 1;
            // m_k = sum_{i=1..k} (a_i - 1)
            let mut m_idx = vec![0usize; l + 1];
            for k in 1..=l {
                m_idx[k] = m_idx[k - 1] + (a[k] - 1) as usize;
            }
            let s_pad = m_idx[l];
            let t = sigma.len();
            let ambient = t + s_pad + 1;
            // Coordinates: e_0, ..., e_s, then f_1, ..., f_t.
            let mut w = Vec::with_capacity(l + 1);
            let mut w0 = vec![0i64; ambient];
            w0[0] = 1;
            for (i, &s) in sigma.iter().enumerate() {
                w0[s_pad + 1 + i] = s;
            }
            w.push(w0);
            for k in 1..=l {
                let mut wk = vec![0i64; ambient];
                wk[m_idx[k - 1]] = -1;
                wk[m_idx[k - 1] + 1..=m_idx[k]].fill(1);
                w.push(wk);
            }
            (n, ambient, w)
        } else {
            let n = slope.num_i64();
            if sigma_norm != n {
                return Err(Error::NormMismatch {
                    norm: sigma_norm,
                    required: n,
                });
            }
            (n, sigma.len(), vec![sigma.to_vec()])
        };

        // The defining vectors must pair as the weighted chain.
        let a = cf.terms();
        for (i, wi) in w.iter().enumerate() {
            for (j, wj) in w.iter().enumerate() {
                let expect = if i == j {
                    a[i]
                } else if i.abs_diff(j) == 1 {
                    -1
                } else {
                    0
                };
                if linalg::dot(wi, wj) != expect {
                    return Err(Error::Precondition(format!(
                        "chain pairing violated at ({i},{j})"
                    )));
                }
            }
        }

        let mut basis = linalg::integer_kernel(&w);
        linalg::reduce_basis(&mut basis);
        let gram = linalg::gram_of(&basis);
        let stable: Vec<i64> = sigma.iter().copied().filter(|&s| s > 1).collect();

        Ok(ChangemakerLattice {
            sigma: sigma.to_vec(),
            slope: slope.clone(),
            cf,
            non_integral,
            n,
            ambient,
            w,
            basis,
            gram,
            stable,
        })
    }

    pub fn sigma(&self) -> &[i64] {
        &self.sigma
    }

    pub fn slope(&self) -> &PosRational {
        &self.slope
    }

    pub fn cf(&self) -> &NegCf {
        &self.cf
    }

    pub fn is_non_integral(&self) -> bool {
        self.non_integral
    }

    /// `|w0|^2`.
    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient
    }

    pub fn defining_vectors(&self) -> &[Vec<i64>] {
        &self.w
    }

    pub fn complement_basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn stable_coefficients(&self) -> &[i64] {
        &self.stable
    }

    pub fn as_vec(&self) -> ChangemakerVec {
        ChangemakerVec {
            sigma: self.sigma.clone(),
            non_integral: self.non_integral,
            n: self.n,
        }
    }

    /// Ambient coordinates of `w0`.
    pub fn w0(&self) -> &[i64] {
        &self.w[0]
    }

    /// Torsion coefficients via the residue minimisation
    /// `8 t_i = min { |c|^2 : c odd, c . w0 = n + 2i mod 2n } - N`.
    pub fn recover_torsion(&self) -> Result<TorsionSeq> {
        if self.n < 2 {
            return Err(Error::Precondition(format!(
                "torsion recovery needs n >= 2, got {}",
                self.n
            )));
        }
        let mins = residue_minima(self.w0(), self.n);
        let big_n = self.ambient as i64;
        let mut t = Vec::new();
        for i in 0..=self.n / 2 {
            let m = mins[((self.n + 2 * i) % (2 * self.n)) as usize];
            let val = m - big_n;
            if val < 0 || val % 8 != 0 {
                return Err(Error::NotDivisibleBy8 { value: val });
            }
            t.push(val / 8);
        }
        TorsionSeq::new(t)
    }

    /// `g = (1/2) sum sigma_i (sigma_i - 1)`.
    pub fn genus(&self) -> i64 {
        self.sigma.iter().map(|&s| s * (s - 1)).sum::<i64>() / 2
    }

    /// The stable-coefficient bound `B` and its comparison chain
    /// `B <= 4g - (rho_t - 2)^2 + 4 <= 4g + 4`.
    pub fn stable_bound(&self) -> StableBound {
        let g = self.genus();
        let four_g_plus_4 = 4 * g + 4;
        if self.stable.is_empty() {
            return StableBound {
                b: 0,
                empty_stable: true,
                middle: four_g_plus_4,
                four_g_plus_4,
            };
        }
        let rho_t = *self.stable.last().unwrap();
        let b: i64 = self.stable.iter().map(|&r| r * r).sum::<i64>() + 2 * rho_t;
        let middle = four_g_plus_4 - (rho_t - 2) * (rho_t - 2);
        debug_assert!(b <= middle && middle <= four_g_plus_4);
        StableBound {
            b,
            empty_stable: false,
            middle,
            four_g_plus_4,
        }
    }
}

/// For every residue `rho mod 2n`, the minimum of `|c|^2` over odd vectors
/// `c` with `c . w = rho`. Separable per coordinate, so a min-plus
/// convolution over per-coordinate tables is exact; each table scans one
/// full period of odd values.
pub fn residue_minima(weights: &[i64], n: i64) -> Vec<i64> {
    let modulus = 2 * n;
    const INF: i64 = i64::MAX / 4;
    let mut dp = vec![INF; modulus as usize];
    dp[0] = 0;
    for &u in weights {
        let mut table = vec![INF; modulus as usize];
        let mut c = -(modulus + 1);
        while c <= modulus + 1 {
            let rho = (u * c).rem_euclid(modulus) as usize;
            if c * c < table[rho] {
                table[rho] = c * c;
            }
            c += 2;
        }
        let mut next = vec![INF; modulus as usize];
        for (r1, &v1) in dp.iter().enumerate() {
            if v1 == INF {
                continue;
            }
            for (r2, &v2) in table.iter().enumerate() {
                if v2 == INF {
                    continue;
                }
                let r = (r1 + r2) % modulus as usize;
                if v1 + v2 < next[r] {
                    next[r] = v1 + v2;
                }
            }
        }
        dp = next;
    }
    dp
}

/// All changemaker tuples of exactly `len` coefficients with
/// `sum sigma_i^2 = norm_target`, in lexicographic order.
pub fn enumerate_changemakers(len: usize, norm_target: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur: Vec<i64> = Vec::with_capacity(len);
    fn rec(len: usize, remaining: i64, sum: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == len {
            if remaining == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let lo = if cur.is_empty() {
            0
        } else {
            *cur.last().unwrap()
        };
        let hi = if cur.is_empty() { 1 } else { sum + 1 };
        let slots = (len - cur.len()) as i64;
        for s in lo..=hi {
            let sq = s * s;
            // all later coefficients are >= s, so at least slots * s^2 needed
            if sq * slots > remaining {
                break;
            }
            cur.push(s);
            rec(len, remaining - sq, sum + s, cur, out);
            cur.pop();
        }
    }
    rec(len, norm_target, 0, &mut cur, &mut out);
    out
}

/// Enumerates every vector `x` with `0 < x^T G x <= max_norm` for a positive
/// definite integer Gram matrix, one representative per `{x, -x}` pair times
/// both signs (both signs are returned).
pub fn short_vectors(gram: &[Vec<i64>], max_norm: i64) -> Vec<Vec<i64>> {
    let r = gram.len();
    if r == 0 || max_norm <= 0 {
        return Vec::new();
    }
    // LDL^T: Q(x) = sum_i d_i (x_i + sum_{j>i} l[j][i] x_j)^2
    let g: Vec<Vec<BigRational>> = gram
        .iter()
        .map(|row| row.iter().map(|&x| big_rat(x)).collect())
        .collect();
    let mut d = vec![BigRational::one(); r];
    let mut l = vec![vec![BigRational::one(); r]; r];
    {
        let mut a = g;
        for i in 0..r {
            d[i] = a[i][i].clone();
            assert!(d[i].is_positive(), "gram matrix must be positive definite");
            for j in i + 1..r {
                l[j][i] = &a[j][i] / &d[i];
            }
            for j in i + 1..r {
                for k in i + 1..r {
                    let t = &l[j][i] * &a[i][k];
                    a[j][k] -= t;
                }
            }
        }
    }

    let mut out = Vec::new();
    let mut x = vec![0i64; r];
    // Levels from r-1 down to 0; at each level the center is determined by
    // the already-chosen higher coordinates.
    fn rec(
        level: isize,
        x: &mut Vec<i64>,
        used: &BigRational,
        bound: &BigRational,
        d: &[BigRational],
        l: &[Vec<BigRational>],
        out: &mut Vec<Vec<i64>>,
    ) {
        if level < 0 {
            if x.iter().any(|&c| c != 0) {
                out.push(x.clone());
            }
            return;
        }
        let i = level as usize;
        let center: BigRational = (i + 1..x.len()).map(|j| &l[j][i] * big_rat(x[j])).sum();
        let budget = bound - used;
        // d_i (x_i + center)^2 <= budget
        let t = &budget / &d[i];
        let lo = ceil_center_minus_sqrt(&-&center, &t);
        let hi = floor_center_plus_sqrt(&-&center, &t);
        let mut xi = lo.clone();
        while xi <= hi {
            let xiv = i64::try_from(&xi).expect("coordinate exceeds i64");
            x[i] = xiv;
            let off = big_rat(xiv) + center.clone();
            let new_used = used + &d[i] * &off * &off;
            rec(level - 1, x, &new_used, bound, d, l, out);
            x[i] = 0;
            xi += BigInt::one();
        }
    }
    rec(
        r as isize - 1,
        &mut x,
        &BigRational::from_integer(BigInt::from(0)),
        &big_rat(max_norm),
        &d,
        &l,
        &mut out,
    );
    out
}

/// Largest integer `k <= c + sqrt(t)` (requires `t >= 0`).
fn floor_center_plus_sqrt(c: &BigRational, t: &BigRational) -> BigInt {
    let approx = c.to_f64().unwrap_or(0.0) + t.to_f64().unwrap_or(0.0).max(0.0).sqrt();
    let mut k = BigInt::from(approx.floor() as i64);
    let le = |k: &BigInt| {
        // k <= c + sqrt(t) <=> k - c <= sqrt(t)
        let diff = BigRational::from_integer(k.clone()) - c;
        !diff.is_positive() || &diff * &diff <= *t
    };
    while le(&(&k + BigInt::one())) {
        k += BigInt::one();
    }
    while !le(&k) {
        k -= BigInt::one();
    }
    k
}

/// Smallest integer `k >= c - sqrt(t)`.
fn ceil_center_minus_sqrt(c: &BigRational, t: &BigRational) -> BigInt {
    let approx = c.to_f64().unwrap_or(0.0) - t.to_f64().unwrap_or(0.0).max(0.0).sqrt();
    let mut k = BigInt::from(approx.ceil() as i64);
    let ge = |k: &BigInt| {
        // k >= c - sqrt(t) <=> c - k <= sqrt(t)
        let diff = c - BigRational::from_integer(k.clone());
        !diff.is_positive() || &diff * &diff <= *t
    };
    while ge(&(&k - BigInt::one())) {
        k -= BigInt::one();
    }
    while !ge(&k) {
        k += BigInt::one();
    }
    k
}

fn qf_value(gram: &[Vec<i64>], x: &[i64], y: &[i64]) -> i64 {
    let mut acc = 0i64;
    for (i, &xi) in x.iter().enumerate() {
        if xi == 0 {
            continue;
        }
        for (j, &yj) in y.iter().enumerate() {
            acc += xi * gram[i][j] * yj;
        }
    }
    acc
}

fn gram_determinant(gram: &[Vec<i64>]) -> BigRational {
    let m: linalg::RatMatrix = gram
        .iter()
        .map(|row| row.iter().map(|&x| big_rat(x)).collect())
        .collect();
    linalg::determinant(&m)
}

/// Vectors of the sublattice `{x in Z^ambient : x . w_i = 0}` with
/// `0 < |x|^2 <= max_norm`, in ambient coordinates (standard pairing).
fn ambient_short_vectors(w: &[Vec<i64>], ambient: usize, max_norm: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut x = vec![0i64; ambient];
    fn rec(depth: usize, rem: i64, x: &mut Vec<i64>, w: &[Vec<i64>], out: &mut Vec<Vec<i64>>) {
        if depth == x.len() {
            if x.iter().any(|&c| c != 0) && w.iter().all(|wi| linalg::dot(x, wi) == 0) {
                out.push(x.clone());
            }
            return;
        }
        let mut v = 0i64;
        while v * v <= rem {
            x[depth] = v;
            rec(depth + 1, rem - v * v, x, w, out);
            if v > 0 {
                x[depth] = -v;
                rec(depth + 1, rem - v * v, x, w, out);
            }
            v += 1;
        }
        x[depth] = 0;
    }
    rec(0, max_norm, &mut x, w, &mut out);
    out
}

fn theta_prefix(norms: impl Iterator<Item = i64>, max_norm: i64) -> Vec<usize> {
    let mut h = vec![0usize; max_norm as usize + 1];
    for n in norms {
        h[n as usize] += 1;
    }
    h
}

/// Backtracking order: first the largest diagonal norm, then greedily the
/// slot most pairing-connected to the slots already placed, so mismatches
/// surface early.
fn constrained_order(g1: &[Vec<i64>]) -> Vec<usize> {
    let r = g1.len();
    let mut order: Vec<usize> = Vec::with_capacity(r);
    let mut used = vec![false; r];
    for step in 0..r {
        let pick = (0..r)
            .filter(|&i| !used[i])
            .max_by_key(|&i| {
                let connectivity = if step == 0 {
                    0
                } else {
                    order.iter().filter(|&&j| g1[i][j] != 0).count() as i64
                };
                (connectivity, g1[i][i], std::cmp::Reverse(i))
            })
            .unwrap();
        used[pick] = true;
        order.push(pick);
    }
    order
}

/// DFS for images of the `g1` basis among candidate vectors whose pairwise
/// inner products are plain dots of `cands[..]` against `paired[..]`.
/// Candidates are pre-bucketed by norm so each slot only scans its own norm.
fn gram_backtrack(
    slot: usize,
    order: &[usize],
    g1: &[Vec<i64>],
    cands: &[Vec<i64>],
    paired: &[Vec<i64>],
    by_norm: &std::collections::HashMap<i64, Vec<usize>>,
    images: &mut Vec<Option<usize>>,
) -> bool {
    if slot == order.len() {
        return true;
    }
    let i = order[slot];
    let Some(bucket) = by_norm.get(&g1[i][i]) else {
        return false;
    };
    'outer: for &ci in bucket {
        for &j in &order[..slot] {
            let cj = images[j].unwrap();
            if linalg::dot(&cands[ci], &paired[cj]) != g1[i][j] {
                continue 'outer;
            }
        }
        images[i] = Some(ci);
        if gram_backtrack(slot + 1, order, g1, cands, paired, by_norm, images) {
            return true;
        }
        images[i] = None;
    }
    false
}

fn run_isometry_search(
    g1: &[Vec<i64>],
    cands: &[Vec<i64>],
    paired: &[Vec<i64>],
    norms: &[i64],
) -> Option<Vec<Vec<i64>>> {
    let r = g1.len();
    let mut by_norm: std::collections::HashMap<i64, Vec<usize>> = std::collections::HashMap::new();
    for (ci, &n) in norms.iter().enumerate() {
        by_norm.entry(n).or_default().push(ci);
    }
    let order = constrained_order(g1);
    let mut images: Vec<Option<usize>> = vec![None; r];
    if gram_backtrack(0, &order, g1, cands, paired, &by_norm, &mut images) {
        let picks: Vec<usize> = (0..r).map(|i| images[i].unwrap()).collect();
        for (i, &pi) in picks.iter().enumerate() {
            for (j, &pj) in picks.iter().enumerate() {
                if linalg::dot(&cands[pi], &paired[pj]) != g1[i][j] {
                    return None;
                }
            }
        }
        return Some(picks.into_iter().map(|p| cands[p].clone()).collect());
    }
    None
}

/// Isometry test of an abstract Gram matrix against the complement of a
/// changemaker lattice, run in the complement's ambient coordinates where
/// inner products are standard dots. Since the determinants agree, any
/// Gram-preserving image set is automatically a full basis.
pub fn find_isometry_into(g1: &[Vec<i64>], target: &ChangemakerLattice) -> Option<Vec<Vec<i64>>> {
    let r = g1.len();
    if target.complement_basis().len() != r {
        return None;
    }
    if r == 0 {
        return Some(Vec::new());
    }
    // Every complement on a fixed slope has determinant p.
    if gram_determinant(g1) != big_rat(target.slope().num_i64()) {
        return None;
    }
    let max_diag = (0..r)
        .map(|i| g1[i][i])
        .max()
        .unwrap()
        .max((0..r).map(|i| target.gram()[i][i]).max().unwrap());
    let cands = ambient_short_vectors(target.defining_vectors(), target.ambient_rank(), max_diag);
    let norms: Vec<i64> = cands.iter().map(|v| linalg::dot(v, v)).collect();

    let own = short_vectors(g1, max_diag);
    if theta_prefix(own.iter().map(|v| qf_value(g1, v, v)), max_diag)
        != theta_prefix(norms.iter().copied(), max_diag)
    {
        return None;
    }
    // Standard pairing: candidates pair with themselves directly.
    run_isometry_search(g1, &cands, &cands, &norms)
}

/// Searches for a basis map realising `U G2 U^T = G1` between two abstract
/// Gram matrices; exact, intended for small ranks.
pub fn find_isometry(g1: &[Vec<i64>], g2: &[Vec<i64>]) -> Option<Vec<Vec<i64>>> {
    let r = g1.len();
    if g2.len() != r {
        return None;
    }
    if r == 0 {
        return Some(Vec::new());
    }
    if gram_determinant(g1) != gram_determinant(g2) {
        return None;
    }
    let max_diag = (0..r)
        .map(|i| g1[i][i])
        .max()
        .unwrap()
        .max((0..r).map(|i| g2[i][i]).max().unwrap());

    let sv1 = short_vectors(g1, max_diag);
    let sv2 = short_vectors(g2, max_diag);
    if theta_prefix(sv1.iter().map(|v| qf_value(g1, v, v)), max_diag)
        != theta_prefix(sv2.iter().map(|v| qf_value(g2, v, v)), max_diag)
    {
        return None;
    }

    // Precompute G2-pairing rows so inner products become plain dots.
    let paired: Vec<Vec<i64>> = sv2
        .iter()
        .map(|v| (0..r).map(|i| qf_value_row(g2, i, v)).collect())
        .collect();
    let norms: Vec<i64> = sv2
        .iter()
        .zip(&paired)
        .map(|(v, gv)| linalg::dot(v, gv))
        .collect();
    run_isometry_search(g1, &sv2, &paired, &norms)
}

fn qf_value_row(gram: &[Vec<i64>], i: usize, y: &[i64]) -> i64 {
    gram[i].iter().zip(y).map(|(&g, &yj)| g * yj).sum()
}

/// Enumerates every changemaker structure on the given slope whose complement
/// is isometric to `gram`. Ambient rank is `rank(gram) + l + 1` and must not
/// exceed `rank_bound`.
pub fn uniqueness_search(
    slope: &PosRational,
    gram: &[Vec<i64>],
    rank_bound: usize,
) -> Result<Vec<ChangemakerVec>> {
    let theta = if gram.is_empty() {
        Vec::new()
    } else {
        let maxd = (0..gram.len()).map(|i| gram[i][i]).max().unwrap();
        let sv = short_vectors(gram, maxd);
        theta_prefix(sv.iter().map(|v| qf_value(gram, v, v)), maxd)
    };
    search_isometric_structures(slope, gram, &theta, rank_bound)
}

/// Same search keyed to an already-built lattice; its own short vectors are
/// enumerated in ambient coordinates, which stays fast at larger ranks.
pub fn uniqueness_search_for(
    cm: &ChangemakerLattice,
    rank_bound: usize,
) -> Result<Vec<ChangemakerVec>> {
    let gram = cm.gram();
    let theta = if gram.is_empty() {
        Vec::new()
    } else {
        let maxd = (0..gram.len()).map(|i| gram[i][i]).max().unwrap();
        let sv = ambient_short_vectors(cm.defining_vectors(), cm.ambient_rank(), maxd);
        theta_prefix(sv.iter().map(|v| linalg::dot(v, v)), maxd)
    };
    search_isometric_structures(cm.slope(), gram, &theta, rank_bound)
}

fn search_isometric_structures(
    slope: &PosRational,
    gram: &[Vec<i64>],
    theta: &[usize],
    rank_bound: usize,
) -> Result<Vec<ChangemakerVec>> {
    let cf = expand(slope);
    let l = cf.len() - 1;
    let ambient = gram.len() + l + 1;
    if ambient > rank_bound {
        return Err(Error::RankBound {
            rank: ambient,
            bound: rank_bound,
        });
    }
    let (t, target) = if slope.is_integer() {
        (ambient, slope.num_i64())
    } else {
        let a = cf.terms();
        let s_pad: usize = a[1..].iter().map(|&ai| (ai - 1) as usize).sum();
        if ambient < s_pad + 1 {
            return Ok(Vec::new());
        }
        (ambient - s_pad - 1, a[0] - 1)
    };
    if target < 0 {
        return Ok(Vec::new());
    }
    let r = gram.len();
    let maxd = if r == 0 {
        0
    } else {
        (0..r).map(|i| gram[i][i]).max().unwrap()
    };
    let det = gram_determinant(gram);

    let mut found = Vec::new();
    for sigma in enumerate_changemakers(t, target) {
        let cm = ChangemakerLattice::build(slope, &sigma)?;
        if r == 0 {
            if cm.complement_basis().is_empty() {
                found.push(cm.as_vec());
            }
            continue;
        }
        if det != big_rat(cm.slope().num_i64()) {
            continue;
        }
        let cands = ambient_short_vectors(cm.defining_vectors(), cm.ambient_rank(), maxd);
        let norms: Vec<i64> = cands.iter().map(|v| linalg::dot(v, v)).collect();
        if theta_prefix(norms.iter().copied(), maxd) != *theta {
            continue;
        }
        if run_isometry_search(gram, &cands, &cands, &norms).is_some() {
            found.push(cm.as_vec());
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pr(n: i64, d: i64) -> PosRational {
        PosRational::new(n, d).unwrap()
    }

    #[test]
    fn changemaker_condition() {
        assert!(is_changemaker(&[1, 1, 1, 2]));
        assert!(!is_changemaker(&[0, 2]));
        assert!(is_changemaker(&[]));
        assert!(is_changemaker(&[0, 1, 1, 3]));
        assert!(!is_changemaker(&[2]));
        assert!(!is_changemaker(&[1, 1, 3, 2]));
    }

    #[test]
    fn builds_integral_lattice() {
        let cm = ChangemakerLattice::build(&pr(7, 1), &[1, 1, 1, 2]).unwrap();
        assert_eq!(cm.ambient_rank(), 4);
        assert_eq!(cm.complement_basis().len(), 3);
        assert_eq!(cm.n(), 7);
        assert_eq!(cm.stable_coefficients(), &[2]);
    }

    #[test]
    fn rejects_norm_mismatch_and_violation() {
        assert!(matches!(
            ChangemakerLattice::build(&pr(8, 1), &[1, 1, 1, 2]),
            Err(Error::NormMismatch { .. })
        ));
        assert!(matches!(
            ChangemakerLattice::build(&pr(5, 1), &[0, 2]),
            Err(Error::ChangemakerViolation)
        ));
    }

    #[test]
    fn builds_non_integral_lattice() {
        // 7/2 = [4, 2]: n = 4, pad s = 1, sigma = (1,1,1)
        let cm = ChangemakerLattice::build(&pr(7, 2), &[1, 1, 1]).unwrap();
        assert_eq!(cm.ambient_rank(), 5);
        assert_eq!(cm.defining_vectors().len(), 2);
        assert_eq!(cm.complement_basis().len(), 3);
    }

    #[test]
    fn torsion_of_7_surgery_vector() {
        let cm = ChangemakerLattice::build(&pr(7, 1), &[1, 1, 1, 2]).unwrap();
        assert_eq!(cm.recover_torsion().unwrap().values(), &[1]);
    }

    #[test]
    fn torsion_of_all_ones_vanishes() {
        let cm = ChangemakerLattice::build(&pr(5, 1), &[1, 1, 1, 1, 1]).unwrap();
        assert_eq!(cm.recover_torsion().unwrap().values(), &[] as &[i64]);
    }

    #[test]
    fn torsion_of_21_surgery_vectors() {
        let a = ChangemakerLattice::build(&pr(21, 1), &[1, 1, 1, 1, 1, 4]).unwrap();
        assert_eq!(a.recover_torsion().unwrap().values(), &[3, 2, 1, 1, 1, 1]);
        let b = ChangemakerLattice::build(&pr(21, 1), &[1, 2, 2, 2, 2, 2]).unwrap();
        assert_eq!(b.recover_torsion().unwrap().values(), &[3, 2, 2, 1, 1]);
    }

    #[test]
    fn genus_examples() {
        let cm = ChangemakerLattice::build(&pr(7, 1), &[1, 1, 1, 2]).unwrap();
        assert_eq!(cm.genus(), 1);
        let ones = ChangemakerLattice::build(&pr(4, 1), &[1, 1, 1, 1]).unwrap();
        assert_eq!(ones.genus(), 0);
        let a = ChangemakerLattice::build(&pr(21, 1), &[1, 1, 1, 1, 1, 4]).unwrap();
        assert_eq!(a.genus(), 6);
        let b = ChangemakerLattice::build(&pr(21, 1), &[1, 2, 2, 2, 2, 2]).unwrap();
        assert_eq!(b.genus(), 5);
    }

    #[test]
    fn stable_bound_examples() {
        let cm = ChangemakerLattice::build(&pr(7, 1), &[1, 1, 1, 2]).unwrap();
        let sb = cm.stable_bound();
        assert_eq!((sb.b, sb.four_g_plus_4), (8, 8));
        let a = ChangemakerLattice::build(&pr(21, 1), &[1, 1, 1, 1, 1, 4]).unwrap();
        let sb = a.stable_bound();
        assert_eq!(sb.b, 24);
        assert_eq!(sb.four_g_plus_4, 28);
        assert!(sb.b <= sb.middle && sb.middle <= sb.four_g_plus_4);
        let ones = ChangemakerLattice::build(&pr(4, 1), &[1, 1, 1, 1]).unwrap();
        assert!(ones.stable_bound().empty_stable);
        assert_eq!(ones.stable_bound().b, 0);
    }

    #[test]
    fn enumerates_changemakers_of_fixed_norm() {
        let found = enumerate_changemakers(6, 21);
        assert!(found.contains(&vec![1, 1, 1, 1, 1, 4]));
        assert!(found.contains(&vec![1, 2, 2, 2, 2, 2]));
        for sigma in &found {
            assert!(is_changemaker(sigma));
            assert_eq!(sigma.iter().map(|&s| s * s).sum::<i64>(), 21);
        }
    }

    #[test]
    fn short_vector_counts_in_standard_lattice() {
        // Z^3: vectors of norm <= 2 are 6 of norm 1 and 12 of norm 2.
        let id = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        let sv = short_vectors(&id, 2);
        let n1 = sv.iter().filter(|v| qf_value(&id, v, v) == 1).count();
        let n2 = sv.iter().filter(|v| qf_value(&id, v, v) == 2).count();
        assert_eq!((n1, n2), (6, 12));
    }

    #[test]
    fn abstract_and_ambient_enumerations_agree() {
        // The Gram-side LDL enumeration and the ambient integer enumeration
        // must see the same norm histogram on a complement lattice.
        for sigma in [
            &[1i64, 1, 1, 2][..],
            &[1, 1, 1, 1, 1, 4],
            &[1, 2, 2, 2, 2, 2],
        ] {
            let n: i64 = sigma.iter().map(|&s| s * s).sum();
            let cm = ChangemakerLattice::build(&pr(n, 1), sigma).unwrap();
            for bound in 1..=6i64 {
                let ambient =
                    ambient_short_vectors(cm.defining_vectors(), cm.ambient_rank(), bound);
                let abstract_side = short_vectors(cm.gram(), bound);
                assert_eq!(
                    theta_prefix(ambient.iter().map(|v| linalg::dot(v, v)), bound),
                    theta_prefix(
                        abstract_side.iter().map(|v| qf_value(cm.gram(), v, v)),
                        bound
                    ),
                    "sigma {sigma:?} at bound {bound}"
                );
            }
        }
    }

    #[test]
    fn pentadiagonal_gram_is_recognised() {
        let display = vec![
            vec![5, -1, 0, 0, 0],
            vec![-1, 2, -1, 0, 0],
            vec![0, -1, 2, -1, 0],
            vec![0, 0, -1, 2, -1],
            vec![0, 0, 0, -1, 2],
        ];
        let a = ChangemakerLattice::build(&pr(21, 1), &[1, 1, 1, 1, 1, 4]).unwrap();
        assert!(find_isometry(&display, a.gram()).is_some());
        let b = ChangemakerLattice::build(&pr(21, 1), &[1, 2, 2, 2, 2, 2]).unwrap();
        assert!(find_isometry(&display, b.gram()).is_some());
        assert!(find_isometry(a.gram(), b.gram()).is_some());
    }

    #[test]
    fn uniqueness_search_finds_both_21_structures() {
        let a = ChangemakerLattice::build(&pr(21, 1), &[1, 1, 1, 1, 1, 4]).unwrap();
        let found = uniqueness_search(&pr(21, 1), a.gram(), 8).unwrap();
        let sigmas: Vec<Vec<i64>> = found.iter().map(|v| v.sigma.clone()).collect();
        assert_eq!(sigmas.len(), 2);
        assert!(sigmas.contains(&vec![1, 1, 1, 1, 1, 4]));
        assert!(sigmas.contains(&vec![1, 2, 2, 2, 2, 2]));
    }

    #[test]
    fn uniqueness_search_unique_at_9() {
        let cm = ChangemakerLattice::build(&pr(9, 1), &[1, 1, 1, 1, 1, 2]).unwrap();
        assert!(cm.stable_bound().b <= 9);
        let found = uniqueness_search(&pr(9, 1), cm.gram(), 8).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].sigma, vec![1, 1, 1, 1, 1, 2]);
    }

    #[test]
    fn uniqueness_search_respects_rank_bound() {
        let a = ChangemakerLattice::build(&pr(21, 1), &[1, 1, 1, 1, 1, 4]).unwrap();
        assert!(matches!(
            uniqueness_search(&pr(21, 1), a.gram(), 5),
            Err(Error::RankBound { .. })
        ));
    }

    #[test]
    fn degenerate_rank_zero_search() {
        let found = uniqueness_search(&pr(7, 1), &[], 8).unwrap();
        assert!(found.is_empty());
    }

    #[test]
    fn uniqueness_search_non_integral() {
        let cm = ChangemakerLattice::build(&pr(7, 2), &[1, 1, 1]).unwrap();
        let found = uniqueness_search_for(&cm, 8).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].sigma, vec![1, 1, 1]);
        assert!(found[0].non_integral);
    }

    #[test]
    fn non_isometric_lattices_are_rejected() {
        // diag(1,1,7) has the right determinant for a 7-surgery complement
        // but contains unit vectors, which the complement of (1,1,1,2)
        // does not.
        let cm = ChangemakerLattice::build(&pr(7, 1), &[1, 1, 1, 2]).unwrap();
        let diag = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 7]];
        assert!(find_isometry_into(&diag, &cm).is_none());
        assert!(find_isometry(&diag, cm.gram()).is_none());
        assert!(find_isometry(cm.gram(), &diag).is_none());
    }
}
