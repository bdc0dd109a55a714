//! Brute-force reference computations.
//!
//! Everything here recomputes a quantity by direct enumeration, independent
//! of the structured implementations it cross-checks. These stay exact but
//! only run at desk scale; callers guard the input sizes.

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::lattice::{CharVec, LinearLattice};

/// Enumerates the whole short-region box `|c_i| <= a_i` and filters by the
/// two-sided tank condition. The box size is capped to keep this honest as a
/// reference path.
pub fn short_region(lat: &LinearLattice, cap: u64) -> Result<Vec<CharVec>> {
    let a = lat.weights();
    let mut size: u64 = 1;
    for &ai in a {
        size = size.saturating_mul(ai as u64 + 1);
        if size > cap {
            return Err(Error::BoundExceeded {
                p: size,
                bound: cap,
            });
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(a.len());
    fn rec(lat: &LinearLattice, a: &[i64], cur: &mut Vec<i64>, out: &mut Vec<CharVec>) {
        if cur.len() == a.len() {
            let s = CharVec(cur.clone());
            if lat.is_short(&s) {
                out.push(s);
            }
            return;
        }
        let i = cur.len();
        let mut v = -a[i];
        while v <= a[i] {
            cur.push(v);
            rec(lat, a, cur, out);
            cur.pop();
            v += 2;
        }
    }
    rec(lat, a, &mut cur, &mut out);
    Ok(out)
}

/// Minimum norm in the class of `s` by literal enumeration of the coset
/// within the box `|c_i| <= a_i`. Exists purely to validate the dynamic
/// program in [`LinearLattice::min_norm_in_class`] on small chains.
pub fn box_min_norm_in_class(lat: &LinearLattice, s: &CharVec, cap: u64) -> Result<BigRational> {
    let key = lat.class_index(s)?;
    let mut best: Option<BigRational> = None;
    for cand in short_region_box(lat, cap)? {
        if lat.class_index(&cand)? != key {
            continue;
        }
        let norm = lat.norm(&cand)?;
        best = Some(match best {
            None => norm,
            Some(b) if norm < b => norm,
            Some(b) => b,
        });
    }
    best.ok_or(Error::NotCharacteristic)
}

/// The full box `|c_i| <= a_i` without any tank filtering.
fn short_region_box(lat: &LinearLattice, cap: u64) -> Result<Vec<CharVec>> {
    let a = lat.weights();
    let mut size: u64 = 1;
    for &ai in a {
        size = size.saturating_mul(ai as u64 + 1);
        if size > cap {
            return Err(Error::BoundExceeded {
                p: size,
                bound: cap,
            });
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(a.len());
    fn rec(a: &[i64], cur: &mut Vec<i64>, out: &mut Vec<CharVec>) {
        if cur.len() == a.len() {
            out.push(CharVec(cur.clone()));
            return;
        }
        let i = cur.len();
        let mut v = -a[i];
        while v <= a[i] {
            cur.push(v);
            rec(a, cur, out);
            cur.pop();
            v += 2;
        }
    }
    rec(a, &mut cur, &mut out);
    Ok(out)
}

/// Exhaustive minimisation behind torsion recovery: minimum of `|c|^2` over
/// all odd vectors with `|c_j| <= 2 w_j + 3` hitting the required residue.
/// Returns one value per torsion index `0..=n/2`.
pub fn brute_torsion_minima(weights: &[i64], n: i64, ambient: usize) -> Vec<Option<i64>> {
    assert_eq!(weights.len(), ambient);
    let modulus = 2 * n;
    let mut best = vec![i64::MAX; modulus as usize];
    let mut c = vec![0i64; ambient];
    fn rec(
        weights: &[i64],
        modulus: i64,
        c: &mut Vec<i64>,
        depth: usize,
        acc_dot: i64,
        acc_norm: i64,
        best: &mut Vec<i64>,
    ) {
        if depth == weights.len() {
            let rho = acc_dot.rem_euclid(modulus) as usize;
            if acc_norm < best[rho] {
                best[rho] = acc_norm;
            }
            return;
        }
        let bound = 2 * weights[depth] + 3;
        let mut v = -bound;
        while v <= bound {
            c[depth] = v;
            rec(
                weights,
                modulus,
                c,
                depth + 1,
                acc_dot + v * weights[depth],
                acc_norm + v * v,
                best,
            );
            v += 2;
        }
        c[depth] = 0;
    }
    rec(weights, modulus, &mut c, 0, 0, 0, &mut best);
    (0..=n / 2)
        .map(|i| {
            let rho = ((n + 2 * i) % modulus) as usize;
            (best[rho] != i64::MAX).then_some(best[rho])
        })
        .collect()
}
