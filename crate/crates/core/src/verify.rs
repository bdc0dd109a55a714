//! Batched property suites over slope grids. The test harness and the CLI
//! `verify` subcommand both drive these; each suite returns a structured
//! report with one line per failure.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::cf::{expand, interpolation_sequence, NegCf};
use crate::changemaker::{enumerate_changemakers, uniqueness_search_for, ChangemakerLattice};
use crate::error::Result;
use crate::extension::{
    check_extension_d_equality, sharpness_identity_check, ExceptionalMode, ExtensionPair,
};
use crate::knot::{AlexPoly, DTable, VhSeq};
use crate::lattice::LinearLattice;
use crate::oracle;
use crate::rational::PosRational;
use crate::slopes::TorusKnot;

pub const DEFAULT_SEED: u64 = 0x5107_2023;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub checks: u64,
    pub failures: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport {
            name: name.to_string(),
            checks: 0,
            failures: Vec::new(),
            seed: None,
        }
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(msg());
        }
    }
}

/// All canonical slopes with `p <= pmax`, `q <= qmax`, `gcd(p,q) = 1`.
pub fn slope_grid(pmax: i64, qmax: i64) -> Vec<PosRational> {
    let mut out = Vec::new();
    for q in 1..=qmax {
        for p in 1..=pmax {
            if gcd(p, q) == 1 {
                out.push(PosRational::new(p, q).unwrap());
            }
        }
    }
    out
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

/// Representative-set counting: `|C| = p`, the two per-first-coordinate
/// tables, the shifted-set table, and representative completeness.
pub fn counts_suite(pmax: i64, qmax: i64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("counts");
    for slope in slope_grid(pmax, qmax) {
        let lat = LinearLattice::new(expand(&slope))?;
        let p = lat.p();
        let q = lat.q();
        let r = lat.rem();
        let a0 = lat.weights()[0];
        let reps = lat.canonical_reps();

        rep.check(reps.len() as i64 == p, || {
            format!("{slope}: |C| = {} != {p}", reps.len())
        });

        // counts per first coordinate, and left-full counts
        let mut c = 2 - a0;
        while c <= a0 {
            let total = reps.iter().filter(|s| s.coords()[0] == c).count() as i64;
            let left_full = reps
                .iter()
                .filter(|s| s.coords()[0] == c && lat.is_left_full(s))
                .count() as i64;
            let (want_total, want_lf) = if c == a0 { (q - r, 0) } else { (q, r) };
            rep.check(total == want_total, || {
                format!("{slope}: count at c0={c} is {total}, want {want_total}")
            });
            rep.check(left_full == want_lf, || {
                format!("{slope}: left-full count at c0={c} is {left_full}, want {want_lf}")
            });
            c += 2;
        }

        // shifted set: counts and completeness
        let shifted = lat.shifted_reps();
        rep.check(shifted.len() as i64 == p, || {
            format!("{slope}: |F| = {} != {p}", shifted.len())
        });
        let mut c = 2 - a0;
        while c <= a0 {
            let total = shifted.iter().filter(|s| s.coords()[0] == c).count() as i64;
            let want = if c == 0 || c == 1 { q - r } else { q };
            rep.check(total == want, || {
                format!("{slope}: shifted count at c0={c} is {total}, want {want}")
            });
            c += 2;
        }
        let mut indices: Vec<u64> = shifted
            .iter()
            .map(|s| lat.class_index(s).expect("shifted reps are characteristic"))
            .collect();
        indices.sort_unstable();
        indices.dedup();
        rep.check(indices.len() as i64 == p, || {
            format!("{slope}: shifted set is not a complete irredundant rep set")
        });
    }
    Ok(rep)
}

/// Shortness of both representative sets against the exact class minimum,
/// plus trough-removal normalisation over the short region.
pub fn shortness_suite(
    pmax: i64,
    qmax: i64,
    exhaustive_cap: u64,
    seed: u64,
) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("shortness");
    rep.seed = Some(seed);
    let mut rng = StdRng::seed_from_u64(seed);
    for slope in slope_grid(pmax, qmax) {
        let lat = LinearLattice::new(expand(&slope))?;
        for s in lat.canonical_reps() {
            let min = lat.min_norm_in_class_with_bound(s, pmax as u64)?;
            rep.check(min == lat.norm(s)?, || {
                format!("{slope}: canonical rep {s} is not a class minimiser")
            });
        }
        for s in &lat.shifted_reps() {
            let min = lat.min_norm_in_class_with_bound(s, pmax as u64)?;
            rep.check(min == lat.norm(s)?, || {
                format!("{slope}: shifted rep {s} is not a class minimiser")
            });
        }

        // Trough removal over the short region: exhaustive on small boxes,
        // seeded constructive sampling on large ones (rejection from the box
        // is hopeless on long chains, where short vectors are exponentially
        // rare).
        let region = match oracle::short_region(&lat, exhaustive_cap) {
            Ok(region) => region,
            Err(_) => (0..200)
                .map(|_| sample_short_vector(&lat, &mut rng))
                .collect(),
        };
        for s in &region {
            let out = lat.remove_troughs(s)?;
            let trough_free = out
                .coords()
                .iter()
                .zip(lat.weights())
                .all(|(&c, &a)| c > -a);
            rep.check(trough_free, || format!("{slope}: {s} still has troughs"));
            rep.check(lat.norm(&out)? == lat.norm(s)?, || {
                format!("{slope}: trough removal changed the norm of {s}")
            });
            rep.check(lat.same_class(&out, s)?, || {
                format!("{slope}: trough removal changed the class of {s}")
            });
            rep.check(lat.canonical_reps().contains(&out), || {
                format!("{slope}: trough removal left the representative set at {s}")
            });
        }
    }
    Ok(rep)
}

/// Draws a short-region element coordinate by coordinate, tracking the open
/// tank state of both signs and never placing a value that closes one. At
/// most one sign can have an open tank at a time, so a legal value always
/// exists.
fn sample_short_vector(lat: &LinearLattice, rng: &mut StdRng) -> crate::lattice::CharVec {
    let a = lat.weights();
    let mut c = Vec::with_capacity(a.len());
    let (mut plus_open, mut minus_open) = (false, false);
    for &ai in a {
        let forbidden_plus = plus_open.then_some(ai);
        let forbidden_minus = minus_open.then_some(-ai);
        let v = loop {
            let steps = rng.random_range(0..=ai);
            let v = -ai + 2 * steps;
            if Some(v) != forbidden_plus && Some(v) != forbidden_minus {
                break v;
            }
        };
        plus_open = v == ai || (plus_open && v == ai - 2);
        minus_open = v == -ai || (minus_open && v == -(ai - 2));
        c.push(v);
    }
    let out = crate::lattice::CharVec(c);
    debug_assert!(lat.is_short(&out));
    out
}

/// The standard knot battery used by the d-invariant grids.
pub fn knot_battery() -> Vec<(String, VhSeq)> {
    let mut out = vec![("unknot".to_string(), VhSeq::zero())];
    for (r, s) in [(3i64, 2i64), (4, 3), (5, 2), (5, 4), (7, 2)] {
        let v = VhSeq::from_torsion(&AlexPoly::torus(r, s).unwrap().torsion());
        out.push((format!("T({r},{s})"), v));
    }
    out
}

/// Multiset equality of the two d-invariant routes over a slope grid.
pub fn multiset_suite(pmax: i64, qmax: i64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("multiset");
    let knots = knot_battery();
    for slope in slope_grid(pmax, qmax) {
        let lat = LinearLattice::new(expand(&slope))?;
        for (name, v) in &knots {
            let table = DTable::build(&lat, &slope, v)?;
            rep.check(table.multisets_equal, || {
                format!("{slope} with {name}: residue and class multisets differ")
            });
        }
    }
    Ok(rep)
}

/// The total-sum identity over a slope grid.
pub fn sum_suite(pmax: i64, qmax: i64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("sum");
    let knots = knot_battery();
    for slope in slope_grid(pmax, qmax) {
        for (name, v) in &knots {
            rep.check(crate::knot::sum_identity_holds(&slope, v), || {
                format!("{slope} with {name}: sum identity fails")
            });
        }
    }
    Ok(rep)
}

/// Torsion-recovery dynamic program against exhaustive odd-vector search,
/// over every changemaker tuple within the ambient and norm bounds, in both
/// the integral and padded non-integral forms.
pub fn dp_oracle_suite(nmax: i64, ambient_max: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("dp-oracle");
    for t in 1..=ambient_max {
        for n in 2..=nmax {
            for sigma in enumerate_changemakers(t, n) {
                let slope = PosRational::from_integer(n)?;
                let cm = ChangemakerLattice::build(&slope, &sigma)?;
                compare_dp(&mut rep, &cm);
            }
        }
    }
    // Non-integral: slopes n - 1/2 = [n,2] and n - 2/3 = [n,2,2].
    for pad in 1..=2usize {
        for t in 1..=ambient_max.saturating_sub(pad + 1) {
            for n in 2..=nmax {
                if (t + pad + 1) > ambient_max {
                    continue;
                }
                for sigma in enumerate_changemakers(t, n - 1) {
                    let slope = match pad {
                        1 => PosRational::new(2 * n - 1, 2)?,
                        _ => PosRational::new(3 * n - 2, 3)?,
                    };
                    let cm = ChangemakerLattice::build(&slope, &sigma)?;
                    compare_dp(&mut rep, &cm);
                }
            }
        }
    }
    Ok(rep)
}

fn compare_dp(rep: &mut SuiteReport, cm: &ChangemakerLattice) {
    let brute = oracle::brute_torsion_minima(cm.w0(), cm.n(), cm.ambient_rank());
    let mins = crate::changemaker::residue_minima(cm.w0(), cm.n());
    for (i, b) in brute.iter().enumerate() {
        let rho = ((cm.n() + 2 * i as i64) % (2 * cm.n())) as usize;
        rep.check(Some(mins[rho]) == *b, || {
            format!(
                "sigma {:?} at {}: dp {} vs brute {:?} at index {i}",
                cm.sigma(),
                cm.slope(),
                mins[rho],
                b
            )
        });
    }
    // The recovered sequence must be a valid torsion sequence.
    rep.check(cm.recover_torsion().is_ok(), || {
        format!("sigma {:?}: recovery failed validation", cm.sigma())
    });
}

/// Spin-c extension along the interpolation sequences from the lens-space
/// slope upward for the two smallest torus-knot families, plus a systematic
/// restriction/shortness sweep over small bases with assorted tails.
pub fn extension_suite() -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("extension");
    for (r, s) in [(3i64, 2i64), (4, 3)] {
        let v = VhSeq::from_torsion(&AlexPoly::torus(r, s).unwrap().torsion());
        let lens = r * s - 1;
        let seq = interpolation_sequence(
            &PosRational::from_integer(lens)?,
            &PosRational::from_integer(lens + 11)?,
        )?;
        for step in seq.windows(2) {
            step_checks(&mut rep, &step[0], &step[1], &v, &format!("T({r},{s})"))?;
        }
    }

    let tails: [&[i64]; 5] = [&[2], &[3], &[1], &[2, 2, 1], &[4, 2]];
    for slope in slope_grid(40, 4) {
        let base_cf = expand(&slope);
        for tail in tails {
            let Ok(pair) = ExtensionPair::new(&base_cf, tail) else {
                continue;
            };
            for s in pair.base().canonical_reps() {
                let out = pair.extend_spinc(s)?;
                rep.check(&out.coords()[..s.len()] == s.coords(), || {
                    format!("{slope}+{tail:?}: extension does not restrict to {s}")
                });
                rep.check(pair.ext().is_short(&out), || {
                    format!("{slope}+{tail:?}: extension of {s} is not short")
                });
                // extended determinants can exceed the default search cap
                let min = pair.ext().min_norm_in_class_with_bound(&out, 2000)?;
                rep.check(min == pair.ext().norm(&out)?, || {
                    format!("{slope}+{tail:?}: extension of {s} is not a class minimiser")
                });
            }
        }
    }
    Ok(rep)
}

fn step_checks(rep: &mut SuiteReport, lo: &NegCf, hi: &NegCf, v: &VhSeq, name: &str) -> Result<()> {
    let pair = ExtensionPair::from_step(lo, hi)?;
    for s in pair.base().canonical_reps() {
        let out = pair.extend_spinc(s)?;
        rep.check(&out.coords()[..s.len()] == s.coords(), || {
            format!("{name} {lo}->{hi}: extension does not restrict to {s}")
        });
        rep.check(pair.ext().is_short(&out), || {
            format!("{name} {lo}->{hi}: extension of {s} is not short")
        });
        if pair.ext().p() <= 40 {
            let min = pair.ext().min_norm_in_class(&out)?;
            rep.check(min == pair.ext().norm(&out)?, || {
                format!("{name} {lo}->{hi}: extension of {s} is not a class minimiser")
            });
        }
    }
    let eq = check_extension_d_equality(&pair, v, ExceptionalMode::HypothesisAssumed)?;
    rep.check(eq.all_ok(), || {
        format!("{name} {lo}->{hi}: d-equality fails")
    });
    let idc = sharpness_identity_check(&pair, v, ExceptionalMode::HypothesisAssumed)?;
    rep.check(idc.all_ok(), || {
        format!("{name} {lo}->{hi}: gluing identity fails")
    });
    Ok(())
}

/// Continued-fraction identities: exhaustive round-trips, the trailing-1
/// identity, and random interpolation sequences.
pub fn identity_suite(seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("identity");
    rep.seed = Some(seed);
    for num in 2..=300i64 {
        for den in 1..num {
            if gcd(num, den) != 1 {
                continue;
            }
            let slope = PosRational::new(num, den)?;
            let cf = expand(&slope);
            rep.check(cf.evaluate()? == slope, || {
                format!("round trip fails at {num}/{den}")
            });
            let terms = cf.terms();
            let ceil = i64::try_from(&slope.ceil()).unwrap();
            rep.check(
                terms[0] == ceil && terms[1..].iter().all(|&a| a >= 2),
                || format!("expansion of {num}/{den} is not canonical"),
            );
            rep.check(cf.with_trailing_one().evaluate()? == slope, || {
                format!("trailing-1 identity fails at {num}/{den}")
            });
        }
    }
    // Random interpolation pairs; the constructor validates monotonicity and
    // endpoints internally, so reaching the end is the assertion.
    let mut rng = StdRng::seed_from_u64(seed);
    let mut done = 0;
    while done < 500 {
        let n1 = rng.random_range(1..=100i64);
        let d1 = rng.random_range(1..=100i64);
        let n2 = rng.random_range(1..=100i64);
        let d2 = rng.random_range(1..=100i64);
        let a = PosRational::new(n1, d1)?;
        let b = PosRational::new(n2, d2)?;
        if a >= b {
            continue;
        }
        let seq = interpolation_sequence(&a, &b)?;
        rep.check(seq.len() >= 2, || format!("degenerate sequence {a} -> {b}"));
        done += 1;
        rep.checks += 1;
    }
    Ok(rep)
}

/// Desk-scale end-to-end shadow of torsion rigidity: at integer slopes in
/// the uniqueness zone, every changemaker structure on an isometric
/// complement recovers the same torsion, and the expected torus-knot
/// structure is among them.
pub fn pipeline_suite(rank_bound: usize) -> Result<SuiteReport> {
    pipeline_suite_spanning(rank_bound, 10)
}

/// `extra_slopes` integer slopes above `4g + 4` are swept per knot.
pub fn pipeline_suite_spanning(rank_bound: usize, extra_slopes: i64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("pipeline");
    for (r, s) in [(3i64, 2i64), (4, 3), (5, 2)] {
        let tk = TorusKnot::new(r, s)?;
        let torus_torsion = AlexPoly::torus(r, s).unwrap().torsion();
        let g = tk.genus();
        for n in (4 * g + 4)..=(4 * g + 4 + extra_slopes) {
            let slope = PosRational::from_integer(n)?;
            // all strictly positive changemaker tuples of square-norm n
            let mut matching = Vec::new();
            for t in 1..=n as usize {
                for sigma in enumerate_changemakers(t, n) {
                    if sigma[0] == 0 {
                        continue;
                    }
                    let cm = ChangemakerLattice::build(&slope, &sigma)?;
                    if cm.recover_torsion()? == torus_torsion {
                        matching.push(cm);
                    }
                }
            }
            rep.check(!matching.is_empty(), || {
                format!("T({r},{s}) at {n}: no changemaker recovers the torus torsion")
            });
            for cm in &matching {
                rep.check(cm.genus() == g, || {
                    format!("T({r},{s}) at {n}: genus mismatch for {:?}", cm.sigma())
                });
                let sb = cm.stable_bound();
                rep.check(sb.b <= n, || {
                    format!("T({r},{s}) at {n}: uniqueness hypothesis violated")
                });
                let structures = uniqueness_search_for(cm, rank_bound)?;
                rep.check(structures.len() == 1, || {
                    format!(
                        "T({r},{s}) at {n}: expected a unique structure, found {:?}",
                        structures
                            .iter()
                            .map(|v| v.sigma.clone())
                            .collect::<Vec<_>>()
                    )
                });
                for found in &structures {
                    let other = ChangemakerLattice::build(&slope, &found.sigma)?;
                    rep.check(other.recover_torsion()? == torus_torsion, || {
                        format!(
                            "T({r},{s}) at {n}: isometric structure {:?} has different torsion",
                            found.sigma
                        )
                    });
                }
            }
        }
    }
    Ok(rep)
}
