//! Characterizing-slope arithmetic for torus knots: exact thresholds, zone
//! predicates, and the satellite-exclusion inequality chain.

use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::big_rat;
use crate::rational::{rational_string, PosRational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TorusKnot {
    pub r: i64,
    pub s: i64,
}

impl TorusKnot {
    pub fn new(r: i64, s: i64) -> Result<Self> {
        if !(r > s && s > 1) {
            return Err(Error::Precondition(format!(
                "torus knot requires r > s > 1, got ({r},{s})"
            )));
        }
        if gcd(r, s) != 1 {
            return Err(Error::Precondition(format!(
                "torus knot requires gcd(r,s) = 1, got ({r},{s})"
            )));
        }
        Ok(TorusKnot { r, s })
    }

    pub fn genus(&self) -> i64 {
        (self.r - 1) * (self.s - 1) / 2
    }

    /// `2g - 1 = rs - r - s`.
    pub fn two_g_minus_1(&self) -> i64 {
        self.r * self.s - self.r - self.s
    }

    pub fn four_g_plus_4(&self) -> i64 {
        4 * self.genus() + 4
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

/// Exact thresholds attached to a torus knot.
#[derive(Debug, Clone, Serialize)]
pub struct Thresholds {
    /// `43/4 * (rs - r - s)`, the linear characterizing-slope threshold.
    pub characterizing: String,
    pub two_g_minus_1: i64,
    pub four_g_plus_4: i64,
    /// `30 (r^2-1)(s^2-1) / 67`, the earlier quartic threshold.
    pub quartic: String,
}

/// `43/4 (rs - r - s)` as an exact rational.
pub fn characterizing_threshold(tk: &TorusKnot) -> BigRational {
    big_rat(43) * big_rat(tk.two_g_minus_1()) / big_rat(4)
}

/// The earlier quartic threshold `30 (r^2 - 1)(s^2 - 1) / 67`.
pub fn ni_zhang_threshold(tk: &TorusKnot) -> BigRational {
    big_rat(30) * big_rat(tk.r * tk.r - 1) * big_rat(tk.s * tk.s - 1) / big_rat(67)
}

/// Zone where torsion recovery pins the Alexander polynomial: the slope must
/// clear `4g + 4` and exceed the lens-space surgery slope `rs - 1`.
pub fn alex_unique_zone(tk: &TorusKnot, slope: &PosRational) -> bool {
    let four_g = big_rat(tk.four_g_plus_4());
    let lens = big_rat(tk.r * tk.s - 1);
    slope.cmp_rational(&four_g).is_ge() && slope.cmp_rational(&lens).is_gt()
}

/// Zone where the surgery is an L-space: `slope >= 2g - 1`.
pub fn lspace_zone(tk: &TorusKnot, slope: &PosRational) -> bool {
    slope.cmp_rational(&big_rat(tk.two_g_minus_1())).is_ge()
}

/// One line of the satellite-exclusion chain.
#[derive(Debug, Clone, Serialize)]
pub struct ChainLine {
    pub index: usize,
    pub lhs: String,
    pub rhs: String,
    pub ok: bool,
}

/// Line-by-line verification of the displayed chain
/// `p - rsq >= 9.75 q (rs-r-s) - q(r+s)
///          >= 9.75 (max-2) - (2 max - 1)
///           = 7.75 max - 18.5
///          >= max`
/// plus the silent auxiliary facts it consumes.
#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    pub lines: Vec<ChainLine>,
    /// `rs - r - s >= max - 2` and `r + s <= 2 max - 1` and `q >= 1`.
    pub auxiliaries: Vec<ChainLine>,
    pub holds: bool,
}

pub fn satellite_chain(tk: &TorusKnot, slope: &PosRational) -> Result<ChainReport> {
    let threshold = characterizing_threshold(tk);
    if slope.cmp_rational(&threshold).is_lt() {
        return Err(Error::Precondition(format!(
            "satellite chain requires slope >= {}",
            rational_string(&threshold)
        )));
    }
    let p = big_rat(slope.num_i64());
    let q = big_rat(slope.den_i64());
    let (r, s) = (tk.r, tk.s);
    let mx = r.max(s);
    let genus_term = big_rat(tk.two_g_minus_1()); // rs - r - s
    let nine75 = big_rat(39) / big_rat(4);
    let seven75 = big_rat(31) / big_rat(4);
    let eighteen5 = big_rat(37) / big_rat(2);

    let e0 = &p - big_rat(r * s) * &q; // p - rsq
    let e1 = &nine75 * &q * &genus_term - &q * big_rat(r + s);
    let e2 = &nine75 * big_rat(mx - 2) - big_rat(2 * mx - 1);
    let e3 = &seven75 * big_rat(mx) - &eighteen5;
    let e4 = big_rat(mx);

    let mut lines = Vec::new();
    let mut push = |index: usize, lhs: &BigRational, rhs: &BigRational, ok: bool| {
        lines.push(ChainLine {
            index,
            lhs: rational_string(lhs),
            rhs: rational_string(rhs),
            ok,
        });
    };
    push(1, &e0, &e1, e0 >= e1);
    push(2, &e1, &e2, e1 >= e2);
    push(3, &e2, &e3, e2 == e3);
    push(4, &e3, &e4, e3 >= e4);

    let aux = vec![
        ChainLine {
            index: 1,
            lhs: rational_string(&genus_term),
            rhs: rational_string(&big_rat(mx - 2)),
            ok: genus_term >= big_rat(mx - 2),
        },
        ChainLine {
            index: 2,
            lhs: rational_string(&big_rat(r + s)),
            rhs: rational_string(&big_rat(2 * mx - 1)),
            ok: big_rat(r + s) <= big_rat(2 * mx - 1),
        },
        ChainLine {
            index: 3,
            lhs: rational_string(&q),
            rhs: rational_string(&big_rat(1)),
            ok: q >= big_rat(1),
        },
    ];

    let final_ok = e0 >= e4;
    let holds = lines.iter().all(|l| l.ok) && final_ok;
    Ok(ChainReport {
        lines,
        auxiliaries: aux,
        holds,
    })
}

/// Named verdicts for one (torus knot, slope) pair.
#[derive(Debug, Clone, Serialize)]
pub struct SlopeVerdict {
    pub knot: TorusKnot,
    pub slope: String,
    pub thresholds: Thresholds,
    pub lspace: bool,
    /// Slope at least the lens-space surgery slope `rs - 1`.
    pub sharp_base: bool,
    pub alex_unique_zone: bool,
    pub quartic_zone: bool,
    pub characterizing_zone: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub satellite_chain: Option<ChainReport>,
}

pub fn slope_verdict(tk: &TorusKnot, slope: &PosRational) -> SlopeVerdict {
    let characterizing = characterizing_threshold(tk);
    let quartic = ni_zhang_threshold(tk);
    let in_char_zone = slope.cmp_rational(&characterizing).is_ge();
    let chain = if in_char_zone {
        satellite_chain(tk, slope).ok()
    } else {
        None
    };
    SlopeVerdict {
        knot: *tk,
        slope: slope.to_string(),
        thresholds: Thresholds {
            characterizing: rational_string(&characterizing),
            two_g_minus_1: tk.two_g_minus_1(),
            four_g_plus_4: tk.four_g_plus_4(),
            quartic: rational_string(&quartic),
        },
        lspace: lspace_zone(tk, slope),
        sharp_base: slope.cmp_rational(&big_rat(tk.r * tk.s - 1)).is_ge(),
        alex_unique_zone: alex_unique_zone(tk, slope),
        quartic_zone: slope.cmp_rational(&quartic).is_ge(),
        characterizing_zone: in_char_zone,
        satellite_chain: chain,
    }
}
