//! `slt`: exact lattice invariants of Dehn surgeries from the command line.
//!
//! Exit codes: 0 success / all checks pass, 1 check failure, 2 usage or
//! parse error. `SLT_MAX_P` caps the exact class-minimum search bound.

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use slt_core::changemaker::{uniqueness_search, ChangemakerLattice};
use slt_core::knot::{AlexPoly, DTable, VhSeq};
use slt_core::lattice::LinearLattice;
use slt_core::verify;
use slt_core::{expand, split_slope, Error, PosRational, TorusKnot};

#[derive(Parser)]
#[command(
    name = "slt",
    version,
    about = "Exact lattice-theoretic invariants of Dehn surgeries",
    long_about = None
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Negative continued fraction expansion of a slope, with its split and
    /// the trailing-one identity.
    Contfrac { slope: String },

    /// The two short representative sets with their count tables.
    Spinc {
        slope: String,
        /// Assert the counting identities and exit nonzero on mismatch.
        #[arg(long)]
        check: bool,
    },

    /// d-invariants by both routes, with the multiset and sum checks.
    Dinv {
        slope: String,
        /// Knot spec: torus:r,s | alex:a0,a1,... | v:v0,v1,... | unknot
        #[arg(long)]
        knot: String,
    },

    /// Recover torsion coefficients and the Alexander polynomial from a
    /// changemaker vector.
    Recover {
        slope: String,
        /// Comma-separated changemaker coefficients, e.g. 1,1,1,2
        #[arg(long)]
        sigma: String,
    },

    /// All changemaker structures isometric to the complement of sigma.
    Uniq {
        slope: String,
        #[arg(long)]
        sigma: String,
        /// Ambient rank cap for the search.
        #[arg(long, default_value_t = 8)]
        rank_bound: usize,
    },

    /// Characterizing-slope verdicts for a torus knot.
    Charslope { r: i64, s: i64, slope: String },

    /// Run a named property suite.
    Verify {
        /// counts | shortness | multiset | sum | dp-oracle | extension |
        /// identity | pipeline | all
        suite: String,
        #[arg(long)]
        pmax: Option<i64>,
        #[arg(long)]
        qmax: Option<i64>,
        #[arg(long)]
        nmax: Option<i64>,
        /// Shrink every bound for a fast smoke run.
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}

fn brute_bound() -> u64 {
    std::env::var("SLT_MAX_P")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(slt_core::lattice::DEFAULT_BRUTE_BOUND)
}

fn run(cli: &Cli) -> Result<i32, Error> {
    let json_mode = cli.format == Format::Json;
    match &cli.cmd {
        Cmd::Contfrac { slope } => {
            let slope: PosRational = slope.parse()?;
            let cf = expand(&slope);
            let split = split_slope(&slope);
            let relaxed = cf.with_trailing_one();
            debug_assert_eq!(relaxed.evaluate()?, slope);
            if json_mode {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "slope": slope.to_string(),
                        "terms": cf.terms(),
                        "split": {"n": split.n, "rem": split.rem, "q": split.q},
                        "trailingOneForm": relaxed.terms(),
                    }))
                    .unwrap()
                );
            } else {
                println!("slope       {slope}");
                println!("expansion   {cf}");
                println!("split       {} - {}/{}", split.n, split.rem, split.q);
                println!("identity    {cf} = {relaxed}");
            }
            Ok(0)
        }

        Cmd::Spinc { slope, check } => {
            let slope: PosRational = slope.parse()?;
            let lat = LinearLattice::new(expand(&slope))?;
            let canonical = lat.canonical_reps();
            let shifted = lat.shifted_reps();
            let a0 = lat.weights()[0];
            let (q, r) = (lat.q(), lat.rem());

            let mut rows = Vec::new();
            let mut c = 2 - a0;
            let mut ok = canonical.len() as i64 == lat.p();
            while c <= a0 {
                let count = canonical.iter().filter(|s| s.coords()[0] == c).count() as i64;
                let left_full = canonical
                    .iter()
                    .filter(|s| s.coords()[0] == c && lat.is_left_full(s))
                    .count() as i64;
                let shifted_count = shifted.iter().filter(|s| s.coords()[0] == c).count() as i64;
                let (want, want_lf) = if c == a0 { (q - r, 0) } else { (q, r) };
                let want_shift = if c == 0 || c == 1 { q - r } else { q };
                ok &= count == want && left_full == want_lf && shifted_count == want_shift;
                rows.push((c, count, left_full, shifted_count));
                c += 2;
            }

            if json_mode {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "slope": slope.to_string(),
                        "p": lat.p(),
                        "q": q,
                        "rem": r,
                        "canonical": canonical,
                        "shifted": shifted,
                        "countsByFirstCoordinate": rows
                            .iter()
                            .map(|(c, n, lf, sh)| json!({
                                "c0": c, "count": n, "leftFull": lf, "shiftedCount": sh
                            }))
                            .collect::<Vec<_>>(),
                        "countsOk": ok,
                    }))
                    .unwrap()
                );
            } else {
                println!("slope {slope}: |C| = {} (p = {})", canonical.len(), lat.p());
                println!(
                    "{:>4} {:>6} {:>9} {:>8}",
                    "c0", "count", "left-full", "shifted"
                );
                for (c, n, lf, sh) in &rows {
                    println!("{c:>4} {n:>6} {lf:>9} {sh:>8}");
                }
                println!("canonical: {}", join_vecs(canonical.iter()));
                println!("shifted:   {}", join_vecs(shifted.iter()));
                if *check {
                    println!("counting assertions: {}", if ok { "ok" } else { "FAILED" });
                }
            }
            Ok(if *check && !ok { 1 } else { 0 })
        }

        Cmd::Dinv { slope, knot } => {
            let slope: PosRational = slope.parse()?;
            let v = parse_knot(knot)?;
            let lat = LinearLattice::new(expand(&slope))?;
            let table = DTable::build(&lat, &slope, &v)?;
            let ok = table.multisets_equal && table.sum_identity;
            if json_mode {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "table": &table,
                        "byClass": table.by_class
                            .iter()
                            .map(|(s, d)| json!({"class": s, "d": format!("{d}/1")}))
                            .collect::<Vec<_>>(),
                        "multisetsEqual": table.multisets_equal,
                        "sumIdentity": table.sum_identity,
                    }))
                    .unwrap()
                );
            } else {
                println!("slope {slope}, knot {knot}");
                println!("by residue: {}", table.by_residue.join(" "));
                println!("by class:");
                for (s, d) in &table.by_class {
                    println!("  {s}  ->  {d}");
                }
                println!(
                    "multisets equal: {} | sum identity: {}",
                    table.multisets_equal, table.sum_identity
                );
            }
            Ok(if ok { 0 } else { 1 })
        }

        Cmd::Recover { slope, sigma } => {
            let slope: PosRational = slope.parse()?;
            let sigma = parse_sigma(sigma)?;
            let cm = ChangemakerLattice::build(&slope, &sigma)?;
            let torsion = cm.recover_torsion()?;
            let alex = torsion.to_alex()?;
            let sb = cm.stable_bound();
            if json_mode {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "slope": slope.to_string(),
                        "sigma": cm.sigma(),
                        "torsion": torsion.values(),
                        "alexander": {"coeffs": alex.coeffs(), "genus": alex.genus()},
                        "genus": cm.genus(),
                        "stableBound": {
                            "b": sb.b,
                            "emptyStable": sb.empty_stable,
                            "fourGPlus4": sb.four_g_plus_4,
                        },
                        "gram": gram_json(cm.gram()),
                    }))
                    .unwrap()
                );
            } else {
                println!("slope {slope}, sigma {:?}", cm.sigma());
                println!("torsion   {:?}", torsion.values());
                println!("alexander {}", render_alex(&alex));
                println!("genus     {}", cm.genus());
                println!(
                    "B         {}{}  (4g+4 = {})",
                    sb.b,
                    if sb.empty_stable {
                        " (empty stable tuple)"
                    } else {
                        ""
                    },
                    sb.four_g_plus_4
                );
            }
            Ok(0)
        }

        Cmd::Uniq {
            slope,
            sigma,
            rank_bound,
        } => {
            let slope: PosRational = slope.parse()?;
            let sigma = parse_sigma(sigma)?;
            let cm = ChangemakerLattice::build(&slope, &sigma)?;
            let sb = cm.stable_bound();
            let hypothesis_met = slope.cmp_rational(&slt_core::linalg::big_rat(sb.b)).is_ge();
            let found = uniqueness_search(&slope, cm.gram(), *rank_bound)?;
            if json_mode {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "slope": slope.to_string(),
                        "sigma": cm.sigma(),
                        "gram": gram_json(cm.gram()),
                        "structures": found.iter().map(|v| v.sigma.clone()).collect::<Vec<_>>(),
                        "uniquenessHypothesisMet": hypothesis_met,
                        "b": sb.b,
                    }))
                    .unwrap()
                );
            } else {
                println!(
                    "slope {slope}, sigma {:?}: {} isometric structure(s)",
                    cm.sigma(),
                    found.len()
                );
                for v in &found {
                    println!("  {:?}", v.sigma);
                }
                if !hypothesis_met {
                    println!(
                        "note: uniqueness hypothesis not met (slope {slope} < B = {})",
                        sb.b
                    );
                }
            }
            Ok(0)
        }

        Cmd::Charslope { r, s, slope } => {
            let tk = TorusKnot::new(*r, *s)?;
            let slope: PosRational = slope.parse()?;
            let verdict = slt_core::slope_verdict(&tk, &slope);
            if json_mode {
                println!("{}", serde_json::to_string_pretty(&verdict).unwrap());
            } else {
                let th = &verdict.thresholds;
                println!("T({r},{s}) at slope {slope}");
                println!(
                    "thresholds: characterizing {}  2g-1 {}  4g+4 {}  quartic {}",
                    pretty_rat(&th.characterizing),
                    th.two_g_minus_1,
                    th.four_g_plus_4,
                    pretty_rat(&th.quartic)
                );
                println!(
                    "zones: lspace {}  sharp-base {}  alex-unique {}  quartic {}  characterizing {}",
                    verdict.lspace,
                    verdict.sharp_base,
                    verdict.alex_unique_zone,
                    verdict.quartic_zone,
                    verdict.characterizing_zone
                );
                if let Some(chain) = &verdict.satellite_chain {
                    println!(
                        "satellite exclusion chain: {}",
                        if chain.holds { "holds" } else { "FAILS" }
                    );
                    for line in &chain.lines {
                        let rel = if line.index == 3 { "=" } else { ">=" };
                        println!(
                            "  line {}: {} {rel} {}  {}",
                            line.index,
                            pretty_rat(&line.lhs),
                            pretty_rat(&line.rhs),
                            if line.ok { "ok" } else { "FAILED" }
                        );
                    }
                }
            }
            Ok(0)
        }

        Cmd::Verify {
            suite,
            pmax,
            qmax,
            nmax,
            quick,
            seed,
        } => {
            let seed = seed.unwrap_or(verify::DEFAULT_SEED);
            let cap = brute_bound();
            let scale = |dflt: i64, quick_val: i64| if *quick { quick_val } else { dflt };
            let pmax_counts = pmax.unwrap_or(scale(150, 40)).min(cap as i64);
            let pmax_short = pmax.unwrap_or(scale(60, 20)).min(cap as i64);
            let pmax_grid = pmax.unwrap_or(scale(120, 40)).min(cap as i64);
            let qmax_counts = qmax.unwrap_or(scale(20, 6));
            let qmax_grid = qmax.unwrap_or(scale(6, 3));
            let nmax = nmax.unwrap_or(scale(30, 12));

            let mut reports = Vec::new();
            let all = suite == "all";
            if all || suite == "counts" {
                reports.push(verify::counts_suite(pmax_counts, qmax_counts)?);
            }
            if all || suite == "shortness" {
                reports.push(verify::shortness_suite(
                    pmax_short,
                    qmax_counts,
                    200_000,
                    seed,
                )?);
            }
            if all || suite == "multiset" {
                reports.push(verify::multiset_suite(pmax_grid, qmax_grid)?);
            }
            if all || suite == "sum" {
                reports.push(verify::sum_suite(pmax_grid, qmax_grid)?);
            }
            if all || suite == "dp-oracle" {
                reports.push(verify::dp_oracle_suite(nmax, 6)?);
            }
            if all || suite == "extension" {
                reports.push(verify::extension_suite()?);
            }
            if all || suite == "identity" {
                reports.push(verify::identity_suite(seed)?);
            }
            if all || suite == "pipeline" {
                let extra = if *quick { 2 } else { 10 };
                reports.push(verify::pipeline_suite_spanning(20, extra)?);
            }
            if reports.is_empty() {
                eprintln!("error: unknown suite {suite:?}");
                return Ok(2);
            }

            let ok = reports.iter().all(|r| r.ok());
            if json_mode {
                println!("{}", serde_json::to_string_pretty(&reports).unwrap());
            } else {
                for r in &reports {
                    let seed_note = r.seed.map(|s| format!(" (seed {s})")).unwrap_or_default();
                    println!(
                        "suite {:<10} {:>8} checks  {}{}",
                        r.name,
                        r.checks,
                        if r.ok() { "ok" } else { "FAILED" },
                        seed_note
                    );
                    for f in r.failures.iter().take(10) {
                        println!("    {f}");
                    }
                }
            }
            Ok(if ok { 0 } else { 1 })
        }
    }
}

fn parse_sigma(s: &str) -> Result<Vec<i64>, Error> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<i64>()
                .map_err(|_| Error::Precondition(format!("cannot parse sigma entry {x:?}")))
        })
        .collect()
}

fn parse_knot(spec: &str) -> Result<VhSeq, Error> {
    if spec == "unknot" {
        return Ok(VhSeq::zero());
    }
    if let Some(args) = spec.strip_prefix("torus:") {
        let parts: Vec<i64> = args
            .split(',')
            .map(|x| {
                x.trim()
                    .parse()
                    .map_err(|_| Error::Precondition(format!("cannot parse torus spec {spec:?}")))
            })
            .collect::<Result<_, _>>()?;
        if parts.len() != 2 {
            return Err(Error::Precondition("torus spec needs r,s".into()));
        }
        let poly = AlexPoly::torus(parts[0], parts[1])?;
        return Ok(VhSeq::from_torsion(&poly.torsion()));
    }
    if let Some(args) = spec.strip_prefix("alex:") {
        let coeffs: Vec<i64> = args
            .split(',')
            .map(|x| {
                x.trim().parse().map_err(|_| {
                    Error::Precondition(format!("cannot parse alexander spec {spec:?}"))
                })
            })
            .collect::<Result<_, _>>()?;
        let poly = AlexPoly::new(coeffs)?;
        return Ok(VhSeq::from_torsion(&poly.torsion()));
    }
    if let Some(args) = spec.strip_prefix("v:") {
        let v: Vec<i64> = args
            .split(',')
            .map(|x| {
                x.trim()
                    .parse()
                    .map_err(|_| Error::Precondition(format!("cannot parse V spec {spec:?}")))
            })
            .collect::<Result<_, _>>()?;
        return VhSeq::from_raw(v);
    }
    Err(Error::Precondition(format!("unknown knot spec {spec:?}")))
}

/// Renders the symmetric form, highest term first: `a_i` multiplies
/// `t^i + t^-i`.
fn render_alex(poly: &AlexPoly) -> String {
    let mut s = String::new();
    for (i, &a) in poly.coeffs().iter().enumerate().rev() {
        if a == 0 {
            continue;
        }
        let sign = match (a > 0, s.is_empty()) {
            (true, true) => "",
            (true, false) => " + ",
            (false, true) => "-",
            (false, false) => " - ",
        };
        let body = match i {
            0 => "1".to_string(),
            1 => "(t + t^-1)".to_string(),
            i => format!("(t^{i} + t^-{i})"),
        };
        s.push_str(sign);
        s.push_str(&body);
    }
    s
}

fn gram_json(gram: &[Vec<i64>]) -> serde_json::Value {
    let rank = gram.len();
    let flat: Vec<i64> = gram.iter().flatten().copied().collect();
    json!({"rank": rank, "entries": flat})
}

fn join_vecs<'a>(it: impl Iterator<Item = &'a slt_core::lattice::CharVec>) -> String {
    it.map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
}

/// Text mode appends a decimal approximation in parentheses; JSON keeps the
/// exact `num/den` string only.
fn pretty_rat(s: &str) -> String {
    match s.split_once('/') {
        Some((n, "1")) => n.to_string(),
        Some((n, d)) => {
            let (nf, df): (f64, f64) = (n.parse().unwrap_or(f64::NAN), d.parse().unwrap_or(1.0));
            format!("{s} ({:.4})", nf / df)
        }
        None => s.to_string(),
    }
}
