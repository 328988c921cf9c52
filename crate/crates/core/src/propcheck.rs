//! Randomized checks of the function-norm axioms, the monotone truncation
//! harness for the block norm, and probes of absolute continuity and of the
//! distance to simple functions.
//!
//! The axioms, for a norm `rho` on nonnegative functions:
//! - P1: `rho(f) = 0` iff `f = 0`, `rho(c f) = |c| rho(f)`, and the triangle
//!   inequality (waived for quasi-norms);
//! - P2: `|g| <= |f|` implies `rho(g) <= rho(f)`;
//! - P3: `0 <= f_k` increasing to `f` implies `rho(f_k)` increasing to
//!   `rho(f)`, sampled along chains of length eight;
//! - P4: `rho(chi_E) < inf` for sets of finite measure;
//! - P5: `int_E |f| <= C_E rho(f)` for sets of finite measure.
//!
//! Oracles with certificate bounds are checked interval-wise: a check fails
//! only when the certified intervals contradict it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::blocks::{block_norm, relative_gap};
use crate::duality::{associate_norm, NormOracle};
use crate::error::{arg_err, Error, Result};
use crate::gallery::{morrey_norm_exact_1d, p5_failure_table, StepFunction1D};
use crate::grid::{CellSet, Cube, CubeFamily, ExponentPair, GridDomain, GridFunction};
use crate::morrey::morrey_norm;
use crate::numeric::rel_diff;
use crate::rational::Rational;

/// Relative slack for checks that hold exactly in exact arithmetic.
pub const AXIOM_TOL: f64 = 1e-12;

/// Chain length for the monotone-convergence check.
pub const CHAIN_LENGTH: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Axiom {
    P1,
    P2,
    P3,
    P4,
    P5,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Outcome {
    Pass,
    Inconclusive,
    Fail,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AxiomTally {
    pub checked: usize,
    pub failed: usize,
    pub inconclusive: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomFailure {
    pub trial: usize,
    pub axiom: Axiom,
    pub detail: String,
    /// The sampled function(s) of the trial.
    pub witness: serde_json::Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub cells_per_side: usize,
    pub measure: f64,
    /// `rho(chi_E)` for `E` the whole box.
    pub rho_indicator: f64,
    /// Certified lower bound on the best constant `C_E = rho'(chi_E)`.
    pub c_e_lower: f64,
    pub c_e_upper: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub oracle: String,
    pub trials: usize,
    pub seed: u64,
    pub p1: AxiomTally,
    pub p2: AxiomTally,
    pub p3: AxiomTally,
    pub p4: AxiomTally,
    pub p5: AxiomTally,
    /// Largest `int_E |f| / rho(f)` seen over the trials.
    pub c_e_sampled_max: f64,
    pub growth: Vec<GrowthRow>,
    pub failures: Vec<AxiomFailure>,
    pub passed: bool,
}

struct Check {
    axiom: Axiom,
    outcome: Outcome,
    detail: String,
}

struct TrialResult {
    checks: Vec<Check>,
    c_e: f64,
    witness: serde_json::Value,
}

fn le(a: (f64, f64), b: (f64, f64)) -> Outcome {
    if a.0 <= b.1 * (1.0 + AXIOM_TOL) + f64::MIN_POSITIVE {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

fn approx_eq(a: (f64, f64), b: (f64, f64)) -> Outcome {
    if le(a, b) == Outcome::Pass && le(b, a) == Outcome::Pass {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

fn scale_bounds(c: f64, b: (f64, f64)) -> (f64, f64) {
    (c * b.0, c * b.1)
}

fn add_bounds(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 + b.0, a.1 + b.1)
}

/// A random function: dense signed, sparse heavy-tailed, or a scaled
/// indicator, times a random order of magnitude.
fn sample_function(domain: GridDomain, rng: &mut ChaCha8Rng) -> Result<GridFunction> {
    let kind = rng.gen_range(0..3);
    let scale = 10f64.powf(rng.gen_range(-3.0..3.0));
    let n = domain.cell_count();
    let values: Vec<f64> = (0..n)
        .map(|_| match kind {
            0 => rng.gen_range(-1.0..1.0),
            1 => {
                if rng.gen_bool(0.7) {
                    0.0
                } else {
                    (6.0 * rng.gen::<f64>()).exp() - 1.0
                }
            }
            _ => {
                if rng.gen_bool(0.5) {
                    1.0
                } else {
                    0.0
                }
            }
        })
        .map(|v| v * scale)
        .collect();
    GridFunction::new(domain, values)
}

fn sample_set(domain: GridDomain, rng: &mut ChaCha8Rng) -> Result<CellSet> {
    let density = rng.gen_range(0.05..1.0);
    let mut members: Vec<usize> = (0..domain.cell_count()).filter(|_| rng.gen_bool(density)).collect();
    if members.is_empty() {
        members.push(rng.gen_range(0..domain.cell_count()));
    }
    CellSet::new(domain, members)
}

fn run_trial(oracle: &dyn NormOracle, domain: GridDomain, seed: u64, trial: usize) -> Result<TrialResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let f = sample_function(domain, &mut rng)?;
    let g = sample_function(domain, &mut rng)?;
    let e = sample_set(domain, &mut rng)?;
    let c: f64 = rng.gen_range(-4.0..4.0);
    let mut checks = Vec::new();
    let mut push = |axiom, outcome, detail: String| checks.push(Check { axiom, outcome, detail });

    // P1.
    let zero = oracle.bounds(&GridFunction::zeros(domain))?;
    push(
        Axiom::P1,
        if zero == (0.0, 0.0) {
            Outcome::Pass
        } else {
            Outcome::Fail
        },
        format!("rho(0) = {zero:?}"),
    );
    let rf = oracle.bounds(&f)?;
    let definite = if f.is_zero() || rf.0 > 0.0 {
        Outcome::Pass
    } else if rf.1 > 0.0 {
        Outcome::Inconclusive
    } else {
        Outcome::Fail
    };
    push(Axiom::P1, definite, format!("f nonzero but rho(f) = {rf:?}"));
    let rcf = oracle.bounds(&f.scale(c)?)?;
    push(
        Axiom::P1,
        approx_eq(rcf, scale_bounds(c.abs(), rf)),
        format!("rho({c} f) = {rcf:?}, |c| rho(f) = {:?}", scale_bounds(c.abs(), rf)),
    );
    if !oracle.is_quasi() {
        let rg = oracle.bounds(&g)?;
        let rsum = oracle.bounds(&f.add(&g)?)?;
        push(
            Axiom::P1,
            le(rsum, add_bounds(rf, rg)),
            format!(
                "rho(f + g) = {rsum:?} exceeds rho(f) + rho(g) = {:?}",
                add_bounds(rf, rg)
            ),
        );
    }

    // P2.
    let damp: Vec<f64> = (0..domain.cell_count()).map(|_| rng.gen::<f64>()).collect();
    let smaller = f.zip_with(&GridFunction::new(domain, damp)?, |a, u| a * u)?;
    let rs = oracle.bounds(&smaller)?;
    push(
        Axiom::P2,
        le(rs, rf),
        format!("rho(u f) = {rs:?} exceeds rho(f) = {rf:?}"),
    );

    // P3.
    let abs = f.abs();
    let mut levels: Vec<Vec<f64>> = (0..domain.cell_count())
        .map(|_| {
            let mut l: Vec<f64> = (0..CHAIN_LENGTH - 1).map(|_| rng.gen::<f64>()).collect();
            l.sort_by(f64::total_cmp);
            l.push(1.0);
            l
        })
        .collect();
    let mut chain = Vec::with_capacity(CHAIN_LENGTH);
    for k in 0..CHAIN_LENGTH {
        let values = abs.values().iter().zip(&mut levels).map(|(v, l)| v * l[k]).collect();
        chain.push(oracle.bounds(&GridFunction::new(domain, values)?)?);
    }
    let rabs = oracle.bounds(&abs)?;
    let monotone = chain.windows(2).all(|w| le(w[0], w[1]) == Outcome::Pass);
    let limit = approx_eq(*chain.last().expect("nonempty"), rabs);
    push(
        Axiom::P3,
        if monotone && limit == Outcome::Pass {
            Outcome::Pass
        } else {
            Outcome::Fail
        },
        format!("chain values {chain:?}, rho(|f|) = {rabs:?}"),
    );

    // P4.
    let rchi = oracle.bounds(&e.indicator())?;
    push(
        Axiom::P4,
        if rchi.1.is_finite() && rchi.0 > 0.0 {
            Outcome::Pass
        } else {
            Outcome::Fail
        },
        format!("rho(chi_E) = {rchi:?}"),
    );

    // P5.
    let integral: f64 = e.members().iter().map(|&m| f.values()[m].abs()).sum::<f64>() * domain.cell_measure();
    let (c_e, p5) = if integral == 0.0 {
        (0.0, Outcome::Pass)
    } else if rf.0 > 0.0 {
        (integral / rf.0, Outcome::Pass)
    } else if rf.1 > 0.0 {
        (integral / rf.1, Outcome::Inconclusive)
    } else {
        (f64::INFINITY, Outcome::Fail)
    };
    push(Axiom::P5, p5, format!("int_E |f| = {integral}, rho(f) = {rf:?}"));

    Ok(TrialResult {
        checks,
        c_e,
        witness: serde_json::json!({ "f": f.to_json(), "g": g.to_json(), "c": c, "set": e.to_json() }),
    })
}

/// `rho(chi_E)` and the certified associate `rho'(chi_E)` for `E` the whole
/// box, on boxes of `1, 2, 4, ...` cells per side up to the given domain.
pub fn growth_table(oracle: &dyn NormOracle, domain: GridDomain) -> Result<Vec<GrowthRow>> {
    let mut rows = Vec::new();
    let mut n = 1;
    while n <= domain.cells_per_side() {
        let d = GridDomain::new(domain.dimension(), n, domain.cell_side())?;
        let chi = GridFunction::constant(d, 1.0);
        let rho = oracle.bounds(&chi)?;
        let assoc = associate_norm(&chi, oracle, 1e-3)?;
        rows.push(GrowthRow {
            cells_per_side: n,
            measure: d.side_length().powi(d.dimension() as i32),
            rho_indicator: 0.5 * (rho.0 + rho.1),
            c_e_lower: assoc.lower,
            c_e_upper: assoc.upper,
        });
        n *= 2;
    }
    Ok(rows)
}

/// Samples `trials` functions and sets on `domain` and checks P1 to P5.
/// Every trial draws from its own stream of a ChaCha generator seeded with
/// `seed`, so any single trial replays on its own.
pub fn check_axioms(oracle: &dyn NormOracle, domain: GridDomain, trials: usize, seed: u64) -> Result<AxiomReport> {
    if trials == 0 {
        return arg_err("at least one trial is needed");
    }
    let results: Vec<Result<TrialResult>> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(oracle, domain, seed, t))
        .collect();
    let mut tallies: [AxiomTally; 5] = Default::default();
    let mut failures = Vec::new();
    let mut c_e_max: f64 = 0.0;
    for (trial, r) in results.into_iter().enumerate() {
        let r = r?;
        c_e_max = c_e_max.max(r.c_e);
        for check in r.checks {
            let tally = &mut tallies[check.axiom as usize];
            tally.checked += 1;
            match check.outcome {
                Outcome::Pass => {}
                Outcome::Inconclusive => tally.inconclusive += 1,
                Outcome::Fail => {
                    tally.failed += 1;
                    failures.push(AxiomFailure {
                        trial,
                        axiom: check.axiom,
                        detail: check.detail,
                        witness: r.witness.clone(),
                    });
                }
            }
        }
    }
    let growth = growth_table(oracle, domain)?;
    let [p1, p2, p3, p4, p5] = tallies;
    Ok(AxiomReport {
        oracle: oracle.name(),
        trials,
        seed,
        p1,
        p2,
        p3,
        p4,
        p5,
        c_e_sampled_max: c_e_max,
        growth,
        passed: failures.is_empty(),
        failures,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct P5GrowthRow {
    pub groups: usize,
    pub integral: f64,
    pub norm: f64,
    /// `int_E f / ||f||`, a lower bound for the best `C_E`.
    pub c_e_lower: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct P5GrowthTable {
    pub rows: Vec<P5GrowthRow>,
    pub strictly_increasing: bool,
}

/// Empirical P5 constants on the sets of [`crate::gallery::example_p5_failure`]
/// for `1..=groups` groups.
pub fn p5_growth_table(p: f64, q: f64, groups: usize, alpha: f64) -> Result<P5GrowthTable> {
    let rows: Vec<P5GrowthRow> = p5_failure_table(p, q, groups, alpha)?
        .into_iter()
        .map(|r| P5GrowthRow {
            groups: r.groups,
            integral: r.integral,
            norm: r.norm,
            c_e_lower: r.ratio,
        })
        .collect();
    let strictly_increasing = rows.windows(2).all(|w| w[1].c_e_lower > w[0].c_e_lower);
    Ok(P5GrowthTable {
        rows,
        strictly_increasing,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FatouRow {
    pub k: usize,
    pub cube_side: usize,
    pub cap: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FatouReport {
    pub steps: usize,
    pub tol: f64,
    pub rows: Vec<FatouRow>,
    pub target_lower: f64,
    pub target_upper: f64,
    /// No certified decrease between consecutive truncations.
    pub monotone: bool,
    /// Every truncation stays below `(1 + tol)` times the target.
    pub bounded: bool,
    /// The last truncation is within `tol` of the target.
    pub converged: bool,
    pub violations: Vec<String>,
    pub passed: bool,
}

fn certified(f: &GridFunction, pq: &ExponentPair, tol: f64) -> Result<(f64, f64)> {
    match block_norm(f, pq, tol, CubeFamily::All) {
        Ok(c) => Ok((c.lower, c.upper)),
        Err(Error::NonConvergence { best, .. }) => Ok((best.lower, best.upper)),
        Err(e) => Err(e),
    }
}

/// Block norms of `f_k = min(f, k max(f) / steps) chi_{Q_k}`, `k = 1..=steps`,
/// where `Q_k` is the centered grid cube of side `ceil(k N / steps)`; the
/// sequence increases pointwise to `f`.
pub fn fatou_harness(pq: &ExponentPair, f: &GridFunction, steps: usize, tol: f64) -> Result<FatouReport> {
    if !f.is_nonnegative() {
        return arg_err("truncation harness needs a nonnegative function");
    }
    if steps == 0 {
        return arg_err("at least one step is needed");
    }
    let domain = *f.domain();
    let n = domain.cells_per_side();
    let fmax = f.max_abs();
    let target = certified(f, pq, tol)?;
    let mut rows = Vec::with_capacity(steps);
    for k in 1..=steps {
        let side = (k * n).div_ceil(steps).max(1);
        let start = (n - side) / 2;
        let cube = Cube::new(&domain, &vec![start; domain.dimension()], side)?;
        let cap = fmax * k as f64 / steps as f64;
        let mut values = vec![0.0; domain.cell_count()];
        for c in cube.cells(&domain) {
            values[c] = f.values()[c].min(cap);
        }
        let (lower, upper) = certified(&GridFunction::new(domain, values)?, pq, tol)?;
        rows.push(FatouRow {
            k,
            cube_side: side,
            cap,
            lower,
            upper,
        });
    }
    let mut violations = Vec::new();
    for w in rows.windows(2) {
        if w[1].upper < w[0].lower * (1.0 - AXIOM_TOL) {
            violations.push(format!(
                "step {} drops below step {}: {} < {}",
                w[1].k, w[0].k, w[1].upper, w[0].lower
            ));
        }
    }
    let monotone = violations.is_empty();
    let mut bounded = true;
    for r in &rows {
        if r.lower > target.1 * (1.0 + tol) {
            bounded = false;
            violations.push(format!("step {} exceeds the target: {} > {}", r.k, r.lower, target.1));
        }
    }
    let last = rows.last().expect("steps >= 1");
    let mid = 0.5 * (last.lower + last.upper);
    let target_mid = 0.5 * (target.0 + target.1);
    let converged = target_mid == 0.0 && mid == 0.0 || rel_diff(mid, target_mid) <= tol;
    if !converged {
        violations.push(format!("last step {mid} is not within {tol} of {target_mid}"));
    }
    Ok(FatouReport {
        steps,
        tol,
        target_lower: target.0,
        target_upper: target.1,
        monotone,
        bounded,
        converged,
        passed: violations.is_empty(),
        violations,
        rows,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AbsContinuityReport {
    pub norms: Vec<f64>,
    pub final_norm: f64,
    /// The last norm is at most `1e-12` times the norm of `f`.
    pub vanishes: bool,
}

fn continuity_report(norms: Vec<f64>, reference: f64) -> AbsContinuityReport {
    let final_norm = norms.last().copied().unwrap_or(0.0);
    AbsContinuityReport {
        vanishes: final_norm <= 1e-12 * reference,
        final_norm,
        norms,
    }
}

/// `||f chi_{E_k}||` along decreasing sets `E_1 ⊇ E_2 ⊇ ...`.
pub fn abs_continuity_probe(f: &GridFunction, pq: &ExponentPair, sets: &[CellSet]) -> Result<AbsContinuityReport> {
    for (k, w) in sets.windows(2).enumerate() {
        if !w[1].members().iter().all(|&m| w[0].contains(m)) {
            return arg_err(format!("set {} is not contained in set {k}", k + 1));
        }
    }
    let norms = sets
        .iter()
        .map(|e| Ok(morrey_norm(&f.restrict(e)?, pq, CubeFamily::All).value))
        .collect::<Result<Vec<_>>>()?;
    Ok(continuity_report(norms, morrey_norm(f, pq, CubeFamily::All).value))
}

/// `||f chi_{[R_k, inf)}||` with the exact engine, for increasing cutoffs.
pub fn abs_continuity_probe_exact(
    f: &StepFunction1D,
    pq: &ExponentPair,
    cutoffs: &[Rational],
) -> Result<AbsContinuityReport> {
    if cutoffs.windows(2).any(|w| w[0] > w[1]) {
        return arg_err("cutoffs must increase");
    }
    let norms = cutoffs
        .iter()
        .map(|r| Ok(morrey_norm_exact_1d(&f.tail_from(r)?, pq)?.value))
        .collect::<Result<Vec<_>>>()?;
    Ok(continuity_report(norms, morrey_norm_exact_1d(f, pq)?.value))
}

#[derive(Clone, Debug, Serialize)]
pub struct SimpleApprox {
    pub budget: usize,
    /// Levels actually used by the approximant.
    pub levels: usize,
    /// `||f - s||` for the approximant `s`: an upper bound on the distance
    /// from `f` to simple functions with `budget` levels.
    pub distance: f64,
}

/// Quantizes the distinct nonzero values of `f` into `budget` groups of
/// consecutive values with near-equal counts, each replaced by the midpoint
/// of its range.
pub fn simple_approx_distance(f: &GridFunction, pq: &ExponentPair, budget: usize) -> Result<SimpleApprox> {
    if budget == 0 {
        return arg_err("budget must be at least one level");
    }
    let mut distinct: Vec<f64> = f.values().iter().copied().filter(|&v| v != 0.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() <= budget {
        return Ok(SimpleApprox {
            budget,
            levels: distinct.len(),
            distance: 0.0,
        });
    }
    let m = distinct.len();
    let group_of = |i: usize| i * budget / m;
    let mut reps = vec![(f64::INFINITY, f64::NEG_INFINITY); budget];
    for (i, &v) in distinct.iter().enumerate() {
        let r = &mut reps[group_of(i)];
        r.0 = r.0.min(v);
        r.1 = r.1.max(v);
    }
    let s = f.map(|v| {
        if v == 0.0 {
            0.0
        } else {
            let i = distinct.binary_search_by(|x| x.total_cmp(&v)).expect("value is listed");
            let (lo, hi) = reps[group_of(i)];
            0.5 * (lo + hi)
        }
    })?;
    Ok(SimpleApprox {
        budget,
        levels: budget,
        distance: morrey_norm(&f.sub(&s)?, pq, CubeFamily::All).value,
    })
}

/// Distance from `f` to its first `budget` nonzero pieces, with the exact
/// engine.
pub fn simple_approx_distance_exact(f: &StepFunction1D, pq: &ExponentPair, budget: usize) -> Result<SimpleApprox> {
    if budget == 0 {
        return arg_err("budget must be at least one piece");
    }
    let kept = f.leading_pieces(budget)?;
    let levels = kept.values().iter().filter(|&&v| v != 0.0).count();
    Ok(SimpleApprox {
        budget,
        levels,
        distance: morrey_norm_exact_1d(&f.sub(&kept)?, pq)?.value,
    })
}

/// Relative gap of a certified interval, for reporting.
pub fn interval_gap(bounds: (f64, f64)) -> f64 {
    relative_gap(bounds.1, bounds.0)
}
