//! Acceptance run: one line per criterion, nonzero exit if any fails.

mod common;

use std::time::Instant;

use common::*;
use morrey_core::blocks::{finite_decomposition, regroup_dyadic};
use morrey_core::duality::{block_associate_norm, MorreyOracle};
use morrey_core::gallery::{
    example_non_dense, example_p5_failure, morrey_norm_exact_1d, p5_failure_set, power_function_limit,
    power_function_norm, StepFunction1D,
};
use morrey_core::hausdorff::{
    check_capacity_bound, check_capacity_bound_exact, content_1d, content_1d_brute_force, ContentQuery, IntervalSet,
};
use morrey_core::propcheck::{check_axioms, fatou_harness, p5_growth_table};
use morrey_core::rational::{self, Rational};
use morrey_core::{block_norm, morrey_norm, CellSet, CubeFamily, GridDomain, GridFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn block_norm_gap() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let d = if k < 10 {
            random_domain(&mut rng, 1, 64)
        } else {
            random_domain(&mut rng, 2, 8)
        };
        let f = random_nonnegative(&mut rng, d);
        let cert = block_norm(&f, &pq(), 1e-3, CubeFamily::All).map_err(|e| format!("function {k}: {e}"))?;
        verify_certificate(&f, &cert, 2.0, 4.0 / 3.0).map_err(|e| format!("function {k}: {e}"))?;
        let gap = (cert.upper - cert.lower) / cert.lower;
        ensure(gap <= 1e-3, || format!("function {k}: gap {gap:.3e}"))?;
        worst = worst.max(gap);
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs <= 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!("worst gap {worst:.2e}, {secs:.1} s"))
}

fn associate_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let dim = rng.gen_range(1..=2);
        let d = random_domain(&mut rng, dim, if dim == 1 { 16 } else { 4 });
        let g = random_signed(&mut rng, d);
        let assoc = block_associate_norm(&g, &pq(), CubeFamily::All).map_err(|e| e.to_string())?;
        let morrey = morrey_norm(&g, &pq(), CubeFamily::All).value;
        let brute = brute_morrey(&g, 2.0, 4.0 / 3.0);
        let rel = ((assoc - morrey).abs() / morrey).max((assoc - brute).abs() / brute);
        ensure(rel <= 1e-10, || {
            format!("g {k}: associate {assoc}, Morrey {morrey}, direct {brute}")
        })?;
        worst = worst.max(rel);
    }
    Ok(format!("worst relative difference {worst:.1e}"))
}

fn hand_values() -> Outcome {
    let two = GridDomain::interval(2, 2.0).map_err(|e| e.to_string())?;
    let ones = GridFunction::constant(two, 1.0);
    let m = morrey_norm(&ones, &pq(), CubeFamily::All).value;
    ensure((m - 2f64.sqrt()).abs() <= 1e-14, || {
        format!("Morrey norm of (1,1) is {m}")
    })?;
    let b = block_norm(&ones, &pq(), 1e-4, CubeFamily::All).map_err(|e| e.to_string())?;
    ensure((b.midpoint() - 2f64.sqrt()).abs() <= 1e-3, || {
        format!("block norm of (1,1) is {}", b.midpoint())
    })?;
    let d = GridDomain::interval(8, 2.0).map_err(|e| e.to_string())?;
    let chi = GridFunction::from_fn(d, |c| if c[0] < 4 { 1.0 } else { 0.0 }).map_err(|e| e.to_string())?;
    let c = block_norm(&chi, &pq(), 1e-4, CubeFamily::All).map_err(|e| e.to_string())?;
    ensure((c.midpoint() - 1.0).abs() <= 1e-3, || {
        format!("block norm of chi[0,1) is {}", c.midpoint())
    })?;
    Ok(format!(
        "Morrey {m:.15}, block {:.6}, indicator {:.6}",
        b.midpoint(),
        c.midpoint()
    ))
}

fn power_function() -> Outcome {
    let limit = power_function_limit(2.0, 4.0 / 3.0);
    let closed = 6f64.powf(0.75) * 2f64.powf(-0.25);
    ensure((limit - closed).abs() <= 1e-13, || format!("limit {limit} vs {closed}"))?;
    ensure((limit - 3.2237).abs() <= 5e-5, || format!("limit {limit} vs 3.2237"))?;
    let rows = power_function_norm(2.0, 4.0 / 3.0, 10).map_err(|e| e.to_string())?;
    let last = rows.last().ok_or("no rows")?;
    ensure(last.deficit.abs() <= 0.02, || {
        format!("level 10 deficit {}", last.deficit)
    })?;
    ensure(last.centered, || {
        format!("level 10 argmax {:?} is off center", last.argmax)
    })?;
    ensure(rows.iter().all(|r| r.value <= limit * (1.0 + 1e-12)), || {
        "an approximant exceeds the limit".into()
    })?;
    Ok(format!("level 10 value {:.5} against {limit:.5}", last.value))
}

fn p5_example() -> Outcome {
    let mut summary = Vec::new();
    for j in 1..=6 {
        let (f, rep) = example_p5_failure(2.0, 4.0 / 3.0, j, 100.0).map_err(|e| e.to_string())?;
        let e = p5_failure_set(j, &rational::integer(100)).map_err(|e| e.to_string())?;
        let integral = f.integral_abs_over(&e).map_err(|e| e.to_string())?;
        ensure(integral == j as f64, || format!("J = {j}: integral {integral}"))?;
        ensure(rep.integral == j as f64, || {
            format!("J = {j}: reported integral {}", rep.integral)
        })?;
        ensure((rep.norm - 1.0).abs() <= 1e-12, || {
            format!("J = {j}: norm {}", rep.norm)
        })?;
        // Each piece alone is a lower bound for the norm.
        for (a, b, v) in f.pieces() {
            let len = rational::to_f64(&(b - a));
            let score = len.powf(0.5 - 0.75) * (v.abs().powf(4.0 / 3.0) * len).powf(0.75);
            ensure(score <= rep.norm * (1.0 + 1e-12), || {
                format!("J = {j}: a piece scores {score}")
            })?;
        }
        let c_e = integral / rep.norm;
        ensure(c_e >= j as f64 * (1.0 - 1e-12), || format!("J = {j}: C_E >= {c_e}"))?;
        summary.push(format!("{c_e:.3}"));
    }
    Ok(format!("C_E lower bounds {}", summary.join(" ")))
}

fn non_dense() -> Outcome {
    let mut norms = Vec::new();
    let mut worst_tail = f64::INFINITY;
    for k in 1..=20 {
        let (_, rep) = example_non_dense(2.0, 4.0 / 3.0, k).map_err(|e| e.to_string())?;
        for row in rep.tails.iter().filter(|r| r.full_interval_beyond) {
            ensure(row.tail_norm >= 1.0 - 1e-9, || {
                format!("K = {k}: tail beyond {} is {}", row.cutoff, row.tail_norm)
            })?;
            worst_tail = worst_tail.min(row.tail_norm);
        }
        norms.push(rep.norm);
    }
    let lo = norms.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = norms.iter().copied().fold(0.0, f64::max);
    ensure(hi <= 1.05 * lo, || format!("norms range over [{lo}, {hi}]"))?;
    Ok(format!("smallest tail {worst_tail:.12}, norms in [{lo:.6}, {hi:.6}]"))
}

fn random_interval_set(rng: &mut ChaCha8Rng, m: usize) -> IntervalSet {
    let mut x = rational::integer(0);
    let mut parts = Vec::new();
    for _ in 0..m {
        x += Rational::new(rng.gen_range(1..40), 8);
        let len = Rational::new(rng.gen_range(1..40), 8);
        parts.push((x, x + len));
        x += len;
    }
    IntervalSet::new(parts).unwrap()
}

fn hausdorff() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut compared = 0;
    for m in 1..=10 {
        for _ in 0..5 {
            let e = random_interval_set(&mut rng, m);
            for d in [0.25, 0.5, 1.0] {
                for r in [0.5, 3.0, f64::INFINITY] {
                    let q = ContentQuery::new(d, r).map_err(|e| e.to_string())?;
                    let dp = content_1d(&e, &q).map_err(|e| e.to_string())?;
                    let bf = content_1d_brute_force(&e, &q).map_err(|e| e.to_string())?;
                    ensure(dp == bf, || format!("m = {m}, d = {d}, r = {r}: {dp} vs {bf}"))?;
                    compared += 1;
                }
            }
        }
    }
    let mut bounds = 0;
    // Gallery sets with their own functions.
    for j in 1..=4 {
        let (f, _) = example_p5_failure(2.0, 4.0 / 3.0, j, 100.0).map_err(|e| e.to_string())?;
        let e = p5_failure_set(j, &rational::integer(100)).map_err(|e| e.to_string())?;
        let rep = check_capacity_bound_exact(&f, &e, &pq()).map_err(|e| e.to_string())?;
        ensure(rep.holds, || format!("example set J = {j}: {rep:?}"))?;
        bounds += 1;
    }
    for k in [1, 5, 10] {
        let (e, _) = example_non_dense(2.0, 4.0 / 3.0, k).map_err(|e| e.to_string())?;
        let chi = StepFunction1D::indicator(&e).map_err(|e| e.to_string())?;
        let rep = check_capacity_bound_exact(&chi, &e, &pq()).map_err(|e| e.to_string())?;
        ensure(rep.holds, || format!("non-dense set K = {k}: {rep:?}"))?;
        bounds += 1;
    }
    // Random step functions and grid cases in one and two dimensions.
    for _ in 0..20 {
        let m = rng.gen_range(1..=6);
        let e = random_interval_set(&mut rng, m);
        let f = StepFunction1D::indicator(&e).map_err(|e| e.to_string())?;
        let scaled = StepFunction1D::new(
            f.breakpoints().to_vec(),
            f.values().iter().map(|v| v * rng.gen_range(0.1..5.0)).collect(),
        )
        .map_err(|e| e.to_string())?;
        let rep = check_capacity_bound_exact(&scaled, &e, &pq()).map_err(|e| e.to_string())?;
        ensure(rep.holds, || format!("random step function: {rep:?}"))?;
        bounds += 1;
    }
    for k in 0..30 {
        let dim = 1 + k % 2;
        let d = random_domain(&mut rng, dim, if dim == 1 { 32 } else { 8 });
        let f = random_signed(&mut rng, d);
        let members = (0..d.cell_count()).filter(|_| rng.gen_bool(0.4)).collect();
        let e = CellSet::new(d, members).map_err(|e| e.to_string())?;
        let rep = check_capacity_bound(&f, &e, &pq()).map_err(|e| e.to_string())?;
        ensure(rep.holds, || format!("random grid case {k}: {rep:?}"))?;
        bounds += 1;
    }
    Ok(format!("{compared} content comparisons, {bounds} capacity bounds"))
}

fn regrouping() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for k in 0..50 {
        let dim = 1 + k % 2;
        let d = random_domain(&mut rng, dim, if dim == 1 { 16 } else { 4 });
        let dec = random_decomposition(&mut rng, d, &pq(), 2.0);
        let out = regroup_dyadic(&dec).map_err(|e| format!("decomposition {k}: {e}"))?;
        let before = synthesize_direct(&dec, &d);
        let after = synthesize_direct(&out, &d);
        let scale = before.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        ensure(sup_diff(&before, &after) <= 1e-12 * scale, || {
            format!("decomposition {k} synthesizes differently")
        })?;
        for t in &out.terms {
            ensure(block_ok(&t.block, 2.0, 4.0 / 3.0), || {
                format!("decomposition {k}: bad block")
            })?;
            let side = t.block.support().side();
            let third = side / 3.0;
            ensure(third.log2().fract() == 0.0, || {
                format!("decomposition {k}: support side {side} is not 3 * 2^j")
            })?;
            ensure(
                t.block
                    .support()
                    .lower()
                    .iter()
                    .all(|lo| ((lo + third) / third).fract() == 0.0),
                || format!("decomposition {k}: support is not the triple of a dyadic cube"),
            )?;
        }
        let bound = 2.0 * 3f64.powi(dim as i32);
        ensure(out.weight() <= bound * (1.0 + 1e-12), || {
            format!("decomposition {k}: weight {}", out.weight())
        })?;
    }
    Ok("50 decompositions".into())
}

fn finite_decompositions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let dim = 1 + k % 2;
        let d = random_domain(&mut rng, dim, if dim == 1 { 16 } else { 4 });
        let f = random_nonnegative(&mut rng, d);
        let fd = finite_decomposition(&f, &pq(), 1e-2, None).map_err(|e| format!("function {k}: {e}"))?;
        let reference = block_norm(&f, &pq(), 1e-6, CubeFamily::All).map_err(|e| e.to_string())?;
        let rebuilt = synthesize_direct(&fd.decomposition, &d);
        ensure(sup_diff(&rebuilt, f.values()) <= 1e-9 * f.max_abs(), || {
            format!("function {k}: does not rebuild f")
        })?;
        ensure(
            fd.decomposition
                .terms
                .iter()
                .all(|t| block_ok(&t.block, 2.0, 4.0 / 3.0)),
            || format!("function {k}: bad block"),
        )?;
        let ratio = fd.weight / reference.lower;
        ensure(ratio <= 2.0 * (1.0 + 1e-2), || {
            format!("function {k}: weight ratio {ratio}")
        })?;
        worst = worst.max(ratio);
    }
    Ok(format!("worst weight ratio {worst:.4}"))
}

fn fatou() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for k in 0..10 {
        let dim = 1 + k % 2;
        let d = random_domain(&mut rng, dim, if dim == 1 { 16 } else { 4 });
        let f = random_nonnegative(&mut rng, d);
        let rep = fatou_harness(&pq(), &f, 8, 1e-3).map_err(|e| e.to_string())?;
        ensure(rep.passed, || format!("function {k}: {:?}", rep.violations))?;
    }
    Ok("10 functions".into())
}

fn axioms() -> Outcome {
    let oracle = MorreyOracle {
        pq: pq(),
        family: CubeFamily::All,
    };
    let d = GridDomain::interval(16, 0.5).map_err(|e| e.to_string())?;
    let rep = check_axioms(&oracle, d, 1000, 42).map_err(|e| e.to_string())?;
    for (name, t) in [("P1", &rep.p1), ("P2", &rep.p2), ("P3", &rep.p3)] {
        ensure(t.failed == 0 && t.inconclusive == 0, || format!("{name}: {t:?}"))?;
    }
    for (name, t) in [("P4", &rep.p4), ("P5", &rep.p5)] {
        ensure(t.failed == 0, || format!("{name}: {t:?}"))?;
    }
    ensure(rep.c_e_sampled_max.is_finite(), || "sampled C_E is infinite".into())?;
    ensure(rep.growth.iter().all(|g| g.rho_indicator.is_finite()), || {
        "infinite indicator norm".into()
    })?;
    let table = p5_growth_table(2.0, 4.0 / 3.0, 6, 100.0).map_err(|e| e.to_string())?;
    ensure(table.strictly_increasing, || format!("growth table {:?}", table.rows))?;
    // The example set's indicator keeps a finite norm while C_E grows.
    let e = p5_failure_set(6, &rational::integer(100)).map_err(|e| e.to_string())?;
    let chi = StepFunction1D::indicator(&e).map_err(|e| e.to_string())?;
    let chi_norm = morrey_norm_exact_1d(&chi, &pq()).map_err(|e| e.to_string())?.value;
    ensure(chi_norm.is_finite(), || "indicator norm is infinite".into())?;
    Ok(format!(
        "1000 trials, sampled C_E up to {:.3}, example C_E {:.3} -> {:.3}",
        rep.c_e_sampled_max,
        table.rows[0].c_e_lower,
        table.rows.last().map(|r| r.c_e_lower).unwrap_or(0.0)
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("block norm certificates close to 1e-3", block_norm_gap),
        ("block associate equals the Morrey norm", associate_identity),
        ("hand values", hand_values),
        ("power function converges with centered argmax", power_function),
        ("example with unbounded P5 constants", p5_example),
        ("indicator tails stay at distance one", non_dense),
        ("content DP and capacity bound", hausdorff),
        ("dyadic regrouping", regrouping),
        ("finite decompositions", finite_decompositions),
        ("monotone truncations", fatou),
        ("Morrey oracle axioms", axioms),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.2} s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} ({secs:.2} s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
