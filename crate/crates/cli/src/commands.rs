//! One function per subcommand. Each returns the report and whether every
//! check it ran held.

use std::fs;
use std::path::Path;

use morrey_core::blocks::{block_norm_with, BlockNormCertificate};
use morrey_core::duality::{
    associate_norm, duality_gap_report, second_associate_check, BlockOracle, MorreyOracle, NormOracle, Verdict,
};
use morrey_core::gallery::{
    example_functional_sequence, example_non_dense, p5_failure_table, power_function_norm, StepFunction1D,
};
use morrey_core::hausdorff::{
    check_capacity_bound, check_capacity_bound_exact, content_1d, content_1d_brute_force, content_upper_nd,
    ContentQuery, IntervalSet,
};
use morrey_core::propcheck::{check_axioms, fatou_harness, p5_growth_table};
use morrey_core::{morrey_norm, CellSet, CubeFamily, Error, ExponentPair, GridDomain, GridFunction, SolverOptions};
use serde::Serialize;
use serde_json::{json, Value};

use crate::{
    AxiomArgs, BlockNormArgs, Command, DualityArgs, DualityCheck, Exponents, FatouArgs, GalleryArgs, GalleryKind,
    HausdorffArgs, NormArgs, OracleChoice,
};

type Outcome = Result<(Value, bool), String>;

fn read_json(path: &Path) -> Result<Value, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{} is not JSON: {e}", path.display()))
}

fn read_grid(path: &Path) -> Result<GridFunction, String> {
    GridFunction::from_json(&read_json(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn block_pair(pq: &Exponents) -> Result<ExponentPair, String> {
    ExponentPair::new(pq.p, pq.q).map_err(|e| e.to_string())
}

fn to_value(x: impl Serialize) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn report(command: &str, params: impl Serialize, seed: u64, quantity: &str, result: Value, passed: bool) -> Outcome {
    let mut parameters = to_value(params);
    parameters["seed"] = json!(seed);
    Ok((
        json!({
            "command": command,
            "parameters": parameters,
            "quantity": quantity,
            "result": result,
            "passed": passed,
        }),
        passed,
    ))
}

pub fn run(command: &Command, seed: u64) -> Outcome {
    match command {
        Command::Norm(a) => norm(a, seed),
        Command::Blocknorm(a) => blocknorm(a, seed),
        Command::Duality(a) => duality(a, seed),
        Command::Hausdorff(a) => hausdorff(a, seed),
        Command::Axioms(a) => axioms(a, seed),
        Command::Fatou(a) => fatou(a, seed),
        Command::Gallery(a) => gallery(a, seed),
    }
}

fn norm(a: &NormArgs, seed: u64) -> Outcome {
    let f = read_grid(&a.input)?;
    let pq = ExponentPair::morrey(a.pq.p, a.pq.q).map_err(|e| e.to_string())?;
    let m = morrey_norm(&f, &pq, a.family.into());
    let result = json!({
        "value": m.value,
        "argmax": m.argmax,
        "family": m.family,
        "quasi": m.quasi,
    });
    report(
        "norm",
        a,
        seed,
        "sup over cubes Q of |Q|^(1/p-1/q) (int_Q |f|^q)^(1/q)",
        result,
        true,
    )
}

fn certificate_json(c: &BlockNormCertificate, converged: bool) -> Value {
    let terms: Vec<Value> = c
        .decomposition
        .terms
        .iter()
        .map(|t| json!({"lambda": t.lambda, "cube": t.block.support(), "values": t.block.values()}))
        .collect();
    json!({
        "value": c.midpoint(),
        "upper": c.upper,
        "lower": c.lower,
        "gap": c.gap,
        "converged": converged,
        "rounds": c.rounds,
        "active_cubes": c.active_cubes,
        "witness": c.witness,
        "decomposition": terms,
    })
}

fn blocknorm(a: &BlockNormArgs, seed: u64) -> Outcome {
    let f = read_grid(&a.input)?;
    let pq = block_pair(&a.pq)?;
    let opts = SolverOptions {
        tol: a.tol,
        family: a.family.into(),
        max_rounds: a.max_rounds,
        ..SolverOptions::default()
    };
    let quantity = "block norm: least total weight of a block decomposition, bracketed by a Morrey-ball witness";
    match block_norm_with(&f, &pq, &opts) {
        Ok(c) => report("blocknorm", a, seed, quantity, certificate_json(&c, true), true),
        Err(Error::NonConvergence { best, .. }) => {
            report("blocknorm", a, seed, quantity, certificate_json(&best, false), false)
        }
        Err(e) => Err(e.to_string()),
    }
}

fn oracle(choice: OracleChoice, pq: ExponentPair, family: CubeFamily, tol: f64) -> Box<dyn NormOracle> {
    match choice {
        OracleChoice::Morrey => Box::new(MorreyOracle { pq, family }),
        OracleChoice::Block => Box::new(BlockOracle { pq, family, tol }),
    }
}

fn duality(a: &DualityArgs, seed: u64) -> Outcome {
    let f = read_grid(&a.input)?;
    let pq = block_pair(&a.pq)?;
    let family: CubeFamily = a.family.into();
    let rho = oracle(a.oracle, pq, family, (a.tol * 1e-3).max(1e-9));
    match a.check {
        DualityCheck::Associate => {
            let c = associate_norm(&f, rho.as_ref(), a.tol).map_err(|e| e.to_string())?;
            let ok = c.gap().is_none_or(|g| g <= a.tol) || c.lower_only;
            report(
                "duality",
                a,
                seed,
                "associate norm sup{<f, g> : rho(g) <= 1}",
                to_value(&c),
                ok,
            )
        }
        DualityCheck::SecondAssociate => {
            let r = second_associate_check(&f, rho.as_ref(), a.tol).map_err(|e| e.to_string())?;
            let ok = r.verdict != Verdict::Fail;
            report(
                "duality",
                a,
                seed,
                "second associate norm against the norm itself",
                to_value(&r),
                ok,
            )
        }
        DualityCheck::Gap => {
            let r = duality_gap_report(&f, &pq, family, a.tol).map_err(|e| e.to_string())?;
            let ok = r.gap <= a.tol && r.associate_identity_error <= 1e-10;
            report(
                "duality",
                a,
                seed,
                "block norm gap and block associate against the Morrey norm",
                to_value(&r),
                ok,
            )
        }
    }
}

enum SetInput {
    Intervals(IntervalSet),
    Cells(CellSet),
}

fn read_set(path: &Path) -> Result<SetInput, String> {
    let v = read_json(path)?;
    let tag = |e: Error| format!("{}: {e}", path.display());
    if v.is_array() {
        IntervalSet::from_json(&v).map(SetInput::Intervals).map_err(tag)
    } else {
        CellSet::from_json(&v).map(SetInput::Cells).map_err(tag)
    }
}

fn hausdorff(a: &HausdorffArgs, seed: u64) -> Outcome {
    let set = read_set(&a.set)?;
    let query = match a.r {
        Some(r) => ContentQuery::new(a.d, r),
        None => ContentQuery::unrestricted(a.d),
    }
    .map_err(|e| e.to_string())?;
    let mut passed = true;
    let mut result = json!({});
    let intervals = match &set {
        SetInput::Intervals(e) => Some(e.clone()),
        SetInput::Cells(c) if c.domain().dimension() == 1 => {
            Some(IntervalSet::from_cell_set(c).map_err(|e| e.to_string())?)
        }
        SetInput::Cells(_) => None,
    };
    match &intervals {
        Some(e) => {
            let content = content_1d(e, &query).map_err(|e| e.to_string())?;
            result["content"] = json!(content);
            result["content_kind"] = json!("exact");
            result["components"] = json!(e.len());
            if a.brute_force {
                let bf = content_1d_brute_force(e, &query).map_err(|e| e.to_string())?;
                result["brute_force"] = json!(bf);
                passed &= bf == content;
            }
        }
        None => {
            if a.r.is_some() {
                return Err("cover scales apply to interval sets only".into());
            }
            let SetInput::Cells(c) = &set else { unreachable!() };
            let up = content_upper_nd(c, a.d).map_err(|e| e.to_string())?;
            result["content"] = json!(up.upper);
            result["content_kind"] = json!("upper");
            result["cover"] = to_value(&up.cover);
        }
    }
    if let (Some(input), Some(p), Some(q)) = (&a.input, a.p, a.q) {
        let pq = ExponentPair::new(p, q).map_err(|e| e.to_string())?;
        let f = read_json(input)?;
        let cap = match &set {
            SetInput::Intervals(e) => {
                let step = StepFunction1D::from_json(&f).map_err(|e| e.to_string())?;
                check_capacity_bound_exact(&step, e, &pq)
            }
            SetInput::Cells(c) => {
                let g = GridFunction::from_json(&f).map_err(|e| e.to_string())?;
                check_capacity_bound(&g, c, &pq)
            }
        }
        .map_err(|e| e.to_string())?;
        passed &= cap.holds;
        result["capacity"] = to_value(&cap);
    }
    report(
        "hausdorff",
        a,
        seed,
        "Hausdorff content inf Sum |Q_j|^d over covers by cubes of side below r",
        result,
        passed,
    )
}

fn axioms(a: &AxiomArgs, seed: u64) -> Outcome {
    let pq = block_pair(&a.pq)?;
    let domain = GridDomain::new(a.dimension, a.cells, a.cell_side).map_err(|e| e.to_string())?;
    let rho = oracle(a.oracle, pq, CubeFamily::All, a.tol);
    let rep = check_axioms(rho.as_ref(), domain, a.trials, seed).map_err(|e| e.to_string())?;
    let mut passed = rep.passed;
    let mut result = to_value(&rep);
    if let Some(groups) = a.p5_groups {
        let table = p5_growth_table(a.pq.p, a.pq.q, groups, 100.0).map_err(|e| e.to_string())?;
        passed &= table.strictly_increasing;
        result["p5_growth"] = to_value(&table);
    }
    report(
        "axioms",
        a,
        seed,
        "function-norm axioms P1 to P5 on random samples",
        result,
        passed,
    )
}

fn fatou(a: &FatouArgs, seed: u64) -> Outcome {
    let f = read_grid(&a.input)?;
    let pq = block_pair(&a.pq)?;
    let rep = fatou_harness(&pq, &f, a.steps, a.tol).map_err(|e| e.to_string())?;
    let passed = rep.passed;
    report(
        "fatou",
        a,
        seed,
        "block norms of monotone truncations against the limit",
        to_value(&rep),
        passed,
    )
}

fn gallery(a: &GalleryArgs, seed: u64) -> Outcome {
    let (p, q) = (a.pq.p, a.pq.q);
    let err = |e: Error| e.to_string();
    let (quantity, result) = match a.kind {
        GalleryKind::P5Failure => {
            let rows = p5_failure_table(p, q, a.groups, a.alpha).map_err(err)?;
            (
                "int_E f against the Morrey norm for spread-out groups of intervals",
                json!({ "rows": rows }),
            )
        }
        GalleryKind::NonDense => {
            let (e, rep) = example_non_dense(p, q, a.k).map_err(err)?;
            let mut v = to_value(&rep);
            v["rows"] = v["tails"].take();
            v.as_object_mut().expect("object").remove("tails");
            v["set"] = e.to_json();
            ("tail norms of an indicator that compactly supported functions miss", v)
        }
        GalleryKind::FunctionalSeq => {
            let f = match &a.input {
                Some(path) => StepFunction1D::from_json(&read_json(path)?).map_err(err)?,
                None => StepFunction1D::indicator(&example_non_dense(p, q, a.k).map_err(err)?.0).map_err(err)?,
            };
            let values = example_functional_sequence(&f, p, q, a.k).map_err(err)?;
            let rows: Vec<Value> = values
                .iter()
                .enumerate()
                .map(|(i, v)| json!({"k": i + 1, "integral": v}))
                .collect();
            (
                "integrals of f over the intervals of the example set",
                json!({ "rows": rows }),
            )
        }
        GalleryKind::Power => {
            let rows = power_function_norm(p, q, a.levels).map_err(err)?;
            (
                "Morrey norm of grid approximants of |x|^(-1/p)",
                json!({ "rows": rows }),
            )
        }
    };
    report("gallery", a, seed, quantity, result, true)
}
