//! The Morrey norm
//! `||f|| = max_Q |Q|^{1/p-1/q} (int_Q |f|^q)^{1/q}` over a cube family,
//! reported together with the cube that attains it. The argmax doubles as a
//! separation oracle for the block-norm solver: the cube it returns is the
//! most violated constraint of the Morrey unit ball.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{arg_err, Result};
use crate::grid::{enumerate_cubes, Cube, CubeFamily, ExponentPair, GridFunction, PrefixTable};
use crate::numeric::rel_diff;

/// Cube streams longer than this are scored on the rayon pool.
const PARALLEL_THRESHOLD: usize = 8192;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MorreyResult {
    pub value: f64,
    pub argmax: Cube,
    pub family: CubeFamily,
    /// Set when `q < 1`: the functional is then only a quasi-norm.
    pub quasi: bool,
}

/// Score of one cube from a prefix table of `|f|^q`.
pub fn cube_score(f: &GridFunction, table: &PrefixTable, pq: &ExponentPair, cube: &Cube) -> f64 {
    let domain = f.domain();
    let mass = table.cube_sum(cube) * domain.cell_measure();
    if mass == 0.0 {
        return 0.0;
    }
    cube.measure(domain).powf(pq.scale_exponent()) * mass.powf(1.0 / pq.q())
}

/// Scores of every cube of `family`, in enumeration order.
pub fn cube_scores(f: &GridFunction, pq: &ExponentPair, family: CubeFamily) -> Vec<(Cube, f64)> {
    let cubes = enumerate_cubes(f.domain(), family);
    let table = f.power_table(pq.q());
    let score = |c: &Cube| (*c, cube_score(f, &table, pq, c));
    if cubes.len() > PARALLEL_THRESHOLD {
        cubes.par_iter().map(score).collect()
    } else {
        cubes.iter().map(score).collect()
    }
}

pub fn morrey_norm(f: &GridFunction, pq: &ExponentPair, family: CubeFamily) -> MorreyResult {
    let scores = cube_scores(f, pq, family);
    // First strict maximum in enumeration order.
    let (argmax, value) = scores
        .iter()
        .fold(scores[0], |best, &(c, s)| if s > best.1 { (c, s) } else { best });
    MorreyResult {
        value,
        argmax,
        family,
        quasi: pq.is_quasi(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingReport {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    /// `||f||` with inner exponent `r`.
    pub norm_r: f64,
    /// `||f||` with inner exponent `q`.
    pub norm_q: f64,
    /// Global `L^p` norm, reported when `q = p`.
    pub lp_norm: Option<f64>,
    /// Largest per-cube excess of the `r`-score over the `q`-score, relative
    /// to `norm_q`.
    pub max_violation: f64,
    pub holds: bool,
}

/// Checks the Hölder embedding `||f||_{p,r} <= ||f||_{p,q}` cube by cube, and
/// `||f||_{p,p} = ||f||_{L^p}` when `q = p`.
pub fn check_embedding(f: &GridFunction, p: f64, q: f64, r: f64) -> Result<EmbeddingReport> {
    if !(r > 0.0 && r < q && q <= p && p.is_finite()) {
        return arg_err(format!(
            "embedding needs 0 < r < q <= p < inf, got p = {p}, q = {q}, r = {r}"
        ));
    }
    let pq = ExponentPair::morrey(p, q)?;
    let pr = ExponentPair::morrey(p, r)?;
    let with_q = cube_scores(f, &pq, CubeFamily::All);
    let with_r = cube_scores(f, &pr, CubeFamily::All);
    let norm_q = with_q.iter().fold(0.0f64, |m, &(_, s)| m.max(s));
    let norm_r = with_r.iter().fold(0.0f64, |m, &(_, s)| m.max(s));
    let scale = norm_q.max(f64::MIN_POSITIVE);
    let max_violation = with_q
        .iter()
        .zip(&with_r)
        .map(|(&(_, sq), &(_, sr))| (sr - sq).max(0.0) / scale)
        .fold(0.0, f64::max);
    let lp_norm = (q == p).then(|| f.lp_norm(p));
    let lp_ok = lp_norm.is_none_or(|l| rel_diff(l, norm_q) <= 1e-10);
    Ok(EmbeddingReport {
        p,
        q,
        r,
        norm_r,
        norm_q,
        lp_norm,
        max_violation,
        holds: max_violation <= 1e-10 && norm_r <= norm_q * (1.0 + 1e-12) && lp_ok,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DilationReport {
    pub k: u32,
    pub original: f64,
    pub dilated: f64,
    pub expected_ratio: f64,
    pub observed_ratio: f64,
    pub rel_error: f64,
    pub holds: bool,
}

/// Checks `||f(2^k .)|| = 2^{-kn/p} ||f||`. The dilate is represented
/// exactly by keeping the cell values and shrinking the cell side by `2^k`,
/// which maps the grid cube family onto itself.
pub fn dilation_check(f: &GridFunction, pq: &ExponentPair, k: u32) -> Result<DilationReport> {
    if k == 0 {
        return arg_err("dilation exponent must be positive");
    }
    let domain = f.domain();
    let h = domain.cell_side() / 2f64.powi(k as i32);
    if !h.is_normal() || !domain.cell_measure().is_normal() || !h.powi(domain.dimension() as i32).is_normal() {
        return arg_err(format!("dilation by 2^{k} is not representable at this cell size"));
    }
    let dilated_domain = domain.with_cell_side(h)?;
    let g = GridFunction::new(dilated_domain, f.values().to_vec())?;
    let original = morrey_norm(f, pq, CubeFamily::All).value;
    let dilated = morrey_norm(&g, pq, CubeFamily::All).value;
    let expected_ratio = 2f64.powf(-(k as f64) * domain.dimension() as f64 / pq.p());
    let (observed_ratio, rel_error) = if original == 0.0 {
        (expected_ratio, if dilated == 0.0 { 0.0 } else { f64::INFINITY })
    } else {
        let ratio = dilated / original;
        (ratio, rel_diff(ratio, expected_ratio))
    };
    Ok(DilationReport {
        k,
        original,
        dilated,
        expected_ratio,
        observed_ratio,
        rel_error,
        holds: rel_error <= 1e-10,
    })
}
