//! `(p', q')`-blocks, block decompositions and the block norm.
//!
//! A block is a function supported in a cube `Q` with
//! `||b||_{q'} <= |Q|^{1/p-1/q}`; the block norm of `f` is the least
//! `Sum_k lambda_k` over decompositions `f = Sum_k lambda_k b_k`. Weights are
//! kept nonnegative with signs folded into the block values.

mod solver;

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{arg_err, Error, Result};
use crate::grid::{Cube, ExponentPair, GridDomain, GridFunction, Region};
use crate::numeric::pairwise_sum;

pub use solver::{block_norm, block_norm_with, SolverOptions};

/// Admissibility slack accepted by [`is_block`].
pub const BLOCK_SLACK_TOL: f64 = 1e-12;

/// `(Sum |v|^s h^n)^{1/s}` with a fixed reduction order.
pub(crate) fn ls_norm(values: &[f64], s: f64, cell_measure: f64) -> f64 {
    let terms: Vec<f64> = values.iter().map(|v| v.abs().powf(s)).collect();
    (pairwise_sum(&terms) * cell_measure).powf(1.0 / s)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlockCheck {
    pub admissible: bool,
    /// `|Q|^{1/p-1/q} - ||b||_{q'}`.
    pub slack: f64,
}

/// Tests the size condition of a block supported in `support`, using the
/// uncropped measure of `support`.
pub fn is_block(b: &GridFunction, support: &Region, pq: &ExponentPair) -> Result<BlockCheck> {
    pq.require_block_regime()?;
    check_support(b.domain(), b.values(), support)?;
    let norm = ls_norm(b.values(), pq.q_conj(), b.domain().cell_measure());
    let slack = support.measure().powf(pq.scale_exponent()) - norm;
    Ok(BlockCheck {
        admissible: slack >= -BLOCK_SLACK_TOL,
        slack,
    })
}

fn check_support(domain: &GridDomain, values: &[f64], support: &Region) -> Result<()> {
    if support.dimension() != domain.dimension() {
        return arg_err("support region and domain differ in dimension");
    }
    if let Some(cell) = (0..values.len()).find(|&c| values[c] != 0.0 && !support.contains_cell(domain, c)) {
        return arg_err(format!(
            "block is nonzero at cell {cell} outside its support {:?} side {}",
            support.lower(),
            support.side()
        ));
    }
    Ok(())
}

/// A function on the grid together with the cube it is declared to live in.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Block {
    #[serde(skip)]
    domain: GridDomain,
    support: Region,
    values: Vec<f64>,
}

impl Block {
    /// Checks that `values` vanish outside `support`; the size condition is
    /// checked separately by [`Block::check`].
    pub fn new(domain: GridDomain, support: Region, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.cell_count() {
            return arg_err("block values do not match the domain");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return arg_err("block values must be finite");
        }
        check_support(&domain, &values, &support)?;
        Ok(Self {
            domain,
            support,
            values,
        })
    }

    pub fn on_cube(domain: GridDomain, cube: &Cube, values: Vec<f64>) -> Result<Self> {
        cube.check_inside(&domain)?;
        Self::new(domain, cube.to_region(&domain), values)
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn support(&self) -> &Region {
        &self.support
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn to_function(&self) -> GridFunction {
        GridFunction::new(self.domain, self.values.clone()).expect("block values are finite")
    }

    pub fn lq_norm(&self, s: f64) -> f64 {
        ls_norm(&self.values, s, self.domain.cell_measure())
    }

    pub fn check(&self, pq: &ExponentPair) -> Result<BlockCheck> {
        is_block(&self.to_function(), &self.support, pq)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Term {
    pub lambda: f64,
    pub block: Block,
}

/// `Sum_k lambda_k b_k` with `lambda_k >= 0`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Decomposition {
    pub terms: Vec<Term>,
}

impl Decomposition {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, lambda: f64, block: Block) -> Result<()> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return arg_err(format!("weights must be finite and nonnegative, got {lambda}"));
        }
        self.terms.push(Term { lambda, block });
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Sum_k lambda_k`.
    pub fn weight(&self) -> f64 {
        let lambdas: Vec<f64> = self.terms.iter().map(|t| t.lambda).collect();
        pairwise_sum(&lambdas)
    }

    /// Smallest admissibility slack over all terms, or `None` if empty.
    pub fn min_slack(&self, pq: &ExponentPair) -> Result<Option<f64>> {
        let mut worst: Option<f64> = None;
        for t in &self.terms {
            let s = t.block.check(pq)?.slack;
            worst = Some(worst.map_or(s, |w| w.min(s)));
        }
        Ok(worst)
    }

    pub fn all_blocks_admissible(&self, pq: &ExponentPair) -> Result<bool> {
        Ok(self.min_slack(pq)?.is_none_or(|s| s >= -BLOCK_SLACK_TOL))
    }
}

/// Pointwise `Sum_k lambda_k b_k` over the terms in order.
pub fn synthesize(d: &Decomposition, domain: &GridDomain) -> Result<GridFunction> {
    let mut values = vec![0.0; domain.cell_count()];
    for t in &d.terms {
        if t.block.domain() != domain {
            return arg_err("decomposition mixes blocks from different domains");
        }
        for (acc, &b) in values.iter_mut().zip(t.block.values()) {
            *acc += t.lambda * b;
        }
    }
    GridFunction::new(*domain, values)
}

/// Block norm certificate pair: `lower <= ||f||_B <= upper`.
#[derive(Clone, Debug, Serialize)]
pub struct BlockNormCertificate {
    /// Weight of `decomposition`.
    pub upper: f64,
    /// `<f, witness>` with `witness` in the Morrey unit ball.
    pub lower: f64,
    /// `(upper - lower) / max(lower, eps)`.
    pub gap: f64,
    pub witness: GridFunction,
    pub decomposition: Decomposition,
    pub rounds: usize,
    pub active_cubes: usize,
}

impl BlockNormCertificate {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.upper + self.lower)
    }
}

pub(crate) fn relative_gap(upper: f64, lower: f64) -> f64 {
    ((upper - lower) / lower.max(f64::EPSILON)).max(0.0)
}

/// Rewrites a decomposition of `g >= |f|` into one of `f` with the same
/// weights: each block is multiplied by `f / g` (with `0/0 = 0`).
pub fn dominate_transfer(f: &GridFunction, g: &GridFunction, dg: &Decomposition) -> Result<Decomposition> {
    f.domain().check_same(g.domain())?;
    let domain = *f.domain();
    if !g.is_nonnegative() {
        return arg_err("dominating function must be nonnegative");
    }
    let scale = g.max_abs().max(f.max_abs()).max(f64::MIN_POSITIVE);
    if let Some(c) = (0..f.values().len()).find(|&c| f.values()[c].abs() > g.values()[c] + 1e-12 * scale) {
        return arg_err(format!("|f| exceeds g at cell {c}"));
    }
    let synth = synthesize(dg, &domain)?;
    let mismatch = synth
        .values()
        .iter()
        .zip(g.values())
        .map(|(s, v)| (s - v).abs())
        .fold(0.0, f64::max);
    if mismatch > 1e-9 * scale {
        return arg_err(format!("decomposition does not synthesize g (off by {mismatch:e})"));
    }
    let ratio: Vec<f64> = f
        .values()
        .iter()
        .zip(synth.values())
        .map(|(&fv, &sv)| if sv == 0.0 { 0.0 } else { (fv / sv).clamp(-1.0, 1.0) })
        .collect();
    let mut out = Decomposition::new();
    for t in &dg.terms {
        let values = t.block.values().iter().zip(&ratio).map(|(b, r)| b * r).collect();
        out.push(t.lambda, Block::new(domain, *t.block.support(), values)?)?;
    }
    Ok(out)
}

/// A dyadic cube `2^level (index + [0,1)^n)` in absolute coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DyadicCube {
    pub level: i32,
    pub index: Vec<i64>,
}

impl DyadicCube {
    pub fn side(&self) -> f64 {
        2f64.powi(self.level)
    }

    pub fn region(&self) -> Region {
        let s = self.side();
        let lower: Vec<f64> = self.index.iter().map(|&i| i as f64 * s).collect();
        Region::new(&lower, s).expect("dyadic cube is a valid region")
    }

    /// The concentric cube with three times the side.
    pub fn tripled(&self) -> Region {
        let s = self.side();
        let lower: Vec<f64> = self.index.iter().map(|&i| (i - 1) as f64 * s).collect();
        Region::new(&lower, 3.0 * s).expect("tripled dyadic cube is a valid region")
    }
}

/// The dyadic cube assigned to a support `R`: side `2^e <= side(R) < 2^{e+1}`
/// and containing the center of `R`, so that `R` lies in its triple.
pub fn anchor_dyadic(support: &Region) -> DyadicCube {
    let s = support.side();
    let mut level = s.log2().floor() as i32;
    while 2f64.powi(level) > s {
        level -= 1;
    }
    while 2f64.powi(level + 1) <= s {
        level += 1;
    }
    let side = 2f64.powi(level);
    let index = support
        .lower()
        .iter()
        .map(|&lo| ((lo + 0.5 * s) / side).floor() as i64)
        .collect();
    DyadicCube { level, index }
}

/// Regroups a decomposition by dyadic cubes: every block is assigned the
/// dyadic cube `Q` from [`anchor_dyadic`], and the terms sharing `Q` merge into
/// one term with weight `3^n Sum lambda_k` supported in `3Q`. The output
/// synthesizes the same function and weighs at most `3^n` times the input.
pub fn regroup_dyadic(d: &Decomposition) -> Result<Decomposition> {
    let mut order: Vec<DyadicCube> = Vec::new();
    let mut groups: HashMap<DyadicCube, Vec<usize>> = HashMap::new();
    for (k, t) in d.terms.iter().enumerate() {
        let domain = t.block.domain();
        let support = t.block.support();
        let box_side = domain.side_length();
        let center_ok = support
            .lower()
            .iter()
            .all(|&lo| lo + 0.5 * support.side() >= -box_side && lo + 0.5 * support.side() < 2.0 * box_side);
        if !center_ok {
            return Err(Error::Domain(format!(
                "block support {:?} lies outside the padded domain",
                support.lower()
            )));
        }
        let q = anchor_dyadic(support);
        if !q.tripled().contains_region(support) {
            return Err(Error::Domain(format!(
                "no dyadic cube of side {} triples over support {:?}",
                q.side(),
                support.lower()
            )));
        }
        groups
            .entry(q.clone())
            .or_insert_with(|| {
                order.push(q.clone());
                Vec::new()
            })
            .push(k);
    }
    let mut out = Decomposition::new();
    for q in order {
        let members = &groups[&q];
        let first = &d.terms[members[0]].block;
        let domain = *first.domain();
        let dim = domain.dimension() as i32;
        let mass: Vec<f64> = members.iter().map(|&k| d.terms[k].lambda).collect();
        let mass = pairwise_sum(&mass);
        if mass == 0.0 {
            continue;
        }
        let lambda = 3f64.powi(dim) * mass;
        let mut values = vec![0.0; domain.cell_count()];
        for &k in members {
            let t = &d.terms[k];
            if t.block.domain() != &domain {
                return arg_err("decomposition mixes blocks from different domains");
            }
            for (acc, &b) in values.iter_mut().zip(t.block.values()) {
                *acc += t.lambda * b;
            }
        }
        for v in &mut values {
            *v /= lambda;
        }
        out.push(lambda, Block::new(domain, q.tripled(), values)?)?;
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct FiniteDecomposition {
    pub decomposition: Decomposition,
    pub weight: f64,
    /// Certified bounds on the block norm of the input.
    pub norm_lower: f64,
    pub norm_upper: f64,
    /// Number of leading terms kept before the tail was folded, per sign part.
    pub kept_terms: Vec<usize>,
    /// Weight given to the folded tail block, per sign part.
    pub tail_lambdas: Vec<f64>,
}

/// A finite decomposition of `f` whose weight is within `2 (1 + tol)` of the
/// block norm for nonnegative `f` (`8 (1 + tol)` for signed `f`, split into
/// positive and negative parts). Terms of a near-optimal decomposition are
/// kept in decreasing order of weight; the remainder is folded into a single
/// block on the enclosing cube `q0`, priced as `|Q0|^{1/q-1/p} ||tail||_{q'}`.
pub fn finite_decomposition(
    f: &GridFunction,
    pq: &ExponentPair,
    tol: f64,
    q0: Option<Cube>,
) -> Result<FiniteDecomposition> {
    pq.require_block_regime()?;
    if !(tol > 0.0) {
        return arg_err("tolerance must be positive");
    }
    let domain = *f.domain();
    let q0 = q0.unwrap_or_else(|| Cube::full(&domain));
    q0.check_inside(&domain)?;
    if let Some(c) = (0..f.values().len()).find(|&c| f.values()[c] != 0.0 && !q0.contains_cell(&domain, c)) {
        return arg_err(format!("f is nonzero at cell {c}, outside the enclosing cube"));
    }
    let whole = block_norm(f, pq, tol, crate::grid::CubeFamily::All)?;
    let mut out = FiniteDecomposition {
        decomposition: Decomposition::new(),
        weight: 0.0,
        norm_lower: whole.lower,
        norm_upper: whole.upper,
        kept_terms: Vec::new(),
        tail_lambdas: Vec::new(),
    };
    if f.is_zero() {
        return Ok(out);
    }
    let parts: Vec<(f64, GridFunction)> = if f.is_nonnegative() {
        vec![(1.0, f.clone())]
    } else {
        vec![(1.0, f.map(|v| v.max(0.0))?), (-1.0, f.map(|v| (-v).max(0.0))?)]
    };
    for (sign, part) in parts {
        if part.is_zero() {
            continue;
        }
        let cert = if f.is_nonnegative() {
            whole.clone()
        } else {
            block_norm(&part, pq, tol, crate::grid::CubeFamily::All)?
        };
        let (kept, tail_lambda) = fold_tail(&cert.decomposition, &part, &q0, pq, tol, sign, &mut out.decomposition)?;
        out.kept_terms.push(kept);
        out.tail_lambdas.push(tail_lambda);
    }
    out.weight = out.decomposition.weight();
    Ok(out)
}

fn fold_tail(
    d: &Decomposition,
    part: &GridFunction,
    q0: &Cube,
    pq: &ExponentPair,
    tol: f64,
    sign: f64,
    out: &mut Decomposition,
) -> Result<(usize, f64)> {
    let domain = *part.domain();
    let mut order: Vec<usize> = (0..d.terms.len()).collect();
    order.sort_by(|&a, &b| d.terms[b].lambda.total_cmp(&d.terms[a].lambda));
    let total = d.weight();
    let price = q0.measure(&domain).powf(-pq.scale_exponent());
    // tails[k] = Sum_{j >= k} lambda_j b_j in sorted order.
    let mut tails = vec![vec![0.0; domain.cell_count()]; order.len() + 1];
    for k in (0..order.len()).rev() {
        let t = &d.terms[order[k]];
        let next = tails[k + 1].clone();
        for (c, acc) in tails[k].iter_mut().enumerate() {
            *acc = next[c] + t.lambda * t.block.values()[c];
        }
    }
    let cutoff = (0..=order.len())
        .find(|&k| price * ls_norm(&tails[k], pq.q_conj(), domain.cell_measure()) <= tol * total)
        .unwrap_or(order.len());
    for &k in &order[..cutoff] {
        let t = &d.terms[k];
        let values = t.block.values().iter().map(|v| sign * v).collect();
        out.push(t.lambda, Block::new(domain, *t.block.support(), values)?)?;
    }
    let tail_norm = ls_norm(&tails[cutoff], pq.q_conj(), domain.cell_measure());
    let tail_lambda = price * tail_norm;
    if tail_lambda > 0.0 {
        let values = tails[cutoff].iter().map(|v| sign * v / tail_lambda).collect();
        out.push(tail_lambda, Block::on_cube(domain, q0, values)?)?;
    }
    Ok((cutoff, tail_lambda))
}

/// Relative size of `f - synthesize(d)` in the sup norm.
pub fn synthesis_error(d: &Decomposition, f: &GridFunction) -> Result<f64> {
    let s = synthesize(d, f.domain())?;
    let diff = s.sub(f)?.max_abs();
    Ok(diff / f.max_abs().max(f64::MIN_POSITIVE))
}
