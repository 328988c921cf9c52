//! Independent oracles and generators shared by the integration tests. The
//! oracles loop over cubes and cells directly, without prefix tables or the
//! library's reductions.
#![allow(dead_code)]

use morrey_core::blocks::{Block, BlockNormCertificate};
use morrey_core::{Cube, Decomposition, ExponentPair, GridDomain, GridFunction, Region};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn pq() -> ExponentPair {
    ExponentPair::new(2.0, 4.0 / 3.0).unwrap()
}

fn cube_cells(d: &GridDomain, anchor: &[usize], side: usize) -> Vec<usize> {
    let dim = d.dimension();
    let mut out = Vec::new();
    let total = side.pow(dim as u32);
    for offset in 0..total {
        let mut rest = offset;
        let mut coords = vec![0; dim];
        for k in (0..dim).rev() {
            coords[k] = anchor[k] + rest % side;
            rest /= side;
        }
        out.push(d.index(&coords));
    }
    out
}

/// Every grid cube inside the box as `(anchor, side)`.
pub fn all_cubes(d: &GridDomain) -> Vec<(Vec<usize>, usize)> {
    let n = d.cells_per_side();
    let dim = d.dimension();
    let mut out = Vec::new();
    for side in 1..=n {
        let per = n - side + 1;
        for offset in 0..per.pow(dim as u32) {
            let mut rest = offset;
            let mut anchor = vec![0; dim];
            for a in anchor.iter_mut() {
                *a = rest % per;
                rest /= per;
            }
            out.push((anchor, side));
        }
    }
    out
}

/// `sup_Q |Q|^{1/p-1/q} (int_Q |f|^q)^{1/q}` by direct summation.
pub fn brute_morrey(f: &GridFunction, p: f64, q: f64) -> f64 {
    let d = f.domain();
    let h = d.cell_side();
    let dim = d.dimension() as i32;
    let mut best: f64 = 0.0;
    for (anchor, side) in all_cubes(d) {
        let mass: f64 = cube_cells(d, &anchor, side)
            .into_iter()
            .map(|c| f.values()[c].abs().powf(q))
            .sum::<f64>()
            * h.powi(dim);
        let measure = (side as f64 * h).powi(dim);
        best = best.max(measure.powf(1.0 / p - 1.0 / q) * mass.powf(1.0 / q));
    }
    best
}

pub fn brute_pairing(f: &GridFunction, g: &GridFunction) -> f64 {
    let m = f.domain().cell_measure();
    f.values().iter().zip(g.values()).map(|(a, b)| a * b).sum::<f64>() * m
}

/// The size condition `||b||_{q'} <= |R|^{1/p-1/q}` recomputed from scratch,
/// together with the support condition.
pub fn block_ok(b: &Block, p: f64, q: f64) -> bool {
    let d = b.domain();
    let support = b.support();
    let h = d.cell_side();
    let dim = d.dimension();
    let qc = q / (q - 1.0);
    let inside = |c: usize| {
        let coords = d.coords(c);
        (0..dim).all(|k| {
            let lo = coords[k] as f64 * h;
            lo >= support.lower()[k] - 1e-12 && lo + h <= support.lower()[k] + support.side() + 1e-12
        })
    };
    let mut sum = 0.0;
    for (c, &v) in b.values().iter().enumerate() {
        if v != 0.0 && !inside(c) {
            return false;
        }
        sum += v.abs().powf(qc);
    }
    let norm = (sum * h.powi(dim as i32)).powf(1.0 / qc);
    norm <= support.side().powi(dim as i32).powf(1.0 / p - 1.0 / q) * (1.0 + 1e-12) + 1e-300
}

pub fn synthesize_direct(dec: &Decomposition, d: &GridDomain) -> Vec<f64> {
    let mut out = vec![0.0; d.cell_count()];
    for t in &dec.terms {
        for (acc, v) in out.iter_mut().zip(t.block.values()) {
            *acc += t.lambda * v;
        }
    }
    out
}

pub fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Checks a block norm certificate against the independent oracles: the
/// decomposition rebuilds `f` and is made of blocks, its weight is the upper
/// bound, and the witness lies in the Morrey unit ball and pairs to the lower
/// bound. Returns a description of the first problem found.
pub fn verify_certificate(f: &GridFunction, cert: &BlockNormCertificate, p: f64, q: f64) -> Result<(), String> {
    let d = f.domain();
    let rebuilt = synthesize_direct(&cert.decomposition, d);
    let err = sup_diff(&rebuilt, f.values());
    if err > 1e-9 * f.max_abs().max(1e-300) {
        return Err(format!("decomposition misses f by {err}"));
    }
    if let Some(t) = cert.decomposition.terms.iter().find(|t| !block_ok(&t.block, p, q)) {
        return Err(format!("inadmissible block on {:?}", t.block.support()));
    }
    let weight: f64 = cert.decomposition.terms.iter().map(|t| t.lambda).sum();
    if (weight - cert.upper).abs() > 1e-12 * weight.max(1e-300) {
        return Err(format!("weight {weight} differs from upper bound {}", cert.upper));
    }
    let wn = brute_morrey(&cert.witness, p, q);
    if wn > 1.0 + 1e-12 {
        return Err(format!("witness has Morrey norm {wn}"));
    }
    let pairing = brute_pairing(f, &cert.witness);
    if (pairing - cert.lower).abs() > 1e-10 * pairing.abs().max(1e-300) {
        return Err(format!("witness pairs to {pairing}, lower bound is {}", cert.lower));
    }
    Ok(())
}

/// Power-of-two grid with `2 <= N <= max_cells`.
pub fn random_domain(rng: &mut ChaCha8Rng, dim: usize, max_cells: usize) -> GridDomain {
    let n = 1 << rng.gen_range(1..=max_cells.ilog2());
    let h = rng.gen_range(0.25..2.0);
    GridDomain::new(dim, n, h).unwrap()
}

/// Nonnegative values with roughly a third of the cells zero.
pub fn random_nonnegative(rng: &mut ChaCha8Rng, d: GridDomain) -> GridFunction {
    let mut values: Vec<f64> = (0..d.cell_count())
        .map(|_| {
            if rng.gen_bool(0.35) {
                0.0
            } else {
                rng.gen_range(0.0..3.0)
            }
        })
        .collect();
    if values.iter().all(|&v| v == 0.0) {
        values[0] = 1.0;
    }
    GridFunction::new(d, values).unwrap()
}

pub fn random_signed(rng: &mut ChaCha8Rng, d: GridDomain) -> GridFunction {
    let values = (0..d.cell_count()).map(|_| rng.gen_range(-2.0..2.0)).collect();
    GridFunction::new(d, values).unwrap()
}

/// A random block on a random grid cube, scaled to a random fraction of the
/// size bound.
pub fn random_block(rng: &mut ChaCha8Rng, d: GridDomain, pq: &ExponentPair) -> Block {
    let n = d.cells_per_side();
    let side = rng.gen_range(1..=n);
    let anchor: Vec<usize> = (0..d.dimension()).map(|_| rng.gen_range(0..=n - side)).collect();
    let cube = Cube::new(&d, &anchor, side).unwrap();
    let mut values = vec![0.0; d.cell_count()];
    for c in cube_cells(&d, &anchor, side) {
        values[c] = rng.gen_range(-1.0..1.0);
    }
    let qc = pq.q_conj();
    let norm = (values.iter().map(|v: &f64| v.abs().powf(qc)).sum::<f64>() * d.cell_measure()).powf(1.0 / qc);
    let bound = cube.measure(&d).powf(1.0 / pq.p() - 1.0 / pq.q());
    let scale = if norm > 0.0 {
        rng.gen_range(0.5..1.0) * bound / norm
    } else {
        0.0
    };
    for v in &mut values {
        *v *= scale;
    }
    Block::on_cube(d, &cube, values).unwrap()
}

/// A random decomposition with total weight at most `max_weight`.
pub fn random_decomposition(rng: &mut ChaCha8Rng, d: GridDomain, pq: &ExponentPair, max_weight: f64) -> Decomposition {
    let terms = rng.gen_range(1..=8);
    let raw: Vec<f64> = (0..terms).map(|_| rng.gen::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let target = rng.gen_range(0.1..max_weight);
    let mut dec = Decomposition::new();
    for w in raw {
        dec.push(w / total * target, random_block(rng, d, pq)).unwrap();
    }
    dec
}

pub fn region_eq(a: &Region, b: &Region) -> bool {
    a.side() == b.side() && a.lower() == b.lower()
}
