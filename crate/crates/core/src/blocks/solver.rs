//! Certified block-norm solver.
//!
//! On a finite grid the block norm is
//! `min Sum_Q |Q|^{1/q-1/p} ||g_Q||_{q'}` over splittings `f = Sum_Q g_Q` with
//! `g_Q` supported in `Q`, and its dual is `max <f, g>` over the Morrey unit
//! ball. Writing `u = |g|^q` turns every Morrey constraint into the linear
//! inequality `Sum_{c in Q} u_c h^n <= |Q|^{1-q/p}` and the objective into the
//! concave `Sum_c |f_c| u_c^{1/q} h^n`, so the dual is a concave program over
//! a polytope.
//!
//! The solver runs a cutting-plane loop on that program. The active set
//! starts with the whole box; each round the restricted problem is solved in
//! its multiplier space (one `mu_Q >= 0` per active cube) by a log-barrier
//! Newton method, the Morrey norm of the current dual point serves as the
//! separation oracle, and its most violated cubes join the active set. Every
//! round yields a certificate pair: the dual point scaled into the Morrey
//! unit ball bounds the norm from below, and the split
//! `g_Q = f mu_Q / Sum_{R ni c} mu_R` is a feasible decomposition bounding it
//! from above.

use nalgebra::{DMatrix, DVector};

use super::{ls_norm, relative_gap, Block, BlockNormCertificate, Decomposition};
use crate::error::{arg_err, Error, Result};
use crate::grid::{Cube, CubeFamily, ExponentPair, GridFunction};
use crate::morrey::cube_scores;
use crate::numeric::pairwise_sum;

#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Target relative gap between the certificates.
    pub tol: f64,
    pub family: CubeFamily,
    /// Violated cubes added per cutting-plane round.
    pub cuts_per_round: usize,
    /// Hard cap on rounds; the working budget is also limited to ten rounds
    /// per active cube.
    pub max_rounds: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-3,
            family: CubeFamily::All,
            cuts_per_round: 8,
            max_rounds: 2000,
        }
    }
}

pub fn block_norm(f: &GridFunction, pq: &ExponentPair, tol: f64, family: CubeFamily) -> Result<BlockNormCertificate> {
    block_norm_with(
        f,
        pq,
        &SolverOptions {
            tol,
            family,
            ..SolverOptions::default()
        },
    )
}

pub fn block_norm_with(f: &GridFunction, pq: &ExponentPair, opts: &SolverOptions) -> Result<BlockNormCertificate> {
    pq.require_block_regime()?;
    if !(opts.tol > 0.0) {
        return arg_err("tolerance must be positive");
    }
    let domain = *f.domain();
    if f.is_zero() {
        return Ok(BlockNormCertificate {
            upper: 0.0,
            lower: 0.0,
            gap: 0.0,
            witness: GridFunction::zeros(domain),
            decomposition: Decomposition::new(),
            rounds: 0,
            active_cubes: 0,
        });
    }
    let mut problem = Restricted::new(f, pq);
    let full = Cube::full(&domain);
    problem.add_cube(full, 1.0);
    problem.mu[0] = problem.single_cube_optimum();

    let mut tau = 0.1 * problem.dual_value();
    let mut best: Option<BlockNormCertificate> = None;
    let mut restarts = 0;
    let mut round = 0;
    loop {
        round += 1;
        if problem.center_to(&mut tau, 0.05 * opts.tol).is_err() {
            restarts += 1;
            if restarts > 3 {
                break;
            }
            problem.reset();
            tau = 0.1 * problem.dual_value();
            continue;
        }
        let (cert, violated) = problem.certificate(f, opts.family, pq, round)?;
        let improved = match &best {
            None => true,
            Some(b) => cert.gap < b.gap,
        };
        if improved {
            best = Some(cert);
        }
        let current = best.as_ref().expect("set above");
        if current.gap <= opts.tol {
            break;
        }
        let budget = opts.max_rounds.min(10 * problem.cubes.len().max(2));
        if round >= budget {
            break;
        }
        let fresh: Vec<Cube> = violated
            .into_iter()
            .filter(|c| !problem.contains(c))
            .take(opts.cuts_per_round)
            .collect();
        if fresh.is_empty() {
            tau *= 0.1;
        } else {
            let seed = 1e-3 * problem.mean_mu();
            for c in fresh {
                problem.add_cube(c, seed);
            }
        }
    }
    let mut best = best.ok_or_else(|| Error::NonConvergence {
        tol: opts.tol,
        best: Box::new(BlockNormCertificate {
            upper: f64::INFINITY,
            lower: 0.0,
            gap: f64::INFINITY,
            witness: GridFunction::zeros(domain),
            decomposition: Decomposition::new(),
            rounds: round,
            active_cubes: problem.cubes.len(),
        }),
    })?;
    best.rounds = round;
    if best.gap > opts.tol {
        return Err(Error::NonConvergence {
            tol: opts.tol,
            best: Box::new(best),
        });
    }
    Ok(best)
}

struct ActiveCube {
    cube: Cube,
    /// `|Q|^{1-q/p}`, the right-hand side of the linearized constraint.
    cap: f64,
    /// `|Q|^{1/q-1/p}`, the price of a unit of `q'`-mass on `Q`.
    price: f64,
    /// Positions into the reduced cell list.
    cells: Vec<usize>,
}

/// The cutting-plane master problem in multiplier form.
struct Restricted {
    /// `|f|` on cells where it is nonzero, scaled to max one.
    a: Vec<f64>,
    /// Grid index of each reduced cell.
    cell_index: Vec<usize>,
    /// Reduced position of each grid cell, if any.
    position: Vec<Option<usize>>,
    cell_measure: f64,
    q: f64,
    q_conj: f64,
    scale_exponent: f64,
    domain: crate::grid::GridDomain,
    cubes: Vec<ActiveCube>,
    mu: Vec<f64>,
    cell_cubes: Vec<Vec<usize>>,
}

impl Restricted {
    fn new(f: &GridFunction, pq: &ExponentPair) -> Self {
        let amax = f.max_abs();
        let mut a = Vec::new();
        let mut cell_index = Vec::new();
        let mut position = vec![None; f.values().len()];
        for (c, &v) in f.values().iter().enumerate() {
            if v != 0.0 {
                position[c] = Some(a.len());
                a.push(v.abs() / amax);
                cell_index.push(c);
            }
        }
        let n = a.len();
        Self {
            a,
            cell_index,
            position,
            cell_measure: f.domain().cell_measure(),
            q: pq.q(),
            q_conj: pq.q_conj(),
            scale_exponent: pq.scale_exponent(),
            domain: *f.domain(),
            cubes: Vec::new(),
            mu: Vec::new(),
            cell_cubes: vec![Vec::new(); n],
        }
    }

    fn contains(&self, cube: &Cube) -> bool {
        self.cubes.iter().any(|c| &c.cube == cube)
    }

    fn add_cube(&mut self, cube: Cube, mu: f64) {
        let measure = cube.measure(&self.domain);
        let cells: Vec<usize> = cube.cells(&self.domain).filter_map(|c| self.position[c]).collect();
        let k = self.cubes.len();
        for &c in &cells {
            self.cell_cubes[c].push(k);
        }
        self.cubes.push(ActiveCube {
            cube,
            cap: measure.powf(-self.scale_exponent * self.q),
            price: measure.powf(-self.scale_exponent),
            cells,
        });
        self.mu.push(mu);
    }

    fn mean_mu(&self) -> f64 {
        pairwise_sum(&self.mu) / self.mu.len() as f64
    }

    fn reset(&mut self) {
        let m = self.single_cube_optimum() / self.cubes.len() as f64;
        self.mu.iter_mut().for_each(|x| *x = m);
    }

    /// Optimal multiplier when the whole box is the only constraint.
    fn single_cube_optimum(&self) -> f64 {
        let sum: Vec<f64> = self.a.iter().map(|a| a.powf(self.q_conj)).collect();
        let big_a = self.cell_measure * (self.q - 1.0) * self.q.powf(-self.q_conj) * pairwise_sum(&sum);
        ((self.q_conj - 1.0) * big_a / self.cubes[0].cap).powf(1.0 / self.q_conj)
    }

    fn loads(&self, mu: &[f64]) -> Vec<f64> {
        self.cell_cubes
            .iter()
            .map(|list| list.iter().map(|&k| mu[k]).sum())
            .collect()
    }

    /// Maximizer `u_c = (a_c / (q M_c))^{q'}` of the Lagrangian for loads `M`.
    fn primal_point(&self, loads: &[f64]) -> Vec<f64> {
        self.a
            .iter()
            .zip(loads)
            .map(|(&a, &m)| (a / (self.q * m)).powf(self.q_conj))
            .collect()
    }

    /// Lagrangian dual `D(mu)` of the restricted problem.
    fn dual_value_at(&self, mu: &[f64]) -> f64 {
        let loads = self.loads(mu);
        let u = self.primal_point(&loads);
        let inner: Vec<f64> = u.iter().zip(&loads).map(|(u, m)| u * m).collect();
        let caps: Vec<f64> = self.cubes.iter().zip(mu).map(|(c, m)| c.cap * m).collect();
        self.cell_measure * (self.q - 1.0) * pairwise_sum(&inner) + pairwise_sum(&caps)
    }

    fn dual_value(&self) -> f64 {
        self.dual_value_at(&self.mu)
    }

    fn barrier_value(&self, mu: &[f64], tau: f64) -> Option<f64> {
        if mu.iter().any(|&m| m <= 0.0) {
            return None;
        }
        let logs: Vec<f64> = mu.iter().map(|m| m.ln()).collect();
        Some(self.dual_value_at(mu) - tau * pairwise_sum(&logs))
    }

    /// Follows the barrier path until the restricted gap `tau |S|` drops
    /// below `rel` times the dual value.
    fn center_to(&mut self, tau: &mut f64, rel: f64) -> std::result::Result<(), ()> {
        loop {
            self.center(*tau)?;
            if *tau * self.cubes.len() as f64 <= rel * self.dual_value() {
                return Ok(());
            }
            *tau *= 0.2;
        }
    }

    /// Newton's method on `D(mu) - tau Sum log mu`.
    fn center(&mut self, tau: f64) -> std::result::Result<(), ()> {
        let s = self.cubes.len();
        for _ in 0..200 {
            let loads = self.loads(&self.mu);
            let u = self.primal_point(&loads);
            let mut grad = DVector::zeros(s);
            let mut hess = DMatrix::zeros(s, s);
            for (k, cube) in self.cubes.iter().enumerate() {
                let used: f64 = cube.cells.iter().map(|&c| u[c]).sum();
                grad[k] = cube.cap - self.cell_measure * used - tau / self.mu[k];
                hess[(k, k)] += tau / (self.mu[k] * self.mu[k]);
            }
            for (c, list) in self.cell_cubes.iter().enumerate() {
                let w = self.cell_measure * self.q_conj * u[c] / loads[c];
                for &i in list {
                    for &j in list {
                        hess[(i, j)] += w;
                    }
                }
            }
            let step = match hess.clone().cholesky() {
                Some(ch) => ch.solve(&(-&grad)),
                None => {
                    let ridge = 1e-12 * hess.trace().max(f64::MIN_POSITIVE);
                    let mut h = hess;
                    for k in 0..s {
                        h[(k, k)] += ridge;
                    }
                    h.cholesky().ok_or(())?.solve(&(-&grad))
                }
            };
            let decrement = -grad.dot(&step);
            if !decrement.is_finite() {
                return Err(());
            }
            let current = self.barrier_value(&self.mu, tau).ok_or(())?;
            if decrement <= 1e-11 * current.abs().max(self.dual_value()) {
                return Ok(());
            }
            let mut t: f64 = 1.0;
            for k in 0..s {
                if step[k] < 0.0 {
                    t = t.min(-0.99 * self.mu[k] / step[k]);
                }
            }
            let mut accepted = false;
            for _ in 0..60 {
                let trial: Vec<f64> = (0..s).map(|k| self.mu[k] + t * step[k]).collect();
                if let Some(v) = self.barrier_value(&trial, tau) {
                    if v <= current - 0.25 * t * decrement {
                        self.mu = trial;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                // No further progress at double precision.
                return Ok(());
            }
        }
        Ok(())
    }

    /// Builds both certificates from the current multipliers, and returns
    /// the cubes violated by the current dual point, most violated first.
    fn certificate(
        &self,
        f: &GridFunction,
        family: CubeFamily,
        pq: &ExponentPair,
        round: usize,
    ) -> Result<(BlockNormCertificate, Vec<Cube>)> {
        let domain = *f.domain();
        let loads = self.loads(&self.mu);
        let u = self.primal_point(&loads);

        let mut raw = vec![0.0; domain.cell_count()];
        for (r, &c) in self.cell_index.iter().enumerate() {
            raw[c] = f.values()[c].signum() * u[r].powf(1.0 / self.q);
        }
        let raw = GridFunction::new(domain, raw)?;
        let family_scores = cube_scores(&raw, pq, family);
        let m = family_scores.iter().fold(0.0f64, |acc, &(_, s)| acc.max(s));
        let witness = raw.scale(1.0 / m)?;
        let products: Vec<f64> = f.values().iter().zip(witness.values()).map(|(a, b)| a * b).collect();
        let lower = pairwise_sum(&products) * self.cell_measure;

        let mut violated: Vec<(Cube, f64)> = family_scores.into_iter().filter(|&(_, s)| s > 1.0 + 1e-9).collect();
        violated.sort_by(|a, b| b.1.total_cmp(&a.1));

        let mut decomposition = Decomposition::new();
        let mut synth = vec![0.0; domain.cell_count()];
        for (k, cube) in self.cubes.iter().enumerate() {
            let mut values = vec![0.0; domain.cell_count()];
            for &r in &cube.cells {
                let c = self.cell_index[r];
                values[c] = f.values()[c] * self.mu[k] / loads[r];
            }
            let lambda = cube.price * ls_norm(&values, self.q_conj, self.cell_measure);
            if lambda == 0.0 || !lambda.is_finite() {
                continue;
            }
            values.iter_mut().for_each(|v| *v /= lambda);
            let block = Block::on_cube(domain, &cube.cube, values)?;
            for (acc, &b) in synth.iter_mut().zip(block.values()) {
                *acc += lambda * b;
            }
            decomposition.push(lambda, block)?;
        }
        // Rounding residual goes to the whole box at its exact price.
        let residual: Vec<f64> = f.values().iter().zip(&synth).map(|(fv, s)| fv - s).collect();
        let full = Cube::full(&domain);
        let lambda =
            full.measure(&domain).powf(-pq.scale_exponent()) * ls_norm(&residual, self.q_conj, self.cell_measure);
        if lambda > 0.0 && lambda.is_finite() {
            let values = residual.iter().map(|r| r / lambda).collect();
            decomposition.push(lambda, Block::on_cube(domain, &full, values)?)?;
        }
        let upper = decomposition.weight();
        Ok((
            BlockNormCertificate {
                upper,
                lower,
                gap: relative_gap(upper, lower),
                witness,
                decomposition,
                rounds: round,
                active_cubes: self.cubes.len(),
            },
            violated.into_iter().map(|(c, _)| c).collect(),
        ))
    }
}
