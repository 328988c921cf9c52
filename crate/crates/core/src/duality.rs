//! Associate norms `rho'(g) = sup { <f, g> : rho(f) <= 1 }` on the grid.
//!
//! The associate of the block norm has a closed form: its unit ball is the
//! closed convex hull of the blocks, and on a single cube Hölder's
//! inequality pairs `g` best with `|g|^{q-1}`, so the associate is the
//! largest cube score of `g`, which is the Morrey norm. The associate of the
//! Morrey norm is the block norm and goes through the certified solver.
//! Other norms get a certified lower bound by ascent, and an upper bound
//! only when they declare constraints that their unit ball satisfies.

use serde::Serialize;

use crate::blocks::{block_norm, ls_norm, Block};
use crate::error::{arg_err, Error, Result};
use crate::grid::{enumerate_cubes, CellSet, Cube, CubeFamily, ExponentPair, GridDomain, GridFunction};
use crate::morrey::morrey_norm;
use crate::numeric::{pairwise_sum, rel_diff};

/// `Sum_c f(c) g(c) h^n`.
pub fn pairing(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    f.domain().check_same(g.domain())?;
    let products: Vec<f64> = f.values().iter().zip(g.values()).map(|(a, b)| a * b).collect();
    Ok(pairwise_sum(&products) * f.domain().cell_measure())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleKind {
    Morrey,
    Block,
    Generic,
}

/// `weight * ||f chi_S||_exponent <= 1` for every `f` in the unit ball.
#[derive(Clone, Debug)]
pub struct BallConstraint {
    pub cells: CellSet,
    pub exponent: f64,
    pub weight: f64,
}

/// A positively homogeneous functional on grid functions.
pub trait NormOracle: Sync {
    fn name(&self) -> String;

    fn evaluate(&self, f: &GridFunction) -> Result<f64>;

    fn is_quasi(&self) -> bool {
        false
    }

    fn kind(&self) -> OracleKind {
        OracleKind::Generic
    }

    /// Exponents and cube family of the Morrey and block oracles.
    fn exponents(&self) -> Option<(ExponentPair, CubeFamily)> {
        None
    }

    /// Certified `(lower, upper)` bounds on the value.
    fn bounds(&self, f: &GridFunction) -> Result<(f64, f64)> {
        let v = self.evaluate(f)?;
        Ok((v, v))
    }

    /// Constraints implied by `rho(f) <= 1` on `domain`.
    fn ball_constraints(&self, _domain: &GridDomain) -> Vec<BallConstraint> {
        Vec::new()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct MorreyOracle {
    pub pq: ExponentPair,
    pub family: CubeFamily,
}

impl NormOracle for MorreyOracle {
    fn name(&self) -> String {
        format!("morrey(p={}, q={}, {})", self.pq.p(), self.pq.q(), self.family)
    }

    fn evaluate(&self, f: &GridFunction) -> Result<f64> {
        Ok(morrey_norm(f, &self.pq, self.family).value)
    }

    fn is_quasi(&self) -> bool {
        self.pq.is_quasi()
    }

    fn kind(&self) -> OracleKind {
        OracleKind::Morrey
    }

    fn exponents(&self) -> Option<(ExponentPair, CubeFamily)> {
        Some((self.pq, self.family))
    }

    fn ball_constraints(&self, domain: &GridDomain) -> Vec<BallConstraint> {
        enumerate_cubes(domain, self.family)
            .into_iter()
            .map(|c| BallConstraint {
                cells: CellSet::from_cube(*domain, &c).expect("enumerated cubes fit"),
                exponent: self.pq.q(),
                weight: c.measure(domain).powf(self.pq.scale_exponent()),
            })
            .collect()
    }
}

/// The block norm, evaluated as the midpoint of a solver certificate.
#[derive(Clone, Copy, Debug)]
pub struct BlockOracle {
    pub pq: ExponentPair,
    pub family: CubeFamily,
    pub tol: f64,
}

impl NormOracle for BlockOracle {
    fn name(&self) -> String {
        format!(
            "block(p={}, q={}, {}, tol={})",
            self.pq.p(),
            self.pq.q(),
            self.family,
            self.tol
        )
    }

    fn evaluate(&self, f: &GridFunction) -> Result<f64> {
        let (lo, up) = self.bounds(f)?;
        Ok(0.5 * (lo + up))
    }

    fn kind(&self) -> OracleKind {
        OracleKind::Block
    }

    fn exponents(&self) -> Option<(ExponentPair, CubeFamily)> {
        Some((self.pq, self.family))
    }

    fn bounds(&self, f: &GridFunction) -> Result<(f64, f64)> {
        match block_norm(f, &self.pq, self.tol, self.family) {
            Ok(c) => Ok((c.lower, c.upper)),
            Err(Error::NonConvergence { best, .. }) => Ok((best.lower, best.upper)),
            Err(e) => Err(e),
        }
    }
}

/// `||f||_s` over the whole grid.
#[derive(Clone, Copy, Debug)]
pub struct LpOracle {
    pub s: f64,
}

impl NormOracle for LpOracle {
    fn name(&self) -> String {
        format!("lp(s={})", self.s)
    }

    fn evaluate(&self, f: &GridFunction) -> Result<f64> {
        Ok(f.lp_norm(self.s))
    }

    fn is_quasi(&self) -> bool {
        self.s < 1.0
    }

    fn ball_constraints(&self, domain: &GridDomain) -> Vec<BallConstraint> {
        vec![BallConstraint {
            cells: CellSet::full(*domain),
            exponent: self.s,
            weight: 1.0,
        }]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockAssociate {
    pub value: f64,
    pub argmax: Cube,
    /// A block on `argmax` whose pairing with `g` is `value`.
    pub block: Block,
}

/// `sup <g, b>` over `(p', q')`-blocks `b` on cubes of `family`, evaluated by
/// building the Hölder-extremal block `|Q|^{1/p-1/q} sgn(g) |g|^{q-1} /
/// || |g|^{q-1} chi_Q ||_{q'}` on every cube and pairing it with `g`.
pub fn block_associate(g: &GridFunction, pq: &ExponentPair, family: CubeFamily) -> Result<BlockAssociate> {
    pq.require_block_regime()?;
    let domain = *g.domain();
    let vol = domain.cell_measure();
    let q = pq.q();
    let mut best: Option<(f64, Cube)> = None;
    for cube in enumerate_cubes(&domain, family) {
        let cells: Vec<usize> = cube.cells(&domain).collect();
        let raw: Vec<f64> = cells
            .iter()
            .map(|&c| g.values()[c].signum() * g.values()[c].abs().powf(q - 1.0))
            .collect();
        let norm = ls_norm(&raw, pq.q_conj(), vol);
        let value = if norm == 0.0 {
            0.0
        } else {
            let w = cube.measure(&domain).powf(pq.scale_exponent()) / norm;
            let products: Vec<f64> = cells.iter().zip(&raw).map(|(&c, b)| g.values()[c] * b * w).collect();
            pairwise_sum(&products) * vol
        };
        if best.is_none_or(|(v, _)| value > v) {
            best = Some((value, cube));
        }
    }
    let (value, argmax) = best.expect("every grid has a cube");
    let mut values = vec![0.0; domain.cell_count()];
    let cells: Vec<usize> = argmax.cells(&domain).collect();
    let raw: Vec<f64> = cells
        .iter()
        .map(|&c| g.values()[c].signum() * g.values()[c].abs().powf(q - 1.0))
        .collect();
    let norm = ls_norm(&raw, pq.q_conj(), vol);
    if norm > 0.0 {
        let w = argmax.measure(&domain).powf(pq.scale_exponent()) / norm;
        for (&c, b) in cells.iter().zip(&raw) {
            values[c] = b * w;
        }
    }
    Ok(BlockAssociate {
        value,
        argmax,
        block: Block::on_cube(domain, &argmax, values)?,
    })
}

pub fn block_associate_norm(g: &GridFunction, pq: &ExponentPair, family: CubeFamily) -> Result<f64> {
    Ok(block_associate(g, pq, family)?.value)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssociateMethod {
    /// Certified block-norm solver.
    BlockDual,
    /// Exact per-cube Hölder duality.
    ClosedForm,
    /// Coordinate ascent on `<f, g> / rho(f)`.
    Ascent,
}

#[derive(Clone, Debug, Serialize)]
pub struct AssociateCertificate {
    pub lower: f64,
    pub upper: Option<f64>,
    /// An `f` with `rho(f) <= 1` and `<f, g> = lower`.
    pub witness: GridFunction,
    pub method: AssociateMethod,
    /// Set when no upper bound could be certified.
    pub lower_only: bool,
}

impl AssociateCertificate {
    pub fn gap(&self) -> Option<f64> {
        self.upper.map(|u| crate::blocks::relative_gap(u, self.lower))
    }
}

fn check_homogeneous(oracle: &dyn NormOracle, g: &GridFunction) -> Result<()> {
    let zero = oracle.evaluate(&GridFunction::zeros(*g.domain()))?;
    if zero != 0.0 {
        return arg_err(format!("oracle {} is {zero} at zero", oracle.name()));
    }
    let base = oracle.evaluate(g)?;
    for c in [2.0, -0.5, 3.0] {
        let scaled = oracle.evaluate(&g.scale(c)?)?;
        let want = c.abs() * base;
        if rel_diff(scaled, want) > 1e-9 && (scaled - want).abs() > 1e-300 {
            return arg_err(format!(
                "oracle {} is not positively homogeneous: rho({c} g) = {scaled}, |{c}| rho(g) = {want}",
                oracle.name()
            ));
        }
    }
    Ok(())
}

/// Lower bound on `rho'(g)` by coordinate ascent on the ratio
/// `<f, g> / rho(f)` over `f` with the sign pattern of `g`, started from the
/// best of the powers `sgn(g) |g|^t`.
fn ascent(g: &GridFunction, oracle: &dyn NormOracle) -> Result<(f64, GridFunction)> {
    let support: Vec<usize> = (0..g.values().len()).filter(|&c| g.values()[c] != 0.0).collect();
    let ratio = |f: &GridFunction| -> Result<f64> {
        let r = oracle.evaluate(f)?;
        Ok(if r > 0.0 { pairing(f, g)? / r } else { f64::NEG_INFINITY })
    };
    let gmax = g.max_abs();
    let mut best_f = g.clone();
    let mut best = f64::NEG_INFINITY;
    for t in [0.0, 0.25, 0.5, 1.0, 2.0, 3.0] {
        let f = g.map(|v| {
            if v == 0.0 {
                0.0
            } else {
                v.signum() * (v.abs() / gmax).powf(t)
            }
        })?;
        let r = ratio(&f)?;
        if r > best {
            best = r;
            best_f = f;
        }
    }
    let mut values = best_f.values().to_vec();
    let mut step = 0.5 * values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-7 * step;
    let mut rounds = 0;
    while step > floor && rounds < 400 {
        rounds += 1;
        let mut improved = false;
        for &c in &support {
            let dir = g.values()[c].signum();
            for sign in [1.0, -1.0] {
                let old = values[c];
                let new = old + sign * step * dir;
                if new * dir < 0.0 {
                    continue;
                }
                values[c] = new;
                let f = GridFunction::new(*g.domain(), values.clone())?;
                let r = ratio(&f)?;
                if r > best * (1.0 + 1e-14) {
                    best = r;
                    improved = true;
                    break;
                }
                values[c] = old;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    let f = GridFunction::new(*g.domain(), values)?;
    let witness = f.scale(1.0 / oracle.evaluate(&f)?)?;
    Ok((pairing(&witness, g)?, witness))
}

/// Upper bound from declared constraints whose cell set covers `supp g`:
/// `<f, g> = <f chi_S, g> <= ||f chi_S||_s ||g||_{s'} <= ||g||_{s'} / weight`.
fn constraint_upper(g: &GridFunction, oracle: &dyn NormOracle) -> Option<f64> {
    let support = g.support();
    oracle
        .ball_constraints(g.domain())
        .iter()
        .filter(|c| c.exponent >= 1.0 && c.weight > 0.0)
        .filter(|c| support.members().iter().all(|&m| c.cells.contains(m)))
        .map(|c| {
            let dual = if c.exponent == 1.0 {
                g.max_abs()
            } else {
                ls_norm(g.values(), c.exponent / (c.exponent - 1.0), g.domain().cell_measure())
            };
            dual / c.weight
        })
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.min(v))))
}

pub fn associate_norm(g: &GridFunction, oracle: &dyn NormOracle, tol: f64) -> Result<AssociateCertificate> {
    if !(tol > 0.0) {
        return arg_err("tolerance must be positive");
    }
    if g.is_zero() {
        return Ok(AssociateCertificate {
            lower: 0.0,
            upper: Some(0.0),
            witness: GridFunction::zeros(*g.domain()),
            method: match oracle.kind() {
                OracleKind::Morrey => AssociateMethod::BlockDual,
                OracleKind::Block => AssociateMethod::ClosedForm,
                OracleKind::Generic => AssociateMethod::Ascent,
            },
            lower_only: false,
        });
    }
    match (oracle.kind(), oracle.exponents()) {
        (OracleKind::Morrey, Some((pq, family))) => {
            let cert = match block_norm(g, &pq, tol, family) {
                Ok(c) => c,
                Err(Error::NonConvergence { best, .. }) => *best,
                Err(e) => return Err(e),
            };
            Ok(AssociateCertificate {
                lower: cert.lower,
                upper: Some(cert.upper),
                witness: cert.witness,
                method: AssociateMethod::BlockDual,
                lower_only: false,
            })
        }
        (OracleKind::Block, Some((pq, family))) => {
            let a = block_associate(g, &pq, family)?;
            Ok(AssociateCertificate {
                lower: a.value,
                upper: Some(a.value),
                witness: a.block.to_function(),
                method: AssociateMethod::ClosedForm,
                lower_only: false,
            })
        }
        _ => {
            check_homogeneous(oracle, g)?;
            let (lower, witness) = ascent(g, oracle)?;
            let upper = constraint_upper(g, oracle).map(|u| u.max(lower));
            Ok(AssociateCertificate {
                lower,
                upper,
                witness,
                method: AssociateMethod::Ascent,
                lower_only: upper.is_none(),
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    /// Certificate gaps, not the mathematics, prevent a decision.
    Inconclusive,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct SecondAssociateReport {
    pub oracle: String,
    pub rho: (f64, f64),
    pub rho_second: (f64, f64),
    /// Largest relative distance between the two intervals' endpoints.
    pub deviation: f64,
    pub verdict: Verdict,
}

fn interval_verdict(rho: (f64, f64), second: (f64, f64), tol: f64) -> (f64, Verdict) {
    let scale = rho.1.max(second.1).max(f64::MIN_POSITIVE);
    if rho.1 == 0.0 && second.1 == 0.0 {
        return (0.0, Verdict::Pass);
    }
    let deviation = [
        (rho.0 - second.0).abs(),
        (rho.1 - second.1).abs(),
        (rho.0 - second.1).abs(),
        (rho.1 - second.0).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
        / scale;
    let separated = rho.0 > second.1 * (1.0 + tol) || second.0 > rho.1 * (1.0 + tol);
    let verdict = if deviation <= tol {
        Verdict::Pass
    } else if separated {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    (deviation, verdict)
}

/// Compares `rho''(f)` with `rho(f)`.
///
/// For the Morrey norm, `rho''` is the associate of the block norm: the
/// closed form gives its value, and the extremal block `b` scaled by a
/// certified upper bound on its block norm gives a certified lower bound.
/// For the block norm, `rho'` is the Morrey norm and `rho''` goes back
/// through the solver. Other norms compare `rho(f)` (an upper bound for
/// `rho''(f)`) with `<f, g> / rho'(g)` for `g` among powers of `|f|`, using
/// certified upper bounds on `rho'(g)`.
pub fn second_associate_check(f: &GridFunction, oracle: &dyn NormOracle, tol: f64) -> Result<SecondAssociateReport> {
    if !(tol > 0.0) {
        return arg_err("tolerance must be positive");
    }
    let name = oracle.name();
    let report = |rho: (f64, f64), second: (f64, f64)| {
        let (deviation, verdict) = interval_verdict(rho, second, tol);
        SecondAssociateReport {
            oracle: name.clone(),
            rho,
            rho_second: second,
            deviation,
            verdict,
        }
    };
    if f.is_zero() {
        return Ok(report((0.0, 0.0), (0.0, 0.0)));
    }
    match (oracle.kind(), oracle.exponents()) {
        (OracleKind::Morrey, Some((pq, family))) => {
            let rho = oracle.evaluate(f)?;
            let a = block_associate(f, &pq, family)?;
            let b = a.block.to_function();
            let cert_upper = match block_norm(&b, &pq, tol, family) {
                Ok(c) => c.upper,
                Err(Error::NonConvergence { best, .. }) => best.upper,
                Err(e) => return Err(e),
            };
            let lower = pairing(f, &b)? / cert_upper.max(1.0);
            Ok(report((rho, rho), (lower.min(a.value), a.value)))
        }
        (OracleKind::Block, Some((pq, family))) => {
            let rho = oracle.bounds(f)?;
            let morrey = MorreyOracle { pq, family };
            let second = associate_norm(f, &morrey, tol)?;
            Ok(report(rho, (second.lower, second.upper.unwrap_or(f64::INFINITY))))
        }
        _ => {
            let rho = oracle.evaluate(f)?;
            let fmax = f.max_abs();
            let mut lower: f64 = 0.0;
            let mut certified = false;
            for t in [0.25, 0.5, 1.0, 2.0, 3.0] {
                let g = f.map(|v| {
                    if v == 0.0 {
                        0.0
                    } else {
                        v.signum() * (v.abs() / fmax).powf(t)
                    }
                })?;
                if let Some(up) = associate_norm(&g, oracle, tol)?.upper {
                    certified = true;
                    lower = lower.max(pairing(f, &g)? / up);
                }
            }
            let mut r = report((rho, rho), (lower, rho));
            if !certified && r.verdict != Verdict::Pass {
                r.verdict = Verdict::Inconclusive;
            }
            Ok(r)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    /// Certified bounds on `||f||_B`, the associate of the Morrey norm.
    pub block_lower: f64,
    pub block_upper: f64,
    pub gap: f64,
    pub morrey: f64,
    pub block_associate: f64,
    /// `|block_associate - morrey| / morrey`.
    pub associate_identity_error: f64,
}

/// Both halves of the duality between the Morrey and block norms for one
/// function: the certificate gap of its block norm, and the agreement of the
/// block associate with its Morrey norm.
pub fn duality_gap_report(f: &GridFunction, pq: &ExponentPair, family: CubeFamily, tol: f64) -> Result<GapReport> {
    let cert = match block_norm(f, pq, tol, family) {
        Ok(c) => c,
        Err(Error::NonConvergence { best, .. }) => *best,
        Err(e) => return Err(e),
    };
    let morrey = morrey_norm(f, pq, family).value;
    let assoc = block_associate_norm(f, pq, family)?;
    Ok(GapReport {
        block_lower: cert.lower,
        block_upper: cert.upper,
        gap: cert.gap,
        morrey,
        block_associate: assoc,
        associate_identity_error: if morrey == 0.0 { assoc } else { rel_diff(assoc, morrey) },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pq() -> ExponentPair {
        ExponentPair::new(2.0, 4.0 / 3.0).unwrap()
    }

    #[test]
    fn pairing_examples() {
        let d = GridDomain::interval(4, 1.0).unwrap();
        let chi = GridFunction::constant(d, 1.0);
        assert_eq!(pairing(&chi, &chi).unwrap(), 1.0);
        let left = GridFunction::new(d, vec![1.0, 1.0, 0.0, 0.0]).unwrap();
        let right = GridFunction::new(d, vec![0.0, 0.0, 3.0, 1.0]).unwrap();
        assert_eq!(pairing(&left, &right).unwrap(), 0.0);
        let d2 = GridDomain::new(1, 2, 1.0).unwrap();
        let f = GridFunction::constant(d2, 1.0);
        let g = GridFunction::constant(d2, 0.5f64.sqrt());
        assert!((pairing(&f, &g).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!(pairing(&f, &chi).is_err());
    }

    #[test]
    fn block_associate_of_two_ones() {
        let d = GridDomain::new(1, 2, 1.0).unwrap();
        let g = GridFunction::constant(d, 1.0);
        let v = block_associate_norm(&g, &pq(), CubeFamily::All).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(
            block_associate_norm(&GridFunction::zeros(d), &pq(), CubeFamily::All).unwrap(),
            0.0
        );
    }

    #[test]
    fn extremal_block_is_admissible() {
        let d = GridDomain::new(2, 4, 0.5).unwrap();
        let g = GridFunction::from_fn(d, |c| (c[0] as f64 - 1.5) * (c[1] as f64 + 0.5)).unwrap();
        let a = block_associate(&g, &pq(), CubeFamily::All).unwrap();
        let check = a.block.check(&pq()).unwrap();
        assert!(check.admissible && check.slack.abs() < 1e-12);
        assert!(rel_diff(pairing(&g, &a.block.to_function()).unwrap(), a.value) < 1e-12);
    }

    #[test]
    fn associate_of_morrey_is_block_norm() {
        let d = GridDomain::interval(8, 2.0).unwrap();
        let chi = GridFunction::from_fn(d, |c| if c[0] < 4 { 1.0 } else { 0.0 }).unwrap();
        let oracle = MorreyOracle {
            pq: pq(),
            family: CubeFamily::All,
        };
        let cert = associate_norm(&chi, &oracle, 1e-3).unwrap();
        assert!((cert.lower - 1.0).abs() < 1e-3 && (cert.upper.unwrap() - 1.0).abs() < 1e-3);
        let zero = associate_norm(&GridFunction::zeros(d), &oracle, 1e-3).unwrap();
        assert_eq!((zero.lower, zero.upper), (0.0, Some(0.0)));
    }

    #[test]
    fn associate_of_lp_is_conjugate_lp() {
        let d = GridDomain::interval(8, 1.0).unwrap();
        let g = GridFunction::from_fn(d, |c| 1.0 + c[0] as f64).unwrap();
        let cert = associate_norm(&g, &LpOracle { s: 3.0 }, 1e-6).unwrap();
        let exact = g.lp_norm(1.5);
        assert!(cert.lower <= exact * (1.0 + 1e-12));
        assert!(rel_diff(cert.lower, exact) < 1e-6);
        assert!(rel_diff(cert.upper.unwrap(), exact) < 1e-12);
    }

    struct Squared;

    impl NormOracle for Squared {
        fn name(&self) -> String {
            "squared".into()
        }

        fn evaluate(&self, f: &GridFunction) -> Result<f64> {
            Ok(f.lp_norm(2.0).powi(2))
        }
    }

    #[test]
    fn non_homogeneous_oracle_is_rejected() {
        let d = GridDomain::interval(4, 1.0).unwrap();
        let g = GridFunction::constant(d, 1.0);
        assert!(matches!(associate_norm(&g, &Squared, 1e-3), Err(Error::Argument(_))));
    }

    #[test]
    fn oracle_without_constraints_is_lower_only() {
        struct Sup;
        impl NormOracle for Sup {
            fn name(&self) -> String {
                "sup".into()
            }
            fn evaluate(&self, f: &GridFunction) -> Result<f64> {
                Ok(f.max_abs())
            }
        }
        let d = GridDomain::interval(4, 1.0).unwrap();
        let g = GridFunction::new(d, vec![1.0, -2.0, 0.0, 1.0]).unwrap();
        let cert = associate_norm(&g, &Sup, 1e-3).unwrap();
        assert!(cert.lower_only);
        assert!(rel_diff(cert.lower, g.lp_norm(1.0)) < 1e-9);
    }

    #[test]
    fn second_associate_of_indicator() {
        let d = GridDomain::interval(8, 2.0).unwrap();
        let chi = GridFunction::from_fn(d, |c| if c[0] < 4 { 1.0 } else { 0.0 }).unwrap();
        let oracle = MorreyOracle {
            pq: pq(),
            family: CubeFamily::All,
        };
        let rep = second_associate_check(&chi, &oracle, 1e-3).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
        assert!((rep.rho.0 - 1.0).abs() < 1e-12);
        let zero = second_associate_check(&GridFunction::zeros(d), &oracle, 1e-3).unwrap();
        assert_eq!(zero.verdict, Verdict::Pass);
        let lp = second_associate_check(&chi, &LpOracle { s: 2.0 }, 1e-6).unwrap();
        assert_eq!(lp.verdict, Verdict::Pass);
        let block = BlockOracle {
            pq: pq(),
            family: CubeFamily::All,
            tol: 1e-4,
        };
        assert_eq!(
            second_associate_check(&chi, &block, 1e-3).unwrap().verdict,
            Verdict::Pass
        );
    }

    #[test]
    fn gap_report_for_indicator() {
        let d = GridDomain::interval(8, 2.0).unwrap();
        let chi = GridFunction::from_fn(d, |c| if c[0] < 4 { 1.0 } else { 0.0 }).unwrap();
        let rep = duality_gap_report(&chi, &pq(), CubeFamily::All, 1e-3).unwrap();
        assert!(rep.gap <= 1e-3);
        assert!(rep.associate_identity_error < 1e-12);
    }
}
