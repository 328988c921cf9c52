//! Exact one-dimensional engine for step functions, and the classical
//! examples around Morrey spaces rebuilt on it: a set on which no constant
//! bounds `int_E f` by the norm, a set whose indicator is far from every
//! compactly supported function, the functionals that see only its tail, and
//! the power function `|x|^{-1/p}` that attains its norm on every centered
//! interval.

use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{arg_err, Result};
use crate::grid::{ExponentPair, GridFunction};
use crate::hausdorff::IntervalSet;
use crate::numeric::{pairwise_sum, DoubleDouble};
use crate::rational::{self, Rational};

/// A function that is `values[i]` on `[breakpoints[i], breakpoints[i+1])` and
/// zero elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction1D {
    breakpoints: Vec<Rational>,
    values: Vec<f64>,
}

#[derive(Serialize, serde::Deserialize)]
struct StepJson {
    breakpoints: Vec<serde_json::Value>,
    values: Vec<f64>,
}

impl StepFunction1D {
    pub fn new(breakpoints: Vec<Rational>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.is_empty() && values.is_empty() {
            return Ok(Self::zero());
        }
        if breakpoints.len() != values.len() + 1 {
            return arg_err(format!(
                "{} breakpoints cannot carry {} pieces",
                breakpoints.len(),
                values.len()
            ));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return arg_err("breakpoints must be strictly increasing");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return arg_err("step values must be finite");
        }
        Ok(Self { breakpoints, values })
    }

    pub fn zero() -> Self {
        Self {
            breakpoints: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn from_f64(breakpoints: &[f64], values: Vec<f64>) -> Result<Self> {
        let bp = breakpoints
            .iter()
            .map(|&x| rational::from_f64(x))
            .collect::<Result<_>>()?;
        Self::new(bp, values)
    }

    /// `chi_E`, with value zero on the gaps between components.
    pub fn indicator(set: &IntervalSet) -> Result<Self> {
        let mut bp: Vec<Rational> = Vec::new();
        let mut values = Vec::new();
        for (a, b) in set.components() {
            if a == b {
                continue;
            }
            if let Some(last) = bp.last() {
                if last < a {
                    values.push(0.0);
                    bp.push(*a);
                }
            } else {
                bp.push(*a);
            }
            values.push(1.0);
            bp.push(*b);
        }
        if bp.is_empty() {
            return Ok(Self::zero());
        }
        Self::new(bp, values)
    }

    /// The step function of a one-dimensional grid function.
    pub fn from_grid(f: &GridFunction) -> Result<Self> {
        let d = f.domain();
        if d.dimension() != 1 {
            return arg_err("only one-dimensional grid functions are step functions here");
        }
        let h = rational::from_f64(d.cell_side())?;
        let bp = (0..=d.cells_per_side())
            .map(|k| rational::mul(&h, &rational::integer(k as i128)))
            .collect::<Result<_>>()?;
        Self::new(bp, f.values().to_vec())
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn piece_count(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// `(left, right, value)` per piece.
    pub fn pieces(&self) -> impl Iterator<Item = (&Rational, &Rational, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (&self.breakpoints[i], &self.breakpoints[i + 1], v))
    }

    /// `int |f|^s`.
    pub fn integral_abs_power(&self, s: f64) -> Result<f64> {
        let mut terms = Vec::with_capacity(self.values.len());
        for (a, b, v) in self.pieces() {
            if v != 0.0 {
                terms.push(v.abs().powf(s) * rational::to_f64(&rational::sub(b, a)?));
            }
        }
        Ok(pairwise_sum(&terms))
    }

    /// `int_a^b f`.
    pub fn integral_over(&self, a: &Rational, b: &Rational) -> Result<f64> {
        let mut terms = Vec::new();
        for (l, r, v) in self.pieces() {
            let lo = if l > a { l } else { a };
            let hi = if r < b { r } else { b };
            if lo < hi && v != 0.0 {
                terms.push(v * rational::to_f64(&rational::sub(hi, lo)?));
            }
        }
        Ok(pairwise_sum(&terms))
    }

    /// `int_E |f|`.
    pub fn integral_abs_over(&self, set: &IntervalSet) -> Result<f64> {
        let mut terms = Vec::new();
        for (a, b) in set.components() {
            terms.push(self.abs().integral_over(a, b)?);
        }
        Ok(pairwise_sum(&terms))
    }

    pub fn abs(&self) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v.abs()).collect(),
        }
    }

    /// `f chi_{[cut, inf)}`.
    pub fn tail_from(&self, cut: &Rational) -> Result<Self> {
        let mut bp = Vec::new();
        let mut values = Vec::new();
        for (l, r, v) in self.pieces() {
            if r <= cut {
                continue;
            }
            let lo = if l > cut { *l } else { *cut };
            if bp.is_empty() {
                bp.push(lo);
            }
            values.push(v);
            bp.push(*r);
        }
        if bp.is_empty() {
            return Ok(Self::zero());
        }
        Self::new(bp, values)
    }

    /// Keeps the first `budget` nonzero pieces and drops everything after.
    pub fn leading_pieces(&self, budget: usize) -> Result<Self> {
        let mut kept = 0;
        let mut end = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if kept == budget {
                break;
            }
            if v != 0.0 {
                kept += 1;
            }
            end = i + 1;
        }
        if end == 0 {
            return Ok(Self::zero());
        }
        Self::new(self.breakpoints[..=end].to_vec(), self.values[..end].to_vec())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut cuts: Vec<Rational> = self.breakpoints.iter().chain(&other.breakpoints).copied().collect();
        cuts.sort();
        cuts.dedup();
        if cuts.len() < 2 {
            return Ok(Self::zero());
        }
        let values = cuts
            .windows(2)
            .map(|w| self.value_at(&w[0]) - other.value_at(&w[0]))
            .collect();
        Self::new(cuts, values)
    }

    pub fn value_at(&self, x: &Rational) -> f64 {
        match self.breakpoints.binary_search(x) {
            Ok(i) => self.values.get(i).copied().unwrap_or(0.0),
            Err(0) => 0.0,
            Err(i) => self.values.get(i - 1).copied().unwrap_or(0.0),
        }
    }

    /// `f(. / lambda)` composed with a shift: breakpoints map to `lambda x + shift`.
    pub fn affine_image(&self, lambda: &Rational, shift: &Rational) -> Result<Self> {
        if !lambda.is_positive() {
            return arg_err("dilation factor must be positive");
        }
        let bp = self
            .breakpoints
            .iter()
            .map(|x| rational::add(&rational::mul(x, lambda)?, shift))
            .collect::<Result<_>>()?;
        Self::new(bp, self.values.clone())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "breakpoints": self.breakpoints.iter().map(rational::to_string).collect::<Vec<_>>(),
            "values": self.values,
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let raw: StepJson = serde_json::from_value(value.clone())?;
        let bp = raw.breakpoints.iter().map(rational::from_json).collect::<Result<_>>()?;
        Self::new(bp, raw.values)
    }
}

impl Serialize for StepFunction1D {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// Breakpoints on a common denominator, when one fits in `i128`, so that
/// interval lengths cost one subtraction.
struct Ticks {
    numer: Vec<i128>,
    denom: i128,
}

impl Ticks {
    fn new(points: &[Rational]) -> Option<Self> {
        let mut denom: i128 = 1;
        for x in points {
            let d = *x.denom();
            let g = num_integer::gcd(denom, d);
            denom = denom.checked_mul(d / g)?;
        }
        let numer = points
            .iter()
            .map(|x| x.numer().checked_mul(denom / x.denom()))
            .collect::<Option<Vec<_>>>()?;
        // Differences must not overflow either.
        let lo = *numer.first()?;
        let hi = *numer.last()?;
        hi.checked_sub(lo)?;
        Some(Self { numer, denom })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactNorm {
    pub value: f64,
    /// Endpoints of a maximizing interval, or `None` for the zero function.
    #[serde(serialize_with = "ser_interval")]
    pub argmax: Option<(Rational, Rational)>,
}

fn ser_interval<S: serde::Serializer>(iv: &Option<(Rational, Rational)>, s: S) -> std::result::Result<S::Ok, S::Error> {
    iv.as_ref()
        .map(|(a, b)| [rational::to_string(a), rational::to_string(b)])
        .serialize(s)
}

/// The Morrey norm of a step function over all real intervals.
///
/// For `l` and `r` in fixed pieces, `int_l^r |f|^q` is affine in each
/// endpoint, and along either endpoint the score
/// `(r - l)^{1/p-1/q} (int_l^r |f|^q)^{1/q}` has at most one critical point,
/// at `|f(r)|^q (r - l) = (1 - q/p) int_l^r |f|^q`, where it is a minimum.
/// Every breakpoint pair is scored, as is every such critical point on the
/// edges of each combinatorial piece. Ties keep the smallest `(l, r)` pair.
pub fn morrey_norm_exact_1d(f: &StepFunction1D, pq: &ExponentPair) -> Result<ExactNorm> {
    if f.is_zero() {
        return Ok(ExactNorm {
            value: 0.0,
            argmax: None,
        });
    }
    let x = &f.breakpoints;
    let m = x.len();
    let q = pq.q();
    let a_exp = pq.scale_exponent();
    let theta = 1.0 - q / pq.p();

    let ticks = Ticks::new(x);
    let span = |i: usize, j: usize| -> f64 {
        match &ticks {
            Some(t) => (t.numer[j] - t.numer[i]) as f64 / t.denom as f64,
            None => rational::to_f64(&(x[j] - x[i])),
        }
    };
    let piece_len: Vec<f64> = (0..m - 1).map(|i| span(i, i + 1)).collect();
    let weight: Vec<f64> = f.values.iter().map(|v| v.abs().powf(q)).collect();
    let mut prefix = vec![DoubleDouble::ZERO; m];
    for i in 0..m - 1 {
        prefix[i + 1] = prefix[i] + DoubleDouble::from_f64(weight[i] * piece_len[i]);
    }
    let mass = |i: usize, j: usize| (prefix[j] - prefix[i]).to_f64().max(0.0);
    let score = |t: f64, mass: f64| {
        if mass > 0.0 {
            t.powf(a_exp) * mass.powf(1.0 / q)
        } else {
            0.0
        }
    };
    // Interior critical offset along a piece of weight `u`, measured from the
    // piece end nearest the fixed endpoint, given the mass `b` and distance
    // `l0` already between the fixed endpoint and that piece end.
    let critical = |u: f64, b: f64, l0: f64, len: f64| -> Option<(f64, f64)> {
        if u <= 0.0 || theta >= 1.0 {
            return None;
        }
        let s = (theta * b - u * l0) / (u * (1.0 - theta));
        (s > 0.0 && s < len).then_some((l0 + s, b + u * s))
    };

    #[derive(Clone, Copy)]
    enum Where {
        Pair(usize, usize),
        /// Left end at breakpoint `i`, length `t`.
        Right(usize, f64),
        /// Right end at breakpoint `j`, length `t`.
        Left(usize, f64),
    }
    let per_left: Vec<(f64, Where)> = (0..m - 1)
        .into_par_iter()
        .map(|i| {
            let mut best = (f64::NEG_INFINITY, Where::Pair(i, i + 1));
            let mut offer = |v: f64, w: Where| {
                if v > best.0 {
                    best = (v, w);
                }
            };
            for j in i + 1..m {
                offer(score(span(i, j), mass(i, j)), Where::Pair(i, j));
                // Right endpoint inside piece j - 1, left fixed at x_i.
                let pj = j - 1;
                if let Some((t, w)) = critical(weight[pj], mass(i, pj), span(i, pj), piece_len[pj]) {
                    offer(score(t, w), Where::Right(i, t));
                }
            }
            // Left endpoint inside piece i, right fixed at x_j.
            for j in i + 1..m {
                if let Some((t, w)) = critical(weight[i], mass(i + 1, j), span(i + 1, j), piece_len[i]) {
                    offer(score(t, w), Where::Left(j, t));
                }
            }
            best
        })
        .collect();
    let (value, place) = per_left
        .into_iter()
        .fold((f64::NEG_INFINITY, Where::Pair(0, 1)), |best, c| {
            if c.0 > best.0 {
                c
            } else {
                best
            }
        });
    let argmax = match place {
        Where::Pair(i, j) => (x[i], x[j]),
        Where::Right(i, t) => (x[i], rational::add(&x[i], &rational::from_f64(t)?)?),
        Where::Left(j, t) => (rational::sub(&x[j], &rational::from_f64(t)?)?, x[j]),
    };
    Ok(ExactNorm {
        value: value.max(0.0),
        argmax: Some(argmax),
    })
}

fn require_strict(p: f64, q: f64) -> Result<ExponentPair> {
    if !(q > 1.0 && q < p && p.is_finite()) {
        return arg_err(format!("need 1 < q < p < inf, got p = {p}, q = {q}"));
    }
    ExponentPair::new(p, q)
}

#[derive(Clone, Debug, Serialize)]
pub struct P5Report {
    pub groups: usize,
    pub alpha: f64,
    /// `int_E f`, summed over the pieces.
    pub integral: f64,
    /// `Sum_{l<J} 4^{l/p - l} 2^l`.
    pub integral_closed_form: f64,
    pub norm: f64,
    #[serde(serialize_with = "ser_interval")]
    pub argmax: Option<(Rational, Rational)>,
    /// `int_E f / ||f||`: a lower bound for any constant `C_E`.
    pub ratio: f64,
}

/// The support `E` of [`example_p5_failure`]'s function: group `l < J` is
/// `2^l` intervals of length `4^{-l}` starting at `alpha^{l+1} + i alpha`.
pub fn p5_failure_set(j: usize, alpha: &Rational) -> Result<IntervalSet> {
    let mut parts = Vec::new();
    for l in 0..j {
        let start = rational::pow(alpha, l as u32 + 1)?;
        let len = Rational::new(1, 1i128 << (2 * l));
        for i in 0..(1i128 << l) {
            let a = rational::add(&start, &rational::mul(&rational::integer(i), alpha)?)?;
            parts.push((a, rational::add(&a, &len)?));
        }
    }
    IntervalSet::new(parts)
}

/// A function with `int_E f = J` (for `p = 2`) but norm one: amplitude
/// `4^{l/p}` on group `l` of [`p5_failure_set`], so each interval alone
/// scores exactly one and distant clusters never combine.
pub fn example_p5_failure(p: f64, q: f64, j: usize, alpha: f64) -> Result<(StepFunction1D, P5Report)> {
    let pq = require_strict(p, q)?;
    if !(1..=12).contains(&j) {
        return arg_err(format!("group count must be in 1..=12, got {j}"));
    }
    if !(alpha >= 4.0 && alpha.is_finite()) {
        return arg_err(format!("spacing must be at least 4, got {alpha}"));
    }
    let alpha_r = rational::from_f64(alpha)?;
    let set = p5_failure_set(j, &alpha_r)?;
    let mut bp: Vec<Rational> = Vec::new();
    let mut values = Vec::new();
    let mut k = 0;
    for l in 0..j {
        let amp = (2.0 * l as f64 / p).exp2();
        for _ in 0..(1usize << l) {
            let (a, b) = set.components()[k];
            if !bp.is_empty() {
                values.push(0.0);
            }
            bp.push(a);
            values.push(amp);
            bp.push(b);
            k += 1;
        }
    }
    let f = StepFunction1D::new(bp, values)?;
    let integral = f.integral_abs_power(1.0)?;
    let closed: Vec<f64> = (0..j)
        .map(|l| {
            let l = l as f64;
            (2.0 * l / p - 2.0 * l + l).exp2()
        })
        .collect();
    let norm = morrey_norm_exact_1d(&f, &pq)?;
    let report = P5Report {
        groups: j,
        alpha,
        integral,
        integral_closed_form: pairwise_sum(&closed),
        norm: norm.value,
        argmax: norm.argmax,
        ratio: integral / norm.value,
    };
    Ok((f, report))
}

/// [`example_p5_failure`] for every group count up to `j`.
pub fn p5_failure_table(p: f64, q: f64, j: usize, alpha: f64) -> Result<Vec<P5Report>> {
    (1..=j).map(|k| Ok(example_p5_failure(p, q, k, alpha)?.1)).collect()
}

/// `k^{p/(p-q)}`, exact when the exponent is within `1e-9` of an integer.
fn tail_offset(k: u32, e: f64) -> Result<Rational> {
    let rounded = e.round();
    if (e - rounded).abs() <= 1e-9 && (0.0..=64.0).contains(&rounded) {
        rational::pow(&rational::integer(k as i128), rounded as u32)
    } else {
        rational::from_f64((k as f64).powf(e))
    }
}

/// The intervals `I_k = (k - 1 + k^{p/(p-q)}, k + k^{p/(p-q)})`, `k = 1..=K`.
pub fn non_dense_intervals(p: f64, q: f64, k: usize) -> Result<Vec<(Rational, Rational)>> {
    require_strict(p, q)?;
    let e = p / (p - q);
    (1..=k as u32)
        .map(|k| {
            let c = tail_offset(k, e)?;
            Ok((
                rational::add(&c, &rational::integer(k as i128 - 1))?,
                rational::add(&c, &rational::integer(k as i128))?,
            ))
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct TailRow {
    pub cutoff: String,
    pub cutoff_value: f64,
    /// `||chi_E - chi_{E cap [0, R]}||`.
    pub tail_norm: f64,
    /// Whether a full interval of `E` lies beyond the cutoff.
    pub full_interval_beyond: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NonDenseReport {
    pub intervals: usize,
    pub norm: f64,
    #[serde(serialize_with = "ser_interval")]
    pub argmax: Option<(Rational, Rational)>,
    pub tails: Vec<TailRow>,
    /// Every row with a full interval beyond its cutoff has tail norm at
    /// least `1 - 1e-9`.
    pub tails_bounded_below: bool,
}

/// The set `E = I_1 cup ... cup I_K` whose indicator keeps distance one from
/// every function vanishing beyond some `R`: each unit interval alone scores
/// `|I|^{1/p-1/q} |I|^{1/q} = 1`. Cutoffs tried are `0`, and the left end and
/// midpoint of every interval.
pub fn example_non_dense(p: f64, q: f64, k: usize) -> Result<(IntervalSet, NonDenseReport)> {
    let pq = require_strict(p, q)?;
    if !(1..=50).contains(&k) {
        return arg_err(format!("interval count must be in 1..=50, got {k}"));
    }
    let parts = non_dense_intervals(p, q, k)?;
    let set = IntervalSet::new(parts.clone())?;
    let chi = StepFunction1D::indicator(&set)?;
    let norm = morrey_norm_exact_1d(&chi, &pq)?;
    let mut cutoffs = vec![Rational::zero()];
    for (a, b) in &parts {
        cutoffs.push(*a);
        cutoffs.push(rational::div(&rational::add(a, b)?, &rational::integer(2))?);
    }
    cutoffs.push(parts.last().expect("k >= 1").1);
    let mut tails = Vec::with_capacity(cutoffs.len());
    for r in cutoffs {
        let tail = chi.tail_from(&r)?;
        tails.push(TailRow {
            cutoff: rational::to_string(&r),
            cutoff_value: rational::to_f64(&r),
            tail_norm: morrey_norm_exact_1d(&tail, &pq)?.value,
            full_interval_beyond: parts.iter().any(|(a, _)| *a >= r),
        });
    }
    let ok = tails
        .iter()
        .all(|t| !t.full_interval_beyond || t.tail_norm >= 1.0 - 1e-9);
    Ok((
        set,
        NonDenseReport {
            intervals: k,
            norm: norm.value,
            argmax: norm.argmax,
            tails,
            tails_bounded_below: ok,
        },
    ))
}

/// `int_{I_k} f` for `k = 1..=K`, with `I_k` from [`non_dense_intervals`].
pub fn example_functional_sequence(f: &StepFunction1D, p: f64, q: f64, k: usize) -> Result<Vec<f64>> {
    non_dense_intervals(p, q, k)?
        .iter()
        .map(|(a, b)| f.integral_over(a, b))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct PowerRow {
    pub level: u32,
    pub pieces: usize,
    pub value: f64,
    pub limit: f64,
    /// `(limit - value) / limit`.
    pub deficit: f64,
    #[serde(serialize_with = "ser_interval")]
    pub argmax: Option<(Rational, Rational)>,
    pub centered: bool,
}

/// `||  |x|^{-1/p} ||` over all intervals: centered intervals all score
/// `2^{1/p} (1 - q/p)^{-1/q}`, and no interval does better.
pub fn power_function_limit(p: f64, q: f64) -> f64 {
    (1.0 / p).exp2() * (1.0 - q / p).powf(-1.0 / q)
}

/// The mean of `|x|^{-1/p}` over `[a, b]` with `0 <= a < b`.
fn power_mean(a: f64, b: f64, p: f64) -> f64 {
    let beta = 1.0 - 1.0 / p;
    (b.powf(beta) - a.powf(beta)) / (beta * (b - a))
}

/// Norms of the level-`L` approximants of `|x|^{-1/p}` on `[-1, 1]`, each
/// cell of width `2^{-L}` carrying the mean of `|x|^{-1/p}` over the cell.
pub fn power_function_norm(p: f64, q: f64, levels: u32) -> Result<Vec<PowerRow>> {
    if !(q > 0.0 && q < p && p.is_finite() && p > 1.0) {
        return arg_err(format!("need 0 < q < p < inf and p > 1, got p = {p}, q = {q}"));
    }
    if !(1..=20).contains(&levels) {
        return arg_err(format!("levels must be in 1..=20, got {levels}"));
    }
    let pq = ExponentPair::morrey(p, q)?;
    let limit = power_function_limit(p, q);
    let mut rows = Vec::new();
    for level in 1..=levels {
        let cells = 1usize << level;
        let width = Rational::new(1, cells as i128);
        let bp: Vec<Rational> = (0..=2 * cells as i128)
            .map(|k| Rational::new(k - cells as i128, cells as i128))
            .collect();
        let w = width.to_f64().expect("small");
        let values = (0..2 * cells)
            .map(|k| {
                let k = k as f64 - cells as f64;
                let (a, b) = if k >= 0.0 {
                    (k * w, (k + 1.0) * w)
                } else {
                    (-(k + 1.0) * w, -k * w)
                };
                power_mean(a, b, p)
            })
            .collect();
        let f = StepFunction1D::new(bp, values)?;
        let norm = morrey_norm_exact_1d(&f, &pq)?;
        let centered = norm.argmax.as_ref().is_some_and(|(a, b)| (a + b).is_zero());
        rows.push(PowerRow {
            level,
            pieces: 2 * cells,
            value: norm.value,
            limit,
            deficit: (limit - norm.value) / limit,
            argmax: norm.argmax,
            centered,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{CubeFamily, GridDomain};
    use crate::morrey::morrey_norm;
    use crate::numeric::rel_diff;

    fn pq() -> ExponentPair {
        ExponentPair::new(2.0, 4.0 / 3.0).unwrap()
    }

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn unit_indicator() {
        let f = StepFunction1D::new(vec![r(0, 1), r(1, 1)], vec![1.0]).unwrap();
        let n = morrey_norm_exact_1d(&f, &pq()).unwrap();
        assert!((n.value - 1.0).abs() < 1e-15);
        assert_eq!(n.argmax, Some((r(0, 1), r(1, 1))));
        let z = morrey_norm_exact_1d(&StepFunction1D::zero(), &pq()).unwrap();
        assert_eq!(z.value, 0.0);
    }

    #[test]
    fn two_separated_unit_intervals() {
        let f = StepFunction1D::new(vec![r(0, 1), r(1, 1), r(2, 1), r(3, 1)], vec![1.0, 0.0, 1.0]).unwrap();
        let n = morrey_norm_exact_1d(&f, &pq()).unwrap();
        let merged = 3f64.powf(-0.25) * 2f64.powf(0.75);
        assert!((n.value - merged).abs() < 1e-14);
        assert!((n.value - 1.2779).abs() < 1e-4);
        assert_eq!(n.argmax, Some((r(0, 1), r(3, 1))));
    }

    #[test]
    fn interval_of_length_t_scores_t_to_the_one_over_p() {
        for t in [r(1, 3), r(5, 2), r(7, 1), r(1, 1024)] {
            let f = StepFunction1D::new(vec![r(-2, 7), r(-2, 7) + t], vec![1.0]).unwrap();
            let v = morrey_norm_exact_1d(&f, &pq()).unwrap().value;
            assert!(rel_diff(v, t.to_f64().unwrap().sqrt()) <= 1e-14);
        }
    }

    #[test]
    fn agrees_with_grid_engine() {
        let d = GridDomain::interval(32, 3.0).unwrap();
        let g = GridFunction::from_fn(d, |c| ((c[0] * 13) % 7) as f64 - 2.0).unwrap();
        let exact = morrey_norm_exact_1d(&StepFunction1D::from_grid(&g).unwrap(), &pq()).unwrap();
        let grid = morrey_norm(&g, &pq(), CubeFamily::All);
        assert!(rel_diff(exact.value, grid.value) <= 1e-10);
    }

    #[test]
    fn p5_failure_single_group() {
        let (_, rep) = example_p5_failure(2.0, 4.0 / 3.0, 1, 100.0).unwrap();
        assert_eq!(rep.integral, 1.0);
        assert!((rep.norm - 1.0).abs() < 1e-14);
        assert!((rep.ratio - 1.0).abs() < 1e-14);
    }

    #[test]
    fn p5_failure_integral_is_group_count() {
        let (f, rep) = example_p5_failure(2.0, 4.0 / 3.0, 6, 100.0).unwrap();
        assert_eq!(rep.integral, 6.0);
        assert_eq!(rep.integral_closed_form, 6.0);
        assert!((rep.norm - 1.0).abs() < 1e-12);
        assert_eq!(f.values().iter().filter(|&&v| v != 0.0).count(), 63);
        assert!(example_p5_failure(2.0, 2.0, 3, 100.0).is_err());
        assert!(example_p5_failure(2.0, 1.5, 13, 100.0).is_err());
    }

    #[test]
    fn non_dense_intervals_for_cubic_exponent() {
        let parts = non_dense_intervals(2.0, 4.0 / 3.0, 3).unwrap();
        let ends: Vec<(i128, i128)> = parts.iter().map(|(a, b)| (a.to_integer(), b.to_integer())).collect();
        assert_eq!(ends, vec![(1, 2), (9, 10), (29, 30)]);
    }

    #[test]
    fn non_dense_tails() {
        let (_, rep) = example_non_dense(2.0, 4.0 / 3.0, 5).unwrap();
        assert!(rep.tails_bounded_below);
        assert!((rep.norm - 1.0).abs() < 1e-12);
        let last = rep.tails.last().unwrap();
        assert_eq!(last.tail_norm, 0.0);
        let (_, one) = example_non_dense(2.0, 4.0 / 3.0, 1).unwrap();
        assert_eq!(one.tails.last().unwrap().tail_norm, 0.0);
    }

    #[test]
    fn functional_sequence_values() {
        let (set, _) = example_non_dense(2.0, 4.0 / 3.0, 6).unwrap();
        let chi = StepFunction1D::indicator(&set).unwrap();
        assert_eq!(
            example_functional_sequence(&chi, 2.0, 4.0 / 3.0, 6).unwrap(),
            vec![1.0; 6]
        );
        let z = example_functional_sequence(&StepFunction1D::zero(), 2.0, 4.0 / 3.0, 4).unwrap();
        assert_eq!(z, vec![0.0; 4]);
        let compact = StepFunction1D::new(vec![r(0, 1), r(10, 1)], vec![2.5]).unwrap();
        let seq = example_functional_sequence(&compact, 2.0, 4.0 / 3.0, 5).unwrap();
        assert_eq!(&seq[2..], &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn power_function_refinement() {
        let rows = power_function_norm(2.0, 4.0 / 3.0, 6).unwrap();
        let limit = 6f64.powf(0.75) * 2f64.powf(-0.25);
        assert!(rel_diff(rows[0].limit, limit) < 1e-14);
        assert!(rows[0].value < limit);
        for row in &rows {
            assert!(row.centered, "level {}", row.level);
            assert!(row.value < limit);
        }
        assert!(power_function_norm(2.0, 2.0, 3).is_err());
    }

    #[test]
    fn step_json_round_trip() {
        let f = StepFunction1D::new(vec![r(-1, 3), r(1, 2)], vec![0.75]).unwrap();
        assert_eq!(StepFunction1D::from_json(&f.to_json()).unwrap(), f);
        let g = StepFunction1D::from_json(&serde_json::json!({"breakpoints": [0, 0.5, "3/2"], "values": [1.0, 2.0]}))
            .unwrap();
        assert_eq!(g.breakpoints()[2], r(3, 2));
    }
}
