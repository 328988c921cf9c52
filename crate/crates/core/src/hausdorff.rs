//! Hausdorff content `H^d_r(E) = inf Sum_j |Q_j|^d` over covers of `E` by
//! cubes of side below `r`, exact for finite unions of intervals and bounded
//! from above on grids, and the capacity bound
//! `int_E |f| <= H^{1/p'}_inf(E) ||f||`.

use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{arg_err, Error, Result};
use crate::gallery::{morrey_norm_exact_1d, StepFunction1D};
use crate::grid::{enumerate_cubes, CellSet, Cube, CubeFamily, ExponentPair, GridFunction};
use crate::morrey::morrey_norm;
use crate::numeric::pairwise_sum;
use crate::rational::{self, Rational};

/// Candidate cube counts above which the greedy cover scores in parallel.
const PARALLEL_THRESHOLD: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ContentQuery {
    d: f64,
    /// Cover scale; `f64::INFINITY` for unrestricted covers.
    r: f64,
}

impl ContentQuery {
    pub fn new(d: f64, r: f64) -> Result<Self> {
        if !(d > 0.0 && d <= 1.0) {
            return arg_err(format!("content exponent must lie in (0, 1], got {d}"));
        }
        if r.is_nan() || r <= 0.0 {
            return Err(Error::Infeasible(format!("no cover uses cubes of side below {r}")));
        }
        Ok(Self { d, r })
    }

    pub fn unrestricted(d: f64) -> Result<Self> {
        Self::new(d, f64::INFINITY)
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn r(&self) -> f64 {
        self.r
    }
}

/// Sorted, pairwise disjoint closed intervals with rational endpoints.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct IntervalSet {
    parts: Vec<(Rational, Rational)>,
}

impl IntervalSet {
    /// Sorts the intervals and merges any that overlap or touch.
    pub fn new(mut parts: Vec<(Rational, Rational)>) -> Result<Self> {
        if let Some((a, b)) = parts.iter().find(|(a, b)| a > b) {
            return arg_err(format!(
                "interval [{}, {}] is reversed",
                rational::to_string(a),
                rational::to_string(b)
            ));
        }
        parts.sort();
        let mut merged: Vec<(Rational, Rational)> = Vec::with_capacity(parts.len());
        for (a, b) in parts {
            match merged.last_mut() {
                Some(last) if a <= last.1 => {
                    if b > last.1 {
                        last.1 = b;
                    }
                }
                _ => merged.push((a, b)),
            }
        }
        Ok(Self { parts: merged })
    }

    pub fn from_f64_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let parts = pairs
            .iter()
            .map(|&(a, b)| Ok((rational::from_f64(a)?, rational::from_f64(b)?)))
            .collect::<Result<_>>()?;
        Self::new(parts)
    }

    /// The union of the closed cells of a one-dimensional cell set.
    pub fn from_cell_set(set: &CellSet) -> Result<Self> {
        let d = set.domain();
        if d.dimension() != 1 {
            return arg_err("interval sets are one-dimensional");
        }
        let h = rational::from_f64(d.cell_side())?;
        let parts = set
            .members()
            .iter()
            .map(|&c| {
                Ok((
                    rational::mul(&h, &rational::integer(c as i128))?,
                    rational::mul(&h, &rational::integer(c as i128 + 1))?,
                ))
            })
            .collect::<Result<_>>()?;
        Self::new(parts)
    }

    pub fn components(&self) -> &[(Rational, Rational)] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn total_length(&self) -> Result<Rational> {
        self.parts.iter().try_fold(Rational::zero(), |acc, (a, b)| {
            rational::add(&acc, &rational::sub(b, a)?)
        })
    }

    /// `lambda E + shift`.
    pub fn affine_image(&self, lambda: &Rational, shift: &Rational) -> Result<Self> {
        if *lambda <= Rational::zero() {
            return arg_err("scale factor must be positive");
        }
        let parts = self
            .parts
            .iter()
            .map(|(a, b)| {
                Ok((
                    rational::add(&rational::mul(a, lambda)?, shift)?,
                    rational::add(&rational::mul(b, lambda)?, shift)?,
                ))
            })
            .collect::<Result<_>>()?;
        Self::new(parts)
    }

    /// Array of `[a, b]` pairs; endpoints that are exact doubles are written
    /// as numbers, the rest as `"n/d"` strings.
    pub fn to_json(&self) -> serde_json::Value {
        let point = |r: &Rational| {
            let x = rational::to_f64(r);
            match rational::from_f64(x) {
                Ok(back) if back == *r => serde_json::json!(x),
                _ => serde_json::json!(rational::to_string(r)),
            }
        };
        serde_json::Value::Array(
            self.parts
                .iter()
                .map(|(a, b)| serde_json::json!([point(a), point(b)]))
                .collect(),
        )
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let arr = value
            .as_array()
            .ok_or_else(|| Error::Argument("interval set must be an array of [a, b] pairs".into()))?;
        let parts = arr
            .iter()
            .map(|pair| match pair.as_array().map(Vec::as_slice) {
                Some([a, b]) => Ok((rational::from_json(a)?, rational::from_json(b)?)),
                _ => arg_err(format!("expected [a, b], got {pair}")),
            })
            .collect::<Result<_>>()?;
        Self::new(parts)
    }
}

impl Serialize for IntervalSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// Cheapest cover of a single interval of length `span` by intervals shorter
/// than `r`: one interval when `span < r`, otherwise `k - 1` intervals of
/// length (just under) `r` and one remainder, `k = floor(span / r) + 1`.
fn chain_cost(span: &Rational, query: &ContentQuery, r: Option<&Rational>) -> Result<f64> {
    let d = query.d;
    let s = rational::to_f64(span);
    let Some(r) = r else {
        return Ok(s.powf(d));
    };
    if span < r {
        return Ok(s.powf(d));
    }
    let full = rational::div(span, r)?.floor();
    let rest = rational::sub(span, &rational::mul(&full, r)?)?;
    let count = full.to_integer().to_f64().unwrap_or(f64::INFINITY);
    Ok(count * rational::to_f64(r).powf(d) + rational::to_f64(&rest).powf(d))
}

/// Cost of covering components `i..=j` as one group.
fn group_cost(e: &IntervalSet, i: usize, j: usize, query: &ContentQuery, r: Option<&Rational>) -> Result<f64> {
    let span = rational::sub(&e.parts[j].1, &e.parts[i].0)?;
    chain_cost(&span, query, r)
}

fn finite_scale(query: &ContentQuery) -> Result<Option<Rational>> {
    if query.r.is_finite() {
        Ok(Some(rational::from_f64(query.r)?))
    } else {
        Ok(None)
    }
}

/// Exact `H^d_r(E)`. An optimal cover groups consecutive components, covers
/// each group's span by one chain of abutting intervals, and pays nothing
/// for the gaps it skips; `cost[j] = min_i cost[i-1] + chain(b_j - a_i)`.
/// Long components are covered by chains, so every finite union is feasible
/// for every `r > 0`.
pub fn content_1d(e: &IntervalSet, query: &ContentQuery) -> Result<f64> {
    let m = e.len();
    let r = finite_scale(query)?;
    let mut cost = vec![0.0; m + 1];
    for j in 0..m {
        let mut best = f64::INFINITY;
        for i in 0..=j {
            let c = cost[i] + group_cost(e, i, j, query, r.as_ref())?;
            if c < best {
                best = c;
            }
        }
        cost[j + 1] = best;
    }
    Ok(cost[m])
}

/// Minimum over all `2^{m-1}` ways to cut the components into consecutive
/// groups, each group costed as in [`content_1d`] and summed left to right.
pub fn content_1d_brute_force(e: &IntervalSet, query: &ContentQuery) -> Result<f64> {
    let m = e.len();
    if m == 0 {
        return Ok(0.0);
    }
    if m > 20 {
        return arg_err("brute force is limited to 20 components");
    }
    let r = finite_scale(query)?;
    let mut best = f64::INFINITY;
    for cuts in 0u32..(1 << (m - 1)) {
        let mut total = 0.0;
        let mut start = 0;
        for j in 0..m {
            if j == m - 1 || cuts & (1 << j) != 0 {
                total += group_cost(e, start, j, query, r.as_ref())?;
                start = j + 1;
            }
        }
        best = best.min(total);
    }
    Ok(best)
}

#[derive(Clone, Debug, Serialize)]
pub struct ContentUpper {
    /// `Sum |Q|^d` over the chosen cover: at least the true content.
    pub upper: f64,
    pub cover: Vec<Cube>,
}

/// Greedy cover of `E` by dyadic grid cubes, each step taking the cube with
/// the most uncovered measure per unit of `|Q|^d` (first in enumeration
/// order on ties).
pub fn content_upper_nd(e: &CellSet, d: f64) -> Result<ContentUpper> {
    if !(d > 0.0 && d <= 1.0) {
        return arg_err(format!("content exponent must lie in (0, 1], got {d}"));
    }
    let domain = *e.domain();
    let cubes = enumerate_cubes(&domain, CubeFamily::Dyadic);
    let cost: Vec<f64> = cubes.iter().map(|c| c.measure(&domain).powf(d)).collect();
    let mut uncovered = vec![0.0; domain.cell_count()];
    for &c in e.members() {
        uncovered[c] = 1.0;
    }
    let mut remaining = e.len();
    let mut cover = Vec::new();
    while remaining > 0 {
        let indicator = GridFunction::new(domain, uncovered.clone())?;
        let table = indicator.power_table(1.0);
        let gain = |k: usize| table.cube_sum(&cubes[k]) * domain.cell_measure() / cost[k];
        let gains: Vec<f64> = if cubes.len() > PARALLEL_THRESHOLD {
            (0..cubes.len()).into_par_iter().map(gain).collect()
        } else {
            (0..cubes.len()).map(gain).collect()
        };
        let best = (0..cubes.len()).fold(0, |b, k| if gains[k] > gains[b] { k } else { b });
        let chosen = cubes[best];
        for c in chosen.cells(&domain) {
            if uncovered[c] != 0.0 {
                uncovered[c] = 0.0;
                remaining -= 1;
            }
        }
        cover.push(chosen);
    }
    let costs: Vec<f64> = cover.iter().map(|c| c.measure(&domain).powf(d)).collect();
    Ok(ContentUpper {
        upper: pairwise_sum(&costs),
        cover,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ContentKind {
    Exact,
    Upper,
}

#[derive(Clone, Debug, Serialize)]
pub struct CapacityReport {
    /// `int_E |f|`.
    pub integral: f64,
    /// `H^{1/p'}_inf(E)`, or an upper bound for it.
    pub content: f64,
    pub content_kind: ContentKind,
    pub norm: f64,
    /// `content * norm`.
    pub bound: f64,
    pub holds: bool,
}

fn capacity_report(integral: f64, content: f64, kind: ContentKind, norm: f64) -> CapacityReport {
    let bound = content * norm;
    CapacityReport {
        integral,
        content,
        content_kind: kind,
        norm,
        bound,
        holds: integral <= bound + 1e-10,
    }
}

/// The capacity bound on a grid. In one dimension the content is exact; in
/// higher dimensions the greedy upper bound is used. Either way the cover
/// consists of grid cubes or real intervals on which Hölder's inequality
/// gives `int_Q |f| <= |Q|^{1/p'} ||f||` with the grid norm.
pub fn check_capacity_bound(f: &GridFunction, e: &CellSet, pq: &ExponentPair) -> Result<CapacityReport> {
    f.domain().check_same(e.domain())?;
    let d = 1.0 / pq.p_conj();
    let terms: Vec<f64> = e.members().iter().map(|&c| f.values()[c].abs()).collect();
    let integral = pairwise_sum(&terms) * f.domain().cell_measure();
    let (content, kind) = if f.domain().dimension() == 1 {
        (
            content_1d(&IntervalSet::from_cell_set(e)?, &ContentQuery::unrestricted(d)?)?,
            ContentKind::Exact,
        )
    } else {
        (content_upper_nd(e, d)?.upper, ContentKind::Upper)
    };
    let norm = morrey_norm(f, pq, CubeFamily::All).value;
    Ok(capacity_report(integral, content, kind, norm))
}

/// The capacity bound for a step function, with exact content and norm.
pub fn check_capacity_bound_exact(f: &StepFunction1D, e: &IntervalSet, pq: &ExponentPair) -> Result<CapacityReport> {
    let d = 1.0 / pq.p_conj();
    let integral = f.integral_abs_over(e)?;
    let content = content_1d(e, &ContentQuery::unrestricted(d)?)?;
    let norm = morrey_norm_exact_1d(f, pq)?.value;
    Ok(capacity_report(integral, content, ContentKind::Exact, norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridDomain;

    fn set(pairs: &[(i128, i128)]) -> IntervalSet {
        IntervalSet::new(
            pairs
                .iter()
                .map(|&(a, b)| (rational::integer(a), rational::integer(b)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_interval() {
        let e = set(&[(0, 1)]);
        for d in [0.2, 0.5, 1.0] {
            assert_eq!(content_1d(&e, &ContentQuery::unrestricted(d).unwrap()).unwrap(), 1.0);
        }
    }

    #[test]
    fn two_intervals_merge_only_when_d_is_small() {
        let e = set(&[(0, 1), (2, 3)]);
        assert_eq!(content_1d(&e, &ContentQuery::unrestricted(1.0).unwrap()).unwrap(), 2.0);
        let half = content_1d(&e, &ContentQuery::unrestricted(0.5).unwrap()).unwrap();
        assert!((half - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn finite_scale_uses_chains() {
        let e = set(&[(0, 5)]);
        let q = ContentQuery::new(0.5, 2.0).unwrap();
        let want = 2.0 * 2f64.sqrt() + 1.0;
        assert!((content_1d(&e, &q).unwrap() - want).abs() < 1e-15);
        assert!(matches!(ContentQuery::new(0.5, 0.0), Err(Error::Infeasible(_))));
        assert!(ContentQuery::new(0.0, 1.0).is_err());
    }

    #[test]
    fn constructor_merges_touching_intervals() {
        let e = set(&[(2, 3), (0, 1), (1, 2)]);
        assert_eq!(e.components(), &[(rational::integer(0), rational::integer(3))]);
        assert!(IntervalSet::new(vec![(rational::integer(1), rational::integer(0))]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let e = IntervalSet::new(vec![
            (Rational::new(1, 3), Rational::new(1, 2)),
            (rational::integer(2), rational::integer(5)),
        ])
        .unwrap();
        assert_eq!(IntervalSet::from_json(&e.to_json()).unwrap(), e);
    }

    #[test]
    fn upper_bound_single_cell_and_full_box() {
        let d = GridDomain::new(2, 4, 0.5).unwrap();
        let one = CellSet::new(d, vec![5]).unwrap();
        let up = content_upper_nd(&one, 0.5).unwrap();
        assert!((up.upper - 0.25f64.powf(0.5)).abs() < 1e-15);
        let full = CellSet::full(d);
        assert!(content_upper_nd(&full, 0.5).unwrap().upper <= 4.0f64.powf(0.5) + 1e-15);
    }

    #[test]
    fn capacity_bound_for_indicator_is_tight() {
        let d = GridDomain::interval(16, 2.0).unwrap();
        let e = CellSet::new(d, (0..8).collect()).unwrap();
        let f = e.indicator();
        let pq = ExponentPair::new(2.0, 4.0 / 3.0).unwrap();
        let rep = check_capacity_bound(&f, &e, &pq).unwrap();
        assert!((rep.integral - 1.0).abs() < 1e-15);
        assert!((rep.content - 1.0).abs() < 1e-15);
        assert!((rep.norm - 1.0).abs() < 1e-12);
        assert!(rep.holds);
        let zero = check_capacity_bound(&GridFunction::zeros(d), &e, &pq).unwrap();
        assert_eq!((zero.integral, zero.bound), (0.0, 0.0));
        assert!(zero.holds);
    }

    #[test]
    fn capacity_bound_in_two_dimensions() {
        let d = GridDomain::new(2, 8, 0.25).unwrap();
        let f = GridFunction::from_fn(d, |c| (c[0] * c[1]) as f64 * 0.1).unwrap();
        let e = CellSet::new(d, vec![0, 9, 18, 27, 63]).unwrap();
        let pq = ExponentPair::new(3.0, 1.5).unwrap();
        let rep = check_capacity_bound(&f, &e, &pq).unwrap();
        assert_eq!(rep.content_kind, ContentKind::Upper);
        assert!(rep.holds);
    }
}
