//! Discrete model of `R^n`: a half-open box `[0, N h)^n` split into `N^n`
//! cells of side `h`, real-valued functions on the cells, and grid-aligned
//! cubes.
//!
//! Every norm in this crate is a supremum or infimum over a family of cubes.
//! On the grid that family is restricted to cubes whose corners sit on cell
//! boundaries. For a function supported in the box and `1/p - 1/q < 0`, a
//! cube that sticks out of the box carries the same mass as the part inside
//! it, and shrinking it to a grid cube covering that mass only raises the
//! measure factor `|Q|^{1/p-1/q}`; for `q = p` the full box realizes the
//! global `L^p` norm. In one dimension the grid family is exact for
//! grid-representable functions: along each endpoint the score of an interval
//! has at most one critical point and it is a minimum, so maxima sit on cell
//! boundaries. In two and three dimensions the grid family gives the value
//! over grid cubes, which is a lower bound for the value over all cubes.

mod cube;
mod prefix;

use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

pub use cube::{enumerate_cubes, triple, Cube, CubeFamily, Region};
pub use prefix::PrefixTable;

use crate::error::{arg_err, Error, Result};
use crate::numeric::pairwise_sum;

/// Largest supported dimension.
pub const MAX_DIM: usize = 3;

/// The exponents `p, q` together with their conjugates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExponentPair {
    p: f64,
    q: f64,
    p_conj: f64,
    q_conj: f64,
}

fn conjugate(x: f64) -> f64 {
    if x == 1.0 {
        f64::INFINITY
    } else {
        x / (x - 1.0)
    }
}

impl ExponentPair {
    /// Exponents in the block-space regime `1 < q <= p < inf`.
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p.is_finite() && q.is_finite()) || !(q > 1.0 && q <= p) {
            return arg_err(format!("exponents must satisfy 1 < q <= p < inf, got p = {p}, q = {q}"));
        }
        let pair = Self::build(p, q);
        debug_assert!((1.0 / p + 1.0 / pair.p_conj - 1.0).abs() <= 1e-12);
        debug_assert!((1.0 / q + 1.0 / pair.q_conj - 1.0).abs() <= 1e-12);
        Ok(pair)
    }

    /// Exponents accepted by the Morrey norm alone: `0 < q <= p < inf`.
    pub fn morrey(p: f64, q: f64) -> Result<Self> {
        if !(p.is_finite() && q.is_finite()) || !(q > 0.0 && q <= p) {
            return arg_err(format!("exponents must satisfy 0 < q <= p < inf, got p = {p}, q = {q}"));
        }
        Ok(Self::build(p, q))
    }

    fn build(p: f64, q: f64) -> Self {
        Self {
            p,
            q,
            p_conj: conjugate(p),
            q_conj: conjugate(q),
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn p_conj(&self) -> f64 {
        self.p_conj
    }

    pub fn q_conj(&self) -> f64 {
        self.q_conj
    }

    /// `1/p - 1/q`, never positive.
    pub fn scale_exponent(&self) -> f64 {
        1.0 / self.p - 1.0 / self.q
    }

    /// The Morrey functional is only a quasi-norm below `q = 1`.
    pub fn is_quasi(&self) -> bool {
        self.q < 1.0
    }

    pub fn in_block_regime(&self) -> bool {
        self.q > 1.0 && self.q <= self.p
    }

    pub(crate) fn require_block_regime(&self) -> Result<()> {
        if self.in_block_regime() {
            Ok(())
        } else {
            arg_err(format!(
                "block spaces need 1 < q <= p, got p = {}, q = {}",
                self.p, self.q
            ))
        }
    }
}

/// The box `[0, N h)^n` cut into `N^n` cells.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridDomain {
    dimension: usize,
    cells_per_side: usize,
    cell_side: f64,
}

impl GridDomain {
    pub fn new(dimension: usize, cells_per_side: usize, cell_side: f64) -> Result<Self> {
        if dimension == 0 || dimension > MAX_DIM {
            return arg_err(format!("dimension must be 1..={MAX_DIM}, got {dimension}"));
        }
        if !cells_per_side.is_power_of_two() {
            return arg_err(format!("cells per side must be a power of two, got {cells_per_side}"));
        }
        if !(cell_side.is_finite() && cell_side > 0.0) {
            return arg_err(format!("cell side must be positive, got {cell_side}"));
        }
        Ok(Self {
            dimension,
            cells_per_side,
            cell_side,
        })
    }

    /// `N` cells of side `length / N` on the interval `[0, length)`.
    pub fn interval(cells: usize, length: f64) -> Result<Self> {
        Self::new(1, cells, length / cells as f64)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn cells_per_side(&self) -> usize {
        self.cells_per_side
    }

    pub fn cell_side(&self) -> f64 {
        self.cell_side
    }

    pub fn cell_count(&self) -> usize {
        self.cells_per_side.pow(self.dimension as u32)
    }

    /// `h^n`.
    pub fn cell_measure(&self) -> f64 {
        self.cell_side.powi(self.dimension as i32)
    }

    pub fn side_length(&self) -> f64 {
        self.cells_per_side as f64 * self.cell_side
    }

    /// Row-major coordinates of a flat cell index; unused axes are zero.
    pub fn coords(&self, index: usize) -> [usize; MAX_DIM] {
        let n = self.cells_per_side;
        let mut out = [0; MAX_DIM];
        let mut rest = index;
        for axis in (0..self.dimension).rev() {
            out[axis] = rest % n;
            rest /= n;
        }
        out
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        coords[..self.dimension]
            .iter()
            .fold(0, |acc, &c| acc * self.cells_per_side + c)
    }

    /// Same cells with the cell side replaced.
    pub fn with_cell_side(&self, cell_side: f64) -> Result<Self> {
        Self::new(self.dimension, self.cells_per_side, cell_side)
    }

    pub(crate) fn check_same(&self, other: &GridDomain) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            arg_err(format!("domain mismatch: {self:?} vs {other:?}"))
        }
    }
}

/// Real values on the cells of a [`GridDomain`]. Immutable once built, which
/// keeps the per-exponent prefix tables valid for the life of the value.
pub struct GridFunction {
    domain: GridDomain,
    values: Vec<f64>,
    tables: Mutex<Vec<(u64, Arc<PrefixTable>)>>,
}

impl Clone for GridFunction {
    fn clone(&self) -> Self {
        let tables = self.tables.lock().expect("prefix cache poisoned").clone();
        Self {
            domain: self.domain,
            values: self.values.clone(),
            tables: Mutex::new(tables),
        }
    }
}

impl std::fmt::Debug for GridFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GridFunction")
            .field("domain", &self.domain)
            .field("values", &self.values)
            .finish()
    }
}

impl PartialEq for GridFunction {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.values == other.values
    }
}

impl GridFunction {
    pub fn new(domain: GridDomain, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.cell_count() {
            return arg_err(format!("expected {} values, got {}", domain.cell_count(), values.len()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return arg_err(format!("value at cell {i} is not finite"));
        }
        Ok(Self {
            domain,
            values,
            tables: Mutex::new(Vec::new()),
        })
    }

    pub fn zeros(domain: GridDomain) -> Self {
        Self::constant(domain, 0.0)
    }

    pub fn constant(domain: GridDomain, c: f64) -> Self {
        Self::new(domain, vec![c; domain.cell_count()]).expect("finite constant")
    }

    /// Builds values from the row-major coordinates of each cell.
    pub fn from_fn(domain: GridDomain, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let values = (0..domain.cell_count())
            .map(|i| {
                let c = domain.coords(i);
                f(&c[..domain.dimension()])
            })
            .collect();
        Self::new(domain, values)
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.domain, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs).expect("abs keeps values finite")
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        self.map(|v| c * v)
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.domain.check_same(&other.domain)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self::new(self.domain, values)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product with the indicator of `set`.
    pub fn restrict(&self, set: &CellSet) -> Result<Self> {
        self.domain.check_same(set.domain())?;
        let mut values = vec![0.0; self.values.len()];
        for &i in set.members() {
            values[i] = self.values[i];
        }
        Self::new(self.domain, values)
    }

    /// Prefix table of `|f|^s`, built once per exponent and shared afterwards.
    pub fn power_table(&self, s: f64) -> Arc<PrefixTable> {
        let key = s.to_bits();
        let mut tables = self.tables.lock().expect("prefix cache poisoned");
        if let Some((_, t)) = tables.iter().find(|(k, _)| *k == key) {
            return Arc::clone(t);
        }
        let table = Arc::new(PrefixTable::new(&self.domain, &self.values, s));
        tables.push((key, Arc::clone(&table)));
        table
    }

    /// `int_Q |f|^s dx`.
    pub fn integrate_abs_power(&self, s: f64, cube: &Cube) -> Result<f64> {
        integrate_abs_power(self, s, cube)
    }

    /// `(int |f|^s dx)^{1/s}` over the whole box.
    pub fn lp_norm(&self, s: f64) -> f64 {
        let terms: Vec<f64> = self.values.iter().map(|v| v.abs().powf(s)).collect();
        (pairwise_sum(&terms) * self.domain.cell_measure()).powf(1.0 / s)
    }

    /// `int f dx` over the whole box.
    pub fn integral(&self) -> f64 {
        pairwise_sum(&self.values) * self.domain.cell_measure()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn support(&self) -> CellSet {
        let members = (0..self.values.len()).filter(|&i| self.values[i] != 0.0).collect();
        CellSet::new(self.domain, members).expect("indices in range")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(GridFunctionJson {
            dimension: self.domain.dimension,
            cells_per_side: self.domain.cells_per_side,
            cell_side: self.domain.cell_side,
            values: self.values.clone(),
        })
        .expect("plain data serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let raw: GridFunctionJson = serde_json::from_value(value.clone())?;
        let domain = GridDomain::new(raw.dimension, raw.cells_per_side, raw.cell_side)?;
        Self::new(domain, raw.values)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(s)?)
    }
}

impl Serialize for GridFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

#[derive(Serialize, Deserialize)]
struct GridFunctionJson {
    dimension: usize,
    cells_per_side: usize,
    cell_side: f64,
    values: Vec<f64>,
}

/// `Sum_{c in Q} |f(c)|^s h^n` via the cached prefix table for `s`.
pub fn integrate_abs_power(f: &GridFunction, s: f64, cube: &Cube) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return arg_err(format!("exponent must be positive, got {s}"));
    }
    cube.check_inside(f.domain())?;
    let table = f.power_table(s);
    Ok(table.cube_sum(cube) * f.domain().cell_measure())
}

/// A set of cells; its measure is `|members| h^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct CellSet {
    domain: GridDomain,
    members: Vec<usize>,
}

impl CellSet {
    pub fn new(domain: GridDomain, mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if let Some(&last) = members.last() {
            if last >= domain.cell_count() {
                return Err(Error::Domain(format!(
                    "cell {last} outside a domain of {} cells",
                    domain.cell_count()
                )));
            }
        }
        Ok(Self { domain, members })
    }

    pub fn empty(domain: GridDomain) -> Self {
        Self {
            domain,
            members: Vec::new(),
        }
    }

    pub fn full(domain: GridDomain) -> Self {
        Self {
            domain,
            members: (0..domain.cell_count()).collect(),
        }
    }

    pub fn from_cube(domain: GridDomain, cube: &Cube) -> Result<Self> {
        cube.check_inside(&domain)?;
        Self::new(domain, cube.cells(&domain).collect())
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, cell: usize) -> bool {
        self.members.binary_search(&cell).is_ok()
    }

    pub fn measure(&self) -> f64 {
        self.members.len() as f64 * self.domain.cell_measure()
    }

    pub fn indicator(&self) -> GridFunction {
        let mut values = vec![0.0; self.domain.cell_count()];
        for &i in &self.members {
            values[i] = 1.0;
        }
        GridFunction::new(self.domain, values).expect("indicator is finite")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "dimension": self.domain.dimension,
            "cells_per_side": self.domain.cells_per_side,
            "cell_side": self.domain.cell_side,
            "members": self.members,
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            dimension: usize,
            cells_per_side: usize,
            cell_side: f64,
            members: Vec<usize>,
        }
        let raw: Raw = serde_json::from_value(value.clone())?;
        let domain = GridDomain::new(raw.dimension, raw.cells_per_side, raw.cell_side)?;
        Self::new(domain, raw.members)
    }
}
