use super::{Cube, GridDomain};
use crate::numeric::DoubleDouble;

/// Summed-volume table of `|f|^s` over a grid, stored in double-double so a
/// cube sum of `2^n` signed corner terms keeps full relative precision even
/// when the cube carries a tiny fraction of the total mass.
#[derive(Debug)]
pub struct PrefixTable {
    dim: usize,
    stride: usize,
    exponent: f64,
    sums: Vec<DoubleDouble>,
}

impl PrefixTable {
    /// `sums[i_1..i_n]` is the sum over cells with every coordinate below `i_k`.
    pub fn new(domain: &GridDomain, values: &[f64], exponent: f64) -> Self {
        let dim = domain.dimension();
        let n = domain.cells_per_side();
        let stride = n + 1;
        let mut sums = vec![DoubleDouble::ZERO; stride.pow(dim as u32)];
        for (cell, v) in values.iter().enumerate() {
            let c = domain.coords(cell);
            let idx = c[..dim].iter().fold(0, |acc, &x| acc * stride + x + 1);
            sums[idx] = DoubleDouble::from_f64(v.abs().powf(exponent));
        }
        // Running sums along each axis in turn.
        for axis in 0..dim {
            let step = stride.pow((dim - 1 - axis) as u32);
            for idx in 0..sums.len() {
                if !(idx / step).is_multiple_of(stride) {
                    sums[idx] = sums[idx] + sums[idx - step];
                }
            }
        }
        Self {
            dim,
            stride,
            exponent,
            sums,
        }
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// `Sum_{c in Q} |f(c)|^s` by inclusion-exclusion over the `2^n` corners.
    pub fn cube_sum(&self, cube: &Cube) -> f64 {
        let anchor = cube.anchor();
        let side = cube.side();
        let mut acc = DoubleDouble::ZERO;
        for corner in 0..(1usize << self.dim) {
            let mut idx = 0;
            let mut upper_count = 0;
            for k in 0..self.dim {
                let upper = (corner >> (self.dim - 1 - k)) & 1 == 1;
                let coord = if upper {
                    upper_count += 1;
                    anchor[k] + side
                } else {
                    anchor[k]
                };
                idx = idx * self.stride + coord;
            }
            let term = self.sums[idx];
            if (self.dim - upper_count).is_multiple_of(2) {
                acc = acc + term;
            } else {
                acc = acc - term;
            }
        }
        acc.to_f64().max(0.0)
    }

    /// Same sum for an arbitrary cell-aligned box `[lo, hi)` (per axis), used
    /// for regions clipped to the grid.
    pub fn box_sum(&self, lo: &[usize], hi: &[usize]) -> f64 {
        let mut acc = DoubleDouble::ZERO;
        if (0..self.dim).any(|k| lo[k] >= hi[k]) {
            return 0.0;
        }
        for corner in 0..(1usize << self.dim) {
            let mut idx = 0;
            let mut upper_count = 0;
            for k in 0..self.dim {
                let upper = (corner >> (self.dim - 1 - k)) & 1 == 1;
                let coord = if upper {
                    upper_count += 1;
                    hi[k]
                } else {
                    lo[k]
                };
                idx = idx * self.stride + coord;
            }
            let term = self.sums[idx];
            if (self.dim - upper_count).is_multiple_of(2) {
                acc = acc + term;
            } else {
                acc = acc - term;
            }
        }
        acc.to_f64().max(0.0)
    }
}
