use serde::{Deserialize, Serialize};

use super::{GridDomain, MAX_DIM};
use crate::error::{arg_err, Error, Result};

/// Which cubes a norm ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CubeFamily {
    /// Every grid-aligned cube inside the box.
    All,
    /// Cubes whose side is a power of two (in cells) and whose anchor is a
    /// multiple of the side.
    Dyadic,
}

impl std::str::FromStr for CubeFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Self::All),
            "dyadic" => Ok(Self::Dyadic),
            other => arg_err(format!("unknown cube family {other:?}")),
        }
    }
}

impl std::fmt::Display for CubeFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::All => "all",
            Self::Dyadic => "dyadic",
        })
    }
}

/// A grid cube `[anchor h, (anchor + side) h)^n`, in cell units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cube {
    dim: usize,
    anchor: [usize; MAX_DIM],
    side: usize,
}

#[derive(Serialize, Deserialize)]
struct CubeJson {
    anchor: Vec<usize>,
    side: usize,
}

impl Serialize for Cube {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CubeJson {
            anchor: self.anchor().to_vec(),
            side: self.side,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cube {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = CubeJson::deserialize(d)?;
        if raw.anchor.is_empty() || raw.anchor.len() > MAX_DIM || raw.side == 0 {
            return Err(serde::de::Error::custom("bad cube"));
        }
        let mut anchor = [0; MAX_DIM];
        anchor[..raw.anchor.len()].copy_from_slice(&raw.anchor);
        Ok(Cube {
            dim: raw.anchor.len(),
            anchor,
            side: raw.side,
        })
    }
}

impl Cube {
    pub fn new(domain: &GridDomain, anchor: &[usize], side: usize) -> Result<Self> {
        if anchor.len() != domain.dimension() {
            return arg_err(format!(
                "anchor has {} coordinates, domain has dimension {}",
                anchor.len(),
                domain.dimension()
            ));
        }
        if side == 0 {
            return arg_err("cube side must be at least one cell");
        }
        let mut a = [0; MAX_DIM];
        a[..anchor.len()].copy_from_slice(anchor);
        let cube = Self {
            dim: anchor.len(),
            anchor: a,
            side,
        };
        cube.check_inside(domain)?;
        Ok(cube)
    }

    /// The whole box.
    pub fn full(domain: &GridDomain) -> Self {
        Self {
            dim: domain.dimension(),
            anchor: [0; MAX_DIM],
            side: domain.cells_per_side(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn anchor(&self) -> &[usize] {
        &self.anchor[..self.dim]
    }

    pub fn side(&self) -> usize {
        self.side
    }

    /// `(side h)^n`.
    pub fn measure(&self, domain: &GridDomain) -> f64 {
        (self.side as f64 * domain.cell_side()).powi(self.dim as i32)
    }

    pub fn is_dyadic(&self) -> bool {
        self.side.is_power_of_two() && self.anchor().iter().all(|a| a % self.side == 0)
    }

    pub fn check_inside(&self, domain: &GridDomain) -> Result<()> {
        let n = domain.cells_per_side();
        if self.dim != domain.dimension() || self.anchor().iter().any(|&a| a + self.side > n) {
            return Err(Error::Domain(format!(
                "cube {:?} side {} does not fit a {}-d grid of {} cells per side",
                self.anchor(),
                self.side,
                domain.dimension(),
                n
            )));
        }
        Ok(())
    }

    pub fn contains_cell(&self, domain: &GridDomain, cell: usize) -> bool {
        let c = domain.coords(cell);
        (0..self.dim).all(|k| c[k] >= self.anchor[k] && c[k] < self.anchor[k] + self.side)
    }

    pub fn contains_cube(&self, other: &Cube) -> bool {
        (0..self.dim)
            .all(|k| other.anchor[k] >= self.anchor[k] && other.anchor[k] + other.side <= self.anchor[k] + self.side)
    }

    /// Flat indices of the cells in the cube, row-major.
    pub fn cells<'a>(&'a self, domain: &'a GridDomain) -> impl Iterator<Item = usize> + 'a {
        let count = self.side.pow(self.dim as u32);
        (0..count).map(move |offset| {
            let mut rest = offset;
            let mut coords = [0; MAX_DIM];
            for k in (0..self.dim).rev() {
                coords[k] = self.anchor[k] + rest % self.side;
                rest /= self.side;
            }
            domain.index(&coords[..self.dim])
        })
    }

    pub fn to_region(&self, domain: &GridDomain) -> Region {
        let h = domain.cell_side();
        let mut lower = [0.0; MAX_DIM];
        for k in 0..self.dim {
            lower[k] = self.anchor[k] as f64 * h;
        }
        Region {
            dim: self.dim,
            lower,
            side: self.side as f64 * h,
        }
    }
}

/// Every cube of `family`, side ascending, anchors in lexicographic order.
pub fn enumerate_cubes(domain: &GridDomain, family: CubeFamily) -> Vec<Cube> {
    let n = domain.cells_per_side();
    let dim = domain.dimension();
    let mut out = Vec::new();
    let mut side = 1;
    while side <= n {
        let step = match family {
            CubeFamily::All => 1,
            CubeFamily::Dyadic => side,
        };
        let per_axis = (n - side) / step + 1;
        let count = per_axis.pow(dim as u32);
        for offset in 0..count {
            let mut rest = offset;
            let mut anchor = [0; MAX_DIM];
            for k in (0..dim).rev() {
                anchor[k] = (rest % per_axis) * step;
                rest /= per_axis;
            }
            out.push(Cube { dim, anchor, side });
        }
        side = match family {
            CubeFamily::All => side + 1,
            CubeFamily::Dyadic => side * 2,
        };
    }
    out
}

/// An axis-parallel cube in absolute coordinates, possibly reaching outside
/// the grid box. Block supports are regions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    dim: usize,
    lower: [f64; MAX_DIM],
    side: f64,
}

impl Region {
    pub fn new(lower: &[f64], side: f64) -> Result<Self> {
        if lower.is_empty() || lower.len() > MAX_DIM {
            return arg_err("region dimension must be 1..=3");
        }
        if !(side > 0.0 && side.is_finite()) || lower.iter().any(|x| !x.is_finite()) {
            return arg_err("region needs finite corner and positive side");
        }
        let mut l = [0.0; MAX_DIM];
        l[..lower.len()].copy_from_slice(lower);
        Ok(Self {
            dim: lower.len(),
            lower: l,
            side,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower[..self.dim]
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    /// Uncropped measure `side^n`.
    pub fn measure(&self) -> f64 {
        self.side.powi(self.dim as i32)
    }

    /// Whether the closed box of `cell` lies in the closed region, up to a
    /// relative slack of `1e-9` cell sides.
    pub fn contains_cell(&self, domain: &GridDomain, cell: usize) -> bool {
        let h = domain.cell_side();
        let slack = 1e-9 * h;
        let c = domain.coords(cell);
        (0..self.dim).all(|k| {
            let lo = c[k] as f64 * h;
            lo + slack >= self.lower[k] && lo + h <= self.lower[k] + self.side + slack
        })
    }

    pub fn contains_region(&self, other: &Region) -> bool {
        let slack = 1e-12 * self.side.max(other.side);
        self.dim == other.dim
            && (0..self.dim).all(|k| {
                other.lower[k] + slack >= self.lower[k]
                    && other.lower[k] + other.side <= self.lower[k] + self.side + slack
            })
    }
}

/// The concentric cube `3Q` with side `3 m h`. Its measure is `3^n |Q|`
/// whether or not it fits the box.
pub fn triple(cube: &Cube, domain: &GridDomain) -> Region {
    let h = domain.cell_side();
    let m = cube.side() as f64;
    let mut lower = [0.0; MAX_DIM];
    for (k, &a) in cube.anchor().iter().enumerate() {
        lower[k] = (a as f64 - m) * h;
    }
    Region {
        dim: cube.dimension(),
        lower,
        side: 3.0 * m * h,
    }
}
