use super::determine::CapacitySet;
use crate::error::{Error, Result};
use crate::linalg::Vector;

/// Membership of a 2-D capacity set on a `grid x grid` lattice.
///
/// `inside[iy * grid + ix]` belongs to the point `(xs[ix], ys[iy])`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionRaster {
    pub grid: usize,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub inside: Vec<bool>,
}

impl RegionRaster {
    pub fn at(&self, ix: usize, iy: usize) -> bool {
        self.inside[iy * self.grid + ix]
    }

    /// Lattice points with their verdicts, row-major.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64, bool)> + '_ {
        self.ys.iter().enumerate().flat_map(move |(iy, &y)| {
            self.xs
                .iter()
                .enumerate()
                .map(move |(ix, &x)| (x, y, self.at(ix, iy)))
        })
    }
}

/// Convex combination of the endpoints; mirrored ranges give exactly
/// mirrored lattices.
fn lattice((lo, hi): (f64, f64), grid: usize) -> Vec<f64> {
    let last = (grid - 1) as f64;
    (0..grid)
        .map(|i| (lo * (last - i as f64) + hi * i as f64) / last)
        .collect()
}

pub fn region_sample(
    cap: &CapacitySet,
    x_range: (f64, f64),
    y_range: (f64, f64),
    grid: usize,
) -> Result<RegionRaster> {
    if cap.n() != 2 {
        return Err(Error::InvalidArgument(format!(
            "region sampling needs a 2-D state, this system has n = {}",
            cap.n()
        )));
    }
    if grid < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid must be at least 2, got {grid}"
        )));
    }
    for (lo, hi) in [x_range, y_range] {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidArgument(format!(
                "invalid range [{lo}, {hi}]"
            )));
        }
    }
    let xs = lattice(x_range, grid);
    let ys = lattice(y_range, grid);
    let mut inside = Vec::with_capacity(grid * grid);
    for &y in &ys {
        for &x in &xs {
            inside.push(cap.membership(&Vector::new(vec![x, y])?)?.inside);
        }
    }
    Ok(RegionRaster {
        grid,
        xs,
        ys,
        inside,
    })
}
