use nalgebra::DVector;
use rayon::prelude::*;

use super::PolyGauss;
use crate::error::{Error, Result};
use crate::matcore;

/// Maximum number of coarse grid points.
pub const GRID_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone)]
pub struct GridMin {
    pub value: f64,
    pub argmin: DVector<f64>,
}

/// Center and half-width of the cube scanned for `f`.
///
/// Half-width is `box_sigmas · (largest shape standard deviation)` plus the
/// spread of term centers.
pub fn grid_box(f: &PolyGauss, box_sigmas: f64) -> Result<(DVector<f64>, f64)> {
    if !(box_sigmas.is_finite() && box_sigmas > 0.0) {
        return Err(Error::InvalidArgument(format!("box_sigmas must be positive, got {box_sigmas}")));
    }
    let center = f.typical_center();
    let mut sigma: f64 = 0.0;
    let mut spread: f64 = 0.0;
    for t in f.terms() {
        let eig = matcore::sym_eig(t.shape())?;
        sigma = sigma.max(eig.values.max().sqrt());
        spread = spread.max((t.center() - &center).amax());
    }
    Ok((center, box_sigmas * sigma + spread))
}

/// One axis of a regular grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn point(&self, k: usize) -> f64 {
        if self.count == 1 {
            return self.min;
        }
        self.min + (self.max - self.min) * k as f64 / (self.count - 1) as f64
    }
}

/// Samples of a function on a regular grid, row-major (last axis fastest).
#[derive(Debug, Clone)]
pub struct GridSamples {
    pub axes: Vec<GridAxis>,
    pub values: Vec<f64>,
}

impl GridSamples {
    /// Coordinates of the flat sample index `idx`.
    pub fn coords(&self, idx: usize) -> Vec<f64> {
        let mut rest = idx;
        let mut out = vec![0.0; self.axes.len()];
        for (i, ax) in self.axes.iter().enumerate().rev() {
            out[i] = ax.point(rest % ax.count);
            rest /= ax.count;
        }
        out
    }
}

/// Evaluates `f` on the cube of [`grid_box`] with `per_axis` points per axis.
pub fn sample_grid(f: &PolyGauss, box_sigmas: f64, per_axis: usize) -> Result<GridSamples> {
    if per_axis < 2 {
        return Err(Error::InvalidArgument(format!("per_axis must be at least 2, got {per_axis}")));
    }
    let dim = f.dim();
    let points = (per_axis as u64).checked_pow(dim as u32).unwrap_or(u64::MAX);
    if points > GRID_BUDGET {
        return Err(Error::BudgetExceeded { points, budget: GRID_BUDGET });
    }
    let (center, half) = grid_box(f, box_sigmas)?;
    let axes: Vec<GridAxis> =
        (0..dim).map(|i| GridAxis { min: center[i] - half, max: center[i] + half, count: per_axis }).collect();
    let mut grid = GridSamples { axes, values: Vec::new() };
    grid.values = (0..points as usize)
        .into_par_iter()
        .map(|idx| f.eval(&DVector::from_vec(grid.coords(idx))))
        .collect();
    Ok(grid)
}

/// Coarse scan of the [`grid_box`] cube followed by compass-search refinement.
pub fn grid_min(f: &PolyGauss, box_sigmas: f64, per_axis: usize) -> Result<GridMin> {
    if per_axis < 8 {
        return Err(Error::InvalidArgument(format!("per_axis must be at least 8, got {per_axis}")));
    }
    let dim = f.dim();
    let points = (per_axis as u64).checked_pow(dim as u32).unwrap_or(u64::MAX);
    if points > GRID_BUDGET {
        return Err(Error::BudgetExceeded { points, budget: GRID_BUDGET });
    }
    let (center, half) = grid_box(f, box_sigmas)?;
    let h = 2.0 * half / (per_axis - 1) as f64;
    let point = |idx: u64| {
        let mut rest = idx;
        DVector::from_fn(dim, |i, _| {
            let k = rest % per_axis as u64;
            rest /= per_axis as u64;
            center[i] - half + h * k as f64
        })
    };
    let (best_val, best_idx) = (0..points)
        .into_par_iter()
        .map(|idx| (f.eval(&point(idx)), idx))
        .reduce(|| (f64::INFINITY, u64::MAX), |a, b| if (b.0, b.1) < (a.0, a.1) { b } else { a });

    let mut x = point(best_idx);
    let mut fx = best_val;
    let mut step = h;
    let floor = 1e-12 * half.max(1e-300);
    let mut iters = 0;
    while step > floor && iters < 100_000 {
        iters += 1;
        let mut moved = false;
        for i in 0..dim {
            for sign in [1.0, -1.0] {
                let mut y = x.clone();
                y[i] += sign * step;
                let fy = f.eval(&y);
                if fy < fx {
                    x = y;
                    fx = fy;
                    moved = true;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    Ok(GridMin { value: fx, argmin: x })
}
