//! Basin-of-attraction rendering over the complex plane.
//!
//! A rectangular window is sampled at pixel centers; each sample is iterated
//! in binary64 complex arithmetic until it lands within a capture tolerance
//! of a known root, diverges, fails a kernel step, or exhausts the iteration
//! budget. Converged pixels are colored by root index; everything else is
//! black. Renders are deterministic: rows are processed in parallel but each
//! pixel's orbit depends only on its own coordinates.

use rayon::prelude::*;
use std::io::Write;
use thiserror::Error;

use crate::methods::{step, step_mns_with_theta, theta, MethodKind, MethodSpec, StepStatus};
use crate::numerics::ComplexScalar;
use crate::problems::PolynomialProblem;

/// Orbits beyond this magnitude are declared divergent.
pub const DIVERGENCE_RADIUS: f64 = 1e12;

/// Saturated, mutually distinguishable colors for up to six roots.
pub const DEFAULT_PALETTE: [[u8; 3]; 6] = [
    [228, 26, 28],
    [55, 126, 184],
    [77, 175, 74],
    [152, 78, 163],
    [255, 127, 0],
    [255, 255, 51],
];

/// Window, resolution, and iteration budget of one render.
#[derive(Debug, Clone)]
pub struct BasinConfig {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub width: usize,
    pub height: usize,
    pub max_iterations: u32,
    /// Capture radius around each root.
    pub tolerance: f64,
}

impl Default for BasinConfig {
    fn default() -> Self {
        BasinConfig {
            re_min: -3.0,
            re_max: 3.0,
            im_min: -3.0,
            im_max: 3.0,
            width: 512,
            height: 512,
            max_iterations: 100,
            tolerance: 1e-3,
        }
    }
}

#[derive(Debug, Error)]
pub enum BasinError {
    #[error("invalid render window or resolution: {0}")]
    InvalidBounds(String),
    #[error("the polynomial declares no roots to classify against")]
    NoRoots,
    #[error("roots {i} and {j} are {distance:.3e} apart, closer than twice the capture tolerance")]
    RootsTooClose { i: usize, j: usize, distance: f64 },
    #[error("palette has {got} colors but the polynomial has {needed} roots")]
    PaletteTooSmall { needed: usize, got: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl BasinConfig {
    fn validate(&self, roots: &[ComplexScalar]) -> Result<(), BasinError> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.re_min >= self.re_max || self.im_min >= self.im_max {
            return Err(BasinError::InvalidBounds(format!(
                "window [{}, {}] x [{}, {}]",
                self.re_min, self.re_max, self.im_min, self.im_max
            )));
        }
        if self.width == 0 || self.height == 0 || self.max_iterations == 0 {
            return Err(BasinError::InvalidBounds(format!(
                "{}x{} pixels, {} iterations",
                self.width, self.height, self.max_iterations
            )));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(BasinError::InvalidBounds(format!(
                "capture tolerance {}",
                self.tolerance
            )));
        }
        if roots.is_empty() {
            return Err(BasinError::NoRoots);
        }
        for i in 0..roots.len() {
            for j in i + 1..roots.len() {
                let distance = (roots[i] - roots[j]).norm();
                if distance <= 2.0 * self.tolerance {
                    return Err(BasinError::RootsTooClose { i, j, distance });
                }
            }
        }
        Ok(())
    }
}

/// Outcome for one pixel: the captured root's index (None = black) and the
/// number of steps taken before capture (the full budget otherwise).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub root: Option<usize>,
    pub iterations: u32,
}

/// A classified pixel grid in row-major order, row 0 at the top of the
/// window (largest imaginary part).
#[derive(Debug, Clone)]
pub struct BasinGrid {
    config: BasinConfig,
    root_count: usize,
    cells: Vec<Cell>,
}

impl BasinGrid {
    pub fn width(&self) -> usize {
        self.config.width
    }

    pub fn height(&self) -> usize {
        self.config.height
    }

    pub fn root_count(&self) -> usize {
        self.root_count
    }

    pub fn config(&self) -> &BasinConfig {
        &self.config
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, col: usize, row: usize) -> Cell {
        assert!(col < self.config.width && row < self.config.height);
        self.cells[row * self.config.width + col]
    }

    /// The complex number sampled for this pixel.
    pub fn pixel_center(&self, col: usize, row: usize) -> ComplexScalar {
        let c = &self.config;
        let dre = (c.re_max - c.re_min) / c.width as f64;
        let dim = (c.im_max - c.im_min) / c.height as f64;
        ComplexScalar::new(
            c.re_min + (col as f64 + 0.5) * dre,
            c.im_max - (row as f64 + 0.5) * dim,
        )
    }
}

fn captured(roots: &[ComplexScalar], z: ComplexScalar, tolerance: f64) -> Option<usize> {
    let tol_sq = tolerance * tolerance;
    roots
        .iter()
        .position(|r| (z - r).norm_sqr() <= tol_sq)
}

/// Iterates one starting point and reports (captured root, steps taken).
///
/// Capture is checked before each step, so a seed already within tolerance
/// of a root reports zero iterations. Divergence past [`DIVERGENCE_RADIUS`],
/// a non-finite iterate, or a failed kernel step classifies the point as
/// non-converged with the full budget spent.
pub fn classify_point(
    poly: &PolynomialProblem,
    spec: &MethodSpec,
    z0: ComplexScalar,
    max_iterations: u32,
    tolerance: f64,
) -> (Option<usize>, u32) {
    let roots = poly.roots();
    // The damping factor is a per-render constant; hoist it out of the
    // per-step path.
    let damping = theta(poly.outer_power(), &z0);
    let mut z = z0;
    let mut iterations = 0u32;
    loop {
        if !z.re.is_finite() || !z.im.is_finite() || z.norm_sqr() > DIVERGENCE_RADIUS * DIVERGENCE_RADIUS {
            return (None, max_iterations);
        }
        if let Some(k) = captured(roots, z, tolerance) {
            return (Some(k), iterations);
        }
        if iterations == max_iterations {
            return (None, max_iterations);
        }
        let out = match spec.kind {
            MethodKind::ModifiedNewtonSecant => step_mns_with_theta(poly, &z, &damping),
            _ => step(poly, &z, spec),
        };
        if out.status != StepStatus::Ok {
            return (None, max_iterations);
        }
        z = out.next;
        iterations += 1;
    }
}

/// Classifies every pixel of the window in parallel row bands.
pub fn render(
    poly: &PolynomialProblem,
    spec: &MethodSpec,
    config: &BasinConfig,
) -> Result<BasinGrid, BasinError> {
    config.validate(poly.roots())?;
    let (width, height) = (config.width, config.height);
    let dre = (config.re_max - config.re_min) / width as f64;
    let dim = (config.im_max - config.im_min) / height as f64;
    let mut cells = vec![
        Cell {
            root: None,
            iterations: 0
        };
        width * height
    ];
    cells
        .par_chunks_mut(width)
        .enumerate()
        .for_each(|(row, band)| {
            let im = config.im_max - (row as f64 + 0.5) * dim;
            for (col, cell) in band.iter_mut().enumerate() {
                let re = config.re_min + (col as f64 + 0.5) * dre;
                let (root, iterations) = classify_point(
                    poly,
                    spec,
                    ComplexScalar::new(re, im),
                    config.max_iterations,
                    config.tolerance,
                );
                *cell = Cell { root, iterations };
            }
        });
    Ok(BasinGrid {
        config: config.clone(),
        root_count: poly.roots().len(),
        cells,
    })
}

/// Aggregate counts over a rendered grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BasinStats {
    /// Converged pixels per root index.
    pub root_counts: Vec<usize>,
    /// Non-converged (black) pixels.
    pub black_count: usize,
    /// Mean steps to capture over converged pixels (0 when none converged).
    pub mean_iterations: f64,
}

impl BasinStats {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, count) in self.root_counts.iter().enumerate() {
            out.push_str(&format!("root_{k}_count: {count}\n"));
        }
        out.push_str(&format!("black_count: {}\n", self.black_count));
        out.push_str(&format!("mean_iterations: {:.4}\n", self.mean_iterations));
        out
    }
}

pub fn stats(grid: &BasinGrid) -> BasinStats {
    let mut root_counts = vec![0usize; grid.root_count];
    let mut black_count = 0usize;
    let mut iteration_sum = 0u64;
    for cell in grid.cells() {
        match cell.root {
            Some(k) => {
                root_counts[k] += 1;
                iteration_sum += u64::from(cell.iterations);
            }
            None => black_count += 1,
        }
    }
    let converged = grid.cells().len() - black_count;
    let mean_iterations = if converged > 0 {
        iteration_sum as f64 / converged as f64
    } else {
        0.0
    };
    BasinStats {
        root_counts,
        black_count,
        mean_iterations,
    }
}

fn palette_for(grid: &BasinGrid, palette: &[[u8; 3]]) -> Result<(), BasinError> {
    if palette.len() < grid.root_count {
        return Err(BasinError::PaletteTooSmall {
            needed: grid.root_count,
            got: palette.len(),
        });
    }
    Ok(())
}

/// Writes the grid as a binary PPM (P6): root color per converged pixel,
/// black elsewhere.
pub fn write_image<W: Write>(
    grid: &BasinGrid,
    palette: &[[u8; 3]],
    mut out: W,
) -> Result<(), BasinError> {
    palette_for(grid, palette)?;
    let mut bytes = Vec::with_capacity(grid.cells().len() * 3 + 32);
    bytes.extend_from_slice(format!("P6\n{} {}\n255\n", grid.width(), grid.height()).as_bytes());
    for cell in grid.cells() {
        let rgb = match cell.root {
            Some(k) => palette[k],
            None => [0, 0, 0],
        };
        bytes.extend_from_slice(&rgb);
    }
    out.write_all(&bytes)?;
    Ok(())
}

/// Like [`write_image`] but darkens each pixel by how many iterations its
/// capture took, which brings out the basin geometry near boundaries.
pub fn write_image_shaded<W: Write>(
    grid: &BasinGrid,
    palette: &[[u8; 3]],
    mut out: W,
) -> Result<(), BasinError> {
    palette_for(grid, palette)?;
    let budget = grid.config.max_iterations.max(1) as f64;
    let mut bytes = Vec::with_capacity(grid.cells().len() * 3 + 32);
    bytes.extend_from_slice(format!("P6\n{} {}\n255\n", grid.width(), grid.height()).as_bytes());
    for cell in grid.cells() {
        let rgb = match cell.root {
            Some(k) => {
                let shade = 1.0 - 0.65 * (f64::from(cell.iterations) / budget).min(1.0);
                palette[k].map(|c| (f64::from(c) * shade).round() as u8)
            }
            None => [0, 0, 0],
        };
        bytes.extend_from_slice(&rgb);
    }
    out.write_all(&bytes)?;
    Ok(())
}
