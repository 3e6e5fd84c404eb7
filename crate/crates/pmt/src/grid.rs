//! Rectangular sample grids on `R^n x R`.
//!
//! Every field in this crate lives on a uniform axis-aligned grid.  The
//! first `n` axes are the transverse coordinates `x` and the final axis is
//! the distinguished coordinate `y`; samples are stored row-major, so the
//! `y` axis is contiguous in memory.  Half-space grids start at `y = dy`
//! and rely on the convention that fields extend by zero below them.

use crate::error::{PmtError, PmtResult};

/// Relative tolerance for the `dy = dx^2` lattice compatibility test.
const PARABOLOID_TOL: f64 = 1e-12;

/// Geometry of a uniform sample grid over `R^n x R`.
///
/// `n` counts only the transverse axes, so a grid over `R^1 x R` has two
/// axes and a grid over `R^2 x R` has three.  The `y` axis is always last.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    n: usize,
    dims: Vec<usize>,
    spacing: Vec<f64>,
    origin: Vec<f64>,
}

impl GridSpec {
    /// Creates a grid from explicit per-axis dims, spacings, and origins.
    ///
    /// # Arguments
    ///
    /// * `n` - Number of transverse axes (1 or 2)
    /// * `dims` - Sample counts, one per axis, `y` last
    /// * `spacing` - Strictly positive sample spacings, one per axis
    /// * `origin` - Coordinate of the first sample on each axis
    ///
    /// # Returns
    ///
    /// * The validated grid, or an error when a count or spacing is bad
    ///
    /// # Examples
    ///
    /// ```
    /// use pmt::grid::GridSpec;
    ///
    /// let g = GridSpec::new(1, vec![8, 16], vec![0.5, 0.25], vec![-2.0, 0.25]).unwrap();
    /// assert_eq!(g.len(), 128);
    /// assert!(g.is_paraboloid_compatible());
    /// ```
    pub fn new(
        n: usize,
        dims: Vec<usize>,
        spacing: Vec<f64>,
        origin: Vec<f64>,
    ) -> PmtResult<Self> {
        if n == 0 || n > 2 {
            return Err(PmtError::UnsupportedDimension(n));
        }
        let axes = n + 1;
        if dims.len() != axes || spacing.len() != axes || origin.len() != axes {
            return Err(PmtError::InvalidGrid(format!(
                "expected {} axes, got dims={}, spacing={}, origin={}",
                axes,
                dims.len(),
                spacing.len(),
                origin.len()
            )));
        }
        if dims.iter().any(|&d| d < 2) {
            return Err(PmtError::InvalidGrid(format!(
                "every axis needs at least 2 samples, got {:?}",
                dims
            )));
        }
        if spacing.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(PmtError::InvalidGrid(format!(
                "spacings must be positive and finite, got {:?}",
                spacing
            )));
        }
        if origin.iter().any(|&o| !o.is_finite()) {
            return Err(PmtError::InvalidGrid(format!(
                "origins must be finite, got {:?}",
                origin
            )));
        }
        Ok(GridSpec {
            n,
            dims,
            spacing,
            origin,
        })
    }

    /// Creates a half-space grid: transverse axes centered by the caller,
    /// `y` axis starting at `dy` so every sample lies strictly above the
    /// boundary.
    ///
    /// # Arguments
    ///
    /// * `n` - Number of transverse axes
    /// * `dims` - Sample counts, `y` last
    /// * `dx` - Transverse spacing, shared by all transverse axes
    /// * `dy` - Spacing along `y`
    /// * `x_origin` - First sample coordinate on each transverse axis
    pub fn half_space(
        n: usize,
        dims: Vec<usize>,
        dx: f64,
        dy: f64,
        x_origin: Vec<f64>,
    ) -> PmtResult<Self> {
        if x_origin.len() != n {
            return Err(PmtError::InvalidGrid(format!(
                "expected {} transverse origins, got {}",
                n,
                x_origin.len()
            )));
        }
        let mut spacing = vec![dx; n];
        spacing.push(dy);
        let mut origin = x_origin;
        origin.push(dy);
        GridSpec::new(n, dims, spacing, origin)
    }

    /// Half-space grid with `dy = dx^2`, the lattice on which the discrete
    /// paraboloid convolution is exact.
    pub fn half_space_paraboloid(
        n: usize,
        dims: Vec<usize>,
        dx: f64,
        x_origin: Vec<f64>,
    ) -> PmtResult<Self> {
        GridSpec::half_space(n, dims, dx, dx * dx, x_origin)
    }

    /// Number of transverse axes.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of axes (`n + 1`).
    pub fn axes(&self) -> usize {
        self.n + 1
    }

    /// Per-axis sample counts, `y` last.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Per-axis spacings, `y` last.
    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    /// Per-axis first-sample coordinates, `y` last.
    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    /// Total sample count.
    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    /// True when the grid holds no samples; cannot happen for a validated
    /// grid but kept for the usual pairing with `len`.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Spacing along the distinguished axis.
    pub fn dy(&self) -> f64 {
        self.spacing[self.n]
    }

    /// Transverse spacing; errors if the transverse axes disagree.
    pub fn dx(&self) -> PmtResult<f64> {
        let dx = self.spacing[0];
        if self.spacing[..self.n].iter().any(|&s| s != dx) {
            return Err(PmtError::IncompatibleGrid(format!(
                "transverse spacings differ: {:?}",
                &self.spacing[..self.n]
            )));
        }
        Ok(dx)
    }

    /// First `y` sample coordinate.
    pub fn y0(&self) -> f64 {
        self.origin[self.n]
    }

    /// Last `y` sample coordinate.
    pub fn y_max(&self) -> f64 {
        self.coord(self.n, self.dims[self.n] - 1)
    }

    /// Sample count along `y`.
    pub fn ny(&self) -> usize {
        self.dims[self.n]
    }

    /// Coordinate of sample `i` on `axis`.
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + self.spacing[axis] * i as f64
    }

    /// All sample coordinates along `axis`.
    pub fn axis_coords(&self, axis: usize) -> Vec<f64> {
        (0..self.dims[axis]).map(|i| self.coord(axis, i)).collect()
    }

    /// Volume of one grid cell, the product of all spacings.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    /// Flat row-major index of a multi-index.
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.axes());
        let mut flat = 0;
        for (a, &i) in idx.iter().enumerate() {
            debug_assert!(i < self.dims[a]);
            flat = flat * self.dims[a] + i;
        }
        flat
    }

    /// True when all samples lie strictly above `y = 0`.
    pub fn is_half_space_grid(&self) -> bool {
        self.y0() > 0.0
    }

    /// True when the transverse spacings agree and `dy` matches their
    /// square to relative precision, the compatibility the paraboloid
    /// stencils require.
    pub fn is_paraboloid_compatible(&self) -> bool {
        let dx = match self.dx() {
            Ok(dx) => dx,
            Err(_) => return false,
        };
        let dy = self.dy();
        (dy - dx * dx).abs() <= PARABOLOID_TOL * dy
    }

    /// Errors unless the grid is paraboloid compatible.
    pub fn require_paraboloid_compatible(&self) -> PmtResult<()> {
        if self.is_paraboloid_compatible() {
            Ok(())
        } else {
            Err(PmtError::IncompatibleGrid(format!(
                "need dy = dx^2, got dx={:?} dy={}",
                &self.spacing[..self.n],
                self.dy()
            )))
        }
    }

    /// Errors unless `other` is the identical grid.
    pub fn require_same(&self, other: &GridSpec) -> PmtResult<()> {
        if self == other {
            Ok(())
        } else {
            Err(PmtError::GridMismatch(format!(
                "dims {:?} vs {:?}, spacing {:?} vs {:?}, origin {:?} vs {:?}",
                self.dims, other.dims, self.spacing, other.spacing, self.origin, other.origin
            )))
        }
    }

    /// Diameter of the bounding box of the sample points.
    pub fn bounding_diameter(&self) -> f64 {
        let mut sq = 0.0;
        for a in 0..self.axes() {
            let extent = self.spacing[a] * (self.dims[a] - 1) as f64;
            sq += extent * extent;
        }
        sq.sqrt()
    }

    /// Center of the bounding box of the sample points.
    pub fn bounding_center(&self) -> Vec<f64> {
        (0..self.axes())
            .map(|a| self.origin[a] + 0.5 * self.spacing[a] * (self.dims[a] - 1) as f64)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_single_sample_axis() {
        assert!(GridSpec::new(1, vec![1, 4], vec![1.0, 1.0], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn rejects_nonpositive_spacing() {
        assert!(GridSpec::new(1, vec![4, 4], vec![0.0, 1.0], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn half_space_grid_starts_at_dy() {
        let g = GridSpec::half_space(1, vec![4, 8], 0.5, 0.25, vec![-1.0]).unwrap();
        assert_eq!(g.y0(), 0.25);
        assert!(g.is_half_space_grid());
        assert!(g.is_paraboloid_compatible());
    }
}
