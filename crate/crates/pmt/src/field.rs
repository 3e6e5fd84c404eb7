//! Sampled scalar fields and multilinear interpolation.

use crate::error::{PmtError, PmtResult};
use crate::grid::GridSpec;
use crate::sum::pairwise_sum_by;

/// A real scalar field sampled on a [`GridSpec`].
///
/// Values are stored row-major with the `y` axis contiguous.  Two flags
/// describe how the field extends beyond its sample box: `half_space`
/// asserts the field is zero at and below `y = 0` (and zero outside the
/// box), while `compact_support` asserts it is zero outside the box in
/// every direction.  Either flag turns out-of-box interpolation into
/// zero extension; without them, out-of-box queries are errors.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: GridSpec,
    values: Vec<f64>,
    half_space: bool,
    compact_support: bool,
}

impl Field {
    /// Creates a zero field on `grid`.
    pub fn zeros(grid: GridSpec) -> Self {
        let len = grid.len();
        Field {
            grid,
            values: vec![0.0; len],
            half_space: false,
            compact_support: false,
        }
    }

    /// Creates a field from explicit sample values.
    ///
    /// # Arguments
    ///
    /// * `grid` - Grid geometry
    /// * `values` - Row-major samples, `y` axis contiguous
    ///
    /// # Returns
    ///
    /// * The field, or an error when the value count disagrees with the grid
    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> PmtResult<Self> {
        if values.len() != grid.len() {
            return Err(PmtError::GridMismatch(format!(
                "grid holds {} samples but {} values were given",
                grid.len(),
                values.len()
            )));
        }
        Ok(Field {
            grid,
            values,
            half_space: false,
            compact_support: false,
        })
    }

    /// Samples `f` at every grid point.
    ///
    /// # Arguments
    ///
    /// * `grid` - Grid geometry
    /// * `f` - Point evaluator, called with the coordinates of each sample
    ///
    /// # Examples
    ///
    /// ```
    /// use pmt::grid::GridSpec;
    /// use pmt::field::Field;
    ///
    /// let g = GridSpec::half_space(1, vec![4, 4], 1.0, 1.0, vec![0.0]).unwrap();
    /// let f = Field::from_fn(g, |p| p[0] + p[1]);
    /// assert_eq!(f.values()[0], 1.0);
    /// ```
    pub fn from_fn<F: Fn(&[f64]) -> f64>(grid: GridSpec, f: F) -> Self {
        let mut field = Field::zeros(grid);
        let axes = field.grid.axes();
        let mut point = vec![0.0; axes];
        if axes == 2 {
            let (nx, ny) = (field.grid.dims()[0], field.grid.dims()[1]);
            let mut flat = 0;
            for i in 0..nx {
                point[0] = field.grid.coord(0, i);
                for j in 0..ny {
                    point[1] = field.grid.coord(1, j);
                    field.values[flat] = f(&point);
                    flat += 1;
                }
            }
        } else {
            let (n0, n1, n2) = (
                field.grid.dims()[0],
                field.grid.dims()[1],
                field.grid.dims()[2],
            );
            let mut flat = 0;
            for i in 0..n0 {
                point[0] = field.grid.coord(0, i);
                for j in 0..n1 {
                    point[1] = field.grid.coord(1, j);
                    for k in 0..n2 {
                        point[2] = field.grid.coord(2, k);
                        field.values[flat] = f(&point);
                        flat += 1;
                    }
                }
            }
        }
        field
    }

    /// Grid geometry.
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Sample values, row-major with `y` contiguous.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mutable sample values.
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Whether the field declares the half-space zero extension.
    pub fn half_space(&self) -> bool {
        self.half_space
    }

    /// Whether the field declares compact support inside its box.
    pub fn compact_support(&self) -> bool {
        self.compact_support
    }

    /// Declares (or revokes) the half-space extension.
    ///
    /// Setting the flag requires every sample at `y <= 0` to be exactly
    /// zero; on half-space grids there are no such samples and the flag is
    /// always legal.
    pub fn with_half_space(mut self, flag: bool) -> PmtResult<Self> {
        if flag {
            let ny = self.grid.ny();
            let rows = self.grid.len() / ny;
            for j in 0..ny {
                if self.grid.coord(self.grid.n(), j) > 0.0 {
                    break;
                }
                for r in 0..rows {
                    if self.values[r * ny + j] != 0.0 {
                        return Err(PmtError::MissingHalfSpace(format!(
                            "sample at y = {} is nonzero, cannot declare half-space extension",
                            self.grid.coord(self.grid.n(), j)
                        )));
                    }
                }
            }
        }
        self.half_space = flag;
        Ok(self)
    }

    /// Declares (or revokes) compact support inside the sample box.
    pub fn with_compact_support(mut self, flag: bool) -> Self {
        self.compact_support = flag;
        self
    }

    /// Errors unless the half_space flag is set.
    pub fn require_half_space(&self, what: &str) -> PmtResult<()> {
        if self.half_space {
            Ok(())
        } else {
            Err(PmtError::MissingHalfSpace(format!(
                "{} requires a field with the half-space extension",
                what
            )))
        }
    }

    /// True when the point lies inside the sample box (inclusive).
    pub fn in_box(&self, point: &[f64]) -> bool {
        for a in 0..self.grid.axes() {
            let lo = self.grid.origin()[a];
            let hi = self.grid.coord(a, self.grid.dims()[a] - 1);
            if point[a] < lo || point[a] > hi {
                return false;
            }
        }
        true
    }

    /// Multilinear interpolation at an arbitrary point.
    ///
    /// Inside the sample box this is the usual per-axis linear blend and it
    /// reproduces sample values exactly at lattice points.  Outside the box
    /// the behavior depends on the extension flags: a half-space or
    /// compactly supported field is read as zero beyond the box (fading
    /// linearly across the one-cell boundary fringe, so the extension is
    /// continuous), while a field with neither flag reports
    /// [`PmtError::OutOfDomain`].
    ///
    /// # Arguments
    ///
    /// * `point` - Query coordinates, transverse axes first, `y` last
    ///
    /// # Returns
    ///
    /// * Interpolated value, or an error for out-of-box queries on fields
    ///   with no declared extension
    pub fn interpolate(&self, point: &[f64]) -> PmtResult<f64> {
        if point.len() != self.grid.axes() {
            return Err(PmtError::DimensionMismatch(format!(
                "field has {} axes but point has {} coordinates",
                self.grid.axes(),
                point.len()
            )));
        }
        if !self.in_box(point) && !self.half_space && !self.compact_support {
            return Err(PmtError::OutOfDomain(format!(
                "point {:?} outside sample box of a field with no zero extension",
                point
            )));
        }
        Ok(self.sample_extended(point))
    }

    /// Multilinear read with unconditional zero extension beyond the box.
    ///
    /// This is the raw kernel behind [`Field::interpolate`]; it performs no
    /// flag or bounds checks, so callers must know zero extension is the
    /// semantics they want.
    pub fn sample_extended(&self, point: &[f64]) -> f64 {
        match self.grid.axes() {
            2 => self.sample2(point[0], point[1]),
            _ => self.sample3(point[0], point[1], point[2]),
        }
    }

    /// Bilinear zero-extended read on a two-axis field.
    #[inline]
    pub(crate) fn sample2(&self, x: f64, y: f64) -> f64 {
        let g = &self.grid;
        let (nx, ny) = (g.dims()[0], g.dims()[1]);
        let cx = (x - g.origin()[0]) / g.spacing()[0];
        let cy = (y - g.origin()[1]) / g.spacing()[1];
        let (i0, fx) = split_cell(cx);
        let (j0, fy) = split_cell(cy);
        let mut acc = 0.0;
        for (di, wx) in [(0i64, 1.0 - fx), (1, fx)] {
            let i = i0 + di;
            if i < 0 || i >= nx as i64 || wx == 0.0 {
                continue;
            }
            let row = i as usize * ny;
            for (dj, wy) in [(0i64, 1.0 - fy), (1, fy)] {
                let j = j0 + dj;
                if j < 0 || j >= ny as i64 || wy == 0.0 {
                    continue;
                }
                acc += wx * wy * self.values[row + j as usize];
            }
        }
        acc
    }

    /// Trilinear zero-extended read on a three-axis field.
    #[inline]
    pub(crate) fn sample3(&self, x1: f64, x2: f64, y: f64) -> f64 {
        let g = &self.grid;
        let (n0, n1, n2) = (g.dims()[0], g.dims()[1], g.dims()[2]);
        let c0 = (x1 - g.origin()[0]) / g.spacing()[0];
        let c1 = (x2 - g.origin()[1]) / g.spacing()[1];
        let c2 = (y - g.origin()[2]) / g.spacing()[2];
        let (i0, f0) = split_cell(c0);
        let (j0, f1) = split_cell(c1);
        let (k0, f2) = split_cell(c2);
        let mut acc = 0.0;
        for (di, w0) in [(0i64, 1.0 - f0), (1, f0)] {
            let i = i0 + di;
            if i < 0 || i >= n0 as i64 || w0 == 0.0 {
                continue;
            }
            for (dj, w1) in [(0i64, 1.0 - f1), (1, f1)] {
                let j = j0 + dj;
                if j < 0 || j >= n1 as i64 || w1 == 0.0 {
                    continue;
                }
                let base = (i as usize * n1 + j as usize) * n2;
                for (dk, w2) in [(0i64, 1.0 - f2), (1, f2)] {
                    let k = k0 + dk;
                    if k < 0 || k >= n2 as i64 || w2 == 0.0 {
                        continue;
                    }
                    acc += w0 * w1 * w2 * self.values[base + k as usize];
                }
            }
        }
        acc
    }

    /// Discrete inner product with the grid cell volume as the weight.
    ///
    /// # Arguments
    ///
    /// * `other` - Field on the identical grid
    ///
    /// # Returns
    ///
    /// * `sum_i a_i b_i * prod(spacing)`, or an error on grid mismatch
    ///
    /// # Examples
    ///
    /// ```
    /// use pmt::grid::GridSpec;
    /// use pmt::field::Field;
    ///
    /// let g = GridSpec::new(1, vec![2, 2], vec![1.0, 1.0], vec![0.0, 1.0]).unwrap();
    /// let ones = Field::from_fn(g, |_| 1.0);
    /// assert_eq!(ones.inner_product(&ones).unwrap(), 4.0);
    /// ```
    pub fn inner_product(&self, other: &Field) -> PmtResult<f64> {
        self.grid.require_same(&other.grid)?;
        let dot = pairwise_sum_by(self.values.len(), |i| self.values[i] * other.values[i]);
        Ok(dot * self.grid.cell_volume())
    }

    /// Discrete `L^2` norm induced by [`Field::inner_product`].
    pub fn norm(&self) -> f64 {
        let sq = pairwise_sum_by(self.values.len(), |i| self.values[i] * self.values[i]);
        (sq * self.grid.cell_volume()).sqrt()
    }

    /// Largest absolute sample value.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, &v| m.max(v.abs()))
    }

    /// Returns the field scaled by `c`, keeping extension flags.
    pub fn scaled(&self, c: f64) -> Field {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= c;
        }
        out
    }

    /// Pointwise sum; grids must match. Extension flags survive only if
    /// both operands declare them.
    pub fn try_add(&self, other: &Field) -> PmtResult<Field> {
        self.grid.require_same(&other.grid)?;
        let mut out = self.clone();
        for (v, w) in out.values.iter_mut().zip(&other.values) {
            *v += w;
        }
        out.half_space = self.half_space && other.half_space;
        out.compact_support = self.compact_support && other.compact_support;
        Ok(out)
    }

    /// Pointwise difference; grids must match.
    pub fn try_sub(&self, other: &Field) -> PmtResult<Field> {
        self.grid.require_same(&other.grid)?;
        let mut out = self.clone();
        for (v, w) in out.values.iter_mut().zip(&other.values) {
            *v -= w;
        }
        out.half_space = self.half_space && other.half_space;
        out.compact_support = self.compact_support && other.compact_support;
        Ok(out)
    }
}

/// Splits a fractional cell coordinate into its base index and offset.
#[inline]
fn split_cell(c: f64) -> (i64, f64) {
    let f = c.floor();
    (f as i64, c - f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_grid() -> GridSpec {
        GridSpec::new(1, vec![3, 3], vec![1.0, 1.0], vec![0.0, 0.0]).unwrap()
    }

    #[test]
    fn lattice_points_interpolate_exactly() {
        let f = Field::from_fn(small_grid(), |p| 3.0 * p[0] - p[1]);
        assert_eq!(f.interpolate(&[2.0, 1.0]).unwrap(), 5.0);
    }

    #[test]
    fn out_of_box_errors_without_extension() {
        let f = Field::from_fn(small_grid(), |_| 1.0);
        assert!(f.interpolate(&[5.0, 0.0]).is_err());
    }

    #[test]
    fn out_of_box_reads_zero_with_compact_support() {
        let f = Field::from_fn(small_grid(), |_| 1.0).with_compact_support(true);
        assert_eq!(f.interpolate(&[5.0, 0.0]).unwrap(), 0.0);
    }
}
