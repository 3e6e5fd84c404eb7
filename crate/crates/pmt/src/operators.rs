//! Discrete spherical mean and paraboloid convolution operators.
//!
//! Two operator pairs live here.  `sphere_means_forward` averages a
//! half-space field over half-spheres centered on the boundary, and
//! `sphere_means_adjoint` is the matching dual sum; both are quadratures
//! with interpolated reads.  `parab_forward` convolves along the discrete
//! paraboloid `y = |k dx|^2`, which on a `dy = dx^2` grid needs no
//! interpolation at all, and `parab_adjoint` reuses the identical index
//! windows so the pair is adjoint to rounding error.
//!
//! Every output sample is accumulated independently (pairwise summation,
//! fixed term order), so results do not depend on the thread count.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{PmtError, PmtResult};
use crate::field::Field;
use crate::grid::GridSpec;
use crate::sum::pairwise_sum;

/// Default truncation radius: half the extent of the first transverse axis.
fn default_u_max(grid: &GridSpec) -> f64 {
    let dx = grid.spacing()[0];
    (grid.dims()[0] / 2) as f64 * dx
}

/// Largest stencil offset index for a truncation radius `u`.
fn offset_cap(u: f64, dx: f64) -> i64 {
    (u / dx + 1e-9).floor() as i64
}

/// Convolution along the paraboloid `y = |u|^2`, truncated at `|u| <= u_max`.
///
/// On a paraboloid-compatible grid the stencil points
/// `(x + k dx, y - |k|^2 dx^2)` are lattice points, so the sum
/// `G(x, y) = sum_k F(x + k dx, y - |k|^2 dx^2) dx^n` is exact in `x` and
/// `y`; stencil points below the grid read the half-space zero extension.
///
/// # Arguments
///
/// * `f` - Field on a paraboloid-compatible grid
/// * `u_max` - Truncation radius; `None` means half the transverse extent
///
/// # Returns
///
/// * The convolved field on the same grid, or an error when the grid is
///   not paraboloid compatible
pub fn parab_forward(f: &Field, u_max: Option<f64>) -> PmtResult<Field> {
    parab_stencil(f, u_max, false)
}

/// Exact discrete adjoint of [`parab_forward`] at the same truncation:
/// the stencil reads `(x + k dx, y + |k|^2 dx^2)` over the identical
/// index windows, so `<parab_forward(F), G> = <F, parab_adjoint(G)>` up to
/// rounding.
pub fn parab_adjoint(g: &Field, u_max: Option<f64>) -> PmtResult<Field> {
    parab_stencil(g, u_max, true)
}

fn parab_stencil(f: &Field, u_max: Option<f64>, adjoint: bool) -> PmtResult<Field> {
    let grid = f.grid();
    grid.require_paraboloid_compatible()?;
    let dx = grid.dx()?;
    let u = u_max.unwrap_or_else(|| default_u_max(grid));
    let cap = offset_cap(u, dx);
    let ny = grid.ny();
    let mut out = Field::zeros(grid.clone());

    match grid.n() {
        1 => {
            let nx = grid.dims()[0];
            let src = f.values();
            out.values_mut()
                .par_chunks_mut(ny)
                .enumerate()
                .for_each(|(i, row)| {
                    for k in -cap..=cap {
                        let ii = i as i64 + k;
                        if ii < 0 || ii >= nx as i64 {
                            continue;
                        }
                        let s = (k * k) as usize;
                        if s >= ny {
                            continue;
                        }
                        let other = &src[ii as usize * ny..ii as usize * ny + ny];
                        if adjoint {
                            // F(x, y) += G(x + k dx, y + k^2 dx^2)
                            for j in 0..ny - s {
                                row[j] += other[j + s];
                            }
                        } else {
                            // G(x, y) += F(x + k dx, y - k^2 dx^2)
                            for j in 0..ny - s {
                                row[j + s] += other[j];
                            }
                        }
                    }
                });
        }
        2 => {
            let (n0, n1) = (grid.dims()[0], grid.dims()[1]);
            let src = f.values();
            let rad2 = (u / dx + 1e-9) * (u / dx + 1e-9);
            out.values_mut()
                .par_chunks_mut(n1 * ny)
                .enumerate()
                .for_each(|(i1, plane)| {
                    for k1 in -cap..=cap {
                        let ii1 = i1 as i64 + k1;
                        if ii1 < 0 || ii1 >= n0 as i64 {
                            continue;
                        }
                        for k2 in -cap..=cap {
                            if ((k1 * k1 + k2 * k2) as f64) > rad2 {
                                continue;
                            }
                            let s = (k1 * k1 + k2 * k2) as usize;
                            if s >= ny {
                                continue;
                            }
                            for i2 in 0..n1 {
                                let ii2 = i2 as i64 + k2;
                                if ii2 < 0 || ii2 >= n1 as i64 {
                                    continue;
                                }
                                let dst = &mut plane[i2 * ny..i2 * ny + ny];
                                let obase = (ii1 as usize * n1 + ii2 as usize) * ny;
                                let other = &src[obase..obase + ny];
                                if adjoint {
                                    for j in 0..ny - s {
                                        dst[j] += other[j + s];
                                    }
                                } else {
                                    for j in 0..ny - s {
                                        dst[j + s] += other[j];
                                    }
                                }
                            }
                        }
                    }
                });
        }
        n => return Err(PmtError::UnsupportedDimension(n)),
    }

    let weight = dx.powi(grid.n() as i32);
    for v in out.values_mut() {
        *v *= weight;
    }
    let out = out.with_compact_support(f.compact_support());
    if f.half_space() && grid.is_half_space_grid() {
        Ok(out.with_half_space(true).expect("half-space grid"))
    } else {
        Ok(out)
    }
}

/// Mean over half-spheres centered on the boundary hyperplane.
///
/// For a half-space field `f`, the value at `(x, y)` is the average of
/// `f` over the upper half-sphere of radius `y` centered at `(x, 0)`.
/// With `n = 1` this reduces to
/// `(1 / pi) * sum_{+-} int_0^{pi/2} f(x +- y sin th, y cos th) dth`,
/// and with `n = 2` to
/// `int_0^{pi/2} sin ph * (azimuthal mean at radius y sin ph, height y cos ph) dph`;
/// both are evaluated by trapezoid rules with interpolated reads.
///
/// # Arguments
///
/// * `f` - Half-space field
/// * `oversample` - Quadrature density factor; node counts grow like
///   `oversample * y / dx`, and 2 is enough for smooth fields
///
/// # Returns
///
/// * The mean field on the same grid, or an error when `f` lacks the
///   half-space flag
pub fn sphere_means_forward(f: &Field, oversample: f64) -> PmtResult<Field> {
    f.require_half_space("sphere_means_forward")?;
    match f.grid().n() {
        1 => sphere_forward_2d(f, oversample),
        2 => sphere_forward_3d(f, oversample),
        n => Err(PmtError::UnsupportedDimension(n)),
    }
}

fn sphere_forward_2d(f: &Field, oversample: f64) -> PmtResult<Field> {
    let grid = f.grid().clone();
    let dx = grid.dx()?;
    let x0 = grid.origin()[0];
    let ny = grid.ny();
    let ys = grid.axis_coords(1);
    let mut out = Field::zeros(grid);

    out.values_mut()
        .par_chunks_mut(ny)
        .enumerate()
        .for_each(|(i, row)| {
            let x = x0 + i as f64 * dx;
            let mut buf: Vec<f64> = Vec::new();
            for (j, &y) in ys.iter().enumerate() {
                let nt = theta_count(y, dx, oversample);
                let step = (PI / 2.0) / (nt - 1) as f64;
                buf.clear();
                for q in 0..nt {
                    let th = step * q as f64;
                    let mut w = step;
                    if q == 0 || q == nt - 1 {
                        w *= 0.5;
                    }
                    let u = y * th.sin();
                    let h = y * th.cos();
                    buf.push(w * (f.sample2(x + u, h) + f.sample2(x - u, h)));
                }
                row[j] = pairwise_sum(&buf) / PI;
            }
        });

    finish_half_space(out)
}

fn sphere_forward_3d(f: &Field, oversample: f64) -> PmtResult<Field> {
    let grid = f.grid().clone();
    let dx = grid.dx()?;
    let ny = grid.ny();
    let (n0, n1) = (grid.dims()[0], grid.dims()[1]);
    let ys = grid.axis_coords(2);

    // One task per y level: each builds its height slices once and shares
    // them across all transverse centers.
    let columns: Vec<Vec<f64>> = (0..ny)
        .into_par_iter()
        .map(|j| {
            let y = ys[j];
            let nph = theta_count(y, dx, oversample);
            let step = (PI / 2.0) / (nph - 1) as f64;
            let mut acc = vec![0.0; n0 * n1];
            for q in 0..nph {
                let ph = step * q as f64;
                let mut w = step;
                if q == 0 || q == nph - 1 {
                    w *= 0.5;
                }
                let scale = w * ph.sin();
                if scale == 0.0 {
                    continue;
                }
                let h = y * ph.cos();
                let rho = y * ph.sin();
                let slice = height_slice(f, h);
                for i1 in 0..n0 {
                    let c1 = grid.coord(0, i1);
                    for i2 in 0..n1 {
                        let c2 = grid.coord(1, i2);
                        acc[i1 * n1 + i2] +=
                            scale * ring_average(&slice, &grid, c1, c2, rho);
                    }
                }
            }
            acc
        })
        .collect();

    let mut out = Field::zeros(grid);
    for (j, col) in columns.iter().enumerate() {
        for r in 0..n0 * n1 {
            out.values_mut()[r * ny + j] = col[r];
        }
    }
    finish_half_space(out)
}

/// Dual of the half-sphere mean: integrates `g` over the locus of sphere
/// centers whose spheres pass through `(x, y)`.
///
/// The value at `(x, y)` is
/// `int_{|u| <= U} g(x + u, sqrt(y^2 + |u|^2)) du`, truncated where the
/// radicand would leave the grid (and additionally at `u_max`); reads
/// beyond the grid are zero.
///
/// # Arguments
///
/// * `g` - Mean-side field; reads use zero extension
/// * `u_max` - Extra truncation radius; `None` means half the transverse
///   extent
pub fn sphere_means_adjoint(g: &Field, u_max: Option<f64>) -> PmtResult<Field> {
    match g.grid().n() {
        1 => sphere_adjoint_2d(g, u_max),
        2 => sphere_adjoint_3d(g, u_max),
        n => Err(PmtError::UnsupportedDimension(n)),
    }
}

fn sphere_adjoint_2d(g: &Field, u_max: Option<f64>) -> PmtResult<Field> {
    let grid = g.grid().clone();
    let dx = grid.dx()?;
    let x0 = grid.origin()[0];
    let ny = grid.ny();
    let ys = grid.axis_coords(1);
    let y_top = grid.y_max();
    let cap = u_max.unwrap_or_else(|| default_u_max(&grid));
    let mut out = Field::zeros(grid);

    out.values_mut()
        .par_chunks_mut(ny)
        .enumerate()
        .for_each(|(i, row)| {
            let x = x0 + i as f64 * dx;
            let mut buf: Vec<f64> = Vec::new();
            for (j, &y) in ys.iter().enumerate() {
                let reach = (y_top * y_top - y * y).max(0.0).sqrt();
                let u_cap = cap.min(reach);
                let nu = ((2.0 * u_cap / dx).ceil() as usize + 1).max(3);
                let du = (2.0 * u_cap) / (nu - 1) as f64;
                buf.clear();
                for q in 0..nu {
                    let u = -u_cap + du * q as f64;
                    let mut w = du;
                    if q == 0 || q == nu - 1 {
                        w *= 0.5;
                    }
                    buf.push(w * g.sample2(x + u, (y * y + u * u).sqrt()));
                }
                row[j] = pairwise_sum(&buf);
            }
        });

    finish_half_space(out)
}

fn sphere_adjoint_3d(g: &Field, u_max: Option<f64>) -> PmtResult<Field> {
    let grid = g.grid().clone();
    let dx = grid.dx()?;
    let ny = grid.ny();
    let (n0, n1) = (grid.dims()[0], grid.dims()[1]);
    let ys = grid.axis_coords(2);
    let y_top = grid.y_max();
    let cap = u_max.unwrap_or_else(|| default_u_max(&grid));

    let columns: Vec<Vec<f64>> = (0..ny)
        .into_par_iter()
        .map(|j| {
            let y = ys[j];
            let reach = (y_top * y_top - y * y).max(0.0).sqrt();
            let u_cap = cap.min(reach);
            let kq = (u_cap / dx).floor() as usize;
            let mut acc = vec![0.0; n0 * n1];
            if kq < 1 {
                return acc;
            }
            for q in 1..=kq {
                let rho = q as f64 * dx;
                let mut w = dx;
                if q == kq {
                    w *= 0.5;
                }
                let h = (y * y + rho * rho).sqrt();
                let slice = height_slice(g, h);
                let scale = w * 2.0 * PI * rho;
                for i1 in 0..n0 {
                    let c1 = grid.coord(0, i1);
                    for i2 in 0..n1 {
                        let c2 = grid.coord(1, i2);
                        acc[i1 * n1 + i2] +=
                            scale * ring_average(&slice, &grid, c1, c2, rho);
                    }
                }
            }
            acc
        })
        .collect();

    let mut out = Field::zeros(grid);
    for (j, col) in columns.iter().enumerate() {
        for r in 0..n0 * n1 {
            out.values_mut()[r * ny + j] = col[r];
        }
    }
    finish_half_space(out)
}

/// Trapezoid node count for a half-circle arc of radius `y`.
fn theta_count(y: f64, dx: f64, oversample: f64) -> usize {
    let suggested = ((PI / 2.0) * (y / dx) * oversample).ceil() as usize + 1;
    suggested.max(9)
}

/// Marks an operator output on a half-space grid as half-space extended.
fn finish_half_space(out: Field) -> PmtResult<Field> {
    if out.grid().is_half_space_grid() {
        Ok(out
            .with_half_space(true)
            .expect("half-space grids hold no samples at y <= 0"))
    } else {
        Ok(out)
    }
}

/// Linear blend of the two sample planes bracketing height `h` of a
/// three-axis field, hard zero outside the sampled `y` range.
pub(crate) fn height_slice(f: &Field, h: f64) -> Vec<f64> {
    let grid = f.grid();
    let (n0, n1, ny) = (grid.dims()[0], grid.dims()[1], grid.dims()[2]);
    let y0 = grid.origin()[2];
    let dy = grid.spacing()[2];
    let y_top = y0 + dy * (ny - 1) as f64;
    let mut slice = vec![0.0; n0 * n1];
    if h < y0 || h > y_top {
        return slice;
    }
    let c = (h - y0) / dy;
    let j = (c.floor() as usize).min(ny - 2);
    let w = c - j as f64;
    let v = f.values();
    for r in 0..n0 * n1 {
        slice[r] = (1.0 - w) * v[r * ny + j] + w * v[r * ny + j + 1];
    }
    slice
}

/// Mean of a transverse slice over the circle of radius `rho` around
/// `(c1, c2)`, by uniform azimuthal sampling with bilinear reads.
pub(crate) fn ring_average(
    slice: &[f64],
    grid: &GridSpec,
    c1: f64,
    c2: f64,
    rho: f64,
) -> f64 {
    if rho < 1e-300 {
        return bilinear_slice(slice, grid, c1, c2);
    }
    let dx = grid.spacing()[0];
    let na = ((2.0 * PI * rho / dx).ceil() as usize).max(12);
    let mut acc = 0.0;
    for m in 0..na {
        let a = 2.0 * PI * m as f64 / na as f64;
        acc += bilinear_slice(slice, grid, c1 + rho * a.cos(), c2 + rho * a.sin());
    }
    acc / na as f64
}

/// Zero-extended bilinear read on a transverse slice of a three-axis grid.
fn bilinear_slice(slice: &[f64], grid: &GridSpec, x1: f64, x2: f64) -> f64 {
    let (n0, n1) = (grid.dims()[0], grid.dims()[1]);
    let c0 = (x1 - grid.origin()[0]) / grid.spacing()[0];
    let c1 = (x2 - grid.origin()[1]) / grid.spacing()[1];
    let i0 = c0.floor();
    let j0 = c1.floor();
    let f0 = c0 - i0;
    let f1 = c1 - j0;
    let (i0, j0) = (i0 as i64, j0 as i64);
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
            acc += w0 * w1 * slice[i as usize * n1 + j as usize];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass_traces_parabola() {
        let grid = GridSpec::half_space_paraboloid(1, vec![16, 64], 1.0, vec![0.0]).unwrap();
        let mut f = Field::zeros(grid.clone());
        let ny = grid.ny();
        // Unit sample at x index 8, y index 2.
        f.values_mut()[8 * ny + 2] = 1.0;
        let f = f.with_half_space(true).unwrap();
        let g = parab_forward(&f, None).unwrap();
        // G(x0 + k dx, y0 + 2 dy + k^2 dx^2) = dx for every reachable k.
        for k in [-3i64, -1, 0, 2] {
            let i = (8 + k) as usize;
            let j = (2 + k * k) as usize;
            assert_eq!(g.values()[i * ny + j], 1.0);
        }
        assert_eq!(g.values()[8 * ny + 3], 0.0);
    }

    #[test]
    fn forward_requires_half_space_flag() {
        let grid = GridSpec::half_space_paraboloid(1, vec![8, 8], 1.0, vec![0.0]).unwrap();
        let f = Field::zeros(grid);
        assert!(sphere_means_forward(&f, 2.0).is_err());
    }
}
