//! Reconstruction routes for the two transforms.
//!
//! Three ways back from the paraboloid convolution `G = P F`:
//!
//! * [`crate::spectral::invert_p_fourier`] divides by the symbol in the
//!   Fourier domain (held in the spectral module),
//! * [`invert_p_backprojection`] filters with `Lambda_y^n` and applies
//!   the adjoint stencil, matching the Fourier route because the symbol
//!   has the constant modulus profile `(pi / |eta|)^(n/2)`,
//! * the Radon-domain route lives in [`crate::radon`].
//!
//! For the spherical mean transform itself, [`invert_s`] composes the
//! one-dimensional filter [`k_y`] with the adjoint transform and a final
//! multiplication by `y`; [`invert_s_2d`] and [`invert_s_3d`] are the
//! closed-form corollaries of that composition for `n = 1` and `n = 2`,
//! written directly in the original variables.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{PmtError, PmtResult};
use crate::field::Field;
use crate::operators::{height_slice, parab_adjoint, ring_average, sphere_means_adjoint};
use crate::spectral::{gradient_y, hilbert_1d, lambda_y_padded};
use crate::sum::pairwise_sum;

/// Filtered back-projection for the paraboloid convolution:
/// `pi^-n P^* Lambda_y^n G`.
///
/// # Arguments
///
/// * `g` - Convolved field on a paraboloid-compatible grid
/// * `u_max` - Truncation radius of the adjoint stencil; `None` means
///   half the transverse extent.  Tighter truncations suppress the
///   accumulation of far-offset interpolation noise and are worth using
///   when the data itself is supported near the scan center.
pub fn invert_p_backprojection(g: &Field, u_max: Option<f64>) -> PmtResult<Field> {
    let n = g.grid().n();
    let filtered = lambda_y_padded(g, n, 2);
    let bp = parab_adjoint(&filtered, u_max)?;
    finish(bp.scaled(PI.powi(-(n as i32))))
}

/// The one-dimensional reconstruction filter applied along `y`:
/// `(|S^n| / (2 pi^n)) Lambda_t (t^((n-1)/2) phi(sqrt(t)))` read back at
/// `t = y^2`.
///
/// For `n = 1` the `Lambda_t` factor is realized as a stencil derivative
/// followed by a tapered spectral Hilbert transform, which tolerates the
/// one-sided support of the resampled data better than a bare `|tau|`
/// multiplier.  For `n = 2` the whole composition collapses by the chain
/// rule to `(phi / y^3 - phi' / y^2 - phi'' / y) / (2 pi)` and is
/// evaluated directly in `y`, avoiding the `t`-grid resampling entirely.
///
/// # Arguments
///
/// * `phi` - Samples along `y`
/// * `y0` - Coordinate of the first sample, strictly positive
/// * `dy` - Sample spacing
/// * `n` - Transverse dimension (1 or 2)
///
/// # Returns
///
/// * The filtered samples on the same `y` lattice
pub fn k_y(phi: &[f64], y0: f64, dy: f64, n: usize) -> PmtResult<Vec<f64>> {
    if phi.len() < 3 {
        return Err(PmtError::InvalidData(format!(
            "k_y needs at least 3 samples, got {}",
            phi.len()
        )));
    }
    if !(y0 > 0.0) || !(dy > 0.0) {
        return Err(PmtError::InvalidData(format!(
            "k_y needs y0 > 0 and dy > 0, got y0 = {}, dy = {}",
            y0, dy
        )));
    }
    match n {
        1 => Ok(k_y_resampled(phi, y0, dy)),
        2 => Ok(k_y_chain_rule(phi, y0, dy)),
        other => Err(PmtError::UnsupportedDimension(other)),
    }
}

fn k_y_resampled(phi: &[f64], y0: f64, dy: f64) -> Vec<f64> {
    let nt = phi.len();
    let y_top = y0 + dy * (nt - 1) as f64;
    let dt = y_top * y_top / nt as f64;
    // psi(t) = phi(sqrt(t)) on the uniform t lattice dt * (1..=nt); below
    // the first y sample the data reads zero, above the last it clamps.
    let mut psi = vec![0.0; nt];
    for (l, p) in psi.iter_mut().enumerate() {
        let t = dt * (l + 1) as f64;
        *p = interp_uniform(t.sqrt(), y0, dy, phi, 0.0, phi[nt - 1]);
    }
    let dpsi = gradient_slice(&psi, dt);
    let h = hilbert_1d(&dpsi, 4, 0.15);
    // Read back at t = y^2, vanishing outside the t window.
    (0..nt)
        .map(|j| {
            let y = y0 + dy * j as f64;
            interp_uniform(y * y, dt, dt, &h, 0.0, 0.0)
        })
        .collect()
}

fn k_y_chain_rule(phi: &[f64], y0: f64, dy: f64) -> Vec<f64> {
    let d1 = gradient_slice(phi, dy);
    let d2 = gradient_slice(&d1, dy);
    (0..phi.len())
        .map(|j| {
            let y = y0 + dy * j as f64;
            (phi[j] / (y * y * y) - d1[j] / (y * y) - d2[j] / y) / (2.0 * PI)
        })
        .collect()
}

/// Inverts the spherical mean transform by the composed route
/// `f = y * S^*(K_y g)`, applying [`k_y`] column by column and then the
/// adjoint transform.
///
/// # Arguments
///
/// * `g` - Mean-side field on a half-space grid
pub fn invert_s(g: &Field) -> PmtResult<Field> {
    let grid = g.grid().clone();
    let n = grid.n();
    let ny = grid.ny();
    let y0 = grid.y0();
    let dy = grid.dy();
    let lanes = grid.len() / ny;
    let mut filtered = Field::zeros(grid.clone());
    for r in 0..lanes {
        let col = &g.values()[r * ny..(r + 1) * ny];
        let k = k_y(col, y0, dy, n)?;
        filtered.values_mut()[r * ny..(r + 1) * ny].copy_from_slice(&k);
    }
    let adj = sphere_means_adjoint(&filtered, None)?;
    finish(scale_by_y(adj))
}

/// Closed-form inversion of the spherical mean transform for `n = 1`:
///
/// `f(x, y) = (y / pi) int du [ PV int g'_y(x + u, s) / (y^2 + u^2 - s^2) ds ]`
///
/// realized by the substitution `t = s^2`, a tapered spectral Hilbert
/// transform in `t` for the principal value, and a trapezoid sum in `u`.
///
/// # Arguments
///
/// * `g` - Mean-side field on a half-space grid with `n = 1`
pub fn invert_s_2d(g: &Field) -> PmtResult<Field> {
    let grid = g.grid().clone();
    if grid.n() != 1 {
        return Err(PmtError::DimensionMismatch(format!(
            "invert_s_2d expects n = 1, got n = {}",
            grid.n()
        )));
    }
    let dx = grid.dx()?;
    let x0 = grid.origin()[0];
    let nx = grid.dims()[0];
    let ny = grid.ny();
    let y0 = grid.y0();
    let dy = grid.dy();
    let y_top = grid.y_max();

    let nt = ny;
    let dt = y_top * y_top / nt as f64;
    let t0 = dt;
    let t_max = dt * nt as f64;

    // psi(x, t) = g'_y(x, sqrt(t)) / (2 sqrt(t)), Hilbert transformed in t.
    let gp = gradient_y(g);
    let mut hpsi = vec![0.0; nx * nt];
    let mut psi_row = vec![0.0; nt];
    for i in 0..nx {
        let col = &gp.values()[i * ny..(i + 1) * ny];
        for (l, p) in psi_row.iter_mut().enumerate() {
            let t = dt * (l + 1) as f64;
            let s = t.sqrt();
            *p = interp_uniform(s, y0, dy, col, 0.0, 0.0) / (2.0 * s);
        }
        let h = hilbert_1d(&psi_row, 4, 0.15);
        hpsi[i * nt..(i + 1) * nt].copy_from_slice(&h);
    }

    let ys = grid.axis_coords(1);
    let mut out = Field::zeros(grid);
    out.values_mut()
        .par_chunks_mut(ny)
        .enumerate()
        .for_each(|(i, row)| {
            let x = x0 + i as f64 * dx;
            let mut buf: Vec<f64> = Vec::new();
            for (j, &y) in ys.iter().enumerate() {
                let reach2 = t_max - y * y;
                if reach2 <= 0.0 {
                    row[j] = 0.0;
                    continue;
                }
                let ku = (reach2.sqrt() / dx).floor() as i64;
                buf.clear();
                for m in -ku..=ku {
                    let u = m as f64 * dx;
                    let mut w = dx;
                    if m == -ku || m == ku {
                        w *= 0.5;
                    }
                    let r = (x + u - x0) / dx;
                    let c = (y * y + u * u - t0) / dt;
                    buf.push(w * bilinear_matrix(&hpsi, nx, nt, r, c));
                }
                row[j] = y * pairwise_sum(&buf);
            }
        });
    finish(out)
}

/// Closed-form inversion of the spherical mean transform for `n = 2`:
///
/// `f(x, y) = (y / 2 pi) int [ g / h^3 - g'_y / h^2 - g''_yy / h ](x + u, h) du`
///
/// with `h = sqrt(y^2 + |u|^2)`, evaluated over rings of constant `|u|`.
///
/// # Arguments
///
/// * `g` - Mean-side field on a half-space grid with `n = 2`
/// * `u_max` - Truncation radius of the `u` integral; `None` means half
///   the transverse extent
pub fn invert_s_3d(g: &Field, u_max: Option<f64>) -> PmtResult<Field> {
    let grid = g.grid().clone();
    if grid.n() != 2 {
        return Err(PmtError::DimensionMismatch(format!(
            "invert_s_3d expects n = 2, got n = {}",
            grid.n()
        )));
    }
    let dx = grid.dx()?;
    let (n0, n1) = (grid.dims()[0], grid.dims()[1]);
    let ny = grid.ny();
    let ys = grid.axis_coords(2);
    let y_top = grid.y_max();
    let cap = u_max.unwrap_or_else(|| (grid.dims()[0] / 2) as f64 * dx);

    let gp = gradient_y(g);
    let gpp = gradient_y(&gp);

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
                let (h2, h3) = (h * h, h * h * h);
                let a = height_slice(g, h);
                let b = height_slice(&gp, h);
                let c = height_slice(&gpp, h);
                let combined: Vec<f64> = (0..n0 * n1)
                    .map(|r| a[r] / h3 - b[r] / h2 - c[r] / h)
                    .collect();
                let scale = w * 2.0 * PI * rho;
                for i1 in 0..n0 {
                    let c1 = grid.coord(0, i1);
                    for i2 in 0..n1 {
                        let c2 = grid.coord(1, i2);
                        acc[i1 * n1 + i2] +=
                            scale * ring_average(&combined, &grid, c1, c2, rho);
                    }
                }
            }
            let outer = y / (2.0 * PI);
            for v in &mut acc {
                *v *= outer;
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
    finish(out)
}

/// Multiplies every sample by its `y` coordinate.
fn scale_by_y(f: Field) -> Field {
    let grid = f.grid().clone();
    let ny = grid.ny();
    let ys = grid.axis_coords(grid.n());
    let lanes = grid.len() / ny;
    let mut out = f;
    for r in 0..lanes {
        let row = &mut out.values_mut()[r * ny..(r + 1) * ny];
        for (v, &y) in row.iter_mut().zip(&ys) {
            *v *= y;
        }
    }
    out
}

/// Marks reconstructions on half-space grids as half-space extended.
fn finish(out: Field) -> PmtResult<Field> {
    if out.grid().is_half_space_grid() {
        Ok(out
            .with_half_space(true)
            .expect("half-space grids hold no samples at y <= 0"))
    } else {
        Ok(out)
    }
}

/// Linear interpolation on a uniform lattice with explicit out-of-range
/// values on each side.
fn interp_uniform(q: f64, x0: f64, dx: f64, fs: &[f64], left: f64, right: f64) -> f64 {
    let n = fs.len();
    let c = (q - x0) / dx;
    if c < 0.0 {
        return left;
    }
    if c > (n - 1) as f64 {
        return right;
    }
    let i = (c.floor() as usize).min(n - 2);
    let w = c - i as f64;
    (1.0 - w) * fs[i] + w * fs[i + 1]
}

/// Zero-extended bilinear read on a contiguous `rows x cols` matrix in
/// fractional index coordinates.
fn bilinear_matrix(m: &[f64], rows: usize, cols: usize, r: f64, c: f64) -> f64 {
    let r0 = r.floor();
    let c0 = c.floor();
    let fr = r - r0;
    let fc = c - c0;
    let (r0, c0) = (r0 as i64, c0 as i64);
    let mut acc = 0.0;
    for (dr, wr) in [(0i64, 1.0 - fr), (1, fr)] {
        let i = r0 + dr;
        if i < 0 || i >= rows as i64 || wr == 0.0 {
            continue;
        }
        for (dc, wc) in [(0i64, 1.0 - fc), (1, fc)] {
            let j = c0 + dc;
            if j < 0 || j >= cols as i64 || wc == 0.0 {
                continue;
            }
            acc += wr * wc * m[i as usize * cols + j as usize];
        }
    }
    acc
}

/// Second-order finite difference of one sample line.
fn gradient_slice(v: &[f64], d: f64) -> Vec<f64> {
    let n = v.len();
    debug_assert!(n >= 3);
    let mut out = vec![0.0; n];
    out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * d);
    for j in 1..n - 1 {
        out[j] = (v[j + 1] - v[j - 1]) / (2.0 * d);
    }
    out[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * d);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_y_rejects_bad_lattice() {
        assert!(k_y(&[1.0, 2.0, 3.0], 0.0, 1.0, 1).is_err());
        assert!(k_y(&[1.0, 2.0], 1.0, 1.0, 1).is_err());
        assert!(k_y(&[1.0, 2.0, 3.0], 1.0, 1.0, 3).is_err());
    }

    #[test]
    fn invert_s_2d_rejects_three_axis_fields() {
        let grid = crate::grid::GridSpec::half_space(2, vec![4, 4, 8], 1.0, 1.0, vec![0.0, 0.0])
            .unwrap();
        let f = Field::zeros(grid);
        assert!(invert_s_2d(&f).is_err());
    }
}
