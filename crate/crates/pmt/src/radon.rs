//! Radon transform bridge.
//!
//! The paraboloid convolution factors through the Radon transform: for a
//! direction `(omega, theta)` with nonzero `theta`, the projection of
//! `P F` equals a one-dimensional operator `Q` applied to the projection
//! of `F` along the same direction.  This module provides the sampled
//! Radon transform and its filtered back-projection inverse, the family
//! `Q` with spectral and back-projection inverses, and the consistency
//! checks that tie the two pictures together: the pullback identity for
//! sphere integrals, the commutation of `Lambda_y` with projection, and
//! the translation covariance of the transform.

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{PmtError, PmtResult};
use crate::field::Field;
use crate::grid::GridSpec;
use crate::intertwine::sphere_area;
use crate::spectral::{angular_freq, lambda_1d, lambda_y_padded, rolloff_weight, MultiplierSpec};
use crate::sum::{pairwise_sum, pairwise_sum_by};

/// Largest tolerated deviation of a direction vector from unit length.
const DIRECTION_TOL: f64 = 1e-14;

/// Sampled projections of a field: one row of `num_offsets` samples per
/// direction, on the uniform offset lattice `p_min + dp * q`.
#[derive(Debug, Clone)]
pub struct Sinogram {
    n: usize,
    directions: Vec<f64>,
    p_min: f64,
    dp: f64,
    np: usize,
    values: Vec<f64>,
}

impl Sinogram {
    /// Builds a sinogram from raw parts.
    ///
    /// # Arguments
    ///
    /// * `n` - Transverse dimension (1 or 2); directions live on the
    ///   unit sphere in `n + 1` components
    /// * `directions` - Flattened direction vectors, `n + 1` components
    ///   each, every one unit length to within `1e-14`
    /// * `p_min` - Offset of the first sample on each row
    /// * `dp` - Offset spacing, strictly positive
    /// * `np` - Samples per row, at least 2
    /// * `values` - Row-major samples, one row per direction
    pub fn new(
        n: usize,
        directions: Vec<f64>,
        p_min: f64,
        dp: f64,
        np: usize,
        values: Vec<f64>,
    ) -> PmtResult<Self> {
        if n != 1 && n != 2 {
            return Err(PmtError::UnsupportedDimension(n));
        }
        let comps = n + 1;
        if directions.is_empty() || directions.len() % comps != 0 {
            return Err(PmtError::InvalidDirection(format!(
                "direction list of length {} does not split into {}-vectors",
                directions.len(),
                comps
            )));
        }
        for d in directions.chunks_exact(comps) {
            let norm = d.iter().map(|c| c * c).sum::<f64>().sqrt();
            if !norm.is_finite() || (norm - 1.0).abs() > DIRECTION_TOL {
                return Err(PmtError::InvalidDirection(format!(
                    "direction {:?} has norm {}",
                    d, norm
                )));
            }
        }
        if !(dp > 0.0) || !dp.is_finite() || !p_min.is_finite() {
            return Err(PmtError::InvalidData(format!(
                "offset lattice needs finite p_min and dp > 0, got p_min = {}, dp = {}",
                p_min, dp
            )));
        }
        if np < 2 {
            return Err(PmtError::InvalidData(format!(
                "a sinogram row needs at least 2 samples, got {}",
                np
            )));
        }
        let ndirs = directions.len() / comps;
        if values.len() != ndirs * np {
            return Err(PmtError::InvalidData(format!(
                "expected {} samples for {} directions x {} offsets, got {}",
                ndirs * np,
                ndirs,
                np,
                values.len()
            )));
        }
        Ok(Self {
            n,
            directions,
            p_min,
            dp,
            np,
            values,
        })
    }

    /// Builds an all-zero sinogram with the given geometry.
    pub fn zeros(
        n: usize,
        directions: Vec<f64>,
        p_min: f64,
        dp: f64,
        np: usize,
    ) -> PmtResult<Self> {
        let ndirs = directions.len() / (n + 1).max(1);
        let values = vec![0.0; ndirs * np];
        Self::new(n, directions, p_min, dp, np, values)
    }

    /// Transverse dimension of the underlying fields.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of projection directions.
    pub fn num_directions(&self) -> usize {
        self.directions.len() / (self.n + 1)
    }

    /// Samples per projection row.
    pub fn num_offsets(&self) -> usize {
        self.np
    }

    /// Offset of the first sample on each row.
    pub fn p_min(&self) -> f64 {
        self.p_min
    }

    /// Offset spacing.
    pub fn dp(&self) -> f64 {
        self.dp
    }

    /// Direction vector `d` as a slice of `n + 1` components.
    pub fn direction(&self, d: usize) -> &[f64] {
        let comps = self.n + 1;
        &self.directions[d * comps..(d + 1) * comps]
    }

    /// Projection row for direction `d`.
    pub fn row(&self, d: usize) -> &[f64] {
        &self.values[d * self.np..(d + 1) * self.np]
    }

    /// Mutable projection row for direction `d`.
    pub fn row_mut(&mut self, d: usize) -> &mut [f64] {
        &mut self.values[d * self.np..(d + 1) * self.np]
    }

    /// All samples, direction major.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Offset coordinates shared by every row.
    pub fn offsets(&self) -> Vec<f64> {
        (0..self.np).map(|q| self.p_min + self.dp * q as f64).collect()
    }
}

/// Uniform half-circle directions `(cos a, sin a)` at the midpoint
/// angles `a = pi (m + 1/2) / count`, keeping only those whose second
/// component exceeds `exclusion`.
///
/// The second component plays the role of `theta` in the paraboloid
/// factorization, so a positive exclusion removes the directions for
/// which the factor `Q` degenerates.
pub fn angle_directions(count: usize, exclusion: f64) -> Vec<f64> {
    let mut dirs = Vec::new();
    for m in 0..count {
        let a = PI * (m as f64 + 0.5) / count as f64;
        let (sin, cos) = a.sin_cos();
        if sin > exclusion {
            dirs.push(cos);
            dirs.push(sin);
        }
    }
    dirs
}

/// Quasi-uniform upper-hemisphere directions from the Fibonacci
/// lattice, keeping only those whose last component exceeds
/// `exclusion`.
pub fn fibonacci_hemisphere(count: usize, exclusion: f64) -> Vec<f64> {
    let golden_angle = PI * (3.0 - 5.0f64.sqrt());
    let mut dirs = Vec::new();
    for m in 0..count {
        let z = (m as f64 + 0.5) / count as f64;
        if z <= exclusion {
            continue;
        }
        let r = (1.0 - z * z).sqrt();
        let a = golden_angle * m as f64;
        dirs.push(r * a.cos());
        dirs.push(r * a.sin());
        dirs.push(z);
    }
    dirs
}

/// The filtered back-projection constant `(-2 pi)^-n |S^n| / 2`.
///
/// Its absolute value normalizes [`radon_invert`]; the sign records that
/// the odd-dimensional filter is a true signed constant.
pub fn radon_constant(n: usize) -> PmtResult<f64> {
    if n != 1 && n != 2 {
        return Err(PmtError::UnsupportedDimension(n));
    }
    Ok((-2.0 * PI).powi(-(n as i32)) * sphere_area(n) / 2.0)
}

/// Offset lattice `(p_min, np)` that covers the projection of the grid's
/// bounding ball for every listed direction, with one spacing of margin.
pub fn covering_offsets(grid: &GridSpec, directions: &[f64], dp: f64) -> PmtResult<(f64, usize)> {
    if !(dp > 0.0) {
        return Err(PmtError::InvalidData(format!(
            "covering_offsets needs dp > 0, got {}",
            dp
        )));
    }
    let comps = grid.n() + 1;
    if directions.is_empty() || directions.len() % comps != 0 {
        return Err(PmtError::InvalidDirection(format!(
            "direction list of length {} does not split into {}-vectors",
            directions.len(),
            comps
        )));
    }
    let center = grid.bounding_center();
    let half = 0.5 * grid.bounding_diameter();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for d in directions.chunks_exact(comps) {
        let sc = dot(d, &center);
        lo = lo.min(sc - half);
        hi = hi.max(sc + half);
    }
    let p_min = lo - dp;
    let np = ((hi + dp - p_min) / dp).ceil() as usize + 1;
    Ok((p_min, np))
}

/// Radon transform of a zero-extendable field: for each direction and
/// offset, the integral of the field over the hyperplane
/// `point . direction = offset`, by trapezoid sums over a chord frame of
/// the grid's bounding ball.
///
/// # Arguments
///
/// * `f` - Field with the half-space or compact support flag set
/// * `directions` - Flattened unit directions, `n + 1` components each
/// * `p_min`, `dp`, `np` - Offset lattice; it must cover the projection
///   of the bounding ball for every direction
pub fn radon_forward(
    f: &Field,
    directions: &[f64],
    p_min: f64,
    dp: f64,
    np: usize,
) -> PmtResult<Sinogram> {
    if !f.half_space() && !f.compact_support() {
        return Err(PmtError::MissingHalfSpace(
            "radon_forward integrates over full hyperplanes and needs the half-space or \
             compact support flag to extend the field by zero"
                .into(),
        ));
    }
    let grid = f.grid();
    let n = grid.n();
    let mut sino = Sinogram::zeros(n, directions.to_vec(), p_min, dp, np)?;

    let center = grid.bounding_center();
    let diam = grid.bounding_diameter();
    let p_max = p_min + dp * (np - 1) as f64;
    let tol = 1e-9 * (1.0 + diam);
    for d in 0..sino.num_directions() {
        let sc = dot(sino.direction(d), &center);
        if p_min > sc - 0.5 * diam + tol || p_max < sc + 0.5 * diam - tol {
            return Err(PmtError::InvalidData(format!(
                "offset lattice [{}, {}] does not cover the bounding ball projection \
                 [{}, {}] of direction {:?}",
                p_min,
                p_max,
                sc - 0.5 * diam,
                sc + 0.5 * diam,
                sino.direction(d)
            )));
        }
    }

    let step = grid
        .spacing()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let ns = ((diam / step).ceil() as usize + 1).max(2);
    let ds = diam / (ns - 1) as f64;

    let dirs: Vec<Vec<f64>> = (0..sino.num_directions())
        .map(|d| sino.direction(d).to_vec())
        .collect();
    let np_local = np;
    sino.values
        .par_chunks_mut(np_local)
        .zip(dirs.par_iter())
        .for_each(|(row, dir)| match n {
            1 => {
                let e = [-dir[1], dir[0]];
                let sc = center[0] * e[0] + center[1] * e[1];
                let mut buf = vec![0.0; ns];
                for (q, out) in row.iter_mut().enumerate() {
                    let p = p_min + dp * q as f64;
                    for (i, slot) in buf.iter_mut().enumerate() {
                        let s = sc - 0.5 * diam + ds * i as f64;
                        let mut w = ds;
                        if i == 0 || i == ns - 1 {
                            w *= 0.5;
                        }
                        let point = [p * dir[0] + s * e[0], p * dir[1] + s * e[1]];
                        *slot = w * f.sample_extended(&point);
                    }
                    *out = pairwise_sum(&buf);
                }
            }
            _ => {
                let (e1, e2) = chord_frame_3d(dir);
                let sc1 = dot(&e1, &center);
                let sc2 = dot(&e2, &center);
                let mut buf = vec![0.0; ns * ns];
                for (q, out) in row.iter_mut().enumerate() {
                    let p = p_min + dp * q as f64;
                    for i1 in 0..ns {
                        let s1 = sc1 - 0.5 * diam + ds * i1 as f64;
                        let mut w1 = ds;
                        if i1 == 0 || i1 == ns - 1 {
                            w1 *= 0.5;
                        }
                        for i2 in 0..ns {
                            let s2 = sc2 - 0.5 * diam + ds * i2 as f64;
                            let mut w = w1 * ds;
                            if i2 == 0 || i2 == ns - 1 {
                                w *= 0.5;
                            }
                            let point = [
                                p * dir[0] + s1 * e1[0] + s2 * e2[0],
                                p * dir[1] + s1 * e1[1] + s2 * e2[1],
                                p * dir[2] + s1 * e1[2] + s2 * e2[2],
                            ];
                            buf[i1 * ns + i2] = w * f.sample_extended(&point);
                        }
                    }
                    *out = pairwise_sum(&buf);
                }
            }
        });
    Ok(sino)
}

/// Unnormalized back-projection: at each grid point, the mean over
/// directions of the row value at that point's projection offset, with
/// linear interpolation fading to zero one spacing beyond the row ends.
pub fn radon_adjoint(sino: &Sinogram, grid: &GridSpec) -> PmtResult<Field> {
    if sino.n() != grid.n() {
        return Err(PmtError::DimensionMismatch(format!(
            "sinogram has n = {}, grid has n = {}",
            sino.n(),
            grid.n()
        )));
    }
    let ndirs = sino.num_directions();
    let np = sino.num_offsets();
    let p_min = sino.p_min();
    let dp = sino.dp();
    let ny = grid.ny();
    let n = grid.n();

    let mut out = Field::zeros(grid.clone());
    let g = grid.clone();
    out.values_mut()
        .par_chunks_mut(ny)
        .enumerate()
        .for_each(|(lane, row)| {
            let mut x = vec![0.0; n + 1];
            match n {
                1 => x[0] = g.coord(0, lane),
                _ => {
                    x[0] = g.coord(0, lane / g.dims()[1]);
                    x[1] = g.coord(1, lane % g.dims()[1]);
                }
            }
            for (j, out_v) in row.iter_mut().enumerate() {
                x[n] = g.coord(n, j);
                let acc = pairwise_sum_by(ndirs, |d| {
                    let dir = sino.direction(d);
                    let t = (dot(dir, &x) - p_min) / dp;
                    ramp_interp(&sino.values[d * np..(d + 1) * np], t)
                });
                *out_v = acc / ndirs as f64;
            }
        });
    finish_half_space(out)
}

/// Applies the `|xi|^order` filter to every sinogram row by padded FFT.
pub fn lambda_p(sino: &Sinogram, order: usize) -> Sinogram {
    let mut out = sino.clone();
    let dp = sino.dp();
    for d in 0..sino.num_directions() {
        let filtered = lambda_1d(sino.row(d), dp, order, 4, 0.0);
        out.row_mut(d).copy_from_slice(&filtered);
    }
    out
}

/// Filtered back-projection inverse of the Radon transform:
/// `|c_n| R^* Lambda_p^n`, with the mean-over-directions back-projection
/// of [`radon_adjoint`] standing in for the sphere average.
pub fn radon_invert(sino: &Sinogram, grid: &GridSpec) -> PmtResult<Field> {
    let filtered = lambda_p(sino, sino.n());
    let bp = radon_adjoint(&filtered, grid)?;
    let c = radon_constant(sino.n())?.abs();
    finish_half_space(bp.scaled(c))
}

/// The one-dimensional factor of the paraboloid convolution along a
/// projection direction `(omega, theta)`:
///
/// `(Q psi)(p) = int psi(p + omega . u - theta |u|^2) w(u) du`
///
/// with a uniform `u` lattice of spacing `du` truncated at `|u| <=
/// u_max`, and an optional raised cosine taper on the outer `taper`
/// fraction of that radius to suppress the truncation ring.
pub fn qp_forward(
    psi: &[f64],
    p_min: f64,
    dp: f64,
    omega: &[f64],
    theta: f64,
    u_max: f64,
    du: f64,
    taper: f64,
) -> PmtResult<Vec<f64>> {
    qp_shift(psi, p_min, dp, omega, theta, u_max, du, taper, -1.0)
}

/// Adjoint of [`qp_forward`] on the same offset lattice: the identical
/// `u` sum with the sign of the quadratic shift reversed.
pub fn qp_adjoint(
    phi: &[f64],
    p_min: f64,
    dp: f64,
    omega: &[f64],
    theta: f64,
    u_max: f64,
    du: f64,
    taper: f64,
) -> PmtResult<Vec<f64>> {
    qp_shift(phi, p_min, dp, omega, theta, u_max, du, taper, 1.0)
}

#[allow(clippy::too_many_arguments)]
fn qp_shift(
    psi: &[f64],
    p_min: f64,
    dp: f64,
    omega: &[f64],
    theta: f64,
    u_max: f64,
    du: f64,
    taper: f64,
    sign: f64,
) -> PmtResult<Vec<f64>> {
    let n = omega.len();
    if n != 1 && n != 2 {
        return Err(PmtError::UnsupportedDimension(n));
    }
    if !(dp > 0.0) || !(du > 0.0) || !(u_max > 0.0) || !(0.0..1.0).contains(&taper) {
        return Err(PmtError::InvalidData(format!(
            "qp operators need dp > 0, du > 0, u_max > 0 and taper in [0, 1), got \
             dp = {}, du = {}, u_max = {}, taper = {}",
            dp, du, u_max, taper
        )));
    }
    let nu = (u_max / du + 1e-9).floor() as i64;
    let out: Vec<f64> = (0..psi.len())
        .into_par_iter()
        .map(|q| {
            let p = p_min + dp * q as f64;
            let mut buf: Vec<f64> = Vec::new();
            match n {
                1 => {
                    for m in -nu..=nu {
                        let u = m as f64 * du;
                        let w = du * taper_weight(u.abs(), u_max, taper);
                        let pp = p + omega[0] * u + sign * theta * u * u;
                        buf.push(w * ramp_interp(psi, (pp - p_min) / dp));
                    }
                }
                _ => {
                    for m1 in -nu..=nu {
                        let u1 = m1 as f64 * du;
                        for m2 in -nu..=nu {
                            let u2 = m2 as f64 * du;
                            let r = (u1 * u1 + u2 * u2).sqrt();
                            if r > u_max {
                                continue;
                            }
                            let w = du * du * taper_weight(r, u_max, taper);
                            let pp =
                                p + omega[0] * u1 + omega[1] * u2 + sign * theta * r * r;
                            buf.push(w * ramp_interp(psi, (pp - p_min) / dp));
                        }
                    }
                }
            }
            pairwise_sum(&buf)
        })
        .collect();
    Ok(out)
}

/// Spectral inverse of [`qp_forward`]: divides the padded spectrum by
/// the closed-form symbol
///
/// `Q^(xi) = (pi / |xi theta|)^(n/2) exp(i (xi^2 |omega|^2 - pi n |xi theta|) / (4 xi theta))`
///
/// under a raised cosine rolloff at `rolloff_frac` of the offset
/// Nyquist, with the mean forced to zero since the symbol vanishes
/// nowhere but carries no usable gain at `xi = 0`.
pub fn qp_invert(
    phi: &[f64],
    dp: f64,
    omega: &[f64],
    theta: f64,
    rolloff_frac: f64,
) -> PmtResult<Vec<f64>> {
    let n = omega.len();
    if n != 1 && n != 2 {
        return Err(PmtError::UnsupportedDimension(n));
    }
    if theta == 0.0 {
        return Err(PmtError::GeneralPosition(
            "qp_invert needs theta != 0".into(),
        ));
    }
    if !(dp > 0.0) || !(0.0 < rolloff_frac && rolloff_frac < 1.0) {
        return Err(PmtError::InvalidData(format!(
            "qp_invert needs dp > 0 and rolloff_frac in (0, 1), got dp = {}, \
             rolloff_frac = {}",
            dp, rolloff_frac
        )));
    }
    let len = phi.len() * 4;
    let mut lane = vec![Complex64::default(); len];
    for (dst, &x) in lane.iter_mut().zip(phi) {
        *dst = Complex64::new(x, 0.0);
    }
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);
    let mut scratch = vec![
        Complex64::default();
        fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len())
    ];
    fwd.process_with_scratch(&mut lane, &mut scratch);
    let symbol = MultiplierSpec::QHat {
        n,
        omega_norm2: omega.iter().map(|c| c * c).sum(),
        theta,
    };
    let nyquist = PI / dp;
    for (k, x) in lane.iter_mut().enumerate() {
        if k == 0 {
            *x = Complex64::default();
            continue;
        }
        let xi = angular_freq(k, len, dp);
        let qhat = symbol.eval(&[], xi)?;
        *x = *x / qhat * rolloff_weight(xi.abs(), rolloff_frac, nyquist);
    }
    inv.process_with_scratch(&mut lane, &mut scratch);
    Ok(lane.iter().take(phi.len()).map(|c| c.re / len as f64).collect())
}

/// Back-projection inverse of [`qp_forward`]:
/// `(|theta|^n / pi^n) Q^* Lambda_p^n`, the one-dimensional shadow of
/// the paraboloid back-projection formula.
#[allow(clippy::too_many_arguments)]
pub fn qp_invert_backprojection(
    phi: &[f64],
    p_min: f64,
    dp: f64,
    omega: &[f64],
    theta: f64,
    u_max: f64,
    du: f64,
    taper: f64,
) -> PmtResult<Vec<f64>> {
    let n = omega.len();
    let filtered = lambda_1d(phi, dp, n, 4, 0.0);
    let adj = qp_adjoint(&filtered, p_min, dp, omega, theta, u_max, du, taper)?;
    let scale = (theta.abs() / PI).powi(n as i32);
    Ok(adj.iter().map(|v| scale * v).collect())
}

/// Inverts the paraboloid convolution through the Radon domain: project
/// the data, undo the one-dimensional factor per direction with
/// [`qp_invert`], and reconstruct with [`radon_invert`].
///
/// # Arguments
///
/// * `g` - Convolved field with `n = 1` and a zero-extension flag set
/// * `num_directions` - Half-circle direction count before exclusion
/// * `exclusion` - Directions with `theta` at or below this are dropped
/// * `rolloff_frac` - Spectral rolloff passed to [`qp_invert`]
pub fn invert_p_radon(
    g: &Field,
    num_directions: usize,
    exclusion: f64,
    rolloff_frac: f64,
) -> PmtResult<Field> {
    let grid = g.grid();
    if grid.n() != 1 {
        return Err(PmtError::UnsupportedDimension(grid.n()));
    }
    let dirs = angle_directions(num_directions, exclusion);
    if dirs.is_empty() {
        return Err(PmtError::InvalidDirection(
            "direction exclusion removed every projection angle".into(),
        ));
    }
    let dp = grid
        .spacing()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let (p_min, np) = covering_offsets(grid, &dirs, dp)?;
    let sino = radon_forward(g, &dirs, p_min, dp, np)?;
    let mut unfolded = sino.clone();
    for d in 0..sino.num_directions() {
        let dir = sino.direction(d).to_vec();
        let row = qp_invert(sino.row(d), dp, &dir[..1], dir[1], rolloff_frac)?;
        unfolded.row_mut(d).copy_from_slice(&row);
    }
    radon_invert(&unfolded, grid)
}

/// Compares the two parametrizations of a half-sphere integral.
///
/// The left side integrates `h` over the lower half sphere in angular
/// coordinates; the right side integrates the same function in the
/// flat coordinates obtained by dropping onto the boundary hyperplane,
/// where the Jacobian cancels the sphere weight.  Both sides use
/// quadratures of different type and node count, so agreement is
/// evidence for the identity rather than for one discretization.
///
/// # Arguments
///
/// * `n` - Sphere dimension (1 or 2)
/// * `h` - Smooth test function of an `n + 1`-component direction
/// * `nodes_sphere` - Trapezoid node count for the angular side
/// * `nodes_flat` - Midpoint node count for the flat side
///
/// # Returns
///
/// * `(lhs, rhs)` - Both quadrature values
pub fn pullback_identity_check<H>(
    n: usize,
    h: H,
    nodes_sphere: usize,
    nodes_flat: usize,
) -> PmtResult<(f64, f64)>
where
    H: Fn(&[f64]) -> f64,
{
    if nodes_sphere < 2 || nodes_flat < 2 {
        return Err(PmtError::InvalidData(
            "pullback_identity_check needs at least 2 nodes per side".into(),
        ));
    }
    match n {
        1 => {
            let na = nodes_sphere;
            let step = PI / (na - 1) as f64;
            let lhs = pairwise_sum_by(na, |i| {
                let phi = -0.5 * PI + step * i as f64;
                let mut w = step;
                if i == 0 || i == na - 1 {
                    w *= 0.5;
                }
                w * h(&[phi.sin(), -phi.cos()])
            });
            let nb = nodes_flat;
            let du = 2.0 / nb as f64;
            let rhs = pairwise_sum_by(nb, |i| {
                let u = -1.0 + du * (i as f64 + 0.5);
                let root = (1.0 - u * u).sqrt();
                du * h(&[u, -root]) / root
            });
            Ok((lhs, rhs))
        }
        2 => {
            let na = nodes_sphere;
            let naz = nodes_sphere;
            let dphi = 0.5 * PI / (na - 1) as f64;
            let daz = 2.0 * PI / naz as f64;
            let lhs = pairwise_sum_by(na, |i| {
                let phi = dphi * i as f64;
                let mut w = dphi;
                if i == 0 || i == na - 1 {
                    w *= 0.5;
                }
                let (sp, cp) = (phi.sin(), phi.cos());
                let ring = pairwise_sum_by(naz, |m| {
                    let a = daz * m as f64;
                    h(&[sp * a.cos(), sp * a.sin(), -cp])
                });
                w * sp * daz * ring
            });
            let nb = nodes_flat;
            let nbz = nodes_flat;
            let dc = 1.0 / nb as f64;
            let dbz = 2.0 * PI / nbz as f64;
            let rhs = pairwise_sum_by(nb, |i| {
                let c = dc * (i as f64 + 0.5);
                let r = (1.0 - c * c).sqrt();
                let ring = pairwise_sum_by(nbz, |m| {
                    let a = dbz * m as f64;
                    h(&[r * a.cos(), r * a.sin(), -c])
                });
                dc * dbz * ring
            });
            Ok((lhs, rhs))
        }
        other => Err(PmtError::UnsupportedDimension(other)),
    }
}

/// Checks that the `|eta|` filter commutes with projection: filtering a
/// field along `y` and then projecting matches projecting first and
/// filtering each row by `|theta| |xi|`.
///
/// # Returns
///
/// * Relative l2 distance between the two sinograms, over all rows
pub fn lambda_commutation_check(
    f: &Field,
    directions: &[f64],
    p_min: f64,
    dp: f64,
    np: usize,
) -> PmtResult<f64> {
    let filtered = lambda_y_padded(f, 1, 2).with_compact_support(true);
    let lhs = radon_forward(&filtered, directions, p_min, dp, np)?;
    let proj = radon_forward(f, directions, p_min, dp, np)?;
    let mut rhs = proj.clone();
    for d in 0..proj.num_directions() {
        let theta = proj.direction(d)[proj.n()];
        let row = lambda_1d(proj.row(d), dp, 1, 4, 0.0);
        for (dst, v) in rhs.row_mut(d).iter_mut().zip(row) {
            *dst = theta.abs() * v;
        }
    }
    crate::harness::rel_error(lhs.values(), rhs.values())
}

/// Checks translation covariance of the projections: shifting the field
/// by a lattice vector `s` shifts every row by `direction . s`.
///
/// # Returns
///
/// * Largest relative l2 row distance over all directions
pub fn translation_property_check(
    f: &Field,
    directions: &[f64],
    p_min: f64,
    dp: f64,
    np: usize,
    shift: &[f64],
) -> PmtResult<f64> {
    let grid = f.grid();
    let axes = grid.n() + 1;
    if shift.len() != axes {
        return Err(PmtError::DimensionMismatch(format!(
            "shift has {} components, grid has {} axes",
            shift.len(),
            axes
        )));
    }
    let mut steps = vec![0i64; axes];
    for a in 0..axes {
        let sp = grid.spacing()[a];
        let k = (shift[a] / sp).round();
        if (k * sp - shift[a]).abs() > 1e-9 * sp {
            return Err(PmtError::OffLatticeShift(format!(
                "shift component {} = {} is not a multiple of the spacing {}",
                a, shift[a], sp
            )));
        }
        steps[a] = k as i64;
    }
    let shifted = shift_field(f, &steps);
    let base = radon_forward(f, directions, p_min, dp, np)?;
    let moved = radon_forward(&shifted, directions, p_min, dp, np)?;
    let mut worst = 0.0f64;
    let mut expected = vec![0.0; np];
    for d in 0..base.num_directions() {
        let offset = dot(base.direction(d), shift);
        for (q, e) in expected.iter_mut().enumerate() {
            let p = p_min + dp * q as f64;
            *e = ramp_interp(base.row(d), (p - offset - p_min) / dp);
        }
        worst = worst.max(crate::harness::rel_error(moved.row(d), &expected)?);
    }
    Ok(worst)
}

/// Copies a field's samples moved by whole lattice steps, zero filling
/// the uncovered cells.
fn shift_field(f: &Field, steps: &[i64]) -> Field {
    let grid = f.grid().clone();
    let dims = grid.dims().to_vec();
    let mut out = Field::zeros(grid);
    let read = |idx: &[i64]| -> f64 {
        for (a, &i) in idx.iter().enumerate() {
            if i < 0 || i >= dims[a] as i64 {
                return 0.0;
            }
        }
        match idx.len() {
            2 => f.values()[idx[0] as usize * dims[1] + idx[1] as usize],
            _ => f.values()
                [(idx[0] as usize * dims[1] + idx[1] as usize) * dims[2] + idx[2] as usize],
        }
    };
    let vals = out.values_mut();
    if dims.len() == 2 {
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                vals[i * dims[1] + j] = read(&[i as i64 - steps[0], j as i64 - steps[1]]);
            }
        }
    } else {
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    vals[(i * dims[1] + j) * dims[2] + k] = read(&[
                        i as i64 - steps[0],
                        j as i64 - steps[1],
                        k as i64 - steps[2],
                    ]);
                }
            }
        }
    }
    out.with_compact_support(true)
}

/// Marks outputs on half-space grids as half-space extended.
fn finish_half_space(out: Field) -> PmtResult<Field> {
    if out.grid().is_half_space_grid() {
        Ok(out
            .with_half_space(true)
            .expect("half-space grids hold no samples at y <= 0"))
    } else {
        Ok(out)
    }
}

/// Orthonormal in-plane frame for a 3-component direction, built from
/// the most orthogonal coordinate axis for stability.
fn chord_frame_3d(d: &[f64]) -> ([f64; 3], [f64; 3]) {
    let mut axis = 0;
    for a in 1..3 {
        if d[a].abs() < d[axis].abs() {
            axis = a;
        }
    }
    let mut t = [0.0; 3];
    t[axis] = 1.0;
    for (ta, da) in t.iter_mut().zip(d) {
        *ta -= d[axis] * da;
    }
    let norm = (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]).sqrt();
    let e1 = [t[0] / norm, t[1] / norm, t[2] / norm];
    let e2 = [
        d[1] * e1[2] - d[2] * e1[1],
        d[2] * e1[0] - d[0] * e1[2],
        d[0] * e1[1] - d[1] * e1[0],
    ];
    (e1, e2)
}

/// Linear interpolation in fractional index coordinates, fading to zero
/// over one cell beyond each end of the sample line.
fn ramp_interp(vals: &[f64], t: f64) -> f64 {
    let t0 = t.floor();
    let w = t - t0;
    let i = t0 as i64;
    let n = vals.len() as i64;
    let mut acc = 0.0;
    if i >= 0 && i < n && w < 1.0 {
        acc += (1.0 - w) * vals[i as usize];
    }
    if i + 1 >= 0 && i + 1 < n && w > 0.0 {
        acc += w * vals[(i + 1) as usize];
    }
    acc
}

/// Raised cosine fade on the outer `taper` fraction of the radius.
fn taper_weight(r: f64, u_max: f64, taper: f64) -> f64 {
    if taper <= 0.0 {
        return 1.0;
    }
    let a0 = (1.0 - taper) * u_max;
    if r <= a0 {
        1.0
    } else {
        0.5 * (1.0 + (PI * (r - a0) / (u_max - a0)).cos())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinogram_rejects_non_unit_directions() {
        let r = Sinogram::new(1, vec![1.0, 1.0], 0.0, 1.0, 4, vec![0.0; 4]);
        assert!(r.is_err());
    }

    #[test]
    fn angle_directions_respect_exclusion() {
        let dirs = angle_directions(180, 0.05);
        assert!(!dirs.is_empty());
        for d in dirs.chunks_exact(2) {
            assert!(d[1] > 0.05);
            assert!((d[0] * d[0] + d[1] * d[1] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn radon_constants_match_closed_forms() {
        assert!((radon_constant(1).unwrap() + 0.5).abs() < 1e-15);
        assert!((radon_constant(2).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn ramp_interp_fades_at_ends() {
        let v = [2.0, 4.0];
        assert_eq!(ramp_interp(&v, 0.5), 3.0);
        assert_eq!(ramp_interp(&v, -0.5), 1.0);
        assert_eq!(ramp_interp(&v, 1.5), 2.0);
        assert_eq!(ramp_interp(&v, -1.0), 0.0);
        assert_eq!(ramp_interp(&v, 2.0), 0.0);
    }
}
