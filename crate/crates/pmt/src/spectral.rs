//! Fourier transforms and the multiplier calculus of the paraboloid
//! convolution.
//!
//! The continuum convention is
//! `phi_hat(xi, eta) = integral exp(-i xi . x - i eta y) phi(x, y) dx dy`,
//! realized discretely as a DFT scaled by the cell volume with origin
//! phase factors.  On that convention the paraboloid convolution acts by
//! the multiplier
//! `T_hat(xi, eta) = (pi / |eta|)^(n/2) exp(i (|xi|^2 - pi n |eta|) / (4 eta))`,
//! whose unit modulus profile `|T_hat|^2 = (pi / |eta|)^n` makes
//! `pi^-n conj(T_hat) |eta|^n` an exact left inverse away from `eta = 0`.
//!
//! Deconvolution and the fractional derivative `Lambda_y` are carried out
//! on zero-padded copies so the circular convolution of the DFT does not
//! wrap the stencil tails back into the data.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{PmtError, PmtResult};
use crate::field::Field;
use crate::grid::GridSpec;

/// A field's discrete Fourier transform on the frequency lattice implied
/// by its spatial grid.
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl SpectralField {
    /// Spatial grid the transform came from.
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Frequency samples, row-major in the same axis order as the field,
    /// each axis in DFT order (nonnegative frequencies first).
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Mutable frequency samples.
    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Angular frequency of index `k` on `axis`.
    pub fn freq(&self, axis: usize, k: usize) -> f64 {
        angular_freq(k, self.grid.dims()[axis], self.grid.spacing()[axis])
    }
}

/// Angular frequency `2 pi fftfreq(len, d)[k]`.
pub fn angular_freq(k: usize, len: usize, d: f64) -> f64 {
    let half = (len + 1) / 2;
    let signed = if k < half {
        k as i64
    } else {
        k as i64 - len as i64
    };
    2.0 * PI * signed as f64 / (len as f64 * d)
}

/// The Fourier multipliers used by the inversion routes.
#[derive(Debug, Clone, PartialEq)]
pub enum MultiplierSpec {
    /// `-i sgn(eta)`, the Hilbert transform along `y`.
    Hilbert,
    /// `|eta|^order`, the fractional derivative along `y`.
    Lambda { order: usize },
    /// Symbol of the paraboloid convolution in `R^n x R`.
    That { n: usize },
    /// Complex conjugate of [`MultiplierSpec::That`], the adjoint symbol.
    ThatAdjoint { n: usize },
    /// Per-direction symbol of the offset-space paraboloid convolution
    /// for a direction with transverse part `omega` and tilt `theta`.
    QHat { n: usize, omega_norm2: f64, theta: f64 },
}

impl MultiplierSpec {
    /// Evaluates the multiplier at transverse frequency `xi` and `y`
    /// frequency `eta`.
    ///
    /// For [`MultiplierSpec::QHat`] the symbol is one-dimensional: `eta`
    /// is the offset frequency and `xi` is ignored.
    ///
    /// # Returns
    ///
    /// * The multiplier value, or [`PmtError::SingularFrequency`] where
    ///   the symbol is undefined (`eta = 0` for the paraboloid symbols)
    pub fn eval(&self, xi: &[f64], eta: f64) -> PmtResult<Complex64> {
        match *self {
            MultiplierSpec::Hilbert => {
                let s = if eta > 0.0 {
                    1.0
                } else if eta < 0.0 {
                    -1.0
                } else {
                    0.0
                };
                Ok(Complex64::new(0.0, -s))
            }
            MultiplierSpec::Lambda { order } => {
                Ok(Complex64::new(eta.abs().powi(order as i32), 0.0))
            }
            MultiplierSpec::That { n } => that_value(xi, eta, n),
            MultiplierSpec::ThatAdjoint { n } => that_value(xi, eta, n).map(|v| v.conj()),
            MultiplierSpec::QHat {
                n,
                omega_norm2,
                theta,
            } => {
                let et = eta * theta;
                if et == 0.0 {
                    return Err(PmtError::SingularFrequency(
                        "qhat multiplier undefined at zero offset frequency".to_string(),
                    ));
                }
                let amp = (PI / et.abs()).powf(n as f64 / 2.0);
                let phase = (eta * eta * omega_norm2 - PI * n as f64 * et.abs()) / (4.0 * et);
                Ok(Complex64::from_polar(amp, phase))
            }
        }
    }
}

fn that_value(xi: &[f64], eta: f64, n: usize) -> PmtResult<Complex64> {
    if eta == 0.0 {
        return Err(PmtError::SingularFrequency(
            "paraboloid symbol undefined at eta = 0".to_string(),
        ));
    }
    let xi2: f64 = xi.iter().map(|&v| v * v).sum();
    let amp = (PI / eta.abs()).powf(n as f64 / 2.0);
    let phase = (xi2 - PI * n as f64 * eta.abs()) / (4.0 * eta);
    Ok(Complex64::from_polar(amp, phase))
}

/// Symbol of the paraboloid convolution,
/// `(pi / |eta|)^(n/2) exp(i (|xi|^2 - pi n |eta|) / (4 eta))`.
///
/// # Arguments
///
/// * `xi` - Transverse frequency vector (length `n`)
/// * `eta` - Frequency along `y`, nonzero
/// * `n` - Transverse dimension
///
/// # Returns
///
/// * The symbol value, or [`PmtError::SingularFrequency`] at `eta = 0`
///
/// # Examples
///
/// ```
/// use pmt::spectral::that_multiplier;
///
/// let v = that_multiplier(&[0.0], 1.0, 1).unwrap();
/// let expect = std::f64::consts::PI.sqrt();
/// assert!((v.norm() - expect).abs() < 1e-14);
/// assert!((v.arg() + std::f64::consts::PI / 4.0).abs() < 1e-14);
/// ```
pub fn that_multiplier(xi: &[f64], eta: f64, n: usize) -> PmtResult<Complex64> {
    that_value(xi, eta, n)
}

/// Runs an in-place FFT along every axis of a row-major complex buffer.
fn fft_all_axes(buf: &mut [Complex64], dims: &[usize], forward: bool) {
    let mut planner = FftPlanner::new();
    for axis in 0..dims.len() {
        let len = dims[axis];
        let fft = if forward {
            planner.plan_fft_forward(len)
        } else {
            planner.plan_fft_inverse(len)
        };
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        let after: usize = dims[axis + 1..].iter().product();
        let before: usize = dims[..axis].iter().product();
        if after == 1 {
            for b in 0..before {
                fft.process_with_scratch(&mut buf[b * len..(b + 1) * len], &mut scratch);
            }
        } else {
            let mut lane = vec![Complex64::default(); len];
            for b in 0..before {
                for a in 0..after {
                    let base = b * len * after + a;
                    for k in 0..len {
                        lane[k] = buf[base + k * after];
                    }
                    fft.process_with_scratch(&mut lane, &mut scratch);
                    for k in 0..len {
                        buf[base + k * after] = lane[k];
                    }
                }
            }
        }
    }
}

/// Forward transform under the integral convention: DFT scaled by the
/// cell volume, with phase factors accounting for the grid origin.
///
/// # Arguments
///
/// * `f` - Field to transform
///
/// # Returns
///
/// * The spectral field on the frequency lattice of `f`'s grid
pub fn fft_forward(f: &Field) -> SpectralField {
    let grid = f.grid().clone();
    let dims = grid.dims().to_vec();
    let mut buf: Vec<Complex64> = f
        .values()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    fft_all_axes(&mut buf, &dims, true);
    let vol = grid.cell_volume();
    let phases = origin_phases(&grid, -1.0);
    scale_by_phases(&mut buf, &dims, &phases, vol);
    SpectralField { grid, values: buf }
}

/// Inverse of [`fft_forward`]; the imaginary residue of the inverse DFT is
/// dropped, so round trips of real fields return real fields.
pub fn fft_inverse(sf: &SpectralField) -> Field {
    let grid = sf.grid.clone();
    let dims = grid.dims().to_vec();
    let mut buf = sf.values.clone();
    let phases = origin_phases(&grid, 1.0);
    scale_by_phases(&mut buf, &dims, &phases, 1.0);
    fft_all_axes(&mut buf, &dims, false);
    let scale = 1.0 / (grid.len() as f64 * grid.cell_volume());
    let values: Vec<f64> = buf.iter().map(|c| c.re * scale).collect();
    Field::from_values(grid, values).expect("buffer sized from grid")
}

/// Per-axis phase vectors `exp(sign * i * freq * origin)`.
fn origin_phases(grid: &GridSpec, sign: f64) -> Vec<Vec<Complex64>> {
    (0..grid.axes())
        .map(|a| {
            let (len, d, o) = (grid.dims()[a], grid.spacing()[a], grid.origin()[a]);
            (0..len)
                .map(|k| Complex64::from_polar(1.0, sign * angular_freq(k, len, d) * o))
                .collect()
        })
        .collect()
}

/// Multiplies every element by its per-axis phase product and `scale`.
fn scale_by_phases(buf: &mut [Complex64], dims: &[usize], phases: &[Vec<Complex64>], scale: f64) {
    match dims.len() {
        2 => {
            let mut flat = 0;
            for i in 0..dims[0] {
                let pa = phases[0][i] * scale;
                for j in 0..dims[1] {
                    buf[flat] *= pa * phases[1][j];
                    flat += 1;
                }
            }
        }
        _ => {
            let mut flat = 0;
            for i in 0..dims[0] {
                for j in 0..dims[1] {
                    let pa = phases[0][i] * phases[1][j] * scale;
                    for k in 0..dims[2] {
                        buf[flat] *= pa * phases[2][k];
                        flat += 1;
                    }
                }
            }
        }
    }
}

/// Applies a frequency multiplier on a zero-padded copy of the field and
/// crops back, suppressing periodic wrap-around.  Origin phases cancel
/// between the forward and inverse transforms and are skipped.
fn apply_padded_multiplier<M>(f: &Field, factor: usize, mult: M) -> Field
where
    M: Fn(&[f64], f64) -> Complex64,
{
    let grid = f.grid();
    let dims = grid.dims();
    let pdims: Vec<usize> = dims.iter().map(|&d| d * factor).collect();
    let total: usize = pdims.iter().product();
    let mut buf = vec![Complex64::new(0.0, 0.0); total];

    match grid.axes() {
        2 => {
            for i in 0..dims[0] {
                for j in 0..dims[1] {
                    buf[i * pdims[1] + j] = Complex64::new(f.values()[i * dims[1] + j], 0.0);
                }
            }
        }
        _ => {
            for i in 0..dims[0] {
                for j in 0..dims[1] {
                    for k in 0..dims[2] {
                        buf[(i * pdims[1] + j) * pdims[2] + k] =
                            Complex64::new(f.values()[(i * dims[1] + j) * dims[2] + k], 0.0);
                    }
                }
            }
        }
    }

    fft_all_axes(&mut buf, &pdims, true);

    let freqs: Vec<Vec<f64>> = (0..grid.axes())
        .map(|a| {
            (0..pdims[a])
                .map(|k| angular_freq(k, pdims[a], grid.spacing()[a]))
                .collect()
        })
        .collect();
    match grid.axes() {
        2 => {
            let mut flat = 0;
            for i in 0..pdims[0] {
                let xi = [freqs[0][i]];
                for j in 0..pdims[1] {
                    buf[flat] *= mult(&xi, freqs[1][j]);
                    flat += 1;
                }
            }
        }
        _ => {
            let mut flat = 0;
            for i in 0..pdims[0] {
                for j in 0..pdims[1] {
                    let xi = [freqs[0][i], freqs[1][j]];
                    for k in 0..pdims[2] {
                        buf[flat] *= mult(&xi, freqs[2][k]);
                        flat += 1;
                    }
                }
            }
        }
    }

    fft_all_axes(&mut buf, &pdims, false);
    let scale = 1.0 / total as f64;

    let mut out = Field::zeros(grid.clone());
    match grid.axes() {
        2 => {
            for i in 0..dims[0] {
                for j in 0..dims[1] {
                    out.values_mut()[i * dims[1] + j] = buf[i * pdims[1] + j].re * scale;
                }
            }
        }
        _ => {
            for i in 0..dims[0] {
                for j in 0..dims[1] {
                    for k in 0..dims[2] {
                        out.values_mut()[(i * dims[1] + j) * dims[2] + k] =
                            buf[(i * pdims[1] + j) * pdims[2] + k].re * scale;
                    }
                }
            }
        }
    }
    out
}

/// Applies a one-dimensional multiplier along `y` to every column,
/// without padding.
fn apply_y_multiplier<M>(f: &Field, mult: M) -> Field
where
    M: Fn(f64) -> Complex64,
{
    let grid = f.grid().clone();
    let ny = grid.ny();
    let lanes = grid.len() / ny;
    let dy = grid.dy();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(ny);
    let inv = planner.plan_fft_inverse(ny);
    let mut scratch =
        vec![Complex64::default(); fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len())];
    let symbol: Vec<Complex64> = (0..ny).map(|k| mult(angular_freq(k, ny, dy))).collect();

    let mut out = Field::zeros(grid);
    let mut lane = vec![Complex64::default(); ny];
    for r in 0..lanes {
        let col = &f.values()[r * ny..(r + 1) * ny];
        for (dst, &v) in lane.iter_mut().zip(col) {
            *dst = Complex64::new(v, 0.0);
        }
        fwd.process_with_scratch(&mut lane, &mut scratch);
        for (v, s) in lane.iter_mut().zip(&symbol) {
            *v *= s;
        }
        inv.process_with_scratch(&mut lane, &mut scratch);
        let dst = &mut out.values_mut()[r * ny..(r + 1) * ny];
        for (d, v) in dst.iter_mut().zip(&lane) {
            *d = v.re / ny as f64;
        }
    }
    out
}

/// Hilbert transform along `y` on the periodic grid: multiplies by
/// `-i sgn(eta)` column by column, with `sgn(0) = 0`.
///
/// # Examples
///
/// ```
/// use pmt::grid::GridSpec;
/// use pmt::field::Field;
/// use pmt::spectral::hilbert_y;
///
/// // One full period of cos maps to sin.
/// let n = 64;
/// let g = GridSpec::new(1, vec![2, n], vec![1.0, 1.0 / n as f64], vec![0.0, 0.0]).unwrap();
/// let w = 2.0 * std::f64::consts::PI;
/// let f = Field::from_fn(g, |p| (w * p[1]).cos());
/// let h = hilbert_y(&f);
/// let expect = Field::from_fn(h.grid().clone(), |p| (w * p[1]).sin());
/// let err: f64 = h
///     .values()
///     .iter()
///     .zip(expect.values())
///     .map(|(a, b)| (a - b).abs())
///     .fold(0.0, f64::max);
/// assert!(err < 1e-12);
/// ```
pub fn hilbert_y(f: &Field) -> Field {
    apply_y_multiplier(f, |eta| {
        MultiplierSpec::Hilbert
            .eval(&[], eta)
            .expect("hilbert symbol is total")
    })
}

/// Fractional derivative `|eta|^order` along `y`, unpadded.
///
/// This is the periodic version used inside self-adjointness and isometry
/// identities; reconstruction paths use [`lambda_y_padded`] instead.
pub fn lambda_y(f: &Field, order: usize) -> Field {
    apply_y_multiplier(f, |eta| Complex64::new(eta.abs().powi(order as i32), 0.0))
}

/// Fractional derivative `|eta|^order` along `y` on a zero-padded copy,
/// suppressing wrap-around of the kernel tails.
///
/// # Arguments
///
/// * `f` - Input field
/// * `order` - Power of `|eta|`
/// * `pad` - Padding factor along `y` (2 is enough for the inversion
///   routes)
pub fn lambda_y_padded(f: &Field, order: usize, pad: usize) -> Field {
    let grid = f.grid().clone();
    let ny = grid.ny();
    let py = ny * pad;
    let lanes = grid.len() / ny;
    let dy = grid.dy();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(py);
    let inv = planner.plan_fft_inverse(py);
    let mut scratch =
        vec![Complex64::default(); fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len())];
    let symbol: Vec<f64> = (0..py)
        .map(|k| angular_freq(k, py, dy).abs().powi(order as i32))
        .collect();

    let mut out = Field::zeros(grid);
    let mut lane = vec![Complex64::default(); py];
    for r in 0..lanes {
        lane.fill(Complex64::default());
        let col = &f.values()[r * ny..(r + 1) * ny];
        for (dst, &v) in lane.iter_mut().zip(col) {
            *dst = Complex64::new(v, 0.0);
        }
        fwd.process_with_scratch(&mut lane, &mut scratch);
        for (v, &s) in lane.iter_mut().zip(&symbol) {
            *v *= s;
        }
        inv.process_with_scratch(&mut lane, &mut scratch);
        let dst = &mut out.values_mut()[r * ny..(r + 1) * ny];
        for (d, v) in dst.iter_mut().zip(lane.iter().take(ny)) {
            *d = v.re / py as f64;
        }
    }
    out
}

/// Spatial-route realization of `Lambda_y` through stencil derivatives:
/// `H_y d_y` for order 1 and `-d_y^2` for order 2.  Used as an
/// independent cross-check of the spectral route.
pub fn lambda_y_spatial(f: &Field, order: usize) -> PmtResult<Field> {
    match order {
        1 => Ok(hilbert_y(&gradient_y(f))),
        2 => Ok(gradient_y(&gradient_y(f)).scaled(-1.0)),
        o => Err(PmtError::UnsupportedDimension(o)),
    }
}

/// Second-order finite difference along `y`: central in the interior,
/// one-sided three-point stencils at the edges.
pub fn gradient_y(f: &Field) -> Field {
    let grid = f.grid().clone();
    let ny = grid.ny();
    let lanes = grid.len() / ny;
    let dy = grid.dy();
    assert!(ny >= 3, "gradient_y needs at least 3 samples along y");
    let mut out = Field::zeros(grid);
    for r in 0..lanes {
        let col = &f.values()[r * ny..(r + 1) * ny];
        let dst = &mut out.values_mut()[r * ny..(r + 1) * ny];
        dst[0] = (-3.0 * col[0] + 4.0 * col[1] - col[2]) / (2.0 * dy);
        for j in 1..ny - 1 {
            dst[j] = (col[j + 1] - col[j - 1]) / (2.0 * dy);
        }
        dst[ny - 1] = (3.0 * col[ny - 1] - 4.0 * col[ny - 2] + col[ny - 3]) / (2.0 * dy);
    }
    out
}

/// Raised-cosine low-pass weight: unity below `frac * nyquist`, then a
/// squared-cosine descent reaching zero at the Nyquist frequency.
pub fn rolloff_weight(abs_eta: f64, frac: f64, nyquist: f64) -> f64 {
    let knee = frac * nyquist;
    if abs_eta <= knee {
        1.0
    } else {
        let t = 0.5 * PI * (abs_eta - knee) / ((1.0 - frac) * nyquist);
        let c = t.cos();
        c * c
    }
}

/// Paraboloid convolution evaluated in the Fourier domain: pad, multiply
/// by the symbol with the `eta = 0` plane zeroed, transform back, crop.
///
/// # Arguments
///
/// * `f` - Field on a paraboloid-compatible grid
pub fn parab_forward_fourier(f: &Field) -> PmtResult<Field> {
    f.grid().require_paraboloid_compatible()?;
    let n = f.grid().n();
    let out = apply_padded_multiplier(f, 2, |xi, eta| {
        if eta == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            that_value(xi, eta, n).expect("eta is nonzero")
        }
    });
    copy_flags(out, f)
}

/// Fourier deconvolution of the paraboloid convolution:
/// `F_hat = pi^-n conj(T_hat) |eta|^n G_hat W(eta)` with the `eta = 0`
/// plane zeroed and a raised-cosine roll-off `W` against amplified noise
/// near the Nyquist frequency.
///
/// # Arguments
///
/// * `g` - Convolved field on a paraboloid-compatible grid
/// * `rolloff_frac` - Fraction of the `y` Nyquist frequency where the
///   roll-off begins (0.8 is the default used by the reconstruction
///   drivers)
pub fn invert_p_fourier(g: &Field, rolloff_frac: f64) -> PmtResult<Field> {
    g.grid().require_paraboloid_compatible()?;
    if !(rolloff_frac > 0.0 && rolloff_frac < 1.0) {
        return Err(PmtError::InvalidData(format!(
            "rolloff fraction must lie in (0, 1), got {}",
            rolloff_frac
        )));
    }
    let n = g.grid().n();
    let nyquist = PI / g.grid().dy();
    let scale = PI.powi(-(n as i32));
    let out = apply_padded_multiplier(g, 2, move |xi, eta| {
        if eta == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let sym = that_value(xi, eta, n).expect("eta is nonzero").conj();
        sym * (eta.abs().powi(n as i32) * scale * rolloff_weight(eta.abs(), rolloff_frac, nyquist))
    });
    copy_flags(out, g)
}

/// Transplants extension flags from `src` onto `out`.
fn copy_flags(out: Field, src: &Field) -> PmtResult<Field> {
    let out = out.with_compact_support(src.compact_support());
    if src.half_space() && out.grid().is_half_space_grid() {
        Ok(out
            .with_half_space(true)
            .expect("half-space grids hold no samples at y <= 0"))
    } else {
        Ok(out)
    }
}

/// Tapered, padded Hilbert transform of one sample line.
///
/// The last `taper_frac` of the samples fade to zero under a raised
/// cosine before zero padding by `pad`, so the periodic transform does
/// not see the jump at the end of the data window.
pub(crate) fn hilbert_1d(v: &[f64], pad: usize, taper_frac: f64) -> Vec<f64> {
    filtered_1d(v, pad, taper_frac, |k, len| {
        let half = (len + 1) / 2;
        let s = if k == 0 {
            0.0
        } else if k < half {
            1.0
        } else {
            -1.0
        };
        Complex64::new(0.0, -s)
    })
}

/// Tapered, padded `|eta|^order` multiplier applied to one sample line
/// with spacing `dt`.
pub(crate) fn lambda_1d(v: &[f64], dt: f64, order: usize, pad: usize, taper_frac: f64) -> Vec<f64> {
    filtered_1d(v, pad, taper_frac, |k, len| {
        Complex64::new(angular_freq(k, len, dt).abs().powi(order as i32), 0.0)
    })
}

fn filtered_1d<M>(v: &[f64], pad: usize, taper_frac: f64, symbol: M) -> Vec<f64>
where
    M: Fn(usize, usize) -> Complex64,
{
    let n = v.len();
    let len = n * pad.max(1);
    let mut lane = vec![Complex64::default(); len];
    for (dst, &x) in lane.iter_mut().zip(v) {
        *dst = Complex64::new(x, 0.0);
    }
    let nt = (n as f64 * taper_frac) as usize;
    if nt > 1 {
        for i in 0..nt {
            let ramp = 0.5 * (1.0 + (PI * i as f64 / (nt - 1) as f64).cos());
            lane[n - nt + i] *= ramp;
        }
    }
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);
    let mut scratch =
        vec![Complex64::default(); fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len())];
    fwd.process_with_scratch(&mut lane, &mut scratch);
    for (k, x) in lane.iter_mut().enumerate() {
        *x *= symbol(k, len);
    }
    inv.process_with_scratch(&mut lane, &mut scratch);
    lane.iter().take(n).map(|c| c.re / len as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_identity() {
        let g = GridSpec::new(1, vec![8, 16], vec![0.5, 0.25], vec![-2.0, -2.0]).unwrap();
        let f = Field::from_fn(g, |p| (p[0] + 2.0 * p[1]).sin());
        let back = fft_inverse(&fft_forward(&f));
        let err: f64 = f
            .values()
            .iter()
            .zip(back.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "round trip error {}", err);
    }

    #[test]
    fn that_multiplier_rejects_zero_eta() {
        assert!(that_multiplier(&[0.0], 0.0, 1).is_err());
    }
}
