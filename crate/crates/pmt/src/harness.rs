//! Measurement helpers for validation: error norms, numerical support
//! boxes, the far-field decay scan along displaced parabolas, and the
//! plane-section boundedness check for convolved fields.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{PmtError, PmtResult};
use crate::field::Field;
use crate::operators::parab_forward;
use crate::sum::{pairwise_sum, pairwise_sum_by};

/// Relative l2 distance `|a - b| / |b|`.
pub fn rel_error(a: &[f64], b: &[f64]) -> PmtResult<f64> {
    if a.len() != b.len() {
        return Err(PmtError::DimensionMismatch(format!(
            "rel_error got lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    let denom = pairwise_sum_by(b.len(), |i| b[i] * b[i]).sqrt();
    if denom == 0.0 {
        return Err(PmtError::ZeroDenominator(
            "rel_error reference has zero norm".into(),
        ));
    }
    let num = pairwise_sum_by(a.len(), |i| {
        let d = a[i] - b[i];
        d * d
    })
    .sqrt();
    Ok(num / denom)
}

/// Largest absolute sample difference.
pub fn max_error(a: &[f64], b: &[f64]) -> PmtResult<f64> {
    if a.len() != b.len() {
        return Err(PmtError::DimensionMismatch(format!(
            "max_error got lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// Relative l2 distance between two fields on the same grid.
pub fn field_rel_error(a: &Field, b: &Field) -> PmtResult<f64> {
    a.grid().require_same(b.grid())?;
    rel_error(a.values(), b.values())
}

/// Coordinate box `[lo, hi]` per axis of the samples above
/// `threshold_frac` times the peak magnitude, or `None` for a field
/// below threshold everywhere.
pub fn support_box(f: &Field, threshold_frac: f64) -> Option<Vec<(f64, f64)>> {
    let idx = support_index_box(f, threshold_frac)?;
    Some(
        idx.iter()
            .enumerate()
            .map(|(a, &(lo, hi))| (f.grid().coord(a, lo), f.grid().coord(a, hi)))
            .collect(),
    )
}

/// Index box per axis of the samples above `threshold_frac` times the
/// peak magnitude.
fn support_index_box(f: &Field, threshold_frac: f64) -> Option<Vec<(usize, usize)>> {
    let peak = f.max_abs();
    if peak == 0.0 {
        return None;
    }
    let thr = threshold_frac * peak;
    let grid = f.grid();
    let axes = grid.n() + 1;
    let dims = grid.dims();
    let mut lo = vec![usize::MAX; axes];
    let mut hi = vec![0usize; axes];
    let ny = grid.ny();
    for (idx, v) in f.values().iter().enumerate() {
        if v.abs() <= thr {
            continue;
        }
        let mut id = [0usize; 3];
        id[axes - 1] = idx % ny;
        let rest = idx / ny;
        if axes == 2 {
            id[0] = rest;
        } else {
            id[0] = rest / dims[1];
            id[1] = rest % dims[1];
        }
        for a in 0..axes {
            lo[a] = lo[a].min(id[a]);
            hi[a] = hi[a].max(id[a]);
        }
    }
    if lo[0] == usize::MAX {
        return None;
    }
    Some(lo.into_iter().zip(hi).collect())
}

/// Decay measurements of a convolved field along a displaced parabola,
/// with the closed-form ceiling each measurement must stay under.
#[derive(Debug, Clone)]
pub struct DecayScan {
    radii: Vec<f64>,
    values: Vec<f64>,
    bounds: Vec<f64>,
}

impl DecayScan {
    /// Scan radii.
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Weighted magnitudes `r |G(x0 + r e, y0 + r^2)|`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Ceilings `(max |F| / 2) |B^(n-1)| r^(n-1) h`.
    pub fn bounds(&self) -> &[f64] {
        &self.bounds
    }

    /// Writes the scan as `radius,value,bound` rows.
    pub fn write_csv(&self, path: &Path) -> PmtResult<()> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "radius,value,bound")?;
        for i in 0..self.radii.len() {
            writeln!(w, "{},{},{}", self.radii[i], self.values[i], self.bounds[i])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Evaluates the convolved field far outside the grid along the
/// parabola `(x0 + r e, y0 + r^2)` and pairs each weighted magnitude
/// `r |G|` against the support-box ceiling it must respect.
///
/// The convolution is summed directly at each scan point with the same
/// lattice stencil as the forward operator, pruned to the offsets that
/// can touch the numerical support, so points far beyond the grid cost
/// no more than points on it.
///
/// # Arguments
///
/// * `f` - Source field; its thresholded support must clear the bottom
///   sample row, since the ceiling assumes support away from the
///   boundary
/// * `base` - Parabola vertex `(x0, y0)`, one component per axis
/// * `direction` - Unit transverse direction of the displacement
/// * `radii` - Strictly positive scan radii
pub fn decay_scan(
    f: &Field,
    base: &[f64],
    direction: &[f64],
    radii: &[f64],
) -> PmtResult<DecayScan> {
    let grid = f.grid();
    let n = grid.n();
    if base.len() != n + 1 || direction.len() != n {
        return Err(PmtError::DimensionMismatch(format!(
            "decay_scan with n = {} needs a {}-component base and {}-component direction",
            n,
            n + 1,
            n
        )));
    }
    let dnorm = direction.iter().map(|c| c * c).sum::<f64>().sqrt();
    if (dnorm - 1.0).abs() > 1e-12 {
        return Err(PmtError::InvalidDirection(format!(
            "decay direction has norm {}",
            dnorm
        )));
    }
    if radii.iter().any(|r| !(*r > 0.0)) {
        return Err(PmtError::InvalidData(
            "decay_scan needs strictly positive radii".into(),
        ));
    }
    let idx_box = support_index_box(f, 1e-10).ok_or_else(|| {
        PmtError::InvalidData("decay_scan needs a field with nonzero samples".into())
    })?;
    if idx_box[n].0 == 0 {
        return Err(PmtError::SupportAtBoundary(format!(
            "numerical support reaches the bottom sample row y = {}",
            grid.y0()
        )));
    }
    let coord_box: Vec<(f64, f64)> = idx_box
        .iter()
        .enumerate()
        .map(|(a, &(lo, hi))| (grid.coord(a, lo), grid.coord(a, hi)))
        .collect();
    let dx = grid.dx()?;
    let dy = grid.dy();
    let h = coord_box[n].1 - coord_box[n].0 + dy;
    let peak = f.max_abs();

    let ball = match n {
        1 => 1.0,
        2 => 2.0,
        other => return Err(PmtError::UnsupportedDimension(other)),
    };
    let bounds: Vec<f64> = radii
        .iter()
        .map(|&r| 0.5 * peak * ball * r.powi(n as i32 - 1) * h)
        .collect();

    // The y window of the support limits the stencil offsets to an
    // annulus; the x window trims it further on each transverse axis.
    let (y_lo, y_hi) = (coord_box[n].0 - dy, coord_box[n].1 + dy);
    let values: Vec<f64> = radii
        .iter()
        .map(|&r| {
            let mut point = vec![0.0; n + 1];
            for a in 0..n {
                point[a] = base[a] + r * direction[a];
            }
            point[n] = base[n] + r * r;
            let yq = point[n];
            if yq <= y_lo {
                return 0.0;
            }
            let k_hi = ((yq - y_lo) / (dx * dx)).sqrt().floor() as i64 + 1;
            let k_lo2 = ((yq - y_hi).max(0.0)) / (dx * dx);
            let mut buf: Vec<f64> = Vec::new();
            match n {
                1 => {
                    let (a_lo, a_hi) = (coord_box[0].0 - dx, coord_box[0].1 + dx);
                    for k in -k_hi..=k_hi {
                        let kk = (k * k) as f64;
                        if kk < k_lo2 {
                            continue;
                        }
                        let x = point[0] + k as f64 * dx;
                        if x >= a_lo && x <= a_hi {
                            buf.push(dx * f.sample_extended(&[x, yq - kk * dx * dx]));
                        }
                    }
                }
                _ => {
                    let windows: Vec<(i64, i64)> = (0..2)
                        .map(|a| {
                            let lo = (coord_box[a].0 - dx - point[a]) / dx;
                            let hi = (coord_box[a].1 + dx - point[a]) / dx;
                            (lo.ceil() as i64, hi.floor() as i64)
                        })
                        .collect();
                    let k1_lo = windows[0].0.max(-k_hi);
                    let k1_hi = windows[0].1.min(k_hi);
                    let mut k1 = k1_lo;
                    while k1 <= k1_hi {
                        let x1 = point[0] + k1 as f64 * dx;
                        let mut k2 = windows[1].0.max(-k_hi);
                        let k2_hi = windows[1].1.min(k_hi);
                        while k2 <= k2_hi {
                            let kk = (k1 * k1 + k2 * k2) as f64;
                            if kk >= k_lo2 && kk <= (k_hi * k_hi) as f64 {
                                let x2 = point[1] + k2 as f64 * dx;
                                buf.push(
                                    dx * dx
                                        * f.sample_extended(&[x1, x2, yq - kk * dx * dx]),
                                );
                            }
                            k2 += 1;
                        }
                        k1 += 1;
                    }
                }
            }
            r * pairwise_sum(&buf).abs()
        })
        .collect();

    Ok(DecayScan {
        radii: radii.to_vec(),
        values,
        bounds,
    })
}

/// Outcome of a plane-section boundedness check.
#[derive(Debug, Clone, Copy)]
pub struct SectionCheck {
    /// Whether every section sample sits within the predicted radius of
    /// some predicted center.
    pub bounded: bool,
    /// Largest distance from a section sample to its nearest center.
    pub extent: f64,
    /// Predicted radius including the discretization slack.
    pub radius: f64,
}

/// Checks that the section of the convolved field's support by the
/// plane `omega . x + theta y = p` stays inside a union of balls in the
/// transverse coordinates.
///
/// Completing the square in the support condition places the balls at
/// `a - omega / (2 theta)` for transverse support points `a` of the
/// source, with a common radius ceiling determined by how far the plane
/// sits from the source support.  Planes parallel to either coordinate
/// hyperplane degenerate and are rejected.
///
/// # Arguments
///
/// * `f` - Source field with a zero-extension flag set
/// * `omega` - Transverse normal components, not all zero
/// * `theta` - Normal component along `y`, nonzero
/// * `p` - Plane offset
pub fn support_section_check(
    f: &Field,
    omega: &[f64],
    theta: f64,
    p: f64,
) -> PmtResult<SectionCheck> {
    let grid = f.grid();
    let n = grid.n();
    if omega.len() != n {
        return Err(PmtError::DimensionMismatch(format!(
            "support_section_check with n = {} needs {} transverse normal components",
            n, n
        )));
    }
    let omega_norm2: f64 = omega.iter().map(|c| c * c).sum();
    if theta == 0.0 || omega_norm2 == 0.0 {
        return Err(PmtError::GeneralPosition(
            "support_section_check needs both theta != 0 and omega != 0".into(),
        ));
    }
    // Normalize the plane so the radius formula for unit normals applies.
    let scale = (omega_norm2 + theta * theta).sqrt();
    let om: Vec<f64> = omega.iter().map(|c| c / scale).collect();
    let th = theta / scale;
    let pn = p / scale;

    if f.max_abs() == 0.0 {
        return Ok(SectionCheck {
            bounded: true,
            extent: 0.0,
            radius: 0.0,
        });
    }

    let dx = grid.dx()?;
    let dy = grid.dy();
    let full_extent = grid.dims()[0] as f64 * dx;
    let g = parab_forward(f, Some(full_extent))?;

    // Source support: plane distances bound the ball radius, transverse
    // support points seed the ball centers.
    let thr_f = 1e-10 * f.max_abs();
    let ny = grid.ny();
    let lanes = grid.len() / ny;
    let mut centers: Vec<f64> = Vec::new();
    let mut m_dist = 0.0f64;
    for lane in 0..lanes {
        let col = &f.values()[lane * ny..(lane + 1) * ny];
        let mut trans = [0.0; 2];
        match n {
            1 => trans[0] = grid.coord(0, lane),
            _ => {
                trans[0] = grid.coord(0, lane / grid.dims()[1]);
                trans[1] = grid.coord(1, lane % grid.dims()[1]);
            }
        }
        let mut any = false;
        for (j, v) in col.iter().enumerate() {
            if v.abs() <= thr_f {
                continue;
            }
            any = true;
            let b = grid.coord(n, j);
            let plane = pn - dot(&om, &trans[..n]) - th * b;
            m_dist = m_dist.max(plane.abs());
        }
        if any {
            for a in 0..n {
                centers.push(trans[a] - om[a] / (2.0 * th));
            }
        }
    }
    let r_max = (1.0 + 4.0 * th.abs() * m_dist).sqrt() / (2.0 * th.abs());

    // Section samples of the convolved support, taken from the grid
    // cells the plane passes through.
    let thr_g = 1e-8 * g.max_abs();
    let delta = 0.5 * (om.iter().map(|c| c.abs() * dx).sum::<f64>() + th.abs() * dy);
    let slack = 2.0 * dx.max(dy) + delta / th.abs();
    let mut extent = 0.0f64;
    for lane in 0..lanes {
        let col = &g.values()[lane * ny..(lane + 1) * ny];
        let mut trans = [0.0; 2];
        match n {
            1 => trans[0] = grid.coord(0, lane),
            _ => {
                trans[0] = grid.coord(0, lane / grid.dims()[1]);
                trans[1] = grid.coord(1, lane % grid.dims()[1]);
            }
        }
        let mut nearest = f64::INFINITY;
        let mut on_plane = false;
        for (j, v) in col.iter().enumerate() {
            if v.abs() <= thr_g {
                continue;
            }
            let y = grid.coord(n, j);
            if (dot(&om, &trans[..n]) + th * y - pn).abs() > delta {
                continue;
            }
            on_plane = true;
        }
        if !on_plane {
            continue;
        }
        for c in centers.chunks_exact(n) {
            let d2: f64 = (0..n).map(|a| (trans[a] - c[a]) * (trans[a] - c[a])).sum();
            nearest = nearest.min(d2.sqrt());
        }
        if nearest.is_finite() {
            extent = extent.max(nearest);
        }
    }
    let radius = r_max + slack;
    Ok(SectionCheck {
        bounded: extent <= radius,
        extent,
        radius,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn rel_error_rejects_zero_reference() {
        assert!(rel_error(&[1.0], &[0.0]).is_err());
        assert!((rel_error(&[1.0, 0.0], &[0.0, 1.0]).unwrap() - 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn support_box_finds_single_sample() {
        let grid = GridSpec::half_space(1, vec![8, 8], 1.0, 1.0, vec![0.0]).unwrap();
        let mut f = Field::zeros(grid);
        f.values_mut()[3 * 8 + 5] = 2.0;
        let b = support_box(&f, 1e-10).unwrap();
        assert_eq!(b[0], (3.0, 3.0));
        assert_eq!(b[1], (6.0, 6.0));
    }

    #[test]
    fn decay_scan_rejects_boundary_support() {
        let grid = GridSpec::half_space(1, vec![8, 8], 1.0, 1.0, vec![0.0]).unwrap();
        let mut f = Field::zeros(grid);
        f.values_mut()[3 * 8] = 1.0;
        let r = decay_scan(&f, &[3.0, 1.0], &[1.0], &[4.0]);
        assert!(matches!(r, Err(PmtError::SupportAtBoundary(_))));
    }
}
