//! Change of variables between half-sphere means and paraboloid sections.
//!
//! The substitution `t = y^2` (plus a power weight) turns functions on the
//! upper half-space into functions on a paraboloid-compatible grid where
//! the spherical mean transform becomes a convolution along paraboloids.
//! This module holds the three weighted substitutions and their inverses:
//!
//! * `map_N` / `map_N_inv` carry the input side with weight `t^(-1/2)`,
//! * `map_M` / `map_M_inv` carry the mean side with weight
//!   `(|S^n| / 2) t^((n-1)/2)`,
//! * `map_L` / `map_L_inv` are the bare substitution used when relating
//!   adjoints.
//!
//! All six maps are linear, read their source through interpolation, and
//! write zero at and below `t = 0` (respectively pass `y^2 > 0`), so their
//! outputs keep the half-space extension.

use std::f64::consts::PI;

use crate::error::{PmtError, PmtResult};
use crate::field::Field;
use crate::grid::GridSpec;

/// Surface areas of unit spheres, `|S^n| = 2 pi^((n+1)/2) / Gamma((n+1)/2)`.
///
/// # Examples
///
/// ```
/// use pmt::intertwine::SphereAreaTable;
///
/// let t = SphereAreaTable::new(3);
/// assert!((t.value(1) - 2.0 * std::f64::consts::PI).abs() < 1e-15);
/// assert!((t.value(2) - 4.0 * std::f64::consts::PI).abs() < 1e-15);
/// ```
#[derive(Debug, Clone)]
pub struct SphereAreaTable {
    values: Vec<f64>,
}

impl SphereAreaTable {
    /// Precomputes `|S^1|` through `|S^max_n|`.
    pub fn new(max_n: usize) -> Self {
        SphereAreaTable {
            values: (1..=max_n.max(1)).map(sphere_area).collect(),
        }
    }

    /// Area of the unit `n`-sphere; panics if `n` is outside the table.
    pub fn value(&self, n: usize) -> f64 {
        assert!(n >= 1 && n <= self.values.len(), "n = {} not tabulated", n);
        self.values[n - 1]
    }
}

/// `Gamma(m / 2)` for positive integer `m`, by the half-integer recursion.
fn gamma_of_half(m: usize) -> f64 {
    match m {
        0 => f64::INFINITY,
        1 => PI.sqrt(),
        2 => 1.0,
        _ => (m as f64 / 2.0 - 1.0) * gamma_of_half(m - 2),
    }
}

/// Area of the unit `n`-sphere in `R^(n+1)`.
pub fn sphere_area(n: usize) -> f64 {
    2.0 * PI.powf((n as f64 + 1.0) / 2.0) / gamma_of_half(n + 1)
}

/// Shared body of the forward substitutions: sample the source at
/// `(x, sqrt(t))` with a `t`-dependent weight, writing zero for `t <= 0`.
fn substitute_forward<W: Fn(f64) -> f64>(
    source: &Field,
    target: &GridSpec,
    name: &str,
    weight: W,
) -> PmtResult<Field> {
    source.require_half_space(name)?;
    target.require_paraboloid_compatible()?;
    if target.n() != source.grid().n() {
        return Err(PmtError::DimensionMismatch(format!(
            "{}: source has n = {}, target has n = {}",
            name,
            source.grid().n(),
            target.n()
        )));
    }
    let y_axis = target.n();
    let out = Field::from_fn(target.clone(), |p| {
        let t = p[y_axis];
        if t <= 0.0 {
            return 0.0;
        }
        let mut q = p.to_vec();
        q[y_axis] = t.sqrt();
        weight(t) * source.sample_extended(&q)
    });
    let out = out
        .with_half_space(true)
        .expect("samples at t <= 0 are written as exact zeros")
        .with_compact_support(source.compact_support());
    Ok(out)
}

/// Shared body of the inverse substitutions: sample the source at
/// `(x, y^2)` with a `y`-dependent weight.
fn substitute_inverse<W: Fn(f64) -> f64>(
    source: &Field,
    target: &GridSpec,
    name: &str,
    weight: W,
) -> PmtResult<Field> {
    if target.n() != source.grid().n() {
        return Err(PmtError::DimensionMismatch(format!(
            "{}: source has n = {}, target has n = {}",
            name,
            source.grid().n(),
            target.n()
        )));
    }
    let y_axis = target.n();
    let out = Field::from_fn(target.clone(), |p| {
        let y = p[y_axis];
        let mut q = p.to_vec();
        q[y_axis] = y * y;
        weight(y) * source.sample_extended(&q)
    });
    let out = if target.is_half_space_grid() {
        out.with_half_space(true)
            .expect("half-space grids hold no samples at y <= 0")
    } else {
        out
    };
    Ok(out.with_compact_support(source.compact_support()))
}

/// Input-side substitution `F(x, t) = t^(-1/2) f(x, sqrt(t))` for `t > 0`,
/// zero otherwise.
///
/// # Arguments
///
/// * `f` - Half-space field to transform
/// * `target` - Paraboloid-compatible grid for the result
///
/// # Returns
///
/// * The weighted substitution, or an error when `f` lacks the half-space
///   flag or `target` is not paraboloid compatible
pub fn map_n(f: &Field, target: &GridSpec) -> PmtResult<Field> {
    substitute_forward(f, target, "map_n", |t| 1.0 / t.sqrt())
}

/// Inverse of [`map_n`]: `f(x, y) = y F(x, y^2)`.
pub fn map_n_inv(big_f: &Field, target: &GridSpec) -> PmtResult<Field> {
    substitute_inverse(big_f, target, "map_n_inv", |y| y)
}

/// Mean-side substitution
/// `G(x, t) = (|S^n| / 2) t^((n-1)/2) g(x, sqrt(t))` for `t > 0`, zero
/// otherwise.  For `n = 1` this is just `pi * g(x, sqrt(t))`.
pub fn map_m(g: &Field, target: &GridSpec) -> PmtResult<Field> {
    let n = g.grid().n();
    let half_area = 0.5 * sphere_area(n);
    let power = (n as f64 - 1.0) / 2.0;
    substitute_forward(g, target, "map_m", move |t| half_area * t.powf(power))
}

/// Inverse of [`map_m`]: `g(x, y) = (2 / |S^n|) y^(1-n) G(x, y^2)`.
pub fn map_m_inv(big_g: &Field, target: &GridSpec) -> PmtResult<Field> {
    let n = big_g.grid().n();
    let inv_half_area = 2.0 / sphere_area(n);
    let power = 1.0 - n as f64;
    substitute_inverse(big_g, target, "map_m_inv", move |y| {
        inv_half_area * y.powf(power)
    })
}

/// Bare substitution `F(x, t) = f(x, sqrt(t))` for `t > 0`, zero otherwise.
pub fn map_l(f: &Field, target: &GridSpec) -> PmtResult<Field> {
    substitute_forward(f, target, "map_l", |_| 1.0)
}

/// Inverse of [`map_l`]: `f(x, y) = F(x, y^2)`.
pub fn map_l_inv(big_f: &Field, target: &GridSpec) -> PmtResult<Field> {
    substitute_inverse(big_f, target, "map_l_inv", |_| 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas_match_closed_forms() {
        assert!((sphere_area(1) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(2) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn map_n_requires_half_space() {
        let g = GridSpec::new(1, vec![4, 4], vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
        let f = Field::from_fn(g.clone(), |_| 1.0);
        let target = GridSpec::half_space_paraboloid(1, vec![4, 4], 1.0, vec![0.0]).unwrap();
        assert!(map_n(&f, &target).is_err());
    }
}
