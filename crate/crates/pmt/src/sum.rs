//! Deterministic pairwise summation.
//!
//! Quadratures and inner products in this crate accumulate through the
//! balanced tree below rather than a running scalar.  The tree keeps the
//! rounding error near `O(eps * log n)` and, because the association order
//! depends only on the slice layout, the result is independent of thread
//! count on every code path that parallelizes over output samples.

/// Sums a slice with balanced pairwise recursion.
///
/// # Arguments
///
/// * `values` - Terms to accumulate
///
/// # Returns
///
/// * The sum, associated as a balanced binary tree
///
/// # Examples
///
/// ```
/// use pmt::sum::pairwise_sum;
///
/// let terms = vec![0.1_f64; 10];
/// assert!((pairwise_sum(&terms) - 1.0).abs() < 1e-15);
/// ```
pub fn pairwise_sum(values: &[f64]) -> f64 {
    // Below this length a straight loop is both faster and accurate enough
    // for the leaf of the recursion.
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        let mut acc = 0.0;
        for &v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Sums `f(i)` for `i` in `0..len` with the same balanced association as
/// [`pairwise_sum`], without materializing the terms.
///
/// # Arguments
///
/// * `len` - Number of terms
/// * `f` - Term generator, called once per index
///
/// # Returns
///
/// * The pairwise-associated sum of `f(0), ..., f(len - 1)`
pub fn pairwise_sum_by<F: Fn(usize) -> f64>(len: usize, f: F) -> f64 {
    fn recurse<F: Fn(usize) -> f64>(start: usize, len: usize, f: &F) -> f64 {
        const LEAF: usize = 32;
        if len <= LEAF {
            let mut acc = 0.0;
            for i in start..start + len {
                acc += f(i);
            }
            return acc;
        }
        let half = len / 2;
        recurse(start, half, f) + recurse(start + half, len - half, f)
    }
    recurse(0, len, &f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_naive_on_short_input() {
        let v = [1.0, 2.0, 3.0];
        assert_eq!(pairwise_sum(&v), 6.0);
    }

    #[test]
    fn indexed_variant_matches_slice_variant() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.7).sin()).collect();
        let a = pairwise_sum(&v);
        let b = pairwise_sum_by(v.len(), |i| v[i]);
        assert_eq!(a, b);
    }
}
