//! Small statistics helpers shared by the dynamics and topology modules.

use crate::scalar::{abs, Scalar};

/// Pearson correlation. `None` when either series has (numerically) zero variance
/// or the lengths differ or are below two.
pub fn pearson<T: Scalar>(x: &[T], y: &[T]) -> Option<T> {
    let n = x.len();
    if n != y.len() || n < 2 {
        return None;
    }
    let nf = T::from_usize_lossy(n);
    let mx = x.iter().fold(T::zero(), |a, &v| a + v) / nf;
    let my = y.iter().fold(T::zero(), |a, &v| a + v) / nf;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if is_flat(sxx, mx, nf) || is_flat(syy, my, nf) {
        return None;
    }
    let r = sxy / (sxx.sqrt() * syy.sqrt());
    Some(r.max(-T::one()).min(T::one()))
}

/// Sum of squared deviations indistinguishable from rounding of a constant series.
fn is_flat<T: Scalar>(ss: T, mean: T, n: T) -> bool {
    let noise = T::eps() * abs(mean) * T::lit(16.0);
    ss <= noise * noise * n
}

pub fn mean<T: Scalar>(x: &[T]) -> Option<T> {
    if x.is_empty() {
        return None;
    }
    Some(x.iter().fold(T::zero(), |a, &v| a + v) / T::from_usize_lossy(x.len()))
}

/// Trailing moving average; the first `window - 1` points average what is available.
pub fn moving_average<T: Scalar>(x: &[T], window: usize) -> Vec<T> {
    let w = window.max(1);
    (0..x.len())
        .map(|i| {
            let lo = (i + 1).saturating_sub(w);
            mean(&x[lo..=i]).expect("non-empty window")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_and_anti_correlation() {
        let x = [1.0, 2.0, 4.0, 3.0, 7.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v + 0.1).collect();
        let z: Vec<f64> = x.iter().map(|v| 5.0 - v).collect();
        assert!((pearson(&x, &y).unwrap() - 1.0).abs() < 1e-12);
        assert!((pearson(&x, &z).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_series_has_no_correlation() {
        assert_eq!(pearson(&[0.3, 0.3, 0.3, 0.3], &[1.0, 2.0, 3.0, 4.0]), None);
        assert_eq!(pearson(&[1.0f64], &[1.0]), None);
    }

    #[test]
    fn moving_average_basic() {
        assert_eq!(moving_average(&[1.0, 3.0, 5.0, 7.0], 2), vec![1.0, 2.0, 4.0, 6.0]);
    }
}
