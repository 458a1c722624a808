//! Sample statistics used by the Monte Carlo estimators.

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (divisor `n − 1`).
pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64
}

pub fn std_err_mean(xs: &[f64]) -> f64 {
    libm::sqrt(sample_variance(xs) / xs.len() as f64)
}

/// Jackknife standard error of the sample variance.
pub fn jackknife_variance_se(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 3 {
        return f64::NAN;
    }
    let m = mean(xs);
    let centred: alloc::vec::Vec<f64> = xs.iter().map(|x| x - m).collect();
    let s1: f64 = centred.iter().sum();
    let s2: f64 = centred.iter().map(|x| x * x).sum();
    let k = (n - 1) as f64;
    let loo: alloc::vec::Vec<f64> = centred
        .iter()
        .map(|&x| {
            let mi = (s1 - x) / k;
            (s2 - x * x - k * mi * mi) / (k - 1.0)
        })
        .collect();
    let lm = mean(&loo);
    libm::sqrt(k / n as f64 * loo.iter().map(|v| (v - lm) * (v - lm)).sum::<f64>())
}

/// Least-squares slope of `ys` against `xs`.
pub fn linear_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let mx = mean(xs);
    let my = mean(ys);
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_moments() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&xs), 2.5);
        assert!((sample_variance(&xs) - 5.0 / 3.0).abs() < 1e-15);
        assert!(sample_variance(&[1.0]).is_nan());
    }

    #[test]
    fn jackknife_matches_brute_force() {
        let xs = [0.3, -1.2, 2.5, 0.7, 0.1, -0.4, 1.9];
        let n = xs.len();
        let loo: alloc::vec::Vec<f64> = (0..n)
            .map(|i| {
                let rest: alloc::vec::Vec<f64> =
                    xs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, &x)| x).collect();
                sample_variance(&rest)
            })
            .collect();
        let lm = mean(&loo);
        let brute = libm::sqrt((n - 1) as f64 / n as f64 * loo.iter().map(|v| (v - lm) * (v - lm)).sum::<f64>());
        assert!((jackknife_variance_se(&xs) - brute).abs() < 1e-12);
    }

    #[test]
    fn slope_of_line() {
        let xs = [2.0, 3.0, 4.0, 5.0];
        let ys: alloc::vec::Vec<f64> = xs.iter().map(|x| -2.0 * x + 1.0).collect();
        assert!((linear_slope(&xs, &ys) + 2.0).abs() < 1e-12);
    }
}
