//! Haar-random unitaries.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::matrix::{ComplexMatrix, ZERO};

/// Samples `U ∼ Haar(U(dim))`.
///
/// Draws a Ginibre matrix with i.i.d. standard complex Gaussian entries and
/// orthonormalises its columns by modified Gram–Schmidt. This is the QR
/// factorisation with a positive real diagonal in `R`, which is the phase
/// correction that makes `Q` exactly Haar distributed.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let scale = core::f64::consts::FRAC_1_SQRT_2;
    // column-major scratch: cols[j][i]
    let mut cols: alloc::vec::Vec<alloc::vec::Vec<Complex64>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(re * scale, im * scale)
                })
                .collect()
        })
        .collect();
    for j in 0..dim {
        let (done, rest) = cols.split_at_mut(j);
        let col = &mut rest[0];
        // two passes of projection keep orthogonality at machine precision
        for _ in 0..2 {
            for q in done.iter() {
                let proj: Complex64 = q.iter().zip(col.iter()).map(|(a, b)| a.conj() * b).sum();
                for (c, a) in col.iter_mut().zip(q) {
                    *c -= proj * a;
                }
            }
        }
        let norm = libm::sqrt(col.iter().map(|x| x.norm_sqr()).sum::<f64>());
        for c in col.iter_mut() {
            *c /= norm;
        }
    }
    let mut u = ComplexMatrix::zeros(dim, dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            if x != ZERO {
                u.set(i, j, x);
            }
        }
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::stream;

    #[test]
    fn output_is_unitary() {
        let mut rng = stream(11);
        for dim in [1, 2, 5, 16, 64] {
            let u = haar_unitary(dim, &mut rng);
            let defect = (&(&u.adjoint() * &u) - &ComplexMatrix::identity(dim)).frobenius_norm();
            assert!(defect < 1e-10, "dim {dim}: {defect}");
        }
    }

    #[test]
    fn first_moment_of_corner_entry() {
        // ∫ |U₀₀|² dU = 1/d
        let mut rng = stream(12);
        let samples = 100_000;
        let mean: f64 = (0..samples).map(|_| haar_unitary(2, &mut rng).get(0, 0).norm_sqr()).sum::<f64>()
            / samples as f64;
        assert!((mean - 0.5).abs() < 0.01, "{mean}");
    }

    #[test]
    fn left_invariance_of_low_moments() {
        // W·U must reproduce the first two moments of U (|U₀₀|², |U₀₀|⁴, |U₀₁|²).
        let mut rng = stream(13);
        let w = haar_unitary(2, &mut rng);
        let samples = 100_000;
        let (mut a2, mut a4, mut b2, mut c2, mut c4, mut d2) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for _ in 0..samples {
            let u = haar_unitary(2, &mut rng);
            let wu = &w * &u;
            let (x, y) = (u.get(0, 0).norm_sqr(), u.get(0, 1).norm_sqr());
            let (p, q) = (wu.get(0, 0).norm_sqr(), wu.get(0, 1).norm_sqr());
            a2 += x;
            a4 += x * x;
            b2 += y;
            c2 += p;
            c4 += p * p;
            d2 += q;
        }
        let s = samples as f64;
        assert!((a2 / s - c2 / s).abs() < 0.01);
        assert!((a4 / s - c4 / s).abs() < 0.01);
        assert!((b2 / s - d2 / s).abs() < 0.01);
        // ∫ |U₀₀|⁴ = 2/(d(d+1)) = 1/3 at d = 2
        assert!((c4 / s - 1.0 / 3.0).abs() < 0.01);
    }
}
