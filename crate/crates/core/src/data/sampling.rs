use rand::Rng;

/// Exact Poisson variate: sequential inversion below mean 30, Hörmann's PTRS above.
pub fn poisson_sample<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    assert!(
        mean >= 0.0 && mean.is_finite(),
        "Poisson mean must be finite and nonnegative"
    );
    if mean == 0.0 {
        0
    } else if mean < 30.0 {
        inversion(mean, rng)
    } else {
        ptrs(mean, rng)
    }
}

fn inversion<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    let u: f64 = rng.random();
    let mut k = 0u64;
    let mut p = (-mean).exp();
    let mut cdf = p;
    while u > cdf {
        k += 1;
        p *= mean / k as f64;
        let next = cdf + p;
        // Guard against the tail underflowing before u is reached.
        if next == cdf {
            break;
        }
        cdf = next;
    }
    k
}

fn log_factorial(k: u64) -> f64 {
    if k < 10 {
        return (2..=k).map(|i| (i as f64).ln()).sum();
    }
    let x = k as f64 + 1.0;
    // Stirling series for ln Γ(x).
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x.powi(3))
        + 1.0 / (1260.0 * x.powi(5))
}

fn ptrs<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    let slam = mean.sqrt();
    let loglam = mean.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let v_r = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u: f64 = rng.random::<f64>() - 0.5;
        let v: f64 = rng.random();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + mean + 0.43).floor();
        if us >= 0.07 && v <= v_r {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = (v * inv_alpha / (a / (us * us) + b)).ln();
        let rhs = -mean + k * loglam - log_factorial(k as u64);
        if lhs <= rhs {
            return k as u64;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn zero_mean_is_zero() {
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        assert!((0..100).all(|_| poisson_sample(0.0, &mut rng) == 0));
    }

    #[test]
    fn log_factorial_matches_product() {
        for k in [10u64, 15, 30, 60] {
            let exact: f64 = (2..=k).map(|i| (i as f64).ln()).sum();
            assert!((log_factorial(k) - exact).abs() < 1e-10 * exact);
        }
    }

    #[test]
    fn small_and_large_means_have_poisson_moments() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for mean in [0.3, 4.0, 29.0, 31.0, 250.0] {
            let n = 200_000;
            let xs: Vec<f64> = (0..n)
                .map(|_| poisson_sample(mean, &mut rng) as f64)
                .collect();
            let m = xs.iter().sum::<f64>() / n as f64;
            let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
            assert!(
                (m - mean).abs() < 4.0 * (mean / n as f64).sqrt(),
                "mean {mean}: {m}"
            );
            assert!((var / mean - 1.0).abs() < 0.03, "mean {mean}: var {var}");
        }
    }
}
