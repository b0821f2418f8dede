//! Small numerical helpers: error function, normal distribution, quadrature.

/// Error function, Abramowitz & Stegun 7.1.26 (|error| < 1.5e-7).
pub fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    if x > 6.0 {
        return sign;
    }
    let t = 1.0 / (1.0 + 0.327_591_1 * x);
    let poly = t
        * (0.254_829_592
            + t * (-0.284_496_736 + t * (1.421_413_741 + t * (-1.453_152_027 + t * 1.061_405_429))));
    sign * (1.0 - poly * (-x * x).exp())
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2))
}

/// Standard normal PDF.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// 8-point Gauss-Legendre nodes and weights on [-1, 1].
pub const GL8_NODES: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];

pub const GL8_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

/// Integrates `f` over [a, b] with 8-point Gauss-Legendre.
pub fn integrate_gl8(a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (node, weight) in GL8_NODES.iter().zip(&GL8_WEIGHTS) {
        acc += weight * f(mid + half * node);
    }
    acc * half
}

/// Linearly interpolated quantile (type 7) of unsorted data. `q` in [0, 1].
pub fn quantile(data: &[f64], q: f64) -> f64 {
    assert!(!data.is_empty());
    let mut sorted: Vec<f64> = data.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = pos - lo as f64;
        sorted[lo] * (1.0 - frac) + sorted[hi] * frac
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn erf_known_values() {
        assert_relative_eq!(erf(0.0), 0.0, epsilon = 1e-12);
        assert_relative_eq!(erf(1.0), 0.8427007929, epsilon = 2e-7);
        assert_relative_eq!(erf(-1.0), -0.8427007929, epsilon = 2e-7);
        assert_relative_eq!(erf(2.0), 0.9953222650, epsilon = 2e-7);
        assert_eq!(erf(10.0), 1.0);
    }

    #[test]
    fn gl8_integrates_polynomials_exactly() {
        let got = integrate_gl8(0.0, 2.0, |x| 3.0 * x * x);
        assert_relative_eq!(got, 8.0, epsilon = 1e-12);
        let gauss = integrate_gl8(-5.0, 5.0, normal_pdf);
        assert_relative_eq!(gauss, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn quantile_interpolates() {
        let data = [1.0, 2.0, 3.0, 4.0];
        assert_relative_eq!(quantile(&data, 0.0), 1.0);
        assert_relative_eq!(quantile(&data, 1.0), 4.0);
        assert_relative_eq!(quantile(&data, 0.5), 2.5);
    }
}
