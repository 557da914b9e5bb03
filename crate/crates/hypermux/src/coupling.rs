//! Cross-layer coordinate correlation.
//!
//! Radial coordinates of common nodes are coupled through the bivariate
//! Gumbel-Hougaard copula `C_eta(u, v) = exp(-((-ln u)^eta + (-ln v)^eta)^{1/eta})`
//! applied to the exponential radial CDFs, with `eta = 1/(1 - nu)`. Angular
//! coordinates are coupled by adding a truncated-Gaussian directed arc length
//! `l` on the circle of radius `N/(2 pi)`: `theta2 = theta1 + 2 pi l / N`.
//! Both couplings preserve the single-layer marginals exactly.

use crate::error::{Error, Result};
use crate::geom::{wrap_angle, LayerParams};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;
use std::f64::consts::PI;

/// Radial (`nu`) and angular (`g`) correlation strengths with their derived
/// constants. `n_scale` is the node count of the layer whose circle carries
/// the arc offsets (the target layer of the coupling).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationParams {
    pub nu: f64,
    pub g: f64,
    /// Copula exponent `eta = 1/(1 - nu) >= 1`.
    pub eta_copula: f64,
    /// Truncated-Gaussian standard deviation `sigma = sigma0 (1/g - 1)`.
    pub sigma: f64,
    /// `sigma0 = min(100, N/(4 pi))`, the deviation at `g = 1/2`.
    pub sigma0: f64,
    pub n_scale: usize,
}

impl CorrelationParams {
    pub fn new(nu: f64, g: f64, n_scale: usize) -> Result<Self> {
        if !(nu.is_finite() && (0.0..1.0).contains(&nu)) {
            return Err(Error::InvalidParameter(format!("nu = {nu}, need nu in [0, 1)")));
        }
        if !(g.is_finite() && g > 0.0 && g <= 1.0) {
            return Err(Error::InvalidParameter(format!("g = {g}, need g in (0, 1]")));
        }
        let sigma0 = 100f64.min(n_scale as f64 / (4.0 * PI));
        Ok(Self {
            nu,
            g,
            eta_copula: 1.0 / (1.0 - nu),
            sigma: sigma0 * (1.0 / g - 1.0),
            sigma0,
            n_scale,
        })
    }
}

/// `phi = (R - r) / (2 beta)`, the negated log of the radial CDF.
#[inline]
fn phi(r: f64, params: &LayerParams) -> f64 {
    (params.disc_radius - r) / (2.0 * params.beta)
}

/// Conditional density of `r2` given `r1` under the Gumbel-Hougaard copula
/// with exponent `eta = 1/(1 - nu)`. At `nu = 0` this collapses to the
/// layer-2 marginal. Evaluated in log space; stable up to `nu = 0.999`.
pub fn conditional_radial_pdf(
    r2: f64,
    r1: f64,
    params1: &LayerParams,
    params2: &LayerParams,
    nu: f64,
) -> Result<f64> {
    if !(nu.is_finite() && (0.0..1.0).contains(&nu)) {
        return Err(Error::InvalidParameter(format!("nu = {nu}, need nu in [0, 1)")));
    }
    let eta = 1.0 / (1.0 - nu);
    let p1 = phi(r1, params1);
    let p2 = phi(r2, params2);
    if p2 < 0.0 {
        return Ok(0.0); // no support above the disc radius
    }
    if eta == 1.0 {
        return Ok((-p2).exp() / (2.0 * params2.beta));
    }
    if p1 <= 0.0 || p2 == 0.0 {
        // Boundary of the copula domain; the density vanishes for eta > 1.
        return Ok(0.0);
    }
    // log-space combination of phi1^eta + phi2^eta
    let (ln_max, ln_min) = {
        let (a, b) = (p1.ln(), p2.ln());
        if a >= b {
            (a, b)
        } else {
            (b, a)
        }
    };
    let t = (eta * (ln_min - ln_max)).exp();
    let ln_s = eta * ln_max + t.ln_1p(); // ln(phi1^eta + phi2^eta)
    let a = (ln_s / eta).exp(); // (phi1^eta + phi2^eta)^{1/eta}
    let ln_pdf = -((2.0 * params2.beta).ln()) + p1 - a
        + (eta - 1.0) * (p1.ln() + p2.ln())
        + (1.0 / eta - 2.0) * ln_s
        + (a + eta - 1.0).ln();
    Ok(ln_pdf.exp())
}

/// Conditional CDF `P(R2 <= r2 | R1 = r1)` of the copula coupling, i.e. the
/// derivative of `C_eta` with respect to its first marginal. Decreasing in
/// `phi2`, equal to 1 at `r2 = R2`.
pub fn conditional_radial_cdf(
    r2: f64,
    r1: f64,
    params1: &LayerParams,
    params2: &LayerParams,
    nu: f64,
) -> f64 {
    let eta = 1.0 / (1.0 - nu);
    let p1 = phi(r1, params1);
    let p2 = phi(r2, params2).max(0.0);
    conditional_cdf_phi(p2, p1, eta)
}

#[inline]
fn conditional_cdf_phi(phi2: f64, phi1: f64, eta: f64) -> f64 {
    if eta == 1.0 {
        return (-phi2).exp();
    }
    if phi2 == 0.0 {
        return 1.0;
    }
    if phi1 <= 0.0 {
        return 0.0; // degenerate conditional: all mass at the disc boundary
    }
    let (ln_max, ln_min) = {
        let (a, b) = (phi1.ln(), phi2.ln());
        if a >= b {
            (a, b)
        } else {
            (b, a)
        }
    };
    let t = (eta * (ln_min - ln_max)).exp();
    let ln_s = eta * ln_max + t.ln_1p();
    let a = (ln_s / eta).exp();
    (phi1 - a + (eta - 1.0) * (phi1.ln() - ln_s / eta)).exp()
}

/// Quantile of the conditional law of `r2` given `r1`: the `u`-level point of
/// the copula conditional CDF, found by bisection to an `r2`-tolerance of
/// 1e-10 and clamped to `[0, R2]` (the approximate CDF has vanishing tail
/// mass below 0).
pub fn conditional_radial_quantile(
    u: f64,
    r1: f64,
    params1: &LayerParams,
    params2: &LayerParams,
    nu: f64,
) -> Result<f64> {
    if !(nu.is_finite() && (0.0..1.0).contains(&nu)) {
        return Err(Error::InvalidParameter(format!("nu = {nu}, need nu in [0, 1)")));
    }
    let eta = 1.0 / (1.0 - nu);
    let phi1 = phi(r1, params1);
    if eta > 1.0 && phi1 <= 0.0 {
        // r1 on the disc boundary: the conditional concentrates at R2.
        return Ok(params2.disc_radius);
    }
    // G(phi2) = conditional CDF, decreasing in phi2 from 1 at phi2 = 0.
    let g = |p2: f64| conditional_cdf_phi(p2, phi1, eta);
    let mut hi = 2.0 * (phi1 + 5.0);
    while g(hi) > u {
        hi *= 2.0;
        if hi > 1e9 {
            break;
        }
    }
    let mut lo = 0.0f64;
    let tol = 1e-10 / (2.0 * params2.beta);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if g(mid) > u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let phi2 = 0.5 * (lo + hi);
    Ok((params2.disc_radius - 2.0 * params2.beta * phi2).clamp(0.0, params2.disc_radius))
}

/// Draws `r2` conditioned on `r1` by inverting the conditional CDF at a
/// uniform draw.
pub fn sample_conditional_radial(
    r1: f64,
    params1: &LayerParams,
    params2: &LayerParams,
    nu: f64,
    rng: &mut impl Rng,
) -> Result<f64> {
    conditional_radial_quantile(rng.random::<f64>(), r1, params1, params2, nu)
}

/// Draws a directed arc length `l in [-N/2, N/2]` from the zero-mean
/// truncated Gaussian with deviation `corr.sigma`. `g = 1` returns exactly 0.
/// Rejection from the untruncated Gaussian; for `sigma > 10 N` the density is
/// uniform to 1e-2 and a uniform proposal is used instead.
pub fn sample_angular_offset(corr: &CorrelationParams, n: usize, rng: &mut impl Rng) -> f64 {
    let sigma = corr.sigma;
    if sigma == 0.0 {
        return 0.0;
    }
    let half = n as f64 / 2.0;
    if sigma > 10.0 * n as f64 {
        loop {
            let l = rng.random_range(-half..half);
            if rng.random::<f64>() <= (-l * l / (2.0 * sigma * sigma)).exp() {
                return l;
            }
        }
    }
    let normal = Normal::new(0.0, sigma).expect("sigma > 0");
    loop {
        let l = normal.sample(rng);
        if l.abs() <= half {
            return l;
        }
    }
}

/// `theta2 = (theta1 + 2 pi l / N) mod 2 pi`.
pub fn assign_layer2_angle(theta1: f64, l: f64, n: usize) -> f64 {
    wrap_angle(theta1 + 2.0 * PI * l / n as f64)
}

/// CDF of the layer-2 angular distance conditioned on the layer-1 angular
/// distance: `P(dtheta2 <= dtheta | dtheta1)`.
///
/// The offset difference `l - l'` is Gaussian with variance `2 sigma^2`, so
/// `dtheta2` is a Gaussian around `dtheta1` folded at 0 and at `pi`. Two
/// branches cover `dtheta <= pi - dtheta1` and the remainder.
pub fn conditional_angular_cdf(
    delta_theta: f64,
    delta_theta1: f64,
    corr: &CorrelationParams,
    n: usize,
) -> f64 {
    debug_assert!((0.0..=PI + 1e-12).contains(&delta_theta));
    debug_assert!((0.0..=PI + 1e-12).contains(&delta_theta1));
    if corr.sigma == 0.0 {
        // Degenerate coupling: dtheta2 = dtheta1 exactly.
        return if delta_theta >= delta_theta1 { 1.0 } else { 0.0 };
    }
    let scale = n as f64 / (4.0 * PI * corr.sigma);
    let norm = 2.0 * erf(n as f64 / (4.0 * corr.sigma));
    if delta_theta <= PI - delta_theta1 {
        (erf(scale * (delta_theta - delta_theta1)) + erf(scale * (delta_theta + delta_theta1)))
            / norm
    } else {
        1.0 - erf(scale * (2.0 * PI - delta_theta - delta_theta1)) / norm
            + erf(scale * (delta_theta - delta_theta1)) / norm
    }
}

/// Folded-Gaussian density of the layer-2 angular distance conditioned on the
/// layer-1 angular distance; the derivative of [`conditional_angular_cdf`].
pub fn conditional_angular_pdf(
    delta_theta2: f64,
    delta_theta1: f64,
    corr: &CorrelationParams,
    n: usize,
) -> f64 {
    let sigma_tilde = 2.0 * std::f64::consts::SQRT_2 * PI * corr.sigma / n as f64;
    let k = erf(n as f64 / (4.0 * corr.sigma));
    let direct = (-(delta_theta2 - delta_theta1).powi(2) / (2.0 * sigma_tilde * sigma_tilde)).exp();
    let fold_arg = PI - (PI - delta_theta2 - delta_theta1).abs();
    let folded = (-fold_arg * fold_arg / (2.0 * sigma_tilde * sigma_tilde)).exp();
    (direct + folded) / (k * (2.0 * PI).sqrt() * sigma_tilde)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::derive_params;
    use crate::quad::{adaptive_quad, QuadOptions};
    use crate::stats;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn fig10_params() -> (LayerParams, LayerParams) {
        (
            derive_params(5000, 6.0, 2.1, 0.5).unwrap(),
            derive_params(3000, 6.0, 2.5, 0.5).unwrap(),
        )
    }

    #[test]
    fn correlation_params_constants() {
        let c = CorrelationParams::new(0.5, 0.5, 1000).unwrap();
        assert_relative_eq!(c.sigma0, 79.57747154594767, max_relative = 1e-12);
        assert_relative_eq!(c.sigma, c.sigma0, max_relative = 1e-12);
        assert_relative_eq!(c.eta_copula, 2.0, max_relative = 1e-12);
        let c1 = CorrelationParams::new(0.0, 1.0, 5000).unwrap();
        assert_eq!(c1.sigma, 0.0);
        assert_eq!(c1.eta_copula, 1.0);
        assert!(CorrelationParams::new(1.0, 0.5, 100).is_err());
        assert!(CorrelationParams::new(0.5, 0.0, 100).is_err());
        assert!(CorrelationParams::new(0.5, 1.1, 100).is_err());
    }

    #[test]
    fn conditional_pdf_collapses_at_nu_zero() {
        let (p1, p2) = fig10_params();
        for &r1 in &[2.0, 10.0, 20.0, p1.disc_radius] {
            for i in 0..30 {
                let r2 = p2.disc_radius * i as f64 / 30.0;
                let marginal = ((r2 - p2.disc_radius) / (2.0 * p2.beta)).exp() / (2.0 * p2.beta);
                assert_relative_eq!(
                    conditional_radial_pdf(r2, r1, &p1, &p2, 0.0).unwrap(),
                    marginal,
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn conditional_pdf_normalizes() {
        let (p1, p2) = fig10_params();
        let opts = QuadOptions {
            rel_tol: 1e-9,
            ..Default::default()
        };
        for &nu in &[0.0, 0.3, 0.6, 0.9] {
            for &r1 in &[5.0, 15.0, 21.0] {
                // Support extends below 0 in the approximate law; integrate
                // deep enough for the e^{-phi2} tail to vanish.
                let lo = p2.disc_radius - 2.0 * p2.beta * 200.0;
                let total = adaptive_quad(
                    |r2| conditional_radial_pdf(r2, r1, &p1, &p2, nu),
                    lo,
                    p2.disc_radius,
                    &[0.0, p2.disc_radius - 2.0 * p2.beta * phi(r1, &p1)],
                    &opts,
                )
                .unwrap()
                .value;
                assert!((total - 1.0).abs() < 1e-6, "nu={nu} r1={r1}: {total}");
            }
        }
    }

    #[test]
    fn conditional_pdf_rejects_bad_nu() {
        let (p1, p2) = fig10_params();
        assert!(conditional_radial_pdf(10.0, 10.0, &p1, &p2, 1.0).is_err());
        assert!(conditional_radial_pdf(10.0, 10.0, &p1, &p2, -0.1).is_err());
    }

    #[test]
    fn strong_coupling_concentrates_near_matching_quantile() {
        // Equal margins, nu = 0.9, r1 near R1: mass concentrates near r2 = R2.
        let p = derive_params(3000, 6.0, 2.5, 0.5).unwrap();
        let r1 = p.disc_radius - 0.05;
        let opts = QuadOptions::default();
        let near = adaptive_quad(
            |r2| conditional_radial_pdf(r2, r1, &p, &p, 0.9),
            p.disc_radius - 0.5,
            p.disc_radius,
            &[],
            &opts,
        )
        .unwrap()
        .value;
        assert!(near > 0.9, "mass within 0.5 of R2: {near}");
        // And the conditional CDF at r1 itself sits near the median.
        let c = conditional_radial_cdf(r1, r1, &p, &p, 0.9);
        assert!((0.2..0.8).contains(&c), "cdf at matching point: {c}");
    }

    #[test]
    fn conditional_sampler_independence_case() {
        let (p1, p2) = fig10_params();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let samples: Vec<f64> = (0..100_000)
            .map(|_| {
                let r1 = p1.sample_radial(&mut rng);
                sample_conditional_radial(r1, &p1, &p2, 0.0, &mut rng).unwrap()
            })
            .collect();
        let d = stats::ks_statistic(&samples, |r| p2.radial_cdf(r));
        assert!(d < 0.01, "KS = {d}");
    }

    #[test]
    fn conditional_sampler_near_maximal_coupling_tracks_r1() {
        // nu -> 1 with identical margins: r2 ~ r1 for 99% of draws.
        let p = derive_params(3000, 6.0, 2.5, 0.5).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let mut close = 0;
        let n = 10_000;
        for _ in 0..n {
            let r1 = p.sample_radial(&mut rng);
            let r2 = sample_conditional_radial(r1, &p, &p, 0.999, &mut rng).unwrap();
            if (r2 - r1).abs() < 0.1 {
                close += 1;
            }
        }
        assert!(close as f64 >= 0.99 * n as f64, "close fraction {}", close as f64 / n as f64);
    }

    #[test]
    fn copula_preserves_marginal_at_all_strengths() {
        let (p1, p2) = fig10_params();
        for &nu in &[0.3, 0.9] {
            let mut rng = ChaCha12Rng::seed_from_u64(17 + (nu * 10.0) as u64);
            let samples: Vec<f64> = (0..100_000)
                .map(|_| {
                    let r1 = p1.sample_radial(&mut rng);
                    sample_conditional_radial(r1, &p1, &p2, nu, &mut rng).unwrap()
                })
                .collect();
            let d = stats::ks_statistic(&samples, |r| p2.radial_cdf(r));
            assert!(d < 0.01, "nu = {nu}: KS = {d}");
        }
    }

    #[test]
    fn angular_offset_limits() {
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let corr_g1 = CorrelationParams::new(0.5, 1.0, 1000).unwrap();
        for _ in 0..100 {
            assert_eq!(sample_angular_offset(&corr_g1, 1000, &mut rng), 0.0);
        }

        // g -> 0 proxy: offsets uniform on [-N/2, N/2] (chi-squared, 1% level).
        let n = 1000;
        let corr = CorrelationParams::new(0.5, 1e-4, n).unwrap();
        assert!(corr.sigma > 10.0 * n as f64);
        let bins = 20;
        let mut counts = vec![0u64; bins];
        let draws = 100_000;
        for _ in 0..draws {
            let l = sample_angular_offset(&corr, n, &mut rng);
            assert!(l.abs() <= n as f64 / 2.0);
            let idx = (((l + n as f64 / 2.0) / n as f64) * bins as f64) as usize;
            counts[idx.min(bins - 1)] += 1;
        }
        let chi2 = stats::chi_squared_uniform(&counts);
        // 99th percentile of chi-squared with 19 dof.
        use statrs::distribution::{ChiSquared, ContinuousCDF};
        let crit = ChiSquared::new((bins - 1) as f64).unwrap().inverse_cdf(0.99);
        assert!(chi2 < crit, "chi2 = {chi2}, crit = {crit}");
    }

    #[test]
    fn offset_difference_variance_is_two_sigma_squared() {
        let n = 3000;
        let corr = CorrelationParams::new(0.5, 0.5, n).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let diffs: Vec<f64> = (0..200_000)
            .map(|_| {
                sample_angular_offset(&corr, n, &mut rng) - sample_angular_offset(&corr, n, &mut rng)
            })
            .collect();
        let var = stats::sample_variance(&diffs);
        assert!(
            (var - 2.0 * corr.sigma * corr.sigma).abs() < 0.02 * 2.0 * corr.sigma * corr.sigma,
            "var = {var}, expected ~{}",
            2.0 * corr.sigma * corr.sigma
        );
    }

    #[test]
    fn angle_assignment() {
        assert_eq!(assign_layer2_angle(1.234, 0.0, 500), 1.234);
        assert_relative_eq!(
            assign_layer2_angle(6.0, 250.0, 1000),
            1.2876110196153101,
            max_relative = 1e-12
        );
    }

    #[test]
    fn layer2_angle_marginal_stays_uniform() {
        let n = 1000;
        let corr = CorrelationParams::new(0.5, 0.5, n).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let samples: Vec<f64> = (0..100_000)
            .map(|_| {
                let t1 = rng.random::<f64>() * 2.0 * PI;
                let l = sample_angular_offset(&corr, n, &mut rng);
                assign_layer2_angle(t1, l, n)
            })
            .collect();
        let d = stats::ks_statistic(&samples, |t| t / (2.0 * PI));
        assert!(d < 0.01, "KS = {d}");
    }

    #[test]
    fn angular_cdf_total_probability_and_monotonicity() {
        let n = 3000;
        for &g in &[0.3, 0.5, 0.9] {
            let corr = CorrelationParams::new(0.2, g, n).unwrap();
            for &dt1 in &[0.0, 0.4, 1.5, 2.9, PI] {
                assert_relative_eq!(conditional_angular_cdf(PI, dt1, &corr, n), 1.0, epsilon = 1e-12);
                let mut prev = -1e-12;
                for k in 0..=100 {
                    let dt = PI * k as f64 / 100.0;
                    let c = conditional_angular_cdf(dt, dt1, &corr, n);
                    assert!(c >= prev - 1e-12, "g={g} dt1={dt1}: not monotone at {dt}");
                    prev = c;
                }
                if dt1 > 0.0 {
                    assert!(conditional_angular_cdf(0.0, dt1, &corr, n).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn angular_cdf_at_zero_reference_distance() {
        // dtheta1 = 0 reduces to erf(N dt/(4 pi sigma)) / erf(N/(4 sigma)).
        let n = 3000;
        let corr = CorrelationParams::new(0.2, 0.5, n).unwrap();
        for k in 1..10 {
            let dt = PI * k as f64 / 10.0;
            let expected = erf(n as f64 * dt / (4.0 * PI * corr.sigma)) / erf(n as f64 / (4.0 * corr.sigma));
            assert_relative_eq!(
                conditional_angular_cdf(dt, 0.0, &corr, n),
                expected,
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn angular_pdf_normalizes_over_grid() {
        let n = 3000;
        let opts = QuadOptions {
            rel_tol: 1e-9,
            ..Default::default()
        };
        for &g in &[0.3, 0.5, 0.8] {
            let corr = CorrelationParams::new(0.2, g, n).unwrap();
            for &dt1 in &[0.1, 0.7, 1.6, 2.6] {
                let total = adaptive_quad(
                    |dt2| Ok(conditional_angular_pdf(dt2, dt1, &corr, n)),
                    0.0,
                    PI,
                    &[dt1],
                    &opts,
                )
                .unwrap()
                .value;
                assert!((total - 1.0).abs() < 1e-6, "g={g} dt1={dt1}: {total}");
            }
        }
    }

    #[test]
    fn angular_cdf_matches_monte_carlo() {
        // Offsets sampled on the target-layer circle (N = 3000), g = 0.5.
        let n = 3000;
        let corr = CorrelationParams::new(0.2, 0.5, n).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(12);
        for &dt1 in &[0.1, 0.5, 1.0, 2.0, 2.5, 3.0] {
            let samples: Vec<f64> = (0..100_000)
                .map(|_| {
                    let l = sample_angular_offset(&corr, n, &mut rng);
                    let lp = sample_angular_offset(&corr, n, &mut rng);
                    let shifted = wrap_angle(dt1 + 2.0 * PI * (l - lp) / n as f64);
                    PI - (PI - shifted).abs()
                })
                .collect();
            let d = stats::ks_statistic(&samples, |dt| conditional_angular_cdf(dt, dt1, &corr, n));
            assert!(d < 0.01, "dt1 = {dt1}: KS = {d}");
        }
    }
}
