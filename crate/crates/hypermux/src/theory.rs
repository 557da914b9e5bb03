//! Closed-form and numerically integrated reference predictions for the
//! two-layer model with link persistence.
//!
//! Closed forms cover the uncorrelated and maximally correlated regimes:
//! the layer-1 connection constant `eta(x2)`, the pooled layer-2 connection
//! probability, the trans-layer limits, the radius-conditioned degree
//! `k2_tilde(r)` and the average-degree bounds. The conditional hyperbolic
//! distance CDF given `(r1, r1', dtheta1)` is evaluated by iterated adaptive
//! quadrature over the coupled layer-2 radial laws; its PDF follows by
//! central finite differences. A Monte-Carlo estimator substitutes for the
//! distance-conditioned density `f(x2 | x1)`, which has no tractable form.

use crate::coupling::{conditional_angular_cdf, conditional_radial_pdf, conditional_radial_quantile,
    sample_angular_offset, CorrelationParams};
use crate::error::{Error, Result};
use crate::geom::{hyperbolic_distance_polar, LayerParams};
use crate::quad::{adaptive_quad, QuadOptions};
use rand::Rng;
use std::f64::consts::PI;

/// Everything the reference predictions need, bundled.
#[derive(Debug, Clone)]
pub struct TheoryContext {
    pub params1: LayerParams,
    pub params2: LayerParams,
    pub corr: CorrelationParams,
    pub w: f64,
    pub quad_rel_tol: f64,
    pub quad_max_evals: usize,
    /// Step of the central finite difference behind the conditional PDF.
    pub fd_step: f64,
    /// Half-width of the acceptance band of the Monte-Carlo `x1` conditioner.
    pub mc_band: f64,
}

impl TheoryContext {
    pub fn new(
        params1: LayerParams,
        params2: LayerParams,
        corr: CorrelationParams,
        w: f64,
    ) -> Result<Self> {
        if !(w.is_finite() && (0.0..=1.0).contains(&w)) {
            return Err(Error::InvalidParameter(format!("w = {w}, need w in [0, 1]")));
        }
        Ok(Self {
            params1,
            params2,
            corr,
            w,
            quad_rel_tol: 1e-6,
            quad_max_evals: 2_000_000,
            fd_step: 1e-3,
            mc_band: 0.25,
        })
    }

    fn outer_opts(&self) -> QuadOptions {
        QuadOptions {
            rel_tol: self.quad_rel_tol,
            abs_tol: 1e-12,
            max_evals: self.quad_max_evals,
        }
    }

    fn inner_opts(&self) -> QuadOptions {
        QuadOptions {
            rel_tol: self.quad_rel_tol / 10.0,
            abs_tol: 1e-13,
            max_evals: self.quad_max_evals,
        }
    }
}

/// Correlation regime admitting closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Uncorrelated,
    MaxCorrelated,
}

/// Which layer-1 pair set a trans-layer limit refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitSet {
    Connected,
    Disconnected,
}

/// Probability that a pair at layer-2 distance `x2` is connected in layer 1:
/// the constant `k1/N` without correlations, `p1(x2)` at maximal correlation.
pub fn eta_limits(ctx: &TheoryContext, x2: f64, regime: Regime) -> f64 {
    match regime {
        Regime::Uncorrelated => ctx.params1.mean_degree / ctx.params1.n_nodes as f64,
        Regime::MaxCorrelated => ctx.params1.connection_probability(x2),
    }
}

/// Pooled layer-2 connection probability under link persistence:
/// `p2(x2) + (1 - p2(x2)) w eta(x2)`.
pub fn p2_all_prediction(ctx: &TheoryContext, x2: f64, regime: Regime) -> f64 {
    let p2 = ctx.params2.connection_probability(x2);
    p2 + (1.0 - p2) * ctx.w * eta_limits(ctx, x2, regime)
}

/// Limiting trans-layer connection probabilities at layer-1 distance `x1`.
pub fn trans_layer_limits(ctx: &TheoryContext, x1: f64, set: LimitSet, regime: Regime) -> f64 {
    let base = match regime {
        Regime::Uncorrelated => ctx.params2.mean_degree / ctx.params2.n_nodes as f64,
        Regime::MaxCorrelated => ctx.params2.connection_probability(x1),
    };
    match set {
        LimitSet::Connected => ctx.w + (1.0 - ctx.w) * base,
        LimitSet::Disconnected => base,
    }
}

/// `C = T1 sin(T2 pi) / (T2 sin(T1 pi))`, the kernel-ratio constant of the
/// maximally correlated regime (identical radial coordinate systems).
pub fn kernel_ratio_constant(t1: f64, t2: f64) -> f64 {
    t1 * (t2 * PI).sin() / (t2 * (t1 * PI).sin())
}

/// A point prediction or a lower/upper bound pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DegreePrediction {
    Point(f64),
    Bounds { lower: f64, upper: f64 },
}

/// Expected layer-2 degree at radius `r` under link persistence.
///
/// Uncorrelated: `(1 - w k1/N) k2(r) + w k1`. Maximally correlated:
/// bounds `[A k2(r), B k2(r)]` with `B = 1 + wC`,
/// `A = 1 + wC - w sqrt(C (1-T1)(1-T2))`, collapsing to the point
/// `(1 + w T2) k2(r)` when `T1 = T2`. The maximally correlated forms assume
/// identical radial coordinate systems in the two layers.
pub fn kbar2_tilde_prediction(ctx: &TheoryContext, r: f64, regime: Regime) -> DegreePrediction {
    let k2_r = ctx.params2.expected_degree_at_radius(r);
    match regime {
        Regime::Uncorrelated => {
            let k1 = ctx.params1.mean_degree;
            let n = ctx.params1.n_nodes as f64;
            DegreePrediction::Point((1.0 - ctx.w * k1 / n) * k2_r + ctx.w * k1)
        }
        Regime::MaxCorrelated => {
            let (t1, t2) = (ctx.params1.temperature, ctx.params2.temperature);
            if t1 == t2 {
                return DegreePrediction::Point((1.0 + ctx.w * t2) * k2_r);
            }
            let c = kernel_ratio_constant(t1, t2);
            let b = 1.0 + ctx.w * c;
            let a = b - ctx.w * (c * (1.0 - t1) * (1.0 - t2)).sqrt();
            DegreePrediction::Bounds {
                lower: a * k2_r,
                upper: b * k2_r,
            }
        }
    }
}

/// Bounds on the resulting layer-2 average degree, plus the uncorrelated
/// point value `k2 + w k1 (1 - k2/N)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AverageDegreeBounds {
    pub lower: f64,
    pub upper: f64,
    pub uncorrelated: f64,
}

pub fn average_degree_bounds(ctx: &TheoryContext) -> AverageDegreeBounds {
    let k1 = ctx.params1.mean_degree;
    let k2 = ctx.params2.mean_degree;
    let n = ctx.params2.n_nodes as f64;
    AverageDegreeBounds {
        lower: k2,
        upper: k2 + ctx.w * k1,
        uncorrelated: k2 + ctx.w * k1 * (1.0 - k2 / n),
    }
}

// ---------------------------------------------------------------------------
// Angular-integral identities behind the degree predictions.
// All use the log-form distance approximation, valid deep inside the disc.

/// Connection probability in the log-form distance approximation,
/// `1 / (1 + ((dt/2) e^{(r + r' - R)/2})^{1/T})`.
pub fn approx_connection_kernel(params: &LayerParams, r: f64, rp: f64, dtheta: f64) -> f64 {
    let base = (dtheta / 2.0) * (0.5 * (r + rp - params.disc_radius)).exp();
    1.0 / (1.0 + base.powf(1.0 / params.temperature))
}

/// `(1/pi) int_0^pi kernel^power` for one layer at fixed radii.
pub fn angular_kernel_integral(
    params: &LayerParams,
    r: f64,
    rp: f64,
    power: i32,
    opts: &QuadOptions,
) -> Result<f64> {
    let v = adaptive_quad(
        |dt| Ok(approx_connection_kernel(params, r, rp, dt).powi(power)),
        0.0,
        PI,
        &[],
        opts,
    )?;
    Ok(v.value / PI)
}

/// Closed-form counterpart of the single-kernel angular integral:
/// `(2T/sin(T pi)) e^{-(r + r' - R)/2}`.
pub fn angular_kernel_closed_form(params: &LayerParams, r: f64, rp: f64) -> f64 {
    let t = params.temperature;
    2.0 * t / (t * PI).sin() * (-0.5 * (r + rp - params.disc_radius)).exp()
}

/// Mixed-kernel double integral
/// `(N/pi) int_0^{R2} rho2(r') int_0^pi p1 p2 ddtheta dr'`,
/// bounded by `k2(r) sqrt(C (1-T1)(1-T2))` with the general constant
/// `C = c2 T1 sin(T2 pi) / (c1 T2 sin(T1 pi))`.
pub fn mixed_kernel_integral(ctx: &TheoryContext, r: f64) -> Result<f64> {
    let p2 = &ctx.params2;
    let outer = adaptive_quad(
        |rp| {
            let inner = adaptive_quad(
                |dt| {
                    Ok(approx_connection_kernel(&ctx.params1, r, rp, dt)
                        * approx_connection_kernel(&ctx.params2, r, rp, dt))
                },
                0.0,
                PI,
                &[],
                &ctx.inner_opts(),
            )?;
            let density = ((rp - p2.disc_radius) / (2.0 * p2.beta)).exp() / (2.0 * p2.beta);
            Ok(density * inner.value)
        },
        0.0,
        p2.disc_radius,
        &[],
        &ctx.outer_opts(),
    )?;
    Ok(ctx.params2.n_nodes as f64 / PI * outer.value)
}

/// General kernel-ratio constant including the Fermi constants,
/// `C = c2 T1 sin(T2 pi) / (c1 T2 sin(T1 pi))`.
pub fn kernel_ratio_constant_general(params1: &LayerParams, params2: &LayerParams) -> f64 {
    params2.fermi_constant / params1.fermi_constant
        * kernel_ratio_constant(params1.temperature, params2.temperature)
}

// ---------------------------------------------------------------------------
// Conditional hyperbolic distance CDF/PDF given (r1, r1', dtheta1).

/// Quantile levels seeding the radial integration grid; they bracket the
/// conditional mass even when the copula concentrates it in a narrow band.
const SPLIT_LEVELS: [f64; 15] = [
    1e-8, 1e-6, 1e-4, 1e-3, 0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99, 0.999, 0.9999, 0.999999,
    0.99999999,
];

fn radial_splits(r1: f64, ctx: &TheoryContext) -> Result<Vec<f64>> {
    SPLIT_LEVELS
        .iter()
        .map(|&u| conditional_radial_quantile(u, r1, &ctx.params1, &ctx.params2, ctx.corr.nu))
        .collect()
}

/// CDF of the layer-2 hyperbolic distance of a common pair conditioned on
/// its layer-1 radii `r1, r1'` and angular distance `dtheta1`.
///
/// The integrand runs over the coupled layer-2 radii `(r2, r2')` in
/// `[0, R2]^2` and takes the value 1 where `r2 + r2' <= x2`, and the
/// conditional angular CDF at `dtheta2_tilde = 2 arcsin e^{(x2 - r2 - r2')/2}`
/// elsewhere (its two analytic branches split at `r2 + r2' = x2_tilde`,
/// `x2_tilde = min(x2 - 2 ln sin((pi - dtheta1)/2), 2 R2)`). Integration is
/// iterated adaptive Gauss-Kronrod with segment seeds at the conditional
/// radial quantiles and at the integrand kinks.
pub fn conditional_hyperbolic_cdf(
    x2: f64,
    r1: f64,
    r1p: f64,
    dtheta1: f64,
    ctx: &TheoryContext,
) -> Result<f64> {
    if !(0.0..=PI + 1e-12).contains(&dtheta1) {
        return Err(Error::InvalidParameter(format!(
            "dtheta1 = {dtheta1}, need [0, pi]"
        )));
    }
    let r2_max = ctx.params2.disc_radius;
    if x2 <= 0.0 {
        return Ok(0.0);
    }
    if x2 >= 2.0 * r2_max {
        return Ok(1.0);
    }
    let x2_tilde = (x2 - 2.0 * ((PI - dtheta1) / 2.0).sin().ln()).min(2.0 * r2_max);

    let n2 = ctx.corr.n_scale;
    let corr = &ctx.corr;
    let p1 = &ctx.params1;
    let p2 = &ctx.params2;
    let nu = corr.nu;

    let h = |r2: f64, r2p: f64| -> f64 {
        let s = r2 + r2p;
        if s <= x2 {
            return 1.0;
        }
        let dtheta2_tilde = 2.0 * (0.5 * (x2 - s)).exp().min(1.0).asin();
        conditional_angular_cdf(dtheta2_tilde, dtheta1, corr, n2)
    };

    let outer_splits = radial_splits(r1, ctx)?;
    let inner_quantiles = radial_splits(r1p, ctx)?;
    let inner_opts = ctx.inner_opts();

    let outer = adaptive_quad(
        |r2| {
            let mut splits = inner_quantiles.clone();
            // Integrand kinks along r2' at the unit and branch boundaries.
            splits.push(x2 - r2);
            splits.push(x2_tilde - r2);
            let inner = adaptive_quad(
                |r2p| {
                    let density = conditional_radial_pdf(r2p, r1p, p1, p2, nu)?;
                    Ok(density * h(r2, r2p))
                },
                0.0,
                r2_max,
                &splits,
                &inner_opts,
            )?;
            let density = conditional_radial_pdf(r2, r1, p1, p2, nu)?;
            Ok(density * inner.value)
        },
        0.0,
        r2_max,
        &outer_splits,
        &ctx.outer_opts(),
    )?;
    Ok(outer.value.clamp(0.0, 1.0))
}

/// PDF of the conditional layer-2 distance by central finite differences of
/// [`conditional_hyperbolic_cdf`], clamped to be nonnegative.
pub fn conditional_hyperbolic_pdf(
    x2: f64,
    r1: f64,
    r1p: f64,
    dtheta1: f64,
    ctx: &TheoryContext,
) -> Result<f64> {
    let h = ctx.fd_step;
    let hi = conditional_hyperbolic_cdf(x2 + h, r1, r1p, dtheta1, ctx)?;
    let lo = conditional_hyperbolic_cdf(x2 - h, r1, r1p, dtheta1, ctx)?;
    Ok(((hi - lo) / (2.0 * h)).max(0.0))
}

/// Empirical conditional distribution of the layer-2 distance `x2` of common
/// pairs whose layer-1 distance falls within `ctx.mc_band` of `x1`.
///
/// Draws `(r1, r1', dtheta1)` from the layer-1 marginals, accepts on the
/// distance band, couples the accepted triple to layer 2 and records the
/// exact layer-2 distance. Errors when the band accepts nothing within the
/// attempt budget.
pub fn monte_carlo_conditional_x2(
    x1: f64,
    ctx: &TheoryContext,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<Vec<f64>> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples = 0".into()));
    }
    let p1 = &ctx.params1;
    let p2 = &ctx.params2;
    let n2 = ctx.corr.n_scale;
    let budget = samples.saturating_mul(20_000).max(200_000);
    let mut out = Vec::with_capacity(samples);
    for _ in 0..budget {
        if out.len() == samples {
            break;
        }
        let r1 = p1.sample_radial(rng);
        let r1p = p1.sample_radial(rng);
        let dtheta1 = rng.random::<f64>() * PI;
        let x = hyperbolic_distance_polar(r1, r1p, dtheta1);
        if (x - x1).abs() > ctx.mc_band {
            continue;
        }
        let r2 = conditional_radial_quantile(rng.random::<f64>(), r1, p1, p2, ctx.corr.nu)?;
        let r2p = conditional_radial_quantile(rng.random::<f64>(), r1p, p1, p2, ctx.corr.nu)?;
        let l = sample_angular_offset(&ctx.corr, n2, rng);
        let lp = sample_angular_offset(&ctx.corr, n2, rng);
        let shifted = crate::geom::wrap_angle(dtheta1 + 2.0 * PI * (l - lp) / n2 as f64);
        let dtheta2 = PI - (PI - shifted).abs();
        out.push(hyperbolic_distance_polar(r2, r2p, dtheta2));
    }
    if out.is_empty() {
        return Err(Error::RejectionStarved(format!(
            "no layer-1 pair within {} of x1 = {x1} in {budget} draws",
            ctx.mc_band
        )));
    }
    Ok(out)
}

/// Evaluates [`conditional_hyperbolic_cdf`] on a grid of `x2` values in
/// parallel.
pub fn conditional_cdf_grid(
    xs: &[f64],
    r1: f64,
    r1p: f64,
    dtheta1: f64,
    ctx: &TheoryContext,
) -> Result<Vec<f64>> {
    use rayon::prelude::*;
    xs.par_iter()
        .map(|&x2| conditional_hyperbolic_cdf(x2, r1, r1p, dtheta1, ctx))
        .collect()
}
