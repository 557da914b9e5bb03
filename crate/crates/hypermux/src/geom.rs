//! Hyperbolic-disc primitives.
//!
//! A layer places `N` nodes at polar coordinates `(r, theta)` on a disc of
//! radius `R` and connects pairs with a Fermi-Dirac probability in their
//! hyperbolic distance. [`LayerParams`] holds the target quantities
//! `(N, k_bar, gamma, T)` together with the derived constants
//! `beta = 1/(gamma - 1)`, `c = k_bar * sin(T pi)/(2T) * ((gamma-2)/(gamma-1))^2`
//! and `R = 2 ln(N/c)`.

use crate::error::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Target and derived parameters of a single layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerParams {
    pub n_nodes: usize,
    pub mean_degree: f64,
    pub gamma: f64,
    pub temperature: f64,
    pub beta: f64,
    pub disc_radius: f64,
    pub fermi_constant: f64,
}

/// Derives the full parameter set from the targets `(n, k_bar, gamma, T)`.
///
/// `T = 0` is taken through the limit `sin(T pi)/(2T) -> pi/2`. Inputs with
/// `gamma <= 2`, `T` outside `[0, 1)` or `c >= n` (nonpositive disc radius)
/// are rejected.
pub fn derive_params(n: usize, mean_degree: f64, gamma: f64, temperature: f64) -> Result<LayerParams> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n = {n}, need n >= 2")));
    }
    if !(mean_degree.is_finite() && mean_degree > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "mean degree = {mean_degree}, need a positive real"
        )));
    }
    if !(gamma.is_finite() && gamma > 2.0) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma}, need gamma > 2")));
    }
    if !(temperature.is_finite() && (0.0..1.0).contains(&temperature)) {
        return Err(Error::InvalidParameter(format!(
            "temperature = {temperature}, need T in [0, 1)"
        )));
    }
    let sine_factor = if temperature == 0.0 {
        PI / 2.0
    } else {
        (temperature * PI).sin() / (2.0 * temperature)
    };
    let shape = (gamma - 2.0) / (gamma - 1.0);
    let fermi_constant = mean_degree * sine_factor * shape * shape;
    if fermi_constant >= n as f64 {
        return Err(Error::InvalidParameter(format!(
            "c = {fermi_constant:.4} >= N = {n}: disc radius would be nonpositive"
        )));
    }
    Ok(LayerParams {
        n_nodes: n,
        mean_degree,
        gamma,
        temperature,
        beta: 1.0 / (gamma - 1.0),
        disc_radius: 2.0 * (n as f64 / fermi_constant).ln(),
        fermi_constant,
    })
}

impl LayerParams {
    /// Expected minimum degree `k_bar0 = k_bar (gamma-2)/(gamma-1)`.
    pub fn min_expected_degree(&self) -> f64 {
        self.mean_degree * (self.gamma - 2.0) / (self.gamma - 1.0)
    }

    /// Fermi-Dirac connection probability at hyperbolic distance `x`.
    /// At `T = 0` this is the step function `1 (x <= R), 0 (x > R)`.
    pub fn connection_probability(&self, x: f64) -> f64 {
        if self.temperature == 0.0 {
            return if x <= self.disc_radius { 1.0 } else { 0.0 };
        }
        1.0 / (1.0 + ((x - self.disc_radius) / (2.0 * self.temperature)).exp())
    }

    /// Expected degree of a node at radial coordinate `r`:
    /// `k_bar(r) = k_bar0 e^{(R - r)/2}`.
    pub fn expected_degree_at_radius(&self, r: f64) -> f64 {
        self.min_expected_degree() * (0.5 * (self.disc_radius - r)).exp()
    }

    /// Radial coordinate assigned to an observed degree `k`:
    /// `kappa = max(k_bar0, k - gamma T)`, `r = R - 2 ln(kappa / k_bar0)`,
    /// clamped to `[0, R]`.
    pub fn radius_from_degree(&self, degree: f64) -> f64 {
        let k0 = self.min_expected_degree();
        let kappa = (degree - self.gamma * self.temperature).max(k0);
        (self.disc_radius - 2.0 * (kappa / k0).ln()).clamp(0.0, self.disc_radius)
    }

    /// CDF of the (truncated, renormalized) radial density on `[0, R]`.
    pub fn radial_cdf(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        if r >= self.disc_radius {
            return 1.0;
        }
        let f0 = self.radial_floor();
        let f = ((r - self.disc_radius) / (2.0 * self.beta)).exp();
        (f - f0) / (1.0 - f0)
    }

    /// Quantile of the radial CDF; inverse-transform sampling helper.
    pub fn radial_quantile(&self, u: f64) -> f64 {
        let f0 = self.radial_floor();
        let r = self.disc_radius + 2.0 * self.beta * (f0 + u * (1.0 - f0)).ln();
        r.clamp(0.0, self.disc_radius)
    }

    /// Untruncated CDF mass below `r = 0`, `e^{-R/(2 beta)}`.
    fn radial_floor(&self) -> f64 {
        (-self.disc_radius / (2.0 * self.beta)).exp()
    }

    /// Draws a radial coordinate from the exponential density
    /// `rho(r) = e^{(r - R)/(2 beta)} / (2 beta)` truncated to `[0, R]`.
    pub fn sample_radial(&self, rng: &mut impl Rng) -> f64 {
        self.radial_quantile(rng.random::<f64>())
    }

    /// Mean of the truncated radial density (closed form).
    pub fn radial_mean(&self) -> f64 {
        let f0 = self.radial_floor();
        (self.disc_radius - 2.0 * self.beta * (1.0 - f0)) / (1.0 - f0)
    }
}

/// Wraps an angle to `[0, 2 pi)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t == TAU {
        0.0
    } else {
        t
    }
}

/// Angular distance `pi - |pi - |t1 - t2||`, in `[0, pi]`.
pub fn angular_distance(theta1: f64, theta2: f64) -> f64 {
    let d = (wrap_angle(theta1) - wrap_angle(theta2)).abs();
    PI - (PI - d).abs()
}

/// Exact hyperbolic distance between `(r1, t1)` and `(r2, t2)` (curvature -1).
/// The `arccosh` argument is clamped to 1 to remove round-off NaN paths.
pub fn hyperbolic_distance(r1: f64, theta1: f64, r2: f64, theta2: f64) -> f64 {
    let dt = angular_distance(theta1, theta2);
    hyperbolic_distance_polar(r1, r2, dt)
}

/// Exact distance from radii and angular distance.
pub fn hyperbolic_distance_polar(r1: f64, r2: f64, delta_theta: f64) -> f64 {
    let arg = r1.cosh() * r2.cosh() - r1.sinh() * r2.sinh() * delta_theta.cos();
    arg.max(1.0).acosh()
}

/// Approximate distance `r1 + r2 + 2 ln sin(dt/2)`, valid for large radii and
/// `dt > 2 sqrt(e^{-2 r1} + e^{-2 r2})`.
pub fn approx_distance(r1: f64, r2: f64, delta_theta: f64) -> f64 {
    r1 + r2 + 2.0 * (delta_theta / 2.0).sin().ln()
}

/// Per-node radial and angular coordinates.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NodeCoords {
    pub radial: Vec<f64>,
    pub angular: Vec<f64>,
}

impl NodeCoords {
    /// Builds coordinates, wrapping every angle to `[0, 2 pi)` once.
    pub fn new(radial: Vec<f64>, angular: Vec<f64>) -> Result<Self> {
        if radial.len() != angular.len() {
            return Err(Error::InvalidParameter(format!(
                "coordinate arrays differ in length: {} vs {}",
                radial.len(),
                angular.len()
            )));
        }
        if let Some(r) = radial.iter().find(|r| !r.is_finite() || **r < 0.0) {
            return Err(Error::InvalidParameter(format!("bad radial coordinate {r}")));
        }
        let angular = angular.into_iter().map(wrap_angle).collect();
        Ok(Self { radial, angular })
    }

    pub fn len(&self) -> usize {
        self.radial.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radial.is_empty()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        hyperbolic_distance(self.radial[i], self.angular[i], self.radial[j], self.angular[j])
    }
}

/// Precomputed hyperbolic/circular functions of every node's coordinates;
/// makes all-pairs distance scans cheap.
pub struct TrigCache {
    pub cosh_r: Vec<f64>,
    pub sinh_r: Vec<f64>,
    pub cos_t: Vec<f64>,
    pub sin_t: Vec<f64>,
}

impl TrigCache {
    pub fn new(coords: &NodeCoords) -> Self {
        Self {
            cosh_r: coords.radial.iter().map(|r| r.cosh()).collect(),
            sinh_r: coords.radial.iter().map(|r| r.sinh()).collect(),
            cos_t: coords.angular.iter().map(|t| t.cos()).collect(),
            sin_t: coords.angular.iter().map(|t| t.sin()).collect(),
        }
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let cos_dt = self.cos_t[i] * self.cos_t[j] + self.sin_t[i] * self.sin_t[j];
        let arg = self.cosh_r[i] * self.cosh_r[j] - self.sinh_r[i] * self.sinh_r[j] * cos_dt;
        arg.max(1.0).acosh()
    }
}
