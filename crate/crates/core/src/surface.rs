//! Star-shaped hypersurfaces written as radial graphs `r = R(θ)` over `S^n`.
//!
//! Profiles are axially symmetric: `R` depends on the polar angle only, so
//! integrals over `S^n` reduce to `ω_{n-1} ∫_0^π (…) sin^{n-1}θ dθ` for
//! `n >= 2`. For `n = 1` the graph is a closed curve over `[0, 2π)`.
//!
//! On a radial graph the support function and area element are
//!
//! ```text
//! u  = λ² / sqrt(λ² + |DR|²)
//! dμ = λ^{n-1} sqrt(λ² + |DR|²) dσ
//! ```
//!
//! with `|DR| = |R'(θ)|` for axially symmetric profiles.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::density::Density;
use crate::error::{Error, Result};
use crate::manifold::{sphere_area, WarpedManifold};
use crate::quadrature::{
    integrate_1d, integrate_nested, mc_estimate, McOracle, McRegion, QuadratureRule,
};

/// Profiles must stay this far inside `r_max`.
pub const OUTER_MARGIN: f64 = 1e-6;

const VALIDATION_GRID: usize = 2049;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Generator {
    CenteredBall {
        r0: f64,
    },
    /// Hyperbolic geodesic ball of radius `radius` whose center sits at
    /// distance `offset` from the origin along the axis `θ = 0`.
    OffCenterBall {
        radius: f64,
        offset: f64,
    },
    /// `R(θ) = r0 (1 + Σ_k eps[k-1] cos kθ)`.
    Perturbed {
        r0: f64,
        eps: Vec<f64>,
    },
    Slice {
        r0: f64,
    },
}

impl Generator {
    /// `R` is constant (a centered ball or a coordinate slice).
    pub fn is_radially_constant(&self) -> bool {
        match self {
            Generator::CenteredBall { .. } | Generator::Slice { .. } => true,
            Generator::OffCenterBall { offset, .. } => *offset == 0.0,
            Generator::Perturbed { eps, .. } => eps.iter().all(|&e| e == 0.0),
        }
    }

    /// Replaces one named parameter: `r0`, `rho0` (converted through `λ⁻¹`),
    /// `radius`, `offset` or `eps<k>`.
    pub fn with_param(
        &self,
        name: &str,
        value: f64,
        manifold: &WarpedManifold,
    ) -> Result<Generator> {
        let mut g = self.clone();
        let unknown =
            || Error::InvalidGenerator(format!("parameter `{name}` does not apply to {self:?}"));
        match (&mut g, name) {
            (
                Generator::CenteredBall { r0 }
                | Generator::Slice { r0 }
                | Generator::Perturbed { r0, .. },
                "r0",
            ) => *r0 = value,
            (
                Generator::CenteredBall { r0 }
                | Generator::Slice { r0 }
                | Generator::Perturbed { r0, .. },
                "rho0",
            ) => *r0 = manifold.rho_to_r(value)?,
            (Generator::OffCenterBall { radius, .. }, "radius") => *radius = value,
            (Generator::OffCenterBall { offset, .. }, "offset") => *offset = value,
            (Generator::Perturbed { eps, .. }, other) if other.starts_with("eps") => {
                let k: usize = other[3..].parse().map_err(|_| unknown())?;
                if k == 0 {
                    return Err(unknown());
                }
                if eps.len() < k {
                    eps.resize(k, 0.0);
                }
                eps[k - 1] = value;
            }
            _ => return Err(unknown()),
        }
        Ok(g)
    }
}

/// An axially symmetric radial graph over `S^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    generator: Generator,
    n: usize,
}

/// Builds and validates a profile; `a <= R(θ) <= r_max - 1e-6` is checked on
/// a dense grid.
pub fn make_profile(generator: &Generator, manifold: &WarpedManifold) -> Result<RadialProfile> {
    match generator {
        Generator::OffCenterBall { radius, offset } => {
            if !manifold.is_hyperbolic() {
                return Err(Error::InvalidGenerator(
                    "off-center balls are only available in hyperbolic space".into(),
                ));
            }
            if !(*offset >= 0.0 && radius > offset) {
                return Err(Error::InvalidGenerator(format!(
                    "off-center ball needs 0 <= offset < radius (root not bracketed), got radius {radius}, offset {offset}"
                )));
            }
        }
        Generator::CenteredBall { r0 }
        | Generator::Slice { r0 }
        | Generator::Perturbed { r0, .. } => {
            if !r0.is_finite() {
                return Err(Error::InvalidGenerator(format!("r0 = {r0}")));
            }
        }
    }
    let profile = RadialProfile {
        generator: generator.clone(),
        n: manifold.n(),
    };
    let (lo, hi) = profile.theta_range();
    let upper = manifold.r_max() - OUTER_MARGIN;
    for i in 0..VALIDATION_GRID {
        let theta = lo + (hi - lo) * i as f64 / (VALIDATION_GRID - 1) as f64;
        let r = profile.radius(theta);
        let dr = profile.radius_prime(theta);
        if !(r.is_finite() && dr.is_finite()) || r < manifold.a() || r > upper {
            return Err(Error::InvalidGenerator(format!(
                "R({theta}) = {r} outside [{}, {upper}]",
                manifold.a()
            )));
        }
        if manifold.warp(r).0 <= 0.0 {
            return Err(Error::InvalidGenerator(format!(
                "R({theta}) = {r} touches the origin; the graph must enclose it"
            )));
        }
    }
    Ok(profile)
}

impl RadialProfile {
    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Polar-angle range the sphere integrals run over.
    pub fn theta_range(&self) -> (f64, f64) {
        theta_range(self.n)
    }

    pub fn is_radially_constant(&self) -> bool {
        self.generator.is_radially_constant()
    }

    /// `R(θ)`.
    pub fn radius(&self, theta: f64) -> f64 {
        match &self.generator {
            Generator::CenteredBall { r0 } | Generator::Slice { r0 } => *r0,
            Generator::Perturbed { r0, eps } => {
                let s: f64 = eps
                    .iter()
                    .enumerate()
                    .map(|(i, e)| e * ((i + 1) as f64 * theta).cos())
                    .sum();
                r0 * (1.0 + s)
            }
            Generator::OffCenterBall { radius, offset } => {
                off_center_radius(*radius, *offset, theta)
            }
        }
    }

    /// `R'(θ)`.
    pub fn radius_prime(&self, theta: f64) -> f64 {
        match &self.generator {
            Generator::CenteredBall { .. } | Generator::Slice { .. } => 0.0,
            Generator::Perturbed { r0, eps } => {
                let s: f64 = eps
                    .iter()
                    .enumerate()
                    .map(|(i, e)| {
                        let k = (i + 1) as f64;
                        -k * e * (k * theta).sin()
                    })
                    .sum();
                r0 * s
            }
            Generator::OffCenterBall { radius, offset } => {
                if *offset == 0.0 {
                    return 0.0;
                }
                let r = off_center_radius(*radius, *offset, theta);
                let (d, c) = (*offset, theta.cos());
                // implicit differentiation of cosh R cosh d - sinh R sinh d cos θ = cosh radius
                let g_r = r.sinh() * d.cosh() - r.cosh() * d.sinh() * c;
                let g_theta = r.sinh() * d.sinh() * theta.sin();
                -g_theta / g_r
            }
        }
    }
}

pub(crate) fn theta_range(n: usize) -> (f64, f64) {
    if n == 1 {
        (0.0, 2.0 * PI)
    } else {
        (0.0, PI)
    }
}

/// Distance from the origin to a hyperbolic sphere of radius `radius`
/// centered at distance `offset` along `θ = 0`, found by bisection on the
/// hyperbolic law of cosines.
fn off_center_radius(radius: f64, offset: f64, theta: f64) -> f64 {
    if offset == 0.0 {
        return radius;
    }
    let (ch_d, sh_d, c) = (offset.cosh(), offset.sinh(), theta.cos());
    let target = radius.cosh();
    let g = |r: f64| r.cosh() * ch_d - r.sinh() * sh_d * c - target;
    let (mut lo, mut hi) = (0.0, radius + offset);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `∫_{S^n} f dσ` for an axially symmetric `f(θ)`.
pub fn sphere_integral<F>(n: usize, rule: &QuadratureRule, f: F) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (lo, hi) = theta_range(n);
    if n == 1 {
        integrate_1d(f, lo, hi, rule)
    } else {
        let w = sphere_area(n - 1);
        let p = (n - 1) as i32;
        integrate_1d(|t| w * t.sin().powi(p) * f(t), lo, hi, rule)
    }
}

/// Weight of `dσ` in the polar angle: `ω_{n-1} sin^{n-1}θ` (1 for `n = 1`).
pub(crate) fn sphere_weight(n: usize, theta: f64) -> f64 {
    if n == 1 {
        1.0
    } else {
        sphere_area(n - 1) * theta.sin().powi((n - 1) as i32)
    }
}

/// Geometry of `Σ` above one polar angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub theta: f64,
    pub r: f64,
    pub dr: f64,
    pub lambda: f64,
    pub lambda_prime: f64,
    /// Support function `⟨λ ∂_r, ν⟩`.
    pub u: f64,
}

impl BoundaryPoint {
    pub(crate) fn at(profile: &RadialProfile, manifold: &WarpedManifold, theta: f64) -> Self {
        let r = profile.radius(theta);
        let dr = profile.radius_prime(theta);
        let (lambda, lambda_prime) = manifold.warp(r);
        let u = lambda * lambda / lambda.hypot(dr);
        Self {
            theta,
            r,
            dr,
            lambda,
            lambda_prime,
            u,
        }
    }

    /// `dμ / dσ = λ^{n-1} sqrt(λ² + R'²)`.
    pub fn area_factor(&self, n: usize) -> f64 {
        self.lambda.powi(n as i32 - 1) * self.lambda.hypot(self.dr)
    }
}

/// `u(θ) = λ(R)² / sqrt(λ(R)² + R'(θ)²)`.
pub fn support_function(
    profile: &RadialProfile,
    manifold: &WarpedManifold,
    theta: f64,
) -> Result<f64> {
    let (lo, hi) = profile.theta_range();
    if !(theta >= lo && theta <= hi) {
        return Err(crate::error::domain("theta", theta, lo, hi));
    }
    Ok(BoundaryPoint::at(profile, manifold, theta).u)
}

/// `∫_Σ g dμ`.
pub fn boundary_integral<G>(
    profile: &RadialProfile,
    manifold: &WarpedManifold,
    rule: &QuadratureRule,
    g: G,
) -> Result<f64>
where
    G: Fn(&BoundaryPoint) -> f64,
{
    let n = manifold.n();
    sphere_integral(n, rule, |theta| {
        let bp = BoundaryPoint::at(profile, manifold, theta);
        g(&bp) * bp.area_factor(n)
    })
}

/// `∫_Ω h(r, λ, λ') dv` with `dv = λ^n dr dσ`, `Ω` between `{a} × S^n` and `Σ`.
pub fn domain_integral<H>(
    profile: &RadialProfile,
    manifold: &WarpedManifold,
    rule: &QuadratureRule,
    h: H,
) -> Result<f64>
where
    H: Fn(f64, f64, f64) -> f64,
{
    let n = manifold.n();
    let a = manifold.a();
    integrate_nested(
        |theta, r| {
            let (l, lp) = manifold.warp(r);
            sphere_weight(n, theta) * h(r, l, lp) * l.powi(n as i32)
        },
        profile.theta_range(),
        |theta| (a, profile.radius(theta)),
        rule,
    )
}

/// `∫_Σ φ(λ) λ' dμ`.
pub fn weighted_area(
    profile: &RadialProfile,
    manifold: &WarpedManifold,
    density: &Density,
    rule: &QuadratureRule,
) -> Result<f64> {
    boundary_integral(profile, manifold, rule, |bp| {
        density.phi(bp.lambda) * bp.lambda_prime
    })
}

/// `∫_Ω φ(λ) λ' dv`.
pub fn weighted_volume(
    profile: &RadialProfile,
    manifold: &WarpedManifold,
    density: &Density,
    rule: &QuadratureRule,
) -> Result<f64> {
    domain_integral(profile, manifold, rule, |_, l, lp| density.phi(l) * lp)
}

/// `Vol(Ω)`.
pub fn unweighted_volume(
    profile: &RadialProfile,
    manifold: &WarpedManifold,
    rule: &QuadratureRule,
) -> Result<f64> {
    domain_integral(profile, manifold, rule, |_, _, _| 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMeasures {
    pub weighted_area: f64,
    pub weighted_volume: f64,
    pub unweighted_volume: f64,
}

pub fn measures(
    profile: &RadialProfile,
    manifold: &WarpedManifold,
    density: &Density,
    rule: &QuadratureRule,
) -> Result<SurfaceMeasures> {
    Ok(SurfaceMeasures {
        weighted_area: weighted_area(profile, manifold, density, rule)?,
        weighted_volume: weighted_volume(profile, manifold, density, rule)?,
        unweighted_volume: unweighted_volume(profile, manifold, rule)?,
    })
}

/// Monte Carlo estimate of [`weighted_area`] (uniform samples in `θ`).
pub fn weighted_area_mc(
    profile: &RadialProfile,
    manifold: &WarpedManifold,
    density: &Density,
    oracle: McOracle,
) -> Result<(f64, f64)> {
    let n = manifold.n();
    let (lo, hi) = profile.theta_range();
    mc_estimate(
        |x| {
            let bp = BoundaryPoint::at(profile, manifold, x[0]);
            sphere_weight(n, x[0]) * density.phi(bp.lambda) * bp.lambda_prime * bp.area_factor(n)
        },
        &McRegion::Box(vec![(lo, hi)]),
        oracle,
    )
}

/// Monte Carlo estimate of [`weighted_volume`] by rejection sampling of the
/// region under the graph in `(θ, r)`.
pub fn weighted_volume_mc(
    profile: &RadialProfile,
    manifold: &WarpedManifold,
    density: &Density,
    oracle: McOracle,
) -> Result<(f64, f64)> {
    let n = manifold.n();
    let (lo, hi) = profile.theta_range();
    let r_top = (0..=4096)
        .map(|i| profile.radius(lo + (hi - lo) * i as f64 / 4096.0))
        .fold(manifold.a(), f64::max);
    let radius = |t: f64| profile.radius(t);
    mc_estimate(
        |x| {
            let (l, lp) = manifold.warp(x[1]);
            sphere_weight(n, x[0]) * density.phi(l) * lp * l.powi(n as i32)
        },
        &McRegion::RadialGraph {
            outer: (lo, hi),
            inner_lo: manifold.a(),
            inner_hi: &radius,
            inner_max: r_top * (1.0 + 1e-3),
        },
        oracle,
    )
}
