//! Warped products `[a, b] × S^n` with metric `dr² + λ(r)² g_{S^n}`.
//!
//! Besides the warp function itself the rest of the crate works with the
//! reparametrization by `ρ = λ(r)`:
//!
//! ```text
//! Ψ(ρ) = λ'(λ⁻¹(ρ))        Λ(ρ) = sqrt(Ψ(ρ)² - 1) / ρ
//! ```
//!
//! Hyperbolic space has `λ = sinh`, so `Ψ(ρ) = sqrt(1 + ρ²)` and `Λ ≡ 1`;
//! Euclidean space has `Ψ ≡ 1`, `Λ ≡ 0`. For the anti-de Sitter-Schwarzschild
//! family `λ` has no closed form; it is tabulated once at construction by
//! integrating `dr = dρ / Ψ(ρ)` outward from the inner slice.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate_1d, QuadratureRule};

/// Area of the unit sphere `S^k`.
pub fn sphere_area(k: usize) -> f64 {
    // ω_0 = 2, ω_1 = 2π, ω_k = 2π ω_{k-2} / (k - 1)
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (k as f64 - 1.0) * sphere_area(k - 2),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ManifoldKind {
    Hyperbolic,
    Euclidean,
    AdsSchwarzschild { mass: f64 },
}

/// Relative slack for a `ρ` that lands just below `λ(a)` by rounding.
const HORIZON_SLACK: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct WarpedManifold {
    n: usize,
    kind: ManifoldKind,
    a: f64,
    r_max: f64,
    omega_n: f64,
    chart: Option<RadialChart>,
}

/// Tabulated `r(ρ) = ∫_{λ(a)}^ρ ds / Ψ(s)` on short segments.
#[derive(Debug, Clone)]
struct RadialChart {
    rho: Vec<f64>,
    r: Vec<f64>,
    rule: QuadratureRule,
    lambda_max: f64,
}

impl WarpedManifold {
    pub fn new(kind: ManifoldKind, n: usize, r_max: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config(
                "sphere dimension n must be at least 1".into(),
            ));
        }
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(Error::Config(format!(
                "r_max must be positive and finite, got {r_max}"
            )));
        }
        if let ManifoldKind::AdsSchwarzschild { mass } = kind {
            if !(mass >= 0.0) || !mass.is_finite() {
                return Err(Error::Config(format!(
                    "mass must be non-negative, got {mass}"
                )));
            }
        }
        let mut m = Self {
            n,
            kind,
            a: 0.0,
            r_max,
            omega_n: sphere_area(n),
            chart: None,
        };
        if matches!(kind, ManifoldKind::AdsSchwarzschild { .. }) {
            m.chart = Some(m.build_chart()?);
        }
        Ok(m)
    }

    pub fn hyperbolic(n: usize, r_max: f64) -> Result<Self> {
        Self::new(ManifoldKind::Hyperbolic, n, r_max)
    }

    pub fn euclidean(n: usize, r_max: f64) -> Result<Self> {
        Self::new(ManifoldKind::Euclidean, n, r_max)
    }

    pub fn ads_schwarzschild(n: usize, mass: f64, r_max: f64) -> Result<Self> {
        Self::new(ManifoldKind::AdsSchwarzschild { mass }, n, r_max)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> ManifoldKind {
        self.kind
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Area of the unit `S^n`.
    pub fn omega_n(&self) -> f64 {
        self.omega_n
    }

    pub fn mass(&self) -> f64 {
        match self.kind {
            ManifoldKind::AdsSchwarzschild { mass } => mass,
            _ => 0.0,
        }
    }

    pub fn is_hyperbolic(&self) -> bool {
        matches!(self.kind, ManifoldKind::Hyperbolic)
    }

    /// `λ(a)`; the horizon radius `m^{1/(n+1)}` for anti-de Sitter-Schwarzschild.
    pub fn lambda_at_a(&self) -> f64 {
        match self.kind {
            ManifoldKind::AdsSchwarzschild { mass } => mass.powf(1.0 / (self.n as f64 + 1.0)),
            _ => 0.0,
        }
    }

    /// `λ(r_max)`.
    pub fn lambda_max(&self) -> f64 {
        match (&self.kind, &self.chart) {
            (ManifoldKind::Hyperbolic, _) => self.r_max.sinh(),
            (ManifoldKind::Euclidean, _) => self.r_max,
            (_, Some(chart)) => chart.lambda_max,
            _ => unreachable!("chart is built for anti-de Sitter-Schwarzschild"),
        }
    }

    /// `(λ(r), λ'(r))` for `a <= r <= r_max`.
    pub fn warp_eval(&self, r: f64) -> Result<(f64, f64)> {
        if !(r >= self.a && r <= self.r_max) {
            return Err(domain("r", r, self.a, self.r_max));
        }
        Ok(self.warp(r))
    }

    /// Unchecked [`warp_eval`](Self::warp_eval).
    pub(crate) fn warp(&self, r: f64) -> (f64, f64) {
        match self.kind {
            ManifoldKind::Hyperbolic => (r.sinh(), r.cosh()),
            ManifoldKind::Euclidean => (r, 1.0),
            ManifoldKind::AdsSchwarzschild { .. } => {
                let rho = self.chart().rho_of_r(r, |s| self.psi_raw(s));
                (rho, self.psi_raw(rho))
            }
        }
    }

    /// `Ψ(ρ) = λ'(λ⁻¹(ρ))`.
    pub fn psi(&self, rho: f64) -> Result<f64> {
        let rho = self.check_rho(rho)?;
        Ok(self.psi_raw(rho))
    }

    pub(crate) fn psi_raw(&self, rho: f64) -> f64 {
        match self.kind {
            ManifoldKind::Hyperbolic => rho.hypot(1.0),
            ManifoldKind::Euclidean => 1.0,
            ManifoldKind::AdsSchwarzschild { mass } => {
                if mass == 0.0 {
                    return rho.hypot(1.0);
                }
                let rho = rho.max(self.lambda_at_a());
                (1.0 + rho * rho - mass * rho.powi(1 - self.n as i32))
                    .max(1.0)
                    .sqrt()
            }
        }
    }

    /// `Λ(ρ) = sqrt(Ψ(ρ)² - 1) / ρ`.
    pub fn lambda_big(&self, rho: f64) -> Result<f64> {
        let rho = self.check_rho(rho)?;
        if rho <= 0.0 {
            return Err(domain("rho", rho, f64::MIN_POSITIVE, f64::INFINITY));
        }
        Ok(self.lambda_big_raw(rho))
    }

    pub(crate) fn lambda_big_raw(&self, rho: f64) -> f64 {
        match self.kind {
            ManifoldKind::Hyperbolic => 1.0,
            ManifoldKind::Euclidean => 0.0,
            ManifoldKind::AdsSchwarzschild { mass } => {
                if mass == 0.0 {
                    return 1.0;
                }
                // 1 - m ρ^{-(n+1)}, kept accurate near the horizon
                let x = mass.ln() - (self.n as f64 + 1.0) * rho.ln();
                (-x.exp_m1()).max(0.0).sqrt()
            }
        }
    }

    /// `Λ'(ρ)` in closed form; infinite at an anti-de Sitter-Schwarzschild horizon.
    pub fn lambda_big_prime(&self, rho: f64) -> Result<f64> {
        let rho = self.check_rho(rho)?;
        Ok(match self.kind {
            ManifoldKind::Hyperbolic | ManifoldKind::Euclidean => 0.0,
            ManifoldKind::AdsSchwarzschild { mass } => {
                if mass == 0.0 {
                    0.0
                } else {
                    let n = self.n as f64;
                    mass * (n + 1.0)
                        / (2.0 * rho.powi(self.n as i32 + 2) * self.lambda_big_raw(rho))
                }
            }
        })
    }

    /// Inverse of `λ`: the radial coordinate with `λ(r) = ρ`.
    pub fn rho_to_r(&self, rho: f64) -> Result<f64> {
        let hi = self.lambda_max();
        let rho = self.check_rho(rho)?;
        if rho > hi * (1.0 + 1e-14) {
            return Err(domain("rho", rho, self.lambda_at_a(), hi));
        }
        Ok(match self.kind {
            ManifoldKind::Hyperbolic => rho.asinh(),
            ManifoldKind::Euclidean => rho,
            ManifoldKind::AdsSchwarzschild { .. } => {
                self.chart().r_of_rho(rho, |s| self.psi_raw(s))
            }
        })
    }

    fn check_rho(&self, rho: f64) -> Result<f64> {
        let lo = self.lambda_at_a();
        if rho >= lo {
            return Ok(rho);
        }
        if rho >= lo * (1.0 - HORIZON_SLACK) {
            return Ok(lo);
        }
        Err(domain("rho", rho, lo, f64::INFINITY))
    }

    fn chart(&self) -> &RadialChart {
        self.chart.as_ref().expect("radial chart present")
    }

    fn build_chart(&self) -> Result<RadialChart> {
        let rule = QuadratureRule::gauss(16, 1)?;
        let start = self.lambda_at_a();
        let mut rho = vec![start];
        let mut r = vec![self.a];
        while *r.last().unwrap() < self.r_max {
            let lo = *rho.last().unwrap();
            let hi = lo + 0.05 * lo.max(1.0);
            let seg = integrate_1d(|s| 1.0 / self.psi_raw(s), lo, hi, &rule)?;
            rho.push(hi);
            r.push(r.last().unwrap() + seg);
            if rho.len() > 1_000_000 {
                return Err(Error::Config(format!(
                    "r_max = {} too large to tabulate",
                    self.r_max
                )));
            }
        }
        let mut chart = RadialChart {
            rho,
            r,
            rule,
            lambda_max: 0.0,
        };
        chart.lambda_max = chart.rho_of_r(self.r_max, |s| self.psi_raw(s));
        Ok(chart)
    }
}

impl RadialChart {
    fn segment(&self, k: usize, rho: f64, psi: &impl Fn(f64) -> f64) -> f64 {
        let lo = self.rho[k];
        if rho <= lo {
            return self.r[k];
        }
        let tail = integrate_1d(|s| 1.0 / psi(s), lo, rho, &self.rule).unwrap_or(f64::NAN);
        self.r[k] + tail
    }

    fn r_of_rho(&self, rho: f64, psi: impl Fn(f64) -> f64) -> f64 {
        let k = self.rho.partition_point(|&x| x <= rho).saturating_sub(1);
        let k = k.min(self.rho.len() - 2);
        self.segment(k, rho, &psi)
    }

    /// Newton on `r(ρ) - r` with a bisection safeguard inside one segment.
    fn rho_of_r(&self, r: f64, psi: impl Fn(f64) -> f64) -> f64 {
        let k = self.r.partition_point(|&x| x <= r).saturating_sub(1);
        let k = k.min(self.r.len() - 2);
        let (mut lo, mut hi) = (self.rho[k], self.rho[k + 1]);
        let (r0, r1) = (self.r[k], self.r[k + 1]);
        if r <= r0 {
            return lo;
        }
        let mut rho = lo + (hi - lo) * ((r - r0) / (r1 - r0)).clamp(0.0, 1.0);
        for _ in 0..60 {
            let g = self.segment(k, rho, &psi) - r;
            if g > 0.0 {
                hi = rho;
            } else {
                lo = rho;
            }
            let mut next = rho - g * psi(rho);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - rho).abs() <= 1e-16 * rho.abs().max(1.0) {
                return next;
            }
            rho = next;
        }
        rho
    }
}
