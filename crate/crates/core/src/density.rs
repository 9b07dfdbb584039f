//! Even, positive radial weights `φ` with analytic derivatives.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Built-in density families. Each is even in `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DensityKind {
    /// `φ ≡ 1`
    Constant,
    /// `φ = e^{c t²}`
    ExpQuadratic { c: f64 },
    /// `φ = cosh(c t)`
    CoshLinear { c: f64 },
    /// `φ = (1 + t²)^p`; log-convex only on `|t| <= 1` when `p > 0`.
    PowerQuadratic { p: f64 },
    /// Pointwise product of the factors.
    Product(Vec<DensityKind>),
}

impl DensityKind {
    fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| {
            Err(Error::InvalidDensity(format!(
                "{what} must be finite and >= 0, got {v}"
            )))
        };
        match *self {
            DensityKind::Constant => Ok(()),
            DensityKind::ExpQuadratic { c } | DensityKind::CoshLinear { c } => {
                if c >= 0.0 && c.is_finite() {
                    Ok(())
                } else {
                    bad("c", c)
                }
            }
            DensityKind::PowerQuadratic { p } => {
                if p >= 0.0 && p.is_finite() {
                    Ok(())
                } else {
                    bad("p", p)
                }
            }
            DensityKind::Product(ref fs) => fs.iter().try_for_each(DensityKind::validate),
        }
    }

    /// `(φ, φ')`, product rule for products.
    fn eval(&self, t: f64) -> (f64, f64) {
        match *self {
            DensityKind::Constant => (1.0, 0.0),
            DensityKind::ExpQuadratic { c } => {
                let e = (c * t * t).exp();
                (e, 2.0 * c * t * e)
            }
            DensityKind::CoshLinear { c } => ((c * t).cosh(), c * (c * t).sinh()),
            DensityKind::PowerQuadratic { p } => {
                let q = 1.0 + t * t;
                (q.powf(p), 2.0 * p * t * q.powf(p - 1.0))
            }
            DensityKind::Product(ref fs) => fs.iter().fold((1.0, 0.0), |(f, df), k| {
                let (g, dg) = k.eval(t);
                (f * g, df * g + f * dg)
            }),
        }
    }

    /// `((log φ)', (log φ)'')`.
    fn log_derivatives(&self, t: f64) -> (f64, f64) {
        match *self {
            DensityKind::Constant => (0.0, 0.0),
            DensityKind::ExpQuadratic { c } => (2.0 * c * t, 2.0 * c),
            DensityKind::CoshLinear { c } => {
                let th = (c * t).tanh();
                (c * th, c * c * (1.0 - th * th))
            }
            DensityKind::PowerQuadratic { p } => {
                let q = 1.0 + t * t;
                (2.0 * p * t / q, 2.0 * p * (1.0 - t * t) / (q * q))
            }
            DensityKind::Product(ref fs) => fs.iter().fold((0.0, 0.0), |(a, b), k| {
                let (x, y) = k.log_derivatives(t);
                (a + x, b + y)
            }),
        }
    }

    fn is_constant(&self) -> bool {
        match *self {
            DensityKind::Constant => true,
            DensityKind::ExpQuadratic { c } | DensityKind::CoshLinear { c } => c == 0.0,
            DensityKind::PowerQuadratic { p } => p == 0.0,
            DensityKind::Product(ref fs) => fs.iter().all(DensityKind::is_constant),
        }
    }
}

/// A weight `φ = scale · base(t)` valid on `[-T, T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Density {
    kind: DensityKind,
    scale: f64,
    support: f64,
}

/// Result of sampling log-convexity on `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogConvexityCertificate {
    pub support: f64,
    /// Minimum of `(log φ)''` over the grid.
    pub min_log_second: f64,
    /// Minimum of `(φ' t / φ)' = (log φ)'' t + (log φ)'` over the grid.
    pub min_monotone: f64,
    pub valid: bool,
}

pub const CERTIFICATE_GRID: usize = 1000;
pub const CERTIFICATE_TOL: f64 = 1e-12;

impl Density {
    pub fn new(kind: DensityKind, support: f64) -> Result<Self> {
        kind.validate()?;
        if !(support > 0.0) {
            return Err(Error::InvalidDensity(format!(
                "support must be positive, got {support}"
            )));
        }
        Ok(Self {
            kind,
            scale: 1.0,
            support,
        })
    }

    pub fn constant(support: f64) -> Result<Self> {
        Self::new(DensityKind::Constant, support)
    }

    /// Multiplies `φ` by a positive constant.
    pub fn scaled(mut self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidDensity(format!(
                "scale must be positive, got {factor}"
            )));
        }
        self.scale *= factor;
        Ok(self)
    }

    /// Same family on a different support.
    pub fn with_support(mut self, support: f64) -> Result<Self> {
        if !(support > 0.0) {
            return Err(Error::InvalidDensity(format!(
                "support must be positive, got {support}"
            )));
        }
        self.support = support;
        Ok(self)
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn is_constant(&self) -> bool {
        self.kind.is_constant()
    }

    /// `(φ(t), φ'(t))` for `|t| <= T`.
    pub fn density_eval(&self, t: f64) -> Result<(f64, f64)> {
        if t.abs() > self.support {
            return Err(domain("t", t, -self.support, self.support));
        }
        let (f, df) = self.eval(t);
        if !(f > 0.0 && f.is_finite()) {
            return Err(Error::InvalidDensity(format!("phi({t}) = {f}")));
        }
        Ok((f, df))
    }

    pub fn phi(&self, t: f64) -> f64 {
        self.scale * self.kind.eval(t).0
    }

    pub fn phi_prime(&self, t: f64) -> f64 {
        self.scale * self.kind.eval(t).1
    }

    pub(crate) fn eval(&self, t: f64) -> (f64, f64) {
        let (f, df) = self.kind.eval(t);
        (self.scale * f, self.scale * df)
    }

    /// `((log φ)'(t), (log φ)''(t))`.
    pub fn log_derivatives(&self, t: f64) -> (f64, f64) {
        self.kind.log_derivatives(t)
    }

    /// Samples `(log φ)''` and `(φ't/φ)'` on a uniform 1,000-point grid over
    /// `[0, T]`; both minima must be `>= -1e-12`.
    pub fn logconvexity_check(&self, support: f64) -> Result<LogConvexityCertificate> {
        if !(support > 0.0) {
            return Err(Error::InvalidDensity(format!(
                "support must be positive, got {support}"
            )));
        }
        let mut min_log_second = f64::INFINITY;
        let mut min_monotone = f64::INFINITY;
        for i in 0..CERTIFICATE_GRID {
            let t = support * i as f64 / (CERTIFICATE_GRID - 1) as f64;
            let f = self.phi(t);
            if !(f > 0.0 && f.is_finite()) {
                return Err(Error::InvalidDensity(format!("phi({t}) = {f}")));
            }
            let (l1, l2) = self.log_derivatives(t);
            min_log_second = min_log_second.min(l2);
            min_monotone = min_monotone.min(l2 * t + l1);
        }
        Ok(LogConvexityCertificate {
            support,
            min_log_second,
            min_monotone,
            valid: min_log_second >= -CERTIFICATE_TOL && min_monotone >= -CERTIFICATE_TOL,
        })
    }
}
