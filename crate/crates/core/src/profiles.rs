//! Isoperimetric profile functions.
//!
//! Every profile is defined implicitly by matching a cumulative measure of a
//! centered ball to a boundary quantity of the same ball:
//!
//! ```text
//! G_kind(F⁻¹(v)),   F(t) = ω_n ∫_{t0}^t f(s) ds
//! ```
//!
//! `F` and `G` are tabulated on a Chebyshev grid; values between grid points
//! are obtained by integrating from the nearest node with a 16-point rule, and
//! `F⁻¹` is found by bisection inside the bracketing table segment.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::density::Density;
use crate::error::{domain, Error, Result};
use crate::manifold::{sphere_area, WarpedManifold};
use crate::quadrature::{integrate_1d, QuadratureRule};

/// Number of table nodes.
pub const TABLE_POINTS: usize = 2049;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProfileKind {
    /// `ψ`: `ω_n φ(t) t^n sqrt(t² + 1)`.
    Psi,
    /// `ξ`: `ω_n φ(t) t^n`.
    Xi,
    /// `ξ̃`: as `ξ`, measures counted from `λ(a)`.
    XiTilde,
    /// `η`: `ω_n ∫_0^t φ'(s) s^{n+1} ds`.
    Eta,
    /// `η̃`: `ω_n φ(t) Λ(t) t^{n+1}`, measures counted from `λ(a)`.
    EtaTilde,
    /// `η̂`: `ω_n ∫_{λ(a)}^t Λ(s) s^n ds` against unweighted measures.
    EtaHat,
    /// `ψ̃`: `ω_n φ(t) t^n Ψ(t)`, measures counted from `λ(a)`.
    PsiTilde,
    /// `h₀`: `ω_n cosh r sinh^n r` against `f₀(r) = ω_n ∫_0^r sinh^n`.
    H0,
    /// `f₀` itself; its table maps `f₀(r)` back to `r`.
    F0,
    /// `h̃₀`: `ω_n e^{-r} sinh^n r` against `f̃₀ = f₀`.
    H0Tilde,
    /// `f̃₀`; identical to [`ProfileKind::F0`].
    F0Tilde,
}

impl ProfileKind {
    pub const ALL: [ProfileKind; 11] = [
        ProfileKind::Psi,
        ProfileKind::Xi,
        ProfileKind::XiTilde,
        ProfileKind::Eta,
        ProfileKind::EtaTilde,
        ProfileKind::EtaHat,
        ProfileKind::PsiTilde,
        ProfileKind::H0,
        ProfileKind::F0,
        ProfileKind::H0Tilde,
        ProfileKind::F0Tilde,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProfileKind::Psi => "Psi",
            ProfileKind::Xi => "Xi",
            ProfileKind::XiTilde => "XiTilde",
            ProfileKind::Eta => "Eta",
            ProfileKind::EtaTilde => "EtaTilde",
            ProfileKind::EtaHat => "EtaHat",
            ProfileKind::PsiTilde => "PsiTilde",
            ProfileKind::H0 => "H0",
            ProfileKind::F0 => "F0",
            ProfileKind::H0Tilde => "H0Tilde",
            ProfileKind::F0Tilde => "F0Tilde",
        }
    }

    /// The variable is the hyperbolic radius rather than `ρ = λ(r)`.
    pub fn is_radial(self) -> bool {
        matches!(
            self,
            ProfileKind::H0 | ProfileKind::F0 | ProfileKind::H0Tilde | ProfileKind::F0Tilde
        )
    }

    /// Measures start at `λ(a)` instead of the origin.
    fn counts_from_inner_boundary(self) -> bool {
        matches!(
            self,
            ProfileKind::XiTilde
                | ProfileKind::EtaTilde
                | ProfileKind::EtaHat
                | ProfileKind::PsiTilde
        )
    }
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProfileKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProfileKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<_> = ProfileKind::ALL.iter().map(|k| k.name()).collect();
                Error::Config(format!(
                    "unknown profile kind `{s}` (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

/// A tabulated monotone profile `v ↦ G(F⁻¹(v))`.
#[derive(Debug, Clone)]
pub struct ProfileFunction {
    kind: ProfileKind,
    manifold: WarpedManifold,
    density: Density,
    omega: f64,
    t: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
    segment_rule: QuadratureRule,
}

impl ProfileFunction {
    pub fn new(kind: ProfileKind, manifold: &WarpedManifold, density: &Density) -> Result<Self> {
        let (t0, t_max) = if kind.is_radial() {
            (0.0, manifold.r_max())
        } else {
            let lo = if kind.counts_from_inner_boundary() {
                manifold.lambda_at_a()
            } else {
                0.0
            };
            (lo, manifold.lambda_max())
        };
        if !kind.is_radial() && density.support() < t_max * (1.0 - 1e-12) {
            return Err(Error::InvalidDensity(format!(
                "density defined on [0, {}] but the profile needs [0, {t_max}]",
                density.support()
            )));
        }
        // Λ ~ sqrt(s - λ(a)) at an anti-de Sitter-Schwarzschild horizon.
        let segment_rule = if kind == ProfileKind::EtaHat {
            QuadratureRule::singular_left(16, 1)?
        } else {
            QuadratureRule::gauss(16, 1)?
        };
        let mut pf = Self {
            kind,
            manifold: manifold.clone(),
            density: density.clone(),
            omega: sphere_area(manifold.n()),
            t: Vec::with_capacity(TABLE_POINTS),
            f: Vec::with_capacity(TABLE_POINTS),
            g: Vec::with_capacity(TABLE_POINTS),
            segment_rule,
        };
        let m = (TABLE_POINTS - 1) as f64;
        for k in 0..TABLE_POINTS {
            let x = if k == 0 {
                t0
            } else if k == TABLE_POINTS - 1 {
                t_max
            } else {
                t0 + (t_max - t0) * 0.5 * (1.0 - (std::f64::consts::PI * k as f64 / m).cos())
            };
            let (f, g) = match k {
                0 => (0.0, pf.g_closed(x).unwrap_or(0.0)),
                _ => {
                    let (prev_t, prev_f, prev_g) = (pf.t[k - 1], pf.f[k - 1], pf.g[k - 1]);
                    let f = prev_f + integrate_1d(|s| pf.df(s), prev_t, x, &pf.segment_rule)?;
                    let g = match pf.g_closed(x) {
                        Some(g) => g,
                        None => prev_g + integrate_1d(|s| pf.dg(s), prev_t, x, &pf.segment_rule)?,
                    };
                    (f, g)
                }
            };
            if !(f.is_finite() && g.is_finite()) {
                return Err(Error::Evaluation {
                    node: x,
                    value: if f.is_finite() { g } else { f },
                });
            }
            if k > 0 && f <= pf.f[k - 1] {
                return Err(Error::Config(format!(
                    "{kind} table is not strictly increasing at t = {x} (F = {f})"
                )));
            }
            pf.t.push(x);
            pf.f.push(f);
            pf.g.push(g);
        }
        Ok(pf)
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    /// `(t0, t_max)`.
    pub fn domain(&self) -> (f64, f64) {
        (self.t[0], self.t[TABLE_POINTS - 1])
    }

    /// `(F(t0), F(t_max))`.
    pub fn range(&self) -> (f64, f64) {
        (self.f[0], self.f[TABLE_POINTS - 1])
    }

    /// Table rows `(t, F(t), G(t))`.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.t
            .iter()
            .zip(&self.f)
            .zip(&self.g)
            .map(|((&t, &f), &g)| (t, f, g))
    }

    /// `F'(s)`.
    fn df(&self, s: f64) -> f64 {
        let n = self.manifold.n() as i32;
        match self.kind {
            ProfileKind::EtaHat => self.omega * s.powi(n),
            k if k.is_radial() => self.omega * s.sinh().powi(n),
            _ => self.omega * self.density.phi(s) * s.powi(n),
        }
    }

    /// Integrand of `G` for the kinds defined by an integral.
    fn dg(&self, s: f64) -> f64 {
        let n = self.manifold.n() as i32;
        match self.kind {
            ProfileKind::Eta => self.omega * self.density.phi_prime(s) * s.powi(n + 1),
            ProfileKind::EtaHat => self.omega * self.manifold.lambda_big_raw(s) * s.powi(n),
            _ => unreachable!("{} has a closed form", self.kind),
        }
    }

    /// `G(t)` when it is given pointwise.
    fn g_closed(&self, t: f64) -> Option<f64> {
        let n = self.manifold.n() as i32;
        let w = self.omega;
        let phi = || self.density.phi(t);
        Some(match self.kind {
            ProfileKind::Psi => w * phi() * t.powi(n) * t.hypot(1.0),
            ProfileKind::Xi | ProfileKind::XiTilde => w * phi() * t.powi(n),
            ProfileKind::PsiTilde => w * phi() * t.powi(n) * self.manifold.psi_raw(t),
            ProfileKind::EtaTilde => {
                let big = if t > 0.0 {
                    self.manifold.lambda_big_raw(t)
                } else {
                    0.0
                };
                w * phi() * big * t.powi(n + 1)
            }
            ProfileKind::H0 => w * t.cosh() * t.sinh().powi(n),
            ProfileKind::H0Tilde => w * (-t).exp() * t.sinh().powi(n),
            ProfileKind::F0 | ProfileKind::F0Tilde => t,
            ProfileKind::Eta | ProfileKind::EtaHat => return None,
        })
    }

    fn segment_of_t(&self, t: f64) -> usize {
        self.t
            .partition_point(|&x| x <= t)
            .saturating_sub(1)
            .min(TABLE_POINTS - 2)
    }

    fn f_in(&self, k: usize, t: f64) -> Result<f64> {
        if t == self.t[k] {
            return Ok(self.f[k]);
        }
        Ok(self.f[k] + integrate_1d(|s| self.df(s), self.t[k], t, &self.segment_rule)?)
    }

    fn g_in(&self, k: usize, t: f64) -> Result<f64> {
        if t == self.t[k] {
            return Ok(self.g[k]);
        }
        match self.g_closed(t) {
            Some(g) => Ok(g),
            None => Ok(self.g[k] + integrate_1d(|s| self.dg(s), self.t[k], t, &self.segment_rule)?),
        }
    }

    fn check_t(&self, t: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        if t >= lo && t <= hi {
            Ok(())
        } else {
            Err(domain("t", t, lo, hi))
        }
    }

    /// `F(t)`.
    pub fn cumulative_at(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        self.f_in(self.segment_of_t(t), t)
    }

    /// `G(t)`.
    pub fn g_at(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        self.g_in(self.segment_of_t(t), t)
    }

    /// `F⁻¹(v)` by bisection inside the table segment that brackets `v`.
    pub fn invert(&self, v: f64) -> Result<f64> {
        self.locate(v).map(|(_, t)| t)
    }

    fn locate(&self, v: f64) -> Result<(usize, f64)> {
        let (lo, hi) = self.range();
        let slack = 1e-12 * v.abs().max(1.0);
        if !(v >= lo - slack && v <= hi + slack) {
            return Err(Error::Range { value: v, lo, hi });
        }
        if v <= lo {
            return Ok((0, self.t[0]));
        }
        if v >= hi {
            return Ok((TABLE_POINTS - 2, self.t[TABLE_POINTS - 1]));
        }
        let k = self.f.partition_point(|&x| x <= v) - 1;
        if self.f[k] == v {
            return Ok((k, self.t[k]));
        }
        let (mut a, mut b) = (self.t[k], self.t[k + 1]);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if self.f_in(k, mid)? < v {
                a = mid;
            } else {
                b = mid;
            }
        }
        Ok((k, 0.5 * (a + b)))
    }

    /// `G(F⁻¹(v))`.
    pub fn eval(&self, v: f64) -> Result<f64> {
        let (k, t) = self.locate(v)?;
        self.g_in(k, t)
    }
}

/// `ω_n ∫_{t0}^t φ(s) s^n ds`.
pub fn cumulative(
    manifold: &WarpedManifold,
    density: &Density,
    t0: f64,
    t: f64,
    rule: &QuadratureRule,
) -> Result<f64> {
    if t < t0 {
        return Err(domain("t", t, t0, f64::INFINITY));
    }
    let n = manifold.n() as i32;
    Ok(manifold.omega_n() * integrate_1d(|s| density.phi(s) * s.powi(n), t0, t, rule)?)
}

/// `F⁻¹(v)` for a tabulated profile.
pub fn invert_monotone(pf: &ProfileFunction, v: f64) -> Result<f64> {
    pf.invert(v)
}

/// `G(F⁻¹(v))` for a tabulated profile.
pub fn profile_eval(pf: &ProfileFunction, v: f64) -> Result<f64> {
    pf.eval(v)
}

/// Direct evaluation of `h₀`, `h̃₀`, `f₀`, `f̃₀` at radius `r`.
pub fn closed_h_f(kind: ProfileKind, n: usize, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(domain("r", r, 0.0, f64::INFINITY));
    }
    let w = sphere_area(n);
    let p = n as i32;
    match kind {
        ProfileKind::H0 => Ok(w * r.cosh() * r.sinh().powi(p)),
        ProfileKind::H0Tilde => Ok(w * (-r).exp() * r.sinh().powi(p)),
        ProfileKind::F0 | ProfileKind::F0Tilde => {
            Ok(w * integrate_1d(|s| s.sinh().powi(p), 0.0, r, &QuadratureRule::default())?)
        }
        other => Err(Error::Config(format!("{other} has no closed form"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::DensityKind;
    use std::f64::consts::PI;

    fn hyp(n: usize) -> (WarpedManifold, Density) {
        let m = WarpedManifold::hyperbolic(n, 3.0).unwrap();
        let d = Density::constant(m.lambda_max()).unwrap();
        (m, d)
    }

    #[test]
    fn cumulative_examples() {
        let rule = QuadratureRule::default();
        let (m, one) = hyp(1);
        assert!((cumulative(&m, &one, 0.0, 1.0, &rule).unwrap() - PI).abs() < 1e-14);
        let e = Density::new(DensityKind::ExpQuadratic { c: 0.5 }, 10.0).unwrap();
        let oracle = 2.0 * PI * (0.5f64.exp() - 1.0);
        assert!((cumulative(&m, &e, 0.0, 1.0, &rule).unwrap() - oracle).abs() < 1e-9);
        let (m2, one) = hyp(2);
        assert!((cumulative(&m2, &one, 0.0, 1.0, &rule).unwrap() - 4.0 * PI / 3.0).abs() < 1e-13);
        assert!(cumulative(&m2, &one, 1.0, 0.5, &rule).is_err());
    }

    #[test]
    fn inversion_examples() {
        let e = WarpedManifold::euclidean(1, 3.0).unwrap();
        let one = Density::constant(3.0).unwrap();
        let xi = ProfileFunction::new(ProfileKind::Xi, &e, &one).unwrap();
        assert!((invert_monotone(&xi, PI).unwrap() - 1.0).abs() < 1e-12);

        let (m, one) = hyp(1);
        let f0 = ProfileFunction::new(ProfileKind::F0Tilde, &m, &one).unwrap();
        let v = 2.0 * PI * (1.0f64.cosh() - 1.0);
        assert!((invert_monotone(&f0, v).unwrap() - 1.0).abs() < 1e-10);
        let (_, top) = f0.range();
        assert_eq!(invert_monotone(&f0, top).unwrap(), 3.0);
        assert!(matches!(
            invert_monotone(&f0, top * 1.01),
            Err(Error::Range { .. })
        ));
        assert!(matches!(
            invert_monotone(&f0, -1.0),
            Err(Error::Range { .. })
        ));
    }

    #[test]
    fn profile_examples() {
        let (m, one) = hyp(1);
        let psi = ProfileFunction::new(ProfileKind::Psi, &m, &one).unwrap();
        assert!((profile_eval(&psi, PI).unwrap() - 2.0 * PI * 2.0f64.sqrt()).abs() < 1e-9);

        let e = Density::new(DensityKind::ExpQuadratic { c: 0.5 }, m.lambda_max()).unwrap();
        let eta = ProfileFunction::new(ProfileKind::Eta, &m, &e).unwrap();
        let v = 2.0 * PI * (0.5f64.exp() - 1.0);
        let oracle = 2.0 * PI * (2.0 - 0.5f64.exp());
        assert!((profile_eval(&eta, v).unwrap() - oracle).abs() < 1e-8);

        let (m2, one) = hyp(2);
        let xi = ProfileFunction::new(ProfileKind::Xi, &m2, &one).unwrap();
        assert!((profile_eval(&xi, 4.0 * PI / 3.0).unwrap() - 4.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn closed_forms() {
        let v = closed_h_f(ProfileKind::H0Tilde, 1, 1.0).unwrap();
        assert!((v - 2.0 * PI * (-1.0f64).exp() * 1.0f64.sinh()).abs() < 1e-14);
        let v = closed_h_f(ProfileKind::H0, 1, 1.0).unwrap();
        assert!((v - 2.0 * PI * 1.0f64.cosh() * 1.0f64.sinh()).abs() < 1e-14);
        assert_eq!(closed_h_f(ProfileKind::F0Tilde, 1, 0.0).unwrap(), 0.0);
        let f = closed_h_f(ProfileKind::F0, 2, 1.0).unwrap();
        // ∫ sinh² = (sinh 2r - 2r)/4
        assert!((f - 4.0 * PI * ((2.0f64).sinh() - 2.0) / 4.0).abs() < 1e-12);
        assert!(closed_h_f(ProfileKind::F0, 2, -1.0).is_err());
        assert!(closed_h_f(ProfileKind::Psi, 2, 1.0).is_err());
    }

    fn densities(support: f64) -> Vec<Density> {
        [
            DensityKind::Constant,
            DensityKind::CoshLinear { c: 1.0 },
            DensityKind::ExpQuadratic { c: 0.25 },
        ]
        .into_iter()
        .map(|k| Density::new(k, support).unwrap())
        .collect()
    }

    #[test]
    fn round_trips_on_off_grid_points() {
        for n in 1..=3 {
            let (m, _) = hyp(n);
            for d in densities(m.lambda_max()) {
                for kind in [
                    ProfileKind::Psi,
                    ProfileKind::Xi,
                    ProfileKind::Eta,
                    ProfileKind::PsiTilde,
                ] {
                    let pf = ProfileFunction::new(kind, &m, &d).unwrap();
                    let (t0, t1) = pf.domain();
                    for i in 1..40 {
                        let t = t0 + (t1 - t0) * (i as f64 / 40.0).powi(2);
                        let v = pf.cumulative_at(t).unwrap();
                        let back = pf.invert(v).unwrap();
                        assert!(
                            (back - t).abs() < 1e-10 * t.max(1.0),
                            "{kind} n={n} t={t} back={back}"
                        );
                        let g = pf.g_at(t).unwrap();
                        let gg = pf.eval(v).unwrap();
                        assert!(
                            (g - gg).abs() <= 1e-10 * g.abs().max(1e-300),
                            "{kind} {g} {gg}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn psi_tilde_reduces_to_psi_in_hyperbolic_space() {
        let (m, _) = hyp(2);
        let d = Density::new(DensityKind::CoshLinear { c: 1.0 }, m.lambda_max()).unwrap();
        let psi = ProfileFunction::new(ProfileKind::Psi, &m, &d).unwrap();
        let pst = ProfileFunction::new(ProfileKind::PsiTilde, &m, &d).unwrap();
        for ((_, f, g), (_, f2, g2)) in psi.rows().zip(pst.rows()) {
            assert_eq!(f, f2);
            assert!((g - g2).abs() <= 1e-12 * g.abs());
        }
    }

    #[test]
    fn pythagorean_assembly() {
        for m in [
            WarpedManifold::hyperbolic(2, 3.0).unwrap(),
            WarpedManifold::euclidean(3, 3.0).unwrap(),
            WarpedManifold::ads_schwarzschild(2, 1.0, 3.0).unwrap(),
        ] {
            let d = Density::new(DensityKind::ExpQuadratic { c: 0.01 }, m.lambda_max()).unwrap();
            let et = ProfileFunction::new(ProfileKind::EtaTilde, &m, &d).unwrap();
            let xt = ProfileFunction::new(ProfileKind::XiTilde, &m, &d).unwrap();
            let pt = ProfileFunction::new(ProfileKind::PsiTilde, &m, &d).unwrap();
            for ((a, b), c) in et.rows().zip(xt.rows()).zip(pt.rows()) {
                let lhs = a.2.hypot(b.2);
                assert!((lhs - c.2).abs() <= 1e-10 * c.2.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn eta_hat_starts_at_zero_and_increases() {
        let m = WarpedManifold::ads_schwarzschild(2, 1.0, 3.0).unwrap();
        let one = Density::constant(m.lambda_max()).unwrap();
        let eh = ProfileFunction::new(ProfileKind::EtaHat, &m, &one).unwrap();
        let rows: Vec<_> = eh.rows().collect();
        assert_eq!((rows[0].0, rows[0].1, rows[0].2), (1.0, 0.0, 0.0));
        assert!(rows.windows(2).all(|w| w[1].2 > w[0].2));
        // Λ(s) s^n = sqrt(s^{2n}(1 - 1/s³)) for n = 2, m = 1: compare to direct quadrature
        let direct = 4.0
            * PI
            * integrate_1d(
                |s| (s * s * s * s * (1.0 - 1.0 / (s * s * s))).sqrt(),
                1.0,
                2.0,
                &QuadratureRule::singular_left(48, 8).unwrap(),
            )
            .unwrap();
        assert!((eh.g_at(2.0).unwrap() - direct).abs() < 1e-10 * direct);
    }

    #[test]
    fn kind_names() {
        for k in ProfileKind::ALL {
            assert_eq!(k.to_string().parse::<ProfileKind>().unwrap(), k);
        }
        assert!("psi".parse::<ProfileKind>().is_ok());
        assert!("Nope".parse::<ProfileKind>().is_err());
    }
}
