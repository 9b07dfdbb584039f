//! The projection `π(r, θ) = λ(r) θ` onto Euclidean space.
//!
//! Weighted integrals over a radial graph `Σ ⊂ M` and its domain `Ω` are
//! compared with Euclidean integrals over the shadow `Σ̂ = π(Σ)`:
//!
//! ```text
//! ∫_Ω φ(λ) λ' dv  = ∫_Ω̂ φ(ρ) dv̂
//! ∫_Σ φ(λ) λ' dμ  = ∫_Σ̂ φ(ρ) sqrt(Λ(ρ)² û² + 1) dμ̂,   dμ̂ = ρ^{n+1}/û dσ
//! ```
//!
//! Each side is computed through its own parametrisation, so agreement is
//! evidence rather than a tautology.

use std::f64::consts::PI;

use crate::density::Density;
use crate::error::{Error, Result};
use crate::manifold::WarpedManifold;
use crate::quadrature::QuadratureRule;
use crate::report::DeficitReport;
use crate::surface::{self, sphere_weight, BoundaryPoint, RadialProfile};

/// Relative tolerance for the transfer identities.
pub const TRANSFER_TOL: f64 = 1e-9;
/// Tolerance for the inner-product conditions on the hyperboloid normal.
pub const NORMAL_TOL: f64 = 1e-9;
/// Tolerance for tangency, which is tested against finite-difference secants.
pub const TANGENT_TOL: f64 = 1e-7;
const SECANT_STEP: f64 = 1e-5;

/// The image of a radial graph under `π`.
#[derive(Debug, Clone)]
pub struct EuclideanShadow {
    profile: RadialProfile,
    manifold: WarpedManifold,
}

/// Shadow geometry above one polar angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadowPoint {
    pub theta: f64,
    pub rho: f64,
    pub rho_prime: f64,
    /// Euclidean support function `û = ρ² / sqrt(ρ² + ρ'²)`.
    pub u_hat: f64,
}

pub fn project(profile: &RadialProfile, manifold: &WarpedManifold) -> EuclideanShadow {
    EuclideanShadow {
        profile: profile.clone(),
        manifold: manifold.clone(),
    }
}

impl EuclideanShadow {
    pub fn n(&self) -> usize {
        self.manifold.n()
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    pub fn manifold(&self) -> &WarpedManifold {
        &self.manifold
    }

    /// Inner radius of `Ω̂`: `λ(a)`.
    pub fn inner_radius(&self) -> f64 {
        self.manifold.lambda_at_a()
    }

    pub fn at(&self, theta: f64) -> ShadowPoint {
        let r = self.profile.radius(theta);
        let (rho, lp) = self.manifold.warp(r);
        let rho_prime = lp * self.profile.radius_prime(theta);
        ShadowPoint {
            theta,
            rho,
            rho_prime,
            u_hat: rho * rho / rho.hypot(rho_prime),
        }
    }

    pub fn rho(&self, theta: f64) -> f64 {
        self.at(theta).rho
    }

    pub fn u_hat(&self, theta: f64) -> f64 {
        self.at(theta).u_hat
    }

    /// `∫_Σ̂ g dμ̂` with `dμ̂ = ρ^{n+1}/û dσ`.
    pub fn boundary_integral<G>(&self, rule: &QuadratureRule, g: G) -> Result<f64>
    where
        G: Fn(&ShadowPoint) -> f64,
    {
        let n = self.n();
        surface::sphere_integral(n, rule, |theta| {
            let sp = self.at(theta);
            g(&sp) * sp.rho.powi(n as i32 + 1) / sp.u_hat
        })
    }

    /// `∫_Ω̂ h(ρ) dv̂` over the region between `|x| = λ(a)` and `Σ̂`.
    pub fn domain_integral<H>(&self, rule: &QuadratureRule, h: H) -> Result<f64>
    where
        H: Fn(f64) -> f64,
    {
        self.domain_integral_with(rule, rule, h)
    }

    /// As [`domain_integral`](Self::domain_integral) with a separate rule in `ρ`.
    pub fn domain_integral_with<H>(
        &self,
        rule: &QuadratureRule,
        radial: &QuadratureRule,
        h: H,
    ) -> Result<f64>
    where
        H: Fn(f64) -> f64,
    {
        let n = self.n();
        let lo = self.inner_radius();
        crate::quadrature::integrate_nested_with(
            |theta, rho| sphere_weight(n, theta) * h(rho) * rho.powi(n as i32),
            self.profile.theta_range(),
            |theta| (lo, self.rho(theta)),
            rule,
            radial,
        )
    }

    /// `û` is constant on the shadow (sampled on a dense grid).
    pub fn has_constant_support(&self) -> bool {
        let (lo, hi) = self.profile.theta_range();
        let u0 = self.u_hat(lo);
        (0..=512).all(|i| {
            let u = self.u_hat(lo + (hi - lo) * i as f64 / 512.0);
            (u - u0).abs() <= 1e-13 * u0
        })
    }
}

/// Compares `∫_Ω φ(λ)λ' dv` (nested in `(θ, r)`) with `∫_Ω̂ φ(ρ) dv̂` (nested in `(θ, ρ)`).
pub fn check_volume_transfer(
    profile: &RadialProfile,
    manifold: &WarpedManifold,
    density: &Density,
    rule: &QuadratureRule,
) -> Result<DeficitReport> {
    let lhs = surface::weighted_volume(profile, manifold, density, rule)?;
    let shadow = project(profile, manifold);
    let rhs = shadow.domain_integral(rule, |rho| density.phi(rho))?;
    Ok(DeficitReport::new("VolumeTransfer", lhs, rhs).judge_identity(TRANSFER_TOL))
}

/// Compares `∫_Σ φ(λ)λ' dμ` with `∫_Σ̂ φ(ρ) sqrt(Λ²û² + 1) dμ̂`.
pub fn check_area_transfer(
    profile: &RadialProfile,
    manifold: &WarpedManifold,
    density: &Density,
    rule: &QuadratureRule,
) -> Result<DeficitReport> {
    let lhs = surface::weighted_area(profile, manifold, density, rule)?;
    let shadow = project(profile, manifold);
    let rhs = shadow.boundary_integral(rule, |sp| {
        let l = manifold.lambda_big_raw(sp.rho) * sp.u_hat;
        density.phi(sp.rho) * l.hypot(1.0)
    })?;
    Ok(DeficitReport::new("AreaTransfer", lhs, rhs).judge_identity(TRANSFER_TOL))
}

/// `n_grid` polar angles strictly inside the profile's range.
pub fn theta_grid(profile: &RadialProfile, n_grid: usize) -> Vec<f64> {
    let (lo, hi) = profile.theta_range();
    (0..n_grid)
        .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n_grid as f64)
        .collect()
}

/// Minkowski product `Σ x_i y_i - x_{n+1} y_{n+1}` (time component last).
fn minkowski(x: &[f64], y: &[f64]) -> f64 {
    let k = x.len() - 1;
    x[..k].iter().zip(&y[..k]).map(|(a, b)| a * b).sum::<f64>() - x[k] * y[k]
}

/// Unit vector at polar angle `θ` and azimuth `ϕ`, truncated to the
/// coordinates an axially symmetric surface can reach.
fn unit(dim: usize, theta: f64, azimuth: f64) -> Vec<f64> {
    if dim == 2 {
        vec![theta.cos(), theta.sin()]
    } else {
        vec![
            theta.cos(),
            theta.sin() * azimuth.cos(),
            theta.sin() * azimuth.sin(),
        ]
    }
}

/// Checks the unit normal of `Σ` in the hyperboloid model,
/// `ν = (ν̂ + û x, λ' û) / sqrt(û² + 1)`, against `⟨X, ν⟩ = 0`, `⟨ν, ν⟩ = 1`
/// and orthogonality to secant tangent vectors of the embedding
/// `X = (sinh R θ, cosh R)`.
pub fn check_minkowski_normal(
    profile: &RadialProfile,
    manifold: &WarpedManifold,
    grid: &[f64],
) -> Result<DeficitReport> {
    if !manifold.is_hyperbolic() {
        return Err(Error::Config(
            "the hyperboloid normal check needs a hyperbolic manifold".into(),
        ));
    }
    let n = manifold.n();
    let dim = if n == 1 { 2 } else { 3 };
    let shadow = project(profile, manifold);
    let embed = |theta: f64, azimuth: f64| {
        let r = profile.radius(theta);
        let mut x: Vec<f64> = unit(dim, theta, azimuth)
            .iter()
            .map(|c| r.sinh() * c)
            .collect();
        x.push(r.cosh());
        x
    };
    let (mut worst_x, mut worst_unit, mut worst_tangent) = (0.0f64, 0.0f64, 0.0f64);
    for &theta in grid {
        let sp = shadow.at(theta);
        let e_r = unit(dim, theta, 0.0);
        let e_theta = unit(dim, theta + PI / 2.0, 0.0);
        let norm = sp.rho.hypot(sp.rho_prime);
        let lp = profile.radius(theta).cosh();
        let scale = sp.u_hat.hypot(1.0);
        let mut nu: Vec<f64> = (0..dim)
            .map(|i| {
                let nu_hat = (sp.rho * e_r[i] - sp.rho_prime * e_theta[i]) / norm;
                (nu_hat + sp.u_hat * sp.rho * e_r[i]) / scale
            })
            .collect();
        nu.push(lp * sp.u_hat / scale);

        let x = embed(theta, 0.0);
        let size = x.iter().map(|c| c.abs()).fold(1.0, f64::max);
        worst_x = worst_x.max(minkowski(&x, &nu).abs() / size);
        worst_unit = worst_unit.max((minkowski(&nu, &nu) - 1.0).abs());

        let h = SECANT_STEP;
        let mut tangents = vec![secant(&embed(theta + h, 0.0), &embed(theta - h, 0.0), h)];
        if dim == 3 && theta.sin() > 1e-3 {
            tangents.push(secant(&embed(theta, h), &embed(theta, -h), h));
        }
        for t in tangents {
            let len = minkowski(&t, &t).max(0.0).sqrt();
            if len > 0.0 {
                worst_tangent = worst_tangent.max(minkowski(&t, &nu).abs() / len);
            }
        }
    }
    let worst = worst_x.max(worst_unit).max(worst_tangent);
    let mut report = DeficitReport::new("MinkowskiNormal", worst, 0.0);
    report.equality_expected = true;
    report.pass = worst_x < NORMAL_TOL && worst_unit < NORMAL_TOL && worst_tangent < TANGENT_TOL;
    if !report.pass {
        report.status = crate::report::Status::EqualityMissed;
    }
    Ok(report.note(format!(
        "max |<X,nu>| = {worst_x:.3e}, max |<nu,nu> - 1| = {worst_unit:.3e}, max tangency = {worst_tangent:.3e} over {} angles",
        grid.len()
    )))
}

fn secant(plus: &[f64], minus: &[f64], h: f64) -> Vec<f64> {
    plus.iter()
        .zip(minus)
        .map(|(a, b)| (a - b) / (2.0 * h))
        .collect()
}

/// Compares `u` computed on `Σ` with `λ' λ û / sqrt(λ² + (λ'² - 1) û²)`
/// computed from the shadow.
pub fn u_from_uhat_check(
    profile: &RadialProfile,
    manifold: &WarpedManifold,
    grid: &[f64],
) -> Result<DeficitReport> {
    let shadow = project(profile, manifold);
    let mut worst = -1.0f64;
    let (mut at_worst_u, mut at_worst_v) = (0.0, 0.0);
    for &theta in grid {
        let direct = BoundaryPoint::at(profile, manifold, theta).u;
        let sp = shadow.at(theta);
        let lp = manifold.psi_raw(sp.rho);
        let uh = sp.u_hat;
        let via = lp * sp.rho * uh / (sp.rho * sp.rho + (lp * lp - 1.0) * uh * uh).sqrt();
        let rel = (direct - via).abs() / direct.abs().max(via.abs());
        if !(rel <= worst) {
            worst = rel;
            at_worst_u = direct;
            at_worst_v = via;
        }
    }
    if !(worst >= 0.0) {
        return Err(Error::Evaluation {
            node: f64::NAN,
            value: worst,
        });
    }
    let mut report = DeficitReport::new("UFromUhat", at_worst_u, at_worst_v);
    report.rel_deficit = worst;
    Ok(report.judge_identity(TRANSFER_TOL).note(format!(
        "max relative difference {worst:.3e} over {} angles",
        grid.len()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::DensityKind;
    use crate::surface::{make_profile, Generator};

    #[test]
    fn projection_examples() {
        let h = WarpedManifold::hyperbolic(2, 4.0).unwrap();
        let p = make_profile(&Generator::CenteredBall { r0: 1.0 }, &h).unwrap();
        let s = project(&p, &h);
        for t in [0.0, 1.0, 3.0] {
            assert_eq!(s.rho(t), 1.0f64.sinh());
            assert_eq!(s.u_hat(t), 1.0f64.sinh());
        }
        assert!(s.has_constant_support());

        let e = WarpedManifold::euclidean(2, 4.0).unwrap();
        let p = make_profile(
            &Generator::Perturbed {
                r0: 1.0,
                eps: vec![0.2, 0.1],
            },
            &e,
        )
        .unwrap();
        let s = project(&p, &e);
        for t in [0.0, 0.4, 2.0] {
            assert_eq!(s.rho(t), p.radius(t));
            assert_eq!(s.at(t).rho_prime, p.radius_prime(t));
        }
        assert!(!s.has_constant_support());

        let ads = WarpedManifold::ads_schwarzschild(2, 1.0, 3.0).unwrap();
        let p = make_profile(
            &Generator::Slice {
                r0: ads.rho_to_r(2.0).unwrap(),
            },
            &ads,
        )
        .unwrap();
        assert!((project(&p, &ads).rho(1.0) - 2.0).abs() < 1e-10);
    }

    #[test]
    fn transfer_examples() {
        let rule = QuadratureRule::default();
        let h1 = WarpedManifold::hyperbolic(1, 4.0).unwrap();
        let one = Density::constant(h1.lambda_max()).unwrap();
        let p = make_profile(&Generator::CenteredBall { r0: 1.0 }, &h1).unwrap();
        let v = check_volume_transfer(&p, &h1, &one, &rule).unwrap();
        assert!(v.pass, "{v:?}");
        assert!((v.rhs - std::f64::consts::PI * 1.0f64.sinh().powi(2)).abs() < 1e-9);
        let a = check_area_transfer(&p, &h1, &one, &rule).unwrap();
        assert!(a.pass, "{a:?}");
        assert!((a.rhs - 2.0 * PI * 1.0f64.sinh() * 1.0f64.cosh()).abs() < 1e-9);

        let e = WarpedManifold::euclidean(2, 4.0).unwrap();
        let d = Density::new(DensityKind::ExpQuadratic { c: 0.5 }, 4.0).unwrap();
        let p = make_profile(
            &Generator::Perturbed {
                r0: 1.0,
                eps: vec![0.1, 0.2],
            },
            &e,
        )
        .unwrap();
        assert!(
            check_volume_transfer(&p, &e, &d, &rule)
                .unwrap()
                .rel_deficit
                .abs()
                < 1e-14
        );
        assert!(
            check_area_transfer(&p, &e, &d, &rule)
                .unwrap()
                .rel_deficit
                .abs()
                < 1e-14
        );

        let h2 = WarpedManifold::hyperbolic(2, 4.0).unwrap();
        let d = Density::new(DensityKind::ExpQuadratic { c: 0.5 }, h2.lambda_max()).unwrap();
        let p = make_profile(
            &Generator::Perturbed {
                r0: 1.0,
                eps: vec![0.0, 0.1],
            },
            &h2,
        )
        .unwrap();
        assert!(check_volume_transfer(&p, &h2, &d, &rule).unwrap().pass);
        assert!(check_area_transfer(&p, &h2, &d, &rule).unwrap().pass);

        let ads = WarpedManifold::ads_schwarzschild(2, 1.0, 3.0).unwrap();
        let one = Density::constant(ads.lambda_max()).unwrap();
        let r0 = ads.rho_to_r(2.0).unwrap();
        let p = make_profile(
            &Generator::Perturbed {
                r0,
                eps: vec![0.0, 0.05],
            },
            &ads,
        )
        .unwrap();
        let a = check_area_transfer(&p, &ads, &one, &rule).unwrap();
        assert!(a.rel_deficit.abs() < 1e-8, "{a:?}");
        let v = check_volume_transfer(&p, &ads, &one, &rule).unwrap();
        assert!(v.rel_deficit.abs() < 1e-8, "{v:?}");
    }

    #[test]
    fn ball_normal_is_closed_form() {
        let h = WarpedManifold::hyperbolic(2, 4.0).unwrap();
        let p = make_profile(&Generator::CenteredBall { r0: 1.0 }, &h).unwrap();
        let r = check_minkowski_normal(&p, &h, &theta_grid(&p, 64)).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.lhs < 1e-9);
        // with û = ρ the assembled normal is (cosh 1 θ, sinh 1)
        let s = project(&p, &h).at(0.3);
        let k = s.u_hat.hypot(1.0);
        assert!(((1.0 + s.u_hat * s.rho) / k - 1.0f64.cosh()).abs() < 1e-12);
        assert!((1.0f64.cosh() * s.u_hat / k - 1.0f64.sinh()).abs() < 1e-12);
    }

    #[test]
    fn normals_of_perturbed_profiles() {
        for n in 1..=3 {
            let h = WarpedManifold::hyperbolic(n, 4.0).unwrap();
            for g in [
                Generator::Perturbed {
                    r0: 1.0,
                    eps: vec![0.1, 0.1],
                },
                Generator::OffCenterBall {
                    radius: 1.0,
                    offset: 0.3,
                },
            ] {
                let p = make_profile(&g, &h).unwrap();
                let r = check_minkowski_normal(&p, &h, &theta_grid(&p, 100)).unwrap();
                assert!(r.pass, "{n} {g:?} {r:?}");
            }
        }
        let e = WarpedManifold::euclidean(2, 4.0).unwrap();
        let p = make_profile(&Generator::CenteredBall { r0: 1.0 }, &e).unwrap();
        assert!(check_minkowski_normal(&p, &e, &[0.5]).is_err());
    }

    #[test]
    fn u_from_u_hat() {
        let h = WarpedManifold::hyperbolic(2, 4.0).unwrap();
        let p = make_profile(&Generator::CenteredBall { r0: 1.0 }, &h).unwrap();
        let r = u_from_uhat_check(&p, &h, &theta_grid(&p, 32)).unwrap();
        assert!(r.pass && (r.lhs - 1.0f64.sinh()).abs() < 1e-14);
        let p = make_profile(
            &Generator::Perturbed {
                r0: 1.0,
                eps: vec![0.0, 0.0, 0.05],
            },
            &h,
        )
        .unwrap();
        let r = u_from_uhat_check(&p, &h, &theta_grid(&p, 200)).unwrap();
        assert!(r.pass, "{r:?}");
        let e = WarpedManifold::euclidean(2, 4.0).unwrap();
        let p = make_profile(
            &Generator::Perturbed {
                r0: 1.0,
                eps: vec![0.3],
            },
            &e,
        )
        .unwrap();
        let r = u_from_uhat_check(&p, &e, &theta_grid(&p, 50)).unwrap();
        assert!(r.rel_deficit < 1e-15);
        let ads = WarpedManifold::ads_schwarzschild(3, 2.0, 3.0).unwrap();
        let p = make_profile(
            &Generator::Perturbed {
                r0: 1.0,
                eps: vec![0.1, -0.1],
            },
            &ads,
        )
        .unwrap();
        assert!(
            u_from_uhat_check(&p, &ads, &theta_grid(&p, 50))
                .unwrap()
                .pass
        );
    }
}
