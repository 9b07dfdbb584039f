//! Every inequality as a signed deficit `lhs - rhs`.
//!
//! A [`Verifier`] fixes the manifold, the density and the quadrature rule and
//! caches the profile tables the right-hand sides need. Checks never panic on
//! bad input: failures come back as reports with [`Status::Error`].

mod search;
mod sweep;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::density::{Density, LogConvexityCertificate};
use crate::error::{Error, Result};
use crate::manifold::{ManifoldKind, WarpedManifold};
use crate::profiles::{ProfileFunction, ProfileKind};
use crate::quadrature::{McOracle, QuadratureRule, RuleKind};
use crate::report::{DeficitReport, Tolerances};
use crate::surface::{self, make_profile, Generator, RadialProfile};
use crate::transfer::{self, project, EuclideanShadow};

pub use crate::report::{Status, SweepPoint};
pub use search::{minimize_deficit, SearchResult, TraceEntry};
pub use sweep::sweep;

/// Equality tolerance floor for the anti-de Sitter-Schwarzschild inequality,
/// where the horizon substitution limits the attainable accuracy.
pub const ADS_EQUALITY_TOL: f64 = 1e-6;

/// Angles used by the pointwise normal and support-function checks.
pub const POINTWISE_GRID: usize = 257;

const STAR_SHAPED_NOTE: &str = "domain restricted to star-shaped radial graphs";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    /// `∫_∂Ω φ(sinh r) cosh r dμ >= ψ(∫_Ω φ(sinh r) cosh r dv)` in hyperbolic space.
    MainThm,
    /// `∫_∂Ω cosh r dμ >= sqrt(((n+1)V)² + ω_n^{2/(n+1)} ((n+1)V)^{2n/(n+1)})`, `V = ∫_Ω cosh r dv`.
    CorCosh,
    /// `∫_∂Ω (cosh r - u) dμ >= h̃₀(f̃₀⁻¹(Vol Ω))`.
    CorCoshMinusU,
    /// `∫_∂Ω cosh r dμ >= h₀(f₀⁻¹(Vol Ω))`.
    CorH0,
    /// `∫_Ω φ'(λ) λ' λ dv >= η(∫_Ω φ(λ) λ' dv)`.
    LemSym,
    /// `∫_Ω cosh r dv >= ω_n sinh^{n+1}(r_Ω)/(n+1)`, `r_Ω = f̃₀⁻¹(Vol Ω)`.
    LemVolW,
    /// `∫_Σ φ(λ) λ' dμ >= ψ̃(∫_Ω φ(λ) λ' dv)` in a warped product.
    Warped,
    /// The anti-de Sitter-Schwarzschild inequality for `(∫_Σ λ' dμ)²`.
    AdsS,
    /// `∫_Σ̂ φ dμ̂ >= ξ(∫_Ω̂ φ dv̂)` on the Euclidean shadow.
    ThmC,
    /// As [`Case::ThmC`] for the annulus `λ(a) <= |x|`, against `ξ̃`.
    Lem32,
    /// `∫_Σ̂ φ sqrt(Λ²û² + 1) dμ̂ >= sqrt((∫_Σ̂ φ Λ û dμ̂)² + (∫_Σ̂ φ dμ̂)²)`.
    JensenStep,
    VolumeTransfer,
    AreaTransfer,
    MinkowskiNormal,
    UFromUhat,
    /// Weighted area by quadrature against Monte Carlo.
    McArea,
    /// Weighted volume by quadrature against Monte Carlo.
    McVolume,
}

impl Case {
    pub const ALL: [Case; 17] = [
        Case::MainThm,
        Case::CorCosh,
        Case::CorCoshMinusU,
        Case::CorH0,
        Case::LemSym,
        Case::LemVolW,
        Case::Warped,
        Case::AdsS,
        Case::ThmC,
        Case::Lem32,
        Case::JensenStep,
        Case::VolumeTransfer,
        Case::AreaTransfer,
        Case::MinkowskiNormal,
        Case::UFromUhat,
        Case::McArea,
        Case::McVolume,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Case::MainThm => "MainThm",
            Case::CorCosh => "CorCosh",
            Case::CorCoshMinusU => "CorCoshMinusU",
            Case::CorH0 => "CorH0",
            Case::LemSym => "LemSym",
            Case::LemVolW => "LemVolW",
            Case::Warped => "Warped",
            Case::AdsS => "AdsS",
            Case::ThmC => "ThmC",
            Case::Lem32 => "Lem32",
            Case::JensenStep => "JensenStep",
            Case::VolumeTransfer => "VolumeTransfer",
            Case::AreaTransfer => "AreaTransfer",
            Case::MinkowskiNormal => "MinkowskiNormal",
            Case::UFromUhat => "UFromUhat",
            Case::McArea => "McArea",
            Case::McVolume => "McVolume",
        }
    }

    /// Cases stated for hyperbolic space only.
    pub fn is_hyperbolic(self) -> bool {
        matches!(
            self,
            Case::MainThm
                | Case::CorCosh
                | Case::CorCoshMinusU
                | Case::CorH0
                | Case::LemSym
                | Case::LemVolW
        )
    }

    /// Identities and oracle comparisons rather than inequalities.
    pub fn is_identity(self) -> bool {
        matches!(
            self,
            Case::VolumeTransfer
                | Case::AreaTransfer
                | Case::MinkowskiNormal
                | Case::UFromUhat
                | Case::McArea
                | Case::McVolume
        )
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Case::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<_> = Case::ALL.iter().map(|c| c.name()).collect();
                Error::Config(format!(
                    "unknown case `{s}` (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

/// One checked hypothesis.
#[derive(Debug, Clone, PartialEq)]
struct Hypothesis {
    holds: bool,
    text: String,
}

/// Shared context for a batch of checks.
#[derive(Debug)]
pub struct Verifier {
    manifold: WarpedManifold,
    density: Density,
    rule: QuadratureRule,
    tolerances: Tolerances,
    estimate_error: bool,
    oracle: McOracle,
    certificate: LogConvexityCertificate,
    profiles: [OnceLock<Result<ProfileFunction>>; 11],
}

impl Verifier {
    /// The density is taken on `[-λ(r_max), λ(r_max)]`; its log-convexity
    /// certificate is computed once on that interval.
    pub fn new(manifold: WarpedManifold, density: Density, rule: QuadratureRule) -> Result<Self> {
        let support = manifold.lambda_max();
        let density = density.with_support(support)?;
        let certificate = density.logconvexity_check(support)?;
        Ok(Self {
            manifold,
            density,
            rule,
            tolerances: Tolerances::default(),
            estimate_error: false,
            oracle: McOracle::new(1_000_000, 42),
            certificate,
            profiles: Default::default(),
        })
    }

    pub fn with_tolerances(mut self, tolerances: Tolerances) -> Self {
        self.tolerances = tolerances;
        self
    }

    /// Re-evaluates inequality checks with twice the panels and reports the
    /// change of the deficit as its error estimate.
    pub fn with_error_estimate(mut self, on: bool) -> Self {
        self.estimate_error = on;
        self
    }

    pub fn with_oracle(mut self, oracle: McOracle) -> Self {
        self.oracle = oracle;
        self
    }

    pub fn manifold(&self) -> &WarpedManifold {
        &self.manifold
    }

    pub fn density(&self) -> &Density {
        &self.density
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    pub fn certificate(&self) -> &LogConvexityCertificate {
        &self.certificate
    }

    /// The profile table of `kind`, built on first use.
    pub fn profile(&self, kind: ProfileKind) -> Result<&ProfileFunction> {
        let idx = ProfileKind::ALL
            .iter()
            .position(|&k| k == kind)
            .expect("listed kind");
        let one;
        let density = if kind == ProfileKind::EtaHat || kind.is_radial() {
            one = Density::constant(self.density.support())?;
            &one
        } else {
            &self.density
        };
        self.profiles[idx]
            .get_or_init(|| ProfileFunction::new(kind, &self.manifold, density))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Builds the surface and runs one check. Never fails: errors become
    /// reports with status `error`.
    pub fn check(&self, case: Case, generator: &Generator) -> DeficitReport {
        match make_profile(generator, &self.manifold) {
            Ok(p) => self.check_profile(case, &p),
            Err(e) => DeficitReport::failure(case.name(), &e),
        }
    }

    pub fn check_profile(&self, case: Case, profile: &RadialProfile) -> DeficitReport {
        self.evaluate(case, profile, self.estimate_error)
            .unwrap_or_else(|e| DeficitReport::failure(case.name(), &e))
    }

    /// The chain Jensen step, Euclidean weighted inequality, symmetrization,
    /// main inequality:
    /// each link is reported on its own.
    pub fn check_chain(&self, generator: &Generator) -> Vec<DeficitReport> {
        [Case::JensenStep, Case::ThmC, Case::LemSym, Case::MainThm]
            .into_iter()
            .map(|c| self.check(c, generator))
            .collect()
    }

    pub(crate) fn evaluate(
        &self,
        case: Case,
        profile: &RadialProfile,
        estimate_error: bool,
    ) -> Result<DeficitReport> {
        if case.is_identity() {
            return self.identity(case, profile);
        }
        self.require_manifold(case)?;
        let (lhs, rhs) = self.sides(case, profile, &self.rule)?;
        let equality_expected = self.equality_expected(case, profile);
        let tol_eq = if case == Case::AdsS {
            self.tolerances.equality.max(ADS_EQUALITY_TOL)
        } else {
            self.tolerances.equality
        };
        let mut report = DeficitReport::new(case.name(), lhs, rhs)
            .judge_inequality(equality_expected, &self.tolerances, tol_eq)
            .note(STAR_SHAPED_NOTE);
        if case == Case::Lem32 {
            report = report.note("equality case not asserted by the statement");
        }
        if estimate_error {
            let (l2, r2) = self.sides(case, profile, &self.rule.refined())?;
            report.error_estimate = Some(((l2 - r2) - report.deficit).abs());
        }
        for h in self.hypotheses(case) {
            report = if h.holds {
                report.hypothesis(h.text)
            } else {
                report.hypothesis_violated(h.text)
            };
        }
        Ok(report)
    }

    fn require_manifold(&self, case: Case) -> Result<()> {
        if case.is_hyperbolic() && !self.manifold.is_hyperbolic() {
            return Err(Error::Config(format!(
                "{case} is stated for hyperbolic space only"
            )));
        }
        if case == Case::AdsS
            && !(matches!(self.manifold.kind(), ManifoldKind::AdsSchwarzschild { .. })
                && self.manifold.mass() > 0.0)
        {
            return Err(Error::Config(format!(
                "{case} needs an anti-de Sitter-Schwarzschild manifold with positive mass"
            )));
        }
        Ok(())
    }

    fn equality_expected(&self, case: Case, profile: &RadialProfile) -> bool {
        match case {
            Case::Lem32 => false,
            Case::LemSym => profile.is_radially_constant() || self.density.is_constant(),
            _ => profile.is_radially_constant(),
        }
    }

    fn hypotheses(&self, case: Case) -> Vec<Hypothesis> {
        match case {
            Case::MainThm | Case::LemSym | Case::ThmC | Case::Lem32 => vec![self.log_convexity()],
            Case::Warped => {
                let mut v = vec![self.log_convexity()];
                v.extend(warped_hypotheses(&self.manifold, &self.density));
                v
            }
            _ => Vec::new(),
        }
    }

    fn log_convexity(&self) -> Hypothesis {
        let c = &self.certificate;
        Hypothesis {
            holds: c.valid,
            text: format!(
                "log-convex density on [0, {:.6e}]: {} (min (log phi)'' = {:.3e}, min (phi' t/phi)' = {:.3e})",
                c.support,
                if c.valid { "holds" } else { "fails" },
                c.min_log_second,
                c.min_monotone
            ),
        }
    }

    /// `(lhs, rhs)` of an inequality case with the given rule.
    fn sides(&self, case: Case, p: &RadialProfile, rule: &QuadratureRule) -> Result<(f64, f64)> {
        let m = &self.manifold;
        let d = &self.density;
        let n = m.n();
        let nf = n as f64;
        let w = m.omega_n();
        let one = Density::constant(d.support())?;
        match case {
            Case::MainThm => {
                let lhs = surface::weighted_area(p, m, d, rule)?;
                let v = surface::weighted_volume(p, m, d, rule)?;
                Ok((lhs, self.profile(ProfileKind::Psi)?.eval(v)?))
            }
            Case::CorCosh => {
                let lhs = surface::weighted_area(p, m, &one, rule)?;
                let v = (nf + 1.0) * surface::weighted_volume(p, m, &one, rule)?;
                let rhs = (v * v + w.powf(2.0 / (nf + 1.0)) * v.powf(2.0 * nf / (nf + 1.0))).sqrt();
                Ok((lhs, rhs))
            }
            Case::CorCoshMinusU => {
                let lhs = surface::boundary_integral(p, m, rule, |bp| bp.lambda_prime - bp.u)?;
                let vol = surface::unweighted_volume(p, m, rule)?;
                Ok((lhs, self.profile(ProfileKind::H0Tilde)?.eval(vol)?))
            }
            Case::CorH0 => {
                let lhs = surface::weighted_area(p, m, &one, rule)?;
                let vol = surface::unweighted_volume(p, m, rule)?;
                Ok((lhs, self.profile(ProfileKind::H0)?.eval(vol)?))
            }
            Case::LemSym => {
                let lhs = surface::domain_integral(p, m, rule, |_, l, lp| d.phi_prime(l) * lp * l)?;
                let v = surface::weighted_volume(p, m, d, rule)?;
                Ok((lhs, self.profile(ProfileKind::Eta)?.eval(v)?))
            }
            Case::LemVolW => {
                let lhs = surface::weighted_volume(p, m, &one, rule)?;
                let vol = surface::unweighted_volume(p, m, rule)?;
                let r = self.profile(ProfileKind::F0Tilde)?.invert(vol)?;
                Ok((lhs, w * r.sinh().powi(n as i32 + 1) / (nf + 1.0)))
            }
            Case::Warped => {
                let lhs = surface::weighted_area(p, m, d, rule)?;
                let v = surface::weighted_volume(p, m, d, rule)?;
                Ok((lhs, self.profile(ProfileKind::PsiTilde)?.eval(v)?))
            }
            Case::AdsS => {
                let area = surface::weighted_area(p, m, &one, rule)?;
                let v = surface::weighted_volume(p, m, &one, rule)?;
                let shadow = project(p, m);
                let singular = rule.with_kind(RuleKind::OpenSingularLeft);
                let horizon_term = shadow.domain_integral_with(rule, &singular, |rho| {
                    1.0 / (rho.powi(n as i32 + 1) * m.lambda_big_raw(rho))
                })?;
                let mass = m.mass();
                let first = (nf + 1.0) * self.profile(ProfileKind::EtaHat)?.eval(v)?
                    + mass * (nf + 1.0) / 2.0 * horizon_term;
                let classical = ((nf + 1.0) * w.powf(1.0 / nf) * v
                    + w.powf((nf + 1.0) / nf) * mass)
                    .powf(2.0 * nf / (nf + 1.0));
                Ok((area * area, first * first + classical))
            }
            Case::ThmC | Case::Lem32 | Case::JensenStep => {
                let shadow = project(p, m);
                euclidean_sides(self, case, &shadow, rule)
            }
            _ => unreachable!("identity cases are handled separately"),
        }
    }

    fn identity(&self, case: Case, p: &RadialProfile) -> Result<DeficitReport> {
        let (m, d, rule) = (&self.manifold, &self.density, &self.rule);
        match case {
            Case::VolumeTransfer => transfer::check_volume_transfer(p, m, d, rule),
            Case::AreaTransfer => transfer::check_area_transfer(p, m, d, rule),
            Case::MinkowskiNormal => {
                transfer::check_minkowski_normal(p, m, &transfer::theta_grid(p, POINTWISE_GRID))
            }
            Case::UFromUhat => {
                transfer::u_from_uhat_check(p, m, &transfer::theta_grid(p, POINTWISE_GRID))
            }
            Case::McArea | Case::McVolume => {
                let (quad, (est, se)) = if case == Case::McArea {
                    (
                        surface::weighted_area(p, m, d, rule)?,
                        surface::weighted_area_mc(p, m, d, self.oracle)?,
                    )
                } else {
                    (
                        surface::weighted_volume(p, m, d, rule)?,
                        surface::weighted_volume_mc(p, m, d, self.oracle)?,
                    )
                };
                let mut r = DeficitReport::new(case.name(), quad, est);
                r.equality_expected = true;
                r.error_estimate = Some(se);
                r.pass = r.deficit.abs() <= 3.0 * se;
                if !r.pass {
                    r.status = Status::EqualityMissed;
                }
                Ok(r.note(format!(
                    "Monte Carlo: {} samples, seed {}, standard error {se:.3e}; pass iff within 3 standard errors",
                    self.oracle.samples, self.oracle.seed
                )))
            }
            _ => unreachable!("inequality cases are handled separately"),
        }
    }
}

fn euclidean_sides(
    v: &Verifier,
    case: Case,
    shadow: &EuclideanShadow,
    rule: &QuadratureRule,
) -> Result<(f64, f64)> {
    let m = shadow.manifold();
    let d = &v.density;
    match case {
        Case::ThmC => {
            let lhs = shadow.boundary_integral(rule, |sp| d.phi(sp.rho))?;
            // The Euclidean statement sees the whole star-shaped domain, inner ball included.
            let inner = crate::profiles::cumulative(m, d, 0.0, shadow.inner_radius(), rule)?;
            let vol = shadow.domain_integral(rule, |rho| d.phi(rho))? + inner;
            Ok((lhs, v.profile(ProfileKind::Xi)?.eval(vol)?))
        }
        Case::Lem32 => {
            let lhs = shadow.boundary_integral(rule, |sp| d.phi(sp.rho))?;
            let vol = shadow.domain_integral(rule, |rho| d.phi(rho))?;
            Ok((lhs, v.profile(ProfileKind::XiTilde)?.eval(vol)?))
        }
        Case::JensenStep => {
            let lhs = shadow.boundary_integral(rule, |sp| {
                d.phi(sp.rho) * (m.lambda_big_raw(sp.rho) * sp.u_hat).hypot(1.0)
            })?;
            let a = shadow.boundary_integral(rule, |sp| {
                d.phi(sp.rho) * m.lambda_big_raw(sp.rho) * sp.u_hat
            })?;
            let b = shadow.boundary_integral(rule, |sp| d.phi(sp.rho))?;
            Ok((lhs, a.hypot(b)))
        }
        _ => unreachable!(),
    }
}

/// Samples the structural conditions on `Λ` and the coupled condition on
/// `φ` on a grid over `(λ(a), λ(r_max))`.
fn warped_hypotheses(m: &WarpedManifold, d: &Density) -> Vec<Hypothesis> {
    const GRID: usize = 1000;
    let (lo, hi) = (m.lambda_at_a(), m.lambda_max());
    let big = |t: f64| m.lambda_big_raw(t);
    let big_prime = |t: f64| m.lambda_big_prime(t).unwrap_or(f64::INFINITY);
    let (mut min_prime, mut min_flux, mut min_coupled) =
        (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    for i in 0..GRID {
        let t = lo + (hi - lo) * (i as f64 + 0.5) / GRID as f64;
        let h = (1e-5 * t.max(1.0)).min(0.5 * (t - lo)).min(0.5 * (hi - t));
        let lp = big_prime(t);
        // (Λ' t)' and (Λ t)' by central differences
        let flux = ((t + h) * big_prime(t + h) - (t - h) * big_prime(t - h)) / (2.0 * h);
        let growth = lp * t + big(t);
        let (l1, l2) = d.log_derivatives(t);
        let coupled = l2 * big(t) * t + l1 * growth + flux;
        min_prime = min_prime.min(lp);
        min_flux = min_flux.min(flux);
        min_coupled = min_coupled.min(coupled);
    }
    let verdict = |ok: bool| if ok { "holds" } else { "fails" };
    let prime_ok = min_prime >= -1e-10;
    let flux_ok = min_flux >= -1e-8;
    let coupled_ok = min_coupled >= -1e-8;
    vec![
        Hypothesis {
            holds: prime_ok,
            text: format!("Lambda non-decreasing: {} (min Lambda' = {min_prime:.3e})", verdict(prime_ok)),
        },
        Hypothesis {
            holds: flux_ok,
            text: format!("(Lambda' t)' >= 0: {} (min = {min_flux:.3e})", verdict(flux_ok)),
        },
        Hypothesis {
            holds: coupled_ok,
            text: format!(
                "(log phi)'' Lambda t + (log phi)' (Lambda t)' + (Lambda' t)' >= 0: {} (min = {min_coupled:.3e})",
                verdict(coupled_ok)
            ),
        },
    ]
}

fn verifier(
    manifold: &WarpedManifold,
    density: &Density,
    rule: &QuadratureRule,
) -> Result<Verifier> {
    Verifier::new(manifold.clone(), density.clone(), rule.clone())
}

/// One of the hyperbolic-space inequalities on a prepared profile.
pub fn check_hyperbolic(
    case: Case,
    profile: &RadialProfile,
    manifold: &WarpedManifold,
    density: &Density,
    rule: &QuadratureRule,
) -> Result<DeficitReport> {
    if !case.is_hyperbolic() {
        return Err(Error::Config(format!(
            "{case} is not a hyperbolic-space case"
        )));
    }
    verifier(manifold, density, rule)?.evaluate(case, profile, false)
}

/// The warped-product inequality against `ψ̃`.
pub fn check_warped(
    profile: &RadialProfile,
    manifold: &WarpedManifold,
    density: &Density,
    rule: &QuadratureRule,
) -> Result<DeficitReport> {
    verifier(manifold, density, rule)?.evaluate(Case::Warped, profile, false)
}

/// The anti-de Sitter-Schwarzschild inequality (unit density).
pub fn check_adss(
    profile: &RadialProfile,
    manifold: &WarpedManifold,
    rule: &QuadratureRule,
) -> Result<DeficitReport> {
    let one = Density::constant(manifold.lambda_max())?;
    verifier(manifold, &one, rule)?.evaluate(Case::AdsS, profile, false)
}

/// Euclidean statements on a shadow: the weighted inequality, its annulus form,
/// and the Jensen step.
pub fn check_euclidean(
    case: Case,
    shadow: &EuclideanShadow,
    density: &Density,
    rule: &QuadratureRule,
) -> Result<DeficitReport> {
    if !matches!(case, Case::ThmC | Case::Lem32 | Case::JensenStep) {
        return Err(Error::Config(format!(
            "{case} is not a Euclidean shadow case"
        )));
    }
    verifier(shadow.manifold(), density, rule)?.evaluate(case, shadow.profile(), false)
}

#[cfg(test)]
mod tests;
