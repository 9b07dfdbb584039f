use std::f64::consts::{E, PI};

use super::*;
use crate::density::DensityKind;

fn hyp(n: usize) -> WarpedManifold {
    WarpedManifold::hyperbolic(n, 3.0).unwrap()
}

fn verifier_for(m: &WarpedManifold, kind: DensityKind) -> Verifier {
    let d = Density::new(kind, m.lambda_max()).unwrap();
    Verifier::new(m.clone(), d, QuadratureRule::default()).unwrap()
}

fn ball(r0: f64) -> Generator {
    Generator::CenteredBall { r0 }
}

fn perturbed(r0: f64, eps2: f64) -> Generator {
    Generator::Perturbed {
        r0,
        eps: vec![0.0, eps2],
    }
}

fn slice_at_rho(m: &WarpedManifold, rho0: f64) -> Generator {
    Generator::Slice { r0: 0.0 }
        .with_param("rho0", rho0, m)
        .unwrap()
}

#[test]
fn cor_cosh_ball_matches_closed_form() {
    let v = verifier_for(&hyp(1), DensityKind::Constant);
    let r = v.check(Case::CorCosh, &ball(1.0));
    let s = 1.0f64.sinh();
    let area = 2.0 * PI * 1.0f64.cosh() * s;
    let vol = PI * s * s;
    let rhs = ((2.0 * vol).powi(2) + 2.0 * PI * 2.0 * vol).sqrt();
    assert!((r.lhs - area).abs() < 1e-12 * area);
    assert!((r.rhs - rhs).abs() < 1e-12 * rhs);
    assert!((rhs - area).abs() < 1e-12 * area, "closed forms agree");
    assert!(r.rel_deficit.abs() < 1e-9);
    assert!(r.pass && r.equality_expected && r.status == Status::Ok);
}

#[test]
fn cor_cosh_minus_u_ball_is_exact() {
    let v = verifier_for(&hyp(1), DensityKind::Constant);
    let r = v.check(Case::CorCoshMinusU, &ball(1.0));
    let oracle = 2.0 * PI * (-1.0f64).exp() * 1.0f64.sinh();
    assert!((r.lhs - oracle).abs() < 1e-12 * oracle);
    assert!((r.rhs - oracle).abs() < 1e-9 * oracle);
    assert!(r.pass, "{r:?}");
}

#[test]
fn main_inequality_strict_under_perturbation() {
    let v = verifier_for(&hyp(1), DensityKind::ExpQuadratic { c: 0.5 });
    let r = v.check(Case::MainThm, &perturbed(1.0, 0.1));
    assert!(r.deficit > 0.0, "{r:?}");
    assert!(r.pass && !r.equality_expected && r.status == Status::Ok);
}

#[test]
fn ball_equality_matrix() {
    let kinds = [
        DensityKind::Constant,
        DensityKind::CoshLinear { c: 1.0 },
        DensityKind::ExpQuadratic { c: 0.25 },
    ];
    for n in 1..=3 {
        let m = hyp(n);
        for kind in kinds.clone() {
            let v = verifier_for(&m, kind.clone());
            for r0 in [0.5, 1.0, 2.0] {
                for case in [
                    Case::MainThm,
                    Case::CorCosh,
                    Case::CorH0,
                    Case::CorCoshMinusU,
                    Case::LemSym,
                    Case::LemVolW,
                ] {
                    let r = v.check(case, &ball(r0));
                    assert!(r.pass, "{case} n={n} r0={r0} {kind:?}: {r:?}");
                    assert!(
                        r.rel_deficit.abs() < 1e-8,
                        "{case} n={n} r0={r0}: {}",
                        r.rel_deficit
                    );
                }
            }
        }
    }
}

#[test]
fn off_center_ball_is_strict() {
    let m = hyp(2);
    let g = Generator::OffCenterBall {
        radius: 1.0,
        offset: 0.3,
    };
    for kind in [DensityKind::Constant, DensityKind::ExpQuadratic { c: 0.5 }] {
        let v = verifier_for(&m, kind);
        for case in [Case::MainThm, Case::CorCosh] {
            let r = v.check(case, &g);
            assert!(r.pass && r.deficit > 1e-4 * r.lhs, "{case}: {r:?}");
        }
    }
    let v = verifier_for(&m, DensityKind::ExpQuadratic { c: 0.5 });
    for case in [Case::LemSym, Case::LemVolW] {
        let r = v.check(case, &g);
        assert!(r.pass && r.rel_deficit > 1e-5, "{case}: {r:?}");
    }
}

#[test]
fn warped_reductions() {
    let v = verifier_for(&hyp(1), DensityKind::Constant);
    let w = v.check(Case::Warped, &ball(1.0));
    let main = v.check(Case::MainThm, &ball(1.0));
    assert!(w.pass && w.equality_expected);
    assert!((w.lhs - main.lhs).abs() < 1e-12 * main.lhs);
    assert!((w.rhs - main.rhs).abs() < 1e-10 * main.rhs);

    let e = WarpedManifold::euclidean(2, 3.0).unwrap();
    let v = verifier_for(&e, DensityKind::Constant);
    let r = v.check(Case::Warped, &ball(1.0));
    assert!((r.lhs - 4.0 * PI).abs() < 1e-12);
    assert!((r.rhs - 4.0 * PI).abs() < 1e-9);
    assert!(r.pass && r.status == Status::Ok, "{r:?}");

    let v = verifier_for(&hyp(2), DensityKind::CoshLinear { c: 1.0 });
    let r = v.check(Case::Warped, &perturbed(1.0, 0.1));
    assert!(r.deficit > 0.0 && r.status == Status::Ok, "{r:?}");
}

#[test]
fn warped_flags_ads_schwarzschild_hypotheses() {
    let m = WarpedManifold::ads_schwarzschild(2, 1.0, 3.0).unwrap();
    let v = verifier_for(&m, DensityKind::Constant);
    let r = v.check(Case::Warped, &slice_at_rho(&m, 2.0));
    assert_eq!(r.status, Status::HypothesisViolated, "{r:?}");
    assert!(r.hypotheses.iter().any(|h| h.contains("fails")));
}

#[test]
fn power_density_violates_log_convexity() {
    let v = verifier_for(&hyp(1), DensityKind::PowerQuadratic { p: 1.0 });
    let r = v.check(Case::MainThm, &ball(1.0));
    assert_eq!(r.status, Status::HypothesisViolated);
    assert!(!v.certificate().valid);
}

#[test]
fn ads_slices() {
    let m = WarpedManifold::ads_schwarzschild(2, 1.0, 3.0).unwrap();
    let v = verifier_for(&m, DensityKind::Constant);

    let r = v.check(Case::AdsS, &slice_at_rho(&m, 2.0));
    // λ' at ρ = 2 is sqrt(1 + 4 - 1/2), the slice area 16π.
    let oracle = (16.0 * PI * 4.5f64.sqrt()).powi(2);
    assert!(
        (r.lhs - oracle).abs() < 1e-10 * oracle,
        "{} vs {oracle}",
        r.lhs
    );
    assert!(r.rel_deficit.abs() < 1e-6 && r.pass, "{r:?}");

    let r = v.check(Case::AdsS, &slice_at_rho(&m, 1.0));
    let oracle = (4.0 * PI).powi(2);
    assert!((r.lhs - oracle).abs() < 1e-10 * oracle);
    assert!((r.rhs - oracle).abs() < 1e-10 * oracle);
    assert!(r.pass);

    for rho0 in [1.5, 3.0] {
        let r = v.check(Case::AdsS, &slice_at_rho(&m, rho0));
        assert!(r.pass && r.rel_deficit.abs() < 1e-6, "rho0={rho0}: {r:?}");
    }

    let r0 = m.rho_to_r(2.0).unwrap();
    let r = v.check(Case::AdsS, &perturbed(r0, 0.1));
    assert!(r.deficit > 0.0 && r.pass, "{r:?}");
}

#[test]
fn ads_needs_mass() {
    let v = verifier_for(&hyp(2), DensityKind::Constant);
    let r = v.check(Case::AdsS, &ball(1.0));
    assert_eq!(r.status, Status::Error);
    let e = WarpedManifold::euclidean(2, 3.0).unwrap();
    let v = verifier_for(&e, DensityKind::Constant);
    assert_eq!(v.check(Case::MainThm, &ball(1.0)).status, Status::Error);
}

#[test]
fn euclidean_statements() {
    let e = WarpedManifold::euclidean(2, 3.0).unwrap();
    let v = verifier_for(&e, DensityKind::Constant);
    let r = v.check(Case::ThmC, &ball(1.0));
    assert!((r.lhs - 4.0 * PI).abs() < 1e-12 && (r.rhs - 4.0 * PI).abs() < 1e-9);
    assert!(r.pass && r.equality_expected);

    let m = hyp(2);
    let v = verifier_for(&m, DensityKind::ExpQuadratic { c: 0.25 });
    for r0 in [0.5, 1.0, 2.0] {
        let r = v.check(Case::JensenStep, &ball(r0));
        assert!(r.pass && r.rel_deficit.abs() < 1e-12, "{r:?}");
    }
    let r = v.check(Case::Lem32, &perturbed(1.0, 0.1));
    assert!(r.deficit > 0.0 && r.pass && !r.equality_expected, "{r:?}");

    let d = Density::new(DensityKind::ExpQuadratic { c: 0.25 }, m.lambda_max()).unwrap();
    let shadow = project(&make_profile(&ball(1.0), &m).unwrap(), &m);
    let r = check_euclidean(Case::ThmC, &shadow, &d, &QuadratureRule::default()).unwrap();
    assert!(r.pass && r.rel_deficit.abs() < 1e-8);
    assert!(check_euclidean(Case::MainThm, &shadow, &d, &QuadratureRule::default()).is_err());
}

#[test]
fn free_functions_agree_with_verifier() {
    let m = hyp(2);
    let d = Density::new(DensityKind::CoshLinear { c: 1.0 }, m.lambda_max()).unwrap();
    let rule = QuadratureRule::default();
    let p = make_profile(&perturbed(1.0, 0.05), &m).unwrap();
    let v = Verifier::new(m.clone(), d.clone(), rule.clone()).unwrap();
    let a = check_hyperbolic(Case::MainThm, &p, &m, &d, &rule).unwrap();
    assert_eq!(a, v.check_profile(Case::MainThm, &p));
    assert!(check_hyperbolic(Case::Warped, &p, &m, &d, &rule).is_err());
    let w = check_warped(&p, &m, &d, &rule).unwrap();
    assert_eq!(w, v.check_profile(Case::Warped, &p));

    let ads = WarpedManifold::ads_schwarzschild(2, 1.0, 3.0).unwrap();
    let s = make_profile(&slice_at_rho(&ads, 2.0), &ads).unwrap();
    assert!(check_adss(&s, &ads, &rule).unwrap().pass);
}

#[test]
fn chain_holds_link_by_link() {
    let v = verifier_for(&hyp(2), DensityKind::ExpQuadratic { c: 0.5 });
    for g in [
        perturbed(1.0, 0.1),
        Generator::OffCenterBall {
            radius: 1.0,
            offset: 0.3,
        },
    ] {
        let chain = v.check_chain(&g);
        assert_eq!(chain.len(), 4);
        for r in &chain {
            assert!(r.pass && r.deficit >= 0.0, "{r:?}");
        }
    }
}

#[test]
fn scaling_density_scales_sides() {
    let m = hyp(2);
    let d = Density::new(DensityKind::CoshLinear { c: 1.0 }, m.lambda_max()).unwrap();
    let v1 = Verifier::new(m.clone(), d.clone(), QuadratureRule::default()).unwrap();
    let v2 = Verifier::new(m.clone(), d.scaled(2.0).unwrap(), QuadratureRule::default()).unwrap();
    for g in [ball(1.0), perturbed(1.0, 0.1)] {
        let a = v1.check(Case::MainThm, &g);
        let b = v2.check(Case::MainThm, &g);
        assert_eq!(a.pass, b.pass);
        assert!((b.lhs / a.lhs - 2.0).abs() < 1e-12);
        assert!((b.rhs / a.rhs - 2.0).abs() < 1e-10);
        assert_eq!(a.deficit.signum(), b.deficit.signum());
    }
}

#[test]
fn identities_and_oracles() {
    let m = hyp(2);
    let v =
        verifier_for(&m, DensityKind::CoshLinear { c: 1.0 }).with_oracle(McOracle::new(200_000, 7));
    let g = perturbed(1.0, 0.1);
    for case in [
        Case::VolumeTransfer,
        Case::AreaTransfer,
        Case::MinkowskiNormal,
        Case::UFromUhat,
        Case::McArea,
        Case::McVolume,
    ] {
        let r = v.check(case, &g);
        assert!(r.pass, "{case}: {r:?}");
    }
}

#[test]
fn error_estimate_is_small_for_smooth_profiles() {
    let v = verifier_for(&hyp(2), DensityKind::Constant).with_error_estimate(true);
    let r = v.check(Case::MainThm, &perturbed(1.0, 0.1));
    let est = r.error_estimate.unwrap();
    assert!(est < 1e-8 * r.lhs, "{est}");
}

#[test]
fn invalid_generator_becomes_error_report() {
    let v = verifier_for(&hyp(2), DensityKind::Constant);
    let r = v.check(Case::MainThm, &ball(10.0));
    assert_eq!(r.status, Status::Error);
    assert!(!r.pass && r.lhs.is_nan());
}

#[test]
fn case_names_round_trip() {
    for c in Case::ALL {
        assert_eq!(c.to_string().parse::<Case>().unwrap(), c);
    }
    assert!("corcosh".parse::<Case>().is_ok());
    assert!("Nope".parse::<Case>().is_err());
}

#[test]
fn search_recovers_the_ball() {
    let v = verifier_for(&hyp(1), DensityKind::Constant);
    let res = minimize_deficit(&v, Case::CorCosh, &[2], &[1.0, 0.1], 200).unwrap();
    assert!(res.evaluations <= 200);
    assert_eq!(res.trace.len(), res.evaluations);
    assert!(res.best_deficit < 1e-6, "{res:?}");
    assert!(res.best[1].abs() < 1e-3, "{:?}", res.best);

    let one = minimize_deficit(&v, Case::CorCosh, &[2], &[1.0, 0.1], 1).unwrap();
    assert_eq!(one.best, vec![1.0, 0.1]);
    assert_eq!(one.evaluations, 1);

    assert!(minimize_deficit(&v, Case::CorCosh, &[2], &[1.0], 10).is_err());
    assert!(minimize_deficit(&v, Case::CorCosh, &[2], &[1.0, 0.1], 0).is_err());
}

#[test]
fn search_main_inequality() {
    let v = verifier_for(&hyp(1), DensityKind::ExpQuadratic { c: 0.5 });
    let res = minimize_deficit(&v, Case::MainThm, &[2], &[1.0, 0.2], 400).unwrap();
    assert!(res.best_deficit < 1e-5, "{res:?}");
    assert!(res.best[1].abs() < 1e-2);
}

#[test]
fn search_records_failures_and_continues() {
    let v = verifier_for(&hyp(1), DensityKind::Constant);
    // Starting next to r_max pushes the simplex outside the manifold.
    let res = minimize_deficit(&v, Case::CorCosh, &[2], &[2.4, 0.2], 30).unwrap();
    assert!(res
        .trace
        .iter()
        .any(|t| t.error.is_some() && t.value == search::PENALTY));
    assert!(res.best_deficit < search::PENALTY);
}

#[test]
fn sweeps() {
    let v = verifier_for(&hyp(1), DensityKind::Constant);
    let reports = sweep(&v, Case::CorCosh, &ball(1.0), "r0", &[0.5, 1.0, 2.0]);
    assert_eq!(reports.len(), 3);
    for (r, x) in reports.iter().zip([0.5, 1.0, 2.0]) {
        assert!(r.pass && r.equality_expected);
        assert_eq!(r.sweep.as_ref().unwrap().value, x);
    }
    assert!(sweep(&v, Case::CorCosh, &ball(1.0), "r0", &[]).is_empty());

    let v = verifier_for(&hyp(1), DensityKind::ExpQuadratic { c: 0.5 });
    let reports = sweep(
        &v,
        Case::MainThm,
        &perturbed(1.0, 0.0),
        "eps2",
        &[0.0, 0.05, 0.1],
    );
    assert!(reports[0].rel_deficit.abs() < 1e-8);
    assert!(reports.iter().all(|r| r.pass && r.deficit >= -1e-8 * r.lhs));

    let bad = sweep(&v, Case::MainThm, &ball(1.0), "r0", &[1.0, 50.0, E]);
    assert_eq!(bad[1].status, Status::Error);
    assert!(bad[0].pass && bad[2].pass);
    let bad = sweep(&v, Case::MainThm, &ball(1.0), "offset", &[0.1]);
    assert_eq!(bad[0].status, Status::Error);
    assert_eq!(bad[0].sweep.as_ref().unwrap().parameter, "offset");
}
