//! Numerical verification of weighted isoperimetric inequalities for
//! star-shaped hypersurfaces in rotationally symmetric warped products
//! `dr² + λ(r)² g_{S^n}`.
//!
//! The crate is organised bottom-up:
//!
//! * [`quadrature`]: composite Gauss–Legendre rules and a seeded Monte Carlo oracle.
//! * [`manifold`] and [`density`]: the ambient space and the radial weight `φ`.
//! * [`surface`]: radial graphs and their weighted area and volume.
//! * [`transfer`]: the Euclidean shadow of a radial graph.
//! * [`profiles`]: tabulated isoperimetric profile functions and their inverses.
//! * [`verify`]: deficit reports, sweeps and deficit minimisation.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod density;
pub mod error;
pub mod manifold;
pub mod profiles;
pub mod quadrature;
pub mod report;
pub mod surface;
pub mod transfer;
pub mod verify;

pub use density::{Density, DensityKind, LogConvexityCertificate};
pub use error::{Error, Result};
pub use manifold::{sphere_area, ManifoldKind, WarpedManifold};
pub use profiles::{ProfileFunction, ProfileKind};
pub use quadrature::{McOracle, QuadratureRule, RuleKind};
pub use report::{DeficitReport, Status, Tolerances};
pub use surface::{Generator, RadialProfile};
pub use transfer::EuclideanShadow;
pub use verify::{Case, Verifier};
