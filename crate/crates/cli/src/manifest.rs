//! TOML manifests: schema, validation and conversion to core types.
//!
//! Every error carries the line of the offending key so that a manifest can
//! be fixed without guessing.

use std::fmt;
use std::ops::Range;

use serde::Deserialize;
use sha2::{Digest, Sha256};
use toml::Spanned;
use weighted_iso::{
    Case, Density, DensityKind, Generator, McOracle, QuadratureRule, Tolerances, WarpedManifold,
};

/// A manifest problem located at `line` (1-based; 0 when not tied to a line).
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ManifestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            0 => write!(f, "{}", self.message),
            _ => write!(
                f,
                "line {}, column {}: {}",
                self.line, self.column, self.message
            ),
        }
    }
}

impl std::error::Error for ManifestError {}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    manifold: Spanned<RawManifold>,
    density: Option<Spanned<RawDensity>>,
    surface: Option<Spanned<RawSurface>>,
    #[serde(default)]
    quadrature: Option<RawQuadrature>,
    #[serde(default)]
    tolerances: Option<RawTolerances>,
    #[serde(default)]
    checks: Vec<RawCheck>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum ManifoldName {
    Hyperbolic,
    Euclidean,
    AdsSchwarzschild,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifold {
    kind: ManifoldName,
    n: Spanned<usize>,
    m: Option<Spanned<f64>>,
    r_max: Spanned<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum DensityName {
    Constant,
    ExpQuadratic,
    CoshLinear,
    PowerQuadratic,
    Product,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDensity {
    kind: DensityName,
    c: Option<f64>,
    p: Option<f64>,
    scale: Option<Spanned<f64>>,
    factors: Option<Vec<Spanned<RawFactor>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFactor {
    kind: DensityName,
    c: Option<f64>,
    p: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum GeneratorName {
    CenteredBall,
    OffCenterBall,
    Perturbed,
    Slice,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSurface {
    generator: GeneratorName,
    r0: Option<f64>,
    rho0: Option<f64>,
    eps: Option<Vec<f64>>,
    radius: Option<f64>,
    offset: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuadrature {
    order: Spanned<usize>,
    panels: Spanned<usize>,
    mc_samples: Option<Spanned<u64>>,
    seed: Option<u64>,
    #[serde(default)]
    error_estimate: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    equality: Spanned<f64>,
    inequality: Spanned<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCheck {
    case: Spanned<String>,
    sweep: Option<Spanned<RawSweep>>,
    search: Option<Spanned<RawSearch>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    parameter: String,
    values: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSearch {
    budget: Spanned<usize>,
    modes: Option<Vec<usize>>,
    start: Option<Vec<f64>>,
}

/// What to do for one `[[checks]]` entry.
#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Single,
    Sweep {
        parameter: String,
        values: Vec<f64>,
    },
    Search {
        budget: usize,
        modes: Vec<usize>,
        start: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub case: Case,
    pub action: Action,
}

/// A validated manifest.
#[derive(Debug, Clone)]
pub struct Manifest {
    pub manifold: WarpedManifold,
    pub density: Density,
    pub generator: Option<Generator>,
    pub rule: QuadratureRule,
    pub oracle: McOracle,
    pub error_estimate: bool,
    pub tolerances: Tolerances,
    pub checks: Vec<Check>,
    /// Lowercase hex SHA-256 of the manifest bytes.
    pub hash: String,
}

struct Locator<'a>(&'a str);

impl Locator<'_> {
    fn at(&self, span: Range<usize>, message: impl Into<String>) -> ManifestError {
        let before = &self.0[..span.start.min(self.0.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        ManifestError {
            line,
            column,
            message: message.into(),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Self, ManifestError> {
        let raw: Raw = toml::from_str(text).map_err(|e| match e.span() {
            Some(span) => Locator(text).at(span, e.message().to_string()),
            None => ManifestError {
                line: 0,
                column: 0,
                message: e.message().to_string(),
            },
        })?;
        let loc = Locator(text);

        let manifold = build_manifold(&loc, &raw.manifold)?;
        let support = manifold.lambda_max();
        let density = match &raw.density {
            Some(d) => build_density(&loc, d, support)?,
            None => Density::constant(support).expect("positive support"),
        };

        let (rule, oracle, error_estimate) = match &raw.quadrature {
            Some(q) => {
                for field in [&q.order, &q.panels] {
                    if *field.get_ref() == 0 {
                        return Err(loc.at(field.span(), "must be a positive integer"));
                    }
                }
                let rule = QuadratureRule::gauss(*q.order.get_ref(), *q.panels.get_ref())
                    .map_err(|e| loc.at(q.order.span(), e.to_string()))?;
                let samples = match &q.mc_samples {
                    Some(s) if *s.get_ref() == 0 => {
                        return Err(loc.at(s.span(), "must be a positive integer"))
                    }
                    Some(s) => *s.get_ref(),
                    None => 1_000_000,
                };
                (
                    rule,
                    McOracle::new(samples, q.seed.unwrap_or(42)),
                    q.error_estimate,
                )
            }
            None => (
                QuadratureRule::default(),
                McOracle::new(1_000_000, 42),
                false,
            ),
        };

        let tolerances = match &raw.tolerances {
            Some(t) => {
                for field in [&t.equality, &t.inequality] {
                    let v = *field.get_ref();
                    if !(v > 0.0 && v.is_finite()) {
                        return Err(loc.at(
                            field.span(),
                            format!("tolerance must be positive and finite, got {v}"),
                        ));
                    }
                }
                Tolerances {
                    equality: *t.equality.get_ref(),
                    inequality: *t.inequality.get_ref(),
                }
            }
            None => Tolerances::default(),
        };

        let generator = match &raw.surface {
            Some(s) => Some(build_generator(&loc, s, &manifold)?),
            None => None,
        };

        let mut checks = Vec::with_capacity(raw.checks.len());
        for c in &raw.checks {
            let case: Case = c
                .case
                .get_ref()
                .parse()
                .map_err(|e: weighted_iso::Error| loc.at(c.case.span(), e.to_string()))?;
            let Some(g) = &generator else {
                return Err(loc.at(c.case.span(), "checks need a [surface] table"));
            };
            let action = match (&c.sweep, &c.search) {
                (Some(_), Some(s)) => {
                    return Err(loc.at(
                        s.span(),
                        "a check takes either `sweep` or `search`, not both",
                    ))
                }
                (Some(s), None) => {
                    let sw = s.get_ref();
                    if let Some(bad) = sw.values.iter().find(|v| !v.is_finite()) {
                        return Err(loc.at(s.span(), format!("sweep value {bad} is not finite")));
                    }
                    if let Some(&v) = sw.values.first() {
                        g.with_param(&sw.parameter, v, &manifold)
                            .map_err(|e| loc.at(s.span(), e.to_string()))?;
                    }
                    Action::Sweep {
                        parameter: sw.parameter.clone(),
                        values: sw.values.clone(),
                    }
                }
                (None, Some(s)) => build_search(&loc, s, g)?,
                (None, None) => Action::Single,
            };
            checks.push(Check { case, action });
        }

        Ok(Self {
            manifold,
            density,
            generator,
            rule,
            oracle,
            error_estimate,
            tolerances,
            checks,
            hash: sha256_hex(text.as_bytes()),
        })
    }
}

fn build_manifold(
    loc: &Locator,
    raw: &Spanned<RawManifold>,
) -> Result<WarpedManifold, ManifestError> {
    let m = raw.get_ref();
    let n = *m.n.get_ref();
    if n == 0 {
        return Err(loc.at(m.n.span(), "n must be at least 1"));
    }
    let r_max = *m.r_max.get_ref();
    if !(r_max > 0.0 && r_max.is_finite()) {
        return Err(loc.at(
            m.r_max.span(),
            format!("r_max must be positive and finite, got {r_max}"),
        ));
    }
    let built = match (&m.kind, &m.m) {
        (ManifoldName::AdsSchwarzschild, Some(mass)) => {
            let v = *mass.get_ref();
            if !(v > 0.0 && v.is_finite()) {
                return Err(loc.at(mass.span(), format!("mass must be positive, got {v}")));
            }
            WarpedManifold::ads_schwarzschild(n, v, r_max)
        }
        (ManifoldName::AdsSchwarzschild, None) => {
            return Err(loc.at(raw.span(), "anti-de Sitter-Schwarzschild needs a mass `m`"))
        }
        (_, Some(mass)) => return Err(loc.at(mass.span(), "`m` only applies to ads-schwarzschild")),
        (ManifoldName::Hyperbolic, None) => WarpedManifold::hyperbolic(n, r_max),
        (ManifoldName::Euclidean, None) => WarpedManifold::euclidean(n, r_max),
    };
    built.map_err(|e| loc.at(raw.span(), e.to_string()))
}

fn density_kind(name: DensityName, c: Option<f64>, p: Option<f64>) -> Result<DensityKind, String> {
    let unused = |what: &str| Err(format!("`{what}` does not apply to this density"));
    match name {
        DensityName::Constant | DensityName::Product => {
            if c.is_some() {
                return unused("c");
            }
            if p.is_some() {
                return unused("p");
            }
            Ok(DensityKind::Constant)
        }
        DensityName::ExpQuadratic | DensityName::CoshLinear => {
            if p.is_some() {
                return unused("p");
            }
            let c = c.ok_or("this density needs `c`")?;
            Ok(match name {
                DensityName::ExpQuadratic => DensityKind::ExpQuadratic { c },
                _ => DensityKind::CoshLinear { c },
            })
        }
        DensityName::PowerQuadratic => {
            if c.is_some() {
                return unused("c");
            }
            Ok(DensityKind::PowerQuadratic {
                p: p.ok_or("this density needs `p`")?,
            })
        }
    }
}

fn build_density(
    loc: &Locator,
    raw: &Spanned<RawDensity>,
    support: f64,
) -> Result<Density, ManifestError> {
    let d = raw.get_ref();
    let kind = match d.kind {
        DensityName::Product => {
            if d.c.is_some() || d.p.is_some() {
                return Err(loc.at(
                    raw.span(),
                    "a product density takes its parameters from `factors`",
                ));
            }
            let factors = d
                .factors
                .as_ref()
                .filter(|f| !f.is_empty())
                .ok_or_else(|| {
                    loc.at(
                        raw.span(),
                        "a product density needs a non-empty `factors` list",
                    )
                })?;
            let mut kinds = Vec::with_capacity(factors.len());
            for f in factors {
                let r = f.get_ref();
                if matches!(r.kind, DensityName::Product) {
                    return Err(loc.at(f.span(), "factors cannot themselves be products"));
                }
                kinds.push(density_kind(r.kind, r.c, r.p).map_err(|m| loc.at(f.span(), m))?);
            }
            DensityKind::Product(kinds)
        }
        name => {
            if d.factors.is_some() {
                return Err(loc.at(raw.span(), "`factors` only applies to product densities"));
            }
            density_kind(name, d.c, d.p).map_err(|m| loc.at(raw.span(), m))?
        }
    };
    let mut density = Density::new(kind, support).map_err(|e| loc.at(raw.span(), e.to_string()))?;
    if let Some(s) = &d.scale {
        density = density
            .scaled(*s.get_ref())
            .map_err(|e| loc.at(s.span(), e.to_string()))?;
    }
    Ok(density)
}

fn build_generator(
    loc: &Locator,
    raw: &Spanned<RawSurface>,
    m: &WarpedManifold,
) -> Result<Generator, ManifestError> {
    let s = raw.get_ref();
    let err = |msg: String| loc.at(raw.span(), msg);
    let reject = |present: bool, key: &str| -> Result<(), ManifestError> {
        if present {
            Err(err(format!("`{key}` does not apply to this generator")))
        } else {
            Ok(())
        }
    };
    let radial = |s: &RawSurface| -> Result<f64, ManifestError> {
        match (s.r0, s.rho0) {
            (Some(r0), None) => Ok(r0),
            (None, Some(rho0)) => m.rho_to_r(rho0).map_err(|e| err(e.to_string())),
            (Some(_), Some(_)) => Err(err("give either `r0` or `rho0`, not both".into())),
            (None, None) => Err(err("this generator needs `r0` or `rho0`".into())),
        }
    };
    let g = match s.generator {
        GeneratorName::CenteredBall | GeneratorName::Slice => {
            reject(s.eps.is_some(), "eps")?;
            reject(s.radius.is_some(), "radius")?;
            reject(s.offset.is_some(), "offset")?;
            let r0 = radial(s)?;
            match s.generator {
                GeneratorName::Slice => Generator::Slice { r0 },
                _ => Generator::CenteredBall { r0 },
            }
        }
        GeneratorName::Perturbed => {
            reject(s.radius.is_some(), "radius")?;
            reject(s.offset.is_some(), "offset")?;
            Generator::Perturbed {
                r0: radial(s)?,
                eps: s.eps.clone().unwrap_or_default(),
            }
        }
        GeneratorName::OffCenterBall => {
            reject(s.r0.is_some(), "r0")?;
            reject(s.rho0.is_some(), "rho0")?;
            reject(s.eps.is_some(), "eps")?;
            Generator::OffCenterBall {
                radius: s
                    .radius
                    .ok_or_else(|| err("off-center-ball needs `radius`".into()))?,
                offset: s
                    .offset
                    .ok_or_else(|| err("off-center-ball needs `offset`".into()))?,
            }
        }
    };
    weighted_iso::surface::make_profile(&g, m).map_err(|e| err(e.to_string()))?;
    Ok(g)
}

fn build_search(
    loc: &Locator,
    raw: &Spanned<RawSearch>,
    g: &Generator,
) -> Result<Action, ManifestError> {
    let s = raw.get_ref();
    let budget = *s.budget.get_ref();
    if budget == 0 {
        return Err(loc.at(s.budget.span(), "budget must be at least 1"));
    }
    let modes = s.modes.clone().unwrap_or_else(|| vec![2]);
    if modes.is_empty() || modes.contains(&0) {
        return Err(loc.at(
            raw.span(),
            "`modes` must be a non-empty list of positive integers",
        ));
    }
    let start = match &s.start {
        Some(start) => start.clone(),
        None => {
            let (r0, eps): (f64, &[f64]) = match g {
                Generator::CenteredBall { r0 } | Generator::Slice { r0 } => (*r0, &[]),
                Generator::Perturbed { r0, eps } => (*r0, eps),
                Generator::OffCenterBall { .. } => {
                    return Err(loc.at(
                        raw.span(),
                        "search needs a centered or perturbed surface, or an explicit `start`",
                    ))
                }
            };
            std::iter::once(r0)
                .chain(
                    modes
                        .iter()
                        .map(|&k| eps.get(k - 1).copied().unwrap_or(0.0)),
                )
                .collect()
        }
    };
    if start.len() != modes.len() + 1 {
        return Err(loc.at(
            raw.span(),
            format!(
                "`start` needs {} values (r0 and one per mode), got {}",
                modes.len() + 1,
                start.len()
            ),
        ));
    }
    Ok(Action::Search {
        budget,
        modes,
        start,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_of(text: &str, prefix: &str) -> usize {
        text.lines().position(|l| l.starts_with(prefix)).unwrap() + 1
    }

    const BASE: &str = r#"
[manifold]
kind = "hyperbolic"
n = 1
r_max = 3.0

[density]
kind = "constant"

[surface]
generator = "centered-ball"
r0 = 1.0

[[checks]]
case = "CorCosh"
"#;

    #[test]
    fn parses_minimal_manifest() {
        let m = Manifest::parse(BASE).unwrap();
        assert_eq!(
            m.checks,
            vec![Check {
                case: Case::CorCosh,
                action: Action::Single
            }]
        );
        assert_eq!(m.generator, Some(Generator::CenteredBall { r0: 1.0 }));
        assert_eq!(m.rule, QuadratureRule::default());
        assert_eq!(m.hash.len(), 64);
        assert_eq!(m.oracle, McOracle::new(1_000_000, 42));
    }

    #[test]
    fn unknown_keys_are_rejected_with_line() {
        let text = BASE.replace("r0 = 1.0", "r0 = 1.0\nradiuss = 2.0");
        let e = Manifest::parse(&text).unwrap_err();
        assert_eq!(e.line, line_of(&text, "radiuss"), "{e}");
        assert!(e.message.contains("radiuss"), "{e}");
    }

    #[test]
    fn negative_order_points_at_its_line() {
        let text = format!("{BASE}\n[quadrature]\norder = -4\npanels = 4\n");
        let e = Manifest::parse(&text).unwrap_err();
        let line = line_of(&text, "order");
        assert_eq!(e.line, line, "{e}");
        let text = format!("{BASE}\n[quadrature]\norder = 0\npanels = 4\n");
        assert_eq!(Manifest::parse(&text).unwrap_err().line, line);
    }

    #[test]
    fn semantic_errors_are_located() {
        let text = BASE.replace("case = \"CorCosh\"", "case = \"Nope\"");
        let e = Manifest::parse(&text).unwrap_err();
        assert_eq!(e.line, line_of(&text, "case"));
        assert!(e.message.contains("unknown case"));

        let text = BASE.replace("r0 = 1.0", "r0 = 5.0");
        assert!(Manifest::parse(&text)
            .unwrap_err()
            .message
            .contains("outside"));

        let text = BASE.replace("kind = \"constant\"", "kind = \"exp-quadratic\"");
        let e = Manifest::parse(&text).unwrap_err();
        assert!(e.message.contains("needs `c`"), "{e}");
        assert_eq!(e.line, line_of(&text, "[density]"));

        let text = BASE.replace("n = 1", "n = 1\nm = 1.0");
        assert!(Manifest::parse(&text).unwrap_err().message.contains("`m`"));
    }

    #[test]
    fn sweeps_and_searches() {
        let text = format!(
            "{BASE}\n[checks.sweep]\nparameter = \"r0\"\nvalues = [0.5, 1.0]\n\n[[checks]]\ncase = \"MainThm\"\n[checks.search]\nbudget = 10\n"
        );
        let m = Manifest::parse(&text).unwrap();
        assert_eq!(
            m.checks[0].action,
            Action::Sweep {
                parameter: "r0".into(),
                values: vec![0.5, 1.0]
            }
        );
        assert_eq!(
            m.checks[1].action,
            Action::Search {
                budget: 10,
                modes: vec![2],
                start: vec![1.0, 0.0]
            }
        );
        let bad = format!("{BASE}\n[checks.sweep]\nparameter = \"offset\"\nvalues = [0.5]\n");
        assert!(Manifest::parse(&bad).is_err());
    }

    #[test]
    fn product_density() {
        let text = BASE.replace(
            "kind = \"constant\"",
            "kind = \"product\"\nscale = 2.0\nfactors = [{ kind = \"cosh-linear\", c = 1.0 }, { kind = \"exp-quadratic\", c = 0.1 }]",
        );
        let m = Manifest::parse(&text).unwrap();
        assert_eq!(m.density.scale(), 2.0);
        assert!(matches!(m.density.kind(), DensityKind::Product(f) if f.len() == 2));
    }

    #[test]
    fn empty_checks_and_missing_surface() {
        let text = "[manifold]\nkind = \"euclidean\"\nn = 2\nr_max = 2.0\n";
        let m = Manifest::parse(text).unwrap();
        assert!(m.checks.is_empty() && m.generator.is_none());
        let text = format!("{text}[[checks]]\ncase = \"ThmC\"\n");
        assert!(Manifest::parse(&text)
            .unwrap_err()
            .message
            .contains("[surface]"));
    }
}
