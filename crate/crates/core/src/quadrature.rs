//! Composite Gauss-Legendre quadrature, nested (tensor-product) integration
//! over radial-graph regions and a seeded Monte Carlo cross-check.
//!
//! All sums run in fixed node order through a Neumaier accumulator, so a
//! result depends only on the integrand, the interval and the rule.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Error, Result};

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], ascending.
///
/// Newton iteration on the three-term Legendre recurrence, started from the
/// Tricomi approximation of each root.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "Gauss-Legendre order must be positive");
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let (p, pm1) = if n == 0 { (1.0, 0.0) } else { (p1, p0) };
    let d = n as f64 * (x * p - pm1) / (x * x - 1.0);
    (p, d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    /// Plain composite Gauss-Legendre.
    ClosedGauss,
    /// Substitution `s = a + u^2` before applying composite Gauss-Legendre in
    /// `u`; turns `(s - a)^(-1/2)` endpoint behavior into a smooth integrand.
    OpenSingularLeft,
}

/// A composite Gauss-Legendre rule: `panels` equal panels of `order` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    order: usize,
    panels: usize,
    kind: RuleKind,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self::gauss(48, 4).expect("default rule is valid")
    }
}

impl QuadratureRule {
    pub fn new(order: usize, panels: usize, kind: RuleKind) -> Result<Self> {
        if order == 0 || panels == 0 {
            return Err(Error::Config(format!(
                "quadrature order and panels must be positive (got order {order}, panels {panels})"
            )));
        }
        let (nodes, weights) = gauss_legendre(order);
        Ok(Self {
            order,
            panels,
            kind,
            nodes,
            weights,
        })
    }

    pub fn gauss(order: usize, panels: usize) -> Result<Self> {
        Self::new(order, panels, RuleKind::ClosedGauss)
    }

    pub fn singular_left(order: usize, panels: usize) -> Result<Self> {
        Self::new(order, panels, RuleKind::OpenSingularLeft)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    /// Same rule with a different kind.
    pub fn with_kind(&self, kind: RuleKind) -> Self {
        Self {
            kind,
            ..self.clone()
        }
    }

    /// Same order, twice the panels.
    pub fn refined(&self) -> Self {
        Self {
            panels: self.panels * 2,
            ..self.clone()
        }
    }

    /// Nodes and weights of the composite rule on `[a, b]`, in ascending order.
    pub fn points(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.order * self.panels);
        match self.kind {
            RuleKind::ClosedGauss => self.push_points(a, b, &mut out),
            RuleKind::OpenSingularLeft => {
                let span = (b - a).max(0.0).sqrt();
                let mut upts = Vec::with_capacity(out.capacity());
                self.push_points(0.0, span, &mut upts);
                out.extend(upts.into_iter().map(|(u, w)| (a + u * u, 2.0 * u * w)));
            }
        }
        out
    }

    fn push_points(&self, a: f64, b: f64, out: &mut Vec<(f64, f64)>) {
        let h = (b - a) / self.panels as f64;
        for p in 0..self.panels {
            let lo = a + h * p as f64;
            let hi = if p + 1 == self.panels { b } else { lo + h };
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo);
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                out.push((mid + half * x, half * w));
            }
        }
    }
}

/// Integral of `f` over `[a, b]`.
pub fn integrate_1d<F>(f: F, a: f64, b: f64, rule: &QuadratureRule) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(a <= b) {
        return Err(domain("upper limit", b, a, f64::INFINITY));
    }
    if a == b {
        return Ok(0.0);
    }
    let mut acc = CompensatedSum::new();
    for (x, w) in rule.points(a, b) {
        let fx = f(x);
        if !fx.is_finite() {
            return Err(Error::Evaluation { node: x, value: fx });
        }
        acc.add(w * fx);
    }
    Ok(acc.value())
}

/// Tensor-product integral `∫_outer ∫_{inner(x)} f(x, y) dy dx` with one rule
/// in both directions.
pub fn integrate_nested<F, B>(
    f: F,
    outer: (f64, f64),
    inner_bounds: B,
    rule: &QuadratureRule,
) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
    B: Fn(f64) -> (f64, f64),
{
    integrate_nested_with(f, outer, inner_bounds, rule, rule)
}

/// As [`integrate_nested`], with separate outer and inner rules.
pub fn integrate_nested_with<F, B>(
    f: F,
    outer: (f64, f64),
    inner_bounds: B,
    outer_rule: &QuadratureRule,
    inner_rule: &QuadratureRule,
) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
    B: Fn(f64) -> (f64, f64),
{
    let (a, b) = outer;
    if !(a <= b) {
        return Err(domain("outer upper limit", b, a, f64::INFINITY));
    }
    let mut acc = CompensatedSum::new();
    for (x, w) in outer_rule.points(a, b) {
        let (lo, hi) = inner_bounds(x);
        if !(lo <= hi) {
            return Err(domain("inner upper limit", hi, lo, f64::INFINITY));
        }
        let inner = integrate_1d(|y| f(x, y), lo, hi, inner_rule)?;
        acc.add(w * inner);
    }
    Ok(acc.value())
}

/// Seeded uniform-sampling Monte Carlo integrator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McOracle {
    pub samples: u64,
    pub seed: u64,
}

impl McOracle {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self { samples, seed }
    }
}

/// Integration region for [`mc_estimate`].
pub enum McRegion<'a> {
    /// Axis-aligned box given by per-axis `(lo, hi)` bounds.
    Box(Vec<(f64, f64)>),
    /// `{(x, y) : x in outer, inner_lo <= y <= inner_hi(x)}`; sampled by
    /// rejection from the box `outer × [inner_lo, inner_max]`.
    RadialGraph {
        outer: (f64, f64),
        inner_lo: f64,
        inner_hi: &'a (dyn Fn(f64) -> f64 + Sync),
        inner_max: f64,
    },
}

/// Monte Carlo estimate of `∫_region f` and its standard error.
pub fn mc_estimate<F>(f: F, region: &McRegion<'_>, oracle: McOracle) -> Result<(f64, f64)>
where
    F: Fn(&[f64]) -> f64,
{
    if oracle.samples == 0 {
        return Err(Error::Config(
            "Monte Carlo oracle needs at least one sample".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(oracle.seed);
    // inner bound function and its maximum, for graph regions
    type Graph<'a> = Option<(&'a dyn Fn(f64) -> f64, f64)>;
    let (bounds, graph): (Vec<(f64, f64)>, Graph<'_>) = match region {
        McRegion::Box(b) => (b.clone(), None),
        McRegion::RadialGraph {
            outer,
            inner_lo,
            inner_hi,
            inner_max,
        } => {
            if inner_max < inner_lo {
                return Err(domain("inner_max", *inner_max, *inner_lo, f64::INFINITY));
            }
            (
                vec![*outer, (*inner_lo, *inner_max)],
                Some((*inner_hi, *inner_max)),
            )
        }
    };
    for &(lo, hi) in &bounds {
        if !(lo <= hi) {
            return Err(domain("box upper bound", hi, lo, f64::INFINITY));
        }
    }
    let volume: f64 = bounds.iter().map(|(lo, hi)| hi - lo).product();

    // Welford running mean and variance.
    let mut mean = 0.0;
    let mut m2 = 0.0;
    let mut point = vec![0.0; bounds.len()];
    for i in 0..oracle.samples {
        for (p, &(lo, hi)) in point.iter_mut().zip(&bounds) {
            *p = lo + (hi - lo) * rng.gen::<f64>();
        }
        let inside = match graph {
            Some((hi_fn, _)) => point[1] <= hi_fn(point[0]),
            None => true,
        };
        let value = if inside { f(&point) } else { 0.0 };
        if !value.is_finite() {
            return Err(Error::Evaluation {
                node: point[0],
                value,
            });
        }
        let k = (i + 1) as f64;
        let delta = value - mean;
        mean += delta / k;
        m2 += delta * (value - mean);
    }
    let n = oracle.samples as f64;
    let variance = if oracle.samples > 1 {
        m2 / (n - 1.0)
    } else {
        0.0
    };
    Ok((volume * mean, volume * (variance / n).sqrt()))
}
