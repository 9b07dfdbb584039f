//! Derivative-free search for small deficits over perturbed profiles.

use serde::{Deserialize, Serialize};

use super::{Case, Verifier};
use crate::error::{Error, Result};
use crate::report::Status;
use crate::surface::{make_profile, Generator};

/// Objective value assigned to points that cannot be evaluated.
pub const PENALTY: f64 = 1e3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    /// `(r0, ε_{modes[0]}, ε_{modes[1]}, …)`.
    pub params: Vec<f64>,
    /// Relative deficit, or [`PENALTY`] when the point failed.
    pub value: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best: Vec<f64>,
    pub best_deficit: f64,
    pub evaluations: usize,
    pub trace: Vec<TraceEntry>,
}

impl SearchResult {
    /// The perturbed generator at the best point.
    pub fn generator(&self, modes: &[usize]) -> Generator {
        family(&self.best, modes)
    }
}

fn family(x: &[f64], modes: &[usize]) -> Generator {
    let len = modes.iter().copied().max().unwrap_or(0);
    let mut eps = vec![0.0; len];
    for (&k, &e) in modes.iter().zip(&x[1..]) {
        eps[k - 1] = e;
    }
    Generator::Perturbed { r0: x[0], eps }
}

/// Minimises the relative deficit of `case` over `Perturbed(r0, ε)` where
/// the free coefficients are `ε_k` for `k` in `modes`.
///
/// `start` is `(r0, ε_{modes[0]}, …)`. Nelder–Mead with reflection 1,
/// expansion 2, contraction and shrink 1/2; at most `budget` evaluations.
/// Failed evaluations are recorded in the trace and scored with
/// [`PENALTY`].
pub fn minimize_deficit(
    verifier: &Verifier,
    case: Case,
    modes: &[usize],
    start: &[f64],
    budget: usize,
) -> Result<SearchResult> {
    if budget == 0 {
        return Err(Error::Config(
            "search budget must be at least one evaluation".into(),
        ));
    }
    if start.len() != modes.len() + 1 {
        return Err(Error::Config(format!(
            "search start has {} values but {} modes need {}",
            start.len(),
            modes.len(),
            modes.len() + 1
        )));
    }
    if modes.contains(&0) {
        return Err(Error::Config(
            "perturbation modes are numbered from 1".into(),
        ));
    }

    let mut trace = Vec::new();
    let mut objective = |x: &[f64]| -> f64 {
        let outcome = make_profile(&family(x, modes), verifier.manifold())
            .and_then(|p| verifier.evaluate(case, &p, false));
        let (value, error) = match outcome {
            Ok(r) if r.status != Status::Error && r.rel_deficit.is_finite() => {
                (r.rel_deficit, None)
            }
            Ok(r) => (PENALTY, Some(r.notes.join("; "))),
            Err(e) => (PENALTY, Some(e.to_string())),
        };
        trace.push(TraceEntry {
            params: x.to_vec(),
            value,
            error,
        });
        value
    };
    let (best, best_deficit, evaluations) = nelder_mead(&mut objective, start, budget);
    Ok(SearchResult {
        best,
        best_deficit,
        evaluations,
        trace,
    })
}

/// Plain Nelder–Mead; returns `(best point, best value, evaluations used)`.
fn nelder_mead(
    f: &mut impl FnMut(&[f64]) -> f64,
    start: &[f64],
    budget: usize,
) -> (Vec<f64>, f64, usize) {
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;

    let dim = start.len();
    let mut used = 0;
    let mut eval = |x: &[f64], used: &mut usize| {
        *used += 1;
        f(x)
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(start.to_vec(), eval(start, &mut used))];
    for i in 0..dim {
        if used >= budget {
            return best_of(&simplex, used);
        }
        let mut x = start.to_vec();
        x[i] += if x[i] != 0.0 { 0.05 * x[i] } else { 0.00025 };
        let fx = eval(&x, &mut used);
        simplex.push((x, fx));
    }

    while used < budget {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[dim].1 - simplex[0].1;
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread.abs() <= 1e-16 && diameter <= 1e-12 {
            break;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..dim].iter().map(|(x, _)| x[j]).sum::<f64>() / dim as f64)
            .collect();
        let toward = |from: &[f64], coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(from)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };
        let worst = simplex[dim].0.clone();
        let f_worst = simplex[dim].1;
        let f_second = simplex[dim - 1].1;
        let f_best = simplex[0].1;

        let xr = toward(&worst, REFLECT);
        let fr = eval(&xr, &mut used);
        if fr < f_best {
            if used >= budget {
                simplex[dim] = (xr, fr);
                break;
            }
            let xe = toward(&worst, EXPAND);
            let fe = eval(&xe, &mut used);
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < f_second {
            simplex[dim] = (xr, fr);
            continue;
        }
        if used >= budget {
            if fr < f_worst {
                simplex[dim] = (xr, fr);
            }
            break;
        }
        let (xc, fc) = if fr < f_worst {
            let xc = toward(&worst, REFLECT * CONTRACT);
            let fc = eval(&xc, &mut used);
            (xc, fc)
        } else {
            let xc = toward(&worst, -CONTRACT);
            let fc = eval(&xc, &mut used);
            (xc, fc)
        };
        if fc < fr.min(f_worst) {
            simplex[dim] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            if used >= budget {
                break;
            }
            let x: Vec<f64> = best
                .iter()
                .zip(&vertex.0)
                .map(|(b, v)| b + SHRINK * (v - b))
                .collect();
            let fx = eval(&x, &mut used);
            *vertex = (x, fx);
        }
    }
    best_of(&simplex, used)
}

fn best_of(simplex: &[(Vec<f64>, f64)], used: usize) -> (Vec<f64>, f64, usize) {
    let (x, fx) = simplex
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("simplex is never empty");
    (x.clone(), *fx, used)
}
