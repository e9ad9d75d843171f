use alloc::vec::Vec;


use super::trust_region::Minimum;
use crate::{Error, Result};

/// Settings of [`minimize_nelder_mead`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadConfig {
    /// Edge length of the initial simplex.
    pub initial_step: f64,
    /// Stop when every vertex is within this of the best, coordinate-wise.
    pub x_tolerance: f64,
    /// ... and every vertex value is within this of the best value.
    pub f_tolerance: f64,
    /// Evaluation cap; `None` means `200 · (n + 1)`.
    pub max_evaluations: Option<usize>,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        Self {
            initial_step: 0.1,
            x_tolerance: 1e-6,
            f_tolerance: 1e-10,
            max_evaluations: None,
        }
    }
}

/// Downhill simplex with standard coefficients (1, 2, ½, ½).
pub fn minimize_nelder_mead<F>(mut f: F, x0: &[f64], config: &NelderMeadConfig) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let n = x0.len();
    let cap = config.max_evaluations.unwrap_or(200 * (n + 1));
    if cap == 0 || !(config.initial_step > 0.0) {
        return Err(Error::Invalid("Nelder-Mead needs a positive step and budget".into()));
    }
    let mut trace = Vec::new();
    let mut eval = |x: &[f64], trace: &mut Vec<f64>| -> Result<Option<f64>> {
        if trace.len() >= cap {
            return Ok(None);
        }
        let v = f(x)?;
        if !v.is_finite() {
            return Err(Error::NonFinite("objective value".into()));
        }
        trace.push(v);
        Ok(Some(v))
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(x0, &mut trace)?.expect("cap is positive");
    simplex.push((x0.to_vec(), v0));
    let mut exhausted = false;
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += config.initial_step;
        match eval(&x, &mut trace)? {
            Some(v) => simplex.push((x, v)),
            None => {
                exhausted = true;
                break;
            }
        }
    }

    let mut iterations = 0;
    let mut converged = false;
    while !exhausted {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(core::cmp::Ordering::Equal));
        let (best_x, best_f) = (&simplex[0].0, simplex[0].1);
        let x_spread = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(best_x).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        let f_spread = simplex[1..].iter().map(|(_, v)| (v - best_f).abs()).fold(0.0, f64::max);
        if x_spread <= config.x_tolerance && f_spread <= config.f_tolerance {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = alloc::vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (c - w)).collect()
        };
        let xr = along(1.0);
        let Some(fr) = eval(&xr, &mut trace)? else { break };
        if fr < simplex[0].1 {
            let xe = along(2.0);
            let Some(fe) = eval(&xe, &mut trace)? else {
                simplex[n] = (xr, fr);
                break;
            };
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc_bound) = if fr < worst.1 { (along(0.5), fr) } else { (along(-0.5), worst.1) };
        let Some(fc) = eval(&xc, &mut trace)? else { break };
        if fc < fc_bound {
            simplex[n] = (xc, fc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = anchor.iter().zip(&vertex.0).map(|(a, b)| a + 0.5 * (b - a)).collect();
            match eval(&x, &mut trace)? {
                Some(v) => *vertex = (x, v),
                None => {
                    exhausted = true;
                    break;
                }
            }
        }
    }
    let (x, v) = simplex
        .into_iter()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(core::cmp::Ordering::Equal))
        .expect("simplex has a vertex");
    Ok(Minimum { x, f: v, trace, iterations, converged })
}
