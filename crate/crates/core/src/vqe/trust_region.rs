//! Derivative-free trust-region minimization with quadratic interpolation
//! models, in the style of Powell's BOBYQA/NEWUOA (unconstrained).
//!
//! The model interpolates `f` at `m = 2n + 1` points. The initial points are
//! `x0` and `x0 ± ρ_beg e_i`, which fix the gradient and a diagonal Hessian.
//! Whenever a point is replaced, the model changes by the quadratic of least
//! Frobenius-norm Hessian change that restores interpolation. This is the
//! residual times the new Lagrange function of the replaced point. Lagrange
//! functions solve the KKT system
//!
//! ```text
//! W = [ A   Xᵀ ]    A_ij = ½ (s_i · s_j)²,   X = [1 … 1; s_1 … s_m]
//!     [ X   0  ]
//! ```
//!
//! with right-hand side `e_t`. `W` is refactorized after every replacement:
//! rank-two inverse updates lose accuracy quickly because `A` scales as `|s|⁴`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, Dyn, LU};
use num_traits::Float;

use crate::{Error, Result};

/// Settings of [`minimize_trust_region`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrustRegionConfig {
    /// Initial trust radius and interpolation step.
    pub rho_begin: f64,
    /// Final trust radius; reaching it is convergence.
    pub rho_end: f64,
    /// Evaluation cap; `None` means `200 · (n + 1)`.
    pub max_evaluations: Option<usize>,
}

impl Default for TrustRegionConfig {
    fn default() -> Self {
        Self {
            rho_begin: 0.1,
            rho_end: 1e-6,
            max_evaluations: None,
        }
    }
}

impl TrustRegionConfig {
    pub fn evaluation_cap(&self, n: usize) -> usize {
        self.max_evaluations.unwrap_or(200 * (n + 1))
    }
}

/// Outcome of a derivative-free minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    /// Objective value of every evaluation, in order.
    pub trace: Vec<f64>,
    /// Optimizer iterations (trust-region or geometry steps after setup).
    pub iterations: usize,
    /// `false` when the evaluation cap stopped the run.
    pub converged: bool,
}

impl Minimum {
    pub fn evaluations(&self) -> usize {
        self.trace.len()
    }
}

struct Model<'a, F> {
    f: &'a mut F,
    n: usize,
    m: usize,
    x0: Vec<f64>,
    /// Interpolation points as offsets from `x0`.
    pts: Vec<Vec<f64>>,
    vals: Vec<f64>,
    kopt: usize,
    c: f64,
    g: Vec<f64>,
    /// Row-major `n x n` model Hessian.
    h: Vec<f64>,
    lu: Option<LU<f64, Dyn, Dyn>>,
    trace: Vec<f64>,
    cap: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn hess_vec(h: &[f64], v: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..n).map(|i| dot(&h[i * n..(i + 1) * n], v)).collect()
}

enum Stop {
    Budget,
}

impl<'a, F: FnMut(&[f64]) -> Result<f64>> Model<'a, F> {
    fn eval(&mut self, s: &[f64]) -> Result<core::result::Result<f64, Stop>> {
        if self.trace.len() >= self.cap {
            return Ok(Err(Stop::Budget));
        }
        let x: Vec<f64> = self.x0.iter().zip(s).map(|(a, b)| a + b).collect();
        let v = (self.f)(&x)?;
        if !v.is_finite() {
            return Err(Error::NonFinite("objective value".into()));
        }
        self.trace.push(v);
        Ok(Ok(v))
    }

    /// `q(s)` relative to `x0`.
    fn q(&self, s: &[f64]) -> f64 {
        self.c + dot(&self.g, s) + 0.5 * dot(s, &hess_vec(&self.h, s))
    }

    fn grad_at(&self, s: &[f64]) -> Vec<f64> {
        let hs = hess_vec(&self.h, s);
        self.g.iter().zip(hs).map(|(a, b)| a + b).collect()
    }

    /// `[½(s_j·s)²; 1; s]`, the KKT column a point `s` would occupy.
    fn kkt_column(&self, s: &[f64]) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.m + self.n + 1);
        for p in &self.pts {
            let d = dot(p, s);
            v.push(0.5 * d * d);
        }
        v.push(1.0);
        v.extend_from_slice(s);
        v
    }

    fn refactor(&mut self) -> Result<()> {
        let big = self.m + self.n + 1;
        let mut w = DMatrix::<f64>::zeros(big, big);
        for j in 0..self.m {
            let col = self.kkt_column(&self.pts[j]);
            for (i, v) in col.into_iter().enumerate() {
                w[(i, j)] = v;
                w[(j, i)] = v;
            }
        }
        let lu = w.lu();
        if !lu.is_invertible() {
            return Err(Error::Backend("interpolation system is singular".into()));
        }
        self.lu = Some(lu);
        Ok(())
    }

    fn solve(&self, rhs: Vec<f64>) -> Result<Vec<f64>> {
        let lu = self.lu.as_ref().expect("factorized after setup");
        lu.solve(&DVector::from_vec(rhs))
            .map(|x| x.as_slice().to_vec())
            .ok_or_else(|| Error::Backend("interpolation system is singular".into()))
    }

    /// Coefficients `[λ; c; g]` of the Lagrange function of point `t`.
    fn lagrange(&self, t: usize) -> Result<Vec<f64>> {
        let mut e = vec![0.0; self.m + self.n + 1];
        e[t] = 1.0;
        self.solve(e)
    }

    /// Lagrange values `ℓ_t(s)` for every interpolation point; `W` is
    /// symmetric, so they solve `W y = [½(s_j·s)²; 1; s]`.
    fn lagrange_values(&self, s: &[f64]) -> Result<Vec<f64>> {
        let mut y = self.solve(self.kkt_column(s))?;
        y.truncate(self.m);
        Ok(y)
    }

    fn lagrange_value(&self, coeffs: &[f64], s: &[f64]) -> f64 {
        self.kkt_column(s).iter().zip(coeffs).map(|(a, b)| a * b).sum()
    }

    fn lagrange_gradient(&self, col: &[f64], s: &[f64]) -> Vec<f64> {
        let mut grad: Vec<f64> = (0..self.n).map(|i| col[self.m + 1 + i]).collect();
        for (j, p) in self.pts.iter().enumerate() {
            let w = col[j] * dot(p, s);
            for (gi, pi) in grad.iter_mut().zip(p) {
                *gi += w * pi;
            }
        }
        grad
    }

    /// Puts `s` with value `fs` in slot `t` and restores interpolation.
    fn replace(&mut self, t: usize, s: Vec<f64>, fs: f64) -> Result<()> {
        let residual = fs - self.q(&s);
        self.pts[t] = s;
        self.vals[t] = fs;
        self.refactor()?;
        let col = self.lagrange(t)?;
        self.c += residual * col[self.m];
        for i in 0..self.n {
            self.g[i] += residual * col[self.m + 1 + i];
        }
        let n = self.n;
        for (j, pt) in self.pts.iter().enumerate() {
            let w = residual * col[j];
            if w == 0.0 {
                continue;
            }
            for r in 0..n {
                let wr = w * pt[r];
                let row = &mut self.h[r * n..(r + 1) * n];
                for (hc, pc) in row.iter_mut().zip(pt) {
                    *hc += wr * pc;
                }
            }
        }
        if fs < self.vals[self.kopt] || t == self.kopt {
            self.kopt = (0..self.m)
                .min_by(|&a, &b| self.vals[a].partial_cmp(&self.vals[b]).unwrap_or(core::cmp::Ordering::Equal))
                .unwrap_or(0);
        }
        Ok(())
    }

    /// Moves `x0` onto the best point; the model is re-expanded there.
    fn shift_base(&mut self) -> Result<()> {
        let sopt = self.pts[self.kopt].clone();
        self.c = self.q(&sopt);
        self.g = self.grad_at(&sopt);
        for (x, s) in self.x0.iter_mut().zip(&sopt) {
            *x += s;
        }
        for p in &mut self.pts {
            for (a, b) in p.iter_mut().zip(&sopt) {
                *a -= b;
            }
        }
        self.refactor()
    }

    fn farthest(&self) -> (usize, f64) {
        let sopt = &self.pts[self.kopt];
        (0..self.m)
            .map(|k| (k, norm(&sub(&self.pts[k], sopt))))
            .fold((self.kopt, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best })
    }
}

/// Truncated conjugate gradient for `min g·d + ½ dᵀHd`, `‖d‖ ≤ Δ`.
fn trust_region_step(g: &[f64], h: &[f64], radius: f64) -> Vec<f64> {
    let n = g.len();
    let mut d = vec![0.0; n];
    let gn = norm(g);
    if gn <= 1e-14 * (1.0 + h.iter().fold(0.0f64, |a, x| a.max(x.abs()))) {
        // stationary model point: follow the most negative diagonal curvature
        let (i, hii) = (0..n).map(|i| (i, h[i * n + i])).fold((0, 0.0), |b, c| if c.1 < b.1 { c } else { b });
        if hii < 0.0 {
            d[i] = radius;
        }
        return d;
    }
    let mut r: Vec<f64> = g.iter().map(|x| -x).collect();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    for _ in 0..n.max(1) {
        let hp = hess_vec(h, &p);
        let curv = dot(&p, &hp);
        let to_boundary = |d: &[f64], p: &[f64]| {
            let (a, b, c) = (dot(p, p), 2.0 * dot(d, p), dot(d, d) - radius * radius);
            (-b + (b * b - 4.0 * a * c).max(0.0).sqrt()) / (2.0 * a)
        };
        if curv <= 0.0 {
            let tau = to_boundary(&d, &p);
            d.iter_mut().zip(&p).for_each(|(x, y)| *x += tau * y);
            return d;
        }
        let alpha = rr / curv;
        let trial: Vec<f64> = d.iter().zip(&p).map(|(x, y)| x + alpha * y).collect();
        if norm(&trial) >= radius {
            let tau = to_boundary(&d, &p);
            d.iter_mut().zip(&p).for_each(|(x, y)| *x += tau * y);
            return d;
        }
        d = trial;
        r.iter_mut().zip(&hp).for_each(|(x, y)| *x -= alpha * y);
        let rr_new = dot(&r, &r);
        if rr_new.sqrt() <= 1e-10 * gn {
            break;
        }
        let beta = rr_new / rr;
        rr = rr_new;
        p.iter_mut().zip(&r).for_each(|(x, y)| *x = y + beta * *x);
    }
    d
}

fn next_rho(rho: f64, rho_end: f64) -> f64 {
    let ratio = rho / rho_end;
    if ratio <= 16.0 {
        rho_end
    } else if ratio <= 250.0 {
        ratio.sqrt() * rho_end
    } else {
        0.1 * rho
    }
}

/// Minimizes `f` from `x0`.
///
/// Objective errors abort the run; exhausting the evaluation cap returns the
/// best point with `converged = false`.
pub fn minimize_trust_region<F>(mut f: F, x0: &[f64], config: &TrustRegionConfig) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    if !(config.rho_begin > 0.0 && config.rho_end > 0.0 && config.rho_end <= config.rho_begin) {
        return Err(Error::Invalid("trust radii must satisfy 0 < rho_end <= rho_begin".into()));
    }
    if x0.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("starting point".into()));
    }
    let n = x0.len();
    let cap = config.evaluation_cap(n);
    if cap == 0 {
        return Err(Error::Invalid("evaluation cap must be positive".into()));
    }
    if n == 0 {
        let v = f(x0)?;
        return Ok(Minimum { x: Vec::new(), f: v, trace: vec![v], iterations: 0, converged: true });
    }
    let m = 2 * n + 1;
    let rho0 = config.rho_begin;
    let mut model = Model {
        f: &mut f,
        n,
        m,
        x0: x0.to_vec(),
        pts: Vec::with_capacity(m),
        vals: Vec::with_capacity(m),
        kopt: 0,
        c: 0.0,
        g: vec![0.0; n],
        h: vec![0.0; n * n],
        lu: None,
        trace: Vec::new(),
        cap,
    };

    let finish = |model: Model<'_, F>, iterations: usize, converged: bool| {
        let x = model.x0.iter().zip(&model.pts[model.kopt]).map(|(a, b)| a + b).collect();
        Minimum { x, f: model.vals[model.kopt], trace: model.trace, iterations, converged }
    };
    let finish_partial = |model: Model<'_, F>| {
        let (k, v) = model
            .trace
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |b, (i, &v)| if v < b.1 { (i, v) } else { b });
        let x = model
            .x0
            .iter()
            .zip(&model.pts[k.min(model.pts.len() - 1)])
            .map(|(a, b)| a + b)
            .collect();
        Minimum { x, f: v, trace: model.trace, iterations: 0, converged: false }
    };

    let zero = vec![0.0; n];
    let f0 = match model.eval(&zero)? {
        Ok(v) => v,
        Err(Stop::Budget) => unreachable!("cap is positive"),
    };
    model.pts.push(zero);
    model.vals.push(f0);
    model.c = f0;
    for i in 0..n {
        let mut plus = vec![0.0; n];
        plus[i] = rho0;
        let mut minus = vec![0.0; n];
        minus[i] = -rho0;
        let fp = match model.eval(&plus)? {
            Ok(v) => v,
            Err(Stop::Budget) => {
                model.pts.push(plus);
                return Ok(finish_partial(model));
            }
        };
        model.pts.push(plus);
        model.vals.push(fp);
        let fm = match model.eval(&minus)? {
            Ok(v) => v,
            Err(Stop::Budget) => {
                model.pts.push(minus);
                return Ok(finish_partial(model));
            }
        };
        model.pts.push(minus);
        model.vals.push(fm);
        model.g[i] = (fp - fm) / (2.0 * rho0);
        model.h[i * n + i] = (fp + fm - 2.0 * f0) / (rho0 * rho0);
    }
    model.kopt = (0..m)
        .min_by(|&a, &b| model.vals[a].partial_cmp(&model.vals[b]).unwrap_or(core::cmp::Ordering::Equal))
        .unwrap_or(0);
    model.refactor()?;

    let mut rho = rho0;
    let mut delta = rho0;
    let mut iterations = 0usize;
    loop {
        let sopt = model.pts[model.kopt].clone();
        let gopt = model.grad_at(&sopt);
        let d = trust_region_step(&gopt, &model.h, delta);
        let dn = norm(&d);

        if dn < 0.5 * rho {
            let (k, dist) = model.farthest();
            if dist > 2.0 * delta.max(rho) && k != model.kopt {
                iterations += 1;
                if !geometry_step(&mut model, k, dist, delta, rho)? {
                    return Ok(finish(model, iterations, false));
                }
                continue;
            }
        } else {
            iterations += 1;
            let snew: Vec<f64> = sopt.iter().zip(&d).map(|(a, b)| a + b).collect();
            let fnew = match model.eval(&snew)? {
                Ok(v) => v,
                Err(Stop::Budget) => return Ok(finish(model, iterations, false)),
            };
            let fopt = model.vals[model.kopt];
            let pred = -(dot(&gopt, &d) + 0.5 * dot(&d, &hess_vec(&model.h, &d)));
            let ratio = if pred > 0.0 { (fopt - fnew) / pred } else { -1.0 };
            delta = if ratio <= 0.1 {
                0.5 * dn
            } else if ratio <= 0.7 {
                (0.5 * delta).max(dn)
            } else {
                (0.5 * delta).max(2.0 * dn)
            };
            if delta <= 1.5 * rho {
                delta = rho;
            }

            let t = choose_replacement(&model, &snew, fnew < fopt, delta)?;
            model.replace(t, snew, fnew)?;
            let sopt = &model.pts[model.kopt];
            if dot(sopt, sopt) >= 1e3 * delta * delta {
                model.shift_base()?;
            }

            if ratio >= 0.1 {
                continue;
            }
            let (k, dist) = model.farthest();
            if dist > 2.0 * delta && k != model.kopt {
                iterations += 1;
                if !geometry_step(&mut model, k, dist, delta, rho)? {
                    return Ok(finish(model, iterations, false));
                }
                continue;
            }
            // boundary steps have ‖d‖ = Δ up to rounding
            if ratio > 0.0 || delta.max(dn) > rho * (1.0 + 1e-8) {
                continue;
            }
        }

        // the model is trusted at this resolution: refine or stop
        if rho <= config.rho_end {
            return Ok(finish(model, iterations, true));
        }
        let old = rho;
        rho = next_rho(rho, config.rho_end);
        delta = (0.5 * old).max(rho);
    }
}

/// Slot for a new trust-region point: the largest distance-weighted
/// Lagrange value, sparing the incumbent unless the new point beats it.
fn choose_replacement<F: FnMut(&[f64]) -> Result<f64>>(
    model: &Model<'_, F>,
    snew: &[f64],
    improved: bool,
    delta: f64,
) -> Result<usize> {
    let ell = model.lagrange_values(snew)?;
    let sopt = &model.pts[model.kopt];
    let mut best = (usize::MAX, -1.0);
    for (t, l) in ell.iter().enumerate() {
        if t == model.kopt && !improved {
            continue;
        }
        let dist = norm(&sub(&model.pts[t], sopt));
        let weight = (dist / delta).powi(2).max(1.0);
        let score = l.abs() * weight;
        if score > best.1 {
            best = (t, score);
        }
    }
    Ok(if best.0 == usize::MAX { (model.kopt + 1) % model.m } else { best.0 })
}

/// Replaces far point `k` by a nearby point that keeps the interpolation
/// set well poised. Returns `false` when the budget is exhausted.
fn geometry_step<F: FnMut(&[f64]) -> Result<f64>>(
    model: &mut Model<'_, F>,
    k: usize,
    dist: f64,
    delta: f64,
    rho: f64,
) -> Result<bool> {
    let radius = (0.1 * dist).min(0.5 * delta).max(rho);
    let sopt = model.pts[model.kopt].clone();
    let mut dirs = Vec::new();
    let coeffs = model.lagrange(k)?;
    let grad = model.lagrange_gradient(&coeffs, &sopt);
    if norm(&grad) > 0.0 {
        dirs.push(grad);
    }
    dirs.push(sub(&model.pts[k], &sopt));
    let mut best: Option<(f64, Vec<f64>)> = None;
    for dir in dirs {
        let scale = radius / norm(&dir);
        for sign in [1.0, -1.0] {
            let cand: Vec<f64> = sopt.iter().zip(&dir).map(|(a, b)| a + sign * scale * b).collect();
            let l = model.lagrange_value(&coeffs, &cand).abs();
            if best.as_ref().is_none_or(|(b, _)| l > *b) {
                best = Some((l, cand));
            }
        }
    }
    let (_, cand) = best.expect("at least one direction");
    let v = match model.eval(&cand)? {
        Ok(v) => v,
        Err(Stop::Budget) => return Ok(false),
    };
    model.replace(k, cand, v)?;
    Ok(true)
}
