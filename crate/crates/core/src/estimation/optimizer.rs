//! Box-constrained quasi-Newton minimizer with finite-difference gradients.
//!
//! Stands in for a general NLP solver at the scale this crate needs: a few
//! dozen decision variables, smooth objectives, simple box feasibility.
//! BFGS inverse-Hessian updates, backtracking Armijo line search with bound
//! projection, central differences for gradients (one-sided at a bound so
//! the objective is never evaluated outside the box).

use super::EstimationError;
use crate::linalg::{dot, norm2, norm_inf, Mat};

/// Elementwise lower/upper bounds.
#[derive(Debug, Clone)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        assert_eq!(lower.len(), upper.len());
        assert!(
            lower.iter().zip(&upper).all(|(l, u)| l <= u),
            "lower bound exceeds upper bound"
        );
        Bounds { lower, upper }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| v >= l && v <= u)
    }

    pub fn clamp(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(v, (l, u))| v.clamp(*l, *u))
            .collect()
    }
}

/// Stopping tolerances and multistart policy for an estimation run.
#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    pub max_iters: usize,
    /// Projected-gradient infinity-norm threshold.
    pub grad_tol: f64,
    /// Relative step-length threshold.
    pub step_tol: f64,
    /// Relative finite-difference step.
    pub fd_step: f64,
    pub multistart_count: usize,
    pub rng_seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_iters: 300,
            grad_tol: 1e-7,
            step_tol: 1e-11,
            fd_step: 1e-6,
            multistart_count: 4,
            rng_seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<(), EstimationError> {
        for (name, v) in [
            ("grad_tol", self.grad_tol),
            ("step_tol", self.step_tol),
            ("fd_step", self.fd_step),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(EstimationError::InvalidConfig(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.multistart_count < 1 {
            return Err(EstimationError::InvalidConfig(
                "multistart_count must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct MinimizeOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    /// Accepted objective values, non-increasing.
    pub history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Central-difference gradient that stays inside the box; falls back to a
/// one-sided difference when a bound truncates one side.
pub fn fd_gradient(
    f: &dyn Fn(&[f64]) -> f64,
    x: &[f64],
    bounds: &Bounds,
    rel_step: f64,
) -> Vec<f64> {
    let n = x.len();
    let mut g = vec![0.0; n];
    let mut xp = x.to_vec();
    for i in 0..n {
        let h = rel_step * x[i].abs().max(1.0);
        let up = (bounds.upper[i] - x[i]).min(h).max(0.0);
        let down = (x[i] - bounds.lower[i]).min(h).max(0.0);
        if up + down == 0.0 {
            g[i] = 0.0; // variable pinned by equal bounds
            continue;
        }
        let base = x[i];
        xp[i] = base + up;
        let f_hi = f(&xp);
        xp[i] = base - down;
        let f_lo = f(&xp);
        xp[i] = base;
        g[i] = (f_hi - f_lo) / (up + down);
    }
    g
}

/// Norm of the projected gradient: zero exactly when no feasible descent
/// direction remains.
fn projected_gradient_norm(x: &[f64], g: &[f64], bounds: &Bounds) -> f64 {
    let stepped: Vec<f64> = x.iter().zip(g).map(|(xi, gi)| xi - gi).collect();
    let clamped = bounds.clamp(&stepped);
    let pg: Vec<f64> = x.iter().zip(&clamped).map(|(xi, ci)| xi - ci).collect();
    norm_inf(&pg)
}

/// Minimizes `f` over the box from `x_init`. Accepted iterates never leave
/// the box and their objective values never increase. The gradient test is
/// scaled by `1 + |f|`: finite-difference gradients of a large objective
/// bottom out near `eps * |f| / h`, so an absolute threshold would never be
/// reachable there while staying strict for objectives near zero.
pub fn minimize(
    f: &dyn Fn(&[f64]) -> f64,
    x_init: &[f64],
    bounds: &Bounds,
    cfg: &OptimizerConfig,
) -> Result<MinimizeOutcome, EstimationError> {
    cfg.validate()?;
    if x_init.len() != bounds.dim() {
        return Err(EstimationError::InvalidConfig(format!(
            "start point has {} entries for {} bounded variables",
            x_init.len(),
            bounds.dim()
        )));
    }
    if !bounds.contains(x_init) {
        return Err(EstimationError::InvalidConfig(
            "start point violates bounds".into(),
        ));
    }
    let n = x_init.len();
    let mut x = x_init.to_vec();
    let mut fx = f(&x);
    if !fx.is_finite() {
        return Err(EstimationError::NonFiniteObjective);
    }
    let mut g = fd_gradient(f, &x, bounds, cfg.fd_step);
    let mut h = Mat::identity(n);
    let mut h_is_identity = true;
    let mut first_update = true;
    let mut history = vec![fx];
    let mut converged = false;
    let mut iterations = 0;
    let mut stalled_updates = 0usize;
    let mut last_restart = 0usize;

    while iterations < cfg.max_iters {
        if projected_gradient_norm(&x, &g, bounds) <= cfg.grad_tol * (1.0 + fx.abs()) {
            converged = true;
            break;
        }
        iterations += 1;

        // adaptive restarts: rebuild the curvature model from scratch when
        // (a) a run of rejected updates shows it no longer matches the
        // surface, or (b) the objective has stagnated for a while with the
        // gradient still large, which is the signature of a stale Hessian
        // crawling along a curved valley
        let stagnant = iterations >= last_restart + 40
            && history.len() > 40
            && (history[history.len() - 41] - fx).abs() <= 1e-7 * (1.0 + fx.abs());
        if (stalled_updates >= 8 || stagnant) && !first_update {
            h = Mat::identity(n);
            h_is_identity = true;
            first_update = true;
            stalled_updates = 0;
            last_restart = iterations;
        }

        let mut d: Vec<f64> = h.mul_vec(&g).iter().map(|v| -v).collect();
        // guard against non-descent directions from a stale Hessian model
        if dot(&d, &g) >= -1e-14 * norm2(&d) * norm2(&g) {
            h = Mat::identity(n);
            h_is_identity = true;
            first_update = true;
            d = g.iter().map(|v| -v).collect();
        }

        // backtracking with projection onto the box
        let mut alpha = 1.0;
        let mut accepted: Option<(Vec<f64>, f64)> = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + alpha * di).collect();
            let x_new = bounds.clamp(&trial);
            let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
            if norm_inf(&s) == 0.0 {
                alpha *= 0.5;
                continue;
            }
            let f_new = f(&x_new);
            if f_new.is_finite() && f_new <= fx + 1e-4 * dot(&g, &s) {
                accepted = Some((x_new, f_new));
                break;
            }
            alpha *= 0.5;
        }

        let (x_new, f_new) = match accepted {
            Some(pair) => pair,
            None => {
                if !h_is_identity {
                    // retry the iteration as plain projected gradient descent
                    h = Mat::identity(n);
                    h_is_identity = true;
                    first_update = true;
                    continue;
                }
                break; // no feasible decrease left
            }
        };

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let g_new = fd_gradient(f, &x_new, bounds, cfg.fd_step);
        let yv: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &yv);
        if sy <= 1e-10 * norm2(&s) * norm2(&yv) {
            stalled_updates += 1;
        } else {
            stalled_updates = 0;
        }
        if sy > 1e-10 * norm2(&s) * norm2(&yv) {
            if first_update {
                h = Mat::identity(n).scale(sy / dot(&yv, &yv).max(1e-300));
                first_update = false;
            }
            // inverse BFGS: H <- (I - rho s yT) H (I - rho y sT) + rho s sT
            let rho = 1.0 / sy;
            let hy = h.mul_vec(&yv);
            let yhy = dot(&yv, &hy);
            let mut h_next = h.clone();
            for i in 0..n {
                for j in 0..n {
                    let v = h.get(i, j) - rho * (s[i] * hy[j] + hy[i] * s[j])
                        + rho * rho * yhy * s[i] * s[j]
                        + rho * s[i] * s[j];
                    h_next.set(i, j, v);
                }
            }
            h = h_next;
            h_is_identity = false;
        }

        let step_len = norm2(&s);
        x = x_new;
        fx = f_new;
        g = g_new;
        history.push(fx);
        if step_len <= cfg.step_tol * (1.0 + norm2(&x)) {
            converged = true;
            break;
        }
    }
    if !converged && projected_gradient_norm(&x, &g, bounds) <= cfg.grad_tol * (1.0 + fx.abs()) {
        converged = true;
    }

    Ok(MinimizeOutcome {
        x,
        value: fx,
        history,
        iterations,
        converged,
    })
}
