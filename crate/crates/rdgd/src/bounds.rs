//! Evaluators for the theoretical suboptimality-gap bounds, used for
//! per-round overlays next to the measured gap.

use crate::error::{Error, Result};

/// Problem constants every bound case draws from.
#[derive(Debug, Clone, Copy)]
pub struct BoundParams {
    pub m_smooth: f64,
    /// Strong-convexity modulus of the mirror map psi.
    pub mu: f64,
    /// Strong-convexity modulus of the loss (0 when merely convex).
    pub alpha: f64,
    pub sigma: f64,
    /// Parameter dimension entering the noise term through sqrt(p).
    pub dim: usize,
    pub workers: usize,
    pub r_theta: f64,
    /// D_psi(theta*, theta_0).
    pub d_psi_star: f64,
    /// |theta* - theta_0|^2.
    pub dist0_sq: f64,
    /// Corruption envelope C(t) = kappa t^r.
    pub kappa: f64,
    pub r: f64,
}

impl BoundParams {
    pub fn envelope(&self, t: usize) -> f64 {
        self.kappa * (t as f64).powf(self.r)
    }

    /// (M+1) sqrt(p) sigma R_Theta, the constant channel-noise term.
    pub fn noise_term(&self) -> f64 {
        (self.m_smooth + 1.0) * (self.dim as f64).sqrt() * self.sigma * self.r_theta
    }
}

/// Smooth-case bound at round t, given the running stepsize sums:
/// D_psi/H_t + (M^2/2mu) (sum eta^2)/H_t + (R C(t)/m) sqrt(sum eta^2)/H_t
/// plus (M+1) sqrt(p) sigma R. With eta_k = 1/sqrt(T) and t = T this is
/// exactly the fixed-horizon statement.
pub fn smooth_bound(p: &BoundParams, t: usize, sum_eta_sq: f64, h_t: f64) -> f64 {
    p.d_psi_star / h_t
        + p.m_smooth * p.m_smooth / (2.0 * p.mu) * sum_eta_sq / h_t
        + p.r_theta * p.envelope(t) / p.workers as f64 * sum_eta_sq.sqrt() / h_t
        + p.noise_term()
}

/// Strongly convex bound at round t:
/// prod_{k=2}^t (1 - eta_k/H_k) (alpha/2)|theta*-theta_0|^2 + M^2/(2 alpha)
/// + (R C(t)/m) sqrt(sum (eta_k/H_t)^2) + (M+1) sqrt(p) sigma R.
pub fn strongly_convex_bound(p: &BoundParams, t: usize, contraction: f64, ratio_sq_sum: f64) -> f64 {
    contraction * 0.5 * p.alpha * p.dist0_sq
        + p.m_smooth * p.m_smooth / (2.0 * p.alpha)
        + p.r_theta * p.envelope(t) / p.workers as f64 * ratio_sq_sum.sqrt()
        + p.noise_term()
}

/// Closed form of the strongly convex bound under eta_k = (alpha/M) H_k:
/// (1-alpha/M)^(t-1) (alpha/2)|theta*-theta_0|^2 + M^2/(2 alpha)
/// + R C(t)/m + (M+1) sqrt(p) sigma R.
pub fn geometric_ratio_bound(p: &BoundParams, t: usize) -> f64 {
    (1.0 - p.alpha / p.m_smooth).powi(t as i32 - 1) * 0.5 * p.alpha * p.dist0_sq
        + p.m_smooth * p.m_smooth / (2.0 * p.alpha)
        + p.r_theta * p.envelope(t) / p.workers as f64
        + p.noise_term()
}

/// sum_{k=1}^n k^2 = n(n+1)(2n+1)/6.
fn sum_squares(n: usize) -> f64 {
    let n = n as f64;
    n * (n + 1.0) * (2.0 * n + 1.0) / 6.0
}

/// A(t, t0) = sqrt( (t0(t0+1)/(t(t+1)))^2
///                + (2/(t(t+1)))^2 sum_{k=t0+1}^t k^2 ), decaying as
/// O(1/sqrt(t)).
pub fn restart_decay_factor(t: usize, t0: usize) -> Result<f64> {
    if t <= t0 {
        return Err(Error::BoundBeforeTransition { t, t0 });
    }
    let denom = (t * (t + 1)) as f64;
    let head = (t0 * (t0 + 1)) as f64 / denom;
    let tail = (2.0 / denom).powi(2) * (sum_squares(t) - sum_squares(t0));
    Ok((head * head + tail).sqrt())
}

/// Restart bound for t > t0:
/// (alpha/2)(1-alpha/M)^(t0-1) (t0(t0+1))/(t(t+1)) |theta*-theta_0|^2
/// + R (C(t)/m) A(t,t0) + M^2/(2 alpha) + (M+1) sqrt(p) sigma R.
pub fn restart_bound(p: &BoundParams, t: usize, t0: usize) -> Result<f64> {
    let a = restart_decay_factor(t, t0)?;
    let denom = (t * (t + 1)) as f64;
    let head = 0.5
        * p.alpha
        * (1.0 - p.alpha / p.m_smooth).powi(t0 as i32 - 1)
        * ((t0 * (t0 + 1)) as f64 / denom)
        * p.dist0_sq;
    Ok(head + p.r_theta * p.envelope(t) / p.workers as f64 * a
        + p.m_smooth * p.m_smooth / (2.0 * p.alpha)
        + p.noise_term())
}

/// Which bound a run is overlaid with.
#[derive(Debug, Clone, Copy)]
pub enum BoundCase {
    /// Smooth convex losses (dual averaging).
    Smooth,
    /// Smooth strongly convex losses.
    StronglyConvex,
    /// Restart scheme: the strongly convex form up to t0, the two-stage
    /// form after.
    Restart { t0: usize },
}

/// Tracks the schedule-dependent sums a bound needs, one `on_round` call per
/// round. Ratios are maintained in overflow-free form so geometric schedules
/// stay finite.
#[derive(Debug, Clone)]
pub struct BoundTracker {
    case: BoundCase,
    params: BoundParams,
    h: f64,
    sum_eta_sq: f64,
    /// sum over k of (eta_k / H_t)^2, updated by rescaling.
    ratio_sq_sum: f64,
    /// prod_{k>=2} (1 - eta_k/H_k) = prod H_{k-1}/H_k.
    contraction: f64,
}

impl BoundTracker {
    pub fn new(case: BoundCase, params: BoundParams) -> Self {
        BoundTracker { case, params, h: 0.0, sum_eta_sq: 0.0, ratio_sq_sum: 0.0, contraction: 1.0 }
    }

    pub fn on_round(&mut self, t: usize, eta: f64) -> Result<f64> {
        let h_prev = self.h;
        let h_new = h_prev + eta;
        self.h = h_new;
        self.sum_eta_sq += eta * eta;
        let shrink = h_prev / h_new;
        self.ratio_sq_sum = self.ratio_sq_sum * shrink * shrink + (eta / h_new) * (eta / h_new);
        if t >= 2 {
            self.contraction *= shrink;
        }
        match self.case {
            BoundCase::Smooth => Ok(smooth_bound(&self.params, t, self.sum_eta_sq, h_new)),
            BoundCase::StronglyConvex => {
                Ok(strongly_convex_bound(&self.params, t, self.contraction, self.ratio_sq_sum))
            }
            BoundCase::Restart { t0 } => {
                if t <= t0 {
                    Ok(strongly_convex_bound(&self.params, t, self.contraction, self.ratio_sq_sum))
                } else {
                    restart_bound(&self.params, t, t0)
                }
            }
        }
    }
}
