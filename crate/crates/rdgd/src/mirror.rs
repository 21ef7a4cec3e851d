//! Quadratic mirror maps, Bregman divergence, and the closed-form solutions
//! of the two per-round argmin subproblems.
//!
//! With an isotropic quadratic potential psi(x) = (beta/2)|x|^2 both argmin
//! steps are quadratics in the decision variable, so the constrained
//! minimizer over a Euclidean ball is the projection of the unconstrained
//! stationary point. No inner iterative solve is needed.

use crate::numerics::vec::{self, project_ball};

/// psi(x) = (beta/2) |x|_2^2; beta-strongly convex with mu = beta.
#[derive(Debug, Clone, Copy)]
pub struct MirrorMap {
    pub beta: f64,
}

impl MirrorMap {
    pub fn new(beta: f64) -> Self {
        assert!(beta > 0.0, "mirror map requires beta > 0");
        MirrorMap { beta }
    }

    /// grad psi: theta -> beta * theta.
    pub fn dual_map(&self, theta: &[f64]) -> Vec<f64> {
        theta.iter().map(|x| self.beta * x).collect()
    }

    /// Unconstrained grad psi*: z -> z / beta (inverse of `dual_map`).
    pub fn dual_inverse(&self, z: &[f64]) -> Vec<f64> {
        z.iter().map(|x| x / self.beta).collect()
    }

    /// Bregman divergence D_psi(theta, theta') = (beta/2)|theta - theta'|^2.
    pub fn bregman(&self, theta: &[f64], theta_prime: &[f64]) -> f64 {
        assert_eq!(theta.len(), theta_prime.len(), "bregman: dimension mismatch");
        let d = vec::sub(theta, theta_prime);
        0.5 * self.beta * vec::dot(&d, &d)
    }
}

/// Bounded feasible region: a Euclidean ball.
#[derive(Debug, Clone)]
pub struct FeasibleSet {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl FeasibleSet {
    pub fn new(center: Vec<f64>, radius: f64) -> Self {
        assert!(radius.is_finite() && radius > 0.0, "feasible radius must be positive and finite");
        FeasibleSet { center, radius }
    }

    pub fn origin_ball(p: usize, radius: f64) -> Self {
        FeasibleSet::new(vec![0.0; p], radius)
    }

    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        project_ball(v, &self.center, self.radius)
    }

    pub fn contains(&self, v: &[f64], slack: f64) -> bool {
        vec::norm2(&vec::sub(v, &self.center)) <= self.radius + slack
    }
}

/// argmin_{u in Theta} { <S_g, u> + (beta/2)|u - theta0|^2 }
/// where S_g accumulates sum_k eta_k * gtilde_k.
///
/// The unconstrained stationary point is theta0 - S_g/beta; projecting it
/// onto the ball is exact because the objective is an isotropic quadratic.
pub fn rdgd_argmin(s_g: &[f64], map: &MirrorMap, theta0: &[f64], feasible: &FeasibleSet) -> Vec<f64> {
    let mut u: Vec<f64> = theta0.iter().zip(s_g).map(|(t0, g)| t0 - g / map.beta).collect();
    u = feasible.project(&u);
    u
}

/// argmin_{u in Theta} { sum_k eta_k (<gtilde_k, u - theta_k> + (alpha/2)|u - theta_k|^2)
///                       + (eta1*alpha/2)|u - theta0|^2 }
/// given the running sums S_g = sum eta_k gtilde_k, S_theta = sum eta_k theta_k,
/// and H_t = sum eta_k. Stationarity of the quadratic gives
/// u* = (alpha*S_theta + eta1*alpha*theta0 - S_g) / (alpha*(H_t + eta1)).
pub fn rdgd_sc_argmin(
    s_g: &[f64],
    s_theta: &[f64],
    h_t: f64,
    alpha: f64,
    eta1: f64,
    theta0: &[f64],
    feasible: &FeasibleSet,
) -> Vec<f64> {
    assert!(alpha > 0.0, "strongly convex argmin requires alpha > 0");
    let denom = alpha * (h_t + eta1);
    let mut u: Vec<f64> = (0..s_g.len())
        .map(|i| (alpha * s_theta[i] + eta1 * alpha * theta0[i] - s_g[i]) / denom)
        .collect();
    u = feasible.project(&u);
    u
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bregman_of_point_to_itself_is_zero() {
        let map = MirrorMap::new(3.0);
        let v = vec![1.0, -2.0, 0.5];
        assert_eq!(map.bregman(&v, &v), 0.0);
    }

    #[test]
    fn bregman_quadratic_closed_form() {
        let map = MirrorMap::new(2.0);
        assert_eq!(map.bregman(&[1.0, 0.0], &[0.0, 0.0]), 1.0);
    }

    #[test]
    fn dual_roundtrip() {
        let map = MirrorMap::new(4.0);
        let theta = vec![1.0, 1.0];
        let z = map.dual_map(&theta);
        assert_eq!(z, vec![4.0, 4.0]);
        assert_eq!(map.dual_inverse(&z), theta);
    }

    #[test]
    fn zero_gradient_signal_returns_anchor() {
        let map = MirrorMap::new(1.0);
        let feasible = FeasibleSet::origin_ball(2, 10.0);
        let theta0 = vec![0.5, -0.25];
        assert_eq!(rdgd_argmin(&[0.0, 0.0], &map, &theta0, &feasible), theta0);
    }

    #[test]
    fn argmin_hits_ball_boundary() {
        // unconstrained minimizer (2, 0) projects radially onto the unit ball.
        let map = MirrorMap::new(1.0);
        let feasible = FeasibleSet::origin_ball(2, 1.0);
        let u = rdgd_argmin(&[-2.0, 0.0], &map, &[0.0, 0.0], &feasible);
        assert!((u[0] - 1.0).abs() < 1e-15 && u[1] == 0.0);
    }

    #[test]
    fn sc_argmin_with_single_round_is_two_term_average() {
        // t = 1, eta1 = 1: u* = (theta1 + theta0 - S_g/alpha)/2 before projection.
        let alpha = 2.0;
        let theta0 = vec![1.0, 0.0];
        let theta1 = vec![0.0, 1.0];
        let s_g = vec![0.4, -0.4];
        let feasible = FeasibleSet::origin_ball(2, 100.0);
        let u = rdgd_sc_argmin(&s_g, &theta1, 1.0, alpha, 1.0, &theta0, &feasible);
        for i in 0..2 {
            let expect = (theta1[i] + theta0[i] - s_g[i] / alpha) / 2.0;
            assert!((u[i] - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn sc_argmin_anchored_at_theta0_stays_there() {
        // S_g = 0 and every theta_k = theta0 make theta0 the pure-quadratic
        // minimizer.
        let theta0 = vec![0.3, 0.7];
        let h_t = 5.0;
        let s_theta: Vec<f64> = theta0.iter().map(|x| h_t * x).collect();
        let feasible = FeasibleSet::origin_ball(2, 10.0);
        let u = rdgd_sc_argmin(&[0.0, 0.0], &s_theta, h_t, 1.5, 1.0, &theta0, &feasible);
        for i in 0..2 {
            assert!((u[i] - theta0[i]).abs() < 1e-14);
        }
    }
}
