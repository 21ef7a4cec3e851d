//! The synchronous round protocol: a parameter server and m workers running
//! DGD, RDGD, RDGD-SC, or RDGD-Restart over the noisy, corrupted channel.

use crate::bounds::BoundTracker;
use crate::channel::{corrupt, downlink, uplink, BudgetLedger, ChannelModel, CorruptionPolicy};
use crate::error::{Error, Result};
use crate::losses::{LossModel, ReferenceOptimum};
use crate::mirror::{rdgd_argmin, rdgd_sc_argmin, FeasibleSet, MirrorMap};
use crate::numerics::lambert::lambert_w_minus1;
use crate::numerics::rng::RngRoot;
use crate::numerics::vec;
use crate::schedule::{ScheduleKind, StepsizeSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Dgd,
    Rdgd,
    RdgdSc,
    RdgdRestart,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Dgd => "dgd",
            Algorithm::Rdgd => "rdgd",
            Algorithm::RdgdSc => "rdgd_sc",
            Algorithm::RdgdRestart => "rdgd_restart",
        }
    }

    pub fn uses_mirror(&self) -> bool {
        !matches!(self, Algorithm::Dgd)
    }
}

/// Per-round record of the quantities the experiments report.
#[derive(Debug, Clone)]
pub struct RoundTrace {
    pub t: usize,
    /// L(output_t) - L(theta*); absent when no reference optimum was set up.
    pub gap: Option<f64>,
    /// Realized aggregate corruption |sum_i eps_i|_2 this round.
    pub c_t: f64,
    /// Gamma(t) = sum_{k<=t} c_k^2.
    pub budget_spent: f64,
    pub accuracy: Option<f64>,
    pub bound: Option<f64>,
}

/// Switch plan for RDGD-Restart.
#[derive(Debug, Clone, Copy)]
pub struct RestartPlan {
    pub t0: usize,
    /// When set, stage 2 restarts the stepsize schedule from k = 1 as well;
    /// otherwise the round index and H-recurrence continue across the switch
    /// while the server state re-anchors at theta_{t0}.
    pub full_reset: bool,
}

/// The parameter server's evolving tuple.
#[derive(Debug, Clone)]
struct ServerState {
    /// Current broadcast parameter theta_t.
    theta: Vec<f64>,
    /// Anchor of the Bregman regularizer (theta_0, or theta_{t0} after a
    /// restart).
    anchor: Vec<f64>,
    /// Dual vector, maintained by the z_t = z_{t-1} - eta_t gtilde_t
    /// recurrence.
    z: Vec<f64>,
    /// Weighted-average output, maintained by the running recurrence
    /// theta_hat <- (H_{t-1}/H_t) theta_hat + (eta_t/H_t) theta_t.
    theta_hat: Vec<f64>,
    /// Sum of stepsizes since the current anchor epoch began.
    h: f64,
    /// sum eta_k gtilde_k since the epoch began.
    s_g: Vec<f64>,
    /// sum eta_k theta_k since the epoch began.
    s_theta: Vec<f64>,
    /// Completed rounds (global, never reset).
    t: usize,
    // Scalar accumulators for evaluating h_t(u) in O(p):
    // sum eta_k <gtilde_k, theta_k> and sum eta_k |theta_k|^2.
    dot_g_theta: f64,
    theta_sq: f64,
    /// h_{t-1}(theta_t), carried across rounds for the trajectory checks.
    prev_h_value: f64,
}

impl ServerState {
    fn fresh(theta0: Vec<f64>, beta: f64, t: usize) -> Self {
        let z = theta0.iter().map(|x| beta * x).collect();
        ServerState {
            anchor: theta0.clone(),
            z,
            theta_hat: theta0.clone(),
            theta: theta0.clone(),
            h: 0.0,
            s_g: vec![0.0; theta0.len()],
            s_theta: vec![0.0; theta0.len()],
            t,
            dot_g_theta: 0.0,
            theta_sq: 0.0,
            prev_h_value: 0.0,
        }
    }
}

/// Everything a finished run exposes.
#[derive(Debug)]
pub struct SimulationOutput {
    pub traces: Vec<RoundTrace>,
    pub ledger: BudgetLedger,
    /// Trajectory-inequality slacks per round, when tracking was enabled.
    pub trajectory_slacks: Vec<f64>,
    pub final_theta: Vec<f64>,
    pub final_output: Vec<f64>,
    /// Broadcast iterates theta_1..theta_T, when recording was enabled.
    pub iterates: Vec<Vec<f64>>,
    /// Evaluated outputs per round (theta-hat, or theta for DGD).
    pub outputs: Vec<Vec<f64>>,
}

pub struct Simulation<'a> {
    algorithm: Algorithm,
    model: &'a LossModel,
    channel: ChannelModel,
    policy: CorruptionPolicy,
    map: MirrorMap,
    feasible: FeasibleSet,
    schedule: StepsizeSchedule,
    ledger: BudgetLedger,
    rng: RngRoot,
    reference: Option<&'a ReferenceOptimum>,
    test_set: Option<&'a crate::losses::Dataset>,
    restart: Option<RestartPlan>,
    bound_tracker: Option<BoundTracker>,
    worker_order: Vec<usize>,
    track_trajectory_slack: bool,
    record_iterates: bool,
    state: ServerState,
    restart_anchor: Option<Vec<f64>>,
    last_broadcast: Vec<f64>,
}

impl<'a> Simulation<'a> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        algorithm: Algorithm,
        model: &'a LossModel,
        channel: ChannelModel,
        policy: CorruptionPolicy,
        schedule: StepsizeSchedule,
        map: MirrorMap,
        feasible: FeasibleSet,
        ledger: BudgetLedger,
        rng: RngRoot,
        theta0: Vec<f64>,
    ) -> Result<Self> {
        if theta0.len() != model.param_dim() {
            return Err(Error::DimensionMismatch(format!(
                "theta0 has {} entries, model expects {}",
                theta0.len(),
                model.param_dim()
            )));
        }
        if !vec::all_finite(&theta0) {
            return Err(Error::NonFinite { context: "initial parameter".into() });
        }
        let m = model.dataset.workers();
        if m == 0 {
            return Err(Error::ConfigGeneral("dataset has no shards assigned".into()));
        }
        let state = ServerState::fresh(theta0, map.beta, 0);
        Ok(Simulation {
            algorithm,
            model,
            channel,
            policy,
            map,
            feasible,
            schedule,
            ledger,
            rng,
            reference: None,
            test_set: None,
            restart: None,
            bound_tracker: None,
            worker_order: (0..m).collect(),
            track_trajectory_slack: false,
            record_iterates: false,
            state,
            restart_anchor: None,
            last_broadcast: Vec::new(),
        })
    }

    pub fn with_reference(mut self, reference: &'a ReferenceOptimum) -> Self {
        self.reference = Some(reference);
        self
    }

    pub fn with_test_set(mut self, test: &'a crate::losses::Dataset) -> Self {
        self.test_set = Some(test);
        self
    }

    pub fn with_restart(mut self, plan: RestartPlan) -> Self {
        self.restart = Some(plan);
        self
    }

    pub fn with_bound_tracker(mut self, tracker: BoundTracker) -> Self {
        self.bound_tracker = Some(tracker);
        self
    }

    /// Evaluation order of the worker pipelines. Aggregation always runs in
    /// worker-id order, so any permutation here must leave results
    /// bit-identical; this hook exists to assert exactly that.
    pub fn with_worker_order(mut self, order: Vec<usize>) -> Self {
        assert_eq!(order.len(), self.worker_order.len());
        self.worker_order = order;
        self
    }

    pub fn track_trajectory_slack(mut self) -> Self {
        self.track_trajectory_slack = true;
        self
    }

    pub fn record_iterates(mut self) -> Self {
        self.record_iterates = true;
        self
    }

    pub fn run(mut self, rounds: usize) -> Result<SimulationOutput> {
        let trial = self.rng.trial as usize;
        let mut traces = Vec::with_capacity(rounds);
        let mut slacks = Vec::new();
        let mut iterates = Vec::new();
        let mut outputs = Vec::new();
        for round in 1..=rounds {
            let (trace, slack) = self.step().map_err(|e| match e {
                wrapped @ Error::TrialAborted { .. } => wrapped,
                source => Error::TrialAborted { trial, round, source: Box::new(source) },
            })?;
            if self.track_trajectory_slack {
                if let Some(s) = slack {
                    slacks.push(s);
                }
            }
            if self.record_iterates {
                iterates.push(self.last_broadcast.clone());
                outputs.push(self.output_point().to_vec());
            }
            traces.push(trace);
        }
        let final_output = self.output_point().to_vec();
        Ok(SimulationOutput {
            traces,
            ledger: self.ledger,
            trajectory_slacks: slacks,
            final_theta: self.state.theta,
            final_output,
            iterates,
            outputs,
        })
    }

    fn output_point(&self) -> &[f64] {
        match self.algorithm {
            Algorithm::Dgd => &self.state.theta,
            _ => &self.state.theta_hat,
        }
    }

    fn step(&mut self) -> Result<(RoundTrace, Option<f64>)> {
        let t = self.state.t + 1;

        // Restart boundary: re-anchor at theta_{t0} before round t0+1 runs.
        if let Some(plan) = self.restart {
            if self.algorithm == Algorithm::RdgdRestart && t == plan.t0 + 1 {
                let anchor = self
                    .restart_anchor
                    .take()
                    .expect("restart boundary reached without a saved anchor");
                let global_t = self.state.t;
                self.state = ServerState::fresh(anchor, self.map.beta, global_t);
                if plan.full_reset {
                    self.schedule = StepsizeSchedule::new(ScheduleKind::RatioHarmonic)?;
                } else {
                    self.schedule.switch_kind(ScheduleKind::RatioHarmonic);
                }
            }
        }

        let (eta, _h_sched) = self.schedule.next();
        let theta_t = self.state.theta.clone();
        self.last_broadcast = theta_t.clone();
        let m = self.model.dataset.workers();
        let dim = self.model.param_dim();

        // Worker pipelines: downlink -> shard gradient. Results land in
        // worker-id slots regardless of evaluation order.
        let mut grads: Vec<Vec<f64>> = vec![Vec::new(); m];
        for &w in &self.worker_order {
            let theta_w = downlink(&theta_t, w, t, &self.channel, &self.rng);
            grads[w] = self.model.shard_gradient(w, &theta_w)?;
        }

        // Adversary sees the clean-channel gradients and places corruption.
        let (epsilons, c_t) = corrupt(self.policy, &grads, &self.ledger, t, &self.rng);
        self.ledger.record(c_t)?;

        // Uplink and server-side mean, aggregated in worker-id order.
        let mut mean = vec![0.0; dim];
        for w in 0..m {
            let mut bar = std::mem::take(&mut grads[w]);
            vec::axpy(1.0, &epsilons[w], &mut bar);
            let tilde = uplink(&bar, w, t, &self.channel, &self.rng);
            vec::axpy(1.0, &tilde, &mut mean);
        }
        vec::scale(&mut mean, 1.0 / m as f64);
        if !vec::all_finite(&mean) {
            return Err(Error::NonFinite { context: "the aggregated gradient".into() });
        }

        let mut slack = None;
        match self.algorithm {
            Algorithm::Dgd => {
                vec::axpy(-eta, &mean, &mut self.state.theta);
                if !vec::all_finite(&self.state.theta) {
                    return Err(Error::NonFinite { context: "the DGD iterate".into() });
                }
            }
            Algorithm::Rdgd | Algorithm::RdgdSc | Algorithm::RdgdRestart => {
                slack = self.mirror_update(t, eta, &theta_t, &mean)?;
            }
        }

        self.state.t = t;
        if let Some(plan) = self.restart {
            if self.algorithm == Algorithm::RdgdRestart && t == plan.t0 {
                self.restart_anchor = Some(theta_t);
            }
        }

        let eval = self.output_point().to_vec();
        let gap = match self.reference {
            Some(reference) => {
                let g = self.model.loss_value(&eval)? - reference.loss_star;
                if g < -1e-9 {
                    return Err(Error::Invariant {
                        t,
                        what: format!("suboptimality gap {g:e} fell below -1e-9"),
                    });
                }
                Some(g)
            }
            None => None,
        };
        let accuracy = match self.test_set {
            Some(test) if self.model.kind.is_classification() => {
                Some(self.model.accuracy_on(&eval, test)?)
            }
            _ => None,
        };
        let bound = match self.bound_tracker.as_mut() {
            Some(tracker) => Some(tracker.on_round(t, eta)?),
            None => None,
        };

        let trace = RoundTrace { t, gap, c_t, budget_spent: self.ledger.spent(), accuracy, bound };
        Ok((trace, slack))
    }

    /// The server's dual, averaging, and argmin updates; returns the
    /// trajectory-inequality slack when tracking is on.
    fn mirror_update(&mut self, t: usize, eta: f64, theta_t: &[f64], mean: &[f64]) -> Result<Option<f64>> {
        let state = &mut self.state;
        let strongly_convex = matches!(self.algorithm, Algorithm::RdgdSc | Algorithm::RdgdRestart);
        let alpha = self.model.alpha();

        // Dual recurrence plus the running sums it telescopes to.
        vec::axpy(-eta, mean, &mut state.z);
        vec::axpy(eta, mean, &mut state.s_g);

        // Weighted-average output.
        let h_prev = state.h;
        let h_new = h_prev + eta;
        for (hat, t_i) in state.theta_hat.iter_mut().zip(theta_t) {
            *hat = (h_prev / h_new) * *hat + (eta / h_new) * t_i;
        }
        vec::axpy(eta, theta_t, &mut state.s_theta);
        state.h = h_new;
        state.dot_g_theta += eta * vec::dot(mean, theta_t);
        state.theta_sq += eta * vec::dot(theta_t, theta_t);

        // Closed-form argmin.
        let next = if strongly_convex {
            let eta1 = self.map.beta / alpha;
            rdgd_sc_argmin(&state.s_g, &state.s_theta, h_new, alpha, eta1, &state.anchor, &self.feasible)
        } else {
            rdgd_argmin(&state.s_g, &self.map, &state.anchor, &self.feasible)
        };
        if !vec::all_finite(&next) {
            return Err(Error::NonFinite { context: "the mirror iterate".into() });
        }

        // Trajectory-inequality slack: h_t(theta_{t+1}) - h_{t-1}(theta_t)
        // minus its lower bound.
        let slack = if self.track_trajectory_slack {
            let h_at_next = self.h_value(&next);
            let step = vec::sub(&next, theta_t);
            let step_sq = vec::dot(&step, &step);
            let rhs = if strongly_convex {
                eta * vec::dot(mean, &step) + (self.state.h + eta) * alpha / 2.0 * step_sq
            } else {
                eta * vec::dot(mean, &step) + 0.5 * self.map.beta * step_sq
            };
            let s = h_at_next - self.state.prev_h_value - rhs;
            self.state.prev_h_value = h_at_next;
            Some(s)
        } else {
            None
        };

        let state = &mut self.state;
        state.theta = next;

        // Server-state identities (dual recurrence telescoped; the average
        // as an explicit weighted sum) and feasibility.
        let scale_z = 1.0f64.max(vec::norm_inf(&state.s_g));
        for i in 0..state.z.len() {
            let telescoped = self.map.beta * state.anchor[i] - state.s_g[i];
            if (state.z[i] - telescoped).abs() > 1e-10 * scale_z {
                return Err(Error::Invariant { t, what: "dual state drifted from z0 - S_g".into() });
            }
        }
        let scale_h = 1.0f64.max(vec::norm_inf(&state.theta_hat));
        for i in 0..state.theta_hat.len() {
            if (state.theta_hat[i] - state.s_theta[i] / state.h).abs() > 1e-10 * scale_h {
                return Err(Error::Invariant { t, what: "theta_hat drifted from S_theta / H_t".into() });
            }
        }
        let slack_r = 1e-12 * self.feasible.radius.max(1.0);
        if !self.feasible.contains(&state.theta, slack_r) || !self.feasible.contains(&state.theta_hat, slack_r)
        {
            return Err(Error::Invariant { t, what: "iterate left the feasible ball".into() });
        }
        Ok(slack)
    }

    /// Evaluate h_t(u) from the running scalar accumulators.
    fn h_value(&self, u: &[f64]) -> f64 {
        let state = &self.state;
        let linear = vec::dot(&state.s_g, u) - state.dot_g_theta;
        let anchor_diff = vec::sub(u, &state.anchor);
        let breg = 0.5 * self.map.beta * vec::dot(&anchor_diff, &anchor_diff);
        if matches!(self.algorithm, Algorithm::RdgdSc | Algorithm::RdgdRestart) {
            let alpha = self.model.alpha();
            let uu = vec::dot(u, u);
            linear
                + 0.5 * alpha * (state.h * uu - 2.0 * vec::dot(&state.s_theta, u) + state.theta_sq)
                + breg
        } else {
            linear + breg
        }
    }
}

/// Free-standing gap evaluation: L(theta_hat) - L(theta*).
pub fn evaluate_gap(model: &LossModel, reference: &ReferenceOptimum, theta_hat: &[f64]) -> Result<f64> {
    Ok(model.loss_value(theta_hat)? - reference.loss_star)
}

/// Free-standing accuracy evaluation on a labeled test set.
pub fn evaluate_accuracy(model: &LossModel, theta: &[f64], test: &crate::losses::Dataset) -> Result<f64> {
    model.accuracy_on(theta, test)
}

/// Result of the analytic transition-time computation.
#[derive(Debug, Clone, Copy)]
pub struct TransitionTime {
    pub t0: usize,
    /// False when B(r) fell outside the W_-1 domain and the brute-force
    /// scan was used instead.
    pub lambert: bool,
    pub b_value: f64,
}

/// Stage-1 suboptimality upper bound whose minimizer defines t0:
/// (alpha R^2 / 2) exp(-(alpha/M)(t-1)) + R t^r.
pub fn stage1_bound(t: f64, m_smooth: f64, alpha: f64, r_theta: f64, r: f64) -> f64 {
    0.5 * alpha * r_theta * r_theta * (-(alpha / m_smooth) * (t - 1.0)).exp()
        + r_theta * t.powf(r)
}

/// Discrete minimizer of `stage1_bound` over t in [2, t_max].
pub fn transition_time_brute_force(m_smooth: f64, alpha: f64, r_theta: f64, r: f64, t_max: usize) -> usize {
    let mut best_t = 2usize;
    let mut best = f64::INFINITY;
    for t in 2..=t_max {
        let v = stage1_bound(t as f64, m_smooth, alpha, r_theta, r);
        if v < best {
            best = v;
            best_t = t;
        }
    }
    best_t
}

/// t0 = ceil(-((1-r) M / alpha) W_-1(B(r))), clamped to at least 2, with
/// B(r) = -(alpha/((1-r)M)) (2 M r / (alpha^2 R exp(alpha/M)))^(1/(1-r)).
/// Falls back to the brute-force scan when B(r) < -1/e.
pub fn transition_time(m_smooth: f64, alpha: f64, r_theta: f64, r: f64) -> Result<TransitionTime> {
    if !(alpha > 0.0 && alpha <= m_smooth) {
        return Err(Error::ConfigGeneral(format!(
            "transition time requires 0 < alpha <= M (alpha = {alpha}, M = {m_smooth})"
        )));
    }
    if !(r > 0.0 && r < 0.5) {
        return Err(Error::ConfigGeneral(format!("transition time requires 0 < r < 1/2, got {r}")));
    }
    if r_theta <= 0.0 {
        return Err(Error::ConfigGeneral(format!("transition time requires R_Theta > 0, got {r_theta}")));
    }
    let base = 2.0 * m_smooth * r / (alpha * alpha * r_theta * (alpha / m_smooth).exp());
    let b = -(alpha / ((1.0 - r) * m_smooth)) * base.powf(1.0 / (1.0 - r));
    if b < -(-1.0f64).exp() {
        // The stationarity equation has no real solution on this branch; the
        // bound is monotone over the scan range, so locate the minimum
        // directly.
        let t0 = transition_time_brute_force(m_smooth, alpha, r_theta, r, 1_000_000);
        return Ok(TransitionTime { t0, lambert: false, b_value: b });
    }
    let w = lambert_w_minus1(b)?;
    let t_real = -((1.0 - r) * m_smooth / alpha) * w;
    let t0 = (t_real.ceil() as usize).max(2);
    Ok(TransitionTime { t0, lambert: true, b_value: b })
}
