//! Noisy uplink/downlink channels, the budget-constrained adversary, and the
//! corruption ledger enforcing |c|_2 <= C(T).

use crate::error::{Error, Result};
use crate::numerics::rng::{Direction, RngRoot};
use crate::numerics::vec;

/// Gaussian channel with the same per-coordinate noise std in both
/// directions.
#[derive(Debug, Clone, Copy)]
pub struct ChannelModel {
    sigma: f64,
}

impl ChannelModel {
    pub fn new(sigma: f64) -> Self {
        assert!(sigma >= 0.0, "channel sigma must be nonnegative");
        ChannelModel { sigma }
    }

    /// Noise std at round t. The model admits a time-varying schedule; every
    /// experiment here uses a constant one.
    pub fn sigma_at(&self, _t: usize) -> f64 {
        self.sigma
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// theta_t + v with v ~ N(0, sigma^2 I), independent per (worker, round).
pub fn downlink(theta: &[f64], worker: usize, t: usize, ch: &ChannelModel, rng: &RngRoot) -> Vec<f64> {
    perturb(theta, ch.sigma_at(t), rng.stream(t, worker, Direction::Downlink))
}

/// gbar + w with w ~ N(0, sigma^2 I), on a stream independent of the
/// downlink stream of the same (worker, round).
pub fn uplink(g_bar: &[f64], worker: usize, t: usize, ch: &ChannelModel, rng: &RngRoot) -> Vec<f64> {
    perturb(g_bar, ch.sigma_at(t), rng.stream(t, worker, Direction::Uplink))
}

fn perturb(v: &[f64], sigma: f64, mut stream: crate::numerics::rng::RngStream) -> Vec<f64> {
    if sigma == 0.0 {
        return v.to_vec();
    }
    let noise = stream.gaussian_vector(v.len(), sigma);
    v.iter().zip(&noise).map(|(a, b)| a + b).collect()
}

/// Tracks spent corruption Gamma(t) = sum c_k^2 against the envelope
/// C(t) = kappa * t^r.
#[derive(Debug, Clone)]
pub struct BudgetLedger {
    pub kappa: f64,
    pub r: f64,
    pub horizon: usize,
    spent: f64,
    history: Vec<f64>,
}

impl BudgetLedger {
    pub fn new(kappa: f64, r: f64, horizon: usize) -> Result<Self> {
        if kappa < 0.0 {
            return Err(Error::ConfigGeneral(format!("kappa must be nonnegative, got {kappa}")));
        }
        if !(0.0..1.0).contains(&r) {
            return Err(Error::ConfigGeneral(format!("corruption exponent r must lie in [0, 1), got {r}")));
        }
        Ok(BudgetLedger { kappa, r, horizon, spent: 0.0, history: Vec::new() })
    }

    /// C(t) = kappa * t^r.
    pub fn envelope(&self, t: usize) -> f64 {
        self.kappa * (t as f64).powf(self.r)
    }

    /// Gamma so far.
    pub fn spent(&self) -> f64 {
        self.spent
    }

    pub fn history(&self) -> &[f64] {
        &self.history
    }

    /// sqrt(max(0, C(t)^2 - Gamma(t-1))): what the adversary may still place
    /// at round t without ever exceeding the envelope.
    pub fn available_budget(&self, t: usize) -> f64 {
        debug_assert!(t >= 1);
        let c = self.envelope(t);
        (c * c - self.spent).max(0.0).sqrt()
    }

    /// Record the realized aggregate corruption c_t. Rejects histories that
    /// breach the envelope; the adversary implementations stay under it by
    /// construction, so a violation is an adversary bug.
    pub fn record(&mut self, c_t: f64) -> Result<()> {
        assert!(c_t >= 0.0);
        let t = self.history.len() + 1;
        let next = self.spent + c_t * c_t;
        let cap = self.envelope(t).powi(2);
        if next > cap * (1.0 + 1e-9) {
            return Err(Error::BudgetViolation { t, spent: next.sqrt(), envelope: cap.sqrt() });
        }
        self.spent = next;
        self.history.push(c_t);
        Ok(())
    }
}

/// How the adversary spreads its budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorruptionPolicy {
    /// No corruption at all.
    None,
    /// Spend the whole remaining per-round allowance, split across workers by
    /// normalized uniform draws.
    ResidualGreedy,
    /// Fixed per-round spend C(T)/sqrt(T), split equally across workers.
    UniformSplit,
}

impl CorruptionPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            CorruptionPolicy::None => "none",
            CorruptionPolicy::ResidualGreedy => "residual_greedy",
            CorruptionPolicy::UniformSplit => "uniform_split",
        }
    }
}

/// Unit l2 direction opposing the sign pattern of `g`; zero coordinates
/// contribute nothing. Returns None when g is identically zero.
fn opposing_unit_direction(g: &[f64]) -> Option<Vec<f64>> {
    let nnz = g.iter().filter(|x| **x != 0.0).count();
    if nnz == 0 {
        return None;
    }
    let unit = 1.0 / (nnz as f64).sqrt();
    Some(g.iter().map(|&x| if x == 0.0 { 0.0 } else { -x.signum() * unit }).collect())
}

/// Produce per-worker corruption vectors for round t and the realized
/// aggregate c_t = |sum_i eps_i|_2.
///
/// Each worker's vector points against its own gradient's sign pattern and
/// has norm equal to its allocation, so c_t never exceeds the allocated
/// total by the triangle inequality. A worker whose gradient is identically
/// zero cannot spend; its allocation is redistributed to the rest.
pub fn corrupt(
    policy: CorruptionPolicy,
    worker_gradients: &[Vec<f64>],
    ledger: &BudgetLedger,
    t: usize,
    rng: &RngRoot,
) -> (Vec<Vec<f64>>, f64) {
    let m = worker_gradients.len();
    let p = worker_gradients[0].len();
    let zeros = || vec![vec![0.0; p]; m];
    let total = match policy {
        CorruptionPolicy::None => return (zeros(), 0.0),
        CorruptionPolicy::ResidualGreedy => ledger.available_budget(t),
        CorruptionPolicy::UniformSplit => {
            ledger.envelope(ledger.horizon) / (ledger.horizon as f64).sqrt()
        }
    };
    if total <= 0.0 {
        return (zeros(), 0.0);
    }

    let directions: Vec<Option<Vec<f64>>> =
        worker_gradients.iter().map(|g| opposing_unit_direction(g)).collect();
    let alive = directions.iter().filter(|d| d.is_some()).count();
    if alive == 0 {
        return (zeros(), 0.0);
    }

    // Per-worker magnitudes summing to `total`, over workers able to spend.
    let mut weights = vec![0.0; m];
    match policy {
        CorruptionPolicy::ResidualGreedy => {
            let mut stream = rng.stream(t, 0, Direction::Adversary);
            let mut sum = 0.0;
            for (w, d) in weights.iter_mut().zip(&directions) {
                let u = stream.uniform(); // drawn for every worker to keep paths stable
                if d.is_some() {
                    *w = u;
                    sum += u;
                }
            }
            if sum == 0.0 {
                let eq = 1.0 / alive as f64;
                for (w, d) in weights.iter_mut().zip(&directions) {
                    *w = if d.is_some() { eq } else { 0.0 };
                }
            } else {
                for w in weights.iter_mut() {
                    *w /= sum;
                }
            }
        }
        CorruptionPolicy::UniformSplit => {
            let eq = 1.0 / alive as f64;
            for (w, d) in weights.iter_mut().zip(&directions) {
                *w = if d.is_some() { eq } else { 0.0 };
            }
        }
        CorruptionPolicy::None => unreachable!(),
    }

    let mut epsilons = Vec::with_capacity(m);
    let mut aggregate = vec![0.0; p];
    for (dir, weight) in directions.into_iter().zip(&weights) {
        match dir {
            Some(mut d) => {
                vec::scale(&mut d, total * weight);
                vec::axpy(1.0, &d, &mut aggregate);
                epsilons.push(d);
            }
            None => epsilons.push(vec![0.0; p]),
        }
    }
    let c_t = vec::norm2(&aggregate);
    (epsilons, c_t)
}
