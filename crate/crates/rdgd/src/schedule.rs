//! Stepsize schedules generating (eta_k, H_k) pairs, H_k = sum_{j<=k} eta_j.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleKind {
    /// eta_k = 1/sqrt(T) for a horizon known in advance.
    FixedHorizon { horizon: usize },
    /// eta_k = 1/sqrt(k).
    InvSqrt,
    /// eta_k = k^-2.
    PowerLaw,
    /// eta_k = a * H_k with eta_1 = 1; requires a < 1. Solved through the
    /// implicit recurrence H_k = H_{k-1} / (1 - a).
    Ratio { a: f64 },
    /// eta_k = (2/(k+1)) * H_k with eta_1 = 1. From a fresh start this gives
    /// eta_k = k and H_k = k(k+1)/2 exactly; the recurrence form also
    /// continues correctly from a foreign (k, H) state after a restart.
    RatioHarmonic,
}

impl ScheduleKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScheduleKind::FixedHorizon { .. } => "fixed_horizon",
            ScheduleKind::InvSqrt => "inv_sqrt",
            ScheduleKind::PowerLaw => "power_law",
            ScheduleKind::Ratio { .. } => "ratio",
            ScheduleKind::RatioHarmonic => "ratio_harmonic",
        }
    }
}

#[derive(Debug, Clone)]
pub struct StepsizeSchedule {
    kind: ScheduleKind,
    k: usize,
    eta: f64,
    h: f64,
}

impl StepsizeSchedule {
    pub fn new(kind: ScheduleKind) -> Result<Self> {
        match kind {
            ScheduleKind::Ratio { a } => {
                if !(0.0..1.0).contains(&a) || a == 0.0 {
                    return Err(Error::Schedule(format!("ratio schedule requires 0 < a < 1, got {a}")));
                }
            }
            ScheduleKind::FixedHorizon { horizon: 0 } => {
                return Err(Error::Schedule("fixed_horizon schedule needs horizon >= 1".into()));
            }
            _ => {}
        }
        Ok(StepsizeSchedule { kind, k: 0, eta: 0.0, h: 0.0 })
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    /// Round counter of the most recent `next` call.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Advance to the next round and return (eta_k, H_k).
    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> (f64, f64) {
        self.k += 1;
        let k = self.k;
        self.eta = match self.kind {
            ScheduleKind::FixedHorizon { horizon } => 1.0 / (horizon as f64).sqrt(),
            ScheduleKind::InvSqrt => 1.0 / (k as f64).sqrt(),
            ScheduleKind::PowerLaw => 1.0 / ((k * k) as f64),
            ScheduleKind::Ratio { a } => {
                if k == 1 {
                    1.0
                } else {
                    a * self.h / (1.0 - a)
                }
            }
            ScheduleKind::RatioHarmonic => {
                if k == 1 {
                    1.0
                } else {
                    // eta_k = (2/(k+1)) H_k  <=>  eta_k = 2 H_{k-1} / (k-1)
                    2.0 * self.h / (k as f64 - 1.0)
                }
            }
        };
        self.h += self.eta;
        (self.eta, self.h)
    }

    /// Switch the remaining rounds to a different kind, keeping k and H.
    pub fn switch_kind(&mut self, kind: ScheduleKind) {
        self.kind = kind;
    }
}
