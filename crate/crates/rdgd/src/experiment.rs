//! Experiment orchestration: dataset construction, constant resolution,
//! multi-trial execution, and cross-trial aggregation.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::bounds::{BoundCase, BoundParams, BoundTracker};
use crate::channel::{BudgetLedger, ChannelModel, CorruptionPolicy};
use crate::config::{DataSource, ExperimentConfig, ScheduleSpec};
use crate::engine::{Algorithm, RestartPlan, RoundTrace, Simulation, SimulationOutput};
use crate::error::{Error, Result};
use crate::io::idx;
use crate::losses::{
    reference_optimum, synthesize_regression, synthesize_twoclass, Dataset, LossKind, LossModel,
    ReferenceOptimum, SolveMethod,
};
use crate::mirror::{FeasibleSet, MirrorMap};
use crate::numerics::rng::{Direction, RngRoot, RngStream};
use crate::numerics::vec;
use crate::schedule::{ScheduleKind, StepsizeSchedule};

/// Constants resolved from data and config before any round runs. These are
/// echoed into the run metadata so no hidden value influences a result.
#[derive(Debug, Clone)]
pub struct ResolvedConstants {
    pub m_smooth: f64,
    pub alpha: f64,
    pub beta: f64,
    pub ratio_a: Option<f64>,
    pub eta1: f64,
    pub t0: Option<usize>,
    pub t0_lambert: Option<bool>,
    pub loss_star: Option<f64>,
    pub theta_star_norm: Option<f64>,
    pub r_theta: Option<f64>,
    pub reference_method: Option<&'static str>,
    pub train_n: usize,
    pub test_n: usize,
    pub dim: usize,
}

#[derive(Debug, Clone)]
pub struct AggregateRow {
    pub t: usize,
    pub gap_mean: Option<f64>,
    pub gap_std: Option<f64>,
    pub accuracy_mean: Option<f64>,
    pub accuracy_std: Option<f64>,
    pub bound: Option<f64>,
}

#[derive(Debug)]
pub struct RunResult {
    pub config: ExperimentConfig,
    pub constants: ResolvedConstants,
    pub warnings: Vec<String>,
    pub trials: Vec<Vec<RoundTrace>>,
    pub aggregate: Vec<AggregateRow>,
}

/// Everything shared across trials.
pub struct ExperimentSetup {
    pub config: ExperimentConfig,
    pub model: LossModel,
    pub test_set: Option<Dataset>,
    pub reference: Option<ReferenceOptimum>,
    pub record_gap: bool,
    pub beta: f64,
    pub schedule_kind: ScheduleKind,
    pub restart: Option<RestartPlan>,
    pub bound_setup: Option<(BoundCase, BoundParams)>,
    pub constants: ResolvedConstants,
    pub warnings: Vec<String>,
}

fn build_dataset(config: &ExperimentConfig) -> Result<(Dataset, Option<Dataset>)> {
    match &config.data {
        DataSource::SyntheticRegression { n, p } => {
            let mut rng = RngStream::from_path(config.seed, 0, 0, 0, Direction::Data);
            let (data, _theta_true) = synthesize_regression(&mut rng, *n, *p);
            Ok((data, None))
        }
        DataSource::SyntheticTwoclass { n, p, gamma, test_fraction } => {
            let mut rng = RngStream::from_path(config.seed, 0, 0, 0, Direction::Data);
            let data = synthesize_twoclass(&mut rng, *n, *p, *gamma);
            data.split_tail(*test_fraction)
        }
        DataSource::Mnist {
            train_images,
            train_labels,
            test_images,
            test_labels,
            subsample_train,
            subsample_test,
        } => {
            let classes = match config.loss {
                LossKind::SoftmaxCe { classes } => classes,
                _ => 10,
            };
            let mut train = idx::load_mnist(train_images, train_labels)?;
            if *subsample_train > 0 {
                let mut rng = RngStream::from_path(config.seed, 0, 0, 1, Direction::Data);
                train = idx::stratified_subsample(&train, *subsample_train, classes, &mut rng)?;
            }
            let mut test = idx::load_mnist(test_images, test_labels)?;
            if *subsample_test > 0 {
                let mut rng = RngStream::from_path(config.seed, 0, 0, 2, Direction::Data);
                test = idx::stratified_subsample(&test, *subsample_test, classes, &mut rng)?;
            }
            Ok((train, Some(test)))
        }
        DataSource::Csv { path, test_fraction } => {
            let data = crate::io::csv::load_csv_dataset(path)?;
            data.split_tail(*test_fraction)
        }
    }
}

/// Verify the strongly convex stepsize hypothesis eta_k <= (alpha/M) H_k over the
/// whole horizon. The k-varying 2/(k+1) schedule is allowed through with a
/// warning; any other violating schedule is rejected.
fn check_sc_stepsize(
    kind: ScheduleKind,
    alpha: f64,
    m_smooth: f64,
    horizon: usize,
    warnings: &mut Vec<String>,
) -> Result<()> {
    let mut schedule = StepsizeSchedule::new(kind)?;
    let bound_ratio = alpha / m_smooth;
    for k in 1..=horizon {
        let (eta, h) = schedule.next();
        if k >= 2 && eta > bound_ratio * h * (1.0 + 1e-12) {
            if matches!(kind, ScheduleKind::RatioHarmonic) {
                warnings.push(format!(
                    "schedule ratio_harmonic violates eta_k <= (alpha/M) H_k at k = {k} (2/(k+1) = {:.6} > alpha/M = {bound_ratio:.6}); proceeding, as this named schedule is analyzed without the hypothesis",
                    2.0 / (k as f64 + 1.0),
                ));
                return Ok(());
            }
            return Err(Error::Schedule(format!(
                "eta_k <= (alpha/M) H_k fails at k = {k} for schedule {} (eta = {eta:.6e}, (alpha/M) H = {:.6e})",
                kind.name(),
                bound_ratio * h
            )));
        }
    }
    Ok(())
}

pub fn prepare(config: ExperimentConfig) -> Result<ExperimentSetup> {
    let mut warnings = Vec::new();

    let (mut train, test_set) = build_dataset(&config)?;
    if train.len() % config.workers != 0 {
        return Err(Error::ConfigGeneral(format!(
            "m must divide N (m = {}, N = {} after splitting)",
            config.workers,
            train.len()
        )));
    }
    train.assign_shards(config.workers)?;
    let train_n = train.len();
    let test_n = test_set.as_ref().map_or(0, |t| t.len());
    let model = LossModel::new(config.loss, train)?;
    let (m_smooth, alpha) = model.curvature_constants();
    let dim = model.param_dim();

    if matches!(config.algorithm, Algorithm::RdgdSc | Algorithm::RdgdRestart) && alpha <= 0.0 {
        return Err(Error::ConfigGeneral(format!(
            "{} requires a strongly convex loss, but alpha = {alpha:.3e} on this dataset",
            config.algorithm.name()
        )));
    }

    let record_gap = config
        .record_gap
        .unwrap_or(matches!(config.loss, LossKind::LeastSquares | LossKind::Ridge { .. }));
    let needs_reference =
        record_gap || config.algorithm == Algorithm::RdgdRestart || config.bounds;
    let reference = if needs_reference { Some(reference_optimum(&model)?) } else { None };
    if let Some(reference) = &reference {
        let norm = vec::norm2(&reference.theta_star);
        if norm > config.radius {
            return Err(Error::OptimumOutsideBall { norm, radius: config.radius });
        }
    }
    // Theta is the origin-centered ball and theta_0 = 0, so
    // R_Theta = radius + |center - theta*| = radius + |theta*|.
    let r_theta = reference.as_ref().map(|r| config.radius + vec::norm2(&r.theta_star));

    let ratio_a_resolved = match config.schedule {
        ScheduleSpec::Ratio(Some(a)) => Some(a),
        ScheduleSpec::Ratio(None) => {
            if alpha <= 0.0 {
                return Err(Error::Schedule(
                    "ratio_a = auto needs a strongly convex loss (alpha > 0)".into(),
                ));
            }
            if alpha >= m_smooth {
                return Err(Error::Schedule(format!(
                    "ratio_a = alpha/M = {:.6} is not below 1; the ratio schedule degenerates",
                    alpha / m_smooth
                )));
            }
            Some(alpha / m_smooth)
        }
        _ => None,
    };
    let schedule_kind = match config.schedule {
        ScheduleSpec::FixedHorizon => ScheduleKind::FixedHorizon { horizon: config.horizon },
        ScheduleSpec::InvSqrt => ScheduleKind::InvSqrt,
        ScheduleSpec::PowerLaw => ScheduleKind::PowerLaw,
        ScheduleSpec::Ratio(_) => ScheduleKind::Ratio { a: ratio_a_resolved.expect("resolved above") },
        ScheduleSpec::RatioHarmonic => ScheduleKind::RatioHarmonic,
    };
    let eta1 = {
        let mut s = StepsizeSchedule::new(schedule_kind)?;
        s.next().0
    };

    if config.algorithm == Algorithm::RdgdSc {
        check_sc_stepsize(schedule_kind, alpha, m_smooth, config.horizon, &mut warnings)?;
    }

    let beta = match config.beta {
        Some(b) => b,
        None => match config.algorithm {
            Algorithm::Rdgd | Algorithm::Dgd => m_smooth,
            Algorithm::RdgdSc | Algorithm::RdgdRestart => eta1 * alpha,
        },
    };

    let restart = if config.algorithm == Algorithm::RdgdRestart {
        let r_theta = r_theta.expect("restart computes a reference");
        let tt = crate::engine::transition_time(m_smooth, alpha, r_theta, config.r)?;
        if !tt.lambert {
            warnings.push(format!(
                "B(r) = {:.3e} lies below -1/e; transition time found by brute-force scan",
                tt.b_value
            ));
        }
        if tt.t0 >= config.horizon {
            warnings.push(format!(
                "transition time t0 = {} is at or beyond the horizon {}; the run degenerates to pure stage 1",
                tt.t0, config.horizon
            ));
        }
        // Stage 2 runs the k-varying ratio; same caveat as the named
        // schedule exception above.
        check_sc_stepsize(ScheduleKind::RatioHarmonic, alpha, m_smooth, config.horizon, &mut warnings)?;
        Some((tt, RestartPlan { t0: tt.t0, full_reset: config.restart_full_reset }))
    } else {
        None
    };

    let bound_setup = if config.bounds {
        if config.algorithm == Algorithm::RdgdRestart && config.restart_full_reset {
            warnings.push(
                "the restart bound assumes the round index and H-recurrence continue across the \
                 switch; under restart_mode = full_reset the overlay is only indicative"
                    .into(),
            );
        }
        let reference = reference
            .as_ref()
            .expect("bounds force a reference optimum");
        let case = match config.algorithm {
            Algorithm::Rdgd => BoundCase::Smooth,
            Algorithm::RdgdSc => BoundCase::StronglyConvex,
            Algorithm::RdgdRestart => {
                BoundCase::Restart { t0: restart.as_ref().expect("restart plan").1.t0 }
            }
            Algorithm::Dgd => {
                return Err(Error::ConfigGeneral(
                    "no theoretical bound is defined for dgd; drop `bounds = true`".into(),
                ))
            }
        };
        let theta0 = vec![0.0; dim];
        let map = MirrorMap::new(beta);
        let d_psi_star = map.bregman(&reference.theta_star, &theta0);
        let dist0_sq = vec::dot(&reference.theta_star, &reference.theta_star);
        let params = BoundParams {
            m_smooth,
            mu: beta,
            alpha,
            sigma: config.sigma2.sqrt(),
            dim,
            workers: config.workers,
            r_theta: r_theta.expect("reference implies r_theta"),
            d_psi_star,
            dist0_sq,
            kappa: if config.corruption == CorruptionPolicy::None { 0.0 } else { config.kappa },
            r: config.r,
        };
        Some((case, params))
    } else {
        None
    };

    let constants = ResolvedConstants {
        m_smooth,
        alpha,
        beta,
        ratio_a: ratio_a_resolved,
        eta1,
        t0: restart.as_ref().map(|(tt, _)| tt.t0),
        t0_lambert: restart.as_ref().map(|(tt, _)| tt.lambert),
        loss_star: reference.as_ref().map(|r| r.loss_star),
        theta_star_norm: reference.as_ref().map(|r| vec::norm2(&r.theta_star)),
        r_theta,
        reference_method: reference.as_ref().map(|r| match r.method {
            SolveMethod::NormalEquations => "normal_equations",
            SolveMethod::GradientDescent => "gradient_descent",
        }),
        train_n,
        test_n,
        dim,
    };

    Ok(ExperimentSetup {
        restart: restart.map(|(_, plan)| plan),
        config,
        model,
        test_set,
        reference,
        record_gap,
        beta,
        schedule_kind,
        bound_setup,
        constants,
        warnings,
    })
}

/// Run one trial against a prepared setup.
pub fn run_trial(setup: &ExperimentSetup, trial: usize) -> Result<SimulationOutput> {
    let config = &setup.config;
    let schedule = StepsizeSchedule::new(setup.schedule_kind)?;
    let ledger = BudgetLedger::new(
        if config.corruption == CorruptionPolicy::None { 0.0 } else { config.kappa },
        config.r,
        config.horizon,
    )?;
    let dim = setup.model.param_dim();
    let theta0 = vec![0.0; dim];
    let mut sim = Simulation::new(
        config.algorithm,
        &setup.model,
        ChannelModel::new(config.sigma2.sqrt()),
        config.corruption,
        schedule,
        MirrorMap::new(setup.beta),
        FeasibleSet::origin_ball(dim, config.radius),
        ledger,
        RngRoot::new(config.seed, trial as u64),
        theta0,
    )?;
    if setup.record_gap {
        if let Some(reference) = &setup.reference {
            sim = sim.with_reference(reference);
        }
    }
    if let Some(test) = &setup.test_set {
        sim = sim.with_test_set(test);
    }
    if let Some(plan) = setup.restart {
        sim = sim.with_restart(plan);
    }
    if let Some((case, params)) = setup.bound_setup {
        sim = sim.with_bound_tracker(BoundTracker::new(case, params));
    }
    sim.run(config.horizon)
}

fn welford(values: &[f64]) -> (f64, f64) {
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (i, v) in values.iter().enumerate() {
        let count = (i + 1) as f64;
        let delta = v - mean;
        mean += delta / count;
        m2 += delta * (v - mean);
    }
    let std = if values.len() > 1 { (m2 / (values.len() as f64 - 1.0)).sqrt() } else { 0.0 };
    (mean, std)
}

fn aggregate(trials: &[Vec<RoundTrace>]) -> Vec<AggregateRow> {
    let rounds = trials[0].len();
    let mut out = Vec::with_capacity(rounds);
    let mut gaps = Vec::with_capacity(trials.len());
    let mut accs = Vec::with_capacity(trials.len());
    for t_idx in 0..rounds {
        gaps.clear();
        accs.clear();
        for trial in trials {
            if let Some(g) = trial[t_idx].gap {
                gaps.push(g);
            }
            if let Some(a) = trial[t_idx].accuracy {
                accs.push(a);
            }
        }
        let (gap_mean, gap_std) = if gaps.len() == trials.len() {
            let (m, s) = welford(&gaps);
            (Some(m), Some(s))
        } else {
            (None, None)
        };
        let (accuracy_mean, accuracy_std) = if accs.len() == trials.len() {
            let (m, s) = welford(&accs);
            (Some(m), Some(s))
        } else {
            (None, None)
        };
        out.push(AggregateRow {
            t: t_idx + 1,
            gap_mean,
            gap_std,
            accuracy_mean,
            accuracy_std,
            bound: trials[0][t_idx].bound,
        });
    }
    out
}

/// Run all trials (in parallel when `jobs > 1`) and aggregate.
pub fn run_experiment(config: ExperimentConfig) -> Result<RunResult> {
    let setup = prepare(config)?;
    let trials_n = setup.config.trials;
    let jobs = setup.config.jobs.min(trials_n).max(1);

    let slots: Vec<Mutex<Option<Result<SimulationOutput>>>> =
        (0..trials_n).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let trial = next.fetch_add(1, Ordering::Relaxed);
                if trial >= trials_n {
                    break;
                }
                let outcome = run_trial(&setup, trial);
                *slots[trial].lock().expect("trial slot") = Some(outcome);
            });
        }
    });

    let mut trials = Vec::with_capacity(trials_n);
    for (trial, slot) in slots.into_iter().enumerate() {
        let outcome = slot.into_inner().expect("trial slot").expect("trial ran");
        match outcome {
            Ok(output) => trials.push(output.traces),
            // Simulation::run already wraps step failures with the trial
            // index and round; anything else comes from per-trial setup.
            Err(err @ Error::TrialAborted { .. }) => return Err(err),
            Err(err) => return Err(Error::TrialAborted { trial, round: 0, source: Box::new(err) }),
        }
    }

    let aggregate_rows = aggregate(&trials);
    Ok(RunResult {
        config: setup.config,
        constants: setup.constants,
        warnings: setup.warnings,
        trials,
        aggregate: aggregate_rows,
    })
}
