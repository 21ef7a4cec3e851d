//! Acceptance suite: one test per criterion, each printing a single
//! pass/fail line (run with `--nocapture` to see them as they finish).
//!
//! Shared experiment runs are cached per process so the reproduction
//! criteria and the determinism criterion reuse the same artifacts.

mod support;

use std::collections::HashMap;
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use rdgd::channel::{BudgetLedger, ChannelModel, CorruptionPolicy};
use rdgd::config::parse_config;
use rdgd::engine::{transition_time, transition_time_brute_force, Algorithm, Simulation};
use rdgd::experiment::{run_experiment, RunResult};
use rdgd::io::csv::{aggregate_csv, trials_csv};
use rdgd::losses::{synthesize_regression, LossKind, LossModel};
use rdgd::mirror::{rdgd_argmin, rdgd_sc_argmin, FeasibleSet, MirrorMap};
use rdgd::numerics::lambert_w_minus1;
use rdgd::numerics::rng::{Direction, RngRoot, RngStream};
use rdgd::numerics::vec::{dot, norm2, sub};
use rdgd::schedule::{ScheduleKind, StepsizeSchedule};
use support::{directional_fd, grid_search_2d, projected_gradient_min, TestRng};

fn configs_dir() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn load_run(name: &str) -> Arc<RunResult> {
    static CACHE: OnceLock<Mutex<HashMap<String, Arc<OnceLock<Arc<RunResult>>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let cell = cache.lock().unwrap().entry(name.to_string()).or_default().clone();
    cell.get_or_init(|| Arc::new(fresh_run(name))).clone()
}

fn fresh_run(name: &str) -> RunResult {
    let path = configs_dir().join(format!("{name}.conf"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("reading {path:?}: {e}"));
    let mut config = parse_config(&text).unwrap_or_else(|e| panic!("parsing {path:?}: {e}"));
    config.resolve_paths(path.parent().expect("config has a parent dir"));
    run_experiment(config).unwrap_or_else(|e| panic!("running {name}: {e}"))
}

fn final_gap(result: &RunResult) -> f64 {
    result.aggregate.last().unwrap().gap_mean.unwrap()
}

fn final_accuracy(result: &RunResult) -> f64 {
    result.aggregate.last().unwrap().accuracy_mean.unwrap()
}

fn report(criterion: &str, clauses: &[(String, bool)], started: Instant) {
    let ok = clauses.iter().all(|(_, pass)| *pass);
    println!(
        "[{}] {criterion} ({:.1}s)",
        if ok { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64()
    );
    for (what, pass) in clauses {
        if !pass {
            println!("        failed: {what}");
        }
    }
    assert!(ok, "{criterion}: {:?}", clauses.iter().filter(|c| !c.1).map(|c| &c.0).collect::<Vec<_>>());
}

fn ok(what: impl Into<String>, pass: bool) -> (String, bool) {
    (what.into(), pass)
}

// criterion 1 -------------------------------------------------------------

#[test]
fn criterion_01_argmin_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = TestRng::new(10_001);
    let mut worst_pgd = 0.0f64;
    let mut worst_grid = 0.0f64;
    for _ in 0..500 {
        let feasible = FeasibleSet::new(
            vec![rng.range(-0.1, 0.1), rng.range(-0.1, 0.1)],
            rng.range(0.25, 0.5),
        );
        let theta0 = vec![rng.range(-0.2, 0.2), rng.range(-0.2, 0.2)];

        // rdgd_argmin instance
        let beta = rng.range(0.3, 4.0);
        let map = MirrorMap::new(beta);
        let s_g = vec![rng.range(-2.0, 2.0), rng.range(-2.0, 2.0)];
        let closed = rdgd_argmin(&s_g, &map, &theta0, &feasible);
        let pgd = projected_gradient_min(
            |u| {
                u.iter()
                    .zip(&s_g)
                    .zip(&theta0)
                    .map(|((ui, gi), t0)| gi + beta * (ui - t0))
                    .collect()
            },
            beta,
            &feasible,
            &theta0,
            300_000,
        );
        worst_pgd = worst_pgd.max(norm2(&sub(&closed, &pgd)));
        let grid = grid_search_2d(
            |u| {
                let d = sub(u, &theta0);
                dot(&s_g, u) + 0.5 * beta * dot(&d, &d)
            },
            &feasible,
            1e-3,
        );
        worst_grid = worst_grid.max(norm2(&sub(&closed, &grid)));

        // rdgd_sc_argmin instance
        let alpha = rng.range(0.2, 3.0);
        let eta1 = rng.range(0.5, 2.0);
        let h_t = rng.range(0.5, 5.0);
        let s_g2 = vec![rng.range(-2.0, 2.0), rng.range(-2.0, 2.0)];
        let s_theta = vec![rng.range(-1.0, 1.0) * h_t, rng.range(-1.0, 1.0) * h_t];
        let closed2 = rdgd_sc_argmin(&s_g2, &s_theta, h_t, alpha, eta1, &theta0, &feasible);
        let lips = alpha * (h_t + eta1);
        let pgd2 = projected_gradient_min(
            |u| {
                (0..2)
                    .map(|i| s_g2[i] + alpha * (h_t * u[i] - s_theta[i]) + eta1 * alpha * (u[i] - theta0[i]))
                    .collect()
            },
            lips,
            &feasible,
            &theta0,
            300_000,
        );
        worst_pgd = worst_pgd.max(norm2(&sub(&closed2, &pgd2)));
        let grid2 = grid_search_2d(
            |u| {
                let d0 = sub(u, &theta0);
                dot(&s_g2, u)
                    + 0.5 * alpha * (h_t * dot(u, u) - 2.0 * dot(&s_theta, u))
                    + 0.5 * eta1 * alpha * dot(&d0, &d0)
            },
            &feasible,
            1e-3,
        );
        worst_grid = worst_grid.max(norm2(&sub(&closed2, &grid2)));
    }
    report(
        "criterion 1: argmin oracle equivalence (500 instances)",
        &[
            ok(format!("projected-gradient oracle within 1e-6 (worst {worst_pgd:.2e})"), worst_pgd <= 1e-6),
            ok(format!("1e-3 grid search within 2e-3 (worst {worst_grid:.2e})"), worst_grid <= 2e-3),
        ],
        started,
    );
}

// criterion 2 -------------------------------------------------------------

#[test]
fn criterion_02_gradient_checks() {
    let started = Instant::now();
    let mut clauses = Vec::new();
    let mut rng = TestRng::new(10_002);
    let mut stream = RngStream::from_path(777, 0, 0, 0, Direction::Data);
    let (reg, _) = synthesize_regression(&mut stream, 150, 8);
    let two = rdgd::losses::synthesize_twoclass(&mut stream, 150, 8, 4.0);
    let softmax = {
        let feats: Vec<f64> = (0..150 * 6).map(|_| rng.normal()).collect();
        let labels: Vec<f64> = (0..150).map(|i| (i % 3) as f64).collect();
        rdgd::losses::Dataset::new(
            rdgd::numerics::matrix::Matrix::from_vec(150, 6, feats).unwrap(),
            labels,
        )
        .unwrap()
    };
    let models = vec![
        LossModel::new(LossKind::LeastSquares, reg.clone()).unwrap(),
        LossModel::new(LossKind::Ridge { lambda: 0.05 }, reg).unwrap(),
        LossModel::new(LossKind::L2Svm { lambda: 0.1 }, two).unwrap(),
        LossModel::new(LossKind::SoftmaxCe { classes: 3 }, softmax).unwrap(),
    ];
    for model in &models {
        let dim = model.param_dim();
        let mut worst = 0.0f64;
        for _ in 0..50 {
            let theta: Vec<f64> = (0..dim).map(|_| 0.6 * rng.normal()).collect();
            let dir: Vec<f64> = (0..dim).map(|_| rng.normal()).collect();
            let analytic = dot(&model.full_gradient(&theta).unwrap(), &dir);
            let fd = directional_fd(|th| model.loss_value(th).unwrap(), &theta, &dir, 1e-6);
            let rel = (analytic - fd).abs() / analytic.abs().max(fd.abs()).max(1e-6);
            worst = worst.max(rel);
        }
        clauses.push(ok(
            format!("{}: 50 directional checks within 1e-5 (worst {worst:.2e})", model.kind.name()),
            worst <= 1e-5,
        ));
    }
    report("criterion 2: gradient finite-difference checks", &clauses, started);
}

// criterion 3 -------------------------------------------------------------

#[test]
fn criterion_03_schedule_identities() {
    let started = Instant::now();
    let mut clauses = Vec::new();
    // Small coefficients keep H_k = (1-a)^-(k-1) representable through
    // k = 1e4; larger ones are checked to just short of the f64 overflow
    // horizon of their geometric growth.
    for a in [0.002, 0.02, 0.065, 0.5, 0.716] {
        let mut s = StepsizeSchedule::new(ScheduleKind::Ratio { a }).unwrap();
        let mut worst = 0.0f64;
        let mut k_max = 1usize;
        s.next();
        for k in 2..=10_000usize {
            let (eta, h) = s.next();
            if !(h < 1e300) {
                break;
            }
            worst = worst.max((eta / h - a).abs());
            k_max = k;
        }
        clauses.push(ok(
            format!("ratio({a}): |eta_k/H_k - a| <= 1e-14 for k <= {k_max} (worst {worst:.2e})"),
            worst <= 1e-14 && (a > 0.07 || k_max == 10_000),
        ));
    }
    let mut s = StepsizeSchedule::new(ScheduleKind::RatioHarmonic).unwrap();
    let mut exact = true;
    for k in 1..=1_000_000usize {
        let (eta, h) = s.next();
        if eta != k as f64 || h != (k as f64) * (k as f64 + 1.0) / 2.0 {
            exact = false;
            break;
        }
    }
    clauses.push(ok("2/(k+1) schedule: eta_k = k and H_k = k(k+1)/2 exactly to k = 1e6", exact));
    report("criterion 3: schedule identities", &clauses, started);
}

// criterion 4 -------------------------------------------------------------

#[test]
fn criterion_04_lambert_and_transition_time() {
    let started = Instant::now();
    let mut clauses = Vec::new();

    let mut rng = TestRng::new(10_004);
    let e_inv = (-1.0f64).exp();
    let mut worst_residual = 0.0f64;
    let mut branch_ok = true;
    for _ in 0..1000 {
        let x = -rng.range(1e-8, e_inv);
        let w = lambert_w_minus1(x).unwrap();
        worst_residual = worst_residual.max((w * w.exp() - x).abs());
        branch_ok &= w <= -1.0;
    }
    clauses.push(ok(
        format!("1000-point roundtrip residual <= 1e-12 (worst {worst_residual:.2e})"),
        worst_residual <= 1e-12,
    ));
    clauses.push(ok("branch constraint w <= -1 on all samples", branch_ok));
    let at_branch = lambert_w_minus1(-e_inv).unwrap();
    clauses.push(ok(
        format!("W_-1(-1/e) = -1 within 1e-6 (got {at_branch})"),
        (at_branch + 1.0).abs() <= 1e-6,
    ));

    let mut checked = 0;
    let mut worst_diff = 0usize;
    while checked < 100 {
        let m_smooth = rng.range(0.5, 20.0);
        let alpha = m_smooth * rng.range(0.03, 0.95);
        let r_theta = rng.range(0.5, 2000.0);
        let r = rng.range(0.02, 0.48);
        let Ok(tt) = transition_time(m_smooth, alpha, r_theta, r) else { continue };
        if !tt.lambert || tt.t0 > 500_000 {
            continue;
        }
        let brute = transition_time_brute_force(m_smooth, alpha, r_theta, r, 1_000_000);
        worst_diff = worst_diff.max(tt.t0.abs_diff(brute));
        checked += 1;
    }
    clauses.push(ok(
        format!("100 random instances: analytic t0 within +-1 of the brute-force scan (worst {worst_diff})"),
        worst_diff <= 1,
    ));
    report("criterion 4: Lambert branch and transition time", &clauses, started);
}

// criterion 5 -------------------------------------------------------------

#[test]
fn criterion_05_trajectory_inequalities() {
    let started = Instant::now();
    let mut clauses = Vec::new();
    let mut worst_l1 = f64::INFINITY;
    let mut worst_l3 = f64::INFINITY;
    // 20 seeded 200-round runs over mixed noise and corruption settings;
    // the dual-averaging inequality along RDGD runs, the strongly convex
    // one along RDGD-SC runs.
    let settings = [
        (0.0, CorruptionPolicy::None, 0.0, 0.0),
        (0.2, CorruptionPolicy::None, 0.0, 0.0),
        (0.5, CorruptionPolicy::ResidualGreedy, 10.0, 0.3),
        (1.0, CorruptionPolicy::ResidualGreedy, 20.0, 0.45),
        (0.7, CorruptionPolicy::UniformSplit, 10.0, 0.25),
    ];
    let kinds = [ScheduleKind::FixedHorizon { horizon: 200 }, ScheduleKind::InvSqrt];
    let mut stream = RngStream::from_path(31_337, 0, 0, 0, Direction::Data);
    let (mut data, _) = synthesize_regression(&mut stream, 200, 8);
    data.assign_shards(5).unwrap();
    let ls = LossModel::new(LossKind::LeastSquares, data.clone()).unwrap();
    let ridge = LossModel::new(LossKind::Ridge { lambda: 0.2 }, data).unwrap();
    let mut runs = 0;
    for (idx, &(sigma, policy, kappa, r)) in settings.iter().enumerate() {
        for (kidx, &kind) in kinds.iter().enumerate() {
            let seed = 40_000 + (idx * 2 + kidx) as u64;
            for strongly_convex in [false, true] {
                let (model, algorithm, beta) = if strongly_convex {
                    (&ridge, Algorithm::RdgdSc, ridge.alpha())
                } else {
                    (&ls, Algorithm::Rdgd, ls.m_smooth())
                };
                let out = Simulation::new(
                    algorithm,
                    model,
                    ChannelModel::new(sigma),
                    policy,
                    StepsizeSchedule::new(kind).unwrap(),
                    MirrorMap::new(beta),
                    FeasibleSet::origin_ball(8, 1e6),
                    BudgetLedger::new(kappa, r, 200).unwrap(),
                    RngRoot::new(seed, 0),
                    vec![0.0; 8],
                )
                .unwrap()
                .track_trajectory_slack()
                .run(200)
                .unwrap();
                runs += 1;
                let min_slack = out.trajectory_slacks.iter().copied().fold(f64::INFINITY, f64::min);
                if strongly_convex {
                    worst_l3 = worst_l3.min(min_slack);
                } else {
                    worst_l1 = worst_l1.min(min_slack);
                }
            }
        }
    }
    clauses.push(ok(format!("ran {runs} seeded 200-round runs"), runs == 20));
    clauses.push(ok(
        format!("dual-averaging trajectory slack >= -1e-9 at every round (worst {worst_l1:.2e})"),
        worst_l1 >= -1e-9,
    ));
    clauses.push(ok(
        format!("strongly convex trajectory slack >= -1e-9 at every round (worst {worst_l3:.2e})"),
        worst_l3 >= -1e-9,
    ));
    report("criterion 5: trajectory inequalities (20 runs x 200 rounds)", &clauses, started);
}

// criterion 6 -------------------------------------------------------------

#[test]
fn criterion_06_budget_safety_post_hoc() {
    let started = Instant::now();
    let mut clauses = Vec::new();
    // replay the ledgers of every experiment the suite runs
    let names = [
        "ls_rdgd", "ls_dgd",
        "ridge_ratio", "ridge_harmonic", "ridge_restart",
        "svm_rdgd_r025", "svm_dgd_r025", "svm_rdgd_r03", "svm_dgd_r03",
        "svm_rdgd_r035", "svm_dgd_r035",
        "mnist_rdgd_r02", "mnist_dgd_r02", "mnist_rdgd_r03", "mnist_dgd_r03",
        "mnist_rdgd_r04", "mnist_dgd_r04",
    ];
    for name in names {
        let result = load_run(name);
        let kappa = result.config.kappa;
        let r = result.config.r;
        let mut worst = 0.0f64;
        for trial in &result.trials {
            let mut spent = 0.0;
            for row in trial {
                spent += row.c_t * row.c_t;
                // cross-check the ledger column while replaying
                assert!((row.budget_spent - spent).abs() <= 1e-9 * spent.max(1.0));
                let envelope = kappa * (row.t as f64).powf(r);
                if envelope > 0.0 {
                    worst = worst.max(spent.sqrt() / envelope);
                } else {
                    assert_eq!(spent, 0.0);
                }
            }
        }
        clauses.push(ok(
            format!("{name}: max |c|_2 / C(t) = {worst:.9}"),
            worst <= 1.0 + 1e-9,
        ));
    }
    report("criterion 6: budget safety across the whole suite", &clauses, started);
}

// criterion 7 -------------------------------------------------------------

#[test]
fn criterion_07_clean_bound_domination() {
    let started = Instant::now();
    let horizon = 200;
    let mut stream = RngStream::from_path(70_007, 0, 0, 0, Direction::Data);
    let (mut data, _) = synthesize_regression(&mut stream, 500, 10);
    data.assign_shards(5).unwrap();
    let model = LossModel::new(LossKind::LeastSquares, data).unwrap();
    let reference = rdgd::losses::reference_optimum(&model).unwrap();
    let beta = model.m_smooth();
    let out = Simulation::new(
        Algorithm::Rdgd,
        &model,
        ChannelModel::new(0.0),
        CorruptionPolicy::None,
        StepsizeSchedule::new(ScheduleKind::FixedHorizon { horizon }).unwrap(),
        MirrorMap::new(beta),
        FeasibleSet::origin_ball(10, 1e6),
        BudgetLedger::new(0.0, 0.0, horizon).unwrap(),
        RngRoot::new(7, 0),
        vec![0.0; 10],
    )
    .unwrap()
    .with_reference(&reference)
    .run(horizon)
    .unwrap();

    let map = MirrorMap::new(beta);
    let d_psi = map.bregman(&reference.theta_star, &vec![0.0; 10]);
    let m_smooth = model.m_smooth();
    let eta = 1.0 / (horizon as f64).sqrt();
    let mut dominated = true;
    let mut worst_margin = f64::INFINITY;
    for trace in &out.traces {
        let t = trace.t as f64;
        let h_t = t * eta;
        let sum_eta_sq = t * eta * eta;
        let bound = d_psi / h_t + m_smooth * m_smooth / (2.0 * beta) * sum_eta_sq / h_t;
        let margin = bound - trace.gap.unwrap();
        worst_margin = worst_margin.min(margin);
        dominated &= margin >= -1e-12;
    }
    report(
        "criterion 7: clean smooth-case bound dominates the measured gap",
        &[ok(format!("gap <= bound at every t (tightest margin {worst_margin:.3e})"), dominated)],
        started,
    );
}

// criterion 8 -------------------------------------------------------------

#[test]
fn criterion_08_least_squares_comparison() {
    let started = Instant::now();
    let rdgd = load_run("ls_rdgd");
    let dgd = load_run("ls_dgd");
    let g_rdgd = final_gap(&rdgd);
    let g_dgd = final_gap(&dgd);
    let half = rdgd.aggregate.len() / 2;
    let below = rdgd.aggregate[half..]
        .iter()
        .zip(&dgd.aggregate[half..])
        .all(|(r, d)| r.gap_mean.unwrap() < d.gap_mean.unwrap());
    report(
        "criterion 8: least-squares corruption comparison (eta_t = t^-2)",
        &[
            ok(
                format!("RDGD final mean gap {g_rdgd:.4e} <= 0.5 x DGD final mean gap {g_dgd:.4e}"),
                g_rdgd <= 0.5 * g_dgd,
            ),
            ok("RDGD mean gap below DGD for the final 50% of rounds", below),
        ],
        started,
    );
}

// criterion 9 -------------------------------------------------------------

#[test]
fn criterion_09_ridge_restart_study() {
    let started = Instant::now();
    let ratio = load_run("ridge_ratio");
    let harmonic = load_run("ridge_harmonic");
    let restart = load_run("ridge_restart");
    let t0 = restart.constants.t0.expect("restart resolves t0");
    let horizon = restart.aggregate.len();

    // (a) pure ratio(alpha/M) stagnates
    let probe_t = (2 * t0).min(horizon);
    let gap_at_probe = ratio.aggregate[probe_t - 1].gap_mean.unwrap();
    let min_early = ratio.aggregate[..(t0 + 10).min(horizon)]
        .iter()
        .map(|row| row.gap_mean.unwrap())
        .fold(f64::INFINITY, f64::min);
    // (b) restart at T beats the 2/(k+1) run at T
    let g_restart = final_gap(&restart);
    let g_harmonic = final_gap(&harmonic);
    // (c) stage-1 prefix bit-identical
    let mut prefix_identical = true;
    for (a, b) in ratio.trials.iter().zip(&restart.trials) {
        for t in 0..t0 {
            let x = &a[t];
            let y = &b[t];
            if x.gap.map(f64::to_bits) != y.gap.map(f64::to_bits)
                || x.c_t.to_bits() != y.c_t.to_bits()
                || x.budget_spent.to_bits() != y.budget_spent.to_bits()
            {
                prefix_identical = false;
            }
        }
    }
    report(
        &format!("criterion 9: ridge restart study (t0 = {t0})"),
        &[
            ok(
                format!(
                    "ratio(a/M) stagnates: gap at t = {probe_t} is {gap_at_probe:.4e} >= 0.8 x early min {min_early:.4e}"
                ),
                gap_at_probe >= 0.8 * min_early,
            ),
            ok(
                format!("restart final gap {g_restart:.4e} <= 2/(k+1) final gap {g_harmonic:.4e}"),
                g_restart <= g_harmonic,
            ),
            ok("restart stage-1 prefix bit-identical to the standalone ratio run", prefix_identical),
        ],
        started,
    );
}

// criterion 10 ------------------------------------------------------------

#[test]
fn criterion_10_svm_classification() {
    let started = Instant::now();
    let mut clauses = Vec::new();
    let mut accs = HashMap::new();
    for r in ["025", "03", "035"] {
        let rdgd = final_accuracy(&load_run(&format!("svm_rdgd_r{r}")));
        let dgd = final_accuracy(&load_run(&format!("svm_dgd_r{r}")));
        clauses.push(ok(
            format!("r = 0.{r}: RDGD accuracy {rdgd:.4} >= DGD accuracy {dgd:.4}"),
            rdgd >= dgd,
        ));
        clauses.push(ok(format!("r = 0.{r}: RDGD accuracy {rdgd:.4} >= 0.9"), rdgd >= 0.9));
        accs.insert(r, (rdgd, dgd));
    }
    let (rdgd35, dgd35) = accs["035"];
    clauses.push(ok(
        format!("r = 0.35: RDGD - DGD = {:.4} >= 0.15", rdgd35 - dgd35),
        rdgd35 - dgd35 >= 0.15,
    ));
    report("criterion 10: L2-SVM classification under uniform-split corruption", &clauses, started);
}

// criterion 11 ------------------------------------------------------------

#[test]
fn criterion_11_mnist_classification() {
    let started = Instant::now();
    let mut clauses = Vec::new();
    let acc = |name: &str| final_accuracy(&load_run(name));
    let dgd04 = acc("mnist_dgd_r04");
    clauses.push(ok(
        format!("DGD at r = 0.4 reduces to random guessing: accuracy {dgd04:.4} <= 0.15"),
        dgd04 <= 0.15,
    ));
    let r02 = acc("mnist_rdgd_r02");
    let r03 = acc("mnist_rdgd_r03");
    let r04 = acc("mnist_rdgd_r04");
    clauses.push(ok(
        format!("RDGD ordering: acc(0.2) = {r02:.4} >= acc(0.3) - 0.02 = {:.4}", r03 - 0.02),
        r02 >= r03 - 0.02,
    ));
    clauses.push(ok(
        format!("RDGD ordering: acc(0.3) - 0.02 = {:.4} >= acc(0.4) - 0.04 = {:.4}", r03 - 0.02, r04 - 0.04),
        r03 - 0.02 >= r04 - 0.04,
    ));
    for (r, rdgd) in [("02", r02), ("03", r03), ("04", r04)] {
        let dgd = acc(&format!("mnist_dgd_r{r}"));
        clauses.push(ok(
            format!("r = 0.{}: RDGD {rdgd:.4} beats DGD {dgd:.4}", &r[1..]),
            rdgd > dgd,
        ));
    }
    report("criterion 11: MNIST softmax classification under uniform-split corruption", &clauses, started);
}

// criterion 12 ------------------------------------------------------------

#[test]
fn criterion_12_determinism_byte_identical_reruns() {
    let started = Instant::now();
    let mut clauses = Vec::new();
    let names = [
        "ls_rdgd", "ls_dgd",
        "ridge_ratio", "ridge_harmonic", "ridge_restart",
        "svm_rdgd_r025", "svm_dgd_r025", "svm_rdgd_r03", "svm_dgd_r03",
        "svm_rdgd_r035", "svm_dgd_r035",
        "mnist_rdgd_r02", "mnist_dgd_r02", "mnist_rdgd_r03", "mnist_dgd_r03",
        "mnist_rdgd_r04", "mnist_dgd_r04",
    ];
    for name in names {
        let first = load_run(name);
        let rerun = fresh_run(name);
        let same = trials_csv(&first) == trials_csv(&rerun)
            && aggregate_csv(&first) == aggregate_csv(&rerun);
        clauses.push(ok(format!("{name}: rerun emits byte-identical CSV"), same));
    }
    report("criterion 12: determinism of criteria 8-11 outputs", &clauses, started);
}
