//! Loss models: least squares, ridge, L2-SVM, and softmax cross-entropy,
//! with exact gradients, curvature constants, reference optima, and the
//! synthetic dataset generators used by the experiments.

use crate::error::{Error, Result};
use crate::numerics::eig::{max_eigenvalue, min_eigenvalue};
use crate::numerics::matrix::Matrix;
use crate::numerics::rng::RngStream;
use crate::numerics::vec;

const EIG_TOL: f64 = 1e-12;
const STATIONARITY_TOL: f64 = 1e-8;
const GD_SOLVE_CAP: usize = 2_000_000;

/// Samples plus a disjoint equal-size partition over workers.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub features: Matrix,
    /// Continuous response, a +-1 label, or a class index, by loss kind.
    pub responses: Vec<f64>,
    /// Worker id per sample; empty when the set is not sharded (test sets).
    pub shard_of: Vec<usize>,
    /// Per-worker sample index lists derived from `shard_of`.
    shards: Vec<Vec<usize>>,
}

impl Dataset {
    pub fn new(features: Matrix, responses: Vec<f64>) -> Result<Self> {
        if features.rows() != responses.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} feature rows vs {} responses",
                features.rows(),
                responses.len()
            )));
        }
        Ok(Dataset { features, responses, shard_of: Vec::new(), shards: Vec::new() })
    }

    pub fn len(&self) -> usize {
        self.features.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    /// Partition samples into m equal blocks: worker i owns rows
    /// [i*N/m, (i+1)*N/m). Requires m to divide N.
    pub fn assign_shards(&mut self, m: usize) -> Result<()> {
        let n = self.len();
        if m == 0 || !n.is_multiple_of(m) {
            return Err(Error::ConfigGeneral(format!("m must divide N (m = {m}, N = {n})")));
        }
        let per = n / m;
        self.shard_of = (0..n).map(|i| i / per).collect();
        self.shards = (0..m).map(|w| (w * per..(w + 1) * per).collect()).collect();
        Ok(())
    }

    pub fn workers(&self) -> usize {
        self.shards.len()
    }

    pub fn shard(&self, worker: usize) -> &[usize] {
        &self.shards[worker]
    }

    /// Split off the final `test_fraction` of rows as a test set.
    pub fn split_tail(mut self, test_fraction: f64) -> Result<(Dataset, Option<Dataset>)> {
        assert!((0.0..1.0).contains(&test_fraction));
        if test_fraction == 0.0 {
            return Ok((self, None));
        }
        let n = self.len();
        let n_test = ((n as f64) * test_fraction).round() as usize;
        let n_train = n - n_test;
        if n_train == 0 || n_test == 0 {
            return Err(Error::ConfigGeneral(format!(
                "test_fraction {test_fraction} leaves an empty split of {n} samples"
            )));
        }
        let p = self.dim();
        let mut test_rows = Vec::with_capacity(n_test * p);
        for i in n_train..n {
            test_rows.extend_from_slice(self.features.row(i));
        }
        let test_features = Matrix::from_vec(n_test, p, test_rows)?;
        let test_responses = self.responses.split_off(n_train);
        let mut train_rows = Vec::with_capacity(n_train * p);
        for i in 0..n_train {
            train_rows.extend_from_slice(self.features.row(i));
        }
        self.features = Matrix::from_vec(n_train, p, train_rows)?;
        let test = Dataset::new(test_features, test_responses)?;
        Ok((self, Some(test)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LossKind {
    LeastSquares,
    Ridge { lambda: f64 },
    L2Svm { lambda: f64 },
    SoftmaxCe { classes: usize },
}

impl LossKind {
    pub fn name(&self) -> &'static str {
        match self {
            LossKind::LeastSquares => "least_squares",
            LossKind::Ridge { .. } => "ridge",
            LossKind::L2Svm { .. } => "l2svm",
            LossKind::SoftmaxCe { .. } => "softmax_ce",
        }
    }

    pub fn lambda(&self) -> f64 {
        match self {
            LossKind::Ridge { lambda } | LossKind::L2Svm { lambda } => *lambda,
            _ => 0.0,
        }
    }

    pub fn is_classification(&self) -> bool {
        matches!(self, LossKind::L2Svm { .. } | LossKind::SoftmaxCe { .. })
    }
}

/// A differentiable objective over a dataset with cached curvature constants.
#[derive(Debug, Clone)]
pub struct LossModel {
    pub kind: LossKind,
    pub dataset: Dataset,
    m_smooth: f64,
    alpha: f64,
}

impl LossModel {
    pub fn new(kind: LossKind, dataset: Dataset) -> Result<Self> {
        match kind {
            LossKind::Ridge { lambda } | LossKind::L2Svm { lambda } => {
                if lambda < 0.0 {
                    return Err(Error::ConfigGeneral(format!("lambda must be nonnegative, got {lambda}")));
                }
            }
            LossKind::SoftmaxCe { classes } => {
                if classes < 2 {
                    return Err(Error::ConfigGeneral("softmax needs at least 2 classes".into()));
                }
                for (i, y) in dataset.responses.iter().enumerate() {
                    let c = *y as usize;
                    if y.fract() != 0.0 || *y < 0.0 || c >= classes {
                        return Err(Error::ConfigGeneral(format!(
                            "sample {i}: label {y} is not a class index below {classes}"
                        )));
                    }
                }
            }
            LossKind::LeastSquares => {}
        }
        if let LossKind::L2Svm { .. } = kind {
            for (i, y) in dataset.responses.iter().enumerate() {
                if *y != 1.0 && *y != -1.0 {
                    return Err(Error::ConfigGeneral(format!("sample {i}: L2-SVM label {y} is not +-1")));
                }
            }
        }

        let gram = dataset.features.mean_gram();
        let lmax = max_eigenvalue(&gram, EIG_TOL)?;
        let (m_smooth, alpha) = match kind {
            LossKind::LeastSquares => {
                let lmin = min_eigenvalue(&gram, EIG_TOL)?;
                (lmax, lmin.max(0.0))
            }
            LossKind::Ridge { lambda } => {
                let lmin = min_eigenvalue(&gram, EIG_TOL)?;
                (lmax + lambda, lmin.max(0.0) + lambda)
            }
            // Standard bound for the squared hinge: per-sample Hessian is at
            // most 2 x x^T wherever the hinge is active.
            LossKind::L2Svm { lambda } => (2.0 * lmax + lambda, lambda),
            // The log-sum-exp Hessian is bounded by I/2 per class block.
            LossKind::SoftmaxCe { .. } => (0.5 * lmax, 0.0),
        };
        Ok(LossModel { kind, dataset, m_smooth, alpha })
    }

    /// Parameter dimension: p, or p * classes for the softmax model.
    pub fn param_dim(&self) -> usize {
        match self.kind {
            LossKind::SoftmaxCe { classes } => self.dataset.dim() * classes,
            _ => self.dataset.dim(),
        }
    }

    /// Cached (M, alpha).
    pub fn curvature_constants(&self) -> (f64, f64) {
        (self.m_smooth, self.alpha)
    }

    pub fn m_smooth(&self) -> f64 {
        self.m_smooth
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn check_dim(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.param_dim() {
            return Err(Error::DimensionMismatch(format!(
                "theta has {} entries, model expects {}",
                theta.len(),
                self.param_dim()
            )));
        }
        Ok(())
    }

    /// Average per-sample loss over the whole dataset (plus regularizer).
    pub fn loss_value(&self, theta: &[f64]) -> Result<f64> {
        self.check_dim(theta)?;
        Ok(self.value_over(&all_indices(self.dataset.len()), theta))
    }

    pub fn value_over(&self, idx: &[usize], theta: &[f64]) -> f64 {
        let x = &self.dataset.features;
        let y = &self.dataset.responses;
        let inv = 1.0 / idx.len() as f64;
        match self.kind {
            LossKind::LeastSquares | LossKind::Ridge { .. } => {
                let mut acc = 0.0;
                for &i in idx {
                    let r = vec::dot(x.row(i), theta) - y[i];
                    acc += 0.5 * r * r;
                }
                acc * inv + 0.5 * self.kind.lambda() * vec::dot(theta, theta)
            }
            LossKind::L2Svm { lambda } => {
                let mut acc = 0.0;
                for &i in idx {
                    let margin = 1.0 - y[i] * vec::dot(x.row(i), theta);
                    if margin > 0.0 {
                        acc += margin * margin;
                    }
                }
                acc * inv + 0.5 * lambda * vec::dot(theta, theta)
            }
            LossKind::SoftmaxCe { classes } => {
                let p = self.dataset.dim();
                let mut scores = vec![0.0; classes];
                let mut acc = 0.0;
                for &i in idx {
                    softmax_scores(x.row(i), theta, p, &mut scores);
                    let smax = scores.iter().fold(f64::NEG_INFINITY, |m, s| m.max(*s));
                    let lse = smax + scores.iter().map(|s| (s - smax).exp()).sum::<f64>().ln();
                    acc += lse - scores[y[i] as usize];
                }
                acc * inv
            }
        }
    }

    /// Exact gradient of `loss_value`.
    pub fn full_gradient(&self, theta: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(theta)?;
        Ok(self.gradient_over(&all_indices(self.dataset.len()), theta))
    }

    /// Mean per-sample gradient over worker `w`'s shard, evaluated at
    /// whatever parameter the worker received.
    pub fn shard_gradient(&self, worker: usize, theta: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(theta)?;
        if worker >= self.dataset.workers() {
            return Err(Error::ConfigGeneral(format!(
                "worker {worker} out of range ({} shards)",
                self.dataset.workers()
            )));
        }
        let shard = self.dataset.shard(worker);
        if shard.is_empty() {
            return Err(Error::ConfigGeneral(format!("worker {worker} has an empty shard")));
        }
        Ok(self.gradient_over(shard, theta))
    }

    pub fn gradient_over(&self, idx: &[usize], theta: &[f64]) -> Vec<f64> {
        let x = &self.dataset.features;
        let y = &self.dataset.responses;
        let inv = 1.0 / idx.len() as f64;
        let mut g = vec![0.0; theta.len()];
        match self.kind {
            LossKind::LeastSquares | LossKind::Ridge { .. } => {
                for &i in idx {
                    let r = vec::dot(x.row(i), theta) - y[i];
                    vec::axpy(r, x.row(i), &mut g);
                }
                vec::scale(&mut g, inv);
                let lambda = self.kind.lambda();
                if lambda > 0.0 {
                    vec::axpy(lambda, theta, &mut g);
                }
            }
            LossKind::L2Svm { lambda } => {
                for &i in idx {
                    let margin = 1.0 - y[i] * vec::dot(x.row(i), theta);
                    if margin > 0.0 {
                        vec::axpy(-2.0 * margin * y[i], x.row(i), &mut g);
                    }
                }
                vec::scale(&mut g, inv);
                if lambda > 0.0 {
                    vec::axpy(lambda, theta, &mut g);
                }
            }
            LossKind::SoftmaxCe { classes } => {
                let p = self.dataset.dim();
                let mut scores = vec![0.0; classes];
                for &i in idx {
                    let xi = x.row(i);
                    softmax_scores(xi, theta, p, &mut scores);
                    let smax = scores.iter().fold(f64::NEG_INFINITY, |m, s| m.max(*s));
                    let mut z = 0.0;
                    for s in scores.iter_mut() {
                        *s = (*s - smax).exp();
                        z += *s;
                    }
                    let label = y[i] as usize;
                    for (k, pk) in scores.iter().enumerate() {
                        let coef = pk / z - if k == label { 1.0 } else { 0.0 };
                        let grow = &mut g[k * p..(k + 1) * p];
                        for (j, &xj) in xi.iter().enumerate() {
                            if xj != 0.0 {
                                grow[j] += coef * xj;
                            }
                        }
                    }
                }
                vec::scale(&mut g, inv);
            }
        }
        g
    }

    /// Fraction of samples in `data` whose predicted label matches.
    /// A binary model predicts sign(x^T theta) (zero counts as +1); the
    /// softmax model predicts the argmax class, ties to the lowest index.
    pub fn accuracy_on(&self, theta: &[f64], data: &Dataset) -> Result<f64> {
        self.check_dim(theta)?;
        let n = data.len();
        let mut hits = 0usize;
        match self.kind {
            LossKind::SoftmaxCe { classes } => {
                let p = data.dim();
                let mut scores = vec![0.0; classes];
                for i in 0..n {
                    softmax_scores(data.features.row(i), theta, p, &mut scores);
                    let mut best = 0usize;
                    for k in 1..classes {
                        if scores[k] > scores[best] {
                            best = k;
                        }
                    }
                    if best == data.responses[i] as usize {
                        hits += 1;
                    }
                }
            }
            _ => {
                for i in 0..n {
                    let s = vec::dot(data.features.row(i), theta);
                    let pred = if s >= 0.0 { 1.0 } else { -1.0 };
                    if pred == data.responses[i] {
                        hits += 1;
                    }
                }
            }
        }
        Ok(hits as f64 / n as f64)
    }
}

#[inline]
fn softmax_scores(xi: &[f64], theta: &[f64], p: usize, scores: &mut [f64]) {
    for (k, s) in scores.iter_mut().enumerate() {
        let trow = &theta[k * p..(k + 1) * p];
        let mut acc = 0.0;
        for (j, &xj) in xi.iter().enumerate() {
            if xj != 0.0 {
                acc += trow[j] * xj;
            }
        }
        *s = acc;
    }
}

fn all_indices(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// How a reference optimum was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    NormalEquations,
    GradientDescent,
}

/// The clean, noiseless optimum the suboptimality gap is measured against.
#[derive(Debug, Clone)]
pub struct ReferenceOptimum {
    pub theta_star: Vec<f64>,
    pub loss_star: f64,
    pub grad_norm: f64,
    pub method: SolveMethod,
}

/// Solve for the unconstrained minimizer of the clean objective.
///
/// Least squares and ridge go through the normal equations
/// (X^T X + N lambda I) theta = X^T y; if the Cholesky factorization fails or
/// leaves a gradient above tolerance, a full-gradient-descent polish takes
/// over. The non-quadratic losses run gradient descent directly until
/// |grad L| <= 1e-8.
pub fn reference_optimum(model: &LossModel) -> Result<ReferenceOptimum> {
    let (theta, method) = match model.kind {
        LossKind::LeastSquares | LossKind::Ridge { .. } => {
            match solve_normal_equations(model) {
                Ok(theta) => {
                    let g = model.full_gradient(&theta)?;
                    if vec::norm2(&g) <= STATIONARITY_TOL {
                        (theta, SolveMethod::NormalEquations)
                    } else {
                        (gd_solve(model, theta)?, SolveMethod::GradientDescent)
                    }
                }
                Err(_) => (gd_solve(model, vec![0.0; model.param_dim()])?, SolveMethod::GradientDescent),
            }
        }
        _ => (gd_solve(model, vec![0.0; model.param_dim()])?, SolveMethod::GradientDescent),
    };
    let grad_norm = vec::norm2(&model.full_gradient(&theta)?);
    let loss_star = model.loss_value(&theta)?;
    Ok(ReferenceOptimum { theta_star: theta, loss_star, grad_norm, method })
}

fn solve_normal_equations(model: &LossModel) -> Result<Vec<f64>> {
    let x = &model.dataset.features;
    let y = &model.dataset.responses;
    let n = x.rows();
    let p = x.cols();
    // A = X^T X + N lambda I, b = X^T y
    let mut a = x.mean_gram();
    for i in 0..p {
        for j in 0..p {
            a.set(i, j, a.get(i, j) * n as f64);
        }
    }
    let a = a.plus_scaled_identity(n as f64 * model.kind.lambda());
    let mut b = vec![0.0; p];
    for (i, yi) in y.iter().enumerate() {
        vec::axpy(*yi, x.row(i), &mut b);
    }
    cholesky_solve(&a, &b)
}

/// Solve A x = b for symmetric positive definite A.
fn cholesky_solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let p = a.rows();
    let mut l = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..=i {
            let mut sum = a.get(i, j);
            for k in 0..j {
                sum -= l[i * p + k] * l[j * p + k];
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(Error::SingularSystem(format!("non-positive pivot {sum:e} at row {i}")));
                }
                l[i * p + i] = sum.sqrt();
            } else {
                l[i * p + j] = sum / l[j * p + j];
            }
        }
    }
    // forward then back substitution
    let mut z = vec![0.0; p];
    for i in 0..p {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i * p + k] * z[k];
        }
        z[i] = sum / l[i * p + i];
    }
    let mut xout = vec![0.0; p];
    for i in (0..p).rev() {
        let mut sum = z[i];
        for k in i + 1..p {
            sum -= l[k * p + i] * xout[k];
        }
        xout[i] = sum / l[i * p + i];
    }
    Ok(xout)
}

fn gd_solve(model: &LossModel, mut theta: Vec<f64>) -> Result<Vec<f64>> {
    let step = 1.0 / model.m_smooth();
    for _ in 0..GD_SOLVE_CAP {
        let g = model.full_gradient(&theta)?;
        if vec::norm2(&g) <= STATIONARITY_TOL {
            return Ok(theta);
        }
        vec::axpy(-step, &g, &mut theta);
    }
    Err(Error::SingularSystem(format!(
        "gradient descent failed to reach |grad| <= {STATIONARITY_TOL:e} within {GD_SOLVE_CAP} iterations"
    )))
}

/// Features and true parameter i.i.d. N(0,1); responses x^T theta_true plus
/// standard Gaussian noise.
pub fn synthesize_regression(rng: &mut RngStream, n: usize, p: usize) -> (Dataset, Vec<f64>) {
    assert!(n >= 1 && p >= 1);
    let theta_true = rng.gaussian_vector(p, 1.0);
    let mut rows = Vec::with_capacity(n * p);
    for _ in 0..n {
        rows.extend(rng.gaussian_vector(p, 1.0));
    }
    let features = Matrix::from_vec(n, p, rows).expect("sized above");
    let responses: Vec<f64> =
        (0..n).map(|i| vec::dot(features.row(i), &theta_true) + rng.standard_normal()).collect();
    (Dataset::new(features, responses).expect("sized above"), theta_true)
}

/// Balanced +-1 labels; x | y ~ N(y * ones, gamma I).
pub fn synthesize_twoclass(rng: &mut RngStream, n: usize, p: usize, gamma: f64) -> Dataset {
    assert!(n >= 1 && p >= 1 && gamma > 0.0);
    let noise = gamma.sqrt();
    let mut rows = Vec::with_capacity(n * p);
    let mut responses = Vec::with_capacity(n);
    for _ in 0..n {
        let y = if rng.uniform() < 0.5 { 1.0 } else { -1.0 };
        for _ in 0..p {
            rows.push(y + noise * rng.standard_normal());
        }
        responses.push(y);
    }
    let features = Matrix::from_vec(n, p, rows).expect("sized above");
    Dataset::new(features, responses).expect("sized above")
}
