//! Independent oracles for the integration and acceptance suites. Nothing
//! here may call the implementation paths it is used to check.

#![allow(dead_code)]

use rdgd::mirror::FeasibleSet;
use rdgd::numerics::matrix::Matrix;

/// All eigenvalues of a symmetric matrix by the cyclic Jacobi rotation
/// method, ascending.
pub fn jacobi_eigenvalues(a: &Matrix) -> Vec<f64> {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut m: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    for _sweep in 0..200 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m[i][j] * m[i][j];
            }
        }
        if off <= 1e-300 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() <= 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eigs
}

/// Pure bisection for W_-1: solve w*exp(w) = x over w in [lo, -1].
pub fn bisect_lambert(x: f64, mut lo: f64) -> f64 {
    assert!(x < 0.0 && x >= -(-1.0f64).exp() - 1e-15);
    let f = |w: f64| w * w.exp() - x;
    assert!(f(lo) > 0.0, "bisection bracket too small for x = {x}");
    let mut hi = -1.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Central finite difference of f along dir at theta.
pub fn directional_fd(f: impl Fn(&[f64]) -> f64, theta: &[f64], dir: &[f64], h: f64) -> f64 {
    let plus: Vec<f64> = theta.iter().zip(dir).map(|(t, d)| t + h * d).collect();
    let minus: Vec<f64> = theta.iter().zip(dir).map(|(t, d)| t - h * d).collect();
    (f(&plus) - f(&minus)) / (2.0 * h)
}

/// Projected gradient descent on a smooth convex objective over a ball;
/// independent of the closed-form argmin path it checks.
pub fn projected_gradient_min(
    grad: impl Fn(&[f64]) -> Vec<f64>,
    lipschitz: f64,
    feasible: &FeasibleSet,
    start: &[f64],
    iters: usize,
) -> Vec<f64> {
    let step = 1.0 / lipschitz;
    let mut u = feasible.project(start);
    for _ in 0..iters {
        let g = grad(&u);
        let cand: Vec<f64> = u.iter().zip(&g).map(|(ui, gi)| ui - step * gi).collect();
        let cand = feasible.project(&cand);
        let moved: f64 = cand.iter().zip(&u).map(|(a, b)| (a - b) * (a - b)).sum();
        u = cand;
        if moved.sqrt() < 1e-14 {
            break;
        }
    }
    u
}

/// Exhaustive grid minimization of f over the ball, 2-D only: an interior
/// lattice at the given step plus the boundary circle at the same arc
/// resolution (constrained minima sit on the boundary, where the interior
/// lattice alone cannot localize them).
pub fn grid_search_2d(f: impl Fn(&[f64]) -> f64, feasible: &FeasibleSet, step: f64) -> Vec<f64> {
    assert_eq!(feasible.center.len(), 2);
    let (cx, cy) = (feasible.center[0], feasible.center[1]);
    let r = feasible.radius;
    let half = (r / step).ceil() as i64;
    let mut best = vec![cx, cy];
    let mut best_val = f(&best);
    for i in -half..=half {
        let x = cx + i as f64 * step;
        for j in -half..=half {
            let y = cy + j as f64 * step;
            let dx = x - cx;
            let dy = y - cy;
            if dx * dx + dy * dy > r * r {
                continue;
            }
            let v = f(&[x, y]);
            if v < best_val {
                best_val = v;
                best = vec![x, y];
            }
        }
    }
    let arcs = (2.0 * std::f64::consts::PI * r / step).ceil() as i64;
    for k in 0..arcs {
        let phi = 2.0 * std::f64::consts::PI * k as f64 / arcs as f64;
        let u = [cx + r * phi.cos(), cy + r * phi.sin()];
        let v = f(&u);
        if v < best_val {
            best_val = v;
            best = u.to_vec();
        }
    }
    best
}

/// Solve A x = b by Gaussian elimination with partial pivoting (test-local
/// oracle, independent of the crate's Cholesky).
pub fn gauss_solve(a: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = a.rows();
    assert_eq!(n, a.cols());
    assert_eq!(n, b.len());
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = a.row(i).to_vec();
            row.push(b[i]);
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap()).unwrap();
        m.swap(col, pivot);
        assert!(m[col][col].abs() > 1e-300, "singular system in oracle");
        for row in col + 1..n {
            let factor = m[row][col] / m[col][col];
            for k in col..=n {
                m[row][k] -= factor * m[col][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut sum = m[row][n];
        for k in row + 1..n {
            sum -= m[row][k] * x[k];
        }
        x[row] = sum / m[row][row];
    }
    x
}

/// Tiny deterministic generator for oracle-side instances.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        // xorshift64*
        let mut x = self.0;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.0 = x;
        x.wrapping_mul(0x2545F4914F6CDD1D)
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Box-Muller standard normal.
    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform().max(1e-300);
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}
