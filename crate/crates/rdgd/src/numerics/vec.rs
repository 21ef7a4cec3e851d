//! Plain `Vec<f64>` vector arithmetic.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// y += alpha * x
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale(v: &mut [f64], alpha: f64) {
    for x in v.iter_mut() {
        *x *= alpha;
    }
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Euclidean projection onto the ball of the given radius around `center`.
///
/// Returns `v` unchanged when it already lies inside, otherwise rescales the
/// offset radially onto the boundary. The emitted point satisfies
/// |out - center| <= radius in floating point, so projecting twice is a
/// bitwise no-op.
pub fn project_ball(v: &[f64], center: &[f64], radius: f64) -> Vec<f64> {
    debug_assert_eq!(v.len(), center.len());
    debug_assert!(radius > 0.0);
    let mut out = v.to_vec();
    for attempt in 0..32 {
        let offset = sub(&out, center);
        let dist = norm2(&offset);
        if dist <= radius {
            return out;
        }
        // After the first rescale the point can sit a few ulps outside;
        // shave the factor until the representable result is inside.
        let shrink = radius / dist * (1.0 - f64::EPSILON).powi(attempt);
        out = center.iter().zip(&offset).map(|(c, o)| c + shrink * o).collect();
    }
    out
}
