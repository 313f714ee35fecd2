//! Distance comparisons shared by every engine.
//!
//! Unit-weight distances are small integers stored exactly in `f64`, so the
//! relative slack never changes their outcome. Unreachable is `f64::INFINITY`.

/// Relative tolerance for weighted distance equality.
pub const REL_TOL: f64 = 1e-9;

#[inline]
fn slack(a: f64, b: f64) -> f64 {
    REL_TOL * a.abs().max(b.abs()).max(1.0)
}

/// `a == b` within tolerance. Never true when either side is unreachable.
#[inline]
pub fn same_dist(a: f64, b: f64) -> bool {
    a.is_finite() && b.is_finite() && (a == b || (a - b).abs() <= slack(a, b))
}

/// `a < b` by more than the tolerance; a finite `a` is below an infinite `b`.
#[inline]
pub fn strictly_less(a: f64, b: f64) -> bool {
    if !a.is_finite() {
        return false;
    }
    if !b.is_finite() {
        return true;
    }
    a < b && !same_dist(a, b)
}

/// `a <= b` within tolerance; false whenever `a` is unreachable.
#[inline]
pub fn at_most(a: f64, b: f64) -> bool {
    strictly_less(a, b) || same_dist(a, b)
}
