//! One-dimensional root finding on monotone functions.

/// Direction of a monotone function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotone {
    Increasing,
    Decreasing,
}

/// Plain bisection for a sign change of `f` on `[lo, hi]`.
///
/// `f(lo)` and `f(hi)` must have opposite signs (or one of them is zero).
/// Returns the midpoint of the final bracket once it is narrower than `tol`.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    for _ in 0..400 {
        if (hi - lo).abs() <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Newton's method kept inside a bisection bracket.
///
/// `eval` returns `(f(x), f'(x))`. The bracket `[lo, hi]` must contain the
/// root of the monotone function; iteration starts at `start` (or the
/// midpoint if `start` lies outside). A Newton step is replaced by a
/// bisection step when it would leave the bracket or when it is not at
/// least twice as short as the step before last. Stops once a step or the
/// bracket width drops below `tol`.
pub fn newton_bracketed<F>(mut eval: F, mut lo: f64, mut hi: f64, start: f64, dir: Monotone, tol: f64) -> f64
where
    F: FnMut(f64) -> (f64, f64),
{
    // Orient so that f(lo) <= 0 <= f(hi) as in the increasing case.
    let sign = match dir {
        Monotone::Increasing => 1.0,
        Monotone::Decreasing => -1.0,
    };
    let mut x = if start > lo && start < hi { start } else { 0.5 * (lo + hi) };
    let mut dx_old = hi - lo;
    let mut dx = dx_old;
    for _ in 0..200 {
        let (fx, dfx) = eval(x);
        let fx = sign * fx;
        let dfx = sign * dfx;
        if fx == 0.0 {
            return x;
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let use_newton = dfx > 0.0 && newton > lo && newton < hi && (2.0 * fx).abs() <= (dx_old * dfx).abs();
        dx_old = dx;
        let next = if use_newton { newton } else { 0.5 * (lo + hi) };
        dx = x - next;
        if dx.abs() <= tol || hi - lo <= tol {
            return next;
        }
        x = next;
    }
    x
}
