/// Result of a bracketed root search.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Root {
    pub x: f64,
    pub bracket: (f64, f64),
}

const MAX_ITER: usize = 500;

/// Bisection interleaved with secant (false position) steps on a sign-changing bracket.
///
/// A secant step is taken whenever it lands strictly inside the bracket and the bracket
/// has been at least halved within the last two steps; otherwise the step bisects.
/// Stops at `|f| <= tol` or when the bracket has collapsed to adjacent floats.
pub(crate) fn bracketed_root(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Root {
    let (mut lo, mut hi) = (lo.min(hi), lo.max(hi));
    let mut flo = f(lo);
    let mut fhi = f(hi);
    let mut best = if flo.abs() <= fhi.abs() { (lo, flo) } else { (hi, fhi) };
    if best.1.abs() <= tol {
        return Root { x: best.0, bracket: (lo, hi) };
    }
    debug_assert!(flo.signum() != fhi.signum(), "bracket does not change sign");

    let mut stalls = 0;
    for _ in 0..MAX_ITER {
        let width = hi - lo;
        let secant = hi - fhi * (hi - lo) / (fhi - flo);
        let x = if stalls < 2 && secant > lo && secant < hi && secant.is_finite() {
            secant
        } else {
            0.5 * (lo + hi)
        };
        if x <= lo || x >= hi {
            break;
        }
        let fx = f(x);
        if fx.abs() < best.1.abs() {
            best = (x, fx);
        }
        if fx.abs() <= tol || fx == 0.0 {
            break;
        }
        if (fx > 0.0) == (flo > 0.0) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        if hi - lo > 0.5 * width {
            stalls += 1;
        } else {
            stalls = 0;
        }
    }
    Root { x: best.0, bracket: (lo, hi) }
}
