//! Scalar root-finding and line-search helpers shared across modules.

/// Bisects `f` on `[lo, hi]` assuming `f(lo) <= 0 <= f(hi)` or the reverse.
///
/// Stops when the bracket width drops below `tol` or after `max_iter`
/// halvings, returning the bracket midpoint.
pub(crate) fn bisect(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64, max_iter: u32) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    let rising = f(lo) <= 0.0;
    for _ in 0..max_iter {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (fm <= 0.0) == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Minimizes a unimodal `f` on `[lo, hi]` by golden-section search.
///
/// Returns the abscissa of the minimum once the bracket width drops below
/// `tol`.
pub(crate) fn golden_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (lo, hi);
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_PHI * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = f(b);
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_square_root() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-13, 200);
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn bisect_handles_decreasing_functions() {
        let r = bisect(|x| 1.0 - x, 0.0, 3.0, 1e-13, 200);
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn golden_min_finds_parabola_vertex() {
        let r = golden_min(|x| (x - 0.3).powi(2), 0.0, 1.0, 1e-12);
        assert!((r - 0.3).abs() < 1e-10);
    }
}
