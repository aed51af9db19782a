//! Scalar minimization and root bracketing used by the attack analysis:
//! golden-section search over a bracket and bisection for sign changes.

/// Golden-section minimization of `f` on `[a, b]`. Converges linearly; with
/// `tol` on the bracket width the returned abscissa is within `tol` of a
/// local minimum of a unimodal function.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    debug_assert!(a < b && tol > 0.0);
    const INV_PHI: f64 = 0.618_033_988_749_894_8; // (√5 − 1)/2
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Global minimum of `f` over a period `[lo, hi)` of a periodic function:
/// coarse scan over `n` cells, then golden-section refinement around the best
/// cell (wrapping at the period boundary).
pub fn periodic_min<F: Fn(f64) -> f64 + Copy>(f: F, lo: f64, hi: f64, n: usize, tol: f64) -> f64 {
    debug_assert!(n >= 8);
    let span = hi - lo;
    let step = span / n as f64;
    let mut best_i = 0;
    let mut best = f64::INFINITY;
    for i in 0..n {
        let x = lo + (i as f64 + 0.5) * step;
        let v = f(x);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let center = lo + (best_i as f64 + 0.5) * step;
    // Bracket one cell on each side; evaluate through the wrap if needed.
    let g = move |x: f64| {
        let mut y = x;
        if y < lo {
            y += span;
        } else if y >= hi {
            y -= span;
        }
        f(y)
    };
    golden_section_min(g, center - step, center + step, tol)
}

/// Bisection root of `f` on `[a, b]`; requires a sign change across the
/// bracket. Returns the midpoint of the final bracket of width `tol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> Option<f64> {
    let (fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
        } else {
            b = mid;
        }
    }
    Some(0.5 * (a + b))
}
