//! Bracketed scalar root finding and line minimization.

/// Root of `f` inside [lo, hi], assuming `f(lo)` and `f(hi)` have opposite
/// signs (zero endpoints are returned immediately). Bisection keeps the
/// bracket valid; a secant step is taken whenever it lands strictly inside.
/// Stops when the residual is below `tol_f` or the bracket shrinks to
/// `tol_x`.
pub fn bisect_secant<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol_x: f64,
    tol_f: f64,
) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    if fa == 0.0 {
        return a;
    }
    let mut fb = f(b);
    if fb == 0.0 {
        return b;
    }
    debug_assert!(
        fa.signum() != fb.signum(),
        "bisect_secant needs a sign change: f({a})={fa}, f({b})={fb}"
    );
    for _ in 0..200 {
        if (b - a).abs() <= tol_x {
            break;
        }
        // secant candidate, demoted to the midpoint when it leaves the bracket
        let mut x = if fb != fa {
            b - fb * (b - a) / (fb - fa)
        } else {
            0.5 * (a + b)
        };
        let mid = 0.5 * (a + b);
        if !(x > a.min(b) && x < a.max(b)) || !x.is_finite() {
            x = mid;
        }
        // alternate towards bisection to guarantee bracket shrinkage
        if (x - a).abs() < 0.25 * tol_x || (b - x).abs() < 0.25 * tol_x {
            x = mid;
        }
        let fx = f(x);
        if fx == 0.0 || fx.abs() <= tol_f {
            return x;
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    0.5 * (a + b)
}

/// Plain bisection to bracket width `width`, then a single Newton step with
/// the supplied derivative. Used for quantile inversions where the density
/// is available.
pub fn bisect_then_newton<F, D>(mut f: F, df: D, lo: f64, hi: f64, width: f64) -> f64
where
    F: FnMut(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    if fa == 0.0 {
        return a;
    }
    let fb = f(b);
    if fb == 0.0 {
        return b;
    }
    debug_assert!(fa.signum() != fb.signum());
    while (b - a).abs() > width {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break; // hit floating point resolution
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let x = 0.5 * (a + b);
    let d = df(x);
    if d != 0.0 && d.is_finite() {
        let step = f(x) / d;
        if step.is_finite() {
            return x - step;
        }
    }
    x
}

/// Golden-section minimization of a unimodal `f` on [a, b] to x-tolerance
/// `tol`. Returns (argmin, min).
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    const INVPHI: f64 = 0.6180339887498949;
    const INVPHI2: f64 = 0.3819660112501051;
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut c = a + INVPHI2 * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a) > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = a + INVPHI2 * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cubic_root() {
        let r = bisect_secant(|x| x * x * x - 2.0, 0.0, 2.0, 1e-14, 0.0);
        assert!((r - 2f64.powf(1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn newton_polish_hits_machine_precision() {
        let r = bisect_then_newton(|x| x.sin() - 0.5, |x| x.cos(), 0.0, 1.0, 1e-13);
        assert!((r - std::f64::consts::FRAC_PI_6).abs() < 1e-15);
    }

    #[test]
    fn golden_finds_parabola_vertex() {
        let (x, v) = golden_section(|x| (x - 0.3) * (x - 0.3) + 1.0, -2.0, 2.0, 1e-10);
        // the argmin of a quadratic cannot be localized below sqrt(eps)
        assert!((x - 0.3).abs() < 1e-7);
        assert!((v - 1.0).abs() < 1e-14);
    }
}
