//! Adaptive quadrature and small root-finding helpers.
//!
//! The span integrals this crate evaluates are smooth except for integrable
//! 1/sqrt singularities at ray turning depths, which always sit at interval
//! endpoints. Those endpoints are regularized by the substitution
//! `z = z_end -+ t^2`, after which a plain adaptive Gauss-Kronrod rule
//! converges quickly.

/// 15-point Kronrod abscissae on [-1, 1] (symmetric; only the non-negative
/// half is stored).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];

/// Embedded 7-point Gauss weights (nodes are `XGK[1], XGK[3], XGK[5], XGK[7]`).
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One Gauss-Kronrod 7/15 evaluation over `[a, b]`.
///
/// Returns `(kronrod_value, error_estimate)`. Each node pair is evaluated
/// once and reused by both embedded rules.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);

    let f_mid = f(mid);
    let mut kronrod = WGK[7] * f_mid;
    let mut gauss = WG[3] * f_mid;
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate().take(7) {
        let pair = f(mid - half * x) + f(mid + half * x);
        kronrod += wk * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// Subdivides until the local error estimate is below the per-interval share
/// of `rel_tol * |I|` (with a small absolute floor), up to a recursion depth
/// of 50. Designed for finite, smooth-after-regularization integrands; not a
/// general-purpose improper integrator.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (rough, _) = gk15(&f, a, b);
    let tol = rel_tol * rough.abs().max(1e-300) + f64::MIN_POSITIVE;
    adapt(&f, a, b, tol, 50)
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (value, err) = gk15(f, a, b);
    // The second test stops refinement once the error estimate sits at the
    // rounding floor of the panel's own value; splitting further cannot
    // improve it and only multiplies panels.
    if err <= tol || err <= 32.0 * f64::EPSILON * value.abs() || depth == 0 {
        return value;
    }
    let mid = 0.5 * (a + b);
    if !(a < mid && mid < b) {
        // Interval too narrow to represent a midpoint.
        return value;
    }
    adapt(f, a, mid, 0.5 * tol, depth - 1) + adapt(f, mid, b, 0.5 * tol, depth - 1)
}

/// Integrate `f` over `[a, b]` where `f` may carry an integrable 1/sqrt
/// singularity at either endpoint.
///
/// A singular endpoint is absorbed by the substitution `z = a + t^2`
/// (resp. `z = b - t^2`), which maps `dz/sqrt(z - a)` onto a bounded
/// integrand; the Kronrod nodes never touch `t = 0`, so `f` itself is never
/// evaluated exactly at the singular endpoint.
pub fn integrate_sqrt_endpoints<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    singular_a: bool,
    singular_b: bool,
    rel_tol: f64,
) -> f64 {
    if a == b {
        return 0.0;
    }
    match (singular_a, singular_b) {
        (false, false) => integrate(f, a, b, rel_tol),
        (true, false) => {
            let w = (b - a).sqrt();
            integrate(|t| f(a + t * t) * 2.0 * t, 0.0, w, rel_tol)
        }
        (false, true) => {
            let w = (b - a).sqrt();
            integrate(|t| f(b - t * t) * 2.0 * t, 0.0, w, rel_tol)
        }
        (true, true) => {
            let mid = 0.5 * (a + b);
            let w = (mid - a).sqrt();
            integrate(|t| f(a + t * t) * 2.0 * t, 0.0, w, rel_tol)
                + integrate(|t| f(b - t * t) * 2.0 * t, 0.0, w, rel_tol)
        }
    }
}

/// Bisection root-finding on `[lo, hi]`, assuming `g(lo)` and `g(hi)` bracket
/// a sign change. Returns the midpoint of the final bracket of width `<= tol`.
pub fn bisect_root<F: Fn(f64) -> f64>(g: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut g_lo = g(lo);
    if g_lo == 0.0 {
        return lo;
    }
    for _ in 0..200 {
        if (hi - lo).abs() <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return mid;
        }
        if (g_mid > 0.0) == (g_lo > 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
