//! Adaptive Simpson quadrature.

const MAX_DEPTH: u32 = 48;

/// Integrates `f` over `[lo, hi]` until the Richardson error estimate drops
/// below `rel_tol` relative to the magnitude of the whole-interval estimate.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, rel_tol: f64) -> f64 {
    let mid = 0.5 * (lo + hi);
    let (flo, fmid, fhi) = (f(lo), f(mid), f(hi));
    let whole = simpson(lo, hi, flo, fmid, fhi);
    // Seed the tolerance from a 4-panel estimate so a coarse whole-interval
    // value that happens to be near zero does not demand absurd precision.
    let (lm, rm) = (0.5 * (lo + mid), 0.5 * (mid + hi));
    let refined = simpson(lo, mid, flo, f(lm), fmid) + simpson(mid, hi, fmid, f(rm), fhi);
    let scale = refined.abs().max(whole.abs()).max(f64::MIN_POSITIVE);
    recurse(&f, lo, hi, flo, fmid, fhi, whole, rel_tol * scale, MAX_DEPTH)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    abs_tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * abs_tol {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * abs_tol, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * abs_tol, depth - 1)
}
