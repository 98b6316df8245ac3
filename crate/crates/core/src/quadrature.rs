//! Adaptive composite Simpson quadrature.
//!
//! The interval is first split into a fixed number of panels; each panel is
//! then refined recursively until the local Richardson error estimate drops
//! below its share of the global tolerance. Refinement is bounded by a hard
//! cap on the number of accepted subintervals.

use crate::error::{Error, Result};

const INITIAL_PANELS: usize = 16;
const MAX_DEPTH: u32 = 48;
/// Hard cap on accepted subintervals before reporting non-convergence.
pub const MAX_SUBINTERVALS: usize = 1 << 20;

/// Result of a quadrature with its accumulated error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Integrates `f` over `[a, b]` to the given relative tolerance.
///
/// The absolute target is `rel_tol * |I_coarse|`, where `I_coarse` is the
/// initial composite estimate, but never below the roundoff level of
/// `int |f|`; an integrand that is identically zero converges immediately.
pub fn integrate<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    integrate_impl(f, a, b, Tolerance::Relative(rel_tol))
}

/// Integrates `f` to a fixed absolute tolerance. Use this when the
/// integral itself may be near zero (e.g. a derivative at its root).
pub fn integrate_abs<F>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    integrate_impl(f, a, b, Tolerance::Absolute(abs_tol))
}

#[derive(Clone, Copy)]
enum Tolerance {
    Relative(f64),
    Absolute(f64),
}

fn integrate_impl<F>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    let tol_value = match tol {
        Tolerance::Relative(t) | Tolerance::Absolute(t) => t,
    };
    if !(tol_value > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::invalid(
            "quadrature request",
            format!("interval [{a}, {b}] with tolerance {tol_value}"),
        ));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };

    let width = (hi - lo) / INITIAL_PANELS as f64;
    let mut nodes = Vec::with_capacity(2 * INITIAL_PANELS + 1);
    for i in 0..=2 * INITIAL_PANELS {
        let x = if i == 2 * INITIAL_PANELS {
            hi
        } else {
            lo + 0.5 * width * i as f64
        };
        nodes.push((x, f(x)));
    }
    let mut evaluations = nodes.len();
    let mut stack = Vec::with_capacity(64);
    let mut coarse = 0.0;
    let mut coarse_abs = 0.0;
    for p in 0..INITIAL_PANELS {
        let (pa, fa) = nodes[2 * p];
        let (_, fm) = nodes[2 * p + 1];
        let (pb, fb) = nodes[2 * p + 2];
        let whole = simpson(pa, pb, fa, fm, fb);
        coarse += whole;
        coarse_abs += simpson(pa, pb, fa.abs(), fm.abs(), fb.abs());
        stack.push(Panel {
            a: pa,
            b: pb,
            fa,
            fm,
            fb,
            whole,
            tol: 0.0,
            depth: 0,
        });
    }
    // Below this level, cancellation in the sum makes the error estimate
    // meaningless.
    let roundoff = 64.0 * f64::EPSILON * coarse_abs;
    let target = match tol {
        Tolerance::Relative(t) => (t * coarse.abs()).max(roundoff).max(f64::MIN_POSITIVE),
        Tolerance::Absolute(t) => t.max(roundoff),
    };
    for panel in &mut stack {
        panel.tol = target * (panel.b - panel.a) / (hi - lo);
    }

    let mut value = 0.0;
    let mut error = 0.0;
    let mut accepted = 0usize;
    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let flm = f(lm);
        let frm = f(rm);
        evaluations += 2;
        let left = simpson(p.a, m, p.fa, flm, p.fm);
        let right = simpson(m, p.b, p.fm, frm, p.fb);
        let delta = left + right - p.whole;
        if !delta.is_finite() {
            return Err(Error::Quadrature {
                achieved: f64::INFINITY,
                requested: target,
            });
        }
        if delta.abs() <= 15.0 * p.tol || p.depth >= MAX_DEPTH {
            value += left + right + delta / 15.0;
            error += delta.abs() / 15.0;
            accepted += 1;
            if accepted > MAX_SUBINTERVALS {
                return Err(Error::Quadrature {
                    achieved: error,
                    requested: target,
                });
            }
            continue;
        }
        stack.push(Panel {
            a: p.a,
            b: m,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            whole: left,
            tol: 0.5 * p.tol,
            depth: p.depth + 1,
        });
        stack.push(Panel {
            a: m,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            whole: right,
            tol: 0.5 * p.tol,
            depth: p.depth + 1,
        });
    }
    if !value.is_finite() || error > 10.0 * target {
        return Err(Error::Quadrature {
            achieved: error,
            requested: target,
        });
    }
    Ok(Integral {
        value: sign * value,
        error_estimate: error,
        evaluations,
    })
}
