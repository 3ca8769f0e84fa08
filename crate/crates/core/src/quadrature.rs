//! Adaptive Simpson quadrature with a relative tolerance.

use std::cell::Cell;

use crate::error::{Error, Result};

const INITIAL_PANELS: usize = 32;
const MAX_DEPTH: u32 = 50;
const MAX_EVALUATIONS: usize = 1 << 22;

/// Integrates `f` over `[a, b]` to the requested relative tolerance.
///
/// The interval is first split into a fixed number of panels; a composite
/// Simpson pass over them gives the magnitude used to turn `rel_tol` into an
/// absolute error budget, which is then shared among the panels and refined
/// recursively with Richardson extrapolation.
pub fn integrate<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("integration limits must be finite"));
    }
    if !(rel_tol > 0.0) {
        return Err(Error::invalid("relative tolerance must be positive"));
    }
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate(f, b, a, rel_tol).map(|v| -v);
    }

    let width = (b - a) / INITIAL_PANELS as f64;
    let mut panels = Vec::with_capacity(INITIAL_PANELS);
    let mut coarse = 0.0;
    let mut magnitude = 0.0;
    for i in 0..INITIAL_PANELS {
        let lo = a + width * i as f64;
        let hi = if i + 1 == INITIAL_PANELS { b } else { lo + width };
        let mid = 0.5 * (lo + hi);
        let (flo, fmid, fhi) = (f(lo), f(mid), f(hi));
        let s = simpson(lo, hi, flo, fmid, fhi);
        coarse += s;
        magnitude += (hi - lo) * (flo.abs() + 4.0 * fmid.abs() + fhi.abs()) / 6.0;
        panels.push((lo, hi, flo, fmid, fhi, s));
    }
    if !coarse.is_finite() {
        return Err(Error::numerical("integrand is not finite on the interval"));
    }
    if magnitude == 0.0 {
        return Ok(0.0);
    }

    let budget = rel_tol * coarse.abs().max(1e-3 * magnitude) / INITIAL_PANELS as f64;
    let evaluations = Cell::new(3 * INITIAL_PANELS);
    let counted = |x: f64| {
        evaluations.set(evaluations.get() + 1);
        f(x)
    };
    let mut total = 0.0;
    for (lo, hi, flo, fmid, fhi, s) in panels {
        total += refine(&counted, &evaluations, lo, hi, flo, fmid, fhi, s, budget, MAX_DEPTH)?;
    }
    Ok(total)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<F>(
    f: &F,
    evaluations: &Cell<usize>,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let split = left + right;
    let diff = split - whole;

    // The second clause stops refinement once the difference is at roundoff.
    if diff.abs() <= 15.0 * eps || diff.abs() <= 64.0 * f64::EPSILON * split.abs() {
        return Ok(split + diff / 15.0);
    }
    if depth == 0 || !split.is_finite() || evaluations.get() > MAX_EVALUATIONS {
        return Err(Error::numerical(format!(
            "adaptive Simpson did not converge on [{a}, {b}]"
        )));
    }
    Ok(refine(f, evaluations, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)?
        + refine(f, evaluations, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 0.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_integral() {
        let v = integrate(|x: f64| (-x * x).exp(), -10.0, 10.0, 1e-12).unwrap();
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let v = integrate(f64::sin, std::f64::consts::PI, 0.0, 1e-10).unwrap();
        assert!((v + 2.0).abs() < 1e-9);
    }

    #[test]
    fn zero_integrand() {
        assert_eq!(integrate(|_| 0.0, -1.0, 1.0, 1e-8).unwrap(), 0.0);
    }

    #[test]
    fn rejects_non_finite_limits() {
        assert!(integrate(|x| x, 0.0, f64::INFINITY, 1e-8).is_err());
    }

    #[test]
    fn noisy_integrand_fails_quickly() {
        let r = integrate(|x: f64| (x * 1e12).sin(), 0.0, 1.0, 1e-12);
        assert!(matches!(r, Err(Error::NumericalFailure(_))));
    }

    #[test]
    fn singular_integrand_fails() {
        let r = integrate(|x: f64| 1.0 / x.abs().max(1e-300), -1.0, 1.0, 1e-10);
        assert!(matches!(r, Err(Error::NumericalFailure(_))));
    }
}
