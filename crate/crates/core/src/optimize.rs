//! Scalar minimization: golden-section search and bracket scanning.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search on [lo, hi]; stops once the bracket is narrower than
/// `tol * (1 + |lo| + |hi|)`. Returns (argmin, min).
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > tol * (1.0 + lo.abs() + hi.abs()) {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Samples `f` at `points` equally spaced abscissae spanning [lo, hi].
pub fn scan<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, points: usize) -> Vec<(f64, f64)> {
    let step = (hi - lo) / (points - 1) as f64;
    (0..points)
        .map(|k| {
            let x = if k + 1 == points { hi } else { lo + k as f64 * step };
            (x, f(x))
        })
        .collect()
}

/// True when the sampled values fall then rise (plateaus allowed).
pub fn is_unimodal(samples: &[(f64, f64)]) -> bool {
    if samples.iter().any(|s| !s.1.is_finite()) {
        return false;
    }
    let mut rising = false;
    for w in samples.windows(2) {
        let (a, b) = (w[0].1, w[1].1);
        let slack = 1e-14 * a.abs().max(b.abs());
        if b > a + slack {
            rising = true;
        } else if rising && b < a - slack {
            return false;
        }
    }
    true
}

/// Golden-section minimization preceded by a coarse scan. The scan narrows
/// the bracket to the neighbours of its best sample; a scan that is not
/// unimodal, or whose best sample sits on the bracket edge, is an error.
pub fn minimize_bracketed<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, scan_points: usize, tol: f64) -> Result<(f64, f64)> {
    let samples = scan(&mut f, lo, hi, scan_points);
    let best = samples.iter().enumerate().filter(|(_, s)| s.1.is_finite()).min_by(|a, b| a.1 .1.total_cmp(&b.1 .1)).map(|(k, _)| k);
    let Some(best) = best else {
        return Err(Error::NonUnimodal { scan: samples });
    };
    let edge = best == 0 || best + 1 == samples.len();
    if !is_unimodal(&samples) || edge {
        return Err(Error::NonUnimodal { scan: samples });
    }
    Ok(golden_section(f, samples[best - 1].0, samples[best + 1].0, tol))
}

/// Vertex of the parabola through (x−h, x, x+h); a polishing step for an
/// argmin already located to within a few h.
pub fn parabolic_vertex<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64) -> f64 {
    let (fm, f0, fp) = (f(x - h), f(x), f(x + h));
    let curvature = fp - 2.0 * f0 + fm;
    if curvature <= 0.0 {
        return x;
    }
    x - 0.5 * h * (fp - fm) / curvature
}
