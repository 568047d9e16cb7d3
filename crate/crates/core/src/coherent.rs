//! Glauber, squeezed and Gaussian Klauder coherent states in the invariant
//! eigenbasis.
//!
//! Glauber and squeezed moments are taken in the frame where the
//! Lewis-Riesenfeld phase is absorbed into α. Gaussian Klauder moments keep
//! Λ(t) explicitly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::background::BackgroundSpec;
use crate::ep::EpSolution;
use crate::error::{Error, Result};
use crate::expectations::{gaussian_record, ChiValues, Moments, UncertaintyRecord};
use crate::optimize::minimize_bracketed;
use crate::states::{PhaseIntegral, Snapshot};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoherentSpec {
    Glauber { alpha: Complex64 },
    Squeezed { alpha: Complex64, beta: f64 },
    GaussianKlauder(GkSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GkSpec {
    #[serde(default)]
    pub n: u32,
    #[serde(default)]
    pub m0: f64,
    #[serde(default)]
    pub phi0: f64,
    pub s: f64,
}

impl GkSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.s > 0.0 && self.s.is_finite()) {
            return Err(Error::config("s", format!("width must be positive, got {}", self.s)));
        }
        if !(self.m0 >= 0.0) {
            return Err(Error::config("m0", format!("center must be nonnegative, got {}", self.m0)));
        }
        Ok(())
    }
}

/// Glauber first moments (⟨x⟩, ⟨y⟩, ⟨p_x⟩, ⟨p_y⟩).
pub fn glauber_first_moments(alpha: Complex64, snap: &Snapshot) -> [f64; 4] {
    let rh = snap.hbar.sqrt();
    let chi_alpha = ChiValues::new(snap).chi_plus * alpha;
    [-rh * snap.sigma * alpha.im, -rh * snap.sigma * alpha.re, rh * chi_alpha.re, -rh * chi_alpha.im]
}

/// Glauber variances coincide with the ground state for every α.
pub fn glauber_record(_alpha: Complex64, snap: &Snapshot) -> UncertaintyRecord {
    gaussian_record(snap, 1.0, 0.0, 0.0)
}

pub fn glauber_uncertainties(alpha: Complex64, t: f64, ep: &EpSolution, bg: &BackgroundSpec) -> Result<UncertaintyRecord> {
    Ok(glauber_record(alpha, &Snapshot::at(bg, ep, t)?))
}

/// Squeezed state S(β)D(α)|0⟩ with S(β) = exp(β(â² − â†²)/2).
///
/// Cov(x, p_y) = (ħ/4)(e^(2β) − 1) and Cov(y, p_x) = (ħ/4)(1 − e^(−2β)),
/// so ΔP_x² carries (Ω/4)(1 − e^(−2β)); this keeps ΔP_y²(β) = ΔP_x²(−β).
pub fn squeezed_record(_alpha: Complex64, beta: f64, snap: &Snapshot) -> UncertaintyRecord {
    gaussian_record(snap, 1.0, 0.0, beta)
}

pub fn squeezed_uncertainties(alpha: Complex64, beta: f64, t: f64, ep: &EpSolution, bg: &BackgroundSpec) -> Result<UncertaintyRecord> {
    Ok(squeezed_record(alpha, beta, &Snapshot::at(bg, ep, t)?))
}

/// β minimizing Δx·Δp_x: ½ ln(2/(1 + √(1 + 8k))) with k = σ²σ̇²/a². This is
/// the closed form rewritten without the 0/0 at σ̇ = 0.
pub fn beta_min_aux_at(snap: &Snapshot) -> f64 {
    let k = (snap.sigma * snap.dsigma / snap.a).powi(2);
    0.5 * (2.0 / (1.0 + (1.0 + 8.0 * k).sqrt())).ln()
}

pub fn beta_min_aux(t: f64, ep: &EpSolution, bg: &BackgroundSpec) -> Result<f64> {
    Ok(beta_min_aux_at(&Snapshot::at(bg, ep, t)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Target {
    #[serde(rename = "XPx")]
    XPx,
    #[serde(rename = "XY")]
    XY,
    #[serde(rename = "PxPy")]
    PxPy,
    /// auxiliary Δx·Δp_x
    #[serde(rename = "xpx")]
    Aux,
}

impl Target {
    pub fn of(self, r: &UncertaintyRecord) -> f64 {
        match self {
            Target::XPx => r.prod_xpx_nc,
            Target::XY => r.prod_xy,
            Target::PxPy => r.prod_pxpy,
            Target::Aux => r.prod_xpx,
        }
    }
}

pub const DEFAULT_BRACKET: (f64, f64) = (-3.0, 3.0);

/// Minimizes the squeezed product over β on the bracket: a 64-point scan,
/// then golden-section to 1e-8 between the neighbours of the best sample.
pub fn minimize_beta_at(target: Target, snap: &Snapshot, bracket: (f64, f64)) -> Result<(f64, f64)> {
    let f = |b: f64| target.of(&squeezed_record(Complex64::new(0.0, 0.0), b, snap));
    minimize_bracketed(f, bracket.0, bracket.1, 64, 1e-8)
}

pub fn minimize_beta_nc(target: Target, t: f64, ep: &EpSolution, bg: &BackgroundSpec, bracket: (f64, f64)) -> Result<(f64, f64)> {
    minimize_beta_at(target, &Snapshot::at(bg, ep, t)?, bracket)
}

/// Truncated sums over G(k, m₀) = exp(−(k − m₀)²/(4s²)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GkSums {
    pub s1: f64,
    /// Σ k G²; S₂(x) adds x·N
    pub s2_base: f64,
    pub s3: f64,
    pub n: f64,
    pub truncation_terms: usize,
}

impl GkSums {
    /// S₂(x) = Σ (k + x) G(k)².
    pub fn s2(&self, x: f64) -> f64 {
        self.s2_base + x * self.n
    }
}

fn gk_weight(k: usize, m0: f64, s: f64) -> f64 {
    let d = k as f64 - m0;
    (-d * d / (4.0 * s * s)).exp()
}

#[derive(Default)]
struct Accum {
    s1: f64,
    s2: f64,
    s3: f64,
    n: f64,
}

fn gk_terms(k: usize, m0: f64, s: f64) -> [f64; 4] {
    let kf = k as f64;
    let (g0, g1, g2) = (gk_weight(k, m0, s), gk_weight(k + 1, m0, s), gk_weight(k + 2, m0, s));
    [(kf + 1.0).sqrt() * g0 * g1, kf * g0 * g0, ((0.5 * kf + 1.0) * (kf + 1.0)).sqrt() * g0 * g2, g0 * g0]
}

/// Direct summation, stopping past the centre once every running term is
/// below `tail_tol` times its accumulated sum.
pub fn gk_sums(m0: f64, s: f64, tail_tol: f64) -> GkSums {
    let mut acc = Accum::default();
    let cap = (m0 + 60.0 * s + 200.0) as usize;
    let mut k = 0;
    loop {
        let [t1, t2, t3, tn] = gk_terms(k, m0, s);
        acc.s1 += t1;
        acc.s2 += t2;
        acc.s3 += t3;
        acc.n += tn;
        k += 1;
        let small = t1 <= tail_tol * acc.s1 && t2 <= tail_tol * acc.s2 && t3 <= tail_tol * acc.s3 && tn <= tail_tol * acc.n;
        if (k as f64 > m0 + 1.0 && small) || k >= cap {
            break;
        }
    }
    GkSums { s1: acc.s1, s2_base: acc.s2, s3: acc.s3, n: acc.n, truncation_terms: k }
}

/// The same sums with a fixed number of terms.
pub fn gk_sums_truncated(m0: f64, s: f64, terms: usize) -> GkSums {
    let mut acc = Accum::default();
    for k in 0..terms {
        let [t1, t2, t3, tn] = gk_terms(k, m0, s);
        acc.s1 += t1;
        acc.s2 += t2;
        acc.s3 += t3;
        acc.n += tn;
    }
    GkSums { s1: acc.s1, s2_base: acc.s2, s3: acc.s3, n: acc.n, truncation_terms: terms }
}

/// Moments of |GK⟩ = N^(−1/2) Σ_m G(m, m₀) e^(imφ₀)|n, m−n⟩ at phase Λ.
pub fn gk_moments(spec: &GkSpec, sums: &GkSums, lambda: f64, snap: &Snapshot) -> Moments {
    let Snapshot { sigma, dsigma, a, hbar, .. } = *snap;
    let n_sum = sums.n;
    let (s1, c1) = (spec.phi0 + lambda).sin_cos();
    let (s2, c2) = (2.0 * spec.phi0 + 2.0 * lambda).sin_cos();
    let rh = hbar.sqrt();
    let first = sums.s1 / n_sum;
    let d = dsigma / a;
    let chi2 = 1.0 / (sigma * sigma) + d * d;
    let diff = 1.0 / (sigma * sigma) - d * d;
    let r2 = std::f64::consts::SQRT_2 * sums.s3;
    let n = spec.n as f64;
    let s2_up = sums.s2(n + 1.0);
    let s2_down = sums.s2(-n);
    let mixed = r2 * (d * sigma * s2 - c2);
    let p2_cross = r2 * (diff * c2 - 2.0 * d / sigma * s2);
    Moments {
        x: -rh * sigma * s1 * first,
        y: -rh * sigma * c1 * first,
        px: rh * (c1 / sigma - d * s1) * first,
        py: -rh * (s1 / sigma + d * c1) * first,
        x2: hbar * sigma * sigma / (2.0 * n_sum) * (s2_up - r2 * c2),
        y2: hbar * sigma * sigma / (2.0 * n_sum) * (s2_up + r2 * c2),
        px2: hbar / (2.0 * n_sum) * (chi2 * s2_up + p2_cross),
        py2: hbar / (2.0 * n_sum) * (chi2 * s2_up - p2_cross),
        xpy: hbar / (2.0 * n_sum) * (mixed + s2_down),
        ypx: hbar / (2.0 * n_sum) * (mixed - s2_down),
    }
}

pub fn gk_record(spec: &GkSpec, sums: &GkSums, lambda: f64, snap: &Snapshot) -> UncertaintyRecord {
    gk_moments(spec, sums, lambda, snap).record(snap)
}

pub const GK_TAIL_TOL: f64 = 1e-15;

pub fn gk_uncertainties(spec: &GkSpec, t: f64, ep: &EpSolution, bg: &BackgroundSpec, phase: &PhaseIntegral) -> Result<UncertaintyRecord> {
    spec.validate()?;
    let snap = Snapshot::at(bg, ep, t)?;
    let sums = gk_sums(spec.m0, spec.s, GK_TAIL_TOL);
    Ok(gk_record(spec, &sums, phase.lambda(t)?, &snap))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_sums_at_half_width() {
        let g = gk_sums(0.0, 0.5, GK_TAIL_TOL);
        assert!((g.s1 - 0.3774).abs() < 5e-4);
        assert!((g.s2(0.0) - 0.1360).abs() < 5e-4);
        assert!((g.s2(1.0) - 1.2717).abs() < 5e-4);
        assert!((g.s3 - 0.0184).abs() < 5e-4);
        assert!((g.n - 1.1357).abs() < 5e-4);
    }

    #[test]
    fn narrow_width_collapses_to_center() {
        let g = gk_sums(0.0, 0.1, GK_TAIL_TOL);
        assert!(g.s1 < 1e-10 && g.s3 < 1e-10);
        assert_eq!(g.n, 1.0);
        assert_eq!(g.s2(3.0), 3.0);
    }

    #[test]
    fn beta_min_examples() {
        let s = Snapshot::from_values(1.0, 1.0, 1.0, 0.0, 0.0, 1.0);
        assert!((beta_min_aux_at(&s) - 0.5 * 0.5f64.ln()).abs() < 1e-15);
        let flat = Snapshot::from_values(1.0, 0.0, 1.0, 0.0, 0.0, 1.0);
        assert_eq!(beta_min_aux_at(&flat), 0.0);
    }

    #[test]
    fn static_squeezing_trades_variance() {
        let s = Snapshot::from_values(1.0, 0.0, 1.0, 0.0, 0.0, 1.0);
        let r0 = squeezed_record(Complex64::new(0.0, 0.0), 0.0, &s);
        let r1 = squeezed_record(Complex64::new(0.0, 0.0), 0.4, &s);
        assert!(r1.var_x > r0.var_x && r1.var_px < r0.var_px);
    }
}
