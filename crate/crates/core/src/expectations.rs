//! Closed-form matrix elements in the invariant eigenbasis, variances of the
//! auxiliary and noncommutative variables, and the generalized uncertainty
//! products with their time-dependent bounds.
//!
//! The noncommutative variables are the Bopp-shifted combinations
//! X = x − θ p_y/(2ħ), Y = y + θ p_x/(2ħ), P_x = p_x + Ω y/(2ħ),
//! P_y = p_y − Ω x/(2ħ).

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::background::BackgroundSpec;
use crate::ep::EpSolution;
use crate::error::{Error, Result};
use crate::states::Snapshot;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiValues {
    pub chi_plus: Complex64,
    pub chi_minus: Complex64,
}

impl ChiValues {
    pub fn new(snap: &Snapshot) -> Self {
        let re = 1.0 / snap.sigma;
        let im = snap.dsigma / snap.a;
        ChiValues { chi_plus: Complex64::new(re, im), chi_minus: Complex64::new(re, -im) }
    }

    /// χ₊χ₋ = 1/σ² + σ̇²/a², computed in real arithmetic.
    pub fn product(&self) -> f64 {
        self.chi_plus.norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatrixKind {
    X,
    Y,
    Px,
    Py,
    X2,
    Y2,
    Px2,
    Py2,
    XPy,
    YPx,
}

impl MatrixKind {
    pub const ALL: [MatrixKind; 10] = [
        MatrixKind::X,
        MatrixKind::Y,
        MatrixKind::Px,
        MatrixKind::Py,
        MatrixKind::X2,
        MatrixKind::Y2,
        MatrixKind::Px2,
        MatrixKind::Py2,
        MatrixKind::XPy,
        MatrixKind::YPx,
    ];
}

/// μ(x, y) = √((x/2 + 1)(y − 1)).
pub fn mu(x: f64, y: f64) -> f64 {
    ((0.5 * x + 1.0) * (y - 1.0)).sqrt()
}

/// ⟨n, m−n| O |n, m′−n⟩ between dressed states whose relative phases are
/// e^(iΛ) per unit of m.
pub fn matrix_element(kind: MatrixKind, n: u32, m: u32, m_prime: u32, snap: &Snapshot, lambda: f64) -> Complex64 {
    let hbar = snap.hbar;
    let sigma = snap.sigma;
    let chi = ChiValues::new(snap);
    let (cp, cm) = (chi.chi_plus, chi.chi_minus);
    let e1 = Complex64::from_polar(1.0, lambda);
    let e2 = e1 * e1;
    let (mf, mpf) = (m as f64, m_prime as f64);
    let diag = if m == m_prime { 1.0 } else { 0.0 };
    let up1 = if m_prime == m + 1 { mpf.sqrt() } else { 0.0 };
    let dn1 = if m == m_prime + 1 { mf.sqrt() } else { 0.0 };
    let up2 = if m_prime == m + 2 { mu(mf, mpf) } else { 0.0 };
    let dn2 = if m == m_prime + 2 { mu(mpf, mf) } else { 0.0 };
    let level = 0.5 * hbar * (n as f64 + mf + 1.0) * diag;
    let ell = (mf - n as f64) * diag;
    let rh = hbar.sqrt();
    match kind {
        MatrixKind::X => I * rh / 2.0 * sigma * (up1 * e1 - dn1 / e1),
        MatrixKind::Y => -rh / 2.0 * sigma * (up1 * e1 + dn1 / e1),
        MatrixKind::Px => rh / 2.0 * (cp * up1 * e1 + cm * dn1 / e1),
        MatrixKind::Py => I * rh / 2.0 * (cp * up1 * e1 - cm * dn1 / e1),
        MatrixKind::X2 => level * sigma * sigma - hbar * sigma * sigma / (2.0 * SQRT_2) * (up2 * e2 + dn2 / e2),
        MatrixKind::Y2 => level * sigma * sigma + hbar * sigma * sigma / (2.0 * SQRT_2) * (up2 * e2 + dn2 / e2),
        MatrixKind::Px2 => level * chi.product() + hbar / (2.0 * SQRT_2) * (cp * cp * up2 * e2 + cm * cm * dn2 / e2),
        MatrixKind::Py2 => level * chi.product() - hbar / (2.0 * SQRT_2) * (cp * cp * up2 * e2 + cm * cm * dn2 / e2),
        MatrixKind::XPy => 0.5 * hbar * ell - hbar * sigma / (2.0 * SQRT_2) * (cp * up2 * e2 + cm * dn2 / e2),
        MatrixKind::YPx => -0.5 * hbar * ell - hbar * sigma / (2.0 * SQRT_2) * (cp * up2 * e2 + cm * dn2 / e2),
    }
}

/// Variances, products and bounds at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UncertaintyRecord {
    pub t: f64,
    pub theta: f64,
    pub omega_field: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub var_px: f64,
    pub var_py: f64,
    #[serde(rename = "var_X")]
    pub var_big_x: f64,
    #[serde(rename = "var_Y")]
    pub var_big_y: f64,
    #[serde(rename = "var_PX")]
    pub var_big_px: f64,
    #[serde(rename = "var_PY")]
    pub var_big_py: f64,
    pub prod_xpx: f64,
    #[serde(rename = "prod_XY")]
    pub prod_xy: f64,
    #[serde(rename = "prod_PxPy")]
    pub prod_pxpy: f64,
    #[serde(rename = "prod_XPx")]
    pub prod_xpx_nc: f64,
    #[serde(rename = "bound_XY")]
    pub bound_xy: f64,
    #[serde(rename = "bound_PP")]
    pub bound_pp: f64,
    #[serde(rename = "bound_XP")]
    pub bound_xp: f64,
}

impl UncertaintyRecord {
    pub const COLUMNS: [&'static str; 18] = [
        "t",
        "theta",
        "omega_field",
        "var_x",
        "var_y",
        "var_px",
        "var_py",
        "var_X",
        "var_Y",
        "var_PX",
        "var_PY",
        "prod_xpx",
        "prod_XY",
        "prod_PxPy",
        "prod_XPx",
        "bound_XY",
        "bound_PP",
        "bound_XP",
    ];

    pub fn values(&self) -> [f64; 18] {
        [
            self.t,
            self.theta,
            self.omega_field,
            self.var_x,
            self.var_y,
            self.var_px,
            self.var_py,
            self.var_big_x,
            self.var_big_y,
            self.var_big_px,
            self.var_big_py,
            self.prod_xpx,
            self.prod_xy,
            self.prod_pxpy,
            self.prod_xpx_nc,
            self.bound_xy,
            self.bound_pp,
            self.bound_xp,
        ]
    }

    /// Value of a column by name.
    pub fn get(&self, column: &str) -> Option<f64> {
        Self::COLUMNS.iter().position(|c| *c == column).map(|k| self.values()[k])
    }

    /// Generalized and standard relations that fail, with a relative slack
    /// of 1e-12 for rounding.
    pub fn violations(&self) -> Vec<String> {
        let hbar_half_checks = [
            ("prod_XY", self.prod_xy, self.bound_xy),
            ("prod_PxPy", self.prod_pxpy, self.bound_pp),
            ("prod_XPx", self.prod_xpx_nc, self.bound_xp),
        ];
        hbar_half_checks
            .iter()
            .filter(|(_, p, b)| !(*p >= *b - 1e-12 * b.abs().max(1.0)))
            .map(|(name, p, b)| format!("t = {}: {name} = {p} below bound {b}", self.t))
            .collect()
    }

    pub fn bitwise_eq(&self, other: &Self) -> bool {
        self.values().iter().zip(other.values()).all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

/// Assembles a record from auxiliary variances and the two covariances
/// Cov(x, p_y), Cov(y, p_x) that the Bopp shift couples in.
pub fn assemble(snap: &Snapshot, var: [f64; 4], cov_xpy: f64, cov_ypx: f64) -> UncertaintyRecord {
    let [vx, vy, vpx, vpy] = var;
    let hbar = snap.hbar;
    let (th, om) = (snap.theta, snap.omega_field);
    let th2 = th * th / (4.0 * hbar * hbar);
    let om2 = om * om / (4.0 * hbar * hbar);
    let big_x = vx + th2 * vpy - th / hbar * cov_xpy;
    let big_y = vy + th2 * vpx + th / hbar * cov_ypx;
    let big_px = vpx + om2 * vy + om / hbar * cov_ypx;
    let big_py = vpy + om2 * vx - om / hbar * cov_xpy;
    UncertaintyRecord {
        t: snap.t,
        theta: th,
        omega_field: om,
        var_x: vx,
        var_y: vy,
        var_px: vpx,
        var_py: vpy,
        var_big_x: big_x,
        var_big_y: big_y,
        var_big_px: big_px,
        var_big_py: big_py,
        prod_xpx: (vx * vpx).sqrt(),
        prod_xy: (big_x * big_y).sqrt(),
        prod_pxpy: (big_px * big_py).sqrt(),
        prod_xpx_nc: (big_x * big_px).sqrt(),
        bound_xy: 0.5 * th.abs(),
        bound_pp: 0.5 * om.abs(),
        bound_xp: (0.5 * hbar + th * om / (8.0 * hbar)).abs(),
    }
}

/// Shared kernel for eigenstates (β = 0) and squeezed states (level = 1,
/// ell = 0). Sharing it makes the reductions between the families exact.
pub(crate) fn gaussian_record(snap: &Snapshot, level: f64, ell: f64, beta: f64) -> UncertaintyRecord {
    let hbar = snap.hbar;
    let chi = ChiValues::new(snap);
    let (ep, em, ch) = (beta.exp(), (-beta).exp(), beta.cosh());
    let s2 = snap.sigma * snap.sigma;
    let d2 = (snap.dsigma / snap.a).powi(2);
    let base = 0.5 * hbar * level;
    let var = if beta == 0.0 {
        let p = base * chi.product();
        [base * s2, base * s2, p, p]
    } else {
        [base * s2 * ep * ch, base * s2 * em * ch, base * (em / s2 + ep * d2) * ch, base * (ep / s2 + em * d2) * ch]
    };
    let cov_xpy = 0.5 * hbar * ell + 0.25 * hbar * ((2.0 * beta).exp() - 1.0);
    let cov_ypx = -0.5 * hbar * ell + 0.25 * hbar * (1.0 - (-2.0 * beta).exp());
    assemble(snap, var, cov_xpy, cov_ypx)
}

pub fn eigenstate_record(n: u32, m: u32, snap: &Snapshot) -> UncertaintyRecord {
    gaussian_record(snap, (n + m + 1) as f64, m as f64 - n as f64, 0.0)
}

pub fn eigenstate_uncertainties(n: u32, m: u32, t: f64, ep: &EpSolution, bg: &BackgroundSpec) -> Result<UncertaintyRecord> {
    Ok(eigenstate_record(n, m, &Snapshot::at(bg, ep, t)?))
}

/// Expectation values of the ten operators in some state.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub x: f64,
    pub y: f64,
    pub px: f64,
    pub py: f64,
    pub x2: f64,
    pub y2: f64,
    pub px2: f64,
    pub py2: f64,
    pub xpy: f64,
    pub ypx: f64,
}

impl Moments {
    pub fn record(&self, snap: &Snapshot) -> UncertaintyRecord {
        let var = [self.x2 - self.x * self.x, self.y2 - self.y * self.y, self.px2 - self.px * self.px, self.py2 - self.py * self.py];
        assemble(snap, var, self.xpy - self.x * self.py, self.ypx - self.y * self.px)
    }
}

/// f[θ] = ΔXΔY − θ/2 for the ground state with θ taken as a free variable.
pub fn f_theta(snap: &Snapshot, theta: f64) -> f64 {
    let shifted = Snapshot { theta, ..*snap };
    eigenstate_record(0, 0, &shifted).prod_xy - 0.5 * theta
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaMin {
    pub theta_min: f64,
    pub f_min: f64,
}

/// θ_min = 2ħσ²a²/(a² + σ²σ̇²) and f[θ_min] = ħσ⁴σ̇²/(2a² + 2σ²σ̇²).
pub fn theta_min_at(snap: &Snapshot) -> Result<ThetaMin> {
    let Snapshot { sigma, dsigma, a, hbar, .. } = *snap;
    let s2 = sigma * sigma;
    let denom = a * a + s2 * dsigma * dsigma;
    let theta_min = 2.0 * hbar * s2 * a * a / denom;
    let f_min = hbar * s2 * s2 * dsigma * dsigma / (2.0 * denom);
    if !(f_min >= 0.0) {
        return Err(Error::Check(format!("f[theta_min] = {f_min} is negative at t = {}", snap.t)));
    }
    Ok(ThetaMin { theta_min, f_min })
}

pub fn theta_min_analysis(t: f64, ep: &EpSolution, bg: &BackgroundSpec) -> Result<ThetaMin> {
    theta_min_at(&Snapshot::at(bg, ep, t)?)
}
