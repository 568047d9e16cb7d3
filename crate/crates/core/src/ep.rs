//! Solutions of the dissipative Ermakov-Pinney equation
//!
//! σ̈ − (ȧ/a)σ̇ + abσ = τa²/σ³
//!
//! from closed-form Chiellini families, the Pinney superposition of two
//! linear solutions, or direct adaptive integration.

use std::f64::consts::PI;
use std::io::Write;

use serde::Serialize;

use crate::background::{BackgroundMode, BackgroundSpec, Interval, PhysicalConstants, Profile};
use crate::error::{Error, Result};
use crate::ode::{self, OdeOptions, Trajectory};
use crate::special_fn::bessel_set;

/// Residual tolerances certified for each construction route.
pub const CLOSED_FORM_TOLERANCE: f64 = 1e-10;
pub const NUMERIC_TOLERANCE: f64 = 1e-6;

/// σ below this value during integration counts as a collapse.
pub const SIGMA_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EpKind {
    ChielliniExponential,
    ChielliniRational,
    PinneySuperposition,
    Numeric,
}

impl EpKind {
    pub fn residual_tolerance(self) -> f64 {
        match self {
            EpKind::Numeric => NUMERIC_TOLERANCE,
            // numeric Pinney pairs are refined to closed-form accuracy
            _ => CLOSED_FORM_TOLERANCE,
        }
    }
}

/// Family constants; only the ones relevant to the construction are set.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EpParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dsigma0: Option<f64>,
}

#[derive(Debug, Clone)]
enum Repr {
    Exponential {
        mu: f64,
        gamma: f64,
    },
    /// σ = scale·(μ − γt)^(−1/n)
    Rational {
        n: u32,
        gamma: f64,
        mu: f64,
        scale: f64,
    },
    /// u₁ = c₁J₀(z), u₂ = Y₀(z), z = z0·e^(γt/2)
    Bessel {
        c1: f64,
        gamma: f64,
        z0: f64,
        k: f64,
    },
    /// u₁ = c₁cos(wt), u₂ = sin(wt)/w
    Harmonic {
        c1: f64,
        w: f64,
        k: f64,
    },
    /// numerically integrated (u₁, u̇₁, u₂, u̇₂)
    Linear {
        traj: Trajectory<4>,
        k: f64,
    },
    Direct {
        traj: Trajectory<2>,
    },
}

/// Evaluable σ(t), σ̇(t) with its provenance and validity interval.
#[derive(Debug, Clone)]
pub struct EpSolution {
    kind: EpKind,
    params: EpParams,
    repr: Repr,
    validity: Interval,
    tau: f64,
    grid: Vec<(f64, f64, f64)>,
}

impl EpSolution {
    pub fn kind(&self) -> EpKind {
        self.kind
    }

    pub fn params(&self) -> &EpParams {
        &self.params
    }

    pub fn validity(&self) -> Interval {
        self.validity
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Samples (t, σ, σ̇) recorded at construction (the requested grid of a
    /// numeric integration; empty for closed forms).
    pub fn grid(&self) -> &[(f64, f64, f64)] {
        &self.grid
    }

    pub fn sigma(&self, t: f64) -> Result<f64> {
        Ok(self.state(t)?.0)
    }

    /// (σ, σ̇) at t.
    pub fn state(&self, t: f64) -> Result<(f64, f64)> {
        self.validity.check(t)?;
        Ok(match &self.repr {
            Repr::Exponential { mu, gamma } => {
                let s = mu * (-0.5 * gamma * t).exp();
                (s, -0.5 * gamma * s)
            }
            Repr::Rational { n, gamma, mu, scale } => {
                let base = mu - gamma * t;
                let p = 1.0 / *n as f64;
                let s = scale * base.powf(-p);
                (s, p * gamma * s / base)
            }
            Repr::Bessel { .. } | Repr::Harmonic { .. } | Repr::Linear { .. } => {
                let (u1, du1, u2, du2, _, _, k) = self.linear_pair(t)?;
                let s2 = u1 * u1 + k * u2 * u2;
                let s = s2.sqrt();
                (s, (u1 * du1 + k * u2 * du2) / s)
            }
            Repr::Direct { traj } => {
                let (y, _) = traj.eval(t).ok_or_else(|| outside(t, self.validity))?;
                (y[0], y[1])
            }
        })
    }

    /// σ̈ at t, computed independently of the equation being checked: from
    /// closed-form derivatives, from the linear equation satisfied by the
    /// Pinney pair, or by differentiating the dense-output polynomial of σ̇.
    pub fn sigma_ddot(&self, t: f64) -> Result<f64> {
        self.validity.check(t)?;
        Ok(match &self.repr {
            Repr::Exponential { gamma, .. } => 0.25 * gamma * gamma * self.sigma(t)?,
            Repr::Rational { n, gamma, mu, .. } => {
                let base = mu - gamma * t;
                let p = 1.0 / *n as f64;
                p * (p + 1.0) * gamma * gamma * self.sigma(t)? / (base * base)
            }
            Repr::Bessel { .. } | Repr::Harmonic { .. } | Repr::Linear { .. } => {
                let (u1, du1, u2, du2, ddu1, ddu2, k) = self.linear_pair(t)?;
                let (s, ds) = self.state(t)?;
                (du1 * du1 + u1 * ddu1 + k * (du2 * du2 + u2 * ddu2) - ds * ds) / s
            }
            Repr::Direct { traj } => {
                let (_, dy) = traj.eval(t).ok_or_else(|| outside(t, self.validity))?;
                dy[1]
            }
        })
    }

    /// Wronskian u₁u̇₂ − u̇₁u₂ of the Pinney pair, if this is a Pinney solution.
    pub fn wronskian(&self, t: f64) -> Option<f64> {
        let (u1, du1, u2, du2, ..) = self.linear_pair(t).ok()?;
        Some(u1 * du2 - du1 * u2)
    }

    /// (u₁, u̇₁, u₂, u̇₂, ü₁, ü₂, K) with σ² = u₁² + K u₂².
    #[allow(clippy::type_complexity)]
    fn linear_pair(&self, t: f64) -> Result<(f64, f64, f64, f64, f64, f64, f64)> {
        match &self.repr {
            Repr::Bessel { c1, gamma, z0, k } => {
                let z = z0 * (0.5 * gamma * t).exp();
                let dz = 0.5 * gamma * z;
                let ddz = 0.5 * gamma * dz;
                let b = bessel_set(z);
                // J₀' = −J₁, J₁' = J₀ − J₁/z; same for Y
                let dj1 = b.j0 - b.j1 / z;
                let dy1 = b.y0 - b.y1 / z;
                Ok((c1 * b.j0, -c1 * b.j1 * dz, b.y0, -b.y1 * dz, -c1 * (dj1 * dz * dz + b.j1 * ddz), -(dy1 * dz * dz + b.y1 * ddz), *k))
            }
            Repr::Harmonic { c1, w, k } => {
                let (s, c) = (w * t).sin_cos();
                Ok((c1 * c, -c1 * w * s, s / w, c, -c1 * w * w * c, -w * s, *k))
            }
            Repr::Linear { traj, k } => {
                let (y, dy) = traj.eval(t).ok_or_else(|| outside(t, self.validity))?;
                Ok((y[0], y[1], y[2], y[3], dy[1], dy[3], *k))
            }
            _ => Err(Error::domain(t, "not a Pinney solution")),
        }
    }
}

fn outside(t: f64, v: Interval) -> Error {
    Error::OutsideValidity { t, start: v.start, end: v.end }
}

/// Exponential family a = αe^(−γt), b = βe^(γt), σ = μe^(−γt/2) with
/// μ⁴ = τα²/(αβ − γ²/4). The returned background is valid up to the
/// reality cutoff ln(mα)/γ.
pub fn chiellini_exponential(alpha: f64, beta: f64, gamma: f64, constants: PhysicalConstants) -> Result<(BackgroundSpec, EpSolution)> {
    let kappa = 0.25;
    let denom = alpha * beta - kappa * gamma * gamma;
    if !(denom > 0.0) {
        return Err(Error::Constraint(format!("alpha*beta = {} must exceed gamma^2/4 = {}", alpha * beta, kappa * gamma * gamma)));
    }
    let mu = (constants.tau * alpha * alpha / denom).sqrt().sqrt();
    let bg = BackgroundSpec::direct_ab(
        Profile::Exponential { amplitude: alpha, rate: -gamma },
        Profile::Exponential { amplitude: beta, rate: gamma },
        constants,
    );
    let sol = EpSolution {
        kind: EpKind::ChielliniExponential,
        params: EpParams {
            alpha: Some(alpha),
            beta: Some(beta),
            gamma: Some(gamma),
            mu: Some(mu),
            kappa: Some(kappa),
            ..Default::default()
        },
        repr: Repr::Exponential { mu, gamma },
        validity: bg.validity,
        tau: constants.tau,
        grid: Vec::new(),
    };
    Ok((bg, sol))
}

/// The γ that satisfies the rational family's constraint
/// γ² = (n+1)(αβ − τα²)/κ with κ = (n+1)/(n+2)².
pub fn rational_gamma(n: u32, alpha: f64, beta: f64, tau: f64) -> Result<f64> {
    let excess = alpha * beta - tau * alpha * alpha;
    if !(excess > 0.0) {
        return Err(Error::Constraint(format!("alpha*beta = {} must exceed tau*alpha^2 = {}", alpha * beta, tau * alpha * alpha)));
    }
    let kappa = rational_kappa(n);
    Ok(((n as f64 + 1.0) * excess / kappa).sqrt())
}

pub fn rational_kappa(n: u32) -> f64 {
    let n = n as f64;
    (n + 1.0) / ((n + 2.0) * (n + 2.0))
}

/// Rational family in the base s = μ − γt, valid for t < μ/γ:
/// σ = ((n+2)/n)^(1/n) s^(−1/n), a ∝ s^(−(n+2)/n), b ∝ s^(2/n − 1).
pub fn chiellini_rational(
    n: u32,
    alpha: f64,
    beta: f64,
    gamma: f64,
    mu: f64,
    constants: PhysicalConstants,
) -> Result<(BackgroundSpec, EpSolution)> {
    if n == 0 {
        return Err(Error::Constraint("n must be a positive integer".into()));
    }
    if !(gamma > 0.0 && mu > 0.0) {
        return Err(Error::Constraint(format!("gamma = {gamma} and mu = {mu} must be positive")));
    }
    let required = rational_gamma(n, alpha, beta, constants.tau)?;
    if (gamma * gamma - required * required).abs() > 1e-10 * required.powi(2).max(1.0) {
        return Err(Error::Constraint(format!("gamma^2 = {} but the family requires {}", gamma * gamma, required * required)));
    }
    let nf = n as f64;
    let ratio = (nf + 2.0) / nf;
    let a = Profile::Rational { amplitude: alpha * ratio.powf(ratio), exponent: -ratio, gamma, mu };
    let b = Profile::Rational { amplitude: beta * ratio.recip().powf(2.0 / nf - 1.0), exponent: 2.0 / nf - 1.0, gamma, mu };
    let bg = BackgroundSpec::direct_ab(a, b, constants);
    // σ blows up at the cutoff itself
    let validity = Interval::new(0.0, mu / gamma * (1.0 - 1e-9));
    let bg = bg.with_validity(validity);
    let sol = EpSolution {
        kind: EpKind::ChielliniRational,
        params: EpParams {
            alpha: Some(alpha),
            beta: Some(beta),
            gamma: Some(gamma),
            mu: Some(mu),
            n: Some(n),
            kappa: Some(rational_kappa(n)),
            ..Default::default()
        },
        repr: Repr::Rational { n, gamma, mu, scale: ratio.powf(1.0 / nf) },
        validity,
        tau: constants.tau,
        grid: Vec::new(),
    };
    Ok((bg, sol))
}

/// Pinney superposition σ = √(u₁² + τa²u₂²/W²) for constant a and the
/// prescribed b(t). Constant and exponential b use closed forms (the latter
/// through J₀ and Y₀); other profiles integrate ü + ab u = 0 numerically.
pub fn pinney_superposition(
    b_family: Profile,
    a_const: f64,
    c1: f64,
    constants: PhysicalConstants,
    validity: Interval,
) -> Result<EpSolution> {
    let bg = BackgroundSpec::direct_ab(Profile::Constant { value: a_const }, b_family, constants).with_validity(validity);
    pinney_for_background(&bg, c1)
}

/// Pinney superposition for any background with constant a. u₁ starts at
/// (c₁, 0) and u₂ at (0, 1) unless a closed form applies.
pub fn pinney_for_background(bg: &BackgroundSpec, c1: f64) -> Result<EpSolution> {
    if !bg.a_is_constant() {
        return Err(Error::Constraint("Pinney superposition needs a constant a (constant theta)".into()));
    }
    let validity = bg.validity;
    let tau = bg.constants.tau;
    let (a, _) = bg.raw_ab(validity.start);
    if !(a > 0.0) {
        return Err(Error::domain(validity.start, format!("a = {a} must be positive")));
    }
    let mut params = EpParams { c1: Some(c1), alpha: Some(a), ..Default::default() };
    let closed_b = match bg.mode {
        BackgroundMode::DirectAb { b, .. } => Some(b),
        BackgroundMode::ThetaOmega { omega_field, .. } if omega_field.is_constant() => {
            Some(Profile::Constant { value: bg.raw_ab(validity.start).1 })
        }
        _ => None,
    };
    let repr = match closed_b {
        Some(Profile::Constant { value: b }) | Some(Profile::Exponential { amplitude: b, rate: 0.0 }) => {
            if !(b > 0.0) {
                return Err(Error::domain(None, format!("b = {b} must be positive")));
            }
            params.beta = Some(b);
            let w = (a * b).sqrt();
            check_wronskian(c1)?;
            Repr::Harmonic { c1, w, k: tau * a * a / (c1 * c1) }
        }
        Some(Profile::Exponential { amplitude: beta, rate: gamma }) => {
            if !(beta > 0.0) {
                return Err(Error::domain(None, format!("b amplitude = {beta} must be positive")));
            }
            params.beta = Some(beta);
            params.gamma = Some(gamma);
            let w = c1 * gamma / PI;
            check_wronskian(w)?;
            // ü + αβe^(γt)u = 0 is Bessel's equation of order zero in z
            let z0 = 2.0 * (a * beta).sqrt() / gamma.abs();
            Repr::Bessel { c1, gamma, z0, k: tau * a * a / (w * w) }
        }
        _ => {
            check_wronskian(c1)?;
            if !validity.end.is_finite() {
                return Err(Error::domain(None, "numeric Pinney pair needs a finite validity interval"));
            }
            let owned = *bg;
            let traj = ode::integrate(
                move |t, y: &[f64; 4]| {
                    let (a, b) = owned.raw_ab(t);
                    [y[1], -a * b * y[0], y[3], -a * b * y[2]]
                },
                |_, _| None,
                validity.start,
                [c1, 0.0, 0.0, 1.0],
                validity.end,
                OdeOptions { rtol: 1e-13, atol: 1e-15, ..Default::default() },
            )?;
            Repr::Linear { traj, k: tau * a * a / (c1 * c1) }
        }
    };
    Ok(EpSolution { kind: EpKind::PinneySuperposition, params, repr, validity, tau, grid: Vec::new() })
}

fn check_wronskian(w: f64) -> Result<()> {
    if !(w.abs() > 1e-12) || !w.is_finite() {
        return Err(Error::DegenerateWronskian(w));
    }
    Ok(())
}

/// Adaptive integration of the EP equation as a first-order system from
/// (σ₀, σ̇₀) at `t_grid[0]` to the last grid time.
pub fn integrate_ep(bg: &BackgroundSpec, sigma0: f64, dsigma0: f64, t_grid: &[f64], opts: OdeOptions) -> Result<EpSolution> {
    if !(sigma0 > 0.0) {
        return Err(Error::domain(None, format!("sigma0 = {sigma0} must be positive")));
    }
    if t_grid.len() < 2 || t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::config("t_grid", "needs at least two strictly increasing times"));
    }
    let (t0, t1) = (t_grid[0], t_grid[t_grid.len() - 1]);
    bg.validity.check(t0)?;
    bg.validity.check(t1)?;
    let tau = bg.constants.tau;
    let owned = *bg;
    let traj = ode::integrate(
        move |t, y: &[f64; 2]| {
            let (a, b) = owned.raw_ab(t);
            let (s, ds) = (y[0], y[1]);
            [ds, owned.a_dot(t) / a * ds - a * b * s + tau * a * a / (s * s * s)]
        },
        move |t, y| {
            if y[0] < SIGMA_FLOOR {
                Some(format!("sigma = {:e} collapsed toward zero", y[0]))
            } else if owned.raw_ab(t).0 <= 0.0 {
                Some("a(t) crossed zero".into())
            } else {
                None
            }
        },
        t0,
        [sigma0, dsigma0],
        t1,
        opts,
    )?;
    let grid = t_grid
        .iter()
        .map(|&t| {
            let (y, _) = traj.eval(t).expect("grid inside span");
            (t, y[0], y[1])
        })
        .collect();
    Ok(EpSolution {
        kind: EpKind::Numeric,
        params: EpParams { sigma0: Some(sigma0), dsigma0: Some(dsigma0), ..Default::default() },
        repr: Repr::Direct { traj },
        validity: Interval::new(t0, t1),
        tau,
        grid,
    })
}

/// |σ̈ − (ȧ/a)σ̇ + abσ − τa²/σ³| at t.
pub fn ep_residual(sol: &EpSolution, bg: &BackgroundSpec, t: f64) -> Result<f64> {
    let (s, ds) = sol.state(t)?;
    let dds = sol.sigma_ddot(t)?;
    let (a, b) = bg.raw_ab(t);
    let tau = bg.constants.tau;
    Ok((dds - bg.a_dot(t) / a * ds + a * b * s - tau * a * a / (s * s * s)).abs())
}

/// Largest residual over `points` uniformly spaced probes of [start, end].
pub fn max_residual(sol: &EpSolution, bg: &BackgroundSpec, start: f64, end: f64, points: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for k in 0..points {
        let t = start + (end - start) * k as f64 / (points.max(2) - 1) as f64;
        worst = worst.max(ep_residual(sol, bg, t.min(end))?);
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChielliniCheck {
    pub kappa: f64,
    pub residual: f64,
    pub integrable: bool,
}

/// Pointwise κ = (d/dσ)(h/g)/g over the probe grid; integrable when the
/// spread of κ stays within 1e-8 (relative to max(1, |κ|)).
pub fn check_chiellini<G, H>(g: G, h: H, probes: &[f64]) -> ChielliniCheck
where
    G: Fn(f64) -> f64,
    H: Fn(f64) -> f64,
{
    let ratio = |s: f64| h(s) / g(s);
    let kappas: Vec<f64> = probes.iter().map(|&s| ridders_derivative(&ratio, s, 0.1 * s.abs().max(0.1)) / g(s)).collect();
    let lo = kappas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = kappas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let kappa = kappas.iter().sum::<f64>() / kappas.len().max(1) as f64;
    let residual = hi - lo;
    ChielliniCheck { kappa, residual, integrable: residual.is_finite() && residual <= 1e-8 * kappa.abs().max(1.0) }
}

/// Ridders' extrapolated central difference.
pub(crate) fn ridders_derivative<F: Fn(f64) -> f64>(f: &F, x: f64, h0: f64) -> f64 {
    const SIZE: usize = 10;
    const CON: f64 = 1.4;
    let mut table = [[0.0; SIZE]; SIZE];
    let mut h = h0;
    table[0][0] = (f(x + h) - f(x - h)) / (2.0 * h);
    let mut best = table[0][0];
    let mut err = f64::INFINITY;
    for i in 1..SIZE {
        h /= CON;
        table[0][i] = (f(x + h) - f(x - h)) / (2.0 * h);
        let mut fac = CON * CON;
        for j in 1..=i {
            table[j][i] = (table[j - 1][i] * fac - table[j - 1][i - 1]) / (fac - 1.0);
            fac *= CON * CON;
            let e = (table[j][i] - table[j - 1][i]).abs().max((table[j][i] - table[j - 1][i - 1]).abs());
            if e <= err {
                err = e;
                best = table[j][i];
            }
        }
        if (table[i][i] - table[i - 1][i - 1]).abs() >= 2.0 * err {
            break;
        }
    }
    best
}

/// Writes t, sigma, dsigma, residual rows for the given times.
pub fn write_csv<W: Write>(sol: &EpSolution, bg: &BackgroundSpec, times: &[f64], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["t", "sigma", "dsigma", "residual"])?;
    for &t in times {
        let (s, ds) = sol.state(t)?;
        let r = ep_residual(sol, bg, t)?;
        w.write_record([t, s, ds, r].map(crate::harness::fmt_float))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> PhysicalConstants {
        PhysicalConstants::default()
    }

    #[test]
    fn exponential_family_constants() {
        let (bg, sol) = chiellini_exponential(5.0, 2.0, 2.0, unit()).unwrap();
        assert!((sol.params().mu.unwrap() - (5.0f64 / 3.0).sqrt()).abs() < 1e-14);
        for t in [0.0, 0.3, 0.6] {
            assert!(ep_residual(&sol, &bg, t).unwrap() < 1e-12);
        }
        assert!(chiellini_exponential(1.0, 0.2, 2.0, unit()).is_err());
    }

    #[test]
    fn static_limit_is_constant() {
        let (bg, sol) = chiellini_exponential(1.0, 1.0, 0.0, unit()).unwrap();
        assert_eq!(sol.state(4.0).unwrap(), (1.0, -0.0));
        assert_eq!(ep_residual(&sol, &bg, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn perturbed_sigma_is_detected() {
        let (bg, sol) = chiellini_exponential(5.0, 2.0, 2.0, unit()).unwrap();
        let t = 0.2;
        let (s, ds) = sol.state(t).unwrap();
        let dds = sol.sigma_ddot(t).unwrap();
        let (a, b) = bg.raw_ab(t);
        let sp = s + 0.1;
        let r = (dds - bg.a_dot(t) / a * ds + a * b * sp - a * a / sp.powi(3)).abs();
        assert!(r > 0.01);
    }

    #[test]
    fn rational_family() {
        assert_eq!(rational_kappa(2), 3.0 / 16.0);
        let g = rational_gamma(1, 1.0, 2.0, 1.0).unwrap();
        assert!((g - 3.0).abs() < 1e-15);
        let (bg, sol) = chiellini_rational(1, 1.0, 2.0, 3.0, 3.0, unit()).unwrap();
        assert!(max_residual(&sol, &bg, 0.0, 0.9, 50).unwrap() < 1e-10);
        assert!(chiellini_rational(1, 1.0, 2.0, 2.9, 3.0, unit()).is_err());
        assert!(chiellini_rational(1, 1.0, 0.5, 3.0, 3.0, unit()).is_err());
        assert!(sol.state(1.2).is_err());
    }

    #[test]
    fn harmonic_pinney_is_unit() {
        let sol = pinney_superposition(Profile::Constant { value: 1.0 }, 1.0, 1.0, unit(), Interval::new(0.0, 10.0)).unwrap();
        for t in [0.0, 1.0, 7.5] {
            assert!((sol.sigma(t).unwrap() - 1.0).abs() < 1e-15);
        }
        assert!(matches!(
            pinney_superposition(Profile::Constant { value: 1.0 }, 1.0, 0.0, unit(), Interval::new(0.0, 1.0)),
            Err(Error::DegenerateWronskian(_))
        ));
    }

    #[test]
    fn bessel_pinney_residual_and_wronskian() {
        let sol =
            pinney_superposition(Profile::Exponential { amplitude: 2.0, rate: 2.0 }, 1.0, 0.8, unit(), Interval::new(0.0, 1.5)).unwrap();
        let bg = BackgroundSpec::direct_ab(Profile::Constant { value: 1.0 }, Profile::Exponential { amplitude: 2.0, rate: 2.0 }, unit());
        let w0 = sol.wronskian(0.0).unwrap();
        assert!((w0 - 0.8 * 2.0 / PI).abs() < 1e-12);
        for k in 0..30 {
            let t = k as f64 * 0.05;
            assert!(ep_residual(&sol, &bg, t).unwrap() < 1e-10, "t={t}");
            assert!((sol.wronskian(t).unwrap() - w0).abs() < 1e-10);
        }
    }

    #[test]
    fn numeric_constant_fixed_point() {
        let bg = BackgroundSpec::direct_ab(Profile::Constant { value: 1.0 }, Profile::Constant { value: 1.0 }, unit());
        let grid: Vec<f64> = (0..=20).map(|k| k as f64 * 0.5).collect();
        let sol = integrate_ep(&bg, 1.0, 0.0, &grid, OdeOptions::default()).unwrap();
        for &(_, s, ds) in sol.grid() {
            assert!((s - 1.0).abs() < 1e-12 && ds.abs() < 1e-12);
        }
    }

    #[test]
    fn numeric_reports_collapse() {
        // a = 1, b = 1 but no repulsion can stop a huge inward kick before
        // σ reaches the floor when τ is tiny
        let c = PhysicalConstants { tau: 1e-30, ..unit() };
        let bg = BackgroundSpec::direct_ab(Profile::Constant { value: 1.0 }, Profile::Constant { value: 1.0 }, c);
        let err = integrate_ep(&bg, 1.0, -1.0, &[0.0, 3.0], OdeOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Singularity { .. }), "{err}");
    }

    #[test]
    fn chiellini_check_examples() {
        let probes: Vec<f64> = (1..20).map(|k| 0.2 * k as f64).collect();
        let gamma = 2.0;
        let exp = check_chiellini(|_| gamma, |s| gamma * gamma / 4.0 * s, &probes);
        assert!(exp.integrable && (exp.kappa - 0.25).abs() < 1e-10);
        let rat = check_chiellini(|s| 3.0 * s, |s| 9.0 * s.powi(3) / 9.0, &probes);
        assert!(rat.integrable && (rat.kappa - 2.0 / 9.0).abs() < 1e-10);
        let bad = check_chiellini(|_| 1.0, |s| s.powi(3), &probes);
        assert!(!bad.integrable);
    }
}
