//! Background fields θ(t), Ω(t) and the Hamiltonian coefficients they induce.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicalConstants {
    pub m: f64,
    pub hbar: f64,
    pub omega: f64,
    pub tau: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants { m: 1.0, hbar: 1.0, omega: 1.0, tau: 1.0 }
    }
}

impl PhysicalConstants {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("m", self.m), ("hbar", self.hbar), ("omega", self.omega), ("tau", self.tau)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("constants.{name}"), format!("must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Scalar time profiles. `Exponential` is amplitude·e^(rate·t), so a decaying
/// θ = αe^(−γt) has rate = −γ. `Rational` is amplitude·(μ − γt)^exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    Constant { value: f64 },
    Exponential { amplitude: f64, rate: f64 },
    Sinusoidal { amplitude: f64, frequency: f64 },
    Rational { amplitude: f64, exponent: f64, gamma: f64, mu: f64 },
}

impl Profile {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Profile::Constant { value } => value,
            Profile::Exponential { amplitude, rate } => amplitude * (rate * t).exp(),
            Profile::Sinusoidal { amplitude, frequency } => amplitude * (frequency * t).sin(),
            Profile::Rational { amplitude, exponent, gamma, mu } => amplitude * (mu - gamma * t).powf(exponent),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            Profile::Constant { .. } => 0.0,
            Profile::Exponential { amplitude, rate } => amplitude * rate * (rate * t).exp(),
            Profile::Sinusoidal { amplitude, frequency } => amplitude * frequency * (frequency * t).cos(),
            Profile::Rational { amplitude, exponent, gamma, mu } => -gamma * exponent * amplitude * (mu - gamma * t).powf(exponent - 1.0),
        }
    }

    pub fn is_constant(&self) -> bool {
        match *self {
            Profile::Constant { .. } => true,
            Profile::Exponential { amplitude, rate } => amplitude == 0.0 || rate == 0.0,
            Profile::Sinusoidal { amplitude, frequency } => amplitude == 0.0 || frequency == 0.0,
            Profile::Rational { amplitude, exponent, gamma, .. } => amplitude == 0.0 || exponent == 0.0 || gamma == 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum BackgroundMode {
    ThetaOmega { theta: Profile, omega_field: Profile },
    DirectAb { a: Profile, b: Profile },
}

/// Closed time interval; `end` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

impl Interval {
    pub const fn new(start: f64, end: f64) -> Self {
        Interval { start, end }
    }

    pub const fn from_zero() -> Self {
        Interval { start: 0.0, end: f64::INFINITY }
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start && t <= self.end
    }

    pub fn check(&self, t: f64) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(Error::OutsideValidity { t, start: self.start, end: self.end })
        }
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval { start: self.start.max(other.start), end: self.end.min(other.end) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackgroundSpec {
    pub mode: BackgroundMode,
    pub constants: PhysicalConstants,
    pub validity: Interval,
}

impl BackgroundSpec {
    pub fn theta_omega(theta: Profile, omega_field: Profile, constants: PhysicalConstants) -> Self {
        BackgroundSpec { mode: BackgroundMode::ThetaOmega { theta, omega_field }, constants, validity: Interval::from_zero() }
    }

    /// Prescribed a(t), b(t). The validity interval is clipped at the
    /// Chiellini cutoff when one exists.
    pub fn direct_ab(a: Profile, b: Profile, constants: PhysicalConstants) -> Self {
        let mut bg = BackgroundSpec { mode: BackgroundMode::DirectAb { a, b }, constants, validity: Interval::from_zero() };
        if let Some(tc) = cutoff_time(&bg) {
            bg.validity.end = tc;
        }
        bg
    }

    pub fn with_validity(mut self, validity: Interval) -> Self {
        self.validity = validity;
        self
    }

    /// Noncommutativity parameters (θ, Ω) at t. In DirectAb mode these are
    /// the nonnegative roots of the inverse map.
    pub fn fields(&self, t: f64) -> Result<(f64, f64)> {
        self.validity.check(t)?;
        match self.mode {
            BackgroundMode::ThetaOmega { theta, omega_field } => Ok((theta.eval(t), omega_field.eval(t))),
            BackgroundMode::DirectAb { a, b } => invert_background(a.eval(t), b.eval(t), &self.constants).map_err(|e| with_time(e, t)),
        }
    }

    /// ȧ(t).
    pub fn a_dot(&self, t: f64) -> f64 {
        let PhysicalConstants { m, hbar, omega, .. } = self.constants;
        match self.mode {
            BackgroundMode::ThetaOmega { theta, .. } => m * omega * omega * theta.eval(t) * theta.derivative(t) / (2.0 * hbar * hbar),
            BackgroundMode::DirectAb { a, .. } => a.derivative(t),
        }
    }

    /// a(t)·b(t) without the reality check, for use inside integrators.
    pub(crate) fn raw_ab(&self, t: f64) -> (f64, f64) {
        let PhysicalConstants { m, hbar, omega, .. } = self.constants;
        match self.mode {
            BackgroundMode::ThetaOmega { theta, omega_field } => {
                let th = theta.eval(t);
                let om = omega_field.eval(t);
                (1.0 / m + m * omega * omega * th * th / (4.0 * hbar * hbar), m * omega * omega + om * om / (4.0 * m * hbar * hbar))
            }
            BackgroundMode::DirectAb { a, b } => (a.eval(t), b.eval(t)),
        }
    }

    /// True when a(t) does not vary (θ constant, or a prescribed constant).
    pub fn a_is_constant(&self) -> bool {
        match self.mode {
            BackgroundMode::ThetaOmega { theta, .. } => theta.is_constant(),
            BackgroundMode::DirectAb { a, .. } => a.is_constant(),
        }
    }
}

fn with_time(e: Error, t: f64) -> Error {
    match e {
        Error::Domain { msg, .. } => Error::Domain { t: Some(t), msg },
        other => other,
    }
}

pub fn coefficients(bg: &BackgroundSpec, t: f64) -> Result<Coefficients> {
    let (theta, omega_field) = bg.fields(t)?;
    let PhysicalConstants { m, hbar, omega, .. } = bg.constants;
    let c = m * omega * omega * theta / (2.0 * hbar) + omega_field / (2.0 * hbar * m);
    let (a, b) = bg.raw_ab(t);
    Ok(Coefficients { a, b, c })
}

/// Inverse of the coefficient map on the nonnegative branch.
pub fn invert_background(a: f64, b: f64, constants: &PhysicalConstants) -> Result<(f64, f64)> {
    let PhysicalConstants { m, hbar, omega, .. } = *constants;
    let da = a - 1.0 / m;
    let db = b - m * omega * omega;
    if da < 0.0 {
        return Err(Error::domain(None, format!("a = {a} below 1/m = {}", 1.0 / m)));
    }
    if db < 0.0 {
        return Err(Error::domain(None, format!("b = {b} below m omega^2 = {}", m * omega * omega)));
    }
    Ok((2.0 * hbar / (omega * m.sqrt()) * da.sqrt(), 2.0 * hbar * (m * db).sqrt()))
}

/// Latest time at which a DirectAb Chiellini family keeps θ real:
/// ln(mα)/γ for a = αe^(−γt), μ/γ for the rational family.
pub fn cutoff_time(bg: &BackgroundSpec) -> Option<f64> {
    match bg.mode {
        BackgroundMode::DirectAb { a: Profile::Exponential { amplitude, rate }, .. } if rate < 0.0 && amplitude > 0.0 => {
            Some((bg.constants.m * amplitude).ln() / -rate)
        }
        BackgroundMode::DirectAb { a: Profile::Rational { gamma, mu, .. }, .. } if gamma > 0.0 && mu > 0.0 => Some(mu / gamma),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_bg() -> BackgroundSpec {
        BackgroundSpec::theta_omega(
            Profile::Exponential { amplitude: 5.0, rate: -2.0 },
            Profile::Exponential { amplitude: 2.0, rate: 2.0 },
            PhysicalConstants::default(),
        )
    }

    #[test]
    fn vanishing_background() {
        let bg =
            BackgroundSpec::theta_omega(Profile::Constant { value: 0.0 }, Profile::Constant { value: 0.0 }, PhysicalConstants::default());
        assert_eq!(coefficients(&bg, 3.0).unwrap(), Coefficients { a: 1.0, b: 1.0, c: 0.0 });
    }

    #[test]
    fn exponential_background_at_zero() {
        let co = coefficients(&exp_bg(), 0.0).unwrap();
        assert_eq!((co.a, co.b, co.c), (7.25, 2.0, 3.5));
        let (th, om) = invert_background(7.25, 2.0, &PhysicalConstants::default()).unwrap();
        assert!((th - 5.0).abs() < 1e-15 && (om - 2.0).abs() < 1e-15);
    }

    #[test]
    fn sinusoidal_fields_vanish_at_pi() {
        let bg = BackgroundSpec::theta_omega(
            Profile::Sinusoidal { amplitude: 5.0, frequency: 2.0 },
            Profile::Sinusoidal { amplitude: 2.0, frequency: 1.0 },
            PhysicalConstants::default(),
        );
        let co = coefficients(&bg, std::f64::consts::PI).unwrap();
        assert!((co.a - 1.0).abs() < 1e-14 && (co.b - 1.0).abs() < 1e-14 && co.c.abs() < 1e-14);
    }

    #[test]
    fn inverse_rejects_small_a() {
        assert!(matches!(invert_background(0.5, 1.0, &PhysicalConstants::default()), Err(Error::Domain { .. })));
        assert_eq!(invert_background(1.0, 1.0, &PhysicalConstants::default()).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn inverse_with_general_constants() {
        let c = PhysicalConstants { m: 0.5, hbar: 0.7, omega: 1.3, tau: 1.0 };
        let bg = BackgroundSpec::theta_omega(Profile::Constant { value: 3.2 }, Profile::Constant { value: 1.1 }, c);
        let co = coefficients(&bg, 0.0).unwrap();
        let (th, om) = invert_background(co.a, co.b, &c).unwrap();
        assert!((th - 3.2).abs() < 1e-13 && (om - 1.1).abs() < 1e-13);
    }

    #[test]
    fn cutoffs() {
        let c = PhysicalConstants::default();
        let exp = BackgroundSpec::direct_ab(
            Profile::Exponential { amplitude: 5.0, rate: -2.0 },
            Profile::Exponential { amplitude: 2.0, rate: 2.0 },
            c,
        );
        let tc = cutoff_time(&exp).unwrap();
        assert!((tc - 5f64.ln() / 2.0).abs() < 1e-15);
        assert!((exp.raw_ab(tc).0 - 1.0).abs() < 1e-12);
        let rat = BackgroundSpec::direct_ab(
            Profile::Rational { amplitude: 1.0, exponent: -3.0, gamma: 2.0, mu: 3.0 },
            Profile::Constant { value: 2.0 },
            c,
        );
        assert_eq!(cutoff_time(&rat), Some(1.5));
        assert_eq!(cutoff_time(&exp_bg()), None);
        assert!(coefficients(&exp, tc + 0.01).is_err());
    }

    #[test]
    fn a_dot_matches_difference_quotient() {
        let bg = exp_bg();
        let t = 0.37;
        let h = 1e-6;
        let fd = (bg.raw_ab(t + h).0 - bg.raw_ab(t - h).0) / (2.0 * h);
        assert!((bg.a_dot(t) - fd).abs() < 1e-7);
    }
}
