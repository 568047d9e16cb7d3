//! Eigenfunctions ψ_{n,m−n}(r, θ, t) of the Lewis-Riesenfeld invariant, their
//! phases, and residual checks built from the differential operators.
//!
//! The ladder operators and eigenfunctions are written for τ = 1. Any other
//! τ is absorbed by rescaling σ → σ τ^(−1/4), which maps solutions of the
//! EP equation with constant τ onto solutions with τ = 1.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::background::{coefficients, BackgroundSpec};
use crate::ep::EpSolution;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, PolarGrid};
use crate::special_fn::hyper_u_neg_int_coeffs;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Everything the closed-form formulas need at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    /// σ in the τ = 1 normalisation
    pub sigma: f64,
    pub dsigma: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub theta: f64,
    pub omega_field: f64,
    pub hbar: f64,
}

impl Snapshot {
    pub fn at(bg: &BackgroundSpec, ep: &EpSolution, t: f64) -> Result<Self> {
        let (s, ds) = ep.state(t)?;
        let co = coefficients(bg, t)?;
        let (theta, omega_field) = bg.fields(t)?;
        let scale = ep.tau().powf(-0.25);
        Ok(Snapshot { t, sigma: s * scale, dsigma: ds * scale, a: co.a, b: co.b, c: co.c, theta, omega_field, hbar: bg.constants.hbar })
    }

    /// A snapshot built from raw values, for the static oscillator and tests.
    pub fn from_values(sigma: f64, dsigma: f64, a: f64, theta: f64, omega_field: f64, hbar: f64) -> Self {
        Snapshot { t: 0.0, sigma, dsigma, a, b: f64::NAN, c: f64::NAN, theta, omega_field, hbar }
    }

    /// Gaussian width √ħ σ.
    pub fn length(&self) -> f64 {
        self.hbar.sqrt() * self.sigma
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuantumLabel {
    pub n: u32,
    pub m: u32,
}

impl QuantumLabel {
    pub const fn new(n: u32, m: u32) -> Self {
        QuantumLabel { n, m }
    }

    /// Angular number ℓ = m − n.
    pub fn ell(&self) -> i64 {
        self.m as i64 - self.n as i64
    }
}

/// Λ(t) = ∫₀ᵗ (c − a/σ²) ds and the vacuum phase that makes the dressed
/// states solve the Schrödinger equation.
///
/// The Lewis-Riesenfeld phase of |n, ℓ⟩ is (n + ℓ)Λ measured from a per-n
/// vacuum phase χₙ = −∫₀ᵗ ((n+1)a/σ² + n c) ds. χₙ is shared by all states
/// with the same n and therefore drops out of every moment computed here.
#[derive(Debug, Clone, Copy)]
pub struct PhaseIntegral<'a> {
    bg: &'a BackgroundSpec,
    ep: &'a EpSolution,
    tol: f64,
}

impl<'a> PhaseIntegral<'a> {
    pub fn new(bg: &'a BackgroundSpec, ep: &'a EpSolution) -> Self {
        PhaseIntegral { bg, ep, tol: 1e-12 }
    }

    /// (∫₀ᵗ a/σ², ∫₀ᵗ c)
    pub fn integrals(&self, t: f64) -> Result<(f64, f64)> {
        self.ep.validity().check(0.0)?;
        self.ep.validity().check(t)?;
        let scale2 = self.ep.tau().sqrt();
        let mut failure = None;
        let mut eval = |s: f64, part: usize| match (self.ep.sigma(s), coefficients(self.bg, s)) {
            (Ok(sigma), Ok(co)) => {
                if part == 0 {
                    co.a * scale2 / (sigma * sigma)
                } else {
                    co.c
                }
            }
            (Err(e), _) | (_, Err(e)) => {
                failure.get_or_insert(e);
                0.0
            }
        };
        let a_int = integrate(|s| eval(s, 0), 0.0, t, self.tol)?;
        let c_int = integrate(|s| eval(s, 1), 0.0, t, self.tol)?;
        match failure {
            Some(e) => Err(e),
            None => Ok((a_int, c_int)),
        }
    }

    pub fn lambda(&self, t: f64) -> Result<f64> {
        let (a_int, c_int) = self.integrals(t)?;
        Ok(c_int - a_int)
    }

    /// α_{n,ℓ}(t) = (n + ℓ)Λ(t).
    pub fn alpha(&self, label: QuantumLabel, t: f64) -> Result<f64> {
        Ok(label.m as f64 * self.lambda(t)?)
    }

    /// Total phase of the dressed state: (n+ℓ)Λ + χₙ.
    pub fn dressed(&self, label: QuantumLabel, t: f64) -> Result<f64> {
        let (a_int, c_int) = self.integrals(t)?;
        let n = label.n as f64;
        let m = label.m as f64;
        Ok(m * (c_int - a_int) - (n + 1.0) * a_int - n * c_int)
    }
}

/// An invariant eigenstate bound to a background and EP solution.
#[derive(Debug, Clone, Copy)]
pub struct WaveState<'a> {
    pub label: QuantumLabel,
    pub bg: &'a BackgroundSpec,
    pub ep: &'a EpSolution,
    pub phase: PhaseIntegral<'a>,
}

impl<'a> WaveState<'a> {
    pub fn new(label: QuantumLabel, bg: &'a BackgroundSpec, ep: &'a EpSolution) -> Self {
        WaveState { label, bg, ep, phase: PhaseIntegral::new(bg, ep) }
    }

    pub fn snapshot(&self, t: f64) -> Result<Snapshot> {
        Snapshot::at(self.bg, self.ep, t)
    }

    /// The state with its time dependence evaluated at t.
    pub fn freeze(&self, t: f64, with_phase: bool) -> Result<FrozenState> {
        let snap = self.snapshot(t)?;
        let phase = if with_phase { self.phase.dressed(self.label, t)? } else { 0.0 };
        Ok(FrozenState::new(self.label, &snap, phase))
    }

    /// Quadrature grid adequate for this state at t.
    pub fn grid(&self, t: f64) -> Result<PolarGrid> {
        let snap = self.snapshot(t)?;
        Ok(PolarGrid::for_states(snap.length(), self.label.n + self.label.m))
    }
}

/// ψ_{n,m−n} at a fixed time: prefactor · P(r) · e^(−w r²) · e^(iℓθ), with
/// P(r) = r^(n−m) U(−m, 1−m+n, r²/(ħσ²)) stored as a sparse polynomial.
#[derive(Debug, Clone)]
pub struct FrozenState {
    pub label: QuantumLabel,
    pub snap: Snapshot,
    prefactor: Complex64,
    w: Complex64,
    poly: Vec<(i32, f64)>,
}

/// ψ and its radial derivatives at one point.
#[derive(Debug, Clone, Copy)]
pub struct Jet {
    pub psi: Complex64,
    pub dr: Complex64,
    pub drr: Complex64,
}

impl FrozenState {
    pub fn new(label: QuantumLabel, snap: &Snapshot, phase: f64) -> Self {
        let QuantumLabel { n, m } = label;
        let Snapshot { sigma, dsigma, a, hbar, .. } = *snap;
        let width = hbar * sigma * sigma;
        let lambda = 1.0 / (PI * factorial(n) * width.powi(n as i32 + 1)).sqrt();
        let prefactor = lambda * (I * hbar.sqrt() * sigma).powu(m) / factorial(m).sqrt() * Complex64::from_polar(1.0, phase);
        let w = Complex64::new(a, -sigma * dsigma) / (2.0 * a * width);
        let coeffs = hyper_u_neg_int_coeffs(m, 1.0 - m as f64 + n as f64);
        let poly = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(j, c)| (n as i32 - m as i32 + 2 * j as i32, c / width.powi(j as i32)))
            .collect();
        FrozenState { label, snap: *snap, prefactor, w, poly }
    }

    fn angular(&self, theta: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.label.ell() as f64 * theta)
    }

    /// ψ(r, θ).
    pub fn value(&self, r: f64, theta: f64) -> Complex64 {
        self.jet(r, theta).psi
    }

    pub fn jet(&self, r: f64, theta: f64) -> Jet {
        let (mut p, mut dp, mut ddp) = (0.0, 0.0, 0.0);
        for &(k, c) in &self.poly {
            let kf = k as f64;
            p += c * r.powi(k);
            if k != 0 {
                dp += c * kf * r.powi(k - 1);
            }
            if k > 1 {
                ddp += c * kf * (kf - 1.0) * r.powi(k - 2);
            }
        }
        let w = self.w;
        let g = (-w * r * r).exp() * self.prefactor * self.angular(theta);
        Jet { psi: g * p, dr: g * (dp - 2.0 * w * r * p), drr: g * (ddp - 2.0 * w * p - 4.0 * w * r * dp + 4.0 * w * w * r * r * p) }
    }

    /// ψ on every grid point, in grid order.
    pub fn sample(&self, grid: &PolarGrid) -> Vec<Complex64> {
        self.map_grid(grid, |_, _, j| j.psi)
    }

    pub fn map_grid<F>(&self, grid: &PolarGrid, f: F) -> Vec<Complex64>
    where
        F: Fn(f64, f64, &Jet) -> Complex64 + Sync,
    {
        let nt = grid.theta.len();
        (0..grid.len())
            .into_par_iter()
            .map(|k| {
                let (r, th) = (grid.r[k / nt], grid.theta[k % nt]);
                f(r, th, &self.jet(r, th))
            })
            .collect()
    }

    /// â applied pointwise, as the differential operator with
    /// p_r = −iħ(∂_r + 1/(2r)) and e^(−iθ) acting first.
    pub fn annihilate(&self, r: f64, theta: f64, j: &Jet) -> Complex64 {
        let Snapshot { sigma, dsigma, a, hbar, .. } = self.snap;
        let ell = self.label.ell() as f64 - 1.0;
        let e = Complex64::from_polar(1.0, -theta);
        let radial = -I * hbar * sigma * (j.dr + j.psi / (2.0 * r)) - dsigma * r / a * j.psi;
        let angular = -I * (r / sigma + sigma / r * (hbar * ell + 0.5 * hbar)) * j.psi;
        e * (radial + angular) / (2.0 * hbar.sqrt())
    }

    /// â† applied pointwise; e^(iθ) acts last.
    pub fn create(&self, r: f64, theta: f64, j: &Jet) -> Complex64 {
        let Snapshot { sigma, dsigma, a, hbar, .. } = self.snap;
        let ell = self.label.ell() as f64;
        let e = Complex64::from_polar(1.0, theta);
        let radial = -I * hbar * sigma * (j.dr + j.psi / (2.0 * r)) - dsigma * r / a * j.psi;
        let angular = I * (r / sigma + sigma / r * (hbar * ell + 0.5 * hbar)) * j.psi;
        e * (radial + angular) / (2.0 * hbar.sqrt())
    }

    /// Î = I/4 − p_θ/2 applied pointwise.
    pub fn invariant(&self, r: f64, j: &Jet) -> Complex64 {
        let Snapshot { sigma, dsigma, a, hbar, .. } = self.snap;
        let ell = self.label.ell() as f64;
        let s2 = sigma * sigma;
        let big = r * r / s2 * j.psi - s2 * hbar * hbar * (j.drr + j.dr / r)
            + 2.0 * I * hbar * sigma * dsigma / a * (r * j.dr + j.psi)
            + (dsigma * dsigma / (a * a)) * r * r * j.psi
            + s2 * hbar * hbar * ell * ell / (r * r) * j.psi;
        0.25 * big - 0.5 * hbar * ell * j.psi
    }

    /// H in polar form applied pointwise.
    pub fn hamiltonian(&self, r: f64, j: &Jet) -> Complex64 {
        let Snapshot { a, b, c, hbar, .. } = self.snap;
        let ell = self.label.ell() as f64;
        -0.5 * a * hbar * hbar * (j.drr + j.dr / r - ell * ell / (r * r) * j.psi) + 0.5 * b * r * r * j.psi - c * hbar * ell * j.psi
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// ψ at a point; dressed with its Lewis-Riesenfeld phase when `with_phase`.
pub fn eval_state(ws: &WaveState, r: f64, theta: f64, t: f64, with_phase: bool) -> Result<Complex64> {
    if r < 0.0 {
        return Err(Error::domain(t, format!("radius {r} is negative")));
    }
    Ok(ws.freeze(t, with_phase)?.value(r, theta))
}

/// ⟨A|B⟩ by 2D quadrature. The integral is repeated on a refined grid and
/// the difference is the reported error estimate.
pub fn orthonormality(a: &WaveState, b: &WaveState, t: f64) -> Result<Complex64> {
    let fa = a.freeze(t, true)?;
    let fb = b.freeze(t, true)?;
    let nm = (a.label.n + a.label.m).max(b.label.n + b.label.m);
    let grid = PolarGrid::for_states(fa.snap.length(), nm);
    let fine = PolarGrid::new(grid.r.last().copied().unwrap_or(1.0) * 1.1, 8, 32, grid.theta.len() * 2);
    let coarse = grid.inner(&fa.sample(&grid), &fb.sample(&grid));
    let refined = fine.inner(&fa.sample(&fine), &fb.sample(&fine));
    let estimate = (coarse - refined).norm();
    if estimate > 1e-9 {
        return Err(Error::Quadrature { estimate });
    }
    Ok(refined)
}

fn relative_l2(grid: &PolarGrid, residual: &[Complex64], reference: &[Complex64]) -> f64 {
    (grid.norm_sqr(residual) / grid.norm_sqr(reference)).sqrt()
}

/// ‖â ψ_{n,−n}‖ / ‖ψ‖ on the grid.
pub fn annihilation_residual(ws: &WaveState, grid: &PolarGrid, t: f64) -> Result<f64> {
    if ws.label.m != 0 {
        return Err(Error::domain(t, "annihilation residual needs m = 0"));
    }
    let fs = ws.freeze(t, false)?;
    let psi = fs.sample(grid);
    let res = fs.map_grid(grid, |r, th, j| fs.annihilate(r, th, j));
    Ok(relative_l2(grid, &res, &psi))
}

/// ‖(Î − ħ(n+½))ψ‖ / ‖ψ‖ on the grid.
pub fn invariant_residual(ws: &WaveState, grid: &PolarGrid, t: f64) -> Result<f64> {
    let fs = ws.freeze(t, false)?;
    let ev = fs.snap.hbar * (ws.label.n as f64 + 0.5);
    let psi = fs.sample(grid);
    let res = fs.map_grid(grid, |r, _, j| fs.invariant(r, j) - ev * j.psi);
    Ok(relative_l2(grid, &res, &psi))
}

/// ⟨ψ|Î|ψ⟩ / ⟨ψ|ψ⟩.
pub fn invariant_rayleigh(ws: &WaveState, grid: &PolarGrid, t: f64) -> Result<f64> {
    let fs = ws.freeze(t, false)?;
    let psi = fs.sample(grid);
    let ipsi = fs.map_grid(grid, |r, _, j| fs.invariant(r, j));
    Ok((grid.inner(&psi, &ipsi) / grid.norm_sqr(&psi)).re)
}

/// ‖iħ∂_tψ − Hψ‖ / ‖Hψ‖ with a centred difference of step dt in time.
pub fn schrodinger_residual(ws: &WaveState, grid: &PolarGrid, t: f64, dt: f64, with_phase: bool) -> Result<f64> {
    let now = ws.freeze(t, with_phase)?;
    let later = ws.freeze(t + dt, with_phase)?.sample(grid);
    let earlier = ws.freeze(t - dt, with_phase)?.sample(grid);
    let hpsi = now.map_grid(grid, |r, _, j| now.hamiltonian(r, j));
    let hbar = now.snap.hbar;
    let res: Vec<Complex64> = later.iter().zip(&earlier).zip(&hpsi).map(|((p, m), h)| I * hbar * (p - m) / (2.0 * dt) - h).collect();
    Ok(relative_l2(grid, &res, &hpsi))
}

/// Writes r, theta, density rows of |ψ|² on the grid.
pub fn write_density_csv<W: Write>(ws: &WaveState, grid: &PolarGrid, t: f64, out: W) -> Result<()> {
    let fs = ws.freeze(t, false)?;
    let psi = fs.sample(grid);
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["r", "theta", "density"])?;
    for ((r, th, _), v) in grid.points().zip(&psi) {
        w.write_record([r, th, v.norm_sqr()].map(crate::harness::fmt_float))?;
    }
    w.flush()?;
    Ok(())
}
