use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use super::figures::panel_config;
use crate::background::{Interval, PhysicalConstants, Profile};
use crate::coherent::{self, gk_sums, GK_TAIL_TOL};
use crate::ep::{self, max_residual};
use crate::error::Result;
use crate::expectations::{eigenstate_record, theta_min_at};
use crate::states::{annihilation_residual, invariant_rayleigh, orthonormality, QuantumLabel, Snapshot, WaveState};

/// One line of the invariant suite.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

fn line(name: &'static str, result: Result<(bool, String)>) -> CheckLine {
    match result {
        Ok((passed, detail)) => CheckLine { name, passed, detail },
        Err(e) => CheckLine { name, passed: false, detail: format!("error: {e}") },
    }
}

fn exponential_family() -> Result<(bool, String)> {
    let (bg, sol) = ep::chiellini_exponential(5.0, 2.0, 2.0, PhysicalConstants::default())?;
    let v = sol.validity();
    let res = max_residual(&sol, &bg, v.start, v.end, 200)?;
    let mu = sol.params().mu.unwrap_or(f64::NAN);
    let ok = (mu - (5.0f64 / 3.0).sqrt()).abs() < 1e-12 && res < 1e-12;
    Ok((ok, format!("mu = {mu}, max residual {res:e}")))
}

fn rational_family() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for n in 1..=3 {
        let gamma = ep::rational_gamma(n, 1.0, 2.0, 1.0)?;
        let (bg, sol) = ep::chiellini_rational(n, 1.0, 2.0, gamma, 1.0, PhysicalConstants::default())?;
        let v = sol.validity();
        worst = worst.max(max_residual(&sol, &bg, v.start, 0.9 * v.end, 200)?);
    }
    Ok((worst < 1e-10, format!("max residual over n = 1..3: {worst:e}")))
}

fn numeric_vs_closed() -> Result<(bool, String)> {
    let (bg, sol) = ep::chiellini_exponential(5.0, 2.0, 2.0, PhysicalConstants::default())?;
    let end = 0.8 * sol.validity().end;
    let grid: Vec<f64> = (0..=100).map(|k| end * k as f64 / 100.0).collect();
    let (s0, ds0) = sol.state(0.0)?;
    let num = ep::integrate_ep(&bg, s0, ds0, &grid, Default::default())?;
    let mut err = 0.0f64;
    for &t in &grid {
        err = err.max((num.sigma(t)? - sol.sigma(t)?).abs());
    }
    Ok((err < 1e-6, format!("sup |sigma_num - sigma_closed| = {err:e}")))
}

fn pinney_wronskian() -> Result<(bool, String)> {
    let b = Profile::Exponential { amplitude: 2.0, rate: 1.0 };
    let sol = ep::pinney_superposition(b, 1.5, 1.0, PhysicalConstants::default(), Interval::new(0.0, 3.0))?;
    let w: Vec<f64> = (0..=30).filter_map(|k| sol.wronskian(0.1 * k as f64)).collect();
    let spread = w.iter().fold(0.0f64, |m, x| m.max((x - w[0]).abs()));
    Ok((w.len() == 31 && spread < 1e-10, format!("Wronskian spread {spread:e}")))
}

fn orthonormal_states() -> Result<(bool, String)> {
    let (bg, sol) = ep::chiellini_exponential(5.0, 2.0, 2.0, PhysicalConstants::default())?;
    let labels: Vec<QuantumLabel> = (0..=2u32).flat_map(|s| (0..=s).map(move |n| QuantumLabel::new(n, s - n))).collect();
    let mut worst = 0.0f64;
    for (i, a) in labels.iter().enumerate() {
        for b in &labels[i..] {
            let ip = orthonormality(&WaveState::new(*a, &bg, &sol), &WaveState::new(*b, &bg, &sol), 0.3)?;
            let target = if a == b { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            worst = worst.max((ip - target).norm());
        }
    }
    Ok((worst < 1e-6, format!("max deviation {worst:e} for n+m <= 2")))
}

fn operator_residuals() -> Result<(bool, String)> {
    let (bg, sol) = ep::chiellini_exponential(5.0, 2.0, 2.0, PhysicalConstants::default())?;
    let (mut ann, mut ray) = (0.0f64, 0.0f64);
    for n in 0..=3 {
        let ws = WaveState::new(QuantumLabel::new(n, 0), &bg, &sol);
        let grid = ws.grid(0.4)?;
        ann = ann.max(annihilation_residual(&ws, &grid, 0.4)?);
        ray = ray.max((invariant_rayleigh(&ws, &grid, 0.4)? - (n as f64 + 0.5)).abs());
    }
    Ok((ann < 1e-8 && ray < 1e-8, format!("annihilation {ann:e}, Rayleigh deviation {ray:e}")))
}

fn generalized_bounds() -> Result<(bool, String)> {
    let mut violations = 0usize;
    let mut theta_fail = 0usize;
    let mut rows = 0usize;
    for exponential in [true, false] {
        let mut cfg = panel_config(exponential, Vec::new());
        cfg.t_grid.points = 200;
        let (bg, sol) = cfg.solve_ep()?;
        let snaps = cfg.t_grid.times().par_iter().map(|&t| Snapshot::at(&bg, &sol, t)).collect::<Result<Vec<_>>>()?;
        for snap in &snaps {
            for s in 0..=4u32 {
                for n in 0..=s {
                    violations += eigenstate_record(n, s - n, snap).violations().len();
                    rows += 1;
                }
            }
            if theta_min_at(snap)?.f_min < 0.0 {
                theta_fail += 1;
            }
        }
    }
    Ok((violations == 0 && theta_fail == 0, format!("{violations} bound violations in {rows} records, {theta_fail} negative f_min")))
}

fn coherent_identities() -> Result<(bool, String)> {
    let snap = Snapshot::from_values(1.1, -0.4, 1.7, 0.8, 1.3, 1.0);
    let g = coherent::glauber_record(Complex64::new(0.3, -0.2), &snap);
    let e = eigenstate_record(0, 0, &snap);
    let s = coherent::squeezed_record(Complex64::new(0.3, -0.2), 0.0, &snap);
    let ok = g.bitwise_eq(&e) && s.bitwise_eq(&g);
    Ok((ok, "glauber = (0,0) eigenstate, squeezed at beta = 0 = glauber".into()))
}

fn gk_reference_sums() -> Result<(bool, String)> {
    let g = gk_sums(0.0, 0.5, GK_TAIL_TOL);
    let got = [g.s1, g.s2(0.0), g.s2(1.0), g.s3, g.n];
    let want = [0.3774, 0.1360, 1.2717, 0.0184, 1.1357];
    let dev = got.iter().zip(want).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok((dev < 5e-4, format!("max deviation from reference s = 0.5 sums {dev:e}")))
}

type CheckFn = fn() -> Result<(bool, String)>;

/// The invariant suite run by `ncosc check`.
pub fn check_suite() -> Vec<CheckLine> {
    let checks: [(&'static str, CheckFn); 9] = [
        ("chiellini_exponential", exponential_family),
        ("chiellini_rational", rational_family),
        ("numeric_matches_closed_form", numeric_vs_closed),
        ("pinney_wronskian", pinney_wronskian),
        ("orthonormality", orthonormal_states),
        ("operator_residuals", operator_residuals),
        ("generalized_bounds", generalized_bounds),
        ("coherent_identities", coherent_identities),
        ("gk_sums", gk_reference_sums),
    ];
    checks.par_iter().map(|(name, f)| line(name, f())).collect()
}
