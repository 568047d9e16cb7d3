//! Bessel functions of order zero and the terminating confluent
//! hypergeometric function U(−m, b, z).
//!
//! Bessel evaluation is split three ways: power series up to x = 8, Miller
//! backward recurrence (with the Neumann series for Y) up to x = 25, and the
//! Hankel asymptotic expansion beyond. The asymptotic series alone only
//! reaches ~1e-8 just above x = 8, hence the middle band.

use std::f64::consts::{FRAC_2_PI, PI};

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_MAX: f64 = 8.0;
const MILLER_MAX: f64 = 25.0;

/// Bessel function of the first kind, order zero. Defined for all real x.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= SERIES_MAX {
        series(x).j0
    } else if x <= MILLER_MAX {
        miller(x).j0
    } else {
        hankel(0, x).0
    }
}

/// Bessel function of the second kind, order zero.
pub fn bessel_y0(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(None, format!("Y0 needs x > 0, got {x}")));
    }
    Ok(if x <= SERIES_MAX {
        series(x).y0
    } else if x <= MILLER_MAX {
        miller(x).y0
    } else {
        hankel(0, x).1
    })
}

/// J₀, Y₀, J₁, Y₁ at one point; x > 0 is the caller's responsibility.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BesselSet {
    pub j0: f64,
    pub y0: f64,
    pub j1: f64,
    pub y1: f64,
}

pub(crate) fn bessel_set(x: f64) -> BesselSet {
    if x <= SERIES_MAX {
        series(x)
    } else if x <= MILLER_MAX {
        miller(x)
    } else {
        let (j0, y0) = hankel(0, x);
        let (j1, y1) = hankel(1, x);
        BesselSet { j0, y0, j1, y1 }
    }
}

fn series(x: f64) -> BesselSet {
    let q = 0.25 * x * x;
    let half = 0.5 * x;
    let log_term = (half.ln() + EULER_GAMMA) * FRAC_2_PI;

    // term_k = (−q)^k / (k!)²
    let mut term = 1.0;
    let mut j0 = 1.0;
    let mut j1 = half;
    let mut harmonic = 0.0;
    let mut ysum = 0.0;
    let mut ysum_d = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= -q / (kf * kf);
        harmonic += 1.0 / kf;
        j0 += term;
        // J₁ term: (x/2)(−q)^k / (k!(k+1)!)
        j1 += half * term / (kf + 1.0);
        ysum -= harmonic * term;
        // d/dx of −H_k (−q)^k/(k!)² is −H_k k (2/x) (−q)^k/(k!)²
        ysum_d -= harmonic * kf * term * 2.0 / x;
        if term.abs() < 1e-18 * j0.abs().max(1e-300) && kf > q {
            break;
        }
    }
    let y0 = log_term * j0 + FRAC_2_PI * ysum;
    let y1 = log_term * j1 - FRAC_2_PI * j0 / x - FRAC_2_PI * ysum_d;
    BesselSet { j0, y0, j1, y1 }
}

fn miller(x: f64) -> BesselSet {
    let top = 2 * ((x as usize + 40) / 2);
    let mut j = vec![0.0; top + 2];
    j[top] = 1e-30;
    for k in (1..=top).rev() {
        j[k - 1] = 2.0 * k as f64 / x * j[k] - j[k + 1];
        if j[k - 1].abs() > 1e250 {
            for v in j.iter_mut().skip(k - 1) {
                *v *= 1e-250;
            }
        }
    }
    let norm = j[0] + 2.0 * (1..=top / 2).map(|k| j[2 * k]).sum::<f64>();
    for v in j.iter_mut() {
        *v /= norm;
    }

    let log_term = ((0.5 * x).ln() + EULER_GAMMA) * FRAC_2_PI;
    let mut neumann = 0.0;
    let mut neumann_d = 0.0;
    for k in 1..top / 2 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let kf = k as f64;
        neumann += sign * j[2 * k] / kf;
        neumann_d += sign * 0.5 * (j[2 * k - 1] - j[2 * k + 1]) / kf;
    }
    let y0 = log_term * j[0] - 2.0 * FRAC_2_PI * neumann;
    let dy0 = FRAC_2_PI * j[0] / x - log_term * j[1] - 2.0 * FRAC_2_PI * neumann_d;
    BesselSet { j0: j[0], y0, j1: j[1], y1: -dy0 }
}

/// Hankel asymptotic expansion for order 0 or 1; returns (J, Y).
fn hankel(order: u32, x: f64) -> (f64, f64) {
    let mu = 4.0 * (order * order) as f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        // k odd feeds Q with alternating sign, k even feeds P.
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * order as f64 + 0.25) * PI;
    let amp = (2.0 / (PI * x)).sqrt();
    let (s, c) = chi.sin_cos();
    (amp * (p * c - q * s), amp * (p * s + q * c))
}

/// Coefficients of U(−m, b, z) as a polynomial in z, lowest power first.
///
/// U(−m, b, z) = Σ_j (−m)_j (1 − m − b)_j (−1)^j z^(m−j) / j!
pub fn hyper_u_neg_int_coeffs(m: u32, b: f64) -> Vec<f64> {
    let m_us = m as usize;
    let mut coeffs = vec![0.0; m_us + 1];
    let mut c = 1.0;
    coeffs[m_us] = 1.0;
    for j in 1..=m_us {
        let jf = j as f64;
        let a_poch = -(m as f64) + jf - 1.0;
        let b_poch = 1.0 - m as f64 - b + jf - 1.0;
        c *= -a_poch * b_poch / jf;
        coeffs[m_us - j] = c;
    }
    coeffs
}

/// Confluent hypergeometric U(−m, b, z) for nonnegative integer m.
pub fn hyper_u_neg_int(m: u32, b: f64, z: f64) -> f64 {
    hyper_u_neg_int_coeffs(m, b).iter().rev().fold(0.0, |acc, &c| acc * z + c)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    // mpmath at 30 digits: (x, J0, Y0, J1, Y1)
    const REFERENCE: [(f64, f64, f64, f64, f64); 12] = [
        (0.1, 0.99750156206604003, -1.5342386513503668, 0.049937526036242, -6.4589510947020266),
        (1.0, 0.76519768655796655, 0.088256964215676958, 0.44005058574493352, -0.78121282130028872),
        (2.5, -0.048383776468197996, 0.49807035961523189, 0.49709410246427404, 0.1459181379667858),
        (5.0, -0.1775967713143383, -0.30851762524903378, -0.32757913759146522, 0.14786314339122684),
        (7.9, 0.19436184484127824, 0.20652094814437577, 0.2191793999217512, -0.18172107728057313),
        (8.1, 0.14751745404437767, 0.23809132870223481, 0.24760776698159288, -0.13314879595249593),
        (12.0, 0.047689310796833537, -0.22523731263436143, -0.22344710449062761, -0.057099218260896521),
        (20.0, 0.16702466434058315, 0.062640596809383831, 0.066833124175850046, -0.1655116143625213),
        (24.9, 0.08324596835301549, -0.13649918399676524, -0.13485569953140887, -0.086002557595554252),
        (25.1, 0.10827567149994945, -0.11676770763803695, -0.11463478413442257, -0.11062223322783099),
        (33.0, 0.097270672235509463, 0.09913482552087946, 0.1006196491151175, -0.095780122419701794),
        (50.0, 0.055812327669251815, -0.098064995470077079, -0.097511828125175138, -0.056795668562014768),
    ];

    #[test]
    fn matches_high_precision_reference() {
        for &(x, j0, y0, j1, y1) in &REFERENCE {
            let set = bessel_set(x);
            assert!((bessel_j0(x) - j0).abs() < 1e-13, "J0({x})");
            assert!((bessel_y0(x).unwrap() - y0).abs() < 1e-13, "Y0({x})");
            assert!((set.j1 - j1).abs() < 1e-13, "J1({x})");
            assert!((set.y1 - y1).abs() < 1e-12, "Y1({x})");
        }
    }

    #[test]
    fn j0_at_origin_and_first_zero() {
        assert_eq!(bessel_j0(0.0), 1.0);
        assert!(bessel_j0(2.404825557695773).abs() < 1e-10);
    }

    #[test]
    fn y0_rejects_nonpositive() {
        assert!(bessel_y0(0.0).is_err());
        assert!(bessel_y0(-1.0).is_err());
    }

    #[test]
    fn wronskian_across_band_edges() {
        let mut x = 0.05;
        while x < 50.0 {
            let s = bessel_set(x);
            let w = s.j1 * s.y0 - s.j0 * s.y1;
            assert!((w - 2.0 / (PI * x)).abs() < 1e-12, "x = {x}");
            x += 0.173;
        }
    }

    #[test]
    fn u_low_orders() {
        assert_eq!(hyper_u_neg_int(0, 3.7, 2.1), 1.0);
        assert_eq!(hyper_u_neg_int(1, 1.0, 4.0), 3.0);
        let (b, z) = (0.3, 1.7);
        assert!((hyper_u_neg_int(1, b, z) - (z - b)).abs() < 1e-15);
    }

    #[test]
    fn u_three_term_recurrence() {
        // U(−m−1) = −(b + 2m − z) U(−m) − m (m + b − 1) U(−m+1)
        for &(b, z) in &[(0.5, 0.2), (-2.0, 3.3), (1.0, 7.0), (4.25, 0.9)] {
            for m in 1..10u32 {
                let mf = m as f64;
                let lhs = hyper_u_neg_int(m + 1, b, z);
                let rhs = -(b + 2.0 * mf - z) * hyper_u_neg_int(m, b, z) - mf * (mf + b - 1.0) * hyper_u_neg_int(m - 1, b, z);
                assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0), "m={m} b={b} z={z}");
            }
        }
    }
}
