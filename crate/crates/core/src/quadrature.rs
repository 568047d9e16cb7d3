//! Gauss-Legendre rules, adaptive Gauss-Kronrod integration and the polar
//! grid used for wavefunction integrals.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Nodes and weights of the n-point Gauss-Legendre rule on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive Gauss-Kronrod (7/15) integration of `f` over [a, b].
///
/// Subdivides the interval with the largest error estimate until the total
/// estimate drops below `tol * max(1, |integral|)`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (v, e) = kronrod15(&mut f, a, b);
    let mut pieces = vec![(a, b, v, e)];
    for _ in 0..2000 {
        let total: f64 = pieces.iter().map(|p| p.2).sum();
        let err: f64 = pieces.iter().map(|p| p.3).sum();
        if err <= tol * total.abs().max(1.0) {
            return Ok(total);
        }
        let (idx, _) = pieces.iter().enumerate().max_by(|x, y| x.1 .3.total_cmp(&y.1 .3)).expect("nonempty");
        let (lo, hi, _, _) = pieces.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = kronrod15(&mut f, lo, mid);
        let (v2, e2) = kronrod15(&mut f, mid, hi);
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
    }
    let estimate = pieces.iter().map(|p| p.3).sum();
    Err(Error::Quadrature { estimate })
}

/// Tensor grid in polar coordinates: composite Gauss-Legendre in r on
/// [0, R] and the periodic trapezoid rule in θ. Weights include the r of
/// the area element.
#[derive(Debug, Clone)]
pub struct PolarGrid {
    pub r: Vec<f64>,
    pub theta: Vec<f64>,
    /// r·w_r·w_θ, indexed [i_r * theta.len() + i_theta]
    pub weights: Vec<f64>,
}

impl PolarGrid {
    pub fn new(radius: f64, panels: usize, order: usize, angular: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let width = radius / panels as f64;
        let mut r = Vec::with_capacity(panels * order);
        let mut wr = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let lo = p as f64 * width;
            for (xi, wi) in x.iter().zip(&w) {
                r.push(lo + 0.5 * width * (xi + 1.0));
                wr.push(0.5 * width * wi);
            }
        }
        let dtheta = 2.0 * PI / angular as f64;
        let theta: Vec<f64> = (0..angular).map(|k| k as f64 * dtheta).collect();
        let mut weights = Vec::with_capacity(r.len() * angular);
        for (ri, wi) in r.iter().zip(&wr) {
            for _ in 0..angular {
                weights.push(ri * wi * dtheta);
            }
        }
        PolarGrid { r, theta, weights }
    }

    /// Grid sized for states up to total quantum number `n_plus_m` with
    /// Gaussian width scale `length` (√ħ σ). The radial cutoff leaves a tail
    /// below e^(−45) relative to the integrand.
    pub fn for_states(length: f64, n_plus_m: u32) -> Self {
        let rho2 = 45.0 + 4.0 * (n_plus_m as f64 + 2.0);
        let radius = length * rho2.sqrt();
        let angular = (4 * n_plus_m as usize + 16).next_power_of_two().max(32);
        PolarGrid::new(radius, 6, 24, angular)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Iterator over (r, θ, weight) in storage order.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let nt = self.theta.len();
        self.weights.iter().enumerate().map(move |(k, &w)| (self.r[k / nt], self.theta[k % nt], w))
    }

    /// Σ w conj(a) b over grid values stored in the same order.
    pub fn inner(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        self.weights.iter().zip(a.iter().zip(b)).map(|(w, (x, y))| x.conj() * y * *w).sum()
    }

    pub fn norm_sqr(&self, a: &[Complex64]) -> f64 {
        self.weights.iter().zip(a).map(|(w, x)| w * x.norm_sqr()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(10);
        for deg in 0..20 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        let v = integrate(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-13).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((v - exact).abs() < 1e-10 * exact);
        let e = integrate(f64::exp, 0.0, 3.0, 1e-14).unwrap();
        assert!((e - (3.0f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn polar_grid_gaussian_mass() {
        let g = PolarGrid::for_states(1.3, 0);
        let mass: f64 = g.points().map(|(r, _, w)| w * (-r * r / 1.69).exp()).sum();
        assert!((mass - PI * 1.69).abs() < 1e-12);
    }
}
