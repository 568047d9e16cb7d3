//! Oracle helpers shared by the integration tests: golden-section search,
//! a Simpson/trapezoid polar grid and finite-difference derivatives.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;

use ncosc::states::FrozenState;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn golden(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    polish(f, 0.5 * (lo + hi), 1e-4)
}

/// Vertex of the parabola through x − h, x, x + h.
pub fn polish(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let (a, b, c) = (f(x - h), f(x), f(x + h));
    let den = a - 2.0 * b + c;
    if den > 0.0 {
        x + 0.5 * h * (a - c) / den
    } else {
        x
    }
}

/// Polar tensor grid: composite Simpson in r (weights include r), periodic
/// trapezoid in θ.
pub struct Grid {
    pub pts: Vec<(f64, f64)>,
    pub w: Vec<f64>,
}

impl Grid {
    pub fn new(radius: f64, nr: usize, nth: usize) -> Self {
        let dr = radius / nr as f64;
        let mut pts = Vec::new();
        let mut w = Vec::new();
        for i in 0..=nr {
            let r = i as f64 * dr;
            let simpson = if i == 0 || i == nr {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            for j in 0..nth {
                pts.push((r, 2.0 * PI * j as f64 / nth as f64));
                w.push(simpson * dr / 3.0 * r * 2.0 * PI / nth as f64);
            }
        }
        Grid { pts, w }
    }

    pub fn inner(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        self.w.iter().zip(a.iter().zip(b)).map(|(w, (x, y))| *w * x.conj() * y).sum()
    }
}

/// ψ and Cartesian derivatives by fourth-order central differences.
pub struct Fields {
    pub psi: Vec<Complex64>,
    pub dx: Vec<Complex64>,
    pub dy: Vec<Complex64>,
    pub dxx: Vec<Complex64>,
    pub dyy: Vec<Complex64>,
}

pub fn at_xy(fs: &FrozenState, x: f64, y: f64) -> Complex64 {
    fs.value(x.hypot(y), y.atan2(x))
}

pub fn fields(fs: &FrozenState, grid: &Grid, h: f64) -> Fields {
    let n = grid.pts.len();
    let mut f = Fields {
        psi: Vec::with_capacity(n),
        dx: Vec::with_capacity(n),
        dy: Vec::with_capacity(n),
        dxx: Vec::with_capacity(n),
        dyy: Vec::with_capacity(n),
    };
    for &(r, th) in &grid.pts {
        let (x, y) = (r * th.cos(), r * th.sin());
        let p0 = at_xy(fs, x, y);
        let sx = [-2.0, -1.0, 1.0, 2.0].map(|k| at_xy(fs, x + k * h, y));
        let sy = [-2.0, -1.0, 1.0, 2.0].map(|k| at_xy(fs, x, y + k * h));
        f.psi.push(p0);
        f.dx.push((sx[0] - 8.0 * sx[1] + 8.0 * sx[2] - sx[3]) / (12.0 * h));
        f.dy.push((sy[0] - 8.0 * sy[1] + 8.0 * sy[2] - sy[3]) / (12.0 * h));
        f.dxx.push((-sx[0] + 16.0 * sx[1] - 30.0 * p0 + 16.0 * sx[2] - sx[3]) / (12.0 * h * h));
        f.dyy.push((-sy[0] + 16.0 * sy[1] - 30.0 * p0 + 16.0 * sy[2] - sy[3]) / (12.0 * h * h));
    }
    f
}

pub fn xy(grid: &Grid) -> impl Iterator<Item = (f64, f64)> + '_ {
    grid.pts.iter().map(|&(r, th)| (r * th.cos(), r * th.sin()))
}
