//! Dormand-Prince 5(4) with the standard fifth-order continuous extension.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-10, atol: 1e-12, max_steps: 200_000 }
    }
}

impl OdeOptions {
    pub fn with_tolerance(tol: f64) -> Self {
        OdeOptions { rtol: tol, atol: tol * 1e-2, ..Default::default() }
    }
}

/// One accepted step with its interpolation coefficients.
#[derive(Debug, Clone)]
struct DenseStep<const N: usize> {
    t0: f64,
    h: f64,
    r: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    fn eval(&self, t: f64) -> ([f64; N], [f64; N]) {
        let th = (t - self.t0) / self.h;
        let u = 1.0 - th;
        let mut y = [0.0; N];
        let mut dy = [0.0; N];
        for i in 0..N {
            let [r1, r2, r3, r4, r5] = [self.r[0][i], self.r[1][i], self.r[2][i], self.r[3][i], self.r[4][i]];
            y[i] = r1 + th * (r2 + u * (r3 + th * (r4 + u * r5)));
            let d = r2 + (1.0 - 2.0 * th) * r3 + (2.0 * th * u - th * th) * r4 + (2.0 * th * u * u - 2.0 * th * th * u) * r5;
            dy[i] = d / self.h;
        }
        (y, dy)
    }
}

/// Dense solution over [t_start, t_end].
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    steps: Vec<DenseStep<N>>,
    t_start: f64,
    t_end: f64,
    y_start: [f64; N],
}

impl<const N: usize> Trajectory<N> {
    pub fn span(&self) -> (f64, f64) {
        (self.t_start, self.t_end)
    }

    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    /// Interpolated state and the time derivative of the interpolant.
    pub fn eval(&self, t: f64) -> Option<([f64; N], [f64; N])> {
        if !(t >= self.t_start && t <= self.t_end) {
            return None;
        }
        if self.steps.is_empty() {
            return Some((self.y_start, [0.0; N]));
        }
        let idx = self.steps.partition_point(|s| s.t0 + s.h < t).min(self.steps.len() - 1);
        Some(self.steps[idx].eval(t))
    }

    /// Step boundaries (accepted mesh).
    pub fn mesh(&self) -> Vec<f64> {
        let mut m: Vec<f64> = self.steps.iter().map(|s| s.t0).collect();
        m.push(self.t_end);
        m
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Integrates y' = f(t, y) from t0 to t1 (t1 > t0).
///
/// `guard` inspects every accepted state and may abort the run with a
/// message; the error reports the time reached.
pub fn integrate<const N: usize, F, G>(mut f: F, mut guard: G, t0: f64, y0: [f64; N], t1: f64, opts: OdeOptions) -> Result<Trajectory<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    G: FnMut(f64, &[f64; N]) -> Option<String>,
{
    let mut traj = Trajectory { steps: Vec::new(), t_start: t0, t_end: t1, y_start: y0 };
    if t1 <= t0 {
        return Ok(traj);
    }
    if let Some(msg) = guard(t0, &y0) {
        return Err(Error::Singularity { t: t0, msg });
    }
    let mut t = t0;
    let mut y = y0;
    let mut k = [[0.0; N]; 7];
    k[0] = f(t, &y);
    let mut h = 1e-4 * (t1 - t0);
    let mut steps = 0;
    while t < t1 {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::Singularity { t, msg: "step budget exhausted".into() });
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        for s in 1..7 {
            let mut ys = y;
            for (i, v) in ys.iter_mut().enumerate() {
                *v += h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>();
            }
            k[s] = f(t + C[s] * h, &ys);
        }
        // the seventh stage is evaluated at the new solution (FSAL)
        let mut y1 = y;
        for (i, v) in y1.iter_mut().enumerate() {
            *v += h * (0..6).map(|j| A[6][j] * k[j][i]).sum::<f64>();
        }
        let mut err = 0.0;
        for i in 0..N {
            let e = h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
            let sc = opts.atol + opts.rtol * y[i].abs().max(y1[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / N as f64).sqrt();
        if !err.is_finite() {
            h *= 0.2;
            if h < 1e-14 * t1.abs().max(1.0) {
                return Err(Error::Singularity { t, msg: "non-finite derivative".into() });
            }
            continue;
        }
        if err > 1.0 {
            h *= (0.9 * err.powf(-0.2)).max(0.2);
            if h < 1e-14 * t1.abs().max(1.0) {
                return Err(Error::Singularity { t, msg: "step size underflow".into() });
            }
            continue;
        }
        let mut r = [[0.0; N]; 5];
        for i in 0..N {
            let dy = y1[i] - y[i];
            let bspl = h * k[0][i] - dy;
            r[0][i] = y[i];
            r[1][i] = dy;
            r[2][i] = bspl;
            r[3][i] = dy - h * k[6][i] - bspl;
            r[4][i] = h * (0..7).map(|j| D[j] * k[j][i]).sum::<f64>();
        }
        traj.steps.push(DenseStep { t0: t, h, r });
        t = if last { t1 } else { t + h };
        y = y1;
        k[0] = k[6];
        if let Some(msg) = guard(t, &y) {
            traj.t_end = t;
            return Err(Error::Singularity { t, msg });
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_with_dense_output() {
        let traj = integrate(|_, y| [y[1], -y[0]], |_, _| None, 0.0, [1.0, 0.0], 10.0, OdeOptions::default()).unwrap();
        for k in 0..=1000 {
            let t = k as f64 * 0.01;
            let (y, dy) = traj.eval(t).unwrap();
            assert!((y[0] - t.cos()).abs() < 1e-8, "t={t}");
            assert!((y[1] + t.sin()).abs() < 1e-8);
            assert!((dy[1] + t.cos()).abs() < 1e-6);
        }
    }

    #[test]
    fn guard_aborts_with_time() {
        let err =
            integrate(|_, y| [-1.0 + 0.0 * y[0]], |_, y| (y[0] < 0.5).then(|| "low".to_string()), 0.0, [1.0], 2.0, OdeOptions::default())
                .unwrap_err();
        match err {
            Error::Singularity { t, .. } => assert!(t > 0.5 && t <= 2.0),
            other => panic!("{other}"),
        }
    }
}
