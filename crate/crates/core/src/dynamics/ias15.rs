//! 15th-order Gauss-Radau integrator with adaptive steps for y'' = f(y).
//!
//! Follows the predictor-corrector formulation of Everhart's RADAU scheme
//! as popularised by IAS15: seven Radau substeps per step, the b
//! coefficients are iterated to convergence and the step size is chosen
//! from the size of the last coefficient relative to the acceleration.

use crate::{Error, Result};

/// Radau spacings of the substeps within one step.
const H: [f64; 8] = [
    0.0,
    0.056_262_560_536_922_146_465_652_191_031_8,
    0.180_240_691_736_892_364_987_579_942_78,
    0.352_624_717_113_169_637_373_907_769_648,
    0.547_153_626_330_555_383_001_448_554_766,
    0.734_210_177_215_410_531_523_210_605_558,
    0.885_320_946_839_095_768_090_359_771_03,
    0.977_520_613_561_287_501_891_174_488_626,
];

const SAFETY: f64 = 0.25;
const MAX_ITER: usize = 12;

struct Coeffs {
    rr: [f64; 28],
    c: [f64; 21],
    d: [f64; 21],
}

fn coeffs() -> Coeffs {
    let mut rr = [0.0; 28];
    let mut n = 0;
    for j in 1..8 {
        for k in 0..j {
            rr[n] = H[j] - H[k];
            n += 1;
        }
    }
    let mut c = [0.0; 21];
    let mut d = [0.0; 21];
    c[0] = -H[1];
    d[0] = H[1];
    // row j holds j entries starting at j(j-1)/2
    for j in 2..7 {
        let s = j * (j - 1) / 2;
        let p = (j - 1) * (j - 2) / 2;
        c[s] = -H[j] * c[p];
        d[s] = H[1] * d[p];
        for k in 1..j - 1 {
            c[s + k] = c[p + k - 1] - H[j] * c[p + k];
            d[s + k] = d[p + k - 1] + H[k + 1] * d[p + k];
        }
        c[s + j - 1] = c[p + j - 2] - H[j];
        d[s + j - 1] = d[p + j - 2] + H[j];
    }
    Coeffs { rr, c, d }
}

/// Right-hand side of a second-order system.
pub trait Field {
    fn dim(&self) -> usize;
    fn accel(&self, x: &[f64], a: &mut [f64]) -> Result<()>;
}

/// Outcome of one accepted step.
#[derive(Debug, Clone, Copy)]
pub struct StepInfo {
    pub dt: f64,
    pub iterations: usize,
}

pub struct Ias15 {
    pub t: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    a0: Vec<f64>,
    b: [Vec<f64>; 7],
    e: [Vec<f64>; 7],
    br: [Vec<f64>; 7],
    er: [Vec<f64>; 7],
    g: [Vec<f64>; 7],
    dt: f64,
    dt_last_done: f64,
    epsilon: f64,
    abs_floor: f64,
    min_dt: f64,
    k: Coeffs,
}

fn zeros7(n: usize) -> [Vec<f64>; 7] {
    std::array::from_fn(|_| vec![0.0; n])
}

impl Ias15 {
    /// `epsilon` controls the step size through |b6| / |a|; `abs_floor`
    /// is added to |a| so that vanishing accelerations do not force tiny
    /// steps. The first step is estimated from |x| / |a|.
    pub fn new<F: Field>(f: &F, t: f64, x: Vec<f64>, v: Vec<f64>, epsilon: f64, abs_floor: f64, min_dt: f64) -> Result<Self> {
        let n = f.dim();
        if x.len() != n || v.len() != n {
            return Err(Error::domain("state length does not match the field"));
        }
        let mut a0 = vec![0.0; n];
        f.accel(&x, &mut a0)?;
        let xn = x.iter().map(|q| q * q).sum::<f64>().sqrt();
        let an = a0.iter().map(|q| q * q).sum::<f64>().sqrt();
        let vn = v.iter().map(|q| q * q).sum::<f64>().sqrt();
        let mut dt = if an > 0.0 { 0.01 * (xn / an).sqrt() } else { 0.01 };
        if vn > 0.0 && xn > 0.0 {
            dt = dt.min(0.01 * xn / vn);
        }
        Ok(Ias15 {
            t,
            x,
            v,
            a0,
            b: zeros7(n),
            e: zeros7(n),
            br: zeros7(n),
            er: zeros7(n),
            g: zeros7(n),
            dt: dt.max(min_dt),
            dt_last_done: 0.0,
            epsilon,
            abs_floor,
            min_dt,
            k: coeffs(),
        })
    }

    pub fn acceleration(&self) -> &[f64] {
        &self.a0
    }

    /// Takes one accepted step, never passing `t_end` when given.
    /// Fails with `Error::StepUnderflow` below `min_dt`.
    pub fn step<F: Field>(&mut self, f: &F, t_end: Option<f64>) -> Result<StepInfo> {
        let n = f.dim();
        let mut xs = vec![0.0; n];
        let mut at = vec![0.0; n];
        loop {
            let mut dt = self.dt;
            if let Some(te) = t_end {
                let rest = te - self.t;
                if rest <= 0.0 {
                    return Err(Error::domain("already at the end time"));
                }
                if dt > rest {
                    dt = rest;
                }
            }
            if self.dt.abs() < self.min_dt {
                return Err(Error::StepUnderflow(self.t));
            }
            self.g_from_b();
            let mut pc_err = f64::INFINITY;
            let mut pc_last = 2.0;
            let mut iterations = 0;
            while iterations < MAX_ITER {
                if pc_err < 1e-16 {
                    break;
                }
                if iterations > 2 && pc_last <= pc_err {
                    break;
                }
                pc_last = pc_err;
                pc_err = 0.0;
                iterations += 1;
                for sub in 1..8 {
                    self.predict_positions(sub, dt, &mut xs);
                    f.accel(&xs, &mut at)?;
                    let err = self.correct(sub, &at);
                    if sub == 7 {
                        pc_err = err;
                    }
                }
            }
            // step-size control from the last b coefficient
            let maxa = at.iter().fold(0.0f64, |m, q| m.max(q.abs())) + self.abs_floor;
            let maxb6 = self.b[6].iter().fold(0.0f64, |m, q| m.max(q.abs()));
            let err = maxb6 / maxa;
            let mut dt_new = if err.is_finite() && err > 0.0 {
                (self.epsilon / err).powf(1.0 / 7.0) * dt
            } else {
                dt / SAFETY
            };
            if (dt_new / dt).abs() < SAFETY {
                self.dt = dt_new;
                if self.dt_last_done != 0.0 {
                    let ratio = self.dt / self.dt_last_done;
                    predict(ratio, &self.er, &self.br, &mut self.e, &mut self.b);
                } else {
                    for k in 0..7 {
                        self.b[k].iter_mut().for_each(|q| *q = 0.0);
                        self.e[k].iter_mut().for_each(|q| *q = 0.0);
                    }
                }
                continue;
            }
            if (dt_new / dt).abs() > 1.0 / SAFETY {
                dt_new = dt / SAFETY;
            }
            self.advance(dt);
            f.accel(&self.x, &mut self.a0)?;
            self.t += dt;
            self.dt_last_done = dt;
            for k in 0..7 {
                self.er[k].copy_from_slice(&self.e[k]);
                self.br[k].copy_from_slice(&self.b[k]);
            }
            // a step clipped at t_end should not shrink the next one
            self.dt = if dt < self.dt { self.dt.max(dt_new) } else { dt_new };
            let ratio = self.dt / dt;
            predict(ratio, &self.er, &self.br, &mut self.e, &mut self.b);
            return Ok(StepInfo { dt, iterations });
        }
    }

    fn g_from_b(&mut self) {
        let d = &self.k.d;
        let b = &self.b;
        for i in 0..self.a0.len() {
            let (b0, b1, b2, b3, b4, b5, b6) = (b[0][i], b[1][i], b[2][i], b[3][i], b[4][i], b[5][i], b[6][i]);
            self.g[0][i] = b6 * d[15] + b5 * d[10] + b4 * d[6] + b3 * d[3] + b2 * d[1] + b1 * d[0] + b0;
            self.g[1][i] = b6 * d[16] + b5 * d[11] + b4 * d[7] + b3 * d[4] + b2 * d[2] + b1;
            self.g[2][i] = b6 * d[17] + b5 * d[12] + b4 * d[8] + b3 * d[5] + b2;
            self.g[3][i] = b6 * d[18] + b5 * d[13] + b4 * d[9] + b3;
            self.g[4][i] = b6 * d[19] + b5 * d[14] + b4;
            self.g[5][i] = b6 * d[20] + b5;
            self.g[6][i] = b6;
        }
    }

    fn predict_positions(&self, sub: usize, dt: f64, xs: &mut [f64]) {
        let h = H[sub];
        let s0 = dt * h;
        let s1 = s0 * s0 / 2.0;
        let s2 = s1 * h / 3.0;
        let s3 = s2 * h / 2.0;
        let s4 = 3.0 * s3 * h / 5.0;
        let s5 = 2.0 * s4 * h / 3.0;
        let s6 = 5.0 * s5 * h / 7.0;
        let s7 = 3.0 * s6 * h / 4.0;
        let s8 = 7.0 * s7 * h / 9.0;
        let b = &self.b;
        for i in 0..xs.len() {
            xs[i] = self.x[i]
                + (s8 * b[6][i] + s7 * b[5][i] + s6 * b[4][i] + s5 * b[3][i] + s4 * b[2][i] + s3 * b[1][i] + s2 * b[0][i])
                + s1 * self.a0[i]
                + s0 * self.v[i];
        }
    }

    /// Updates g and b from the acceleration at substep `sub`; returns the
    /// relative change of the updated g (meaningful at the last substep).
    fn correct(&mut self, sub: usize, at: &[f64]) -> f64 {
        let rr = &self.k.rr;
        let c = &self.k.c;
        let j = sub - 1;
        let r0 = j * (j + 1) / 2;
        let c0 = if j >= 1 { (j - 1) * j / 2 } else { 0 };
        let mut max_tmp = 0.0f64;
        let mut max_a = 0.0f64;
        for i in 0..at.len() {
            let mut gk = (at[i] - self.a0[i]) / rr[r0];
            for m in 0..j {
                gk = (gk - self.g[m][i]) / rr[r0 + m + 1];
            }
            let tmp = gk - self.g[j][i];
            self.g[j][i] = gk;
            for m in 0..j {
                self.b[m][i] += tmp * c[c0 + m];
            }
            self.b[j][i] += tmp;
            max_tmp = max_tmp.max(tmp.abs());
            max_a = max_a.max(at[i].abs());
        }
        if max_a > 0.0 {
            max_tmp / max_a
        } else {
            max_tmp
        }
    }

    fn advance(&mut self, dt: f64) {
        let b = &self.b;
        let dt2 = dt * dt;
        for i in 0..self.x.len() {
            self.x[i] += dt * self.v[i]
                + dt2
                    * (self.a0[i] / 2.0
                        + b[0][i] / 6.0
                        + b[1][i] / 12.0
                        + b[2][i] / 20.0
                        + b[3][i] / 30.0
                        + b[4][i] / 42.0
                        + b[5][i] / 56.0
                        + b[6][i] / 72.0);
            self.v[i] += dt
                * (self.a0[i]
                    + b[0][i] / 2.0
                    + b[1][i] / 3.0
                    + b[2][i] / 4.0
                    + b[3][i] / 5.0
                    + b[4][i] / 6.0
                    + b[5][i] / 7.0
                    + b[6][i] / 8.0);
        }
    }
}

/// Extrapolates the b coefficients of the last step to a step scaled by
/// `ratio`, keeping the previous correction (b − e).
fn predict(ratio: f64, e_old: &[Vec<f64>; 7], b_old: &[Vec<f64>; 7], e: &mut [Vec<f64>; 7], b: &mut [Vec<f64>; 7]) {
    let n = b_old[0].len();
    if ratio > 20.0 {
        for k in 0..7 {
            e[k].iter_mut().for_each(|q| *q = 0.0);
            b[k].iter_mut().for_each(|q| *q = 0.0);
        }
        return;
    }
    let q1 = ratio;
    let q2 = q1 * q1;
    let q3 = q1 * q2;
    let q4 = q2 * q2;
    let q5 = q2 * q3;
    let q6 = q3 * q3;
    let q7 = q3 * q4;
    for i in 0..n {
        let ob: [f64; 7] = std::array::from_fn(|k| b_old[k][i]);
        let be: [f64; 7] = std::array::from_fn(|k| b_old[k][i] - e_old[k][i]);
        let ne = [
            q1 * (ob[6] * 7.0 + ob[5] * 6.0 + ob[4] * 5.0 + ob[3] * 4.0 + ob[2] * 3.0 + ob[1] * 2.0 + ob[0]),
            q2 * (ob[6] * 21.0 + ob[5] * 15.0 + ob[4] * 10.0 + ob[3] * 6.0 + ob[2] * 3.0 + ob[1]),
            q3 * (ob[6] * 35.0 + ob[5] * 20.0 + ob[4] * 10.0 + ob[3] * 4.0 + ob[2]),
            q4 * (ob[6] * 35.0 + ob[5] * 15.0 + ob[4] * 5.0 + ob[3]),
            q5 * (ob[6] * 21.0 + ob[5] * 6.0 + ob[4]),
            q6 * (ob[6] * 7.0 + ob[5]),
            q7 * ob[6],
        ];
        for k in 0..7 {
            e[k][i] = ne[k];
            b[k][i] = ne[k] + be[k];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_tables() {
        let k = coeffs();
        assert!((k.c[1] - 0.010_140_802_830_063_63).abs() < 1e-15);
        assert!((k.c[4] - 0.093_537_695_259_462_07).abs() < 1e-15);
        assert!((k.d[8] - 0.253_534_069_054_569_27).abs() < 1e-15);
        assert!((k.c[20] + 2.755_812_719_772_045_7).abs() < 1e-13);
        assert!((k.d[20] - 2.755_812_719_772_045_7).abs() < 1e-13);
        assert!((k.rr[27] - 0.092_199_666_722_191_74).abs() < 1e-15);
    }

    struct Oscillator;
    impl Field for Oscillator {
        fn dim(&self) -> usize {
            1
        }
        fn accel(&self, x: &[f64], a: &mut [f64]) -> Result<()> {
            a[0] = -x[0];
            Ok(())
        }
    }

    #[test]
    fn harmonic_period() {
        let mut s = Ias15::new(&Oscillator, 0.0, vec![1.0], vec![0.0], 1e-9, 0.0, 1e-12).unwrap();
        let tau = 2.0 * std::f64::consts::PI;
        while s.t < tau {
            s.step(&Oscillator, Some(tau)).unwrap();
        }
        assert!((s.x[0] - 1.0).abs() < 1e-12);
        assert!(s.v[0].abs() < 1e-12);
    }
}
