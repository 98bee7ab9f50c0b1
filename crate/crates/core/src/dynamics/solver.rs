//! Adaptive Dormand–Prince 8(5,3) stepper with continuous output.

use super::tableau::*;
use crate::error::Error;

/// Step-size control settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
}

/// Counters accumulated by [`solve`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rhs_evals: usize,
}

/// Degree-7 interpolant over one accepted step.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub h: f64,
    t1: f64,
    /// This step ends the integration at `t_end`.
    pub last: bool,
    cont: [[f64; N]; 8],
}

impl<const N: usize> DenseStep<N> {
    /// End of the step; exactly `t_end` on the last one.
    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn eval(&self, t: f64) -> [f64; N] {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let c = &self.cont;
        std::array::from_fn(|i| {
            let conpar = c[4][i] + (c[5][i] + (c[6][i] + c[7][i] * s) * s1) * s;
            c[0][i] + (c[1][i] + (c[2][i] + (c[3][i] + conpar * s1) * s) * s1) * s
        })
    }
}

/// Integration aborted with the step size below `1e−14·|t_end|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Underflow {
    pub t: f64,
    pub h: f64,
    pub stats: SolverStats,
}

impl From<Underflow> for Error {
    fn from(u: Underflow) -> Self {
        Error::StepUnderflow { t: u.t, h: u.h }
    }
}

/// `y + h·Σ aⱼkⱼ`.
fn combine<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(a, k)| a * k[i]).sum::<f64>())
}

fn weighted<const N: usize>(terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| terms.iter().map(|(a, k)| a * k[i]).sum::<f64>())
}

fn initial_step<const N: usize, F>(
    rhs: &mut F,
    t0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    ctl: &StepControl,
    span: f64,
) -> f64
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let sk: [f64; N] = std::array::from_fn(|i| ctl.abs_tol + ctl.rel_tol * y0[i].abs());
    let dnf: f64 = (0..N).map(|i| (f0[i] / sk[i]).powi(2)).sum();
    let dny: f64 = (0..N).map(|i| (y0[i] / sk[i]).powi(2)).sum();
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 { 1e-6 } else { (dny / dnf).sqrt() * 0.01 };
    h = h.min(ctl.max_step).min(span);
    let y1 = combine(y0, h, &[(1.0, f0)]);
    let f1 = rhs(t0 + h, &y1);
    let der2 = (0..N).map(|i| ((f1[i] - f0[i]) / sk[i]).powi(2)).sum::<f64>().sqrt() / h;
    let der12 = der2.max(dnf.sqrt());
    let h1 = if der12 <= 1e-15 { (h * 1e-3).max(1e-6) } else { (0.01 / der12).powf(1.0 / 8.0) };
    (100.0 * h).min(h1).min(ctl.max_step).min(span)
}

/// Integrates `y' = rhs(t, y)` from `t0` to `t_end > t0`.
///
/// After every accepted step `observer` receives the step interpolant and
/// the new state, which it may modify in place (the derivative is then
/// re-evaluated). Returning `false` stops the integration early.
pub fn solve<const N: usize, F, O>(
    mut rhs: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    ctl: &StepControl,
    mut observer: O,
) -> Result<SolverStats, Underflow>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    O: FnMut(&DenseStep<N>, &mut [f64; N]) -> bool,
{
    let mut stats = SolverStats::default();
    if !(t_end > t0) {
        return Ok(stats);
    }
    let h_min = 1e-14 * t_end.abs().max(t_end - t0);
    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(t, &y);
    stats.rhs_evals += 2;
    let mut h = initial_step(&mut rhs, t, &y, &k1, ctl, t_end - t0);
    let mut last_rejected = false;

    loop {
        let remaining = t_end - t;
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        if h < h_min && !last {
            return Err(Underflow { t, h, stats });
        }

        let k2 = rhs(t + C2 * h, &combine(&y, h, &[(A21, &k1)]));
        let k3 = rhs(t + C3 * h, &combine(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(t + C4 * h, &combine(&y, h, &[(A41, &k1), (A43, &k3)]));
        let k5 = rhs(t + C5 * h, &combine(&y, h, &[(A51, &k1), (A53, &k3), (A54, &k4)]));
        let k6 = rhs(t + C6 * h, &combine(&y, h, &[(A61, &k1), (A64, &k4), (A65, &k5)]));
        let k7 = rhs(t + C7 * h, &combine(&y, h, &[(A71, &k1), (A74, &k4), (A75, &k5), (A76, &k6)]));
        let k8 = rhs(t + C8 * h, &combine(&y, h, &[(A81, &k1), (A84, &k4), (A85, &k5), (A86, &k6), (A87, &k7)]));
        let k9 =
            rhs(t + C9 * h, &combine(&y, h, &[(A91, &k1), (A94, &k4), (A95, &k5), (A96, &k6), (A97, &k7), (A98, &k8)]));
        let k10 = rhs(
            t + C10 * h,
            &combine(
                &y,
                h,
                &[(A101, &k1), (A104, &k4), (A105, &k5), (A106, &k6), (A107, &k7), (A108, &k8), (A109, &k9)],
            ),
        );
        let k11 = rhs(
            t + C11 * h,
            &combine(
                &y,
                h,
                &[
                    (A111, &k1),
                    (A114, &k4),
                    (A115, &k5),
                    (A116, &k6),
                    (A117, &k7),
                    (A118, &k8),
                    (A119, &k9),
                    (A1110, &k10),
                ],
            ),
        );
        let t_new = t + h;
        let y12 = combine(
            &y,
            h,
            &[
                (A121, &k1),
                (A124, &k4),
                (A125, &k5),
                (A126, &k6),
                (A127, &k7),
                (A128, &k8),
                (A129, &k9),
                (A1210, &k10),
                (A1211, &k11),
            ],
        );
        let k12 = rhs(t_new, &y12);
        stats.rhs_evals += 11;
        let slope =
            weighted(&[(B1, &k1), (B6, &k6), (B7, &k7), (B8, &k8), (B9, &k9), (B10, &k10), (B11, &k11), (B12, &k12)]);
        let y_new = combine(&y, h, &[(1.0, &slope)]);

        let mut err = 0.0;
        let mut err2 = 0.0;
        for i in 0..N {
            let sk = ctl.abs_tol + ctl.rel_tol * y[i].abs().max(y_new[i].abs());
            let e2 = slope[i] - BHH1 * k1[i] - BHH2 * k9[i] - BHH3 * k12[i];
            err2 += (e2 / sk).powi(2);
            let e = ER1 * k1[i]
                + ER6 * k6[i]
                + ER7 * k7[i]
                + ER8 * k8[i]
                + ER9 * k9[i]
                + ER10 * k10[i]
                + ER11 * k11[i]
                + ER12 * k12[i];
            err += (e / sk).powi(2);
        }
        let mut deno = err + 0.01 * err2;
        if deno <= 0.0 {
            deno = 1.0;
        }
        let err = h * err * (1.0 / (deno * N as f64)).sqrt();

        if !err.is_finite() {
            stats.rejected_steps += 1;
            last_rejected = true;
            h *= 0.1;
            continue;
        }

        let fac11 = err.powf(1.0 / 8.0);
        let fac = (1.0 / 6.0_f64).max(3.0_f64.min(fac11 / 0.9));
        let mut h_new = h / fac;

        if err <= 1.0 {
            stats.accepted_steps += 1;
            let k13 = rhs(t_new, &y_new);
            stats.rhs_evals += 1;

            let mut dense = dense_step(&mut rhs, t, h, &y, &y_new, [&k1, &k6, &k7, &k8, &k9, &k10, &k11, &k12, &k13]);
            if last {
                dense.t1 = t_end;
                dense.last = true;
            }
            stats.rhs_evals += 3;

            let mut y_obs = y_new;
            let keep_going = observer(&dense, &mut y_obs);
            t = if last { t_end } else { t_new };
            if y_obs != y_new {
                k1 = rhs(t, &y_obs);
                stats.rhs_evals += 1;
            } else {
                k1 = k13;
            }
            y = y_obs;
            if last || !keep_going {
                return Ok(stats);
            }
            if last_rejected {
                h_new = h_new.min(h);
            }
            last_rejected = false;
        } else {
            h_new = h / 3.0_f64.min(fac11 / 0.9);
            stats.rejected_steps += 1;
            last_rejected = true;
        }
        h = h_new.min(ctl.max_step);
    }
}

fn dense_step<const N: usize, F>(
    rhs: &mut F,
    t: f64,
    h: f64,
    y: &[f64; N],
    y_new: &[f64; N],
    k: [&[f64; N]; 9],
) -> DenseStep<N>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let [k1, k6, k7, k8, k9, k10, k11, k12, k13] = k;
    let k14 = rhs(
        t + C14 * h,
        &combine(
            y,
            h,
            &[(A141, k1), (A147, k7), (A148, k8), (A149, k9), (A1410, k10), (A1411, k11), (A1412, k12), (A1413, k13)],
        ),
    );
    let k15 = rhs(
        t + C15 * h,
        &combine(
            y,
            h,
            &[(A151, k1), (A156, k6), (A157, k7), (A158, k8), (A1511, k11), (A1512, k12), (A1513, k13), (A1514, &k14)],
        ),
    );
    let k16 = rhs(
        t + C16 * h,
        &combine(
            y,
            h,
            &[(A161, k1), (A166, k6), (A167, k7), (A168, k8), (A169, k9), (A1613, k13), (A1614, &k14), (A1615, &k15)],
        ),
    );

    let mut cont = [[0.0; N]; 8];
    for i in 0..N {
        let ydiff = y_new[i] - y[i];
        let bspl = h * k1[i] - ydiff;
        cont[0][i] = y[i];
        cont[1][i] = ydiff;
        cont[2][i] = bspl;
        cont[3][i] = ydiff - h * k13[i] - bspl;
    }
    let rows: [[f64; 12]; 4] = [
        [D41, D46, D47, D48, D49, D410, D411, D412, D413, D414, D415, D416],
        [D51, D56, D57, D58, D59, D510, D511, D512, D513, D514, D515, D516],
        [D61, D66, D67, D68, D69, D610, D611, D612, D613, D614, D615, D616],
        [D71, D76, D77, D78, D79, D710, D711, D712, D713, D714, D715, D716],
    ];
    let stages: [&[f64; N]; 12] = [k1, k6, k7, k8, k9, k10, k11, k12, k13, &k14, &k15, &k16];
    for (row, d) in rows.iter().enumerate() {
        for i in 0..N {
            cont[4 + row][i] = h * d.iter().zip(stages.iter()).map(|(c, k)| c * k[i]).sum::<f64>();
        }
    }
    DenseStep { t0: t, h, t1: t + h, last: false, cont }
}
