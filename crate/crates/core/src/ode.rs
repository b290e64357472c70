//! Adaptive Dormand–Prince 5(4) integration with dense output.
//!
//! The solver walks an ODE system step by step and hands every accepted step
//! to a caller-supplied observer together with a continuous interpolant over
//! the step. Event localization (tip crossings, blow-up thresholds,
//! separatrix exits) is built by the callers on top of the interpolant, which
//! keeps the domain logic out of the stepper. Integration runs forward or
//! backward in the independent variable depending on the sign of the span.

use thiserror::Error;

/// Right-hand side of a first-order ODE system of fixed dimension `N`.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, r: f64, y: &[f64; N]) -> [f64; N];
}

impl<F, const N: usize> OdeSystem<N> for F
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    fn rhs(&self, r: f64, y: &[f64; N]) -> [f64; N] {
        self(r, y)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    /// The step controller could not satisfy the tolerance without the step
    /// size underflowing.
    #[error("step size underflow at r = {r:.6e} (step {h:.3e})")]
    StepUnderflow { r: f64, h: f64 },
    #[error("exceeded {max_steps} accepted steps at r = {r:.6e}")]
    MaxSteps { r: f64, max_steps: usize },
}

/// Observer verdict after an accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

/// One accepted step with its continuous extension.
///
/// The interpolant is the standard fourth-order continuous extension of the
/// Dormand–Prince pair; it is valid for `r` between `r0` and `r1`.
#[derive(Debug, Clone)]
pub struct DenseStep<const N: usize> {
    pub r0: f64,
    pub r1: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    cont: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    /// Evaluate the interpolant at `r` (clamped to the step interval).
    pub fn eval(&self, r: f64) -> [f64; N] {
        let h = self.r1 - self.r0;
        let theta = if h == 0.0 {
            0.0
        } else {
            ((r - self.r0) / h).clamp(0.0, 1.0)
        };
        let th1 = 1.0 - theta;
        let mut out = [0.0_f64; N];
        for (i, o) in out.iter_mut().enumerate() {
            let c = [
                self.cont[0][i],
                self.cont[1][i],
                self.cont[2][i],
                self.cont[3][i],
                self.cont[4][i],
            ];
            *o = c[0] + theta * (c[1] + th1 * (c[2] + theta * (c[3] + th1 * c[4])));
        }
        out
    }

    /// True when `r` lies inside the (directed) step interval.
    pub fn contains(&self, r: f64) -> bool {
        if self.r1 >= self.r0 {
            (self.r0..=self.r1).contains(&r)
        } else {
            (self.r1..=self.r0).contains(&r)
        }
    }

    /// Locate a root of `g(r, y(r))` inside the step by bisection on the
    /// interpolant. Requires a sign change of `g` across the step; returns
    /// the root position and state to absolute resolution `rtol_r` in `r`.
    pub fn locate_root<G>(&self, g: G, rtol_r: f64) -> Option<(f64, [f64; N])>
    where
        G: Fn(f64, &[f64; N]) -> f64,
    {
        let mut a = self.r0;
        let mut b = self.r1;
        let mut ga = g(a, &self.y0);
        let gb = g(b, &self.y1);
        if ga == 0.0 {
            return Some((a, self.y0));
        }
        if gb == 0.0 {
            return Some((b, self.y1));
        }
        if ga.signum() == gb.signum() {
            return None;
        }
        while (b - a).abs() > rtol_r {
            let m = 0.5 * (a + b);
            let ym = self.eval(m);
            let gm = g(m, &ym);
            if gm == 0.0 {
                return Some((m, ym));
            }
            if gm.signum() == ga.signum() {
                a = m;
                ga = gm;
            } else {
                b = m;
            }
        }
        let root = 0.5 * (a + b);
        Some((root, self.eval(root)))
    }
}

/// Dormand–Prince 5(4) driver parameters.
#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Upper bound on |step|; 0 disables the bound.
    pub max_step: f64,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
            max_steps: 1_000_000,
            max_step: 0.0,
        }
    }
}

impl Dopri5 {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            ..Self::default()
        }
    }

    /// Integrate from `(r0, y0)` to `r_end`, invoking `observer` on every
    /// accepted step. The observer may stop the run early.
    pub fn solve<S, F, const N: usize>(
        &self,
        sys: &S,
        r0: f64,
        y0: [f64; N],
        r_end: f64,
        mut observer: F,
    ) -> Result<(f64, [f64; N]), OdeError>
    where
        S: OdeSystem<N>,
        F: FnMut(&DenseStep<N>) -> Control,
    {
        if r0 == r_end {
            return Ok((r0, y0));
        }
        let dir = (r_end - r0).signum();
        let mut r = r0;
        let mut y = y0;
        let mut k1 = sys.rhs(r, &y);
        let mut h = self.initial_step(sys, r, &y, &k1, dir, r_end);
        let mut accepted = 0_usize;

        loop {
            if accepted >= self.max_steps {
                return Err(OdeError::MaxSteps {
                    r,
                    max_steps: self.max_steps,
                });
            }
            if self.max_step > 0.0 {
                h = h.clamp(-self.max_step, self.max_step);
            }
            // Clamp the final step onto r_end.
            if dir * (r + h - r_end) > 0.0 {
                h = r_end - r;
            }
            if h.abs() < 1e-14 * r.abs().max(1.0) {
                return Err(OdeError::StepUnderflow { r, h });
            }

            let (y1, k) = self.stages(sys, r, &y, h, &k1);
            let err = self.error_norm(&y, &y1, h, &k);

            if err <= 1.0 {
                // Accept.
                let k_new = sys.rhs(r + h, &y1);
                let step = build_dense(r, r + h, &y, &y1, h, &k, &k_new);
                accepted += 1;
                let r1 = r + h;
                r = r1;
                y = y1;
                k1 = k_new;
                if observer(&step) == Control::Stop {
                    return Ok((r, y));
                }
                if dir * (r - r_end) >= 0.0 {
                    return Ok((r, y));
                }
                let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
                h *= fac;
            } else {
                let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
                h *= fac;
            }
        }
    }

    /// All seven stages; returns the fifth-order solution and the stage
    /// derivatives (k7 is the FSAL slot, recomputed by the caller on accept).
    fn stages<S, const N: usize>(
        &self,
        sys: &S,
        r: f64,
        y: &[f64; N],
        h: f64,
        k1: &[f64; N],
    ) -> ([f64; N], [[f64; N]; 7])
    where
        S: OdeSystem<N>,
    {
        let mut k = [[0.0_f64; N]; 7];
        k[0] = *k1;
        let mut stage = [0.0_f64; N];
        for i in 0..N {
            stage[i] = y[i] + h * (0.2 * k[0][i]);
        }
        k[1] = sys.rhs(r + h / 5.0, &stage);
        for i in 0..N {
            stage[i] = y[i] + h * (3.0 / 40.0 * k[0][i] + 9.0 / 40.0 * k[1][i]);
        }
        k[2] = sys.rhs(r + 3.0 * h / 10.0, &stage);
        for i in 0..N {
            stage[i] =
                y[i] + h * (44.0 / 45.0 * k[0][i] - 56.0 / 15.0 * k[1][i] + 32.0 / 9.0 * k[2][i]);
        }
        k[3] = sys.rhs(r + 4.0 * h / 5.0, &stage);
        for i in 0..N {
            stage[i] = y[i]
                + h * (19372.0 / 6561.0 * k[0][i] - 25360.0 / 2187.0 * k[1][i]
                    + 64448.0 / 6561.0 * k[2][i]
                    - 212.0 / 729.0 * k[3][i]);
        }
        k[4] = sys.rhs(r + 8.0 * h / 9.0, &stage);
        for i in 0..N {
            stage[i] = y[i]
                + h * (9017.0 / 3168.0 * k[0][i] - 355.0 / 33.0 * k[1][i]
                    + 46732.0 / 5247.0 * k[2][i]
                    + 49.0 / 176.0 * k[3][i]
                    - 5103.0 / 18656.0 * k[4][i]);
        }
        k[5] = sys.rhs(r + h, &stage);
        for i in 0..N {
            stage[i] = y[i]
                + h * (35.0 / 384.0 * k[0][i] + 500.0 / 1113.0 * k[2][i] + 125.0 / 192.0 * k[3][i]
                    - 2187.0 / 6784.0 * k[4][i]
                    + 11.0 / 84.0 * k[5][i]);
        }
        k[6] = sys.rhs(r + h, &stage);
        (stage, k)
    }

    fn error_norm<const N: usize>(
        &self,
        y0: &[f64; N],
        y1: &[f64; N],
        h: f64,
        k: &[[f64; N]; 7],
    ) -> f64 {
        const E: [f64; 7] = [
            71.0 / 57600.0,
            0.0,
            -71.0 / 16695.0,
            71.0 / 1920.0,
            -17253.0 / 339200.0,
            22.0 / 525.0,
            -1.0 / 40.0,
        ];
        let mut acc = 0.0;
        for i in 0..N {
            let mut e = 0.0;
            for (j, ej) in E.iter().enumerate() {
                e += ej * k[j][i];
            }
            e *= h;
            let sk = self.atol + self.rtol * y0[i].abs().max(y1[i].abs());
            acc += (e / sk) * (e / sk);
        }
        (acc / N as f64).sqrt()
    }

    fn initial_step<S, const N: usize>(
        &self,
        sys: &S,
        r: f64,
        y: &[f64; N],
        k1: &[f64; N],
        dir: f64,
        r_end: f64,
    ) -> f64
    where
        S: OdeSystem<N>,
    {
        let span = (r_end - r).abs();
        let sk: Vec<f64> = y
            .iter()
            .map(|yi| self.atol + self.rtol * yi.abs())
            .collect();
        let d0 = rms(y, &sk);
        let d1 = rms(k1, &sk);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        let h0 = h0.min(span);
        // One explicit Euler probe to estimate the second derivative.
        let mut y_probe = *y;
        for i in 0..N {
            y_probe[i] += dir * h0 * k1[i];
        }
        let k2 = sys.rhs(r + dir * h0, &y_probe);
        let mut diff = [0.0_f64; N];
        for i in 0..N {
            diff[i] = k2[i] - k1[i];
        }
        let d2 = rms(&diff, &sk) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        dir * h1.min(100.0 * h0).min(span)
    }
}

fn rms<const N: usize>(v: &[f64; N], sk: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        acc += (v[i] / sk[i]) * (v[i] / sk[i]);
    }
    (acc / N as f64).sqrt()
}

fn build_dense<const N: usize>(
    r0: f64,
    r1: f64,
    y0: &[f64; N],
    y1: &[f64; N],
    h: f64,
    k: &[[f64; N]; 7],
    k_new: &[f64; N],
) -> DenseStep<N> {
    const D: [f64; 7] = [
        -12715105075.0 / 11282082432.0,
        0.0,
        87487479700.0 / 32700410799.0,
        -10690763975.0 / 1880347072.0,
        701980252875.0 / 199316789632.0,
        -1453857185.0 / 822651844.0,
        69997945.0 / 29380423.0,
    ];
    let mut cont = [[0.0_f64; N]; 5];
    for i in 0..N {
        let ydiff = y1[i] - y0[i];
        let bspl = h * k[0][i] - ydiff;
        cont[0][i] = y0[i];
        cont[1][i] = ydiff;
        cont[2][i] = bspl;
        cont[3][i] = ydiff - h * k_new[i] - bspl;
        let mut d = 0.0;
        for (j, dj) in D.iter().enumerate().take(6) {
            d += dj * k[j][i];
        }
        d += D[6] * k_new[i];
        cont[4][i] = h * d;
    }
    DenseStep {
        r0,
        r1,
        y0: *y0,
        y1: *y1,
        cont,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // y'' = -y as a 2-system; exact solution (cos r, -sin r) from (1, 0).
    fn sho(_r: f64, y: &[f64; 2]) -> [f64; 2] {
        [y[1], -y[0]]
    }

    #[test]
    fn harmonic_oscillator_full_period() {
        let solver = Dopri5::with_tol(1e-10);
        let (r, y) = solver
            .solve(&sho, 0.0, [1.0, 0.0], 2.0 * std::f64::consts::PI, |_| {
                Control::Continue
            })
            .unwrap();
        assert!((r - 2.0 * std::f64::consts::PI).abs() < 1e-14);
        assert!((y[0] - 1.0).abs() < 1e-8, "y0 = {}", y[0]);
        assert!(y[1].abs() < 1e-8);
    }

    #[test]
    fn backward_integration() {
        let solver = Dopri5::with_tol(1e-10);
        let (_, y) = solver
            .solve(&sho, 0.0, [1.0, 0.0], -std::f64::consts::PI, |_| {
                Control::Continue
            })
            .unwrap();
        assert!((y[0] + 1.0).abs() < 1e-8);
    }

    #[test]
    fn dense_output_accuracy() {
        let solver = Dopri5::with_tol(1e-10);
        let mut worst: f64 = 0.0;
        solver
            .solve(&sho, 0.0, [1.0, 0.0], 3.0, |step| {
                for j in 0..=10 {
                    let r = step.r0 + (step.r1 - step.r0) * j as f64 / 10.0;
                    let y = step.eval(r);
                    worst = worst.max((y[0] - r.cos()).abs());
                }
                Control::Continue
            })
            .unwrap();
        assert!(worst < 1e-9, "dense output error {worst:.3e}");
    }

    #[test]
    fn root_location_on_segment() {
        // y = cos r crosses zero at pi/2.
        let solver = Dopri5::with_tol(1e-12);
        let mut found = None;
        solver
            .solve(&sho, 0.0, [1.0, 0.0], 3.0, |step| {
                if let Some((r, y)) = step.locate_root(|_, y| y[0], 1e-13) {
                    found = Some((r, y));
                    return Control::Stop;
                }
                Control::Continue
            })
            .unwrap();
        let (r, _) = found.expect("root not found");
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-11, "r = {r}");
    }

    #[test]
    fn observer_stop_halts_early() {
        let solver = Dopri5::with_tol(1e-8);
        let (r, _) = solver
            .solve(&sho, 0.0, [1.0, 0.0], 100.0, |step| {
                if step.r1 > 1.0 {
                    Control::Stop
                } else {
                    Control::Continue
                }
            })
            .unwrap();
        assert!(r < 100.0);
    }
}
