//! Classical fixed-step fourth-order Runge–Kutta.

use crate::matrix::ComplexMatrix;

/// A state that RK4 can combine linearly.
pub trait RkState: Clone {
    /// `self + h·k`
    fn add_scaled(&self, k: &Self, h: f64) -> Self;
}

impl RkState for ComplexMatrix {
    fn add_scaled(&self, k: &Self, h: f64) -> Self {
        ComplexMatrix::add_scaled(self, k, h)
    }
}

impl RkState for (ComplexMatrix, ComplexMatrix) {
    fn add_scaled(&self, k: &Self, h: f64) -> Self {
        (self.0.add_scaled(&k.0, h), self.1.add_scaled(&k.1, h))
    }
}

/// One step of size `dt` for the autonomous system `y' = f(y)`.
pub fn rk4_step<S: RkState>(y: &S, dt: f64, f: impl Fn(&S) -> S) -> S {
    let k1 = f(y);
    let k2 = f(&y.add_scaled(&k1, 0.5 * dt));
    let k3 = f(&y.add_scaled(&k2, 0.5 * dt));
    let k4 = f(&y.add_scaled(&k3, dt));
    y.add_scaled(&k1, dt / 6.0)
        .add_scaled(&k2, dt / 3.0)
        .add_scaled(&k3, dt / 3.0)
        .add_scaled(&k4, dt / 6.0)
}

/// Step sizes covering `[0, t_final]`: whole steps of `dt` plus a shorter
/// closing step when `t_final` is not a multiple of `dt`.
pub fn step_schedule(t_final: f64, dt: f64) -> Vec<f64> {
    let whole = (t_final / dt + 1e-9).floor() as usize;
    let mut steps = vec![dt; whole];
    let rest = t_final - whole as f64 * dt;
    if rest > 1e-12 * t_final.max(1.0) {
        steps.push(rest);
    }
    steps
}
