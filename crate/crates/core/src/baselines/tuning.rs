//! Default tunings of the non-stationary baselines, derived from the horizon
//! `T`, the number of breakpoints `Γ` and (for Gaussian arms) the largest σ.

use crate::envs::{EnvironmentSpec, Family};

/// Rounds to the nearest integer with ties going down.
pub fn round_half_down(x: f64) -> u64 {
    (x - 0.5).ceil().max(0.0) as u64
}

/// `2√(T ln T / Γ)` in reals, times `1 + 2σ` when `adapted`.
pub fn sliding_window_real(horizon: u64, breakpoints: usize, adapted_sigma: Option<f64>) -> f64 {
    let t = horizon as f64;
    let c = adapted_sigma.map_or(1.0, |s| 1.0 + 2.0 * s);
    2.0 * c * (t * t.ln() / breakpoints as f64).sqrt()
}

/// Default window length. Without breakpoints the window is the whole
/// horizon. Never shorter than the number of arms.
pub fn sliding_window(env: &EnvironmentSpec, gaussian_adapted: bool) -> u64 {
    let gamma = env.num_breakpoints();
    if gamma == 0 {
        return env.horizon().max(env.num_arms() as u64);
    }
    let sigma = gaussian_adapted.then(|| env.max_scale());
    round_half_down(sliding_window_real(env.horizon(), gamma, sigma))
        .max(env.num_arms() as u64)
        .min(env.horizon().max(env.num_arms() as u64))
}

/// Effective memory `1/(1-γ) = 4√(T/Γ)` (times `1 + 2σ` when adapted),
/// rounded; `Γ = 0` is treated as one breakpoint.
pub fn discount_horizon(env: &EnvironmentSpec, gaussian_adapted: bool) -> u64 {
    let t = env.horizon() as f64;
    let g = env.num_breakpoints().max(1) as f64;
    let c = if gaussian_adapted { 1.0 + 2.0 * env.max_scale() } else { 1.0 };
    round_half_down(4.0 * c * (t / g).sqrt()).max(2)
}

pub fn discount(env: &EnvironmentSpec, gaussian_adapted: bool) -> f64 {
    1.0 - 1.0 / discount_horizon(env, gaussian_adapted) as f64
}

/// EXP3S `(α, γ) = (1/T, min(1, √(K(e + Γ ln(KT)) / ((e-1)T))))`.
pub fn exp3s_parameters(env: &EnvironmentSpec) -> (f64, f64) {
    exp3s_parameters_for(env.num_arms(), env.horizon(), env.num_breakpoints())
}

pub fn exp3s_parameters_for(num_arms: usize, horizon: u64, breakpoints: usize) -> (f64, f64) {
    let (k, t, g) = (num_arms as f64, horizon as f64, breakpoints as f64);
    let e = std::f64::consts::E;
    let gamma = (k * (e + g * (k * t).ln()) / ((e - 1.0) * t)).sqrt().min(1.0);
    (1.0 / t, gamma)
}

/// Reward range `B` of the UCB-type baselines: 1, or `1 + 2σ` for Gaussian
/// arms (most rewards fall below it).
pub fn reward_bound(env: &EnvironmentSpec) -> f64 {
    match env.family() {
        Family::Gaussian => 1.0 + 2.0 * env.max_scale(),
        _ => 1.0,
    }
}
