//! Thin wrapper over `rustfft` with per-thread plan caching.
//!
//! `forward` is the unnormalised DFT `F_k = sum_j f_j e^{-2 pi i jk/n}`;
//! `inverse` includes the `1/n` factor so that `inverse(forward(f)) = f`.

use std::cell::RefCell;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub fn forward_in_place(data: &mut [Complex64]) {
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(data.len()));
    plan.process(data);
}

pub fn inverse_in_place(data: &mut [Complex64]) {
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(data.len()));
    plan.process(data);
    let scale = 1.0 / data.len() as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
}

pub fn forward(data: &[Complex64]) -> Vec<Complex64> {
    let mut out = data.to_vec();
    forward_in_place(&mut out);
    out
}

pub fn inverse(data: &[Complex64]) -> Vec<Complex64> {
    let mut out = data.to_vec();
    inverse_in_place(&mut out);
    out
}
