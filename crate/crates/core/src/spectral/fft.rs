//! Multi-dimensional complex FFTs on square power-of-two (or 3/2-padded)
//! grids. Plans are cached per thread, so concurrent workers never share
//! mutable planner state.

use std::cell::RefCell;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(len, direction))
}

/// Unnormalized in-place transform of a `side^dim` array with axis 0 fastest.
pub(crate) fn transform_in_place(
    data: &mut [Complex64],
    side: usize,
    dim: usize,
    direction: FftDirection,
) {
    debug_assert_eq!(data.len(), side.pow(dim as u32));
    let fft = plan(side, direction);
    // Rows (axis 0) are contiguous.
    fft.process(data);
    if dim == 2 {
        let mut column = vec![Complex64::new(0.0, 0.0); side];
        for ix in 0..side {
            for iy in 0..side {
                column[iy] = data[iy * side + ix];
            }
            fft.process(&mut column);
            for iy in 0..side {
                data[iy * side + ix] = column[iy];
            }
        }
    }
}

pub(crate) fn forward(data: &mut [Complex64], side: usize, dim: usize) {
    transform_in_place(data, side, dim, FftDirection::Forward);
}

pub(crate) fn inverse(data: &mut [Complex64], side: usize, dim: usize) {
    transform_in_place(data, side, dim, FftDirection::Inverse);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_d_round_trip() {
        let side = 16;
        let orig: Vec<Complex64> = (0..side * side)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut data = orig.clone();
        forward(&mut data, side, 2);
        inverse(&mut data, side, 2);
        let scale = 1.0 / (side * side) as f64;
        for (a, b) in data.iter().zip(&orig) {
            assert!((a * scale - b).norm() < 1e-13);
        }
    }
}
