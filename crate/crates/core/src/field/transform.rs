//! FFT kernels behind the field transforms.
//!
//! Horizontal directions use complex FFTs normalized so that coefficients
//! are Fourier amplitudes. The vertical direction uses type-I cosine/sine
//! transforms computed as length `2(nz-1)` FFTs of the even/odd extension.

use std::sync::Arc;

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::sync::Mutex;

use super::{Grid, Parity};

static PLANNER: Lazy<Mutex<FftPlanner<f64>>> = Lazy::new(|| Mutex::new(FftPlanner::new()));

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    let mut planner = PLANNER.lock().expect("fft planner poisoned");
    planner.plan_fft(len, direction)
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// In-place horizontal transform of every z-slice.
pub(crate) fn horizontal(data: &mut [Complex64], grid: Grid, direction: FftDirection) {
    let (nx, ny, nz) = (grid.nx, grid.ny, grid.nz);
    let fft_y = plan(ny, direction);
    let fft_x = plan(nx, direction);
    let scale = match direction {
        FftDirection::Forward => 1.0 / (nx * ny) as f64,
        FftDirection::Inverse => 1.0,
    };

    let planes: Vec<Vec<Complex64>> = (0..nz)
        .into_par_iter()
        .map(|k| {
            // rows along y are contiguous in `plane`
            let mut plane = vec![ZERO; nx * ny];
            for ix in 0..nx {
                for iy in 0..ny {
                    plane[ix * ny + iy] = data[grid.idx(ix, iy, k)];
                }
            }
            fft_y.process(&mut plane);
            let mut transposed = vec![ZERO; nx * ny];
            for ix in 0..nx {
                for iy in 0..ny {
                    transposed[iy * nx + ix] = plane[ix * ny + iy];
                }
            }
            fft_x.process(&mut transposed);
            for ix in 0..nx {
                for iy in 0..ny {
                    plane[ix * ny + iy] = transposed[iy * nx + ix] * scale;
                }
            }
            plane
        })
        .collect();

    for (k, plane) in planes.iter().enumerate() {
        for ix in 0..nx {
            for iy in 0..ny {
                data[grid.idx(ix, iy, k)] = plane[ix * ny + iy];
            }
        }
    }
}

/// Samples at the collocation nodes to vertical coefficients, per column.
pub(crate) fn vertical_forward(data: &mut [Complex64], grid: Grid, parity: Parity) {
    let top = grid.top_mode();
    let fft = plan(2 * top, FftDirection::Forward);
    data.par_chunks_mut(grid.nz).for_each_init(
        || vec![ZERO; 2 * top],
        |ext, column| {
            // z-independent columns map exactly onto the mean mode
            if parity == Parity::EvenZ && column.iter().all(|&c| c == column[0]) {
                column[1..].fill(ZERO);
                return;
            }
            match parity {
                Parity::EvenZ => {
                    ext[..=top].copy_from_slice(&column[..=top]);
                    for j in 1..top {
                        ext[2 * top - j] = column[j];
                    }
                }
                Parity::OddZ => {
                    ext[0] = ZERO;
                    ext[top] = ZERO;
                    for j in 1..top {
                        ext[j] = column[j];
                        ext[2 * top - j] = -column[j];
                    }
                }
            }
            fft.process(ext);
            let n = top as f64;
            match parity {
                Parity::EvenZ => {
                    column[0] = ext[0] / (2.0 * n);
                    for m in 1..top {
                        column[m] = ext[m] / n;
                    }
                    column[top] = ext[top] / (2.0 * n);
                }
                Parity::OddZ => {
                    column[0] = ZERO;
                    for m in 1..top {
                        // b_m = i G_m / N
                        column[m] = Complex64::new(-ext[m].im, ext[m].re) / n;
                    }
                    column[top] = ZERO;
                }
            }
        },
    );
}

/// Vertical coefficients to samples at the collocation nodes, per column.
pub(crate) fn vertical_inverse(data: &mut [Complex64], grid: Grid, parity: Parity) {
    let top = grid.top_mode();
    let fft = plan(2 * top, FftDirection::Inverse);
    data.par_chunks_mut(grid.nz).for_each_init(
        || vec![ZERO; 2 * top],
        |ext, column| {
            if parity == Parity::EvenZ && column[1..].iter().all(|&c| c == ZERO) {
                let mean = column[0];
                column.fill(mean);
                return;
            }
            ext.fill(ZERO);
            match parity {
                Parity::EvenZ => {
                    ext[0] = column[0];
                    ext[top] = column[top];
                    for m in 1..top {
                        let half = column[m] * 0.5;
                        ext[m] = half;
                        ext[2 * top - m] = half;
                    }
                }
                Parity::OddZ => {
                    for m in 1..top {
                        // b/(2i) at +m, -b/(2i) at -m
                        let b = column[m];
                        let h = Complex64::new(0.5 * b.im, -0.5 * b.re);
                        ext[m] = h;
                        ext[2 * top - m] = -h;
                    }
                }
            }
            fft.process(ext);
            column[..=top].copy_from_slice(&ext[..=top]);
            if parity == Parity::OddZ {
                column[0] = ZERO;
                column[top] = ZERO;
            }
        },
    );
}

/// 2D transform of a single plane stored row-major `(ix, iy)`.
pub(crate) fn planar(data: &mut [Complex64], nx: usize, ny: usize, direction: FftDirection) {
    let fft_y = plan(ny, direction);
    let fft_x = plan(nx, direction);
    fft_y.process(data);
    let mut transposed = vec![ZERO; nx * ny];
    for ix in 0..nx {
        for iy in 0..ny {
            transposed[iy * nx + ix] = data[ix * ny + iy];
        }
    }
    fft_x.process(&mut transposed);
    let scale = match direction {
        FftDirection::Forward => 1.0 / (nx * ny) as f64,
        FftDirection::Inverse => 1.0,
    };
    for ix in 0..nx {
        for iy in 0..ny {
            data[ix * ny + iy] = transposed[iy * nx + ix] * scale;
        }
    }
}
