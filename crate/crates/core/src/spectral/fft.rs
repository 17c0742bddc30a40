use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    Forward,
    Inverse,
}

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plans(m: usize) -> Arc<Plans> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("fft plan cache poisoned");
    map.entry(m)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                forward: planner.plan_fft_forward(m),
                inverse: planner.plan_fft_inverse(m),
            })
        })
        .clone()
}

const BATCH: usize = 32;

/// Unnormalized in-place transform of a row-major `m^d` array along every axis.
pub(crate) fn fft_nd(data: &mut [Complex64], m: usize, d: usize, dir: Direction) {
    debug_assert_eq!(data.len(), m.pow(d as u32));
    let p = plans(m);
    let fft = match dir {
        Direction::Forward => &p.forward,
        Direction::Inverse => &p.inverse,
    };
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let mut buf = vec![Complex64::default(); m * BATCH];
    for axis in 0..d {
        let stride = m.pow((d - 1 - axis) as u32);
        if stride == 1 {
            fft.process_with_scratch(data, &mut scratch);
            continue;
        }
        for block in data.chunks_mut(m * stride) {
            let mut j0 = 0;
            while j0 < stride {
                let w = BATCH.min(stride - j0);
                for i in 0..m {
                    let row = &block[i * stride + j0..i * stride + j0 + w];
                    for (c, v) in row.iter().enumerate() {
                        buf[c * m + i] = *v;
                    }
                }
                fft.process_with_scratch(&mut buf[..w * m], &mut scratch);
                for i in 0..m {
                    let row = &mut block[i * stride + j0..i * stride + j0 + w];
                    for (c, v) in row.iter_mut().enumerate() {
                        *v = buf[c * m + i];
                    }
                }
                j0 += w;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_dft_2d() {
        let m = 6;
        let data: Vec<Complex64> = (0..m * m)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut out = data.clone();
        fft_nd(&mut out, m, 2, Direction::Forward);
        let tau = 2.0 * std::f64::consts::PI / m as f64;
        for k0 in 0..m {
            for k1 in 0..m {
                let mut acc = Complex64::default();
                for x0 in 0..m {
                    for x1 in 0..m {
                        let ph = -tau * ((k0 * x0 + k1 * x1) as f64);
                        acc += data[x0 * m + x1] * Complex64::from_polar(1.0, ph);
                    }
                }
                assert!((acc - out[k0 * m + k1]).norm() < 1e-10);
            }
        }
        fft_nd(&mut out, m, 2, Direction::Inverse);
        for (a, b) in out.iter().zip(&data) {
            assert!((a / (m * m) as f64 - b).norm() < 1e-12);
        }
    }
}
