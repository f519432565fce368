//! Complex-to-complex FFT used by the spectral Hamiltonian and the split-step
//! propagator.
//!
//! Power-of-two lengths run on an iterative radix-2 kernel; every other
//! length is handled by Bluestein's chirp-z reduction to a padded
//! power-of-two convolution, so callers never need to care about the grid
//! size. Forward transforms are unnormalised, `inverse` divides by the
//! length.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::C64;

/// Precomputed transform plan for a fixed length.
#[derive(Debug, Clone)]
pub struct FftPlan {
    len: usize,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    /// Radix-2 plan: bit-reversal table plus twiddles `exp(-2*pi*i*j/n)`,
    /// `j < n/2`.
    Pow2 {
        bitrev: Vec<u32>,
        twiddles: Vec<C64>,
    },
    /// Bluestein plan of inner power-of-two length `m >= 2*len - 1`.
    Bluestein {
        inner: alloc::boxed::Box<FftPlan>,
        /// `exp(-i*pi*j^2/n)` for `j < n`.
        chirp: Vec<C64>,
        /// Forward transform of the circularly wrapped conjugate chirp.
        kernel: Vec<C64>,
    },
}

impl FftPlan {
    /// Plans a transform of length `len` (`len >= 1`).
    pub fn new(len: usize) -> FftPlan {
        assert!(len >= 1, "FFT length must be positive");
        if len.is_power_of_two() {
            let bits = len.trailing_zeros();
            let bitrev = (0..len as u32)
                .map(|i| i.reverse_bits() >> (32 - bits.max(1)))
                .collect::<Vec<_>>();
            let twiddles = (0..len / 2)
                .map(|j| math::cis(-2.0 * core::f64::consts::PI * j as f64 / len as f64))
                .collect();
            FftPlan {
                len,
                kind: Kind::Pow2 { bitrev, twiddles },
            }
        } else {
            let m = (2 * len - 1).next_power_of_two();
            let inner = FftPlan::new(m);
            // j^2 mod 2n keeps the chirp argument exact for large j
            let chirp: Vec<C64> = (0..len)
                .map(|j| {
                    let j2 = (j as u64 * j as u64) % (2 * len as u64);
                    math::cis(-core::f64::consts::PI * j2 as f64 / len as f64)
                })
                .collect();
            let mut kernel = vec![C64::new(0.0, 0.0); m];
            for j in 0..len {
                let b = chirp[j].conj();
                kernel[j] = b;
                if j > 0 {
                    kernel[m - j] = b;
                }
            }
            inner.forward(&mut kernel);
            FftPlan {
                len,
                kind: Kind::Bluestein {
                    inner: alloc::boxed::Box::new(inner),
                    chirp,
                    kernel,
                },
            }
        }
    }

    /// Transform length this plan was built for.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// In-place forward DFT: `X_k = sum_j x_j exp(-2*pi*i*j*k/n)`.
    pub fn forward(&self, data: &mut [C64]) {
        assert_eq!(data.len(), self.len, "buffer length mismatch");
        match &self.kind {
            Kind::Pow2 { bitrev, twiddles } => {
                let n = self.len;
                if n == 1 {
                    return;
                }
                for (i, &r) in bitrev.iter().enumerate() {
                    let r = r as usize;
                    if i < r {
                        data.swap(i, r);
                    }
                }
                let mut block = 2;
                while block <= n {
                    let half = block / 2;
                    let stride = n / block;
                    for base in (0..n).step_by(block) {
                        for j in 0..half {
                            let w = twiddles[j * stride];
                            let t = w * data[base + half + j];
                            let u = data[base + j];
                            data[base + j] = u + t;
                            data[base + half + j] = u - t;
                        }
                    }
                    block <<= 1;
                }
            }
            Kind::Bluestein {
                inner,
                chirp,
                kernel,
            } => {
                let m = inner.len();
                let mut buf = vec![C64::new(0.0, 0.0); m];
                for j in 0..self.len {
                    buf[j] = data[j] * chirp[j];
                }
                inner.forward(&mut buf);
                for (b, k) in buf.iter_mut().zip(kernel.iter()) {
                    *b *= *k;
                }
                inner.inverse(&mut buf);
                for k in 0..self.len {
                    data[k] = buf[k] * chirp[k];
                }
            }
        }
    }

    /// In-place inverse DFT: `x_j = (1/n) sum_k X_k exp(+2*pi*i*j*k/n)`.
    pub fn inverse(&self, data: &mut [C64]) {
        for v in data.iter_mut() {
            *v = v.conj();
        }
        self.forward(data);
        let scale = 1.0 / self.len as f64;
        for v in data.iter_mut() {
            *v = v.conj() * scale;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn naive_dft(x: &[C64]) -> Vec<C64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|j| {
                        x[j] * math::cis(-2.0 * core::f64::consts::PI * (j * k % n) as f64 / n as f64)
                    })
                    .sum()
            })
            .collect()
    }

    fn test_signal(n: usize) -> Vec<C64> {
        (0..n)
            .map(|j| {
                let t = j as f64;
                C64::new(
                    math::sin(0.7 * t) + 0.3 * math::cos(2.1 * t),
                    0.2 * math::cos(1.3 * t + 0.4),
                )
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft_for_assorted_lengths() {
        for n in [1usize, 2, 3, 4, 5, 8, 16, 27, 64, 96, 100, 257] {
            let x = test_signal(n);
            let expected = naive_dft(&x);
            let plan = FftPlan::new(n);
            let mut got = x.clone();
            plan.forward(&mut got);
            for (g, e) in got.iter().zip(expected.iter()) {
                assert_abs_diff_eq!(g.re, e.re, epsilon = 1e-9 * (n as f64).max(1.0));
                assert_abs_diff_eq!(g.im, e.im, epsilon = 1e-9 * (n as f64).max(1.0));
            }
        }
    }

    #[test]
    fn inverse_normalisation() {
        let plan = FftPlan::new(8);
        let mut x = vec![C64::new(1.0, 0.0); 8];
        plan.forward(&mut x);
        assert_abs_diff_eq!(x[0].re, 8.0, epsilon = 1e-12);
        plan.inverse(&mut x);
        for v in &x {
            assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn round_trip_and_parseval(
            n in 1usize..200,
            seed in any::<u64>(),
        ) {
            let mut state = seed | 1;
            let mut next = || {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state as f64 / u64::MAX as f64) - 0.5
            };
            let x: Vec<C64> = (0..n).map(|_| C64::new(next(), next())).collect();
            let plan = FftPlan::new(n);
            let mut y = x.clone();
            plan.forward(&mut y);

            let power_x: f64 = x.iter().map(|v| v.norm_sqr()).sum();
            let power_y: f64 = y.iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64;
            prop_assert!((power_x - power_y).abs() <= 1e-9 * power_x.max(1.0));

            plan.inverse(&mut y);
            for (a, b) in x.iter().zip(y.iter()) {
                prop_assert!((a - b).norm() <= 1e-9);
            }
        }
    }
}
