//! Internal 1-D FFT plans: iterative radix-2 for power-of-two lengths and
//! Bluestein's chirp-z algorithm for everything else, giving `O(N log N)`
//! transforms at any size.
//!
//! Transforms are unnormalized: `forward` computes
//! `X[k] = Σ_j x[j]·e^{−2πi jk/N}` and `inverse` the conjugate-sign sum.
//! Root tables are built half-length and mirrored by conjugation, so the
//! exact relation `w^{N−k} = conj(w^k)` holds bit-for-bit; this keeps the
//! Hermitian symmetry of real-input transforms at the rounding floor.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use crate::grid::GridSpec;
use crate::math;

/// Unit roots `e^{−2πi j/n}` for `j < n`, with exact conjugate mirroring.
fn root_table(n: usize) -> Vec<Complex64> {
    let mut roots = vec![Complex64::new(1.0, 0.0); n];
    for (j, r) in roots.iter_mut().enumerate().take(n / 2 + 1) {
        let angle = -2.0 * PI * (j as f64) / (n as f64);
        *r = Complex64::new(math::cos(angle), math::sin(angle));
    }
    if n % 2 == 0 {
        roots[n / 2] = Complex64::new(-1.0, 0.0);
    }
    if n % 4 == 0 {
        roots[n / 4] = Complex64::new(0.0, -1.0);
    }
    for j in (n / 2 + 1)..n {
        roots[j] = roots[n - j].conj();
    }
    roots
}

enum Algo {
    Identity,
    Radix2 {
        roots: Vec<Complex64>,
    },
    Bluestein {
        /// `e^{−iπ j²/n}`, j < n.
        chirp: Vec<Complex64>,
        /// FFT of the circular chirp kernel, length `l`.
        kernel_hat: Vec<Complex64>,
        inner: Box<Fft1d>,
        l: usize,
    },
}

/// A reusable 1-D transform plan of fixed length.
pub(crate) struct Fft1d {
    n: usize,
    algo: Algo,
}

impl Fft1d {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let algo = if n == 1 {
            Algo::Identity
        } else if n.is_power_of_two() {
            Algo::Radix2 { roots: root_table(n) }
        } else {
            // Bluestein: DFT of length n as a circular convolution of
            // length l = next power of two >= 2n-1.
            let l = (2 * n - 1).next_power_of_two();
            let mut chirp = Vec::with_capacity(n);
            for j in 0..n {
                // j² mod 2n keeps the angle argument small and exact.
                let q = (j * j) % (2 * n);
                let angle = -PI * (q as f64) / (n as f64);
                chirp.push(Complex64::new(math::cos(angle), math::sin(angle)));
            }
            let inner = Box::new(Fft1d::new(l));
            let mut kernel = vec![Complex64::new(0.0, 0.0); l];
            kernel[0] = chirp[0].conj();
            for j in 1..n {
                kernel[j] = chirp[j].conj();
                kernel[l - j] = chirp[j].conj();
            }
            inner.forward(&mut kernel);
            Algo::Bluestein { chirp, kernel_hat: kernel, inner, l }
        };
        Self { n, algo }
    }

    /// In-place unnormalized forward transform (sign `e^{−2πi}`).
    pub fn forward(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n);
        match &self.algo {
            Algo::Identity => {}
            Algo::Radix2 { roots } => radix2_forward(buf, roots),
            Algo::Bluestein { chirp, kernel_hat, inner, l } => {
                let n = self.n;
                let mut work = vec![Complex64::new(0.0, 0.0); *l];
                for j in 0..n {
                    work[j] = buf[j] * chirp[j];
                }
                inner.forward(&mut work);
                for (w, k) in work.iter_mut().zip(kernel_hat.iter()) {
                    *w *= k;
                }
                inner.inverse(&mut work);
                let scale = 1.0 / (*l as f64);
                for k in 0..n {
                    buf[k] = work[k] * chirp[k] * scale;
                }
            }
        }
    }

    /// In-place unnormalized inverse transform (sign `e^{+2πi}`), via
    /// conjugation around the forward pass.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        for z in buf.iter_mut() {
            *z = z.conj();
        }
        self.forward(buf);
        for z in buf.iter_mut() {
            *z = z.conj();
        }
    }
}

fn radix2_forward(buf: &mut [Complex64], roots: &[Complex64]) {
    let n = buf.len();
    let log_n = n.trailing_zeros();

    // Bit-reversal permutation.
    for i in 0..n {
        let j = (i.reverse_bits() >> (usize::BITS - log_n)) as usize;
        if j > i {
            buf.swap(i, j);
        }
    }

    let mut m = 2;
    while m <= n {
        let half = m / 2;
        let step = n / m;
        for k in 0..half {
            let w = roots[k * step];
            let mut j = 0;
            while j < n {
                let a = buf[j + k];
                let t = w * buf[j + k + half];
                buf[j + k] = a + t;
                buf[j + k + half] = a - t;
                j += m;
            }
        }
        m *= 2;
    }
}

/// Apply the 1-D plan along every axis of a row-major (last axis fastest)
/// `N^d` array, in place.
pub(crate) fn transform_axes(data: &mut [Complex64], spec: &GridSpec, inverse: bool) {
    let n = spec.n();
    let d = spec.d();
    debug_assert_eq!(data.len(), spec.len());
    let plan = Fft1d::new(n);
    let mut line = vec![Complex64::new(0.0, 0.0); n];

    for axis in 0..d {
        let stride = spec.stride(axis);
        if stride == 1 {
            for chunk in data.chunks_exact_mut(n) {
                if inverse {
                    plan.inverse(chunk);
                } else {
                    plan.forward(chunk);
                }
            }
        } else {
            let block = n * stride;
            let outer = spec.len() / block;
            for o in 0..outer {
                for inner in 0..stride {
                    let base = o * block + inner;
                    for (t, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + t * stride];
                    }
                    if inverse {
                        plan.inverse(&mut line);
                    } else {
                        plan.forward(&mut line);
                    }
                    for (t, slot) in line.iter().enumerate() {
                        data[base + t * stride] = *slot;
                    }
                }
            }
        }
    }
}
