//! One-dimensional complex FFT.
//!
//! Power-of-two lengths use an iterative radix-2 transform; every other
//! length goes through Bluestein's chirp-z algorithm on a padded
//! power-of-two convolution. Both directions are unnormalized:
//! `inverse(forward(x)) = n · x`.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct FftPlan {
    len: usize,
    algorithm: Algorithm,
}

#[derive(Debug, Clone)]
enum Algorithm {
    Radix2(Radix2),
    Bluestein(Box<Bluestein>),
}

#[derive(Debug, Clone)]
struct Radix2 {
    len: usize,
    // exp(-2πi k / len) for k < len / 2
    twiddles: Vec<Complex64>,
}

#[derive(Debug, Clone)]
struct Bluestein {
    inner: Radix2,
    // exp(-iπ k² / n) for k < n
    chirp: Vec<Complex64>,
    // forward transform of the conjugate chirp, wrapped to the padded length
    kernel: Vec<Complex64>,
}

impl FftPlan {
    pub fn new(len: usize) -> Self {
        assert!(len > 0, "FFT length must be positive");
        let algorithm = if len.is_power_of_two() {
            Algorithm::Radix2(Radix2::new(len))
        } else {
            Algorithm::Bluestein(Box::new(Bluestein::new(len)))
        };
        FftPlan { len, algorithm }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn forward(&self, buf: &mut [Complex64]) {
        self.process(buf, false);
    }

    /// Unnormalized inverse; callers divide by `len`.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.process(buf, true);
    }

    fn process(&self, buf: &mut [Complex64], inverse: bool) {
        assert_eq!(buf.len(), self.len, "buffer length does not match plan");
        match &self.algorithm {
            Algorithm::Radix2(r) => r.process(buf, inverse),
            Algorithm::Bluestein(b) => {
                if inverse {
                    // ifft(x) = conj(fft(conj(x)))
                    buf.iter_mut().for_each(|z| *z = z.conj());
                    b.forward(buf);
                    buf.iter_mut().for_each(|z| *z = z.conj());
                } else {
                    b.forward(buf);
                }
            }
        }
    }
}

fn unit(angle: f64) -> Complex64 {
    Complex64::new(libm::cos(angle), libm::sin(angle))
}

impl Radix2 {
    fn new(len: usize) -> Self {
        let twiddles = (0..len / 2)
            .map(|k| unit(-2.0 * PI * k as f64 / len as f64))
            .collect();
        Radix2 { len, twiddles }
    }

    fn process(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.len;
        if n == 1 {
            return;
        }
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if j > i {
                buf.swap(i, j);
            }
        }
        let mut half = 1;
        while half < n {
            let stride = n / (2 * half);
            for start in (0..n).step_by(2 * half) {
                for j in 0..half {
                    let mut w = self.twiddles[j * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let a = buf[start + j];
                    let b = buf[start + j + half] * w;
                    buf[start + j] = a + b;
                    buf[start + j + half] = a - b;
                }
            }
            half *= 2;
        }
    }
}

impl Bluestein {
    fn new(n: usize) -> Self {
        let padded = (2 * n - 1).next_power_of_two();
        let inner = Radix2::new(padded);
        // k² mod 2n keeps the chirp angle small and exact
        let chirp: Vec<Complex64> = (0..n)
            .map(|k| {
                let k2 = (k as u128 * k as u128 % (2 * n as u128)) as f64;
                unit(-PI * k2 / n as f64)
            })
            .collect();
        let mut kernel = vec![Complex64::new(0.0, 0.0); padded];
        kernel[0] = chirp[0].conj();
        for k in 1..n {
            kernel[k] = chirp[k].conj();
            kernel[padded - k] = chirp[k].conj();
        }
        inner.process(&mut kernel, false);
        Bluestein {
            inner,
            chirp,
            kernel,
        }
    }

    fn forward(&self, buf: &mut [Complex64]) {
        let n = self.chirp.len();
        let m = self.inner.len;
        let mut work = vec![Complex64::new(0.0, 0.0); m];
        for k in 0..n {
            work[k] = buf[k] * self.chirp[k];
        }
        self.inner.process(&mut work, false);
        for (w, k) in work.iter_mut().zip(&self.kernel) {
            *w *= k;
        }
        self.inner.process(&mut work, true);
        let scale = 1.0 / m as f64;
        for k in 0..n {
            buf[k] = work[k] * self.chirp[k] * scale;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::vec::Vec;

    fn naive_dft(x: &[Complex64], inverse: bool) -> Vec<Complex64> {
        let n = x.len();
        let sign = if inverse { 1.0 } else { -1.0 };
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(j, &v)| {
                        let idx = (j * k) % n;
                        v * unit(sign * 2.0 * PI * idx as f64 / n as f64)
                    })
                    .sum()
            })
            .collect()
    }

    fn random_signal(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    }

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn matches_naive_dft_for_mixed_lengths() {
        for &n in &[1usize, 2, 8, 10, 12, 16, 18, 24, 30, 64, 96] {
            let x = random_signal(n, n as u64);
            for inverse in [false, true] {
                let mut got = x.clone();
                FftPlan::new(n).process(&mut got, inverse);
                let want = naive_dft(&x, inverse);
                assert!(max_diff(&got, &want) < 1e-12 * n as f64, "n = {n}");
            }
        }
    }

    #[test]
    fn matches_rustfft() {
        let mut planner = rustfft::FftPlanner::<f64>::new();
        for &n in &[8usize, 20, 128, 200, 1024] {
            let x = random_signal(n, 7 + n as u64);
            let mut ours = x.clone();
            FftPlan::new(n).forward(&mut ours);
            let mut theirs = x.clone();
            planner.plan_fft_forward(n).process(&mut theirs);
            assert!(max_diff(&ours, &theirs) < 1e-11, "n = {n}");
        }
    }

    #[test]
    fn round_trip_scales_by_length() {
        for &n in &[16usize, 40] {
            let x = random_signal(n, 3);
            let plan = FftPlan::new(n);
            let mut y = x.clone();
            plan.forward(&mut y);
            plan.inverse(&mut y);
            let y: Vec<_> = y.iter().map(|z| z / n as f64).collect();
            assert!(max_diff(&x, &y) < 1e-14);
        }
    }
}
