//! Unitary FFT helpers on top of rustfft.
//!
//! All transforms in this crate use the unitary 1/sqrt(n) convention on both
//! directions so Parseval's identity holds symmetrically and cross-correlation
//! magnitudes stay scale-stable across IFFT sizes.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    // Plans cache twiddle tables per size; reuse them across calls.
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unitary inverse DFT (kernel `e^{+j 2 pi k n / K}`, scaled by 1/sqrt(K)).
pub fn idft_unitary(input: &[Complex64]) -> Vec<Complex64> {
    let mut buf = input.to_vec();
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()).process(&mut buf));
    let scale = 1.0 / (buf.len() as f64).sqrt();
    for v in &mut buf {
        *v *= scale;
    }
    buf
}

/// Unitary forward DFT (kernel `e^{-j 2 pi k n / K}`, scaled by 1/sqrt(K)).
pub fn dft_unitary(input: &[Complex64]) -> Vec<Complex64> {
    let mut buf = input.to_vec();
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()).process(&mut buf));
    let scale = 1.0 / (buf.len() as f64).sqrt();
    for v in &mut buf {
        *v *= scale;
    }
    buf
}

/// Reorder DFT output so the zero-frequency bin sits at index `n/2`.
///
/// Output index `k` holds the bin at frequency `(k - n/2) * fs / n`
/// (integer division; matches the usual fftshift for both parities).
pub fn fftshift<T: Copy>(x: &[T]) -> Vec<T> {
    let n = x.len();
    let half = n.div_ceil(2);
    let mut out = Vec::with_capacity(n);
    out.extend_from_slice(&x[half..]);
    out.extend_from_slice(&x[..half]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_is_identity() {
        let x: Vec<Complex64> = (0..32)
            .map(|i| Complex64::new(i as f64, (i * i) as f64 * 0.1))
            .collect();
        let back = dft_unitary(&idft_unitary(&x));
        for (a, b) in x.iter().zip(back.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn parseval_holds() {
        let x: Vec<Complex64> = (0..128)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let y = idft_unitary(&x);
        let ex: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        let ey: f64 = y.iter().map(|v| v.norm_sqr()).sum();
        assert!((ex - ey).abs() / ex < 1e-12);
    }

    #[test]
    fn fftshift_even_centers_dc() {
        let x: Vec<i32> = (0..8).collect();
        // DC (index 0) must land at index n/2 = 4.
        assert_eq!(fftshift(&x), vec![4, 5, 6, 7, 0, 1, 2, 3]);
    }
}
