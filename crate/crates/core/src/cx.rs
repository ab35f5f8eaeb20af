//! Small dense complex-vector kernels.
//!
//! Channel vectors follow the convention that the signal received through
//! channel `h` from weights `w` is the inner product `h† w`.

use num_complex::Complex64;

/// `a† b`, conjugating the left operand.
pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

pub fn norm(a: &[Complex64]) -> f64 {
    norm_sqr(a).sqrt()
}

pub fn scale(a: &[Complex64], s: Complex64) -> Vec<Complex64> {
    a.iter().map(|x| x * s).collect()
}

pub fn scale_real(a: &[Complex64], s: f64) -> Vec<Complex64> {
    a.iter().map(|x| x * s).collect()
}

/// `a + s b`.
pub fn axpy(a: &[Complex64], s: Complex64, b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn is_zero(a: &[Complex64]) -> bool {
    a.iter().all(|x| x.re == 0.0 && x.im == 0.0)
}

/// Rescale `a` to squared norm `power`. A zero vector stays zero.
pub fn with_power(a: &[Complex64], power: f64) -> Vec<Complex64> {
    let n = norm(a);
    if n == 0.0 || power <= 0.0 {
        return vec![Complex64::new(0.0, 0.0); a.len()];
    }
    scale_real(a, power.sqrt() / n)
}

/// Rotate `a` so that its largest-magnitude entry is real and positive.
pub fn canonical_phase(a: &mut [Complex64]) {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, x) in a.iter().enumerate() {
        let m = x.norm_sqr();
        if m > best_mag {
            best = i;
            best_mag = m;
        }
    }
    if best_mag <= 0.0 {
        return;
    }
    let phase = a[best].conj() / a[best].norm();
    for x in a.iter_mut() {
        *x *= phase;
    }
    a[best] = Complex64::new(a[best].re, 0.0);
}
