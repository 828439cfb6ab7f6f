//! Physicists' Hermite polynomials of complex argument.

use alloc::vec::Vec;

use num_complex::Complex64;

/// `H_n(z)` by the recursion `H_{n+1} = 2z H_n − 2n H_{n−1}`.
pub fn hermite_complex(n: u32, z: Complex64) -> Complex64 {
    let mut prev = Complex64::new(1.0, 0.0);
    if n == 0 {
        return prev;
    }
    let mut cur = z * 2.0;
    for k in 1..n {
        let next = z * cur * 2.0 - prev * (2.0 * k as f64);
        prev = cur;
        cur = next;
    }
    cur
}

/// `[H_0(z), …, H_n(z)]`.
pub fn hermite_table(n: u32, z: Complex64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(Complex64::new(1.0, 0.0));
    if n == 0 {
        return out;
    }
    out.push(z * 2.0);
    for k in 1..n as usize {
        let next = z * out[k] * 2.0 - out[k - 1] * (2.0 * k as f64);
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders() {
        let z = Complex64::new(0.3, -1.1);
        assert_eq!(hermite_complex(0, z), Complex64::new(1.0, 0.0));
        assert_eq!(hermite_complex(1, z), z * 2.0);
        assert_eq!(
            hermite_complex(3, Complex64::new(1.0, 0.0)),
            Complex64::new(-4.0, 0.0)
        );
        let t = hermite_table(5, z);
        for (n, h) in t.iter().enumerate() {
            assert!((h - hermite_complex(n as u32, z)).norm() < 1e-12);
        }
    }

    #[test]
    fn integer_arguments_are_exact() {
        // H_4(2) = 16·16 − 48·4 + 12
        assert_eq!(hermite_complex(4, Complex64::new(2.0, 0.0)).re, 76.0);
    }
}
