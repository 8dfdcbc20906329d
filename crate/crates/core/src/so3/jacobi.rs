use crate::scalar::Real;

/// Jacobi polynomial `P_k^{(a,b)}(x)` by the standard three-term recurrence.
pub fn jacobi_polynomial<T: Real>(k: u32, a: u32, b: u32, x: T) -> T {
    let one = T::one();
    let two = T::lit(2.0);
    let (a, b) = (T::from_int(a as i64), T::from_int(b as i64));
    if k == 0 {
        return one;
    }
    let mut p_prev = one;
    let mut p = (a + one) + (a + b + two) * (x - one) / two;
    for deg in 2..=k {
        let n = T::from_int(deg as i64);
        let s = two * n + a + b;
        let c0 = two * n * (n + a + b) * (s - two);
        let c1 = (s - one) * (s * (s - two) * x + a * a - b * b);
        let c2 = two * (n + a - one) * (n + b - one) * s;
        let next = (c1 * p - c2 * p_prev) / c0;
        p_prev = p;
        p = next;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: u64, k: u64) -> f64 {
        (1..=k).fold(1.0, |acc, i| acc * (n - k + i) as f64 / i as f64)
    }

    // Explicit sum: P_k^{(a,b)}(x) = sum_s C(k+a, k-s) C(k+b, s) ((x-1)/2)^s ((x+1)/2)^(k-s)
    fn jacobi_sum(k: u64, a: u64, b: u64, x: f64) -> f64 {
        (0..=k)
            .map(|s| {
                binomial(k + a, k - s)
                    * binomial(k + b, s)
                    * ((x - 1.0) / 2.0).powi(s as i32)
                    * ((x + 1.0) / 2.0).powi((k - s) as i32)
            })
            .sum()
    }

    #[test]
    fn degree_zero_is_one() {
        for &(a, b) in &[(0, 0), (3, 1), (2, 7)] {
            assert_eq!(jacobi_polynomial(0, a, b, 0.3_f64), 1.0);
        }
    }

    #[test]
    fn degree_one_legendre() {
        assert!((jacobi_polynomial(1, 0, 0, 0.5_f64) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn right_endpoint_is_binomial() {
        assert!((jacobi_polynomial(2, 1, 1, 1.0_f64) - 3.0).abs() < 1e-14);
        for k in 0..12u32 {
            for a in 0..5u32 {
                let want = binomial((k + a) as u64, k as u64);
                let got = jacobi_polynomial(k, a, 2, 1.0_f64);
                assert!((got - want).abs() < 1e-10 * want, "k={k} a={a}");
            }
        }
    }

    #[test]
    fn recurrence_matches_explicit_sum() {
        for k in 0..10u32 {
            for a in 0..4u32 {
                for b in 0..4u32 {
                    for &x in &[-1.0, -0.7, 0.0, 0.31, 0.9, 1.0] {
                        let want = jacobi_sum(k as u64, a as u64, b as u64, x);
                        let got = jacobi_polynomial(k, a, b, x);
                        assert!(
                            (got - want).abs() < 1e-10 * want.abs().max(1.0),
                            "k={k} a={a} b={b} x={x}: {got} vs {want}"
                        );
                    }
                }
            }
        }
    }
}
