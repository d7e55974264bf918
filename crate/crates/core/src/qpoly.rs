//! Chebyshev-type recursions, the coefficient function `φ`, and level
//! dimensions of the subproduct system.

use alloc::format;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{format_scalar, to_f64, Lambda, Scalar};

/// `P_0 = P_1 = 1`, `P_{m+1}(x) = P_m(x) − x·P_{m−1}(x)`.
pub fn chebyshev_p(m: usize, x: &Scalar) -> Scalar {
    let (mut prev, mut cur) = (Scalar::one(), Scalar::one());
    for _ in 1..m {
        let next = &cur - x * &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `Q_0 = 1`, `Q_1 = y`, `Q_{m+1}(y) = y·Q_m(y) − Q_{m−1}(y)`.
pub fn chebyshev_q(m: usize, y: &Scalar) -> Scalar {
    let (mut prev, mut cur) = (Scalar::zero(), Scalar::one());
    for _ in 0..m {
        let next = y * &cur - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `y = λ⁻¹ − 1`.
pub fn shifted_delta(lambda: &Lambda) -> Scalar {
    lambda.delta() - Scalar::one()
}

/// `φ(m) = λ⁻¹·Q_{m−1}(y)/Q_m(y)` with `y = λ⁻¹ − 1`, cross-checked against
/// the `P`-ratio form `(λ⁻¹/(λ⁻¹−1))·P_{m−1}(x)/P_m(x)`, `x = y⁻²`.
///
/// `φ(0) = 0`.
pub fn phi(m: usize, lambda: &Lambda) -> Result<Scalar> {
    if m == 0 {
        return Ok(Scalar::zero());
    }
    let q = phi_q_ratio(m, lambda)?;
    let p = phi_p_ratio(m, lambda)?;
    if p != q {
        return Err(Error::Consistency(format!(
            "phi({m}) disagreement: {} vs {}",
            format_scalar(&q),
            format_scalar(&p)
        )));
    }
    Ok(q)
}

pub fn phi_q_ratio(m: usize, lambda: &Lambda) -> Result<Scalar> {
    let y = shifted_delta(lambda);
    let den = chebyshev_q(m, &y);
    if den.is_zero() {
        return Err(Error::SingularParameter(format!("Q_{m}(λ⁻¹−1) = 0")));
    }
    Ok(lambda.delta() * chebyshev_q(m - 1, &y) / den)
}

pub fn phi_p_ratio(m: usize, lambda: &Lambda) -> Result<Scalar> {
    let y = shifted_delta(lambda);
    if y.is_zero() {
        return Err(Error::Domain("λ⁻¹ = 1".into()));
    }
    let x = (&y * &y).recip();
    let den = chebyshev_p(m, &x);
    if den.is_zero() {
        return Err(Error::SingularParameter(format!("P_{m}(x) = 0")));
    }
    Ok(lambda.delta() / &y * chebyshev_p(m - 1, &x) / den)
}

/// The root `q ∈ (0, 1]` of `q + q⁻¹ = λ⁻¹ − 1`.
pub fn q_parameter(lambda: &Lambda) -> f64 {
    let y = to_f64(&shifted_delta(lambda));
    // Stable form of (y − √(y²−4))/2.
    let disc = (y * y - 4.0).max(0.0);
    2.0 / (y + libm::sqrt(disc))
}

/// `φ_∞ = q² + q + 1`.
pub fn phi_infinity(lambda: &Lambda) -> f64 {
    let q = q_parameter(lambda);
    q * q + q + 1.0
}

/// `[m]_q = (q^m − q^{−m})/(q − q⁻¹)`, equal to `m` at `q = 1`.
pub fn q_integer(m: i32, q: f64) -> f64 {
    if (q - 1.0).abs() < 1e-12 {
        return m as f64;
    }
    (libm::pow(q, m as f64) - libm::pow(q, -m as f64)) / (q - 1.0 / q)
}

/// `λ⁻¹` is `n`-generic when `P_k((λ⁻¹−1)⁻²) ≠ 0` for `1 ≤ k ≤ n`.
pub fn is_generic(lambda: &Scalar, n: usize) -> Result<bool> {
    let y = lambda.recip() - Scalar::one();
    if y.is_zero() {
        return Err(Error::Domain("λ⁻¹ = 1".into()));
    }
    let x = (&y * &y).recip();
    let (mut prev, mut cur) = (Scalar::one(), Scalar::one());
    for _ in 1..n {
        let next = &cur - &x * &prev;
        if next.is_zero() {
            return Ok(false);
        }
        prev = cur;
        cur = next;
    }
    Ok(true)
}

/// `φ` on `ℤ₊ ∪ {∞}`: exact values for finitely many `m` and the limit.
#[derive(Debug, Clone)]
pub struct PhiFunction {
    lambda: Lambda,
    values: Vec<Scalar>,
    q: f64,
    limit: f64,
}

impl PhiFunction {
    /// Tabulates `φ(0..=max_m)`.
    pub fn new(lambda: &Lambda, max_m: usize) -> Result<Self> {
        let values = (0..=max_m).map(|m| phi(m, lambda)).collect::<Result<Vec<_>>>()?;
        Ok(PhiFunction { lambda: lambda.clone(), values, q: q_parameter(lambda), limit: phi_infinity(lambda) })
    }

    pub fn lambda(&self) -> &Lambda {
        &self.lambda
    }

    pub fn exact(&self, m: usize) -> Option<&Scalar> {
        self.values.get(m)
    }

    /// `φ(m)` as a float; `None` means `m = ∞`.
    pub fn value(&self, m: Option<usize>) -> f64 {
        match m {
            Some(m) => self.values.get(m).map(to_f64).unwrap_or(self.limit),
            None => self.limit,
        }
    }

    pub fn limit(&self) -> f64 {
        self.limit
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn max_m(&self) -> usize {
        self.values.len() - 1
    }
}

/// `1 − λ − λ²φ(m)`, the coefficient in the reverse identity.
pub fn reverse_coefficient(m: usize, lambda: &Lambda) -> Result<Scalar> {
    let l = lambda.value();
    Ok(Scalar::one() - l - l * l * phi(m, lambda)?)
}

/// Closed form `λ·[m+2]_q/[m+1]_q` of [`reverse_coefficient`].
pub fn reverse_coefficient_closed(m: usize, lambda: &Lambda) -> f64 {
    let q = q_parameter(lambda);
    lambda.to_f64() * q_integer(m as i32 + 2, q) / q_integer(m as i32 + 1, q)
}

/// `d_0 = 1`, `d_1 = n − 1`, `d_{k+1} = (n−1)d_k − d_{k−1}`.
pub fn dim_subproduct(n: usize, k: usize) -> Result<u64> {
    if n < 2 {
        return Err(Error::Domain(format!("n = {n} < 2")));
    }
    let s = (n - 1) as i128;
    let (mut prev, mut cur): (i128, i128) = (0, 1);
    for step in 0..k {
        let next = if step == 0 { s } else { s * cur - prev };
        if next <= 0 {
            return Err(Error::Domain(format!("dimension recursion reaches {next} at n = {n}")));
        }
        prev = cur;
        cur = next;
        if cur > u64::MAX as i128 {
            return Err(Error::ResourceLimit { what: "dimension", value: usize::MAX, limit: usize::MAX });
        }
    }
    Ok(cur as u64)
}

/// `[k+1]_τ` with `τ + τ⁻¹ = n − 1`, the floating counterpart of
/// [`dim_subproduct`].
pub fn dim_subproduct_float(n: usize, k: usize) -> f64 {
    let s = (n - 1) as f64;
    let tau = 2.0 / (s + libm::sqrt((s * s - 4.0).max(0.0)));
    q_integer(k as i32 + 1, tau)
}

/// Sign-aware check used by reports: `φ` positive and increasing up to `m`.
pub fn phi_is_monotone(lambda: &Lambda, max_m: usize) -> Result<bool> {
    let mut prev = Scalar::zero();
    for m in 1..=max_m {
        let v = phi(m, lambda)?;
        if !v.is_positive() || v <= prev {
            return Ok(false);
        }
        prev = v;
    }
    Ok(true)
}

/// `φ(m) = 3m/(m+1)` at `λ = 1/3`.
pub fn phi_critical(m: usize) -> Scalar {
    crate::scalar::ratio(3 * m as i64, m as i64 + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    fn lam(d: i64) -> Lambda {
        Lambda::from_ratio(1, d).unwrap()
    }

    #[test]
    fn recursion_values() {
        assert_eq!(chebyshev_p(1, &ratio(7, 3)), int(1));
        assert_eq!(chebyshev_p(2, &ratio(1, 4)), ratio(3, 4));
        assert_eq!(chebyshev_p(3, &ratio(1, 4)), ratio(1, 2));
        assert_eq!(chebyshev_q(2, &int(3)), int(8));
        assert_eq!(chebyshev_q(3, &int(3)), int(21));
        for m in 0..20 {
            assert_eq!(chebyshev_q(m, &int(2)), int(m as i64 + 1));
        }
    }

    #[test]
    fn q_is_scaled_p() {
        for y in [int(2), int(3), ratio(7, 2)] {
            let x = (&y * &y).recip();
            for m in 0..=20 {
                let ym = crate::scalar::pow(&y, m as u32);
                assert_eq!(chebyshev_q(m, &y), ym * chebyshev_p(m, &x));
            }
        }
    }

    #[test]
    fn phi_values() {
        assert_eq!(phi(2, &lam(3)).unwrap(), int(2));
        assert_eq!(phi(1, &lam(4)).unwrap(), ratio(4, 3));
        assert_eq!(phi(3, &lam(4)).unwrap(), ratio(32, 21));
        for m in 1..=30 {
            assert_eq!(phi(m, &lam(3)).unwrap(), phi_critical(m));
        }
        for m in 1..=20 {
            assert_eq!(phi_q_ratio(m, &lam(4)).unwrap(), phi_p_ratio(m, &lam(4)).unwrap());
        }
    }

    #[test]
    fn limits() {
        assert!((phi_infinity(&lam(3)) - 3.0).abs() < 1e-12);
        let l = lam(4);
        let q = q_parameter(&l);
        assert!((q - (3.0 - libm::sqrt(5.0)) / 2.0).abs() < 1e-15);
        assert!((phi_infinity(&l) - 4.0 * q).abs() < 1e-12);
        assert!((phi_infinity(&l) - 1.527864).abs() < 1e-6);
        assert!((l.to_f64() * phi_infinity(&l) - q).abs() < 1e-12);
        assert!((to_f64(&phi(30, &l).unwrap()) - phi_infinity(&l)).abs() < 1e-3);
    }

    #[test]
    fn monotone_below_limit() {
        for l in [lam(3), lam(4)] {
            let f = PhiFunction::new(&l, 100).unwrap();
            assert!(phi_is_monotone(&l, 100).unwrap());
            for m in 1..=100 {
                assert!(f.value(Some(m)) < f.limit() + 1e-12);
            }
        }
    }

    #[test]
    fn reverse_coefficient_closed_form() {
        assert_eq!(reverse_coefficient(1, &lam(3)).unwrap(), ratio(1, 2));
        assert_eq!(reverse_coefficient(1, &lam(4)).unwrap(), ratio(2, 3));
        for l in [lam(3), lam(4), lam(7)] {
            for m in 0..=30 {
                let exact = to_f64(&reverse_coefficient(m, &l).unwrap());
                assert!((exact - reverse_coefficient_closed(m, &l)).abs() < 1e-10, "m = {m}");
            }
        }
    }

    #[test]
    fn genericity() {
        assert!(is_generic(&ratio(1, 3), 50).unwrap());
        assert!(is_generic(&ratio(1, 4), 50).unwrap());
        assert!(!is_generic(&ratio(1, 2), 2).unwrap());
        assert!(is_generic(&int(1), 3).is_err());
    }

    #[test]
    fn dimensions() {
        let d3: Vec<u64> = (0..5).map(|k| dim_subproduct(3, k).unwrap()).collect();
        assert_eq!(d3, [1, 2, 3, 4, 5]);
        let d4: Vec<u64> = (0..6).map(|k| dim_subproduct(4, k).unwrap()).collect();
        assert_eq!(d4, [1, 3, 8, 21, 55, 144]);
        for n in 3..=6 {
            assert_eq!(dim_subproduct(n, 2).unwrap(), ((n - 1) * (n - 1) - 1) as u64);
            for k in 0..=10 {
                let d = dim_subproduct(n, k).unwrap();
                assert_eq!(d, dim_subproduct_float(n, k).round() as u64);
            }
        }
        assert!(dim_subproduct(2, 3).is_err());
    }
}
