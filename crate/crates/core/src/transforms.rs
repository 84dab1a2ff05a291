//! Fourier and Möbius transforms of boolean phase functions, with their
//! inversions and cross formulas, plus the Kravchuk and binomial transforms
//! for symmetric functions.
//!
//! In the exact tier every value is `e^{i pi theta}` with rational `theta`,
//! and a transform is a rational-linear map on exponents: exponent sums are
//! accumulated exactly and only reduced modulo 2 at comparison time. The
//! `2^{1-n}`-th root in the Fourier transform is therefore pinned to one
//! deterministic branch (scale the representative exponent), and chained
//! transforms stay on a mutually consistent branch — which is what makes the
//! vacuum-scalar identity and the cross formulas land exactly. Functions
//! with any approximate value fall back to principal-branch complex powers
//! and are flagged by `is_exact`.

use crate::error::{Error, Result};
use crate::phase::PhaseElement;
use crate::tensor::Tensor;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `(-2)^k` as an exact rational, with `(-2)^{-1} = -1/2`.
fn neg_two_pow(k: i64) -> BigRational {
    if k >= 0 {
        let mut v = BigRational::one();
        for _ in 0..k {
            v *= rat(-2, 1);
        }
        v
    } else {
        let mut v = BigRational::one();
        for _ in 0..-k {
            v *= rat(-1, 2);
        }
        v
    }
}

/// `2^k` as an exact rational for possibly negative `k`.
fn two_pow(k: i64) -> BigRational {
    if k >= 0 {
        BigRational::from_integer(BigInt::from(1) << k as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::from(1) << (-k) as usize)
    }
}

/// A total map `{0,1}^n -> C*` indexed by subset masks (bit `i` = wire `i`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PhaseFunction {
    n: usize,
    values: Vec<PhaseElement>,
}

impl PhaseFunction {
    pub fn new(n: usize, values: Vec<PhaseElement>) -> Result<Self> {
        if values.len() != 1 << n {
            return Err(Error::Range(format!(
                "phase function on {n} wires needs {} values, got {}",
                1 << n,
                values.len()
            )));
        }
        Ok(PhaseFunction { n, values })
    }

    pub fn constant_one(n: usize) -> Self {
        PhaseFunction {
            n,
            values: vec![PhaseElement::one(); 1 << n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, mask: usize) -> &PhaseElement {
        &self.values[mask]
    }

    pub fn values(&self) -> &[PhaseElement] {
        &self.values
    }

    pub fn is_exact(&self) -> bool {
        self.values.iter().all(|v| v.is_exact())
    }

    /// Pointwise product (composition of the diagonal operators).
    pub fn pointwise_mul(&self, other: &PhaseFunction) -> Result<PhaseFunction> {
        if self.n != other.n {
            return Err(Error::Range("size mismatch".into()));
        }
        Ok(PhaseFunction {
            n: self.n,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.mul(b))
                .collect(),
        })
    }

    pub fn pow_int(&self, k: i64) -> PhaseFunction {
        PhaseFunction {
            n: self.n,
            values: self.values.iter().map(|v| v.pow_int(k)).collect(),
        }
    }

    /// Value-level equality: exact pairs modulo 2, otherwise within `tol`.
    pub fn eq_values(&self, other: &PhaseFunction, tol: f64) -> bool {
        self.n == other.n
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.eq_value(b, tol))
    }

    /// The diagonal operator `|x> -> f(x) |x>` as a tensor. Mask bit `i` is
    /// wire `i`, while tensor indices are big-endian, so the mask is
    /// bit-reversed into the index.
    pub fn diag_tensor(&self) -> Tensor {
        let n = self.n;
        Tensor::diagonal(n, |row| {
            let mut mask = 0usize;
            for i in 0..n {
                if row >> (n - 1 - i) & 1 == 1 {
                    mask |= 1 << i;
                }
            }
            self.values[mask].value()
        })
    }
}

fn parity(x: usize) -> i64 {
    (x.count_ones() % 2) as i64
}

fn weight(x: usize) -> i64 {
    x.count_ones() as i64
}

/// Apply a rational-linear exponent map `out(s) = sum_t coeff(s, t) theta(t)`
/// in the exact tier, or the matching product of complex powers otherwise.
fn linear_transform(
    f: &PhaseFunction,
    coeff: impl Fn(usize, usize) -> BigRational,
) -> PhaseFunction {
    let size = f.len();
    if f.is_exact() {
        let thetas: Vec<BigRational> = f
            .values()
            .iter()
            .map(|v| v.raw_theta().expect("exact").clone())
            .collect();
        let values = (0..size)
            .map(|s| {
                let mut acc = BigRational::zero();
                for (t, theta) in thetas.iter().enumerate() {
                    let c = coeff(s, t);
                    if !c.is_zero() {
                        acc += c * theta;
                    }
                }
                PhaseElement::from_unreduced_theta(acc)
            })
            .collect();
        PhaseFunction { n: f.n, values }
    } else {
        let values = (0..size)
            .map(|s| {
                let mut acc = Complex64::new(1.0, 0.0);
                for t in 0..size {
                    let c = coeff(s, t).to_f64().expect("finite");
                    if c != 0.0 {
                        let z = f.value(t).value();
                        acc *= (z.ln() * c).exp();
                    }
                }
                PhaseElement::approx(acc)
            })
            .collect();
        PhaseFunction { n: f.n, values }
    }
}

/// Fourier transform: `fhat(s) = prod_t f(t)^{-2^{1-n} (-1)^{s.t}}`.
pub fn fourier(f: &PhaseFunction) -> PhaseFunction {
    let n = f.n() as i64;
    linear_transform(f, |s, t| {
        let sign = if parity(s & t) == 1 { -1 } else { 1 };
        two_pow(1 - n) * rat(-sign, 1)
    })
}

/// Inversion: `f(x) = f(empty) prod_s fhat(s)^{s.x}`.
pub fn invert_fourier(fhat: &PhaseFunction, f_empty: &PhaseElement) -> PhaseFunction {
    let mut out = linear_transform(fhat, |x, s| rat(parity(s & x), 1));
    for v in out.values.iter_mut() {
        *v = f_empty.mul(v);
    }
    out
}

/// Möbius transform: `ftilde(s) = prod_{t <= s} f(t)^{(-1)^{|t| + |s|}}`.
pub fn mobius(f: &PhaseFunction) -> PhaseFunction {
    linear_transform(f, |s, t| {
        if t & !s != 0 {
            BigRational::zero()
        } else if (weight(s) + weight(t)) % 2 == 0 {
            rat(1, 1)
        } else {
            rat(-1, 1)
        }
    })
}

/// Inversion: `f(x) = prod_{s <= x} ftilde(s)`.
pub fn invert_mobius(ftilde: &PhaseFunction) -> PhaseFunction {
    linear_transform(ftilde, |x, s| {
        if s & !x != 0 {
            BigRational::zero()
        } else {
            rat(1, 1)
        }
    })
}

/// Cross formula: `ftilde(x) = prod_{t >= x} fhat(t)^{(-2)^{|x|-1}}`.
///
/// The contract is reconstruction-level: feeding the result into
/// `invert_mobius` reproduces the diagonal operator that `fhat` (with its
/// vacuum) describes. Pointwise agreement with `mobius(f)` holds when both
/// sides are computed under the canonical branch.
pub fn mobius_from_fourier(fhat: &PhaseFunction) -> PhaseFunction {
    linear_transform(fhat, |x, t| {
        if x & !t != 0 {
            BigRational::zero()
        } else {
            neg_two_pow(weight(x) - 1)
        }
    })
}

/// Cross formula: `fhat(x) = prod_{t >= x} ftilde(t)^{-2^{1-|t|} (-1)^{|x|}}`.
pub fn fourier_from_mobius(ftilde: &PhaseFunction) -> PhaseFunction {
    linear_transform(ftilde, |x, t| {
        if x & !t != 0 {
            BigRational::zero()
        } else {
            let sign = if weight(x) % 2 == 1 { 1 } else { -1 };
            two_pow(1 - weight(t)) * rat(sign, 1)
        }
    })
}

/// Vacuum scalar: `f(empty) = prod_t fhat(t)^{-1/2}`.
pub fn vacuum_scalar(fhat: &PhaseFunction) -> PhaseElement {
    if fhat.is_exact() {
        let mut acc = BigRational::zero();
        for v in fhat.values() {
            acc += v.raw_theta().expect("exact");
        }
        PhaseElement::from_unreduced_theta(acc * rat(-1, 2))
    } else {
        let mut acc = Complex64::new(1.0, 0.0);
        for v in fhat.values() {
            acc *= (v.value().ln() * -0.5).exp();
        }
        PhaseElement::approx(acc)
    }
}

// ---------------------------------------------------------------------------
// Symmetric functions: Kravchuk and binomial transforms
// ---------------------------------------------------------------------------

pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || k > n || n < 0 {
        return BigInt::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 0..k {
        num *= BigInt::from(n - j);
        den *= BigInt::from(j + 1);
    }
    num / den
}

/// Kravchuk polynomial `K^n_k(m) = sum_j C(m,j) C(n-m,k-j) (-1)^j`, exact.
pub fn kravchuk(n: usize, k: usize, m: usize) -> Result<BigInt> {
    if k > n || m > n {
        return Err(Error::Range(format!(
            "kravchuk indices k={k}, m={m} out of range for n={n}"
        )));
    }
    let (n, k, m) = (n as i64, k as i64, m as i64);
    let mut acc = BigInt::zero();
    for j in 0..=k {
        let term = binomial(m, j) * binomial(n - m, k - j);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

/// Closed forms for the low-order Kravchuk polynomials.
pub fn kravchuk_closed_form(n: usize, k: usize, m: usize) -> Option<BigRational> {
    let nn = BigRational::from_integer(BigInt::from(n));
    let mm = BigRational::from_integer(BigInt::from(m));
    let val = match k {
        0 => BigRational::one(),
        1 => rat(-2, 1) * &mm + &nn,
        2 => rat(2, 1) * &mm * &mm - rat(2, 1) * &nn * &mm + (&nn * &nn - &nn) * rat(1, 2),
        3 => {
            rat(-4, 3) * &mm * &mm * &mm
                + rat(2, 1) * &nn * &mm * &mm
                + (rat(-1, 1) * &nn * &nn + &nn - rat(2, 3)) * &mm
                + (&nn * &nn * &nn - rat(3, 1) * &nn * &nn + rat(2, 1) * &nn) * rat(1, 6)
        }
        _ if k == n => {
            if m.is_multiple_of(2) {
                BigRational::one()
            } else {
                -BigRational::one()
            }
        }
        _ => return None,
    };
    Some(val)
}

/// Symmetric phase function: `f(x) = F(|x|)`, stored as `n + 1` values.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymmetricPhaseFunction {
    n: usize,
    values: Vec<PhaseElement>,
}

impl SymmetricPhaseFunction {
    pub fn new(n: usize, values: Vec<PhaseElement>) -> Result<Self> {
        if values.len() != n + 1 {
            return Err(Error::Range(format!(
                "symmetric function on {n} wires needs {} values, got {}",
                n + 1,
                values.len()
            )));
        }
        Ok(SymmetricPhaseFunction { n, values })
    }

    pub fn constant_one(n: usize) -> Self {
        SymmetricPhaseFunction {
            n,
            values: vec![PhaseElement::one(); n + 1],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self, k: usize) -> &PhaseElement {
        &self.values[k]
    }

    pub fn values(&self) -> &[PhaseElement] {
        &self.values
    }

    pub fn is_exact(&self) -> bool {
        self.values.iter().all(|v| v.is_exact())
    }

    /// The induced general function `f(x) = F(|x|)`.
    pub fn induced(&self) -> PhaseFunction {
        let values = (0..1usize << self.n)
            .map(|mask| self.values[mask.count_ones() as usize].clone())
            .collect();
        PhaseFunction { n: self.n, values }
    }

    pub fn eq_values(&self, other: &SymmetricPhaseFunction, tol: f64) -> bool {
        self.n == other.n
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.eq_value(b, tol))
    }
}

fn symmetric_linear(
    f: &SymmetricPhaseFunction,
    coeff: impl Fn(usize, usize) -> BigRational,
) -> SymmetricPhaseFunction {
    let n = f.n;
    if f.is_exact() {
        let thetas: Vec<BigRational> = f
            .values()
            .iter()
            .map(|v| v.raw_theta().expect("exact").clone())
            .collect();
        let values = (0..=n)
            .map(|m| {
                let mut acc = BigRational::zero();
                for (k, theta) in thetas.iter().enumerate() {
                    let c = coeff(m, k);
                    if !c.is_zero() {
                        acc += c * theta;
                    }
                }
                PhaseElement::from_unreduced_theta(acc)
            })
            .collect();
        SymmetricPhaseFunction { n, values }
    } else {
        let values = (0..=n)
            .map(|m| {
                let mut acc = Complex64::new(1.0, 0.0);
                for k in 0..=n {
                    let c = coeff(m, k).to_f64().expect("finite");
                    if c != 0.0 {
                        acc *= (f.value(k).value().ln() * c).exp();
                    }
                }
                PhaseElement::approx(acc)
            })
            .collect();
        SymmetricPhaseFunction { n, values }
    }
}

/// Kravchuk transform `Fhat(m) = prod_k F(k)^{-2^{1-n} K^n_k(m)}`.
pub fn kravchuk_transform(f: &SymmetricPhaseFunction) -> SymmetricPhaseFunction {
    let n = f.n;
    symmetric_linear(f, |m, k| {
        let kv = kravchuk(n, k, m).expect("in range");
        two_pow(1 - n as i64) * BigRational::from_integer(-kv)
    })
}

/// Inversion `F(m) = prod_k Fhat(k)^{-1/2 K^n_k(m)}`.
pub fn invert_kravchuk(fhat: &SymmetricPhaseFunction) -> SymmetricPhaseFunction {
    let n = fhat.n;
    symmetric_linear(fhat, |m, k| {
        let kv = kravchuk(n, k, m).expect("in range");
        rat(-1, 2) * BigRational::from_integer(kv)
    })
}

/// Binomial transform `Ftilde(m) = prod_{k <= m} F(k)^{C(m,k) (-1)^{m-k}}`.
pub fn binomial_transform(f: &SymmetricPhaseFunction) -> SymmetricPhaseFunction {
    symmetric_linear(f, |m, k| {
        if k > m {
            BigRational::zero()
        } else {
            let b = binomial(m as i64, k as i64);
            let sign = if (m - k) % 2 == 0 { b } else { -b };
            BigRational::from_integer(sign)
        }
    })
}

/// Inversion `F(m) = prod_{k <= m} Ftilde(k)^{C(m,k)}`.
pub fn invert_binomial(ftilde: &SymmetricPhaseFunction) -> SymmetricPhaseFunction {
    symmetric_linear(ftilde, |m, k| {
        if k > m {
            BigRational::zero()
        } else {
            BigRational::from_integer(binomial(m as i64, k as i64))
        }
    })
}
