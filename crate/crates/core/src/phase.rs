//! Exact and approximate nonzero complex values for phase functions.
//!
//! Transform arithmetic needs fractional powers, and a fractional power of a
//! complex number is not unique. We keep a two-tier representation:
//!
//! * [`PhaseElement::Exact`] stores `e^{i pi theta}` with `theta` an exact
//!   rational. Values are compared and rendered modulo 2, but the stored
//!   exponent is *not* reduced by arithmetic: a fractional power scales the
//!   representative exponent, and exponent sums are accumulated over exact
//!   rationals before any reduction. Construction canonicalises user input
//!   into `[0, 2)`, which pins one deterministic branch for every power.
//! * [`PhaseElement::Approx`] stores an arbitrary nonzero complex value and
//!   uses the principal logarithm for powers. Any operation touching an
//!   `Approx` value yields an `Approx` value, so exactness is never claimed
//!   for results that left the exact tier.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Debug)]
pub enum PhaseElement {
    /// `e^{i pi theta}` with an exact rational exponent.
    Exact { theta: BigRational },
    /// Arbitrary nonzero complex value; powers use the principal branch.
    Approx { value: Complex64 },
}

fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Reduce a rational into `[0, 2)`.
fn reduce_mod_2(theta: &BigRational) -> BigRational {
    let two = BigRational::from_integer(BigInt::from(2));
    let q = (theta / &two).floor();
    theta - q * two
}

impl PhaseElement {
    pub fn one() -> Self {
        PhaseElement::Exact {
            theta: BigRational::zero(),
        }
    }

    pub fn minus_one() -> Self {
        PhaseElement::Exact {
            theta: BigRational::one(),
        }
    }

    pub fn i() -> Self {
        PhaseElement::Exact {
            theta: rational(1, 2),
        }
    }

    pub fn minus_i() -> Self {
        PhaseElement::Exact {
            theta: rational(3, 2),
        }
    }

    /// `omega = e^{i pi / 4}`.
    pub fn omega() -> Self {
        PhaseElement::Exact {
            theta: rational(1, 4),
        }
    }

    /// Exact phase `e^{i pi num/den}`, canonicalised into `[0, 2)`.
    pub fn from_theta(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        PhaseElement::Exact {
            theta: reduce_mod_2(&rational(num, den)),
        }
    }

    pub fn from_rational_theta(theta: BigRational) -> Self {
        PhaseElement::Exact {
            theta: reduce_mod_2(&theta),
        }
    }

    /// Raw exact element keeping the caller's representative exponent.
    pub fn from_unreduced_theta(theta: BigRational) -> Self {
        PhaseElement::Exact { theta }
    }

    pub fn approx(value: Complex64) -> Self {
        assert!(value.norm() > 0.0, "phase elements must be nonzero");
        PhaseElement::Approx { value }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, PhaseElement::Exact { .. })
    }

    /// The stored exponent reduced into `[0, 2)`, if exact.
    pub fn canonical_theta(&self) -> Option<BigRational> {
        match self {
            PhaseElement::Exact { theta } => Some(reduce_mod_2(theta)),
            PhaseElement::Approx { .. } => None,
        }
    }

    /// The representative exponent as stored (possibly outside `[0, 2)`).
    pub fn raw_theta(&self) -> Option<&BigRational> {
        match self {
            PhaseElement::Exact { theta } => Some(theta),
            PhaseElement::Approx { .. } => None,
        }
    }

    pub fn value(&self) -> Complex64 {
        match self {
            PhaseElement::Exact { theta } => {
                let t = reduce_mod_2(theta)
                    .to_f64()
                    .expect("rational exponent fits in f64");
                Complex64::from_polar(1.0, PI * t)
            }
            PhaseElement::Approx { value } => *value,
        }
    }

    pub fn mul(&self, other: &PhaseElement) -> PhaseElement {
        match (self, other) {
            (PhaseElement::Exact { theta: a }, PhaseElement::Exact { theta: b }) => {
                PhaseElement::Exact { theta: a + b }
            }
            _ => PhaseElement::approx(self.value() * other.value()),
        }
    }

    /// Raise to an exact rational power.
    ///
    /// In the exact tier this scales the representative exponent, so chained
    /// transforms stay on one consistent branch. In the approximate tier the
    /// principal logarithm is used.
    pub fn pow(&self, exponent: &BigRational) -> PhaseElement {
        match self {
            PhaseElement::Exact { theta } => PhaseElement::Exact {
                theta: theta * exponent,
            },
            PhaseElement::Approx { value } => {
                let e = exponent.to_f64().expect("exponent fits in f64");
                let ln = value.ln();
                PhaseElement::approx((ln * e).exp())
            }
        }
    }

    pub fn pow_int(&self, exponent: i64) -> PhaseElement {
        self.pow(&rational(exponent, 1))
    }

    pub fn inverse(&self) -> PhaseElement {
        self.pow_int(-1)
    }

    /// Equality of the represented values: exact pairs compare exponents
    /// modulo 2; anything else compares complex values within `tol`.
    pub fn eq_value(&self, other: &PhaseElement, tol: f64) -> bool {
        match (self, other) {
            (PhaseElement::Exact { theta: a }, PhaseElement::Exact { theta: b }) => {
                reduce_mod_2(a) == reduce_mod_2(b)
            }
            _ => (self.value() - other.value()).norm() <= tol,
        }
    }

    pub fn is_one(&self, tol: f64) -> bool {
        self.eq_value(&PhaseElement::one(), tol)
    }
}

/// JSON form: `{"theta_num": p, "theta_den": q}` for exact phases (reduced
/// modulo 2), `{"re": x, "im": y}` for approximate values.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PhaseElementRepr {
    Exact { theta_num: i64, theta_den: i64 },
    Approx { re: f64, im: f64 },
}

impl Serialize for PhaseElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            PhaseElement::Exact { theta } => {
                let t = reduce_mod_2(theta);
                let num = t.numer().to_i64().ok_or_else(|| {
                    serde::ser::Error::custom("exact phase numerator exceeds i64 range")
                })?;
                let den = t.denom().to_i64().ok_or_else(|| {
                    serde::ser::Error::custom("exact phase denominator exceeds i64 range")
                })?;
                PhaseElementRepr::Exact {
                    theta_num: num,
                    theta_den: den,
                }
            }
            PhaseElement::Approx { value } => PhaseElementRepr::Approx {
                re: value.re,
                im: value.im,
            },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PhaseElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match PhaseElementRepr::deserialize(d)? {
            PhaseElementRepr::Exact {
                theta_num,
                theta_den,
            } => {
                if theta_den == 0 {
                    return Err(serde::de::Error::custom("zero denominator"));
                }
                Ok(PhaseElement::from_theta(theta_num, theta_den))
            }
            PhaseElementRepr::Approx { re, im } => {
                let v = Complex64::new(re, im);
                if v.norm() == 0.0 {
                    return Err(serde::de::Error::custom("phase element must be nonzero"));
                }
                Ok(PhaseElement::approx(v))
            }
        }
    }
}

/// Convenience: `e^{i pi theta}` for an arbitrary rational exponent sum.
pub fn phase_value(theta: &BigRational) -> Complex64 {
    PhaseElement::from_unreduced_theta(theta.clone()).value()
}

/// True when `theta` is an even integer, i.e. `e^{i pi theta} = 1`.
pub fn theta_is_trivial(theta: &BigRational) -> bool {
    reduce_mod_2(theta).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_value_of_roots_of_unity() {
        assert!((PhaseElement::i().value() - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((PhaseElement::minus_one().value() - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        let w = PhaseElement::omega().value();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((w - Complex64::new(s, s)).norm() < 1e-15);
    }

    #[test]
    fn exact_power_keeps_branch() {
        // (-1)^(-1/2) under the canonical branch: theta = 1 lifted, scaled by
        // -1/2, giving e^{-i pi / 2} = -i.
        let m = PhaseElement::minus_one();
        let p = m.pow(&rational(-1, 2));
        assert!(p.eq_value(&PhaseElement::minus_i(), 0.0));
    }

    #[test]
    fn unreduced_sums_stay_exact() {
        // theta = -2 represents the value 1 but keeps its branch information.
        let e = PhaseElement::from_unreduced_theta(rational(-2, 1));
        assert!(e.is_one(0.0));
        // scaling by -1/2 now gives theta = 1, i.e. -1, not +1
        assert!(e
            .pow(&rational(-1, 2))
            .eq_value(&PhaseElement::minus_one(), 0.0));
    }

    #[test]
    fn approx_results_are_flagged() {
        let a = PhaseElement::approx(Complex64::new(0.0, 1.0));
        let b = PhaseElement::i();
        assert!(!a.mul(&b).is_exact());
        assert!(a.mul(&b).eq_value(&PhaseElement::minus_one(), 1e-12));
    }

    #[test]
    fn json_round_trip() {
        let e = PhaseElement::from_theta(-3, 4);
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(s, r#"{"theta_num":5,"theta_den":4}"#);
        let back: PhaseElement = serde_json::from_str(&s).unwrap();
        assert!(back.eq_value(&e, 0.0));

        let a = PhaseElement::approx(Complex64::new(0.25, -1.0));
        let s = serde_json::to_string(&a).unwrap();
        let back: PhaseElement = serde_json::from_str(&s).unwrap();
        assert!(back.eq_value(&a, 0.0));
    }
}
