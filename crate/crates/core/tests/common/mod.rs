//! Shared helpers for integration tests: exact rational evaluation of the
//! hyperbolic expressions the closed-form line law is built from.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

/// exp(x) as an exact rational Taylor sum, truncated below 1e-60.
pub fn exp_rational(x: &BigRational) -> BigRational {
    let threshold = BigRational::new(BigInt::one(), BigInt::from(10u8).pow(60));
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    let mut k = 1u32;
    loop {
        term = term * x / BigRational::from_integer(BigInt::from(k));
        sum += term.clone();
        // once k exceeds |x| the terms decay monotonically
        if term.abs() < threshold && BigRational::from_integer(BigInt::from(k)) > x.abs() {
            return sum;
        }
        k += 1;
        assert!(k < 10_000, "exp series failed to converge");
    }
}

pub struct RationalHyperbolics {
    pub sinh: BigRational,
    pub cosh: BigRational,
}

/// sinh and cosh of the exact rational value of an f64.
pub fn hyperbolics(gamma: f64) -> RationalHyperbolics {
    let g = BigRational::from_float(gamma).expect("finite gamma");
    let e = exp_rational(&g);
    let einv = BigRational::one() / e.clone();
    let two = BigRational::from_integer(BigInt::from(2));
    RationalHyperbolics { sinh: (e.clone() - einv.clone()) / two.clone(), cosh: (e + einv) / two }
}

/// The two printed forms of the line-law denominator, evaluated exactly:
/// form1 = sinh(g)(sinh(g) - g) - (cosh(g) - 1)^2,
/// form2 = 2(cosh(g) - 1) - g sinh(g).
pub fn delta_forms_exact(gamma: f64) -> (BigRational, BigRational) {
    let g = BigRational::from_float(gamma).expect("finite gamma");
    let h = hyperbolics(gamma);
    let one = BigRational::one();
    let two = BigRational::from_integer(BigInt::from(2));
    let c1 = h.cosh.clone() - one;
    let form1 = h.sinh.clone() * (h.sinh.clone() - g.clone()) - c1.clone() * c1.clone();
    let form2 = two * c1 - g * h.sinh;
    (form1, form2)
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().expect("in f64 range")
}

/// Relative gap |a - b| / max(|a|, |b|) of two exact rationals, as f64.
pub fn relative_gap(a: &BigRational, b: &BigRational) -> f64 {
    let diff = (a - b).abs();
    if diff.is_zero() {
        return 0.0;
    }
    let scale = a.abs().max(b.abs());
    to_f64(&(diff / scale))
}
