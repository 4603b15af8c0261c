//! Triangle-group signatures, hypergeometric exponents, and the Möbius
//! elements acting on the upper half-plane.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::ComplexValue;

/// Orders (n1, n2, n3) of the elliptic vertices of a hyperbolic triangle group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    n1: i64,
    n2: i64,
    n3: i64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SignatureOptions {
    /// Admit order-2 vertices. Nothing downstream has been validated for them.
    pub allow_order_two: bool,
}

/// Checks orders and hyperbolicity. Orders below 3 are rejected.
pub fn validate_signature(n1: i64, n2: i64, n3: i64) -> Result<Signature> {
    validate_signature_with(n1, n2, n3, SignatureOptions::default())
}

pub fn validate_signature_with(n1: i64, n2: i64, n3: i64, opts: SignatureOptions) -> Result<Signature> {
    let min_order = if opts.allow_order_two { 2 } else { 3 };
    for n in [n1, n2, n3] {
        if n < min_order {
            return Err(Error::OrderTooSmall(n));
        }
    }
    let sum = Rational64::new(1, n1) + Rational64::new(1, n2) + Rational64::new(1, n3);
    if sum >= Rational64::one() {
        return Err(Error::NotHyperbolic(n1, n2, n3));
    }
    Ok(Signature { n1, n2, n3 })
}

impl Signature {
    pub fn orders(&self) -> [i64; 3] {
        [self.n1, self.n2, self.n3]
    }

    pub fn n1(&self) -> i64 {
        self.n1
    }

    pub fn n2(&self) -> i64 {
        self.n2
    }

    pub fn n3(&self) -> i64 {
        self.n3
    }

    /// The accessory parameters 1/n1, 1/n2, 1/n3.
    pub fn reciprocals(&self) -> [f64; 3] {
        [1.0 / self.n1 as f64, 1.0 / self.n2 as f64, 1.0 / self.n3 as f64]
    }

    pub fn exact_reciprocals(&self) -> [Rational64; 3] {
        [
            Rational64::new(1, self.n1),
            Rational64::new(1, self.n2),
            Rational64::new(1, self.n3),
        ]
    }

    /// Signature with the first two vertices exchanged.
    pub fn swapped12(&self) -> Signature {
        Signature {
            n1: self.n2,
            n2: self.n1,
            n3: self.n3,
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.n1, self.n2, self.n3)
    }
}

impl FromStr for Signature {
    type Err = Error;

    /// Parses `"n1,n2,n3"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Domain(format!("expected n1,n2,n3, got {s:?}")));
        }
        let mut n = [0i64; 3];
        for (slot, part) in n.iter_mut().zip(&parts) {
            *slot = part
                .parse()
                .map_err(|_| Error::Domain(format!("order {part:?} is not an integer")))?;
        }
        validate_signature(n[0], n[1], n[2])
    }
}

/// Exact exponents α, β, γ, α′, β′, γ′ of the hypergeometric equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactParams {
    pub alpha: Rational64,
    pub beta: Rational64,
    pub gamma: Rational64,
    pub alpha_p: Rational64,
    pub beta_p: Rational64,
    pub gamma_p: Rational64,
}

impl ExactParams {
    pub fn as_array(&self) -> [Rational64; 6] {
        [self.alpha, self.beta, self.gamma, self.alpha_p, self.beta_p, self.gamma_p]
    }
}

/// Floating-point exponents; carries the signature it was derived from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HypParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma_: f64,
    pub alpha_p: f64,
    pub beta_p: f64,
    pub gamma_p: f64,
    #[serde(skip)]
    signature: Signature,
}

impl HypParams {
    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn exact(&self) -> ExactParams {
        exact_params(&self.signature)
    }

    pub fn alpha_c(&self) -> ComplexValue {
        Complex64::new(self.alpha, 0.0)
    }

    pub fn beta_c(&self) -> ComplexValue {
        Complex64::new(self.beta, 0.0)
    }

    pub fn gamma_c(&self) -> ComplexValue {
        Complex64::new(self.gamma_, 0.0)
    }

    pub fn alpha_p_c(&self) -> ComplexValue {
        Complex64::new(self.alpha_p, 0.0)
    }

    pub fn beta_p_c(&self) -> ComplexValue {
        Complex64::new(self.beta_p, 0.0)
    }

    pub fn gamma_p_c(&self) -> ComplexValue {
        Complex64::new(self.gamma_p, 0.0)
    }
}

pub fn exact_params(sig: &Signature) -> ExactParams {
    let [p1, p2, p3] = sig.exact_reciprocals();
    let one = Rational64::one();
    let half = Rational64::new(1, 2);
    let alpha = half * (one - p1 - p2 - p3);
    let beta = half * (one - p1 - p2 + p3);
    let gamma = one - p1;
    ExactParams {
        alpha,
        beta,
        gamma,
        alpha_p: alpha - gamma + one,
        beta_p: beta - gamma + one,
        gamma_p: Rational64::from_integer(2) - gamma,
    }
}

fn to_f64(r: Rational64) -> f64 {
    r.to_f64().expect("small rationals convert to f64")
}

/// α = ½(1 − 1/n1 − 1/n2 − 1/n3), β = ½(1 − 1/n1 − 1/n2 + 1/n3), γ = 1 − 1/n1 and
/// the primed set α′ = α − γ + 1, β′ = β − γ + 1, γ′ = 2 − γ.
pub fn params_from_signature(sig: &Signature) -> Result<HypParams> {
    let exact = exact_params(sig);
    if let Some(bad) = exact.as_array().iter().find(|r| r.is_integer()) {
        return Err(Error::DegenerateParams(format!(
            "parameter {bad} of signature {sig} is an integer"
        )));
    }
    Ok(HypParams {
        alpha: to_f64(exact.alpha),
        beta: to_f64(exact.beta),
        gamma_: to_f64(exact.gamma),
        alpha_p: to_f64(exact.alpha_p),
        beta_p: to_f64(exact.beta_p),
        gamma_p: to_f64(exact.gamma_p),
        signature: *sig,
    })
}

/// Unit-determinant 2×2 real matrix, normalised so that its first nonzero
/// entry is positive (one representative of each PSL₂(ℝ) class).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MoebiusElement {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

pub const DETERMINANT_TOL: f64 = 1e-12;

impl MoebiusElement {
    pub const IDENTITY: MoebiusElement = MoebiusElement {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if (det - 1.0).abs() > DETERMINANT_TOL {
            return Err(Error::Domain(format!("determinant {det} is not 1")));
        }
        Ok(MoebiusElement { a, b, c, d }.normalized())
    }

    fn normalized(self) -> Self {
        let first = [self.a, self.b, self.c, self.d]
            .into_iter()
            .find(|v| *v != 0.0)
            .unwrap_or(1.0);
        if first < 0.0 {
            MoebiusElement {
                a: -self.a,
                b: -self.b,
                c: -self.c,
                d: -self.d,
            }
        } else {
            self
        }
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn determinant(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn compose(&self, rhs: &MoebiusElement) -> MoebiusElement {
        MoebiusElement {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
        .normalized()
    }

    pub fn inverse(&self) -> MoebiusElement {
        MoebiusElement {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
        .normalized()
    }

    /// `self` raised to an integer power; negative powers use the inverse.
    pub fn pow(&self, k: i64) -> MoebiusElement {
        let base = if k < 0 { self.inverse() } else { *self };
        (0..k.unsigned_abs()).fold(MoebiusElement::IDENTITY, |acc, _| acc.compose(&base))
    }

    /// Distance from ±I in the max norm.
    pub fn distance_to_identity(&self) -> f64 {
        let plus = (self.a - 1.0).abs().max(self.b.abs()).max(self.c.abs()).max((self.d - 1.0).abs());
        let minus = (self.a + 1.0).abs().max(self.b.abs()).max(self.c.abs()).max((self.d + 1.0).abs());
        plus.min(minus)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ElementKind {
    Identity,
    Parabolic,
    Elliptic,
    Hyperbolic,
    Loxodromic,
}

pub const CLASSIFY_TOL: f64 = 1e-12;

/// Classification by trace: parabolic for trace ±2, elliptic for |trace| < 2,
/// hyperbolic for |trace| > 2, loxodromic for a non-real trace.
pub fn classify_trace(trace: ComplexValue) -> ElementKind {
    if trace.im.abs() > CLASSIFY_TOL {
        return ElementKind::Loxodromic;
    }
    let t = trace.re.abs();
    if (t - 2.0).abs() <= CLASSIFY_TOL {
        ElementKind::Parabolic
    } else if t < 2.0 {
        ElementKind::Elliptic
    } else {
        ElementKind::Hyperbolic
    }
}

pub fn classify_element(m: &MoebiusElement) -> ElementKind {
    if m.distance_to_identity() <= CLASSIFY_TOL {
        return ElementKind::Identity;
    }
    classify_trace(Complex64::new(m.trace(), 0.0))
}

/// Classifies a complex unit-determinant matrix `[a, b, c, d]`.
pub fn classify_complex(m: [ComplexValue; 4]) -> ElementKind {
    let one = Complex64::new(1.0, 0.0);
    let off = m[1].norm().max(m[2].norm());
    let near = |s: f64| off.max((m[0] - s * one).norm()).max((m[3] - s * one).norm()) <= CLASSIFY_TOL;
    if near(1.0) || near(-1.0) {
        return ElementKind::Identity;
    }
    classify_trace(m[0] + m[3])
}

pub fn moebius_apply(m: &MoebiusElement, w: ComplexValue) -> Result<ComplexValue> {
    let den = m.c * w + m.d;
    if den.is_zero() {
        return Err(Error::Pole(format!("Möbius pole at w = {w}")));
    }
    Ok((m.a * w + m.b) / den)
}

/// Generator of the stabiliser of `w1`: rotation by 2π/n about `w1`, i.e.
/// (Aw − w1)/(Aw − w̄1) = e^{2πi/n} (w − w1)/(w − w̄1).
pub fn elliptic_generator(w1: ComplexValue, n: i64) -> Result<MoebiusElement> {
    if !(w1.im > 0.0) {
        return Err(Error::Domain(format!("rotation centre {w1} is not in the upper half-plane")));
    }
    if n < 2 {
        return Err(Error::OrderTooSmall(n));
    }
    let theta = std::f64::consts::PI / n as f64;
    let (s, c) = theta.sin_cos();
    let rotation = MoebiusElement { a: c, b: s, c: -s, d: c };
    // i -> w1 via w -> y w + x.
    let root = w1.im.sqrt();
    let to_w1 = MoebiusElement {
        a: root,
        b: w1.re / root,
        c: 0.0,
        d: 1.0 / root,
    };
    Ok(to_w1.compose(&rotation).compose(&to_w1.inverse()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn signature_validation() {
        assert!(validate_signature(3, 3, 4).is_ok());
        assert_eq!(validate_signature(3, 3, 3), Err(Error::NotHyperbolic(3, 3, 3)));
        assert_eq!(validate_signature(2, 3, 7), Err(Error::OrderTooSmall(2)));
        assert_eq!(validate_signature(3, 0, 7), Err(Error::OrderTooSmall(0)));
        let opts = SignatureOptions { allow_order_two: true };
        assert!(validate_signature_with(2, 3, 7, opts).is_ok());
        assert!(matches!(validate_signature_with(2, 3, 6, opts), Err(Error::NotHyperbolic(..))));
        assert_eq!("3, 3,4".parse::<Signature>().unwrap(), validate_signature(3, 3, 4).unwrap());
        assert!("3,3".parse::<Signature>().is_err());
        assert!("3,x,4".parse::<Signature>().is_err());
    }

    #[test]
    fn params_spot_values() {
        let r = Rational64::new;
        let p = exact_params(&validate_signature(3, 3, 4).unwrap());
        assert_eq!(p.as_array(), [r(1, 24), r(7, 24), r(2, 3), r(3, 8), r(5, 8), r(4, 3)]);
        let p = exact_params(&validate_signature(4, 4, 4).unwrap());
        assert_eq!(p.as_array(), [r(1, 8), r(3, 8), r(3, 4), r(3, 8), r(5, 8), r(5, 4)]);
        let p = exact_params(&validate_signature(3, 4, 5).unwrap());
        assert_eq!((p.alpha, p.beta, p.gamma), (r(13, 120), r(37, 120), r(2, 3)));

        let f = params_from_signature(&validate_signature(3, 3, 4).unwrap()).unwrap();
        assert_eq!(f.alpha, 1.0 / 24.0);
        assert_eq!(f.gamma_p, 4.0 / 3.0);
    }

    #[test]
    fn order_two_override_yields_parameters() {
        let opts = SignatureOptions { allow_order_two: true };
        let sig = validate_signature_with(2, 3, 7, opts).unwrap();
        assert!(params_from_signature(&sig).is_ok());
    }

    #[test]
    fn classification() {
        let m = |a, b, c, d| MoebiusElement::new(a, b, c, d).unwrap();
        assert_eq!(classify_element(&m(1.0, 1.0, 0.0, 1.0)), ElementKind::Parabolic);
        assert_eq!(classify_element(&m(2.0, 1.0, 1.0, 1.0)), ElementKind::Hyperbolic);
        let (s, c) = (PI / 4.0).sin_cos();
        assert_eq!(classify_element(&m(c, s, -s, c)), ElementKind::Elliptic);
        assert_eq!(classify_element(&MoebiusElement::IDENTITY), ElementKind::Identity);
        assert_eq!(classify_element(&m(-1.0, 0.0, 0.0, -1.0)), ElementKind::Identity);
        let z = Complex64::new;
        let lox = [z(2.0, 1.0), z(0.0, 0.0), z(0.0, 0.0), z(0.4, -0.2)];
        assert_eq!(classify_complex(lox), ElementKind::Loxodromic);
        assert!(MoebiusElement::new(1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn normalization_fixes_sign() {
        let m = MoebiusElement::new(-1.0, -1.0, 0.0, -1.0).unwrap();
        assert_eq!(m, MoebiusElement::new(1.0, 1.0, 0.0, 1.0).unwrap());
        let m = MoebiusElement::new(0.0, -1.0, 1.0, 0.0).unwrap();
        assert_eq!((m.a, m.b, m.c, m.d), (0.0, 1.0, -1.0, 0.0));
    }

    #[test]
    fn apply_examples() {
        let i = Complex64::new(0.0, 1.0);
        let w = Complex64::new(0.3, 2.0);
        assert_eq!(moebius_apply(&MoebiusElement::IDENTITY, w).unwrap(), w);
        let t = MoebiusElement::new(1.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(moebius_apply(&t, i).unwrap(), Complex64::new(1.0, 1.0));
        let s = MoebiusElement::new(0.0, -1.0, 1.0, 0.0).unwrap();
        let v = moebius_apply(&s, 2.0 * i).unwrap();
        assert!((v - 0.5 * i).norm() < 1e-15);
        assert!(moebius_apply(&s, Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn generator_about_i() {
        let a = elliptic_generator(Complex64::new(0.0, 1.0), 4).unwrap();
        let (s, c) = (PI / 4.0).sin_cos();
        for (got, want) in [(a.a, c), (a.b, s), (a.c, -s), (a.d, c)] {
            assert!((got - want).abs() < 1e-15);
        }
        assert!(elliptic_generator(Complex64::new(0.0, -1.0), 4).is_err());
    }

    #[test]
    fn generator_fixes_centre_and_has_order_n() {
        let w1 = Complex64::new(-0.7, 1.9);
        for n in [3, 4, 7] {
            let a = elliptic_generator(w1, n).unwrap();
            assert!((a.trace().abs() - 2.0 * (PI / n as f64).cos()).abs() < 1e-12);
            assert!((moebius_apply(&a, w1).unwrap() - w1).norm() < 1e-12);
            assert!(a.pow(n).distance_to_identity() < 1e-12);
            let w = Complex64::new(0.4, 0.8);
            let aw = moebius_apply(&a, w).unwrap();
            let lhs = (aw - w1) / (aw - w1.conj());
            let rot = Complex64::from_polar(1.0, 2.0 * PI / n as f64);
            let rhs = rot * (w - w1) / (w - w1.conj());
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }
}
