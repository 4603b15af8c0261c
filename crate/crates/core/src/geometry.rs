//! The Schwarz triangle map `f = g2/g1` built from two solutions of the
//! hypergeometric equation, its vertices, hyperbolic side lengths, and both
//! sides of the Schwarzian equation.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{HypParams, Signature};
use crate::special::{gamma, hyp2f1, hyp2f1_deriv, principal_pow, ComplexValue};

/// Values of g1 = ₂F₁(α, β; γ; ξ) and g2 = ξ^{1−γ} ₂F₁(α′, β′; γ′; ξ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisPair {
    pub g1: ComplexValue,
    pub g2: ComplexValue,
}

/// Basis values together with their first derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisJet {
    pub g1: ComplexValue,
    pub dg1: ComplexValue,
    pub g2: ComplexValue,
    pub dg2: ComplexValue,
}

impl BasisJet {
    pub fn pair(&self) -> BasisPair {
        BasisPair { g1: self.g1, g2: self.g2 }
    }

    pub fn wronskian(&self) -> ComplexValue {
        self.g1 * self.dg2 - self.dg1 * self.g2
    }
}

/// Drops a negative zero imaginary part so that points on the real axis are
/// read as limits from the upper half-plane.
pub(crate) fn from_above(xi: ComplexValue) -> ComplexValue {
    if xi.im == 0.0 {
        Complex64::new(xi.re, 0.0)
    } else {
        xi
    }
}

fn check_domain(xi: ComplexValue) -> Result<ComplexValue> {
    let xi = from_above(xi);
    if !xi.is_finite() {
        return Err(Error::Domain(format!("non-finite point {xi}")));
    }
    if xi.im == 0.0 && xi.re > 1.0 {
        return Err(Error::BranchCut(format!("{xi}")));
    }
    Ok(xi)
}

pub fn basis_solutions(p: &HypParams, xi: ComplexValue) -> Result<BasisPair> {
    let xi = check_domain(xi)?;
    let g1 = hyp2f1(p.alpha_c(), p.beta_c(), p.gamma_c(), xi)?;
    let power = principal_pow(xi, Complex64::new(1.0 - p.gamma_, 0.0))?;
    let g2 = if power == Complex64::new(0.0, 0.0) {
        power
    } else {
        power * hyp2f1(p.alpha_p_c(), p.beta_p_c(), p.gamma_p_c(), xi)?
    };
    Ok(BasisPair { g1, g2 })
}

/// Values and derivatives; ξ must avoid 0 and 1, where g2′ or g1′ blow up.
pub fn basis_jet(p: &HypParams, xi: ComplexValue) -> Result<BasisJet> {
    let xi = check_domain(xi)?;
    if xi == Complex64::new(0.0, 0.0) || xi == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole(format!("basis derivatives are singular at {xi}")));
    }
    let (a, b, c) = (p.alpha_c(), p.beta_c(), p.gamma_c());
    let (ap, bp, cp) = (p.alpha_p_c(), p.beta_p_c(), p.gamma_p_c());
    let s = 1.0 - p.gamma_;
    let g1 = hyp2f1(a, b, c, xi)?;
    let dg1 = hyp2f1_deriv(a, b, c, xi)?;
    let h = hyp2f1(ap, bp, cp, xi)?;
    let dh = hyp2f1_deriv(ap, bp, cp, xi)?;
    let power = principal_pow(xi, Complex64::new(s, 0.0))?;
    let g2 = power * h;
    let dg2 = power * (s * h / xi + dh);
    Ok(BasisJet { g1, dg1, g2, dg2 })
}

/// The Schwarz triangle function f(ξ) = g2(ξ)/g1(ξ).
pub fn schwarz_map(p: &HypParams, xi: ComplexValue) -> Result<ComplexValue> {
    let BasisPair { g1, g2 } = basis_solutions(p, xi)?;
    if g1.norm() < 1e-300 {
        return Err(Error::ZeroDenominator(format!("g1 vanishes at {xi}")));
    }
    Ok(g2 / g1)
}

/// Vertices of the Schwarz-map triangle: f(0), f(1), f(∞).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriangleVertices {
    pub w1: ComplexValue,
    pub w2: ComplexValue,
    pub w3: ComplexValue,
}

fn g(x: f64) -> Result<f64> {
    Ok(gamma(Complex64::new(x, 0.0))?.re)
}

/// Γ(2−γ)Γ(γ−α)Γ(γ−β) / (Γ(γ)Γ(1−α)Γ(1−β)).
pub fn w2_formula(p: &HypParams) -> Result<f64> {
    let (a, b, c) = (p.alpha, p.beta, p.gamma_);
    Ok(g(2.0 - c)? * g(c - a)? * g(c - b)? / (g(c)? * g(1.0 - a)? * g(1.0 - b)?))
}

/// A commonly quoted closed form for the third vertex,
/// e^{πi(1−γ)} Γ(α)Γ(γ−β)Γ(2−β) / (Γ(γ)Γ(α−γ+1)Γ(1−β)).
pub fn w3_formula_as_printed(p: &HypParams) -> Result<ComplexValue> {
    let (a, b, c) = (p.alpha, p.beta, p.gamma_);
    let modulus = g(a)? * g(c - b)? * g(2.0 - b)? / (g(c)? * g(a - c + 1.0)? * g(1.0 - b)?);
    Ok(Complex64::from_polar(modulus, PI * (1.0 - c)))
}

/// Ratio of the dominant coefficients of g2 and g1 at ξ = ∞ (the (−ξ)^{−α}
/// terms, since β − α = 1/n3 > 0):
/// e^{πi(1−γ)} Γ(2−γ)Γ(β)Γ(γ−α) / (Γ(γ)Γ(β′)Γ(1−α)).
pub fn w3_connection(p: &HypParams) -> Result<ComplexValue> {
    let (a, b, c) = (p.alpha, p.beta, p.gamma_);
    let modulus = g(2.0 - c)? * g(b)? * g(c - a)? / (g(c)? * g(p.beta_p)? * g(1.0 - a)?);
    Ok(Complex64::from_polar(modulus, PI * (1.0 - c)))
}

/// lim f(it) as t → ∞.
///
/// Near ∞ the map is a Möbius image of σ = h2/h1, the ratio of the local
/// solutions with exponents β and α at infinity, and σ → 0. Three samples on
/// the imaginary axis fix that Möbius map; its value at σ = 0 is the limit.
pub fn w3_limit(p: &HypParams) -> Result<ComplexValue> {
    w3_limit_from(p, [8.0, 16.0, 32.0])
}

pub fn w3_limit_from(p: &HypParams, heights: [f64; 3]) -> Result<ComplexValue> {
    let mut fit = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 3];
    for (slot, &t) in fit.iter_mut().zip(&heights) {
        let xi = Complex64::new(0.0, t);
        *slot = (exponent_ratio_at_infinity(p, xi)?, schwarz_map(p, xi)?);
    }
    ThreePointMoebius::new(fit).value_at(Complex64::new(0.0, 0.0))
}

/// σ = h2/h1 where h1 = (−ξ)^{−α} ₂F₁(α, α−γ+1; α−β+1; 1/ξ) and
/// h2 = (−ξ)^{−β} ₂F₁(β, β−γ+1; β−α+1; 1/ξ); σ ≈ (−ξ)^{−1/n3} for large ξ.
pub fn exponent_ratio_at_infinity(p: &HypParams, xi: ComplexValue) -> Result<ComplexValue> {
    let (a, b, c) = (p.alpha_c(), p.beta_c(), p.gamma_c());
    let inv = 1.0 / xi;
    let h1 = principal_pow(-xi, -a)? * hyp2f1(a, a - c + 1.0, a - b + 1.0, inv)?;
    let h2 = principal_pow(-xi, -b)? * hyp2f1(b, b - c + 1.0, b - a + 1.0, inv)?;
    Ok(h2 / h1)
}

/// σ = u2/u1 where u1 = ₂F₁(α, β; α+β−γ+1; 1−ξ) and
/// u2 = (1−ξ)^{γ−α−β} ₂F₁(γ−α, γ−β; γ−α−β+1; 1−ξ); σ ≈ (1−ξ)^{1/n2} near 1.
pub fn exponent_ratio_at_one(p: &HypParams, xi: ComplexValue) -> Result<ComplexValue> {
    let (a, b, c) = (p.alpha_c(), p.beta_c(), p.gamma_c());
    let y = 1.0 - xi;
    let s = c - a - b;
    let u1 = hyp2f1(a, b, 1.0 - s, y)?;
    let u2 = principal_pow(y, s)? * hyp2f1(c - a, c - b, s + 1.0, y)?;
    Ok(u2 / u1)
}

/// The Möbius map through three (preimage, image) pairs, evaluated through
/// cross-ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreePointMoebius {
    points: [(ComplexValue, ComplexValue); 3],
}

impl ThreePointMoebius {
    pub fn new(points: [(ComplexValue, ComplexValue); 3]) -> Self {
        ThreePointMoebius { points }
    }

    /// Image of `s`.
    pub fn value_at(&self, s: ComplexValue) -> Result<ComplexValue> {
        let [(s1, f1), (s2, f2), (s3, f3)] = self.points;
        Self::solve(s, [s1, s2, s3], [f1, f2, f3])
    }

    /// Preimage of `f`.
    pub fn preimage(&self, f: ComplexValue) -> Result<ComplexValue> {
        let [(s1, f1), (s2, f2), (s3, f3)] = self.points;
        Self::solve(f, [f1, f2, f3], [s1, s2, s3])
    }

    // Maps x to y given x_k -> y_k, via (y−y1)(y2−y3)/((y−y3)(y2−y1)) = same in x.
    fn solve(x: ComplexValue, xs: [ComplexValue; 3], ys: [ComplexValue; 3]) -> Result<ComplexValue> {
        let [x1, x2, x3] = xs;
        let [y1, y2, y3] = ys;
        if x == x3 {
            return Ok(y3);
        }
        let r = (x - x1) * (x2 - x3) / ((x - x3) * (x2 - x1));
        let den = (y2 - y3) - r * (y2 - y1);
        if !r.is_finite() || den.norm() < 1e-300 {
            return Err(Error::ZeroDenominator("degenerate three-point Möbius map".into()));
        }
        Ok((y1 * (y2 - y3) - r * y3 * (y2 - y1)) / den)
    }
}

/// w1 = 0, w2 from the Gamma formula, w3 from the numerical limit.
pub fn vertices(p: &HypParams) -> Result<TriangleVertices> {
    Ok(TriangleVertices {
        w1: Complex64::new(0.0, 0.0),
        w2: Complex64::new(w2_formula(p)?, 0.0),
        w3: w3_limit(p)?,
    })
}

/// Comparison of the printed third-vertex formula with the limit value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct W3Audit {
    pub printed: ComplexValue,
    pub limit: ComplexValue,
    pub connection: ComplexValue,
    /// |printed − limit| / |limit|
    pub printed_rel_diff: f64,
    /// |connection − limit| / |limit|
    pub connection_rel_diff: f64,
}

impl W3Audit {
    pub fn printed_agrees(&self, tol: f64) -> bool {
        self.printed_rel_diff <= tol
    }
}

pub fn w3_audit(p: &HypParams) -> Result<W3Audit> {
    let printed = w3_formula_as_printed(p)?;
    let limit = w3_limit(p)?;
    let connection = w3_connection(p)?;
    Ok(W3Audit {
        printed,
        limit,
        connection,
        printed_rel_diff: (printed - limit).norm() / limit.norm(),
        connection_rel_diff: (connection - limit).norm() / limit.norm(),
    })
}

/// tanh²(d/2) for the side joining the two vertices other than `opposite`
/// (0-based), in a triangle with angles π/n1, π/n2, π/n3.
pub fn tanh_sq_half_side(sig: &Signature, opposite: usize) -> f64 {
    let p = sig.reciprocals();
    let k = opposite;
    let (i, j) = match k {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let half = |x: f64| (0.5 * x * PI).cos();
    half(p[0] + p[1] + p[2]) * half(p[i] + p[j] - p[k]) / (half(p[j] + p[k] - p[i]) * half(p[k] + p[i] - p[j]))
}

/// tanh²(d_h(w1, w2)/2) from the three angles.
pub fn tanh_sq_half_dist_angles(sig: &Signature) -> f64 {
    tanh_sq_half_side(sig, 2)
}

/// tanh²(d_h(w1, w2)/2) = sin πα sin πβ / (sin πα′ sin πβ′).
pub fn tanh_sq_half_dist_sines(p: &HypParams) -> f64 {
    let s = |x: f64| (PI * x).sin();
    s(p.alpha) * s(p.beta) / (s(p.alpha_p) * s(p.beta_p))
}

/// Upper half-plane distance, tanh(d/2) = |(z − w)/(z − w̄)|.
pub fn hyperbolic_distance(z: ComplexValue, w: ComplexValue) -> Result<f64> {
    if !(z.im > 0.0 && w.im > 0.0) {
        return Err(Error::Domain(format!("{z} or {w} is not in the upper half-plane")));
    }
    let chord = (z - w).norm() / (2.0 * (z.im * w.im).sqrt());
    Ok(2.0 * chord.asinh())
}

/// Right-hand side of the Schwarzian equation with accessory parameters 1/nᵢ.
pub fn schwarzian_rhs(sig: &Signature, xi: ComplexValue) -> Result<ComplexValue> {
    if xi == Complex64::new(0.0, 0.0) || xi == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole(format!("Schwarzian right-hand side at {xi}")));
    }
    let [p1, p2, p3] = sig.reciprocals();
    let (q1, q2, q3) = (p1 * p1, p2 * p2, p3 * p3);
    let one_minus = 1.0 - xi;
    Ok((1.0 - q1) / (2.0 * xi * xi)
        + (1.0 - q2) / (2.0 * one_minus * one_minus)
        + (1.0 - q1 - q2 + q3) / (2.0 * xi * one_minus))
}

/// Coefficients of g″ + P g′ + Q g = 0 and dP/dξ.
#[derive(Debug, Clone, Copy)]
pub struct OdeCoefficients {
    pub p: ComplexValue,
    pub dp: ComplexValue,
    pub q: ComplexValue,
}

pub fn ode_coefficients(params: &HypParams, xi: ComplexValue) -> OdeCoefficients {
    let (a, b, c) = (params.alpha, params.beta, params.gamma_);
    let num = c - (a + b + 1.0) * xi;
    let den = xi * (1.0 - xi);
    OdeCoefficients {
        p: num / den,
        dp: (-(a + b + 1.0) * den - num * (1.0 - 2.0 * xi)) / (den * den),
        q: a * b / (xi * (xi - 1.0)),
    }
}

/// {u/v, ξ} for any two independent solutions u, v of the hypergeometric
/// equation, from the denominator `v` and its slope.
///
/// With y = (u/v)″/(u/v)′ = −P − 2v′/v, the ODE gives
/// y′ = −P′ + 2P v′/v + 2Q + 2(v′/v)², and {u/v, ξ} = y′ − y²/2.
pub fn schwarzian_from_denominator(
    coef: &OdeCoefficients,
    v: ComplexValue,
    dv: ComplexValue,
) -> Result<ComplexValue> {
    if v.norm() < 1e-300 {
        return Err(Error::ZeroDenominator("denominator solution vanishes".into()));
    }
    let u = dv / v;
    let y = -coef.p - 2.0 * u;
    let dy = -coef.dp + 2.0 * coef.p * u + 2.0 * coef.q + 2.0 * u * u;
    Ok(dy - 0.5 * y * y)
}

/// {f, ξ} for the Schwarz map f = g2/g1, evaluated from the basis functions.
pub fn schwarzian_lhs(p: &HypParams, xi: ComplexValue) -> Result<ComplexValue> {
    if xi == Complex64::new(0.0, 0.0) || xi == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole(format!("Schwarzian at {xi}")));
    }
    let jet = basis_jet(p, xi)?;
    schwarzian_from_denominator(&ode_coefficients(p, xi), jet.g1, jet.dg1)
}
