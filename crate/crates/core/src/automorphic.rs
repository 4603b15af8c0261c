//! The automorphic function ξ(w): the inverse of the Schwarz map once the
//! triangle has been placed in the upper half-plane.
//!
//! With `z = (w − w1)/(w − w̄1)` the Cayley coordinate centred at the base
//! vertex, the embedding is `z = e^{iθ} K g2/g1`, i.e.
//!
//! ```text
//! w = (w1 g1 − κ w̄1 g2) / (g1 − κ g2),     κ = e^{iθ} K.
//! ```
//!
//! Since the Wronskian of (g1, g2) is `(1−γ) ξ^{−γ} (1−ξ)^{γ−α−β−1}`, both
//! dw/dξ and its reciprocal dξ/dw have closed forms, and the inverse is found
//! by a damped Newton iteration.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    basis_jet, basis_solutions, exponent_ratio_at_infinity, exponent_ratio_at_one, hyperbolic_distance,
    schwarz_map, tanh_sq_half_dist_angles, tanh_sq_half_dist_sines, w3_limit, ThreePointMoebius,
};
use crate::group::{elliptic_generator, moebius_apply, HypParams, MoebiusElement};
use crate::special::{gamma, hyp2f1, principal_pow, ComplexValue};

fn g(x: f64) -> Result<f64> {
    Ok(gamma(Complex64::new(x, 0.0))?.re)
}

/// K = (Γ(1−α)Γ(1−β)Γ(α′)Γ(β′) / (Γ(α)Γ(β)Γ(1−α′)Γ(1−β′)))^{1/2} Γ(γ)/Γ(γ′).
pub fn constant_k(p: &HypParams) -> Result<f64> {
    let (a, b, c) = (p.alpha, p.beta, p.gamma_);
    let (ap, bp, cp) = (p.alpha_p, p.beta_p, p.gamma_p);
    let quotient = g(1.0 - a)? * g(1.0 - b)? * g(ap)? * g(bp)? / (g(a)? * g(b)? * g(1.0 - ap)? * g(1.0 - bp)?);
    if !(quotient > 0.0) {
        return Err(Error::Domain(format!("Gamma quotient {quotient} under the root is not positive")));
    }
    Ok(quotient.sqrt() * g(c)? / g(cp)?)
}

/// K from the side length: tanh(d_h(w1, w2)/2) Γ(γ)Γ(1−α)Γ(1−β) / (Γ(γ′)Γ(1−α′)Γ(1−β′)),
/// with the side length taken from the angle form.
pub fn constant_k_from_distance(p: &HypParams) -> Result<f64> {
    let (a, b, c) = (p.alpha, p.beta, p.gamma_);
    let (ap, bp, cp) = (p.alpha_p, p.beta_p, p.gamma_p);
    let tanh = tanh_sq_half_dist_angles(&p.signature()).sqrt();
    Ok(tanh * g(c)? * g(1.0 - a)? * g(1.0 - b)? / (g(cp)? * g(1.0 - ap)? * g(1.0 - bp)?))
}

/// The K that makes the embedded side w1w2 as long as the sine form says:
/// K f(1) = tanh(d_h/2), with f(1) from the Schwarz map itself.
pub fn constant_k_back_solved(p: &HypParams) -> Result<f64> {
    let f1 = schwarz_map(p, Complex64::new(1.0, 0.0))?;
    Ok(tanh_sq_half_dist_sines(p).sqrt() / f1.re)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingOptions {
    /// Base elliptic point, image of ξ = 0.
    pub w1: ComplexValue,
    /// Phase θ of the side w1w2 in the Cayley coordinate about w1.
    pub rotation: f64,
}

impl Default for EmbeddingOptions {
    fn default() -> Self {
        EmbeddingOptions {
            w1: Complex64::new(0.0, 1.0),
            rotation: 0.0,
        }
    }
}

/// Local inverse near w2 or w3: z/K = M(σ) with σ the ratio of the local
/// exponent solutions.
#[derive(Debug, Clone, Copy)]
struct VertexChart {
    moebius: ThreePointMoebius,
    order: i64,
}

#[derive(Debug, Clone, Copy)]
struct Seed {
    z: ComplexValue,
    xi: ComplexValue,
}

/// The triangle placed in the upper half-plane, with everything needed to
/// evaluate ξ(w) and dξ/dw. Immutable once built.
#[derive(Debug, Clone)]
pub struct TriangleEmbedding {
    params: HypParams,
    w1: ComplexValue,
    rotation: f64,
    k: f64,
    kappa: ComplexValue,
    c0: f64,
    c0_fitted: f64,
    c: ComplexValue,
    w2_embedded: ComplexValue,
    w3_embedded: ComplexValue,
    // Reference disk coordinates (rotation removed) of w2 and w3.
    z2: ComplexValue,
    z3: ComplexValue,
    side23_centre: ComplexValue,
    side23_radius_sq: f64,
    generator: MoebiusElement,
    seeds: Vec<Seed>,
    chart2: VertexChart,
    chart3: VertexChart,
}

/// One evaluated point of the map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MapSample {
    pub w: ComplexValue,
    pub xi: ComplexValue,
    pub dxi_dw: ComplexValue,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    pub xi: ComplexValue,
    /// |w(ξ) − w| at the returned ξ.
    pub residual: f64,
    pub iterations: usize,
}

pub const SEED_GRID: usize = 32;
pub const MAX_NEWTON_ITERATIONS: usize = 100;
pub const MAX_HALVINGS: usize = 40;
/// Relative residual |w(ξ) − w| / (1 + |w|) accepted as converged.
pub const INVERSION_TOL: f64 = 1e-10;
pub const SIDE_TOL: f64 = 1e-12;

/// Limits of the damped Newton inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionOptions {
    pub max_iterations: usize,
    pub max_halvings: usize,
    /// Accepted residual relative to 1 + |w|.
    pub tol: f64,
}

impl Default for InversionOptions {
    fn default() -> Self {
        InversionOptions {
            max_iterations: MAX_NEWTON_ITERATIONS,
            max_halvings: MAX_HALVINGS,
            tol: INVERSION_TOL,
        }
    }
}
/// Below this distance to w1 the power-law seed is used.
pub const VERTEX_SEED_RADIUS: f64 = 0.05;
/// Reference-disk distance at which a point is taken to be the vertex w2 or w3.
pub const VERTEX_SNAP: f64 = 1e-13;

/// Point (i, j) of the n×m reference cell in the ξ half-plane:
/// ξ = (u/(1−u)) e^{iθ}, θ = π(i + ½)/n, u = (j + ½)/m.
pub fn reference_cell_point(i: usize, j: usize, n: usize, m: usize) -> ComplexValue {
    let theta = PI * (i as f64 + 0.5) / n as f64;
    let u = (j as f64 + 0.5) / m as f64;
    Complex64::from_polar(u / (1.0 - u), theta)
}

/// Canonical embedding: w1 = i, θ = 0.
pub fn build_embedding(p: &HypParams) -> Result<TriangleEmbedding> {
    build_embedding_with(p, EmbeddingOptions::default())
}

pub fn build_embedding_with(p: &HypParams, opts: EmbeddingOptions) -> Result<TriangleEmbedding> {
    let w1 = opts.w1;
    if !(w1.im > 0.0) || !w1.is_finite() {
        return Err(Error::Domain(format!("base point {w1} is not in the upper half-plane")));
    }
    let k = constant_k(p)?;
    let kappa = Complex64::from_polar(k, opts.rotation);
    let c0 = 1.0 - p.gamma_;
    let c0_fitted = wronskian_constant(p, Complex64::new(0.25, 0.0))?.re;
    if ((c0_fitted - c0) / c0).abs() > 1e-8 {
        return Err(Error::Domain(format!(
            "Wronskian constant {c0_fitted} disagrees with 1 - gamma = {c0}"
        )));
    }
    let c = 1.0 / (c0 * kappa * (w1 - w1.conj()));

    let z2 = k * schwarz_map(p, Complex64::new(1.0, 0.0))?;
    let z3 = k * w3_limit(p)?;
    let (side23_centre, side23_radius_sq) = orthogonal_circle(z2, z3)?;
    let generator = elliptic_generator(w1, p.signature().n1())?;

    let chart2 = {
        let mut fit = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 3];
        for (slot, phi) in fit.iter_mut().zip([0.25, 0.5, 0.75]) {
            let xi = 1.0 - Complex64::from_polar(0.05, -PI * phi);
            *slot = (exponent_ratio_at_one(p, xi)?, schwarz_map(p, xi)?);
        }
        VertexChart {
            moebius: ThreePointMoebius::new(fit),
            order: p.signature().n2(),
        }
    };
    let chart3 = {
        let mut fit = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 3];
        for (slot, t) in fit.iter_mut().zip([8.0, 16.0, 32.0]) {
            let xi = Complex64::new(0.0, t);
            *slot = (exponent_ratio_at_infinity(p, xi)?, schwarz_map(p, xi)?);
        }
        VertexChart {
            moebius: ThreePointMoebius::new(fit),
            order: p.signature().n3(),
        }
    };

    let mut e = TriangleEmbedding {
        params: *p,
        w1,
        rotation: opts.rotation,
        k,
        kappa,
        c0,
        c0_fitted,
        c,
        w2_embedded: Complex64::new(0.0, 0.0),
        w3_embedded: Complex64::new(0.0, 0.0),
        z2,
        z3,
        side23_centre,
        side23_radius_sq,
        generator,
        seeds: Vec::with_capacity(SEED_GRID * SEED_GRID),
        chart2,
        chart3,
    };
    e.w2_embedded = e.from_reference_disk(z2);
    e.w3_embedded = e.from_reference_disk(z3);
    for i in 0..SEED_GRID {
        for j in 0..SEED_GRID {
            let xi = reference_cell_point(i, j, SEED_GRID, SEED_GRID);
            if let Ok(f) = schwarz_map(p, xi) {
                if f.is_finite() {
                    e.seeds.push(Seed { z: k * f, xi });
                }
            }
        }
    }
    Ok(e)
}

/// W(ξ) ξ^γ (1−ξ)^{1+α+β−γ}, with W = g1 g2′ − g1′ g2 from the basis
/// functions. Constant, equal to 1 − γ.
pub fn wronskian_constant(p: &HypParams, xi: ComplexValue) -> Result<ComplexValue> {
    let jet = basis_jet(p, xi)?;
    let scale = principal_pow(xi, Complex64::new(p.gamma_, 0.0))?
        * principal_pow(1.0 - xi, Complex64::new(1.0 + p.alpha + p.beta - p.gamma_, 0.0))?;
    Ok(jet.wronskian() * scale)
}

/// Circle orthogonal to the unit circle through `a` and `b`: centre and r².
fn orthogonal_circle(a: ComplexValue, b: ComplexValue) -> Result<(ComplexValue, f64)> {
    // 2 Re(z c̄) = |z|² + 1 for z = a, b.
    let (ra, rb) = (0.5 * (a.norm_sqr() + 1.0), 0.5 * (b.norm_sqr() + 1.0));
    let det = a.re * b.im - a.im * b.re;
    if det.abs() < 1e-300 {
        return Err(Error::Domain("side w2w3 passes through w1".into()));
    }
    let centre = Complex64::new((ra * b.im - rb * a.im) / det, (a.re * rb - b.re * ra) / det);
    Ok((centre, centre.norm_sqr() - 1.0))
}

/// Newton runs in a local uniformizing coordinate t near each vertex, where
/// w is analytic in t with nonzero derivative.
#[derive(Debug, Clone, Copy)]
enum Chart {
    Plain,
    /// ξ = tⁿ
    Zero(i32),
    /// ξ = 1 − tⁿ
    One(i32),
    /// ξ = −t⁻ⁿ
    Infinity(i32),
}

/// ξ-distance from 0 or 1 (and reciprocal distance to ∞) below which Newton
/// switches to the vertex chart.
pub const CHART_RADIUS: f64 = 0.25;

impl Chart {
    fn coordinate(self, xi: ComplexValue) -> Result<ComplexValue> {
        let root = |z: ComplexValue, n: i32| principal_pow(z, Complex64::new(1.0 / n as f64, 0.0));
        match self {
            Chart::Plain => Ok(xi),
            Chart::Zero(n) => root(xi, n),
            Chart::One(n) => root(1.0 - xi, n),
            Chart::Infinity(n) => Ok(1.0 / root(-xi, n)?),
        }
    }

    fn point(self, t: ComplexValue) -> ComplexValue {
        match self {
            Chart::Plain => t,
            Chart::Zero(n) => t.powi(n),
            Chart::One(n) => 1.0 - t.powi(n),
            Chart::Infinity(n) => -t.powi(-n),
        }
    }

    /// dξ/dt
    fn derivative(self, t: ComplexValue) -> ComplexValue {
        match self {
            Chart::Plain => Complex64::new(1.0, 0.0),
            Chart::Zero(n) => n as f64 * t.powi(n - 1),
            Chart::One(n) => -(n as f64) * t.powi(n - 1),
            Chart::Infinity(n) => n as f64 * t.powi(-n - 1),
        }
    }
}

struct Forward {
    w: ComplexValue,
    dw: ComplexValue,
}

impl TriangleEmbedding {
    pub fn params(&self) -> &HypParams {
        &self.params
    }

    pub fn w1(&self) -> ComplexValue {
        self.w1
    }

    pub fn rotation(&self) -> f64 {
        self.rotation
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    /// Wronskian constant measured from the basis functions at ξ = 1/4.
    pub fn c0_fitted(&self) -> f64 {
        self.c0_fitted
    }

    pub fn c(&self) -> ComplexValue {
        self.c
    }

    pub fn w2_embedded(&self) -> ComplexValue {
        self.w2_embedded
    }

    pub fn w3_embedded(&self) -> ComplexValue {
        self.w3_embedded
    }

    /// The three embedded vertices.
    pub fn vertices(&self) -> [ComplexValue; 3] {
        [self.w1, self.w2_embedded, self.w3_embedded]
    }

    /// Vertices in the reference disk, where w1 sits at the origin and the
    /// side w1w2 runs along the positive real axis.
    pub fn reference_vertices(&self) -> [ComplexValue; 3] {
        [Complex64::new(0.0, 0.0), self.z2, self.z3]
    }

    /// Centre and squared radius of the circle carrying the side w2w3 in the
    /// reference disk.
    pub fn side23_circle(&self) -> (ComplexValue, f64) {
        (self.side23_centre, self.side23_radius_sq)
    }

    /// Stabiliser generator of w1, rotation by 2π/n1.
    pub fn generator(&self) -> MoebiusElement {
        self.generator
    }

    /// e^{−iθ} (w − w1)/(w − w̄1); equals K f(ξ(w)) on the triangle.
    pub fn to_reference_disk(&self, w: ComplexValue) -> ComplexValue {
        Complex64::from_polar(1.0, -self.rotation) * (w - self.w1) / (w - self.w1.conj())
    }

    pub fn from_reference_disk(&self, z: ComplexValue) -> ComplexValue {
        let z = Complex64::from_polar(1.0, self.rotation) * z;
        (self.w1 - self.w1.conj() * z) / (1.0 - z)
    }

    /// The embedding w(ξ) = (w1 g1 − κ w̄1 g2)/(g1 − κ g2).
    pub fn uniformizer_w(&self, xi: ComplexValue) -> Result<ComplexValue> {
        let b = basis_solutions(&self.params, xi)?;
        let den = b.g1 - self.kappa * b.g2;
        if den.norm() < 1e-300 {
            return Err(Error::ZeroDenominator(format!("g1 = K g2 at {xi}")));
        }
        Ok((self.w1 * b.g1 - self.kappa * self.w1.conj() * b.g2) / den)
    }

    /// w(ξ) − w1 = κ (w1 − w̄1) g2 / (g1 − κ g2), accurate to full relative
    /// precision even when w is close to w1.
    pub fn displacement(&self, xi: ComplexValue) -> Result<ComplexValue> {
        let b = basis_solutions(&self.params, xi)?;
        let den = b.g1 - self.kappa * b.g2;
        if den.norm() < 1e-300 {
            return Err(Error::ZeroDenominator(format!("g1 = K g2 at {xi}")));
        }
        Ok(self.kappa * (self.w1 - self.w1.conj()) * b.g2 / den)
    }

    fn wronskian_closed(&self, xi: ComplexValue) -> Result<ComplexValue> {
        let p = &self.params;
        if xi == Complex64::new(0.0, 0.0) || xi == Complex64::new(1.0, 0.0) {
            return Err(Error::Pole(format!("dw/dxi is singular at {xi}")));
        }
        Ok(self.c0
            * principal_pow(xi, Complex64::new(-p.gamma_, 0.0))?
            * principal_pow(1.0 - xi, Complex64::new(p.gamma_ - p.alpha - p.beta - 1.0, 0.0))?)
    }

    fn forward(&self, xi: ComplexValue) -> Result<Forward> {
        let b = basis_solutions(&self.params, xi)?;
        let den = b.g1 - self.kappa * b.g2;
        if den.norm() < 1e-300 {
            return Err(Error::ZeroDenominator(format!("g1 = K g2 at {xi}")));
        }
        let w = (self.w1 * b.g1 - self.kappa * self.w1.conj() * b.g2) / den;
        let dw = self.kappa * (self.w1 - self.w1.conj()) * self.wronskian_closed(xi)? / (den * den);
        Ok(Forward { w, dw })
    }

    /// dw/dξ = κ (w1 − w̄1) C0 ξ^{−γ} (1−ξ)^{γ−α−β−1} / (g1 − κ g2)².
    pub fn dw_dxi(&self, xi: ComplexValue) -> Result<ComplexValue> {
        Ok(self.forward(xi)?.dw)
    }

    /// dξ/dw = C ξ^{1−1/n1} (1−ξ)^{1−1/n2} (₂F₁(α,β;γ;ξ) − κ ξ^{1/n1} ₂F₁(α′,β′;γ′;ξ))².
    pub fn dxi_dw_closed(&self, xi: ComplexValue) -> Result<ComplexValue> {
        let p = &self.params;
        let xi = crate::geometry::from_above(xi);
        let [p1, p2, _] = p.signature().reciprocals();
        let f1 = hyp2f1(p.alpha_c(), p.beta_c(), p.gamma_c(), xi)?;
        let f2 = hyp2f1(p.alpha_p_c(), p.beta_p_c(), p.gamma_p_c(), xi)?;
        let bracket = f1 - self.kappa * principal_pow(xi, Complex64::new(p1, 0.0))? * f2;
        Ok(self.c
            * principal_pow(xi, Complex64::new(1.0 - p1, 0.0))?
            * principal_pow(1.0 - xi, Complex64::new(1.0 - p2, 0.0))?
            * bracket
            * bracket)
    }

    /// Whether `z` (reference disk) lies in the closed triangle.
    pub fn contains_reference_disk(&self, z: ComplexValue) -> bool {
        if !z.is_finite() || z.norm() >= 1.0 {
            return false;
        }
        let n1 = self.params.signature().n1() as f64;
        let lower = z.im >= -SIDE_TOL;
        let upper = (z * Complex64::from_polar(1.0, -PI / n1)).im <= SIDE_TOL;
        let outer = (z - self.side23_centre).norm_sqr() - self.side23_radius_sq >= -SIDE_TOL;
        lower && upper && outer
    }

    /// Whether `w` lies in the closed embedded fundamental triangle.
    pub fn contains(&self, w: ComplexValue) -> bool {
        w.im > 0.0 && self.contains_reference_disk(self.to_reference_disk(w))
    }

    /// Pulls a trial point back to the closed upper half-plane. Points that
    /// cross the real axis outside (0, 1) are put on the axis (read from
    /// above), or just above it on (1, ∞) where the axis itself is a cut.
    fn admissible(xi: ComplexValue) -> Option<ComplexValue> {
        if !xi.is_finite() || xi == Complex64::new(0.0, 0.0) {
            return None;
        }
        if xi.im > 0.0 || (xi.re > 0.0 && xi.re < 1.0) {
            return Some(xi);
        }
        if xi.re <= 0.0 {
            Some(Complex64::new(xi.re, 0.0))
        } else if xi.re > 1.0 {
            Some(Complex64::new(xi.re, 1e-300))
        } else {
            None
        }
    }

    /// Damped Newton iteration for w(ξ) = w from `seed`.
    pub fn newton_from(&self, w: ComplexValue, seed: ComplexValue) -> Result<Inversion> {
        self.newton_from_with(w, seed, &InversionOptions::default())
    }

    pub fn newton_from_with(&self, w: ComplexValue, seed: ComplexValue, opts: &InversionOptions) -> Result<Inversion> {
        let scale = 1.0 + w.norm();
        let mut xi = seed;
        let mut fwd = self.forward(xi)?;
        let mut residual = (fwd.w - w).norm();
        let mut iterations = 0;
        while iterations < opts.max_iterations && residual > 1e-15 * scale {
            iterations += 1;
            let chart = self.chart_for(xi);
            let t = chart.coordinate(xi)?;
            let step = (fwd.w - w) / (fwd.dw * chart.derivative(t));
            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..=opts.max_halvings {
                if let Some(cand) = Self::admissible(chart.point(t - lambda * step)) {
                    if let Ok(next) = self.forward(cand) {
                        let r = (next.w - w).norm();
                        if r < residual {
                            xi = cand;
                            fwd = next;
                            residual = r;
                            accepted = true;
                            break;
                        }
                    }
                }
                lambda *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        // Near w2 the map is w − w2 ∝ (1 − ξ)^{1/n2}, so rounding ξ alone can
        // move w by more than the requested tolerance.
        let floor = 4.0 * f64::EPSILON * fwd.dw.norm() * xi.norm().max(1.0);
        if residual <= (opts.tol * scale).max(floor) {
            Ok(Inversion { xi, residual, iterations })
        } else {
            Err(Error::NoConvergence {
                iterations,
                best_residual: residual,
            })
        }
    }

    fn chart_for(&self, xi: ComplexValue) -> Chart {
        let [n1, n2, n3] = self.params.signature().orders();
        if xi.norm() < CHART_RADIUS {
            Chart::Zero(n1 as i32)
        } else if (1.0 - xi).norm() < CHART_RADIUS {
            Chart::One(n2 as i32)
        } else if xi.norm() > 1.0 / CHART_RADIUS {
            Chart::Infinity(n3 as i32)
        } else {
            Chart::Plain
        }
    }

    fn candidate_seeds(&self, w: ComplexValue, z: ComplexValue) -> Vec<ComplexValue> {
        let mut out = Vec::with_capacity(6);
        let n1 = self.params.signature().n1() as i32;
        let near_w1 = hyperbolic_distance(w, self.w1).is_ok_and(|d| d < VERTEX_SEED_RADIUS);
        out.push((z / self.k).powi(n1));
        if near_w1 {
            return out;
        }
        if let Ok(sigma) = self.chart2.moebius.preimage(z / self.k) {
            out.push(1.0 - sigma.powi(self.chart2.order as i32));
        }
        if let Ok(sigma) = self.chart3.moebius.preimage(z / self.k) {
            if sigma != Complex64::new(0.0, 0.0) {
                out.push(-sigma.powi(-(self.chart3.order as i32)));
            }
        }
        let mut nearest: Vec<(f64, ComplexValue)> = self.seeds.iter().map(|s| ((s.z - z).norm(), s.xi)).collect();
        nearest.select_nth_unstable_by(2, |a, b| a.0.total_cmp(&b.0));
        nearest[..3].sort_by(|a, b| a.0.total_cmp(&b.0));
        out.extend(nearest[..3].iter().map(|&(_, xi)| xi));
        out
    }

    /// ξ(w) for `w` in the closed fundamental triangle.
    pub fn invert_xi(&self, w: ComplexValue) -> Result<ComplexValue> {
        Ok(self.invert_xi_with(w, &InversionOptions::default())?.xi)
    }

    pub fn invert_xi_with(&self, w: ComplexValue, opts: &InversionOptions) -> Result<Inversion> {
        if !(w.im > 0.0) || !w.is_finite() {
            return Err(Error::Domain(format!("{w} is not in the upper half-plane")));
        }
        let z = self.to_reference_disk(w);
        if !self.contains_reference_disk(z) {
            return Err(Error::OutsideFundamentalDomain(format!("{w}")));
        }
        if z == Complex64::new(0.0, 0.0) {
            return Ok(Inversion {
                xi: Complex64::new(0.0, 0.0),
                residual: 0.0,
                iterations: 0,
            });
        }
        if (z - self.z2).norm() < VERTEX_SNAP {
            return Ok(Inversion {
                xi: Complex64::new(1.0, 0.0),
                residual: (self.w2_embedded - w).norm(),
                iterations: 0,
            });
        }
        if (z - self.z3).norm() < VERTEX_SNAP {
            return Err(Error::Pole(format!("{w} is the vertex w3, where xi is infinite")));
        }
        let mut ranked: Vec<(f64, ComplexValue)> = self
            .candidate_seeds(w, z)
            .into_iter()
            .filter_map(Self::admissible)
            .filter_map(|xi| self.uniformizer_w(xi).ok().map(|v| ((v - w).norm(), xi)))
            .filter(|(r, _)| r.is_finite())
            .collect();
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut best = f64::INFINITY;
        let mut iterations = 0;
        for &(_, seed) in &ranked {
            match self.newton_from_with(w, seed, opts) {
                Ok(inv) => return Ok(inv),
                Err(Error::NoConvergence {
                    iterations: it,
                    best_residual,
                }) => {
                    iterations += it;
                    best = best.min(best_residual);
                }
                Err(_) => {}
            }
        }
        Err(Error::NoConvergence {
            iterations,
            best_residual: best,
        })
    }

    /// ξ(w) for `w` anywhere in the star of w1: the 2n1 copies of the triangle
    /// obtained by rotating about w1 and reflecting in the side w1w2.
    ///
    /// `w` is first rotated back with powers of the stabiliser generator; the
    /// mirror copy is handled by ξ(reflected w) = conj ξ(w).
    pub fn xi_extended(&self, w: ComplexValue) -> Result<ComplexValue> {
        self.xi_extended_with(w, &InversionOptions::default())
    }

    pub fn xi_extended_with(&self, w: ComplexValue, opts: &InversionOptions) -> Result<ComplexValue> {
        if !(w.im > 0.0) || !w.is_finite() {
            return Err(Error::Domain(format!("{w} is not in the upper half-plane")));
        }
        let z = self.to_reference_disk(w);
        if z == Complex64::new(0.0, 0.0) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let sector = 2.0 * PI / self.params.signature().n1() as f64;
        let turns = (z.arg() / sector).round() as i64;
        let back = moebius_apply(&self.generator.pow(-turns), w)?;
        let zb = self.to_reference_disk(back);
        if zb.im >= 0.0 {
            Ok(self.invert_xi_with(back, opts)?.xi)
        } else {
            let mirrored = self.from_reference_disk(zb.conj());
            Ok(self.invert_xi_with(mirrored, opts)?.xi.conj())
        }
    }

    /// |ξ(Aw) − ξ(w)| for the stabiliser generator A of w1.
    pub fn automorphy_residual(&self, w: ComplexValue) -> Result<f64> {
        let aw = moebius_apply(&self.generator, w)?;
        Ok((self.xi_extended(aw)? - self.xi_extended(w)?).norm())
    }

    /// Samples over the n×m reference cell, row-major; points whose image is
    /// not a finite point of the upper half-plane are dropped.
    pub fn sample_grid(&self, n: usize, m: usize) -> Vec<MapSample> {
        let mut out = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                let xi = reference_cell_point(i, j, n, m);
                let (Ok(w), Ok(dxi_dw)) = (self.uniformizer_w(xi), self.dxi_dw_closed(xi)) else {
                    continue;
                };
                if w.is_finite() && dxi_dw.is_finite() && w.im > 0.0 {
                    out.push(MapSample { w, xi, dxi_dw });
                }
            }
        }
        out
    }

    /// Hyperbolic distance from w1 to the side w2w3, the radius of the largest
    /// disc about w1 inside the star of rotated and reflected triangles.
    pub fn inradius_w1(&self) -> f64 {
        let rho = self.side23_centre.norm() - self.side23_radius_sq.sqrt();
        2.0 * rho.atanh()
    }

    /// Tanh of half the embedded distance between w1 and w2.
    pub fn embedded_tanh_half_side12(&self) -> f64 {
        ((self.w2_embedded - self.w1) / (self.w2_embedded - self.w1.conj())).norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{params_from_signature, validate_signature};

    fn params(n1: i64, n2: i64, n3: i64) -> HypParams {
        params_from_signature(&validate_signature(n1, n2, n3).unwrap()).unwrap()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn k_reference_value_and_routes() {
        // 40-digit Gamma evaluation: 0.20476027050510619838...
        let p = params(3, 3, 4);
        let k = constant_k(&p).unwrap();
        assert!((k - 0.204_760_270_505_106_2).abs() < 1e-13);
        assert!((constant_k_from_distance(&p).unwrap() - k).abs() / k < 1e-12);
        assert!((constant_k_back_solved(&p).unwrap() - k).abs() / k < 1e-12);
    }

    #[test]
    fn embedding_constants() {
        let e = build_embedding(&params(3, 3, 4)).unwrap();
        assert!((e.c0() - 1.0 / 3.0).abs() < 1e-15);
        assert!((e.c0_fitted() - 1.0 / 3.0).abs() < 1e-12);
        let prod = e.c() * e.c0() * e.k() * (e.w1() - e.w1().conj());
        assert!((prod - 1.0).norm() < 1e-15);
        assert!((e.embedded_tanh_half_side12() - 0.348_310_699_749_006_5).abs() < 1e-12);
        assert!(e.w2_embedded().im > 0.0 && e.w3_embedded().im > 0.0);
        assert!(build_embedding_with(
            &params(3, 3, 4),
            EmbeddingOptions {
                w1: Complex64::new(0.0, -1.0),
                rotation: 0.0
            }
        )
        .is_err());
    }

    #[test]
    fn uniformizer_values() {
        let e = build_embedding(&params(3, 3, 4)).unwrap();
        assert_eq!(e.uniformizer_w(Complex64::new(0.0, 0.0)).unwrap(), Complex64::new(0.0, 1.0));
        let w = e.uniformizer_w(Complex64::new(0.3, 0.0)).unwrap();
        let ratio = (w - e.w1()) / (w - e.w1().conj());
        assert!(ratio.re > 0.0 && ratio.im.abs() < 1e-15);
        // 40-digit reference at ξ = 0.3 + 0.2i.
        let w = e.uniformizer_w(Complex64::new(0.3, 0.2)).unwrap();
        assert!(rel(w, Complex64::new(-0.099_015_563_150_364_82, 1.345_649_884_698_974_3)) < 1e-12);
        let d = e.dxi_dw_closed(Complex64::new(0.3, 0.2)).unwrap();
        assert!(rel(d, Complex64::new(0.289_209_804_765_596_3, -2.185_559_147_066_991)) < 1e-12);
    }

    #[test]
    fn derivative_edge_values() {
        let e = build_embedding(&params(3, 3, 4)).unwrap();
        assert_eq!(e.dxi_dw_closed(Complex64::new(0.0, 0.0)).unwrap(), Complex64::new(0.0, 0.0));
        assert!(matches!(e.dw_dxi(Complex64::new(0.0, 0.0)), Err(Error::Pole(_))));
        assert!(matches!(e.dw_dxi(Complex64::new(1.0, 0.0)), Err(Error::Pole(_))));
        // dw/dξ · ξ^γ → K (w1 − w̄1)(1 − γ).
        let xi = Complex64::new(1e-8, 0.0);
        let lead = e.dw_dxi(xi).unwrap() * xi.powf(2.0 / 3.0);
        let want = e.k() * (e.w1() - e.w1().conj()) / 3.0;
        assert!(rel(lead, want) < 1e-3);
    }

    #[test]
    fn inversion_round_trip_and_vertex() {
        let e = build_embedding(&params(3, 3, 4)).unwrap();
        assert_eq!(e.invert_xi(Complex64::new(0.0, 1.0)).unwrap(), Complex64::new(0.0, 0.0));
        let xi0 = Complex64::new(0.3, 0.2);
        let w = e.uniformizer_w(xi0).unwrap();
        let xi = e.invert_xi(w).unwrap();
        assert!((xi - xi0).norm() < 1e-10, "{xi}");
    }

    #[test]
    fn outside_points_are_rejected() {
        let e = build_embedding(&params(3, 3, 4)).unwrap();
        // Reflection of an interior point across the side w1w2.
        let z = e.to_reference_disk(e.uniformizer_w(Complex64::new(0.3, 0.2)).unwrap());
        let w = e.from_reference_disk(z.conj());
        assert!(matches!(e.invert_xi(w), Err(Error::OutsideFundamentalDomain(_))));
        assert!(matches!(e.invert_xi(Complex64::new(0.0, -1.0)), Err(Error::Domain(_))));
        // The mirror image is still reachable through the automorphic extension.
        let xi = e.xi_extended(w).unwrap();
        assert!((xi - Complex64::new(0.3, -0.2)).norm() < 1e-10);
    }

    #[test]
    fn vertex_preimages() {
        let e = build_embedding(&params(5, 7, 9)).unwrap();
        let [_, w2, w3] = e.vertices();
        assert_eq!(e.invert_xi(w2).unwrap(), Complex64::new(1.0, 0.0));
        assert!(matches!(e.invert_xi(w3), Err(Error::Pole(_))));
        // Points on the side w2w3 go to the real axis beyond 1.
        let (c, r2) = e.side23_circle();
        let [_, z2, z3] = e.reference_vertices();
        let mid = (z2 - c).unscale((z2 - c).norm()) + (z3 - c).unscale((z3 - c).norm());
        let z = c + mid.unscale(mid.norm()) * r2.sqrt();
        let xi = e.invert_xi(e.from_reference_disk(z)).unwrap();
        assert!(xi.re > 1.0 && xi.im.abs() < 1e-9, "{xi}");
    }

    #[test]
    fn vertices_lie_on_the_boundary() {
        let e = build_embedding(&params(3, 4, 5)).unwrap();
        for v in e.vertices() {
            assert!(e.contains(v));
        }
    }
}
