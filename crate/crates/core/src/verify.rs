//! Numerical identity checks, grouped into suites.
//!
//! Every check reports its worst residual against a fixed tolerance. Random
//! sample points come from a seeded ChaCha stream so reports are repeatable.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::automorphic::{build_embedding, constant_k, constant_k_back_solved, constant_k_from_distance, wronskian_constant, TriangleEmbedding};
use crate::error::{Error, Result};
use crate::geometry::{
    schwarz_map, schwarzian_lhs, schwarzian_rhs, tanh_sq_half_dist_angles, tanh_sq_half_dist_sines, tanh_sq_half_side,
    w2_formula, w3_audit,
};
use crate::group::{moebius_apply, HypParams};
use crate::special::{gamma, hyp2f1, hyp2f1_deriv, hyp2f1_deriv2, principal_pow, ComplexValue};

/// Environment variable that, when set to a float, replaces every tolerance.
pub const TOL_ENV: &str = "TRIMAP_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Gamma,
    Hyp,
    Geometry,
    Derivative,
    Automorphy,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["gamma", "hyp", "geometry", "derivative", "automorphy", "all"];

    fn parts(self) -> &'static [Suite] {
        match self {
            Suite::All => &[Suite::Gamma, Suite::Hyp, Suite::Geometry, Suite::Derivative, Suite::Automorphy],
            Suite::Gamma => &[Suite::Gamma],
            Suite::Hyp => &[Suite::Hyp],
            Suite::Geometry => &[Suite::Geometry],
            Suite::Derivative => &[Suite::Derivative],
            Suite::Automorphy => &[Suite::Automorphy],
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "gamma" => Suite::Gamma,
            "hyp" => Suite::Hyp,
            "geometry" => Suite::Geometry,
            "derivative" => Suite::Derivative,
            "automorphy" => Suite::Automorphy,
            "all" => Suite::All,
            _ => return Err(Error::Domain(format!("unknown suite {s:?}"))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = [Suite::Gamma, Suite::Hyp, Suite::Geometry, Suite::Derivative, Suite::Automorphy, Suite::All]
            .iter()
            .position(|s| s == self)
            .unwrap_or(5);
        f.write_str(Suite::NAMES[i])
    }
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub name: String,
    pub pass: bool,
    pub max_residual: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} max_residual={:.3e} tolerance={:.1e}",
            self.name,
            if self.pass { "pass" } else { "FAIL" },
            self.max_residual,
            self.tolerance
        )?;
        if !self.detail.is_empty() {
            write!(f, " {}", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VerifyOptions {
    pub tol_override: Option<f64>,
}

impl VerifyOptions {
    /// Reads TRIMAP_TOL; an unparsable or non-positive value is an error.
    pub fn from_env() -> Result<Self> {
        match std::env::var(TOL_ENV) {
            Err(_) => Ok(VerifyOptions::default()),
            Ok(raw) => match raw.trim().parse::<f64>() {
                Ok(t) if t.is_finite() && t > 0.0 => Ok(VerifyOptions { tol_override: Some(t) }),
                _ => Err(Error::Domain(format!("{TOL_ENV}={raw:?} is not a positive float"))),
            },
        }
    }
}

pub fn all_passed(reports: &[VerifyReport]) -> bool {
    reports.iter().all(|r| r.pass)
}

struct Ctx<'a> {
    opts: &'a VerifyOptions,
    out: Vec<VerifyReport>,
}

impl Ctx<'_> {
    fn record(&mut self, name: &str, tol: f64, outcome: Result<(f64, String)>) {
        let tolerance = self.opts.tol_override.unwrap_or(tol);
        let report = match outcome {
            Ok((residual, detail)) => VerifyReport {
                name: name.into(),
                pass: residual.is_finite() && residual <= tolerance,
                max_residual: residual,
                tolerance,
                detail,
            },
            Err(e) => VerifyReport {
                name: name.into(),
                pass: false,
                max_residual: f64::INFINITY,
                tolerance,
                detail: format!("{}: {e}", e.name()),
            },
        };
        self.out.push(report);
    }

    fn check(&mut self, name: &str, tol: f64, f: impl FnOnce() -> Result<f64>) {
        self.record(name, tol, f().map(|r| (r, String::new())));
    }
}

fn rel(a: ComplexValue, b: ComplexValue) -> f64 {
    (a - b).norm() / b.norm()
}

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x7219_3a00 ^ tag)
}

/// Least-squares slope of y against x.
pub fn regression_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Interior sample points of the upper half ξ-plane, away from the real axis.
pub fn interior_points(count: usize, tag: u64) -> Vec<ComplexValue> {
    let mut r = rng(tag);
    (0..count)
        .map(|_| Complex64::new(r.gen_range(-1.0..2.0), r.gen_range(0.2..1.5)))
        .collect()
}

/// Points of the upper half ξ-plane on a 10×10 grid, including ξ = ½ + 0i.
pub fn schwarzian_grid() -> Vec<ComplexValue> {
    let mut pts: Vec<ComplexValue> = (0..10)
        .flat_map(|i| (0..10).map(move |j| Complex64::new(-1.6 + 0.4 * i as f64, 0.15 + 0.3 * j as f64)))
        .collect();
    pts[0] = Complex64::new(0.5, 0.0);
    pts
}

pub fn run_suite(p: &HypParams, suite: Suite, opts: &VerifyOptions) -> Vec<VerifyReport> {
    let mut ctx = Ctx { opts, out: Vec::new() };
    let embedding = build_embedding(p);
    for part in suite.parts() {
        match part {
            Suite::Gamma => gamma_suite(&mut ctx),
            Suite::Hyp => hyp_suite(&mut ctx, p),
            Suite::Geometry => geometry_suite(&mut ctx, p, embedding.as_ref()),
            Suite::Derivative => derivative_suite(&mut ctx, embedding.as_ref()),
            Suite::Automorphy => automorphy_suite(&mut ctx, embedding.as_ref()),
            Suite::All => {}
        }
    }
    ctx.out
}

fn need<'a>(e: std::result::Result<&'a TriangleEmbedding, &Error>) -> Result<&'a TriangleEmbedding> {
    e.map_err(|err| Error::Domain(format!("embedding unavailable: {err}")))
}

fn gamma_points() -> Vec<ComplexValue> {
    let mut r = rng(1);
    (0..40)
        .map(|_| Complex64::new(r.gen_range(-4.5..6.0), r.gen_range(-3.0..3.0)))
        .filter(|z| (z.re - z.re.round()).abs() > 1e-3 || z.im.abs() > 1e-3)
        .collect()
}

fn gamma_suite(ctx: &mut Ctx) {
    ctx.check("gamma_reflection", 1e-12, || {
        let mut worst: f64 = 0.0;
        for z in gamma_points() {
            let lhs = gamma(z)? * gamma(1.0 - z)? * (PI * z).sin();
            worst = worst.max(rel(lhs, Complex64::new(PI, 0.0)));
        }
        Ok(worst)
    });
    ctx.check("gamma_recurrence", 1e-12, || {
        let mut worst: f64 = 0.0;
        for z in gamma_points() {
            worst = worst.max(rel(gamma(z + 1.0)?, z * gamma(z)?));
        }
        Ok(worst)
    });
    ctx.check("gamma_half_integer", 1e-13, || {
        let mut worst: f64 = 0.0;
        let mut want = PI.sqrt();
        for k in 0..8 {
            let x = 0.5 + k as f64;
            worst = worst.max(rel(gamma(Complex64::new(x, 0.0))?, Complex64::new(want, 0.0)));
            want *= x;
        }
        Ok(worst)
    });
}

fn hyp_points(tag: u64) -> Vec<ComplexValue> {
    let mut r = rng(tag);
    (0..40)
        .map(|_| Complex64::from_polar(r.gen_range(0.05..4.0), r.gen_range(0.05..PI - 0.05)))
        .collect()
}

fn hyp_suite(ctx: &mut Ctx, p: &HypParams) {
    let (a, b, c) = (p.alpha_c(), p.beta_c(), p.gamma_c());
    ctx.check("gauss_summation", 1e-10, || {
        let mut worst: f64 = 0.0;
        for (a, b, c) in [(a, b, c), (p.alpha_p_c(), p.beta_p_c(), p.gamma_p_c())] {
            let closed = gamma(c)? * gamma(c - a - b)? / (gamma(c - a)? * gamma(c - b)?);
            worst = worst.max(rel(hyp2f1(a, b, c, Complex64::new(1.0, 0.0))?, closed));
        }
        Ok(worst)
    });
    ctx.check("hyp_ode_residual", 1e-9, || {
        let mut worst: f64 = 0.0;
        for x in hyp_points(2) {
            let (f, df, d2f) = (hyp2f1(a, b, c, x)?, hyp2f1_deriv(a, b, c, x)?, hyp2f1_deriv2(a, b, c, x)?);
            let terms = [x * (1.0 - x) * d2f, (c - (a + b + 1.0) * x) * df, -a * b * f];
            let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
            worst = worst.max((terms[0] + terms[1] + terms[2]).norm() / scale);
        }
        Ok(worst)
    });
    ctx.check("hyp_euler_transform", 1e-11, || {
        let mut worst: f64 = 0.0;
        for x in hyp_points(3) {
            let other = principal_pow(1.0 - x, c - a - b)? * hyp2f1(c - a, c - b, c, x)?;
            worst = worst.max(rel(other, hyp2f1(a, b, c, x)?));
        }
        Ok(worst)
    });
    ctx.check("hyp_pfaff_transform", 1e-11, || {
        let mut worst: f64 = 0.0;
        for x in hyp_points(4) {
            let other = principal_pow(1.0 - x, -a)? * hyp2f1(a, c - b, c, x / (x - 1.0))?;
            worst = worst.max(rel(other, hyp2f1(a, b, c, x)?));
        }
        Ok(worst)
    });
}

fn geometry_suite(ctx: &mut Ctx, p: &HypParams, e: std::result::Result<&TriangleEmbedding, &Error>) {
    let sig = p.signature();
    ctx.check("lemma1_identity", 1e-12, || {
        let (angles, sines) = (tanh_sq_half_dist_angles(&sig), tanh_sq_half_dist_sines(p));
        Ok((angles - sines).abs() / sines)
    });
    ctx.check("k_agreement", 1e-9, || {
        let ks = [constant_k(p)?, constant_k_from_distance(p)?, constant_k_back_solved(p)?];
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in i + 1..3 {
                worst = worst.max((ks[i] - ks[j]).abs() / ks[i]);
            }
        }
        Ok(worst)
    });
    ctx.check("w2_vertex", 1e-10, || {
        let f1 = schwarz_map(p, Complex64::new(1.0, 0.0))?;
        Ok(rel(f1, Complex64::new(w2_formula(p)?, 0.0)))
    });
    let mut r = rng(5);
    let wronskian: Result<Vec<ComplexValue>> = (0..20)
        .map(|_| wronskian_constant(p, Complex64::new(r.gen_range(-2.0..3.0), r.gen_range(0.05..2.0))))
        .collect();
    let c0 = 1.0 - p.gamma_;
    match wronskian {
        Ok(values) => {
            let mean = values.iter().sum::<ComplexValue>() / values.len() as f64;
            let spread = values.iter().map(|v| rel(*v, mean)).fold(0.0, f64::max);
            let off = values.iter().map(|v| rel(*v, Complex64::new(c0, 0.0))).fold(0.0, f64::max);
            ctx.check("wronskian_spread", 1e-8, || Ok(spread));
            ctx.record("wronskian_value", 1e-9, Ok((off, format!("1-gamma={c0:.17}"))));
        }
        Err(err) => {
            let msg = err.to_string();
            ctx.check("wronskian_spread", 1e-8, || Err(Error::Domain(msg.clone())));
            ctx.check("wronskian_value", 1e-9, || Err(Error::Domain(msg)));
        }
    }
    ctx.check("schwarzian_equation", 1e-8, || {
        let mut worst: f64 = 0.0;
        for xi in schwarzian_grid() {
            worst = worst.max(rel(schwarzian_lhs(p, xi)?, schwarzian_rhs(&sig, xi)?));
        }
        Ok(worst)
    });
    ctx.record("w3_audit", 1e-8, (|| {
        let e = need(e)?;
        let audit = w3_audit(p)?;
        let [w1, w2, w3] = e.vertices();
        let t13 = ((w3 - w1) / (w3 - w1.conj())).norm_sqr();
        let t23 = ((w3 - w2) / (w3 - w2.conj())).norm_sqr();
        let r13 = (t13 - tanh_sq_half_side(&sig, 1)).abs() / tanh_sq_half_side(&sig, 1);
        let r23 = (t23 - tanh_sq_half_side(&sig, 0)).abs() / tanh_sq_half_side(&sig, 0);
        let verdict = if audit.printed_agrees(1e-8) {
            "printed formula agrees".to_string()
        } else {
            format!("printed formula disagrees (rel diff {:.3e}), misprint suspected", audit.printed_rel_diff)
        };
        let detail = format!(
            "limit={:.16e}{:+.16e}i printed={:.16e}{:+.16e}i {verdict}",
            audit.limit.re, audit.limit.im, audit.printed.re, audit.printed.im
        );
        Ok((r13.max(r23), detail))
    })());
}

/// Step multiplier for difference quotients. The map flattens as the orders
/// grow, which magnifies roundoff; below order 10 the step is left alone.
fn fd_growth(e: &TriangleEmbedding) -> f64 {
    let n_max = e.params().signature().orders().into_iter().max().unwrap_or(1) as f64;
    (n_max / 10.0).max(1.0)
}

fn derivative_suite(ctx: &mut Ctx, e: std::result::Result<&TriangleEmbedding, &Error>) {
    let pts = interior_points(30, 6);
    ctx.check("chain_rule", 1e-10, || {
        let e = need(e)?;
        let mut worst: f64 = 0.0;
        for &xi in &pts {
            worst = worst.max((e.dxi_dw_closed(xi)? * e.dw_dxi(xi)? - 1.0).norm());
        }
        Ok(worst)
    });
    ctx.check("dw_dxi_finite_difference", 1e-6, || {
        let e = need(e)?;
        let h = 1e-6 * fd_growth(e);
        let mut worst: f64 = 0.0;
        for &xi in &pts {
            let fd = (e.displacement(xi + h)? - e.displacement(xi - h)?) / (2.0 * h);
            worst = worst.max(rel(fd, e.dw_dxi(xi)?));
        }
        Ok(worst)
    });
    ctx.check("inverse_finite_difference", 1e-6, || {
        let e = need(e)?;
        let h = 1e-5 * fd_growth(e);
        let mut worst: f64 = 0.0;
        for &xi in &pts {
            let w = e.uniformizer_w(xi)?;
            let fd = (e.xi_extended(w + h)? - e.xi_extended(w - h)?) / (2.0 * h);
            worst = worst.max(rel(fd, e.dxi_dw_closed(xi)?));
        }
        Ok(worst)
    });
    ctx.check("elliptic_vanishing", 1e-3, || {
        let e = need(e)?;
        let n1 = e.params().signature().n1() as f64;
        let mut samples = Vec::new();
        for k in 0..9 {
            // Far enough in that the ξ^{1/n1} correction is negligible.
            let t = 10f64.powf(-280.0 + 2.5 * k as f64);
            let d = e.dxi_dw_closed(Complex64::from_polar(t, PI / 4.0))?;
            samples.push((t.ln(), d.norm().ln()));
        }
        Ok((regression_slope(&samples) - (1.0 - 1.0 / n1)).abs())
    });
    ctx.check("c_from_fitted_wronskian", 1e-9, || {
        let e = need(e)?;
        let w1 = e.w1();
        let fitted = 1.0 / (e.c0_fitted() * e.k() * (w1 - w1.conj()));
        Ok(rel(fitted, e.c()))
    });
    ctx.check("embedding_upper_half", 0.0, || {
        let e = need(e)?;
        let mut bad = 0;
        for i in 0..20 {
            for j in 0..20 {
                let xi = 0.5 + Complex64::from_polar(0.45 * (i as f64 + 0.5) / 20.0, PI * j as f64 / 19.0);
                if !(e.uniformizer_w(xi)?.im > 0.0) {
                    bad += 1;
                }
            }
        }
        Ok(bad as f64)
    });
}

fn automorphy_suite(ctx: &mut Ctx, e: std::result::Result<&TriangleEmbedding, &Error>) {
    ctx.check("automorphy_residual", 1e-8, || {
        let e = need(e)?;
        let radius = 0.5f64.min(0.9 * e.inradius_w1());
        let mut r = rng(7);
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let d = r.gen_range(0.05 * radius..radius);
            let z = Complex64::from_polar((0.5 * d).tanh(), r.gen_range(-PI..PI));
            worst = worst.max(e.automorphy_residual(e.from_reference_disk(z))?);
        }
        Ok(worst)
    });
    ctx.check("generator_order", 1e-10, || {
        let e = need(e)?;
        let n1 = e.params().signature().n1();
        let a = e.generator().pow(n1);
        let w = e.from_reference_disk(Complex64::from_polar(0.5 * (0.5 * e.inradius_w1()).tanh(), 0.3));
        let moved = e.xi_extended(moebius_apply(&a, w)?)?;
        Ok(a.distance_to_identity().max(rel(moved, e.xi_extended(w)?)))
    });
    ctx.check("ramification_order", 1e-3, || {
        let e = need(e)?;
        let n1 = e.params().signature().n1() as f64;
        let scale = (0.5 * e.inradius_w1()).tanh();
        let mut samples = Vec::new();
        for k in 0..9 {
            let r = scale * 10f64.powf(-3.0 + 0.125 * k as f64);
            let xi = e.invert_xi(e.from_reference_disk(Complex64::from_polar(r, PI / (2.0 * n1))))?;
            samples.push((r.ln(), xi.norm().ln()));
        }
        Ok((regression_slope(&samples) - n1).abs())
    });
    ctx.check("inversion_round_trip", 1e-10, || {
        let e = need(e)?;
        let mut worst: f64 = 0.0;
        for xi in interior_points(30, 8) {
            let back = e.invert_xi(e.uniformizer_w(xi)?)?;
            worst = worst.max((back - xi).norm() / (1.0 + xi.norm()));
        }
        Ok(worst)
    });
    ctx.check("vertex_continuity", 1e-3, || {
        let e = need(e)?;
        let [_, z2, _] = e.reference_vertices();
        let n2 = e.params().signature().n2() as f64;
        // Along the bisector of the angle π/n2 at w2.
        let z = z2 + Complex64::from_polar(1e-4 * z2.norm(), PI - PI / (2.0 * n2));
        Ok((e.invert_xi(e.from_reference_disk(z))? - 1.0).norm())
    });
}
