//! ξ(w) is invariant under the rotation about w1, and ramifies to order n1.

use std::f64::consts::PI;

use num_complex::Complex64;
use trimap::automorphic::build_embedding;
use trimap::group::{moebius_apply, params_from_signature, Signature};

fn main() -> trimap::Result<()> {
    let sig: Signature = "4,4,4".parse()?;
    let e = build_embedding(&params_from_signature(&sig)?)?;
    let a = e.generator();

    let w = e.from_reference_disk(Complex64::from_polar(0.2, 0.3));
    let mut image = w;
    for k in 0..=sig.n1() {
        println!("A^{k} w = {image:.10}  xi = {:.14}", e.xi_extended(image)?);
        image = moebius_apply(&a, image)?;
    }
    println!("residual |xi(Aw) - xi(w)| = {:.1e}", e.automorphy_residual(w)?);

    println!("\n|z|        |xi|       log-log slope");
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..6 {
        let r = 1e-3 * 2f64.powi(k);
        let xi = e.invert_xi(e.from_reference_disk(Complex64::from_polar(r, PI / 8.0)))?;
        let point = (r.ln(), xi.norm().ln());
        let slope = prev.map(|p| (point.1 - p.1) / (point.0 - p.0));
        println!("{r:.3e}  {:.3e}  {}", xi.norm(), slope.map_or(String::new(), |s| format!("{s:.8}")));
        prev = Some(point);
    }
    Ok(())
}
