//! Closed-form dξ/dw against the reciprocal of dw/dξ and a difference quotient.

use num_complex::Complex64;
use trimap::automorphic::build_embedding;
use trimap::group::{params_from_signature, Signature};

fn main() -> trimap::Result<()> {
    let sig: Signature = "3,3,4".parse()?;
    let e = build_embedding(&params_from_signature(&sig)?)?;
    println!("K = {:.16}, C0 = {:.16}, C = {:.16}", e.k(), e.c0(), e.c());

    for xi in [Complex64::new(0.3, 0.2), Complex64::new(-1.0, 0.5), Complex64::new(1.5, 1.5), Complex64::new(1e-6, 1e-6)] {
        let closed = e.dxi_dw_closed(xi)?;
        let chain = closed * e.dw_dxi(xi)?;
        let w = e.uniformizer_w(xi)?;
        let h = 1e-5;
        let fd = (e.xi_extended(w + h)? - e.xi_extended(w - h)?) / (2.0 * h);
        println!(
            "xi = {xi:<14} dxi/dw = {closed:.12}  (dxi/dw)(dw/dxi) - 1 = {:.1e}  vs difference quotient {:.1e}",
            (chain - 1.0).norm(),
            (fd - closed).norm() / closed.norm()
        );
    }
    Ok(())
}
