//! Inverting the embedding: from a point of the triangle back to ξ.

use num_complex::Complex64;
use trimap::automorphic::{build_embedding, InversionOptions};
use trimap::group::{params_from_signature, Signature};

fn main() -> trimap::Result<()> {
    let sig: Signature = "5,7,9".parse()?;
    let e = build_embedding(&params_from_signature(&sig)?)?;
    let [w1, w2, w3] = e.vertices();
    println!("triangle: w1 = {w1:.6}, w2 = {w2:.6}, w3 = {w3:.6}");

    // Points inside the triangle, as barycentric mixtures in the reference disk.
    let z = e.reference_vertices();
    for (s, t) in [(0.2, 0.2), (0.6, 0.1), (0.1, 0.8), (0.33, 0.33)] {
        let w = e.from_reference_disk(z[0] * (1.0 - s - t) + z[1] * s + z[2] * t);
        let inv = e.invert_xi_with(w, &InversionOptions::default())?;
        let again = e.uniformizer_w(inv.xi)?;
        println!(
            "w = {w:.8} -> xi = {:.10} in {} Newton steps, |w(xi) - w| = {:.1e}",
            inv.xi,
            inv.iterations,
            (again - w).norm()
        );
    }

    println!("xi(w1) = {}, xi(w2) = {}", e.invert_xi(w1)?, e.invert_xi(w2)?);
    for w in [w3, Complex64::new(5.0, 0.01)] {
        if let Err(err) = e.invert_xi(w) {
            println!("xi({w:.4}) -> {}", err.name());
        }
    }
    Ok(())
}
