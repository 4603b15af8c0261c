//! The Schwarz triangle map f = g2/g1, its vertices and side lengths.

use num_complex::Complex64;
use trimap::geometry::{schwarz_map, tanh_sq_half_dist_angles, tanh_sq_half_side, vertices, w2_formula, w3_audit};
use trimap::group::{params_from_signature, Signature};

fn main() -> trimap::Result<()> {
    let sig: Signature = "3,3,4".parse()?;
    let p = params_from_signature(&sig)?;

    let v = vertices(&p)?;
    println!("f(0) = {}, f(1) = {:.16}, f(inf) = {:.16}", v.w1, v.w2, v.w3);
    println!("closed form for f(1): {:.16}", w2_formula(&p)?);

    for xi in [Complex64::new(0.5, 0.5), Complex64::new(-2.0, 1.0), Complex64::new(0.0, 1e3)] {
        println!("f({xi}) = {:.12}", schwarz_map(&p, xi)?);
    }

    let audit = w3_audit(&p)?;
    println!("third vertex: limit {:.12}, printed formula {:.6}", audit.limit, audit.printed);
    println!("relative difference of the printed formula: {:.3}", audit.printed_rel_diff);

    println!("tanh^2(d12/2) = {:.16}", tanh_sq_half_dist_angles(&sig));
    for (k, name) in ["d23", "d13", "d12"].iter().enumerate() {
        println!("tanh^2({name}/2) = {:.16}", tanh_sq_half_side(&sig, k));
    }
    Ok(())
}
