//! Signatures, exact hypergeometric exponents and the elliptic generator.

use num_complex::Complex64;
use trimap::group::{classify_element, elliptic_generator, exact_params, params_from_signature, validate_signature, Signature};

fn main() -> trimap::Result<()> {
    for (n1, n2, n3) in [(3, 3, 3), (2, 3, 7), (3, 3, 4), (4, 4, 4), (5, 7, 9)] {
        match validate_signature(n1, n2, n3) {
            Err(e) => println!("({n1},{n2},{n3}): {}", e.name()),
            Ok(sig) => {
                let x = exact_params(&sig);
                println!(
                    "({sig}): alpha={} beta={} gamma={} alpha'={} beta'={} gamma'={}",
                    x.alpha, x.beta, x.gamma, x.alpha_p, x.beta_p, x.gamma_p
                );
            }
        }
    }

    let sig: Signature = "3,3,4".parse()?;
    let p = params_from_signature(&sig)?;
    println!("float exponents for {sig}: {:.6} {:.6} {:.6}", p.alpha, p.beta, p.gamma_);

    let a = elliptic_generator(Complex64::new(0.0, 1.0), sig.n1())?;
    println!("generator A = [[{:.6}, {:.6}], [{:.6}, {:.6}]], trace {:.6}, {:?}", a.a, a.b, a.c, a.d, a.trace(), classify_element(&a));
    println!("A^{} differs from the identity by {:.1e}", sig.n1(), a.pow(sig.n1()).distance_to_identity());
    Ok(())
}
