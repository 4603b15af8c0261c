//! Complex Gamma and the Gauss hypergeometric function across the plane.

use num_complex::Complex64;
use trimap::special::{choose_region, gamma, hyp2f1, recip_gamma};

fn main() -> trimap::Result<()> {
    let half = gamma(Complex64::new(0.5, 0.0))?;
    println!("Gamma(1/2)      = {half:.16}  (sqrt(pi) = {:.16})", std::f64::consts::PI.sqrt());
    println!("Gamma(1+i)      = {:.16}", gamma(Complex64::new(1.0, 1.0))?);
    println!("1/Gamma(-3)     = {}", recip_gamma(Complex64::new(-3.0, 0.0)));
    match gamma(Complex64::new(-2.0, 0.0)) {
        Ok(v) => println!("Gamma(-2)       = {v}"),
        Err(e) => println!("Gamma(-2)       -> {}", e.name()),
    }

    // Parameters of the (3,3,4) triangle group.
    let (a, b, c) = (Complex64::new(1.0 / 24.0, 0.0), Complex64::new(7.0 / 24.0, 0.0), Complex64::new(2.0 / 3.0, 0.0));
    for x in [
        Complex64::new(0.3, 0.1),
        Complex64::new(0.9, 0.05),
        Complex64::new(-3.0, 0.5),
        Complex64::new(0.5, 0.86),
        Complex64::new(1.0, 0.0),
    ] {
        println!("2F1(x = {x:>12}) = {:.15}  via {:?}", hyp2f1(a, b, c, x)?, choose_region(a, b, c, x));
    }
    let closed = (3.0 * std::f64::consts::PI / 8.0).sin() / (std::f64::consts::PI / 3.0).sin();
    println!("sin(3pi/8)/sin(pi/3) = {closed:.15}");

    match hyp2f1(a, b, c, Complex64::new(2.0, 0.0)) {
        Ok(v) => println!("2F1(2) = {v}"),
        Err(e) => println!("2F1(2) -> {}: {e}", e.name()),
    }
    Ok(())
}
