//! Draws the embedded fundamental triangle.

use trimap::automorphic::build_embedding;
use trimap::cli::{render_svg, SvgOptions};
use trimap::group::{params_from_signature, Signature};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sig: Signature = std::env::args().nth(1).unwrap_or_else(|| "3,3,4".into()).parse()?;
    let e = build_embedding(&params_from_signature(&sig)?)?;
    let doc = render_svg(&e, &SvgOptions::default())?;
    let path = std::env::temp_dir().join(format!("triangle-{}.svg", sig.to_string().replace(',', "-")));
    std::fs::write(&path, doc)?;
    println!("wrote {}", path.display());
    Ok(())
}
