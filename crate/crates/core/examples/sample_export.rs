//! Writes a grid of (w, ξ, dξ/dw) samples as JSON lines.

use std::fs::File;
use std::io::{BufWriter, Write};

use trimap::automorphic::build_embedding;
use trimap::cli::SampleRecord;
use trimap::group::{params_from_signature, Signature};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sig: Signature = std::env::args().nth(1).unwrap_or_else(|| "3,3,4".into()).parse()?;
    let e = build_embedding(&params_from_signature(&sig)?)?;
    let samples = e.sample_grid(12, 10);

    let path = std::env::temp_dir().join(format!("trimap-{}.jsonl", sig.to_string().replace(',', "-")));
    let mut out = BufWriter::new(File::create(&path)?);
    for s in &samples {
        serde_json::to_writer(&mut out, &SampleRecord::from(*s))?;
        out.write_all(b"\n")?;
    }
    out.flush()?;

    let lowest = samples.iter().map(|s| s.w.im).fold(f64::INFINITY, f64::min);
    println!("{} samples written to {}", samples.len(), path.display());
    println!("lowest Im w = {lowest:.6}");
    Ok(())
}
