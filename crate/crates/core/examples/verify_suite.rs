//! Runs every identity check for a few signatures and summarises the results.

use trimap::group::{params_from_signature, Signature};
use trimap::verify::{all_passed, run_suite, Suite, VerifyOptions};

fn main() -> trimap::Result<()> {
    let opts = VerifyOptions::from_env()?;
    for raw in ["3,3,4", "4,4,4", "3,4,5", "5,7,9", "13,17,40"] {
        let sig: Signature = raw.parse()?;
        let reports = run_suite(&params_from_signature(&sig)?, Suite::All, &opts);
        let worst = reports
            .iter()
            .max_by(|a, b| (a.max_residual / a.tolerance.max(f64::MIN_POSITIVE)).total_cmp(&(b.max_residual / b.tolerance.max(f64::MIN_POSITIVE))))
            .expect("non-empty suite");
        println!(
            "{sig:>10}: {} checks, all pass: {}, tightest margin {} ({:.1e} of {:.0e})",
            reports.len(),
            all_passed(&reports),
            worst.name,
            worst.max_residual,
            worst.tolerance
        );
    }
    Ok(())
}
