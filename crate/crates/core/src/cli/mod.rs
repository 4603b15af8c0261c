//! The `trimap` command line.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 usage or invalid
//! signature, 3 domain, 4 convergence, 5 I/O.

mod svg;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::automorphic::{build_embedding, InversionOptions, MapSample, TriangleEmbedding, MAX_NEWTON_ITERATIONS};
use crate::error::Error;
use crate::geometry::tanh_sq_half_dist_angles;
use crate::group::{params_from_signature, HypParams, Signature};
use crate::special::ComplexValue;
use crate::verify::{all_passed, run_suite, Suite, VerifyOptions};

pub use svg::{render_svg, SvgOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_CONVERGENCE: i32 = 4;
pub const EXIT_IO: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "trimap", version, about = "Schwarz triangle maps and their automorphic inverses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the hypergeometric exponents, constants and vertices.
    Params {
        #[command(flatten)]
        sig: SigArg,
        /// Print a single JSON object.
        #[arg(long)]
        json: bool,
    },
    /// Evaluate w(ξ) or invert ξ(w), with dξ/dw.
    Eval {
        #[command(flatten)]
        sig: SigArg,
        /// Point of the upper half ξ-plane, e.g. 0.3+0.2i.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "w", required_unless_present = "w")]
        xi: Option<String>,
        /// Point of the upper half w-plane, e.g. 1e-9+1i.
        #[arg(long, allow_hyphen_values = true)]
        w: Option<String>,
        /// Newton iteration limit for --w.
        #[arg(long, default_value_t = MAX_NEWTON_ITERATIONS)]
        max_iter: usize,
        #[arg(long)]
        json: bool,
    },
    /// Run numerical identity checks.
    Verify {
        #[command(flatten)]
        sig: SigArg,
        #[arg(long, default_value = "all", value_parser = clap::builder::PossibleValuesParser::new(Suite::NAMES))]
        suite: String,
        #[arg(long)]
        json: bool,
    },
    /// Sample the map over the reference cell of the ξ half-plane.
    Sample {
        #[command(flatten)]
        sig: SigArg,
        /// Grid size as NxM, both at least 2.
        #[arg(long, default_value = "16x16", value_parser = parse_grid)]
        grid: (usize, usize),
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Jsonl)]
        format: Format,
    },
    /// Draw the embedded fundamental triangle as SVG.
    Svg {
        #[command(flatten)]
        sig: SigArg,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct SigArg {
    /// Signature n1,n2,n3.
    #[arg(value_name = "N1,N2,N3", required_unless_present = "sig", conflicts_with = "sig")]
    signature: Option<String>,
    /// Signature n1,n2,n3 (alternative to the positional form).
    #[arg(long = "sig", value_name = "N1,N2,N3")]
    sig: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (n, m) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NxM, got {s:?}"))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("{t:?} is not a size"));
    let (n, m) = (parse(n)?, parse(m)?);
    if n < 2 || m < 2 {
        return Err(format!("grid dimensions must be at least 2, got {n}x{m}"));
    }
    Ok((n, m))
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Lib(Error),
    Io(PathBuf, io::Error),
    ChecksFailed,
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Io(..) => EXIT_IO,
            Failure::ChecksFailed => EXIT_VERIFY,
            Failure::Lib(e) => exit_code_for(e),
        }
    }
}

/// Exit code for a library error raised after the signature was accepted.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::NotHyperbolic(..) | Error::OrderTooSmall(_) | Error::DegenerateParams(_) => EXIT_USAGE,
        Error::Convergence { .. } | Error::NoConvergence { .. } => EXIT_CONVERGENCE,
        Error::Pole(_)
        | Error::BranchCut(_)
        | Error::Domain(_)
        | Error::ZeroDenominator(_)
        | Error::NonFinite(_)
        | Error::OutsideFundamentalDomain(_) => EXIT_DOMAIN,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs the command line with `args` (including the program name) and
/// returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            if code == 0 {
                let _ = write!(out, "{}", e.render());
                return code;
            }
            let _ = write!(err, "{}", e.render());
            // Value errors omit the usage line; show the subcommand's.
            if e.kind() == clap::error::ErrorKind::InvalidValue {
                let mut cmd = Cli::command();
                cmd.build();
                let name = args.get(1).and_then(|a| a.to_str()).unwrap_or_default();
                if let Some(sub) = cmd.find_subcommand_mut(name) {
                    let _ = writeln!(err, "\n{}", sub.render_usage());
                }
            }
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            match &f {
                Failure::Usage(msg) => {
                    let _ = writeln!(err, "error: {msg}");
                }
                Failure::Lib(e) => {
                    let _ = writeln!(err, "{}: {e}", e.name());
                }
                Failure::Io(path, e) => {
                    let _ = writeln!(err, "IoError: {}: {e}", path.display());
                }
                Failure::ChecksFailed => {}
            }
            f.exit_code()
        }
    }
}

fn signature_of(arg: &SigArg) -> Result<(Signature, HypParams), Failure> {
    let raw = arg.signature.as_deref().or(arg.sig.as_deref()).unwrap_or_default();
    let usage = |e: Error| Failure::Usage(format!("{}: {e}", e.name()));
    let sig: Signature = raw.parse().map_err(usage)?;
    let params = params_from_signature(&sig).map_err(usage)?;
    Ok((sig, params))
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    let stdout = PathBuf::from("<stdout>");
    let io = |e: io::Error| Failure::Io(PathBuf::from("<stdout>"), e);
    match command {
        Command::Params { sig, json } => {
            let (sig, p) = signature_of(&sig)?;
            let e = build_embedding(&p)?;
            let report = params_report(&sig, &p, &e);
            if json {
                writeln!(out, "{}", serde_json::to_string(&report).expect("serialisable")).map_err(io)?;
            } else {
                write!(out, "{}", params_text(&report)).map_err(io)?;
            }
        }
        Command::Eval {
            sig,
            xi,
            w,
            max_iter,
            json,
        } => {
            let (_, p) = signature_of(&sig)?;
            let e = build_embedding(&p)?;
            let sample = match (xi, w) {
                (Some(xi), _) => {
                    let xi = parse_point(&xi, "--xi")?;
                    MapSample {
                        w: e.uniformizer_w(xi)?,
                        xi,
                        dxi_dw: e.dxi_dw_closed(xi)?,
                    }
                }
                (None, Some(w)) => {
                    let w = parse_point(&w, "--w")?;
                    let opts = InversionOptions {
                        max_iterations: max_iter,
                        ..InversionOptions::default()
                    };
                    let xi = e.xi_extended_with(w, &opts)?;
                    MapSample {
                        w,
                        xi,
                        dxi_dw: e.dxi_dw_closed(xi)?,
                    }
                }
                (None, None) => return Err(Failure::Usage("one of --xi or --w is required".into())),
            };
            if json {
                writeln!(out, "{}", serde_json::to_string(&SampleRecord::from(sample)).expect("serialisable"))
                    .map_err(io)?;
            } else {
                writeln!(out, "w = {}", fmt_complex(sample.w)).map_err(io)?;
                writeln!(out, "xi = {}", fmt_complex(sample.xi)).map_err(io)?;
                writeln!(out, "dxi_dw = {}", fmt_complex(sample.dxi_dw)).map_err(io)?;
            }
        }
        Command::Verify { sig, suite, json } => {
            let (sig, p) = signature_of(&sig)?;
            let suite: Suite = suite.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
            let opts = VerifyOptions::from_env().map_err(|e| Failure::Usage(e.to_string()))?;
            let reports = run_suite(&p, suite, &opts);
            if json {
                let doc = json!({ "signature": sig.to_string(), "suite": suite.to_string(), "checks": reports });
                writeln!(out, "{doc}").map_err(io)?;
            } else {
                writeln!(out, "signature {sig} suite {suite}").map_err(io)?;
                for r in &reports {
                    writeln!(out, "{r}").map_err(io)?;
                }
                let failed = reports.iter().filter(|r| !r.pass).count();
                writeln!(out, "{} checks, {failed} failed", reports.len()).map_err(io)?;
            }
            if !all_passed(&reports) {
                return Err(Failure::ChecksFailed);
            }
        }
        Command::Sample { sig, grid, out: path, format } => {
            let (sig, p) = signature_of(&sig)?;
            let e = build_embedding(&p)?;
            let samples = e.sample_grid(grid.0, grid.1);
            let target = path.clone().unwrap_or(stdout);
            with_output(path.as_deref(), out, |w| write_samples(w, &sig, &samples, format))
                .map_err(|err| Failure::Io(target, err))?;
        }
        Command::Svg { sig, out: path } => {
            let (_, p) = signature_of(&sig)?;
            let e = build_embedding(&p)?;
            let doc = render_svg(&e, &SvgOptions::default())?;
            let target = path.clone().unwrap_or(stdout);
            with_output(path.as_deref(), out, |w| w.write_all(doc.as_bytes()))
                .map_err(|err| Failure::Io(target, err))?;
        }
    }
    Ok(())
}

fn with_output(
    path: Option<&Path>,
    out: &mut dyn Write,
    body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> io::Result<()> {
    match path {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            body(&mut file)?;
            file.flush()
        }
        None => body(out),
    }
}

fn parse_point(raw: &str, flag: &str) -> Result<ComplexValue, Failure> {
    let z: Complex64 = raw
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("{flag}: {raw:?} is not a complex number (try 0.3+0.2i)")))?;
    if !z.is_finite() {
        return Err(Failure::Usage(format!("{flag}: {raw:?} is not finite")));
    }
    Ok(z)
}

/// 17 significant digits, plain decimal when the exponent is moderate.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-6..=15).contains(&exp) {
        format!("{:.*}", (16 - exp) as usize, x)
    } else {
        format!("{x:.16e}")
    }
}

pub fn fmt_complex(z: ComplexValue) -> String {
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    let sign = if im.is_sign_negative() { '-' } else { '+' };
    format!("{}{sign}{}i", fmt_real(z.re), fmt_real(im.abs()))
}

#[derive(Serialize)]
struct ComplexJson {
    re: f64,
    im: f64,
}

impl From<ComplexValue> for ComplexJson {
    fn from(z: ComplexValue) -> Self {
        ComplexJson { re: z.re, im: z.im }
    }
}

#[derive(Serialize)]
struct Exponents {
    alpha: String,
    beta: String,
    gamma: String,
    alpha_p: String,
    beta_p: String,
    gamma_p: String,
}

#[derive(Serialize)]
struct Vertices {
    w1: ComplexJson,
    w2: ComplexJson,
    w3: ComplexJson,
}

#[derive(Serialize)]
struct ParamsReport {
    signature: String,
    alpha: f64,
    beta: f64,
    gamma: f64,
    alpha_p: f64,
    beta_p: f64,
    gamma_p: f64,
    exact: Exponents,
    #[serde(rename = "K")]
    k: f64,
    #[serde(rename = "C0")]
    c0: f64,
    #[serde(rename = "C")]
    c: ComplexJson,
    tanh2_half_d12: f64,
    vertices: Vertices,
}

fn params_report(sig: &Signature, p: &HypParams, e: &TriangleEmbedding) -> ParamsReport {
    let x = p.exact();
    let [w1, w2, w3] = e.vertices();
    ParamsReport {
        signature: sig.to_string(),
        alpha: p.alpha,
        beta: p.beta,
        gamma: p.gamma_,
        alpha_p: p.alpha_p,
        beta_p: p.beta_p,
        gamma_p: p.gamma_p,
        exact: Exponents {
            alpha: x.alpha.to_string(),
            beta: x.beta.to_string(),
            gamma: x.gamma.to_string(),
            alpha_p: x.alpha_p.to_string(),
            beta_p: x.beta_p.to_string(),
            gamma_p: x.gamma_p.to_string(),
        },
        k: e.k(),
        c0: e.c0(),
        c: e.c().into(),
        tanh2_half_d12: tanh_sq_half_dist_angles(sig),
        vertices: Vertices {
            w1: w1.into(),
            w2: w2.into(),
            w3: w3.into(),
        },
    }
}

fn params_text(r: &ParamsReport) -> String {
    let c = |z: &ComplexJson| fmt_complex(Complex64::new(z.re, z.im));
    let x = &r.exact;
    let mut s = format!("signature = {}\n", r.signature);
    for (name, value, exact) in [
        ("alpha", r.alpha, &x.alpha),
        ("beta", r.beta, &x.beta),
        ("gamma", r.gamma, &x.gamma),
        ("alpha_p", r.alpha_p, &x.alpha_p),
        ("beta_p", r.beta_p, &x.beta_p),
        ("gamma_p", r.gamma_p, &x.gamma_p),
    ] {
        s += &format!("{name} = {} ({exact})\n", fmt_real(value));
    }
    s += &format!("K = {}\n", fmt_real(r.k));
    s += &format!("C0 = {}\n", fmt_real(r.c0));
    s += &format!("C = {}\n", c(&r.c));
    s += &format!("tanh2_half_d12 = {}\n", fmt_real(r.tanh2_half_d12));
    s += &format!("w1 = {}\n", c(&r.vertices.w1));
    s += &format!("w2 = {}\n", c(&r.vertices.w2));
    s += &format!("w3 = {}\n", c(&r.vertices.w3));
    s
}

/// One line of a sample file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleRecord {
    pub w_re: f64,
    pub w_im: f64,
    pub xi_re: f64,
    pub xi_im: f64,
    pub dxidw_re: f64,
    pub dxidw_im: f64,
}

impl From<MapSample> for SampleRecord {
    fn from(s: MapSample) -> Self {
        SampleRecord {
            w_re: s.w.re,
            w_im: s.w.im,
            xi_re: s.xi.re,
            xi_im: s.xi.im,
            dxidw_re: s.dxi_dw.re,
            dxidw_im: s.dxi_dw.im,
        }
    }
}

pub const CSV_HEADER: [&str; 6] = ["w_re", "w_im", "xi_re", "xi_im", "dxidw_re", "dxidw_im"];

fn write_samples(out: &mut dyn Write, sig: &Signature, samples: &[MapSample], format: Format) -> io::Result<()> {
    match format {
        Format::Jsonl => {
            for s in samples {
                serde_json::to_writer(&mut *out, &SampleRecord::from(*s))?;
                out.write_all(b"\n")?;
            }
        }
        Format::Csv => {
            writeln!(out, "# signature={sig}")?;
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(CSV_HEADER)?;
            for s in samples {
                let r = SampleRecord::from(*s);
                w.write_record([r.w_re, r.w_im, r.xi_re, r.xi_im, r.dxidw_re, r.dxidw_im].map(fmt_real))?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("trimap").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn real_formatting() {
        assert_eq!(fmt_real(2.0 / 3.0), "0.66666666666666663");
        assert_eq!(fmt_real(1.0), "1.0000000000000000");
        assert_eq!(fmt_real(0.0), "0");
        assert_eq!(fmt_real(-1e-9), "-1.0000000000000001e-9");
        assert_eq!(fmt_complex(Complex64::new(0.0, -0.0)), "0+0i");
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("8x6"), Ok((8, 6)));
        assert!(parse_grid("1x8").is_err());
        assert!(parse_grid("8").is_err());
    }

    #[test]
    fn params_text_contains_constants() {
        let (code, out, _) = run_capture(&["params", "3,3,4"]);
        assert_eq!(code, 0);
        assert!(out.contains("gamma = 0.666666"), "{out}");
        assert!(out.contains("K = 0.2047"), "{out}");
    }

    #[test]
    fn signature_errors_use_their_names() {
        let (code, _, err) = run_capture(&["params", "3,3,3"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("NotHyperbolic"));
        let (code, _, _) = run_capture(&["params"]);
        assert_eq!(code, EXIT_USAGE);
        let (code, _, _) = run_capture(&["params", "--sig", "4,4,4"]);
        assert_eq!(code, 0);
    }

    #[test]
    fn eval_points() {
        let (code, out, _) = run_capture(&["eval", "3,3,4", "--xi", "0"]);
        assert_eq!(code, 0);
        assert!(out.contains("w = 0+1.0000000000000000i"), "{out}");
        assert!(out.contains("dxi_dw = 0+0i"), "{out}");
        let (code, _, err) = run_capture(&["eval", "3,3,4", "--w", "5+0.01i"]);
        assert_eq!(code, EXIT_DOMAIN, "{err}");
        let (code, _, _) = run_capture(&["eval", "3,3,4", "--w", "-1i"]);
        assert_eq!(code, EXIT_DOMAIN);
        let (code, _, err) = run_capture(&["eval", "3,3,4", "--w", "-0.1+1.3i", "--max-iter", "0"]);
        assert_eq!(code, EXIT_CONVERGENCE);
        assert!(err.contains("NoConvergence"));
    }
}
