use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hasse_core::arith;
use hasse_core::family::{self, AnalyzeOptions, SieveQuery};
use hasse_core::padic::{LocalCertificate, LocalStatus};
use hasse_core::solvability;
use hasse_core::threedescent::PlaneCubic;
use hasse_core::Error;
use num_bigint::BigInt;

mod repro;

const EXIT_REPRO: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INADMISSIBLE: u8 = 3;
const EXIT_INCONCLUSIVE: u8 = 4;

#[derive(Parser)]
#[command(name = "hasse", version, about = "Plane cubics that violate the Hasse principle, certified by isogeny descent")]
struct Cli {
    /// Worker threads (default: all cores); never changes the output
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Tsv,
}

#[derive(Args)]
struct Mode {
    /// Require h = 19 mod 120 (default)
    #[arg(long, conflicts_with = "literal")]
    strict: bool,
    /// Only the stated hypotheses: h = 3 mod 8 and |h|, |h-2|, |h-6|, |h-8| prime
    #[arg(long)]
    literal: bool,
}

impl Mode {
    fn strict(&self) -> bool {
        !self.literal
    }
}

#[derive(Args)]
struct CubicSource {
    /// Family parameter
    #[arg(long, allow_hyphen_values = true, required_unless_present = "coeffs")]
    h: Option<i64>,
    /// Which distinguished cubic: + for t = 1 + sqrt 2, - for t = -1 + sqrt 2
    #[arg(long, default_value = "+", allow_hyphen_values = true, value_parser = ["+", "-"])]
    sign: String,
    /// Ten comma-separated coefficients of w^3, w^2z, wz^2, z^3, w^2, wz, z^2, w, z, 1
    #[arg(long, allow_hyphen_values = true, conflicts_with = "h")]
    coeffs: Option<String>,
    #[command(flatten)]
    mode: Mode,
}

#[derive(Subcommand)]
enum Command {
    /// List admissible h in a range
    Sieve {
        #[arg(long, allow_hyphen_values = true)]
        from: i64,
        #[arg(long, allow_hyphen_values = true)]
        to: i64,
        #[command(flatten)]
        mode: Mode,
        #[arg(long, value_enum, default_value = "tsv")]
        format: Format,
    },
    /// Run the full descent for one h
    Analyze {
        #[arg(long, allow_hyphen_values = true)]
        h: i64,
        /// Shorthand for --format json
        #[arg(long)]
        json: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Report store: the JSON report is written to <dir>/h_<h>.json and reused
        #[arg(long, env = "HASSE_REPORT_DIR")]
        out: Option<PathBuf>,
        /// Height bound of the rational point search
        #[arg(long, default_value_t = family::DEFAULT_HEIGHT)]
        height: u64,
        #[command(flatten)]
        mode: Mode,
    },
    /// Print a distinguished homogeneous-space cubic
    Cubic {
        #[arg(long, allow_hyphen_values = true)]
        h: i64,
        #[arg(long, default_value = "+", allow_hyphen_values = true, value_parser = ["+", "-"])]
        sign: String,
        /// Print the canonical representative under z -> -z and sign
        #[arg(long)]
        canonical: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[command(flatten)]
        mode: Mode,
    },
    /// Local solvability certificates of a cubic
    CheckLocal {
        #[command(flatten)]
        source: CubicSource,
        /// Check a single prime instead of every place
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Bounded search for rational points on a cubic
    SearchPoints {
        #[command(flatten)]
        source: CubicSource,
        #[arg(long, default_value_t = 100)]
        height: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Check every reproducible number of the construction
    ReproducePaper,
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    if e.is_inconclusive() {
        ExitCode::from(EXIT_INCONCLUSIVE)
    } else {
        ExitCode::from(EXIT_USAGE)
    }
}

/// A certified violation exits 0; a certified local obstruction contradicts the
/// expected construction and exits 1; anything undecided exits 4.
fn verdict_exit(verdict: &str) -> ExitCode {
    match verdict {
        "HASSE_VIOLATION" => ExitCode::SUCCESS,
        "NO_VIOLATION" => ExitCode::from(EXIT_REPRO),
        _ => ExitCode::from(EXIT_INCONCLUSIVE),
    }
}

fn check_admissible(h: i64, mode: &Mode) -> Result<(), ExitCode> {
    match family::admissibility_failure(h, mode.strict()) {
        None => Ok(()),
        Some(why) => {
            eprintln!("inadmissible h: {why}");
            Err(ExitCode::from(EXIT_INADMISSIBLE))
        }
    }
}

fn family_cubic(h: i64, sign: &str) -> Result<PlaneCubic, Error> {
    let (plus, minus) = family::distinguished_cubics(h)?;
    Ok(if sign == "-" { minus } else { plus })
}

fn source_cubic(src: &CubicSource) -> Result<PlaneCubic, ExitCode> {
    if let Some(text) = &src.coeffs {
        let parsed: Result<Vec<_>, String> = text.split(',').map(|s| arith::serde_str::parse_rational(s.trim())).collect();
        return match parsed.map_err(|e| Error::InvalidInput(e)).and_then(PlaneCubic::new) {
            Ok(c) => Ok(c),
            Err(e) => Err(fail(&e)),
        };
    }
    let h = src.h.expect("clap enforces --h or --coeffs");
    check_admissible(h, &src.mode)?;
    family_cubic(h, &src.sign).map_err(|e| fail(&e))
}

fn cert_line(c: &LocalCertificate) -> String {
    let place = match c.place {
        arith::Place::Real => "real".to_string(),
        arith::Place::Prime(p) => format!("p = {p}"),
    };
    let status = match c.status {
        LocalStatus::Solvable => "solvable",
        LocalStatus::Unsolvable => "unsolvable",
        LocalStatus::Inconclusive => "inconclusive",
    };
    let witness = match (&c.witness, &c.real_witness) {
        (Some(w), _) => format!(" witness ({})", w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" : ")),
        (_, Some(r)) => format!(" witness ({})", r.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(" : ")),
        _ => String::new(),
    };
    format!("{place}: {status}{witness} depth {}/{}", c.depth, c.depth_bound)
}

fn run(cli: Cli) -> ExitCode {
    match cli.command {
        Command::Sieve { from, to, mode, format } => {
            let q = SieveQuery {
                lo: from,
                hi: to,
                strict_congruence: mode.strict(),
            };
            match family::sieve(&q) {
                Ok(hs) => {
                    match format {
                        Format::Json => println!("{}", serde_json::to_string(&hs).unwrap()),
                        _ => hs.iter().for_each(|h| println!("{h}")),
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Analyze {
            h,
            json,
            format,
            out,
            height,
            mode,
        } => {
            if let Err(code) = check_admissible(h, &mode) {
                return code;
            }
            let opts = AnalyzeOptions {
                height,
                strict_congruence: mode.strict(),
            };
            let json = json || format == Format::Json;
            if let Some(text) = out.as_ref().and_then(|dir| family::cached_report(dir, h, &opts)) {
                if json {
                    println!("{text}");
                    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
                    return verdict_exit(v["verdict"].as_str().unwrap_or(""));
                }
            }
            let report = match family::analyze(h, &opts) {
                Ok(r) => r,
                Err(e) => return fail(&e),
            };
            if let Some(dir) = &out {
                if let Err(e) = family::store_report(dir, &report) {
                    return fail(&e);
                }
            }
            if json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.render_text());
            }
            verdict_exit(&report.verdict.to_string())
        }
        Command::Cubic {
            h,
            sign,
            canonical,
            format,
            mode,
        } => {
            if let Err(code) = check_admissible(h, &mode) {
                return code;
            }
            let c = match family_cubic(h, &sign) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let c = if canonical { c.canonicalize() } else { c };
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&c).unwrap()),
                _ => println!("{}", c.render()),
            }
            ExitCode::SUCCESS
        }
        Command::CheckLocal { source, prime, format } => {
            let c = match source_cubic(&source) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let (solvable, certs) = match prime {
                Some(p) => match solvability::locally_solvable(&c, &BigInt::from(p)) {
                    Ok(cert) => (cert.is_solvable(), vec![cert]),
                    Err(e) => return fail(&e),
                },
                None => match solvability::everywhere_locally_solvable(&c) {
                    Ok(b) => (b.solvable, b.certificates),
                    Err(e) => return fail(&e),
                },
            };
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&serde_json::json!({
                        "equation": c.render(),
                        "solvable": solvable,
                        "certificates": certs,
                    }))
                    .unwrap()
                ),
                _ => {
                    println!("{}", c.render());
                    certs.iter().for_each(|cert| println!("  {}", cert_line(cert)));
                    println!("locally solvable: {solvable}");
                }
            }
            ExitCode::SUCCESS
        }
        Command::SearchPoints { source, height, format } => {
            let c = match source_cubic(&source) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let r = match solvability::search_rational_points(&c, height) {
                Ok(r) => r,
                Err(e) => return fail(&e),
            };
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&r).unwrap()),
                Format::Tsv => r
                    .projective_points
                    .iter()
                    .for_each(|p| println!("{}\t{}\t{}", p[0], p[1], p[2])),
                Format::Text => {
                    println!("{}", c.render());
                    println!("points (w : z : v) with |w|, |z|, |v| <= {height}: {}", r.projective_points.len());
                    r.projective_points
                        .iter()
                        .for_each(|p| println!("  ({} : {} : {})", p[0], p[1], p[2]));
                }
            }
            ExitCode::SUCCESS
        }
        Command::ReproducePaper => {
            if repro::run() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_REPRO)
            }
        }
    }
}

fn main() -> ExitCode {
    // die quietly when piped into `head` instead of panicking on EPIPE
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global().is_err() {
            eprintln!("error: could not start {n} worker threads");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    run(cli)
}
