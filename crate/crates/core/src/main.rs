//! Command-line front end.
//!
//! Exit codes are a stable contract: 0 for success (and for a colorable
//! verdict or an accepted certificate), 1 for an uncolorable verdict or a
//! rejected certificate, 2 for I/O failures, 3 for geometry validation
//! failures, 4 for violated preconditions, 5 for parse errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use kscolor::config::Tolerances;
use kscolor::construct::{build_circuit, build_system, validate_geometry, ConstructError};
use kscolor::csp::{
    self, check_certificate, count_colorings, first_valid_coloring, prove_paper_style, solve,
    to_cnf, Coloring, ConstraintSystem, ProveError, SolveResult,
};
use kscolor::descent::{self, DescentError};
use kscolor::formats::{
    parse_certificate, parse_system, render_svg, write_certificate, write_dimacs, write_system,
    DeriveOptions, FormatError, SvgLayers,
};
use kscolor::geom::{vec_to_latlon, Frame, GeomError, LatLon, UnitVec};

const EXIT_UNCOLORABLE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_GEOMETRY: u8 = 3;
const EXIT_PRECONDITION: u8 = 4;
const EXIT_PARSE: u8 = 5;

#[derive(Parser)]
#[command(
    name = "kscolor",
    version,
    about = "Construct, verify, and certify finite Kochen-Specker configurations"
)]
struct Cli {
    /// Tolerance overrides, e.g. --tol merge=1e-6 (names: norm, orth,
    /// plane, ang, lat, canon, merge).
    #[arg(long, global = true, value_name = "NAME=VALUE")]
    tol: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the descent-gadget configuration and write it as a system
    /// document.
    Construct {
        /// Circuit hop in degrees; must divide 90.
        #[arg(long, default_value_t = 30)]
        step_deg: u32,
        /// Output system document.
        #[arg(long)]
        out: PathBuf,
        /// Optional figure of the circuit and gadget chains.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Decide colorability of a system document.
    Verify {
        system: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Full)]
        mode: Mode,
        /// On an uncolorable system, also derive the case-split certificate
        /// and write it here.
        #[arg(long)]
        certificate: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Export a system as DIMACS CNF (variable true = point red).
    ExportCnf {
        system: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Plan a descent chain between two points of the standard frame.
    PlanDescent {
        #[arg(long)]
        from_lat: f64,
        #[arg(long)]
        from_lon: f64,
        #[arg(long)]
        to_lat: f64,
        #[arg(long)]
        to_lon: f64,
        #[arg(long)]
        json: bool,
    },
    /// Derive constraints from the points of a document and write the
    /// resulting system.
    Derive {
        vectors: PathBuf,
        /// Scan for orthogonal triples.
        #[arg(long)]
        triples: bool,
        /// Scan for orthogonal pairs outside triples.
        #[arg(long)]
        pairs: bool,
        /// Scan for span relations.
        #[arg(long)]
        spans: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Replay a certificate against a system.
    CheckCert {
        system: PathBuf,
        certificate: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Propagation only; refutes or reports undecided.
    Propagate,
    /// Complete backtracking search.
    Full,
    /// Exhaustive enumeration (at most 24 points).
    Brute,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Failure {
        Failure {
            code,
            message: message.into(),
        }
    }
}

fn io_failure(path: &Path, err: std::io::Error) -> Failure {
    Failure::new(EXIT_IO, format!("{}: {err}", path.display()))
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Failure {
        let code = match e {
            FormatError::TooManyPoints { .. } => EXIT_PRECONDITION,
            _ => EXIT_PARSE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<ConstructError> for Failure {
    fn from(e: ConstructError) -> Failure {
        Failure::new(EXIT_PRECONDITION, e.to_string())
    }
}

impl From<DescentError> for Failure {
    fn from(e: DescentError) -> Failure {
        Failure::new(EXIT_PRECONDITION, e.to_string())
    }
}

impl From<GeomError> for Failure {
    fn from(e: GeomError) -> Failure {
        Failure::new(EXIT_PRECONDITION, e.to_string())
    }
}

fn parse_tol_overrides(specs: &[String]) -> Result<Tolerances, Failure> {
    let mut tol = Tolerances::default();
    for spec in specs {
        let Some((name, value)) = spec.split_once('=') else {
            return Err(Failure::new(
                EXIT_PRECONDITION,
                format!("--tol expects NAME=VALUE, got `{spec}`"),
            ));
        };
        let value: f64 = value.parse().map_err(|_| {
            Failure::new(EXIT_PRECONDITION, format!("bad tolerance value in `{spec}`"))
        })?;
        tol.set(name, value)
            .map_err(|e| Failure::new(EXIT_PRECONDITION, e))?;
    }
    Ok(tol)
}

fn read_to_string(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_failure(path, e))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| io_failure(path, e))
}

fn load_system(path: &Path, tol: &Tolerances) -> Result<ConstraintSystem, Failure> {
    let text = read_to_string(path)?;
    Ok(parse_system(&text, tol)?)
}

fn geometry_gate(sys: &ConstraintSystem, tol: &Tolerances) -> Result<(), Failure> {
    let violations = validate_geometry(sys, tol);
    if violations.is_empty() {
        return Ok(());
    }
    let mut msg = format!("{} geometry violations:", violations.len());
    for v in violations.iter().take(8) {
        msg.push_str(&format!("\n  {}: {}", v.constraint, v.message));
    }
    if violations.len() > 8 {
        msg.push_str("\n  ...");
    }
    Err(Failure::new(EXIT_GEOMETRY, msg))
}

/// Recover the circuit order and corner triple from positional labels.
fn labeled_circuit(sys: &ConstraintSystem) -> Option<([usize; 3], Vec<usize>)> {
    let mut order = vec![sys.index_of_label("N")?];
    let mut i = 1;
    while let Some(idx) = sys.index_of_label(&kscolor::construct::circuit_label(i)) {
        order.push(idx);
        i += 1;
    }
    if order.len() < 3 || order.len() % 3 != 0 {
        return None;
    }
    let m = order.len() / 3;
    Some(([order[0], order[m], order[2 * m]], order))
}

#[derive(Serialize)]
struct VerifyReport {
    verdict: &'static str,
    coloring: Option<String>,
    points: usize,
    constraints: usize,
    certificate: Option<String>,
}

fn cmd_construct(
    step_deg: u32,
    out: &Path,
    svg: Option<&Path>,
    tol: &Tolerances,
) -> Result<u8, Failure> {
    let sys = build_system(step_deg, tol)?;
    geometry_gate(&sys, tol)?;
    write_file(out, &write_system(&sys))?;
    println!("points {}", sys.point_count());
    println!("triples {}", sys.triples().len());
    println!("pairs {}", sys.pairs().len());
    println!("spans {}", sys.spans().len());
    println!("wrote {}", out.display());

    if let Some(svg_path) = svg {
        let circuit = build_circuit(step_deg, tol)?;
        let mut chains = Vec::new();
        for k in 0..circuit.len() {
            let u = circuit.points()[k];
            let s = circuit.points()[(k + 1) % circuit.len()];
            let gadget = kscolor::construct::build_gadget(u, s, tol)?;
            chains.push(gadget.chain().points.clone());
        }
        let pole = UnitVec::normalized(1.0, 1.0, 1.0).expect("non-zero");
        let view = Frame::from_pole_and_meridian(
            pole,
            UnitVec::normalized(1.0, 0.0, 0.0).expect("non-zero"),
            tol,
        )?;
        let layers = SvgLayers {
            points: circuit
                .labels()
                .iter()
                .cloned()
                .zip(circuit.points().iter().copied())
                .collect(),
            chains,
            latitude_circles_deg: vec![30.0, 60.0],
        };
        let figure = render_svg(&view, &layers, tol)?;
        write_file(svg_path, figure.as_str())?;
        println!("wrote {}", svg_path.display());
    }
    Ok(0)
}

fn verdict_lines(
    verdict: &'static str,
    coloring: Option<&Coloring>,
    sys: &ConstraintSystem,
    cert_note: Option<&str>,
    json: bool,
) -> String {
    if json {
        let report = VerifyReport {
            verdict,
            coloring: coloring.map(|c| c.compact()),
            points: sys.point_count(),
            constraints: sys.constraint_count(),
            certificate: cert_note.map(|s| s.to_string()),
        };
        serde_json::to_string_pretty(&report).expect("report serializes")
    } else {
        let mut out = String::from(verdict);
        if let Some(c) = coloring {
            out.push_str(&format!("\ncoloring {}", c.compact()));
        }
        if let Some(note) = cert_note {
            out.push_str(&format!("\ncertificate {note}"));
        }
        out
    }
}

fn cmd_verify(
    path: &Path,
    mode: Mode,
    certificate: Option<&Path>,
    json: bool,
    tol: &Tolerances,
) -> Result<u8, Failure> {
    let sys = load_system(path, tol)?;
    geometry_gate(&sys, tol)?;

    let (verdict, coloring): (&'static str, Option<Coloring>) = match mode {
        Mode::Full => match solve(&sys) {
            SolveResult::Valid(c) => ("VALID", Some(c)),
            SolveResult::Uncolorable => ("UNCOLORABLE", None),
        },
        Mode::Brute => {
            let count = count_colorings(&sys)
                .map_err(|e| Failure::new(EXIT_PRECONDITION, e.to_string()))?;
            if count > 0 {
                let c = first_valid_coloring(&sys)
                    .map_err(|e| Failure::new(EXIT_PRECONDITION, e.to_string()))?
                    .expect("count > 0 implies a witness");
                ("VALID", Some(c))
            } else {
                ("UNCOLORABLE", None)
            }
        }
        Mode::Propagate => match csp::propagate(&sys, &Coloring::empty(sys.point_count())) {
            Err(_) => ("UNCOLORABLE", None),
            Ok(c) if c.is_total() => ("VALID", Some(c)),
            Ok(_) => ("UNDECIDED", None),
        },
    };

    let mut cert_note: Option<String> = None;
    if verdict == "UNCOLORABLE" {
        if let Some(cert_path) = certificate {
            match labeled_circuit(&sys) {
                Some((corners, order)) => match prove_paper_style(&sys, corners, &order) {
                    Ok(cert) => {
                        check_certificate(&sys, &cert)
                            .map_err(|e| Failure::new(EXIT_PRECONDITION, e.to_string()))?;
                        write_file(cert_path, &write_certificate(&cert))?;
                        cert_note = Some(format!("written to {}", cert_path.display()));
                    }
                    Err(ProveError::NotDerivable { reason }) => {
                        cert_note = Some(format!("not derivable: {reason}"));
                    }
                    Err(e) => {
                        cert_note = Some(format!("not derivable: {e}"));
                    }
                },
                None => {
                    cert_note =
                        Some("not derivable: no labeled circuit in this system".to_string());
                }
            }
        }
    }

    println!(
        "{}",
        verdict_lines(verdict, coloring.as_ref(), &sys, cert_note.as_deref(), json)
    );
    Ok(if verdict == "UNCOLORABLE" {
        EXIT_UNCOLORABLE
    } else {
        0
    })
}

fn cmd_export_cnf(path: &Path, out: &Path, tol: &Tolerances) -> Result<u8, Failure> {
    let sys = load_system(path, tol)?;
    let cnf = to_cnf(&sys);
    write_file(out, &write_dimacs(&cnf))?;
    println!(
        "wrote {} ({} variables, {} clauses)",
        out.display(),
        cnf.var_count,
        cnf.clauses.len()
    );
    Ok(0)
}

#[derive(Serialize)]
struct StepReport {
    beta_deg: f64,
    from_lat: f64,
    from_lon: f64,
    to_lat: f64,
    to_lon: f64,
}

#[derive(Serialize)]
struct PlanReport {
    steps: Vec<StepReport>,
}

fn cmd_plan_descent(
    from_lat: f64,
    from_lon: f64,
    to_lat: f64,
    to_lon: f64,
    json: bool,
    tol: &Tolerances,
) -> Result<u8, Failure> {
    let frame = Frame::standard();
    let from = LatLon::new(from_lat, from_lon)?;
    let to = LatLon::new(to_lat, to_lon)?;
    let path = descent::plan(&frame, from, to, tol)?;
    let steps: Vec<StepReport> = path
        .steps
        .iter()
        .map(|s| {
            let a = vec_to_latlon(&frame, &s.from);
            let b = vec_to_latlon(&frame, &s.to);
            StepReport {
                beta_deg: s.beta_deg,
                from_lat: a.lat_deg(),
                from_lon: a.lon_deg(),
                to_lat: b.lat_deg(),
                to_lon: b.lon_deg(),
            }
        })
        .collect();
    if json {
        let report = PlanReport { steps };
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        println!("steps {}", steps.len());
        for (i, s) in steps.iter().enumerate() {
            println!(
                "step {} beta {} from lat {} lon {} to lat {} lon {}",
                i + 1,
                s.beta_deg,
                s.from_lat,
                s.from_lon,
                s.to_lat,
                s.to_lon
            );
        }
    }
    Ok(0)
}

fn cmd_derive(
    vectors: &Path,
    triples: bool,
    pairs: bool,
    spans: bool,
    out: &Path,
    tol: &Tolerances,
) -> Result<u8, Failure> {
    let input = load_system(vectors, tol)?;
    let opts = if triples || pairs || spans {
        DeriveOptions {
            triples,
            pairs,
            spans,
        }
    } else {
        DeriveOptions::default()
    };
    let derived = kscolor::formats::derive_constraints_labeled(
        input.points().to_vec(),
        input.labels().to_vec(),
        opts,
        tol,
    )?;
    // Keep any constraints the document already declared.
    let mut triples_all = input.triples().to_vec();
    triples_all.extend_from_slice(derived.triples());
    let mut pairs_all = input.pairs().to_vec();
    pairs_all.extend_from_slice(derived.pairs());
    let mut spans_all = input.spans().to_vec();
    spans_all.extend_from_slice(derived.spans());
    let merged = ConstraintSystem::new(
        input.points().to_vec(),
        input.labels().to_vec(),
        triples_all,
        pairs_all,
        spans_all,
    )
    .map_err(|e| Failure::new(EXIT_PRECONDITION, e.to_string()))?;
    write_file(out, &write_system(&merged))?;
    println!(
        "points {} triples {} pairs {} spans {}",
        merged.point_count(),
        merged.triples().len(),
        merged.pairs().len(),
        merged.spans().len()
    );
    println!("wrote {}", out.display());
    Ok(0)
}

fn cmd_check_cert(system: &Path, certificate: &Path, tol: &Tolerances) -> Result<u8, Failure> {
    let sys = load_system(system, tol)?;
    let text = read_to_string(certificate)?;
    let cert = parse_certificate(&text)?;
    match check_certificate(&sys, &cert) {
        Ok(()) => {
            println!("certificate ok");
            Ok(0)
        }
        Err(e) => {
            println!("certificate invalid: {e}");
            Ok(EXIT_UNCOLORABLE)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let tol = parse_tol_overrides(&cli.tol)?;
    match cli.command {
        Command::Construct { step_deg, out, svg } => {
            cmd_construct(step_deg, &out, svg.as_deref(), &tol)
        }
        Command::Verify {
            system,
            mode,
            certificate,
            json,
        } => cmd_verify(&system, mode, certificate.as_deref(), json, &tol),
        Command::ExportCnf { system, out } => cmd_export_cnf(&system, &out, &tol),
        Command::PlanDescent {
            from_lat,
            from_lon,
            to_lat,
            to_lon,
            json,
        } => cmd_plan_descent(from_lat, from_lon, to_lat, to_lon, json, &tol),
        Command::Derive {
            vectors,
            triples,
            pairs,
            spans,
            out,
        } => cmd_derive(&vectors, triples, pairs, spans, &out, &tol),
        Command::CheckCert {
            system,
            certificate,
        } => cmd_check_cert(&system, &certificate, &tol),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
