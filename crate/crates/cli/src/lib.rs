//! The `constellation-kit` command line as a library: [`run_command`] parses
//! an argument list, runs the command and returns its exit code, a report
//! and an optional JSON payload.

pub mod formats;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use constellation_core::affine::{
    complete_foliation_set, make_plane, table1_constellation, table1_digits, verify_constellation, verify_plane_axioms,
    AffineConstellation,
};
use constellation_core::latin::{
    certify_mates, mate_search, mols_macneish, mols_prime_power, parse_latin_text, render_latin, validate_squares,
    CertifyOptions, LatinSquare, TABLE1_TEXT,
};
use constellation_core::mub::{
    constellation_defect, fourier_basis, fourier_family6, hw_triple, tao_basis, wf_complete_set, Basis,
    MuConstellation, VERIFICATION_TOL,
};
use constellation_core::search::{extend_search, search_constellation, SearchConfig, SearchStatus};
use constellation_core::signature::{Bracket, Signature};
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use formats::{
    BasisSetDoc, CaptionDoc, CertificateDoc, ConstellationDoc, DefectDoc, MateDoc, MolsDoc, PairDefectDoc, SearchDoc,
    Table1Doc, VerifyDoc, EVIDENCE_NOTE,
};

pub const WORKERS_ENV: &str = "CONSTELLATION_KIT_WORKERS";

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutcome {
    /// 0 success, 1 verification failed or nothing found, 2 usage or input error.
    pub exit_code: i32,
    pub report: String,
    pub payload: Option<Value>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
}

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Parser, Debug)]
#[command(
    name = "constellation-kit",
    version,
    about = "Affine and mutually unbiased constellations"
)]
struct Cli {
    /// Emit a JSON payload.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the Galois-field affine plane of a prime-power order.
    Plane {
        #[arg(long)]
        order: u32,
        /// Also write the constellation JSON to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check an affine constellation read from JSON.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        /// Also check the affine plane postulates.
        #[arg(long)]
        plane_axioms: bool,
    },
    /// Append the foliation implied by d full foliations.
    Complete {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Construct mutually orthogonal Latin squares.
    Mols {
        #[arg(long)]
        order: u32,
        #[arg(long, value_enum)]
        method: MolsMethod,
    },
    /// Search for an orthogonal mate of a Latin square given as text.
    Mate {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Exhaustively check every reduced Latin square for an orthogonal mate.
    #[command(name = "certify-no-mols6")]
    CertifyNoMols6 {
        #[arg(long, env = WORKERS_ENV)]
        workers: Option<usize>,
        /// Resume from and save progress to this file.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Order to examine; orders other than 6 are control runs.
        #[arg(long, default_value_t = 6)]
        order: usize,
    },
    /// The order-6 Graeco-Latin table with three foliations and four lines.
    Table1 {
        #[arg(long)]
        verify: bool,
    },
    /// Mutually unbiased bases.
    #[command(subcommand)]
    Mub(MubCommand),
}

#[derive(Subcommand, Debug)]
enum MubCommand {
    /// Build a known basis or set of bases.
    Make {
        #[arg(long, value_enum)]
        kind: BasisKind,
        #[arg(long)]
        dim: Option<usize>,
        /// First Fourier-family parameter, in turns.
        #[arg(long, allow_negative_numbers = true)]
        a: Option<f64>,
        /// Second Fourier-family parameter, in turns.
        #[arg(long, allow_negative_numbers = true)]
        b: Option<f64>,
    },
    /// Defects of a basis set read from JSON.
    Defect {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = VERIFICATION_TOL)]
        tol: f64,
    },
    /// Numerical search for an MU constellation.
    Search {
        #[arg(long)]
        dim: usize,
        /// Set sizes, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        signature: Vec<usize>,
        #[command(flatten)]
        budget: Budget,
    },
    /// Numerical search for vectors unbiased to fixed bases.
    Extend {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        vectors: usize,
        #[arg(long)]
        orthonormal: bool,
        #[command(flatten)]
        budget: Budget,
    },
}

#[derive(Args, Debug)]
struct Budget {
    #[arg(long)]
    restarts: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
    #[arg(long, default_value_t = 10_000)]
    max_iterations: u64,
    #[arg(long, default_value_t = 1e-9)]
    grad_tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    threshold: f64,
}

impl Budget {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            seed: self.seed,
            restarts: self.restarts,
            max_iterations: self.max_iterations,
            grad_tol: self.grad_tol,
            success_threshold: self.threshold,
            workers: resolve_workers(self.workers),
            stop_on_success: true,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MolsMethod {
    Primepower,
    Macneish,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum BasisKind {
    Standard,
    Fourier,
    FourierFamily,
    Tao,
    HwTriple,
    Wf,
}

fn resolve_workers(w: Option<usize>) -> usize {
    w.filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Parses `argv` (program name first) and runs the command.
pub fn run_command<I, T>(argv: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return CommandOutcome {
                    exit_code: 0,
                    report: e.to_string(),
                    payload: None,
                };
            }
            // clap lists missing arguments on the lines after a trailing colon
            let text = e.to_string();
            let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
            let mut line = lines.next().unwrap_or("usage error").to_string();
            if line.ends_with(':') {
                let rest: Vec<&str> = lines.take_while(|l| !l.starts_with("Usage:")).collect();
                line = format!("{line} {}", rest.join(", "));
            }
            return CommandOutcome {
                exit_code: 2,
                report: line,
                payload: None,
            };
        }
    };
    let json = cli.json;
    match dispatch(cli.command) {
        Ok(Done { code, report, payload }) => CommandOutcome {
            exit_code: code,
            report,
            payload: if json { payload } else { None },
        },
        Err(e) => CommandOutcome {
            exit_code: 2,
            report: format!("error: {e}"),
            payload: None,
        },
    }
}

struct Done {
    code: i32,
    report: String,
    payload: Option<Value>,
}

impl Done {
    fn new(code: i32, report: String, payload: &impl Serialize) -> Self {
        Done {
            code,
            report,
            payload: Some(serde_json::to_value(payload).expect("documents serialize")),
        }
    }
}

fn dispatch(cmd: Command) -> Result<Done, CliError> {
    match cmd {
        Command::Plane { order, out } => plane(order, out.as_deref()),
        Command::Verify { input, plane_axioms } => {
            let c = read_constellation(&input)?;
            let doc = verification(&c, plane_axioms);
            let code = if doc.valid { 0 } else { 1 };
            Ok(Done::new(code, verify_report(&c, &doc), &doc))
        }
        Command::Complete { input } => complete(&input),
        Command::Mols { order, method } => mols(order, method),
        Command::Mate { input } => mate(&input),
        Command::CertifyNoMols6 {
            workers,
            checkpoint,
            order,
        } => certify(order, resolve_workers(workers), checkpoint),
        Command::Table1 { verify } => table1(verify),
        Command::Mub(m) => match m {
            MubCommand::Make { kind, dim, a, b } => make(kind, dim, a, b),
            MubCommand::Defect { input, tol } => defect(&input, tol),
            MubCommand::Search { dim, signature, budget } => search(dim, &signature, &budget),
            MubCommand::Extend {
                input,
                vectors,
                orthonormal,
                budget,
            } => extend(&input, vectors, orthonormal, &budget),
        },
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn read_constellation(path: &Path) -> Result<AffineConstellation, CliError> {
    read_json::<ConstellationDoc>(path)?.build().map_err(input_err)
}

fn read_bases(path: &Path) -> Result<MuConstellation, CliError> {
    read_json::<BasisSetDoc>(path)?.build().map_err(input_err)
}

fn plane(order: u32, out: Option<&Path>) -> Result<Done, CliError> {
    let c = make_plane(order).map_err(input_err)?;
    let doc = ConstellationDoc::new(&c);
    if let Some(path) = out {
        let text = serde_json::to_string_pretty(&doc).expect("documents serialize");
        fs::write(path, text + "\n").map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    }
    let lines: usize = c.materialized().iter().map(Vec::len).sum();
    let report = format!(
        "affine plane of order {order}: {} points, {lines} lines in {} foliations, stored as {}",
        order * order,
        c.foliation_count(),
        c.signature()
    );
    Ok(Done::new(0, report, &doc))
}

fn verification(c: &AffineConstellation, plane_axioms: bool) -> VerifyDoc {
    let report = verify_constellation(c);
    let axioms = plane_axioms.then(|| verify_plane_axioms(c));
    let valid = report.valid() && axioms.as_ref().is_none_or(|a| a.valid());
    VerifyDoc {
        valid,
        signature: c.signature().expanded(Bracket::Angle),
        stored_lines: c.stored_line_count(),
        foliations: c.foliation_count(),
        violations: report.violations.iter().map(|v| v.to_string()).collect(),
        plane_axioms: axioms.map(|a| a.violations.iter().map(|v| v.to_string()).collect()),
    }
}

fn verify_report(c: &AffineConstellation, doc: &VerifyDoc) -> String {
    let mut out = format!("{} {}\n", if doc.valid { "valid" } else { "invalid" }, doc.signature);
    out += &format!(
        "signature {}, {} stored lines, {} foliations\n",
        c.signature(),
        doc.stored_lines,
        doc.foliations
    );
    for v in &doc.violations {
        out += &format!("  violation: {v}\n");
    }
    match &doc.plane_axioms {
        Some(a) if a.is_empty() => out += "plane postulates hold\n",
        Some(a) => {
            for v in a {
                out += &format!("  postulate violation: {v}\n");
            }
        }
        None => {}
    }
    out
}

fn complete(input: &Path) -> Result<Done, CliError> {
    let c = read_constellation(input)?;
    match complete_foliation_set(&c) {
        Ok(class) => {
            let full = c.with_class(class).map_err(input_err)?;
            let report = format!("completed {} to {}", c.signature(), full.signature());
            Ok(Done::new(0, report, &ConstellationDoc::new(&full)))
        }
        Err(e) => Ok(Done {
            code: 1,
            report: format!("cannot complete {}: {e}", c.signature()),
            payload: None,
        }),
    }
}

fn mols(order: u32, method: MolsMethod) -> Result<Done, CliError> {
    let (squares, name) = match method {
        MolsMethod::Primepower => (mols_prime_power(order), "primepower"),
        MolsMethod::Macneish => (mols_macneish(order), "macneish"),
    };
    let squares = squares.map_err(input_err)?;
    let rows: Vec<Vec<Vec<u8>>> = squares.iter().map(LatinSquare::rows).collect();
    let pairwise = (0..rows.len()).all(|i| {
        (i + 1..rows.len())
            .all(|j| validate_squares(&rows[i], Some(&rows[j])).is_ok_and(|c| c.latin && c.orthogonal == Some(true)))
    });
    let mut report = format!(
        "{} mutually orthogonal Latin squares of order {order} ({name})\n",
        squares.len()
    );
    for sq in &squares {
        report += "\n";
        report += &render_latin(sq);
    }
    let doc = MolsDoc {
        order: order as usize,
        method: name.to_string(),
        squares: rows,
        pairwise_orthogonal: pairwise,
    };
    Ok(Done::new(if pairwise { 0 } else { 1 }, report, &doc))
}

fn mate(input: &Path) -> Result<Done, CliError> {
    let text = fs::read_to_string(input).map_err(|e| input_err(format!("{}: {e}", input.display())))?;
    let sq = parse_latin_text(&text).map_err(input_err)?;
    if sq.order() > 8 {
        return Err(input_err(format!(
            "order {} is above the supported maximum of 8",
            sq.order()
        )));
    }
    let found = mate_search(&sq);
    let doc = MateDoc::new(sq.order(), found.transversals, found.mate.as_ref());
    let head = format!("order {}: {} transversals", sq.order(), found.transversals);
    Ok(match &found.mate {
        Some(m) => Done::new(0, format!("{head}, orthogonal mate found\n\n{}", render_latin(m)), &doc),
        None => Done::new(1, format!("{head}, no orthogonal mate"), &doc),
    })
}

fn certify(order: usize, workers: usize, checkpoint: Option<PathBuf>) -> Result<Done, CliError> {
    let opts = CertifyOptions {
        workers,
        checkpoint,
        ..CertifyOptions::default()
    };
    let cert = certify_mates(order, &opts).map_err(input_err)?;
    let doc = CertificateDoc::new(&cert);
    let mut report = format!(
        "order {order}: {} reduced Latin squares examined, {} with an orthogonal mate\n",
        cert.squares_examined, cert.mates_found
    );
    report += &format!("most transversals in one square: {}\n", cert.max_transversals());
    report += &format!("digest {}\n", cert.digest);
    report += &format!("elapsed {:.1} s\n", cert.elapsed_secs);
    if cert.asserts_nonexistence() {
        report += &format!("no pair of orthogonal Latin squares of order {order} exists\n");
    } else {
        report += &format!("orthogonal Latin squares of order {order} exist\n");
    }
    Ok(Done::new(if cert.asserts_nonexistence() { 0 } else { 1 }, report, &doc))
}

fn caption_checks() -> CaptionDoc {
    let (first, second) = table1_digits();
    let n = first.len();
    let first_latin = validate_squares(&first, None).is_ok_and(|c| c.latin);
    let distinct_in = |cells: Vec<u8>| {
        let mut seen = std::collections::HashSet::new();
        cells.into_iter().all(|s| seen.insert(s))
    };
    let second_distinct = (0..n).all(|i| {
        distinct_in((0..n).filter_map(|j| second[i][j]).collect())
            && distinct_in((0..n).filter_map(|j| second[j][i]).collect())
    });
    let mut pairs = std::collections::HashSet::new();
    let mut cells = 0;
    for r in 0..n {
        for c in 0..n {
            if let Some(s) = second[r][c] {
                cells += 1;
                pairs.insert((first[r][c], s));
            }
        }
    }
    CaptionDoc {
        first_digits_latin: first_latin,
        second_digits_distinct: second_distinct,
        second_digit_cells: cells,
        distinct_pairs: pairs.len(),
    }
}

fn table1(verify: bool) -> Result<Done, CliError> {
    let c = table1_constellation();
    let mut doc = Table1Doc {
        text: TABLE1_TEXT.to_string(),
        constellation: ConstellationDoc::new(&c),
        signature: c.signature().expanded(Bracket::Angle),
        verification: None,
        caption: None,
    };
    if !verify {
        let report = format!("{}\n{}", TABLE1_TEXT, c.signature());
        return Ok(Done::new(0, report, &doc));
    }
    let v = verification(&c, false);
    let cap = caption_checks();
    let caption_ok =
        cap.first_digits_latin && cap.second_digits_distinct && cap.distinct_pairs == cap.second_digit_cells;
    let yes = |b: bool| if b { "yes" } else { "no" };
    let mut report = verify_report(&c, &v);
    report += &format!("first digits form a Latin square: {}\n", yes(cap.first_digits_latin));
    report += &format!(
        "second digits distinct in every row and column: {}\n",
        yes(cap.second_digits_distinct)
    );
    report += &format!(
        "distinct two-digit numbers: {} of {}\n",
        cap.distinct_pairs, cap.second_digit_cells
    );
    let code = if v.valid && caption_ok { 0 } else { 1 };
    doc.verification = Some(v);
    doc.caption = Some(cap);
    Ok(Done::new(code, report, &doc))
}

fn need_dim(dim: Option<usize>, kind: &str) -> Result<usize, CliError> {
    dim.ok_or_else(|| input_err(format!("--dim is required for --kind {kind}")))
}

fn fixed_six(dim: Option<usize>, kind: &str) -> Result<(), CliError> {
    match dim {
        None | Some(6) => Ok(()),
        Some(d) => Err(input_err(format!("--kind {kind} exists only for --dim 6, got {d}"))),
    }
}

fn make(kind: BasisKind, dim: Option<usize>, a: Option<f64>, b: Option<f64>) -> Result<Done, CliError> {
    if !matches!(kind, BasisKind::FourierFamily) && (a.is_some() || b.is_some()) {
        return Err(input_err("--a and --b apply only to --kind fourier-family"));
    }
    let single = |b: Basis| MuConstellation::new(b.dim(), vec![b]);
    let (name, set) = match kind {
        BasisKind::Standard => {
            let d = need_dim(dim, "standard")?;
            if d < 2 {
                return Err(input_err("--dim must be at least 2"));
            }
            ("standard", single(Basis::standard(d)))
        }
        BasisKind::Fourier => {
            let d = need_dim(dim, "fourier")?;
            if d < 2 {
                return Err(input_err("--dim must be at least 2"));
            }
            ("fourier", single(fourier_basis(d)))
        }
        BasisKind::FourierFamily => {
            fixed_six(dim, "fourier-family")?;
            (
                "fourier-family",
                single(fourier_family6(a.unwrap_or(0.0), b.unwrap_or(0.0))),
            )
        }
        BasisKind::Tao => {
            fixed_six(dim, "tao")?;
            ("tao", single(tao_basis().map_err(input_err)?))
        }
        BasisKind::HwTriple => ("hw-triple", hw_triple(need_dim(dim, "hw-triple")?)),
        BasisKind::Wf => {
            let q = need_dim(dim, "wf")?;
            let q = u32::try_from(q).map_err(input_err)?;
            ("wf", wf_complete_set(q))
        }
    };
    let set = set.map_err(input_err)?;
    let r = constellation_defect(&set);
    let report = format!(
        "{name} in dimension {}: {} basis(es) {}, max pair defect {:.3e}, max orthonormality residual {:.3e}",
        set.dim(),
        set.bases().len(),
        set.signature().notation(Bracket::Brace),
        r.max_pair_defect(),
        r.max_residual()
    );
    Ok(Done::new(0, report, &BasisSetDoc::new(&set)))
}

fn defect(input: &Path, tol: f64) -> Result<Done, CliError> {
    let set = read_bases(input)?;
    let r = constellation_defect(&set);
    let mu = r.is_mu(tol);
    let doc = DefectDoc {
        signature: set.signature().notation(Bracket::Brace),
        pair_defects: r
            .pair_defects
            .iter()
            .map(|&((i, j), defect)| PairDefectDoc { pair: [i, j], defect })
            .collect(),
        orthonormality_residuals: r.orthonormality_residuals.clone(),
        total: r.total,
        tolerance: tol,
        mutually_unbiased: mu,
    };
    let mut report = format!(
        "{} {}: total defect {:.3e}\n",
        if mu {
            "mutually unbiased"
        } else {
            "not mutually unbiased"
        },
        doc.signature,
        r.total
    );
    for p in &doc.pair_defects {
        report += &format!("  bases {} and {}: {:.3e}\n", p.pair[0], p.pair[1], p.defect);
    }
    for (i, res) in r.orthonormality_residuals.iter().enumerate() {
        report += &format!("  basis {i} orthonormality residual {res:.3e}\n");
    }
    Ok(Done::new(if mu { 0 } else { 1 }, report, &doc))
}

fn search_report(target: &str, doc: &SearchDoc) -> String {
    let mut out = match doc.found_at_restart {
        Some(r) => format!(
            "{target}: Found, defect {:.3e} at restart {r} (seed {})\n",
            doc.best_defect, doc.seed
        ),
        None => format!(
            "{target}: NotFound, best defect {:.3e} (seed {})\n",
            doc.best_defect, doc.seed
        ),
    };
    out += &format!(
        "budget: {} restarts run of {}, at most {} iterations each, {} iterations used, gradient tolerance {:e}, success threshold {:e}\n",
        doc.restarts_run,
        doc.budget.restarts,
        doc.budget.max_iterations,
        doc.iterations_used,
        doc.budget.grad_tol,
        doc.budget.success_threshold
    );
    if doc.found_at_restart.is_none() {
        out += &format!("this is {EVIDENCE_NOTE}\n");
    }
    out
}

fn search(dim: usize, sizes: &[usize], budget: &Budget) -> Result<Done, CliError> {
    let sig = Signature::new(dim, sizes.iter().copied()).map_err(input_err)?;
    let target = sig.notation(Bracket::Brace);
    let cfg = budget.config();
    let r = search_constellation(sizes, dim, &cfg).map_err(input_err)?;
    let doc = SearchDoc::new(target.clone(), &r, &cfg);
    let code = if r.status == SearchStatus::Found { 0 } else { 1 };
    Ok(Done::new(code, search_report(&target, &doc), &doc))
}

fn extend(input: &Path, vectors: usize, orthonormal: bool, budget: &Budget) -> Result<Done, CliError> {
    let fixed = read_bases(input)?;
    let target = format!(
        "{} extended by {vectors} {}vector(s)",
        fixed.signature().notation(Bracket::Brace),
        if orthonormal { "orthonormal " } else { "" }
    );
    let cfg = budget.config();
    let r = extend_search(fixed.bases(), vectors, orthonormal, &cfg).map_err(input_err)?;
    let doc = SearchDoc::new(target.clone(), &r, &cfg);
    let code = if r.status == SearchStatus::Found { 0 } else { 1 };
    Ok(Done::new(code, search_report(&target, &doc), &doc))
}
