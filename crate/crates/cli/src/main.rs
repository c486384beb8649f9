use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use kmsolve::catalog;
use kmsolve::hilbert;
use kmsolve::par;
use kmsolve::solver::{self, commuting_matrices, SolveOptions, SolveReport};
use kmsolve::{km_matrix, Field, FieldSpec, PrimeField, Rationals, StructuredSystem};
use kmsolve_cli::{attach_charts, matrix_csv, parse_field, CliError, Normalize, SolveJson, SystemFile};

#[derive(Parser)]
#[command(name = "kmsolve", version, about = "Solve structured polynomial systems on unirational varieties")]
struct Cli {
    /// Cap the number of worker threads (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormalizeArg {
    Raw,
    First,
}

#[derive(Clone, Copy, ValueEnum)]
enum KmOut {
    Csv,
    Shape,
}

#[derive(clap::Args)]
struct SolveArgs {
    /// Working degree; defaults to the file hint, then the regularity bound, then an adaptive search.
    #[arg(long)]
    dreg: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Search for two consecutive equal nullities instead of using a bound.
    #[arg(long)]
    adaptive: bool,
    /// Upper limit for the adaptive search.
    #[arg(long)]
    dreg_max: Option<usize>,
    #[arg(long, value_enum, default_value = "first")]
    normalize: NormalizeArg,
    /// Stop after the exact multiplication matrices and report δ only.
    #[arg(long)]
    count_only: bool,
    /// Write each multiplication matrix as `M<j>.csv` into this directory.
    #[arg(long)]
    export_matrices: Option<PathBuf>,
    /// Output file for the JSON result (stdout if omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Truncated Khovanskii-basis check, one line per degree.
    Check {
        file: String,
        #[arg(long, default_value_t = 4)]
        dmax: usize,
    },
    /// Lattice points of degree d with their witness products and basis elements.
    Basis {
        file: String,
        #[arg(short = 'd', long)]
        degree: usize,
    },
    /// Hilbert function table and Hilbert series numerator.
    Hilbert {
        file: String,
        /// Largest degree to enumerate (default 2n+2).
        #[arg(long)]
        dmax: Option<usize>,
    },
    /// Build the KM matrix in degree d and export it.
    Km {
        file: String,
        #[arg(short = 'd', long)]
        degree: usize,
        /// Keep only a maximal set of independent rows.
        #[arg(long)]
        reduce: bool,
        #[arg(long, value_enum, default_value = "csv")]
        out: KmOut,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the full pipeline on a system file.
    Solve {
        file: String,
        #[command(flatten)]
        args: SolveArgs,
    },
    /// Generate a Schubert problem on Gr(k,m) and solve it.
    Schubert {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        /// Conditions such as `2,4,6;2,4,6;2,4,6`.
        #[arg(long)]
        conditions: String,
        /// Osculation points `s1,s2,…`, one per condition; random flags otherwise.
        #[arg(long, allow_hyphen_values = true)]
        osculating: Option<String>,
        #[arg(long, default_value = "QQ")]
        field: String,
        #[command(flatten)]
        args: SolveArgs,
    },
    /// Print a catalog instance as a system file.
    Catalog {
        /// duffing, delpezzo[:d], bottsamelson, grassmannian:k,m, schubert, osculating
        name: String,
        #[arg(long, default_value = "QQ")]
        field: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn read_source(path: &str) -> Result<String, CliError> {
    let mut text = String::new();
    if path == "-" {
        io::stdin().read_to_string(&mut text).map_err(|e| CliError::input(format!("stdin: {e}")))?;
    } else {
        text = fs::read_to_string(path).map_err(|e| CliError::input(format!("{path}: {e}")))?;
    }
    Ok(text)
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    let res = match path {
        Some(p) => fs::write(p, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    };
    res.map_err(|e| CliError::input(format!("write failed: {e}")))
}

/// Call a field-generic function with the concrete field named by `spec`.
macro_rules! with_field {
    ($spec:expr, |$f:ident| $body:expr) => {
        match $spec {
            FieldSpec::Rationals => {
                let $f = Rationals;
                $body
            }
            FieldSpec::PrimeField(p) => {
                let $f = PrimeField::new(p).map_err(|e| CliError::input(e.to_string()))?;
                $body
            }
        }
    };
}

fn cmd_check(file: &SystemFile, dmax: usize) -> Result<(), CliError> {
    let report = with_field!(file.field_spec()?, |f| file.parameterization(f)?.check_khovanskii_truncated(dmax));
    let mut out = String::new();
    for d in &report.degrees {
        let verdict = if d.passed { "ok" } else { "FAIL" };
        out += &format!("degree {}: |dA| = {}, rank = {}, {verdict}\n", d.degree, d.support_size, d.rank);
    }
    match report.first_failure() {
        None => out += &format!("Khovanskii property holds through degree {dmax}\n"),
        Some(d) => out += &format!("Khovanskii property fails in degree {d}\n"),
    }
    write_out(None, &out)?;
    if report.passed() {
        Ok(())
    } else {
        Err(CliError { code: 2, message: String::new() })
    }
}

fn cmd_basis<F: Field>(field: F, file: &SystemFile, d: usize) -> Result<(), CliError> {
    let par = file.parameterization(field)?;
    let support = par.support(d);
    let basis = par.basis(d);
    let prev = (d > 0).then(|| par.support(d - 1));
    let mut out = format!("{} lattice points in degree {d}\n", support.len());
    for k in 0..support.len() {
        let witness = match (support.witness(k), &prev) {
            (Some((g, i)), Some(prev)) => format!("{} * x{i}", prev.label(g)),
            _ => "1".to_string(),
        };
        out += &format!("{}\t{witness}\t{}\n", support.label(k), basis.elements()[k]);
    }
    write_out(None, &out)
}

fn cmd_hilbert<F: Field>(field: F, file: &SystemFile, dmax: Option<usize>) -> Result<(), CliError> {
    let par = file.parameterization(field)?;
    let dmax = dmax.unwrap_or(2 * par.n() + 2);
    let hd = hilbert::hilbert_numerator(&par, dmax).map_err(|e| CliError::input(e.to_string()))?;
    let join = |v: &[String]| v.join(" ");
    let hf: Vec<String> = hd.hf.iter().map(|x| x.to_string()).collect();
    let num: Vec<String> = hd.dense_numerator().iter().map(|x| x.to_string()).collect();
    let out = format!(
        "HF(0..={dmax}): {}\nnumerator: {}\nHReg: {}\ndegree: {}\ncertified: {}\n",
        join(&hf),
        join(&num),
        hd.hreg,
        hd.degree,
        hd.certified
    );
    write_out(None, &out)
}

fn cmd_km<F: Field>(
    field: F,
    file: &SystemFile,
    d: usize,
    reduce: bool,
    out: KmOut,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let sys = file.system(field.clone())?;
    let m = km_matrix(&sys, d, reduce)?;
    let (r, c) = m.shape();
    match out {
        KmOut::Shape => write_out(output, &format!("{r} {c}\n")),
        KmOut::Csv => {
            eprintln!("KM matrix in degree {d}: {r} x {c}{}", if reduce { " (reduced)" } else { "" });
            let mut header = vec!["i".to_string(), "gamma".to_string()];
            header.extend((0..m.cols.len()).map(|k| m.cols.label(k)));
            let par = sys.par();
            let degrees = sys.degrees();
            let rows = m.row_labels.iter().zip(&m.entries).map(|(&(i, g), row)| {
                let gamma = par.support(d - degrees[i]).label(g);
                (vec![(i + 1).to_string(), gamma], row.clone())
            });
            let mut buf = Vec::new();
            matrix_csv(&field, &header, rows, &mut buf)?;
            write_out(output, &String::from_utf8(buf).expect("csv is UTF-8"))
        }
    }
}

fn solve_options(file_dreg: Option<usize>, hreg: Option<i64>, args: &SolveArgs) -> SolveOptions {
    SolveOptions {
        dreg: args.dreg.or(file_dreg),
        seed: args.seed,
        // with no bound available the CLI falls back to the adaptive search
        adaptive: true,
        dreg_max: args.dreg_max,
        hreg,
        ..Default::default()
    }
}

fn run_solve<F: Field>(
    sys: &StructuredSystem<F>,
    mut opts: SolveOptions,
    args: &SolveArgs,
) -> Result<SolveReport<F>, CliError> {
    if args.adaptive {
        opts.dreg = None;
        opts.hreg = None;
        let (d, _) = solver::choose_dreg(sys, &SolveOptions { dreg: None, ..opts })?;
        opts.dreg = Some(d);
    }
    let count_only = args.count_only || sys.field().spec() != FieldSpec::Rationals;
    if count_only && !args.count_only {
        return Err(CliError::unsupported(
            solver::SolveError::UnsupportedField(sys.field().spec()).to_string() + " (pass --count-only)",
        ));
    }
    if sys.equations().is_empty() {
        return Err(CliError::math("positive-dimensional: the system has no equations"));
    }
    let report = if count_only { commuting_matrices(sys, &opts)? } else { solver::solve(sys, &opts)? };
    if let Some(dir) = &args.export_matrices {
        export_matrices(&report, dir)?;
    }
    Ok(report)
}

fn export_matrices<F: Field>(report: &SolveReport<F>, dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::input(format!("{}: {e}", dir.display())))?;
    let ms = &report.mult;
    let header: Vec<String> =
        std::iter::once("row".to_string()).chain(ms.basis_cols.iter().map(|&c| ms.basis_support.label(c))).collect();
    for (j, m) in ms.mats.iter().enumerate() {
        let rows = ms.basis_cols.iter().zip(m).map(|(&c, row)| (vec![ms.basis_support.label(c)], row.clone()));
        let mut buf = Vec::new();
        matrix_csv(&ms.field, &header, rows, &mut buf)?;
        let path = dir.join(format!("M{j}.csv"));
        fs::write(&path, buf).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn normalize(args: &SolveArgs) -> Normalize {
    match args.normalize {
        NormalizeArg::Raw => Normalize::Raw,
        NormalizeArg::First => Normalize::First,
    }
}

fn emit_json(value: &impl serde::Serialize, output: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    write_out(output, &text)
}

fn cmd_solve<F: Field>(field: F, file: &SystemFile, args: &SolveArgs) -> Result<(), CliError> {
    let sys = file.system(field)?;
    let report = run_solve(&sys, solve_options(file.dreg, file.hreg, args), args)?;
    emit_json(&SolveJson::new(&report, normalize(args)), args.output.as_deref())
}

#[derive(serde::Serialize)]
struct SchubertJson {
    k: usize,
    m: usize,
    conditions: Vec<Vec<usize>>,
    raw_equations: usize,
    equations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected_count: Option<usize>,
    #[serde(flatten)]
    result: SolveJson,
}

fn cmd_schubert<F: Field>(
    field: F,
    k: usize,
    m: usize,
    conditions: &str,
    osculating: Option<&str>,
    args: &SolveArgs,
) -> Result<(), CliError> {
    let alphas = catalog::parse_conditions(conditions)
        .ok_or_else(|| CliError::input(format!("cannot parse conditions `{conditions}`")))?;
    let cat = |e: catalog::CatalogError| CliError::input(e.to_string());
    let inst = match osculating {
        Some(text) => {
            let points = text
                .split(',')
                .map(|s| field.parse_scalar(s.trim()).map_err(|e| CliError::input(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            if points.len() != alphas.len() {
                return Err(CliError::input(format!(
                    "{} conditions but {} osculation points",
                    alphas.len(),
                    points.len()
                )));
            }
            catalog::schubert_osculating(field, k, m, &alphas, &points).map_err(cat)?
        }
        None => catalog::schubert_random(field, k, m, &alphas, args.seed).map_err(cat)?,
    };
    let sys = &inst.instance.sys;
    let opts = solve_options(inst.instance.recommended_dreg, inst.instance.hreg, args);
    let report = run_solve(sys, opts, args)?;
    let mut result = SolveJson::new(&report, normalize(args));
    attach_charts(&mut result, &report, sys.par(), k, m);
    let out = SchubertJson {
        k,
        m,
        conditions: alphas,
        raw_equations: inst.raw_equations,
        equations: sys.equations().len(),
        expected_count: inst.instance.expected_count,
        result,
    };
    emit_json(&out, args.output.as_deref())
}

fn cmd_catalog<F: Field>(field: F, name: &str, seed: u64) -> Result<(), CliError> {
    let inst = catalog::by_name(field, name, seed).map_err(|e| CliError::input(e.to_string()))?;
    emit_json(&SystemFile::from_instance(&inst), None)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let load = |path: &str| -> Result<SystemFile, CliError> { SystemFile::from_json(&read_source(path)?) };
    match cli.command {
        Command::Check { file, dmax } => cmd_check(&load(&file)?, dmax),
        Command::Basis { file, degree } => {
            let file = load(&file)?;
            with_field!(file.field_spec()?, |f| cmd_basis(f, &file, degree))
        }
        Command::Hilbert { file, dmax } => {
            let file = load(&file)?;
            with_field!(file.field_spec()?, |f| cmd_hilbert(f, &file, dmax))
        }
        Command::Km { file, degree, reduce, out, output } => {
            let file = load(&file)?;
            with_field!(file.field_spec()?, |f| cmd_km(f, &file, degree, reduce, out, output.as_deref()))
        }
        Command::Solve { file, args } => {
            let file = load(&file)?;
            with_field!(file.field_spec()?, |f| cmd_solve(f, &file, &args))
        }
        Command::Schubert { k, m, conditions, osculating, field, args } => {
            with_field!(parse_field(&field)?, |f| cmd_schubert(f, k, m, &conditions, osculating.as_deref(), &args))
        }
        Command::Catalog { name, field, seed } => with_field!(parse_field(&field)?, |f| cmd_catalog(f, &name, seed)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.threads {
        Some(n) => par::with_threads(n.max(1), || run(cli)),
        None => run(cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !e.message.is_empty() {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.code as u8)
        }
    }
}
