use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mc_holonomy::dupont::{faces, whitney_form, Dupont};
use mc_holonomy::error::Error;
use mc_holonomy::forms::{monomial_basis, PolyForm};
use mc_holonomy::holonomy::{bch_oracle, edge_value, face, fill_horn, gamma_check, rho, unwrap_lie};
use mc_holonomy::json;
use mc_holonomy::linalg;
use mc_holonomy::lincomb::LinComb;
use mc_holonomy::linf::CurvedLinf;
use mc_holonomy::perturb::{gauge_seed, kuranishi_solve, transfer_structure, MatrixContraction};
use mc_holonomy::tensor::TensorAlgebra;
use serde_json::{json, Value};

/// Exact computations with curved L∞-algebras, their Maurer–Cartan simplices and holonomy.
#[derive(Parser, Debug)]
#[command(name = "mc-holonomy", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Debug)]
struct Opts {
    /// Override the filtration cutoff W of the input algebra.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    cutoff_w: Option<u32>,
    /// Override the arity cap A of the input algebra.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    arity_cap: Option<u64>,
    /// Word length N: BCH depth for `bch`, polynomial degree bound for `dupont-verify`.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    word_len: Option<u64>,
    /// Write the JSON report to this file.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Do not print the report on stdout.
    #[arg(long, short, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check symmetry, degrees, filtration and the Jacobi identities of an algebra.
    Validate { algebra: PathBuf },
    /// Compute the Maurer–Cartan residual of a simplex.
    McCheck { algebra: PathBuf, simplex: PathBuf },
    /// Run the identity suite of the Dupont contraction on the n-simplex.
    DupontVerify {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=6))]
        n: u64,
    },
    /// Retract a Maurer–Cartan simplex onto the gauge locus.
    Holonomy { algebra: PathBuf, simplex: PathBuf },
    /// Fill a horn with the thin filler.
    FillHorn { algebra: PathBuf, horn: PathBuf },
    /// Transfer the structure to cohomology along a contraction.
    Transfer {
        algebra: PathBuf,
        /// Contraction document; computed from the linear part when omitted.
        #[arg(long)]
        contraction: Option<PathBuf>,
    },
    /// Solve the gauge-fixed Maurer–Cartan equation of a contractible algebra.
    Kuranishi {
        algebra: PathBuf,
        /// Element document used as seed after projection onto ker h.
        #[arg(long)]
        seed: Option<PathBuf>,
    },
    /// Truncated Baker–Campbell–Hausdorff series of two elements of a shifted Lie algebra.
    Bch { algebra: PathBuf, x: PathBuf, y: PathBuf },
}

enum Failure {
    Input(String),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::Schema { .. }
            | Error::Invalid(_)
            | Error::DimensionMismatch { .. }
            | Error::IndexOutOfRange { .. }
            | Error::MalformedMap(_)
            | Error::IncompatibleFamily(_)
            | Error::NonIncreasingFace(_)
            | Error::NotASection(_)
            | Error::Depth(_) => Failure::Input(e.to_string()),
            _ => Failure::Invariant(e.to_string()),
        }
    }
}

struct Report {
    body: Value,
    ok: bool,
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    json::parse_document(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: mc_holonomy::error::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| match Failure::from(e) {
        Failure::Input(m) => Failure::Input(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn load_algebra(path: &Path, opts: &Opts) -> Result<CurvedLinf, Failure> {
    let mut l = with_path(path, json::parse_algebra(&read_json(path)?))?;
    if let Some(w) = opts.cutoff_w {
        l = l.with_cutoff(w);
    }
    if let Some(a) = opts.arity_cap {
        l = l.with_arity_cap(a as usize)?;
    }
    Ok(l)
}

fn run(command: &Command, opts: &Opts) -> Result<Report, Failure> {
    match command {
        Command::Validate { algebra } => {
            let l = load_algebra(algebra, opts)?;
            let report = l.validate();
            Ok(Report { ok: report.is_valid(), body: json::report_to_json(&report) })
        }
        Command::McCheck { algebra, simplex } => {
            let l = load_algebra(algebra, opts)?;
            let x = with_path(simplex, json::parse_simplex(&l, &read_json(simplex)?))?;
            let r = TensorAlgebra::new(x.dim(), &l).mc_residual(&x)?;
            Ok(Report {
                ok: r.is_zero(),
                body: json!({"maurer_cartan": r.is_zero(), "residual": json::form_valued_to_json(&l, &r)}),
            })
        }
        Command::DupontVerify { n } => dupont_verify(*n as usize, opts.word_len.unwrap_or(3) as u32),
        Command::Holonomy { algebra, simplex } => {
            let l = load_algebra(algebra, opts)?;
            let x = with_path(simplex, json::parse_simplex(&l, &read_json(simplex)?))?;
            let h = rho(&l, &x)?;
            let in_gamma = gamma_check(&h.simplex)?;
            Ok(Report {
                ok: in_gamma,
                body: json!({
                    "whitney": json::whitney_to_json(&l, x.dim(), &h.whitney),
                    "simplex": json::simplex_to_json(&l, &h.simplex),
                    "fixed": h.simplex == x,
                }),
            })
        }
        Command::FillHorn { algebra, horn } => {
            let l = load_algebra(algebra, opts)?;
            let horn_data = with_path(horn, json::parse_horn(&l, &read_json(horn)?))?;
            let filler = fill_horn(&l, &horn_data)?;
            let missing = face(&filler, horn_data.missing)?;
            let mut body = json!({
                "filler": json::simplex_to_json(&l, &filler),
                "missing_face": json::simplex_to_json(&l, &missing),
            });
            if missing.dim() == 1 {
                body["edge"] = json::element_to_json(&l, &edge_value(&missing)?);
            }
            Ok(Report { ok: gamma_check(&filler)?, body })
        }
        Command::Transfer { algebra, contraction } => {
            let l = load_algebra(algebra, opts)?;
            let c = match contraction {
                Some(p) => with_path(p, json::parse_contraction(&read_json(p)?))?,
                None => MatrixContraction::for_algebra(&l)?,
            };
            let t = transfer_structure(&l, &c, l.arity_cap())?;
            let report = t.algebra.validate();
            let morphisms_ok = t.p_mu.check().is_valid() && t.i_mu.check().is_valid();
            Ok(Report {
                ok: report.is_valid() && morphisms_ok,
                body: json!({
                    "algebra": json::algebra_to_json(&t.algebra),
                    "p_mu": json::morphism_to_json(&t.p_mu),
                    "i_mu": json::morphism_to_json(&t.i_mu),
                    "contraction": json::contraction_to_json(&c),
                    "validation": json::report_to_json(&report),
                }),
            })
        }
        Command::Kuranishi { algebra, seed } => {
            let l = load_algebra(algebra, opts)?;
            let c = MatrixContraction::for_algebra(&l)?;
            let seed = match seed {
                Some(p) => gauge_seed(&c, &with_path(p, json::parse_element_document(&l, &read_json(p)?))?),
                None => LinComb::new(),
            };
            let x = kuranishi_solve(&l, &c, &seed)?;
            Ok(Report {
                ok: true,
                body: json!({
                    "solution": json::element_to_json(&l, &x),
                    "residual": json::element_to_json(&l, &l.curvature_residual(&x)?),
                }),
            })
        }
        Command::Bch { algebra, x, y } => {
            let l = load_algebra(algebra, opts)?;
            let g = with_path(algebra, unwrap_lie(&l))?;
            let xv = with_path(x, json::parse_element_document(&l, &read_json(x)?))?;
            let yv = with_path(y, json::parse_element_document(&l, &read_json(y)?))?;
            let depth = opts.word_len.unwrap_or(3) as usize;
            let z = bch_oracle(&g, &xv, &yv, depth)?;
            Ok(Report { ok: true, body: json!({"depth": depth, "bch": json::element_to_json(&l, &z)}) })
        }
    }
}

fn check(name: &str, failures: usize, checked: usize) -> Value {
    json!({"name": name, "status": if failures == 0 { "PASS" } else { "FAIL" }, "checked": checked, "failures": failures})
}

fn dupont_verify(n: usize, max_degree: u32) -> Result<Report, Failure> {
    let d = Dupont::new(n);
    let forms: Vec<PolyForm> = monomial_basis(n, max_degree).into_iter().map(|m| PolyForm::from((n, m))).collect();
    let (mut homotopy, mut dupont, mut idem, mut ss, mut ps, mut si) = (0, 0, 0, 0, 0, 0);
    for a in &forms {
        for i in 0..=n {
            let lhs = a.poincare_h(i)?.d().add(&a.d().poincare_h(i)?)?;
            if lhs != a.sub(&a.eval_vertex_form(i)?)? {
                homotopy += 1;
            }
        }
        let pa = d.p(a)?;
        let sa = d.s(a)?;
        if sa.d().add(&d.s(&a.d())?)? != a.sub(&pa)? {
            dupont += 1;
        }
        if d.p(&pa)? != pa {
            idem += 1;
        }
        if !d.s(&sa)?.is_zero() {
            ss += 1;
        }
        if !d.p(&sa)?.is_zero() {
            ps += 1;
        }
    }
    let whitney = faces(n);
    let mut images = Vec::new();
    for f in &whitney {
        let w = whitney_form(f, n)?;
        if !d.s(&w)?.is_zero() {
            si += 1;
        }
        images.push(d.project(&w)?.coeffs().clone());
    }
    for m in monomial_basis(n, max_degree.min(1)) {
        images.push(d.project(&PolyForm::from((n, m)))?.coeffs().clone());
    }
    let rank = linalg::rank(&images);
    let terms = d.s_term_count();
    let expected_terms = (1usize << (n + 1)) - 2;
    let checks = vec![
        check("dh+hd=1-eps", homotopy, forms.len() * (n + 1)),
        check("ds+sd=1-p", dupont, forms.len()),
        check("p^2=p", idem, forms.len()),
        check("s^2=0", ss, forms.len()),
        check("ps=0", ps, forms.len()),
        check("si=0", si, whitney.len()),
        check("rank p", usize::from(rank != expected_terms + 1), 1),
        check("s term count", usize::from(terms != expected_terms), 1),
    ];
    let ok = checks.iter().all(|c| c["status"] == "PASS");
    Ok(Report {
        ok,
        body: json!({
            "n": n,
            "max_poly_degree": max_degree,
            "checks": checks,
            "s_term_count": terms,
            "expected_term_count": expected_terms,
            "rank_p": rank,
        }),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command, &cli.opts) {
        Ok(report) => {
            let text = json::to_canonical_string(&report.body);
            if let Some(path) = &cli.opts.output {
                if let Err(e) = fs::write(path, &text) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            if !cli.opts.quiet {
                print!("{text}");
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                if !cli.opts.quiet {
                    eprintln!("invariant check failed");
                }
                ExitCode::from(1)
            }
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Invariant(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
