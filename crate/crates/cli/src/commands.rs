use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;

use lieweyl_core::almostabelian::{aa_decompose, classify_we_aa, rff_classify};
use lieweyl_core::catalog3d::{buv_normal_form, cl3_admits_we_with, make_3d, BuvCase, Family, Family3D, MetricFamily};
use lieweyl_core::riemann;
use lieweyl_core::weyl::{self, SolveOptions};
use lieweyl_core::{GeomError, MetricLieAlgebra};

use crate::mla::{emit_mla, parse_mla, MlaDocument, MlaError};
use crate::records::{Format, Report};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] MlaError),
    #[error("{code} {err}", code = geom_code(.0), err = .0)]
    Geom(#[from] GeomError),
    #[error("E_IO {0}")]
    Io(String),
    #[error("E_USAGE {0}")]
    Usage(String),
}

fn geom_code(e: &GeomError) -> &'static str {
    match e {
        GeomError::Shape(_) => "E_SHAPE",
        GeomError::NonFinite(_) => "E_NON_FINITE",
        GeomError::InvalidAlgebra(_) => "E_INVALID_ALGEBRA",
        GeomError::Metric(_) => "E_METRIC",
        GeomError::Dimension { .. } => "E_DIMENSION",
        GeomError::Consistency { .. } => "E_CONSISTENCY",
        GeomError::NotAlmostAbelian(_) => "E_NOT_ALMOST_ABELIAN",
        GeomError::Hint(_) => "E_IDEAL",
        GeomError::Precondition(_) => "E_PRECONDITION",
        GeomError::Input(_) => "E_INPUT",
        GeomError::Classification(_) => "E_CLASSIFICATION",
    }
}

impl CliError {
    /// 1 for a mathematical verdict on valid input, 2 for malformed input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Geom(e) if !e.is_input_error() => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Records,
}

#[derive(Debug, Parser)]
#[command(name = "lieweyl", version, about = "Curvature and Weyl-Einstein structures on metric Lie algebras")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 64)]
    starts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Root acceptance tolerance, relative to `1 + |Ric|`.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a document and report structural properties.
    Validate { file: PathBuf },
    /// Levi-Civita connection, Ricci tensor, scalar curvature, Einstein defect.
    Curvature { file: PathBuf },
    /// All left-invariant Weyl-Einstein Lee forms found by multistart search.
    WeylSolve {
        file: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Almost abelian decomposition and closed-form Weyl-Einstein classification.
    AaClassify {
        file: PathBuf,
        /// Basis of the abelian ideal: comma separated one-based indices or
        /// colon separated coefficient vectors, e.g. `2,3` or `0:1:0,0:0:1`.
        #[arg(long)]
        ideal: Option<String>,
    },
    /// Emit a three-dimensional catalog algebra with its verdict.
    Catalog3d {
        #[arg(long)]
        family: String,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        metric: String,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        nu: Option<f64>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Every applicable report for one document.
    Report {
        file: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs one command line (including the program name) and captures its output.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Output {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => {
                    let first = text.lines().next().unwrap_or("").trim_start_matches("error: ");
                    Output {
                        code: 2,
                        stdout: String::new(),
                        stderr: format!("error: E_USAGE {first}\n"),
                    }
                }
            };
        }
    };
    match dispatch(&cli) {
        Ok(stdout) => Output {
            code: 0,
            stdout,
            stderr: String::new(),
        },
        Err(e) => Output {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn dispatch(cli: &Cli) -> Result<String, CliError> {
    let format = match cli.format {
        FormatArg::Text => Format::Text,
        FormatArg::Records => Format::Records,
    };
    let report = match &cli.command {
        Command::Validate { file } => {
            let (doc, m) = load(file)?;
            validate_report(&doc, &m)
        }
        Command::Curvature { file } => curvature_report(&load(file)?.1)?,
        Command::WeylSolve { file, solver } => weyl_report(&load(file)?.1, &solver_options(solver)?)?,
        Command::AaClassify { file, ideal } => {
            let (_, m) = load(file)?;
            let hint = ideal.as_deref().map(|s| parse_ideal(s, m.dim())).transpose()?;
            aa_report(&m, hint.as_ref())?
        }
        Command::Catalog3d {
            family,
            t,
            metric,
            mu,
            nu,
            solver,
        } => {
            let f = catalog_family(family, *t, metric, *mu, *nu)?;
            return catalog_output(&f, &solver_options(solver)?, format);
        }
        Command::Report { file, solver } => {
            let (doc, m) = load(file)?;
            full_report(&doc, &m, &solver_options(solver)?)?
        }
    };
    Ok(report.render(format))
}

fn load(path: &PathBuf) -> Result<(MlaDocument, MetricLieAlgebra), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let doc = parse_mla(&text)?;
    let m = doc.to_metric_lie_algebra()?;
    Ok((doc, m))
}

fn solver_options(a: &SolverArgs) -> Result<SolveOptions, CliError> {
    if a.starts == 0 {
        return Err(CliError::Usage("--starts must be at least 1".into()));
    }
    if !(a.tol.is_finite() && a.tol > 0.0) {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", a.tol)));
    }
    Ok(SolveOptions {
        starts: a.starts,
        seed: a.seed,
        tol_root: a.tol,
        ..SolveOptions::default()
    })
}

/// `n - 1` vectors spanning the ideal, as the columns of an `n x (n-1)` matrix.
pub fn parse_ideal(spec: &str, n: usize) -> Result<DMatrix<f64>, CliError> {
    let bad = |msg: String| CliError::Usage(format!("--ideal: {msg}"));
    let items: Vec<&str> = spec.split(',').map(str::trim).collect();
    if items.len() + 1 != n {
        return Err(bad(format!("expected {} vectors, got {}", n - 1, items.len())));
    }
    let mut h = DMatrix::zeros(n, n - 1);
    for (c, item) in items.iter().enumerate() {
        if item.contains(':') {
            let vals: Vec<f64> = item
                .split(':')
                .map(|t| t.trim().parse::<f64>().map_err(|_| bad(format!("invalid number `{t}`"))))
                .collect::<Result<_, _>>()?;
            if vals.len() != n || vals.iter().any(|v| !v.is_finite()) {
                return Err(bad(format!("vector `{item}` needs {n} finite coefficients")));
            }
            for (r, v) in vals.into_iter().enumerate() {
                h[(r, c)] = v;
            }
        } else {
            match item.parse::<usize>() {
                Ok(i) if (1..=n).contains(&i) => h[(i - 1, c)] = 1.0,
                _ => return Err(bad(format!("`{item}` is not an index in 1..{n}"))),
            }
        }
    }
    Ok(h)
}

fn catalog_family(
    family: &str,
    t: Option<f64>,
    metric: &str,
    mu: Option<f64>,
    nu: Option<f64>,
) -> Result<Family3D, CliError> {
    let (fam, default_t) = match family {
        "abelian" => (Family::Abelian, 0.0),
        "sol" => (Family::Sol, 0.0),
        "so2r2" => (Family::SO2R2, 0.0),
        "ridr2" => (Family::RIdR2, 0.0),
        "gt" | "g0" => (Family::Gt, 0.0),
        other => {
            return Err(CliError::Usage(format!(
                "unknown family `{other}` (abelian, sol, so2r2, ridr2, gt, g0)"
            )))
        }
    };
    if family == "g0" && t.is_some_and(|t| t != 0.0) {
        return Err(CliError::Usage("family g0 fixes t = 0".into()));
    }
    let metric = match metric {
        "std" => MetricFamily::Std,
        "g" => MetricFamily::Gnu,
        "gmunu" => MetricFamily::Gmunu,
        "h" => MetricFamily::Hmunu,
        "m" => MetricFamily::Mnu,
        other => return Err(CliError::Usage(format!("unknown metric `{other}` (std, g, gmunu, h, m)"))),
    };
    let mut f = Family3D::new(fam, metric).with_t(t.unwrap_or(default_t));
    if let Some(mu) = mu {
        f = f.with_mu(mu);
    }
    if let Some(nu) = nu {
        f = f.with_nu(nu);
    }
    Ok(f)
}

fn validate_report(doc: &MlaDocument, m: &MetricLieAlgebra) -> Report {
    let flags = m.algebra().structure_flags();
    let mut r = Report::new();
    r.int("algebra.dim", m.dim());
    r.int("algebra.brackets", doc.brackets.len());
    r.flag("algebra.abelian", flags.abelian);
    r.flag("algebra.nilpotent", flags.nilpotent);
    r.flag("algebra.solvable", flags.solvable);
    r.flag("algebra.unimodular", flags.unimodular);
    r.int("algebra.derived_dim", flags.derived_dim);
    r.int("algebra.center_dim", flags.center_dim);
    r.vector(
        "metric.eigenvalues",
        &nalgebra::DVector::from_vec(lieweyl_core::linalg::sorted_sym_eigenvalues(m.metric())),
    );
    r.flag("valid", true);
    r
}

fn curvature_report(m: &MetricLieAlgebra) -> Result<Report, CliError> {
    let n = m.dim();
    let lc = riemann::levi_civita(m);
    let cd = riemann::ricci(m)?;
    let besse = riemann::ricci_besse(m);
    let mut r = Report::new();
    for i in 0..n {
        let rows = DMatrix::from_fn(n, n, |j, k| lc.get(i, j, k));
        r.matrix(format!("connection.nabla_e{}", i + 1), &rows);
    }
    r.matrix("ricci.koszul", &cd.ricci);
    r.matrix("ricci.besse", &besse);
    r.num("ricci.gap", (&cd.ricci - &besse).amax());
    r.num("ricci.scalar", cd.scalar);
    r.vector(
        "ricci.eigenvalues",
        &nalgebra::DVector::from_vec(lieweyl_core::linalg::sorted_sym_eigenvalues(&m.form_to_frame(&cd.ricci))),
    );
    let defect = riemann::einstein_defect(m)?;
    r.num("einstein.defect", defect);
    r.flag(
        "einstein.is_einstein",
        defect <= m.tau_num() * (1.0 + m.form_norm(&cd.ricci)),
    );
    Ok(r)
}

fn weyl_report(m: &MetricLieAlgebra, opts: &SolveOptions) -> Result<Report, CliError> {
    let sol = weyl::we_solve(m, opts)?;
    let mut r = Report::new();
    r.int("weyl.starts", opts.starts);
    r.insert("weyl.seed", crate::records::Value::Int(opts.seed as i64));
    r.num("weyl.tol", opts.tol_root);
    r.num("weyl.threshold", sol.threshold);
    r.num("weyl.infimum_residual", sol.infimum_residual);
    r.int("weyl.roots.count", sol.roots.len());
    for (i, root) in sol.roots.iter().enumerate() {
        let f = weyl::faraday(m, &root.theta)?;
        r.vector(format!("weyl.roots[{i}].theta"), &root.theta);
        r.num(format!("weyl.roots[{i}].residual"), root.residual);
        r.flag(format!("weyl.roots[{i}].closed"), f.closed);
        r.flag(format!("weyl.roots[{i}].exact"), f.exact_in_algebra);
    }
    Ok(r)
}

fn aa_report(m: &MetricLieAlgebra, hint: Option<&DMatrix<f64>>) -> Result<Report, CliError> {
    let d = aa_decompose(m, hint)?;
    let c = classify_we_aa(&d, m);
    let mut r = Report::new();
    r.vector("aa.b", &d.b);
    r.matrix("aa.ideal", &d.h_basis.transpose());
    r.matrix("aa.a", &d.a);
    r.matrix("aa.s", &d.s);
    r.flag("aa.unique_ideal", d.unique_ideal);
    r.text("aa.case", c.case.name());
    r.num("aa.k_or_mu", c.k_or_mu);
    r.int("aa.lee_forms.count", c.lee_forms.len());
    for (i, theta) in c.lee_forms.iter().enumerate() {
        let cf = weyl::conformal_flatness_check(m, theta)?;
        let flat = if theta.amax() > m.tau_num() {
            rff_classify(&d, m, theta)?.1
        } else {
            cf.flat
        };
        r.vector(format!("aa.lee_forms[{i}].theta"), theta);
        r.flag(format!("aa.lee_forms[{i}].ricci_flat"), cf.ricci_flat);
        r.flag(format!("aa.lee_forms[{i}].flat"), flat);
        r.num(format!("aa.lee_forms[{i}].kn_residual"), cf.kn_residual);
    }
    Ok(r)
}

fn full_report(doc: &MlaDocument, m: &MetricLieAlgebra, opts: &SolveOptions) -> Result<Report, CliError> {
    let mut r = validate_report(doc, m);
    r.extend(curvature_report(m)?);
    if m.dim() >= 3 {
        r.extend(weyl_report(m, opts)?);
        match aa_report(m, None) {
            Ok(aa) => {
                r.flag("aa.applicable", true);
                r.extend(aa);
            }
            Err(CliError::Geom(GeomError::NotAlmostAbelian(_))) => r.flag("aa.applicable", false),
            Err(e) => return Err(e),
        }
    }
    Ok(r)
}

fn catalog_output(f: &Family3D, opts: &SolveOptions, format: Format) -> Result<String, CliError> {
    let m = make_3d(f)?;
    let v = cl3_admits_we_with(f, opts)?;
    let mut r = Report::new();
    r.text("cl3.family", f.family.name());
    r.text("cl3.metric", f.metric.name());
    r.num("cl3.t", f.t);
    r.num("cl3.mu", f.mu);
    r.num("cl3.nu", f.nu);
    r.flag("cl3.admits", v.admits);
    r.flag("cl3.by_table", v.by_table);
    r.flag("cl3.by_solver", v.by_solver);
    r.int("cl3.lee_forms.count", v.lee_forms.len());
    for (i, theta) in v.lee_forms.iter().enumerate() {
        r.vector(format!("cl3.lee_forms[{i}]"), theta);
    }
    if v.admits {
        let nf = buv_normal_form(&m)?;
        match nf.case {
            BuvCase::AdbForm { k, l } => {
                r.text("cl3.normal_form", "adb");
                r.num("cl3.k", k);
                r.num("cl3.l", l);
            }
            BuvCase::DirForm { alpha } => {
                r.text("cl3.normal_form", "dir");
                r.num("cl3.alpha", alpha);
            }
        }
        r.matrix("cl3.normal_basis", &nf.basis_change.transpose());
    }
    let mut out = emit_mla(&MlaDocument::from_metric_lie_algebra(&m));
    for line in r.render(format).lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    Ok(out)
}
