//! The MLA v1 text format for metric Lie algebras.
//!
//! ```text
//! mla 1
//! dim 3
//! bracket 1 3 = -1 0 0   # [e1, e3] = -e1
//! bracket 2 3 = 0 1 0
//! metric
//! 1 0 0
//! 0 1 0
//! 0 0 1
//! ```
//!
//! Indices are one-based and each bracket line needs `I < J`. The metric block
//! is optional and defaults to the identity.

use std::fmt;

use lieweyl_core::liealg::{LieAlgebra, ViolationKind};
use lieweyl_core::{GeomError, MetricLieAlgebra};
use nalgebra::DMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MlaErrorKind {
    Header,
    Version,
    Dim,
    UnknownDirective,
    Syntax,
    Number,
    Index,
    SelfBracket,
    BracketOrder,
    DuplicateBracket,
    MetricShape,
    DuplicateMetric,
    MetricSymmetry,
    MetricSpd,
    Jacobi,
}

impl MlaErrorKind {
    pub fn code(&self) -> &'static str {
        match self {
            MlaErrorKind::Header => "E_HEADER",
            MlaErrorKind::Version => "E_VERSION",
            MlaErrorKind::Dim => "E_DIM",
            MlaErrorKind::UnknownDirective => "E_UNKNOWN_DIRECTIVE",
            MlaErrorKind::Syntax => "E_SYNTAX",
            MlaErrorKind::Number => "E_NUMBER",
            MlaErrorKind::Index => "E_INDEX",
            MlaErrorKind::SelfBracket => "E_SELF_BRACKET",
            MlaErrorKind::BracketOrder => "E_BRACKET_ORDER",
            MlaErrorKind::DuplicateBracket => "E_DUPLICATE_BRACKET",
            MlaErrorKind::MetricShape => "E_METRIC_SHAPE",
            MlaErrorKind::DuplicateMetric => "E_DUPLICATE_METRIC",
            MlaErrorKind::MetricSymmetry => "E_METRIC_NOT_SYMMETRIC",
            MlaErrorKind::MetricSpd => "E_METRIC_NOT_SPD",
            MlaErrorKind::Jacobi => "E_JACOBI",
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{} line {line}: {message}", kind.code())]
pub struct MlaError {
    pub kind: MlaErrorKind,
    pub line: usize,
    pub message: String,
}

fn err<T>(kind: MlaErrorKind, line: usize, message: impl Into<String>) -> Result<T, MlaError> {
    Err(MlaError {
        kind,
        line,
        message: message.into(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bracket {
    /// One-based, `i < j`.
    pub i: usize,
    pub j: usize,
    pub coeffs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlaDocument {
    pub version: u32,
    pub dim: usize,
    pub brackets: Vec<Bracket>,
    /// Row-major `dim x dim`.
    pub metric: Vec<Vec<f64>>,
}

impl MlaDocument {
    pub fn from_metric_lie_algebra(m: &MetricLieAlgebra) -> Self {
        let n = m.dim();
        let alg = m.algebra();
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let coeffs: Vec<f64> = (0..n).map(|k| alg.c(i, j, k) + 0.0).collect();
                if coeffs.iter().any(|&c| c != 0.0) {
                    brackets.push(Bracket { i: i + 1, j: j + 1, coeffs });
                }
            }
        }
        let g = m.metric();
        MlaDocument {
            version: 1,
            dim: n,
            brackets,
            metric: (0..n).map(|r| (0..n).map(|c| g[(r, c)] + 0.0).collect()).collect(),
        }
    }

    pub fn algebra(&self) -> Result<LieAlgebra, GeomError> {
        let brackets: Vec<_> = self
            .brackets
            .iter()
            .map(|b| (b.i - 1, b.j - 1, b.coeffs.clone()))
            .collect();
        LieAlgebra::from_brackets(self.dim, &brackets)
    }

    pub fn metric_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |r, c| self.metric[r][c])
    }

    pub fn to_metric_lie_algebra(&self) -> Result<MetricLieAlgebra, GeomError> {
        MetricLieAlgebra::new(self.algebra()?, self.metric_matrix())
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_exact(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn emit_mla(doc: &MlaDocument) -> String {
    let join = |v: &[f64]| v.iter().map(|&x| format_exact(x)).collect::<Vec<_>>().join(" ");
    let mut out = format!("mla {}\ndim {}\n", doc.version, doc.dim);
    for b in &doc.brackets {
        out.push_str(&format!("bracket {} {} = {}\n", b.i, b.j, join(&b.coeffs)));
    }
    out.push_str("metric\n");
    for row in &doc.metric {
        out.push_str(&join(row));
        out.push('\n');
    }
    out
}

fn parse_number(tok: &str, line: usize) -> Result<f64, MlaError> {
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => err(MlaErrorKind::Number, line, format!("non-finite number `{tok}`")),
        Err(_) => err(MlaErrorKind::Number, line, format!("invalid number `{tok}`")),
    }
}

fn parse_index(tok: &str, dim: usize, line: usize) -> Result<usize, MlaError> {
    match tok.parse::<usize>() {
        Ok(i) if (1..=dim).contains(&i) => Ok(i),
        Ok(i) => err(MlaErrorKind::Index, line, format!("index {i} outside 1..{dim}")),
        Err(_) => err(MlaErrorKind::Syntax, line, format!("invalid index `{tok}`")),
    }
}

pub fn parse_mla(text: &str) -> Result<MlaDocument, MlaError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = match lines.next() {
        Some(x) => x,
        None => return err(MlaErrorKind::Header, 1, "empty document, expected `mla 1`"),
    };
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 2 || toks[0] != "mla" {
        return err(MlaErrorKind::Header, hline, "expected header `mla 1`");
    }
    let version = match toks[1].parse::<u32>() {
        Ok(1) => 1,
        _ => return err(MlaErrorKind::Version, hline, format!("unsupported version `{}`", toks[1])),
    };

    let mut dim: Option<usize> = None;
    let mut brackets: Vec<Bracket> = Vec::new();
    let mut bracket_lines: Vec<usize> = Vec::new();
    let mut metric: Option<(usize, Vec<Vec<f64>>)> = None;

    while let Some((ln, l)) = lines.next() {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks[0] {
            "dim" => {
                if dim.is_some() {
                    return err(MlaErrorKind::Dim, ln, "duplicate `dim`");
                }
                if toks.len() != 2 {
                    return err(MlaErrorKind::Syntax, ln, "expected `dim N`");
                }
                match toks[1].parse::<usize>() {
                    Ok(n) if n >= 1 => dim = Some(n),
                    _ => return err(MlaErrorKind::Dim, ln, format!("invalid dimension `{}`", toks[1])),
                }
            }
            "bracket" => {
                let n = match dim {
                    Some(n) => n,
                    None => return err(MlaErrorKind::Dim, ln, "`bracket` before `dim`"),
                };
                if toks.len() < 4 || toks[3] != "=" {
                    return err(MlaErrorKind::Syntax, ln, "expected `bracket I J = a1 .. aN`");
                }
                let i = parse_index(toks[1], n, ln)?;
                let j = parse_index(toks[2], n, ln)?;
                if i == j {
                    return err(MlaErrorKind::SelfBracket, ln, "self-bracket not allowed");
                }
                if i > j {
                    return err(
                        MlaErrorKind::BracketOrder,
                        ln,
                        format!("bracket {i} {j} must be written with I < J"),
                    );
                }
                if let Some(p) = brackets.iter().position(|b| b.i == i && b.j == j) {
                    return err(
                        MlaErrorKind::DuplicateBracket,
                        ln,
                        format!("duplicate bracket {i} {j} (first on line {})", bracket_lines[p]),
                    );
                }
                if toks.len() - 4 != n {
                    return err(
                        MlaErrorKind::Syntax,
                        ln,
                        format!("bracket {i} {j} has {} coefficients, expected {n}", toks.len() - 4),
                    );
                }
                let coeffs = toks[4..]
                    .iter()
                    .map(|t| parse_number(t, ln))
                    .collect::<Result<Vec<_>, _>>()?;
                brackets.push(Bracket { i, j, coeffs });
                bracket_lines.push(ln);
            }
            "metric" => {
                let n = match dim {
                    Some(n) => n,
                    None => return err(MlaErrorKind::Dim, ln, "`metric` before `dim`"),
                };
                if metric.is_some() {
                    return err(MlaErrorKind::DuplicateMetric, ln, "duplicate `metric` block");
                }
                if toks.len() != 1 {
                    return err(MlaErrorKind::Syntax, ln, "`metric` takes no arguments");
                }
                let mut rows = Vec::with_capacity(n);
                for r in 0..n {
                    let (rl, row) = match lines.next() {
                        Some(x) => x,
                        None => {
                            return err(
                                MlaErrorKind::MetricShape,
                                ln,
                                format!("metric has {r} rows, expected {n}"),
                            )
                        }
                    };
                    let vals = row
                        .split_whitespace()
                        .map(|t| parse_number(t, rl))
                        .collect::<Result<Vec<_>, _>>()?;
                    if vals.len() != n {
                        return err(
                            MlaErrorKind::MetricShape,
                            rl,
                            format!("metric row has {} entries, expected {n}", vals.len()),
                        );
                    }
                    rows.push(vals);
                }
                metric = Some((ln, rows));
            }
            other => {
                return err(
                    MlaErrorKind::UnknownDirective,
                    ln,
                    format!("unknown directive `{other}`"),
                )
            }
        }
    }

    let n = match dim {
        Some(n) => n,
        None => return err(MlaErrorKind::Dim, hline, "missing `dim`"),
    };
    let (mline, metric) = metric.unwrap_or_else(|| {
        let id = (0..n).map(|r| (0..n).map(|c| f64::from(u8::from(r == c))).collect()).collect();
        (hline, id)
    });
    let doc = MlaDocument {
        version,
        dim: n,
        brackets,
        metric,
    };

    let g = doc.metric_matrix();
    let big = g.amax();
    for r in 0..n {
        for c in r + 1..n {
            if (g[(r, c)] - g[(c, r)]).abs() > 1e-12 * big {
                return err(
                    MlaErrorKind::MetricSymmetry,
                    mline,
                    format!("non-symmetric metric: entries ({},{}) and ({},{}) differ", r + 1, c + 1, c + 1, r + 1),
                );
            }
        }
    }
    if g.clone().cholesky().is_none() {
        return err(MlaErrorKind::MetricSpd, mline, "metric is not positive definite");
    }

    let alg = doc.algebra().map_err(|e| MlaError {
        kind: MlaErrorKind::Syntax,
        line: hline,
        message: e.to_string(),
    })?;
    let report = alg.validate();
    if let Some(v) = report.violations.iter().find(|v| v.kind == ViolationKind::Jacobi) {
        let (i, j, k) = v.indices;
        let involved = [(i, j), (j, k), (i, k)];
        let line = doc
            .brackets
            .iter()
            .zip(&bracket_lines)
            .filter(|(b, _)| involved.contains(&(b.i - 1, b.j - 1)))
            .map(|(_, l)| *l)
            .max()
            .or_else(|| bracket_lines.last().copied())
            .unwrap_or(hline);
        return err(
            MlaErrorKind::Jacobi,
            line,
            format!(
                "Jacobi identity fails for (e{}, e{}, e{}) with residual {:.3e}",
                i + 1,
                j + 1,
                k + 1,
                v.magnitude
            ),
        );
    }
    Ok(doc)
}

impl fmt::Display for MlaDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&emit_mla(self))
    }
}
