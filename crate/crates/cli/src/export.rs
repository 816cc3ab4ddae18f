//! Conversion of a finished run into CSV or gnuplot data files.

use std::path::{Path, PathBuf};

use crate::pipeline::{RunReport, REPORT_FILE};
use crate::{write_atomic, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Gnuplot,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Self::Csv),
            "gnuplot" => Ok(Self::Gnuplot),
            _ => Err(CliError::usage(format!("unknown export format {s:?} (csv, gnuplot)"))),
        }
    }

    fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Gnuplot => "dat",
        }
    }
}

pub const WHAT: [&str; 4] = ["coefficients", "widom", "density", "almost-period"];

pub fn load_report(dir: &Path) -> Result<RunReport, CliError> {
    let path = dir.join(REPORT_FILE);
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::missing(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::missing(format!("{}: unreadable report: {e}", path.display())))
}

fn table(format: Format, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let (sep, mut out) = match format {
        Format::Csv => (",", header.join(",")),
        Format::Gnuplot => (" ", format!("# {}", header.join(" "))),
    };
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(sep));
        out.push('\n');
    }
    out
}

fn render(report: &RunReport, format: Format, what: &str) -> Result<String, CliError> {
    let e = |v: f64| format!("{v:e}");
    Ok(match what {
        "coefficients" => {
            let c = &report.coefficients;
            let rows = c.p.iter().enumerate().map(|(n, p)| {
                let q = c.q.get(n).map(|&q| e(q)).unwrap_or_else(|| if format == Format::Csv { String::new() } else { "NaN".into() });
                vec![n.to_string(), e(*p), q]
            });
            table(format, &["n", "p_n", "q_n"], rows)
        }
        "widom" => {
            let rows = report.asymptotics.widom_factors.iter().enumerate().map(|(n, w)| vec![n.to_string(), e(*w)]);
            table(format, &["n", "W_n"], rows)
        }
        "density" => table(format, &["x", "w"], report.density.iter().map(|[x, w]| vec![e(*x), e(*w)])),
        "almost-period" => {
            let cands = report.asymptotics.diagnostics.as_ref().map(|d| d.candidate_periods.clone()).unwrap_or_default();
            let rows = cands.into_iter().map(|c| {
                vec![c.period.to_string(), e(c.torus_distance), e(c.sup_deviation_p), e(c.sup_deviation_q)]
            });
            table(format, &["T", "torus_distance", "sup_dp", "sup_dq"], rows)
        }
        _ => return Err(CliError::usage(format!("unknown export target {what:?} ({})", WHAT.join(", ")))),
    })
}

/// Writes `<what>.csv` or `<what>.dat` next to the report and returns its path.
pub fn export(dir: &Path, format: &str, what: &str) -> Result<PathBuf, CliError> {
    let format = Format::parse(format)?;
    if !WHAT.contains(&what) {
        return Err(CliError::usage(format!("unknown export target {what:?} ({})", WHAT.join(", "))));
    }
    let report = load_report(dir)?;
    let path = dir.join(format!("{what}.{}", format.extension()));
    write_atomic(&path, render(&report, format, what)?.as_bytes())?;
    Ok(path)
}
