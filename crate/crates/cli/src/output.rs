//! CSV emission (self-describing `#` metadata header, column names, data
//! rows at 12 significant digits) and companion gnuplot scripts.

use crate::{CliError, CliResult};
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub struct CsvDoc {
    pub command: String,
    pub invocation: String,
    pub params: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

pub fn float(v: f64) -> String {
    format!("{v:.11e}")
}

impl CsvDoc {
    pub fn new(command: &str, invocation: String, columns: Vec<&'static str>) -> Self {
        Self {
            command: command.to_string(),
            invocation,
            params: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.params.push((key.to_string(), value.to_string()));
    }

    pub fn body(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# kitaev-echo {VERSION}");
        let _ = writeln!(out, "# command: {}", self.command);
        let _ = writeln!(out, "# invocation: {}", self.invocation);
        for (k, v) in &self.params {
            let _ = writeln!(out, "# {k} = {v}");
        }
        out.push_str(&self.body());
        out
    }

    /// Write to `--out` or stdout.
    pub fn emit(&self, out: &Option<PathBuf>) -> CliResult<()> {
        let text = self.render();
        match out {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(e.to_string())),
        }
    }
}

pub enum PlotKind {
    /// x column 1, y column 2
    TimeSeries {
        xlabel: &'static str,
        ylabel: &'static str,
    },
    /// momentum profile: impulses of column 2 against column 1
    MomentumScan,
    /// long-format field sweep: (n, h_f, L) rows
    FieldSweep { sizes: Vec<usize> },
    /// scaling plot with the fitted power law overlaid
    Scaling { amplitude: f64, exponent: f64 },
}

pub fn write_plot_script(
    path: &Path,
    csv: &Option<PathBuf>,
    kind: &PlotKind,
    title: &str,
) -> CliResult<()> {
    let data = match csv {
        Some(p) => p.display().to_string(),
        None => {
            return Err(CliError::Validation(
                "  - --plot-script needs --out (the script references the CSV file)".into(),
            ))
        }
    };
    let mut s = String::new();
    let _ = writeln!(s, "# gnuplot script generated by kitaev-echo {VERSION}");
    let _ = writeln!(s, "set datafile separator \",\"");
    let _ = writeln!(s, "set grid");
    match kind {
        PlotKind::TimeSeries { xlabel, ylabel } => {
            let _ = writeln!(s, "set xlabel \"{xlabel}\"");
            let _ = writeln!(s, "set ylabel \"{ylabel}\"");
            let _ = writeln!(
                s,
                "plot \"{data}\" skip 1 using 1:2 with lines title \"{title}\""
            );
        }
        PlotKind::MomentumScan => {
            let _ = writeln!(s, "set xlabel \"k\"");
            let _ = writeln!(s, "set ylabel \"P(k)\"");
            let _ = writeln!(
                s,
                "plot \"{data}\" skip 1 using 1:2 with impulses title \"{title}\", \
                 \"\" skip 1 using 1:2 with points pt 7 notitle"
            );
        }
        PlotKind::FieldSweep { sizes } => {
            let list = sizes
                .iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            let _ = writeln!(s, "set xlabel \"h_f / j_x\"");
            let _ = writeln!(s, "set ylabel \"L\"");
            let _ = writeln!(
                s,
                "plot for [n in \"{list}\"] \"{data}\" skip 1 \
                 using 2:((strcol(1) eq n) ? $3 : 1/0) with lines title \"N=\".n"
            );
        }
        PlotKind::Scaling {
            amplitude,
            exponent,
        } => {
            let _ = writeln!(s, "set logscale xy");
            let _ = writeln!(s, "set xlabel \"N\"");
            let _ = writeln!(s, "set ylabel \"peak P(k)\"");
            let _ = writeln!(
                s,
                "plot \"{data}\" skip 1 using 1:2 with points pt 7 title \"{title}\", \
                 {amplitude} * x**({exponent}) with lines title \"fit\""
            );
        }
    }
    let _ = writeln!(s, "pause -1");
    std::fs::write(path, s).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
