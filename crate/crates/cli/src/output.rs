//! Result rows, the CSV writer and the metadata sidecar.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

/// Fixed CSV header shared by `table`, `bvp` and `eigen`.
pub const HEADER: [&str; 13] = [
    "experiment", "N", "c", "e", "height", "k", "quantity", "measured", "reference", "tolerance", "pass", "indicator", "width",
];

/// One output line. Empty optional fields are left blank in the CSV.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub n: Option<usize>,
    pub c: Option<f64>,
    pub e: Option<f64>,
    pub height: Option<f64>,
    pub k: Option<usize>,
    pub quantity: String,
    /// `None` only when an expected value could not be produced (a missing
    /// eigenvalue root), which always fails.
    pub measured: Option<f64>,
    pub reference: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: Option<bool>,
    pub indicator: Option<f64>,
    pub width: Option<f64>,
    /// Seconds spent on the row; written to the sidecar only.
    pub seconds: f64,
}

impl ResultRow {
    pub fn new(experiment: &str, quantity: &str, measured: f64) -> Self {
        ResultRow {
            experiment: experiment.to_string(),
            quantity: quantity.to_string(),
            measured: Some(measured),
            ..Default::default()
        }
    }

    fn fields(&self) -> Vec<String> {
        let f = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        let u = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        vec![
            self.experiment.clone(),
            u(self.n),
            f(self.c),
            f(self.e),
            f(self.height),
            u(self.k),
            self.quantity.clone(),
            f(self.measured),
            f(self.reference),
            f(self.tolerance),
            self.pass.map(|p| if p { "pass" } else { "fail" }.to_string()).unwrap_or_default(),
            f(self.indicator),
            f(self.width),
        ]
    }
}

pub fn to_csv(rows: &[ResultRow]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER).map_err(|e| CliError::Io(e.to_string()))?;
    for r in rows {
        w.write_record(r.fields()).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

/// Sidecar contents: the inputs, versions and timings of one run.
#[derive(Serialize)]
pub struct Metadata {
    pub command: String,
    pub versions: Versions,
    pub total_seconds: f64,
    pub row_seconds: Vec<f64>,
    pub warnings: Vec<String>,
    /// Verbatim configuration text, or the table id.
    pub config: String,
}

#[derive(Serialize)]
pub struct Versions {
    pub cli: &'static str,
    pub core: &'static str,
}

impl Versions {
    pub fn current() -> Self {
        Versions {
            cli: env!("CARGO_PKG_VERSION"),
            core: formal_powers::VERSION,
        }
    }
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    let mut name = csv.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".meta.toml");
    csv.with_file_name(name)
}

/// Writes the CSV and its sidecar next to it.
pub fn write_outputs(path: &Path, csv: &str, meta: &Metadata) -> Result<PathBuf, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, csv).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let side = sidecar_path(path);
    let text = toml::to_string(meta).map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(&side, text).map_err(|e| CliError::Io(format!("{}: {e}", side.display())))?;
    Ok(side)
}
