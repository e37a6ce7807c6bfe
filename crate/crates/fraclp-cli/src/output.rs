//! Run-directory persistence: a results CSV, a verdicts CSV, a metadata
//! sidecar, and a human summary, written into a fresh serial-numbered
//! directory via temp-then-rename so partial bundles never appear.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::error::CliError;

/// One PASS/FAIL row. `detail` must not contain commas or newlines.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub check: String,
    pub detail: String,
    pub measured: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Verdict {
    pub fn new(
        check: impl Into<String>,
        detail: impl Into<String>,
        measured: f64,
        threshold: f64,
        pass: bool,
    ) -> Self {
        let sanitize = |s: String| s.replace([',', '\n'], ";");
        Verdict {
            check: sanitize(check.into()),
            detail: sanitize(detail.into()),
            measured,
            threshold,
            pass,
        }
    }
}

/// Everything a command produces, still in memory.
#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    /// Comma-joined header of `results.csv`.
    pub results_header: String,
    /// Pre-formatted rows matching the header.
    pub results_rows: Vec<String>,
    pub verdicts: Vec<Verdict>,
    /// Free-form notes appended to the summary (not verdicts).
    pub notes: Vec<String>,
}

impl RunOutput {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

/// Shortest round-trip decimal form; deterministic for a given bit pattern.
pub fn fmt_float(v: f64) -> String {
    if v == 0.0 {
        // collapse -0 so byte output does not depend on sign tricks
        return "0".into();
    }
    format!("{v}")
}

fn render_results(out: &RunOutput) -> String {
    let mut text = String::with_capacity(64 * (out.results_rows.len() + 1));
    text.push_str(&out.results_header);
    text.push('\n');
    for row in &out.results_rows {
        text.push_str(row);
        text.push('\n');
    }
    text
}

fn render_verdicts(verdicts: &[Verdict]) -> String {
    let mut text = String::from("check,detail,measured,threshold,pass\n");
    for v in verdicts {
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            v.check,
            v.detail,
            fmt_float(v.measured),
            fmt_float(v.threshold),
            v.pass
        ));
    }
    text
}

fn render_summary(cmd: &str, out: &RunOutput) -> String {
    let mut text = format!("fraclp {cmd}\n");
    for v in &out.verdicts {
        text.push_str(&format!(
            "{} {}: {} (measured={} threshold={})\n",
            if v.pass { "PASS" } else { "FAIL" },
            v.check,
            v.detail,
            fmt_float(v.measured),
            fmt_float(v.threshold)
        ));
    }
    for note in &out.notes {
        text.push_str(&format!("note: {note}\n"));
    }
    text.push_str(if out.all_pass() { "overall: PASS\n" } else { "overall: FAIL\n" });
    text
}

fn write_file(dir: &Path, name: &str, content: &str) -> Result<(), CliError> {
    let tmp = dir.join(format!(".{name}.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(content.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, dir.join(name))?;
    Ok(())
}

fn next_serial(root: &Path, cmd: &str) -> usize {
    let prefix = format!("{cmd}_");
    let mut max = 0usize;
    if let Ok(entries) = fs::read_dir(root) {
        for entry in entries.flatten() {
            if let Some(name) = entry.file_name().to_str() {
                if let Some(rest) = name.strip_prefix(&prefix) {
                    if let Ok(n) = rest.parse::<usize>() {
                        max = max.max(n);
                    }
                }
            }
        }
    }
    max + 1
}

/// Write the bundle under `<root>/<cmd>_<serial>/`. Files are assembled in
/// a hidden temp directory and the directory itself is renamed into place,
/// so observers never see a partial run.
pub fn write_run_dir(
    root: &Path,
    cmd: &str,
    out: &RunOutput,
    metadata: &[(String, String)],
) -> Result<PathBuf, CliError> {
    fs::create_dir_all(root)?;
    let nonce = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_nanos()).unwrap_or(0);
    let staging = root.join(format!(".tmp_{cmd}_{}_{nonce}", std::process::id()));
    fs::create_dir(&staging)?;

    let result = (|| -> Result<(), CliError> {
        write_file(&staging, "results.csv", &render_results(out))?;
        write_file(&staging, "verdicts.csv", &render_verdicts(&out.verdicts))?;
        let mut meta = String::new();
        for (k, v) in metadata {
            meta.push_str(&format!("{k} = {v}\n"));
        }
        write_file(&staging, "metadata.txt", &meta)?;
        write_file(&staging, "summary.txt", &render_summary(cmd, out))?;
        Ok(())
    })();
    if let Err(e) = result {
        let _ = fs::remove_dir_all(&staging);
        return Err(e);
    }

    // claim the next free serial; retry if a concurrent run grabbed it
    for _ in 0..64 {
        let dir = root.join(format!("{cmd}_{:04}", next_serial(root, cmd)));
        match fs::rename(&staging, &dir) {
            Ok(()) => return Ok(dir),
            Err(e) if dir.exists() => {
                let _ = e;
                continue;
            }
            Err(e) => {
                let _ = fs::remove_dir_all(&staging);
                return Err(e.into());
            }
        }
    }
    let _ = fs::remove_dir_all(&staging);
    Err(CliError::Usage("could not allocate a run directory serial".into()))
}
