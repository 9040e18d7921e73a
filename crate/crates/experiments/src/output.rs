//! Report files. Every JSON and CSV file carries the command name and the
//! run fingerprint; wall-clock times go only to the `<command>.log` sidecar
//! so that reports are byte-identical across runs.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context as _, Result};
use serde::Serialize;
use statecast::eval::EvalReport;

#[derive(Serialize)]
struct Envelope<'a, T> {
    command: &'a str,
    fingerprint: &'a str,
    result: &'a T,
}

pub struct Output {
    dir: PathBuf,
    command: &'static str,
    fingerprint: String,
    started: Instant,
    log: Vec<String>,
    files: Vec<PathBuf>,
}

impl Output {
    /// Files go to `<out>/<command>/`.
    pub fn new(out: &Path, command: &'static str, fingerprint: String) -> Result<Self> {
        let dir = out.join(command);
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir, command, fingerprint, started: Instant::now(), log: Vec::new(), files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    fn header(&self) -> String {
        format!("command={} fingerprint={}", self.command, self.fingerprint)
    }

    fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        self.files.push(path);
        Ok(BufWriter::new(file))
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut w = self.create(name)?;
        let env = Envelope { command: self.command, fingerprint: &self.fingerprint, result: value };
        serde_json::to_writer_pretty(&mut w, &env)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    pub fn csv<R, I>(&mut self, name: &str, header: &[&str], rows: R) -> Result<()>
    where
        R: IntoIterator<Item = I>,
        I: IntoIterator<Item = String>,
    {
        let comment = self.header();
        let mut w = self.create(name)?;
        writeln!(w, "# {comment}")?;
        let mut c = csv::Writer::from_writer(w);
        c.write_record(header)?;
        for row in rows {
            c.write_record(row.into_iter().collect::<Vec<_>>())?;
        }
        c.flush()?;
        Ok(())
    }

    pub fn predictions(&mut self, name: &str, report: &EvalReport) -> Result<()> {
        let comment = format!("{} run={}", self.header(), report.fingerprint);
        let mut w = self.create(name)?;
        report.write_predictions_csv(&mut w, Some(&comment))?;
        w.flush()?;
        Ok(())
    }

    /// Progress line: printed and kept for the sidecar log.
    pub fn note(&mut self, msg: impl Into<String>) {
        let msg = msg.into();
        log::info!("{msg}");
        self.log.push(format!("{:>9.3}s {msg}", self.started.elapsed().as_secs_f64()));
    }

    pub fn finish(mut self) -> Result<Vec<PathBuf>> {
        let now = chrono::Local::now().format("%Y-%m-%dT%H:%M:%S%z").to_string();
        let mut text = format!("{} finished {now} after {:.3}s\n", self.header(), self.started.elapsed().as_secs_f64());
        for line in &self.log {
            text.push_str(line);
            text.push('\n');
        }
        for f in &self.files {
            text.push_str(&format!("wrote {}\n", f.display()));
        }
        let path = self.dir.join(format!("{}.log", self.command));
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(std::mem::take(&mut self.files))
    }
}

/// Shortest round-trip text for a float; empty for NaN.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        v.to_string()
    }
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}
