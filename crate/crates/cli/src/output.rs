//! Deterministic output emission.
//!
//! CSV data files carry a `# schema=` comment line and 17-significant-digit
//! floats (binary round-trip exact). Timestamps never enter data files;
//! they live in a `<stem>.meta.json` sidecar.

use anyhow::{Context, Result};
use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

pub struct Sink {
    dir: PathBuf,
    formats: BTreeSet<Format>,
}

/// Render a float with 17 significant digits (round-trip exact for f64).
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

impl Sink {
    pub fn new(dir: Option<PathBuf>, formats: &str) -> Result<Self> {
        let dir = dir
            .or_else(|| std::env::var_os("NEEDLELAB_OUT").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"));
        fs::create_dir_all(&dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        let mut set = BTreeSet::new();
        for part in formats.split(',') {
            match part.trim() {
                "csv" => {
                    set.insert(Format::Csv);
                }
                "json" => {
                    set.insert(Format::Json);
                }
                "svg" => {
                    set.insert(Format::Svg);
                }
                "" => {}
                other => anyhow::bail!("unknown output format {other:?} (csv, json, svg)"),
            }
        }
        Ok(Sink { dir, formats: set })
    }

    pub fn wants(&self, format: Format) -> bool {
        self.formats.contains(&format)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Write a CSV file with a schema comment line; rows are preformatted.
    pub fn csv(
        &self,
        stem: &str,
        schema: &str,
        header: &[&str],
        rows: &[Vec<String>],
    ) -> Result<()> {
        if !self.wants(Format::Csv) {
            return Ok(());
        }
        let mut text = String::new();
        text.push_str(&format!("# schema={schema}\n"));
        text.push_str(&header.join(","));
        text.push('\n');
        for row in rows {
            text.push_str(&row.join(","));
            text.push('\n');
        }
        let path = self.path(&format!("{stem}.csv"));
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }

    pub fn json(&self, stem: &str, value: &serde_json::Value) -> Result<()> {
        if !self.wants(Format::Json) {
            return Ok(());
        }
        let path = self.path(&format!("{stem}.json"));
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }

    pub fn svg(&self, stem: &str, content: String) -> Result<()> {
        if !self.wants(Format::Svg) {
            return Ok(());
        }
        let path = self.path(&format!("{stem}.svg"));
        fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }

    /// Run metadata sidecar; the only place wall-clock time appears.
    pub fn meta(&self, stem: &str, subcommand: &str) -> Result<()> {
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let value = serde_json::json!({
            "tool": "needlelab",
            "version": env!("CARGO_PKG_VERSION"),
            "subcommand": subcommand,
            "unix_time": now,
        });
        let path = self.path(&format!("{stem}.meta.json"));
        let mut text = serde_json::to_string_pretty(&value)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

/// Deterministic order-preserving parallel map over an index range.
pub fn parallel_map<T, F>(n: usize, jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let jobs = jobs.max(1).min(n.max(1));
    if jobs <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut slots: Vec<Option<T>> = (0..n).map(|_| None).collect();
    let slots_ref = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let value = f(i);
                let mut guard = slots_ref.lock().unwrap();
                guard[i] = Some(value);
            });
        }
    });
    slots.into_iter().map(|s| s.unwrap()).collect()
}
