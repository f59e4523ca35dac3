//! Atomic file output: CSV tables, JSON summaries and SVG plots.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Scientific notation with 17 significant digits, enough to round-trip.
pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

/// An in-memory CSV table of floats.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[String]) -> io::Result<Self> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header)?;
        Ok(Self { writer })
    }

    pub fn row(&mut self, values: impl IntoIterator<Item = f64>) -> io::Result<()> {
        let record: Vec<String> = values.into_iter().map(float).collect();
        self.writer.write_record(&record)?;
        Ok(())
    }

    pub fn save(self, path: &Path) -> io::Result<()> {
        let bytes = self.writer.into_inner().map_err(|e| e.into_error())?;
        write_atomic(path, &bytes)
    }
}

pub fn save_json(path: &Path, value: &impl serde::Serialize) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Column names `prefix_1 … prefix_n`.
pub fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("{prefix}_{k}")).collect()
}

/// Output location for one run: `<dir>/<stem>.<suffix>`.
pub struct Destination {
    pub dir: PathBuf,
    pub stem: String,
}

impl Destination {
    pub fn file(&self, suffix: &str) -> PathBuf {
        self.dir.join(format!("{}.{suffix}", self.stem))
    }
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Two-panel plot: unwrapped angles against time, and the positions traced
/// on the unit circle. `angles[k][n]` is particle `n` at `times[k]`.
pub fn trajectory_svg(title: &str, times: &[f64], angles: &[Vec<f64>]) -> String {
    let (w, h, pad) = (900.0, 420.0, 40.0);
    let plot_w = 520.0;
    let n = angles.first().map_or(0, |a| a.len());
    let t_max = times.last().copied().unwrap_or(1.0).max(f64::MIN_POSITIVE);
    let (lo, hi) = angles
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let (lo, hi) = if hi - lo < 1e-12 { (lo - 1.0, hi + 1.0) } else { (lo, hi) };
    let x = |t: f64| pad + t / t_max * (plot_w - 2.0 * pad);
    let y = |v: f64| h - pad - (v - lo) / (hi - lo) * (h - 2.0 * pad);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{pad}" y="20">{}</text>"#, escape(title));
    let _ = writeln!(
        svg,
        r#"<rect x="{pad}" y="{pad}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        plot_w - 2.0 * pad,
        h - 2.0 * pad
    );
    let _ = writeln!(svg, r#"<text x="{}" y="{}">t</text>"#, plot_w / 2.0, h - 10.0);
    let _ = writeln!(svg, r#"<text x="5" y="{}">θ</text>"#, h / 2.0);
    let _ = writeln!(svg, r#"<text x="{pad}" y="{}">{lo:.2}</text>"#, h - pad + 14.0);
    let _ = writeln!(svg, r#"<text x="{pad}" y="{}">{hi:.2}</text>"#, pad - 4.0);

    let (cx, cy, r) = (plot_w + (w - plot_w) / 2.0, h / 2.0, (h - 2.0 * pad) / 2.0);
    let _ = writeln!(svg, r##"<circle cx="{cx}" cy="{cy}" r="{r}" fill="none" stroke="#999"/>"##);

    for p in 0..n {
        let color = PALETTE[p % PALETTE.len()];
        let series: Vec<String> = times
            .iter()
            .zip(angles)
            .map(|(&t, a)| format!("{:.2},{:.2}", x(t), y(a[p])))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            series.join(" ")
        );
        let trace: Vec<String> = angles
            .iter()
            .map(|a| format!("{:.2},{:.2}", cx + r * a[p].cos(), cy - r * a[p].sin()))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-opacity="0.6" points="{}"/>"#,
            trace.join(" ")
        );
        if let Some(last) = angles.last() {
            let (px, py) = (cx + r * last[p].cos(), cy - r * last[p].sin());
            let _ = writeln!(svg, r#"<circle cx="{px:.2}" cy="{py:.2}" r="4" fill="{color}"/>"#);
        }
    }
    let _ = writeln!(svg, r#"<text x="{}" y="{}">unit circle, θ = 0 at right</text>"#, cx - r, h - 10.0);
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Unwraps a sequence of angles so consecutive samples differ by less
/// than `π`.
pub fn unwrap_angles(samples: &mut [Vec<f64>]) {
    for k in 1..samples.len() {
        let (prev, cur) = samples.split_at_mut(k);
        let prev = &prev[k - 1];
        for (c, p) in cur[0].iter_mut().zip(prev) {
            let d = (*c - p + PI).rem_euclid(2.0 * PI) - PI;
            *c = p + d;
        }
    }
}
