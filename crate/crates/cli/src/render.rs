use std::fmt::Write as _;

use qjd_core::json::fmt_sig;
use qjd_core::{JointDistribution, SpectralMeasure};

const COL: usize = 19;

fn num(x: f64) -> String {
    fmt_sig(x, 12)
}

pub fn spectral_table(labels: &[&str], measures: &[SpectralMeasure]) -> String {
    let mut out = format!(
        "{:<16} {:>5} {:>COL$} {:>5}\n",
        "observable", "index", "eigenvalue", "rank"
    );
    for (label, m) in labels.iter().zip(measures) {
        for (i, (v, r)) in m.eigenvalues().iter().zip(m.ranks()).enumerate() {
            let _ = writeln!(out, "{label:<16} {i:>5} {:>COL$} {r:>5}", num(*v));
        }
    }
    out
}

pub fn spectral_csv(labels: &[&str], measures: &[SpectralMeasure]) -> String {
    let mut out = String::from("observable,index,eigenvalue,rank\n");
    for (label, m) in labels.iter().zip(measures) {
        for (i, (v, r)) in m.eigenvalues().iter().zip(m.ranks()).enumerate() {
            let _ = writeln!(out, "{label},{i},{v:.16e},{r}");
        }
    }
    out
}

pub fn distribution_table(labels: &[&str], d: &JointDistribution) -> String {
    let mut out = String::new();
    for l in labels {
        let _ = write!(out, "{l:>COL$} ");
    }
    let _ = writeln!(out, "{:>COL$}", "weight");
    for (flat, w) in d.weights().iter().enumerate() {
        for c in d.grid().coordinates(flat) {
            let _ = write!(out, "{:>COL$} ", num(c));
        }
        let _ = writeln!(out, "{:>COL$}", num(*w));
    }
    out
}

pub fn distribution_csv(labels: &[&str], d: &JointDistribution) -> String {
    let mut out = labels.join(",");
    out.push_str(",weight\n");
    for (flat, w) in d.weights().iter().enumerate() {
        for c in d.grid().coordinates(flat) {
            let _ = write!(out, "{c:.16e},");
        }
        let _ = writeln!(out, "{w:.16e}");
    }
    out
}

/// One construction in a baseline comparison; `dist` is `None` when it
/// does not apply to the inputs.
pub struct Column<'a> {
    pub name: &'a str,
    pub dist: Option<&'a JointDistribution>,
    pub note: Option<String>,
}

/// Largest `|w - reference|` over grid points, per column.
pub fn deviations(reference: &JointDistribution, columns: &[Column]) -> Vec<Option<f64>> {
    columns
        .iter()
        .map(|c| {
            c.dist.map(|d| {
                d.weights()
                    .iter()
                    .zip(reference.weights())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
        })
        .collect()
}

fn point_deviation(reference: &JointDistribution, columns: &[Column], flat: usize) -> f64 {
    columns
        .iter()
        .filter_map(|c| c.dist)
        .map(|d| (d.weights()[flat] - reference.weights()[flat]).abs())
        .fold(0.0, f64::max)
}

/// Per-point weights of every construction, a max-deviation column against
/// `reference`, and a per-construction summary.
pub fn baseline_table(
    labels: &[&str],
    reference: &JointDistribution,
    columns: &[Column],
) -> String {
    let mut out = String::new();
    for l in labels {
        let _ = write!(out, "{l:>COL$} ");
    }
    for c in columns {
        let _ = write!(out, "{:>COL$} ", c.name);
    }
    let _ = writeln!(out, "{:>COL$}", "max deviation");
    for flat in 0..reference.grid().len() {
        for x in reference.grid().coordinates(flat) {
            let _ = write!(out, "{:>COL$} ", num(x));
        }
        for c in columns {
            let cell = c.dist.map_or("-".to_string(), |d| num(d.weights()[flat]));
            let _ = write!(out, "{cell:>COL$} ");
        }
        let _ = writeln!(
            out,
            "{:>COL$}",
            num(point_deviation(reference, columns, flat))
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:<16} {:>12} {:>COL$} {:>COL$} {:>COL$}",
        "construction", "kind", "sum", "min weight", "max deviation"
    );
    for (c, dev) in columns.iter().zip(deviations(reference, columns)) {
        match c.dist {
            Some(d) => {
                let kind = serde_json::to_value(d.kind())
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{:<16} {kind:>12} {:>COL$} {:>COL$} {:>COL$}",
                    c.name,
                    num(d.sum()),
                    num(d.min_weight()),
                    num(dev.unwrap_or(0.0)),
                );
            }
            None => {
                let _ = writeln!(
                    out,
                    "{:<16} skipped: {}",
                    c.name,
                    c.note.as_deref().unwrap_or("")
                );
            }
        }
    }
    out
}

pub fn baseline_csv(labels: &[&str], reference: &JointDistribution, columns: &[Column]) -> String {
    let mut out = labels.join(",");
    for c in columns {
        out.push(',');
        out.push_str(c.name);
    }
    out.push_str(",max_deviation\n");
    for flat in 0..reference.grid().len() {
        for x in reference.grid().coordinates(flat) {
            let _ = write!(out, "{x:.16e},");
        }
        for c in columns {
            match c.dist {
                Some(d) => {
                    let _ = write!(out, "{:.16e},", d.weights()[flat]);
                }
                None => out.push(','),
            }
        }
        let _ = writeln!(out, "{:.16e}", point_deviation(reference, columns, flat));
    }
    out
}
