//! Plot-ready emitters. Floats go out with 17 significant digits so that a
//! reader parsing them back gets the identical `f64`.

use std::fmt::Write as _;

use ctp_core::density::{DensityMatrix, DensityReport};
use ctp_core::experiments::ScreenPattern;
use serde::Serialize;

use crate::config::Format;

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Serialize)]
struct PatternRecord {
    x: usize,
    total: f64,
    direct: f64,
    interference_re: f64,
    interference_im: f64,
    slit_probs: Vec<f64>,
}

pub fn pattern(p: &ScreenPattern, format: Format) -> String {
    match format {
        Format::Csv => pattern_csv(p),
        Format::Json => {
            let records: Vec<PatternRecord> = p
                .rows
                .iter()
                .map(|r| PatternRecord {
                    x: r.x,
                    total: r.total.re,
                    direct: r.direct,
                    interference_re: r.interference.re,
                    interference_im: r.interference.im,
                    slit_probs: r.slit_probs(),
                })
                .collect();
            let measured: Vec<usize> = p.measured.iter().map(|k| k + 1).collect();
            let doc = serde_json::json!({ "measured": measured, "rows": records });
            to_json(&doc)
        }
    }
}

fn pattern_csv(p: &ScreenPattern) -> String {
    let slits = p.rows.first().map_or(0, |r| r.slit_amps.len());
    let mut out = String::from("x,total,direct,interference_re,interference_im");
    for k in 1..=slits {
        write!(out, ",slit{k}").unwrap();
    }
    out.push('\n');
    for r in &p.rows {
        write!(
            out,
            "{},{},{},{},{}",
            r.x,
            num(r.total.re),
            num(r.direct),
            num(r.interference.re),
            num(r.interference.im)
        )
        .unwrap();
        for prob in r.slit_probs() {
            write!(out, ",{}", num(prob)).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Row-major dump of `ρ` as `(re, im)` pairs.
pub fn density(rho: &DensityMatrix, format: Format) -> String {
    let n = rho.dim();
    match format {
        Format::Csv => {
            let mut out = String::from("row,col,re,im\n");
            for i in 0..n {
                for j in 0..n {
                    let v = rho.entries[(i, j)];
                    writeln!(out, "{i},{j},{},{}", num(v.re), num(v.im)).unwrap();
                }
            }
            out
        }
        Format::Json => {
            let entries: Vec<Vec<[f64; 2]>> = (0..n)
                .map(|i| (0..n).map(|j| rho.entries[(i, j)]).map(|v| [v.re, v.im]).collect())
                .collect();
            to_json(&serde_json::json!({ "t": rho.t, "dim": n, "entries": entries }))
        }
    }
}

pub fn density_report(report: &DensityReport) -> String {
    to_json(report)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}
