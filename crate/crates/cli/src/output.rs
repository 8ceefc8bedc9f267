//! CSV, SVG and JSON writers. All output is deterministic for a given input.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

use gausspacket::analysis::AutocorrSeries;

use crate::config::ScenarioConfig;
use crate::pipeline::{Check, ScenarioResult};

/// `%.17g`: 17 significant digits, trailing zeros trimmed, exponent form
/// outside `1e-4 <= |v| < 1e17`. Negative zero prints as `0`.
pub fn format_g17(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (16 - exp) as usize;
    trim_fraction(&format!("{v:.decimals$}")).to_owned()
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `t,re_A,im_A,abs2_A,hilbert_dist[,re_Abar,im_Abar]`, LF line endings.
pub fn series_csv(series: &AutocorrSeries, anticorrelation: bool) -> String {
    let mut out = String::from("t,re_A,im_A,abs2_A,hilbert_dist");
    if anticorrelation {
        out.push_str(",re_Abar,im_Abar");
    }
    out.push('\n');
    for s in &series.samples {
        let mut cols = vec![s.t, s.a.re, s.a.im, s.modulus_sq, s.hilbert_distance];
        if anticorrelation {
            let b = s.a_bar.unwrap_or_default();
            cols.extend([b.re, b.im]);
        }
        let row: Vec<String> = cols.into_iter().map(format_g17).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

const SIZE: f64 = 480.0;
const RADIUS: f64 = 200.0;

fn to_canvas(re: f64, im: f64) -> (f64, f64) {
    (SIZE / 2.0 + RADIUS * re, SIZE / 2.0 - RADIUS * im)
}

fn polyline(points: impl Iterator<Item = (f64, f64)>, colour: &str) -> String {
    let pts: Vec<String> = points
        .map(|(re, im)| {
            let (x, y) = to_canvas(re, im);
            format!("{x:.3},{y:.3}")
        })
        .collect();
    format!(
        "  <polyline fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
        pts.join(" ")
    )
}

/// Argand diagram (Re A against Im A) of `series` on the unit disc.
pub fn argand_svg(series: &AutocorrSeries, title: &str, anticorrelation: bool) -> String {
    let c = SIZE / 2.0;
    let mut out = String::new();
    let _ = writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    );
    let _ = writeln!(out, "  <title>{}</title>", escape(title));
    let _ = writeln!(
        out,
        "  <rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        out,
        "  <line x1=\"0\" y1=\"{c}\" x2=\"{SIZE}\" y2=\"{c}\" stroke=\"#bbbbbb\"/>\n  <line x1=\"{c}\" y1=\"0\" x2=\"{c}\" y2=\"{SIZE}\" stroke=\"#bbbbbb\"/>"
    );
    let _ = writeln!(
        out,
        "  <circle cx=\"{c}\" cy=\"{c}\" r=\"{RADIUS}\" fill=\"none\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 4\"/>"
    );
    out.push_str(&polyline(
        series.samples.iter().map(|s| (s.a.re, s.a.im)),
        "#1f4e9c",
    ));
    if anticorrelation {
        out.push_str(&polyline(
            series
                .samples
                .iter()
                .filter_map(|s| s.a_bar)
                .map(|b| (b.re, b.im)),
            "#b2362b",
        ));
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[derive(Serialize)]
struct Report<'a> {
    scenario: &'a str,
    resolved_config: &'a ScenarioConfig,
    checks: &'a [Check],
    runtimes: BTreeMap<&'static str, f64>,
}

pub fn report_json(config: &ScenarioConfig, result: &ScenarioResult) -> String {
    let report = Report {
        scenario: &config.name,
        resolved_config: config,
        checks: &result.checks,
        runtimes: result
            .runs
            .iter()
            .map(|r| (r.method.as_str(), r.runtime_s))
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    text
}
