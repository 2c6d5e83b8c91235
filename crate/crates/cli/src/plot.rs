//! Standalone SVG line plots of sweep results.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use etlab_core::experiments::SweepResult;

use crate::output::OutputError;

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 5;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders one polyline per scenario over `[0, max γ/ω] × [0, 1]`, with
/// vertical error bars at points whose standard error is positive.
pub fn render_svg(result: &SweepResult, title: &str) -> Result<String, OutputError> {
    if result.rows.is_empty() {
        return Err(OutputError::EmptyPlot);
    }
    let x_max = result.rows.iter().map(|r| r.gamma_over_omega).fold(0.0, f64::max);
    let x_max = if x_max > 0.0 { x_max } else { 1.0 };
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + x / x_max * plot_w;
    let py = |y: f64| TOP + (1.0 - y.clamp(0.0, 1.0)) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#, LEFT + plot_w / 2.0, escape(title));

    // axes
    let _ = writeln!(
        svg,
        r#"<g class="axes" stroke="black" fill="none"><line x1="{LEFT}" y1="{y0}" x2="{x1}" y2="{y0}"/><line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{y0}"/></g>"#,
        y0 = TOP + plot_h,
        x1 = LEFT + plot_w
    );
    for i in 0..=TICKS {
        let f = i as f64 / TICKS as f64;
        let (x, y) = (px(f * x_max), py(f));
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{b:.2}" x2="{x:.2}" y2="{b2:.2}" stroke="black"/><text x="{x:.2}" y="{t:.2}" text-anchor="middle">{label}</text>"#,
            b = TOP + plot_h,
            b2 = TOP + plot_h + 5.0,
            t = TOP + plot_h + 18.0,
            label = trim_tick(f * x_max)
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{l2:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{tx:.2}" y="{ty:.2}" text-anchor="end">{label}</text>"#,
            l2 = LEFT - 5.0,
            tx = LEFT - 8.0,
            ty = y + 4.0,
            label = trim_tick(f)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">γ/ω</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{y}" text-anchor="middle" transform="rotate(-90 18 {y})">success probability</text>"#,
        y = TOP + plot_h / 2.0
    );

    let scenarios = result.scenarios();
    for (i, name) in scenarios.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut series = result.series(name);
        series.sort_by(|a, b| a.gamma_over_omega.total_cmp(&b.gamma_over_omega));
        let points: Vec<String> = series
            .iter()
            .map(|r| format!("{:.2},{:.2}", px(r.gamma_over_omega), py(r.probability)))
            .collect();
        let _ = writeln!(svg, r#"<g class="series" data-scenario="{}">"#, escape(name));
        let _ = writeln!(
            svg,
            r#"<polyline class="curve" fill="none" stroke="{color}" stroke-width="1.8" points="{}"/>"#,
            points.join(" ")
        );
        for r in &series {
            let (x, y) = (px(r.gamma_over_omega), py(r.probability));
            let _ = writeln!(svg, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{color}"/>"#);
            if r.stderr > 0.0 {
                let _ = writeln!(
                    svg,
                    r#"<line class="error-bar" x1="{x:.2}" y1="{lo:.2}" x2="{x:.2}" y2="{hi:.2}" stroke="{color}"/>"#,
                    lo = py(r.probability - r.stderr),
                    hi = py(r.probability + r.stderr)
                );
            }
        }
        let _ = writeln!(svg, "</g>");
    }

    let lx = WIDTH - RIGHT + 15.0;
    let _ = writeln!(svg, r#"<g class="legend">"#);
    for (i, name) in scenarios.iter().enumerate() {
        let y = TOP + 10.0 + 20.0 * i as f64;
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{y}" x2="{x2}" y2="{y}" stroke="{color}" stroke-width="2"/><text class="legend-entry" x="{tx}" y="{ty}">{}</text>"#,
            escape(name),
            x2 = lx + 22.0,
            tx = lx + 28.0,
            ty = y + 4.0
        );
    }
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn trim_tick(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() { "0".into() } else { s.to_string() }
}

pub fn emit_plot(result: &SweepResult, path: &Path, title: &str) -> Result<(), OutputError> {
    let svg = render_svg(result, title)?;
    fs::write(path, svg).map_err(|source| OutputError::Write {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use etlab_core::experiments::{Method, SweepRow};

    use super::*;

    fn result(stderr: f64) -> SweepResult {
        let mut rows = Vec::new();
        for s in ["single", "single_slow", "bitflip3", "bitflip3_eth"] {
            for (i, g) in [0.0, 0.05, 0.1].iter().enumerate() {
                rows.push(SweepRow {
                    gamma_over_omega: *g,
                    scenario: s.into(),
                    probability: 1.0 - 0.1 * i as f64,
                    stderr,
                    method: Method::Mc,
                });
            }
        }
        SweepResult { rows }
    }

    #[test]
    fn one_curve_and_legend_entry_per_scenario() {
        let svg = render_svg(&result(0.01), "memory").unwrap();
        assert_eq!(svg.matches("<polyline").count(), 4);
        for s in ["single", "single_slow", "bitflip3", "bitflip3_eth"] {
            assert!(svg.contains(&format!(r#"class="legend-entry" x="{}" y"#, WIDTH - RIGHT + 43.0)));
            assert!(svg.contains(&format!(">{s}</text>")));
        }
        assert_eq!(svg.matches("error-bar").count(), 12);
    }

    #[test]
    fn no_error_bars_without_stderr() {
        let svg = render_svg(&result(0.0), "memory").unwrap();
        assert_eq!(svg.matches("error-bar").count(), 0);
    }

    #[test]
    fn axis_spans_grid_and_unit_interval() {
        let svg = render_svg(&result(0.0), "t").unwrap();
        // rightmost tick carries max γ/ω, top tick carries 1
        assert!(svg.contains(">0.1</text>"));
        assert!(svg.contains(">1</text>"));
        // γ = 0, p = 1 sits on the plot origin column at the top edge
        assert!(svg.contains(&format!(r#"cx="{LEFT:.2}" cy="{TOP:.2}""#)));
    }

    #[test]
    fn empty_result_rejected() {
        assert!(matches!(render_svg(&SweepResult::default(), "t"), Err(OutputError::EmptyPlot)));
    }

    #[test]
    fn labels_are_escaped() {
        let mut r = result(0.0);
        r.rows[0].scenario = "a<b".into();
        assert!(render_svg(&r, "x&y").unwrap().contains("a&lt;b"));
    }
}
