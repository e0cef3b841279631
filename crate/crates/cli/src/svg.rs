//! Minimal SVG plots: polyline charts and a raster heat map.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const PANEL_HEIGHT: f64 = 360.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 45.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

fn finite_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-300 {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn header(height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{height}\" viewBox=\"0 0 {WIDTH} {height}\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

fn axes(
    s: &mut String,
    y0: f64,
    title: &str,
    x_label: &str,
    y_label: &str,
    xr: (f64, f64),
    yr: (f64, f64),
) {
    let (left, right) = (MARGIN_L, WIDTH - MARGIN_R);
    let (top, bottom) = (y0 + MARGIN_T, y0 + PANEL_HEIGHT - MARGIN_B);
    let _ = writeln!(
        s,
        "<rect x=\"{left}\" y=\"{top}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
        right - left,
        bottom - top
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{title}</text>",
        WIDTH / 2.0,
        y0 + 18.0
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{x_label}</text>",
        (left + right) / 2.0,
        bottom + 35.0
    );
    let _ = writeln!(
        s,
        "<text x=\"15\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 15 {})\">{y_label}</text>",
        (top + bottom) / 2.0,
        (top + bottom) / 2.0
    );
    for (v, x, anchor) in [(xr.0, left, "start"), (xr.1, right, "end")] {
        let _ = writeln!(
            s,
            "<text x=\"{x}\" y=\"{}\" text-anchor=\"{anchor}\">{v:.3}</text>",
            bottom + 15.0
        );
    }
    for (v, y) in [(yr.0, bottom), (yr.1, top + 10.0)] {
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{y}\" text-anchor=\"end\">{v:.4}</text>",
            left - 4.0
        );
    }
}

/// Stacks the charts vertically in one document.
pub fn line_charts(charts: &[Chart]) -> String {
    let mut s = header(PANEL_HEIGHT * charts.len() as f64);
    for (idx, chart) in charts.iter().enumerate() {
        let y0 = idx as f64 * PANEL_HEIGHT;
        let xr = finite_range(
            chart
                .series
                .iter()
                .flat_map(|c| c.points.iter().map(|p| p.0)),
        );
        let yr = finite_range(
            chart
                .series
                .iter()
                .flat_map(|c| c.points.iter().map(|p| p.1)),
        );
        axes(
            &mut s,
            y0,
            &chart.title,
            &chart.x_label,
            &chart.y_label,
            xr,
            yr,
        );
        let (left, right) = (MARGIN_L, WIDTH - MARGIN_R);
        let (top, bottom) = (y0 + MARGIN_T, y0 + PANEL_HEIGHT - MARGIN_B);
        for (k, series) in chart.series.iter().enumerate() {
            let colour = PALETTE[k % PALETTE.len()];
            let pts: Vec<String> = series
                .points
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|&(x, y)| {
                    let px = left + (x - xr.0) / (xr.1 - xr.0) * (right - left);
                    let py = bottom - (y - yr.0) / (yr.1 - yr.0) * (bottom - top);
                    format!("{px:.2},{py:.2}")
                })
                .collect();
            let _ = writeln!(
                s,
                "<polyline fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.5\" points=\"{}\"/>",
                pts.join(" ")
            );
            let _ = writeln!(
                s,
                "<text x=\"{}\" y=\"{}\" fill=\"{colour}\" text-anchor=\"end\">{}</text>",
                right - 6.0,
                top + 16.0 + 14.0 * k as f64,
                series.label
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Linear blue-to-yellow ramp.
fn colour(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        lerp(40.0, 250.0),
        lerp(20.0, 230.0),
        lerp(120.0, 30.0)
    )
}

/// Heat map of `values[i][j]` at `(xs[i], ys[j])`, x horizontal.
pub fn heat_map(
    title: &str,
    x_label: &str,
    y_label: &str,
    xs: &[f64],
    ys: &[f64],
    values: &[Vec<f64>],
) -> String {
    let mut s = header(PANEL_HEIGHT);
    let xr = finite_range(xs.iter().copied());
    let yr = finite_range(ys.iter().copied());
    let vr = finite_range(values.iter().flatten().copied());
    axes(&mut s, 0.0, title, x_label, y_label, xr, yr);
    let (left, right) = (MARGIN_L, WIDTH - MARGIN_R);
    let (top, bottom) = (MARGIN_T, PANEL_HEIGHT - MARGIN_B);
    let cw = (right - left) / xs.len().max(1) as f64;
    let ch = (bottom - top) / ys.len().max(1) as f64;
    for (i, column) in values.iter().enumerate() {
        for (j, &v) in column.iter().enumerate() {
            let fill = if v.is_finite() {
                colour((v - vr.0) / (vr.1 - vr.0))
            } else {
                "#808080".into()
            };
            let _ = writeln!(
                s,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{fill}\"/>",
                left + i as f64 * cw,
                bottom - (j + 1) as f64 * ch,
                cw + 0.05,
                ch + 0.05
            );
        }
    }
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">range {:.4} .. {:.4}</text>",
        right,
        PANEL_HEIGHT - 5.0,
        vr.0,
        vr.1
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charts_are_well_formed() {
        let chart = Chart {
            title: "t".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            series: vec![Series {
                label: "s".into(),
                points: vec![(0.0, 0.0), (1.0, 2.0), (2.0, f64::NAN)],
            }],
        };
        let doc = line_charts(&[chart]);
        assert!(doc.starts_with("<svg") && doc.ends_with("</svg>\n"));
        assert_eq!(doc.matches("<polyline").count(), 1);
        assert!(!doc.contains("NaN"));
    }

    #[test]
    fn heat_map_has_one_cell_per_value() {
        let doc = heat_map(
            "h",
            "x",
            "y",
            &[0.0, 1.0],
            &[0.0, 1.0, 2.0],
            &[vec![0.0, 1.0, 2.0], vec![3.0, 4.0, 5.0]],
        );
        assert_eq!(doc.matches("<rect").count(), 2 + 6);
        assert_eq!(colour(0.0), "#281478");
        assert_eq!(colour(1.0), "#fae61e");
    }
}
