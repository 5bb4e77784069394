//! Minimal self-contained SVG line plot for the sweep results. One series:
//! mean absolute error against dimension, with a one-standard-deviation
//! band. Every plotted point carries the exact summary value it represents
//! in data attributes, so the plot can be checked against the CSV.

/// One plotted point; `mean_text` must be the very string written to the
/// summary row so the plot and the CSV cannot drift apart.
pub struct PlotPoint {
    pub dim: usize,
    pub mean: f64,
    pub std: f64,
    pub mean_text: String,
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const ML: f64 = 70.0;
const MR: f64 = 20.0;
const MT: f64 = 40.0;
const MB: f64 = 50.0;

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 0.01 && v.abs() < 10_000.0 {
        format!("{v:.3}")
    } else {
        format!("{v:.2e}")
    }
}

/// Renders the plot. Points must be in increasing dimension order.
pub fn render(points: &[PlotPoint], title: &str) -> String {
    let xmin = points.first().map_or(0.0, |p| p.dim as f64);
    let xmax = points.last().map_or(1.0, |p| p.dim as f64);
    let xspan = if xmax > xmin { xmax - xmin } else { 1.0 };
    let ymax = points
        .iter()
        .map(|p| p.mean + p.std)
        .fold(0.0f64, f64::max)
        .max(1e-12)
        * 1.05;
    let x = |d: f64| ML + (d - xmin) / xspan * (W - ML - MR);
    let y = |v: f64| H - MB - (v / ymax) * (H - MT - MB);

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    s.push_str(&format!(
        "  <title>{title}</title>\n  <rect x=\"0\" y=\"0\" width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
    ));
    s.push_str(&format!(
        "  <text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{title}</text>\n",
        W / 2.0
    ));

    // One-standard-deviation band: upper edge left to right, lower edge back.
    if points.len() > 1 {
        let mut path = String::from("  <polygon fill=\"#9ecae1\" fill-opacity=\"0.45\" stroke=\"none\" points=\"");
        for p in points {
            path.push_str(&format!("{:.2},{:.2} ", x(p.dim as f64), y(p.mean + p.std)));
        }
        for p in points.iter().rev() {
            path.push_str(&format!("{:.2},{:.2} ", x(p.dim as f64), y((p.mean - p.std).max(0.0))));
        }
        path.push_str("\"/>\n");
        s.push_str(&path);
    }

    // Mean line and its points.
    if points.len() > 1 {
        let mut line = String::from("  <polyline fill=\"none\" stroke=\"#2171b5\" stroke-width=\"2\" points=\"");
        for p in points {
            line.push_str(&format!("{:.2},{:.2} ", x(p.dim as f64), y(p.mean)));
        }
        line.push_str("\"/>\n");
        s.push_str(&line);
    }
    for p in points {
        s.push_str(&format!(
            "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.5\" fill=\"#2171b5\" data-dim=\"{}\" data-mean=\"{}\"/>\n",
            x(p.dim as f64),
            y(p.mean),
            p.dim,
            p.mean_text
        ));
    }

    // Axes.
    s.push_str(&format!(
        "  <line x1=\"{ML}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        H - MB,
        W - MR,
        H - MB
    ));
    s.push_str(&format!(
        "  <line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{}\" stroke=\"black\"/>\n",
        H - MB
    ));
    for p in points {
        let px = x(p.dim as f64);
        s.push_str(&format!(
            "  <line x1=\"{px:.2}\" y1=\"{}\" x2=\"{px:.2}\" y2=\"{}\" stroke=\"black\"/>\n",
            H - MB,
            H - MB + 5.0
        ));
        s.push_str(&format!(
            "  <text x=\"{px:.2}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
            H - MB + 20.0,
            p.dim
        ));
    }
    for k in 0..=4 {
        let v = ymax * k as f64 / 4.0;
        let py = y(v);
        s.push_str(&format!(
            "  <line x1=\"{}\" y1=\"{py:.2}\" x2=\"{ML}\" y2=\"{py:.2}\" stroke=\"black\"/>\n",
            ML - 5.0
        ));
        s.push_str(&format!(
            "  <text x=\"{}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">{}</text>\n",
            ML - 9.0,
            py + 4.0,
            fmt_tick(v)
        ));
    }
    s.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">dimension</text>\n",
        ML + (W - ML - MR) / 2.0,
        H - 8.0
    ));
    s.push_str(&format!(
        "  <text x=\"16\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">mean absolute error</text>\n",
        MT + (H - MT - MB) / 2.0,
        MT + (H - MT - MB) / 2.0
    ));
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plotted_points_carry_their_summary_values() {
        let points = vec![
            PlotPoint { dim: 5, mean: 0.2, std: 0.05, mean_text: "0.200000000000".into() },
            PlotPoint { dim: 10, mean: 0.1, std: 0.02, mean_text: "0.100000000000".into() },
        ];
        let svg = render(&points, "test sweep");
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("data-dim=\"5\" data-mean=\"0.200000000000\""));
        assert!(svg.contains("data-dim=\"10\" data-mean=\"0.100000000000\""));
        assert!(svg.contains("<polyline"));
        assert!(svg.contains("<polygon"));
    }

    #[test]
    fn single_point_renders_without_lines() {
        let points = vec![PlotPoint {
            dim: 8,
            mean: 0.0,
            std: 0.0,
            mean_text: "0.000000000000".into(),
        }];
        let svg = render(&points, "degenerate");
        assert!(svg.contains("data-dim=\"8\""));
        assert!(!svg.contains("<polyline"));
    }
}
