//! Minimal self-contained SVG emitters for the standard plots: probability
//! bar charts, events-over-time scatter with a fitted curve, value
//! histograms with an optional density overlay, and correlation heatmaps.
//! Output is deterministic: fixed float formatting, no timestamps.

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 56.0;

fn fmt(v: f64) -> String {
    format!("{v:.3}")
}

fn header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" \
         text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    )
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axis_labels(x_label: &str, y_label: &str) -> String {
    format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\">{}</text>\n\
         <text x=\"16\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
        MARGIN_L + (WIDTH - MARGIN_L - MARGIN_R) / 2.0,
        HEIGHT - 12.0,
        escape(x_label),
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    )
}

/// Bar chart of values over categorical x labels (e.g. star probabilities).
pub fn bar_chart(title: &str, labels: &[String], values: &[f64], y_label: &str) -> String {
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let max = values.iter().copied().fold(f64::MIN_POSITIVE, f64::max).max(1e-12);
    let slot = plot_w / values.len().max(1) as f64;
    let bar_w = slot * 0.7;

    let mut out = header(title);
    out.push_str(&axis_labels("rating", y_label));
    out.push_str(&format!(
        "<line x1=\"{MARGIN_L}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        HEIGHT - MARGIN_B,
        WIDTH - MARGIN_R,
        HEIGHT - MARGIN_B
    ));
    for (i, (&v, label)) in values.iter().zip(labels).enumerate() {
        let h = (v / max) * plot_h;
        let x = MARGIN_L + i as f64 * slot + (slot - bar_w) / 2.0;
        let y = HEIGHT - MARGIN_B - h;
        out.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#4878a8\"/>\n",
            fmt(x),
            fmt(y),
            fmt(bar_w),
            fmt(h)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" \
             text-anchor=\"middle\">{}</text>\n",
            fmt(x + bar_w / 2.0),
            HEIGHT - MARGIN_B + 18.0,
            escape(label)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" \
             text-anchor=\"middle\">{}</text>\n",
            fmt(x + bar_w / 2.0),
            fmt(y - 4.0),
            fmt(v)
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Scatter of (x, y) points with an optional fitted curve, e.g. binned
/// spike totals with their sine fit.
pub fn scatter_with_curve(
    title: &str,
    points: &[(f64, f64)],
    curve: Option<&[(f64, f64)]>,
    x_label: &str,
    y_label: &str,
) -> String {
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let all_y = points.iter().map(|p| p.1).chain(curve.into_iter().flatten().map(|p| p.1));
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for y in all_y {
        y_min = y_min.min(y);
        y_max = y_max.max(y);
    }
    if y_min == y_max {
        y_min -= 1.0;
        y_max += 1.0;
    }
    let x_min = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let x_max = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let to_px = |x: f64, y: f64| -> (f64, f64) {
        (
            MARGIN_L + (x - x_min) / (x_max - x_min).max(1e-12) * plot_w,
            HEIGHT - MARGIN_B - (y - y_min) / (y_max - y_min) * plot_h,
        )
    };

    let mut out = header(title);
    out.push_str(&axis_labels(x_label, y_label));
    out.push_str(&format!(
        "<line x1=\"{MARGIN_L}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n\
         <line x1=\"{MARGIN_L}\" y1=\"{MARGIN_T}\" x2=\"{MARGIN_L}\" y2=\"{}\" stroke=\"black\"/>\n",
        HEIGHT - MARGIN_B,
        WIDTH - MARGIN_R,
        HEIGHT - MARGIN_B,
        HEIGHT - MARGIN_B
    ));
    for &(x, y) in points {
        let (px, py) = to_px(x, y);
        out.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"2.2\" fill=\"#30506e\"/>\n",
            fmt(px),
            fmt(py)
        ));
    }
    if let Some(curve) = curve {
        let path: Vec<String> = curve
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| {
                let (px, py) = to_px(x, y);
                format!("{}{},{}", if i == 0 { "M" } else { "L" }, fmt(px), fmt(py))
            })
            .collect();
        out.push_str(&format!(
            "<path d=\"{}\" fill=\"none\" stroke=\"#c03030\" stroke-width=\"1.8\"/>\n",
            path.join(" ")
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Histogram of raw values over `bins` equal-width bins with an optional
/// overlay curve (e.g. a fitted log-normal density, scaled by the caller).
pub fn value_histogram(
    title: &str,
    values: &[f64],
    bins: usize,
    x_label: &str,
    overlay: Option<&[(f64, f64)]>,
) -> String {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = (hi - lo).max(1e-12);
    let mut counts = vec![0usize; bins.max(1)];
    for &v in values {
        let idx = (((v - lo) / span) * bins as f64).floor() as usize;
        counts[idx.min(bins - 1)] += 1;
    }
    // densities so an overlay density curve shares the y scale
    let norm = 1.0 / (values.len() as f64 * span / bins as f64);
    let points: Vec<(f64, f64)> = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| (lo + (i as f64 + 0.5) * span / bins as f64, c as f64 * norm))
        .collect();

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let y_max = points
        .iter()
        .map(|p| p.1)
        .chain(overlay.into_iter().flatten().map(|p| p.1))
        .fold(1e-12f64, f64::max);
    let to_px = |x: f64, y: f64| -> (f64, f64) {
        (
            MARGIN_L + (x - lo) / span * plot_w,
            HEIGHT - MARGIN_B - (y / y_max) * plot_h,
        )
    };

    let mut out = header(title);
    out.push_str(&axis_labels(x_label, "density"));
    out.push_str(&format!(
        "<line x1=\"{MARGIN_L}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        HEIGHT - MARGIN_B,
        WIDTH - MARGIN_R,
        HEIGHT - MARGIN_B
    ));
    let bar_w = plot_w / bins as f64;
    for (i, &(_, density)) in points.iter().enumerate() {
        let (x, y) = (MARGIN_L + i as f64 * bar_w, to_px(0.0, density).1);
        out.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#6898c8\" \
             stroke=\"white\" stroke-width=\"0.5\"/>\n",
            fmt(x),
            fmt(y),
            fmt(bar_w),
            fmt(HEIGHT - MARGIN_B - y)
        ));
    }
    if let Some(overlay) = overlay {
        let path: Vec<String> = overlay
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| {
                let (px, py) = to_px(x, y);
                format!("{}{},{}", if i == 0 { "M" } else { "L" }, fmt(px), fmt(py))
            })
            .collect();
        out.push_str(&format!(
            "<path d=\"{}\" fill=\"none\" stroke=\"#c03030\" stroke-width=\"1.8\"/>\n",
            path.join(" ")
        ));
    }
    // x-axis tick labels at the edges
    out.push_str(&format!(
        "<text x=\"{MARGIN_L}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
         text-anchor=\"middle\">{}</text>\n\
         <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
         text-anchor=\"middle\">{}</text>\n",
        HEIGHT - MARGIN_B + 16.0,
        fmt(lo),
        WIDTH - MARGIN_R,
        HEIGHT - MARGIN_B + 16.0,
        fmt(hi)
    ));
    out.push_str("</svg>\n");
    out
}

/// Correlation heatmap: square matrix in [-1, 1], blue-white-red. NaN
/// entries render gray.
pub fn heatmap(title: &str, labels: &[String], values: &[Vec<f64>]) -> String {
    let n = labels.len();
    let plot = (WIDTH - MARGIN_L - MARGIN_R).min(HEIGHT - MARGIN_T - MARGIN_B);
    let cell = plot / n as f64;
    let x0 = MARGIN_L;
    let y0 = MARGIN_T;

    let mut out = header(title);
    for (i, row) in values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let color = if v.is_nan() {
                "#b0b0b0".to_string()
            } else {
                // -1 -> blue, 0 -> white, +1 -> red
                let t = v.clamp(-1.0, 1.0);
                let (r, g, b) = if t >= 0.0 {
                    (255.0, 255.0 * (1.0 - t), 255.0 * (1.0 - t))
                } else {
                    (255.0 * (1.0 + t), 255.0 * (1.0 + t), 255.0)
                };
                format!("rgb({},{},{})", r.round(), g.round(), b.round())
            };
            let x = x0 + j as f64 * cell;
            let y = y0 + i as f64 * cell;
            out.push_str(&format!(
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" \
                 stroke=\"#404040\" stroke-width=\"0.5\"/>\n",
                fmt(x),
                fmt(y),
                fmt(cell),
                fmt(cell),
                color
            ));
            let text = if v.is_nan() { "n/a".to_string() } else { format!("{v:.2}") };
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" \
                 text-anchor=\"middle\">{}</text>\n",
                fmt(x + cell / 2.0),
                fmt(y + cell / 2.0 + 4.0),
                text
            ));
        }
    }
    for (i, label) in labels.iter().enumerate() {
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" \
             text-anchor=\"middle\">{}</text>\n",
            fmt(x0 + i as f64 * cell + cell / 2.0),
            fmt(y0 + n as f64 * cell + 18.0),
            escape(label)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" \
             text-anchor=\"end\">{}</text>\n",
            fmt(x0 - 8.0),
            fmt(y0 + i as f64 * cell + cell / 2.0 + 4.0),
            escape(label)
        ));
    }
    out.push_str("</svg>\n");
    out
}
