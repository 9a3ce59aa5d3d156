//! Speedup-versus-k line chart, one polyline per distribution.

use std::fmt::Write;

use crate::bench::BenchResult;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 130.0;
const MARGIN_Y: f64 = 40.0;
const COLORS: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];

/// Plots `speedup` against `k` for rows with `banks == banks`. Rows are
/// grouped by distribution in first-seen order.
pub fn speedup_chart(rows: &[BenchResult], banks: usize) -> String {
    let mut series: Vec<(&str, Vec<(f64, f64)>)> = Vec::new();
    for r in rows.iter().filter(|r| r.banks == banks) {
        let Some(k) = r.k else { continue };
        let point = (k as f64, r.speedup);
        match series.iter_mut().find(|(d, _)| *d == r.dist) {
            Some((_, pts)) => pts.push(point),
            None => series.push((&r.dist, vec![point])),
        }
    }

    let all = series.iter().flat_map(|(_, p)| p.iter());
    let (k_min, k_max) = all
        .clone()
        .fold((f64::MAX, f64::MIN), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)));
    let y_max = all.fold(1.0f64, |hi, p| hi.max(p.1)).ceil();
    let (k_min, k_max) = if k_min > k_max {
        (0.0, 1.0)
    } else {
        (k_min, k_max.max(k_min + 1.0))
    };

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - 2.0 * MARGIN_Y;
    let x = |k: f64| MARGIN_LEFT + (k - k_min) / (k_max - k_min) * plot_w;
    let y = |s: f64| MARGIN_Y + plot_h - s / y_max * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="20" text-anchor="middle">Speedup over baseline vs state records k (banks={banks})</text>"#,
        MARGIN_LEFT + plot_w / 2.0
    );

    // Axes, ticks and a dashed line at speedup 1.
    let (x0, y0) = (MARGIN_LEFT, MARGIN_Y + plot_h);
    let _ = writeln!(
        svg,
        r#"<line x1="{x0}" y1="{y0}" x2="{}" y2="{y0}" stroke="black"/>"#,
        x0 + plot_w
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{x0}" y1="{MARGIN_Y}" x2="{x0}" y2="{y0}" stroke="black"/>"#
    );
    let mut k = k_min;
    while k <= k_max + 1e-9 {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{k}</text>"#,
            x(k),
            y0 + 16.0
        );
        k += 1.0;
    }
    let steps = y_max as usize;
    for i in 0..=steps {
        let s = i as f64;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.1}" text-anchor="end">{s:.0}</text>"#,
            x0 - 6.0,
            y(s) + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r##"<line x1="{x0}" y1="{:.1}" x2="{}" y2="{:.1}" stroke="#999" stroke-dasharray="4 3"/>"##,
        y(1.0),
        x0 + plot_w,
        y(1.0)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">k</text>"#,
        x0 + plot_w / 2.0,
        HEIGHT - 8.0
    );

    for (i, (dist, pts)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let points: Vec<String> = pts.iter().map(|&(k, s)| format!("{:.1},{:.1}", x(k), y(s))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            points.join(" ")
        );
        for &(k, s) in pts {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}"/>"#,
                x(k),
                y(s)
            );
        }
        let ly = MARGIN_Y + 20.0 * i as f64;
        let lx = WIDTH - MARGIN_RIGHT + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(svg, r#"<text x="{}" y="{}">{dist}</text>"#, lx + 26.0, ly + 4.0);
    }
    svg.push_str("</svg>\n");
    svg
}
