//! Static SVG bar charts for histograms.

use std::fmt::Write;

use crate::metrics::Histogram;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 40.0;

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders every bin between the lowest and highest populated bin, empty bins included.
pub fn histogram_svg(hist: &Histogram, title: &str) -> String {
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="20" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let baseline = HEIGHT - MARGIN;
    let _ = writeln!(
        svg,
        r#"<line x1="{MARGIN}" y1="{baseline}" x2="{}" y2="{baseline}" stroke="black"/>"#,
        WIDTH - MARGIN
    );

    if let (Some((&lo, _)), Some((&hi, _))) = (hist.bins.first_key_value(), hist.bins.last_key_value()) {
        let slots = (hi - lo + 1) as f64;
        let slot = (WIDTH - 2.0 * MARGIN) / slots;
        let max = hist.bins.values().copied().max().unwrap_or(1).max(1) as f64;
        let plot_height = HEIGHT - 2.0 * MARGIN - 10.0;
        for (&i, &count) in &hist.bins {
            let h = plot_height * count as f64 / max;
            let x = MARGIN + (i - lo) as f64 * slot;
            let _ = writeln!(
                svg,
                r#"<rect x="{x:.2}" y="{:.2}" width="{:.2}" height="{h:.2}" fill="steelblue"><title>{}: {count}</title></rect>"#,
                baseline - h,
                (slot * 0.9).max(0.5),
                hist.bin_center(i)
            );
        }
        for (i, anchor) in [(lo, "start"), (hi, "end")] {
            let x = MARGIN + (i - lo) as f64 * slot + if anchor == "end" { slot } else { 0.0 };
            let _ = writeln!(
                svg,
                r#"<text x="{x:.2}" y="{}" text-anchor="{anchor}" font-family="sans-serif" font-size="11">{}</text>"#,
                baseline + 15.0,
                hist.bin_center(i)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{MARGIN}" y="{}" font-family="sans-serif" font-size="11">max {max}</text>"#,
            MARGIN - 5.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}
