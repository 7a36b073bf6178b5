//! Minimal SVG line charts for risk curves: direct geometry emission,
//! no plotting dependency.
//!
//! Convention matches the published figures: solid line for the Pearson
//! correlation network, dashed line for the sign similarity network.

use std::fmt::Write;

use crate::risk::{ProcedureKind, RiskCurve};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 48.0;
const MARGIN_BOTTOM: f64 = 56.0;

/// Renders curves as a standalone SVG document. The x axis spans `[0, 1]`
/// (the threshold), the y axis spans `[0, max risk]` with rounded ticks.
pub fn risk_curves_svg(curves: &[RiskCurve], title: &str) -> String {
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let max_risk = curves
        .iter()
        .map(RiskCurve::max_risk)
        .fold(0.0f64, f64::max)
        .max(1e-9);
    let y_step = nice_step(max_risk / 5.0);
    let y_max = (max_risk / y_step).ceil() * y_step;

    let x_of = |p0: f64| MARGIN_LEFT + p0 * plot_w;
    let y_of = |risk: f64| MARGIN_TOP + (1.0 - risk / y_max) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        escape(title)
    );

    // axes
    let x0 = MARGIN_LEFT;
    let y0 = MARGIN_TOP + plot_h;
    let _ = writeln!(
        svg,
        r#"<line x1="{x0:.1}" y1="{y0:.1}" x2="{:.1}" y2="{y0:.1}" stroke="black" stroke-width="1"/>"#,
        x0 + plot_w
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{x0:.1}" y1="{y0:.1}" x2="{x0:.1}" y2="{MARGIN_TOP:.1}" stroke="black" stroke-width="1"/>"#
    );

    // x ticks at 0, 0.2, ..., 1
    for k in 0..=5 {
        let p0 = k as f64 / 5.0;
        let x = x_of(p0);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.1}" y1="{y0:.1}" x2="{x:.1}" y2="{:.1}" stroke="black" stroke-width="1"/>"#,
            y0 + 6.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle">{p0}</text>"#,
            y0 + 20.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle">threshold p0</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 14.0
    );

    // y ticks
    let mut y_tick = 0.0;
    while y_tick <= y_max + 1e-9 {
        let y = y_of(y_tick);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{y:.1}" x2="{x0:.1}" y2="{y:.1}" stroke="black" stroke-width="1"/>"#,
            x0 - 6.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="end">{}</text>"#,
            x0 - 10.0,
            y + 4.0,
            trim_tick(y_tick)
        );
        y_tick += y_step;
    }
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 18 {:.1})">risk</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );

    // curves: solid Pearson, dashed sign
    for curve in curves {
        let dash = match curve.procedure {
            ProcedureKind::Pearson => "",
            ProcedureKind::Sign => r#" stroke-dasharray="7,5""#,
        };
        let points: String = curve
            .points
            .iter()
            .map(|p| format!("{:.2},{:.2}", x_of(p.p0), y_of(p.risk)))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="black" stroke-width="1.5"{dash} points="{points}"/>"#
        );
    }

    // legend
    let lx = MARGIN_LEFT + plot_w - 226.0;
    let mut ly = MARGIN_TOP + 14.0;
    for (kind, label) in [
        (ProcedureKind::Pearson, "Pearson correlation network"),
        (ProcedureKind::Sign, "sign similarity network"),
    ] {
        if !curves.iter().any(|c| c.procedure == kind) {
            continue;
        }
        let dash = match kind {
            ProcedureKind::Pearson => "",
            ProcedureKind::Sign => r#" stroke-dasharray="7,5""#,
        };
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="black" stroke-width="1.5"{dash}/>"#,
            lx + 34.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12">{label}</text>"#,
            lx + 42.0,
            ly + 4.0
        );
        ly += 18.0;
    }

    svg.push_str("</svg>\n");
    svg
}

/// Rounds a raw step to 1, 2 or 5 times a power of ten.
fn nice_step(raw: f64) -> f64 {
    let raw = raw.max(1e-12);
    let mag = 10f64.powf(raw.log10().floor());
    let frac = raw / mag;
    let nice = if frac <= 1.0 {
        1.0
    } else if frac <= 2.0 {
        2.0
    } else if frac <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn trim_tick(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::risk::RiskPoint;

    fn curve(kind: ProcedureKind, risks: &[f64]) -> RiskCurve {
        RiskCurve {
            procedure: kind,
            points: risks
                .iter()
                .enumerate()
                .map(|(k, &r)| RiskPoint {
                    p0: 0.1 + 0.2 * k as f64,
                    risk: r,
                    stderr: 0.0,
                })
                .collect(),
            replications: 10,
            failures: 0,
            family: "gaussian".into(),
            sample_size: 100,
            seed: 0,
        }
    }

    #[test]
    fn svg_contains_both_line_styles() {
        let curves = [
            curve(ProcedureKind::Pearson, &[1.0, 4.0, 2.0]),
            curve(ProcedureKind::Sign, &[2.0, 3.0, 1.0]),
        ];
        let svg = risk_curves_svg(&curves, "demo & test");
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        // sign curve dashed, pearson solid
        assert_eq!(svg.matches("stroke-dasharray").count(), 2); // curve + legend
        assert!(svg.contains("demo &amp; test"));
        assert!(svg.contains("Pearson correlation network"));
        assert!(svg.contains("sign similarity network"));
    }

    #[test]
    fn nice_steps() {
        assert_eq!(nice_step(0.9), 1.0);
        assert_eq!(nice_step(1.4), 2.0);
        assert_eq!(nice_step(3.3), 5.0);
        assert_eq!(nice_step(7.0), 10.0);
        assert_eq!(nice_step(23.0), 50.0);
    }
}
