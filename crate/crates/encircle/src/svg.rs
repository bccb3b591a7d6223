//! Minimal deterministic SVG line plots.

use std::fmt::Write;

use crate::error::{CliError, CliResult};

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
    "#bcbd22", "#7f7f7f",
];

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Overrides the palette color.
    pub color: Option<String>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Series {
            label: label.into(),
            points,
            color: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Style {
    pub width: f64,
    pub height: f64,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Same scale on both axes, for planar trajectories.
    pub equal_aspect: bool,
}

impl Default for Style {
    fn default() -> Self {
        Style {
            width: 640.0,
            height: 480.0,
            title: String::new(),
            x_label: String::new(),
            y_label: String::new(),
            equal_aspect: false,
        }
    }
}

const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 120.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;

fn bounds(series: &[Series]) -> Option<(f64, f64, f64, f64)> {
    let mut it = series
        .iter()
        .flat_map(|s| s.points.iter())
        .filter(|(x, y)| x.is_finite() && y.is_finite());
    let &(x0, y0) = it.next()?;
    Some(it.fold((x0, x0, y0, y0), |(a, b, c, d), &(x, y)| {
        (a.min(x), b.max(x), c.min(y), d.max(y))
    }))
}

fn pad(lo: f64, hi: f64) -> (f64, f64) {
    if hi - lo > 1e-12 * (lo.abs() + hi.abs()).max(1e-300) {
        let m = 0.05 * (hi - lo);
        (lo - m, hi + m)
    } else {
        let m = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        (lo - m, hi + m)
    }
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let nice = if f < 1.5 {
        1.0
    } else if f < 3.0 {
        2.0
    } else if f < 7.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = nice_step(hi - lo);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step && out.len() < 20 {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders the series as polylines with axes, ticks and a legend.
pub fn emit_svg(series: &[Series], style: &Style) -> CliResult<String> {
    let (x_lo, x_hi, y_lo, y_hi) = bounds(series)
        .ok_or_else(|| CliError::Format("nothing to plot: no finite points".into()))?;
    let (mut x_lo, mut x_hi) = pad(x_lo, x_hi);
    let (mut y_lo, mut y_hi) = pad(y_lo, y_hi);
    let pw = style.width - MARGIN_L - MARGIN_R;
    let ph = style.height - MARGIN_T - MARGIN_B;
    if style.equal_aspect {
        let scale = ((x_hi - x_lo) / pw).max((y_hi - y_lo) / ph);
        let (cx, cy) = (0.5 * (x_lo + x_hi), 0.5 * (y_lo + y_hi));
        x_lo = cx - 0.5 * scale * pw;
        x_hi = cx + 0.5 * scale * pw;
        y_lo = cy - 0.5 * scale * ph;
        y_hi = cy + 0.5 * scale * ph;
    }
    let sx = |x: f64| MARGIN_L + (x - x_lo) / (x_hi - x_lo) * pw;
    let sy = |y: f64| MARGIN_T + (y_hi - y) / (y_hi - y_lo) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
        w = style.width,
        h = style.height
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        MARGIN_L, MARGIN_T, pw, ph
    );
    for t in ticks(x_lo, x_hi) {
        let x = sx(t);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            MARGIN_T,
            MARGIN_T + ph,
            MARGIN_T + ph + 16.0,
            fmt_tick(t)
        );
    }
    for t in ticks(y_lo, y_hi) {
        let y = sy(t);
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            MARGIN_L,
            MARGIN_L + pw,
            MARGIN_L - 6.0,
            y + 4.0,
            fmt_tick(t)
        );
    }
    if !style.title.is_empty() {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            MARGIN_L + pw / 2.0,
            esc(&style.title)
        );
    }
    if !style.x_label.is_empty() {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_L + pw / 2.0,
            style.height - 10.0,
            esc(&style.x_label)
        );
    }
    if !style.y_label.is_empty() {
        let (x, y) = (16.0, MARGIN_T + ph / 2.0);
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{y:.2}" text-anchor="middle" transform="rotate(-90 {x:.2} {y:.2})">{}</text>"#,
            esc(&style.y_label)
        );
    }
    for (k, ser) in series.iter().enumerate() {
        let color = ser
            .color
            .clone()
            .unwrap_or_else(|| PALETTE[k % PALETTE.len()].to_string());
        let pts: Vec<String> = ser
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        if pts.len() == 1 {
            let _ = writeln!(
                s,
                r#"<circle cx="{}" cy="{}" r="3" fill="{color}"/>"#,
                pts[0].split(',').next().unwrap_or("0"),
                pts[0].split(',').nth(1).unwrap_or("0")
            );
        } else if !pts.is_empty() {
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                pts.join(" ")
            );
        }
        let ly = MARGIN_T + 14.0 + 18.0 * k as f64;
        let lx = MARGIN_L + pw + 10.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            esc(&ser.label)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn fmt_tick(t: f64) -> String {
    if t == 0.0 {
        "0".into()
    } else if t.abs() >= 1e4 || t.abs() < 1e-3 {
        format!("{t:.1e}")
    } else {
        let s = format!("{t:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn polyline_points(svg: &str) -> Vec<(f64, f64)> {
        let start = svg.find("points=\"").unwrap() + 8;
        let end = start + svg[start..].find('"').unwrap();
        svg[start..end]
            .split(' ')
            .map(|p| {
                let (x, y) = p.split_once(',').unwrap();
                (x.parse().unwrap(), y.parse().unwrap())
            })
            .collect()
    }

    #[test]
    fn constant_series_is_horizontal_and_inside() {
        let ser = Series::new("c", (0..50).map(|k| (k as f64, 0.7)).collect());
        let style = Style::default();
        let svg = emit_svg(&[ser], &style).unwrap();
        let pts = polyline_points(&svg);
        assert!(pts.iter().all(|p| p.1 == pts[0].1));
        for (x, y) in pts {
            assert!(x >= MARGIN_L && x <= style.width - MARGIN_R);
            assert!(y >= MARGIN_T && y <= style.height - MARGIN_B);
        }
    }

    #[test]
    fn deterministic_bytes() {
        let ser = vec![
            Series::new("a", vec![(0.0, 1.0), (1.0, 2.0), (2.0, -1.0)]),
            Series::new("b<&>", vec![(0.5, 0.5)]),
        ];
        let style = Style {
            title: "t".into(),
            equal_aspect: true,
            ..Style::default()
        };
        assert_eq!(
            emit_svg(&ser, &style).unwrap(),
            emit_svg(&ser.clone(), &style).unwrap()
        );
        assert!(emit_svg(&ser, &style).unwrap().contains("b&lt;&amp;&gt;"));
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(emit_svg(&[], &Style::default()).is_err());
        assert!(emit_svg(&[Series::new("e", vec![])], &Style::default()).is_err());
        assert!(emit_svg(
            &[Series::new("n", vec![(f64::NAN, 1.0)])],
            &Style::default()
        )
        .is_err());
    }

    #[test]
    fn circle_stays_round_with_equal_aspect() {
        let r = 1.5;
        let pts: Vec<(f64, f64)> = (0..=200)
            .map(|k| k as f64 * std::f64::consts::TAU / 200.0)
            .map(|a| (r * a.cos(), r * a.sin()))
            .collect();
        let svg = emit_svg(
            &[Series::new("loop", pts)],
            &Style {
                equal_aspect: true,
                ..Style::default()
            },
        )
        .unwrap();
        let p = polyline_points(&svg);
        let (cx, cy) = (
            p.iter().map(|q| q.0).sum::<f64>() / p.len() as f64,
            p.iter().map(|q| q.1).sum::<f64>() / p.len() as f64,
        );
        let radii: Vec<f64> = p
            .iter()
            .map(|q| ((q.0 - cx).powi(2) + (q.1 - cy).powi(2)).sqrt())
            .collect();
        let (lo, hi) = radii
            .iter()
            .fold((f64::MAX, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        assert!(hi - lo < 0.05 * hi, "{lo} {hi}");
        assert!((p[0].0 - p[200].0).abs() < 0.02 && (p[0].1 - p[200].1).abs() < 0.02);
    }
}
