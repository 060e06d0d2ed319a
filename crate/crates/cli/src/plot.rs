//! Static SVG 1.1 chart of bound curves against the truth, log-scaled in
//! the value. Output depends only on the inputs.

use std::fmt::Write;

use semibound_core::{BoundCurve, Error, Result};

const W: f64 = 720.0;
const H: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

/// `curve` at the times of `grid`, interpolated linearly in `(t, ln value)`.
/// Grid times outside the curve's range give `None`.
pub fn resample_log(curve: &BoundCurve, grid: &[f64]) -> Vec<Option<f64>> {
    let (t, v) = (&curve.t, &curve.values);
    grid.iter()
        .map(|&x| {
            if t.is_empty() || x < t[0] || x > t[t.len() - 1] {
                return None;
            }
            let k = t.partition_point(|&s| s < x);
            if t[k] == x {
                return Some(v[k]);
            }
            let u = (x - t[k - 1]) / (t[k] - t[k - 1]);
            Some((v[k - 1].ln() * (1.0 - u) + v[k].ln() * u).exp())
        })
        .collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Chart of `truth` and every curve in `curves`, resampled to the truth grid.
pub fn plot_svg(curves: &[BoundCurve], truth: &BoundCurve) -> Result<String> {
    if curves.is_empty() {
        return Err(Error::Domain("nothing to plot: the curve list is empty".into()));
    }
    let grid = &truth.t;
    let mut series: Vec<(String, &str, Vec<Option<f64>>)> =
        vec![("truth".into(), "#000000", truth.values.iter().map(|&v| Some(v)).collect())];
    for (k, c) in curves.iter().enumerate() {
        series.push((c.method.tag().to_string(), PALETTE[k % PALETTE.len()], resample_log(c, grid)));
    }

    let logs: Vec<f64> = series
        .iter()
        .flat_map(|s| s.2.iter().flatten())
        .filter(|v| **v > 0.0 && v.is_finite())
        .map(|v| v.log10())
        .collect();
    if logs.is_empty() {
        return Err(Error::Domain("nothing to plot: no positive finite values".into()));
    }
    let mut y_lo = logs.iter().cloned().fold(f64::INFINITY, f64::min).floor();
    let mut y_hi = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max).ceil();
    if y_hi <= y_lo {
        y_lo -= 1.0;
        y_hi += 1.0;
    }
    let (t_lo, t_hi) = (grid[0], grid[grid.len() - 1]);
    let t_span = if t_hi > t_lo { t_hi - t_lo } else { 1.0 };
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let px = |t: f64| LEFT + (t - t_lo) / t_span * pw;
    let py = |v: f64| TOP + (y_hi - v.log10()) / (y_hi - y_lo) * ph;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#444444"/>"##
    );

    // decade ticks, thinned to at most ten labels
    let decades = (y_hi - y_lo) as i64;
    let step = (decades / 10 + 1).max(1);
    let mut d = y_lo as i64;
    while d <= y_hi as i64 {
        let y = TOP + (y_hi - d as f64) / (y_hi - y_lo) * ph;
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
            LEFT + pw
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">1e{d}</text>"#,
            LEFT - 6.0,
            y + 4.0
        );
        d += step;
    }
    for k in 0..=4 {
        let t = t_lo + t_span * k as f64 / 4.0;
        let x = px(t);
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            TOP + ph + 16.0,
            fmt_tick(t)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">t</text>"#,
        LEFT + pw / 2.0,
        H - 12.0
    );

    for (k, (label, color, vals)) in series.iter().enumerate() {
        let pts: Vec<String> = grid
            .iter()
            .zip(vals)
            .filter_map(|(&t, v)| v.filter(|v| *v > 0.0 && v.is_finite()).map(|v| (t, v)))
            .map(|(t, v)| format!("{:.2},{:.2}", px(t), py(v)))
            .collect();
        let dash = if k == 0 { "" } else { r#" stroke-dasharray="6,3""# };
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
            pts.join(" ")
        );
        let ly = TOP + 14.0 + 18.0 * k as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="1.5"{dash}/>"#,
            lx + 24.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12">{}</text>"#,
            lx + 30.0,
            ly + 4.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn fmt_tick(t: f64) -> String {
    let r = (t * 1000.0).round() / 1000.0;
    format!("{r}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use semibound_core::BoundMethod;

    fn curve(t: &[f64], v: &[f64], m: BoundMethod) -> BoundCurve {
        BoundCurve::new(t.to_vec(), v.to_vec(), m).unwrap()
    }

    #[test]
    fn resampling_is_linear_in_log_value() {
        let c = curve(&[1.0, 3.0], &[1.0, 100.0], BoundMethod::Gps);
        let r = resample_log(&c, &[0.5, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(r[0], None);
        assert_eq!(r[1], Some(1.0));
        assert!((r[2].unwrap() - 10.0).abs() < 1e-12);
        assert_eq!(r[3], Some(100.0));
        assert_eq!(r[4], None);
    }

    #[test]
    fn one_bound_gives_two_polylines() {
        let truth = curve(&[1.0, 2.0, 4.0], &[1.0, 0.5, 0.1], BoundMethod::Truth);
        let gps = curve(&[1.0, 4.0], &[2.0, 0.3], BoundMethod::Gps);
        let svg = plot_svg(&[gps], &truth).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains(">truth</text>") && svg.contains(">gps</text>"));
        assert!(svg.starts_with("<?xml") && svg.contains(r#"version="1.1""#));
    }

    #[test]
    fn empty_list_is_a_domain_error() {
        let truth = curve(&[1.0], &[1.0], BoundMethod::Truth);
        assert!(matches!(plot_svg(&[], &truth), Err(Error::Domain(_))));
    }

    #[test]
    fn output_is_deterministic() {
        let truth = curve(&[0.5, 1.0, 8.0], &[1.0, 0.7, 1e-3], BoundMethod::Truth);
        let b = curve(&[0.5, 2.0, 8.0], &[3.0, 1.0, 1e-2], BoundMethod::Propa);
        let a1 = plot_svg(std::slice::from_ref(&b), &truth).unwrap();
        let a2 = plot_svg(&[b], &truth).unwrap();
        assert_eq!(a1.as_bytes(), a2.as_bytes());
    }
}
