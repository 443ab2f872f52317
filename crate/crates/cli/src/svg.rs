// SPDX-License-Identifier: Apache-2.0

//! Deterministic SVG output. All coordinates are printed with two decimals.

use std::fmt::Write;

use orbitforge_core::{ComplexPoint, OrbitSequence, PiecewiseQCMap, Tail, ToleranceConfig};
use rug::Float;
use serde::Deserialize;

use crate::report::Verdict;

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Style {
    pub width: f64,
    pub height: f64,
    pub background: String,
    pub point: String,
    pub arrow: String,
    pub label: String,
    pub inset: String,
    pub radius: f64,
}

impl Default for Style {
    fn default() -> Self {
        Style {
            width: 760.0,
            height: 480.0,
            background: "#ffffff".into(),
            point: "#1f77b4".into(),
            arrow: "#7f7f7f".into(),
            label: "#333333".into(),
            inset: "#d62728".into(),
            radius: 4.0,
        }
    }
}

pub struct OrbitPlot {
    pub svg: String,
    pub glyphs: usize,
    pub arrows: usize,
}

fn log2_abs(z: &ComplexPoint) -> Option<f64> {
    let r = z.abs();
    (!r.is_zero()).then(|| Float::with_val(64, r.log2_ref()).to_f64())
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(out: &mut String, width: f64, height: f64, background: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="{background}"/>"#);
}

fn arrow_marker(out: &mut String, id: &str, color: &str) {
    let _ = writeln!(
        out,
        r#"<defs><marker id="{id}" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="6" markerHeight="6" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="{color}"/></marker></defs>"#
    );
}

/// Orbit picture: one glyph per distinct point, an arrow for every known step
/// `z_n → z_{n+1}`, index labels and a log-scale modulus inset.
pub fn plot_orbit(seq: &OrbitSequence, style: &Style, tol: &ToleranceConfig, verdict: Verdict) -> OrbitPlot {
    let pts = seq.points();
    let eq_sq = Float::with_val(64, tol.eq_tol.square_ref());
    let glyph_of: Vec<usize> = (0..pts.len())
        .map(|n| (0..=n).find(|&p| (&pts[p] - &pts[n]).abs_sq() <= eq_sq).unwrap_or(n))
        .collect();
    let mut steps: Vec<(usize, usize)> = (0..pts.len().saturating_sub(1)).map(|n| (n, n + 1)).collect();
    if let Some(Tail::PeriodicFrom { index, period }) = seq.tail() {
        let last = pts.len() - 1;
        if *period > 0 && last + 1 >= index + period {
            steps.push((last, last + 1 - period));
        }
    }

    let xy: Vec<(f64, f64)> = pts.iter().map(ComplexPoint::to_f64).collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in &xy {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-300);
    let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
    let main_w = style.width * 0.62;
    let main_h = style.height - 80.0;
    let scale = 0.9 * main_w.min(main_h) / span;
    let to_screen = |(x, y): (f64, f64)| (40.0 + main_w / 2.0 + (x - cx) * scale, 50.0 + main_h / 2.0 - (y - cy) * scale);

    let mut out = String::new();
    header(&mut out, style.width, style.height, &style.background);
    arrow_marker(&mut out, "arrowhead", &style.arrow);
    let _ = writeln!(
        out,
        r#"<text class="title" x="20" y="24" font-family="sans-serif" font-size="15" fill="{}">orbit: {} points, verdict: {}</text>"#,
        style.label,
        pts.len(),
        verdict.label()
    );

    let r = style.radius;
    for &(a, b) in &steps {
        let (ax, ay) = to_screen(xy[a]);
        let (bx, by) = to_screen(xy[b]);
        let (dx, dy) = (bx - ax, by - ay);
        let len = dx.hypot(dy);
        let (sx, sy, ex, ey) = if len > 2.5 * r {
            let (ux, uy) = (dx / len, dy / len);
            (ax + ux * r, ay + uy * r, bx - ux * r, by - uy * r)
        } else {
            (ax, ay, bx, by)
        };
        let _ = writeln!(
            out,
            r#"<line class="arrow" data-from="{a}" data-to="{b}" x1="{sx:.2}" y1="{sy:.2}" x2="{ex:.2}" y2="{ey:.2}" stroke="{}" stroke-width="1.2" marker-end="url(#arrowhead)"/>"#,
            style.arrow
        );
    }
    let mut glyphs = 0;
    for (n, &g) in glyph_of.iter().enumerate() {
        if g != n {
            continue;
        }
        glyphs += 1;
        let (x, y) = to_screen(xy[n]);
        let members: Vec<String> = (0..pts.len()).filter(|&m| glyph_of[m] == n).map(|m| m.to_string()).collect();
        let _ = writeln!(
            out,
            r#"<circle class="point" cx="{x:.2}" cy="{y:.2}" r="{r:.2}" fill="{}"/>"#,
            style.point
        );
        let _ = writeln!(
            out,
            r#"<text class="index" x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" fill="{}">{}</text>"#,
            x + r + 2.0,
            y - r - 2.0,
            style.label,
            members.join(",")
        );
    }

    // Inset: log10 |z_n| against n.
    let ix0 = 40.0 + main_w + 30.0;
    let iw = style.width - ix0 - 20.0;
    let (iy0, ih) = (50.0, style.height * 0.45);
    let logs: Vec<(usize, f64)> = pts
        .iter()
        .enumerate()
        .filter_map(|(n, z)| log2_abs(z).map(|l| (n, l * std::f64::consts::LOG10_2)))
        .collect();
    let _ = writeln!(
        out,
        r#"<rect class="inset" x="{ix0:.2}" y="{iy0:.2}" width="{iw:.2}" height="{ih:.2}" fill="none" stroke="{}"/>"#,
        style.label
    );
    let _ = writeln!(
        out,
        r#"<text class="inset-label" x="{ix0:.2}" y="{:.2}" font-family="sans-serif" font-size="11" fill="{}">log10 |z_n| vs n</text>"#,
        iy0 - 6.0,
        style.label
    );
    if !logs.is_empty() {
        let lmin = logs.iter().map(|p| p.1).fold(f64::MAX, f64::min);
        let lmax = logs.iter().map(|p| p.1).fold(f64::MIN, f64::max);
        let lspan = (lmax - lmin).max(1e-9);
        let nmax = (pts.len().max(2) - 1) as f64;
        let coords: Vec<String> = logs
            .iter()
            .map(|&(n, l)| {
                let x = ix0 + 8.0 + (iw - 16.0) * n as f64 / nmax;
                let y = iy0 + 8.0 + (ih - 16.0) * (lmax - l) / lspan;
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline class="modulus" points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            coords.join(" "),
            style.inset
        );
        let _ = writeln!(
            out,
            r#"<text class="inset-range" x="{ix0:.2}" y="{:.2}" font-family="sans-serif" font-size="10" fill="{}">{:.3e} .. {:.3e}</text>"#,
            iy0 + ih + 14.0,
            style.label,
            lmax,
            lmin
        );
    }
    out.push_str("</svg>\n");
    OrbitPlot {
        svg: out,
        glyphs,
        arrows: steps.len(),
    }
}

pub struct QcPlot {
    pub svg: String,
    pub circles: usize,
    pub correspondences: usize,
    pub bars: usize,
}

/// Domain annuli (left), image circles (middle) joined by sampled point
/// correspondences, and K per annulus (right). Radii are drawn on a log2
/// scale; angles are exact.
pub fn plot_qc(map: &PiecewiseQCMap, samples: usize, verdict: Verdict) -> QcPlot {
    let style = Style::default();
    let (width, height) = (960.0, 420.0);
    let pts = map.sequence().points();
    let logs: Vec<f64> = pts.iter().map(|z| log2_abs(z).unwrap_or(f64::MIN)).collect();
    let lmax = logs[0];
    let lmin = *logs.last().unwrap();
    let lspan = (lmax - lmin).max(1e-9);
    let radius_px = 150.0;
    let display = |l: f64| radius_px * (0.12 + 0.88 * (l - lmin) / lspan);
    let centres = [(200.0, 230.0), (560.0, 230.0)];
    let place = |panel: usize, l: f64, angle: f64| {
        let (cx, cy) = centres[panel];
        let r = display(l.max(lmin));
        (cx + r * angle.cos(), cy - r * angle.sin())
    };

    let mut out = String::new();
    header(&mut out, width, height, &style.background);
    let _ = writeln!(
        out,
        r#"<text class="title" x="20" y="24" font-family="sans-serif" font-size="15" fill="{}">piecewise map: {} annuli, K_global = {:.6}, verdict: {}</text>"#,
        style.label,
        map.annuli().len(),
        map.k_global(),
        verdict.label()
    );
    for (panel, caption) in [(0, "domain annuli"), (1, "image circles")] {
        let (cx, _) = centres[panel];
        let _ = writeln!(
            out,
            r#"<text class="panel-label" x="{:.2}" y="58" font-family="sans-serif" font-size="12" fill="{}">{caption}</text>"#,
            cx - 40.0,
            style.label
        );
    }
    let mut circles = 0;
    for (n, &l) in logs.iter().enumerate() {
        let (cx, cy) = centres[0];
        let _ = writeln!(
            out,
            r#"<circle class="annulus" data-n="{n}" cx="{cx:.2}" cy="{cy:.2}" r="{:.2}" fill="none" stroke="{}"/>"#,
            display(l),
            style.point
        );
        circles += 1;
        if n >= 1 {
            let (cx, cy) = centres[1];
            let _ = writeln!(
                out,
                r#"<circle class="image-circle" data-n="{}" cx="{cx:.2}" cy="{cy:.2}" r="{:.2}" fill="none" stroke="{}" stroke-dasharray="4 3"/>"#,
                n - 1,
                display(l),
                style.inset
            );
            circles += 1;
        }
    }
    let mut correspondences = 0;
    for n in 0..map.annuli().len() {
        let mid = (logs[n] + logs[n + 1]) / 2.0;
        let prec = map.sequence().precision_bits();
        let r = Float::with_val(prec, mid).exp2();
        for k in 0..samples {
            let angle = std::f64::consts::TAU * (k as f64 + 0.5) / samples as f64 - std::f64::consts::PI;
            let z = ComplexPoint::polar(&r, &Float::with_val(prec, angle));
            let Ok(img) = map.evaluate(&z) else { continue };
            let Some(il) = log2_abs(&img) else { continue };
            let ia = img.arg().to_f64();
            let (ax, ay) = place(0, mid, angle);
            let (bx, by) = place(1, il, ia);
            let _ = writeln!(
                out,
                r#"<line class="correspondence" data-n="{n}" x1="{ax:.2}" y1="{ay:.2}" x2="{bx:.2}" y2="{by:.2}" stroke="{}" stroke-opacity="0.35"/>"#,
                style.arrow
            );
            let _ = writeln!(out, r#"<circle class="sample" cx="{ax:.2}" cy="{ay:.2}" r="2" fill="{}"/>"#, style.point);
            let _ = writeln!(out, r#"<circle class="sample-image" cx="{bx:.2}" cy="{by:.2}" r="2" fill="{}"/>"#, style.inset);
            correspondences += 1;
        }
    }

    // K per annulus.
    let per = &map.dilatation().per_annulus;
    let (bx0, by0, bw, bh) = (760.0, 70.0, 180.0, 300.0);
    let kmax = per.iter().map(|a| a.k).fold(1.0, f64::max);
    let _ = writeln!(
        out,
        r#"<text class="panel-label" x="{bx0:.2}" y="58" font-family="sans-serif" font-size="12" fill="{}">K per annulus</text>"#,
        style.label
    );
    let slot = bw / per.len().max(1) as f64;
    for (i, a) in per.iter().enumerate() {
        let h = bh * a.k / kmax;
        let x = bx0 + i as f64 * slot;
        let _ = writeln!(
            out,
            r#"<rect class="k-bar" data-n="{}" data-k="{:.6}" x="{x:.2}" y="{:.2}" width="{:.2}" height="{h:.2}" fill="{}"/>"#,
            a.n,
            a.k,
            by0 + bh - h,
            (slot * 0.8).max(1.0),
            style.point
        );
    }
    let _ = writeln!(
        out,
        r#"<text class="k-axis" x="{bx0:.2}" y="{:.2}" font-family="sans-serif" font-size="10" fill="{}">max K = {}</text>"#,
        by0 + bh + 16.0,
        style.label,
        escape(&format!("{kmax:.6}"))
    );
    out.push_str("</svg>\n");
    QcPlot {
        svg: out,
        circles,
        correspondences,
        bars: per.len(),
    }
}
