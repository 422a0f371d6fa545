//! CSV and SVG output. Both are plain text with `\n` line endings so that
//! outputs diff cleanly.

use std::fmt::Write as _;

use epscap::{RegionRaster, TrajectoryStep, Vector};

/// `x,y,inside` header plus one row per lattice point, `inside` as `1`/`0`.
pub fn region_csv(raster: &RegionRaster) -> String {
    let mut out = String::from("x,y,inside\n");
    for (x, y, inside) in raster.points() {
        let _ = writeln!(out, "{x},{y},{}", u8::from(inside));
    }
    out
}

/// `step,x1..xn[,u1..um],y1..yp`; the `u` columns are omitted when the
/// trajectory has no inputs.
pub fn trajectory_csv(traj: &[TrajectoryStep]) -> String {
    let Some(first) = traj.first() else {
        return String::new();
    };
    let mut header = vec!["step".to_string()];
    header.extend((1..=first.x.dim()).map(|i| format!("x{i}")));
    if let Some(u) = &first.u {
        header.extend((1..=u.dim()).map(|i| format!("u{i}")));
    }
    header.extend((1..=first.y.dim()).map(|i| format!("y{i}")));

    let mut out = header.join(",");
    out.push('\n');
    for s in traj {
        let mut cells = vec![s.step.to_string()];
        let mut push = |v: &Vector| cells.extend(v.as_slice().iter().map(|x| x.to_string()));
        push(&s.x);
        if let Some(u) = &s.u {
            push(u);
        }
        push(&s.y);
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

const SVG_SIZE: f64 = 480.0;
const MARGIN: f64 = 40.0;

/// Static SVG of the raster: member cells filled, `markers` drawn as labelled
/// dots when they fall inside the plotted window.
pub fn region_svg(raster: &RegionRaster, markers: &[(&str, f64, f64)]) -> String {
    let g = raster.grid;
    let (x0, x1) = (raster.xs[0], raster.xs[g - 1]);
    let (y0, y1) = (raster.ys[0], raster.ys[g - 1]);
    let cell = SVG_SIZE / g as f64;
    let total = SVG_SIZE + 2.0 * MARGIN;
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (SVG_SIZE - cell) + cell / 2.0;
    let py = |y: f64| MARGIN + (y1 - y) / (y1 - y0) * (SVG_SIZE - cell) + cell / 2.0;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="{total}" viewBox="0 0 {total} {total}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{total}" height="{total}" fill="white"/>"#
    );
    let _ = writeln!(out, r##"<g fill="#4c8bd6" stroke="none">"##);
    for iy in 0..g {
        for ix in 0..g {
            if raster.at(ix, iy) {
                let x = px(raster.xs[ix]) - cell / 2.0;
                let y = py(raster.ys[iy]) - cell / 2.0;
                let _ = writeln!(
                    out,
                    r#"<rect x="{x:.3}" y="{y:.3}" width="{cell:.3}" height="{cell:.3}"/>"#
                );
            }
        }
    }
    out.push_str("</g>\n");
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{SVG_SIZE}" height="{SVG_SIZE}" fill="none" stroke="black"/>"#
    );
    if x0 < 0.0 && x1 > 0.0 {
        let x = px(0.0);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.3}" y1="{MARGIN}" x2="{x:.3}" y2="{:.3}" stroke="gray"/>"#,
            MARGIN + SVG_SIZE
        );
    }
    if y0 < 0.0 && y1 > 0.0 {
        let y = py(0.0);
        let _ = writeln!(
            out,
            r#"<line x1="{MARGIN}" y1="{y:.3}" x2="{:.3}" y2="{y:.3}" stroke="gray"/>"#,
            MARGIN + SVG_SIZE
        );
    }
    for &(label, x, y) in markers {
        if !(x0..=x1).contains(&x) || !(y0..=y1).contains(&y) {
            continue;
        }
        let (cx, cy) = (px(x), py(y));
        let _ = writeln!(
            out,
            r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="4" fill="crimson"/>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="12">{label}</text>"#,
            cx + 6.0,
            cy - 6.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{MARGIN}" y="{:.3}" font-family="sans-serif" font-size="11">x in [{x0}, {x1}], y in [{y0}, {y1}]</text>"#,
        total - 12.0
    );
    out.push_str("</svg>\n");
    out
}
