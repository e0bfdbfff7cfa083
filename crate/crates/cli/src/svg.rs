use std::fmt::Write;

use invperm::Permutation;

/// Side of the square canvas in SVG user units.
pub const CANVAS: f64 = 1000.0;
pub const RADIUS: f64 = 2.0;

/// Scatter plot of the points `(i, p(i))` with the origin at the bottom left.
pub fn render(p: &Permutation) -> String {
    let n = p.len().max(1) as f64;
    let cell = CANVAS / n;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{c}" height="{c}" viewBox="0 0 {c} {c}">"#,
        c = CANVAS
    )
    .unwrap();
    writeln!(out, r#"<rect width="{c}" height="{c}" fill="white" stroke="black"/>"#, c = CANVAS).unwrap();
    out.push_str("<g fill=\"black\">\n");
    for (i, &v) in p.values().iter().enumerate() {
        let cx = (i as f64 + 0.5) * cell;
        let cy = CANVAS - (v as f64 - 0.5) * cell;
        writeln!(out, r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="{RADIUS}"/>"#).unwrap();
    }
    out.push_str("</g>\n</svg>\n");
    out
}
