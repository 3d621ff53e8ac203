use std::io::Write;

use super::ColorField;
use crate::error::Result;
use crate::process::{Color, LeafProcess};

/// Binary PPM with black, white and mid-gray for `+1`, `-1`, `0`; top row is the largest `y`.
pub fn write_ppm(field: &ColorField, mut out: impl Write) -> Result<()> {
    write!(out, "P6\n{} {}\n255\n", field.nx, field.ny)?;
    let mut row = Vec::with_capacity(3 * field.nx);
    for j in (0..field.ny).rev() {
        row.clear();
        for i in 0..field.nx {
            let g = match field.get(i, j) {
                1 => 0u8,
                -1 => 255,
                _ => 128,
            };
            row.extend_from_slice(&[g, g, g]);
        }
        out.write_all(&row)?;
    }
    Ok(())
}

/// Whitespace-separated values, one line per pixel row, top row first.
pub fn write_matrix(field: &ColorField, mut out: impl Write) -> Result<()> {
    for j in (0..field.ny).rev() {
        let line: Vec<String> = (0..field.nx).map(|i| field.get(i, j).to_string()).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

/// Leaves as rectangles, latest first so earlier leaves are drawn on top.
pub fn write_svg(proc: &LeafProcess, mut out: impl Write) -> Result<()> {
    let b = proc.window.bounds().expand(proc.margin);
    let scale = 40.0;
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="{} {} {} {}">"#,
        b.width() * scale,
        b.height() * scale,
        b.x0,
        -b.y1,
        b.width(),
        b.height()
    )?;
    writeln!(out, r##"<rect x="{}" y="{}" width="{}" height="{}" fill="#808080"/>"##, b.x0, -b.y1, b.width(), b.height())?;
    for l in proc.leaves.iter().rev() {
        let fill = match l.color {
            Color::Black => "#000000",
            Color::White => "#ffffff",
        };
        let s = 2.0 * l.half_side;
        writeln!(
            out,
            r##"<rect x="{}" y="{}" width="{s}" height="{s}" fill="{fill}" stroke="#4060c0" stroke-width="0.01"/>"##,
            l.center.x - l.half_side,
            -(l.center.y + l.half_side),
        )?;
    }
    let w = proc.window.bounds();
    writeln!(
        out,
        r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#d02020" stroke-width="0.03"/>"##,
        w.x0,
        -w.y1,
        w.width(),
        w.height()
    )?;
    writeln!(out, "</svg>")?;
    Ok(())
}
