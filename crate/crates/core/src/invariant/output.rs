//! Serialization of matrix loops: CSV rows and an SVG trace of the
//! determinant in the complex plane.

use std::fmt::Write as _;
use std::io::Write;

use crate::invariant::trivialize::MatrixLoop;
use crate::linalg::complex_det;
use crate::scalar::Real;

/// Header `theta,re_det,im_det,re_00,im_00,re_01,...` (entries row-major).
pub fn loop_csv_header(size: usize) -> String {
    let mut h = String::from("theta,re_det,im_det");
    for i in 0..size {
        for j in 0..size {
            let _ = write!(h, ",re_{i}{j},im_{i}{j}");
        }
    }
    h
}

pub fn write_loop_csv<R: Real, W: Write>(out: &mut W, lp: &MatrixLoop<R>) -> std::io::Result<()> {
    let size = lp.matrices.first().map_or(0, |m| m.rows());
    writeln!(out, "{}", loop_csv_header(size))?;
    for (th, m) in lp.thetas.iter().zip(&lp.matrices) {
        let d = complex_det(m);
        let mut line = format!("{:e},{:e},{:e}", th.as_f64(), d.re.as_f64(), d.im.as_f64());
        for z in m.as_slice() {
            let _ = write!(line, ",{:e},{:e}", z.re.as_f64(), z.im.as_f64());
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Closed polyline of `det B(θ)` with axes through the origin.
pub fn loop_svg<R: Real>(lp: &MatrixLoop<R>) -> String {
    const SIZE: f64 = 480.0;
    const MARGIN: f64 = 24.0;
    let dets: Vec<(f64, f64)> = lp.matrices.iter().map(complex_det).map(|d| (d.re.as_f64(), d.im.as_f64())).collect();
    let extent = dets.iter().map(|&(x, y)| x.abs().max(y.abs())).fold(0.0, f64::max).max(f64::MIN_POSITIVE) * 1.1;
    let scale = (SIZE / 2.0 - MARGIN) / extent;
    let map = |x: f64, y: f64| (SIZE / 2.0 + x * scale, SIZE / 2.0 - y * scale);
    let mut path = String::new();
    for (i, &(x, y)) in dets.iter().enumerate() {
        let (px, py) = map(x, y);
        let _ = write!(path, "{}{px:.3},{py:.3} ", if i == 0 { "M" } else { "L" });
    }
    path.push('Z');
    let mid = SIZE / 2.0;
    let mut svg = String::new();
    let _ = writeln!(svg, r##"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"##);
    let _ = writeln!(svg, r##"<line x1="0" y1="{mid}" x2="{SIZE}" y2="{mid}" stroke="#999" stroke-width="1"/>"##);
    let _ = writeln!(svg, r##"<line x1="{mid}" y1="0" x2="{mid}" y2="{SIZE}" stroke="#999" stroke-width="1"/>"##);
    let _ = writeln!(svg, r##"<path d="{path}" fill="none" stroke="#1f5fa8" stroke-width="1.5"/>"##);
    if let Some(&(x, y)) = dets.first() {
        let (px, py) = map(x, y);
        let _ = writeln!(svg, r##"<circle cx="{px:.3}" cy="{py:.3}" r="3" fill="#c0392b"/>"##);
    }
    let _ = writeln!(svg, r##"<text x="{MARGIN}" y="{MARGIN}" font-family="sans-serif" font-size="12">det B_{}(theta), |det| max {:.3e}</text>"##, lp.k, dets.iter().map(|&(x, y)| x.hypot(y)).fold(0.0, f64::max));
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariant::family::theta_grid;
    use crate::invariant::trivialize::LoopMeta;
    use crate::linalg::Mat;
    use num_complex::Complex;

    fn tiny() -> MatrixLoop<f64> {
        let thetas = theta_grid::<f64>(4);
        let matrices = thetas.iter().map(|&t| Mat::from_rows(&[vec![Complex::from_polar(2.0, t)]])).collect();
        MatrixLoop { k: 1, thetas, matrices, meta: LoopMeta { x0: 0.5, r_k: 0.5, s_k: 8.0 } }
    }

    #[test]
    fn csv_has_header_and_one_row_per_sample() {
        let mut buf = Vec::new();
        write_loop_csv(&mut buf, &tiny()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "theta,re_det,im_det,re_00,im_00");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("0e0,2e0,0e0"));
    }

    #[test]
    fn svg_is_closed_path() {
        let s = loop_svg(&tiny());
        assert!(s.starts_with("<svg"));
        assert!(s.contains("Z\""));
    }
}
