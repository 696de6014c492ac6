//! Minimal self-contained SVG scatter plots; no external renderer.

use std::io::Write;

use crate::Result;

pub const WIDTH: u32 = 1200;
pub const HEIGHT: u32 = 400;
const MARGIN: f64 = 50.0;

/// One colored point set.
pub struct Series<'a> {
    pub points: &'a [(f64, f64)],
    pub color: &'a str,
    pub label: &'a str,
}

/// Scatter of one or more series into a fixed 1200x400 viewbox with axis
/// labels and a small legend. Point order and formatting are stable, so
/// identical inputs give identical bytes.
pub fn scatter<W: Write>(
    mut out: W,
    series: &[Series<'_>],
    x_label: &str,
    y_label: &str,
) -> Result<()> {
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x_min = x_min.min(x);
        x_max = x_max.max(x);
        y_min = y_min.min(y);
        y_max = y_max.max(y);
    }
    if !x_min.is_finite() {
        (x_min, x_max, y_min, y_max) = (0.0, 1.0, 0.0, 1.0);
    }
    if x_max == x_min {
        x_max = x_min + 1.0;
    }
    if y_max == y_min {
        y_max = y_min + 1.0;
    }
    let sx = (WIDTH as f64 - 2.0 * MARGIN) / (x_max - x_min);
    let sy = (HEIGHT as f64 - 2.0 * MARGIN) / (y_max - y_min);
    let px = |x: f64| MARGIN + (x - x_min) * sx;
    let py = |y: f64| HEIGHT as f64 - MARGIN - (y - y_min) * sy;

    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    )?;
    writeln!(out, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>")?;
    // axes
    writeln!(
        out,
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>",
        m = MARGIN,
        b = HEIGHT as f64 - MARGIN,
        r = WIDTH as f64 - MARGIN
    )?;
    writeln!(
        out,
        "<line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>",
        m = MARGIN,
        t = MARGIN,
        b = HEIGHT as f64 - MARGIN
    )?;
    if y_min < 0.0 && y_max > 0.0 {
        writeln!(
            out,
            "<line x1=\"{m}\" y1=\"{z:.2}\" x2=\"{r}\" y2=\"{z:.2}\" stroke=\"#cccccc\"/>",
            m = MARGIN,
            z = py(0.0),
            r = WIDTH as f64 - MARGIN
        )?;
    }
    writeln!(
        out,
        "<text x=\"{x}\" y=\"{y}\" font-size=\"14\" text-anchor=\"middle\">{x_label}</text>",
        x = WIDTH / 2,
        y = HEIGHT - 12
    )?;
    writeln!(
        out,
        "<text x=\"16\" y=\"{y}\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 16 {y})\">{y_label}</text>",
        y = HEIGHT / 2
    )?;
    for (i, s) in series.iter().enumerate() {
        for &(x, y) in s.points {
            writeln!(
                out,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"{}\"/>",
                px(x),
                py(y),
                s.color
            )?;
        }
        let ly = MARGIN + 18.0 * i as f64;
        writeln!(
            out,
            "<circle cx=\"{x}\" cy=\"{ly:.2}\" r=\"4\" fill=\"{}\"/>",
            s.color,
            x = WIDTH as f64 - MARGIN - 120.0
        )?;
        writeln!(
            out,
            "<text x=\"{x}\" y=\"{y:.2}\" font-size=\"12\">{}</text>",
            s.label,
            x = WIDTH as f64 - MARGIN - 110.0,
            y = ly + 4.0
        )?;
    }
    writeln!(out, "</svg>")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn emits_fixed_viewbox_and_points() {
        let pts = [(0.0, 1.0), (0.5, -1.0), (1.0, 2.0)];
        let mut buf = Vec::new();
        scatter(
            &mut buf,
            &[Series {
                points: &pts,
                color: "blue",
                label: "even",
            }],
            "prime",
            "mean",
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("viewBox=\"0 0 1200 400\""));
        assert_eq!(text.matches("<circle").count(), 4); // 3 points + legend
        assert!(text.contains("prime"));
    }

    #[test]
    fn identical_inputs_identical_bytes() {
        let pts = [(0.1, 0.7), (0.9, -0.3)];
        let emit = || {
            let mut buf = Vec::new();
            scatter(
                &mut buf,
                &[Series {
                    points: &pts,
                    color: "red",
                    label: "odd",
                }],
                "x",
                "y",
            )
            .unwrap();
            buf
        };
        assert_eq!(emit(), emit());
    }
}
