//! Adams-chart rendering: stem `t - s` across, filtration `s` up.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use extlab_core::resolve::ExtChart;
use extlab_core::scenario::E3Chart;

#[derive(Clone, Debug, Default)]
pub struct Point {
    pub dim: usize,
    pub labels: Vec<String>,
}

/// The `(stem, filtration)` lattice shared by every output format.
#[derive(Clone, Debug)]
pub struct Lattice {
    pub title: String,
    pub max_s: usize,
    pub max_t: usize,
    pub points: BTreeMap<(usize, usize), Point>,
    /// Bidegrees to flag, e.g. disagreements with an expected chart.
    pub flagged: BTreeSet<(usize, usize)>,
}

impl Lattice {
    pub fn from_ext(title: impl Into<String>, chart: &ExtChart) -> Self {
        let points = chart
            .nonzero()
            .into_iter()
            .filter(|&(s, t, _)| t >= s)
            .map(|(s, t, dim)| {
                (
                    (t - s, s),
                    Point {
                        dim,
                        labels: Vec::new(),
                    },
                )
            })
            .collect();
        Self {
            title: title.into(),
            max_s: chart.max_s,
            max_t: chart.max_t,
            points,
            flagged: BTreeSet::new(),
        }
    }

    pub fn from_e3(title: impl Into<String>, chart: &E3Chart) -> Self {
        let points = chart
            .entries
            .iter()
            .map(|e| {
                (
                    (e.stem, e.filtration),
                    Point {
                        dim: e.dim,
                        labels: e.labels.clone(),
                    },
                )
            })
            .collect();
        Self {
            title: title.into(),
            max_s: chart.max_s,
            max_t: chart.max_t,
            points,
            flagged: BTreeSet::new(),
        }
    }

    pub fn flag(mut self, cells: impl IntoIterator<Item = (usize, usize)>) -> Self {
        self.flagged.extend(cells);
        self
    }

    pub fn max_stem(&self) -> usize {
        self.max_t
    }

    fn known(&self, stem: usize, s: usize) -> bool {
        s <= self.max_s && stem + s <= self.max_t
    }

    fn dim(&self, stem: usize, s: usize) -> usize {
        self.points.get(&(stem, s)).map_or(0, |p| p.dim)
    }
}

pub fn ascii(l: &Lattice) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", l.title);
    for s in (0..=l.max_s).rev() {
        let _ = write!(out, "{s:>3} |");
        for stem in 0..=l.max_stem() {
            let flag = if l.flagged.contains(&(stem, s)) { '!' } else { ' ' };
            let cell = if !l.known(stem, s) {
                ' '
            } else {
                match l.dim(stem, s) {
                    0 => '.',
                    d @ 1..=9 => char::from_digit(d as u32, 10).unwrap_or('+'),
                    _ => '+',
                }
            };
            out.push(flag);
            out.push(cell);
        }
        out.truncate(out.trim_end().len());
        out.push('\n');
    }
    let _ = writeln!(out, "    +{}", "-".repeat(2 * (l.max_stem() + 1)));
    if l.max_stem() >= 10 {
        out.push_str("     ");
        for stem in 0..=l.max_stem() {
            out.push(if stem >= 10 && stem % 10 == 0 {
                char::from_digit((stem / 10 % 10) as u32, 10).unwrap_or(' ')
            } else {
                ' '
            });
            out.push(' ');
        }
        out.truncate(out.trim_end().len());
        out.push('\n');
    }
    out.push_str("     ");
    for stem in 0..=l.max_stem() {
        out.push(char::from_digit((stem % 10) as u32, 10).unwrap_or(' '));
        out.push(' ');
    }
    out.truncate(out.trim_end().len());
    out.push('\n');
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

const CELL: usize = 24;
const MARGIN: usize = 40;

/// Static SVG 1.1; each class carries a `<title>` for hover text.
pub fn svg(l: &Lattice) -> String {
    let cols = l.max_stem() + 1;
    let rows = l.max_s + 1;
    let width = 2 * MARGIN + cols * CELL;
    let height = 2 * MARGIN + rows * CELL;
    let x = |stem: usize| MARGIN + stem * CELL + CELL / 2;
    let y = |s: usize| MARGIN + (l.max_s - s) * CELL + CELL / 2;
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="monospace" font-size="10">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(&l.title));
    let _ = writeln!(out, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(out, r##"<g stroke="#e0e0e0" stroke-width="1">"##);
    for stem in 0..=l.max_stem() {
        let _ = writeln!(out, r#"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}"/>"#, x(stem), y(l.max_s), y(0));
    }
    for s in 0..=l.max_s {
        let _ = writeln!(out, r#"<line x1="{1}" y1="{0}" x2="{2}" y2="{0}"/>"#, y(s), x(0), x(l.max_stem()));
    }
    out.push_str("</g>\n<g>\n");
    for stem in (0..=l.max_stem()).step_by(2) {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{stem}</text>"#,
            x(stem),
            height - MARGIN / 2
        );
    }
    for s in 0..=l.max_s {
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{s}</text>"#, MARGIN - 6, y(s) + 3);
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">t - s</text>"#,
        width / 2,
        height - 4
    );
    out.push_str("</g>\n");
    for stem in 0..=l.max_stem() {
        for s in 0..=l.max_s {
            if !l.known(stem, s) {
                let _ = writeln!(
                    out,
                    r##"<rect x="{}" y="{}" width="{CELL}" height="{CELL}" fill="#f4f4f4"/>"##,
                    x(stem) - CELL / 2,
                    y(s) - CELL / 2
                );
            }
        }
    }
    for (&(stem, s), p) in &l.points {
        let colour = if l.flagged.contains(&(stem, s)) { "#c00000" } else { "black" };
        let shown = p.dim.min(3);
        for k in 0..shown {
            let cx = x(stem) as isize + (2 * k as isize - (shown as isize - 1)) * 4;
            let mut tip = format!("stem {stem}, filtration {s}, dim {}", p.dim);
            if !p.labels.is_empty() {
                let _ = write!(tip, ": {}", p.labels.join(", "));
            }
            let _ = writeln!(
                out,
                r#"<circle cx="{cx}" cy="{}" r="3" fill="{colour}"><title>{}</title></circle>"#,
                y(s),
                escape(&tip)
            );
        }
    }
    for &(stem, s) in &l.flagged {
        if l.dim(stem, s) == 0 && l.known(stem, s) {
            let _ = writeln!(
                out,
                r##"<circle cx="{}" cy="{}" r="5" fill="none" stroke="#c00000"><title>stem {stem}, filtration {s}: expected a class here</title></circle>"##,
                x(stem),
                y(s)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Lattice {
        let mut chart = ExtChart::zeros(2, 4);
        chart.dims[0][0] = 1;
        chart.dims[1][1] = 1;
        chart.dims[1][2] = 1;
        chart.dims[2][4] = 2;
        Lattice::from_ext("sample", &chart)
    }

    #[test]
    fn ascii_puts_stems_across() {
        let text = ascii(&sample());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "sample");
        assert_eq!(lines[1], "  2 | . . 2");
        assert_eq!(lines[2], "  1 | 1 1 . .");
        assert_eq!(lines[3], "  0 | 1 . . . .");
        assert_eq!(lines[5], "     0 1 2 3 4");
    }

    #[test]
    fn flagged_cells_are_marked() {
        let text = ascii(&sample().flag([(1, 0)]));
        assert!(text.lines().nth(3).unwrap().starts_with("  0 | 1!."));
    }

    #[test]
    fn svg_has_one_circle_per_class() {
        let text = svg(&sample());
        assert!(text.contains(r#"version="1.1""#));
        assert_eq!(text.matches("<circle").count(), 5);
        assert!(text.contains("<title>stem 2, filtration 2, dim 2</title>"));
    }
}
