use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::metric::{Point, SpaceKind};

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 40.0;

const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#393b79", "#ad494a",
];

fn planar(p: &Point) -> Option<(f64, f64)> {
    match p {
        Point::Coord(x) => Some((*x, 0.0)),
        Point::Vector(v) if v.len() == 2 => Some((v[0], v[1])),
        _ => None,
    }
}

fn star(cx: f64, cy: f64, outer: f64) -> String {
    let inner = outer * 0.45;
    let mut pts = String::new();
    for i in 0..10 {
        let r = if i % 2 == 0 { outer } else { inner };
        let a = std::f64::consts::PI * (i as f64) / 5.0 - std::f64::consts::FRAC_PI_2;
        let _ = write!(pts, "{:.2},{:.2} ", cx + r * a.cos(), cy + r * a.sin());
    }
    pts.trim_end().to_string()
}

/// SVG markup for a clustering of a planar or line instance: agents as dots
/// colored by their center, centers as stars. Line instances are drawn as a
/// horizontal strip.
pub fn clusters_svg(inst: &Instance, centers: &[Point], assignment: &[usize]) -> Result<String> {
    let strip = match inst.space().kind() {
        SpaceKind::Line => true,
        SpaceKind::Euclidean { dim: 2 } => false,
        kind => return Err(Error::Unsupported(format!("cannot draw a {kind:?} space"))),
    };
    if inst.n() == 0 || assignment.len() != inst.n() {
        return Err(Error::Precondition("one assignment per agent is required".into()));
    }
    let agents: Vec<(f64, f64)> = inst.agents().iter().filter_map(planar).collect();
    let stars: Vec<(f64, f64)> = centers.iter().filter_map(planar).collect();
    if stars.len() != centers.len() {
        return Err(Error::InvalidPoint("centers must be planar points".into()));
    }
    let all = agents.iter().chain(&stars);
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let span_x = (x1 - x0).max(1e-12);
    let span_y = (y1 - y0).max(1e-12);
    let map = |(x, y): (f64, f64)| {
        let px = MARGIN + (x - x0) / span_x * (WIDTH - 2.0 * MARGIN);
        let py = if strip {
            HEIGHT / 2.0
        } else {
            HEIGHT - MARGIN - (y - y0) / span_y * (HEIGHT - 2.0 * MARGIN)
        };
        (px, py)
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<title>{} (k = {})</title>"#, inst.label, centers.len());
    if strip {
        let _ = writeln!(
            out,
            r##"<line x1="{MARGIN}" y1="{y}" x2="{x2}" y2="{y}" stroke="#cccccc"/>"##,
            y = HEIGHT / 2.0,
            x2 = WIDTH - MARGIN
        );
    }
    for (p, &j) in agents.iter().zip(assignment) {
        let (px, py) = map(*p);
        let _ = writeln!(
            out,
            r#"<circle class="agent" cx="{px:.2}" cy="{py:.2}" r="3" fill="{}" fill-opacity="0.7"/>"#,
            PALETTE[j % PALETTE.len()]
        );
    }
    for (j, p) in stars.iter().enumerate() {
        let (px, py) = map(*p);
        let _ = writeln!(
            out,
            r#"<polygon class="center" points="{}" fill="{}" stroke="black" stroke-width="1"/>"#,
            star(px, py, 10.0),
            PALETTE[j % PALETTE.len()]
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Writes [`clusters_svg`] to `path`.
pub fn render_clusters_svg(
    inst: &Instance,
    centers: &[Point],
    assignment: &[usize],
    path: impl AsRef<Path>,
) -> Result<()> {
    std::fs::write(path, clusters_svg(inst, centers, assignment)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::alg_refined;
    use crate::baselines::ObjectiveKind;
    use crate::instance::{gen_gaussian, gen_k4, Candidates, GaussianParams};
    use crate::metric::Space;

    #[test]
    fn gaussian_plot_has_ten_stars() {
        let inst = gen_gaussian(&GaussianParams { n: 150, ..Default::default() }).unwrap();
        let (y, _) = alg_refined(&inst, ObjectiveKind::KMeansSq).unwrap();
        let svg = clusters_svg(&inst, &y.centers, &inst.assign(&y.centers)).unwrap();
        assert_eq!(svg.matches("class=\"center\"").count(), 10);
        assert_eq!(svg.matches("class=\"agent\"").count(), 150);
        assert!(svg.starts_with("<svg") && svg.contains("width=\"800\" height=\"600\""));
    }

    #[test]
    fn line_strip() {
        let agents: Vec<Point> = [0.0, 2.0, 5.0].iter().map(|x| Point::Coord(*x)).collect();
        let inst = Instance::new("l", Space::Line, agents, Candidates::ContinuousLine, 1).unwrap();
        let svg = clusters_svg(&inst, &[Point::Coord(2.0)], &[0, 0, 0]).unwrap();
        assert!(svg.contains("<line"));
        assert!(svg.contains("cy=\"300.00\""));
    }

    #[test]
    fn rejects_other_spaces_and_bad_assignment() {
        let k4 = gen_k4();
        assert!(clusters_svg(&k4, &[Point::Vertex(0)], &[0, 0, 0, 0]).is_err());
        let agents = vec![Point::Coord(0.0)];
        let inst = Instance::new("l", Space::Line, agents, Candidates::ContinuousLine, 1).unwrap();
        assert!(clusters_svg(&inst, &[Point::Coord(0.0)], &[]).is_err());
    }

    #[test]
    fn writes_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("plot.svg");
        let agents = vec![Point::Coord(0.0), Point::Coord(1.0)];
        let inst = Instance::new("l", Space::Line, agents, Candidates::ContinuousLine, 1).unwrap();
        render_clusters_svg(&inst, &[Point::Coord(0.0)], &[0, 0], &path).unwrap();
        assert!(std::fs::read_to_string(path).unwrap().ends_with("</svg>\n"));
    }
}
