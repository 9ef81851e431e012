//! Factor maps: labeled scatter plots of scores on a pair of axes, with the
//! square background grid and the grid-step value `d` printed in a corner,
//! the way ordination plots are usually drawn. Optional extras: arrows from
//! the origin (variable maps), stars linking points to a labeled barycenter
//! (site maps), and per-block panels sharing one scale (sequence maps).
//!
//! Output is plain SVG text, deterministic for identical inputs.

use crate::error::CliError;

/// A group of points tied to a labeled barycenter.
#[derive(Debug, Clone)]
pub struct Star {
    pub label: String,
    pub center: (f64, f64),
    pub members: Vec<usize>,
}

/// A facet holding a subset of the points, drawn at the shared scale.
#[derive(Debug, Clone)]
pub struct Panel {
    pub name: String,
    pub indices: Vec<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct FactorMapOptions {
    pub title: String,
    /// Draw a segment from the origin to every point.
    pub arrows: bool,
    /// Barycenter stars (drawn in every panel containing their members).
    pub stars: Vec<Star>,
    /// Facets; empty means a single panel with all points.
    pub panels: Vec<Panel>,
    /// Per-point open (true) vs filled (false) markers; empty = all filled.
    pub open_markers: Vec<bool>,
}

const PANEL_SIZE: f64 = 320.0;
const MARGIN: f64 = 10.0;
const TITLE_BAND: f64 = 18.0;

/// Render a factor map of `points` labeled by `labels`.
pub fn emit_factor_map(
    points: &[(f64, f64)],
    labels: &[String],
    opts: &FactorMapOptions,
) -> Result<String, CliError> {
    if points.is_empty() {
        return Err(CliError::EmptyScores);
    }
    assert_eq!(points.len(), labels.len(), "one label per point");

    // shared bounds over everything that will be drawn
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let mut ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    for star in &opts.stars {
        xs.push(star.center.0);
        ys.push(star.center.1);
    }
    if opts.arrows {
        xs.push(0.0);
        ys.push(0.0);
    }
    let (mut xmin, mut xmax) = bounds(&xs);
    let (mut ymin, mut ymax) = bounds(&ys);
    let span = (xmax - xmin).max(ymax - ymin).max(1e-9);
    let pad = span * 0.08;
    xmin -= pad;
    xmax += pad;
    ymin -= pad;
    ymax += pad;
    // keep the grid square: equal spans on both axes
    let span = (xmax - xmin).max(ymax - ymin);
    let xmid = (xmin + xmax) / 2.0;
    let ymid = (ymin + ymax) / 2.0;
    xmin = xmid - span / 2.0;
    xmax = xmid + span / 2.0;
    ymin = ymid - span / 2.0;
    ymax = ymid + span / 2.0;
    let d = nice_step(span);

    let panels: Vec<Panel> = if opts.panels.is_empty() {
        vec![Panel {
            name: String::new(),
            indices: (0..points.len()).collect(),
        }]
    } else {
        opts.panels.clone()
    };
    let ncols = panels.len().clamp(1, 2);
    let nrows = panels.len().div_ceil(ncols);
    let width = ncols as f64 * (PANEL_SIZE + MARGIN) + MARGIN;
    let height = nrows as f64 * (PANEL_SIZE + MARGIN + TITLE_BAND) + MARGIN;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\">\n"
    ));
    svg.push_str("<style>text{font-family:sans-serif;font-size:9px}.grid{stroke:#ccc;stroke-width:0.5}.axis{stroke:#888;stroke-width:1}.arrow{stroke:#333;stroke-width:0.8}.star{stroke:#555;stroke-width:0.6}.frame{fill:none;stroke:#000;stroke-width:1}.dvalue{font-size:10px}.barycenter{font-weight:bold}</style>\n");
    if !opts.title.is_empty() {
        svg.push_str(&format!(
            "<title>{}</title>\n",
            escape(&opts.title)
        ));
    }

    for (pi, panel) in panels.iter().enumerate() {
        let col = pi % ncols;
        let row = pi / ncols;
        let ox = MARGIN + col as f64 * (PANEL_SIZE + MARGIN);
        let oy = MARGIN + row as f64 * (PANEL_SIZE + MARGIN + TITLE_BAND) + TITLE_BAND;
        let to_x = |x: f64| ox + (x - xmin) / (xmax - xmin) * PANEL_SIZE;
        let to_y = |y: f64| oy + (ymax - y) / (ymax - ymin) * PANEL_SIZE;

        svg.push_str(&format!("<g data-panel=\"{}\">\n", escape(&panel.name)));
        if !panel.name.is_empty() {
            svg.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\">{}</text>\n",
                ox,
                oy - 6.0,
                escape(&panel.name)
            ));
        }

        // background grid at multiples of d
        let mut gx = (xmin / d).ceil() * d;
        while gx <= xmax {
            svg.push_str(&format!(
                "<line class=\"grid\" x1=\"{0:.2}\" y1=\"{1:.2}\" x2=\"{0:.2}\" y2=\"{2:.2}\"/>\n",
                to_x(gx),
                to_y(ymin),
                to_y(ymax)
            ));
            gx += d;
        }
        let mut gy = (ymin / d).ceil() * d;
        while gy <= ymax {
            svg.push_str(&format!(
                "<line class=\"grid\" x1=\"{1:.2}\" y1=\"{0:.2}\" x2=\"{2:.2}\" y2=\"{0:.2}\"/>\n",
                to_y(gy),
                to_x(xmin),
                to_x(xmax)
            ));
            gy += d;
        }
        // zero axes when inside the view
        if xmin < 0.0 && xmax > 0.0 {
            svg.push_str(&format!(
                "<line class=\"axis\" x1=\"{0:.2}\" y1=\"{1:.2}\" x2=\"{0:.2}\" y2=\"{2:.2}\"/>\n",
                to_x(0.0),
                to_y(ymin),
                to_y(ymax)
            ));
        }
        if ymin < 0.0 && ymax > 0.0 {
            svg.push_str(&format!(
                "<line class=\"axis\" x1=\"{1:.2}\" y1=\"{0:.2}\" x2=\"{2:.2}\" y2=\"{0:.2}\"/>\n",
                to_y(0.0),
                to_x(xmin),
                to_x(xmax)
            ));
        }

        // stars behind their member points
        for star in &opts.stars {
            let members: Vec<usize> = star
                .members
                .iter()
                .copied()
                .filter(|i| panel.indices.contains(i))
                .collect();
            if members.is_empty() {
                continue;
            }
            let (cx, cy) = (to_x(star.center.0), to_y(star.center.1));
            for i in members {
                svg.push_str(&format!(
                    "<line class=\"star\" x1=\"{cx:.2}\" y1=\"{cy:.2}\" x2=\"{:.2}\" y2=\"{:.2}\"/>\n",
                    to_x(points[i].0),
                    to_y(points[i].1)
                ));
            }
            svg.push_str(&format!(
                "<text class=\"barycenter\" x=\"{:.2}\" y=\"{:.2}\">{}</text>\n",
                cx + 3.0,
                cy - 3.0,
                escape(&star.label)
            ));
        }

        for &i in &panel.indices {
            let (px, py) = (to_x(points[i].0), to_y(points[i].1));
            if opts.arrows {
                svg.push_str(&format!(
                    "<line class=\"arrow\" x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{px:.2}\" y2=\"{py:.2}\"/>\n",
                    to_x(0.0),
                    to_y(0.0)
                ));
            }
            let open = opts.open_markers.get(i).copied().unwrap_or(false);
            let fill = if open { "white" } else { "black" };
            svg.push_str(&format!(
                "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"2.5\" fill=\"{fill}\" stroke=\"black\" stroke-width=\"0.6\"/>\n"
            ));
            svg.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\">{}</text>\n",
                px + 3.5,
                py - 3.5,
                escape(&labels[i])
            ));
        }

        // frame and the grid-step annotation
        svg.push_str(&format!(
            "<rect class=\"frame\" x=\"{ox:.2}\" y=\"{oy:.2}\" width=\"{PANEL_SIZE:.2}\" height=\"{PANEL_SIZE:.2}\"/>\n"
        ));
        svg.push_str(&format!(
            "<text class=\"dvalue\" x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">d = {}</text>\n",
            ox + PANEL_SIZE - 4.0,
            oy + 12.0,
            crate::report::fmt_g(d)
        ));
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn bounds(values: &[f64]) -> (f64, f64) {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        min = min.min(v);
        max = max.max(v);
    }
    if !min.is_finite() || !max.is_finite() {
        (0.0, 1.0)
    } else if min == max {
        (min - 0.5, max + 0.5)
    } else {
        (min, max)
    }
}

/// Largest step from the 1/2/2.5/5 ladder giving at least four grid cells.
fn nice_step(span: f64) -> f64 {
    let target = span / 4.0;
    let mag = 10f64.powf(target.log10().floor());
    for mult in [5.0, 2.5, 2.0, 1.0] {
        let step = mult * mag;
        if step <= target {
            return step;
        }
    }
    mag
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
