use std::f64::consts::PI;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::SimState;
use crate::maze::Cell;

pub const GRID_COLOR: &str = "#FFFFFF";
pub const BLOCKED_COLOR: &str = "#FF0000";
pub const GOAL_COLOR: &str = "#00FF00";
pub const ROBOT_COLOR: &str = "#0000FF";

const STAR_OUTER: f64 = 0.4;
const STAR_INNER: f64 = 0.16;
const ROBOT_INSET: f64 = 0.2;

/// A colored open or closed line in maze units: cell `(r, c)` spans
/// `[c, c+1] x [r, r+1]`, origin top-left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Polyline {
    pub color: String,
    pub points: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Frame {
    pub frame: u64,
    pub polylines: Vec<Polyline>,
}

/// Rounds to 1e-4 so that rendered coordinates print compactly and stably.
fn snap(v: f64) -> f64 {
    let r = (v * 1e4).round() / 1e4;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn polyline(color: &str, points: impl IntoIterator<Item = (f64, f64)>) -> Polyline {
    Polyline {
        color: color.to_string(),
        points: points.into_iter().map(|(x, y)| [snap(x), snap(y)]).collect(),
    }
}

fn rect(color: &str, x0: f64, y0: f64, x1: f64, y1: f64) -> Polyline {
    polyline(color, [(x0, y0), (x1, y0), (x1, y1), (x0, y1), (x0, y0)])
}

fn cell_square(color: &str, cell: Cell, inset: f64) -> Polyline {
    let (x, y) = (cell.1 as f64, cell.0 as f64);
    rect(color, x + inset, y + inset, x + 1.0 - inset, y + 1.0 - inset)
}

/// Closed five-pointed star centred in `cell`, first point straight up.
fn star(cell: Cell) -> Polyline {
    let (cx, cy) = (cell.1 as f64 + 0.5, cell.0 as f64 + 0.5);
    polyline(
        GOAL_COLOR,
        (0..=10).map(|i| {
            let radius = if i % 2 == 0 { STAR_OUTER } else { STAR_INNER };
            let angle = -PI / 2.0 + (i % 10) as f64 * PI / 5.0;
            (cx + radius * angle.cos(), cy + radius * angle.sin())
        }),
    )
}

/// Draws the world: outline, obstacles, goal star, then robots by id.
pub fn render_frame(state: &SimState) -> Frame {
    let lab = &state.model;
    let mut polylines = vec![rect(GRID_COLOR, 0.0, 0.0, lab.cols() as f64, lab.rows() as f64)];
    polylines.extend(state.world_blocked.iter().map(|&c| cell_square(BLOCKED_COLOR, c, 0.0)));
    polylines.push(star(lab.goal()));
    polylines.extend(state.robots.values().map(|r| cell_square(ROBOT_COLOR, r.cell, ROBOT_INSET)));
    Frame {
        frame: state.tick,
        polylines,
    }
}

/// Standalone SVG with one `<polyline>` per frame polyline. The view box
/// spans from the origin to the largest coordinate drawn.
pub fn frame_to_svg(frame: &Frame) -> String {
    let (w, h) = frame
        .polylines
        .iter()
        .flat_map(|p| &p.points)
        .fold((0.0f64, 0.0f64), |(w, h), [x, y]| (w.max(*x), h.max(*y)));
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w} {h}" data-frame="{}" style="background:#000000">"#,
        frame.frame
    )
    .unwrap();
    for p in &frame.polylines {
        let points: Vec<String> = p.points.iter().map(|[x, y]| format!("{x},{y}")).collect();
        writeln!(
            out,
            r#"  <polyline points="{}" stroke="{}" stroke-width="0.05" fill="none"/>"#,
            points.join(" "),
            p.color
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}
