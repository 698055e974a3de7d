//! Plan files and SVG frame rendering.
//!
//! The JSON plan document bundles the move list, the deferral log, and an
//! optional event script with stable field ordering, so identical plans
//! export byte-identically. SVG frames show one image per waypoint step.

use crate::planner::{Deferral, Direction, MovePlan, Plan};
use crate::scene::Scene;
use crate::scripting::EventScript;
use crate::verifier::VerificationReport;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use thiserror::Error;

pub const PLAN_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("failed to write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("failed to parse {path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
    #[error("unsupported plan schema_version {0} (expected {PLAN_SCHEMA_VERSION})")]
    SchemaVersion(u32),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanDocument {
    pub schema_version: u32,
    pub grid_radius: f64,
    pub direction: Direction,
    pub moves: Vec<MovePlan>,
    pub deferral_log: Vec<Deferral>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub script: Option<EventScript>,
}

impl PlanDocument {
    pub fn new(plan: &Plan, grid_radius: f64, script: Option<EventScript>) -> Self {
        Self {
            schema_version: PLAN_SCHEMA_VERSION,
            grid_radius,
            direction: plan.direction,
            moves: plan.moves.clone(),
            deferral_log: plan.deferral_log.clone(),
            script,
        }
    }

    pub fn plan(&self) -> Plan {
        Plan {
            direction: self.direction,
            moves: self.moves.clone(),
            deferral_log: self.deferral_log.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("plan serializes");
        text.push('\n');
        text
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ExportError> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|source| ExportError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<PlanDocument, ExportError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| ExportError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let doc: PlanDocument =
            serde_json::from_str(&text).map_err(|source| ExportError::Parse {
                path: path.display().to_string(),
                source,
            })?;
        if doc.schema_version != PLAN_SCHEMA_VERSION {
            return Err(ExportError::SchemaVersion(doc.schema_version));
        }
        Ok(doc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    SvgFrames,
}

/// Write a plan either as a single JSON document or as an SVG frame sequence
/// in a directory. Returns the number of files written.
pub fn export_plan(
    scene: &Scene,
    plan: &Plan,
    script: Option<&EventScript>,
    grid_radius: f64,
    dest: impl AsRef<Path>,
    format: ExportFormat,
) -> Result<usize, ExportError> {
    match format {
        ExportFormat::Json => {
            PlanDocument::new(plan, grid_radius, script.cloned()).save(dest)?;
            Ok(1)
        }
        ExportFormat::SvgFrames => render_frames(scene, plan, dest),
    }
}

pub fn save_report(report: &VerificationReport, path: impl AsRef<Path>) -> Result<(), ExportError> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    fs::write(path, text).map_err(|source| ExportError::Io {
        path: path.display().to_string(),
        source,
    })
}

const SVG_SCALE: f64 = 24.0;

/// Render one SVG frame per waypoint across all moves: the world bounds, the
/// walls currently standing, static obstacles, and the mover highlighted at
/// its current waypoint. Returns the frame count.
pub fn render_frames(
    scene: &Scene,
    plan: &Plan,
    outdir: impl AsRef<Path>,
) -> Result<usize, ExportError> {
    let outdir = outdir.as_ref();
    fs::create_dir_all(outdir).map_err(|source| ExportError::Io {
        path: outdir.display().to_string(),
        source,
    })?;

    let mut standing: Vec<bool> = match plan.direction {
        Direction::Disassembly => vec![true; scene.walls.len()],
        Direction::Assembly => {
            let mut s = vec![true; scene.walls.len()];
            for mv in &plan.moves {
                if let Some(i) = scene.wall_index(&mv.wall_id) {
                    s[i] = false;
                }
            }
            s
        }
    };

    let mut frame = 0usize;
    for mv in &plan.moves {
        let mover = scene.wall_index(&mv.wall_id);
        for (step, waypoint) in mv.waypoints.iter().enumerate() {
            let svg = frame_svg(scene, &standing, mv, mover, *waypoint, step);
            let path = outdir.join(format!("frame_{frame:05}.svg"));
            fs::write(&path, svg).map_err(|source| ExportError::Io {
                path: path.display().to_string(),
                source,
            })?;
            frame += 1;
        }
        if let Some(i) = mover {
            standing[i] = plan.direction == Direction::Assembly;
        }
    }
    Ok(frame)
}

fn frame_svg(
    scene: &Scene,
    standing: &[bool],
    mv: &MovePlan,
    mover: Option<usize>,
    waypoint: crate::geometry::Point,
    step: usize,
) -> String {
    let b = scene.bounds;
    let pad = 1.0;
    let width = (b.width() + 2.0 * pad) * SVG_SCALE;
    let height = (b.height() + 2.0 * pad) * SVG_SCALE;
    let sx = |x: f64| (x - b.min_x + pad) * SVG_SCALE;
    let sy = |y: f64| (b.max_y - y + pad) * SVG_SCALE;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">"
    );
    let _ = writeln!(
        svg,
        "  <rect x=\"{:.1}\" y=\"{:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"#fbfbf8\" stroke=\"#333\" stroke-width=\"1.5\"/>",
        sx(b.min_x),
        sy(b.max_y),
        b.width() * SVG_SCALE,
        b.height() * SVG_SCALE
    );

    // Remaining route for this move.
    if mv.waypoints.len() > 1 {
        let mut points = String::new();
        for p in &mv.waypoints {
            let _ = write!(points, "{:.1},{:.1} ", sx(p.x), sy(p.y));
        }
        let _ = writeln!(
            svg,
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"#d7b26b\" stroke-width=\"1\" stroke-dasharray=\"4 3\"/>",
            points.trim_end()
        );
    }

    for obstacle in &scene.obstacles {
        svg.push_str(&rect_svg(
            obstacle.pose.x,
            obstacle.pose.y,
            obstacle.pose.yaw,
            obstacle.half_length,
            obstacle.half_thickness,
            "#555555",
            &sx,
            &sy,
        ));
    }
    for (i, wall) in scene.walls.iter().enumerate() {
        if Some(i) == mover || !standing[i] {
            continue;
        }
        svg.push_str(&rect_svg(
            wall.placed_pose.x,
            wall.placed_pose.y,
            wall.placed_pose.yaw,
            wall.half_length,
            wall.half_thickness,
            "#7d93a8",
            &sx,
            &sy,
        ));
    }
    if let Some(i) = mover {
        let wall = &scene.walls[i];
        svg.push_str(&rect_svg(
            waypoint.x,
            waypoint.y,
            mv.transit_yaw,
            wall.half_length,
            wall.half_thickness,
            "#e4572e",
            &sx,
            &sy,
        ));
    }

    let _ = writeln!(
        svg,
        "  <text x=\"6\" y=\"16\" font-family=\"monospace\" font-size=\"13\">{} step {}/{}</text>",
        mv.wall_id,
        step + 1,
        mv.waypoints.len()
    );
    svg.push_str("</svg>\n");
    svg
}

#[allow(clippy::too_many_arguments)]
fn rect_svg(
    x: f64,
    y: f64,
    yaw: f64,
    half_length: f64,
    half_thickness: f64,
    fill: &str,
    sx: &dyn Fn(f64) -> f64,
    sy: &dyn Fn(f64) -> f64,
) -> String {
    // The y axis is flipped for screen coordinates, so the rotation flips too.
    format!(
        "  <g transform=\"translate({:.2} {:.2}) rotate({:.3})\"><rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\" fill-opacity=\"0.85\" stroke=\"#222\" stroke-width=\"0.7\"/></g>\n",
        sx(x),
        sy(y),
        -yaw.to_degrees(),
        -half_length * SVG_SCALE,
        -half_thickness * SVG_SCALE,
        2.0 * half_length * SVG_SCALE,
        2.0 * half_thickness * SVG_SCALE,
        fill
    )
}
