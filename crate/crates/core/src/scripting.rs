//! Construction event scripts.
//!
//! An assembly plan expands into the step list a site crew would follow:
//! transport each panel along its planned route, tilt it up, place it, brace
//! it, check the running corner angle against the previous panel, and once
//! the last panel stands, strip the braces and verify every corner.

use crate::geometry::Point;
use crate::planner::{Direction, Plan};
use crate::scene::Scene;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScriptError {
    #[error("event script expansion requires an assembly plan")]
    WrongDirection,
    #[error("plan references unknown wall \"{0}\"")]
    UnknownWall(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Transport,
    TiltUp,
    Place,
    InstallBrace,
    VerifyAngle,
    RemoveBrace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub walls: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corner: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub waypoints: Option<Vec<Point>>,
}

impl Event {
    fn simple(kind: EventKind, wall: &str) -> Event {
        Event {
            kind,
            walls: vec![wall.to_string()],
            angle_deg: None,
            corner: None,
            waypoints: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EventScript {
    pub events: Vec<Event>,
}

/// Angle between two wall axes, folded into [0, 180] degrees.
pub fn corner_angle_deg(yaw_a: f64, yaw_b: f64) -> f64 {
    let mut delta = (yaw_a - yaw_b).abs() % (2.0 * std::f64::consts::PI);
    if delta > std::f64::consts::PI {
        delta = 2.0 * std::f64::consts::PI - delta;
    }
    delta.to_degrees()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CornerCheck {
    pub corner: String,
    pub walls: [String; 2],
    pub measured_deg: f64,
    pub pass: bool,
}

/// Walls whose long-axis ends lie within one wall-thickness of each other,
/// at placed poses. Pairs come out in scene order.
fn corner_pairs(scene: &Scene) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for i in 0..scene.walls.len() {
        for j in i + 1..scene.walls.len() {
            let a = &scene.walls[i];
            let b = &scene.walls[j];
            let threshold = 2.0 * a.half_thickness.max(b.half_thickness);
            let ends_a = a.placed_rect().long_axis_ends();
            let ends_b = b.placed_rect().long_axis_ends();
            let adjacent = ends_a
                .iter()
                .any(|ea| ends_b.iter().any(|eb| ea.dist(*eb) <= threshold));
            if adjacent {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// Measure every corner of the placed scene against a right angle.
pub fn check_corner_angles(scene: &Scene, tolerance_deg: f64) -> Vec<CornerCheck> {
    corner_pairs(scene)
        .into_iter()
        .map(|(i, j)| {
            let a = &scene.walls[i];
            let b = &scene.walls[j];
            let measured_deg = corner_angle_deg(a.placed_pose.yaw, b.placed_pose.yaw);
            CornerCheck {
                corner: format!("{}+{}", a.id, b.id),
                walls: [a.id.clone(), b.id.clone()],
                measured_deg,
                pass: (measured_deg - 90.0).abs() <= tolerance_deg,
            }
        })
        .collect()
}

/// Expand an assembly plan into the full event script.
///
/// Per move: transport (carrying the waypoints), tilt-up, place, brace; from
/// the second wall on, a running angle check against the previous wall. After
/// the last wall: one brace removal per braced wall, then a final angle check
/// for every corner of the scene. An empty plan yields an empty script.
pub fn generate_script(plan: &Plan, scene: &Scene) -> Result<EventScript, ScriptError> {
    if plan.direction != Direction::Assembly {
        return Err(ScriptError::WrongDirection);
    }
    let mut events = Vec::new();
    let mut braced: Vec<String> = Vec::new();

    for (k, mv) in plan.moves.iter().enumerate() {
        let wall = scene
            .wall_index(&mv.wall_id)
            .ok_or_else(|| ScriptError::UnknownWall(mv.wall_id.clone()))?;
        events.push(Event {
            kind: EventKind::Transport,
            walls: vec![mv.wall_id.clone()],
            angle_deg: None,
            corner: None,
            waypoints: Some(mv.waypoints.clone()),
        });
        events.push(Event::simple(EventKind::TiltUp, &mv.wall_id));
        events.push(Event::simple(EventKind::Place, &mv.wall_id));
        events.push(Event::simple(EventKind::InstallBrace, &mv.wall_id));
        braced.push(mv.wall_id.clone());

        if k > 0 {
            let previous = &plan.moves[k - 1].wall_id;
            let prev_idx = scene
                .wall_index(previous)
                .ok_or_else(|| ScriptError::UnknownWall(previous.clone()))?;
            events.push(Event {
                kind: EventKind::VerifyAngle,
                walls: vec![previous.clone(), mv.wall_id.clone()],
                angle_deg: Some(corner_angle_deg(
                    scene.walls[prev_idx].placed_pose.yaw,
                    scene.walls[wall].placed_pose.yaw,
                )),
                corner: None,
                waypoints: None,
            });
        }
    }

    if !plan.moves.is_empty() {
        for wall in &braced {
            events.push(Event::simple(EventKind::RemoveBrace, wall));
        }
        for check in check_corner_angles(scene, f64::INFINITY) {
            events.push(Event {
                kind: EventKind::VerifyAngle,
                walls: check.walls.to_vec(),
                angle_deg: Some(check.measured_deg),
                corner: Some(check.corner),
                waypoints: None,
            });
        }
    }

    Ok(EventScript { events })
}
