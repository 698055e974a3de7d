//! Independent plan validation.
//!
//! `verify_plan` replays a plan against the evolving scene with continuous
//! sampled sweeps built only on the geometry primitives; it never looks at
//! planner masks, so a planner bug cannot hide from it. `dijkstra_cost` is
//! the exact least-cost oracle for the A* step model, implemented separately
//! on purpose.

use crate::geometry::{swept_collides, OrientedRect, Pose};
use crate::grid::{BlockedMask, Grid};
use crate::planner::{Direction, EndpointError, Plan};
use crate::scene::Scene;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("plan references unknown wall \"{0}\"")]
    UnknownWall(String),
    #[error("sample_step must be positive, got {0}")]
    BadSampleStep(f64),
}

/// One sampled collision: which move, which waypoint segment, where, and
/// against what.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub move_index: usize,
    pub segment_index: usize,
    pub sample_pose: Pose,
    pub obstacle_id: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Clean,
    CollisionsFound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub plan_id: String,
    pub sample_step: f64,
    pub violations: Vec<Violation>,
    pub verdict: Verdict,
}

/// Default sweep spacing: half the smaller of the node radius and the
/// thinnest wall's half thickness, fine enough to catch any obstacle at least
/// one wall-thickness wide.
pub fn default_sample_step(scene: &Scene, radius: f64) -> f64 {
    let min_half_thickness = scene
        .walls
        .iter()
        .map(|w| w.half_thickness)
        .fold(f64::INFINITY, f64::min);
    let base = radius.min(min_half_thickness);
    if base.is_finite() && base > 0.0 {
        base / 2.0
    } else {
        radius / 2.0
    }
}

fn plan_id(plan: &Plan) -> String {
    let ids: Vec<&str> = plan.moves.iter().map(|m| m.wall_id.as_str()).collect();
    format!("{}[{}]", plan.direction, ids.join(","))
}

/// Replay `plan` move by move, sweeping every waypoint segment against the
/// obstacle set as it evolves: a disassembled wall leaves the set after its
/// move, an assembled wall joins it at its target. All violations are
/// collected rather than failing fast so collision events can be counted.
pub fn verify_plan(
    scene: &Scene,
    plan: &Plan,
    sample_step: f64,
) -> Result<VerificationReport, VerifyError> {
    if !(sample_step.is_finite() && sample_step > 0.0) {
        return Err(VerifyError::BadSampleStep(sample_step));
    }
    let mut standing = initial_standing(scene, plan)?;

    let mut violations = Vec::new();
    for (move_index, mv) in plan.moves.iter().enumerate() {
        let mover = scene
            .wall_index(&mv.wall_id)
            .ok_or_else(|| VerifyError::UnknownWall(mv.wall_id.clone()))?;

        let mut ids: Vec<&str> = Vec::new();
        let mut rects: Vec<OrientedRect> = Vec::new();
        for (i, wall) in scene.walls.iter().enumerate() {
            if i != mover && standing[i] {
                ids.push(&wall.id);
                rects.push(wall.placed_rect());
            }
        }
        for obstacle in &scene.obstacles {
            ids.push(&obstacle.id);
            rects.push(obstacle.rect());
        }

        let footprint = scene.walls[mover].footprint();
        for (segment_index, pair) in mv.waypoints.windows(2).enumerate() {
            let from = Pose {
                x: pair[0].x,
                y: pair[0].y,
                yaw: mv.transit_yaw,
            };
            let to = Pose {
                x: pair[1].x,
                y: pair[1].y,
                yaw: mv.transit_yaw,
            };
            if let Some(hit) = swept_collides(&footprint, &from, &to, &rects, sample_step) {
                violations.push(Violation {
                    move_index,
                    segment_index,
                    sample_pose: hit.pose,
                    obstacle_id: ids[hit.obstacle].to_string(),
                });
            }
        }

        standing[mover] = match plan.direction {
            Direction::Disassembly => false,
            Direction::Assembly => true,
        };
    }

    let verdict = if violations.is_empty() {
        Verdict::Clean
    } else {
        Verdict::CollisionsFound
    };
    Ok(VerificationReport {
        plan_id: plan_id(plan),
        sample_step,
        violations,
        verdict,
    })
}

fn initial_standing(scene: &Scene, plan: &Plan) -> Result<Vec<bool>, VerifyError> {
    // Disassembly starts with every wall standing. Assembly starts with only
    // the walls the plan never moves (already installed); planned walls wait
    // at staging and join the set as they are placed.
    let mut standing = vec![true; scene.walls.len()];
    if plan.direction == Direction::Assembly {
        for mv in &plan.moves {
            let idx = scene
                .wall_index(&mv.wall_id)
                .ok_or_else(|| VerifyError::UnknownWall(mv.wall_id.clone()))?;
            standing[idx] = false;
        }
    }
    Ok(standing)
}

/// Wall ids still standing after the whole plan has been replayed.
pub fn replay_final_obstacles(scene: &Scene, plan: &Plan) -> Result<Vec<String>, VerifyError> {
    let mut standing = initial_standing(scene, plan)?;
    for mv in &plan.moves {
        let idx = scene
            .wall_index(&mv.wall_id)
            .ok_or_else(|| VerifyError::UnknownWall(mv.wall_id.clone()))?;
        standing[idx] = plan.direction == Direction::Assembly;
    }
    Ok(scene
        .walls
        .iter()
        .zip(&standing)
        .filter(|(_, s)| **s)
        .map(|(w, _)| w.id.clone())
        .collect())
}

struct QueueEntry {
    dist: f64,
    node: usize,
}

impl PartialEq for QueueEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for QueueEntry {}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Exact least cost between two nodes under the A* step model (uniform-cost
/// search, no heuristic). `Ok(None)` when the goal is disconnected.
pub fn dijkstra_cost(
    grid: &Grid,
    mask: &BlockedMask,
    start: usize,
    goal: usize,
) -> Result<Option<f64>, EndpointError> {
    if mask.blocked(start) {
        return Err(EndpointError::StartBlocked);
    }
    if mask.blocked(goal) {
        return Err(EndpointError::GoalBlocked);
    }

    let offsets: [(i64, i64); 8] = [
        (-1, -1),
        (0, -1),
        (1, -1),
        (-1, 0),
        (1, 0),
        (-1, 1),
        (0, 1),
        (1, 1),
    ];
    let cols = grid.cols() as i64;
    let rows = grid.rows() as i64;
    let straight = grid.pitch();
    let diagonal = grid.pitch() * std::f64::consts::SQRT_2;

    let mut dist = vec![f64::INFINITY; grid.node_count()];
    let mut settled = vec![false; grid.node_count()];
    let mut queue = BinaryHeap::new();
    dist[start] = 0.0;
    queue.push(QueueEntry {
        dist: 0.0,
        node: start,
    });

    while let Some(entry) = queue.pop() {
        let current = entry.node;
        if settled[current] {
            continue;
        }
        settled[current] = true;
        if current == goal {
            return Ok(Some(dist[goal]));
        }
        let (ci, cj) = grid.coords(current);
        for (di, dj) in offsets {
            let ni = ci as i64 + di;
            let nj = cj as i64 + dj;
            if ni < 0 || nj < 0 || ni >= cols || nj >= rows {
                continue;
            }
            let next = grid.index(ni as usize, nj as usize);
            if mask.blocked(next) || settled[next] {
                continue;
            }
            let step = if di != 0 && dj != 0 {
                if mask.blocked(grid.index(ni as usize, cj))
                    || mask.blocked(grid.index(ci, nj as usize))
                {
                    continue;
                }
                diagonal
            } else {
                straight
            };
            let tentative = dist[current] + step;
            if tentative < dist[next] {
                dist[next] = tentative;
                queue.push(QueueEntry {
                    dist: tentative,
                    node: next,
                });
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::WorldBounds;

    #[test]
    fn dijkstra_trivial_cases() {
        let bounds = WorldBounds {
            min_x: 0.0,
            min_y: 0.0,
            max_x: 5.0,
            max_y: 1.0,
        };
        let grid = Grid::build(&bounds, 0.5).unwrap();
        let mask = BlockedMask::all_walkable(&grid);
        assert_eq!(dijkstra_cost(&grid, &mask, 2, 2).unwrap(), Some(0.0));
        // Straight open row of five nodes: four pitch-length steps.
        let cost = dijkstra_cost(&grid, &mask, 0, 4).unwrap().unwrap();
        assert!((cost - 4.0 * grid.pitch()).abs() < 1e-12);
    }

    #[test]
    fn dijkstra_rejects_blocked_endpoints() {
        let bounds = WorldBounds {
            min_x: 0.0,
            min_y: 0.0,
            max_x: 3.0,
            max_y: 3.0,
        };
        let grid = Grid::build(&bounds, 0.5).unwrap();
        let mut mask = BlockedMask::all_walkable(&grid);
        mask.set_blocked(0, true);
        assert_eq!(
            dijkstra_cost(&grid, &mask, 0, 5),
            Err(EndpointError::StartBlocked)
        );
    }
}
