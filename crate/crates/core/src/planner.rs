//! A* search over the node grid plus the queue-with-deferral scheduler.
//!
//! Disassembly is planned wall by wall: a queue holds every wall awaiting a
//! move, the head wall is attempted against the walls still standing, and a
//! wall that cannot move right now is rotated to the back of the queue. A
//! full rotation with no progress is a deadlock. Assembly is never planned
//! forward: it is always the exact reversal of a disassembly plan.

use crate::geometry::{Point, Pose};
use crate::grid::{mask_from_obstacles, snap_to_walkable, BlockedMask, Grid};
use crate::scene::{Scene, SceneError};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt;
use thiserror::Error;

/// 8-connected neighborhood; diagonals cost sqrt(2) straights.
const NEIGHBORS: [(i64, i64); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

#[derive(Debug, Error, PartialEq)]
pub enum EndpointError {
    #[error("start node is blocked")]
    StartBlocked,
    #[error("goal node is blocked")]
    GoalBlocked,
}

/// Why a wall could not move on this attempt. These are scheduling outcomes,
/// not hard errors: the scheduler defers the wall and tries again later.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Obstruction {
    /// No walkable node near the start pose.
    StartBlocked,
    /// No walkable node near the target pose.
    GoalBlocked,
    /// Endpoints are fine but no walkable route connects them.
    NoPath,
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Obstruction::StartBlocked => "start blocked",
            Obstruction::GoalBlocked => "goal blocked",
            Obstruction::NoPath => "no path",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Hash)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Disassembly,
    Assembly,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Disassembly => f.write_str("disassembly"),
            Direction::Assembly => f.write_str("assembly"),
        }
    }
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error("wall \"{wall}\": target pose ({x}, {y}) lies outside the world bounds")]
    TargetOutsideBounds { wall: String, x: f64, y: f64 },
    #[error("wall \"{wall}\" cannot move: {reason}")]
    Obstructed { wall: String, reason: Obstruction },
    #[error("duplicate wall \"{0}\" in planning order")]
    DuplicateInOrder(String),
    #[error("{direction} deadlock: every queued wall deferred with no progress (stuck: {})", stuck.join(", "))]
    Deadlock {
        direction: Direction,
        stuck: Vec<String>,
    },
}

/// A node path found by the search, cost in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct NodePath {
    pub nodes: Vec<usize>,
    pub cost: f64,
}

/// One wall's move: exact endpoints bracketing a run of node centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MovePlan {
    pub wall_id: String,
    pub start_pose: Pose,
    pub target_pose: Pose,
    /// Yaw held for the whole transit. Fixed when the move is first planned
    /// and preserved under reversal, so a move and its reverse sweep the same
    /// area.
    pub transit_yaw: f64,
    pub waypoints: Vec<Point>,
    pub path_cost: f64,
}

impl MovePlan {
    /// The move with start and target swapped and the waypoints walked
    /// backwards. Transit yaw and cost are unchanged.
    pub fn reversed(&self) -> MovePlan {
        let mut waypoints = self.waypoints.clone();
        waypoints.reverse();
        MovePlan {
            wall_id: self.wall_id.clone(),
            start_pose: self.target_pose,
            target_pose: self.start_pose,
            transit_yaw: self.transit_yaw,
            waypoints,
            path_cost: self.path_cost,
        }
    }
}

/// One queue rotation: the wall at the head could not move and went to the
/// back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deferral {
    pub wall_id: String,
    pub reason: Obstruction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub direction: Direction,
    pub moves: Vec<MovePlan>,
    pub deferral_log: Vec<Deferral>,
}

impl Plan {
    /// Time-reverse the plan: move order reversed, every move reversed,
    /// direction flipped. The deferral log documents the original scheduling
    /// run and is kept as-is.
    pub fn reversed(&self) -> Plan {
        Plan {
            direction: match self.direction {
                Direction::Disassembly => Direction::Assembly,
                Direction::Assembly => Direction::Disassembly,
            },
            moves: self.moves.iter().rev().map(MovePlan::reversed).collect(),
            deferral_log: self.deferral_log.clone(),
        }
    }

    pub fn executed_order(&self) -> Vec<String> {
        self.moves.iter().map(|m| m.wall_id.clone()).collect()
    }

    pub fn total_cost(&self) -> f64 {
        self.moves.iter().map(|m| m.path_cost).sum()
    }
}

struct OpenEntry {
    f: f64,
    h: f64,
    node: usize,
}

impl PartialEq for OpenEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for OpenEntry {}

impl Ord for OpenEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed comparisons make BinaryHeap a min-heap; ties break on
        // lower h, then lower row-major node index.
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| other.h.total_cmp(&self.h))
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for OpenEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A* over walkable nodes with Euclidean heuristic.
///
/// Step costs are the node-center distances (pitch for straight steps,
/// pitch * sqrt(2) for diagonals). Diagonal steps require both adjacent
/// orthogonal nodes walkable, so the path never cuts a blocked corner.
/// Returns `Ok(None)` when the goal is unreachable; blocked endpoints are a
/// precondition error, distinct from an honest no-path answer.
pub fn astar(
    grid: &Grid,
    mask: &BlockedMask,
    start: usize,
    goal: usize,
) -> Result<Option<NodePath>, EndpointError> {
    if mask.blocked(start) {
        return Err(EndpointError::StartBlocked);
    }
    if mask.blocked(goal) {
        return Err(EndpointError::GoalBlocked);
    }
    if start == goal {
        return Ok(Some(NodePath {
            nodes: vec![start],
            cost: 0.0,
        }));
    }

    let cols = grid.cols() as i64;
    let rows = grid.rows() as i64;
    let straight = grid.pitch();
    let diagonal = grid.pitch() * std::f64::consts::SQRT_2;
    let goal_center = grid.center_of(goal);
    let heuristic = |node: usize| grid.center_of(node).dist(goal_center);

    let n = grid.node_count();
    let mut g = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut closed = vec![false; n];
    let mut open = BinaryHeap::new();

    g[start] = 0.0;
    let h0 = heuristic(start);
    open.push(OpenEntry {
        f: h0,
        h: h0,
        node: start,
    });

    while let Some(entry) = open.pop() {
        let current = entry.node;
        if closed[current] {
            continue;
        }
        closed[current] = true;
        if current == goal {
            let mut nodes = Vec::new();
            let mut at = goal;
            while at != usize::MAX {
                nodes.push(at);
                at = parent[at];
            }
            nodes.reverse();
            return Ok(Some(NodePath {
                nodes,
                cost: g[goal],
            }));
        }

        let (ci, cj) = grid.coords(current);
        for (di, dj) in NEIGHBORS {
            let ni = ci as i64 + di;
            let nj = cj as i64 + dj;
            if ni < 0 || nj < 0 || ni >= cols || nj >= rows {
                continue;
            }
            let next = grid.index(ni as usize, nj as usize);
            if mask.blocked(next) || closed[next] {
                continue;
            }
            let step = if di != 0 && dj != 0 {
                // No corner cutting: both orthogonal neighbors must be open.
                let side_a = grid.index(ni as usize, cj);
                let side_b = grid.index(ci, nj as usize);
                if mask.blocked(side_a) || mask.blocked(side_b) {
                    continue;
                }
                diagonal
            } else {
                straight
            };
            let tentative = g[current] + step;
            if tentative < g[next] {
                g[next] = tentative;
                parent[next] = current;
                let h = heuristic(next);
                open.push(OpenEntry {
                    f: tentative + h,
                    h,
                    node: next,
                });
            }
        }
    }
    Ok(None)
}

/// Plan one wall's move against an explicit removed-wall set.
///
/// The walkability mask is built for this attempt, endpoints snap to the
/// nearest walkable nodes, and the returned waypoints bracket the node run
/// with the exact start and target positions.
pub fn plan_move_excluding(
    scene: &Scene,
    grid: &Grid,
    mover: usize,
    start: Pose,
    target: Pose,
    removed: &[bool],
) -> Result<MovePlan, PlanError> {
    let wall = &scene.walls[mover];
    if !scene.bounds.contains(target.position()) {
        return Err(PlanError::TargetOutsideBounds {
            wall: wall.id.clone(),
            x: target.x,
            y: target.y,
        });
    }
    let transit_yaw = target.yaw;
    let obstacles = scene.planning_obstacles(mover, removed);
    let mask = mask_from_obstacles(grid, &wall.footprint(), transit_yaw, &obstacles);

    let obstructed = |reason| PlanError::Obstructed {
        wall: wall.id.clone(),
        reason,
    };
    let start_node = snap_to_walkable(grid, &mask, start.position())
        .ok_or_else(|| obstructed(Obstruction::StartBlocked))?;
    let goal_node = snap_to_walkable(grid, &mask, target.position())
        .ok_or_else(|| obstructed(Obstruction::GoalBlocked))?;

    let path = match astar(grid, &mask, start_node, goal_node) {
        Ok(Some(path)) => path,
        Ok(None) => return Err(obstructed(Obstruction::NoPath)),
        Err(EndpointError::StartBlocked) => return Err(obstructed(Obstruction::StartBlocked)),
        Err(EndpointError::GoalBlocked) => return Err(obstructed(Obstruction::GoalBlocked)),
    };

    let mut waypoints = Vec::with_capacity(path.nodes.len() + 2);
    waypoints.push(start.position());
    for node in &path.nodes {
        let c = grid.center_of(*node);
        if waypoints.last() != Some(&c) {
            waypoints.push(c);
        }
    }
    if waypoints.last() != Some(&target.position()) {
        waypoints.push(target.position());
    }
    let path_cost = waypoints.windows(2).map(|w| w[0].dist(w[1])).sum();

    Ok(MovePlan {
        wall_id: wall.id.clone(),
        start_pose: start,
        target_pose: target,
        transit_yaw,
        waypoints,
        path_cost,
    })
}

/// Plan a single wall's move from its placed pose to `target`, with every
/// other wall standing.
pub fn plan_single_move(
    scene: &Scene,
    grid: &Grid,
    wall_id: &str,
    target: Pose,
) -> Result<MovePlan, PlanError> {
    let mover = scene.require_wall(wall_id)?;
    let removed = vec![false; scene.walls.len()];
    plan_move_excluding(scene, grid, mover, scene.walls[mover].placed_pose, target, &removed)
}

fn resolve_order(scene: &Scene, initial_order: &[String]) -> Result<Vec<usize>, PlanError> {
    let mut seen = vec![false; scene.walls.len()];
    let mut order = Vec::with_capacity(initial_order.len());
    for id in initial_order {
        let idx = scene.require_wall(id)?;
        if seen[idx] {
            return Err(PlanError::DuplicateInOrder(id.clone()));
        }
        seen[idx] = true;
        order.push(idx);
    }
    Ok(order)
}

/// Plan the removal of every wall in `initial_order`, deferring blocked walls
/// to the back of the queue until the queue drains.
///
/// Walls are attempted strictly in queue order. A successful move deletes the
/// wall from the obstacle set entirely (it has left the site). When every
/// remaining wall has deferred once in a row the run is a deadlock and the
/// error lists the stuck walls. Walls not listed in `initial_order` stay
/// standing and act as permanent obstacles.
pub fn plan_disassembly(
    scene: &Scene,
    grid: &Grid,
    initial_order: &[String],
) -> Result<Plan, PlanError> {
    let order = resolve_order(scene, initial_order)?;
    let mut queue: VecDeque<usize> = order.into();
    let mut removed = vec![false; scene.walls.len()];
    let mut moves = Vec::with_capacity(queue.len());
    let mut deferral_log = Vec::new();
    let mut rotations_since_progress = 0usize;

    while let Some(&mover) = queue.front() {
        let wall = &scene.walls[mover];
        match plan_move_excluding(
            scene,
            grid,
            mover,
            wall.placed_pose,
            wall.staging_pose,
            &removed,
        ) {
            Ok(move_plan) => {
                moves.push(move_plan);
                removed[mover] = true;
                queue.pop_front();
                rotations_since_progress = 0;
            }
            Err(PlanError::Obstructed { reason, .. }) => {
                deferral_log.push(Deferral {
                    wall_id: wall.id.clone(),
                    reason,
                });
                queue.rotate_left(1);
                rotations_since_progress += 1;
                if rotations_since_progress >= queue.len() {
                    return Err(PlanError::Deadlock {
                        direction: Direction::Disassembly,
                        stuck: queue.iter().map(|&i| scene.walls[i].id.clone()).collect(),
                    });
                }
            }
            Err(other) => return Err(other),
        }
    }

    Ok(Plan {
        direction: Direction::Disassembly,
        moves,
        deferral_log,
    })
}

/// Plan assembly by reversal: disassemble from the placed poses to the
/// staging poses, then emit the time-reversed plan. This is the single code
/// path for assembly; it is never planned forward.
///
/// `initial_order` is the removal attempt order of the underlying
/// disassembly run; the assembly order is its executed order reversed.
pub fn plan_assembly(
    scene: &Scene,
    grid: &Grid,
    initial_order: &[String],
) -> Result<Plan, PlanError> {
    match plan_disassembly(scene, grid, initial_order) {
        Ok(plan) => Ok(plan.reversed()),
        Err(PlanError::Deadlock { stuck, .. }) => Err(PlanError::Deadlock {
            direction: Direction::Assembly,
            stuck,
        }),
        Err(other) => Err(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::WorldBounds;

    fn open_grid(cols: usize, rows: usize) -> (Grid, BlockedMask) {
        let bounds = WorldBounds {
            min_x: 0.0,
            min_y: 0.0,
            max_x: cols as f64,
            max_y: rows as f64,
        };
        let grid = Grid::build(&bounds, 0.5).unwrap();
        let mask = BlockedMask::all_walkable(&grid);
        (grid, mask)
    }

    #[test]
    fn start_equals_goal_is_a_single_node_path() {
        let (grid, mask) = open_grid(5, 5);
        let path = astar(&grid, &mask, 12, 12).unwrap().unwrap();
        assert_eq!(path.nodes, vec![12]);
        assert_eq!(path.cost, 0.0);
    }

    #[test]
    fn open_corner_to_corner_is_all_diagonals() {
        let (grid, mask) = open_grid(5, 5);
        let start = grid.index(0, 0);
        let goal = grid.index(4, 4);
        let path = astar(&grid, &mask, start, goal).unwrap().unwrap();
        let expected = 4.0 * grid.pitch() * std::f64::consts::SQRT_2;
        assert!((path.cost - expected).abs() < 1e-12);
        assert_eq!(path.nodes.len(), 5);
    }

    #[test]
    fn enclosed_goal_is_no_path_not_an_error() {
        let (grid, mut mask) = open_grid(7, 7);
        // Ring of blocked nodes around the center.
        for (i, j) in [
            (2, 2),
            (3, 2),
            (4, 2),
            (2, 3),
            (4, 3),
            (2, 4),
            (3, 4),
            (4, 4),
        ] {
            mask.set_blocked(grid.index(i, j), true);
        }
        let outcome = astar(&grid, &mask, grid.index(0, 0), grid.index(3, 3)).unwrap();
        assert!(outcome.is_none());
    }

    #[test]
    fn blocked_endpoints_are_distinct_errors() {
        let (grid, mut mask) = open_grid(4, 4);
        mask.set_blocked(0, true);
        assert_eq!(
            astar(&grid, &mask, 0, 5),
            Err(EndpointError::StartBlocked)
        );
        assert_eq!(
            astar(&grid, &mask, 5, 0),
            Err(EndpointError::GoalBlocked)
        );
    }

    #[test]
    fn corner_cutting_is_forbidden() {
        let (grid, mut mask) = open_grid(3, 3);
        // Block the two orthogonal neighbors of the diagonal step (0,0)->(1,1).
        mask.set_blocked(grid.index(1, 0), true);
        mask.set_blocked(grid.index(0, 1), true);
        let outcome = astar(&grid, &mask, grid.index(0, 0), grid.index(1, 1)).unwrap();
        assert!(outcome.is_none());
    }

    #[test]
    fn reversal_is_an_involution() {
        let plan = Plan {
            direction: Direction::Disassembly,
            moves: vec![MovePlan {
                wall_id: "w1".to_string(),
                start_pose: Pose::new(1.0, 2.0, 0.0).unwrap(),
                target_pose: Pose::new(5.0, 2.0, 0.0).unwrap(),
                transit_yaw: 0.0,
                waypoints: vec![
                    Point::new(1.0, 2.0),
                    Point::new(2.5, 2.5),
                    Point::new(5.0, 2.0),
                ],
                path_cost: 4.2,
            }],
            deferral_log: vec![],
        };
        assert_eq!(plan.reversed().reversed(), plan);
        let reversed = plan.reversed();
        assert_eq!(reversed.direction, Direction::Assembly);
        assert_eq!(reversed.moves[0].waypoints[0], Point::new(5.0, 2.0));
    }
}
