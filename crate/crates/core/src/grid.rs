//! The node grid over the world and per-mover walkability masks.
//!
//! A node's pitch is twice the node radius; node (i, j) sits at
//! `origin + ((i + 0.5) * pitch, (j + 0.5) * pitch)`. A node is blocked for a
//! given mover when the mover's rectangle, centered on the node at its
//! transit yaw, overlaps any obstacle. Blocked nodes are hard obstacles for
//! the search: they are never expanded. Blocking is evaluated at node centers
//! only; what happens between nodes is the verifier's business.

use crate::geometry::{rect_overlap, Footprint, OrientedRect, Point, Pose};
use crate::scene::{Scene, SceneError, WorldBounds};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("node radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("world bounds must span a positive area")]
    DegenerateBounds,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    origin: Point,
    radius: f64,
    cols: usize,
    rows: usize,
}

impl Grid {
    /// Cover `bounds` with nodes of the given radius.
    ///
    /// Column and row counts are `ceil(extent / pitch)`, so the final row and
    /// column may overhang the raw bounds by less than one pitch.
    pub fn build(bounds: &WorldBounds, radius: f64) -> Result<Grid, GridError> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(GridError::InvalidRadius(radius));
        }
        if !bounds.is_valid() {
            return Err(GridError::DegenerateBounds);
        }
        let pitch = 2.0 * radius;
        let cols = (bounds.width() / pitch).ceil() as usize;
        let rows = (bounds.height() / pitch).ceil() as usize;
        Ok(Grid {
            origin: Point::new(bounds.min_x, bounds.min_y),
            radius,
            cols: cols.max(1),
            rows: rows.max(1),
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn pitch(&self) -> f64 {
        2.0 * self.radius
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn node_count(&self) -> usize {
        self.cols * self.rows
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.cols && j < self.rows);
        j * self.cols + i
    }

    pub fn coords(&self, index: usize) -> (usize, usize) {
        (index % self.cols, index / self.cols)
    }

    pub fn center(&self, i: usize, j: usize) -> Point {
        let pitch = self.pitch();
        Point::new(
            self.origin.x + (i as f64 + 0.5) * pitch,
            self.origin.y + (j as f64 + 0.5) * pitch,
        )
    }

    pub fn center_of(&self, index: usize) -> Point {
        let (i, j) = self.coords(index);
        self.center(i, j)
    }

    /// Grid cell whose node center is nearest to `p` (boundary points resolve
    /// to the higher cell; everything clamps into the grid).
    pub fn cell_containing(&self, p: Point) -> (usize, usize) {
        let pitch = self.pitch();
        let fi = ((p.x - self.origin.x) / pitch).floor();
        let fj = ((p.y - self.origin.y) / pitch).floor();
        let i = (fi.max(0.0) as usize).min(self.cols - 1);
        let j = (fj.max(0.0) as usize).min(self.rows - 1);
        (i, j)
    }
}

/// Per-mover walkability layer: one bit per node, true = unwalkable.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockedMask {
    cols: usize,
    rows: usize,
    bits: Vec<bool>,
}

impl BlockedMask {
    pub fn all_walkable(grid: &Grid) -> Self {
        Self {
            cols: grid.cols(),
            rows: grid.rows(),
            bits: vec![false; grid.node_count()],
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn blocked(&self, index: usize) -> bool {
        self.bits[index]
    }

    pub fn set_blocked(&mut self, index: usize, blocked: bool) {
        self.bits[index] = blocked;
    }

    pub fn blocked_count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }
}

/// Walkability mask for moving `mover_fp` at `transit_yaw` through the given
/// obstacle set: a node is blocked when the mover centered there overlaps any
/// obstacle.
pub fn mask_from_obstacles(
    grid: &Grid,
    mover_fp: &Footprint,
    transit_yaw: f64,
    obstacles: &[OrientedRect],
) -> BlockedMask {
    let mut mask = BlockedMask::all_walkable(grid);
    if obstacles.is_empty() {
        return mask;
    }
    let mover_radius = mover_fp.circumradius();
    let reach: Vec<f64> = obstacles
        .iter()
        .map(|o| mover_radius + o.footprint.circumradius())
        .collect();
    for j in 0..grid.rows() {
        for i in 0..grid.cols() {
            let center = grid.center(i, j);
            let pose = Pose {
                x: center.x,
                y: center.y,
                yaw: transit_yaw,
            };
            let rect = OrientedRect::new(pose, *mover_fp);
            for (k, obstacle) in obstacles.iter().enumerate() {
                if center.dist(obstacle.pose.position()) > reach[k] {
                    continue;
                }
                if rect_overlap(&rect, obstacle) {
                    mask.set_blocked(grid.index(i, j), true);
                    break;
                }
            }
        }
    }
    mask
}

/// Mask for moving a wall through the full scene (no walls removed yet). The
/// mover itself is never an obstacle.
pub fn occupancy_mask(
    grid: &Grid,
    scene: &Scene,
    mover_id: &str,
    transit_yaw: f64,
) -> Result<BlockedMask, SceneError> {
    let mover = scene.require_wall(mover_id)?;
    let removed = vec![false; scene.walls.len()];
    let obstacles = scene.planning_obstacles(mover, &removed);
    Ok(mask_from_obstacles(
        grid,
        &scene.walls[mover].footprint(),
        transit_yaw,
        &obstacles,
    ))
}

/// Snap a world point to a walkable node: nearest node first, then its eight
/// surrounding nodes in row-major order. `None` when all nine are blocked.
pub fn snap_to_walkable(grid: &Grid, mask: &BlockedMask, p: Point) -> Option<usize> {
    let (i, j) = grid.cell_containing(p);
    let index = grid.index(i, j);
    if !mask.blocked(index) {
        return Some(index);
    }
    for dj in -1i64..=1 {
        for di in -1i64..=1 {
            if di == 0 && dj == 0 {
                continue;
            }
            let ni = i as i64 + di;
            let nj = j as i64 + dj;
            if ni < 0 || nj < 0 || ni >= grid.cols() as i64 || nj >= grid.rows() as i64 {
                continue;
            }
            let idx = grid.index(ni as usize, nj as usize);
            if !mask.blocked(idx) {
                return Some(idx);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bounds(w: f64, h: f64) -> WorldBounds {
        WorldBounds {
            min_x: 0.0,
            min_y: 0.0,
            max_x: w,
            max_y: h,
        }
    }

    #[test]
    fn node_counts_follow_the_pitch() {
        let g = Grid::build(&bounds(10.0, 10.0), 1.0).unwrap();
        assert_eq!((g.cols(), g.rows()), (5, 5));
        assert_eq!(g.node_count(), 25);

        let g = Grid::build(&bounds(10.0, 10.0), 0.5).unwrap();
        assert_eq!(g.node_count(), 100);
    }

    #[test]
    fn first_node_center_is_offset_by_the_radius() {
        let g = Grid::build(&bounds(10.0, 10.0), 1.0).unwrap();
        let c = g.center(0, 0);
        assert_eq!((c.x, c.y), (1.0, 1.0));
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        assert_eq!(
            Grid::build(&bounds(10.0, 10.0), 0.0),
            Err(GridError::InvalidRadius(0.0))
        );
        assert!(Grid::build(&bounds(10.0, 10.0), -1.0).is_err());
        assert_eq!(
            Grid::build(&bounds(0.0, 10.0), 1.0),
            Err(GridError::DegenerateBounds)
        );
    }

    #[test]
    fn cell_containing_clamps_and_uses_floor() {
        let g = Grid::build(&bounds(10.0, 10.0), 0.5).unwrap();
        assert_eq!(g.cell_containing(Point::new(0.2, 0.2)), (0, 0));
        assert_eq!(g.cell_containing(Point::new(1.0, 0.2)), (1, 0));
        assert_eq!(g.cell_containing(Point::new(-3.0, 50.0)), (0, 9));
    }

    #[test]
    fn snap_falls_back_to_the_ring_then_fails() {
        let g = Grid::build(&bounds(4.0, 4.0), 0.5).unwrap();
        let mut mask = BlockedMask::all_walkable(&g);
        let p = Point::new(2.0, 2.0);
        let (i, j) = g.cell_containing(p);
        mask.set_blocked(g.index(i, j), true);
        let snapped = snap_to_walkable(&g, &mask, p).unwrap();
        assert_ne!(snapped, g.index(i, j));

        for dj in -1i64..=1 {
            for di in -1i64..=1 {
                let ni = (i as i64 + di) as usize;
                let nj = (j as i64 + dj) as usize;
                mask.set_blocked(g.index(ni, nj), true);
            }
        }
        assert_eq!(snap_to_walkable(&g, &mask, p), None);
    }
}
