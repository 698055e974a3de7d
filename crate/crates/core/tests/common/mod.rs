//! Independent oracles shared by the integration tests. Everything here is
//! deliberately written from scratch against first principles rather than
//! reusing the library's collision or search internals.

#![allow(dead_code)]

use wallplan::geometry::{Footprint, OrientedRect, Point, Pose};
use wallplan::grid::Grid;
use wallplan::planner::{plan_move_excluding, PlanError};
use wallplan::scene::Scene;

/// Point-in-rectangle by rotating into the rectangle's frame.
pub fn point_in_rect(p: Point, rect: &OrientedRect) -> bool {
    let (s, c) = rect.pose.yaw.sin_cos();
    let dx = p.x - rect.pose.x;
    let dy = p.y - rect.pose.y;
    let local_x = dx * c + dy * s;
    let local_y = -dx * s + dy * c;
    local_x.abs() <= rect.footprint.half_length && local_y.abs() <= rect.footprint.half_thickness
}

fn sample_points(rect: &OrientedRect, per_side: usize) -> Vec<Point> {
    let (s, c) = rect.pose.yaw.sin_cos();
    let mut points = Vec::with_capacity((per_side + 1) * (per_side + 1));
    for i in 0..=per_side {
        for j in 0..=per_side {
            let u = (2.0 * i as f64 / per_side as f64 - 1.0) * rect.footprint.half_length;
            let v = (2.0 * j as f64 / per_side as f64 - 1.0) * rect.footprint.half_thickness;
            points.push(Point::new(
                rect.pose.x + u * c - v * s,
                rect.pose.y + u * s + v * c,
            ));
        }
    }
    points
}

/// Dense containment oracle: cover each rectangle with a grid of sample
/// points and look for any point landing inside the other rectangle.
/// `per_side = 100` yields 10201 samples per rectangle.
pub fn overlap_by_point_sampling(a: &OrientedRect, b: &OrientedRect, per_side: usize) -> bool {
    sample_points(a, per_side).into_iter().any(|p| point_in_rect(p, b))
        || sample_points(b, per_side).into_iter().any(|p| point_in_rect(p, a))
}

fn project(points: &[Point], axis: Point) -> (f64, f64) {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for p in points {
        let v = p.x * axis.x + p.y * axis.y;
        min = min.min(v);
        max = max.max(v);
    }
    (min, max)
}

/// Signed separation margin between two rectangles over the four face
/// normals: positive = overlap depth, negative = clearance gap. Used only to
/// skip razor-edge random cases that no sampling oracle can decide.
pub fn rect_margin(a: &OrientedRect, b: &OrientedRect) -> f64 {
    let ca = a.corners();
    let cb = b.corners();
    let mut margin = f64::INFINITY;
    for axis in a.axes().into_iter().chain(b.axes()) {
        let (amin, amax) = project(&ca, axis);
        let (bmin, bmax) = project(&cb, axis);
        margin = margin.min(amax.min(bmax) - amin.max(bmin));
    }
    margin
}

/// Andrew's monotone chain; returns the hull in counterclockwise order.
pub fn convex_hull(mut points: Vec<Point>) -> Vec<Point> {
    points.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    points.dedup_by(|a, b| a.x == b.x && a.y == b.y);
    if points.len() <= 2 {
        return points;
    }
    let cross =
        |o: Point, a: Point, b: Point| (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    let mut lower: Vec<Point> = Vec::new();
    for &p in &points {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::new();
    for &p in points.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Separating-axis test for two convex polygons, closed semantics.
pub fn polygons_intersect(a: &[Point], b: &[Point]) -> bool {
    for (poly, other) in [(a, b), (b, a)] {
        for i in 0..poly.len() {
            let p = poly[i];
            let q = poly[(i + 1) % poly.len()];
            let axis = Point::new(p.y - q.y, q.x - p.x);
            let (amin, amax) = project(poly, axis);
            let (bmin, bmax) = project(other, axis);
            if amin > bmax || bmin > amax {
                return false;
            }
        }
    }
    true
}

/// Exact swept region of a fixed-yaw rectangle translated from `from` to
/// `to`: the convex hull of its corners at both endpoints.
pub fn swept_hull(footprint: &Footprint, yaw: f64, from: Point, to: Point) -> Vec<Point> {
    let rect_at = |p: Point| {
        OrientedRect::new(
            Pose {
                x: p.x,
                y: p.y,
                yaw,
            },
            *footprint,
        )
    };
    let mut corners = rect_at(from).corners().to_vec();
    corners.extend(rect_at(to).corners());
    convex_hull(corners)
}

/// Exact continuous-collision oracle for a fixed-yaw translation.
pub fn exact_swept_overlap(
    footprint: &Footprint,
    yaw: f64,
    from: Point,
    to: Point,
    obstacle: &OrientedRect,
) -> bool {
    let hull = swept_hull(footprint, yaw, from, to);
    polygons_intersect(&hull, &obstacle.corners())
}

/// Signed margin between the swept hull and an obstacle, over every edge
/// normal of both polygons (normalized so margins are in meters).
pub fn swept_margin(
    footprint: &Footprint,
    yaw: f64,
    from: Point,
    to: Point,
    obstacle: &OrientedRect,
) -> f64 {
    let hull = swept_hull(footprint, yaw, from, to);
    let obs: Vec<Point> = obstacle.corners().to_vec();
    let mut margin = f64::INFINITY;
    for (poly, other) in [(&hull, &obs), (&obs, &hull)] {
        for i in 0..poly.len() {
            let p = poly[i];
            let q = poly[(i + 1) % poly.len()];
            let mut axis = Point::new(p.y - q.y, q.x - p.x);
            let len = axis.norm();
            if len < 1e-12 {
                continue;
            }
            axis = axis * (1.0 / len);
            let (amin, amax) = project(poly, axis);
            let (bmin, bmax) = project(other, axis);
            margin = margin.min(amax.min(bmax) - amin.max(bmin));
        }
    }
    margin
}

/// Replay a full disassembly order move by move; true when every wall can
/// reach its staging pose in that order.
pub fn order_is_feasible(scene: &Scene, grid: &Grid, order: &[usize]) -> bool {
    let mut removed = vec![false; scene.walls.len()];
    for &mover in order {
        let wall = &scene.walls[mover];
        match plan_move_excluding(
            scene,
            grid,
            mover,
            wall.placed_pose,
            wall.staging_pose,
            &removed,
        ) {
            Ok(_) => removed[mover] = true,
            Err(PlanError::Obstructed { .. }) => return false,
            Err(other) => panic!("unexpected planner error in oracle: {other}"),
        }
    }
    true
}

/// Exhaustive search over all removal orders. Movability depends only on the
/// set of walls still standing, so attempts are memoized on
/// (wall, remaining-set); the search still covers every order.
pub fn find_feasible_order(scene: &Scene, grid: &Grid) -> Option<Vec<usize>> {
    let n = scene.walls.len();
    assert!(n <= 16, "exhaustive oracle is for small scenes");
    let mut memo: std::collections::HashMap<(usize, u32), bool> = std::collections::HashMap::new();
    let mut order = Vec::with_capacity(n);
    let full: u32 = (1 << n) - 1;

    fn dfs(
        scene: &Scene,
        grid: &Grid,
        remaining: u32,
        memo: &mut std::collections::HashMap<(usize, u32), bool>,
        order: &mut Vec<usize>,
    ) -> bool {
        if remaining == 0 {
            return true;
        }
        for mover in 0..scene.walls.len() {
            if remaining & (1 << mover) == 0 {
                continue;
            }
            let movable = *memo.entry((mover, remaining)).or_insert_with(|| {
                let removed: Vec<bool> = (0..scene.walls.len())
                    .map(|i| remaining & (1 << i) == 0)
                    .collect();
                let wall = &scene.walls[mover];
                matches!(
                    plan_move_excluding(
                        scene,
                        grid,
                        mover,
                        wall.placed_pose,
                        wall.staging_pose,
                        &removed,
                    ),
                    Ok(_)
                )
            });
            if movable {
                order.push(mover);
                if dfs(scene, grid, remaining & !(1 << mover), memo, order) {
                    return true;
                }
                order.pop();
            }
        }
        false
    }

    if dfs(scene, grid, full, &mut memo, &mut order) {
        Some(order)
    } else {
        None
    }
}

/// Every feasible order of a small scene, by plain enumeration over all
/// permutations.
pub fn all_feasible_orders(scene: &Scene, grid: &Grid) -> Vec<Vec<usize>> {
    let n = scene.walls.len();
    assert!(n <= 6, "plain enumeration is for tiny scenes");
    let mut orders = Vec::new();
    let mut indices: Vec<usize> = (0..n).collect();
    permute(&mut indices, 0, &mut |order| {
        if order_is_feasible(scene, grid, order) {
            orders.push(order.to_vec());
        }
    });
    orders
}

fn permute(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}
