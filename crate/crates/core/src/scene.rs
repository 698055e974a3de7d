//! Scene files: world bounds plus wall panels with placed and staging poses.
//!
//! The on-disk format is JSON with an explicit `schema_version`. Lengths are
//! meters and angles radians throughout.

use crate::geometry::{rect_overlap, Footprint, OrientedRect, Point, Pose};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("failed to parse {path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
    #[error("unsupported schema_version {0} (expected {SCHEMA_VERSION})")]
    SchemaVersion(u32),
    #[error("world bounds are degenerate: ({min_x}, {min_y}) .. ({max_x}, {max_y})")]
    DegenerateBounds {
        min_x: f64,
        min_y: f64,
        max_x: f64,
        max_y: f64,
    },
    #[error("inflation_margin must be finite and non-negative, got {0}")]
    BadInflation(f64),
    #[error("{kind} \"{id}\": half extents must be positive and finite, got {half_length} x {half_thickness}")]
    BadFootprint {
        kind: &'static str,
        id: String,
        half_length: f64,
        half_thickness: f64,
    },
    #[error("{kind} \"{id}\": {which} has non-finite fields")]
    NonFinitePose {
        kind: &'static str,
        id: String,
        which: &'static str,
    },
    #[error("{kind} \"{id}\": {which} ({x}, {y}) lies outside the world bounds")]
    PoseOutsideBounds {
        kind: &'static str,
        id: String,
        which: &'static str,
        x: f64,
        y: f64,
    },
    #[error("empty id is not allowed")]
    EmptyId,
    #[error("duplicate id \"{0}\"")]
    DuplicateId(String),
    #[error("placed walls \"{a}\" and \"{b}\" overlap")]
    PlacedOverlap { a: String, b: String },
    #[error("staging poses of walls \"{a}\" and \"{b}\" overlap")]
    StagingOverlap { a: String, b: String },
    #[error("placed wall \"{wall}\" overlaps obstacle \"{obstacle}\"")]
    WallOverlapsObstacle { wall: String, obstacle: String },
    #[error("unknown wall id \"{0}\"")]
    UnknownWall(String),
}

/// Axis-aligned world bounds in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldBounds {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl WorldBounds {
    pub fn width(&self) -> f64 {
        self.max_x - self.min_x
    }

    pub fn height(&self) -> f64 {
        self.max_y - self.min_y
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min_x && p.x <= self.max_x && p.y >= self.min_y && p.y <= self.max_y
    }

    pub fn is_valid(&self) -> bool {
        [self.min_x, self.min_y, self.max_x, self.max_y]
            .iter()
            .all(|v| v.is_finite())
            && self.max_x > self.min_x
            && self.max_y > self.min_y
    }
}

/// A prefabricated wall panel with its installed and staging poses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Wall {
    pub id: String,
    pub half_length: f64,
    pub half_thickness: f64,
    pub placed_pose: Pose,
    pub staging_pose: Pose,
}

impl Wall {
    pub fn footprint(&self) -> Footprint {
        Footprint {
            half_length: self.half_length,
            half_thickness: self.half_thickness,
        }
    }

    pub fn placed_rect(&self) -> OrientedRect {
        OrientedRect::new(self.placed_pose, self.footprint())
    }

    pub fn staging_rect(&self) -> OrientedRect {
        OrientedRect::new(self.staging_pose, self.footprint())
    }
}

/// A fixed obstacle that never moves (columns, cores, stockpiles).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StaticObstacle {
    pub id: String,
    pub half_length: f64,
    pub half_thickness: f64,
    pub pose: Pose,
}

impl StaticObstacle {
    pub fn rect(&self) -> OrientedRect {
        OrientedRect::new(
            self.pose,
            Footprint {
                half_length: self.half_length,
                half_thickness: self.half_thickness,
            },
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub schema_version: u32,
    pub bounds: WorldBounds,
    /// Extra clearance added to every obstacle footprint when building
    /// walkability masks. Zero by default.
    #[serde(default)]
    pub inflation_margin: f64,
    pub walls: Vec<Wall>,
    #[serde(default)]
    pub obstacles: Vec<StaticObstacle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

impl Scene {
    pub fn new(bounds: WorldBounds, walls: Vec<Wall>, obstacles: Vec<StaticObstacle>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            bounds,
            inflation_margin: 0.0,
            walls,
            obstacles,
            notes: None,
        }
    }

    /// Load a scene file, normalize pose yaws, and validate every invariant.
    pub fn load(path: impl AsRef<Path>) -> Result<Scene, SceneError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| SceneError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Scene::from_json(&text, &path.display().to_string())
    }

    pub fn from_json(text: &str, origin: &str) -> Result<Scene, SceneError> {
        let mut scene: Scene = serde_json::from_str(text).map_err(|source| SceneError::Parse {
            path: origin.to_string(),
            source,
        })?;
        scene.normalize();
        scene.validate()?;
        Ok(scene)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), SceneError> {
        let path = path.as_ref();
        let mut text = serde_json::to_string_pretty(self).expect("scene serializes");
        text.push('\n');
        fs::write(path, text).map_err(|source| SceneError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("scene serializes");
        text.push('\n');
        text
    }

    fn normalize(&mut self) {
        for wall in &mut self.walls {
            wall.placed_pose = wall.placed_pose.normalized();
            wall.staging_pose = wall.staging_pose.normalized();
        }
        for obstacle in &mut self.obstacles {
            obstacle.pose = obstacle.pose.normalized();
        }
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(SceneError::SchemaVersion(self.schema_version));
        }
        if !self.bounds.is_valid() {
            return Err(SceneError::DegenerateBounds {
                min_x: self.bounds.min_x,
                min_y: self.bounds.min_y,
                max_x: self.bounds.max_x,
                max_y: self.bounds.max_y,
            });
        }
        if !(self.inflation_margin.is_finite() && self.inflation_margin >= 0.0) {
            return Err(SceneError::BadInflation(self.inflation_margin));
        }

        let mut seen = std::collections::HashSet::new();
        for wall in &self.walls {
            if wall.id.is_empty() {
                return Err(SceneError::EmptyId);
            }
            if !seen.insert(wall.id.clone()) {
                return Err(SceneError::DuplicateId(wall.id.clone()));
            }
            self.check_footprint("wall", &wall.id, wall.half_length, wall.half_thickness)?;
            self.check_pose("wall", &wall.id, "placed_pose", &wall.placed_pose)?;
            self.check_pose("wall", &wall.id, "staging_pose", &wall.staging_pose)?;
        }
        for obstacle in &self.obstacles {
            if obstacle.id.is_empty() {
                return Err(SceneError::EmptyId);
            }
            if !seen.insert(obstacle.id.clone()) {
                return Err(SceneError::DuplicateId(obstacle.id.clone()));
            }
            self.check_footprint(
                "obstacle",
                &obstacle.id,
                obstacle.half_length,
                obstacle.half_thickness,
            )?;
            self.check_pose("obstacle", &obstacle.id, "pose", &obstacle.pose)?;
        }

        for (i, a) in self.walls.iter().enumerate() {
            for b in &self.walls[i + 1..] {
                if rect_overlap(&a.placed_rect(), &b.placed_rect()) {
                    return Err(SceneError::PlacedOverlap {
                        a: a.id.clone(),
                        b: b.id.clone(),
                    });
                }
                if rect_overlap(&a.staging_rect(), &b.staging_rect()) {
                    return Err(SceneError::StagingOverlap {
                        a: a.id.clone(),
                        b: b.id.clone(),
                    });
                }
            }
            for obstacle in &self.obstacles {
                if rect_overlap(&a.placed_rect(), &obstacle.rect()) {
                    return Err(SceneError::WallOverlapsObstacle {
                        wall: a.id.clone(),
                        obstacle: obstacle.id.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    fn check_footprint(
        &self,
        kind: &'static str,
        id: &str,
        half_length: f64,
        half_thickness: f64,
    ) -> Result<(), SceneError> {
        if Footprint::new(half_length, half_thickness).is_err() {
            return Err(SceneError::BadFootprint {
                kind,
                id: id.to_string(),
                half_length,
                half_thickness,
            });
        }
        Ok(())
    }

    fn check_pose(
        &self,
        kind: &'static str,
        id: &str,
        which: &'static str,
        pose: &Pose,
    ) -> Result<(), SceneError> {
        if !pose.is_finite() {
            return Err(SceneError::NonFinitePose {
                kind,
                id: id.to_string(),
                which,
            });
        }
        if !self.bounds.contains(pose.position()) {
            return Err(SceneError::PoseOutsideBounds {
                kind,
                id: id.to_string(),
                which,
                x: pose.x,
                y: pose.y,
            });
        }
        Ok(())
    }

    pub fn wall_index(&self, id: &str) -> Option<usize> {
        self.walls.iter().position(|w| w.id == id)
    }

    pub fn require_wall(&self, id: &str) -> Result<usize, SceneError> {
        self.wall_index(id)
            .ok_or_else(|| SceneError::UnknownWall(id.to_string()))
    }

    pub fn wall_ids(&self) -> Vec<String> {
        self.walls.iter().map(|w| w.id.clone()).collect()
    }

    /// Configuration-space obstacles seen by `mover` mid-transit: every other
    /// wall still standing at its placed pose plus all static obstacles, each
    /// inflated by the scene margin. Walls flagged in `removed` have left the
    /// site and are skipped entirely.
    pub fn planning_obstacles(&self, mover: usize, removed: &[bool]) -> Vec<OrientedRect> {
        let margin = self.inflation_margin;
        let mut rects = Vec::with_capacity(self.walls.len() + self.obstacles.len());
        for (i, wall) in self.walls.iter().enumerate() {
            if i == mover || removed.get(i).copied().unwrap_or(false) {
                continue;
            }
            rects.push(OrientedRect::new(
                wall.placed_pose,
                wall.footprint().inflated(margin),
            ));
        }
        for obstacle in &self.obstacles {
            let mut rect = obstacle.rect();
            rect.footprint = rect.footprint.inflated(margin);
            rects.push(rect);
        }
        rects
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pose(x: f64, y: f64, yaw: f64) -> Pose {
        Pose::new(x, y, yaw).unwrap()
    }

    fn wall(id: &str, placed: Pose, staging: Pose) -> Wall {
        Wall {
            id: id.to_string(),
            half_length: 2.0,
            half_thickness: 0.1,
            placed_pose: placed,
            staging_pose: staging,
        }
    }

    fn bounds() -> WorldBounds {
        WorldBounds {
            min_x: 0.0,
            min_y: 0.0,
            max_x: 20.0,
            max_y: 20.0,
        }
    }

    #[test]
    fn duplicate_wall_id_names_the_id() {
        let scene = Scene::new(
            bounds(),
            vec![
                wall("w1", pose(5.0, 5.0, 0.0), pose(5.0, 1.0, 0.0)),
                wall("w1", pose(12.0, 5.0, 0.0), pose(12.0, 1.0, 0.0)),
            ],
            vec![],
        );
        match scene.validate() {
            Err(SceneError::DuplicateId(id)) => assert_eq!(id, "w1"),
            other => panic!("expected duplicate id error, got {other:?}"),
        }
    }

    #[test]
    fn staging_pose_outside_bounds_is_rejected() {
        let scene = Scene::new(
            bounds(),
            vec![wall("w1", pose(5.0, 5.0, 0.0), pose(25.0, 1.0, 0.0))],
            vec![],
        );
        match scene.validate() {
            Err(SceneError::PoseOutsideBounds { id, which, .. }) => {
                assert_eq!(id, "w1");
                assert_eq!(which, "staging_pose");
            }
            other => panic!("expected out-of-bounds error, got {other:?}"),
        }
    }

    #[test]
    fn overlapping_placed_walls_are_rejected() {
        let scene = Scene::new(
            bounds(),
            vec![
                wall("w1", pose(5.0, 5.0, 0.0), pose(4.0, 1.0, 0.0)),
                wall("w2", pose(6.0, 5.0, 0.0), pose(12.0, 1.0, 0.0)),
            ],
            vec![],
        );
        match scene.validate() {
            Err(SceneError::PlacedOverlap { a, b }) => {
                assert_eq!((a.as_str(), b.as_str()), ("w1", "w2"));
            }
            other => panic!("expected placed overlap error, got {other:?}"),
        }
    }

    #[test]
    fn json_round_trip_preserves_the_scene() {
        let scene = Scene::new(
            bounds(),
            vec![wall("w1", pose(5.0, 5.0, 1.25), pose(5.0, 1.0, 0.0))],
            vec![StaticObstacle {
                id: "pillar".to_string(),
                half_length: 0.9,
                half_thickness: 0.9,
                pose: pose(15.0, 15.0, 0.0),
            }],
        );
        let text = scene.to_json();
        let back = Scene::from_json(&text, "inline").unwrap();
        assert_eq!(scene, back);
    }

    #[test]
    fn unknown_wall_lookup_errors() {
        let scene = Scene::new(bounds(), vec![], vec![]);
        assert!(matches!(
            scene.require_wall("ghost"),
            Err(SceneError::UnknownWall(id)) if id == "ghost"
        ));
    }
}
