//! Grid-resolution versus wall-count timing study.
//!
//! Each (scene, radius) cell times the planning path only: grid construction,
//! mask building, search, and scheduling. File I/O and verification run
//! outside the timed region. Collision counts come from the verifier at the
//! default sample step, and a cell that deadlocks is flagged rather than
//! aborting the table.

use crate::grid::Grid;
use crate::planner::{plan_disassembly, Plan, PlanError};
use crate::scene::{Scene, SceneError};
use crate::verifier::{default_sample_step, verify_plan};
use serde::Serialize;
use std::fmt::Write as _;
use std::sync::Mutex;
use std::time::Instant;
use thiserror::Error;

/// Thread count for running benchmark cells in parallel. Defaults to 1 so
/// timings are not co-scheduled.
pub const THREADS_ENV: &str = "WALLPLAN_BENCH_THREADS";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("repetitions must be at least 3, got {0}")]
    TooFewRepetitions(usize),
    #[error("no scenes given")]
    NoScenes,
    #[error("no radii given")]
    NoRadii,
    #[error("scene \"{name}\": {message}")]
    SceneFailed { name: String, message: String },
}

#[derive(Debug, Clone)]
pub struct BenchScene {
    pub name: String,
    pub scene: Scene,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub scene: String,
    pub wall_count: usize,
    pub radius: f64,
    pub repetitions: usize,
    pub median_planning_seconds: f64,
    pub total_path_cost: Option<f64>,
    pub collision_count: Option<usize>,
    pub deadlocked: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchMetadata {
    pub timing: String,
    pub sample_step_rule: String,
    pub repetitions: usize,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchTable {
    pub metadata: BenchMetadata,
    pub rows: Vec<BenchRow>,
}

fn threads_from_env() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(1)
}

struct CellResult {
    seconds: Vec<f64>,
    plan: Option<Plan>,
    deadlocked: bool,
}

fn run_cell(scene: &Scene, radius: f64, repetitions: usize) -> Result<CellResult, String> {
    let order = scene.wall_ids();
    let mut seconds = Vec::with_capacity(repetitions);
    let mut plan: Option<Plan> = None;
    let mut deadlocked = false;
    // One untimed warmup keeps first-touch costs out of the medians.
    {
        let grid = Grid::build(&scene.bounds, radius).map_err(|e| e.to_string())?;
        let _ = plan_disassembly(scene, &grid, &order);
    }
    for _ in 0..repetitions {
        let started = Instant::now();
        let grid = Grid::build(&scene.bounds, radius).map_err(|e| e.to_string())?;
        let outcome = plan_disassembly(scene, &grid, &order);
        seconds.push(started.elapsed().as_secs_f64());
        match outcome {
            Ok(p) => {
                if let Some(previous) = &plan {
                    debug_assert_eq!(previous, &p, "planning must be deterministic");
                }
                plan = Some(p);
            }
            Err(PlanError::Deadlock { .. }) => deadlocked = true,
            Err(other) => return Err(other.to_string()),
        }
    }
    Ok(CellResult {
        seconds,
        plan,
        deadlocked,
    })
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Run every (scene, radius) cell `repetitions` times and tabulate median
/// planning time, total path cost, verifier collision count, and deadlocks.
pub fn run_benchmark(
    scenes: &[BenchScene],
    radii: &[f64],
    repetitions: usize,
) -> Result<BenchTable, BenchError> {
    if repetitions < 3 {
        return Err(BenchError::TooFewRepetitions(repetitions));
    }
    if scenes.is_empty() {
        return Err(BenchError::NoScenes);
    }
    if radii.is_empty() {
        return Err(BenchError::NoRadii);
    }
    for entry in scenes {
        entry
            .scene
            .validate()
            .map_err(|e: SceneError| BenchError::SceneFailed {
                name: entry.name.clone(),
                message: e.to_string(),
            })?;
    }

    let cells: Vec<(usize, usize)> = (0..scenes.len())
        .flat_map(|s| (0..radii.len()).map(move |r| (s, r)))
        .collect();
    let threads = threads_from_env();
    let mut rows: Vec<Option<BenchRow>> = vec![None; cells.len()];

    let build_row = |scene_idx: usize, radius_idx: usize| -> Result<BenchRow, BenchError> {
        let entry = &scenes[scene_idx];
        let radius = radii[radius_idx];
        let result =
            run_cell(&entry.scene, radius, repetitions).map_err(|message| {
                BenchError::SceneFailed {
                    name: entry.name.clone(),
                    message,
                }
            })?;
        let mut seconds = result.seconds;
        let (total_path_cost, collision_count) = match &result.plan {
            Some(plan) => {
                let step = default_sample_step(&entry.scene, radius);
                let report = verify_plan(&entry.scene, plan, step).map_err(|e| {
                    BenchError::SceneFailed {
                        name: entry.name.clone(),
                        message: e.to_string(),
                    }
                })?;
                (Some(plan.total_cost()), Some(report.violations.len()))
            }
            None => (None, None),
        };
        Ok(BenchRow {
            scene: entry.name.clone(),
            wall_count: entry.scene.walls.len(),
            radius,
            repetitions,
            median_planning_seconds: median(&mut seconds),
            total_path_cost,
            collision_count,
            deadlocked: result.deadlocked,
        })
    };

    if threads <= 1 {
        for (k, &(s, r)) in cells.iter().enumerate() {
            rows[k] = Some(build_row(s, r)?);
        }
    } else {
        let next = Mutex::new(0usize);
        let out = Mutex::new(&mut rows);
        let failure: Mutex<Option<BenchError>> = Mutex::new(None);
        std::thread::scope(|scope| {
            for _ in 0..threads.min(cells.len()) {
                scope.spawn(|| loop {
                    let k = {
                        let mut guard = next.lock().unwrap();
                        let k = *guard;
                        if k >= cells.len() {
                            return;
                        }
                        *guard += 1;
                        k
                    };
                    let (s, r) = cells[k];
                    match build_row(s, r) {
                        Ok(row) => out.lock().unwrap()[k] = Some(row),
                        Err(e) => {
                            failure.lock().unwrap().get_or_insert(e);
                            return;
                        }
                    }
                });
            }
        });
        if let Some(e) = failure.into_inner().unwrap() {
            return Err(e);
        }
    }

    Ok(BenchTable {
        metadata: BenchMetadata {
            timing: "median wall-clock planning time per cell: grid build + masks + \
                     search + scheduling; excludes file I/O and verification"
                .to_string(),
            sample_step_rule: "min(grid radius, min wall half_thickness) / 2".to_string(),
            repetitions,
            threads,
        },
        rows: rows.into_iter().map(|r| r.expect("cell computed")).collect(),
    })
}

impl BenchTable {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("table serializes");
        text.push('\n');
        text
    }

    /// Human-readable grid: radii down, scenes across. Starred cells had
    /// verifier collisions; deadlocked cells print D.
    pub fn render_text(&self) -> String {
        let mut scenes: Vec<&str> = Vec::new();
        let mut radii: Vec<f64> = Vec::new();
        for row in &self.rows {
            if !scenes.contains(&row.scene.as_str()) {
                scenes.push(&row.scene);
            }
            if !radii.iter().any(|r| r == &row.radius) {
                radii.push(row.radius);
            }
        }

        let mut text = String::new();
        let _ = writeln!(text, "median planning time (s); {}", self.metadata.timing);
        let _ = write!(text, "{:>8}", "radius");
        for scene in &scenes {
            let _ = write!(text, " {scene:>16}");
        }
        text.push('\n');
        let mut any_starred = false;
        for &radius in &radii {
            let _ = write!(text, "{radius:>8.2}");
            for scene in &scenes {
                let row = self
                    .rows
                    .iter()
                    .find(|r| r.scene == *scene && r.radius == radius);
                match row {
                    Some(r) if r.deadlocked => {
                        let _ = write!(text, " {:>16}", "D");
                    }
                    Some(r) => {
                        let star = if r.collision_count.unwrap_or(0) > 0 {
                            any_starred = true;
                            "*"
                        } else {
                            ""
                        };
                        let cell = format!("{:.4}{star}", r.median_planning_seconds);
                        let _ = write!(text, " {cell:>16}");
                    }
                    None => {
                        let _ = write!(text, " {:>16}", "-");
                    }
                }
            }
            text.push('\n');
        }
        if any_starred {
            text.push_str("* verifier found collisions in the planned moves\n");
        }
        if self.rows.iter().any(|r| r.deadlocked) {
            text.push_str("D: scheduler deadlocked at this resolution\n");
        }
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::four_walls;

    #[test]
    fn too_few_repetitions_is_an_error() {
        let scenes = [BenchScene {
            name: "four_walls".to_string(),
            scene: four_walls(),
        }];
        assert!(matches!(
            run_benchmark(&scenes, &[1.0], 2),
            Err(BenchError::TooFewRepetitions(2))
        ));
    }

    #[test]
    fn non_timing_fields_are_deterministic() {
        let scenes = [BenchScene {
            name: "four_walls".to_string(),
            scene: four_walls(),
        }];
        let a = run_benchmark(&scenes, &[0.5, 1.0], 3).unwrap();
        let b = run_benchmark(&scenes, &[0.5, 1.0], 3).unwrap();
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            assert_eq!(ra.total_path_cost, rb.total_path_cost);
            assert_eq!(ra.collision_count, rb.collision_count);
            assert_eq!(ra.deadlocked, rb.deadlocked);
        }
        assert!(a.render_text().contains("radius"));
    }
}
