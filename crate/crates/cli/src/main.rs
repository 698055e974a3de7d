//! Command-line front end for the wallplan sequencing engine.
//!
//! Exit codes: 0 = success / clean verification, 1 = planner infeasibility or
//! verifier collisions, 2 = usage or validation errors.

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use wallplan::bench::{run_benchmark, BenchScene};
use wallplan::export::{export_plan, ExportFormat, PlanDocument};
use wallplan::generator;
use wallplan::grid::Grid;
use wallplan::planner::{plan_assembly, plan_disassembly, PlanError};
use wallplan::scene::Scene;
use wallplan::scripting::{generate_script, EventKind, EventScript};
use wallplan::verifier::{default_sample_step, verify_plan, Verdict};

#[derive(Parser)]
#[command(
    name = "wallplan",
    version,
    about = "Clash-free disassembly and assembly sequencing for prefabricated wall sites"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DirectionArg {
    Assemble,
    Disassemble,
}

#[derive(Subcommand)]
enum Command {
    /// Plan a wall sequence and write it as a JSON plan document
    Plan {
        /// Scene file (JSON)
        #[arg(long)]
        scene: PathBuf,
        /// Node radius in meters (grid pitch is twice this)
        #[arg(long)]
        radius: f64,
        /// Planning direction; assembly is derived by reversing a
        /// disassembly run
        #[arg(long, value_enum)]
        direction: DirectionArg,
        /// Comma-separated wall ids: the removal attempt order (defaults to
        /// scene file order)
        #[arg(long)]
        order: Option<String>,
        /// Output plan file
        #[arg(long)]
        out: PathBuf,
    },
    /// Replay a plan with the sampled continuous-collision checker
    Verify {
        #[arg(long)]
        scene: PathBuf,
        /// Plan document produced by `plan`
        #[arg(long)]
        plan: PathBuf,
        /// Sample spacing in meters (defaults to min(radius, thinnest wall
        /// half thickness) / 2)
        #[arg(long)]
        step: Option<f64>,
    },
    /// Expand an assembly plan into the construction event script
    Script {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        scene: PathBuf,
    },
    /// Time planning across scenes and grid radii
    Bench {
        /// Scene files, comma separated or repeated
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        scenes: Vec<PathBuf>,
        /// Node radii to sweep, comma separated
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        radii: Vec<f64>,
        /// Repetitions per cell (median is reported)
        #[arg(long, default_value_t = 5)]
        reps: usize,
        /// Output JSON table
        #[arg(long)]
        out: PathBuf,
    },
    /// Render a plan as one SVG frame per waypoint step
    Render {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        outdir: PathBuf,
    },
    /// Write one of the bundled generator scenes
    Gen {
        /// four-walls | blocking-pair | pillar | bench
        #[arg(long)]
        family: String,
        /// Wall count for the bench family
        #[arg(long, default_value_t = 9)]
        walls: usize,
        /// Staging-assignment seed for the bench family
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn load_scene(path: &Path) -> Result<Scene> {
    Scene::load(path).with_context(|| format!("loading scene {}", path.display()))
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Plan {
            scene,
            radius,
            direction,
            order,
            out,
        } => {
            let scene = load_scene(&scene)?;
            let grid = Grid::build(&scene.bounds, radius).context("building grid")?;
            let order: Vec<String> = match order {
                Some(list) => list.split(',').map(|s| s.trim().to_string()).collect(),
                None => scene.wall_ids(),
            };
            let outcome = match direction {
                DirectionArg::Disassemble => plan_disassembly(&scene, &grid, &order),
                DirectionArg::Assemble => plan_assembly(&scene, &grid, &order),
            };
            let plan = match outcome {
                Ok(plan) => plan,
                Err(e @ (PlanError::Deadlock { .. } | PlanError::Obstructed { .. })) => {
                    eprintln!("planning failed: {e}");
                    return Ok(ExitCode::from(1));
                }
                Err(e) => return Err(e.into()),
            };
            let script = match plan.direction {
                wallplan::planner::Direction::Assembly => {
                    Some(generate_script(&plan, &scene).context("expanding event script")?)
                }
                wallplan::planner::Direction::Disassembly => None,
            };
            export_plan(
                &scene,
                &plan,
                script.as_ref(),
                radius,
                &out,
                ExportFormat::Json,
            )
            .context("writing plan")?;
            eprintln!(
                "planned {} moves ({} deferrals, total path {:.2} m) -> {}",
                plan.moves.len(),
                plan.deferral_log.len(),
                plan.total_cost(),
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { scene, plan, step } => {
            let scene = load_scene(&scene)?;
            let doc = PlanDocument::load(&plan).context("loading plan")?;
            let step = step.unwrap_or_else(|| default_sample_step(&scene, doc.grid_radius));
            let report = verify_plan(&scene, &doc.plan(), step).context("verifying plan")?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            if report.verdict == Verdict::Clean {
                eprintln!("clean: no collisions at sample step {step}");
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!(
                    "collisions found: {} violation(s) at sample step {step}",
                    report.violations.len()
                );
                Ok(ExitCode::from(1))
            }
        }
        Command::Script { plan, scene } => {
            let scene = load_scene(&scene)?;
            let doc = PlanDocument::load(&plan).context("loading plan")?;
            let script = generate_script(&doc.plan(), &scene).context("expanding event script")?;
            print!("{}", script_text(&script));
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench {
            scenes,
            radii,
            reps,
            out,
        } => {
            let mut entries = Vec::new();
            for path in &scenes {
                let name = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().to_string())
                    .unwrap_or_else(|| path.display().to_string());
                entries.push(BenchScene {
                    name,
                    scene: load_scene(path)?,
                });
            }
            let table = run_benchmark(&entries, &radii, reps)?;
            std::fs::write(&out, table.to_json())
                .with_context(|| format!("writing {}", out.display()))?;
            print!("{}", table.render_text());
            eprintln!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Render {
            plan,
            scene,
            outdir,
        } => {
            let scene = load_scene(&scene)?;
            let doc = PlanDocument::load(&plan).context("loading plan")?;
            let frames = wallplan::export::render_frames(&scene, &doc.plan(), &outdir)
                .context("rendering frames")?;
            eprintln!("wrote {frames} frames to {}", outdir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen {
            family,
            walls,
            seed,
            out,
        } => {
            let scene = match family.as_str() {
                "four-walls" => generator::four_walls(),
                "blocking-pair" => generator::blocking_pair(),
                "pillar" => generator::pillar_corridor(),
                "bench" => generator::bench_site(walls, seed),
                other => bail!("unknown family \"{other}\" (expected four-walls, blocking-pair, pillar, or bench)"),
            };
            scene
                .save(&out)
                .with_context(|| format!("writing {}", out.display()))?;
            eprintln!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Human-readable script listing; angles in degrees.
fn script_text(script: &EventScript) -> String {
    use std::fmt::Write;
    let mut text = String::new();
    for (k, event) in script.events.iter().enumerate() {
        let verb = match event.kind {
            EventKind::Transport => "transport",
            EventKind::TiltUp => "tilt-up",
            EventKind::Place => "place",
            EventKind::InstallBrace => "install-brace",
            EventKind::VerifyAngle => "verify-angle",
            EventKind::RemoveBrace => "remove-brace",
        };
        let _ = write!(text, "{:>3}. {verb:<13} {}", k + 1, event.walls.join(" + "));
        if let Some(waypoints) = &event.waypoints {
            let _ = write!(text, "  ({} waypoints)", waypoints.len());
        }
        if let Some(angle) = event.angle_deg {
            let ok = if (angle - 90.0).abs() <= 0.5 {
                "ok"
            } else {
                "OUT OF TOLERANCE"
            };
            let _ = write!(text, "  {angle:.2} deg {ok}");
        }
        if let Some(corner) = &event.corner {
            let _ = write!(text, "  [corner {corner}]");
        }
        text.push('\n');
    }
    text
}
