use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{Experiment, ExperimentConfig};
use crate::actions::{self, BallSpec, CycleVerdict, IsometryFixedPointVerdict, DEFAULT_MIN_RETURNS};
use crate::coarse::{self, ScalarFunction, DEFAULT_FREE_GROUP_SAMPLE, DEFAULT_GROUP_SAMPLE, DEFAULT_RADII, DEFAULT_TREE_SAMPLE};
use crate::cone::compactification_diagnostic;
use crate::error::{Error, Result};
use crate::odometer::{self, BoundaryWord};
use crate::spaces::Point;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Pass,
    Refuted,
    Error,
}

/// Everything needed to repeat a run.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    pub library_version: String,
    pub parallel: bool,
    pub wall_clock_seconds: f64,
    pub status: RunStatus,
    pub summary: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub outputs: Vec<String>,
}

struct Outcome {
    refuted: bool,
    summary: String,
}

/// Collects artifacts in the output directory. Each file is written to a
/// temporary name and renamed into place.
struct Artifacts<'a> {
    dir: &'a Path,
    written: Vec<String>,
}

impl Artifacts<'_> {
    fn write(&mut self, name: &str, fill: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
        let mut buf = Vec::new();
        fill(&mut buf)?;
        write_atomic(&self.dir.join(name), &buf)?;
        self.written.push(name.to_string());
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.write(name, |buf| {
            serde_json::to_writer_pretty(&mut *buf, value)?;
            buf.push(b'\n');
            Ok(())
        })
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let tmp = path.with_extension("partial");
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(bytes).map_err(io)?;
    f.sync_all().map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

/// Runs the experiment, writing artifacts and `manifest.json` into `out`.
/// The manifest is written even when the run fails.
pub fn run(config: &ExperimentConfig, out: &Path) -> Result<RunManifest> {
    fs::create_dir_all(out).map_err(|source| Error::Io {
        path: out.to_path_buf(),
        source,
    })?;
    let started = Instant::now();
    let mut artifacts = Artifacts {
        dir: out,
        written: Vec::new(),
    };
    let result = execute(config, &mut artifacts);
    let (status, summary, error) = match &result {
        Ok(o) if o.refuted => (RunStatus::Refuted, o.summary.clone(), None),
        Ok(o) => (RunStatus::Pass, o.summary.clone(), None),
        Err(e) => (RunStatus::Error, "run failed".to_string(), Some(e.to_string())),
    };
    let mut outputs = artifacts.written;
    outputs.push("manifest.json".into());
    let manifest = RunManifest {
        config: config.clone(),
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        parallel: crate::par::is_parallel(),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        status,
        summary,
        error,
        outputs,
    };
    let mut text = serde_json::to_vec_pretty(&manifest)?;
    text.push(b'\n');
    write_atomic(&out.join("manifest.json"), &text)?;
    result.map(|_| manifest)
}

/// The directory a run writes to: `--out` if given, else the config's
/// `output`, else `out/<config stem>`.
pub fn output_dir(config: &ExperimentConfig, config_path: Option<&Path>, flag: Option<&Path>) -> PathBuf {
    if let Some(dir) = flag {
        return dir.to_path_buf();
    }
    if let Some(o) = &config.output {
        return match &config.base_dir {
            Some(base) if o.is_relative() => base.join(o),
            _ => o.clone(),
        };
    }
    let stem = config_path
        .and_then(|p| p.file_stem())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| config.experiment.to_string());
    PathBuf::from("out").join(stem)
}

fn execute(config: &ExperimentConfig, art: &mut Artifacts<'_>) -> Result<Outcome> {
    let diagnostics = config.validate();
    if let Some(d) = diagnostics.first() {
        return Err(Error::config(d.field.clone(), d.message.clone()));
    }
    let p = &config.params;
    match config.experiment {
        Experiment::VerifyCoarse => {
            let space = config.build_space()?;
            let action = config.build_action(&space)?;
            let radii = p.radii.clone().unwrap_or_else(|| DEFAULT_RADII.to_vec());
            let sample = p.sample.unwrap_or(match space.basepoint() {
                Point::Tree(_) => DEFAULT_TREE_SAMPLE,
                Point::Word(_) => DEFAULT_FREE_GROUP_SAMPLE,
                _ => DEFAULT_GROUP_SAMPLE,
            });
            let reports = actions::verify_coarse_action(&action, &space, &radii, sample)?;
            art.write("coarse.csv", |buf| coarse::write_reports_csv(&reports, buf))?;
            art.json("coarse.json", &reports)?;
            let refuted = reports.iter().filter(|r| r.verdict.is_refuted()).count();
            Ok(Outcome {
                refuted: refuted > 0,
                summary: format!(
                    "{} reports over {} generators, {refuted} refuted",
                    reports.len(),
                    action.generators.len()
                ),
            })
        }
        Experiment::Orbit => {
            let space = config.build_space()?;
            let action = config.build_action(&space)?;
            let x0 = start_point(config, &space)?;
            let horizon = p.horizon.expect("validated");
            let record = actions::orbit(&action, &space, &x0, horizon)?;
            art.write("escape.csv", |buf| record.write_escape_csv(buf))?;
            art.json("orbit.json", &record)?;
            Ok(Outcome {
                refuted: false,
                summary: format!(
                    "{} orbit points, max displacement {}",
                    record.points.len(),
                    record.max_displacement
                ),
            })
        }
        Experiment::FixedPoint => {
            let space = config.build_space()?;
            let action = config.build_action(&space)?;
            let x0 = start_point(config, &space)?;
            let horizon = p.horizon.expect("validated");
            let mut summary = Vec::new();
            if space.is_discrete() {
                let v = actions::detect_coarse_fixed_point_finite(&action, &space, &x0, horizon)?;
                summary.push(match &v {
                    CycleVerdict::Cycle { m, n, .. } => format!("cycle m = {m}, n = {n}"),
                    CycleVerdict::InconclusiveAtHorizon { .. } => "no repeat within horizon".into(),
                });
                art.json("cycle.json", &v)?;
            }
            if action.isometry {
                let domain = BallSpec {
                    center: x0.clone(),
                    radius: p.domain_radius.unwrap_or(1.0),
                };
                let min_returns = p.min_returns.unwrap_or(DEFAULT_MIN_RETURNS);
                let v = actions::detect_coarse_fixed_point_isometry(&action, &space, &x0, &domain, horizon, min_returns)?;
                summary.push(match &v {
                    IsometryFixedPointVerdict::Certificate(c) => {
                        format!("certificate: L = {}, orbit within {}", c.l, c.max_orbit_distance)
                    }
                    IsometryFixedPointVerdict::NotRecurrentAtHorizon { returns, .. } => {
                        format!("not recurrent at horizon ({returns} returns)")
                    }
                    IsometryFixedPointVerdict::InconclusiveAtHorizon { reason } => reason.clone(),
                });
                art.json("recurrence.json", &v)?;
            }
            Ok(Outcome {
                refuted: false,
                summary: summary.join("; "),
            })
        }
        Experiment::OdometerDensity => {
            let precision = p.precision.expect("validated");
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let x = match &p.start {
                Some(s) => s.parse::<BoundaryWord>()?,
                None => BoundaryWord::random(&mut rng, precision)?,
            };
            let targets = (0..p.targets.unwrap_or(10))
                .map(|_| BoundaryWord::random(&mut rng, precision))
                .collect::<Result<Vec<_>>>()?;
            let eps = p.epsilons.clone().expect("validated");
            let rows = odometer::density_experiment(&x, &targets, &eps)?;
            art.write("density.csv", |buf| odometer::write_density_csv(&rows, buf))?;
            let failed = rows.iter().filter(|r| !r.pass).count();
            Ok(Outcome {
                refuted: failed > 0,
                summary: format!("start {x}: {} rows, {failed} above tolerance", rows.len()),
            })
        }
        Experiment::ConeDiagnostic => {
            let space = config.build_space()?;
            let cone = space
                .cone_space()
                .ok_or_else(|| Error::config("space.model", "cone-diagnostic needs the cone model"))?;
            let heights = p.heights.clone().expect("validated");
            let rows = compactification_diagnostic(cone, p.r_e.expect("validated"), &heights, config.slack())?;
            art.write("diagnostic.csv", |buf| {
                let mut w = csv::Writer::from_writer(buf);
                w.write_record(["t", "measured_sep", "bound", "pass"])?;
                for r in &rows {
                    w.write_record([
                        r.t.to_string(),
                        r.measured_sep.to_string(),
                        r.bound.to_string(),
                        r.pass.to_string(),
                    ])?;
                }
                w.flush().map_err(|source| Error::Io {
                    path: "diagnostic.csv".into(),
                    source,
                })
            })?;
            let failed = rows.iter().filter(|r| !r.pass).count();
            Ok(Outcome {
                refuted: failed > 0,
                summary: format!("{} heights, {failed} above bound", rows.len()),
            })
        }
        Experiment::HigsonDefect => {
            let space = config.build_space()?;
            let f = ScalarFunction::builtin(p.function.as_deref().expect("validated"), &space)?;
            let table = coarse::higson_defect(
                &f,
                &space,
                p.entourage.expect("validated"),
                p.balls.as_deref().expect("validated"),
                p.window.expect("validated"),
            )?;
            art.write("higson.csv", |buf| table.write_csv(buf))?;
            let last = table.rows.last().map_or(0.0, |r| r.defect);
            Ok(Outcome {
                refuted: false,
                summary: format!("{}: defect {last} outside the largest ball", table.function),
            })
        }
    }
}

fn start_point(config: &ExperimentConfig, space: &crate::spaces::SpaceHandle) -> Result<Point> {
    match &config.params.x0 {
        Some(s) => space.parse_point(s),
        None => Ok(space.basepoint().clone()),
    }
}
