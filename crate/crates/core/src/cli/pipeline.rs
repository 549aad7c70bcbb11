//! Pipeline commands over one run directory:
//!
//! ```text
//! <out_dir>/config.toml             effective configuration
//! <out_dir>/mesh.txt, mesh_stats.txt
//! <out_dir>/checkpoint.txt          final solver state
//! <out_dir>/checkpoints/            periodic transient states
//! <out_dir>/diagnostics.csv         per-step solver diagnostics
//! <out_dir>/validation/             metrics and profile tables
//! <out_dir>/report/                 full report bundle
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use super::config::{Driver, RunConfig};
use crate::error::{Error, Result};
use crate::fem::FunctionSpace;
use crate::geometry::{generate_axisym_mesh_seeded, refine_uniform, AxisymMesh, MeshStats, NozzleProfile};
use crate::solver::{read_checkpoint, write_checkpoint, NsSolver, SolutionState, StepRecord};
use crate::validation::report::profile_csv;
use crate::validation::{
    align_pressure_offset, compute_eq, compute_ez, extract_centerline, extract_wall_pressure, load_experimental,
    metrics_csv, normalize, stations, write_report, MetricRow, Normalization, NormalizedProfile, ProfileKind,
    ValidationReport,
};

pub const CONFIG_FILE: &str = "config.toml";
pub const MESH_FILE: &str = "mesh.txt";
pub const MESH_STATS_FILE: &str = "mesh_stats.txt";
pub const CHECKPOINT_FILE: &str = "checkpoint.txt";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const VALIDATION_DIR: &str = "validation";
pub const REPORT_DIR: &str = "report";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Mesh,
    Run,
    Validate,
    Report,
    All,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Mesh => "mesh",
            Command::Run => "run",
            Command::Validate => "validate",
            Command::Report => "report",
            Command::All => "all",
        }
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mesh" => Ok(Command::Mesh),
            "run" => Ok(Command::Run),
            "validate" => Ok(Command::Validate),
            "report" => Ok(Command::Report),
            "all" => Ok(Command::All),
            _ => Err(Error::invalid(format!("unknown command '{s}'"))),
        }
    }
}

/// An error tagged with the pipeline stage it came from.
#[derive(Debug)]
pub struct Failure {
    pub stage: Command,
    pub error: Error,
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} failed: {}", self.stage.as_str(), self.error)
    }
}

impl std::error::Error for Failure {}

impl Failure {
    /// 1 config, 2 mesh, 3 solve, 4 validate, 5 I/O or missing artifact.
    pub fn exit_code(&self) -> i32 {
        match &self.error {
            Error::Config { .. } => 1,
            Error::Io { .. } | Error::Dependency { .. } => 5,
            _ => match self.stage {
                Command::Mesh => 2,
                Command::Run => 3,
                Command::Validate | Command::Report | Command::All => 4,
            },
        }
    }
}

fn at(stage: Command) -> impl Fn(Error) -> Failure {
    move |error| Failure { stage, error }
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn require(path: PathBuf, command: &str) -> Result<PathBuf> {
    if path.is_file() {
        Ok(path)
    } else {
        Err(Error::Dependency {
            path,
            command: command.to_string(),
        })
    }
}

fn stats_text(s: &MeshStats) -> String {
    format!(
        "n_elt = {}\nn_vertices = {}\nh_min = {:e}\nh_max = {:e}\nh_avg = {:e}\n",
        s.n_elt, s.n_vertices, s.h_min, s.h_max, s.h_avg
    )
}

/// Runs `command` (and, for `all`, every stage in order) and returns the
/// artifacts written.
pub fn run_pipeline(config: &RunConfig, command: Command) -> std::result::Result<Vec<PathBuf>, Failure> {
    let dir = config.out_dir.clone();
    create_dir(&dir).map_err(at(command))?;
    write(&dir.join(CONFIG_FILE), &config.to_toml()).map_err(at(command))?;
    let mut out = vec![dir.join(CONFIG_FILE)];
    let stages: &[Command] = match command {
        Command::All => &[Command::Mesh, Command::Run, Command::Validate, Command::Report],
        _ => std::slice::from_ref(&command),
    };
    for &stage in stages {
        let files = match stage {
            Command::Mesh => mesh_stage(config, &dir),
            Command::Run => run_stage(config, &dir),
            Command::Validate => validate_stage(config, &dir),
            Command::Report => report_stage(config, &dir),
            Command::All => unreachable!(),
        };
        out.extend(files.map_err(at(stage))?);
    }
    Ok(out)
}

pub fn build_mesh(config: &RunConfig) -> Result<AxisymMesh> {
    let profile = config.nozzle_profile()?;
    let mut mesh = generate_axisym_mesh_seeded(&profile.domain(), &config.mesh.sizing(), config.seed)?;
    for _ in 0..config.mesh.refine {
        mesh = refine_uniform(&mesh)?;
    }
    Ok(mesh)
}

fn mesh_stage(config: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let mesh = build_mesh(config)?;
    let stats = mesh.stats()?;
    eprintln!("mesh: {} triangles, {} vertices", stats.n_elt, stats.n_vertices);
    let (m, s) = (dir.join(MESH_FILE), dir.join(MESH_STATS_FILE));
    mesh.write(&m)?;
    write(&s, &stats_text(&stats))?;
    Ok(vec![m, s])
}

fn load_mesh(dir: &Path) -> Result<Arc<AxisymMesh>> {
    let path = require(dir.join(MESH_FILE), "mesh")?;
    Ok(Arc::new(AxisymMesh::read(&path)?))
}

fn diagnostics_csv(records: &[StepRecord]) -> String {
    let mut s = String::from("step,time,divergence,nonlinear_iterations,linear_iterations,change\n");
    for r in records {
        let d = &r.diagnostics;
        let _ = writeln!(
            s,
            "{},{:e},{:e},{},{},{}",
            r.step,
            r.time,
            d.divergence,
            d.nonlinear_iterations,
            d.linear_iterations,
            r.change.map(|c| format!("{c:e}")).unwrap_or_default()
        );
    }
    s
}

fn run_stage(config: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let mesh = load_mesh(dir)?;
    let case = config.flow_case(mesh)?;
    let solver = NsSolver::new(case.clone())?;
    let mut out = Vec::new();
    let (state, records) = match config.driver {
        Driver::Steady => {
            let st = solver.steady()?;
            let rec = StepRecord {
                step: 0,
                time: 0.0,
                diagnostics: st.diagnostics,
                change: None,
            };
            (st, vec![rec])
        }
        Driver::Transient => {
            let every = config.checkpoint_every;
            let cp_dir = dir.join("checkpoints");
            if every > 0 {
                create_dir(&cp_dir)?;
            }
            let n = case.n_steps();
            let traj = solver.transient(&mut |rep| {
                let s = rep.state;
                if s.step % 10 == 0 || s.step == n {
                    eprintln!("step {}/{n}: t = {:.4}, div = {:.2e}", s.step, s.time, s.diagnostics.divergence);
                }
                if every > 0 && s.step % every == 0 {
                    let p = cp_dir.join(format!("step_{:06}.txt", s.step));
                    write_checkpoint(&p, &case, s)?;
                    out.push(p);
                }
                Ok(())
            })?;
            if traj.steady_reached {
                eprintln!("steady state reached at t = {}", traj.final_state.time);
            }
            (traj.final_state, traj.records)
        }
    };
    let cp = dir.join(CHECKPOINT_FILE);
    write_checkpoint(&cp, &case, &state)?;
    let diag = dir.join(DIAGNOSTICS_FILE);
    write(&diag, &diagnostics_csv(&records))?;
    out.push(cp);
    out.push(diag);
    Ok(out)
}

fn load_state(config: &RunConfig, dir: &Path) -> Result<(Arc<AxisymMesh>, SolutionState)> {
    let mesh = load_mesh(dir)?;
    let cp = require(dir.join(CHECKPOINT_FILE), "run")?;
    let space = Arc::new(FunctionSpace::new(mesh.clone(), config.order)?);
    Ok((mesh, read_checkpoint(&cp, space)?))
}

fn load_datasets(paths: &[PathBuf], kind: ProfileKind, c: Normalization) -> Result<Vec<(String, NormalizedProfile)>> {
    paths
        .iter()
        .map(|p| {
            let mut ds = load_experimental(p, kind)?;
            if kind == ProfileKind::Pressure {
                ds = align_pressure_offset(&ds, 0.0)?;
            }
            Ok((ds.label.clone(), normalize(&ds.profile(), c)?))
        })
        .collect()
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(" ")
}

/// Profiles, datasets and metrics for the state in the run directory.
pub fn build_report(config: &RunConfig, dir: &Path) -> Result<ValidationReport> {
    let (mesh, state) = load_state(config, dir)?;
    let case = config.flow_case(mesh.clone())?;
    let profile: NozzleProfile = config.nozzle_profile()?;
    let wall = |z: f64| profile.radius(z);
    let c = Normalization::from_case(&case)?;
    let [a, b] = config.chart_range;
    let zs = stations(a, b, config.profile_points);
    let velocity = normalize(&extract_centerline(&state.field, &zs)?, c)?;
    let pressure = normalize(&extract_wall_pressure(&state.field, &wall, &zs)?, c)?;
    let velocity_datasets = load_datasets(&config.velocity_data, ProfileKind::Velocity, c)?;
    let pressure_datasets = load_datasets(&config.pressure_data, ProfileKind::Pressure, c)?;

    let mut st = config.stations.clone();
    st.sort_by(f64::total_cmp);
    let eq = compute_eq(&state.field, case.flow_rate()?, &wall, &st)?;
    let ez = if velocity_datasets.is_empty() {
        None
    } else {
        let sets: Vec<NormalizedProfile> = velocity_datasets.iter().map(|(_, d)| d.clone()).collect();
        // stations no dataset reaches get an empty cell rather than failing the run
        Some(
            st.iter()
                .map(|&z| compute_ez(&velocity, &sets, &[z]).ok().map(|v| v[0].1))
                .collect::<Vec<_>>(),
        )
    };
    let metrics = st
        .iter()
        .enumerate()
        .map(|(i, &z)| MetricRow {
            z,
            ez: ez.as_ref().and_then(|v| v[i]),
            eq: Some(eq[i].1),
        })
        .collect();

    let (ui, ut) = case.mean_velocities()?;
    let mut summary = vec![
        ("re_throat".to_string(), format!("{}", config.re_throat)),
        ("rho".into(), format!("{}", config.rho)),
        ("mu".into(), format!("{}", config.mu)),
        ("order".into(), format!("P{}/P{}", config.order + 1, config.order)),
        ("driver".into(), format!("{:?}", config.driver).to_lowercase()),
        ("solver".into(), case.solver.as_str().to_string()),
        ("seed".into(), config.seed.to_string()),
        ("flow_rate".into(), format!("{:e}", case.flow_rate()?)),
        ("mean_inlet_velocity".into(), format!("{ui:e}")),
        ("mean_throat_velocity".into(), format!("{ut:e}")),
        ("dynamic_pressure".into(), format!("{:e}", c.dynamic_pressure)),
        ("state_time".into(), format!("{}", state.time)),
        ("state_step".into(), state.step.to_string()),
        ("stations".into(), fmt_list(&st)),
        ("pressure_alignment".into(), "experimental pressure shifted to zero at z = 0".into()),
    ];
    if config.driver == Driver::Transient {
        summary.push(("dt".into(), format!("{}", config.dt)));
        summary.push(("t_end".into(), format!("{}", config.t_end)));
    }
    for (label, _) in velocity_datasets.iter().chain(&pressure_datasets) {
        summary.push(("dataset".into(), label.clone()));
    }
    Ok(ValidationReport {
        case_summary: summary,
        mesh: Some(mesh.stats()?),
        diagnostics: Some(state.diagnostics),
        velocity: Some(velocity),
        velocity_datasets,
        pressure: Some(pressure),
        pressure_datasets,
        metrics,
    })
}

fn validate_stage(config: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let rep = build_report(config, dir)?;
    let vdir = dir.join(VALIDATION_DIR);
    create_dir(&vdir)?;
    let files = [
        ("metrics.csv", metrics_csv(&rep.metrics)),
        ("profiles_velocity.csv", profile_csv(rep.velocity.as_ref(), &rep.velocity_datasets)),
        ("profiles_pressure.csv", profile_csv(rep.pressure.as_ref(), &rep.pressure_datasets)),
    ];
    let mut out = Vec::new();
    for (name, text) in files {
        let p = vdir.join(name);
        write(&p, &text)?;
        out.push(p);
    }
    let worst = rep.metrics.iter().filter_map(|m| m.eq).fold(0.0, f64::max);
    eprintln!("validate: max E_Q = {worst:.3}% over {} stations", rep.metrics.len());
    Ok(out)
}

fn report_stage(config: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    require(dir.join(VALIDATION_DIR).join("metrics.csv"), "validate")?;
    let rep = build_report(config, dir)?;
    write_report(&rep, &dir.join(REPORT_DIR))
}
