//! Command-line front end: argument parsing, dispatch and exit codes.
//!
//! Exit codes: 0 success, 1 failed check or computation error, 2 usage error,
//! 3 unreadable or malformed model/spec file.

pub mod io;
pub mod report;

use std::ffi::OsString;
use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use conical_phase::ci::{
    locate_cartesian_cis, locate_complex_cis, locate_complex_cis_within, predicted_loop_phase, CiPoint, Region,
};
use conical_phase::dynamics::{
    berry3d_phase, closed_form_trace, geometric_phase_extract, integrate_tdse, DoubletDynamics, Monopole3D,
    MonopoleState,
};
use conical_phase::effh::build_effh;
use conical_phase::fields::{magnetic_field, nact, yang_mills_field, FieldMatrix};
use conical_phase::flux::{table_report, TableConfig};
use conical_phase::model::{Model, Representation};
use conical_phase::tracing::{overlap_phase, trace_phase, BasisState, LoopSpec, Orientation};
use conical_phase::verify::run_all;

use io::{load_config, load_effh, load_model, ConfigFile};
use report::*;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    ModelParse(String),
    #[error(transparent)]
    Compute(#[from] conical_phase::Error),
    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::ModelParse(_) => 3,
            CliError::Compute(_) | CliError::Output(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RepArg {
    Adiabatic,
    Circulating,
}

impl From<RepArg> for Representation {
    fn from(r: RepArg) -> Self {
        match r {
            RepArg::Adiabatic => Representation::Adiabatic,
            RepArg::Circulating => Representation::Circulating,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldArg {
    Nact,
    Magnetic,
    YangMills,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateArg {
    /// Upper adiabatic state (loop phases) or excited doublet state (dynamics).
    #[value(alias = "1")]
    One,
    #[value(alias = "2")]
    Two,
    Plus,
    Minus,
    Ground,
    Excited,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    Ode,
}

#[derive(Debug, Parser)]
#[command(name = "conical-phase", version, about = "Geometric phases and gauge fields near conical intersections")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// JSON file with numeric overrides.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Locate conical intersections of a planar model and classify their phase signs.
    AnalyzeCi {
        #[arg(long)]
        model: PathBuf,
        /// Half width of the square search region (Cartesian models).
        #[arg(long, default_value_t = 3.0)]
        half_width: f64,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        /// Restrict the scan radius (complex models).
        #[arg(long)]
        q_max: Option<f64>,
    },
    /// Trace the phase accumulated around a circular loop.
    TraceLoop {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0,0")]
        center: Vec<f64>,
        #[arg(long)]
        radius: f64,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        clockwise: bool,
        /// State followed on Berry models.
        #[arg(long, value_enum, default_value_t = StateArg::One)]
        state: StateArg,
    },
    /// Coupling and gauge fields of a Berry model at a point.
    Fields {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Vec<f64>,
        #[arg(long, value_enum, default_value_t = RepArg::Adiabatic)]
        representation: RepArg,
        #[arg(long, value_enum, default_value_t = FieldArg::Nact)]
        kind: FieldArg,
    },
    /// Extrapolated disc fluxes of every field element, checked against closed forms.
    FluxTable {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = RepArg::Adiabatic)]
        representation: RepArg,
        #[arg(long, value_delimiter = ',')]
        b_sequence: Option<Vec<f64>>,
        #[arg(long)]
        q_max: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        z: Option<f64>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Driven two-level doublet: amplitudes and topological phase.
    Dynamics {
        #[arg(long)]
        g: f64,
        #[arg(long)]
        omega: f64,
        #[arg(long, value_enum, default_value_t = StateArg::Ground)]
        state: StateArg,
        /// Defaults to one drive period.
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long, default_value_t = 201)]
        samples: usize,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value_t = Method::Ode)]
        method: Method,
    },
    /// Berry phases of spherical caps around a monopole degeneracy.
    Berry3d {
        /// Number of evenly spaced cap angles in [0, π].
        #[arg(long, default_value_t = 7)]
        caps: usize,
    },
    /// Assemble an effective Hamiltonian from a JSON spec.
    Effh {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Run the full verification suite.
    VerifyPaper,
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let config = match &cli.config {
        Some(p) => load_config(p)?,
        None => ConfigFile::default(),
    };
    let (body, failed) = match &cli.command {
        Command::AnalyzeCi {
            model,
            half_width,
            grid,
            q_max,
        } => render(cli.format, &analyze_ci(&load_model(model)?, *half_width, *grid, q_max.or(config.q_max))?)?,
        Command::TraceLoop {
            model,
            center,
            radius,
            samples,
            clockwise,
            state,
        } => {
            let samples = samples.or(config.loop_samples);
            let r = trace_loop(&load_model(model)?, center, *radius, samples, *clockwise, *state)?;
            render(cli.format, &r)?
        }
        Command::Fields {
            model,
            point,
            representation,
            kind,
        } => render(cli.format, &fields(&load_model(model)?, point, *representation, *kind)?)?,
        Command::FluxTable {
            model,
            representation,
            b_sequence,
            q_max,
            z,
            tolerance,
        } => {
            let mut tc = TableConfig::default();
            if let Some(b) = b_sequence.clone().or(config.b_sequence.clone()) {
                tc.b_sequence = b;
            }
            tc.q_max = q_max.or(config.q_max).unwrap_or(tc.q_max);
            tc.z = z.or(config.z).unwrap_or(tc.z);
            tc.tolerance = tolerance.or(config.tolerance).unwrap_or(tc.tolerance);
            render(cli.format, &flux_table(&load_model(model)?, *representation, &tc)?)?
        }
        Command::Dynamics {
            g,
            omega,
            state,
            t_end,
            samples,
            tol,
            method,
        } => {
            let tol = tol.or(config.ode_tolerance).unwrap_or(1e-10);
            render(cli.format, &dynamics(*g, *omega, *state, *t_end, *samples, tol, *method)?)?
        }
        Command::Berry3d { caps } => render(cli.format, &berry3d(*caps)?)?,
        Command::Effh { spec } => render(cli.format, &effh(&load_effh(spec)?)?)?,
        Command::VerifyPaper => render(cli.format, &verify())?,
    };
    match &cli.output {
        Some(p) => fs::write(p, body).map_err(|e| CliError::Output(format!("{}: {e}", p.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Output(e.to_string()))?;
        }
    }
    Ok(if failed { 1 } else { 0 })
}

fn render<R: Render>(format: Format, r: &R) -> Result<(String, bool), CliError> {
    let body = match format {
        Format::Text => r.text(),
        Format::Json => r.json(),
        Format::Csv => r.csv()?,
    };
    Ok((body, r.failed()))
}

fn ci_row(c: &CiPoint) -> CiRow {
    CiRow {
        x: round(c.x),
        y: round(c.y),
        q: round(c.q),
        phi: round(c.phi),
        kind: c.kind.name().into(),
        sign: c.sign.name().into(),
        residual: round(c.residual),
    }
}

pub fn analyze_ci(model: &Model, half_width: f64, grid: usize, q_max: Option<f64>) -> Result<CiReport, CliError> {
    let cis = match model {
        Model::Cartesian(m) => locate_cartesian_cis(m, &Region::square(half_width)?, grid)?,
        Model::Complex(m) => match q_max {
            Some(q) => locate_complex_cis_within(m, q)?,
            None => locate_complex_cis(m)?,
        },
        Model::Berry(_) => return Err(CliError::Usage("analyze-ci needs a planar (cartesian or complex) model".into())),
    };
    Ok(CiReport {
        model: model.kind().into(),
        cis: cis.iter().map(ci_row).collect(),
    })
}

fn basis_state(s: StateArg) -> Result<BasisState, CliError> {
    Ok(match s {
        StateArg::One => BasisState::One,
        StateArg::Two => BasisState::Two,
        StateArg::Plus => BasisState::Plus,
        StateArg::Minus => BasisState::Minus,
        _ => return Err(CliError::Usage("loop states are 1, 2, plus or minus".into())),
    })
}

pub fn trace_loop(
    model: &Model,
    center: &[f64],
    radius: f64,
    samples: Option<usize>,
    clockwise: bool,
    state: StateArg,
) -> Result<TraceReport, CliError> {
    let c3 = match (model, center.len()) {
        (Model::Berry(_), 3) => [center[0], center[1], center[2]],
        (Model::Berry(_), 2) => [center[0], center[1], 1.0],
        (_, 2) => [center[0], center[1], 0.0],
        _ => return Err(CliError::Usage(format!("--center takes 2 (or 3 for berry models) values, got {}", center.len()))),
    };
    let orientation = if clockwise {
        Orientation::Clockwise
    } else {
        Orientation::CounterClockwise
    };
    let mut spec = LoopSpec::new(c3, radius, 256, orientation)?;
    if let Some(n) = samples {
        spec = spec.with_samples(n)?;
    }
    let base = TraceReport {
        model: model.kind().into(),
        center: center.iter().map(|&x| round(x)).collect(),
        radius: round(radius),
        orientation: match orientation {
            Orientation::Clockwise => "clockwise".into(),
            Orientation::CounterClockwise => "counterclockwise".into(),
        },
        samples: spec.samples,
        total_phase: 0.0,
        total_phase_pi: None,
        winding: None,
        predicted_winding: None,
        state: None,
        rows: Vec::new(),
    };
    let planar = |trace: conical_phase::tracing::PhaseTrace, predicted: Option<i32>| {
        let partial = trace.partial_phase();
        let rows = trace
            .alphas
            .iter()
            .zip(&trace.theta_track)
            .zip(&partial)
            .map(|((&a, &t), &p)| TraceRow {
                alpha: round(a),
                theta_unwrapped: round(t),
                partial_phase: round(p),
            })
            .collect();
        TraceReport {
            samples: trace.alphas.len().saturating_sub(1),
            total_phase: round(trace.total_phase),
            total_phase_pi: pi_label(trace.total_phase),
            winding: Some(trace.winding),
            predicted_winding: predicted,
            rows,
            ..base.clone()
        }
    };
    Ok(match model {
        Model::Cartesian(m) => planar(trace_phase(m, &spec)?, None),
        Model::Complex(m) => {
            let predicted = predicted_loop_phase(&locate_complex_cis(m)?, &spec)?;
            planar(trace_phase(m, &spec)?, Some(predicted))
        }
        Model::Berry(m) => {
            let which = basis_state(state)?;
            let phase = overlap_phase(m, &spec, which)?;
            TraceReport {
                total_phase: round(phase),
                total_phase_pi: pi_label(phase),
                state: Some(which.name().into()),
                ..base
            }
        }
    })
}

fn cvec(v: &[num_complex::Complex64; 3]) -> CVec {
    v.map(|c| [round(c.re), round(c.im)])
}

pub fn fields(model: &Model, point: &[f64], rep: RepArg, kind: FieldArg) -> Result<FieldsReport, CliError> {
    let Model::Berry(m) = model else {
        return Err(CliError::Usage("fields needs a berry model".into()));
    };
    let [x, y, z] = point else {
        return Err(CliError::Usage(format!("--point takes 3 values, got {}", point.len())));
    };
    let p = [*x, *y, *z];
    let representation = Representation::from(rep);
    let (regular, seam): (FieldMatrix, FieldMatrix) = match kind {
        FieldArg::Nact => {
            let f = nact(m, representation, p)?;
            (f.regular_physical(), f.seam_physical())
        }
        FieldArg::Magnetic => {
            let f = magnetic_field(m, representation, p)?;
            (f.regular_physical(), f.seam_physical())
        }
        FieldArg::YangMills => {
            let f = yang_mills_field(m, representation, p)?;
            (f.regular_physical(), f.seam_physical())
        }
    };
    let mut elements = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            elements.push(FieldElement {
                label: representation.element_label(i, j).into(),
                regular: cvec(&regular.get(i, j).c),
                seam: cvec(&seam.get(i, j).c),
            });
        }
    }
    Ok(FieldsReport {
        point: p.map(round),
        representation: representation.name().into(),
        kind: match kind {
            FieldArg::Nact => "nact",
            FieldArg::Magnetic => "magnetic",
            FieldArg::YangMills => "yang_mills",
        }
        .into(),
        elements,
    })
}

pub fn flux_table(model: &Model, rep: RepArg, config: &TableConfig) -> Result<FluxReport, CliError> {
    let Model::Berry(m) = model else {
        return Err(CliError::Usage("flux-table needs a berry model".into()));
    };
    let table = table_report(m, rep.into(), config)?;
    Ok(FluxReport {
        representation: table.representation.name().into(),
        b_sequence: config.b_sequence.iter().map(|&b| round(b)).collect(),
        q_max: round(config.q_max),
        z: round(config.z),
        tolerance: round(config.tolerance),
        entries: table
            .entries
            .iter()
            .map(|e| FluxRow {
                kind: e.kind.name().into(),
                element: e.label.into(),
                values: e.values.iter().map(|&v| round(v)).collect(),
                limit: round(e.limit),
                limit_pi: pi_label(e.limit),
                residual: round(e.residual),
                target: round(e.target),
                pass: e.pass,
            })
            .collect(),
        pass: table.passed(),
    })
}

pub fn dynamics(
    g: f64,
    omega: f64,
    state: StateArg,
    t_end: Option<f64>,
    samples: usize,
    tol: f64,
    method: Method,
) -> Result<DynamicsReport, CliError> {
    let d = match state {
        StateArg::Ground | StateArg::Two => DoubletDynamics::ground(g, omega)?,
        StateArg::Excited | StateArg::One => DoubletDynamics::excited(g, omega)?,
        _ => return Err(CliError::Usage("doublet states are ground or excited".into())),
    };
    let t_end = match t_end {
        Some(t) => t,
        None if omega > 0.0 => d.period(),
        None => 2.0 * PI,
    };
    let trace = match method {
        Method::Exact => closed_form_trace(&d, t_end, samples)?,
        Method::Ode => integrate_tdse(&d, t_end, tol, samples)?,
    };
    let topo = geometric_phase_extract(&d).ok();
    Ok(DynamicsReport {
        g: round(g),
        omega: round(omega),
        state: match state {
            StateArg::Ground | StateArg::Two => "ground",
            _ => "excited",
        }
        .into(),
        method: match method {
            Method::Exact => "exact",
            Method::Ode => "ode",
        }
        .into(),
        t_end: round(t_end),
        max_norm_drift: round(trace.max_norm_drift()),
        max_deviation: round(trace.max_deviation(&d)),
        accepted_steps: trace.stats.map(|s| s.accepted),
        topological_phase: topo.map(|p| round(p.phase)),
        topological_phase_pi: topo.and_then(|p| pi_label(p.phase)),
        rows: (0..trace.t.len())
            .map(|k| DynamicsRow {
                t: round(trace.t[k]),
                chi1: [round(trace.chi1[k].re), round(trace.chi1[k].im)],
                chi2: [round(trace.chi2[k].re), round(trace.chi2[k].im)],
                norm: round(trace.norm[k]),
            })
            .collect(),
    })
}

pub fn berry3d(caps: usize) -> Result<Berry3dReport, CliError> {
    if caps < 2 {
        return Err(CliError::Usage("--caps must be at least 2".into()));
    }
    let mut rows = Vec::with_capacity(caps);
    for k in 0..caps {
        let theta = PI * k as f64 / (caps - 1) as f64;
        let cap = Monopole3D::cap(theta)?;
        rows.push(CapRow {
            theta_cap: round(theta),
            gamma_lower: round(berry3d_phase(&cap, MonopoleState::Lower)),
            gamma_upper: round(berry3d_phase(&cap, MonopoleState::Upper)),
        });
    }
    Ok(Berry3dReport { rows })
}

pub fn effh(spec: &conical_phase::effh::EffHSpec) -> Result<EffhReport, CliError> {
    let h = build_effh(spec)?;
    let n = h.matrix.nrows();
    Ok(EffhReport {
        dimension: n,
        hermiticity_defect: round(h.hermiticity_defect),
        matrix: (0..n)
            .map(|i| (0..n).map(|j| [round(h.matrix[(i, j)].re), round(h.matrix[(i, j)].im)]).collect())
            .collect(),
    })
}

pub fn verify() -> VerifyReport {
    let criteria: Vec<CriterionRow> = run_all()
        .into_iter()
        .map(|c| CriterionRow {
            id: c.id,
            name: c.name.into(),
            pass: c.pass,
            detail: c.detail,
        })
        .collect();
    let pass = criteria.iter().all(|c| c.pass);
    VerifyReport { criteria, pass }
}
