//! Serializable command outputs and their text/JSON/CSV renderings.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::CliError;

/// Fixed-precision scientific notation used for every printed float.
pub fn fmt_f(x: f64) -> String {
    // no "-0" in output
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.12e}")
}

/// Rounds to the printed precision so JSON output is stable across platforms.
pub fn round(x: f64) -> f64 {
    if x.is_finite() {
        fmt_f(x).parse().unwrap_or(x)
    } else {
        x
    }
}

/// `"k·π"` when `x` is an integer multiple of π to within 1e-9.
pub fn pi_label(x: f64) -> Option<String> {
    let k = (x / PI).round();
    ((x - k * PI).abs() <= 1e-9).then(|| format!("{}·π", k as i64))
}

fn with_pi(x: f64) -> String {
    match pi_label(x) {
        Some(l) => format!("{} ({l})", fmt_f(x)),
        None => fmt_f(x),
    }
}

pub trait Render: Serialize {
    fn text(&self) -> String;

    fn csv(&self) -> Result<String, CliError> {
        Err(CliError::Usage("csv output is not available for this command".into()))
    }

    fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Whether the command counts as a failure for the exit status.
    fn failed(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CiRow {
    pub x: f64,
    pub y: f64,
    pub q: f64,
    pub phi: f64,
    pub kind: String,
    pub sign: String,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CiReport {
    pub model: String,
    pub cis: Vec<CiRow>,
}

impl Render for CiReport {
    fn text(&self) -> String {
        let mut s = format!("{} conical intersections ({} model)\n", self.cis.len(), self.model);
        for c in &self.cis {
            let _ = writeln!(
                s,
                "  x = {}  y = {}  q = {}  kind = {}  sign = {}",
                fmt_f(c.x),
                fmt_f(c.y),
                fmt_f(c.q),
                c.kind,
                c.sign
            );
        }
        s
    }

    fn csv(&self) -> Result<String, CliError> {
        let mut s = String::from("x,y,q,phi,kind,sign,residual\n");
        for c in &self.cis {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                fmt_f(c.x),
                fmt_f(c.y),
                fmt_f(c.q),
                fmt_f(c.phi),
                c.kind,
                c.sign,
                fmt_f(c.residual)
            );
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceRow {
    pub alpha: f64,
    pub theta_unwrapped: f64,
    pub partial_phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceReport {
    pub model: String,
    pub center: Vec<f64>,
    pub radius: f64,
    pub orientation: String,
    pub samples: usize,
    pub total_phase: f64,
    pub total_phase_pi: Option<String>,
    /// Planar models only.
    pub winding: Option<i32>,
    pub predicted_winding: Option<i32>,
    /// Berry models only.
    pub state: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub rows: Vec<TraceRow>,
}

impl Render for TraceReport {
    fn text(&self) -> String {
        let mut s = format!(
            "loop about {:?} radius {} ({}, {} samples)\n",
            self.center, self.radius, self.orientation, self.samples
        );
        let _ = writeln!(s, "total phase: {}", with_pi(self.total_phase));
        if let Some(w) = self.winding {
            let _ = writeln!(s, "winding: {w}");
        }
        if let Some(p) = self.predicted_winding {
            let _ = writeln!(s, "predicted from enclosed intersections: {p}");
        }
        if let Some(st) = &self.state {
            let _ = writeln!(s, "state: {st}");
        }
        s
    }

    fn csv(&self) -> Result<String, CliError> {
        if self.rows.is_empty() {
            return Err(CliError::Usage("per-sample rows are only produced for planar models".into()));
        }
        let mut s = String::from("alpha,theta_unwrapped,partial_phase\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{}",
                fmt_f(r.alpha),
                fmt_f(r.theta_unwrapped),
                fmt_f(r.partial_phase)
            );
        }
        Ok(s)
    }
}

/// Complex 3-vector as `[[re, im]; 3]`.
pub type CVec = [[f64; 2]; 3];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldElement {
    pub label: String,
    pub regular: CVec,
    /// Coefficient of δ(q) along the seam.
    pub seam: CVec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldsReport {
    pub point: [f64; 3],
    pub representation: String,
    pub kind: String,
    pub elements: Vec<FieldElement>,
}

fn cvec_text(v: &CVec) -> String {
    let parts: Vec<String> = v
        .iter()
        .map(|[re, im]| format!("{}{:+.12e}i", fmt_f(*re), im + 0.0))
        .collect();
    format!("({})", parts.join(", "))
}

impl Render for FieldsReport {
    fn text(&self) -> String {
        let mut s = format!(
            "{} field, {} representation, at {:?} (Cartesian components)\n",
            self.kind, self.representation, self.point
        );
        for e in &self.elements {
            let _ = writeln!(s, "  [{}] regular {}", e.label, cvec_text(&e.regular));
            let _ = writeln!(s, "  [{}] seam    {}", e.label, cvec_text(&e.seam));
        }
        s
    }

    fn csv(&self) -> Result<String, CliError> {
        let mut s = String::from("element,part,re_x,im_x,re_y,im_y,re_z,im_z\n");
        for e in &self.elements {
            for (part, v) in [("regular", &e.regular), ("seam", &e.seam)] {
                let cells: Vec<String> = v.iter().flat_map(|c| c.iter().map(|x| fmt_f(*x))).collect();
                let _ = writeln!(s, "{},{},{}", e.label, part, cells.join(","));
            }
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluxRow {
    pub kind: String,
    pub element: String,
    pub values: Vec<f64>,
    pub limit: f64,
    pub limit_pi: Option<String>,
    pub residual: f64,
    pub target: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluxReport {
    pub representation: String,
    pub b_sequence: Vec<f64>,
    pub q_max: f64,
    pub z: f64,
    pub tolerance: f64,
    pub entries: Vec<FluxRow>,
    pub pass: bool,
}

impl Render for FluxReport {
    fn text(&self) -> String {
        let mut s = format!(
            "flux table, {} representation, q_max = {}, z = {}\n",
            self.representation, self.q_max, self.z
        );
        for e in &self.entries {
            let _ = writeln!(
                s,
                "  {} {:<9} [{}] limit {}  target {}  residual {}",
                if e.pass { "PASS" } else { "FAIL" },
                e.kind,
                e.element,
                with_pi(e.limit),
                with_pi(e.target),
                fmt_f(e.residual)
            );
        }
        let _ = writeln!(s, "{}", if self.pass { "PASS" } else { "FAIL" });
        s
    }

    fn csv(&self) -> Result<String, CliError> {
        let mut s = String::from("kind,element,limit,target,residual,pass\n");
        for e in &self.entries {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                e.kind,
                e.element,
                fmt_f(e.limit),
                fmt_f(e.target),
                fmt_f(e.residual),
                e.pass
            );
        }
        Ok(s)
    }

    fn failed(&self) -> bool {
        !self.pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsRow {
    pub t: f64,
    pub chi1: [f64; 2],
    pub chi2: [f64; 2],
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsReport {
    pub g: f64,
    pub omega: f64,
    pub state: String,
    pub method: String,
    pub t_end: f64,
    pub max_norm_drift: f64,
    /// Largest deviation from the closed form (zero for the closed form itself).
    pub max_deviation: f64,
    pub accepted_steps: Option<usize>,
    /// Only when the adiabatic regime makes it well defined.
    pub topological_phase: Option<f64>,
    pub topological_phase_pi: Option<String>,
    pub rows: Vec<DynamicsRow>,
}

impl Render for DynamicsReport {
    fn text(&self) -> String {
        let mut s = format!(
            "{} state, G = {}, omega = {}, {} propagation to t = {}\n",
            self.state, self.g, self.omega, self.method, self.t_end
        );
        let _ = writeln!(s, "max norm drift: {}", fmt_f(self.max_norm_drift));
        let _ = writeln!(s, "max deviation from closed form: {}", fmt_f(self.max_deviation));
        if let Some(n) = self.accepted_steps {
            let _ = writeln!(s, "accepted steps: {n}");
        }
        match self.topological_phase {
            Some(p) => {
                let _ = writeln!(s, "topological phase over one period: {}", with_pi(p));
            }
            None => s.push_str("topological phase: not defined outside the adiabatic regime\n"),
        }
        s
    }

    fn csv(&self) -> Result<String, CliError> {
        let mut s = String::from("t,re_chi1,im_chi1,re_chi2,im_chi2,norm\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                fmt_f(r.t),
                fmt_f(r.chi1[0]),
                fmt_f(r.chi1[1]),
                fmt_f(r.chi2[0]),
                fmt_f(r.chi2[1]),
                fmt_f(r.norm)
            );
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapRow {
    pub theta_cap: f64,
    pub gamma_lower: f64,
    pub gamma_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Berry3dReport {
    pub rows: Vec<CapRow>,
}

impl Render for Berry3dReport {
    fn text(&self) -> String {
        let mut s = String::from("cap angle         lower state          upper state\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{}  {}  {}",
                fmt_f(r.theta_cap),
                fmt_f(r.gamma_lower),
                fmt_f(r.gamma_upper)
            );
        }
        s
    }

    fn csv(&self) -> Result<String, CliError> {
        let mut s = String::from("theta_cap,gamma_lower,gamma_upper\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{}",
                fmt_f(r.theta_cap),
                fmt_f(r.gamma_lower),
                fmt_f(r.gamma_upper)
            );
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EffhReport {
    pub dimension: usize,
    pub hermiticity_defect: f64,
    /// Row-major `[re, im]` entries.
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl Render for EffhReport {
    fn text(&self) -> String {
        let mut s = format!(
            "effective Hamiltonian ({}×{}), hermiticity defect {}\n",
            self.dimension,
            self.dimension,
            fmt_f(self.hermiticity_defect)
        );
        for row in &self.matrix {
            let cells: Vec<String> = row
                .iter()
                .map(|[re, im]| format!("{}{:+.12e}i", fmt_f(*re), im + 0.0))
                .collect();
            let _ = writeln!(s, "  {}", cells.join("  "));
        }
        s
    }

    fn csv(&self) -> Result<String, CliError> {
        let mut s = String::from("row,col,re,im\n");
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, [re, im]) in row.iter().enumerate() {
                let _ = writeln!(s, "{i},{j},{},{}", fmt_f(*re), fmt_f(*im));
            }
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriterionRow {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyReport {
    pub criteria: Vec<CriterionRow>,
    pub pass: bool,
}

impl Render for VerifyReport {
    fn text(&self) -> String {
        let mut s = String::new();
        for c in &self.criteria {
            let _ = writeln!(
                s,
                "{} [{:>2}] {}: {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.id,
                c.name,
                c.detail
            );
        }
        let passed = self.criteria.iter().filter(|c| c.pass).count();
        let _ = writeln!(s, "{passed} of {} criteria passed", self.criteria.len());
        s
    }

    fn csv(&self) -> Result<String, CliError> {
        let mut s = String::from("id,name,pass\n");
        for c in &self.criteria {
            let _ = writeln!(s, "{},{},{}", c.id, c.name, c.pass);
        }
        Ok(s)
    }

    fn failed(&self) -> bool {
        !self.pass
    }
}
