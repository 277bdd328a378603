//! Input files: models, effective-Hamiltonian specs and run configuration.

use std::fs;
use std::path::Path;

use conical_phase::effh::EffHSpec;
use conical_phase::model::{ActiveAxis, BerryModel, CartesianCoupling, ComplexCoupling, Model};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum AxisName {
    #[default]
    #[serde(rename = "Z_carries_b")]
    Z,
    #[serde(rename = "Y_carries_b")]
    Y,
}

/// On-disk model description, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelFile {
    Cartesian {
        #[serde(rename = "coeffs_A")]
        coeffs_a: Vec<(usize, usize, f64)>,
        #[serde(rename = "coeffs_B")]
        coeffs_b: Vec<(usize, usize, f64)>,
    },
    Complex {
        #[serde(rename = "K")]
        k: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mu: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q_plus: Option<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q_minus: Option<Vec<Vec<f64>>>,
    },
    Berry {
        b: f64,
        #[serde(default = "one")]
        alpha: f64,
        #[serde(default = "one")]
        beta: f64,
        #[serde(default)]
        active_axis: AxisName,
    },
}

fn one() -> f64 {
    1.0
}

impl ModelFile {
    pub fn build(&self) -> Result<Model, CliError> {
        let bad = |e: conical_phase::Error| CliError::ModelParse(e.to_string());
        Ok(match self {
            ModelFile::Cartesian { coeffs_a, coeffs_b } => {
                Model::Cartesian(CartesianCoupling::from_terms(coeffs_a, coeffs_b).map_err(bad)?)
            }
            ModelFile::Complex {
                k,
                mu,
                lambda,
                q_plus,
                q_minus,
            } => match (mu, lambda, q_plus, q_minus) {
                (Some(mu), Some(lambda), None, None) => {
                    Model::Complex(ComplexCoupling::quartic(*k, *mu, *lambda).map_err(bad)?)
                }
                (None, None, plus, minus) if plus.is_some() || minus.is_some() => Model::Complex(
                    ComplexCoupling::general(
                        *k,
                        plus.clone().unwrap_or_default(),
                        minus.clone().unwrap_or_default(),
                    )
                    .map_err(bad)?,
                ),
                _ => {
                    return Err(CliError::ModelParse(
                        "complex model needs either mu and lambda or q_plus/q_minus".into(),
                    ))
                }
            },
            ModelFile::Berry {
                b,
                alpha,
                beta,
                active_axis,
            } => {
                let axis = match active_axis {
                    AxisName::Z => ActiveAxis::ZCarriesB,
                    AxisName::Y => ActiveAxis::YCarriesB,
                };
                Model::Berry(BerryModel::new(*b, *alpha, *beta, axis).map_err(bad)?)
            }
        })
    }
}

fn read(path: &Path, what: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::ModelParse(format!("cannot read {what} {}: {e}", path.display())))
}

pub fn load_model(path: &Path) -> Result<Model, CliError> {
    let text = read(path, "model file")?;
    let file: ModelFile = serde_json::from_str(&text)
        .map_err(|e| CliError::ModelParse(format!("{}: {e}", path.display())))?;
    file.build()
}

/// A complex number written either as a bare real or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CNum {
    Real(f64),
    Pair([f64; 2]),
}

impl From<CNum> for Complex64 {
    fn from(c: CNum) -> Self {
        match c {
            CNum::Real(r) => Complex64::new(r, 0.0),
            CNum::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

type RowMajor = Vec<Vec<CNum>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EffHFile {
    /// `field[a]` as a row-major 2×2 matrix.
    pub field: Vec<RowMajor>,
    #[serde(default)]
    pub op1: Option<Vec<RowMajor>>,
    #[serde(default)]
    pub op2: Option<Vec<Vec<RowMajor>>>,
    #[serde(default)]
    pub c1: f64,
    #[serde(default)]
    pub c2: f64,
    #[serde(default = "one_usize")]
    pub spin_dim: usize,
}

fn one_usize() -> usize {
    1
}

fn matrix(rows: &RowMajor) -> Result<DMatrix<Complex64>, CliError> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != m) {
        return Err(CliError::ModelParse("ragged matrix in effective-Hamiltonian spec".into()));
    }
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j].into()))
}

impl EffHFile {
    pub fn build(&self) -> Result<EffHSpec, CliError> {
        let list = |v: &Vec<RowMajor>| v.iter().map(matrix).collect::<Result<Vec<_>, _>>();
        Ok(EffHSpec {
            field: list(&self.field)?,
            op1: self.op1.as_ref().map(list).transpose()?,
            op2: self
                .op2
                .as_ref()
                .map(|rows| rows.iter().map(list).collect::<Result<Vec<_>, _>>())
                .transpose()?,
            c1: self.c1,
            c2: self.c2,
            spin_dim: self.spin_dim,
        })
    }
}

pub fn load_effh(path: &Path) -> Result<EffHSpec, CliError> {
    let text = read(path, "spec file")?;
    let file: EffHFile = serde_json::from_str(&text)
        .map_err(|e| CliError::ModelParse(format!("{}: {e}", path.display())))?;
    file.build()
}

/// Numeric overrides shared by subcommands; command-line flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub b_sequence: Option<Vec<f64>>,
    pub loop_samples: Option<usize>,
    pub tolerance: Option<f64>,
    pub ode_tolerance: Option<f64>,
    pub q_max: Option<f64>,
    pub z: Option<f64>,
}

pub fn load_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_model_kind() {
        let quartic = r#"{"kind": "complex", "K": 1.0, "mu": 0.3, "lambda": 0.003}"#;
        let m: ModelFile = serde_json::from_str(quartic).unwrap();
        assert!(matches!(m.build().unwrap(), Model::Complex(_)));

        let general = r#"{"kind": "complex", "K": 2.0, "q_plus": [[-0.3]], "q_minus": [[0.003]]}"#;
        let m: ModelFile = serde_json::from_str(general).unwrap();
        assert!(matches!(m.build().unwrap(), Model::Complex(_)));

        let cart = r#"{"kind": "cartesian", "coeffs_A": [[2, 0, 1.0], [0, 0, -1.0]], "coeffs_B": [[0, 1, 1.0]]}"#;
        let m: ModelFile = serde_json::from_str(cart).unwrap();
        assert_eq!(
            m.build().unwrap(),
            Model::Cartesian(CartesianCoupling::example_one())
        );

        let berry = r#"{"kind": "berry", "b": 0.5, "alpha": 2.0, "beta": 1.0, "active_axis": "Y_carries_b"}"#;
        let m: ModelFile = serde_json::from_str(berry).unwrap();
        let Model::Berry(b) = m.build().unwrap() else { panic!() };
        assert_eq!(b.active_axis, ActiveAxis::YCarriesB);
    }

    #[test]
    fn rejects_unknown_and_mixed_fields() {
        let extra = r#"{"kind": "berry", "b": 0.5, "gamma": 2.0}"#;
        assert!(serde_json::from_str::<ModelFile>(extra).is_err());
        let mixed = r#"{"kind": "complex", "K": 1.0, "mu": 0.3, "q_plus": [[1.0]]}"#;
        let m: ModelFile = serde_json::from_str(mixed).unwrap();
        assert!(matches!(m.build(), Err(CliError::ModelParse(_))));
        assert!(serde_json::from_str::<ConfigFile>(r#"{"samples": 3}"#).is_err());
    }

    #[test]
    fn model_file_round_trips() {
        let m = ModelFile::Complex {
            k: 1.0,
            mu: Some(0.3),
            lambda: Some(0.003),
            q_plus: None,
            q_minus: None,
        };
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<ModelFile>(&s).unwrap(), m);
    }

    #[test]
    fn effh_entries_accept_reals_and_pairs() {
        let text = r#"{"field": [[[1, [0, 1]], [[0, -1], 2]]], "op1": [[[1, 0], [0, 1]]], "c1": 1.0}"#;
        let f: EffHFile = serde_json::from_str(text).unwrap();
        let spec = f.build().unwrap();
        assert_eq!(spec.field[0][(0, 1)], Complex64::new(0.0, 1.0));
        assert_eq!(spec.spin_dim, 1);
    }
}
