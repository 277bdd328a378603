//! Effective Hamiltonians on the electronic doublet (optionally tensored with a spin set)
//! built from field tensors, operator matrices and empirical coefficients.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

type CMat = DMatrix<Complex64>;

/// Electronic dimension of the doublet.
pub const ELECTRONIC_DIM: usize = 2;
/// Hermiticity defect above which the raw result is reported before symmetrization.
pub const HERMITICITY_WARN: f64 = 1e-10;

/// Inputs of the effective Hamiltonian. `field[a]` is the 2×2 electronic matrix of the field
/// component along nuclear axis `a` (pointwise value or a precomputed expectation value).
/// Operators act on the electronic space, or on electronic ⊗ spin when `spin_dim > 1`, with
/// the product index `r·spin_dim + M`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffHSpec {
    pub field: Vec<CMat>,
    pub op1: Option<Vec<CMat>>,
    /// `op2[a][b]`.
    pub op2: Option<Vec<Vec<CMat>>>,
    pub c1: f64,
    pub c2: f64,
    pub spin_dim: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EffH {
    pub matrix: CMat,
    /// `max |H - H†| / 2` of the raw contraction.
    pub hermiticity_defect: f64,
}

impl EffHSpec {
    pub fn dimension(&self) -> usize {
        ELECTRONIC_DIM * self.spin_dim
    }

    fn validate(&self) -> Result<()> {
        if self.spin_dim == 0 {
            return Err(Error::Input("spin dimension must be at least 1".into()));
        }
        let axes = self.field.len();
        if axes == 0 {
            return Err(Error::Input("field tensor has no axes".into()));
        }
        for (a, f) in self.field.iter().enumerate() {
            if f.shape() != (ELECTRONIC_DIM, ELECTRONIC_DIM) {
                return Err(Error::Input(format!(
                    "field component {a} is {:?}, expected 2x2",
                    f.shape()
                )));
            }
        }
        let n = self.dimension();
        let check = |m: &CMat, what: String| {
            if m.shape() != (n, n) {
                Err(Error::Input(format!("{what} is {:?}, expected {n}x{n}", m.shape())))
            } else {
                Ok(())
            }
        };
        match &self.op1 {
            Some(ops) => {
                if ops.len() != axes {
                    return Err(Error::Input(format!("op1 has {} axes, field has {axes}", ops.len())));
                }
                for (a, m) in ops.iter().enumerate() {
                    check(m, format!("op1[{a}]"))?;
                }
            }
            None if self.c1 != 0.0 => return Err(Error::Input("C1 is nonzero but op1 is missing".into())),
            None => {}
        }
        match &self.op2 {
            Some(ops) => {
                if ops.len() != axes || ops.iter().any(|row| row.len() != axes) {
                    return Err(Error::Input(format!("op2 must be {axes}x{axes} axes")));
                }
                for (a, row) in ops.iter().enumerate() {
                    for (b, m) in row.iter().enumerate() {
                        check(m, format!("op2[{a}][{b}]"))?;
                    }
                }
            }
            None if self.c2 != 0.0 => return Err(Error::Input("C2 is nonzero but op2 is missing".into())),
            None => {}
        }
        Ok(())
    }
}

/// `F ⊗ 1_spin`.
fn lift(f: &CMat, spin_dim: usize) -> CMat {
    f.kronecker(&CMat::identity(spin_dim, spin_dim))
}

pub fn build_effh(spec: &EffHSpec) -> Result<EffH> {
    spec.validate()?;
    let n = spec.dimension();
    let mut h = CMat::zeros(n, n);
    let lifted: Vec<CMat> = spec.field.iter().map(|f| lift(f, spec.spin_dim)).collect();
    if spec.c1 != 0.0 {
        if let Some(ops) = &spec.op1 {
            for (f, op) in lifted.iter().zip(ops) {
                h += (f * op) * Complex64::new(spec.c1, 0.0);
            }
        }
    }
    if spec.c2 != 0.0 {
        if let Some(ops) = &spec.op2 {
            for (a, row) in ops.iter().enumerate() {
                for (b, op) in row.iter().enumerate() {
                    h += (&lifted[a] * &lifted[b] * op) * Complex64::new(spec.c2, 0.0);
                }
            }
        }
    }
    let adj = h.adjoint();
    let defect = (&h - &adj).iter().fold(0.0_f64, |m, z| m.max(z.norm())) * 0.5;
    if defect > HERMITICITY_WARN {
        log::warn!("effective Hamiltonian not hermitian before symmetrization (defect {defect:.3e})");
    }
    let matrix = (h + adj) * Complex64::new(0.5, 0.0);
    Ok(EffH {
        matrix,
        hermiticity_defect: defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn real(rows: &[[f64; 2]; 2]) -> CMat {
        CMat::from_fn(2, 2, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    fn identities(n: usize, axes: usize) -> Vec<CMat> {
        vec![CMat::identity(n, n); axes]
    }

    fn delta_ops(n: usize, axes: usize) -> Vec<Vec<CMat>> {
        (0..axes)
            .map(|a| {
                (0..axes)
                    .map(|b| if a == b { CMat::identity(n, n) } else { CMat::zeros(n, n) })
                    .collect()
            })
            .collect()
    }

    fn spec(field: Vec<CMat>, c1: f64, c2: f64) -> EffHSpec {
        let axes = field.len();
        EffHSpec {
            field,
            op1: Some(identities(2, axes)),
            op2: Some(delta_ops(2, axes)),
            c1,
            c2,
            spin_dim: 1,
        }
    }

    #[test]
    fn zero_coefficients_give_zero() {
        let s = spec(vec![real(&[[1.0, 2.0], [2.0, -1.0]]); 3], 0.0, 0.0);
        assert_eq!(build_effh(&s).unwrap().matrix, CMat::zeros(2, 2));
    }

    #[test]
    fn linear_term_sums_components() {
        let f = vec![
            real(&[[PI, 0.0], [0.0, -PI]]),
            real(&[[0.5, 0.1], [0.1, 0.2]]),
            real(&[[0.0, 1.0], [1.0, 0.0]]),
        ];
        let h = build_effh(&spec(f.clone(), 1.0, 0.0)).unwrap();
        let sum = f.iter().fold(CMat::zeros(2, 2), |acc, m| acc + m);
        assert!((h.matrix - sum).norm() < 1e-14);
    }

    #[test]
    fn quadratic_term_sums_squares() {
        let f = vec![
            real(&[[1.0, 0.3], [0.3, -0.5]]),
            real(&[[0.0, 2.0], [2.0, 0.0]]),
            real(&[[0.2, 0.0], [0.0, 0.7]]),
        ];
        let h = build_effh(&spec(f.clone(), 0.0, 0.4)).unwrap();
        let mut expected = CMat::zeros(2, 2);
        for m in &f {
            for i in 0..2 {
                for j in 0..2 {
                    for p in 0..2 {
                        expected[(i, j)] += m[(i, p)] * m[(p, j)] * 0.4;
                    }
                }
            }
        }
        assert!((h.matrix - expected).norm() < 1e-14);
    }

    #[test]
    fn spin_extension_with_trivial_spin_matches_orbital() {
        let f = vec![real(&[[1.0, 0.5], [0.5, -1.0]]); 3];
        let orbital = build_effh(&spec(f.clone(), 0.7, 0.2)).unwrap().matrix;
        let s = EffHSpec {
            field: f,
            op1: Some(identities(4, 3)),
            op2: Some(delta_ops(4, 3)),
            c1: 0.7,
            c2: 0.2,
            spin_dim: 2,
        };
        let spin = build_effh(&s).unwrap().matrix;
        assert!((spin - orbital.kronecker(&CMat::identity(2, 2))).norm() < 1e-13);
    }

    #[test]
    fn dimension_errors() {
        let mut s = spec(vec![real(&[[1.0, 0.0], [0.0, 1.0]]); 3], 1.0, 0.0);
        s.op1 = Some(identities(3, 3));
        assert!(matches!(build_effh(&s), Err(Error::Input(_))));
        let mut s = spec(vec![real(&[[1.0, 0.0], [0.0, 1.0]]); 3], 1.0, 0.0);
        s.op1 = None;
        assert!(build_effh(&s).is_err());
        let mut s = spec(vec![real(&[[1.0, 0.0], [0.0, 1.0]]); 3], 1.0, 1.0);
        s.op2 = Some(delta_ops(2, 2));
        assert!(build_effh(&s).is_err());
        let s = spec(vec![CMat::zeros(3, 3)], 1.0, 0.0);
        assert!(build_effh(&s).is_err());
    }

    #[test]
    fn non_hermitian_product_is_symmetrized() {
        let f = vec![real(&[[1.0, 0.0], [0.0, 0.0]])];
        let op = CMat::from_fn(2, 2, |i, j| Complex64::new((i + 2 * j) as f64, 0.0));
        let s = EffHSpec {
            field: f,
            op1: Some(vec![op]),
            op2: None,
            c1: 1.0,
            c2: 0.0,
            spin_dim: 1,
        };
        let h = build_effh(&s).unwrap();
        assert!(h.hermiticity_defect > 0.5);
        assert!((&h.matrix - h.matrix.adjoint()).norm() == 0.0);
    }
}
