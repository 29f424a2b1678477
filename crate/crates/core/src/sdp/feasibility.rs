//! Phase-I feasibility: `min Σ(s⁺ + s⁻)  s.t.  A(X) + s⁺ − s⁻ = b,  X ⪰ 0, s± ≥ 0`.
//!
//! The optimum is zero iff the system is feasible. Its dual,
//! `max bᵀy  s.t.  Aᵀy ⪯ 0, |y_j| ≤ 1`, yields a Farkas certificate otherwise.

use nalgebra::{DMatrix, DVector};

use super::ipm::{solve, Settings, Status};
use super::problem::{SdpProblem, SymBlockMatrix};
use crate::error::Result;

pub const DEFAULT_MARGIN: f64 = 1e-8;

#[derive(Clone, Debug)]
pub enum Feasibility {
    /// A PSD point with `‖A(X) − b‖ ≤ 1e-8·(1 + ‖b‖)`.
    Feasible { witness: Vec<DMatrix<f64>>, residual: f64 },
    /// `y` with `Aᵀy ⪯ 0`, `‖y‖∞ ≤ 1` and `bᵀy = margin`.
    Infeasible { certificate: DVector<f64>, margin: f64 },
    /// Neither decision could be made with the requested margin.
    Undecided { margin: f64 },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Self::Feasible { .. })
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, Self::Infeasible { .. })
    }
}

fn psd_part(m: &DMatrix<f64>) -> DMatrix<f64> {
    let e = m.clone().symmetric_eigen();
    let lam = e.eigenvalues.map(|l| l.max(0.0));
    &e.eigenvectors * DMatrix::from_diagonal(&lam) * e.eigenvectors.transpose()
}

pub fn feasibility(p: &SdpProblem, settings: &Settings, margin: f64) -> Result<Feasibility> {
    let m = p.num_constraints();
    let nb = p.block_dims().len();
    let mut dims = p.block_dims().to_vec();
    dims.extend(std::iter::repeat_n(1, 2 * m));
    let mut objective = SymBlockMatrix::new();
    let mut constraints = Vec::with_capacity(m);
    for (j, a) in p.constraints().iter().enumerate() {
        let mut c = a.clone();
        c.add(nb + 2 * j, 0, 0, 1.0);
        c.add(nb + 2 * j + 1, 0, 0, -1.0);
        objective.add(nb + 2 * j, 0, 0, 1.0);
        objective.add(nb + 2 * j + 1, 0, 0, 1.0);
        constraints.push(c);
    }
    let phase1 = SdpProblem::new(dims, objective, constraints, p.rhs().to_vec())?;
    let sol = solve(&phase1, settings);

    let b = DVector::from_column_slice(p.rhs());
    let witness: Vec<DMatrix<f64>> = sol.x[..nb].iter().map(psd_part).collect();
    let residual = (&b - p.apply(&witness)).norm() / (1.0 + b.norm());
    if residual <= 1e-8 {
        return Ok(Feasibility::Feasible { witness, residual });
    }

    if sol.status == Status::Optimal {
        let y = sol.y.clone();
        let value = b.dot(&y);
        let worst = p
            .adjoint(&y)
            .iter()
            .map(|a| a.symmetric_eigenvalues().max())
            .fold(f64::NEG_INFINITY, f64::max);
        if value >= margin && worst <= 1e-9 {
            return Ok(Feasibility::Infeasible {
                certificate: y,
                margin: value,
            });
        }
        return Ok(Feasibility::Undecided {
            margin: value.max(sol.primal_objective),
        });
    }
    Ok(Feasibility::Undecided {
        margin: sol.primal_objective,
    })
}
