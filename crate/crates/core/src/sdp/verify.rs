//! Independent residual verification of solver output.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::herm::eig_hermitian_matrix;
use crate::sdp::problem::{BlockDomain, SdpProblem};
use crate::sdp::solver::SdpSolution;

/// Residuals recomputed from the problem data and a candidate solution,
/// without reference to solver internals.
#[derive(Debug, Clone)]
pub struct CertificateReport {
    /// Max row violation |<A_i, X> + B u - b_i|.
    pub primal_residual: f64,
    /// Max over blocks of the Frobenius deviation of C_j - A*_j(y) from a
    /// PSD matrix reconstructed as the dual slack, measured through its most
    /// negative eigenvalue (0 when the slack is PSD).
    pub dual_slack_min_eig: f64,
    /// Max scalar-column violation |B^T y - f|.
    pub scalar_residual: f64,
    pub gap: f64,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// Minimum eigenvalue of each primal block.
    pub min_block_eigenvalues: Vec<f64>,
}

impl CertificateReport {
    pub fn within(&self, tol: f64) -> bool {
        self.primal_residual <= tol
            && self.scalar_residual <= tol
            && self.dual_slack_min_eig >= -tol
            && self.min_block_eigenvalues.iter().all(|&e| e >= -tol)
            && self.gap.abs() <= tol * (1.0 + self.primal_objective.abs() + self.dual_objective.abs())
    }
}

/// Recompute all residuals of `solution` against `problem`.
pub fn verify_certificate(problem: &SdpProblem, solution: &SdpSolution) -> CertificateReport {
    let nblk = problem.blocks.len();

    let mut primal_objective = 0.0;
    let mut min_block_eigenvalues = Vec::with_capacity(nblk);
    for j in 0..nblk {
        let x = &solution.primal_blocks[j];
        if let Some(c) = &problem.costs[j] {
            primal_objective += hs_inner(c, x);
        }
        let (vals, _) = eig_hermitian_matrix(&hermitian_part(x));
        min_block_eigenvalues.push(vals[0]);
    }
    for (f, u) in problem.scalar_costs.iter().zip(&solution.scalars) {
        primal_objective += f * u;
    }

    let mut primal_residual = 0f64;
    let mut dual_objective = 0.0;
    for (i, row) in problem.rows.iter().enumerate() {
        let mut acc = 0.0;
        for (j, _) in &row.block_coeffs {
            // recompute from the complex data rather than the embedding
            let a = row_coeff_dense(problem, i, *j);
            acc += hs_inner(&a, &solution.primal_blocks[*j]);
        }
        for &(s, v) in &row.scalar_coeffs {
            acc += v * solution.scalars[s];
        }
        primal_residual = primal_residual.max((acc - row.rhs).abs());
        dual_objective += row.rhs * solution.dual_multipliers[i];
    }

    // dual slack S_j = C_j - sum_i y_i A_ij must be PSD
    let mut dual_slack_min_eig = f64::INFINITY;
    for j in 0..nblk {
        let dim = problem.blocks[j].dim;
        let mut slack = match &problem.costs[j] {
            Some(c) => c.clone(),
            None => DMatrix::zeros(dim, dim),
        };
        for (i, row) in problem.rows.iter().enumerate() {
            if row.block_coeffs.iter().any(|(b, _)| *b == j) {
                let a = row_coeff_dense(problem, i, j);
                slack -= a * Complex64::new(solution.dual_multipliers[i], 0.0);
            }
        }
        let (vals, _) = eig_hermitian_matrix(&hermitian_part(&slack));
        dual_slack_min_eig = dual_slack_min_eig.min(vals[0]);
    }

    let mut scalar_residual = 0f64;
    for (s, &f) in problem.scalar_costs.iter().enumerate() {
        let mut acc = 0.0;
        for (i, row) in problem.rows.iter().enumerate() {
            for &(t, v) in &row.scalar_coeffs {
                if t == s {
                    acc += v * solution.dual_multipliers[i];
                }
            }
        }
        scalar_residual = scalar_residual.max((acc - f).abs());
    }

    CertificateReport {
        primal_residual,
        dual_slack_min_eig,
        scalar_residual,
        gap: primal_objective - dual_objective,
        primal_objective,
        dual_objective,
        min_block_eigenvalues,
    }
}

fn hs_inner(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc
}

fn hermitian_part(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = m.nrows();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
        }
    }
    out
}

/// Dense complex coefficient of block `j` in row `i`, reconstructed from
/// the embedded sparse storage.
fn row_coeff_dense(problem: &SdpProblem, i: usize, j: usize) -> DMatrix<Complex64> {
    let dim = problem.blocks[j].dim;
    let sp = problem.rows[i]
        .block_coeffs
        .iter()
        .find(|(b, _)| *b == j)
        .map(|(_, sp)| sp)
        .expect("row touches block");
    let mut out = DMatrix::zeros(dim, dim);
    match problem.blocks[j].domain {
        BlockDomain::RealSymmetric => {
            for k in 0..sp.vals.len() {
                out[(sp.rows[k] as usize, sp.cols[k] as usize)] +=
                    Complex64::new(sp.vals[k], 0.0);
            }
        }
        BlockDomain::ComplexHermitian => {
            // embedding stored (re/2) at (i,j) and (i+n,j+n), (-im/2) at
            // (i, j+n), (im/2) at (i+n, j)
            for k in 0..sp.vals.len() {
                let (r, c) = (sp.rows[k] as usize, sp.cols[k] as usize);
                let v = sp.vals[k];
                if r < dim && c < dim {
                    out[(r, c)] += Complex64::new(2.0 * v, 0.0) * 0.5;
                } else if r >= dim && c >= dim {
                    out[(r - dim, c - dim)] += Complex64::new(2.0 * v, 0.0) * 0.5;
                } else if r < dim && c >= dim {
                    out[(r, c - dim)] += Complex64::new(0.0, -2.0 * v) * 0.5;
                } else {
                    out[(r - dim, c)] += Complex64::new(0.0, 2.0 * v) * 0.5;
                }
            }
        }
    }
    out
}
