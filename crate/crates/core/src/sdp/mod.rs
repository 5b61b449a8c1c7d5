//! Desk-scale primal-dual interior-point solver for semidefinite programs
//! over products of Hermitian PSD blocks, with certificate extraction.

mod problem;
mod solver;
mod verify;

pub use problem::{BlockDomain, BlockId, RowId, ScalarId, SdpProblem};
pub use solver::{SdpSolution, SdpStatus, SolveOptions};
pub use verify::{verify_certificate, CertificateReport};

use crate::herm::HermitianOperator;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// The smallest-eigenvalue program for a Hermitian operator, assembled as
/// `min <A, X> s.t. Tr X = 1, X >= 0`. The optimal value and the dual
/// multiplier of the trace row both equal the smallest eigenvalue, realizing
/// `max t s.t. A - t 1 >= 0` on the dual side.
pub fn lambda_min_problem(a: &HermitianOperator) -> (SdpProblem, BlockId) {
    let n = a.dim();
    let mut p = SdpProblem::new();
    let blk = p.add_hermitian_block(n);
    p.set_block_cost(blk, a.matrix()).expect("hermitian cost");
    let row = p.add_row(1.0);
    let eye = DMatrix::<Complex64>::identity(n, n);
    p.set_row_block_coeff(row, blk, &eye).expect("identity coeff");
    (p, blk)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::SubsystemShape;
    use crate::zoo;
    use nalgebra::DMatrix;
    use num_complex::Complex64;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn solve_default(p: &SdpProblem) -> SdpSolution {
        p.solve(&SolveOptions::default()).unwrap()
    }

    #[test]
    fn lambda_min_diag() {
        let shape = SubsystemShape::new(vec![3]).unwrap();
        let mut m = DMatrix::<Complex64>::zeros(3, 3);
        m[(0, 0)] = c(3.0, 0.0);
        m[(1, 1)] = c(1.0, 0.0);
        m[(2, 2)] = c(4.0, 0.0);
        let a = HermitianOperator::new(shape, m).unwrap();
        let (p, _) = lambda_min_problem(&a);
        let sol = solve_default(&p);
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.primal_objective - 1.0).abs() < 1e-6, "{}", sol.primal_objective);
        assert!((sol.dual_multipliers[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn lambda_min_matches_eigensolver_on_random_hermitian() {
        for trial in 0..6u64 {
            let n = 20;
            let g = zoo::gue(n, 700 + trial);
            let (p, _) = lambda_min_problem(&g);
            let sol = solve_default(&p);
            assert_eq!(sol.status, SdpStatus::Optimal, "trial {trial}");
            let want = g.min_eigenvalue();
            assert!(
                (sol.primal_objective - want).abs() < 1e-6,
                "trial {trial}: sdp {} vs eig {want}",
                sol.primal_objective
            );
            let report = verify_certificate(&p, &sol);
            assert!(report.within(1e-6), "certificate: {report:?}");
        }
    }

    #[test]
    fn min_trace_with_corner_constraint() {
        // minimize Tr X s.t. X >= 0, X_11 = 1 -> 1
        let mut p = SdpProblem::new();
        let blk = p.add_hermitian_block(3);
        let eye = DMatrix::<Complex64>::identity(3, 3);
        p.set_block_cost(blk, &eye).unwrap();
        let row = p.add_row(1.0);
        let mut e11 = DMatrix::<Complex64>::zeros(3, 3);
        e11[(0, 0)] = c(1.0, 0.0);
        p.set_row_block_coeff(row, blk, &e11).unwrap();
        let sol = solve_default(&p);
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.primal_objective - 1.0).abs() < 1e-6);
    }

    #[test]
    fn verify_catches_perturbed_solution() {
        let g = zoo::gue(8, 11);
        let (p, _) = lambda_min_problem(&g);
        let mut sol = solve_default(&p);
        let report = verify_certificate(&p, &sol);
        assert!(report.within(1e-6));
        // damage one block entry
        sol.primal_blocks[0][(0, 0)] += c(1e-3, 0.0);
        let bad = verify_certificate(&p, &sol);
        assert!(!bad.within(1e-6));
        assert!(bad.primal_residual > 1e-4);
    }

    #[test]
    fn weak_duality_on_solved_instances() {
        // min problems satisfy primal >= dual up to tolerance
        for trial in 0..5u64 {
            let g = zoo::gue(10, 900 + trial);
            let (p, _) = lambda_min_problem(&g);
            let sol = solve_default(&p);
            assert!(sol.primal_objective >= sol.dual_objective - 1e-6);
        }
    }

    #[test]
    fn monotone_restriction_under_added_equalities() {
        // adding an equality never improves a minimum
        let n = 8;
        let mut rng = zoo::substream(31, 0);
        for trial in 0..5 {
            let g = zoo::gue(n, 1000 + trial);
            // feasibility anchor: constraints consistent with X0 = I/n
            let mut prev = f64::NEG_INFINITY;
            for rows in [1usize, 3, 5] {
                let mut p = SdpProblem::new();
                let blk = p.add_hermitian_block(n);
                p.set_block_cost(blk, g.matrix()).unwrap();
                let tr_row = p.add_row(1.0);
                let eye = DMatrix::<Complex64>::identity(n, n);
                p.set_row_block_coeff(tr_row, blk, &eye).unwrap();
                for extra in 0..rows {
                    let h = zoo::gue(n, 5000 + 100 * trial + extra as u64);
                    let rhs = h.trace() / n as f64; // consistent with I/n
                    let r = p.add_row(rhs);
                    p.set_row_block_coeff(r, blk, h.matrix()).unwrap();
                }
                let sol = solve_default(&p);
                assert_eq!(sol.status, SdpStatus::Optimal, "rows={rows}");
                assert!(
                    sol.primal_objective >= prev - 1e-6,
                    "optimum decreased when adding equalities: {} -> {}",
                    prev,
                    sol.primal_objective
                );
                prev = sol.primal_objective;
                let _ = &mut rng;
            }
        }
    }

    #[test]
    fn real_embedding_soundness() {
        // solving a complex-block instance and its hand-built real embedding
        // gives identical optima
        let n = 6;
        let g = zoo::gue(n, 77);
        let (pc, _) = lambda_min_problem(&g);
        let solc = solve_default(&pc);

        let mut pr = SdpProblem::new();
        let blk = pr.add_real_block(2 * n);
        let embed = |mat: &DMatrix<Complex64>| -> DMatrix<Complex64> {
            let mut out = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
            for i in 0..n {
                for j in 0..n {
                    let z = mat[(i, j)];
                    out[(i, j)] = c(z.re, 0.0);
                    out[(i + n, j + n)] = c(z.re, 0.0);
                    out[(i, j + n)] = c(-z.im, 0.0);
                    out[(i + n, j)] = c(z.im, 0.0);
                }
            }
            out
        };
        // halve the cost so objectives match the complex reading
        let cost = embed(g.matrix()).map(|z| z * 0.5);
        pr.set_block_cost(blk, &cost).unwrap();
        let row = pr.add_row(1.0);
        let eye = DMatrix::<Complex64>::identity(n, n);
        let tr_coeff = embed(&eye).map(|z| z * 0.5);
        pr.set_row_block_coeff(row, blk, &tr_coeff).unwrap();
        let solr = solve_default(&pr);
        assert_eq!(solr.status, SdpStatus::Optimal);
        assert!(
            (solc.primal_objective - solr.primal_objective).abs() < 1e-7,
            "complex {} vs embedded {}",
            solc.primal_objective,
            solr.primal_objective
        );
    }

    #[test]
    fn detects_primal_infeasible() {
        // Tr X = -1 with X >= 0 is infeasible
        let mut p = SdpProblem::new();
        let blk = p.add_hermitian_block(3);
        let eye = DMatrix::<Complex64>::identity(3, 3);
        p.set_block_cost(blk, &eye).unwrap();
        let row = p.add_row(-1.0);
        p.set_row_block_coeff(row, blk, &eye).unwrap();
        let sol = solve_default(&p);
        assert_eq!(sol.status, SdpStatus::PrimalInfeasible);
    }

    #[test]
    fn detects_dual_infeasible() {
        // min -X_22 s.t. X_11 = 1, X >= 0 is unbounded below
        let mut p = SdpProblem::new();
        let blk = p.add_hermitian_block(2);
        let mut cost = DMatrix::<Complex64>::zeros(2, 2);
        cost[(1, 1)] = c(-1.0, 0.0);
        p.set_block_cost(blk, &cost).unwrap();
        let row = p.add_row(1.0);
        let mut e11 = DMatrix::<Complex64>::zeros(2, 2);
        e11[(0, 0)] = c(1.0, 0.0);
        p.set_row_block_coeff(row, blk, &e11).unwrap();
        let sol = solve_default(&p);
        assert_eq!(sol.status, SdpStatus::DualInfeasible);
    }

    #[test]
    fn rejects_dependent_rows_and_bad_tol() {
        let g = zoo::gue(4, 5);
        let (mut p, blk) = lambda_min_problem(&g);
        let eye = DMatrix::<Complex64>::identity(4, 4);
        let dup = p.add_row(1.0);
        p.set_row_block_coeff(dup, blk, &eye).unwrap();
        assert!(p.solve(&SolveOptions::default()).is_err());

        let (p2, _) = lambda_min_problem(&g);
        assert!(p2.solve(&SolveOptions { tol: 1e-3, ..Default::default() }).is_err());
    }

    #[test]
    fn free_scalar_shifts_into_equality() {
        // min Tr X + u s.t. Tr X + u = 2 and X_11 + 2u = 1:
        // dual feasibility forces the multipliers, primal optimum is 2.
        // A simpler check: solve and verify the certificate.
        let mut p = SdpProblem::new();
        let blk = p.add_hermitian_block(2);
        let eye = DMatrix::<Complex64>::identity(2, 2);
        p.set_block_cost(blk, &eye).unwrap();
        let s = p.add_scalar();
        p.set_scalar_cost(s, 1.0);
        let r1 = p.add_row(2.0);
        p.set_row_block_coeff(r1, blk, &eye).unwrap();
        p.set_row_scalar_coeff(r1, s, 1.0);
        let mut e11 = DMatrix::<Complex64>::zeros(2, 2);
        e11[(0, 0)] = c(1.0, 0.0);
        let r2 = p.add_row(1.0);
        p.set_row_block_coeff(r2, blk, &e11).unwrap();
        p.set_row_scalar_coeff(r2, s, 2.0);
        let sol = solve_default(&p);
        assert_eq!(sol.status, SdpStatus::Optimal);
        // objective equals the first constraint's rhs by construction
        assert!((sol.primal_objective - 2.0).abs() < 1e-6, "{}", sol.primal_objective);
        let report = verify_certificate(&p, &sol);
        assert!(report.within(1e-6), "{report:?}");
    }

    #[test]
    fn random_20x20_spot_check_against_eig() {
        let mut rng = zoo::substream(55, 0);
        let n = 20;
        let seed = rng.gen_range(0..10_000u64);
        let g = zoo::gue(n, seed);
        let (p, _) = lambda_min_problem(&g);
        let sol = p
            .solve(&SolveOptions { tol: 1e-8, ..Default::default() })
            .unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.primal_objective - g.min_eigenvalue()).abs() < 1e-6);
    }
}
