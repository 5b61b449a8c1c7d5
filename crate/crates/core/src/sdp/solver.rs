//! Primal-dual path-following solver with a Mehrotra-style
//! predictor-corrector and dense Schur-complement factorization.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sdp::problem::{extract_complex, BlockDomain, SdpProblem};

/// Outcome classification of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    NumericalLimit,
}

/// Options for [`SdpProblem::solve`].
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Convergence tolerance on the relative gap and residuals;
    /// must lie in [1e-10, 1e-4].
    pub tol: f64,
    pub max_iter: usize,
    /// Emit one JSON line per iteration on stderr.
    pub verbose: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tol: 1e-7, max_iter: 200, verbose: false }
    }
}

/// Primal/dual solution pair with status.
#[derive(Debug, Clone)]
pub struct SdpSolution {
    /// Primal PSD blocks in their declared domain (real blocks have zero
    /// imaginary part).
    pub primal_blocks: Vec<DMatrix<Complex64>>,
    pub scalars: Vec<f64>,
    /// Multipliers of the equality rows; the variable of the dual program.
    pub dual_multipliers: Vec<f64>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub status: SdpStatus,
    pub iterations: usize,
    /// Final duality-gap and residual measures (relative).
    pub rel_gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
}

const FRACTION_TO_BOUNDARY: f64 = 0.98;
const RAY_TOL: f64 = 1e-8;

struct Workspace {
    dims: Vec<usize>,
    costs: Vec<DMatrix<f64>>,
    bvec: DVector<f64>,
    bmat: DMatrix<f64>,
    fvec: DVector<f64>,
    /// rows touching each block: (row index, index into row.block_coeffs)
    by_block: Vec<Vec<(usize, usize)>>,
    total_block_dim: f64,
    c_scale: f64,
    b_scale: f64,
}

impl SdpProblem {
    /// Solve the primal-dual pair. Deterministic for identical inputs.
    pub fn solve(&self, opts: &SolveOptions) -> Result<SdpSolution> {
        if !(1e-10..=1e-4).contains(&opts.tol) {
            return Err(Error::InvalidProblem(format!(
                "tolerance {} outside [1e-10, 1e-4]",
                opts.tol
            )));
        }
        if self.blocks.is_empty() {
            return Err(Error::InvalidProblem("no PSD blocks".into()));
        }
        if self.rows.is_empty() {
            return Err(Error::InvalidProblem("no equality rows".into()));
        }
        let ws = self.workspace();
        self.presolve_rank_check(&ws)?;
        self.ipm(&ws, opts)
    }

    fn workspace(&self) -> Workspace {
        let dims: Vec<usize> = self.blocks.iter().map(|b| b.embedded_dim()).collect();
        let costs: Vec<DMatrix<f64>> = (0..self.blocks.len())
            .map(|j| self.embedded_cost(j))
            .collect();
        let m = self.rows.len();
        let nf = self.scalar_costs.len();
        let bvec = DVector::from_iterator(m, self.rows.iter().map(|r| r.rhs));
        let mut bmat = DMatrix::zeros(m, nf);
        for (i, row) in self.rows.iter().enumerate() {
            for &(s, v) in &row.scalar_coeffs {
                bmat[(i, s)] = v;
            }
        }
        let fvec = DVector::from_iterator(nf, self.scalar_costs.iter().copied());
        let mut by_block = vec![Vec::new(); self.blocks.len()];
        for (i, row) in self.rows.iter().enumerate() {
            for (pos, (j, _)) in row.block_coeffs.iter().enumerate() {
                by_block[*j].push((i, pos));
            }
        }
        let total_block_dim = dims.iter().sum::<usize>() as f64;
        let c_scale = costs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let b_scale = bvec.norm();
        Workspace { dims, costs, bvec, bmat, fvec, by_block, total_block_dim, c_scale, b_scale }
    }

    /// Gram-matrix rank check of the equality rows (including scalar
    /// columns): linearly dependent rows are rejected.
    fn presolve_rank_check(&self, ws: &Workspace) -> Result<()> {
        let m = self.rows.len();
        let mut gram = DMatrix::zeros(m, m);
        for (j, list) in ws.by_block.iter().enumerate() {
            let n = ws.dims[j];
            let _ = n;
            for a in 0..list.len() {
                let (ia, pa) = list[a];
                let spa = &self.rows[ia].block_coeffs[pa].1;
                for b in a..list.len() {
                    let (ib, pb) = list[b];
                    let spb = &self.rows[ib].block_coeffs[pb].1;
                    let mut t = 0.0;
                    // <A_a, A_b> over matching entries
                    for k in 0..spa.vals.len() {
                        for l in 0..spb.vals.len() {
                            if spa.rows[k] == spb.rows[l] && spa.cols[k] == spb.cols[l] {
                                t += spa.vals[k] * spb.vals[l];
                            }
                        }
                    }
                    gram[(ia, ib)] += t;
                    if ia != ib {
                        gram[(ib, ia)] += t;
                    }
                }
            }
        }
        gram += &ws.bmat * ws.bmat.transpose();
        let scale = (0..m).map(|i| gram[(i, i)]).fold(0.0, f64::max);
        if scale <= 0.0 {
            return Err(Error::InvalidProblem("a row has no coefficients".into()));
        }
        if !gram_full_rank(gram, 1e-11) {
            return Err(Error::InvalidProblem(
                "equality rows are linearly dependent".into(),
            ));
        }
        Ok(())
    }

    fn ipm(&self, ws: &Workspace, opts: &SolveOptions) -> Result<SdpSolution> {
        let m = self.rows.len();
        let nf = self.scalar_costs.len();
        let nblk = self.blocks.len();

        let xi_p = ws.b_scale.max(1.0);
        let xi_d = 1.0 + ws.c_scale;
        let mut xs: Vec<DMatrix<f64>> = ws.dims.iter().map(|&n| DMatrix::identity(n, n) * xi_p).collect();
        let mut ss: Vec<DMatrix<f64>> = ws.dims.iter().map(|&n| DMatrix::identity(n, n) * xi_d).collect();
        let mut y = DVector::zeros(m);
        let mut u = DVector::zeros(nf);

        let mut small_steps = 0usize;
        let mut last = Measures::default();
        for iter in 0..opts.max_iter {
            // inverses of the dual slacks
            let mut winv = Vec::with_capacity(nblk);
            for s in &ss {
                let chol = match nalgebra::Cholesky::new(s.clone()) {
                    Some(c) => c,
                    None => {
                        return self.finish(ws, xs, u, y, SdpStatus::NumericalLimit, iter, &last)
                    }
                };
                let mut inv = chol.inverse();
                symmetrize_mut(&mut inv);
                winv.push(inv);
            }

            let mu: f64 = xs
                .iter()
                .zip(&ss)
                .map(|(x, s)| frob_inner(x, s))
                .sum::<f64>()
                / ws.total_block_dim;

            // residuals
            let mut rp = ws.bvec.clone();
            for (i, row) in self.rows.iter().enumerate() {
                let mut acc = 0.0;
                for (j, sp) in &row.block_coeffs {
                    acc += sp.inner(&xs[*j]);
                }
                for &(s, v) in &row.scalar_coeffs {
                    acc += v * u[s];
                }
                rp[i] -= acc;
            }
            let mut rd: Vec<DMatrix<f64>> = Vec::with_capacity(nblk);
            for j in 0..nblk {
                let mut r = ws.costs[j].clone() - &ss[j];
                for &(i, pos) in &ws.by_block[j] {
                    let sp = &self.rows[i].block_coeffs[pos].1;
                    sp.add_scaled_to(&mut r, -y[i]);
                }
                rd.push(r);
            }
            let rf = &ws.fvec - ws.bmat.transpose() * &y;

            let pobj: f64 = xs
                .iter()
                .zip(&ws.costs)
                .map(|(x, c)| frob_inner(x, c))
                .sum::<f64>()
                + ws.fvec.dot(&u);
            let dobj = ws.bvec.dot(&y);

            let measures = Measures {
                rel_gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
                primal_residual: rp.norm() / (1.0 + ws.b_scale),
                dual_residual: {
                    let blocks = rd.iter().map(|r| r.norm()).fold(0.0, f64::max) / (1.0 + ws.c_scale);
                    let scalars = rf.norm() / (1.0 + ws.fvec.norm());
                    blocks.max(scalars)
                },
                pobj,
                dobj,
            };
            last = measures;

            if opts.verbose {
                eprintln!(
                    "{{\"iter\":{iter},\"mu\":{:.6e},\"gap\":{:.6e},\"primal_residual\":{:.6e},\"dual_residual\":{:.6e}}}",
                    mu, measures.rel_gap, measures.primal_residual, measures.dual_residual
                );
            }

            if measures.rel_gap <= opts.tol
                && measures.primal_residual <= opts.tol
                && measures.dual_residual <= opts.tol
            {
                return self.finish(ws, xs, u, y, SdpStatus::Optimal, iter, &last);
            }

            if let Some(status) = self.detect_rays(ws, &xs, &u, &y, pobj) {
                return self.finish(ws, xs, u, y, status, iter, &last);
            }

            // Schur complement
            let mut schur = DMatrix::zeros(m, m);
            for j in 0..nblk {
                let list = &ws.by_block[j];
                let x = &xs[j];
                let w = &winv[j];
                for a in 0..list.len() {
                    let (ia, pa) = list[a];
                    let spa = &self.rows[ia].block_coeffs[pa].1;
                    for b in a..list.len() {
                        let (ib, pb) = list[b];
                        let spb = &self.rows[ib].block_coeffs[pb].1;
                        let t = pair_term(spa, spb, x, w);
                        schur[(ia, ib)] += t;
                        if ia != ib {
                            schur[(ib, ia)] += t;
                        }
                    }
                }
            }
            symmetrize_mut(&mut schur);
            let chol = match cholesky_with_jitter(schur) {
                Some(c) => c,
                None => return self.finish(ws, xs, u, y, SdpStatus::NumericalLimit, iter, &last),
            };
            let zmat = if nf > 0 {
                let mut z = ws.bmat.clone();
                chol.solve_mut(&mut z); // M^{-1} B, reused via L factors below
                Some(z)
            } else {
                None
            };

            // common row functionals
            let mut a_w = DVector::zeros(m);
            let mut a_x = DVector::zeros(m);
            let mut a_xrdw = DVector::zeros(m);
            let mut xrdw: Vec<DMatrix<f64>> = Vec::with_capacity(nblk);
            for j in 0..nblk {
                xrdw.push(&xs[j] * &rd[j] * &winv[j]);
            }
            for (i, row) in self.rows.iter().enumerate() {
                let mut tw = 0.0;
                let mut tx = 0.0;
                let mut tr = 0.0;
                for (pos, (j, sp)) in row.block_coeffs.iter().enumerate() {
                    let _ = pos;
                    tw += sp.inner(&winv[*j]);
                    tx += sp.inner(&xs[*j]);
                    tr += sp_inner_general(sp, &xrdw[*j]);
                }
                a_w[i] = tw;
                a_x[i] = tx;
                a_xrdw[i] = tr;
            }

            let solve_kkt = |h: &DVector<f64>, rf: &DVector<f64>| -> (DVector<f64>, DVector<f64>) {
                if let Some(z) = &zmat {
                    // [M B; B^T 0] via the Schur complement of M
                    let mut minv_h = h.clone();
                    chol.solve_mut(&mut minv_h);
                    let sf = ws.bmat.transpose() * z;
                    let rhs = ws.bmat.transpose() * &minv_h - rf;
                    let du = match nalgebra::Cholesky::new(sf.clone()) {
                        Some(c) => c.solve(&rhs),
                        None => sf
                            .clone()
                            .lu()
                            .solve(&rhs)
                            .unwrap_or_else(|| DVector::zeros(nf)),
                    };
                    let dy = minv_h - z * &du;
                    (dy, du)
                } else {
                    let mut dy = h.clone();
                    chol.solve_mut(&mut dy);
                    (dy, DVector::zeros(0))
                }
            };

            let build_direction = |dy: &DVector<f64>,
                                   sigma_mu: f64,
                                   corr: Option<(&[DMatrix<f64>], &[DMatrix<f64>])>|
             -> (Vec<DMatrix<f64>>, Vec<DMatrix<f64>>) {
                let mut dss = Vec::with_capacity(nblk);
                let mut dxs = Vec::with_capacity(nblk);
                for j in 0..nblk {
                    let mut ds = rd[j].clone();
                    for &(i, pos) in &ws.by_block[j] {
                        let sp = &self.rows[i].block_coeffs[pos].1;
                        sp.add_scaled_to(&mut ds, -dy[i]);
                    }
                    let mut dx = &winv[j] * sigma_mu - &xs[j] - &xs[j] * &ds * &winv[j];
                    if let Some((dxa, dsa)) = corr {
                        dx -= &dxa[j] * &dsa[j] * &winv[j];
                    }
                    symmetrize_mut(&mut dx);
                    dss.push(ds);
                    dxs.push(dx);
                }
                (dxs, dss)
            };

            // predictor (affine scaling, sigma = 0)
            let h_aff = &rp + &a_x + &a_xrdw;
            let (dy_aff, _du_aff) = solve_kkt(&h_aff, &rf);
            let (dx_aff, ds_aff) = build_direction(&dy_aff, 0.0, None);
            let alpha_p_aff = step_length(&xs, &dx_aff, 1.0);
            let alpha_d_aff = step_length(&ss, &ds_aff, 1.0);
            let mut mu_aff = 0.0;
            for j in 0..nblk {
                let xn = &xs[j] + &dx_aff[j] * alpha_p_aff;
                let sn = &ss[j] + &ds_aff[j] * alpha_d_aff;
                mu_aff += frob_inner(&xn, &sn);
            }
            mu_aff /= ws.total_block_dim;
            let sigma = (mu_aff / mu).powi(3).clamp(0.0, 1.0);

            // corrector
            let mut a_corr = DVector::zeros(m);
            let mut corr_mats: Vec<DMatrix<f64>> = Vec::with_capacity(nblk);
            for j in 0..nblk {
                corr_mats.push(&dx_aff[j] * &ds_aff[j] * &winv[j]);
            }
            for (i, row) in self.rows.iter().enumerate() {
                let mut t = 0.0;
                for (j, sp) in &row.block_coeffs {
                    t += sp_inner_general(sp, &corr_mats[*j]);
                }
                a_corr[i] = t;
            }
            let h = &rp + &a_x + &a_xrdw - &a_w * (sigma * mu) + &a_corr;
            let (dy, du) = solve_kkt(&h, &rf);
            let (dx, ds) = build_direction(&dy, sigma * mu, Some((&dx_aff, &ds_aff)));

            let alpha_p = step_length(&xs, &dx, FRACTION_TO_BOUNDARY).min(1.0);
            let alpha_d = step_length(&ss, &ds, FRACTION_TO_BOUNDARY).min(1.0);

            for j in 0..nblk {
                xs[j] += &dx[j] * alpha_p;
                ss[j] += &ds[j] * alpha_d;
                symmetrize_mut(&mut xs[j]);
                symmetrize_mut(&mut ss[j]);
            }
            u += &du * alpha_p;
            y += &dy * alpha_d;

            if alpha_p < 1e-10 && alpha_d < 1e-10 {
                small_steps += 1;
                if small_steps >= 3 {
                    return self.finish(ws, xs, u, y, SdpStatus::NumericalLimit, iter + 1, &last);
                }
            } else {
                small_steps = 0;
            }
        }
        self.finish(ws, xs, u, y, SdpStatus::NumericalLimit, opts.max_iter, &last)
    }

    /// Improving-ray certificates for infeasibility.
    fn detect_rays(
        &self,
        ws: &Workspace,
        xs: &[DMatrix<f64>],
        u: &DVector<f64>,
        y: &DVector<f64>,
        pobj: f64,
    ) -> Option<SdpStatus> {
        // dual improving ray => primal infeasible:
        // b.y > 0, A*(y) <= 0, B^T y = 0 (scaled by b.y)
        let by = ws.bvec.dot(y);
        if by > 1.0 + 10.0 * (1.0 + ws.c_scale) {
            let mut ok = (ws.bmat.transpose() * y).norm() / by <= RAY_TOL;
            for j in 0..self.blocks.len() {
                if !ok {
                    break;
                }
                let n = ws.dims[j];
                let mut t = DMatrix::zeros(n, n);
                for &(i, pos) in &ws.by_block[j] {
                    let sp = &self.rows[i].block_coeffs[pos].1;
                    sp.add_scaled_to(&mut t, y[i] / by);
                }
                symmetrize_mut(&mut t);
                let max_eig = DMatrix::symmetric_eigenvalues(&t).max();
                ok &= max_eig <= RAY_TOL;
            }
            if ok {
                return Some(SdpStatus::PrimalInfeasible);
            }
        }
        // primal improving ray => dual infeasible:
        // <C, X> + f.u < 0 with A(X) + B u = 0, X >= 0 (scaled)
        let scale = -pobj;
        if scale > 1.0 + 10.0 * (1.0 + ws.b_scale) {
            let mut resid: f64 = 0.0;
            for row in &self.rows {
                let mut acc = 0.0;
                for (j, sp) in &row.block_coeffs {
                    acc += sp.inner(&xs[*j]);
                }
                for &(s, v) in &row.scalar_coeffs {
                    acc += v * u[s];
                }
                resid = resid.max((acc / scale).abs());
            }
            if resid <= RAY_TOL {
                return Some(SdpStatus::DualInfeasible);
            }
        }
        None
    }

    fn finish(
        &self,
        ws: &Workspace,
        xs: Vec<DMatrix<f64>>,
        u: DVector<f64>,
        y: DVector<f64>,
        status: SdpStatus,
        iterations: usize,
        last: &Measures,
    ) -> Result<SdpSolution> {
        let _ = ws;
        let mut primal_blocks = Vec::with_capacity(xs.len());
        for (spec, x) in self.blocks.iter().zip(&xs) {
            let mat = match spec.domain {
                BlockDomain::RealSymmetric => x.map(|v| Complex64::new(v, 0.0)),
                BlockDomain::ComplexHermitian => extract_complex(x),
            };
            primal_blocks.push(mat);
        }
        Ok(SdpSolution {
            primal_blocks,
            scalars: u.iter().copied().collect(),
            dual_multipliers: y.iter().copied().collect(),
            primal_objective: last.pobj,
            dual_objective: last.dobj,
            status,
            iterations,
            rel_gap: last.rel_gap,
            primal_residual: last.primal_residual,
            dual_residual: last.dual_residual,
        })
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Measures {
    rel_gap: f64,
    primal_residual: f64,
    dual_residual: f64,
    pobj: f64,
    dobj: f64,
}

/// LDL-style elimination with a relative pivot threshold; `false` means the
/// Gram matrix is numerically rank deficient.
fn gram_full_rank(mut g: DMatrix<f64>, rel_tol: f64) -> bool {
    let n = g.nrows();
    let scale = (0..n).map(|i| g[(i, i)]).fold(0.0, f64::max);
    let thresh = scale * rel_tol;
    for k in 0..n {
        let d = g[(k, k)];
        if d <= thresh {
            return false;
        }
        let dinv = 1.0 / d;
        for i in (k + 1)..n {
            let l = g[(i, k)] * dinv;
            if l == 0.0 {
                continue;
            }
            for j in (k + 1)..=i {
                let v = g[(j, k)];
                g[(i, j)] -= l * v;
            }
        }
    }
    true
}

fn frob_inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn symmetrize_mut(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

fn cholesky_with_jitter(mut m: DMatrix<f64>) -> Option<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    let n = m.nrows();
    let scale = (0..n).map(|i| m[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
    let mut jitter = scale * 1e-14;
    for _ in 0..8 {
        if let Some(c) = nalgebra::Cholesky::new(m.clone()) {
            return Some(c);
        }
        for i in 0..n {
            m[(i, i)] += jitter;
        }
        jitter *= 100.0;
    }
    None
}

/// Tr(A X B W) for sparse symmetric A, B and dense symmetric X, W.
fn pair_term(
    a: &crate::sdp::problem::SpMat,
    b: &crate::sdp::problem::SpMat,
    x: &DMatrix<f64>,
    w: &DMatrix<f64>,
) -> f64 {
    let n = x.nrows();
    let xsl = x.as_slice();
    let wsl = w.as_slice();
    let mut acc = 0.0;
    for k in 0..a.vals.len() {
        let p = a.rows[k] as usize;
        let q = a.cols[k] as usize;
        let va = a.vals[k];
        for l in 0..b.vals.len() {
            let r = b.rows[l] as usize;
            let s = b.cols[l] as usize;
            // A[p,q] X[q,r] B[r,s] W[s,p]
            acc += va * b.vals[l] * xsl[r * n + q] * wsl[p * n + s];
        }
    }
    acc
}

/// <A, M> for a possibly nonsymmetric dense M (used for X Rd W products).
fn sp_inner_general(a: &crate::sdp::problem::SpMat, m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let s = m.as_slice();
    let mut acc = 0.0;
    for k in 0..a.vals.len() {
        let (p, q) = (a.rows[k] as usize, a.cols[k] as usize);
        // Tr(A M) = sum_pq A[p,q] M[q,p]
        acc += a.vals[k] * s[p * n + q];
    }
    acc
}

/// Largest alpha <= cap such that X + alpha dX stays PSD, scaled by the
/// fraction-to-boundary factor when `tau < 1`.
fn step_length(xs: &[DMatrix<f64>], dxs: &[DMatrix<f64>], tau: f64) -> f64 {
    let mut alpha: f64 = 1.0 / f64::EPSILON;
    for (x, dx) in xs.iter().zip(dxs) {
        let n = x.nrows();
        let chol = match cholesky_with_jitter(x.clone()) {
            Some(c) => c,
            None => return 1e-12,
        };
        let l = chol.l();
        // T = L^{ -1 } dX L^{ -T }
        let mut t = dx.clone();
        l.solve_lower_triangular_mut(&mut t);
        let mut tt = t.transpose();
        l.solve_lower_triangular_mut(&mut tt);
        let mut sym = tt;
        symmetrize_mut(&mut sym);
        let min_eig = DMatrix::symmetric_eigenvalues(&sym).min();
        let _ = n;
        if min_eig < -1e-14 {
            alpha = alpha.min(-1.0 / min_eig);
        }
    }
    (tau * alpha).min(1.0)
}

