//! Index reshuffles across a bipartition: partial transpose and realignment.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::herm::HermitianOperator;
use crate::shape::Bipartition;

fn check_cut(a: &HermitianOperator, cut: &Bipartition) -> Result<()> {
    if a.shape() != cut.shape() {
        return Err(Error::DimensionMismatch(format!(
            "operator shape {:?} vs cut shape {:?}",
            a.shape().dims(),
            cut.shape().dims()
        )));
    }
    Ok(())
}

/// Partial transpose on the canonical block of the cut: row and column
/// digits of every party in the block are swapped. An involution that
/// preserves trace and Hilbert-Schmidt norm exactly.
pub fn partial_transpose(a: &HermitianOperator, cut: &Bipartition) -> Result<HermitianOperator> {
    check_cut(a, cut)?;
    let n = a.dim();
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    for r in 0..n {
        let (rb, rc) = cut.split_index(r);
        for s in 0..n {
            let (sb, sc) = cut.split_index(s);
            let r2 = cut.join_index(sb, rc);
            let s2 = cut.join_index(rb, sc);
            out[(r2, s2)] = a.matrix()[(r, s)];
        }
    }
    Ok(HermitianOperator::new_unchecked(a.shape().clone(), out))
}

/// Realignment of the operator across the cut. The output is the
/// (d_b^2 x d_c^2) matrix R with R[(i,i'), (j,j')] = A[(i,j), (i',j')];
/// its singular values are the operator Schmidt coefficients.
pub fn realign(a: &HermitianOperator, cut: &Bipartition) -> Result<DMatrix<Complex64>> {
    check_cut(a, cut)?;
    let n = a.dim();
    let db = cut.block_dim();
    let dc = cut.complement_dim();
    let mut out = DMatrix::<Complex64>::zeros(db * db, dc * dc);
    for r in 0..n {
        let (i, j) = cut.split_index(r);
        for s in 0..n {
            let (ip, jp) = cut.split_index(s);
            out[(i * db + ip, j * dc + jp)] = a.matrix()[(r, s)];
        }
    }
    Ok(out)
}

/// Singular values of the realigned matrix, descending.
pub fn operator_schmidt_coefficients(a: &HermitianOperator, cut: &Bipartition) -> Result<Vec<f64>> {
    let r = realign(a, cut)?;
    let svd = nalgebra::SVD::new(r, false, false);
    let mut vals: Vec<f64> = svd.singular_values.iter().copied().collect();
    vals.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::{enumerate_bipartitions, SubsystemShape};
    use crate::zoo;
    use num_complex::Complex64;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bell_projector() -> HermitianOperator {
        let shape = SubsystemShape::uniform(2, 2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)];
        HermitianOperator::projector(shape, &psi).unwrap()
    }

    #[test]
    fn diagonal_fixed_point() {
        let shape = SubsystemShape::uniform(2, 2).unwrap();
        let psi = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let p = HermitianOperator::projector(shape.clone(), &psi).unwrap();
        let cut = enumerate_bipartitions(&shape).unwrap().remove(0);
        let pt = partial_transpose(&p, &cut).unwrap();
        assert_eq!(pt.matrix(), p.matrix());
    }

    #[test]
    fn bell_state_pt_spectrum() {
        let p = bell_projector();
        let cut = enumerate_bipartitions(p.shape()).unwrap().remove(0);
        let pt = partial_transpose(&p, &cut).unwrap();
        let (vals, _) = pt.eig();
        let want = [-0.5, 0.5, 0.5, 0.5];
        for (v, w) in vals.iter().zip(want.iter()) {
            assert!((v - w).abs() < 1e-12, "{vals:?}");
        }
    }

    #[test]
    fn ghz_pt_min_eigenvalue() {
        let shape = SubsystemShape::uniform(2, 3).unwrap();
        let psi = zoo::ghz(3, 2).unwrap();
        let p = HermitianOperator::projector(shape.clone(), &psi).unwrap();
        for cut in enumerate_bipartitions(&shape).unwrap() {
            let pt = partial_transpose(&p, &cut).unwrap();
            assert!((pt.min_eigenvalue() + 0.5).abs() < 1e-12, "cut {}", cut.label());
        }
    }

    #[test]
    fn pt_involution_and_isometry() {
        let shape = SubsystemShape::new(vec![2, 3, 2]).unwrap();
        let n = shape.total();
        let mut rng = zoo::substream(5, 0);
        for trial in 0..100 {
            let mut mat = nalgebra::DMatrix::<Complex64>::zeros(n, n);
            for i in 0..n {
                mat[(i, i)] = c(rng.gen_range(-1.0..1.0), 0.0);
                for j in (i + 1)..n {
                    let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    mat[(i, j)] = z;
                    mat[(j, i)] = z.conj();
                }
            }
            let a = HermitianOperator::new(shape.clone(), mat).unwrap();
            for cut in enumerate_bipartitions(&shape).unwrap() {
                let pt = partial_transpose(&a, &cut).unwrap();
                assert!((pt.trace() - a.trace()).abs() < 1e-12);
                assert!((pt.hs_norm() - a.hs_norm()).abs() < 1e-12);
                let back = partial_transpose(&pt, &cut).unwrap();
                assert_eq!(back.matrix(), a.matrix(), "trial {trial} cut {}", cut.label());
            }
        }
    }

    #[test]
    fn realign_product_pure_is_rank_one() {
        let shape = SubsystemShape::uniform(2, 2).unwrap();
        let cut = enumerate_bipartitions(&shape).unwrap().remove(0);
        let psi = zoo::random_product_state(&shape, &cut, 9).unwrap();
        let p = HermitianOperator::projector(shape.clone(), &psi).unwrap();
        let sv = operator_schmidt_coefficients(&p, &cut).unwrap();
        assert!((sv[0] - 1.0).abs() < 1e-10, "{sv:?}");
        assert!(sv[1..].iter().all(|&s| s < 1e-10), "{sv:?}");
    }

    #[test]
    fn realign_bell_sum_two() {
        let p = bell_projector();
        let cut = enumerate_bipartitions(p.shape()).unwrap().remove(0);
        let sv = operator_schmidt_coefficients(&p, &cut).unwrap();
        let sum: f64 = sv.iter().sum();
        assert!((sum - 2.0).abs() < 1e-10, "{sv:?}");
    }

    #[test]
    fn realign_maximally_mixed_two_qubits() {
        let shape = SubsystemShape::uniform(2, 2).unwrap();
        let rho = crate::herm::DensityMatrix::maximally_mixed(shape.clone());
        let cut = enumerate_bipartitions(&shape).unwrap().remove(0);
        let sv = operator_schmidt_coefficients(rho.op(), &cut).unwrap();
        // 1/4 realigns to a rank-one matrix of norm 1/2
        assert!((sv[0] - 0.5).abs() < 1e-12, "{sv:?}");
        assert!(sv[1..].iter().all(|&s| s < 1e-12));
    }

    #[test]
    fn realign_preserves_hs_norm_and_block_swap_invariance() {
        let shape = SubsystemShape::new(vec![2, 2, 3]).unwrap();
        let n = shape.total();
        let mut rng = zoo::substream(6, 1);
        for _ in 0..25 {
            let mut mat = nalgebra::DMatrix::<Complex64>::zeros(n, n);
            for i in 0..n {
                mat[(i, i)] = c(rng.gen_range(-1.0..1.0), 0.0);
                for j in (i + 1)..n {
                    let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    mat[(i, j)] = z;
                    mat[(j, i)] = z.conj();
                }
            }
            let a = HermitianOperator::new(shape.clone(), mat).unwrap();
            for cut in enumerate_bipartitions(&shape).unwrap() {
                let r = realign(&a, &cut).unwrap();
                let fro = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                assert!((fro - a.hs_norm()).abs() < 1e-10);
                // swapping the two blocks permutes rows/columns of R; the
                // singular values are unchanged
                let sv = operator_schmidt_coefficients(&a, &cut).unwrap();
                let comp = Bipartition::new(shape.clone(), cut.complement()).unwrap();
                let sv2 = operator_schmidt_coefficients(&a, &comp).unwrap();
                // canonicalization maps the complement back to the same cut;
                // build the swapped view directly instead
                assert_eq!(comp, cut);
                let rt = r.transpose();
                let svd = nalgebra::SVD::new(rt, false, false);
                let mut sv3: Vec<f64> = svd.singular_values.iter().copied().collect();
                sv3.sort_by(|x, y| y.partial_cmp(x).unwrap());
                for ((x, y), z) in sv.iter().zip(sv2.iter()).zip(sv3.iter()) {
                    assert!((x - y).abs() < 1e-10);
                    assert!((x - z).abs() < 1e-10);
                }
            }
        }
    }
}
