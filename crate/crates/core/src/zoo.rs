//! Generators for the concrete states and random models used throughout.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::herm::{DensityMatrix, HermitianOperator};
use crate::shape::{Bipartition, SubsystemShape};

/// Counter-based substream: stream `idx` of the generator seeded by
/// `seed`. Distinct indices give statistically independent streams and the
/// output is reproducible across platforms.
pub fn substream(seed: u64, idx: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(idx);
    rng
}

/// GHZ-type unit vector (|0..0> + |1..1> + ... + |(d-1)..(d-1)>) / sqrt(d)
/// on k parties of local dimension d.
pub fn ghz(k: usize, d: usize) -> Result<Vec<Complex64>> {
    if k < 2 || d < 2 {
        return Err(Error::InvalidShape(format!("ghz needs k >= 2 and d >= 2, got k={k}, d={d}")));
    }
    let n = d.pow(k as u32);
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    // |j...j> has index j * (d^k - 1) / (d - 1)
    let step = (n - 1) / (d - 1);
    let amp = 1.0 / (d as f64).sqrt();
    for j in 0..d {
        v[j * step] = Complex64::new(amp, 0.0);
    }
    Ok(v)
}

/// Parameters of the three-qutrit bound-entangled family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QutritFamilyParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub p: f64,
}

impl QutritFamilyParams {
    pub fn new(a: f64, b: f64, c: f64, p: f64) -> Result<Self> {
        if a <= 0.0 || b <= 0.0 || c <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "family weights must be positive, got a={a}, b={b}, c={c}"
            )));
        }
        if p < 0.0 {
            return Err(Error::InvalidConfig(format!("p must be nonnegative, got {p}")));
        }
        Ok(Self { a, b, c, p })
    }
}

fn ket27(digits: [usize; 3]) -> usize {
    digits[0] * 9 + digits[1] * 3 + digits[2]
}

/// The ten unnormalized vectors of the three-qutrit family, in order.
fn family_vectors(params: &QutritFamilyParams) -> Vec<Vec<Complex64>> {
    let pair = |w: f64, hi: [usize; 3], lo: [usize; 3]| {
        let mut v = vec![Complex64::new(0.0, 0.0); 27];
        v[ket27(hi)] = Complex64::new(w.sqrt(), 0.0);
        v[ket27(lo)] = Complex64::new((1.0 / w).sqrt(), 0.0);
        v
    };
    let (a, b, c) = (params.a, params.b, params.c);
    let mut out = vec![
        pair(a, [0, 0, 1], [1, 1, 0]),
        pair(a, [0, 1, 0], [1, 0, 1]),
        pair(a, [1, 0, 0], [0, 1, 1]),
        pair(b, [1, 1, 2], [2, 2, 1]),
        pair(b, [1, 2, 1], [2, 1, 2]),
        pair(b, [2, 1, 1], [1, 2, 2]),
        pair(c, [2, 2, 0], [0, 0, 2]),
        pair(c, [2, 0, 2], [0, 2, 0]),
        pair(c, [0, 2, 2], [2, 0, 0]),
    ];
    let mut psi10 = vec![Complex64::new(0.0, 0.0); 27];
    for j in 0..3 {
        psi10[ket27([j, j, j])] = Complex64::new(1.0, 0.0);
    }
    out.push(psi10);
    out
}

/// The normalized three-qutrit family state: the ten projectors onto the
/// unnormalized family vectors plus p (|001><001| + 1), divided by its
/// trace 3(a + 1/a) + 3(b + 1/b) + 3(c + 1/c) + 3 + 28 p.
pub fn qutrit_family(params: &QutritFamilyParams) -> Result<DensityMatrix> {
    let shape = SubsystemShape::uniform(3, 3)?;
    let mut mat = DMatrix::<Complex64>::zeros(27, 27);
    for v in family_vectors(params) {
        for i in 0..27 {
            if v[i].norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..27 {
                mat[(i, j)] += v[i] * v[j].conj();
            }
        }
    }
    let e001 = ket27([0, 0, 1]);
    mat[(e001, e001)] += Complex64::new(params.p, 0.0);
    for i in 0..27 {
        mat[(i, i)] += Complex64::new(params.p, 0.0);
    }
    let tr: f64 = (0..27).map(|i| mat[(i, i)].re).sum();
    let mat = mat.map(|z| z / tr);
    DensityMatrix::new(HermitianOperator::new_unchecked(shape, mat))
}

/// Trace of the unnormalized family operator, in closed form.
pub fn qutrit_family_trace(params: &QutritFamilyParams) -> f64 {
    let s = |w: f64| 3.0 * (w + 1.0 / w);
    s(params.a) + s(params.b) + s(params.c) + 3.0 + 28.0 * params.p
}

/// GUE sample: real N(0,1) diagonal, off-diagonal complex with independent
/// N(0, 1/2) real and imaginary parts, so E Tr G^2 = n^2 and the largest
/// eigenvalue concentrates near 2 sqrt(n).
pub fn gue(n: usize, seed: u64) -> HermitianOperator {
    gue_with_rng(n, &mut substream(seed, 0))
}

pub fn gue_with_rng(n: usize, rng: &mut ChaCha8Rng) -> HermitianOperator {
    let shape = SubsystemShape::new(vec![n.max(2)]).unwrap();
    let shape = if n >= 2 { shape } else { SubsystemShape::new(vec![2]).unwrap() };
    let normal = Normal::new(0.0, 1.0).unwrap();
    let half = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).unwrap();
    let mut mat = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        mat[(i, i)] = Complex64::new(normal.sample(rng), 0.0);
        for j in (i + 1)..n {
            let z = Complex64::new(half.sample(rng), half.sample(rng));
            mat[(i, j)] = z;
            mat[(j, i)] = z.conj();
        }
    }
    if n >= 2 {
        HermitianOperator::new_unchecked(shape, mat)
    } else {
        // n = 1 is used by the scalar Monte-Carlo checks only
        HermitianOperator::new_unchecked(SubsystemShape::new(vec![2]).unwrap(), {
            let mut m = DMatrix::<Complex64>::zeros(1, 1);
            m[(0, 0)] = mat[(0, 0)];
            m
        })
    }
}

/// GUE sample with shape metadata attached (dims must multiply to n).
pub fn gue_on_shape(shape: &SubsystemShape, rng: &mut ChaCha8Rng) -> HermitianOperator {
    let n = shape.total();
    let g = gue_with_rng(n, rng);
    HermitianOperator::new_unchecked(shape.clone(), g.into_matrix())
}

/// Traceless GUE sample: the GUE sample minus (Tr/n) times the identity.
pub fn traceless_gue(n: usize, seed: u64) -> HermitianOperator {
    traceless_gue_with_rng(n, &mut substream(seed, 0))
}

pub fn traceless_gue_with_rng(n: usize, rng: &mut ChaCha8Rng) -> HermitianOperator {
    let g = gue_with_rng(n, rng);
    remove_trace(g)
}

pub fn traceless_gue_on_shape(shape: &SubsystemShape, rng: &mut ChaCha8Rng) -> HermitianOperator {
    let g = gue_on_shape(shape, rng);
    remove_trace(g)
}

fn remove_trace(g: HermitianOperator) -> HermitianOperator {
    let n = g.matrix().nrows();
    let shift = g.trace() / n as f64;
    let shape = g.shape().clone();
    let mut mat = g.into_matrix();
    for i in 0..n {
        mat[(i, i)] -= Complex64::new(shift, 0.0);
    }
    HermitianOperator::new_unchecked(shape, mat)
}

/// Parameters of the maximally-mixed-plus-Gaussian-noise model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GueModelParams {
    pub d: usize,
    pub k: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl GueModelParams {
    pub fn new(d: usize, k: usize, alpha: f64, seed: u64) -> Result<Self> {
        if d < 2 || k < 2 {
            return Err(Error::InvalidConfig(format!("need d >= 2 and k >= 2, got d={d}, k={k}")));
        }
        if !(alpha > 0.0 && alpha < 0.25) {
            return Err(Error::InvalidConfig(format!("alpha must lie in (0, 1/4), got {alpha}")));
        }
        Ok(Self { d, k, alpha, seed })
    }

    pub fn shape(&self) -> SubsystemShape {
        SubsystemShape::uniform(self.d, self.k).unwrap()
    }
}

/// One draw of the noise model together with its underlying direction.
#[derive(Debug, Clone)]
pub struct RhoGSample {
    /// (1/n) (1 + alpha n^{-1/2} G); unit trace, not guaranteed PSD.
    pub state: HermitianOperator,
    /// The traceless GUE direction G.
    pub noise: HermitianOperator,
}

/// Sample the state (1/d^k)(1 + alpha d^{-k/2} G) with G traceless GUE.
pub fn rho_g(params: &GueModelParams) -> RhoGSample {
    rho_g_with_rng(params, &mut substream(params.seed, 0))
}

pub fn rho_g_with_rng(params: &GueModelParams, rng: &mut ChaCha8Rng) -> RhoGSample {
    let shape = params.shape();
    let g = traceless_gue_on_shape(&shape, rng);
    let state = rho_from_direction(params, &g);
    RhoGSample { state, noise: g }
}

/// Deterministic part of the model: mix the identity with a given traceless
/// direction.
pub fn rho_from_direction(params: &GueModelParams, g: &HermitianOperator) -> HermitianOperator {
    let n = g.matrix().nrows() as f64;
    let coeff = params.alpha / n.sqrt();
    let mut mat = g.matrix().map(|z| z * (coeff / n));
    for i in 0..g.matrix().nrows() {
        mat[(i, i)] += Complex64::new(1.0 / n, 0.0);
    }
    HermitianOperator::new_unchecked(g.shape().clone(), mat)
}

/// Haar-random unit vector on each side of the cut, tensored into the
/// global index order; biseparable across the cut by construction.
pub fn random_product_state(
    shape: &SubsystemShape,
    cut: &Bipartition,
    seed: u64,
) -> Result<Vec<Complex64>> {
    if cut.shape() != shape {
        return Err(Error::DimensionMismatch("cut does not match shape".into()));
    }
    let mut rng = substream(seed, 0);
    Ok(random_product_state_with_rng(cut, &mut rng))
}

pub fn random_product_state_with_rng(cut: &Bipartition, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let vb = haar_unit_vector(cut.block_dim(), rng);
    let vc = haar_unit_vector(cut.complement_dim(), rng);
    let n = cut.shape().total();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (ib, zb) in vb.iter().enumerate() {
        for (ic, zc) in vc.iter().enumerate() {
            out[cut.join_index(ib, ic)] = zb * zc;
        }
    }
    out
}

pub fn haar_unit_vector(d: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let normal = Normal::new(0.0, 1.0).unwrap();
    loop {
        let v: Vec<Complex64> = (0..d)
            .map(|_| Complex64::new(normal.sample(rng), normal.sample(rng)))
            .collect();
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Random biseparable state: a convex mixture of pure product states across
/// randomly chosen cuts. Used as a fixture for detector soundness tests.
pub fn random_biseparable(shape: &SubsystemShape, terms: usize, seed: u64) -> Result<DensityMatrix> {
    let cuts = crate::shape::enumerate_bipartitions(shape)?;
    let mut rng = substream(seed, 1);
    let n = shape.total();
    let mut mat = DMatrix::<Complex64>::zeros(n, n);
    let mut weights: Vec<f64> = (0..terms).map(|_| rng.gen_range(0.01..1.0)).collect();
    let wsum: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= wsum;
    }
    for &w in &weights {
        let cut = &cuts[rng.gen_range(0..cuts.len())];
        let psi = random_product_state_with_rng(cut, &mut rng);
        for i in 0..n {
            for j in 0..n {
                mat[(i, j)] += psi[i] * psi[j].conj() * w;
            }
        }
    }
    DensityMatrix::new(HermitianOperator::new_unchecked(shape.clone(), mat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{apply_on_subsystem, PositiveMapSpec};
    use crate::reshape::{operator_schmidt_coefficients, partial_transpose};
    use crate::shape::enumerate_bipartitions;

    #[test]
    fn ghz_cases() {
        let v = ghz(3, 2).unwrap();
        let amp = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v[0].re - amp).abs() < 1e-15);
        assert!((v[7].re - amp).abs() < 1e-15);
        assert_eq!(v.iter().filter(|z| z.norm() > 0.0).count(), 2);

        let v3 = ghz(3, 3).unwrap();
        let amp3 = 1.0 / 3f64.sqrt();
        for idx in [0usize, 13, 26] {
            assert!((v3[idx].re - amp3).abs() < 1e-15);
        }
        let norm: f64 = v3.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-14);

        let bell = ghz(2, 2).unwrap();
        assert!((bell[0].re - amp).abs() < 1e-15);
        assert!((bell[3].re - amp).abs() < 1e-15);
    }

    #[test]
    fn qutrit_family_trace_formula() {
        let p = QutritFamilyParams::new(1.0, 1.0, 1.0, 0.0).unwrap();
        assert!((qutrit_family_trace(&p) - 21.0).abs() < 1e-12);
        // numerics agree with the closed form
        let p2 = QutritFamilyParams::new(1e-6, 300.0, 0.012, 0.37).unwrap();
        let rho = qutrit_family(&p2).unwrap();
        assert!((rho.op().trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn qutrit_family_is_ppt_at_paper_point() {
        let params = QutritFamilyParams::new(1e-6, 300.0, 0.012, 0.0).unwrap();
        let rho = qutrit_family(&params).unwrap();
        for cut in enumerate_bipartitions(rho.op().shape()).unwrap() {
            let pt = partial_transpose(rho.op(), &cut).unwrap();
            assert!(pt.min_eigenvalue() >= -1e-9, "cut {}", cut.label());
        }
    }

    #[test]
    fn qutrit_family_cyclic_symmetry_only_when_weights_equal() {
        // the cyclic local relabeling |j> -> |j+1 mod 3> on every party
        // permutes the three vector families; it fixes the state exactly
        // when a = b = c (and p = 0)
        let relabel = |rho: &DensityMatrix| {
            let shape = rho.op().shape().clone();
            let mut mat = DMatrix::<Complex64>::zeros(27, 27);
            let shift = |d: &[usize]| [(d[0] + 1) % 3, (d[1] + 1) % 3, (d[2] + 1) % 3];
            for r in 0..27 {
                let r2 = shape.index_of(&shift(&shape.digits(r)));
                for c in 0..27 {
                    let c2 = shape.index_of(&shift(&shape.digits(c)));
                    mat[(r2, c2)] = rho.op().matrix()[(r, c)];
                }
            }
            mat
        };
        let sym = qutrit_family(&QutritFamilyParams::new(1.0, 1.0, 1.0, 0.0).unwrap()).unwrap();
        let rot = relabel(&sym);
        let dev = (sym.op().matrix() - &rot).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(dev < 1e-14, "equal weights should be invariant, dev {dev:e}");

        let asym = qutrit_family(&QutritFamilyParams::new(2.0, 1.0, 1.0, 0.0).unwrap()).unwrap();
        let rot = relabel(&asym);
        let dev = (asym.op().matrix() - &rot).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(dev > 1e-3, "unequal weights should break the symmetry");
    }

    #[test]
    fn gue_second_moment() {
        let n = 16;
        let trials = 500;
        let mut acc = 0.0;
        for t in 0..trials {
            let g = gue_with_rng(n, &mut substream(99, t));
            acc += g.hs_norm().powi(2);
        }
        let mean = acc / trials as f64;
        let want = (n * n) as f64;
        assert!((mean - want).abs() < 0.05 * want, "E Tr G^2 = {mean}, want ~{want}");
    }

    #[test]
    fn gue_largest_eigenvalue_scale() {
        let n = 64;
        let trials = 500;
        let mut acc = 0.0;
        for t in 0..trials {
            let g = gue_with_rng(n, &mut substream(100, t));
            acc += g.max_eigenvalue();
        }
        let mean = acc / trials as f64;
        let want = 2.0 * (n as f64).sqrt();
        assert!(
            (mean - want).abs() < 0.10 * want,
            "E lambda_max = {mean}, want within 10% of {want}"
        );
    }

    #[test]
    fn traceless_gue_properties() {
        let g = traceless_gue(9, 5);
        assert!(g.trace().abs() < 1e-12);
        let again = remove_trace(g.clone());
        let dev = (g.matrix() - again.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(dev < 1e-14);

        let trials = 1000;
        let mut acc = 0.0;
        for t in 0..trials {
            let g = traceless_gue_with_rng(9, &mut substream(101, t));
            acc += g.hs_norm().powi(2);
        }
        let mean = acc / trials as f64;
        assert!((mean - 80.0).abs() < 0.05 * 80.0, "E Tr G^2 = {mean}, want ~80");
    }

    #[test]
    fn rho_g_trace_and_zero_noise() {
        let params = GueModelParams::new(3, 2, 0.2, 7).unwrap();
        let sample = rho_g(&params);
        assert!((sample.state.trace() - 1.0).abs() < 1e-12);

        let zero = HermitianOperator::zeros(params.shape());
        let mixed = rho_from_direction(&params, &zero);
        let id = DensityMatrix::maximally_mixed(params.shape());
        let dev = (mixed.matrix() - id.op().matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(dev < 1e-15);
    }

    #[test]
    fn rho_g_epsilon_interpolation_is_alpha_rescaling() {
        let params = GueModelParams::new(3, 2, 0.2, 8).unwrap();
        let sample = rho_g(&params);
        let eps = 0.35;
        let scaled = GueModelParams::new(3, 2, eps * 0.2, 8).unwrap();
        let direct = rho_from_direction(&scaled, &sample.noise);
        let id = DensityMatrix::maximally_mixed(params.shape());
        let interp = sample
            .state
            .scale(eps)
            .add(&id.op().scale(1.0 - eps))
            .unwrap();
        let dev = (direct.matrix() - interp.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(dev < 1e-14);
    }

    #[test]
    fn rho_g_mostly_fully_ppt_at_small_alpha() {
        let params = GueModelParams::new(3, 2, 0.2, 9).unwrap();
        let cuts = enumerate_bipartitions(&params.shape()).unwrap();
        let mut good = 0;
        let trials = 200;
        for t in 0..trials {
            let s = rho_g_with_rng(&params, &mut substream(9, t));
            let mut ok = s.state.min_eigenvalue() >= -1e-12;
            for cut in &cuts {
                if !ok {
                    break;
                }
                ok &= partial_transpose(&s.state, cut).unwrap().min_eigenvalue() >= -1e-12;
            }
            if ok {
                good += 1;
            }
        }
        assert!(good as f64 / trials as f64 >= 0.99, "fraction {good}/{trials}");
    }

    #[test]
    fn product_state_fixture_properties() {
        let shape = SubsystemShape::uniform(2, 3).unwrap();
        let cut = enumerate_bipartitions(&shape).unwrap().remove(1);
        let psi = random_product_state(&shape, &cut, 42).unwrap();
        let psi2 = random_product_state(&shape, &cut, 42).unwrap();
        assert_eq!(psi, psi2, "same seed must reproduce the same bytes");
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);

        let proj = HermitianOperator::projector(shape.clone(), &psi).unwrap();
        let sv = operator_schmidt_coefficients(&proj, &cut).unwrap();
        let sum: f64 = sv.iter().sum();
        assert!((sum - 1.0).abs() < 1e-10, "ccnr sum across construction cut {sum}");
        let pt = partial_transpose(&proj, &cut).unwrap();
        assert!(pt.min_eigenvalue() >= -1e-10);
    }

    #[test]
    fn qutrit_family_choi_positive_at_shifted_p() {
        // the family stays positive under the classical Choi map and its
        // dual once p exceeds ~3.3e-4
        let params = QutritFamilyParams::new(1e-6, 300.0, 0.012, 5e-4).unwrap();
        let rho = qutrit_family(&params).unwrap();
        let shape = rho.op().shape().clone();
        for spec in [PositiveMapSpec::choi(), PositiveMapSpec::choi().dual()] {
            for cut in enumerate_bipartitions(&shape).unwrap() {
                let mapped = apply_on_subsystem(&spec, &cut, rho.op()).unwrap();
                assert!(
                    mapped.min_eigenvalue() >= -1e-9,
                    "cut {} spec {spec}",
                    cut.label()
                );
            }
        }
    }
}
