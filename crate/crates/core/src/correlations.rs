//! Correlation functionals on the system+ancilla pair: concurrence,
//! entanglement of formation, quantum mutual information, and the split of
//! ancilla-environment information into accessible and inaccessible parts,
//! plus a brute-force measurement oracle used for validation.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{QError, Result};
use crate::qlinalg::{
    binary_entropy, eigvals_hermitian, partial_trace, sqrt_psd, tensor, von_neumann_entropy,
    ComplexSquareMatrix, DensityMatrix, PureStateVector,
};

pub const CLIP_TOL: f64 = 1e-10;

/// Total, accessible, and inaccessible ancilla-environment information at
/// one instant, in bits. I = J + δ.
#[derive(Debug, Clone, Copy)]
pub struct InfoBreakdown {
    pub i_ae: f64,
    pub j_ae: f64,
    pub delta_ae: f64,
}

impl InfoBreakdown {
    fn new(i_ae: f64, j_ae: f64, delta_ae: f64) -> Result<Self> {
        let b = Self {
            i_ae,
            j_ae,
            delta_ae,
        };
        if (b.i_ae - b.j_ae - b.delta_ae).abs() > CLIP_TOL
            || b.i_ae < -CLIP_TOL
            || b.j_ae < -CLIP_TOL
            || b.delta_ae < -CLIP_TOL
        {
            return Err(QError::Inconsistent(format!(
                "information breakdown violates I = J + δ ≥ 0: {b:?}"
            )));
        }
        Ok(b)
    }
}

/// One outcome of a complete measurement on the environment.
#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    pub probability: f64,
    pub conditional_state: DensityMatrix,
}

fn check_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.subsystem_dims() != [2, 2] {
        return Err(QError::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    Ok(())
}

fn spin_flip_kernel() -> ComplexSquareMatrix {
    let sy = ComplexSquareMatrix::new(
        2,
        vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
        ],
    )
    .unwrap();
    tensor(&sy, &sy).unwrap()
}

/// Wootters concurrence of a two-qubit state, C = max(0, λ1-λ2-λ3-λ4)
/// where the λ are the square roots of the eigenvalues of ρ ρ̃ with
/// ρ̃ = (σy⊗σy) ρ* (σy⊗σy).
///
/// Evaluated through the Hermitian form √ρ ρ̃ √ρ, which is similar to ρ ρ̃
/// and keeps everything inside a Hermitian eigensolver.
pub fn concurrence(rho_sa: &DensityMatrix) -> Result<f64> {
    check_two_qubit(rho_sa)?;
    let yy = spin_flip_kernel();
    let rho_tilde = yy.matmul(&rho_sa.mat().conjugate()).matmul(&yy);
    let root = sqrt_psd(rho_sa.mat())?;
    let h = root.matmul(&rho_tilde).matmul(&root);
    let eigs = eigvals_hermitian(&h)?;
    // Rank-deficient states leave eigenvalues at the noise floor; the square
    // root would amplify that noise to ~1e-8, so clip relative to the scale.
    let clip = 1e-13 * eigs.iter().cloned().fold(1e-300, f64::max).max(1e-300);
    let mut lambdas: Vec<f64> = eigs
        .into_iter()
        .map(|x| if x < clip { 0.0 } else { x.sqrt() })
        .collect();
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0).min(1.0))
}

/// Pure-state shortcut C = 2|ad - bc|; valid only for state vectors.
pub fn concurrence_pure(psi: &PureStateVector) -> Result<f64> {
    if psi.subsystem_dims() != [2, 2] {
        return Err(QError::DimensionMismatch {
            expected: 4,
            got: psi.dim(),
        });
    }
    let a = psi.amplitudes();
    Ok((2.0 * (a[0] * a[3] - a[1] * a[2]).norm()).min(1.0))
}

/// Entanglement of formation in bits, h((1 + √(1-C²))/2) with h the binary
/// entropy; a strictly increasing function of the concurrence.
pub fn eof(rho_sa: &DensityMatrix) -> Result<f64> {
    Ok(eof_of_concurrence(concurrence(rho_sa)?))
}

pub fn eof_of_concurrence(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    binary_entropy(0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt()))
}

/// Quantum mutual information I = S(ρ_S) + S(ρ_A) - S(ρ_SA) in bits.
pub fn mutual_information_sa(rho_sa: &DensityMatrix) -> Result<f64> {
    check_two_qubit(rho_sa)?;
    let s_s = von_neumann_entropy(&partial_trace(rho_sa, &[0])?)?;
    let s_a = von_neumann_entropy(&partial_trace(rho_sa, &[1])?)?;
    let s_sa = von_neumann_entropy(rho_sa)?;
    Ok((s_s + s_a - s_sa).max(0.0))
}

/// Ancilla-environment information split for the evolved state of an
/// initially pure ρ_SA whose dilation keeps the tripartite SAE state pure.
///
/// Purity of SAE gives S(ρ_E) = S(ρ_SA) and S(ρ_AE) = S(ρ_S), so
/// I_AE = S(ρ_A) + S(ρ_SA) - S(ρ_S). The accessible part follows from the
/// Koashi-Winter relation, J_AE = S(ρ_A) - EoF(ρ_SA), and the inaccessible
/// part (the quantum discord) is the difference.
pub fn info_breakdown_ae(rho_sa_t: &DensityMatrix) -> Result<InfoBreakdown> {
    check_two_qubit(rho_sa_t)?;
    let s_s = von_neumann_entropy(&partial_trace(rho_sa_t, &[0])?)?;
    let s_a = von_neumann_entropy(&partial_trace(rho_sa_t, &[1])?)?;
    let s_sa = von_neumann_entropy(rho_sa_t)?;
    let e = eof(rho_sa_t)?;
    if s_a - e < -1e-8 {
        return Err(QError::Inconsistent(format!(
            "S(ρ_A) - EoF = {:.3e} < 0; pure-SAE assumption violated",
            s_a - e
        )));
    }
    let clip = |x: f64| if x < 0.0 { 0.0 } else { x };
    let i_ae = clip(s_a + s_sa - s_s);
    let j_ae = clip(s_a - e);
    let delta_ae = clip(i_ae - j_ae);
    InfoBreakdown::new(i_ae, j_ae, delta_ae)
}

fn entropy_2x2(m: &ComplexSquareMatrix, trace: f64) -> f64 {
    // Closed-form eigenvalues of a Hermitian 2x2: mean ± radius.
    let mean = 0.5 * (m[(0, 0)].re + m[(1, 1)].re);
    let radius = (0.25 * (m[(0, 0)].re - m[(1, 1)].re).powi(2) + m[(0, 1)].norm_sqr()).sqrt();
    let mut s = 0.0;
    for lam in [mean + radius, mean - radius] {
        let p = lam / trace;
        if p > 1e-15 {
            s -= p * p.log2();
        }
    }
    s
}

/// Conditional post-measurement ensemble on A for one rank-1 projector |v><v|
/// on E, given ρ_AE in factor order (A, E) with E four-dimensional.
fn outcome_for_projector(rho_ae: &DensityMatrix, v: &[Complex64]) -> (f64, ComplexSquareMatrix) {
    let env = rho_ae.subsystem_dims()[1];
    let mut m = ComplexSquareMatrix::zeros(2);
    for a in 0..2 {
        for ap in 0..2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for e in 0..env {
                for ep in 0..env {
                    acc += v[e].conj() * rho_ae.mat()[(a * env + e, ap * env + ep)] * v[ep];
                }
            }
            m[(a, ap)] = acc;
        }
    }
    (m.trace().re, m)
}

/// Best value of S(ρ_A) - Σ p_i S(ρ_A^i) over random rank-1 projective
/// measurements on E: a deterministic, seed-parameterized lower bound on
/// the accessible information.
pub fn measurement_oracle(rho_ae: &DensityMatrix, n_samples: usize, seed: u64) -> Result<f64> {
    if rho_ae.subsystem_dims() != [2, 4] {
        return Err(QError::DimensionMismatch {
            expected: 8,
            got: rho_ae.dim(),
        });
    }
    if n_samples == 0 {
        return Err(QError::Inconsistent("n_samples must be ≥ 1".into()));
    }
    let s_a = von_neumann_entropy(&partial_trace(rho_ae, &[0])?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    for _ in 0..n_samples {
        let basis = random_orthonormal_basis(4, &mut rng);
        let mut conditional = 0.0;
        for v in &basis {
            let (p, m) = outcome_for_projector(rho_ae, v);
            if p > 1e-14 {
                conditional += p * entropy_2x2(&m, p);
            }
        }
        best = best.max(s_a - conditional);
    }
    Ok(best)
}

/// Complete measurement statistics for one random basis; exposed for tests.
pub fn projective_outcomes(
    rho_ae: &DensityMatrix,
    basis: &[Vec<Complex64>],
) -> Result<Vec<MeasurementOutcome>> {
    let mut out = Vec::with_capacity(basis.len());
    for v in basis {
        let (p, m) = outcome_for_projector(rho_ae, v);
        let state = if p > 1e-14 {
            DensityMatrix::new_unchecked(m.scale(Complex64::new(1.0 / p, 0.0)), vec![2])
        } else {
            DensityMatrix::new_unchecked(
                ComplexSquareMatrix::identity(2).scale(Complex64::new(0.5, 0.0)),
                vec![2],
            )
        };
        out.push(MeasurementOutcome {
            probability: p.max(0.0),
            conditional_state: state,
        });
    }
    Ok(out)
}

/// Gram-Schmidt orthonormalization of Gaussian random vectors.
pub fn random_orthonormal_basis<R: Rng>(dim: usize, rng: &mut R) -> Vec<Vec<Complex64>> {
    use rand_distr::StandardNormal;
    loop {
        let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
        'outer: for _ in 0..dim {
            let mut v: Vec<Complex64> = (0..dim)
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            for b in &basis {
                let proj: Complex64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (z, p) in v.iter_mut().zip(b) {
                    *z -= proj * p;
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                break 'outer;
            }
            for z in &mut v {
                *z /= norm;
            }
            basis.push(v);
        }
        if basis.len() == dim {
            return basis;
        }
    }
}
