//! Dynamical maps as time-indexed Kraus sets: the generalized amplitude
//! damping channel with a decoherence cutoff, CPTP validation, channel
//! application to the system factor of a system+ancilla state, and
//! Stinespring purification into a fixed four-dimensional environment.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{QError, Result};
use crate::qlinalg::{tensor, tensor_vec, ComplexSquareMatrix, DensityMatrix, PureStateVector};

pub const COMPLETENESS_TOL: f64 = 1e-10;
/// One environment basis vector per Kraus operator, zero-padded.
pub const ENV_DIM: usize = 4;

/// A channel snapshot: 2x2 Kraus operators with ΣK†K = I.
#[derive(Debug, Clone)]
pub struct KrausSet {
    operators: Vec<ComplexSquareMatrix>,
}

impl KrausSet {
    pub fn new(operators: Vec<ComplexSquareMatrix>) -> Result<Self> {
        let ks = Self { operators };
        let dev = ks.completeness_defect();
        if dev > COMPLETENESS_TOL {
            return Err(QError::NotComplete(dev));
        }
        Ok(ks)
    }

    pub fn identity() -> Self {
        Self {
            operators: vec![ComplexSquareMatrix::identity(2)],
        }
    }

    pub fn operators(&self) -> &[ComplexSquareMatrix] {
        &self.operators
    }

    pub fn sys_dim(&self) -> usize {
        2
    }

    /// Max-norm deviation of ΣK†K from the identity.
    pub fn completeness_defect(&self) -> f64 {
        let mut acc = ComplexSquareMatrix::zeros(2);
        for k in &self.operators {
            acc = acc.add(&k.adjoint().matmul(k));
        }
        acc.max_abs_diff(&ComplexSquareMatrix::identity(2))
    }
}

/// Parameters of the generalized amplitude damping channel with cutoff:
/// mixing s(t') = cos²(ω t') and decay r(t') = exp(-t'), frozen at t_c.
#[derive(Debug, Clone, Copy)]
pub struct GadParams {
    pub omega: f64,
    pub t_c: f64,
}

impl GadParams {
    pub fn new(omega: f64, t_c: f64) -> Result<Self> {
        if !(omega.is_finite() && t_c >= 0.0) {
            return Err(QError::Inconsistent(format!(
                "invalid GAD parameters omega={omega}, t_c={t_c}"
            )));
        }
        Ok(Self { omega, t_c })
    }
}

/// The time after which decoherence is frozen: t - H(t - t_c)(t - t_c),
/// which reduces to min(t, t_c).
pub fn effective_time(t: f64, t_c: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(QError::NegativeTime(t));
    }
    Ok(t.min(t_c))
}

/// Kraus snapshot of the generalized amplitude damping channel at time t.
pub fn gad_kraus(t: f64, p: &GadParams) -> Result<KrausSet> {
    let tp = effective_time(t, p.t_c)?;
    let s = (p.omega * tp).cos().powi(2);
    let r = (-tp).exp();
    let (ss, cs) = (s.sqrt(), (1.0 - s).sqrt());
    let (sr, dr) = (r.sqrt(), (1.0 - r).sqrt());
    let re = |x: f64| Complex64::new(x, 0.0);
    let k1 = ComplexSquareMatrix::new(2, vec![re(ss), re(0.0), re(0.0), re(ss * sr)])?;
    let k2 = ComplexSquareMatrix::new(2, vec![re(0.0), re(ss * dr), re(0.0), re(0.0)])?;
    let k3 = ComplexSquareMatrix::new(2, vec![re(cs * sr), re(0.0), re(0.0), re(cs)])?;
    let k4 = ComplexSquareMatrix::new(2, vec![re(0.0), re(0.0), re(cs * dr), re(0.0)])?;
    KrausSet::new(vec![k1, k2, k3, k4])
}

/// Applies the channel to the system factor: Σ (K⊗I) ρ (K⊗I)†.
pub fn apply_to_system(ks: &KrausSet, rho_sa: &DensityMatrix) -> Result<DensityMatrix> {
    if rho_sa.subsystem_dims() != [2, 2] {
        return Err(QError::DimensionMismatch {
            expected: 4,
            got: rho_sa.dim(),
        });
    }
    let i2 = ComplexSquareMatrix::identity(2);
    let mut out = ComplexSquareMatrix::zeros(4);
    for k in ks.operators() {
        let kk = tensor(k, &i2)?;
        out = out.add(&kk.matmul(rho_sa.mat()).matmul(&kk.adjoint()));
    }
    Ok(DensityMatrix::new_unchecked(out, vec![2, 2]))
}

/// Reports the completeness defect; callers treat > 1e-10 as failure.
pub fn validate_cptp(ks: &KrausSet) -> f64 {
    ks.completeness_defect()
}

/// Stinespring dilation: |Ψ_SAE> = Σ_i (K_i⊗I)|ψ_SA> ⊗ |i>_E on a 16-dim
/// space with factor order (S, A, E). Tracing out E recovers the channel
/// output.
pub fn purify(ks: &KrausSet, psi_sa: &PureStateVector) -> Result<PureStateVector> {
    if psi_sa.subsystem_dims() != [2, 2] {
        return Err(QError::DimensionMismatch {
            expected: 4,
            got: psi_sa.dim(),
        });
    }
    if ks.operators().len() > ENV_DIM {
        return Err(QError::UnsupportedDilation(ks.operators().len()));
    }
    let i2 = ComplexSquareMatrix::identity(2);
    let mut amps = vec![Complex64::new(0.0, 0.0); 4 * ENV_DIM];
    for (i, k) in ks.operators().iter().enumerate() {
        let branch = tensor(k, &i2)?.apply(psi_sa.amplitudes());
        let mut env = vec![Complex64::new(0.0, 0.0); ENV_DIM];
        env[i] = Complex64::new(1.0, 0.0);
        for (idx, z) in tensor_vec(&branch, &env).into_iter().enumerate() {
            amps[idx] += z;
        }
    }
    // The dilation is an isometry, so the norm is already 1 up to rounding.
    PureStateVector::normalized(amps, vec![2, 2, ENV_DIM])
}

/// A time-indexed family of channel snapshots Λ(t, 0).
pub trait DynamicalMap: Sync {
    fn at(&self, t: f64) -> Result<KrausSet>;
}

/// The generalized amplitude damping family.
#[derive(Debug, Clone, Copy)]
pub struct GadChannel {
    pub params: GadParams,
}

impl GadChannel {
    pub fn new(params: GadParams) -> Self {
        Self { params }
    }
}

impl DynamicalMap for GadChannel {
    fn at(&self, t: f64) -> Result<KrausSet> {
        gad_kraus(t, &self.params)
    }
}

/// The trivial channel, Λ(t) = id for all t.
#[derive(Debug, Clone, Copy)]
pub struct IdentityChannel;

impl DynamicalMap for IdentityChannel {
    fn at(&self, _t: f64) -> Result<KrausSet> {
        Ok(KrausSet::identity())
    }
}

/// A map built from explicit (time, snapshot) pairs; each query returns the
/// snapshot of the last time point not exceeding t. Used for toy revival
/// maps in tests.
pub struct PiecewiseMap {
    snapshots: Vec<(f64, KrausSet)>,
}

impl PiecewiseMap {
    pub fn new(mut snapshots: Vec<(f64, KrausSet)>) -> Self {
        snapshots.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        Self { snapshots }
    }
}

impl DynamicalMap for PiecewiseMap {
    fn at(&self, t: f64) -> Result<KrausSet> {
        let mut chosen = &self.snapshots[0].1;
        for (t0, ks) in &self.snapshots {
            if *t0 <= t {
                chosen = ks;
            }
        }
        Ok(chosen.clone())
    }
}

/// Random CPTP Kraus set drawn by Gram-Schmidt orthonormalization of a
/// random complex 8x2 block matrix; completeness holds by construction.
pub fn random_kraus_set<R: Rng>(rng: &mut R) -> KrausSet {
    loop {
        // Two random vectors in C^8, orthonormalized; their 2x2 blocks are
        // the four Kraus operators.
        let mut cols: Vec<Vec<Complex64>> = (0..2)
            .map(|_| {
                (0..8)
                    .map(|_| {
                        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                    })
                    .collect()
            })
            .collect();
        let dot = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
            a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
        };
        let norm0 = dot(&cols[0], &cols[0]).re.sqrt();
        if norm0 < 1e-6 {
            continue;
        }
        for z in &mut cols[0] {
            *z /= norm0;
        }
        let proj = dot(&cols[0], &cols[1]);
        let c0 = cols[0].clone();
        for (z, p) in cols[1].iter_mut().zip(&c0) {
            *z -= proj * p;
        }
        let norm1 = dot(&cols[1], &cols[1]).re.sqrt();
        if norm1 < 1e-6 {
            continue;
        }
        for z in &mut cols[1] {
            *z /= norm1;
        }
        let ops = (0..4)
            .map(|i| {
                ComplexSquareMatrix::new(
                    2,
                    vec![
                        cols[0][2 * i],
                        cols[1][2 * i],
                        cols[0][2 * i + 1],
                        cols[1][2 * i + 1],
                    ],
                )
                .unwrap()
            })
            .collect();
        match KrausSet::new(ops) {
            Ok(ks) => return ks,
            Err(_) => continue,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::partial_trace;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;

    fn gad() -> GadParams {
        GadParams::new(5.0, 0.25).unwrap()
    }

    #[test]
    fn effective_time_cases() {
        assert_eq!(effective_time(0.1, 0.25).unwrap(), 0.1);
        assert_eq!(effective_time(0.3, 0.25).unwrap(), 0.25);
        assert_eq!(effective_time(0.25, 0.25).unwrap(), 0.25);
        assert!(matches!(
            effective_time(-0.1, 0.25),
            Err(QError::NegativeTime(_))
        ));
    }

    #[test]
    fn gad_at_zero_is_identity_channel() {
        let ks = gad_kraus(0.0, &gad()).unwrap();
        let i2 = ComplexSquareMatrix::identity(2);
        assert!(ks.operators()[0].max_abs_diff(&i2) < 1e-15);
        for k in &ks.operators()[1..] {
            assert!(k.max_abs_diff(&ComplexSquareMatrix::zeros(2)) < 1e-15);
        }
    }

    #[test]
    fn gad_at_cutoff_matches_scalar_oracle() {
        // cos²(1.25) and exp(-0.25) evaluated independently.
        let ks = gad_kraus(0.25, &gad()).unwrap();
        let s = 0.09942819222653315_f64;
        let r = 0.7788007830714049_f64;
        assert_abs_diff_eq!(ks.operators()[0][(0, 0)].re, s.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(
            ks.operators()[0][(1, 1)].re,
            (s * r).sqrt(),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            ks.operators()[1][(0, 1)].re,
            (s * (1.0 - r)).sqrt(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn gad_is_complete_at_random_times() {
        use rand::Rng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let t: f64 = rng.gen::<f64>() * 2.0;
            let ks = gad_kraus(t, &gad()).unwrap();
            assert!(validate_cptp(&ks) <= 1e-12);
        }
    }

    #[test]
    fn gad_frozen_after_cutoff() {
        let a = gad_kraus(0.3, &gad()).unwrap();
        let b = gad_kraus(1.7, &gad()).unwrap();
        for (ka, kb) in a.operators().iter().zip(b.operators()) {
            assert_eq!(ka.entries(), kb.entries());
        }
    }

    #[test]
    fn validate_cptp_arithmetic_cases() {
        let half = ComplexSquareMatrix::identity(2).scale(Complex64::new(0.5, 0.0));
        let ks = KrausSet {
            operators: vec![half],
        };
        assert_abs_diff_eq!(validate_cptp(&ks), 0.75, epsilon = 1e-15);

        let sx = ComplexSquareMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let ks = KrausSet::new(vec![
            ComplexSquareMatrix::identity(2).scale(Complex64::new(0.3_f64.sqrt(), 0.0)),
            sx.scale(Complex64::new(0.7_f64.sqrt(), 0.0)),
        ])
        .unwrap();
        assert!(validate_cptp(&ks) <= 1e-15);
    }

    #[test]
    fn apply_identity_returns_input() {
        let rho = PureStateVector::bell_phi_plus().density();
        let out = apply_to_system(&KrausSet::identity(), &rho).unwrap();
        assert!(out.mat().max_abs_diff(rho.mat()) < 1e-15);
    }

    #[test]
    fn damping_limit_mixes_excited_population() {
        // With r -> 0 and s fixed, |1><1| on the system goes to the mixture
        // s|0><0| + (1-s)|1><1|; 2x2 algebra done by hand.
        let s: f64 = 0.3;
        let re = |x: f64| Complex64::new(x, 0.0);
        let ks = KrausSet::new(vec![
            ComplexSquareMatrix::new(2, vec![re(s.sqrt()), re(0.0), re(0.0), re(0.0)]).unwrap(),
            ComplexSquareMatrix::new(2, vec![re(0.0), re(s.sqrt()), re(0.0), re(0.0)]).unwrap(),
            ComplexSquareMatrix::new(
                2,
                vec![re(0.0), re(0.0), re(0.0), re((1.0 - s).sqrt())],
            )
            .unwrap(),
            ComplexSquareMatrix::new(
                2,
                vec![re(0.0), re(0.0), re((1.0 - s).sqrt()), re(0.0)],
            )
            .unwrap(),
        ])
        .unwrap();
        let mut amps = vec![Complex64::new(0.0, 0.0); 4];
        amps[2] = Complex64::new(1.0, 0.0); // |1>_S |0>_A
        let rho = PureStateVector::new(amps, vec![2, 2]).unwrap().density();
        let out = apply_to_system(&ks, &rho).unwrap();
        assert_abs_diff_eq!(out.mat()[(0, 0)].re, s, epsilon = 1e-14);
        assert_abs_diff_eq!(out.mat()[(2, 2)].re, 1.0 - s, epsilon = 1e-14);
    }

    #[test]
    fn ancilla_marginal_is_invariant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let psi = crate::qlinalg::haar_sample(4, &mut rng);
            let rho = psi.density();
            let ks = random_kraus_set(&mut rng);
            let out = apply_to_system(&ks, &rho).unwrap();
            let before = partial_trace(&rho, &[1]).unwrap();
            let after = partial_trace(&out, &[1]).unwrap();
            assert!(before.mat().max_abs_diff(after.mat()) < 1e-12);
        }
    }

    #[test]
    fn purify_identity_is_product_with_env_ground() {
        let psi = PureStateVector::bell_phi_plus();
        let out = purify(&KrausSet::identity(), &psi).unwrap();
        for (idx, amp) in out.amplitudes().iter().enumerate() {
            let (sa, e) = (idx / ENV_DIM, idx % ENV_DIM);
            if e == 0 {
                assert_abs_diff_eq!(amp.re, psi.amplitudes()[sa].re, epsilon = 1e-15);
            } else {
                assert_eq!(amp.norm(), 0.0);
            }
        }
    }

    #[test]
    fn purification_traces_back_to_channel_output() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        use rand::Rng;
        for _ in 0..100 {
            let psi = crate::qlinalg::haar_sample(4, &mut rng);
            let t: f64 = rng.gen::<f64>();
            let ks = gad_kraus(t, &gad()).unwrap();
            let sae = purify(&ks, &psi).unwrap();
            let reduced = partial_trace(&sae.density(), &[0, 1]).unwrap();
            let direct = apply_to_system(&ks, &psi.density()).unwrap();
            assert!(reduced.mat().max_abs_diff(direct.mat()) < 1e-12);
        }
    }

    #[test]
    fn environment_entropy_equals_system_ancilla_entropy() {
        use crate::qlinalg::von_neumann_entropy;
        let ks = gad_kraus(0.2, &gad()).unwrap();
        let sae = purify(&ks, &PureStateVector::bell_phi_plus()).unwrap();
        let rho = sae.density();
        let s_e = von_neumann_entropy(&partial_trace(&rho, &[2]).unwrap()).unwrap();
        let s_sa = von_neumann_entropy(&partial_trace(&rho, &[0, 1]).unwrap()).unwrap();
        assert_abs_diff_eq!(s_e, s_sa, epsilon = 1e-10);
    }
}
