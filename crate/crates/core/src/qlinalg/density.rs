use num_complex::Complex64;

use super::matrix::{eigvals_hermitian, ComplexSquareMatrix};
use crate::error::{QError, Result};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const EIGENVALUE_CLIP: f64 = 1e-10;
pub const NORM_TOL: f64 = 1e-12;

/// Positive unit-trace Hermitian operator together with its tensor factor
/// structure. Factor order is fixed at construction and never permuted.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: ComplexSquareMatrix,
    subsystem_dims: Vec<usize>,
}

impl DensityMatrix {
    pub fn new(mat: ComplexSquareMatrix, subsystem_dims: Vec<usize>) -> Result<Self> {
        let prod: usize = subsystem_dims.iter().product();
        if prod != mat.dim() || subsystem_dims.is_empty() {
            return Err(QError::DimensionMismatch {
                expected: mat.dim(),
                got: prod,
            });
        }
        let herm = mat.hermiticity_defect();
        if herm > HERMITIAN_TOL {
            return Err(QError::NotDensityMatrix(format!(
                "Hermiticity defect {herm:.3e}"
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(QError::NotDensityMatrix(format!("trace {tr} != 1")));
        }
        let min_eig = eigvals_hermitian(&mat)?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -EIGENVALUE_CLIP {
            return Err(QError::NotDensityMatrix(format!(
                "min eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self {
            mat,
            subsystem_dims,
        })
    }

    /// Skips the invariant checks; for intermediate values already known
    /// valid (e.g. outputs of a validated CPTP application).
    pub(crate) fn new_unchecked(mat: ComplexSquareMatrix, subsystem_dims: Vec<usize>) -> Self {
        Self {
            mat,
            subsystem_dims,
        }
    }

    pub fn mat(&self) -> &ComplexSquareMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn subsystem_dims(&self) -> &[usize] {
        &self.subsystem_dims
    }

    /// Tr(ρ²), equal to 1 exactly for pure states.
    pub fn purity(&self) -> f64 {
        self.mat.matmul(&self.mat).trace().re
    }
}

/// Normalized complex state vector with tensor factor structure.
#[derive(Debug, Clone)]
pub struct PureStateVector {
    amplitudes: Vec<Complex64>,
    subsystem_dims: Vec<usize>,
}

impl PureStateVector {
    pub fn new(amplitudes: Vec<Complex64>, subsystem_dims: Vec<usize>) -> Result<Self> {
        let prod: usize = subsystem_dims.iter().product();
        if prod != amplitudes.len() {
            return Err(QError::DimensionMismatch {
                expected: amplitudes.len(),
                got: prod,
            });
        }
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(QError::NotNormalized((norm - 1.0).abs()));
        }
        Ok(Self {
            amplitudes,
            subsystem_dims,
        })
    }

    /// Normalizes the amplitudes, then constructs.
    pub fn normalized(mut amplitudes: Vec<Complex64>, subsystem_dims: Vec<usize>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(QError::NotNormalized(1.0));
        }
        for z in &mut amplitudes {
            *z /= norm;
        }
        Self::new(amplitudes, subsystem_dims)
    }

    /// The Bell state (|00> + |11>)/sqrt(2) on a (2,2) factor space.
    pub fn bell_phi_plus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            amplitudes: vec![
                Complex64::new(s, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(s, 0.0),
            ],
            subsystem_dims: vec![2, 2],
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn subsystem_dims(&self) -> &[usize] {
        &self.subsystem_dims
    }

    /// Projector |ψ><ψ| as a density matrix.
    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::new_unchecked(
            ComplexSquareMatrix::outer(&self.amplitudes),
            self.subsystem_dims.clone(),
        )
    }
}

/// Reduced density matrix over the kept factors, in the original factor
/// order. `keep` holds subsystem indices into `subsystem_dims`.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let dims = rho.subsystem_dims();
    let n_sys = dims.len();
    let mut keep_sorted: Vec<usize> = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.is_empty()
        || keep_sorted.len() == n_sys
        || keep_sorted.iter().any(|&k| k >= n_sys)
    {
        return Err(QError::InvalidSubset);
    }
    let traced: Vec<usize> = (0..n_sys).filter(|k| !keep_sorted.contains(k)).collect();
    let keep_dims: Vec<usize> = keep_sorted.iter().map(|&k| dims[k]).collect();
    let out_dim: usize = keep_dims.iter().product();
    let traced_dim: usize = traced.iter().map(|&k| dims[k]).product();

    // Row-major strides of each factor in the full index.
    let mut strides = vec![1usize; n_sys];
    for k in (0..n_sys - 1).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let unpack = |mut flat: usize, subsys: &[usize]| -> usize {
        // flat runs over the product of `subsys` dims in their stored order;
        // returns the contribution to the full-space index.
        let mut full = 0;
        for &k in subsys.iter().rev() {
            full += (flat % dims[k]) * strides[k];
            flat /= dims[k];
        }
        full
    };

    let mut out = ComplexSquareMatrix::zeros(out_dim);
    for i in 0..out_dim {
        let fi = unpack(i, &keep_sorted);
        for j in 0..out_dim {
            let fj = unpack(j, &keep_sorted);
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..traced_dim {
                let ft = unpack(t, &traced);
                acc += rho.mat()[(fi + ft, fj + ft)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(DensityMatrix::new_unchecked(out, keep_dims))
}

/// Von Neumann entropy in bits, -Σ λ log2 λ with 0 log 0 := 0.
///
/// Eigenvalues in [-1e-10, 0] are clipped to zero; anything more negative
/// is a genuine positivity violation and is reported as an error.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let vals = eigvals_hermitian(rho.mat())?;
    let mut s = 0.0;
    for lam in vals {
        if lam < -EIGENVALUE_CLIP {
            return Err(QError::NotDensityMatrix(format!(
                "eigenvalue {lam:.3e} below clip threshold"
            )));
        }
        if lam > 0.0 {
            s -= lam * lam.log2();
        }
    }
    Ok(s.max(0.0))
}

/// Binary entropy h(x) = -x log2 x - (1-x) log2 (1-x) in bits.
pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}
