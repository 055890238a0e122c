use num_complex::Complex64;

use crate::error::{QError, Result};

pub const MAX_DIM: usize = 16;

/// Dense complex square matrix, row-major, for spaces of dimension 2..16.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSquareMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexSquareMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(QError::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Build from real entries, row-major.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(
            dim,
            entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    /// Outer product v v† of a complex vector.
    pub fn outer(v: &[Complex64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = self[(j, i)].conj();
            }
        }
        m
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conjugate(&self) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(self.dim, v.len());
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Max-norm of the entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Deviation from Hermiticity, max |m[i,j] - conj(m[j,i])|.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

}

impl std::ops::Index<(usize, usize)> for ComplexSquareMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexSquareMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}

/// Kronecker product. The (i*db+k, j*db+l) entry is a[i,j]*b[k,l].
pub fn tensor(a: &ComplexSquareMatrix, b: &ComplexSquareMatrix) -> Result<ComplexSquareMatrix> {
    let (da, db) = (a.dim(), b.dim());
    let dim = da * db;
    if dim > MAX_DIM {
        return Err(QError::DimensionOverflow(dim));
    }
    let mut out = ComplexSquareMatrix::zeros(dim);
    for i in 0..da {
        for j in 0..da {
            let aij = a[(i, j)];
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k, j * db + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product of two complex vectors.
pub fn tensor_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x * y);
        }
    }
    out
}

const HERMITICITY_TOL: f64 = 1e-8;
const JACOBI_MAX_SWEEPS: usize = 64;

/// Hermitian eigendecomposition: m = V diag(λ) V† with eigenvalues sorted
/// descending and orthonormal eigenvector columns.
///
/// Cyclic complex Jacobi iteration; for the small dimensions used here it
/// converges in a handful of sweeps and stays accurate on degenerate and
/// rank-deficient spectra.
pub fn eig_hermitian(m: &ComplexSquareMatrix) -> Result<(Vec<f64>, ComplexSquareMatrix)> {
    let defect = m.hermiticity_defect();
    if defect > HERMITICITY_TOL {
        return Err(QError::NotHermitian(defect));
    }
    let n = m.dim();
    // Symmetrize away float noise below the tolerance before factorizing.
    let mut a = m.add(&m.adjoint()).scale(Complex64::new(0.5, 0.0));
    let mut v = ComplexSquareMatrix::identity(n);
    let scale = a.entries.iter().map(|z| z.norm()).fold(1e-300, f64::max);
    let stop = 1e-15 * scale;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[(p, q)].norm());
            }
        }
        if off <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= stop {
                    continue;
                }
                // Phase factor turning the 2x2 pivot block real symmetric,
                // then the classical Jacobi rotation annihilating it.
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = -tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Column p of the unitary is (c, e^{-iφ}s); column q is
                // (-s, e^{-iφ}c) in the (p, q) plane.
                let sp = phase.conj() * s;
                let cp = phase.conj() * c;
                for i in 0..n {
                    let (aip, aiq) = (a[(i, p)], a[(i, q)]);
                    a[(i, p)] = aip * c + aiq * sp;
                    a[(i, q)] = -aip * s + aiq * cp;
                    let (vip, viq) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = vip * c + viq * sp;
                    v[(i, q)] = -vip * s + viq * cp;
                }
                for j in 0..n {
                    let (apj, aqj) = (a[(p, j)], a[(q, j)]);
                    a[(p, j)] = apj * c + aqj * sp.conj();
                    a[(q, j)] = -apj * s + aqj * cp.conj();
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(y, y)].re.partial_cmp(&a[(x, x)].re).unwrap());
    let values: Vec<f64> = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vectors = ComplexSquareMatrix::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = v[(row, k)];
        }
    }
    Ok((values, vectors))
}

/// Eigenvalues only, descending.
pub fn eigvals_hermitian(m: &ComplexSquareMatrix) -> Result<Vec<f64>> {
    eig_hermitian(m).map(|(v, _)| v)
}

/// Hermitian PSD square root via eigendecomposition. Eigenvalues slightly
/// negative from rounding are clipped to zero.
pub fn sqrt_psd(m: &ComplexSquareMatrix) -> Result<ComplexSquareMatrix> {
    let (vals, vecs) = eig_hermitian(m)?;
    let n = m.dim();
    let mut out = ComplexSquareMatrix::zeros(n);
    for (k, &lam) in vals.iter().enumerate() {
        let s = lam.max(0.0).sqrt();
        if s == 0.0 {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += Complex64::new(s, 0.0) * vecs[(i, k)] * vecs[(j, k)].conj();
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub fn sigma_x() -> ComplexSquareMatrix {
        ComplexSquareMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    pub fn sigma_y() -> ComplexSquareMatrix {
        ComplexSquareMatrix::new(2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
            .unwrap()
    }

    #[test]
    fn tensor_identity_is_identity() {
        let i2 = ComplexSquareMatrix::identity(2);
        let i4 = tensor(&i2, &i2).unwrap();
        assert_eq!(i4, ComplexSquareMatrix::identity(4));
    }

    #[test]
    fn tensor_projector_expansion() {
        let p = ComplexSquareMatrix::from_real(2, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let i2 = ComplexSquareMatrix::identity(2);
        let t = tensor(&p, &i2).unwrap();
        let expected =
            ComplexSquareMatrix::from_real(4, &{
                let mut e = vec![0.0; 16];
                e[0] = 1.0;
                e[5] = 1.0;
                e
            })
            .unwrap();
        assert!(t.max_abs_diff(&expected) == 0.0);
    }

    #[test]
    fn tensor_sigma_y_sigma_y_antidiagonal() {
        // Expanding the Kronecker product by hand gives the antidiagonal
        // (-1, 1, 1, -1), the spin-flip kernel of the concurrence.
        let yy = tensor(&sigma_y(), &sigma_y()).unwrap();
        let mut expected = ComplexSquareMatrix::zeros(4);
        expected[(0, 3)] = c(-1.0, 0.0);
        expected[(1, 2)] = c(1.0, 0.0);
        expected[(2, 1)] = c(1.0, 0.0);
        expected[(3, 0)] = c(-1.0, 0.0);
        assert!(yy.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn tensor_overflow_rejected() {
        let i4 = ComplexSquareMatrix::identity(4);
        let i8 = tensor(&i4, &ComplexSquareMatrix::identity(2)).unwrap();
        assert!(matches!(
            tensor(&i8, &i4),
            Err(QError::DimensionOverflow(32))
        ));
    }

    #[test]
    fn eig_identity_and_sigma_x() {
        let (vals, _) = eig_hermitian(&ComplexSquareMatrix::identity(2)).unwrap();
        assert_eq!(vals, vec![1.0, 1.0]);
        let (vals, _) = eig_hermitian(&sigma_x()).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexSquareMatrix::from_real(2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(eig_hermitian(&m), Err(QError::NotHermitian(_))));
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for trial in 0..1000 {
            let n = 2 + (trial % 15);
            let mut m = ComplexSquareMatrix::zeros(n);
            for i in 0..n {
                m[(i, i)] = c(rng.gen::<f64>() - 0.5, 0.0);
                for j in (i + 1)..n {
                    let z = c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                    m[(i, j)] = z;
                    m[(j, i)] = z.conj();
                }
            }
            let (vals, vecs) = eig_hermitian(&m).unwrap();
            let mut recon = ComplexSquareMatrix::zeros(n);
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        recon[(i, j)] +=
                            c(vals[k], 0.0) * vecs[(i, k)] * vecs[(j, k)].conj();
                    }
                }
            }
            assert!(
                m.max_abs_diff(&recon) <= 1e-9,
                "reconstruction residual {} at dim {}",
                m.max_abs_diff(&recon),
                n
            );
            for k in 1..n {
                assert!(vals[k - 1] >= vals[k]);
            }
        }
    }

    #[test]
    fn sqrt_psd_squares_back() {
        let m = ComplexSquareMatrix::from_real(2, &[0.7, 0.1, 0.1, 0.3]).unwrap();
        let s = sqrt_psd(&m).unwrap();
        assert!(s.matmul(&s).max_abs_diff(&m) < 1e-12);
    }
}
