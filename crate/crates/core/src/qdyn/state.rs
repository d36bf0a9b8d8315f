use super::operator::SpectralDecomposition;
use super::{
    check_hermitian, CMatrix, CompositeSpace, HermitianOperator, QdynError, C64, NEGATIVITY_TOL, TRACE_TOL,
};

/// `σ` eigenvalues below this are treated as outside its support.
const SUPPORT_EIGENVALUE_TOL: f64 = 1e-14;
/// Weight of `ρ` outside the support of `σ` that still counts as zero.
const SUPPORT_WEIGHT_TOL: f64 = 1e-12;

/// A unit-trace positive semidefinite Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: CompositeSpace,
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(space: CompositeSpace, matrix: CMatrix) -> Result<Self, QdynError> {
        let d = space.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(QdynError::DimensionMismatch { expected: d, found: matrix.nrows() });
        }
        check_hermitian(&matrix)?;
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(QdynError::NotNormalized(tr - 1.0));
        }
        let eig = SpectralDecomposition::new(&matrix)?;
        if let Some(&min) = eig.eigenvalues.first() {
            if min < -NEGATIVITY_TOL {
                return Err(QdynError::NegativeEigenvalue(min));
            }
        }
        Ok(Self { space, matrix })
    }

    /// For matrices that are valid by construction (e.g. unitary images of valid states).
    pub(crate) fn from_trusted(space: CompositeSpace, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), space.total_dim());
        Self { space, matrix }
    }

    /// `|ψ⟩⟨ψ|` for a normalised vector.
    pub fn pure(space: CompositeSpace, amplitudes: &[C64]) -> Result<Self, QdynError> {
        let d = space.total_dim();
        if amplitudes.len() != d {
            return Err(QdynError::DimensionMismatch { expected: d, found: amplitudes.len() });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > TRACE_TOL {
            return Err(QdynError::NotNormalized(norm - 1.0));
        }
        let psi = nalgebra::DVector::from_column_slice(amplitudes);
        Ok(Self { space, matrix: &psi * psi.adjoint() })
    }

    pub fn basis_state(space: CompositeSpace, index: usize) -> Result<Self, QdynError> {
        let d = space.total_dim();
        if index >= d {
            return Err(QdynError::DimensionMismatch { expected: d, found: index });
        }
        let mut matrix = CMatrix::zeros(d, d);
        matrix[(index, index)] = C64::new(1.0, 0.0);
        Ok(Self { space, matrix })
    }

    pub fn maximally_mixed(space: CompositeSpace) -> Self {
        let d = space.total_dim();
        let matrix = CMatrix::identity(d, d) * C64::new(1.0 / d as f64, 0.0);
        Self { space, matrix }
    }

    /// Diagonal state with the given populations.
    pub fn diagonal(space: CompositeSpace, populations: &[f64]) -> Result<Self, QdynError> {
        let d = space.total_dim();
        if populations.len() != d {
            return Err(QdynError::DimensionMismatch { expected: d, found: populations.len() });
        }
        if let Some(&p) = populations.iter().find(|&&p| p < -NEGATIVITY_TOL) {
            return Err(QdynError::NegativeEigenvalue(p));
        }
        let tr: f64 = populations.iter().sum();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(QdynError::NotNormalized(tr - 1.0));
        }
        let mut matrix = CMatrix::zeros(d, d);
        for (i, &p) in populations.iter().enumerate() {
            matrix[(i, i)] = C64::new(p, 0.0);
        }
        Ok(Self { space, matrix })
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self, QdynError> {
        Ok(Self {
            space: self.space.join(&other.space)?,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<Vec<f64>, QdynError> {
        Ok(SpectralDecomposition::new(&self.matrix)?.eigenvalues)
    }

    /// `tr{ρ O}`, real for Hermitian `O`.
    pub fn expectation(&self, op: &HermitianOperator) -> Result<f64, QdynError> {
        if op.space() != &self.space {
            return Err(QdynError::SpaceMismatch("expectation value".into()));
        }
        Ok(trace_of_product(&self.matrix, op.matrix()).re)
    }

    /// Reduced state on the factors in `keep`, ordered as they appear in the space.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<DensityMatrix, QdynError> {
        let kept = self.space.positions_of(keep)?;
        let traced = self.space.complement_positions(&kept);
        if traced.is_empty() {
            return Ok(self.clone());
        }
        let sub = self.space.offsets(&kept);
        let rest = self.space.offsets(&traced);
        let n = sub.len();
        let mut out = CMatrix::zeros(n, n);
        for (b, &ob) in sub.iter().enumerate() {
            for (a, &oa) in sub.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for &r in &rest {
                    acc += self.matrix[(oa + r, ob + r)];
                }
                out[(a, b)] = acc;
            }
        }
        Ok(DensityMatrix { space: self.space.restrict(&kept), matrix: out })
    }
}

/// `tr{A B}` without forming the product.
pub(crate) fn trace_of_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

fn clamp_probability(p: f64) -> f64 {
    p.clamp(0.0, 1.0)
}

fn entropy_term(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.ln()
    } else {
        0.0
    }
}

/// `-tr{ρ ln ρ}` in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let eig = SpectralDecomposition::new(rho.matrix()).expect("Hermitian eigensolver failed on a valid state");
    eig.eigenvalues.iter().map(|&l| entropy_term(clamp_probability(l))).sum()
}

/// `tr{ρ (ln ρ - ln σ)}` in nats.
///
/// Fails with [`QdynError::InfiniteDivergence`] when `ρ` puts weight above `1e-12` on an
/// eigenvector of `σ` whose eigenvalue is below `1e-14`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64, QdynError> {
    if rho.space() != sigma.space() {
        return Err(QdynError::SpaceMismatch("relative entropy".into()));
    }
    let er = SpectralDecomposition::new(rho.matrix())?;
    let es = SpectralDecomposition::new(sigma.matrix())?;
    let neg_entropy: f64 = -er.eigenvalues.iter().map(|&l| entropy_term(clamp_probability(l))).sum::<f64>();

    // ⟨s_k|ρ|s_k⟩ for every eigenvector of σ
    let rho_in_sigma_basis = es.eigenvectors.adjoint() * rho.matrix() * &es.eigenvectors;
    let mut cross = 0.0;
    for (k, &q) in es.eigenvalues.iter().enumerate() {
        let w = rho_in_sigma_basis[(k, k)].re;
        if q < SUPPORT_EIGENVALUE_TOL {
            if w > SUPPORT_WEIGHT_TOL {
                return Err(QdynError::InfiniteDivergence);
            }
            continue;
        }
        cross += w * q.ln();
    }
    Ok(neg_entropy - cross)
}
