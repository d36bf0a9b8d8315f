use std::ops::{Add, Mul};

use nalgebra::linalg::SymmetricEigen;

use super::{check_hermitian, max_abs, CMatrix, CompositeSpace, QdynError, C64};

/// A Hermitian matrix acting on a [`CompositeSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    space: CompositeSpace,
    matrix: CMatrix,
}

impl HermitianOperator {
    pub fn new(space: CompositeSpace, matrix: CMatrix) -> Result<Self, QdynError> {
        let d = space.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(QdynError::DimensionMismatch { expected: d, found: matrix.nrows() });
        }
        check_hermitian(&matrix)?;
        Ok(Self { space, matrix })
    }

    pub fn zeros(space: CompositeSpace) -> Self {
        let d = space.total_dim();
        Self { space, matrix: CMatrix::zeros(d, d) }
    }

    pub fn identity(space: CompositeSpace) -> Self {
        let d = space.total_dim();
        Self { space, matrix: CMatrix::identity(d, d) }
    }

    pub fn diagonal(space: CompositeSpace, entries: &[f64]) -> Result<Self, QdynError> {
        let d = space.total_dim();
        if entries.len() != d {
            return Err(QdynError::DimensionMismatch { expected: d, found: entries.len() });
        }
        let mut matrix = CMatrix::zeros(d, d);
        for (i, &e) in entries.iter().enumerate() {
            matrix[(i, i)] = C64::new(e, 0.0);
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

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.matrix)
    }

    /// `self ⊗ other` on the joined space.
    pub fn tensor(&self, other: &HermitianOperator) -> Result<Self, QdynError> {
        Ok(Self {
            space: self.space.join(&other.space)?,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    /// Extend to `target` by tensoring with the identity on every factor not in `self.space`.
    pub fn embed(&self, target: &CompositeSpace) -> Result<Self, QdynError> {
        let matrix = embed_matrix(&self.matrix, &self.space, target)?;
        Ok(Self { space: target.clone(), matrix })
    }

    /// `[self, other]`, which is anti-Hermitian for Hermitian inputs.
    pub fn commutator(&self, other: &HermitianOperator) -> Result<CMatrix, QdynError> {
        if self.space != other.space {
            return Err(QdynError::SpaceMismatch("commutator".into()));
        }
        Ok(&self.matrix * &other.matrix - &other.matrix * &self.matrix)
    }

    pub fn eigen(&self) -> Result<SpectralDecomposition, QdynError> {
        SpectralDecomposition::new(&self.matrix)
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;

    fn add(self, rhs: &HermitianOperator) -> HermitianOperator {
        assert_eq!(self.space, rhs.space, "adding operators on different spaces");
        HermitianOperator { space: self.space.clone(), matrix: &self.matrix + &rhs.matrix }
    }
}

impl Add for HermitianOperator {
    type Output = HermitianOperator;

    fn add(self, rhs: HermitianOperator) -> HermitianOperator {
        &self + &rhs
    }
}

impl Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;

    fn mul(self, c: f64) -> HermitianOperator {
        HermitianOperator { space: self.space.clone(), matrix: &self.matrix * C64::new(c, 0.0) }
    }
}

impl Mul<f64> for HermitianOperator {
    type Output = HermitianOperator;

    fn mul(self, c: f64) -> HermitianOperator {
        &self * c
    }
}

/// Tensor `m` (acting on `source`) with identities so that it acts on `target`.
pub(crate) fn embed_matrix(
    m: &CMatrix,
    source: &CompositeSpace,
    target: &CompositeSpace,
) -> Result<CMatrix, QdynError> {
    let mut positions = Vec::with_capacity(source.factors().len());
    for f in source.factors() {
        let p = target.position(&f.label)?;
        let dim = target.factors()[p].dim;
        if dim != f.dim {
            return Err(QdynError::DimensionMismatch { expected: dim, found: f.dim });
        }
        positions.push(p);
    }
    let mut sorted = positions.clone();
    sorted.sort_unstable();
    let rest = target.complement_positions(&sorted);
    let sub = target.offsets(&positions);
    let others = target.offsets(&rest);
    let d = target.total_dim();
    let mut out = CMatrix::zeros(d, d);
    for (b, &ob) in sub.iter().enumerate() {
        for (a, &oa) in sub.iter().enumerate() {
            let v = m[(a, b)];
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            for &r in &others {
                out[(oa + r, ob + r)] = v;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> CMatrix {
        let o = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self {
            Pauli::X => CMatrix::from_row_slice(2, 2, &[o, one, one, o]),
            Pauli::Y => CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
            Pauli::Z => CMatrix::from_row_slice(2, 2, &[one, o, o, -one]),
        }
    }
}

/// The Pauli matrix `kind` acting on the qubit `site`, identity elsewhere.
pub fn pauli(kind: Pauli, site: &str, space: &CompositeSpace) -> Result<HermitianOperator, QdynError> {
    let dim = space.dim_of(site)?;
    if dim != 2 {
        return Err(QdynError::NotQubit { label: site.to_string(), dim });
    }
    let local = CompositeSpace::new([(site, 2)])?;
    let matrix = embed_matrix(&kind.matrix(), &local, space)?;
    Ok(HermitianOperator { space: space.clone(), matrix })
}

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn new(m: &CMatrix) -> Result<Self, QdynError> {
        let n = m.nrows();
        if n != m.ncols() {
            return Err(QdynError::DimensionMismatch { expected: n, found: m.ncols() });
        }
        // symmetrise so rounding noise in the input cannot leak into the eigenvalues
        let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
        let eig = SymmetricEigen::try_new(herm, f64::EPSILON, 1000 * n.max(1))
            .ok_or(QdynError::EigenFailure)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let mut eigenvectors = CMatrix::zeros(n, n);
        for (col, &k) in order.iter().enumerate() {
            eigenvectors.set_column(col, &eig.eigenvectors.column(k));
        }
        Ok(Self { eigenvalues, eigenvectors })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U f(Λ) U^dag` for a real function of the eigenvalues.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.dim();
        let mut scaled = self.eigenvectors.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            let fl = C64::new(f(l), 0.0);
            for i in 0..n {
                scaled[(i, j)] *= fl;
            }
        }
        scaled * self.eigenvectors.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.apply(|l| l)
    }
}
