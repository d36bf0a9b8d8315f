use std::collections::HashSet;

use super::QdynError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub label: String,
    pub dim: usize,
}

/// Ordered tensor product of labelled factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeSpace {
    factors: Vec<Factor>,
    total_dim: usize,
}

impl CompositeSpace {
    pub fn new<L: Into<String>>(factors: impl IntoIterator<Item = (L, usize)>) -> Result<Self, QdynError> {
        let factors: Vec<Factor> = factors
            .into_iter()
            .map(|(label, dim)| Factor { label: label.into(), dim })
            .collect();
        if factors.is_empty() {
            return Err(QdynError::EmptySpace);
        }
        let mut seen = HashSet::new();
        for f in &factors {
            if f.dim < 2 {
                return Err(QdynError::FactorTooSmall { label: f.label.clone(), dim: f.dim });
            }
            if !seen.insert(f.label.as_str()) {
                return Err(QdynError::DuplicateLabel(f.label.clone()));
            }
        }
        let total_dim = factors.iter().map(|f| f.dim).product();
        Ok(Self { factors, total_dim })
    }

    /// A register of qubits with the given labels.
    pub fn qubits<L: Into<String>>(labels: impl IntoIterator<Item = L>) -> Result<Self, QdynError> {
        Self::new(labels.into_iter().map(|l| (l, 2)))
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.factors.iter().map(|f| f.label.as_str())
    }

    pub fn position(&self, label: &str) -> Result<usize, QdynError> {
        self.factors
            .iter()
            .position(|f| f.label == label)
            .ok_or_else(|| QdynError::UnknownLabel(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize, QdynError> {
        Ok(self.factors[self.position(label)?].dim)
    }

    /// Tensor product `self ⊗ other`.
    pub fn join(&self, other: &CompositeSpace) -> Result<CompositeSpace, QdynError> {
        Self::new(
            self.factors
                .iter()
                .chain(other.factors.iter())
                .map(|f| (f.label.clone(), f.dim)),
        )
    }

    /// Positions of the labelled factors, sorted into the order they appear in `self`.
    pub(crate) fn positions_of(&self, labels: &[&str]) -> Result<Vec<usize>, QdynError> {
        if labels.is_empty() {
            return Err(QdynError::EmptySelection);
        }
        let mut pos = labels
            .iter()
            .map(|l| self.position(l))
            .collect::<Result<Vec<_>, _>>()?;
        pos.sort_unstable();
        pos.dedup();
        Ok(pos)
    }

    /// The space spanned by the factors at `positions`, in order.
    pub(crate) fn restrict(&self, positions: &[usize]) -> CompositeSpace {
        let factors: Vec<Factor> = positions.iter().map(|&p| self.factors[p].clone()).collect();
        let total_dim = factors.iter().map(|f| f.dim).product();
        CompositeSpace { factors, total_dim }
    }

    pub(crate) fn complement_positions(&self, positions: &[usize]) -> Vec<usize> {
        (0..self.factors.len()).filter(|p| !positions.contains(p)).collect()
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.factors.len()];
        for k in (0..self.factors.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.factors[k + 1].dim;
        }
        strides
    }

    /// Flat-index contributions of every basis state of the factors at `positions`
    /// (first listed position most significant).
    pub(crate) fn offsets(&self, positions: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut out = vec![0usize];
        for &p in positions {
            let dim = self.factors[p].dim;
            let mut next = Vec::with_capacity(out.len() * dim);
            for &base in &out {
                for d in 0..dim {
                    next.push(base + d * strides[p]);
                }
            }
            out = next;
        }
        out
    }
}
