//! Mode partitions and covariance matrices.
//!
//! Quadratures are interleaved, `(x₁, p₁, x₂, p₂, …)`, and each party owns a
//! contiguous run of modes in the order the partition lists them.

use std::fmt;

use crate::error::{CmError, Result};
use crate::linalg::{
    check_symmetric, direct_sum, max_abs, principal, symmetrize, sym_eig, DenseMatrix, IndexSet,
    TOL_PSD_REL,
};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Party {
    pub label: String,
    pub modes: usize,
}

/// Ordered list of named parties with their mode counts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ModePartition {
    parties: Vec<Party>,
}

impl ModePartition {
    pub fn new<S: Into<String>>(parties: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let parties: Vec<Party> = parties
            .into_iter()
            .map(|(label, modes)| Party {
                label: label.into(),
                modes,
            })
            .collect();
        if parties.is_empty() {
            return Err(CmError::InvalidPartition("no parties".into()));
        }
        for (i, p) in parties.iter().enumerate() {
            if p.label.is_empty() {
                return Err(CmError::InvalidPartition("empty party label".into()));
            }
            if p.modes == 0 {
                return Err(CmError::InvalidPartition(format!(
                    "party `{}` has zero modes",
                    p.label
                )));
            }
            if parties[..i].iter().any(|q| q.label == p.label) {
                return Err(CmError::LabelClash(p.label.clone()));
            }
        }
        Ok(ModePartition { parties })
    }

    /// Single party owning all `modes`.
    pub fn single(label: &str, modes: usize) -> Result<Self> {
        Self::new([(label, modes)])
    }

    /// Parses `"A:2,B1:1,B2:1"`.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut parties = Vec::new();
        for item in spec.split(',') {
            let item = item.trim();
            let (label, modes) = item.split_once(':').ok_or_else(|| {
                CmError::InvalidPartition(format!("`{item}` is not of the form LABEL:MODES"))
            })?;
            let modes: usize = modes.trim().parse().map_err(|_| {
                CmError::InvalidPartition(format!("`{modes}` is not a mode count"))
            })?;
            parties.push((label.trim().to_string(), modes));
        }
        Self::new(parties)
    }

    pub fn parties(&self) -> &[Party] {
        &self.parties
    }

    pub fn labels(&self) -> Vec<&str> {
        self.parties.iter().map(|p| p.label.as_str()).collect()
    }

    pub fn n_modes(&self) -> usize {
        self.parties.iter().map(|p| p.modes).sum()
    }

    pub fn dim(&self) -> usize {
        2 * self.n_modes()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.parties.iter().any(|p| p.label == label)
    }

    pub fn modes_of(&self, label: &str) -> Result<usize> {
        self.parties
            .iter()
            .find(|p| p.label == label)
            .map(|p| p.modes)
            .ok_or_else(|| CmError::UnknownParty(label.to_string()))
    }

    /// Row/column range owned by `label`.
    pub fn range_of(&self, label: &str) -> Result<std::ops::Range<usize>> {
        let mut start = 0;
        for p in &self.parties {
            if p.label == label {
                return Ok(start..start + 2 * p.modes);
            }
            start += 2 * p.modes;
        }
        Err(CmError::UnknownParty(label.to_string()))
    }

    fn check_selector(&self, sel: &PartySelector) -> Result<()> {
        for l in sel.labels() {
            if !self.contains(l) {
                return Err(CmError::UnknownParty(l.clone()));
            }
        }
        Ok(())
    }

    /// Indices owned by the selected parties, in partition order.
    pub fn indices(&self, sel: &PartySelector) -> Result<IndexSet> {
        self.check_selector(sel)?;
        let mut out = Vec::new();
        let mut start = 0;
        for p in &self.parties {
            if sel.contains(&p.label) {
                out.extend(start..start + 2 * p.modes);
            }
            start += 2 * p.modes;
        }
        IndexSet::new(out, self.dim())
    }

    /// Sub-partition of the selected parties, in partition order.
    pub fn restrict(&self, sel: &PartySelector) -> Result<ModePartition> {
        self.check_selector(sel)?;
        Ok(ModePartition {
            parties: self
                .parties
                .iter()
                .filter(|p| sel.contains(&p.label))
                .cloned()
                .collect(),
        })
    }

    /// Selector naming every party not in `sel`; `None` if nothing remains.
    pub fn complement(&self, sel: &PartySelector) -> Result<Option<PartySelector>> {
        self.check_selector(sel)?;
        let rest: Vec<String> = self
            .parties
            .iter()
            .filter(|p| !sel.contains(&p.label))
            .map(|p| p.label.clone())
            .collect();
        if rest.is_empty() {
            Ok(None)
        } else {
            PartySelector::new(rest).map(Some)
        }
    }

    pub fn all(&self) -> PartySelector {
        PartySelector {
            labels: self.parties.iter().map(|p| p.label.clone()).collect(),
        }
    }

    pub fn concat(&self, other: &ModePartition) -> Result<ModePartition> {
        for p in &other.parties {
            if self.contains(&p.label) {
                return Err(CmError::LabelClash(p.label.clone()));
            }
        }
        let mut parties = self.parties.clone();
        parties.extend(other.parties.iter().cloned());
        Ok(ModePartition { parties })
    }
}

impl fmt::Display for ModePartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self
            .parties
            .iter()
            .map(|p| format!("{}:{}", p.label, p.modes))
            .collect();
        write!(f, "{}", items.join(","))
    }
}

/// Nonempty list of distinct party labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartySelector {
    labels: Vec<String>,
}

impl PartySelector {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(CmError::InvalidPartition("empty party selector".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(CmError::LabelClash(l.clone()));
            }
        }
        Ok(PartySelector { labels })
    }

    pub fn one(label: &str) -> Self {
        PartySelector {
            labels: vec![label.to_string()],
        }
    }

    /// Parses a comma-separated list such as `"B1,B2"`.
    pub fn parse(s: &str) -> Result<Self> {
        Self::new(s.split(',').map(|x| x.trim().to_string()))
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn contains(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l == label)
    }

    pub fn union(&self, other: &PartySelector) -> PartySelector {
        let mut labels = self.labels.clone();
        for l in &other.labels {
            if !labels.contains(l) {
                labels.push(l.clone());
            }
        }
        PartySelector { labels }
    }

    pub fn is_disjoint(&self, other: &PartySelector) -> bool {
        !self.labels.iter().any(|l| other.contains(l))
    }
}

/// Real symmetric covariance matrix together with its mode partition.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    matrix: DenseMatrix,
    partition: ModePartition,
}

impl CovarianceMatrix {
    /// Validates symmetry, dimension and positive semidefiniteness.
    pub fn new(matrix: DenseMatrix, partition: ModePartition) -> Result<Self> {
        let cm = Self::new_symmetric(matrix, partition)?;
        let eig = sym_eig(&cm.matrix)?;
        if eig.min() < -TOL_PSD_REL * (1.0 + eig.max().max(0.0)) {
            return Err(CmError::NotPsd { min_eig: eig.min() });
        }
        Ok(cm)
    }

    /// Validates symmetry and dimension only. Indefinite inputs are accepted
    /// so they can be inspected and reported as not bona fide.
    pub fn new_symmetric(matrix: DenseMatrix, partition: ModePartition) -> Result<Self> {
        check_symmetric(&matrix)?;
        if matrix.nrows() != partition.dim() {
            return Err(CmError::DimensionMismatch(format!(
                "matrix is {}x{} but partition `{}` needs dimension {}",
                matrix.nrows(),
                matrix.ncols(),
                partition,
                partition.dim()
            )));
        }
        Ok(CovarianceMatrix {
            matrix: symmetrize(&matrix),
            partition,
        })
    }

    /// Identity (vacuum) CM on `partition`.
    pub fn identity(partition: ModePartition) -> Self {
        let d = partition.dim();
        CovarianceMatrix {
            matrix: DenseMatrix::identity(d, d),
            partition,
        }
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn partition(&self) -> &ModePartition {
        &self.partition
    }

    pub fn into_parts(self) -> (DenseMatrix, ModePartition) {
        (self.matrix, self.partition)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_modes(&self) -> usize {
        self.partition.n_modes()
    }

    /// Principal block of the selected parties.
    pub fn block(&self, sel: &PartySelector) -> Result<DenseMatrix> {
        Ok(principal(&self.matrix, &self.partition.indices(sel)?))
    }

    pub fn norm_max(&self) -> f64 {
        max_abs(&self.matrix)
    }

    /// Relabels parties in order; mode counts are kept.
    pub fn relabel<S: Into<String>>(&self, labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() != self.partition.parties.len() {
            return Err(CmError::DimensionMismatch(format!(
                "{} labels for {} parties",
                labels.len(),
                self.partition.parties.len()
            )));
        }
        let partition = ModePartition::new(
            labels
                .into_iter()
                .zip(self.partition.parties.iter().map(|p| p.modes)),
        )?;
        Ok(CovarianceMatrix {
            matrix: self.matrix.clone(),
            partition,
        })
    }

    pub(crate) fn from_parts_unchecked(matrix: DenseMatrix, partition: ModePartition) -> Self {
        debug_assert_eq!(matrix.nrows(), partition.dim());
        CovarianceMatrix { matrix, partition }
    }

    /// Block-diagonal sum with concatenated partition.
    pub fn direct_sum(&self, other: &CovarianceMatrix) -> Result<Self> {
        let partition = self.partition.concat(&other.partition)?;
        Ok(CovarianceMatrix {
            matrix: direct_sum(&self.matrix, &other.matrix),
            partition,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> ModePartition {
        ModePartition::parse("A:2,B:1,C:1").unwrap()
    }

    #[test]
    fn partition_ranges_and_indices() {
        let p = abc();
        assert_eq!(p.dim(), 8);
        assert_eq!(p.range_of("B").unwrap(), 4..6);
        let sel = PartySelector::new(["C", "A"]).unwrap();
        assert_eq!(p.indices(&sel).unwrap().as_slice(), &[0, 1, 2, 3, 6, 7]);
        assert_eq!(p.restrict(&sel).unwrap().to_string(), "A:2,C:1");
        let rest = p.complement(&sel).unwrap().unwrap();
        assert_eq!(rest.labels(), &["B".to_string()]);
        assert!(p.complement(&p.all()).unwrap().is_none());
    }

    #[test]
    fn partition_rejects_bad_specs() {
        assert!(matches!(
            ModePartition::parse("A:1,A:2"),
            Err(CmError::LabelClash(_))
        ));
        assert!(ModePartition::parse("A:0").is_err());
        assert!(ModePartition::parse("A").is_err());
        assert!(ModePartition::parse(":1").is_err());
        assert!(matches!(
            abc().indices(&PartySelector::one("Z")),
            Err(CmError::UnknownParty(_))
        ));
    }

    #[test]
    fn cm_validation() {
        let p = ModePartition::single("A", 1).unwrap();
        assert!(CovarianceMatrix::new(DenseMatrix::identity(4, 4), p.clone()).is_err());
        let neg = DenseMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0]));
        assert!(matches!(
            CovarianceMatrix::new(neg.clone(), p.clone()),
            Err(CmError::NotPsd { .. })
        ));
        assert!(CovarianceMatrix::new_symmetric(neg, p).is_ok());
    }
}
