//! Qubit-wise commuting partitions of a Pauli sum.

use crate::pauli::{PauliAxis, PauliString, PauliSum};

/// Terms that can be read off one computational-basis measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliGroup {
    terms: Vec<PauliString>,
}

impl PauliGroup {
    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    /// Per-qubit measurement axis; `I` where no term acts.
    pub fn basis(&self) -> Vec<PauliAxis> {
        let n = self.terms.first().map_or(0, |t| t.len());
        let mut axes = vec![PauliAxis::I; n];
        for t in &self.terms {
            for (slot, &a) in axes.iter_mut().zip(t.axes()) {
                if a != PauliAxis::I {
                    *slot = a;
                }
            }
        }
        axes
    }

    fn accepts(&self, t: &PauliString) -> bool {
        self.terms.iter().all(|m| m.qubit_wise_commutes(t))
    }
}

/// Partition of the non-identity terms of an observable.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliGrouping {
    qubit_count: usize,
    identity: f64,
    groups: Vec<PauliGroup>,
}

impl PauliGrouping {
    /// Greedy first-fit over the canonical term order.
    pub fn qubit_wise(h: &PauliSum) -> Self {
        Self::build(h, true)
    }

    /// One group per term, for comparison.
    pub fn singletons(h: &PauliSum) -> Self {
        Self::build(h, false)
    }

    fn build(h: &PauliSum, merge: bool) -> Self {
        let c = h.canonicalize();
        let mut groups: Vec<PauliGroup> = Vec::new();
        let mut identity = 0.0;
        for t in c.terms() {
            if t.is_identity() {
                identity += t.coefficient().re;
                continue;
            }
            match groups.iter_mut().find(|g| merge && g.accepts(t)) {
                Some(g) => g.terms.push(t.clone()),
                None => groups.push(PauliGroup {
                    terms: vec![t.clone()],
                }),
            }
        }
        PauliGrouping {
            qubit_count: h.qubit_count(),
            identity,
            groups,
        }
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn identity_coefficient(&self) -> f64 {
        self.identity
    }

    pub fn groups(&self) -> &[PauliGroup] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Axis words per group, for display.
    pub fn words(&self) -> Vec<Vec<String>> {
        self.groups
            .iter()
            .map(|g| g.terms.iter().map(|t| t.word()).collect())
            .collect()
    }
}

/// Qubit-wise commuting partition, greedy first-fit.
pub fn group_terms(h: &PauliSum) -> PauliGrouping {
    PauliGrouping::qubit_wise(h)
}
