//! Conditioning an evidence structure on observed evidence.
//!
//! The conditioned structure keeps exactly the arguments whose presumption is
//! implied by the evidence, together with the parent relation restricted to
//! them. It always refers back to the original structure; there is no way to
//! condition a conditioned structure again, because conditioning on `e1` and
//! then on `e2` is not the same as conditioning once on `e1 & e2`.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::order::OrderClosure;
use crate::semantics::{ConclusionSentence, EvidenceSentence};
use crate::structure::{Argument, ArgumentId, EvidenceStructure};

#[derive(Debug, Clone)]
pub struct ConditionedStructure<'a> {
    structure: &'a EvidenceStructure,
    closure: &'a OrderClosure,
    given: EvidenceSentence,
    triggered: FixedBitSet,
}

/// Conditions `structure` on the evidence `given`.
///
/// Fails with [`Error::Evidence`] when `given` is unsatisfiable, and with
/// [`Error::Usage`] when it belongs to another frame or the closure was built
/// for a different structure.
pub fn condition<'a>(
    structure: &'a EvidenceStructure,
    closure: &'a OrderClosure,
    given: &EvidenceSentence,
) -> Result<ConditionedStructure<'a>> {
    if given.frame() != structure.evidence_frame() {
        return Err(Error::Usage("evidence belongs to a different frame".into()));
    }
    if closure.len() != structure.len() {
        return Err(Error::Usage("closure does not belong to this structure".into()));
    }
    if !given.is_satisfiable() {
        return Err(Error::Evidence(format!("`{given}` cannot hold")));
    }
    let mut triggered = FixedBitSet::with_capacity(structure.len());
    for arg in structure.arguments() {
        if given.entails(&arg.presumption) {
            triggered.insert(arg.id.0);
        }
    }
    Ok(ConditionedStructure { structure, closure, given: given.clone(), triggered })
}

impl<'a> ConditionedStructure<'a> {
    pub fn structure(&self) -> &'a EvidenceStructure {
        self.structure
    }

    pub fn closure(&self) -> &'a OrderClosure {
        self.closure
    }

    pub fn given(&self) -> &EvidenceSentence {
        &self.given
    }

    pub fn is_triggered(&self, id: ArgumentId) -> bool {
        self.triggered.contains(id.0)
    }

    pub fn triggered_ids(&self) -> impl Iterator<Item = ArgumentId> + '_ {
        self.triggered.ones().map(ArgumentId)
    }

    /// Triggered arguments in id order.
    pub fn triggered_arguments(&self) -> Vec<&'a Argument> {
        let args = self.structure.arguments();
        self.triggered.ones().map(|i| &args[i]).collect()
    }

    pub fn len(&self) -> usize {
        self.triggered.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.triggered.is_clear()
    }

    /// The restricted relation; false whenever either side is not triggered.
    pub fn leq(&self, a: ArgumentId, b: ArgumentId) -> bool {
        self.is_triggered(a) && self.is_triggered(b) && self.closure.holds(a.0, b.0)
    }

    /// Triggered arguments whose conclusion implies `p`.
    pub fn supports_of(&self, p: &ConclusionSentence) -> Vec<ArgumentId> {
        self.triggered_arguments().into_iter().filter(|a| a.conclusion.within(p)).map(|a| a.id).collect()
    }
}
