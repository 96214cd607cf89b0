//! Finite propositional semantics for the evidence and conclusion spaces.
//!
//! Evidence sentences are stored as the set of valuations that satisfy them,
//! so implication is model-set inclusion and equivalence is equality.
//! Valuation `i` assigns atom `j` the value of bit `j` of `i`.

mod formula;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use fixedbitset::FixedBitSet;

pub use formula::Formula;
pub(crate) use formula::{is_ident_continue, is_ident_start};

use crate::error::{Error, Result};

pub const MAX_EVIDENCE_ATOMS: usize = 16;
pub const MAX_ALTERNATIVES: usize = 24;

fn check_names(kind: &str, names: &[String]) -> Result<()> {
    for (i, name) in names.iter().enumerate() {
        let mut chars = name.chars();
        let well_formed = chars.next().is_some_and(is_ident_start) && chars.all(is_ident_continue);
        if !well_formed {
            return Err(Error::Declaration(format!("{kind} name `{name}` is not an identifier")));
        }
        if names[..i].contains(name) {
            return Err(Error::Declaration(format!("duplicate {kind} `{name}`")));
        }
    }
    Ok(())
}

/// The evidence space: a list of distinct atom names.
#[derive(Debug, Clone)]
pub struct EvidenceFrame {
    atoms: Arc<[String]>,
}

impl PartialEq for EvidenceFrame {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.atoms, &other.atoms) || self.atoms == other.atoms
    }
}

impl Eq for EvidenceFrame {}

impl EvidenceFrame {
    pub fn new<I, S>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let atoms: Vec<String> = atoms.into_iter().map(Into::into).collect();
        if atoms.is_empty() {
            return Err(Error::Declaration("the evidence frame needs at least one atom".into()));
        }
        if atoms.len() > MAX_EVIDENCE_ATOMS {
            return Err(Error::Declaration(format!(
                "{} evidence atoms exceed the limit of {MAX_EVIDENCE_ATOMS}",
                atoms.len()
            )));
        }
        check_names("atom", &atoms)?;
        Ok(EvidenceFrame { atoms: atoms.into() })
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn index_of(&self, atom: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == atom)
    }

    pub fn valuation_count(&self) -> usize {
        1 << self.atoms.len()
    }

    fn with_models(&self, models: FixedBitSet) -> EvidenceSentence {
        debug_assert_eq!(models.len(), self.valuation_count());
        EvidenceSentence { frame: self.clone(), models }
    }

    pub fn tautology(&self) -> EvidenceSentence {
        let mut models = FixedBitSet::with_capacity(self.valuation_count());
        models.insert_range(..);
        self.with_models(models)
    }

    pub fn contradiction(&self) -> EvidenceSentence {
        self.with_models(FixedBitSet::with_capacity(self.valuation_count()))
    }

    pub fn atom(&self, name: &str) -> Result<EvidenceSentence> {
        let j = self.index_of(name).ok_or_else(|| Error::UnknownAtom(name.to_string()))?;
        let mut models = FixedBitSet::with_capacity(self.valuation_count());
        for v in 0..self.valuation_count() {
            if v >> j & 1 == 1 {
                models.insert(v);
            }
        }
        Ok(self.with_models(models))
    }

    /// The sentence true in exactly the given valuation.
    pub fn valuation(&self, index: usize) -> Result<EvidenceSentence> {
        if index >= self.valuation_count() {
            return Err(Error::Usage(format!("valuation {index} out of range")));
        }
        let mut models = FixedBitSet::with_capacity(self.valuation_count());
        models.insert(index);
        Ok(self.with_models(models))
    }

    /// Builds the model set of a formula. Fails on the first unknown atom.
    pub fn sentence(&self, formula: &Formula) -> Result<EvidenceSentence> {
        match formula {
            Formula::Atom(name, _) => self.atom(name),
            Formula::Not(f) => Ok(self.sentence(f)?.negate()),
            Formula::And(a, b) => Ok(self.sentence(a)?.conjoin_unchecked(&self.sentence(b)?)),
            Formula::Or(a, b) => Ok(self.sentence(a)?.disjoin_unchecked(&self.sentence(b)?)),
        }
    }

    pub fn parse(&self, text: &str) -> Result<EvidenceSentence> {
        self.sentence(&Formula::parse(text)?)
    }
}

/// A sentence of the evidence space, identified by its model set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvidenceSentence {
    frame: EvidenceFrame,
    models: FixedBitSet,
}

impl Hash for EvidenceSentence {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.models.hash(state);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connective {
    Negate,
    Conjoin,
    Disjoin,
}

impl EvidenceSentence {
    pub fn frame(&self) -> &EvidenceFrame {
        &self.frame
    }

    pub fn models(&self) -> impl Iterator<Item = usize> + '_ {
        self.models.ones()
    }

    pub fn model_count(&self) -> usize {
        self.models.count_ones(..)
    }

    pub fn is_satisfiable(&self) -> bool {
        !self.models.is_clear()
    }

    pub fn is_valid(&self) -> bool {
        self.model_count() == self.frame.valuation_count()
    }

    pub fn satisfied_by(&self, valuation: usize) -> bool {
        self.models.contains(valuation)
    }

    fn same_frame(&self, other: &EvidenceSentence) -> Result<()> {
        if self.frame == other.frame {
            Ok(())
        } else {
            Err(Error::Usage("evidence sentences belong to different frames".into()))
        }
    }

    /// Model-set inclusion; assumes a shared frame.
    pub(crate) fn entails(&self, other: &EvidenceSentence) -> bool {
        self.models.is_subset(&other.models)
    }

    pub(crate) fn strictly_entails(&self, other: &EvidenceSentence) -> bool {
        self.entails(other) && self.models != other.models
    }

    pub fn implies(&self, other: &EvidenceSentence) -> Result<bool> {
        self.same_frame(other)?;
        Ok(self.entails(other))
    }

    /// Implies `other` without being equivalent to it.
    pub fn strictly_implies(&self, other: &EvidenceSentence) -> Result<bool> {
        self.same_frame(other)?;
        Ok(self.strictly_entails(other))
    }

    pub fn equivalent(&self, other: &EvidenceSentence) -> Result<bool> {
        self.same_frame(other)?;
        Ok(self.models == other.models)
    }

    pub fn negate(&self) -> EvidenceSentence {
        let mut models = self.models.clone();
        models.toggle_range(..);
        self.frame.with_models(models)
    }

    pub(crate) fn conjoin_unchecked(&self, other: &EvidenceSentence) -> EvidenceSentence {
        let mut models = self.models.clone();
        models.intersect_with(&other.models);
        self.frame.with_models(models)
    }

    pub(crate) fn disjoin_unchecked(&self, other: &EvidenceSentence) -> EvidenceSentence {
        let mut models = self.models.clone();
        models.union_with(&other.models);
        self.frame.with_models(models)
    }

    pub fn conjoin(&self, other: &EvidenceSentence) -> Result<EvidenceSentence> {
        self.same_frame(other)?;
        Ok(self.conjoin_unchecked(other))
    }

    pub fn disjoin(&self, other: &EvidenceSentence) -> Result<EvidenceSentence> {
        self.same_frame(other)?;
        Ok(self.disjoin_unchecked(other))
    }

    /// Applies a connective to one operand (`Negate`) or folds it over one or
    /// more operands (`Conjoin`, `Disjoin`).
    pub fn combine(op: Connective, operands: &[&EvidenceSentence]) -> Result<EvidenceSentence> {
        let (first, rest) =
            operands.split_first().ok_or_else(|| Error::Usage("combine needs at least one operand".into()))?;
        match op {
            Connective::Negate if rest.is_empty() => Ok(first.negate()),
            Connective::Negate => Err(Error::Usage("negation takes exactly one operand".into())),
            Connective::Conjoin => rest.iter().try_fold((*first).clone(), |acc, s| acc.conjoin(s)),
            Connective::Disjoin => rest.iter().try_fold((*first).clone(), |acc, s| acc.disjoin(s)),
        }
    }
}

impl EvidenceSentence {
    /// A formula with exactly this model set, in disjunctive normal form.
    pub fn to_formula(&self) -> Formula {
        let atoms = self.frame.atoms();
        let first = Formula::atom(atoms[0].clone());
        if !self.is_satisfiable() {
            return Formula::and(first.clone(), Formula::not(first));
        }
        if self.is_valid() {
            return Formula::or(first.clone(), Formula::not(first));
        }
        let minterm = |v: usize| {
            atoms
                .iter()
                .enumerate()
                .map(|(j, a)| {
                    let lit = Formula::atom(a.clone());
                    if v >> j & 1 == 1 {
                        lit
                    } else {
                        Formula::not(lit)
                    }
                })
                .reduce(Formula::and)
                .expect("frame has atoms")
        };
        self.models().map(minterm).reduce(Formula::or).expect("satisfiable")
    }
}

/// Renders the sentence in disjunctive normal form, one disjunct per model.
impl fmt::Display for EvidenceSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

/// The conclusion space: a finite set of mutually exclusive alternatives.
#[derive(Debug, Clone)]
pub struct ConclusionFrame {
    alternatives: Arc<[String]>,
}

impl PartialEq for ConclusionFrame {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.alternatives, &other.alternatives) || self.alternatives == other.alternatives
    }
}

impl Eq for ConclusionFrame {}

impl ConclusionFrame {
    pub fn new<I, S>(alternatives: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let alternatives: Vec<String> = alternatives.into_iter().map(Into::into).collect();
        if alternatives.is_empty() {
            return Err(Error::Declaration("the conclusion frame needs at least one alternative".into()));
        }
        if alternatives.len() > MAX_ALTERNATIVES {
            return Err(Error::Declaration(format!(
                "{} alternatives exceed the limit of {MAX_ALTERNATIVES}",
                alternatives.len()
            )));
        }
        check_names("alternative", &alternatives)?;
        Ok(ConclusionFrame { alternatives: alternatives.into() })
    }

    pub fn alternatives(&self) -> &[String] {
        &self.alternatives
    }

    pub fn len(&self) -> usize {
        self.alternatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alternatives.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.alternatives.iter().position(|a| a == name)
    }

    fn full_mask(&self) -> u32 {
        if self.alternatives.len() == 32 {
            u32::MAX
        } else {
            (1u32 << self.alternatives.len()) - 1
        }
    }

    pub fn from_mask(&self, members: u32) -> Result<ConclusionSentence> {
        if members & !self.full_mask() != 0 {
            return Err(Error::Usage(format!("mask {members:#x} has bits outside the frame")));
        }
        Ok(ConclusionSentence { frame: self.clone(), members })
    }

    pub fn empty(&self) -> ConclusionSentence {
        ConclusionSentence { frame: self.clone(), members: 0 }
    }

    pub fn full(&self) -> ConclusionSentence {
        ConclusionSentence { frame: self.clone(), members: self.full_mask() }
    }

    pub fn singleton(&self, index: usize) -> ConclusionSentence {
        assert!(index < self.len(), "alternative index out of range");
        ConclusionSentence { frame: self.clone(), members: 1 << index }
    }

    pub fn set<S: AsRef<str>>(&self, names: &[S]) -> Result<ConclusionSentence> {
        let mut members = 0;
        for name in names {
            let name = name.as_ref();
            let i = self.index_of(name).ok_or_else(|| Error::UnknownAlternative(name.to_string()))?;
            members |= 1 << i;
        }
        Ok(ConclusionSentence { frame: self.clone(), members })
    }

    /// Parses `{A, B}`, `!{A}` or a bare alternative name.
    pub fn parse(&self, text: &str) -> Result<ConclusionSentence> {
        let trimmed = text.trim();
        if let Some(rest) = trimmed.strip_prefix('!').or_else(|| trimmed.strip_prefix('¬')) {
            return Ok(self.parse(rest)?.complement());
        }
        if let Some(inner) = trimmed.strip_prefix('{') {
            let inner =
                inner.strip_suffix('}').ok_or_else(|| Error::syntax(text.chars().count() + 1, "expected `}`"))?;
            let names: Vec<&str> = inner.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            return self.set(&names);
        }
        self.set(&[trimmed])
    }
}

/// A sentence of the conclusion space: a subset of the alternatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConclusionSentence {
    frame: ConclusionFrame,
    members: u32,
}

impl Hash for ConclusionSentence {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.members.hash(state);
    }
}

impl ConclusionSentence {
    pub fn frame(&self) -> &ConclusionFrame {
        &self.frame
    }

    pub fn mask(&self) -> u32 {
        self.members
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.frame.len()).filter(|i| self.members >> i & 1 == 1)
    }

    pub fn len(&self) -> usize {
        self.members.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.members == 0
    }

    pub fn is_full(&self) -> bool {
        self.members == self.frame.full_mask()
    }

    fn same_frame(&self, other: &ConclusionSentence) -> Result<()> {
        if self.frame == other.frame {
            Ok(())
        } else {
            Err(Error::Usage("conclusion sentences belong to different frames".into()))
        }
    }

    pub(crate) fn within(&self, other: &ConclusionSentence) -> bool {
        self.members & !other.members == 0
    }

    pub fn complement(&self) -> ConclusionSentence {
        ConclusionSentence { frame: self.frame.clone(), members: !self.members & self.frame.full_mask() }
    }

    pub fn union(&self, other: &ConclusionSentence) -> Result<ConclusionSentence> {
        self.same_frame(other)?;
        Ok(ConclusionSentence { frame: self.frame.clone(), members: self.members | other.members })
    }

    pub fn intersection(&self, other: &ConclusionSentence) -> Result<ConclusionSentence> {
        self.same_frame(other)?;
        Ok(ConclusionSentence { frame: self.frame.clone(), members: self.members & other.members })
    }

    /// `self` implies `other`.
    pub fn is_subset(&self, other: &ConclusionSentence) -> Result<bool> {
        self.same_frame(other)?;
        Ok(self.within(other))
    }
}

/// Serialized as the list of member names.
impl serde::Serialize for ConclusionSentence {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.members().map(|i| &self.frame.alternatives()[i]))
    }
}

impl fmt::Display for ConclusionSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.members().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&self.frame.alternatives()[i])?;
        }
        f.write_str("}")
    }
}
