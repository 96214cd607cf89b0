//! Evidence structures: the argument set, declared strength relations and the
//! optional argument-generation passes.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::semantics::{ConclusionFrame, ConclusionSentence, EvidenceFrame, EvidenceSentence, Formula};

/// Index of an argument in its structure. Ids follow declaration order, then
/// generation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct ArgumentId(pub usize);

impl fmt::Display for ArgumentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    Declared,
    RefutationExpansion,
    ConjunctionRule,
    DisjunctionClosure,
}

impl Origin {
    /// Declared and refutation-expanded arguments form the base set that
    /// conjunction generation draws from.
    pub fn is_base(self) -> bool {
        matches!(self, Origin::Declared | Origin::RefutationExpansion)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RefutationPolicy {
    /// One support per alternative outside the refuted sentence.
    #[default]
    Singletons,
    /// A single support for the complement.
    ComplementSet,
}

impl std::str::FromStr for RefutationPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "singletons" => Ok(RefutationPolicy::Singletons),
            "complement_set" => Ok(RefutationPolicy::ComplementSet),
            other => Err(Error::Declaration(format!("unknown refutation policy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Argument {
    pub id: ArgumentId,
    pub labels: Vec<String>,
    pub presumption: EvidenceSentence,
    /// How the presumption is written in listings.
    pub formula: Formula,
    pub conclusion: ConclusionSentence,
    pub origins: Vec<Origin>,
    /// Base-argument pairs this argument was conjoined from.
    pub conjoined_from: Vec<(ArgumentId, ArgumentId)>,
}

impl Argument {
    pub fn is_base(&self) -> bool {
        self.origins.iter().any(|o| o.is_base())
    }

    pub fn has_origin(&self, origin: Origin) -> bool {
        self.origins.contains(&origin)
    }

    /// The first label, or the numeric id.
    pub fn name(&self) -> String {
        self.labels.first().cloned().unwrap_or_else(|| self.id.to_string())
    }
}

impl fmt::Display for Argument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}>", self.formula, self.conclusion)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Leq,
    Strict,
    Equal,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Leq => "<=",
            Relation::Strict => "<",
            Relation::Equal => "~",
        }
    }
}

#[derive(Debug, Clone)]
pub enum RelationDeclaration {
    Arguments {
        lower: ArgumentId,
        relation: Relation,
        upper: ArgumentId,
    },
    /// Relates every argument whose presumption is equivalent to `lower`
    /// with every argument whose presumption is equivalent to `upper`.
    Presumptions {
        lower: EvidenceSentence,
        lower_formula: Formula,
        relation: Relation,
        upper: EvidenceSentence,
        upper_formula: Formula,
    },
}

impl RelationDeclaration {
    pub fn arguments(lower: ArgumentId, relation: Relation, upper: ArgumentId) -> Self {
        RelationDeclaration::Arguments { lower, relation, upper }
    }

    pub fn presumptions(lower: &EvidenceSentence, relation: Relation, upper: &EvidenceSentence) -> Self {
        RelationDeclaration::Presumptions {
            lower: lower.clone(),
            lower_formula: lower.to_formula(),
            relation,
            upper: upper.clone(),
            upper_formula: upper.to_formula(),
        }
    }

    pub fn relation(&self) -> Relation {
        match self {
            RelationDeclaration::Arguments { relation, .. } | RelationDeclaration::Presumptions { relation, .. } => {
                *relation
            }
        }
    }

    pub fn is_presumption_level(&self) -> bool {
        matches!(self, RelationDeclaration::Presumptions { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StructureOptions {
    pub same_presumption_equal: bool,
    pub conjunction_arguments: bool,
    pub conjunction_lifting: bool,
    pub disjunction_closure: bool,
    pub disjunction_closure_cap: usize,
}

impl Default for StructureOptions {
    fn default() -> Self {
        StructureOptions {
            same_presumption_equal: true,
            conjunction_arguments: false,
            conjunction_lifting: false,
            disjunction_closure: false,
            disjunction_closure_cap: 512,
        }
    }
}

impl StructureOptions {
    pub const KEYS: [&'static str; 5] = [
        "same_presumption_equal",
        "conjunction_arguments",
        "conjunction_lifting",
        "disjunction_closure",
        "disjunction_closure_cap",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let flag = || match value {
            "true" | "on" | "yes" => Ok(true),
            "false" | "off" | "no" => Ok(false),
            _ => Err(Error::Declaration(format!("option `{key}` expects true or false, got `{value}`"))),
        };
        match key {
            "same_presumption_equal" => self.same_presumption_equal = flag()?,
            "conjunction_arguments" => self.conjunction_arguments = flag()?,
            "conjunction_lifting" => self.conjunction_lifting = flag()?,
            "disjunction_closure" => self.disjunction_closure = flag()?,
            "disjunction_closure_cap" => {
                self.disjunction_closure_cap = value.parse().map_err(|_| {
                    Error::Declaration(format!("option `{key}` expects a positive integer, got `{value}`"))
                })?
            }
            other => return Err(Error::Declaration(format!("unknown option `{other}`"))),
        }
        Ok(())
    }

    /// `key=value` pairs in canonical order.
    pub fn assignments(&self) -> Vec<(&'static str, String)> {
        vec![
            ("same_presumption_equal", self.same_presumption_equal.to_string()),
            ("conjunction_arguments", self.conjunction_arguments.to_string()),
            ("conjunction_lifting", self.conjunction_lifting.to_string()),
            ("disjunction_closure", self.disjunction_closure.to_string()),
            ("disjunction_closure_cap", self.disjunction_closure_cap.to_string()),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub diagnostics: Vec<Diagnostic>,
}

impl ValidationReport {
    fn error(&mut self, message: String) {
        self.diagnostics.push(Diagnostic { severity: Severity::Error, message });
    }

    fn warning(&mut self, message: String) {
        self.diagnostics.push(Diagnostic { severity: Severity::Warning, message });
    }

    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.severity == Severity::Warning)
    }

    pub fn has_errors(&self) -> bool {
        self.errors().next().is_some()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.diagnostics {
            let tag = match d.severity {
                Severity::Error => "error",
                Severity::Warning => "warning",
            };
            writeln!(f, "{tag}: {}", d.message)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DisjunctionClosureReport {
    pub added: Vec<ArgumentId>,
    /// The cap stopped generation before a fixpoint was reached.
    pub truncated: bool,
}

/// Mutable builder for an [`EvidenceStructure`].
#[derive(Debug, Clone)]
pub struct StructureBuilder {
    evidence: EvidenceFrame,
    conclusions: ConclusionFrame,
    options: StructureOptions,
    arguments: Vec<Argument>,
    declarations: Vec<RelationDeclaration>,
    closure_truncated: bool,
}

impl StructureBuilder {
    pub fn new(evidence: EvidenceFrame, conclusions: ConclusionFrame) -> Self {
        StructureBuilder {
            evidence,
            conclusions,
            options: StructureOptions::default(),
            arguments: Vec::new(),
            declarations: Vec::new(),
            closure_truncated: false,
        }
    }

    pub fn with_options(mut self, options: StructureOptions) -> Self {
        self.options = options;
        self
    }

    pub fn options_mut(&mut self) -> &mut StructureOptions {
        &mut self.options
    }

    pub fn evidence_frame(&self) -> &EvidenceFrame {
        &self.evidence
    }

    pub fn conclusion_frame(&self) -> &ConclusionFrame {
        &self.conclusions
    }

    pub fn arguments(&self) -> &[Argument] {
        &self.arguments
    }

    pub fn declarations(&self) -> &[RelationDeclaration] {
        &self.declarations
    }

    pub fn find_label(&self, label: &str) -> Option<ArgumentId> {
        find_label(&self.arguments, label)
    }

    fn check_argument(&self, e: &EvidenceSentence, p: &ConclusionSentence) -> Result<()> {
        if *e.frame() != self.evidence {
            return Err(Error::Usage("presumption belongs to a different evidence frame".into()));
        }
        if *p.frame() != self.conclusions {
            return Err(Error::Usage("conclusion belongs to a different conclusion frame".into()));
        }
        if !e.is_satisfiable() {
            return Err(Error::Declaration(format!("presumption `{e}` is unsatisfiable")));
        }
        if p.is_empty() {
            return Err(Error::Declaration("an argument cannot support the empty conclusion".into()));
        }
        Ok(())
    }

    /// Inserts an argument or merges it into a semantically equal one.
    /// Returns the id and whether a new argument was created.
    fn insert(
        &mut self,
        presumption: EvidenceSentence,
        formula: Formula,
        conclusion: ConclusionSentence,
        origin: Origin,
    ) -> (ArgumentId, bool) {
        if let Some(existing) =
            self.arguments.iter_mut().find(|a| a.presumption == presumption && a.conclusion == conclusion)
        {
            if !existing.origins.contains(&origin) {
                existing.origins.push(origin);
            }
            return (existing.id, false);
        }
        let id = ArgumentId(self.arguments.len());
        self.arguments.push(Argument {
            id,
            labels: Vec::new(),
            presumption,
            formula,
            conclusion,
            origins: vec![origin],
            conjoined_from: Vec::new(),
        });
        (id, true)
    }

    pub fn add_support(&mut self, e: &EvidenceSentence, p: &ConclusionSentence) -> Result<ArgumentId> {
        self.add_support_as(e, e.to_formula(), p)
    }

    /// Like [`add_support`](Self::add_support) but keeps `formula` as the
    /// written form of the presumption.
    pub fn add_support_as(
        &mut self,
        e: &EvidenceSentence,
        formula: Formula,
        p: &ConclusionSentence,
    ) -> Result<ArgumentId> {
        self.check_argument(e, p)?;
        Ok(self.insert(e.clone(), formula, p.clone(), Origin::Declared).0)
    }

    /// Parses both sides and adds the support.
    pub fn support(&mut self, formula: &str, conclusion: &str) -> Result<ArgumentId> {
        let formula = Formula::parse(formula)?;
        let e = self.evidence.sentence(&formula)?;
        let p = self.conclusions.parse(conclusion)?;
        self.add_support_as(&e, formula, &p)
    }

    pub fn add_refutation(
        &mut self,
        e: &EvidenceSentence,
        p: &ConclusionSentence,
        policy: RefutationPolicy,
    ) -> Result<Vec<ArgumentId>> {
        self.add_refutation_as(e, e.to_formula(), p, policy)
    }

    pub fn add_refutation_as(
        &mut self,
        e: &EvidenceSentence,
        formula: Formula,
        p: &ConclusionSentence,
        policy: RefutationPolicy,
    ) -> Result<Vec<ArgumentId>> {
        let rest = p.complement();
        if rest.is_empty() {
            return Err(Error::Declaration(format!("refuting {p} leaves no alternative to support")));
        }
        let targets = match policy {
            RefutationPolicy::Singletons => rest.members().map(|i| self.conclusions.singleton(i)).collect(),
            RefutationPolicy::ComplementSet => vec![rest],
        };
        for target in &targets {
            self.check_argument(e, target)?;
        }
        Ok(targets
            .into_iter()
            .map(|target| self.insert(e.clone(), formula.clone(), target, Origin::RefutationExpansion).0)
            .collect())
    }

    pub fn refute(&mut self, formula: &str, conclusion: &str, policy: RefutationPolicy) -> Result<Vec<ArgumentId>> {
        let formula = Formula::parse(formula)?;
        let e = self.evidence.sentence(&formula)?;
        let p = self.conclusions.parse(conclusion)?;
        self.add_refutation_as(&e, formula, &p, policy)
    }

    /// Attaches a label to an argument. Labels are unique across the structure.
    pub fn add_label(&mut self, id: ArgumentId, label: &str) -> Result<()> {
        if let Some(other) = self.find_label(label) {
            if other == id {
                return Ok(());
            }
            return Err(Error::Declaration(format!("label `{label}` already names argument {other}")));
        }
        let arg = self.arguments.get_mut(id.0).ok_or_else(|| Error::Usage(format!("unknown argument id {id}")))?;
        arg.labels.push(label.to_string());
        Ok(())
    }

    /// Records a relation declaration. References are checked by [`validate`](Self::validate).
    pub fn declare(&mut self, declaration: RelationDeclaration) -> usize {
        self.declarations.push(declaration);
        self.declarations.len() - 1
    }

    /// Adds `<e' & e'', p>` for every pair of distinct base arguments with
    /// equal conclusions. Runs once over the base set; it is not iterated.
    /// Does nothing unless `conjunction_arguments` is set.
    pub fn generate_conjunction_arguments(&mut self) -> Vec<ArgumentId> {
        if !self.options.conjunction_arguments {
            return Vec::new();
        }
        let base: Vec<usize> = (0..self.arguments.len()).filter(|&i| self.arguments[i].is_base()).collect();
        let mut added = Vec::new();
        for (k, &i) in base.iter().enumerate() {
            for &j in &base[k + 1..] {
                let (a, b) = (&self.arguments[i], &self.arguments[j]);
                if a.conclusion != b.conclusion {
                    continue;
                }
                let presumption = a.presumption.conjoin_unchecked(&b.presumption);
                if !presumption.is_satisfiable() {
                    continue;
                }
                let formula = Formula::and(a.formula.clone(), b.formula.clone());
                let conclusion = a.conclusion.clone();
                let sources = (a.id, b.id);
                let (id, fresh) = self.insert(presumption, formula, conclusion, Origin::ConjunctionRule);
                let arg = &mut self.arguments[id.0];
                if !arg.conjoined_from.contains(&sources) {
                    arg.conjoined_from.push(sources);
                }
                if fresh {
                    added.push(id);
                }
            }
        }
        added
    }

    /// Adds `<e1 | e2, p1 | p2>` for argument pairs until a fixpoint or until
    /// `disjunction_closure_cap` new arguments exist. Does nothing unless
    /// `disjunction_closure` is set.
    pub fn apply_disjunction_closure(&mut self) -> DisjunctionClosureReport {
        let mut report = DisjunctionClosureReport::default();
        if !self.options.disjunction_closure {
            return report;
        }
        let cap = self.options.disjunction_closure_cap;
        // pairs (i, j) with j < done have already been combined
        let mut done = 0;
        'fixpoint: while done < self.arguments.len() {
            let end = self.arguments.len();
            for j in done..end {
                for i in 0..j {
                    let (a, b) = (&self.arguments[i], &self.arguments[j]);
                    let presumption = a.presumption.disjoin_unchecked(&b.presumption);
                    let conclusion = ConclusionSentence::clone(&a.conclusion)
                        .union(&b.conclusion)
                        .expect("arguments share the conclusion frame");
                    let exists =
                        self.arguments.iter().any(|x| x.presumption == presumption && x.conclusion == conclusion);
                    if exists {
                        continue;
                    }
                    if report.added.len() >= cap {
                        report.truncated = true;
                        break 'fixpoint;
                    }
                    let formula = Formula::or(a.formula.clone(), b.formula.clone());
                    let (id, _) = self.insert(presumption, formula, conclusion, Origin::DisjunctionClosure);
                    report.added.push(id);
                }
            }
            done = end;
        }
        self.closure_truncated |= report.truncated;
        report
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let opts = &self.options;
        if opts.conjunction_lifting && !opts.conjunction_arguments {
            report.error("option conjunction_lifting requires conjunction_arguments".into());
        }
        if opts.disjunction_closure_cap == 0 {
            report.error("option disjunction_closure_cap must be positive".into());
        }
        if self.closure_truncated {
            report.warning(format!(
                "disjunction closure stopped at the cap of {} generated arguments",
                opts.disjunction_closure_cap
            ));
        }
        for arg in &self.arguments {
            if !arg.presumption.is_satisfiable() {
                report.error(format!("argument {} has an unsatisfiable presumption", arg.name()));
            }
            if arg.conclusion.is_empty() {
                report.error(format!("argument {} supports the empty conclusion", arg.name()));
            } else if arg.conclusion.is_full() {
                report.warning(format!("argument {} {arg} supports every alternative and is vacuous", arg.name()));
            }
        }
        for (index, decl) in self.declarations.iter().enumerate() {
            match decl {
                RelationDeclaration::Arguments { lower, upper, .. } => {
                    for id in [lower, upper] {
                        if id.0 >= self.arguments.len() {
                            report.error(format!("relation {index} references unknown argument id {id}"));
                        }
                    }
                }
                RelationDeclaration::Presumptions { lower, lower_formula, upper, upper_formula, .. } => {
                    for (sentence, formula) in [(lower, lower_formula), (upper, upper_formula)] {
                        if *sentence.frame() != self.evidence {
                            report.error(format!("relation {index} uses a sentence from another frame"));
                        } else if !sentence.is_satisfiable() {
                            report.error(format!("relation {index}: presumption `{formula}` is unsatisfiable"));
                        } else if !self.arguments.iter().any(|a| a.presumption == *sentence) {
                            report.warning(format!("relation {index}: no argument has presumption `{formula}`"));
                        }
                    }
                }
            }
        }
        report
    }

    /// Runs the enabled generation passes, validates and freezes the structure.
    pub fn build(mut self) -> std::result::Result<EvidenceStructure, ValidationReport> {
        self.generate_conjunction_arguments();
        self.apply_disjunction_closure();
        let report = self.validate();
        if report.has_errors() {
            return Err(report);
        }
        Ok(EvidenceStructure {
            evidence: self.evidence,
            conclusions: self.conclusions,
            options: self.options,
            arguments: self.arguments,
            declarations: self.declarations,
            report,
        })
    }
}

fn find_label(arguments: &[Argument], label: &str) -> Option<ArgumentId> {
    arguments.iter().find(|a| a.labels.iter().any(|l| l == label)).map(|a| a.id)
}

/// A validated, immutable evidence structure.
#[derive(Debug, Clone)]
pub struct EvidenceStructure {
    evidence: EvidenceFrame,
    conclusions: ConclusionFrame,
    options: StructureOptions,
    arguments: Vec<Argument>,
    declarations: Vec<RelationDeclaration>,
    report: ValidationReport,
}

impl EvidenceStructure {
    pub fn evidence_frame(&self) -> &EvidenceFrame {
        &self.evidence
    }

    pub fn conclusion_frame(&self) -> &ConclusionFrame {
        &self.conclusions
    }

    pub fn options(&self) -> &StructureOptions {
        &self.options
    }

    pub fn arguments(&self) -> &[Argument] {
        &self.arguments
    }

    pub fn len(&self) -> usize {
        self.arguments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arguments.is_empty()
    }

    pub fn argument(&self, id: ArgumentId) -> Result<&Argument> {
        self.arguments.get(id.0).ok_or_else(|| Error::Usage(format!("unknown argument id {id}")))
    }

    pub fn declarations(&self) -> &[RelationDeclaration] {
        &self.declarations
    }

    /// Warnings collected while building.
    pub fn report(&self) -> &ValidationReport {
        &self.report
    }

    pub fn find_label(&self, label: &str) -> Option<ArgumentId> {
        find_label(&self.arguments, label)
    }

    /// Argument pairs whose disjunction argument `<e1 | e2, p1 | p2>` is
    /// missing. Empty iff the argument set is closed under disjunction.
    pub fn missing_disjunctions(&self) -> Vec<(ArgumentId, ArgumentId)> {
        let mut missing = Vec::new();
        for (j, b) in self.arguments.iter().enumerate() {
            for a in &self.arguments[..j] {
                let e = a.presumption.disjoin_unchecked(&b.presumption);
                let p = a.conclusion.union(&b.conclusion).expect("shared frame");
                if !self.arguments.iter().any(|x| x.presumption == e && x.conclusion == p) {
                    missing.push((a.id, b.id));
                }
            }
        }
        missing
    }
}
