//! The argument-strength preorder.
//!
//! `leq(a, b)` reads "argument `a` is no more believable than argument `b`".
//! The relation is seeded from declarations and the structural rules below,
//! then closed under reflexivity and transitivity. Strictness is derived
//! (`leq ∧ ¬geq`); declared strict pairs are checked afterwards by
//! [`OrderClosure::check_consistency`].
//!
//! Seed sources, in the order they are applied:
//!
//! 1. argument-level declarations;
//! 2. presumption-level declarations, expanded to every pair of arguments
//!    whose presumptions are equivalent to the declared sentences;
//! 3. equal presumptions with the lower conclusion implying the upper one;
//! 4. the upper presumption strictly implying the lower one;
//! 5. equal presumptions in both directions (`same_presumption_equal`);
//! 6. conjunction lifting (`conjunction_lifting`): `<x & y, p> ⪯ <x' & y', q>`
//!    when `x ⪯ x'` and `y ⪯ y'` in the declared presumption order, where a
//!    plain argument `<x', q>` counts as `<x' & x', q>`.

use std::collections::VecDeque;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::semantics::EvidenceSentence;
use crate::structure::{ArgumentId, EvidenceStructure, Origin, Relation, RelationDeclaration};

/// Why a pair was seeded into the relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "source", content = "declaration", rename_all = "kebab-case")]
pub enum Provenance {
    /// Argument-level declaration, by index.
    Declared(usize),
    /// Presumption-level declaration, by index.
    PresumptionDeclared(usize),
    WeakerConclusion,
    MoreSpecificPresumption,
    SamePresumption,
    ConjunctionLifting,
}

impl Provenance {
    pub fn describe(&self, structure: &EvidenceStructure) -> String {
        match *self {
            Provenance::Declared(i) | Provenance::PresumptionDeclared(i) => {
                format!("declared {}", describe_declaration(structure, i))
            }
            Provenance::WeakerConclusion => "same presumption, weaker conclusion".into(),
            Provenance::MoreSpecificPresumption => "more specific presumption".into(),
            Provenance::SamePresumption => "same presumption supports equally".into(),
            Provenance::ConjunctionLifting => "conjunction lifting".into(),
        }
    }
}

pub fn describe_declaration(structure: &EvidenceStructure, index: usize) -> String {
    match structure.declarations().get(index) {
        Some(RelationDeclaration::Arguments { lower, relation, upper }) => {
            let name = |id: &ArgumentId| structure.argument(*id).map_or_else(|_| id.to_string(), |a| a.name());
            format!("{} {} {}", name(lower), relation.symbol(), name(upper))
        }
        Some(RelationDeclaration::Presumptions { lower_formula, relation, upper_formula, .. }) => {
            format!("pres({lower_formula}) {} pres({upper_formula})", relation.symbol())
        }
        None => format!("relation {index}"),
    }
}

/// One seeded pair `lower ⪯ upper`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Step {
    pub lower: ArgumentId,
    pub upper: ArgumentId,
    pub provenance: Provenance,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <= {}", self.lower, self.upper)
    }
}

#[derive(Debug, Clone)]
pub struct OrderClosure {
    len: usize,
    leq: Vec<FixedBitSet>,
    /// Seeded successors of each argument, first provenance per pair.
    seeds: Vec<Vec<(usize, Provenance)>>,
}

struct Seeder {
    seeded: Vec<FixedBitSet>,
    seeds: Vec<Vec<(usize, Provenance)>>,
}

impl Seeder {
    fn add(&mut self, lower: usize, upper: usize, provenance: Provenance) {
        if lower == upper || self.seeded[lower].put(upper) {
            return;
        }
        self.seeds[lower].push((upper, provenance));
    }
}

/// Indices of arguments grouped by equivalent presumption, in id order.
fn presumption_groups(structure: &EvidenceStructure) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, arg) in structure.arguments().iter().enumerate() {
        match groups.iter_mut().find(|g| structure.arguments()[g[0]].presumption == arg.presumption) {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    groups
}

/// Reflexive-transitive closure of the declared presumption-level relation,
/// over the distinct sentences mentioned by those declarations.
struct PresumptionOrder {
    sentences: Vec<EvidenceSentence>,
    leq: Vec<FixedBitSet>,
}

impl PresumptionOrder {
    fn new(structure: &EvidenceStructure) -> Self {
        let mut sentences: Vec<EvidenceSentence> = Vec::new();
        let mut edges = Vec::new();
        let index_of = |s: &EvidenceSentence, sentences: &mut Vec<EvidenceSentence>| {
            sentences.iter().position(|x| x == s).unwrap_or_else(|| {
                sentences.push(s.clone());
                sentences.len() - 1
            })
        };
        for decl in structure.declarations() {
            if let RelationDeclaration::Presumptions { lower, relation, upper, .. } = decl {
                let (l, u) = (index_of(lower, &mut sentences), index_of(upper, &mut sentences));
                edges.push((l, u));
                if *relation == Relation::Equal {
                    edges.push((u, l));
                }
            }
        }
        let n = sentences.len();
        let mut leq = vec![FixedBitSet::with_capacity(n); n];
        for (i, row) in leq.iter_mut().enumerate() {
            row.insert(i);
        }
        for (l, u) in edges {
            leq[l].insert(u);
        }
        warshall(&mut leq);
        PresumptionOrder { sentences, leq }
    }

    fn leq(&self, x: &EvidenceSentence, y: &EvidenceSentence) -> bool {
        if x == y {
            return true;
        }
        let find = |s: &EvidenceSentence| self.sentences.iter().position(|t| t == s);
        match (find(x), find(y)) {
            (Some(i), Some(j)) => self.leq[i].contains(j),
            _ => false,
        }
    }
}

fn warshall(rows: &mut [FixedBitSet]) {
    for k in 0..rows.len() {
        let pivot = rows[k].clone();
        for row in rows.iter_mut() {
            if row.contains(k) {
                row.union_with(&pivot);
            }
        }
    }
}

impl OrderClosure {
    pub fn build(structure: &EvidenceStructure) -> OrderClosure {
        let n = structure.len();
        let args = structure.arguments();
        let mut seeder = Seeder { seeded: vec![FixedBitSet::with_capacity(n); n], seeds: vec![Vec::new(); n] };
        let groups = presumption_groups(structure);
        let group_of = |s: &EvidenceSentence| -> &[usize] {
            groups.iter().find(|g| args[g[0]].presumption == *s).map_or(&[][..], |g| g.as_slice())
        };

        for (index, decl) in structure.declarations().iter().enumerate() {
            match decl {
                RelationDeclaration::Arguments { lower, relation, upper } => {
                    if lower.0 >= n || upper.0 >= n {
                        continue;
                    }
                    seeder.add(lower.0, upper.0, Provenance::Declared(index));
                    if *relation == Relation::Equal {
                        seeder.add(upper.0, lower.0, Provenance::Declared(index));
                    }
                }
                RelationDeclaration::Presumptions { lower, relation, upper, .. } => {
                    for &a in group_of(lower) {
                        for &b in group_of(upper) {
                            seeder.add(a, b, Provenance::PresumptionDeclared(index));
                            if *relation == Relation::Equal {
                                seeder.add(b, a, Provenance::PresumptionDeclared(index));
                            }
                        }
                    }
                }
            }
        }

        for group in &groups {
            for &a in group {
                for &b in group {
                    if a != b && args[a].conclusion.within(&args[b].conclusion) {
                        seeder.add(a, b, Provenance::WeakerConclusion);
                    }
                }
            }
        }

        for (a, lower) in args.iter().enumerate() {
            for (b, upper) in args.iter().enumerate() {
                if upper.presumption.strictly_entails(&lower.presumption) {
                    seeder.add(a, b, Provenance::MoreSpecificPresumption);
                }
            }
        }

        if structure.options().same_presumption_equal {
            for group in &groups {
                for &a in group {
                    for &b in group {
                        seeder.add(a, b, Provenance::SamePresumption);
                    }
                }
            }
        }

        if structure.options().conjunction_lifting {
            let order = PresumptionOrder::new(structure);
            let components = |i: usize| -> Vec<(&EvidenceSentence, &EvidenceSentence)> {
                args[i].conjoined_from.iter().map(|(x, y)| (&args[x.0].presumption, &args[y.0].presumption)).collect()
            };
            for (a, source) in args.iter().enumerate() {
                if !source.has_origin(Origin::ConjunctionRule) {
                    continue;
                }
                let from = components(a);
                for (b, target) in args.iter().enumerate() {
                    let mut to = components(b);
                    to.push((&target.presumption, &target.presumption));
                    let lifted = from.iter().any(|&(x, y)| {
                        to.iter()
                            .any(|&(u, v)| (order.leq(x, u) && order.leq(y, v)) || (order.leq(x, v) && order.leq(y, u)))
                    });
                    if lifted {
                        seeder.add(a, b, Provenance::ConjunctionLifting);
                    }
                }
            }
        }

        let mut leq = seeder.seeded.clone();
        for (i, row) in leq.iter_mut().enumerate() {
            row.insert(i);
        }
        warshall(&mut leq);
        OrderClosure { len: n, leq, seeds: seeder.seeds }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn check(&self, id: ArgumentId) -> Result<usize> {
        if id.0 < self.len {
            Ok(id.0)
        } else {
            Err(Error::Usage(format!("unknown argument id {id}")))
        }
    }

    /// Unchecked read of the closed relation.
    pub(crate) fn holds(&self, a: usize, b: usize) -> bool {
        self.leq[a].contains(b)
    }

    pub fn leq(&self, a: ArgumentId, b: ArgumentId) -> Result<bool> {
        Ok(self.holds(self.check(a)?, self.check(b)?))
    }

    pub fn strictly_less(&self, a: ArgumentId, b: ArgumentId) -> Result<bool> {
        Ok(self.leq(a, b)? && !self.leq(b, a)?)
    }

    pub fn equivalent(&self, a: ArgumentId, b: ArgumentId) -> Result<bool> {
        Ok(self.leq(a, b)? && self.leq(b, a)?)
    }

    pub fn incomparable(&self, a: ArgumentId, b: ArgumentId) -> Result<bool> {
        Ok(!self.leq(a, b)? && !self.leq(b, a)?)
    }

    /// Seeded pairs in lower-id order.
    pub fn seeds(&self) -> impl Iterator<Item = Step> + '_ {
        self.seeds.iter().enumerate().flat_map(|(lower, ups)| {
            ups.iter().map(move |&(upper, provenance)| Step {
                lower: ArgumentId(lower),
                upper: ArgumentId(upper),
                provenance,
            })
        })
    }

    /// A shortest sequence of seeded pairs composing to `a ⪯ b`. Empty when
    /// `a == b`; `None` when the pair is not in the relation.
    pub fn chain(&self, a: ArgumentId, b: ArgumentId) -> Result<Option<Vec<Step>>> {
        let (start, goal) = (self.check(a)?, self.check(b)?);
        if start == goal {
            return Ok(Some(Vec::new()));
        }
        if !self.holds(start, goal) {
            return Ok(None);
        }
        let mut parent: Vec<Option<(usize, Provenance)>> = vec![None; self.len];
        let mut seen = FixedBitSet::with_capacity(self.len);
        seen.insert(start);
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            if x == goal {
                break;
            }
            for &(y, provenance) in &self.seeds[x] {
                if !seen.put(y) {
                    parent[y] = Some((x, provenance));
                    queue.push_back(y);
                }
            }
        }
        let mut steps = Vec::new();
        let mut at = goal;
        while at != start {
            let (prev, provenance) = parent[at].expect("closure pairs are reachable through seeds");
            steps.push(Step { lower: ArgumentId(prev), upper: ArgumentId(at), provenance });
            at = prev;
        }
        steps.reverse();
        Ok(Some(steps))
    }

    /// Checks that every declared strict pair stayed strict and every
    /// declared equality holds in both directions.
    pub fn check_consistency(&self, structure: &EvidenceStructure) -> ConsistencyReport {
        let groups = presumption_groups(structure);
        let args = structure.arguments();
        let group_of = |s: &EvidenceSentence| -> Vec<usize> {
            groups.iter().find(|g| args[g[0]].presumption == *s).cloned().unwrap_or_default()
        };
        let mut violations = Vec::new();
        for (index, decl) in structure.declarations().iter().enumerate() {
            let (pairs, relation, provenance) = match decl {
                RelationDeclaration::Arguments { lower, relation, upper } => {
                    if lower.0 >= self.len || upper.0 >= self.len {
                        continue;
                    }
                    (vec![(lower.0, upper.0)], *relation, Provenance::Declared(index))
                }
                RelationDeclaration::Presumptions { lower, relation, upper, .. } => {
                    let (ls, us) = (group_of(lower), group_of(upper));
                    let pairs = ls.iter().flat_map(|&a| us.iter().map(move |&b| (a, b))).collect();
                    (pairs, *relation, Provenance::PresumptionDeclared(index))
                }
            };
            for (a, b) in pairs {
                let (forward, backward) = (self.holds(a, b), self.holds(b, a));
                let broken = match relation {
                    Relation::Strict => backward,
                    Relation::Equal => !(forward && backward),
                    Relation::Leq => !forward,
                };
                if !broken {
                    continue;
                }
                let (lower, upper) = (ArgumentId(a), ArgumentId(b));
                let mut chain = vec![Step { lower, upper, provenance }];
                if let Ok(Some(back)) = self.chain(upper, lower) {
                    chain.extend(back);
                }
                violations.push(Violation { declaration: index, lower, upper, relation, chain });
            }
        }
        ConsistencyReport { violations }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub declaration: usize,
    pub lower: ArgumentId,
    pub upper: ArgumentId,
    pub relation: Relation,
    /// The declared step followed by the seeded steps leading back from
    /// `upper` to `lower`.
    pub chain: Vec<Step>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ConsistencyReport {
    pub violations: Vec<Violation>,
}

impl ConsistencyReport {
    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{ConclusionFrame, EvidenceFrame};
    use crate::structure::{RefutationPolicy, StructureBuilder};

    fn example1() -> StructureBuilder {
        let e = EvidenceFrame::new(["e1", "e2"]).unwrap();
        let p = ConclusionFrame::new(["Al1", "Al2", "Al3"]).unwrap();
        let mut b = StructureBuilder::new(e, p);
        b.support("e1", "{Al1}").unwrap();
        b.support("e1", "{Al2}").unwrap();
        b.support("!e2", "{Al1}").unwrap();
        b.refute("e2", "{Al1}", RefutationPolicy::Singletons).unwrap();
        b
    }

    fn hominids(lifting: bool) -> EvidenceStructure {
        let e = EvidenceFrame::new(["e1", "e2", "e12", "e23", "e13"]).unwrap();
        let p = ConclusionFrame::new(["B1", "B2", "B3", "B4", "B5"]).unwrap();
        let mut b = StructureBuilder::new(e.clone(), p);
        b.options_mut().conjunction_arguments = true;
        b.options_mut().conjunction_lifting = lifting;
        for (e, ps) in [
            ("e1", &["B1"][..]),
            ("e2", &["B2", "B5"]),
            ("e12", &["B3", "B4", "B5"]),
            ("e23", &["B2", "B4", "B5"]),
            ("e13", &["B2", "B3", "B5"]),
        ] {
            for p in ps {
                b.support(e, p).unwrap();
            }
        }
        for (l, u) in [("e12", "e1"), ("e1", "e2 & e13"), ("e12", "e13"), ("e23", "e13")] {
            let (l, u) = (e.parse(l).unwrap(), e.parse(u).unwrap());
            b.declare(RelationDeclaration::presumptions(&l, Relation::Strict, &u));
        }
        b.build().unwrap()
    }

    fn find(s: &EvidenceStructure, text: &str) -> ArgumentId {
        s.arguments().iter().find(|a| a.to_string() == text).unwrap_or_else(|| panic!("{text}")).id
    }

    #[test]
    fn constraint_three_with_disjunction_closure() {
        let mut b = example1();
        b.options_mut().disjunction_closure = true;
        let s = b.build().unwrap();
        let c = OrderClosure::build(&s);
        let e1 = s.evidence_frame().parse("e1").unwrap();
        let wide = s.conclusion_frame().parse("{Al1, Al2}").unwrap();
        let upper = s.arguments().iter().find(|a| a.presumption == e1 && a.conclusion == wide).unwrap().id;
        assert!(c.leq(ArgumentId(0), upper).unwrap());
    }

    #[test]
    fn example1_relations() {
        let s = example1().build().unwrap();
        let c = OrderClosure::build(&s);
        assert!(c.equivalent(ArgumentId(0), ArgumentId(1)).unwrap());
        assert!(c.incomparable(ArgumentId(0), ArgumentId(3)).unwrap());
        assert!(c.incomparable(ArgumentId(2), ArgumentId(3)).unwrap());
        assert!(c.leq(ArgumentId(7), ArgumentId(0)).is_err());
    }

    #[test]
    fn smallest_relation_without_same_presumption_rule() {
        let mut b = example1();
        b.options_mut().same_presumption_equal = false;
        let s = b.build().unwrap();
        let c = OrderClosure::build(&s);
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(c.holds(i, j), i == j, "({i}, {j})");
            }
        }
    }

    #[test]
    fn hominid_presumption_dominance() {
        for lifting in [false, true] {
            let s = hominids(lifting);
            let c = OrderClosure::build(&s);
            let e12 = s.evidence_frame().parse("e12").unwrap();
            let e13 = s.evidence_frame().parse("e13").unwrap();
            for a in s.arguments().iter().filter(|a| a.presumption == e12) {
                for b in s.arguments().iter().filter(|b| b.presumption == e13) {
                    assert!(c.strictly_less(a.id, b.id).unwrap());
                }
            }
            let low = find(&s, "<e13, {B2}>");
            let high = find(&s, "<e2 & e13, {B5}>");
            assert!(c.leq(low, high).unwrap());
            let chain = c.chain(low, high).unwrap().unwrap();
            assert_eq!(chain.len(), 1);
            assert_eq!(chain[0].provenance, Provenance::MoreSpecificPresumption);
            assert!(c.strictly_less(find(&s, "<e1, {B1}>"), high).unwrap());
            assert!(c.check_consistency(&s).is_consistent());
        }
    }

    #[test]
    fn lifting_equates_conjunction_with_stronger_component() {
        let s = hominids(true);
        let c = OrderClosure::build(&s);
        let conj = find(&s, "<e12 & e13, {B3}>");
        let single = find(&s, "<e13, {B2}>");
        assert!(c.equivalent(conj, single).unwrap());
        let off = hominids(false);
        let c = OrderClosure::build(&off);
        assert!(!c.leq(find(&off, "<e12 & e13, {B3}>"), find(&off, "<e13, {B2}>")).unwrap());
    }

    #[test]
    fn direct_contradiction_is_reported_with_chain() {
        let mut b = example1();
        b.declare(RelationDeclaration::arguments(ArgumentId(2), Relation::Strict, ArgumentId(3)));
        b.declare(RelationDeclaration::arguments(ArgumentId(3), Relation::Leq, ArgumentId(2)));
        let s = b.build().unwrap();
        let report = OrderClosure::build(&s).check_consistency(&s);
        assert_eq!(report.violations.len(), 1);
        let v = &report.violations[0];
        assert_eq!(v.declaration, 0);
        assert_eq!(v.chain.len(), 2);
        assert_eq!(v.chain[1].provenance, Provenance::Declared(1));
    }

    #[test]
    fn opposite_presumption_declarations_conflict_both_ways() {
        let mut b = example1();
        let f = b.evidence_frame().clone();
        let (x, y) = (f.parse("e1").unwrap(), f.parse("!e2").unwrap());
        b.declare(RelationDeclaration::presumptions(&x, Relation::Strict, &y));
        b.declare(RelationDeclaration::presumptions(&y, Relation::Strict, &x));
        let s = b.build().unwrap();
        let report = OrderClosure::build(&s).check_consistency(&s);
        let decls: Vec<usize> = report.violations.iter().map(|v| v.declaration).collect();
        assert!(decls.contains(&0) && decls.contains(&1));
    }

    #[test]
    fn specificity_holds_regardless_of_conclusion() {
        let e = EvidenceFrame::new(["a", "b"]).unwrap();
        let p = ConclusionFrame::new(["X", "Y"]).unwrap();
        let mut b = StructureBuilder::new(e, p);
        let weak = b.support("a", "{X}").unwrap();
        let strong = b.support("a & b", "{Y}").unwrap();
        let s = b.build().unwrap();
        let c = OrderClosure::build(&s);
        assert!(c.strictly_less(weak, strong).unwrap());
    }
}
