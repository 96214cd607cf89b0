//! Shared test support: fixture loading, random structure specs and an
//! independent brute-force evaluator used as the oracle.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeMap;

use rand::Rng;
use res_core::decision::Verdict;
use res_core::structure::{RefutationPolicy, Relation, RelationDeclaration};
use res_core::{
    ConclusionFrame, EvidenceFrame, EvidenceSentence, EvidenceStructure, StructureBuilder, StructureOptions,
};

pub const EXAMPLE1: &str = include_str!("../../fixtures/example1.res");
pub const HOMINIDS: &str = include_str!("../../fixtures/hominids.res");
pub const HOMINIDS_LIFTING: &str = include_str!("../../fixtures/hominids-lifting.res");

pub fn fixture(text: &str) -> EvidenceStructure {
    res_core::frontend::parse_structure(text).unwrap().build(&[]).unwrap()
}

/// A structure description in terms of model-set and alternative bitmasks.
#[derive(Debug, Clone)]
pub struct Sketch {
    pub atoms: usize,
    pub alternatives: usize,
    pub entries: Vec<Entry>,
    pub declarations: Vec<Decl>,
    pub options: StructureOptions,
}

#[derive(Debug, Clone, Copy)]
pub enum Entry {
    Support { models: u32, conclusion: u32 },
    Refute { models: u32, conclusion: u32, policy: RefutationPolicy },
}

#[derive(Debug, Clone, Copy)]
pub enum Decl {
    /// Indices into `Sketch::entries`, which must both be supports.
    Args(usize, Relation, usize),
    Pres(u32, Relation, u32),
}

pub fn relation_name(r: Relation) -> &'static str {
    match r {
        Relation::Leq => "<=",
        Relation::Strict => "<",
        Relation::Equal => "~",
    }
}

impl Sketch {
    pub fn valuations(&self) -> usize {
        1 << self.atoms
    }

    pub fn frames(&self) -> (EvidenceFrame, ConclusionFrame) {
        let e = EvidenceFrame::new((1..=self.atoms).map(|i| format!("e{i}"))).unwrap();
        let p = ConclusionFrame::new((0..self.alternatives).map(|i| format!("A{i}"))).unwrap();
        (e, p)
    }

    pub fn build(&self) -> EvidenceStructure {
        let (e, p) = self.frames();
        let mut b = StructureBuilder::new(e.clone(), p.clone()).with_options(self.options);
        let mut ids = Vec::new();
        for entry in &self.entries {
            match *entry {
                Entry::Support { models, conclusion } => {
                    let id = b.add_support(&sentence(&e, models), &p.from_mask(conclusion).unwrap()).unwrap();
                    ids.push(Some(id));
                }
                Entry::Refute { models, conclusion, policy } => {
                    b.add_refutation(&sentence(&e, models), &p.from_mask(conclusion).unwrap(), policy).unwrap();
                    ids.push(None);
                }
            }
        }
        for d in &self.declarations {
            let decl = match *d {
                Decl::Args(l, r, u) => RelationDeclaration::arguments(ids[l].unwrap(), r, ids[u].unwrap()),
                Decl::Pres(l, r, u) => RelationDeclaration::presumptions(&sentence(&e, l), r, &sentence(&e, u)),
            };
            b.declare(decl);
        }
        b.build().unwrap()
    }

    /// The sketch in the declaration language.
    pub fn to_dsl(&self) -> String {
        let (e, p) = self.frames();
        let conclusion = |mask: u32| p.from_mask(mask).unwrap().to_string();
        let formula = |mask: u32| sentence(&e, mask).to_string();
        let mut out = String::from("structure generated\n");
        out.push_str(&format!("evidence atoms: {}\n", e.atoms().join(", ")));
        out.push_str(&format!("alternatives: {}\n", p.alternatives().join(", ")));
        let opts: Vec<String> = self.options.assignments().iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str(&format!("options: {}\n", opts.join(", ")));
        for (i, entry) in self.entries.iter().enumerate() {
            match *entry {
                Entry::Support { models, conclusion: c } => {
                    out.push_str(&format!("arg a{i}: {} => {}\n", formula(models), conclusion(c)))
                }
                Entry::Refute { models, conclusion: c, policy } => {
                    let policy = match policy {
                        RefutationPolicy::Singletons => "singletons",
                        RefutationPolicy::ComplementSet => "complement_set",
                    };
                    out.push_str(&format!("refute r{i}: {} => {} {policy}\n", formula(models), conclusion(c)))
                }
            }
        }
        for d in &self.declarations {
            match *d {
                Decl::Args(l, r, u) => out.push_str(&format!("rel: a{l} {} a{u}\n", relation_name(r))),
                Decl::Pres(l, r, u) => {
                    out.push_str(&format!("rel: pres({}) {} pres({})\n", formula(l), relation_name(r), formula(u)))
                }
            }
        }
        out
    }
}

pub fn sentence(frame: &EvidenceFrame, models: u32) -> EvidenceSentence {
    (0..frame.valuation_count())
        .filter(|i| models >> i & 1 == 1)
        .map(|i| frame.valuation(i).unwrap())
        .fold(frame.contradiction(), |acc, v| acc.disjoin(&v).unwrap())
}

pub fn models_of(s: &EvidenceSentence) -> u32 {
    s.models().fold(0, |acc, i| acc | 1 << i)
}

fn subset(a: u32, b: u32) -> bool {
    a & !b == 0
}

/// An argument as the oracle sees it.
#[derive(Debug, Clone, Default)]
pub struct OracleArg {
    pub models: u32,
    pub conclusion: u32,
    pub conjunction: bool,
    /// Presumption pairs of the arguments this one was conjoined from.
    pub components: Vec<(u32, u32)>,
}

/// Brute-force re-derivation of the argument set, the preorder and the
/// comparison verdicts, written directly from the definitions.
pub struct Oracle {
    pub args: Vec<OracleArg>,
    pub index: BTreeMap<(u32, u32), usize>,
    pub leq: Vec<Vec<bool>>,
    /// Declared strict argument pairs, as oracle indices with declaration index.
    pub strict_declared: Vec<(usize, usize, usize)>,
    pub full_valuations: u32,
}

impl Oracle {
    pub fn new(sketch: &Sketch) -> Oracle {
        let full_conclusion = (1u32 << sketch.alternatives) - 1;
        let mut o = Oracle {
            args: Vec::new(),
            index: BTreeMap::new(),
            leq: Vec::new(),
            strict_declared: Vec::new(),
            full_valuations: if sketch.valuations() == 32 { u32::MAX } else { (1 << sketch.valuations()) - 1 },
        };
        let mut entry_key = Vec::new();
        for entry in &sketch.entries {
            match *entry {
                Entry::Support { models, conclusion } => {
                    o.intern(models, conclusion);
                    entry_key.push(Some((models, conclusion)));
                }
                Entry::Refute { models, conclusion, policy } => {
                    let rest = full_conclusion & !conclusion;
                    match policy {
                        RefutationPolicy::Singletons => {
                            for a in 0..sketch.alternatives {
                                if rest >> a & 1 == 1 {
                                    o.intern(models, 1 << a);
                                }
                            }
                        }
                        RefutationPolicy::ComplementSet => {
                            o.intern(models, rest);
                        }
                    }
                    entry_key.push(None);
                }
            }
        }
        if sketch.options.conjunction_arguments {
            let base = o.args.clone();
            for i in 0..base.len() {
                for j in i + 1..base.len() {
                    let (a, b) = (&base[i], &base[j]);
                    let models = a.models & b.models;
                    if a.conclusion != b.conclusion || models == 0 {
                        continue;
                    }
                    let k = o.intern(models, a.conclusion);
                    o.args[k].conjunction = true;
                    if !o.args[k].components.contains(&(a.models, b.models)) {
                        o.args[k].components.push((a.models, b.models));
                    }
                }
            }
        }
        if sketch.options.disjunction_closure {
            loop {
                let before = o.args.len();
                let snapshot: Vec<(u32, u32)> = o.args.iter().map(|a| (a.models, a.conclusion)).collect();
                for &(m1, c1) in &snapshot {
                    for &(m2, c2) in &snapshot {
                        o.intern(m1 | m2, c1 | c2);
                    }
                }
                if o.args.len() == before {
                    break;
                }
            }
        }

        let n = o.args.len();
        let mut leq = vec![vec![false; n]; n];
        let with_models = |m: u32| -> Vec<usize> { (0..n).filter(|&i| o.args[i].models == m).collect() };
        let mut pres_pairs: Vec<(u32, u32)> = Vec::new();
        for (d, decl) in sketch.declarations.iter().enumerate() {
            match *decl {
                Decl::Args(l, r, u) => {
                    let (a, b) = (o.index[&entry_key[l].unwrap()], o.index[&entry_key[u].unwrap()]);
                    leq[a][b] = true;
                    match r {
                        Relation::Equal => leq[b][a] = true,
                        Relation::Strict => o.strict_declared.push((a, b, d)),
                        Relation::Leq => {}
                    }
                }
                Decl::Pres(l, r, u) => {
                    pres_pairs.push((l, u));
                    if r == Relation::Equal {
                        pres_pairs.push((u, l));
                    }
                    for &a in &with_models(l) {
                        for &b in &with_models(u) {
                            leq[a][b] = true;
                            if r == Relation::Equal {
                                leq[b][a] = true;
                            }
                            if r == Relation::Strict {
                                o.strict_declared.push((a, b, d));
                            }
                        }
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let (x, y) = (&o.args[a], &o.args[b]);
                let same = x.models == y.models;
                if a == b
                    || (same && subset(x.conclusion, y.conclusion))
                    || (subset(y.models, x.models) && !same)
                    || (same && sketch.options.same_presumption_equal)
                {
                    leq[a][b] = true;
                }
            }
        }
        if sketch.options.conjunction_lifting {
            let pres_leq = |x: u32, y: u32| -> bool {
                if x == y {
                    return true;
                }
                let mut reached = vec![x];
                let mut k = 0;
                while k < reached.len() {
                    let from = reached[k];
                    for &(l, u) in &pres_pairs {
                        if l == from && !reached.contains(&u) {
                            reached.push(u);
                        }
                    }
                    k += 1;
                }
                reached.contains(&y)
            };
            for a in 0..n {
                if !o.args[a].conjunction {
                    continue;
                }
                for b in 0..n {
                    let mut targets = o.args[b].components.clone();
                    targets.push((o.args[b].models, o.args[b].models));
                    let hit = o.args[a].components.iter().any(|&(x, y)| {
                        targets
                            .iter()
                            .any(|&(u, v)| (pres_leq(x, u) && pres_leq(y, v)) || (pres_leq(x, v) && pres_leq(y, u)))
                    });
                    if hit {
                        leq[a][b] = true;
                    }
                }
            }
        }
        // naive transitive closure: iterate until nothing changes
        loop {
            let mut changed = false;
            for a in 0..n {
                for b in 0..n {
                    if leq[a][b] {
                        continue;
                    }
                    if (0..n).any(|c| leq[a][c] && leq[c][b]) {
                        leq[a][b] = true;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        o.leq = leq;
        o
    }

    fn intern(&mut self, models: u32, conclusion: u32) -> usize {
        if let Some(&i) = self.index.get(&(models, conclusion)) {
            return i;
        }
        self.args.push(OracleArg { models, conclusion, ..Default::default() });
        self.index.insert((models, conclusion), self.args.len() - 1);
        self.args.len() - 1
    }

    pub fn supports(&self, given: u32, p: u32) -> Vec<usize> {
        (0..self.args.len())
            .filter(|&i| subset(given, self.args[i].models) && subset(self.args[i].conclusion, p))
            .collect()
    }

    pub fn le(&self, given: u32, p: u32, q: u32) -> bool {
        let (sp, sq) = (self.supports(given, p), self.supports(given, q));
        if sp.is_empty() {
            return !sq.is_empty();
        }
        sp.iter().all(|&a| sq.iter().any(|&b| self.leq[a][b]))
    }

    pub fn verdict(&self, given: u32, p: u32, q: u32) -> Verdict {
        match (self.le(given, p, q), self.le(given, q, p)) {
            (true, true) => Verdict::Equal,
            (true, false) => Verdict::StrictlyLess,
            (false, true) => Verdict::StrictlyGreater,
            (false, false) => Verdict::Incomparable,
        }
    }

    /// Oracle index of an engine argument.
    pub fn locate(&self, s: &EvidenceStructure, id: usize) -> usize {
        let a = &s.arguments()[id];
        self.index[&(models_of(&a.presumption), a.conclusion.mask())]
    }
}

fn random_models<R: Rng>(rng: &mut R, valuations: usize) -> u32 {
    loop {
        // bias toward small model sets so presumptions are informative
        let m: u32 = (0..valuations).filter(|_| rng.gen_bool(0.4)).fold(0, |acc, i| acc | 1 << i);
        if m != 0 {
            return m;
        }
    }
}

fn random_relation<R: Rng>(rng: &mut R) -> Relation {
    [Relation::Leq, Relation::Strict, Relation::Equal][rng.gen_range(0..3)]
}

/// Random sketch with at most `max_atoms` atoms and `max_args` entries.
pub fn random_sketch<R: Rng>(rng: &mut R, max_atoms: usize, max_args: usize, allow_disjunction: bool) -> Sketch {
    let atoms = rng.gen_range(1..=max_atoms);
    let alternatives = rng.gen_range(2..=4);
    let valuations = 1 << atoms;
    let full = (1u32 << alternatives) - 1;
    let count = rng.gen_range(1..=max_args);
    let mut entries = Vec::new();
    for _ in 0..count {
        let models = random_models(rng, valuations);
        if rng.gen_bool(0.2) {
            let conclusion = rng.gen_range(1..full);
            let policy = if rng.gen_bool(0.5) { RefutationPolicy::Singletons } else { RefutationPolicy::ComplementSet };
            entries.push(Entry::Refute { models, conclusion, policy });
        } else {
            let conclusion = rng.gen_range(1..=full);
            entries.push(Entry::Support { models, conclusion });
        }
    }
    let supports: Vec<usize> = (0..entries.len()).filter(|&i| matches!(entries[i], Entry::Support { .. })).collect();
    let mut declarations = Vec::new();
    for _ in 0..rng.gen_range(0..=4) {
        if !supports.is_empty() && rng.gen_bool(0.5) {
            let l = supports[rng.gen_range(0..supports.len())];
            let u = supports[rng.gen_range(0..supports.len())];
            declarations.push(Decl::Args(l, random_relation(rng), u));
        } else {
            let pick = |rng: &mut R| match entries[rng.gen_range(0..entries.len())] {
                Entry::Support { models, .. } | Entry::Refute { models, .. } => models,
            };
            let (l, u) = (pick(rng), pick(rng));
            declarations.push(Decl::Pres(l, random_relation(rng), u));
        }
    }
    let conjunction_arguments = rng.gen_bool(0.5);
    let options = StructureOptions {
        same_presumption_equal: rng.gen_bool(0.7),
        conjunction_arguments,
        conjunction_lifting: conjunction_arguments && rng.gen_bool(0.5),
        disjunction_closure: allow_disjunction && rng.gen_bool(0.15),
        ..StructureOptions::default()
    };
    Sketch { atoms, alternatives, entries, declarations, options }
}

pub fn random_given<R: Rng>(rng: &mut R, valuations: usize) -> u32 {
    random_models(rng, valuations)
}
