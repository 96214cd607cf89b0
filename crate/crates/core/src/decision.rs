//! Comparing conclusions under observed evidence.
//!
//! `p1 ≤ p2` holds when every triggered argument for (a sentence implying)
//! `p1` is matched by a triggered argument for `p2` that is at least as
//! strong. When nothing supports `p1`, `p1 ≤ p2` holds exactly when something
//! supports `p2`; in particular an unsupported sentence is not `≤` itself.

use std::fmt;

use serde::Serialize;

use crate::conditioning::ConditionedStructure;
use crate::error::{Error, Result};
use crate::order::Step;
use crate::semantics::ConclusionSentence;
use crate::structure::ArgumentId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    StrictlyLess,
    StrictlyGreater,
    Equal,
    Incomparable,
}

impl Verdict {
    fn from_directions(forward: bool, backward: bool) -> Verdict {
        match (forward, backward) {
            (true, true) => Verdict::Equal,
            (true, false) => Verdict::StrictlyLess,
            (false, true) => Verdict::StrictlyGreater,
            (false, false) => Verdict::Incomparable,
        }
    }

    pub fn mirror(self) -> Verdict {
        match self {
            Verdict::StrictlyLess => Verdict::StrictlyGreater,
            Verdict::StrictlyGreater => Verdict::StrictlyLess,
            v => v,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Verdict::StrictlyLess => "<",
            Verdict::StrictlyGreater => ">",
            Verdict::Equal => "=",
            Verdict::Incomparable => "?",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::StrictlyLess => "less believable",
            Verdict::StrictlyGreater => "more believable",
            Verdict::Equal => "as believable",
            Verdict::Incomparable => "not comparable",
        })
    }
}

fn check_frame(cond: &ConditionedStructure<'_>, p: &ConclusionSentence) -> Result<()> {
    if p.frame() == cond.structure().conclusion_frame() {
        Ok(())
    } else {
        Err(Error::Usage(format!("{p} is not over this structure's alternatives")))
    }
}

/// Triggered arguments whose conclusion implies `p`.
pub fn supports_of(cond: &ConditionedStructure<'_>, p: &ConclusionSentence) -> Result<Vec<ArgumentId>> {
    check_frame(cond, p)?;
    Ok(cond.supports_of(p))
}

fn leq_supports(cond: &ConditionedStructure<'_>, lower: &[ArgumentId], upper: &[ArgumentId]) -> bool {
    if lower.is_empty() {
        return !upper.is_empty();
    }
    lower.iter().all(|&a| upper.iter().any(|&b| cond.leq(a, b)))
}

/// `p1 ≤ p2`: `p1` is no more believable than `p2`.
pub fn leq_conclusions(
    cond: &ConditionedStructure<'_>,
    p1: &ConclusionSentence,
    p2: &ConclusionSentence,
) -> Result<bool> {
    Ok(leq_supports(cond, &supports_of(cond, p1)?, &supports_of(cond, p2)?))
}

/// Classifies `p1` relative to `p2`.
pub fn compare(cond: &ConditionedStructure<'_>, p1: &ConclusionSentence, p2: &ConclusionSentence) -> Result<Verdict> {
    let (s1, s2) = (supports_of(cond, p1)?, supports_of(cond, p2)?);
    Ok(Verdict::from_directions(leq_supports(cond, &s1, &s2), leq_supports(cond, &s2, &s1)))
}

/// `p` is plausible when its complement is strictly less believable.
/// Rejects the empty and the full sentence.
pub fn is_plausible(cond: &ConditionedStructure<'_>, p: &ConclusionSentence) -> Result<bool> {
    check_frame(cond, p)?;
    if p.is_empty() || p.is_full() {
        return Err(Error::Usage(format!("{p} has no genuine rival; plausibility needs a proper subset")));
    }
    Ok(compare(cond, &p.complement(), p)? == Verdict::StrictlyLess)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ranking {
    pub candidates: Vec<ConclusionSentence>,
    /// `verdicts[i][j]` classifies candidate `i` relative to candidate `j`.
    pub verdicts: Vec<Vec<Verdict>>,
    /// Candidates with nothing strictly more believable, in candidate order.
    pub maximal: Vec<usize>,
    /// Iterated maximal layers: each layer is maximal once the earlier
    /// layers are removed.
    pub strata: Vec<Vec<usize>>,
}

impl Ranking {
    pub fn unique_maximal(&self) -> Option<&ConclusionSentence> {
        match self.maximal.as_slice() {
            [i] => Some(&self.candidates[*i]),
            _ => None,
        }
    }
}

/// Pairwise verdicts over `candidates` and their maximal elements. Ties and
/// incomparabilities are reported as they are; no total order is imposed.
pub fn rank(cond: &ConditionedStructure<'_>, candidates: &[ConclusionSentence]) -> Result<Ranking> {
    if candidates.is_empty() {
        return Err(Error::Usage("rank needs at least one candidate".into()));
    }
    let supports = candidates.iter().map(|p| supports_of(cond, p)).collect::<Result<Vec<_>>>()?;
    let n = candidates.len();
    let mut leq = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            leq[i][j] = leq_supports(cond, &supports[i], &supports[j]);
        }
    }
    let verdicts: Vec<Vec<Verdict>> =
        (0..n).map(|i| (0..n).map(|j| Verdict::from_directions(leq[i][j], leq[j][i])).collect()).collect();
    let maximal = (0..n).filter(|&i| !verdicts[i].contains(&Verdict::StrictlyLess)).collect();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut strata = Vec::new();
    while !remaining.is_empty() {
        let layer: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| !remaining.iter().any(|&j| verdicts[i][j] == Verdict::StrictlyLess))
            .collect();
        remaining.retain(|i| !layer.contains(i));
        strata.push(layer);
    }
    Ok(Ranking { candidates: candidates.to_vec(), verdicts, maximal, strata })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HasseNode {
    /// Mutually equally believable candidates.
    pub members: Vec<ConclusionSentence>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HasseDiagram {
    pub nodes: Vec<HasseNode>,
    /// Covering pairs `(lower, upper)` of node indices.
    pub edges: Vec<(usize, usize)>,
}

impl HasseDiagram {
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph believability {\n  rankdir=BT;\n  node [shape=box];\n");
        for (i, node) in self.nodes.iter().enumerate() {
            let label: Vec<String> = node.members.iter().map(|p| p.to_string()).collect();
            out.push_str(&format!("  n{i} [label=\"{}\"];\n", label.join(" = ")));
        }
        for (lower, upper) in &self.edges {
            out.push_str(&format!("  n{lower} -> n{upper};\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// Covering diagram of the strict believability order over the classes of
/// equally believable candidates. Duplicate candidates are dropped.
pub fn hasse(cond: &ConditionedStructure<'_>, candidates: &[ConclusionSentence]) -> Result<HasseDiagram> {
    let mut distinct: Vec<ConclusionSentence> = Vec::new();
    for p in candidates {
        if !distinct.contains(p) {
            distinct.push(p.clone());
        }
    }
    let ranking = rank(cond, &distinct)?;
    let n = distinct.len();
    let mut class_of: Vec<Option<usize>> = vec![None; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if class_of[i].is_some() {
            continue;
        }
        let class: Vec<usize> = (i..n).filter(|&j| j == i || ranking.verdicts[i][j] == Verdict::Equal).collect();
        for &j in &class {
            class_of[j] = Some(classes.len());
        }
        classes.push(class);
    }
    let less = |a: usize, b: usize| ranking.verdicts[classes[a][0]][classes[b][0]] == Verdict::StrictlyLess;
    let k = classes.len();
    let mut edges = Vec::new();
    for a in 0..k {
        for b in 0..k {
            if less(a, b) && !(0..k).any(|c| less(a, c) && less(c, b)) {
                edges.push((a, b));
            }
        }
    }
    let nodes = classes
        .into_iter()
        .map(|c| HasseNode { members: c.into_iter().map(|i| distinct[i].clone()).collect() })
        .collect();
    Ok(HasseDiagram { nodes, edges })
}

/// A support and the rival support matching it, if any.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Match {
    pub support: ArgumentId,
    pub dominator: ArgumentId,
    /// Seeded steps composing `support ⪯ dominator`; empty for a self-match.
    pub provenance: Vec<Step>,
}

/// The evaluation of one direction `lower ≤ upper`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DirectionTrace {
    pub holds: bool,
    pub supports: Vec<ArgumentId>,
    pub rival_supports: Vec<ArgumentId>,
    pub matches: Vec<Match>,
    pub unmatched: Vec<ArgumentId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExplanationTrace {
    pub first: ConclusionSentence,
    pub second: ConclusionSentence,
    /// `first` relative to `second`.
    pub verdict: Verdict,
    /// `first ≤ second`.
    pub forward: DirectionTrace,
    /// `second ≤ first`.
    pub backward: DirectionTrace,
}

fn trace_direction(cond: &ConditionedStructure<'_>, lower: &[ArgumentId], upper: &[ArgumentId]) -> DirectionTrace {
    let mut matches = Vec::new();
    let mut unmatched = Vec::new();
    for &a in lower {
        // prefer the most direct justification, then the lowest id
        let best = upper
            .iter()
            .filter(|&&b| cond.leq(a, b))
            .filter_map(|&b| {
                let chain = cond.closure().chain(a, b).ok().flatten()?;
                Some((chain.len(), b, chain))
            })
            .min_by_key(|(len, b, _)| (*len, *b));
        match best {
            Some((_, dominator, provenance)) => matches.push(Match { support: a, dominator, provenance }),
            None => unmatched.push(a),
        }
    }
    DirectionTrace {
        holds: leq_supports(cond, lower, upper),
        supports: lower.to_vec(),
        rival_supports: upper.to_vec(),
        matches,
        unmatched,
    }
}

/// Lists, for both directions, how each support is matched by a rival
/// support and through which seeded steps, or that it is unmatched.
pub fn explain(
    cond: &ConditionedStructure<'_>,
    p1: &ConclusionSentence,
    p2: &ConclusionSentence,
) -> Result<ExplanationTrace> {
    let (s1, s2) = (supports_of(cond, p1)?, supports_of(cond, p2)?);
    let forward = trace_direction(cond, &s1, &s2);
    let backward = trace_direction(cond, &s2, &s1);
    Ok(ExplanationTrace {
        first: p1.clone(),
        second: p2.clone(),
        verdict: Verdict::from_directions(forward.holds, backward.holds),
        forward,
        backward,
    })
}
