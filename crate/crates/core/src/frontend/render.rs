//! Text and JSON renderings of query results.

use serde_json::{json, Value};

use crate::conditioning::ConditionedStructure;
use crate::decision::{DirectionTrace, ExplanationTrace, HasseDiagram, Ranking, Verdict};
use crate::order::{describe_declaration, ConsistencyReport, Step};
use crate::semantics::ConclusionSentence;
use crate::structure::{Argument, ArgumentId, EvidenceStructure, Origin, ValidationReport};

fn table(rows: &[Vec<String>]) -> String {
    let columns = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..columns)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let mut line = String::from(" ");
        for (c, cell) in row.iter().enumerate() {
            line.push(' ');
            line.push_str(cell);
            if c + 1 < row.len() {
                line.push_str(&" ".repeat(widths[c] - cell.chars().count() + 1));
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn origin_name(origin: Origin) -> &'static str {
    match origin {
        Origin::Declared => "declared",
        Origin::RefutationExpansion => "refutation-expansion",
        Origin::ConjunctionRule => "conjunction-rule",
        Origin::DisjunctionClosure => "disjunction-closure",
    }
}

fn argument_json(arg: &Argument) -> Value {
    json!({
        "id": arg.id.0,
        "labels": arg.labels,
        "presumption": arg.formula.to_string(),
        "conclusion": arg.conclusion,
        "origins": arg.origins.iter().map(|o| origin_name(*o)).collect::<Vec<_>>(),
    })
}

fn arg_ref(s: &EvidenceStructure, id: ArgumentId) -> String {
    let arg = &s.arguments()[id.0];
    format!("{} {arg}", arg.name())
}

fn step_json(s: &EvidenceStructure, step: &Step) -> Value {
    json!({
        "lower": step.lower.0,
        "upper": step.upper.0,
        "provenance": step.provenance,
        "description": step.provenance.describe(s),
    })
}

fn step_text(s: &EvidenceStructure, step: &Step) -> String {
    format!(
        "{} <= {}: {}",
        s.arguments()[step.lower.0].name(),
        s.arguments()[step.upper.0].name(),
        step.provenance.describe(s)
    )
}

pub fn pretty(value: Value) -> String {
    let mut out = serde_json::to_string_pretty(&value).expect("values serialize");
    out.push('\n');
    out
}

pub struct CheckSummary<'a> {
    pub name: &'a str,
    pub structure: &'a EvidenceStructure,
    pub validation: &'a ValidationReport,
    pub consistency: &'a ConsistencyReport,
    pub missing_disjunctions: usize,
}

pub fn check_text(c: &CheckSummary<'_>) -> String {
    let s = c.structure;
    let base = s.arguments().iter().filter(|a| a.is_base()).count();
    let mut out = format!(
        "structure {}: {} atoms, {} alternatives, {} arguments ({} declared), {} relations\n",
        c.name,
        s.evidence_frame().len(),
        s.conclusion_frame().len(),
        s.len(),
        base,
        s.declarations().len()
    );
    let opts: Vec<String> = s.options().assignments().iter().map(|(k, v)| format!("{k}={v}")).collect();
    out.push_str(&format!("options: {}\n", opts.join(", ")));
    out.push_str("arguments:\n");
    let rows: Vec<Vec<String>> = s
        .arguments()
        .iter()
        .map(|a| {
            let origins: Vec<&str> = a.origins.iter().map(|o| origin_name(*o)).collect();
            vec![a.id.to_string(), a.labels.join(","), a.to_string(), origins.join(",")]
        })
        .collect();
    out.push_str(&table(&rows));
    for d in &c.validation.diagnostics {
        out.push_str(&format!("{:?}: {}\n", d.severity, d.message).to_lowercase());
    }
    if c.missing_disjunctions == 0 {
        out.push_str("disjunction closure: closed\n");
    } else {
        out.push_str(&format!(
            "disjunction closure: not closed ({} argument pairs lack their disjunction)\n",
            c.missing_disjunctions
        ));
    }
    if c.consistency.is_consistent() {
        out.push_str("consistency: ok\n");
    } else {
        out.push_str(&format!("consistency: {} violations\n", c.consistency.violations.len()));
        for v in &c.consistency.violations {
            out.push_str(&format!(
                "  declared {} is broken for {} and {}:\n",
                describe_declaration(s, v.declaration),
                arg_ref(s, v.lower),
                arg_ref(s, v.upper)
            ));
            for step in &v.chain {
                out.push_str(&format!("    {}\n", step_text(s, step)));
            }
        }
    }
    out
}

pub fn check_json(c: &CheckSummary<'_>) -> Value {
    let s = c.structure;
    json!({
        "command": "check",
        "structure": c.name,
        "atoms": s.evidence_frame().atoms(),
        "alternatives": s.conclusion_frame().alternatives(),
        "options": s.options(),
        "arguments": s.arguments().iter().map(argument_json).collect::<Vec<_>>(),
        "relations": (0..s.declarations().len()).map(|i| describe_declaration(s, i)).collect::<Vec<_>>(),
        "diagnostics": c.validation.diagnostics,
        "disjunction_closed": c.missing_disjunctions == 0,
        "missing_disjunctions": c.missing_disjunctions,
        "consistent": c.consistency.is_consistent(),
        "violations": c.consistency.violations.iter().map(|v| json!({
            "declaration": v.declaration,
            "relation": describe_declaration(s, v.declaration),
            "lower": v.lower.0,
            "upper": v.upper.0,
            "chain": v.chain.iter().map(|st| step_json(s, st)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

fn given_line(cond: &ConditionedStructure<'_>, given: &str) -> String {
    format!("given: {given} ({} of {} arguments triggered)\n", cond.len(), cond.structure().len())
}

pub fn condition_text(cond: &ConditionedStructure<'_>, given: &str) -> String {
    let mut out = given_line(cond, given);
    let rows: Vec<Vec<String>> = cond
        .triggered_arguments()
        .iter()
        .map(|a| vec![a.id.to_string(), a.labels.join(","), a.formula.to_string(), a.conclusion.to_string()])
        .collect();
    if !rows.is_empty() {
        let mut all = vec![vec!["id".into(), "label".into(), "presumption".into(), "conclusion".into()]];
        all.extend(rows);
        out.push_str(&table(&all));
    }
    out
}

pub fn condition_json(cond: &ConditionedStructure<'_>, given: &str) -> Value {
    json!({
        "command": "condition",
        "given": given,
        "triggered": cond.triggered_arguments().into_iter().map(argument_json).collect::<Vec<_>>(),
    })
}

pub fn compare_text(first: &ConclusionSentence, second: &ConclusionSentence, verdict: Verdict) -> String {
    let phrase = match verdict {
        Verdict::StrictlyLess => "is less believable than",
        Verdict::StrictlyGreater => "is more believable than",
        Verdict::Equal => "is as believable as",
        Verdict::Incomparable => "is not comparable to",
    };
    format!("{first} {phrase} {second}\n")
}

pub fn compare_json(given: &str, first: &ConclusionSentence, second: &ConclusionSentence, verdict: Verdict) -> Value {
    json!({ "command": "compare", "given": given, "first": first, "second": second, "verdict": verdict })
}

pub fn rank_text(cond: &ConditionedStructure<'_>, given: &str, r: &Ranking) -> String {
    let mut out = given_line(cond, given);
    let name = |i: usize| r.candidates[i].to_string();
    let maximal: Vec<String> = r.maximal.iter().map(|&i| name(i)).collect();
    out.push_str(&format!("maximal: {}\n", maximal.join(", ")));
    out.push_str("strata (most believable first):\n");
    for (k, layer) in r.strata.iter().enumerate() {
        let names: Vec<String> = layer.iter().map(|&i| name(i)).collect();
        out.push_str(&format!("  {}: {}\n", k + 1, names.join(", ")));
    }
    out.push_str("verdicts (row relative to column):\n");
    let mut rows = vec![std::iter::once(String::new()).chain((0..r.candidates.len()).map(name)).collect::<Vec<_>>()];
    for (i, row) in r.verdicts.iter().enumerate() {
        rows.push(std::iter::once(name(i)).chain(row.iter().map(|v| v.symbol().to_string())).collect());
    }
    out.push_str(&table(&rows));
    out
}

pub fn rank_json(given: &str, r: &Ranking) -> Value {
    let by_index = |ix: &[usize]| ix.iter().map(|&i| &r.candidates[i]).collect::<Vec<_>>();
    json!({
        "command": "rank",
        "given": given,
        "candidates": r.candidates,
        "maximal": by_index(&r.maximal),
        "strata": r.strata.iter().map(|layer| by_index(layer)).collect::<Vec<_>>(),
        "verdicts": r.verdicts,
    })
}

pub fn plausible_text(p: &ConclusionSentence, plausible: bool) -> String {
    if plausible {
        format!("{p} is plausible: {} is less believable\n", p.complement())
    } else {
        format!("{p} is not plausible: {} is not less believable\n", p.complement())
    }
}

pub fn plausible_json(given: &str, p: &ConclusionSentence, plausible: bool, verdict: Verdict) -> Value {
    json!({
        "command": "plausible",
        "given": given,
        "conclusion": p,
        "complement": p.complement(),
        "verdict": verdict,
        "plausible": plausible,
    })
}

fn node_name(d: &HasseDiagram, i: usize) -> String {
    let members: Vec<String> = d.nodes[i].members.iter().map(|p| p.to_string()).collect();
    members.join(" = ")
}

pub fn diagram_text(cond: &ConditionedStructure<'_>, given: &str, d: &HasseDiagram) -> String {
    let mut out = given_line(cond, given);
    out.push_str("nodes:\n");
    for i in 0..d.nodes.len() {
        out.push_str(&format!("  n{i}: {}\n", node_name(d, i)));
    }
    out.push_str("covering edges (lower -> upper):\n");
    for &(lower, upper) in &d.edges {
        out.push_str(&format!("  {} -> {}\n", node_name(d, lower), node_name(d, upper)));
    }
    out
}

pub fn diagram_json(given: &str, d: &HasseDiagram) -> Value {
    json!({
        "command": "diagram",
        "given": given,
        "nodes": d.nodes.iter().map(|n| &n.members).collect::<Vec<_>>(),
        "edges": d.edges.iter().map(|&(l, u)| json!({ "lower": l, "upper": u })).collect::<Vec<_>>(),
    })
}

fn direction_text(
    s: &EvidenceStructure,
    lower: &ConclusionSentence,
    upper: &ConclusionSentence,
    t: &DirectionTrace,
) -> String {
    let mut out = format!("{lower} <= {upper}: {}\n", if t.holds { "holds" } else { "fails" });
    if t.supports.is_empty() {
        let rival = if t.rival_supports.is_empty() { "is unsupported too" } else { "is supported" };
        out.push_str(&format!("  {lower} has no support; {upper} {rival}\n"));
        return out;
    }
    for id in &t.supports {
        if let Some(m) = t.matches.iter().find(|m| m.support == *id) {
            out.push_str(&format!("  {} matched by {}\n", arg_ref(s, m.support), arg_ref(s, m.dominator)));
            if m.provenance.is_empty() {
                out.push_str("    same argument\n");
            }
            for step in &m.provenance {
                out.push_str(&format!("    {}\n", step_text(s, step)));
            }
        } else {
            out.push_str(&format!("  {} unmatched\n", arg_ref(s, *id)));
        }
    }
    out
}

pub fn explain_text(cond: &ConditionedStructure<'_>, given: &str, t: &ExplanationTrace) -> String {
    let s = cond.structure();
    let mut out = given_line(cond, given);
    out.push_str(&compare_text(&t.first, &t.second, t.verdict));
    out.push_str(&direction_text(s, &t.first, &t.second, &t.forward));
    out.push_str(&direction_text(s, &t.second, &t.first, &t.backward));
    out
}

fn direction_json(s: &EvidenceStructure, t: &DirectionTrace) -> Value {
    json!({
        "holds": t.holds,
        "supports": t.supports,
        "rival_supports": t.rival_supports,
        "matches": t.matches.iter().map(|m| json!({
            "support": m.support,
            "dominator": m.dominator,
            "provenance": m.provenance.iter().map(|st| step_json(s, st)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "unmatched": t.unmatched,
    })
}

pub fn explain_json(cond: &ConditionedStructure<'_>, given: &str, t: &ExplanationTrace) -> Value {
    let s = cond.structure();
    let mut ids: Vec<ArgumentId> = t.forward.supports.iter().chain(&t.backward.supports).copied().collect();
    ids.sort();
    ids.dedup();
    json!({
        "command": "explain",
        "given": given,
        "first": t.first,
        "second": t.second,
        "verdict": t.verdict,
        "forward": direction_json(s, &t.forward),
        "backward": direction_json(s, &t.backward),
        "arguments": ids.iter().map(|id| argument_json(&s.arguments()[id.0])).collect::<Vec<_>>(),
    })
}
