//! The line-oriented structure declaration language.
//!
//! ```text
//! # comment
//! structure example1
//! evidence atoms: e1, e2
//! alternatives: Al1, Al2, Al3
//! options: same_presumption_equal=true
//! arg a1: e1 => {Al1}
//! refute r2: e2 => {Al1} singletons
//! rel: pres(e2) < pres(e1)
//! rel: a1 ~ a2
//! ```
//!
//! Relations are `<=` (no more believable), `<` (strictly less) and `~`
//! (equally believable). Operands are argument labels or `pres(<formula>)`.

use std::fmt;

use crate::error::Error;
use crate::semantics::{is_ident_continue, is_ident_start, ConclusionFrame, EvidenceFrame, Formula};
use crate::structure::{
    ArgumentId, EvidenceStructure, RefutationPolicy, Relation, RelationDeclaration, StructureBuilder, StructureOptions,
};

/// An error with a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocatedError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for LocatedError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParseErrors(pub Vec<LocatedError>);

impl fmt::Display for ParseErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.0 {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseErrors {}

/// A conclusion as written: `{A, B}` or `!{A, B}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConclusionExpr {
    pub negated: bool,
    pub names: Vec<String>,
    /// Column of each name.
    columns: Vec<usize>,
}

impl fmt::Display for ConclusionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("!")?;
        }
        write!(f, "{{{}}}", self.names.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operand {
    Argument { label: String, column: usize },
    Presumption { formula: Formula },
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Argument { label, .. } => f.write_str(label),
            Operand::Presumption { formula } => write!(f, "pres({formula})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Support { label: Option<String>, presumption: Formula, conclusion: ConclusionExpr },
    Refute { label: Option<String>, presumption: Formula, conclusion: ConclusionExpr, policy: Option<RefutationPolicy> },
    Relation { lower: Operand, relation: Relation, upper: Operand },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureDocument {
    pub name: String,
    pub atoms: Vec<String>,
    pub alternatives: Vec<String>,
    /// Option assignments in the order written.
    pub options: Vec<(String, String)>,
    /// Declarations with their source line.
    pub items: Vec<(usize, Item)>,
}

/// Parses and checks a document. Succeeds only if the document builds into a
/// valid structure; otherwise every problem found is reported.
pub fn parse_structure(text: &str) -> Result<StructureDocument, ParseErrors> {
    let doc = parse_document(text)?;
    doc.build(&[])?;
    Ok(doc)
}

/// Parses a document without building it, so that option overrides can be
/// applied before validation.
pub fn parse_document(text: &str) -> Result<StructureDocument, ParseErrors> {
    Parser::default().run(text)
}

impl StructureDocument {
    /// Builds the structure, applying `overrides` on top of the document's options.
    pub fn build(&self, overrides: &[(String, String)]) -> Result<EvidenceStructure, ParseErrors> {
        let at = |line: usize, column: usize, message: String| LocatedError { line, column, message };
        let mut errors = Vec::new();
        let evidence =
            EvidenceFrame::new(self.atoms.clone()).map_err(|e| ParseErrors(vec![at(2, 1, e.to_string())]))?;
        let conclusions =
            ConclusionFrame::new(self.alternatives.clone()).map_err(|e| ParseErrors(vec![at(3, 1, e.to_string())]))?;
        let mut options = StructureOptions::default();
        for (key, value) in self.options.iter().chain(overrides) {
            if let Err(e) = options.set(key, value) {
                errors.push(at(0, 0, e.to_string()));
            }
        }
        let mut builder = StructureBuilder::new(evidence.clone(), conclusions.clone()).with_options(options);

        let sentence = |formula: &Formula, line: usize| {
            evidence.sentence(formula).map_err(|e| match &e {
                Error::UnknownAtom(name) => {
                    let column = formula.atoms().iter().find(|(a, _)| a == name).map_or(0, |(_, c)| *c);
                    at(line, column, format!("undeclared atom `{name}`"))
                }
                _ => at(line, 1, e.to_string()),
            })
        };
        let conclusion = |expr: &ConclusionExpr, line: usize| {
            for (name, column) in expr.names.iter().zip(&expr.columns) {
                if conclusions.index_of(name).is_none() {
                    return Err(at(line, *column, format!("undeclared alternative `{name}`")));
                }
            }
            let set = conclusions.set(&expr.names).expect("names checked");
            Ok(if expr.negated { set.complement() } else { set })
        };

        for (line, item) in &self.items {
            let line = *line;
            let result: Result<(), LocatedError> = (|| match item {
                Item::Support { label, presumption, conclusion: p } => {
                    let e = sentence(presumption, line)?;
                    let p = conclusion(p, line)?;
                    let id =
                        builder.add_support_as(&e, presumption.clone(), &p).map_err(|e| at(line, 1, e.to_string()))?;
                    if let Some(label) = label {
                        builder.add_label(id, label).map_err(|e| at(line, 1, e.to_string()))?;
                    }
                    Ok(())
                }
                Item::Refute { label, presumption, conclusion: p, policy } => {
                    let e = sentence(presumption, line)?;
                    let p = conclusion(p, line)?;
                    let policy = policy.unwrap_or_default();
                    let ids = builder
                        .add_refutation_as(&e, presumption.clone(), &p, policy)
                        .map_err(|e| at(line, 1, e.to_string()))?;
                    if let Some(label) = label {
                        for id in ids {
                            let name = match policy {
                                RefutationPolicy::ComplementSet => label.clone(),
                                RefutationPolicy::Singletons => {
                                    let arg = &builder.arguments()[id.0];
                                    let alt = arg.conclusion.members().next().expect("singleton");
                                    format!("{label}_{}", conclusions.alternatives()[alt])
                                }
                            };
                            builder.add_label(id, &name).map_err(|e| at(line, 1, e.to_string()))?;
                        }
                    }
                    Ok(())
                }
                Item::Relation { lower, relation, upper } => {
                    let declaration = match (lower, upper) {
                        (Operand::Presumption { formula: l }, Operand::Presumption { formula: u }) => {
                            let (ls, us) = (sentence(l, line)?, sentence(u, line)?);
                            RelationDeclaration::Presumptions {
                                lower: ls,
                                lower_formula: l.clone(),
                                relation: *relation,
                                upper: us,
                                upper_formula: u.clone(),
                            }
                        }
                        (Operand::Argument { .. }, Operand::Argument { .. }) => {
                            let resolve = |op: &Operand| -> Result<ArgumentId, LocatedError> {
                                let Operand::Argument { label, column } = op else { unreachable!() };
                                builder
                                    .find_label(label)
                                    .ok_or_else(|| at(line, *column, format!("unknown argument `{label}`")))
                            };
                            RelationDeclaration::arguments(resolve(lower)?, *relation, resolve(upper)?)
                        }
                        _ => {
                            return Err(at(line, 1, "cannot relate an argument to a presumption".into()));
                        }
                    };
                    builder.declare(declaration);
                    Ok(())
                }
            })();
            if let Err(e) = result {
                errors.push(e);
            }
        }
        if !errors.is_empty() {
            return Err(ParseErrors(errors));
        }
        builder.build().map_err(|report| ParseErrors(report.errors().map(|d| at(0, 0, d.message.clone())).collect()))
    }

    pub fn support_count(&self) -> usize {
        self.items.iter().filter(|(_, i)| matches!(i, Item::Support { .. })).count()
    }

    pub fn relation_count(&self) -> usize {
        self.items.iter().filter(|(_, i)| matches!(i, Item::Relation { .. })).count()
    }

    pub fn presumption_relation_count(&self) -> usize {
        self.items
            .iter()
            .filter(|(_, i)| matches!(i, Item::Relation { lower: Operand::Presumption { .. }, .. }))
            .count()
    }

    /// Renders the document in canonical form; parsing the result gives back
    /// an equivalent document.
    pub fn serialize(&self) -> String {
        let mut out = format!("structure {}\n", self.name);
        out.push_str(&format!("evidence atoms: {}\n", self.atoms.join(", ")));
        out.push_str(&format!("alternatives: {}\n", self.alternatives.join(", ")));
        if !self.options.is_empty() {
            let opts: Vec<String> = self.options.iter().map(|(k, v)| format!("{k}={v}")).collect();
            out.push_str(&format!("options: {}\n", opts.join(", ")));
        }
        let label = |l: &Option<String>| l.as_ref().map_or(String::new(), |l| format!(" {l}"));
        for (_, item) in &self.items {
            let line = match item {
                Item::Support { label: l, presumption, conclusion } => {
                    format!("arg{}: {presumption} => {conclusion}", label(l))
                }
                Item::Refute { label: l, presumption, conclusion, policy } => {
                    let policy = match policy {
                        Some(RefutationPolicy::Singletons) => " singletons",
                        Some(RefutationPolicy::ComplementSet) => " complement_set",
                        None => "",
                    };
                    format!("refute{}: {presumption} => {conclusion}{policy}", label(l))
                }
                Item::Relation { lower, relation, upper } => format!("rel: {lower} {} {upper}", relation.symbol()),
            };
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

#[derive(Default)]
struct Parser {
    errors: Vec<LocatedError>,
    name: Option<String>,
    atoms: Option<Vec<String>>,
    alternatives: Option<Vec<String>>,
    options: Vec<(String, String)>,
    items: Vec<(usize, Item)>,
}

type LineResult<T> = Result<T, (usize, String)>;

fn strip_comment(line: &str) -> &str {
    line.find('#').map_or(line, |i| &line[..i])
}

/// 1-based character column of byte offset `offset` in `line`.
fn column_of(line: &str, offset: usize) -> usize {
    line[..offset].chars().count() + 1
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(is_ident_start) && chars.all(is_ident_continue)
}

/// Splits a comma-separated identifier list starting at byte `base` of `line`.
fn identifier_list(line: &str, base: usize) -> LineResult<Vec<String>> {
    let text = &line[base..];
    let mut names = Vec::new();
    let mut offset = base;
    for part in text.split(',') {
        let trimmed = part.trim();
        let lead = part.len() - part.trim_start().len();
        if !is_identifier(trimmed) {
            return Err((column_of(line, offset + lead), format!("expected an identifier, found `{trimmed}`")));
        }
        names.push(trimmed.to_string());
        offset += part.len() + 1;
    }
    Ok(names)
}

/// Parses a formula embedded at byte `base` of `line`, shifting columns.
fn embedded_formula(line: &str, base: usize, text: &str) -> LineResult<Formula> {
    let shift = column_of(line, base) - 1;
    let formula = Formula::parse(text).map_err(|e| match e {
        Error::Syntax { column, message } => (column + shift, message),
        other => (shift + 1, other.to_string()),
    })?;
    Ok(shift_columns(formula, shift))
}

fn shift_columns(f: Formula, shift: usize) -> Formula {
    match f {
        Formula::Atom(name, column) => Formula::Atom(name, column + shift),
        Formula::Not(a) => Formula::not(shift_columns(*a, shift)),
        Formula::And(a, b) => Formula::and(shift_columns(*a, shift), shift_columns(*b, shift)),
        Formula::Or(a, b) => Formula::or(shift_columns(*a, shift), shift_columns(*b, shift)),
    }
}

fn conclusion_expr(line: &str, base: usize, text: &str) -> LineResult<ConclusionExpr> {
    let lead = text.len() - text.trim_start().len();
    let mut start = base + lead;
    let mut rest = text.trim();
    let negated = rest.starts_with('!');
    if negated {
        rest = rest[1..].trim_start();
        start = base + text.find('{').unwrap_or(lead + 1);
    }
    let Some(inner) = rest.strip_prefix('{').and_then(|r| r.strip_suffix('}')) else {
        return Err((column_of(line, start), format!("expected a conclusion like {{A, B}}, found `{rest}`")));
    };
    let inner_base = line[start..].find('{').map_or(start, |i| start + i + 1);
    let mut names = Vec::new();
    let mut columns = Vec::new();
    if !inner.trim().is_empty() {
        let mut offset = inner_base;
        for part in inner.split(',') {
            let trimmed = part.trim();
            let lead = part.len() - part.trim_start().len();
            if !is_identifier(trimmed) {
                return Err((column_of(line, offset + lead), format!("expected an alternative, found `{trimmed}`")));
            }
            names.push(trimmed.to_string());
            columns.push(column_of(line, offset + lead));
            offset += part.len() + 1;
        }
    }
    Ok(ConclusionExpr { negated, names, columns })
}

impl Parser {
    fn run(mut self, text: &str) -> Result<StructureDocument, ParseErrors> {
        for (index, raw) in text.lines().enumerate() {
            let number = index + 1;
            let line = strip_comment(raw);
            if line.trim().is_empty() {
                continue;
            }
            if let Err((column, message)) = self.line(number, line) {
                self.errors.push(LocatedError { line: number, column, message });
            }
        }
        let missing = |what: &str| LocatedError { line: 1, column: 1, message: format!("missing {what} declaration") };
        if self.name.is_none() {
            self.errors.push(missing("`structure <name>`"));
        }
        if self.atoms.is_none() {
            self.errors.push(missing("`evidence atoms:`"));
        }
        if self.alternatives.is_none() {
            self.errors.push(missing("`alternatives:`"));
        }
        if !self.errors.is_empty() {
            return Err(ParseErrors(self.errors));
        }
        Ok(StructureDocument {
            name: self.name.unwrap_or_default(),
            atoms: self.atoms.unwrap_or_default(),
            alternatives: self.alternatives.unwrap_or_default(),
            options: self.options,
            items: self.items,
        })
    }

    fn line(&mut self, number: usize, line: &str) -> LineResult<()> {
        let indent = line.len() - line.trim_start().len();
        let body = line.trim();
        let keyword_end = body.find(|c: char| !is_ident_continue(c)).unwrap_or(body.len());
        let keyword = &body[..keyword_end];
        let after = indent + keyword_end;

        if keyword == "structure" {
            if self.name.is_some() {
                return Err((1, "duplicate `structure` header".into()));
            }
            let name = line[after..].trim();
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err((column_of(line, after), "expected a structure name".into()));
            }
            self.name = Some(name.to_string());
            return Ok(());
        }
        if self.name.is_none() {
            return Err((indent + 1, "the document must start with `structure <name>`".into()));
        }

        let colon = line.find(':').ok_or((line.len() + 1, "expected `:`".to_string()))?;
        let head = line[after..colon].trim();
        let value = colon + 1;
        match keyword {
            "evidence" => {
                if head != "atoms" {
                    return Err((column_of(line, after), "expected `evidence atoms:`".into()));
                }
                if self.atoms.is_some() {
                    return Err((indent + 1, "duplicate `evidence atoms:` line".into()));
                }
                self.atoms = Some(identifier_list(line, value)?);
            }
            "alternatives" => {
                self.expect_no_head(line, after, head)?;
                if self.alternatives.is_some() {
                    return Err((indent + 1, "duplicate `alternatives:` line".into()));
                }
                self.alternatives = Some(identifier_list(line, value)?);
            }
            "options" => {
                self.expect_no_head(line, after, head)?;
                let mut offset = value;
                for part in line[value..].split(',') {
                    let lead = part.len() - part.trim_start().len();
                    let column = column_of(line, offset + lead);
                    let (key, val) =
                        part.split_once('=').ok_or((column, format!("expected key=value, found `{}`", part.trim())))?;
                    let (key, val) = (key.trim(), val.trim());
                    if !StructureOptions::KEYS.contains(&key) {
                        return Err((column, format!("unknown option `{key}`")));
                    }
                    StructureOptions::default().set(key, val).map_err(|e| (column, e.to_string()))?;
                    self.options.push((key.to_string(), val.to_string()));
                    offset += part.len() + 1;
                }
            }
            "arg" | "refute" => {
                self.require_frames(indent)?;
                let label = self.label(line, after, head)?;
                let rest = &line[value..];
                let arrow = rest.find("=>").ok_or((line.len() + 1, "expected `=>`".to_string()))?;
                let presumption = embedded_formula(line, value, &rest[..arrow])?;
                let mut rhs = &rest[arrow + 2..];
                let mut policy = None;
                if keyword == "refute" {
                    if let Some(close) = rhs.rfind('}') {
                        let tail = rhs[close + 1..].trim();
                        if !tail.is_empty() {
                            let column = column_of(
                                line,
                                value + arrow + 2 + close + 1 + rhs[close + 1..].find(tail).unwrap_or(0),
                            );
                            policy = Some(tail.parse::<RefutationPolicy>().map_err(|e| (column, e.to_string()))?);
                            rhs = &rhs[..=close];
                        }
                    }
                }
                let conclusion = conclusion_expr(line, value + arrow + 2, rhs)?;
                let item = if keyword == "arg" {
                    Item::Support { label, presumption, conclusion }
                } else {
                    Item::Refute { label, presumption, conclusion, policy }
                };
                self.items.push((number, item));
            }
            "rel" => {
                self.require_frames(indent)?;
                self.expect_no_head(line, after, head)?;
                let rest = &line[value..];
                let (op_at, op_len, relation) =
                    find_relation(rest).ok_or((value + 1, "expected `<`, `<=` or `~`".to_string()))?;
                let lower = operand(line, value, &rest[..op_at])?;
                let upper = operand(line, value + op_at + op_len, &rest[op_at + op_len..])?;
                self.items.push((number, Item::Relation { lower, relation, upper }));
            }
            other => return Err((indent + 1, format!("unknown declaration `{other}`"))),
        }
        Ok(())
    }

    fn expect_no_head(&self, line: &str, after: usize, head: &str) -> LineResult<()> {
        if head.is_empty() {
            Ok(())
        } else {
            Err((column_of(line, after), format!("unexpected `{head}`")))
        }
    }

    fn require_frames(&self, indent: usize) -> LineResult<()> {
        if self.atoms.is_none() || self.alternatives.is_none() {
            return Err((indent + 1, "declare atoms and alternatives before arguments and relations".into()));
        }
        Ok(())
    }

    fn label(&self, line: &str, after: usize, head: &str) -> LineResult<Option<String>> {
        if head.is_empty() {
            return Ok(None);
        }
        if !is_identifier(head) {
            return Err((column_of(line, after), format!("`{head}` is not a valid label")));
        }
        Ok(Some(head.to_string()))
    }
}

/// Finds the relation symbol outside parentheses.
fn find_relation(text: &str) -> Option<(usize, usize, Relation)> {
    let mut depth = 0i32;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '<' if depth == 0 => {
                return Some(if text[i + 1..].starts_with('=') {
                    (i, 2, Relation::Leq)
                } else {
                    (i, 1, Relation::Strict)
                })
            }
            '~' if depth == 0 => return Some((i, 1, Relation::Equal)),
            _ => {}
        }
    }
    None
}

fn operand(line: &str, base: usize, text: &str) -> LineResult<Operand> {
    let lead = text.len() - text.trim_start().len();
    let trimmed = text.trim();
    let start = base + lead;
    if let Some(inner) = trimmed.strip_prefix("pres") {
        let inner = inner.trim_start();
        if let Some(body) = inner.strip_prefix('(').and_then(|b| b.strip_suffix(')')) {
            let open = line[start..].find('(').map_or(start, |i| start + i + 1);
            return Ok(Operand::Presumption { formula: embedded_formula(line, open, body)? });
        }
    }
    if is_identifier(trimmed) {
        return Ok(Operand::Argument { label: trimmed.to_string(), column: column_of(line, start) });
    }
    Err((column_of(line, start), format!("expected an argument label or pres(<formula>), found `{trimmed}`")))
}
