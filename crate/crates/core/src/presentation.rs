//! Quiver-with-relations presentations and their text format.
//!
//! Paths are written in diagrammatic order: `x*y` means "x, then y". Algebra
//! multiplication is function composition, so the algebra element usually
//! written `ξα` ("α, then ξ") is entered as the word `alpha*xi`. Left modules
//! are representations of the quiver: an arrow `a: i -> j` maps the vertex-`i`
//! part of a module to the vertex-`j` part.
//!
//! The input document is TOML:
//!
//! ```toml
//! format = 1
//!
//! [field]
//! kind = "Fp"      # or "Q"
//! p = 32003        # required for Fp
//!
//! [quiver]
//! vertices = ["v"]
//! arrows = [
//!   { name = "x", from = "v", to = "v", weight = 0 },
//!   { name = "y", from = "v", to = "v", weight = 0 },
//! ]
//!
//! [relations]
//! rules = ["x*x + y*y*y", "x*y", "y*x"]
//!
//! [limits]
//! weight_max = 1
//! nilpotency_bound = 4
//! hom_max = 5
//! jpower_max = 4
//!
//! [tasks]
//! run = ["quasi_koszul", "koszul", "gr"]
//! ```
//!
//! A relation is a sum of terms `c*path`, joined by `+` or `-`; the coefficient
//! `c` (an integer or fraction) is optional. Commutative quotients have to be
//! entered with both `x*y` and `y*x` style relations: nothing is assumed
//! commutative.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec};

pub const FORMAT_VERSION: i64 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
    pub weight: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quiver {
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
}

impl Quiver {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }

    pub fn max_weight(&self) -> usize {
        self.arrows.iter().map(|a| a.weight).max().unwrap_or(0)
    }
}

/// A nonempty path, as arrow indices in diagrammatic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PathWord(pub Vec<usize>);

impl PathWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn source(&self, q: &Quiver) -> usize {
        q.arrows[self.0[0]].source
    }

    pub fn target(&self, q: &Quiver) -> usize {
        q.arrows[*self.0.last().expect("nonempty path")].target
    }

    pub fn weight(&self, q: &Quiver) -> usize {
        self.0.iter().map(|&a| q.arrows[a].weight).sum()
    }

    pub fn is_composable(&self, q: &Quiver) -> bool {
        !self.0.is_empty() && self.0.windows(2).all(|w| q.arrows[w[0]].target == q.arrows[w[1]].source)
    }

    pub fn reversed(&self) -> PathWord {
        PathWord(self.0.iter().rev().copied().collect())
    }

    pub fn render(&self, q: &Quiver) -> String {
        self.0
            .iter()
            .map(|&a| q.arrows[a].name.as_str())
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// A linear combination of parallel, weight-homogeneous paths. Coefficients
/// are stored as exact rationals and specialised to the working field when
/// the algebra is built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub terms: Vec<(BigRational, PathWord)>,
}

impl Relation {
    pub fn weight(&self, q: &Quiver) -> usize {
        self.terms[0].1.weight(q)
    }

    pub fn source(&self, q: &Quiver) -> usize {
        self.terms[0].1.source(q)
    }

    pub fn target(&self, q: &Quiver) -> usize {
        self.terms[0].1.target(q)
    }

    pub fn max_len(&self) -> usize {
        self.terms.iter().map(|(_, p)| p.len()).max().unwrap_or(0)
    }

    pub fn render(&self, q: &Quiver) -> String {
        let mut out = String::new();
        for (i, (c, p)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            if !mag.is_one() {
                if mag.denom().is_one() {
                    out.push_str(&format!("{}*", mag.numer()));
                } else {
                    out.push_str(&format!("{}/{}*", mag.numer(), mag.denom()));
                }
            }
            out.push_str(&p.render(q));
        }
        out
    }

    /// Coefficients mapped into a concrete field.
    pub fn coefficients_in<F: Field>(&self, field: &F) -> Result<Vec<F::Elem>> {
        self.terms
            .iter()
            .map(|(c, _)| field.parse(&format!("{}/{}", c.numer(), c.denom())))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Largest internal (weight) degree kept by truncated computations.
    pub weight_max: usize,
    /// Declared bound `N` with `J(A_0)^N = 0`.
    pub nilpotency_bound: usize,
    /// Largest homological degree.
    pub hom_max: usize,
    /// Largest radical power examined by certificates.
    pub jpower_max: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Resolve,
    Koszul,
    QuasiKoszul,
    Ext,
    Dual,
    DoubleDual,
    Gr,
    Opposite,
    AsRegular,
    SelfInjectiveDual,
}

impl Task {
    pub const ALL: [Task; 10] = [
        Task::Resolve,
        Task::Koszul,
        Task::QuasiKoszul,
        Task::Ext,
        Task::Dual,
        Task::DoubleDual,
        Task::Gr,
        Task::Opposite,
        Task::AsRegular,
        Task::SelfInjectiveDual,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::Resolve => "resolve",
            Task::Koszul => "koszul",
            Task::QuasiKoszul => "quasi_koszul",
            Task::Ext => "ext",
            Task::Dual => "dual",
            Task::DoubleDual => "double_dual",
            Task::Gr => "gr",
            Task::Opposite => "opposite",
            Task::AsRegular => "as_regular",
            Task::SelfInjectiveDual => "self_injective_dual",
        }
    }
}

impl FromStr for Task {
    type Err = Error;
    fn from_str(s: &str) -> Result<Task> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Presentation(format!("unknown task `{s}`")))
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `A = kQ/I` together with its truncation parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub field: FieldSpec,
    pub quiver: Quiver,
    pub relations: Vec<Relation>,
    pub limits: Limits,
}

/// A parsed input file: a presentation plus the requested tasks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub presentation: Presentation,
    pub tasks: Vec<Task>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    format: Spanned<i64>,
    field: RawField,
    quiver: RawQuiver,
    #[serde(default)]
    relations: RawRelations,
    limits: RawLimits,
    #[serde(default)]
    tasks: RawTasks,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawField {
    kind: Spanned<String>,
    p: Option<Spanned<u64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuiver {
    vertices: Vec<Spanned<String>>,
    #[serde(default)]
    arrows: Vec<Spanned<RawArrow>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawArrow {
    name: String,
    from: String,
    to: String,
    #[serde(default)]
    weight: i64,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawRelations {
    #[serde(default)]
    rules: Vec<Spanned<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLimits {
    weight_max: Spanned<i64>,
    nilpotency_bound: Spanned<i64>,
    hom_max: Spanned<i64>,
    jpower_max: Spanned<i64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawTasks {
    #[serde(default)]
    run: Vec<Spanned<String>>,
}

/// Maps byte offsets to 1-based line/column pairs.
struct LineIndex<'a> {
    text: &'a str,
}

impl LineIndex<'_> {
    fn locate(&self, offset: usize) -> (usize, usize) {
        let offset = offset.min(self.text.len());
        let before = &self.text[..offset];
        let line = before.matches('\n').count() + 1;
        let column = before.rfind('\n').map_or(offset, |nl| offset - nl - 1) + 1;
        (line, column)
    }

    fn error(&self, offset: usize, message: impl Into<String>) -> Error {
        let (line, column) = self.locate(offset);
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }
}

/// Parses an input document (presentation and task list).
pub fn parse_document(text: &str) -> Result<Document> {
    let index = LineIndex { text };
    let raw: RawDocument = toml::from_str(text).map_err(|e| {
        let offset = e.span().map_or(0, |s| s.start);
        index.error(offset, e.message().to_string())
    })?;

    if *raw.format.get_ref() != FORMAT_VERSION {
        return Err(index.error(
            raw.format.span().start,
            format!("unsupported format version {}", raw.format.get_ref()),
        ));
    }

    let field = match raw.field.kind.get_ref().as_str() {
        "Q" => FieldSpec::Rationals,
        "Fp" => {
            let p = raw
                .field
                .p
                .as_ref()
                .ok_or_else(|| index.error(raw.field.kind.span().start, "field kind Fp requires p"))?;
            FieldSpec::prime(*p.get_ref()).map_err(|e| index.error(p.span().start, e.to_string()))?
        }
        other => {
            return Err(index.error(
                raw.field.kind.span().start,
                format!("field kind must be \"Q\" or \"Fp\", got \"{other}\""),
            ))
        }
    };

    let mut vertices = Vec::new();
    for v in &raw.quiver.vertices {
        if vertices.contains(v.get_ref()) {
            return Err(index.error(v.span().start, format!("duplicate vertex `{}`", v.get_ref())));
        }
        if !is_identifier(v.get_ref()) {
            return Err(index.error(v.span().start, format!("bad vertex name `{}`", v.get_ref())));
        }
        vertices.push(v.get_ref().clone());
    }
    if vertices.is_empty() {
        return Err(index.error(0, "quiver has no vertices"));
    }

    let mut arrows: Vec<Arrow> = Vec::new();
    for a in &raw.quiver.arrows {
        let at = a.span().start;
        let raw_arrow = a.get_ref();
        if !is_identifier(&raw_arrow.name) {
            return Err(index.error(at, format!("bad arrow name `{}`", raw_arrow.name)));
        }
        if arrows.iter().any(|b| b.name == raw_arrow.name) {
            return Err(index.error(at, format!("duplicate arrow `{}`", raw_arrow.name)));
        }
        let lookup = |name: &str| {
            vertices
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| index.error(at, format!("unknown vertex `{name}`")))
        };
        let source = lookup(&raw_arrow.from)?;
        let target = lookup(&raw_arrow.to)?;
        if raw_arrow.weight < 0 {
            return Err(index.error(at, format!("negative weight on arrow `{}`", raw_arrow.name)));
        }
        arrows.push(Arrow {
            name: raw_arrow.name.clone(),
            source,
            target,
            weight: raw_arrow.weight as usize,
        });
    }
    let quiver = Quiver { vertices, arrows };

    let mut relations = Vec::new();
    for r in &raw.relations.rules {
        // +1 skips the opening quote of the TOML string literal.
        let base = r.span().start + 1;
        let rel = parse_relation(r.get_ref(), &quiver)
            .map_err(|(offset, msg)| index.error(base + offset, msg))?;
        relations.push(rel);
    }

    let limit = |s: &Spanned<i64>, name: &str| -> Result<usize> {
        if *s.get_ref() < 1 {
            return Err(index.error(s.span().start, format!("limit {name} must be at least 1")));
        }
        Ok(*s.get_ref() as usize)
    };
    let limits = Limits {
        weight_max: limit(&raw.limits.weight_max, "weight_max")?,
        nilpotency_bound: limit(&raw.limits.nilpotency_bound, "nilpotency_bound")?,
        hom_max: limit(&raw.limits.hom_max, "hom_max")?,
        jpower_max: limit(&raw.limits.jpower_max, "jpower_max")?,
    };

    let mut tasks = Vec::new();
    for t in &raw.tasks.run {
        let task: Task = t
            .get_ref()
            .parse()
            .map_err(|_| index.error(t.span().start, format!("unknown task `{}`", t.get_ref())))?;
        if !tasks.contains(&task) {
            tasks.push(task);
        }
    }

    let presentation = Presentation {
        field,
        quiver,
        relations,
        limits,
    };
    presentation.validate_homogeneity()?;
    Ok(Document {
        presentation,
        tasks,
    })
}

/// Parses just the presentation part of an input document.
pub fn parse_presentation(text: &str) -> Result<Presentation> {
    parse_document(text).map(|d| d.presentation)
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(String),
    Ident(String),
    Star,
    Plus,
    Minus,
}

fn tokenize(s: &str) -> std::result::Result<Vec<(usize, Token)>, (usize, String)> {
    let mut out = Vec::new();
    let mut it = s.char_indices().peekable();
    while let Some(&(i, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
        } else if c == '*' {
            out.push((i, Token::Star));
            it.next();
        } else if c == '+' {
            out.push((i, Token::Plus));
            it.next();
        } else if c == '-' {
            out.push((i, Token::Minus));
            it.next();
        } else if c.is_ascii_digit() {
            let mut num = String::new();
            while let Some(&(_, d)) = it.peek() {
                if d.is_ascii_digit() || d == '/' {
                    num.push(d);
                    it.next();
                } else {
                    break;
                }
            }
            out.push((i, Token::Number(num)));
        } else if c.is_alphabetic() || c == '_' {
            let mut id = String::new();
            while let Some(&(_, d)) = it.peek() {
                if d.is_alphanumeric() || d == '_' || d == '\'' {
                    id.push(d);
                    it.next();
                } else {
                    break;
                }
            }
            out.push((i, Token::Ident(id)));
        } else {
            return Err((i, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

/// Parses one relation string; errors carry a byte offset into `s`.
fn parse_relation(s: &str, q: &Quiver) -> std::result::Result<Relation, (usize, String)> {
    let tokens = tokenize(s)?;
    let mut pos = 0;
    let mut terms: Vec<(BigRational, PathWord)> = Vec::new();
    let end = s.len();
    let mut first = true;
    while pos < tokens.len() || first {
        let mut sign = BigRational::one();
        match tokens.get(pos) {
            Some((_, Token::Plus)) => pos += 1,
            Some((_, Token::Minus)) => {
                sign = -sign;
                pos += 1;
            }
            Some((i, t)) if !first => return Err((*i, format!("expected `+` or `-`, found {t:?}"))),
            None if first => return Err((0, "empty relation".into())),
            _ => {}
        }
        first = false;
        let term_start = tokens.get(pos).map_or(end, |(i, _)| *i);
        let mut coeff = sign;
        let mut path = Vec::new();
        let mut expect_factor = true;
        while let Some((i, t)) = tokens.get(pos) {
            match (t, expect_factor) {
                (Token::Number(n), true) => {
                    if !path.is_empty() {
                        return Err((*i, "coefficient must precede the path".into()));
                    }
                    coeff *= parse_rational(n).ok_or((*i, format!("bad coefficient `{n}`")))?;
                    expect_factor = false;
                }
                (Token::Ident(name), true) => {
                    let a = q
                        .arrow_index(name)
                        .ok_or((*i, format!("unknown arrow `{name}`")))?;
                    path.push(a);
                    expect_factor = false;
                }
                (Token::Star, false) => expect_factor = true,
                (Token::Plus | Token::Minus, false) => break,
                (t, _) => return Err((*i, format!("unexpected {t:?}"))),
            }
            pos += 1;
        }
        if expect_factor {
            return Err((tokens.get(pos).map_or(end, |(i, _)| *i), "incomplete term".into()));
        }
        if path.is_empty() {
            return Err((term_start, "term has no path".into()));
        }
        let word = PathWord(path);
        if !word.is_composable(q) {
            return Err((term_start, format!("path `{}` is not composable", word.render(q))));
        }
        match terms.iter_mut().find(|(_, p)| *p == word) {
            Some((c, _)) => *c += coeff,
            None => terms.push((coeff, word)),
        }
    }
    terms.retain(|(c, _)| !c.is_zero());
    if terms.is_empty() {
        return Err((0, "relation is empty after collecting terms".into()));
    }
    Ok(Relation { terms })
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.parse::<BigInt>().ok()?, d.parse::<BigInt>().ok()?),
        None => (s.parse::<BigInt>().ok()?, BigInt::one()),
    };
    (!d.is_zero()).then(|| BigRational::new(n, d))
}

impl Presentation {
    /// Every relation must consist of parallel paths of one common weight.
    pub fn validate_homogeneity(&self) -> Result<()> {
        let q = &self.quiver;
        for (idx, r) in self.relations.iter().enumerate() {
            if r.terms.is_empty() {
                return Err(Error::Presentation(format!("relation #{idx} is empty")));
            }
            for (c, p) in &r.terms {
                if c.is_zero() {
                    return Err(Error::Presentation(format!("relation #{idx} has a zero coefficient")));
                }
                if !p.is_composable(q) {
                    return Err(Error::Presentation(format!(
                        "relation #{idx} `{}`: path `{}` is not composable",
                        r.render(q),
                        p.render(q)
                    )));
                }
            }
            let (s, t, w) = (r.source(q), r.target(q), r.weight(q));
            for (_, p) in &r.terms {
                if p.source(q) != s || p.target(q) != t {
                    return Err(Error::Presentation(format!(
                        "relation #{idx} `{}` mixes non-parallel paths",
                        r.render(q)
                    )));
                }
                if p.weight(q) != w {
                    return Err(Error::Presentation(format!(
                        "relation #{idx} `{}` is not weight-homogeneous (weights {} and {})",
                        r.render(q),
                        w,
                        p.weight(q)
                    )));
                }
            }
        }
        Ok(())
    }

    /// The opposite presentation: arrows reversed, words reversed.
    pub fn opposite(&self) -> Presentation {
        let quiver = Quiver {
            vertices: self.quiver.vertices.clone(),
            arrows: self
                .quiver
                .arrows
                .iter()
                .map(|a| Arrow {
                    name: a.name.clone(),
                    source: a.target,
                    target: a.source,
                    weight: a.weight,
                })
                .collect(),
        };
        let relations = self
            .relations
            .iter()
            .map(|r| Relation {
                terms: r.terms.iter().map(|(c, p)| (c.clone(), p.reversed())).collect(),
            })
            .collect();
        Presentation {
            field: self.field,
            quiver,
            relations,
            limits: self.limits,
        }
    }

    pub fn with_field(mut self, field: FieldSpec) -> Presentation {
        self.field = field;
        self
    }

    /// Longest relation word.
    pub fn max_relation_len(&self) -> usize {
        self.relations.iter().map(Relation::max_len).max().unwrap_or(0)
    }

    /// Whether every arrow has positive weight (then `A_0` is semisimple).
    pub fn degree_zero_semisimple(&self) -> bool {
        self.quiver.arrows.iter().all(|a| a.weight > 0)
    }
}

impl Document {
    /// Renders the document back into the input format.
    pub fn serialize(&self) -> String {
        let p = &self.presentation;
        let q = &p.quiver;
        let mut out = String::new();
        out.push_str(&format!("format = {FORMAT_VERSION}\n\n[field]\n"));
        match p.field {
            FieldSpec::Rationals => out.push_str("kind = \"Q\"\n"),
            FieldSpec::Prime(pr) => out.push_str(&format!("kind = \"Fp\"\np = {pr}\n")),
        }
        out.push_str("\n[quiver]\nvertices = [");
        out.push_str(
            &q.vertices
                .iter()
                .map(|v| format!("\"{v}\""))
                .collect::<Vec<_>>()
                .join(", "),
        );
        out.push_str("]\narrows = [\n");
        for a in &q.arrows {
            out.push_str(&format!(
                "  {{ name = \"{}\", from = \"{}\", to = \"{}\", weight = {} }},\n",
                a.name, q.vertices[a.source], q.vertices[a.target], a.weight
            ));
        }
        out.push_str("]\n\n[relations]\nrules = [\n");
        for r in &p.relations {
            out.push_str(&format!("  \"{}\",\n", r.render(q)));
        }
        let l = &p.limits;
        out.push_str(&format!(
            "]\n\n[limits]\nweight_max = {}\nnilpotency_bound = {}\nhom_max = {}\njpower_max = {}\n",
            l.weight_max, l.nilpotency_bound, l.hom_max, l.jpower_max
        ));
        out.push_str("\n[tasks]\nrun = [");
        out.push_str(
            &self
                .tasks
                .iter()
                .map(|t| format!("\"{t}\""))
                .collect::<Vec<_>>()
                .join(", "),
        );
        out.push_str("]\n");
        out
    }
}

/// Name lookup for arrows, used when rendering basis labels.
pub fn arrow_names(q: &Quiver) -> HashMap<usize, &str> {
    q.arrows.iter().enumerate().map(|(i, a)| (i, a.name.as_str())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(arrows: &str, rules: &str) -> String {
        format!(
            "format = 1\n[field]\nkind = \"Q\"\n[quiver]\nvertices = [\"a\", \"b\"]\narrows = [{arrows}]\n\
             [relations]\nrules = [{rules}]\n[limits]\nweight_max = 3\nnilpotency_bound = 3\nhom_max = 3\njpower_max = 3\n"
        )
    }

    #[test]
    fn smallest_quadratic_input() {
        let text = "format = 1\n[field]\nkind = \"Q\"\n[quiver]\nvertices = [\"v\"]\n\
                    arrows = [{name = \"x\", from = \"v\", to = \"v\", weight = 1}]\n\
                    [relations]\nrules = [\"x*x\"]\n\
                    [limits]\nweight_max = 5\nnilpotency_bound = 1\nhom_max = 3\njpower_max = 3\n";
        let p = parse_presentation(text).unwrap();
        assert_eq!(p.relations.len(), 1);
        assert_eq!(p.relations[0].weight(&p.quiver), 2);
    }

    #[test]
    fn composability_error_has_position() {
        let text = doc(
            r#"{name="al", from="a", to="b", weight=1}, {name="be", from="a", to="b", weight=1}"#,
            r#""al*be""#,
        );
        match parse_presentation(&text) {
            Err(Error::Syntax { line, message, .. }) => {
                assert_eq!(line, 8);
                assert!(message.contains("not composable"), "{message}");
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_arrow_and_vertex() {
        let text = doc(r#"{name="al", from="a", to="b", weight=1}"#, r#""al*zz""#);
        assert!(matches!(parse_presentation(&text), Err(Error::Syntax { .. })));
        let text = doc(r#"{name="al", from="a", to="c", weight=1}"#, "");
        assert!(matches!(parse_presentation(&text), Err(Error::Syntax { .. })));
    }

    #[test]
    fn weight_mixed_relation_rejected() {
        let text = "format = 1\n[field]\nkind = \"Q\"\n[quiver]\nvertices = [\"v\"]\n\
                    arrows = [{name = \"x\", from = \"v\", to = \"v\", weight = 1}]\n\
                    [relations]\nrules = [\"x + x*x\"]\n\
                    [limits]\nweight_max = 5\nnilpotency_bound = 1\nhom_max = 3\njpower_max = 3\n";
        match parse_presentation(text) {
            Err(Error::Presentation(m)) => assert!(m.contains("weight-homogeneous"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn coefficients_and_signs() {
        let text = "format = 1\n[field]\nkind = \"Q\"\n[quiver]\nvertices = [\"v\"]\n\
                    arrows = [{name = \"x\", from = \"v\", to = \"v\", weight = 0}, {name = \"y\", from = \"v\", to = \"v\", weight = 0}]\n\
                    [relations]\nrules = [\"-2*x*y + 3/4*y*x - x*y\", \"x*x - x*x + y*y\"]\n\
                    [limits]\nweight_max = 1\nnilpotency_bound = 3\nhom_max = 3\njpower_max = 3\n";
        let p = parse_presentation(text).unwrap();
        let q = &p.quiver;
        assert_eq!(p.relations[0].render(q), "-3*x*y + 3/4*y*x");
        assert_eq!(p.relations[1].render(q), "y*y");
    }

    #[test]
    fn empty_relation_rejected() {
        let text = doc(r#"{name="al", from="a", to="b", weight=1}"#, r#""""#);
        assert!(matches!(parse_presentation(&text), Err(Error::Syntax { .. })));
        let text = doc(r#"{name="al", from="a", to="b", weight=1}"#, r#""al - al""#);
        assert!(parse_presentation(&text).is_err());
    }

    #[test]
    fn opposite_reverses() {
        let text = doc(r#"{name="al", from="a", to="b", weight=1}"#, "");
        let p = parse_presentation(&text).unwrap();
        let op = p.opposite();
        assert_eq!(op.quiver.arrows[0].source, 1);
        assert_eq!(op.quiver.arrows[0].target, 0);
        assert_eq!(op.opposite(), p);
    }

    #[test]
    fn bad_limits_and_format() {
        let text = doc("", "").replace("hom_max = 3", "hom_max = 0");
        assert!(matches!(parse_presentation(&text), Err(Error::Syntax { .. })));
        let text = doc("", "").replace("format = 1", "format = 2");
        assert!(matches!(parse_presentation(&text), Err(Error::Syntax { line: 1, .. })));
    }
}
