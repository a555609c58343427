use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::domain::{parse_atom, Atom, DomainModel};
use super::sexpr::{parse_all, Pos, Sexp};
use super::ParseError;

/// A planning task over the household domain. Names used in `init` or
/// `goal` but missing from `objects` are treated as constants.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub objects: Vec<String>,
    pub init: BTreeSet<Atom>,
    pub goal: Vec<Atom>,
}

impl Serialize for Atom {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Atom {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        let forms = parse_all(&text).map_err(serde::de::Error::custom)?;
        match forms.as_slice() {
            [Sexp::List(items, _)] if !items.is_empty() => {
                let mut parts = items.iter().map(|s| s.atom().map(str::to_string));
                let pred = parts.next().flatten();
                let args: Option<Vec<String>> = parts.collect();
                match (pred, args) {
                    (Some(pred), Some(args)) => Ok(Atom { pred, args }),
                    _ => Err(serde::de::Error::custom(format!("malformed atom `{text}`"))),
                }
            }
            _ => Err(serde::de::Error::custom(format!("malformed atom `{text}`"))),
        }
    }
}

impl ProblemInstance {
    /// Whether every goal atom already holds in `init`.
    pub fn goal_satisfied_initially(&self) -> bool {
        self.goal.iter().all(|g| self.init.contains(g))
    }

    /// Renders the problem in the same grammar `parse_problem` reads.
    pub fn to_text(&self) -> String {
        let mut s = String::from("(define (problem task) (:domain household)\n  (:objects");
        for o in &self.objects {
            write!(s, " {o}").unwrap();
        }
        s.push_str(")\n  (:init");
        for a in &self.init {
            write!(s, "\n    {a}").unwrap();
        }
        s.push_str(")\n  (:goal (and");
        for a in &self.goal {
            write!(s, " {a}").unwrap();
        }
        s.push_str(")))\n");
        s
    }
}

fn malformed(pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError::Malformed { pos, msg: msg.into() }
}

fn ground(atom: Atom, pos: Pos) -> Result<Atom, ParseError> {
    if let Some(v) = atom.args.iter().find(|a| a.starts_with('?')) {
        return Err(malformed(pos, format!("variable `{v}` in a ground atom")));
    }
    Ok(atom)
}

/// Parses `(:objects …) (:init …) (:goal (and …))`, optionally wrapped in
/// `(define (problem name) (:domain name) …)`. Sections may appear once each,
/// in any order; `:init` and `:goal` are required.
pub fn parse_problem_in(domain: &DomainModel, text: &str) -> Result<ProblemInstance, ParseError> {
    let forms = parse_all(text)?;
    let sections: Vec<&Sexp> = match forms.as_slice() {
        [single] if single.head() == Some("define") => {
            let items = single.list().unwrap();
            match items.get(1).and_then(Sexp::list) {
                Some([kw, name]) if kw.atom() == Some("problem") && name.atom().is_some() => {}
                _ => return Err(malformed(single.pos(), "expected `(problem name)` after `define`")),
            }
            items[2..].iter().collect()
        }
        _ => forms.iter().collect(),
    };

    let preds: &BTreeMap<String, usize> = &domain.predicates;
    let mut objects: Option<Vec<String>> = None;
    let mut init: Option<BTreeSet<Atom>> = None;
    let mut goal: Option<Vec<Atom>> = None;
    for sec in sections {
        let items = sec
            .list()
            .ok_or_else(|| malformed(sec.pos(), "expected a `(:section …)` list"))?;
        let body = items.get(1..).unwrap_or_default();
        let dup = |name: &str| malformed(sec.pos(), format!("duplicate `{name}` section"));
        match sec.head() {
            Some(":domain") => {
                if body.len() != 1 || body[0].atom().is_none() {
                    return Err(malformed(sec.pos(), "expected `(:domain name)`"));
                }
            }
            Some(":objects") => {
                if objects.is_some() {
                    return Err(dup(":objects"));
                }
                let mut names = Vec::new();
                for o in body {
                    let name = o
                        .atom()
                        .ok_or_else(|| malformed(o.pos(), "object names must be plain symbols"))?;
                    if name.starts_with('?') || name.starts_with(':') {
                        return Err(malformed(o.pos(), format!("`{name}` is not an object name")));
                    }
                    if names.iter().any(|n| n == name) {
                        return Err(malformed(o.pos(), format!("object `{name}` declared twice")));
                    }
                    names.push(name.to_string());
                }
                objects = Some(names);
            }
            Some(":init") => {
                if init.is_some() {
                    return Err(dup(":init"));
                }
                let mut set = BTreeSet::new();
                for a in body {
                    set.insert(ground(parse_atom(a, preds)?, a.pos())?);
                }
                init = Some(set);
            }
            Some(":goal") => {
                if goal.is_some() {
                    return Err(dup(":goal"));
                }
                let [conj] = body else {
                    return Err(malformed(sec.pos(), "expected `(:goal (and …))`"));
                };
                if conj.head() != Some("and") {
                    return Err(malformed(conj.pos(), "goal must be a conjunction `(and …)`"));
                }
                let mut atoms = Vec::new();
                for a in &conj.list().unwrap()[1..] {
                    let atom = ground(parse_atom(a, preds)?, a.pos())?;
                    if !atoms.contains(&atom) {
                        atoms.push(atom);
                    }
                }
                goal = Some(atoms);
            }
            Some(other) => return Err(malformed(sec.pos(), format!("unknown section `{other}`"))),
            None => return Err(malformed(sec.pos(), "expected a section keyword")),
        }
    }
    Ok(ProblemInstance {
        objects: objects.unwrap_or_default(),
        init: init.ok_or_else(|| malformed(Pos { line: 1, col: 1 }, "missing `(:init …)` section"))?,
        goal: goal.ok_or_else(|| malformed(Pos { line: 1, col: 1 }, "missing `(:goal …)` section"))?,
    })
}

/// [`parse_problem_in`] against the bundled household domain.
pub fn parse_problem(text: &str) -> Result<ProblemInstance, ParseError> {
    parse_problem_in(DomainModel::household(), text)
}
