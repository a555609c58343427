use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use super::sexpr::{parse_all, Pos, Sexp};
use super::ParseError;
use crate::world::Verb;

/// A predicate applied to variables (`?o`) or constants.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<String>,
}

impl Atom {
    pub fn new(pred: &str, args: &[&str]) -> Self {
        Atom {
            pred: pred.to_string(),
            args: args.iter().map(|a| a.to_string()).collect(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.pred)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub name: String,
    pub params: Vec<String>,
    pub pre: Vec<Literal>,
    pub effects: Vec<Literal>,
    pub verb: Verb,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainModel {
    pub name: String,
    /// Predicate name to arity.
    pub predicates: BTreeMap<String, usize>,
    pub schemas: Vec<Schema>,
}

pub const HOUSEHOLD_DOMAIN: &str = include_str!("../../assets/domain.pddl");

fn verb_for_prefix(prefix: &str) -> Option<Verb> {
    Some(match prefix {
        "goto" => Verb::GoTo,
        "pickup" => Verb::PickUp,
        "puton" => Verb::PutOn,
        "putin" => Verb::PutIn,
        "open" => Verb::Open,
        "close" => Verb::Close,
        "toggleon" => Verb::ToggleOn,
        "toggleoff" => Verb::ToggleOff,
        "heat" => Verb::Heat,
        "cool" => Verb::Cool,
        "clean" => Verb::Clean,
        "slice" => Verb::Slice,
        _ => return None,
    })
}

fn malformed(pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError::Malformed { pos, msg: msg.into() }
}

fn expect_list<'a>(s: &'a Sexp, what: &str) -> Result<&'a [Sexp], ParseError> {
    s.list().ok_or_else(|| malformed(s.pos(), format!("expected {what}")))
}

fn expect_atom<'a>(s: &'a Sexp, what: &str) -> Result<&'a str, ParseError> {
    s.atom().ok_or_else(|| malformed(s.pos(), format!("expected {what}")))
}

/// Parses `(pred arg…)` and checks it against the predicate table.
pub(crate) fn parse_atom(
    s: &Sexp,
    predicates: &BTreeMap<String, usize>,
) -> Result<Atom, ParseError> {
    let items = expect_list(s, "an atom like `(pred arg …)`")?;
    let (head, rest) = items
        .split_first()
        .ok_or_else(|| malformed(s.pos(), "empty atom"))?;
    let pred = expect_atom(head, "a predicate name")?;
    let arity = *predicates.get(pred).ok_or_else(|| ParseError::UnknownPredicate {
        pos: head.pos(),
        name: pred.to_string(),
    })?;
    if rest.len() != arity {
        return Err(ParseError::Arity {
            pos: head.pos(),
            pred: pred.to_string(),
            expected: arity,
            found: rest.len(),
        });
    }
    let args = rest
        .iter()
        .map(|a| expect_atom(a, "an argument name").map(str::to_string))
        .collect::<Result<_, _>>()?;
    Ok(Atom {
        pred: pred.to_string(),
        args,
    })
}

fn parse_literal(s: &Sexp, predicates: &BTreeMap<String, usize>) -> Result<Literal, ParseError> {
    if s.head() == Some("not") {
        let items = s.list().unwrap();
        if items.len() != 2 {
            return Err(malformed(s.pos(), "`not` takes exactly one atom"));
        }
        return Ok(Literal {
            atom: parse_atom(&items[1], predicates)?,
            positive: false,
        });
    }
    Ok(Literal {
        atom: parse_atom(s, predicates)?,
        positive: true,
    })
}

/// A single literal or `(and literal…)`.
fn parse_conjunction(
    s: &Sexp,
    predicates: &BTreeMap<String, usize>,
) -> Result<Vec<Literal>, ParseError> {
    if s.head() == Some("and") {
        s.list().unwrap()[1..]
            .iter()
            .map(|l| parse_literal(l, predicates))
            .collect()
    } else {
        Ok(vec![parse_literal(s, predicates)?])
    }
}

impl DomainModel {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let forms = parse_all(text)?;
        let [define] = forms.as_slice() else {
            return Err(malformed(Pos { line: 1, col: 1 }, "expected one `(define (domain …) …)` form"));
        };
        let items = expect_list(define, "`(define …)`")?;
        if define.head() != Some("define") || items.len() < 2 {
            return Err(malformed(define.pos(), "expected `(define (domain …) …)`"));
        }
        let name = match items[1].list() {
            Some([kw, n]) if kw.atom() == Some("domain") => expect_atom(n, "a domain name")?.to_string(),
            _ => return Err(malformed(items[1].pos(), "expected `(domain name)`")),
        };

        let mut predicates = BTreeMap::new();
        let mut schemas = Vec::new();
        for section in &items[2..] {
            match section.head() {
                Some(":predicates") => {
                    for p in &section.list().unwrap()[1..] {
                        let parts = expect_list(p, "a predicate declaration")?;
                        let (head, params) = parts
                            .split_first()
                            .ok_or_else(|| malformed(p.pos(), "empty predicate declaration"))?;
                        let pname = expect_atom(head, "a predicate name")?;
                        for v in params {
                            if !expect_atom(v, "a variable")?.starts_with('?') {
                                return Err(malformed(v.pos(), "predicate parameters must be `?variables`"));
                            }
                        }
                        if predicates.insert(pname.to_string(), params.len()).is_some() {
                            return Err(malformed(head.pos(), format!("predicate `{pname}` declared twice")));
                        }
                    }
                }
                Some(":action") => schemas.push(Self::parse_action(section, &predicates)?),
                _ => return Err(malformed(section.pos(), "expected `:predicates` or `:action` section")),
            }
        }
        Ok(DomainModel {
            name,
            predicates,
            schemas,
        })
    }

    fn parse_action(s: &Sexp, predicates: &BTreeMap<String, usize>) -> Result<Schema, ParseError> {
        let items = s.list().unwrap();
        let name_sexp = items
            .get(1)
            .ok_or_else(|| malformed(s.pos(), "action without a name"))?;
        let name = expect_atom(name_sexp, "an action name")?.to_string();
        let prefix = name.split('-').next().unwrap_or_default();
        let verb = verb_for_prefix(prefix).ok_or_else(|| {
            malformed(name_sexp.pos(), format!("action `{name}` does not start with a skill verb"))
        })?;

        let mut params = Vec::new();
        let mut pre = Vec::new();
        let mut effects = Vec::new();
        let mut rest = items[2..].iter();
        while let Some(key) = rest.next() {
            let key_name = expect_atom(key, "`:parameters`, `:precondition` or `:effect`")?;
            let value = rest
                .next()
                .ok_or_else(|| malformed(key.pos(), format!("`{key_name}` without a value")))?;
            match key_name {
                ":parameters" => {
                    for v in expect_list(value, "a parameter list")? {
                        let v = expect_atom(v, "a variable")?;
                        if !v.starts_with('?') {
                            return Err(malformed(value.pos(), "parameters must be `?variables`"));
                        }
                        params.push(v.to_string());
                    }
                }
                ":precondition" => pre = parse_conjunction(value, predicates)?,
                ":effect" => effects = parse_conjunction(value, predicates)?,
                other => return Err(malformed(key.pos(), format!("unknown action key `{other}`"))),
            }
        }
        if params.len() < verb.arity() {
            return Err(malformed(s.pos(), format!("action `{name}` needs at least {} parameters", verb.arity())));
        }
        for lit in pre.iter().chain(&effects) {
            for a in &lit.atom.args {
                if !params.contains(a) {
                    return Err(malformed(s.pos(), format!("`{a}` in action `{name}` is not a parameter")));
                }
            }
        }
        Ok(Schema {
            name,
            params,
            pre,
            effects,
            verb,
        })
    }

    /// The bundled household domain.
    pub fn household() -> &'static DomainModel {
        static DOMAIN: OnceLock<DomainModel> = OnceLock::new();
        DOMAIN.get_or_init(|| DomainModel::parse(HOUSEHOLD_DOMAIN).expect("bundled domain parses"))
    }

    /// Predicates no action ever changes.
    pub fn static_predicates(&self) -> BTreeSet<&str> {
        let changed: BTreeSet<&str> = self
            .schemas
            .iter()
            .flat_map(|s| s.effects.iter().map(|l| l.atom.pred.as_str()))
            .collect();
        self.predicates
            .keys()
            .map(String::as_str)
            .filter(|p| !changed.contains(p))
            .collect()
    }

    /// Unary predicate pairs that exclude each other: every action adding one
    /// deletes the other on the same argument.
    pub fn unary_mutexes(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let unary: Vec<&String> = self
            .predicates
            .iter()
            .filter(|(_, &a)| a == 1)
            .map(|(p, _)| p)
            .collect();
        let adds_deletes = |p: &str, q: &str| {
            self.schemas.iter().all(|s| {
                s.effects
                    .iter()
                    .filter(|l| l.positive && l.atom.pred == p)
                    .all(|add| {
                        s.effects
                            .iter()
                            .any(|d| !d.positive && d.atom.pred == q && d.atom.args == add.atom.args)
                    })
            })
        };
        let is_added = |p: &str| {
            self.schemas
                .iter()
                .any(|s| s.effects.iter().any(|l| l.positive && l.atom.pred == p))
        };
        for (i, p) in unary.iter().enumerate() {
            for q in &unary[i + 1..] {
                if is_added(p) && is_added(q) && adds_deletes(p, q) && adds_deletes(q, p) {
                    out.push(((*p).clone(), (*q).clone()));
                }
            }
        }
        out
    }
}
