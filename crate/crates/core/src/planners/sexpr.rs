//! Minimal s-expression reader with source positions.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {msg}")]
pub struct SyntaxError {
    pub pos: Pos,
    pub msg: String,
}

impl SyntaxError {
    pub fn new(pos: Pos, msg: impl Into<String>) -> Self {
        SyntaxError { pos, msg: msg.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            Sexp::Atom(..) => None,
        }
    }

    /// Head atom of a list, if any.
    pub fn head(&self) -> Option<&str> {
        self.list()?.first()?.atom()
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(s, _) => f.write_str(s),
            Sexp::List(items, _) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Reads every top-level form. `;` starts a comment running to end of line.
pub fn parse_all(text: &str) -> Result<Vec<Sexp>, SyntaxError> {
    let mut stack: Vec<(Vec<Sexp>, Pos)> = Vec::new();
    let mut top = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut chars = text.chars().peekable();
    let mut atom = String::new();
    let mut atom_pos = Pos::default();

    fn flush(atom: &mut String, pos: Pos, stack: &mut [(Vec<Sexp>, Pos)], top: &mut Vec<Sexp>) {
        if atom.is_empty() {
            return;
        }
        let a = Sexp::Atom(std::mem::take(atom), pos);
        match stack.last_mut() {
            Some((items, _)) => items.push(a),
            None => top.push(a),
        }
    }

    while let Some(c) = chars.next() {
        let here = Pos { line, col };
        match c {
            '(' => {
                flush(&mut atom, atom_pos, &mut stack, &mut top);
                stack.push((Vec::new(), here));
            }
            ')' => {
                flush(&mut atom, atom_pos, &mut stack, &mut top);
                let (items, open) = stack
                    .pop()
                    .ok_or_else(|| SyntaxError::new(here, "unbalanced `)`"))?;
                let list = Sexp::List(items, open);
                match stack.last_mut() {
                    Some((items, _)) => items.push(list),
                    None => top.push(list),
                }
            }
            ';' => {
                flush(&mut atom, atom_pos, &mut stack, &mut top);
                while chars.peek().is_some_and(|&c| c != '\n') {
                    chars.next();
                    col += 1;
                }
            }
            c if c.is_whitespace() => flush(&mut atom, atom_pos, &mut stack, &mut top),
            c => {
                if atom.is_empty() {
                    atom_pos = here;
                }
                atom.push(c);
            }
        }
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    flush(&mut atom, atom_pos, &mut stack, &mut top);
    if let Some((_, open)) = stack.last() {
        return Err(SyntaxError::new(*open, "unbalanced `(`: list never closed"));
    }
    Ok(top)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_with_positions() {
        let forms = parse_all("(a (b c)\n  d) ; note\ne").unwrap();
        assert_eq!(forms.len(), 2);
        assert_eq!(forms[0].to_string(), "(a (b c) d)");
        let inner = &forms[0].list().unwrap()[2];
        assert_eq!(inner.pos(), Pos { line: 2, col: 3 });
        assert_eq!(forms[1].pos(), Pos { line: 3, col: 1 });
    }

    #[test]
    fn unbalanced() {
        let e = parse_all("(a (b)").unwrap_err();
        assert_eq!(e.pos, Pos { line: 1, col: 1 });
        let e = parse_all("(a))").unwrap_err();
        assert_eq!(e.pos, Pos { line: 1, col: 4 });
    }
}
