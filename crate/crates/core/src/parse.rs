//! Text input: the query grammar and the example-set file format.
//!
//! Query grammar (whitespace-insensitive):
//!
//! ```text
//! query = term {"&" term}
//! term  = ATOM | "T" | "X" term | "F" term | "(" query ")"
//! ```
//!
//! Example-set files are UTF-8 lines. `#` starts a comment. The sections
//! `positive:` and `negative:` group instance lines; an instance line is a
//! whitespace-separated sequence of tokens `{A,B}`, `{A B}` or `{}`, one per
//! timestamp starting at 0.

use crate::model::{Atom, AtomSet, DataInstance, ExampleSet, Query, TemporalOp, RESERVED};
use crate::{Error, Result};

/// A syntax error with the byte position where it was detected.
#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
#[error("parse error at {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse(ParseError { pos, msg: msg.into() }))
}

#[derive(Debug, PartialEq)]
enum Tok {
    Ident(String),
    Top,
    Next,
    Eventually,
    Amp,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '&' => {
                out.push((i, Tok::Amp));
                i += 1;
            }
            '(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "T" => Tok::Top,
                    "X" => Tok::Next,
                    "F" => Tok::Eventually,
                    _ => Tok::Ident(word.to_string()),
                };
                out.push((start, tok));
            }
            _ => return err(i, format!("unexpected character `{c}`")),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get_mut(self.at).map(|(_, t)| std::mem::replace(t, Tok::Amp));
        self.at += 1;
        t
    }

    fn query(&mut self) -> Result<Query> {
        let mut acc = self.term()?;
        while self.peek() == Some(&Tok::Amp) {
            self.bump();
            let rhs = self.term()?;
            acc.atoms.extend(rhs.atoms);
            acc.temps.extend(rhs.temps);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Query> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Ident(name)) => {
                if RESERVED.contains(&name.as_str()) {
                    return err(pos, format!("`{name}` is reserved and cannot be an atom"));
                }
                let atom = Atom::new(&name)
                    .map_err(|_| ParseError { pos, msg: format!("invalid atom `{name}`") })?;
                Ok(Query { atoms: [atom].into_iter().collect(), temps: vec![] })
            }
            Some(Tok::Top) => Ok(Query::top()),
            Some(Tok::Next) => {
                let sub = self.term()?;
                Ok(Query { atoms: AtomSet::new(), temps: vec![(TemporalOp::Next, sub)] })
            }
            Some(Tok::Eventually) => {
                let sub = self.term()?;
                Ok(Query { atoms: AtomSet::new(), temps: vec![(TemporalOp::Eventually, sub)] })
            }
            Some(Tok::LParen) => {
                let q = self.query()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(q),
                    _ => err(pos, "unclosed parenthesis"),
                }
            }
            Some(Tok::RParen) | Some(Tok::Amp) => err(pos, "expected a term"),
            None => err(pos, "unexpected end of input"),
        }
    }
}

/// Parses a query in the grammar above.
pub fn parse_query(text: &str) -> Result<Query> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, end: text.len() };
    let q = p.query()?;
    if p.at != p.toks.len() {
        return err(p.pos(), "trailing input after query");
    }
    Ok(q)
}

/// Parses one instance line: `{}` `{A}` `{A,B}` tokens, one per timestamp.
pub fn parse_instance_line(line: &str) -> Result<DataInstance> {
    let bytes = line.as_bytes();
    let mut i = 0;
    let mut word: Vec<AtomSet> = Vec::new();
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c != '{' {
            return err(i, format!("expected `{{` to open an atom-set token, found `{c}`"));
        }
        let open = i;
        i += 1;
        let mut set = AtomSet::new();
        loop {
            while i < bytes.len() && ((bytes[i] as char).is_ascii_whitespace() || bytes[i] == b',')
            {
                i += 1;
            }
            if i >= bytes.len() {
                return err(open, "unclosed atom-set token");
            }
            if bytes[i] == b'}' {
                i += 1;
                break;
            }
            let start = i;
            while i < bytes.len()
                && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
            {
                i += 1;
            }
            if start == i {
                return err(i, format!("unexpected character `{}` in atom set", bytes[i] as char));
            }
            let name = &line[start..i];
            let atom = Atom::new(name)
                .map_err(|_| ParseError { pos: start, msg: format!("invalid atom `{name}`") })?;
            set.insert(atom);
        }
        word.push(set);
    }
    if word.is_empty() {
        return err(0, "instance line has no timestamps");
    }
    DataInstance::new(word)
}

/// Parses a sequence of bare instance lines, ignoring comments and blanks.
pub fn parse_instances(text: &str) -> Result<Vec<DataInstance>> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = strip_comment(line);
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_instance_line(line)?);
    }
    Ok(out)
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Parses an example-set file with `positive:` and `negative:` sections.
pub fn parse_example_set(text: &str) -> Result<ExampleSet> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Positive,
        Negative,
    }
    let mut section = Section::None;
    let mut positives = Vec::new();
    let mut negatives = Vec::new();
    let mut offset = 0;
    for line in text.lines() {
        let stripped = strip_comment(line);
        let trimmed = stripped.trim();
        if trimmed.is_empty() {
            offset += line.len() + 1;
            continue;
        }
        match trimmed {
            "positive:" => section = Section::Positive,
            "negative:" => section = Section::Negative,
            _ => match section {
                Section::None => {
                    return err(offset, "instance line before a `positive:` or `negative:` header")
                }
                Section::Positive => positives.push(parse_instance_line(stripped)?),
                Section::Negative => negatives.push(parse_instance_line(stripped)?),
            },
        }
        offset += line.len() + 1;
    }
    ExampleSet::new(positives, negatives)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::classify;
    use crate::model::QueryClass;
    use proptest::prelude::*;

    #[test]
    fn parses_nested_path_query() {
        let q = parse_query("F(A & X(B & X C))").unwrap();
        let p = q.as_path().unwrap();
        assert_eq!(p.tdp(), 3);
        assert_eq!(q.to_string(), "F(A & X(B & X C))");
    }

    #[test]
    fn parses_top() {
        let q = parse_query("T").unwrap();
        assert!(q.is_top());
    }

    #[test]
    fn parses_diamond_conjunction() {
        let q = parse_query("A & F B & F(C)").unwrap();
        assert_eq!(q.atoms.len(), 1);
        assert_eq!(q.temps.len(), 2);
        assert!(classify(&q).contains(&QueryClass::QD));
    }

    #[test]
    fn maximal_munch_identifiers() {
        // `XC` is one atom, not `X` applied to `C`.
        let q = parse_query("XC").unwrap();
        assert_eq!(q.atoms.iter().next().unwrap().name(), "XC");
    }

    #[test]
    fn rejects_reserved_atom_in_instance() {
        assert!(parse_instance_line("{A} {F}").is_err());
    }

    #[test]
    fn reports_position_of_syntax_error() {
        let e = parse_query("A & )").unwrap_err();
        match e {
            crate::Error::Parse(pe) => assert_eq!(pe.pos, 4),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn example_set_with_sections() {
        let text = "# events\npositive:\n{} {A} {B} {C}\n{} {} {A} {B} {C}\nnegative:\n{} {A} {B} {} {C}\n";
        let e = parse_example_set(text).unwrap();
        assert_eq!(e.positives().len(), 2);
        assert_eq!(e.negatives().len(), 1);
        assert_eq!(e.positives()[0].max_timestamp(), 3);
        assert_eq!(e.negatives()[0].to_string(), "{} {A} {B} {} {C}");
    }

    #[test]
    fn single_instance_positive_section() {
        let e = parse_example_set("positive:\n{A}\n").unwrap();
        assert_eq!(e.positives().len(), 1);
        assert_eq!(e.positives()[0].max_timestamp(), 0);
    }

    #[test]
    fn missing_positive_section_is_an_error() {
        assert!(parse_example_set("negative:\n{A}\n").is_err());
        assert!(parse_example_set("").is_err());
    }

    #[test]
    fn malformed_atom_set_token() {
        assert!(parse_instance_line("{A} {B").is_err());
        assert!(parse_instance_line("A B").is_err());
    }

    fn arb_query() -> impl Strategy<Value = Query> {
        let atom = prop::sample::select(vec!["A", "B", "C"]);
        let atoms = prop::collection::btree_set(atom, 0..3)
            .prop_map(|s| s.into_iter().map(|n| Atom::new(n).unwrap()).collect::<AtomSet>());
        let leaf = atoms.clone().prop_map(|atoms| Query { atoms, temps: vec![] });
        leaf.prop_recursive(3, 12, 3, move |inner| {
            let op = prop_oneof![Just(TemporalOp::Next), Just(TemporalOp::Eventually)];
            (atoms.clone(), prop::collection::vec((op, inner), 0..3))
                .prop_map(|(atoms, temps)| Query { atoms, temps })
        })
    }

    proptest! {
        #[test]
        fn canonical_text_round_trips(q in arb_query()) {
            let text = q.to_string();
            let back = parse_query(&text).unwrap();
            prop_assert_eq!(back.to_string(), text);
        }
    }
}
