//! Text grammar for presentations, words and group-ring literals.
//!
//! ```text
//! presentation := "gens" ident* ";" "rels" [ relator { "," relator } ] [ ";" ]
//! relator      := "1" | factor { factor }
//! factor       := atom [ "^" [ "-" ] integer ]
//! atom         := ident | "(" factor { factor } ")"
//! ring-element := [ "+" | "-" ] term { ( "+" | "-" ) term }
//! term         := integer [ [ "*" ] factor { factor } ] | factor { factor }
//! ident        := letter { letter | digit | "_" }
//! ```
//!
//! A generator name starts with a lowercase letter; the same name with its
//! first letter upper-cased denotes the inverse. `#` starts a comment that
//! runs to the end of the line.

use crate::error::{Error, ParseError, Result};
use crate::group::word::{inverse_name, Word};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Caret,
    LParen,
    RParen,
    Comma,
    Semi,
    Plus,
    Minus,
    Star,
    Eof,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> std::result::Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let single = match c {
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            ';' => Some(Tok::Semi),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Spanned {
                tok,
                line: l0,
                column: c0,
            });
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let value = text.parse::<i64>().map_err(|_| ParseError {
                line: l0,
                column: c0,
                message: format!("integer `{text}` out of range"),
            })?;
            col += i - start;
            out.push(Spanned {
                tok: Tok::Int(value),
                line: l0,
                column: c0,
            });
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Spanned {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: l0,
                column: c0,
            });
            continue;
        }
        return Err(ParseError {
            line: l0,
            column: c0,
            message: format!("unexpected character `{c}`"),
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    gens: &'a [String],
}

impl<'a> Parser<'a> {
    fn new(src: &str, gens: &'a [String]) -> Result<Self> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            gens,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> Error {
        let t = &self.toks[self.pos];
        Error::Parse(ParseError {
            line: t.line,
            column: t.column,
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {what}, found {:?}", self.peek())))
        }
    }

    fn letter(&self, name: &str) -> Result<(usize, i64)> {
        if let Some(i) = self.gens.iter().position(|g| g == name) {
            return Ok((i, 1));
        }
        if let Some(i) = self.gens.iter().position(|g| inverse_name(g) == name) {
            return Ok((i, -1));
        }
        Err(Error::UndeclaredGenerator(name.to_string()))
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::LParen)
    }

    /// factor := atom [ "^" [ "-" ] integer ]
    fn factor(&mut self, raw: &mut Vec<(usize, i64)>) -> Result<()> {
        let mut atom = Vec::new();
        match self.peek().clone() {
            Tok::Ident(name) => {
                let (g, e) = self.letter(&name).map_err(|e| match e {
                    Error::UndeclaredGenerator(n) => {
                        let t = &self.toks[self.pos];
                        Error::Parse(ParseError {
                            line: t.line,
                            column: t.column,
                            message: format!("undeclared generator `{n}`"),
                        })
                    }
                    other => other,
                })?;
                self.bump();
                atom.push((g, e));
            }
            Tok::LParen => {
                self.bump();
                if !self.starts_factor() {
                    return Err(self.error("empty parenthesised word"));
                }
                while self.starts_factor() {
                    self.factor(&mut atom)?;
                }
                self.expect(Tok::RParen, "`)`")?;
            }
            _ => return Err(self.error("expected a generator or `(`")),
        }
        let mut exp = 1i64;
        if *self.peek() == Tok::Caret {
            self.bump();
            let neg = if *self.peek() == Tok::Minus {
                self.bump();
                true
            } else {
                false
            };
            match self.peek().clone() {
                Tok::Int(n) => {
                    self.bump();
                    exp = if neg { -n } else { n };
                }
                _ => return Err(self.error("expected integer exponent")),
            }
        }
        if exp < 0 {
            let inv: Vec<_> = atom.iter().rev().map(|&(g, e)| (g, -e)).collect();
            for _ in 0..(-exp) {
                raw.extend_from_slice(&inv);
            }
        } else {
            for _ in 0..exp {
                raw.extend_from_slice(&atom);
            }
        }
        Ok(())
    }

    /// Parses a word and returns its raw (unreduced) syllables.
    fn word(&mut self) -> Result<Vec<(usize, i64)>> {
        let mut raw = Vec::new();
        if let Tok::Int(1) = self.peek() {
            self.bump();
            return Ok(raw);
        }
        if !self.starts_factor() {
            return Err(self.error("expected a word"));
        }
        while self.starts_factor() {
            self.factor(&mut raw)?;
        }
        Ok(raw)
    }
}

/// Merges adjacent equal generators without cancelling, so that the
/// result can be compared with the fully reduced word.
fn collapse(raw: &[(usize, i64)]) -> Vec<(usize, i64)> {
    let mut out: Vec<(usize, i64)> = Vec::new();
    for &(g, e) in raw {
        match out.last_mut() {
            Some(last) if last.0 == g => last.1 += e,
            _ => out.push((g, e)),
        }
    }
    out
}

/// Result of parsing a presentation.
#[derive(Clone, Debug)]
pub struct ParsedPresentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
    /// Indices of relators that were not freely reduced as written.
    pub auto_reduced: Vec<usize>,
}

pub(crate) fn parse_presentation_text(src: &str) -> Result<ParsedPresentation> {
    let empty: Vec<String> = Vec::new();
    let mut p = Parser::new(src, &empty)?;
    match p.peek().clone() {
        Tok::Ident(k) if k == "gens" => {
            p.bump();
        }
        _ => return Err(p.error("expected `gens`")),
    }
    let mut generators = Vec::new();
    while let Tok::Ident(name) = p.peek().clone() {
        if !name.chars().next().is_some_and(|c| c.is_ascii_lowercase()) {
            return Err(p.error(format!(
                "generator `{name}` must start with a lowercase letter"
            )));
        }
        if generators.contains(&name) {
            return Err(p.error(format!("duplicate generator `{name}`")));
        }
        generators.push(name);
        p.bump();
    }
    p.expect(Tok::Semi, "`;` after generators")?;
    match p.peek().clone() {
        Tok::Ident(k) if k == "rels" => {
            p.bump();
        }
        _ => return Err(p.error("expected `rels`")),
    }
    let toks = std::mem::take(&mut p.toks);
    let pos = p.pos;
    let mut p = Parser {
        toks,
        pos,
        gens: &generators,
    };
    let mut relators = Vec::new();
    let mut auto_reduced = Vec::new();
    if !matches!(p.peek(), Tok::Semi | Tok::Eof) {
        loop {
            let raw = p.word()?;
            let w = Word::from_syllables(raw.iter().copied());
            if collapse(&raw) != w.syllables() {
                auto_reduced.push(relators.len());
            }
            relators.push(w);
            if *p.peek() == Tok::Comma {
                p.bump();
            } else {
                break;
            }
        }
    }
    if *p.peek() == Tok::Semi {
        p.bump();
    }
    if *p.peek() != Tok::Eof {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(ParsedPresentation {
        generators,
        relators,
        auto_reduced,
    })
}

/// Parses a single word over the given generator names.
pub fn parse_word(src: &str, generators: &[String]) -> Result<Word> {
    let mut p = Parser::new(src, generators)?;
    let raw = p.word()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(Word::from_syllables(raw))
}

/// Parses a group-ring literal into `(word, coefficient)` terms (not yet
/// combined).
pub(crate) fn parse_ring_terms(src: &str, generators: &[String]) -> Result<Vec<(Word, i64)>> {
    let mut p = Parser::new(src, generators)?;
    let mut terms = Vec::new();
    let mut first = true;
    loop {
        let mut sign = 1i64;
        match p.peek() {
            Tok::Plus => {
                p.bump();
            }
            Tok::Minus => {
                p.bump();
                sign = -1;
            }
            Tok::Eof if !first => break,
            _ if first => {}
            _ => return Err(p.error("expected `+` or `-` between terms")),
        }
        first = false;
        let mut coeff = 1i64;
        let mut have_coeff = false;
        if let Tok::Int(n) = p.peek().clone() {
            p.bump();
            coeff = n;
            have_coeff = true;
            if *p.peek() == Tok::Star {
                p.bump();
                if !p.starts_factor() {
                    return Err(p.error("expected a word after `*`"));
                }
            }
        }
        let mut raw = Vec::new();
        if p.starts_factor() {
            while p.starts_factor() {
                p.factor(&mut raw)?;
            }
        } else if !have_coeff {
            return Err(p.error("expected a term"));
        }
        terms.push((Word::from_syllables(raw), sign * coeff));
        if *p.peek() == Tok::Eof {
            break;
        }
    }
    Ok(terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn free_presentation_of_rank_one() {
        let p = parse_presentation_text("gens a; rels ;").unwrap();
        assert_eq!(p.generators, names(&["a"]));
        assert!(p.relators.is_empty());
    }

    #[test]
    fn commutator_relator() {
        let p = parse_presentation_text("gens a b; rels a b A B;").unwrap();
        assert_eq!(p.relators.len(), 1);
        assert_eq!(
            p.relators[0].syllables(),
            &[(0, 1), (1, 1), (0, -1), (1, -1)]
        );
        assert!(p.auto_reduced.is_empty());
    }

    #[test]
    fn powers_expand_like_by_hand() {
        let p = parse_presentation_text("gens a b; rels a a, b b, (a b)^3;").unwrap();
        assert_eq!(p.relators.len(), 3);
        let by_hand = Word::from_syllables([(0, 1), (1, 1), (0, 1), (1, 1), (0, 1), (1, 1)]);
        assert_eq!(p.relators[2], by_hand);
        assert_eq!(p.relators[0], Word::power_of(0, 2));
    }

    #[test]
    fn negative_power_inverts() {
        let g = names(&["a", "b"]);
        let w = parse_word("(a b)^-2", &g).unwrap();
        assert_eq!(w, Word::from_syllables([(1, -1), (0, -1), (1, -1), (0, -1)]));
    }

    #[test]
    fn unreduced_relator_is_flagged() {
        let p = parse_presentation_text("gens a b; rels a b B a;").unwrap();
        assert_eq!(p.auto_reduced, vec![0]);
        assert_eq!(p.relators[0], Word::power_of(0, 2));
    }

    #[test]
    fn undeclared_generator_reports_position() {
        let err = parse_presentation_text("gens a;\nrels a c;").unwrap_err();
        match err {
            Error::Parse(e) => {
                assert_eq!((e.line, e.column), (2, 8));
                assert!(e.message.contains("`c`"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_error_has_line_and_column() {
        let err = parse_presentation_text("gens a\n rels a;").unwrap_err();
        assert!(matches!(err, Error::Parse(ParseError { line: 2, .. })));
    }

    #[test]
    fn ring_terms() {
        let g = names(&["g", "h"]);
        let t = parse_ring_terms("3*g + 2 H - 1", &g).unwrap();
        assert_eq!(
            t,
            vec![
                (Word::generator(0), 3),
                (Word::power_of(1, -1), 2),
                (Word::identity(), -1)
            ]
        );
        let t = parse_ring_terms("-a", &names(&["a"])).unwrap();
        assert_eq!(t, vec![(Word::generator(0), -1)]);
    }
}
