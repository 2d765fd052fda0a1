//! Presentation grammar: `< gens | relations >`.
//!
//! Relations are separated by `;` or `,` and are either bare relator words or
//! chains `w1 = w2 = ... = wk`, which expand to the consecutive relators
//! `w1 w2^-1, w2 w3^-1, ...`. A letter is `x`, `x^-1` or `x^k`; parenthesised
//! subwords take exponents too, and `1` (or an undeclared `id`) is the
//! identity. An undeclared identifier such as `abc` is read as the letters
//! `a b c` when each character is a declared generator.

use thiserror::Error;

use crate::word::{Alphabet, Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("undeclared generator `{name}` at line {line}, column {column}")]
    UndeclaredGenerator { name: String, line: usize, column: usize },
    #[error("presentation declares no generators")]
    EmptyGenerators,
    #[error("generator `{name}` declared more than once")]
    DuplicateGenerator { name: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPresentation {
    pub alphabet: Alphabet,
    pub relators: Vec<Word>,
}

impl GroupPresentation {
    pub fn rank(&self) -> usize {
        self.alphabet.rank()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(u64),
    Sym(char),
    Arrow,
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line = li + 1;
        let body = raw.split('#').next().unwrap_or("");
        let chars: Vec<char> = body.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let name: String = chars[start..i].iter().collect();
                out.push(Token { tok: Tok::Ident(name), line, column });
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                let value = digits.parse().map_err(|_| ParseError::Syntax {
                    line,
                    column,
                    message: format!("integer `{digits}` out of range"),
                })?;
                out.push(Token { tok: Tok::Int(value), line, column });
            } else if c == '-' && chars.get(i + 1) == Some(&'>') {
                out.push(Token { tok: Tok::Arrow, line, column });
                i += 2;
            } else if "<>|,;=()^-".contains(c) {
                out.push(Token { tok: Tok::Sym(c), line, column });
                i += 1;
            } else {
                return Err(ParseError::Syntax { line, column, message: format!("unexpected character `{c}`") });
            }
        }
    }
    Ok(out)
}

pub(crate) struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    end: (usize, usize),
}

impl<'a> Parser<'a> {
    pub fn new(toks: &'a [Token]) -> Parser<'a> {
        let end = toks.last().map(|t| (t.line, t.column + 1)).unwrap_or((1, 1));
        Parser { toks, pos: 0, end }
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|t| (t.line, t.column)).unwrap_or(self.end)
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        let (line, column) = self.here();
        ParseError::Syntax { line, column, message: message.into() }
    }

    fn bump(&mut self) -> Option<&Token> {
        let t = self.toks.get(self.pos);
        self.pos += 1;
        t
    }

    pub fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    pub fn eat_arrow(&mut self) -> bool {
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(_)) | Some(Tok::Int(1)) | Some(Tok::Sym('(')))
    }

    /// Parses a possibly empty product of factors.
    pub fn word(&mut self, alphabet: &Alphabet) -> Result<Word, ParseError> {
        let mut letters = Vec::new();
        while self.starts_factor() {
            let (mut prefix, last) = self.atom(alphabet)?;
            let k = self.exponent()?;
            match last {
                Some(l) if k != 1 => {
                    letters.append(&mut prefix);
                    letters.extend(Word::letter(l).pow(k).into_letters());
                }
                Some(l) => {
                    letters.append(&mut prefix);
                    letters.push(l);
                }
                None => letters.extend(Word::from_letters(prefix).pow(k).into_letters()),
            }
        }
        Ok(Word::from_letters(letters))
    }

    /// Returns the atom's letters; for an identifier the final letter is split
    /// off so that an exponent binds to it alone.
    fn atom(&mut self, alphabet: &Alphabet) -> Result<(Vec<Letter>, Option<Letter>), ParseError> {
        let t = self.bump().cloned().expect("starts_factor checked");
        match t.tok {
            Tok::Int(_) => Ok((Vec::new(), None)),
            Tok::Sym('(') => {
                let inner = self.word(alphabet)?;
                self.expect(')')?;
                Ok((inner.into_letters(), None))
            }
            Tok::Ident(name) => {
                if let Some(g) = alphabet.position(&name) {
                    return Ok((Vec::new(), Some(Letter::new(g, false))));
                }
                if name == "id" {
                    return Ok((Vec::new(), None));
                }
                let mut letters = Vec::new();
                for (offset, ch) in name.chars().enumerate() {
                    match alphabet.position(&ch.to_string()) {
                        Some(g) => letters.push(Letter::new(g, false)),
                        None => {
                            return Err(ParseError::UndeclaredGenerator {
                                name: if name.len() == 1 { name.clone() } else { ch.to_string() },
                                line: t.line,
                                column: t.column + offset,
                            })
                        }
                    }
                }
                let last = letters.pop();
                Ok((letters, last))
            }
            _ => unreachable!(),
        }
    }

    fn exponent(&mut self) -> Result<i64, ParseError> {
        if !self.eat('^') {
            return Ok(1);
        }
        let negative = self.eat('-');
        match self.bump().map(|t| t.tok.clone()) {
            Some(Tok::Int(k)) if k <= i64::MAX as u64 => Ok(if negative { -(k as i64) } else { k as i64 }),
            _ => {
                self.pos -= 1;
                Err(self.error("expected integer exponent"))
            }
        }
    }
}

pub fn parse_presentation(text: &str) -> Result<GroupPresentation, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser::new(&toks);
    p.expect('<')?;
    let mut names: Vec<String> = Vec::new();
    while let Some(Tok::Ident(name)) = p.peek().cloned() {
        if names.contains(&name) {
            return Err(ParseError::DuplicateGenerator { name });
        }
        names.push(name);
        p.pos += 1;
        if !p.eat(',') {
            break;
        }
    }
    if names.is_empty() {
        if p.peek() == Some(&Tok::Sym('|')) {
            return Err(ParseError::EmptyGenerators);
        }
        return Err(p.error("expected generator name"));
    }
    p.expect('|')?;
    let alphabet = Alphabet::new(names);
    let mut relators = Vec::new();
    loop {
        if p.eat('>') {
            break;
        }
        if p.eat(',') || p.eat(';') {
            continue;
        }
        let mut chain = vec![p.word(&alphabet)?];
        while p.eat('=') {
            chain.push(p.word(&alphabet)?);
        }
        if chain.len() == 1 && chain[0].is_empty() {
            return Err(p.error("expected relation"));
        }
        if chain.len() == 1 {
            relators.push(chain.pop().unwrap().free_reduce());
        } else {
            for pair in chain.windows(2) {
                relators.push(pair[0].concat(&pair[1].inverse()).free_reduce());
            }
        }
    }
    if !p.at_end() {
        return Err(p.error("unexpected input after `>`"));
    }
    Ok(GroupPresentation { alphabet, relators })
}

/// Parses a single word over `alphabet`, e.g. `a b^-1 (a b)^2`.
pub fn parse_word(text: &str, alphabet: &Alphabet) -> Result<Word, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser::new(&toks);
    let w = p.word(alphabet)?;
    if !p.at_end() {
        return Err(p.error("unexpected input after word"));
    }
    Ok(w)
}
