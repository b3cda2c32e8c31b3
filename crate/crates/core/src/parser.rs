//! Concrete syntax: lexer, parsers and canonical printers for signatures,
//! terms, formulas, morphisms, finite structures and structure morphisms, plus
//! a JSON tree encoding.
//!
//! Formulas accept the sugar `&`, `->`, `<->`, `forall`, `true`, `false` and
//! desugar it on the spot; terms accept infix `+` and prefix `-` when the
//! signature declares `plus/2` and `minus/1`. Printing is canonical: only the
//! primitive constructors are printed, disjunctions are parenthesized, and
//! applications use prefix notation.
//!
//! Precedence from tightest: `~`, `exists`/`forall`, `&`, `|`, `->` (right
//! associative), `<->`. A quantifier or `~` scopes over the next unary
//! formula only, so `exists x1 . a & b` is `(exists x1 . a) & b`.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::morphism::{LanguageMorphism, Mode, SymbolAssignment};
use crate::ominimal::Theory;
use crate::semantics::FiniteStructure;
use crate::syntax::{Formula, Signature, Term, Var, ORDER_SYMBOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax,
    /// Well-formed text naming unknown symbols, wrong arities, duplicates,
    /// or violating a semantic rule.
    Validation,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{}:{}: {} error: {}", .line, .column, match .kind { ErrorKind::Syntax => "syntax", ErrorKind::Validation => "validation" }, .message)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub kind: ErrorKind,
}

type PResult<T> = Result<T, ParseError>;

pub const KEYWORDS: &[&str] = &[
    "sig",
    "fun",
    "rel",
    "morphism",
    "structure",
    "domain",
    "table",
    "exists",
    "forall",
    "true",
    "false",
];

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Var(u32),
    Num(String),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Num(s) => write!(f, "`{s}`"),
            Tok::Var(i) => write!(f, "`x{i}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

// longest first
const SYMBOLS: &[&str] = &[
    "<->", ":=", "->", "{", "}", "(", ")", "[", "]", ";", ",", ".", ":", "/", "=", "<", "~", "|", "&", "+", "-",
];

fn lex(text: &str) -> PResult<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        let (tline, tcol) = (line, col);
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_' || chars[j] == '\'') {
                j += 1;
            }
            let word: String = chars[start..j].iter().collect();
            let tok = match variable_index(&word) {
                Some(Ok(k)) => Tok::Var(k),
                Some(Err(msg)) => {
                    return Err(ParseError {
                        line: tline,
                        column: tcol,
                        message: msg,
                        kind: ErrorKind::Syntax,
                    })
                }
                None => Tok::Ident(word),
            };
            advance(&mut i, &mut line, &mut col, j - start);
            out.push(Token {
                tok,
                line: tline,
                col: tcol,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            out.push(Token {
                tok: Tok::Num(chars[start..j].iter().collect()),
                line: tline,
                col: tcol,
            });
            advance(&mut i, &mut line, &mut col, j - start);
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                out.push(Token {
                    tok: Tok::Sym(s),
                    line: tline,
                    col: tcol,
                });
                advance(&mut i, &mut line, &mut col, s.chars().count());
            }
            None => {
                return Err(ParseError {
                    line: tline,
                    column: tcol,
                    message: format!("unexpected character `{c}`"),
                    kind: ErrorKind::Syntax,
                })
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

fn variable_index(word: &str) -> Option<Result<u32, String>> {
    let digits = word.strip_prefix('x')?;
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    if digits.len() > 1 && digits.starts_with('0') {
        return Some(Err(format!("variable `{word}` has a leading zero")));
    }
    Some(
        digits
            .parse()
            .map_err(|_| format!("variable index of `{word}` is too large")),
    )
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    sig: Option<&'a Signature>,
}

impl<'a> Parser<'a> {
    fn new(text: &str, sig: Option<&'a Signature>) -> PResult<Self> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
            sig,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, at: (usize, usize), kind: ErrorKind, message: impl Into<String>) -> ParseError {
        ParseError {
            line: at.0,
            column: at.1,
            message: message.into(),
            kind,
        }
    }

    fn syntax(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.here(), ErrorKind::Syntax, message)
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        self.syntax(format!("expected {wanted}, found {}", self.peek()))
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> PResult<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{s}`")))
        }
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(t) if t == w)
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.is_word(w) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_word(&mut self, w: &str) -> PResult<()> {
        if self.eat_word(w) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{w}`")))
        }
    }

    fn expect_eof(&mut self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    /// A symbol or document name: an identifier that is not a keyword.
    fn name(&mut self) -> PResult<(String, (usize, usize))> {
        let at = self.here();
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok((s, at))
            }
            Tok::Ident(s) => Err(self.syntax(format!("keyword `{s}` cannot be used as a name"))),
            _ => Err(self.unexpected("a name")),
        }
    }

    fn relation_name(&mut self) -> PResult<(String, (usize, usize))> {
        let at = self.here();
        if self.eat("<") {
            Ok((ORDER_SYMBOL.to_string(), at))
        } else {
            self.name()
        }
    }

    fn number(&mut self) -> PResult<usize> {
        match self.peek().clone() {
            Tok::Num(s) => {
                let n = s
                    .parse()
                    .map_err(|_| self.syntax(format!("number `{s}` is too large")))?;
                self.bump();
                Ok(n)
            }
            _ => Err(self.unexpected("a number")),
        }
    }

    fn sig(&self) -> &'a Signature {
        self.sig.expect("term and formula parsing always has a signature")
    }

    fn check_function(&self, name: &str, arity: usize, at: (usize, usize)) -> PResult<()> {
        match self.sig().function_arity(name) {
            Some(n) if n == arity => Ok(()),
            Some(n) => Err(self.error_at(
                at,
                ErrorKind::Validation,
                format!("function `{name}` has arity {n}, applied to {arity} arguments"),
            )),
            None if self.sig().relation_arity(name).is_some() => Err(self.error_at(
                at,
                ErrorKind::Validation,
                format!("`{name}` is a relation symbol, used as a function"),
            )),
            None => Err(self.error_at(
                at,
                ErrorKind::Validation,
                format!("unknown function symbol `{name}` in signature {}", self.sig().name()),
            )),
        }
    }

    fn check_relation(&self, name: &str, arity: usize, at: (usize, usize)) -> PResult<()> {
        match self.sig().relation_arity(name) {
            Some(n) if n == arity => Ok(()),
            Some(n) => Err(self.error_at(
                at,
                ErrorKind::Validation,
                format!("relation `{name}` has arity {n}, applied to {arity} arguments"),
            )),
            None if self.sig().function_arity(name).is_some() => Err(self.error_at(
                at,
                ErrorKind::Validation,
                format!("`{name}` is a function symbol, used as a relation"),
            )),
            None => Err(self.error_at(
                at,
                ErrorKind::Validation,
                format!("unknown relation symbol `{name}` in signature {}", self.sig().name()),
            )),
        }
    }

    // terms

    fn term(&mut self) -> PResult<Term> {
        let first = self.prefix_term()?;
        self.sum_rest(first)
    }

    fn sum_rest(&mut self, mut acc: Term) -> PResult<Term> {
        while self.is_sym("+") {
            let at = self.here();
            self.bump();
            let rhs = self.prefix_term()?;
            self.check_function("plus", 2, at)?;
            acc = Term::App("plus".into(), vec![acc, rhs]);
        }
        Ok(acc)
    }

    fn prefix_term(&mut self) -> PResult<Term> {
        if self.is_sym("-") {
            let at = self.here();
            self.bump();
            let inner = self.prefix_term()?;
            self.check_function("minus", 1, at)?;
            return Ok(Term::App("minus".into(), vec![inner]));
        }
        self.primary_term()
    }

    fn primary_term(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Var(i) => {
                self.bump();
                Ok(Term::Var(Var(i)))
            }
            Tok::Sym("(") => {
                self.bump();
                let t = self.term()?;
                self.expect(")")?;
                Ok(t)
            }
            Tok::Ident(_) => {
                let (name, at) = self.name()?;
                let args = self.arguments()?;
                self.check_function(&name, args.len(), at)?;
                Ok(Term::App(name, args))
            }
            _ => Err(self.unexpected("a term")),
        }
    }

    fn arguments(&mut self) -> PResult<Vec<Term>> {
        self.expect("(")?;
        let mut args = Vec::new();
        if self.eat(")") {
            return Ok(args);
        }
        loop {
            args.push(self.term()?);
            if self.eat(")") {
                return Ok(args);
            }
            if !self.eat(",") {
                return Err(self.unexpected("`,` or `)`"));
            }
        }
    }

    // formulas

    fn formula(&mut self) -> PResult<Formula> {
        let mut left = self.implication()?;
        while self.eat("<->") {
            let right = self.implication()?;
            left = Formula::and(
                Formula::implies(left.clone(), right.clone()),
                Formula::implies(right, left),
            );
        }
        Ok(left)
    }

    fn implication(&mut self) -> PResult<Formula> {
        let left = self.disjunction()?;
        if self.eat("->") {
            let right = self.implication()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut left = self.conjunction()?;
        while self.eat("|") {
            let right = self.conjunction()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut left = self.unary()?;
        while self.eat("&") {
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> PResult<Formula> {
        if self.eat("~") {
            return Ok(Formula::not(self.unary()?));
        }
        for (word, universal) in [("exists", false), ("forall", true)] {
            if self.eat_word(word) {
                let v = match self.peek().clone() {
                    Tok::Var(i) => {
                        self.bump();
                        Var(i)
                    }
                    _ => return Err(self.unexpected("a variable")),
                };
                self.expect(".")?;
                let body = self.unary()?;
                return Ok(if universal {
                    Formula::forall(v, body)
                } else {
                    Formula::exists(v, body)
                });
            }
        }
        if self.eat_word("true") {
            return Ok(Formula::truth());
        }
        if self.eat_word("false") {
            return Ok(Formula::falsity());
        }
        if self.is_sym("(") {
            // either a parenthesized formula or an atom whose first term is
            // parenthesized; keep whichever parse gets further
            let start = self.pos;
            let as_atom = self.atom();
            let atom_end = self.pos;
            self.pos = start;
            self.bump();
            let as_formula = self.formula().and_then(|f| self.expect(")").map(|_| f));
            let formula_end = self.pos;
            return match (as_atom, as_formula) {
                (Ok(a), Err(_)) => {
                    self.pos = atom_end;
                    Ok(a)
                }
                (_, Ok(f)) => {
                    self.pos = formula_end;
                    Ok(f)
                }
                (Err(ea), Err(ef)) => Err(if (ea.line, ea.column) > (ef.line, ef.column) {
                    ea
                } else {
                    ef
                }),
            };
        }
        self.atom()
    }

    fn atom(&mut self) -> PResult<Formula> {
        let left = if let (Tok::Ident(_), Tok::Sym("(")) = (self.peek(), self.peek_at(1)) {
            let (name, at) = self.name()?;
            let args = self.arguments()?;
            if !(self.is_sym("=") || self.is_sym("<") || self.is_sym("+")) {
                self.check_relation(&name, args.len(), at)?;
                return Ok(Formula::Rel(name, args));
            }
            self.check_function(&name, args.len(), at)?;
            self.sum_rest(Term::App(name, args))?
        } else {
            self.term()?
        };
        let at = self.here();
        if self.eat("=") {
            return Ok(Formula::Eq(left, self.term()?));
        }
        if self.eat("<") {
            let right = self.term()?;
            self.check_relation(ORDER_SYMBOL, 2, at)?;
            return Ok(Formula::lt(left, right));
        }
        Err(self.unexpected("`=` or `<`"))
    }

    // documents

    fn signature_body(&mut self, name: String) -> PResult<Signature> {
        let mut sig = Signature::new(name);
        self.expect("{")?;
        while !self.eat("}") {
            let is_fun = if self.eat_word("fun") {
                true
            } else if self.eat_word("rel") {
                false
            } else {
                return Err(self.unexpected("`fun`, `rel` or `}`"));
            };
            let (sym, at) = if is_fun { self.name()? } else { self.relation_name()? };
            self.expect("/")?;
            let arity = self.number()?;
            self.expect(";")?;
            let added = if is_fun {
                sig.add_function(sym, arity)
            } else {
                sig.add_relation(sym, arity)
            };
            added.map_err(|e| self.error_at(at, ErrorKind::Validation, e.to_string()))?;
        }
        Ok(sig)
    }

    fn signature_doc(&mut self) -> PResult<Signature> {
        self.expect_word("sig")?;
        let (name, _) = self.name()?;
        self.signature_body(name)
    }

    fn with_signature<T>(&mut self, sig: &Signature, f: impl FnOnce(&mut Parser<'_>) -> PResult<T>) -> PResult<T> {
        let mut inner = Parser {
            toks: std::mem::take(&mut self.toks),
            pos: self.pos,
            sig: Some(sig),
        };
        let out = f(&mut inner);
        self.toks = inner.toks;
        self.pos = inner.pos;
        out
    }

    fn morphism_doc(
        &mut self,
        resolve: &dyn Fn(&str) -> Option<Signature>,
    ) -> PResult<(String, SymbolAssignment, (usize, usize))> {
        let header = self.here();
        self.expect_word("morphism")?;
        let (name, _) = self.name()?;
        self.expect(":")?;
        let (src_name, src_at) = self.name()?;
        self.expect("->")?;
        let (dst_name, dst_at) = self.name()?;
        let source = resolve(&src_name)
            .ok_or_else(|| self.error_at(src_at, ErrorKind::Validation, format!("unknown signature `{src_name}`")))?;
        let target = resolve(&dst_name)
            .ok_or_else(|| self.error_at(dst_at, ErrorKind::Validation, format!("unknown signature `{dst_name}`")))?;
        let mode = if self.eat_word("generalized") {
            Mode::Generalized
        } else {
            Mode::Strict
        };
        let mut a = SymbolAssignment::new(source.clone(), target.clone(), mode);
        self.expect("{")?;
        while !self.eat("}") {
            let is_fun = if self.eat_word("fun") {
                true
            } else if self.eat_word("rel") {
                false
            } else {
                return Err(self.unexpected("`fun`, `rel` or `}`"));
            };
            let (sym, at) = if is_fun { self.name()? } else { self.relation_name()? };
            let known = if is_fun {
                source.function_arity(&sym).is_some()
            } else {
                source.relation_arity(&sym).is_some()
            };
            if !known {
                let kind = if is_fun { "function" } else { "relation" };
                return Err(self.error_at(
                    at,
                    ErrorKind::Validation,
                    format!("signature {} has no {kind} symbol `{sym}`", source.name()),
                ));
            }
            let taken = if is_fun {
                a.fun_map.contains_key(&sym)
            } else {
                a.rel_map.contains_key(&sym)
            };
            if taken {
                return Err(self.error_at(at, ErrorKind::Validation, format!("second clause for `{sym}`")));
            }
            self.expect(":=")?;
            if is_fun {
                let t = self.with_signature(&target, |p| p.term())?;
                a.fun_map.insert(sym, t);
            } else {
                let phi = self.with_signature(&target, |p| p.formula())?;
                a.rel_map.insert(sym, phi);
            }
            self.expect(";")?;
        }
        Ok((name, a, header))
    }

    fn table(&mut self, arity: usize, size: usize, out: &mut Vec<usize>) -> PResult<()> {
        if arity == 0 {
            let at = self.here();
            let v = self.number()?;
            if v >= size {
                return Err(self.error_at(
                    at,
                    ErrorKind::Validation,
                    format!("value {v} is outside the domain 0..{size}"),
                ));
            }
            out.push(v);
            return Ok(());
        }
        let at = self.here();
        self.expect("[")?;
        let mut count = 0;
        if !self.is_sym("]") {
            loop {
                self.table(arity - 1, size, out)?;
                count += 1;
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect("]")?;
        if count != size {
            return Err(self.error_at(
                at,
                ErrorKind::Validation,
                format!("table row has {count} entries, domain has {size} elements"),
            ));
        }
        Ok(())
    }

    fn tuple_set(&mut self, arity: usize, size: usize) -> PResult<Vec<Vec<usize>>> {
        self.expect("{")?;
        let mut out = Vec::new();
        if self.eat("}") {
            return Ok(out);
        }
        loop {
            let at = self.here();
            self.expect("(")?;
            let mut t = Vec::new();
            if !self.is_sym(")") {
                loop {
                    let vat = self.here();
                    let v = self.number()?;
                    if v >= size {
                        return Err(self.error_at(
                            vat,
                            ErrorKind::Validation,
                            format!("element {v} is outside the domain 0..{size}"),
                        ));
                    }
                    t.push(v);
                    if !self.eat(",") {
                        break;
                    }
                }
            }
            self.expect(")")?;
            if t.len() != arity {
                return Err(self.error_at(
                    at,
                    ErrorKind::Validation,
                    format!("tuple has {} entries, relation has arity {arity}", t.len()),
                ));
            }
            out.push(t);
            if self.eat("}") {
                return Ok(out);
            }
            if !self.eat(",") {
                return Err(self.unexpected("`,` or `}`"));
            }
        }
    }

    fn structure_doc(&mut self, resolve: &dyn Fn(&str) -> Option<Signature>) -> PResult<(String, FiniteStructure)> {
        let header = self.here();
        self.expect_word("structure")?;
        let (name, _) = self.name()?;
        self.expect(":")?;
        let (sig_name, sig_at) = self.name()?;
        let sig = resolve(&sig_name)
            .ok_or_else(|| self.error_at(sig_at, ErrorKind::Validation, format!("unknown signature `{sig_name}`")))?;
        let ordered = self.eat_word("ordered");
        self.expect("{")?;
        self.expect_word("domain")?;
        let dom_at = self.here();
        let size = self.number()?;
        if size == 0 {
            return Err(self.error_at(dom_at, ErrorKind::Validation, "domain must be nonempty"));
        }
        self.expect(";")?;
        let mut functions = BTreeMap::new();
        let mut relations = BTreeMap::new();
        while !self.eat("}") {
            let is_fun = if self.eat_word("fun") {
                true
            } else if self.eat_word("rel") {
                false
            } else {
                return Err(self.unexpected("`fun`, `rel` or `}`"));
            };
            let (sym, at) = if is_fun { self.name()? } else { self.relation_name()? };
            let arity = if is_fun {
                sig.function_arity(&sym)
            } else {
                sig.relation_arity(&sym)
            };
            let Some(arity) = arity else {
                let kind = if is_fun { "function" } else { "relation" };
                return Err(self.error_at(
                    at,
                    ErrorKind::Validation,
                    format!("signature {} has no {kind} symbol `{sym}`", sig.name()),
                ));
            };
            if functions.contains_key(&sym) || relations.contains_key(&sym) {
                return Err(self.error_at(at, ErrorKind::Validation, format!("second clause for `{sym}`")));
            }
            self.expect(":=")?;
            if is_fun {
                self.expect_word("table")?;
                let mut t = Vec::new();
                self.table(arity, size, &mut t)?;
                functions.insert(sym, t);
            } else {
                relations.insert(sym, self.tuple_set(arity, size)?);
            }
            self.expect(";")?;
        }
        let m = FiniteStructure::new(sig, size, functions, relations)
            .map_err(|e| self.error_at(header, ErrorKind::Validation, e.to_string()))?;
        if ordered {
            m.order_check().map_err(|v| {
                self.error_at(
                    header,
                    ErrorKind::Validation,
                    format!("declared ordered but `<` is not a strict total order: {v}"),
                )
            })?;
        }
        Ok((name, m))
    }
}

fn finish<T>(p: &mut Parser<'_>, out: T) -> PResult<T> {
    p.expect_eof()?;
    Ok(out)
}

pub fn parse_signature(text: &str) -> PResult<Signature> {
    let mut p = Parser::new(text, None)?;
    let sig = p.signature_doc()?;
    finish(&mut p, sig)
}

pub fn parse_term(text: &str, sig: &Signature) -> PResult<Term> {
    let mut p = Parser::new(text, Some(sig))?;
    let t = p.term()?;
    finish(&mut p, t)
}

pub fn parse_formula(text: &str, sig: &Signature) -> PResult<Formula> {
    let mut p = Parser::new(text, Some(sig))?;
    let f = p.formula()?;
    finish(&mut p, f)
}

fn resolver<'s>(sigs: &'s [&'s Signature]) -> impl Fn(&str) -> Option<Signature> + 's {
    move |name: &str| sigs.iter().find(|s| s.name() == name).map(|s| (*s).clone())
}

/// Parses a morphism document between the two given signatures, matched by
/// name. The clauses are checked against the signatures but the morphism
/// rules are not; see [`SymbolAssignment::validate`].
pub fn parse_morphism(text: &str, source: &Signature, target: &Signature) -> PResult<SymbolAssignment> {
    let mut p = Parser::new(text, None)?;
    let sigs = [source, target];
    let (_, a, _) = p.morphism_doc(&resolver(&sigs))?;
    finish(&mut p, a)
}

/// Parses a morphism document and checks the morphism rules.
pub fn parse_language_morphism(text: &str, source: &Signature, target: &Signature) -> PResult<LanguageMorphism> {
    let mut p = Parser::new(text, None)?;
    let sigs = [source, target];
    let (_, a, at) = p.morphism_doc(&resolver(&sigs))?;
    p.expect_eof()?;
    validated(a, at)
}

fn validated(a: SymbolAssignment, at: (usize, usize)) -> PResult<LanguageMorphism> {
    LanguageMorphism::new(a).map_err(|e| ParseError {
        line: at.0,
        column: at.1,
        message: e.to_string(),
        kind: ErrorKind::Validation,
    })
}

pub fn parse_structure(text: &str, sig: &Signature) -> PResult<FiniteStructure> {
    let mut p = Parser::new(text, None)?;
    let sigs = [sig];
    let (_, m) = p.structure_doc(&resolver(&sigs))?;
    finish(&mut p, m)
}

// printing

fn write_args(f: &mut fmt::Formatter<'_>, args: &[Term]) -> fmt::Result {
    write!(f, "(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{a}")?;
    }
    write!(f, ")")
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(name, args) => {
                write!(f, "{name}")?;
                write_args(f, args)
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Eq(l, r) => write!(f, "{l} = {r}"),
            Formula::Rel(name, args) if name == ORDER_SYMBOL && args.len() == 2 => {
                write!(f, "{} < {}", args[0], args[1])
            }
            Formula::Rel(name, args) => {
                write!(f, "{name}")?;
                write_args(f, args)
            }
            Formula::Not(a) => write!(f, "~{a}"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Exists(v, a) => write!(f, "exists {v} . {a}"),
        }
    }
}

pub fn print_term(t: &Term) -> String {
    t.to_string()
}

pub fn print_formula(phi: &Formula) -> String {
    phi.to_string()
}

pub fn print_signature(sig: &Signature) -> String {
    let mut out = format!("sig {} {{", sig.name());
    for (f, n) in sig.functions() {
        out += &format!(" fun {f}/{n};");
    }
    for (r, n) in sig.relations() {
        out += &format!(" rel {r}/{n};");
    }
    out + " }"
}

pub fn print_morphism(name: &str, a: &SymbolAssignment) -> String {
    let mode = match a.mode {
        Mode::Strict => "",
        Mode::Generalized => " generalized",
    };
    let mut out = format!(
        "morphism {name} : {} -> {}{mode} {{\n",
        a.source.name(),
        a.target.name()
    );
    for (f, t) in &a.fun_map {
        out += &format!("  fun {f} := {t};\n");
    }
    for (r, phi) in &a.rel_map {
        out += &format!("  rel {r} := {phi};\n");
    }
    out + "}"
}

fn print_table(table: &[usize], arity: usize, size: usize) -> String {
    if arity == 0 {
        return table[0].to_string();
    }
    let stride = table.len() / size;
    let rows: Vec<String> = (0..size)
        .map(|i| print_table(&table[i * stride..(i + 1) * stride], arity - 1, size))
        .collect();
    format!("[{}]", rows.join(", "))
}

pub fn print_structure(name: &str, m: &FiniteStructure) -> String {
    let sig = m.signature();
    let ordered = if m.is_ordered() { " ordered" } else { "" };
    let mut out = format!(
        "structure {name} : {}{ordered} {{\n  domain {};\n",
        sig.name(),
        m.size()
    );
    for (f, n) in sig.functions() {
        let table = m.function_table(f).expect("every function is interpreted");
        out += &format!("  fun {f} := table {};\n", print_table(table, n, m.size()));
    }
    for (r, _) in sig.relations() {
        let ts: Vec<String> = m
            .relation_tuples(r)
            .iter()
            .map(|t| format!("({})", t.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(", ")))
            .collect();
        out += &format!("  rel {r} := {{{}}};\n", ts.join(", "));
    }
    out + "}"
}

/// A structure morphism `(H, alpha)` as written in a document: `alpha` maps
/// the elements of the target structure to the source structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrMorphismDecl {
    pub source: String,
    pub target: String,
    pub via: String,
    pub alpha: Vec<usize>,
}

pub fn print_str_morphism(name: &str, d: &StrMorphismDecl) -> String {
    let alpha: Vec<String> = d.alpha.iter().map(|a| a.to_string()).collect();
    format!(
        "strmorphism {name} : {} -> {} via {} {{\n  alpha := [{}];\n}}",
        d.source,
        d.target,
        d.via,
        alpha.join(", ")
    )
}

// JSON tree encoding

pub fn term_json(t: &Term) -> Value {
    match t {
        Term::Var(v) => json!({"kind": "var", "index": v.0}),
        Term::App(name, args) => {
            json!({"kind": "app", "symbol": name, "children": args.iter().map(term_json).collect::<Vec<_>>()})
        }
    }
}

pub fn formula_json(phi: &Formula) -> Value {
    match phi {
        Formula::Eq(l, r) => json!({"kind": "eq", "children": [term_json(l), term_json(r)]}),
        Formula::Rel(name, args) => {
            json!({"kind": "rel", "symbol": name, "children": args.iter().map(term_json).collect::<Vec<_>>()})
        }
        Formula::Not(a) => json!({"kind": "not", "children": [formula_json(a)]}),
        Formula::Or(a, b) => json!({"kind": "or", "children": [formula_json(a), formula_json(b)]}),
        Formula::Exists(v, a) => json!({"kind": "exists", "var": v.0, "children": [formula_json(a)]}),
    }
}

pub fn signature_json(sig: &Signature) -> Value {
    json!({
        "kind": "signature",
        "name": sig.name(),
        "functions": sig.functions().map(|(f, n)| json!({"symbol": f, "arity": n})).collect::<Vec<_>>(),
        "relations": sig.relations().map(|(r, n)| json!({"symbol": r, "arity": n})).collect::<Vec<_>>(),
    })
}

pub fn morphism_json(name: &str, a: &SymbolAssignment) -> Value {
    json!({
        "kind": "morphism",
        "name": name,
        "source": a.source.name(),
        "target": a.target.name(),
        "mode": match a.mode { Mode::Strict => "strict", Mode::Generalized => "generalized" },
        "functions": a.fun_map.iter().map(|(f, t)| json!({"symbol": f, "image": term_json(t)})).collect::<Vec<_>>(),
        "relations": a.rel_map.iter().map(|(r, phi)| json!({"symbol": r, "image": formula_json(phi)})).collect::<Vec<_>>(),
    })
}

pub fn structure_json(name: &str, m: &FiniteStructure) -> Value {
    let sig = m.signature();
    json!({
        "kind": "structure",
        "name": name,
        "signature": sig.name(),
        "domain": m.size(),
        "ordered": m.is_ordered(),
        "functions": sig.functions().map(|(f, n)| json!({
            "symbol": f,
            "arity": n,
            "table": m.function_table(f).expect("interpreted"),
        })).collect::<Vec<_>>(),
        "relations": sig.relations().map(|(r, n)| json!({
            "symbol": r,
            "arity": n,
            "tuples": m.relation_tuples(r),
        })).collect::<Vec<_>>(),
    })
}

/// The leading keyword of a document.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum DocumentKind {
    Signature,
    Morphism,
    Structure,
    Formula,
    Term,
    StrMorphism,
}

impl DocumentKind {
    fn keyword(self) -> &'static str {
        match self {
            DocumentKind::Signature => "sig",
            DocumentKind::Morphism => "morphism",
            DocumentKind::Structure => "structure",
            DocumentKind::Formula => "formula",
            DocumentKind::Term => "term",
            DocumentKind::StrMorphism => "strmorphism",
        }
    }
}

/// A single document and its kind, read off its leading keyword.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceDocument {
    pub kind: DocumentKind,
    pub text: String,
}

impl SourceDocument {
    pub fn new(text: impl Into<String>) -> PResult<Self> {
        let text = text.into();
        let p = Parser::new(&text, None)?;
        let kind = document_kind(p.peek()).ok_or_else(|| p.unexpected("a document keyword"))?;
        Ok(SourceDocument { kind, text })
    }
}

fn document_kind(t: &Tok) -> Option<DocumentKind> {
    use DocumentKind::*;
    let Tok::Ident(w) = t else { return None };
    [Signature, Morphism, Structure, Formula, Term, StrMorphism]
        .into_iter()
        .find(|k| k.keyword() == w)
}

/// Named documents loaded from one or more `.fol` texts. Later documents may
/// refer to earlier ones; the signatures `DLO` and `ODAG` are predeclared.
#[derive(Clone, Debug, Default)]
pub struct Workspace {
    signatures: BTreeMap<String, Signature>,
    morphisms: BTreeMap<String, SymbolAssignment>,
    structures: BTreeMap<String, FiniteStructure>,
    formulas: BTreeMap<String, (String, Formula)>,
    terms: BTreeMap<String, (String, Term)>,
    str_morphisms: BTreeMap<String, StrMorphismDecl>,
    order: Vec<(DocumentKind, String)>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LookupError {
    #[error("no {kind} named `{name}`")]
    Missing { kind: &'static str, name: String },
    #[error("morphism `{name}` is invalid: {reason}")]
    Invalid { name: String, reason: String },
}

impl Workspace {
    pub fn new() -> Self {
        let mut ws = Workspace::default();
        for th in [Theory::Dlo, Theory::Odag] {
            ws.signatures.insert(th.name().to_string(), th.signature());
        }
        ws
    }

    pub fn from_text(text: &str) -> PResult<Self> {
        let mut ws = Workspace::new();
        ws.load(text)?;
        Ok(ws)
    }

    fn taken(&self, name: &str) -> bool {
        self.signatures.contains_key(name)
            || self.morphisms.contains_key(name)
            || self.structures.contains_key(name)
            || self.formulas.contains_key(name)
            || self.terms.contains_key(name)
            || self.str_morphisms.contains_key(name)
    }

    /// Adds every document of `text`; on error nothing is added.
    pub fn load(&mut self, text: &str) -> PResult<()> {
        let mut scratch = self.clone();
        let mut p = Parser::new(text, None)?;
        while *p.peek() != Tok::Eof {
            scratch.document(&mut p)?;
        }
        *self = scratch;
        Ok(())
    }

    fn claim(&self, p: &Parser<'_>, name: &str, at: (usize, usize)) -> PResult<()> {
        if self.taken(name) {
            return Err(p.error_at(at, ErrorKind::Validation, format!("name `{name}` is already defined")));
        }
        Ok(())
    }

    fn document(&mut self, p: &mut Parser<'_>) -> PResult<()> {
        let kind = document_kind(p.peek()).ok_or_else(|| p.unexpected("a document keyword"))?;
        let name_at = (p.toks[p.pos + 1].line, p.toks[p.pos + 1].col);
        let sigs = self.signatures.clone();
        let resolve = move |n: &str| sigs.get(n).cloned();
        let name = match kind {
            DocumentKind::Signature => {
                let sig = p.signature_doc()?;
                let name = sig.name().to_string();
                self.claim(p, &name, name_at)?;
                self.signatures.insert(name.clone(), sig);
                name
            }
            DocumentKind::Morphism => {
                let (name, a, _) = p.morphism_doc(&resolve)?;
                self.claim(p, &name, name_at)?;
                self.morphisms.insert(name.clone(), a);
                name
            }
            DocumentKind::Structure => {
                let (name, m) = p.structure_doc(&resolve)?;
                self.claim(p, &name, name_at)?;
                self.structures.insert(name.clone(), m);
                name
            }
            DocumentKind::Formula | DocumentKind::Term => {
                p.bump();
                let (name, _) = p.name()?;
                self.claim(p, &name, name_at)?;
                p.expect(":")?;
                let (sig_name, sig_at) = p.name()?;
                let sig = resolve(&sig_name).ok_or_else(|| {
                    p.error_at(sig_at, ErrorKind::Validation, format!("unknown signature `{sig_name}`"))
                })?;
                p.expect(":=")?;
                if kind == DocumentKind::Formula {
                    let phi = p.with_signature(&sig, |q| q.formula())?;
                    self.formulas.insert(name.clone(), (sig_name, phi));
                } else {
                    let t = p.with_signature(&sig, |q| q.term())?;
                    self.terms.insert(name.clone(), (sig_name, t));
                }
                p.expect(";")?;
                name
            }
            DocumentKind::StrMorphism => {
                p.bump();
                let (name, _) = p.name()?;
                self.claim(p, &name, name_at)?;
                p.expect(":")?;
                let mut refs = Vec::new();
                for (sep, kind) in [
                    (None, "structure"),
                    (Some("->"), "structure"),
                    (Some("via"), "morphism"),
                ] {
                    match sep {
                        Some("->") => p.expect("->")?,
                        Some(w) => p.expect_word(w)?,
                        None => {}
                    }
                    let (r, at) = p.name()?;
                    let known = if kind == "structure" {
                        self.structures.contains_key(&r)
                    } else {
                        self.morphisms.contains_key(&r)
                    };
                    if !known {
                        return Err(p.error_at(at, ErrorKind::Validation, format!("unknown {kind} `{r}`")));
                    }
                    refs.push(r);
                }
                p.expect("{")?;
                p.expect_word("alpha")?;
                p.expect(":=")?;
                p.expect("[")?;
                let mut alpha = Vec::new();
                if !p.is_sym("]") {
                    loop {
                        alpha.push(p.number()?);
                        if !p.eat(",") {
                            break;
                        }
                    }
                }
                p.expect("]")?;
                p.expect(";")?;
                p.expect("}")?;
                let via = refs.pop().unwrap();
                let target = refs.pop().unwrap();
                let source = refs.pop().unwrap();
                self.str_morphisms.insert(
                    name.clone(),
                    StrMorphismDecl {
                        source,
                        target,
                        via,
                        alpha,
                    },
                );
                name
            }
        };
        self.order.push((kind, name));
        Ok(())
    }

    /// Document names in load order (predeclared signatures excluded).
    pub fn documents(&self) -> &[(DocumentKind, String)] {
        &self.order
    }

    pub fn signature(&self, name: &str) -> Result<&Signature, LookupError> {
        self.signatures.get(name).ok_or(LookupError::Missing {
            kind: "signature",
            name: name.into(),
        })
    }

    pub fn assignment(&self, name: &str) -> Result<&SymbolAssignment, LookupError> {
        self.morphisms.get(name).ok_or(LookupError::Missing {
            kind: "morphism",
            name: name.into(),
        })
    }

    pub fn morphism(&self, name: &str) -> Result<LanguageMorphism, LookupError> {
        LanguageMorphism::new(self.assignment(name)?.clone()).map_err(|e| LookupError::Invalid {
            name: name.into(),
            reason: e.to_string(),
        })
    }

    pub fn structure(&self, name: &str) -> Result<&FiniteStructure, LookupError> {
        self.structures.get(name).ok_or(LookupError::Missing {
            kind: "structure",
            name: name.into(),
        })
    }

    pub fn formula(&self, name: &str) -> Result<&(String, Formula), LookupError> {
        self.formulas.get(name).ok_or(LookupError::Missing {
            kind: "formula",
            name: name.into(),
        })
    }

    pub fn term(&self, name: &str) -> Result<&(String, Term), LookupError> {
        self.terms.get(name).ok_or(LookupError::Missing {
            kind: "term",
            name: name.into(),
        })
    }

    pub fn str_morphism(&self, name: &str) -> Result<&StrMorphismDecl, LookupError> {
        self.str_morphisms.get(name).ok_or(LookupError::Missing {
            kind: "strmorphism",
            name: name.into(),
        })
    }

    pub fn morphism_names(&self) -> impl Iterator<Item = &str> {
        self.morphisms.keys().map(String::as_str)
    }

    pub fn structure_names(&self) -> impl Iterator<Item = &str> {
        self.structures.keys().map(String::as_str)
    }

    /// Canonical text of every loaded document, in load order.
    pub fn print(&self) -> String {
        let mut out = Vec::new();
        for (kind, name) in &self.order {
            out.push(match kind {
                DocumentKind::Signature => print_signature(&self.signatures[name]),
                DocumentKind::Morphism => print_morphism(name, &self.morphisms[name]),
                DocumentKind::Structure => print_structure(name, &self.structures[name]),
                DocumentKind::Formula => {
                    let (s, phi) = &self.formulas[name];
                    format!("formula {name} : {s} := {phi};")
                }
                DocumentKind::Term => {
                    let (s, t) = &self.terms[name];
                    format!("term {name} : {s} := {t};")
                }
                DocumentKind::StrMorphism => print_str_morphism(name, &self.str_morphisms[name]),
            });
        }
        out.join("\n\n") + "\n"
    }

    pub fn to_json(&self) -> Value {
        let docs: Vec<Value> = self
            .order
            .iter()
            .map(|(kind, name)| match kind {
                DocumentKind::Signature => signature_json(&self.signatures[name]),
                DocumentKind::Morphism => morphism_json(name, &self.morphisms[name]),
                DocumentKind::Structure => structure_json(name, &self.structures[name]),
                DocumentKind::Formula => {
                    let (s, phi) = &self.formulas[name];
                    json!({"kind": "formula", "name": name, "signature": s, "formula": formula_json(phi)})
                }
                DocumentKind::Term => {
                    let (s, t) = &self.terms[name];
                    json!({"kind": "term", "name": name, "signature": s, "term": term_json(t)})
                }
                DocumentKind::StrMorphism => {
                    let d = &self.str_morphisms[name];
                    json!({"kind": "strmorphism", "name": name, "source": d.source, "target": d.target, "via": d.via, "alpha": d.alpha})
                }
            })
            .collect();
        json!({"documents": docs})
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{app, enumerate_formulas, var, EnumBounds};

    fn sig() -> Signature {
        parse_signature("sig L { fun plus/2; fun zero/0; rel P/1; }").unwrap()
    }

    #[test]
    fn signature_example() {
        let s = sig();
        assert_eq!(s.function_arity("plus"), Some(2));
        assert_eq!(s.function_arity("zero"), Some(0));
        assert_eq!(s.relation_arity("P"), Some(1));
        assert_eq!(print_signature(&s), "sig L { fun plus/2; fun zero/0; rel P/1; }");
        let e = parse_signature("sig L { fun plus/2; fun plus/1; }").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Validation);
        assert_eq!((e.line, e.column), (1, 25));
    }

    #[test]
    fn formula_example() {
        let phi = parse_formula("exists x1 . plus(x0,x1) = zero()", &sig()).unwrap();
        let expected = Formula::exists(
            Var(1),
            Formula::eq(app("plus", vec![var(0), var(1)]), app("zero", vec![])),
        );
        assert_eq!(phi, expected);
        assert_eq!(phi.to_string(), "exists x1 . plus(x0, x1) = zero()");
    }

    #[test]
    fn printing_examples() {
        assert_eq!(Formula::eq(var(0), var(0)).to_string(), "x0 = x0");
        let a = Formula::rel("P", vec![var(0)]);
        let b = Formula::eq(var(1), var(0));
        assert_eq!(Formula::or(a, b).to_string(), "(P(x0) | x1 = x0)");
    }

    #[test]
    fn sugar_and_precedence() {
        let s = sig();
        let p = |t: &str| parse_formula(t, &s).unwrap();
        let a = Formula::rel("P", vec![var(0)]);
        let b = Formula::rel("P", vec![var(1)]);
        let c = Formula::rel("P", vec![var(2)]);
        assert_eq!(
            p("P(x0) & P(x1) | P(x2)"),
            Formula::or(Formula::and(a.clone(), b.clone()), c.clone())
        );
        assert_eq!(
            p("P(x0) -> P(x1) -> P(x2)"),
            Formula::implies(a.clone(), Formula::implies(b.clone(), c.clone()))
        );
        assert_eq!(p("~P(x0) & P(x1)"), Formula::and(Formula::not(a.clone()), b.clone()));
        assert_eq!(
            p("exists x1 . P(x1) & P(x0)"),
            Formula::and(Formula::exists(Var(1), b.clone()), a.clone())
        );
        assert_eq!(p("forall x0 . P(x0)"), Formula::forall(Var(0), a.clone()));
        assert_eq!(p("true"), Formula::truth());
        assert_eq!(
            p("x0 + x1 = zero()"),
            Formula::eq(app("plus", vec![var(0), var(1)]), app("zero", vec![]))
        );
        assert_eq!(p("(x0 + x1) + x0 = x0"), p("plus(plus(x0, x1), x0) = x0"));
        assert_eq!(p("((P(x0)))"), a);
        assert_eq!(p("(P(x0) | P(x1))"), Formula::or(a.clone(), b.clone()));
    }

    #[test]
    fn errors_are_positioned() {
        let s = sig();
        let e = parse_formula("P(x0) |", &s).unwrap_err();
        assert_eq!((e.kind, e.line, e.column), (ErrorKind::Syntax, 1, 8));
        let e = parse_formula("P(x0, x1)", &s).unwrap_err();
        assert_eq!((e.kind, e.column), (ErrorKind::Validation, 1));
        let e = parse_formula("Q(x0)", &s).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Validation);
        let e = parse_formula("x0 < x1", &s).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Validation);
        let e = parse_formula("x0 = -x1", &s).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Validation);
        let e = parse_formula("x01 = x1", &s).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Syntax);
        let e = parse_formula("exists x1 .\n  P(x1) P(x0)", &s).unwrap_err();
        assert_eq!((e.line, e.column), (2, 9));
        assert!(parse_signature("sig L { fun exists/1; }").is_err());
    }

    #[test]
    fn morphism_round_trip() {
        let l = Signature::new("L")
            .with_function("f", 1)
            .unwrap()
            .with_relation("R", 2)
            .unwrap();
        let l2 = sig();
        let l2 = l2.renamed("L2");
        let text = "morphism H : L -> L2 {\n  fun f := plus(x0, x0);\n  rel R := (P(x0) | x1 = zero());\n}".to_string();
        let a = parse_morphism(&text, &l, &l2).unwrap();
        assert_eq!(print_morphism("H", &a), text);
        assert!(parse_language_morphism(&text, &l, &l2).is_err());
        let strict = text.replace("(P(x0) | x1 = zero())", "plus(x0, x1) = zero()");
        let h = parse_language_morphism(&strict, &l, &l2).unwrap();
        assert_eq!(h.mode(), Mode::Strict);
        let gen = text.replace("L2 {", "L2 generalized {");
        let h = parse_language_morphism(&gen, &l, &l2).unwrap();
        assert_eq!(h.mode(), Mode::Generalized);
        assert_eq!(print_morphism("H", h.assignment()), gen);
    }

    #[test]
    fn structure_round_trip() {
        let s = Signature::new("S")
            .with_function("f", 2)
            .unwrap()
            .with_function("c", 0)
            .unwrap()
            .with_relation("<", 2)
            .unwrap()
            .with_relation("Z", 0)
            .unwrap();
        let text = "structure M : S ordered {\n  domain 2;\n  fun c := table 1;\n  fun f := table [[0, 1], [1, 0]];\n  rel < := {(0, 1)};\n  rel Z := {()};\n}";
        let m = parse_structure(text, &s).unwrap();
        assert_eq!(m.apply("f", &[1, 0]), 1);
        assert!(m.related("Z", &[]));
        assert_eq!(print_structure("M", &m), text);
        let bad = text.replace("{(0, 1)}", "{}");
        assert_eq!(parse_structure(&bad, &s).unwrap_err().kind, ErrorKind::Validation);
        let bad = text.replace("table 1", "table 2");
        assert_eq!(parse_structure(&bad, &s).unwrap_err().kind, ErrorKind::Validation);
        let missing = text.replace("  rel Z := {()};\n", "");
        assert_eq!(parse_structure(&missing, &s).unwrap_err().kind, ErrorKind::Validation);
    }

    #[test]
    fn workspace_documents() {
        let text = "sig G { fun plus/2; fun minus/1; fun zero/0; }\n\
            morphism I : G -> ODAG { fun minus := minus(x0); fun plus := plus(x0, x1); fun zero := zero(); }\n\
            formula pos : ODAG := zero() < x0;\n\
            term t : G := x0 + -x0;\n";
        let ws = Workspace::from_text(text).unwrap();
        assert!(ws.morphism("I").is_ok());
        assert_eq!(ws.term("t").unwrap().1.to_string(), "plus(x0, minus(x0))");
        let again = Workspace::from_text(&ws.print()).unwrap();
        assert_eq!(again.print(), ws.print());
        let dup = format!("{text}sig G {{ }}");
        assert_eq!(Workspace::from_text(&dup).unwrap_err().kind, ErrorKind::Validation);
        assert_eq!(
            SourceDocument::new("structure M : G { domain 1; }").unwrap().kind,
            DocumentKind::Structure
        );
    }

    #[test]
    fn enumerated_round_trip() {
        let s = sig().with_relation("<", 2).unwrap();
        let bounds = EnumBounds {
            max_size: 4,
            max_var_index: 1,
            max_qdepth: 1,
        };
        let mut n = 0;
        for phi in enumerate_formulas(&s, bounds).take(1000) {
            assert_eq!(parse_formula(&phi.to_string(), &s).unwrap(), phi);
            n += 1;
        }
        assert_eq!(n, 1000);
    }

    #[test]
    fn json_encoding() {
        let phi = parse_formula("exists x1 . ~P(x1)", &sig()).unwrap();
        assert_eq!(
            formula_json(&phi).to_string(),
            r#"{"children":[{"children":[{"children":[{"index":1,"kind":"var"}],"kind":"rel","symbol":"P"}],"kind":"not"}],"kind":"exists","var":1}"#
        );
    }
}
