//! Concrete syntax for both calculi: lexer, recursive-descent parsers and
//! the let-prelude expansion. Printing lives on the term types themselves
//! and emits exactly this grammar.
//!
//! ```text
//! sum   := '0' | sterm ('+' sterm)*
//! sterm := atom+                       (left-associative application)
//! atom  := var | '(' sum ')' | '\' var+ '.' sterm
//!        | 'D(' sterm ';' sterm (',' sterm)* ')'
//!
//! rsum  := '0' | rterm ('+' rterm)*
//! rterm := ratom bag*
//! ratom := var | '(' rsum ')' | '\' var+ '.' rterm
//! bag   := '[' (res (',' res)*)? ']'
//! res   := rterm '!'?
//! ```
//!
//! Variables match `[a-zA-Z][a-zA-Z0-9_]*`; the `y$k` names produced by the
//! translator are therefore unlexable and can never collide with input.

use std::fmt;

use dlam::res::{bag_cons_banged, bag_cons_linear, mk_rabs, mk_rapp, mk_rvar, Bag, BagSum, ResSum};
use dlam::term::{mk_abs, mk_app, mk_dapp_multi, mk_var, DiffSum};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Zero,
    Lambda,
    Dot,
    Plus,
    LParen,
    RParen,
    DOpen,
    Semi,
    Comma,
    LBracket,
    RBracket,
    Bang,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Zero => f.write_str("`0`"),
            Tok::Lambda => f.write_str("`\\`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::DOpen => f.write_str("`D(`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub found: String,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at {}:{}: found {}, expected {}",
            self.line,
            self.col,
            self.found,
            self.expected.join(" or ")
        )
    }
}

impl std::error::Error for ParseError {}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

fn lex(input: &str) -> Result<Lexer, ParseError> {
    let mut toks = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let chars: Vec<char> = input.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l, co) = (line, col);
        let consumed = match c {
            ' ' | '\t' | '\n' | '\r' => 1,
            '\\' => {
                toks.push((Tok::Lambda, l, co));
                1
            }
            '.' => {
                toks.push((Tok::Dot, l, co));
                1
            }
            '+' => {
                toks.push((Tok::Plus, l, co));
                1
            }
            '(' => {
                toks.push((Tok::LParen, l, co));
                1
            }
            ')' => {
                toks.push((Tok::RParen, l, co));
                1
            }
            ';' => {
                toks.push((Tok::Semi, l, co));
                1
            }
            ',' => {
                toks.push((Tok::Comma, l, co));
                1
            }
            '[' => {
                toks.push((Tok::LBracket, l, co));
                1
            }
            ']' => {
                toks.push((Tok::RBracket, l, co));
                1
            }
            '!' => {
                toks.push((Tok::Bang, l, co));
                1
            }
            '0' => {
                toks.push((Tok::Zero, l, co));
                1
            }
            c if c.is_ascii_alphabetic() => {
                let mut j = i + 1;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let name: String = chars[i..j].iter().collect();
                let len = j - i;
                // `D` immediately followed by `(` opens a linear application.
                if name == "D" && j < chars.len() && chars[j] == '(' {
                    toks.push((Tok::DOpen, l, co));
                    len + 1
                } else {
                    toks.push((Tok::Ident(name), l, co));
                    len
                }
            }
            other => {
                return Err(ParseError {
                    line: l,
                    col: co,
                    found: format!("`{other}`"),
                    expected: vec!["a term".into()],
                })
            }
        };
        for k in 0..consumed {
            if chars[i + k] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        i += consumed;
    }
    toks.push((Tok::Eof, line, col));
    Ok(Lexer { toks, pos: 0 })
}

impl Lexer {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, expected: &[&str]) -> ParseError {
        let (tok, line, col) = &self.toks[self.pos];
        ParseError {
            line: *line,
            col: *col,
            found: tok.to_string(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            Err(self.err(&[what]))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            _ => Err(self.err(&[what])),
        }
    }

    fn at_eof(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.err(&["end of input"]))
        }
    }
}

// ---------------------------------------------------------------------------
// Differential terms
// ---------------------------------------------------------------------------

/// Parse a differential sum from the concrete syntax.
pub fn parse_diff(input: &str) -> Result<DiffSum, ParseError> {
    let mut lx = lex(input)?;
    let sum = diff_sum(&mut lx)?;
    lx.at_eof()?;
    Ok(sum)
}

fn starts_atom(tok: &Tok) -> bool {
    matches!(tok, Tok::Ident(_) | Tok::LParen | Tok::Lambda | Tok::DOpen)
}

fn diff_sum(lx: &mut Lexer) -> Result<DiffSum, ParseError> {
    if *lx.peek() == Tok::Zero {
        lx.next();
        return Ok(DiffSum::zero());
    }
    let mut out = diff_sterm(lx)?;
    while *lx.peek() == Tok::Plus {
        lx.next();
        out = out.add(&diff_sterm(lx)?);
    }
    Ok(out)
}

fn diff_sterm(lx: &mut Lexer) -> Result<DiffSum, ParseError> {
    let mut out = diff_atom(lx)?;
    while starts_atom(lx.peek()) {
        let arg = diff_atom(lx)?;
        out = mk_app(out, arg);
    }
    Ok(out)
}

fn diff_atom(lx: &mut Lexer) -> Result<DiffSum, ParseError> {
    match lx.peek().clone() {
        Tok::Ident(name) => {
            lx.next();
            Ok(mk_var(name.as_str()))
        }
        Tok::LParen => {
            lx.next();
            let sum = diff_sum(lx)?;
            lx.expect(Tok::RParen, "`)`")?;
            Ok(sum)
        }
        Tok::Lambda => {
            lx.next();
            let mut vars = vec![lx.ident("a variable")?];
            while let Tok::Ident(_) = lx.peek() {
                vars.push(lx.ident("a variable")?);
            }
            lx.expect(Tok::Dot, "`.`")?;
            let body = diff_sterm(lx)?;
            Ok(vars
                .into_iter()
                .rev()
                .fold(body, |acc, v| mk_abs(v.as_str(), acc)))
        }
        Tok::DOpen => {
            lx.next();
            let head = diff_sterm(lx)?;
            lx.expect(Tok::Semi, "`;`")?;
            let mut args = vec![diff_sterm(lx)?];
            while *lx.peek() == Tok::Comma {
                lx.next();
                args.push(diff_sterm(lx)?);
            }
            lx.expect(Tok::RParen, "`)`")?;
            Ok(mk_dapp_multi(head, &args))
        }
        _ => Err(lx.err(&["a variable", "`(`", "`\\`", "`D(`"])),
    }
}

// ---------------------------------------------------------------------------
// Resource terms
// ---------------------------------------------------------------------------

/// Parse a resource sum from the concrete syntax.
pub fn parse_res(input: &str) -> Result<ResSum, ParseError> {
    let mut lx = lex(input)?;
    let sum = res_sum(&mut lx)?;
    lx.at_eof()?;
    Ok(sum)
}

fn res_sum(lx: &mut Lexer) -> Result<ResSum, ParseError> {
    if *lx.peek() == Tok::Zero {
        lx.next();
        return Ok(ResSum::zero());
    }
    let mut out = res_term(lx)?;
    while *lx.peek() == Tok::Plus {
        lx.next();
        out = out.add(&res_term(lx)?);
    }
    Ok(out)
}

fn res_term(lx: &mut Lexer) -> Result<ResSum, ParseError> {
    let mut out = res_atom(lx)?;
    while *lx.peek() == Tok::LBracket {
        let bag = res_bag(lx)?;
        out = mk_rapp(out, bag);
    }
    Ok(out)
}

fn res_atom(lx: &mut Lexer) -> Result<ResSum, ParseError> {
    match lx.peek().clone() {
        Tok::Ident(name) => {
            lx.next();
            Ok(mk_rvar(name.as_str()))
        }
        Tok::LParen => {
            lx.next();
            let sum = res_sum(lx)?;
            lx.expect(Tok::RParen, "`)`")?;
            Ok(sum)
        }
        Tok::Lambda => {
            lx.next();
            let mut vars = vec![lx.ident("a variable")?];
            while let Tok::Ident(_) = lx.peek() {
                vars.push(lx.ident("a variable")?);
            }
            lx.expect(Tok::Dot, "`.`")?;
            let body = res_term(lx)?;
            Ok(vars
                .into_iter()
                .rev()
                .fold(body, |acc, v| mk_rabs(v.as_str(), acc)))
        }
        _ => Err(lx.err(&["a variable", "`(`", "`\\`"])),
    }
}

fn res_bag(lx: &mut Lexer) -> Result<BagSum, ParseError> {
    lx.expect(Tok::LBracket, "`[`")?;
    let mut items: Vec<(ResSum, bool)> = Vec::new();
    if *lx.peek() != Tok::RBracket {
        loop {
            let term = res_term(lx)?;
            let banged = if *lx.peek() == Tok::Bang {
                lx.next();
                true
            } else {
                false
            };
            items.push((term, banged));
            if *lx.peek() == Tok::Comma {
                lx.next();
            } else {
                break;
            }
        }
    }
    lx.expect(Tok::RBracket, "`]`")?;
    let mut bags = BagSum::from_bag(Bag::empty());
    for (term, banged) in items.into_iter().rev() {
        let mut next = BagSum::zero();
        for (partial, k) in bags.summands() {
            if banged {
                next =
                    next.add(&BagSum::from_bag(bag_cons_banged(term.clone(), partial)).scale(*k));
            } else {
                next = next.add(&bag_cons_linear(term.clone(), partial).scale(*k));
            }
        }
        bags = next;
    }
    Ok(bags)
}

// ---------------------------------------------------------------------------
// Let prelude
// ---------------------------------------------------------------------------

/// Expand `--let name=body` bindings textually (word-boundary occurrences,
/// parenthesized), in order, through later bindings and the input.
pub fn expand_lets(input: &str, lets: &[(String, String)]) -> String {
    let mut bodies: Vec<(String, String)> = Vec::new();
    for (name, body) in lets {
        let mut expanded = body.clone();
        for (n, b) in &bodies {
            expanded = replace_word(&expanded, n, b);
        }
        bodies.push((name.clone(), expanded));
    }
    let mut out = input.to_string();
    for (n, b) in &bodies {
        out = replace_word(&out, n, b);
    }
    out
}

fn replace_word(text: &str, name: &str, body: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::new();
    let mut i = 0;
    let is_word = |c: char| c.is_ascii_alphanumeric() || c == '_';
    while i < chars.len() {
        let c = chars[i];
        if c.is_ascii_alphabetic() {
            let mut j = i + 1;
            while j < chars.len() && is_word(chars[j]) {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            if word == name {
                out.push('(');
                out.push_str(body);
                out.push(')');
            } else {
                out.push_str(&word);
            }
            i = j;
        } else {
            out.push(c);
            i += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use dlam::combinators::{delta, i};
    use dlam::term::mk_dapp;

    #[test]
    fn parse_basics() {
        assert_eq!(parse_diff("\\x.x x").unwrap(), delta());
        assert_eq!(parse_diff("0").unwrap(), DiffSum::zero());
        let t = parse_diff("D(\\x.x x; y) z").unwrap();
        let expect = mk_app(mk_dapp(delta(), mk_var("y")), mk_var("z"));
        assert_eq!(t, expect);
    }

    #[test]
    fn application_binds_left_and_sums_stay_whole() {
        let t = parse_diff("f a b").unwrap();
        let expect = mk_app(mk_app(mk_var("f"), mk_var("a")), mk_var("b"));
        assert_eq!(t, expect);
        let s = parse_diff("s (t + u)").unwrap();
        let expect = mk_app(mk_var("s"), mk_var("t").add(&mk_var("u")));
        assert_eq!(s, expect);
        // left sums distribute per the sugar
        let d = parse_diff("(x + y) z").unwrap();
        assert_eq!(d.summands().len(), 2);
    }

    #[test]
    fn print_parse_round_trip() {
        for src in [
            "\\x.x x",
            "(\\x.x x) (\\x.x x)",
            "D(\\x.x x; y) z",
            "y z + D(z; y) z",
            "x (0)",
            "s (t + t)",
            "D(x; y, z)",
        ] {
            let t = parse_diff(src).unwrap();
            let printed = t.to_string();
            let back = parse_diff(&printed).unwrap();
            assert_eq!(back, t, "printed as {printed}");
        }
    }

    #[test]
    fn res_round_trip() {
        for src in [
            "\\x.x[x]",
            "(\\x.x[x])[\\y.y, \\y.y]",
            "x[y!, z] + z[]",
            "x[y][z!]",
            "0",
        ] {
            let t = parse_res(src).unwrap();
            let printed = t.to_string();
            let back = parse_res(&printed).unwrap();
            assert_eq!(back, t, "printed as {printed}");
        }
    }

    #[test]
    fn banged_sum_in_bag_splits() {
        let t = parse_res("x[(a + b)!]").unwrap();
        let printed = t.to_string();
        assert_eq!(printed, "x[a!, b!]");
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_diff("\\x.").unwrap_err();
        assert_eq!(err.line, 1);
        assert_eq!(err.col, 4);
        assert!(parse_diff("x $").is_err());
        assert!(parse_res("x[").is_err());
    }

    #[test]
    fn lets_expand_textually() {
        let lets = vec![
            ("I".to_string(), "\\x.x".to_string()),
            ("II".to_string(), "I I".to_string()),
        ];
        let out = expand_lets("II y", &lets);
        let t = parse_diff(&out).unwrap();
        let expect = mk_app(mk_app(i(), i()), mk_var("y"));
        assert_eq!(t, expect);
    }
}
