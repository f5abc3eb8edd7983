//! Text formats for multi-traces and interaction models.
//!
//! Multi-trace files are line oriented: `[lifeline] act.act.act` or
//! `[lifeline] eps`, with `#` comments. Line order defines the signature
//! order. Interaction files are `signature { .. } interaction { term }` with
//! prefix terms: `0`, actions `l!m` / `l?m`, binary `seq`/`par`/`alt`, and
//! unary `loopS`/`loopP`.

use thiserror::Error;

use crate::interaction::{Interaction, InteractionModel};
use crate::model::{Action, ActionKind, Lifeline, Message, Signature};
use crate::multitrace::MultiTrace;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError { line, column, message: message.into() }
    }
}

struct LineCursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl LineCursor {
    fn new(text: &str, line: usize) -> Self {
        LineCursor { chars: text.chars().collect(), pos: 0, line }
    }

    // A `#` ends the parsable part of the line.
    fn peek(&self) -> Option<char> {
        let c = *self.chars.get(self.pos)?;
        (c != '#').then_some(c)
    }

    fn bump(&mut self) {
        self.pos += 1;
    }

    fn at_end(&self) -> bool {
        self.peek().is_none()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.pos + 1, message)
    }

    fn expect(&mut self, want: char) -> Result<(), ParseError> {
        if self.peek() == Some(want) {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected `{want}`")))
        }
    }

    fn ident(&mut self) -> Result<(String, usize), ParseError> {
        let start = self.pos;
        if !self.peek().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') {
            return Err(self.err("expected an identifier"));
        }
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
            self.bump();
        }
        Ok((self.chars[start..self.pos].iter().collect(), start + 1))
    }
}

/// Parses the line-oriented multi-trace format. An empty file denotes the
/// empty multi-trace over the empty signature.
pub fn parse_multitrace(src: &str) -> Result<MultiTrace, ParseError> {
    let mut order: Vec<Lifeline> = Vec::new();
    let mut components: Vec<(Lifeline, Vec<Action>)> = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let mut cur = LineCursor::new(raw, idx + 1);
        cur.skip_ws();
        if cur.at_end() {
            continue;
        }
        cur.expect('[')?;
        cur.skip_ws();
        let (name, name_col) = cur.ident()?;
        cur.skip_ws();
        cur.expect(']')?;
        let lifeline = Lifeline::new(&name)
            .map_err(|e| ParseError::new(cur.line, name_col, e.to_string()))?;
        if order.contains(&lifeline) {
            return Err(ParseError::new(cur.line, name_col, format!("duplicate lifeline `{name}`")));
        }
        cur.skip_ws();
        let mut actions = Vec::new();
        if !cur.at_end() {
            let mut pending = cur.ident()?;
            cur.skip_ws();
            if !(pending.0 == "eps" && cur.at_end()) {
                loop {
                    let (act_lifeline, act_col) = pending;
                    let kind = match cur.peek() {
                        Some('!') => ActionKind::Emission,
                        Some('?') => ActionKind::Reception,
                        _ => {
                            return Err(cur.err(format!(
                                "expected `!` or `?` after lifeline `{act_lifeline}`"
                            )))
                        }
                    };
                    cur.bump();
                    let (message, msg_col) = cur.ident()?;
                    if act_lifeline != name {
                        return Err(ParseError::new(
                            cur.line,
                            act_col,
                            format!(
                                "action on lifeline `{act_lifeline}` in the component of `{name}`"
                            ),
                        ));
                    }
                    actions.push(Action::new(
                        lifeline.clone(),
                        kind,
                        Message::new(&message)
                            .map_err(|e| ParseError::new(cur.line, msg_col, e.to_string()))?,
                    ));
                    cur.skip_ws();
                    match cur.peek() {
                        None => break,
                        Some('.') => {
                            cur.bump();
                            cur.skip_ws();
                            pending = cur.ident()?;
                            cur.skip_ws();
                        }
                        Some(c) => return Err(cur.err(format!("unexpected character `{c}`"))),
                    }
                }
            }
        }
        components.push((lifeline.clone(), actions));
        order.push(lifeline);
    }
    let signature = Signature::new(order).expect("duplicates rejected during parsing");
    Ok(MultiTrace::from_components(signature, components).expect("components validated by parser"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Zero,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Bang,
    Query,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(name) => format!("`{name}`"),
            Tok::Zero => "`0`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Query => "`?`".into(),
        }
    }
}

struct Tokens {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    end: (usize, usize),
}

impl Tokens {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn next(&mut self) -> Option<(Tok, usize, usize)> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    // Position of the next unconsumed token, or of the end of input.
    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |&(_, l, c)| (l, c))
    }

    fn err_here(&self, message: impl Into<String>) -> ParseError {
        let (line, column) = self.here();
        ParseError::new(line, column, message)
    }

    fn expect(&mut self, want: &Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => {
                Err(self.err_here(format!("expected {}, found {}", want.describe(), t.describe())))
            }
            None => Err(self.err_here(format!("expected {}", want.describe()))),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, usize, usize), ParseError> {
        match self.next() {
            Some((Tok::Ident(name), l, c)) => Ok((name, l, c)),
            Some((t, l, c)) => {
                Err(ParseError::new(l, c, format!("expected {what}, found {}", t.describe())))
            }
            None => Err(self.err_here(format!("expected {what}"))),
        }
    }
}

fn lex(src: &str) -> Result<Tokens, ParseError> {
    let mut toks = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        if c == '#' {
            while chars.peek().is_some_and(|&c2| c2 != '\n') {
                chars.next();
                col += 1;
            }
            continue;
        }
        let (tok_line, tok_col) = (line, col);
        let tok = match c {
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '!' => Tok::Bang,
            '?' => Tok::Query,
            '0' => Tok::Zero,
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::new();
                while chars.peek().is_some_and(|&c2| c2.is_ascii_alphanumeric() || c2 == '_') {
                    name.push(chars.next().expect("peeked"));
                    col += 1;
                }
                toks.push((Tok::Ident(name), tok_line, tok_col));
                continue;
            }
            _ => return Err(ParseError::new(line, col, format!("unexpected character `{c}`"))),
        };
        chars.next();
        col += 1;
        if tok == Tok::Zero
            && chars.peek().is_some_and(|&c2| c2.is_ascii_alphanumeric() || c2 == '_')
        {
            return Err(ParseError::new(
                tok_line,
                tok_col,
                "identifiers cannot start with a digit",
            ));
        }
        toks.push((tok, tok_line, tok_col));
    }
    Ok(Tokens { toks, pos: 0, end: (line, col) })
}

/// Parses the `signature { .. } interaction { .. }` format.
pub fn parse_interaction(src: &str) -> Result<InteractionModel, ParseError> {
    let mut t = lex(src)?;
    let (kw, l, c) = t.expect_ident("the keyword `signature`")?;
    if kw != "signature" {
        return Err(ParseError::new(l, c, format!("expected the keyword `signature`, found `{kw}`")));
    }
    t.expect(&Tok::LBrace)?;
    let mut lifelines: Vec<Lifeline> = Vec::new();
    loop {
        let (name, l, c) = t.expect_ident("a lifeline name")?;
        if lifelines.iter().any(|x| x.name() == name) {
            return Err(ParseError::new(l, c, format!("duplicate lifeline `{name}`")));
        }
        lifelines
            .push(Lifeline::new(&name).map_err(|e| ParseError::new(l, c, e.to_string()))?);
        if t.peek() == Some(&Tok::Comma) {
            t.next();
        } else {
            break;
        }
    }
    t.expect(&Tok::RBrace)?;
    let (kw, l, c) = t.expect_ident("the keyword `interaction`")?;
    if kw != "interaction" {
        return Err(ParseError::new(
            l,
            c,
            format!("expected the keyword `interaction`, found `{kw}`"),
        ));
    }
    t.expect(&Tok::LBrace)?;
    let signature = Signature::new(lifelines).expect("duplicates rejected during parsing");
    let term = parse_term(&mut t, &signature)?;
    t.expect(&Tok::RBrace)?;
    if let Some((tok, l, c)) = t.next() {
        return Err(ParseError::new(l, c, format!("unexpected trailing {}", tok.describe())));
    }
    Ok(InteractionModel::new(signature, term).expect("actions checked against the signature"))
}

fn parse_term(t: &mut Tokens, signature: &Signature) -> Result<Interaction, ParseError> {
    match t.next() {
        Some((Tok::Zero, _, _)) => Ok(Interaction::Empty),
        Some((Tok::Ident(name), l, c)) => match t.peek() {
            Some(Tok::Bang) | Some(Tok::Query) => {
                let kind = match t.next().expect("peeked").0 {
                    Tok::Bang => ActionKind::Emission,
                    _ => ActionKind::Reception,
                };
                let (msg, ml, mc) = t.expect_ident("a message name")?;
                let lifeline =
                    Lifeline::new(&name).map_err(|e| ParseError::new(l, c, e.to_string()))?;
                if !signature.contains(&lifeline) {
                    return Err(ParseError::new(
                        l,
                        c,
                        format!("lifeline `{name}` is not in the signature"),
                    ));
                }
                let message =
                    Message::new(&msg).map_err(|e| ParseError::new(ml, mc, e.to_string()))?;
                Ok(Interaction::Act(Action::new(lifeline, kind, message)))
            }
            Some(Tok::LParen) if matches!(name.as_str(), "seq" | "par" | "alt") => {
                t.next();
                let first = parse_term(t, signature)?;
                if t.peek() != Some(&Tok::Comma) {
                    return Err(t.err_here(format!("expected `,`: {name} takes two operands")));
                }
                t.next();
                let second = parse_term(t, signature)?;
                t.expect(&Tok::RParen)?;
                Ok(match name.as_str() {
                    "seq" => Interaction::seq(first, second),
                    "par" => Interaction::par(first, second),
                    _ => Interaction::alt(first, second),
                })
            }
            Some(Tok::LParen) if matches!(name.as_str(), "loopS" | "loopP") => {
                t.next();
                let body = parse_term(t, signature)?;
                t.expect(&Tok::RParen)?;
                Ok(if name == "loopS" {
                    Interaction::loop_s(body)
                } else {
                    Interaction::loop_p(body)
                })
            }
            Some(Tok::LParen) => Err(ParseError::new(l, c, format!("unknown operator `{name}`"))),
            _ => Err(t.err_here(format!("expected `!` or `?` after lifeline `{name}`"))),
        },
        Some((tok, l, c)) => {
            Err(ParseError::new(l, c, format!("expected a term, found {}", tok.describe())))
        }
        None => Err(t.err_here("expected a term")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::{act, mt, sig};
    use proptest::prelude::*;

    #[test]
    fn multitrace_lines_define_signature_order() {
        let src = "# broker run\n\n[pub] pub!publish\n[bro] bro?subscribe.bro?publish # tail cut\n[sub] eps\n";
        let parsed = parse_multitrace(src).unwrap();
        assert_eq!(
            parsed,
            mt(&[("pub", "pub!publish"), ("bro", "bro?subscribe.bro?publish"), ("sub", "")])
        );
        assert_eq!(parsed.signature(), &sig(&["pub", "bro", "sub"]));
        assert_eq!(
            parsed.signature().iter().map(|l| l.name().to_owned()).collect::<Vec<_>>(),
            ["pub", "bro", "sub"]
        );
    }

    #[test]
    fn multitrace_accepts_spacing_and_empty_input() {
        let parsed = parse_multitrace("  [ l ]  l!a . l?b  \n").unwrap();
        assert_eq!(parsed, mt(&[("l", "l!a.l?b")]));
        let empty = parse_multitrace("# nothing observed\n").unwrap();
        assert_eq!(empty.signature().len(), 0);
        assert!(empty.is_empty());
    }

    #[test]
    fn multitrace_errors_carry_positions() {
        let err = parse_multitrace("[l] l!a\nl?b").unwrap_err();
        assert_eq!((err.line, err.column), (2, 1));
        assert!(err.message.contains("expected `[`"));

        let err = parse_multitrace("[l] m!b").unwrap_err();
        assert_eq!((err.line, err.column), (1, 5));
        assert!(err.message.contains("lifeline `m`"));

        let err = parse_multitrace("[l] eps\n[l] eps").unwrap_err();
        assert_eq!((err.line, err.column), (2, 2));
        assert!(err.message.contains("duplicate"));

        let err = parse_multitrace("[l] l!a l!b").unwrap_err();
        assert_eq!((err.line, err.column), (1, 9));
        assert!(err.message.contains("unexpected character"));

        let err = parse_multitrace("[l] l!a.").unwrap_err();
        assert_eq!((err.line, err.column), (1, 9));
        assert!(err.message.contains("identifier"));
    }

    #[test]
    fn interaction_parses_nested_terms() {
        let src = "signature { pub, bro, sub }\ninteraction {\n  seq(sub!subscribe, loopS(alt(pub!publish, 0)))\n}\n";
        let model = parse_interaction(src).unwrap();
        assert_eq!(model.signature(), &sig(&["pub", "bro", "sub"]));
        assert_eq!(
            model.term(),
            &Interaction::seq(
                act("sub!subscribe").into(),
                Interaction::loop_s(Interaction::alt(act("pub!publish").into(), Interaction::Empty)),
            )
        );
    }

    #[test]
    fn interaction_binary_operators_need_two_operands() {
        let err = parse_interaction("signature{l} interaction{ seq(l!a) }").unwrap_err();
        assert_eq!((err.line, err.column), (1, 34));
        assert!(err.message.contains("seq takes two operands"));
    }

    #[test]
    fn interaction_rejects_unknown_names_and_lifelines() {
        let err = parse_interaction("signature { l } interaction { shuffle(l!a, l!b) }").unwrap_err();
        assert!(err.message.contains("unknown operator `shuffle`"));

        let err = parse_interaction("signature { l } interaction { m!a }").unwrap_err();
        assert_eq!((err.line, err.column), (1, 31));
        assert!(err.message.contains("`m` is not in the signature"));

        let err = parse_interaction("signature { l, l } interaction { 0 }").unwrap_err();
        assert!(err.message.contains("duplicate lifeline `l`"));

        let err = parse_interaction("signature { l } interaction { 0 } 0").unwrap_err();
        assert!(err.message.contains("trailing"));

        let err = parse_interaction("signature { l } interaction { l }").unwrap_err();
        assert!(err.message.contains("expected `!` or `?`"));

        let err = parse_interaction("signature { } interaction { 0 }").unwrap_err();
        assert!(err.message.contains("lifeline name"));
    }

    #[test]
    fn interaction_skips_comments_anywhere() {
        let src = "# model\nsignature { l } # one lifeline\ninteraction { # body\n loopP(l?ping) }";
        let model = parse_interaction(src).unwrap();
        assert_eq!(model.term(), &Interaction::loop_p(act("l?ping").into()));
    }

    proptest! {
        #[test]
        fn prop_multitrace_roundtrips_through_display(m in crate::testkit::arb_multitrace(4)) {
            prop_assert_eq!(&parse_multitrace(&m.to_string()).unwrap(), &m);
        }

        #[test]
        fn prop_interaction_roundtrips_through_display(term in crate::testkit::arb_interaction(4)) {
            let model = crate::interaction::InteractionModel::new(sig(&["l", "m"]), term).unwrap();
            prop_assert_eq!(&parse_interaction(&model.to_string()).unwrap(), &model);
        }
    }
}
