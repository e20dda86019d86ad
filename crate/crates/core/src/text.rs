//! Line-oriented machine files.
//!
//! ```text
//! # two-branch
//! states 3
//! input a: 0 1 1
//! input b: 0 1 0
//! ```
//!
//! `#` starts a comment and blank lines are ignored. Entry `k` of an input line
//! is the next state of state `k`. An optional `names <s0> <s1> ...` line after
//! `states` labels the states.

use std::fmt::Write as _;

use thiserror::Error;

use crate::machine::{Machine, Transform};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("state {state} out of range for {states} states")]
    StateOutOfRange { state: usize, states: usize },
    #[error("expected {expected} next states, found {found}")]
    WrongLength { expected: usize, found: usize },
    #[error("duplicate input label `{0}`")]
    DuplicateInput(String),
    #[error("no inputs declared")]
    NoInputs,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(|(s, tok)| (line[..s].chars().count() + 1, tok))
        .collect()
}

pub fn parse_machine(text: &str) -> Result<Machine, ParseError> {
    let err = |line: usize, column: usize, kind: ParseErrorKind| ParseError { line, column, kind };
    let syntax = |line: usize, column: usize, msg: &str| err(line, column, ParseErrorKind::Syntax(msg.into()));

    let mut states: Option<usize> = None;
    let mut names: Option<Vec<String>> = None;
    let mut generators: Vec<(String, Transform)> = Vec::new();
    let mut last_line = 0;

    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        last_line = line_no;
        let content = raw.split('#').next().unwrap_or("");
        let toks = tokens(content);
        let Some(&(col, keyword)) = toks.first() else {
            continue;
        };
        match (keyword, states) {
            ("states", None) => {
                let [_, (c, value)] = toks[..] else {
                    return Err(syntax(line_no, col, "expected `states <n>`"));
                };
                let n: usize = value
                    .parse()
                    .map_err(|_| syntax(line_no, c, "state count must be a positive integer"))?;
                if n == 0 {
                    return Err(syntax(line_no, c, "state count must be a positive integer"));
                }
                states = Some(n);
            }
            (_, None) => return Err(syntax(line_no, col, "expected `states <n>` first")),
            ("states", Some(_)) => return Err(syntax(line_no, col, "duplicate `states` line")),
            ("names", Some(n)) => {
                if names.is_some() || !generators.is_empty() {
                    return Err(syntax(line_no, col, "`names` must directly follow `states`"));
                }
                let list: Vec<String> = toks[1..].iter().map(|(_, t)| t.to_string()).collect();
                if list.len() != n {
                    return Err(err(
                        line_no,
                        col,
                        ParseErrorKind::WrongLength {
                            expected: n,
                            found: list.len(),
                        },
                    ));
                }
                names = Some(list);
            }
            ("input", Some(n)) => {
                let Some(&(label_col, label_tok)) = toks.get(1) else {
                    return Err(syntax(line_no, col, "expected `input <label>: <next states>`"));
                };
                // the label may be written `a:` or `a :`
                let (label, rest) = match label_tok.strip_suffix(':') {
                    Some(label) => (label, &toks[2..]),
                    None => match toks.get(2) {
                        Some(&(_, ":")) => (label_tok, &toks[3..]),
                        _ => {
                            return Err(syntax(line_no, label_col, "expected `:` after the input label"))
                        }
                    },
                };
                if label.is_empty() || label.contains(':') {
                    return Err(syntax(line_no, label_col, "invalid input label"));
                }
                if generators.iter().any(|(l, _)| l == label) {
                    return Err(err(
                        line_no,
                        label_col,
                        ParseErrorKind::DuplicateInput(label.to_string()),
                    ));
                }
                let mut image = Vec::with_capacity(n);
                for &(c, tok) in rest {
                    let q: usize = tok
                        .parse()
                        .map_err(|_| syntax(line_no, c, "next state must be a non-negative integer"))?;
                    if q >= n {
                        return Err(err(
                            line_no,
                            c,
                            ParseErrorKind::StateOutOfRange { state: q, states: n },
                        ));
                    }
                    image.push(q);
                }
                if image.len() != n {
                    return Err(err(
                        line_no,
                        col,
                        ParseErrorKind::WrongLength {
                            expected: n,
                            found: image.len(),
                        },
                    ));
                }
                let t = Transform::new(image).expect("entries validated");
                generators.push((label.to_string(), t));
            }
            (_, Some(_)) => return Err(syntax(line_no, col, "expected `input <label>: <next states>`")),
        }
    }

    let Some(n) = states else {
        return Err(syntax(last_line.max(1), 1, "missing `states <n>` line"));
    };
    if generators.is_empty() {
        return Err(err(last_line.max(1), 1, ParseErrorKind::NoInputs));
    }
    let names = names.unwrap_or_else(|| (0..n).map(|q| q.to_string()).collect());
    Ok(Machine::with_state_names(names, generators).expect("validated during parsing"))
}

/// Text form accepted by [`parse_machine`].
pub fn serialize_machine(m: &Machine) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "states {}", m.n());
    let default_names = m
        .state_names()
        .iter()
        .enumerate()
        .all(|(q, name)| *name == q.to_string());
    if !default_names {
        let _ = writeln!(out, "names {}", m.state_names().join(" "));
    }
    for (label, t) in m.generators() {
        let image: Vec<String> = t.image().iter().map(usize::to_string).collect();
        let _ = writeln!(out, "input {label}: {}", image.join(" "));
    }
    out
}
