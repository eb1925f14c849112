//! Reading and writing the BIF 0.3 interchange format.
//!
//! The subset understood here covers the files distributed by the public
//! network repositories: a `network` block, `variable` blocks with discrete
//! types, and `probability` blocks with either a `table` row (no parents) or
//! one parenthesized row per parent configuration. `property` entries are
//! skipped, `//` and `/* */` comments are allowed anywhere.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::bn::{BayesNet, Cpt, Variable};
use crate::graph::{Dag, GraphError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BifError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown state `{state}` for variable `{var}`")]
    UnknownState { var: String, state: String },
    #[error("duplicate probability block for `{0}`")]
    DuplicateCpt(String),
    #[error("no probability block for `{0}`")]
    MissingCpt(String),
    #[error("probability row for `{child}` has {got} entries, expected {want}")]
    RowArity { child: String, got: usize, want: usize },
    #[error("probability row for `{child}` sums to {sum}, outside the 1e-6 tolerance")]
    RowSum { child: String, sum: f64 },
    #[error("invalid probability {value} in a row for `{child}`")]
    RowValue { child: String, value: f64 },
    #[error("duplicate row for parent configuration in block for `{0}`")]
    DuplicateRow(String),
    #[error("probability block for `{child}` is missing {missing} parent configuration(s)")]
    MissingRows { child: String, missing: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq)]
enum TokKind {
    Ident,
    Number,
    Str,
    Punct(char),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokKind,
    text: String,
    line: usize,
    col: usize,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<u8> {
        self.src.get(self.pos + 1).copied()
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, BifError> {
        Err(BifError::Syntax { line: self.line, col: self.col, msg: msg.into() })
    }

    fn skip_trivia(&mut self) -> Result<(), BifError> {
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b'/') if self.peek2() == Some(b'/') => {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                Some(b'/') if self.peek2() == Some(b'*') => {
                    let (line, col) = (self.line, self.col);
                    self.bump();
                    self.bump();
                    loop {
                        match self.peek() {
                            Some(b'*') if self.peek2() == Some(b'/') => {
                                self.bump();
                                self.bump();
                                break;
                            }
                            Some(_) => {
                                self.bump();
                            }
                            None => {
                                return Err(BifError::Syntax {
                                    line,
                                    col,
                                    msg: "unterminated block comment".into(),
                                })
                            }
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn next(&mut self) -> Result<Token, BifError> {
        self.skip_trivia()?;
        let (line, col) = (self.line, self.col);
        let Some(c) = self.peek() else {
            return Ok(Token { kind: TokKind::Eof, text: String::new(), line, col });
        };
        let tok = match c {
            b'{' | b'}' | b'(' | b')' | b'[' | b']' | b',' | b';' | b'|' | b'=' => {
                self.bump();
                Token { kind: TokKind::Punct(c as char), text: (c as char).to_string(), line, col }
            }
            b'"' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.peek() {
                        Some(b'"') => {
                            self.bump();
                            break;
                        }
                        Some(_) => s.push(self.bump() as char),
                        None => {
                            return Err(BifError::Syntax {
                                line,
                                col,
                                msg: "unterminated string".into(),
                            })
                        }
                    }
                }
                Token { kind: TokKind::Str, text: s, line, col }
            }
            c if c.is_ascii_digit() || c == b'.' || c == b'-' || c == b'+' => {
                let mut s = String::new();
                s.push(self.bump() as char);
                while let Some(c) = self.peek() {
                    if c.is_ascii_digit() || c == b'.' {
                        s.push(self.bump() as char);
                    } else if c == b'e' || c == b'E' {
                        s.push(self.bump() as char);
                        if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                            s.push(self.bump() as char);
                        }
                    } else {
                        break;
                    }
                }
                if s.parse::<f64>().is_err() {
                    return Err(BifError::Syntax {
                        line,
                        col,
                        msg: format!("malformed number `{s}`"),
                    });
                }
                Token { kind: TokKind::Number, text: s, line, col }
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut s = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || c == b'_' || c == b'-' || c == b'.' {
                        s.push(self.bump() as char);
                    } else {
                        break;
                    }
                }
                Token { kind: TokKind::Ident, text: s, line, col }
            }
            other => return self.err(format!("unexpected character `{}`", other as char)),
        };
        Ok(tok)
    }
}

struct Parser<'a> {
    lx: Lexer<'a>,
    look: Token,
}

struct ProbBlock {
    child: String,
    parents: Vec<String>,
    /// (parent state labels, probabilities); a `table` row has no labels.
    rows: Vec<(Vec<String>, Vec<f64>)>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, BifError> {
        let mut lx = Lexer::new(src);
        let look = lx.next()?;
        Ok(Parser { lx, look })
    }

    fn advance(&mut self) -> Result<Token, BifError> {
        let next = self.lx.next()?;
        Ok(std::mem::replace(&mut self.look, next))
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, BifError> {
        Err(BifError::Syntax {
            line: self.look.line,
            col: self.look.col,
            msg: msg.into(),
        })
    }

    fn expect_punct(&mut self, c: char) -> Result<(), BifError> {
        if self.look.kind == TokKind::Punct(c) {
            self.advance()?;
            Ok(())
        } else {
            self.err(format!("expected `{c}`, found `{}`", self.look.text))
        }
    }

    fn eat_punct(&mut self, c: char) -> Result<bool, BifError> {
        if self.look.kind == TokKind::Punct(c) {
            self.advance()?;
            Ok(true)
        } else {
            Ok(false)
        }
    }

    /// An identifier; numbers and strings are accepted where names can look
    /// numeric (state labels such as `0`).
    fn name(&mut self) -> Result<String, BifError> {
        match self.look.kind {
            TokKind::Ident | TokKind::Number | TokKind::Str => {
                Ok(self.advance()?.text)
            }
            _ => self.err(format!("expected a name, found `{}`", self.look.text)),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), BifError> {
        if self.look.kind == TokKind::Ident && self.look.text == kw {
            self.advance()?;
            Ok(())
        } else {
            self.err(format!("expected `{kw}`, found `{}`", self.look.text))
        }
    }

    fn number(&mut self) -> Result<f64, BifError> {
        if self.look.kind == TokKind::Number {
            Ok(self.advance()?.text.parse::<f64>().expect("lexer validated"))
        } else {
            self.err(format!("expected a number, found `{}`", self.look.text))
        }
    }

    /// Consumes tokens through the terminating semicolon of a property line.
    fn skip_property(&mut self) -> Result<(), BifError> {
        loop {
            match self.look.kind {
                TokKind::Punct(';') => {
                    self.advance()?;
                    return Ok(());
                }
                TokKind::Eof => return self.err("unterminated property"),
                _ => {
                    self.advance()?;
                }
            }
        }
    }

    fn number_list(&mut self) -> Result<Vec<f64>, BifError> {
        let mut out = vec![self.number()?];
        loop {
            if self.eat_punct(',')? {
                out.push(self.number()?);
            } else if self.look.kind == TokKind::Number {
                // some emitters separate table entries with spaces only
                out.push(self.number()?);
            } else {
                return Ok(out);
            }
        }
    }

    fn network_block(&mut self) -> Result<String, BifError> {
        self.keyword("network")?;
        let mut parts = Vec::new();
        while self.look.kind != TokKind::Punct('{') {
            if self.look.kind == TokKind::Eof {
                return self.err("expected `{` after network header");
            }
            parts.push(self.advance()?.text);
        }
        self.expect_punct('{')?;
        while !self.eat_punct('}')? {
            if self.look.kind == TokKind::Eof {
                return self.err("unterminated network block");
            }
            self.advance()?;
        }
        Ok(parts.join(" "))
    }

    fn variable_block(&mut self) -> Result<Variable, BifError> {
        self.keyword("variable")?;
        let name = self.name()?;
        self.expect_punct('{')?;
        let mut states = Vec::new();
        loop {
            if self.eat_punct('}')? {
                break;
            }
            match (&self.look.kind, self.look.text.as_str()) {
                (TokKind::Ident, "type") => {
                    self.advance()?;
                    self.keyword("discrete")?;
                    self.expect_punct('[')?;
                    let card = self.number()? as usize;
                    self.expect_punct(']')?;
                    self.expect_punct('{')?;
                    states.push(self.name()?);
                    while self.eat_punct(',')? {
                        states.push(self.name()?);
                    }
                    self.expect_punct('}')?;
                    self.expect_punct(';')?;
                    if states.len() != card {
                        return self.err(format!(
                            "variable `{name}` declares {card} states but lists {}",
                            states.len()
                        ));
                    }
                }
                (TokKind::Ident, "property") => {
                    self.advance()?;
                    self.skip_property()?;
                }
                _ => return self.err(format!("unexpected `{}` in variable block", self.look.text)),
            }
        }
        if states.len() < 2 {
            return self.err(format!("variable `{name}` needs at least two states"));
        }
        Ok(Variable { name, states })
    }

    fn probability_block(&mut self) -> Result<ProbBlock, BifError> {
        self.keyword("probability")?;
        self.expect_punct('(')?;
        let child = self.name()?;
        let mut parents = Vec::new();
        if self.eat_punct('|')? {
            parents.push(self.name()?);
            while self.eat_punct(',')? {
                parents.push(self.name()?);
            }
        }
        self.expect_punct(')')?;
        self.expect_punct('{')?;
        let mut rows = Vec::new();
        loop {
            if self.eat_punct('}')? {
                break;
            }
            match (&self.look.kind, self.look.text.as_str()) {
                (TokKind::Ident, "table") => {
                    self.advance()?;
                    let probs = self.number_list()?;
                    self.expect_punct(';')?;
                    rows.push((Vec::new(), probs));
                }
                (TokKind::Ident, "property") => {
                    self.advance()?;
                    self.skip_property()?;
                }
                (TokKind::Punct('('), _) => {
                    self.advance()?;
                    let mut labels = vec![self.name()?];
                    while self.eat_punct(',')? {
                        labels.push(self.name()?);
                    }
                    self.expect_punct(')')?;
                    let probs = self.number_list()?;
                    self.expect_punct(';')?;
                    rows.push((labels, probs));
                }
                _ => {
                    return self.err(format!(
                        "unexpected `{}` in probability block",
                        self.look.text
                    ))
                }
            }
        }
        Ok(ProbBlock { child, parents, rows })
    }
}

/// Parses a BIF 0.3 document into a validated network.
pub fn parse_bif(text: &str) -> Result<BayesNet, BifError> {
    let mut p = Parser::new(text)?;
    let name = p.network_block()?;
    let mut variables: Vec<Variable> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut blocks: Vec<ProbBlock> = Vec::new();
    loop {
        match (&p.look.kind, p.look.text.as_str()) {
            (TokKind::Eof, _) => break,
            (TokKind::Ident, "variable") => {
                let v = p.variable_block()?;
                if index.contains_key(&v.name) {
                    return Err(BifError::DuplicateVariable(v.name));
                }
                index.insert(v.name.clone(), variables.len());
                variables.push(v);
            }
            (TokKind::Ident, "probability") => blocks.push(p.probability_block()?),
            _ => return p.err(format!("expected a block, found `{}`", p.look.text)),
        }
    }

    let n = variables.len();
    let lookup = |name: &str| -> Result<usize, BifError> {
        index.get(name).copied().ok_or_else(|| BifError::UnknownVariable(name.to_string()))
    };

    let mut edges = Vec::new();
    let mut cpts: Vec<Option<Cpt>> = vec![None; n];
    for block in blocks {
        let child = lookup(&block.child)?;
        if cpts[child].is_some() {
            return Err(BifError::DuplicateCpt(block.child));
        }
        let parents: Vec<usize> =
            block.parents.iter().map(|p| lookup(p)).collect::<Result<_, _>>()?;
        for &p in &parents {
            edges.push((p, child));
        }

        let child_card = variables[child].cardinality();
        let n_rows: usize = parents.iter().map(|&p| variables[p].cardinality()).product();
        let check_row = |probs: Vec<f64>| -> Result<Vec<f64>, BifError> {
            if probs.len() != child_card {
                return Err(BifError::RowArity {
                    child: block.child.clone(),
                    got: probs.len(),
                    want: child_card,
                });
            }
            for &v in &probs {
                if !v.is_finite() || v < 0.0 {
                    return Err(BifError::RowValue { child: block.child.clone(), value: v });
                }
            }
            let sum: f64 = probs.iter().sum();
            if (sum - 1.0).abs() > 1e-6 {
                return Err(BifError::RowSum { child: block.child.clone(), sum });
            }
            Ok(if (sum - 1.0).abs() > 1e-12 {
                probs.iter().map(|v| v / sum).collect()
            } else {
                probs
            })
        };
        let mut table: Vec<Option<Vec<f64>>> = vec![None; n_rows];
        for (labels, probs) in block.rows {
            if labels.is_empty() && !parents.is_empty() {
                // flat `table` form: all rows at once, parent configurations
                // in row-major order
                if probs.len() != n_rows * child_card {
                    return Err(BifError::RowArity {
                        child: block.child.clone(),
                        got: probs.len(),
                        want: n_rows * child_card,
                    });
                }
                for (idx, chunk) in probs.chunks(child_card).enumerate() {
                    if table[idx].is_some() {
                        return Err(BifError::DuplicateRow(block.child.clone()));
                    }
                    table[idx] = Some(check_row(chunk.to_vec())?);
                }
                continue;
            }
            let idx = if labels.is_empty() {
                0
            } else {
                if labels.len() != parents.len() {
                    return Err(BifError::RowArity {
                        child: block.child.clone(),
                        got: labels.len(),
                        want: parents.len(),
                    });
                }
                let mut idx = 0;
                for (label, &p) in labels.iter().zip(&parents) {
                    let s = variables[p]
                        .states
                        .iter()
                        .position(|st| st == label)
                        .ok_or_else(|| BifError::UnknownState {
                            var: variables[p].name.clone(),
                            state: label.clone(),
                        })?;
                    idx = idx * variables[p].cardinality() + s;
                }
                idx
            };
            if table[idx].is_some() {
                return Err(BifError::DuplicateRow(block.child.clone()));
            }
            table[idx] = Some(check_row(probs)?);
        }
        let missing = table.iter().filter(|r| r.is_none()).count();
        if missing > 0 {
            return Err(BifError::MissingRows { child: block.child, missing });
        }
        cpts[child] = Some(Cpt {
            child,
            parents,
            table: table.into_iter().map(|r| r.unwrap()).collect(),
        });
    }

    for (i, c) in cpts.iter().enumerate() {
        if c.is_none() {
            return Err(BifError::MissingCpt(variables[i].name.clone()));
        }
    }
    let dag = Dag::from_edges(n, &edges)?;
    Ok(BayesNet {
        name,
        variables,
        dag,
        cpts: cpts.into_iter().map(|c| c.unwrap()).collect(),
    })
}

/// Renders a network back to BIF text. Probabilities print in shortest
/// round-trip form, so parse -> emit -> parse is the identity on the tables.
pub fn emit_bif(net: &BayesNet) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "network {} {{\n}}", net.name);
    for v in &net.variables {
        let _ = writeln!(out, "variable {} {{", v.name);
        let _ = writeln!(
            out,
            "  type discrete [ {} ] {{ {} }};",
            v.cardinality(),
            v.states.join(", ")
        );
        let _ = writeln!(out, "}}");
    }
    for cpt in &net.cpts {
        let child = &net.variables[cpt.child];
        if cpt.parents.is_empty() {
            let _ = writeln!(out, "probability ( {} ) {{", child.name);
            let _ = writeln!(out, "  table {};", join_probs(&cpt.table[0]));
        } else {
            let parent_names: Vec<&str> =
                cpt.parents.iter().map(|&p| net.variables[p].name.as_str()).collect();
            let _ = writeln!(
                out,
                "probability ( {} | {} ) {{",
                child.name,
                parent_names.join(", ")
            );
            let cards: Vec<usize> =
                cpt.parents.iter().map(|&p| net.variables[p].cardinality()).collect();
            for (idx, row) in cpt.table.iter().enumerate() {
                let mut labels = Vec::with_capacity(cards.len());
                let mut rem = idx;
                for &c in cards.iter().rev() {
                    labels.push(rem % c);
                    rem /= c;
                }
                labels.reverse();
                let text: Vec<&str> = labels
                    .iter()
                    .zip(&cpt.parents)
                    .map(|(&s, &p)| net.variables[p].states[s].as_str())
                    .collect();
                let _ = writeln!(out, "  ({}) {};", text.join(", "), join_probs(row));
            }
        }
        let _ = writeln!(out, "}}");
    }
    out
}

fn join_probs(row: &[f64]) -> String {
    row.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_NODE: &str = r#"
// toy network
network two_coins {
}
variable A {
  type discrete [ 2 ] { yes, no };
}
variable B {
  type discrete [ 2 ] { yes, no };
}
probability ( A ) {
  table 0.3, 0.7;
}
probability ( B | A ) {
  (yes) 0.9, 0.1;
  (no) 0.2, 0.8;
}
"#;

    #[test]
    fn parses_a_two_node_file() {
        let net = parse_bif(TWO_NODE).unwrap();
        assert_eq!(net.name, "two_coins");
        assert_eq!(net.n(), 2);
        assert_eq!(net.dag.n_edges(), 1);
        assert!(net.dag.has_edge(0, 1));
        assert_eq!(net.cpts[0].table, vec![vec![0.3, 0.7]]);
        assert_eq!(net.cpts[1].table, vec![vec![0.9, 0.1], vec![0.2, 0.8]]);
    }

    #[test]
    fn round_trip_is_identity() {
        let net = parse_bif(TWO_NODE).unwrap();
        let again = parse_bif(&emit_bif(&net)).unwrap();
        assert_eq!(net.dag.edges(), again.dag.edges());
        assert_eq!(net.variables, again.variables);
        for (a, b) in net.cpts.iter().zip(&again.cpts) {
            assert_eq!(a.table, b.table);
        }
    }

    #[test]
    fn bad_row_sum_is_reported() {
        let text = TWO_NODE.replace("0.9, 0.1", "0.9, 0.08");
        match parse_bif(&text) {
            Err(BifError::RowSum { child, .. }) => assert_eq!(child, "B"),
            other => panic!("expected RowSum, got {other:?}"),
        }
    }

    #[test]
    fn near_one_rows_are_renormalized() {
        let text = TWO_NODE.replace("0.3, 0.7", "0.3000001, 0.7");
        let net = parse_bif(&text).unwrap();
        let row = &net.cpts[0].table[0];
        assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_bif("network x {\n}\nvariable ! {") {
            Err(BifError::Syntax { line: 3, col, .. }) => assert_eq!(col, 10),
            other => panic!("expected Syntax, got {other:?}"),
        }
    }

    #[test]
    fn missing_rows_are_reported() {
        let text = TWO_NODE.replace("  (no) 0.2, 0.8;\n", "");
        match parse_bif(&text) {
            Err(BifError::MissingRows { child, missing }) => {
                assert_eq!(child, "B");
                assert_eq!(missing, 1);
            }
            other => panic!("expected MissingRows, got {other:?}"),
        }
    }

    #[test]
    fn cyclic_structure_is_rejected() {
        let text = r#"
network loop {
}
variable A { type discrete [ 2 ] { a0, a1 }; }
variable B { type discrete [ 2 ] { b0, b1 }; }
probability ( A | B ) { (b0) 0.5, 0.5; (b1) 0.5, 0.5; }
probability ( B | A ) { (a0) 0.5, 0.5; (a1) 0.5, 0.5; }
"#;
        assert!(matches!(parse_bif(text), Err(BifError::Graph(GraphError::Cyclic))));
    }

    #[test]
    fn unknown_parent_state_is_rejected() {
        let text = TWO_NODE.replace("(no)", "(maybe)");
        match parse_bif(&text) {
            Err(BifError::UnknownState { var, state }) => {
                assert_eq!(var, "A");
                assert_eq!(state, "maybe");
            }
            other => panic!("expected UnknownState, got {other:?}"),
        }
    }

    #[test]
    fn flat_table_form_fills_every_row() {
        let text = TWO_NODE.replace(
            "  (yes) 0.9, 0.1;\n  (no) 0.2, 0.8;",
            "  table 0.9, 0.1, 0.2, 0.8;",
        );
        let net = parse_bif(&text).unwrap();
        assert_eq!(net.cpts[1].table, vec![vec![0.9, 0.1], vec![0.2, 0.8]]);
    }

    #[test]
    fn comments_and_properties_are_ignored() {
        let text = r#"
network annotated { property author = nobody; }
variable A {
  type discrete [ 2 ] { yes, no }; /* inline */
  property position = (10, 20);
}
probability ( A ) {
  property fitted = true;
  table 0.5, 0.5; // fifty-fifty
}
"#;
        let net = parse_bif(text).unwrap();
        assert_eq!(net.n(), 1);
        assert_eq!(net.cpts[0].table[0], vec![0.5, 0.5]);
    }
}
