//! A small OpenQASM-2.0-flavoured circuit format.
//!
//! ```text
//! // comments run to the end of the line
//! qreg q[3];
//! cx q[0],q[2];
//! h q[1];
//! rz(pi/4) q[2];
//! ```
//!
//! `OPENQASM` and `include` statements are accepted and ignored.

use std::fmt::{self, Write as _};

use qcomb_core::circuit::{Circuit, Gate};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("expected {0}")]
    Expected(&'static str),
    #[error("unexpected character `{0}`")]
    BadChar(char),
    #[error("bad number `{0}`")]
    BadNumber(String),
    #[error("unsupported multi-qubit gate `{0}`")]
    UnknownMultiQubitGate(String),
    #[error("qubit index {index} out of range for register of size {size}")]
    IndexOverflow { index: usize, size: usize },
    #[error("unknown register `{0}`")]
    UnknownRegister(String),
    #[error("gate before any `qreg` declaration")]
    MissingRegister,
    #[error("only one `qreg` declaration is supported")]
    DuplicateRegister,
    #[error("CNOT control and target coincide")]
    SameQubit,
    #[error("at most three parameters are supported")]
    TooManyParams,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Str,
    Sym(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line = li + 1;
        let src = raw.split("//").next().unwrap_or("");
        let chars: Vec<char> = src.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            let start = i;
            let tok = if c.is_whitespace() {
                i += 1;
                continue;
            } else if c.is_ascii_alphabetic() || c == '_' {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                Tok::Ident(chars[start..i].iter().collect())
            } else if c.is_ascii_digit() || c == '.' {
                while i < chars.len() {
                    let d = chars[i];
                    let exp_sign = (d == '-' || d == '+') && matches!(chars[i - 1], 'e' | 'E');
                    if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                        i += 1;
                    } else {
                        break;
                    }
                }
                Tok::Number(chars[start..i].iter().collect())
            } else if c == '"' {
                i += 1;
                while i < chars.len() && chars[i] != '"' {
                    i += 1;
                }
                if i == chars.len() {
                    return Err(ParseError {
                        line,
                        column,
                        kind: ParseErrorKind::Expected("closing quote"),
                    });
                }
                i += 1;
                Tok::Str
            } else if "[](),;*/+-".contains(c) {
                i += 1;
                Tok::Sym(c)
            } else {
                return Err(ParseError {
                    line,
                    column,
                    kind: ParseErrorKind::BadChar(c),
                });
            };
            out.push(Token { tok, line, column });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map_or(self.end, |t| (t.line, t.column))
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        let (line, column) = self.here();
        ParseError { line, column, kind }
    }

    fn err_at(&self, at: (usize, usize), kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: at.0,
            column: at.1,
            kind,
        }
    }

    fn sym(&mut self, c: char, what: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(ParseErrorKind::Expected(what)))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        let hit = self.peek() == Some(&Tok::Sym(c));
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn ident(&mut self, what: &'static str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.err(ParseErrorKind::Expected(what))),
        }
    }

    fn integer(&mut self) -> Result<usize, ParseError> {
        match self.peek() {
            Some(Tok::Number(s)) => {
                let v = s
                    .parse()
                    .map_err(|_| self.err(ParseErrorKind::BadNumber(s.clone())))?;
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.err(ParseErrorKind::Expected("integer"))),
        }
    }

    /// `[-] atom (('*' | '/') atom)*` where an atom is a number or `pi`.
    fn param(&mut self) -> Result<f64, ParseError> {
        let neg = self.eat('-');
        if !neg {
            self.eat('+');
        }
        let mut v = self.atom()?;
        loop {
            if self.eat('*') {
                v *= self.atom()?;
            } else if self.eat('/') {
                v /= self.atom()?;
            } else {
                break;
            }
        }
        Ok(if neg { -v } else { v })
    }

    fn atom(&mut self) -> Result<f64, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Number(s)) => {
                let v = s
                    .parse()
                    .map_err(|_| self.err(ParseErrorKind::BadNumber(s.clone())))?;
                self.pos += 1;
                Ok(v)
            }
            Some(Tok::Ident(s)) if s == "pi" => {
                self.pos += 1;
                Ok(std::f64::consts::PI)
            }
            _ => Err(self.err(ParseErrorKind::Expected("number or `pi`"))),
        }
    }

    /// `reg[index]`, checked against the declared register.
    fn qubit(&mut self, reg: &Option<(String, usize)>) -> Result<usize, ParseError> {
        let at = self.here();
        let name = self.ident("qubit reference")?;
        let Some((rname, size)) = reg else {
            return Err(self.err_at(at, ParseErrorKind::MissingRegister));
        };
        if &name != rname {
            return Err(self.err_at(at, ParseErrorKind::UnknownRegister(name)));
        }
        self.sym('[', "`[`")?;
        let at = self.here();
        let index = self.integer()?;
        self.sym(']', "`]`")?;
        if index >= *size {
            return Err(self.err_at(at, ParseErrorKind::IndexOverflow { index, size: *size }));
        }
        Ok(index)
    }
}

/// Parses the circuit text format.
pub fn parse_circuit(text: &str) -> Result<Circuit, ParseError> {
    let toks = lex(text)?;
    let end = (text.lines().count().max(1), 1);
    let mut p = Parser { toks, pos: 0, end };
    let mut reg: Option<(String, usize)> = None;
    let mut gates = Vec::new();
    while p.peek().is_some() {
        let at = p.here();
        let head = p.ident("statement")?;
        match head.as_str() {
            "OPENQASM" => {
                p.param()?;
            }
            "include" => {
                if p.peek() != Some(&Tok::Str) {
                    return Err(p.err(ParseErrorKind::Expected("file name")));
                }
                p.pos += 1;
            }
            "qreg" => {
                if reg.is_some() {
                    return Err(p.err_at(at, ParseErrorKind::DuplicateRegister));
                }
                let name = p.ident("register name")?;
                p.sym('[', "`[`")?;
                let size = p.integer()?;
                p.sym(']', "`]`")?;
                reg = Some((name, size));
            }
            label => {
                let mut params = Vec::new();
                if p.eat('(') {
                    if !p.eat(')') {
                        loop {
                            params.push(p.param()?);
                            if p.eat(')') {
                                break;
                            }
                            p.sym(',', "`,` or `)`")?;
                        }
                    }
                    if params.len() > 3 {
                        return Err(p.err_at(at, ParseErrorKind::TooManyParams));
                    }
                }
                let mut qubits = vec![p.qubit(&reg)?];
                while p.eat(',') {
                    qubits.push(p.qubit(&reg)?);
                }
                let gate = match (label, qubits.as_slice()) {
                    ("cx" | "CX", &[a, b]) if params.is_empty() => {
                        if a == b {
                            return Err(p.err_at(at, ParseErrorKind::SameQubit));
                        }
                        Gate::cnot(a, b)
                    }
                    (_, &[q]) => Gate::single(label, &params, q),
                    _ => {
                        return Err(
                            p.err_at(at, ParseErrorKind::UnknownMultiQubitGate(label.to_string()))
                        )
                    }
                };
                gates.push(gate);
            }
        }
        p.sym(';', "`;`")?;
    }
    let n = reg.map_or(0, |r| r.1);
    Ok(Circuit::from_gates(n, gates).expect("indices checked while parsing"))
}

/// Writes one gate statement, without the trailing newline.
pub fn write_gate(out: &mut impl fmt::Write, g: &Gate) -> fmt::Result {
    match g {
        Gate::Cnot { control, target } => write!(out, "cx q[{control}],q[{target}];"),
        Gate::Single {
            label,
            params,
            qubit,
        } => {
            out.write_str(label)?;
            if !params.is_empty() {
                out.write_char('(')?;
                for (i, v) in params.iter().enumerate() {
                    if i > 0 {
                        out.write_char(',')?;
                    }
                    // `{:?}` prints the shortest text that parses back exactly
                    write!(out, "{v:?}")?;
                }
                out.write_char(')')?;
            }
            write!(out, " q[{qubit}];")
        }
    }
}

/// Renders a circuit in the text format.
pub fn write_circuit(c: &Circuit) -> String {
    let mut s = String::new();
    writeln!(s, "qreg q[{}];", c.n_qubits()).expect("writing to a String");
    for g in c.gates() {
        write_gate(&mut s, g).expect("writing to a String");
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kind(text: &str) -> ParseErrorKind {
        parse_circuit(text).unwrap_err().kind
    }

    #[test]
    fn examples() {
        let c = parse_circuit("qreg q[2]; cx q[0],q[1];").unwrap();
        assert_eq!(c.n_qubits(), 2);
        assert_eq!(c.gates(), &[Gate::cnot(0, 1)]);
        let c = parse_circuit("qreg q[1]; u q[0];").unwrap();
        assert_eq!(c.gates(), &[Gate::single("u", &[], 0)]);
    }

    #[test]
    fn params_comments_and_headers() {
        let text = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n// a comment\nqreg r[3];\n  rz( -pi/2 ) r[2]; // trailing\nu(1.5e-1, 2*pi, 0.25) r[0];\n";
        let c = parse_circuit(text).unwrap();
        assert_eq!(
            c.gates(),
            &[
                Gate::single("rz", &[-std::f64::consts::FRAC_PI_2], 2),
                Gate::single("u", &[0.15, 2.0 * std::f64::consts::PI, 0.25], 0),
            ]
        );
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_circuit("qreg q[2];\ncx q[0],q[2];").unwrap_err();
        assert_eq!((e.line, e.column), (2, 11));
        assert_eq!(e.kind, ParseErrorKind::IndexOverflow { index: 2, size: 2 });
        let e = parse_circuit("qreg q[3];\n  cz q[0],q[1];").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert_eq!(e.kind, ParseErrorKind::UnknownMultiQubitGate("cz".into()));
        assert_eq!(kind("qreg q[2]; h q[0]"), ParseErrorKind::Expected("`;`"));
        assert_eq!(kind("h q[0];"), ParseErrorKind::MissingRegister);
        assert_eq!(
            kind("qreg q[2]; h p[0];"),
            ParseErrorKind::UnknownRegister("p".into())
        );
        assert_eq!(
            kind("qreg q[2]; qreg r[2];"),
            ParseErrorKind::DuplicateRegister
        );
        assert_eq!(kind("qreg q[2]; cx q[1],q[1];"), ParseErrorKind::SameQubit);
        assert_eq!(kind("qreg q[2]; h q[0] $"), ParseErrorKind::BadChar('$'));
    }

    #[test]
    fn write_then_parse_small() {
        let mut c = Circuit::new(3);
        c.push_cnot(2, 0).unwrap();
        c.push_single("rx", &[0.1 + 0.2], 1).unwrap();
        c.push_single("v", &[], 0).unwrap();
        let text = write_circuit(&c);
        assert_eq!(
            text,
            "qreg q[3];\ncx q[2],q[0];\nrx(0.30000000000000004) q[1];\nv q[0];\n"
        );
        assert_eq!(parse_circuit(&text).unwrap(), c);
    }
}
