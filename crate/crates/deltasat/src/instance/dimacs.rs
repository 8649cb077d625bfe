//! DIMACS CNF read/write, the XCNF dialect for XOR instances, and the
//! instance metadata sidecar.
//!
//! XCNF is standard DIMACS with header `p xcnf N M` and one line per parity
//! constraint, `x a b c p` with `p` in {0,1}; a `c seed <u64>` comment
//! records the generator seed.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::types::{CnfClause, CnfFormula, Literal, XorClause, XorInstance};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: {msg}")]
    HeaderMismatch { line: usize, msg: String },
}

impl DimacsError {
    fn parse(line: usize, msg: impl Into<String>) -> Self {
        DimacsError::Parse {
            line,
            msg: msg.into(),
        }
    }

    fn header(line: usize, msg: impl Into<String>) -> Self {
        DimacsError::HeaderMismatch {
            line,
            msg: msg.into(),
        }
    }
}

/// Parse result: the formula plus any comment lines (metadata only; they do
/// not survive a round trip through [`emit_dimacs`]).
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedCnf {
    pub formula: CnfFormula,
    pub comments: Vec<String>,
}

/// Parses DIMACS CNF text: `p cnf N M` header, clauses as signed literals
/// terminated by 0 (clauses may span lines).
pub fn parse_dimacs(text: &str) -> Result<ParsedCnf, DimacsError> {
    let mut header: Option<(usize, usize)> = None;
    let mut comments = Vec::new();
    let mut clauses: Vec<CnfClause> = Vec::new();
    let mut pending: Vec<Literal> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "c" || line.starts_with("c ") || line.starts_with("c\t") {
            comments.push(line[1..].trim().to_string());
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(DimacsError::parse(line_no, "duplicate problem line"));
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != 4 || tokens[0] != "p" || tokens[1] != "cnf" {
                return Err(DimacsError::parse(line_no, "expected `p cnf N M`"));
            }
            let n = tokens[2]
                .parse::<usize>()
                .map_err(|_| DimacsError::parse(line_no, "bad variable count"))?;
            let m = tokens[3]
                .parse::<usize>()
                .map_err(|_| DimacsError::parse(line_no, "bad clause count"))?;
            header = Some((n, m));
            continue;
        }

        let (n_vars, _) = header
            .ok_or_else(|| DimacsError::parse(line_no, "clause before `p cnf` header"))?;
        for token in line.split_whitespace() {
            let code = token
                .parse::<i64>()
                .map_err(|_| DimacsError::parse(line_no, format!("bad literal `{token}`")))?;
            if code == 0 {
                let clause = CnfClause::new(std::mem::take(&mut pending))
                    .map_err(|e| DimacsError::parse(line_no, e.to_string()))?;
                clauses.push(clause);
            } else {
                let lit = Literal::from_dimacs(code)
                    .ok_or_else(|| DimacsError::parse(line_no, format!("bad literal `{token}`")))?;
                if lit.var() > n_vars {
                    return Err(DimacsError::header(
                        line_no,
                        format!("literal {code} exceeds declared {n_vars} variables"),
                    ));
                }
                pending.push(lit);
            }
        }
    }

    let (n_vars, m_decl) =
        header.ok_or_else(|| DimacsError::parse(last_line.max(1), "missing `p cnf` header"))?;
    if !pending.is_empty() {
        return Err(DimacsError::parse(last_line, "unterminated clause at end of input"));
    }
    if clauses.len() != m_decl {
        return Err(DimacsError::header(
            last_line.max(1),
            format!("header declares {m_decl} clauses, body has {}", clauses.len()),
        ));
    }
    let formula = CnfFormula::new(n_vars, clauses)
        .map_err(|e| DimacsError::parse(last_line.max(1), e.to_string()))?;
    Ok(ParsedCnf { formula, comments })
}

/// Emits DIMACS CNF text whose header counts match the formula exactly.
pub fn emit_dimacs(f: &CnfFormula) -> String {
    let mut out = String::with_capacity(16 + 8 * f.total_literals());
    out.push_str(&format!("p cnf {} {}\n", f.n_vars(), f.n_clauses()));
    for clause in f.clauses() {
        for lit in clause.literals() {
            out.push_str(&format!("{} ", lit.to_dimacs()));
        }
        out.push_str("0\n");
    }
    out
}

/// Parses the XCNF dialect into a XOR instance. A `c seed <u64>` comment, if
/// present, populates the seed field (0 otherwise).
pub fn parse_xcnf(text: &str) -> Result<XorInstance, DimacsError> {
    let mut header: Option<(usize, usize)> = None;
    let mut seed = 0u64;
    let mut clauses: Vec<XorClause> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "c" || line.starts_with("c ") || line.starts_with("c\t") {
            let rest = line[1..].trim();
            if let Some(value) = rest.strip_prefix("seed ") {
                seed = value
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| DimacsError::parse(line_no, "bad seed comment"))?;
            }
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(DimacsError::parse(line_no, "duplicate problem line"));
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != 4 || tokens[0] != "p" || tokens[1] != "xcnf" {
                return Err(DimacsError::parse(line_no, "expected `p xcnf N M`"));
            }
            let n = tokens[2]
                .parse::<usize>()
                .map_err(|_| DimacsError::parse(line_no, "bad variable count"))?;
            let m = tokens[3]
                .parse::<usize>()
                .map_err(|_| DimacsError::parse(line_no, "bad clause count"))?;
            header = Some((n, m));
            continue;
        }

        let (n_vars, _) =
            header.ok_or_else(|| DimacsError::parse(line_no, "clause before `p xcnf` header"))?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 5 || tokens[0] != "x" {
            return Err(DimacsError::parse(line_no, "expected `x a b c p`"));
        }
        let mut vars = [0u32; 3];
        for (slot, token) in tokens[1..4].iter().enumerate() {
            let v = token
                .parse::<u32>()
                .map_err(|_| DimacsError::parse(line_no, format!("bad variable `{token}`")))?;
            if v == 0 {
                return Err(DimacsError::parse(line_no, "variables are 1-based"));
            }
            if v as usize > n_vars {
                return Err(DimacsError::header(
                    line_no,
                    format!("variable {v} exceeds declared {n_vars} variables"),
                ));
            }
            vars[slot] = v;
        }
        let parity = match tokens[4] {
            "0" => false,
            "1" => true,
            other => return Err(DimacsError::parse(line_no, format!("bad parity `{other}`"))),
        };
        let clause = XorClause::new(vars, parity)
            .map_err(|e| DimacsError::parse(line_no, e.to_string()))?;
        clauses.push(clause);
    }

    let (n_vars, m_decl) =
        header.ok_or_else(|| DimacsError::parse(last_line.max(1), "missing `p xcnf` header"))?;
    if clauses.len() != m_decl {
        return Err(DimacsError::header(
            last_line.max(1),
            format!("header declares {m_decl} clauses, body has {}", clauses.len()),
        ));
    }
    XorInstance::new(n_vars, clauses, seed)
        .map_err(|e| DimacsError::parse(last_line.max(1), e.to_string()))
}

pub fn emit_xcnf(x: &XorInstance) -> String {
    let mut out = String::with_capacity(32 + 12 * x.n_clauses());
    out.push_str(&format!("c seed {}\n", x.seed()));
    out.push_str(&format!("p xcnf {} {}\n", x.n_vars(), x.n_clauses()));
    for clause in x.clauses() {
        let [a, b, c] = clause.vars();
        out.push_str(&format!("x {a} {b} {c} {}\n", u8::from(clause.parity())));
    }
    out
}

/// Version string recorded in metadata sidecars.
pub const GENERATOR_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Sidecar describing how an instance was generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceMetadata {
    pub n: usize,
    pub rho_xor: f64,
    pub seed: u64,
    pub generator_version: String,
    pub m_xor: usize,
    pub m_cnf: usize,
    /// Actual CNF density 4 * m_xor / n.
    pub rho_cnf: f64,
}

impl InstanceMetadata {
    pub fn for_instance(x: &XorInstance, rho_xor: f64) -> Self {
        let m_xor = x.n_clauses();
        let m_cnf = 4 * m_xor;
        Self {
            n: x.n_vars(),
            rho_xor,
            seed: x.seed(),
            generator_version: GENERATOR_VERSION.to_string(),
            m_xor,
            m_cnf,
            rho_cnf: m_cnf as f64 / x.n_vars() as f64,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metadata serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
