//! CNF and XOR instance model: literals, clauses, formulas, assignments.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("clause has no literals")]
    EmptyClause,
    #[error("duplicate variable {var} in clause")]
    DuplicateVariable { var: usize },
    #[error("variable {var} out of range 1..={n_vars}")]
    VariableOutOfRange { var: usize, n_vars: usize },
    #[error("assignment has {got} bits but the formula has {expected} variables")]
    LengthMismatch { got: usize, expected: usize },
    #[error("{n_vars} variables exceed the exhaustive-scan limit of {limit}")]
    TooLarge { n_vars: usize, limit: usize },
}

/// A variable (1-based index) or its negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    var: u32,
    negated: bool,
}

impl Literal {
    pub fn new(var: u32, negated: bool) -> Self {
        assert!(var >= 1, "variable indices are 1-based");
        Self { var, negated }
    }

    pub fn positive(var: u32) -> Self {
        Self::new(var, false)
    }

    pub fn negative(var: u32) -> Self {
        Self::new(var, true)
    }

    /// 1-based variable index.
    pub fn var(self) -> usize {
        self.var as usize
    }

    pub fn is_negated(self) -> bool {
        self.negated
    }

    /// Polarity sign: +1 for a positive literal, -1 for a negated one.
    pub fn sign(self) -> i8 {
        if self.negated {
            -1
        } else {
            1
        }
    }

    /// Truth value under `bits`, where `bits[i]` is variable `i + 1`.
    pub fn evaluate(self, bits: &[bool]) -> bool {
        bits[self.var as usize - 1] != self.negated
    }

    /// Signed DIMACS encoding: `var` for positive, `-var` for negated.
    pub fn to_dimacs(self) -> i64 {
        if self.negated {
            -(self.var as i64)
        } else {
            self.var as i64
        }
    }

    pub fn from_dimacs(code: i64) -> Option<Self> {
        if code == 0 || code.unsigned_abs() > u32::MAX as u64 {
            return None;
        }
        Some(Self::new(code.unsigned_abs() as u32, code < 0))
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// Disjunction of literals over pairwise-distinct variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CnfClause {
    literals: Vec<Literal>,
}

impl CnfClause {
    pub fn new(literals: Vec<Literal>) -> Result<Self, InstanceError> {
        if literals.is_empty() {
            return Err(InstanceError::EmptyClause);
        }
        for (i, lit) in literals.iter().enumerate() {
            if literals[..i].iter().any(|l| l.var() == lit.var()) {
                return Err(InstanceError::DuplicateVariable { var: lit.var() });
            }
        }
        Ok(Self { literals })
    }

    pub fn from_dimacs(codes: &[i64]) -> Result<Self, InstanceError> {
        let literals = codes
            .iter()
            .map(|&c| Literal::from_dimacs(c).ok_or(InstanceError::EmptyClause))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(literals)
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn is_satisfied_by(&self, bits: &[bool]) -> bool {
        self.literals.iter().any(|l| l.evaluate(bits))
    }
}

/// One entry of the clause-variable incidence index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Occurrence {
    pub clause: u32,
    pub negated: bool,
}

/// A CNF formula with its clause-variable incidence index.
///
/// Immutable after construction; the occurrence index is built once and is
/// consistent with the clause list by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    n_vars: usize,
    clauses: Vec<CnfClause>,
    occurrences: Vec<Vec<Occurrence>>,
}

impl CnfFormula {
    pub fn new(n_vars: usize, clauses: Vec<CnfClause>) -> Result<Self, InstanceError> {
        let mut occurrences = vec![Vec::new(); n_vars];
        for (ci, clause) in clauses.iter().enumerate() {
            for lit in clause.literals() {
                if lit.var() > n_vars {
                    return Err(InstanceError::VariableOutOfRange {
                        var: lit.var(),
                        n_vars,
                    });
                }
                occurrences[lit.var() - 1].push(Occurrence {
                    clause: ci as u32,
                    negated: lit.is_negated(),
                });
            }
        }
        Ok(Self {
            n_vars,
            clauses,
            occurrences,
        })
    }

    /// Builds a formula from signed DIMACS literal lists. Test and tooling
    /// convenience.
    pub fn from_dimacs_clauses(n_vars: usize, clauses: &[&[i64]]) -> Result<Self, InstanceError> {
        let clauses = clauses
            .iter()
            .map(|codes| CnfClause::from_dimacs(codes))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(n_vars, clauses)
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[CnfClause] {
        &self.clauses
    }

    pub fn clause(&self, id: usize) -> &CnfClause {
        &self.clauses[id]
    }

    /// Incidence list of a 1-based variable: (clause id, polarity) pairs in
    /// clause order.
    pub fn occurrences(&self, var: usize) -> &[Occurrence] {
        &self.occurrences[var - 1]
    }

    pub fn total_literals(&self) -> usize {
        self.clauses.iter().map(CnfClause::len).sum()
    }

    /// Clause density M/N.
    pub fn density(&self) -> f64 {
        self.n_clauses() as f64 / self.n_vars as f64
    }

    /// Number of clauses with no true literal under `a`.
    pub fn count_unsat(&self, a: &Assignment) -> Result<usize, InstanceError> {
        if a.len() != self.n_vars {
            return Err(InstanceError::LengthMismatch {
                got: a.len(),
                expected: self.n_vars,
            });
        }
        Ok(self
            .clauses
            .iter()
            .filter(|c| !c.is_satisfied_by(a.bits()))
            .count())
    }
}

/// Boolean assignment, one bit per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    bits: Vec<bool>,
}

impl Assignment {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Assignment number `index` in the enumeration where variable `i` is bit
    /// `i - 1` of the integer. Index 0 is all-false.
    pub fn from_index(n_vars: usize, index: u64) -> Self {
        Self {
            bits: (0..n_vars).map(|i| index >> i & 1 == 1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Value of the 1-based variable `var`.
    pub fn bit(&self, var: usize) -> bool {
        self.bits[var - 1]
    }

    pub fn set(&mut self, var: usize, value: bool) {
        self.bits[var - 1] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

impl fmt::Display for Assignment {
    /// Space-separated 0/1 digits, variable 1 first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.bits.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", u8::from(*b))?;
        }
        Ok(())
    }
}

/// Parity constraint `x_a xor x_b xor x_c = parity` over three distinct
/// variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct XorClause {
    vars: [u32; 3],
    parity: bool,
}

impl XorClause {
    pub fn new(vars: [u32; 3], parity: bool) -> Result<Self, InstanceError> {
        for &v in &vars {
            if v == 0 {
                return Err(InstanceError::VariableOutOfRange {
                    var: 0,
                    n_vars: u32::MAX as usize,
                });
            }
        }
        if vars[0] == vars[1] || vars[0] == vars[2] || vars[1] == vars[2] {
            let dup = if vars[0] == vars[1] || vars[0] == vars[2] {
                vars[0]
            } else {
                vars[1]
            };
            return Err(InstanceError::DuplicateVariable { var: dup as usize });
        }
        Ok(Self { vars, parity })
    }

    pub fn vars(&self) -> [u32; 3] {
        self.vars
    }

    pub fn parity(&self) -> bool {
        self.parity
    }

    pub fn is_satisfied_by(&self, bits: &[bool]) -> bool {
        let [a, b, c] = self.vars;
        (bits[a as usize - 1] ^ bits[b as usize - 1] ^ bits[c as usize - 1]) == self.parity
    }
}

/// Balanced 3-XORSAT system seeding the hard CNF family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XorInstance {
    n_vars: usize,
    clauses: Vec<XorClause>,
    seed: u64,
}

impl XorInstance {
    pub fn new(n_vars: usize, clauses: Vec<XorClause>, seed: u64) -> Result<Self, InstanceError> {
        for clause in &clauses {
            for v in clause.vars() {
                if v as usize > n_vars {
                    return Err(InstanceError::VariableOutOfRange {
                        var: v as usize,
                        n_vars,
                    });
                }
            }
        }
        Ok(Self {
            n_vars,
            clauses,
            seed,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[XorClause] {
        &self.clauses
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Occurrence count per variable (index 0 is variable 1).
    pub fn occurrence_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_vars];
        for clause in &self.clauses {
            for v in clause.vars() {
                counts[v as usize - 1] += 1;
            }
        }
        counts
    }

    /// Number of parity constraints violated by `a`.
    pub fn count_violated(&self, a: &Assignment) -> Result<usize, InstanceError> {
        if a.len() != self.n_vars {
            return Err(InstanceError::LengthMismatch {
                got: a.len(),
                expected: self.n_vars,
            });
        }
        Ok(self
            .clauses
            .iter()
            .filter(|c| !c.is_satisfied_by(a.bits()))
            .count())
    }

    /// Expands every parity constraint into its 4 CNF clauses; see
    /// [`expand_instance`].
    pub fn expand(&self) -> CnfFormula {
        expand_instance(self)
    }
}

/// The four CNF clauses equivalent to one XOR clause.
///
/// Each of the four assignments of (a, b, c) violating the parity equation is
/// excluded by exactly one output clause. Block order: the even-parity
/// patterns 000, 011, 101, 110 in that order when `parity` is true, and
/// their bitwise complements (111, 100, 010, 001) when it is false; a
/// literal is negated exactly where the excluded pattern has a 1.
pub fn xor_to_cnf(clause: &XorClause) -> [CnfClause; 4] {
    let vars = clause.vars();
    let patterns: [u8; 4] = [0b000, 0b011, 0b101, 0b110];
    patterns.map(|even| {
        let excluded = if clause.parity() { even } else { !even & 0b111 };
        let lits = (0..3)
            .map(|j| Literal::new(vars[j], excluded >> (2 - j) & 1 == 1))
            .collect();
        CnfClause::new(lits).expect("three distinct variables")
    })
}

/// Expands a XOR instance into its Max-E3SAT CNF: 4 clauses per XOR clause,
/// contiguous, in XOR clause order. At rho_xor = 1.25 the result has clause
/// density 5 whenever 1.25 * N is integral.
pub fn expand_instance(xor: &XorInstance) -> CnfFormula {
    let mut clauses = Vec::with_capacity(4 * xor.n_clauses());
    for clause in xor.clauses() {
        clauses.extend(xor_to_cnf(clause));
    }
    CnfFormula::new(xor.n_vars(), clauses).expect("xor instance variables are in range")
}
