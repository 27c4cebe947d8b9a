//! Cost operators written as sums of tensor-product terms.
//!
//! Each term is a complex coefficient times a string of single-qubit factors,
//! one letter per qubit. Character `j` of the string acts on qubit `j`.
//! Besides the Paulis the alphabet has `H` (Hadamard), `+` (`|1⟩⟨0|`) and
//! `-` (`|0⟩⟨1|`), so non-Hermitian operators can be written directly.

use std::fmt;

use crate::error::{Error, Result};
use crate::statevec::{Pauli, SmallMatrix, StateVector, C64};

/// Largest register for which Hermiticity is checked numerically.
pub const HERMITICITY_CHECK_MAX_QUBITS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Factor {
    I,
    X,
    Y,
    Z,
    H,
    /// `|1⟩⟨0|`
    Raise,
    /// `|0⟩⟨1|`
    Lower,
}

impl Factor {
    pub fn from_char(c: char) -> Option<Self> {
        Some(match c {
            'I' => Factor::I,
            'X' => Factor::X,
            'Y' => Factor::Y,
            'Z' => Factor::Z,
            'H' => Factor::H,
            '+' => Factor::Raise,
            '-' => Factor::Lower,
            _ => return None,
        })
    }

    pub fn to_char(self) -> char {
        match self {
            Factor::I => 'I',
            Factor::X => 'X',
            Factor::Y => 'Y',
            Factor::Z => 'Z',
            Factor::H => 'H',
            Factor::Raise => '+',
            Factor::Lower => '-',
        }
    }

    pub fn adjoint(self) -> Self {
        match self {
            Factor::Raise => Factor::Lower,
            Factor::Lower => Factor::Raise,
            other => other,
        }
    }

    pub fn matrix(self) -> SmallMatrix {
        let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        match self {
            Factor::I => SmallMatrix::identity(2).expect("2x2"),
            Factor::X => Pauli::X.matrix(),
            Factor::Y => Pauli::Y.matrix(),
            Factor::Z => Pauli::Z.matrix(),
            Factor::H => SmallMatrix::from_rows2([[s, s], [s, -s]]),
            Factor::Raise => SmallMatrix::from_rows2([[o, o], [l, o]]),
            Factor::Lower => SmallMatrix::from_rows2([[o, l], [o, o]]),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: C64,
    pub factors: Vec<Factor>,
}

impl Term {
    pub fn new(coeff: C64, factors: &str) -> Result<Self> {
        let factors = factors
            .chars()
            .map(|c| Factor::from_char(c).ok_or_else(|| Error::Observable(format!("unknown factor `{c}`"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { coeff, factors })
    }

    pub fn factor_string(&self) -> String {
        self.factors.iter().map(|f| f.to_char()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    num_qubits: usize,
    terms: Vec<Term>,
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.num_qubits)?;
        for t in &self.terms {
            writeln!(f, "{:?} {:?} {}", t.coeff.re, t.coeff.im, t.factor_string())?;
        }
        Ok(())
    }
}

impl Observable {
    pub fn new(num_qubits: usize, terms: Vec<Term>) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::Observable("an observable needs at least one qubit".into()));
        }
        if terms.is_empty() {
            return Err(Error::Observable("an observable needs at least one term".into()));
        }
        if let Some(t) = terms.iter().find(|t| t.factors.len() != num_qubits) {
            return Err(Error::Observable(format!(
                "factor string `{}` does not have length {num_qubits}",
                t.factor_string()
            )));
        }
        Ok(Self { num_qubits, terms })
    }

    /// Builds an observable from `(coefficient, factor string)` pairs.
    pub fn from_terms<'a>(num_qubits: usize, terms: impl IntoIterator<Item = (C64, &'a str)>) -> Result<Self> {
        let terms = terms
            .into_iter()
            .map(|(c, s)| Term::new(c, s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(num_qubits, terms)
    }

    /// `H⊗…⊗H`.
    pub fn hadamard_all(num_qubits: usize) -> Result<Self> {
        Self::from_terms(num_qubits, [(C64::new(1.0, 0.0), "H".repeat(num_qubits).as_str())])
    }

    /// `Z⊗…⊗Z`.
    pub fn z_all(num_qubits: usize) -> Result<Self> {
        Self::from_terms(num_qubits, [(C64::new(1.0, 0.0), "Z".repeat(num_qubits).as_str())])
    }

    /// Resolves the built-in names `hadamard_all` and `z_all`.
    pub fn builtin(name: &str, num_qubits: usize) -> Option<Result<Self>> {
        match name {
            "hadamard_all" => Some(Self::hadamard_all(num_qubits)),
            "z_all" => Some(Self::z_all(num_qubits)),
            _ => None,
        }
    }

    /// Parses `qubits <N>` followed by `<re> <im> <factors>` lines. Blank
    /// lines and `#` comments are skipped; errors carry 1-based line numbers.
    pub fn parse(src: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse { line, message };
        let mut lines = src
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line, head) = lines
            .next()
            .ok_or_else(|| err(1, "missing `qubits <n>` header".into()))?;
        let num_qubits = match head.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["qubits", n] => n
                .parse::<usize>()
                .map_err(|_| err(line, format!("invalid qubit count `{n}`")))?,
            _ => return Err(err(line, "expected `qubits <n>`".into())),
        };
        let mut terms = Vec::new();
        for (line, text) in lines {
            let tok: Vec<&str> = text.split_whitespace().collect();
            let [re, im, factors] = tok.as_slice() else {
                return Err(err(line, "expected `<re> <im> <factors>`".into()));
            };
            let num = |s: &str| s.parse::<f64>().map_err(|_| err(line, format!("invalid number `{s}`")));
            let term = Term::new(C64::new(num(re)?, num(im)?), factors).map_err(|e| err(line, e.to_string()))?;
            if term.factors.len() != num_qubits {
                return Err(err(line, format!("factor string `{factors}` does not have length {num_qubits}")));
            }
            terms.push(term);
        }
        let last = src.lines().count().max(1);
        Self::new(num_qubits, terms).map_err(|e| err(last, e.to_string()))
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    fn structurally_hermitian(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.coeff.im == 0.0 && !t.factors.iter().any(|f| matches!(f, Factor::Raise | Factor::Lower)))
    }

    /// Whether the operator equals its conjugate transpose. Decided from the
    /// term structure when possible, otherwise by comparing dense matrices
    /// (registers of at most [`HERMITICITY_CHECK_MAX_QUBITS`] qubits; larger
    /// ones are reported non-Hermitian).
    pub fn is_hermitian(&self) -> bool {
        if self.structurally_hermitian() {
            return true;
        }
        if self.num_qubits > HERMITICITY_CHECK_MAX_QUBITS {
            return false;
        }
        let dim = 1usize << self.num_qubits;
        let columns: Vec<StateVector> = (0..dim)
            .map(|k| {
                let basis = StateVector::basis(self.num_qubits, k).expect("index in range");
                self.apply(&basis).expect("sizes match")
            })
            .collect();
        let scale = columns
            .iter()
            .flat_map(|c| c.amplitudes().iter().map(|a| a.norm()))
            .fold(1.0, f64::max);
        (0..dim).all(|r| {
            (0..dim).all(|c| (columns[c].amplitudes()[r] - columns[r].amplitudes()[c].conj()).norm() <= 1e-12 * scale)
        })
    }

    /// Term-wise conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self {
            num_qubits: self.num_qubits,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff.conj(),
                    factors: t.factors.iter().map(|f| f.adjoint()).collect(),
                })
                .collect(),
        }
    }

    fn check_state(&self, state: &StateVector) -> Result<()> {
        if state.num_qubits() != self.num_qubits {
            return Err(Error::SizeMismatch {
                left: self.num_qubits,
                right: state.num_qubits(),
            });
        }
        Ok(())
    }

    /// `out ← A·src`, term by term, using one scratch state.
    pub fn apply_into(&self, src: &StateVector, out: &mut StateVector) -> Result<()> {
        self.check_state(src)?;
        self.check_state(out)?;
        out.fill_zero();
        let mut scratch = src.clone();
        for (k, term) in self.terms.iter().enumerate() {
            if k > 0 {
                scratch.copy_from(src)?;
            }
            for (q, f) in term.factors.iter().enumerate() {
                if *f != Factor::I {
                    scratch.apply_matrix(&f.matrix(), &[q], &[])?;
                }
            }
            out.add_scaled(term.coeff, &scratch)?;
        }
        Ok(())
    }

    /// Fresh unnormalised state `A·state`; `state` is left untouched.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        self.check_state(state)?;
        let mut out = StateVector::zeros(self.num_qubits)?;
        self.apply_into(state, &mut out)?;
        Ok(out)
    }

    /// `⟨ψ|A|ψ⟩`. Real for Hermitian operators up to rounding.
    pub fn expectation(&self, state: &StateVector) -> Result<C64> {
        state.inner(&self.apply(state)?)
    }
}

pub fn apply_observable(state: &StateVector, obs: &Observable) -> Result<StateVector> {
    obs.apply(state)
}

pub fn adjoint_observable(obs: &Observable) -> Observable {
    obs.adjoint()
}

pub fn expectation(state: &StateVector, obs: &Observable) -> Result<C64> {
    obs.expectation(state)
}
