//! The four benchmark circuit families.
//!
//! All parameters are unique and numbered in gate order. Parameter counts:
//!
//! | family | structure per repetition                          | parameters   |
//! |--------|---------------------------------------------------|--------------|
//! | A      | `Rx`, `Rz` on every qubit                         | `2N·r`       |
//! | B      | `Rx`, `Rz` on every qubit, then a CNOT chain      | `2N·r`       |
//! | C      | initial `Ry`,`Rz` layer; per rep CNOT chain + `Ry`,`Rz` | `2N·(r+1)` |
//! | D      | `Ry` on every qubit, then a ring of `CRx`         | `2N·r`       |
//!
//! Family D's ring is rotated by one qubit on every layer, and odd layers
//! swap control and target.

use std::fmt;
use std::str::FromStr;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A,
    B,
    C,
    D,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::A, Family::B, Family::C, Family::D];

    /// Closed-form parameter count for `num_qubits` qubits and `reps`
    /// repetitions.
    pub fn num_params(self, num_qubits: usize, reps: usize) -> usize {
        match self {
            Family::C => 2 * num_qubits * (reps + 1),
            _ => 2 * num_qubits * reps,
        }
    }

    /// Smallest repetition count whose parameter count reaches `target`.
    pub fn reps_for_params(self, num_qubits: usize, target: usize) -> usize {
        (1..)
            .find(|&r| self.num_params(num_qubits, r) >= target)
            .expect("parameter count grows without bound")
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Ok(Family::A),
            "B" => Ok(Family::B),
            "C" => Ok(Family::C),
            "D" => Ok(Family::D),
            _ => Err(Error::Domain(format!("unknown ansatz family `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnsatzSpec {
    pub family: Family,
    pub num_qubits: usize,
    pub reps: usize,
}

impl AnsatzSpec {
    pub fn new(family: Family, num_qubits: usize, reps: usize) -> Self {
        Self {
            family,
            num_qubits,
            reps,
        }
    }

    pub fn num_params(&self) -> usize {
        self.family.num_params(self.num_qubits, self.reps)
    }
}

struct Builder {
    circuit: Circuit,
    next_param: usize,
}

impl Builder {
    fn param(&mut self) -> usize {
        self.next_param += 1;
        self.next_param - 1
    }

    fn push(&mut self, gate: Gate) {
        self.circuit.push(gate).expect("generator emits valid gates");
    }

    fn rotations(&mut self, n: usize, first: fn(usize, usize) -> Gate, second: fn(usize, usize) -> Gate) {
        for q in 0..n {
            let p = self.param();
            self.push(first(q, p));
            let p = self.param();
            self.push(second(q, p));
        }
    }
}

/// Builds the circuit for `spec`. Needs at least two qubits and one
/// repetition.
pub fn build_ansatz(spec: &AnsatzSpec) -> Result<Circuit> {
    let AnsatzSpec {
        family,
        num_qubits: n,
        reps,
    } = *spec;
    if n < 2 {
        return Err(Error::Domain(format!("ansatz family {family} needs at least 2 qubits, got {n}")));
    }
    if reps < 1 {
        return Err(Error::Domain("ansatz needs at least one repetition".into()));
    }
    let mut b = Builder {
        circuit: Circuit::new(n, spec.num_params()),
        next_param: 0,
    };
    let cx = |c, t| Gate::cx(c, t).expect("distinct qubits");
    let crx = |c, t, p| Gate::crx(c, t, p).expect("distinct qubits");

    match family {
        Family::A => {
            for _ in 0..reps {
                b.rotations(n, Gate::rx, Gate::rz);
            }
        }
        Family::B => {
            for _ in 0..reps {
                b.rotations(n, Gate::rx, Gate::rz);
                for k in (0..n - 1).rev() {
                    b.push(cx(k + 1, k));
                }
            }
        }
        Family::C => {
            b.rotations(n, Gate::ry, Gate::rz);
            for _ in 0..reps {
                for k in 0..n - 1 {
                    b.push(cx(k, k + 1));
                }
                b.rotations(n, Gate::ry, Gate::rz);
            }
        }
        Family::D => {
            for layer in 0..reps {
                for q in 0..n {
                    let p = b.param();
                    b.push(Gate::ry(q, p));
                }
                for k in 0..n {
                    let a = (k + layer) % n;
                    let z = (k + 1 + layer) % n;
                    let (control, target) = if layer % 2 == 0 { (a, z) } else { (z, a) };
                    let p = b.param();
                    b.push(crx(control, target, p));
                }
            }
        }
    }
    debug_assert_eq!(b.next_param, spec.num_params());
    Ok(b.circuit)
}
