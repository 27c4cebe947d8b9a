//! Line-oriented circuit text format.
//!
//! ```text
//! # comment
//! qubits 2
//! params 3
//! rx q0 p0
//! cx q0 q1
//! rp xz q0 q1 p1
//! crz q1 q0 p2
//! phase q1 p0
//! ```

use std::fmt::Write as _;

use super::{Circuit, Gate, GateKind, DEFAULT_ALPHA};
use crate::error::{Error, Result};
use crate::statevec::Pauli;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn operand(tok: &str, prefix: char, line: usize) -> Result<usize> {
    tok.strip_prefix(prefix)
        .and_then(|rest| rest.parse().ok())
        .ok_or_else(|| parse_err(line, format!("expected `{prefix}<index>`, found `{tok}`")))
}

fn header(tok: &[&str], key: &str, line: usize) -> Result<usize> {
    match tok {
        [k, v] if *k == key => v
            .parse()
            .map_err(|_| parse_err(line, format!("invalid `{key}` value `{v}`"))),
        _ => Err(parse_err(line, format!("expected `{key} <n>`"))),
    }
}

fn expect_len(tok: &[&str], n: usize, line: usize) -> Result<()> {
    if tok.len() != n {
        return Err(parse_err(
            line,
            format!("`{}` takes {} operand(s), found {}", tok[0], n - 1, tok.len() - 1),
        ));
    }
    Ok(())
}

fn parse_gate(tok: &[&str], line: usize) -> Result<Gate> {
    let q = |i: usize| operand(tok[i], 'q', line);
    let p = |i: usize| operand(tok[i], 'p', line);
    let gate = match tok[0] {
        "rx" | "ry" | "rz" | "phase" => {
            expect_len(tok, 3, line)?;
            let (t, k) = (q(1)?, p(2)?);
            match tok[0] {
                "rx" => Gate::rx(t, k),
                "ry" => Gate::ry(t, k),
                "rz" => Gate::rz(t, k),
                _ => Gate::phase(t, k),
            }
        }
        "h" | "x" | "y" | "z" => {
            expect_len(tok, 2, line)?;
            let t = q(1)?;
            match tok[0] {
                "h" => Gate::h(t),
                "x" => Gate::x(t),
                "y" => Gate::y(t),
                _ => Gate::z(t),
            }
        }
        "cx" => {
            expect_len(tok, 3, line)?;
            Gate::cx(q(1)?, q(2)?).map_err(|e| parse_err(line, e.to_string()))?
        }
        "crx" | "cry" | "crz" => {
            expect_len(tok, 4, line)?;
            let (ctl, t, k) = (q(1)?, q(2)?, p(3)?);
            let g = match tok[0] {
                "crx" => Gate::crx(ctl, t, k),
                "cry" => Gate::cry(ctl, t, k),
                _ => Gate::crz(ctl, t, k),
            };
            g.map_err(|e| parse_err(line, e.to_string()))?
        }
        "rp" => {
            if tok.len() < 4 {
                return Err(parse_err(line, "`rp` takes an axis string, qubits and a parameter"));
            }
            let axes = tok[1]
                .chars()
                .map(|ch| {
                    Pauli::from_letter(ch)
                        .filter(|_| ch.is_ascii_lowercase())
                        .ok_or_else(|| parse_err(line, format!("invalid axis `{ch}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            let qubits = (2..tok.len() - 1).map(q).collect::<Result<Vec<_>>>()?;
            if qubits.len() != axes.len() {
                return Err(parse_err(
                    line,
                    format!("{} axes but {} qubits", axes.len(), qubits.len()),
                ));
            }
            let pairs: Vec<_> = qubits.into_iter().zip(axes).collect();
            Gate::pauli_rotation(&pairs, p(tok.len() - 1)?).map_err(|e| parse_err(line, e.to_string()))?
        }
        other => return Err(parse_err(line, format!("unknown gate `{other}`"))),
    };
    Ok(gate)
}

/// Parses the circuit text format. Errors carry 1-based line numbers.
pub fn parse_circuit(src: &str) -> Result<Circuit> {
    let mut lines = src
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (line, first) = lines.next().ok_or_else(|| parse_err(1, "missing `qubits <n>` header"))?;
    let num_qubits = header(&first.split_whitespace().collect::<Vec<_>>(), "qubits", line)?;
    if num_qubits == 0 {
        return Err(parse_err(line, "a circuit needs at least one qubit"));
    }
    let (line, second) = lines
        .next()
        .ok_or_else(|| parse_err(line + 1, "missing `params <n>` header"))?;
    let num_params = header(&second.split_whitespace().collect::<Vec<_>>(), "params", line)?;

    let mut circuit = Circuit::new(num_qubits, num_params);
    for (line, text) in lines {
        let tok: Vec<&str> = text.split_whitespace().collect();
        let gate = parse_gate(&tok, line)?;
        circuit.push(gate).map_err(|e| parse_err(line, e.to_string()))?;
    }
    Ok(circuit)
}

fn write_gate(out: &mut String, gate: &Gate) -> Result<()> {
    let unsupported = || Error::Unserializable(format!("{gate:?}"));
    let qs = |qs: &[usize]| qs.iter().map(|q| format!("q{q}")).collect::<Vec<_>>().join(" ");
    match (gate.kind(), gate.controls(), gate.param_refs()) {
        (GateKind::PauliRotation { axes, alpha }, controls, &[k]) if *alpha == DEFAULT_ALPHA => {
            let axis_str: String = axes.iter().map(|a| a.letter()).collect();
            match (axes.len(), controls) {
                (1, []) => writeln!(out, "r{axis_str} {} p{k}", qs(gate.targets())),
                (1, [ctl]) => writeln!(out, "cr{axis_str} q{ctl} {} p{k}", qs(gate.targets())),
                (_, []) => writeln!(out, "rp {axis_str} {} p{k}", qs(gate.targets())),
                _ => return Err(unsupported()),
            }
        }
        (GateKind::Phase, [], &[k]) => writeln!(out, "phase {} p{k}", qs(gate.targets())),
        (GateKind::Fixed { name, .. }, controls, []) => match (name.as_str(), controls) {
            ("h" | "x" | "y" | "z", []) => writeln!(out, "{name} {}", qs(gate.targets())),
            ("x", [ctl]) => writeln!(out, "cx q{ctl} {}", qs(gate.targets())),
            _ => return Err(unsupported()),
        },
        _ => return Err(unsupported()),
    }
    .expect("writing to a String cannot fail");
    Ok(())
}

/// Serialises a circuit. Gates outside the text vocabulary (custom or
/// non-unitary matrices, non-default rotation coefficients, extra controls)
/// are rejected.
pub fn write_circuit(circuit: &Circuit) -> Result<String> {
    let mut out = format!("qubits {}\nparams {}\n", circuit.num_qubits(), circuit.num_params());
    for gate in circuit.gates() {
        write_gate(&mut out, gate)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::ParametricMatrix;
    use crate::statevec::{SmallMatrix, StateVector};

    const SAMPLE: &str = "\
# every gate the format knows
qubits 3
params 4

rx q0 p0
ry q1 p1
rz q2 p2
rp xyz q0 q1 q2 p3
phase q1 p0
h q0
x q1
y q2
z q0
cx q0 q1
crx q2 q0 p1
cry q0 q2 p2
crz q1 q2 p0
";

    #[test]
    fn parses_and_round_trips() {
        let circuit = parse_circuit(SAMPLE).unwrap();
        assert_eq!(circuit.num_qubits(), 3);
        assert_eq!(circuit.num_params(), 4);
        assert_eq!(circuit.len(), 13);
        let text = write_circuit(&circuit).unwrap();
        let again = parse_circuit(&text).unwrap();
        assert_eq!(write_circuit(&again).unwrap(), text);

        let params = [0.3, -1.2, 2.0, 0.7];
        let a = circuit.run(&StateVector::basis(3, 5).unwrap(), &params).unwrap();
        let b = again.run(&StateVector::basis(3, 5).unwrap(), &params).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn repeated_parameters_are_allowed() {
        let c = parse_circuit("qubits 1\nparams 1\nrx q0 p0\nrz q0 p0\n").unwrap();
        assert_eq!(c.num_param_refs(), 2);
    }

    fn line_of(src: &str) -> usize {
        match parse_circuit(src) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn errors_cite_line_numbers() {
        assert_eq!(line_of("qubits 2\nparams 1\nrx q0 p0\nfoo q1\n"), 4);
        assert_eq!(line_of("# c\nqubits 2\nparams 1\n\nrx q0\n"), 5);
        assert_eq!(line_of("qubits 2\nparams 1\nrx q5 p0\n"), 3);
        assert_eq!(line_of("qubits 2\nparams 1\nrx q0 p1\n"), 3);
        assert_eq!(line_of("qubits 2\nparams 1\ncx q0 q0\n"), 3);
        assert_eq!(line_of("qubits 2\nparams 1\nrp xw q0 q1 p0\n"), 3);
        assert_eq!(line_of("qubits 2\nparams 1\nrp xy q0 p0\n"), 3);
        assert_eq!(line_of("params 1\nqubits 2\n"), 1);
        assert_eq!(line_of("qubits 2\n"), 2);
        assert_eq!(line_of("qubits x\n"), 1);
    }

    #[test]
    fn rejects_gates_outside_the_vocabulary() {
        let m = ParametricMatrix::new("m", 1, |_| SmallMatrix::identity(2).unwrap());
        let c = Circuit::new(1, 1)
            .with(Gate::parametric(m, vec![0], vec![0]).unwrap())
            .unwrap();
        assert!(matches!(write_circuit(&c), Err(Error::Unserializable(_))));

        let c = Circuit::new(1, 1).with(Gate::rx(0, 0).with_alpha(1.0).unwrap()).unwrap();
        assert!(matches!(write_circuit(&c), Err(Error::Unserializable(_))));
    }
}
