//! Built-in consistency checks, run by `revgrad selftest`.

use crate::ansatz::{build_ansatz, AnsatzSpec, Family};
use crate::bench::draw_params;
use crate::circuit::{Circuit, Gate};
use crate::error::Result;
use crate::grad::{
    finite_difference_gradient, non_hermitian_gradient, reference_gradient, reverse_mode_gradient_scaled,
    OpCounters, DEFAULT_FD_STEP,
};
use crate::observable::Observable;
use crate::statevec::{StateVector, C64};

pub const ORACLE_TRIANGLE: &str = "oracle-triangle";
pub const OP_COUNTS: &str = "op-counts";
pub const MEMORY: &str = "memory-contract";
pub const NON_HERMITIAN_REDUCTION: &str = "non-hermitian-reduction";

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct SelftestOptions {
    pub qubit_counts: Vec<usize>,
    pub draws: u64,
    /// Multiplies every deferred derivative scalar in reverse mode. Anything
    /// but 1 breaks the derivative convention on purpose.
    pub derivative_scalar: C64,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        Self {
            qubit_counts: vec![3, 4],
            draws: 2,
            derivative_scalar: C64::new(1.0, 0.0),
        }
    }
}

/// A Hermitian mix of Pauli and Hadamard strings.
fn test_observable(n: usize) -> Result<Observable> {
    let zx: String = (0..n).map(|q| if q % 2 == 0 { 'Z' } else { 'X' }).collect();
    let y_first = format!("Y{}", "I".repeat(n - 1));
    Observable::from_terms(
        n,
        [
            (C64::new(0.6, 0.0), "H".repeat(n).as_str()),
            (C64::new(-0.4, 0.0), zx.as_str()),
            (C64::new(0.25, 0.0), y_first.as_str()),
        ],
    )
}

fn chain_circuit(num_gates: usize) -> Circuit {
    let mut c = Circuit::new(2, num_gates);
    for k in 0..num_gates {
        let g = match k % 3 {
            0 => Gate::rx(0, k),
            1 => Gate::ry(1, k),
            _ => Gate::crz(0, 1, k).expect("distinct qubits"),
        };
        c.push(g).expect("valid gate");
    }
    c
}

fn oracle_triangle(opts: &SelftestOptions) -> Result<CheckOutcome> {
    let mut worst_ref = 0.0f64;
    let mut worst_fd = 0.0f64;
    for &n in &opts.qubit_counts {
        let obs = test_observable(n)?;
        let input = StateVector::basis(n, 0)?;
        for family in Family::ALL {
            for reps in 1..=2 {
                let circuit = build_ansatz(&AnsatzSpec::new(family, n, reps))?;
                for draw in 0..opts.draws {
                    let params = draw_params(draw, reps, circuit.num_params());
                    let rev = reverse_mode_gradient_scaled(&circuit, &params, &obs, &input, opts.derivative_scalar)?;
                    let refg = reference_gradient(&circuit, &params, &obs, &input)?;
                    let fd = finite_difference_gradient(&circuit, &params, &obs, &input, DEFAULT_FD_STEP)?;
                    worst_ref = worst_ref.max(rev.max_abs_diff(&refg));
                    worst_fd = worst_fd.max(rev.max_abs_diff(&fd));
                }
            }
        }
    }
    Ok(CheckOutcome {
        name: ORACLE_TRIANGLE,
        passed: worst_ref <= 1e-11 && worst_fd <= 1e-6,
        detail: format!("max |reverse - reference| = {worst_ref:.3e} (≤ 1e-11), max |reverse - fd| = {worst_fd:.3e} (≤ 1e-6)"),
    })
}

fn op_counts(opts: &SelftestOptions) -> Result<CheckOutcome> {
    let obs = Observable::z_all(2)?;
    let input = StateVector::basis(2, 0)?;
    let mut failures = Vec::new();
    for p in [10u64, 50] {
        let circuit = chain_circuit(p as usize);
        let params = draw_params(0, p as usize, p as usize);
        let rev = reverse_mode_gradient_scaled(&circuit, &params, &obs, &input, opts.derivative_scalar)?;
        let refg = reference_gradient(&circuit, &params, &obs, &input)?;
        let want_rev = OpCounters {
            gate_applies: 3 * p - 1,
            derivative_applies: p,
            clones: p + 2,
            inner_products: p,
            observable_applies: 1,
        };
        let want_ref = OpCounters {
            gate_applies: p * p,
            derivative_applies: p,
            clones: p + 1,
            inner_products: p,
            observable_applies: 1,
        };
        if rev.counters != want_rev {
            failures.push(format!("reverse P={p}: {:?}", rev.counters));
        }
        if refg.counters != want_ref {
            failures.push(format!("reference P={p}: {:?}", refg.counters));
        }
    }
    Ok(CheckOutcome {
        name: OP_COUNTS,
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            "reverse 3P-1 gates / P+2 clones, reference P^2 gates".into()
        } else {
            failures.join("; ")
        },
    })
}

fn memory(opts: &SelftestOptions) -> Result<CheckOutcome> {
    let obs = test_observable(2)?;
    let input = StateVector::basis(2, 0)?;
    let mut peaks = Vec::new();
    for p in [10usize, 200] {
        let circuit = chain_circuit(p);
        let params = draw_params(1, p, p);
        let rev = reverse_mode_gradient_scaled(&circuit, &params, &obs, &input, opts.derivative_scalar)?;
        peaks.push(rev.peak_live_states);
    }
    Ok(CheckOutcome {
        name: MEMORY,
        passed: peaks.iter().all(|&p| p == 4),
        detail: format!("peak live state vectors {peaks:?} (expected 4)"),
    })
}

fn non_hermitian_reduction(opts: &SelftestOptions) -> Result<CheckOutcome> {
    let mut worst = 0.0f64;
    for &n in &opts.qubit_counts {
        let obs = test_observable(n)?;
        let input = StateVector::basis(n, 0)?;
        let circuit = build_ansatz(&AnsatzSpec::new(Family::D, n, 2))?;
        let params = draw_params(3, 2, circuit.num_params());
        let rev = reverse_mode_gradient_scaled(&circuit, &params, &obs, &input, opts.derivative_scalar)?;
        let nh = non_hermitian_gradient(&circuit, &params, &obs, &input)?;
        worst = worst.max(rev.max_abs_diff(&nh));
    }
    Ok(CheckOutcome {
        name: NON_HERMITIAN_REDUCTION,
        passed: worst <= 1e-11,
        detail: format!("max |reverse - two-pass| = {worst:.3e} (≤ 1e-11)"),
    })
}

/// Runs every check. Errors from the library itself are propagated; failed
/// tolerances are reported in the outcomes.
pub fn run_selftest(opts: &SelftestOptions) -> Result<Vec<CheckOutcome>> {
    Ok(vec![
        oracle_triangle(opts)?,
        op_counts(opts)?,
        memory(opts)?,
        non_hermitian_reduction(opts)?,
    ])
}
