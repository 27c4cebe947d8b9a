//! Gradient routines for `⟨E(θ)⟩ = ⟨in|U(θ)† A U(θ)|in⟩`.
//!
//! * [`reverse_mode_gradient`] sweeps the circuit backwards once, keeping
//!   four state vectors alive and applying `3P − 1` gates for `P` gates.
//! * [`reference_gradient`] rebuilds every derivative term from the input
//!   state, applying `P²` gates.
//! * [`non_hermitian_gradient`] runs the backward sweep twice to obtain the
//!   complex gradient of a non-Hermitian operator.
//! * [`finite_difference_gradient`] is the central-difference oracle.
//!
//! Gates sharing a parameter have their contributions summed into that
//! parameter's entry, and multi-parameter gates contribute one term per local
//! parameter. [`uniquify_parameters`] exposes the explicit relabelling for
//! callers who want to check that equivalence.

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::observable::Observable;
use crate::statevec::{live_states, peak_live_states, reset_peak_live_states, StateVector, C64};

/// Default central-difference step for [`finite_difference_gradient`].
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Tally of primitive operations performed by one gradient call.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounters {
    pub gate_applies: u64,
    pub derivative_applies: u64,
    pub clones: u64,
    pub inner_products: u64,
    pub observable_applies: u64,
}

impl std::ops::Add for OpCounters {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            gate_applies: self.gate_applies + o.gate_applies,
            derivative_applies: self.derivative_applies + o.derivative_applies,
            clones: self.clones + o.clones,
            inner_products: self.inner_products + o.inner_products,
            observable_applies: self.observable_applies + o.observable_applies,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientReport {
    /// One entry per parameter of the circuit's table. For Hermitian
    /// operators the imaginary parts are zero.
    pub values: Vec<C64>,
    /// `⟨ψ|A|ψ⟩` at the evaluation point.
    pub energy: C64,
    pub counters: OpCounters,
    /// Most state vectors simultaneously alive during the call, counting the
    /// caller's input state.
    pub peak_live_states: usize,
}

impl GradientReport {
    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// Largest element-wise `|a − b|` between two reports' gradients.
    pub fn max_abs_diff(&self, other: &GradientReport) -> f64 {
        assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// How a raw inner product becomes a gradient contribution.
#[derive(Clone, Copy)]
enum Combine {
    /// `2·Re(s·⟨λ|μ⟩)`
    TwiceReal,
    /// `s·⟨λ|μ⟩`
    Raw,
}

impl Combine {
    fn apply(self, z: C64) -> C64 {
        match self {
            Combine::TwiceReal => C64::new(2.0 * z.re, 0.0),
            Combine::Raw => z,
        }
    }
}

/// Executes primitives and tallies them, one method per algorithm step.
struct Ops<'a> {
    circuit: &'a Circuit,
    params: &'a [f64],
    counters: OpCounters,
}

impl<'a> Ops<'a> {
    fn new(circuit: &'a Circuit, params: &'a [f64]) -> Self {
        Self {
            circuit,
            params,
            counters: OpCounters::default(),
        }
    }

    fn clone_state(&mut self, s: &StateVector) -> StateVector {
        self.counters.clones += 1;
        s.clone()
    }

    fn gate(&self, i: usize) -> &'a Gate {
        &self.circuit.gates()[i]
    }

    fn apply(&mut self, i: usize, s: &mut StateVector) -> Result<()> {
        self.counters.gate_applies += 1;
        self.gate(i).apply(s, self.params)
    }

    fn apply_range(&mut self, range: std::ops::Range<usize>, s: &mut StateVector) -> Result<()> {
        range.into_iter().try_for_each(|i| self.apply(i, s))
    }

    fn adjoint(&mut self, i: usize, s: &mut StateVector) -> Result<()> {
        self.counters.gate_applies += 1;
        self.gate(i).apply_adjoint(s, self.params)
    }

    /// Removes gate `i` from a forward state: the adjoint for unitary gates,
    /// the true inverse otherwise.
    fn undo(&mut self, i: usize, s: &mut StateVector) -> Result<()> {
        if self.gate(i).is_unitary() {
            self.adjoint(i, s)
        } else {
            self.counters.gate_applies += 1;
            self.circuit.apply_gate_inverse(i, s, self.params)
        }
    }

    fn derivative(&mut self, i: usize, local: usize, s: &mut StateVector) -> Result<C64> {
        self.counters.derivative_applies += 1;
        self.gate(i).apply_derivative(s, self.params, local)
    }

    fn inner(&mut self, bra: &StateVector, ket: &StateVector) -> Result<C64> {
        self.counters.inner_products += 1;
        bra.inner(ket)
    }

    fn observable_into(&mut self, obs: &Observable, src: &StateVector, out: &mut StateVector) -> Result<()> {
        self.counters.observable_applies += 1;
        obs.apply_into(src, out)
    }
}

fn check_inputs(circuit: &Circuit, params: &[f64], obs: &Observable, input: &StateVector) -> Result<()> {
    circuit.check_params(params)?;
    circuit.check_state(input)?;
    if obs.num_qubits() != circuit.num_qubits() {
        return Err(Error::SizeMismatch {
            left: circuit.num_qubits(),
            right: obs.num_qubits(),
        });
    }
    Ok(())
}

/// Tracks the live-state watermark for one call.
struct PeakProbe {
    baseline: usize,
}

impl PeakProbe {
    fn start() -> Self {
        reset_peak_live_states();
        // The caller's input is already alive and counts towards the total.
        Self {
            baseline: live_states().saturating_sub(1),
        }
    }

    fn finish(self) -> usize {
        peak_live_states() - self.baseline
    }
}

struct Sweep {
    values: Vec<C64>,
    energy: C64,
    counters: OpCounters,
}

/// One backward pass with `|λ⟩ = B·U|in⟩`. Each contribution is
/// `combine(s·⟨λ|μ⟩)` where `s` is the gate's deferred scalar, scaled by
/// `scalar_factor`. The returned energy is `⟨ψ|B|ψ⟩`.
fn backward_sweep(
    circuit: &Circuit,
    params: &[f64],
    lambda_op: &Observable,
    input: &StateVector,
    combine: Combine,
    scalar_factor: C64,
) -> Result<Sweep> {
    let mut ops = Ops::new(circuit, params);
    let num_gates = circuit.len();

    let mut lambda = ops.clone_state(input);
    ops.apply_range(0..num_gates, &mut lambda)?;
    let mut phi = ops.clone_state(&lambda);
    // λ's buffer is reused for B|ψ⟩, with |φ⟩ = |ψ⟩ as the source.
    ops.observable_into(lambda_op, &phi, &mut lambda)?;
    let energy = phi.inner(&lambda)?;

    let mut values = vec![C64::new(0.0, 0.0); circuit.num_params()];
    for i in (0..num_gates).rev() {
        ops.undo(i, &mut phi)?;
        for (local, &global) in circuit.gates()[i].param_refs().iter().enumerate() {
            let mut mu = ops.clone_state(&phi);
            let scalar = ops.derivative(i, local, &mut mu)?;
            let overlap = ops.inner(&lambda, &mu)?;
            values[global] += combine.apply(scalar * scalar_factor * overlap);
        }
        if i > 0 {
            ops.adjoint(i, &mut lambda)?;
        }
    }

    Ok(Sweep {
        values,
        energy,
        counters: ops.counters,
    })
}

/// Reverse-mode gradient of a Hermitian observable.
///
/// Cost is `3P − 1` gate applications for `P` gates, one clone, derivative
/// application and inner product per parameter reference, plus two clones and
/// a single observable application. At most four state vectors (including
/// `input`) are alive at any time.
pub fn reverse_mode_gradient(
    circuit: &Circuit,
    params: &[f64],
    obs: &Observable,
    input: &StateVector,
) -> Result<GradientReport> {
    reverse_mode_gradient_scaled(circuit, params, obs, input, C64::new(1.0, 0.0))
}

/// [`reverse_mode_gradient`] with every deferred scalar multiplied by
/// `scalar_factor`. Only useful for checking that the oracles notice a
/// broken derivative convention.
#[doc(hidden)]
pub fn reverse_mode_gradient_scaled(
    circuit: &Circuit,
    params: &[f64],
    obs: &Observable,
    input: &StateVector,
    scalar_factor: C64,
) -> Result<GradientReport> {
    check_inputs(circuit, params, obs, input)?;
    if !obs.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    let probe = PeakProbe::start();
    let sweep = backward_sweep(circuit, params, obs, input, Combine::TwiceReal, scalar_factor)?;
    Ok(GradientReport {
        values: sweep.values,
        energy: sweep.energy,
        counters: sweep.counters,
        peak_live_states: probe.finish(),
    })
}

/// Gradient of `⟨ψ|A|ψ⟩` for an arbitrary (possibly non-Hermitian) `A`.
///
/// `∂⟨E⟩ = ⟨ψ|A|∂ψ⟩ + conj(⟨ψ|A†|∂ψ⟩)`. Each term is one backward sweep with
/// the raw inner product kept: the first with `|λ⟩ = A†|ψ⟩`, the second with
/// `|λ⟩ = A|ψ⟩`.
pub fn non_hermitian_gradient(
    circuit: &Circuit,
    params: &[f64],
    obs: &Observable,
    input: &StateVector,
) -> Result<GradientReport> {
    check_inputs(circuit, params, obs, input)?;
    let probe = PeakProbe::start();
    let one = C64::new(1.0, 0.0);
    let forward = backward_sweep(circuit, params, &obs.adjoint(), input, Combine::Raw, one)?;
    let conjugate = backward_sweep(circuit, params, obs, input, Combine::Raw, one)?;
    let values = forward
        .values
        .iter()
        .zip(&conjugate.values)
        .map(|(a, b)| a + b.conj())
        .collect();
    Ok(GradientReport {
        values,
        energy: conjugate.energy,
        counters: forward.counters + conjugate.counters,
        peak_live_states: probe.finish(),
    })
}

/// The quadratic-cost gradient: every derivative term is rebuilt from
/// `input` by applying the whole circuit with one gate differentiated.
pub fn reference_gradient(
    circuit: &Circuit,
    params: &[f64],
    obs: &Observable,
    input: &StateVector,
) -> Result<GradientReport> {
    check_inputs(circuit, params, obs, input)?;
    if !obs.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    let probe = PeakProbe::start();
    let mut ops = Ops::new(circuit, params);
    let num_gates = circuit.len();

    let (lambda, energy) = {
        let mut psi = ops.clone_state(input);
        ops.apply_range(0..num_gates, &mut psi)?;
        let mut lambda = StateVector::zeros(circuit.num_qubits())?;
        ops.observable_into(obs, &psi, &mut lambda)?;
        let energy = psi.inner(&lambda)?;
        (lambda, energy)
    };

    let mut values = vec![C64::new(0.0, 0.0); circuit.num_params()];
    for i in 0..num_gates {
        for (local, &global) in circuit.gates()[i].param_refs().iter().enumerate() {
            let mut mu = ops.clone_state(input);
            ops.apply_range(0..i, &mut mu)?;
            let scalar = ops.derivative(i, local, &mut mu)?;
            ops.apply_range(i + 1..num_gates, &mut mu)?;
            let overlap = ops.inner(&lambda, &mu)?;
            values[global] += Combine::TwiceReal.apply(scalar * overlap);
        }
    }

    Ok(GradientReport {
        values,
        energy,
        counters: ops.counters,
        peak_live_states: probe.finish(),
    })
}

/// Central difference `(⟨E(θ_k + δ)⟩ − ⟨E(θ_k − δ)⟩) / 2δ` for every
/// parameter, using the complex expectation value.
pub fn finite_difference_gradient(
    circuit: &Circuit,
    params: &[f64],
    obs: &Observable,
    input: &StateVector,
    delta: f64,
) -> Result<GradientReport> {
    check_inputs(circuit, params, obs, input)?;
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::Domain(format!("finite-difference step must be positive, got {delta}")));
    }
    let probe = PeakProbe::start();
    let mut counters = OpCounters::default();
    let mut energy_at = |theta: &[f64]| -> Result<C64> {
        counters.clones += 1;
        counters.gate_applies += circuit.len() as u64;
        counters.observable_applies += 1;
        counters.inner_products += 1;
        obs.expectation(&circuit.run(input, theta)?)
    };

    let energy = energy_at(params)?;
    let mut shifted = params.to_vec();
    let mut values = Vec::with_capacity(params.len());
    for k in 0..params.len() {
        shifted[k] = params[k] + delta;
        let plus = energy_at(&shifted)?;
        shifted[k] = params[k] - delta;
        let minus = energy_at(&shifted)?;
        shifted[k] = params[k];
        values.push((plus - minus) / (2.0 * delta));
    }

    Ok(GradientReport {
        values,
        energy,
        counters,
        peak_live_states: probe.finish(),
    })
}

/// Map from a uniquified circuit's parameter indices back to the original.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeMap {
    /// `origin[new] = original`.
    pub origin: Vec<usize>,
    pub original_num_params: usize,
}

impl MergeMap {
    /// Parameter table for the uniquified circuit.
    pub fn expand_params(&self, params: &[f64]) -> Vec<f64> {
        self.origin.iter().map(|&k| params[k]).collect()
    }

    /// Sums gradient entries that share an original parameter.
    pub fn merge(&self, values: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.original_num_params];
        for (new, &orig) in self.origin.iter().enumerate() {
            out[orig] += values[new];
        }
        out
    }
}

/// Gives every parameter reference its own index, numbered in order of gate
/// appearance.
pub fn uniquify_parameters(circuit: &Circuit) -> (Circuit, MergeMap) {
    let mut origin = Vec::with_capacity(circuit.num_param_refs());
    let gates = circuit
        .gates()
        .iter()
        .map(|g| {
            let fresh = g
                .param_refs()
                .iter()
                .map(|&k| {
                    origin.push(k);
                    origin.len() - 1
                })
                .collect();
            g.with_param_refs(fresh)
        })
        .collect();
    let unique = Circuit::from_parts(circuit.num_qubits(), origin.len(), gates);
    (
        unique,
        MergeMap {
            origin,
            original_num_params: circuit.num_params(),
        },
    )
}
