//! Full-state quantum circuit simulation with a reverse-mode gradient engine.
//!
//! The gradient of `⟨E(θ)⟩ = ⟨in|U(θ)† A U(θ)|in⟩` over all `P` circuit
//! parameters is computed with `O(P)` gate applications and a constant
//! number of state vectors by sweeping the circuit backwards once
//! ([`reverse_mode_gradient`]). The quadratic-cost [`reference_gradient`]
//! and a central [`finite_difference_gradient`] are provided as oracles.
//!
//! ```
//! use revgrad::{reverse_mode_gradient, Circuit, Gate, Observable, StateVector};
//!
//! let circuit = Circuit::new(1, 1).with(Gate::ry(0, 0))?;
//! let report = reverse_mode_gradient(
//!     &circuit,
//!     &[std::f64::consts::FRAC_PI_2],
//!     &Observable::z_all(1)?,
//!     &StateVector::basis(1, 0)?,
//! )?;
//! // ⟨Z⟩ = cos θ, so the derivative at π/2 is -1.
//! assert!((report.values[0].re + 1.0).abs() < 1e-12);
//! # Ok::<(), revgrad::Error>(())
//! ```
//!
//! The guide in `book/` walks through each piece; its code listings are
//! compiled and run as doctests of this crate.

pub mod ansatz;
pub mod bench;
pub mod circuit;
mod error;
pub mod grad;
pub mod observable;
pub mod selftest;
pub mod statevec;

pub use ansatz::{build_ansatz, AnsatzSpec, Family};
pub use circuit::{
    apply_gate, apply_gate_adjoint, apply_gate_derivative, apply_gate_inverse, parse_circuit, write_circuit, Circuit,
    Gate, GateKind, ParamVector, ParametricMatrix,
};
pub use error::{Error, Result};
pub use grad::{
    finite_difference_gradient, non_hermitian_gradient, reference_gradient, reverse_mode_gradient,
    uniquify_parameters, GradientReport, MergeMap, OpCounters,
};
pub use observable::{adjoint_observable, apply_observable, expectation, Factor, Observable, Term};
pub use statevec::{clone_state, init_basis_state, inner_product, Pauli, SmallMatrix, StateVector, C64};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/state-vectors.md")]
    mod state_vectors {}
    #[doc = include_str!("../../../book/src/gate-derivatives.md")]
    mod gate_derivatives {}
    #[doc = include_str!("../../../book/src/observables.md")]
    mod observables {}
    #[doc = include_str!("../../../book/src/reverse-mode.md")]
    mod reverse_mode {}
    #[doc = include_str!("../../../book/src/extensions.md")]
    mod extensions {}
    #[doc = include_str!("../../../book/src/benchmarking.md")]
    mod benchmarking {}
    #[doc = include_str!("../../../book/src/file-formats.md")]
    mod file_formats {}
}
