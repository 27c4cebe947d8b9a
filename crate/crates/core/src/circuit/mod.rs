//! Parameterised circuits, parameter binding, and the per-gate actions the
//! gradient routines need: forward, adjoint, inverse and derivative.

mod text;

use std::fmt;
use std::ops::{Deref, DerefMut};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::statevec::{Pauli, SmallMatrix, StateVector, C64};

pub use text::{parse_circuit, write_circuit};

/// Default rotation coefficient, so that `Rx(θ) = exp(-iθX/2)`.
pub const DEFAULT_ALPHA: f64 = -0.5;

/// Step for the entry-wise central difference used when a parametric matrix
/// has no analytic derivative.
pub const MATRIX_FD_STEP: f64 = 1e-6;

pub type MatrixFn = Arc<dyn Fn(&[f64]) -> SmallMatrix + Send + Sync>;
pub type MatrixDerivativeFn = Arc<dyn Fn(&[f64], usize) -> SmallMatrix + Send + Sync>;

/// A matrix-valued function of `arity` gate-local parameters.
#[derive(Clone)]
pub struct ParametricMatrix {
    name: String,
    arity: usize,
    matrix: MatrixFn,
    derivative: Option<MatrixDerivativeFn>,
}

impl fmt::Debug for ParametricMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametricMatrix")
            .field("name", &self.name)
            .field("arity", &self.arity)
            .field("analytic_derivative", &self.derivative.is_some())
            .finish()
    }
}

impl ParametricMatrix {
    pub fn new(
        name: impl Into<String>,
        arity: usize,
        matrix: impl Fn(&[f64]) -> SmallMatrix + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            arity,
            matrix: Arc::new(matrix),
            derivative: None,
        }
    }

    /// Supplies `∂M/∂θ_k` analytically; otherwise entries are differenced.
    pub fn with_derivative(
        mut self,
        derivative: impl Fn(&[f64], usize) -> SmallMatrix + Send + Sync + 'static,
    ) -> Self {
        self.derivative = Some(Arc::new(derivative));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn eval(&self, params: &[f64]) -> SmallMatrix {
        (self.matrix)(params)
    }

    /// `∂M/∂θ_which`, analytic when available, else the central difference
    /// `(M(θ+δ) − M(θ−δ)) / 2δ` with `δ = MATRIX_FD_STEP`.
    pub fn derivative(&self, params: &[f64], which: usize) -> SmallMatrix {
        if let Some(d) = &self.derivative {
            return d(params, which);
        }
        let mut shifted = params.to_vec();
        shifted[which] = params[which] + MATRIX_FD_STEP;
        let plus = self.eval(&shifted);
        shifted[which] = params[which] - MATRIX_FD_STEP;
        let minus = self.eval(&shifted);
        plus.sub(&minus).scale(C64::new(0.5 / MATRIX_FD_STEP, 0.0))
    }
}

#[derive(Debug, Clone)]
pub enum GateKind {
    /// `exp(α·i·θ·⊗σ)`, one Pauli per target.
    PauliRotation { axes: Vec<Pauli>, alpha: f64 },
    /// `diag(1, e^{iθ})`.
    Phase,
    Fixed { name: String, matrix: SmallMatrix },
    /// Unitary matrix function of one or more parameters.
    Parametric(ParametricMatrix),
    /// Invertible but not necessarily unitary matrix function.
    NonUnitary(ParametricMatrix),
}

impl GateKind {
    /// Number of parameters the kind consumes.
    pub fn arity(&self) -> usize {
        match self {
            GateKind::PauliRotation { .. } | GateKind::Phase => 1,
            GateKind::Fixed { .. } => 0,
            GateKind::Parametric(m) | GateKind::NonUnitary(m) => m.arity(),
        }
    }

    pub fn is_unitary(&self) -> bool {
        !matches!(self, GateKind::NonUnitary(_))
    }
}

#[derive(Debug, Clone)]
pub struct Gate {
    kind: GateKind,
    targets: Vec<usize>,
    controls: Vec<usize>,
    params: Vec<usize>,
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn hadamard() -> SmallMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    SmallMatrix::from_rows2([[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]])
}

impl Gate {
    pub fn new(kind: GateKind, targets: Vec<usize>, controls: Vec<usize>, params: Vec<usize>) -> Result<Self> {
        if params.len() != kind.arity() {
            return Err(Error::GateArity {
                expected: kind.arity(),
                got: params.len(),
            });
        }
        let expected_targets = match &kind {
            GateKind::PauliRotation { axes, .. } => axes.len(),
            GateKind::Phase => 1,
            GateKind::Fixed { matrix, .. } => matrix.arity(),
            GateKind::Parametric(_) | GateKind::NonUnitary(_) => targets.len().clamp(1, 2),
        };
        if targets.is_empty() || targets.len() != expected_targets {
            return Err(Error::Domain(format!(
                "gate expects {expected_targets} target(s), got {}",
                targets.len()
            )));
        }
        let mut seen = Vec::with_capacity(targets.len() + controls.len());
        for &q in targets.iter().chain(&controls) {
            if seen.contains(&q) {
                return Err(Error::OverlappingQubits(q));
            }
            seen.push(q);
        }
        Ok(Self {
            kind,
            targets,
            controls,
            params,
        })
    }

    fn rotation(axes: Vec<Pauli>, targets: Vec<usize>, param: usize) -> Result<Self> {
        Self::new(
            GateKind::PauliRotation {
                axes,
                alpha: DEFAULT_ALPHA,
            },
            targets,
            vec![],
            vec![param],
        )
    }

    pub fn rx(target: usize, param: usize) -> Self {
        Self::rotation(vec![Pauli::X], vec![target], param).expect("valid rotation")
    }

    pub fn ry(target: usize, param: usize) -> Self {
        Self::rotation(vec![Pauli::Y], vec![target], param).expect("valid rotation")
    }

    pub fn rz(target: usize, param: usize) -> Self {
        Self::rotation(vec![Pauli::Z], vec![target], param).expect("valid rotation")
    }

    /// Rotation about a Pauli product, one axis per target.
    pub fn pauli_rotation(axes: &[(usize, Pauli)], param: usize) -> Result<Self> {
        let (targets, axes) = axes.iter().copied().unzip();
        Self::rotation(axes, targets, param)
    }

    pub fn phase(target: usize, param: usize) -> Self {
        Self::new(GateKind::Phase, vec![target], vec![], vec![param]).expect("valid phase gate")
    }

    pub fn fixed(name: impl Into<String>, matrix: SmallMatrix, targets: Vec<usize>) -> Result<Self> {
        Self::new(
            GateKind::Fixed {
                name: name.into(),
                matrix,
            },
            targets,
            vec![],
            vec![],
        )
    }

    pub fn h(target: usize) -> Self {
        Self::fixed("h", hadamard(), vec![target]).expect("valid fixed gate")
    }

    pub fn x(target: usize) -> Self {
        Self::fixed("x", Pauli::X.matrix(), vec![target]).expect("valid fixed gate")
    }

    pub fn y(target: usize) -> Self {
        Self::fixed("y", Pauli::Y.matrix(), vec![target]).expect("valid fixed gate")
    }

    pub fn z(target: usize) -> Self {
        Self::fixed("z", Pauli::Z.matrix(), vec![target]).expect("valid fixed gate")
    }

    pub fn cx(control: usize, target: usize) -> Result<Self> {
        Self::x(target).controlled_by(vec![control])
    }

    pub fn crx(control: usize, target: usize, param: usize) -> Result<Self> {
        Self::rx(target, param).controlled_by(vec![control])
    }

    pub fn cry(control: usize, target: usize, param: usize) -> Result<Self> {
        Self::ry(target, param).controlled_by(vec![control])
    }

    pub fn crz(control: usize, target: usize, param: usize) -> Result<Self> {
        Self::rz(target, param).controlled_by(vec![control])
    }

    pub fn parametric(matrix: ParametricMatrix, targets: Vec<usize>, params: Vec<usize>) -> Result<Self> {
        Self::new(GateKind::Parametric(matrix), targets, vec![], params)
    }

    pub fn non_unitary(matrix: ParametricMatrix, targets: Vec<usize>, params: Vec<usize>) -> Result<Self> {
        Self::new(GateKind::NonUnitary(matrix), targets, vec![], params)
    }

    pub fn controlled_by(self, controls: Vec<usize>) -> Result<Self> {
        Self::new(self.kind, self.targets, controls, self.params)
    }

    /// Overrides the rotation coefficient α of a Pauli rotation.
    pub fn with_alpha(mut self, new_alpha: f64) -> Result<Self> {
        match &mut self.kind {
            GateKind::PauliRotation { alpha, .. } => {
                *alpha = new_alpha;
                Ok(self)
            }
            _ => Err(Error::Domain("only Pauli rotations carry a coefficient".into())),
        }
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn controls(&self) -> &[usize] {
        &self.controls
    }

    /// Indices into the circuit's parameter table, in gate-local order.
    pub fn param_refs(&self) -> &[usize] {
        &self.params
    }

    pub fn is_unitary(&self) -> bool {
        self.kind.is_unitary()
    }

    pub(crate) fn with_param_refs(&self, params: Vec<usize>) -> Self {
        debug_assert_eq!(params.len(), self.params.len());
        Self {
            params,
            ..self.clone()
        }
    }

    fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.targets.iter().chain(&self.controls).copied()
    }

    fn local_params(&self, table: &[f64]) -> Result<Vec<f64>> {
        self.params
            .iter()
            .map(|&k| {
                table.get(k).copied().ok_or(Error::ParamRef {
                    index: k,
                    num_params: table.len(),
                })
            })
            .collect()
    }

    fn paulis(&self) -> Vec<(usize, Pauli)> {
        match &self.kind {
            GateKind::PauliRotation { axes, .. } => self.targets.iter().copied().zip(axes.iter().copied()).collect(),
            _ => Vec::new(),
        }
    }

    /// The target-space matrix of the gate at the given parameters (controls
    /// not included). Pauli rotations over more than two qubits have no small
    /// matrix form.
    pub fn bound_matrix(&self, table: &[f64]) -> Result<SmallMatrix> {
        let local = self.local_params(table)?;
        Ok(match &self.kind {
            GateKind::PauliRotation { axes, alpha } => {
                let product = match axes.as_slice() {
                    [p] => p.matrix(),
                    [p0, p1] => p1.matrix().kron(&p0.matrix())?,
                    _ => return Err(Error::UnsupportedArity(axes.len())),
                };
                let phi = alpha * local[0];
                let dim = product.dim();
                SmallMatrix::identity(dim)?
                    .scale(c(phi.cos(), 0.0))
                    .sub(&product.scale(c(0.0, -phi.sin())))
            }
            GateKind::Phase => SmallMatrix::diag2(c(1.0, 0.0), C64::from_polar(1.0, local[0])),
            GateKind::Fixed { matrix, .. } => *matrix,
            GateKind::Parametric(m) | GateKind::NonUnitary(m) => self.checked_eval(m, &local)?,
        })
    }

    fn checked_eval(&self, m: &ParametricMatrix, local: &[f64]) -> Result<SmallMatrix> {
        let mat = m.eval(local);
        if mat.arity() != self.targets.len() {
            return Err(Error::MatrixArity {
                dim: mat.dim(),
                targets: self.targets.len(),
            });
        }
        Ok(mat)
    }

    /// `state ← U(θ)·state`.
    pub fn apply(&self, state: &mut StateVector, table: &[f64]) -> Result<()> {
        match &self.kind {
            GateKind::PauliRotation { alpha, .. } => {
                let theta = self.local_params(table)?[0];
                state.apply_pauli_rotation(&self.paulis(), alpha * theta, &self.controls)
            }
            _ => state.apply_matrix(&self.bound_matrix(table)?, &self.targets, &self.controls),
        }
    }

    /// `state ← U(θ)†·state`, controls unchanged.
    pub fn apply_adjoint(&self, state: &mut StateVector, table: &[f64]) -> Result<()> {
        match &self.kind {
            GateKind::PauliRotation { alpha, .. } => {
                let theta = self.local_params(table)?[0];
                state.apply_pauli_rotation(&self.paulis(), -alpha * theta, &self.controls)
            }
            _ => state.apply_matrix(&self.bound_matrix(table)?.adjoint(), &self.targets, &self.controls),
        }
    }

    /// `state ← U(θ)⁻¹·state`. Identical to the adjoint for unitary kinds;
    /// non-unitary kinds are inverted numerically and fail with
    /// [`Error::Singular`] when the bound matrix is not invertible.
    pub fn apply_inverse(&self, state: &mut StateVector, table: &[f64]) -> Result<()> {
        match &self.kind {
            GateKind::NonUnitary(_) => {
                let inv = self.bound_matrix(table)?.inverse()?;
                state.apply_matrix(&inv, &self.targets, &self.controls)
            }
            _ => self.apply_adjoint(state, table),
        }
    }

    /// Applies `∂U/∂θ_which` up to a deferred scalar, which is returned. The
    /// caller multiplies any inner product taken against the mutated state
    /// by that scalar.
    pub fn apply_derivative(&self, state: &mut StateVector, table: &[f64], which: usize) -> Result<C64> {
        if which >= self.kind.arity() {
            return Err(Error::NoParameter(which));
        }
        for q in self.qubits() {
            if q >= state.num_qubits() {
                return Err(Error::QubitOutOfRange {
                    qubit: q,
                    num_qubits: state.num_qubits(),
                });
            }
        }
        let local = self.local_params(table)?;
        let scalar = match &self.kind {
            GateKind::PauliRotation { alpha, .. } => {
                // d/dθ exp(αiθP) = αi·P·exp(αiθP); P and the rotation commute.
                let paulis = self.paulis();
                for &(q, p) in &paulis {
                    state.apply_matrix(&p.matrix(), &[q], &[])?;
                }
                state.apply_pauli_rotation(&paulis, alpha * local[0], &[])?;
                c(0.0, *alpha)
            }
            GateKind::Phase => {
                state.project_to_one(&self.targets)?;
                c(0.0, 1.0) * C64::from_polar(1.0, local[0])
            }
            GateKind::Parametric(m) | GateKind::NonUnitary(m) => {
                self.checked_eval(m, &local)?;
                state.apply_matrix(&m.derivative(&local, which), &self.targets, &[])?;
                c(1.0, 0.0)
            }
            GateKind::Fixed { .. } => unreachable!("fixed gates have arity 0"),
        };
        state.project_to_one(&self.controls)?;
        Ok(scalar)
    }
}

/// Parameter table `θ`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParamVector(pub Vec<f64>);

impl ParamVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }
}

impl Deref for ParamVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for ParamVector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for ParamVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Ordered gate list applied left to right onto the ket, plus the size of
/// its parameter table. Parameters may be shared between gates.
#[derive(Debug, Clone)]
pub struct Circuit {
    num_qubits: usize,
    num_params: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize, num_params: usize) -> Self {
        Self {
            num_qubits,
            num_params,
            gates: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Total number of parameter references across all gates.
    pub fn num_param_refs(&self) -> usize {
        self.gates.iter().map(|g| g.param_refs().len()).sum()
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        for q in gate.qubits() {
            if q >= self.num_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: q,
                    num_qubits: self.num_qubits,
                });
            }
        }
        for &k in gate.param_refs() {
            if k >= self.num_params {
                return Err(Error::ParamRef {
                    index: k,
                    num_params: self.num_params,
                });
            }
        }
        self.gates.push(gate);
        Ok(self)
    }

    pub fn with(mut self, gate: Gate) -> Result<Self> {
        self.push(gate)?;
        Ok(self)
    }

    pub(crate) fn from_parts(num_qubits: usize, num_params: usize, gates: Vec<Gate>) -> Self {
        Self {
            num_qubits,
            num_params,
            gates,
        }
    }

    pub fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.num_params {
            return Err(Error::ParamCount {
                expected: self.num_params,
                got: params.len(),
            });
        }
        Ok(())
    }

    pub fn check_state(&self, state: &StateVector) -> Result<()> {
        if state.num_qubits() != self.num_qubits {
            return Err(Error::SizeMismatch {
                left: self.num_qubits,
                right: state.num_qubits(),
            });
        }
        Ok(())
    }

    /// Applies every gate in order.
    pub fn apply(&self, state: &mut StateVector, params: &[f64]) -> Result<()> {
        self.check_params(params)?;
        self.check_state(state)?;
        self.gates.iter().try_for_each(|g| g.apply(state, params))
    }

    /// Runs the circuit on a clone of `input`.
    pub fn run(&self, input: &StateVector, params: &[f64]) -> Result<StateVector> {
        let mut out = input.clone();
        self.apply(&mut out, params)?;
        Ok(out)
    }

    /// Inverse of gate `index`, with singular matrices reported against that
    /// index.
    pub fn apply_gate_inverse(&self, index: usize, state: &mut StateVector, params: &[f64]) -> Result<()> {
        self.gates[index]
            .apply_inverse(state, params)
            .map_err(|e| e.at_gate(index))
    }
}

/// `state ← U(θ)·state`.
pub fn apply_gate(state: &mut StateVector, gate: &Gate, params: &[f64]) -> Result<()> {
    gate.apply(state, params)
}

/// `state ← U(θ)†·state`.
pub fn apply_gate_adjoint(state: &mut StateVector, gate: &Gate, params: &[f64]) -> Result<()> {
    gate.apply_adjoint(state, params)
}

/// `state ← U(θ)⁻¹·state`.
pub fn apply_gate_inverse(state: &mut StateVector, gate: &Gate, params: &[f64]) -> Result<()> {
    gate.apply_inverse(state, params)
}

/// `state ← ∂U/∂θ·state` up to the returned deferred scalar.
pub fn apply_gate_derivative(state: &mut StateVector, gate: &Gate, params: &[f64], which: usize) -> Result<C64> {
    gate.apply_derivative(state, params, which)
}
