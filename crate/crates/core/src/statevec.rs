//! Dense state vectors and the primitive kernels every gradient routine is
//! built from: apply a small matrix, clone, take an inner product, project.
//!
//! Qubit ordering is little-endian: qubit 0 is the least significant bit of
//! the amplitude index. States carry no normalisation invariant.

use std::cell::Cell;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

thread_local! {
    static LIVE: Cell<usize> = const { Cell::new(0) };
    static PEAK: Cell<usize> = const { Cell::new(0) };
}

fn track_alloc() {
    LIVE.with(|live| {
        let now = live.get() + 1;
        live.set(now);
        PEAK.with(|peak| peak.set(peak.get().max(now)));
    });
}

/// Number of state vectors currently alive on this thread.
pub fn live_states() -> usize {
    LIVE.with(Cell::get)
}

/// Highest number of simultaneously live state vectors on this thread since
/// the last [`reset_peak_live_states`].
pub fn peak_live_states() -> usize {
    PEAK.with(Cell::get)
}

/// Resets the peak watermark to the current live count.
pub fn reset_peak_live_states() {
    let now = live_states();
    PEAK.with(|peak| peak.set(now));
}

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> SmallMatrix {
        let i = C64::i();
        match self {
            Pauli::X => SmallMatrix::from_rows2([[ZERO, ONE], [ONE, ZERO]]),
            Pauli::Y => SmallMatrix::from_rows2([[ZERO, -i], [i, ZERO]]),
            Pauli::Z => SmallMatrix::from_rows2([[ONE, ZERO], [ZERO, -ONE]]),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::X => 'x',
            Pauli::Y => 'y',
            Pauli::Z => 'z',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c.to_ascii_lowercase() {
            'x' => Some(Pauli::X),
            'y' => Some(Pauli::Y),
            'z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// A 2x2 or 4x4 complex matrix, stored row-major.
///
/// For a 4x4 matrix acting on targets `[a, b]`, the local basis index is
/// `bit(a) + 2 * bit(b)`, i.e. the first target is the least significant.
#[derive(Clone, Copy, PartialEq)]
pub struct SmallMatrix {
    dim: usize,
    data: [C64; 16],
}

impl fmt::Debug for SmallMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<C64>> = (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self[(r, c)]).collect())
            .collect();
        f.debug_struct("SmallMatrix").field("rows", &rows).finish()
    }
}

impl std::ops::Index<(usize, usize)> for SmallMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        assert!(r < self.dim && c < self.dim);
        &self.data[r * self.dim + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for SmallMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        assert!(r < self.dim && c < self.dim);
        &mut self.data[r * self.dim + c]
    }
}

impl SmallMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        match dim {
            2 | 4 => Ok(Self {
                dim,
                data: [ZERO; 16],
            }),
            _ => Err(Error::Domain(format!("matrix dimension {dim} is not 2 or 4"))),
        }
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for k in 0..dim {
            m[(k, k)] = ONE;
        }
        Ok(m)
    }

    pub fn from_rows2(rows: [[C64; 2]; 2]) -> Self {
        let mut data = [ZERO; 16];
        for (r, row) in rows.iter().enumerate() {
            data[r * 2..r * 2 + 2].copy_from_slice(row);
        }
        Self { dim: 2, data }
    }

    pub fn from_rows4(rows: [[C64; 4]; 4]) -> Self {
        let mut data = [ZERO; 16];
        for (r, row) in rows.iter().enumerate() {
            data[r * 4..r * 4 + 4].copy_from_slice(row);
        }
        Self { dim: 4, data }
    }

    /// Builds a matrix from a row-major slice of length 4 or 16.
    pub fn from_row_major(entries: &[C64]) -> Result<Self> {
        let dim = match entries.len() {
            4 => 2,
            16 => 4,
            n => return Err(Error::Domain(format!("{n} entries do not form a 2x2 or 4x4 matrix"))),
        };
        let mut data = [ZERO; 16];
        data[..entries.len()].copy_from_slice(entries);
        Ok(Self { dim, data })
    }

    pub fn diag2(a: C64, d: C64) -> Self {
        Self::from_rows2([[a, ZERO], [ZERO, d]])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of target qubits this matrix acts on.
    pub fn arity(&self) -> usize {
        if self.dim == 2 {
            1
        } else {
            2
        }
    }

    pub fn entries(&self) -> &[C64] {
        &self.data[..self.dim * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        let mut out = *self;
        for r in 0..self.dim {
            for c in 0..self.dim {
                out[(r, c)] = self[(c, r)].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = *self;
        out.data.iter_mut().for_each(|x| *x *= s);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = *self;
        for (x, y) in out.data.iter_mut().zip(other.data.iter()) {
            *x -= y;
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = *self;
        for r in 0..n {
            for c in 0..n {
                out[(r, c)] = (0..n).map(|k| self[(r, k)] * other[(k, c)]).sum();
            }
        }
        out
    }

    /// `self ⊗ other` for two 2x2 matrices. `other` acts on the less
    /// significant target, matching the local index convention above.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        if self.dim != 2 || other.dim != 2 {
            return Err(Error::Domain("kron is only defined for 2x2 factors".into()));
        }
        let mut out = Self::zeros(4)?;
        for r in 0..4 {
            for c in 0..4 {
                out[(r, c)] = self[(r >> 1, c >> 1)] * other[(r & 1, c & 1)];
            }
        }
        Ok(out)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries()
            .iter()
            .zip(other.entries())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Matrix inverse. 2x2 uses the closed form, 4x4 uses Gauss-Jordan
    /// elimination with partial pivoting. Pivots (or the 2x2 determinant)
    /// at or below `1e-14` in magnitude are treated as singular.
    pub fn inverse(&self) -> Result<Self> {
        const PIVOT_EPS: f64 = 1e-14;
        if self.dim == 2 {
            let (a, b, c, d) = (self[(0, 0)], self[(0, 1)], self[(1, 0)], self[(1, 1)]);
            let det = a * d - b * c;
            if det.norm() <= PIVOT_EPS {
                return Err(Error::Singular);
            }
            return Ok(Self::from_rows2([[d, -b], [-c, a]]).scale(det.inv()));
        }

        let n = self.dim;
        let mut a = *self;
        let mut inv = Self::identity(n)?;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[(x, col)].norm().total_cmp(&a[(y, col)].norm()))
                .expect("non-empty range");
            if a[(pivot, col)].norm() <= PIVOT_EPS {
                return Err(Error::Singular);
            }
            if pivot != col {
                for k in 0..n {
                    a.data.swap(pivot * n + k, col * n + k);
                    inv.data.swap(pivot * n + k, col * n + k);
                }
            }
            let p = a[(col, col)].inv();
            for k in 0..n {
                a[(col, k)] *= p;
                inv[(col, k)] *= p;
            }
            for row in 0..n {
                if row == col {
                    continue;
                }
                let f = a[(row, col)];
                if f == ZERO {
                    continue;
                }
                for k in 0..n {
                    let (ak, ik) = (a[(col, k)], inv[(col, k)]);
                    a[(row, k)] -= f * ak;
                    inv[(row, k)] -= f * ik;
                }
            }
        }
        Ok(inv)
    }
}

/// Dense vector of `2^N` complex amplitudes.
///
/// Every live instance is counted per thread (see [`live_states`]) so the
/// memory footprint of the gradient routines can be audited.
#[derive(PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<C64>,
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StateVector")
            .field("num_qubits", &self.num_qubits)
            .field("amplitudes", &self.amps)
            .finish()
    }
}

impl Clone for StateVector {
    fn clone(&self) -> Self {
        track_alloc();
        Self {
            num_qubits: self.num_qubits,
            amps: self.amps.clone(),
        }
    }
}

impl Drop for StateVector {
    fn drop(&mut self) {
        LIVE.with(|live| live.set(live.get() - 1));
    }
}

/// Scatters the bits of `i` around the zero bits at `sorted_positions`
/// (ascending).
#[inline]
fn insert_zero_bits(mut i: usize, sorted_positions: &[usize]) -> usize {
    for &p in sorted_positions {
        let low = i & ((1 << p) - 1);
        i = ((i >> p) << (p + 1)) | low;
    }
    i
}

impl StateVector {
    /// All-zero (unnormalised) state.
    pub fn zeros(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits >= usize::BITS as usize - 1 {
            return Err(Error::Domain(format!("cannot allocate a {num_qubits}-qubit register")));
        }
        track_alloc();
        Ok(Self {
            num_qubits,
            amps: vec![ZERO; 1 << num_qubits],
        })
    }

    /// Computational basis state `|basis_index⟩`.
    pub fn basis(num_qubits: usize, basis_index: usize) -> Result<Self> {
        let mut s = Self::zeros(num_qubits)?;
        if basis_index >= s.amps.len() {
            return Err(Error::BasisOutOfRange {
                index: basis_index,
                num_qubits,
            });
        }
        s.amps[basis_index] = ONE;
        Ok(s)
    }

    /// Wraps an amplitude vector whose length must be a power of two (≥ 2).
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Domain(format!("{len} amplitudes do not form a qubit register")));
        }
        track_alloc();
        Ok(Self {
            num_qubits: len.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(C64::norm_sqr).sum::<f64>().sqrt()
    }

    /// Overwrites this state's amplitudes with those of `src`, reusing the
    /// allocation.
    pub fn copy_from(&mut self, src: &StateVector) -> Result<()> {
        self.check_same_size(src)?;
        self.amps.copy_from_slice(&src.amps);
        Ok(())
    }

    pub fn fill_zero(&mut self) {
        self.amps.fill(ZERO);
    }

    pub fn scale(&mut self, s: C64) {
        self.amps.iter_mut().for_each(|a| *a *= s);
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: C64, other: &StateVector) -> Result<()> {
        self.check_same_size(other)?;
        for (a, b) in self.amps.iter_mut().zip(other.amps.iter()) {
            *a += s * b;
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        self.check_same_size(other)?;
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `⟨self|ket⟩ = Σ conj(self_k) ket_k`.
    pub fn inner(&self, ket: &StateVector) -> Result<C64> {
        self.check_same_size(ket)?;
        Ok(self
            .amps
            .iter()
            .zip(ket.amps.iter())
            .map(|(b, k)| b.conj() * k)
            .sum())
    }

    fn check_same_size(&self, other: &StateVector) -> Result<()> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::SizeMismatch {
                left: self.num_qubits,
                right: other.num_qubits,
            });
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: q,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    /// Validates a target/control layout and returns the control mask.
    fn qubit_masks(&self, targets: &[usize], controls: &[usize]) -> Result<usize> {
        let mut seen = 0usize;
        let mut control_mask = 0usize;
        for (k, &q) in targets.iter().chain(controls).enumerate() {
            self.check_qubit(q)?;
            if seen & (1 << q) != 0 {
                return Err(Error::OverlappingQubits(q));
            }
            seen |= 1 << q;
            if k >= targets.len() {
                control_mask |= 1 << q;
            }
        }
        Ok(control_mask)
    }

    /// Multiplies `m` onto `targets`, acting only on the subspace where every
    /// control qubit is 1.
    pub fn apply_matrix(&mut self, m: &SmallMatrix, targets: &[usize], controls: &[usize]) -> Result<()> {
        if m.arity() != targets.len() {
            return Err(Error::MatrixArity {
                dim: m.dim(),
                targets: targets.len(),
            });
        }
        let cmask = self.qubit_masks(targets, controls)?;
        match targets {
            [t] => self.apply_1q(m, *t, cmask),
            [a, b] => self.apply_2q(m, *a, *b, cmask),
            _ => return Err(Error::UnsupportedArity(targets.len())),
        }
        Ok(())
    }

    fn apply_1q(&mut self, m: &SmallMatrix, t: usize, cmask: usize) {
        let (m00, m01, m10, m11) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        let stride = 1usize << t;
        for i in 0..self.amps.len() / 2 {
            let i0 = insert_zero_bits(i, &[t]);
            if i0 & cmask != cmask {
                continue;
            }
            let i1 = i0 | stride;
            let (a0, a1) = (self.amps[i0], self.amps[i1]);
            self.amps[i0] = m00 * a0 + m01 * a1;
            self.amps[i1] = m10 * a0 + m11 * a1;
        }
    }

    fn apply_2q(&mut self, m: &SmallMatrix, a: usize, b: usize, cmask: usize) {
        let sorted = [a.min(b), a.max(b)];
        let offsets = [0, 1 << a, 1 << b, (1 << a) | (1 << b)];
        for i in 0..self.amps.len() / 4 {
            let base = insert_zero_bits(i, &sorted);
            if base & cmask != cmask {
                continue;
            }
            let old = offsets.map(|o| self.amps[base | o]);
            for (r, &o) in offsets.iter().enumerate() {
                self.amps[base | o] = (0..4).map(|c| m[(r, c)] * old[c]).sum();
            }
        }
    }

    /// Applies `exp(i·angle·⊗σ)` for a Pauli string over distinct qubits,
    /// restricted to the subspace where every control qubit is 1.
    pub fn apply_pauli_rotation(&mut self, paulis: &[(usize, Pauli)], angle: f64, controls: &[usize]) -> Result<()> {
        let targets: Vec<usize> = paulis.iter().map(|&(q, _)| q).collect();
        let cmask = self.qubit_masks(&targets, controls)?;
        let (flip, phase_mask, num_y) = pauli_masks(paulis);
        let (cos, sin) = (angle.cos(), angle.sin());
        let i_sin = C64::new(0.0, sin);
        let global = C64::i().powu(num_y as u32);
        let sign = |k: usize| if (k & phase_mask).count_ones() & 1 == 0 { 1.0 } else { -1.0 };

        if flip == 0 {
            // Diagonal string: each amplitude picks up cos ± i sin.
            for (k, a) in self.amps.iter_mut().enumerate() {
                if k & cmask == cmask {
                    *a *= cos + i_sin * global * sign(k);
                }
            }
            return Ok(());
        }

        let top = 1usize << (usize::BITS - 1 - flip.leading_zeros());
        for j in 0..self.amps.len() {
            if j & top != 0 || j & cmask != cmask {
                continue;
            }
            let jp = j ^ flip;
            let (aj, ajp) = (self.amps[j], self.amps[jp]);
            // (Pψ)[j] = c(j ⊕ flip) ψ[j ⊕ flip], c(k) = i^{#Y} (-1)^{|k & phase_mask|}
            self.amps[j] = aj * cos + i_sin * global * sign(jp) * ajp;
            self.amps[jp] = ajp * cos + i_sin * global * sign(j) * aj;
        }
        Ok(())
    }

    /// Zeroes every amplitude with a 0 bit on any of `qubits`.
    pub fn project_to_one(&mut self, qubits: &[usize]) -> Result<()> {
        let mut mask = 0usize;
        for &q in qubits {
            self.check_qubit(q)?;
            mask |= 1 << q;
        }
        if mask == 0 {
            return Ok(());
        }
        for (k, a) in self.amps.iter_mut().enumerate() {
            if k & mask != mask {
                *a = ZERO;
            }
        }
        Ok(())
    }
}

fn pauli_masks(paulis: &[(usize, Pauli)]) -> (usize, usize, usize) {
    let mut flip = 0;
    let mut phase = 0;
    let mut num_y = 0;
    for &(q, p) in paulis {
        match p {
            Pauli::X => flip |= 1 << q,
            Pauli::Y => {
                flip |= 1 << q;
                phase |= 1 << q;
                num_y += 1;
            }
            Pauli::Z => phase |= 1 << q,
        }
    }
    (flip, phase, num_y)
}

/// Free-function form of [`StateVector::basis`].
pub fn init_basis_state(num_qubits: usize, basis_index: usize) -> Result<StateVector> {
    StateVector::basis(num_qubits, basis_index)
}

/// Deep copy of `src`.
pub fn clone_state(src: &StateVector) -> StateVector {
    src.clone()
}

/// `⟨bra|ket⟩`.
pub fn inner_product(bra: &StateVector, ket: &StateVector) -> Result<C64> {
    bra.inner(ket)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn hadamard() -> SmallMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        SmallMatrix::from_rows2([[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]])
    }

    fn assert_amps(s: &StateVector, expected: &[C64]) {
        assert_eq!(s.len(), expected.len());
        for (k, (a, e)) in s.amplitudes().iter().zip(expected).enumerate() {
            assert!((a - e).norm() < TOL, "amplitude {k}: {a} != {e}");
        }
    }

    #[test]
    fn basis_states() {
        assert_amps(&StateVector::basis(1, 0).unwrap(), &[ONE, ZERO]);
        assert_amps(&StateVector::basis(2, 3).unwrap(), &[ZERO, ZERO, ZERO, ONE]);
        assert!(matches!(
            StateVector::basis(1, 2),
            Err(Error::BasisOutOfRange { index: 2, num_qubits: 1 })
        ));
    }

    #[test]
    fn clone_is_deep() {
        let src = StateVector::basis(1, 0).unwrap();
        let mut copy = clone_state(&src);
        copy.apply_matrix(&Pauli::X.matrix(), &[0], &[]).unwrap();
        assert_amps(&src, &[ONE, ZERO]);
        assert_amps(&copy, &[ZERO, ONE]);

        let odd = StateVector::from_amplitudes(vec![c(3.0, -1.0), c(0.25, 7.5)]).unwrap();
        assert_eq!(odd.clone().amplitudes(), odd.amplitudes());
        assert_eq!(odd.inner(&odd.clone()).unwrap(), odd.inner(&odd).unwrap());
    }

    #[test]
    fn single_qubit_kernels() {
        let mut s = StateVector::basis(1, 0).unwrap();
        s.apply_matrix(&Pauli::X.matrix(), &[0], &[]).unwrap();
        assert_amps(&s, &[ZERO, ONE]);

        let mut s = StateVector::basis(1, 0).unwrap();
        s.apply_matrix(&hadamard(), &[0], &[]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_amps(&s, &[c(h, 0.0), c(h, 0.0)]);
    }

    #[test]
    fn controlled_x_truth_table() {
        // |10⟩ in little-endian is index 2 (qubit 1 set).
        let mut s = StateVector::basis(2, 2).unwrap();
        s.apply_matrix(&Pauli::X.matrix(), &[0], &[1]).unwrap();
        assert_amps(&s, &[ZERO, ZERO, ZERO, ONE]);

        let mut s = StateVector::basis(2, 1).unwrap();
        s.apply_matrix(&Pauli::X.matrix(), &[0], &[1]).unwrap();
        assert_amps(&s, &[ZERO, ONE, ZERO, ZERO]);
    }

    #[test]
    fn zero_angle_rotation_is_identity() {
        let mut s = StateVector::from_amplitudes(vec![c(0.6, 0.1), c(-0.2, 0.7)]).unwrap();
        let before = s.clone();
        s.apply_pauli_rotation(&[(0, Pauli::X)], 0.0, &[]).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn two_qubit_matrix_uses_first_target_as_low_bit() {
        // X ⊗ I with targets [0, 1]: the factor on the left acts on qubit 1.
        let m = Pauli::X.matrix().kron(&SmallMatrix::identity(2).unwrap()).unwrap();
        let mut s = StateVector::basis(2, 0).unwrap();
        s.apply_matrix(&m, &[0, 1], &[]).unwrap();
        assert_amps(&s, &[ZERO, ZERO, ONE, ZERO]);
    }

    #[test]
    fn layout_errors() {
        let mut s = StateVector::basis(2, 0).unwrap();
        let x = Pauli::X.matrix();
        assert_eq!(s.apply_matrix(&x, &[0], &[0]), Err(Error::OverlappingQubits(0)));
        assert!(matches!(
            s.apply_matrix(&x, &[2], &[]),
            Err(Error::QubitOutOfRange { qubit: 2, .. })
        ));
        assert!(matches!(s.apply_matrix(&x, &[0, 1], &[]), Err(Error::MatrixArity { .. })));
        assert!(matches!(s.project_to_one(&[5]), Err(Error::QubitOutOfRange { .. })));
        let other = StateVector::basis(3, 0).unwrap();
        assert!(matches!(s.inner(&other), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn projection() {
        let (a, b) = (c(0.3, 0.1), c(-0.5, 0.2));
        let mut s = StateVector::from_amplitudes(vec![a, b]).unwrap();
        s.project_to_one(&[0]).unwrap();
        assert_amps(&s, &[ZERO, b]);

        let amps = vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 1.0)];
        let mut s = StateVector::from_amplitudes(amps.clone()).unwrap();
        s.project_to_one(&[0, 1]).unwrap();
        assert_amps(&s, &[ZERO, ZERO, ZERO, c(4.0, 1.0)]);

        let mut s = StateVector::from_amplitudes(amps.clone()).unwrap();
        s.project_to_one(&[]).unwrap();
        assert_amps(&s, &amps);
    }

    #[test]
    fn inner_products() {
        let zero = StateVector::basis(1, 0).unwrap();
        let one = StateVector::basis(1, 1).unwrap();
        assert_eq!(inner_product(&zero, &zero).unwrap(), ONE);
        assert_eq!(inner_product(&zero, &one).unwrap(), ZERO);

        // ⟨+|X|+⟩ = 1, worked by hand: X|+⟩ = |+⟩.
        let mut plus = StateVector::basis(1, 0).unwrap();
        plus.apply_matrix(&hadamard(), &[0], &[]).unwrap();
        let mut x_plus = plus.clone();
        x_plus.apply_matrix(&Pauli::X.matrix(), &[0], &[]).unwrap();
        assert!((plus.inner(&x_plus).unwrap() - ONE).norm() < TOL);
    }

    #[test]
    fn inverse_closed_form_and_elimination() {
        let m = SmallMatrix::from_rows2([[c(1.0, 1.0), c(2.0, 0.0)], [c(0.0, -1.0), c(3.0, 0.5)]]);
        let prod = m.matmul(&m.inverse().unwrap());
        assert!(prod.max_abs_diff(&SmallMatrix::identity(2).unwrap()) < TOL);

        let singular = SmallMatrix::from_rows2([[ONE, ONE], [ONE, ONE]]);
        assert_eq!(singular.inverse(), Err(Error::Singular));

        // Needs a row swap: leading entry is zero.
        let m4 = SmallMatrix::from_rows4([
            [ZERO, c(1.0, 0.0), c(0.0, 2.0), ONE],
            [c(2.0, 0.0), ZERO, ONE, ZERO],
            [ONE, c(0.5, 0.5), ZERO, c(3.0, 0.0)],
            [ZERO, ZERO, ONE, c(1.0, -1.0)],
        ]);
        let prod = m4.inverse().unwrap().matmul(&m4);
        assert!(prod.max_abs_diff(&SmallMatrix::identity(4).unwrap()) < 1e-12);

        let rank_deficient = Pauli::X.matrix().kron(&SmallMatrix::diag2(ONE, ZERO)).unwrap();
        assert_eq!(rank_deficient.inverse(), Err(Error::Singular));
    }

    #[test]
    fn live_state_accounting() {
        let base = live_states();
        reset_peak_live_states();
        {
            let a = StateVector::basis(2, 0).unwrap();
            let _b = a.clone();
            assert_eq!(live_states(), base + 2);
        }
        assert_eq!(live_states(), base);
        assert_eq!(peak_live_states(), base + 2);
    }
}
