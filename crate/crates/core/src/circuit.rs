//! Dense density-matrix simulator for small noisy circuits.
//!
//! A register of `n` qubits stores `ρ` row-major as a vector of `4^n`
//! amplitudes. That vector is treated as a `2n`-wire state: virtual wire `w`
//! is the row index of qubit `w`, virtual wire `n + w` its column index. Gates
//! act as `U` on row wires and `conj(U)` on column wires, and a single-qubit
//! channel acts as `Σ K ⊗ conj(K)` on the pair `(w, n + w)`. Every operation
//! touches at most a handful of wires, so no full-register matrix is built.
//!
//! Wire 0 is the most significant bit of a basis index.

use std::collections::BTreeMap;

use crate::channel::{ChoiState, DensityMatrix, KrausChannel, Pauli};
use crate::error::{Error, Result};
use crate::linalg::{self, hermiticity_error, tol, CMatrix, C64, ONE, ZERO};

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 11;

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cnot {
        control: usize,
        target: usize,
    },
    Cz {
        control: usize,
        target: usize,
    },
    Toffoli {
        controls: [usize; 2],
        target: usize,
    },
    /// Pauli on `target` conditioned on all `controls` being `|1⟩`.
    MultiControlled {
        pauli: Pauli,
        controls: Vec<usize>,
        target: usize,
    },
    /// One control driving a product of Paulis on several targets.
    ControlledPaulis {
        control: usize,
        targets: Vec<(Pauli, usize)>,
    },
    /// Arbitrary unitary on `wires`; the first wire is the most significant.
    Unitary {
        wires: Vec<usize>,
        matrix: CMatrix,
    },
}

impl Gate {
    /// Validated block unitary.
    pub fn unitary(wires: Vec<usize>, matrix: CMatrix) -> Result<Gate> {
        let dim = 1usize << wires.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.nrows(),
            });
        }
        let err = linalg::unitarity_error(&matrix);
        if err > tol::ALGEBRAIC {
            return Err(Error::NotUnitary(err));
        }
        Ok(Gate::Unitary { wires, matrix })
    }

    pub fn wires(&self) -> Vec<usize> {
        match self {
            Gate::H(w) | Gate::X(w) | Gate::Y(w) | Gate::Z(w) => vec![*w],
            Gate::Cnot { control, target } | Gate::Cz { control, target } => {
                vec![*control, *target]
            }
            Gate::Toffoli { controls, target } => vec![controls[0], controls[1], *target],
            Gate::MultiControlled {
                controls, target, ..
            } => controls.iter().copied().chain([*target]).collect(),
            Gate::ControlledPaulis { control, targets } => [*control]
                .into_iter()
                .chain(targets.iter().map(|t| t.1))
                .collect(),
            Gate::Unitary { wires, .. } => wires.clone(),
        }
    }

    /// Matrix on [`Gate::wires`] in that order.
    pub fn matrix(&self) -> CMatrix {
        match self {
            Gate::H(_) => {
                let s = linalg::real(std::f64::consts::FRAC_1_SQRT_2);
                linalg::cmatrix(2, &[s, s, s, -s])
            }
            Gate::X(_) => Pauli::X.matrix(),
            Gate::Y(_) => Pauli::Y.matrix(),
            Gate::Z(_) => Pauli::Z.matrix(),
            Gate::Cnot { .. } => controlled(1, &Pauli::X.matrix()),
            Gate::Cz { .. } => controlled(1, &Pauli::Z.matrix()),
            Gate::Toffoli { .. } => controlled(2, &Pauli::X.matrix()),
            Gate::MultiControlled {
                pauli, controls, ..
            } => controlled(controls.len(), &pauli.matrix()),
            Gate::ControlledPaulis { targets, .. } => {
                let op = targets.iter().fold(linalg::identity(1), |acc, (p, _)| {
                    linalg::kron(&acc, &p.matrix())
                });
                controlled(1, &op)
            }
            Gate::Unitary { matrix, .. } => matrix.clone(),
        }
    }

    pub fn inverse(&self) -> Gate {
        match self {
            Gate::Unitary { wires, matrix } => Gate::Unitary {
                wires: wires.clone(),
                matrix: matrix.adjoint(),
            },
            // Every other variant is Hermitian and unitary.
            other => other.clone(),
        }
    }

    pub fn validate(&self, wire_count: usize) -> Result<()> {
        let wires = self.wires();
        for (i, &w) in wires.iter().enumerate() {
            if w >= wire_count {
                return Err(Error::WireOutOfRange {
                    wire: w,
                    wire_count,
                });
            }
            if wires[..i].contains(&w) {
                return Err(Error::DuplicateWire(w));
            }
        }
        if let Gate::Unitary { matrix, .. } = self {
            let err = linalg::unitarity_error(matrix);
            if err > tol::ALGEBRAIC {
                return Err(Error::NotUnitary(err));
            }
        }
        Ok(())
    }
}

/// `|0⟩⟨0| ⊗ I + |1…1⟩⟨1…1| ⊗ op` with `controls` leading control wires.
fn controlled(controls: usize, op: &CMatrix) -> CMatrix {
    let block = op.nrows();
    let dim = block << controls;
    let mut m = linalg::identity(dim);
    let start = dim - block;
    m.view_mut((start, start), (block, block)).copy_from(op);
    m
}

/// Precompiled sparse local operator.
#[derive(Debug, Clone)]
pub(crate) struct LocalOp {
    rows: Vec<Vec<(usize, C64)>>,
}

impl LocalOp {
    pub(crate) fn new(m: &CMatrix) -> Self {
        let rows = (0..m.nrows())
            .map(|r| {
                (0..m.ncols())
                    .filter(|&c| m[(r, c)] != ZERO)
                    .map(|c| (c, m[(r, c)]))
                    .collect()
            })
            .collect();
        Self { rows }
    }
}

/// Applies `op` to the listed wires of a `total_bits`-wire vector in place.
pub(crate) fn apply_local(data: &mut [C64], total_bits: usize, wires: &[usize], op: &LocalOp) {
    let k = wires.len();
    let dim = 1usize << k;
    let offsets: Vec<usize> = (0..dim)
        .map(|s| {
            (0..k)
                .filter(|j| s >> (k - 1 - j) & 1 == 1)
                .map(|j| 1usize << (total_bits - 1 - wires[j]))
                .sum()
        })
        .collect();
    let mask: usize = offsets[dim - 1];
    let len = data.len();
    let mut buf = vec![ZERO; dim];
    let mut base = 0usize;
    while base < len {
        for (s, off) in offsets.iter().enumerate() {
            buf[s] = data[base + off];
        }
        for (r, row) in op.rows.iter().enumerate() {
            let mut acc = ZERO;
            for &(s, v) in row {
                acc += v * buf[s];
            }
            data[base + offsets[r]] = acc;
        }
        // Next index with all target bits clear.
        base = ((base | mask) + 1) & !mask;
    }
}

/// What happens in a noise slot.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseModel {
    /// The same channel on every slot wire, independently.
    Independent(KrausChannel),
    /// Individual channels on selected wires; unlisted wires are noiseless.
    PerWire(BTreeMap<usize, KrausChannel>),
}

impl NoiseModel {
    /// A single deterministic Pauli error on one wire.
    pub fn pauli_error(pauli: Pauli, wire: usize) -> Self {
        let ch = KrausChannel::unitary(pauli.matrix()).expect("Pauli is unitary");
        NoiseModel::PerWire(BTreeMap::from([(wire, ch)]))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Op {
    Gate(Gate),
    /// Slot where the noise model acts on the listed wires.
    Noise(Vec<usize>),
}

/// Ordered list of noiseless gates and noise slots on a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    wire_count: usize,
    ops: Vec<Op>,
}

impl Circuit {
    pub fn new(wire_count: usize) -> Self {
        Self {
            wire_count,
            ops: Vec::new(),
        }
    }

    pub fn wire_count(&self) -> usize {
        self.wire_count
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        gate.validate(self.wire_count)?;
        self.ops.push(Op::Gate(gate));
        Ok(self)
    }

    pub fn noise(&mut self, wires: Vec<usize>) -> Result<&mut Self> {
        if let Some(&w) = wires.iter().find(|&&w| w >= self.wire_count) {
            return Err(Error::WireOutOfRange {
                wire: w,
                wire_count: self.wire_count,
            });
        }
        self.ops.push(Op::Noise(wires));
        Ok(self)
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<&mut Self> {
        if other.wire_count != self.wire_count {
            return Err(Error::DimensionMismatch {
                expected: self.wire_count,
                found: other.wire_count,
            });
        }
        self.ops.extend(other.ops.iter().cloned());
        Ok(self)
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.ops.iter().filter_map(|op| match op {
            Op::Gate(g) => Some(g),
            Op::Noise(_) => None,
        })
    }

    /// Unitary of the gate content restricted to wires `first..wire_count`,
    /// with `first` as the most significant wire. Fails if a gate touches a
    /// wire below `first`. Noise slots are ignored.
    pub fn unitary_from(&self, first: usize) -> Result<CMatrix> {
        let bits = self.wire_count - first;
        if bits > MAX_QUBITS {
            return Err(Error::RegisterTooLarge(bits, MAX_QUBITS));
        }
        let dim = 1usize << bits;
        let compiled = self
            .gates()
            .map(|g| {
                let wires = g.wires();
                if let Some(&w) = wires.iter().find(|&&w| w < first) {
                    return Err(Error::WireOutOfRange {
                        wire: w,
                        wire_count: self.wire_count,
                    });
                }
                let local: Vec<usize> = wires.iter().map(|w| w - first).collect();
                Ok((local, LocalOp::new(&g.matrix())))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut u = CMatrix::zeros(dim, dim);
        let mut column = vec![ZERO; dim];
        for j in 0..dim {
            column.iter_mut().for_each(|z| *z = ZERO);
            column[j] = ONE;
            for (wires, op) in &compiled {
                apply_local(&mut column, bits, wires, op);
            }
            for (i, z) in column.iter().enumerate() {
                u[(i, j)] = *z;
            }
        }
        Ok(u)
    }
}

/// Density matrix of a qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiQubitState {
    qubits: usize,
    data: Vec<C64>,
}

impl MultiQubitState {
    /// `|0…0⟩⟨0…0|`.
    pub fn zero(qubits: usize) -> Result<Self> {
        check_size(qubits)?;
        let mut data = vec![ZERO; 1usize << (2 * qubits)];
        data[0] = ONE;
        Ok(Self { qubits, data })
    }

    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        let dim = rho.dim();
        if !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: dim.next_power_of_two(),
                found: dim,
            });
        }
        let qubits = dim.trailing_zeros() as usize;
        check_size(qubits)?;
        let m = rho.matrix();
        let data = (0..dim * dim).map(|k| m[(k / dim, k % dim)]).collect();
        Ok(Self { qubits, data })
    }

    /// `|Ω⟩⟨Ω|` on wires 0 and 1, every other wire in `|0⟩`.
    pub fn bell_with_ancillas(qubits: usize) -> Result<Self> {
        if qubits < 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: qubits,
            });
        }
        check_size(qubits)?;
        let dim = 1usize << qubits;
        let idx = [0, (1 << (qubits - 1)) | (1 << (qubits - 2))];
        let mut data = vec![ZERO; dim * dim];
        for &r in &idx {
            for &c in &idx {
                data[r * dim + c] = linalg::real(0.5);
            }
        }
        Ok(Self { qubits, data })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    fn entry(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.dim() + c]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|k| self.entry(k, k).re).sum()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    fn renormalize(&mut self) {
        let tr = self.trace();
        if tr > 0.0 && tr != 1.0 {
            self.data.iter_mut().for_each(|z| *z /= tr);
        }
    }

    fn check_wires(&self, wires: &[usize]) -> Result<()> {
        for (i, &w) in wires.iter().enumerate() {
            if w >= self.qubits {
                return Err(Error::WireOutOfRange {
                    wire: w,
                    wire_count: self.qubits,
                });
            }
            if wires[..i].contains(&w) {
                return Err(Error::DuplicateWire(w));
            }
        }
        Ok(())
    }

    /// `ρ → UρU†`.
    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.qubits)?;
        let wires = gate.wires();
        let m = gate.matrix();
        self.conjugate(&wires, &m);
        self.renormalize();
        Ok(())
    }

    fn conjugate(&mut self, wires: &[usize], m: &CMatrix) {
        let bits = 2 * self.qubits;
        let cols: Vec<usize> = wires.iter().map(|w| w + self.qubits).collect();
        apply_local(&mut self.data, bits, wires, &LocalOp::new(m));
        apply_local(
            &mut self.data,
            bits,
            &cols,
            &LocalOp::new(&m.map(|z| z.conj())),
        );
    }

    /// Applies the single-qubit `ch` independently to each listed wire.
    pub fn apply_noise_all(&mut self, ch: &KrausChannel, wires: &[usize]) -> Result<()> {
        if ch.dim() != 2 {
            return Err(Error::NotQubit(ch.dim()));
        }
        self.check_wires(wires)?;
        let superop = LocalOp::new(&superoperator(ch));
        let bits = 2 * self.qubits;
        for &w in wires {
            apply_local(&mut self.data, bits, &[w, w + self.qubits], &superop);
        }
        Ok(())
    }

    pub fn apply_noise_model(&mut self, model: &NoiseModel, wires: &[usize]) -> Result<()> {
        match model {
            NoiseModel::Independent(ch) => self.apply_noise_all(ch, wires),
            NoiseModel::PerWire(map) => {
                self.check_wires(wires)?;
                for (&w, ch) in map {
                    if wires.contains(&w) {
                        self.apply_noise_all(ch, &[w])?;
                    }
                }
                Ok(())
            }
        }
    }

    /// Runs every gate and noise slot of `circuit`.
    pub fn run(&mut self, circuit: &Circuit, noise: &NoiseModel) -> Result<()> {
        if circuit.wire_count() != self.qubits {
            return Err(Error::DimensionMismatch {
                expected: self.qubits,
                found: circuit.wire_count(),
            });
        }
        for op in circuit.ops() {
            match op {
                Op::Gate(g) => self.apply_gate(g)?,
                Op::Noise(wires) => self.apply_noise_model(noise, wires)?,
            }
        }
        self.renormalize();
        Ok(())
    }

    /// Reduced state on `keep`; the order of `keep` is the factor order of
    /// the result.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::EmptyKeepSet);
        }
        self.check_wires(keep)?;
        let n = self.qubits;
        let traced: Vec<usize> = (0..n).filter(|w| !keep.contains(w)).collect();
        let bit = |w: usize| 1usize << (n - 1 - w);
        let spread = |value: usize, wires: &[usize]| -> usize {
            let k = wires.len();
            (0..k)
                .filter(|j| value >> (k - 1 - j) & 1 == 1)
                .map(|j| bit(wires[j]))
                .sum()
        };
        let kdim = 1usize << keep.len();
        let kept: Vec<usize> = (0..kdim).map(|v| spread(v, keep)).collect();
        let env: Vec<usize> = (0..1usize << traced.len())
            .map(|v| spread(v, &traced))
            .collect();
        let mut out = CMatrix::zeros(kdim, kdim);
        for (i, &ri) in kept.iter().enumerate() {
            for (j, &cj) in kept.iter().enumerate() {
                out[(i, j)] = env.iter().map(|&e| self.entry(ri | e, cj | e)).sum();
            }
        }
        DensityMatrix::from_noisy(out)
    }

    pub fn to_density_matrix(&self) -> Result<DensityMatrix> {
        let all: Vec<usize> = (0..self.qubits).collect();
        self.partial_trace(&all)
    }
}

fn check_size(qubits: usize) -> Result<()> {
    if qubits == 0 || qubits > MAX_QUBITS {
        return Err(Error::RegisterTooLarge(qubits, MAX_QUBITS));
    }
    Ok(())
}

/// `Σ K ⊗ conj(K)` acting on the (row, column) pair of one qubit.
fn superoperator(ch: &KrausChannel) -> CMatrix {
    ch.operators().iter().fold(CMatrix::zeros(4, 4), |acc, k| {
        acc + linalg::kron(k, &k.map(|z| z.conj()))
    })
}

/// Choi state of a circuit with a noise slot. Wire 0 is the reference and
/// wire 1 the data qubit; both start in `|Ω⟩`, every other wire in `|0⟩`.
/// The output keeps (data, reference) in that factor order.
pub fn simulate_choi_circuit(circuit: &Circuit, noise: &NoiseModel) -> Result<ChoiState> {
    let mut state = MultiQubitState::bell_with_ancillas(circuit.wire_count())?;
    state.run(circuit, noise)?;
    let tau = state.partial_trace(&[1, 0])?.into_matrix();
    debug_assert!(hermiticity_error(&tau) < 1e-9);
    ChoiState::new((&tau + tau.adjoint()).scale(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::maximally_entangled;
    use crate::linalg::{max_abs_diff, real};
    use approx::assert_abs_diff_eq;

    fn bit_flip(p: f64) -> KrausChannel {
        KrausChannel::new(vec![
            linalg::identity(2).scale((1.0 - p).sqrt()),
            Pauli::X.matrix().scale(p.sqrt()),
        ])
        .unwrap()
    }

    fn random_state(qubits: usize, seed: u64) -> DensityMatrix {
        // Deterministic mixed state from a simple LCG; no RNG crate needed here.
        let dim = 1 << qubits;
        let mut s = seed;
        let mut next = || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let a = CMatrix::from_fn(dim, dim, |_, _| linalg::c(next(), next()));
        let m = &a * a.adjoint();
        let tr = linalg::trace(&m).re;
        DensityMatrix::new(m.unscale(tr)).unwrap()
    }

    #[test]
    fn x_flips_first_wire() {
        let mut st = MultiQubitState::zero(3).unwrap();
        st.apply_gate(&Gate::X(0)).unwrap();
        let rho = st.to_density_matrix().unwrap();
        assert_eq!(rho.matrix()[(4, 4)], ONE);
    }

    #[test]
    fn hadamard_twice_is_identity() {
        let rho = random_state(3, 7);
        let mut st = MultiQubitState::from_density(&rho).unwrap();
        st.apply_gate(&Gate::H(1)).unwrap();
        st.apply_gate(&Gate::H(1)).unwrap();
        assert!(st.to_density_matrix().unwrap().max_abs_diff(&rho) < 1e-14);
    }

    #[test]
    fn cnot_disentangles_bell_pair() {
        let mut st = MultiQubitState::bell_with_ancillas(2).unwrap();
        st.apply_gate(&Gate::Cnot {
            control: 0,
            target: 1,
        })
        .unwrap();
        assert_abs_diff_eq!(st.purity(), 1.0, epsilon = 1e-14);
        let a = st.partial_trace(&[0]).unwrap();
        let b = st.partial_trace(&[1]).unwrap();
        let plus = DensityMatrix::from_bloch(1.0, 0.0, 0.0).unwrap();
        assert!(a.max_abs_diff(&plus) < 1e-14);
        assert!(b.max_abs_diff(&DensityMatrix::basis_state(2, 0)) < 1e-14);
    }

    #[test]
    fn gate_matches_dense_conjugation() {
        let rho = random_state(3, 11);
        let gates = [
            Gate::Toffoli {
                controls: [2, 0],
                target: 1,
            },
            Gate::Cz {
                control: 1,
                target: 2,
            },
            Gate::ControlledPaulis {
                control: 2,
                targets: vec![(Pauli::Y, 0), (Pauli::Z, 1)],
            },
        ];
        for gate in gates {
            let mut st = MultiQubitState::from_density(&rho).unwrap();
            st.apply_gate(&gate).unwrap();
            let mut circ = Circuit::new(3);
            circ.push(gate.clone()).unwrap();
            let u = circ.unitary_from(0).unwrap();
            let expected = &u * rho.matrix() * u.adjoint();
            let got = st.to_density_matrix().unwrap();
            assert!(max_abs_diff(got.matrix(), &expected) < 1e-14, "{gate:?}");
        }
    }

    #[test]
    fn gate_validation() {
        let mut st = MultiQubitState::zero(2).unwrap();
        assert!(matches!(
            st.apply_gate(&Gate::X(2)),
            Err(Error::WireOutOfRange {
                wire: 2,
                wire_count: 2
            })
        ));
        assert!(matches!(
            st.apply_gate(&Gate::Cnot {
                control: 1,
                target: 1
            }),
            Err(Error::DuplicateWire(1))
        ));
        let bad = linalg::cmatrix(2, &[ONE, ONE, ZERO, ONE]);
        assert!(matches!(
            Gate::unitary(vec![0], bad),
            Err(Error::NotUnitary(_))
        ));
        assert!(MultiQubitState::zero(12).is_err());
    }

    #[test]
    fn noise_examples() {
        let rho = random_state(2, 3);
        let mut st = MultiQubitState::from_density(&rho).unwrap();
        st.apply_noise_all(&KrausChannel::identity(2), &[0, 1])
            .unwrap();
        assert!(st.to_density_matrix().unwrap().max_abs_diff(&rho) < 1e-15);

        let mut st = MultiQubitState::zero(1).unwrap();
        st.apply_noise_all(&bit_flip(0.3), &[0]).unwrap();
        let out = st.to_density_matrix().unwrap();
        assert_abs_diff_eq!(out.matrix()[(0, 0)].re, 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(out.matrix()[(1, 1)].re, 0.3, epsilon = 1e-15);

        let rho = random_state(3, 5);
        let ch = KrausChannel::new(vec![
            linalg::cmatrix(2, &[ONE, ZERO, ZERO, real(0.8)]),
            linalg::cmatrix(2, &[ZERO, real(0.6), ZERO, ZERO]),
        ])
        .unwrap();
        let mut a = MultiQubitState::from_density(&rho).unwrap();
        let mut b = a.clone();
        a.apply_noise_all(&ch, &[0, 1, 2]).unwrap();
        b.apply_noise_all(&ch, &[2, 0, 1]).unwrap();
        let (a, b) = (
            a.to_density_matrix().unwrap(),
            b.to_density_matrix().unwrap(),
        );
        assert!(a.max_abs_diff(&b) < 1e-12);

        // Dense check against E ⊗ I ⊗ I.
        let mut st = MultiQubitState::from_density(&rho).unwrap();
        st.apply_noise_all(&ch, &[0]).unwrap();
        let id4 = linalg::identity(4);
        let expected = ch.operators().iter().fold(CMatrix::zeros(8, 8), |acc, k| {
            let big = linalg::kron(k, &id4);
            acc + &big * rho.matrix() * big.adjoint()
        });
        assert!(max_abs_diff(st.to_density_matrix().unwrap().matrix(), &expected) < 1e-14);
    }

    #[test]
    fn partial_trace_examples() {
        let a = random_state(1, 1);
        let b = random_state(1, 2);
        let prod = DensityMatrix::new(linalg::kron(a.matrix(), b.matrix())).unwrap();
        let st = MultiQubitState::from_density(&prod).unwrap();
        assert!(st.partial_trace(&[0]).unwrap().max_abs_diff(&a) < 1e-15);
        assert!(st.partial_trace(&[1]).unwrap().max_abs_diff(&b) < 1e-15);
        let swapped = st.partial_trace(&[1, 0]).unwrap();
        assert!(max_abs_diff(swapped.matrix(), &linalg::kron(b.matrix(), a.matrix())) < 1e-15);

        let bell = MultiQubitState::bell_with_ancillas(2).unwrap();
        let half = DensityMatrix::maximally_mixed(2);
        assert!(bell.partial_trace(&[0]).unwrap().max_abs_diff(&half) < 1e-15);
        assert!(bell.partial_trace(&[1]).unwrap().max_abs_diff(&half) < 1e-15);

        let mut ghz = MultiQubitState::zero(3).unwrap();
        ghz.apply_gate(&Gate::H(0)).unwrap();
        ghz.apply_gate(&Gate::Cnot {
            control: 0,
            target: 1,
        })
        .unwrap();
        ghz.apply_gate(&Gate::Cnot {
            control: 0,
            target: 2,
        })
        .unwrap();
        assert!(ghz.partial_trace(&[0]).unwrap().max_abs_diff(&half) < 1e-15);

        assert!(matches!(bell.partial_trace(&[]), Err(Error::EmptyKeepSet)));
    }

    #[test]
    fn trivial_circuit_choi_is_channel_choi() {
        let mut circ = Circuit::new(2);
        circ.noise(vec![1]).unwrap();
        let tau = simulate_choi_circuit(&circ, &NoiseModel::Independent(bit_flip(0.2))).unwrap();
        let expected = ChoiState::from_kraus(&bit_flip(0.2)).unwrap();
        assert!(max_abs_diff(tau.matrix(), expected.matrix()) < 1e-15);

        let tau = simulate_choi_circuit(&circ, &NoiseModel::Independent(KrausChannel::identity(2)))
            .unwrap();
        let omega = maximally_entangled(2).unwrap();
        assert!(max_abs_diff(tau.matrix(), &(&omega * omega.adjoint())) < 1e-15);
    }
}
