//! Measurement-free error-correction codes as encoder/decoder circuits.
//!
//! Register layout for an `n`-qubit code: wire 0 is the reference half of the
//! Bell pair, wire 1 the data qubit, wires `2..=n` the code ancillas.

use std::fmt;
use std::str::FromStr;

use crate::channel::{ChoiState, KrausChannel, Pauli};
use crate::circuit::{simulate_choi_circuit, Circuit, Gate, NoiseModel, MAX_QUBITS};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodeName {
    None,
    Bit3,
    Phase3,
    Shor5,
    Shor9,
}

impl CodeName {
    pub const ALL: [CodeName; 5] = [
        CodeName::None,
        CodeName::Bit3,
        CodeName::Phase3,
        CodeName::Shor5,
        CodeName::Shor9,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CodeName::None => "none",
            CodeName::Bit3 => "bit3",
            CodeName::Phase3 => "phase3",
            CodeName::Shor5 => "shor5",
            CodeName::Shor9 => "shor9",
        }
    }

    pub fn build(self) -> Result<QecCode> {
        match self {
            CodeName::None => trivial_code(),
            CodeName::Bit3 => bit_flip_code(),
            CodeName::Phase3 => phase_flip_code(),
            CodeName::Shor5 => shor5_code(),
            CodeName::Shor9 => shor9_code(),
        }
    }
}

impl fmt::Display for CodeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CodeName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CodeName::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::UnknownName {
                what: "code",
                name: s.to_string(),
            })
    }
}

/// A Pauli acting on one register wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliError {
    pub pauli: Pauli,
    pub wire: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QecCode {
    pub name: CodeName,
    /// Number of code qubits (data plus ancillas).
    pub n: usize,
    pub encoder: Circuit,
    /// Decoding and recovery; leaves the corrected data qubit on wire 1.
    pub decoder: Circuit,
    pub corrects: Vec<PauliError>,
}

impl QecCode {
    pub fn wire_count(&self) -> usize {
        self.n + 1
    }

    pub fn code_wires(&self) -> Vec<usize> {
        (1..=self.n).collect()
    }

    /// Encoder, one noise slot on every code wire, decoder.
    pub fn full_circuit(&self) -> Result<Circuit> {
        let mut c = self.encoder.clone();
        c.noise(self.code_wires())?;
        c.extend(&self.decoder)?;
        Ok(c)
    }
}

/// Choi state of the corrected channel when `ch` hits every code qubit.
pub fn simulate_choi(code: &QecCode, ch: &KrausChannel) -> Result<ChoiState> {
    simulate_choi_with(code, &NoiseModel::Independent(ch.clone()))
}

pub fn simulate_choi_with(code: &QecCode, noise: &NoiseModel) -> Result<ChoiState> {
    if code.wire_count() > MAX_QUBITS {
        return Err(Error::RegisterTooLarge(code.wire_count(), MAX_QUBITS));
    }
    if let NoiseModel::Independent(ch) = noise {
        if ch.dim() != 2 {
            return Err(Error::NotQubit(ch.dim()));
        }
    }
    simulate_choi_circuit(&code.full_circuit()?, noise)
}

fn circuit(wires: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Circuit> {
    let mut c = Circuit::new(wires);
    for g in gates {
        c.push(g)?;
    }
    Ok(c)
}

fn single_errors(paulis: &[Pauli], wires: impl Iterator<Item = usize> + Clone) -> Vec<PauliError> {
    wires
        .flat_map(|wire| paulis.iter().map(move |&pauli| PauliError { pauli, wire }))
        .collect()
}

/// No encoding: the bare data qubit.
pub fn trivial_code() -> Result<QecCode> {
    Ok(QecCode {
        name: CodeName::None,
        n: 1,
        encoder: Circuit::new(2),
        decoder: Circuit::new(2),
        corrects: Vec::new(),
    })
}

fn majority_decoder(data: usize, a: usize, b: usize) -> [Gate; 3] {
    [
        Gate::Cnot {
            control: data,
            target: a,
        },
        Gate::Cnot {
            control: data,
            target: b,
        },
        Gate::Toffoli {
            controls: [a, b],
            target: data,
        },
    ]
}

/// Three-qubit repetition code with Toffoli majority vote.
pub fn bit_flip_code() -> Result<QecCode> {
    let encoder = circuit(
        4,
        [
            Gate::Cnot {
                control: 1,
                target: 2,
            },
            Gate::Cnot {
                control: 1,
                target: 3,
            },
        ],
    )?;
    let decoder = circuit(4, majority_decoder(1, 2, 3))?;
    Ok(QecCode {
        name: CodeName::Bit3,
        n: 3,
        encoder,
        decoder,
        corrects: single_errors(&[Pauli::X], 1..=3),
    })
}

/// The repetition code in the Hadamard basis.
pub fn phase_flip_code() -> Result<QecCode> {
    let hs = || (1..=3).map(Gate::H);
    let encoder = circuit(
        4,
        [
            Gate::Cnot {
                control: 1,
                target: 2,
            },
            Gate::Cnot {
                control: 1,
                target: 3,
            },
        ]
        .into_iter()
        .chain(hs()),
    )?;
    let decoder = circuit(4, hs().chain(majority_decoder(1, 2, 3)))?;
    Ok(QecCode {
        name: CodeName::Phase3,
        n: 3,
        encoder,
        decoder,
        corrects: single_errors(&[Pauli::Z], 1..=3),
    })
}

fn shor5_encoder() -> Result<Circuit> {
    use Pauli::{X, Z};
    let cp = |control: usize, targets: [(Pauli, usize); 3]| Gate::ControlledPaulis {
        control,
        targets: targets.to_vec(),
    };
    circuit(
        6,
        [
            Gate::Z(1),
            Gate::H(2),
            cp(2, [(X, 1), (Z, 3), (Z, 5)]),
            Gate::H(5),
            cp(5, [(X, 1), (Z, 2), (Z, 4)]),
            Gate::H(4),
            cp(4, [(Z, 1), (Z, 3), (X, 5)]),
            Gate::H(3),
            cp(3, [(Z, 2), (X, 4), (Z, 5)]),
        ],
    )
}

/// Five-qubit perfect code; the decoder is a single recovery unitary.
pub fn shor5_code() -> Result<QecCode> {
    let encoder = shor5_encoder()?;
    let recovery = build_recovery(&encoder, 5)?;
    let mut decoder = Circuit::new(6);
    decoder.push(recovery)?;
    Ok(QecCode {
        name: CodeName::Shor5,
        n: 5,
        encoder,
        decoder,
        corrects: single_errors(&Pauli::ERRORS, 1..=5),
    })
}

/// Nine-qubit code: phase-flip repetition over three bit-flip blocks.
pub fn shor9_code() -> Result<QecCode> {
    let blocks = [1, 4, 7];
    let mut enc = vec![
        Gate::Cnot {
            control: 1,
            target: 7,
        },
        Gate::Cnot {
            control: 1,
            target: 4,
        },
    ];
    enc.extend(blocks.iter().map(|&b| Gate::H(b)));
    for b in blocks {
        enc.push(Gate::Cnot {
            control: b,
            target: b + 1,
        });
        enc.push(Gate::Cnot {
            control: b,
            target: b + 2,
        });
    }
    let mut dec: Vec<Gate> = blocks
        .iter()
        .flat_map(|&b| majority_decoder(b, b + 1, b + 2))
        .collect();
    dec.extend(blocks.iter().map(|&b| Gate::H(b)));
    dec.extend(majority_decoder(1, 7, 4));
    Ok(QecCode {
        name: CodeName::Shor9,
        n: 9,
        encoder: circuit(10, enc)?,
        decoder: circuit(10, dec)?,
        corrects: single_errors(&Pauli::ERRORS, 1..=9),
    })
}

/// Recovery for all `3n` single-qubit Pauli errors on the code wires.
pub fn build_recovery(encoder: &Circuit, n: usize) -> Result<Gate> {
    let errors = single_errors(&Pauli::ERRORS, 1..=n);
    build_recovery_for(encoder, n, &errors)
}

/// Coherent recovery unitary on wires `1..=n`.
///
/// Each correctable error `E_k` (with `E_0 = I`) maps the logical basis
/// `|j_L⟩ = Enc|j, 0…0⟩` to `E_k|j_L⟩`. If these vectors are orthonormal the
/// unitary sending `E_k|j_L⟩ ↦ |j⟩ ⊗ |k⟩` exists; it is completed on the
/// unreached subspace by Gram–Schmidt. The data bit lands on wire 1 and the
/// syndrome label `k` on the ancillas.
pub fn build_recovery_for(encoder: &Circuit, n: usize, errors: &[PauliError]) -> Result<Gate> {
    if encoder.wire_count() != n + 1 {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            found: encoder.wire_count(),
        });
    }
    let labels = errors.len() + 1;
    let capacity = 1usize << (n - 1);
    if labels > capacity {
        return Err(Error::SyndromeSpaceTooSmall {
            errors: labels,
            capacity,
        });
    }
    let dim = 1usize << n;
    let enc = encoder.unitary_from(1)?;
    let logical = [
        enc.column(0).into_owned(),
        enc.column(capacity).into_owned(),
    ];

    let mut sources: Vec<nalgebra::DVector<C64>> = Vec::with_capacity(dim);
    let mut targets: Vec<usize> = Vec::with_capacity(dim);
    for k in 0..labels {
        let op = match k {
            0 => linalg::identity(dim),
            _ => {
                let e = errors[k - 1];
                if e.wire == 0 || e.wire > n {
                    return Err(Error::WireOutOfRange {
                        wire: e.wire,
                        wire_count: n + 1,
                    });
                }
                embed(e.pauli, e.wire - 1, n)
            }
        };
        for (j, l) in logical.iter().enumerate() {
            sources.push(&op * l);
            targets.push(j * capacity + k);
        }
    }

    let gram_dev = gram_deviation(&sources);
    if gram_dev > 1e-10 {
        return Err(Error::SyndromesOverlap(gram_dev));
    }

    // Orthonormal completion of the source span.
    for e in 0..dim {
        if sources.len() == dim {
            break;
        }
        let mut v = nalgebra::DVector::from_element(dim, ZERO);
        v[e] = linalg::ONE;
        for _ in 0..2 {
            for s in &sources {
                let overlap = s.dotc(&v);
                v -= s * overlap;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            sources.push(v.unscale(norm));
        }
    }
    let unused: Vec<usize> = (0..dim).filter(|t| !targets.contains(t)).collect();
    targets.extend(unused);

    let mut r = CMatrix::zeros(dim, dim);
    for (s, &t) in sources.iter().zip(&targets) {
        for c in 0..dim {
            r[(t, c)] += s[c].conj();
        }
    }
    Gate::unitary((1..=n).collect(), r)
}

/// Pauli on local wire `w` of an `n`-qubit register, wire 0 most significant.
fn embed(p: Pauli, w: usize, n: usize) -> CMatrix {
    (0..n).fold(linalg::identity(1), |acc, k| {
        let f = if k == w {
            p.matrix()
        } else {
            linalg::identity(2)
        };
        linalg::kron(&acc, &f)
    })
}

fn gram_deviation(vs: &[nalgebra::DVector<C64>]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in vs.iter().enumerate() {
        for (j, b) in vs.iter().enumerate().skip(i) {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((a.dotc(b) - linalg::real(want)).norm());
        }
    }
    worst
}
