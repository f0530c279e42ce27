//! The five single-qubit noise channels, parameterised natively or by their
//! calibrated decoherence probability `p = D0`.

use std::fmt;
use std::str::FromStr;

use crate::channel::{ChiMatrix, KrausChannel, Pauli};
use crate::error::{Error, Result};
use crate::linalg::{self, real, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    BitFlip,
    PhaseFlip,
    Depolarizing,
    AmplitudeDamping,
    PhaseDamping,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 5] = [
        NoiseKind::BitFlip,
        NoiseKind::PhaseFlip,
        NoiseKind::Depolarizing,
        NoiseKind::AmplitudeDamping,
        NoiseKind::PhaseDamping,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::BitFlip => "bit_flip",
            NoiseKind::PhaseFlip => "phase_flip",
            NoiseKind::Depolarizing => "depolarizing",
            NoiseKind::AmplitudeDamping => "amplitude_damping",
            NoiseKind::PhaseDamping => "phase_damping",
        }
    }

    /// Name of the native parameter: `p`, `gamma_t` (Γt) or `b_sq` (B²).
    pub fn native_name(self) -> &'static str {
        match self {
            NoiseKind::AmplitudeDamping => "gamma_t",
            NoiseKind::PhaseDamping => "b_sq",
            _ => "p",
        }
    }

    /// Closed interval of admissible native parameters.
    pub fn native_range(self) -> (f64, f64) {
        match self {
            NoiseKind::BitFlip | NoiseKind::PhaseFlip => (0.0, 1.0),
            NoiseKind::Depolarizing => (0.0, 2.0 / 3.0),
            NoiseKind::AmplitudeDamping | NoiseKind::PhaseDamping => (0.0, f64::INFINITY),
        }
    }

    /// Closed interval of calibrated probabilities. The upper ends of the two
    /// damping channels are the `Γt, B² → ∞` limits, which remain CPTP.
    pub fn calibrated_range(self) -> (f64, f64) {
        match self {
            NoiseKind::BitFlip | NoiseKind::PhaseFlip | NoiseKind::AmplitudeDamping => (0.0, 1.0),
            NoiseKind::Depolarizing => (0.0, 2.0 / 3.0),
            NoiseKind::PhaseDamping => (0.0, 0.5),
        }
    }

    /// `D0` of the single-qubit channel as a function of its native parameter.
    pub fn calibrate(self, native: f64) -> f64 {
        match self {
            NoiseKind::AmplitudeDamping => -(-native).exp_m1(),
            NoiseKind::PhaseDamping => -(-native).exp_m1() / 2.0,
            _ => native,
        }
    }

    /// Inverse of [`NoiseKind::calibrate`]: `Γt = −ln(1 − p)`, `B² = −ln(1 − 2p)`.
    pub fn native_from_calibrated(self, p: f64) -> f64 {
        match self {
            NoiseKind::AmplitudeDamping => -(-p).ln_1p(),
            NoiseKind::PhaseDamping => -(-2.0 * p).ln_1p(),
            _ => p,
        }
    }

    /// Clamps `p` into the calibrated range; the flag reports whether it moved.
    pub fn clamp_calibrated(self, p: f64) -> (f64, bool) {
        let (lo, hi) = self.calibrated_range();
        let clamped = p.clamp(lo, hi);
        (clamped, clamped != p)
    }

    pub fn is_pauli(self) -> bool {
        matches!(
            self,
            NoiseKind::BitFlip | NoiseKind::PhaseFlip | NoiseKind::Depolarizing
        )
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NoiseKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownName {
                what: "channel",
                name: s.to_string(),
            })
    }
}

fn check_range(what: &'static str, value: f64, (lo, hi): (f64, f64)) -> Result<()> {
    if value.is_nan() || value < lo || value > hi {
        let range = if hi.is_infinite() {
            format!("[{lo}, ∞)")
        } else {
            format!("[{lo}, {hi}]")
        };
        return Err(Error::OutOfRange { what, value, range });
    }
    Ok(())
}

fn pauli_mixture(weights: [f64; 4]) -> KrausChannel {
    let ops = Pauli::ALL
        .iter()
        .zip(weights)
        .filter(|(_, w)| *w > 0.0)
        .map(|(p, w)| p.matrix().scale(w.sqrt()))
        .collect::<Vec<_>>();
    if ops.is_empty() {
        return KrausChannel::identity(2);
    }
    KrausChannel::new(ops).expect("Pauli weights sum to one")
}

/// `{√(1−p) I, √p X}`.
pub fn bit_flip(p: f64) -> Result<KrausChannel> {
    check_range("p", p, NoiseKind::BitFlip.native_range())?;
    Ok(pauli_mixture([1.0 - p, p, 0.0, 0.0]))
}

/// `{√(1−p) I, √p Z}`.
pub fn phase_flip(p: f64) -> Result<KrausChannel> {
    check_range("p", p, NoiseKind::PhaseFlip.native_range())?;
    Ok(pauli_mixture([1.0 - p, 0.0, 0.0, p]))
}

/// `{√(1−3p/2) I, √(p/2) X, √(p/2) Y, √(p/2) Z}`.
pub fn depolarizing(p: f64) -> Result<KrausChannel> {
    check_range("p", p, NoiseKind::Depolarizing.native_range())?;
    let w = p / 2.0;
    Ok(pauli_mixture([(1.0 - 3.0 * w).max(0.0), w, w, w]))
}

/// Relaxation `|1⟩ → |0⟩` with survival `e^{−Γt}`.
pub fn amplitude_damping(gamma_t: f64) -> Result<KrausChannel> {
    check_range(
        "gamma_t",
        gamma_t,
        NoiseKind::AmplitudeDamping.native_range(),
    )?;
    Ok(amplitude_damping_decay(-(-gamma_t).exp_m1()))
}

/// Amplitude damping parameterised by the decay probability `1 − e^{−Γt}`.
fn amplitude_damping_decay(decay: f64) -> KrausChannel {
    let keep = 1.0 - decay;
    KrausChannel::new(vec![
        linalg::cmatrix(2, &[ONE, ZERO, ZERO, real(keep.sqrt())]),
        linalg::cmatrix(2, &[ZERO, real(decay.sqrt()), ZERO, ZERO]),
    ])
    .expect("amplitude damping is complete")
}

/// Pure dephasing; coherences shrink by `e^{−B²}`.
pub fn phase_damping(b_sq: f64) -> Result<KrausChannel> {
    check_range("b_sq", b_sq, NoiseKind::PhaseDamping.native_range())?;
    Ok(phase_damping_loss(-(-b_sq).exp_m1()))
}

/// Phase damping parameterised by the coherence loss `1 − e^{−B²}`.
fn phase_damping_loss(loss: f64) -> KrausChannel {
    let keep = 1.0 - loss;
    let r = real(loss.sqrt());
    KrausChannel::new(vec![
        linalg::identity(2).scale(keep.sqrt()),
        linalg::cmatrix(2, &[r, ZERO, ZERO, ZERO]),
        linalg::cmatrix(2, &[ZERO, ZERO, ZERO, r]),
    ])
    .expect("phase damping is complete")
}

/// Channel with native parameter `native`.
pub fn channel(kind: NoiseKind, native: f64) -> Result<KrausChannel> {
    match kind {
        NoiseKind::BitFlip => bit_flip(native),
        NoiseKind::PhaseFlip => phase_flip(native),
        NoiseKind::Depolarizing => depolarizing(native),
        NoiseKind::AmplitudeDamping => amplitude_damping(native),
        NoiseKind::PhaseDamping => phase_damping(native),
    }
}

/// Channel whose single-qubit measure of decoherence equals `p`.
pub fn from_calibrated_p(kind: NoiseKind, p: f64) -> Result<KrausChannel> {
    check_range("p", p, kind.calibrated_range())?;
    Ok(match kind {
        NoiseKind::AmplitudeDamping => amplitude_damping_decay(p),
        NoiseKind::PhaseDamping => phase_damping_loss(2.0 * p),
        _ => channel(kind, p)?,
    })
}

/// Diagonal χ of a Pauli channel, evaluated without range checks so that
/// unphysical parameters can still be inspected. `None` for damping kinds.
pub fn pauli_chi_unchecked(kind: NoiseKind, p: f64) -> Option<ChiMatrix> {
    match kind {
        NoiseKind::BitFlip => Some(ChiMatrix::from_diagonal([1.0 - p, p, 0.0, 0.0])),
        NoiseKind::PhaseFlip => Some(ChiMatrix::from_diagonal([1.0 - p, 0.0, 0.0, p])),
        NoiseKind::Depolarizing => {
            let w = p / 2.0;
            Some(ChiMatrix::from_diagonal([1.0 - 3.0 * w, w, w, w]))
        }
        _ => None,
    }
}

/// A noise channel together with both of its parameterisations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub native_param: f64,
    pub calibrated_p: f64,
}

impl NoiseSpec {
    pub fn from_native(kind: NoiseKind, native: f64) -> Result<Self> {
        check_range("native", native, kind.native_range())?;
        Ok(Self {
            kind,
            native_param: native,
            calibrated_p: kind.calibrate(native),
        })
    }

    pub fn from_calibrated(kind: NoiseKind, p: f64) -> Result<Self> {
        check_range("p", p, kind.calibrated_range())?;
        Ok(Self {
            kind,
            native_param: kind.native_from_calibrated(p),
            calibrated_p: p,
        })
    }

    pub fn channel(&self) -> Result<KrausChannel> {
        from_calibrated_p(self.kind, self.calibrated_p)
    }
}

/// `kind=<name>, p=<real>`.
impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "kind={}, p={}", self.kind, self.calibrated_p)
    }
}

/// Accepts `kind=<name>, p=<real>` or `kind=<name>, native=<real>`.
impl FromStr for NoiseSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut kind = None;
        let mut value = None;
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, val) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got '{part}'")))?;
            let (key, val) = (key.trim(), val.trim());
            match key {
                "kind" => kind = Some(val.parse::<NoiseKind>()?),
                "p" | "native" => {
                    if value.is_some() {
                        return Err(Error::Parse("both p and native given".into()));
                    }
                    let x = val
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("{key}: {e}")))?;
                    value = Some((key == "native", x));
                }
                other => return Err(Error::Parse(format!("unknown key '{other}'"))),
            }
        }
        let kind = kind.ok_or_else(|| Error::Parse("missing kind".into()))?;
        match value {
            Some((true, x)) => NoiseSpec::from_native(kind, x),
            Some((false, x)) => NoiseSpec::from_calibrated(kind, x),
            None => Err(Error::Parse("missing p or native".into())),
        }
    }
}
