//! p-sweeps over (code, channel) pairs, exact polynomial fits of `D(p)` and
//! break-even search.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::channel::choi_to_chi;
use crate::codes::{simulate_choi, CodeName, QecCode};
use crate::decoherence::measure;
use crate::error::{Error, Result};
use crate::noise::{from_calibrated_p, NoiseKind};

/// Interval holding the fit abscissae.
pub const FIT_INTERVAL: (f64, f64) = (0.05, 0.3);

/// One sweep point: calibrated `p`, uncorrected `D0` and corrected `D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub p: f64,
    pub d0: f64,
    pub d: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub code: CodeName,
    pub kind: NoiseKind,
    /// Sorted by `p`.
    pub samples: Vec<Sample>,
}

impl SweepResult {
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.samples.iter().map(|s| (s.p, s.d)).collect()
    }
}

/// Corrected measure of decoherence of `code` under calibrated noise `p`.
pub fn corrected_measure(code: &QecCode, kind: NoiseKind, p: f64) -> Result<f64> {
    let ch = from_calibrated_p(kind, p)?;
    let chi = choi_to_chi(&simulate_choi(code, &ch)?)?;
    Ok(measure(&chi)?.0.max(0.0))
}

fn single_qubit_measure(kind: NoiseKind, p: f64) -> Result<f64> {
    let chi = crate::channel::kraus_to_chi(&from_calibrated_p(kind, p)?)?;
    Ok(measure(&chi)?.0)
}

/// Evaluates every `p` in parallel; results come back in `p` order.
pub fn sweep(code: &QecCode, kind: NoiseKind, p_values: &[f64]) -> Result<SweepResult> {
    let (lo, hi) = kind.calibrated_range();
    if let Some(&bad) = p_values.iter().find(|p| !(lo..=hi).contains(*p)) {
        return Err(Error::OutOfRange {
            what: "p",
            value: bad,
            range: format!("[{lo}, {hi}]"),
        });
    }
    let mut samples = p_values
        .par_iter()
        .map(|&p| {
            Ok(Sample {
                p,
                d0: single_qubit_measure(kind, p)?,
                d: corrected_measure(code, kind, p)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    samples.sort_by(|a, b| a.p.total_cmp(&b.p));
    Ok(SweepResult {
        code: code.name,
        kind,
        samples,
    })
}

/// `n` equally spaced points covering [`FIT_INTERVAL`].
pub fn fit_grid(n: usize) -> Vec<f64> {
    let (a, b) = FIT_INTERVAL;
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// `D(p) = Σ_{i=1..n} α_i p^i`; no constant term.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCoeffs {
    alphas: Vec<f64>,
}

impl PolyCoeffs {
    /// `alphas[0]` is the coefficient of `p`.
    pub fn new(alphas: Vec<f64>) -> Self {
        Self { alphas }
    }

    pub fn degree(&self) -> usize {
        self.alphas.len()
    }

    /// Coefficient of `p^i`; zero for `i = 0` and beyond the degree.
    pub fn alpha(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.alphas.get(i - 1).copied().unwrap_or(0.0)
        }
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn evaluate(&self, p: f64) -> f64 {
        p * self.alphas.iter().rev().fold(0.0, |acc, a| acc * p + a)
    }

    /// `D(p)/p`, well defined at `p = 0`.
    fn ratio(&self, p: f64) -> f64 {
        self.alphas.iter().rev().fold(0.0, |acc, a| acc * p + a)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyFit {
    pub coeffs: PolyCoeffs,
    /// Largest absolute misfit over the input samples.
    pub residual: f64,
    /// 2-norm condition number of the monomial design matrix.
    pub condition: f64,
}

/// Solves for `α_1..α_n` from samples `(p, D)`. With exactly `n` samples the
/// system is square and the fit is exact interpolation; extra samples are
/// used in the least-squares sense.
pub fn fit_poly(samples: &[(f64, f64)], degree: usize) -> Result<PolyFit> {
    if degree == 0 {
        return Err(Error::SingularFit("degree must be at least 1".into()));
    }
    if samples.len() < degree {
        return Err(Error::SingularFit(format!(
            "{} samples for degree {degree}",
            samples.len()
        )));
    }
    let mut ps: Vec<f64> = samples.iter().map(|s| s.0).collect();
    if let Some(bad) = ps.iter().find(|p| **p <= 0.0 || !p.is_finite()) {
        return Err(Error::SingularFit(format!("sample at p = {bad}")));
    }
    ps.sort_by(f64::total_cmp);
    ps.dedup();
    if ps.len() < degree {
        return Err(Error::SingularFit(format!(
            "only {} distinct p values for degree {degree}",
            ps.len()
        )));
    }
    let a = DMatrix::from_fn(samples.len(), degree, |r, c| {
        samples[r].0.powi(c as i32 + 1)
    });
    let y = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.1));
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= smax * 1e-15 {
        return Err(Error::SingularFit(format!(
            "singular values {smin:.3e}..{smax:.3e}"
        )));
    }
    let alpha = svd
        .solve(&y, 0.0)
        .map_err(|e| Error::SingularFit(e.to_string()))?;
    let residual = (&a * &alpha - &y).amax();
    Ok(PolyFit {
        coeffs: PolyCoeffs::new(alpha.iter().copied().collect()),
        residual,
        condition: smax / smin,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BreakEven {
    /// Smallest `p > 0` with `D(p) = p`.
    At(f64),
    /// `D(p) ≠ p` on the whole search interval.
    Never,
    /// `D(p) = p` identically.
    Everywhere,
}

/// Smallest crossing of `D(p)` with `p` on `[1e-6, range_max]`, located by a
/// sign scan of `D(p)/p − 1` followed by bisection.
pub fn break_even(poly: &PolyCoeffs, range_max: f64) -> BreakEven {
    let identical = (poly.alpha(1) - 1.0).abs() <= 1e-12
        && (2..=poly.degree()).all(|i| poly.alpha(i).abs() <= 1e-12);
    if identical {
        return BreakEven::Everywhere;
    }
    let g = |p: f64| poly.ratio(p) - 1.0;
    let lo = 1e-6;
    let steps = 10_000;
    let mut a = lo;
    let mut ga = g(a);
    if ga == 0.0 {
        return BreakEven::At(a);
    }
    for i in 1..=steps {
        let b = lo + (range_max - lo) * i as f64 / steps as f64;
        let gb = g(b);
        if gb == 0.0 {
            return BreakEven::At(b);
        }
        if ga.signum() != gb.signum() {
            let (mut x0, mut x1, mut g0) = (a, b, ga);
            for _ in 0..200 {
                let mid = 0.5 * (x0 + x1);
                if mid <= x0 || mid >= x1 {
                    break;
                }
                let gm = g(mid);
                if gm == 0.0 {
                    return BreakEven::At(mid);
                }
                if gm.signum() == g0.signum() {
                    x0 = mid;
                    g0 = gm;
                } else {
                    x1 = mid;
                }
            }
            return BreakEven::At(0.5 * (x0 + x1));
        }
        a = b;
        ga = gb;
    }
    BreakEven::Never
}

/// `N·p` clamped into the calibrated range of `kind`; the flag reports
/// whether clamping happened.
pub fn scale_for_n_ops(p: f64, n_ops: u32, kind: NoiseKind) -> Result<(f64, bool)> {
    if n_ops == 0 {
        return Err(Error::OutOfRange {
            what: "N",
            value: 0.0,
            range: "[1, ∞)".into(),
        });
    }
    Ok(kind.clamp_calibrated(p * n_ops as f64))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub sweep: SweepResult,
    pub fit: PolyFit,
    pub break_even: BreakEven,
}

/// Simulates `n` equally spaced points in [`FIT_INTERVAL`] and fits a degree-`n`
/// polynomial, `n` being the code's qubit count.
pub fn fit_code(code: &QecCode, kind: NoiseKind) -> Result<FitReport> {
    let sweep = sweep(code, kind, &fit_grid(code.n))?;
    let fit = fit_poly(&sweep.points(), code.n)?;
    let break_even = break_even(&fit.coeffs, kind.calibrated_range().1);
    Ok(FitReport {
        sweep,
        fit,
        break_even,
    })
}
