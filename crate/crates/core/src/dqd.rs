//! Acoustic-phonon decoherence of a silicon double-quantum-dot charge qubit.
//!
//! Internal units are SI. The JSON configuration uses unit-suffixed keys.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::NoiseKind;
use crate::quadrature::GaussLegendre;

pub const ELECTRON_VOLT: f64 = 1.602_176_634e-19;
pub const HBAR: f64 = 1.054_571_817e-34;

/// Physical parameters in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DqdParams {
    /// Deformation potential Ξ, J.
    pub xi: f64,
    /// Sound speed s, m/s.
    pub s: f64,
    /// Crystal density, kg/m³.
    pub rho: f64,
    /// Dot separation L, m.
    pub l: f64,
    /// Dot radius a, m.
    pub a: f64,
    /// Phonon wavevector k, 1/m.
    pub k: f64,
    pub hbar: f64,
}

impl Default for DqdParams {
    fn default() -> Self {
        DqdConfig::default()
            .to_params()
            .expect("defaults are valid")
    }
}

impl DqdParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("xi", self.xi),
            ("s", self.s),
            ("rho", self.rho),
            ("L", self.l),
            ("a", self.a),
            ("k", self.k),
            ("hbar", self.hbar),
        ];
        for (what, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::OutOfRange {
                    what,
                    value,
                    range: "(0, ∞)".into(),
                });
            }
        }
        Ok(())
    }

    pub fn to_config(&self) -> DqdConfig {
        DqdConfig {
            xi_ev: self.xi / ELECTRON_VOLT,
            s_m_per_s: self.s,
            rho_g_per_cm3: self.rho / 1000.0,
            l_nm: self.l * 1e9,
            a_nm: self.a * 1e9,
            k_per_m: self.k,
        }
    }
}

/// File representation of [`DqdParams`]. Missing keys take the defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DqdConfig {
    #[serde(rename = "xi_eV")]
    pub xi_ev: f64,
    pub s_m_per_s: f64,
    pub rho_g_per_cm3: f64,
    #[serde(rename = "L_nm")]
    pub l_nm: f64,
    pub a_nm: f64,
    pub k_per_m: f64,
}

impl Default for DqdConfig {
    fn default() -> Self {
        Self {
            xi_ev: 3.3,
            s_m_per_s: 9.0e3,
            rho_g_per_cm3: 2.33,
            l_nm: 50.0,
            a_nm: 3.0,
            k_per_m: 1.0e8,
        }
    }
}

impl DqdConfig {
    pub fn to_params(&self) -> Result<DqdParams> {
        let p = DqdParams {
            xi: self.xi_ev * ELECTRON_VOLT,
            s: self.s_m_per_s,
            rho: self.rho_g_per_cm3 * 1000.0,
            l: self.l_nm * 1e-9,
            a: self.a_nm * 1e-9,
            k: self.k_per_m,
            hbar: HBAR,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain struct serialises")
    }
}

/// Numerical settings for [`spectral_function`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Upper q limit in units of `1/a`.
    pub q_max_factor: f64,
    /// Gauss–Legendre nodes per outer panel.
    pub outer_nodes: usize,
    /// Gauss–Legendre nodes per inner (Θ) panel.
    pub inner_nodes: usize,
    /// Relative accuracy each outer panel must reach.
    pub target_rel_error: f64,
    /// Outer panel budget; exceeding it is reported as an error.
    pub max_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            q_max_factor: 8.0,
            outer_nodes: 16,
            inner_nodes: 16,
            target_rel_error: 1e-10,
            max_panels: 200_000,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.outer_nodes < 16 || self.inner_nodes < 16 {
            return Err(Error::Quadrature(format!(
                "node counts must be at least 16 (outer {}, inner {})",
                self.outer_nodes, self.inner_nodes
            )));
        }
        if self.q_max_factor < 6.0 {
            return Err(Error::Quadrature(format!(
                "q_max_factor {} below 6",
                self.q_max_factor
            )));
        }
        if self.target_rel_error.is_nan() || self.target_rel_error <= 0.0 {
            return Err(Error::Quadrature("target error must be positive".into()));
        }
        Ok(())
    }

    /// Same cutoff with both node counts doubled.
    pub fn doubled(&self) -> Self {
        Self {
            outer_nodes: 2 * self.outer_nodes,
            inner_nodes: 2 * self.inner_nodes,
            ..*self
        }
    }
}

/// `Γ = Ξ²k³/(4πρs²ħ) · exp(−a²k²/2) · (1 − sin(kL)/(kL))`.
pub fn relaxation_rate(p: &DqdParams) -> f64 {
    let kl = p.k * p.l;
    let bracket = if kl == 0.0 { 0.0 } else { 1.0 - kl.sin() / kl };
    p.xi * p.xi * p.k.powi(3) / (4.0 * PI * p.rho * p.s * p.s * p.hbar)
        * (-p.a * p.a * p.k * p.k / 2.0).exp()
        * bracket
}

/// `Ξ²/(π²ħρs³)`, the prefactor of `B²(t)`.
fn spectral_prefactor(p: &DqdParams) -> f64 {
    p.xi * p.xi / (PI * PI * p.hbar * p.rho * p.s.powi(3))
}

/// `∫_0^π sinΘ sin²(qL cosΘ) dΘ`, composite Gauss–Legendre with panel count
/// growing with `qL`.
fn angular_integral(ql: f64, rule: &GaussLegendre) -> f64 {
    let panels = (ql / PI).ceil().max(1.0) as usize;
    rule.integrate_composite(0.0, PI, panels, |th| {
        let s = (ql * th.cos()).sin();
        th.sin() * s * s
    })
}

/// `B²(t) = Ξ²/(π²ħρs³) ∫_0^∞ q dq ∫_0^π sinΘ sin²(qL cosΘ) e^{−a²q²/2}
/// sin²(qst/2) dΘ`, truncated at `q_max = q_max_factor / a`.
///
/// Each q panel is compared against a rule with twice the nodes and bisected
/// until the two agree within its width-proportional share of
/// `target_rel_error` times the first-pass total.
pub fn spectral_function(p: &DqdParams, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    p.validate()?;
    cfg.validate()?;
    if !t.is_finite() || t < 0.0 {
        return Err(Error::OutOfRange {
            what: "t",
            value: t,
            range: "[0, ∞)".into(),
        });
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let outer = GaussLegendre::new(cfg.outer_nodes);
    let outer_fine = GaussLegendre::new(2 * cfg.outer_nodes);
    let inner = GaussLegendre::new(cfg.inner_nodes);
    let q_max = cfg.q_max_factor / p.a;
    let integrand = |q: f64| {
        let osc = (q * p.s * t / 2.0).sin();
        q * (-p.a * p.a * q * q / 2.0).exp() * osc * osc * angular_integral(q * p.l, &inner)
    };

    // One period of sin²(qst/2), a fraction of the Gaussian width and half a
    // period of the angular factor bound the initial panel width.
    let width = (2.0 * PI / (p.s * t)).min(1.0 / p.a).min(PI / p.l);
    let initial = (q_max / width).ceil().max(1.0) as usize;
    if initial > cfg.max_panels {
        return Err(Error::Quadrature(format!(
            "t = {t:e} s needs {initial} panels, budget is {}",
            cfg.max_panels
        )));
    }
    let h = q_max / initial as f64;
    let estimate = |a: f64, b: f64| {
        (
            outer.integrate(a, b, integrand),
            outer_fine.integrate(a, b, integrand),
        )
    };
    let first: Vec<(f64, f64, f64, f64)> = (0..initial)
        .map(|k| {
            let (a, b) = (h * k as f64, h * (k + 1) as f64);
            let (coarse, fine) = estimate(a, b);
            (a, b, coarse, fine)
        })
        .collect();
    let first_total: f64 = first.iter().map(|x| x.3).sum();
    // Absolute error budget shared out in proportion to panel width.
    let density = cfg.target_rel_error * first_total.abs().max(f64::MIN_POSITIVE) / q_max;

    let mut total = 0.0f64;
    let mut panels = initial;
    let mut stack: Vec<(f64, f64, f64, f64)> = first.into_iter().rev().collect();
    while let Some((a, b, coarse, fine)) = stack.pop() {
        if (fine - coarse).abs() <= density * (b - a) || b - a < 1e-9 * h {
            total += fine;
            continue;
        }
        panels += 2;
        if panels > cfg.max_panels {
            return Err(Error::Quadrature(format!(
                "panel budget {} exhausted at t = {t:e} s",
                cfg.max_panels
            )));
        }
        let mid = 0.5 * (a + b);
        let (c2, f2) = estimate(mid, b);
        let (c1, f1) = estimate(a, mid);
        stack.push((mid, b, c2, f2));
        stack.push((a, mid, c1, f1));
    }
    Ok(spectral_prefactor(p) * total)
}

/// Decoherence probabilities after `n_ops` operations of cycle time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorProbs {
    /// Amplitude-damping probability `N(1 − e^{−Γt})`, clamped to `[0, 1]`.
    pub p1: f64,
    /// Phase-damping probability `N(1 − e^{−B²})/2`, clamped to `[0, 1/2]`.
    pub p2: f64,
    pub clamped: bool,
}

pub fn dqd_error_probs(
    p: &DqdParams,
    t: f64,
    n_ops: u32,
    cfg: &QuadratureConfig,
) -> Result<ErrorProbs> {
    if n_ops == 0 {
        return Err(Error::OutOfRange {
            what: "N",
            value: 0.0,
            range: "[1, ∞)".into(),
        });
    }
    let gamma = relaxation_rate(p);
    let b_sq = spectral_function(p, t, cfg)?;
    let n = n_ops as f64;
    let (p1, c1) = NoiseKind::AmplitudeDamping
        .clamp_calibrated(n * NoiseKind::AmplitudeDamping.calibrate(gamma * t));
    let (p2, c2) =
        NoiseKind::PhaseDamping.clamp_calibrated(n * NoiseKind::PhaseDamping.calibrate(b_sq));
    Ok(ErrorProbs {
        p1,
        p2,
        clamped: c1 || c2,
    })
}

/// Corrected measure of the five-qubit code under amplitude damping.
pub fn corrected_amplitude_damping(p: f64) -> f64 {
    5.0 * p * p * (3.0 - 3.0 * p + p * p) / 8.0
}

/// Corrected measure of the five-qubit code under phase damping.
pub fn corrected_phase_damping(p: f64) -> f64 {
    10.0 * p * p * (1.0 - 2.0 * p + p * p)
}

/// `(D0, D) = (max{p1, p2}, max{D_amp(p1), D_phase(p2)})`.
pub fn combined_measures(p1: f64, p2: f64) -> (f64, f64) {
    (
        p1.max(p2),
        corrected_amplitude_damping(p1).max(corrected_phase_damping(p2)),
    )
}

/// One row of the double-dot decoherence curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DqdPoint {
    pub t: f64,
    pub probs: ErrorProbs,
    pub d0: f64,
    pub d: f64,
}

pub fn dqd_decoherence(
    p: &DqdParams,
    t: f64,
    n_ops: u32,
    cfg: &QuadratureConfig,
) -> Result<DqdPoint> {
    let probs = dqd_error_probs(p, t, n_ops, cfg)?;
    let (d0, d) = combined_measures(probs.p1, probs.p2);
    Ok(DqdPoint { t, probs, d0, d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn relaxation_rate_limits() {
        let mut p = DqdParams {
            k: 1e-3,
            ..DqdParams::default()
        };
        assert!(relaxation_rate(&p) < 1e-20);
        p.k = 2.0 * PI / p.l;
        let kl = p.k * p.l;
        assert_abs_diff_eq!(1.0 - kl.sin() / kl, 1.0, epsilon = 1e-15);
        let expected = p.xi * p.xi * p.k.powi(3) / (4.0 * PI * p.rho * p.s * p.s * p.hbar)
            * (-p.a * p.a * p.k * p.k / 2.0).exp();
        assert_relative_eq!(relaxation_rate(&p), expected, max_relative = 1e-12);
    }

    #[test]
    fn angular_integral_matches_closed_form() {
        let rule = GaussLegendre::new(16);
        for ql in [0.01f64, 1.0, 7.5, 60.0, 130.0] {
            let exact = 1.0 - (2.0 * ql).sin() / (2.0 * ql);
            assert_abs_diff_eq!(angular_integral(ql, &rule), exact, epsilon = 1e-12);
        }
    }

    #[test]
    fn spectral_function_is_zero_at_zero() {
        let p = DqdParams::default();
        assert_eq!(
            spectral_function(&p, 0.0, &QuadratureConfig::default()).unwrap(),
            0.0
        );
        assert!(spectral_function(&p, -1.0, &QuadratureConfig::default()).is_err());
    }

    #[test]
    fn quadrature_config_limits() {
        let cfg = QuadratureConfig {
            inner_nodes: 8,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = QuadratureConfig {
            q_max_factor: 4.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let tight = QuadratureConfig {
            max_panels: 10,
            ..Default::default()
        };
        assert!(matches!(
            spectral_function(&DqdParams::default(), 1e-9, &tight),
            Err(Error::Quadrature(_))
        ));
    }

    #[test]
    fn combined_measure_examples() {
        let (d0, d) = combined_measures(0.1, 0.0);
        assert_abs_diff_eq!(d0, 0.1);
        assert_abs_diff_eq!(d, 0.016_937_5, epsilon = 1e-15);
        let (d0, d) = combined_measures(0.0, 0.1);
        assert_abs_diff_eq!(d0, 0.1);
        assert_abs_diff_eq!(d, 0.081, epsilon = 1e-15);
    }

    #[test]
    fn config_round_trip() {
        let cfg = DqdConfig::default();
        let back = DqdConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
        let p = cfg.to_params().unwrap();
        let again = p.to_config().to_params().unwrap();
        assert_relative_eq!(again.xi, p.xi, max_relative = 1e-15);
        assert_relative_eq!(
            relaxation_rate(&again),
            relaxation_rate(&p),
            max_relative = 1e-12
        );
        assert!(DqdConfig::from_json(r#"{"xi_eV": 1.0, "bogus": 2}"#).is_err());
        let partial = DqdConfig::from_json(r#"{"k_per_m": 2e8}"#).unwrap();
        assert_eq!(partial.k_per_m, 2e8);
        assert_eq!(partial.l_nm, 50.0);
        let bad = DqdConfig {
            a_nm: -1.0,
            ..Default::default()
        };
        assert!(bad.to_params().is_err());
    }

    #[test]
    fn probabilities_at_zero_time() {
        let p = DqdParams::default();
        let pr = dqd_error_probs(&p, 0.0, 68, &QuadratureConfig::default()).unwrap();
        assert_eq!((pr.p1, pr.p2, pr.clamped), (0.0, 0.0, false));
        assert!(dqd_error_probs(&p, 0.0, 0, &QuadratureConfig::default()).is_err());
    }
}
