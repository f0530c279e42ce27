use std::fmt::Write;
use std::path::PathBuf;

use decom_core::codes::CodeName;
use decom_core::decoherence::{
    measure_diagonal, measure_general, measure_quadratic, DEFAULT_GRID_DENSITY,
    DEFAULT_REFINE_ITERS,
};
use decom_core::dqd::{dqd_decoherence, DqdConfig, QuadratureConfig};
use decom_core::noise::pauli_chi_unchecked;
use decom_core::sweep::fit_code;
use decom_core::{chi_to_choi, from_calibrated_p, kraus_to_chi, verify_cptp, BreakEven, NoiseKind};
use rayon::prelude::*;

use crate::error::CliError;
use crate::table::{num, Table};

/// Text produced by a command plus an optional failure to report after it
/// has been written out.
pub struct Report {
    pub text: String,
    pub status: Result<(), CliError>,
}

impl Report {
    fn ok(text: String) -> Self {
        Self {
            text,
            status: Ok(()),
        }
    }
}

pub fn channel(kind: NoiseKind, p: f64) -> Result<Report, CliError> {
    let (lo, hi) = kind.calibrated_range();
    let in_range = (lo..=hi).contains(&p);
    let chi = if in_range {
        kraus_to_chi(&from_calibrated_p(kind, p)?)?
    } else {
        // Pauli channels can still be written down outside the physical range.
        pauli_chi_unchecked(kind, p)
            .ok_or_else(|| CliError::Range(format!("p = {p} is outside [{lo}, {hi}] for {kind}")))?
    };

    let mut s = String::new();
    let _ = writeln!(s, "channel: {kind}");
    let _ = writeln!(s, "p: {p}");
    if in_range {
        let _ = writeln!(
            s,
            "native parameter {}: {}",
            kind.native_name(),
            kind.native_from_calibrated(p)
        );
    } else {
        let _ = writeln!(s, "range: p outside [{lo}, {hi}]");
    }
    for (label, part) in [("real", 0), ("imaginary", 1)] {
        let _ = writeln!(s, "chi ({label} part):");
        for a in 0..4 {
            let row: Vec<String> = (0..4)
                .map(|b| {
                    let z = chi.entry(a, b);
                    format!("{:>20}", num(if part == 0 { z.re } else { z.im }))
                })
                .collect();
            let _ = writeln!(s, "  {}", row.join(""));
        }
    }
    let ev: Vec<String> = chi_to_choi(&chi)
        .eigenvalues()
        .into_iter()
        .map(num)
        .collect();
    let _ = writeln!(s, "tau eigenvalues: {}", ev.join(", "));

    let methods: [(&str, decom_core::Result<f64>); 3] = [
        ("diagonal", measure_diagonal(&chi)),
        ("quadratic", measure_quadratic(&chi)),
        (
            "general",
            measure_general(&chi, DEFAULT_GRID_DENSITY, DEFAULT_REFINE_ITERS),
        ),
    ];
    for (name, value) in methods {
        match value {
            Ok(d) => _ = writeln!(s, "D ({name}): {}", num(d)),
            Err(e) => _ = writeln!(s, "D ({name}): not applicable ({e})"),
        }
    }

    let report = verify_cptp(&chi);
    if report.is_cptp() {
        let _ = writeln!(s, "CPTP: ok");
    } else {
        let _ = writeln!(
            s,
            "CPTP: VIOLATED (trace preserving: {}, completely positive: {}, min tau eigenvalue {})",
            report.trace_preserving,
            report.completely_positive,
            num(report.min_eigenvalue)
        );
    }
    let status = if !in_range {
        Err(CliError::Range(format!(
            "p = {p} is outside [{lo}, {hi}] for {kind}"
        )))
    } else if !report.is_cptp() {
        Err(CliError::Range("channel is not CPTP".into()))
    } else {
        Ok(())
    };
    Ok(Report { text: s, status })
}

/// `steps` points from `lo` to `hi` inclusive.
pub fn grid(lo: f64, hi: f64, steps: usize, log: bool) -> Result<Vec<f64>, CliError> {
    if steps == 0 {
        return Err(CliError::Config("--steps must be at least 1".into()));
    }
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(CliError::Config(format!("empty range [{lo}, {hi}]")));
    }
    if log && lo <= 0.0 {
        return Err(CliError::Config(
            "log spacing needs a positive lower bound".into(),
        ));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    let f = |i: usize| i as f64 / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if log {
                lo * (hi / lo).powf(f(i))
            } else {
                lo + (hi - lo) * f(i)
            }
        })
        .collect())
}

pub fn sweep(code: CodeName, kind: NoiseKind, ps: &[f64]) -> Result<Table, CliError> {
    let result = decom_core::sweep(&code.build()?, kind, ps)?;
    let mut table = Table::new(&["p", "D0", "D_corrected"]);
    table.rows = result
        .samples
        .iter()
        .map(|s| vec![num(s.p), num(s.d0), num(s.d)])
        .collect();
    Ok(table)
}

pub fn fit(code: CodeName, kind: NoiseKind) -> Result<Report, CliError> {
    let report = fit_code(&code.build()?, kind)?;
    let mut s = String::new();
    let _ = writeln!(s, "code: {code}");
    let _ = writeln!(s, "channel: {kind}");
    let sample_ps: Vec<String> = report
        .sweep
        .samples
        .iter()
        .map(|x| format!("{}", x.p))
        .collect();
    let _ = writeln!(s, "samples: {}", sample_ps.join(", "));
    for (i, a) in report.fit.coeffs.alphas().iter().enumerate() {
        let _ = writeln!(s, "alpha{}={}", i + 1, num(*a));
    }
    let _ = writeln!(s, "residual={}", num(report.fit.residual));
    let _ = writeln!(s, "condition={}", num(report.fit.condition));
    match report.break_even {
        BreakEven::At(p) => _ = writeln!(s, "break_even={}", num(p)),
        BreakEven::Never => _ = writeln!(s, "break_even=none"),
        BreakEven::Everywhere => _ = writeln!(s, "break_even=all"),
    }
    Ok(Report::ok(s))
}

pub fn dqd(params: Option<&PathBuf>, n_ops: u32, ts: &[f64]) -> Result<Table, CliError> {
    let cfg = match params {
        Some(path) => DqdConfig::from_json(&std::fs::read_to_string(path)?)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?,
        None => DqdConfig::default(),
    };
    let p = cfg
        .to_params()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let quad = QuadratureConfig::default();
    let points = ts
        .par_iter()
        .map(|&t| dqd_decoherence(&p, t, n_ops, &quad))
        .collect::<decom_core::Result<Vec<_>>>()?;
    let mut table = Table::new(&["t_s", "p1", "p2", "D0", "D", "clamped"]);
    table.rows = points
        .iter()
        .map(|pt| {
            vec![
                num(pt.t),
                num(pt.probs.p1),
                num(pt.probs.p2),
                num(pt.d0),
                num(pt.d),
                u8::from(pt.probs.clamped).to_string(),
            ]
        })
        .collect();
    Ok(table)
}
