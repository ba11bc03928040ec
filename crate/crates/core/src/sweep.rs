//! Parameter sweeps over accelerations with CSV output.
//!
//! Points are evaluated by a parallel map and written in grid order, so the
//! output does not depend on the number of threads.

use std::f64::consts::LN_2;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::channel::{
    assemble_channel, assemble_vacuum_sigma, channel_elements, mode_overlap_alpha,
    vacuum_channel_elements, AccelerationConfig, ChannelElements,
};
use crate::config::{PartitionChoice, SweepConfig, SweepKind};
use crate::entanglement::{bell_negativity, bell_negativity_truncated, vacuum_negativity, Bipartition};
use crate::error::{Error, Result};
use crate::gaussian::CovarianceMatrix;
use crate::modes::{inner_product, Species, SpinorMode, Wedge};

/// Default acceleration of the mode-profile output when none is fixed.
pub const MODES_DEFAULT_ACCEL: f64 = 0.1;

fn fmt_sci(v: f64) -> String {
    format!("{v:.16e}")
}

/// One grid point of the vacuum sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct VacuumPoint {
    pub elements: ChannelElements,
    pub negativity: f64,
    pub negativity_error: f64,
    /// Largest |eig(iσ)| of the transformed vacuum.
    pub max_eigenvalue: f64,
}

/// One grid point of the Bell sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct BellPoint {
    pub elements: ChannelElements,
    pub negativity: f64,
    pub normalized: f64,
    /// Truncated-block bound minus full-channel bound.
    pub truncation_difference: f64,
    pub negativity_error: f64,
    pub max_eigenvalue: f64,
}

/// Sweep row: the accelerations and the outcome at that point.
#[derive(Clone, Debug, PartialEq)]
pub struct Row<T> {
    pub accel_i: f64,
    pub accel_ii: f64,
    pub outcome: std::result::Result<T, String>,
}

fn bipartition(choice: PartitionChoice) -> Bipartition {
    match choice {
        PartitionChoice::Default => Bipartition::vacuum_default(),
        PartitionChoice::Mirrored => Bipartition::vacuum_mirrored(),
    }
}

pub fn vacuum_point(cfg: &AccelerationConfig, partition: PartitionChoice) -> Result<VacuumPoint> {
    let elements = vacuum_channel_elements(cfg)?;
    let sigma = assemble_vacuum_sigma(&elements);
    let negativity = vacuum_negativity(&elements, &bipartition(partition))?;
    Ok(VacuumPoint {
        negativity,
        // The bound is within a factor of order one linear in the elements.
        negativity_error: 2.0 * elements.error,
        max_eigenvalue: sigma.max_singular_value(),
        elements,
    })
}

pub fn bell_point(cfg: &AccelerationConfig, unit_overlap: bool) -> Result<BellPoint> {
    let elements = if unit_overlap {
        let one = Complex64::new(1.0, 0.0);
        vacuum_channel_elements(cfg)?.with_overlaps(one, one)
    } else {
        channel_elements(cfg)?
    };
    let out = assemble_channel(&elements).apply(&CovarianceMatrix::bell_canonical())?;
    let negativity = bell_negativity(&out)?;
    let truncated = bell_negativity_truncated(&elements)?;
    Ok(BellPoint {
        negativity,
        normalized: negativity / LN_2,
        truncation_difference: truncated - negativity,
        negativity_error: 4.0 * elements.error,
        max_eigenvalue: out.max_singular_value(),
        elements,
    })
}

/// Acceleration pairs visited by a sweep, in output order.
pub fn sweep_points(cfg: &SweepConfig) -> Vec<(f64, f64)> {
    let grid = cfg.accel_grid();
    match (cfg.accel_i, cfg.accel_ii) {
        (Some(a), Some(b)) => vec![(a, b)],
        (Some(a), None) => grid.iter().map(|&b| (a, b)).collect(),
        (None, Some(b)) => grid.iter().map(|&a| (a, b)).collect(),
        (None, None) if cfg.diagonal || cfg.kind == SweepKind::Bell => {
            grid.iter().map(|&a| (a, a)).collect()
        }
        (None, None) => grid
            .iter()
            .flat_map(|&a| grid.iter().map(move |&b| (a, b)))
            .collect(),
    }
}

fn run_parallel<T, F>(cfg: &SweepConfig, f: F) -> Result<Vec<Row<T>>>
where
    T: Send,
    F: Fn(&AccelerationConfig) -> Result<T> + Sync,
{
    let points = sweep_points(cfg);
    let work = || {
        points
            .par_iter()
            .map(|&(a, b)| Row {
                accel_i: a,
                accel_ii: b,
                outcome: f(&cfg.point(a, b)).map_err(|e| e.to_string()),
            })
            .collect()
    };
    match cfg.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(work))
        }
        None => Ok(work()),
    }
}

pub fn vacuum_rows(cfg: &SweepConfig) -> Result<Vec<Row<VacuumPoint>>> {
    cfg.validate()?;
    run_parallel(cfg, |p| vacuum_point(p, cfg.partition))
}

pub fn bell_rows(cfg: &SweepConfig) -> Result<Vec<Row<BellPoint>>> {
    cfg.validate()?;
    run_parallel(cfg, |p| bell_point(p, cfg.unit_overlap))
}

/// Whether `values` strictly increases, ignoring steps smaller than the
/// combined error of the two neighbours.
pub fn strictly_monotone(values: &[(f64, f64)], increasing: bool) -> bool {
    values.windows(2).all(|w| {
        let (a, ea) = w[0];
        let (b, eb) = w[1];
        let step = if increasing { b - a } else { a - b };
        step > 0.0 || step.abs() <= ea + eb
    })
}

fn header(cfg: &SweepConfig, warnings: &[String]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# rindler-gauss {}", env!("CARGO_PKG_VERSION"));
    for line in cfg.provenance() {
        let _ = writeln!(out, "# {line}");
    }
    for w in warnings {
        let _ = writeln!(out, "# warning: {w}");
    }
    out
}

fn status<T>(outcome: &std::result::Result<T, String>, converged: impl Fn(&T) -> bool) -> String {
    match outcome {
        Ok(v) if converged(v) => "ok".into(),
        Ok(_) => "unconverged".into(),
        Err(e) => format!("error: {}", e.replace([',', '\n'], ";")),
    }
}

pub fn vacuum_csv(cfg: &SweepConfig, rows: &[Row<VacuumPoint>]) -> String {
    let mut out = header(cfg, &cfg.warnings());
    out.push_str(
        "index,accel_i,accel_ii,chart_accel,n_i,n_ii,deficit_i,deficit_ii,cross_re,cross_im,cross_bound,negativity,negativity_error,element_error,max_eigenvalue,status\n",
    );
    for (k, row) in rows.iter().enumerate() {
        let chart = cfg.point(row.accel_i, row.accel_ii).chart();
        let mut fields = vec![k.to_string(), fmt_sci(row.accel_i), fmt_sci(row.accel_ii), fmt_sci(chart)];
        match &row.outcome {
            Ok(p) => {
                let e = &p.elements;
                let cross = match cfg.partition {
                    PartitionChoice::Default => e.cross_plus,
                    PartitionChoice::Mirrored => e.cross_minus,
                };
                fields.extend(
                    [
                        e.n_i_plus,
                        e.n_ii_plus,
                        e.deficit_i,
                        e.deficit_ii,
                        cross.re,
                        cross.im,
                        e.cross_bound,
                        p.negativity,
                        p.negativity_error,
                        e.error,
                        p.max_eigenvalue,
                    ]
                    .map(fmt_sci),
                );
            }
            Err(_) => fields.extend(std::iter::repeat_n(fmt_sci(f64::NAN), 11)),
        }
        fields.push(status(&row.outcome, |p| p.elements.converged));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    let diagonal: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.accel_i == r.accel_ii)
        .filter_map(|r| r.outcome.as_ref().ok())
        .map(|p| (p.negativity, p.negativity_error))
        .collect();
    if diagonal.len() >= 2 {
        let _ = writeln!(
            out,
            "# diagonal_monotone_increasing = {}",
            strictly_monotone(&diagonal, true)
        );
    }
    out
}

pub fn bell_csv(cfg: &SweepConfig, rows: &[Row<BellPoint>]) -> String {
    let mut out = header(cfg, &cfg.warnings());
    out.push_str(
        "index,accel_i,accel_ii,alpha_i_re,alpha_i_im,alpha_ii_re,alpha_ii_im,negativity,normalized,truncation_difference,negativity_error,max_eigenvalue,status\n",
    );
    for (k, row) in rows.iter().enumerate() {
        let mut fields = vec![k.to_string(), fmt_sci(row.accel_i), fmt_sci(row.accel_ii)];
        match &row.outcome {
            Ok(p) => {
                let e = &p.elements;
                fields.extend(
                    [
                        e.alpha_i_plus.re,
                        e.alpha_i_plus.im,
                        e.alpha_ii_plus.re,
                        e.alpha_ii_plus.im,
                        p.negativity,
                        p.normalized,
                        p.truncation_difference,
                        p.negativity_error,
                        p.max_eigenvalue,
                    ]
                    .map(fmt_sci),
                );
            }
            Err(_) => fields.extend(std::iter::repeat_n(fmt_sci(f64::NAN), 9)),
        }
        fields.push(status(&row.outcome, |p| p.elements.converged));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    let values: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.outcome.as_ref().ok())
        .map(|p| (p.normalized, p.negativity_error / LN_2))
        .collect();
    let complete = values.len() == rows.len();
    let _ = writeln!(
        out,
        "# monotone_decreasing = {}",
        complete && strictly_monotone(&values, false)
    );
    out
}

/// Radial profiles of the wedge I Rindler and Minkowski particle packets.
pub fn modes_csv(cfg: &SweepConfig) -> Result<String> {
    cfg.validate()?;
    let accel = cfg.accel_i.unwrap_or(MODES_DEFAULT_ACCEL);
    let point = cfg.point(accel, cfg.accel_ii.unwrap_or(accel));
    let spec = point.quadrature;
    let psi = SpinorMode::rindler_packet(&point.rindler_params(Wedge::I), Wedge::I, Species::Particle, &spec)?;
    let phi = SpinorMode::minkowski_packet(
        &point.minkowski_params(Wedge::I)?,
        Wedge::I,
        Species::Particle,
        &spec,
    )?;
    let alpha = mode_overlap_alpha(&point, Wedge::I, Species::Particle)?;
    let norm_psi = inner_product(&psi, &psi, &spec)?.value.re;
    let norm_phi = inner_product(&phi, &phi, &spec)?.value.re;

    let mut out = header(cfg, &point.warnings());
    let _ = writeln!(out, "# accel = {accel:e}");
    let _ = writeln!(out, "# packet_order = {:e}", point.rindler_params(Wedge::I).order);
    let _ = writeln!(out, "# wavenumber = {:e}", point.minkowski_params(Wedge::I)?.wavenumber);
    let _ = writeln!(out, "# overlap = {} {}", fmt_sci(alpha.value.re), fmt_sci(alpha.value.im));
    let _ = writeln!(out, "# norm_rindler = {}", fmt_sci(norm_psi));
    let _ = writeln!(out, "# norm_minkowski = {}", fmt_sci(norm_phi));
    out.push_str(
        "r,rindler_up_re,rindler_up_im,rindler_down_re,rindler_down_im,minkowski_up_re,minkowski_up_im,minkowski_down_re,minkowski_down_im,rindler_density,minkowski_density\n",
    );
    let (lo_a, hi_a) = psi.support();
    let (lo_b, hi_b) = phi.support();
    let (lo, hi) = (lo_a.min(lo_b), hi_a.max(hi_b));
    for k in 0..cfg.samples {
        let r = lo + (hi - lo) * k as f64 / (cfg.samples - 1) as f64;
        let p = psi.evaluate(r)?;
        let q = phi.evaluate(r)?;
        let density = |s: [Complex64; 2]| s[0].norm_sqr() + s[1].norm_sqr();
        let fields = [
            r, p[0].re, p[0].im, p[1].re, p[1].im, q[0].re, q[0].im, q[1].re, q[1].im,
            density(p), density(q),
        ]
        .map(fmt_sci);
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Largest relative change of the reported bounds when every quadrature
/// tolerance is halved.
pub fn tolerance_self_test(cfg: &SweepConfig) -> Result<f64> {
    let values = |c: &SweepConfig| -> Result<Vec<f64>> {
        match c.kind {
            SweepKind::Vacuum => vacuum_rows(c)?
                .into_iter()
                .map(|r| r.outcome.map(|p| p.negativity).map_err(Error::NonConvergence))
                .collect(),
            SweepKind::Bell => bell_rows(c)?
                .into_iter()
                .map(|r| r.outcome.map(|p| p.negativity).map_err(Error::NonConvergence))
                .collect(),
            SweepKind::Modes => Err(Error::Unsupported("self test applies to sweeps".into())),
        }
    };
    let base = values(cfg)?;
    let halved = values(&cfg.halved_tolerances())?;
    Ok(base
        .iter()
        .zip(&halved)
        .map(|(a, b)| if a == b { 0.0 } else { (a - b).abs() / a.abs().max(b.abs()) })
        .fold(0.0, f64::max))
}

/// Python script plotting the CSV written for `kind`.
pub fn plot_script(kind: SweepKind, csv: &Path) -> String {
    let body = match kind {
        SweepKind::Vacuum => {
            r#"diag = data[data["accel_i"] == data["accel_ii"]]
if len(diag) == len(data):
    plt.semilogy(diag["accel_i"], diag["negativity"], "o-")
    plt.xlabel("proper acceleration")
    plt.ylabel("negativity bound")
else:
    a = np.unique(data["accel_i"])
    b = np.unique(data["accel_ii"])
    z = data["negativity"].reshape(len(a), len(b))
    plt.pcolormesh(b, a, z, shading="auto")
    plt.colorbar(label="negativity bound")
    plt.xlabel("acceleration II")
    plt.ylabel("acceleration I")
"#
        }
        SweepKind::Bell => {
            r#"plt.plot(data["accel_i"], data["normalized"], "o-")
plt.xlabel("proper acceleration")
plt.ylabel("negativity bound / ln 2")
"#
        }
        SweepKind::Modes => {
            r#"plt.plot(data["r"], data["rindler_density"], label="Rindler packet")
plt.plot(data["r"], data["minkowski_density"], "--", label="Minkowski packet")
plt.xlabel("distance from the horizon")
plt.ylabel("density")
plt.legend()
"#
        }
    };
    let csv_name = csv.file_name().map_or_else(
        || csv.display().to_string(),
        |n| n.to_string_lossy().into_owned(),
    );
    format!(
        r##"#!/usr/bin/env python3
import os
import matplotlib.pyplot as plt
import numpy as np

here = os.path.dirname(os.path.abspath(__file__))
data = np.genfromtxt(os.path.join(here, "{csv_name}"), delimiter=",", names=True, comments="#", dtype=None, encoding=None)
{body}plt.tight_layout()
plt.savefig(os.path.join(here, "{csv_name}.png"), dpi=150)
"##
    )
}

/// Path of the plot script written next to `csv`.
pub fn plot_script_path(csv: &Path) -> PathBuf {
    let mut name = csv.file_name().unwrap_or_default().to_os_string();
    name.push(".plot.py");
    csv.with_file_name(name)
}

/// Output of one command: CSV text plus the summary used for the exit code.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepOutput {
    pub csv: String,
    pub failed_points: usize,
    pub self_test_change: Option<f64>,
}

pub fn run(cfg: &SweepConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let (csv, failed_points) = match cfg.kind {
        SweepKind::Vacuum => {
            let rows = vacuum_rows(cfg)?;
            let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
            (vacuum_csv(cfg, &rows), failed)
        }
        SweepKind::Bell => {
            let rows = bell_rows(cfg)?;
            let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
            (bell_csv(cfg, &rows), failed)
        }
        SweepKind::Modes => (modes_csv(cfg)?, 0),
    };
    let self_test_change = if cfg.self_test && cfg.kind != SweepKind::Modes {
        Some(tolerance_self_test(cfg)?)
    } else {
        None
    };
    let csv = match self_test_change {
        Some(change) => format!("{csv}# self_test_max_relative_change = {change:e}\n"),
        None => csv,
    };
    Ok(SweepOutput {
        csv,
        failed_points,
        self_test_change,
    })
}

/// Runs the command and writes the CSV (and plot script) to disk or stdout.
pub fn run_and_write(cfg: &SweepConfig) -> Result<SweepOutput> {
    let output = run(cfg)?;
    match &cfg.output {
        Some(path) => {
            std::fs::write(path, &output.csv)?;
            if cfg.emit_plot_script {
                std::fs::write(plot_script_path(path), plot_script(cfg.kind, path))?;
            }
        }
        None => print!("{}", output.csv),
    }
    Ok(output)
}
