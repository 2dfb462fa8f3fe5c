//! Reduction sweep over orders, dominant splits and methods.
//!
//! Files written to the output directory:
//! * `table1.csv`: one row per `r`, the W-IRKA weighted-H2 error of each
//!   `ν/ϖ` split. With the default splits, column `varpi=j` holds
//!   `ν = r − j` and rows have exactly `r + 1` entries. A split that would
//!   break a conjugate pair takes the whole pair, so the reduced order can
//!   exceed `r`; `splits.csv` records the order actually obtained.
//! * `splits.csv`: the same cells in long format with diagnostics.
//! * `comparison.csv`: one row per (method, r) with weighted H2 error,
//!   weighted H∞ grid estimate and relative unweighted H∞ grid estimate.
//! * `table2_weighted_hinf.csv`, `table2_weighted_h2.csv`,
//!   `table3_unweighted_hinf_rel.csv`: the comparison pivoted to one row
//!   per method and one column per `r`.

use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;
use wh2_core::baselines::{balanced_truncation, fwbt, hinf_grid_estimate, log_grid};
use wh2_core::lti::{feedback_connect, Difference, PoleResidueForm, StateSpace};
use wh2_core::reduce::{irka, wirka, Reduction, WirkaConfig};
use wh2_core::wh2::{weighted_error, weighted_error_quad};

use crate::args::{Method, SweepArgs};
use crate::commands::default_span;
use crate::{benchmark_g, benchmark_w, csv_float, read_system, write_text, CliError, CliResult};

/// Grid density of the H∞ estimate.
pub const HINF_POINTS_PER_DECADE: usize = 2000;
const QUAD_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CellKind {
    Split { nu: usize, varpi: usize },
    Compare(Method),
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    r: usize,
    kind: CellKind,
}

#[derive(Debug, Clone, Default)]
struct Outcome {
    weighted_h2: f64,
    error_path: String,
    hinf: f64,
    unweighted_hinf_rel: f64,
    stable: bool,
    converged: bool,
    iterations: usize,
    reduced_order: usize,
    mirror_events: usize,
    rank_truncations: usize,
    closed_loop_stable: Option<bool>,
    failure: Option<String>,
}

impl Outcome {
    fn failed(msg: String) -> Self {
        Outcome {
            weighted_h2: f64::NAN,
            error_path: "failed".into(),
            hinf: f64::NAN,
            unweighted_hinf_rel: f64::NAN,
            failure: Some(msg),
            ..Default::default()
        }
    }
}

struct Problem {
    g: StateSpace,
    w: StateSpace,
    gp: PoleResidueForm,
    wp: PoleResidueForm,
    plant: Option<StateSpace>,
    grid: Vec<f64>,
    g_hinf: f64,
    tol: f64,
    max_iter: usize,
}

fn iterative(out: wh2_core::Result<Reduction>) -> wh2_core::Result<Reduction> {
    match out {
        Err(wh2_core::Error::NotConverged { best: Some(b), .. }) => Ok(*b),
        other => other,
    }
}

fn reduce_cell(p: &Problem, cell: Cell) -> wh2_core::Result<(StateSpace, Outcome)> {
    let mut o = Outcome {
        converged: true,
        ..Default::default()
    };
    let take = |red: Reduction, o: &mut Outcome| {
        o.converged = red.report.converged;
        o.iterations = red.report.iterations;
        o.mirror_events = red.report.mirror_events.len();
        o.rank_truncations = red.report.rank_truncations.len();
        red.reduced
    };
    let reduced = match cell.kind {
        CellKind::Split { nu, varpi } => {
            let cfg = WirkaConfig::new(nu, varpi)
                .with_tol(p.tol)
                .with_max_iter(p.max_iter)
                .with_quad_tol(None);
            take(iterative(wirka(&p.g, &p.w, &cfg))?, &mut o)
        }
        CellKind::Compare(Method::Wirka) => unreachable!("mapped to a split cell by evaluate"),
        CellKind::Compare(Method::Irka) => take(iterative(irka(&p.g, cell.r, p.tol, p.max_iter))?, &mut o),
        CellKind::Compare(Method::Bt) => balanced_truncation(&p.g, cell.r)?.reduced,
        CellKind::Compare(Method::Fwbt) => fwbt(&p.g, &p.w, cell.r)?.reduced,
    };
    Ok((reduced, o))
}

fn evaluate(p: &Problem, cell: Cell, nu_cmp: usize) -> Outcome {
    let cell = match cell.kind {
        // The comparison W-IRKA run is an ordinary split cell.
        CellKind::Compare(Method::Wirka) => {
            let nu = nu_cmp.min(cell.r);
            Cell {
                r: cell.r,
                kind: CellKind::Split { nu, varpi: cell.r - nu },
            }
        }
        _ => cell,
    };
    let run = || -> wh2_core::Result<Outcome> {
        let (reduced, mut o) = reduce_cell(p, cell)?;
        let rp = reduced.pole_residue()?;
        o.reduced_order = reduced.order();
        o.stable = rp.is_stable();
        match cell.kind {
            CellKind::Split { .. } if o.stable => {
                let e = weighted_error(&p.gp, &rp, &p.wp, QUAD_TOL)?;
                o.weighted_h2 = e.value();
                o.error_path = format!("{:?}", e.path).to_lowercase();
            }
            _ => {
                o.weighted_h2 = weighted_error_quad(&p.gp, &rp, &p.wp, QUAD_TOL)?;
                o.error_path = "quadrature".into();
            }
        }
        let one = PoleResidueForm::constant(1.0);
        let diff = Difference(&p.gp, &rp);
        o.hinf = hinf_grid_estimate(&diff, &p.wp, &p.grid)?;
        o.unweighted_hinf_rel = hinf_grid_estimate(&diff, &one, &p.grid)? / p.g_hinf;
        if let Some(plant) = &p.plant {
            o.closed_loop_stable = Some(feedback_connect(plant, &reduced)?.is_stable()?);
        }
        Ok(o)
    };
    run().unwrap_or_else(|e| Outcome::failed(e.to_string()))
}

fn load(a: &SweepArgs) -> CliResult<(StateSpace, StateSpace)> {
    let g = match &a.g {
        Some(p) => read_system(p)?,
        None => benchmark_g(a.bench.order, a.bench.seed)?,
    };
    let w = match (&a.w, &a.g) {
        (Some(p), _) => read_system(p)?,
        (None, None) => benchmark_w(a.bench.weight_order, a.bench.seed)?,
        (None, Some(_)) => StateSpace::constant(1.0),
    };
    Ok((g, w))
}

/// Cells in output order: all split cells by `r`, then comparison cells
/// by method and `r`.
fn cells(a: &SweepArgs) -> Vec<Cell> {
    let mut out = Vec::new();
    for &r in &a.r {
        let nus: Vec<usize> = match &a.splits {
            Some(s) => s.clone(),
            None => (0..=r).rev().collect(),
        };
        out.extend(nus.into_iter().map(|nu| Cell {
            r,
            kind: CellKind::Split { nu, varpi: r - nu },
        }));
    }
    for &m in &a.methods {
        out.extend(a.r.iter().map(|&r| Cell {
            r,
            kind: CellKind::Compare(m),
        }));
    }
    out
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

pub fn run(a: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let (g, w) = load(a)?;
    let n = g.order();
    if a.r.is_empty() {
        return Err(CliError::Input("empty r list".into()));
    }
    if let Some(&r) = a.r.iter().find(|&&r| r == 0 || r >= n) {
        return Err(CliError::Input(format!("r = {r} must satisfy 0 < r < n = {n}")));
    }
    if let Some(s) = &a.splits {
        let rmin = *a.r.iter().min().expect("nonempty");
        if let Some(nu) = s.iter().find(|&&nu| nu > rmin) {
            return Err(CliError::Input(format!("split nu = {nu} exceeds r = {rmin}")));
        }
    }
    let plant = a.plant.as_deref().map(read_system).transpose()?;
    let gp = g.pole_residue()?;
    let wp = w.pole_residue()?;
    let poles: Vec<_> = gp.poles().into_iter().chain(wp.poles()).collect();
    let (lo, hi) = default_span(&poles);
    let grid = log_grid(lo, hi, HINF_POINTS_PER_DECADE);
    let g_hinf = hinf_grid_estimate(&gp, &PoleResidueForm::constant(1.0), &grid)?;
    let problem = Problem {
        g,
        w,
        gp,
        wp,
        plant,
        grid,
        g_hinf,
        tol: a.tol,
        max_iter: a.max_iter,
    };

    let cells = cells(a);
    let results: Vec<Outcome> = cells.par_iter().map(|&c| evaluate(&problem, c, a.nu)).collect();

    std::fs::create_dir_all(&a.out_dir)?;
    let mut failures = 0;
    for (c, o) in cells.iter().zip(&results) {
        if let Some(f) = &o.failure {
            failures += 1;
            writeln!(err, "cell r={} {:?}: {f}", c.r, c.kind)?;
        }
    }

    // Split tables.
    let width =
        a.r.iter()
            .map(|&r| a.splits.as_ref().map_or(r + 1, |s| s.len()))
            .max()
            .unwrap_or(0);
    let mut t1 = String::from("r");
    match &a.splits {
        None => (0..width).for_each(|j| {
            let _ = write!(t1, ",varpi={j}");
        }),
        Some(s) => s.iter().for_each(|nu| {
            let _ = write!(t1, ",nu={nu}");
        }),
    }
    t1.push('\n');
    let mut long = String::from(
        "r,nu,varpi,reduced_order,weighted_h2,error_path,converged,iterations,mirror_events,rank_truncations\n",
    );
    for &r in &a.r {
        let _ = write!(t1, "{r}");
        for (c, o) in cells.iter().zip(&results) {
            if let (true, CellKind::Split { nu, varpi }) = (c.r == r, c.kind) {
                let _ = write!(t1, ",{}", csv_float(o.weighted_h2));
                let _ = writeln!(
                    long,
                    "{r},{nu},{varpi},{},{},{},{},{},{},{}",
                    o.reduced_order,
                    csv_float(o.weighted_h2),
                    o.error_path,
                    flag(o.converged),
                    o.iterations,
                    o.mirror_events,
                    o.rank_truncations
                );
            }
        }
        t1.push('\n');
    }

    // Method comparison.
    let mut cmp = String::from(
        "method,r,reduced_order,weighted_h2,hinf_grid_estimate,unweighted_hinf_rel,reduced_stable,converged,iterations",
    );
    if problem.plant.is_some() {
        cmp.push_str(",closed_loop_stable");
    }
    cmp.push('\n');
    type Pick = fn(&Outcome) -> f64;
    let pivots: [(&str, Pick); 3] = [
        ("table2_weighted_hinf.csv", |o| o.hinf),
        ("table2_weighted_h2.csv", |o| o.weighted_h2),
        ("table3_unweighted_hinf_rel.csv", |o| o.unweighted_hinf_rel),
    ];
    let mut wide: Vec<String> = pivots
        .iter()
        .map(|_| {
            let mut h = String::from("method");
            a.r.iter().for_each(|r| {
                let _ = write!(h, ",r={r}");
            });
            h.push('\n');
            h
        })
        .collect();
    for &m in &a.methods {
        for t in wide.iter_mut() {
            t.push_str(m.name());
        }
        for (c, o) in cells.iter().zip(&results) {
            if c.kind != CellKind::Compare(m) {
                continue;
            }
            let _ = write!(
                cmp,
                "{},{},{},{},{},{},{},{},{}",
                m.name(),
                c.r,
                o.reduced_order,
                csv_float(o.weighted_h2),
                csv_float(o.hinf),
                csv_float(o.unweighted_hinf_rel),
                flag(o.stable),
                flag(o.converged),
                o.iterations
            );
            if let Some(cl) = o.closed_loop_stable {
                let _ = write!(cmp, ",{}", flag(cl));
            }
            cmp.push('\n');
            for (t, (_, pick)) in wide.iter_mut().zip(&pivots) {
                let _ = write!(t, ",{}", csv_float(pick(o)));
            }
        }
        for t in wide.iter_mut() {
            t.push('\n');
        }
    }

    write_text(&a.out_dir.join("table1.csv"), &t1)?;
    write_text(&a.out_dir.join("splits.csv"), &long)?;
    write_text(&a.out_dir.join("comparison.csv"), &cmp)?;
    for (t, (name, _)) in wide.iter().zip(&pivots) {
        write_text(&a.out_dir.join(name), t)?;
    }
    writeln!(out, "{} cells written to {}", cells.len(), a.out_dir.display())?;
    if failures > 0 {
        return Err(CliError::CellFailures(failures));
    }
    Ok(())
}
