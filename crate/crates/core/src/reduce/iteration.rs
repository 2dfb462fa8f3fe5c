use nalgebra::DMatrix;
use num_complex::Complex64;

use super::basis::{build_basis_v, build_basis_w, project, Basis, DeflationEvent, ReductionBases};
use super::dominance::{dominant_poles, DominanceMetric, SelectionAdjustment};
use super::shifts::{ShiftOrigin, ShiftSet};
use crate::error::{Error, Result};
use crate::lti::{PoleResidueForm, StateSpace};
use crate::wh2::{weighted_error, weighted_error_quad, weighted_norm, ErrorBreakdown, ErrorPath};

/// Handling of reduced poles in the closed right half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnstableShiftPolicy {
    /// Reflect the offending shift across the imaginary axis.
    #[default]
    Mirror,
    /// Stop with `UnstableReducedPencil`.
    Halt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WirkaConfig {
    pub r: usize,
    /// Number of mirrored dominant poles of `G` (ν).
    pub nu: usize,
    /// Number of mirrored dominant poles of `W` (ϖ).
    pub varpi: usize,
    /// Relative shift-change threshold.
    pub tol: f64,
    pub max_iter: usize,
    pub dominance_metric: DominanceMetric,
    pub unstable_shift_policy: UnstableShiftPolicy,
    /// Tolerance for the quadrature error in the report; `None` skips it.
    pub quad_tol: Option<f64>,
}

impl WirkaConfig {
    pub fn new(nu: usize, varpi: usize) -> Self {
        Self {
            r: nu + varpi,
            nu,
            varpi,
            tol: 1e-6,
            max_iter: 100,
            dominance_metric: DominanceMetric::default(),
            unstable_shift_policy: UnstableShiftPolicy::default(),
            quad_tol: Some(1e-8),
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_metric(mut self, metric: DominanceMetric) -> Self {
        self.dominance_metric = metric;
        self
    }

    pub fn with_policy(mut self, policy: UnstableShiftPolicy) -> Self {
        self.unstable_shift_policy = policy;
        self
    }

    pub fn with_quad_tol(mut self, quad_tol: Option<f64>) -> Self {
        self.quad_tol = quad_tol;
        self
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.r != self.nu + self.varpi {
            return Err(Error::InvalidConfig(format!(
                "r = {} but nu + varpi = {}",
                self.r,
                self.nu + self.varpi
            )));
        }
        if self.r == 0 || self.r > n {
            return Err(Error::InvalidConfig(format!("r = {} for order {n}", self.r)));
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::InvalidConfig(
                "tol must be positive and max_iter at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// A shift reflected because the reduced pencil had an unstable eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirrorEvent {
    pub iteration: usize,
    pub eigenvalue: Complex64,
}

/// Bases cut to a common rank after deflation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankTruncation {
    pub iteration: usize,
    pub from: (usize, usize),
    pub to: usize,
}

/// Convergence record of an IRKA-type iteration.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReductionReport {
    pub iterations: usize,
    /// Right shifts `σ`, starting with the initial set.
    pub shift_history: Vec<ShiftSet>,
    /// Left shifts of the final bases (frozen for W-IRKA).
    pub zeta: Option<ShiftSet>,
    pub converged: bool,
    /// Relative shift change of each iteration.
    pub changes: Vec<f64>,
    /// Worst relative interpolation residual of each intermediate
    /// projection, over its `σ` and `ζ`.
    pub iteration_interp_residuals: Vec<f64>,
    pub final_sigma_interp_residuals: Vec<f64>,
    pub frozen_zeta_interp_residuals: Vec<f64>,
    /// Derivative residuals at points shared by `σ` and `ζ`.
    pub hermite_residuals: Vec<f64>,
    pub weighted_error_expr_value: Option<f64>,
    pub weighted_error_path: Option<ErrorPath>,
    pub error_breakdown: Option<ErrorBreakdown>,
    pub weighted_error_quad_value: Option<f64>,
    /// `‖G‖_W²`.
    pub weighted_norm_sq: Option<f64>,
    pub deflation_events: Vec<DeflationEvent>,
    pub rank_truncations: Vec<RankTruncation>,
    pub mirror_events: Vec<MirrorEvent>,
    pub selection_adjustments: Vec<SelectionAdjustment>,
    /// Failures while computing the diagnostic error values.
    pub diagnostics: Vec<String>,
}

pub type WirkaReport = ReductionReport;

/// Reduced model with its report.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub reduced: StateSpace,
    pub report: ReductionReport,
}

fn rel_gap(a: Complex64, b: Complex64) -> f64 {
    let d = (a - b).norm();
    let s = a.norm();
    if s > 0.0 {
        d / s
    } else {
        d
    }
}

/// Relative residuals `|G(s) − G_r(s)|/|G(s)|`.
pub fn interpolation_residuals(g: &StateSpace, gr: &StateSpace, points: &[Complex64]) -> Result<Vec<f64>> {
    points
        .iter()
        .map(|&s| Ok(rel_gap(g.tf_eval(s)?, gr.tf_eval(s)?)))
        .collect()
}

/// Relative residuals `|G′(s) − G_r′(s)|/|G′(s)|`.
pub fn hermite_residuals(g: &StateSpace, gr: &StateSpace, points: &[Complex64]) -> Result<Vec<f64>> {
    points
        .iter()
        .map(|&s| Ok(rel_gap(g.tf_deriv(s)?, gr.tf_deriv(s)?)))
        .collect()
}

fn truncate(m: &DMatrix<f64>, r: usize) -> DMatrix<f64> {
    m.columns(0, r.min(m.ncols())).into_owned()
}

fn mirrored(poles: &[Complex64], origin: ShiftOrigin) -> (Vec<Complex64>, Vec<ShiftOrigin>) {
    (poles.iter().map(|p| -p).collect(), vec![origin; poles.len()])
}

/// Next shifts `−λ̂` from the reduced pencil, applying the policy to
/// unstable eigenvalues.
fn next_shifts(
    gr: &StateSpace,
    iteration: usize,
    policy: UnstableShiftPolicy,
    events: &mut Vec<MirrorEvent>,
) -> Result<ShiftSet> {
    let lam = gr.poles().map_err(|e| match e {
        Error::SingularE => Error::SingularReducedE,
        other => other,
    })?;
    let mut pts = Vec::with_capacity(lam.len());
    for l in lam {
        let mut s = -l;
        if l.re >= 0.0 {
            match policy {
                UnstableShiftPolicy::Halt => {
                    return Err(Error::UnstableReducedPencil {
                        iteration,
                        eigenvalue: l,
                    });
                }
                UnstableShiftPolicy::Mirror => {
                    events.push(MirrorEvent {
                        iteration,
                        eigenvalue: l,
                    });
                    s = Complex64::new(-s.re, s.im);
                }
            }
        }
        pts.push(s);
    }
    ShiftSet::uniform(pts, ShiftOrigin::Iterate)
}

struct ErrorInputs<'a> {
    g: &'a PoleResidueForm,
    w: &'a PoleResidueForm,
    quad_tol: Option<f64>,
}

fn fill_errors(report: &mut ReductionReport, reduced: &StateSpace, inputs: &ErrorInputs) {
    let g = inputs.g.without_feedthrough();
    match weighted_norm(&g, inputs.w) {
        Ok(n) => report.weighted_norm_sq = Some(n.radicand),
        Err(e) => report.diagnostics.push(format!("weighted norm: {e}")),
    }
    let gr = match reduced.pole_residue() {
        Ok(p) => p.without_feedthrough(),
        Err(e) => {
            report.diagnostics.push(format!("reduced pole-residue form: {e}"));
            return;
        }
    };
    let quad_tol = inputs.quad_tol.unwrap_or(1e-8);
    match weighted_error(&g, &gr, inputs.w, quad_tol) {
        Ok(v) => {
            report.weighted_error_expr_value = Some(v.value());
            report.weighted_error_path = Some(v.path);
            report.error_breakdown = v.breakdown;
            for f in v.fallbacks {
                report.diagnostics.push(format!("error expression fallback: {f}"));
            }
        }
        Err(e) => report.diagnostics.push(format!("error expression: {e}")),
    }
    if let Some(tol) = inputs.quad_tol {
        match weighted_error_quad(&g, &gr, inputs.w, tol) {
            Ok(v) => report.weighted_error_quad_value = Some(v),
            Err(e) => report.diagnostics.push(format!("quadrature error: {e}")),
        }
    }
}

fn check_stable(prf: &PoleResidueForm) -> Result<()> {
    if let Some(p) = prf
        .poles()
        .into_iter()
        .find(|p| p.re >= -1e-12 * prf.max_pole_magnitude())
    {
        return Err(Error::UnstablePencil(p));
    }
    Ok(())
}

/// Cuts `V` and `W` to their common rank, recording the event.
fn common_rank(v: &Basis, w: &Basis, iteration: usize, report: &mut ReductionReport) -> usize {
    let r = v.rank().min(w.rank());
    if v.rank() != w.rank() {
        report.rank_truncations.push(RankTruncation {
            iteration,
            from: (v.rank(), w.rank()),
            to: r,
        });
    }
    r
}

/// Weighted iterative rational Krylov algorithm. `W_r` is built once from
/// mirrored dominant poles of `G` and `W`; only `V_r` follows the mirrored
/// reduced poles.
pub fn wirka(g: &StateSpace, w: &StateSpace, config: &WirkaConfig) -> Result<Reduction> {
    config.validate(g.order())?;
    let gp = g.pole_residue()?;
    let wp = w.pole_residue()?;
    check_stable(&gp)?;
    check_stable(&wp)?;
    let mut report = ReductionReport::default();

    let sel_g = dominant_poles(&gp, config.nu, config.dominance_metric);
    let sel_w = dominant_poles(&wp, config.varpi, config.dominance_metric);
    report
        .selection_adjustments
        .extend(sel_g.adjustment.iter().chain(sel_w.adjustment.iter()).copied());
    let (mut zpts, mut ztags) = mirrored(&sel_g.poles, ShiftOrigin::MirroredGPole);
    let (wpts, wtags) = mirrored(&sel_w.poles, ShiftOrigin::MirroredWPole);
    zpts.extend(wpts);
    ztags.extend(wtags);
    let zeta = ShiftSet::new(zpts, ztags)?;

    let wb = build_basis_w(g, &zeta)?;
    report.deflation_events.extend(wb.deflations.iter().copied());
    let mut sigma = zeta.clone();
    let mut vb = build_basis_v(g, &sigma)?;
    report.deflation_events.extend(vb.deflations.iter().copied());
    let mut r = common_rank(&vb, &wb, 0, &mut report);
    let mut w_r = truncate(&wb.matrix, r);
    report.shift_history.push(sigma.clone());

    let mut best: Option<(f64, ShiftSet)> = None;
    let mut last_change = f64::INFINITY;
    for it in 1..=config.max_iter {
        let bases = ReductionBases::new(truncate(&vb.matrix, r), w_r.clone())?;
        let gr = project(g, &bases)?;
        let pts: Vec<Complex64> = sigma.points().iter().chain(zeta.points()).copied().collect();
        let worst = interpolation_residuals(g, &gr, &pts)?.into_iter().fold(0.0, f64::max);
        report.iteration_interp_residuals.push(worst);

        let next = next_shifts(&gr, it, config.unstable_shift_policy, &mut report.mirror_events)?;
        last_change = next.relative_change(&sigma);
        report.changes.push(last_change);
        report.iterations = it;
        sigma = next;
        report.shift_history.push(sigma.clone());
        vb = build_basis_v(g, &sigma)?;
        report.deflation_events.extend(vb.deflations.iter().copied());
        if vb.rank() < r {
            report.rank_truncations.push(RankTruncation {
                iteration: it,
                from: (vb.rank(), r),
                to: vb.rank(),
            });
            r = vb.rank();
            w_r = truncate(&w_r, r);
        }
        if best.as_ref().map_or(true, |(c, _)| last_change < *c) {
            best = Some((last_change, sigma.clone()));
        }
        if last_change <= config.tol {
            report.converged = true;
            break;
        }
    }

    let errors = ErrorInputs {
        g: &gp,
        w: &wp,
        quad_tol: config.quad_tol,
    };
    if !report.converged {
        let (_, best_sigma) = best.expect("at least one iteration");
        let vbest = build_basis_v(g, &best_sigma)?;
        let rb = vbest.rank().min(w_r.ncols());
        let reduced = project(
            g,
            &ReductionBases::new(truncate(&vbest.matrix, rb), truncate(&w_r, rb))?,
        )?;
        let mut rep = report.clone();
        finish_report(&mut rep, g, &reduced, &best_sigma, &zeta)?;
        fill_errors(&mut rep, &reduced, &errors);
        return Err(Error::NotConverged {
            iterations: report.iterations,
            last_change,
            best: Some(Box::new(Reduction { reduced, report: rep })),
        });
    }
    let reduced = project(g, &ReductionBases::new(truncate(&vb.matrix, r), w_r)?)?;
    finish_report(&mut report, g, &reduced, &sigma, &zeta)?;
    fill_errors(&mut report, &reduced, &errors);
    Ok(Reduction { reduced, report })
}

fn finish_report(
    report: &mut ReductionReport,
    g: &StateSpace,
    reduced: &StateSpace,
    sigma: &ShiftSet,
    zeta: &ShiftSet,
) -> Result<()> {
    report.final_sigma_interp_residuals = interpolation_residuals(g, reduced, sigma.points())?;
    report.frozen_zeta_interp_residuals = interpolation_residuals(g, reduced, zeta.points())?;
    let scale = sigma
        .points()
        .iter()
        .chain(zeta.points())
        .map(|p| p.norm())
        .fold(0.0, f64::max);
    let shared: Vec<Complex64> = sigma
        .points()
        .iter()
        .copied()
        .filter(|s| zeta.points().iter().any(|z| (z - s).norm() <= 1e-12 * scale))
        .collect();
    report.hermite_residuals = hermite_residuals(g, reduced, &shared)?;
    report.zeta = Some(zeta.clone());
    Ok(())
}

/// Options of the unweighted iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IrkaConfig {
    pub r: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub dominance_metric: DominanceMetric,
    pub unstable_shift_policy: UnstableShiftPolicy,
    pub quad_tol: Option<f64>,
}

impl IrkaConfig {
    pub fn new(r: usize) -> Self {
        Self {
            r,
            tol: 1e-6,
            max_iter: 100,
            dominance_metric: DominanceMetric::default(),
            unstable_shift_policy: UnstableShiftPolicy::default(),
            quad_tol: Some(1e-8),
        }
    }
}

/// Unweighted IRKA with `r`, `tol` and `max_iter`.
pub fn irka(g: &StateSpace, r: usize, tol: f64, max_iter: usize) -> Result<Reduction> {
    irka_with(
        g,
        &IrkaConfig {
            tol,
            max_iter,
            ..IrkaConfig::new(r)
        },
    )
}

/// Iterative rational Krylov algorithm: both bases follow the mirrored
/// reduced poles (Hermite interpolation, `σ = ζ`).
pub fn irka_with(g: &StateSpace, config: &IrkaConfig) -> Result<Reduction> {
    if config.r == 0 || config.r > g.order() {
        return Err(Error::InvalidConfig(format!(
            "r = {} for order {}",
            config.r,
            g.order()
        )));
    }
    if !(config.tol > 0.0) || config.max_iter == 0 {
        return Err(Error::InvalidConfig(
            "tol must be positive and max_iter at least 1".into(),
        ));
    }
    let gp = g.pole_residue()?;
    check_stable(&gp)?;
    let mut report = ReductionReport::default();
    let sel = dominant_poles(&gp, config.r, config.dominance_metric);
    report.selection_adjustments.extend(sel.adjustment);
    let (pts, tags) = mirrored(&sel.poles, ShiftOrigin::MirroredGPole);
    let mut sigma = ShiftSet::new(pts, tags)?;
    report.shift_history.push(sigma.clone());

    let build = |sigma: &ShiftSet, it: usize, report: &mut ReductionReport| -> Result<ReductionBases> {
        let vb = build_basis_v(g, sigma)?;
        let wb = build_basis_w(g, sigma)?;
        report
            .deflation_events
            .extend(vb.deflations.iter().chain(&wb.deflations).copied());
        let r = common_rank(&vb, &wb, it, report);
        ReductionBases::new(truncate(&vb.matrix, r), truncate(&wb.matrix, r))
    };

    let mut bases = build(&sigma, 0, &mut report)?;
    let mut best: Option<(f64, ShiftSet)> = None;
    let mut last_change = f64::INFINITY;
    for it in 1..=config.max_iter {
        let gr = project(g, &bases)?;
        let worst = interpolation_residuals(g, &gr, sigma.points())?
            .into_iter()
            .fold(0.0, f64::max);
        report.iteration_interp_residuals.push(worst);
        let next = next_shifts(&gr, it, config.unstable_shift_policy, &mut report.mirror_events)?;
        last_change = next.relative_change(&sigma);
        report.changes.push(last_change);
        report.iterations = it;
        sigma = next;
        report.shift_history.push(sigma.clone());
        bases = build(&sigma, it, &mut report)?;
        if best.as_ref().map_or(true, |(c, _)| last_change < *c) {
            best = Some((last_change, sigma.clone()));
        }
        if last_change <= config.tol {
            report.converged = true;
            break;
        }
    }
    let one = PoleResidueForm::constant(1.0);
    let errors = ErrorInputs {
        g: &gp,
        w: &one,
        quad_tol: config.quad_tol,
    };
    if !report.converged {
        let (_, best_sigma) = best.expect("at least one iteration");
        let mut rep = report.clone();
        let bb = build(&best_sigma, report.iterations, &mut rep)?;
        let reduced = project(g, &bb)?;
        finish_report(&mut rep, g, &reduced, &best_sigma, &best_sigma)?;
        fill_errors(&mut rep, &reduced, &errors);
        return Err(Error::NotConverged {
            iterations: report.iterations,
            last_change,
            best: Some(Box::new(Reduction { reduced, report: rep })),
        });
    }
    let reduced = project(g, &bases)?;
    finish_report(&mut report, g, &reduced, &sigma, &sigma)?;
    fill_errors(&mut report, &reduced, &errors);
    Ok(Reduction { reduced, report })
}
