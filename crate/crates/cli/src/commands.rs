use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use wh2_core::baselines::{balanced_truncation, fwbt, log_grid};
use wh2_core::lti::{feedback_connect, impulse_response, simulate, weight_from_loop, PoleResidueForm, StateSpace};
use wh2_core::numkit::{quad_line_with, QuadOptions};
use wh2_core::reduce::{irka, wirka, Reduction, WirkaConfig};
use wh2_core::wh2::{
    optimality_residuals, resonance_breakpoints, weighted_error, weighted_error_quad, weighted_inner, weighted_norm,
    weighted_norm_quad, InnerOperand,
};

use crate::args::{
    BodeArgs, Command, GenArgs, InnerArgs, Input, Method, NormArgs, ReduceArgs, SimulateArgs, ValidateArgs,
};
use crate::{
    benchmark_g, benchmark_plant, benchmark_w, csv_float, read_system, sweep, write_system, write_text, CliError,
    CliResult,
};

/// Gap between the residue and quadrature paths above which `norm` and
/// `inner` fail.
const PATH_GAP_LIMIT: f64 = 1e-5;

pub fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    match cmd {
        Command::Gen(a) => gen(a, out),
        Command::Norm(a) => norm(a, out),
        Command::Inner(a) => inner(a, out),
        Command::Reduce(a) => reduce(a, out, err),
        Command::Validate(a) => validate(a, out),
        Command::Sweep(a) => sweep::run(&a, out, err),
        Command::Bode(a) => bode(a, out),
        Command::Simulate(a) => simulate_cmd(a, out, err),
    }
}

fn weight_or_one(path: &Option<std::path::PathBuf>) -> CliResult<StateSpace> {
    match path {
        Some(p) => read_system(p),
        None => Ok(StateSpace::constant(1.0)),
    }
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => write_text(p, text),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn gen(a: GenArgs, out: &mut dyn Write) -> CliResult<()> {
    std::fs::create_dir_all(&a.out_dir)?;
    let g = benchmark_g(a.bench.order, a.bench.seed)?;
    let w = match a.plant_order {
        Some(m) => {
            let p = benchmark_plant(m, a.bench.seed)?;
            write_system(&a.out_dir.join("P.ss"), &p)?;
            let w = weight_from_loop(&p, &g)?;
            if !w.is_stable()? {
                writeln!(
                    out,
                    "warning: closed loop of P and G is unstable; W is not a valid weight"
                )?;
            }
            w
        }
        None => benchmark_w(a.bench.weight_order, a.bench.seed)?,
    };
    write_system(&a.out_dir.join("G.ss"), &g)?;
    write_system(&a.out_dir.join("W.ss"), &w)?;
    writeln!(
        out,
        "wrote {} (n = {}, seed = {})",
        a.out_dir.display(),
        g.order(),
        a.bench.seed
    )?;
    Ok(())
}

fn gap(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if a.abs() > 0.0 {
        d / a.abs()
    } else {
        d
    }
}

fn report_paths(out: &mut dyn Write, residue: f64, quad: f64) -> CliResult<()> {
    let g = gap(residue, quad);
    writeln!(out, "residue_value {residue:.12}")?;
    writeln!(out, "quadrature_value {quad:.12}")?;
    writeln!(out, "relative_gap {g:.3e}")?;
    if g > PATH_GAP_LIMIT {
        return Err(CliError::Threshold(format!(
            "relative gap {g:.3e} exceeds {PATH_GAP_LIMIT:e}"
        )));
    }
    Ok(())
}

fn norm(a: NormArgs, out: &mut dyn Write) -> CliResult<()> {
    let gp = read_system(&a.g)?.pole_residue()?;
    let wp = weight_or_one(&a.w)?.pole_residue()?;
    let residue = weighted_norm(&gp, &wp)?.value;
    let quad = weighted_norm_quad(&gp, &wp, a.tol)?;
    report_paths(out, residue, quad)
}

fn inner(a: InnerArgs, out: &mut dyn Write) -> CliResult<()> {
    let gp = read_system(&a.g)?.pole_residue()?;
    let hp = read_system(&a.h)?.pole_residue()?;
    let wp = weight_or_one(&a.w)?.pole_residue()?;
    let residue = weighted_inner(&gp, &InnerOperand::from_prf(&hp)?, &wp)?.value.re;
    let bps = resonance_breakpoints(gp.poles().into_iter().chain(hp.poles()).chain(wp.poles()));
    let opts = QuadOptions::new(a.tol).with_breakpoints(bps);
    let mut failure = None;
    let quad = quad_line_with(
        |om| {
            let s = Complex64::new(0.0, om);
            let v = (|| -> wh2_core::Result<Complex64> {
                Ok(gp.tf_eval(s)? * wp.tf_eval(s)? * hp.tf_eval(-s)? * wp.tf_eval(-s)?)
            })();
            v.map(|z| z.re).unwrap_or_else(|e| {
                failure.get_or_insert(e);
                0.0
            })
        },
        &opts,
    )?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    report_paths(out, residue, quad)
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

fn reduce(a: ReduceArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let (g, w) = match &a.g {
        Some(p) => (read_system(p)?, weight_or_one(&a.w)?),
        None => (
            benchmark_g(a.bench.order, a.bench.seed)?,
            match &a.w {
                Some(p) => read_system(p)?,
                None => benchmark_w(a.bench.weight_order, a.bench.seed)?,
            },
        ),
    };
    let mut text = String::new();
    let _ = writeln!(text, "method: {}", a.method.name());
    let _ = writeln!(text, "order: {}", g.order());
    let _ = writeln!(text, "requested_r: {}", a.r);
    let mut failure = None;
    let reduced = match a.method {
        Method::Wirka | Method::Irka => {
            let outcome = if a.method == Method::Wirka {
                let varpi = match a.varpi {
                    Some(v) => v,
                    None => {
                        a.r.checked_sub(a.nu)
                            .ok_or_else(|| CliError::Input(format!("nu = {} exceeds r = {}", a.nu, a.r)))?
                    }
                };
                if a.nu + varpi != a.r {
                    return Err(CliError::Input(format!(
                        "nu + varpi = {} differs from r = {}",
                        a.nu + varpi,
                        a.r
                    )));
                }
                let _ = writeln!(text, "nu: {}\nvarpi: {}", a.nu, varpi);
                let cfg = WirkaConfig::new(a.nu, varpi).with_tol(a.tol).with_max_iter(a.max_iter);
                wirka(&g, &w, &cfg)
            } else {
                irka(&g, a.r, a.tol, a.max_iter)
            };
            let red = match outcome {
                Ok(r) => r,
                Err(wh2_core::Error::NotConverged {
                    iterations,
                    last_change,
                    best: Some(best),
                }) => {
                    failure = Some(wh2_core::Error::NotConverged {
                        iterations,
                        last_change,
                        best: None,
                    });
                    *best
                }
                Err(e) => return Err(e.into()),
            };
            iteration_report(&mut text, &red);
            red.reduced
        }
        Method::Bt | Method::Fwbt => {
            let b = if a.method == Method::Bt {
                balanced_truncation(&g, a.r)?
            } else {
                fwbt(&g, &w, a.r)?
            };
            let hankel: Vec<String> = b.hankel.iter().map(|h| format!("{h:.6e}")).collect();
            let _ = writeln!(text, "hankel_values: {}", hankel.join(" "));
            if let Some(k) = b.deflated_to {
                let _ = writeln!(text, "deflated_to: {k}");
            }
            b.reduced
        }
    };
    let _ = writeln!(text, "reduced_order: {}", reduced.order());
    let stable = reduced.is_stable()?;
    let _ = writeln!(text, "reduced_stable: {stable}");
    error_report(&mut text, &g, &reduced, &w);
    let _ = writeln!(
        text,
        "status: {}",
        if failure.is_some() { "not_converged" } else { "ok" }
    );
    if let Some(p) = &a.out {
        write_system(p, &reduced)?;
    }
    emit(out, a.report.as_deref(), &text)?;
    if let Some(e) = failure {
        let _ = writeln!(err, "wh2: best iterate written");
        return Err(CliError::Numerical(e));
    }
    Ok(())
}

fn iteration_report(text: &mut String, red: &Reduction) {
    let r = &red.report;
    let _ = writeln!(text, "iterations: {}", r.iterations);
    let _ = writeln!(text, "converged: {}", r.converged);
    if let Some(c) = r.changes.last() {
        let _ = writeln!(text, "last_change: {c:.3e}");
    }
    let _ = writeln!(
        text,
        "max_iteration_interp_residual: {:.3e}",
        max_of(&r.iteration_interp_residuals)
    );
    let _ = writeln!(
        text,
        "max_sigma_interp_residual: {:.3e}",
        max_of(&r.final_sigma_interp_residuals)
    );
    let _ = writeln!(
        text,
        "max_zeta_interp_residual: {:.3e}",
        max_of(&r.frozen_zeta_interp_residuals)
    );
    let _ = writeln!(text, "max_hermite_residual: {:.3e}", max_of(&r.hermite_residuals));
    if let Some(z) = &r.zeta {
        let tags: Vec<&str> = z.origins().iter().map(|o| o.tag()).collect();
        let _ = writeln!(text, "zeta_origins: {}", tags.join(" "));
    }
    let _ = writeln!(text, "deflation_events: {}", r.deflation_events.len());
    let _ = writeln!(text, "rank_truncations: {}", r.rank_truncations.len());
    let _ = writeln!(text, "mirror_events: {}", r.mirror_events.len());
    for adj in &r.selection_adjustments {
        let _ = writeln!(
            text,
            "selection_adjustment: requested {} selected {}",
            adj.requested, adj.selected
        );
    }
    for d in &r.diagnostics {
        let _ = writeln!(text, "diagnostic: {d}");
    }
}

/// Weighted errors of `reduced` by the residue expression (with its
/// fallbacks) and by quadrature.
fn error_report(text: &mut String, g: &StateSpace, reduced: &StateSpace, w: &StateSpace) {
    let prfs = (|| -> wh2_core::Result<(PoleResidueForm, PoleResidueForm, PoleResidueForm)> {
        Ok((g.pole_residue()?, reduced.pole_residue()?, w.pole_residue()?))
    })();
    let (gp, rp, wp) = match prfs {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(text, "diagnostic: pole-residue form unavailable: {e}");
            return;
        }
    };
    if rp.is_stable() {
        match weighted_error(&gp, &rp, &wp, 1e-8) {
            Ok(v) => {
                let _ = writeln!(text, "weighted_error_expr: {:.12e}", v.value());
                let _ = writeln!(text, "weighted_error_path: {:?}", v.path);
                for f in &v.fallbacks {
                    let _ = writeln!(text, "diagnostic: error expression fallback: {f}");
                }
            }
            Err(e) => {
                let _ = writeln!(text, "diagnostic: error expression: {e}");
            }
        }
    }
    match weighted_error_quad(&gp, &rp, &wp, 1e-8) {
        Ok(v) => {
            let _ = writeln!(text, "weighted_error_quad: {v:.12e}");
        }
        Err(e) => {
            let _ = writeln!(text, "diagnostic: quadrature error: {e}");
        }
    }
    if let Ok(n) = weighted_norm(&gp, &wp) {
        let _ = writeln!(text, "weighted_norm: {:.12e}", n.value);
    }
}

fn validate(a: ValidateArgs, out: &mut dyn Write) -> CliResult<()> {
    let gp = read_system(&a.g)?.pole_residue()?;
    let rp = read_system(&a.gr)?.pole_residue()?;
    let wp = weight_or_one(&a.w)?.pole_residue()?;
    let rows = optimality_residuals(&gp, &rp, &wp)?;
    let mut text = String::from("pole_re,pole_im,value_abs,value_rel,deriv_abs,deriv_rel\n");
    let mut worst: f64 = 0.0;
    for r in &rows {
        worst = worst.max(r.max_rel());
        let _ = writeln!(
            text,
            "{},{},{},{},{},{}",
            csv_float(r.pole.re),
            csv_float(r.pole.im),
            csv_float(r.value_abs),
            csv_float(r.value_rel),
            csv_float(r.deriv_abs),
            csv_float(r.deriv_rel)
        );
    }
    out.write_all(text.as_bytes())?;
    if worst > a.threshold {
        return Err(CliError::Threshold(format!(
            "largest relative residual {worst:.3e} exceeds {:e}",
            a.threshold
        )));
    }
    Ok(())
}

/// Frequency span `[1e-3, 1e3]·max|Im λ|` (or `max|λ|` without resonances).
pub fn default_span(poles: &[Complex64]) -> (f64, f64) {
    let im = poles.iter().map(|p| p.im.abs()).fold(0.0, f64::max);
    let scale = if im > 0.0 {
        im
    } else {
        poles.iter().map(|p| p.norm()).fold(0.0, f64::max)
    };
    let scale = if scale > 0.0 { scale } else { 1.0 };
    (1e-3 * scale, 1e3 * scale)
}

fn bode(a: BodeArgs, out: &mut dyn Write) -> CliResult<()> {
    let gp = read_system(&a.g)?.pole_residue()?;
    let rp = read_system(&a.gr)?.pole_residue()?;
    let (lo, hi) = default_span(&gp.poles());
    let grid = log_grid(a.lo.unwrap_or(lo), a.hi.unwrap_or(hi), a.per_decade);
    let mut text = String::from("omega,mag_g,mag_gr\n");
    for om in grid {
        let s = Complex64::new(0.0, om);
        let _ = writeln!(
            text,
            "{},{},{}",
            csv_float(om),
            csv_float(gp.tf_eval(s)?.norm()),
            csv_float(rp.tf_eval(s)?.norm())
        );
    }
    emit(out, a.out.as_deref(), &text)
}

fn simulate_cmd(a: SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let p = read_system(&a.plant)?;
    let t = feedback_connect(&p, &read_system(&a.g)?)?;
    let tr = feedback_connect(&p, &read_system(&a.gr)?)?;
    for (name, sys) in [("T", &t), ("T_r", &tr)] {
        if !sys.is_stable()? {
            writeln!(err, "warning: closed loop {name} is unstable")?;
        }
    }
    let fastest = t
        .poles()?
        .into_iter()
        .chain(tr.poles()?)
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(a.omega);
    let dt = a.dt.unwrap_or(0.05 / fastest.max(1e-12));
    if !(dt > 0.0 && a.t_end > 0.0) {
        return Err(CliError::Input("dt and t-end must be positive".into()));
    }
    let steps = (a.t_end / dt).ceil() as usize + 1;
    let (y, yr) = match a.input {
        Input::Impulse => (impulse_response(&t, dt, steps)?, impulse_response(&tr, dt, steps)?),
        Input::Cos => {
            let u: Vec<f64> = (0..steps).map(|k| (a.omega * k as f64 * dt).cos()).collect();
            (simulate(&t, &u, dt)?, simulate(&tr, &u, dt)?)
        }
    };
    let mut text = String::from("t,y,y_r\n");
    for k in 0..steps {
        let _ = writeln!(
            text,
            "{},{},{}",
            csv_float(k as f64 * dt),
            csv_float(y[k]),
            csv_float(yr[k])
        );
    }
    emit(out, a.out.as_deref(), &text)
}
