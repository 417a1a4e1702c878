//! Subcommand implementations. Each writes its CSV into the output
//! directory and a short summary to stdout.

use std::path::Path;

use mwgate::flux::{compensation_currents, flux_quanta_to_webers, validate_matrix};
use mwgate::squid::{
    design_phase_shifter, fit_line_phase, flux_sweep, full_transmission_curve, AxisRange, Feasibility, FluxGrid,
    FluxWindow,
};
use mwgate::wqed::{
    build_lattice_model, calibrate_coupling, full_transmission_detuning, single_photon_s21, study_gamma,
    transmission_band, LatticeConfig, StudyConfig,
};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::matrix::parse_matrix;
use crate::output::{num, write_csv};

const SWEEP_HEADER: [&str; 6] = ["flux1_phi0", "flux2_phi0", "s21_re", "s21_im", "s21_abs", "s21_arg_rad"];
const CURVE_HEADER: [&str; 6] = ["tau", "theta_rad", "flux1_phi0", "flux2_phi0", "s21_abs", "s21_arg_rad"];
const SINGLE_HEADER: [&str; 6] = ["gamma", "delta_over_gamma", "s21_re", "s21_im", "s21_abs", "s21_arg_rad"];
const TWO_HEADER: [&str; 6] = ["gamma", "x_pulse_sites", "nl_phase_rad", "refl_density", "E_o", "E_p"];
const PROFILE_HEADER: [&str; 3] = ["dx_sites", "b_re", "b_im"];
const BAND_HEADER: [&str; 4] = ["gamma", "delta_f_over_gamma", "lower_over_gamma", "upper_over_gamma"];
const COMPENSATE_HEADER: [&str; 3] = ["line", "target_wb", "current_a"];

pub fn sweep_flux(cfg: &RunConfig, grid: Option<(usize, usize)>) -> Result<(), CliError> {
    let dev = cfg.device()?;
    let (n1, n2) = grid.unwrap_or(cfg.grid);
    let grid = FluxGrid {
        flux1: AxisRange::new(cfg.flux1.0, cfg.flux1.1, n1)?,
        flux2: AxisRange::new(cfg.flux2.0, cfg.flux2.1, n2)?,
    };
    let sweep = flux_sweep(&dev, &grid)?;
    let rows: Vec<Vec<String>> = sweep
        .cells
        .iter()
        .map(|c| {
            let (re, im, abs, arg) = match c.s21 {
                Some(s) => (s.re, s.im, s.norm(), s.arg()),
                None => (f64::NAN, f64::NAN, f64::NAN, f64::NAN),
            };
            vec![num(c.flux1), num(c.flux2), num(re), num(im), num(abs), num(arg)]
        })
        .collect();
    let path = write_csv(&cfg.out, "flux_sweep.csv", &SWEEP_HEADER, &rows)?;
    println!(
        "wrote {} ({} cells, {} with a SQUID at half-integer flux)",
        path.display(),
        rows.len(),
        sweep.divergent_count()
    );
    Ok(())
}

pub fn design(cfg: &RunConfig, theta: f64) -> Result<(), CliError> {
    if !theta.is_finite() {
        return Err(CliError::Validation(format!("theta must be finite, got {theta}")));
    }
    let dev = cfg.device()?;
    let d = design_phase_shifter(theta, &dev);
    let flux = |f: Option<f64>| f.map_or_else(|| "none".to_string(), num);
    println!("theta_rad = {}", num(d.theta));
    println!("l1_h = {}", num(d.l1));
    println!("l2_h = {}", num(d.l2));
    println!("flux1_phi0 = {}", flux(d.flux1));
    println!("flux2_phi0 = {}", flux(d.flux2));
    match d.feasibility {
        Feasibility::Feasible => println!("feasibility = feasible"),
        Feasibility::Infeasible(why) => println!("feasibility = infeasible ({why})"),
    }
    Ok(())
}

/// Options of the `ft-curve` subcommand.
pub struct CurveRequest {
    pub samples: usize,
    /// `(flux1_lo, flux1_hi, flux2_lo, flux2_hi)` in principal-branch Φ0.
    pub window: Option<[f64; 4]>,
    /// Endpoints `(flux1, flux2)` to fit the line phase to.
    pub fit_to: Option<[(f64, f64); 2]>,
    pub phi_range: (f64, f64),
}

pub fn ft_curve(cfg: &RunConfig, req: &CurveRequest) -> Result<(), CliError> {
    let mut dev = cfg.device()?;
    let window = match req.window {
        Some([a, b, c, d]) => FluxWindow { flux1: (a, b), flux2: (c, d) },
        None => FluxWindow::full(),
    };
    if let Some(targets) = req.fit_to {
        let fit = fit_line_phase(&dev, &window, &targets, req.phi_range.0, req.phi_range.1, 61)?;
        println!("fitted phi_line = {} rad (endpoint residual {} Phi0)", num(fit.phi_line), num(fit.residual));
        dev = dev.with_phi_line(fit.phi_line);
    }
    let curve = full_transmission_curve(&dev, req.samples, &window)?;
    let rows: Vec<Vec<String>> = curve
        .iter()
        .map(|p| vec![num(p.tau), num(p.theta), num(p.flux1), num(p.flux2), num(p.s21.norm()), num(p.s21.arg())])
        .collect();
    let path = write_csv(&cfg.out, "ft_curve.csv", &CURVE_HEADER, &rows)?;
    println!("wrote {} ({} points)", path.display(), rows.len());
    Ok(())
}

fn gammas_or_default(cfg: &RunConfig, gammas: &[f64]) -> Vec<f64> {
    if gammas.is_empty() {
        vec![cfg.gamma_ratio]
    } else {
        gammas.to_vec()
    }
}

pub fn single_photon(cfg: &RunConfig, gammas: &[f64]) -> Result<(), CliError> {
    let (lo, hi) = cfg.delta;
    let n = cfg.delta_points;
    let mut rows = Vec::new();
    for gamma in gammas_or_default(cfg, gammas) {
        for k in 0..n {
            let delta = lo + (hi - lo) * k as f64 / (n - 1) as f64;
            let s = single_photon_s21(delta, 1.0, gamma)?;
            rows.push(vec![num(gamma), num(delta), num(s.re), num(s.im), num(s.norm()), num(s.arg())]);
        }
    }
    let path = write_csv(&cfg.out, "single_photon.csv", &SINGLE_HEADER, &rows)?;
    println!("wrote {} ({} rows)", path.display(), rows.len());
    Ok(())
}

fn profile_name(gamma: f64) -> String {
    format!("b_profile_g{gamma}.csv")
}

pub fn two_photon(cfg: &RunConfig, gammas: &[f64]) -> Result<(), CliError> {
    let mut rows = Vec::new();
    for gamma in gammas_or_default(cfg, gammas) {
        let model = build_lattice_model(&LatticeConfig {
            gamma_dt: cfg.gamma_dt,
            carrier_k0: cfg.carrier_k0,
            gamma_ratio: gamma,
            detuning_over_gamma: cfg.detuning,
            hardcore: true,
        })?;
        let cal = calibrate_coupling(&model, cfg.gamma_dt)?;
        let study = study_gamma(&model.with_calibration(&cal), &StudyConfig::default())?;
        for e in &study.errors {
            rows.push(vec![
                num(gamma),
                e.x_pulse.to_string(),
                num(study.extrapolation.limit),
                num(study.excess_reflection),
                num(e.overlap),
                num(e.phase),
            ]);
        }
        let profile: Vec<Vec<String>> = study
            .correction
            .dx
            .iter()
            .zip(&study.correction.b)
            .map(|(dx, b)| vec![dx.to_string(), num(b.re), num(b.im)])
            .collect();
        write_csv(&cfg.out, &profile_name(gamma), &PROFILE_HEADER, &profile)?;
        println!(
            "gamma {gamma}: nonlinear phase {:.4} pi, excess reflection {:.3e}",
            study.extrapolation.limit / std::f64::consts::PI,
            study.excess_reflection
        );
    }
    let path = write_csv(&cfg.out, "two_photon.csv", &TWO_HEADER, &rows)?;
    println!("wrote {} ({} rows)", path.display(), rows.len());
    Ok(())
}

pub fn band(cfg: &RunConfig, points: usize, threshold: f64) -> Result<(), CliError> {
    if points == 0 {
        return Err(CliError::Validation("band needs at least one coupling ratio".into()));
    }
    let mut rows = Vec::new();
    for k in 1..=points {
        let gamma = 2.0 * k as f64 / (points + 1) as f64;
        let df = full_transmission_detuning(gamma, 1.0)?.plus;
        let (lo, hi) = transmission_band(gamma, 1.0, threshold)?;
        rows.push(vec![num(gamma), num(df), num(lo), num(hi)]);
    }
    let path = write_csv(&cfg.out, "band.csv", &BAND_HEADER, &rows)?;
    println!("wrote {} ({} coupling ratios)", path.display(), rows.len());
    Ok(())
}

/// Units of the requested fluxes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxUnit {
    Phi0,
    Weber,
}

pub fn compensate(cfg: &RunConfig, matrix: &Path, target: &[f64], unit: FluxUnit) -> Result<(), CliError> {
    let text = std::fs::read_to_string(matrix)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", matrix.display())))?;
    let m = parse_matrix(&text)?;
    if target.len() != m.size() {
        return Err(CliError::Validation(format!(
            "{} target fluxes given for a {}x{} matrix",
            target.len(),
            m.size(),
            m.size()
        )));
    }
    let target = match unit {
        FluxUnit::Phi0 => flux_quanta_to_webers(target),
        FluxUnit::Weber => target.to_vec(),
    };
    let diag = validate_matrix(&m);
    println!("determinant = {}", num(diag.determinant));
    println!("condition = {}", num(diag.condition));
    let dominance: Vec<String> = diag.dominance.iter().map(|d| num(*d)).collect();
    println!("dominance = {}", dominance.join(" "));
    let currents = compensation_currents(&m, &target)?;
    let rows: Vec<Vec<String>> =
        currents.iter().zip(&target).enumerate().map(|(k, (i, f))| vec![(k + 1).to_string(), num(*f), num(*i)]).collect();
    for row in &rows {
        println!("line {}: {} A", row[0], row[2]);
    }
    let path = write_csv(&cfg.out, "compensate.csv", &COMPENSATE_HEADER, &rows)?;
    println!("wrote {}", path.display());
    Ok(())
}
