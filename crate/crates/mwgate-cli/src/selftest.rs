//! Quick invariant suite run by the `selftest` subcommand.

use std::f64::consts::PI;

use mwgate::flux::compensation_currents;
use mwgate::squid::{design_phase_shifter, s21_closed_form, squid_chain_s_params};
use mwgate::wqed::{
    build_lattice_model, calibrate_coupling, evolve_two_photon, full_transmission_detuning, single_photon_s21,
    LatticeConfig, Pulse, PulseShape,
};
use mwgate::{Device, Mutuals};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::error::CliError;

/// Result of one invariant check.
pub struct Check {
    pub name: &'static str,
    pub worst: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

fn random_device(rng: &mut ChaCha8Rng) -> Device {
    Device::new(
        rng.gen_range(0.3e-6..3e-6),
        rng.gen_range(0.3e-6..3e-6),
        rng.gen_range(5e-15..60e-15),
        rng.gen_range(20.0..100.0),
        rng.gen_range(0.0..PI),
        2.0 * PI * rng.gen_range(4e9..8e9),
    )
    .expect("sampled parameters are positive")
}

fn chain_checks(rng: &mut ChaCha8Rng) -> mwgate::Result<[Check; 2]> {
    let (mut reciprocity, mut power, mut closed): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..200 {
        let dev = random_device(rng);
        let l1 = dev.lmin1() * rng.gen_range(1.0..8.0);
        let l2 = dev.lmin2() * rng.gen_range(1.0..8.0);
        let s = squid_chain_s_params(l1, l2, &dev)?;
        reciprocity = reciprocity.max((s.s21 - s.s12).norm());
        power = power.max((s.power_sum() - 1.0).abs());
        closed = closed.max((s21_closed_form(l1, l2, &dev)? - s.s21).norm() / s.s21.norm());
    }
    Ok([
        Check { name: "reciprocity and losslessness", worst: reciprocity.max(power), tolerance: 1e-9 },
        Check { name: "closed form against cascade", worst: closed, tolerance: 1e-9 },
    ])
}

fn design_check(rng: &mut ChaCha8Rng) -> mwgate::Result<Check> {
    let mut worst: f64 = 0.0;
    let mut found = 0;
    for _ in 0..20_000 {
        let phi = rng.gen_range(0.2..2.6);
        let theta = rng.gen_range(-PI..PI);
        let dev = Device::new(0.7e-6, 2.2e-6, 26e-15, 50.0, phi, 2.0 * PI * 6.3e9)?;
        let d = design_phase_shifter(theta, &dev);
        if !d.is_feasible() {
            continue;
        }
        let s = s21_closed_form(d.l1, d.l2, &dev)?;
        let phase = (s * Complex64::from_polar(1.0, -(2.0 * phi + theta))).arg().abs();
        worst = worst.max((s.norm() - 1.0).abs()).max(phase);
        found += 1;
        if found == 50 {
            break;
        }
    }
    if found < 50 {
        worst = f64::INFINITY;
    }
    Ok(Check { name: "design identity", worst, tolerance: 1e-9 })
}

fn single_photon_check(rng: &mut ChaCha8Rng) -> mwgate::Result<Check> {
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let gamma: f64 = rng.gen_range(0.05..1.95);
        let ft = full_transmission_detuning(gamma, 1.0)?;
        for d in [ft.plus, ft.minus] {
            worst = worst.max((single_photon_s21(d, 1.0, gamma)?.norm() - 1.0).abs());
        }
    }
    Ok(Check { name: "unit transmission at full-transmission detuning", worst, tolerance: 1e-12 })
}

fn compensation_check(rng: &mut ChaCha8Rng) -> mwgate::Result<Check> {
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let entries: Vec<f64> = (0..9)
            .map(|k| if k % 4 == 0 { rng.gen_range(80e-12..150e-12) } else { rng.gen_range(-15e-12..15e-12) })
            .collect();
        let m = Mutuals::from_row_major(3, &entries)?;
        let target: Vec<f64> = (0..3).map(|_| rng.gen_range(-1e-15..1e-15)).collect();
        let currents = compensation_currents(&m, &target)?;
        let realized = m.apply(&currents);
        let scale = target.iter().map(|t| t.abs()).fold(0.0, f64::max);
        let residual = realized.iter().zip(&target).map(|(r, t)| (r - t).abs()).fold(0.0, f64::max);
        worst = worst.max(residual / scale);
    }
    Ok(Check { name: "compensation residual", worst, tolerance: 1e-10 })
}

fn lattice_check(cfg: &RunConfig) -> mwgate::Result<Check> {
    let model = build_lattice_model(&LatticeConfig {
        gamma_dt: cfg.gamma_dt,
        carrier_k0: cfg.carrier_k0,
        gamma_ratio: cfg.gamma_ratio,
        detuning_over_gamma: cfg.detuning,
        hardcore: true,
    })?;
    let model = model.with_calibration(&calibrate_coupling(&model, cfg.gamma_dt)?);
    let state = evolve_two_photon(&model, &Pulse::with_default_tail(PulseShape::Gaussian { sigma: 8.0 }, &model))?;
    Ok(Check { name: "two-photon norm", worst: (state.norm() - state.initial_norm()).abs(), tolerance: 1e-8 })
}

/// Runs every check, printing one line each, and fails if any check does.
pub fn selftest(cfg: &RunConfig) -> Result<(), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks: Vec<Check> = chain_checks(&mut rng)?.into();
    checks.push(design_check(&mut rng)?);
    checks.push(single_photon_check(&mut rng)?);
    checks.push(compensation_check(&mut rng)?);
    checks.push(lattice_check(cfg)?);
    for c in &checks {
        let status = if c.passed() { "ok" } else { "FAILED" };
        println!("check {:<48} {status} (worst {:.2e}, tolerance {:.0e})", c.name, c.worst, c.tolerance);
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    if failed > 0 {
        return Err(CliError::Computation(format!("{failed} of {} self-checks failed", checks.len())));
    }
    println!("all {} checks passed", checks.len());
    Ok(())
}
