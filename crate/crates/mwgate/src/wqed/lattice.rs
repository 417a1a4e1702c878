//! Time-bin discretization of the waveguide coupled to three qubits.
//!
//! The waveguide is cut into bins of duration `Δt` travelling in two chiral
//! channels: right-moving photons (`R`) labelled by the step at which they
//! reach the qubits, and left-moving photons (`L`) labelled by the step at
//! which they are emitted. Each step the qubits interact with the current
//! `R` and `L` bins only, which is exact for a dispersionless waveguide when
//! the qubits are treated as point-like on the scale of the pulse. Their
//! quarter-wavelength separation enters through the propagation phases
//! `e^{±ik0·x_j}` of the couplings and through the coherent exchange it
//! induces between qubits.
//!
//! Amplitudes live in the frame rotating at the carrier frequency, so the
//! qubits carry energy `−δ` and a monochromatic input has a constant
//! envelope. All rates inside this module are in units of `1/Δt`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use std::f64::consts::PI;

use super::analytic::full_transmission_detuning;
use crate::error::{Error, Result};

/// Local modes touched by one step: the current `R` bin, the current `L`
/// bin and the three qubits.
pub const LOCAL_MODES: usize = 5;
const PAIR_MODES: usize = LOCAL_MODES * LOCAL_MODES;

/// Parameters from which a [`LatticeModel`] is built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeConfig {
    /// Side-qubit decay rate times the bin duration, `Γ·Δt`.
    pub gamma_dt: f64,
    /// Carrier phase advance per bin, `k0·vΔt`, in radians.
    pub carrier_k0: f64,
    /// Middle-qubit decay rate over `Γ`.
    pub gamma_ratio: f64,
    /// Carrier detuning from the qubits in units of `Γ`. `None` selects the
    /// positive full-transmission detuning.
    pub detuning_over_gamma: Option<f64>,
    /// Two-level qubits when set, linear (bosonic) qubits otherwise.
    pub hardcore: bool,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self { gamma_dt: 0.1, carrier_k0: PI / 4.0, gamma_ratio: 0.62, detuning_over_gamma: None, hardcore: true }
    }
}

/// Discretized three-qubit scatterer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeModel {
    pub gamma_dt: f64,
    pub carrier_k0: f64,
    /// Quarter wavelength in bins.
    pub spacing: usize,
    /// Qubit positions in bins relative to the middle qubit.
    pub qubit_sites: [i64; 3],
    pub gamma_ratio: f64,
    /// Carrier detuning `δ` in units of `Γ`.
    pub detuning_over_gamma: f64,
    pub hardcore: bool,
    /// Multiplier on every coupling amplitude set by calibration.
    pub gain: f64,
}

/// Validates a configuration and lays out the qubits.
pub fn build_lattice_model(cfg: &LatticeConfig) -> Result<LatticeModel> {
    if !(cfg.gamma_dt > 0.0 && cfg.gamma_dt <= 0.5) {
        return Err(Error::Config(format!("gamma_dt must lie in (0, 0.5], got {}", cfg.gamma_dt)));
    }
    if !(cfg.carrier_k0 > 0.0 && cfg.carrier_k0 <= PI) {
        return Err(Error::Config(format!("carrier_k0 must lie in (0, pi], got {}", cfg.carrier_k0)));
    }
    let quarter = PI / 2.0 / cfg.carrier_k0;
    let spacing = quarter.round();
    if (quarter - spacing).abs() > 1e-9 || spacing < 1.0 {
        return Err(Error::Config(format!("quarter wavelength of {quarter} bins is not an integer")));
    }
    if !(cfg.gamma_ratio >= 0.0 && cfg.gamma_ratio < 2.0) {
        return Err(Error::Config(format!("gamma_ratio must lie in [0, 2), got {}", cfg.gamma_ratio)));
    }
    let detuning = match cfg.detuning_over_gamma {
        Some(d) if d.is_finite() => d,
        Some(d) => return Err(Error::Config(format!("detuning must be finite, got {d}"))),
        None => full_transmission_detuning(cfg.gamma_ratio, 1.0)?.plus,
    };
    let s = spacing as i64;
    Ok(LatticeModel {
        gamma_dt: cfg.gamma_dt,
        carrier_k0: cfg.carrier_k0,
        spacing: spacing as usize,
        qubit_sites: [-s, 0, s],
        gamma_ratio: cfg.gamma_ratio,
        detuning_over_gamma: detuning,
        hardcore: cfg.hardcore,
        gain: 1.0,
    })
}

/// One-step propagators restricted to the local modes.
#[derive(Debug, Clone)]
pub struct StepOperators {
    /// Single excitation, ordered `(R, L, q0, q1, q2)`.
    pub one: [[C; LOCAL_MODES]; LOCAL_MODES],
    /// Two excitations on ordered pairs of local modes, index `5a + b`.
    pub two: Vec<C>,
}

impl LatticeModel {
    /// Decay rates `(Γ, γΓ, Γ)` in units of `1/Δt`, including the gain.
    pub fn rates(&self) -> [f64; 3] {
        let g = self.gain * self.gain * self.gamma_dt;
        [g, g * self.gamma_ratio, g]
    }

    /// Coupling amplitude of each qubit to each channel, `√(Γ_j/2)`.
    pub fn couplings(&self) -> [f64; 3] {
        self.rates().map(|r| (r / 2.0).sqrt())
    }

    /// Propagation phases `k0·x_j` at the qubit positions.
    pub fn phases(&self) -> [f64; 3] {
        self.qubit_sites.map(|s| self.carrier_k0 * s as f64)
    }

    /// Carrier detuning in radians per bin.
    pub fn detuning_per_bin(&self) -> f64 {
        self.detuning_over_gamma * self.gamma_dt
    }

    /// Same model with the given detuning.
    #[must_use]
    pub fn with_detuning(mut self, detuning_over_gamma: f64) -> Self {
        self.detuning_over_gamma = detuning_over_gamma;
        self
    }

    #[must_use]
    pub fn with_hardcore(mut self, hardcore: bool) -> Self {
        self.hardcore = hardcore;
        self
    }

    #[must_use]
    pub fn with_calibration(mut self, cal: &Calibration) -> Self {
        self.gain = cal.gain;
        self
    }

    pub fn step_operators(&self) -> StepOperators {
        let ops = Emitters::new(&self.rates(), &self.phases(), self.detuning_per_bin()).operators(self.hardcore);
        let mut one = [[C::new(0.0, 0.0); LOCAL_MODES]; LOCAL_MODES];
        for (i, row) in one.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = ops.0[(i, j)];
            }
        }
        let two = ops.1.expect("three emitters yield a pair operator");
        let two = (0..PAIR_MODES).flat_map(|i| (0..PAIR_MODES).map(move |j| (i, j))).map(|ij| two[ij]).collect();
        StepOperators { one, two }
    }

    /// Steady-state single-photon transmission at detuning `delta_over_gamma`
    /// (in units of `Γ`), obtained from the one-step propagator.
    pub fn single_photon_transmission(&self, delta_over_gamma: f64) -> Result<C> {
        let em = Emitters::new(&self.rates(), &self.phases(), self.detuning_per_bin());
        em.transmission((delta_over_gamma - self.detuning_over_gamma) * self.gamma_dt)
    }
}

/// Point-like emitters sharing one interaction point.
struct Emitters {
    n: usize,
    rates: Vec<f64>,
    phases: Vec<f64>,
    detuning: f64,
}

impl Emitters {
    fn new(rates: &[f64], phases: &[f64], detuning: f64) -> Self {
        Self { n: rates.len(), rates: rates.to_vec(), phases: phases.to_vec(), detuning }
    }

    /// Coupling Hamiltonian over one bin and the qubit Hamiltonian, both on
    /// the local modes `(R, L, q...)`.
    ///
    /// The bin coupling is rescaled so that each decay eigenmode loses
    /// exactly `1 − e^{−aΔt}` of its population per step, which removes the
    /// leading discretization error of the collision picture.
    fn hamiltonians(&self) -> (DMatrix<C>, DMatrix<C>) {
        let n = self.n;
        let m = n + 2;
        let mut a = DMatrix::<C>::zeros(n, 2);
        for j in 0..n {
            let amp = (self.rates[j] / 2.0).sqrt();
            a[(j, 0)] = C::from_polar(amp, self.phases[j]);
            a[(j, 1)] = C::from_polar(amp, -self.phases[j]);
        }
        let gram = &a * a.adjoint();
        let eig = gram.symmetric_eigen();
        let scale = eig.eigenvalues.map(|ev| {
            if ev > 1e-14 {
                (-ev / 2.0).exp().acos() / ev.sqrt()
            } else {
                1.0
            }
        });
        let u = &eig.eigenvectors;
        let corr = u * DMatrix::from_diagonal(&scale.map(|s| C::new(s, 0.0))) * u.adjoint();
        let a = corr * a;

        let mut k = DMatrix::<C>::zeros(m, m);
        for j in 0..n {
            for ch in 0..2 {
                k[(2 + j, ch)] = a[(j, ch)];
                k[(ch, 2 + j)] = a[(j, ch)].conj();
            }
        }
        let mut hq = DMatrix::<C>::zeros(m, m);
        for j in 0..n {
            hq[(2 + j, 2 + j)] = C::new(-self.detuning, 0.0);
            for l in 0..n {
                if l != j {
                    let ex = 0.5 * (self.rates[j] * self.rates[l]).sqrt() * (self.phases[j] - self.phases[l]).abs().sin();
                    hq[(2 + j, 2 + l)] = C::new(ex, 0.0);
                }
            }
        }
        (hq, k)
    }

    /// Symmetric split `e^{−iH/2}·e^{−iK}·e^{−iH/2}` on one and (when three
    /// emitters are present) two excitations.
    fn operators(&self, hardcore: bool) -> (DMatrix<C>, Option<DMatrix<C>>) {
        let (hq, k) = self.hamiltonians();
        let one = strang(&hq, &k);
        let two = (self.n == 3).then(|| {
            let hq2 = pair_operator(&hq, hardcore, self.n);
            let k2 = pair_operator(&k, hardcore, self.n);
            strang(&hq2, &k2)
        });
        (one, two)
    }

    /// Transmission of a photon detuned by `nu` radians per bin from the
    /// carrier, from the steady state of the one-step map.
    fn transmission(&self, nu: f64) -> Result<C> {
        let (one, _) = self.operators(false);
        let n = self.n;
        let phase = C::from_polar(1.0, -nu);
        let lhs = DMatrix::from_fn(n, n, |i, j| if i == j { phase } else { C::new(0.0, 0.0) } - one[(2 + i, 2 + j)]);
        let rhs = DMatrix::from_fn(n, 1, |i, _| one[(2 + i, 0)]);
        let q = lhs.lu().solve(&rhs).ok_or_else(|| Error::SingularEvaluation("steady state is singular".into()))?;
        Ok(one[(0, 0)] + (0..n).map(|j| one[(0, 2 + j)] * q[(j, 0)]).sum::<C>())
    }
}

fn strang(h: &DMatrix<C>, k: &DMatrix<C>) -> DMatrix<C> {
    let half = (h * C::new(0.0, -0.5)).exp();
    let kick = (k * C::new(0.0, -1.0)).exp();
    &half * kick * &half
}

/// `H ⊗ 1 + 1 ⊗ H` on ordered pairs, with doubly occupied qubits removed in
/// the hard-core case.
fn pair_operator(h: &DMatrix<C>, hardcore: bool, qubits: usize) -> DMatrix<C> {
    let m = h.nrows();
    let eye = DMatrix::<C>::identity(m, m);
    let mut out = h.kronecker(&eye) + eye.kronecker(h);
    if hardcore {
        for j in 0..qubits {
            let idx = (2 + j) * m + (2 + j);
            out.row_mut(idx).fill(C::new(0.0, 0.0));
            out.column_mut(idx).fill(C::new(0.0, 0.0));
        }
    }
    out
}

/// Outcome of fitting the coupling gain to a single emitter's lineshape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub gain: f64,
    /// Largest deviation of the fitted single-emitter transmission from the
    /// analytic lineshape over `δ ∈ [−3Γ, 3Γ]`.
    pub residual: f64,
    /// Calibrated coupling amplitudes `(V, √γ·V, V)` in units of `1/√Δt`.
    pub couplings: [f64; 3],
}

/// Largest lineshape deviation accepted by [`calibrate_coupling`].
pub const CALIBRATION_TOLERANCE: f64 = 5e-3;
const CALIBRATION_POINTS: usize = 241;

/// Fits the coupling gain so that one side qubit alone reproduces the
/// Lorentzian reflection lineshape `δ/(δ + iΓ/2)` of width `gamma_target`
/// (in units of `1/Δt`).
pub fn calibrate_coupling(model: &LatticeModel, gamma_target: f64) -> Result<Calibration> {
    if !(gamma_target > 0.0 && gamma_target <= 0.5) {
        return Err(Error::InvalidParameter(format!("gamma_target must lie in (0, 0.5], got {gamma_target}")));
    }
    let grid: Vec<f64> = (0..CALIBRATION_POINTS)
        .map(|k| gamma_target * (-3.0 + 6.0 * k as f64 / (CALIBRATION_POINTS - 1) as f64))
        .collect();
    let target = |d: f64| C::new(d, 0.0) / C::new(d, gamma_target / 2.0);
    let deviations = |gain: f64| -> Vec<f64> {
        let em = Emitters::new(&[gain * gain * model.gamma_dt], &[0.0], 0.0);
        grid.iter().map(|&d| em.transmission(d).map_or(f64::INFINITY, |s| (s - target(d)).norm())).collect()
    };
    let sse = |gain: f64| deviations(gain).iter().map(|e| e * e).sum::<f64>();

    let golden = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (0.25, 4.0);
    let mut x1 = b - golden * (b - a);
    let mut x2 = a + golden * (b - a);
    let (mut f1, mut f2) = (sse(x1), sse(x2));
    while b - a > 1e-12 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - golden * (b - a);
            f1 = sse(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + golden * (b - a);
            f2 = sse(x2);
        }
    }
    let gain = 0.5 * (a + b);
    let residual = deviations(gain).into_iter().fold(0.0, f64::max);
    if !(residual <= CALIBRATION_TOLERANCE) {
        return Err(Error::CalibrationFailed { residual, tolerance: CALIBRATION_TOLERANCE });
    }
    let calibrated = LatticeModel { gain, ..*model };
    Ok(Calibration { gain, residual, couplings: calibrated.couplings() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wqed::analytic::single_photon_s21;

    fn model(gamma: f64, gamma_dt: f64) -> LatticeModel {
        build_lattice_model(&LatticeConfig { gamma_dt, gamma_ratio: gamma, ..LatticeConfig::default() }).unwrap()
    }

    #[test]
    fn geometry_from_carrier() {
        for (k0, s) in [(PI / 2.0, 1), (PI / 4.0, 2), (PI / 8.0, 4)] {
            let m = build_lattice_model(&LatticeConfig { carrier_k0: k0, ..LatticeConfig::default() }).unwrap();
            assert_eq!(m.spacing, s);
            assert_eq!(m.qubit_sites, [-(s as i64), 0, s as i64]);
            let p = m.phases();
            assert!((p[2] - PI / 2.0).abs() < 1e-12 && (p[0] + PI / 2.0).abs() < 1e-12);
        }
        let bad = LatticeConfig { carrier_k0: 0.3, ..LatticeConfig::default() };
        assert!(matches!(build_lattice_model(&bad), Err(Error::Config(_))));
    }

    #[test]
    fn step_operators_are_unitary() {
        for hardcore in [true, false] {
            let ops = model(0.62, 0.1).with_hardcore(hardcore).step_operators();
            let u = DMatrix::from_fn(5, 5, |i, j| ops.one[i][j]);
            let dev = (u.adjoint() * &u - DMatrix::identity(5, 5)).norm();
            assert!(dev < 1e-13);
            let u2 = DMatrix::from_fn(25, 25, |i, j| ops.two[i * 25 + j]);
            assert!((u2.adjoint() * &u2 - DMatrix::identity(25, 25)).norm() < 1e-12);
        }
    }

    #[test]
    fn bosonic_pair_operator_factorizes() {
        let ops = model(0.62, 0.1).with_hardcore(false).step_operators();
        let u = DMatrix::from_fn(5, 5, |i, j| ops.one[i][j]);
        let u2 = DMatrix::from_fn(25, 25, |i, j| ops.two[i * 25 + j]);
        assert!((u.kronecker(&u) - u2).norm() < 1e-12);
    }

    #[test]
    fn calibration_reflects_on_resonance() {
        let m = model(1.0, 0.1);
        let cal = calibrate_coupling(&m, 0.1).unwrap();
        assert!((cal.gain - 1.0).abs() < 0.05);
        assert!(cal.residual < CALIBRATION_TOLERANCE);
        let single = Emitters::new(&[cal.gain * cal.gain * 0.1], &[0.0], 0.0);
        assert!(single.transmission(0.0).unwrap().norm() < 1e-3);
    }

    #[test]
    fn three_qubit_lineshape() {
        for gamma in [0.21, 0.62, 1.0, 1.5] {
            let m = model(gamma, 0.1);
            let m = m.with_calibration(&calibrate_coupling(&m, 0.1).unwrap());
            let mut worst: f64 = 0.0;
            for k in 0..=600 {
                let d = -3.0 + k as f64 * 0.01;
                let lat = m.single_photon_transmission(d).unwrap();
                let exact = single_photon_s21(d, 1.0, gamma).unwrap();
                worst = worst.max((lat - exact).norm());
            }
            assert!(worst < 0.01, "gamma {gamma}: {worst}");
        }
    }

    #[test]
    fn full_transmission_on_lattice() {
        let m = model(1.0, 0.1);
        let m = m.with_calibration(&calibrate_coupling(&m, 0.1).unwrap());
        let t = m.single_photon_transmission(1.0).unwrap();
        assert!((t.norm() - 1.0).abs() < 0.01);
    }
}
