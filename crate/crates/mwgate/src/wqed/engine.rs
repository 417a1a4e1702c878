//! Wavepacket evolution in the one- and two-excitation sectors.

use num_complex::Complex64 as C;

use super::lattice::{LatticeModel, StepOperators, LOCAL_MODES};
use crate::error::{Error, Result};

/// Excitation that may remain in the qubits when the run ends.
pub const MAX_LEFTOVER: f64 = 1e-4;
/// Allowed drift of the total norm over one run.
pub const NORM_BUDGET: f64 = 1e-8;
/// Leading edge length in units of the edge width, chosen so the truncated
/// amplitude is negligible.
const LEAD_WIDTHS: f64 = 5.0;
/// Residual qubit amplitude targeted when sizing the trailing window.
const TAIL_AMPLITUDE: f64 = 1e-4;

/// Envelope of the incoming photons in the carrier frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseShape {
    /// Gaussian amplitude with standard deviation `sigma` bins.
    Gaussian { sigma: f64 },
    /// Constant amplitude over `plateau` bins with Gaussian flanks of
    /// standard deviation `edge` bins.
    FlatTop { plateau: usize, edge: f64 },
}

/// Incoming wavepacket and the number of empty bins appended after it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    pub shape: PulseShape,
    pub tail: usize,
}

impl Pulse {
    /// Pulse followed by enough empty bins for the qubits to relax.
    pub fn with_default_tail(shape: PulseShape, model: &LatticeModel) -> Self {
        Self { shape, tail: relaxation_bins(model) }
    }

    /// Normalized input amplitudes per bin and the index of the pulse
    /// centre.
    pub fn envelope(&self) -> Result<(Vec<f64>, usize)> {
        let (mut amps, center) = match self.shape {
            PulseShape::Gaussian { sigma } => {
                if !(sigma >= 1.0 && sigma.is_finite()) {
                    return Err(Error::InvalidParameter(format!("pulse width must be at least one bin, got {sigma}")));
                }
                let lead = (LEAD_WIDTHS * sigma).ceil() as usize;
                let amps: Vec<f64> = (0..2 * lead + 1)
                    .map(|m| {
                        let x = (m as f64 - lead as f64) / sigma;
                        (-x * x / 2.0).exp()
                    })
                    .collect();
                (amps, lead)
            }
            PulseShape::FlatTop { plateau, edge } => {
                if plateau < 2 || !(edge >= 1.0 && edge.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "flat-top pulse needs plateau >= 2 and edge >= 1 bin (got {plateau}, {edge})"
                    )));
                }
                let lead = (LEAD_WIDTHS * edge).ceil() as usize;
                let (a, b) = (lead, lead + plateau - 1);
                let amps: Vec<f64> = (0..b + lead + 1)
                    .map(|m| {
                        let x = if m < a {
                            (a - m) as f64
                        } else if m > b {
                            (m - b) as f64
                        } else {
                            0.0
                        };
                        (-x * x / (2.0 * edge * edge)).exp()
                    })
                    .collect();
                (amps, (a + b) / 2)
            }
        };
        let norm = amps.iter().map(|x| x * x).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|x| *x /= norm);
        amps.resize(amps.len() + self.tail, 0.0);
        Ok((amps, center))
    }
}

/// Number of bins after which the slowest qubit mode has decayed to
/// [`TAIL_AMPLITUDE`].
pub fn relaxation_bins(model: &LatticeModel) -> usize {
    let ops = model.step_operators();
    let block = nalgebra::DMatrix::from_fn(3, 3, |i, j| ops.one[2 + i][2 + j]);
    let (_, triangular) = block.schur().unpack();
    let slowest = triangular.diagonal().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if slowest >= 1.0 || slowest <= 0.0 {
        return 0;
    }
    (TAIL_AMPLITUDE.ln() / slowest.ln()).ceil() as usize
}

fn apply5(u: &[[C; LOCAL_MODES]; LOCAL_MODES], v: &[C; LOCAL_MODES]) -> [C; LOCAL_MODES] {
    let mut out = [C::new(0.0, 0.0); LOCAL_MODES];
    for (o, row) in out.iter_mut().zip(u) {
        *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
    }
    out
}

/// Final state of a single photon.
#[derive(Debug, Clone, PartialEq)]
pub struct SinglePhotonState {
    pub input: Vec<f64>,
    pub center: usize,
    pub transmitted: Vec<C>,
    pub reflected: Vec<C>,
    pub qubits: [C; 3],
}

impl SinglePhotonState {
    pub fn norm(&self) -> f64 {
        let sq = |v: &[C]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        sq(&self.transmitted) + sq(&self.reflected) + sq(&self.qubits)
    }
}

/// Propagates one photon with the given envelope through the qubits.
pub fn evolve_single_photon(model: &LatticeModel, pulse: &Pulse) -> Result<SinglePhotonState> {
    let (input, center) = pulse.envelope()?;
    let u = model.step_operators().one;
    let n = input.len();
    let mut transmitted = vec![C::new(0.0, 0.0); n];
    let mut reflected = vec![C::new(0.0, 0.0); n];
    let mut q = [C::new(0.0, 0.0); 3];
    for step in 0..n {
        let v = [C::new(input[step], 0.0), C::new(0.0, 0.0), q[0], q[1], q[2]];
        let w = apply5(&u, &v);
        transmitted[step] = w[0];
        reflected[step] = w[1];
        q = [w[2], w[3], w[4]];
    }
    let leftover: f64 = q.iter().map(|z| z.norm_sqr()).sum();
    if leftover > MAX_LEFTOVER {
        return Err(Error::AbortedRun(format!(
            "{leftover:e} of the excitation is still in the qubits; lengthen the tail"
        )));
    }
    Ok(SinglePhotonState { input, center, transmitted, reflected, qubits: q })
}

/// Amplitudes of two photons after scattering, as seen by the analysis
/// routines.
pub trait PairAmplitudes {
    /// Number of bins per channel.
    fn bins(&self) -> usize;
    /// Normalized input envelope.
    fn input(&self) -> &[f64];
    /// Index of the input pulse centre.
    fn center(&self) -> usize;
    /// Both photons transmitted, in bins `m1` and `m2`.
    fn transmitted(&self, m1: usize, m2: usize) -> C;
    /// Both photons reflected, emitted in bins `l1` and `l2`.
    fn reflected(&self, l1: usize, l2: usize) -> C;
    /// Probability that both photons are transmitted.
    fn transmitted_probability(&self) -> f64;
}

/// Two-photon state of linear qubits, built from one single-photon run.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductState {
    pub single: SinglePhotonState,
}

impl PairAmplitudes for ProductState {
    fn bins(&self) -> usize {
        self.single.input.len()
    }
    fn input(&self) -> &[f64] {
        &self.single.input
    }
    fn center(&self) -> usize {
        self.single.center
    }
    fn transmitted(&self, m1: usize, m2: usize) -> C {
        self.single.transmitted[m1] * self.single.transmitted[m2]
    }
    fn reflected(&self, l1: usize, l2: usize) -> C {
        self.single.reflected[l1] * self.single.reflected[l2]
    }
    fn transmitted_probability(&self) -> f64 {
        let p: f64 = self.single.transmitted.iter().map(|z| z.norm_sqr()).sum();
        p * p
    }
}

#[inline]
fn tri(i: usize, j: usize) -> usize {
    let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
    hi * (hi + 1) / 2 + lo
}

/// Symmetric two-excitation amplitudes over two chiral channels and three
/// qubits.
///
/// Amplitudes are first-quantized: `ψ(a, b) = ψ(b, a)` and the norm sums
/// `|ψ|²` over ordered pairs. Symmetric blocks are stored once per unordered
/// pair, so exchange symmetry holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhotonState {
    bins: usize,
    input: Vec<f64>,
    center: usize,
    hardcore: bool,
    rr: Vec<C>,
    rl: Vec<C>,
    ll: Vec<C>,
    rq: Vec<[C; 3]>,
    lq: Vec<[C; 3]>,
    qq: [C; 6],
    initial_norm: f64,
}

impl TwoPhotonState {
    fn new(input: Vec<f64>, center: usize, hardcore: bool) -> Self {
        let n = input.len();
        let mut rr = vec![C::new(0.0, 0.0); n * (n + 1) / 2];
        for i in 0..n {
            for j in 0..=i {
                rr[tri(i, j)] = C::new(input[i] * input[j], 0.0);
            }
        }
        let zero = C::new(0.0, 0.0);
        let mut state = Self {
            bins: n,
            input,
            center,
            hardcore,
            rr,
            rl: vec![zero; n * n],
            ll: vec![zero; n * (n + 1) / 2],
            rq: vec![[zero; 3]; n],
            lq: vec![[zero; 3]; n],
            qq: [zero; 6],
            initial_norm: 0.0,
        };
        state.initial_norm = state.norm();
        state
    }

    pub fn hardcore(&self) -> bool {
        self.hardcore
    }

    /// Right-moving photon in bin `m`, left-moving photon in bin `l`.
    pub fn mixed(&self, m: usize, l: usize) -> C {
        self.rl[m * self.bins + l]
    }

    /// Photon in right-moving bin `m`, qubit `j` excited.
    pub fn transmitted_qubit(&self, m: usize, j: usize) -> C {
        self.rq[m][j]
    }

    /// Photon in left-moving bin `l`, qubit `j` excited.
    pub fn reflected_qubit(&self, l: usize, j: usize) -> C {
        self.lq[l][j]
    }

    /// Qubits `i` and `j` excited.
    pub fn qubit_pair(&self, i: usize, j: usize) -> C {
        self.qq[tri(i, j)]
    }

    /// Total norm summed over ordered pairs.
    pub fn norm(&self) -> f64 {
        let sq = |z: &C| z.norm_sqr();
        let tri_sum = |v: &[C]| {
            let mut s = 0.0;
            for i in 0..self.bins {
                let row = &v[i * (i + 1) / 2..i * (i + 1) / 2 + i + 1];
                s += 2.0 * row[..i].iter().map(sq).sum::<f64>() + sq(&row[i]);
            }
            s
        };
        let qubit = |v: &[[C; 3]]| v.iter().flatten().map(sq).sum::<f64>();
        let qq: f64 = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| sq(&self.qubit_pair(i, j))).sum();
        tri_sum(&self.rr)
            + tri_sum(&self.ll)
            + 2.0 * self.rl.iter().map(sq).sum::<f64>()
            + 2.0 * qubit(&self.rq)
            + 2.0 * qubit(&self.lq)
            + qq
    }

    /// Norm at the start of the run.
    pub fn initial_norm(&self) -> f64 {
        self.initial_norm
    }

    /// Weight still carried by qubit excitations.
    pub fn qubit_weight(&self) -> f64 {
        let sq = |z: &C| z.norm_sqr();
        let single: f64 = self.rq.iter().chain(&self.lq).flatten().map(sq).sum();
        let pair: f64 = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| sq(&self.qubit_pair(i, j))).sum();
        2.0 * single + pair
    }

    /// Probability that exactly one photon is transmitted.
    pub fn mixed_probability(&self) -> f64 {
        2.0 * self.rl.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    /// Probability that both photons are reflected.
    pub fn reflected_probability(&self) -> f64 {
        (0..self.bins)
            .flat_map(|i| (0..self.bins).map(move |j| (i, j)))
            .map(|(i, j)| self.reflected(i, j).norm_sqr())
            .sum()
    }

    fn step(&mut self, n: usize, ops: &StepOperators) {
        let nb = self.bins;
        let zero = C::new(0.0, 0.0);
        // Local pair block in the order (R_n, L_n, q0, q1, q2).
        let mut x = [zero; 25];
        let mut set = |a: usize, b: usize, v: C| {
            x[a * 5 + b] = v;
            x[b * 5 + a] = v;
        };
        set(0, 0, self.rr[tri(n, n)]);
        set(0, 1, self.rl[n * nb + n]);
        set(1, 1, self.ll[tri(n, n)]);
        for j in 0..3 {
            set(0, 2 + j, self.rq[n][j]);
            set(1, 2 + j, self.lq[n][j]);
            for i in 0..=j {
                set(2 + i, 2 + j, self.qq[tri(i, j)]);
            }
        }
        let mut y = [zero; 25];
        for (r, yr) in y.iter_mut().enumerate() {
            *yr = ops.two[r * 25..(r + 1) * 25].iter().zip(&x).map(|(a, b)| a * b).sum();
        }
        let ys = |a: usize, b: usize| 0.5 * (y[a * 5 + b] + y[b * 5 + a]);

        // One local photon paired with a right-moving bin elsewhere.
        for m in (0..nb).filter(|&m| m != n) {
            let v = [self.rr[tri(n, m)], self.rl[m * nb + n], self.rq[m][0], self.rq[m][1], self.rq[m][2]];
            let w = apply5(&ops.one, &v);
            self.rr[tri(n, m)] = w[0];
            self.rl[m * nb + n] = w[1];
            self.rq[m] = [w[2], w[3], w[4]];
        }
        // One local photon paired with an already emitted left-moving bin.
        for l in 0..n {
            let v = [self.rl[n * nb + l], self.ll[tri(n, l)], self.lq[l][0], self.lq[l][1], self.lq[l][2]];
            let w = apply5(&ops.one, &v);
            self.rl[n * nb + l] = w[0];
            self.ll[tri(n, l)] = w[1];
            self.lq[l] = [w[2], w[3], w[4]];
        }
        self.rr[tri(n, n)] = ys(0, 0);
        self.rl[n * nb + n] = ys(0, 1);
        self.ll[tri(n, n)] = ys(1, 1);
        for j in 0..3 {
            self.rq[n][j] = ys(0, 2 + j);
            self.lq[n][j] = ys(1, 2 + j);
            for i in 0..=j {
                self.qq[tri(i, j)] = ys(2 + i, 2 + j);
            }
        }
        if self.hardcore {
            for j in 0..3 {
                self.qq[tri(j, j)] = zero;
            }
        }
    }
}

impl PairAmplitudes for TwoPhotonState {
    fn bins(&self) -> usize {
        self.bins
    }
    fn input(&self) -> &[f64] {
        &self.input
    }
    fn center(&self) -> usize {
        self.center
    }
    fn transmitted(&self, m1: usize, m2: usize) -> C {
        self.rr[tri(m1, m2)]
    }
    fn reflected(&self, l1: usize, l2: usize) -> C {
        self.ll[tri(l1, l2)]
    }
    fn transmitted_probability(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.bins {
            let row = &self.rr[i * (i + 1) / 2..i * (i + 1) / 2 + i + 1];
            s += 2.0 * row[..i].iter().map(|z| z.norm_sqr()).sum::<f64>() + row[i].norm_sqr();
        }
        s
    }
}

/// Sends two photons with identical envelopes through the qubits and
/// returns the state after the last bin has passed.
pub fn evolve_two_photon(model: &LatticeModel, pulse: &Pulse) -> Result<TwoPhotonState> {
    let (input, center) = pulse.envelope()?;
    let ops = model.step_operators();
    let mut state = TwoPhotonState::new(input, center, model.hardcore);
    for n in 0..state.bins {
        state.step(n, &ops);
    }
    let drift = (state.norm() - state.initial_norm).abs();
    if drift > NORM_BUDGET {
        return Err(Error::AbortedRun(format!("norm drifted by {drift:e}")));
    }
    let leftover = state.qubit_weight();
    if leftover > MAX_LEFTOVER {
        return Err(Error::AbortedRun(format!(
            "{leftover:e} of the excitation is still in the qubits; lengthen the tail"
        )));
    }
    Ok(state)
}
