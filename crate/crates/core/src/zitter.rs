//! Spectral 1D Dirac wavepackets and zitterbewegung.
//!
//! Each momentum mode carries the 2×2 Hamiltonian `H(k) = cħk·α + mc²·β`
//! with `(α, β)` the Euclidean Pauli pair. Evolution is exact per mode; the
//! position expectation is `⟨φ| i d/dk |φ⟩` with a fourth-order centered
//! difference, periodic in `k`.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clifford::{standard_basis, CliffordElement, Signature};

/// Below this residual magnitude the series is reported as non-oscillating.
pub const FLAT_RESIDUAL: f64 = 1e-12;
/// Maximum envelope mass allowed outside the momentum grid.
pub const CLIP_MASS: f64 = 1e-8;
pub const MIN_MODES: usize = 64;

/// SI constants for rest-frequency conversions.
pub mod si {
    pub const ELECTRON_MASS: f64 = 9.109_383_7015e-31;
    pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
    pub const PLANCK: f64 = 6.626_070_15e-34;
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZitterError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

/// Physical constants plus the uniform momentum grid
/// `k_j = k_center + (j − N/2)·dk`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiracConfig {
    pub m: f64,
    pub c: f64,
    pub hbar: f64,
    pub n: usize,
    pub dk: f64,
    #[serde(default)]
    pub k_center: f64,
}

impl Default for DiracConfig {
    fn default() -> Self {
        Self {
            m: 1.0,
            c: 1.0,
            hbar: 1.0,
            n: 4096,
            dk: 1e-4,
            k_center: 0.0,
        }
    }
}

impl DiracConfig {
    pub fn validate(&self) -> Result<(), ZitterError> {
        if !(self.m >= 0.0 && self.m.is_finite()) {
            return Err(ZitterError::Config(format!("mass {} must be nonnegative", self.m)));
        }
        if !(self.c > 0.0 && self.hbar > 0.0) {
            return Err(ZitterError::Config("c and hbar must be positive".into()));
        }
        if self.n < MIN_MODES || !self.n.is_power_of_two() {
            return Err(ZitterError::Config(format!(
                "mode count {} must be a power of two >= {MIN_MODES}",
                self.n
            )));
        }
        if !(self.dk > 0.0 && self.dk.is_finite() && self.k_center.is_finite()) {
            return Err(ZitterError::Config(format!("grid spacing {} must be positive", self.dk)));
        }
        Ok(())
    }

    pub fn k(&self, j: usize) -> f64 {
        self.k_center + (j as f64 - (self.n / 2) as f64) * self.dk
    }

    /// `E(k) = √((ħkc)² + (mc²)²)`.
    pub fn energy(&self, k: f64) -> f64 {
        (self.hbar * k * self.c).hypot(self.m * self.c * self.c)
    }

    /// `ħkc²/E`, zero at a massless `k = 0`.
    pub fn group_velocity(&self, k: f64) -> f64 {
        let e = self.energy(k);
        if e == 0.0 {
            0.0
        } else {
            self.hbar * k * self.c * self.c / e
        }
    }
}

/// One momentum mode: `H u± = ±E u±` with real orthonormal `u±`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub k: f64,
    pub energy: f64,
    pub plus: [f64; 2],
    pub minus: [f64; 2],
}

impl Mode {
    pub fn eigenvalues(&self) -> [f64; 2] {
        [self.energy, -self.energy]
    }
}

/// `H(k)` as a 2×2 matrix built from the Pauli pair.
pub fn hamiltonian(config: &DiracConfig, k: f64) -> CliffordElement {
    let pair = standard_basis(2, &Signature::euclidean(2)).expect("Pauli pair is built in");
    let alpha = pair.gamma(0).scale_real(config.c * config.hbar * k);
    let beta = pair.gamma(1).scale_real(config.m * config.c * config.c);
    &alpha + &beta
}

/// Closed-form eigensystem of `H(k_j)` for every grid mode.
pub fn dirac_modes(config: &DiracConfig) -> Result<Vec<Mode>, ZitterError> {
    config.validate()?;
    Ok((0..config.n)
        .map(|j| {
            let k = config.k(j);
            let h = hamiltonian(config, k);
            // H = [[a, b], [b, −a]] = E [[cos θ, sin θ], [sin θ, −cos θ]]
            let (a, b) = (h.get(0, 0).re, h.get(0, 1).re);
            let half = 0.5 * b.atan2(a);
            let (s, co) = half.sin_cos();
            Mode {
                k,
                energy: a.hypot(b),
                plus: [co, s],
                minus: [-s, co],
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchMix {
    PositiveOnly,
    EqualMix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinorState {
    amps: Vec<[Complex64; 2]>,
    config: DiracConfig,
    modes: Vec<Mode>,
}

fn dot(u: [f64; 2], a: [Complex64; 2]) -> Complex64 {
    a[0] * u[0] + a[1] * u[1]
}

impl SpinorState {
    pub fn amps(&self) -> &[[Complex64; 2]] {
        &self.amps
    }

    pub fn config(&self) -> &DiracConfig {
        &self.config
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    /// `Σ ‖a_j‖² Δk`.
    pub fn norm(&self) -> f64 {
        norm_of(&self.amps, self.config.dk)
    }

    /// Weight on the positive and negative energy branches.
    pub fn occupations(&self) -> (f64, f64) {
        let (mut p, mut q) = (0.0, 0.0);
        for (a, m) in self.amps.iter().zip(&self.modes) {
            p += dot(m.plus, *a).norm_sqr();
            q += dot(m.minus, *a).norm_sqr();
        }
        (p * self.config.dk, q * self.config.dk)
    }
}

fn norm_of(amps: &[[Complex64; 2]], dk: f64) -> f64 {
    amps.iter()
        .map(|a| a[0].norm_sqr() + a[1].norm_sqr())
        .sum::<f64>()
        * dk
}

/// Gaussian packet `exp(−(k − k₀)²/4σ_k²)` on one or both energy branches.
pub fn make_packet(
    config: &DiracConfig,
    k0: f64,
    sigma_k: f64,
    mix: BranchMix,
) -> Result<SpinorState, ZitterError> {
    let modes = dirac_modes(config)?;
    if !(sigma_k > 0.0) {
        return Err(ZitterError::Config(format!("spread {sigma_k} must be positive")));
    }
    if sigma_k < 3.0 * config.dk {
        return Err(ZitterError::Config(format!(
            "spread {sigma_k} unresolved by spacing {}",
            config.dk
        )));
    }
    // Chernoff bound on the Gaussian tail beyond the nearer grid edge.
    let gap = (k0 - config.k(0)).min(config.k(config.n - 1) - k0);
    let z = gap / sigma_k;
    let outside = if gap <= 0.0 { 1.0 } else { (-0.5 * z * z).exp() };
    if outside > CLIP_MASS {
        return Err(ZitterError::Config(format!(
            "envelope clipped by grid edge (tail bound {outside:e})"
        )));
    }
    let mut amps: Vec<[Complex64; 2]> = modes
        .iter()
        .map(|m| {
            let d = (m.k - k0) / sigma_k;
            let g = (-0.25 * d * d).exp();
            let spinor = match mix {
                BranchMix::PositiveOnly => m.plus,
                BranchMix::EqualMix => [
                    (m.plus[0] + m.minus[0]) * std::f64::consts::FRAC_1_SQRT_2,
                    (m.plus[1] + m.minus[1]) * std::f64::consts::FRAC_1_SQRT_2,
                ],
            };
            [Complex64::new(g * spinor[0], 0.0), Complex64::new(g * spinor[1], 0.0)]
        })
        .collect();
    let scale = 1.0 / norm_of(&amps, config.dk).sqrt();
    for a in &mut amps {
        a[0] *= scale;
        a[1] *= scale;
    }
    Ok(SpinorState {
        amps,
        config: *config,
        modes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectationSeries {
    pub times: Vec<f64>,
    pub x_mean: Vec<f64>,
    /// Intercept of the least-squares drift line.
    pub drift_k: f64,
    /// Slope of the least-squares drift line.
    pub drift_v: f64,
    /// `x_mean − (drift_k + drift_v·t)`.
    pub residual: Vec<f64>,
    pub norm: Vec<f64>,
    pub energy: Vec<f64>,
}

impl ExpectationSeries {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x_mean,residual\n");
        for i in 0..self.times.len() {
            out.push_str(&format!("{},{},{}\n", self.times[i], self.x_mean[i], self.residual[i]));
        }
        out
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.residual.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    pub fn norm_drift(&self) -> f64 {
        self.norm.iter().fold(0.0, |m, n| m.max((n - 1.0).abs()))
    }

    pub fn energy_drift(&self) -> f64 {
        let e0 = self.energy.first().copied().unwrap_or(0.0);
        self.energy.iter().fold(0.0, |m, e| m.max((e - e0).abs()))
    }
}

/// Least-squares line `(intercept, slope)` through `(t, y)`.
pub fn fit_line(t: &[f64], y: &[f64]) -> (f64, f64) {
    let n = t.len() as f64;
    let tm = t.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let (mut sty, mut stt) = (0.0, 0.0);
    for (a, b) in t.iter().zip(y) {
        sty += (a - tm) * (b - ym);
        stt += (a - tm) * (a - tm);
    }
    let slope = if stt > 0.0 { sty / stt } else { 0.0 };
    (ym - slope * tm, slope)
}

/// `Σ_j φ_j† · i(dφ/dk)_j · Δk` with a periodic fourth-order stencil.
pub fn position_expectation(amps: &[[Complex64; 2]], dk: f64) -> f64 {
    let n = amps.len();
    let at = |j: isize| &amps[j.rem_euclid(n as isize) as usize];
    let mut acc = 0.0;
    for j in 0..n as isize {
        let (p2, p1, m1, m2) = (at(j + 2), at(j + 1), at(j - 1), at(j - 2));
        let a = &amps[j as usize];
        for s in 0..2 {
            let deriv = (-p2[s] + p1[s] * 8.0 - m1[s] * 8.0 + m2[s]) / (12.0 * dk);
            acc += (a[s].conj() * Complex64::i() * deriv).re;
        }
    }
    acc * dk
}

/// Evolves the packet exactly per mode and records `⟨x⟩`, norm and `⟨H⟩`.
pub fn evolve_expectation(
    state: &SpinorState,
    times: &[f64],
) -> Result<ExpectationSeries, ZitterError> {
    if times.len() < 2 {
        return Err(ZitterError::Malformed("need at least two times".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(ZitterError::Malformed("times must be strictly increasing".into()));
    }
    let cfg = &state.config;
    let proj: Vec<(Complex64, Complex64)> = state
        .amps
        .iter()
        .zip(&state.modes)
        .map(|(a, m)| (dot(m.plus, *a), dot(m.minus, *a)))
        .collect();
    let mut amps = vec![[Complex64::new(0.0, 0.0); 2]; cfg.n];
    let mut x_mean = Vec::with_capacity(times.len());
    let mut norm = Vec::with_capacity(times.len());
    let mut energy = Vec::with_capacity(times.len());
    for &t in times {
        let mut e_acc = 0.0;
        for ((slot, m), (cp, cm)) in amps.iter_mut().zip(&state.modes).zip(&proj) {
            let phase = Complex64::from_polar(1.0, -m.energy * t / cfg.hbar);
            let p = cp * phase;
            let q = cm * phase.conj();
            *slot = [p * m.plus[0] + q * m.minus[0], p * m.plus[1] + q * m.minus[1]];
            e_acc += m.energy * (p.norm_sqr() - q.norm_sqr());
        }
        x_mean.push(position_expectation(&amps, cfg.dk));
        norm.push(norm_of(&amps, cfg.dk));
        energy.push(e_acc * cfg.dk);
    }
    let (drift_k, drift_v) = fit_line(times, &x_mean);
    let residual = times
        .iter()
        .zip(&x_mean)
        .map(|(t, x)| x - (drift_k + drift_v * t))
        .collect();
    Ok(ExpectationSeries {
        times: times.to_vec(),
        x_mean,
        drift_k,
        drift_v,
        residual,
        norm,
        energy,
    })
}

/// `⟨ħkc²/E⟩` under the packet's momentum density.
pub fn mean_group_velocity(state: &SpinorState) -> f64 {
    let mut w = 0.0;
    let mut acc = 0.0;
    for (a, m) in state.amps.iter().zip(&state.modes) {
        let rho = a[0].norm_sqr() + a[1].norm_sqr();
        w += rho;
        acc += rho * state.config.group_velocity(m.k);
    }
    acc / w
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ZbStatus {
    Oscillating,
    NoOscillation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZbSpectrum {
    pub status: ZbStatus,
    pub omega: f64,
    pub amplitude: f64,
    /// Angular frequency spacing `2π/(N·dt)`.
    pub bin_width: f64,
}

/// Dominant angular frequency of the residual from a Hann-windowed DFT.
pub fn zb_frequency(series: &ExpectationSeries) -> Result<ZbSpectrum, ZitterError> {
    let n = series.times.len();
    if n < 256 {
        return Err(ZitterError::Malformed(format!("need at least 256 samples, got {n}")));
    }
    let dt = (series.times[n - 1] - series.times[0]) / (n - 1) as f64;
    let uniform = series
        .times
        .windows(2)
        .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt.abs().max(1.0));
    if !uniform {
        return Err(ZitterError::Malformed("times are not uniformly spaced".into()));
    }
    let bin_width = 2.0 * std::f64::consts::PI / (n as f64 * dt);
    if series.max_abs_residual() < FLAT_RESIDUAL {
        return Ok(ZbSpectrum {
            status: ZbStatus::NoOscillation,
            omega: 0.0,
            amplitude: 0.0,
            bin_width,
        });
    }
    let window: Vec<f64> = (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64).cos())
        .collect();
    let mut buf: Vec<Complex64> = series
        .residual
        .iter()
        .zip(&window)
        .map(|(r, w)| Complex64::new(r * w, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mag: Vec<f64> = buf[..n / 2 + 1].iter().map(|z| z.norm()).collect();
    let peak = (1..mag.len())
        .max_by(|a, b| mag[*a].total_cmp(&mag[*b]))
        .unwrap_or(1);
    let mut offset = 0.0;
    if peak + 1 < mag.len() {
        let (a, b, c) = (mag[peak - 1], mag[peak], mag[peak + 1]);
        let denom = a - 2.0 * b + c;
        if denom != 0.0 {
            offset = (0.5 * (a - c) / denom).clamp(-0.5, 0.5);
        }
    }
    let wsum: f64 = window.iter().sum();
    Ok(ZbSpectrum {
        status: ZbStatus::Oscillating,
        omega: (peak as f64 + offset) * bin_width,
        amplitude: 2.0 * mag[peak] / wsum,
        bin_width,
    })
}

/// Rest frequency `ν₀ = m₀c²/h`.
pub fn de_broglie_frequency(m0: f64, c: f64, h: f64) -> Result<f64, ZitterError> {
    if !(m0 >= 0.0 && c > 0.0 && h > 0.0) || !(m0.is_finite() && c.is_finite() && h.is_finite()) {
        return Err(ZitterError::Domain(format!(
            "need m0 >= 0, c > 0, h > 0 (got {m0}, {c}, {h})"
        )));
    }
    Ok(m0 * c * c / h)
}

/// `t_i = i·dt` for `i < n`.
pub fn uniform_times(n: usize, dt: f64) -> Vec<f64> {
    (0..n).map(|i| i as f64 * dt).collect()
}
