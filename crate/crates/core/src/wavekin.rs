//! Null-metric kinematics and the constant-speed wave equation.
//!
//! Operator-level checks (null interval, spinor factorization of the wave
//! operator, `W`/`W₀` rescaling) plus a 1D leapfrog solver used to show
//! dispersionless transport of a Gaussian packet.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clifford::{CliffordElement, CliffordError, GammaBasis};
use crate::expr::{hessian, parse, EvalError, Expr, ParseError};
use crate::hamjac::Trajectory;

/// Edge amplitude, relative to the initial peak, treated as boundary contact.
pub const CONTACT_FRACTION: f64 = 1e-3;
/// Minimum resolvable packet width in cells.
pub const MIN_WIDTH_CELLS: f64 = 3.0;
/// Required clearance between the initial packet and the walls, in widths.
pub const MIN_CLEARANCE_WIDTHS: f64 = 5.0;
pub const MIN_CELLS: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WaveError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Clifford(#[from] CliffordError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullCheck {
    /// `max |v̄²Δt² − ΣΔx²| / (v̄²Δt²)` over intervals.
    pub null_residual: f64,
    /// `max |Δτ²/Δt² − (1 − v̄²/c²)|` over intervals.
    pub lorentz_residual: f64,
    /// `Δτ/Δt` per interval.
    pub dtau_dt: Vec<f64>,
}

/// Null-interval check on a lab-frame trajectory whose first coordinate is `t`.
pub fn null_residual(traj: &Trajectory, c: f64) -> Result<NullCheck, WaveError> {
    if !(c > 0.0) {
        return Err(WaveError::Domain(format!("light speed c = {c} must be positive")));
    }
    let pts = traj.points();
    if pts[0].len() < 2 {
        return Err(WaveError::Malformed("need (t, x...) samples".into()));
    }
    let mut out = NullCheck {
        null_residual: 0.0,
        lorentz_residual: 0.0,
        dtau_dt: Vec::with_capacity(pts.len().saturating_sub(1)),
    };
    for w in pts.windows(2) {
        let dt = w[1][0] - w[0][0];
        if !(dt > 0.0) {
            return Err(WaveError::Malformed(format!(
                "time not increasing at t = {}",
                w[0][0]
            )));
        }
        let dx2: f64 = (1..w[0].len()).map(|i| (w[1][i] - w[0][i]).powi(2)).sum();
        let vbar = dx2.sqrt() / dt;
        if vbar > c * (1.0 + 1e-12) {
            return Err(WaveError::Domain(format!("interval speed {vbar} exceeds c = {c}")));
        }
        let lhs = vbar * vbar * dt * dt;
        if lhs > 0.0 {
            out.null_residual = out.null_residual.max((lhs - dx2).abs() / lhs);
        }
        let dtau2 = (dt * dt - dx2 / (c * c)).max(0.0);
        let ratio = dtau2 / (dt * dt);
        out.lorentz_residual = out
            .lorentz_residual
            .max((ratio - (1.0 - vbar * vbar / (c * c))).abs());
        out.dtau_dt.push(ratio.sqrt());
    }
    Ok(out)
}

/// Applies `D = (γ₀/v)∂_t + Σ γ₀γ′_i ∂_i` twice to `test_fn` and returns the
/// largest entrywise deviation from `((1/v²)ψ_tt − Σψ_ii)·I` over `points`.
pub fn factorization_residual(
    test_fn: &Expr,
    v: f64,
    gamma0: &CliffordElement,
    primed: &GammaBasis,
    points: &[Vec<f64>],
) -> Result<f64, WaveError> {
    if !(v > 0.0) {
        return Err(WaveError::Domain(format!("speed v = {v} must be positive")));
    }
    let n = primed.len() + 1;
    if test_fn.arity() != n {
        return Err(WaveError::Config(format!(
            "test function has {} coordinates, operator needs {n}",
            test_fn.arity()
        )));
    }
    if gamma0.dim() != primed.dim() {
        return Err(CliffordError::Shape {
            expected: primed.dim(),
            found: gamma0.dim(),
        }
        .into());
    }
    let mut coeffs = vec![gamma0.scale_real(1.0 / v)];
    coeffs.extend(primed.gammas().iter().map(|g| gamma0 * g));
    let mut pairs = vec![vec![CliffordElement::zeros(gamma0.dim()); n]; n];
    for mu in 0..n {
        for nu in 0..n {
            pairs[mu][nu] = &coeffs[mu] * &coeffs[nu];
        }
    }

    let mut worst: f64 = 0.0;
    for p in points {
        let h = hessian(test_fn, p)?;
        let mut op = CliffordElement::zeros(gamma0.dim());
        for mu in 0..n {
            for nu in 0..n {
                op = &op + &pairs[mu][nu].scale_real(h[mu][nu]);
            }
        }
        let scalar = h[0][0] / (v * v) - (1..n).map(|i| h[i][i]).sum::<f64>();
        worst = worst.max(op.distance_to_scalar(scalar));
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PacketKind {
    #[default]
    Gaussian,
}

/// A localized pulse `A·G_σ(x − x₀ ∓ vt)` standing in for a travelling delta.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacketSpec {
    pub center: f64,
    pub width: f64,
    pub velocity: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
    /// `+1` moves right, `−1` moves left.
    #[serde(default = "right")]
    pub direction: i8,
    #[serde(default)]
    pub kind: PacketKind,
}

fn one() -> f64 {
    1.0
}

fn right() -> i8 {
    1
}

impl PacketSpec {
    pub fn gaussian(center: f64, width: f64, velocity: f64) -> Self {
        Self {
            center,
            width,
            velocity,
            amplitude: 1.0,
            direction: 1,
            kind: PacketKind::Gaussian,
        }
    }

    pub fn moving_left(mut self) -> Self {
        self.direction = -1;
        self
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    /// Predicted center at time `t`.
    pub fn center_at(&self, t: f64) -> f64 {
        self.center + f64::from(self.direction) * self.velocity * t
    }

    /// Exact travelling profile at `(x, t)`.
    pub fn value(&self, x: f64, t: f64) -> f64 {
        let z = (x - self.center_at(t)) / self.width;
        self.amplitude * (-0.5 * z * z).exp()
    }
}

/// Uniform grid `x_j = origin + j·dx` with a target Courant number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveConfig {
    pub origin: f64,
    pub dx: f64,
    pub nx: usize,
    /// Upper bound on `v·dt/dx`; the step is shortened to land exactly on `T`.
    pub courant: f64,
    pub c: f64,
    /// Steps between stored snapshots; `0` keeps only the first and last.
    pub snapshot_every: usize,
}

impl Default for WaveConfig {
    fn default() -> Self {
        Self {
            origin: 0.0,
            dx: 1.0,
            nx: 512,
            courant: 0.9,
            c: 1.0,
            snapshot_every: 0,
        }
    }
}

impl WaveConfig {
    pub fn x(&self, j: usize) -> f64 {
        self.origin + j as f64 * self.dx
    }

    fn right_edge(&self) -> f64 {
        self.x(self.nx - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum EvolutionStatus {
    Completed,
    /// Stopped at time `t` because the field reached the wall cells.
    BoundaryContact { t: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveField {
    pub x0: f64,
    pub dx: f64,
    pub nx: usize,
    pub dt: f64,
    pub velocity: f64,
    /// Realized `v·dt/dx`.
    pub courant: f64,
    pub snapshots: Vec<Snapshot>,
    /// `max |E − E₀| / E₀` of the staggered discrete energy.
    pub energy_drift: f64,
    pub status: EvolutionStatus,
}

impl WaveField {
    pub fn x(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.dx
    }

    pub fn last(&self) -> Option<&Snapshot> {
        self.snapshots.last()
    }

    /// CSV with a `t` column followed by one column per cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for j in 0..self.nx {
            out.push_str(&format!(",cell_{j}"));
        }
        out.push('\n');
        for snap in &self.snapshots {
            out.push_str(&snap.t.to_string());
            for v in &snap.values {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }

    /// Peak position per snapshot, from argmax with parabolic refinement.
    pub fn peak_trajectory(&self) -> Vec<(f64, f64)> {
        self.snapshots
            .iter()
            .map(|s| (s.t, self.peak_in(&s.values, 0, self.nx)))
            .collect()
    }

    /// Refined location of the largest value among cells `lo..hi`.
    pub fn peak_in(&self, values: &[f64], lo: usize, hi: usize) -> f64 {
        let hi = hi.min(values.len());
        let j = (lo..hi)
            .max_by(|a, b| values[*a].total_cmp(&values[*b]))
            .unwrap_or(lo);
        let mut offset = 0.0;
        if j > 0 && j + 1 < values.len() {
            let (a, b, c) = (values[j - 1], values[j], values[j + 1]);
            let denom = a - 2.0 * b + c;
            if denom != 0.0 {
                offset = (0.5 * (a - c) / denom).clamp(-0.5, 0.5);
            }
        }
        self.x(j) + offset * self.dx
    }

    pub fn cell_of(&self, x: f64) -> usize {
        (((x - self.x0) / self.dx).round().max(0.0) as usize).min(self.nx - 1)
    }
}

fn staggered_energy(prev: &[f64], next: &[f64], dt: f64, dx: f64, v: f64) -> f64 {
    let kinetic: f64 = prev
        .iter()
        .zip(next)
        .map(|(a, b)| ((b - a) / dt).powi(2))
        .sum();
    let potential: f64 = (0..prev.len() - 1)
        .map(|j| (next[j + 1] - next[j]) * (prev[j + 1] - prev[j]))
        .sum::<f64>()
        * (v * v / (dx * dx));
    (kinetic + potential) * dx
}

fn validate(packets: &[PacketSpec], cfg: &WaveConfig) -> Result<f64, WaveError> {
    if cfg.nx < MIN_CELLS {
        return Err(WaveError::Config(format!("nx = {} below {MIN_CELLS}", cfg.nx)));
    }
    if !(cfg.dx > 0.0 && cfg.dx.is_finite()) {
        return Err(WaveError::Config(format!("dx = {} must be positive", cfg.dx)));
    }
    if !(cfg.courant > 0.0 && cfg.courant <= 1.0) {
        return Err(WaveError::Config(format!(
            "Courant number {} outside (0, 1]",
            cfg.courant
        )));
    }
    let first = packets
        .first()
        .ok_or_else(|| WaveError::Config("no packets".into()))?;
    let v = first.velocity;
    for p in packets {
        if p.velocity != v {
            return Err(WaveError::Config("packets must share one medium speed".into()));
        }
        if !(v > 0.0 && v <= cfg.c) {
            return Err(WaveError::Config(format!(
                "packet speed {v} outside (0, c = {}]",
                cfg.c
            )));
        }
        if p.direction.abs() != 1 {
            return Err(WaveError::Config(format!("direction {} is not ±1", p.direction)));
        }
        if p.width < MIN_WIDTH_CELLS * cfg.dx {
            return Err(WaveError::Config(format!(
                "width {} unresolved: need at least {MIN_WIDTH_CELLS} cells",
                p.width
            )));
        }
        let gap = MIN_CLEARANCE_WIDTHS * p.width;
        if p.center - cfg.origin < gap || cfg.right_edge() - p.center < gap {
            return Err(WaveError::Config(format!(
                "packet at {} is within {MIN_CLEARANCE_WIDTHS} widths of a wall",
                p.center
            )));
        }
    }
    Ok(v)
}

/// Leapfrog evolution of `ψ_tt = v²ψ_xx` for one packet.
pub fn dalembert_evolve(
    spec: &PacketSpec,
    cfg: &WaveConfig,
    duration: f64,
) -> Result<WaveField, WaveError> {
    dalembert_evolve_many(std::slice::from_ref(spec), cfg, duration)
}

/// Leapfrog evolution of a superposition of travelling packets.
///
/// The first step is taken from the analytic solution, so each packet starts
/// as a pure mover in its own direction. Walls are held at zero.
pub fn dalembert_evolve_many(
    packets: &[PacketSpec],
    cfg: &WaveConfig,
    duration: f64,
) -> Result<WaveField, WaveError> {
    let v = validate(packets, cfg)?;
    if !(duration >= 0.0 && duration.is_finite()) {
        return Err(WaveError::Config(format!("duration {duration} must be nonnegative")));
    }
    let dt_max = cfg.courant * cfg.dx / v;
    let n_steps = (duration / dt_max - 1e-9).ceil().max(0.0) as usize;
    let dt = if n_steps == 0 { dt_max } else { duration / n_steps as f64 };
    let courant = v * dt / cfg.dx;
    let c2 = courant * courant;

    let nx = cfg.nx;
    let sample = |t: f64| -> Vec<f64> {
        let mut u: Vec<f64> = (0..nx)
            .map(|j| packets.iter().map(|p| p.value(cfg.x(j), t)).sum())
            .collect();
        u[0] = 0.0;
        u[nx - 1] = 0.0;
        u
    };

    let mut prev = sample(0.0);
    let peak0 = prev.iter().fold(0.0f64, |m, u| m.max(u.abs()));
    let mut snapshots = vec![Snapshot {
        t: 0.0,
        values: prev.clone(),
    }];
    let mut status = EvolutionStatus::Completed;
    let mut energy_drift = 0.0;

    if n_steps > 0 {
        let mut cur = sample(dt);
        let e0 = staggered_energy(&prev, &cur, dt, cfg.dx, v);
        let mut next = vec![0.0; nx];
        let mut t_cur = dt;
        let edge = |u: &[f64]| {
            [1, 2, nx - 3, nx - 2]
                .iter()
                .fold(0.0f64, |m, j| m.max(u[*j].abs()))
        };
        let mut step = 1;
        loop {
            if peak0 > 0.0 && edge(&cur) > CONTACT_FRACTION * peak0 {
                status = EvolutionStatus::BoundaryContact { t: t_cur };
                break;
            }
            if cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0 && step < n_steps {
                snapshots.push(Snapshot {
                    t: t_cur,
                    values: cur.clone(),
                });
            }
            if step == n_steps {
                break;
            }
            for j in 1..nx - 1 {
                next[j] = 2.0 * cur[j] - prev[j] + c2 * (cur[j + 1] - 2.0 * cur[j] + cur[j - 1]);
            }
            let e = staggered_energy(&cur, &next, dt, cfg.dx, v);
            if e0 > 0.0 {
                energy_drift = f64::max(energy_drift, (e - e0).abs() / e0);
            }
            std::mem::swap(&mut prev, &mut cur);
            std::mem::swap(&mut cur, &mut next);
            step += 1;
            t_cur = step as f64 * dt;
        }
        snapshots.push(Snapshot {
            t: t_cur,
            values: cur,
        });
    }

    Ok(WaveField {
        x0: cfg.origin,
        dx: cfg.dx,
        nx,
        dt,
        velocity: v,
        courant,
        snapshots,
        energy_drift,
        status,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransportErrors {
    pub peak_error: f64,
    /// `‖ψ(T) − G(x − x₀ − vT)‖₂ / ‖ψ(0)‖₂`.
    pub shape_error: f64,
    /// `‖ψ(T)‖₂` left of `x₀ − 3σ`, relative to `‖ψ(0)‖₂`.
    pub left_fraction: f64,
}

/// Compares the final snapshot with the analytically translated packet.
pub fn transport_check(field: &WaveField, spec: &PacketSpec) -> Result<TransportErrors, WaveError> {
    let (first, last) = match (field.snapshots.first(), field.snapshots.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(WaveError::Malformed("field has no snapshots".into())),
    };
    if last.values.len() != field.nx {
        return Err(WaveError::Malformed("snapshot length differs from nx".into()));
    }
    let norm0 = first.values.iter().map(|u| u * u).sum::<f64>().sqrt();
    if norm0 == 0.0 {
        return Err(WaveError::Malformed("initial field is zero".into()));
    }
    let t = last.t;
    let mut diff2 = 0.0;
    let mut left2 = 0.0;
    let left_edge = spec.center - 3.0 * spec.width;
    for (j, u) in last.values.iter().enumerate() {
        let x = field.x(j);
        diff2 += (u - spec.value(x, t)).powi(2);
        if x < left_edge {
            left2 += u * u;
        }
    }
    let peak = field.peak_in(&last.values, 0, field.nx);
    Ok(TransportErrors {
        peak_error: (peak - spec.center_at(t)).abs(),
        shape_error: diff2.sqrt() / norm0,
        left_fraction: left2.sqrt() / norm0,
    })
}

/// RMS width of `|ψ|²` around its mean in a snapshot.
pub fn rms_width(field: &WaveField, values: &[f64]) -> f64 {
    let w: f64 = values.iter().map(|u| u * u).sum();
    if w == 0.0 {
        return 0.0;
    }
    let mean = values
        .iter()
        .enumerate()
        .map(|(j, u)| field.x(j) * u * u)
        .sum::<f64>()
        / w;
    let var = values
        .iter()
        .enumerate()
        .map(|(j, u)| (field.x(j) - mean).powi(2) * u * u)
        .sum::<f64>()
        / w;
    var.sqrt()
}

/// `dt/dτ = √(1 + u²/c²)` for proper velocity `u`.
pub fn time_dilation_from_proper_velocity(u: f64, c: f64) -> f64 {
    (1.0 + (u / c).powi(2)).sqrt()
}

/// `v = u·dτ/dt` for proper velocity `u`.
pub fn speed_from_proper_velocity(u: f64, c: f64) -> f64 {
    u / time_dilation_from_proper_velocity(u, c)
}

/// `u = v/√(1 − v²/c²)`; errors unless `|v| < c`.
pub fn proper_velocity_from_speed(v: f64, c: f64) -> Result<f64, WaveError> {
    if !(c > 0.0) || !(v.abs() < c) {
        return Err(WaveError::Domain(format!("speed {v} must satisfy |v| < c = {c}")));
    }
    Ok(v / (1.0 - (v / c).powi(2)).sqrt())
}

/// `v = c√(1 − (m₀/m)²)`; errors unless `0 < m₀ ≤ m`.
pub fn speed_from_mass_ratio(m0: f64, m: f64, c: f64) -> Result<f64, WaveError> {
    if !(m0 > 0.0 && m >= m0 && c > 0.0) {
        return Err(WaveError::Domain(format!("need 0 < m0 = {m0} <= m = {m}")));
    }
    Ok(c * (1.0 - (m0 / m).powi(2)).sqrt())
}

/// `m = m₀/√(1 − v²/c²)`; errors unless `|v| < c`.
pub fn mass_from_speed(m0: f64, v: f64, c: f64) -> Result<f64, WaveError> {
    if !(c > 0.0) || !(v.abs() < c) {
        return Err(WaveError::Domain(format!("speed {v} must satisfy |v| < c = {c}")));
    }
    Ok(m0 / (1.0 - (v / c).powi(2)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescaleResiduals {
    /// `max |∂_tW₀ − (v²/c²)∂_tW|`.
    pub time_identity: f64,
    /// `max |∂_xW₀ − ∂_xW|`.
    pub space_identity: f64,
    pub speed: f64,
}

impl RescaleResiduals {
    pub fn max(&self) -> f64 {
        self.time_identity.max(self.space_identity)
    }
}

/// Builds `W = m₀ux − m₀c²ṫ t` and `W₀(t, x) = W(v²t/c², x)` symbolically and
/// checks both rescaling identities at `(t, x)` samples.
pub fn w0_rescale_check(
    m0: f64,
    u: f64,
    c: f64,
    points: &[[f64; 2]],
) -> Result<RescaleResiduals, WaveError> {
    if !(c > 0.0 && u.is_finite() && m0.is_finite()) {
        return Err(WaveError::Domain(format!("invalid parameters m0={m0}, u={u}, c={c}")));
    }
    let tdot = time_dilation_from_proper_velocity(u, c);
    let v = speed_from_proper_velocity(u, c);
    if !(v.abs() < c) {
        return Err(WaveError::Domain(format!("speed {v} is not below c = {c}")));
    }
    let coords = ["t", "x"];
    let w = |time: &str| -> Result<Expr, WaveError> {
        Ok(parse(
            &format!("({m0}) * ({u}) * x - ({m0}) * ({c})^2 * ({tdot}) * ({time})"),
            &coords,
        )?)
    };
    let w_lab = w("t")?;
    let w_rest = w(&format!("({v})^2 / ({c})^2 * t"))?;
    let ratio = (v / c).powi(2);
    let (wt, wx) = (w_lab.derivative(0), w_lab.derivative(1));
    let (w0t, w0x) = (w_rest.derivative(0), w_rest.derivative(1));
    let mut out = RescaleResiduals {
        time_identity: 0.0,
        space_identity: 0.0,
        speed: v,
    };
    for p in points {
        let scale = 1.0 + wt.eval(p)?.abs();
        out.time_identity = out
            .time_identity
            .max((w0t.eval(p)? - ratio * wt.eval(p)?).abs() / scale);
        out.space_identity = out.space_identity.max((w0x.eval(p)? - wx.eval(p)?).abs());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{boosted_basis, standard_basis, BoostContext, Signature};
    use approx::assert_abs_diff_eq;

    fn lab(points: Vec<Vec<f64>>) -> Trajectory {
        let s = (0..points.len()).map(|i| i as f64).collect();
        Trajectory::new(s, points, None).unwrap()
    }

    #[test]
    fn null_interval_examples() {
        let slow = lab((0..20).map(|i| vec![i as f64 * 0.1, 0.05 * i as f64]).collect());
        let r = null_residual(&slow, 1.0).unwrap();
        assert!(r.null_residual <= 1e-12 && r.lorentz_residual <= 1e-12);
        assert!(r.dtau_dt.iter().all(|d| (d - 0.75f64.sqrt()).abs() <= 1e-12));

        let photon = lab((0..10).map(|i| vec![i as f64, i as f64]).collect());
        let r = null_residual(&photon, 1.0).unwrap();
        assert!(r.null_residual <= 1e-12);
        assert!(r.dtau_dt.iter().all(|d| *d <= 1e-6));

        let rest = lab((0..5).map(|i| vec![i as f64, 2.0, 1.0, 0.0]).collect());
        let r = null_residual(&rest, 1.0).unwrap();
        assert_eq!(r.null_residual, 0.0);
        assert!(r.dtau_dt.iter().all(|d| *d == 1.0));

        let backwards = lab(vec![vec![1.0, 0.0], vec![0.5, 0.0]]);
        assert!(matches!(null_residual(&backwards, 1.0), Err(WaveError::Malformed(_))));
    }

    fn dirac_parts(v: f64) -> (CliffordElement, GammaBasis) {
        let basis = standard_basis(4, &Signature::minkowski()).unwrap();
        let primed = boosted_basis(&basis, &BoostContext::new(v, 1.0).unwrap()).unwrap();
        (basis.gamma(0).clone(), primed)
    }

    const TXYZ: [&str; 4] = ["t", "x", "y", "z"];

    fn cloud() -> Vec<Vec<f64>> {
        (0..20)
            .map(|i| {
                let f = i as f64;
                vec![0.1 * f, (0.7 * f).sin(), (1.3 * f).cos(), 0.05 * f - 0.5]
            })
            .collect()
    }

    #[test]
    fn factorization_examples() {
        let (g0, primed) = dirac_parts(0.6);
        let mover = parse("(x - 0.6*t)^2", &TXYZ).unwrap();
        assert!(factorization_residual(&mover, 0.6, &g0, &primed, &cloud()).unwrap() <= 1e-12);
        let square = parse("x^2", &TXYZ).unwrap();
        assert!(factorization_residual(&square, 0.6, &g0, &primed, &cloud()).unwrap() <= 1e-12);
        let constant = parse("7", &TXYZ).unwrap();
        assert_eq!(factorization_residual(&constant, 0.6, &g0, &primed, &cloud()).unwrap(), 0.0);
        let mixed = parse("t^2*x + y*z^2 - 3*t*y + x^3", &TXYZ).unwrap();
        assert!(factorization_residual(&mixed, 0.6, &g0, &primed, &cloud()).unwrap() <= 1e-9);
        let wrong = parse("x^2", &["t", "x"]).unwrap();
        assert!(factorization_residual(&wrong, 0.6, &g0, &primed, &cloud()).is_err());
    }

    #[test]
    fn factorization_detects_wrong_operator() {
        let (g0, primed) = dirac_parts(0.5);
        let skewed = primed.with_gamma(0, g0.clone()).unwrap();
        let square = parse("x^2", &TXYZ).unwrap();
        assert!(factorization_residual(&square, 0.5, &g0, &skewed, &cloud()).unwrap() > 1.0);
    }

    fn canonical(courant: f64) -> (PacketSpec, WaveConfig, f64) {
        let spec = PacketSpec::gaussian(100.0, 10.0, 0.5);
        let cfg = WaveConfig {
            nx: 400,
            courant,
            ..WaveConfig::default()
        };
        (spec, cfg, 200.0)
    }

    #[test]
    fn transport_at_cfl_09() {
        let (spec, cfg, t) = canonical(0.9);
        let field = dalembert_evolve(&spec, &cfg, t).unwrap();
        assert_eq!(field.status, EvolutionStatus::Completed);
        assert!(field.courant <= 0.9 && field.courant > 0.85);
        assert_abs_diff_eq!(field.last().unwrap().t, 200.0, epsilon = 1e-9);
        let e = transport_check(&field, &spec).unwrap();
        assert!(e.peak_error <= cfg.dx, "{e:?}");
        assert!(e.shape_error <= 5e-3, "{e:?}");
        assert!(e.left_fraction <= 1e-3, "{e:?}");
        assert!(field.energy_drift <= 1e-6, "{}", field.energy_drift);
    }

    #[test]
    fn exact_advection_at_unit_courant() {
        let (spec, cfg, t) = canonical(1.0);
        let field = dalembert_evolve(&spec, &cfg, t).unwrap();
        assert_eq!(field.courant, 1.0);
        let e = transport_check(&field, &spec).unwrap();
        assert!(e.shape_error <= 1e-12, "{e:?}");
        assert!(e.peak_error <= 1e-9);
    }

    #[test]
    fn zero_duration_and_zero_field() {
        let (spec, cfg, _) = canonical(0.9);
        let field = dalembert_evolve(&spec, &cfg, 0.0).unwrap();
        assert_eq!(field.snapshots.len(), 1);
        let e = transport_check(&field, &spec).unwrap();
        assert!(e.shape_error <= 1e-15 && e.peak_error <= 1e-12);

        let zero = spec.with_amplitude(0.0);
        let field = dalembert_evolve(&zero, &cfg, 50.0).unwrap();
        assert!(field.snapshots.iter().all(|s| s.values.iter().all(|u| *u == 0.0)));
        assert!(transport_check(&field, &zero).is_err());
    }

    #[test]
    fn opposite_movers_track_their_own_directions() {
        let right = PacketSpec::gaussian(120.0, 8.0, 0.5);
        let left = PacketSpec::gaussian(280.0, 8.0, 0.5).moving_left().with_amplitude(0.7);
        let cfg = WaveConfig {
            nx: 400,
            courant: 1.0,
            ..WaveConfig::default()
        };
        let field = dalembert_evolve_many(&[right, left], &cfg, 60.0).unwrap();
        let last = field.last().unwrap();
        let (r, l) = (right.center_at(last.t), left.center_at(last.t));
        let mid = field.cell_of(0.5 * (r + l));
        let pr = field.peak_in(&last.values, 0, mid);
        let pl = field.peak_in(&last.values, mid, field.nx);
        assert!((pr - r).abs() <= 1e-6 && (pl - l).abs() <= 1e-6, "{pr} {pl}");
        assert!(pr > right.center && pl < left.center);
    }

    #[test]
    fn configuration_errors() {
        let (spec, cfg, _) = canonical(0.9);
        let bad = |c: WaveConfig| dalembert_evolve(&spec, &c, 10.0);
        assert!(matches!(bad(WaveConfig { courant: 1.2, ..cfg }), Err(WaveError::Config(_))));
        assert!(matches!(bad(WaveConfig { nx: 8, ..cfg }), Err(WaveError::Config(_))));
        assert!(matches!(bad(WaveConfig { dx: 5.0, ..cfg }), Err(WaveError::Config(_))));
        let near_wall = PacketSpec::gaussian(30.0, 10.0, 0.5);
        assert!(dalembert_evolve(&near_wall, &cfg, 1.0).is_err());
        let superluminal = PacketSpec::gaussian(100.0, 10.0, 1.5);
        assert!(dalembert_evolve(&superluminal, &cfg, 1.0).is_err());
    }

    #[test]
    fn boundary_contact_truncates() {
        let spec = PacketSpec::gaussian(60.0, 10.0, 0.5);
        let cfg = WaveConfig {
            nx: 128,
            ..WaveConfig::default()
        };
        let field = dalembert_evolve(&spec, &cfg, 400.0).unwrap();
        match field.status {
            EvolutionStatus::BoundaryContact { t } => assert!(t < 400.0 && t > 50.0),
            other => panic!("expected contact, got {other:?}"),
        }
    }

    #[test]
    fn narrower_packets_stay_sharper() {
        let cfg = WaveConfig {
            nx: 600,
            ..WaveConfig::default()
        };
        let mut widths = Vec::new();
        for sigma in [20.0, 10.0, 5.0, 3.0] {
            let spec = PacketSpec::gaussian(150.0, sigma, 0.5);
            let field = dalembert_evolve(&spec, &cfg, 200.0).unwrap();
            let w = rms_width(&field, &field.last().unwrap().values);
            // |G|² has RMS width σ/√2.
            assert!((w - sigma / 2f64.sqrt()).abs() < 0.05 * sigma, "{sigma}: {w}");
            widths.push(w);
        }
        assert!(widths.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn csv_layout() {
        let (spec, cfg, _) = canonical(1.0);
        let field = dalembert_evolve(&spec, &WaveConfig { snapshot_every: 10, ..cfg }, 100.0).unwrap();
        let csv = field.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("t,cell_0,cell_1"));
        assert_eq!(lines.len(), field.snapshots.len() + 1);
        assert_eq!(lines[1].split(',').count(), cfg.nx + 1);
        assert!(field.snapshots.len() >= 4);
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn rescale_identities() {
        let grid: Vec<[f64; 2]> = (0..10)
            .flat_map(|i| (0..10).map(move |j| [i as f64 * 0.3, j as f64 * 0.5 - 2.0]))
            .collect();
        for beta in [0.3, 0.6, 0.9] {
            let u = proper_velocity_from_speed(beta, 1.0).unwrap();
            let r = w0_rescale_check(1.3, u, 1.0, &grid).unwrap();
            assert!(r.max() <= 1e-12, "{beta}: {r:?}");
            assert_abs_diff_eq!(r.speed, beta, epsilon = 1e-12);
        }
        assert!(proper_velocity_from_speed(1.0, 1.0).is_err());
        assert!(w0_rescale_check(1.0, f64::INFINITY, 1.0, &grid).is_err());
    }

    #[test]
    fn speed_mass_helpers() {
        let v = speed_from_mass_ratio(1.0, 1.25, 1.0).unwrap();
        assert_abs_diff_eq!(v, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(mass_from_speed(1.0, 0.6, 1.0).unwrap(), 1.25, epsilon = 1e-15);
        assert_eq!(speed_from_mass_ratio(2.0, 2.0, 3.0).unwrap(), 0.0);
        assert!(speed_from_mass_ratio(2.0, 1.0, 1.0).is_err());
        let u = proper_velocity_from_speed(0.6, 1.0).unwrap();
        assert_abs_diff_eq!(u, 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(speed_from_proper_velocity(u, 1.0), 0.6, epsilon = 1e-15);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn cubic() -> impl Strategy<Value = String> {
            prop::collection::vec((-3.0f64..3.0, 0usize..4, 0usize..4, 0usize..4, 0usize..4), 1..8)
                .prop_map(|terms| {
                    terms
                        .iter()
                        .map(|(c, a, b, d, e)| format!("({c:.5})*t^{a}*x^{b}*y^{d}*z^{e}"))
                        .collect::<Vec<_>>()
                        .join(" + ")
                })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(40))]

            #[test]
            fn factorization_holds(poly in cubic(), v in 0.05f64..0.99) {
                let (g0, primed) = dirac_parts(v);
                let f = parse(&poly, &TXYZ).unwrap();
                let r = factorization_residual(&f, v, &g0, &primed, &cloud()).unwrap();
                prop_assert!(r <= 1e-9, "{poly}: {r}");
            }

            #[test]
            fn lorentz_companion(beta in 0.0f64..0.999, dir in 0.0f64..6.28, n in 2usize..30) {
                let pts: Vec<Vec<f64>> = (0..n)
                    .map(|i| {
                        let t = i as f64 * 0.37;
                        vec![t, beta * t * dir.cos(), beta * t * dir.sin(), 0.0]
                    })
                    .collect();
                let r = null_residual(&lab(pts), 1.0).unwrap();
                prop_assert!(r.lorentz_residual <= 1e-12);
                prop_assert!(r.null_residual <= 1e-12);
            }
        }
    }
}
