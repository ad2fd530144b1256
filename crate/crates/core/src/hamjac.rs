//! Hamilton–Jacobi analysis of 1-forms.
//!
//! Exactness is decided by sampled mixed-partial symmetry on a box. An exact
//! `dW` induces a family of curves with unit tangent
//! `dx^a/ds = η_aa ∂_aW / ρ` and integrating factor `ρ² = Σ η_aa (∂_aW)²`,
//! so that `dW = ρ ds` along every member. The flow is integrated with
//! fixed-step classical RK4.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clifford::{clifford_decompose, CliffordError, GammaBasis, Signature};
use crate::expr::{grad, jacobian, EvalError, Expr, OneForm};

/// Default number of quasi-random samples for exactness tests.
pub const DEFAULT_SAMPLES: usize = 256;
/// Default tolerance on `|∂_b p_a − ∂_a p_b|`.
pub const DEFAULT_EXACT_TOL: f64 = 1e-9;
/// Below this `ρ` a point is treated as singular and the flow stops.
pub const SINGULAR_RHO: f64 = 1e-10;
/// Default RK4 step.
pub const DEFAULT_STEP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HamJacError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Clifford(#[from] CliffordError),
    #[error("singular point: gradient vanishes (rho = {rho:e})")]
    Singular { rho: f64 },
    #[error("null/indefinite at point: rho^2 = {radicand:e} < 0")]
    Indefinite { radicand: f64 },
    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("malformed trajectory: {0}")]
    Trajectory(String),
    #[error("domain error: {0}")]
    Domain(String),
}

/// Axis-aligned sampling box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SampleBox {
    /// `[−2, 2]^n`.
    pub fn symmetric(n: usize) -> Self {
        Self::cube(n, -2.0, 2.0)
    }

    pub fn cube(n: usize, lo: f64, hi: f64) -> Self {
        Self {
            lo: vec![lo; n],
            hi: vec![hi; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Halton points (bases 2, 3, 5, 7) starting at index `seed + 1`.
    pub fn halton(&self, n: usize, seed: u64) -> Vec<Vec<f64>> {
        const PRIMES: [u64; 4] = [2, 3, 5, 7];
        (0..n as u64)
            .map(|i| {
                let index = seed.wrapping_add(i).wrapping_add(1);
                (0..self.dim())
                    .map(|d| {
                        let u = radical_inverse(index, PRIMES[d]);
                        self.lo[d] + u * (self.hi[d] - self.lo[d])
                    })
                    .collect()
            })
            .collect()
    }
}

fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while index > 0 {
        out += f * (index % base) as f64;
        index /= base;
        f *= inv;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactnessVerdict {
    pub exact: bool,
    pub max_asymmetry: f64,
    pub samples: usize,
    pub tolerance: f64,
}

/// Sampled closure test: exact iff `max |∂_b p_a − ∂_a p_b| ≤ tol`.
///
/// Only a local statement on a simply connected box.
pub fn is_exact(
    form: &OneForm,
    domain: &SampleBox,
    n: usize,
    tol: f64,
    seed: u64,
) -> Result<ExactnessVerdict, HamJacError> {
    if domain.dim() != form.len() {
        return Err(HamJacError::Shape {
            expected: form.len(),
            found: domain.dim(),
        });
    }
    if n == 0 {
        return Err(HamJacError::Precondition("need at least one sample".into()));
    }
    let mut max_asymmetry: f64 = 0.0;
    for point in domain.halton(n, seed) {
        max_asymmetry = max_asymmetry.max(asymmetry_at(form, &point)?);
    }
    Ok(ExactnessVerdict {
        exact: max_asymmetry <= tol,
        max_asymmetry,
        samples: n,
        tolerance: tol,
    })
}

fn asymmetry_at(form: &OneForm, point: &[f64]) -> Result<f64, HamJacError> {
    let j = jacobian(form, point)?;
    let mut worst: f64 = 0.0;
    for a in 0..j.len() {
        for b in a + 1..j.len() {
            worst = worst.max((j[a][b] - j[b][a]).abs());
        }
    }
    Ok(worst)
}

/// `ω·(∇×ω)` at `point` for a 3D form. Its vanishing is necessary for an
/// integrating factor to exist.
pub fn frobenius_obstruction(form: &OneForm, point: &[f64]) -> Result<f64, HamJacError> {
    if form.len() != 3 {
        return Err(HamJacError::Shape {
            expected: 3,
            found: form.len(),
        });
    }
    let w = form.eval(point)?;
    let j = jacobian(form, point)?;
    let curl = [j[2][1] - j[1][2], j[0][2] - j[2][0], j[1][0] - j[0][1]];
    Ok(w[0] * curl[0] + w[1] * curl[1] + w[2] * curl[2])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegratingFactorVerdict {
    /// Obstruction vanishes on every sample; necessary condition only.
    AdmitsNecessaryConditionMet,
    NoIntegratingFactor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstructionSurvey {
    pub verdict: IntegratingFactorVerdict,
    pub max_abs_obstruction: f64,
    /// Obstruction at the first sample where it is largest.
    pub representative: f64,
    pub samples: usize,
}

/// Evaluates the obstruction over box samples.
pub fn survey_obstruction(
    form: &OneForm,
    domain: &SampleBox,
    n: usize,
    tol: f64,
    seed: u64,
) -> Result<ObstructionSurvey, HamJacError> {
    let mut max_abs: f64 = 0.0;
    let mut representative = 0.0;
    for point in domain.halton(n, seed) {
        let ob = frobenius_obstruction(form, &point)?;
        if ob.abs() > max_abs {
            max_abs = ob.abs();
            representative = ob;
        }
    }
    Ok(ObstructionSurvey {
        verdict: if max_abs <= tol {
            IntegratingFactorVerdict::AdmitsNecessaryConditionMet
        } else {
            IntegratingFactorVerdict::NoIntegratingFactor
        },
        max_abs_obstruction: max_abs,
        representative,
        samples: n,
    })
}

fn check_signature(sig: &Signature, n: usize) -> Result<(), HamJacError> {
    if sig.len() != n {
        return Err(HamJacError::Shape {
            expected: n,
            found: sig.len(),
        });
    }
    Ok(())
}

/// `ρ` from a gradient vector: `ρ² = Σ η_aa g_a²`.
pub fn rho_from_vector(g: &[f64], signature: &Signature) -> Result<f64, HamJacError> {
    check_signature(signature, g.len())?;
    let radicand = signature.dot(g, g);
    if radicand < 0.0 {
        return Err(HamJacError::Indefinite { radicand });
    }
    let rho = radicand.sqrt();
    if rho < SINGULAR_RHO {
        return Err(HamJacError::Singular { rho });
    }
    Ok(rho)
}

/// Integrating factor `ρ = √(Σ η_aa (∂_aW)²)` at `point`.
pub fn rho_from_gradient(
    w: &Expr,
    point: &[f64],
    signature: &Signature,
) -> Result<f64, HamJacError> {
    rho_from_vector(&grad(w, point)?, signature)
}

/// Parametrized curve samples with an optional mass profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    s: Vec<f64>,
    points: Vec<Vec<f64>>,
    mass: Option<Vec<f64>>,
}

impl Trajectory {
    pub fn new(
        s: Vec<f64>,
        points: Vec<Vec<f64>>,
        mass: Option<Vec<f64>>,
    ) -> Result<Self, HamJacError> {
        if s.len() != points.len() || s.is_empty() {
            return Err(HamJacError::Trajectory(format!(
                "{} parameters for {} points",
                s.len(),
                points.len()
            )));
        }
        if s.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(HamJacError::Trajectory("parameter not strictly increasing".into()));
        }
        let dim = points[0].len();
        if points
            .iter()
            .any(|p| p.len() != dim || p.iter().any(|x| !x.is_finite()))
        {
            return Err(HamJacError::Trajectory("non-finite or ragged point".into()));
        }
        if let Some(m) = &mass {
            if m.len() != s.len() {
                return Err(HamJacError::Trajectory(format!(
                    "{} masses for {} samples",
                    m.len(),
                    s.len()
                )));
            }
        }
        Ok(Self { s, points, mass })
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn mass(&self) -> Option<&[f64]> {
        self.mass.as_deref()
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn with_mass(mut self, mass: Vec<f64>) -> Result<Self, HamJacError> {
        if mass.len() != self.s.len() {
            return Err(HamJacError::Trajectory(format!(
                "{} masses for {} samples",
                mass.len(),
                self.s.len()
            )));
        }
        self.mass = Some(mass);
        Ok(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowParams {
    pub step: f64,
    pub n_steps: usize,
}

impl Default for FlowParams {
    fn default() -> Self {
        Self {
            step: DEFAULT_STEP,
            n_steps: 5000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum FlowStatus {
    Completed,
    /// `ρ` fell below the singular threshold at parameter `s`.
    SingularPoint { s: f64 },
    /// `ρ²` turned negative at parameter `s`.
    Indefinite { s: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveFamilyResult {
    pub trajectory: Trajectory,
    pub rho_along: Vec<f64>,
    /// `max |K(x(s)) − K(x(0))|`, zero when no invariant was supplied.
    pub invariant_drift: f64,
    /// `max |Σ η_aa (dx^a/ds)² − 1|` over accepted steps.
    pub tangent_defect: f64,
    pub status: FlowStatus,
}

impl CurveFamilyResult {
    /// `λ(s) = ∫ c ds/ρ`, taking the instantaneous mass `m = ρ/c`.
    pub fn lambda(&self, c: f64) -> Vec<f64> {
        let inv: Vec<f64> = self.rho_along.iter().map(|r| c / r).collect();
        cumulative_trapezoid(self.trajectory.s(), &inv)
    }
}

struct Flow<'a> {
    gradient: &'a OneForm,
    signature: &'a Signature,
}

enum FieldError {
    Singular,
    Indefinite,
    Eval(EvalError),
}

impl Flow<'_> {
    fn velocity(&self, x: &[f64]) -> Result<(Vec<f64>, f64), FieldError> {
        let g = self.gradient.eval(x).map_err(FieldError::Eval)?;
        let radicand = self.signature.dot(&g, &g);
        if radicand < 0.0 {
            return Err(FieldError::Indefinite);
        }
        let rho = radicand.sqrt();
        if rho < SINGULAR_RHO {
            return Err(FieldError::Singular);
        }
        let v = g
            .iter()
            .enumerate()
            .map(|(a, ga)| self.signature.sign(a) * ga / rho)
            .collect();
        Ok((v, rho))
    }
}

fn axpy(x: &[f64], h: f64, k: &[f64]) -> Vec<f64> {
    x.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

/// Integrates the characteristic curve of `w` through `start`.
///
/// Follows `+η_aa ∂_aW`; pass a negative step for the other branch. Stops
/// early with a status if the curve meets a singular or null point.
pub fn characteristic_flow(
    w: &Expr,
    start: &[f64],
    params: &FlowParams,
    signature: &Signature,
    invariant: Option<&Expr>,
) -> Result<CurveFamilyResult, HamJacError> {
    check_signature(signature, w.arity())?;
    if start.len() != w.arity() {
        return Err(HamJacError::Shape {
            expected: w.arity(),
            found: start.len(),
        });
    }
    if !(params.step != 0.0 && params.step.is_finite()) {
        return Err(HamJacError::Precondition("step must be finite and nonzero".into()));
    }
    let gradient = w.gradient();
    let flow = Flow {
        gradient: &gradient,
        signature,
    };
    let (v0, rho0) = match flow.velocity(start) {
        Ok(v) => v,
        Err(FieldError::Eval(e)) => return Err(e.into()),
        Err(FieldError::Singular) => {
            return Err(HamJacError::Precondition("start is a singular point".into()))
        }
        Err(FieldError::Indefinite) => {
            return Err(HamJacError::Precondition("start is a null/indefinite point".into()))
        }
    };
    let k0 = invariant.map(|k| k.eval(start)).transpose()?;

    let h = params.step;
    let mut s_vals = vec![0.0];
    let mut points = vec![start.to_vec()];
    let mut rho_along = vec![rho0];
    let mut tangent_defect = (signature.dot(&v0, &v0) - 1.0).abs();
    let mut invariant_drift: f64 = 0.0;
    let mut status = FlowStatus::Completed;
    let mut x = start.to_vec();
    let mut k1 = v0;

    for step in 1..=params.n_steps {
        let s_prev = (step - 1) as f64 * h.abs();
        let stage = || -> Result<(Vec<f64>, Vec<f64>, f64), FieldError> {
            let (k2, _) = flow.velocity(&axpy(&x, 0.5 * h, &k1))?;
            let (k3, _) = flow.velocity(&axpy(&x, 0.5 * h, &k2))?;
            let (k4, _) = flow.velocity(&axpy(&x, h, &k3))?;
            let next: Vec<f64> = (0..x.len())
                .map(|a| x[a] + h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]))
                .collect();
            let (v_next, rho_next) = flow.velocity(&next)?;
            Ok((next, v_next, rho_next))
        };
        match stage() {
            Ok((next, v_next, rho_next)) => {
                tangent_defect = tangent_defect.max((signature.dot(&v_next, &v_next) - 1.0).abs());
                if let (Some(k), Some(k0)) = (invariant, k0) {
                    invariant_drift = invariant_drift.max((k.eval(&next)? - k0).abs());
                }
                x = next;
                k1 = v_next;
                s_vals.push(step as f64 * h.abs());
                points.push(x.clone());
                rho_along.push(rho_next);
            }
            Err(FieldError::Eval(e)) => return Err(e.into()),
            Err(FieldError::Singular) => {
                status = FlowStatus::SingularPoint { s: s_prev };
                break;
            }
            Err(FieldError::Indefinite) => {
                status = FlowStatus::Indefinite { s: s_prev };
                break;
            }
        }
    }

    Ok(CurveFamilyResult {
        trajectory: Trajectory::new(s_vals, points, None)?,
        rho_along,
        invariant_drift,
        tangent_defect,
        status,
    })
}

/// Cumulative trapezoid integral of `f` over the grid `s`, starting at 0.
pub fn cumulative_trapezoid(s: &[f64], f: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(s.len());
    let mut acc = 0.0;
    out.push(acc);
    for i in 1..s.len() {
        acc += 0.5 * (s[i] - s[i - 1]) * (f[i] + f[i - 1]);
        out.push(acc);
    }
    out
}

/// `max_i |W(x_i) − W(x_0) − ∫₀^{s_i} ρ ds|`; small along characteristics.
pub fn dw_along_curve_check(
    w: &Expr,
    traj: &Trajectory,
    signature: &Signature,
) -> Result<f64, HamJacError> {
    let gradient = w.gradient();
    let mut rho = Vec::with_capacity(traj.len());
    for p in traj.points() {
        let g = gradient.eval(p)?;
        let radicand = signature.dot(&g, &g);
        if radicand < 0.0 {
            return Err(HamJacError::Indefinite { radicand });
        }
        rho.push(radicand.sqrt());
    }
    let integral = cumulative_trapezoid(traj.s(), &rho);
    let w0 = w.eval(&traj.points()[0])?;
    let mut worst: f64 = 0.0;
    for (p, i) in traj.points().iter().zip(&integral) {
        worst = worst.max((w.eval(p)? - w0 - i).abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParPerpDecomposition {
    pub parallel: Vec<f64>,
    pub perpendicular: Vec<f64>,
    /// Bivector magnitude of the Clifford product of field and tangent.
    pub commutator_norm: f64,
    /// Scalar part of that product, `η(field, tangent)`.
    pub anticommutator_scalar: f64,
}

/// Splits the field value at `point` along and across the unit `tangent`.
pub fn par_perp_decompose(
    field: &OneForm,
    tangent: &[f64],
    point: &[f64],
    basis: &GammaBasis,
) -> Result<ParPerpDecomposition, HamJacError> {
    let sig = basis.signature();
    check_signature(sig, field.len())?;
    if tangent.len() != field.len() {
        return Err(HamJacError::Shape {
            expected: field.len(),
            found: tangent.len(),
        });
    }
    let norm = sig.dot(tangent, tangent);
    if (norm.abs() - 1.0).abs() > 1e-9 {
        return Err(HamJacError::Precondition(format!(
            "tangent is not unit: η(t,t) = {norm}"
        )));
    }
    let f = field.eval(point)?;
    let product = clifford_decompose(&f, tangent, basis)?;
    let along = product.scalar_part / norm;
    let parallel: Vec<f64> = tangent.iter().map(|t| along * t).collect();
    let perpendicular = f.iter().zip(&parallel).map(|(a, b)| a - b).collect();
    Ok(ParPerpDecomposition {
        parallel,
        perpendicular,
        commutator_norm: product.bivector_norm(),
        anticommutator_scalar: product.scalar_part,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerpVerdict {
    /// Exactness forces constant coefficients: constant, or not exact.
    pub passes: bool,
    pub exact: bool,
    pub constant_coefficients: bool,
    pub max_coefficient_gradient: f64,
    pub max_asymmetry: f64,
}

/// Checks that an exact perpendicular field can only have constant coefficients.
///
/// When `tangent` is given, the field must be perpendicular to it at every sample.
pub fn perp_exactness_constraint(
    field: &OneForm,
    tangent: Option<&OneForm>,
    domain: &SampleBox,
    n: usize,
    tol: f64,
    seed: u64,
) -> Result<PerpVerdict, HamJacError> {
    if domain.dim() != field.len() {
        return Err(HamJacError::Shape {
            expected: field.len(),
            found: domain.dim(),
        });
    }
    let mut max_grad: f64 = 0.0;
    let mut max_asym: f64 = 0.0;
    for p in domain.halton(n, seed) {
        if let Some(t) = tangent {
            let fv = field.eval(&p)?;
            let tv = t.eval(&p)?;
            let dot: f64 = fv.iter().zip(&tv).map(|(a, b)| a * b).sum();
            let scale = fv.iter().map(|a| a.abs()).fold(1.0, f64::max)
                * tv.iter().map(|a| a.abs()).fold(1.0, f64::max);
            if dot.abs() > 1e-9 * scale {
                return Err(HamJacError::Precondition(format!(
                    "field not perpendicular to tangent at {p:?} (dot = {dot:e})"
                )));
            }
        }
        let j = jacobian(field, &p)?;
        for row in &j {
            for v in row {
                max_grad = max_grad.max(v.abs());
            }
        }
        max_asym = max_asym.max(asymmetry_at(field, &p)?);
    }
    let exact = max_asym <= tol;
    let constant = max_grad <= tol;
    Ok(PerpVerdict {
        passes: constant || !exact,
        exact,
        constant_coefficients: constant,
        max_coefficient_gradient: max_grad,
        max_asymmetry: max_asym,
    })
}

/// `λ(s_i) = ∫₀^{s_i} ds / m(s)` by trapezoid.
pub fn invariant_parameter(traj: &Trajectory) -> Result<Vec<f64>, HamJacError> {
    let mass = traj
        .mass()
        .ok_or_else(|| HamJacError::Precondition("trajectory has no mass profile".into()))?;
    if let Some(m) = mass.iter().find(|m| !(**m > 0.0)) {
        return Err(HamJacError::Domain(format!("nonpositive mass {m}")));
    }
    let inv: Vec<f64> = mass.iter().map(|m| 1.0 / m).collect();
    Ok(cumulative_trapezoid(traj.s(), &inv))
}
