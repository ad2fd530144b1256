//! Gamma-matrix bases and Clifford products.
//!
//! A quadratic form `ds² = η_ab dx^a dx^b` is linearized by a set of
//! matrices `γ_a` with `γ_a γ_b + γ_b γ_a = 2 η_ab I`; then the matrix
//! one-form `γ_a dx^a` squares to `ds² I`. This module builds the constant
//! Pauli and Dirac sets, the speed-dependent set `γ'_i` that linearizes the
//! null metric `0 = v²dt² − Σ dx_i²`, the position-dependent polar pair, and
//! splits Clifford products of vectors into scalar and bivector parts.
//!
//! Matrices are dense, row-major, complex, and of dimension 2 or 4 only.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::report::{Check, VerificationReport};

/// Tolerance for identities between constant matrices.
pub const CONSTANT_TOL: f64 = 1e-12;
/// Tolerance for identities between speed-dependent matrices.
pub const BOOSTED_TOL: f64 = 1e-10;
/// Relative tolerance on mass-shell eigenvalues.
pub const EIGEN_REL_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliffordError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// Diagonal of the local metric `η`, one `±1` per axis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature(Vec<i8>);

impl Signature {
    pub fn new(entries: Vec<i8>) -> Result<Self, CliffordError> {
        if !(2..=4).contains(&entries.len()) {
            return Err(CliffordError::Config(format!(
                "signature length {} not in 2..=4",
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|e| **e != 1 && **e != -1) {
            return Err(CliffordError::Config(format!(
                "signature entry {bad} is not +1 or -1"
            )));
        }
        Ok(Self(entries))
    }

    /// `(+,−,−,−)`.
    pub fn minkowski() -> Self {
        Self(vec![1, -1, -1, -1])
    }

    /// All-plus signature of length `n` (2..=4).
    pub fn euclidean(n: usize) -> Self {
        assert!((2..=4).contains(&n), "euclidean signature length {n}");
        Self(vec![1; n])
    }

    /// Parses `"+,-,-,-"`, `"+---"` or `"1,-1,-1,-1"`.
    pub fn parse(text: &str) -> Result<Self, CliffordError> {
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut entries = Vec::new();
        if cleaned.contains(',') {
            for tok in cleaned.split(',') {
                entries.push(match tok {
                    "+" | "1" | "+1" => 1,
                    "-" | "-1" => -1,
                    _ => {
                        return Err(CliffordError::Config(format!(
                            "bad signature entry '{tok}'"
                        )))
                    }
                });
            }
        } else {
            for ch in cleaned.chars() {
                entries.push(match ch {
                    '+' => 1,
                    '-' => -1,
                    _ => {
                        return Err(CliffordError::Config(format!(
                            "bad signature character '{ch}'"
                        )))
                    }
                });
            }
        }
        Self::new(entries)
    }

    pub fn entries(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sign(&self, a: usize) -> f64 {
        f64::from(self.0[a])
    }

    /// `η(u, v) = Σ_a η_aa u^a v^a`.
    pub fn dot(&self, u: &[f64], v: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(u.iter().zip(v))
            .map(|(s, (a, b))| f64::from(*s) * a * b)
            .sum()
    }

    pub fn is_minkowski(&self) -> bool {
        self.0 == [1, -1, -1, -1]
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<&str> = self
            .0
            .iter()
            .map(|e| if *e > 0 { "+" } else { "-" })
            .collect();
        write!(f, "({})", s.join(","))
    }
}

/// A dense square complex matrix of dimension 2 or 4.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordElement {
    dim: usize,
    data: Vec<Complex64>,
}

impl CliffordElement {
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self, CliffordError> {
        if dim != 2 && dim != 4 {
            return Err(CliffordError::Config(format!("matrix dimension {dim} not 2 or 4")));
        }
        if data.len() != dim * dim {
            return Err(CliffordError::Shape {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    /// Builds from real row-major entries.
    pub fn from_real(dim: usize, rows: &[f64]) -> Result<Self, CliffordError> {
        Self::new(dim, rows.iter().map(|x| Complex64::new(*x, 0.0)).collect())
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = ONE;
        }
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    /// 4×4 block matrix `[[a, b], [c, d]]` from 2×2 blocks.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self, CliffordError> {
        for m in [a, b, c, d] {
            if m.dim != 2 {
                return Err(CliffordError::Shape {
                    expected: 2,
                    found: m.dim,
                });
            }
        }
        let mut data = vec![ZERO; 16];
        for (block, (r0, c0)) in [(a, (0, 0)), (b, (0, 2)), (c, (2, 0)), (d, (2, 2))] {
            for r in 0..2 {
                for col in 0..2 {
                    data[(r0 + r) * 4 + c0 + col] = block.get(r, col);
                }
            }
        }
        Ok(Self { dim: 4, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Largest entry modulus, `‖·‖_max`.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    fn check_dim(&self, other: &Self) -> Result<(), CliffordError> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(CliffordError::Shape {
                expected: self.dim,
                found: other.dim,
            })
        }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, CliffordError> {
        self.check_dim(other)?;
        let n = self.dim;
        let mut data = vec![ZERO; n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..n {
                    data[r * n + c] += a * other.data[k * n + c];
                }
            }
        }
        Ok(Self { dim: n, data })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, CliffordError> {
        self.check_dim(other)?;
        Ok(Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, CliffordError> {
        self.check_dim(other)?;
        Ok(Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// `self + s·I`.
    pub fn shift(&self, s: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            out.data[i * self.dim + i] += s;
        }
        out
    }

    /// `‖self − s·I‖_max`.
    pub fn distance_to_scalar(&self, s: f64) -> f64 {
        self.shift(-s).max_abs()
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }
}

// Operator impls panic on dimension mismatch; use the `try_*` methods on untrusted input.
impl Mul for &CliffordElement {
    type Output = CliffordElement;
    fn mul(self, rhs: &CliffordElement) -> CliffordElement {
        self.try_mul(rhs).expect("matrix dimension mismatch")
    }
}

impl Add for &CliffordElement {
    type Output = CliffordElement;
    fn add(self, rhs: &CliffordElement) -> CliffordElement {
        self.try_add(rhs).expect("matrix dimension mismatch")
    }
}

impl Sub for &CliffordElement {
    type Output = CliffordElement;
    fn sub(self, rhs: &CliffordElement) -> CliffordElement {
        self.try_sub(rhs).expect("matrix dimension mismatch")
    }
}

/// An ordered set of generators with the metric signature they realize.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaBasis {
    gammas: Vec<CliffordElement>,
    signature: Signature,
    label: String,
}

impl GammaBasis {
    pub fn new(
        gammas: Vec<CliffordElement>,
        signature: Signature,
        label: impl Into<String>,
    ) -> Result<Self, CliffordError> {
        if gammas.len() != signature.len() {
            return Err(CliffordError::Shape {
                expected: signature.len(),
                found: gammas.len(),
            });
        }
        let dim = gammas[0].dim();
        if let Some(g) = gammas.iter().find(|g| g.dim() != dim) {
            return Err(CliffordError::Shape {
                expected: dim,
                found: g.dim(),
            });
        }
        Ok(Self {
            gammas,
            signature,
            label: label.into(),
        })
    }

    pub fn gammas(&self) -> &[CliffordElement] {
        &self.gammas
    }

    pub fn gamma(&self, a: usize) -> &CliffordElement {
        &self.gammas[a]
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.gammas[0].dim()
    }

    /// Replaces generator `a`. No identity check is performed.
    pub fn with_gamma(mut self, a: usize, gamma: CliffordElement) -> Result<Self, CliffordError> {
        if gamma.dim() != self.dim() {
            return Err(CliffordError::Shape {
                expected: self.dim(),
                found: gamma.dim(),
            });
        }
        self.gammas[a] = gamma;
        Ok(self)
    }
}

/// Speed `v` relative to light speed `c`, with `dτ/dt = √(1 − v²/c²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostContext {
    v: f64,
    c: f64,
    dtau_dt: f64,
}

impl BoostContext {
    pub fn new(v: f64, c: f64) -> Result<Self, CliffordError> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(CliffordError::Domain(format!("light speed c = {c} must be positive")));
        }
        if !(v > 0.0 && v < c) {
            return Err(CliffordError::Domain(format!(
                "speed v = {v} must satisfy 0 < v < c = {c}"
            )));
        }
        let beta = v / c;
        Ok(Self {
            v,
            c,
            dtau_dt: (1.0 - beta * beta).sqrt(),
        })
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn dtau_dt(&self) -> f64 {
        self.dtau_dt
    }

    /// `v/c`.
    pub fn beta(&self) -> f64 {
        self.v / self.c
    }
}

/// Scalar and bivector parts of the Clifford product of two vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordProduct {
    pub scalar_part: f64,
    /// `bivector[a][b] = u^a v^b − u^b v^a`; antisymmetric.
    pub bivector: Vec<Vec<f64>>,
}

impl CliffordProduct {
    /// `√(Σ_{a<b} B_ab²)`.
    pub fn bivector_norm(&self) -> f64 {
        let n = self.bivector.len();
        let mut acc = 0.0;
        for a in 0..n {
            for b in a + 1..n {
                acc += self.bivector[a][b] * self.bivector[a][b];
            }
        }
        acc.sqrt()
    }

    /// `scalar·I + Σ_{a<b} B_ab γ_a γ_b`.
    pub fn reconstruct(&self, basis: &GammaBasis) -> CliffordElement {
        let n = basis.len();
        let mut out = CliffordElement::identity(basis.dim()).scale_real(self.scalar_part);
        for a in 0..n {
            for b in a + 1..n {
                let term = (basis.gamma(a) * basis.gamma(b)).scale_real(self.bivector[a][b]);
                out = &out + &term;
            }
        }
        out
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Pauli matrices `σ_x, σ_y, σ_z`.
pub fn pauli() -> [CliffordElement; 3] {
    [
        CliffordElement::new(2, vec![ZERO, ONE, ONE, ZERO]).unwrap(),
        CliffordElement::new(2, vec![ZERO, c(0.0, -1.0), I, ZERO]).unwrap(),
        CliffordElement::new(2, vec![ONE, ZERO, ZERO, -ONE]).unwrap(),
    ]
}

/// Builds the Dirac set `γ⁰ = diag(I, −I)`, `γ^i = [[0, α_i], [−α_i, 0]]`.
pub fn dirac_from_alphas(alphas: &GammaBasis) -> Result<GammaBasis, CliffordError> {
    if alphas.dim() != 2 || alphas.len() != 3 {
        return Err(CliffordError::Config(format!(
            "need three 2x2 generators, got {} of dimension {}",
            alphas.len(),
            alphas.dim()
        )));
    }
    let id = CliffordElement::identity(2);
    let zero = CliffordElement::zeros(2);
    let mut gammas = vec![CliffordElement::from_blocks(&id, &zero, &zero, &id.scale_real(-1.0))?];
    for alpha in alphas.gammas() {
        gammas.push(CliffordElement::from_blocks(
            &zero,
            alpha,
            &alpha.scale_real(-1.0),
            &zero,
        )?);
    }
    GammaBasis::new(gammas, Signature::minkowski(), "dirac")
}

/// Constant basis of dimension 2 (Pauli set) or 4 (Dirac set).
///
/// The built-in sets square to `(+,+)` / `(+,+,+)` in dimension 2 and
/// `(+,−,−,−)` in dimension 4. A generator whose requested sign differs is
/// multiplied by `i`.
pub fn standard_basis(dim: usize, signature: &Signature) -> Result<GammaBasis, CliffordError> {
    let (base, base_sig, label): (Vec<CliffordElement>, Vec<i8>, &str) = match (dim, signature.len()) {
        (2, 2) => {
            let [sx, _, sz] = pauli();
            (vec![sx, sz], vec![1, 1], "pauli-pair")
        }
        (2, 3) => (pauli().to_vec(), vec![1, 1, 1], "pauli"),
        (4, 4) => {
            let alphas = GammaBasis::new(pauli().to_vec(), Signature::euclidean(3), "pauli")?;
            let d = dirac_from_alphas(&alphas)?;
            (d.gammas, vec![1, -1, -1, -1], "dirac")
        }
        (d, n) => {
            return Err(CliffordError::Config(format!(
                "unsupported basis: dimension {d} with {n} generators"
            )))
        }
    };
    let gammas = base
        .into_iter()
        .zip(base_sig.iter().zip(signature.entries()))
        .map(|(g, (have, want))| if have == want { g } else { g.scale(I) })
        .collect();
    GammaBasis::new(gammas, signature.clone(), label)
}

pub fn anticommutator(
    a: &CliffordElement,
    b: &CliffordElement,
) -> Result<CliffordElement, CliffordError> {
    a.try_mul(b)?.try_add(&b.try_mul(a)?)
}

pub fn commutator(
    a: &CliffordElement,
    b: &CliffordElement,
) -> Result<CliffordElement, CliffordError> {
    a.try_mul(b)?.try_sub(&b.try_mul(a)?)
}

/// One check per unordered index pair: `‖{γ_a,γ_b} − 2η_ab I‖_max ≤ tol`.
pub fn verify_basis(basis: &GammaBasis, tol: f64) -> VerificationReport {
    let mut report = VerificationReport::new();
    let n = basis.len();
    for a in 0..n {
        for b in a..n {
            let target = if a == b { 2.0 * basis.signature().sign(a) } else { 0.0 };
            let residual = anticommutator(basis.gamma(a), basis.gamma(b))
                .map(|m| m.distance_to_scalar(target))
                .unwrap_or(f64::INFINITY);
            report.push(Check::new(
                format!("{}:anticommutator({a},{b})", basis.label()),
                residual,
                tol,
            ));
        }
    }
    report
}

fn require_minkowski_dirac(basis: &GammaBasis) -> Result<(), CliffordError> {
    if basis.dim() != 4 || !basis.signature().is_minkowski() {
        return Err(CliffordError::Config(format!(
            "expected a 4D (+,-,-,-) basis, got dimension {} signature {}",
            basis.dim(),
            basis.signature()
        )));
    }
    Ok(())
}

/// `γ'_i = (c/v)(γ₀ + dτ/dt)γ_i` for `i = 1..3`; squares to `(+,+,+)`.
pub fn boosted_basis(basis: &GammaBasis, ctx: &BoostContext) -> Result<GammaBasis, CliffordError> {
    require_minkowski_dirac(basis)?;
    let prefactor = basis.gamma(0).shift(ctx.dtau_dt()).scale_real(ctx.c() / ctx.v());
    let primed = basis.gammas()[1..]
        .iter()
        .map(|g| &prefactor * g)
        .collect();
    GammaBasis::new(
        primed,
        Signature::euclidean(3),
        format!("boosted(v/c={})", ctx.beta()),
    )
}

/// `‖(γ₀ + dτ/dt)(γ₀ − dτ/dt) − (v²/c²) I‖_max`.
pub fn time_factor_residual(basis: &GammaBasis, ctx: &BoostContext) -> Result<f64, CliffordError> {
    require_minkowski_dirac(basis)?;
    let g0 = basis.gamma(0);
    let product = &g0.shift(ctx.dtau_dt()) * &g0.shift(-ctx.dtau_dt());
    Ok(product.distance_to_scalar(ctx.beta() * ctx.beta()))
}

/// Builds `γ'_i = (c/v)[[0, α_i(1 + dτ/dt)], [α_i(1 − dτ/dt), 0]]` from a 2D triple.
pub fn embed_alpha_basis(
    alphas: &GammaBasis,
    ctx: &BoostContext,
) -> Result<GammaBasis, CliffordError> {
    if alphas.dim() != 2 || alphas.len() != 3 {
        return Err(CliffordError::Config(format!(
            "need three 2x2 generators, got {} of dimension {}",
            alphas.len(),
            alphas.dim()
        )));
    }
    let scale = ctx.c() / ctx.v();
    let a = ctx.dtau_dt();
    let zero = CliffordElement::zeros(2);
    let gammas = alphas
        .gammas()
        .iter()
        .map(|alpha| {
            CliffordElement::from_blocks(
                &zero,
                &alpha.scale_real(scale * (1.0 + a)),
                &alpha.scale_real(scale * (1.0 - a)),
                &zero,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    GammaBasis::new(
        gammas,
        Signature::euclidean(3),
        format!("embedded(v/c={})", ctx.beta()),
    )
}

/// Polar pair `α_r(θ), α_θ(θ)` linearizing `dr² + r²dθ²`.
pub fn polar_basis(theta: f64) -> GammaBasis {
    let (s, co) = theta.sin_cos();
    let alpha_r = CliffordElement::from_real(2, &[s, co, co, -s]).unwrap();
    let alpha_theta = CliffordElement::from_real(2, &[co, -s, -s, -co]).unwrap();
    GammaBasis::new(
        vec![alpha_r, alpha_theta],
        Signature::euclidean(2),
        format!("polar(theta={theta})"),
    )
    .unwrap()
}

/// `Σ_a γ_a v^a`.
pub fn slash(basis: &GammaBasis, vec: &[f64]) -> Result<CliffordElement, CliffordError> {
    if vec.len() != basis.len() {
        return Err(CliffordError::Shape {
            expected: basis.len(),
            found: vec.len(),
        });
    }
    let mut out = CliffordElement::zeros(basis.dim());
    for (g, x) in basis.gammas().iter().zip(vec) {
        out = &out + &g.scale_real(*x);
    }
    Ok(out)
}

/// Eigenvalues of a matrix, sorted by real part then imaginary part.
pub fn eigenvalues(m: &CliffordElement) -> Vec<Complex64> {
    let schur = nalgebra::linalg::Schur::new(m.to_nalgebra());
    let (_, t) = schur.unpack();
    let mut ev: Vec<Complex64> = (0..m.dim()).map(|i| t[(i, i)]).collect();
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    ev
}

/// Checks that `γ^a p_a` has spectrum `{+mc, +mc, −mc, −mc}` for on-shell `p`.
///
/// `p` holds covariant components, contracted with the basis generators as
/// given. The shell condition is `Σ η_aa p_a² = (mc)²`.
pub fn mass_shell_eigencheck(
    basis: &GammaBasis,
    p: &[f64],
    m: f64,
    c: f64,
) -> Result<VerificationReport, CliffordError> {
    require_minkowski_dirac(basis)?;
    let mc = m * c;
    let shell = basis.signature().dot(p, p);
    let scale = p.iter().map(|x| x * x).sum::<f64>().max(mc * mc).max(1e-300);
    let shell_residual = (shell - mc * mc).abs() / scale;
    if shell_residual > EIGEN_REL_TOL {
        return Err(CliffordError::Precondition(format!(
            "momentum off shell: |p·p − (mc)²| / |p|² = {shell_residual:e}"
        )));
    }
    let pslash = slash(basis, p)?;
    let ev = eigenvalues(&pslash);
    let targets = [-mc, -mc, mc, mc];
    // Massless momenta give a nilpotent matrix whose Jordan blocks perturb
    // eigenvalues by O(√ε·|p|); the reference scale for the relative error is |p|.
    let reference = if mc > 0.0 { mc } else { scale.sqrt() };
    let tol = if mc > 0.0 { EIGEN_REL_TOL } else { 1e-7 };

    let mut report = VerificationReport::new();
    report.push(Check::new("mass_shell:shell", shell_residual, EIGEN_REL_TOL));
    for (i, (lambda, target)) in ev.iter().zip(targets).enumerate() {
        let err = (lambda - Complex64::new(target, 0.0)).norm() / reference;
        report.push(Check::new(format!("mass_shell:eigenvalue[{i}]"), err, tol));
    }
    let positive = ev.iter().filter(|z| z.re > 0.5 * mc).count();
    let negative = ev.iter().filter(|z| z.re < -0.5 * mc).count();
    let multiplicity_ok = if mc > 0.0 { positive == 2 && negative == 2 } else { true };
    report.push(Check::flag("mass_shell:multiplicity(2,2)", multiplicity_ok));
    Ok(report)
}

/// Splits `slash(u)·slash(v)` into `η(u,v)` and the wedge `u^a v^b − u^b v^a`.
pub fn clifford_decompose(
    u: &[f64],
    v: &[f64],
    basis: &GammaBasis,
) -> Result<CliffordProduct, CliffordError> {
    let n = basis.len();
    for vec in [u, v] {
        if vec.len() != n {
            return Err(CliffordError::Shape {
                expected: n,
                found: vec.len(),
            });
        }
    }
    let mut bivector = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in 0..n {
            bivector[a][b] = u[a] * v[b] - u[b] * v[a];
        }
    }
    Ok(CliffordProduct {
        scalar_part: basis.signature().dot(u, v),
        bivector,
    })
}
