//! The full verification battery behind the `suite` command.
//!
//! Every criterion produces a prefixed block of checks; random draws come
//! from one ChaCha stream seeded by the caller, so a fixed seed reproduces
//! the report byte for byte.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clifford::{
    anticommutator, boosted_basis, clifford_decompose, mass_shell_eigencheck, standard_basis,
    time_factor_residual, verify_basis, BoostContext, Signature, CONSTANT_TOL, BOOSTED_TOL,
};
use crate::expr::{parse, OneForm};
use crate::hamjac::{
    characteristic_flow, dw_along_curve_check, frobenius_obstruction, invariant_parameter,
    is_exact, rho_from_gradient, survey_obstruction, FlowParams, FlowStatus,
    IntegratingFactorVerdict, SampleBox, Trajectory,
};
use crate::report::{Check, VerificationReport};
use crate::wavekin::{
    dalembert_evolve, factorization_residual, proper_velocity_from_speed, transport_check,
    w0_rescale_check, EvolutionStatus, PacketSpec, WaveConfig,
};
use crate::zitter::{
    evolve_expectation, make_packet, uniform_times, zb_frequency, BranchMix, DiracConfig,
    ZbStatus,
};

/// Error raised while assembling the battery itself, not a failed check.
pub type SuiteError = Box<dyn std::error::Error + Send + Sync>;

type Block = Result<VerificationReport, SuiteError>;

fn max_check(name: &str, values: impl IntoIterator<Item = f64>, tol: f64) -> Check {
    let worst = values
        .into_iter()
        .fold(0.0f64, |m, v| if v.is_nan() { f64::NAN } else { m.max(v) });
    Check::new(name, worst, tol)
}

/// Runs every criterion and aggregates the checks.
pub fn run_suite(seed: u64) -> Result<VerificationReport, SuiteError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks: [(&str, Block); 11] = [
        ("c01_clifford", clifford_block(&mut rng)),
        ("c02_mass_shell", mass_shell_block(&mut rng)),
        ("c03_factorization", factorization_block(&mut rng)),
        ("c04_integrating_factor", integrating_factor_block()),
        ("c05_curve_families", curve_block()),
        ("c06_exactness", exactness_block(&mut rng, seed)),
        ("c07_par_perp", par_perp_block(&mut rng)),
        ("c08_transport", transport_block()),
        ("c09_zitterbewegung", zitter_block()),
        ("c10_universal_parameter", universal_parameter_block(&mut rng)),
        ("c11_rescaling", rescale_block()),
    ];
    let mut report = VerificationReport::new();
    for (name, block) in blocks {
        report.extend(block?.prefixed(name));
    }
    Ok(report)
}

pub fn clifford_block(rng: &mut ChaCha8Rng) -> Block {
    let dirac = standard_basis(4, &Signature::minkowski())?;
    let mut r = VerificationReport::new();
    r.push(max_check(
        "dirac_anticommutator",
        verify_basis(&dirac, CONSTANT_TOL).checks.iter().map(|c| c.residual),
        CONSTANT_TOL,
    ));
    let (mut squares, mut cross, mut time) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..100 {
        let ctx = BoostContext::new(rng.gen_range(0.01..0.99), 1.0)?;
        let primed = boosted_basis(&dirac, &ctx)?;
        for a in 0..3 {
            for b in a..3 {
                let ac = anticommutator(primed.gamma(a), primed.gamma(b))?;
                if a == b {
                    squares.push(ac.scale_real(0.5).distance_to_scalar(1.0));
                } else {
                    cross.push(ac.max_abs());
                }
            }
        }
        time.push(time_factor_residual(&dirac, &ctx)?);
    }
    r.push(max_check("boosted_square", squares, BOOSTED_TOL));
    r.push(max_check("boosted_anticommutator", cross, BOOSTED_TOL));
    r.push(max_check("time_factor", time, CONSTANT_TOL));
    Ok(r)
}

pub fn mass_shell_block(rng: &mut ChaCha8Rng) -> Block {
    let dirac = standard_basis(4, &Signature::minkowski())?;
    let mut eig = Vec::new();
    let mut multiplicity = true;
    for _ in 0..50 {
        let space: Vec<f64> = (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let p0 = (1.0 + space.iter().map(|x| x * x).sum::<f64>()).sqrt();
        let mut p = vec![p0];
        p.extend(space);
        let rep = mass_shell_eigencheck(&dirac, &p, 1.0, 1.0)?;
        for c in &rep.checks {
            if c.name.contains("eigenvalue") {
                eig.push(c.residual);
            } else if c.name.contains("multiplicity") {
                multiplicity &= c.pass;
            }
        }
    }
    let mut r = VerificationReport::new();
    r.push(max_check("eigenvalue_relative", eig, 1e-9));
    r.push(Check::flag("multiplicity_2_2", multiplicity));
    Ok(r)
}

const TXYZ: [&str; 4] = ["t", "x", "y", "z"];

/// Random polynomial of total degree ≤ 3 in `(t, x, y, z)`.
pub fn random_polynomial(rng: &mut ChaCha8Rng) -> String {
    let terms = rng.gen_range(2..8);
    (0..terms)
        .map(|_| {
            let c: f64 = rng.gen_range(-2.0..2.0);
            let mut powers = [0u8; 4];
            for _ in 0..rng.gen_range(0..4) {
                powers[rng.gen_range(0..4)] += 1;
            }
            let mono: Vec<String> = TXYZ
                .iter()
                .zip(powers)
                .filter(|(_, p)| *p > 0)
                .map(|(v, p)| format!("{v}^{p}"))
                .collect();
            if mono.is_empty() {
                format!("({c:.6})")
            } else {
                format!("({c:.6})*{}", mono.join("*"))
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

pub fn factorization_block(rng: &mut ChaCha8Rng) -> Block {
    let dirac = standard_basis(4, &Signature::minkowski())?;
    let points: Vec<Vec<f64>> = (0..100)
        .map(|_| (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let mut residuals = Vec::new();
    for _ in 0..20 {
        let psi = parse(&random_polynomial(rng), &TXYZ)?;
        for v in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let primed = boosted_basis(&dirac, &BoostContext::new(v, 1.0)?)?;
            residuals.push(factorization_residual(&psi, v, dirac.gamma(0), &primed, &points)?);
        }
    }
    let mut r = VerificationReport::new();
    r.push(max_check("operator_residual", residuals, 1e-9));
    Ok(r)
}

pub fn integrating_factor_block() -> Block {
    let xyz = ["x", "y", "z"];
    let mut r = VerificationReport::new();
    let domain = SampleBox::symmetric(3);
    let mut errs = Vec::new();
    let mut verdict_ok = true;
    for k in [1.0, -0.5, 2.5] {
        let form = OneForm::parse(&format!("-y, x, {k}"), &xyz)?;
        for p in domain.halton(16, 0) {
            errs.push((frobenius_obstruction(&form, &p)? - 2.0 * k).abs());
        }
        verdict_ok &= survey_obstruction(&form, &domain, 64, 1e-12, 0)?.verdict
            == IntegratingFactorVerdict::NoIntegratingFactor;
    }
    r.push(max_check("rotation_obstruction_2k", errs, 1e-12));
    r.push(Check::flag("rotation_no_integrating_factor", verdict_ok));
    let grad = OneForm::parse("y*z, x*z, x*y", &xyz)?;
    let survey = survey_obstruction(&grad, &domain, 256, 1e-12, 0)?;
    r.push(Check::new("gradient_obstruction", survey.max_abs_obstruction, 1e-12));
    let w = parse("x*y*z", &xyz)?;
    let e3 = Signature::euclidean(3);
    let flow = characteristic_flow(
        &w,
        &[1.0, 1.0, 1.0],
        &FlowParams { step: 1e-3, n_steps: 1000 },
        &e3,
        None,
    )?;
    r.push(Check::new("xyz_rho_ds", dw_along_curve_check(&w, &flow.trajectory, &e3)?, 1e-6));
    Ok(r)
}

pub fn curve_block() -> Block {
    let xy = ["x", "y"];
    let e2 = Signature::euclidean(2);
    let params = FlowParams { step: 1e-3, n_steps: 5000 };
    let mut r = VerificationReport::new();
    for (tag, w, k, start, probe, rho) in [
        ("hyperbola", "x*y", "y^2 - x^2", [0.0, 1.0], [3.0, 4.0], 5.0),
        ("exponential", "x^2 + y", "x*exp(-2*y)", [1.0, 0.0], [1.0, 0.0], 5f64.sqrt()),
    ] {
        let w = parse(w, &xy)?;
        let k = parse(k, &xy)?;
        let flow = characteristic_flow(&w, &start, &params, &e2, Some(&k))?;
        r.push(Check::flag(format!("{tag}_completed"), flow.status == FlowStatus::Completed));
        r.push(Check::new(format!("{tag}_invariant_drift"), flow.invariant_drift, 1e-6));
        r.push(Check::new(
            format!("{tag}_rho"),
            (rho_from_gradient(&w, &probe, &e2)? - rho).abs(),
            1e-9,
        ));
    }
    Ok(r)
}

/// Random smooth potential in `(x, y)` as expression text.
pub fn random_potential(rng: &mut ChaCha8Rng) -> String {
    let mut terms = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            terms.push(format!("({:.6})*x^{i}*y^{j}", rng.gen_range(-2.0..2.0)));
        }
    }
    let (a, b): (f64, f64) = (rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
    terms.push(format!("0.5*sin(({a:.6})*x + ({b:.6})*y)"));
    terms.push(format!("0.3*exp(({:.6})*x*y)", rng.gen_range(-0.5..0.5)));
    terms.join(" + ")
}

pub fn exactness_block(rng: &mut ChaCha8Rng, seed: u64) -> Block {
    let xy = ["x", "y"];
    let domain = SampleBox::symmetric(2);
    let (mut exact_pass, mut perturbed_fail) = (0, 0);
    let (mut worst_exact, mut least_perturbed) = (0.0f64, f64::INFINITY);
    for _ in 0..50 {
        let w = parse(&random_potential(rng), &xy)?;
        let form = w.gradient();
        let v = is_exact(&form, &domain, 256, 1e-9, seed)?;
        exact_pass += usize::from(v.exact);
        worst_exact = worst_exact.max(v.max_asymmetry);
        let k: f64 = rng.gen_range(0.1..2.0);
        let curl = OneForm::parse(&format!("-({k:.6})*y, ({k:.6})*x"), &xy)?;
        let v = is_exact(&form.plus(&curl), &domain, 256, 1e-9, seed)?;
        perturbed_fail += usize::from(!v.exact);
        least_perturbed = least_perturbed.min(v.max_asymmetry);
    }
    let mut r = VerificationReport::new();
    r.push(Check::new("gradients_exact", worst_exact, 1e-9));
    r.push(Check::flag("gradients_all_pass", exact_pass == 50));
    r.push(Check::flag("perturbations_all_fail", perturbed_fail == 50));
    r.note("smallest_perturbed_asymmetry", least_perturbed);
    Ok(r)
}

pub fn par_perp_block(rng: &mut ChaCha8Rng) -> Block {
    let basis = standard_basis(2, &Signature::euclidean(2))?;
    let (mut par_biv, mut par_scalar, mut perp_scalar, mut perp_biv) =
        (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for _ in 0..20 {
        let g: f64 = rng.gen_range(-2.0..2.0);
        let yp: f64 = rng.gen_range(-2.0..2.0);
        let xdot: f64 = rng.gen_range(-2.0..2.0);
        let expected = (1.0 + yp * yp) * g * xdot;
        let velocity = [xdot, xdot * yp];
        let par = clifford_decompose(&[g, g * yp], &velocity, &basis)?;
        par_biv.push(par.bivector_norm());
        par_scalar.push((par.scalar_part - expected).abs());
        let perp = clifford_decompose(&[g * yp, -g], &velocity, &basis)?;
        perp_scalar.push(perp.scalar_part.abs());
        perp_biv.push((perp.bivector[0][1] - expected).abs());
    }
    let mut r = VerificationReport::new();
    r.push(max_check("parallel_bivector", par_biv, 1e-12));
    r.push(max_check("parallel_scalar", par_scalar, 1e-12));
    r.push(max_check("perpendicular_scalar", perp_scalar, 1e-12));
    r.push(max_check("perpendicular_bivector", perp_biv, 1e-12));
    Ok(r)
}

/// The canonical transport run: `v = 0.5`, `σ = 10dx`, `vT = 100dx`.
pub fn canonical_wave(courant: f64) -> (PacketSpec, WaveConfig, f64) {
    let spec = PacketSpec::gaussian(100.0, 10.0, 0.5);
    let cfg = WaveConfig {
        nx: 400,
        courant,
        ..WaveConfig::default()
    };
    (spec, cfg, 200.0)
}

pub fn transport_block() -> Block {
    let mut r = VerificationReport::new();
    for (tag, courant, shape_tol) in [("cfl_0.9", 0.9, 5e-3), ("cfl_1.0", 1.0, 1e-12)] {
        let (spec, cfg, t) = canonical_wave(courant);
        let field = dalembert_evolve(&spec, &cfg, t)?;
        let e = transport_check(&field, &spec)?;
        r.push(Check::flag(
            format!("{tag}_completed"),
            field.status == EvolutionStatus::Completed,
        ));
        r.push(Check::new(format!("{tag}_peak_error"), e.peak_error, cfg.dx));
        r.push(Check::new(format!("{tag}_shape_error"), e.shape_error, shape_tol));
        r.push(Check::new(format!("{tag}_energy_drift"), field.energy_drift, 1e-6));
        r.note(&format!("{tag}_courant"), field.courant);
    }
    Ok(r)
}

/// Standard zitterbewegung run: 1024 samples at `dt = 0.25`, `σ_k = 0.01`.
pub fn zitter_run(
    k0: f64,
    mix: BranchMix,
) -> Result<crate::zitter::ExpectationSeries, crate::zitter::ZitterError> {
    let cfg = DiracConfig {
        k_center: k0,
        ..DiracConfig::default()
    };
    let state = make_packet(&cfg, k0, 0.01, mix)?;
    evolve_expectation(&state, &uniform_times(1024, 0.25))
}

pub fn zitter_block() -> Block {
    let mut r = VerificationReport::new();
    let rest = zitter_run(0.0, BranchMix::EqualMix)?;
    let zb = zb_frequency(&rest)?;
    r.push(Check::new("rest_omega", (zb.omega - 2.0).abs(), zb.bin_width));
    r.note("rest_omega", zb.omega);
    let moving = zitter_run(0.2, BranchMix::EqualMix)?;
    let zb_m = zb_frequency(&moving)?;
    let expected = 2.0 * 1.04f64.sqrt();
    r.push(Check::new("moving_omega", (zb_m.omega - expected).abs(), zb_m.bin_width));
    r.note("moving_omega", zb_m.omega);
    let single = zitter_run(0.0, BranchMix::PositiveOnly)?;
    r.push(Check::new(
        "positive_only_amplitude_ratio",
        single.max_abs_residual() / rest.max_abs_residual(),
        1e-6,
    ));
    r.push(Check::flag(
        "positive_only_no_oscillation",
        zb_frequency(&single)?.status == ZbStatus::NoOscillation,
    ));
    r.push(max_check(
        "norm_drift",
        [&rest, &moving, &single].map(|s| s.norm_drift()),
        1e-12,
    ));
    r.push(max_check(
        "energy_drift",
        [&rest, &moving, &single].map(|s| s.energy_drift()),
        1e-12,
    ));
    Ok(r)
}

fn line(s: &[f64]) -> Vec<Vec<f64>> {
    s.iter().map(|v| vec![*v]).collect()
}

pub fn universal_parameter_block(rng: &mut ChaCha8Rng) -> Block {
    let s: Vec<f64> = (0..201).map(|i| i as f64 * 0.05).collect();
    let (a, w): (f64, f64) = (rng.gen_range(0.1..0.5), rng.gen_range(0.5..2.0));
    let mass: Vec<f64> = s.iter().map(|x| 1.0 + a * (w * x).sin()).collect();
    let scale = rng.gen_range(1.5..4.0);
    let lam = invariant_parameter(&Trajectory::new(s.clone(), line(&s), Some(mass.clone()))?)?;
    let s2: Vec<f64> = s.iter().map(|x| scale * x).collect();
    let m2: Vec<f64> = mass.iter().map(|m| scale * m).collect();
    let lam2 = invariant_parameter(&Trajectory::new(s2.clone(), line(&s2), Some(m2))?)?;
    let mut r = VerificationReport::new();
    r.push(max_check(
        "rescaled_agreement",
        lam.iter().zip(&lam2).map(|(x, y)| (x - y).abs()),
        1e-9,
    ));

    let (m0, v): (f64, f64) = (1.3, 0.6);
    let gamma = 1.0 / (1.0 - v * v).sqrt();
    let t: Vec<f64> = (0..101).map(|i| i as f64 * 0.1).collect();
    let lab = invariant_parameter(&Trajectory::new(t.clone(), line(&t), Some(vec![gamma * m0; t.len()]))?)?;
    r.push(max_check(
        "lab_frame_tau_over_m0",
        lab.iter().zip(&t).map(|(l, ti)| (l - ti / gamma / m0).abs()),
        1e-9,
    ));
    Ok(r)
}

pub fn rescale_block() -> Block {
    let grid: Vec<[f64; 2]> = (0..10)
        .flat_map(|i| (0..10).map(move |j| [i as f64 * 0.5, j as f64 * 0.5 - 2.5]))
        .collect();
    let mut r = VerificationReport::new();
    for beta in [0.3, 0.6, 0.9] {
        let u = proper_velocity_from_speed(beta, 1.0)?;
        let res = w0_rescale_check(1.0, u, 1.0, &grid)?;
        r.push(Check::new(format!("beta_{beta}"), res.max(), 1e-12));
    }
    Ok(r)
}
