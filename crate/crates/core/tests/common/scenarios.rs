//! Model computations shared by the integration tests and the acceptance
//! harness.  Each returns a one-line summary or a description of what went
//! wrong.

use std::f64::consts::PI;
use std::sync::Arc;

use maslov::brake::{brake_morse_index, instability_parity, BrakeOptions, IndexBreakdown};
use maslov::hamiltonian::{act_on, ConstantCoefficients, FundamentalSolution, IntegratorOptions};
use maslov::index::{clm_index, crossing_form_matrix, CrossingKind, CrossingOptions};
use maslov::linalg;
use maslov::models::{
    oscillator_brake_data, oscillator_brake_setup, oscillator_crossing_instants, oscillator_hessian, seifert_system,
    H1Profile, OscillatorFamily, SeifertModel, SyntheticSystem, ThrowingBall,
};
use maslov::symplectic::{LagrangianFrame, QuadraticFormReport};

pub type Scenario = Result<Run, String>;

/// Summary of a successful run together with the worst symplectic defect
/// seen by the integrator.
#[derive(Debug)]
pub struct Run {
    pub detail: String,
    pub defect: f64,
}

pub const DEFECT_TOL: f64 = 1e-9;
pub const INSTANT_TOL: f64 = 1e-8;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn defect_of(psi: &FundamentalSolution) -> f64 {
    psi.stats().max_defect.max(psi.sampled_defect(64))
}

fn breakdown_defect(b: &IndexBreakdown) -> f64 {
    b.integration.as_ref().map_or(f64::NAN, |s| s.max_defect)
}

/// Family (I) of the oscillator with `e = 1`.
pub fn oscillator_family_i(mu: f64, expected: i64) -> Scenario {
    let setup = oscillator_brake_setup(mu, 1.0, 0.0).map_err(err)?;
    let b = brake_morse_index(&setup.family_i, &BrakeOptions::default()).map_err(err)?;
    if b.total != expected {
        return Err(format!("mu = {mu}: index {} instead of {expected}; terms {:?}", b.total, b.terms));
    }
    Ok(Run {
        detail: format!("mu = {mu}: index {} (constant -1 form gives {:?})", b.total, b.stated_total),
        defect: breakdown_defect(&b),
    })
}

/// `1 + #{k >= 1 : k < μ + 1/2}`.
pub fn half_interval_count(mu: f64) -> i64 {
    1 + (1..).take_while(|&k| (k as f64) < mu + 0.5).count() as i64
}

/// `clm(L_D, ψ(t) L_N, [0, π])` for the two-dimensional oscillator, with the
/// crossing instants compared against `π/2` and `(2k + 1)π/(2μ)`.
pub fn oscillator_half_interval(mu: f64) -> Scenario {
    let coeffs = ConstantCoefficients::mechanical(oscillator_hessian(mu)).map_err(err)?;
    let psi = FundamentalSolution::integrate(Arc::new(coeffs), (0.0, PI), &IntegratorOptions::default()).map_err(err)?;
    let path = act_on(&psi, &LagrangianFrame::neumann(2)).map_err(err)?;
    let report = clm_index(&path, &LagrangianFrame::dirichlet(2), &CrossingOptions::default()).map_err(err)?;
    let expected = half_interval_count(mu);
    if report.value() != expected {
        return Err(format!("mu = {mu}: clm {} instead of {expected}", report.value()));
    }
    let mut want = oscillator_crossing_instants(mu, (0.0, PI));
    want.push(PI / 2.0);
    want.sort_by(f64::total_cmp);
    let mut got = Vec::new();
    for r in &report.records {
        got.extend(std::iter::repeat_n(r.t, r.multiplicity));
    }
    if got.len() != want.len() {
        return Err(format!("mu = {mu}: crossings at {got:?}, expected {want:?}"));
    }
    let worst = got.iter().zip(&want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max);
    if worst > INSTANT_TOL {
        return Err(format!("mu = {mu}: crossing instants off by {worst:.2e}"));
    }
    Ok(Run {
        detail: format!("mu = {mu}: clm {}, {} crossings within {worst:.1e}", report.value(), got.len()),
        defect: defect_of(&psi),
    })
}

pub fn seifert_profiles() -> [H1Profile; 3] {
    [
        H1Profile::Constant { value: 1.3 },
        H1Profile::Collar { b: 0.8 },
        H1Profile::Cosine { amplitude: 0.4, frequency: 3.0 },
    ]
}

/// One positive crossing of multiplicity `n - 1` at the brake instant.
pub fn seifert_boundary(n: usize, profile: H1Profile) -> Scenario {
    let model = SeifertModel {
        n,
        epsilon: 0.6,
        sigma: 0.3,
        h1: profile,
    };
    let m = model.reduced_n();
    let coeffs = seifert_system(&model).map_err(err)?;
    let psi = FundamentalSolution::integrate(Arc::new(coeffs), (0.0, model.epsilon), &IntegratorOptions::default())
        .map_err(err)?;
    let w = model.boundary_frame(&psi).map_err(err)?;
    let path = act_on(&psi, &w).map_err(err)?;
    let l0 = LagrangianFrame::dirichlet(m);
    let report = clm_index(&path, &l0, &CrossingOptions::default()).map_err(err)?;
    let tag = format!("n = {n}, {profile:?}");
    let [rec] = report.records.as_slice() else {
        return Err(format!("{tag}: {} crossings", report.records.len()));
    };
    let half = 0.5 * model.epsilon;
    if (rec.t - half).abs() > INSTANT_TOL || rec.multiplicity != m || report.value() != m as i64 {
        return Err(format!(
            "{tag}: crossing at {} of multiplicity {}, clm {}",
            rec.t,
            rec.multiplicity,
            report.value()
        ));
    }
    let q = crossing_form_matrix(&psi, &l0, &w, half).map_err(err)?;
    let form = QuadraticFormReport::from_symmetric(&q, 1e-12);
    if form.coindex != m {
        return Err(format!("{tag}: crossing form eigenvalues {:?}", form.eigenvalues));
    }
    let expected = 1.0 / model.h1(half);
    let off = form.eigenvalues.iter().map(|e| (e - expected).abs()).fold(0.0, f64::max);
    if off > 1e-8 {
        return Err(format!("{tag}: crossing form eigenvalues {:?}, expected {expected}", form.eigenvalues));
    }
    Ok(Run {
        detail: format!("{tag}: clm {}, eigenvalues {:.4}", report.value(), expected),
        defect: defect_of(&psi),
    })
}

/// Largest entrywise distance between the integrated flow and
/// `[[I, 0], [t I, I]]` on a uniform grid.
pub fn ball_flow_error(ball: &ThrowingBall, psi: &FundamentalSolution) -> f64 {
    (0..=200)
        .map(|i| {
            let t = ball.epsilon * i as f64 / 200.0;
            linalg::max_abs(&(psi.at(t) - ball.closed_form(t)))
        })
        .fold(0.0, f64::max)
}

/// Integrated ballistic flow on `[0, ε]`.
pub fn ball_flow(n: usize, eps: f64) -> Result<(ThrowingBall, FundamentalSolution), String> {
    let ball = ThrowingBall::new(n, eps).map_err(err)?;
    let psi = FundamentalSolution::integrate(Arc::new(ball.coefficients()), (0.0, eps), &IntegratorOptions::default())
        .map_err(err)?;
    Ok((ball, psi))
}

/// Boundary index, Dirichlet-Dirichlet index and fixed-endpoint Morse index
/// of the ballistic model, plus agreement with the closed-form flow.
pub fn throwing_ball(n: usize) -> Scenario {
    let eps = 0.8;
    let (ball, psi) = ball_flow(n, eps)?;
    let m = ball.reduced_n();
    let closed = ball_flow_error(&ball, &psi);
    if closed > 1e-10 {
        return Err(format!("n = {n}: flow differs from [[1, 0], [t, 1]] by {closed:.2e}"));
    }
    let l0 = LagrangianFrame::dirichlet(m);
    let opts = CrossingOptions::default();

    let boundary = clm_index(&act_on(&psi, &ball.boundary_frame()).map_err(err)?, &l0, &opts).map_err(err)?;
    let [rec] = boundary.records.as_slice() else {
        return Err(format!("n = {n}: {} boundary crossings", boundary.records.len()));
    };
    if boundary.value() != m as i64 || (rec.t - 0.5 * eps).abs() > INSTANT_TOL {
        return Err(format!("n = {n}: boundary index {} with crossing at {}", boundary.value(), rec.t));
    }

    let dd = clm_index(&act_on(&psi, &l0).map_err(err)?, &l0, &opts).map_err(err)?;
    let [start] = dd.records.as_slice() else {
        return Err(format!("n = {n}: {} Dirichlet crossings", dd.records.len()));
    };
    if start.t != 0.0 || start.kind != CrossingKind::Left || start.form.coindex != m || dd.value() != m as i64 {
        return Err(format!(
            "n = {n}: Dirichlet index {} with crossing at {} ({:?}, eigenvalues {:?})",
            dd.value(),
            start.t,
            start.kind,
            start.form.eigenvalues
        ));
    }
    let fixed_endpoint = dd.value() - m as i64;
    if fixed_endpoint != 0 {
        return Err(format!("n = {n}: fixed-endpoint Morse index {fixed_endpoint}"));
    }
    Ok(Run {
        detail: format!(
            "n = {n}: boundary {} at {:.6}, Dirichlet {} at 0, fixed-endpoint 0, flow error {closed:.1e}",
            boundary.value(),
            rec.t,
            dd.value()
        ),
        defect: defect_of(&psi),
    })
}

/// Brake systems checked against the geometric index of the graph path.
pub fn oracle_systems() -> Vec<(String, Result<maslov::brake::BrakeOrbitData, String>)> {
    let mut out = Vec::new();
    for (mu, family) in [(0.4, OscillatorFamily::I), (2.3, OscillatorFamily::I), (0.3, OscillatorFamily::II), (2.3, OscillatorFamily::II)] {
        out.push((
            format!("oscillator {family:?} mu = {mu}"),
            oscillator_brake_data(mu, family, None).map_err(err),
        ));
    }
    for s in [SyntheticSystem::CoupledPair, SyntheticSystem::ThreeDof, SyntheticSystem::Saddle] {
        out.push((format!("{s:?}"), s.data(None).map_err(err)));
    }
    out
}

pub fn oracle(label: &str, data: &maslov::brake::BrakeOrbitData) -> Scenario {
    let b = brake_morse_index(data, &BrakeOptions::full()).map_err(err)?;
    let check = b.check("total equals geometric index - n").ok_or("oracle check missing")?;
    if !check.passed || !b.failed_checks().is_empty() {
        let dump = serde_json::to_string_pretty(&b).map_err(err)?;
        return Err(format!("{label}: {}\n{dump}", check.detail));
    }
    Ok(Run {
        detail: format!("{label}: total {} ({})", b.total, check.detail),
        defect: breakdown_defect(&b),
    })
}

/// A system with `ψ(T) = I` in three degrees of freedom.
pub fn periodic_identity() -> Scenario {
    let data = SyntheticSystem::PeriodicIdentity.data(None).map_err(err)?;
    let p = instability_parity(&data, &BrakeOptions::default()).map_err(err)?;
    if p.morse_index < 1 || p.unstable != Some(true) {
        return Err(format!("index {}, unstable {:?}", p.morse_index, p.unstable));
    }
    let psi = data.fundamental_solution(&IntegratorOptions::default()).map_err(err)?;
    let closing = linalg::max_abs(&(psi.at(data.period()) - nalgebra::DMatrix::identity(6, 6)));
    if closing > 1e-8 {
        return Err(format!("psi(T) differs from the identity by {closing:.2e}"));
    }
    Ok(Run {
        detail: format!("index {}, triple {}, unstable {:?}", p.morse_index, p.triple, p.unstable),
        defect: defect_of(&psi),
    })
}
