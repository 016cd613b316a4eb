//! Randomized property suites. Each suite draws its own seeded samples and
//! reports the largest residual it saw against a fixed threshold.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clifford::{cmax_abs, lowered_bracket, GammaRep};
use crate::expr::Expression;
use crate::fixtures::{self, random_scalar_source, random_spinor_source, random_vector_source, Fixture};
use crate::geometry::{
    christoffel_from_metric, covariant_derivative_covector, metric_at, orthonormal_frame, FrameAt, GeometrySpec,
    SpinorField, VectorField,
};
use crate::jets::{
    action_tau, action_v, action_vertical, brute_force_multiply, w11_identity, w11_inverse, w11_multiply,
    GroupDescriptor, JetGroupElement,
};
use crate::liealg::{
    adjoint_action, decompose_gl, eta_adjoint, eta_matrix, max_abs, random_so_algebra, random_so_element, Signature,
};
use crate::liederiv::{
    flow_lie_spinor_oracle, flow_lie_tensor_oracle, killing_residual, lichnerowicz, lie_density, lie_spinor_covariant,
    lie_spinor_kosmann, natural_metric_lie, reductive_metric_lie, spinor_max_abs, FLOW_DT,
};
use crate::lifts::{kosmann_coordinate_from, kosmann_split, natural_lift_coeffs};
use crate::{Complex64, Mat, Result};

/// Default sample counts.
pub const LIEALG_SAMPLES: usize = 1000;
pub const EXPR_SAMPLES: usize = 500;
pub const JET_SAMPLES: usize = 500;
pub const GEOMETRY_SAMPLES: usize = 200;

/// Outcome of one property suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: String,
    pub samples: usize,
    pub max_residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl SuiteResult {
    /// `max_residual` is `>= threshold` for a failure; `NaN` residuals fail.
    fn new(name: &str, samples: usize, max_residual: f64, threshold: f64) -> Self {
        SuiteResult { name: name.into(), samples, max_residual, threshold, pass: max_residual <= threshold }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Overrides every suite's default sample count.
    pub samples: Option<usize>,
}

/// Accumulates the worst residual of a suite.
struct Worst(f64);

impl Worst {
    fn new() -> Self {
        Worst(0.0)
    }

    fn push(&mut self, r: f64) {
        if r.is_nan() || r > self.0 {
            self.0 = if r.is_nan() { f64::NAN } else { r };
        }
    }

    fn merge_nan(self) -> f64 {
        self.0
    }
}

type Suite = fn(&mut ChaCha8Rng, usize, &[Fixture]) -> Result<SuiteResult>;

fn suites() -> Vec<(usize, Suite)> {
    vec![
        (LIEALG_SAMPLES, liealg_reconstruction),
        (LIEALG_SAMPLES, liealg_membership),
        (LIEALG_SAMPLES, liealg_ad_invariance),
        (LIEALG_SAMPLES, liealg_trace_orthogonality),
        (EXPR_SAMPLES, expr_dual_vs_fd),
        (EXPR_SAMPLES, expr_round_trip),
        (GEOMETRY_SAMPLES, geometry_frame_metric),
        (GEOMETRY_SAMPLES, geometry_metric_compatibility),
        (GEOMETRY_SAMPLES, geometry_frame_derivative),
        (GEOMETRY_SAMPLES, clifford_relations),
        (GEOMETRY_SAMPLES, clifford_homomorphism),
        (GEOMETRY_SAMPLES, clifford_linearity),
        (GEOMETRY_SAMPLES, lifts_split_reconstruction),
        (GEOMETRY_SAMPLES, lifts_killing_characterization),
        (GEOMETRY_SAMPLES, lifts_frame_equivariance),
        (GEOMETRY_SAMPLES, liederiv_recast),
        (GEOMETRY_SAMPLES, liederiv_reductive_metric),
        (GEOMETRY_SAMPLES, liederiv_natural_metric),
        (GEOMETRY_SAMPLES, liederiv_flow_oracle),
        (GEOMETRY_SAMPLES, liederiv_linearity),
        (GEOMETRY_SAMPLES, liederiv_leibniz),
        (GEOMETRY_SAMPLES, liederiv_killing_reduction),
        (GEOMETRY_SAMPLES, liederiv_density_flow),
        (JET_SAMPLES, jets_group_axioms),
        (JET_SAMPLES, jets_oracle),
        (JET_SAMPLES, jets_actions),
    ]
}

/// Runs every suite on the given fixtures. A sample count of zero runs nothing.
pub fn run_all(fixtures: &[Fixture], config: VerifyConfig) -> Result<Vec<SuiteResult>> {
    if config.samples == Some(0) {
        return Ok(Vec::new());
    }
    suites()
        .into_iter()
        .enumerate()
        .map(|(k, (default, suite))| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_mul(1_000_003).wrapping_add(k as u64));
            suite(&mut rng, config.samples.unwrap_or(default), fixtures)
        })
        .collect()
}

/// Runs every suite on the builtin fixture set.
pub fn run_builtin(config: VerifyConfig) -> Result<Vec<SuiteResult>> {
    run_all(&fixtures::all(), config)
}

fn random_matrix(m: usize, rng: &mut ChaCha8Rng) -> Mat {
    Mat::from_fn(m, m, |_, _| rng.gen_range(-1.0..1.0))
}

fn signatures() -> Vec<Signature> {
    Signature::all_up_to(4)
}

// ---------------------------------------------------------------------------
// liealg

fn liealg_reconstruction(rng: &mut ChaCha8Rng, n: usize, _: &[Fixture]) -> Result<SuiteResult> {
    let mut worst = Worst::new();
    for sig in signatures() {
        for _ in 0..n {
            let m = random_matrix(sig.dim(), rng);
            worst.push(max_abs(&(decompose_gl(&m, sig)?.reconstruct() - m)));
        }
    }
    Ok(SuiteResult::new("liealg.reconstruction", n, worst.merge_nan(), 1e-12))
}

fn liealg_membership(rng: &mut ChaCha8Rng, n: usize, _: &[Fixture]) -> Result<SuiteResult> {
    let mut worst = Worst::new();
    for sig in signatures() {
        for _ in 0..n {
            let split = decompose_gl(&random_matrix(sig.dim(), rng), sig)?;
            worst.push(max_abs(&(eta_adjoint(&split.antisym, sig)? + &split.antisym)));
            worst.push(max_abs(&(eta_adjoint(&split.sym_traceless, sig)? - &split.sym_traceless)));
            worst.push(split.sym_traceless.trace().abs());
        }
    }
    Ok(SuiteResult::new("liealg.membership", n, worst.merge_nan(), 1e-12))
}

fn liealg_ad_invariance(rng: &mut ChaCha8Rng, n: usize, _: &[Fixture]) -> Result<SuiteResult> {
    let mut worst = Worst::new();
    for sig in signatures() {
        for _ in 0..n {
            let o = random_so_element(sig, rng);
            let m = random_matrix(sig.dim(), rng);
            let split = decompose_gl(&m, sig)?;
            let moved = decompose_gl(&adjoint_action(&o, &m)?, sig)?;
            worst.push(max_abs(&(moved.antisym - adjoint_action(&o, &split.antisym)?)));
            worst.push(max_abs(&(moved.sym_traceless - adjoint_action(&o, &split.sym_traceless)?)));
            worst.push((moved.trace_coeff - split.trace_coeff).abs());
        }
    }
    Ok(SuiteResult::new("liealg.ad_invariance", n, worst.merge_nan(), 1e-9))
}

fn liealg_trace_orthogonality(rng: &mut ChaCha8Rng, n: usize, _: &[Fixture]) -> Result<SuiteResult> {
    let mut worst = Worst::new();
    for m in 1..=4 {
        let sig = Signature::euclidean(m);
        for _ in 0..n {
            let split = decompose_gl(&random_matrix(m, rng), sig)?;
            worst.push((split.antisym * split.sym_traceless).trace().abs());
        }
    }
    Ok(SuiteResult::new("liealg.trace_orthogonality", n, worst.merge_nan(), 1e-12))
}

// ---------------------------------------------------------------------------
// expr

/// Source text of a random expression tree over `x0..x{m-1}` that is smooth
/// on all of ℝ^m.
pub fn random_expression_source(rng: &mut ChaCha8Rng, depth: usize, m: usize) -> String {
    if depth == 0 || rng.gen_bool(0.15) {
        return if rng.gen_bool(0.6) {
            format!("x{}", rng.gen_range(0..m))
        } else {
            format!("{:.4}", rng.gen_range(0.0..1.0))
        };
    }
    let a = random_expression_source(rng, depth - 1, m);
    match rng.gen_range(0..11) {
        0 => format!("({a}) + ({})", random_expression_source(rng, depth - 1, m)),
        1 => format!("({a}) - ({})", random_expression_source(rng, depth - 1, m)),
        2 => format!("({a}) * ({})", random_expression_source(rng, depth - 1, m)),
        3 => format!("({a}) / (1.5 + ({})^2)", random_expression_source(rng, depth - 1, m)),
        4 => format!("sin({a})"),
        5 => format!("cos({a})"),
        6 => format!("exp(sin({a}))"),
        7 => format!("log(1 + ({a})^2)"),
        8 => format!("sqrt(1 + ({a})^2)"),
        9 => format!("({a})^{}", rng.gen_range(2..4)),
        _ => format!("-({a})"),
    }
}

fn expr_names(m: usize) -> Vec<String> {
    (0..m).map(|i| format!("x{i}")).collect()
}

/// Step of the finite-difference gradient oracle.
pub const FD_STEP: f64 = 1e-5;

/// A random depth-6 expression over `x0..x2` together with a point in
/// `[−1, 1]³` where the finite-difference oracle is trustworthy: the
/// gradients at steps `h` and `2h` agree to `1e−6` relative. Steep draws
/// (nested powers of `exp(sin(..))` and the like) are redrawn.
pub fn random_expression_draw(rng: &mut ChaCha8Rng) -> Result<(Expression, Vec<f64>)> {
    let names = expr_names(3);
    loop {
        let e = Expression::parse(&random_expression_source(rng, 6, 3), &names)?;
        let pt: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (fine, coarse) = (e.fd_gradient(&pt, FD_STEP)?, e.fd_gradient(&pt, 2.0 * FD_STEP)?);
        if fine.iter().zip(&coarse).all(|(a, b)| (a - b).abs() <= 1e-6 * (1.0 + a.abs())) {
            return Ok((e, pt));
        }
    }
}

fn expr_dual_vs_fd(rng: &mut ChaCha8Rng, n: usize, _: &[Fixture]) -> Result<SuiteResult> {
    let mut worst = Worst::new();
    for _ in 0..n {
        let (e, pt) = random_expression_draw(rng)?;
        let dual = e.eval_dual(&pt)?;
        let fd = e.fd_gradient(&pt, FD_STEP)?;
        for (g, f) in dual.grad.iter().zip(&fd) {
            worst.push((g - f).abs() / (1.0 + g.abs()));
        }
    }
    Ok(SuiteResult::new("expr.dual_vs_fd", n, worst.merge_nan(), 1e-5))
}

fn expr_round_trip(rng: &mut ChaCha8Rng, n: usize, _: &[Fixture]) -> Result<SuiteResult> {
    let names = expr_names(3);
    let mut mismatches = 0usize;
    for _ in 0..n {
        let e = Expression::parse(&random_expression_source(rng, 6, 3), &names)?;
        let again = Expression::parse(&e.to_string(), &names)?;
        if again != e {
            mismatches += 1;
        }
    }
    Ok(SuiteResult::new("expr.round_trip", n, mismatches as f64, 0.0))
}

// ---------------------------------------------------------------------------
// geometry

/// Cycles through the fixtures, drawing one point per sample.
fn draws<'a>(rng: &mut ChaCha8Rng, n: usize, fixtures: &'a [Fixture]) -> Vec<(&'a Fixture, Vec<f64>)> {
    if fixtures.is_empty() {
        return Vec::new();
    }
    (0..n)
        .map(|k| {
            let fx = &fixtures[k % fixtures.len()];
            (fx, fx.sample_point(rng))
        })
        .collect()
}

fn geometry_frame_metric(rng: &mut ChaCha8Rng, n: usize, fixtures: &[Fixture]) -> Result<SuiteResult> {
    let mut worst = Worst::new();
    for (fx, pt) in draws(rng, n, fixtures) {
        let metric = metric_at(&fx.spec, &pt)?;
        let frame = orthonormal_frame(&fx.spec, &pt)?;
        let eta = eta_matrix(fx.spec.signature());
        worst.push(max_abs(&(frame.e.transpose() * &metric.g * &frame.e - eta)));
    }
    Ok(SuiteResult::new("geometry.frame_metric", n, worst.merge_nan(), 1e-9))
}

fn geometry_metric_compatibility(rng: &mut ChaCha8Rng, n: usize, fixtures: &[Fixture]) -> Result<SuiteResult> {
    let mut worst = Worst::new();
    for (fx, pt) in draws(rng, n, fixtures) {
        let metric = metric_at(&fx.spec, &pt)?;
        let chris = christoffel_from_metric(&metric);
        for rho in 0..fx.spec.dim() {
            // Γ_ρ[(λ, μ)] = Γ^λ_{ρμ}
            let along = chris.along(rho);
            let term = along.transpose() * &metric.g;
            worst.push(max_abs(&(&metric.dg[rho] - &term - term.transpose())));
        }
    }
    Ok(SuiteResult::new("geometry.metric_compatibility", n, worst.merge_nan(), 1e-9))
}

fn geometry_frame_derivative(rng: &mut ChaCha8Rng, n: usize, fixtures: &[Fixture]) -> Result<SuiteResult> {
    let h = 1e-5;
    let mut worst = Worst::new();
    for (fx, pt) in draws(rng, n, fixtures) {
        let frame = orthonormal_frame(&fx.spec, &pt)?;
        let mut shifted = pt.clone();
        for nu in 0..fx.spec.dim() {
            shifted[nu] = pt[nu] + h;
            let plus = orthonormal_frame(&fx.spec, &shifted)?.e;
            shifted[nu] = pt[nu] - h;
            let minus = orthonormal_frame(&fx.spec, &shifted)?.e;
            shifted[nu] = pt[nu];
            worst.push(max_abs(&((plus - minus) / (2.0 * h) - &frame.de[nu])));
        }
    }
    Ok(SuiteResult::new("geometry.frame_derivative_fd", n, worst.merge_nan(), 1e-5))
}

// ---------------------------------------------------------------------------
// clifford

fn clifford_relations(_: &mut ChaCha8Rng, _: usize, _: &[Fixture]) -> Result<SuiteResult> {
    let sigs = Signature::all_up_to(5);
    let mut worst = Worst::new();
    for &sig in &sigs {
        worst.push(GammaRep::new(sig).clifford_residual());
    }
    Ok(SuiteResult::new("clifford.relations", sigs.len(), worst.merge_nan(), 1e-12))
}

fn clifford_sigs() -> Vec<Signature> {
    Signature::all_up_to(5).into_iter().filter(|s| s.dim() >= 2).collect()
}

fn clifford_homomorphism(rng: &mut ChaCha8Rng, n: usize, _: &[Fixture]) -> Result<SuiteResult> {
    let sigs = clifford_sigs();
    let reps: Vec<GammaRep> = sigs.iter().map(|&s| GammaRep::new(s)).collect();
    let mut worst = Worst::new();
    for k in 0..n {
        let (sig, rep) = (sigs[k % sigs.len()], &reps[k % sigs.len()]);
        let eta = eta_matrix(sig);
        let a = &eta * random_so_algebra(sig, rng, 1.0);
        let b = &eta * random_so_algebra(sig, rng, 1.0);
        let (sa, sb) = (rep.spin_algebra_map(&a)?, rep.spin_algebra_map(&b)?);
        let bracket = rep.spin_algebra_map(&lowered_bracket(&a, &b, sig))?;
        worst.push(cmax_abs(&(&sa * &sb - &sb * &sa - bracket)));
    }
    Ok(SuiteResult::new("clifford.homomorphism", n, worst.merge_nan(), 1e-10))
}

fn clifford_linearity(rng: &mut ChaCha8Rng, n: usize, _: &[Fixture]) -> Result<SuiteResult> {
    let sigs = clifford_sigs();
    let reps: Vec<GammaRep> = sigs.iter().map(|&s| GammaRep::new(s)).collect();
    let mut worst = Worst::new();
    for k in 0..n {
        let (sig, rep) = (sigs[k % sigs.len()], &reps[k % sigs.len()]);
        let eta = eta_matrix(sig);
        let a = &eta * random_so_algebra(sig, rng, 1.0);
        let b = &eta * random_so_algebra(sig, rng, 1.0);
        let (x, y): (f64, f64) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let lhs = rep.spin_algebra_map(&(&a * x + &b * y))?;
        let rhs =
            rep.spin_algebra_map(&a)? * Complex64::new(x, 0.0) + rep.spin_algebra_map(&b)? * Complex64::new(y, 0.0);
        worst.push(cmax_abs(&(lhs - rhs)));
    }
    Ok(SuiteResult::new("clifford.linearity", n, worst.merge_nan(), 1e-12))
}

// ---------------------------------------------------------------------------
// lifts and Lie derivatives

const XI: &str = "_verify_xi";
const PSI: &str = "_verify_psi";
const PSI2: &str = "_verify_psi2";

/// The fixture's chart with a random vector field and two random spinors attached.
fn with_random_fields(fx: &Fixture, rng: &mut ChaCha8Rng) -> Result<GeometrySpec> {
    let mut spec = fx.spec.clone();
    let n = spec.spinor_dim();
    spec.add_vector_field(XI, &random_vector_source(spec.coords(), rng))?;
    spec.add_spinor_field(PSI, &random_spinor_source(spec.coords(), n, rng))?;
    spec.add_spinor_field(PSI2, &random_spinor_source(spec.coords(), n, rng))?;
    Ok(spec)
}

fn lifts_split_reconstruction(rng: &mut ChaCha8Rng, n: usize, fixtures: &[Fixture]) -> Result<SuiteResult> {
    let mut worst = Worst::new();
    for (fx, pt) in draws(rng, n, fixtures) {
        let spec = with_random_fields(fx, rng)?;
        let lift = natural_lift_coeffs(&spec, spec.vector_field(XI)?, &pt)?;
        let split = kosmann_split(&lift, spec.signature());
        let lowered = eta_matrix(spec.signature()) * &lift.0;
        worst.push(max_abs(&(split.kosmann + split.von_goeden - lowered)));
    }
    Ok(SuiteResult::new("lifts.split_reconstruction", n, worst.merge_nan(), 1e-12))
}

fn von_goeden_gap(spec: &GeometrySpec, xi: &dyn VectorField, pt: &[f64]) -> Result<(f64, f64)> {
    let frame = orthonormal_frame(spec, pt)?;
    let split = kosmann_split(&natural_lift_coeffs(spec, xi, pt)?, spec.signature());
    let nabla = covariant_derivative_covector(spec, xi, pt)?;
    let sym = frame.e.transpose() * ((&nabla + nabla.transpose()) * 0.5) * &frame.e;
    Ok((max_abs(&(sym - &split.von_goeden)), max_abs(&split.von_goeden)))
}

fn lifts_killing_characterization(rng: &mut ChaCha8Rng, n: usize, fixtures: &[Fixture]) -> Result<SuiteResult> {
    let mut worst = Worst::new();
    for (fx, pt) in draws(rng, n, fixtures) {
        let spec = with_random_fields(fx, rng)?;
        worst.push(von_goeden_gap(&spec, spec.vector_field(XI)?, &pt)?.0);
    }
    for q in [1, 3] {
        let fx = fixtures::minkowski_with_fields(q);
        for (name, _) in fixtures::minkowski_killing(q) {
            let pt = fx.sample_point(rng);
            worst.push(von_goeden_gap(&fx.spec, fx.spec.vector_field(&name)?, &pt)?.1);
        }
    }
    Ok(SuiteResult::new("lifts.killing_characterization", n, worst.merge_nan(), 1e-9))
}

fn lifts_frame_equivariance(rng: &mut ChaCha8Rng, n: usize, fixtures: &[Fixture]) -> Result<SuiteResult> {
    let mut worst = Worst::new();
    for (fx, pt) in draws(rng, n, fixtures) {
        let spec = with_random_fields(fx, rng)?;
        let sig = spec.signature();
        let at = spec.vector_field(XI)?.eval_at(&pt)?;
        let frame = orthonormal_frame(&spec, &pt)?;
        let reference = kosmann_coordinate_from(&frame, &at, sig);
        let o = random_so_element(sig, rng);
        let o_inv = o.clone().try_inverse().ok_or(crate::Error::SingularMatrix)?;
        let rotated =
            FrameAt { e: &frame.e * &o, e_inv: &o_inv * &frame.e_inv, de: frame.de.iter().map(|d| d * &o).collect() };
        let scale = max_abs(&reference).max(1.0);
        worst.push(max_abs(&(kosmann_coordinate_from(&rotated, &at, sig) - reference)) / scale);
    }
    Ok(SuiteResult::new("lifts.frame_equivariance", n, worst.merge_nan(), 1e-9))
}

fn liederiv_recast(rng: &mut ChaCha8Rng, n: usize, fixtures: &[Fixture]) -> Result<SuiteResult> {
    let mut worst = Worst::new();
    for (fx, pt) in draws(rng, n, fixtures) {
        let spec = with_random_fields(fx, rng)?;
        let (xi, psi) = (spec.vector_field(XI)?, spec.spinor_field(PSI)?);
        let a = lie_spinor_kosmann(&spec, xi, psi, &pt)?;
        let b = lie_spinor_covariant(&spec, xi, psi, &pt)?;
        worst.push(spinor_max_abs(&(a - b)));
    }
    Ok(SuiteResult::new("liederiv.recast", n, worst.merge_nan(), 1e-8))
}

fn liederiv_reductive_metric(rng: &mut ChaCha8Rng, n: usize, fixtures: &[Fixture]) -> Result<SuiteResult> {
    let mut worst = Worst::new();
    for (fx, pt) in draws(rng, n, fixtures) {
        let spec = with_random_fields(fx, rng)?;
        worst.push(max_abs(&reductive_metric_lie(&spec, spec.vector_field(XI)?, &pt)?));
    }
    Ok(SuiteResult::new("liederiv.reductive_metric", n, worst.merge_nan(), 1e-8))
}

fn liederiv_natural_metric(rng: &mut ChaCha8Rng, n: usize, fixtures: &[Fixture]) -> Result<SuiteResult> {
    let mut worst = Worst::new();
    for (fx, pt) in draws(rng, n, fixtures) {
        let spec = with_random_fields(fx, rng)?;
        let xi = spec.vector_field(XI)?;
        let lie = natural_metric_lie(&spec, xi, &pt)?;
        let nabla = covariant_derivative_covector(&spec, xi, &pt)?;
        worst.push(max_abs(&(lie - (&nabla + nabla.transpose()))));
    }
    Ok(SuiteResult::new("liederiv.natural_metric", n, worst.merge_nan(), 1e-9))
}

fn liederiv_flow_oracle(rng: &mut ChaCha8Rng, n: usize, fixtures: &[Fixture]) -> Result<SuiteResult> {
    let mut worst = Worst::new();
    for (fx, pt) in draws(rng, n, fixtures) {
        let spec = with_random_fields(fx, rng)?;
        let (xi, psi) = (spec.vector_field(XI)?, spec.spinor_field(PSI)?);
        let formula = lie_spinor_kosmann(&spec, xi, psi, &pt)?;
        let oracle = flow_lie_spinor_oracle(&spec, xi, psi, &pt, FLOW_DT)?;
        worst.push(spinor_max_abs(&(formula - oracle)));
    }
    Ok(SuiteResult::new("liederiv.flow_oracle", n, worst.merge_nan(), 1e-3))
}

fn liederiv_linearity(rng: &mut ChaCha8Rng, n: usize, fixtures: &[Fixture]) -> Result<SuiteResult> {
    let mut worst = Worst::new();
    for (fx, pt) in draws(rng, n, fixtures) {
        let mut spec = fx.spec.clone();
        let dim = spec.spinor_dim();
        spec.add_vector_field(XI, &random_vector_source(spec.coords(), rng))?;
        let psi1 = random_spinor_source(spec.coords(), dim, rng);
        let psi2 = random_spinor_source(spec.coords(), dim, rng);
        let (a, b): (f64, f64) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let combo: Vec<(String, String)> = psi1
            .iter()
            .zip(&psi2)
            .map(|((r1, i1), (r2, i2))| {
                (format!("({a})*({r1}) + ({b})*({r2})"), format!("({a})*({i1}) + ({b})*({i2})"))
            })
            .collect();
        spec.add_spinor_field(PSI, &psi1)?;
        spec.add_spinor_field(PSI2, &psi2)?;
        spec.add_spinor_field("_verify_combo", &combo)?;
        let xi = spec.vector_field(XI)?;
        let l1 = lie_spinor_kosmann(&spec, xi, spec.spinor_field(PSI)?, &pt)?;
        let l2 = lie_spinor_kosmann(&spec, xi, spec.spinor_field(PSI2)?, &pt)?;
        let lc = lie_spinor_kosmann(&spec, xi, spec.spinor_field("_verify_combo")?, &pt)?;
        worst.push(spinor_max_abs(&(lc - l1 * Complex64::new(a, 0.0) - l2 * Complex64::new(b, 0.0))));
    }
    Ok(SuiteResult::new("liederiv.linearity", n, worst.merge_nan(), 1e-10))
}

fn liederiv_leibniz(rng: &mut ChaCha8Rng, n: usize, fixtures: &[Fixture]) -> Result<SuiteResult> {
    let mut worst = Worst::new();
    for (fx, pt) in draws(rng, n, fixtures) {
        let mut spec = fx.spec.clone();
        let (m, dim) = (spec.dim(), spec.spinor_dim());
        spec.add_vector_field(XI, &random_vector_source(spec.coords(), rng))?;
        let psi = random_spinor_source(spec.coords(), dim, rng);
        let f_src = random_scalar_source(spec.coords(), rng);
        let scaled: Vec<(String, String)> =
            psi.iter().map(|(re, im)| (format!("({f_src})*({re})"), format!("({f_src})*({im})"))).collect();
        spec.add_spinor_field(PSI, &psi)?;
        spec.add_spinor_field("_verify_scaled", &scaled)?;
        let f = Expression::parse_shared(&f_src, spec.shared_coords())?.eval_dual(&pt)?;
        let xi = spec.vector_field(XI)?;
        let xi_at = xi.eval_at(&pt)?;
        let xi_f: f64 = (0..m).map(|mu| xi_at.value[mu] * f.grad[mu]).sum();
        let psi_field = spec.spinor_field(PSI)?;
        let expected = psi_field.eval_at(&pt)?.value * Complex64::new(xi_f, 0.0)
            + lie_spinor_kosmann(&spec, xi, psi_field, &pt)? * Complex64::new(f.value, 0.0);
        let got = lie_spinor_kosmann(&spec, xi, spec.spinor_field("_verify_scaled")?, &pt)?;
        worst.push(spinor_max_abs(&(got - expected)));
    }
    Ok(SuiteResult::new("liederiv.leibniz", n, worst.merge_nan(), 1e-8))
}

/// Uses the Minkowski Killing sets, plus any field of the given fixtures
/// that happens to be Killing at the sampled point.
fn liederiv_killing_reduction(rng: &mut ChaCha8Rng, n: usize, fixtures: &[Fixture]) -> Result<SuiteResult> {
    let mut pool: Vec<Fixture> = vec![fixtures::minkowski_with_fields(1), fixtures::minkowski_with_fields(3)];
    pool.extend(fixtures.iter().filter(|f| !f.spec.vector_fields().is_empty()).cloned());
    let mut worst = Worst::new();
    let mut used = 0;
    for k in 0..n {
        let fx = &pool[k % pool.len()];
        let pt = fx.sample_point(rng);
        let fields = fx.spec.vector_fields();
        let xi = &fields[rng.gen_range(0..fields.len())];
        if killing_residual(&fx.spec, xi, &pt)? > 1e-10 {
            continue;
        }
        let mut spec = fx.spec.clone();
        spec.add_spinor_field(PSI, &random_spinor_source(spec.coords(), spec.spinor_dim(), rng))?;
        let psi = spec.spinor_field(PSI)?;
        let a = lie_spinor_kosmann(&spec, xi, psi, &pt)?;
        let b = lichnerowicz(&spec, xi, psi, &pt)?;
        worst.push(spinor_max_abs(&(a - b)));
        used += 1;
    }
    Ok(SuiteResult::new("liederiv.killing_reduction", used, worst.merge_nan(), 1e-9))
}

fn liederiv_density_flow(rng: &mut ChaCha8Rng, n: usize, fixtures: &[Fixture]) -> Result<SuiteResult> {
    const RANKS: [(usize, usize); 5] = [(0, 0), (1, 0), (0, 1), (1, 1), (0, 2)];
    let mut worst = Worst::new();
    for (fx, pt) in draws(rng, n, fixtures) {
        let mut spec = fx.spec.clone();
        let m = spec.dim();
        spec.add_vector_field(XI, &random_vector_source(spec.coords(), rng))?;
        let (upper, lower) = RANKS[rng.gen_range(0..RANKS.len())];
        let weight = rng.gen_range(-1.0..1.0);
        let comps: Vec<String> =
            (0..m.pow((upper + lower) as u32)).map(|_| random_scalar_source(spec.coords(), rng)).collect();
        spec.add_density_field("_verify_density", upper, lower, weight, &comps)?;
        let (xi, t) = (spec.vector_field(XI)?, spec.density_field("_verify_density")?);
        let formula = lie_density(&spec, xi, t, &pt)?;
        let oracle = flow_lie_tensor_oracle(&spec, xi, t, &pt, FLOW_DT)?;
        for (a, b) in formula.components.iter().zip(&oracle.components) {
            worst.push((a - b).abs());
        }
    }
    Ok(SuiteResult::new("liederiv.density_flow", n, worst.merge_nan(), 1e-4))
}

// ---------------------------------------------------------------------------
// jets

/// The four groups of the jet suites.
pub fn jet_groups() -> Vec<GroupDescriptor> {
    vec![
        GroupDescriptor::General(2),
        GroupDescriptor::Orthogonal(Signature::euclidean(2)),
        GroupDescriptor::Orthogonal(Signature::new(1, 1).expect("valid signature")),
        GroupDescriptor::Special(2),
    ]
}

const JET_BASE_DIM: usize = 2;

fn jets_group_axioms(rng: &mut ChaCha8Rng, n: usize, _: &[Fixture]) -> Result<SuiteResult> {
    let mut worst = Worst::new();
    for desc in jet_groups() {
        let e = w11_identity(JET_BASE_DIM, desc);
        for _ in 0..n {
            let g: Vec<JetGroupElement> = (0..3).map(|_| JetGroupElement::random(JET_BASE_DIM, desc, rng)).collect();
            let left = w11_multiply(&w11_multiply(&g[0], &g[1])?, &g[2])?;
            let right = w11_multiply(&g[0], &w11_multiply(&g[1], &g[2])?)?;
            worst.push(left.distance(&right));
            worst.push(w11_multiply(&e, &g[0])?.distance(&g[0]));
            worst.push(w11_multiply(&g[0], &e)?.distance(&g[0]));
            let inv = w11_inverse(&g[0])?;
            worst.push(w11_multiply(&g[0], &inv)?.distance(&e));
            worst.push(w11_multiply(&inv, &g[0])?.distance(&e));
            let prod = w11_multiply(&g[0], &g[1])?;
            worst.push(desc.group_residual(&prod.a));
            for t in &prod.theta {
                worst.push(desc.algebra_residual(t));
            }
        }
    }
    Ok(SuiteResult::new("jets.group_axioms", n, worst.merge_nan(), 1e-8))
}

fn jets_oracle(rng: &mut ChaCha8Rng, n: usize, _: &[Fixture]) -> Result<SuiteResult> {
    let mut worst = Worst::new();
    let groups = jet_groups();
    for k in 0..n {
        let desc = groups[k % groups.len()];
        let g1 = JetGroupElement::random(JET_BASE_DIM, desc, rng);
        let g2 = JetGroupElement::random(JET_BASE_DIM, desc, rng);
        worst.push(w11_multiply(&g1, &g2)?.distance(&brute_force_multiply(&g1, &g2)?));
    }
    Ok(SuiteResult::new("jets.oracle", n, worst.merge_nan(), 1e-6))
}

fn jets_actions(rng: &mut ChaCha8Rng, n: usize, _: &[Fixture]) -> Result<SuiteResult> {
    let mut worst = Worst::new();
    let groups = jet_groups();
    let vec_gap = |a: &[f64], b: &[f64]| a.iter().zip(b).fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()));
    for k in 0..n {
        let desc = groups[k % groups.len()];
        let g1 = JetGroupElement::random(JET_BASE_DIM, desc, rng);
        let g2 = JetGroupElement::random(JET_BASE_DIM, desc, rng);
        let g12 = w11_multiply(&g1, &g2)?;
        let nu: Vec<f64> = (0..JET_BASE_DIM).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v = desc.random_algebra(rng, 1.0);

        let (n2, v2) = action_v(&g2, &nu, &v)?;
        let (n1, v1) = action_v(&g1, &n2, &v2)?;
        let (n12, v12) = action_v(&g12, &nu, &v)?;
        worst.push(vec_gap(&n1, &n12));
        worst.push(max_abs(&(v1 - v12)));

        let vert = action_vertical(&g12, &v)?;
        worst.push(max_abs(&(&vert - action_vertical(&g1, &action_vertical(&g2, &v)?)?)));
        worst.push(max_abs(&(&vert - action_v(&g12, &[0.0; JET_BASE_DIM], &v)?.1)));
        let mut perturbed = g12.clone();
        for t in &mut perturbed.theta {
            *t += desc.random_algebra(rng, 1.0);
        }
        worst.push(max_abs(&(&vert - action_vertical(&perturbed, &v)?)));

        let mut kernel = g1.clone();
        kernel.a = Mat::identity(desc.n(), desc.n());
        let (nt, vt) = action_tau(&kernel, &nu, &v)?;
        let (nv, vv) = action_v(&kernel, &nu, &v)?;
        worst.push(vec_gap(&nt, &nv));
        worst.push(max_abs(&(vt - vv)));
    }
    Ok(SuiteResult::new("jets.actions", n, worst.merge_nan(), 1e-8))
}
