//! Lie derivatives of tensors, tensor densities and spinor fields.
//!
//! Spinor flavours, with `σ(A) = ¼ A_{ab} γ^a γ^b`:
//!
//! * gauge-natural: `L_Ξ ψ = ξ^a e_a ψ + σ(Ξ) ψ` for an invariant field `Ξ`;
//! * Kosmann (Pfaff form): `L_ξ ψ = ξ^a e_a ψ + σ((Lξ)_{[ab]}) ψ`;
//! * Kosmann (covariant form): `L_ξ ψ = ξ^a ∇_a ψ − σ(∇_{[a} ξ_{b]}) ψ`;
//! * Lichnerowicz, for Killing fields: `L_ξ ψ = ξ^a ∇_a ψ − ¼ ∇_a ξ_b γ^a γ^b ψ`.
//!
//! With `γ^a γ^b + γ^b γ^a = 2η^{ab}` and `ω_{μab} = g(e_a, ∇_μ e_b)` the
//! two Kosmann forms agree when the spinor covariant derivative is
//! `∇_μ ψ = ∂_μ ψ − σ(ω_μ) ψ`; `(Lξ)_{[ab]} = −∇_{[a}ξ_{b]} − ξ^μ ω_{μab}`
//! is the identity that links them.

use nalgebra::DVector;

use crate::clifford::GammaRep;
use crate::flow::integrate;
use crate::geometry::{
    covariant_derivative_from, flat_index, metric_at, multi_index, orthonormal_frame, GeometrySpec, MetricField,
    PointGeometry, SpinorField, SpinorFieldAt, TensorField, VectorField, VectorFieldAt,
};
use crate::liealg::max_abs;
use crate::lifts::{
    kosmann_coordinate_from, kosmann_split, natural_lift_from, InvariantFieldComponents, NaturalLiftCoeffs,
};
use crate::{CMat, Complex64, Error, Mat, Result, SpinorValue};

/// Default time step of the flow oracles.
pub const FLOW_DT: f64 = 1e-4;
/// Finite-difference step for the outer derivatives in [`commutator_defect`].
pub const OUTER_STEP: f64 = 1e-4;
/// Largest Killing residual accepted by [`lichnerowicz`].
pub const KILLING_TOL: f64 = 1e-8;

const FLOW_TOL: f64 = 1e-13;

/// Tensor (density) components at a point, row-major with upper indices first.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorValueAt {
    pub upper: usize,
    pub lower: usize,
    pub weight: f64,
    pub components: Vec<f64>,
}

impl TensorValueAt {
    /// Reshapes a rank-2 value into an `m×m` matrix.
    pub fn as_matrix(&self, m: usize) -> Option<Mat> {
        (self.upper + self.lower == 2).then(|| Mat::from_row_slice(m, m, &self.components))
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }
}

// ---------------------------------------------------------------------------
// Tensors and densities

/// Natural Lie derivative of a weight-0 tensor field.
pub fn lie_tensor(
    spec: &GeometrySpec,
    xi: &dyn VectorField,
    field: &dyn TensorField,
    pt: &[f64],
) -> Result<TensorValueAt> {
    if field.weight() != 0.0 {
        return Err(Error::Precondition(format!(
            "tensor Lie derivative needs weight 0, got {}; use the density flavour",
            field.weight()
        )));
    }
    lie_density(spec, xi, field, pt)
}

/// Lie derivative of a tensor density: the tensor terms plus `w (∂_ρ ξ^ρ) T`.
pub fn lie_density(
    spec: &GeometrySpec,
    xi: &dyn VectorField,
    field: &dyn TensorField,
    pt: &[f64],
) -> Result<TensorValueAt> {
    spec.check_point(pt)?;
    let m = spec.dim();
    let (upper, lower) = field.rank();
    let at = field.eval_at(pt)?;
    let count = m.pow((upper + lower) as u32);
    if at.values.len() != count || at.upper != upper || at.lower != lower {
        return Err(Error::DimensionMismatch { expected: count, found: at.values.len() });
    }
    let xi = xi.eval_at(pt)?;
    let div = xi.jacobian.trace();
    let rank = upper + lower;
    let components = (0..count)
        .map(|flat| {
            let idx = multi_index(flat, rank, m);
            let mut v: f64 = (0..m).map(|rho| xi.value[rho] * at.grad[flat][rho]).sum();
            let mut shifted = idx.clone();
            for k in 0..rank {
                for alpha in 0..m {
                    shifted[k] = alpha;
                    let t = at.values[flat_index(&shifted, m)];
                    if k < upper {
                        v -= t * xi.jacobian[(idx[k], alpha)];
                    } else {
                        v += t * xi.jacobian[(alpha, idx[k])];
                    }
                }
                shifted[k] = idx[k];
            }
            v + at.weight * div * at.values[flat]
        })
        .collect();
    Ok(TensorValueAt { upper, lower, weight: at.weight, components })
}

/// `L_ξ g_{μν}` as an `m×m` matrix.
pub fn natural_metric_lie(spec: &GeometrySpec, xi: &dyn VectorField, pt: &[f64]) -> Result<Mat> {
    let v = lie_tensor(spec, xi, &MetricField(spec), pt)?;
    Ok(v.as_matrix(spec.dim()).expect("metric has rank 2"))
}

/// Derivative at `t = 0` of the pulled-back density `φ_t^* T`, by integrating
/// the flow and its Jacobian and differencing at `±dt` and `±2dt`.
pub fn flow_lie_tensor_oracle(
    spec: &GeometrySpec,
    xi: &dyn VectorField,
    field: &dyn TensorField,
    pt: &[f64],
    dt: f64,
) -> Result<TensorValueAt> {
    spec.check_point(pt)?;
    if !(dt > 0.0) {
        return Err(Error::Precondition(format!("flow step must be positive, got {dt}")));
    }
    let m = spec.dim();
    let (upper, lower) = field.rank();
    let rank = upper + lower;
    let weight = field.weight();

    let rhs = |y: &[f64]| -> Result<Vec<f64>> {
        let at = xi.eval_at(&y[..m])?;
        let jac = Mat::from_row_slice(m, m, &y[m..]);
        let djac = &at.jacobian * jac;
        let mut out = at.value.as_slice().to_vec();
        // row-major storage
        out.extend(djac.transpose().iter());
        Ok(out)
    };
    let pulled = |t: f64| -> Result<Vec<f64>> {
        let mut y0 = pt.to_vec();
        y0.extend(Mat::identity(m, m).transpose().iter());
        let y = integrate(rhs, y0, t, FLOW_TOL)?;
        let jac = Mat::from_row_slice(m, m, &y[m..]);
        let jac_inv = jac.clone().try_inverse().ok_or(Error::SingularMatrix)?;
        let det_w = jac.determinant().powf(weight);
        let values = field.eval_at(&y[..m])?.values;
        let count = values.len();
        Ok((0..count)
            .map(|out_flat| {
                let out_idx = multi_index(out_flat, rank, m);
                let mut acc = 0.0;
                for (in_flat, t) in values.iter().enumerate() {
                    let in_idx = multi_index(in_flat, rank, m);
                    let mut factor = *t;
                    for k in 0..rank {
                        factor *=
                            if k < upper { jac_inv[(out_idx[k], in_idx[k])] } else { jac[(in_idx[k], out_idx[k])] };
                    }
                    acc += factor;
                }
                acc * det_w
            })
            .collect())
    };
    let (p1, m1, p2, m2) = (pulled(dt)?, pulled(-dt)?, pulled(2.0 * dt)?, pulled(-2.0 * dt)?);
    Ok(TensorValueAt {
        upper,
        lower,
        weight,
        components: (0..p1.len()).map(|i| stencil(p1[i], m1[i], p2[i], m2[i], dt)).collect(),
    })
}

/// Fourth-order central difference from samples at `±dt` and `±2dt`.
fn stencil(p1: f64, m1: f64, p2: f64, m2: f64, dt: f64) -> f64 {
    (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * dt)
}

// ---------------------------------------------------------------------------
// Killing fields and the reductive metric derivative

/// `max |∇_μ ξ_ν + ∇_ν ξ_μ|`; zero exactly for Killing fields.
pub fn killing_residual(spec: &GeometrySpec, xi: &dyn VectorField, pt: &[f64]) -> Result<f64> {
    let geom = PointGeometry::at(spec, pt)?;
    let nabla = covariant_derivative_from(&geom.metric, &geom.christoffel, &xi.eval_at(pt)?);
    Ok(max_abs(&(&nabla + nabla.transpose())))
}

/// `ξ^ρ ∂_ρ g_{μν} + 2 g_{ρ(μ} (ξ_K)^ρ_{ν)}`, which vanishes identically.
pub fn reductive_metric_lie(spec: &GeometrySpec, xi: &dyn VectorField, pt: &[f64]) -> Result<Mat> {
    let metric = metric_at(spec, pt)?;
    let frame = orthonormal_frame(spec, pt)?;
    let at = xi.eval_at(pt)?;
    let k = kosmann_coordinate_from(&frame, &at, spec.signature());
    let gk = metric.g.transpose() * k;
    let mut out = &gk + gk.transpose();
    for rho in 0..spec.dim() {
        out += &metric.dg[rho] * at.value[rho];
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Spinors

/// `¼ Σ N_{ab} γ^a γ^b` without any symmetry requirement on `N`.
fn clifford_quadratic(rep: &GammaRep, lowered: &Mat) -> CMat {
    let n = rep.spinor_dim();
    let mut out = CMat::zeros(n, n);
    for a in 0..lowered.nrows() {
        for b in 0..lowered.ncols() {
            out += rep.gamma(a) * rep.gamma(b) * Complex64::new(0.25 * lowered[(a, b)], 0.0);
        }
    }
    out
}

/// `Σ_μ v^μ ∂_μ ψ`.
fn directional(psi: &SpinorFieldAt, coord_vec: &DVector<f64>) -> SpinorValue {
    let mut out = SpinorValue::zeros(psi.value.len());
    for (mu, g) in psi.grad.iter().enumerate() {
        out += g * Complex64::new(coord_vec[mu], 0.0);
    }
    out
}

fn check_spinor(spec: &GeometrySpec, psi: &SpinorFieldAt) -> Result<()> {
    let n = spec.spinor_dim();
    if psi.value.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: psi.value.len() });
    }
    Ok(())
}

/// `ξ^a e_a ψ + ¼ Ξ_{ab} γ^a γ^b ψ` for an invariant vector field `Ξ`.
pub fn lie_spinor_gauge_natural(
    spec: &GeometrySpec,
    comps: &InvariantFieldComponents,
    psi: &dyn SpinorField,
    pt: &[f64],
) -> Result<SpinorValue> {
    spec.check_point(pt)?;
    if comps.xi_frame().len() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), found: comps.xi_frame().len() });
    }
    let frame = orthonormal_frame(spec, pt)?;
    let psi = psi.eval_at(pt)?;
    check_spinor(spec, &psi)?;
    let coord = &frame.e * comps.xi_frame();
    let sigma = spec.gammas().spin_algebra_map(comps.vertical())?;
    Ok(directional(&psi, &coord) + sigma * &psi.value)
}

fn kosmann_operator(spec: &GeometrySpec, frame: &crate::geometry::FrameAt, xi: &VectorFieldAt) -> Result<CMat> {
    let split = kosmann_split(&NaturalLiftCoeffs(natural_lift_from(frame, xi)), spec.signature());
    spec.gammas().spin_algebra_map(&split.kosmann)
}

/// Kosmann Lie derivative in Pfaff form, `ξ^a e_a ψ + ¼ (Lξ)_{[ab]} γ^a γ^b ψ`.
pub fn lie_spinor_kosmann(
    spec: &GeometrySpec,
    xi: &dyn VectorField,
    psi: &dyn SpinorField,
    pt: &[f64],
) -> Result<SpinorValue> {
    spec.check_point(pt)?;
    let frame = orthonormal_frame(spec, pt)?;
    let xi = xi.eval_at(pt)?;
    let psi = psi.eval_at(pt)?;
    check_spinor(spec, &psi)?;
    let sigma = kosmann_operator(spec, &frame, &xi)?;
    Ok(directional(&psi, &xi.value) + sigma * &psi.value)
}

/// `ξ^μ ∇_μ ψ` with `∇_μ ψ = ∂_μ ψ − σ(ω_μ) ψ`, and the frame components of `∇_a ξ_b`.
fn covariant_pieces(
    spec: &GeometrySpec,
    xi: &dyn VectorField,
    psi: &dyn SpinorField,
    pt: &[f64],
) -> Result<(SpinorValue, Mat, SpinorValue)> {
    spec.check_point(pt)?;
    let geom = PointGeometry::at(spec, pt)?;
    let xi = xi.eval_at(pt)?;
    let psi = psi.eval_at(pt)?;
    check_spinor(spec, &psi)?;
    let rep = spec.gammas();
    let mut transport = directional(&psi, &xi.value);
    for mu in 0..spec.dim() {
        let conn = rep.spin_algebra_map(&geom.spin.lowered[mu])?;
        transport -= conn * &psi.value * Complex64::new(xi.value[mu], 0.0);
    }
    let nabla = covariant_derivative_from(&geom.metric, &geom.christoffel, &xi);
    let nabla_frame = geom.frame.e.transpose() * nabla * &geom.frame.e;
    Ok((transport, nabla_frame, psi.value))
}

/// Kosmann Lie derivative in covariant form, `ξ^a ∇_a ψ − ¼ ∇_{[a}ξ_{b]} γ^a γ^b ψ`.
pub fn lie_spinor_covariant(
    spec: &GeometrySpec,
    xi: &dyn VectorField,
    psi: &dyn SpinorField,
    pt: &[f64],
) -> Result<SpinorValue> {
    let (transport, nabla_frame, value) = covariant_pieces(spec, xi, psi, pt)?;
    let antisym = (&nabla_frame - nabla_frame.transpose()) * 0.5;
    let sigma = spec.gammas().spin_algebra_map(&antisym)?;
    Ok(transport - sigma * value)
}

/// Lichnerowicz's formula; `xi` must be Killing at `pt`.
pub fn lichnerowicz(
    spec: &GeometrySpec,
    xi: &dyn VectorField,
    psi: &dyn SpinorField,
    pt: &[f64],
) -> Result<SpinorValue> {
    let residual = killing_residual(spec, xi, pt)?;
    if residual > KILLING_TOL {
        return Err(Error::NotKilling { residual });
    }
    let (transport, nabla_frame, value) = covariant_pieces(spec, xi, psi, pt)?;
    Ok(transport - clifford_quadratic(spec.gammas(), &nabla_frame) * value)
}

/// Derivative at `t = 0` of `S(t)⁻¹ ψ(φ_t(x))`, where `φ_t` is the flow of
/// `ξ` and `dS/dt = −σ((Lξ)_{[ab]}(φ_t(x))) S`, `S(0) = I`.
pub fn flow_lie_spinor_oracle(
    spec: &GeometrySpec,
    xi: &dyn VectorField,
    psi: &dyn SpinorField,
    pt: &[f64],
    dt: f64,
) -> Result<SpinorValue> {
    spec.check_point(pt)?;
    if !(dt > 0.0) {
        return Err(Error::Precondition(format!("flow step must be positive, got {dt}")));
    }
    let m = spec.dim();
    let n = spec.spinor_dim();
    let unpack =
        |y: &[f64]| CMat::from_fn(n, n, |i, j| Complex64::new(y[m + 2 * (i * n + j)], y[m + 2 * (i * n + j) + 1]));
    let pack = |s: &CMat, out: &mut Vec<f64>| {
        for i in 0..n {
            for j in 0..n {
                out.push(s[(i, j)].re);
                out.push(s[(i, j)].im);
            }
        }
    };
    let rhs = |y: &[f64]| -> Result<Vec<f64>> {
        let x = &y[..m];
        let frame = orthonormal_frame(spec, x)?;
        let at = xi.eval_at(x)?;
        let sigma = kosmann_operator(spec, &frame, &at)?;
        let ds = -(sigma * unpack(y));
        let mut out = at.value.as_slice().to_vec();
        pack(&ds, &mut out);
        Ok(out)
    };
    let transported = |t: f64| -> Result<SpinorValue> {
        let mut y0 = pt.to_vec();
        pack(&CMat::identity(n, n), &mut y0);
        let y = integrate(rhs, y0, t, FLOW_TOL)?;
        let value = psi.eval_at(&y[..m])?.value;
        unpack(&y).lu().solve(&value).ok_or(Error::SingularMatrix)
    };
    let (p1, m1, p2, m2) = (transported(dt)?, transported(-dt)?, transported(2.0 * dt)?, transported(-2.0 * dt)?);
    Ok(((p1 - m1) * Complex64::from(8.0) - (p2 - m2)) / Complex64::from(12.0 * dt))
}

// ---------------------------------------------------------------------------
// Commutator defect

/// The coordinate bracket `[ξ, ζ]`; its Jacobian is taken by central differences.
pub struct Bracket<'a> {
    pub xi: &'a dyn VectorField,
    pub zeta: &'a dyn VectorField,
    pub step: f64,
}

impl Bracket<'_> {
    fn value(&self, pt: &[f64]) -> Result<DVector<f64>> {
        let (a, b) = (self.xi.eval_at(pt)?, self.zeta.eval_at(pt)?);
        Ok(&b.jacobian * &a.value - &a.jacobian * &b.value)
    }
}

impl VectorField for Bracket<'_> {
    fn dim(&self) -> usize {
        self.xi.dim()
    }

    fn eval_at(&self, pt: &[f64]) -> Result<VectorFieldAt> {
        let m = pt.len();
        let value = self.value(pt)?;
        let mut jacobian = Mat::zeros(m, m);
        let mut shifted = pt.to_vec();
        for nu in 0..m {
            shifted[nu] = pt[nu] + self.step;
            let plus = self.value(&shifted)?;
            shifted[nu] = pt[nu] - self.step;
            let minus = self.value(&shifted)?;
            shifted[nu] = pt[nu];
            jacobian.set_column(nu, &((plus - minus) / (2.0 * self.step)));
        }
        Ok(VectorFieldAt { value, jacobian })
    }
}

/// The spinor field `x ↦ L_ξ ψ(x)` (Kosmann), differentiated by central differences.
pub struct KosmannDerivative<'a> {
    pub spec: &'a GeometrySpec,
    pub xi: &'a dyn VectorField,
    pub psi: &'a dyn SpinorField,
    pub step: f64,
}

impl SpinorField for KosmannDerivative<'_> {
    fn eval_at(&self, pt: &[f64]) -> Result<SpinorFieldAt> {
        let value = lie_spinor_kosmann(self.spec, self.xi, self.psi, pt)?;
        let mut shifted = pt.to_vec();
        let grad = (0..pt.len())
            .map(|mu| {
                shifted[mu] = pt[mu] + self.step;
                let plus = lie_spinor_kosmann(self.spec, self.xi, self.psi, &shifted)?;
                shifted[mu] = pt[mu] - self.step;
                let minus = lie_spinor_kosmann(self.spec, self.xi, self.psi, &shifted)?;
                shifted[mu] = pt[mu];
                Ok((plus - minus) / Complex64::new(2.0 * self.step, 0.0))
            })
            .collect::<Result<_>>()?;
        Ok(SpinorFieldAt { value, grad })
    }
}

/// `L_ξ L_ζ ψ − L_ζ L_ξ ψ − L_{[ξ,ζ]} ψ` for the Kosmann Lie derivative.
pub fn commutator_defect(
    spec: &GeometrySpec,
    xi: &dyn VectorField,
    zeta: &dyn VectorField,
    psi: &dyn SpinorField,
    pt: &[f64],
) -> Result<SpinorValue> {
    let l_zeta = KosmannDerivative { spec, xi: zeta, psi, step: OUTER_STEP };
    let l_xi = KosmannDerivative { spec, xi, psi, step: OUTER_STEP };
    let bracket = Bracket { xi, zeta, step: OUTER_STEP };
    let a = lie_spinor_kosmann(spec, xi, &l_zeta, pt)?;
    let b = lie_spinor_kosmann(spec, zeta, &l_xi, pt)?;
    let c = lie_spinor_kosmann(spec, &bracket, psi, pt)?;
    Ok(a - b - c)
}

/// Largest component modulus of a spinor.
pub fn spinor_max_abs(v: &SpinorValue) -> f64 {
    v.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::covariant_derivative_covector;
    use crate::liealg::Signature;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn flat2() -> GeometrySpec {
        let mut spec = GeometrySpec::new(Signature::euclidean(2), &["x0", "x1"], &[vec!["1", "0"], vec!["1"]]).unwrap();
        spec.add_vector_field("rot", &["-x1", "x0"]).unwrap();
        spec.add_vector_field("trans", &["0.7", "-1.3"]).unwrap();
        spec.add_vector_field("dil", &["x0", "0"]).unwrap();
        spec.add_vector_field("gen", &["x0*x1 + 1", "sin(x0)"]).unwrap();
        spec.add_spinor_field("const", &[("1", "0.5"), ("-2", "0.25")]).unwrap();
        spec.add_spinor_field("wavy", &[("sin(x0)", "x1"), ("x0*x1", "cos(x1)")]).unwrap();
        spec.add_density_field("scalar", 0, 0, 0.0, &["x0^2*x1"]).unwrap();
        spec.add_density_field("rho", 0, 0, 1.0, &["exp(x0)*x1"]).unwrap();
        spec.add_density_field("unit", 0, 0, 1.0, &["1"]).unwrap();
        spec.add_density_field("mixed", 1, 1, 0.5, &["x0", "x1^2", "1", "x0*x1"]).unwrap();
        spec
    }

    fn polar() -> GeometrySpec {
        let mut spec =
            GeometrySpec::new(Signature::euclidean(2), &["x0", "x1"], &[vec!["1", "0"], vec!["x0^2"]]).unwrap();
        spec.add_vector_field("gen", &["0.3 + x1*x0", "sin(x0) - x1"]).unwrap();
        spec.add_vector_field("rot", &["0", "1"]).unwrap();
        spec.add_spinor_field("psi", &[("x0 + x1^2", "cos(x0)"), ("exp(x1)", "x0*x1")]).unwrap();
        spec
    }

    fn minkowski2() -> GeometrySpec {
        let mut spec =
            GeometrySpec::new(Signature::new(1, 1).unwrap(), &["t", "x"], &[vec!["1", "0"], vec!["-1"]]).unwrap();
        spec.add_vector_field("boost", &["x", "t"]).unwrap();
        spec.add_vector_field("tt", &["1", "0"]).unwrap();
        spec.add_vector_field("tx", &["0", "1"]).unwrap();
        spec.add_vector_field("squeeze", &["t", "0"]).unwrap();
        spec.add_spinor_field("const", &[("1", "0"), ("0.5", "-0.5")]).unwrap();
        spec.add_spinor_field("psi", &[("t*x", "1"), ("sin(t)", "x^2")]).unwrap();
        spec
    }

    fn assert_spinor_close(a: &SpinorValue, b: &SpinorValue, tol: f64) {
        let d = spinor_max_abs(&(a - b));
        assert!(d <= tol, "difference {d:e} > {tol:e}\n{a}\n{b}");
    }

    #[test]
    fn metric_lie_examples() {
        let spec = flat2();
        let pt = [0.4, -1.2];
        assert_eq!(max_abs(&natural_metric_lie(&spec, spec.vector_field("rot").unwrap(), &pt).unwrap()), 0.0);
        let curved = polar();
        let xi = curved.vector_field("gen").unwrap();
        let lie = natural_metric_lie(&curved, xi, &[1.4, 0.2]).unwrap();
        let nabla = covariant_derivative_covector(&curved, xi, &[1.4, 0.2]).unwrap();
        assert!(max_abs(&(lie - (&nabla + nabla.transpose()))) < 1e-12);
    }

    #[test]
    fn scalar_lie_is_directional_derivative() {
        let spec = flat2();
        let pt = [0.4, -1.2];
        let xi = spec.vector_field("gen").unwrap();
        let t = spec.density_field("scalar").unwrap();
        let v = lie_tensor(&spec, xi, t, &pt).unwrap();
        let at = xi.eval_at(&pt).unwrap();
        let expected = at.value[0] * 2.0 * pt[0] * pt[1] + at.value[1] * pt[0] * pt[0];
        assert!((v.components[0] - expected).abs() < 1e-14);
        assert!(matches!(lie_tensor(&spec, xi, spec.density_field("rho").unwrap(), &pt), Err(Error::Precondition(_))));
    }

    #[test]
    fn density_examples() {
        let spec = flat2();
        let pt = [0.4, -1.2];
        let xi = spec.vector_field("gen").unwrap();
        // weight 0 density matches the tensor derivative
        let t = spec.density_field("scalar").unwrap();
        assert_eq!(lie_density(&spec, xi, t, &pt).unwrap(), lie_tensor(&spec, xi, t, &pt).unwrap());
        // weight 1 scalar density: ∂_ρ(ξ^ρ T)
        let rho = spec.density_field("rho").unwrap();
        let v = lie_density(&spec, xi, rho, &pt).unwrap();
        let (x0, x1) = (pt[0], pt[1]);
        let t_val = x0.exp() * x1;
        let div_flux = (x1) * t_val + (x0 * x1 + 1.0) * t_val + x0.sin() * x0.exp();
        assert!((v.components[0] - div_flux).abs() < 1e-13);
        // constant density, divergence-free field
        let unit = spec.density_field("unit").unwrap();
        assert_eq!(lie_density(&spec, spec.vector_field("rot").unwrap(), unit, &pt).unwrap().components, vec![0.0]);
    }

    #[test]
    fn density_matches_flow_oracle() {
        let spec = flat2();
        let pt = [0.4, -1.2];
        let xi = spec.vector_field("gen").unwrap();
        for name in ["rho", "mixed", "scalar"] {
            let field = spec.density_field(name).unwrap();
            let formula = lie_density(&spec, xi, field, &pt).unwrap();
            let oracle = flow_lie_tensor_oracle(&spec, xi, field, &pt, FLOW_DT).unwrap();
            for (a, b) in formula.components.iter().zip(&oracle.components) {
                assert!((a - b).abs() < 1e-6, "{name}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn gauge_natural_examples() {
        let spec = flat2();
        let pt = [0.4, -1.2];
        let psi = spec.spinor_field("wavy").unwrap();
        let zero = InvariantFieldComponents::new(DVector::zeros(2), Mat::zeros(2, 2)).unwrap();
        assert_eq!(spinor_max_abs(&lie_spinor_gauge_natural(&spec, &zero, psi, &pt).unwrap()), 0.0);

        let cpsi = spec.spinor_field("const").unwrap();
        let vertical = Mat::from_row_slice(2, 2, &[0.0, 2.5, -2.5, 0.0]);
        let comps = InvariantFieldComponents::new(DVector::zeros(2), vertical.clone()).unwrap();
        let expected = spec.gammas().spin_algebra_map(&vertical).unwrap() * cpsi.eval_at(&pt).unwrap().value;
        assert_spinor_close(&lie_spinor_gauge_natural(&spec, &comps, cpsi, &pt).unwrap(), &expected, 1e-15);

        let curved = polar();
        let xi = curved.vector_field("gen").unwrap();
        let psi = curved.spinor_field("psi").unwrap();
        let pt = [1.3, 0.4];
        let comps = InvariantFieldComponents::kosmann(&curved, xi, &pt).unwrap();
        assert_spinor_close(
            &lie_spinor_gauge_natural(&curved, &comps, psi, &pt).unwrap(),
            &lie_spinor_kosmann(&curved, xi, psi, &pt).unwrap(),
            1e-13,
        );
    }

    #[test]
    fn kosmann_examples() {
        let spec = flat2();
        let pt = [0.4, -1.2];
        let psi = spec.spinor_field("const").unwrap();
        let rep = spec.gammas();
        let value = psi.eval_at(&pt).unwrap().value;
        let expected = rep.gamma(0) * rep.gamma(1) * &value * c(-0.5, 0.0);
        let got = lie_spinor_kosmann(&spec, spec.vector_field("rot").unwrap(), psi, &pt).unwrap();
        assert_spinor_close(&got, &expected, 1e-15);
        let got = lie_spinor_kosmann(&spec, spec.vector_field("trans").unwrap(), psi, &pt).unwrap();
        assert_eq!(spinor_max_abs(&got), 0.0);
    }

    #[test]
    fn pfaff_and_covariant_forms_agree() {
        for (spec, pt) in [(polar(), [1.3, 0.4]), (flat2(), [0.4, -1.2])] {
            for xi in spec.vector_fields() {
                for psi in spec.spinor_fields() {
                    let a = lie_spinor_kosmann(&spec, xi, psi, &pt).unwrap();
                    let b = lie_spinor_covariant(&spec, xi, psi, &pt).unwrap();
                    assert_spinor_close(&a, &b, 1e-12);
                }
            }
        }
    }

    #[test]
    fn lichnerowicz_examples() {
        let spec = minkowski2();
        let pt = [0.3, -0.7];
        let psi = spec.spinor_field("const").unwrap();
        let boost = spec.vector_field("boost").unwrap();
        let rep = spec.gammas();
        // ∇_a ξ_b = [[0, -1], [1, 0]] for ξ = (x, t) lowered to (x, -t)
        let nabla = Mat::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let expected = -(rep.spin_algebra_map(&nabla).unwrap() * psi.eval_at(&pt).unwrap().value);
        assert_spinor_close(&lichnerowicz(&spec, boost, psi, &pt).unwrap(), &expected, 1e-15);
        assert_spinor_close(
            &lie_spinor_kosmann(&spec, boost, psi, &pt).unwrap(),
            &lichnerowicz(&spec, boost, psi, &pt).unwrap(),
            1e-15,
        );

        let wavy = spec.spinor_field("psi").unwrap();
        let tt = spec.vector_field("tt").unwrap();
        let at = wavy.eval_at(&pt).unwrap();
        assert_spinor_close(&lichnerowicz(&spec, tt, wavy, &pt).unwrap(), &at.grad[0], 1e-15);

        let squeeze = spec.vector_field("squeeze").unwrap();
        assert!(matches!(lichnerowicz(&spec, squeeze, psi, &pt), Err(Error::NotKilling { .. })));
    }

    #[test]
    fn killing_residual_examples() {
        let spec = flat2();
        let pt = [0.4, -1.2];
        assert_eq!(killing_residual(&spec, spec.vector_field("rot").unwrap(), &pt).unwrap(), 0.0);
        assert_eq!(killing_residual(&spec, spec.vector_field("dil").unwrap(), &pt).unwrap(), 2.0);
        let mink = minkowski2();
        assert!(killing_residual(&mink, mink.vector_field("boost").unwrap(), &pt).unwrap() <= 1e-10);
    }

    #[test]
    fn reductive_metric_vanishes_while_natural_does_not() {
        let spec = polar();
        let xi = spec.vector_field("gen").unwrap();
        let pt = [1.3, 0.4];
        assert!(max_abs(&reductive_metric_lie(&spec, xi, &pt).unwrap()) < 1e-12);
        assert!(max_abs(&natural_metric_lie(&spec, xi, &pt).unwrap()) > 1e-3);
        let flat = flat2();
        assert!(max_abs(&reductive_metric_lie(&flat, flat.vector_field("rot").unwrap(), &pt).unwrap()) < 1e-15);
    }

    #[test]
    fn flow_oracle_examples() {
        let spec = flat2();
        let pt = [0.4, -1.2];
        // constant field: plain directional difference
        let trans = spec.vector_field("trans").unwrap();
        let wavy = spec.spinor_field("wavy").unwrap();
        let at = wavy.eval_at(&pt).unwrap();
        let expected = &at.grad[0] * c(0.7, 0.0) + &at.grad[1] * c(-1.3, 0.0);
        assert_spinor_close(&flow_lie_spinor_oracle(&spec, trans, wavy, &pt, FLOW_DT).unwrap(), &expected, 1e-7);

        let cpsi = spec.spinor_field("const").unwrap();
        let rot = spec.vector_field("rot").unwrap();
        let expected = lie_spinor_kosmann(&spec, rot, cpsi, &pt).unwrap();
        assert_spinor_close(&flow_lie_spinor_oracle(&spec, rot, cpsi, &pt, FLOW_DT).unwrap(), &expected, 1e-3);

        let curved = polar();
        let pt = [1.3, 0.4];
        let xi = curved.vector_field("gen").unwrap();
        let psi = curved.spinor_field("psi").unwrap();
        assert_spinor_close(
            &flow_lie_spinor_oracle(&curved, xi, psi, &pt, FLOW_DT).unwrap(),
            &lie_spinor_kosmann(&curved, xi, psi, &pt).unwrap(),
            1e-3,
        );
        assert!(flow_lie_spinor_oracle(&curved, xi, psi, &pt, 0.0).is_err());
    }

    #[test]
    fn commutator_defect_examples() {
        let spec = minkowski2();
        let pt = [0.3, -0.7];
        let psi = spec.spinor_field("psi").unwrap();
        let boost = spec.vector_field("boost").unwrap();
        let d = commutator_defect(&spec, boost, boost, psi, &pt).unwrap();
        assert!(spinor_max_abs(&d) < 1e-12);
        let d = commutator_defect(&spec, boost, spec.vector_field("tt").unwrap(), psi, &pt).unwrap();
        assert!(spinor_max_abs(&d) < 1e-5, "{d}");
    }
}
