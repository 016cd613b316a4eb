//! Natural lift of a vector field to the frame bundle and its split into the
//! Kosmann (`so(p,q)`) and von Göden (η-symmetric) parts.
//!
//! In the canonical orthonormal frame `e_a = e_a^μ ∂_μ` the natural lift has
//! vertical coefficients
//!
//! ```text
//! (Lξ)^a_b = ẽ^a_ρ (∂_ν ξ^ρ e_b^ν − ξ^ν ∂_ν e_b^ρ)
//! ```
//!
//! Lowering the first index with η and splitting into antisymmetric and
//! symmetric parts gives the Kosmann and von Göden coefficients.

use nalgebra::DVector;

use crate::geometry::{orthonormal_frame, FrameAt, GeometrySpec, VectorField, VectorFieldAt};
use crate::liealg::{antisymmetry_residual, decompose_gl, eta_matrix, max_abs, ReductiveSplit, Signature};
use crate::{Error, Mat, Result};

/// `(Lξ)^a_b` in the canonical frame, `coeffs[(a, b)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalLiftCoeffs(pub Mat);

/// Both matrices carry two lower frame indices.
#[derive(Debug, Clone, PartialEq)]
pub struct KosmannSplit {
    /// `(Lξ)_{[ab]}`.
    pub kosmann: Mat,
    /// `(Lξ)_{(ab)}`.
    pub von_goeden: Mat,
}

/// Components of an `SO(p,q)`-invariant vector field `Ξ = ξ^a e_a + Ξ_{ab} A^{ab}`.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantFieldComponents {
    xi_frame: DVector<f64>,
    vertical: Mat,
}

impl InvariantFieldComponents {
    pub fn new(xi_frame: DVector<f64>, vertical: Mat) -> Result<Self> {
        let m = xi_frame.len();
        if vertical.nrows() != m || vertical.ncols() != m {
            return Err(Error::DimensionMismatch { expected: m, found: vertical.nrows() });
        }
        let residual = antisymmetry_residual(&vertical);
        if residual > 1e-10 * max_abs(&vertical).max(1.0) {
            return Err(Error::NotAntisymmetric { residual });
        }
        Ok(InvariantFieldComponents { xi_frame, vertical })
    }

    /// The Kosmann lift of `xi` at `pt`, as invariant-field components.
    pub fn kosmann(spec: &GeometrySpec, xi: &dyn VectorField, pt: &[f64]) -> Result<Self> {
        let frame = orthonormal_frame(spec, pt)?;
        let at = xi.eval_at(pt)?;
        let split = kosmann_split(&NaturalLiftCoeffs(natural_lift_from(&frame, &at)), spec.signature());
        Ok(InvariantFieldComponents { xi_frame: &frame.e_inv * &at.value, vertical: split.kosmann })
    }

    /// `ξ^a`.
    pub fn xi_frame(&self) -> &DVector<f64> {
        &self.xi_frame
    }

    /// `Ξ_{ab}`.
    pub fn vertical(&self) -> &Mat {
        &self.vertical
    }
}

pub(crate) fn natural_lift_from(frame: &FrameAt, xi: &VectorFieldAt) -> Mat {
    let m = frame.e.nrows();
    let mut transport = Mat::zeros(m, m);
    for nu in 0..m {
        transport += &frame.de[nu] * xi.value[nu];
    }
    &frame.e_inv * (&xi.jacobian * &frame.e - transport)
}

pub fn natural_lift_coeffs(spec: &GeometrySpec, xi: &dyn VectorField, pt: &[f64]) -> Result<NaturalLiftCoeffs> {
    let frame = orthonormal_frame(spec, pt)?;
    Ok(NaturalLiftCoeffs(natural_lift_from(&frame, &xi.eval_at(pt)?)))
}

/// Full reductive split of the (mixed-index) lift coefficients.
pub fn reductive_split(lift: &NaturalLiftCoeffs, sig: Signature) -> ReductiveSplit {
    decompose_gl(&lift.0, sig).expect("lift coefficients are m×m")
}

/// Lowers the first index with η and separates antisymmetric and symmetric parts.
pub fn kosmann_split(lift: &NaturalLiftCoeffs, sig: Signature) -> KosmannSplit {
    let m = sig.dim();
    let split = reductive_split(lift, sig);
    let eta = eta_matrix(sig);
    KosmannSplit {
        kosmann: &eta * &split.antisym,
        von_goeden: &eta * (split.sym_traceless + Mat::identity(m, m) * split.trace_coeff),
    }
}

pub(crate) fn kosmann_coordinate_from(frame: &FrameAt, xi: &VectorFieldAt, sig: Signature) -> Mat {
    let m = frame.e.nrows();
    let split = kosmann_split(&NaturalLiftCoeffs(natural_lift_from(frame, xi)), sig);
    let mut transport = Mat::zeros(m, m);
    for nu in 0..m {
        transport += &frame.de[nu] * xi.value[nu];
    }
    // ξ^λ ∂_λ e_b^ρ ẽ^b_ν  +  e_a^ρ η^{ac} (Lξ)_{[cb]} ẽ^b_ν
    (transport + &frame.e * eta_matrix(sig) * split.kosmann) * &frame.e_inv
}

/// Kosmann lift coefficients `(ξ_K)^ρ_ν` in the coordinate chart.
///
/// Includes the transport of the section along `ξ`; with it the natural
/// counterpart reduces to `∂_ν ξ^ρ` and
/// `g_{ρμ}(ξ_K)^ρ_ν + g_{ρν}(ξ_K)^ρ_μ = −ξ^ρ ∂_ρ g_{μν}`.
pub fn kosmann_coordinate_matrix(spec: &GeometrySpec, xi: &dyn VectorField, pt: &[f64]) -> Result<Mat> {
    let frame = orthonormal_frame(spec, pt)?;
    Ok(kosmann_coordinate_from(&frame, &xi.eval_at(pt)?, spec.signature()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{covariant_derivative_covector, metric_at};
    use crate::liealg::{random_so_element, symmetry_residual};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn flat2() -> GeometrySpec {
        let mut spec = GeometrySpec::new(Signature::euclidean(2), &["x0", "x1"], &[vec!["1", "0"], vec!["1"]]).unwrap();
        spec.add_vector_field("rot", &["-x1", "x0"]).unwrap();
        spec.add_vector_field("dil", &["x0", "0"]).unwrap();
        spec.add_vector_field("zero", &["0", "0"]).unwrap();
        spec.add_vector_field("gen", &["x0*x1", "sin(x0) + x1^2"]).unwrap();
        spec
    }

    fn curved() -> GeometrySpec {
        let mut spec = GeometrySpec::new(
            Signature::new(1, 2).unwrap(),
            &["t", "r", "z"],
            &[vec!["1 + 0.1*r^2", "0.2*t", "0"], vec!["-2 - sin(z)", "0.1"], vec!["-1 - t^2"]],
        )
        .unwrap();
        spec.add_vector_field("v", &["r*z", "1 + t^2", "cos(r)"]).unwrap();
        spec
    }

    #[test]
    fn flat_lift_is_jacobian() {
        let spec = flat2();
        let pt = [0.3, -0.8];
        let gen = spec.vector_field("gen").unwrap();
        let lift = natural_lift_coeffs(&spec, gen, &pt).unwrap();
        assert_eq!(lift.0, gen.eval_at(&pt).unwrap().jacobian);

        let rot = natural_lift_coeffs(&spec, spec.vector_field("rot").unwrap(), &pt).unwrap();
        assert_eq!(rot.0, Mat::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));
        let zero = natural_lift_coeffs(&spec, spec.vector_field("zero").unwrap(), &pt).unwrap();
        assert_eq!(max_abs(&zero.0), 0.0);
    }

    #[test]
    fn split_examples() {
        let spec = flat2();
        let sig = spec.signature();
        let pt = [0.3, -0.8];
        let rot = kosmann_split(&natural_lift_coeffs(&spec, spec.vector_field("rot").unwrap(), &pt).unwrap(), sig);
        assert_eq!(rot.kosmann, Mat::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));
        assert_eq!(max_abs(&rot.von_goeden), 0.0);

        let dil = kosmann_split(&natural_lift_coeffs(&spec, spec.vector_field("dil").unwrap(), &pt).unwrap(), sig);
        assert_eq!(max_abs(&dil.kosmann), 0.0);
        assert_eq!(dil.von_goeden, Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn split_reconstructs_lowered_coefficients() {
        let spec = curved();
        let sig = spec.signature();
        let lift = natural_lift_coeffs(&spec, spec.vector_field("v").unwrap(), &[0.4, 1.1, 0.3]).unwrap();
        let split = kosmann_split(&lift, sig);
        assert!(antisymmetry_residual(&split.kosmann) < 1e-15);
        assert!(symmetry_residual(&split.von_goeden) < 1e-15);
        let lowered = eta_matrix(sig) * &lift.0;
        assert!(max_abs(&(split.kosmann + split.von_goeden - lowered)) < 1e-12);
    }

    /// The von Göden part is the frame form of ½ L_ξ g = ∇₍μξν₎.
    #[test]
    fn von_goeden_is_symmetrized_covariant_derivative() {
        let spec = curved();
        let pt = [0.4, 1.1, 0.3];
        let xi = spec.vector_field("v").unwrap();
        let frame = orthonormal_frame(&spec, &pt).unwrap();
        let split = kosmann_split(&natural_lift_coeffs(&spec, xi, &pt).unwrap(), spec.signature());
        let nabla = covariant_derivative_covector(&spec, xi, &pt).unwrap();
        let sym_coord = (&nabla + nabla.transpose()) * 0.5;
        let sym_frame = frame.e.transpose() * sym_coord * &frame.e;
        assert!(max_abs(&(sym_frame - split.von_goeden)) < 1e-12);
    }

    #[test]
    fn coordinate_matrix_examples() {
        let spec = flat2();
        let pt = [0.3, -0.8];
        let rot = spec.vector_field("rot").unwrap();
        let k = kosmann_coordinate_matrix(&spec, rot, &pt).unwrap();
        assert_eq!(k, rot.eval_at(&pt).unwrap().jacobian);
        let zero = kosmann_coordinate_matrix(&spec, spec.vector_field("zero").unwrap(), &pt).unwrap();
        assert_eq!(max_abs(&zero), 0.0);
    }

    #[test]
    fn coordinate_matrix_cancels_transport_of_metric() {
        let spec = curved();
        let pt = [0.4, 1.1, 0.3];
        let xi = spec.vector_field("v").unwrap();
        let k = kosmann_coordinate_matrix(&spec, xi, &pt).unwrap();
        let met = metric_at(&spec, &pt).unwrap();
        let at = xi.eval_at(&pt).unwrap();
        let gk = met.g.transpose() * &k; // (μ,ν) = g_{ρμ} (ξ_K)^ρ_ν
        let lhs = &gk + gk.transpose();
        let mut transport = Mat::zeros(3, 3);
        for rho in 0..3 {
            transport += &met.dg[rho] * at.value[rho];
        }
        assert!(max_abs(&(lhs + transport)) < 1e-12);
    }

    /// Frame rotation hook: a constant SO(p,q) rotation of the section leaves
    /// the coordinate Kosmann matrix unchanged.
    #[test]
    fn coordinate_matrix_is_frame_equivariant() {
        let spec = curved();
        let sig = spec.signature();
        let pt = [0.4, 1.1, 0.3];
        let at = spec.vector_field("v").unwrap().eval_at(&pt).unwrap();
        let frame = orthonormal_frame(&spec, &pt).unwrap();
        let reference = kosmann_coordinate_from(&frame, &at, sig);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let o = random_so_element(sig, &mut rng);
            let o_inv = o.clone().try_inverse().unwrap();
            let rotated = FrameAt {
                e: &frame.e * &o,
                e_inv: &o_inv * &frame.e_inv,
                de: frame.de.iter().map(|d| d * &o).collect(),
            };
            let k = kosmann_coordinate_from(&rotated, &at, sig);
            assert!(max_abs(&(k - &reference)) < 1e-9);
        }
    }

    #[test]
    fn invariant_components_validate() {
        let v = DVector::from_vec(vec![1.0, 2.0]);
        assert!(InvariantFieldComponents::new(v.clone(), Mat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])).is_ok());
        assert!(matches!(
            InvariantFieldComponents::new(v.clone(), Mat::from_row_slice(2, 2, &[1.0, 1.0, -1.0, 0.0])),
            Err(Error::NotAntisymmetric { .. })
        ));
        assert!(InvariantFieldComponents::new(v, Mat::zeros(3, 3)).is_err());
    }
}
