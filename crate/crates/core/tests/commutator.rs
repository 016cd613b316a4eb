//! Commutator defect of the Kosmann spinor derivative on flat space.
//!
//! For linear Killing fields `ξ = A x`, `ζ = B x` with constant spinor ψ the
//! derivative reduces to `L_ξ ψ = σ(A) ψ`, and since `[ξ, ζ] = −[A, B] x`
//! while σ is a homomorphism, the defect is `2 σ([A, B]) ψ`. It vanishes
//! whenever one of the fields is a translation, and for every pair in (1,1)
//! because so(1,1) is abelian.

use kosmann_core::clifford::lowered_bracket;
use kosmann_core::fixtures;
use kosmann_core::liederiv::{commutator_defect, spinor_max_abs};
use kosmann_core::lifts::{kosmann_split, natural_lift_coeffs};
use kosmann_core::{Complex64, SpinorValue};

#[test]
fn rotation_pairs_in_four_dimensions_pick_up_twice_the_bracket() {
    let mut fx = fixtures::minkowski_with_fields(3);
    fx.spec.add_spinor_field("psi", &[("1", "0"), ("0.5", "0.25"), ("-1", "2"), ("0", "-0.75")]).unwrap();
    let spec = &fx.spec;
    let sig = spec.signature();
    let psi = spec.spinor_field("psi").unwrap();
    let pt = [0.2, -0.3, 0.5, 0.1];
    let value = SpinorValue::from_vec(vec![
        Complex64::new(1.0, 0.0),
        Complex64::new(0.5, 0.25),
        Complex64::new(-1.0, 2.0),
        Complex64::new(0.0, -0.75),
    ]);
    for (a, b) in [("rotation12", "rotation13"), ("boost1", "boost2"), ("boost1", "rotation12")] {
        let (xi, zeta) = (spec.vector_field(a).unwrap(), spec.vector_field(b).unwrap());
        let ka = kosmann_split(&natural_lift_coeffs(spec, xi, &pt).unwrap(), sig).kosmann;
        let kb = kosmann_split(&natural_lift_coeffs(spec, zeta, &pt).unwrap(), sig).kosmann;
        let expected = spec.gammas().spin_algebra_map(&lowered_bracket(&ka, &kb, sig)).unwrap()
            * &value
            * Complex64::new(2.0, 0.0);
        let defect = commutator_defect(spec, xi, zeta, psi, &pt).unwrap();
        assert!(spinor_max_abs(&expected) > 0.1, "{a},{b}");
        assert!(spinor_max_abs(&(defect - expected)) < 1e-6, "{a},{b}");
    }
}

#[test]
fn pairs_with_a_translation_commute() {
    let mut fx = fixtures::minkowski_with_fields(3);
    fx.spec.add_spinor_field("psi", &[("x0", "1"), ("x1*x2", "0"), ("sin(x3)", "x0"), ("1", "x1")]).unwrap();
    let spec = &fx.spec;
    let psi = spec.spinor_field("psi").unwrap();
    let pt = [0.2, -0.3, 0.5, 0.1];
    for (name, _) in fixtures::minkowski_killing(3) {
        for t in ["translation0", "translation2"] {
            let d = commutator_defect(spec, spec.vector_field(&name).unwrap(), spec.vector_field(t).unwrap(), psi, &pt)
                .unwrap();
            assert!(spinor_max_abs(&d) < 1e-5, "{name},{t}: {}", spinor_max_abs(&d));
        }
    }
}

#[test]
fn curved_witness_pair_has_a_large_defect() {
    let w = fixtures::polar_witness();
    let spec = &w.spec;
    let d = commutator_defect(
        spec,
        spec.vector_field("xi").unwrap(),
        spec.vector_field("zeta").unwrap(),
        spec.spinor_field("psi").unwrap(),
        &fixtures::WITNESS_POINT,
    )
    .unwrap();
    assert!(spinor_max_abs(&d) > 1e-3);
}
