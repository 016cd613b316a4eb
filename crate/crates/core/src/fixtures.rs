//! Builtin geometries for the randomized suites, plus random field
//! generators and the documented witnesses.

use rand::Rng;

use crate::geometry::GeometrySpec;
use crate::liealg::Signature;
use crate::Result;

/// A chart together with the box its sample points are drawn from.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub spec: GeometrySpec,
    pub domain: Vec<(f64, f64)>,
}

impl Fixture {
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.domain.iter().map(|&(lo, hi)| rng.gen_range(lo..hi)).collect()
    }

    /// Midpoint of the sampling box.
    pub fn center(&self) -> Vec<f64> {
        self.domain.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect()
    }
}

fn coord_names(m: usize) -> Vec<String> {
    (0..m).map(|i| format!("x{i}")).collect()
}

fn diagonal_rows(diag: &[&str]) -> Vec<Vec<String>> {
    let m = diag.len();
    (0..m).map(|i| (i..m).map(|j| if i == j { diag[i].to_string() } else { "0".to_string() }).collect()).collect()
}

fn build(name: &str, sig: Signature, diag: &[&str], domain: Vec<(f64, f64)>) -> Result<Fixture> {
    let names = coord_names(sig.dim());
    let coords: Vec<&str> = names.iter().map(String::as_str).collect();
    let spec = GeometrySpec::new(sig, &coords, &diagonal_rows(diag))?;
    Ok(Fixture { name: name.to_string(), spec, domain })
}

/// `η` on `[−1, 1]^m`.
pub fn flat(sig: Signature) -> Fixture {
    let diag: Vec<&str> = (0..sig.dim()).map(|a| if sig.eta(a) > 0.0 { "1" } else { "-1" }).collect();
    build(&format!("flat-{}-{}", sig.p, sig.q), sig, &diag, vec![(-1.0, 1.0); sig.dim()]).expect("flat metric is valid")
}

/// `diag(1, x0²)` on `x0 ∈ [1, 2]`.
pub fn polar() -> Fixture {
    build("polar", Signature::euclidean(2), &["1", "x0^2"], vec![(1.0, 2.0), (-3.0, 3.0)])
        .expect("polar metric is valid")
}

/// `e^{2 x0} η` in signature (1,1).
pub fn conformal() -> Fixture {
    build("conformal", Signature::new(1, 1).unwrap(), &["exp(2*x0)", "-exp(2*x0)"], vec![(-0.5, 0.5), (-1.0, 1.0)])
        .expect("conformal metric is valid")
}

/// `diag(f, −1/f, −r², −r² sin²θ)` with `f = 1 − 2/r`, `r = x1 ∈ [4, 8]`, `θ = x2 ∈ [0.5, 2.5]`.
pub fn schwarzschild() -> Fixture {
    build(
        "schwarzschild",
        Signature::new(1, 3).unwrap(),
        &["1 - 2/x1", "-1/(1 - 2/x1)", "-x1^2", "-x1^2*sin(x2)^2"],
        vec![(-1.0, 1.0), (4.0, 8.0), (0.5, 2.5), (-1.0, 1.0)],
    )
    .expect("schwarzschild metric is valid")
}

/// Flat charts for every signature with `m ∈ {2, 3, 4}`, then the curved ones.
pub fn all() -> Vec<Fixture> {
    let mut out: Vec<Fixture> = Signature::all_up_to(4).into_iter().filter(|s| s.dim() >= 2).map(flat).collect();
    out.extend([polar(), conformal(), schwarzschild()]);
    out
}

/// The curved fixtures only.
pub fn curved() -> Vec<Fixture> {
    vec![polar(), conformal(), schwarzschild()]
}

fn coeff<R: Rng + ?Sized>(rng: &mut R) -> String {
    format!("({:.6})", rng.gen_range(-1.0..1.0))
}

/// A smooth scalar expression in the given coordinates: affine part, one
/// bilinear term and one trigonometric term.
pub fn random_scalar_source<R: Rng + ?Sized>(coords: &[String], rng: &mut R) -> String {
    let m = coords.len();
    let mut s = coeff(rng);
    for x in coords {
        s += &format!(" + {}*{x}", coeff(rng));
    }
    let (i, j) = (rng.gen_range(0..m), rng.gen_range(0..m));
    s += &format!(" + {}*{}*{}", coeff(rng), coords[i], coords[j]);
    let k = rng.gen_range(0..m);
    let f = if rng.gen_bool(0.5) { "sin" } else { "cos" };
    s += &format!(" + {}*{f}({})", coeff(rng), coords[k]);
    s
}

pub fn random_vector_source<R: Rng + ?Sized>(coords: &[String], rng: &mut R) -> Vec<String> {
    coords.iter().map(|_| random_scalar_source(coords, rng)).collect()
}

pub fn random_spinor_source<R: Rng + ?Sized>(coords: &[String], n: usize, rng: &mut R) -> Vec<(String, String)> {
    (0..n).map(|_| (random_scalar_source(coords, rng), random_scalar_source(coords, rng))).collect()
}

/// Named Killing fields of Minkowski space `(1, q)` in coordinates `x0..xq`:
/// translations, boosts `x_i ∂_0 + x_0 ∂_i` and rotations `−x_j ∂_i + x_i ∂_j`.
pub fn minkowski_killing(q: usize) -> Vec<(String, Vec<String>)> {
    let m = q + 1;
    let zero = || vec!["0".to_string(); m];
    let mut out = Vec::new();
    for i in 0..m {
        let mut f = zero();
        f[i] = "1".into();
        out.push((format!("translation{i}"), f));
    }
    for i in 1..m {
        let mut f = zero();
        f[0] = format!("x{i}");
        f[i] = "x0".into();
        out.push((format!("boost{i}"), f));
    }
    for i in 1..m {
        for j in (i + 1)..m {
            let mut f = zero();
            f[i] = format!("-x{j}");
            f[j] = format!("x{i}");
            out.push((format!("rotation{i}{j}"), f));
        }
    }
    out
}

/// Non-Killing fields on Minkowski space `(1, q)`: the dilation and a shear.
pub fn minkowski_non_killing(q: usize) -> Vec<(String, Vec<String>)> {
    let m = q + 1;
    let dilation = (0..m).map(|i| format!("x{i}")).collect();
    let mut shear = vec!["0".to_string(); m];
    shear[0] = "x0*x1".into();
    vec![("dilation".into(), dilation), ("shear".into(), shear)]
}

/// Minkowski `(1, q)` carrying its Killing fields and non-Killing witnesses.
pub fn minkowski_with_fields(q: usize) -> Fixture {
    let mut fx = flat(Signature::new(1, q).unwrap());
    for (name, comps) in minkowski_killing(q).into_iter().chain(minkowski_non_killing(q)) {
        fx.spec.add_vector_field(&name, &comps).expect("builtin field is valid");
    }
    fx
}

/// Point of the polar fixture where the natural metric derivative of
/// [`WITNESS_XI`] is far from zero.
pub const WITNESS_POINT: [f64; 2] = [1.5, 0.3];
/// A non-Killing field on the polar fixture.
pub const WITNESS_XI: [&str; 2] = ["x0*x1", "sin(x0)"];
/// Second member of the polar witness pair for the commutator defect.
pub const WITNESS_ZETA: [&str; 2] = ["1 + x1^2", "x0"];
/// Spinor used with the witness pair.
pub const WITNESS_PSI: [(&str, &str); 2] = [("x0", "x1"), ("1", "x0*x1")];

/// The polar fixture with the witness fields `xi`, `zeta` and `psi` attached.
pub fn polar_witness() -> Fixture {
    let mut fx = polar();
    fx.spec.add_vector_field("xi", &WITNESS_XI).unwrap();
    fx.spec.add_vector_field("zeta", &WITNESS_ZETA).unwrap();
    fx.spec.add_spinor_field("psi", &WITNESS_PSI).unwrap();
    fx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{orthonormal_frame, VectorField};
    use crate::liederiv::killing_residual;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fixture_set_covers_required_signatures() {
        let names: Vec<String> = all().into_iter().map(|f| f.name).collect();
        for n in ["flat-2-0", "flat-1-1", "flat-3-0", "flat-1-3", "flat-2-2", "polar", "conformal", "schwarzschild"] {
            assert!(names.iter().any(|x| x == n), "{n}");
        }
    }

    #[test]
    fn frames_exist_at_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for fx in all() {
            for _ in 0..10 {
                let pt = fx.sample_point(&mut rng);
                orthonormal_frame(&fx.spec, &pt).unwrap_or_else(|e| panic!("{}: {e}", fx.name));
            }
        }
    }

    #[test]
    fn random_sources_parse() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut fx = schwarzschild();
        let comps = random_vector_source(fx.spec.coords(), &mut rng);
        fx.spec.add_vector_field("r", &comps).unwrap();
        let spinor = random_spinor_source(fx.spec.coords(), 4, &mut rng);
        fx.spec.add_spinor_field("s", &spinor).unwrap();
        fx.spec.vector_field("r").unwrap().eval_at(&fx.center()).unwrap();
    }

    #[test]
    fn killing_sets_are_killing() {
        for q in [1, 3] {
            let fx = minkowski_with_fields(q);
            let pt = fx.center();
            let pt: Vec<f64> = pt.iter().enumerate().map(|(i, x)| x + 0.1 * (i as f64 + 1.0)).collect();
            let killing = minkowski_killing(q);
            assert_eq!(killing.len(), (q + 1) * (q + 2) / 2);
            for (name, _) in killing {
                let xi = fx.spec.vector_field(&name).unwrap();
                assert!(killing_residual(&fx.spec, xi, &pt).unwrap() <= 1e-12, "{name}");
            }
            for (name, _) in minkowski_non_killing(q) {
                let xi = fx.spec.vector_field(&name).unwrap();
                assert!(killing_residual(&fx.spec, xi, &pt).unwrap() >= 1e-2, "{name}");
            }
        }
    }
}
