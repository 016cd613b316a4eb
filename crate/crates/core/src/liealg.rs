//! Matrix Lie algebra utilities for `gl(m, ℝ)` with a signature metric η.
//!
//! The reductive splitting used everywhere else is
//!
//! ```text
//! M = A + S + c·I,   A ∈ so(p,q),  S ∈ V (η-symmetric, traceless),  c = tr(M)/m
//! ```
//!
//! with η = diag(+1 × p, −1 × q). Pluses always come first.

use nalgebra::DMatrix;
use rand::Rng;

use crate::{Error, Mat, Result};

/// Metric signature `(p, q)`: `p` plus signs followed by `q` minus signs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
}

impl Signature {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p + q == 0 {
            return Err(Error::InvalidSpec("signature must have p + q ≥ 1".into()));
        }
        Ok(Signature { p, q })
    }

    /// Euclidean signature `(m, 0)`.
    pub fn euclidean(m: usize) -> Self {
        Signature { p: m, q: 0 }
    }

    pub fn dim(&self) -> usize {
        self.p + self.q
    }

    /// Diagonal entry `η_aa`.
    #[inline]
    pub fn eta(&self, a: usize) -> f64 {
        if a < self.p {
            1.0
        } else {
            -1.0
        }
    }

    /// Every signature with `1 ≤ p + q ≤ max_dim`.
    pub fn all_up_to(max_dim: usize) -> Vec<Signature> {
        (1..=max_dim).flat_map(|m| (0..=m).map(move |q| Signature { p: m - q, q })).collect()
    }
}

impl std::fmt::Display for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

/// Components of a `gl(m)` matrix under `gl = so(p,q) ⊕ V ⊕ ℝI`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductiveSplit {
    /// η-antisymmetric part, in `so(p,q)`.
    pub antisym: Mat,
    /// η-symmetric traceless part, in `V`.
    pub sym_traceless: Mat,
    /// Coefficient `c` of the identity.
    pub trace_coeff: f64,
}

impl ReductiveSplit {
    pub fn reconstruct(&self) -> Mat {
        let m = self.antisym.nrows();
        &self.antisym + &self.sym_traceless + Mat::identity(m, m) * self.trace_coeff
    }
}

/// `η = diag(+1 × p, −1 × q)`.
pub fn eta_matrix(sig: Signature) -> Mat {
    let m = sig.dim();
    Mat::from_fn(m, m, |i, j| if i == j { sig.eta(i) } else { 0.0 })
}

fn check_square(mat: &Mat, m: usize) -> Result<()> {
    if mat.nrows() != m {
        return Err(Error::DimensionMismatch { expected: m, found: mat.nrows() });
    }
    if mat.ncols() != m {
        return Err(Error::DimensionMismatch { expected: m, found: mat.ncols() });
    }
    Ok(())
}

/// Adjoint of `mat` with respect to η: `η · matᵀ · η`.
pub fn eta_adjoint(mat: &Mat, sig: Signature) -> Result<Mat> {
    let m = sig.dim();
    check_square(mat, m)?;
    Ok(Mat::from_fn(m, m, |i, j| sig.eta(i) * mat[(j, i)] * sig.eta(j)))
}

/// Splits `mat` into its `so(p,q)`, `V` and trace parts.
pub fn decompose_gl(mat: &Mat, sig: Signature) -> Result<ReductiveSplit> {
    let m = sig.dim();
    check_square(mat, m)?;
    let c = mat.trace() / m as f64;
    let u = mat - Mat::identity(m, m) * c;
    let u_adj = eta_adjoint(&u, sig)?;
    Ok(ReductiveSplit { antisym: (&u - &u_adj) * 0.5, sym_traceless: (&u + &u_adj) * 0.5, trace_coeff: c })
}

/// `Ad_O(M) = O · M · O⁻¹`.
pub fn adjoint_action(o: &Mat, mat: &Mat) -> Result<Mat> {
    check_square(mat, o.nrows())?;
    let inv = o.clone().try_inverse().ok_or(Error::SingularMatrix)?;
    Ok(o * mat * inv)
}

/// Matrix exponential (scaling and squaring with a Padé approximant).
pub fn expm(mat: &Mat) -> Mat {
    mat.clone().exp()
}

/// Random η-antisymmetric matrix with lowered entries uniform in `[-scale, scale]`.
pub fn random_so_algebra<R: Rng + ?Sized>(sig: Signature, rng: &mut R, scale: f64) -> Mat {
    let m = sig.dim();
    let mut lowered = Mat::zeros(m, m);
    for i in 0..m {
        for j in (i + 1)..m {
            let v = rng.gen_range(-scale..=scale);
            lowered[(i, j)] = v;
            lowered[(j, i)] = -v;
        }
    }
    eta_matrix(sig) * lowered
}

/// `exp(A)` for a random η-antisymmetric `A`; the result lies in `SO(p,q)`.
pub fn random_so_element<R: Rng + ?Sized>(sig: Signature, rng: &mut R) -> Mat {
    expm(&random_so_algebra(sig, rng, 1.0))
}

/// `max |etaAdjoint(O)·O − I|`; zero for elements of `O(p,q)`.
pub fn orthogonality_residual(o: &Mat, sig: Signature) -> Result<f64> {
    let m = sig.dim();
    let prod = eta_adjoint(o, sig)? * o - Mat::identity(m, m);
    Ok(max_abs(&prod))
}

/// Largest absolute entry.
pub fn max_abs(mat: &DMatrix<f64>) -> f64 {
    mat.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// `max |A + Aᵀ|`.
pub fn antisymmetry_residual(mat: &Mat) -> f64 {
    max_abs(&(mat + mat.transpose()))
}

/// `max |A − Aᵀ|`.
pub fn symmetry_residual(mat: &Mat) -> f64 {
    max_abs(&(mat - mat.transpose()))
}
