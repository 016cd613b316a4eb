//! Gamma matrices for `Cl(p,q)` and the infinitesimal spin representation
//! `σ(A) = ¼ A_{ab} γ^a γ^b`.
//!
//! Euclidean gammas come from the Pauli ladder
//! `L₀ = {[1]}`, `L_{k+1} = {Γ ⊗ σ₁ : Γ ∈ L_k} ∪ {I ⊗ σ₂, I ⊗ σ₃}`,
//! which gives `2k + 1` anticommuting involutions of size `2^k`. The last `q`
//! of the `m` gammas are multiplied by `i`, so `(γ^a)² = η^{aa} I`.

use nalgebra::DMatrix;

use crate::liealg::{max_abs, Signature};
use crate::{CMat, Complex64, Error, Mat, Result, SpinorValue};

const ANTISYMMETRY_TOL: f64 = 1e-10;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pauli() -> [CMat; 3] {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        CMat::from_row_slice(2, 2, &[z, one, one, z]),
        CMat::from_row_slice(2, 2, &[z, -i, i, z]),
        CMat::from_row_slice(2, 2, &[one, z, z, -one]),
    ]
}

/// `2k + 1` mutually anticommuting Hermitian involutions of size `2^k`.
fn euclidean_ladder(k: usize) -> Vec<CMat> {
    let [s1, s2, s3] = pauli();
    let mut level = vec![CMat::identity(1, 1)];
    for _ in 0..k {
        let n = level[0].nrows();
        let id = CMat::identity(n, n);
        let mut next: Vec<CMat> = level.iter().map(|g| g.kronecker(&s1)).collect();
        next.push(id.kronecker(&s2));
        next.push(id.kronecker(&s3));
        level = next;
    }
    level
}

/// Gamma matrices for a signature.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaRep {
    sig: Signature,
    gammas: Vec<CMat>,
}

impl GammaRep {
    pub fn new(sig: Signature) -> Self {
        let m = sig.dim();
        let i = c(0.0, 1.0);
        let gammas = euclidean_ladder(m / 2)
            .into_iter()
            .take(m)
            .enumerate()
            .map(|(a, g)| if a < sig.p { g } else { g * i })
            .collect();
        GammaRep { sig, gammas }
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    /// Spinor dimension `N = 2^⌊m/2⌋`.
    pub fn spinor_dim(&self) -> usize {
        self.gammas[0].nrows()
    }

    /// `γ^a` (frame index up).
    pub fn gamma(&self, a: usize) -> &CMat {
        &self.gammas[a]
    }

    pub fn gammas(&self) -> &[CMat] {
        &self.gammas
    }

    /// `max |γ^a γ^b + γ^b γ^a − 2 η^{ab} I|` over all pairs.
    pub fn clifford_residual(&self) -> f64 {
        let n = self.spinor_dim();
        let m = self.gammas.len();
        let mut worst = 0.0_f64;
        for a in 0..m {
            for b in 0..m {
                let anti = &self.gammas[a] * &self.gammas[b] + &self.gammas[b] * &self.gammas[a];
                let target = if a == b { self.sig.eta(a) * 2.0 } else { 0.0 };
                let diff = anti - CMat::identity(n, n) * c(target, 0.0);
                worst = worst.max(diff.iter().fold(0.0_f64, |acc, z| acc.max(z.norm())));
            }
        }
        worst
    }

    /// `σ(A) = ¼ Σ_{a,b} A_{ab} γ^a γ^b` for antisymmetric `A` with both indices down.
    pub fn spin_algebra_map(&self, lowered: &Mat) -> Result<CMat> {
        let m = self.gammas.len();
        if lowered.nrows() != m || lowered.ncols() != m {
            return Err(Error::DimensionMismatch { expected: m, found: lowered.nrows() });
        }
        let residual = max_abs(&(lowered + lowered.transpose()));
        if residual > ANTISYMMETRY_TOL * max_abs(lowered).max(1.0) {
            return Err(Error::NotAntisymmetric { residual });
        }
        let n = self.spinor_dim();
        let mut out = CMat::zeros(n, n);
        for a in 0..m {
            for b in 0..m {
                let coeff = lowered[(a, b)];
                if coeff != 0.0 {
                    out += &self.gammas[a] * &self.gammas[b] * c(0.25 * coeff, 0.0);
                }
            }
        }
        Ok(out)
    }

    /// `M ψ`.
    pub fn apply(&self, op: &CMat, psi: &SpinorValue) -> Result<SpinorValue> {
        apply_clifford(op, psi)
    }
}

/// Matrix–vector product with a shape check.
pub fn apply_clifford(op: &CMat, psi: &SpinorValue) -> Result<SpinorValue> {
    if op.ncols() != psi.len() {
        return Err(Error::DimensionMismatch { expected: op.ncols(), found: psi.len() });
    }
    Ok(op * psi)
}

/// Lowered form of `[A, B]` for lowered antisymmetric `A`, `B`:
/// `A η B − B η A`.
pub fn lowered_bracket(a: &Mat, b: &Mat, sig: Signature) -> Mat {
    let eta = crate::liealg::eta_matrix(sig);
    a * &eta * b - b * &eta * a
}

/// Largest entry modulus of a complex matrix.
pub fn cmax_abs(mat: &DMatrix<Complex64>) -> f64 {
    mat.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}
