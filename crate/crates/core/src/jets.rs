//! The first-order principal prolongation group `W¹·¹ₘG = G¹ₘ ⋊ T¹ₘG` for a
//! matrix group `G`, and its actions on `ℝ^m × Lie(G)`.
//!
//! An element `(α, a, θ)` is the pair of 1-jets at the origin of
//! `α(x) = A·x` and `a(x) = a₀·exp(x^l θ_l)`, so `θ_l = ∂_l(a₀⁻¹ a(x))|₀`.
//! Multiplication is the jet of `(α∘β, (a∘β)·b)`:
//!
//! ```text
//! (A, a₀, θ)·(B, b₀, φ) = (AB, a₀b₀, Ad_{b₀⁻¹}(θ_k B^k_l) + φ_l)
//! ```

use std::fmt;

use rand::Rng;

use crate::liealg::{eta_matrix, expm, max_abs, Signature};
use crate::{Error, Mat, Result};

const MEMBERSHIP_TOL: f64 = 1e-10;

/// A matrix group together with membership tests for it and its algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupDescriptor {
    General(usize),
    Special(usize),
    Orthogonal(Signature),
}

impl GroupDescriptor {
    /// Parses `gl:N`, `sl:N`, `so:N` or `so:P,Q`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::InvalidSpec(format!("unknown group `{text}`; expected gl:N, sl:N, so:N or so:P,Q"));
        let (kind, rest) = text.split_once(':').ok_or_else(bad)?;
        let nums: Vec<usize> = rest
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        match (kind.trim(), nums.as_slice()) {
            ("gl", [n]) if *n > 0 => Ok(GroupDescriptor::General(*n)),
            ("sl", [n]) if *n > 0 => Ok(GroupDescriptor::Special(*n)),
            ("so", [n]) if *n > 0 => Ok(GroupDescriptor::Orthogonal(Signature::euclidean(*n))),
            ("so", [p, q]) => Ok(GroupDescriptor::Orthogonal(Signature::new(*p, *q)?)),
            _ => Err(bad()),
        }
    }

    /// Matrix size `n`.
    pub fn n(&self) -> usize {
        match self {
            GroupDescriptor::General(n) | GroupDescriptor::Special(n) => *n,
            GroupDescriptor::Orthogonal(sig) => sig.dim(),
        }
    }

    /// How far `a` is from lying in `G` (0 for members).
    pub fn group_residual(&self, a: &Mat) -> f64 {
        if a.nrows() != self.n() || a.ncols() != self.n() {
            return f64::INFINITY;
        }
        let det = a.determinant();
        match self {
            GroupDescriptor::General(_) => {
                if det.abs() > 1e-12 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            GroupDescriptor::Special(_) => (det - 1.0).abs(),
            GroupDescriptor::Orthogonal(sig) => {
                let eta = eta_matrix(*sig);
                max_abs(&(a.transpose() * &eta * a - &eta)).max((det - 1.0).abs())
            }
        }
    }

    /// How far `x` is from lying in `Lie(G)`.
    pub fn algebra_residual(&self, x: &Mat) -> f64 {
        if x.nrows() != self.n() || x.ncols() != self.n() {
            return f64::INFINITY;
        }
        match self {
            GroupDescriptor::General(_) => 0.0,
            GroupDescriptor::Special(_) => x.trace().abs(),
            GroupDescriptor::Orthogonal(sig) => {
                let eta = eta_matrix(*sig);
                max_abs(&(&eta * x.transpose() * &eta + x))
            }
        }
    }

    pub fn contains(&self, a: &Mat) -> bool {
        self.group_residual(a) <= MEMBERSHIP_TOL * max_abs(a).max(1.0)
    }

    pub fn algebra_contains(&self, x: &Mat) -> bool {
        self.algebra_residual(x) <= MEMBERSHIP_TOL * max_abs(x).max(1.0)
    }

    /// A random algebra element with entries of order `scale`.
    pub fn random_algebra<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> Mat {
        let n = self.n();
        let raw = Mat::from_fn(n, n, |_, _| rng.gen_range(-scale..scale));
        match self {
            GroupDescriptor::General(_) => raw,
            GroupDescriptor::Special(_) => {
                let shift = raw.trace() / n as f64;
                raw - Mat::identity(n, n) * shift
            }
            GroupDescriptor::Orthogonal(sig) => {
                let eta = eta_matrix(*sig);
                &eta * (&raw - raw.transpose()) * 0.5
            }
        }
    }

    /// A random group element near the identity component.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Mat {
        expm(&self.random_algebra(rng, 0.8))
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupDescriptor::General(n) => write!(f, "gl:{n}"),
            GroupDescriptor::Special(n) => write!(f, "sl:{n}"),
            GroupDescriptor::Orthogonal(sig) => write!(f, "so:{},{}", sig.p, sig.q),
        }
    }
}

/// `(α^j_k, a, a^r_l)`: frame jet, group value and left-logarithmic first derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct JetGroupElement {
    pub alpha: Mat,
    pub a: Mat,
    pub theta: Vec<Mat>,
}

impl JetGroupElement {
    /// Validates shapes, invertibility and membership.
    pub fn new(alpha: Mat, a: Mat, theta: Vec<Mat>, desc: GroupDescriptor) -> Result<Self> {
        let m = alpha.nrows();
        if alpha.ncols() != m {
            return Err(Error::DimensionMismatch { expected: m, found: alpha.ncols() });
        }
        if theta.len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: theta.len() });
        }
        if alpha.determinant().abs() <= 1e-12 {
            return Err(Error::SingularMatrix);
        }
        let n = desc.n();
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: a.nrows() });
        }
        if !desc.contains(&a) {
            return Err(Error::Precondition(format!(
                "group part is not in {desc} (residual {:e})",
                desc.group_residual(&a)
            )));
        }
        for t in &theta {
            if t.nrows() != n || t.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, found: t.nrows() });
            }
            if !desc.algebra_contains(t) {
                return Err(Error::Precondition(format!(
                    "theta entry is not in the algebra of {desc} (residual {:e})",
                    desc.algebra_residual(t)
                )));
            }
        }
        Ok(JetGroupElement { alpha, a, theta })
    }

    pub fn m(&self) -> usize {
        self.alpha.nrows()
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn random<R: Rng + ?Sized>(m: usize, desc: GroupDescriptor, rng: &mut R) -> Self {
        let alpha = Mat::identity(m, m) + Mat::from_fn(m, m, |_, _| rng.gen_range(-0.5..0.5));
        let a = desc.random_element(rng);
        let theta = (0..m).map(|_| desc.random_algebra(rng, 1.0)).collect();
        JetGroupElement { alpha, a, theta }
    }

    /// Largest entry difference over all three parts.
    pub fn distance(&self, other: &Self) -> f64 {
        let mut d = max_abs(&(&self.alpha - &other.alpha)).max(max_abs(&(&self.a - &other.a)));
        for (s, o) in self.theta.iter().zip(&other.theta) {
            d = d.max(max_abs(&(s - o)));
        }
        d
    }

    fn check_pair(&self, other: &Self) -> Result<()> {
        if self.m() != other.m() {
            return Err(Error::DimensionMismatch { expected: self.m(), found: other.m() });
        }
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: other.n() });
        }
        Ok(())
    }
}

/// `θ_k M^k_l` for each `l`.
fn contract(theta: &[Mat], coeffs: &Mat) -> Vec<Mat> {
    let n = theta[0].nrows();
    (0..coeffs.ncols())
        .map(|l| theta.iter().enumerate().fold(Mat::zeros(n, n), |acc, (k, t)| acc + t * coeffs[(k, l)]))
        .collect()
}

/// `Σ_j θ_j ν^j`.
fn contract_vec(theta: &[Mat], nu: &[f64]) -> Mat {
    let n = theta[0].nrows();
    theta.iter().zip(nu).fold(Mat::zeros(n, n), |acc, (t, v)| acc + t * *v)
}

fn ad(g: &Mat, g_inv: &Mat, x: &Mat) -> Mat {
    g * x * g_inv
}

pub fn w11_identity(m: usize, desc: GroupDescriptor) -> JetGroupElement {
    let n = desc.n();
    JetGroupElement { alpha: Mat::identity(m, m), a: Mat::identity(n, n), theta: vec![Mat::zeros(n, n); m] }
}

pub fn w11_multiply(g1: &JetGroupElement, g2: &JetGroupElement) -> Result<JetGroupElement> {
    g1.check_pair(g2)?;
    let b_inv = g2.a.clone().try_inverse().ok_or(Error::SingularMatrix)?;
    let theta =
        contract(&g1.theta, &g2.alpha).iter().zip(&g2.theta).map(|(t, phi)| ad(&b_inv, &g2.a, t) + phi).collect();
    Ok(JetGroupElement { alpha: &g1.alpha * &g2.alpha, a: &g1.a * &g2.a, theta })
}

pub fn w11_inverse(g: &JetGroupElement) -> Result<JetGroupElement> {
    let alpha_inv = g.alpha.clone().try_inverse().ok_or(Error::SingularMatrix)?;
    let a_inv = g.a.clone().try_inverse().ok_or(Error::SingularMatrix)?;
    let theta = contract(&g.theta, &alpha_inv).iter().map(|t| -ad(&g.a, &a_inv, t)).collect();
    Ok(JetGroupElement { alpha: alpha_inv, a: a_inv, theta })
}

fn check_action_input(g: &JetGroupElement, nu: &[f64], v: &Mat) -> Result<()> {
    if nu.len() != g.m() {
        return Err(Error::DimensionMismatch { expected: g.m(), found: nu.len() });
    }
    if v.nrows() != g.n() || v.ncols() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), found: v.nrows() });
    }
    Ok(())
}

/// `(α ν, Ad_a(v + θ_j ν^j))`.
pub fn action_v(g: &JetGroupElement, nu: &[f64], v: &Mat) -> Result<(Vec<f64>, Mat)> {
    check_action_input(g, nu, v)?;
    let a_inv = g.a.clone().try_inverse().ok_or(Error::SingularMatrix)?;
    let nu_out = (&g.alpha * nalgebra::DVector::from_column_slice(nu)).as_slice().to_vec();
    Ok((nu_out, ad(&g.a, &a_inv, &(v + contract_vec(&g.theta, nu)))))
}

/// `Ad_a(v)`; the first-jet part of `g` drops out.
pub fn action_vertical(g: &JetGroupElement, v: &Mat) -> Result<Mat> {
    if v.nrows() != g.n() || v.ncols() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), found: v.nrows() });
    }
    let a_inv = g.a.clone().try_inverse().ok_or(Error::SingularMatrix)?;
    Ok(ad(&g.a, &a_inv, v))
}

/// `(α ν, v + θ_j ν^j)` for elements of the kernel `a = I`.
pub fn action_tau(g: &JetGroupElement, nu: &[f64], v: &Mat) -> Result<(Vec<f64>, Mat)> {
    check_action_input(g, nu, v)?;
    let n = g.n();
    let residual = max_abs(&(&g.a - Mat::identity(n, n)));
    if residual > MEMBERSHIP_TOL {
        return Err(Error::Precondition(format!("action needs a = I, found |a − I| = {residual:e}")));
    }
    let nu_out = (&g.alpha * nalgebra::DVector::from_column_slice(nu)).as_slice().to_vec();
    Ok((nu_out, v + contract_vec(&g.theta, nu)))
}

/// Step of the central differences in [`brute_force_multiply`].
pub const ORACLE_STEP: f64 = 1e-5;

/// Composes the representative maps of `g1` and `g2` explicitly and reads
/// off the jet of the result by central differences.
pub fn brute_force_multiply(g1: &JetGroupElement, g2: &JetGroupElement) -> Result<JetGroupElement> {
    g1.check_pair(g2)?;
    let m = g1.m();
    let h = ORACLE_STEP;
    let alpha_map = |g: &JetGroupElement, x: &[f64]| -> Vec<f64> {
        (0..m).map(|j| (0..m).map(|k| g.alpha[(j, k)] * x[k]).sum()).collect()
    };
    let group_map = |g: &JetGroupElement, x: &[f64]| -> Mat { &g.a * expm(&contract_vec(&g.theta, x)) };
    let composed_alpha = |x: &[f64]| alpha_map(g1, &alpha_map(g2, x));
    let composed_group = |x: &[f64]| group_map(g1, &alpha_map(g2, x)) * group_map(g2, x);

    let origin = vec![0.0; m];
    let c0 = composed_group(&origin);
    let c0_inv = c0.clone().try_inverse().ok_or(Error::SingularMatrix)?;
    let mut alpha = Mat::zeros(m, m);
    let mut theta = Vec::with_capacity(m);
    for l in 0..m {
        let mut plus = origin.clone();
        let mut minus = origin.clone();
        plus[l] = h;
        minus[l] = -h;
        let (ap, am) = (composed_alpha(&plus), composed_alpha(&minus));
        for j in 0..m {
            alpha[(j, l)] = (ap[j] - am[j]) / (2.0 * h);
        }
        theta.push(&c0_inv * (composed_group(&plus) - composed_group(&minus)) / (2.0 * h));
    }
    Ok(JetGroupElement { alpha, a: c0, theta })
}
