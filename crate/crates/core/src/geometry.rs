//! Pointwise geometry on a single chart.
//!
//! A [`GeometrySpec`] holds the signature, coordinate names, metric component
//! expressions and named vector / spinor / density fields. Everything else in
//! this module evaluates that data at a point: the metric and its first
//! derivatives, a canonical orthonormal frame with its derivatives, the
//! Levi-Civita Christoffel symbols and the spin connection.
//!
//! Index conventions:
//!
//! * `FrameAt::e[(μ, a)] = e_a^μ` (columns are frame vectors),
//!   `FrameAt::e_inv[(a, μ)] = ẽ^a_μ`, and `de[ν][(μ, a)] = ∂_ν e_a^μ`.
//! * `MetricAt::dg[ρ][(μ, ν)] = ∂_ρ g_{μν}`.
//! * `ChristoffelAt` stores `Γ^ρ_{μν}` as `gamma[ρ][(μ, ν)]`.
//! * `SpinConnectionAt::lowered[μ][(a, b)] = ω_{μab} = g(e_a, ∇_μ e_b)`.

use std::sync::Arc;

use nalgebra::{DVector, SymmetricEigen};

use crate::clifford::GammaRep;
use crate::expr::{DualValue, Expression};
use crate::liealg::{eta_matrix, Signature};
use crate::{Complex64, Error, Mat, Result, SpinorValue};

/// Names that cannot be used for coordinates or fields.
const RESERVED: &[&str] = &["sqrt", "sin", "cos", "exp", "log", "metric"];

#[derive(Debug, Clone)]
pub struct VectorFieldSpec {
    pub name: String,
    /// Coordinate components `ξ^μ`.
    pub components: Vec<Expression>,
}

#[derive(Debug, Clone)]
pub struct SpinorFieldSpec {
    pub name: String,
    /// `(re, im)` expression pairs, one per spinor component.
    pub components: Vec<(Expression, Expression)>,
}

/// A tensor density of rank `(upper, lower)` and weight `weight`.
///
/// Components are stored row-major with the upper indices first.
#[derive(Debug, Clone)]
pub struct DensityFieldSpec {
    pub name: String,
    pub upper: usize,
    pub lower: usize,
    pub weight: f64,
    pub components: Vec<Expression>,
}

/// A chart with its metric and named fields.
#[derive(Debug, Clone)]
pub struct GeometrySpec {
    sig: Signature,
    coords: Arc<[String]>,
    /// `m*m` entries, `g_{μν}` and `g_{νμ}` share one expression.
    metric: Vec<Arc<Expression>>,
    vector_fields: Vec<VectorFieldSpec>,
    spinor_fields: Vec<SpinorFieldSpec>,
    density_fields: Vec<DensityFieldSpec>,
    gammas: GammaRep,
}

/// Number of complex spinor components, `2^⌊m/2⌋`.
pub fn spinor_dim(m: usize) -> usize {
    1 << (m / 2)
}

fn check_identifier(name: &str, what: &str) -> Result<()> {
    let mut chars = name.chars();
    let valid = matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_');
    if !valid {
        return Err(Error::InvalidSpec(format!("invalid {what} name `{name}`")));
    }
    if RESERVED.contains(&name) {
        return Err(Error::InvalidSpec(format!("`{name}` is reserved and cannot be a {what} name")));
    }
    Ok(())
}

impl GeometrySpec {
    /// Builds a chart from metric rows.
    ///
    /// Row `i` may either list all `m` entries (the lower triangle must then
    /// match the upper one structurally) or only the `m − i` entries `g_{ii} … g_{i,m−1}`.
    pub fn new<R, S>(sig: Signature, coords: &[&str], metric_rows: &[R]) -> Result<Self>
    where
        R: AsRef<[S]>,
        S: AsRef<str>,
    {
        let m = sig.dim();
        if coords.len() != m {
            return Err(Error::InvalidSpec(format!("signature {sig} needs {m} coordinates, got {}", coords.len())));
        }
        for (i, c) in coords.iter().enumerate() {
            check_identifier(c, "coordinate")?;
            if coords[..i].contains(c) {
                return Err(Error::InvalidSpec(format!("duplicate coordinate `{c}`")));
            }
        }
        let coords: Arc<[String]> = coords.iter().map(|s| s.to_string()).collect();
        if metric_rows.len() != m {
            return Err(Error::InvalidSpec(format!("metric needs {m} rows, got {}", metric_rows.len())));
        }
        let mut metric: Vec<Option<Arc<Expression>>> = vec![None; m * m];
        for (i, row) in metric_rows.iter().enumerate() {
            let row = row.as_ref();
            let (offset, expected_len) = match row.len() {
                n if n == m => (0, m),
                n if n == m - i => (i, m - i),
                n => {
                    return Err(Error::InvalidSpec(format!(
                        "metric row {i} has {n} entries, expected {m} or {}",
                        m - i
                    )))
                }
            };
            debug_assert_eq!(row.len(), expected_len);
            for (k, src) in row.iter().enumerate() {
                let j = offset + k;
                let expr = Expression::parse_shared(src.as_ref(), &coords)?;
                if j >= i {
                    let shared = Arc::new(expr);
                    metric[i * m + j] = Some(shared.clone());
                    metric[j * m + i] = Some(shared);
                } else if metric[j * m + i].as_deref() != Some(&expr) {
                    return Err(Error::InvalidSpec(format!("metric is not symmetric at ({i},{j})")));
                }
            }
        }
        let metric = metric.into_iter().map(|e| e.expect("every entry filled")).collect();
        Ok(GeometrySpec {
            sig,
            coords,
            metric,
            vector_fields: Vec::new(),
            spinor_fields: Vec::new(),
            density_fields: Vec::new(),
            gammas: GammaRep::new(sig),
        })
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn dim(&self) -> usize {
        self.sig.dim()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn shared_coords(&self) -> &Arc<[String]> {
        &self.coords
    }

    pub fn gammas(&self) -> &GammaRep {
        &self.gammas
    }

    pub fn spinor_dim(&self) -> usize {
        spinor_dim(self.dim())
    }

    pub fn metric_expr(&self, mu: usize, nu: usize) -> &Expression {
        &self.metric[mu * self.dim() + nu]
    }

    /// True when `g_{μν}` and `g_{νμ}` are the same shared expression.
    pub fn metric_entries_shared(&self, mu: usize, nu: usize) -> bool {
        let m = self.dim();
        Arc::ptr_eq(&self.metric[mu * m + nu], &self.metric[nu * m + mu])
    }

    fn name_taken(&self, name: &str) -> bool {
        self.vector_fields.iter().any(|f| f.name == name)
            || self.spinor_fields.iter().any(|f| f.name == name)
            || self.density_fields.iter().any(|f| f.name == name)
    }

    fn check_new_name(&self, name: &str) -> Result<()> {
        check_identifier(name, "field")?;
        if self.name_taken(name) {
            return Err(Error::InvalidSpec(format!("duplicate field name `{name}`")));
        }
        Ok(())
    }

    fn parse_list<S: AsRef<str>>(&self, sources: &[S]) -> Result<Vec<Expression>> {
        sources.iter().map(|s| Expression::parse_shared(s.as_ref(), &self.coords)).collect()
    }

    pub fn add_vector_field<S: AsRef<str>>(&mut self, name: &str, components: &[S]) -> Result<()> {
        self.check_new_name(name)?;
        if components.len() != self.dim() {
            return Err(Error::InvalidSpec(format!(
                "vector field `{name}` needs {} components, got {}",
                self.dim(),
                components.len()
            )));
        }
        let components = self.parse_list(components)?;
        self.vector_fields.push(VectorFieldSpec { name: name.into(), components });
        Ok(())
    }

    pub fn add_spinor_field<S: AsRef<str>>(&mut self, name: &str, components: &[(S, S)]) -> Result<()> {
        self.check_new_name(name)?;
        let n = self.spinor_dim();
        if components.len() != n {
            return Err(Error::InvalidSpec(format!(
                "spinor field `{name}` needs {n} components, got {}",
                components.len()
            )));
        }
        let components = components
            .iter()
            .map(|(re, im)| {
                Ok((
                    Expression::parse_shared(re.as_ref(), &self.coords)?,
                    Expression::parse_shared(im.as_ref(), &self.coords)?,
                ))
            })
            .collect::<Result<_>>()?;
        self.spinor_fields.push(SpinorFieldSpec { name: name.into(), components });
        Ok(())
    }

    pub fn add_density_field<S: AsRef<str>>(
        &mut self,
        name: &str,
        upper: usize,
        lower: usize,
        weight: f64,
        components: &[S],
    ) -> Result<()> {
        self.check_new_name(name)?;
        let count = self.dim().pow((upper + lower) as u32);
        if components.len() != count {
            return Err(Error::InvalidSpec(format!(
                "density field `{name}` of rank ({upper},{lower}) needs {count} components, got {}",
                components.len()
            )));
        }
        if !weight.is_finite() {
            return Err(Error::InvalidSpec(format!("density field `{name}` has non-finite weight")));
        }
        let components = self.parse_list(components)?;
        self.density_fields.push(DensityFieldSpec { name: name.into(), upper, lower, weight, components });
        Ok(())
    }

    pub fn vector_fields(&self) -> &[VectorFieldSpec] {
        &self.vector_fields
    }

    pub fn spinor_fields(&self) -> &[SpinorFieldSpec] {
        &self.spinor_fields
    }

    pub fn density_fields(&self) -> &[DensityFieldSpec] {
        &self.density_fields
    }

    pub fn vector_field(&self, name: &str) -> Result<&VectorFieldSpec> {
        self.vector_fields.iter().find(|f| f.name == name).ok_or_else(|| Error::UnknownField(name.into()))
    }

    pub fn spinor_field(&self, name: &str) -> Result<&SpinorFieldSpec> {
        self.spinor_fields.iter().find(|f| f.name == name).ok_or_else(|| Error::UnknownField(name.into()))
    }

    pub fn density_field(&self, name: &str) -> Result<&DensityFieldSpec> {
        self.density_fields.iter().find(|f| f.name == name).ok_or_else(|| Error::UnknownField(name.into()))
    }

    pub(crate) fn check_point(&self, pt: &[f64]) -> Result<()> {
        if pt.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: pt.len() });
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Field evaluation

/// Vector field value and Jacobian `jacobian[(ρ, ν)] = ∂_ν ξ^ρ` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFieldAt {
    pub value: DVector<f64>,
    pub jacobian: Mat,
}

/// Anything that can be evaluated to first order as a vector field.
pub trait VectorField {
    fn dim(&self) -> usize;
    fn eval_at(&self, pt: &[f64]) -> Result<VectorFieldAt>;
}

impl VectorField for VectorFieldSpec {
    fn dim(&self) -> usize {
        self.components.len()
    }

    fn eval_at(&self, pt: &[f64]) -> Result<VectorFieldAt> {
        let m = self.dim();
        let mut value = DVector::zeros(m);
        let mut jacobian = Mat::zeros(m, m);
        for (rho, comp) in self.components.iter().enumerate() {
            let d = comp.eval_dual(pt)?;
            value[rho] = d.value;
            for nu in 0..m {
                jacobian[(rho, nu)] = d.grad[nu];
            }
        }
        Ok(VectorFieldAt { value, jacobian })
    }
}

/// Spinor components and their coordinate gradients `grad[μ] = ∂_μ ψ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorFieldAt {
    pub value: SpinorValue,
    pub grad: Vec<SpinorValue>,
}

pub trait SpinorField {
    fn eval_at(&self, pt: &[f64]) -> Result<SpinorFieldAt>;
}

impl SpinorField for SpinorFieldSpec {
    fn eval_at(&self, pt: &[f64]) -> Result<SpinorFieldAt> {
        let n = self.components.len();
        let m = pt.len();
        let mut value = SpinorValue::zeros(n);
        let mut grad = vec![SpinorValue::zeros(n); m];
        for (k, (re, im)) in self.components.iter().enumerate() {
            let (re, im) = (re.eval_dual(pt)?, im.eval_dual(pt)?);
            value[k] = Complex64::new(re.value, im.value);
            for (mu, g) in grad.iter_mut().enumerate() {
                g[k] = Complex64::new(re.grad[mu], im.grad[mu]);
            }
        }
        Ok(SpinorFieldAt { value, grad })
    }
}

/// Components of a rank `(upper, lower)` density and their gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorFieldAt {
    pub upper: usize,
    pub lower: usize,
    pub weight: f64,
    pub values: Vec<f64>,
    /// `grad[k][μ] = ∂_μ T_k` for flat component index `k`.
    pub grad: Vec<Vec<f64>>,
}

pub trait TensorField {
    /// `(upper, lower)` index counts.
    fn rank(&self) -> (usize, usize);
    fn weight(&self) -> f64;
    fn eval_at(&self, pt: &[f64]) -> Result<TensorFieldAt>;
}

impl TensorField for DensityFieldSpec {
    fn rank(&self) -> (usize, usize) {
        (self.upper, self.lower)
    }

    fn weight(&self) -> f64 {
        self.weight
    }

    fn eval_at(&self, pt: &[f64]) -> Result<TensorFieldAt> {
        let duals: Vec<DualValue> = self.components.iter().map(|c| c.eval_dual(pt)).collect::<Result<_>>()?;
        Ok(TensorFieldAt {
            upper: self.upper,
            lower: self.lower,
            weight: self.weight,
            values: duals.iter().map(|d| d.value).collect(),
            grad: duals.into_iter().map(|d| d.grad).collect(),
        })
    }
}

/// The metric of a chart seen as a `(0,2)` tensor field.
pub struct MetricField<'a>(pub &'a GeometrySpec);

impl TensorField for MetricField<'_> {
    fn rank(&self) -> (usize, usize) {
        (0, 2)
    }

    fn weight(&self) -> f64 {
        0.0
    }

    fn eval_at(&self, pt: &[f64]) -> Result<TensorFieldAt> {
        let spec = self.0;
        spec.check_point(pt)?;
        let m = spec.dim();
        let mut values = Vec::with_capacity(m * m);
        let mut grad = Vec::with_capacity(m * m);
        for mu in 0..m {
            for nu in 0..m {
                let d = spec.metric_expr(mu, nu).eval_dual(pt)?;
                values.push(d.value);
                grad.push(d.grad);
            }
        }
        Ok(TensorFieldAt { upper: 0, lower: 2, weight: 0.0, values, grad })
    }
}

/// Splits a flat component index into `rank` indices each in `0..m`.
pub fn multi_index(mut flat: usize, rank: usize, m: usize) -> Vec<usize> {
    let mut idx = vec![0; rank];
    for slot in idx.iter_mut().rev() {
        *slot = flat % m;
        flat /= m;
    }
    idx
}

/// Inverse of [`multi_index`].
pub fn flat_index(idx: &[usize], m: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * m + i)
}

// ---------------------------------------------------------------------------
// Metric

#[derive(Debug, Clone, PartialEq)]
pub struct MetricAt {
    pub g: Mat,
    pub g_inv: Mat,
    /// `dg[ρ][(μ, ν)] = ∂_ρ g_{μν}`.
    pub dg: Vec<Mat>,
}

impl MetricAt {
    pub fn dg(&self, rho: usize, mu: usize, nu: usize) -> f64 {
        self.dg[rho][(mu, nu)]
    }
}

/// Evaluates `g_{μν}`, its inverse and `∂_ρ g_{μν}`; checks the signature.
pub fn metric_at(spec: &GeometrySpec, pt: &[f64]) -> Result<MetricAt> {
    spec.check_point(pt)?;
    let duals = metric_duals(spec, pt)?;
    let m = spec.dim();
    let g = Mat::from_fn(m, m, |i, j| duals[i * m + j].value);
    let dg = (0..m).map(|rho| Mat::from_fn(m, m, |i, j| duals[i * m + j].grad[rho])).collect();

    let scale = g.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())).max(1e-300);
    let det = g.determinant();
    if det.abs() <= 1e-12 * scale.powi(m as i32) {
        return Err(Error::SingularMetric { det });
    }
    let eig = SymmetricEigen::new(g.clone());
    let found_p = eig.eigenvalues.iter().filter(|&&l| l > 0.0).count();
    let found_q = m - found_p;
    let sig = spec.signature();
    if (found_p, found_q) != (sig.p, sig.q) {
        return Err(Error::WrongSignature { p: sig.p, q: sig.q, found_p, found_q });
    }
    let g_inv = g.clone().try_inverse().ok_or(Error::SingularMetric { det })?;
    Ok(MetricAt { g, g_inv, dg })
}

fn metric_duals(spec: &GeometrySpec, pt: &[f64]) -> Result<Vec<DualValue>> {
    let m = spec.dim();
    let mut out: Vec<Option<DualValue>> = vec![None; m * m];
    for i in 0..m {
        for j in i..m {
            let d = spec.metric_expr(i, j).eval_dual(pt)?;
            out[j * m + i] = Some(d.clone());
            out[i * m + j] = Some(d);
        }
    }
    Ok(out.into_iter().map(|d| d.expect("filled")).collect())
}

// ---------------------------------------------------------------------------
// Orthonormal frame

#[derive(Debug, Clone, PartialEq)]
pub struct FrameAt {
    /// `e[(μ, a)] = e_a^μ`.
    pub e: Mat,
    /// `e_inv[(a, μ)] = ẽ^a_μ`.
    pub e_inv: Mat,
    /// `de[ν][(μ, a)] = ∂_ν e_a^μ`.
    pub de: Vec<Mat>,
}

impl FrameAt {
    /// `∂_ν e_a^μ`.
    pub fn de(&self, a: usize, mu: usize, nu: usize) -> f64 {
        self.de[nu][(mu, a)]
    }
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..rest.len() {
            let v = rest.remove(k);
            prefix.push(v);
            rec(prefix, rest, out);
            prefix.pop();
            rest.insert(k, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (0..m).collect(), &mut out);
    out
}

/// One Gram–Schmidt pass over the coordinate basis in `order`, carried out in
/// dual arithmetic so the result carries `∂_ν e_a^μ`.
fn gram_schmidt(g: &[DualValue], m: usize, order: &[usize]) -> Option<Vec<(Vec<DualValue>, f64)>> {
    let inner = |u: &[DualValue], v: &[DualValue]| {
        let mut acc = DualValue::constant(0.0, m);
        for i in 0..m {
            for j in 0..m {
                acc = &acc + &(&g[i * m + j] * &(&u[i] * &v[j]));
            }
        }
        acc
    };
    let mut frame: Vec<(Vec<DualValue>, f64)> = Vec::with_capacity(m);
    for &mu in order {
        let mut v: Vec<DualValue> = (0..m).map(|i| DualValue::constant(if i == mu { 1.0 } else { 0.0 }, m)).collect();
        for (u, sign) in &frame {
            let c = inner(&v, u).scale(*sign);
            for i in 0..m {
                v[i] = &v[i] - &(&c * &u[i]);
            }
        }
        let norm = inner(&v, &v);
        if norm.value.abs() < 1e-12 {
            return None;
        }
        let sign = norm.value.signum();
        let inv_len = norm.abs().sqrt().recip();
        for comp in v.iter_mut() {
            *comp = &*comp * &inv_len;
        }
        frame.push((v, sign));
    }
    Some(frame)
}

/// Canonical orthonormal frame: signature-aware Gram–Schmidt on the
/// coordinate basis, positive-norm vectors first.
pub fn orthonormal_frame(spec: &GeometrySpec, pt: &[f64]) -> Result<FrameAt> {
    metric_at(spec, pt)?;
    let g = metric_duals(spec, pt)?;
    let m = spec.dim();
    let sig = spec.signature();
    for order in permutations(m) {
        let Some(frame) = gram_schmidt(&g, m, &order) else { continue };
        let mut ordered: Vec<&Vec<DualValue>> = frame.iter().filter(|(_, s)| *s > 0.0).map(|(v, _)| v).collect();
        if ordered.len() != sig.p {
            continue;
        }
        ordered.extend(frame.iter().filter(|(_, s)| *s < 0.0).map(|(v, _)| v));
        let e = Mat::from_fn(m, m, |mu, a| ordered[a][mu].value);
        let de = (0..m).map(|nu| Mat::from_fn(m, m, |mu, a| ordered[a][mu].grad[nu])).collect();
        let e_inv = e.clone().try_inverse().ok_or(Error::FrameBreakdown)?;
        return Ok(FrameAt { e, e_inv, de });
    }
    Err(Error::FrameBreakdown)
}

// ---------------------------------------------------------------------------
// Connections

#[derive(Debug, Clone, PartialEq)]
pub struct ChristoffelAt {
    /// `gamma[ρ][(μ, ν)] = Γ^ρ_{μν}`.
    pub gamma: Vec<Mat>,
}

impl ChristoffelAt {
    pub fn get(&self, rho: usize, mu: usize, nu: usize) -> f64 {
        self.gamma[rho][(mu, nu)]
    }

    /// Matrix `(ρ, σ) ↦ Γ^ρ_{μσ}` for fixed `μ`.
    pub fn along(&self, mu: usize) -> Mat {
        let m = self.gamma.len();
        Mat::from_fn(m, m, |rho, sigma| self.gamma[rho][(mu, sigma)])
    }
}

pub fn christoffel_from_metric(metric: &MetricAt) -> ChristoffelAt {
    let m = metric.g.nrows();
    let gamma = (0..m)
        .map(|rho| {
            Mat::from_fn(m, m, |mu, nu| {
                0.5 * (0..m)
                    .map(|sigma| {
                        metric.g_inv[(rho, sigma)]
                            * (metric.dg(mu, sigma, nu) + metric.dg(nu, sigma, mu) - metric.dg(sigma, mu, nu))
                    })
                    .sum::<f64>()
            })
        })
        .collect();
    ChristoffelAt { gamma }
}

/// Levi-Civita connection coefficients `Γ^ρ_{μν}`.
pub fn christoffel(spec: &GeometrySpec, pt: &[f64]) -> Result<ChristoffelAt> {
    Ok(christoffel_from_metric(&metric_at(spec, pt)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinConnectionAt {
    /// `mixed[μ][(a, b)] = ω_μ{}^a{}_b = ẽ^a_ρ (∂_μ e_b^ρ + Γ^ρ_{μσ} e_b^σ)`.
    pub mixed: Vec<Mat>,
    /// `lowered[μ][(a, b)] = ω_{μab} = η_{ac} ω_μ{}^c{}_b`.
    pub lowered: Vec<Mat>,
}

impl SpinConnectionAt {
    /// `ω_μ^{ab}`, both frame indices raised with η.
    pub fn raised(&self, mu: usize, sig: Signature) -> Mat {
        let w = &self.lowered[mu];
        Mat::from_fn(w.nrows(), w.ncols(), |a, b| sig.eta(a) * sig.eta(b) * w[(a, b)])
    }
}

pub fn spin_connection_from(frame: &FrameAt, chris: &ChristoffelAt, sig: Signature) -> SpinConnectionAt {
    let eta = eta_matrix(sig);
    let mixed: Vec<Mat> =
        (0..frame.e.nrows()).map(|mu| &frame.e_inv * (&frame.de[mu] + chris.along(mu) * &frame.e)).collect();
    let lowered = mixed.iter().map(|w| &eta * w).collect();
    SpinConnectionAt { mixed, lowered }
}

pub fn spin_connection(spec: &GeometrySpec, pt: &[f64]) -> Result<SpinConnectionAt> {
    let frame = orthonormal_frame(spec, pt)?;
    let chris = christoffel(spec, pt)?;
    Ok(spin_connection_from(&frame, &chris, spec.signature()))
}

/// Everything pointwise that the Lie-derivative formulas need, computed once.
#[derive(Debug, Clone)]
pub struct PointGeometry {
    pub metric: MetricAt,
    pub frame: FrameAt,
    pub christoffel: ChristoffelAt,
    pub spin: SpinConnectionAt,
}

impl PointGeometry {
    pub fn at(spec: &GeometrySpec, pt: &[f64]) -> Result<Self> {
        let metric = metric_at(spec, pt)?;
        let frame = orthonormal_frame(spec, pt)?;
        let christoffel = christoffel_from_metric(&metric);
        let spin = spin_connection_from(&frame, &christoffel, spec.signature());
        Ok(PointGeometry { metric, frame, christoffel, spin })
    }
}

/// `∇_μ ξ_ν = ∂_μ(g_{νσ} ξ^σ) − Γ^ρ_{μν} g_{ρσ} ξ^σ`, returned as `(μ, ν)`.
pub fn covariant_derivative_covector(spec: &GeometrySpec, xi: &dyn VectorField, pt: &[f64]) -> Result<Mat> {
    let metric = metric_at(spec, pt)?;
    let chris = christoffel_from_metric(&metric);
    Ok(covariant_derivative_from(&metric, &chris, &xi.eval_at(pt)?))
}

pub(crate) fn covariant_derivative_from(metric: &MetricAt, chris: &ChristoffelAt, xi: &VectorFieldAt) -> Mat {
    let m = metric.g.nrows();
    let lowered = &metric.g * &xi.value;
    Mat::from_fn(m, m, |mu, nu| {
        let mut d = 0.0;
        for sigma in 0..m {
            d += metric.dg(mu, nu, sigma) * xi.value[sigma] + metric.g[(nu, sigma)] * xi.jacobian[(sigma, mu)];
        }
        for rho in 0..m {
            d -= chris.get(rho, mu, nu) * lowered[rho];
        }
        d
    })
}
