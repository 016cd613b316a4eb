//! Subcommand definitions and dispatch.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use kosmann_core::fixtures::Fixture;
use kosmann_core::geometry::{MetricField, SpinorField, TensorField, VectorField};
use kosmann_core::jets::{
    action_tau, action_v, action_vertical, brute_force_multiply, w11_identity, w11_inverse, w11_multiply,
    GroupDescriptor, JetGroupElement,
};
use kosmann_core::liealg::{decompose_gl, max_abs, Signature};
use kosmann_core::liederiv::{
    flow_lie_spinor_oracle, flow_lie_tensor_oracle, lichnerowicz, lie_density, lie_spinor_covariant,
    lie_spinor_gauge_natural, lie_spinor_kosmann, lie_tensor, reductive_metric_lie, spinor_max_abs, TensorValueAt,
    FLOW_DT,
};
use kosmann_core::lifts::InvariantFieldComponents;
use kosmann_core::verify::{run_all, run_builtin, VerifyConfig};
use kosmann_core::{fixtures, Mat};
use nalgebra::DVector;
use serde_json::{json, Map, Value};

use crate::geomfile::{parse_geometry, GeometryFile};
use crate::report::{matrix, num, render, spinor, vector};
use crate::{exit, CliError};

/// Largest reductive metric derivative reported as passing.
const REDUCTIVE_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "kosmann", version, about = "Lie derivatives of tensors, densities and spinors on explicit charts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Flavour {
    Natural,
    Density,
    SpinorKosmann,
    SpinorCovariant,
    SpinorGauge,
    Lichnerowicz,
    ReductiveMetric,
    FlowOracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum JetOp {
    Mul,
    Inv,
    ActV,
    ActVert,
    ActTau,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split a matrix into so(p,q), η-symmetric traceless and trace parts.
    Decompose {
        /// Rows separated by `;`, entries by `,`.
        #[arg(long)]
        matrix: String,
        /// `p,q`.
        #[arg(long)]
        signature: String,
    },
    /// Evaluate a Lie derivative at a point.
    Lie {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, value_enum)]
        flavour: Flavour,
        /// Vector field to differentiate along.
        #[arg(long)]
        field: Option<String>,
        /// Spinor or density field (`metric` for the metric tensor).
        #[arg(long)]
        object: Option<String>,
        /// Comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Append the residual against the companion formula or oracle.
        #[arg(long)]
        cross_check: bool,
        /// Frame components ξ^a of an invariant field (spinor-gauge).
        #[arg(long, allow_hyphen_values = true)]
        xi_frame: Option<String>,
        /// Antisymmetric vertical part Ξ_ab, rows separated by `;` (spinor-gauge).
        #[arg(long, allow_hyphen_values = true)]
        vertical: Option<String>,
        /// Time step of the flow oracle.
        #[arg(long, default_value_t = FLOW_DT)]
        dt: f64,
    },
    /// Run the randomized property suites.
    Verify {
        /// Geometry file; the builtin fixture set when absent.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override every suite's sample count.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Operate on elements of the first-order prolongation group.
    Jet {
        /// `gl:N`, `sl:N`, `so:N` or `so:P,Q`.
        #[arg(long)]
        group: String,
        #[arg(long, value_enum)]
        op: JetOp,
        /// JSON `{"alpha": .., "a": .., "theta": [..]}` or `identity`.
        #[arg(long)]
        g1: String,
        #[arg(long)]
        g2: Option<String>,
        /// Base dimension used for `identity`.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Compare multiplication with the brute-force composition oracle.
        #[arg(long)]
        oracle: bool,
        #[arg(long, allow_hyphen_values = true)]
        nu: Option<String>,
        /// Lie algebra element, rows separated by `;`.
        #[arg(long, allow_hyphen_values = true)]
        v: Option<String>,
    },
}

/// What a command wrote and how the process should exit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

pub fn execute(cli: Cli) -> Output {
    let result = match cli.command {
        Command::Decompose { matrix, signature } => cmd_decompose(&matrix, &signature),
        Command::Lie { file, flavour, field, object, point, cross_check, xi_frame, vertical, dt } => cmd_lie(LieArgs {
            file: &file,
            flavour,
            field: field.as_deref(),
            object: object.as_deref(),
            point: &point,
            cross_check,
            xi_frame: xi_frame.as_deref(),
            vertical: vertical.as_deref(),
            dt,
        }),
        Command::Verify { file, seed, samples } => cmd_verify(file.as_deref(), seed, samples),
        Command::Jet { group, op, g1, g2, dim, oracle, nu, v } => {
            cmd_jet(&group, op, &g1, g2.as_deref(), dim, oracle, nu.as_deref(), v.as_deref())
        }
    };
    match result {
        Ok((code, report)) => Output { code, stdout: render(&report), stderr: String::new() },
        Err(e) => Output { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

type CmdResult = Result<(u8, Value), CliError>;

// ---------------------------------------------------------------------------
// argument parsing

fn parse_reals(text: &str, what: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim().parse::<f64>().map_err(|_| CliError::Input(format!("{what}: `{}` is not a number", s.trim())))
        })
        .collect()
}

/// `a,b;c,d` as a square matrix.
pub fn parse_matrix(text: &str) -> Result<Mat, CliError> {
    let rows: Vec<Vec<f64>> = text.split(';').map(|r| parse_reals(r, "matrix")).collect::<Result<_, _>>()?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Input(format!(
            "matrix must be square, got {n} rows of lengths {:?}",
            rows.iter().map(Vec::len).collect::<Vec<_>>()
        )));
    }
    Ok(Mat::from_fn(n, n, |i, j| rows[i][j]))
}

fn parse_signature(text: &str) -> Result<Signature, CliError> {
    let parts: Vec<usize> = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Input(format!("signature: `{}` is not an integer", s.trim())))
        })
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [p, q] => Signature::new(*p, *q).map_err(|e| CliError::Input(e.to_string())),
        [m] => Signature::new(*m, 0).map_err(|e| CliError::Input(e.to_string())),
        _ => Err(CliError::Input("signature must be `p,q`".into())),
    }
}

fn load(path: &Path) -> Result<GeometryFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_geometry(&text).map_err(|e| match e {
        CliError::Load { line, message } => CliError::Input(format!("{}:{line}: {message}", path.display())),
        other => other,
    })
}

// ---------------------------------------------------------------------------
// decompose

fn cmd_decompose(matrix_text: &str, signature: &str) -> CmdResult {
    let m = parse_matrix(matrix_text)?;
    let sig = parse_signature(signature)?;
    if m.nrows() != sig.dim() {
        return Err(CliError::Input(format!(
            "matrix is {}×{} but signature {sig} has dimension {}",
            m.nrows(),
            m.nrows(),
            sig.dim()
        )));
    }
    let split = decompose_gl(&m, sig)?;
    let trace_part = Mat::identity(sig.dim(), sig.dim()) * split.trace_coeff;
    let residual = max_abs(&(split.reconstruct() - &m));
    Ok((
        exit::SUCCESS,
        json!({
            "command": "decompose",
            "inputs": { "matrix": matrix(&m), "signature": [sig.p, sig.q] },
            "antisymmetric": matrix(&split.antisym),
            "symmetric_traceless": matrix(&split.sym_traceless),
            "trace_coefficient": num(split.trace_coeff),
            "trace_part": matrix(&trace_part),
            "reconstruction_residual": num(residual),
            "pass": residual <= 1e-12,
        }),
    ))
}

// ---------------------------------------------------------------------------
// lie

struct LieArgs<'a> {
    file: &'a Path,
    flavour: Flavour,
    field: Option<&'a str>,
    object: Option<&'a str>,
    point: &'a str,
    cross_check: bool,
    xi_frame: Option<&'a str>,
    vertical: Option<&'a str>,
    dt: f64,
}

fn flavour_name(f: Flavour) -> &'static str {
    match f {
        Flavour::Natural => "natural",
        Flavour::Density => "density",
        Flavour::SpinorKosmann => "spinor-kosmann",
        Flavour::SpinorCovariant => "spinor-covariant",
        Flavour::SpinorGauge => "spinor-gauge",
        Flavour::Lichnerowicz => "lichnerowicz",
        Flavour::ReductiveMetric => "reductive-metric",
        Flavour::FlowOracle => "flow-oracle",
    }
}

fn tensor_value(t: &TensorValueAt) -> Value {
    json!({
        "upper": t.upper,
        "lower": t.lower,
        "weight": num(t.weight),
        "components": vector(&t.components),
    })
}

fn required<'a>(value: Option<&'a str>, flag: &str, flavour: Flavour) -> Result<&'a str, CliError> {
    value.ok_or_else(|| CliError::Input(format!("--{flag} is required for --flavour {}", flavour_name(flavour))))
}

fn tensor_object<'a>(file: &'a GeometryFile, name: &str) -> Result<Box<dyn TensorField + 'a>, CliError> {
    if name == "metric" {
        Ok(Box::new(MetricField(&file.spec)))
    } else {
        Ok(Box::new(file.spec.density_field(name)?.clone()))
    }
}

fn cmd_lie(args: LieArgs<'_>) -> CmdResult {
    let file = load(args.file)?;
    let spec = &file.spec;
    let pt = parse_reals(args.point, "point")?;
    if pt.len() != spec.dim() {
        return Err(CliError::Input(format!("point has {} coordinates, the chart has {}", pt.len(), spec.dim())));
    }
    if !file.contains(&pt) {
        return Err(kosmann_core::Error::Precondition(format!("point {pt:?} lies outside the declared domain")).into());
    }
    let flavour = args.flavour;
    let mut out = Map::new();
    out.insert("command".into(), json!("lie"));
    out.insert(
        "inputs".into(),
        json!({
            "file": args.file.display().to_string(),
            "flavour": flavour_name(flavour),
            "field": args.field,
            "object": if flavour == Flavour::Natural { args.object.or(Some("metric")) } else { args.object },
            "point": vector(&pt),
        }),
    );

    let xi: Option<&dyn VectorField> = match args.field {
        Some(name) => Some(spec.vector_field(name)?),
        None => None,
    };
    let need_xi =
        || xi.ok_or_else(|| CliError::Input(format!("--field is required for --flavour {}", flavour_name(flavour))));
    let spinor_obj =
        || -> Result<&dyn SpinorField, CliError> { Ok(spec.spinor_field(required(args.object, "object", flavour)?)?) };

    match flavour {
        Flavour::Natural => {
            let obj = tensor_object(&file, args.object.unwrap_or("metric"))?;
            let value = lie_tensor(spec, need_xi()?, obj.as_ref(), &pt)?;
            out.insert("result".into(), tensor_value(&value));
        }
        Flavour::Density => {
            let obj = tensor_object(&file, required(args.object, "object", flavour)?)?;
            let value = lie_density(spec, need_xi()?, obj.as_ref(), &pt)?;
            if args.cross_check {
                let oracle = flow_lie_tensor_oracle(spec, need_xi()?, obj.as_ref(), &pt, args.dt)?;
                let r =
                    value.components.iter().zip(&oracle.components).fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()));
                out.insert("cross_check".into(), json!({ "against": "flow-oracle", "residual": num(r) }));
            }
            out.insert("result".into(), tensor_value(&value));
        }
        Flavour::SpinorKosmann | Flavour::SpinorCovariant => {
            let psi = spinor_obj()?;
            let xi = need_xi()?;
            let kosmann = lie_spinor_kosmann(spec, xi, psi, &pt)?;
            let covariant = lie_spinor_covariant(spec, xi, psi, &pt)?;
            let (value, other, against) = if flavour == Flavour::SpinorKosmann {
                (kosmann, covariant, "spinor-covariant")
            } else {
                (covariant, kosmann, "spinor-kosmann")
            };
            if args.cross_check {
                out.insert(
                    "cross_check".into(),
                    json!({ "against": against, "residual": num(spinor_max_abs(&(&value - other))) }),
                );
            }
            out.insert("result".into(), spinor(&value));
        }
        Flavour::SpinorGauge => {
            let psi = spinor_obj()?;
            let frame = parse_reals(required(args.xi_frame, "xi-frame", flavour)?, "xi-frame")?;
            let vertical = parse_matrix(required(args.vertical, "vertical", flavour)?)?;
            let comps = InvariantFieldComponents::new(DVector::from_vec(frame), vertical)?;
            let value = lie_spinor_gauge_natural(spec, &comps, psi, &pt)?;
            out.insert("result".into(), spinor(&value));
        }
        Flavour::Lichnerowicz => {
            let value = lichnerowicz(spec, need_xi()?, spinor_obj()?, &pt)?;
            out.insert("result".into(), spinor(&value));
        }
        Flavour::ReductiveMetric => {
            let value = reductive_metric_lie(spec, need_xi()?, &pt)?;
            let r = max_abs(&value);
            out.insert("result".into(), matrix(&value));
            out.insert("max_abs".into(), num(r));
            out.insert("pass".into(), json!(r <= REDUCTIVE_TOL));
        }
        Flavour::FlowOracle => {
            let psi = spinor_obj()?;
            let xi = need_xi()?;
            let value = flow_lie_spinor_oracle(spec, xi, psi, &pt, args.dt)?;
            if args.cross_check {
                let formula = lie_spinor_kosmann(spec, xi, psi, &pt)?;
                out.insert(
                    "cross_check".into(),
                    json!({ "against": "spinor-kosmann", "residual": num(spinor_max_abs(&(&value - formula))) }),
                );
            }
            out.insert("result".into(), spinor(&value));
        }
    }
    Ok((exit::SUCCESS, Value::Object(out)))
}

// ---------------------------------------------------------------------------
// verify

fn cmd_verify(file: Option<&Path>, seed: u64, samples: Option<usize>) -> CmdResult {
    let config = VerifyConfig { seed, samples };
    let (source, results) = match file {
        None => ("builtin".to_string(), run_builtin(config)?),
        Some(path) => {
            let loaded = load(path)?;
            let m = loaded.spec.dim();
            let fixture = Fixture {
                name: path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "file".into()),
                domain: loaded.domain.clone().unwrap_or_else(|| vec![(-1.0, 1.0); m]),
                spec: loaded.spec,
            };
            (path.display().to_string(), run_all(&[fixture], config)?)
        }
    };
    let pass = results.iter().all(|r| r.pass);
    let suites: Vec<Value> = results
        .iter()
        .map(|r| {
            json!({
                "name": r.name,
                "samples": r.samples,
                "max_residual": num(r.max_residual),
                "threshold": num(r.threshold),
                "pass": r.pass,
            })
        })
        .collect();
    let report = json!({
        "command": "verify",
        "inputs": { "source": source, "seed": seed, "samples": samples },
        "suites": suites,
        "pass": pass,
    });
    Ok((if pass { exit::SUCCESS } else { exit::VERIFY_FAILED }, report))
}

// ---------------------------------------------------------------------------
// jet

fn json_matrix(v: &Value, what: &str) -> Result<Mat, CliError> {
    let bad = || CliError::Input(format!("{what} must be a square array of number rows"));
    let rows = v.as_array().ok_or_else(bad)?;
    let n = rows.len();
    let mut m = Mat::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().filter(|r| r.len() == n).ok_or_else(bad)?;
        for (j, x) in row.iter().enumerate() {
            m[(i, j)] = x.as_f64().ok_or_else(bad)?;
        }
    }
    Ok(m)
}

fn parse_element(text: &str, desc: GroupDescriptor, dim: usize) -> Result<JetGroupElement, CliError> {
    if text.trim() == "identity" {
        return Ok(w11_identity(dim, desc));
    }
    let v: Value =
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("jet element is not valid JSON: {e}")))?;
    let field = |k: &str| v.get(k).ok_or_else(|| CliError::Input(format!("jet element is missing `{k}`")));
    let alpha = json_matrix(field("alpha")?, "alpha")?;
    let a = json_matrix(field("a")?, "a")?;
    let theta = field("theta")?
        .as_array()
        .ok_or_else(|| CliError::Input("theta must be an array of matrices".into()))?
        .iter()
        .map(|t| json_matrix(t, "theta entry"))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(JetGroupElement::new(alpha, a, theta, desc)?)
}

fn element_value(g: &JetGroupElement) -> Value {
    json!({
        "alpha": matrix(&g.alpha),
        "a": matrix(&g.a),
        "theta": g.theta.iter().map(matrix).collect::<Vec<_>>(),
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_jet(
    group: &str,
    op: JetOp,
    g1: &str,
    g2: Option<&str>,
    dim: usize,
    oracle: bool,
    nu: Option<&str>,
    v: Option<&str>,
) -> CmdResult {
    let desc = GroupDescriptor::parse(group).map_err(|e| CliError::Input(e.to_string()))?;
    if dim == 0 {
        return Err(CliError::Input("--dim must be positive".into()));
    }
    let op_name = op.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default();
    let first = parse_element(g1, desc, dim)?;
    let m = first.m();
    fn need<'a>(x: Option<&'a str>, flag: &str, op_name: &str) -> Result<&'a str, CliError> {
        x.ok_or_else(|| CliError::Input(format!("--{flag} is required for --op {op_name}")))
    }
    let action_inputs = |g: &JetGroupElement| -> Result<(Vec<f64>, Mat), CliError> {
        let nu = parse_reals(need(nu, "nu", &op_name)?, "nu")?;
        let v = parse_matrix(need(v, "v", &op_name)?)?;
        if nu.len() != g.m() {
            return Err(CliError::Input(format!("--nu needs {} entries", g.m())));
        }
        if v.nrows() != desc.n() {
            return Err(CliError::Input(format!("--v must be {}×{}", desc.n(), desc.n())));
        }
        if !desc.algebra_contains(&v) {
            return Err(kosmann_core::Error::Precondition(format!("--v is not in the algebra of {desc}")).into());
        }
        Ok((nu, v))
    };
    let mut out = Map::new();
    out.insert("command".into(), json!("jet"));
    out.insert("inputs".into(), json!({ "group": desc.to_string(), "op": op_name }));
    match op {
        JetOp::Mul => {
            let second = parse_element(need(g2, "g2", &op_name)?, desc, m)?;
            let prod = w11_multiply(&first, &second)?;
            if oracle {
                let r = prod.distance(&brute_force_multiply(&first, &second)?);
                out.insert("oracle_residual".into(), num(r));
            }
            out.insert("result".into(), element_value(&prod));
        }
        JetOp::Inv => {
            let inv = w11_inverse(&first)?;
            let check = w11_multiply(&first, &inv)?.distance(&w11_identity(m, desc));
            out.insert("check_residual".into(), num(check));
            out.insert("result".into(), element_value(&inv));
        }
        JetOp::ActV => {
            let (nu, v) = action_inputs(&first)?;
            let (nu_out, v_out) = action_v(&first, &nu, &v)?;
            out.insert("result".into(), json!({ "nu": vector(&nu_out), "v": matrix(&v_out) }));
        }
        JetOp::ActVert => {
            let v = parse_matrix(need(v, "v", &op_name)?)?;
            out.insert("result".into(), json!({ "v": matrix(&action_vertical(&first, &v)?) }));
        }
        JetOp::ActTau => {
            let (nu, v) = action_inputs(&first)?;
            let (nu_out, v_out) = action_tau(&first, &nu, &v)?;
            out.insert("result".into(), json!({ "nu": vector(&nu_out), "v": matrix(&v_out) }));
        }
    }
    Ok((exit::SUCCESS, Value::Object(out)))
}

/// The builtin fixture names, for help output and tests.
pub fn builtin_fixture_names() -> Vec<String> {
    fixtures::all().into_iter().map(|f| f.name).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_parsing() {
        assert_eq!(parse_matrix("1,2;3,4").unwrap(), Mat::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]));
        assert_eq!(parse_matrix(" -1.5 ").unwrap(), Mat::from_row_slice(1, 1, &[-1.5]));
        assert!(parse_matrix("1,2;3").is_err());
        assert!(parse_matrix("1,x;3,4").is_err());
    }

    #[test]
    fn signature_parsing() {
        assert_eq!(parse_signature("1,3").unwrap(), Signature::new(1, 3).unwrap());
        assert_eq!(parse_signature("2").unwrap(), Signature::euclidean(2));
        assert!(parse_signature("0,0").is_err());
        assert!(parse_signature("a").is_err());
    }

    #[test]
    fn decompose_identity() {
        let (code, report) = cmd_decompose("1,0;0,1", "2,0").unwrap();
        assert_eq!(code, 0);
        assert_eq!(report["trace_coefficient"], json!(1.0));
        assert_eq!(report["reconstruction_residual"], json!(0.0));
        assert!(matches!(cmd_decompose("1,0;0", "2,0"), Err(CliError::Input(_))));
        assert!(cmd_decompose("1,0;0,1", "3,0").is_err());
    }

    #[test]
    fn jet_identity_product() {
        let (_, report) = cmd_jet("so:1,1", JetOp::Mul, "identity", Some("identity"), 2, true, None, None).unwrap();
        assert_eq!(report["result"]["alpha"], json!([[1.0, 0.0], [0.0, 1.0]]));
        assert_eq!(report["oracle_residual"], json!(0.0));
    }

    #[test]
    fn fixture_names_are_listed() {
        assert!(builtin_fixture_names().contains(&"schwarzschild".to_string()));
    }
}
