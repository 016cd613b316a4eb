//! Line-oriented geometry files.
//!
//! ```text
//! # flat Minkowski plane
//! dim = 2
//! signature = [1, 1]
//! coords = [t, x]
//! domain = [[-1, 1], [-1, 1]]      # optional
//!
//! [metric]
//! "1"  "0"
//!      "-1"
//!
//! [vector_field]
//! name = boost
//! components = ["x", "t"]
//!
//! [spinor_field]
//! name = psi
//! components = [["1", "0"], ["t*x", "0.5"]]
//!
//! [density_field]
//! name = rho
//! rank = [0, 0]
//! weight = 1
//! components = ["exp(t)"]
//! ```
//!
//! Metric rows list either all entries or the upper triangle starting at the
//! diagonal. Expressions may be quoted strings or bare numbers.

use std::collections::BTreeMap;

use kosmann_core::geometry::GeometrySpec;
use kosmann_core::liealg::Signature;

use crate::CliError;

/// A loaded file: the chart plus its optional sampling box.
#[derive(Debug, Clone)]
pub struct GeometryFile {
    pub spec: GeometrySpec,
    pub domain: Option<Vec<(f64, f64)>>,
}

impl GeometryFile {
    /// Whether `pt` lies inside the declared domain (always true without one).
    pub fn contains(&self, pt: &[f64]) -> bool {
        match &self.domain {
            None => true,
            Some(d) => d.iter().zip(pt).all(|(&(lo, hi), &x)| lo <= x && x <= hi),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Str(String),
    Num(f64),
    Ident(String),
    List(Vec<Value>),
}

impl Value {
    fn describe(&self) -> &'static str {
        match self {
            Value::Str(_) => "string",
            Value::Num(_) => "number",
            Value::Ident(_) => "identifier",
            Value::List(_) => "list",
        }
    }
}

fn err(line: usize, message: impl Into<String>) -> CliError {
    CliError::Load { line, message: message.into() }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
    line: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str, line: usize) -> Self {
        Lexer { chars: src.char_indices().peekable(), src, line }
    }

    fn skip_ws(&mut self) {
        while matches!(self.chars.peek(), Some((_, c)) if c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.chars.peek().is_none()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.peek().map(|&(_, c)| c)
    }

    fn value(&mut self) -> Result<Value, CliError> {
        match self.peek() {
            None => Err(err(self.line, "expected a value")),
            Some('"') => {
                self.chars.next();
                let mut s = String::new();
                loop {
                    match self.chars.next() {
                        None => return Err(err(self.line, "unterminated string")),
                        Some((_, '"')) => return Ok(Value::Str(s)),
                        Some((_, c)) => s.push(c),
                    }
                }
            }
            Some('[') => {
                self.chars.next();
                let mut items = Vec::new();
                loop {
                    match self.peek() {
                        Some(']') => {
                            self.chars.next();
                            return Ok(Value::List(items));
                        }
                        Some(',') => {
                            self.chars.next();
                        }
                        None => return Err(err(self.line, "unterminated list")),
                        Some(_) => items.push(self.value()?),
                    }
                }
            }
            Some(_) => {
                let &(start, _) = self.chars.peek().expect("peeked");
                let mut end = start;
                while let Some(&(i, c)) = self.chars.peek() {
                    if c.is_whitespace() || matches!(c, ',' | '[' | ']' | '"') {
                        break;
                    }
                    end = i + c.len_utf8();
                    self.chars.next();
                }
                let word = &self.src[start..end];
                if let Ok(v) = word.parse::<f64>() {
                    Ok(Value::Num(v))
                } else if word.chars().all(|c| c.is_alphanumeric() || c == '_') {
                    Ok(Value::Ident(word.to_string()))
                } else {
                    Err(err(self.line, format!("unexpected token `{word}`")))
                }
            }
        }
    }
}

/// Removes a trailing `#` comment that is not inside a string.
fn strip_comment(line: &str) -> &str {
    let mut in_str = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_str = !in_str,
            '#' if !in_str => return &line[..i],
            _ => {}
        }
    }
    line
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SectionKind {
    Header,
    Metric,
    Vector,
    Spinor,
    Density,
}

struct Section {
    kind: SectionKind,
    line: usize,
    keys: BTreeMap<String, (usize, Value)>,
    rows: Vec<(usize, Vec<Value>)>,
}

impl Section {
    fn new(kind: SectionKind, line: usize) -> Self {
        Section { kind, line, keys: BTreeMap::new(), rows: Vec::new() }
    }

    fn take(&mut self, key: &str) -> Result<(usize, Value), CliError> {
        self.keys.remove(key).ok_or_else(|| err(self.line, format!("missing key `{key}`")))
    }

    fn take_opt(&mut self, key: &str) -> Option<(usize, Value)> {
        self.keys.remove(key)
    }

    fn finish(&self) -> Result<(), CliError> {
        match self.keys.iter().next() {
            Some((k, (line, _))) => Err(err(*line, format!("unknown key `{k}`"))),
            None => Ok(()),
        }
    }
}

fn split_sections(text: &str) -> Result<Vec<Section>, CliError> {
    let mut sections = vec![Section::new(SectionKind::Header, 1)];
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = strip_comment(raw).trim();
        if content.is_empty() {
            continue;
        }
        let is_header = content.len() > 2
            && content.starts_with('[')
            && content.ends_with(']')
            && content[1..content.len() - 1].trim().chars().all(|c| c.is_alphanumeric() || c == '_');
        if is_header {
            let kind = match content[1..content.len() - 1].trim() {
                "metric" => SectionKind::Metric,
                "vector_field" => SectionKind::Vector,
                "spinor_field" => SectionKind::Spinor,
                "density_field" => SectionKind::Density,
                other => return Err(err(line, format!("unknown section `[{other}]`"))),
            };
            if kind == SectionKind::Metric && sections.iter().any(|s| s.kind == SectionKind::Metric) {
                return Err(err(line, "duplicate [metric] section"));
            }
            sections.push(Section::new(kind, line));
            continue;
        }
        let section = sections.last_mut().expect("header section exists");
        if section.kind == SectionKind::Metric {
            let mut lex = Lexer::new(content, line);
            let mut row = Vec::new();
            while !lex.at_end() {
                if lex.peek() == Some(',') {
                    lex.chars.next();
                    continue;
                }
                match lex.value()? {
                    Value::List(items) => row.extend(items),
                    v => row.push(v),
                }
            }
            section.rows.push((line, row));
            continue;
        }
        let (key, rest) = content.split_once('=').ok_or_else(|| err(line, "expected `key = value`"))?;
        let key = key.trim();
        if key.is_empty() || !key.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(err(line, format!("invalid key `{key}`")));
        }
        let mut lex = Lexer::new(rest, line);
        let value = lex.value()?;
        if !lex.at_end() {
            return Err(err(line, "trailing characters after value"));
        }
        if section.keys.insert(key.to_string(), (line, value)).is_some() {
            return Err(err(line, format!("duplicate key `{key}`")));
        }
    }
    Ok(sections)
}

fn as_usize(line: usize, v: &Value, what: &str) -> Result<usize, CliError> {
    match v {
        Value::Num(x) if *x >= 0.0 && x.fract() == 0.0 => Ok(*x as usize),
        other => Err(err(line, format!("{what} must be a non-negative integer, got {}", other.describe()))),
    }
}

fn as_f64(line: usize, v: &Value, what: &str) -> Result<f64, CliError> {
    match v {
        Value::Num(x) => Ok(*x),
        other => Err(err(line, format!("{what} must be a number, got {}", other.describe()))),
    }
}

fn as_list<'v>(line: usize, v: &'v Value, what: &str) -> Result<&'v [Value], CliError> {
    match v {
        Value::List(items) => Ok(items),
        other => Err(err(line, format!("{what} must be a list, got {}", other.describe()))),
    }
}

fn as_name(line: usize, v: &Value, what: &str) -> Result<String, CliError> {
    match v {
        Value::Str(s) | Value::Ident(s) => Ok(s.clone()),
        other => Err(err(line, format!("{what} must be a name, got {}", other.describe()))),
    }
}

/// Expression source: a quoted string or a bare number.
fn as_expr(line: usize, v: &Value, what: &str) -> Result<String, CliError> {
    match v {
        Value::Str(s) => Ok(s.clone()),
        Value::Num(x) => Ok(format!("{x:?}")),
        other => Err(err(line, format!("{what} must be an expression string, got {}", other.describe()))),
    }
}

fn core_err(line: usize, e: kosmann_core::Error) -> CliError {
    err(line, e.to_string())
}

/// Parses a geometry file.
pub fn parse_geometry(text: &str) -> Result<GeometryFile, CliError> {
    let mut sections = split_sections(text)?.into_iter();
    let mut header = sections.next().expect("header section exists");

    let (dline, dim) = header.take("dim")?;
    let dim = as_usize(dline, &dim, "dim")?;
    let (sline, sig) = header.take("signature")?;
    let sig = match as_list(sline, &sig, "signature")? {
        [p, q] => Signature::new(as_usize(sline, p, "p")?, as_usize(sline, q, "q")?).map_err(|e| core_err(sline, e))?,
        _ => return Err(err(sline, "signature must be [p, q]")),
    };
    if sig.dim() != dim {
        return Err(err(sline, format!("signature {sig} does not match dim = {dim}")));
    }
    let (cline, coords) = header.take("coords")?;
    let coords: Vec<String> =
        as_list(cline, &coords, "coords")?.iter().map(|v| as_name(cline, v, "coordinate")).collect::<Result<_, _>>()?;
    if coords.len() != dim {
        return Err(err(cline, format!("expected {dim} coordinates, got {}", coords.len())));
    }
    let domain = match header.take_opt("domain") {
        None => None,
        Some((line, v)) => {
            let boxes = as_list(line, &v, "domain")?;
            if boxes.len() != dim {
                return Err(err(line, format!("domain needs {dim} intervals")));
            }
            let parsed = boxes
                .iter()
                .map(|b| match as_list(line, b, "interval")? {
                    [lo, hi] => {
                        let (lo, hi) = (as_f64(line, lo, "bound")?, as_f64(line, hi, "bound")?);
                        if lo < hi {
                            Ok((lo, hi))
                        } else {
                            Err(err(line, "interval bounds must satisfy lo < hi"))
                        }
                    }
                    _ => Err(err(line, "each interval must be [lo, hi]")),
                })
                .collect::<Result<Vec<_>, _>>()?;
            Some(parsed)
        }
    };
    header.finish()?;

    let rest: Vec<Section> = sections.collect();
    let metric = rest
        .iter()
        .find(|s| s.kind == SectionKind::Metric)
        .ok_or_else(|| err(text.lines().count().max(1), "missing [metric] section"))?;
    let rows: Vec<Vec<String>> = metric
        .rows
        .iter()
        .map(|(line, row)| row.iter().map(|v| as_expr(*line, v, "metric entry")).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    let coord_refs: Vec<&str> = coords.iter().map(String::as_str).collect();
    let mut spec = GeometrySpec::new(sig, &coord_refs, &rows).map_err(|e| core_err(metric.line, e))?;

    for mut section in rest {
        let line = section.line;
        match section.kind {
            SectionKind::Header | SectionKind::Metric => continue,
            SectionKind::Vector => {
                let (nl, name) = section.take("name")?;
                let name = as_name(nl, &name, "name")?;
                let (cl, comps) = section.take("components")?;
                let comps: Vec<String> = as_list(cl, &comps, "components")?
                    .iter()
                    .map(|v| as_expr(cl, v, "component"))
                    .collect::<Result<_, _>>()?;
                section.finish()?;
                spec.add_vector_field(&name, &comps).map_err(|e| core_err(cl, e))?;
            }
            SectionKind::Spinor => {
                let (nl, name) = section.take("name")?;
                let name = as_name(nl, &name, "name")?;
                let (cl, comps) = section.take("components")?;
                let comps: Vec<(String, String)> = as_list(cl, &comps, "components")?
                    .iter()
                    .map(|pair| match as_list(cl, pair, "spinor component")? {
                        [re, im] => Ok((as_expr(cl, re, "real part")?, as_expr(cl, im, "imaginary part")?)),
                        _ => Err(err(cl, "spinor components must be [re, im] pairs")),
                    })
                    .collect::<Result<_, _>>()?;
                section.finish()?;
                spec.add_spinor_field(&name, &comps).map_err(|e| core_err(cl, e))?;
            }
            SectionKind::Density => {
                let (nl, name) = section.take("name")?;
                let name = as_name(nl, &name, "name")?;
                let (rl, rank) = section.take("rank")?;
                let (upper, lower) = match as_list(rl, &rank, "rank")? {
                    [u, l] => (as_usize(rl, u, "rank")?, as_usize(rl, l, "rank")?),
                    _ => return Err(err(rl, "rank must be [upper, lower]")),
                };
                let weight = match section.take_opt("weight") {
                    Some((wl, w)) => as_f64(wl, &w, "weight")?,
                    None => 0.0,
                };
                let (cl, comps) = section.take("components")?;
                let comps: Vec<String> = as_list(cl, &comps, "components")?
                    .iter()
                    .map(|v| as_expr(cl, v, "component"))
                    .collect::<Result<_, _>>()?;
                section.finish()?;
                spec.add_density_field(&name, upper, lower, weight, &comps).map_err(|e| core_err(line, e))?;
            }
        }
    }
    Ok(GeometryFile { spec, domain })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLAT: &str = r#"
# Minkowski plane
dim = 2
signature = [1, 1]
coords = [t, x]
domain = [[-1, 1], [-2, 2]]

[metric]
"1" "0"
"-1"

[vector_field]
name = boost
components = ["x", "t"]

[spinor_field]
name = "psi"
components = [["1", "0"], ["t*x", 0.5]]

[density_field]
name = rho
rank = [0, 0]
weight = 1
components = ["exp(t)"]
"#;

    #[test]
    fn parses_a_complete_file() {
        let f = parse_geometry(FLAT).unwrap();
        assert_eq!(f.spec.dim(), 2);
        assert_eq!(f.spec.coords(), ["t", "x"]);
        assert_eq!(f.domain, Some(vec![(-1.0, 1.0), (-2.0, 2.0)]));
        assert!(f.spec.vector_field("boost").is_ok());
        assert!(f.spec.spinor_field("psi").is_ok());
        assert_eq!(f.spec.density_field("rho").unwrap().weight, 1.0);
        assert!(f.contains(&[0.5, -1.5]));
        assert!(!f.contains(&[1.5, 0.0]));
    }

    #[test]
    fn full_metric_rows_and_comments() {
        let text = "dim = 2 # two\nsignature = [2, 0]\ncoords = [a, b]\n[metric]\n1, 0 # row\n0, \"a^2 + 1\"\n";
        let f = parse_geometry(text).unwrap();
        assert!(f.domain.is_none());
        assert_eq!(f.spec.metric_expr(1, 1).to_string(), "((a^2) + 1.0)");
    }

    fn load_error(text: &str) -> (usize, String) {
        match parse_geometry(text) {
            Err(CliError::Load { line, message }) => (line, message),
            other => panic!("expected load error, got {other:?}"),
        }
    }

    #[test]
    fn reports_line_numbers() {
        let (line, msg) = load_error("dim = 2\nsignature = [1, 1]\ncoords = [t, x]\n[metric]\n\"1\" \"0\"\n\"-1 +\"\n");
        assert_eq!(line, 4);
        assert!(msg.contains("syntax"), "{msg}");
        let (line, _) = load_error("dim = 2\nsignature = [1, 1]\ncoords = [t, x]\nbogus = 3\n[metric]\n1 0\n-1\n");
        assert_eq!(line, 4);
        let (line, _) = load_error("dim = 2\nsignature = [1, 1]\ncoords = [t, x]\n[metric]\n1 0\n-1\n[tensor]\n");
        assert_eq!(line, 7);
    }

    #[test]
    fn rejects_bad_input() {
        let base = "dim = 2\nsignature = [1, 1]\ncoords = [t, x]\n[metric]\n1 0\n-1\n";
        assert!(parse_geometry(base).is_ok());
        for bad in [
            "dim = 3\nsignature = [1, 1]\ncoords = [t, x]\n[metric]\n1 0\n-1\n",
            "dim = 2\nsignature = [1, 1]\ncoords = [t]\n[metric]\n1 0\n-1\n",
            "dim = 2\ndim = 2\nsignature = [1, 1]\ncoords = [t, x]\n[metric]\n1 0\n-1\n",
            "dim = 2\nsignature = [1, 1]\ncoords = [t, x]\n",
            "dim = 2\nsignature = [1, 1]\ncoords = [t, x]\n[metric]\n1 0\n-1\n[metric]\n1 0\n-1\n",
            "dim = 2\nsignature = [1, 1]\ncoords = [t, x]\ndomain = [[1, 0], [0, 1]]\n[metric]\n1 0\n-1\n",
            "dim = 2\nsignature = [1, 1]\ncoords = [t, x]\n[metric]\n\"1\" \"0\n-1\n",
        ] {
            assert!(parse_geometry(bad).is_err(), "{bad}");
        }
        let dup = format!(
            "{base}[vector_field]\nname = v\ncomponents = [1, 0]\n[vector_field]\nname = v\ncomponents = [0, 1]\n"
        );
        assert!(parse_geometry(&dup).is_err());
        let unknown = format!("{base}[vector_field]\nname = v\ncomponents = [\"y\", 0]\n");
        assert!(parse_geometry(&unknown).is_err());
        let missing = format!("{base}[spinor_field]\nname = s\n");
        assert!(parse_geometry(&missing).is_err());
    }
}
