//! Scalar field expressions over chart coordinates.
//!
//! Expressions are parsed once and then evaluated either plainly or with
//! forward-mode first derivatives ([`Expression::eval_dual`]). The plain
//! evaluator also backs the central-difference oracle [`Expression::fd_gradient`],
//! which shares no derivative code with the dual path.

mod dual;
mod parse;

use std::fmt;
use std::sync::Arc;

pub use dual::DualValue;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Sin,
    Cos,
    Exp,
    Log,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
        }
    }
}

/// Abstract syntax tree node. Coordinates are referenced by index.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Coord(usize),
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Pow(Box<Node>, i32),
    Call(Func, Box<Node>),
}

/// A parsed expression together with the coordinate names it was parsed against.
#[derive(Debug, Clone)]
pub struct Expression {
    node: Node,
    coords: Arc<[String]>,
}

impl PartialEq for Expression {
    fn eq(&self, other: &Self) -> bool {
        self.node == other.node
    }
}

/// A point of the chart.
pub type Point = [f64];

impl Expression {
    pub fn parse(source: &str, coords: &[String]) -> Result<Self> {
        let node = parse::Parser::parse(source, coords)?;
        Ok(Expression { node, coords: coords.into() })
    }

    /// Parses against an already shared coordinate list.
    pub fn parse_shared(source: &str, coords: &Arc<[String]>) -> Result<Self> {
        let node = parse::Parser::parse(source, coords)?;
        Ok(Expression { node, coords: coords.clone() })
    }

    pub fn constant(value: f64, coords: &Arc<[String]>) -> Self {
        Expression { node: Node::Const(value), coords: coords.clone() }
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    fn check_point(&self, pt: &Point) -> Result<()> {
        if pt.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: pt.len() });
        }
        Ok(())
    }

    /// Plain value at `pt`.
    pub fn eval(&self, pt: &Point) -> Result<f64> {
        self.check_point(pt)?;
        self.eval_node(&self.node, pt)
    }

    /// Value and exact gradient at `pt`.
    pub fn eval_dual(&self, pt: &Point) -> Result<DualValue> {
        self.check_point(pt)?;
        self.dual_node(&self.node, pt)
    }

    /// Central-difference gradient `(e(x + h e_μ) − e(x − h e_μ)) / 2h`.
    pub fn fd_gradient(&self, pt: &Point, h: f64) -> Result<Vec<f64>> {
        if !(h > 0.0) {
            return Err(Error::Precondition(format!("finite-difference step must be positive, got {h}")));
        }
        self.check_point(pt)?;
        let mut shifted = pt.to_vec();
        (0..pt.len())
            .map(|mu| {
                shifted[mu] = pt[mu] + h;
                let plus = self.eval_node(&self.node, &shifted)?;
                shifted[mu] = pt[mu] - h;
                let minus = self.eval_node(&self.node, &shifted)?;
                shifted[mu] = pt[mu];
                Ok((plus - minus) / (2.0 * h))
            })
            .collect()
    }

    fn domain(&self, node: &Node, message: &str) -> Error {
        Error::Domain { node: Display(node, &self.coords).to_string(), message: message.into() }
    }

    fn eval_node(&self, node: &Node, pt: &Point) -> Result<f64> {
        Ok(match node {
            Node::Const(v) => *v,
            Node::Coord(i) => pt[*i],
            Node::Neg(a) => -self.eval_node(a, pt)?,
            Node::Binary(op, a, b) => {
                let (a, b) = (self.eval_node(a, pt)?, self.eval_node(b, pt)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(self.domain(node, "division by zero"));
                        }
                        a / b
                    }
                }
            }
            Node::Pow(a, n) => {
                let a = self.eval_node(a, pt)?;
                if a == 0.0 && *n < 0 {
                    return Err(self.domain(node, "negative power of zero"));
                }
                a.powi(*n)
            }
            Node::Call(f, a) => {
                let a = self.eval_node(a, pt)?;
                match f {
                    Func::Sqrt if a < 0.0 => return Err(self.domain(node, "sqrt of a negative number")),
                    Func::Log if a <= 0.0 => return Err(self.domain(node, "log of a non-positive number")),
                    Func::Sqrt => a.sqrt(),
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                    Func::Log => a.ln(),
                }
            }
        })
    }

    fn dual_node(&self, node: &Node, pt: &Point) -> Result<DualValue> {
        let m = pt.len();
        Ok(match node {
            Node::Const(v) => DualValue::constant(*v, m),
            Node::Coord(i) => DualValue::variable(pt[*i], *i, m),
            Node::Neg(a) => -self.dual_node(a, pt)?,
            Node::Binary(op, a, b) => {
                let (a, b) = (self.dual_node(a, pt)?, self.dual_node(b, pt)?);
                match op {
                    BinOp::Add => &a + &b,
                    BinOp::Sub => &a - &b,
                    BinOp::Mul => &a * &b,
                    BinOp::Div => {
                        if b.value == 0.0 {
                            return Err(self.domain(node, "division by zero"));
                        }
                        &a / &b
                    }
                }
            }
            Node::Pow(a, n) => {
                let a = self.dual_node(a, pt)?;
                if a.value == 0.0 && *n < 0 {
                    return Err(self.domain(node, "negative power of zero"));
                }
                a.powi(*n)
            }
            Node::Call(f, a) => {
                let a = self.dual_node(a, pt)?;
                match f {
                    Func::Sqrt if a.value < 0.0 => return Err(self.domain(node, "sqrt of a negative number")),
                    Func::Sqrt if a.value == 0.0 => return Err(self.domain(node, "sqrt is not differentiable at zero")),
                    Func::Log if a.value <= 0.0 => return Err(self.domain(node, "log of a non-positive number")),
                    Func::Sqrt => a.sqrt(),
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                    Func::Log => a.ln(),
                }
            }
        })
    }
}

struct Display<'a>(&'a Node, &'a [String]);

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.1;
        match self.0 {
            Node::Const(v) if *v < 0.0 => write!(f, "(-{:?})", -v),
            Node::Const(v) => write!(f, "{v:?}"),
            Node::Coord(i) => f.write_str(&names[*i]),
            Node::Neg(a) => write!(f, "(-{})", Display(a, names)),
            Node::Binary(op, a, b) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                };
                write!(f, "({} {sym} {})", Display(a, names), Display(b, names))
            }
            Node::Pow(a, n) => write!(f, "({}^{n})", Display(a, names)),
            Node::Call(func, a) => write!(f, "{}({})", func.name(), Display(a, names)),
        }
    }
}

/// Fully parenthesized source; parsing it again gives the same tree.
impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Display(&self.node, &self.coords).fmt(f)
    }
}
