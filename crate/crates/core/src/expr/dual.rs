use std::ops::{Add, Div, Mul, Neg, Sub};

/// A value together with its gradient with respect to the chart coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct DualValue {
    pub value: f64,
    pub grad: Vec<f64>,
}

impl DualValue {
    pub fn constant(value: f64, dim: usize) -> Self {
        DualValue { value, grad: vec![0.0; dim] }
    }

    /// The coordinate function `x^index`.
    pub fn variable(value: f64, index: usize, dim: usize) -> Self {
        let mut grad = vec![0.0; dim];
        grad[index] = 1.0;
        DualValue { value, grad }
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    /// Applies a scalar function with known derivative `df` at `self.value`.
    pub fn chain(&self, value: f64, df: f64) -> Self {
        DualValue { value, grad: self.grad.iter().map(|g| g * df).collect() }
    }

    pub fn scale(&self, k: f64) -> Self {
        self.chain(self.value * k, k)
    }

    pub fn sqrt(&self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s)
    }

    pub fn sin(&self) -> Self {
        self.chain(self.value.sin(), self.value.cos())
    }

    pub fn cos(&self) -> Self {
        self.chain(self.value.cos(), -self.value.sin())
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.chain(e, e)
    }

    pub fn ln(&self) -> Self {
        self.chain(self.value.ln(), 1.0 / self.value)
    }

    pub fn powi(&self, n: i32) -> Self {
        if n == 0 {
            return DualValue::constant(1.0, self.dim());
        }
        self.chain(self.value.powi(n), n as f64 * self.value.powi(n - 1))
    }

    pub fn recip(&self) -> Self {
        self.chain(1.0 / self.value, -1.0 / (self.value * self.value))
    }

    pub fn abs(&self) -> Self {
        if self.value < 0.0 {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Add for &DualValue {
    type Output = DualValue;
    fn add(self, rhs: &DualValue) -> DualValue {
        DualValue { value: self.value + rhs.value, grad: self.grad.iter().zip(&rhs.grad).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &DualValue {
    type Output = DualValue;
    fn sub(self, rhs: &DualValue) -> DualValue {
        DualValue { value: self.value - rhs.value, grad: self.grad.iter().zip(&rhs.grad).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &DualValue {
    type Output = DualValue;
    fn mul(self, rhs: &DualValue) -> DualValue {
        DualValue {
            value: self.value * rhs.value,
            grad: self.grad.iter().zip(&rhs.grad).map(|(a, b)| a * rhs.value + self.value * b).collect(),
        }
    }
}

impl Div for &DualValue {
    type Output = DualValue;
    fn div(self, rhs: &DualValue) -> DualValue {
        let inv = 1.0 / rhs.value;
        let value = self.value * inv;
        DualValue { value, grad: self.grad.iter().zip(&rhs.grad).map(|(a, b)| (a - value * b) * inv).collect() }
    }
}

impl Neg for DualValue {
    type Output = DualValue;
    fn neg(self) -> DualValue {
        DualValue { value: -self.value, grad: self.grad.into_iter().map(|g| -g).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for DualValue {
            type Output = DualValue;
            fn $m(self, rhs: DualValue) -> DualValue {
                (&self).$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_quotient_rules() {
        let x = DualValue::variable(3.0, 0, 2);
        let y = DualValue::variable(2.0, 1, 2);
        let p = &x * &y;
        assert_eq!(p.value, 6.0);
        assert_eq!(p.grad, vec![2.0, 3.0]);
        let q = &x / &y;
        assert_eq!(q.value, 1.5);
        assert_eq!(q.grad, vec![0.5, -0.75]);
    }

    #[test]
    fn powers() {
        let x = DualValue::variable(2.0, 0, 1);
        assert_eq!(x.powi(3).grad, vec![12.0]);
        assert_eq!(x.powi(-1).grad, vec![-0.25]);
        assert_eq!(x.powi(0).grad, vec![0.0]);
    }
}
