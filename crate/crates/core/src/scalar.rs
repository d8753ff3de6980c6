//! Scalar abstraction shared by plain evaluation and second-order forward
//! differentiation in two variables.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic needed by every metric coefficient evaluator.
pub trait Scalar:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn cst(x: f64) -> Self;
    fn val(&self) -> f64;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn ln(self) -> Self;
    fn exp(self) -> Self;
    fn powf(self, p: f64) -> Self;

    fn powi(self, n: i32) -> Self {
        match n {
            0 => Self::cst(1.0),
            1 => self,
            2 => self * self,
            n if n < 0 => Self::cst(1.0) / self.powi(-n),
            n => {
                let h = self.powi(n / 2);
                if n % 2 == 0 {
                    h * h
                } else {
                    h * h * self
                }
            }
        }
    }

    fn abs(self) -> Self {
        if self.val() < 0.0 {
            -self
        } else {
            self
        }
    }

    fn scale(self, k: f64) -> Self {
        self * Self::cst(k)
    }
}

impl Scalar for f64 {
    fn cst(x: f64) -> Self {
        x
    }
    fn val(&self) -> f64 {
        *self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

/// Value, gradient and Hessian of a function of two variables `(u, v)`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Jet2 {
    pub v: f64,
    pub du: f64,
    pub dv: f64,
    pub duu: f64,
    pub duv: f64,
    pub dvv: f64,
}

impl Jet2 {
    pub fn constant(v: f64) -> Self {
        Jet2 { v, ..Default::default() }
    }

    /// The coordinate function `u` seeded at `u0`.
    pub fn var_u(u0: f64) -> Self {
        Jet2 { v: u0, du: 1.0, ..Default::default() }
    }

    /// The coordinate function `v` seeded at `v0`.
    pub fn var_v(v0: f64) -> Self {
        Jet2 { v: v0, dv: 1.0, ..Default::default() }
    }

    /// Compose with a scalar function given its value and first two derivatives.
    fn chain(self, g: f64, g1: f64, g2: f64) -> Self {
        Jet2 {
            v: g,
            du: g1 * self.du,
            dv: g1 * self.dv,
            duu: g2 * self.du * self.du + g1 * self.duu,
            duv: g2 * self.du * self.dv + g1 * self.duv,
            dvv: g2 * self.dv * self.dv + g1 * self.dvv,
        }
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        Jet2 {
            v: self.v + o.v,
            du: self.du + o.du,
            dv: self.dv + o.dv,
            duu: self.duu + o.duu,
            duv: self.duv + o.duv,
            dvv: self.dvv + o.dvv,
        }
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        self + (-o)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        Jet2 {
            v: -self.v,
            du: -self.du,
            dv: -self.dv,
            duu: -self.duu,
            duv: -self.duv,
            dvv: -self.dvv,
        }
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        Jet2 {
            v: self.v * o.v,
            du: self.du * o.v + self.v * o.du,
            dv: self.dv * o.v + self.v * o.dv,
            duu: self.duu * o.v + 2.0 * self.du * o.du + self.v * o.duu,
            duv: self.duv * o.v + self.du * o.dv + self.dv * o.du + self.v * o.duv,
            dvv: self.dvv * o.v + 2.0 * self.dv * o.dv + self.v * o.dvv,
        }
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    fn div(self, o: Jet2) -> Jet2 {
        let r = 1.0 / o.v;
        self * o.chain(r, -r * r, 2.0 * r * r * r)
    }
}

impl Scalar for Jet2 {
    fn cst(x: f64) -> Self {
        Jet2::constant(x)
    }
    fn val(&self) -> f64 {
        self.v
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.v))
    }
    fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }
    fn ln(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(self.v.ln(), r, -r * r)
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
    fn powf(self, p: f64) -> Self {
        let x = self.v;
        self.chain(x.powf(p), p * x.powf(p - 1.0), p * (p - 1.0) * x.powf(p - 2.0))
    }
    fn powi(self, n: i32) -> Self {
        let x = self.v;
        let p = n as f64;
        let g = x.powi(n);
        let g1 = if n == 0 { 0.0 } else { p * x.powi(n - 1) };
        let g2 = if n == 0 || n == 1 { 0.0 } else { p * (p - 1.0) * x.powi(n - 2) };
        self.chain(g, g1, g2)
    }
    fn scale(self, k: f64) -> Self {
        Jet2 {
            v: self.v * k,
            du: self.du * k,
            dv: self.dv * k,
            duu: self.duu * k,
            duv: self.duv * k,
            dvv: self.dvv * k,
        }
    }
}

/// Value and first two derivatives of a one-variable function at `r`.
pub fn derivs1<F: Fn(Jet2) -> Jet2>(f: F, r: f64) -> (f64, f64, f64) {
    let j = f(Jet2::var_u(r));
    (j.v, j.du, j.duu)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_quotient_rules() {
        let u = Jet2::var_u(0.7);
        let v = Jet2::var_v(-1.3);
        let f = (u * v + u.sin()) / (v * v + Jet2::cst(2.0));
        let h = 1e-4;
        let g = |a: f64, b: f64| (a * b + a.sin()) / (b * b + 2.0);
        let (a, b) = (0.7, -1.3);
        assert!((f.du - (g(a + h, b) - g(a - h, b)) / (2.0 * h)).abs() < 1e-8);
        assert!((f.dv - (g(a, b + h) - g(a, b - h)) / (2.0 * h)).abs() < 1e-8);
        let duv = (g(a + h, b + h) - g(a + h, b - h) - g(a - h, b + h) + g(a - h, b - h)) / (4.0 * h * h);
        assert!((f.duv - duv).abs() < 1e-6);
        let dvv = (g(a, b + h) - 2.0 * g(a, b) + g(a, b - h)) / (h * h);
        assert!((f.dvv - dvv).abs() < 1e-6);
    }

    #[test]
    fn powers_agree() {
        let u = Jet2::var_u(1.7);
        let a = u.powi(3);
        let b = u.powf(3.0);
        let c = u * u * u;
        for x in [a, b] {
            assert!((x.v - c.v).abs() < 1e-12);
            assert!((x.du - c.du).abs() < 1e-12);
            assert!((x.duu - c.duu).abs() < 1e-12);
        }
    }
}
