//! Second-order jets: a value together with its first and second derivative
//! with respect to a single variable. Used to evaluate ODE residuals of
//! closed-form profiles without finite-difference noise.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        Self { v, d1: 0.0, d2: 0.0 }
    }

    /// The independent variable at `x`.
    pub fn variable(x: f64) -> Self {
        Self { v: x, d1: 1.0, d2: 0.0 }
    }

    /// Chain rule for a scalar map with derivatives `(g, g', g'')` at `self.v`.
    fn compose(self, g: f64, g1: f64, g2: f64) -> Self {
        Self {
            v: g,
            d1: g1 * self.d1,
            d2: g2 * self.d1 * self.d1 + g1 * self.d2,
        }
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.compose(e, e, e)
    }

    pub fn ln(self) -> Self {
        let x = self.v;
        self.compose(x.ln(), 1.0 / x, -1.0 / (x * x))
    }

    pub fn powf(self, p: f64) -> Self {
        let x = self.v;
        self.compose(x.powf(p), p * x.powf(p - 1.0), p * (p - 1.0) * x.powf(p - 2.0))
    }

    pub fn powi(self, p: i32) -> Self {
        let x = self.v;
        let pf = f64::from(p);
        let (g1, g2) = match p {
            0 => (0.0, 0.0),
            1 => (1.0, 0.0),
            _ => (pf * x.powi(p - 1), pf * (pf - 1.0) * x.powi(p - 2)),
        };
        self.compose(x.powi(p), g1, g2)
    }

    pub fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.compose(s, 0.5 / s, -0.25 / (s * s * s))
    }

    pub fn scale(self, c: f64) -> Self {
        Self { v: c * self.v, d1: c * self.d1, d2: c * self.d2 }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet { v: self.v + o.v, d1: self.d1 + o.d1, d2: self.d2 + o.d2 }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet { v: self.v - o.v, d1: self.d1 - o.d1, d2: self.d2 - o.d2 }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        let inv = o.compose(1.0 / o.v, -1.0 / (o.v * o.v), 2.0 / (o.v * o.v * o.v));
        self * inv
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, c: f64) -> Jet {
        Jet { v: self.v + c, ..self }
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, c: f64) -> Jet {
        Jet { v: self.v - c, ..self }
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, c: f64) -> Jet {
        self.scale(c)
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, j: Jet) -> Jet {
        j + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, j: Jet) -> Jet {
        -j + self
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, j: Jet) -> Jet {
        j.scale(self)
    }
}

impl Div<Jet> for f64 {
    type Output = Jet;
    fn div(self, j: Jet) -> Jet {
        Jet::constant(self) / j
    }
}

/// Residual of the polar operator `-u'' - u'/r + m^2 u / r^2` at a jet of `u(r)`.
pub fn polar_laplacian_residual(u: Jet, r: f64, m_sq: f64) -> f64 {
    -u.d2 - u.d1 / r + m_sq * u.v / (r * r)
}
