//! Second-order forward-mode differentiation.
//!
//! A [`Jet`] carries `f(t0)`, `f'(t0)` and `f''(t0)` through arithmetic, so a
//! closed-form expression evaluated on [`Jet::variable`] yields exact first
//! and second derivatives. Used for custom warping functions and for
//! closed-form profile curves.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const fn new(v: f64, d1: f64, d2: f64) -> Self {
        Jet { v, d1, d2 }
    }

    pub const fn constant(v: f64) -> Self {
        Jet { v, d1: 0.0, d2: 0.0 }
    }

    pub const fn variable(v: f64) -> Self {
        Jet { v, d1: 1.0, d2: 0.0 }
    }

    pub fn is_constant(&self) -> bool {
        self.d1 == 0.0 && self.d2 == 0.0
    }

    /// Applies a scalar function given its value and first two derivatives
    /// at `self.v`.
    #[inline]
    pub fn chain(self, f: f64, df: f64, ddf: f64) -> Jet {
        Jet {
            v: f,
            d1: df * self.d1,
            d2: ddf * self.d1 * self.d1 + df * self.d2,
        }
    }

    pub fn recip(self) -> Jet {
        let x = self.v;
        self.chain(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))
    }

    pub fn sqrt(self) -> Jet {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.v))
    }

    pub fn powf(self, p: f64) -> Jet {
        let x = self.v;
        self.chain(
            x.powf(p),
            p * x.powf(p - 1.0),
            p * (p - 1.0) * x.powf(p - 2.0),
        )
    }

    pub fn powi(self, p: i32) -> Jet {
        let x = self.v;
        let pf = p as f64;
        let d1 = if p == 0 { 0.0 } else { pf * x.powi(p - 1) };
        let d2 = if p == 0 || p == 1 {
            0.0
        } else {
            pf * (pf - 1.0) * x.powi(p - 2)
        };
        self.chain(x.powi(p), d1, d2)
    }

    /// General power with a possibly non-constant exponent.
    pub fn pow(self, e: Jet) -> Jet {
        if e.is_constant() {
            let p = e.v;
            if p.fract() == 0.0 && p.abs() < 64.0 {
                return self.powi(p as i32);
            }
            return self.powf(p);
        }
        (e * self.ln()).exp()
    }

    pub fn exp(self) -> Jet {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Jet {
        let x = self.v;
        self.chain(x.ln(), 1.0 / x, -1.0 / (x * x))
    }

    pub fn sin(self) -> Jet {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Jet {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn tan(self) -> Jet {
        let t = self.v.tan();
        let sec2 = 1.0 + t * t;
        self.chain(t, sec2, 2.0 * t * sec2)
    }

    pub fn sinh(self) -> Jet {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(s, c, s)
    }

    pub fn cosh(self) -> Jet {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(c, s, c)
    }

    pub fn tanh(self) -> Jet {
        let t = self.v.tanh();
        let sech2 = 1.0 - t * t;
        self.chain(t, sech2, -2.0 * t * sech2)
    }

    /// Two-argument arctangent `atan2(self, x)`.
    pub fn atan2(self, x: Jet) -> Jet {
        let y = self;
        let d = x.v * x.v + y.v * y.v;
        let num = x.v * y.d1 - y.v * x.d1;
        let num_t = x.v * y.d2 - y.v * x.d2;
        let d_t = 2.0 * (x.v * x.d1 + y.v * y.d1);
        Jet {
            v: y.v.atan2(x.v),
            d1: num / d,
            d2: (num_t * d - num * d_t) / (d * d),
        }
    }
}

impl From<f64> for Jet {
    fn from(v: f64) -> Self {
        Jet::constant(v)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet::new(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet::new(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet::new(
            self.v * o.v,
            self.d1 * o.v + self.v * o.d1,
            self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        )
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet::new(-self.v, -self.d1, -self.d2)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, o: f64) -> Jet {
        Jet::new(self.v + o, self.d1, self.d2)
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, o: f64) -> Jet {
        Jet::new(self.v - o, self.d1, self.d2)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, o: f64) -> Jet {
        Jet::new(self.v * o, self.d1 * o, self.d2 * o)
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        o * self
    }
}
