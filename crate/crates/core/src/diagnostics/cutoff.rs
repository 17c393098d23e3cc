//! Smooth radial cutoff `psi` with `psi = 1` on `[0, 1]`, `psi = 0` on
//! `[2, inf)`, non-increasing, built by gluing `h(t) = exp(-1/t)`:
//!
//! ```text
//! psi(s) = h(2 - s) / (h(2 - s) + h(s - 1))
//! ```
//!
//! Derivatives are exact (up to rounding): `psi` is evaluated on truncated
//! Taylor series, so no finite differencing enters the virial weights.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Number of Taylor coefficients carried (derivatives 0..=6).
pub const JET_LEN: usize = 7;

/// Truncated Taylor series `sum_k c[k] (x - x0)^k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet(pub [f64; JET_LEN]);

impl Jet {
    pub fn constant(c: f64) -> Self {
        let mut a = [0.0; JET_LEN];
        a[0] = c;
        Jet(a)
    }

    pub fn variable(x0: f64) -> Self {
        let mut a = [0.0; JET_LEN];
        a[0] = x0;
        a[1] = 1.0;
        Jet(a)
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    /// `k`-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.0[k] * fact
    }

    pub fn recip(&self) -> Self {
        let a = &self.0;
        let mut b = [0.0; JET_LEN];
        b[0] = 1.0 / a[0];
        for n in 1..JET_LEN {
            let s: f64 = (1..=n).map(|k| a[k] * b[n - k]).sum();
            b[n] = -s * b[0];
        }
        Jet(b)
    }

    pub fn exp(&self) -> Self {
        let a = &self.0;
        let mut e = [0.0; JET_LEN];
        e[0] = a[0].exp();
        for n in 1..JET_LEN {
            let s: f64 = (1..=n).map(|k| k as f64 * a[k] * e[n - k]).sum();
            e[n] = s / n as f64;
        }
        Jet(e)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut c = self.0;
        c.iter_mut().zip(o.0).for_each(|(a, b)| *a += b);
        Jet(c)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet(self.0.map(|a| -a))
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut c = [0.0; JET_LEN];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate().take(JET_LEN - i) {
                c[i + j] += a * b;
            }
        }
        Jet(c)
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

/// `exp(-1/t)` for `t > 0`, zero otherwise.
fn glue(t: Jet) -> Jet {
    if t.value() <= 0.0 {
        Jet::constant(0.0)
    } else {
        (-t.recip()).exp()
    }
}

/// Taylor jet of `psi` at `s >= 0`.
pub fn psi_jet(s: f64) -> Jet {
    if s <= 1.0 {
        return Jet::constant(1.0);
    }
    if s >= 2.0 {
        return Jet::constant(0.0);
    }
    let x = Jet::variable(s);
    let a = glue(Jet::constant(2.0) - x);
    let b = glue(x - Jet::constant(1.0));
    a / (a + b)
}

pub fn psi(s: f64) -> f64 {
    psi_jet(s).value()
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Integrals of `psi` tabulated by composite Gauss-Legendre quadrature.
pub struct CutoffIntegrals {
    rule: Vec<(f64, f64)>,
    panels: usize,
}

impl Default for CutoffIntegrals {
    fn default() -> Self {
        Self {
            rule: gauss_legendre(12),
            panels: 32,
        }
    }
}

impl CutoffIntegrals {
    fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let h = (b - a) / self.panels as f64;
        let mut total = 0.0;
        for k in 0..self.panels {
            let mid = a + (k as f64 + 0.5) * h;
            for &(x, w) in &self.rule {
                total += w * f(mid + 0.5 * h * x);
            }
        }
        0.5 * h * total
    }

    /// `int_0^y psi(s) ds`.
    pub fn first(&self, y: f64) -> f64 {
        let y = y.abs();
        if y <= 1.0 {
            y
        } else {
            1.0 + self.integrate(1.0, y.min(2.0), psi)
        }
    }

    /// `int_0^y int_0^r psi(s) ds dr = int_0^y (y - s) psi(s) ds`.
    pub fn second(&self, y: f64) -> f64 {
        let y = y.abs();
        if y <= 1.0 {
            0.5 * y * y
        } else {
            let top = y.min(2.0);
            0.5 + (y - 1.0) + self.integrate(1.0, top, |s| (y - s) * psi(s))
        }
    }
}
