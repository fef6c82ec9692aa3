//! Truncated bivariate Taylor arithmetic ("multi-jets").
//!
//! A [`MultiJet`] of order `K` stores the coefficients `c_ij = ∂^{i+j} g / (∂u^i ∂v^j) / (i! j!)`
//! for all `i + j ≤ K` of a scalar chart function `g` about a base point. Arithmetic and
//! elementary-function composition propagate these coefficients exactly (up to rounding),
//! so every derivative consumed downstream comes from forward-mode differentiation rather
//! than finite differencing.
//!
//! Coefficients are stored graded by total degree: `(0,0), (1,0), (0,1), (2,0), (1,1), (0,2), …`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use thiserror::Error;

/// Largest supported jet order.
pub const MAX_ORDER: usize = 9;

/// Number of stored coefficients for the largest supported order.
pub const MAX_COEFFS: usize = (MAX_ORDER + 1) * (MAX_ORDER + 2) / 2;

/// Default working order of the geometric pipeline.
pub const DEFAULT_ORDER: usize = 5;

/// Errors raised by jet arithmetic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    /// The operation would produce non-finite coefficients (division by a vanishing value,
    /// logarithm or square root outside the domain, overflow).
    #[error("degenerate jet: {0}")]
    DegenerateJet(String),
    /// Operands of a strict binary operation carry different orders.
    #[error("jet order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    /// A derivative was requested from an order-0 jet, or an order above [`MAX_ORDER`].
    #[error("jet order {0} is outside the supported range")]
    OrderOutOfRange(usize),
}

/// Chart variable selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    U,
    V,
}

/// Binary operation tag for [`jet_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Elementary function tag for [`jet_compose`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Elementary {
    Sin,
    Cos,
    Exp,
    Log,
    Sinh,
    Cosh,
    Tanh,
    Sech,
    Sqrt,
    Recip,
    Atan,
    /// Real power `x^p`; integer exponents are allowed at non-positive base values.
    Pow(f64),
}

/// Flat index of the coefficient `c_ij` in graded storage.
#[inline]
pub const fn index(i: usize, j: usize) -> usize {
    let n = i + j;
    n * (n + 1) / 2 + j
}

/// Number of coefficients of an order-`k` jet.
#[inline]
pub const fn coeff_count(k: usize) -> usize {
    (k + 1) * (k + 2) / 2
}

const FACTORIALS: [f64; MAX_ORDER + 2] = {
    let mut f = [1.0; MAX_ORDER + 2];
    let mut i = 1;
    while i < MAX_ORDER + 2 {
        f[i] = f[i - 1] * i as f64;
        i += 1;
    }
    f
};

/// Truncated bivariate Taylor expansion of a scalar chart function.
#[derive(Clone, Copy)]
pub struct MultiJet {
    order: usize,
    c: [f64; MAX_COEFFS],
}

impl fmt::Debug for MultiJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiJet")
            .field("order", &self.order)
            .field("coeffs", &self.coeffs())
            .finish()
    }
}

impl PartialEq for MultiJet {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.coeffs() == other.coeffs()
    }
}

impl MultiJet {
    fn check_order(order: usize) -> Result<(), JetError> {
        if order > MAX_ORDER {
            Err(JetError::OrderOutOfRange(order))
        } else {
            Ok(())
        }
    }

    /// The zero jet of the given order.
    ///
    /// # Panics
    /// If `order > MAX_ORDER`.
    pub fn zero(order: usize) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        MultiJet {
            order,
            c: [0.0; MAX_COEFFS],
        }
    }

    /// A constant function.
    pub fn constant(value: f64, order: usize) -> Self {
        let mut j = Self::zero(order);
        j.c[0] = value;
        j
    }

    /// The coordinate function `u` or `v` seeded at `value`.
    pub fn variable(value: f64, which: Var, order: usize) -> Self {
        let mut j = Self::constant(value, order);
        if order >= 1 {
            match which {
                Var::U => j.c[index(1, 0)] = 1.0,
                Var::V => j.c[index(0, 1)] = 1.0,
            }
        }
        j
    }

    /// Build a jet from graded coefficients; the length must be `coeff_count(order)`.
    pub fn from_coeffs(order: usize, coeffs: &[f64]) -> Result<Self, JetError> {
        Self::check_order(order)?;
        if coeffs.len() != coeff_count(order) {
            return Err(JetError::DegenerateJet(format!(
                "expected {} coefficients for order {order}, got {}",
                coeff_count(order),
                coeffs.len()
            )));
        }
        let mut j = Self::zero(order);
        j.c[..coeffs.len()].copy_from_slice(coeffs);
        Ok(j)
    }

    /// Truncation order `K`.
    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    /// Graded coefficient table (length `(K+1)(K+2)/2`).
    #[inline]
    pub fn coeffs(&self) -> &[f64] {
        &self.c[..coeff_count(self.order)]
    }

    /// Function value at the base point.
    #[inline]
    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Taylor coefficient `c_ij` (zero beyond the truncation order).
    #[inline]
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j > self.order {
            0.0
        } else {
            self.c[index(i, j)]
        }
    }

    /// Raw partial derivative `∂^{i+j} g / ∂u^i ∂v^j` at the base point.
    pub fn partial(&self, i: usize, j: usize) -> Result<f64, JetError> {
        if i + j > self.order {
            return Err(JetError::OrderOutOfRange(i + j));
        }
        Ok(self.c[index(i, j)] * FACTORIALS[i] * FACTORIALS[j])
    }

    /// First partial derivatives `(g_u, g_v)` at the base point.
    pub fn gradient(&self) -> Result<[f64; 2], JetError> {
        Ok([self.partial(1, 0)?, self.partial(0, 1)?])
    }

    /// Drop all coefficients above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        if order >= self.order {
            return *self;
        }
        let mut j = Self::zero(order);
        let n = coeff_count(order);
        j.c[..n].copy_from_slice(&self.c[..n]);
        j
    }

    /// True when every stored coefficient is finite.
    pub fn is_finite(&self) -> bool {
        self.coeffs().iter().all(|x| x.is_finite())
    }

    fn finite_or(self, what: &str) -> Result<Self, JetError> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(JetError::DegenerateJet(format!(
                "{what} produced non-finite coefficients"
            )))
        }
    }

    /// Partial derivative jet `∂g/∂u` or `∂g/∂v`; the result has order `K − 1`.
    pub fn derivative(&self, which: Var) -> Result<Self, JetError> {
        if self.order == 0 {
            return Err(JetError::OrderOutOfRange(0));
        }
        let k = self.order - 1;
        let mut d = Self::zero(k);
        for n in 0..=k {
            for j in 0..=n {
                let i = n - j;
                d.c[index(i, j)] = match which {
                    Var::U => (i + 1) as f64 * self.c[index(i + 1, j)],
                    Var::V => (j + 1) as f64 * self.c[index(i, j + 1)],
                };
            }
        }
        Ok(d)
    }

    /// Value of the truncated polynomial at displacement `(du, dv)`.
    pub fn eval_at(&self, du: f64, dv: f64) -> f64 {
        let mut acc = 0.0;
        for n in (0..=self.order).rev() {
            let mut row = 0.0;
            for j in 0..=n {
                row += self.c[index(n - j, j)] * du.powi((n - j) as i32) * dv.powi(j as i32);
            }
            acc += row;
        }
        acc
    }

    /// Multiply by a scalar.
    pub fn scale(&self, s: f64) -> Self {
        let mut r = *self;
        for x in r.c[..coeff_count(self.order)].iter_mut() {
            *x *= s;
        }
        r
    }

    /// Truncated Cauchy product; the result has the lower of the two orders.
    pub fn mul_jet(&self, b: &Self) -> Self {
        let k = self.order.min(b.order);
        let mut r = Self::zero(k);
        for n in 0..=k {
            for jr in 0..=n {
                let ir = n - jr;
                let mut acc = 0.0;
                for ja in 0..=jr {
                    for ia in 0..=ir {
                        acc += self.c[index(ia, ja)] * b.c[index(ir - ia, jr - ja)];
                    }
                }
                r.c[index(ir, jr)] = acc;
            }
        }
        r
    }

    /// Reciprocal `1/g`.
    pub fn recip(&self) -> Result<Self, JetError> {
        jet_compose(Elementary::Recip, self)
    }

    /// Quotient `self / b`; fails with `DegenerateJet` if `b` vanishes at the base point.
    pub fn div_jet(&self, b: &Self) -> Result<Self, JetError> {
        let k = self.order.min(b.order);
        let b0 = b.c[0];
        if b0 == 0.0 || !b0.is_finite() {
            return Err(JetError::DegenerateJet("division by a jet with vanishing value".into()));
        }
        // Solve r·b = a degree by degree: r_n = (a_n − Σ_{m<n} r_m b_{n−m}) / b0.
        let mut r = Self::zero(k);
        for n in 0..=k {
            for jr in 0..=n {
                let ir = n - jr;
                let mut acc = self.c[index(ir, jr)];
                for ja in 0..=jr {
                    for ia in 0..=ir {
                        if ia == ir && ja == jr {
                            continue;
                        }
                        acc -= r.c[index(ia, ja)] * b.c[index(ir - ia, jr - ja)];
                    }
                }
                r.c[index(ir, jr)] = acc / b0;
            }
        }
        r.finite_or("division")
    }

    /// Integer power by repeated multiplication (negative exponents via reciprocal).
    pub fn powi(&self, n: i32) -> Result<Self, JetError> {
        jet_compose(Elementary::Pow(n as f64), self)
    }

    pub fn sin(&self) -> Result<Self, JetError> {
        jet_compose(Elementary::Sin, self)
    }
    pub fn cos(&self) -> Result<Self, JetError> {
        jet_compose(Elementary::Cos, self)
    }
    pub fn exp(&self) -> Result<Self, JetError> {
        jet_compose(Elementary::Exp, self)
    }
    pub fn ln(&self) -> Result<Self, JetError> {
        jet_compose(Elementary::Log, self)
    }
    pub fn sinh(&self) -> Result<Self, JetError> {
        jet_compose(Elementary::Sinh, self)
    }
    pub fn cosh(&self) -> Result<Self, JetError> {
        jet_compose(Elementary::Cosh, self)
    }
    pub fn tanh(&self) -> Result<Self, JetError> {
        jet_compose(Elementary::Tanh, self)
    }
    pub fn sech(&self) -> Result<Self, JetError> {
        jet_compose(Elementary::Sech, self)
    }
    pub fn sqrt(&self) -> Result<Self, JetError> {
        jet_compose(Elementary::Sqrt, self)
    }
    pub fn atan(&self) -> Result<Self, JetError> {
        jet_compose(Elementary::Atan, self)
    }
    pub fn powf(&self, p: f64) -> Result<Self, JetError> {
        jet_compose(Elementary::Pow(p), self)
    }
}

/// `lift_variable(value, which, K)`: the coordinate function seeded at `value`.
pub fn lift_variable(value: f64, which: Var, order: usize) -> Result<MultiJet, JetError> {
    MultiJet::check_order(order)?;
    Ok(MultiJet::variable(value, which, order))
}

/// Strict binary arithmetic: both operands must carry the same order.
pub fn jet_arith(a: &MultiJet, b: &MultiJet, op: ArithOp) -> Result<MultiJet, JetError> {
    if a.order != b.order {
        return Err(JetError::OrderMismatch(a.order, b.order));
    }
    match op {
        ArithOp::Add => Ok(*a + *b),
        ArithOp::Sub => Ok(*a - *b),
        ArithOp::Mul => Ok(a.mul_jet(b)),
        ArithOp::Div => a.div_jet(b),
    }
}

// ── univariate series helpers ──

/// Truncated univariate power series product.
fn series_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().min(b.len());
    (0..n).map(|k| (0..=k).map(|i| a[i] * b[k - i]).sum()).collect()
}

/// Truncated univariate series reciprocal (requires `a[0] ≠ 0`).
fn series_recip(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut r = vec![0.0; n];
    r[0] = 1.0 / a[0];
    for k in 1..n {
        let s: f64 = (1..=k).map(|i| a[i] * r[k - i]).sum();
        r[k] = -s / a[0];
    }
    r
}

/// Univariate Taylor coefficients `g_n = g^{(n)}(x0)/n!`, `n = 0..=k`.
fn univariate_coeffs(g: Elementary, x0: f64, k: usize) -> Result<Vec<f64>, JetError> {
    let degenerate = |msg: &str| Err(JetError::DegenerateJet(format!("{msg} at value {x0}")));
    let mut out = vec![0.0; k + 1];
    match g {
        Elementary::Exp => {
            let e = x0.exp();
            for (n, o) in out.iter_mut().enumerate() {
                *o = e / FACTORIALS[n];
            }
        }
        Elementary::Sin | Elementary::Cos => {
            let (s, c) = x0.sin_cos();
            // derivatives of sin cycle: sin, cos, −sin, −cos
            let cyc = match g {
                Elementary::Sin => [s, c, -s, -c],
                _ => [c, -s, -c, s],
            };
            for (n, o) in out.iter_mut().enumerate() {
                *o = cyc[n % 4] / FACTORIALS[n];
            }
        }
        Elementary::Sinh | Elementary::Cosh => {
            let (s, c) = (x0.sinh(), x0.cosh());
            let cyc = match g {
                Elementary::Sinh => [s, c],
                _ => [c, s],
            };
            for (n, o) in out.iter_mut().enumerate() {
                *o = cyc[n % 2] / FACTORIALS[n];
            }
        }
        Elementary::Log => {
            if !(x0 > 0.0) {
                return degenerate("logarithm of a non-positive value");
            }
            out[0] = x0.ln();
            for (n, o) in out.iter_mut().enumerate().skip(1) {
                let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
                *o = sign / (n as f64 * x0.powi(n as i32));
            }
        }
        Elementary::Recip => {
            if x0 == 0.0 {
                return degenerate("reciprocal of zero");
            }
            let r = 1.0 / x0;
            let mut p = r;
            for o in out.iter_mut() {
                *o = p;
                p *= -r;
            }
        }
        Elementary::Sqrt => {
            if !(x0 > 0.0) {
                return degenerate("square root of a non-positive value");
            }
            return univariate_coeffs(Elementary::Pow(0.5), x0, k);
        }
        Elementary::Pow(p) => {
            let integer = p.fract() == 0.0 && p.abs() < 1e9;
            if integer && p >= 0.0 {
                // exact polynomial expansion (x0 + δ)^p
                let n = p as usize;
                let mut binom = 1.0;
                for (m, o) in out.iter_mut().enumerate() {
                    if m > n {
                        break;
                    }
                    *o = binom * x0.powi((n - m) as i32);
                    binom = binom * (n - m) as f64 / (m + 1) as f64;
                }
            } else {
                if integer && x0 == 0.0 {
                    return degenerate("negative power of zero");
                }
                if !integer && !(x0 > 0.0) {
                    return degenerate("fractional power of a non-positive value");
                }
                let mut binom = 1.0;
                for (m, o) in out.iter_mut().enumerate() {
                    *o = binom * x0.powf(p - m as f64);
                    binom = binom * (p - m as f64) / (m + 1) as f64;
                }
            }
        }
        Elementary::Tanh => {
            // t' = 1 − t²  ⇒  (n+1) t_{n+1} = [1 − t²]_n
            out[0] = x0.tanh();
            for n in 0..k {
                let sq: f64 = (0..=n).map(|i| out[i] * out[n - i]).sum();
                let rhs = if n == 0 { 1.0 - sq } else { -sq };
                out[n + 1] = rhs / (n + 1) as f64;
            }
        }
        Elementary::Sech => {
            // s' = −s·t with t = tanh
            let t = univariate_coeffs(Elementary::Tanh, x0, k)?;
            out[0] = 1.0 / x0.cosh();
            for n in 0..k {
                let st: f64 = (0..=n).map(|i| out[i] * t[n - i]).sum();
                out[n + 1] = -st / (n + 1) as f64;
            }
        }
        Elementary::Atan => {
            // atan' = 1/(1 + x²); integrate the series of the derivative.
            out[0] = x0.atan();
            if k >= 1 {
                let lin = {
                    let mut l = vec![0.0; k];
                    l[0] = x0;
                    if k > 1 {
                        l[1] = 1.0;
                    }
                    l
                };
                let mut q = series_mul(&lin, &lin);
                q[0] += 1.0;
                let d = series_recip(&q);
                for n in 0..k {
                    out[n + 1] = d[n] / (n + 1) as f64;
                }
            }
        }
    }
    if out.iter().all(|x| x.is_finite()) {
        Ok(out)
    } else {
        degenerate("non-finite series coefficient")
    }
}

/// Compose an elementary function with a jet by Horner substitution of `δ = a − a(0)`.
pub fn jet_compose(g: Elementary, a: &MultiJet) -> Result<MultiJet, JetError> {
    let k = a.order;
    let gc = univariate_coeffs(g, a.c[0], k)?;
    let mut delta = *a;
    delta.c[0] = 0.0;
    let mut r = MultiJet::constant(gc[k], k);
    for n in (0..k).rev() {
        r = r.mul_jet(&delta);
        r.c[0] += gc[n];
    }
    r.finite_or("composition")
}

// ── operator sugar (mixed orders truncate to the lower order) ──

impl Add for MultiJet {
    type Output = MultiJet;
    fn add(self, b: MultiJet) -> MultiJet {
        let k = self.order.min(b.order);
        let mut r = self.truncate(k);
        for i in 0..coeff_count(k) {
            r.c[i] += b.c[i];
        }
        r
    }
}

impl Sub for MultiJet {
    type Output = MultiJet;
    fn sub(self, b: MultiJet) -> MultiJet {
        let k = self.order.min(b.order);
        let mut r = self.truncate(k);
        for i in 0..coeff_count(k) {
            r.c[i] -= b.c[i];
        }
        r
    }
}

impl Mul for MultiJet {
    type Output = MultiJet;
    fn mul(self, b: MultiJet) -> MultiJet {
        self.mul_jet(&b)
    }
}

impl Neg for MultiJet {
    type Output = MultiJet;
    fn neg(self) -> MultiJet {
        self.scale(-1.0)
    }
}

impl Add<f64> for MultiJet {
    type Output = MultiJet;
    fn add(mut self, b: f64) -> MultiJet {
        self.c[0] += b;
        self
    }
}

impl Sub<f64> for MultiJet {
    type Output = MultiJet;
    fn sub(mut self, b: f64) -> MultiJet {
        self.c[0] -= b;
        self
    }
}

impl Mul<f64> for MultiJet {
    type Output = MultiJet;
    fn mul(self, b: f64) -> MultiJet {
        self.scale(b)
    }
}

impl Mul<MultiJet> for f64 {
    type Output = MultiJet;
    fn mul(self, b: MultiJet) -> MultiJet {
        b.scale(self)
    }
}

impl AddAssign for MultiJet {
    fn add_assign(&mut self, b: MultiJet) {
        *self = *self + b;
    }
}

impl SubAssign for MultiJet {
    fn sub_assign(&mut self, b: MultiJet) {
        *self = *self - b;
    }
}
