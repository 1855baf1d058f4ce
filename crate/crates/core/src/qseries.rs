//! Exact polynomials in `Y, t, q` and power series in `u` truncated at a
//! fixed order, used to expand the factorial generating functions of
//! `(fix, des, maj)` and `(fix, maj)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::perm::{Permutation, Permutations};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QSeriesError {
    #[error("A_{n}: coefficient of t^{degree} is {coefficient}, expected 0")]
    NonVanishing {
        n: usize,
        degree: u32,
        coefficient: String,
    },
    #[error("constant term {0} is not a unit, no reciprocal")]
    NotAUnit(String),
    #[error("q = {q} is a pole of the series")]
    Pole { q: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    Y,
    T,
    Q,
}

/// Exponents of `Y^y t^t q^q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    pub y: u32,
    pub t: u32,
    pub q: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { y: 0, t: 0, q: 0 };

    pub fn new(y: u32, t: u32, q: u32) -> Self {
        Monomial { y, t, q }
    }

    pub fn degree(&self) -> u32 {
        self.y + self.t + self.q
    }

    fn exponent(&self, v: Var) -> u32 {
        match v {
            Var::Y => self.y,
            Var::T => self.t,
            Var::Q => self.q,
        }
    }

    fn times(&self, other: &Monomial) -> Monomial {
        Monomial::new(self.y + other.y, self.t + other.t, self.q + other.q)
    }

    /// Graded lexicographic rank: larger total degree first, then by `Y`,
    /// `t`, `q` exponents, largest first.
    fn print_key(&self) -> (std::cmp::Reverse<u32>, std::cmp::Reverse<Monomial>) {
        (std::cmp::Reverse(self.degree()), std::cmp::Reverse(*self))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, e) in [("Y", self.y), ("t", self.t), ("q", self.q)] {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                f.write_str(name)?;
            } else {
                write!(f, "{name}^{e}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// A polynomial in `Y, t, q` with arbitrary-precision integer coefficients.
/// Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExactPolynomial {
    terms: BTreeMap<Monomial, BigInt>,
}

impl ExactPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, Monomial::ONE)
    }

    pub fn var(v: Var) -> Self {
        let m = match v {
            Var::Y => Monomial::new(1, 0, 0),
            Var::T => Monomial::new(0, 1, 0),
            Var::Q => Monomial::new(0, 0, 1),
        };
        Self::monomial(1, m)
    }

    pub fn monomial(c: impl Into<BigInt>, m: Monomial) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c.into());
        p
    }

    /// `1 + q + ⋯ + q^s`.
    pub fn q_integer(s: u32) -> Self {
        let mut p = Self::zero();
        for i in 0..s {
            p.add_term(Monomial::new(0, 0, i), BigInt::one());
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Degree in `v`; zero for the zero polynomial.
    pub fn degree(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    /// Coefficient of `t^k`, a polynomial in `Y, q`.
    pub fn t_coefficient(&self, k: u32) -> ExactPolynomial {
        let mut p = Self::zero();
        for (m, c) in &self.terms {
            if m.t == k {
                p.add_term(Monomial::new(m.y, 0, m.q), c.clone());
            }
        }
        p
    }

    /// Drops every term whose `t` exponent exceeds `max`.
    pub fn truncate_t(&self, max: u32) -> ExactPolynomial {
        ExactPolynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.t <= max)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub fn substitute_t_one(&self) -> ExactPolynomial {
        let mut p = Self::zero();
        for (m, c) in &self.terms {
            p.add_term(Monomial::new(m.y, 0, m.q), c.clone());
        }
        p
    }

    pub fn substitute_y_zero(&self) -> ExactPolynomial {
        ExactPolynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.y == 0)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub fn evaluate(&self, y: &BigRational, t: &BigRational, q: &BigRational) -> BigRational {
        let pow = |x: &BigRational, e: u32| num_traits::pow(x.clone(), e as usize);
        self.terms.iter().fold(BigRational::zero(), |acc, (m, c)| {
            acc + BigRational::from_integer(c.clone()) * pow(y, m.y) * pow(t, m.t) * pow(q, m.q)
        })
    }

    pub fn scale_monomial(&self, m: &Monomial) -> ExactPolynomial {
        ExactPolynomial {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.times(m), c.clone()))
                .collect(),
        }
    }

    /// One line per term, `y t q coefficient`, in increasing exponent order.
    pub fn to_structured(&self) -> String {
        self.terms
            .iter()
            .map(|(m, c)| format!("{} {} {} {}\n", m.y, m.t, m.q, c))
            .collect()
    }
}

impl fmt::Display for ExactPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by_key(|(m, _)| m.print_key());
        for (i, (m, c)) in terms.into_iter().enumerate() {
            let negative = c.is_negative();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            if *m == Monomial::ONE {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

impl Add<&ExactPolynomial> for &ExactPolynomial {
    type Output = ExactPolynomial;
    fn add(self, rhs: &ExactPolynomial) -> ExactPolynomial {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for ExactPolynomial {
    type Output = ExactPolynomial;
    fn add(mut self, rhs: ExactPolynomial) -> ExactPolynomial {
        self += &rhs;
        self
    }
}

impl AddAssign<&ExactPolynomial> for ExactPolynomial {
    fn add_assign(&mut self, rhs: &ExactPolynomial) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, c.clone());
        }
    }
}

impl Neg for &ExactPolynomial {
    type Output = ExactPolynomial;
    fn neg(self) -> ExactPolynomial {
        ExactPolynomial {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Sub<&ExactPolynomial> for &ExactPolynomial {
    type Output = ExactPolynomial;
    fn sub(self, rhs: &ExactPolynomial) -> ExactPolynomial {
        self + &(-rhs)
    }
}

impl Sub for ExactPolynomial {
    type Output = ExactPolynomial;
    fn sub(self, rhs: ExactPolynomial) -> ExactPolynomial {
        &self - &rhs
    }
}

impl Mul<&ExactPolynomial> for &ExactPolynomial {
    type Output = ExactPolynomial;
    fn mul(self, rhs: &ExactPolynomial) -> ExactPolynomial {
        let mut out = ExactPolynomial::zero();
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                out.add_term(a.times(b), x * y);
            }
        }
        out
    }
}

impl Mul for ExactPolynomial {
    type Output = ExactPolynomial;
    fn mul(self, rhs: ExactPolynomial) -> ExactPolynomial {
        &self * &rhs
    }
}

/// A power series in `u` with polynomial coefficients, kept modulo
/// `u^{N+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct USeries {
    coeffs: Vec<ExactPolynomial>,
}

impl USeries {
    pub fn zero(order: usize) -> Self {
        USeries {
            coeffs: vec![ExactPolynomial::zero(); order + 1],
        }
    }

    pub fn constant(order: usize, c: ExactPolynomial) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(order, ExactPolynomial::one())
    }

    /// `c·u^k`, or zero when `k > order`.
    pub fn term(order: usize, k: usize, c: ExactPolynomial) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// The series `u`.
    pub fn u(order: usize) -> Self {
        Self::term(order, 1, ExactPolynomial::one())
    }

    /// The `N` of `mod u^{N+1}`.
    pub fn truncation_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficient(&self, k: usize) -> &ExactPolynomial {
        &self.coeffs[k]
    }

    pub fn coefficients(&self) -> &[ExactPolynomial] {
        &self.coeffs
    }

    pub fn scale(&self, c: &ExactPolynomial) -> USeries {
        USeries {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add(&self, other: &USeries) -> USeries {
        self.assert_same_order(other);
        USeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &USeries) -> USeries {
        self.assert_same_order(other);
        USeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn mul(&self, other: &USeries) -> USeries {
        self.assert_same_order(other);
        let n = self.truncation_order();
        let mut out = Self::zero(n);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                if !b.is_zero() {
                    out.coeffs[i + j] += &(a * b);
                }
            }
        }
        out
    }

    /// Multiplicative inverse; the constant term must be `±1`.
    pub fn reciprocal(&self) -> Result<USeries, QSeriesError> {
        let c0 = &self.coeffs[0];
        let sign = if *c0 == ExactPolynomial::one() {
            ExactPolynomial::one()
        } else if *c0 == ExactPolynomial::constant(-1) {
            ExactPolynomial::constant(-1)
        } else {
            return Err(QSeriesError::NotAUnit(c0.to_string()));
        };
        let n = self.truncation_order();
        let mut r = Self::zero(n);
        r.coeffs[0] = sign.clone();
        for k in 1..=n {
            let mut acc = ExactPolynomial::zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() && !r.coeffs[k - j].is_zero() {
                    acc += &(&self.coeffs[j] * &r.coeffs[k - j]);
                }
            }
            r.coeffs[k] = -&(&sign * &acc);
        }
        Ok(r)
    }

    fn assert_same_order(&self, other: &USeries) {
        assert_eq!(
            self.truncation_order(),
            other.truncation_order(),
            "series truncated at different orders"
        );
    }
}

/// `(a;q)_k = (1 − a)(1 − aq)⋯(1 − aq^{k−1})` for a series argument.
pub fn q_pochhammer(a: &USeries, k: usize) -> USeries {
    let n = a.truncation_order();
    let one = USeries::one(n);
    (0..k as u32).fold(one.clone(), |acc, i| {
        let shifted = a.scale(&ExactPolynomial::monomial(1, Monomial::new(0, 0, i)));
        acc.mul(&one.sub(&shifted))
    })
}

/// `(a;q)_k` for a polynomial argument.
pub fn poly_pochhammer(a: &ExactPolynomial, k: usize) -> ExactPolynomial {
    (0..k as u32).fold(ExactPolynomial::one(), |acc, i| {
        let factor = &ExactPolynomial::one() - &a.scale_monomial(&Monomial::new(0, 0, i));
        &acc * &factor
    })
}

/// Coefficient of `u^n` in the `s`-th summand of the `t`-series:
/// `(1 − u[s+1]_q)^{-1} (u;q)_{s+1} / (uY;q)_{s+1}`.
fn t_summand(n_max: usize, s: usize) -> Result<USeries, QSeriesError> {
    let u = USeries::u(n_max);
    let uy = u.scale(&ExactPolynomial::var(Var::Y));
    let geometric = USeries::one(n_max)
        .sub(&u.scale(&ExactPolynomial::q_integer(s as u32 + 1)))
        .reciprocal()?;
    let numerator = q_pochhammer(&u, s + 1);
    let denominator = q_pochhammer(&uy, s + 1).reciprocal()?;
    Ok(geometric.mul(&numerator).mul(&denominator))
}

/// `A_0, …, A_{n_max}` in `Y, t, q`, read off the `t`-series with the sum
/// over `s` cut at `T = n_max + 1`.
///
/// Multiplying by `(t;q)_{n+1}` leaves the coefficients of `t^0 … t^T`
/// exact; those of `t^n … t^T` must vanish, which is checked.
pub fn gf_coefficients_t(n_max: usize) -> Result<Vec<ExactPolynomial>, QSeriesError> {
    let cut = n_max + 1;
    let summands: Vec<USeries> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..=cut)
            .map(|s| scope.spawn(move || t_summand(n_max, s)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("summand worker panicked"))
            .collect::<Result<_, _>>()
    })?;

    let t = ExactPolynomial::var(Var::T);
    (0..=n_max)
        .map(|n| {
            let mut b = ExactPolynomial::zero();
            for (s, summand) in summands.iter().enumerate() {
                b += &summand
                    .coefficient(n)
                    .scale_monomial(&Monomial::new(0, s as u32, 0));
            }
            let a = &poly_pochhammer(&t, n + 1) * &b;
            let first_zero = n.max(1) as u32;
            for degree in first_zero..=cut as u32 {
                let c = a.t_coefficient(degree);
                if !c.is_zero() {
                    return Err(QSeriesError::NonVanishing {
                        n,
                        degree,
                        coefficient: c.to_string(),
                    });
                }
            }
            Ok(a.truncate_t(first_zero - 1))
        })
        .collect()
}

/// `A_n(Y, q) = A_n(Y, 1, q)`.
pub fn gf_coefficients_q(n_max: usize) -> Result<Vec<ExactPolynomial>, QSeriesError> {
    Ok(gf_coefficients_t(n_max)?
        .iter()
        .map(ExactPolynomial::substitute_t_one)
        .collect())
}

/// `(q;q)_n · [u^n]` of the right side of the `q`-series identity, with
/// `(u;q)_∞ = Σ (−1)^k q^{k(k−1)/2} u^k/(q;q)_k` and
/// `1/(uY;q)_∞ = Σ Y^k u^k/(q;q)_k`, evaluated at rational `Y, q`.
pub fn q_series_values(
    n_max: usize,
    y: &BigRational,
    q: &BigRational,
) -> Result<Vec<BigRational>, QSeriesError> {
    let one = BigRational::one();
    if *q == one || *q == -one.clone() {
        return Err(QSeriesError::Pole { q: q.to_string() });
    }
    let mut qq = vec![one.clone()];
    for k in 1..=n_max {
        let f = &one - num_traits::pow(q.clone(), k);
        qq.push(&qq[k - 1] * f);
    }
    let ratio = (&one - q).recip();
    let geometric: Vec<BigRational> = (0..=n_max)
        .map(|k| num_traits::pow(ratio.clone(), k))
        .collect();
    let inf: Vec<BigRational> = (0..=n_max)
        .map(|k| {
            let sign = if k % 2 == 0 {
                one.clone()
            } else {
                -one.clone()
            };
            sign * num_traits::pow(q.clone(), k * k.saturating_sub(1) / 2) / &qq[k]
        })
        .collect();
    let recip: Vec<BigRational> = (0..=n_max)
        .map(|k| num_traits::pow(y.clone(), k) / &qq[k])
        .collect();
    let convolve = |a: &[BigRational], b: &[BigRational]| -> Vec<BigRational> {
        (0..=n_max)
            .map(|n| (0..=n).fold(BigRational::zero(), |acc, i| acc + &a[i] * &b[n - i]))
            .collect()
    };
    let series = convolve(&convolve(&geometric, &inf), &recip);
    Ok(series.into_iter().zip(qq).map(|(c, f)| c * f).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub n: usize,
    pub y: BigRational,
    pub q: BigRational,
    pub polynomial: BigRational,
    pub series: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certification {
    pub points: usize,
    pub mismatch: Option<Mismatch>,
}

impl Certification {
    pub fn holds(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Evaluation grid for [`certify_q_series`] up to order `n_max`.
///
/// After clearing the denominator `(1−q)^n (q;q)_n²` both sides become
/// polynomials of `Y`-degree at most `n` and `q`-degree at most `2n² + 2n`,
/// so `n + 1` values of `Y` times `2n² + 2n + 1` values of `q` suffice.
/// The `q` values are `0, 2, −2, 3, −3, …`, avoiding the poles `±1`.
pub fn certification_grid(n_max: usize) -> (Vec<BigRational>, Vec<BigRational>) {
    let ys = (0..=n_max as i64)
        .map(|k| BigRational::from_integer(k.into()))
        .collect();
    let count = 2 * n_max * n_max + 2 * n_max + 1;
    let mut qs = vec![BigRational::zero()];
    let mut k: i64 = 2;
    while qs.len() < count {
        qs.push(BigRational::from_integer(k.into()));
        if qs.len() < count {
            qs.push(BigRational::from_integer((-k).into()));
        }
        k += 1;
    }
    (ys, qs)
}

/// Checks candidate `A_n(Y, q)` (index `n`) against the `q`-series identity
/// on the grid of [`certification_grid`]; agreement everywhere certifies
/// equality as polynomials.
pub fn certify_q_series(candidates: &[ExactPolynomial]) -> Result<Certification, QSeriesError> {
    let n_max = candidates.len().saturating_sub(1);
    let (ys, qs) = certification_grid(n_max);
    certify_q_series_on(candidates, &ys, &qs)
}

pub fn certify_q_series_on(
    candidates: &[ExactPolynomial],
    ys: &[BigRational],
    qs: &[BigRational],
) -> Result<Certification, QSeriesError> {
    if candidates.is_empty() {
        return Ok(Certification {
            points: 0,
            mismatch: None,
        });
    }
    let n_max = candidates.len() - 1;
    let one = BigRational::one();
    let mut points = 0;
    for q in qs {
        for y in ys {
            let values = q_series_values(n_max, y, q)?;
            points += 1;
            for (n, (poly, series)) in candidates.iter().zip(values).enumerate() {
                let at = poly.evaluate(y, &one, q);
                if at != series {
                    return Ok(Certification {
                        points,
                        mismatch: Some(Mismatch {
                            n,
                            y: y.clone(),
                            q: q.clone(),
                            polynomial: at,
                            series,
                        }),
                    });
                }
            }
        }
    }
    Ok(Certification {
        points,
        mismatch: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GfMode {
    /// `Σ Y^fix t^des q^maj`
    Triple,
    /// `Σ Y^fix q^maj`
    Pair,
}

pub fn combinatorial_gf(n: usize, mode: GfMode) -> ExactPolynomial {
    combinatorial_gf_by(n, mode, |p| (p.fix(), p.des(), p.maj()))
}

/// As [`combinatorial_gf`], with `(fix, des, maj)` supplied by `stats`.
pub fn combinatorial_gf_by(
    n: usize,
    mode: GfMode,
    stats: impl Fn(&Permutation) -> (usize, usize, usize),
) -> ExactPolynomial {
    let mut counts: BTreeMap<Monomial, u64> = BTreeMap::new();
    for p in Permutations::new(n) {
        let (fix, des, maj) = stats(&p);
        let t = match mode {
            GfMode::Triple => des as u32,
            GfMode::Pair => 0,
        };
        *counts
            .entry(Monomial::new(fix as u32, t, maj as u32))
            .or_default() += 1;
    }
    let mut out = ExactPolynomial::zero();
    for (m, c) in counts {
        out.add_term(m, c.into());
    }
    out
}
