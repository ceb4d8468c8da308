//! Exact integration on `(0, 1)` for the interval-mixture examples: measures
//! `P_n`, the coherent risk measure `sup_n E_{P_n}`, its truncations, and the
//! bubble tables built from them.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::scalar::rat;

type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContinuumError {
    #[error("polynomial degree {0} exceeds 3")]
    Degree(usize),
    #[error("breakpoints must increase strictly from 0 to 1")]
    Breakpoints,
    #[error("expected {expected} pieces, got {actual}")]
    PieceCount { expected: usize, actual: usize },
    #[error("interval ({0}, {1}) is empty or leaves (0, 1)")]
    Interval(String, String),
    #[error("mixture weights must be non-negative and sum to 1")]
    Weights,
    #[error("truncation level must be at least 1")]
    Truncation,
    #[error("grid must be non-empty")]
    EmptyGrid,
}

pub const MAX_DEGREE: usize = 3;

/// Polynomial with rational coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<Q>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Q>) -> Result<Self, ContinuumError> {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.len() > MAX_DEGREE + 1 {
            return Err(ContinuumError::Degree(coeffs.len() - 1));
        }
        Ok(Polynomial { coeffs })
    }

    pub fn constant(c: Q) -> Self {
        Self::new(vec![c]).expect("degree 0")
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.coeffs.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| {
                self.coeffs.get(i).cloned().unwrap_or_else(Q::zero)
                    + other.coeffs.get(i).cloned().unwrap_or_else(Q::zero)
            })
            .collect();
        Self::new(c).expect("degree does not grow")
    }

    pub fn scale(&self, k: &Q) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect()).expect("degree does not grow")
    }

    pub fn mul(&self, other: &Self) -> Result<Self, ContinuumError> {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Ok(Self::zero());
        }
        let mut c = vec![Q::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    /// `int_a^b p(x) dx`.
    pub fn integrate(&self, a: &Q, b: &Q) -> Q {
        let anti = |x: &Q| {
            self.coeffs
                .iter()
                .enumerate()
                .rev()
                .fold(Q::zero(), |acc, (k, c)| acc * x + c / Q::from_integer((k as i64 + 1).into()))
                * x
        };
        anti(b) - anti(a)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*w")?,
                _ => write!(f, "{c}*w^{k}")?,
            }
        }
        Ok(())
    }
}

/// Piecewise polynomial on `(0, 1)`. Piece `i` lives on
/// `(breakpoints[i], breakpoints[i + 1])`; values at breakpoints are
/// irrelevant for every integral taken here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseRationalFunction {
    breakpoints: Vec<Q>,
    pieces: Vec<Polynomial>,
}

impl PiecewiseRationalFunction {
    pub fn new(breakpoints: Vec<Q>, pieces: Vec<Polynomial>) -> Result<Self, ContinuumError> {
        if breakpoints.len() < 2
            || !breakpoints[0].is_zero()
            || !breakpoints.last().unwrap().is_one()
            || breakpoints.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(ContinuumError::Breakpoints);
        }
        if pieces.len() != breakpoints.len() - 1 {
            return Err(ContinuumError::PieceCount {
                expected: breakpoints.len() - 1,
                actual: pieces.len(),
            });
        }
        Ok(PiecewiseRationalFunction { breakpoints, pieces }.normalized())
    }

    pub fn constant(c: Q) -> Self {
        Self::new(vec![Q::zero(), Q::one()], vec![Polynomial::constant(c)]).expect("valid")
    }

    pub fn from_polynomial(p: Polynomial) -> Self {
        Self::new(vec![Q::zero(), Q::one()], vec![p]).expect("valid")
    }

    /// `c` on `(a, b)`, zero elsewhere.
    pub fn indicator(a: Q, b: Q, c: Q) -> Result<Self, ContinuumError> {
        check_interval(&a, &b)?;
        let mut bps = vec![Q::zero()];
        let mut pieces = Vec::new();
        if !a.is_zero() {
            bps.push(a.clone());
            pieces.push(Polynomial::zero());
        }
        pieces.push(Polynomial::constant(c));
        if !b.is_one() {
            bps.push(b.clone());
            pieces.push(Polynomial::zero());
        }
        bps.push(Q::one());
        Self::new(bps, pieces)
    }

    pub fn breakpoints(&self) -> &[Q] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Polynomial] {
        &self.pieces
    }

    fn normalized(mut self) -> Self {
        let mut bps = vec![self.breakpoints[0].clone()];
        let mut pieces: Vec<Polynomial> = Vec::new();
        for (i, p) in self.pieces.drain(..).enumerate() {
            if pieces.last() == Some(&p) {
                *bps.last_mut().unwrap() = self.breakpoints[i + 1].clone();
            } else {
                pieces.push(p);
                bps.push(self.breakpoints[i + 1].clone());
            }
        }
        PiecewiseRationalFunction {
            breakpoints: bps,
            pieces,
        }
    }

    /// Value inside the piece containing `x`; at a breakpoint the right piece is used.
    pub fn eval(&self, x: &Q) -> Q {
        let i = self.breakpoints[1..].iter().position(|b| x < b).unwrap_or(self.pieces.len() - 1);
        self.pieces[i].eval(x)
    }

    fn refine(&self, bps: &[Q]) -> Vec<Polynomial> {
        bps.windows(2)
            .map(|w| {
                let mid = (&w[0] + &w[1]) / Q::from_integer(2.into());
                let i = self.breakpoints[1..].iter().position(|b| &mid < b).expect("inside (0, 1)");
                self.pieces[i].clone()
            })
            .collect()
    }

    fn combine(&self, other: &Self, op: impl Fn(&Polynomial, &Polynomial) -> Result<Polynomial, ContinuumError>) -> Result<Self, ContinuumError> {
        let mut bps: Vec<Q> = self.breakpoints.iter().chain(&other.breakpoints).cloned().collect();
        bps.sort();
        bps.dedup();
        let a = self.refine(&bps);
        let b = other.refine(&bps);
        let pieces = a.iter().zip(&b).map(|(p, q)| op(p, q)).collect::<Result<Vec<_>, _>>()?;
        Self::new(bps, pieces)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |p, q| Ok(p.add(q))).expect("sum keeps degree")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, k: &Q) -> Self {
        PiecewiseRationalFunction {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(|p| p.scale(k)).collect(),
        }
        .normalized()
    }

    pub fn shift(&self, c: &Q) -> Self {
        self.add(&Self::constant(c.clone()))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, ContinuumError> {
        self.combine(other, |p, q| p.mul(q))
    }

    /// `f * 1_{(a, b)}`.
    pub fn restrict(&self, a: Q, b: Q) -> Result<Self, ContinuumError> {
        self.mul(&Self::indicator(a, b, Q::one())?)
    }

    /// `int_a^b f`.
    pub fn integrate(&self, a: &Q, b: &Q) -> Q {
        let mut total = Q::zero();
        for (i, p) in self.pieces.iter().enumerate() {
            let lo = std::cmp::max(a, &self.breakpoints[i]);
            let hi = std::cmp::min(b, &self.breakpoints[i + 1]);
            if lo < hi {
                total += p.integrate(lo, hi);
            }
        }
        total
    }
}

impl fmt::Display for PiecewiseRationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.pieces.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "({}, {}): {p}", self.breakpoints[i], self.breakpoints[i + 1])?;
        }
        Ok(())
    }
}

fn check_interval(a: &Q, b: &Q) -> Result<(), ContinuumError> {
    if a.is_negative() || b > &Q::one() || a >= b {
        return Err(ContinuumError::Interval(a.to_string(), b.to_string()));
    }
    Ok(())
}

/// One component `weight * lambda(. | (lo, hi))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixtureComponent {
    pub weight: Q,
    pub lo: Q,
    pub hi: Q,
}

/// Finite mixture of normalized Lebesgue measures on subintervals of `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalMixtureMeasure {
    components: Vec<MixtureComponent>,
}

impl IntervalMixtureMeasure {
    pub fn new(components: Vec<MixtureComponent>) -> Result<Self, ContinuumError> {
        for c in &components {
            check_interval(&c.lo, &c.hi)?;
        }
        let total: Q = components.iter().map(|c| c.weight.clone()).sum();
        if components.iter().any(|c| c.weight.is_negative()) || !total.is_one() {
            return Err(ContinuumError::Weights);
        }
        Ok(IntervalMixtureMeasure { components })
    }

    /// `lambda(. | (lo, hi))`.
    pub fn uniform(lo: Q, hi: Q) -> Result<Self, ContinuumError> {
        Self::new(vec![MixtureComponent {
            weight: Q::one(),
            lo,
            hi,
        }])
    }

    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }

    /// Mass of the interval `(a, b)`.
    pub fn prob(&self, a: &Q, b: &Q) -> Q {
        self.components
            .iter()
            .map(|c| {
                let lo = std::cmp::max(a, &c.lo);
                let hi = std::cmp::min(b, &c.hi);
                if lo < hi {
                    &c.weight * (hi - lo) / (&c.hi - &c.lo)
                } else {
                    Q::zero()
                }
            })
            .sum()
    }
}

/// Exact `E_mu[f]`.
pub fn expect(mu: &IntervalMixtureMeasure, f: &PiecewiseRationalFunction) -> Q {
    mu.components
        .iter()
        .filter(|c| !c.weight.is_zero())
        .map(|c| &c.weight * f.integrate(&c.lo, &c.hi) / (&c.hi - &c.lo))
        .sum()
}

/// `A_n = (0, 1/(n+1))`.
pub fn a_n(n: u64) -> (Q, Q) {
    (Q::zero(), rat(1, n as i64 + 1))
}

/// `B = [1/2, 1)`.
pub fn b_set() -> (Q, Q) {
    (rat(1, 2), Q::one())
}

/// `P_n = (n-1)/n lambda(. | A_n) + 1/n lambda(. | B)`.
pub fn p_n(n: u64) -> IntervalMixtureMeasure {
    assert!(n >= 1, "P_n is indexed from 1");
    let (a0, a1) = a_n(n);
    let (b0, b1) = b_set();
    let n = n as i64;
    IntervalMixtureMeasure::new(vec![
        MixtureComponent {
            weight: rat(n - 1, n),
            lo: a0,
            hi: a1,
        },
        MixtureComponent {
            weight: rat(1, n),
            lo: b0,
            hi: b1,
        },
    ])
    .expect("valid mixture")
}

/// `Q = lambda(. | (0, 1/2))`.
pub fn q_measure() -> IntervalMixtureMeasure {
    IntervalMixtureMeasure::uniform(Q::zero(), rat(1, 2)).expect("valid")
}

/// `y = -1` on `B`, `2w` elsewhere.
pub fn y_function() -> PiecewiseRationalFunction {
    PiecewiseRationalFunction::new(
        vec![Q::zero(), rat(1, 2), Q::one()],
        vec![
            Polynomial::new(vec![Q::zero(), rat(2, 1)]).expect("linear"),
            Polynomial::constant(rat(-1, 1)),
        ],
    )
    .expect("valid")
}

/// `W = -y`.
pub fn w_function() -> PiecewiseRationalFunction {
    y_function().scale(&rat(-1, 1))
}

/// `c * 1_B`.
pub fn b_indicator(c: Q) -> PiecewiseRationalFunction {
    let (lo, hi) = b_set();
    PiecewiseRationalFunction::indicator(lo, hi, c).expect("valid")
}

/// `E_{P_n}[X]` for `n = 1..=n_max`.
pub fn pn_expectations(x: &PiecewiseRationalFunction, n_max: u64) -> Vec<Q> {
    (1..=n_max).map(|n| expect(&p_n(n), x)).collect()
}

/// `rho_N(X) = max_{n <= N} E_{P_n}[X]`.
pub fn rho_truncated(x: &PiecewiseRationalFunction, n: u64) -> Result<Q, ContinuumError> {
    if n == 0 {
        return Err(ContinuumError::Truncation);
    }
    Ok(pn_expectations(x, n).into_iter().max().expect("n >= 1"))
}

/// Running maxima of `E_{P_n}[X]`, read off at each requested truncation.
fn truncated_series(x: &PiecewiseRationalFunction, n_grid: &[u64]) -> Result<Vec<Q>, ContinuumError> {
    if n_grid.contains(&0) {
        return Err(ContinuumError::Truncation);
    }
    let n_max = *n_grid.iter().max().ok_or(ContinuumError::EmptyGrid)?;
    let mut prefix = Vec::with_capacity(n_max as usize);
    let mut best: Option<Q> = None;
    for e in pn_expectations(x, n_max) {
        best = Some(match best {
            Some(b) if b >= e => b,
            _ => e,
        });
        prefix.push(best.clone().unwrap());
    }
    Ok(n_grid.iter().map(|&n| prefix[n as usize - 1].clone()).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BubbleRow {
    pub m: i64,
    pub n: u64,
    #[serde(serialize_with = "crate::continuum::ser_rat")]
    pub value: Q,
}

pub(crate) fn ser_rat<S: serde::Serializer>(q: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

/// `g(m, N) = rho_N(X_base 1_{(0, 1/2)} - m 1_B)` over the grid, `m` major.
pub fn bubble_table(x_base: &PiecewiseRationalFunction, m_grid: &[i64], n_grid: &[u64]) -> Result<Vec<BubbleRow>, ContinuumError> {
    if m_grid.is_empty() || n_grid.is_empty() {
        return Err(ContinuumError::EmptyGrid);
    }
    let local = x_base.restrict(Q::zero(), rat(1, 2))?;
    let mut rows = Vec::new();
    for &m in m_grid {
        let x = local.add(&b_indicator(Q::from_integer((-m).into())));
        for (&n, value) in n_grid.iter().zip(truncated_series(&x, n_grid)?) {
            rows.push(BubbleRow { m, n, value });
        }
    }
    Ok(rows)
}

/// Closed form `max(-1/2, max_{n <= N} (-(n-1)/(n(n+1)) - m/n))`.
pub fn kappa_closed_form(m: i64, n_trunc: u64) -> Q {
    (1..=n_trunc as i64)
        .map(|n| rat(-(n - 1), n * (n + 1)) - rat(m, n))
        .fold(rat(-1, 2), std::cmp::max)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KappaRow {
    pub m: i64,
    pub n: u64,
    /// `kappa_N(W 1_{(0, 1/2)} - m 1_B)` by integration.
    #[serde(serialize_with = "crate::continuum::ser_rat")]
    pub kappa: Q,
    #[serde(serialize_with = "crate::continuum::ser_rat")]
    pub closed_form: Q,
    /// `kappa - kappa^Q_D(W)`.
    #[serde(serialize_with = "crate::continuum::ser_rat")]
    pub gap: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KappaReport {
    /// `kappa^Q_D(W) = E_Q[W]`.
    #[serde(serialize_with = "crate::continuum::ser_rat")]
    pub kappa_d: Q,
    pub rows: Vec<KappaRow>,
}

/// Truncations of `kappa = rho v E_Q` evaluated on `W 1_{(0, 1/2)} - m 1_B`.
pub fn kappa_report(m_grid: &[i64], n_grid: &[u64]) -> Result<KappaReport, ContinuumError> {
    if m_grid.is_empty() || n_grid.is_empty() {
        return Err(ContinuumError::EmptyGrid);
    }
    let q = q_measure();
    let w = w_function();
    let kappa_d = expect(&q, &w);
    let local = w.restrict(Q::zero(), rat(1, 2))?;
    let mut rows = Vec::new();
    for &m in m_grid {
        let x = local.add(&b_indicator(Q::from_integer((-m).into())));
        let eq = expect(&q, &x);
        for (&n, rho) in n_grid.iter().zip(truncated_series(&x, n_grid)?) {
            let kappa = std::cmp::max(rho, eq.clone());
            rows.push(KappaRow {
                m,
                n,
                gap: &kappa - &kappa_d,
                closed_form: kappa_closed_form(m, n),
                kappa,
            });
        }
    }
    Ok(KappaReport { kappa_d, rows })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZCheck {
    pub m: i64,
    /// `Q(D)` and `Q(D')`.
    pub q_d: Q,
    pub q_d_prime: Q,
    /// `D` and `D'` avoid `A_m`.
    pub outside_a_m: bool,
    /// `E_Q[Z]`.
    pub eq_z: Q,
    /// `E_{P_n}[Z]` for `n = 1..=n_max`.
    pub pn_z: Vec<Q>,
    /// `E_{P_n}[Z] = -m/n` for every checked `n >= m`.
    pub tail_matches: bool,
    /// `E_{P_n}[Z] <= (n-1-m)/n` for every checked `n < m`.
    pub head_bounded: bool,
}

impl ZCheck {
    pub fn holds(&self) -> bool {
        self.q_d == self.q_d_prime
            && self.q_d.is_positive()
            && self.outside_a_m
            && self.eq_z.is_zero()
            && self.pn_z.iter().all(|v| !v.is_positive())
            && self.tail_matches
            && self.head_bounded
    }
}

/// Verifies the acceptable loss `Z = 1_D - 1_{D'} - m 1_B` for concrete
/// intervals `D`, `D'` inside `(0, 1/2)`.
pub fn z_check(m: i64, d: (Q, Q), d_prime: (Q, Q), n_max: u64) -> Result<ZCheck, ContinuumError> {
    let half = rat(1, 2);
    for (lo, hi) in [&d, &d_prime] {
        check_interval(lo, hi)?;
        if hi > &half {
            return Err(ContinuumError::Interval(lo.to_string(), hi.to_string()));
        }
    }
    let q = q_measure();
    let z = PiecewiseRationalFunction::indicator(d.0.clone(), d.1.clone(), Q::one())?
        .sub(&PiecewiseRationalFunction::indicator(d_prime.0.clone(), d_prime.1.clone(), Q::one())?)
        .add(&b_indicator(Q::from_integer((-m).into())));
    let a_end = a_n(m as u64).1;
    let pn_z = pn_expectations(&z, n_max);
    let tail_matches = (m.max(1)..=n_max as i64).all(|n| pn_z[n as usize - 1] == rat(-m, n));
    let head_bounded = (1..m.min(n_max as i64 + 1)).all(|n| pn_z[n as usize - 1] <= rat(n - 1 - m, n));
    Ok(ZCheck {
        m,
        q_d: q.prob(&d.0, &d.1),
        q_d_prime: q.prob(&d_prime.0, &d_prime.1),
        outside_a_m: d.0 >= a_end && d_prime.0 >= a_end,
        eq_z: expect(&q, &z),
        pn_z,
        tail_matches,
        head_bounded,
    })
}

/// The fixed choice `D = (3/8, 7/16)`, `D' = (5/16, 3/8)`, `m = 3`.
pub fn default_z_check(n_max: u64) -> ZCheck {
    z_check(3, (rat(3, 8), rat(7, 16)), (rat(5, 16), rat(3, 8)), n_max).expect("valid intervals")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pn_expectation_of_y() {
        let y = y_function();
        for n in 1..=100i64 {
            assert_eq!(expect(&p_n(n as u64), &y), rat(-2, n * (n + 1)), "n = {n}");
        }
    }

    #[test]
    fn normalization_and_q_of_w() {
        let one = PiecewiseRationalFunction::constant(Q::one());
        for n in [1, 2, 7, 40] {
            assert_eq!(expect(&p_n(n), &one), Q::one());
        }
        assert_eq!(expect(&q_measure(), &w_function()), rat(-1, 2));
    }

    #[test]
    fn truncated_rho() {
        let y = y_function();
        for n in [1i64, 2, 5, 30] {
            assert_eq!(rho_truncated(&y, n as u64).unwrap(), rat(-2, n * (n + 1)));
            assert_eq!(rho_truncated(&b_indicator(rat(-4, 1)), n as u64).unwrap(), rat(-4, n));
        }
        assert_eq!(rho_truncated(&PiecewiseRationalFunction::constant(Q::zero()), 9).unwrap(), Q::zero());
        assert_eq!(rho_truncated(&y, 0), Err(ContinuumError::Truncation));
    }

    #[test]
    fn bubble_table_closed_form() {
        let zero = PiecewiseRationalFunction::constant(Q::zero());
        let rows = bubble_table(&zero, &[1, 2, 3], &[1, 4, 9]).unwrap();
        assert_eq!(rows.len(), 9);
        for r in rows {
            assert_eq!(r.value, rat(-r.m, r.n as i64));
        }
    }

    #[test]
    fn kappa_rows_match_closed_form() {
        let rep = kappa_report(&[0, 1, 10], &[1, 2, 50]).unwrap();
        assert_eq!(rep.kappa_d, rat(-1, 2));
        for r in &rep.rows {
            assert_eq!(r.kappa, r.closed_form);
            assert!(r.kappa <= Q::zero());
        }
    }

    #[test]
    fn z_construction() {
        let z = default_z_check(200);
        assert!(z.holds(), "{z:?}");
        assert_eq!(z.q_d, rat(1, 8));
        // D' meets A_2 = (0, 1/3), so m = 2 is too small for this choice.
        let bad = z_check(2, (rat(3, 8), rat(7, 16)), (rat(5, 16), rat(3, 8)), 20).unwrap();
        assert!(!bad.outside_a_m);
    }

    #[test]
    fn piecewise_algebra() {
        let f = PiecewiseRationalFunction::indicator(rat(1, 4), rat(3, 4), rat(2, 1)).unwrap();
        assert_eq!(f.integrate(&Q::zero(), &Q::one()), Q::one());
        assert_eq!(f.eval(&rat(1, 2)), rat(2, 1));
        assert_eq!(f.eval(&rat(1, 8)), Q::zero());
        let g = f.sub(&f);
        assert_eq!(g, PiecewiseRationalFunction::constant(Q::zero()));
        let lin = PiecewiseRationalFunction::from_polynomial(Polynomial::new(vec![Q::zero(), Q::one()]).unwrap());
        let cube = lin.mul(&lin).unwrap().mul(&lin).unwrap();
        assert_eq!(cube.integrate(&Q::zero(), &Q::one()), rat(1, 4));
        assert!(matches!(cube.mul(&lin), Err(ContinuumError::Degree(4))));
        assert!(PiecewiseRationalFunction::indicator(rat(1, 2), rat(1, 4), Q::one()).is_err());
    }
}
