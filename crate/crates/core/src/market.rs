//! One-period markets on a finite robust model: no-arbitrage, martingale
//! measures, superhedging in primal and dual form, and the robust FTAP.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{independent_rows, rank, solve_square};
use crate::lp::{solve, LinearProgram, LpError, LpOutcome, Relation};
use crate::model::{ModelError, ProbabilityMeasure, QView, RandomVariable, RobustModel};
use crate::outcomes::OutcomeSet;
use crate::scalar::{dot, Extended, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MarketError {
    #[error("a market needs at least one asset")]
    NoAssets,
    #[error("market dimension mismatch: {0}")]
    Dimension(String),
    #[error("prices must be non-negative ({0})")]
    NegativePrice(String),
    #[error("no-arbitrage fails: strategy {witness} is an arbitrage")]
    Arbitrage { witness: Strategy<String> },
    #[error("the selected martingale set is empty")]
    NoMartingaleMeasure,
    #[error("vertex enumeration limited to {bound} non-polar outcomes, model has {actual}")]
    VertexBound { bound: usize, actual: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Holdings per asset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Strategy<T> {
    pub h: Vec<T>,
}

impl<T: fmt::Display> fmt::Display for Strategy<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.h.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl<T: Scalar> Strategy<T> {
    fn stringify(&self) -> Strategy<String> {
        Strategy {
            h: self.h.iter().map(|v| v.to_string()).collect(),
        }
    }
}

/// `d` assets with initial prices `s0` and terminal prices `s1[i][w]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketModel<T> {
    s0: Vec<T>,
    s1: Vec<Vec<T>>,
}

impl<T: Scalar> MarketModel<T> {
    pub fn new(s0: Vec<T>, s1: Vec<Vec<T>>) -> Result<Self, MarketError> {
        if s0.is_empty() {
            return Err(MarketError::NoAssets);
        }
        if s1.len() != s0.len() {
            return Err(MarketError::Dimension(format!(
                "{} initial prices but {} terminal price rows",
                s0.len(),
                s1.len()
            )));
        }
        let n = s1[0].len();
        if n == 0 || s1.iter().any(|r| r.len() != n) {
            return Err(MarketError::Dimension("terminal price rows differ in length".into()));
        }
        if let Some(i) = s0.iter().position(|v| v.is_neg()) {
            return Err(MarketError::NegativePrice(format!("initial price of asset {i}")));
        }
        for (i, row) in s1.iter().enumerate() {
            if let Some(w) = row.iter().position(|v| v.is_neg()) {
                return Err(MarketError::NegativePrice(format!("asset {i} at outcome {w}")));
            }
        }
        Ok(MarketModel { s0, s1 })
    }

    pub fn d(&self) -> usize {
        self.s0.len()
    }

    pub fn n(&self) -> usize {
        self.s1[0].len()
    }

    pub fn s0(&self) -> &[T] {
        &self.s0
    }

    pub fn s1(&self) -> &[Vec<T>] {
        &self.s1
    }

    /// `Delta S^i(w) = S_1^i(w) - S_0^i`.
    pub fn delta(&self, i: usize, w: usize) -> T {
        self.s1[i][w].clone() - self.s0[i].clone()
    }

    /// `(H Delta S)(w)` for every outcome.
    pub fn gains(&self, h: &[T]) -> Vec<T> {
        (0..self.n())
            .map(|w| (0..self.d()).fold(T::zero(), |acc, i| acc + h[i].clone() * self.delta(i, w)))
            .collect()
    }

    /// Market with the assets of `self` followed by those of `other`.
    pub fn extend(&self, other: &Self) -> Result<Self, MarketError> {
        let mut s0 = self.s0.clone();
        s0.extend(other.s0.iter().cloned());
        let mut s1 = self.s1.clone();
        s1.extend(other.s1.iter().cloned());
        Self::new(s0, s1)
    }

    pub fn submarket(&self, assets: &[usize]) -> Result<Self, MarketError> {
        Self::new(
            assets.iter().map(|&i| self.s0[i].clone()).collect(),
            assets.iter().map(|&i| self.s1[i].clone()).collect(),
        )
    }

    fn check_model(&self, model: &RobustModel<T>) -> Result<(), MarketError> {
        if model.n() != self.n() {
            return Err(MarketError::Dimension(format!(
                "market has {} outcomes, model has {}",
                self.n(),
                model.n()
            )));
        }
        Ok(())
    }

    /// Whether `R` is a martingale measure: `E_R[Delta S^i] = 0` for all `i`.
    pub fn is_martingale_measure(&self, r: &ProbabilityMeasure<T>) -> bool {
        (0..self.d()).all(|i| {
            let d: Vec<T> = (0..self.n()).map(|w| self.delta(i, w)).collect();
            r.expect(&d).is_zero_tol()
        })
    }

    /// Assets whose increments are linearly independent on `on`, chosen greedily.
    pub fn non_redundant_assets(&self, on: OutcomeSet) -> Vec<usize> {
        let rows: Vec<Vec<T>> = (0..self.d())
            .map(|i| on.iter().map(|w| self.delta(i, w)).collect())
            .collect();
        independent_rows(&rows)
    }
}

/// Which martingale measures a dual problem ranges over.
#[derive(Debug, Clone, PartialEq)]
pub enum MartingaleSelector<T> {
    /// All martingale measures absolutely continuous w.r.t. the upper probability.
    M,
    /// Measures equivalent to some martingale measure. Prices over this set
    /// coincide with prices over `M`, and members are produced from `M`.
    NaEquiv,
    /// Martingale measures dominated by a single prior.
    MDominated,
    /// Martingale measures equivalent to a prior.
    MEquivalent,
    /// Martingale measures equivalent to the given measure.
    MEquivalentTo(ProbabilityMeasure<T>),
}

impl<T> fmt::Display for MartingaleSelector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MartingaleSelector::M => "M",
            MartingaleSelector::NaEquiv => "NA",
            MartingaleSelector::MDominated => "M_ll",
            MartingaleSelector::MEquivalent => "M_eq",
            MartingaleSelector::MEquivalentTo(_) => "M_eq^Q",
        })
    }
}

/// A support pattern: `q` vanishes off `allowed` and is strictly positive on `positive`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pattern {
    allowed: OutcomeSet,
    positive: OutcomeSet,
}

/// Distinct unions of non-empty subfamilies of the given sets.
fn union_closure(sets: &[OutcomeSet]) -> Vec<OutcomeSet> {
    let mut out: Vec<OutcomeSet> = Vec::new();
    for s in sets {
        let mut grown: Vec<OutcomeSet> = out.iter().map(|u| u.union(*s)).collect();
        grown.push(*s);
        for g in grown {
            if !out.contains(&g) {
                out.push(g);
            }
        }
    }
    out.sort();
    out
}

fn patterns<T: Scalar>(model: &RobustModel<T>, selector: &MartingaleSelector<T>) -> Vec<Pattern> {
    let t = model.support_t();
    let prior_supports: Vec<OutcomeSet> = model.priors().iter().map(|p| p.support()).collect();
    let mut out: Vec<Pattern> = match selector {
        MartingaleSelector::M | MartingaleSelector::NaEquiv => vec![Pattern {
            allowed: t,
            positive: OutcomeSet::EMPTY,
        }],
        MartingaleSelector::MDominated => {
            if model.is_convex() {
                vec![Pattern {
                    allowed: t,
                    positive: OutcomeSet::EMPTY,
                }]
            } else {
                prior_supports
                    .iter()
                    .map(|&s| Pattern {
                        allowed: s,
                        positive: OutcomeSet::EMPTY,
                    })
                    .collect()
            }
        }
        MartingaleSelector::MEquivalent => {
            let supports = if model.is_convex() {
                union_closure(&prior_supports)
            } else {
                prior_supports
            };
            supports
                .into_iter()
                .map(|s| Pattern {
                    allowed: s,
                    positive: s,
                })
                .collect()
        }
        MartingaleSelector::MEquivalentTo(base) => {
            let s = base.support();
            if s.is_subset(t) {
                vec![Pattern {
                    allowed: s,
                    positive: s,
                }]
            } else {
                Vec::new()
            }
        }
    };
    let mut seen = Vec::new();
    out.retain(|p| {
        if seen.contains(p) {
            false
        } else {
            seen.push(*p);
            true
        }
    });
    out
}

/// Result of maximizing the smallest mass a martingale measure puts on a set.
#[derive(Debug, Clone, PartialEq)]
pub enum MaxMinMass<T> {
    /// No martingale measure vanishes off the allowed outcomes.
    Infeasible,
    /// Optimal measure and the optimal smallest mass `t*` (`None` when no
    /// positivity was requested).
    Optimal {
        measure: ProbabilityMeasure<T>,
        min_mass: Option<T>,
    },
}

/// `max t` over martingale measures `q` with `q = 0` off `allowed` and
/// `q(w) >= t` on `positive`. Some member is strictly positive on
/// `positive` iff `t* > 0`.
pub fn max_min_mass<T: Scalar>(
    s: &MarketModel<T>,
    allowed: OutcomeSet,
    positive: OutcomeSet,
) -> Result<MaxMinMass<T>, MarketError> {
    let cols: Vec<usize> = allowed.iter().filter(|&w| w < s.n()).collect();
    if cols.is_empty() || !positive.is_subset(allowed) {
        return Ok(MaxMinMass::Infeasible);
    }
    let k = cols.len();
    let use_t = !positive.is_empty();
    let nv = k + usize::from(use_t);
    let mut obj = vec![T::zero(); nv];
    if use_t {
        obj[k] = T::one();
    }
    let mut lp = LinearProgram::maximize(obj);
    for j in 0..k {
        lp.lower[j] = Some(T::zero());
    }
    let mut ones = vec![T::one(); k];
    ones.resize(nv, T::zero());
    lp.push_row(ones, Relation::Eq, T::one());
    for i in 0..s.d() {
        let mut row: Vec<T> = cols.iter().map(|&w| s.delta(i, w)).collect();
        row.resize(nv, T::zero());
        lp.push_row(row, Relation::Eq, T::zero());
    }
    if use_t {
        for (j, &w) in cols.iter().enumerate() {
            if positive.contains(w) {
                let mut row = vec![T::zero(); nv];
                row[j] = T::one();
                row[k] = -T::one();
                lp.push_row(row, Relation::Ge, T::zero());
            }
        }
    }
    match solve(&lp)? {
        LpOutcome::Infeasible { .. } => Ok(MaxMinMass::Infeasible),
        LpOutcome::Unbounded { .. } => unreachable!("masses are bounded by one"),
        LpOutcome::Optimal { primal, .. } => {
            let mut masses = vec![T::zero(); s.n()];
            for (j, &w) in cols.iter().enumerate() {
                masses[w] = primal[j].clone();
            }
            Ok(MaxMinMass::Optimal {
                measure: ProbabilityMeasure::new(masses)?,
                min_mass: use_t.then(|| primal[k].clone()),
            })
        }
    }
}

fn pattern_member<T: Scalar>(
    s: &MarketModel<T>,
    p: Pattern,
) -> Result<Option<(ProbabilityMeasure<T>, Option<T>)>, MarketError> {
    Ok(match max_min_mass(s, p.allowed, p.positive)? {
        MaxMinMass::Optimal { measure, min_mass } => match &min_mass {
            Some(t) if !t.is_pos() => None,
            _ => Some((measure, min_mass)),
        },
        MaxMinMass::Infeasible => None,
    })
}

/// Some member of the selected martingale set, if it is non-empty.
pub fn martingale_set_element<T: Scalar>(
    model: &RobustModel<T>,
    s: &MarketModel<T>,
    selector: &MartingaleSelector<T>,
) -> Result<Option<ProbabilityMeasure<T>>, MarketError> {
    s.check_model(model)?;
    for p in patterns(model, selector) {
        if let Some((q, _)) = pattern_member(s, p)? {
            return Ok(Some(q));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum PenaltyClass {
    Zero,
    Infinite,
}

/// Conjugate of the superhedging functional: 0 on martingale measures in
/// the model, `+inf` elsewhere.
pub fn conjugate_pi_classification<T: Scalar>(
    model: &RobustModel<T>,
    s: &MarketModel<T>,
    r: &ProbabilityMeasure<T>,
) -> PenaltyClass {
    let in_model = r.support().is_subset(model.support_t());
    if in_model && s.is_martingale_measure(r) {
        PenaltyClass::Zero
    } else {
        PenaltyClass::Infinite
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NaCheck<T> {
    pub holds: bool,
    /// Arbitrage strategy with gains `>= 0` on `T` and `> 0` at `outcome`.
    pub witness: Option<Strategy<T>>,
    pub outcome: Option<usize>,
}

fn na_on<T: Scalar>(s: &MarketModel<T>, on: OutcomeSet) -> Result<NaCheck<T>, MarketError> {
    let d = s.d();
    for w in on.iter() {
        let obj: Vec<T> = (0..d).map(|i| s.delta(i, w)).collect();
        let mut lp = LinearProgram::maximize(obj);
        for i in 0..d {
            lp.lower[i] = Some(-T::one());
            lp.upper[i] = Some(T::one());
        }
        for v in on.iter() {
            lp.push_row((0..d).map(|i| s.delta(i, v)).collect(), Relation::Ge, T::zero());
        }
        match solve(&lp)? {
            LpOutcome::Optimal { primal, objective, .. } => {
                if objective.is_pos() {
                    return Ok(NaCheck {
                        holds: false,
                        witness: Some(Strategy { h: primal }),
                        outcome: Some(w),
                    });
                }
            }
            _ => unreachable!("H = 0 is feasible and the box keeps the program bounded"),
        }
    }
    Ok(NaCheck {
        holds: true,
        witness: None,
        outcome: None,
    })
}

/// NA(P, S) via one LP per non-polar outcome: maximize the gain there over
/// strategies in `[-1, 1]^d` whose gains are non-negative on `T`.
pub fn check_na_geometric<T: Scalar>(model: &RobustModel<T>, s: &MarketModel<T>) -> Result<NaCheck<T>, MarketError> {
    s.check_model(model)?;
    na_on(s, model.support_t())
}

/// NA(Q, S) for a single measure.
pub fn check_na_for_measure<T: Scalar>(s: &MarketModel<T>, q: &ProbabilityMeasure<T>) -> Result<NaCheck<T>, MarketError> {
    na_on(s, q.support())
}

#[derive(Debug, Clone, PartialEq)]
pub struct HedgeResult<T> {
    /// `-inf` when arbitrarily cheap hedges exist.
    pub price: Extended<T>,
    /// An attaining strategy when the price is finite.
    pub strategy: Option<Strategy<T>>,
}

/// `min r` s.t. `r + (H Delta S)(w) >= X(w)` on `on`; with `sub`, the mirror
/// problem `max r` s.t. `r + (H Delta S)(w) <= X(w)`.
fn hedge_lp<T: Scalar>(s: &MarketModel<T>, x: &[T], on: OutcomeSet, sub: bool) -> Result<HedgeResult<T>, MarketError> {
    let d = s.d();
    let mut obj = vec![T::zero(); d + 1];
    obj[0] = T::one();
    let mut lp = if sub {
        LinearProgram::maximize(obj)
    } else {
        LinearProgram::minimize(obj)
    };
    let rel = if sub { Relation::Le } else { Relation::Ge };
    for w in on.iter() {
        let mut row = vec![T::one()];
        row.extend((0..d).map(|i| s.delta(i, w)));
        lp.push_row(row, rel, x[w].clone());
    }
    Ok(match solve(&lp)? {
        LpOutcome::Optimal { primal, objective, .. } => HedgeResult {
            price: Extended::Finite(objective),
            strategy: Some(Strategy { h: primal[1..].to_vec() }),
        },
        LpOutcome::Unbounded { .. } => HedgeResult {
            price: if sub { Extended::PosInf } else { Extended::NegInf },
            strategy: None,
        },
        LpOutcome::Infeasible { .. } => unreachable!("large r is always feasible"),
    })
}

/// Superhedging price `pi(X|S)` with an optimal strategy.
pub fn superhedge<T: Scalar>(
    model: &RobustModel<T>,
    s: &MarketModel<T>,
    x: &RandomVariable<T>,
) -> Result<HedgeResult<T>, MarketError> {
    s.check_model(model)?;
    hedge_lp(s, x.values(), model.support_t(), false)
}

/// Subhedging price: the largest `r` with `r + H Delta S <= X` on `T`.
pub fn subhedge<T: Scalar>(
    model: &RobustModel<T>,
    s: &MarketModel<T>,
    x: &RandomVariable<T>,
) -> Result<HedgeResult<T>, MarketError> {
    s.check_model(model)?;
    hedge_lp(s, x.values(), model.support_t(), true)
}

/// `pi^Q(X|S)`: hedging only required on `S(Q)`.
pub fn superhedge_q<T: Scalar>(
    model: &RobustModel<T>,
    s: &MarketModel<T>,
    q: &QView<T>,
    x: &RandomVariable<T>,
) -> Result<HedgeResult<T>, MarketError> {
    s.check_model(model)?;
    model.qview(q.measure().clone())?;
    hedge_lp(s, x.values(), q.support(), false)
}

/// `pi^Q_E(X|S) = inf { pi(Y|S) : j_Q(Y) = j_Q(X) }`, solved jointly over
/// `(r, H, Y)` with `Y` free on the non-polar outcomes outside `S(Q)`.
pub fn superhedge_localized_e<T: Scalar>(
    model: &RobustModel<T>,
    s: &MarketModel<T>,
    q: &QView<T>,
    x: &RandomVariable<T>,
) -> Result<Extended<T>, MarketError> {
    s.check_model(model)?;
    model.qview(q.measure().clone())?;
    let d = s.d();
    let free: Vec<usize> = model.support_t().difference(q.support()).iter().collect();
    let nv = 1 + d + free.len();
    let mut obj = vec![T::zero(); nv];
    obj[0] = T::one();
    let mut lp = LinearProgram::minimize(obj);
    for w in model.support_t().iter() {
        let mut row = vec![T::one()];
        row.extend((0..d).map(|i| s.delta(i, w)));
        row.resize(nv, T::zero());
        let rhs = match free.iter().position(|&v| v == w) {
            Some(k) => {
                row[1 + d + k] = -T::one();
                T::zero()
            }
            None => x.get(w).clone(),
        };
        lp.push_row(row, Relation::Ge, rhs);
    }
    Ok(match solve(&lp)? {
        LpOutcome::Optimal { objective, .. } => Extended::Finite(objective),
        LpOutcome::Unbounded { .. } => Extended::NegInf,
        LpOutcome::Infeasible { .. } => unreachable!("large r is always feasible"),
    })
}

fn max_expectation<T: Scalar>(
    s: &MarketModel<T>,
    allowed: OutcomeSet,
    x: &[T],
    maximize: bool,
) -> Result<Option<T>, MarketError> {
    let cols: Vec<usize> = allowed.iter().collect();
    if cols.is_empty() {
        return Ok(None);
    }
    let obj: Vec<T> = cols.iter().map(|&w| x[w].clone()).collect();
    let mut lp = if maximize {
        LinearProgram::maximize(obj)
    } else {
        LinearProgram::minimize(obj)
    }
    .nonnegative();
    lp.push_row(vec![T::one(); cols.len()], Relation::Eq, T::one());
    for i in 0..s.d() {
        lp.push_row(cols.iter().map(|&w| s.delta(i, w)).collect(), Relation::Eq, T::zero());
    }
    Ok(match solve(&lp)? {
        LpOutcome::Optimal { objective, .. } => Some(objective),
        LpOutcome::Infeasible { .. } => None,
        LpOutcome::Unbounded { .. } => unreachable!("bounded over the simplex"),
    })
}

/// `pi^Q_D(X|S) = sup { E_R[X] : R martingale, R << Q }`, `-inf` if no such R.
pub fn superhedge_localized_d<T: Scalar>(
    model: &RobustModel<T>,
    s: &MarketModel<T>,
    q: &QView<T>,
    x: &RandomVariable<T>,
) -> Result<Extended<T>, MarketError> {
    s.check_model(model)?;
    model.qview(q.measure().clone())?;
    Ok(max_expectation(s, q.support(), x.values(), true)?.map_or(Extended::NegInf, Extended::Finite))
}

/// `sup E_q[X]` over the selected martingale set. For equivalence-type
/// selectors the supremum over each support pattern is taken over its
/// closure, which is exact once the pattern is known to be non-empty.
pub fn superhedge_dual<T: Scalar>(
    model: &RobustModel<T>,
    s: &MarketModel<T>,
    x: &RandomVariable<T>,
    selector: &MartingaleSelector<T>,
) -> Result<T, MarketError> {
    s.check_model(model)?;
    let mut best: Option<T> = None;
    for p in patterns(model, selector) {
        if !p.positive.is_empty() && pattern_member(s, p)?.is_none() {
            continue;
        }
        if let Some(v) = max_expectation(s, p.allowed, x.values(), true)? {
            best = Some(match best {
                None => v,
                Some(b) => T::max_of(b, v),
            });
        }
    }
    best.ok_or(MarketError::NoMartingaleMeasure)
}

/// `inf E_q[X]` over martingale measures in the model.
pub fn subhedge_dual<T: Scalar>(
    model: &RobustModel<T>,
    s: &MarketModel<T>,
    x: &RandomVariable<T>,
) -> Result<T, MarketError> {
    s.check_model(model)?;
    max_expectation(s, model.support_t(), x.values(), false)?.ok_or(MarketError::NoMartingaleMeasure)
}

/// A single prior mixture that inherits no-arbitrage: the uniform mixture,
/// whose support is `T`, with NA re-verified for it.
pub fn consistent_mixture<T: Scalar>(
    model: &RobustModel<T>,
    s: &MarketModel<T>,
) -> Result<ProbabilityMeasure<T>, MarketError> {
    let na = check_na_geometric(model, s)?;
    if let Some(w) = na.witness {
        return Err(MarketError::Arbitrage { witness: w.stringify() });
    }
    let p = model.find_dominating_measure();
    let single = check_na_for_measure(s, &p)?;
    if let Some(w) = single.witness {
        return Err(MarketError::Arbitrage { witness: w.stringify() });
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriorDomination<T> {
    pub prior: usize,
    /// Member of the selected set dominating the prior, if any.
    pub member: Option<ProbabilityMeasure<T>>,
    /// Optimal smallest mass on the prior's support over the best pattern.
    pub min_mass: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FtapReport<T> {
    pub selector: String,
    pub na: NaCheck<T>,
    pub per_prior: Vec<PriorDomination<T>>,
    /// Every prior is dominated by a member of the selected set.
    pub dominated: bool,
    /// The selector meets the theorem's hypotheses for this model.
    pub hypotheses_hold: bool,
}

impl<T> FtapReport<T> {
    /// No-arbitrage and domination agree.
    pub fn consistent(&self) -> bool {
        self.na.holds == self.dominated
    }
}

/// Member of the selected set with `P << Q`, maximizing the smallest mass on
/// `S(P)` across the selector's support patterns.
pub fn dominating_member<T: Scalar>(
    model: &RobustModel<T>,
    s: &MarketModel<T>,
    selector: &MartingaleSelector<T>,
    p: &ProbabilityMeasure<T>,
) -> Result<PriorDomination<T>, MarketError> {
    s.check_model(model)?;
    let sp = p.support();
    let mut best: Option<(ProbabilityMeasure<T>, T)> = None;
    for pat in patterns(model, selector) {
        if !sp.is_subset(pat.allowed) {
            continue;
        }
        if let MaxMinMass::Optimal { measure, min_mass: Some(t) } =
            max_min_mass(s, pat.allowed, pat.positive.union(sp))?
        {
            if best.as_ref().map_or(true, |(_, bt)| t > *bt) {
                best = Some((measure, t));
            }
        }
    }
    Ok(match best {
        Some((q, t)) if t.is_pos() => PriorDomination {
            prior: 0,
            member: Some(q),
            min_mass: Some(t),
        },
        Some((_, t)) => PriorDomination {
            prior: 0,
            member: None,
            min_mass: Some(t),
        },
        None => PriorDomination {
            prior: 0,
            member: None,
            min_mass: None,
        },
    })
}

/// Checks both directions of the robust FTAP for the chosen selector.
pub fn ftap_check<T: Scalar>(
    model: &RobustModel<T>,
    s: &MarketModel<T>,
    selector: &MartingaleSelector<T>,
) -> Result<FtapReport<T>, MarketError> {
    let na = check_na_geometric(model, s)?;
    let mut per_prior = Vec::new();
    for (k, p) in model.priors().iter().enumerate() {
        let mut dom = dominating_member(model, s, selector, p)?;
        dom.prior = k;
        per_prior.push(dom);
    }
    let dominated = per_prior.iter().all(|d| d.member.is_some());
    let hypotheses_hold = match selector {
        MartingaleSelector::M | MartingaleSelector::NaEquiv => true,
        MartingaleSelector::MDominated | MartingaleSelector::MEquivalent => model.is_convex(),
        MartingaleSelector::MEquivalentTo(_) => false,
    };
    Ok(FtapReport {
        selector: selector.to_string(),
        na,
        per_prior,
        dominated,
        hypotheses_hold,
    })
}

/// Outcomes charged by some martingale measure in the model.
pub fn martingale_support_union<T: Scalar>(
    model: &RobustModel<T>,
    s: &MarketModel<T>,
) -> Result<OutcomeSet, MarketError> {
    s.check_model(model)?;
    let mut out = OutcomeSet::EMPTY;
    for w in model.support_t().iter() {
        let mut ind = vec![T::zero(); s.n()];
        ind[w] = T::one();
        if let Some(v) = max_expectation(s, model.support_t(), &ind, true)? {
            if v.is_pos() {
                out = out.with(w);
            }
        }
    }
    Ok(out)
}

pub const DEFAULT_VERTEX_BOUND: usize = 12;

/// Vertices of `{q >= 0, sum q = 1, E_q[Delta S] = 0, q = 0 off T}` by basis
/// enumeration, after discarding assets that are linearly redundant on `T`.
pub fn martingale_polytope_vertices<T: Scalar>(
    model: &RobustModel<T>,
    s: &MarketModel<T>,
    bound: usize,
) -> Result<Vec<ProbabilityMeasure<T>>, MarketError> {
    s.check_model(model)?;
    let t: Vec<usize> = model.support_t().iter().collect();
    if t.len() > bound {
        return Err(MarketError::VertexBound {
            bound,
            actual: t.len(),
        });
    }
    let assets = s.non_redundant_assets(model.support_t());
    let mut system: Vec<Vec<T>> = vec![vec![T::one(); t.len()]];
    let mut rhs = vec![T::one()];
    for &i in &assets {
        system.push(t.iter().map(|&w| s.delta(i, w)).collect());
        rhs.push(T::zero());
    }
    let keep = independent_rows(&system);
    let a: Vec<Vec<T>> = keep.iter().map(|&r| system[r].clone()).collect();
    let b: Vec<T> = keep.iter().map(|&r| rhs[r].clone()).collect();
    let r = rank(&a);
    let mut out: Vec<ProbabilityMeasure<T>> = Vec::new();
    for basis in itertools::Itertools::combinations(0..t.len(), r) {
        let sq: Vec<Vec<T>> = a.iter().map(|row| basis.iter().map(|&c| row[c].clone()).collect()).collect();
        let Some(sol) = solve_square(&sq, &b) else {
            continue;
        };
        if sol.iter().any(|v| v.is_neg()) {
            continue;
        }
        let mut masses = vec![T::zero(); s.n()];
        for (&c, v) in basis.iter().zip(sol) {
            masses[t[c]] = v;
        }
        // Rows dropped as dependent must still hold.
        let full_ok = system
            .iter()
            .zip(&rhs)
            .all(|(row, bi)| dot(row, &t.iter().map(|&w| masses[w].clone()).collect::<Vec<_>>()).approx_eq(bi));
        if !full_ok {
            continue;
        }
        let q = ProbabilityMeasure::new(masses)?;
        if !out.contains(&q) {
            out.push(q);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationRow<T> {
    pub grid_points: usize,
    pub min_mass: T,
}

/// Finite truncations of the atomic-selector construction on `[0, 1]`:
/// outcomes `k/K`, a single asset with `S_0 = 1/2` and `S_1(w) = w`, Dirac
/// priors at every grid point plus the uniform grid measure standing in for
/// Lebesgue measure. Each row reports the best smallest mass a martingale
/// measure can put on every grid point. It stays positive at each finite
/// truncation but vanishes as the grid is refined, which is where domination
/// of the diffuse prior breaks down in the limit.
pub fn atomic_selector_truncation<T: Scalar>(grids: &[usize]) -> Result<Vec<TruncationRow<T>>, MarketError> {
    let mut rows = Vec::new();
    for &k in grids {
        let n = k + 1;
        let s = MarketModel::new(
            vec![T::from_ratio(1, 2)],
            vec![(0..n).map(|i| T::from_ratio(i as i64, k as i64)).collect()],
        )?;
        let mut priors: Vec<ProbabilityMeasure<T>> = (0..n).map(|i| ProbabilityMeasure::dirac(n, i)).collect();
        priors.push(ProbabilityMeasure::uniform(n));
        let model = RobustModel::new(priors)?;
        let diffuse = model.priors()[n].clone();
        let dom = dominating_member(&model, &s, &MartingaleSelector::M, &diffuse)?;
        rows.push(TruncationRow {
            grid_points: n,
            min_mass: dom.min_mass.unwrap_or_else(T::zero),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use num_rational::BigRational;

    type Q = BigRational;
    type P = ProbabilityMeasure<Q>;

    fn pm(v: &[(i64, i64)]) -> P {
        P::new(v.iter().map(|&(a, b)| rat(a, b)).collect()).unwrap()
    }

    fn binomial() -> (RobustModel<Q>, MarketModel<Q>) {
        let m = RobustModel::new(vec![P::uniform(2)]).unwrap();
        let s = MarketModel::new(vec![rat(1, 1)], vec![vec![rat(2, 1), rat(1, 2)]]).unwrap();
        (m, s)
    }

    fn rv(m: &RobustModel<Q>, v: &[(i64, i64)]) -> RandomVariable<Q> {
        m.rv(v.iter().map(|&(a, b)| rat(a, b)).collect()).unwrap()
    }

    #[test]
    fn geometric_na() {
        let (m, s) = binomial();
        assert!(check_na_geometric(&m, &s).unwrap().holds);

        let arb = MarketModel::new(vec![rat(1, 1)], vec![vec![rat(2, 1), rat(1, 1)]]).unwrap();
        let res = check_na_geometric(&m, &arb).unwrap();
        assert!(!res.holds);
        assert_eq!(res.witness.unwrap().h, vec![rat(1, 1)]);
        assert_eq!(res.outcome, Some(0));

        let dup = s.extend(&s).unwrap();
        assert!(check_na_geometric(&m, &dup).unwrap().holds);
        let dup_arb = arb.extend(&arb).unwrap();
        assert!(!check_na_geometric(&m, &dup_arb).unwrap().holds);
    }

    #[test]
    fn martingale_elements() {
        let (m, s) = binomial();
        for sel in [
            MartingaleSelector::M,
            MartingaleSelector::NaEquiv,
            MartingaleSelector::MDominated,
            MartingaleSelector::MEquivalent,
            MartingaleSelector::MEquivalentTo(P::uniform(2)),
        ] {
            let q = martingale_set_element(&m, &s, &sel).unwrap().unwrap();
            assert_eq!(q, pm(&[(1, 3), (2, 3)]), "selector {sel}");
        }
        let none = martingale_set_element(&m, &s, &MartingaleSelector::MEquivalentTo(P::dirac(2, 0))).unwrap();
        assert!(none.is_none());

        // Strictly positive gains everywhere leave no martingale measure at all.
        let strong = MarketModel::new(vec![rat(1, 1)], vec![vec![rat(2, 1), rat(3, 1)]]).unwrap();
        for sel in [MartingaleSelector::M, MartingaleSelector::MDominated, MartingaleSelector::MEquivalent] {
            assert!(martingale_set_element(&m, &strong, &sel).unwrap().is_none());
        }
        assert!(martingale_polytope_vertices(&m, &strong, 12).unwrap().is_empty());
    }

    #[test]
    fn weak_arbitrage_keeps_degenerate_martingale_measures() {
        let (m, _) = binomial();
        let arb = MarketModel::new(vec![rat(1, 1)], vec![vec![rat(2, 1), rat(1, 1)]]).unwrap();
        assert_eq!(
            martingale_set_element(&m, &arb, &MartingaleSelector::M).unwrap(),
            Some(P::dirac(2, 1))
        );
        assert!(martingale_set_element(&m, &arb, &MartingaleSelector::MEquivalent)
            .unwrap()
            .is_none());
    }

    #[test]
    fn penalty_classification() {
        let (m, s) = binomial();
        assert_eq!(conjugate_pi_classification(&m, &s, &pm(&[(1, 3), (2, 3)])), PenaltyClass::Zero);
        assert_eq!(conjugate_pi_classification(&m, &s, &P::uniform(2)), PenaltyClass::Infinite);
        let flat = MarketModel::new(vec![rat(1, 1)], vec![vec![rat(1, 1), rat(1, 1)]]).unwrap();
        assert_eq!(conjugate_pi_classification(&m, &flat, &P::dirac(2, 0)), PenaltyClass::Zero);
    }

    #[test]
    fn superhedging_examples() {
        let (m, s) = binomial();
        let c = m.constant(rat(7, 2));
        let res = superhedge(&m, &s, &c).unwrap();
        assert_eq!(res.price, Extended::Finite(rat(7, 2)));
        assert_eq!(res.strategy.unwrap().h, vec![rat(0, 1)]);

        let x = rv(&m, &[(1, 1), (0, 1)]);
        let res = superhedge(&m, &s, &x).unwrap();
        assert_eq!(res.price, Extended::Finite(rat(1, 3)));
        assert_eq!(res.strategy.unwrap().h, vec![rat(2, 3)]);
        for sel in [MartingaleSelector::M, MartingaleSelector::MDominated, MartingaleSelector::MEquivalent] {
            assert_eq!(superhedge_dual(&m, &s, &x, &sel).unwrap(), rat(1, 3));
        }
        assert_eq!(subhedge(&m, &s, &x).unwrap().price, Extended::Finite(rat(1, 3)));

        let h = [rat(3, 1)];
        let replicable = m.rv(s.gains(&h)).unwrap();
        assert_eq!(superhedge(&m, &s, &replicable).unwrap().price, Extended::Finite(rat(0, 1)));
    }

    #[test]
    fn localized_superhedging() {
        let (m, s) = binomial();
        let x = rv(&m, &[(1, 1), (0, 1)]);
        let up = m.qview(P::dirac(2, 0)).unwrap();
        // Only the up-state must be covered: r + H = 1 with H free gives
        // arbitrarily low r.
        let pq = superhedge_q(&m, &s, &up, &x).unwrap();
        assert_eq!(pq.price, Extended::NegInf);
        assert_eq!(superhedge_localized_e(&m, &s, &up, &x).unwrap(), Extended::NegInf);
        assert_eq!(superhedge_localized_d(&m, &s, &up, &x).unwrap(), Extended::NegInf);

        let full = m.qview(P::uniform(2)).unwrap();
        assert_eq!(superhedge_q(&m, &s, &full, &x).unwrap().price, Extended::Finite(rat(1, 3)));
        assert_eq!(superhedge_localized_e(&m, &s, &full, &x).unwrap(), Extended::Finite(rat(1, 3)));
        assert_eq!(superhedge_localized_d(&m, &s, &full, &x).unwrap(), Extended::Finite(rat(1, 3)));

        // Flat asset on the support of Q: price is the maximum of X there.
        let m3 = RobustModel::new(vec![P::uniform(3)]).unwrap();
        let s3 = MarketModel::new(vec![rat(1, 1)], vec![vec![rat(1, 1), rat(1, 1), rat(3, 1)]]).unwrap();
        let q = m3.qview(P::uniform_on(3, OutcomeSet::from_indices([0, 1]))).unwrap();
        let x3 = rv(&m3, &[(2, 1), (5, 1), (9, 1)]);
        assert_eq!(superhedge_q(&m3, &s3, &q, &x3).unwrap().price, Extended::Finite(rat(5, 1)));
    }

    #[test]
    fn mixture_and_ftap() {
        let m = RobustModel::new(vec![P::dirac(2, 0), P::dirac(2, 1)]).unwrap();
        let s = binomial().1;
        assert_eq!(consistent_mixture(&m, &s).unwrap(), P::uniform(2));
        let single = RobustModel::new(vec![pm(&[(1, 4), (3, 4)])]).unwrap();
        assert_eq!(consistent_mixture(&single, &s).unwrap(), pm(&[(1, 4), (3, 4)]));
        let arb = MarketModel::new(vec![rat(1, 1)], vec![vec![rat(2, 1), rat(1, 1)]]).unwrap();
        assert!(matches!(consistent_mixture(&m, &arb), Err(MarketError::Arbitrage { .. })));

        let rep = ftap_check(&m, &s, &MartingaleSelector::M).unwrap();
        assert!(rep.na.holds && rep.dominated && rep.consistent());
        for d in &rep.per_prior {
            assert_eq!(d.member.as_ref().unwrap(), &pm(&[(1, 3), (2, 3)]));
        }
        let rep = ftap_check(&m, &arb, &MartingaleSelector::M).unwrap();
        assert!(!rep.na.holds && !rep.dominated && rep.consistent());
    }

    #[test]
    fn incomplete_trinomial_has_a_spread() {
        let m = RobustModel::new(vec![P::uniform(3)]).unwrap();
        let s = MarketModel::new(vec![rat(1, 1)], vec![vec![rat(2, 1), rat(1, 1), rat(1, 2)]]).unwrap();
        let x = rv(&m, &[(0, 1), (1, 1), (0, 1)]);
        let verts = martingale_polytope_vertices(&m, &s, 12).unwrap();
        assert_eq!(verts.len(), 2);
        let values: Vec<Q> = verts.iter().map(|v| v.expect(x.values())).collect();
        let hi = values.iter().max().unwrap().clone();
        let lo = values.iter().min().unwrap().clone();
        assert_eq!(superhedge(&m, &s, &x).unwrap().price, Extended::Finite(hi.clone()));
        assert_eq!(subhedge(&m, &s, &x).unwrap().price, Extended::Finite(lo.clone()));
        assert_eq!(subhedge_dual(&m, &s, &x).unwrap(), lo);
        assert!(lo < hi);
    }

    #[test]
    fn polytope_vertices_examples() {
        let (m, s) = binomial();
        assert_eq!(martingale_polytope_vertices(&m, &s, 12).unwrap(), vec![pm(&[(1, 3), (2, 3)])]);
        let m3 = RobustModel::new(vec![P::uniform(3)]).unwrap();
        let flat = MarketModel::new(vec![rat(2, 1)], vec![vec![rat(2, 1); 3]]).unwrap();
        let v = martingale_polytope_vertices(&m3, &flat, 12).unwrap();
        assert_eq!(v.len(), 3);
        assert!((0..3).all(|i| v.contains(&P::dirac(3, i))));
        assert!(matches!(
            martingale_polytope_vertices(&m3, &flat, 2),
            Err(MarketError::VertexBound { bound: 2, actual: 3 })
        ));
    }

    #[test]
    fn atomic_truncation_mass_vanishes() {
        let rows = atomic_selector_truncation::<Q>(&[2, 4, 8, 16]).unwrap();
        for r in &rows {
            assert_eq!(r.min_mass, rat(1, r.grid_points as i64));
        }
    }

    #[test]
    fn market_validation() {
        assert!(matches!(MarketModel::<Q>::new(vec![], vec![]), Err(MarketError::NoAssets)));
        assert!(matches!(
            MarketModel::new(vec![rat(-1, 1)], vec![vec![rat(1, 1)]]),
            Err(MarketError::NegativePrice(_))
        ));
        assert!(matches!(
            MarketModel::new(vec![rat(1, 1)], vec![vec![rat(1, 1)], vec![rat(1, 1)]]),
            Err(MarketError::Dimension(_))
        ));
    }
}
