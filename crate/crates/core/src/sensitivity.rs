//! Sensitivity to the priors: projections of sets and families, coherent
//! families and their aggregators, stability under aggregation, and the
//! primal localization `f^Q_E` of a max-affine function.

use serde::Serialize;
use thiserror::Error;

use crate::model::{ModelError, QView, RandomVariable, RobustModel};
use crate::outcomes::OutcomeSet;
use crate::risk::MaxAffineRiskMeasure;
use crate::scalar::{Extended, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SensitivityError {
    #[error("family entry {index}: {source}")]
    Model {
        index: usize,
        #[source]
        source: ModelError,
    },
    #[error("family is empty")]
    EmptyFamily,
    #[error("candidate does not project onto entry {index} of the family")]
    NotAnAggregator { index: usize },
    #[error("exhaustive search needs {needed} steps, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
}

/// Finite family `(X^Q)_Q` indexed by measures absolutely continuous w.r.t.
/// the upper probability. Entry order is significant: it fixes tie-breaking.
#[derive(Debug, Clone, PartialEq)]
pub struct RvFamily<T> {
    entries: Vec<(QView<T>, RandomVariable<T>)>,
}

impl<T: Scalar> RvFamily<T> {
    pub fn new(model: &RobustModel<T>, entries: Vec<(QView<T>, RandomVariable<T>)>) -> Result<Self, SensitivityError> {
        if entries.is_empty() {
            return Err(SensitivityError::EmptyFamily);
        }
        for (index, (q, x)) in entries.iter().enumerate() {
            model
                .qview(q.measure().clone())
                .map_err(|source| SensitivityError::Model { index, source })?;
            if x.len() != model.n() {
                return Err(SensitivityError::Model {
                    index,
                    source: ModelError::Dimension {
                        expected: model.n(),
                        actual: x.len(),
                    },
                });
            }
        }
        Ok(RvFamily { entries })
    }

    /// The family `(j_Q(X))_Q` obtained by projecting a single variable.
    pub fn projected(model: &RobustModel<T>, qs: &[QView<T>], x: &RandomVariable<T>) -> Result<Self, SensitivityError> {
        Self::new(model, qs.iter().map(|q| (q.clone(), x.clone())).collect())
    }

    pub fn entries(&self) -> &[(QView<T>, RandomVariable<T>)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn covered(&self) -> OutcomeSet {
        self.entries
            .iter()
            .fold(OutcomeSet::EMPTY, |acc, (q, _)| acc.union(q.support()))
    }
}

/// A finite set of random variables, canonical and without duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteRvSet<T> {
    members: Vec<RandomVariable<T>>,
}

impl<T: Scalar> FiniteRvSet<T> {
    pub fn new(members: Vec<RandomVariable<T>>) -> Self {
        let mut out: Vec<RandomVariable<T>> = Vec::with_capacity(members.len());
        for m in members {
            if !out.contains(&m) {
                out.push(m);
            }
        }
        FiniteRvSet { members: out }
    }

    pub fn members(&self) -> &[RandomVariable<T>] {
        &self.members
    }

    pub fn contains(&self, x: &RandomVariable<T>) -> bool {
        self.members.contains(x)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn intersection(&self, other: &Self) -> Self {
        FiniteRvSet::new(self.members.iter().filter(|m| other.contains(m)).cloned().collect())
    }
}

/// `j_Q(X) in j_Q(C)`: some member agrees with `X` on `S(Q)`.
pub fn jq_member<T: Scalar>(x: &RandomVariable<T>, c: &FiniteRvSet<T>, q: &QView<T>) -> bool {
    c.members.iter().any(|y| y.agrees_on(x, q.support()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Coherence<T> {
    /// Patchwork aggregator; outcomes no support covers are set to 0.
    Aggregator(RandomVariable<T>),
    /// Entries `first < second` disagree at `outcome`, which both supports contain.
    Conflict {
        first: usize,
        second: usize,
        outcome: usize,
    },
}

impl<T> Coherence<T> {
    pub fn aggregator(&self) -> Option<&RandomVariable<T>> {
        match self {
            Coherence::Aggregator(x) => Some(x),
            Coherence::Conflict { .. } => None,
        }
    }
}

/// Builds an aggregator by patching entry values outcome by outcome; the
/// lowest-index entry covering an outcome supplies its value.
pub fn is_coherent<T: Scalar>(model: &RobustModel<T>, family: &RvFamily<T>) -> Coherence<T> {
    let n = model.n();
    let mut values = vec![T::zero(); n];
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for (k, (q, x)) in family.entries.iter().enumerate() {
        for w in q.support().iter() {
            match owner[w] {
                None => {
                    owner[w] = Some(k);
                    values[w] = x.get(w).clone();
                }
                Some(first) => {
                    if !values[w].approx_eq(x.get(w)) {
                        return Coherence::Conflict {
                            first,
                            second: k,
                            outcome: w,
                        };
                    }
                }
            }
        }
    }
    Coherence::Aggregator(model.rv(values).expect("length matches the model"))
}

pub fn is_aggregator<T: Scalar>(family: &RvFamily<T>, x: &RandomVariable<T>) -> Result<(), SensitivityError> {
    for (index, (q, xq)) in family.entries.iter().enumerate() {
        if !x.agrees_on(xq, q.support()) {
            return Err(SensitivityError::NotAnAggregator { index });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AggregatorKind {
    /// Equal to the entry with this index as an equivalence class.
    Trivial(usize),
    NonTrivial,
}

pub fn classify_aggregator<T: Scalar>(
    family: &RvFamily<T>,
    x: &RandomVariable<T>,
) -> Result<AggregatorKind, SensitivityError> {
    is_aggregator(family, x)?;
    Ok(family
        .entries
        .iter()
        .position(|(_, xq)| xq == x)
        .map_or(AggregatorKind::NonTrivial, AggregatorKind::Trivial))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stability<T> {
    pub stable: bool,
    /// Aggregators of coherent selections that fall outside the set, in
    /// discovery order and without duplicates.
    pub witnesses: Vec<RandomVariable<T>>,
    pub selections_checked: u64,
    pub coherent_selections: u64,
}

impl<T> Stability<T> {
    pub fn witness(&self) -> Option<&RandomVariable<T>> {
        self.witnesses.first()
    }
}

/// Default number of (selection, aggregator) pairs `is_q_stable` may visit.
pub const DEFAULT_STABILITY_BUDGET: u128 = 1 << 20;

/// Exhaustive check that every aggregator of every coherent selection
/// `(Y_Q)_Q` from `C` lies in `C`.
///
/// Aggregators are unique on the covered outcomes; on non-polar outcomes no
/// measure in `qset` charges they range over the values members of `C` take
/// there. The work is `|C|^|qset|` selections times the size of that grid,
/// and must fit in `budget`.
pub fn is_q_stable<T: Scalar>(
    model: &RobustModel<T>,
    c: &FiniteRvSet<T>,
    qset: &[QView<T>],
    budget: u128,
) -> Result<Stability<T>, SensitivityError> {
    for (index, q) in qset.iter().enumerate() {
        model
            .qview(q.measure().clone())
            .map_err(|source| SensitivityError::Model { index, source })?;
    }
    let k = qset.len();
    let size = c.len() as u128;
    let covered = qset.iter().fold(OutcomeSet::EMPTY, |acc, q| acc.union(q.support()));
    let free: Vec<usize> = model.support_t().difference(covered).iter().collect();
    let grid: Vec<Vec<T>> = free
        .iter()
        .map(|&w| {
            let mut vals: Vec<T> = Vec::new();
            for m in &c.members {
                if !vals.iter().any(|v| v.approx_eq(m.get(w))) {
                    vals.push(m.get(w).clone());
                }
            }
            vals
        })
        .collect();
    let grid_size = grid.iter().fold(1u128, |acc, g| acc.saturating_mul(g.len() as u128));
    let needed = size
        .checked_pow(k as u32)
        .unwrap_or(u128::MAX)
        .saturating_mul(grid_size.max(1));
    if needed > budget {
        return Err(SensitivityError::BudgetExceeded { needed, budget });
    }

    let mut result = Stability {
        stable: true,
        witnesses: Vec::new(),
        selections_checked: 0,
        coherent_selections: 0,
    };
    if c.is_empty() {
        return Ok(result);
    }
    let mut selection = vec![0usize; k];
    loop {
        result.selections_checked += 1;
        let entries = qset
            .iter()
            .zip(&selection)
            .map(|(q, &s)| (q.clone(), c.members[s].clone()))
            .collect();
        let coherent = if k == 0 {
            Some(model.constant(T::zero()))
        } else {
            let family = RvFamily { entries };
            is_coherent(model, &family).aggregator().cloned()
        };
        if let Some(base) = coherent {
            result.coherent_selections += 1;
            for_each_grid_point(&grid, |point| {
                let mut values = base.values().to_vec();
                for (&w, v) in free.iter().zip(point) {
                    values[w] = v.clone();
                }
                let agg = model.rv(values).expect("length matches the model");
                if !c.contains(&agg) && !result.witnesses.contains(&agg) {
                    result.stable = false;
                    result.witnesses.push(agg);
                }
            });
        }
        // Odometer over selections.
        let mut pos = 0;
        loop {
            if pos == k {
                return Ok(result);
            }
            selection[pos] += 1;
            if selection[pos] < c.len() {
                break;
            }
            selection[pos] = 0;
            pos += 1;
        }
    }
}

fn for_each_grid_point<T: Clone>(grid: &[Vec<T>], mut f: impl FnMut(&[T])) {
    if grid.iter().any(|g| g.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; grid.len()];
    let mut point: Vec<T> = grid.iter().map(|g| g[0].clone()).collect();
    loop {
        f(&point);
        let mut pos = 0;
        loop {
            if pos == grid.len() {
                return;
            }
            idx[pos] += 1;
            if idx[pos] < grid[pos].len() {
                point[pos] = grid[pos][idx[pos]].clone();
                break;
            }
            idx[pos] = 0;
            point[pos] = grid[pos][0].clone();
            pos += 1;
        }
    }
}

/// `f^Q_E(X) = inf { f(Y) : j_Q(Y) = j_Q(X) }` for a max-affine `f`.
///
/// Constraints charging `S(Q)^c` can be driven to `-inf` by lowering `Y`
/// there, so the infimum is the maximum over the remaining constraints, or
/// `-inf` when none remain.
pub fn localize_primal_e<T: Scalar>(
    f: &MaxAffineRiskMeasure<T>,
    q: &QView<T>,
    x: &RandomVariable<T>,
) -> Extended<T> {
    let off = q.support().complement(f.n());
    f.constraints()
        .iter()
        .filter(|c| c.measure.prob(off).is_zero_tol())
        .map(|c| Extended::Finite(c.measure.expect(x.values()) - c.penalty.clone()))
        .fold(Extended::NegInf, Extended::max)
}

/// `sup_{Q in qset} f^Q_E(X)`.
pub fn sup_localized<T: Scalar>(f: &MaxAffineRiskMeasure<T>, qset: &[QView<T>], x: &RandomVariable<T>) -> Extended<T> {
    qset.iter()
        .map(|q| localize_primal_e(f, q, x))
        .fold(Extended::NegInf, Extended::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityRow<T> {
    pub value: T,
    pub localized_sup: Extended<T>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport<T> {
    pub rows: Vec<IdentityRow<T>>,
}

impl<T> IdentityReport<T> {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }

    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.holds).count()
    }
}

/// Compares `f(X)` with `sup_{Q in qset} f^Q_E(X)` on each sample.
pub fn localization_identity_check<T: Scalar>(
    f: &MaxAffineRiskMeasure<T>,
    qset: &[QView<T>],
    samples: &[RandomVariable<T>],
) -> IdentityReport<T> {
    IdentityReport {
        rows: samples
            .iter()
            .map(|x| {
                let value = f.evaluate(x);
                let localized_sup = sup_localized(f, qset, x);
                let holds = localized_sup
                    .finite()
                    .is_some_and(|s| s.approx_eq(&value));
                IdentityRow {
                    value,
                    localized_sup,
                    holds,
                }
            })
            .collect(),
    }
}
