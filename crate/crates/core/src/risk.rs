//! Risk measures given as maxima of finitely many penalized expectations,
//! `rho(X) = max_i (E_{R_i}[X] - alpha_i)`.

use thiserror::Error;

use crate::lp::{solve, LinearProgram, LpError, LpOutcome, Relation};
use crate::model::{ModelError, ProbabilityMeasure, QView, RandomVariable, RobustModel};
use crate::scalar::{Extended, Scalar};
use crate::sensitivity::localize_primal_e;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RiskError {
    #[error("a risk measure needs at least one constraint")]
    NoConstraints,
    #[error("constraint {index} lives on {actual} outcomes, expected {expected}")]
    Dimension {
        index: usize,
        expected: usize,
        actual: usize,
    },
    #[error("constraint {index}: {source}")]
    Model {
        index: usize,
        #[source]
        source: ModelError,
    },
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// One penalized expectation `E_R[X] - alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<T> {
    pub measure: ProbabilityMeasure<T>,
    pub penalty: T,
}

/// `rho(X) = max_i (E_{R_i}[X] - alpha_i)`: monotone and cash-additive by
/// construction, convex, and coherent when every penalty is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxAffineRiskMeasure<T> {
    constraints: Vec<Constraint<T>>,
}

impl<T: Scalar> MaxAffineRiskMeasure<T> {
    pub fn new(constraints: Vec<Constraint<T>>) -> Result<Self, RiskError> {
        let first = constraints.first().ok_or(RiskError::NoConstraints)?;
        let n = first.measure.len();
        for (index, c) in constraints.iter().enumerate() {
            if c.measure.len() != n {
                return Err(RiskError::Dimension {
                    index,
                    expected: n,
                    actual: c.measure.len(),
                });
            }
        }
        Ok(MaxAffineRiskMeasure { constraints })
    }

    /// Like [`new`](Self::new), additionally requiring every constraint
    /// measure to be absolutely continuous w.r.t. the model's upper probability.
    pub fn in_model(model: &RobustModel<T>, constraints: Vec<Constraint<T>>) -> Result<Self, RiskError> {
        for (index, c) in constraints.iter().enumerate() {
            model
                .qview(c.measure.clone())
                .map_err(|source| RiskError::Model { index, source })?;
        }
        Self::new(constraints)
    }

    /// Coherent measure `max_i E_{R_i}[X]`.
    pub fn coherent(measures: Vec<ProbabilityMeasure<T>>) -> Result<Self, RiskError> {
        Self::new(
            measures
                .into_iter()
                .map(|measure| Constraint {
                    measure,
                    penalty: T::zero(),
                })
                .collect(),
        )
    }

    /// Worst-case expectation over the priors.
    pub fn worst_case(model: &RobustModel<T>) -> Self {
        Self::coherent(model.priors().to_vec()).expect("priors are non-empty")
    }

    pub fn constraints(&self) -> &[Constraint<T>] {
        &self.constraints
    }

    pub fn n(&self) -> usize {
        self.constraints[0].measure.len()
    }

    pub fn is_coherent(&self) -> bool {
        self.constraints.iter().all(|c| c.penalty.is_zero_tol())
    }

    /// `max(rho, other)`, realized by concatenating constraint lists.
    pub fn max_with(&self, other: &Self) -> Result<Self, RiskError> {
        let mut cs = self.constraints.clone();
        cs.extend(other.constraints.iter().cloned());
        Self::new(cs)
    }

    pub fn evaluate(&self, x: &RandomVariable<T>) -> T {
        self.evaluate_values(x.values())
    }

    pub fn evaluate_values(&self, x: &[T]) -> T {
        self.constraints
            .iter()
            .map(|c| c.measure.expect(x) - c.penalty.clone())
            .reduce(T::max_of)
            .expect("non-empty")
    }

    /// Minimal penalty `rho_bar(R) = sup_{rho(X) <= 0} E_R[X]`, computed as
    /// `min sum_i lambda_i alpha_i` over `lambda >= 0` with `sum_i lambda_i R_i = R`.
    /// `+inf` when `R` lies outside the convex hull of the constraint measures.
    pub fn conjugate(&self, r: &ProbabilityMeasure<T>) -> Result<Extended<T>, RiskError> {
        let n = self.n();
        if r.len() != n {
            return Err(RiskError::Dimension {
                index: 0,
                expected: n,
                actual: r.len(),
            });
        }
        let k = self.constraints.len();
        let mut lp = LinearProgram::minimize(self.constraints.iter().map(|c| c.penalty.clone()).collect())
            .nonnegative();
        lp.push_row(vec![T::one(); k], Relation::Eq, T::one());
        for w in 0..n {
            lp.push_row(
                self.constraints.iter().map(|c| c.measure.mass(w).clone()).collect(),
                Relation::Eq,
                r.mass(w).clone(),
            );
        }
        Ok(match solve(&lp)? {
            LpOutcome::Optimal { objective, .. } => Extended::Finite(objective),
            LpOutcome::Infeasible { .. } => Extended::PosInf,
            LpOutcome::Unbounded { .. } => unreachable!("penalty LP over a simplex is bounded"),
        })
    }

    /// The same quantity through its defining supremum: maximize `E_R[X]` over
    /// `X` with `E_{R_i}[X] <= alpha_i` for every constraint.
    pub fn conjugate_by_acceptance(&self, r: &ProbabilityMeasure<T>) -> Result<Extended<T>, RiskError> {
        let mut lp = LinearProgram::maximize(r.masses().to_vec());
        for c in &self.constraints {
            lp.push_row(c.measure.masses().to_vec(), Relation::Le, c.penalty.clone());
        }
        Ok(match solve(&lp)? {
            LpOutcome::Optimal { objective, .. } => Extended::Finite(objective),
            LpOutcome::Unbounded { .. } => Extended::PosInf,
            LpOutcome::Infeasible { .. } => unreachable!("sufficiently negative constants are acceptable"),
        })
    }

    /// Dual localization `rho^Q_D(X) = sup { E_R[X] - rho_bar(R) : R << Q }`,
    /// as an LP over mixture weights whose mixture puts no mass off `S(Q)`.
    pub fn localize_dual_d(&self, q: &QView<T>, x: &RandomVariable<T>) -> Result<Extended<T>, RiskError> {
        let off = q.support().complement(self.n());
        let obj: Vec<T> = self
            .constraints
            .iter()
            .map(|c| c.measure.expect(x.values()) - c.penalty.clone())
            .collect();
        let k = obj.len();
        let lp = LinearProgram::maximize(obj)
            .nonnegative()
            .row(vec![T::one(); k], Relation::Eq, T::one())
            .row(
                self.constraints.iter().map(|c| c.measure.prob(off)).collect(),
                Relation::Eq,
                T::zero(),
            );
        Ok(match solve(&lp)? {
            LpOutcome::Optimal { objective, .. } => Extended::Finite(objective),
            LpOutcome::Infeasible { .. } => Extended::NegInf,
            LpOutcome::Unbounded { .. } => unreachable!("bounded over a simplex"),
        })
    }

    /// Whether `rho^Q_E` is relevant, i.e. finite at 0. The limit
    /// `lim_m rho(-m 1_{S(Q)^c})` keeps exactly the constraints with
    /// `R_i(S(Q)^c) = 0`, so relevance holds iff at least one survives.
    pub fn is_relevant(&self, q: &QView<T>) -> bool {
        let off = q.support().complement(self.n());
        self.constraints.iter().any(|c| c.measure.prob(off).is_zero_tol())
    }

    /// Relevance from the definition: `sup { m : m in j_Q(A_rho) } < inf`,
    /// decided by an LP in `(m, Y off S(Q))` with `Y = m` on `S(Q)`.
    pub fn is_relevant_by_definition(&self, q: &QView<T>) -> Result<bool, RiskError> {
        let n = self.n();
        let s = q.support();
        // Variables: m, then Y(w) for every outcome off the support.
        let off: Vec<usize> = s.complement(n).iter().collect();
        let mut obj = vec![T::zero(); 1 + off.len()];
        obj[0] = T::one();
        let mut lp = LinearProgram::maximize(obj);
        for c in &self.constraints {
            let mut row = vec![c.measure.prob(s)];
            row.extend(off.iter().map(|&w| c.measure.mass(w).clone()));
            lp.push_row(row, Relation::Le, c.penalty.clone());
        }
        Ok(match solve(&lp)? {
            LpOutcome::Optimal { .. } => true,
            LpOutcome::Unbounded { .. } => false,
            LpOutcome::Infeasible { .. } => unreachable!("very negative m is acceptable"),
        })
    }

    pub fn q_rel_set(&self, candidates: &[QView<T>]) -> Vec<QView<T>> {
        candidates.iter().filter(|q| self.is_relevant(q)).cloned().collect()
    }

    /// `rho^Q_E(X) - rho^Q_D(X)`; two infinities of the same sign count as
    /// agreement.
    pub fn bubble_gap(&self, q: &QView<T>, x: &RandomVariable<T>) -> Result<Extended<T>, RiskError> {
        let e = localize_primal_e(self, q, x);
        let d = self.localize_dual_d(q, x)?;
        Ok(extended_gap(&e, &d))
    }
}

/// `a - b` in the extended reals with `inf - inf := 0` for equal signs.
pub fn extended_gap<T: Scalar>(a: &Extended<T>, b: &Extended<T>) -> Extended<T> {
    use Extended::*;
    match (a, b) {
        (Finite(x), Finite(y)) => Finite(x.clone() - y.clone()),
        (NegInf, NegInf) | (PosInf, PosInf) => Finite(T::zero()),
        (PosInf, _) | (_, NegInf) => PosInf,
        (NegInf, _) | (_, PosInf) => NegInf,
    }
}
