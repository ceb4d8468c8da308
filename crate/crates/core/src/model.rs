//! Finite robust probability spaces.
//!
//! A [`RobustModel`] is a finite sample space `{0, .., n-1}` (power-set
//! sigma-algebra) together with a non-empty finite set of prior probability
//! measures. Outcomes charged by no prior are *polar*; the remaining outcomes
//! form the quasi-sure support `T`. Random variables are stored in canonical
//! form (zero on polar outcomes), so equality of [`RandomVariable`]s is
//! equality of quasi-sure equivalence classes.

use serde::Serialize;
use thiserror::Error;

use crate::outcomes::{OutcomeSet, MAX_OUTCOMES};
use crate::scalar::{dot, sum, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("sample space must have between 1 and {MAX_OUTCOMES} outcomes, got {0}")]
    BadSampleSpace(usize),
    #[error("expected a vector of length {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },
    #[error("probability masses must be non-negative (outcome {0})")]
    NegativeMass(usize),
    #[error("probability masses must sum to 1, got {0}")]
    NotNormalized(String),
    #[error("at least one prior is required")]
    NoPriors,
    #[error("measure charges polar outcome {0}; it is not absolutely continuous w.r.t. the upper probability")]
    ChargesPolar(usize),
    #[error("outcome set {0} lies outside the sample space")]
    OutOfRange(OutcomeSet),
}

/// A finite signed measure given by its point masses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignedMeasure<T> {
    masses: Vec<T>,
}

impl<T: Scalar> SignedMeasure<T> {
    pub fn new(masses: Vec<T>) -> Result<Self, ModelError> {
        check_len(masses.len())?;
        Ok(SignedMeasure { masses })
    }

    pub fn masses(&self) -> &[T] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn measure_of(&self, set: OutcomeSet) -> T {
        sum(set.iter().filter(|&i| i < self.len()).map(|i| self.masses[i].clone()))
    }
}

/// Total variation `|mu|(A) = sup { mu(B) - mu(A \ B) : B ⊆ A }`.
///
/// On a finite space the supremum is attained at `B = {mu > 0} ∩ A`, which
/// gives the sum of absolute point masses over `A`.
pub fn total_variation<T: Scalar>(mu: &SignedMeasure<T>, set: OutcomeSet) -> T {
    sum(set
        .iter()
        .filter(|&i| i < mu.len())
        .map(|i| mu.masses[i].abs()))
}

/// A probability measure on `{0, .., n-1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityMeasure<T> {
    masses: Vec<T>,
}

impl<T: Scalar> ProbabilityMeasure<T> {
    pub fn new(masses: Vec<T>) -> Result<Self, ModelError> {
        check_len(masses.len())?;
        if let Some(i) = masses.iter().position(|m| m.is_neg()) {
            return Err(ModelError::NegativeMass(i));
        }
        let total = sum(masses.iter().cloned());
        if !total.approx_eq(&T::one()) {
            return Err(ModelError::NotNormalized(total.to_string()));
        }
        Ok(ProbabilityMeasure { masses })
    }

    pub fn dirac(n: usize, at: usize) -> Self {
        assert!(at < n);
        let masses = (0..n)
            .map(|i| if i == at { T::one() } else { T::zero() })
            .collect();
        ProbabilityMeasure { masses }
    }

    pub fn uniform(n: usize) -> Self {
        Self::uniform_on(n, OutcomeSet::full(n))
    }

    /// Uniform distribution over a non-empty subset.
    pub fn uniform_on(n: usize, set: OutcomeSet) -> Self {
        let k = set.len();
        assert!(k > 0 && set.is_subset(OutcomeSet::full(n)));
        let w = T::from_ratio(1, k as i64);
        let masses = (0..n)
            .map(|i| if set.contains(i) { w.clone() } else { T::zero() })
            .collect();
        ProbabilityMeasure { masses }
    }

    /// Equal-weight mixture of a non-empty list of measures on the same space.
    pub fn mixture(measures: &[ProbabilityMeasure<T>]) -> Self {
        assert!(!measures.is_empty());
        let w = T::from_ratio(1, measures.len() as i64);
        let n = measures[0].len();
        let masses = (0..n)
            .map(|i| w.clone() * sum(measures.iter().map(|m| m.masses[i].clone())))
            .collect();
        ProbabilityMeasure { masses }
    }

    pub fn masses(&self) -> &[T] {
        &self.masses
    }

    pub fn mass(&self, i: usize) -> &T {
        &self.masses[i]
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn prob(&self, set: OutcomeSet) -> T {
        sum(set
            .iter()
            .filter(|&i| i < self.len())
            .map(|i| self.masses[i].clone()))
    }

    /// `E[X]` for a vector of outcome values.
    pub fn expect(&self, values: &[T]) -> T {
        debug_assert_eq!(values.len(), self.len());
        dot(&self.masses, values)
    }

    /// Order support `{w : Q({w}) > 0}`. On a finite space this set satisfies
    /// both support conditions: its complement is null, and every null subset
    /// of it is empty.
    pub fn support(&self) -> OutcomeSet {
        OutcomeSet::from_indices((0..self.len()).filter(|&i| self.masses[i].is_pos()))
    }

    pub fn as_signed(&self) -> SignedMeasure<T> {
        SignedMeasure {
            masses: self.masses.clone(),
        }
    }
}

/// Order support of a probability measure.
pub fn support_of<T: Scalar>(q: &ProbabilityMeasure<T>) -> OutcomeSet {
    q.support()
}

/// `I` dominates `G` when every set null under all of `I` is null under all
/// of `G`; on a finite space this is inclusion of the union supports.
pub fn dominates<T: Scalar>(g: &[ProbabilityMeasure<T>], i: &[ProbabilityMeasure<T>]) -> bool {
    union_support(g).is_subset(union_support(i))
}

pub fn union_support<T: Scalar>(measures: &[ProbabilityMeasure<T>]) -> OutcomeSet {
    measures
        .iter()
        .fold(OutcomeSet::EMPTY, |acc, m| acc.union(m.support()))
}

fn check_len(n: usize) -> Result<(), ModelError> {
    if n == 0 || n > MAX_OUTCOMES {
        Err(ModelError::BadSampleSpace(n))
    } else {
        Ok(())
    }
}

/// Finite sample space with a finite set of priors.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustModel<T> {
    n: usize,
    priors: Vec<ProbabilityMeasure<T>>,
    polar: OutcomeSet,
    support: OutcomeSet,
    convex: bool,
}

impl<T: Scalar> RobustModel<T> {
    pub fn new(priors: Vec<ProbabilityMeasure<T>>) -> Result<Self, ModelError> {
        let first = priors.first().ok_or(ModelError::NoPriors)?;
        let n = first.len();
        if let Some(p) = priors.iter().find(|p| p.len() != n) {
            return Err(ModelError::Dimension {
                expected: n,
                actual: p.len(),
            });
        }
        let support = union_support(&priors);
        Ok(RobustModel {
            n,
            polar: support.complement(n),
            support,
            priors,
            convex: false,
        })
    }

    /// Marks the prior set as standing for its convex hull. Selectors that
    /// quantify over priors then range over mixtures as well.
    pub fn with_convex_hull(mut self, convex: bool) -> Self {
        self.convex = convex;
        self
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn priors(&self) -> &[ProbabilityMeasure<T>] {
        &self.priors
    }

    pub fn polar(&self) -> OutcomeSet {
        self.polar
    }

    /// Quasi-sure support `T`, the complement of the polar outcomes.
    pub fn support_t(&self) -> OutcomeSet {
        self.support
    }

    pub fn full_set(&self) -> OutcomeSet {
        OutcomeSet::full(self.n)
    }

    /// `c(A) = max_P P(A)`.
    pub fn upper_probability(&self, set: OutcomeSet) -> T {
        self.priors
            .iter()
            .map(|p| p.prob(set))
            .fold(T::zero(), T::max_of)
    }

    pub fn is_polar(&self, set: OutcomeSet) -> bool {
        set.intersection(self.support).is_empty()
    }

    /// Builds a random variable in canonical form.
    pub fn rv(&self, values: Vec<T>) -> Result<RandomVariable<T>, ModelError> {
        if values.len() != self.n {
            return Err(ModelError::Dimension {
                expected: self.n,
                actual: values.len(),
            });
        }
        Ok(RandomVariable::canonical(values, self.polar))
    }

    pub fn constant(&self, m: T) -> RandomVariable<T> {
        RandomVariable::canonical(vec![m; self.n], self.polar)
    }

    pub fn indicator(&self, set: OutcomeSet) -> RandomVariable<T> {
        let values = (0..self.n)
            .map(|i| if set.contains(i) { T::one() } else { T::zero() })
            .collect();
        RandomVariable::canonical(values, self.polar)
    }

    /// Quasi-sure order: `X(w) <= Y(w)` for every non-polar `w`.
    pub fn qs_leq(&self, x: &RandomVariable<T>, y: &RandomVariable<T>) -> bool {
        self.support
            .iter()
            .all(|i| x.values[i] <= y.values[i] || x.values[i].approx_eq(&y.values[i]))
    }

    /// Wraps a measure as a member of the measures absolutely continuous with
    /// respect to the upper probability.
    pub fn qview(&self, measure: ProbabilityMeasure<T>) -> Result<QView<T>, ModelError> {
        if measure.len() != self.n {
            return Err(ModelError::Dimension {
                expected: self.n,
                actual: measure.len(),
            });
        }
        let q = QView::new(measure);
        if let Some(i) = q.support.intersection(self.polar).iter().next() {
            return Err(ModelError::ChargesPolar(i));
        }
        Ok(q)
    }

    /// `j_Q(X)`: the values of `X` on the support of `Q`, in outcome order.
    pub fn project(&self, x: &RandomVariable<T>, q: &QView<T>) -> Result<Vec<T>, ModelError> {
        if let Some(i) = q.support.intersection(self.polar).iter().next() {
            return Err(ModelError::ChargesPolar(i));
        }
        Ok(q.support.iter().map(|i| x.values[i].clone()).collect())
    }

    /// A single measure equivalent to the prior set: the uniform mixture.
    /// Finite prior sets are always dominated, so this never fails.
    pub fn find_dominating_measure(&self) -> ProbabilityMeasure<T> {
        ProbabilityMeasure::mixture(&self.priors)
    }

    /// `sup_P E_P[X]`, the worst-case expectation over the priors.
    pub fn upper_expectation(&self, x: &RandomVariable<T>) -> T {
        let mut it = self.priors.iter().map(|p| p.expect(x.values()));
        let first = it.next().expect("priors are non-empty");
        it.fold(first, T::max_of)
    }
}

/// Element of `L∞_c`: outcome values, canonically zero on polar outcomes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandomVariable<T> {
    values: Vec<T>,
    #[serde(skip)]
    polar: OutcomeSet,
}

impl<T: Scalar> RandomVariable<T> {
    fn canonical(mut values: Vec<T>, polar: OutcomeSet) -> Self {
        for i in polar.iter() {
            if i < values.len() {
                values[i] = T::zero();
            }
        }
        RandomVariable { values, polar }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, i: usize) -> &T {
        &self.values[i]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Self {
        assert_eq!(self.len(), other.len(), "random variables on different spaces");
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| f(a, b))
            .collect();
        RandomVariable::canonical(values, self.polar.union(other.polar))
    }

    fn map(&self, f: impl Fn(&T) -> T) -> Self {
        RandomVariable::canonical(self.values.iter().map(f).collect(), self.polar)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, lambda: &T) -> Self {
        self.map(|a| a.clone() * lambda.clone())
    }

    /// `X + m` for a constant `m`.
    pub fn shift(&self, m: &T) -> Self {
        self.map(|a| a.clone() + m.clone())
    }

    pub fn max_with(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| T::max_of(a.clone(), b.clone()))
    }

    pub fn min_with(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| T::min_of(a.clone(), b.clone()))
    }

    /// `X 1_A + Y 1_{A^c}`.
    pub fn patch(&self, set: OutcomeSet, other: &Self) -> Self {
        let values = (0..self.len())
            .map(|i| {
                if set.contains(i) {
                    self.values[i].clone()
                } else {
                    other.values[i].clone()
                }
            })
            .collect();
        RandomVariable::canonical(values, self.polar.union(other.polar))
    }

    /// Agreement on a set of outcomes.
    pub fn agrees_on(&self, other: &Self, set: OutcomeSet) -> bool {
        set.iter()
            .all(|i| self.values[i].approx_eq(&other.values[i]))
    }
}

/// A measure viewed through its order support.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QView<T> {
    measure: ProbabilityMeasure<T>,
    support: OutcomeSet,
}

impl<T: Scalar> QView<T> {
    pub fn new(measure: ProbabilityMeasure<T>) -> Self {
        let support = measure.support();
        QView { measure, support }
    }

    pub fn measure(&self) -> &ProbabilityMeasure<T> {
        &self.measure
    }

    pub fn support(&self) -> OutcomeSet {
        self.support
    }

    /// `R << Q`, i.e. `R` puts no mass outside the support of `Q`.
    pub fn dominates(&self, r: &ProbabilityMeasure<T>) -> bool {
        r.support().is_subset(self.support)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use num_rational::BigRational;

    type P = ProbabilityMeasure<BigRational>;

    fn pm(v: &[(i64, i64)]) -> P {
        P::new(v.iter().map(|&(a, b)| rat(a, b)).collect()).unwrap()
    }

    fn all_set(n: usize) -> OutcomeSet {
        OutcomeSet::full(n)
    }

    /// Brute-force `sup_B mu(B) - mu(A\B)` over every subset B of A.
    fn tv_brute(mu: &SignedMeasure<BigRational>, a: OutcomeSet) -> BigRational {
        a.subsets()
            .map(|b| mu.measure_of(b) - mu.measure_of(a.difference(b)))
            .max()
            .unwrap()
    }

    #[test]
    fn total_variation_examples() {
        let mu = SignedMeasure::new(vec![rat(1, 1), rat(-2, 1), rat(3, 1)]).unwrap();
        assert_eq!(tv_brute(&mu, all_set(3)), rat(6, 1));
        assert_eq!(total_variation(&mu, all_set(3)), rat(6, 1));

        let zero = SignedMeasure::new(vec![rat(0, 1); 4]).unwrap();
        assert_eq!(total_variation(&zero, OutcomeSet::from_indices([1, 3])), rat(0, 1));

        let half = SignedMeasure::new(vec![rat(1, 2), rat(1, 2)]).unwrap();
        assert_eq!(total_variation(&half, OutcomeSet::singleton(0)), rat(1, 2));
    }

    #[test]
    fn upper_probability_examples() {
        let m = RobustModel::new(vec![pm(&[(1, 1), (0, 1)]), pm(&[(0, 1), (1, 1)])]).unwrap();
        assert_eq!(m.upper_probability(OutcomeSet::singleton(0)), rat(1, 1));
        assert_eq!(m.upper_probability(OutcomeSet::EMPTY), rat(0, 1));

        let m = RobustModel::new(vec![pm(&[(1, 2), (1, 2), (0, 1)])]).unwrap();
        assert_eq!(m.upper_probability(OutcomeSet::singleton(2)), rat(0, 1));
        assert!(m.is_polar(OutcomeSet::singleton(2)));
        assert_eq!(m.polar(), OutcomeSet::singleton(2));
        assert_eq!(m.support_t(), OutcomeSet::from_indices([0, 1]));
    }

    #[test]
    fn quasi_sure_order() {
        let m = RobustModel::new(vec![pm(&[(1, 2), (1, 2), (0, 1)])]).unwrap();
        let x = m.rv(vec![rat(1, 1), rat(2, 1), rat(-5, 1)]).unwrap();
        let y = m.rv(vec![rat(1, 1), rat(2, 1), rat(9, 1)]).unwrap();
        // differing only on the polar outcome: same class
        assert!(m.qs_leq(&x, &y) && m.qs_leq(&y, &x));
        assert_eq!(x, y);

        let m = RobustModel::new(vec![P::uniform(2)]).unwrap();
        let x = m.rv(vec![rat(0, 1), rat(1, 1)]).unwrap();
        let y = m.rv(vec![rat(1, 1), rat(0, 1)]).unwrap();
        assert!(!m.qs_leq(&x, &y) && !m.qs_leq(&y, &x));
        assert!(m.qs_leq(&x, &x));
    }

    #[test]
    fn projection_examples() {
        let m = RobustModel::new(vec![P::uniform(3)]).unwrap();
        let q = m.qview(pm(&[(1, 2), (0, 1), (1, 2)])).unwrap();
        let x = m.rv(vec![rat(3, 1), rat(7, 1), rat(9, 1)]).unwrap();
        assert_eq!(m.project(&x, &q).unwrap(), vec![rat(3, 1), rat(9, 1)]);
        let c = m.constant(rat(4, 1));
        assert_eq!(m.project(&c, &q).unwrap(), vec![rat(4, 1); 2]);
        let y = m.rv(vec![rat(3, 1), rat(-1, 1), rat(9, 1)]).unwrap();
        assert_eq!(m.project(&x, &q).unwrap(), m.project(&y, &q).unwrap());
    }

    #[test]
    fn projection_rejects_polar_mass() {
        let m = RobustModel::new(vec![pm(&[(1, 1), (0, 1)])]).unwrap();
        assert_eq!(
            m.qview(P::uniform(2)).unwrap_err(),
            ModelError::ChargesPolar(1)
        );
        let q = QView::new(P::uniform(2));
        let x = m.constant(rat(1, 1));
        assert!(m.project(&x, &q).is_err());
    }

    #[test]
    fn support_examples() {
        assert_eq!(pm(&[(1, 2), (1, 2), (0, 1)]).support(), OutcomeSet::from_indices([0, 1]));
        assert_eq!(P::dirac(3, 1).support(), OutcomeSet::singleton(1));
        assert_eq!(P::uniform(4).support(), all_set(4));
    }

    #[test]
    fn domination_examples() {
        let u2 = P::uniform_on(3, OutcomeSet::from_indices([0, 1]));
        let d0 = P::dirac(3, 0);
        assert!(dominates(&[u2.clone()], &[u2.clone()]));
        assert!(!dominates(&[u2.clone()], &[d0.clone()]));
        assert!(dominates(&[d0], &[P::uniform(3)]));
    }

    #[test]
    fn dominating_measure_examples() {
        let m = RobustModel::new(vec![P::dirac(3, 0), P::dirac(3, 1)]).unwrap();
        assert_eq!(m.find_dominating_measure(), pm(&[(1, 2), (1, 2), (0, 1)]));

        let p = pm(&[(1, 3), (2, 3)]);
        let m = RobustModel::new(vec![p.clone()]).unwrap();
        assert_eq!(m.find_dominating_measure(), p);

        let priors = vec![pm(&[(1, 1), (0, 1)]), pm(&[(1, 2), (1, 2)])];
        let m = RobustModel::new(priors.clone()).unwrap();
        let q = m.find_dominating_measure();
        assert_eq!(q, pm(&[(3, 4), (1, 4)]));
        assert!(dominates(&priors, &[q.clone()]));
        assert!(dominates(&[q], &priors));
    }

    #[test]
    fn constructor_errors() {
        assert!(matches!(
            P::new(vec![rat(1, 2), rat(1, 3)]),
            Err(ModelError::NotNormalized(_))
        ));
        assert_eq!(
            P::new(vec![rat(3, 2), rat(-1, 2)]).unwrap_err(),
            ModelError::NegativeMass(1)
        );
        assert_eq!(
            RobustModel::<BigRational>::new(vec![]).unwrap_err(),
            ModelError::NoPriors
        );
        assert!(matches!(
            RobustModel::new(vec![P::uniform(2), P::uniform(3)]),
            Err(ModelError::Dimension { .. })
        ));
    }

    #[test]
    fn floating_point_scalar_works() {
        let m = RobustModel::new(vec![
            ProbabilityMeasure::<f64>::new(vec![0.5, 0.5, 0.0]).unwrap(),
        ])
        .unwrap();
        assert_eq!(m.polar(), OutcomeSet::singleton(2));
        assert!((m.upper_probability(OutcomeSet::singleton(0)) - 0.5).abs() < 1e-12);
    }
}
