//! Robust optimization by localization: solve one problem per measure,
//! patch the local optimizers together, and check the patchwork against
//! sampled feasible points.

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::lp::{solve, LinearProgram, LpError, LpOutcome, Relation};
use crate::model::{ModelError, QView, RandomVariable, RobustModel};
use crate::risk::MaxAffineRiskMeasure;
use crate::scalar::Scalar;
use crate::sensitivity::{is_coherent, Coherence, FiniteRvSet, RvFamily, SensitivityError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizeError {
    #[error("lower bound exceeds upper bound at outcome {0}")]
    EmptyInterval(usize),
    #[error("feasible set is empty")]
    EmptyFeasibleSet,
    #[error("objective {index} charges outcomes outside the support of its measure")]
    NotLocal { index: usize },
    #[error("objective {index}: expected {expected} outcomes, got {actual}")]
    Dimension { index: usize, expected: usize, actual: usize },
    #[error("local optimizers {first} and {second} disagree at outcome {outcome}")]
    Incoherent { first: usize, second: usize, outcome: usize },
    #[error("targets {first} and {second} disagree at outcome {outcome}")]
    IncoherentTargets { first: usize, second: usize, outcome: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sensitivity(#[from] SensitivityError),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Objective attached to one measure `Q`; each depends on `X` only through
/// its values on `S(Q)`.
#[derive(Debug, Clone, PartialEq)]
pub enum LocalObjective<T> {
    /// `E_Q[(Y - X)^2]`.
    SquaredError { target: RandomVariable<T> },
    /// `max_i (E_{R_i}[X] - alpha_i)` with every `R_i << Q`.
    MaxAffine(MaxAffineRiskMeasure<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeasibleSet<T> {
    /// Order interval `[lower, upper]`.
    Interval {
        lower: RandomVariable<T>,
        upper: RandomVariable<T>,
    },
    Finite(FiniteRvSet<T>),
}

impl<T: Scalar> FeasibleSet<T> {
    pub fn contains(&self, x: &RandomVariable<T>) -> bool {
        match self {
            FeasibleSet::Interval { lower, upper } => (0..x.len())
                .all(|w| !(lower.get(w).clone() - x.get(w).clone()).is_pos() && !(x.get(w).clone() - upper.get(w).clone()).is_pos()),
            FeasibleSet::Finite(c) => c.contains(x),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizedProblem<T> {
    objectives: Vec<(QView<T>, LocalObjective<T>)>,
    feasible: FeasibleSet<T>,
}

impl<T: Scalar> LocalizedProblem<T> {
    pub fn new(
        model: &RobustModel<T>,
        objectives: Vec<(QView<T>, LocalObjective<T>)>,
        feasible: FeasibleSet<T>,
    ) -> Result<Self, OptimizeError> {
        let n = model.n();
        for (index, (q, obj)) in objectives.iter().enumerate() {
            model.qview(q.measure().clone())?;
            match obj {
                LocalObjective::SquaredError { target } => {
                    if target.len() != n {
                        return Err(OptimizeError::Dimension {
                            index,
                            expected: n,
                            actual: target.len(),
                        });
                    }
                }
                LocalObjective::MaxAffine(f) => {
                    if f.n() != n {
                        return Err(OptimizeError::Dimension {
                            index,
                            expected: n,
                            actual: f.n(),
                        });
                    }
                    if f.constraints().iter().any(|c| !c.measure.support().is_subset(q.support())) {
                        return Err(OptimizeError::NotLocal { index });
                    }
                }
            }
        }
        match &feasible {
            FeasibleSet::Interval { lower, upper } => {
                if let Some(w) = (0..n).find(|&w| lower.get(w) > upper.get(w)) {
                    return Err(OptimizeError::EmptyInterval(w));
                }
            }
            FeasibleSet::Finite(c) => {
                if c.is_empty() {
                    return Err(OptimizeError::EmptyFeasibleSet);
                }
            }
        }
        Ok(LocalizedProblem { objectives, feasible })
    }

    pub fn objectives(&self) -> &[(QView<T>, LocalObjective<T>)] {
        &self.objectives
    }

    pub fn feasible(&self) -> &FeasibleSet<T> {
        &self.feasible
    }

    pub fn local_value(&self, index: usize, x: &RandomVariable<T>) -> T {
        let (q, obj) = &self.objectives[index];
        match obj {
            LocalObjective::SquaredError { target } => {
                let sq: Vec<T> = (0..x.len())
                    .map(|w| {
                        let d = target.get(w).clone() - x.get(w).clone();
                        d.clone() * d
                    })
                    .collect();
                q.measure().expect(&sq)
            }
            LocalObjective::MaxAffine(f) => f.evaluate(x),
        }
    }

    /// `f(X) = max_Q f^Q(X)`.
    pub fn value(&self, x: &RandomVariable<T>) -> T {
        (0..self.objectives.len())
            .map(|i| self.local_value(i, x))
            .reduce(T::max_of)
            .unwrap_or_else(T::zero)
    }
}

/// `max(a, min(y, b))`.
fn clamp<T: Scalar>(a: &T, y: &T, b: &T) -> T {
    T::max_of(a.clone(), T::min_of(y.clone(), b.clone()))
}

fn clamp_rv<T: Scalar>(model: &RobustModel<T>, a: &RandomVariable<T>, y: &RandomVariable<T>, b: &RandomVariable<T>) -> RandomVariable<T> {
    model
        .rv((0..y.len()).map(|w| clamp(a.get(w), y.get(w), b.get(w))).collect())
        .expect("length matches the model")
}

fn local_optimizer<T: Scalar>(
    model: &RobustModel<T>,
    problem: &LocalizedProblem<T>,
    index: usize,
) -> Result<RandomVariable<T>, OptimizeError> {
    let (q, obj) = &problem.objectives[index];
    match (&problem.feasible, obj) {
        (FeasibleSet::Interval { lower, upper }, LocalObjective::SquaredError { target }) => {
            Ok(clamp_rv(model, lower, target, upper))
        }
        (FeasibleSet::Interval { lower, upper }, LocalObjective::MaxAffine(f)) => {
            // min t s.t. t >= E_{R_i}[X] - alpha_i, X in [A, B] on S(Q); X = A elsewhere.
            let n = model.n();
            let mut obj = vec![T::zero(); n + 1];
            obj[n] = T::one();
            let mut lp = LinearProgram::minimize(obj);
            for w in 0..n {
                let (lo, hi) = if q.support().contains(w) {
                    (lower.get(w).clone(), upper.get(w).clone())
                } else {
                    (lower.get(w).clone(), lower.get(w).clone())
                };
                lp.lower[w] = Some(lo);
                lp.upper[w] = Some(hi);
            }
            for c in f.constraints() {
                let mut row: Vec<T> = c.measure.masses().iter().map(|m| -m.clone()).collect();
                row.push(T::one());
                lp.push_row(row, Relation::Ge, -c.penalty.clone());
            }
            match solve(&lp)? {
                LpOutcome::Optimal { primal, .. } => Ok(model.rv(primal[..n].to_vec())?),
                _ => unreachable!("bounded box with a free epigraph variable"),
            }
        }
        (FeasibleSet::Finite(c), _) => {
            let mut best: Option<(T, &RandomVariable<T>)> = None;
            for m in c.members() {
                let v = problem.local_value(index, m);
                if best.as_ref().map_or(true, |(b, _)| v < *b) {
                    best = Some((v, m));
                }
            }
            Ok(best.expect("non-empty").1.clone())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalRow<T> {
    /// `f^Q` at the local optimizer.
    pub local_optimum: T,
    /// `f^Q` at the aggregate.
    pub at_aggregate: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizeReport<T> {
    pub optimizer: RandomVariable<T>,
    pub value: T,
    pub local: Vec<LocalRow<T>>,
    pub feasible: bool,
    pub samples: usize,
    /// Smallest objective value seen among the samples.
    pub best_sample: Option<T>,
    /// Samples strictly better than the aggregate.
    pub beaten_by: usize,
}

impl<T: Scalar> OptimizeReport<T> {
    /// Feasible, locally optimal on every measure, and never beaten by a sample.
    pub fn certified(&self) -> bool {
        self.feasible
            && self.beaten_by == 0
            && self.local.iter().all(|r| r.local_optimum.approx_eq(&r.at_aggregate))
    }
}

/// Uniform draw from `{a + (b - a) k / resolution : k = 0..=resolution}`.
pub fn sample_between<T: Scalar, R: Rng + ?Sized>(a: &T, b: &T, resolution: i64, rng: &mut R) -> T {
    let k = rng.gen_range(0..=resolution);
    a.clone() + (b.clone() - a.clone()) * T::from_ratio(k, resolution)
}

pub const SAMPLE_RESOLUTION: i64 = 64;

/// Random feasible points; for an interval, the grid draws are followed by
/// the coordinatewise perturbations of `around` to both interval ends.
pub fn feasible_samples<T: Scalar, R: Rng + ?Sized>(
    model: &RobustModel<T>,
    feasible: &FeasibleSet<T>,
    around: Option<&RandomVariable<T>>,
    count: usize,
    rng: &mut R,
) -> Vec<RandomVariable<T>> {
    match feasible {
        FeasibleSet::Finite(c) => c.members().to_vec(),
        FeasibleSet::Interval { lower, upper } => {
            let n = model.n();
            let mut out: Vec<RandomVariable<T>> = (0..count)
                .map(|_| {
                    let v = (0..n)
                        .map(|w| sample_between(lower.get(w), upper.get(w), SAMPLE_RESOLUTION, rng))
                        .collect();
                    model.rv(v).expect("length matches the model")
                })
                .collect();
            if let Some(x) = around {
                for w in model.support_t().iter() {
                    for end in [lower.get(w), upper.get(w)] {
                        let mid = (x.get(w).clone() + end.clone()) / T::from_int(2);
                        for v in [mid, end.clone()] {
                            let mut vals = x.values().to_vec();
                            vals[w] = v;
                            out.push(model.rv(vals).expect("length matches the model"));
                        }
                    }
                }
            }
            out
        }
    }
}

/// Solves each local problem, aggregates the optimizers and checks the
/// aggregate against `samples` random feasible points.
pub fn solve_localized<T: Scalar, R: Rng + ?Sized>(
    model: &RobustModel<T>,
    problem: &LocalizedProblem<T>,
    samples: usize,
    rng: &mut R,
) -> Result<OptimizeReport<T>, OptimizeError> {
    let locals = (0..problem.objectives.len())
        .map(|i| local_optimizer(model, problem, i))
        .collect::<Result<Vec<_>, _>>()?;
    let family = RvFamily::new(
        model,
        problem
            .objectives
            .iter()
            .zip(&locals)
            .map(|((q, _), x)| (q.clone(), x.clone()))
            .collect(),
    )?;
    let optimizer = match is_coherent(model, &family) {
        Coherence::Aggregator(x) => x,
        Coherence::Conflict { first, second, outcome } => {
            return Err(OptimizeError::Incoherent { first, second, outcome })
        }
    };
    // Off the covered outcomes any feasible value is admissible; take the
    // first local optimizer's there.
    let covered = family.covered();
    let optimizer = match locals.first() {
        Some(first) => model.rv(
            (0..model.n())
                .map(|w| {
                    if covered.contains(w) {
                        optimizer.get(w).clone()
                    } else {
                        first.get(w).clone()
                    }
                })
                .collect(),
        )?,
        None => optimizer,
    };
    let local = locals
        .iter()
        .enumerate()
        .map(|(i, x)| LocalRow {
            local_optimum: problem.local_value(i, x),
            at_aggregate: problem.local_value(i, &optimizer),
        })
        .collect();
    let value = problem.value(&optimizer);
    let pts = feasible_samples(model, &problem.feasible, Some(&optimizer), samples, rng);
    let mut best_sample: Option<T> = None;
    let mut beaten_by = 0;
    for p in &pts {
        let v = problem.value(p);
        if (value.clone() - v.clone()).is_pos() {
            beaten_by += 1;
        }
        best_sample = Some(match best_sample {
            None => v,
            Some(b) => T::min_of(b, v),
        });
    }
    Ok(OptimizeReport {
        feasible: problem.feasible.contains(&optimizer),
        optimizer,
        value,
        local,
        samples: pts.len(),
        best_sample,
        beaten_by,
    })
}

/// Bliss-point consumption: clamp each target into `[A, B]` and aggregate.
pub fn bliss_point<T: Scalar>(
    model: &RobustModel<T>,
    a: &RandomVariable<T>,
    b: &RandomVariable<T>,
    targets: &RvFamily<T>,
) -> Result<RandomVariable<T>, OptimizeError> {
    if let Some(w) = (0..model.n()).find(|&w| a.get(w) > b.get(w)) {
        return Err(OptimizeError::EmptyInterval(w));
    }
    if let Coherence::Conflict { first, second, outcome } = is_coherent(model, targets) {
        return Err(OptimizeError::IncoherentTargets { first, second, outcome });
    }
    let clamped = RvFamily::new(
        model,
        targets
            .entries()
            .iter()
            .map(|(q, y)| (q.clone(), clamp_rv(model, a, y, b)))
            .collect(),
    )?;
    match is_coherent(model, &clamped) {
        Coherence::Aggregator(x) => Ok(x),
        Coherence::Conflict { first, second, outcome } => Err(OptimizeError::Incoherent { first, second, outcome }),
    }
}

/// The bliss-point problem as a localized problem over the priors.
pub fn bliss_problem<T: Scalar>(
    model: &RobustModel<T>,
    a: &RandomVariable<T>,
    b: &RandomVariable<T>,
    targets: &RvFamily<T>,
) -> Result<LocalizedProblem<T>, OptimizeError> {
    LocalizedProblem::new(
        model,
        targets
            .entries()
            .iter()
            .map(|(q, y)| (q.clone(), LocalObjective::SquaredError { target: y.clone() }))
            .collect(),
        FeasibleSet::Interval {
            lower: a.clone(),
            upper: b.clone(),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ProbabilityMeasure;
    use crate::outcomes::OutcomeSet;
    use crate::risk::Constraint;
    use crate::scalar::rat;
    use num_rational::BigRational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type Q = BigRational;
    type P = ProbabilityMeasure<Q>;

    fn rv(m: &RobustModel<Q>, v: &[i64]) -> RandomVariable<Q> {
        m.rv(v.iter().map(|&x| rat(x, 1)).collect()).unwrap()
    }

    fn on(n: usize, s: &[usize]) -> P {
        P::uniform_on(n, OutcomeSet::from_indices(s.iter().copied()))
    }

    #[test]
    fn identical_priors_reduce_to_single_clamp() {
        let m = RobustModel::new(vec![P::uniform(3), P::uniform(3)]).unwrap();
        let q = m.qview(P::uniform(3)).unwrap();
        let y = rv(&m, &[5, -1, 2]);
        let fam = RvFamily::new(&m, vec![(q.clone(), y.clone()), (q, y)]).unwrap();
        let x = bliss_point(&m, &rv(&m, &[0, 0, 0]), &rv(&m, &[3, 3, 3]), &fam).unwrap();
        assert_eq!(x, rv(&m, &[3, 0, 2]));
    }

    #[test]
    fn bliss_edge_cases() {
        let m = RobustModel::new(vec![on(3, &[0, 1]), on(3, &[1, 2])]).unwrap();
        let q1 = m.qview(on(3, &[0, 1])).unwrap();
        let q2 = m.qview(on(3, &[1, 2])).unwrap();
        let a = rv(&m, &[0, 0, 0]);
        let b = rv(&m, &[4, 4, 4]);
        let inside = RvFamily::new(&m, vec![(q1.clone(), rv(&m, &[1, 2, 9])), (q2.clone(), rv(&m, &[7, 2, 3]))]).unwrap();
        assert_eq!(bliss_point(&m, &a, &b, &inside).unwrap(), rv(&m, &[1, 2, 3]));

        let below = RvFamily::new(&m, vec![(q1.clone(), rv(&m, &[-1, -2, 0])), (q2.clone(), rv(&m, &[-5, -2, -3]))]).unwrap();
        assert_eq!(bliss_point(&m, &a, &b, &below).unwrap(), a);

        let clash = RvFamily::new(&m, vec![(q1, rv(&m, &[1, 2, 0])), (q2, rv(&m, &[0, 3, 0]))]).unwrap();
        assert!(matches!(
            bliss_point(&m, &a, &b, &clash),
            Err(OptimizeError::IncoherentTargets { first: 0, second: 1, outcome: 1 })
        ));
        assert!(matches!(bliss_point(&m, &b, &a, &inside), Err(OptimizeError::EmptyInterval(0))));
    }

    #[test]
    fn overlapping_supports_beat_random_points() {
        let m = RobustModel::new(vec![
            P::new(vec![rat(1, 2), rat(1, 2), rat(0, 1)]).unwrap(),
            P::new(vec![rat(0, 1), rat(1, 3), rat(2, 3)]).unwrap(),
        ])
        .unwrap();
        let qs: Vec<QView<Q>> = m.priors().iter().map(|p| m.qview(p.clone()).unwrap()).collect();
        let a = m.rv(vec![rat(-1, 1), rat(0, 1), rat(1, 2)]).unwrap();
        let b = m.rv(vec![rat(2, 1), rat(1, 1), rat(3, 1)]).unwrap();
        let targets = RvFamily::new(
            &m,
            vec![
                (qs[0].clone(), m.rv(vec![rat(5, 2), rat(1, 3), rat(0, 1)]).unwrap()),
                (qs[1].clone(), m.rv(vec![rat(9, 1), rat(1, 3), rat(-4, 1)]).unwrap()),
            ],
        )
        .unwrap();
        let x = bliss_point(&m, &a, &b, &targets).unwrap();
        assert_eq!(x, m.rv(vec![rat(2, 1), rat(1, 3), rat(1, 2)]).unwrap());
        let problem = bliss_problem(&m, &a, &b, &targets).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rep = solve_localized(&m, &problem, 10_000, &mut rng).unwrap();
        assert_eq!(rep.optimizer, x);
        assert!(rep.certified(), "{rep:?}");
        assert!(rep.samples >= 10_000);
    }

    #[test]
    fn disjoint_supports_patchwork() {
        let m = RobustModel::new(vec![on(4, &[0, 1]), on(4, &[2, 3])]).unwrap();
        let q1 = m.qview(on(4, &[0, 1])).unwrap();
        let q2 = m.qview(on(4, &[2, 3])).unwrap();
        let problem = LocalizedProblem::new(
            &m,
            vec![
                (q1, LocalObjective::SquaredError { target: rv(&m, &[1, 2, 100, 100]) }),
                (q2, LocalObjective::SquaredError { target: rv(&m, &[-100, -100, 3, 4]) }),
            ],
            FeasibleSet::Interval {
                lower: rv(&m, &[-10, -10, -10, -10]),
                upper: rv(&m, &[10, 10, 10, 10]),
            },
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rep = solve_localized(&m, &problem, 500, &mut rng).unwrap();
        assert_eq!(rep.optimizer, rv(&m, &[1, 2, 3, 4]));
        assert_eq!(rep.value, rat(0, 1));
        assert!(rep.certified());
    }

    #[test]
    fn max_affine_objective_by_lp() {
        let m = RobustModel::new(vec![P::uniform(2)]).unwrap();
        let q = m.qview(P::uniform(2)).unwrap();
        let f = MaxAffineRiskMeasure::new(vec![
            Constraint { measure: P::dirac(2, 0), penalty: rat(0, 1) },
            Constraint { measure: P::dirac(2, 1), penalty: rat(1, 1) },
        ])
        .unwrap();
        let problem = LocalizedProblem::new(
            &m,
            vec![(q, LocalObjective::MaxAffine(f))],
            FeasibleSet::Interval {
                lower: rv(&m, &[1, 2]),
                upper: rv(&m, &[5, 5]),
            },
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rep = solve_localized(&m, &problem, 200, &mut rng).unwrap();
        assert_eq!(rep.value, rat(1, 1));
        assert!(rep.certified());

        let narrow = m.qview(P::dirac(2, 0)).unwrap();
        let g = MaxAffineRiskMeasure::coherent(vec![P::uniform(2)]).unwrap();
        assert!(matches!(
            LocalizedProblem::new(
                &m,
                vec![(narrow, LocalObjective::MaxAffine(g))],
                FeasibleSet::Finite(FiniteRvSet::new(vec![rv(&m, &[0, 0])]))
            ),
            Err(OptimizeError::NotLocal { index: 0 })
        ));
    }

    #[test]
    fn finite_feasible_set() {
        let m = RobustModel::new(vec![P::uniform(2)]).unwrap();
        let q = m.qview(P::uniform(2)).unwrap();
        let c = FiniteRvSet::new(vec![rv(&m, &[0, 0]), rv(&m, &[2, 1]), rv(&m, &[3, 3])]);
        let problem = LocalizedProblem::new(
            &m,
            vec![(q, LocalObjective::SquaredError { target: rv(&m, &[2, 2]) })],
            FeasibleSet::Finite(c),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let rep = solve_localized(&m, &problem, 0, &mut rng).unwrap();
        assert_eq!(rep.optimizer, rv(&m, &[2, 1]));
        assert_eq!(rep.samples, 3);
        assert!(rep.certified());
    }
}
