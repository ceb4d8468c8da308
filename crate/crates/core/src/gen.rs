//! Seeded generators for randomized instances with small rational data.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::lp::{LinearProgram, Relation};
use crate::market::MarketModel;
use crate::model::{ProbabilityMeasure, QView, RandomVariable, RobustModel};
use crate::outcomes::OutcomeSet;
use crate::risk::{Constraint, MaxAffineRiskMeasure};
use crate::scalar::Scalar;
use crate::sensitivity::RvFamily;

/// Non-empty random subset of `within`.
pub fn random_subset<R: Rng + ?Sized>(within: OutcomeSet, rng: &mut R) -> OutcomeSet {
    let items: Vec<usize> = within.iter().collect();
    assert!(!items.is_empty(), "cannot draw from an empty set");
    loop {
        let s = OutcomeSet::from_indices(items.iter().copied().filter(|_| rng.gen_bool(0.5)));
        if !s.is_empty() {
            return s;
        }
    }
}

/// Measure with integer weights in `1..=5` on `support`, normalized.
pub fn random_measure<T: Scalar, R: Rng + ?Sized>(n: usize, support: OutcomeSet, rng: &mut R) -> ProbabilityMeasure<T> {
    let weights: Vec<i64> = (0..n).map(|w| if support.contains(w) { rng.gen_range(1..=5) } else { 0 }).collect();
    let total: i64 = weights.iter().sum();
    ProbabilityMeasure::new(weights.iter().map(|&k| T::from_ratio(k, total)).collect()).expect("normalized")
}

/// Robust model with `1..=max_priors` priors on random supports. With
/// `allow_polar`, the last outcome may be left uncharged.
pub fn random_model<T: Scalar, R: Rng + ?Sized>(n: usize, max_priors: usize, allow_polar: bool, rng: &mut R) -> RobustModel<T> {
    let full = OutcomeSet::full(n);
    let target = if allow_polar && n > 1 && rng.gen_bool(0.3) {
        full.difference(OutcomeSet::singleton(n - 1))
    } else {
        full
    };
    let k = rng.gen_range(1..=max_priors.max(1));
    let mut priors: Vec<ProbabilityMeasure<T>> = (0..k).map(|_| random_measure(n, random_subset(target, rng), rng)).collect();
    let covered = priors.iter().fold(OutcomeSet::EMPTY, |acc, p| acc.union(p.support()));
    let missing = target.difference(covered);
    if !missing.is_empty() {
        priors.push(random_measure(n, missing, rng));
    }
    RobustModel::new(priors).expect("valid priors")
}

/// Integer values in `lo..=hi` on the non-polar outcomes.
pub fn random_rv<T: Scalar, R: Rng + ?Sized>(model: &RobustModel<T>, lo: i64, hi: i64, rng: &mut R) -> RandomVariable<T> {
    let v = (0..model.n()).map(|_| T::from_int(rng.gen_range(lo..=hi))).collect();
    model.rv(v).expect("length matches the model")
}

/// Measure absolutely continuous w.r.t. the upper probability.
pub fn random_qview<T: Scalar, R: Rng + ?Sized>(model: &RobustModel<T>, rng: &mut R) -> QView<T> {
    let q = random_measure(model.n(), random_subset(model.support_t(), rng), rng);
    model.qview(q).expect("supported in T")
}

/// Max-affine risk measure with `1..=max_constraints` constraints supported in
/// `T`; penalties are zero when `coherent`, otherwise integers in `-3..=3`.
pub fn random_risk_measure<T: Scalar, R: Rng + ?Sized>(
    model: &RobustModel<T>,
    max_constraints: usize,
    coherent: bool,
    rng: &mut R,
) -> MaxAffineRiskMeasure<T> {
    let k = rng.gen_range(1..=max_constraints.max(1));
    let cs = (0..k)
        .map(|_| Constraint {
            measure: random_measure(model.n(), random_subset(model.support_t(), rng), rng),
            penalty: if coherent { T::zero() } else { T::from_int(rng.gen_range(-3..=3)) },
        })
        .collect();
    MaxAffineRiskMeasure::in_model(model, cs).expect("constraints live in the model")
}

/// Market on `model` admitting a martingale measure strictly positive on `T`,
/// hence free of arbitrage. Terminal prices are integers in `0..=6`.
pub fn random_na_market<T: Scalar, R: Rng + ?Sized>(model: &RobustModel<T>, d: usize, rng: &mut R) -> MarketModel<T> {
    let n = model.n();
    let q: ProbabilityMeasure<T> = random_measure(n, model.support_t(), rng);
    let s1: Vec<Vec<T>> = (0..d).map(|_| (0..n).map(|_| T::from_int(rng.gen_range(0..=6))).collect()).collect();
    let s0 = s1.iter().map(|row| q.expect(row)).collect();
    MarketModel::new(s0, s1).expect("non-negative prices")
}

/// Market with an arbitrage in its first asset: `Delta S^1 >= 0` on `T`,
/// strictly positive somewhere. With `strong`, strictly positive on all of `T`.
pub fn random_arbitrage_market<T: Scalar, R: Rng + ?Sized>(
    model: &RobustModel<T>,
    d: usize,
    strong: bool,
    rng: &mut R,
) -> MarketModel<T> {
    let n = model.n();
    let t: Vec<usize> = model.support_t().iter().collect();
    let mut first: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=6)).collect();
    let floor = *t.iter().map(|&w| &first[w]).min().expect("T is non-empty");
    let s0_first = if strong { floor - 1 } else { floor };
    if !strong && t.iter().all(|&w| first[w] == floor) {
        let &w = t.choose(rng).expect("T is non-empty");
        first[w] += 1;
    }
    let mut s0 = vec![T::from_int(s0_first)];
    let mut s1 = vec![first.into_iter().map(T::from_int).collect::<Vec<T>>()];
    for _ in 1..d {
        let row: Vec<T> = (0..n).map(|_| T::from_int(rng.gen_range(0..=6))).collect();
        s0.push(T::from_int(rng.gen_range(0..=6)));
        s1.push(row);
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.shuffle(rng);
    let s0 = order.iter().map(|&i| s0[i].clone()).collect();
    let s1 = order.iter().map(|&i| s1[i].clone()).collect();
    MarketModel::new(s0, s1).expect("non-negative prices")
}

/// Random LP with `m` rows over `n` variables, coefficients in `-4..=4`. With
/// `bounded`, variables are boxed in `[0, 10]`; otherwise only non-negative.
pub fn random_lp<T: Scalar, R: Rng + ?Sized>(m: usize, n: usize, bounded: bool, rng: &mut R) -> LinearProgram<T> {
    let obj = (0..n).map(|_| T::from_int(rng.gen_range(-4..=4))).collect();
    let mut lp = if rng.gen_bool(0.5) {
        LinearProgram::minimize(obj)
    } else {
        LinearProgram::maximize(obj)
    }
    .nonnegative();
    if bounded {
        for j in 0..n {
            lp.upper[j] = Some(T::from_int(10));
        }
    }
    for _ in 0..m {
        let coeffs = (0..n).map(|_| T::from_int(rng.gen_range(-4..=4))).collect();
        let rel = match rng.gen_range(0..5) {
            0 => Relation::Eq,
            1 | 2 => Relation::Ge,
            _ => Relation::Le,
        };
        lp.push_row(coeffs, rel, T::from_int(rng.gen_range(-6..=12)));
    }
    lp
}

/// Bliss-point instance: priors with overlapping supports, bounds `A <= B`
/// and targets agreeing with one global variable on each prior's support.
pub struct BlissInstance<T> {
    pub model: RobustModel<T>,
    pub lower: RandomVariable<T>,
    pub upper: RandomVariable<T>,
    pub targets: RvFamily<T>,
}

pub fn random_bliss_instance<T: Scalar, R: Rng + ?Sized>(n: usize, priors: usize, rng: &mut R) -> BlissInstance<T> {
    let model: RobustModel<T> = random_model(n, priors, false, rng);
    let a: Vec<i64> = (0..n).map(|_| rng.gen_range(-4..=2)).collect();
    let b: Vec<i64> = a.iter().map(|&x| x + rng.gen_range(0..=5)).collect();
    let lower = model.rv(a.iter().map(|&x| T::from_int(x)).collect()).expect("length");
    let upper = model.rv(b.iter().map(|&x| T::from_int(x)).collect()).expect("length");
    let global: Vec<T> = (0..n).map(|_| T::from_ratio(rng.gen_range(-16..=16), 2)).collect();
    let entries = model
        .priors()
        .iter()
        .map(|p| {
            let s = p.support();
            let y = (0..n)
                .map(|w| if s.contains(w) { global[w].clone() } else { T::from_int(rng.gen_range(-9..=9)) })
                .collect();
            (model.qview(p.clone()).expect("prior"), model.rv(y).expect("length"))
        })
        .collect();
    let targets = RvFamily::new(&model, entries).expect("valid family");
    BlissInstance {
        model,
        lower,
        upper,
        targets,
    }
}
