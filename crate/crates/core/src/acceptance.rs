//! The acceptance suite: one deterministic check per criterion, each
//! reporting a pass/fail verdict and a short detail line.

use std::fmt;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::continuum::{
    self, kappa_report, expect, p_n, rho_truncated, y_function, PiecewiseRationalFunction, Polynomial,
};
use crate::gen;
use crate::lp::{check_certificates, solve, LinearProgram, LpOutcome, Relation};
use crate::market::{
    check_na_for_measure, check_na_geometric, ftap_check, martingale_polytope_vertices, superhedge, superhedge_dual,
    superhedge_localized_d, superhedge_localized_e, superhedge_q, MarketModel, MartingaleSelector,
    DEFAULT_VERTEX_BOUND,
};
use crate::model::{QView, RandomVariable, RobustModel};
use crate::optimize::{bliss_point, bliss_problem, solve_localized};
use crate::oracle::{brute_force_lp, BruteForce};
use crate::risk::MaxAffineRiskMeasure;
use crate::scalar::{rat, Extended, Scalar};
use crate::sensitivity::{localization_identity_check, localize_primal_e, sup_localized};

type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} [{}] {}: {}", self.id, self.title, self.detail)
    }
}

pub const CRITERIA: [(u32, &str); 10] = [
    (1, "interval-mixture expectations"),
    (2, "bubble table"),
    (3, "finite localization bubble"),
    (4, "superhedging duality"),
    (5, "FTAP equivalence"),
    (6, "localization identity"),
    (7, "no finite bubble"),
    (8, "property suites"),
    (9, "LP solver"),
    (10, "bliss point"),
];

fn outcome(id: u32, passed: bool, detail: String) -> CriterionOutcome {
    CriterionOutcome {
        id,
        title: CRITERIA[id as usize - 1].1,
        passed,
        detail,
    }
}

/// Runs one criterion by number.
pub fn run(id: u32) -> Option<CriterionOutcome> {
    Some(match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        9 => criterion_9(),
        10 => criterion_10(),
        _ => return None,
    })
}

pub fn run_all() -> Vec<CriterionOutcome> {
    CRITERIA.iter().filter_map(|&(id, _)| run(id)).collect()
}

fn ms(d: Duration) -> String {
    format!("{} ms", d.as_millis())
}

/// `E_{P_n}[Y] = -2/(n(n+1))` for `n = 1..=100` in under a second.
pub fn criterion_1() -> CriterionOutcome {
    let start = Instant::now();
    let y = y_function();
    let mismatches: Vec<i64> = (1..=100i64)
        .filter(|&n| expect(&p_n(n as u64), &y) != rat(-2, n * (n + 1)))
        .collect();
    let elapsed = start.elapsed();
    let passed = mismatches.is_empty() && elapsed < Duration::from_secs(1);
    outcome(1, passed, format!("100 values, {} mismatches, {}", mismatches.len(), ms(elapsed)))
}

/// `g(m, N) = -m/N` on a 10x10 grid and the two one-sided limits.
pub fn criterion_2() -> CriterionOutcome {
    let zero = PiecewiseRationalFunction::constant(Q::zero());
    let grid: Vec<i64> = (1..=10).collect();
    let ns: Vec<u64> = (1..=10).collect();
    let table = continuum::bubble_table(&zero, &grid, &ns).expect("non-empty grid");
    let bad = table.iter().filter(|r| r.value != rat(-r.m, r.n as i64)).count();
    let g_5_500 = continuum::bubble_table(&zero, &[5], &[500]).expect("grid")[0].value.clone();
    let g_100_5 = continuum::bubble_table(&zero, &[100], &[5]).expect("grid")[0].value.clone();
    let passed = bad == 0 && g_5_500 >= rat(-1, 100) && g_100_5 <= rat(-20, 1);
    outcome(
        2,
        passed,
        format!("{} grid cells, {bad} mismatches; g(5,500) = {g_5_500}; g(100,5) = {g_100_5}", table.len()),
    )
}

/// `kappa^Q_D(W) = -1/2`, truncations in `[-(m+1)/N, 0]` and increasing to
/// 0, and a gap of at least 49/100 at `(m, N) = (10, 1000)`.
pub fn criterion_3() -> CriterionOutcome {
    let ms_grid = [0i64, 1, 2, 5, 10];
    let ns_grid = [1u64, 2, 5, 10, 50, 100, 500, 1000];
    let rep = kappa_report(&ms_grid, &ns_grid).expect("non-empty grid");
    let kappa_d_ok = rep.kappa_d == rat(-1, 2);
    let out_of_band: Vec<(i64, u64)> = rep
        .rows
        .iter()
        .filter(|r| r.kappa > Q::zero() || r.kappa < rat(-(r.m + 1), r.n as i64) || r.kappa != r.closed_form)
        .map(|r| (r.m, r.n))
        .collect();
    let increasing = ms_grid.iter().all(|&m| {
        let col: Vec<&Q> = rep.rows.iter().filter(|r| r.m == m).map(|r| &r.kappa).collect();
        col.windows(2).all(|w| w[0] <= w[1])
    });
    let gap = rep
        .rows
        .iter()
        .find(|r| r.m == 10 && r.n == 1000)
        .map(|r| r.gap.clone())
        .expect("grid contains (10, 1000)");
    let gap_ok = gap >= rat(49, 100);
    let passed = kappa_d_ok && out_of_band.is_empty() && increasing && gap_ok;
    outcome(
        3,
        passed,
        format!(
            "kappa_D(W) = {}; {} rows, {} outside [-(m+1)/N, 0]; nondecreasing in N: {increasing}; gap(10,1000) = {gap} ~ {:.6} (needs >= 49/100)",
            rep.kappa_d,
            rep.rows.len(),
            out_of_band.len(),
            gap.approx()
        ),
    )
}

/// Randomized markets free of arbitrage, with claims to price.
pub fn na_corpus(seed: u64, count: usize) -> Vec<(RobustModel<Q>, MarketModel<Q>, RandomVariable<Q>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(2..=6);
            let d = rng.gen_range(1..=3);
            let model: RobustModel<Q> = gen::random_model(n, 3, true, &mut rng);
            let s = gen::random_na_market(&model, d, &mut rng);
            let x = gen::random_rv(&model, -5, 5, &mut rng);
            (model, s, x)
        })
        .collect()
}

/// Randomized markets with an arbitrage, half of them strong.
pub fn arbitrage_corpus(seed: u64, count: usize) -> Vec<(RobustModel<Q>, MarketModel<Q>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let n = rng.gen_range(2..=6);
            let d = rng.gen_range(1..=3);
            let model: RobustModel<Q> = gen::random_model(n, 3, true, &mut rng);
            let s = gen::random_arbitrage_market(&model, d, i % 2 == 0, &mut rng);
            (model, s)
        })
        .collect()
}

const MARKET_SEED: u64 = 4;
const MARKET_COUNT: usize = 200;
const ARBITRAGE_SEED: u64 = 5;
const ARBITRAGE_COUNT: usize = 60;

/// Primal price = dual price = best vertex of the martingale polytope.
pub fn criterion_4() -> CriterionOutcome {
    let start = Instant::now();
    let corpus = na_corpus(MARKET_SEED, MARKET_COUNT);
    let mut failures = Vec::new();
    for (k, (model, s, x)) in corpus.iter().enumerate() {
        let primal = superhedge(model, s, x).expect("solvable").price;
        let dual = superhedge_dual(model, s, x, &MartingaleSelector::M).ok();
        let verts = martingale_polytope_vertices(model, s, DEFAULT_VERTEX_BOUND).expect("within bound");
        let best = verts.iter().map(|q| q.expect(x.values())).max();
        let agree = match (primal.finite(), &dual, &best) {
            (Some(p), Some(d), Some(b)) => p == d && d == b,
            _ => false,
        };
        if !agree {
            failures.push(k);
        }
    }
    let elapsed = start.elapsed();
    let passed = failures.is_empty() && elapsed < Duration::from_secs(30);
    outcome(
        4,
        passed,
        format!("{} markets, {} disagreements {:?}, {}", corpus.len(), failures.len(), failures, ms(elapsed)),
    )
}

/// NA agrees with domination by martingale measures for each selector.
pub fn criterion_5() -> CriterionOutcome {
    let mut markets: Vec<(RobustModel<Q>, MarketModel<Q>, bool)> = na_corpus(MARKET_SEED, MARKET_COUNT)
        .into_iter()
        .map(|(m, s, _)| (m, s, true))
        .collect();
    markets.extend(
        arbitrage_corpus(ARBITRAGE_SEED, ARBITRAGE_COUNT)
            .into_iter()
            .map(|(m, s)| (m, s, false)),
    );
    let mut checks = 0usize;
    let mut disagreements = 0usize;
    let mut generator_mismatch = 0usize;
    for (model, s, expected_na) in &markets {
        let na = check_na_geometric(model, s).expect("solvable").holds;
        if na != *expected_na {
            generator_mismatch += 1;
        }
        let convex = model.clone().with_convex_hull(true);
        let runs = [
            (model, MartingaleSelector::M),
            (&convex, MartingaleSelector::MDominated),
            (&convex, MartingaleSelector::MEquivalent),
        ];
        for (m, sel) in runs {
            let rep = ftap_check(m, s, &sel).expect("solvable");
            checks += 1;
            if rep.na.holds != na || !rep.consistent() {
                disagreements += 1;
            }
        }
    }
    let passed = disagreements == 0 && generator_mismatch == 0;
    outcome(
        5,
        passed,
        format!(
            "{} markets ({ARBITRAGE_COUNT} with arbitrage), {checks} selector checks, {disagreements} disagreements, {generator_mismatch} generator mismatches",
            markets.len()
        ),
    )
}

fn risk_corpus(seed: u64, count: usize) -> Vec<(RobustModel<Q>, MaxAffineRiskMeasure<Q>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let n = rng.gen_range(2..=6);
            let model: RobustModel<Q> = gen::random_model(n, 3, true, &mut rng);
            let rho = gen::random_risk_measure(&model, 4, i % 2 == 0, &mut rng);
            (model, rho)
        })
        .collect()
}

/// `rho(X) = sup_Q rho^Q_E(X)` over the relevant candidates.
pub fn criterion_6() -> CriterionOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let corpus = risk_corpus(60, 100);
    let mut violations = 0usize;
    let mut samples = 0usize;
    for (model, rho) in &corpus {
        let mut candidates: Vec<QView<Q>> = rho
            .constraints()
            .iter()
            .map(|c| model.qview(c.measure.clone()).expect("in model"))
            .collect();
        candidates.push(model.qview(model.find_dominating_measure()).expect("in model"));
        let qset = rho.q_rel_set(&candidates);
        let xs: Vec<RandomVariable<Q>> = (0..20).map(|_| gen::random_rv(model, -6, 6, &mut rng)).collect();
        let rep = localization_identity_check(rho, &qset, &xs);
        samples += rep.rows.len();
        violations += rep.violations();
    }
    outcome(
        6,
        violations == 0,
        format!("{} risk measures, {samples} samples, {violations} violations", corpus.len()),
    )
}

/// `rho^Q_E = rho^Q_D` on random finite triples.
pub fn criterion_7() -> CriterionOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let corpus = risk_corpus(70, 125);
    let mut triples = 0usize;
    let mut mismatches = 0usize;
    let mut irrelevant = 0usize;
    for (model, rho) in &corpus {
        for _ in 0..4 {
            let q = gen::random_qview(model, &mut rng);
            let x = gen::random_rv(model, -6, 6, &mut rng);
            let e = localize_primal_e(rho, &q, &x);
            let d = rho.localize_dual_d(&q, &x).expect("solvable");
            triples += 1;
            if e == Extended::NegInf {
                irrelevant += 1;
            }
            if e != d {
                mismatches += 1;
            }
        }
    }
    outcome(
        7,
        mismatches == 0 && triples >= 500,
        format!("{triples} triples ({irrelevant} with both sides -inf), {mismatches} mismatches"),
    )
}

fn nonneg_rv(model: &RobustModel<Q>, rng: &mut ChaCha8Rng) -> RandomVariable<Q> {
    gen::random_rv(model, 0, 4, rng)
}

/// Coherence axioms of `evaluate`; returns violation count and checks made.
fn evaluate_axioms(rng: &mut ChaCha8Rng) -> (usize, usize) {
    let mut bad = 0;
    let mut checks = 0;
    for (model, rho) in risk_corpus(80, 150) {
        let x = gen::random_rv(&model, -6, 6, rng);
        let y = gen::random_rv(&model, -6, 6, rng);
        let bump = nonneg_rv(&model, rng);
        let m = Q::from_integer(rng.gen_range(-5..=5).into());
        let rx = rho.evaluate(&x);
        let mut ok = vec![
            rx <= rho.evaluate(&x.add(&bump)),
            rho.evaluate(&x.shift(&m)) == &rx + &m,
            rho.evaluate(&x.scale(&rat(1, 3)).add(&y.scale(&rat(2, 3)))) <= &rx * rat(1, 3) + rho.evaluate(&y) * rat(2, 3),
        ];
        if rho.is_coherent() {
            for lam in [rat(0, 1), rat(1, 2), rat(1, 1), rat(3, 1)] {
                ok.push(rho.evaluate(&x.scale(&lam)) == &rx * &lam);
            }
            ok.push(rho.evaluate(&x.add(&y)) <= &rx + rho.evaluate(&y));
        }
        checks += ok.len();
        bad += ok.iter().filter(|b| !**b).count();
    }
    (bad, checks)
}

fn random_piecewise(rng: &mut ChaCha8Rng) -> PiecewiseRationalFunction {
    let mut cuts: Vec<i64> = (1..8).filter(|_| rng.gen_bool(0.4)).collect();
    cuts.sort_unstable();
    let mut bps = vec![Q::zero()];
    bps.extend(cuts.iter().map(|&k| rat(k, 8)));
    bps.push(Q::one());
    let pieces = (0..bps.len() - 1)
        .map(|_| {
            Polynomial::new(vec![
                Q::from_integer(rng.gen_range(-4..=4).into()),
                Q::from_integer(rng.gen_range(-3..=3).into()),
            ])
            .expect("linear")
        })
        .collect();
    PiecewiseRationalFunction::new(bps, pieces).expect("valid breakpoints")
}

fn nonneg_piecewise(rng: &mut ChaCha8Rng) -> PiecewiseRationalFunction {
    let cut = rat(rng.gen_range(1..8), 8);
    PiecewiseRationalFunction::new(
        vec![Q::zero(), cut, Q::one()],
        vec![
            Polynomial::constant(Q::from_integer(rng.gen_range(0..=3).into())),
            Polynomial::new(vec![Q::zero(), Q::from_integer(rng.gen_range(0..=3).into())]).expect("linear"),
        ],
    )
    .expect("valid")
}

/// Coherence of the truncated risk measures on random piecewise functions.
fn truncated_axioms(rng: &mut ChaCha8Rng) -> (usize, usize) {
    let mut bad = 0;
    let mut checks = 0;
    for _ in 0..60 {
        let x = random_piecewise(rng);
        let y = random_piecewise(rng);
        let bump = nonneg_piecewise(rng);
        let n = [1u64, 3, 10][rng.gen_range(0..3)];
        let m = Q::from_integer(rng.gen_range(-5..=5).into());
        let r = |f: &PiecewiseRationalFunction| rho_truncated(f, n).expect("n >= 1");
        let rx = r(&x);
        let mut ok = vec![
            rx <= r(&x.add(&bump)),
            r(&x.shift(&m)) == &rx + &m,
            r(&x.add(&y)) <= &rx + r(&y),
        ];
        for lam in [rat(0, 1), rat(1, 2), rat(1, 1), rat(3, 1)] {
            ok.push(r(&x.scale(&lam)) == &rx * &lam);
        }
        checks += ok.len();
        bad += ok.iter().filter(|b| !**b).count();
    }
    (bad, checks)
}

/// Transfer of monotonicity, cash-additivity, convexity, homogeneity and
/// subadditivity to `rho^Q_E`.
fn transfer_properties(rng: &mut ChaCha8Rng) -> (usize, usize) {
    let mut bad = 0;
    let mut checks = 0;
    for (model, rho) in risk_corpus(81, 150) {
        let q = gen::random_qview(&model, rng);
        let x = gen::random_rv(&model, -6, 6, rng);
        let y = gen::random_rv(&model, -6, 6, rng);
        let m = Q::from_integer(rng.gen_range(-5..=5).into());
        let f = |z: &RandomVariable<Q>| localize_primal_e(&rho, &q, z);
        let fx = f(&x);
        // Raise on S(Q), arbitrary elsewhere: j_Q(X) <= j_Q(Z).
        let noise = gen::random_rv(&model, -9, 9, rng);
        let raised = x.add(&nonneg_rv(&model, rng)).patch(q.support(), &noise);
        let mix = x.scale(&rat(1, 2)).add(&y.scale(&rat(1, 2)));
        let convex_rhs = match (&fx, &f(&y)) {
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a * rat(1, 2) + b * rat(1, 2)),
            (a, b) => a.clone().max(b.clone()),
        };
        let mut ok = vec![fx <= f(&raised), f(&x.shift(&m)) == fx.shift(&m), f(&mix) <= convex_rhs];
        if rho.is_coherent() {
            for lam in [rat(1, 2), rat(1, 1), rat(3, 1)] {
                ok.push(f(&x.scale(&lam)) == fx.scale_pos(&lam));
            }
            ok.push(f(&x.add(&y)) <= fx.add_lower(&f(&y)));
        }
        checks += ok.len();
        bad += ok.iter().filter(|b| !**b).count();
    }
    (bad, checks)
}

/// `pi^Q_D <= pi^Q <= pi^Q_E <= pi`, with `pi^Q = pi^Q_E` always and
/// `pi^Q_D = pi^Q` under NA(Q, S).
fn superhedging_chain(rng: &mut ChaCha8Rng) -> (usize, usize, usize) {
    let mut markets: Vec<(RobustModel<Q>, MarketModel<Q>)> =
        na_corpus(82, 150).into_iter().map(|(m, s, _)| (m, s)).collect();
    markets.extend(arbitrage_corpus(83, 50));
    let mut bad = 0;
    let mut checks = 0;
    let mut pairs = 0;
    for (model, s) in &markets {
        for _ in 0..3 {
            let q = gen::random_qview(model, rng);
            let x = gen::random_rv(model, -5, 5, rng);
            pairs += 1;
            let d = superhedge_localized_d(model, s, &q, &x).expect("solvable");
            let pq = superhedge_q(model, s, &q, &x).expect("solvable").price;
            let e = superhedge_localized_e(model, s, &q, &x).expect("solvable");
            let p = superhedge(model, s, &x).expect("solvable").price;
            let mut ok = vec![d <= pq, pq <= e, e <= p, pq == e];
            if check_na_for_measure(s, q.measure()).expect("solvable").holds {
                ok.push(d == pq);
            }
            checks += ok.len();
            bad += ok.iter().filter(|b| !**b).count();
        }
    }
    (bad, checks, pairs)
}

/// `f^Q_E <= f`, `f^{Q}_E <= f^{Q'}_E` for nested families, and
/// `rho^Q_D <= rho^Q_E <= rho`.
fn orderings(rng: &mut ChaCha8Rng) -> (usize, usize) {
    let mut bad = 0;
    let mut checks = 0;
    for (model, rho) in risk_corpus(84, 150) {
        let qs: Vec<QView<Q>> = (0..3).map(|_| gen::random_qview(&model, rng)).collect();
        let x = gen::random_rv(&model, -6, 6, rng);
        let f = Extended::Finite(rho.evaluate(&x));
        let small = sup_localized(&rho, &qs[..1], &x);
        let large = sup_localized(&rho, &qs, &x);
        let e = localize_primal_e(&rho, &qs[0], &x);
        let d = rho.localize_dual_d(&qs[0], &x).expect("solvable");
        let ok = [e <= f, small <= large, large <= f, d <= e];
        checks += ok.len();
        bad += ok.iter().filter(|b| !**b).count();
    }
    (bad, checks)
}

pub fn criterion_8() -> CriterionOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (b1, c1) = evaluate_axioms(&mut rng);
    let (b2, c2) = truncated_axioms(&mut rng);
    let (b3, c3) = transfer_properties(&mut rng);
    let (b4, c4, pairs) = superhedging_chain(&mut rng);
    let (b5, c5) = orderings(&mut rng);
    let bad = b1 + b2 + b3 + b4 + b5;
    outcome(
        8,
        bad == 0 && pairs >= 500,
        format!(
            "evaluate {b1}/{c1}, truncated {b2}/{c2}, transfer {b3}/{c3}, chain {b4}/{c4} over {pairs} (Q, X), orderings {b5}/{c5} (violations/checks)"
        ),
    )
}

/// Degenerate programs on which naive pivot rules cycle.
pub fn cycling_corpus() -> Vec<LinearProgram<Q>> {
    let r = |v: i64| Q::from_integer(v.into());
    vec![
        LinearProgram::minimize(vec![rat(-3, 4), r(150), rat(-1, 50), r(6)])
            .nonnegative()
            .row(vec![rat(1, 4), r(-60), rat(-1, 25), r(9)], Relation::Le, r(0))
            .row(vec![rat(1, 2), r(-90), rat(-1, 50), r(3)], Relation::Le, r(0))
            .row(vec![r(0), r(0), r(1), r(0)], Relation::Le, r(1)),
        LinearProgram::minimize(vec![rat(-3, 4), r(20), rat(-1, 2), r(6)])
            .nonnegative()
            .row(vec![rat(1, 4), r(-8), r(-1), r(9)], Relation::Le, r(0))
            .row(vec![rat(1, 2), r(-12), rat(-1, 2), r(3)], Relation::Le, r(0))
            .row(vec![r(0), r(0), r(1), r(0)], Relation::Le, r(1)),
        LinearProgram::minimize(vec![r(-2), r(-3), r(1), r(12)])
            .nonnegative()
            .row(vec![r(-2), r(-9), r(1), r(9)], Relation::Le, r(0))
            .row(vec![rat(1, 3), r(1), rat(-1, 3), r(-2)], Relation::Le, r(0))
            .row(vec![r(2), r(3), r(-1), r(-12)], Relation::Le, r(2)),
        LinearProgram::maximize(vec![r(10), r(-57), r(-9), r(-24)])
            .nonnegative()
            .row(vec![rat(1, 2), rat(-11, 2), rat(-5, 2), r(9)], Relation::Le, r(0))
            .row(vec![rat(1, 2), rat(-3, 2), rat(-1, 2), r(1)], Relation::Le, r(0))
            .row(vec![r(1), r(0), r(0), r(0)], Relation::Le, r(1)),
    ]
}

pub const BRUTE_FORCE_BUDGET: usize = 5_000;

pub fn criterion_9() -> CriterionOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut cert_fail = 0usize;
    let mut compared = 0usize;
    let mut oracle_fail = 0usize;
    let mut statuses = [0usize; 3];
    for i in 0..1000 {
        let n = rng.gen_range(1..=4);
        let m = rng.gen_range(1..=4);
        let lp: LinearProgram<Q> = gen::random_lp(m, n, i % 2 == 0, &mut rng);
        let out = solve(&lp).expect("well-formed");
        statuses[match out {
            LpOutcome::Optimal { .. } => 0,
            LpOutcome::Infeasible { .. } => 1,
            LpOutcome::Unbounded { .. } => 2,
        }] += 1;
        if check_certificates(&lp, &out).is_err() {
            cert_fail += 1;
        }
        if let Some(bf) = brute_force_lp(&lp, BRUTE_FORCE_BUDGET) {
            compared += 1;
            let agree = match (&out, &bf) {
                (LpOutcome::Optimal { objective, .. }, BruteForce::Optimal(v)) => objective == v,
                (LpOutcome::Infeasible { .. }, BruteForce::Infeasible) => true,
                (LpOutcome::Unbounded { .. }, BruteForce::Unbounded) => true,
                _ => false,
            };
            if !agree {
                oracle_fail += 1;
            }
        }
    }
    let corpus = cycling_corpus();
    let cycling_fail = corpus
        .iter()
        .filter(|lp| !solve(lp).is_ok_and(|out| check_certificates(lp, &out).is_ok()))
        .count();
    let passed = cert_fail == 0 && oracle_fail == 0 && compared == 1000 && cycling_fail == 0;
    outcome(
        9,
        passed,
        format!(
            "1000 programs ({} optimal, {} infeasible, {} unbounded), {cert_fail} certificate failures, {oracle_fail}/{compared} oracle disagreements, {cycling_fail}/{} degenerate programs failed",
            statuses[0],
            statuses[1],
            statuses[2],
            corpus.len()
        ),
    )
}

pub const BLISS_SAMPLES: usize = 10_000;

pub fn criterion_10() -> CriterionOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut failed = Vec::new();
    let mut total_samples = 0usize;
    for k in 0..20 {
        let n = rng.gen_range(3..=5);
        let priors = rng.gen_range(2..=3);
        let inst = gen::random_bliss_instance::<Q, _>(n, priors, &mut rng);
        let x = bliss_point(&inst.model, &inst.lower, &inst.upper, &inst.targets);
        let problem = bliss_problem(&inst.model, &inst.lower, &inst.upper, &inst.targets);
        let ok = match (x, problem) {
            (Ok(x), Ok(problem)) => match solve_localized(&inst.model, &problem, BLISS_SAMPLES, &mut rng) {
                Ok(rep) => {
                    total_samples += rep.samples;
                    rep.optimizer == x && rep.certified() && rep.samples >= BLISS_SAMPLES
                }
                Err(_) => false,
            },
            _ => false,
        };
        if !ok {
            failed.push(k);
        }
    }
    outcome(
        10,
        failed.is_empty(),
        format!("20 instances, {total_samples} sampled points, failed instances {failed:?}"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outcome_formatting() {
        let o = outcome(2, true, "ok".into());
        assert_eq!(o.to_string(), "PASS [2] bubble table: ok");
        assert!(run(11).is_none());
    }

    #[test]
    fn cycling_corpus_terminates() {
        for lp in cycling_corpus() {
            let out = solve(&lp).unwrap();
            check_certificates(&lp, &out).unwrap();
        }
    }
}
