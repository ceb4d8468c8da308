use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qsloc::continuum::{expect, p_n, IntervalMixtureMeasure, MixtureComponent, PiecewiseRationalFunction, Polynomial};
use qsloc::gen;
use qsloc::lp::{solve, verify_certificates, LinearProgram, LpOutcome, Relation};
use qsloc::market::{
    check_na_geometric, ftap_check, martingale_set_element, martingale_support_union, superhedge, MartingaleSelector,
};
use qsloc::model::{dominates, support_of, total_variation, ProbabilityMeasure, RobustModel, SignedMeasure};
use qsloc::oracle::{brute_force_lp, BruteForce};
use qsloc::scalar::rat;
use qsloc::sensitivity::{classify_aggregator, is_coherent, localize_primal_e, RvFamily};
use qsloc::{Extended, OutcomeSet, Rational};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_rat() -> impl Strategy<Value = Rational> {
    (-10i64..=10, 1i64..=10).prop_map(|(n, d)| rat(n, d))
}

fn model_strategy() -> impl Strategy<Value = RobustModel<Rational>> {
    (any::<u64>(), 1usize..=8).prop_map(|(seed, n)| gen::random_model(n, 4, true, &mut rng(seed)))
}

proptest! {
    #[test]
    fn upper_probability_is_a_capacity(model in model_strategy(), a in any::<u64>(), b in any::<u64>()) {
        let n = model.n();
        let a = OutcomeSet::from_bits(a).intersection(OutcomeSet::full(n));
        let b = OutcomeSet::from_bits(b).intersection(OutcomeSet::full(n));
        let ca = model.upper_probability(a);
        prop_assert!(ca >= Rational::zero() && ca <= Rational::one());
        prop_assert_eq!(model.upper_probability(OutcomeSet::EMPTY), Rational::zero());
        prop_assert!(ca <= model.upper_probability(a.union(b)));
        prop_assert!(model.upper_probability(a.union(b)) <= ca + model.upper_probability(b));
    }

    #[test]
    fn total_variation_matches_subset_supremum(masses in prop::collection::vec(small_rat(), 1..=10), a in any::<u64>()) {
        let mu = SignedMeasure::new(masses.clone()).unwrap();
        let a = OutcomeSet::from_bits(a).intersection(OutcomeSet::full(masses.len()));
        let brute = a
            .subsets()
            .map(|s| mu.measure_of(s) - mu.measure_of(a.difference(s)))
            .max()
            .unwrap();
        prop_assert_eq!(total_variation(&mu, a), brute);
    }

    #[test]
    fn projection_is_linear(seed in any::<u64>(), n in 1usize..=6, a in small_rat(), b in small_rat()) {
        let mut r = rng(seed);
        let model: RobustModel<Rational> = gen::random_model(n, 3, true, &mut r);
        let q = gen::random_qview(&model, &mut r);
        let x = gen::random_rv(&model, -5, 5, &mut r);
        let y = gen::random_rv(&model, -5, 5, &mut r);
        let lhs = model.project(&x.scale(&a).add(&y.scale(&b)), &q).unwrap();
        let px = model.project(&x, &q).unwrap();
        let py = model.project(&y, &q).unwrap();
        let rhs: Vec<Rational> = px.iter().zip(&py).map(|(u, v)| u * &a + v * &b).collect();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn quasi_sure_order_is_antisymmetric_on_classes(seed in any::<u64>(), n in 1usize..=6) {
        let mut r = rng(seed);
        let model: RobustModel<Rational> = gen::random_model(n, 3, true, &mut r);
        let x = gen::random_rv(&model, -1, 1, &mut r);
        let y = gen::random_rv(&model, -1, 1, &mut r);
        prop_assert_eq!(model.qs_leq(&x, &y) && model.qs_leq(&y, &x), x == y);
    }

    #[test]
    fn dominating_measure_is_equivalent(model in model_strategy()) {
        let p = model.find_dominating_measure();
        prop_assert!(dominates(model.priors(), std::slice::from_ref(&p)));
        prop_assert!(dominates(std::slice::from_ref(&p), model.priors()));
    }

    #[test]
    fn order_support_conditions(seed in any::<u64>(), n in 1usize..=8) {
        let mut r = rng(seed);
        let model: RobustModel<Rational> = gen::random_model(n, 3, true, &mut r);
        let q = gen::random_measure::<Rational, _>(n, gen::random_subset(model.support_t(), &mut r), &mut r);
        let s = support_of(&q);
        prop_assert!(q.prob(s.complement(n)).is_zero());
        for b in s.subsets() {
            if q.prob(b).is_zero() {
                prop_assert!(model.is_polar(b));
            }
        }
    }

    #[test]
    fn simplex_agrees_with_vertex_enumeration(
        n in 1usize..=6,
        rows in prop::collection::vec((prop::collection::vec(small_rat(), 6), 0u8..3, small_rat()), 1..=8),
        obj in prop::collection::vec(small_rat(), 6),
        maximize in any::<bool>(),
    ) {
        let objective = obj[..n].to_vec();
        let mut lp = if maximize { LinearProgram::maximize(objective) } else { LinearProgram::minimize(objective) }.nonnegative();
        for (coeffs, rel, rhs) in rows {
            let rel = [Relation::Le, Relation::Ge, Relation::Eq][rel as usize];
            lp.push_row(coeffs[..n].to_vec(), rel, rhs);
        }
        let out = solve(&lp).unwrap();
        prop_assert!(verify_certificates(&lp, &out));
        if let Some(bf) = brute_force_lp(&lp, 20_000) {
            match (&out, bf) {
                (LpOutcome::Optimal { objective, .. }, BruteForce::Optimal(v)) => prop_assert_eq!(objective, &v),
                (LpOutcome::Infeasible { .. }, BruteForce::Infeasible) => {}
                (LpOutcome::Unbounded { .. }, BruteForce::Unbounded) => {}
                (o, b) => prop_assert!(false, "solver {:?} vs oracle {:?}", o.status(), b),
            }
        }
    }

    #[test]
    fn primal_localization_is_below_and_consistent(seed in any::<u64>(), n in 2usize..=6) {
        let mut r = rng(seed);
        let model: RobustModel<Rational> = gen::random_model(n, 3, true, &mut r);
        let rho = gen::random_risk_measure(&model, 4, false, &mut r);
        let q = gen::random_qview(&model, &mut r);
        let x = gen::random_rv(&model, -6, 6, &mut r);
        let noise = gen::random_rv(&model, -9, 9, &mut r);
        let e = localize_primal_e(&rho, &q, &x);
        prop_assert!(e <= Extended::Finite(rho.evaluate(&x)));
        prop_assert_eq!(localize_primal_e(&rho, &q, &x.patch(q.support(), &noise)), e);
    }

    #[test]
    fn relevance_closed_form_matches_definition(seed in any::<u64>(), n in 2usize..=6) {
        let mut r = rng(seed);
        let model: RobustModel<Rational> = gen::random_model(n, 3, true, &mut r);
        let rho = gen::random_risk_measure(&model, 4, false, &mut r);
        let q = gen::random_qview(&model, &mut r);
        let relevant = rho.is_relevant(&q);
        prop_assert_eq!(rho.is_relevant_by_definition(&q).unwrap(), relevant);
        let zero = model.constant(Rational::zero());
        prop_assert_eq!(localize_primal_e(&rho, &q, &zero).is_finite(), relevant);
    }

    #[test]
    fn projected_families_aggregate_to_their_source(seed in any::<u64>(), n in 1usize..=6) {
        let mut r = rng(seed);
        let model: RobustModel<Rational> = gen::random_model(n, 3, true, &mut r);
        let x = gen::random_rv(&model, -5, 5, &mut r);
        let qs: Vec<_> = (0..3).map(|_| gen::random_qview(&model, &mut r)).collect();
        let fam = RvFamily::projected(&model, &qs, &x).unwrap();
        let agg = is_coherent(&model, &fam);
        let agg = agg.aggregator().unwrap();
        prop_assert!(agg.agrees_on(&x, fam.covered()));
        prop_assert!(classify_aggregator(&fam, &x).is_ok());
    }

    #[test]
    fn dual_representation_round_trip(seed in any::<u64>(), n in 2usize..=5) {
        let mut r = rng(seed);
        let model: RobustModel<Rational> = gen::random_model(n, 3, false, &mut r);
        let rho = gen::random_risk_measure(&model, 3, false, &mut r);
        let x = gen::random_rv(&model, -6, 6, &mut r);
        let mut candidates: Vec<ProbabilityMeasure<Rational>> = rho.constraints().iter().map(|c| c.measure.clone()).collect();
        candidates.push(ProbabilityMeasure::mixture(&candidates));
        candidates.push(gen::random_measure(n, model.support_t(), &mut r));
        let mut best = Extended::NegInf;
        for c in &candidates {
            let pen = rho.conjugate(c).unwrap();
            prop_assert_eq!(&pen, &rho.conjugate_by_acceptance(c).unwrap());
            if let Extended::Finite(p) = pen {
                best = best.max(Extended::Finite(c.expect(x.values()) - p));
            }
        }
        prop_assert_eq!(best, Extended::Finite(rho.evaluate(&x)));
    }

    #[test]
    fn superhedging_price_is_coherent(seed in any::<u64>(), n in 2usize..=6, d in 1usize..=3, lam in 0i64..=6) {
        let mut r = rng(seed);
        let model: RobustModel<Rational> = gen::random_model(n, 3, true, &mut r);
        let s = gen::random_na_market(&model, d, &mut r);
        let x = gen::random_rv(&model, -5, 5, &mut r);
        let y = gen::random_rv(&model, -5, 5, &mut r);
        let bump = gen::random_rv(&model, 0, 3, &mut r);
        let pi = |z: &qsloc::Rv| superhedge(&model, &s, z).unwrap().price.into_finite().unwrap();
        prop_assert_eq!(pi(&model.constant(Rational::zero())), Rational::zero());
        let px = pi(&x);
        let m = rat(lam - 3, 2);
        let l = rat(lam, 2);
        prop_assert!(px <= pi(&x.add(&bump)));
        prop_assert_eq!(pi(&x.shift(&m)), &px + &m);
        prop_assert_eq!(pi(&x.scale(&l)), &px * &l);
        prop_assert!(pi(&x.add(&y)) <= &px + pi(&y));
    }

    #[test]
    fn na_iff_ftap_and_martingale_supports(seed in any::<u64>(), n in 2usize..=6, d in 1usize..=3, arb in any::<bool>()) {
        let mut r = rng(seed);
        let model: RobustModel<Rational> = gen::random_model(n, 3, true, &mut r);
        let s = if arb { gen::random_arbitrage_market(&model, d, false, &mut r) } else { gen::random_na_market(&model, d, &mut r) };
        let na = check_na_geometric(&model, &s).unwrap().holds;
        prop_assert_eq!(na, !arb);
        prop_assert_eq!(ftap_check(&model, &s, &MartingaleSelector::M).unwrap().dominated, na);
        if na {
            prop_assert_eq!(martingale_support_union(&model, &s).unwrap(), model.support_t());
        }
    }

    #[test]
    fn adding_assets_shrinks_martingale_sets(seed in any::<u64>(), n in 2usize..=6) {
        let mut r = rng(seed);
        let model: RobustModel<Rational> = gen::random_model(n, 3, true, &mut r).with_convex_hull(r.gen_bool(0.5));
        let s = gen::random_na_market(&model, 1, &mut r);
        let extra = gen::random_na_market(&model, 1, &mut r);
        let big = s.extend(&extra).unwrap();
        for sel in [MartingaleSelector::M, MartingaleSelector::MDominated, MartingaleSelector::MEquivalent] {
            if let Some(q) = martingale_set_element(&model, &big, &sel).unwrap() {
                prop_assert!(s.is_martingale_measure(&q));
                prop_assert!(martingale_set_element(&model, &s, &sel).unwrap().is_some());
            }
        }
    }

    #[test]
    fn mixture_expectation_is_linear(
        w in 1i64..=9,
        f in prop::collection::vec(-5i64..=5, 4),
        g in prop::collection::vec(-5i64..=5, 4),
        a in small_rat(),
    ) {
        let lin = |c: &[i64]| {
            PiecewiseRationalFunction::new(
                vec![Rational::zero(), rat(1, 3), Rational::one()],
                vec![
                    Polynomial::new(vec![rat(c[0], 1), rat(c[1], 1)]).unwrap(),
                    Polynomial::new(vec![rat(c[2], 1), rat(c[3], 1)]).unwrap(),
                ],
            )
            .unwrap()
        };
        let (f, g) = (lin(&f), lin(&g));
        let mu = IntervalMixtureMeasure::new(vec![
            MixtureComponent { weight: rat(w, 10), lo: rat(0, 1), hi: rat(1, 2) },
            MixtureComponent { weight: rat(10 - w, 10), lo: rat(1, 4), hi: rat(1, 1) },
        ])
        .unwrap();
        prop_assert_eq!(expect(&mu, &f.scale(&a).add(&g)), expect(&mu, &f) * &a + expect(&mu, &g));
        prop_assert_eq!(expect(&mu, &PiecewiseRationalFunction::constant(Rational::one())), Rational::one());
        let u1 = IntervalMixtureMeasure::uniform(rat(0, 1), rat(1, 2)).unwrap();
        let u2 = IntervalMixtureMeasure::uniform(rat(1, 4), rat(1, 1)).unwrap();
        prop_assert_eq!(expect(&mu, &f), expect(&u1, &f) * rat(w, 10) + expect(&u2, &f) * rat(10 - w, 10));
    }

    #[test]
    fn pn_is_a_probability(n in 1u64..=500) {
        prop_assert_eq!(expect(&p_n(n), &PiecewiseRationalFunction::constant(Rational::one())), Rational::one());
    }
}
