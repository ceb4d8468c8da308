use anyhow::{anyhow, bail, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qsloc::continuum::{self, PiecewiseRationalFunction};
use qsloc::market::{self, MarketError};
use qsloc::optimize::{bliss_point, bliss_problem, solve_localized};
use qsloc::scalar::{rat, Extended};
use qsloc::sensitivity::{self, Coherence, DEFAULT_STABILITY_BUDGET};
use qsloc::{acceptance, FiniteRvSet, QView, Rational, RvFamily};

use crate::report::{Report, Table};
use crate::scenario::{num_value, Resolved, Scenario};

pub struct Options {
    pub seed: u64,
    pub truncation: Option<u64>,
}

fn fmt_vec<T: std::fmt::Display>(v: &[T]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn yes(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

fn outcome_name(r: &Resolved, w: usize) -> String {
    r.outcomes.get(w).cloned().unwrap_or_else(|| w.to_string())
}

fn set_names(r: &Resolved, s: qsloc::OutcomeSet) -> String {
    let names: Vec<String> = s.iter().map(|w| outcome_name(r, w)).collect();
    format!("{{{}}}", names.join(", "))
}

pub fn na_check(s: &Scenario) -> Result<Report> {
    let r = Resolved::new(s)?;
    let m = r.market(s)?;
    let na = market::check_na_geometric(&r.model, &m)?;
    let mut rep = Report::new("na-check");
    let mut t = Table::new("no-arbitrage", &["holds", "witness", "gain positive at"]);
    t.row(vec![
        yes(na.holds),
        na.witness.as_ref().map_or("-".into(), |h| h.to_string()),
        na.outcome.map_or("-".into(), |w| outcome_name(&r, w)),
    ]);
    rep.tables.push(t);
    if let Some(h) = &na.witness {
        let gains = m.gains(&h.h);
        let mut g = Table::new("witness gains on T", &["outcome", "gain"]);
        for w in r.model.support_t().iter() {
            g.row(vec![outcome_name(&r, w), gains[w].to_string()]);
        }
        rep.tables.push(g);
    } else {
        let p = market::consistent_mixture(&r.model, &m)?;
        rep.note(format!("single prior inheriting no-arbitrage: {}", fmt_vec(p.masses())));
    }
    rep.verdict(na.holds);
    Ok(rep)
}

pub fn superhedge(s: &Scenario) -> Result<Report> {
    let r = Resolved::new(s)?;
    let m = r.market(s)?;
    let selectors = r.selectors(s)?;
    let claims: Vec<String> = match s.market.as_ref().map(|b| &b.claims) {
        Some(c) if !c.is_empty() => c.clone(),
        _ => r.variables.keys().cloned().collect(),
    };
    if claims.is_empty() {
        bail!("no claims: add [variables] or [market] claims");
    }
    let mut rep = Report::new("superhedge");
    let mut t = Table::new("superhedging", &["claim", "price", "strategy", "subhedge price", "sub strategy"]);
    let mut cols: Vec<String> = vec!["claim".into()];
    cols.extend(selectors.iter().map(|sel| format!("sup E over {sel}")));
    let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut d = Table::new("dual", &col_refs);
    let mut ok = true;
    for name in &claims {
        let x = r.variable(name)?;
        let sup = market::superhedge(&r.model, &m, x)?;
        let sub = market::subhedge(&r.model, &m, x)?;
        t.row(vec![
            name.clone(),
            sup.price.to_string(),
            sup.strategy.as_ref().map_or("-".into(), |h| h.to_string()),
            sub.price.to_string(),
            sub.strategy.as_ref().map_or("-".into(), |h| h.to_string()),
        ]);
        let mut row = vec![name.clone()];
        for sel in &selectors {
            let v = match market::superhedge_dual(&r.model, &m, x, sel) {
                Ok(v) => Extended::Finite(v),
                Err(MarketError::NoMartingaleMeasure) => Extended::NegInf,
                Err(e) => return Err(e.into()),
            };
            if matches!(sel, qsloc::MartingaleSelector::M) {
                ok &= v == sup.price;
            }
            row.push(if v == Extended::NegInf { "empty".into() } else { v.to_string() });
        }
        d.row(row);
    }
    rep.tables.push(t);
    rep.tables.push(d);
    rep.note("price equals the supremum over M, or -inf when M is empty");
    rep.verdict(ok);
    Ok(rep)
}

pub fn ftap(s: &Scenario) -> Result<Report> {
    let r = Resolved::new(s)?;
    let m = r.market(s)?;
    let mut rep = Report::new("ftap");
    let mut t = Table::new("ftap", &["selector", "NA", "every prior dominated", "hypotheses hold", "consistent"]);
    let mut p = Table::new("domination", &["selector", "prior", "dominating member", "min mass on prior support"]);
    let mut na_holds = true;
    let mut ok = true;
    for sel in r.selectors(s)? {
        let f = market::ftap_check(&r.model, &m, &sel)?;
        na_holds = f.na.holds;
        if f.hypotheses_hold {
            ok &= f.consistent();
        }
        t.row(vec![
            f.selector.clone(),
            yes(f.na.holds),
            yes(f.dominated),
            yes(f.hypotheses_hold),
            yes(f.consistent()),
        ]);
        for d in &f.per_prior {
            p.row(vec![
                f.selector.clone(),
                format!("prior{}", d.prior),
                d.member.as_ref().map_or("none".into(), |q| fmt_vec(q.masses())),
                d.min_mass.as_ref().map_or("-".into(), |v| v.to_string()),
            ]);
        }
    }
    rep.tables.push(t);
    rep.tables.push(p);
    let union = market::martingale_support_union(&r.model, &m)?;
    rep.note(format!("outcomes charged by some martingale measure: {}", set_names(&r, union)));
    rep.verdict(na_holds && ok);
    Ok(rep)
}

fn localize_inputs(r: &Resolved, s: &Scenario) -> Result<(Vec<(String, QView<Rational>)>, Vec<String>)> {
    let block = s.localize.as_ref();
    let measures = match block.filter(|b| !b.measures.is_empty()) {
        Some(b) => b
            .measures
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let label = match m {
                    crate::scenario::MeasureRef::Name(n) => n.clone(),
                    crate::scenario::MeasureRef::Masses(_) => format!("measure{i}"),
                };
                Ok((label, r.measure(m)?))
            })
            .collect::<Result<Vec<_>>>()?,
        None => r.default_measures(),
    };
    let qs = measures
        .into_iter()
        .map(|(label, q)| Ok((label.clone(), r.model.qview(q).with_context(|| format!("measure `{label}`"))?)))
        .collect::<Result<Vec<_>>>()?;
    let vars = match block.filter(|b| !b.variables.is_empty()) {
        Some(b) => b.variables.clone(),
        None => r.variables.keys().cloned().collect(),
    };
    if vars.is_empty() {
        bail!("no variables to localize");
    }
    Ok((qs, vars))
}

pub fn localize(s: &Scenario) -> Result<Report> {
    let r = Resolved::new(s)?;
    let (name, f) = r.risk(s, s.localize.as_ref().and_then(|b| b.risk.as_deref()))?;
    let (qs, vars) = localize_inputs(&r, s)?;
    let mut rep = Report::new("localize");
    let mut t = Table::new(
        &format!("localizations of {name}"),
        &["variable", "measure", "support", "relevant", "f(X)", "f^Q_E(X)", "f^Q_D(X)", "gap"],
    );
    let mut ok = true;
    for v in &vars {
        let x = r.variable(v)?;
        let value = f.evaluate(x);
        for (label, q) in &qs {
            let e = sensitivity::localize_primal_e(&f, q, x);
            let d = f.localize_dual_d(q, x)?;
            ok &= e == d;
            t.row(vec![
                v.clone(),
                label.clone(),
                set_names(&r, q.support()),
                yes(f.is_relevant(q)),
                value.to_string(),
                e.to_string(),
                d.to_string(),
                f.bubble_gap(q, x)?.to_string(),
            ]);
        }
    }
    rep.tables.push(t);
    let views: Vec<QView<Rational>> = qs.iter().map(|(_, q)| q.clone()).collect();
    let rel = f.q_rel_set(&views);
    let mut id = Table::new("supremum over relevant measures", &["variable", "f(X)", "sup f^Q_E(X)", "equal"]);
    for v in &vars {
        let x = r.variable(v)?;
        let value = f.evaluate(x);
        let sup = sensitivity::sup_localized(&f, &rel, x);
        id.row(vec![v.clone(), value.to_string(), sup.to_string(), yes(sup == Extended::Finite(value))]);
    }
    rep.tables.push(id);
    rep.note(format!("{} of {} measures are relevant", rel.len(), views.len()));
    rep.verdict(ok);
    Ok(rep)
}

pub fn risk_table(s: &Scenario) -> Result<Report> {
    let r = Resolved::new(s)?;
    if s.risk.is_empty() {
        bail!("scenario has no [[risk]] block");
    }
    let mut rep = Report::new("risk-table");
    let vars: Vec<&String> = r.variables.keys().collect();
    let mut cols: Vec<String> = vec!["risk measure".into(), "coherent".into()];
    cols.extend(vars.iter().map(|v| v.to_string()));
    let refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut t = Table::new("values", &refs);
    let measures = r.default_measures();
    let mut cc: Vec<String> = vec!["risk measure".into()];
    cc.extend(measures.iter().map(|(l, _)| format!("penalty at {l}")));
    let crefs: Vec<&str> = cc.iter().map(String::as_str).collect();
    let mut c = Table::new("penalty function", &crefs);
    for block in &s.risk {
        let f = r.risk_block(block)?;
        let mut row = vec![block.name.clone(), yes(f.is_coherent())];
        row.extend(vars.iter().map(|v| f.evaluate(&r.variables[*v]).to_string()));
        t.row(row);
        let mut row = vec![block.name.clone()];
        for (_, q) in &measures {
            row.push(f.conjugate(q)?.to_string());
        }
        c.row(row);
    }
    rep.tables.push(t);
    rep.tables.push(c);
    Ok(rep)
}

pub fn aggregate(s: &Scenario) -> Result<Report> {
    let r = Resolved::new(s)?;
    let block = s.aggregate.as_ref().ok_or_else(|| anyhow!("scenario has no [aggregate] block"))?;
    let mut entries = Vec::new();
    let mut fam = Table::new("family", &["entry", "measure support", "variable"]);
    for (i, e) in block.family.iter().enumerate() {
        let q = r.model.qview(r.measure(&e.measure)?).with_context(|| format!("family entry {i}"))?;
        fam.row(vec![i.to_string(), set_names(&r, q.support()), e.variable.clone()]);
        entries.push((q, r.variable(&e.variable)?.clone()));
    }
    let family = RvFamily::new(&r.model, entries)?;
    let mut rep = Report::new("aggregate");
    rep.tables.push(fam);
    let mut res = Table::new("aggregation", &["coherent", "aggregator", "kind", "conflict"]);
    let coherent = match sensitivity::is_coherent(&r.model, &family) {
        Coherence::Aggregator(x) => {
            let kind = match sensitivity::classify_aggregator(&family, &x)? {
                sensitivity::AggregatorKind::Trivial(i) => format!("trivial (entry {i})"),
                sensitivity::AggregatorKind::NonTrivial => "non-trivial".into(),
            };
            res.row(vec![yes(true), fmt_vec(x.values()), kind, "-".into()]);
            true
        }
        Coherence::Conflict { first, second, outcome } => {
            res.row(vec![
                yes(false),
                "-".into(),
                "-".into(),
                format!("entries {first} and {second} at {}", outcome_name(&r, outcome)),
            ]);
            false
        }
    };
    rep.tables.push(res);
    rep.note(format!("covered outcomes: {}", set_names(&r, family.covered())));
    rep.verdict(coherent);
    if let Some(st) = &block.stability {
        let members = st.members.iter().map(|n| r.variable(n).cloned()).collect::<Result<Vec<_>>>()?;
        let qset = st
            .measures
            .iter()
            .map(|m| Ok(r.model.qview(r.measure(m)?)?))
            .collect::<Result<Vec<_>>>()?;
        let out = sensitivity::is_q_stable(&r.model, &FiniteRvSet::new(members), &qset, DEFAULT_STABILITY_BUDGET)?;
        let mut t = Table::new("stability", &["stable", "selections", "coherent selections", "witness"]);
        t.row(vec![
            yes(out.stable),
            out.selections_checked.to_string(),
            out.coherent_selections.to_string(),
            out.witness().map_or("-".into(), |w| fmt_vec(w.values())),
        ]);
        rep.tables.push(t);
        rep.verdict(out.stable);
    }
    Ok(rep)
}

pub fn bliss(s: &Scenario, opts: &Options) -> Result<Report> {
    let r = Resolved::new(s)?;
    let block = s.bliss.as_ref().ok_or_else(|| anyhow!("scenario has no [bliss] block"))?;
    let a = r.variable(&block.lower)?;
    let b = r.variable(&block.upper)?;
    if block.targets.len() != r.model.priors().len() {
        bail!("[bliss] needs one target per prior: {} priors, {} targets", r.model.priors().len(), block.targets.len());
    }
    let entries = r
        .model
        .priors()
        .iter()
        .zip(&block.targets)
        .map(|(p, t)| Ok((r.model.qview(p.clone())?, r.variable(t)?.clone())))
        .collect::<Result<Vec<_>>>()?;
    let targets = RvFamily::new(&r.model, entries)?;
    let x = bliss_point(&r.model, a, b, &targets)?;
    let problem = bliss_problem(&r.model, a, b, &targets)?;
    let samples = block.samples.unwrap_or(acceptance::BLISS_SAMPLES);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let out = solve_localized(&r.model, &problem, samples, &mut rng)?;
    let mut rep = Report::new("bliss");
    let mut t = Table::new("bliss point", &["outcome", "lower", "upper", "consumption"]);
    for w in 0..r.model.n() {
        t.row(vec![outcome_name(&r, w), a.get(w).to_string(), b.get(w).to_string(), x.get(w).to_string()]);
    }
    rep.tables.push(t);
    let mut l = Table::new("local problems", &["prior", "local optimum", "at aggregate"]);
    for (i, row) in out.local.iter().enumerate() {
        l.row(vec![format!("prior{i}"), row.local_optimum.to_string(), row.at_aggregate.to_string()]);
    }
    rep.tables.push(l);
    rep.note(format!("objective value: {}", out.value));
    rep.note(format!(
        "samples: {}, best sample value: {}, samples beating the optimizer: {}",
        out.samples,
        out.best_sample.as_ref().map_or("-".into(), |v| v.to_string()),
        out.beaten_by
    ));
    rep.verdict(out.certified() && out.optimizer == x);
    Ok(rep)
}

const DEFAULT_GRID: std::ops::RangeInclusive<i64> = 1..=10;

pub fn bubble_demo(s: Option<&Scenario>, opts: &Options) -> Result<Report> {
    let block = s.and_then(|s| s.continuum.as_ref());
    let m_grid: Vec<i64> = block.and_then(|b| b.m.clone()).unwrap_or_else(|| DEFAULT_GRID.collect());
    let mut n_grid: Vec<u64> = block
        .and_then(|b| b.n.clone())
        .unwrap_or_else(|| DEFAULT_GRID.map(|n| n as u64).collect());
    if let Some(n) = opts.truncation {
        n_grid = (1..=n).collect();
    }
    if n_grid.contains(&0) {
        bail!("truncation levels start at 1");
    }
    let base_name = block.and_then(|b| b.base.clone()).unwrap_or_else(|| "zero".into());
    let base = match base_name.as_str() {
        "zero" => PiecewiseRationalFunction::constant(rat(0, 1)),
        "w" => continuum::w_function(),
        "y" => continuum::y_function(),
        other => bail!("unknown base `{other}` (expected zero, w or y)"),
    };
    let mut rep = Report::new("bubble-demo");
    let rows = continuum::bubble_table(&base, &m_grid, &n_grid)?;
    let mut cols: Vec<String> = vec!["m \\ N".into()];
    cols.extend(n_grid.iter().map(|n| n.to_string()));
    let refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut t = Table::new(&format!("g(m, N) = rho_N({base_name} on (0, 1/2) - m 1_B)"), &refs);
    let mut closed = true;
    for (i, &m) in m_grid.iter().enumerate() {
        let mut row = vec![m.to_string()];
        for (j, &n) in n_grid.iter().enumerate() {
            let v = &rows[i * n_grid.len() + j].value;
            closed &= base_name != "zero" || *v == rat(-m, n as i64);
            row.push(v.to_string());
        }
        t.row(row);
    }
    rep.tables.push(t);
    if base_name == "zero" {
        rep.note(format!("g(m, N) = -m/N on every cell: {}", yes(closed)));
    }

    let kappa = continuum::kappa_report(&m_grid, &n_grid)?;
    let mut k = Table::new("kappa_N(W on (0, 1/2) - m 1_B)", &["m", "N", "kappa", "closed form", "gap to kappa_D"]);
    let mut kappa_ok = true;
    for row in &kappa.rows {
        kappa_ok &= row.kappa == row.closed_form;
        k.row(vec![
            row.m.to_string(),
            row.n.to_string(),
            row.kappa.to_string(),
            row.closed_form.to_string(),
            row.gap.to_string(),
        ]);
    }
    rep.tables.push(k);
    rep.note(format!("kappa_D(W) = {}", kappa.kappa_d));

    let z = match block {
        Some(b) if b.d.is_some() || b.d_prime.is_some() || b.z_m.is_some() => {
            let pair = |p: &Option<[crate::scenario::Num; 2]>, lo: Rational, hi: Rational| -> Result<(Rational, Rational)> {
                Ok(match p {
                    Some([a, b]) => (num_value(a)?, num_value(b)?),
                    None => (lo, hi),
                })
            };
            let d = pair(&b.d, rat(3, 8), rat(7, 16))?;
            let dp = pair(&b.d_prime, rat(5, 16), rat(3, 8))?;
            continuum::z_check(b.z_m.unwrap_or(3), d, dp, *n_grid.iter().max().expect("non-empty"))?
        }
        _ => continuum::default_z_check(*n_grid.iter().max().expect("non-empty")),
    };
    let mut zt = Table::new("acceptable loss Z", &["m", "Q(D)", "Q(D')", "E_Q[Z]", "max E_Pn[Z]", "holds"]);
    zt.row(vec![
        z.m.to_string(),
        z.q_d.to_string(),
        z.q_d_prime.to_string(),
        z.eq_z.to_string(),
        z.pn_z.iter().max().map_or("-".into(), |v| v.to_string()),
        yes(z.holds()),
    ]);
    rep.tables.push(zt);
    rep.verdict(closed && kappa_ok && z.holds());
    Ok(rep)
}

pub fn selftest(only: &[u32]) -> Result<Report> {
    let mut rep = Report::new("selftest");
    let mut t = Table::new("acceptance", &["criterion", "title", "result", "detail"]);
    let ids: Vec<u32> = if only.is_empty() {
        acceptance::CRITERIA.iter().map(|(i, _)| *i).collect()
    } else {
        only.to_vec()
    };
    for id in ids {
        let o = acceptance::run(id).ok_or_else(|| anyhow!("unknown criterion {id}"))?;
        t.row(vec![
            o.id.to_string(),
            o.title.to_string(),
            if o.passed { "PASS" } else { "FAIL" }.into(),
            o.detail.clone(),
        ]);
        rep.verdict(o.passed);
    }
    rep.tables.push(t);
    Ok(rep)
}
