//! Scenario files: TOML with named blocks. Numbers are integers or strings
//! such as "3/8", "-2" or "0.25", all read as exact rationals.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use qsloc::market::MartingaleSelector;
use qsloc::risk::Constraint;
use qsloc::{MarketModel, MaxAffineRiskMeasure, ProbabilityMeasure, Rational, RobustModel, Rv, Scalar};

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Str(String),
}

impl Num {
    fn value(&self) -> Result<Rational> {
        match self {
            Num::Int(i) => Ok(Rational::from_integer((*i).into())),
            Num::Str(s) => Rational::parse_scalar(s).map_err(|e| anyhow!(e)),
        }
    }
}

fn values(v: &[Num]) -> Result<Vec<Rational>> {
    v.iter().map(Num::value).collect()
}

/// A measure given by name or by its masses.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum MeasureRef {
    Name(String),
    Masses(Vec<Num>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub outcomes: Vec<String>,
    pub priors: Vec<Vec<Num>>,
    #[serde(default)]
    pub convex: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintBlock {
    pub measure: MeasureRef,
    pub penalty: Option<Num>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiskBlock {
    pub name: String,
    pub constraints: Vec<ConstraintBlock>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketBlock {
    pub s0: Vec<Num>,
    pub s1: Vec<Vec<Num>>,
    #[serde(default)]
    pub claims: Vec<String>,
    #[serde(default)]
    pub selectors: Vec<String>,
    /// Reference measure for the `M_eq^Q` selector.
    pub measure: Option<MeasureRef>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalizeBlock {
    pub risk: Option<String>,
    #[serde(default)]
    pub measures: Vec<MeasureRef>,
    #[serde(default)]
    pub variables: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyEntry {
    pub measure: MeasureRef,
    pub variable: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityBlock {
    pub members: Vec<String>,
    pub measures: Vec<MeasureRef>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AggregateBlock {
    pub family: Vec<FamilyEntry>,
    pub stability: Option<StabilityBlock>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlissBlock {
    pub lower: String,
    pub upper: String,
    /// One target variable per prior, in prior order.
    pub targets: Vec<String>,
    pub samples: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuumBlock {
    pub m: Option<Vec<i64>>,
    pub n: Option<Vec<u64>>,
    pub base: Option<String>,
    pub d: Option<[Num; 2]>,
    pub d_prime: Option<[Num; 2]>,
    pub z_m: Option<i64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub model: Option<ModelBlock>,
    #[serde(default)]
    pub measures: BTreeMap<String, Vec<Num>>,
    #[serde(default)]
    pub variables: BTreeMap<String, Vec<Num>>,
    #[serde(default)]
    pub risk: Vec<RiskBlock>,
    pub market: Option<MarketBlock>,
    pub localize: Option<LocalizeBlock>,
    pub aggregate: Option<AggregateBlock>,
    pub bliss: Option<BlissBlock>,
    pub continuum: Option<ContinuumBlock>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read scenario {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in scenario {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }
}

/// Scenario with names resolved against a validated model.
pub struct Resolved {
    pub outcomes: Vec<String>,
    pub model: RobustModel<Rational>,
    pub variables: BTreeMap<String, Rv>,
    pub measures: BTreeMap<String, ProbabilityMeasure<Rational>>,
}

impl Resolved {
    pub fn new(s: &Scenario) -> Result<Self> {
        let mb = s.model.as_ref().ok_or_else(|| anyhow!("scenario has no [model] block"))?;
        let n = mb.outcomes.len();
        let priors = mb
            .priors
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let v = values(p).with_context(|| format!("[model] prior {i}"))?;
                check_len(v.len(), n, &format!("[model] prior {i}"))?;
                ProbabilityMeasure::new(v).with_context(|| format!("[model] prior {i}"))
            })
            .collect::<Result<Vec<_>>>()?;
        let model = RobustModel::new(priors).context("[model]")?.with_convex_hull(mb.convex);
        let mut measures = BTreeMap::new();
        for (name, m) in &s.measures {
            let v = values(m).with_context(|| format!("[measures] {name}"))?;
            check_len(v.len(), n, &format!("[measures] {name}"))?;
            measures.insert(name.clone(), ProbabilityMeasure::new(v).with_context(|| format!("[measures] {name}"))?);
        }
        let mut variables = BTreeMap::new();
        for (name, x) in &s.variables {
            let v = values(x).with_context(|| format!("[variables] {name}"))?;
            check_len(v.len(), n, &format!("[variables] {name}"))?;
            variables.insert(name.clone(), model.rv(v)?);
        }
        Ok(Resolved {
            outcomes: mb.outcomes.clone(),
            model,
            variables,
            measures,
        })
    }

    pub fn variable(&self, name: &str) -> Result<&Rv> {
        self.variables.get(name).ok_or_else(|| anyhow!("unknown variable `{name}`"))
    }

    pub fn measure(&self, r: &MeasureRef) -> Result<ProbabilityMeasure<Rational>> {
        match r {
            MeasureRef::Name(name) => {
                if let Some(m) = self.measures.get(name) {
                    return Ok(m.clone());
                }
                if let Some(i) = name.strip_prefix("prior").and_then(|k| k.parse::<usize>().ok()) {
                    if let Some(p) = self.model.priors().get(i) {
                        return Ok(p.clone());
                    }
                }
                bail!("unknown measure `{name}`")
            }
            MeasureRef::Masses(m) => {
                let v = values(m)?;
                check_len(v.len(), self.model.n(), "inline measure")?;
                Ok(ProbabilityMeasure::new(v)?)
            }
        }
    }

    /// Named measures followed by the priors, labelled.
    pub fn default_measures(&self) -> Vec<(String, ProbabilityMeasure<Rational>)> {
        let mut out: Vec<(String, ProbabilityMeasure<Rational>)> =
            self.measures.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        out.extend(self.model.priors().iter().enumerate().map(|(i, p)| (format!("prior{i}"), p.clone())));
        out
    }

    pub fn risk(&self, s: &Scenario, name: Option<&str>) -> Result<(String, MaxAffineRiskMeasure<Rational>)> {
        let block = match name {
            Some(n) => s.risk.iter().find(|r| r.name == n).ok_or_else(|| anyhow!("unknown risk measure `{n}`"))?,
            None => s.risk.first().ok_or_else(|| anyhow!("scenario has no [[risk]] block"))?,
        };
        Ok((block.name.clone(), self.risk_block(block)?))
    }

    pub fn risk_block(&self, block: &RiskBlock) -> Result<MaxAffineRiskMeasure<Rational>> {
        let cs = block
            .constraints
            .iter()
            .enumerate()
            .map(|(i, c)| {
                Ok(Constraint {
                    measure: self.measure(&c.measure).with_context(|| format!("risk `{}` constraint {i}", block.name))?,
                    penalty: match &c.penalty {
                        Some(p) => p.value()?,
                        None => Rational::from_integer(0.into()),
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        MaxAffineRiskMeasure::in_model(&self.model, cs).with_context(|| format!("risk `{}`", block.name))
    }

    pub fn market(&self, s: &Scenario) -> Result<MarketModel<Rational>> {
        let mb = s.market.as_ref().ok_or_else(|| anyhow!("scenario has no [market] block"))?;
        let s0 = values(&mb.s0).context("[market] s0")?;
        let s1 = mb
            .s1
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let v = values(row).with_context(|| format!("[market] s1 row {i}"))?;
                check_len(v.len(), self.model.n(), &format!("[market] s1 row {i}"))?;
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        MarketModel::new(s0, s1).context("[market]")
    }

    pub fn selectors(&self, s: &Scenario) -> Result<Vec<MartingaleSelector<Rational>>> {
        let mb = s.market.as_ref().ok_or_else(|| anyhow!("scenario has no [market] block"))?;
        let names: Vec<String> = if mb.selectors.is_empty() {
            let mut d: Vec<String> = ["M", "NA", "M_ll", "M_eq"].iter().map(|s| s.to_string()).collect();
            if mb.measure.is_some() {
                d.push("M_eq^Q".into());
            }
            d
        } else {
            mb.selectors.clone()
        };
        names
            .iter()
            .map(|n| {
                Ok(match n.as_str() {
                    "M" => MartingaleSelector::M,
                    "NA" => MartingaleSelector::NaEquiv,
                    "M_ll" => MartingaleSelector::MDominated,
                    "M_eq" => MartingaleSelector::MEquivalent,
                    "M_eq^Q" => MartingaleSelector::MEquivalentTo(
                        self.measure(mb.measure.as_ref().ok_or_else(|| anyhow!("selector M_eq^Q needs [market] measure"))?)?,
                    ),
                    other => bail!("unknown selector `{other}` (expected M, NA, M_ll, M_eq or M_eq^Q)"),
                })
            })
            .collect()
    }
}

fn check_len(actual: usize, expected: usize, what: &str) -> Result<()> {
    if actual != expected {
        bail!("{what}: expected {expected} values, got {actual}");
    }
    Ok(())
}

pub fn num_value(n: &Num) -> Result<Rational> {
    n.value()
}
