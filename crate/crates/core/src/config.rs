//! TOML loaders for toy Fock instances. Rationals are written as strings,
//! "3/4" or "-2".

use crate::error::{Error, Result};
use crate::fock::{CondensateCheck, Rational, ThetaRule, TrialConfig};
use crate::lattice::Mom;
use crate::shells::MomentumShells;
use num_traits::Zero;
use serde::Deserialize;
use std::collections::BTreeMap;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeValue {
    pub k: Mom,
    pub value: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeCount {
    pub k: Mom,
    pub n: u32,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToyFile {
    #[serde(default)]
    pub pg: Vec<Mom>,
    pub pa: Vec<Mom>,
    pub ph: Vec<Mom>,
    /// eta on P_H; the value at -k is filled in when only k is given.
    pub eta: Vec<ModeValue>,
    #[serde(default)]
    pub n_alpha: Vec<ModeCount>,
    pub n0: u32,
    pub n_c: usize,
    pub n: String,
    /// "history", "literal" or "literal-reference".
    #[serde(default = "default_theta")]
    pub theta: String,
    /// Interaction coefficients by transfer; -s is filled in from s.
    #[serde(default)]
    pub vhat: Vec<ModeValue>,
}

fn default_theta() -> String {
    "history".into()
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Config(format!("cannot read {s:?} as a rational"));
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let num: num_bigint::BigInt = num.parse().map_err(|_| bad())?;
    let den: num_bigint::BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

fn symmetric_table(entries: &[ModeValue], field: &str) -> Result<BTreeMap<Mom, Rational>> {
    let mut out = BTreeMap::new();
    for e in entries {
        let v = parse_rational(&e.value).map_err(|err| Error::Config(format!("field `{field}` at {:?}: {err}", e.k)))?;
        let m = crate::lattice::neg(&e.k);
        for key in [e.k, m] {
            if let Some(old) = out.insert(key, v.clone()) {
                if old != v {
                    return Err(Error::Config(format!("field `{field}`: conflicting values at {key:?}")));
                }
            }
        }
    }
    Ok(out)
}

pub struct ToyInstance {
    pub config: TrialConfig<Rational>,
    pub vhat: BTreeMap<Mom, Rational>,
}

impl ToyFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn build(&self) -> Result<ToyInstance> {
        let theta = match self.theta.as_str() {
            "history" => ThetaRule::History,
            "literal" => ThetaRule::Literal(CondensateCheck::Running),
            "literal-reference" => ThetaRule::Literal(CondensateCheck::Reference),
            other => return Err(Error::Config(format!("field `theta`: unknown rule {other:?}"))),
        };
        let shells = MomentumShells::toy(&self.pg, &self.pa, &self.ph)?;
        let config = TrialConfig {
            shells,
            eta: symmetric_table(&self.eta, "eta")?,
            n_alpha: self.n_alpha.iter().map(|c| (c.k, c.n)).collect(),
            n0: self.n0,
            n_c: self.n_c,
            n: parse_rational(&self.n).map_err(|e| Error::Config(format!("field `n`: {e}")))?,
            theta,
        };
        config.validate()?;
        Ok(ToyInstance { config, vhat: symmetric_table(&self.vhat, "vhat")? })
    }
}
