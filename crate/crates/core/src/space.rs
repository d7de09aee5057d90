//! Search spaces, configurations and their unit-cube encodings.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{BboError, Result};
use crate::Rng;

/// A single parameter value.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Float(f64),
    Str(String),
}

impl Value {
    /// Numeric view of the value; `None` for strings.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Float(f) => Some(*f),
            Value::Str(_) => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Str(s) => Some(s),
            _ => None,
        }
    }
}

// Floats compare by bit pattern (with -0.0 folded into 0.0) so configurations
// can be used as hash keys.
fn float_key(f: f64) -> u64 {
    if f == 0.0 {
        0
    } else {
        f.to_bits()
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Float(a), Value::Float(b)) => float_key(*a) == float_key(*b),
            (Value::Str(a), Value::Str(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Value {}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Value::Int(i) => {
                0u8.hash(state);
                i.hash(state);
            }
            Value::Float(f) => {
                1u8.hash(state);
                float_key(*f).hash(state);
            }
            Value::Str(s) => {
                2u8.hash(state);
                s.hash(state);
            }
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Float(x) => write!(f, "{x}"),
            Value::Str(s) => f.write_str(s),
        }
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<i32> for Value {
    fn from(v: i32) -> Self {
        Value::Int(v as i64)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Str(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Str(v)
    }
}

/// How categorical parameters are laid out in a unit-cube vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Encoding {
    /// One 0/1 coordinate per choice. Used for Gaussian-process inputs.
    OneHot,
    /// A single coordinate `rank / (K - 1)`. Used for forest inputs and evolution.
    Index,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParameterKind {
    Float { low: f64, high: f64, log: bool },
    Int { low: i64, high: i64, log: bool },
    Ordinal { levels: Vec<Value> },
    Categorical { choices: Vec<Value> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParameterDef", into = "ParameterDef")]
pub struct Parameter {
    name: String,
    kind: ParameterKind,
    default: Option<Value>,
}

impl Parameter {
    pub fn new(name: impl Into<String>, kind: ParameterKind) -> Result<Self> {
        let p = Parameter {
            name: name.into(),
            kind,
            default: None,
        };
        p.check()?;
        Ok(p)
    }

    pub fn float(name: impl Into<String>, low: f64, high: f64) -> Result<Self> {
        Self::new(name, ParameterKind::Float { low, high, log: false })
    }

    pub fn float_log(name: impl Into<String>, low: f64, high: f64) -> Result<Self> {
        Self::new(name, ParameterKind::Float { low, high, log: true })
    }

    pub fn int(name: impl Into<String>, low: i64, high: i64) -> Result<Self> {
        Self::new(name, ParameterKind::Int { low, high, log: false })
    }

    pub fn int_log(name: impl Into<String>, low: i64, high: i64) -> Result<Self> {
        Self::new(name, ParameterKind::Int { low, high, log: true })
    }

    pub fn ordinal<V: Into<Value>>(
        name: impl Into<String>,
        levels: impl IntoIterator<Item = V>,
    ) -> Result<Self> {
        let levels = levels.into_iter().map(Into::into).collect();
        Self::new(name, ParameterKind::Ordinal { levels })
    }

    pub fn categorical<V: Into<Value>>(
        name: impl Into<String>,
        choices: impl IntoIterator<Item = V>,
    ) -> Result<Self> {
        let choices = choices.into_iter().map(Into::into).collect();
        Self::new(name, ParameterKind::Categorical { choices })
    }

    pub fn with_default(mut self, default: impl Into<Value>) -> Result<Self> {
        self.default = Some(default.into());
        self.check()?;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &ParameterKind {
        &self.kind
    }

    pub fn default_value(&self) -> Option<&Value> {
        self.default.as_ref()
    }

    fn check(&self) -> Result<()> {
        let err = |msg: String| Err(BboError::InvalidSpace(format!("parameter '{}': {msg}", self.name)));
        if self.name.is_empty() {
            return Err(BboError::InvalidSpace("parameter name must not be empty".into()));
        }
        match &self.kind {
            ParameterKind::Float { low, high, log } => {
                if !low.is_finite() || !high.is_finite() || low >= high {
                    return err(format!("requires finite low < high, got [{low}, {high}]"));
                }
                if *log && *low <= 0.0 {
                    return err("log scale requires low > 0".into());
                }
            }
            ParameterKind::Int { low, high, log } => {
                if low >= high {
                    return err(format!("requires low < high, got [{low}, {high}]"));
                }
                if *log && *low <= 0 {
                    return err("log scale requires low > 0".into());
                }
            }
            ParameterKind::Ordinal { levels: values } | ParameterKind::Categorical { choices: values } => {
                if values.len() < 2 {
                    return err("needs at least two values".into());
                }
                let distinct: HashSet<&Value> = values.iter().collect();
                if distinct.len() != values.len() {
                    return err("values must be distinct".into());
                }
                if values.iter().any(|v| matches!(v, Value::Float(f) if !f.is_finite())) {
                    return err("values must be finite".into());
                }
            }
        }
        if let Some(d) = &self.default {
            if !self.contains(d) {
                return err(format!("default {d} outside the parameter domain"));
            }
        }
        Ok(())
    }

    /// Whether `value` is a legal value for this parameter.
    pub fn contains(&self, value: &Value) -> bool {
        match (&self.kind, value) {
            (ParameterKind::Float { low, high, .. }, Value::Float(v)) => *v >= *low && *v <= *high,
            (ParameterKind::Int { low, high, .. }, Value::Int(v)) => v >= low && v <= high,
            (ParameterKind::Ordinal { levels: values }, v)
            | (ParameterKind::Categorical { choices: values }, v) => values.contains(v),
            _ => false,
        }
    }

    pub fn is_continuous(&self) -> bool {
        matches!(self.kind, ParameterKind::Float { .. })
    }

    /// Number of distinct values for discrete parameters.
    pub fn cardinality(&self) -> Option<u128> {
        match &self.kind {
            ParameterKind::Float { .. } => None,
            ParameterKind::Int { low, high, .. } => Some((*high as i128 - *low as i128 + 1) as u128),
            ParameterKind::Ordinal { levels } => Some(levels.len() as u128),
            ParameterKind::Categorical { choices } => Some(choices.len() as u128),
        }
    }

    fn encoded_len(&self, encoding: Encoding) -> usize {
        match (&self.kind, encoding) {
            (ParameterKind::Categorical { choices }, Encoding::OneHot) => choices.len(),
            _ => 1,
        }
    }

    fn position(&self, value: &Value) -> Option<usize> {
        match &self.kind {
            ParameterKind::Ordinal { levels: values } | ParameterKind::Categorical { choices: values } => {
                values.iter().position(|v| v == value)
            }
            _ => None,
        }
    }

    /// Scalar unit coordinate for every kind (categoricals by index).
    fn unit_of(&self, value: &Value) -> Result<f64> {
        if !self.contains(value) {
            return Err(BboError::InvalidConfiguration(format!(
                "value {value} is not valid for parameter '{}'",
                self.name
            )));
        }
        Ok(match (&self.kind, value) {
            (ParameterKind::Float { low, high, log }, Value::Float(v)) => {
                affine_to_unit(*v, *low, *high, *log)
            }
            (ParameterKind::Int { low, high, log }, Value::Int(v)) => {
                affine_to_unit(*v as f64, *low as f64, *high as f64, *log)
            }
            _ => {
                let k = self.cardinality().unwrap() as f64;
                self.position(value).unwrap() as f64 / (k - 1.0)
            }
        })
    }

    /// Inverse of [`Self::unit_of`]; `u` must already be clamped to [0, 1].
    fn value_at(&self, u: f64) -> Value {
        match &self.kind {
            ParameterKind::Float { low, high, log } => {
                Value::Float(affine_from_unit(u, *low, *high, *log).clamp(*low, *high))
            }
            ParameterKind::Int { low, high, log } => {
                let raw = affine_from_unit(u, *low as f64, *high as f64, *log);
                let rounded = round_half_up(raw) as i64;
                Value::Int(rounded.clamp(*low, *high))
            }
            ParameterKind::Ordinal { levels: values } | ParameterKind::Categorical { choices: values } => {
                let rank = round_half_up(u * (values.len() - 1) as f64) as usize;
                values[rank.min(values.len() - 1)].clone()
            }
        }
    }

    fn sample(&self, rng: &mut Rng) -> Value {
        match &self.kind {
            ParameterKind::Float { low, high, log: false } => Value::Float(rng.gen_range(*low..=*high)),
            ParameterKind::Float { low, high, log: true } => {
                let e = rng.gen_range(low.log10()..=high.log10());
                Value::Float(10f64.powf(e).clamp(*low, *high))
            }
            ParameterKind::Int { low, high, log: false } => Value::Int(rng.gen_range(*low..=*high)),
            ParameterKind::Int { log: true, .. } => self.value_at(rng.gen::<f64>()),
            ParameterKind::Ordinal { levels: values } | ParameterKind::Categorical { choices: values } => {
                values.choose(rng).unwrap().clone()
            }
        }
    }

    fn all_values(&self) -> Vec<Value> {
        match &self.kind {
            ParameterKind::Float { .. } => Vec::new(),
            ParameterKind::Int { low, high, .. } => (*low..=*high).map(Value::Int).collect(),
            ParameterKind::Ordinal { levels: values } | ParameterKind::Categorical { choices: values } => {
                values.clone()
            }
        }
    }
}

fn affine_to_unit(v: f64, low: f64, high: f64, log: bool) -> f64 {
    if log {
        (v.log10() - low.log10()) / (high.log10() - low.log10())
    } else {
        (v - low) / (high - low)
    }
}

fn affine_from_unit(u: f64, low: f64, high: f64, log: bool) -> f64 {
    if log {
        10f64.powf(low.log10() + u * (high.log10() - low.log10()))
    } else {
        low + u * (high - low)
    }
}

fn round_half_up(x: f64) -> f64 {
    (x + 0.5).floor()
}

fn clamp_unit(u: f64) -> f64 {
    if u.is_nan() {
        0.0
    } else {
        u.clamp(0.0, 1.0)
    }
}

/// On-disk parameter record.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParameterDef {
    name: String,
    #[serde(rename = "type")]
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    low: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    high: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    log: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    levels: Option<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    choices: Option<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    default: Option<Value>,
}

impl TryFrom<ParameterDef> for Parameter {
    type Error = BboError;

    fn try_from(def: ParameterDef) -> Result<Self> {
        let missing = |field: &str| {
            BboError::InvalidSpace(format!("parameter '{}' of type {} needs '{field}'", def.name, def.kind))
        };
        let unexpected = |field: &str| {
            BboError::InvalidSpace(format!(
                "parameter '{}' of type {} does not take '{field}'",
                def.name, def.kind
            ))
        };
        let numeric = def.kind == "float" || def.kind == "int";
        if numeric {
            if def.levels.is_some() {
                return Err(unexpected("levels"));
            }
            if def.choices.is_some() {
                return Err(unexpected("choices"));
            }
        } else {
            for (field, present) in [("low", def.low.is_some()), ("high", def.high.is_some()), ("log", def.log.is_some())] {
                if present {
                    return Err(unexpected(field));
                }
            }
        }
        let kind = match def.kind.as_str() {
            "float" => ParameterKind::Float {
                low: def.low.ok_or_else(|| missing("low"))?,
                high: def.high.ok_or_else(|| missing("high"))?,
                log: def.log.unwrap_or(false),
            },
            "int" => {
                let as_int = |v: f64, field: &str| -> Result<i64> {
                    if v.fract() != 0.0 || !v.is_finite() {
                        Err(BboError::InvalidSpace(format!(
                            "parameter '{}': '{field}' must be an integer",
                            def.name
                        )))
                    } else {
                        Ok(v as i64)
                    }
                };
                ParameterKind::Int {
                    low: as_int(def.low.ok_or_else(|| missing("low"))?, "low")?,
                    high: as_int(def.high.ok_or_else(|| missing("high"))?, "high")?,
                    log: def.log.unwrap_or(false),
                }
            }
            "ordinal" => {
                if def.choices.is_some() {
                    return Err(unexpected("choices"));
                }
                ParameterKind::Ordinal {
                    levels: def.levels.clone().ok_or_else(|| missing("levels"))?,
                }
            }
            "categorical" => {
                if def.levels.is_some() {
                    return Err(unexpected("levels"));
                }
                ParameterKind::Categorical {
                    choices: def.choices.clone().ok_or_else(|| missing("choices"))?,
                }
            }
            other => {
                return Err(BboError::InvalidSpace(format!(
                    "parameter '{}': unknown type '{other}' (expected float, int, ordinal or categorical)",
                    def.name
                )))
            }
        };
        // JSON has a single number type; coerce a default like `3` for a float parameter.
        let default = match (&kind, def.default) {
            (ParameterKind::Float { .. }, Some(Value::Int(i))) => Some(Value::Float(i as f64)),
            (ParameterKind::Int { .. }, Some(Value::Float(f))) if f.fract() == 0.0 => Some(Value::Int(f as i64)),
            (_, d) => d,
        };
        let p = Parameter {
            name: def.name,
            kind,
            default,
        };
        p.check()?;
        Ok(p)
    }
}

impl From<Parameter> for ParameterDef {
    fn from(p: Parameter) -> Self {
        let mut def = ParameterDef {
            name: p.name,
            kind: String::new(),
            low: None,
            high: None,
            log: None,
            levels: None,
            choices: None,
            default: p.default,
        };
        match p.kind {
            ParameterKind::Float { low, high, log } => {
                def.kind = "float".into();
                def.low = Some(low);
                def.high = Some(high);
                def.log = Some(log);
            }
            ParameterKind::Int { low, high, log } => {
                def.kind = "int".into();
                def.low = Some(low as f64);
                def.high = Some(high as f64);
                def.log = Some(log);
            }
            ParameterKind::Ordinal { levels } => {
                def.kind = "ordinal".into();
                def.levels = Some(levels);
            }
            ParameterKind::Categorical { choices } => {
                def.kind = "categorical".into();
                def.choices = Some(choices);
            }
        }
        def
    }
}

/// One point of a search space: exactly one value per parameter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Configuration {
    values: BTreeMap<String, Value>,
}

impl Configuration {
    pub fn new(values: BTreeMap<String, Value>) -> Self {
        Configuration { values }
    }

    pub fn from_pairs<K: Into<String>, V: Into<Value>>(pairs: impl IntoIterator<Item = (K, V)>) -> Self {
        Configuration {
            values: pairs.into_iter().map(|(k, v)| (k.into(), v.into())).collect(),
        }
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.values.get(name)
    }

    /// Numeric value of a float, int or numeric ordinal parameter.
    pub fn get_f64(&self, name: &str) -> Option<f64> {
        self.values.get(name).and_then(Value::as_f64)
    }

    pub fn values(&self) -> &BTreeMap<String, Value> {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}: {v}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SearchSpaceDef {
    parameters: Vec<Parameter>,
}

/// An ordered, non-empty list of uniquely named parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    parameters: Vec<Parameter>,
    seed: u64,
}

impl SearchSpace {
    pub fn new(parameters: Vec<Parameter>) -> Result<Self> {
        if parameters.is_empty() {
            return Err(BboError::InvalidSpace("a search space needs at least one parameter".into()));
        }
        let mut seen = HashSet::new();
        for p in &parameters {
            if !seen.insert(p.name.as_str()) {
                return Err(BboError::InvalidSpace(format!("duplicate parameter name '{}'", p.name)));
            }
        }
        Ok(SearchSpace { parameters, seed: 0 })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Parses the search-space file format: `{"parameters": [...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let def: SearchSpaceDef = serde_json::from_str(text).map_err(|e| BboError::from_json(&e))?;
        SearchSpace::new(def.parameters)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SearchSpaceDef {
            parameters: self.parameters.clone(),
        })
        .expect("search space serializes")
    }

    pub fn parameters(&self) -> &[Parameter] {
        &self.parameters
    }

    pub fn parameter(&self, name: &str) -> Option<&Parameter> {
        self.parameters.iter().find(|p| p.name == name)
    }

    /// Parameter count; a categorical counts once regardless of its choices.
    pub fn dimension(&self) -> usize {
        self.parameters.len()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.parameters.iter().map(|p| p.name.as_str())
    }

    pub fn encoded_len(&self, encoding: Encoding) -> usize {
        self.parameters.iter().map(|p| p.encoded_len(encoding)).sum()
    }

    /// Total number of configurations, or `None` when any parameter is continuous.
    pub fn cardinality(&self) -> Option<u128> {
        self.parameters
            .iter()
            .try_fold(1u128, |acc, p| p.cardinality().map(|c| acc.saturating_mul(c)))
    }

    /// All configurations of a finite space in lexicographic parameter order.
    /// Returns `None` for continuous spaces or when the count exceeds `limit`.
    pub fn enumerate(&self, limit: usize) -> Option<Vec<Configuration>> {
        let total = self.cardinality()?;
        if total > limit as u128 {
            return None;
        }
        let columns: Vec<Vec<Value>> = self.parameters.iter().map(Parameter::all_values).collect();
        let mut out = Vec::with_capacity(total as usize);
        let mut idx = vec![0usize; columns.len()];
        loop {
            out.push(Configuration {
                values: self
                    .parameters
                    .iter()
                    .zip(&idx)
                    .zip(&columns)
                    .map(|((p, &i), col)| (p.name.clone(), col[i].clone()))
                    .collect(),
            });
            let mut k = columns.len();
            loop {
                if k == 0 {
                    return Some(out);
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < columns[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    pub fn validate(&self, config: &Configuration) -> Result<()> {
        if config.values.len() != self.parameters.len() {
            if let Some(extra) = config.values.keys().find(|k| self.parameter(k).is_none()) {
                return Err(BboError::InvalidConfiguration(format!("unknown parameter '{extra}'")));
            }
        }
        for p in &self.parameters {
            match config.values.get(&p.name) {
                None => {
                    return Err(BboError::InvalidConfiguration(format!("missing parameter '{}'", p.name)))
                }
                Some(v) if !p.contains(v) => {
                    return Err(BboError::InvalidConfiguration(format!(
                        "value {v} is not valid for parameter '{}'",
                        p.name
                    )))
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    /// The configuration made of every parameter's default, falling back to the
    /// midpoint of the unit encoding.
    pub fn default_configuration(&self) -> Configuration {
        Configuration {
            values: self
                .parameters
                .iter()
                .map(|p| (p.name.clone(), p.default.clone().unwrap_or_else(|| p.value_at(0.5))))
                .collect(),
        }
    }

    pub fn sample_one(&self, rng: &mut Rng) -> Configuration {
        Configuration {
            values: self.parameters.iter().map(|p| (p.name.clone(), p.sample(rng))).collect(),
        }
    }

    /// `n` independent draws from the uniform prior over the space.
    pub fn sample_random(&self, n: usize, rng: &mut Rng) -> Vec<Configuration> {
        (0..n).map(|_| self.sample_one(rng)).collect()
    }

    /// Latin hypercube design: every numeric dimension gets one point per
    /// equal-width stratum of the unit interval; discrete choices are uniform.
    pub fn latin_hypercube(&self, n: usize, rng: &mut Rng) -> Vec<Configuration> {
        let mut rows: Vec<BTreeMap<String, Value>> = vec![BTreeMap::new(); n];
        for p in &self.parameters {
            match p.kind {
                ParameterKind::Float { .. } | ParameterKind::Int { .. } => {
                    let mut strata: Vec<usize> = (0..n).collect();
                    strata.shuffle(rng);
                    for (row, s) in rows.iter_mut().zip(strata) {
                        let u = (s as f64 + rng.gen::<f64>()) / n as f64;
                        row.insert(p.name.clone(), p.value_at(clamp_unit(u)));
                    }
                }
                _ => {
                    for row in rows.iter_mut() {
                        row.insert(p.name.clone(), p.sample(rng));
                    }
                }
            }
        }
        rows.into_iter().map(Configuration::new).collect()
    }

    pub fn to_unit_vector(&self, config: &Configuration, encoding: Encoding) -> Result<Vec<f64>> {
        if let Some(extra) = config.values.keys().find(|k| self.parameter(k).is_none()) {
            return Err(BboError::InvalidConfiguration(format!("unknown parameter '{extra}'")));
        }
        let mut out = Vec::with_capacity(self.encoded_len(encoding));
        for p in &self.parameters {
            let value = config
                .values
                .get(&p.name)
                .ok_or_else(|| BboError::InvalidConfiguration(format!("missing parameter '{}'", p.name)))?;
            match (&p.kind, encoding) {
                (ParameterKind::Categorical { choices }, Encoding::OneHot) => {
                    let hot = p.position(value).ok_or_else(|| {
                        BboError::InvalidConfiguration(format!(
                            "value {value} is not valid for parameter '{}'",
                            p.name
                        ))
                    })?;
                    out.extend((0..choices.len()).map(|i| if i == hot { 1.0 } else { 0.0 }));
                }
                _ => out.push(p.unit_of(value)?),
            }
        }
        Ok(out)
    }

    pub fn from_unit_vector(&self, vector: &[f64], encoding: Encoding) -> Result<Configuration> {
        let expected = self.encoded_len(encoding);
        if vector.len() != expected {
            return Err(BboError::Encoding(format!(
                "expected a vector of length {expected}, got {}",
                vector.len()
            )));
        }
        let mut values = BTreeMap::new();
        let mut pos = 0;
        for p in &self.parameters {
            let value = match (&p.kind, encoding) {
                (ParameterKind::Categorical { choices }, Encoding::OneHot) => {
                    let block = &vector[pos..pos + choices.len()];
                    pos += choices.len();
                    // strict `>` keeps the lowest index on ties
                    let mut best = 0;
                    for (i, &u) in block.iter().enumerate() {
                        if clamp_unit(u) > clamp_unit(block[best]) {
                            best = i;
                        }
                    }
                    choices[best].clone()
                }
                _ => {
                    let u = clamp_unit(vector[pos]);
                    pos += 1;
                    p.value_at(u)
                }
            };
            values.insert(p.name.clone(), value);
        }
        Ok(Configuration { values })
    }

    /// One-exchange neighbourhood of an index-encoded point: continuous
    /// coordinates move by `±step`; integers and ordinals move to adjacent
    /// values; categoricals switch to every other choice.
    pub fn neighbors_unit(&self, unit: &[f64], step: f64) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        for (i, p) in self.parameters.iter().enumerate() {
            let u = unit[i];
            let mut push = |v: f64| {
                let v = clamp_unit(v);
                if v != u {
                    let mut n = unit.to_vec();
                    n[i] = v;
                    out.push(n);
                }
            };
            match &p.kind {
                ParameterKind::Float { .. } => {
                    push(u - step);
                    push(u + step);
                }
                ParameterKind::Int { .. } => {
                    if let Value::Int(k) = p.value_at(u) {
                        for next in [k - 1, k + 1] {
                            if let Ok(nu) = p.unit_of(&Value::Int(next)) {
                                push(nu);
                            }
                        }
                    }
                }
                ParameterKind::Ordinal { levels } => {
                    let rank = round_half_up(u * (levels.len() - 1) as f64) as i64;
                    for next in [rank - 1, rank + 1] {
                        if next >= 0 && (next as usize) < levels.len() {
                            push(next as f64 / (levels.len() - 1) as f64);
                        }
                    }
                }
                ParameterKind::Categorical { choices } => {
                    let k = choices.len();
                    let rank = round_half_up(u * (k - 1) as f64) as usize;
                    for other in (0..k).filter(|&r| r != rank) {
                        push(other as f64 / (k - 1) as f64);
                    }
                }
            }
        }
        out
    }
}
