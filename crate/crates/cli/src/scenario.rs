//! Scenario files: a versioned JSON document describing one experiment.

use std::fmt;
use std::path::PathBuf;

use hannay_core::dynamics::{DhoParams, PendulumParams, DEFAULT_SAMPLES_PER_PERIOD, MIN_SAMPLES_PER_PERIOD};
use hannay_core::schedules::{
    GhoParams, GhoRates, Harmonic, Orientation, ParamSchedule, SampledPath, ScheduleFamily, SlowFn, SlownessSpec,
};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u64 = 1;

/// A validation failure located by a dotted field path such as `schedule.gamma`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

impl SchemaError {
    fn new(path: &str, message: impl Into<String>) -> Self {
        Self {
            path: path.to_owned(),
            message: message.into(),
        }
    }
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "schema error: {}", self.message)
        } else {
            write!(f, "schema error at {}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for SchemaError {}

type Parsed<T> = std::result::Result<T, SchemaError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Analysis {
    Phases,
    Invariant,
    Equivalence,
    Multipliers,
}

impl Analysis {
    pub fn name(self) -> &'static str {
        match self {
            Analysis::Phases => "phases",
            Analysis::Invariant => "invariant",
            Analysis::Equivalence => "equivalence",
            Analysis::Multipliers => "multipliers",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [Analysis::Phases, Analysis::Invariant, Analysis::Equivalence, Analysis::Multipliers]
            .into_iter()
            .find(|a| a.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Gho {
        schedule: ParamSchedule,
        q: f64,
        p: f64,
    },
    Pendulum {
        params: PendulumParams,
        phi: f64,
        p: f64,
    },
    Dho {
        params: DhoParams,
        /// `(M, lambda, Omega)` when all three are constant.
        constant: Option<(f64, f64, f64)>,
        q: f64,
        qdot: f64,
    },
    QuadraticFriction {
        m: f64,
        b: f64,
        omega0: f64,
        q: f64,
        qdot: f64,
    },
    Hirota {
        phi: f64,
        phidot: f64,
    },
}

impl ModelSpec {
    pub fn id(&self) -> &'static str {
        match self {
            ModelSpec::Gho { .. } => "gho",
            ModelSpec::Pendulum { .. } => "pendulum",
            ModelSpec::Dho { .. } => "dho",
            ModelSpec::QuadraticFriction { .. } => "quadratic-friction",
            ModelSpec::Hirota { .. } => "hirota",
        }
    }

    /// Slowness of the parameter drive, for models that have one.
    pub fn slowness(&self) -> Option<SlownessSpec> {
        match self {
            ModelSpec::Gho { schedule, .. } => Some(hannay_core::schedules::ParamPath::slowness(schedule)),
            ModelSpec::Pendulum { params, .. } => Some(params.slowness()),
            ModelSpec::Dho { params, .. } => Some(params.slowness()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    pub plots: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub model: ModelSpec,
    pub t_span: (f64, f64),
    pub tolerance: f64,
    pub samples_per_period: usize,
    pub analyses: Vec<Analysis>,
    pub output: OutputSpec,
    raw: Value,
}

/// A JSON value together with its location in the document.
#[derive(Clone, Copy)]
struct Node<'a> {
    value: &'a Value,
    path: &'a str,
}

impl<'a> Node<'a> {
    fn join(&self, key: &str) -> String {
        if self.path.is_empty() {
            key.to_owned()
        } else {
            format!("{}.{key}", self.path)
        }
    }

    fn error(&self, message: impl Into<String>) -> SchemaError {
        SchemaError::new(self.path, message)
    }

    fn object(&self) -> Parsed<&'a serde_json::Map<String, Value>> {
        self.value.as_object().ok_or_else(|| self.error("expected an object"))
    }

    /// Rejects keys outside `allowed`.
    fn only(&self, allowed: &[&str]) -> Parsed<()> {
        for key in self.object()?.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(SchemaError::new(&self.join(key), "unknown field"));
            }
        }
        Ok(())
    }

    fn number(&self) -> Parsed<f64> {
        match self.value.as_f64() {
            Some(v) if v.is_finite() => Ok(v),
            _ => Err(self.error("expected a finite number")),
        }
    }

    fn string(&self) -> Parsed<&'a str> {
        self.value.as_str().ok_or_else(|| self.error("expected a string"))
    }

    fn array(&self) -> Parsed<&'a Vec<Value>> {
        self.value.as_array().ok_or_else(|| self.error("expected an array"))
    }
}

/// Owns the path strings that `Node` borrows.
struct Walker<'a> {
    root: &'a Value,
}

impl<'a> Walker<'a> {
    fn get(&self, path: &str) -> Option<&'a Value> {
        path.split('.').try_fold(self.root, |v, key| v.get(key))
    }

    fn require(&self, path: &'a str) -> Parsed<Node<'a>> {
        self.get(path)
            .map(|value| Node { value, path })
            .ok_or_else(|| SchemaError::new(path, "missing field"))
    }

    fn optional(&self, path: &'a str) -> Option<Node<'a>> {
        self.get(path).map(|value| Node { value, path })
    }
}

fn number_at(w: &Walker, path: &'static str) -> Parsed<f64> {
    w.require(path)?.number()
}

fn pair(node: Node) -> Parsed<(f64, f64)> {
    let a = node.array()?;
    if a.len() != 2 {
        return Err(node.error("expected two numbers"));
    }
    let get = |i: usize| {
        a[i].as_f64()
            .filter(|v| v.is_finite())
            .ok_or_else(|| SchemaError::new(&format!("{}[{i}]", node.path), "expected a finite number"))
    };
    let (lo, hi) = (get(0)?, get(1)?);
    if !(hi > lo) {
        return Err(node.error("upper bound must exceed lower bound"));
    }
    Ok((lo, hi))
}

fn numbers(node: Node) -> Parsed<Vec<f64>> {
    node.array()?
        .iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_f64()
                .filter(|x| x.is_finite())
                .ok_or_else(|| SchemaError::new(&format!("{}[{i}]", node.path), "expected a finite number"))
        })
        .collect()
}

/// A number (constant) or `{mean, slope, cos, sin, harmonics}`.
fn slow_fn(node: Node) -> Parsed<SlowFn> {
    if node.value.is_number() {
        return Ok(SlowFn::constant(node.number()?));
    }
    node.only(&["mean", "slope", "cos", "sin", "harmonics"])?;
    let obj = node.object()?;
    let field = |key: &str| -> Parsed<f64> {
        match obj.get(key) {
            None => Ok(0.0),
            Some(value) => Node {
                value,
                path: &node.join(key),
            }
            .number(),
        }
    };
    let mut f = SlowFn::linear(field("mean")?, field("slope")?);
    let (c, s) = (field("cos")?, field("sin")?);
    if c != 0.0 || s != 0.0 {
        f.harmonics.push(Harmonic { order: 1, cos: c, sin: s });
    }
    if let Some(list) = obj.get("harmonics") {
        let path = node.join("harmonics");
        let items = Node { value: list, path: &path }.array()?;
        for (i, item) in items.iter().enumerate() {
            let p = format!("{path}[{i}]");
            let h = Node { value: item, path: &p };
            h.only(&["order", "cos", "sin"])?;
            let order = item
                .get("order")
                .and_then(Value::as_u64)
                .filter(|&k| k >= 1 && k <= u64::from(u32::MAX))
                .ok_or_else(|| SchemaError::new(&format!("{p}.order"), "expected a positive integer"))?;
            let get = |key: &str| -> Parsed<f64> {
                item.get(key).map_or(Ok(0.0), |v| {
                    Node {
                        value: v,
                        path: &format!("{p}.{key}"),
                    }
                    .number()
                })
            };
            f.harmonics.push(Harmonic {
                order: order as u32,
                cos: get("cos")?,
                sin: get("sin")?,
            });
        }
    }
    Ok(f)
}

fn slowness(w: &Walker, block: &'static str) -> Parsed<SlownessSpec> {
    let (eps_path, window_path) = match block {
        "schedule" => ("schedule.epsilon", "schedule.window"),
        _ => ("parameters.epsilon", "parameters.window"),
    };
    let eps_node = w.require(eps_path)?;
    let eps = eps_node.number()?;
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(eps_node.error("epsilon must lie in (0, 1]"));
    }
    let (tau0, tau1) = match w.optional(window_path) {
        Some(n) => pair(n)?,
        None => (0.0, 1.0),
    };
    SlownessSpec::over_tau(eps, tau0, tau1).map_err(|e| SchemaError::new(window_path, e.to_string()))
}

fn triple(w: &Walker, base: &'static str) -> Parsed<[f64; 3]> {
    let node = w.require(base)?;
    node.only(&["alpha", "beta", "gamma"])?;
    let get = |key: &str| -> Parsed<f64> {
        let path = node.join(key);
        match node.value.get(key) {
            Some(value) => Node { value, path: &path }.number(),
            None => Err(SchemaError::new(&path, "missing field")),
        }
    };
    Ok([get("alpha")?, get("beta")?, get("gamma")?])
}

fn gho_schedule(w: &Walker) -> Parsed<ParamSchedule> {
    let block = w.require("schedule")?;
    let family_node = w.require("schedule.family")?;
    let family = family_node.string()?;
    let common = ["family", "epsilon", "window", "orientation"];
    let with = |extra: &[&'static str]| -> Vec<&str> { common.iter().chain(extra).copied().collect() };
    let family = match family {
        "constant" => {
            block.only(&with(&["alpha", "beta", "gamma"]))?;
            ScheduleFamily::Constant(GhoParams::new(
                number_at(w, "schedule.alpha")?,
                number_at(w, "schedule.beta")?,
                number_at(w, "schedule.gamma")?,
            ))
        }
        "linear-ramp" => {
            block.only(&with(&["start", "slope"]))?;
            let [a, b, g] = triple(w, "schedule.start")?;
            let [da, db, dg] = triple(w, "schedule.slope")?;
            ScheduleFamily::LinearRamp {
                start: GhoParams::new(a, b, g),
                slope: GhoRates::new(da, db, dg),
            }
        }
        "trig-loop" => {
            block.only(&with(&["alpha", "beta", "gamma"]))?;
            ScheduleFamily::TrigLoop {
                alpha: slow_fn(w.require("schedule.alpha")?)?,
                beta: slow_fn(w.require("schedule.beta")?)?,
                gamma: slow_fn(w.require("schedule.gamma")?)?,
            }
        }
        "sampled-spline" => {
            block.only(&with(&["knots", "alpha", "beta", "gamma"]))?;
            let knots = numbers(w.require("schedule.knots")?)?;
            let a = numbers(w.require("schedule.alpha")?)?;
            let b = numbers(w.require("schedule.beta")?)?;
            let g = numbers(w.require("schedule.gamma")?)?;
            for (path, col) in [("schedule.alpha", &a), ("schedule.beta", &b), ("schedule.gamma", &g)] {
                if col.len() != knots.len() {
                    return Err(SchemaError::new(path, format!("expected {} values to match knots", knots.len())));
                }
            }
            let samples: Vec<GhoParams> = (0..knots.len()).map(|i| GhoParams::new(a[i], b[i], g[i])).collect();
            ScheduleFamily::SampledSpline(
                SampledPath::new(&knots, &samples).map_err(|e| SchemaError::new("schedule.knots", e.to_string()))?,
            )
        }
        other => return Err(family_node.error(format!("unknown schedule family {other:?}"))),
    };
    let orientation = match w.optional("schedule.orientation") {
        None => Orientation::Forward,
        Some(n) => match n.string()? {
            "forward" => Orientation::Forward,
            "reversed" => Orientation::Reversed,
            other => return Err(n.error(format!("unknown orientation {other:?}"))),
        },
    };
    let slowness = slowness(w, "schedule")?;
    ParamSchedule::with_orientation(family, slowness, orientation).map_err(|e| block.error(e.to_string()))
}

fn constant_value(f: &SlowFn) -> Option<f64> {
    (f.slope == 0.0 && f.harmonics.iter().all(|h| h.cos == 0.0 && h.sin == 0.0)).then_some(f.mean)
}

fn model(w: &Walker, id: &str) -> Parsed<ModelSpec> {
    let initial = w.require("initial")?;
    match id {
        "gho" => {
            initial.only(&["q", "p"])?;
            Ok(ModelSpec::Gho {
                schedule: gho_schedule(w)?,
                q: number_at(w, "initial.q")?,
                p: number_at(w, "initial.p")?,
            })
        }
        "pendulum" => {
            let block = w.require("parameters")?;
            block.only(&["m", "l", "v", "g", "epsilon", "window"])?;
            initial.only(&["phi", "p"])?;
            let params = PendulumParams::new(
                slow_fn(w.require("parameters.m")?)?,
                slow_fn(w.require("parameters.l")?)?,
                slow_fn(w.require("parameters.v")?)?,
                number_at(w, "parameters.g")?,
                slowness(w, "parameters")?,
            )
            .map_err(|e| block.error(e.to_string()))?;
            Ok(ModelSpec::Pendulum {
                params,
                phi: number_at(w, "initial.phi")?,
                p: number_at(w, "initial.p")?,
            })
        }
        "dho" => {
            let block = w.require("parameters")?;
            block.only(&["mass", "lambda", "omega", "epsilon", "window"])?;
            initial.only(&["q", "qdot"])?;
            let (mass, lambda, omega) = (
                slow_fn(w.require("parameters.mass")?)?,
                slow_fn(w.require("parameters.lambda")?)?,
                slow_fn(w.require("parameters.omega")?)?,
            );
            let constant = match (constant_value(&mass), constant_value(&lambda), constant_value(&omega)) {
                (Some(m), Some(l), Some(o)) => Some((m, l, o)),
                _ => None,
            };
            let params = DhoParams::new(mass, lambda, omega, slowness(w, "parameters")?)
                .map_err(|e| block.error(e.to_string()))?;
            Ok(ModelSpec::Dho {
                params,
                constant,
                q: number_at(w, "initial.q")?,
                qdot: number_at(w, "initial.qdot")?,
            })
        }
        "quadratic-friction" => {
            let block = w.require("parameters")?;
            block.only(&["m", "b", "omega0"])?;
            initial.only(&["q", "qdot"])?;
            let m = number_at(w, "parameters.m")?;
            if !(m > 0.0) {
                return Err(SchemaError::new("parameters.m", "mass must be positive"));
            }
            let b = number_at(w, "parameters.b")?;
            if b == 0.0 {
                return Err(SchemaError::new("parameters.b", "friction coefficient must be nonzero"));
            }
            Ok(ModelSpec::QuadraticFriction {
                m,
                b,
                omega0: number_at(w, "parameters.omega0")?,
                q: number_at(w, "initial.q")?,
                qdot: number_at(w, "initial.qdot")?,
            })
        }
        "hirota" => {
            if let Some(block) = w.optional("parameters") {
                block.only(&[])?;
            }
            initial.only(&["phi", "phidot"])?;
            Ok(ModelSpec::Hirota {
                phi: number_at(w, "initial.phi")?,
                phidot: number_at(w, "initial.phidot")?,
            })
        }
        other => Err(SchemaError::new("model", format!("unknown model {other:?}"))),
    }
}

fn check_analyses(model: &ModelSpec, analyses: &[Analysis]) -> Parsed<()> {
    for (i, a) in analyses.iter().enumerate() {
        let ok = match (a, model) {
            (Analysis::Phases, ModelSpec::Gho { .. } | ModelSpec::Pendulum { .. }) => true,
            (Analysis::Invariant, _) => !matches!(model, ModelSpec::Dho { .. }),
            (Analysis::Equivalence, ModelSpec::Gho { .. } | ModelSpec::Pendulum { .. } | ModelSpec::Dho { .. }) => true,
            (Analysis::Multipliers, ModelSpec::QuadraticFriction { .. } | ModelSpec::Hirota { .. }) => true,
            (Analysis::Multipliers, ModelSpec::Dho { constant, .. }) => {
                if constant.is_none() {
                    return Err(SchemaError::new(
                        &format!("analyses[{i}]"),
                        "multiplier checks on dho need constant mass, lambda and omega",
                    ));
                }
                true
            }
            _ => false,
        };
        if !ok {
            return Err(SchemaError::new(
                &format!("analyses[{i}]"),
                format!("analysis {:?} is not available for model {:?}", a.name(), model.id()),
            ));
        }
    }
    Ok(())
}

impl Scenario {
    pub fn parse(text: &str) -> Parsed<Self> {
        let raw: Value = serde_json::from_str(text).map_err(|e| SchemaError::new("", format!("invalid JSON: {e}")))?;
        Self::from_value(raw)
    }

    pub fn from_value(raw: Value) -> Parsed<Self> {
        let root = Node { value: &raw, path: "" };
        root.only(&[
            "schema",
            "name",
            "model",
            "schedule",
            "parameters",
            "initial",
            "t_span",
            "tolerance",
            "samples_per_period",
            "analyses",
            "output",
        ])?;
        let w = Walker { root: &raw };
        let version = w.require("schema")?;
        if version.value.as_u64() != Some(SCHEMA_VERSION) {
            return Err(version.error(format!("unsupported schema version (expected {SCHEMA_VERSION})")));
        }
        let name = match w.optional("name") {
            Some(n) => n.string()?.to_owned(),
            None => "scenario".to_owned(),
        };
        let id = w.require("model")?.string()?;
        if id != "gho" && w.optional("schedule").is_some() {
            return Err(SchemaError::new("schedule", "only the gho model takes a schedule block"));
        }
        if id == "gho" && w.optional("parameters").is_some() {
            return Err(SchemaError::new("parameters", "the gho model takes a schedule block"));
        }
        let model = model(&w, id)?;
        let t_span = match (model.slowness(), w.optional("t_span")) {
            (Some(_), Some(_)) => {
                return Err(SchemaError::new("t_span", "derived from epsilon and window for slowly driven models"))
            }
            (Some(s), None) => s.t_span,
            (None, Some(n)) => pair(n)?,
            (None, None) => return Err(SchemaError::new("t_span", "missing field")),
        };
        let tolerance = match w.optional("tolerance") {
            Some(n) => {
                let tol = n.number()?;
                if !(1e-14..=1e-6).contains(&tol) {
                    return Err(n.error("tolerance must lie in [1e-14, 1e-6]"));
                }
                tol
            }
            None => 1e-12,
        };
        let samples_per_period = match w.optional("samples_per_period") {
            Some(n) => match n.value.as_u64() {
                Some(k) if k as usize >= MIN_SAMPLES_PER_PERIOD => k as usize,
                _ => return Err(n.error(format!("expected an integer of at least {MIN_SAMPLES_PER_PERIOD}"))),
            },
            None => DEFAULT_SAMPLES_PER_PERIOD,
        };
        let mut analyses = Vec::new();
        if let Some(n) = w.optional("analyses") {
            for (i, item) in n.array()?.iter().enumerate() {
                let path = format!("analyses[{i}]");
                let s = item.as_str().ok_or_else(|| SchemaError::new(&path, "expected a string"))?;
                let a = Analysis::parse(s).ok_or_else(|| SchemaError::new(&path, format!("unknown analysis {s:?}")))?;
                if !analyses.contains(&a) {
                    analyses.push(a);
                }
            }
        }
        check_analyses(&model, &analyses)?;
        let mut output = OutputSpec { dir: None, plots: true };
        if let Some(n) = w.optional("output") {
            n.only(&["dir", "plots"])?;
            if let Some(d) = w.optional("output.dir") {
                output.dir = Some(PathBuf::from(d.string()?));
            }
            if let Some(p) = w.optional("output.plots") {
                output.plots = p.value.as_bool().ok_or_else(|| p.error("expected a boolean"))?;
            }
        }
        Ok(Self {
            name,
            model,
            t_span,
            tolerance,
            samples_per_period,
            analyses,
            output,
            raw,
        })
    }

    pub fn raw(&self) -> &Value {
        &self.raw
    }

    /// SHA-256 of the compact, key-sorted JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(&self.raw).expect("a JSON value always serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn wants(&self, a: Analysis) -> bool {
        self.analyses.contains(&a)
    }

    fn edited(&self, edit: impl FnOnce(&mut serde_json::Map<String, Value>)) -> Parsed<Self> {
        let mut raw = self.raw.clone();
        edit(raw.as_object_mut().expect("validated scenarios are objects"));
        Self::from_value(raw)
    }

    pub fn with_tolerance(&self, tol: f64) -> Parsed<Self> {
        self.edited(|m| {
            m.insert("tolerance".into(), Value::from(tol));
        })
    }

    /// The same scenario at another slowness.
    pub fn with_epsilon(&self, epsilon: f64) -> Parsed<Self> {
        let block = match self.model {
            ModelSpec::Gho { .. } => "schedule",
            ModelSpec::Pendulum { .. } | ModelSpec::Dho { .. } => "parameters",
            _ => return Err(SchemaError::new("model", format!("model {:?} has no slowness", self.model.id()))),
        };
        self.edited(|m| {
            if let Some(Value::Object(b)) = m.get_mut(block) {
                b.insert("epsilon".into(), Value::from(epsilon));
            }
        })
    }

    pub fn with_analyses(&self, analyses: &[Analysis]) -> Parsed<Self> {
        let list = analyses.iter().map(|a| Value::from(a.name())).collect();
        self.edited(|m| {
            m.insert("analyses".into(), Value::Array(list));
        })
    }
}
