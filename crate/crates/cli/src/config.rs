//! Flat key = value experiment configuration: '#' comments, no sections,
//! kind-specific keys namespaced by prefix (decay.t_end = 40). Unknown keys
//! are hard errors and every diagnostic is collected before reporting.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExperimentKind {
    Simulate,
    Decay,
    Scattering,
    Strichartz,
    Dispersive,
    Equivalence,
    Commutators,
    Resolvent,
    HeatDomination,
    RegularPoint,
    AsBound,
    LinfInterp,
}

pub const ALL_KINDS: [ExperimentKind; 12] = [
    ExperimentKind::Simulate,
    ExperimentKind::Decay,
    ExperimentKind::Scattering,
    ExperimentKind::Strichartz,
    ExperimentKind::Dispersive,
    ExperimentKind::Equivalence,
    ExperimentKind::Commutators,
    ExperimentKind::Resolvent,
    ExperimentKind::HeatDomination,
    ExperimentKind::RegularPoint,
    ExperimentKind::AsBound,
    ExperimentKind::LinfInterp,
];

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Simulate => "simulate",
            Self::Decay => "decay",
            Self::Scattering => "scattering",
            Self::Strichartz => "strichartz",
            Self::Dispersive => "dispersive",
            Self::Equivalence => "equivalence",
            Self::Commutators => "commutators",
            Self::Resolvent => "resolvent",
            Self::HeatDomination => "heat-domination",
            Self::RegularPoint => "regular-point",
            Self::AsBound => "as-bound",
            Self::LinfInterp => "linf-interp",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        ALL_KINDS.iter().copied().find(|k| k.name() == text)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    List(Vec<f64>),
    Text(String),
}

impl Value {
    fn render(&self) -> String {
        match self {
            Value::Number(x) => format!("{x}"),
            Value::List(xs) => xs
                .iter()
                .map(|x| format!("{x}"))
                .collect::<Vec<_>>()
                .join(","),
            Value::Text(s) => s.clone(),
        }
    }
}

/// One schema entry: key, default, and an optional numeric constraint
/// reported with the exact violated condition.
struct KeySpec {
    key: &'static str,
    default: Value,
    check: Option<fn(f64) -> Option<String>>,
}

fn num(key: &'static str, default: f64) -> KeySpec {
    KeySpec {
        key,
        default: Value::Number(default),
        check: None,
    }
}

fn num_checked(key: &'static str, default: f64, check: fn(f64) -> Option<String>) -> KeySpec {
    KeySpec {
        key,
        default: Value::Number(default),
        check: Some(check),
    }
}

fn list(key: &'static str, default: &[f64]) -> KeySpec {
    KeySpec {
        key,
        default: Value::List(default.to_vec()),
        check: None,
    }
}

fn text(key: &'static str, default: &str) -> KeySpec {
    KeySpec {
        key,
        default: Value::Text(default.to_string()),
        check: None,
    }
}

fn positive(x: f64) -> Option<String> {
    (x <= 0.0).then(|| "must be positive".to_string())
}

fn nonnegative(x: f64) -> Option<String> {
    (x < 0.0).then(|| "must be nonnegative".to_string())
}

fn p_exceeds_two(x: f64) -> Option<String> {
    (x <= 2.0).then(|| "p must exceed 2".to_string())
}

fn im_lambda_nonpositive(x: f64) -> Option<String> {
    (x > 0.0).then(|| "Im lambda must be <= 0".to_string())
}

fn alpha_open_interval(x: f64) -> Option<String> {
    (!(x > 1.0 && x < 2.0)).then(|| "alpha must lie in (1, 2)".to_string())
}

fn grid_size(x: f64) -> Option<String> {
    (x < 8.0 || x.fract() != 0.0 || (x as usize) % 2 != 0)
        .then(|| "grid size must be an even integer >= 8".to_string())
}

/// Schema shared by every experiment.
fn common_schema(kind: ExperimentKind) -> Vec<KeySpec> {
    let (n_default, l_default) = match kind {
        ExperimentKind::Decay | ExperimentKind::Scattering => (256.0, 64.0),
        ExperimentKind::Strichartz => (128.0, 16.0),
        ExperimentKind::Dispersive => (96.0, 24.0),
        ExperimentKind::Resolvent => (96.0, 12.0),
        ExperimentKind::Equivalence => (64.0, 12.0),
        ExperimentKind::HeatDomination => (48.0, 12.0),
        ExperimentKind::RegularPoint | ExperimentKind::AsBound | ExperimentKind::LinfInterp => {
            (32.0, 12.0)
        }
        _ => (64.0, 12.0),
    };
    let family_default = match kind {
        ExperimentKind::Commutators | ExperimentKind::Resolvent => "zero",
        _ => "gaussian_bump",
    };
    vec![
        text("experiment", kind.name()),
        num_checked("n", n_default, grid_size),
        num_checked("l", l_default, positive),
        num_checked("seed", 7_u32 as f64, nonnegative),
        text("family", family_default),
        num_checked("c0", 1.0, nonnegative),
        num_checked("w", 1.0, positive),
        num_checked("beta", 4.0, positive),
        num_checked("hyp_beta", 4.0, positive),
    ]
}

fn physics_schema(kind: ExperimentKind) -> Vec<KeySpec> {
    let dt = match kind {
        ExperimentKind::Decay | ExperimentKind::Scattering => 5e-3,
        _ => 1e-2,
    };
    let width = match kind {
        ExperimentKind::Decay | ExperimentKind::Scattering => 2.8,
        _ => 1.0,
    };
    vec![
        num_checked("p", 3.0, p_exceeds_two),
        num("re_lambda", 1.0),
        num_checked("im_lambda", 0.0, im_lambda_nonpositive),
        num_checked("epsilon", 0.05, positive),
        num_checked("alpha", 1.4, alpha_open_interval),
        num_checked("width", width, positive),
        num_checked("dt", dt, positive),
    ]
}

fn kind_schema(kind: ExperimentKind) -> Vec<KeySpec> {
    match kind {
        ExperimentKind::Simulate => vec![
            num_checked("simulate.t_end", 5.0, positive),
            num_checked("simulate.sample_every", 10.0, positive),
            list("simulate.store", &[5.0]),
        ],
        ExperimentKind::Decay => vec![
            num_checked("decay.t_end", 40.0, positive),
            num_checked("decay.sample_every", 20.0, positive),
            num_checked("decay.fit_t_min", 20.0, positive),
            num_checked("decay.fit_t_max", 40.0, positive),
            num("decay.gamma_min", 0.85),
            num("decay.gamma_max", 1.15),
        ],
        ExperimentKind::Scattering => vec![
            num_checked("scattering.t_end", 40.0, positive),
            num_checked("scattering.sample_every", 20.0, positive),
            list("scattering.samples", &[20.0, 23.0, 26.5, 30.5, 35.0, 40.0]),
            num_checked("scattering.dt_back", 0.02, positive),
            num_checked("scattering.tail_factor", 1e-3, positive),
        ],
        ExperimentKind::Strichartz => vec![
            num("strichartz.p_exp", 4.0),
            num("strichartz.q_exp", 4.0),
            num_checked("strichartz.count", 50.0, positive),
            num_checked("strichartz.t_end", 2.0, positive),
            num_checked("strichartz.dt", 0.02, positive),
            num_checked("strichartz.refine_n", 192.0, grid_size),
            num_checked("strichartz.drift_tol", 0.3, positive),
            num_checked("strichartz.max_mode", 10.0, positive),
        ],
        ExperimentKind::Dispersive => vec![
            list("dispersive.t_set", &[3.0, 4.0, 5.0, 5.5]),
            num_checked("dispersive.dt", 0.05, positive),
            num_checked("dispersive.gate_n", 32.0, grid_size),
            num_checked("dispersive.flat_factor", 2.0, positive),
        ],
        ExperimentKind::Equivalence => vec![
            list("equivalence.s_set", &[0.25, 0.5, 0.75]),
            num_checked("equivalence.count", 100.0, positive),
            num_checked("equivalence.refine_n", 128.0, grid_size),
            num_checked("equivalence.nodes", 64.0, positive),
            num_checked("equivalence.max_mode", 10.0, positive),
            num_checked("equivalence.drift_tol", 0.2, positive),
            num_checked("equivalence.ratio_min", 0.1, positive),
            num_checked("equivalence.ratio_max", 10.0, positive),
        ],
        ExperimentKind::Commutators => vec![
            list("commutators.s_set", &[0.5, 1.0, 1.5]),
            num_checked("commutators.t", 2.0, positive),
            num_checked("commutators.dt_fd", 2e-2, positive),
            num_checked("commutators.width", 1.1, positive),
            num_checked("commutators.nodes", 200.0, positive),
            num_checked("commutators.spatial_tol", 1e-6, positive),
            num_checked("commutators.nullity_tol", 1e-5, positive),
            num_checked("commutators.cross_route_tol", 1e-6, positive),
            num_checked("commutators.a_cross_tol", 1e-3, positive),
            num_checked("commutators.cs_tol", 1e-8, positive),
            num("commutators.order_min", 1.8),
            num("commutators.order_max", 2.2),
            num_checked("commutators.bump_n", 48.0, grid_size),
        ],
        ExperimentKind::Resolvent => vec![
            num("resolvent.q", 4.0),
            num("resolvent.s0", 0.5),
            num("resolvent.a", 1.5),
            list("resolvent.taus", &[0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0]),
            num_checked("resolvent.noise_count", 4.0, positive),
            num_checked("resolvent.flat_tol", 0.25, positive),
            num_checked("resolvent.low_growth_tol", 2.0, positive),
        ],
        ExperimentKind::HeatDomination => vec![
            list("heat.t_set", &[1.0, 1.25, 1.5, 2.0]),
            list("heat.betas", &[1.0, 1.05, 1.1]),
            list("heat.cs", &[1.01, 1.05]),
            num_checked("heat.coverage", 0.999, positive),
            num_checked("heat.stride", 4.0, positive),
            num("heat.negativity_floor", -1e-10),
            num_checked("heat.atol", 1e-9, positive),
        ],
        ExperimentKind::RegularPoint => vec![
            list("regular.ns", &[32.0, 48.0, 64.0]),
            num_checked("regular.drift_tol", 0.3, positive),
        ],
        ExperimentKind::AsBound => vec![
            num("asbound.s", 1.5),
            num("asbound.q", 2.0),
            num_checked("asbound.count", 4.0, positive),
            num_checked("asbound.nodes", 100.0, positive),
            list("asbound.refine_ns", &[32.0, 48.0, 64.0]),
            num_checked("asbound.drift_tol", 0.3, positive),
        ],
        ExperimentKind::LinfInterp => vec![
            num("linf.s", 1.5),
            num_checked("linf.count", 8.0, positive),
            num_checked("linf.equality_tol", 1e-10, positive),
        ],
    }
}

fn full_schema(kind: ExperimentKind) -> Vec<KeySpec> {
    let mut schema = common_schema(kind);
    if matches!(
        kind,
        ExperimentKind::Simulate
            | ExperimentKind::Decay
            | ExperimentKind::Scattering
            | ExperimentKind::Strichartz
            | ExperimentKind::Dispersive
    ) {
        schema.extend(physics_schema(kind));
    }
    schema.extend(kind_schema(kind));
    schema
}

/// Fully resolved configuration: defaults overlaid with the parsed file.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    values: BTreeMap<String, Value>,
}

impl ExperimentConfig {
    pub fn defaults(kind: ExperimentKind) -> Self {
        let values = full_schema(kind)
            .into_iter()
            .map(|spec| (spec.key.to_string(), spec.default))
            .collect();
        Self { kind, values }
    }

    pub fn number(&self, key: &str) -> f64 {
        match self.values.get(key) {
            Some(Value::Number(x)) => *x,
            other => panic!("config key {key} is not a number: {other:?}"),
        }
    }

    pub fn usize_of(&self, key: &str) -> usize {
        self.number(key) as usize
    }

    pub fn list(&self, key: &str) -> Vec<f64> {
        match self.values.get(key) {
            Some(Value::List(xs)) => xs.clone(),
            Some(Value::Number(x)) => vec![*x],
            other => panic!("config key {key} is not a list: {other:?}"),
        }
    }

    pub fn text(&self, key: &str) -> String {
        match self.values.get(key) {
            Some(Value::Text(s)) => s.clone(),
            Some(Value::Number(x)) => format!("{x}"),
            other => panic!("config key {key} is not text: {other:?}"),
        }
    }

    pub fn set_number(&mut self, key: &str, value: f64) {
        self.values.insert(key.to_string(), Value::Number(value));
    }

    /// Serializes the effective configuration; re-parsing reproduces it.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.values {
            let _ = writeln!(out, "{k} = {}", v.render());
        }
        out
    }
}

/// Parses a config file against the schema of `expected_kind`. Reports every
/// problem at once: syntax errors, unknown keys, type mismatches, and
/// constraint violations, each naming the key and the condition.
pub fn parse_config_text(
    text: &str,
    expected_kind: ExperimentKind,
) -> Result<ExperimentConfig, Vec<String>> {
    let mut errors = Vec::new();
    let mut pairs: Vec<(String, String)> = Vec::new();
    for (lineno, raw_line) in text.lines().enumerate() {
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) => pairs.push((k.trim().to_string(), v.trim().to_string())),
            None => errors.push(format!(
                "line {}: expected 'key = value', got '{line}'",
                lineno + 1
            )),
        }
    }

    let schema = full_schema(expected_kind);
    let mut cfg = ExperimentConfig::defaults(expected_kind);
    for (key, raw) in &pairs {
        if key == "experiment" {
            match ExperimentKind::parse(raw) {
                Some(k) if k == expected_kind => {}
                Some(k) => errors.push(format!(
                    "experiment: file says '{}' but '{}' was requested",
                    k.name(),
                    expected_kind.name()
                )),
                None => errors.push(format!("experiment: unknown kind '{raw}'")),
            }
            continue;
        }
        let Some(spec) = schema.iter().find(|s| s.key == key) else {
            errors.push(format!("unknown key '{key}'"));
            continue;
        };
        match &spec.default {
            Value::Number(_) => match raw.parse::<f64>() {
                Ok(x) => {
                    if let Some(check) = spec.check {
                        if let Some(msg) = check(x) {
                            errors.push(format!("{key} = {raw}: {msg}"));
                            continue;
                        }
                    }
                    cfg.values.insert(key.clone(), Value::Number(x));
                }
                Err(_) => errors.push(format!("{key} = {raw}: expected a number")),
            },
            Value::List(_) => {
                let parsed: std::result::Result<Vec<f64>, _> = raw
                    .split(',')
                    .map(|piece| piece.trim().parse::<f64>())
                    .collect();
                match parsed {
                    Ok(xs) if !xs.is_empty() => {
                        cfg.values.insert(key.clone(), Value::List(xs));
                    }
                    _ => errors.push(format!(
                        "{key} = {raw}: expected a comma-separated list of numbers"
                    )),
                }
            }
            Value::Text(_) => {
                cfg.values.insert(key.clone(), Value::Text(raw.clone()));
            }
        }
    }

    // cross-key validation
    let family = cfg.text("family");
    if !matches!(family.as_str(), "zero" | "gaussian_bump" | "inverse_power") {
        errors.push(format!(
            "family = {family}: expected zero, gaussian_bump or inverse_power"
        ));
    }

    if errors.is_empty() {
        Ok(cfg)
    } else {
        Err(errors)
    }
}

pub fn parse_config_file(
    path: &Path,
    expected_kind: ExperimentKind,
) -> Result<ExperimentConfig, Vec<String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| vec![format!("cannot read {}: {e}", path.display())])?;
    parse_config_text(&text, expected_kind)
}

/// The potential family addressed by the config keys.
pub fn potential_from(cfg: &ExperimentConfig) -> nlslab_core::PotentialSpec {
    match cfg.text("family").as_str() {
        "zero" => nlslab_core::PotentialSpec::zero(),
        "inverse_power" => {
            nlslab_core::PotentialSpec::inverse_power(cfg.number("c0"), cfg.number("beta"))
        }
        _ => nlslab_core::PotentialSpec::gaussian_bump(cfg.number("c0"), cfg.number("w")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_applies_defaults() {
        let cfg = parse_config_text("experiment = decay", ExperimentKind::Decay).unwrap();
        assert_eq!(cfg.number("n"), 256.0);
        assert_eq!(cfg.number("decay.t_end"), 40.0);
        assert_eq!(cfg.number("p"), 3.0);
    }

    #[test]
    fn p_constraint_names_key_and_condition() {
        let err = parse_config_text("p = 1.5", ExperimentKind::Decay).unwrap_err();
        assert!(err.iter().any(|e| e.contains("p must exceed 2")), "{err:?}");
    }

    #[test]
    fn im_lambda_constraint() {
        let err = parse_config_text("im_lambda = 0.1", ExperimentKind::Simulate).unwrap_err();
        assert!(
            err.iter().any(|e| e.contains("Im lambda must be <= 0")),
            "{err:?}"
        );
    }

    #[test]
    fn unknown_keys_are_hard_errors_and_all_reported() {
        let err = parse_config_text(
            "typo_key = 1\nother_bad = 2\np = 1.0",
            ExperimentKind::Decay,
        )
        .unwrap_err();
        assert_eq!(err.len(), 3, "{err:?}");
    }

    #[test]
    fn effective_config_round_trips() {
        let cfg =
            parse_config_text("experiment = decay\nn = 128\nseed = 42", ExperimentKind::Decay)
                .unwrap();
        let text = cfg.to_text();
        let back = parse_config_text(&text, ExperimentKind::Decay).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn lists_parse_from_commas() {
        let cfg = parse_config_text(
            "equivalence.s_set = 0.3, 0.6",
            ExperimentKind::Equivalence,
        )
        .unwrap();
        assert_eq!(cfg.list("equivalence.s_set"), vec![0.3, 0.6]);
    }

    #[test]
    fn kind_mismatch_is_reported() {
        let err = parse_config_text("experiment = decay", ExperimentKind::Strichartz).unwrap_err();
        assert!(err[0].contains("requested"), "{err:?}");
    }
}
