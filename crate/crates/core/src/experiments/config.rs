use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::beta_exponent;
use crate::error::{Error, Result, Violation};
use crate::models::{Form, ModelKind, ModelParams};
use crate::spectral::{Dealias, Spectrum};
use crate::timestepper::Scheme;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub kind: ModelKind,
    pub form: Form,
    pub alpha: f64,
    pub beta: f64,
    pub pressure: f64,
    pub density: f64,
    pub direction: [f64; 3],
}

impl Default for ModelSection {
    fn default() -> Self {
        let p = ModelParams::default();
        Self {
            kind: ModelKind::Pptt,
            form: Form::Perturbation,
            alpha: p.alpha,
            beta: p.beta,
            pressure: p.pressure,
            density: p.density,
            direction: p.direction,
        }
    }
}

impl ModelSection {
    pub fn params(&self) -> ModelParams {
        ModelParams {
            alpha: self.alpha,
            beta: self.beta,
            pressure: self.pressure,
            density: self.density,
            direction: self.direction,
        }
    }

    pub fn model(&self) -> crate::models::Model {
        crate::models::Model {
            kind: self.kind,
            form: self.form,
            params: self.params(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub d: usize,
    pub n: usize,
    #[serde(rename = "L")]
    pub box_length: f64,
    pub dealias: Dealias,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            d: 2,
            n: 64,
            box_length: 2.0 * std::f64::consts::PI,
            dealias: Dealias::OneHalf,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StepperSection {
    pub scheme: Scheme,
    /// Fixed step; when absent it follows from `cfl`.
    pub dt: Option<f64>,
    pub cfl: f64,
    pub t_end: f64,
    /// Propagate the linearized equations exactly instead of stepping.
    pub linear: bool,
}

impl Default for StepperSection {
    fn default() -> Self {
        Self {
            scheme: Scheme::ImexRk2,
            dt: None,
            cfl: 0.5,
            t_end: 10.0,
            linear: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitSpec {
    /// Smooth bump centred in the box, Gaussian in Fourier space with width `k0`.
    LowFreqBump {
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        #[serde(default = "default_k0")]
        k0: f64,
        #[serde(default)]
        seed: u64,
    },
    /// `|û(k)| = |k|^a` for `0 < |k| <= k0` with random phases.
    PowerProfile {
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        a: f64,
        #[serde(default = "default_k0")]
        k0: f64,
        #[serde(default)]
        seed: u64,
    },
    /// Complex Gaussian coefficients for `0 < |k| <= k0`.
    RandomSmall {
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        #[serde(default = "default_k0")]
        k0: f64,
        #[serde(default)]
        seed: u64,
    },
}

fn default_epsilon() -> f64 {
    1e-3
}

fn default_k0() -> f64 {
    1.0
}

impl Default for InitSpec {
    fn default() -> Self {
        InitSpec::RandomSmall {
            epsilon: default_epsilon(),
            k0: 4.0,
            seed: 0,
        }
    }
}

impl InitSpec {
    pub fn epsilon(&self) -> f64 {
        match *self {
            InitSpec::LowFreqBump { epsilon, .. }
            | InitSpec::PowerProfile { epsilon, .. }
            | InitSpec::RandomSmall { epsilon, .. } => epsilon,
        }
    }

    pub fn seed(&self) -> u64 {
        match *self {
            InitSpec::LowFreqBump { seed, .. }
            | InitSpec::PowerProfile { seed, .. }
            | InitSpec::RandomSmall { seed, .. } => seed,
        }
    }

    pub fn set_seed(&mut self, s: u64) {
        match self {
            InitSpec::LowFreqBump { seed, .. }
            | InitSpec::PowerProfile { seed, .. }
            | InitSpec::RandomSmall { seed, .. } => *seed = s,
        }
    }

    pub fn set_epsilon(&mut self, e: f64) {
        match self {
            InitSpec::LowFreqBump { epsilon, .. }
            | InitSpec::PowerProfile { epsilon, .. }
            | InitSpec::RandomSmall { epsilon, .. } => *epsilon = e,
        }
    }

    pub fn k0(&self) -> f64 {
        match *self {
            InitSpec::LowFreqBump { k0, .. }
            | InitSpec::PowerProfile { k0, .. }
            | InitSpec::RandomSmall { k0, .. } => k0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsSection {
    /// Regularity index of the `H^m` norm.
    pub m: u32,
    /// Negative Sobolev index of the initial data.
    pub s: f64,
    /// Orders `l` of the decay norms `‖Λ^l (u, η)‖`.
    pub l: Vec<f64>,
    pub delta0: f64,
    /// Derivative orders tracked by the energy ledger (empty disables it).
    pub ledger_orders: Vec<u32>,
    pub fit_window: [f64; 2],
    pub fit_tol: f64,
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        Self {
            m: 3,
            s: 0.5,
            l: vec![0.0, 1.0],
            delta0: 0.1,
            ledger_orders: Vec::new(),
            fit_window: [10.0, 100.0],
            fit_tol: 0.15,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub every: usize,
    pub series: String,
    pub checkpoint: Option<String>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            every: 1,
            series: "series.jsonl".into(),
            checkpoint: Some("final.ttlb".into()),
        }
    }
}

/// Random-field ensembles for the inequality checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LabSection {
    pub d: usize,
    pub n: usize,
    #[serde(rename = "L")]
    pub box_length: f64,
    pub spectrum: Spectrum,
    pub cutoff: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Default for LabSection {
    fn default() -> Self {
        Self {
            d: 2,
            n: 32,
            box_length: 2.0 * std::f64::consts::PI,
            spectrum: Spectrum::Flat,
            cutoff: 8,
            trials: 1000,
            seed: 0,
        }
    }
}

/// Settings of the oracle and steady-state self-checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChecksSection {
    pub oracle_d: usize,
    pub oracle_n: usize,
    pub oracle_seed: u64,
    pub steady_steps: usize,
    pub steady_dt: f64,
    pub steady_tol: f64,
}

impl Default for ChecksSection {
    fn default() -> Self {
        Self {
            oracle_d: 2,
            oracle_n: 8,
            oracle_seed: 0,
            steady_steps: 1000,
            steady_dt: 0.01,
            steady_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub model: ModelSection,
    pub grid: GridSection,
    pub stepper: StepperSection,
    pub init: InitSpec,
    pub diagnostics: DiagnosticsSection,
    pub output: OutputSection,
    pub lab: LabSection,
    pub checks: ChecksSection,
}

/// Parse `key=value`; the value is read as a TOML literal, falling back to a string.
fn parse_override(s: &str) -> Result<(Vec<String>, toml::Value)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| Error::ConfigParse(format!("override {s:?} is not key=value")))?;
    let key: Vec<String> = k.trim().split('.').map(|x| x.to_string()).collect();
    if key.iter().any(|x| x.is_empty()) {
        return Err(Error::ConfigParse(format!(
            "override {s:?} has an empty key"
        )));
    }
    let raw = v.trim();
    let value = toml::from_str::<toml::Table>(&format!("x = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("x"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    Ok((key, value))
}

fn apply_override(root: &mut toml::Table, key: &[String], value: toml::Value) -> Result<()> {
    let mut table = root;
    for part in &key[..key.len() - 1] {
        let entry = table
            .entry(part.clone())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| Error::ConfigParse(format!("override key {part:?} is not a table")))?;
    }
    table.insert(key[key.len() - 1].clone(), value);
    Ok(())
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table =
            toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
        for o in overrides {
            let (k, v) = parse_override(o)?;
            apply_override(&mut table, &k, v)?;
        }
        let cfg: ExperimentConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::ConfigParse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, overrides)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }

    /// Every constraint violation, named by field.
    pub fn violations(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        let g = &self.grid;
        if !(2..=3).contains(&g.d) {
            v.push(Violation::new(
                "grid.d",
                format!("got {}, need d ∈ {{2,3}}", g.d),
            ));
        }
        if g.n < 4 || !g.n.is_multiple_of(2) {
            v.push(Violation::new(
                "grid.n",
                format!("got {}, need an even n >= 4", g.n),
            ));
        }
        if !(g.box_length.is_finite() && g.box_length > 0.0) {
            v.push(Violation::new("grid.L", "box length must be positive"));
        }
        let p = &self.model.params();
        if !(p.alpha > 0.0 && p.beta > 0.0 && p.pressure > 0.0 && p.density > 0.0) {
            v.push(Violation::new(
                "model",
                "alpha, beta, pressure and density must be positive",
            ));
        }
        if (2..=3).contains(&g.d) && p.validate(g.d).is_err() {
            v.push(Violation::new(
                "model.direction",
                "must be a unit vector in R^d",
            ));
        }
        let st = &self.stepper;
        if !(st.t_end.is_finite() && st.t_end >= 0.0) {
            v.push(Violation::new("stepper.t_end", "must be non-negative"));
        }
        if let Some(dt) = st.dt {
            if !(dt.is_finite() && dt > 0.0) {
                v.push(Violation::new("stepper.dt", "must be positive"));
            }
        }
        if !(st.cfl > 0.0 && st.cfl <= 1.0) {
            v.push(Violation::new("stepper.cfl", "must lie in (0, 1]"));
        }
        if st.linear && self.model.form != Form::Perturbation {
            v.push(Violation::new(
                "stepper.linear",
                "exact linear propagation is defined for the perturbation form",
            ));
        }
        if self.output.every == 0 {
            v.push(Violation::new("output.every", "must be at least 1"));
        }
        let dg = &self.diagnostics;
        if dg.m < 1 {
            v.push(Violation::new("diagnostics.m", "must be at least 1"));
        }
        if !(dg.delta0 > 0.0 && dg.delta0 < 1.0) {
            v.push(Violation::new("diagnostics.delta0", "must lie in (0, 1)"));
        }
        let df = g.d as f64;
        let endpoint = g.d == 3 && dg.m == 3 && dg.s == 0.0;
        if !(endpoint || (dg.s > 0.0 && dg.s < df / 2.0)) {
            v.push(Violation::new(
                "diagnostics.s",
                format!(
                    "got {}; the decay hypothesis needs 0 < s < d/2 (s = 0 only for d = m = 3)",
                    dg.s
                ),
            ));
        }
        if dg.l.iter().any(|&l| l < 0.0) {
            v.push(Violation::new(
                "diagnostics.l",
                "orders must be non-negative",
            ));
        }
        if !(dg.fit_window[0] < dg.fit_window[1]) {
            v.push(Violation::new(
                "diagnostics.fit_window",
                "must be increasing",
            ));
        }
        if !(dg.fit_tol > 0.0) {
            v.push(Violation::new("diagnostics.fit_tol", "must be positive"));
        }
        let lab = &self.lab;
        if !(2..=3).contains(&lab.d)
            || lab.n < 4
            || !lab.n.is_multiple_of(2)
            || !(lab.box_length > 0.0)
        {
            v.push(Violation::new(
                "lab",
                "need d ∈ {2,3}, an even n >= 4 and L > 0",
            ));
        }
        if lab.trials == 0 || lab.cutoff == 0 {
            v.push(Violation::new("lab", "trials and cutoff must be positive"));
        }
        let ck = &self.checks;
        if !(2..=3).contains(&ck.oracle_d) || ck.oracle_n < 4 || !ck.oracle_n.is_multiple_of(2) {
            v.push(Violation::new(
                "checks.oracle_n",
                "need d ∈ {2,3} and an even n >= 4",
            ));
        }
        if !(ck.steady_dt > 0.0 && ck.steady_tol > 0.0) {
            v.push(Violation::new(
                "checks",
                "steady_dt and steady_tol must be positive",
            ));
        }
        let init = &self.init;
        if !(init.epsilon() >= 0.0 && init.epsilon().is_finite()) {
            v.push(Violation::new("init.epsilon", "must be non-negative"));
        }
        if !(init.k0() > 0.0) {
            v.push(Violation::new("init.k0", "must be positive"));
        }
        if let InitSpec::PowerProfile { a, .. } = *init {
            if a - dg.s <= -df / 2.0 {
                v.push(Violation::new(
                    "init.a",
                    format!(
                        "profile exponent {a} gives infinite Ḣ^-s norm for s = {}",
                        dg.s
                    ),
                ));
            }
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(v))
        }
    }

    /// Whether `s` also satisfies `-β(d, m) <= s`, the hypothesis of the
    /// nonlinear decay theorem.
    pub fn meets_theorem_hypothesis(&self) -> bool {
        match beta_exponent(self.grid.d, self.diagnostics.m) {
            Ok(b) => {
                self.diagnostics.s >= -b && self.diagnostics.s < self.grid.d as f64 / 2.0 + 1e-15
            }
            Err(_) => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = ExperimentConfig::from_toml_str("[model]\nkind = \"tt\"\n", &[]).unwrap();
        assert_eq!(c.stepper.scheme, Scheme::ImexRk2);
        assert_eq!(c.diagnostics.delta0, 0.1);
        assert_eq!(c.grid.dealias, Dealias::OneHalf);
        assert_eq!(c.model.kind, ModelKind::Tt);
    }

    #[test]
    fn d4_is_rejected_by_name() {
        let e = ExperimentConfig::from_toml_str("[grid]\nd = 4\n", &[]).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("grid.d") && msg.contains("d ∈ {2,3}"), "{msg}");
    }

    #[test]
    fn s_outside_range_is_rejected() {
        let e = ExperimentConfig::from_toml_str("[diagnostics]\ns = 1.5\n", &[]).unwrap_err();
        assert!(e.to_string().contains("diagnostics.s"));
        let ok =
            ExperimentConfig::from_toml_str("[grid]\nd = 3\n[diagnostics]\ns = 0.0\nm = 3\n", &[]);
        assert!(ok.is_ok());
    }

    #[test]
    fn overrides_apply() {
        let c = ExperimentConfig::from_toml_str(
            "",
            &[
                "grid.n=32".into(),
                "stepper.scheme=imex-euler".into(),
                "init.kind=low-freq-bump".into(),
            ],
        )
        .unwrap();
        assert_eq!(c.grid.n, 32);
        assert_eq!(c.stepper.scheme, Scheme::ImexEuler);
        assert!(matches!(c.init, InitSpec::LowFreqBump { .. }));
    }

    #[test]
    fn unknown_keys_fail() {
        assert!(matches!(
            ExperimentConfig::from_toml_str("[grid]\nsize = 3\n", &[]),
            Err(Error::ConfigParse(_))
        ));
    }

    #[test]
    fn hypothesis_flag() {
        let c = ExperimentConfig::default();
        // -β(2,3) ≈ 0.56 > 0.5
        assert!(!c.meets_theorem_hypothesis());
        let c = ExperimentConfig::from_toml_str("[diagnostics]\ns = 0.7\n", &[]).unwrap();
        assert!(c.meets_theorem_hypothesis());
    }
}
