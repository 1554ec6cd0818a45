//! Line-oriented `key = value` experiment configuration with `#` comments.
//! Command-line flags override file values; the fully resolved config (all
//! defaults filled in) is echoed into the output directory so a run can be
//! reproduced byte for byte from its artifacts.

use std::collections::BTreeMap;
use std::path::Path;

use crate::errors::Error;
use crate::hamiltonian::{BoundaryCondition, HamiltonianSpec};
use crate::interaction::{InteractionModel, TuplePotential};
use crate::score::ScoreModel;
use crate::torus::{unit_ball_volume, TorusWindow};
use crate::Result;

/// All knobs of a run, before validation. Every field has a default; the
/// resolved form is what gets echoed and hashed.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub values: BTreeMap<String, String>,
}

const KNOWN_KEYS: &[&str] = &[
    "model.kind",
    "model.gamma",
    "model.r",
    "model.R",
    "model.k",
    "model.s_cap",
    "score.kind",
    "score.r",
    "score.k",
    "bc.kind",
    "bc.points_file",
    "window.lambda",
    "window.d",
    "window.n",
    "window.ladder",
    "sampler.burn_in",
    "sampler.thinning",
    "sampler.samples",
    "sampler.replicas",
    "sampler.beta_nodes",
    "task.trials",
    "task.eps",
    "task.delta",
    "task.b",
    "task.direction",
    "task.a",
    "task.method",
    "task.profile",
    "task.process",
    "task.count",
    "seed",
    "stream",
    "out.dir",
];

impl Default for ExperimentConfig {
    fn default() -> Self {
        let mut values = BTreeMap::new();
        for (k, v) in [
            ("bc.kind", "none"),
            ("window.lambda", "1"),
            ("window.d", "2"),
            ("sampler.burn_in", "200"),
            ("sampler.thinning", "10"),
            ("sampler.samples", "400"),
            ("sampler.replicas", "16"),
            ("sampler.beta_nodes", "21"),
            ("task.eps", "0.1"),
            ("task.delta", "0.1"),
            ("task.b", "auto"),
            ("task.direction", "le"),
            ("task.method", "naive"),
            ("task.process", "binomial"),
            ("task.count", "1"),
            ("task.trials", "1000"),
            ("seed", "0"),
            ("stream", "0"),
            ("out.dir", "out"),
        ] {
            values.insert(k.to_string(), v.to_string());
        }
        Self { values }
    }
}

/// Parse the `key = value` format; unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::ConstraintViolated(format!(
                "line {}: expected `key = value`, got `{raw}`",
                lineno + 1
            )));
        };
        cfg.set(key.trim(), value.trim())?;
    }
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        parse_config(&std::fs::read_to_string(path)?)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(Error::UnknownKey(key.to_string()));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    /// The resolved config in the same `key = value` format, keys sorted.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.values {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }

    fn parse_with<T, F>(&self, key: &str, f: F) -> Result<T>
    where
        F: Fn(&str) -> Option<T>,
    {
        let raw = self
            .get(key)
            .ok_or_else(|| Error::ConstraintViolated(format!("missing required key `{key}`")))?;
        f(raw).ok_or_else(|| Error::TypeMismatch {
            key: key.to_string(),
            message: format!("cannot interpret `{raw}`"),
        })
    }

    pub fn f64_value(&self, key: &str) -> Result<f64> {
        self.parse_with(key, |s| s.parse::<f64>().ok())
    }

    pub fn usize_value(&self, key: &str) -> Result<usize> {
        self.parse_with(key, |s| s.parse::<usize>().ok())
    }

    pub fn u64_value(&self, key: &str) -> Result<u64> {
        self.parse_with(key, |s| s.parse::<u64>().ok())
    }

    pub fn ladder(&self) -> Result<Vec<usize>> {
        self.parse_with("window.ladder", |s| {
            let parts: Option<Vec<usize>> =
                s.split(',').map(|p| p.trim().parse::<usize>().ok()).collect();
            parts.filter(|v| !v.is_empty())
        })
    }

    pub fn window(&self) -> Result<TorusWindow> {
        let lambda = self.f64_value("window.lambda")?;
        let d = self.usize_value("window.d")?;
        let n = self.usize_value("window.n")?;
        TorusWindow::new(d, lambda, n)
    }

    /// Build the interaction model, enforcing the parse-time guardrails:
    /// γ ∈ (0,1], k ≤ 4, and the hard-core intensity assumption
    /// λ·v_d·R^d < 1.
    pub fn model(&self) -> Result<InteractionModel> {
        let kind = self
            .get("model.kind")
            .ok_or_else(|| Error::ConstraintViolated("missing required key `model.kind`".into()))?;
        let model = match kind {
            "strauss" => {
                let gamma = self.f64_value("model.gamma")?;
                let r = self.f64_value("model.r")?;
                InteractionModel::strauss(gamma, r)?
            }
            "kwise" => {
                let k = self.usize_value("model.k")?;
                if k > 4 {
                    return Err(Error::ConstraintViolated(format!(
                        "k-wise interactions are limited to k <= 4 (tuple enumeration is O(deg^(k-1))), got {k}"
                    )));
                }
                let r = self.f64_value("model.r")?;
                InteractionModel::k_wise(k, r, TuplePotential::Clique(1.0))?
            }
            "hardcore" => {
                let radius = self.f64_value("model.R")?;
                let lambda = self.f64_value("window.lambda")?;
                let d = self.usize_value("window.d")?;
                let packing = lambda * unit_ball_volume(d) * radius.powi(d as i32);
                if packing >= 1.0 {
                    return Err(Error::ConstraintViolated(format!(
                        "hard-core model needs λ·v_d·R^d < 1 (the intensity assumption); λ·v_d·R^d = {packing:.5}"
                    )));
                }
                InteractionModel::hard_core(radius)?
            }
            "truncated-hardcore" => {
                let radius = self.f64_value("model.R")?;
                let cap = self.f64_value("model.s_cap")?;
                InteractionModel::truncated_hard_core(radius, cap)?
            }
            other => {
                return Err(Error::ConstraintViolated(format!(
                    "model.kind must be strauss|kwise|hardcore|truncated-hardcore, got `{other}`"
                )))
            }
        };
        // Optional truncation for the finite kinds.
        match (kind, self.get("model.s_cap")) {
            ("strauss" | "kwise", Some(cap)) => {
                let cap = cap.parse::<f64>().map_err(|_| Error::TypeMismatch {
                    key: "model.s_cap".into(),
                    message: "expected a real".into(),
                })?;
                model.truncated(cap)
            }
            _ => Ok(model),
        }
    }

    pub fn score(&self) -> Result<ScoreModel> {
        let kind = self
            .get("score.kind")
            .ok_or_else(|| Error::ConstraintViolated("missing required key `score.kind`".into()))?;
        let r = self.f64_value("score.r")?;
        match kind {
            "neighbor-count" => ScoreModel::neighbor_count(r),
            "clique" => {
                let k = self.usize_value("score.k")?;
                if k > 4 {
                    return Err(Error::ConstraintViolated(format!(
                        "clique scores are limited to k <= 4, got {k}"
                    )));
                }
                ScoreModel::clique_count(k, r)
            }
            "pair-indicator" => ScoreModel::pair_indicator(r),
            "constant" => ScoreModel::constant(r),
            other => Err(Error::ConstraintViolated(format!(
                "score.kind must be neighbor-count|clique|pair-indicator|constant, got `{other}`"
            ))),
        }
    }

    /// The Hamiltonian convention; boundary kinds need `bc.points_file`, a
    /// headerless CSV of d-vectors.
    pub fn hamiltonian_spec(&self, model: &InteractionModel) -> Result<HamiltonianSpec> {
        match self.get("bc.kind").unwrap_or("none") {
            "none" | "periodic" => Ok(HamiltonianSpec::Periodic),
            kind @ ("boundary-1" | "boundary-2") => {
                let file = self
                    .get("bc.points_file")
                    .ok_or(Error::MissingBoundaryCondition)?;
                let window = self.window()?;
                let points = read_points_csv(Path::new(file), window.dim())?;
                let bc = BoundaryCondition::new(&window, model.radius(), &points)?;
                Ok(if kind == "boundary-1" {
                    HamiltonianSpec::BoundaryOne(bc)
                } else {
                    HamiltonianSpec::BoundaryTwo(bc)
                })
            }
            other => Err(Error::ConstraintViolated(format!(
                "bc.kind must be none|boundary-1|boundary-2, got `{other}`"
            ))),
        }
    }

    /// `task.b = auto` resolves to `K_r + 1`, the smallest admissible dense
    /// threshold for the move-event machinery.
    pub fn dense_threshold(&self, k_r: usize) -> Result<usize> {
        match self.get("task.b").unwrap_or("auto") {
            "auto" => Ok(k_r + 1),
            raw => raw.parse::<usize>().map_err(|_| Error::TypeMismatch {
                key: "task.b".into(),
                message: "expected `auto` or an integer".into(),
            }),
        }
    }
}

/// Headerless CSV of d-vectors, one point per row.
pub fn read_points_csv(path: &Path, dim: usize) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with("x0") {
            continue; // tolerate a sample-dump header
        }
        let row: Option<Vec<f64>> = line.split(',').map(|c| c.trim().parse().ok()).collect();
        let row = row.ok_or_else(|| Error::TypeMismatch {
            key: format!("{}:{}", path.display(), lineno + 1),
            message: "expected comma-separated reals".into(),
        })?;
        if row.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: row.len(),
            });
        }
        out.push(row);
    }
    Ok(out)
}
