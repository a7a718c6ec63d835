//! The structured run report: a line-oriented `key: value` document with a
//! versioned schema. Serialization order is fixed so identical runs produce
//! byte-identical reports; the two timing keys are the only fields excluded
//! from golden comparisons. Floats print through Rust's shortest round-trip
//! formatting, so parsing a report recovers every value exactly.

pub const SCHEMA_VERSION: u64 = 1;

/// Keys whose lines carry wall-clock measurements.
pub const TIMING_KEYS: [&str; 2] = ["wall_seconds", "per_iter_seconds"];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunReport {
    pub schema: u64,
    pub command: String,
    pub graph: Option<String>,
    pub format: Option<String>,
    pub nodes: Option<usize>,
    pub edges: Option<usize>,
    pub k: Option<usize>,
    pub variant: Option<String>,
    pub method: Option<String>,
    pub alpha: Option<f64>,
    pub effective_alpha: Option<f64>,
    pub lambda: Option<f64>,
    pub safe_step: Option<bool>,
    pub laplacian: Option<String>,
    pub seed: Option<u64>,
    pub restarts: Option<usize>,
    pub iters_requested: Option<usize>,
    pub tol: Option<f64>,
    pub stop_reason: Option<String>,
    pub iterations: Option<usize>,
    pub objective: Option<f64>,
    pub objectives: Option<Vec<f64>>,
    pub assignment: Option<Vec<usize>>,
    pub cluster_sizes: Option<Vec<f64>>,
    pub target_dist: Option<Vec<f64>>,
    pub ari: Option<f64>,
    pub kl_to_target: Option<f64>,
    pub cut: Option<f64>,
    pub ncut: Option<f64>,
    pub rcut: Option<f64>,
    pub inertia: Option<f64>,
    pub wall_seconds: Option<f64>,
    pub per_iter_seconds: Option<Vec<f64>>,
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("line {line}: expected 'key: value'")]
    BadLine { line: usize },
    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value for '{key}': {message}")]
    BadValue {
        line: usize,
        key: String,
        message: String,
    },
    #[error("missing required key '{0}'")]
    Missing(&'static str),
}

fn join<T: std::fmt::Display>(v: &[T]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            schema: SCHEMA_VERSION,
            command: command.to_string(),
            ..Default::default()
        }
    }

    /// Serializes in the documented fixed field order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |key: &str, value: Option<String>| {
            if let Some(v) = value {
                out.push_str(key);
                out.push(':');
                if !v.is_empty() {
                    out.push(' ');
                    out.push_str(&v);
                }
                out.push('\n');
            }
        };
        put("schema", Some(self.schema.to_string()));
        put("command", Some(self.command.clone()));
        put("graph", self.graph.clone());
        put("format", self.format.clone());
        put("nodes", self.nodes.map(|v| v.to_string()));
        put("edges", self.edges.map(|v| v.to_string()));
        put("k", self.k.map(|v| v.to_string()));
        put("variant", self.variant.clone());
        put("method", self.method.clone());
        put("alpha", self.alpha.map(|v| v.to_string()));
        put("effective_alpha", self.effective_alpha.map(|v| v.to_string()));
        put("lambda", self.lambda.map(|v| v.to_string()));
        put("safe_step", self.safe_step.map(|v| v.to_string()));
        put("laplacian", self.laplacian.clone());
        put("seed", self.seed.map(|v| v.to_string()));
        put("restarts", self.restarts.map(|v| v.to_string()));
        put("iters_requested", self.iters_requested.map(|v| v.to_string()));
        put("tol", self.tol.map(|v| v.to_string()));
        put("stop_reason", self.stop_reason.clone());
        put("iterations", self.iterations.map(|v| v.to_string()));
        put("objective", self.objective.map(|v| v.to_string()));
        put("objectives", self.objectives.as_deref().map(join));
        put("assignment", self.assignment.as_deref().map(join));
        put("cluster_sizes", self.cluster_sizes.as_deref().map(join));
        put("target_dist", self.target_dist.as_deref().map(join));
        put("ari", self.ari.map(|v| v.to_string()));
        put("kl_to_target", self.kl_to_target.map(|v| v.to_string()));
        put("cut", self.cut.map(|v| v.to_string()));
        put("ncut", self.ncut.map(|v| v.to_string()));
        put("rcut", self.rcut.map(|v| v.to_string()));
        put("inertia", self.inertia.map(|v| v.to_string()));
        put("wall_seconds", self.wall_seconds.map(|v| v.to_string()));
        put("per_iter_seconds", self.per_iter_seconds.as_deref().map(join));
        out
    }

    /// Parses a report produced by [`RunReport::to_text`]; tolerant of key
    /// reordering, strict about unknown keys.
    pub fn parse(text: &str) -> Result<Self, ReportError> {
        let mut r = RunReport::default();
        let mut saw_schema = false;
        let mut saw_command = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let Some((key, value)) = raw.split_once(':') else {
                return Err(ReportError::BadLine { line });
            };
            let key = key.trim();
            let value = value.strip_prefix(' ').unwrap_or(value);
            let bad = |message: String| ReportError::BadValue {
                line,
                key: key.to_string(),
                message,
            };
            macro_rules! scalar {
                ($t:ty) => {
                    value.parse::<$t>().map_err(|e| bad(e.to_string()))?
                };
            }
            macro_rules! list {
                ($t:ty) => {
                    value
                        .split_whitespace()
                        .map(|t| t.parse::<$t>().map_err(|e| bad(e.to_string())))
                        .collect::<Result<Vec<$t>, _>>()?
                };
            }
            match key {
                "schema" => {
                    r.schema = scalar!(u64);
                    saw_schema = true;
                }
                "command" => {
                    r.command = value.to_string();
                    saw_command = true;
                }
                "graph" => r.graph = Some(value.to_string()),
                "format" => r.format = Some(value.to_string()),
                "nodes" => r.nodes = Some(scalar!(usize)),
                "edges" => r.edges = Some(scalar!(usize)),
                "k" => r.k = Some(scalar!(usize)),
                "variant" => r.variant = Some(value.to_string()),
                "method" => r.method = Some(value.to_string()),
                "alpha" => r.alpha = Some(scalar!(f64)),
                "effective_alpha" => r.effective_alpha = Some(scalar!(f64)),
                "lambda" => r.lambda = Some(scalar!(f64)),
                "safe_step" => r.safe_step = Some(scalar!(bool)),
                "laplacian" => r.laplacian = Some(value.to_string()),
                "seed" => r.seed = Some(scalar!(u64)),
                "restarts" => r.restarts = Some(scalar!(usize)),
                "iters_requested" => r.iters_requested = Some(scalar!(usize)),
                "tol" => r.tol = Some(scalar!(f64)),
                "stop_reason" => r.stop_reason = Some(value.to_string()),
                "iterations" => r.iterations = Some(scalar!(usize)),
                "objective" => r.objective = Some(scalar!(f64)),
                "objectives" => r.objectives = Some(list!(f64)),
                "assignment" => r.assignment = Some(list!(usize)),
                "cluster_sizes" => r.cluster_sizes = Some(list!(f64)),
                "target_dist" => r.target_dist = Some(list!(f64)),
                "ari" => r.ari = Some(scalar!(f64)),
                "kl_to_target" => r.kl_to_target = Some(scalar!(f64)),
                "cut" => r.cut = Some(scalar!(f64)),
                "ncut" => r.ncut = Some(scalar!(f64)),
                "rcut" => r.rcut = Some(scalar!(f64)),
                "inertia" => r.inertia = Some(scalar!(f64)),
                "wall_seconds" => r.wall_seconds = Some(scalar!(f64)),
                "per_iter_seconds" => r.per_iter_seconds = Some(list!(f64)),
                other => {
                    return Err(ReportError::UnknownKey {
                        line,
                        key: other.to_string(),
                    })
                }
            }
        }
        if !saw_schema {
            return Err(ReportError::Missing("schema"));
        }
        if !saw_command {
            return Err(ReportError::Missing("command"));
        }
        Ok(r)
    }
}

/// Drops the timing lines; what remains must be byte-identical across runs
/// with the same flags and seed.
pub fn strip_timing(text: &str) -> String {
    text.lines()
        .filter(|l| {
            !TIMING_KEYS
                .iter()
                .any(|k| l.starts_with(&format!("{k}:")))
        })
        .map(|l| format!("{l}\n"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunReport {
        RunReport {
            schema: SCHEMA_VERSION,
            command: "partition".into(),
            graph: Some("g.edges".into()),
            format: Some("edgelist".into()),
            nodes: Some(4),
            edges: Some(2),
            k: Some(2),
            variant: Some("rcut".into()),
            alpha: Some(0.5),
            effective_alpha: Some(0.5),
            lambda: Some(1.0),
            safe_step: Some(false),
            laplacian: Some("sym_normalized".into()),
            seed: Some(0),
            restarts: Some(1),
            iters_requested: Some(30),
            tol: Some(0.0),
            stop_reason: Some("max_iter".into()),
            iterations: Some(30),
            objective: Some(-0.25),
            objectives: Some(vec![-0.1, -0.2, -0.25]),
            assignment: Some(vec![0, 0, 1, 1]),
            cluster_sizes: Some(vec![0.5, 0.5]),
            target_dist: Some(vec![0.5, 0.5]),
            kl_to_target: Some(0.0),
            cut: Some(0.0),
            ncut: Some(0.0),
            rcut: Some(0.0),
            wall_seconds: Some(0.0123),
            per_iter_seconds: Some(vec![0.001, 0.002]),
            ..Default::default()
        }
    }

    #[test]
    fn round_trip_is_lossless() {
        let r = sample();
        let parsed = RunReport::parse(&r.to_text()).unwrap();
        assert_eq!(r, parsed);
    }

    #[test]
    fn round_trip_preserves_awkward_floats() {
        let mut r = RunReport::new("metrics");
        r.ari = Some(1.0 / 3.0);
        r.kl_to_target = Some(f64::INFINITY);
        r.objectives = Some(vec![1e-300, -2.2250738585072014e-308, 0.1 + 0.2]);
        let parsed = RunReport::parse(&r.to_text()).unwrap();
        assert_eq!(r, parsed);
    }

    #[test]
    fn empty_lists_round_trip() {
        let mut r = RunReport::new("baseline");
        r.objectives = Some(vec![]);
        let parsed = RunReport::parse(&r.to_text()).unwrap();
        assert_eq!(parsed.objectives, Some(vec![]));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(
            RunReport::parse("schema: 1\ncommand: x\nbogus: 3\n"),
            Err(ReportError::UnknownKey { line: 3, .. })
        ));
    }

    #[test]
    fn timing_lines_stripped() {
        let r = sample();
        let stripped = strip_timing(&r.to_text());
        assert!(!stripped.contains("wall_seconds"));
        assert!(!stripped.contains("per_iter_seconds"));
        assert!(stripped.contains("objective:"));
    }
}
