//! Serializable run reports with deterministic JSON and TSV renderers.
//!
//! A [`Report`] echoes the run configuration, the splitting-field data, a
//! command-specific payload and the outcomes of any verification checks.
//! Given the same configuration and seed, rendering is byte-identical run
//! over run: maps serialize in sorted key order and no wall-clock data is
//! embedded (callers report timing on stderr instead).

use serde::Serialize;
use serde_json::Value;

use crate::verify::Check;

/// Outcome of one verification check, in serializable form.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl From<&Check> for CheckResult {
    fn from(c: &Check) -> CheckResult {
        CheckResult { name: c.name.clone(), pass: c.pass, detail: c.detail.clone() }
    }
}

/// Echo of the effective run configuration.
#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub group: String,
    pub p: u32,
    pub max_order: usize,
    pub max_dim: usize,
    pub seed: u64,
    pub format: String,
    pub literal_sum: bool,
}

/// Parameters of the splitting field and the cyclotomic coefficient field.
#[derive(Clone, Debug, Serialize)]
pub struct FieldInfo {
    /// Characteristic.
    pub p: u32,
    /// Multiplicative order baked into the splitting field (the coprime
    /// part of the group exponent); also the cyclotomic conductor.
    pub m: u32,
    /// Size of the splitting field.
    pub q: u32,
    /// Degree of the cyclotomic value field over the rationals.
    pub cyclotomic_degree: usize,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: ConfigEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldInfo>,
    pub payload: Value,
    pub checks: Vec<CheckResult>,
}

impl Report {
    /// Exit status for a finished run: 0 when every check passed, 2 when
    /// any failed.  (Operational errors exit 1 before a report exists.)
    pub fn exit_code(&self) -> i32 {
        if self.checks.iter().any(|c| !c.pass) {
            2
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Tab-separated rendering: dotted scalar rows, one `[section]` table
    /// per array of objects, and everything else as compact JSON.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command\t{}\n", self.command));
        render_tsv("config", &serde_json::to_value(&self.config).expect("config"), &mut out);
        if let Some(f) = &self.field {
            render_tsv("field", &serde_json::to_value(f).expect("field"), &mut out);
        }
        render_tsv("payload", &self.payload, &mut out);
        out.push_str("[checks]\nname\tpass\tdetail\n");
        for c in &self.checks {
            out.push_str(&format!("{}\t{}\t{}\n", c.name, c.pass, c.detail));
        }
        out
    }
}

fn scalar_str(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("null".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn cell_str(v: &Value) -> String {
    scalar_str(v).unwrap_or_else(|| serde_json::to_string(v).expect("cell"))
}

fn render_tsv(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                render_tsv(&format!("{prefix}.{k}"), val, out);
            }
        }
        Value::Array(items)
            if !items.is_empty() && items.iter().all(|i| matches!(i, Value::Object(_))) =>
        {
            let Value::Object(first) = &items[0] else { unreachable!() };
            let headers: Vec<&String> = first.keys().collect();
            out.push_str(&format!("[{prefix}]\n"));
            out.push_str(
                &headers.iter().map(|h| h.as_str()).collect::<Vec<_>>().join("\t"),
            );
            out.push('\n');
            for item in items {
                let Value::Object(m) = item else { unreachable!() };
                let row: Vec<String> = headers
                    .iter()
                    .map(|h| m.get(*h).map(cell_str).unwrap_or_default())
                    .collect();
                out.push_str(&row.join("\t"));
                out.push('\n');
            }
        }
        other => {
            out.push_str(&format!("{prefix}\t{}\n", cell_str(other)));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample(pass: bool) -> Report {
        Report {
            command: "classify".into(),
            config: ConfigEcho {
                group: "C2".into(),
                p: 2,
                max_order: 512,
                max_dim: 600,
                seed: 1,
                format: "json".into(),
                literal_sum: false,
            },
            field: Some(FieldInfo { p: 2, m: 1, q: 2, cyclotomic_degree: 1 }),
            payload: json!({
                "counts": {"pp": 2, "q": 2},
                "pp_classes": [
                    {"dim": 2, "label": "(1, P1)"},
                    {"dim": 1, "label": "(C2, P1)"},
                ],
            }),
            checks: vec![CheckResult {
                name: "section_retraction_identity".into(),
                pass,
                detail: "ok".into(),
            }],
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(sample(true).exit_code(), 0);
        assert_eq!(sample(false).exit_code(), 2);
    }

    #[test]
    fn json_is_deterministic_and_complete() {
        let a = sample(true).to_json();
        let b = sample(true).to_json();
        assert_eq!(a, b);
        assert!(a.ends_with('\n'));
        let v: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["command"], "classify");
        assert_eq!(v["config"]["p"], 2);
        assert_eq!(v["field"]["q"], 2);
        assert_eq!(v["payload"]["counts"]["pp"], 2);
        assert_eq!(v["checks"][0]["pass"], true);
    }

    #[test]
    fn tsv_layout() {
        let t = sample(true).to_tsv();
        assert!(t.starts_with("command\tclassify\n"));
        assert!(t.contains("config.group\tC2\n"));
        assert!(t.contains("field.q\t2\n"));
        assert!(t.contains("payload.counts.pp\t2\n"));
        assert!(t.contains("[payload.pp_classes]\ndim\tlabel\n2\t(1, P1)\n"));
        assert!(t.contains("[checks]\nname\tpass\tdetail\n"));
        assert_eq!(t, sample(true).to_tsv());
    }

    #[test]
    fn field_info_is_optional() {
        let mut r = sample(true);
        r.field = None;
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert!(v.get("field").is_none());
        assert!(!r.to_tsv().contains("field."));
    }
}
