//! Flat `key = value` experiment configuration.
//!
//! One assignment per line, `#` starts a comment. Values are numbers,
//! `true`/`false`, bare or quoted words, or comma lists (optionally in
//! brackets). `sweep_values` also accepts an inclusive integer range `a..b`.
//! Powers given in dBm are stored as watts.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::{ExperimentPlan, Method, PlanOptions, SweepVar};
use crate::scalar::dbm_to_watts;
use crate::scenario::{Layout, RadioParams};

const KEYS: &[&str] = &[
    "ue_count",
    "uav_count",
    "ris_count",
    "area_w_m",
    "area_h_m",
    "uav_alt_m",
    "ris_alt_m",
    "seed",
    "iterations",
    "carrier_hz",
    "alpha",
    "ue_power_w",
    "uav_power_w",
    "noise_dbm",
    "beta0",
    "m_rows",
    "m_cols",
    "d_b_m",
    "d_c_m",
    "thr_ue_uav_db",
    "thr_uav_uav_db",
    "thr_ris_db",
    "ris_reach_m",
    "epsilon",
    "methods",
    "weighted_base",
    "strict_coverage",
    "sweep",
    "sweep_values",
    "allow_redundant",
    "plain_rounding",
    "recompute_criticality",
    "relax_iters",
    "relax_tol",
    "exhaustive_guard",
    "timing",
    "ris_xy",
];

/// Defaults for keys absent from the document.
pub const DEFAULT_UE_COUNT: usize = 15;
pub const DEFAULT_UAV_COUNT: usize = 10;
pub const DEFAULT_RIS_COUNT: usize = 3;
pub const DEFAULT_ITERATIONS: usize = 50;

struct Entry {
    line: usize,
    raw: String,
}

struct Doc {
    entries: BTreeMap<String, Entry>,
}

fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, ch) in line.char_indices() {
        match ch {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

fn unquote(s: &str) -> &str {
    let s = s.trim();
    s.strip_prefix('"').and_then(|x| x.strip_suffix('"')).unwrap_or(s)
}

impl Doc {
    fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = strip_comment(line).trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::ConfigParse {
                line: line_no,
                message: format!("expected `key = value`, got {line:?}"),
            })?;
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(Error::ConfigParse {
                    line: line_no,
                    message: "empty key".into(),
                });
            }
            let entry = Entry {
                line: line_no,
                raw: value.trim().to_string(),
            };
            if let Some(prev) = entries.insert(key.clone(), entry) {
                return Err(Error::ConfigParse {
                    line: line_no,
                    message: format!("{key} already set on line {}", prev.line),
                });
            }
        }
        let unknown: Vec<&str> = entries.keys().map(String::as_str).filter(|k| !KEYS.contains(k)).collect();
        if !unknown.is_empty() {
            return Err(Error::UnknownKeys(unknown.join(", ")));
        }
        Ok(Self { entries })
    }

    fn err(&self, key: &str, message: String) -> Error {
        Error::ConfigParse {
            line: self.entries[key].line,
            message: format!("{key}: {message}"),
        }
    }

    fn f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.entries.get(key) {
            None => Ok(default),
            Some(e) => {
                let v = unquote(&e.raw);
                v.parse::<f64>()
                    .map_err(|_| self.err(key, format!("expected a number, got {v:?}")))
            }
        }
    }

    fn int(&self, key: &str, default: usize) -> Result<usize> {
        match self.entries.get(key) {
            None => Ok(default),
            Some(e) => {
                let v = unquote(&e.raw);
                let n: i64 = v
                    .parse()
                    .map_err(|_| self.err(key, format!("expected an integer, got {v:?}")))?;
                usize::try_from(n).map_err(|_| Error::ConfigValidation(format!("{key} must be non-negative, got {n}")))
            }
        }
    }

    fn u64(&self, key: &str, default: u64) -> Result<u64> {
        match self.entries.get(key) {
            None => Ok(default),
            Some(e) => {
                let v = unquote(&e.raw);
                v.parse()
                    .map_err(|_| self.err(key, format!("expected a non-negative integer, got {v:?}")))
            }
        }
    }

    fn bool(&self, key: &str) -> Result<bool> {
        match self.entries.get(key) {
            None => Ok(false),
            Some(e) => match unquote(&e.raw) {
                "true" => Ok(true),
                "false" => Ok(false),
                v => Err(self.err(key, format!("expected true or false, got {v:?}"))),
            },
        }
    }

    fn list(&self, key: &str) -> Option<Vec<String>> {
        self.entries.get(key).map(|e| {
            let body = e.raw.trim();
            let body = body
                .strip_prefix('[')
                .and_then(|b| b.strip_suffix(']'))
                .unwrap_or(body);
            body.split(',')
                .map(|s| unquote(s).to_string())
                .filter(|s| !s.is_empty())
                .collect()
        })
    }

    fn numbers(&self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(items) = self.list(key) else {
            return Ok(None);
        };
        if let [single] = items.as_slice() {
            if let Some((a, b)) = single.split_once("..") {
                let parse = |s: &str| {
                    s.trim()
                        .parse::<i64>()
                        .map_err(|_| self.err(key, format!("bad range bound {s:?}")))
                };
                let (a, b) = (parse(a)?, parse(b)?);
                return Ok(Some((a..=b).map(|v| v as f64).collect()));
            }
        }
        items
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| self.err(key, format!("expected a number, got {s:?}"))))
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }
}

/// Parses a configuration document into an experiment plan. Absent keys take
/// the documented defaults; unknown keys are reported together.
pub fn load_config(text: &str) -> Result<ExperimentPlan> {
    let doc = Doc::parse(text)?;
    let d = RadioParams::<f64>::default();

    let params = RadioParams {
        carrier_freq_hz: doc.f64("carrier_hz", d.carrier_freq_hz)?,
        lightspeed_m_s: d.lightspeed_m_s,
        pathloss_exponent: doc.f64("alpha", d.pathloss_exponent)?,
        ue_power_w: doc.f64("ue_power_w", d.ue_power_w)?,
        uav_power_w: doc.f64("uav_power_w", d.uav_power_w)?,
        noise_w: match doc.entries.contains_key("noise_dbm") {
            true => dbm_to_watts(doc.f64("noise_dbm", 0.0)?),
            false => d.noise_w,
        },
        ref_pathloss: doc.f64("beta0", d.ref_pathloss)?,
        ris_rows: doc.int("m_rows", d.ris_rows)?,
        ris_cols: doc.int("m_cols", d.ris_cols)?,
        row_spacing_m: doc.f64("d_b_m", d.row_spacing_m)?,
        col_spacing_m: doc.f64("d_c_m", d.col_spacing_m)?,
        thr_ue_uav_db: doc.f64("thr_ue_uav_db", d.thr_ue_uav_db)?,
        thr_uav_uav_db: doc.f64("thr_uav_uav_db", d.thr_uav_uav_db)?,
        thr_ris_db: doc.f64("thr_ris_db", d.thr_ris_db)?,
        ris_reach_m: match doc.entries.contains_key("ris_reach_m") {
            true => Some(doc.f64("ris_reach_m", 0.0)?),
            false => None,
        },
        epsilon: doc.f64("epsilon", d.epsilon)?,
    };
    params.validate().map_err(|e| Error::ConfigValidation(e.to_string()))?;

    let mut layout = Layout::new(
        (
            doc.int("ue_count", DEFAULT_UE_COUNT)?,
            doc.int("uav_count", DEFAULT_UAV_COUNT)?,
            doc.int("ris_count", DEFAULT_RIS_COUNT)?,
        ),
        (doc.f64("area_w_m", 150.0)?, doc.f64("area_h_m", 150.0)?),
        (doc.f64("uav_alt_m", 50.0)?, doc.f64("ris_alt_m", 20.0)?),
    );
    if layout.ue_count < 1 || layout.uav_count < 1 {
        return Err(Error::ConfigValidation("ue_count and uav_count must be at least 1".into()));
    }
    for (name, v) in [("area_w_m", layout.area_w_m), ("area_h_m", layout.area_h_m)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::ConfigValidation(format!("{name} must be positive, got {v}")));
        }
    }
    if let Some(xy) = doc.numbers("ris_xy")? {
        if xy.len() % 2 != 0 {
            return Err(doc.err("ris_xy", "expected x, y pairs".into()));
        }
        let pairs: Vec<(f64, f64)> = xy.chunks(2).map(|p| (p[0], p[1])).collect();
        if pairs.len() != layout.ris_count {
            return Err(Error::ConfigValidation(format!(
                "ris_xy has {} points but ris_count = {}",
                pairs.len(),
                layout.ris_count
            )));
        }
        layout.ris_xy = Some(pairs);
    }

    let sweep = match doc.entries.get("sweep") {
        None => SweepVar::RisCount,
        Some(e) => unquote(&e.raw).parse().map_err(|m| doc.err("sweep", m))?,
    };
    let values = match doc.numbers("sweep_values")? {
        Some(v) => v,
        None if !doc.entries.contains_key("sweep") => vec![layout.ris_count as f64],
        None => return Err(Error::ConfigValidation("sweep is set but sweep_values is missing".into())),
    };
    let methods = match doc.list("methods") {
        None => Method::ALL.to_vec(),
        Some(items) => items
            .iter()
            .map(|s| s.parse::<Method>().map_err(|m| doc.err("methods", m)))
            .collect::<Result<Vec<_>>>()?,
    };

    let defaults = PlanOptions::default();
    let options = PlanOptions {
        weighted_base: doc.bool("weighted_base")?,
        strict_coverage: doc.bool("strict_coverage")?,
        allow_redundant: doc.bool("allow_redundant")?,
        plain_rounding: doc.bool("plain_rounding")?,
        recompute_criticality: doc.bool("recompute_criticality")?,
        relax_iters: doc.int("relax_iters", defaults.relax_iters)?,
        relax_tol: doc.f64("relax_tol", defaults.relax_tol)?,
        exhaustive_guard: doc.u64("exhaustive_guard", defaults.exhaustive_guard as u64)? as u128,
        timing: doc.bool("timing")?,
    };

    let plan = ExperimentPlan {
        sweep,
        values,
        iterations: doc.int("iterations", DEFAULT_ITERATIONS)?,
        methods,
        base_seed: doc.u64("seed", 1)?,
        layout,
        params,
        options,
    };
    plan.validate()?;
    Ok(plan)
}

pub fn load_config_file(path: &Path) -> Result<ExperimentPlan> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_in_dbm() {
        let plan = load_config("noise_dbm = -130").unwrap();
        assert!((plan.params.noise_w - 1e-16).abs() < 1e-28);
    }

    #[test]
    fn empty_document_defaults() {
        let plan = load_config("").unwrap();
        let p = &plan.params;
        assert_eq!(p.elements(), 100);
        assert_eq!(p.pathloss_exponent, 4.0);
        assert_eq!(p.ue_power_w, 1.0);
        assert_eq!(p.uav_power_w, 5.0);
        assert_eq!(p.ref_pathloss, 1e-6);
        assert_eq!(p.thr_ue_uav_db, 85.0);
        assert_eq!(p.thr_uav_uav_db, 80.0);
        assert_eq!(p.thr_ris_db, 30.0);
        assert_eq!(p.epsilon, 1e-5);
        assert_eq!(p.ris_reach_m, None);
        assert_eq!(plan.layout.ue_count, 15);
        assert_eq!(plan.layout.uav_count, 10);
        assert_eq!((plan.layout.area_w_m, plan.layout.area_h_m), (150.0, 150.0));
        assert_eq!((plan.layout.uav_alt_m, plan.layout.ris_alt_m), (50.0, 20.0));
        assert_eq!(plan.sweep, SweepVar::RisCount);
        assert_eq!(plan.values, vec![3.0]);
        assert_eq!(plan.methods, Method::ALL.to_vec());
    }

    #[test]
    fn negative_count_rejected() {
        assert!(matches!(load_config("ue_count = -3"), Err(Error::ConfigValidation(_))));
        assert!(matches!(load_config("ue_count = 0"), Err(Error::ConfigValidation(_))));
    }

    #[test]
    fn unknown_keys_listed() {
        let err = load_config("foo = 1\nue_count = 3\nbar = 2").unwrap_err();
        match err {
            Error::UnknownKeys(k) => assert_eq!(k, "bar, foo"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn parse_errors_carry_line() {
        let err = load_config("# header\n\nalpha = four").unwrap_err();
        assert!(matches!(err, Error::ConfigParse { line: 3, .. }), "{err}");
        let err = load_config("just words").unwrap_err();
        assert!(matches!(err, Error::ConfigParse { line: 1, .. }));
        let err = load_config("seed = 1\nseed = 2").unwrap_err();
        assert!(matches!(err, Error::ConfigParse { line: 2, .. }));
    }

    #[test]
    fn lists_ranges_and_comments() {
        let text = r#"
            sweep = "ris_count"   # number of surfaces
            sweep_values = 1..4
            methods = [original, "greedy"]
            strict_coverage = true
        "#;
        let plan = load_config(text).unwrap();
        assert_eq!(plan.values, vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(plan.methods, vec![Method::Original, Method::Greedy]);
        assert!(plan.options.strict_coverage);

        let plan = load_config("sweep = thr_ris_db\nsweep_values = 0, 5.5, 10").unwrap();
        assert_eq!(plan.values, vec![0.0, 5.5, 10.0]);
    }

    #[test]
    fn ris_coordinates() {
        let plan = load_config("ris_count = 2\nris_xy = [10, 20, 30, 40]").unwrap();
        assert_eq!(plan.layout.ris_xy, Some(vec![(10.0, 20.0), (30.0, 40.0)]));
        assert!(load_config("ris_count = 3\nris_xy = 10, 20").is_err());
        assert!(load_config("ris_count = 1\nris_xy = 10").is_err());
    }

    #[test]
    fn sweep_without_values() {
        assert!(matches!(load_config("sweep = U"), Err(Error::ConfigValidation(_))));
        assert!(load_config("sweep = U\nsweep_values = 3, 2").is_err());
    }

    #[test]
    fn bad_bool() {
        assert!(matches!(load_config("timing = yes"), Err(Error::ConfigParse { .. })));
    }
}
