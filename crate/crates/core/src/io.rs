//! Scene files and machine-readable reports.
//!
//! Scene files are JSON with `schema_version: "1"`. Unknown fields are
//! rejected. Rationals in reports are `"p/q"` strings in lowest terms, and
//! every map is emitted with sorted keys so reports are byte-stable.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::git::{MValue, MuValue, Status};
use crate::hilb::{HilbError, HilbPoint, ScenarioSpec, SupportPoint};
use crate::rat::{fmt_rat, Rat};
use crate::scene::{Character, Linearization, Scene, SceneError, WeightedPoint};
use crate::strata::FixedComponent;
use crate::vgit::{ChamberReport, Locus};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema_version: expected \"{SCHEMA_VERSION}\", found {0:?}")]
    Schema(String),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error("hilb[{index}].{source}")]
    Hilb { index: usize, source: HilbError },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub schema_version: String,
    pub rank: usize,
    pub base_weights: Vec<Character>,
    pub linearizations: Vec<LinearizationRecord>,
    pub points: Vec<PointRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<ComponentRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hilb: Vec<HilbRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearizationRecord {
    pub name: String,
    pub hm_sanctioned: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointRecord {
    pub name: String,
    pub stratum: Vec<usize>,
    pub weights: BTreeMap<String, Vec<Character>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentRecord {
    pub id: String,
    pub stratum: Vec<usize>,
    pub c: BTreeMap<String, Character>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HilbRecord {
    pub name: String,
    pub d: u64,
    pub scenarios: Vec<ScenarioRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioRecord {
    pub cone_h: Vec<Character>,
    pub tau: Character,
    pub support: Vec<SupportRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportRecord {
    pub id: String,
    pub n_p: u64,
    pub c: Character,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedScene {
    pub scene: Scene,
    pub hilb: Vec<HilbPoint>,
}

impl LoadedScene {
    pub fn hilb_point(&self, name: &str) -> Option<&HilbPoint> {
        self.hilb.iter().find(|h| h.name() == name)
    }
}

pub fn load_scene(path: impl AsRef<Path>) -> Result<LoadedScene, IoError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_scene(&text)
}

pub fn parse_scene(text: &str) -> Result<LoadedScene, IoError> {
    let file: SceneFile = serde_json::from_str(text).map_err(|e| IoError::Parse {
        line: e.line(),
        column: e.column(),
        message: strip_position(&e.to_string()),
    })?;
    from_file(file)
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

pub fn from_file(file: SceneFile) -> Result<LoadedScene, IoError> {
    if file.schema_version != SCHEMA_VERSION {
        return Err(IoError::Schema(file.schema_version));
    }
    let linearizations = file
        .linearizations
        .into_iter()
        .map(|l| Linearization {
            name: l.name,
            hm_sanctioned: l.hm_sanctioned,
        })
        .collect();
    let points = file
        .points
        .into_iter()
        .map(|p| {
            let mut wp = WeightedPoint::new(p.name, p.stratum).with_components(p.components);
            wp.weights = p.weights;
            wp
        })
        .collect();
    let components = file
        .components
        .into_iter()
        .map(|c| FixedComponent {
            id: c.id,
            stratum: c.stratum,
            c: c.c,
        })
        .collect();
    let scene = Scene::new(
        file.rank,
        file.base_weights,
        linearizations,
        points,
        components,
    )?;
    let mut hilb = Vec::with_capacity(file.hilb.len());
    for (index, h) in file.hilb.into_iter().enumerate() {
        if hilb.iter().any(|z: &HilbPoint| z.name() == h.name) {
            return Err(IoError::Hilb {
                index,
                source: HilbError::Invalid {
                    path: "name".into(),
                    message: "duplicate".into(),
                },
            });
        }
        let specs = h
            .scenarios
            .into_iter()
            .map(|s| ScenarioSpec {
                cone_h: s.cone_h,
                tau: s.tau,
                support: s
                    .support
                    .into_iter()
                    .map(|p| SupportPoint {
                        id: p.id,
                        multiplicity: p.n_p,
                        c: p.c,
                    })
                    .collect(),
            })
            .collect();
        let z = HilbPoint::new(h.name, h.d, file.rank, specs)
            .map_err(|source| IoError::Hilb { index, source })?;
        hilb.push(z);
    }
    Ok(LoadedScene { scene, hilb })
}

pub fn to_file(loaded: &LoadedScene) -> SceneFile {
    let s = &loaded.scene;
    SceneFile {
        schema_version: SCHEMA_VERSION.to_string(),
        rank: s.rank(),
        base_weights: s.base_weights().to_vec(),
        linearizations: s
            .linearizations()
            .iter()
            .map(|l| LinearizationRecord {
                name: l.name.clone(),
                hm_sanctioned: l.hm_sanctioned,
            })
            .collect(),
        points: s
            .points()
            .iter()
            .map(|p| PointRecord {
                name: p.name.clone(),
                stratum: p.stratum.clone(),
                weights: p.weights.clone(),
                components: p.components.clone(),
            })
            .collect(),
        components: s
            .components()
            .iter()
            .map(|c| ComponentRecord {
                id: c.id.clone(),
                stratum: c.stratum.clone(),
                c: c.c.clone(),
            })
            .collect(),
        hilb: loaded
            .hilb
            .iter()
            .map(|z| HilbRecord {
                name: z.name().to_string(),
                d: z.d(),
                scenarios: z
                    .scenarios()
                    .iter()
                    .map(|sc| ScenarioRecord {
                        cone_h: sc.cone_h().to_vec(),
                        tau: sc.tau().to_vec(),
                        support: sc
                            .support()
                            .iter()
                            .map(|p| SupportRecord {
                                id: p.id.clone(),
                                n_p: p.multiplicity,
                                c: p.c.clone(),
                            })
                            .collect(),
                    })
                    .collect(),
            })
            .collect(),
    }
}

pub fn scene_to_json(loaded: &LoadedScene) -> String {
    let mut s = serde_json::to_string_pretty(&to_file(loaded)).expect("plain data serializes");
    s.push('\n');
    s
}

/// `sha256:<hex>` of the raw input bytes.
pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

pub fn rat_json(r: &Rat) -> Value {
    Value::String(fmt_rat(r))
}

pub fn rats_json(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(rat_json).collect())
}

pub fn mu_json(m: &MuValue) -> Value {
    Value::String(m.render())
}

pub fn m_json(m: &MValue) -> Value {
    match m {
        MValue::PlusInfinity => json!({ "value": "+inf" }),
        MValue::Finite {
            value,
            mu_star,
            norm_sq,
            minimizer,
        } => json!({
            "value": value,
            "certificate": { "mu": fmt_rat(mu_star), "norm_sq": fmt_rat(norm_sq) },
            "minimizer": rats_json(minimizer),
            "sign_status": m.sign_status().as_str(),
        }),
    }
}

pub fn statuses_json(s: &BTreeMap<String, Status>) -> Value {
    Value::Object(
        s.iter()
            .map(|(k, v)| (k.clone(), Value::String(v.as_str().to_string())))
            .collect(),
    )
}

pub fn locus_json(l: &Locus) -> Value {
    json!({ "semistable": l.semistable, "stable": l.stable })
}

pub fn chamber_report_json(r: &ChamberReport) -> Value {
    json!({
        "from": r.from,
        "to": r.to,
        "walls": rats_json(&r.walls),
        "spurious_candidates": rats_json(&r.spurious_candidates),
        "chambers": r.chambers.iter().map(|c| json!({
            "lower": rat_json(&c.lower),
            "upper": rat_json(&c.upper),
            "sample": rat_json(&c.sample),
            "statuses": statuses_json(&c.statuses),
            "locus": locus_json(&c.locus),
        })).collect::<Vec<_>>(),
        "on_walls": r.on_walls.iter().map(|w| json!({
            "t": rat_json(&w.t),
            "statuses": statuses_json(&w.statuses),
            "locus": locus_json(&w.locus),
        })).collect::<Vec<_>>(),
        "start": { "statuses": statuses_json(&r.start.statuses), "locus": locus_json(&r.start.locus) },
        "end": { "statuses": statuses_json(&r.end.statuses), "locus": locus_json(&r.end.locus) },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub args: BTreeMap<String, String>,
    pub input_digest: String,
    pub results: Value,
}

impl Report {
    pub fn to_json(&self) -> String {
        let v = json!({
            "command": self.command,
            "args": self.args,
            "input_digest": self.input_digest,
            "results": self.results,
        });
        let mut s = serde_json::to_string_pretty(&v).expect("json values serialize");
        s.push('\n');
        s
    }

    /// One `path,value` row per leaf of `results`, in sorted key order.
    pub fn to_csv(&self) -> String {
        let mut rows = vec![
            "path,value".to_string(),
            format!("command,{}", csv_field(&self.command)),
            format!("input_digest,{}", csv_field(&self.input_digest)),
        ];
        for (k, v) in &self.args {
            rows.push(format!(
                "{},{}",
                csv_field(&format!("args.{k}")),
                csv_field(v)
            ));
        }
        flatten("results", &self.results, &mut rows);
        let mut s = rows.join("\n");
        s.push('\n');
        s
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<String>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&format!("{prefix}.{k}"), x, rows);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, rows);
            }
        }
        Value::String(s) => rows.push(format!("{},{}", csv_field(prefix), csv_field(s))),
        other => rows.push(format!(
            "{},{}",
            csv_field(prefix),
            csv_field(&other.to_string())
        )),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
