//! On-disk formats: JSON instance files and analysis reports. Rationals are
//! written as `"p/q"` strings (`"inf"` for +inf) so values survive
//! serialization exactly; decimal renderings in reports are advisory.

use crate::cost::{CostTable, GameInstance, PerturbRecord};
use crate::engine::{AnalysisReport, StrategyProfile};
use crate::graph::{Graph, Path, VertexId};
use crate::rat::Rat;
use crate::sp::SpDesc;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path as FsPath;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("bad instance: {0}")]
    BadInstance(String),
    #[error("bad sp tree encoding: {0}")]
    BadSpTree(String),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct EdgeRecord {
    pub id: usize,
    pub tail: VertexId,
    pub head: VertexId,
    pub cost: Vec<String>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
pub struct PlayerRecord {
    pub source: VertexId,
    pub sink: VertexId,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ProtocolSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PerturbationRecordFile {
    pub r: u32,
    pub k: String,
    pub w: u32,
    pub eps1: String,
    pub original: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct InstanceFile {
    pub version: u32,
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeRecord>,
    pub players: Vec<PlayerRecord>,
    pub n_max: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sp_tree: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<ProtocolSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<PerturbationRecordFile>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

pub fn sp_to_json(desc: &SpDesc) -> Value {
    match desc {
        SpDesc::Edge(e) => json!({ "edge": e }),
        SpDesc::Series(a, b) => json!(["S", sp_to_json(a), sp_to_json(b)]),
        SpDesc::Parallel(a, b) => json!(["P", sp_to_json(a), sp_to_json(b)]),
    }
}

pub fn sp_from_json(v: &Value) -> Result<SpDesc, FileError> {
    match v {
        Value::Object(m) => {
            let e = m
                .get("edge")
                .and_then(Value::as_u64)
                .ok_or_else(|| FileError::BadSpTree(format!("leaf {}", v)))?;
            Ok(SpDesc::Edge(e as usize))
        }
        Value::Array(items) if items.len() == 3 => {
            let tag = items[0]
                .as_str()
                .ok_or_else(|| FileError::BadSpTree(format!("tag {}", items[0])))?;
            let a = sp_from_json(&items[1])?;
            let b = sp_from_json(&items[2])?;
            match tag {
                "S" => Ok(SpDesc::series(a, b)),
                "P" => Ok(SpDesc::parallel(a, b)),
                other => Err(FileError::BadSpTree(format!("tag {:?}", other))),
            }
        }
        other => Err(FileError::BadSpTree(other.to_string())),
    }
}

fn table_to_strings(t: &CostTable) -> Vec<String> {
    t.values().iter().map(Rat::to_string).collect()
}

fn table_from_strings(values: &[String]) -> Result<CostTable, FileError> {
    let parsed: Result<Vec<Rat>, _> = values.iter().map(|s| s.parse()).collect();
    let parsed = parsed.map_err(|e| FileError::BadInstance(format!("{}", e)))?;
    CostTable::new(parsed).map_err(|e| FileError::BadInstance(e.to_string()))
}

pub fn instance_to_file(
    instance: &GameInstance,
    sp_tree: Option<&SpDesc>,
    protocol: Option<ProtocolSpec>,
) -> InstanceFile {
    InstanceFile {
        version: FORMAT_VERSION,
        vertices: instance.graph.vertices().to_vec(),
        edges: instance
            .graph
            .edges()
            .iter()
            .map(|e| EdgeRecord {
                id: e.id,
                tail: e.tail,
                head: e.head,
                cost: table_to_strings(instance.cost(e.id)),
            })
            .collect(),
        players: instance
            .players
            .iter()
            .map(|&(source, sink)| PlayerRecord { source, sink })
            .collect(),
        n_max: instance.n_max,
        sp_tree: sp_tree.map(sp_to_json),
        protocol,
        perturbation: instance.perturbation.as_ref().map(|p| PerturbationRecordFile {
            r: p.r,
            k: p.k.to_string(),
            w: p.w,
            eps1: p.eps1.to_string(),
            original: p.original.iter().map(table_to_strings).collect(),
        }),
        metadata: instance.metadata.clone(),
    }
}

pub fn instance_from_file(
    file: &InstanceFile,
) -> Result<(GameInstance, Option<SpDesc>), FileError> {
    if file.version != FORMAT_VERSION {
        return Err(FileError::Version(file.version));
    }
    let edges = file
        .edges
        .iter()
        .map(|e| (e.id, e.tail, e.head))
        .collect();
    let graph = Graph::new(file.vertices.clone(), edges)
        .map_err(|e| FileError::BadInstance(e.to_string()))?;
    let costs: Result<Vec<CostTable>, FileError> = file
        .edges
        .iter()
        .map(|e| table_from_strings(&e.cost))
        .collect();
    let players = file.players.iter().map(|p| (p.source, p.sink)).collect();
    let mut instance = GameInstance::new(graph, costs?, players, file.n_max)
        .map_err(|e| FileError::BadInstance(e.to_string()))?;
    if let Some(p) = &file.perturbation {
        let original: Result<Vec<CostTable>, FileError> =
            p.original.iter().map(|t| table_from_strings(t)).collect();
        let k: BigInt = p
            .k
            .parse()
            .map_err(|_| FileError::BadInstance(format!("bad perturbation k {:?}", p.k)))?;
        let eps1: Rat = p
            .eps1
            .parse()
            .map_err(|_| FileError::BadInstance(format!("bad eps1 {:?}", p.eps1)))?;
        instance.perturbation = Some(PerturbRecord {
            r: p.r,
            k,
            w: p.w,
            original: original?,
            eps1,
        });
    }
    instance.metadata = file.metadata.clone();
    let sp = match &file.sp_tree {
        Some(v) => Some(sp_from_json(v)?),
        None => None,
    };
    Ok((instance, sp))
}

pub fn write_instance(path: &FsPath, file: &InstanceFile) -> Result<(), FileError> {
    let text = serde_json::to_string_pretty(file)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn read_instance(path: &FsPath) -> Result<InstanceFile, FileError> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Hex sha-256 of the canonical (compact, sorted-map) serialization.
pub fn instance_digest(file: &InstanceFile) -> String {
    let canonical = serde_json::to_string(file).expect("instance serializes");
    let mut h = Sha256::new();
    h.update(canonical.as_bytes());
    format!("{:x}", h.finalize())
}

fn profile_to_json(profile: &StrategyProfile) -> Value {
    Value::Array(
        profile
            .paths()
            .iter()
            .map(|p| json!(p.edges()))
            .collect(),
    )
}

fn opt_rat_string(r: &Option<Rat>) -> Value {
    match r {
        Some(x) => Value::String(x.to_string()),
        None => Value::Null,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReportFile {
    pub instance_digest: String,
    pub protocol: String,
    pub pne: Vec<Value>,
    pub costs: ReportCosts,
    pub opt_profile: Value,
    pub poa: Option<PoaRecord>,
    pub eps_accounting: EpsAccounting,
    pub no_equilibrium: bool,
    pub tie_detector_hits: usize,
    pub runtime: RuntimeStats,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReportCosts {
    pub worst_eq: Value,
    pub best_eq: Value,
    pub opt: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PoaRecord {
    pub exact: String,
    pub decimal: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EpsAccounting {
    pub eps1: Value,
    pub eps2: Value,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RuntimeStats {
    pub millis: u64,
    pub profiles_checked: usize,
}

pub fn report_to_file(
    report: &AnalysisReport,
    digest: String,
    runtime: RuntimeStats,
) -> ReportFile {
    ReportFile {
        instance_digest: digest,
        protocol: report.protocol.clone(),
        pne: report.pne.iter().map(profile_to_json).collect(),
        costs: ReportCosts {
            worst_eq: opt_rat_string(&report.worst_eq_cost),
            best_eq: opt_rat_string(&report.best_eq_cost),
            opt: report.opt_cost.to_string(),
        },
        opt_profile: profile_to_json(&report.opt_profile),
        poa: report.poa.as_ref().map(|p| PoaRecord {
            exact: p.to_string(),
            decimal: p.to_decimal_string(12),
        }),
        eps_accounting: EpsAccounting {
            eps1: opt_rat_string(&report.eps1),
            eps2: opt_rat_string(&report.eps2),
        },
        no_equilibrium: report.no_equilibrium,
        tie_detector_hits: report.tie_detector_hits,
        runtime,
    }
}

pub fn write_report(path: &FsPath, file: &ReportFile) -> Result<(), FileError> {
    let text = serde_json::to_string_pretty(file)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

/// Rebuild the profiles in a report against an instance, e.g. to re-verify a
/// saved analysis.
pub fn profiles_from_json(
    values: &[Value],
    instance: &GameInstance,
) -> Result<Vec<StrategyProfile>, FileError> {
    values
        .iter()
        .map(|v| {
            let arrays = v
                .as_array()
                .ok_or_else(|| FileError::BadInstance(format!("profile {}", v)))?;
            let paths: Result<Vec<Path>, FileError> = arrays
                .iter()
                .map(|ids| {
                    let ids: Vec<usize> = ids
                        .as_array()
                        .ok_or_else(|| FileError::BadInstance(format!("path {}", ids)))?
                        .iter()
                        .map(|x| x.as_u64().map(|u| u as usize))
                        .collect::<Option<_>>()
                        .ok_or_else(|| FileError::BadInstance("non-integer edge id".into()))?;
                    Path::from_edges(ids, &instance.graph)
                        .map_err(|e| FileError::BadInstance(e.to_string()))
                })
                .collect();
            StrategyProfile::new(instance, paths?)
                .map_err(|e| FileError::BadInstance(e.to_string()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::perturb_for_ties;
    use crate::engine::poa_report;
    use crate::gen::{gen_multicast_const_lb, random_spg_instance, Shape};
    use crate::protocol::Protocol;

    #[test]
    fn sp_tree_json_shape() {
        let desc = SpDesc::parallel(
            SpDesc::series(SpDesc::Edge(0), SpDesc::Edge(1)),
            SpDesc::Edge(2),
        );
        let v = sp_to_json(&desc);
        assert_eq!(
            v,
            json!(["P", ["S", {"edge": 0}, {"edge": 1}], {"edge": 2}])
        );
        assert_eq!(sp_from_json(&v).unwrap(), desc);
    }

    #[test]
    fn instance_roundtrip_exact() {
        let (inst, desc) = random_spg_instance(7, 8, 3, Shape::Concave, 6);
        let file = instance_to_file(&inst, Some(&desc), None);
        let text = serde_json::to_string(&file).unwrap();
        let parsed: InstanceFile = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed, file);
        let (back, sp) = instance_from_file(&parsed).unwrap();
        assert_eq!(back, inst);
        assert_eq!(sp, Some(desc));
        // serialize again: bit-identical
        let again = instance_to_file(&back, sp.as_ref(), None);
        assert_eq!(serde_json::to_string(&again).unwrap(), text);
    }

    #[test]
    fn perturbed_instance_roundtrips() {
        let inst = gen_multicast_const_lb(2, Rat::one()).unwrap();
        let pert = perturb_for_ties(&inst, 3).unwrap();
        let file = instance_to_file(&pert, None, None);
        let (back, _) = instance_from_file(&file).unwrap();
        assert_eq!(back, pert);
        assert_eq!(back.original_costs(), inst.costs());
    }

    #[test]
    fn digest_stable_and_sensitive() {
        let a = gen_multicast_const_lb(3, Rat::one()).unwrap();
        let fa = instance_to_file(&a, None, None);
        assert_eq!(instance_digest(&fa), instance_digest(&fa));
        let b = gen_multicast_const_lb(3, Rat::int(2)).unwrap();
        let fb = instance_to_file(&b, None, None);
        assert_ne!(instance_digest(&fa), instance_digest(&fb));
    }

    #[test]
    fn report_serialization() {
        let inst = gen_multicast_const_lb(3, Rat::one()).unwrap();
        let report = poa_report(&inst, &Protocol::EqualSplit, 100_000, 1000).unwrap();
        let digest = instance_digest(&instance_to_file(&inst, None, None));
        let file = report_to_file(
            &report,
            digest,
            RuntimeStats {
                millis: 1,
                profiles_checked: 0,
            },
        );
        let text = serde_json::to_string(&file).unwrap();
        let parsed: ReportFile = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed, file);
        assert_eq!(file.costs.opt, "1");
        let poa = file.poa.unwrap();
        assert_eq!(poa.exact, "3");
        assert_eq!(poa.decimal, "3.000000000000");
        let profiles = profiles_from_json(&file.pne, &inst).unwrap();
        assert_eq!(profiles.len(), report.pne.len());
    }
}
