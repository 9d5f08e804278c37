//! The item bank: code snippets paired with their flow graphs and test-case
//! counts, with JSON persistence.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::flowgraph::{
    build_cfg, coverage_counts_with, AnalysisConfig, CoverageCounts, FlowError, FlowGraph, TestingMethod,
};
use crate::minilang::{canonical_text, parse_with_id, Program, SyntaxError};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum BankError {
    #[error("item id '{0}' is already in the bank")]
    DuplicateId(String),
    #[error("item '{id}' has the same program as existing item '{existing}'")]
    DuplicateProgram { id: String, existing: String },
    #[error("item '{id}': {source}")]
    Syntax { id: String, source: SyntaxError },
    #[error("item '{id}': {source}")]
    Analysis { id: String, source: FlowError },
    #[error("no item with id '{0}'")]
    UnknownItem(String),
    #[error("bank file does not match schema version {SCHEMA_VERSION}: {0}")]
    SchemaMismatch(String),
    #[error("item '{id}': stored counts {stored:?} disagree with recomputed {computed:?} (path, branch, statement)")]
    VerificationFailure {
        id: String,
        stored: (u64, u64, u64),
        computed: (u64, u64, u64),
    },
    #[error("item '{id}': embedded flow graph differs from the one derived from its code")]
    GraphMismatch { id: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Test-case counts keyed by method, as stored in the bank file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodCounts {
    pub path: u64,
    pub branch: u64,
    pub statement: u64,
}

impl MethodCounts {
    pub fn get(&self, method: TestingMethod) -> u64 {
        match method {
            TestingMethod::PathCoverage => self.path,
            TestingMethod::BranchCoverage => self.branch,
            TestingMethod::StatementCoverage => self.statement,
        }
    }

    pub fn triple(&self) -> (u64, u64, u64) {
        (self.path, self.branch, self.statement)
    }
}

impl From<CoverageCounts> for MethodCounts {
    fn from(c: CoverageCounts) -> Self {
        MethodCounts {
            path: c.path,
            branch: c.branch,
            statement: c.statement,
        }
    }
}

/// One code snippet, its flow graph, and its counts.
#[derive(Debug, Clone)]
pub struct BankItem {
    pub item_id: String,
    pub program: Program,
    pub graph: FlowGraph,
    pub counts: MethodCounts,
    pub loop_bound: u32,
    /// Counts were set by hand and are not checked against the analysis.
    pub counts_overridden: bool,
    /// Some cover search ran out of budget; counts are upper bounds.
    pub approximate: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BankMetadata {
    /// Seconds since the Unix epoch.
    pub created: u64,
    pub tool_version: String,
    pub loop_bound: u32,
}

#[derive(Debug, Clone)]
pub struct Bank {
    items: Vec<BankItem>,
    pub metadata: BankMetadata,
}

/// Items sharing one count value under one method.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceGroup {
    pub method: TestingMethod,
    pub count_value: u64,
    pub member_ids: BTreeSet<String>,
}

impl EquivalenceGroup {
    pub fn size(&self) -> usize {
        self.member_ids.len()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Trust the stored counts instead of recomputing them.
    pub no_verify: bool,
    pub path_cap: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SaveOptions {
    pub embed_graphs: bool,
}

impl Bank {
    pub fn new(loop_bound: u32) -> Self {
        let created = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Bank {
            items: Vec::new(),
            metadata: BankMetadata {
                created,
                tool_version: TOOL_VERSION.to_string(),
                loop_bound,
            },
        }
    }

    pub fn items(&self) -> &[BankItem] {
        &self.items
    }

    /// N, the number of items.
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn loop_bound(&self) -> u32 {
        self.metadata.loop_bound
    }

    pub fn get(&self, item_id: &str) -> Option<&BankItem> {
        self.items.iter().find(|i| i.item_id == item_id)
    }

    pub fn analysis_config(&self) -> AnalysisConfig {
        AnalysisConfig::with_loop_bound(self.metadata.loop_bound)
    }

    /// Returns a new bank with the snippet added under `item_id`.
    pub fn ingest(&self, source: &str, item_id: &str) -> Result<Bank, BankError> {
        self.ingest_with(source, item_id, &self.analysis_config())
    }

    pub fn ingest_with(&self, source: &str, item_id: &str, cfg: &AnalysisConfig) -> Result<Bank, BankError> {
        if self.get(item_id).is_some() {
            return Err(BankError::DuplicateId(item_id.to_string()));
        }
        let cfg = AnalysisConfig {
            loop_bound: self.metadata.loop_bound,
            ..*cfg
        };
        let item = analyze_item(source, item_id, &cfg)?;
        let text = canonical_text(&item.program);
        if let Some(existing) = self.items.iter().find(|i| canonical_text(&i.program) == text) {
            return Err(BankError::DuplicateProgram {
                id: item_id.to_string(),
                existing: existing.item_id.clone(),
            });
        }
        let mut next = self.clone();
        next.items.push(item);
        Ok(next)
    }

    /// Returns a new bank in which `item_id` carries hand-set counts.
    pub fn with_override(&self, item_id: &str, counts: MethodCounts) -> Result<Bank, BankError> {
        let mut next = self.clone();
        let item = next
            .items
            .iter_mut()
            .find(|i| i.item_id == item_id)
            .ok_or_else(|| BankError::UnknownItem(item_id.to_string()))?;
        item.counts = counts;
        item.counts_overridden = true;
        item.approximate = false;
        Ok(next)
    }

    /// Partition of the items by their count under `method`, ascending by
    /// count value.
    pub fn groups(&self, method: TestingMethod) -> Vec<EquivalenceGroup> {
        let mut by_value: BTreeMap<u64, BTreeSet<String>> = BTreeMap::new();
        for item in &self.items {
            by_value
                .entry(item.counts.get(method))
                .or_default()
                .insert(item.item_id.clone());
        }
        by_value
            .into_iter()
            .map(|(count_value, member_ids)| EquivalenceGroup {
                method,
                count_value,
                member_ids,
            })
            .collect()
    }

    /// Fails on the first item whose stored counts disagree with a fresh
    /// analysis. Overridden items are skipped.
    pub fn verify(&self, cfg: &AnalysisConfig) -> Result<(), BankError> {
        for item in &self.items {
            verify_item(item, cfg)?;
        }
        Ok(())
    }

    pub fn to_json(&self, opts: SaveOptions) -> String {
        let file = BankFile {
            schema_version: SCHEMA_VERSION,
            loop_bound: self.metadata.loop_bound,
            created: Some(self.metadata.created),
            tool_version: Some(self.metadata.tool_version.clone()),
            items: self
                .items
                .iter()
                .map(|i| ItemRecord {
                    item_id: i.item_id.clone(),
                    source: i.program.source_text.clone(),
                    counts: i.counts,
                    counts_overridden: i.counts_overridden,
                    graph: opts.embed_graphs.then(|| i.graph.clone()),
                })
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&file).expect("bank serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str, opts: LoadOptions) -> Result<Bank, BankError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| BankError::SchemaMismatch(e.to_string()))?;
        match value.get("schema_version").and_then(|v| v.as_u64()) {
            Some(v) if v == u64::from(SCHEMA_VERSION) => {}
            Some(v) => return Err(BankError::SchemaMismatch(format!("found schema_version {v}"))),
            None => return Err(BankError::SchemaMismatch("missing schema_version".into())),
        }
        let file: BankFile = serde_json::from_value(value).map_err(|e| BankError::SchemaMismatch(e.to_string()))?;
        let mut cfg = AnalysisConfig::with_loop_bound(file.loop_bound);
        if let Some(cap) = opts.path_cap {
            cfg.path_cap = cap;
        }
        let mut bank = Bank::new(file.loop_bound);
        if let Some(created) = file.created {
            bank.metadata.created = created;
        }
        if let Some(v) = file.tool_version {
            bank.metadata.tool_version = v;
        }
        let mut seen = BTreeSet::new();
        for rec in file.items {
            if !seen.insert(rec.item_id.clone()) {
                return Err(BankError::DuplicateId(rec.item_id));
            }
            let program = parse_with_id(&rec.source, &rec.item_id).map_err(|source| BankError::Syntax {
                id: rec.item_id.clone(),
                source,
            })?;
            let graph = build_cfg(&program);
            if let Some(embedded) = &rec.graph {
                if !opts.no_verify && *embedded != graph {
                    return Err(BankError::GraphMismatch { id: rec.item_id });
                }
            }
            let item = BankItem {
                item_id: rec.item_id,
                program,
                graph,
                counts: rec.counts,
                loop_bound: file.loop_bound,
                counts_overridden: rec.counts_overridden,
                approximate: false,
            };
            if !opts.no_verify {
                verify_item(&item, &cfg)?;
            }
            bank.items.push(item);
        }
        Ok(bank)
    }

    /// Writes the bank atomically (temp file in the same directory, then rename).
    pub fn save(&self, path: &Path, opts: SaveOptions) -> Result<(), BankError> {
        crate::atomic::write(path, self.to_json(opts).as_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path, opts: LoadOptions) -> Result<Bank, BankError> {
        let text = fs::read_to_string(path)?;
        Bank::from_json(&text, opts)
    }
}

fn analyze_item(source: &str, item_id: &str, cfg: &AnalysisConfig) -> Result<BankItem, BankError> {
    let program = parse_with_id(source, item_id).map_err(|source| BankError::Syntax {
        id: item_id.to_string(),
        source,
    })?;
    let graph = build_cfg(&program);
    let counts = coverage_counts_with(&graph, cfg).map_err(|source| BankError::Analysis {
        id: item_id.to_string(),
        source,
    })?;
    Ok(BankItem {
        item_id: item_id.to_string(),
        program,
        graph,
        counts: counts.into(),
        loop_bound: cfg.loop_bound,
        counts_overridden: false,
        approximate: counts.approximate,
    })
}

fn verify_item(item: &BankItem, cfg: &AnalysisConfig) -> Result<(), BankError> {
    if item.counts_overridden {
        return Ok(());
    }
    let computed = coverage_counts_with(&item.graph, cfg).map_err(|source| BankError::Analysis {
        id: item.item_id.clone(),
        source,
    })?;
    if MethodCounts::from(computed) != item.counts {
        return Err(BankError::VerificationFailure {
            id: item.item_id.clone(),
            stored: item.counts.triple(),
            computed: computed.triple(),
        });
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BankFile {
    schema_version: u32,
    loop_bound: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    created: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tool_version: Option<String>,
    items: Vec<ItemRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ItemRecord {
    item_id: String,
    source: String,
    counts: MethodCounts,
    #[serde(default)]
    counts_overridden: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    graph: Option<FlowGraph>,
}
