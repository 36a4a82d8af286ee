//! Exhaustive enumeration of the restricted halting domain.
//!
//! The restricted system is the set of programs `p` with `l(p) <= l_max`
//! that halt within `t_max` steps, emit at most `output_cap` bits, and
//! consume exactly their own length, for one fixed auxiliary input. Every
//! downstream quantity (K, m, Omega, t_n, BB, sophistication) is defined
//! relative to this finite ground truth.
//!
//! The search walks the binary tree of bit strings lazily: a node is
//! extended only when the machine asks for more program bits; every other
//! outcome prunes the subtree, which is sound because outcomes depend only
//! on consumed bits. The result is the exact domain set independent of
//! traversal order or worker count.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::bits::BitString;
use crate::dyadic::Dyadic;
use crate::error::TableError;
use crate::machine::{self, RunOutcome, MACHINE_ID};

/// Parameters that define a restricted system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumConfig {
    pub l_max: u32,
    pub t_max: u64,
    pub output_cap: u32,
    pub aux: BitString,
    /// Bound on the live frontier during the breadth-first split phase.
    pub max_frontier: usize,
}

impl EnumConfig {
    pub fn new(l_max: u32, t_max: u64, output_cap: u32, aux: BitString) -> Self {
        EnumConfig { l_max, t_max, output_cap, aux, max_frontier: 1 << 20 }
    }
}

/// One halting program of the restricted domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HaltRecord {
    pub program: BitString,
    pub output: BitString,
    pub steps: u64,
}

impl HaltRecord {
    /// Bits consumed; in the domain this equals the program length.
    pub fn frontier(&self) -> usize {
        self.program.len()
    }

    pub fn mass(&self) -> Dyadic {
        Dyadic::pow2_neg(self.program.len() as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunManifest {
    pub machine_id: String,
    pub l_max: u32,
    pub t_max: u64,
    pub output_cap: u32,
    pub aux: BitString,
    pub record_count: usize,
    pub content_hash: String,
}

/// The enumerated domain: records sorted by (length, bits) plus the
/// manifest describing how they were produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainTable {
    records: Vec<HaltRecord>,
    manifest: RunManifest,
}

impl DomainTable {
    fn from_records(mut records: Vec<HaltRecord>, cfg: &EnumConfig) -> Self {
        records.sort_by(|a, b| a.program.cmp(&b.program));
        let content_hash = hash_records(&records);
        let manifest = RunManifest {
            machine_id: MACHINE_ID.to_string(),
            l_max: cfg.l_max,
            t_max: cfg.t_max,
            output_cap: cfg.output_cap,
            aux: cfg.aux.clone(),
            record_count: records.len(),
            content_hash,
        };
        DomainTable { records, manifest }
    }

    pub fn records(&self) -> &[HaltRecord] {
        &self.records
    }

    pub fn manifest(&self) -> &RunManifest {
        &self.manifest
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Steps of `p` if `p` is in the domain.
    pub fn steps_of(&self, p: &BitString) -> Option<u64> {
        self.records
            .binary_search_by(|r| r.program.cmp(p))
            .ok()
            .map(|i| self.records[i].steps)
    }

    pub fn contains(&self, p: &BitString) -> bool {
        self.steps_of(p).is_some()
    }

    /// Exact Kraft sum over the domain.
    pub fn kraft_sum(&self) -> Dyadic {
        Dyadic::sum(self.records.iter().map(|r| r.mass()).collect::<Vec<_>>().iter())
    }

    /// First prefix pair among domain programs, if any. The enumeration
    /// never produces one; this is the checkable form of the invariant.
    pub fn prefix_violation(&self) -> Option<(BitString, BitString)> {
        let set: std::collections::HashSet<&BitString> =
            self.records.iter().map(|r| &r.program).collect();
        for r in &self.records {
            for cut in 0..r.program.len() {
                let pre = r.program.prefix(cut);
                if set.contains(&pre) {
                    return Some((pre, r.program.clone()));
                }
            }
        }
        None
    }
}

fn hash_records(records: &[HaltRecord]) -> String {
    let mut hasher = Sha256::new();
    for r in records {
        let mut line = String::new();
        let _ = writeln!(line, "{},{},{}", r.program, r.output, r.steps);
        hasher.update(line.as_bytes());
    }
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

enum NodeFate {
    Record(HaltRecord),
    Branch,
    Prune,
}

fn classify(node: &BitString, cfg: &EnumConfig) -> NodeFate {
    match machine::run(node, &cfg.aux, cfg.t_max, cfg.output_cap) {
        RunOutcome::Halted { output, steps, frontier } => {
            // A halt with frontier below the node length would have been
            // recorded (and pruned) at the shorter prefix already.
            debug_assert_eq!(frontier, node.len());
            NodeFate::Record(HaltRecord { program: node.clone(), output, steps })
        }
        RunOutcome::NeedsMoreBits { .. } => {
            if node.len() as u32 >= cfg.l_max {
                NodeFate::Prune
            } else {
                NodeFate::Branch
            }
        }
        RunOutcome::Aborted { .. } | RunOutcome::OutOfBudget | RunOutcome::OutputOverflow => {
            NodeFate::Prune
        }
    }
}

fn explore_subtree(seed: &BitString, cfg: &EnumConfig, out: &mut Vec<HaltRecord>) {
    let mut stack = vec![seed.clone()];
    while let Some(node) = stack.pop() {
        match classify(&node, cfg) {
            NodeFate::Record(r) => out.push(r),
            NodeFate::Branch => {
                stack.push(node.child(0));
                stack.push(node.child(1));
            }
            NodeFate::Prune => {}
        }
    }
}

/// Enumerate the restricted domain. The result is the exact set of clean
/// halting programs, independent of `workers`; with the `parallel` feature
/// disabled or `workers <= 1` the subtrees are explored sequentially.
pub fn enumerate_domain(cfg: &EnumConfig, workers: usize) -> Result<DomainTable, TableError> {
    assert!(workers >= 1, "workers must be at least 1");
    let mut records: Vec<HaltRecord> = Vec::new();

    // Breadth-first split: grow the live frontier until there are enough
    // independent subtrees to keep the workers busy.
    let split_target = if workers > 1 { workers * 32 } else { 1 };
    let mut frontier: VecDeque<BitString> = VecDeque::new();
    frontier.push_back(BitString::new());
    while !frontier.is_empty() && frontier.len() < split_target {
        if frontier.len() > cfg.max_frontier {
            return Err(TableError::ResourceLimit { limit: cfg.max_frontier });
        }
        let node = frontier.pop_front().expect("nonempty");
        match classify(&node, cfg) {
            NodeFate::Record(r) => records.push(r),
            NodeFate::Branch => {
                frontier.push_back(node.child(0));
                frontier.push_back(node.child(1));
            }
            NodeFate::Prune => {}
        }
    }
    if frontier.len() > cfg.max_frontier {
        return Err(TableError::ResourceLimit { limit: cfg.max_frontier });
    }

    let seeds: Vec<BitString> = frontier.into_iter().collect();
    let subtree_records = explore_seeds(&seeds, cfg, workers);
    for sub in subtree_records {
        records.extend(sub);
    }
    Ok(DomainTable::from_records(records, cfg))
}

#[cfg(feature = "parallel")]
fn explore_seeds(seeds: &[BitString], cfg: &EnumConfig, workers: usize) -> Vec<Vec<HaltRecord>> {
    use rayon::prelude::*;
    if workers <= 1 {
        return explore_seeds_sequential(seeds, cfg);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("failed to build worker pool");
    pool.install(|| {
        seeds
            .par_iter()
            .map(|seed| {
                let mut out = Vec::new();
                explore_subtree(seed, cfg, &mut out);
                out
            })
            .collect()
    })
}

#[cfg(not(feature = "parallel"))]
fn explore_seeds(seeds: &[BitString], cfg: &EnumConfig, _workers: usize) -> Vec<Vec<HaltRecord>> {
    explore_seeds_sequential(seeds, cfg)
}

fn explore_seeds_sequential(seeds: &[BitString], cfg: &EnumConfig) -> Vec<Vec<HaltRecord>> {
    seeds
        .iter()
        .map(|seed| {
            let mut out = Vec::new();
            explore_subtree(seed, cfg, &mut out);
            out
        })
        .collect()
}

/// Brute-force oracle: run every bit string of length up to `l_max`
/// independently, no pruning and no tree. Test support only; cost is
/// `2^(l_max+1)` machine runs.
pub fn naive_oracle(cfg: &EnumConfig) -> DomainTable {
    assert!(cfg.l_max <= 18, "naive oracle is limited to l_max <= 18");
    let mut records = Vec::new();
    for len in 0..=cfg.l_max as usize {
        let count: u64 = 1u64 << len;
        for v in 0..count {
            let p = BitString::from_value(v, len);
            if let RunOutcome::Halted { output, steps, frontier } =
                machine::run(&p, &cfg.aux, cfg.t_max, cfg.output_cap)
            {
                if frontier == len {
                    records.push(HaltRecord { program: p, output, steps });
                }
            }
        }
    }
    DomainTable::from_records(records, cfg)
}

const FILE_VERSION: &str = "soph-lab v1";

/// Persist a table: a CSV record file plus a `<path>.manifest` sidecar.
pub fn save_table(table: &DomainTable, path: &Path) -> Result<(), TableError> {
    let m = table.manifest();
    let mut body = format!(
        "# {FILE_VERSION}; machine={}; lmax={}; tmax={}; ocap={}; aux={}\n",
        m.machine_id, m.l_max, m.t_max, m.output_cap, m.aux
    );
    body.push_str("program,output,steps\n");
    for r in table.records() {
        let _ = writeln!(body, "{},{},{}", r.program, r.output, r.steps);
    }
    fs::write(path, body)?;

    let sidecar = format!(
        "machine: {}\nlmax: {}\ntmax: {}\nocap: {}\naux: {}\nrecords: {}\nhash: {}\n",
        m.machine_id, m.l_max, m.t_max, m.output_cap, m.aux, m.record_count, m.content_hash
    );
    fs::write(manifest_path(path), sidecar)?;
    Ok(())
}

pub fn manifest_path(path: &Path) -> std::path::PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".manifest");
    os.into()
}

/// Load a table saved by [`save_table`], verifying the machine id and the
/// content hash recorded in the manifest sidecar.
pub fn load_table(path: &Path) -> Result<DomainTable, TableError> {
    let body = fs::read_to_string(path)?;
    let mut lines = body.lines();
    let header = lines
        .next()
        .ok_or_else(|| TableError::Malformed("empty record file".into()))?;
    let fields = parse_header(header)?;
    let machine_id = fields.machine_id;
    if machine_id != MACHINE_ID {
        return Err(TableError::Version { found: machine_id, expected: MACHINE_ID.into() });
    }
    let columns = lines
        .next()
        .ok_or_else(|| TableError::Malformed("missing column header".into()))?;
    if columns != "program,output,steps" {
        return Err(TableError::Malformed(format!("unexpected column header {columns:?}")));
    }

    let mut records = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let program = parts
            .next()
            .and_then(|s| s.parse::<BitString>().ok())
            .ok_or_else(|| TableError::Malformed(format!("bad row {line:?}")))?;
        let output = parts
            .next()
            .and_then(|s| s.parse::<BitString>().ok())
            .ok_or_else(|| TableError::Malformed(format!("bad row {line:?}")))?;
        let steps = parts
            .next()
            .and_then(|s| s.parse::<u64>().ok())
            .ok_or_else(|| TableError::Malformed(format!("bad row {line:?}")))?;
        if parts.next().is_some() {
            return Err(TableError::Malformed(format!("trailing fields in row {line:?}")));
        }
        records.push(HaltRecord { program, output, steps });
    }

    let sidecar = fs::read_to_string(manifest_path(path))?;
    let mut expected_hash = None;
    let mut expected_count = None;
    for line in sidecar.lines() {
        if let Some(h) = line.strip_prefix("hash: ") {
            expected_hash = Some(h.to_string());
        }
        if let Some(c) = line.strip_prefix("records: ") {
            expected_count =
                Some(c.parse::<usize>().map_err(|_| TableError::Malformed("bad record count".into()))?);
        }
    }
    let expected_hash =
        expected_hash.ok_or_else(|| TableError::Malformed("manifest missing hash".into()))?;
    let expected_count =
        expected_count.ok_or_else(|| TableError::Malformed("manifest missing record count".into()))?;

    let got_hash = hash_records(&records);
    if got_hash != expected_hash || records.len() != expected_count {
        return Err(TableError::Corrupt(format!(
            "content hash mismatch: manifest {expected_hash} over {expected_count} records, file {got_hash} over {}",
            records.len()
        )));
    }

    let cfg = EnumConfig::new(fields.l_max, fields.t_max, fields.output_cap, fields.aux);
    let table = DomainTable::from_records(records, &cfg);
    if table.manifest.content_hash != expected_hash {
        return Err(TableError::Corrupt("records were not in canonical order".into()));
    }
    Ok(table)
}

struct HeaderFields {
    machine_id: String,
    l_max: u32,
    t_max: u64,
    output_cap: u32,
    aux: BitString,
}

fn parse_header(header: &str) -> Result<HeaderFields, TableError> {
    let rest = header
        .strip_prefix(&format!("# {FILE_VERSION}; "))
        .ok_or_else(|| TableError::Malformed(format!("unrecognized header {header:?}")))?;
    let mut machine_id = None;
    let mut l_max = None;
    let mut t_max = None;
    let mut output_cap = None;
    let mut aux = None;
    for part in rest.split("; ") {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| TableError::Malformed(format!("bad header field {part:?}")))?;
        match key {
            "machine" => machine_id = Some(value.to_string()),
            "lmax" => l_max = value.parse().ok(),
            "tmax" => t_max = value.parse().ok(),
            "ocap" => output_cap = value.parse().ok(),
            "aux" => aux = value.parse().ok(),
            _ => return Err(TableError::Malformed(format!("unknown header field {key:?}"))),
        }
    }
    match (machine_id, l_max, t_max, output_cap, aux) {
        (Some(machine_id), Some(l_max), Some(t_max), Some(output_cap), Some(aux)) => {
            Ok(HeaderFields { machine_id, l_max, t_max, output_cap, aux })
        }
        _ => Err(TableError::Malformed(format!("incomplete header {header:?}"))),
    }
}
