//! LETOR feature files, TREC qrels and the per-query 5-fold split.
//!
//! A LETOR line looks like
//!
//! ```text
//! 1 qid:201 1:0.5 2:0.0 ... 11:0.3 #docid = clueweb12-0000tw-00-00000
//! ```
//!
//! Feature ids must be dense starting at 1. Queries are partitioned into five
//! near-equal groups; fold `f` tests on partition `f`, validates on partition
//! `(f+1) mod 5` and trains on the remaining three.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};

/// Graded relevance judgment. Valid values are -2 (junk), 0 (non), 1 (rel),
/// 2 (hrel), 3 (key) and 4 (nav); they order naturally by value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelevanceGrade(i8);

impl RelevanceGrade {
    pub const JUNK: RelevanceGrade = RelevanceGrade(-2);
    pub const NON: RelevanceGrade = RelevanceGrade(0);
    pub const REL: RelevanceGrade = RelevanceGrade(1);
    pub const HREL: RelevanceGrade = RelevanceGrade(2);
    pub const KEY: RelevanceGrade = RelevanceGrade(3);
    pub const NAV: RelevanceGrade = RelevanceGrade(4);

    /// All valid grades in ascending order.
    pub const ALL: [RelevanceGrade; 6] = [
        Self::JUNK,
        Self::NON,
        Self::REL,
        Self::HREL,
        Self::KEY,
        Self::NAV,
    ];

    pub fn new(value: i64) -> Result<Self> {
        match value {
            -2 | 0 | 1 | 2 | 3 | 4 => Ok(RelevanceGrade(value as i8)),
            other => Err(Error::InvalidGrade(other)),
        }
    }

    pub fn value(self) -> i8 {
        self.0
    }

    /// Binary relevance: grade >= 1.
    pub fn is_relevant(self) -> bool {
        self.0 >= 1
    }

    /// NDCG gain `2^max(g,0) - 1`; junk and non-relevant both gain 0.
    pub fn gain(self) -> f64 {
        (2.0f64).powi(i32::from(self.0.max(0))) - 1.0
    }
}

impl std::fmt::Display for RelevanceGrade {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One LETOR line: grade, query id, dense feature vector, document id.
#[derive(Debug, Clone, PartialEq)]
pub struct LetorRecord {
    pub grade: RelevanceGrade,
    pub query_id: String,
    /// Feature id `i+1` holds `features[i]`.
    pub features: Vec<f64>,
    pub doc_id: String,
}

impl LetorRecord {
    pub fn new(
        grade: RelevanceGrade,
        query_id: impl Into<String>,
        features: Vec<f64>,
        doc_id: impl Into<String>,
    ) -> Result<Self> {
        let query_id = query_id.into();
        let doc_id = doc_id.into();
        if doc_id.is_empty() {
            return Err(Error::InvalidRecord("empty doc_id".into()));
        }
        if query_id.is_empty() {
            return Err(Error::InvalidRecord("empty query_id".into()));
        }
        if features.is_empty() {
            return Err(Error::InvalidRecord("empty feature map".into()));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidRecord("non-finite feature value".into()));
        }
        Ok(LetorRecord {
            grade,
            query_id,
            features,
            doc_id,
        })
    }
}

/// Parse one LETOR line. Whitespace-tolerant; feature ids must be dense 1..F.
pub fn parse_letor(line: &str) -> Result<LetorRecord> {
    let mut tokens = line.split_whitespace().peekable();
    let grade_tok = tokens
        .next()
        .ok_or_else(|| Error::Parse("empty line".into()))?;
    let grade_val: i64 = grade_tok
        .parse()
        .map_err(|_| Error::Parse(format!("bad grade {grade_tok:?}")))?;
    let grade = RelevanceGrade::new(grade_val)?;

    let qid_tok = tokens
        .next()
        .ok_or_else(|| Error::Parse("missing qid field".into()))?;
    let query_id = qid_tok
        .strip_prefix("qid:")
        .ok_or_else(|| Error::Parse(format!("expected qid:<id>, found {qid_tok:?}")))?;
    if query_id.is_empty() {
        return Err(Error::Parse("empty qid".into()));
    }

    let mut features = Vec::new();
    while let Some(tok) = tokens.peek() {
        if tok.starts_with('#') {
            break;
        }
        let tok = tokens.next().unwrap();
        let (fid, value) = tok
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected fid:value, found {tok:?}")))?;
        let fid: usize = fid
            .parse()
            .map_err(|_| Error::Parse(format!("bad feature id {fid:?}")))?;
        if fid != features.len() + 1 {
            return Err(Error::NonDenseFeatureIds {
                expected: features.len() + 1,
                found: fid,
            });
        }
        let value: f64 = value
            .parse()
            .map_err(|_| Error::Parse(format!("bad feature value {value:?}")))?;
        features.push(value);
    }

    // comment: #docid = <docid>
    match tokens.next() {
        Some("#docid") => {}
        other => {
            return Err(Error::Parse(format!(
                "expected '#docid = <id>' comment, found {other:?}"
            )))
        }
    }
    if tokens.next() != Some("=") {
        return Err(Error::Parse("expected '=' after #docid".into()));
    }
    let doc_id = tokens
        .next()
        .ok_or_else(|| Error::Parse("missing doc id after '#docid ='".into()))?;
    if tokens.next().is_some() {
        return Err(Error::Parse("trailing tokens after doc id".into()));
    }

    LetorRecord::new(grade, query_id, features, doc_id)
}

/// Render a record as a LETOR line. Floats use the shortest representation
/// that parses back to the same value, so `parse_letor(emit_letor(r)) == r`.
pub fn emit_letor(record: &LetorRecord) -> String {
    let mut line = format!("{} qid:{}", record.grade, record.query_id);
    for (i, v) in record.features.iter().enumerate() {
        line.push_str(&format!(" {}:{}", i + 1, v));
    }
    line.push_str(&format!(" #docid = {}", record.doc_id));
    line
}

/// Read a LETOR file; parse errors carry the line number.
pub fn read_letor<R: BufRead>(reader: R, file: &str) -> Result<Vec<LetorRecord>> {
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(file, e))?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(parse_letor(&line).map_err(|e| e.at(file, idx + 1))?);
    }
    Ok(records)
}

pub fn write_letor(records: &[LetorRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&emit_letor(r));
        out.push('\n');
    }
    out
}

/// Judgments keyed by (query_id, doc_id).
pub type Qrels = BTreeMap<(String, String), RelevanceGrade>;

/// Parse TREC qrels lines `<topic> 0 <docid> <grade>`. Later duplicates
/// overwrite earlier ones; a warning is recorded for each overwrite.
pub fn parse_qrels<R: BufRead>(reader: R, file: &str) -> Result<(Qrels, Vec<String>)> {
    let mut qrels = Qrels::new();
    let mut warnings = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(file, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(
                Error::Parse(format!("expected 4 fields, found {}", fields.len())).at(file, lineno)
            );
        }
        let grade_val: i64 = fields[3]
            .parse()
            .map_err(|_| Error::Parse(format!("bad grade {:?}", fields[3])).at(file, lineno))?;
        let grade = RelevanceGrade::new(grade_val).map_err(|e| e.at(file, lineno))?;
        let key = (fields[0].to_string(), fields[2].to_string());
        if let Some(prev) = qrels.insert(key.clone(), grade) {
            if prev != grade {
                warnings.push(format!(
                    "{file}:{lineno}: duplicate judgment for ({}, {}): {} overwrites {}",
                    key.0, key.1, grade, prev
                ));
            }
        }
    }
    Ok((qrels, warnings))
}

/// Render qrels in TREC format, sorted by (query, doc).
pub fn write_qrels(qrels: &Qrels) -> String {
    let mut out = String::new();
    for ((qid, did), grade) in qrels {
        out.push_str(&format!("{qid} 0 {did} {grade}\n"));
    }
    out
}

/// Number of partitions and folds.
pub const FOLD_COUNT: usize = 5;

/// Name of the PRNG behind the seeded shuffle, recorded in fold manifests.
pub const FOLD_PRNG: &str = "chacha12";

/// One fold's use of the five partitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fold {
    pub train: [usize; 3],
    pub validation: usize,
    pub test: usize,
}

/// A per-query partition plus the rotation of partitions through the folds.
/// Partition `p` is the test set of fold `p` and the validation set of fold
/// `(p+4) mod 5`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    pub partitions: BTreeMap<String, usize>,
    pub folds: [Fold; FOLD_COUNT],
    pub seed: u64,
}

fn rotation() -> [Fold; FOLD_COUNT] {
    let mut folds = [Fold {
        train: [0; 3],
        validation: 0,
        test: 0,
    }; FOLD_COUNT];
    for (f, fold) in folds.iter_mut().enumerate() {
        fold.test = f;
        fold.validation = (f + 1) % FOLD_COUNT;
        let mut train = [0usize; 3];
        let mut t = 0;
        for p in 0..FOLD_COUNT {
            if p != fold.test && p != fold.validation {
                train[t] = p;
                t += 1;
            }
        }
        fold.train = train;
    }
    folds
}

impl FoldAssignment {
    /// Queries of one partition, sorted.
    pub fn partition_queries(&self, partition: usize) -> Vec<&str> {
        self.partitions
            .iter()
            .filter(|(_, &p)| p == partition)
            .map(|(q, _)| q.as_str())
            .collect()
    }

    pub fn fold(&self, index: usize) -> Result<&Fold> {
        self.folds.get(index).ok_or(Error::FoldOutOfRange(index))
    }

    pub fn train_queries(&self, fold: usize) -> Result<BTreeSet<String>> {
        let fold = self.fold(fold)?;
        Ok(self
            .partitions
            .iter()
            .filter(|(_, p)| fold.train.contains(p))
            .map(|(q, _)| q.clone())
            .collect())
    }

    pub fn validation_queries(&self, fold: usize) -> Result<BTreeSet<String>> {
        let fold = self.fold(fold)?;
        Ok(self
            .partitions
            .iter()
            .filter(|(_, &p)| p == fold.validation)
            .map(|(q, _)| q.clone())
            .collect())
    }

    pub fn test_queries(&self, fold: usize) -> Result<BTreeSet<String>> {
        let fold = self.fold(fold)?;
        Ok(self
            .partitions
            .iter()
            .filter(|(_, &p)| p == fold.test)
            .map(|(q, _)| q.clone())
            .collect())
    }

    /// Plain-text manifest: a comment header naming the PRNG and seed, then
    /// `query_id <TAB> partition` lines.
    pub fn write_manifest(&self) -> String {
        let mut out = format!("# prng = {FOLD_PRNG} seed = {}\n", self.seed);
        for (qid, p) in &self.partitions {
            out.push_str(&format!("{qid}\t{p}\n"));
        }
        out
    }

    pub fn read_manifest<R: BufRead>(reader: R, file: &str) -> Result<Self> {
        let mut partitions = BTreeMap::new();
        let mut seed = 0u64;
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::io(file, e))?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(comment) = trimmed.strip_prefix('#') {
                if let Some(pos) = comment.find("seed =") {
                    seed = comment[pos + 6..]
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse("bad seed in header".into()).at(file, lineno))?;
                }
                continue;
            }
            let (qid, p) = trimmed.split_once('\t').ok_or_else(|| {
                Error::Parse("expected query_id <TAB> partition".into()).at(file, lineno)
            })?;
            let p: usize = p
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad partition {p:?}")).at(file, lineno))?;
            if p >= FOLD_COUNT {
                return Err(Error::FoldOutOfRange(p).at(file, lineno));
            }
            if partitions.insert(qid.to_string(), p).is_some() {
                return Err(Error::Parse(format!("duplicate query {qid:?}")).at(file, lineno));
            }
        }
        Ok(FoldAssignment {
            partitions,
            folds: rotation(),
            seed,
        })
    }
}

/// Randomly split queries into five partitions whose sizes differ by at most
/// one. Deterministic for a given seed.
pub fn split_folds(query_ids: &[String], seed: u64) -> Result<FoldAssignment> {
    let mut ids: Vec<&String> = query_ids.iter().collect();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() < FOLD_COUNT {
        return Err(Error::TooFewQueries(ids.len()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    ids.shuffle(&mut rng);
    let partitions = ids
        .into_iter()
        .enumerate()
        .map(|(i, q)| (q.clone(), i % FOLD_COUNT))
        .collect();
    Ok(FoldAssignment {
        partitions,
        folds: rotation(),
        seed,
    })
}
