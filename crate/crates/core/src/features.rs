//! Content (non-visual) features over a fielded document corpus.
//!
//! Documents carry two token fields, title and content. Eleven features are
//! computed per query-document pair: PageRank (scaled by 1e5), and per field
//! the token length, summed TF, summed IDF, summed TF-IDF and the BM25 score.
//! Raw values pass through a `log1p` transform and a per-query min-max
//! normalization before they reach a model.

use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;

use crate::error::{Error, Result};

/// Number of content features per document.
pub const CONTENT_FEATURE_COUNT: usize = 11;

/// PageRank scores sit an order of magnitude or more below the other
/// features, so the raw score is multiplied by this factor.
pub const PAGERANK_SCALE: f64 = 1e5;

/// Document field a statistic or feature refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Title,
    Content,
}

impl Field {
    pub fn name(self) -> &'static str {
        match self {
            Field::Title => "title",
            Field::Content => "content",
        }
    }
}

/// Lowercase and split on any non-alphanumeric character. No stemming, no
/// stopword removal.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// A document reduced to its token fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedDocument {
    pub doc_id: String,
    pub title_tokens: Vec<String>,
    pub content_tokens: Vec<String>,
}

impl TokenizedDocument {
    pub fn from_text(doc_id: &str, title: &str, content: &str) -> Result<Self> {
        if doc_id.is_empty() {
            return Err(Error::InvalidRecord("empty doc_id".into()));
        }
        Ok(TokenizedDocument {
            doc_id: doc_id.to_string(),
            title_tokens: tokenize(title),
            content_tokens: tokenize(content),
        })
    }

    pub fn field_tokens(&self, field: Field) -> &[String] {
        match field {
            Field::Title => &self.title_tokens,
            Field::Content => &self.content_tokens,
        }
    }
}

#[derive(Debug, Clone, Default)]
struct FieldStats {
    df: HashMap<String, u64>,
    total_len: u64,
}

/// Collection statistics feeding the IDF and BM25 formulas.
#[derive(Debug, Clone)]
pub struct CorpusStats {
    n_docs: u64,
    title: FieldStats,
    content: FieldStats,
}

impl CorpusStats {
    /// Single pass over the corpus counting document frequencies (each token
    /// at most once per document per field) and total field lengths.
    pub fn build<'a, I>(docs: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a TokenizedDocument>,
    {
        let mut stats = CorpusStats {
            n_docs: 0,
            title: FieldStats::default(),
            content: FieldStats::default(),
        };
        for doc in docs {
            stats.n_docs += 1;
            for (field, tokens) in [
                (Field::Title, &doc.title_tokens),
                (Field::Content, &doc.content_tokens),
            ] {
                let fs = stats.field_mut(field);
                fs.total_len += tokens.len() as u64;
                let mut seen: Vec<&str> = tokens.iter().map(String::as_str).collect();
                seen.sort_unstable();
                seen.dedup();
                for token in seen {
                    *fs.df.entry(token.to_string()).or_insert(0) += 1;
                }
            }
        }
        if stats.n_docs == 0 {
            return Err(Error::EmptyCorpus);
        }
        Ok(stats)
    }

    fn field(&self, field: Field) -> &FieldStats {
        match field {
            Field::Title => &self.title,
            Field::Content => &self.content,
        }
    }

    fn field_mut(&mut self, field: Field) -> &mut FieldStats {
        match field {
            Field::Title => &mut self.title,
            Field::Content => &mut self.content,
        }
    }

    pub fn n_docs(&self) -> u64 {
        self.n_docs
    }

    /// Document frequency of `token` in `field`; 0 for unseen tokens.
    pub fn df(&self, field: Field, token: &str) -> u64 {
        self.field(field).df.get(token).copied().unwrap_or(0)
    }

    pub fn total_len(&self, field: Field) -> u64 {
        self.field(field).total_len
    }

    /// Average field length over all documents.
    pub fn avgdl(&self, field: Field) -> f64 {
        self.field(field).total_len as f64 / self.n_docs as f64
    }

    /// Robertson-Sparck-Jones IDF with 0.5 smoothing, floored at zero:
    /// `max(0, ln((N - df + 0.5) / (df + 0.5)))`. Tokens absent from the
    /// corpus use df = 0.
    pub fn idf(&self, field: Field, token: &str) -> f64 {
        let n = self.n_docs as f64;
        let df = self.df(field, token) as f64;
        ((n - df + 0.5) / (df + 0.5)).ln().max(0.0)
    }
}

/// BM25 free parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bm25Params {
    pub k1: f64,
    pub k3: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Bm25Params {
            k1: 2.5,
            k3: 0.0,
            b: 0.8,
        }
    }
}

impl Bm25Params {
    pub fn validate(&self) -> Result<()> {
        if self.k1 < 0.0 || self.k3 < 0.0 || !(0.0..=1.0).contains(&self.b) {
            return Err(Error::InvalidConfig(format!(
                "bm25 parameters out of range: k1={} k3={} b={}",
                self.k1, self.k3, self.b
            )));
        }
        Ok(())
    }
}

/// Transformation stage of a feature vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureStage {
    Raw,
    Logged,
    Normalized,
}

/// The 11 features in table order: PageRank, content length, content TF,
/// content IDF, content TF-IDF, content BM25, title length, title TF, title
/// IDF, title TF-IDF, title BM25.
#[derive(Debug, Clone, PartialEq)]
pub struct ContentFeatureVector {
    pub values: [f64; CONTENT_FEATURE_COUNT],
    pub stage: FeatureStage,
}

impl ContentFeatureVector {
    fn expect_stage(&self, expected: FeatureStage) -> Result<()> {
        if self.stage != expected {
            return Err(Error::WrongStage {
                expected,
                found: self.stage,
            });
        }
        Ok(())
    }
}

fn dedup_terms(query_terms: &[String]) -> Vec<&str> {
    let mut terms: Vec<&str> = Vec::new();
    for t in query_terms {
        if !terms.contains(&t.as_str()) {
            terms.push(t);
        }
    }
    terms
}

fn term_frequency(term: &str, field_tokens: &[String]) -> u64 {
    field_tokens.iter().filter(|t| t.as_str() == term).count() as u64
}

/// Sum over query terms of the term frequency in the field. Duplicate query
/// terms are counted once.
pub fn sum_tf(query_terms: &[String], field_tokens: &[String]) -> f64 {
    dedup_terms(query_terms)
        .iter()
        .map(|t| term_frequency(t, field_tokens) as f64)
        .sum()
}

/// Okapi BM25 over one document field:
///
/// `sum_t idf(t) * (tf*(k1+1)) / (tf + k1*(1-b+b*dl/avgdl)) * ((k3+1)*qtf) / (k3+qtf)`
///
/// With the default `k3 = 0` the query-frequency factor is exactly 1 for
/// every present query term.
pub fn bm25(
    query_terms: &[String],
    field_tokens: &[String],
    field: Field,
    stats: &CorpusStats,
    params: &Bm25Params,
) -> Result<f64> {
    params.validate()?;
    if query_terms.is_empty() {
        return Ok(0.0);
    }
    let avgdl = stats.avgdl(field);
    if avgdl == 0.0 {
        return Err(Error::DegenerateField { field: field.name() });
    }
    let dl = field_tokens.len() as f64;
    let mut score = 0.0;
    for term in dedup_terms(query_terms) {
        let tf = term_frequency(term, field_tokens) as f64;
        if tf == 0.0 {
            continue;
        }
        let qtf = query_terms.iter().filter(|t| t.as_str() == term).count() as f64;
        let idf = stats.idf(field, term);
        let tf_factor = (tf * (params.k1 + 1.0)) / (tf + params.k1 * (1.0 - params.b + params.b * dl / avgdl));
        let qtf_factor = ((params.k3 + 1.0) * qtf) / (params.k3 + qtf);
        score += idf * tf_factor * qtf_factor;
    }
    Ok(score)
}

/// Per-field TF, IDF, TF-IDF and BM25 sums. IDF and TF-IDF sum over the query
/// terms that occur in the field, so an empty field yields all zeros.
fn field_features(
    query_terms: &[String],
    field_tokens: &[String],
    field: Field,
    stats: &CorpusStats,
    params: &Bm25Params,
) -> Result<[f64; 4]> {
    if query_terms.is_empty() || field_tokens.is_empty() {
        return Ok([0.0; 4]);
    }
    let mut tf_sum = 0.0;
    let mut idf_sum = 0.0;
    let mut tfidf_sum = 0.0;
    for term in dedup_terms(query_terms) {
        let tf = term_frequency(term, field_tokens) as f64;
        if tf == 0.0 {
            continue;
        }
        let idf = stats.idf(field, term);
        tf_sum += tf;
        idf_sum += idf;
        tfidf_sum += tf * idf;
    }
    let bm25 = bm25(query_terms, field_tokens, field, stats, params)?;
    Ok([tf_sum, idf_sum, tfidf_sum, bm25])
}

/// Compute the 11 raw features for one query-document pair.
pub fn extract_content_features(
    query_terms: &[String],
    doc: &TokenizedDocument,
    stats: &CorpusStats,
    params: &Bm25Params,
    pagerank: f64,
) -> Result<ContentFeatureVector> {
    let mut values = [0.0; CONTENT_FEATURE_COUNT];
    values[0] = pagerank * PAGERANK_SCALE;
    values[1] = doc.content_tokens.len() as f64;
    let content = field_features(query_terms, &doc.content_tokens, Field::Content, stats, params)?;
    values[2..6].copy_from_slice(&content);
    values[6] = doc.title_tokens.len() as f64;
    let title = field_features(query_terms, &doc.title_tokens, Field::Title, stats, params)?;
    values[7..11].copy_from_slice(&title);
    Ok(ContentFeatureVector {
        values,
        stage: FeatureStage::Raw,
    })
}

/// `x -> ln(1 + x)` per entry; negative inputs are clamped to 0 first.
pub fn log_transform(v: &ContentFeatureVector) -> Result<ContentFeatureVector> {
    v.expect_stage(FeatureStage::Raw)?;
    let mut values = [0.0; CONTENT_FEATURE_COUNT];
    for (out, x) in values.iter_mut().zip(v.values.iter()) {
        *out = x.max(0.0).ln_1p();
    }
    Ok(ContentFeatureVector {
        values,
        stage: FeatureStage::Logged,
    })
}

/// Min-max normalize each feature within each query:
/// `x -> (x - min) / (max - min)`, with constant columns mapping to 0.
/// Row order is preserved.
pub fn normalize_per_query(
    rows: &[(String, String, ContentFeatureVector)],
) -> Result<Vec<(String, String, ContentFeatureVector)>> {
    for (_, _, v) in rows {
        v.expect_stage(FeatureStage::Logged)?;
    }
    let mut by_query: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, (qid, _, _)) in rows.iter().enumerate() {
        by_query.entry(qid).or_default().push(i);
    }
    let mut out: Vec<(String, String, ContentFeatureVector)> = rows
        .iter()
        .map(|(q, d, v)| {
            (
                q.clone(),
                d.clone(),
                ContentFeatureVector {
                    values: v.values,
                    stage: FeatureStage::Normalized,
                },
            )
        })
        .collect();
    for indices in by_query.values() {
        for f in 0..CONTENT_FEATURE_COUNT {
            let mut min = f64::INFINITY;
            let mut max = f64::NEG_INFINITY;
            for &i in indices {
                let x = rows[i].2.values[f];
                min = min.min(x);
                max = max.max(x);
            }
            let range = max - min;
            for &i in indices {
                out[i].2.values[f] = if range == 0.0 {
                    0.0
                } else {
                    (rows[i].2.values[f] - min) / range
                };
            }
        }
    }
    Ok(out)
}

/// Read a corpus of `doc_id <TAB> title <TAB> content` lines.
pub fn read_corpus<R: BufRead>(reader: R, file: &str) -> Result<Vec<TokenizedDocument>> {
    let mut docs = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(file, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.splitn(3, '\t');
        let doc_id = parts.next().unwrap_or("");
        let title = parts.next().ok_or_else(|| {
            Error::Parse("expected doc_id <TAB> title <TAB> content".into()).at(file, lineno)
        })?;
        let content = parts.next().ok_or_else(|| {
            Error::Parse("expected doc_id <TAB> title <TAB> content".into()).at(file, lineno)
        })?;
        if let Some(prev) = seen.insert(doc_id.to_string(), lineno) {
            return Err(Error::Parse(format!(
                "duplicate doc_id {doc_id} (first seen on line {prev})"
            ))
            .at(file, lineno));
        }
        docs.push(TokenizedDocument::from_text(doc_id, title, content).map_err(|e| e.at(file, lineno))?);
    }
    Ok(docs)
}

/// Read `doc_id <TAB> score` PageRank lines.
pub fn read_pagerank<R: BufRead>(reader: R, file: &str) -> Result<HashMap<String, f64>> {
    let mut scores = HashMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(file, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.splitn(2, '\t');
        let doc_id = parts.next().unwrap_or("").to_string();
        let score: f64 = parts
            .next()
            .ok_or_else(|| Error::Parse("expected doc_id <TAB> score".into()).at(file, lineno))?
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad score: {e}")).at(file, lineno))?;
        scores.insert(doc_id, score);
    }
    Ok(scores)
}

/// Read `query_id <TAB> text` lines; query text is tokenized.
pub fn read_queries<R: BufRead>(reader: R, file: &str) -> Result<Vec<(String, Vec<String>)>> {
    let mut queries = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(file, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.splitn(2, '\t');
        let query_id = parts.next().unwrap_or("").to_string();
        let text = parts
            .next()
            .ok_or_else(|| Error::Parse("expected query_id <TAB> text".into()).at(file, lineno))?;
        if let Some(prev) = seen.insert(query_id.clone(), lineno) {
            return Err(Error::Parse(format!(
                "duplicate query_id {query_id} (first seen on line {prev})"
            ))
            .at(file, lineno));
        }
        queries.push((query_id, tokenize(text)));
    }
    Ok(queries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s)
    }

    /// Three-document micro corpus used throughout: content fields
    /// d1 = "a b a", d2 = "b c", d3 = "a d d"; empty titles.
    fn micro_corpus() -> Vec<TokenizedDocument> {
        vec![
            TokenizedDocument::from_text("d1", "", "a b a").unwrap(),
            TokenizedDocument::from_text("d2", "", "b c").unwrap(),
            TokenizedDocument::from_text("d3", "", "a d d").unwrap(),
        ]
    }

    #[test]
    fn tokenizer_lowercases_and_splits_on_non_alphanumeric() {
        assert_eq!(toks("Hello, World!"), vec!["hello", "world"]);
        assert_eq!(toks("a-b_c.d"), vec!["a", "b", "c", "d"]);
        assert_eq!(toks("  "), Vec::<String>::new());
        assert_eq!(toks("x1 2y"), vec!["x1", "2y"]);
    }

    #[test]
    fn corpus_stats_direct_counting() {
        let docs = micro_corpus();
        let stats = CorpusStats::build(&docs).unwrap();
        assert_eq!(stats.n_docs(), 3);
        assert_eq!(stats.df(Field::Content, "a"), 2);
        assert_eq!(stats.df(Field::Content, "b"), 2);
        assert_eq!(stats.df(Field::Content, "c"), 1);
        assert_eq!(stats.df(Field::Content, "d"), 1);
        assert_eq!(stats.avgdl(Field::Content), 8.0 / 3.0);
    }

    #[test]
    fn corpus_stats_single_doc() {
        let docs = vec![TokenizedDocument::from_text("d", "", "x").unwrap()];
        let stats = CorpusStats::build(&docs).unwrap();
        assert_eq!(stats.df(Field::Content, "x"), 1);
        assert_eq!(stats.avgdl(Field::Content), 1.0);
    }

    #[test]
    fn corpus_stats_empty_titles() {
        let docs = micro_corpus();
        let stats = CorpusStats::build(&docs).unwrap();
        assert_eq!(stats.avgdl(Field::Title), 0.0);
        assert_eq!(stats.total_len(Field::Title), 0);
        assert_eq!(stats.df(Field::Title, "a"), 0);
    }

    #[test]
    fn corpus_stats_empty_corpus_errors() {
        let docs: Vec<TokenizedDocument> = vec![];
        assert!(matches!(CorpusStats::build(&docs), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn df_monotone_under_document_addition() {
        let mut docs = micro_corpus();
        let before = CorpusStats::build(&docs).unwrap();
        docs.push(TokenizedDocument::from_text("d4", "a", "a c e").unwrap());
        let after = CorpusStats::build(&docs).unwrap();
        for token in ["a", "b", "c", "d", "e"] {
            for field in [Field::Title, Field::Content] {
                assert!(after.df(field, token) >= before.df(field, token));
            }
        }
    }

    #[test]
    fn sum_tf_examples() {
        let field = toks("a b a");
        assert_eq!(sum_tf(&toks("a"), &field), 2.0);
        assert_eq!(sum_tf(&toks("a b"), &field), 3.0);
        assert_eq!(sum_tf(&toks("z"), &field), 0.0);
    }

    #[test]
    fn idf_examples() {
        let stats = CorpusStats::build(&micro_corpus()).unwrap();
        // N=3, df=1
        assert!((stats.idf(Field::Content, "d") - 0.5108256237659907).abs() < 1e-12);
        // N=3, df=2: negative log floored to 0
        assert_eq!(stats.idf(Field::Content, "a"), 0.0);
        // absent token, df=0: ln(3.5/0.5)
        assert!((stats.idf(Field::Content, "zz") - 1.9459101490553132).abs() < 1e-12);
    }

    #[test]
    fn bm25_micro_corpus_oracle() {
        let docs = micro_corpus();
        let stats = CorpusStats::build(&docs).unwrap();
        let params = Bm25Params::default();
        // q={d} on d3: idf=ln(2.5/1.5), tf=2, dl=3, avgdl=8/3
        let score = bm25(&toks("d"), &docs[2].content_tokens, Field::Content, &stats, &params).unwrap();
        assert!((score - 0.7527956560761968).abs() < 1e-12);
        // absent term contributes 0
        let score = bm25(&toks("z"), &docs[2].content_tokens, Field::Content, &stats, &params).unwrap();
        assert_eq!(score, 0.0);
        // q={a}: idf floored to 0 -> score 0
        let score = bm25(&toks("a"), &docs[2].content_tokens, Field::Content, &stats, &params).unwrap();
        assert_eq!(score, 0.0);
    }

    #[test]
    fn bm25_duplicate_query_terms_are_inert_with_k3_zero() {
        let docs = micro_corpus();
        let stats = CorpusStats::build(&docs).unwrap();
        let params = Bm25Params::default();
        let single = bm25(&toks("d"), &docs[2].content_tokens, Field::Content, &stats, &params).unwrap();
        let tripled = bm25(&toks("d d d"), &docs[2].content_tokens, Field::Content, &stats, &params).unwrap();
        assert_eq!(single, tripled);
    }

    #[test]
    fn bm25_degenerate_field_errors() {
        let docs = micro_corpus();
        let stats = CorpusStats::build(&docs).unwrap();
        let err = bm25(&toks("a"), &docs[0].title_tokens, Field::Title, &stats, &Bm25Params::default());
        assert!(matches!(err, Err(Error::DegenerateField { field: "title" })));
    }

    #[test]
    fn bm25_non_negative() {
        let docs = micro_corpus();
        let stats = CorpusStats::build(&docs).unwrap();
        let params = Bm25Params::default();
        for q in ["a", "b", "c", "d", "a b c d", "z"] {
            for doc in &docs {
                let s = bm25(&toks(q), &doc.content_tokens, Field::Content, &stats, &params).unwrap();
                assert!(s >= 0.0, "bm25({q}) = {s}");
            }
        }
    }

    #[test]
    fn extract_features_pagerank_scaling() {
        let docs = micro_corpus();
        let stats = CorpusStats::build(&docs).unwrap();
        let v = extract_content_features(&toks("a"), &docs[0], &stats, &Bm25Params::default(), 2e-6).unwrap();
        assert!((v.values[0] - 0.2).abs() < 1e-12);
        assert_eq!(v.stage, FeatureStage::Raw);
    }

    #[test]
    fn extract_features_empty_query() {
        let docs = micro_corpus();
        let stats = CorpusStats::build(&docs).unwrap();
        let v = extract_content_features(&[], &docs[0], &stats, &Bm25Params::default(), 0.0).unwrap();
        // lengths unchanged, all query-dependent features 0
        assert_eq!(v.values[1], 3.0);
        for i in [2, 3, 4, 5, 7, 8, 9, 10] {
            assert_eq!(v.values[i], 0.0);
        }
    }

    #[test]
    fn extract_features_missing_title_zeroes_title_block() {
        let docs = micro_corpus();
        let stats = CorpusStats::build(&docs).unwrap();
        let v = extract_content_features(&toks("a"), &docs[0], &stats, &Bm25Params::default(), 0.0).unwrap();
        for i in 6..11 {
            assert_eq!(v.values[i], 0.0, "feature {}", i + 1);
        }
    }

    #[test]
    fn extract_features_is_pure() {
        let docs = micro_corpus();
        let stats = CorpusStats::build(&docs).unwrap();
        let a = extract_content_features(&toks("a d"), &docs[2], &stats, &Bm25Params::default(), 3e-7).unwrap();
        let b = extract_content_features(&toks("a d"), &docs[2], &stats, &Bm25Params::default(), 3e-7).unwrap();
        for (x, y) in a.values.iter().zip(b.values.iter()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn log_transform_examples() {
        let raw = ContentFeatureVector {
            values: [0.0, std::f64::consts::E - 1.0, -0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            stage: FeatureStage::Raw,
        };
        let logged = log_transform(&raw).unwrap();
        assert_eq!(logged.values[0], 0.0);
        assert!((logged.values[1] - 1.0).abs() < 1e-12);
        assert_eq!(logged.values[2], 0.0); // clamped
        assert_eq!(logged.stage, FeatureStage::Logged);
        assert!(log_transform(&logged).is_err());
    }

    fn logged_row(qid: &str, did: &str, first: f64) -> (String, String, ContentFeatureVector) {
        let mut values = [0.0; CONTENT_FEATURE_COUNT];
        values[0] = first;
        (
            qid.to_string(),
            did.to_string(),
            ContentFeatureVector {
                values,
                stage: FeatureStage::Logged,
            },
        )
    }

    #[test]
    fn normalize_per_query_examples() {
        let rows = vec![
            logged_row("q1", "a", 1.0),
            logged_row("q1", "b", 3.0),
            logged_row("q2", "c", 1.0),
            logged_row("q2", "d", 2.0),
            logged_row("q2", "e", 3.0),
        ];
        let out = normalize_per_query(&rows).unwrap();
        assert_eq!(out[0].2.values[0], 0.0);
        assert_eq!(out[1].2.values[0], 1.0);
        assert_eq!(out[2].2.values[0], 0.0);
        assert_eq!(out[3].2.values[0], 0.5);
        assert_eq!(out[4].2.values[0], 1.0);
        // constant columns (all the other features are 0 everywhere) map to 0
        for (_, _, v) in &out {
            assert_eq!(v.stage, FeatureStage::Normalized);
            for x in &v.values[1..] {
                assert_eq!(*x, 0.0);
            }
        }
    }

    #[test]
    fn normalize_preserves_ordering_and_range() {
        let rows = vec![
            logged_row("q", "a", 0.3),
            logged_row("q", "b", 2.1),
            logged_row("q", "c", 1.4),
            logged_row("q", "d", 0.9),
        ];
        let out = normalize_per_query(&rows).unwrap();
        let before: Vec<f64> = rows.iter().map(|r| r.2.values[0]).collect();
        let after: Vec<f64> = out.iter().map(|r| r.2.values[0]).collect();
        for i in 0..before.len() {
            for j in 0..before.len() {
                assert_eq!(
                    before[i].partial_cmp(&before[j]),
                    after[i].partial_cmp(&after[j])
                );
            }
            assert!((0.0..=1.0).contains(&after[i]));
        }
    }

    #[test]
    fn read_corpus_round_trip_and_errors() {
        let input = "d1\tA Title\tsome content here\nd2\t\tmore text\n";
        let docs = read_corpus(input.as_bytes(), "corpus.tsv").unwrap();
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[0].title_tokens, vec!["a", "title"]);
        assert!(docs[1].title_tokens.is_empty());

        let bad = "d1 only one field\n";
        let err = read_corpus(bad.as_bytes(), "corpus.tsv").unwrap_err();
        assert!(err.to_string().contains("corpus.tsv:1"));

        let dup = "d1\tt\tc\nd1\tt\tc\n";
        let err = read_corpus(dup.as_bytes(), "corpus.tsv").unwrap_err();
        assert!(err.to_string().contains("duplicate doc_id"));
    }

    #[test]
    fn read_pagerank_parses_scores() {
        let input = "d1\t0.000002\nd2\t1e-7\n";
        let pr = read_pagerank(input.as_bytes(), "pagerank.tsv").unwrap();
        assert_eq!(pr["d1"], 2e-6);
        assert_eq!(pr["d2"], 1e-7);
    }

    #[test]
    fn read_queries_tokenizes_text() {
        let input = "201\traspberry pi\n202\tUSS Carl Vinson\n";
        let qs = read_queries(input.as_bytes(), "queries.tsv").unwrap();
        assert_eq!(qs[0], ("201".to_string(), vec!["raspberry".to_string(), "pi".to_string()]));
        assert_eq!(qs[1].1, vec!["uss", "carl", "vinson"]);
    }
}
