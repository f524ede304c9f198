//! Skill-term extraction by TFIDF over skill sentences.
//!
//! Each vacancy's skill sentences form one document. Terms are unigrams and
//! within-sentence bigrams; `tf` is the raw count in a document, `idf` is
//! `ln(N / df)`, and a term's score is its TFIDF summed over all documents.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::text::CleanSentence;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkillTerm {
    pub term: String,
    pub tfidf_score: f64,
    pub document_frequency: usize,
}

/// Unigrams and bigrams of one sentence, in order of appearance.
pub fn sentence_terms(tokens: &[String]) -> impl Iterator<Item = String> + '_ {
    tokens
        .iter()
        .cloned()
        .chain(tokens.windows(2).map(|w| format!("{} {}", w[0], w[1])))
}

/// Groups sentences into documents keyed by `source_vacancy`.
pub fn documents(sentences: &[CleanSentence]) -> BTreeMap<&str, Vec<&CleanSentence>> {
    let mut docs: BTreeMap<&str, Vec<&CleanSentence>> = BTreeMap::new();
    for s in sentences {
        docs.entry(s.source_vacancy.as_str()).or_default().push(s);
    }
    docs
}

/// Ranks skill terms by aggregate TFIDF. Terms seen in fewer than `min_df`
/// documents are dropped; ties are broken by the term in ascending order.
pub fn extract_skill_terms(
    skill_sentences: &[CleanSentence],
    min_df: usize,
    top_n: usize,
) -> Vec<SkillTerm> {
    let docs = documents(skill_sentences);
    let n_docs = docs.len() as f64;
    let mut tf_per_doc: Vec<BTreeMap<String, usize>> = Vec::with_capacity(docs.len());
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    for sentences in docs.values() {
        let mut tf: BTreeMap<String, usize> = BTreeMap::new();
        for s in sentences {
            for term in sentence_terms(&s.tokens) {
                *tf.entry(term).or_default() += 1;
            }
        }
        for term in tf.keys() {
            *df.entry(term.clone()).or_default() += 1;
        }
        tf_per_doc.push(tf);
    }

    let mut scores: BTreeMap<&str, f64> = BTreeMap::new();
    for tf in &tf_per_doc {
        for (term, count) in tf {
            let d = df[term];
            if d < min_df.max(1) {
                continue;
            }
            let idf = (n_docs / d as f64).ln();
            *scores.entry(term.as_str()).or_default() += *count as f64 * idf;
        }
    }

    let mut ranked: Vec<SkillTerm> = scores
        .into_iter()
        .map(|(term, score)| SkillTerm {
            term: term.to_string(),
            tfidf_score: score,
            document_frequency: df[term],
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.tfidf_score
            .total_cmp(&a.tfidf_score)
            .then_with(|| a.term.cmp(&b.term))
    });
    ranked.truncate(top_n);
    ranked
}

/// Terms (unigram or bigram) occurring anywhere in the given sentences.
pub fn terms_present<'a, I>(sentences: I) -> BTreeSet<String>
where
    I: IntoIterator<Item = &'a CleanSentence>,
{
    sentences
        .into_iter()
        .flat_map(|s| sentence_terms(&s.tokens).collect::<Vec<_>>())
        .collect()
}

/// Writes `term<TAB>tfidf<TAB>df` lines.
pub fn write_terms<W: Write>(mut out: W, terms: &[SkillTerm]) -> std::io::Result<()> {
    for t in terms {
        writeln!(out, "{}\t{}\t{}", t.term, t.tfidf_score, t.document_frequency)?;
    }
    Ok(())
}

pub fn read_terms(input: &str) -> crate::Result<Vec<SkillTerm>> {
    input
        .lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, line)| {
            let bad = || crate::Error::Ingest(format!("skill-term line {}: `{line}`", i + 1));
            let mut parts = line.split('\t');
            let term = parts.next().ok_or_else(bad)?.to_string();
            let tfidf_score = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let document_frequency = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            Ok(SkillTerm {
                term,
                tfidf_score,
                document_frequency,
            })
        })
        .collect()
}
