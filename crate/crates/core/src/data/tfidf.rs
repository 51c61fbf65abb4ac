use std::collections::HashMap;

use crate::error::{Error, Result};

use super::sparse::{SparseMatrix, SparseRow};

/// Term weighting applied to each document row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Weighting {
    /// `tf · ln(N / (1 + df))`
    #[default]
    TfIdf,
    /// Relative term frequency only.
    Tf,
}

const STOP_WORDS: &[&str] = &[
    "a", "an", "and", "are", "as", "at", "be", "by", "for", "from", "has", "in", "is", "it", "its", "of", "on", "or",
    "that", "the", "this", "to", "was", "were", "with",
];

/// Lower-cases, splits on non-alphanumeric characters and drops a small
/// fixed list of English stop words.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .filter(|t| !STOP_WORDS.contains(&t.as_str()))
        .collect()
}

/// Vectorises token sequences over the `vocab_size` most frequent tokens of
/// the corpus (ties broken lexicographically).
///
/// `tf(t, d) = count(t, d) / |d|` where `|d|` counts every token of the
/// document, and `idf(t) = ln(N / (1 + df(t)))`. Returns the rows, one per
/// document, and the vocabulary in column order.
pub fn tfidf_vectorize<S: AsRef<str>>(
    documents: &[Vec<S>],
    vocab_size: usize,
    weighting: Weighting,
) -> Result<(SparseMatrix, Vec<String>)> {
    if documents.iter().all(|d| d.is_empty()) {
        return Err(Error::EmptyCorpus);
    }
    let mut frequency: HashMap<&str, usize> = HashMap::new();
    let mut document_frequency: HashMap<&str, usize> = HashMap::new();
    for doc in documents {
        let mut seen: Vec<&str> = Vec::new();
        for token in doc {
            let t = token.as_ref();
            *frequency.entry(t).or_default() += 1;
            if !seen.contains(&t) {
                seen.push(t);
            }
        }
        for t in seen {
            *document_frequency.entry(t).or_default() += 1;
        }
    }

    let mut ranked: Vec<(&str, usize)> = frequency.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.truncate(vocab_size);
    let vocabulary: Vec<String> = ranked.iter().map(|(t, _)| t.to_string()).collect();
    let column: HashMap<&str, usize> = ranked.iter().enumerate().map(|(i, (t, _))| (*t, i)).collect();

    let n_docs = documents.len() as f64;
    let idf: Vec<f64> = ranked
        .iter()
        .map(|(t, _)| (n_docs / (1.0 + document_frequency[t] as f64)).ln())
        .collect();

    let rows = documents
        .iter()
        .map(|doc| {
            let mut counts = vec![0usize; vocabulary.len()];
            for token in doc {
                if let Some(&c) = column.get(token.as_ref()) {
                    counts[c] += 1;
                }
            }
            let len = doc.len() as f64;
            let mut row = SparseRow::default();
            for (c, &count) in counts.iter().enumerate() {
                if count == 0 {
                    continue;
                }
                let tf = count as f64 / len;
                let value = match weighting {
                    Weighting::TfIdf => tf * idf[c],
                    Weighting::Tf => tf,
                };
                if value != 0.0 {
                    row.indices.push(c);
                    row.values.push(value);
                }
            }
            row
        })
        .collect();
    Ok((
        SparseMatrix {
            rows,
            dim: vocabulary.len(),
        },
        vocabulary,
    ))
}
