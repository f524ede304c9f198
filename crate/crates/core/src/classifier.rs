//! Skill-sentence classifier.
//!
//! Sentences are embedded as the mean of their word vectors and character
//! n-gram (subword) vectors; a two-class softmax layer sits on top. Word and
//! subword vectors are trained jointly with the linear layer by SGD on
//! class-weighted cross-entropy. Subwords are taken from `<token>` so prefix
//! and suffix n-grams are distinct, which lets unseen words borrow vectors
//! from known words that share fragments.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::CleanSentence;
use crate::vacancy::{Label, LabeledSentence};

const MAGIC: &str = "SKILLREC-CLASSIFIER";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub dim: usize,
    pub min_n: usize,
    pub max_n: usize,
    pub epochs: usize,
    /// Initial learning rate; decays linearly to zero over training.
    pub lr: f64,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            dim: 50,
            min_n: 3,
            max_n: 6,
            epochs: 5,
            lr: 0.1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingTable {
    pub dimension: usize,
    pub word_vectors: BTreeMap<String, Vec<f64>>,
    pub subword_vectors: BTreeMap<String, Vec<f64>>,
    pub ngram_range: (usize, usize),
}

impl EmbeddingTable {
    pub fn empty(dimension: usize, ngram_range: (usize, usize)) -> Self {
        EmbeddingTable {
            dimension,
            word_vectors: BTreeMap::new(),
            subword_vectors: BTreeMap::new(),
            ngram_range,
        }
    }

    /// All vectors that contribute to a token: its word vector if known, then
    /// every known subword vector.
    fn token_vectors<'a>(&'a self, token: &str, out: &mut Vec<&'a [f64]>) {
        if let Some(v) = self.word_vectors.get(token) {
            out.push(v);
        }
        for gram in subwords(token, self.ngram_range.0, self.ngram_range.1) {
            if let Some(v) = self.subword_vectors.get(&gram) {
                out.push(v);
            }
        }
    }
}

/// Character n-grams of `<token>` with lengths in `min_n..=max_n`.
pub fn subwords(token: &str, min_n: usize, max_n: usize) -> Vec<String> {
    let chars: Vec<char> = std::iter::once('<')
        .chain(token.chars())
        .chain(std::iter::once('>'))
        .collect();
    let mut out = Vec::new();
    for start in 0..chars.len() {
        for n in min_n..=max_n {
            if start + n > chars.len() {
                break;
            }
            out.push(chars[start..start + n].iter().collect());
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    pub embeddings: EmbeddingTable,
    /// One row per class, indexed by [`Label::as_index`].
    pub weights: [Vec<f64>; 2],
    pub bias: [f64; 2],
    pub training_meta: TrainingMeta,
}

pub fn softmax(logits: [f64; 2]) -> [f64; 2] {
    let max = logits[0].max(logits[1]);
    let e0 = (logits[0] - max).exp();
    let e1 = (logits[1] - max).exp();
    let sum = e0 + e1;
    [e0 / sum, e1 / sum]
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Per-class loss weights, `n / (2 * n_c)`, so both classes carry equal total weight.
pub fn class_weights(data: &[LabeledSentence]) -> Result<[f64; 2]> {
    let mut counts = [0usize; 2];
    for item in data {
        counts[item.label.as_index()] += 1;
    }
    if counts[0] == 0 || counts[1] == 0 {
        return Err(Error::Training(format!(
            "training data must contain both labels (label 0: {}, label 1: {})",
            counts[0], counts[1]
        )));
    }
    let n = data.len() as f64;
    Ok([n / (2.0 * counts[0] as f64), n / (2.0 * counts[1] as f64)])
}

impl ClassifierModel {
    pub fn dimension(&self) -> usize {
        self.embeddings.dimension
    }

    /// Mean of every known word and subword vector of the sentence's tokens;
    /// the zero vector when nothing is known.
    pub fn embed_sentence(&self, sentence: &CleanSentence) -> Vec<f64> {
        let mut vectors = Vec::new();
        for token in &sentence.tokens {
            self.embeddings.token_vectors(token, &mut vectors);
        }
        let mut mean = vec![0.0; self.dimension()];
        if vectors.is_empty() {
            return mean;
        }
        for v in &vectors {
            for (m, x) in mean.iter_mut().zip(v.iter()) {
                *m += x;
            }
        }
        let n = vectors.len() as f64;
        mean.iter_mut().for_each(|m| *m /= n);
        mean
    }

    fn logits(&self, hidden: &[f64]) -> [f64; 2] {
        [
            dot(&self.weights[0], hidden) + self.bias[0],
            dot(&self.weights[1], hidden) + self.bias[1],
        ]
    }

    /// Class probabilities; `[0.5, 0.5]` when the sentence has no known features.
    pub fn probabilities(&self, sentence: &CleanSentence) -> [f64; 2] {
        let mut vectors = Vec::new();
        for token in &sentence.tokens {
            self.embeddings.token_vectors(token, &mut vectors);
        }
        if vectors.is_empty() {
            return [0.5, 0.5];
        }
        softmax(self.logits(&self.embed_sentence(sentence)))
    }

    /// Predicted label and its probability. Ties and featureless sentences
    /// resolve to label 0.
    pub fn predict(&self, sentence: &CleanSentence) -> (Label, f64) {
        let p = self.probabilities(sentence);
        if p[1] > p[0] {
            (Label::Skill, p[1])
        } else {
            (Label::Other, p[0])
        }
    }

    /// Class-weighted cross-entropy summed over `data`, and its gradient with
    /// respect to the output weights and bias.
    pub fn loss_and_output_gradient(
        &self,
        data: &[LabeledSentence],
        weights: [f64; 2],
    ) -> (f64, [Vec<f64>; 2], [f64; 2]) {
        let dim = self.dimension();
        let mut loss = 0.0;
        let mut grad_w = [vec![0.0; dim], vec![0.0; dim]];
        let mut grad_b = [0.0; 2];
        for item in data {
            let hidden = self.embed_sentence(&item.sentence);
            let p = softmax(self.logits(&hidden));
            let y = item.label.as_index();
            let w = weights[y];
            loss -= w * p[y].ln();
            for c in 0..2 {
                let g = w * (p[c] - if c == y { 1.0 } else { 0.0 });
                grad_b[c] += g;
                for (gw, h) in grad_w[c].iter_mut().zip(&hidden) {
                    *gw += g * h;
                }
            }
        }
        (loss, grad_w, grad_b)
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let join = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(out, "{MAGIC} {FORMAT_VERSION}")?;
        writeln!(out, "dim {}", self.dimension())?;
        writeln!(
            out,
            "ngram {} {}",
            self.embeddings.ngram_range.0, self.embeddings.ngram_range.1
        )?;
        let meta = &self.training_meta;
        writeln!(out, "meta {} {} {}", meta.epochs, meta.learning_rate, meta.seed)?;
        writeln!(out, "bias {} {}", self.bias[0], self.bias[1])?;
        writeln!(out, "weight0 {}", join(&self.weights[0]))?;
        writeln!(out, "weight1 {}", join(&self.weights[1]))?;
        writeln!(out, "words {}", self.embeddings.word_vectors.len())?;
        for (k, v) in &self.embeddings.word_vectors {
            writeln!(out, "{k} {}", join(v))?;
        }
        writeln!(out, "subwords {}", self.embeddings.subword_vectors.len())?;
        for (k, v) in &self.embeddings.subword_vectors {
            writeln!(out, "{k} {}", join(v))?;
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let mut line_no = 0usize;
        let mut next = |what: &str| -> Result<String> {
            line_no += 1;
            lines
                .next()
                .ok_or_else(|| Error::ModelFormat(format!("unexpected end of file, expected {what}")))?
                .map_err(|e| Error::ModelFormat(format!("line {line_no}: {e}")))
        };
        let header = next("header")?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some(MAGIC) {
            return Err(Error::ModelFormat("missing magic header".into()));
        }
        let version: u32 = parse_field(parts.next(), "version")?;
        if version != FORMAT_VERSION {
            return Err(Error::ModelFormat(format!(
                "unsupported model version {version} (expected {FORMAT_VERSION})"
            )));
        }
        let dim: usize = keyed(&next("dim")?, "dim")?[0].parse_usize()?;
        if dim == 0 {
            return Err(Error::ModelFormat("dimension must be positive".into()));
        }
        let ngram = keyed(&next("ngram")?, "ngram")?;
        let ngram_range = (ngram.get_usize(0)?, ngram.get_usize(1)?);
        let meta = keyed(&next("meta")?, "meta")?;
        let training_meta = TrainingMeta {
            epochs: meta.get_usize(0)?,
            learning_rate: meta.get_f64(1)?,
            seed: meta.get(2)?.parse().map_err(|_| Error::ModelFormat("bad seed".into()))?,
        };
        let bias = keyed(&next("bias")?, "bias")?;
        let bias = [bias.get_f64(0)?, bias.get_f64(1)?];
        let w0 = keyed(&next("weight0")?, "weight0")?.floats(dim)?;
        let w1 = keyed(&next("weight1")?, "weight1")?.floats(dim)?;

        let mut read_table = |name: &str| -> Result<BTreeMap<String, Vec<f64>>> {
            let count = keyed(&next(name)?, name)?.get_usize(0)?;
            let mut table = BTreeMap::new();
            for _ in 0..count {
                let line = next("vector")?;
                let (key, rest) = line
                    .split_once(' ')
                    .ok_or_else(|| Error::ModelFormat(format!("malformed {name} entry")))?;
                let values = Fields(rest.split(' ').map(str::to_string).collect()).floats(dim)?;
                if table.insert(key.to_string(), values).is_some() {
                    return Err(Error::ModelFormat(format!("duplicate {name} key `{key}`")));
                }
            }
            Ok(table)
        };
        let word_vectors = read_table("words")?;
        let subword_vectors = read_table("subwords")?;
        Ok(ClassifierModel {
            embeddings: EmbeddingTable {
                dimension: dim,
                word_vectors,
                subword_vectors,
                ngram_range,
            },
            weights: [w0, w1],
            bias,
            training_meta,
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(std::io::BufReader::new(file))
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }
}

struct Fields(Vec<String>);

trait ParseUsize {
    fn parse_usize(&self) -> Result<usize>;
}

impl ParseUsize for String {
    fn parse_usize(&self) -> Result<usize> {
        self.parse()
            .map_err(|_| Error::ModelFormat(format!("expected integer, got `{self}`")))
    }
}

impl std::ops::Index<usize> for Fields {
    type Output = String;
    fn index(&self, i: usize) -> &String {
        &self.0[i]
    }
}

impl Fields {
    fn get(&self, i: usize) -> Result<&String> {
        self.0
            .get(i)
            .ok_or_else(|| Error::ModelFormat(format!("missing field {i}")))
    }

    fn get_usize(&self, i: usize) -> Result<usize> {
        self.get(i)?.parse_usize()
    }

    fn get_f64(&self, i: usize) -> Result<f64> {
        let raw = self.get(i)?;
        raw.parse()
            .map_err(|_| Error::ModelFormat(format!("expected number, got `{raw}`")))
    }

    fn floats(&self, dim: usize) -> Result<Vec<f64>> {
        if self.0.len() != dim {
            return Err(Error::ModelFormat(format!(
                "expected {dim} values, found {}",
                self.0.len()
            )));
        }
        (0..dim).map(|i| self.get_f64(i)).collect()
    }
}

fn keyed(line: &str, key: &str) -> Result<Fields> {
    let mut parts = line.split(' ');
    if parts.next() != Some(key) {
        return Err(Error::ModelFormat(format!("expected `{key}` line, got `{line}`")));
    }
    let fields: Vec<String> = parts.map(str::to_string).collect();
    if fields.is_empty() {
        return Err(Error::ModelFormat(format!("`{key}` line has no values")));
    }
    Ok(Fields(fields))
}

fn parse_field<T: std::str::FromStr>(raw: Option<&str>, what: &str) -> Result<T> {
    raw.and_then(|r| r.parse().ok())
        .ok_or_else(|| Error::ModelFormat(format!("bad or missing {what}")))
}

/// Trains embeddings and the softmax layer jointly. Deterministic for a given
/// seed and data order.
pub fn train_classifier(data: &[LabeledSentence], hyper: &Hyperparams) -> Result<ClassifierModel> {
    if data.is_empty() {
        return Err(Error::Training("no training data".into()));
    }
    if hyper.dim < 2 {
        return Err(Error::Training(format!("dimension must be >= 2, got {}", hyper.dim)));
    }
    if hyper.min_n == 0 || hyper.min_n > hyper.max_n {
        return Err(Error::Training(format!(
            "invalid n-gram range ({}, {})",
            hyper.min_n, hyper.max_n
        )));
    }
    if !(hyper.lr > 0.0) || hyper.epochs == 0 {
        return Err(Error::Training("learning rate and epochs must be positive".into()));
    }
    let class_w = class_weights(data)?;

    let mut words = BTreeMap::new();
    let mut grams = BTreeMap::new();
    for item in data {
        for token in &item.sentence.tokens {
            words.entry(token.clone()).or_insert(0usize);
            for g in subwords(token, hyper.min_n, hyper.max_n) {
                grams.entry(g).or_insert(0usize);
            }
        }
    }
    let n_words = words.len();
    for (i, v) in words.values_mut().enumerate() {
        *v = i;
    }
    for (i, v) in grams.values_mut().enumerate() {
        *v = n_words + i;
    }

    let dim = hyper.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
    let bound = 1.0 / dim as f64;
    let mut input: Vec<Vec<f64>> = (0..n_words + grams.len())
        .map(|_| (0..dim).map(|_| rng.gen_range(-bound..bound)).collect())
        .collect();

    let features: Vec<Vec<usize>> = data
        .iter()
        .map(|item| {
            let mut f = Vec::new();
            for token in &item.sentence.tokens {
                f.push(words[token]);
                for g in subwords(token, hyper.min_n, hyper.max_n) {
                    f.push(grams[&g]);
                }
            }
            f
        })
        .collect();

    let mut weights = [vec![0.0; dim], vec![0.0; dim]];
    let mut bias = [0.0; 2];
    let total_steps = (hyper.epochs * data.len()) as f64;
    let mut step = 0usize;
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut hidden = vec![0.0; dim];
    let mut grad_hidden = vec![0.0; dim];
    for _ in 0..hyper.epochs {
        order.shuffle(&mut rng);
        for &idx in &order {
            let lr = hyper.lr * (1.0 - step as f64 / total_steps);
            step += 1;
            let feats = &features[idx];
            if feats.is_empty() {
                continue;
            }
            hidden.iter_mut().for_each(|h| *h = 0.0);
            for &f in feats {
                for (h, x) in hidden.iter_mut().zip(&input[f]) {
                    *h += x;
                }
            }
            let n = feats.len() as f64;
            hidden.iter_mut().for_each(|h| *h /= n);

            let logits = [
                dot(&weights[0], &hidden) + bias[0],
                dot(&weights[1], &hidden) + bias[1],
            ];
            let p = softmax(logits);
            let y = data[idx].label.as_index();
            grad_hidden.iter_mut().for_each(|g| *g = 0.0);
            for c in 0..2 {
                let g = class_w[y] * (p[c] - if c == y { 1.0 } else { 0.0 });
                for ((gh, w), h) in grad_hidden.iter_mut().zip(weights[c].iter_mut()).zip(&hidden) {
                    *gh += g * *w;
                    *w -= lr * g * h;
                }
                bias[c] -= lr * g;
            }
            for &f in feats {
                for (x, g) in input[f].iter_mut().zip(&grad_hidden) {
                    *x -= lr * g / n;
                }
            }
        }
    }

    let mut vectors = input.into_iter();
    let word_vectors = words
        .into_keys()
        .map(|k| (k, vectors.next().expect("one vector per word")))
        .collect();
    let subword_vectors = grams
        .into_keys()
        .map(|k| (k, vectors.next().expect("one vector per subword")))
        .collect();
    Ok(ClassifierModel {
        embeddings: EmbeddingTable {
            dimension: dim,
            word_vectors,
            subword_vectors,
            ngram_range: (hyper.min_n, hyper.max_n),
        },
        weights,
        bias,
        training_meta: TrainingMeta {
            epochs: hyper.epochs,
            learning_rate: hyper.lr,
            seed: hyper.seed,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub balanced_accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    /// `confusion[actual][predicted]`.
    pub confusion: [[usize; 2]; 2],
}

impl EvalReport {
    pub fn from_confusion(confusion: [[usize; 2]; 2]) -> Result<Self> {
        let [[tn, fp], [fn_, tp]] = confusion;
        if tp + fn_ == 0 || tn + fp == 0 {
            return Err(Error::Evaluation(
                "test set must contain both classes".into(),
            ));
        }
        let recall = tp as f64 / (tp + fn_) as f64;
        let recall_neg = tn as f64 / (tn + fp) as f64;
        let precision = if tp + fp == 0 {
            0.0
        } else {
            tp as f64 / (tp + fp) as f64
        };
        Ok(EvalReport {
            balanced_accuracy: (recall + recall_neg) / 2.0,
            precision,
            recall,
            confusion,
        })
    }

    pub fn total(&self) -> usize {
        self.confusion.iter().flatten().sum()
    }
}

pub fn evaluate(model: &ClassifierModel, test: &[LabeledSentence]) -> Result<EvalReport> {
    let mut confusion = [[0usize; 2]; 2];
    for item in test {
        let (pred, _) = model.predict(&item.sentence);
        confusion[item.label.as_index()][pred.as_index()] += 1;
    }
    EvalReport::from_confusion(confusion)
}

/// Shuffles with `seed` and holds out `test_fraction` of each class.
pub fn split_train_test(
    data: &[LabeledSentence],
    test_fraction: f64,
    seed: u64,
) -> (Vec<LabeledSentence>, Vec<LabeledSentence>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for label in [Label::Other, Label::Skill] {
        let mut items: Vec<&LabeledSentence> = data.iter().filter(|d| d.label == label).collect();
        items.shuffle(&mut rng);
        let n_test = (items.len() as f64 * test_fraction).round() as usize;
        for (i, item) in items.into_iter().enumerate() {
            if i < n_test {
                test.push(item.clone());
            } else {
                train.push(item.clone());
            }
        }
    }
    train.shuffle(&mut rng);
    (train, test)
}
