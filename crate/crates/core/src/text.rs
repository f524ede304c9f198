//! Sentence preprocessing for vacancy text.
//!
//! The pipeline deletes punctuation, bullets and digit-only tokens, drops stop
//! words and function words (conjunctions, articles, prepositions), splits
//! sentences, lowercases, and reduces each token to a lemma with a small set of
//! suffix rules. Stop-word lists ship in `data/` so results are stable.

use std::collections::HashSet;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

const STOPWORDS: &str = include_str!("../data/stopwords.txt");
const FUNCTION_WORDS: &str = include_str!("../data/function_words.txt");

/// A preprocessed sentence: lemma tokens plus where they came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanSentence {
    pub tokens: Vec<String>,
    pub source_vacancy: String,
    pub source_heading: Option<String>,
}

impl CleanSentence {
    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        CleanSentence {
            tokens: tokens.into_iter().map(Into::into).collect(),
            source_vacancy: String::new(),
            source_heading: None,
        }
    }

    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }
}

fn stop_set() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| {
        STOPWORDS
            .lines()
            .chain(FUNCTION_WORDS.lines())
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect()
    })
}

/// True if `word` (any case) is removed by the stop-word or function-word filters.
pub fn is_stop_word(word: &str) -> bool {
    stop_set().contains(word.to_lowercase().as_str())
}

/// Splits raw text into sentence fragments on `.`, `!`, `?`, `;` and line breaks.
pub fn split_sentences(text: &str) -> impl Iterator<Item = &str> {
    text.split(['.', '!', '?', ';', '\n', '\r'])
        .filter(|s| !s.trim().is_empty())
}

/// Runs the full preprocessing pipeline and returns non-empty sentences with
/// no provenance attached.
pub fn preprocess(text: &str) -> Vec<CleanSentence> {
    preprocess_with_source(text, "", None)
}

pub fn preprocess_with_source(
    text: &str,
    vacancy_id: &str,
    heading: Option<&str>,
) -> Vec<CleanSentence> {
    split_sentences(text)
        .filter_map(|fragment| {
            let tokens = clean_fragment(fragment);
            (!tokens.is_empty()).then(|| CleanSentence {
                tokens,
                source_vacancy: vacancy_id.to_string(),
                source_heading: heading.map(str::to_string),
            })
        })
        .collect()
}

fn clean_fragment(fragment: &str) -> Vec<String> {
    // Apostrophes join ("don't" -> "dont"); every other non-alphanumeric
    // character separates tokens.
    let stripped: String = fragment
        .chars()
        .filter(|c| *c != '\'' && *c != '\u{2019}')
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect();

    stripped
        .split_whitespace()
        .filter(|t| !t.chars().all(|c| c.is_ascii_digit()))
        .filter(|t| !is_stop_word(t))
        .map(str::to_lowercase)
        .map(|t| lemmatize(&t))
        .filter(|t| !t.is_empty() && !stop_set().contains(t.as_str()))
        .collect()
}

fn is_vowel(c: u8) -> bool {
    matches!(c, b'a' | b'e' | b'i' | b'o' | b'u')
}

fn has_vowel(s: &str) -> bool {
    s.bytes().any(|b| is_vowel(b) || b == b'y')
}

/// Reduces a lowercase word to its lemma with suffix-stripping rules.
///
/// Rules are applied until nothing changes; every rule shortens the word, so
/// the loop terminates and the result is a fixed point.
pub fn lemmatize(word: &str) -> String {
    let mut current = word.to_string();
    loop {
        let next = lemmatize_once(&current);
        if next == current {
            return current;
        }
        current = next;
    }
}

fn lemmatize_once(word: &str) -> String {
    if !word.is_ascii() || word.len() < 4 {
        return word.to_string();
    }
    if let Some(stem) = word.strip_suffix("ies") {
        if stem.len() >= 2 {
            return format!("{stem}y");
        }
    }
    if let Some(stem) = word.strip_suffix("es") {
        if stem.ends_with("ss")
            || stem.ends_with('x')
            || stem.ends_with("ch")
            || stem.ends_with("sh")
        {
            return stem.to_string();
        }
    }
    if word.ends_with('s')
        && !word.ends_with("ss")
        && !word.ends_with("us")
        && !word.ends_with("is")
        && !word.ends_with("ous")
    {
        return word[..word.len() - 1].to_string();
    }
    if let Some(stem) = word.strip_suffix("ing") {
        if let Some(lemma) = verb_stem(stem) {
            return lemma;
        }
    }
    if let Some(stem) = word.strip_suffix("ed") {
        if !stem.ends_with('e') {
            if let Some(lemma) = verb_stem(stem) {
                return lemma;
            }
        }
    }
    word.to_string()
}

/// Restores a verb stem after "-ing"/"-ed" removal: undoubles a final double
/// consonant, or restores a silent "e" after endings that normally carry one.
fn verb_stem(stem: &str) -> Option<String> {
    if stem == "us" {
        return Some("use".to_string());
    }
    if stem.len() < 3 || !has_vowel(stem) {
        return None;
    }
    let bytes = stem.as_bytes();
    let last = bytes[bytes.len() - 1];
    let prev = bytes[bytes.len() - 2];
    if last == prev && !is_vowel(last) && !matches!(last, b'l' | b's' | b'z' | b'f') {
        return Some(stem[..stem.len() - 1].to_string());
    }
    const E_ENDINGS: [&str; 19] = [
        "at", "iz", "bl", "dl", "tl", "ir", "ur", "iv", "ag", "eng", "chang", "rang", "nc", "rc",
        "uc", "ov", "lv", "rv", "ys",
    ];
    const NO_E: [&str; 8] = ["treat", "peat", "heat", "beat", "seat", "float", "boat", "coat"];
    let short_cvc = stem.len() == 3
        && !is_vowel(bytes[0])
        && (is_vowel(bytes[1]) || bytes[1] == b'y')
        && !is_vowel(last)
        && !matches!(last, b'w' | b'x' | b'y');
    let needs_e = short_cvc
        || E_ENDINGS.iter().any(|e| stem.ends_with(e)) && !NO_E.iter().any(|e| stem.ends_with(e))
        || (stem.ends_with('c') && !stem.ends_with("ic"));
    if needs_e {
        Some(format!("{stem}e"))
    } else {
        Some(stem.to_string())
    }
}
