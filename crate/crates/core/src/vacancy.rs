//! Vacancy corpus loading, section detection and sentence labeling.

use std::collections::HashSet;
use std::io::{BufRead, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{preprocess_with_source, CleanSentence};

/// A section of a vacancy announcement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    /// Normalized heading (lowercase, no trailing colon); `None` for text
    /// preceding the first heading.
    pub heading: Option<String>,
    /// The heading line exactly as it appeared in the body.
    pub raw_heading: Option<String>,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawVacancy {
    pub id: String,
    pub job_title: String,
    /// Normalized region key, see [`normalize_location`].
    pub location: String,
    pub posted_date: NaiveDate,
    pub body: String,
    pub sections: Vec<Section>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Other = 0,
    Skill = 1,
}

impl Label {
    pub fn as_index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Label> {
        match i {
            0 => Some(Label::Other),
            1 => Some(Label::Skill),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledSentence {
    pub sentence: CleanSentence,
    pub label: Label,
}

/// CSV column names for the required vacancy fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnMap {
    pub id: String,
    pub title: String,
    pub location: String,
    pub date: String,
    pub body: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            id: "id".into(),
            title: "title".into(),
            location: "location".into(),
            date: "date".into(),
            body: "body".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadReport {
    pub vacancies: Vec<RawVacancy>,
    pub skipped_empty: usize,
}

/// Lowercases, trims and collapses whitespace.
pub fn normalize_location(raw: &str) -> String {
    raw.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Loads a UTF-8 CSV vacancy corpus. Rows with an empty body are skipped and
/// counted; dates must be `YYYY-MM-DD`.
pub fn load_vacancies(path: &Path, columns: &ColumnMap) -> Result<LoadReport> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_vacancies(file, columns)
}

pub fn read_vacancies<R: std::io::Read>(reader: R, columns: &ColumnMap) -> Result<LoadReport> {
    let mut csv = csv::ReaderBuilder::new().flexible(false).from_reader(reader);
    let headers = csv
        .headers()
        .map_err(|e| Error::Ingest(format!("cannot read header row: {e}")))?
        .clone();
    let index_of = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Schema(name.to_string()))
    };
    let id_col = index_of(&columns.id)?;
    let title_col = index_of(&columns.title)?;
    let location_col = index_of(&columns.location)?;
    let date_col = index_of(&columns.date)?;
    let body_col = index_of(&columns.body)?;

    let mut vacancies = Vec::new();
    let mut skipped_empty = 0;
    let mut seen = HashSet::new();
    for (row, record) in csv.records().enumerate() {
        let record = record.map_err(|e| Error::Ingest(format!("row {}: {e}", row + 1)))?;
        let field = |i: usize| record.get(i).unwrap_or("").to_string();
        let body = field(body_col);
        if body.trim().is_empty() {
            skipped_empty += 1;
            continue;
        }
        let id = field(id_col).trim().to_string();
        if !seen.insert(id.clone()) {
            return Err(Error::Ingest(format!("duplicate vacancy id `{id}`")));
        }
        let raw_date = field(date_col);
        let posted_date = NaiveDate::parse_from_str(raw_date.trim(), "%Y-%m-%d").map_err(|e| {
            Error::Ingest(format!("row {}: bad date `{raw_date}`: {e}", row + 1))
        })?;
        vacancies.push(RawVacancy {
            id,
            job_title: field(title_col).trim().to_string(),
            location: normalize_location(&field(location_col)),
            posted_date,
            body,
            sections: Vec::new(),
        });
    }
    Ok(LoadReport {
        vacancies,
        skipped_empty,
    })
}

/// Headings recognised when splitting a vacancy into sections.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeadingRules {
    /// Headings that introduce a required-skills section.
    pub skill_headings: Vec<String>,
    /// Other headings that start a new section even without a trailing colon.
    pub other_headings: Vec<String>,
    pub max_tokens: usize,
}

impl Default for HeadingRules {
    fn default() -> Self {
        let owned = |v: &[&str]| v.iter().map(|s| s.to_string()).collect();
        HeadingRules {
            skill_headings: owned(&[
                "required skills",
                "skills",
                "qualifications",
                "requirements",
                "skills & qualifications",
            ]),
            other_headings: owned(&[
                "about us",
                "about the company",
                "about the role",
                "about the job",
                "company overview",
                "overview",
                "job description",
                "description",
                "responsibilities",
                "key responsibilities",
                "duties",
                "what you will do",
                "what we offer",
                "benefits",
                "compensation",
                "how to apply",
                "location",
            ]),
            max_tokens: 6,
        }
    }
}

impl HeadingRules {
    /// Returns the normalized heading if `line` is a heading line.
    pub fn heading_of(&self, line: &str) -> Option<String> {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with(['-', '*', '•', '·', '–']) {
            return None;
        }
        let has_colon = trimmed.ends_with(':');
        let normalized = normalize_heading(trimmed);
        let tokens = normalized.split_whitespace().count();
        if tokens == 0 || tokens > self.max_tokens {
            return None;
        }
        let known = self.is_skill_heading(&normalized)
            || self.other_headings.iter().any(|h| h.eq_ignore_ascii_case(&normalized));
        (has_colon || known).then_some(normalized)
    }

    pub fn is_skill_heading(&self, normalized: &str) -> bool {
        self.skill_headings
            .iter()
            .any(|h| h.eq_ignore_ascii_case(normalized))
    }
}

fn normalize_heading(line: &str) -> String {
    line.trim()
        .trim_end_matches(':')
        .split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Partitions the body into sections at heading lines. Text before the first
/// heading, if any, forms a section with no heading.
pub fn split_sections(mut vacancy: RawVacancy, rules: &HeadingRules) -> RawVacancy {
    let mut sections: Vec<Section> = Vec::new();
    let mut current = Section {
        heading: None,
        raw_heading: None,
        text: String::new(),
    };
    let mut lines: Vec<&str> = Vec::new();
    let flush = |current: &mut Section, lines: &mut Vec<&str>, sections: &mut Vec<Section>| {
        let text = lines.join("\n").trim().to_string();
        lines.clear();
        if current.heading.is_some() || !text.is_empty() {
            current.text = text;
            sections.push(current.clone());
        }
    };
    for line in vacancy.body.lines() {
        if let Some(heading) = rules.heading_of(line) {
            flush(&mut current, &mut lines, &mut sections);
            current = Section {
                heading: Some(heading),
                raw_heading: Some(line.trim().to_string()),
                text: String::new(),
            };
        } else {
            lines.push(line);
        }
    }
    flush(&mut current, &mut lines, &mut sections);
    if sections.is_empty() {
        sections.push(Section {
            heading: None,
            raw_heading: None,
            text: vacancy.body.trim().to_string(),
        });
    }
    vacancy.sections = sections;
    vacancy
}

/// True if any section of the (already split) vacancy is a required-skills section.
pub fn has_skill_section(vacancy: &RawVacancy, rules: &HeadingRules) -> bool {
    vacancy
        .sections
        .iter()
        .any(|s| s.heading.as_deref().is_some_and(|h| rules.is_skill_heading(h)))
}

/// Preprocesses every section of a split vacancy, tagging sentences with provenance.
pub fn vacancy_sentences(vacancy: &RawVacancy) -> Vec<CleanSentence> {
    vacancy
        .sections
        .iter()
        .flat_map(|s| preprocess_with_source(&s.text, &vacancy.id, s.heading.as_deref()))
        .collect()
}

/// Labels sentences of vacancies that contain a required-skills section:
/// 1 under such a heading, 0 elsewhere in the same vacancy. Vacancies without
/// one contribute nothing.
pub fn label_corpus(vacancies: &[RawVacancy], rules: &HeadingRules) -> Vec<LabeledSentence> {
    vacancies
        .iter()
        .filter(|v| has_skill_section(v, rules))
        .flat_map(|v| {
            vacancy_sentences(v).into_iter().map(|sentence| {
                let label = match sentence.source_heading.as_deref() {
                    Some(h) if rules.is_skill_heading(h) => Label::Skill,
                    _ => Label::Other,
                };
                LabeledSentence { sentence, label }
            })
        })
        .collect()
}

/// Writes `label<TAB>token token ...` lines.
pub fn write_labeled<W: Write>(mut out: W, data: &[LabeledSentence]) -> std::io::Result<()> {
    for item in data {
        writeln!(out, "{}\t{}", item.label.as_index(), item.sentence.text())?;
    }
    Ok(())
}

/// Reads the format produced by [`write_labeled`]. Provenance is not stored in
/// the file, so `source_vacancy` holds the 1-based line number.
pub fn read_labeled<R: BufRead>(input: R) -> Result<Vec<LabeledSentence>> {
    let mut out = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::Ingest(format!("line {}: {e}", n + 1)))?;
        if line.trim().is_empty() {
            continue;
        }
        let (label, tokens) = line
            .split_once('\t')
            .ok_or_else(|| Error::Ingest(format!("line {}: missing tab separator", n + 1)))?;
        let label = label
            .trim()
            .parse::<usize>()
            .ok()
            .and_then(Label::from_index)
            .ok_or_else(|| Error::Ingest(format!("line {}: bad label `{label}`", n + 1)))?;
        let mut sentence = CleanSentence::from_tokens(tokens.split_whitespace());
        sentence.source_vacancy = (n + 1).to_string();
        out.push(LabeledSentence { sentence, label });
    }
    Ok(out)
}
