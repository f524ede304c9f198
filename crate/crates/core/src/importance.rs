//! Skill importance per job and location.
//!
//! Importance starts from the fraction of recent matching vacancies whose
//! skill sentences mention a term, max-normalized to `[0, 100]`, and is then
//! blended with the previous score by exponential smoothing.

use std::collections::BTreeMap;
use std::io::Write;

use chrono::{Months, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::classifier::ClassifierModel;
use crate::error::{Error, Result};
use crate::text::CleanSentence;
use crate::tfidf::{terms_present, SkillTerm};
use crate::vacancy::{normalize_location, vacancy_sentences, HeadingRules, Label, RawVacancy};

pub const DEFAULT_ALPHA: f64 = 0.7;
pub const DEFAULT_WINDOW_MONTHS: u32 = 6;

/// Decides whether a preprocessed sentence is skill-related.
pub trait SkillSentenceDetector {
    fn is_skill_sentence(&self, sentence: &CleanSentence) -> bool;
}

impl SkillSentenceDetector for ClassifierModel {
    fn is_skill_sentence(&self, sentence: &CleanSentence) -> bool {
        self.predict(sentence).0 == Label::Skill
    }
}

/// Treats sentences under a required-skills heading as skill sentences.
/// Useful when vacancies carry explicit sections and no model is at hand.
#[derive(Debug, Clone, Default)]
pub struct HeadingDetector(pub HeadingRules);

impl SkillSentenceDetector for HeadingDetector {
    fn is_skill_sentence(&self, sentence: &CleanSentence) -> bool {
        sentence
            .source_heading
            .as_deref()
            .is_some_and(|h| self.0.is_skill_heading(h))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkillImportanceRecord {
    pub skill: String,
    pub job: String,
    pub location: String,
    pub importance: f64,
    pub last_updated: NaiveDate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobSkillProfile {
    pub job: String,
    pub location: String,
    /// Sorted by importance descending, then skill ascending.
    pub entries: Vec<SkillImportanceRecord>,
}

impl JobSkillProfile {
    pub fn importance_of(&self, skill: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.skill == skill)
            .map(|e| e.importance)
    }

    pub fn skills(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.skill.as_str())
    }
}

/// Case-insensitive substring match of the job query against the title.
pub fn job_matches(query: &str, title: &str) -> bool {
    title.to_lowercase().contains(query.trim().to_lowercase().as_str())
}

/// True if `date` lies in the `window_months` calendar months ending at `now`
/// (inclusive on both ends).
pub fn in_window(date: NaiveDate, now: NaiveDate, window_months: u32) -> bool {
    let start = now
        .checked_sub_months(Months::new(window_months))
        .unwrap_or(NaiveDate::MIN);
    date >= start && date <= now
}

/// Fraction of in-window vacancies for `job` at `location` whose detected
/// skill sentences contain each skill term. All zero when nothing matches.
///
/// Vacancies must already be split into sections.
#[allow(clippy::too_many_arguments)]
pub fn occurrence_rates(
    vacancies: &[RawVacancy],
    job: &str,
    location: &str,
    window_months: u32,
    now: NaiveDate,
    skills: &[SkillTerm],
    detector: &dyn SkillSentenceDetector,
) -> BTreeMap<String, f64> {
    let location = normalize_location(location);
    let matching: Vec<&RawVacancy> = vacancies
        .iter()
        .filter(|v| job_matches(job, &v.job_title))
        .filter(|v| v.location == location)
        .filter(|v| in_window(v.posted_date, now, window_months))
        .collect();
    let mut counts: BTreeMap<String, usize> =
        skills.iter().map(|s| (s.term.clone(), 0)).collect();
    for v in &matching {
        let sentences = vacancy_sentences(v);
        let present = terms_present(sentences.iter().filter(|s| detector.is_skill_sentence(s)));
        for (term, count) in counts.iter_mut() {
            if present.contains(term) {
                *count += 1;
            }
        }
    }
    let n = matching.len();
    counts
        .into_iter()
        .map(|(term, c)| {
            let rate = if n == 0 { 0.0 } else { c as f64 / n as f64 };
            (term, rate)
        })
        .collect()
}

/// Scales rates so the largest becomes 100. All-zero input maps to zeros.
pub fn normalize_rates(rates: &BTreeMap<String, f64>) -> BTreeMap<String, f64> {
    let max = rates.values().copied().fold(0.0f64, f64::max);
    rates
        .iter()
        .map(|(k, &r)| {
            let v = if max > 0.0 { r / max * 100.0 } else { 0.0 };
            (k.clone(), v)
        })
        .collect()
}

/// Blends a fresh normalized rate into the previous importance score.
/// `alpha` must lie in `(0.5, 1]` so the fresh rate dominates.
pub fn decay_update(old: Option<f64>, new_rate: f64, alpha: f64) -> Result<f64> {
    validate_alpha(alpha)?;
    Ok(match old {
        None => new_rate,
        Some(old) => alpha * new_rate + (1.0 - alpha) * old,
    })
}

pub fn validate_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.5 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "decay alpha must lie in (0.5, 1], got {alpha}"
        )))
    }
}

/// Sorts records into a profile: importance descending, ties alphabetical.
/// Duplicate skills keep their first occurrence.
pub fn build_profile(
    job: &str,
    location: &str,
    records: Vec<SkillImportanceRecord>,
    top_k: Option<usize>,
) -> JobSkillProfile {
    let mut seen = std::collections::HashSet::new();
    let mut entries: Vec<SkillImportanceRecord> = records
        .into_iter()
        .filter(|r| seen.insert(r.skill.clone()))
        .collect();
    entries.sort_by(|a, b| {
        b.importance
            .total_cmp(&a.importance)
            .then_with(|| a.skill.cmp(&b.skill))
    });
    if let Some(k) = top_k {
        entries.truncate(k);
    }
    JobSkillProfile {
        job: job.to_string(),
        location: normalize_location(location),
        entries,
    }
}

/// Applies freshly normalized rates to an existing profile (or creates one).
/// Skills absent from `normalized` keep their previous score.
pub fn refresh_profile(
    previous: Option<&JobSkillProfile>,
    job: &str,
    location: &str,
    normalized: &BTreeMap<String, f64>,
    alpha: f64,
    today: NaiveDate,
    top_k: Option<usize>,
) -> Result<JobSkillProfile> {
    let mut merged: BTreeMap<String, SkillImportanceRecord> = previous
        .map(|p| {
            p.entries
                .iter()
                .map(|e| (e.skill.clone(), e.clone()))
                .collect()
        })
        .unwrap_or_default();
    for (skill, &rate) in normalized {
        let old = merged.get(skill).map(|r| r.importance);
        let importance = decay_update(old, rate, alpha)?.clamp(0.0, 100.0);
        merged.insert(
            skill.clone(),
            SkillImportanceRecord {
                skill: skill.clone(),
                job: job.to_string(),
                location: normalize_location(location),
                importance,
                last_updated: today,
            },
        );
    }
    Ok(build_profile(
        job,
        location,
        merged.into_values().collect(),
        top_k,
    ))
}

/// Writes `job<TAB>location<TAB>skill<TAB>importance<TAB>date` lines.
pub fn write_profile<W: Write>(mut out: W, profile: &JobSkillProfile) -> std::io::Result<()> {
    for e in &profile.entries {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            e.job,
            e.location,
            e.skill,
            e.importance,
            e.last_updated.format("%Y-%m-%d")
        )?;
    }
    Ok(())
}

/// Parses the profile export format; one profile per distinct (job, location).
pub fn read_profiles(input: &str) -> Result<Vec<JobSkillProfile>> {
    let mut grouped: BTreeMap<(String, String), Vec<SkillImportanceRecord>> = BTreeMap::new();
    for (i, line) in input.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let bad = || Error::Ingest(format!("profile line {}: `{line}`", i + 1));
        let parts: Vec<&str> = line.split('\t').collect();
        if parts.len() != 5 {
            return Err(bad());
        }
        let importance: f64 = parts[3].parse().map_err(|_| bad())?;
        if !(0.0..=100.0).contains(&importance) {
            return Err(bad());
        }
        let last_updated = NaiveDate::parse_from_str(parts[4], "%Y-%m-%d").map_err(|_| bad())?;
        grouped
            .entry((parts[0].to_string(), parts[1].to_string()))
            .or_default()
            .push(SkillImportanceRecord {
                skill: parts[2].to_string(),
                job: parts[0].to_string(),
                location: parts[1].to_string(),
                importance,
                last_updated,
            });
    }
    Ok(grouped
        .into_iter()
        .map(|((job, location), records)| build_profile(&job, &location, records, None))
        .collect())
}
