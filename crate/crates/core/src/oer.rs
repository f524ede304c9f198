//! OER catalog: ingestion from repository connectors, property scaling,
//! cold-start initialization, rating-driven refits and relevance.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learner::{LearnerProfile, RatingEvent};
use crate::text::preprocess;

pub const DEFAULT_PROPERTY: f64 = 50.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OerRecord {
    pub oer_id: String,
    pub title: String,
    /// Repository the OER came from.
    pub resource: String,
    pub skill: String,
    pub author: String,
    pub url: String,
    pub how_long: f64,
    /// Always `100 - how_long`.
    pub how_short: f64,
    pub level: f64,
    pub quality: f64,
    pub accessibility: f64,
    pub relevance: f64,
    pub total_recom: u64,
    pub irrelev_count: u64,
    pub excluded_for_skill: bool,
}

impl OerRecord {
    /// A record with every learnable property at its default.
    pub fn new_default(oer_id: &str, resource: &str, skill: &str, author: &str, url: &str) -> Self {
        OerRecord {
            oer_id: oer_id.into(),
            title: String::new(),
            resource: resource.into(),
            skill: skill.into(),
            author: author.into(),
            url: url.into(),
            how_long: DEFAULT_PROPERTY,
            how_short: 100.0 - DEFAULT_PROPERTY,
            level: DEFAULT_PROPERTY,
            quality: DEFAULT_PROPERTY,
            accessibility: DEFAULT_PROPERTY,
            relevance: 1.0,
            total_recom: 0,
            irrelev_count: 0,
            excluded_for_skill: false,
        }
    }

    pub fn set_length(&mut self, how_long: f64) {
        self.how_long = how_long.clamp(0.0, 100.0);
        self.how_short = 100.0 - self.how_long;
    }

    pub fn record_recommendation(&mut self) {
        self.total_recom += 1;
        self.relevance = relevance(self.total_recom, self.irrelev_count);
    }

    pub fn record_irrelevant(&mut self) {
        self.irrelev_count = (self.irrelev_count + 1).min(self.total_recom);
        self.relevance = relevance(self.total_recom, self.irrelev_count);
    }
}

/// `(total - irrelevant) / total`, or 1 for an OER never recommended.
pub fn relevance(total_recom: u64, irrelev_count: u64) -> f64 {
    if total_recom == 0 {
        1.0
    } else {
        (total_recom - irrelev_count.min(total_recom)) as f64 / total_recom as f64
    }
}

fn exact_relevance(oer: &OerRecord) -> BigRational {
    let total = oer.total_recom;
    let relevant = total - oer.irrelev_count.min(total);
    BigRational::new(BigInt::from(relevant), BigInt::from(total))
}

/// Flags records of `skill` whose relevance is strictly below the average
/// relevance of the skill's recommended records, clears the flag on the
/// others, and returns the flagged ids. Never-recommended records are
/// neither counted in the average nor flagged. Comparisons are exact.
pub fn exclude_below_average(skill: &str, records: &mut [OerRecord]) -> BTreeSet<String> {
    let rated: Vec<usize> = records
        .iter()
        .enumerate()
        .filter(|(_, r)| r.skill == skill && r.total_recom > 0)
        .map(|(i, _)| i)
        .collect();
    let mut excluded = BTreeSet::new();
    for r in records.iter_mut().filter(|r| r.skill == skill) {
        r.excluded_for_skill = false;
    }
    if rated.is_empty() {
        return excluded;
    }
    let sum: BigRational = rated
        .iter()
        .map(|&i| exact_relevance(&records[i]))
        .fold(BigRational::from_integer(BigInt::from(0)), |a, b| a + b);
    let n = BigRational::from_integer(BigInt::from(rated.len()));
    let average = sum / n;
    for &i in &rated {
        if exact_relevance(&records[i]) < average {
            records[i].excluded_for_skill = true;
            excluded.insert(records[i].oer_id.clone());
        }
    }
    excluded
}

/// Raw metadata as published by a repository.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawOer {
    pub id: String,
    pub title: String,
    pub subject: String,
    pub author: String,
    pub url: String,
    /// Either a duration like "45 minutes" / "3 weeks" or a length class name.
    #[serde(default)]
    pub duration: Option<String>,
    #[serde(default)]
    pub level: Option<String>,
    /// Peer review status; `None` when the repository does not say.
    #[serde(default)]
    pub reviewed: Option<bool>,
    #[serde(default)]
    pub badges: Option<Vec<String>>,
    #[serde(default)]
    pub accessibility: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FetchResult {
    pub records: Vec<RawOer>,
    pub skipped: usize,
}

pub trait RepositoryConnector {
    fn repository(&self) -> &str;
    fn fetch(&self) -> Result<FetchResult>;
}

/// Serves records recorded in a JSON-lines file, one [`RawOer`] per line.
#[derive(Debug, Clone)]
pub struct FixtureConnector {
    repository: String,
    path: PathBuf,
}

impl FixtureConnector {
    pub fn new(repository: impl Into<String>, path: impl Into<PathBuf>) -> Self {
        FixtureConnector {
            repository: repository.into(),
            path: path.into(),
        }
    }

    /// Every `*.jsonl` file in `dir`, named after the file stem.
    pub fn discover(dir: &Path) -> Result<Vec<FixtureConnector>> {
        let mut out = Vec::new();
        let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        for entry in entries {
            let path = entry.map_err(|e| Error::io(dir, e))?.path();
            if path.extension().is_some_and(|e| e == "jsonl") {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    out.push(FixtureConnector::new(stem, &path));
                }
            }
        }
        out.sort_by(|a, b| a.repository.cmp(&b.repository));
        Ok(out)
    }
}

impl RepositoryConnector for FixtureConnector {
    fn repository(&self) -> &str {
        &self.repository
    }

    fn fetch(&self) -> Result<FetchResult> {
        let file = std::fs::File::open(&self.path).map_err(|e| Error::Connector {
            repository: self.repository.clone(),
            message: format!("{}: {e}", self.path.display()),
        })?;
        parse_fixture(std::io::BufReader::new(file)).map_err(|e| Error::Connector {
            repository: self.repository.clone(),
            message: e.to_string(),
        })
    }
}

/// Parses JSON lines; lines that fail to parse or lack an id, subject or url
/// are skipped and counted.
pub fn parse_fixture<R: BufRead>(input: R) -> Result<FetchResult> {
    let mut records = Vec::new();
    let mut skipped = 0;
    for line in input.lines() {
        let line = line.map_err(|e| Error::Ingest(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<RawOer>(&line) {
            Ok(r) if !r.id.trim().is_empty() && !r.subject.trim().is_empty() && !r.url.trim().is_empty() => {
                records.push(r)
            }
            _ => skipped += 1,
        }
    }
    Ok(FetchResult { records, skipped })
}

pub fn fetch_oers(conn: &dyn RepositoryConnector) -> Result<FetchResult> {
    conn.fetch()
}

/// Maps `value` to an evenly spaced point in `[0, 100]` among the distinct
/// classes present in `raw_values`. Classes follow `ordering`; values not
/// listed there come after it in alphabetical order. One class maps to 50.
pub fn normalize_property(raw_values: &[String], value: &str, ordering: &[String]) -> Result<f64> {
    let classes = ordered_classes(raw_values, ordering);
    let needle = value.trim().to_lowercase();
    let idx = classes
        .iter()
        .position(|c| *c == needle)
        .ok_or_else(|| Error::UnknownClass {
            value: value.to_string(),
            known: classes.clone(),
        })?;
    Ok(class_point(idx, classes.len()))
}

fn class_point(idx: usize, n: usize) -> f64 {
    if n <= 1 {
        50.0
    } else {
        100.0 * idx as f64 / (n - 1) as f64
    }
}

pub fn ordered_classes(raw_values: &[String], ordering: &[String]) -> Vec<String> {
    let present: BTreeSet<String> = raw_values.iter().map(|v| v.trim().to_lowercase()).collect();
    let mut classes: Vec<String> = ordering
        .iter()
        .map(|o| o.to_lowercase())
        .filter(|o| present.contains(o))
        .collect();
    for v in &present {
        if !classes.contains(v) {
            classes.push(v.clone());
        }
    }
    classes
}

/// Orderings used to turn categorical raw values into scaled properties.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyScales {
    pub level: Vec<String>,
    pub length: Vec<String>,
}

impl Default for PropertyScales {
    fn default() -> Self {
        PropertyScales {
            level: vec!["beginner".into(), "intermediate".into(), "advanced".into()],
            length: DURATION_CLASSES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

pub const DURATION_CLASSES: [&str; 4] = ["up to 1 hour", "up to 1 day", "up to 1 week", "over 1 week"];

/// Buckets a free-text duration ("90 minutes", "2 days", "1.5 weeks").
pub fn duration_class(text: &str) -> Option<&'static str> {
    let lower = text.trim().to_lowercase();
    let mut parts = lower.split_whitespace();
    let amount: f64 = parts.next()?.parse().ok()?;
    let unit = parts.next()?;
    let hours = match unit.trim_end_matches('s') {
        "min" | "minute" | "m" => amount / 60.0,
        "h" | "hr" | "hour" => amount,
        "day" | "d" => amount * 24.0,
        "week" | "wk" | "w" => amount * 24.0 * 7.0,
        "month" => amount * 24.0 * 30.0,
        _ => return None,
    };
    Some(if hours <= 1.0 {
        DURATION_CLASSES[0]
    } else if hours <= 24.0 {
        DURATION_CLASSES[1]
    } else if hours <= 24.0 * 7.0 {
        DURATION_CLASSES[2]
    } else {
        DURATION_CLASSES[3]
    })
}

/// Normalized subject used as the OER's skill term.
pub fn skill_from_subject(subject: &str) -> String {
    preprocess(subject)
        .into_iter()
        .flat_map(|s| s.tokens)
        .collect::<Vec<_>>()
        .join(" ")
}

/// An OER with some learnable properties unknown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialOer {
    pub oer_id: String,
    pub title: String,
    pub resource: String,
    pub skill: String,
    pub author: String,
    pub url: String,
    pub how_long: Option<f64>,
    pub level: Option<f64>,
    pub quality: Option<f64>,
    pub accessibility: Option<f64>,
}

/// Fills unknown properties with the mean over catalog records sharing author
/// and skill, falling back to records sharing the skill, then to 50.
pub fn init_oer(known: &PartialOer, catalog: &[OerRecord]) -> OerRecord {
    let same_author: Vec<&OerRecord> = catalog
        .iter()
        .filter(|r| r.skill == known.skill && r.author == known.author && r.oer_id != known.oer_id)
        .collect();
    let same_skill: Vec<&OerRecord> = catalog
        .iter()
        .filter(|r| r.skill == known.skill && r.oer_id != known.oer_id)
        .collect();
    let basis = if !same_author.is_empty() {
        same_author
    } else {
        same_skill
    };
    let mean = |f: fn(&OerRecord) -> f64| -> f64 {
        if basis.is_empty() {
            DEFAULT_PROPERTY
        } else {
            basis.iter().map(|r| f(r)).sum::<f64>() / basis.len() as f64
        }
    };
    let mut record = OerRecord::new_default(
        &known.oer_id,
        &known.resource,
        &known.skill,
        &known.author,
        &known.url,
    );
    record.title = known.title.clone();
    record.set_length(known.how_long.unwrap_or_else(|| mean(|r| r.how_long)));
    record.level = known.level.unwrap_or_else(|| mean(|r| r.level));
    record.quality = known.quality.unwrap_or_else(|| mean(|r| r.quality));
    record.accessibility = known.accessibility.unwrap_or_else(|| mean(|r| r.accessibility));
    record
}

/// Converts fetched raw records into catalog entries. Categorical values are
/// scaled over the classes present across all of `fetched`; unknown
/// properties are cold-started against `catalog` and earlier new entries.
pub fn ingest(
    fetched: &[(String, Vec<RawOer>)],
    catalog: &[OerRecord],
    scales: &PropertyScales,
) -> Vec<OerRecord> {
    let all: Vec<(&str, &RawOer)> = fetched
        .iter()
        .flat_map(|(repo, records)| records.iter().map(move |r| (repo.as_str(), r)))
        .collect();
    let length_class = |r: &RawOer| -> Option<String> {
        let d = r.duration.as_deref()?;
        Some(
            duration_class(d)
                .map(str::to_string)
                .unwrap_or_else(|| d.trim().to_lowercase()),
        )
    };
    let quality_class = |r: &RawOer| -> Option<String> {
        if r.reviewed.is_none() && r.badges.is_none() {
            return None;
        }
        let count = usize::from(r.reviewed.unwrap_or(false)) + r.badges.as_ref().map_or(0, Vec::len);
        Some(format!("{count:03}"))
    };
    let access_class = |r: &RawOer| -> Option<String> {
        r.accessibility.as_ref().map(|a| format!("{:03}", a.len()))
    };
    let level_class = |r: &RawOer| r.level.as_ref().map(|l| l.trim().to_lowercase());

    let collect = |f: &dyn Fn(&RawOer) -> Option<String>| -> Vec<String> {
        all.iter().filter_map(|(_, r)| f(r)).collect()
    };
    let lengths = collect(&length_class);
    let levels = collect(&level_class);
    let qualities = collect(&quality_class);
    let accesses = collect(&access_class);

    let scale = |values: &[String], value: Option<String>, ordering: &[String]| -> Option<f64> {
        value.and_then(|v| normalize_property(values, &v, ordering).ok())
    };
    let mut known_catalog: Vec<OerRecord> = catalog.to_vec();
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (repo, raw) in all {
        let oer_id = format!("{repo}:{}", raw.id.trim());
        if !seen.insert(oer_id.clone()) || catalog.iter().any(|r| r.oer_id == oer_id) {
            continue;
        }
        let partial = PartialOer {
            oer_id,
            title: raw.title.clone(),
            resource: repo.to_string(),
            skill: skill_from_subject(&raw.subject),
            author: raw.author.trim().to_string(),
            url: raw.url.trim().to_string(),
            how_long: scale(&lengths, length_class(raw), &scales.length),
            level: scale(&levels, level_class(raw), &scales.level),
            quality: scale(&qualities, quality_class(raw), &[]),
            accessibility: scale(&accesses, access_class(raw), &[]),
        };
        let record = init_oer(&partial, &known_catalog);
        known_catalog.push(record.clone());
        out.push(record);
    }
    out
}

/// Parameters of the subgradient refit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GdParams {
    pub lr: f64,
    pub iters: usize,
    pub tol: f64,
}

impl Default for GdParams {
    fn default() -> Self {
        GdParams {
            lr: 0.05,
            iters: 500,
            tol: 1e-6,
        }
    }
}

impl GdParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lr > 0.0) || self.iters == 0 || !(self.tol >= 0.0) {
            return Err(Error::Config(format!(
                "gradient descent needs lr > 0, iters > 0, tol >= 0 (got {self:?})"
            )));
        }
        Ok(())
    }
}

/// One rater's contribution to the refit loss: aligned preference weights
/// (summing to 1) and the satisfaction they reported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaterSample {
    pub theta: [f64; 4],
    pub satisfaction: f64,
}

impl RaterSample {
    /// Scales preferences to `[0, 1]` and normalizes them to sum to 1
    /// (uniform if they are all zero).
    pub fn from_profile(profile: &LearnerProfile, satisfaction: f64) -> Self {
        let prefs = profile.aligned_preferences().map(|p| (p / 100.0).clamp(0.0, 1.0));
        let sum: f64 = prefs.iter().sum();
        let theta = if sum > 0.0 {
            prefs.map(|p| p / sum)
        } else {
            [0.25; 4]
        };
        RaterSample {
            theta,
            satisfaction,
        }
    }
}

/// Learnable OER properties on the unit scale: how_long, quality,
/// accessibility. `how_short` is implied as `1 - how_long`.
pub type FitPoint = [f64; 3];

pub fn expand(point: &FitPoint) -> [f64; 4] {
    [point[0], 1.0 - point[0], point[1], point[2]]
}

fn predicted(sample: &RaterSample, point: &FitPoint) -> f64 {
    let x = expand(point);
    sample.theta.iter().zip(&x).map(|(t, v)| t * v).sum()
}

/// Sum of absolute errors between predicted and reported satisfaction.
pub fn l1_loss(samples: &[RaterSample], point: &FitPoint) -> f64 {
    samples
        .iter()
        .map(|s| (predicted(s, point) - s.satisfaction).abs())
        .sum()
}

/// A subgradient of [`l1_loss`]; residuals at exactly zero contribute nothing.
pub fn l1_subgradient(samples: &[RaterSample], point: &FitPoint) -> FitPoint {
    let mut g = [0.0; 3];
    for s in samples {
        let r = predicted(s, point) - s.satisfaction;
        let sign = if r > 0.0 {
            1.0
        } else if r < 0.0 {
            -1.0
        } else {
            0.0
        };
        g[0] += sign * (s.theta[0] - s.theta[1]);
        g[1] += sign * s.theta[2];
        g[2] += sign * s.theta[3];
    }
    g
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub initial_loss: f64,
    pub final_loss: f64,
    pub iterations: usize,
    /// Loss after each accepted step, starting with the initial loss.
    pub loss_history: Vec<f64>,
}

fn residual_row(sample: &RaterSample) -> FitPoint {
    let t = sample.theta;
    [t[0] - t[1], t[2], t[3]]
}

fn norm(v: &FitPoint) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Minimum-norm element of the `eps`-subdifferential of [`l1_loss`] plus the
/// normal cone of the unit box at `point`. Residuals within `eps` (scaled by
/// their gradient norm) of zero may take any sign weight in `[-1, 1]`;
/// the box faces `point` touches may absorb outward components. Its negation
/// is a feasible descent direction unless the point is `eps`-stationary.
pub fn min_norm_subgradient(samples: &[RaterSample], point: &FitPoint, eps: f64) -> FitPoint {
    let mut g = [0.0; 3];
    let mut free: Vec<(FitPoint, f64, f64)> = Vec::new();
    for s in samples {
        let a = residual_row(s);
        let r = predicted(s, point) - s.satisfaction;
        if r.abs() <= eps * norm(&a) {
            free.push((a, 0.0, 1.0));
        } else {
            let sign = r.signum();
            for j in 0..3 {
                g[j] += sign * a[j];
            }
        }
    }
    for j in 0..3 {
        let mut e = [0.0; 3];
        if point[j] <= eps {
            e[j] = -1.0;
            free.push((e, 0.0, f64::INFINITY));
        } else if point[j] >= 1.0 - eps {
            e[j] = 1.0;
            free.push((e, 0.0, f64::INFINITY));
        }
    }
    // Sign weights live in [-1, 1], normal-cone weights in [0, inf).
    let mut weights: Vec<f64> = vec![0.0; free.len()];
    for _ in 0..200 {
        let mut moved = 0.0f64;
        for (k, (a, _, hi)) in free.iter().enumerate() {
            let aa: f64 = a.iter().map(|x| x * x).sum();
            if aa == 0.0 {
                continue;
            }
            let ga: f64 = g.iter().zip(a).map(|(x, y)| x * y).sum();
            let lo = if hi.is_infinite() { 0.0 } else { -1.0 };
            let next = (weights[k] - ga / aa).clamp(lo, *hi);
            let delta = next - weights[k];
            if delta != 0.0 {
                for j in 0..3 {
                    g[j] += delta * a[j];
                }
                weights[k] = next;
                moved = moved.max(delta.abs());
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    g
}

/// Projected subgradient descent on [`l1_loss`] from `start`.
///
/// Each iteration descends along [`min_norm_subgradient`] with a trial step
/// of twice the previous accepted one (capped at `gd.lr`), halving it while
/// the loss would increase. Stops after `iters` iterations, when an accepted
/// step improves the loss by less than `gd.tol` at a point with no descent
/// direction at that scale, or when the step size falls below `1e-12`
/// without progress.
pub fn fit_point(samples: &[RaterSample], start: FitPoint, gd: &GdParams) -> (FitPoint, FitReport) {
    const MIN_STEP: f64 = 1e-12;
    let mut point = start.map(|v| v.clamp(0.0, 1.0));
    let mut loss = l1_loss(samples, &point);
    let mut report = FitReport {
        initial_loss: loss,
        final_loss: loss,
        iterations: 0,
        loss_history: vec![loss],
    };
    // Starting step of the next iteration; it also sets the eps used to
    // pick the subgradient.
    let mut trial = gd.lr;
    for it in 0..gd.iters {
        report.iterations = it + 1;
        if loss == 0.0 || trial < MIN_STEP {
            break;
        }
        // Steps are taken along the unit direction, so `trial` is also the
        // distance within which a residual hyperplane counts as active.
        let g = min_norm_subgradient(samples, &point, trial);
        let g_norm = norm(&g);
        if g_norm < 1e-12 {
            trial *= 0.5;
            continue;
        }
        let g = g.map(|v| v / g_norm);
        let mut step = trial;
        let accepted = loop {
            let candidate: FitPoint = [
                (point[0] - step * g[0]).clamp(0.0, 1.0),
                (point[1] - step * g[1]).clamp(0.0, 1.0),
                (point[2] - step * g[2]).clamp(0.0, 1.0),
            ];
            let candidate_loss = l1_loss(samples, &candidate);
            if candidate != point && candidate_loss < loss {
                break Some((candidate, candidate_loss));
            }
            step *= 0.5;
            if step < MIN_STEP {
                break None;
            }
        };
        let Some((candidate, candidate_loss)) = accepted else {
            trial *= 0.5;
            continue;
        };
        let improvement = loss - candidate_loss;
        point = candidate;
        loss = candidate_loss;
        trial = (2.0 * step).min(gd.lr);
        report.loss_history.push(loss);
        // A small improvement alone can be a slow stretch along a kink, so
        // also require the point to be stationary at the tol scale.
        if improvement < gd.tol && norm(&min_norm_subgradient(samples, &point, gd.tol)) <= gd.tol {
            break;
        }
    }
    report.final_loss = loss;
    (point, report)
}

/// Refits an OER's length, quality and accessibility from the period's
/// ratings. Relevance fields and level are left untouched; with no ratings the
/// record is returned unchanged.
pub fn refit_properties(
    oer: &OerRecord,
    raters: &[(LearnerProfile, RatingEvent)],
    gd: &GdParams,
) -> Result<(OerRecord, Option<FitReport>)> {
    gd.validate()?;
    if raters.is_empty() {
        return Ok((oer.clone(), None));
    }
    if let Some((_, e)) = raters.iter().find(|(_, e)| e.oer_id != oer.oer_id) {
        return Err(Error::State(format!(
            "rating for `{}` passed to refit of `{}`",
            e.oer_id, oer.oer_id
        )));
    }
    let samples: Vec<RaterSample> = raters
        .iter()
        .map(|(p, e)| RaterSample::from_profile(p, e.satisfaction))
        .collect();
    let start = [oer.how_long / 100.0, oer.quality / 100.0, oer.accessibility / 100.0];
    let (point, report) = fit_point(&samples, start, gd);
    let mut updated = oer.clone();
    updated.set_length(100.0 * point[0]);
    updated.quality = 100.0 * point[1];
    updated.accessibility = 100.0 * point[2];
    Ok((updated, Some(report)))
}

/// Catalog grouped by skill, for per-skill exclusion passes.
pub fn skills_of(catalog: &BTreeMap<String, OerRecord>) -> BTreeSet<String> {
    catalog.values().map(|r| r.skill.clone()).collect()
}
