//! Brute-force oracles and generators shared by the integration tests.
//! Each oracle is written from the definition, without calling the code it
//! checks.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Duration, NaiveDate, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use skillrec_core::config::Config;
use skillrec_core::engine::{CreateLearner, Engine};
use skillrec_core::importance::{build_profile, JobSkillProfile, SkillImportanceRecord};
use skillrec_core::learner::{EqualityWeights, LearnerProfile, PersonalInfo, PropertyKey, RatingEvent};
use skillrec_core::oer::{relevance, OerRecord, RaterSample};
use skillrec_core::recommender::{RecommendOutcome, UserHistory};
use skillrec_core::text::{preprocess_with_source, CleanSentence};
use skillrec_core::vacancy::{Label, LabeledSentence};

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(rel)
}

pub fn t0() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2024, 3, 1, 0, 0, 0).unwrap()
}

pub const LOCATIONS: [&str; 3] = ["berlin", "lisbon", "oslo"];
pub const GENDERS: [&str; 2] = ["f", "m"];
pub const EDUCATIONS: [&str; 3] = ["bsc", "msc", "phd"];
pub const JOBS: [&str; 2] = ["data scientist", "web developer"];
pub const SKILLS: [&str; 3] = ["python", "sql", "statistic"];

pub fn profile(id: &str, location: &str, gender: &str, education: &str, job: &str) -> LearnerProfile {
    LearnerProfile {
        user_id: id.to_string(),
        selected_job: job.to_string(),
        skill_levels: BTreeMap::new(),
        personal: PersonalInfo::new(location, gender, education),
        pref_resources: BTreeMap::new(),
        pref_long: 50.0,
        pref_short: 50.0,
        pref_check: 50.0,
        pref_accessibility: 50.0,
    }
}

/// Personal info drawn from small pools so equal properties are common.
pub fn random_profile(rng: &mut ChaCha8Rng, id: &str) -> LearnerProfile {
    let mut p = profile(
        id,
        LOCATIONS.choose(rng).unwrap(),
        GENDERS.choose(rng).unwrap(),
        EDUCATIONS.choose(rng).unwrap(),
        JOBS.choose(rng).unwrap(),
    );
    for skill in SKILLS {
        if rng.gen_bool(0.6) {
            // Coarse levels make the 10-point tolerance bite both ways.
            p.skill_levels.insert(skill.to_string(), f64::from(rng.gen_range(0..=10u8)) * 10.0);
        }
    }
    let long = rng.gen_range(0.0..=100.0);
    p.pref_long = long;
    p.pref_short = 100.0 - long;
    p.pref_check = rng.gen_range(0.0..=100.0);
    p.pref_accessibility = rng.gen_range(0.0..=100.0);
    p
}

pub fn random_weights(rng: &mut ChaCha8Rng) -> EqualityWeights {
    let raw: Vec<f64> = (0..5).map(|_| rng.gen_range(0.0..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut weights = BTreeMap::new();
    for (k, r) in PropertyKey::ALL.iter().zip(raw) {
        // Some maps leave properties out entirely.
        if rng.gen_bool(0.85) {
            weights.insert(*k, 100.0 * r / total);
        }
    }
    EqualityWeights { weights, period: None }
}

/// Equality of two learners on a named property, straight from the rules:
/// categorical fields compare as strings; skill levels are equal when the mean
/// absolute difference over shared skills is at most 10 (no shared skill:
/// equal only if neither has any level).
pub fn oracle_equal(key: &str, a: &LearnerProfile, b: &LearnerProfile) -> bool {
    match key {
        "location" => a.personal.location == b.personal.location,
        "gender" => a.personal.gender == b.personal.gender,
        "education" => a.personal.education == b.personal.education,
        "selected_job" => a.selected_job == b.selected_job,
        "skill_levels" => {
            let mut sum = 0.0;
            let mut n = 0;
            for (skill, x) in &a.skill_levels {
                if let Some(y) = b.skill_levels.get(skill) {
                    sum += (x - y).abs();
                    n += 1;
                }
            }
            if n == 0 {
                a.skill_levels.is_empty() && b.skill_levels.is_empty()
            } else {
                sum / n as f64 <= 10.0
            }
        }
        other => panic!("unknown property {other}"),
    }
}

pub const PROPERTY_NAMES: [&str; 5] = ["location", "gender", "education", "selected_job", "skill_levels"];

pub fn oracle_similarity(a: &LearnerProfile, b: &LearnerProfile, w: &EqualityWeights) -> f64 {
    let mut total = 0.0;
    for name in PROPERTY_NAMES {
        let key: PropertyKey = name.parse().unwrap();
        if oracle_equal(name, a, b) {
            total += w.weights.get(&key).copied().unwrap_or(0.0);
        }
    }
    total / 100.0
}

/// Pairs of distinct users whose latest in-period ratings of the same OER
/// carry the same stars, enumerated over every pair of events.
pub fn oracle_agreeing_pairs(
    events: &[RatingEvent],
    start: DateTime<Utc>,
    end: DateTime<Utc>,
) -> Vec<(String, String, String)> {
    let in_period: Vec<&RatingEvent> = events
        .iter()
        .filter(|e| e.timestamp >= start && e.timestamp < end)
        .collect();
    // An event survives if no later (or equal-time, later-listed) event by
    // the same user for the same OER exists.
    let latest: Vec<&RatingEvent> = in_period
        .iter()
        .enumerate()
        .filter(|(i, e)| {
            !in_period.iter().enumerate().any(|(j, f)| {
                j != *i
                    && f.user_id == e.user_id
                    && f.oer_id == e.oer_id
                    && (f.timestamp > e.timestamp || (f.timestamp == e.timestamp && j > *i))
            })
        })
        .map(|(_, e)| *e)
        .collect();
    let mut pairs = Vec::new();
    for (i, a) in latest.iter().enumerate() {
        for b in &latest[i + 1..] {
            if a.oer_id == b.oer_id && a.user_id != b.user_id && a.stars == b.stars {
                let (x, y) = if a.user_id < b.user_id {
                    (&a.user_id, &b.user_id)
                } else {
                    (&b.user_id, &a.user_id)
                };
                pairs.push((a.oer_id.clone(), x.clone(), y.clone()));
            }
        }
    }
    pairs.sort();
    pairs
}

/// Normalized equality ratios from brute-force pair enumeration; `None` when
/// there is nothing to normalize.
pub fn oracle_equality(
    events: &[RatingEvent],
    start: DateTime<Utc>,
    end: DateTime<Utc>,
    profiles: &BTreeMap<String, LearnerProfile>,
) -> Option<BTreeMap<String, f64>> {
    let pairs: Vec<(&LearnerProfile, &LearnerProfile)> = oracle_agreeing_pairs(events, start, end)
        .iter()
        .filter_map(|(_, a, b)| Some((profiles.get(a)?, profiles.get(b)?)))
        .collect();
    if pairs.is_empty() {
        return None;
    }
    let ratios: Vec<f64> = PROPERTY_NAMES
        .iter()
        .map(|name| {
            pairs.iter().filter(|(a, b)| oracle_equal(name, a, b)).count() as f64 / pairs.len() as f64
        })
        .collect();
    let total: f64 = ratios.iter().sum();
    if total == 0.0 {
        return None;
    }
    Some(
        PROPERTY_NAMES
            .iter()
            .zip(ratios)
            .map(|(n, r)| (n.to_string(), 100.0 * r / total))
            .collect(),
    )
}

/// A random rating log over `users` and a handful of OERs, with repeats and
/// events outside the period.
pub fn random_log(rng: &mut ChaCha8Rng, users: &[String], n_events: usize) -> Vec<RatingEvent> {
    (0..n_events)
        .map(|_| {
            let user = users.choose(rng).unwrap();
            let oer = format!("oer{}", rng.gen_range(0..6));
            let ts = t0() + Duration::hours(rng.gen_range(-24 * 5..24 * 40));
            RatingEvent::new(user, &oer, "r", rng.gen_range(1..=5), ts).unwrap()
        })
        .collect()
}

/// Plain TFIDF over documents given as lists of token lists. Terms are
/// unigrams and adjacent-token bigrams within a sentence.
pub fn oracle_tfidf(docs: &[Vec<Vec<String>>], min_df: usize) -> Vec<(String, f64, usize)> {
    let n = docs.len() as f64;
    let doc_terms: Vec<Vec<String>> = docs
        .iter()
        .map(|sentences| {
            let mut terms = Vec::new();
            for s in sentences {
                for t in s {
                    terms.push(t.clone());
                }
                for i in 0..s.len().saturating_sub(1) {
                    terms.push(format!("{} {}", s[i], s[i + 1]));
                }
            }
            terms
        })
        .collect();
    let mut vocabulary: Vec<String> = doc_terms.iter().flatten().cloned().collect();
    vocabulary.sort();
    vocabulary.dedup();
    let mut out = Vec::new();
    for term in vocabulary {
        let df = doc_terms.iter().filter(|d| d.contains(&term)).count();
        if df < min_df {
            continue;
        }
        let idf = (n / df as f64).ln();
        let score: f64 = doc_terms
            .iter()
            .map(|d| d.iter().filter(|t| **t == term).count() as f64 * idf)
            .sum();
        out.push((term, score, df));
    }
    out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    out
}

/// Loss of an explicit four-component property vector.
pub fn oracle_loss(samples: &[RaterSample], x: [f64; 4]) -> f64 {
    samples
        .iter()
        .map(|s| {
            let pred: f64 = (0..4).map(|k| s.theta[k] * x[k]).sum();
            (pred - s.satisfaction).abs()
        })
        .sum()
}

/// Minimum loss over a 0.05 grid of (how_long, quality, accessibility), with
/// how_short tied to 1 - how_long.
pub fn grid_minimum(samples: &[RaterSample]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..=20 {
        for j in 0..=20 {
            for k in 0..=20 {
                let (a, b, c) = (i as f64 * 0.05, j as f64 * 0.05, k as f64 * 0.05);
                best = best.min(oracle_loss(samples, [a, 1.0 - a, b, c]));
            }
        }
    }
    best
}

/// A learner whose aligned preferences normalize to `theta`.
pub fn rater_with_theta(id: &str, theta: [f64; 4]) -> LearnerProfile {
    let max = theta.iter().copied().fold(0.0, f64::max);
    let mut p = profile(id, "berlin", "f", "msc", "data scientist");
    p.pref_long = 100.0 * theta[0] / max;
    p.pref_short = 100.0 * theta[1] / max;
    p.pref_check = 100.0 * theta[2] / max;
    p.pref_accessibility = 100.0 * theta[3] / max;
    p
}

pub fn random_theta(rng: &mut ChaCha8Rng) -> [f64; 4] {
    let raw: [f64; 4] = [rng.gen(), rng.gen(), rng.gen(), rng.gen()];
    let s: f64 = raw.iter().sum();
    raw.map(|v| v / s)
}

pub fn rating_with_satisfaction(user: &str, oer: &str, satisfaction: f64) -> RatingEvent {
    RatingEvent {
        user_id: user.to_string(),
        oer_id: oer.to_string(),
        recommendation_id: format!("r-{user}"),
        stars: 3,
        satisfaction,
        timestamp: t0(),
    }
}

pub fn oer(id: &str, resource: &str, skill: &str) -> OerRecord {
    OerRecord::new_default(id, resource, skill, "someone", &format!("https://example.org/{id}"))
}

pub fn oracle_cosine(u: &[f64], v: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut nu = 0.0;
    let mut nv = 0.0;
    for i in 0..u.len() {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if nu == 0.0 || nv == 0.0 {
        0.0
    } else {
        dot / (nu.sqrt() * nv.sqrt())
    }
}

/// Counts how often each key occurs.
pub fn tally<'a, I: IntoIterator<Item = &'a str>>(items: I) -> HashMap<&'a str, usize> {
    let mut m = HashMap::new();
    for i in items {
        *m.entry(i).or_default() += 1;
    }
    m
}

pub const SKILL_WORDS: [&str; 12] = [
    "python", "sql", "tableau", "regression", "spark", "docker", "kubernetes", "pandas", "excel",
    "statistic", "java", "tensorflow",
];

pub const OTHER_WORDS: [&str; 12] = [
    "holiday", "office", "canteen", "pension", "bonus", "parking", "founded", "mission", "culture",
    "headquarter", "gym", "commute",
];

/// Sentences whose label is decided by which vocabulary they draw from.
pub fn separable_corpus(n: usize, seed: u64) -> Vec<LabeledSentence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            // One skill sentence in four, like real vacancies.
            let label = if i % 4 == 0 { Label::Skill } else { Label::Other };
            let pool = if label == Label::Skill { &SKILL_WORDS } else { &OTHER_WORDS };
            let len = rng.gen_range(2..=5);
            let tokens: Vec<&str> = (0..len).map(|_| *pool.choose(&mut rng).unwrap()).collect();
            LabeledSentence { sentence: CleanSentence::from_tokens(tokens), label }
        })
        .collect()
}

pub fn load_tfidf_fixture(name: &str) -> Vec<CleanSentence> {
    let text = std::fs::read_to_string(fixture(&format!("tfidf/{name}"))).unwrap();
    text.lines()
        .flat_map(|line| {
            let (doc, sentence) = line.split_once('\t').unwrap();
            preprocess_with_source(sentence, doc, Some("required skills"))
        })
        .collect()
}

pub fn as_documents(sentences: &[CleanSentence]) -> Vec<Vec<Vec<String>>> {
    let mut docs: BTreeMap<&str, Vec<Vec<String>>> = BTreeMap::new();
    for s in sentences {
        docs.entry(&s.source_vacancy).or_default().push(s.tokens.clone());
    }
    docs.into_values().collect()
}

pub fn planted_raters(rng: &mut ChaCha8Rng, n: usize, x: [f64; 4]) -> Vec<(LearnerProfile, RatingEvent)> {
    (0..n)
        .map(|i| {
            let theta = random_theta(rng);
            let y: f64 = (0..4).map(|k| theta[k] * x[k]).sum();
            let id = format!("r{i}");
            (rater_with_theta(&id, theta), rating_with_satisfaction(&id, "o", y))
        })
        .collect()
}

pub fn samples_of(raters: &[(LearnerProfile, RatingEvent)]) -> Vec<RaterSample> {
    raters
        .iter()
        .map(|(p, e)| RaterSample::from_profile(p, e.satisfaction))
        .collect()
}

pub fn unit_point(o: &OerRecord) -> [f64; 4] {
    [o.how_long, o.how_short, o.quality, o.accessibility].map(|v| v / 100.0)
}

fn lcm(a: u128, b: u128) -> u128 {
    fn gcd(a: u128, b: u128) -> u128 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    a / gcd(a, b) * b
}

/// Below-average rule with integers only: `rel_j < mean` is
/// `n * a_j * (L / b_j) < sum_i a_i * (L / b_i)` for a common multiple `L`.
pub fn oracle_excluded(records: &[OerRecord], skill: &str) -> BTreeSet<String> {
    let rated: Vec<&OerRecord> = records.iter().filter(|r| r.skill == skill && r.total_recom > 0).collect();
    let l = rated.iter().fold(1u128, |acc, r| lcm(acc, r.total_recom as u128));
    let scaled = |r: &OerRecord| (r.total_recom - r.irrelev_count) as u128 * (l / r.total_recom as u128);
    let sum: u128 = rated.iter().map(|r| scaled(r)).sum();
    let n = rated.len() as u128;
    rated
        .iter()
        .filter(|r| n * scaled(r) < sum)
        .map(|r| r.oer_id.clone())
        .collect()
}

pub fn random_relevance_catalog(rng: &mut ChaCha8Rng, n: usize) -> Vec<OerRecord> {
    (0..n)
        .map(|i| {
            let skill = ["python", "sql"][rng.gen_range(0..2)];
            let mut o = oer(&format!("o{i:02}"), "wisc", skill);
            if rng.gen_bool(0.85) {
                o.total_recom = rng.gen_range(1..=40);
                o.irrelev_count = rng.gen_range(0..=o.total_recom);
            }
            o.relevance = relevance(o.total_recom, o.irrelev_count);
            o.excluded_for_skill = rng.gen_bool(0.3);
            o
        })
        .collect()
}

pub const REPOS: [&str; 3] = ["merlot", "skillscommons", "wisconline"];

pub fn job_profile(skills: &[(&str, f64)]) -> JobSkillProfile {
    let date = NaiveDate::from_ymd_opt(2024, 1, 1).unwrap();
    let records = skills
        .iter()
        .map(|(s, i)| SkillImportanceRecord {
            skill: s.to_string(),
            job: "data scientist".into(),
            location: String::new(),
            importance: *i,
            last_updated: date,
        })
        .collect();
    build_profile("data scientist", "", records, None)
}

pub fn random_catalog(rng: &mut ChaCha8Rng, n: usize) -> BTreeMap<String, OerRecord> {
    (0..n)
        .map(|i| {
            let skill = if rng.gen_bool(0.8) { "python" } else { "sql" };
            let mut o = oer(&format!("o{i:02}"), REPOS[rng.gen_range(0..3)], skill);
            o.set_length(rng.gen_range(0.0..=100.0));
            o.quality = rng.gen_range(0.0..=100.0);
            o.accessibility = rng.gen_range(0.0..=100.0);
            // Coarse levels so band edges are hit exactly.
            o.level = f64::from(rng.gen_range(0..=20u8)) * 5.0;
            o.excluded_for_skill = rng.gen_bool(0.15);
            if rng.gen_bool(0.1) {
                // Exact duplicate properties exercise the id tie-break.
                o.set_length(50.0);
                o.quality = 50.0;
                o.accessibility = 50.0;
            }
            (o.oer_id.clone(), o)
        })
        .collect()
}

pub fn random_learner(rng: &mut ChaCha8Rng) -> LearnerProfile {
    let mut p = random_profile(rng, "u");
    p.skill_levels.insert("python".into(), f64::from(rng.gen_range(0..=19u8)) * 5.0);
    for r in REPOS {
        if rng.gen_bool(0.8) {
            p.pref_resources.insert(r.to_string(), rng.gen_range(0.0..=100.0));
        }
    }
    p
}

pub fn random_history(rng: &mut ChaCha8Rng, catalog: &BTreeMap<String, OerRecord>) -> UserHistory {
    let mut h = UserHistory::default();
    for id in catalog.keys() {
        match rng.gen_range(0..10) {
            0 => {
                h.blocked.insert(id.clone());
            }
            1 => {
                h.demoted.entry("python".into()).or_default().insert(id.clone());
            }
            _ => {}
        }
    }
    h
}

/// Eligible OERs for the skill under the band rule: 25, then 50, then none.
pub fn oracle_candidates(
    p: &LearnerProfile,
    catalog: &BTreeMap<String, OerRecord>,
    skill: &str,
    blocked: &BTreeSet<String>,
) -> Vec<String> {
    let level = p.skill_levels.get(skill).copied().unwrap_or(0.0);
    for band in [25.0, 50.0, f64::INFINITY] {
        let ids: Vec<String> = catalog
            .values()
            .filter(|o| o.skill == skill && !o.excluded_for_skill && !blocked.contains(&o.oer_id))
            .filter(|o| (o.level - level).abs() <= band)
            .map(|o| o.oer_id.clone())
            .collect();
        if !ids.is_empty() {
            return ids;
        }
    }
    Vec::new()
}

pub fn learner_vector(p: &LearnerProfile, repos: &[String]) -> Vec<f64> {
    let mut v = vec![p.pref_long, p.pref_short, p.pref_check, p.pref_accessibility];
    for r in repos {
        v.push(p.pref_resources.get(r).copied().unwrap_or(50.0));
    }
    v
}

pub fn oer_vector(o: &OerRecord, repos: &[String]) -> Vec<f64> {
    let mut v = vec![o.how_long, o.how_short, o.quality, o.accessibility];
    for r in repos {
        v.push(if *r == o.resource { 100.0 } else { 0.0 });
    }
    v
}

/// Highest cosine, smallest id on ties, over the oracle candidates.
pub fn oracle_pick(p: &LearnerProfile, catalog: &BTreeMap<String, OerRecord>, history: &UserHistory) -> Option<String> {
    let mut repos: Vec<String> = catalog.values().map(|o| o.resource.clone()).collect();
    repos.sort();
    repos.dedup();
    let mut with_demoted = history.blocked.clone();
    with_demoted.extend(history.demoted.get("python").into_iter().flatten().cloned());
    let mut ids = oracle_candidates(p, catalog, "python", &with_demoted);
    if ids.is_empty() {
        ids = oracle_candidates(p, catalog, "python", &history.blocked);
    }
    let u = learner_vector(p, &repos);
    let mut best: Option<(f64, String)> = None;
    for id in ids {
        let score = oracle_cosine(&u, &oer_vector(&catalog[&id], &repos));
        let better = match &best {
            None => true,
            Some((s, b)) => score > *s || (score == *s && id < *b),
        };
        if better {
            best = Some((score, id));
        }
    }
    best.map(|(_, id)| id)
}

pub const WORKLOAD_STEPS: usize = 60;

pub fn durable_config(dir: &Path) -> Config {
    Config {
        data_dir: dir.to_path_buf(),
        snapshot_every: 7,
        ..Config::default()
    }
}

pub fn seed_catalog(e: &mut Engine) {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let records = (0..12)
        .map(|i| {
            let mut o = oer(&format!("o{i:02}"), ["merlot", "wisconline"][i % 2], ["python", "sql"][i % 2]);
            o.set_length(rng.gen_range(0.0..=100.0));
            o.quality = rng.gen_range(0.0..=100.0);
            o.accessibility = rng.gen_range(0.0..=100.0);
            o.level = rng.gen_range(0.0..=60.0);
            o
        })
        .collect();
    e.import_records(records).unwrap();
    let date = NaiveDate::from_ymd_opt(2024, 1, 1).unwrap();
    let entries = [("python", 100.0), ("sql", 70.0)]
        .iter()
        .map(|(s, i)| SkillImportanceRecord {
            skill: s.to_string(),
            job: "data scientist".into(),
            location: String::new(),
            importance: *i,
            last_updated: date,
        })
        .collect();
    e.publish_profiles(vec![build_profile("data scientist", "", entries, None)]).unwrap();
}

/// Workload step `i`, a function of the step number and current state only,
/// so it can resume after a restart.
pub fn workload_step(e: &mut Engine, i: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(i as u64);
    let now = t0() + Duration::hours(i as i64);
    let users: Vec<String> = e.state().learners.keys().cloned().collect();
    if users.len() < 3 || rng.gen_bool(0.1) {
        e.create_learner(CreateLearner {
            job: "data scientist".into(),
            personal: PersonalInfo::new(LOCATIONS[rng.gen_range(0..3)], GENDERS[rng.gen_range(0..2)], "msc"),
            skill_levels: BTreeMap::new(),
        })
        .unwrap();
        return;
    }
    if i % 15 == 14 {
        e.run_batch(now).unwrap();
        return;
    }
    let user = &users[rng.gen_range(0..users.len())];
    if rng.gen_bool(0.1) {
        e.update_skills(user, BTreeMap::from([("python".to_string(), rng.gen_range(0.0..=90.0))])).unwrap();
        return;
    }
    let RecommendOutcome::Issued(r) = e.recommendation(user, now).unwrap() else {
        return;
    };
    match rng.gen_range(0..6) {
        0 => drop(e.mark_irrelevant(&r.recommendation_id, now).unwrap()),
        1 => drop(e.change(&r.recommendation_id, now).unwrap()),
        _ => drop(e.rate(&r.recommendation_id, rng.gen_range(1..=5), now).unwrap()),
    }
}

pub fn fresh_durable(dir: &Path) -> Engine {
    let mut e = Engine::open(durable_config(dir)).unwrap();
    seed_catalog(&mut e);
    e
}
