//! Learner profiles, user-user similarity and preference updates.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oer::OerRecord;

pub const DEFAULT_PREFERENCE: f64 = 50.0;
pub const DEFAULT_K_NEIGHBORS: usize = 10;
pub const DEFAULT_ETA: f64 = 0.1;
pub const DEFAULT_LEVEL_STEP: f64 = 10.0;
/// Two learners have "equal" skill levels when the mean absolute difference
/// over their shared skills is at most this much.
pub const SKILL_LEVEL_TOLERANCE: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PersonalInfo {
    pub location: String,
    pub gender: String,
    pub education: String,
}

impl PersonalInfo {
    pub fn new(location: &str, gender: &str, education: &str) -> Self {
        PersonalInfo {
            location: normalize_category(location),
            gender: normalize_category(gender),
            education: normalize_category(education),
        }
    }
}

pub fn normalize_category(raw: &str) -> String {
    raw.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerProfile {
    pub user_id: String,
    pub selected_job: String,
    pub skill_levels: BTreeMap<String, f64>,
    pub personal: PersonalInfo,
    pub pref_resources: BTreeMap<String, f64>,
    pub pref_long: f64,
    pub pref_short: f64,
    pub pref_check: f64,
    pub pref_accessibility: f64,
}

impl LearnerProfile {
    pub fn skill_level(&self, skill: &str) -> f64 {
        self.skill_levels.get(skill).copied().unwrap_or(0.0)
    }

    /// The four aligned scalar preferences: long, short, check, accessibility.
    pub fn aligned_preferences(&self) -> [f64; 4] {
        [
            self.pref_long,
            self.pref_short,
            self.pref_check,
            self.pref_accessibility,
        ]
    }
}

/// Properties a learner supplies when registering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewLearner {
    pub user_id: String,
    pub selected_job: String,
    pub skill_levels: BTreeMap<String, f64>,
    pub personal: PersonalInfo,
}

/// Known properties compared when measuring learner similarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyKey {
    Location,
    Gender,
    Education,
    SelectedJob,
    SkillLevels,
}

impl PropertyKey {
    pub const ALL: [PropertyKey; 5] = [
        PropertyKey::Location,
        PropertyKey::Gender,
        PropertyKey::Education,
        PropertyKey::SelectedJob,
        PropertyKey::SkillLevels,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PropertyKey::Location => "location",
            PropertyKey::Gender => "gender",
            PropertyKey::Education => "education",
            PropertyKey::SelectedJob => "selected_job",
            PropertyKey::SkillLevels => "skill_levels",
        }
    }

    /// Whether two learners count as equal on this property.
    pub fn equal(self, a: &LearnerProfile, b: &LearnerProfile) -> bool {
        match self {
            PropertyKey::Location => a.personal.location == b.personal.location,
            PropertyKey::Gender => a.personal.gender == b.personal.gender,
            PropertyKey::Education => a.personal.education == b.personal.education,
            PropertyKey::SelectedJob => a.selected_job == b.selected_job,
            PropertyKey::SkillLevels => skill_levels_equal(&a.skill_levels, &b.skill_levels),
        }
    }
}

impl fmt::Display for PropertyKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PropertyKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PropertyKey::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::UnknownProperty(s.to_string()))
    }
}

fn skill_levels_equal(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> bool {
    let diffs: Vec<f64> = a
        .iter()
        .filter_map(|(k, x)| b.get(k).map(|y| (x - y).abs()))
        .collect();
    if diffs.is_empty() {
        return a.is_empty() && b.is_empty();
    }
    diffs.iter().sum::<f64>() / diffs.len() as f64 <= SKILL_LEVEL_TOLERANCE
}

/// Half-open time interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Period {
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
}

impl Period {
    pub fn contains(&self, t: DateTime<Utc>) -> bool {
        t >= self.start && t < self.end
    }
}

/// Per-property weights summing to 100 (or empty when no evidence exists).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualityWeights {
    pub weights: BTreeMap<PropertyKey, f64>,
    pub period: Option<Period>,
}

impl EqualityWeights {
    pub fn empty() -> Self {
        EqualityWeights {
            weights: BTreeMap::new(),
            period: None,
        }
    }

    /// Uniform weights over every known property, used before any ratings exist.
    pub fn uniform() -> Self {
        let share = 100.0 / PropertyKey::ALL.len() as f64;
        EqualityWeights {
            weights: PropertyKey::ALL.iter().map(|&k| (k, share)).collect(),
            period: None,
        }
    }

    pub fn get(&self, key: PropertyKey) -> f64 {
        self.weights.get(&key).copied().unwrap_or(0.0)
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.weights.values().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingEvent {
    pub user_id: String,
    pub oer_id: String,
    pub recommendation_id: String,
    pub stars: u8,
    /// `(stars - 1) / 4`.
    pub satisfaction: f64,
    pub timestamp: DateTime<Utc>,
}

impl RatingEvent {
    pub fn new(
        user_id: &str,
        oer_id: &str,
        recommendation_id: &str,
        stars: u8,
        timestamp: DateTime<Utc>,
    ) -> Result<Self> {
        Ok(RatingEvent {
            user_id: user_id.to_string(),
            oer_id: oer_id.to_string(),
            recommendation_id: recommendation_id.to_string(),
            stars,
            satisfaction: satisfaction_from_stars(stars)?,
            timestamp,
        })
    }
}

pub fn satisfaction_from_stars(stars: u8) -> Result<f64> {
    if (1..=5).contains(&stars) {
        Ok(f64::from(stars - 1) / 4.0)
    } else {
        Err(Error::State(format!("stars must be 1..=5, got {stars}")))
    }
}

/// A pair of distinct users who gave the same star rating to the same OER.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AgreeingPair {
    pub oer_id: String,
    pub first: String,
    pub second: String,
}

/// Agreeing user pairs within `period`. When a user rated an OER more than
/// once in the period their latest rating counts. Each OER contributes its
/// own pairs, so a user pair may appear once per shared OER.
pub fn agreeing_pairs(events: &[RatingEvent], period: &Period) -> Vec<AgreeingPair> {
    let mut latest: BTreeMap<(&str, &str), &RatingEvent> = BTreeMap::new();
    for e in events.iter().filter(|e| period.contains(e.timestamp)) {
        let slot = latest.entry((e.oer_id.as_str(), e.user_id.as_str())).or_insert(e);
        if e.timestamp >= slot.timestamp {
            *slot = e;
        }
    }
    let mut by_oer: BTreeMap<&str, Vec<&RatingEvent>> = BTreeMap::new();
    for ((oer, _), e) in latest {
        by_oer.entry(oer).or_default().push(e);
    }
    let mut pairs = Vec::new();
    for (oer, ratings) in by_oer {
        for (i, a) in ratings.iter().enumerate() {
            for b in &ratings[i + 1..] {
                if a.stars == b.stars {
                    pairs.push(AgreeingPair {
                        oer_id: oer.to_string(),
                        first: a.user_id.clone(),
                        second: b.user_id.clone(),
                    });
                }
            }
        }
    }
    pairs
}

/// Derives equality weights from agreeing rating pairs: for each property the
/// share of pairs equal on it, normalized so the shares sum to 100.
///
/// Pairs involving users without a profile are ignored. Returns empty weights
/// when there are no usable pairs or no pair agrees on any property.
pub fn equality_values(
    events: &[RatingEvent],
    period: &Period,
    profiles: &BTreeMap<String, LearnerProfile>,
) -> EqualityWeights {
    let pairs: Vec<(&LearnerProfile, &LearnerProfile)> = agreeing_pairs(events, period)
        .into_iter()
        .filter_map(|p| Some((profiles.get(&p.first)?, profiles.get(&p.second)?)))
        .collect();
    if pairs.is_empty() {
        return EqualityWeights {
            weights: BTreeMap::new(),
            period: Some(*period),
        };
    }
    let n = pairs.len() as f64;
    let ratios: BTreeMap<PropertyKey, f64> = PropertyKey::ALL
        .iter()
        .map(|&k| {
            let equal = pairs.iter().filter(|(a, b)| k.equal(a, b)).count();
            (k, equal as f64 / n)
        })
        .collect();
    let total: f64 = ratios.values().sum();
    let weights = if total > 0.0 {
        ratios
            .into_iter()
            .map(|(k, r)| (k, 100.0 * r / total))
            .collect()
    } else {
        BTreeMap::new()
    };
    EqualityWeights {
        weights,
        period: Some(*period),
    }
}

/// The equality weight of `key` if `i` and `j` are equal on it, else 0.
pub fn sim_effect(
    i: &LearnerProfile,
    j: &LearnerProfile,
    key: PropertyKey,
    w: &EqualityWeights,
) -> f64 {
    if key.equal(i, j) {
        w.get(key)
    } else {
        0.0
    }
}

/// [`sim_effect`] addressed by property name.
pub fn sim_effect_by_name(
    i: &LearnerProfile,
    j: &LearnerProfile,
    key: &str,
    w: &EqualityWeights,
) -> Result<f64> {
    Ok(sim_effect(i, j, key.parse()?, w))
}

/// Sum of similarity effects over the known properties, divided by 100.
/// Clamped because weights summing to 100 can round to slightly more.
pub fn similarity(i: &LearnerProfile, j: &LearnerProfile, w: &EqualityWeights) -> f64 {
    let total = PropertyKey::ALL
        .iter()
        .map(|&k| sim_effect(i, j, k, w))
        .sum::<f64>();
    (total / 100.0).clamp(0.0, 1.0)
}

fn provisional_profile(known: &NewLearner, repositories: &[String]) -> LearnerProfile {
    LearnerProfile {
        user_id: known.user_id.clone(),
        selected_job: known.selected_job.clone(),
        skill_levels: known
            .skill_levels
            .iter()
            .map(|(k, v)| (k.clone(), v.clamp(0.0, 100.0)))
            .collect(),
        personal: PersonalInfo::new(
            &known.personal.location,
            &known.personal.gender,
            &known.personal.education,
        ),
        pref_resources: repositories
            .iter()
            .map(|r| (r.clone(), DEFAULT_PREFERENCE))
            .collect(),
        pref_long: DEFAULT_PREFERENCE,
        pref_short: DEFAULT_PREFERENCE,
        pref_check: DEFAULT_PREFERENCE,
        pref_accessibility: DEFAULT_PREFERENCE,
    }
}

/// Pool members used to seed a new learner: the `k` most similar users with
/// positive similarity, ties broken by user id.
pub fn nearest_neighbors<'a>(
    target: &LearnerProfile,
    pool: &'a [LearnerProfile],
    w: &EqualityWeights,
    k: usize,
) -> Vec<(&'a LearnerProfile, f64)> {
    let mut scored: Vec<(&LearnerProfile, f64)> = pool
        .iter()
        .filter(|p| p.user_id != target.user_id)
        .map(|p| (p, similarity(target, p, w)))
        .filter(|(_, s)| *s > 0.0)
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.user_id.cmp(&b.0.user_id)));
    scored.truncate(k);
    scored
}

/// Builds a new learner's profile. Unknown preferences are the
/// similarity-weighted average of the nearest pool members, or 50 when the
/// pool offers no similar user. `repositories` lists the resource
/// preferences every profile carries.
pub fn init_profile(
    known: &NewLearner,
    pool: &[LearnerProfile],
    w: &EqualityWeights,
    k_neighbors: usize,
    repositories: &[String],
) -> LearnerProfile {
    let mut profile = provisional_profile(known, repositories);
    let neighbors = nearest_neighbors(&profile, pool, w, k_neighbors);
    let total: f64 = neighbors.iter().map(|(_, s)| s).sum();
    if neighbors.is_empty() || total <= 0.0 {
        return profile;
    }
    let average = |f: &dyn Fn(&LearnerProfile) -> f64| -> f64 {
        neighbors.iter().map(|(p, s)| s * f(p)).sum::<f64>() / total
    };
    profile.pref_long = average(&|p| p.pref_long);
    profile.pref_short = average(&|p| p.pref_short);
    profile.pref_check = average(&|p| p.pref_check);
    profile.pref_accessibility = average(&|p| p.pref_accessibility);

    let resources: BTreeSet<&String> = repositories
        .iter()
        .chain(neighbors.iter().flat_map(|(p, _)| p.pref_resources.keys()))
        .collect();
    profile.pref_resources = resources
        .into_iter()
        .map(|r| {
            let value = average(&|p| {
                p.pref_resources
                    .get(r)
                    .copied()
                    .unwrap_or(DEFAULT_PREFERENCE)
            });
            (r.clone(), value)
        })
        .collect();
    profile
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpdateParams {
    /// Preference step size in `(0, 1]`.
    pub eta: f64,
    /// Skill-level gain for a fully satisfied rating.
    pub level_step: f64,
}

impl Default for UpdateParams {
    fn default() -> Self {
        UpdateParams {
            eta: DEFAULT_ETA,
            level_step: DEFAULT_LEVEL_STEP,
        }
    }
}

impl UpdateParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::Config(format!("eta must lie in (0, 1], got {}", self.eta)));
        }
        if !(0.0..=100.0).contains(&self.level_step) {
            return Err(Error::Config(format!(
                "level_step must lie in [0, 100], got {}",
                self.level_step
            )));
        }
        Ok(())
    }
}

fn pull(pref: f64, target: f64, coefficient: f64) -> f64 {
    (pref + coefficient * (target - pref)).clamp(0.0, 100.0)
}

/// Moves the learner's preferences toward (satisfaction above 0.5) or away
/// from (below 0.5) the rated OER's properties, and raises the learner's level
/// in the OER's skill in proportion to satisfaction.
pub fn apply_rating(
    profile: &LearnerProfile,
    oer: &OerRecord,
    event: &RatingEvent,
    params: &UpdateParams,
) -> Result<LearnerProfile> {
    if event.user_id != profile.user_id {
        return Err(Error::UserMismatch {
            profile: profile.user_id.clone(),
            event: event.user_id.clone(),
        });
    }
    params.validate()?;
    let c = params.eta * (2.0 * event.satisfaction - 1.0);
    let mut next = profile.clone();
    next.pref_long = pull(profile.pref_long, oer.how_long, c);
    next.pref_short = pull(profile.pref_short, oer.how_short, c);
    next.pref_check = pull(profile.pref_check, oer.quality, c);
    next.pref_accessibility = pull(profile.pref_accessibility, oer.accessibility, c);
    next.pref_resources
        .entry(oer.resource.clone())
        .or_insert(DEFAULT_PREFERENCE);
    for (repo, pref) in next.pref_resources.iter_mut() {
        let target = if *repo == oer.resource { 100.0 } else { 0.0 };
        *pref = pull(*pref, target, c);
    }
    let level = next.skill_levels.entry(oer.skill.clone()).or_insert(0.0);
    *level = (*level + params.level_step * event.satisfaction).clamp(0.0, 100.0);
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    pub(crate) fn learner(id: &str, loc: &str, gender: &str, edu: &str) -> LearnerProfile {
        LearnerProfile {
            user_id: id.into(),
            selected_job: "data scientist".into(),
            skill_levels: BTreeMap::from([("python".to_string(), 20.0)]),
            personal: PersonalInfo::new(loc, gender, edu),
            pref_resources: BTreeMap::from([("skillscommons".into(), 50.0), ("wisc".into(), 50.0)]),
            pref_long: 50.0,
            pref_short: 50.0,
            pref_check: 50.0,
            pref_accessibility: 50.0,
        }
    }

    fn oer(how_long: f64, quality: f64, accessibility: f64) -> OerRecord {
        let mut o = OerRecord::new_default("o1", "wisc", "python", "ann", "http://x");
        o.set_length(how_long);
        o.quality = quality;
        o.accessibility = accessibility;
        o
    }

    fn ts(day: u32) -> DateTime<Utc> {
        Utc.with_ymd_and_hms(2020, 1, day, 12, 0, 0).unwrap()
    }

    fn rating(user: &str, oer: &str, stars: u8, day: u32) -> RatingEvent {
        RatingEvent::new(user, oer, "r", stars, ts(day)).unwrap()
    }

    #[test]
    fn satisfaction_mapping() {
        assert_eq!(satisfaction_from_stars(1).unwrap(), 0.0);
        assert_eq!(satisfaction_from_stars(3).unwrap(), 0.5);
        assert_eq!(satisfaction_from_stars(5).unwrap(), 1.0);
        assert!(satisfaction_from_stars(0).is_err());
        assert!(satisfaction_from_stars(6).is_err());
    }

    #[test]
    fn sim_effect_cases() {
        let w = EqualityWeights {
            weights: BTreeMap::from([(PropertyKey::Location, 40.0), (PropertyKey::Gender, 10.0)]),
            period: None,
        };
        let a = learner("a", "CA", "f", "msc");
        let b = learner("b", "ca", "m", "msc");
        assert_eq!(sim_effect(&a, &b, PropertyKey::Location, &w), 40.0);
        assert_eq!(sim_effect(&a, &b, PropertyKey::Gender, &w), 0.0);
        assert_eq!(sim_effect_by_name(&a, &a, "gender", &w).unwrap(), 10.0);
        assert!(matches!(
            sim_effect_by_name(&a, &b, "height", &w),
            Err(Error::UnknownProperty(_))
        ));
    }

    #[test]
    fn similarity_cases() {
        let w = EqualityWeights {
            weights: BTreeMap::from([
                (PropertyKey::Location, 40.0),
                (PropertyKey::Gender, 10.0),
                (PropertyKey::Education, 30.0),
                (PropertyKey::SelectedJob, 5.0),
                (PropertyKey::SkillLevels, 15.0),
            ]),
            period: None,
        };
        let a = learner("a", "ca", "f", "msc");
        let mut b = learner("b", "ca", "f", "bsc");
        b.selected_job = "engineer".into();
        b.skill_levels.insert("python".into(), 90.0);
        assert!((similarity(&a, &b, &w) - 0.5).abs() < 1e-12);
        assert!((similarity(&a, &a, &w) - 1.0).abs() < 1e-12);
        let mut c = learner("c", "ny", "m", "phd");
        c.selected_job = "engineer".into();
        c.skill_levels = BTreeMap::from([("cad".to_string(), 10.0)]);
        assert_eq!(similarity(&a, &c, &w), 0.0);
        assert_eq!(similarity(&a, &b, &EqualityWeights::empty()), 0.0);
    }

    #[test]
    fn equality_values_worked_example() {
        // Four agreeing pairs; location equal in 2, gender in 3, education in 1;
        // job and skill levels never equal.
        let mut profiles = BTreeMap::new();
        let specs = [
            ("u1", "ca", "f", "bsc", "j1", 0.0),
            ("u2", "ca", "f", "msc", "j2", 50.0),
            ("u3", "ny", "f", "msc", "j3", 100.0),
            ("u4", "tx", "m", "phd", "j4", 25.0),
            ("u5", "tx", "m", "phd2", "j5", 75.0),
        ];
        for (id, loc, g, e, job, level) in specs {
            let mut p = learner(id, loc, g, e);
            p.selected_job = job.into();
            p.skill_levels = BTreeMap::from([("python".to_string(), level)]);
            profiles.insert(id.to_string(), p);
        }
        // Agreeing pairs: (u1,u2) on a, (u2,u3) on b, (u4,u5) on c, (u3,u4) on d.
        let events = vec![
            rating("u1", "a", 5, 2),
            rating("u2", "a", 5, 2),
            rating("u2", "b", 3, 3),
            rating("u3", "b", 3, 3),
            rating("u4", "c", 4, 4),
            rating("u5", "c", 4, 4),
            rating("u3", "d", 2, 5),
            rating("u4", "d", 2, 5),
            rating("u1", "d", 1, 5),
        ];
        let period = Period {
            start: ts(1),
            end: ts(10),
        };
        let pairs = agreeing_pairs(&events, &period);
        assert_eq!(pairs.len(), 4);
        let w = equality_values(&events, &period, &profiles);
        // location: (u1,u2),(u4,u5) = 2/4; gender: (u1,u2),(u2,u3),(u4,u5) = 3/4;
        // education: (u2,u3) = 1/4.
        assert!((w.get(PropertyKey::Location) - 100.0 / 3.0).abs() < 1e-9);
        assert!((w.get(PropertyKey::Gender) - 50.0).abs() < 1e-9);
        assert!((w.get(PropertyKey::Education) - 100.0 / 6.0).abs() < 1e-9);
        assert_eq!(w.get(PropertyKey::SelectedJob), 0.0);
        assert_eq!(w.get(PropertyKey::SkillLevels), 0.0);
        assert!((w.total() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn equality_values_without_pairs_is_empty() {
        let profiles = BTreeMap::from([("u1".to_string(), learner("u1", "ca", "f", "bsc"))]);
        let events = vec![rating("u1", "a", 5, 2), rating("u2", "a", 4, 2)];
        let period = Period {
            start: ts(1),
            end: ts(10),
        };
        assert!(equality_values(&events, &period, &profiles).is_empty());
        let outside = Period {
            start: ts(20),
            end: ts(25),
        };
        assert!(agreeing_pairs(&events, &outside).is_empty());
    }

    #[test]
    fn init_profile_weighted_mean() {
        let w = EqualityWeights {
            weights: BTreeMap::from([(PropertyKey::Location, 80.0), (PropertyKey::Gender, 20.0)]),
            period: None,
        };
        let mut a = learner("a", "ca", "m", "x");
        a.pref_long = 80.0;
        let mut b = learner("b", "ny", "f", "x");
        b.pref_long = 30.0;
        let known = NewLearner {
            user_id: "new".into(),
            selected_job: "data scientist".into(),
            skill_levels: BTreeMap::new(),
            personal: PersonalInfo::new("ca", "f", "y"),
        };
        let p = init_profile(&known, &[a, b], &w, 10, &[]);
        assert!((p.pref_long - 70.0).abs() < 1e-12);
    }

    #[test]
    fn init_profile_defaults_for_empty_pool() {
        let known = NewLearner {
            user_id: "new".into(),
            selected_job: "ds".into(),
            skill_levels: BTreeMap::new(),
            personal: PersonalInfo::new("ca", "f", "y"),
        };
        let p = init_profile(&known, &[], &EqualityWeights::uniform(), 10, &["wisc".to_string()]);
        assert_eq!(p.aligned_preferences(), [50.0; 4]);
        assert_eq!(p.pref_resources, BTreeMap::from([("wisc".to_string(), 50.0)]));
    }

    #[test]
    fn rating_update_examples() {
        let p = learner("a", "ca", "f", "x");
        let long = oer(100.0, 50.0, 50.0);
        let dislike = rating("a", "o1", 1, 2);
        let q = apply_rating(&p, &long, &dislike, &UpdateParams::default()).unwrap();
        assert!((q.pref_long - 45.0).abs() < 1e-12);
        assert!((q.pref_short - 55.0).abs() < 1e-12);
        assert_eq!(q.skill_level("python"), 20.0);

        let neutral = rating("a", "o1", 3, 2);
        let q = apply_rating(&p, &long, &neutral, &UpdateParams::default()).unwrap();
        assert_eq!(q.aligned_preferences(), p.aligned_preferences());
        assert_eq!(q.pref_resources, p.pref_resources);

        let mut p = p;
        p.pref_accessibility = 60.0;
        let accessible = oer(50.0, 50.0, 100.0);
        let love = rating("a", "o1", 5, 2);
        let q = apply_rating(&p, &accessible, &love, &UpdateParams::default()).unwrap();
        assert!((q.pref_accessibility - 64.0).abs() < 1e-12);
        assert_eq!(q.skill_level("python"), 30.0);
        assert!(q.pref_resources["wisc"] > 50.0 && q.pref_resources["skillscommons"] < 50.0);

        let other = rating("b", "o1", 5, 2);
        assert!(matches!(
            apply_rating(&p, &accessible, &other, &UpdateParams::default()),
            Err(Error::UserMismatch { .. })
        ));
    }
}
