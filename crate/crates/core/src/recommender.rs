//! Candidate selection and cosine ranking.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::importance::JobSkillProfile;
use crate::learner::{LearnerProfile, DEFAULT_PREFERENCE};
use crate::oer::OerRecord;

pub const DEFAULT_LEVEL_BAND: f64 = 25.0;
const WIDE_BAND: f64 = 50.0;
const MASTERED: f64 = 100.0;

/// `(long, short, quality, accessibility, resource_1 .. resource_R)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyVector(pub Vec<f64>);

impl PropertyVector {
    pub fn for_learner(p: &LearnerProfile, repositories: &[String]) -> Self {
        let mut v = p.aligned_preferences().to_vec();
        v.extend(repositories.iter().map(|r| {
            p.pref_resources
                .get(r)
                .copied()
                .unwrap_or(DEFAULT_PREFERENCE)
        }));
        PropertyVector(v)
    }

    pub fn for_oer(o: &OerRecord, repositories: &[String]) -> Self {
        let mut v = vec![o.how_long, o.how_short, o.quality, o.accessibility];
        v.extend(
            repositories
                .iter()
                .map(|r| if *r == o.resource { 100.0 } else { 0.0 }),
        );
        PropertyVector(v)
    }
}

/// Sorted distinct repositories in the catalog; fixes the vector layout.
pub fn repositories<'a, I>(catalog: I) -> Vec<String>
where
    I: IntoIterator<Item = &'a OerRecord>,
{
    catalog
        .into_iter()
        .map(|o| o.resource.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Cosine similarity; 0 when either vector is zero.
pub fn cosine(u: &[f64], o: &[f64]) -> f64 {
    assert_eq!(u.len(), o.len(), "cosine of vectors with different dimensions");
    let dot: f64 = u.iter().zip(o).map(|(a, b)| a * b).sum();
    let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let no = o.iter().map(|b| b * b).sum::<f64>().sqrt();
    if nu == 0.0 || no == 0.0 {
        return 0.0;
    }
    (dot / (nu * no)).clamp(-1.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecommendationStatus {
    Pending,
    Rated,
    Irrelevant,
    Changed,
    /// Closed by a batch that excluded its OER before any feedback.
    Withdrawn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub recommendation_id: String,
    pub user_id: String,
    pub oer_id: String,
    pub skill: String,
    pub skill_importance: f64,
    pub cosine_score: f64,
    pub status: RecommendationStatus,
    pub issued_at: DateTime<Utc>,
}

/// The next skill to work on: highest importance among skills the learner has
/// not mastered, ties alphabetical. `None` once everything is at 100.
pub fn target_skill(p: &LearnerProfile, profile: &JobSkillProfile) -> Option<(String, f64)> {
    profile
        .entries
        .iter()
        .filter(|e| p.skill_level(&e.skill) < MASTERED)
        .min_by(|a, b| {
            b.importance
                .total_cmp(&a.importance)
                .then_with(|| a.skill.cmp(&b.skill))
        })
        .map(|e| (e.skill.clone(), e.importance))
}

/// OERs for `skill` that are not excluded and not in `blocked`, within the
/// level band around the learner's level. The band widens to 50 and is then
/// dropped when it yields nothing.
pub fn candidate_set<'a, I>(
    p: &LearnerProfile,
    skill: &str,
    catalog: I,
    blocked: &BTreeSet<String>,
    level_band: f64,
) -> Vec<&'a OerRecord>
where
    I: IntoIterator<Item = &'a OerRecord>,
{
    let eligible: Vec<&OerRecord> = catalog
        .into_iter()
        .filter(|o| o.skill == skill && !o.excluded_for_skill && !blocked.contains(&o.oer_id))
        .collect();
    let level = p.skill_level(skill);
    for band in [level_band, level_band.max(WIDE_BAND), f64::INFINITY] {
        let within: Vec<&OerRecord> = eligible
            .iter()
            .copied()
            .filter(|o| (o.level - level).abs() <= band)
            .collect();
        if !within.is_empty() {
            return within;
        }
    }
    Vec::new()
}

/// Candidates ordered by decreasing cosine, ties by ascending id.
pub fn rank<'a>(
    p: &LearnerProfile,
    candidates: &[&'a OerRecord],
    repositories: &[String],
) -> Vec<(&'a OerRecord, f64)> {
    let u = PropertyVector::for_learner(p, repositories);
    let mut scored: Vec<(&OerRecord, f64)> = candidates
        .iter()
        .map(|o| (*o, cosine(&u.0, &PropertyVector::for_oer(o, repositories).0)))
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.oer_id.cmp(&b.0.oer_id)));
    scored
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RecommendOutcome {
    Issued(Recommendation),
    /// Every skill of the job is mastered.
    Completed,
    /// No OER in the catalog can serve the target skill.
    CatalogGap { skill: String },
}

/// Per-user exclusions applied on top of catalog-wide ones.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct UserHistory {
    /// Rated or flagged irrelevant: never offered again.
    pub blocked: BTreeSet<String>,
    /// Changed away from, per skill: offered again only when nothing else is left.
    pub demoted: BTreeMap<String, BTreeSet<String>>,
}

impl UserHistory {
    pub fn with_demoted(&self, skill: &str) -> BTreeSet<String> {
        let mut all = self.blocked.clone();
        if let Some(d) = self.demoted.get(skill) {
            all.extend(d.iter().cloned());
        }
        all
    }
}

/// Picks the best OER for the learner's target skill without touching the
/// catalog.
pub fn select(
    p: &LearnerProfile,
    profile: &JobSkillProfile,
    catalog: &BTreeMap<String, OerRecord>,
    history: &UserHistory,
    level_band: f64,
    recommendation_id: &str,
    now: DateTime<Utc>,
) -> RecommendOutcome {
    let Some((skill, importance)) = target_skill(p, profile) else {
        return RecommendOutcome::Completed;
    };
    let repos = repositories(catalog.values());
    let mut candidates =
        candidate_set(p, &skill, catalog.values(), &history.with_demoted(&skill), level_band);
    if candidates.is_empty() {
        candidates = candidate_set(p, &skill, catalog.values(), &history.blocked, level_band);
    }
    let ranked = rank(p, &candidates, &repos);
    let Some((oer, cosine_score)) = ranked.first() else {
        return RecommendOutcome::CatalogGap { skill };
    };
    RecommendOutcome::Issued(Recommendation {
        recommendation_id: recommendation_id.to_string(),
        user_id: p.user_id.clone(),
        oer_id: oer.oer_id.clone(),
        skill,
        skill_importance: importance,
        cosine_score: *cosine_score,
        status: RecommendationStatus::Pending,
        issued_at: now,
    })
}

/// [`select`], counting the issue against the chosen OER.
pub fn recommend(
    p: &LearnerProfile,
    profile: &JobSkillProfile,
    catalog: &mut BTreeMap<String, OerRecord>,
    history: &UserHistory,
    level_band: f64,
    recommendation_id: &str,
    now: DateTime<Utc>,
) -> RecommendOutcome {
    let outcome = select(p, profile, catalog, history, level_band, recommendation_id, now);
    if let RecommendOutcome::Issued(r) = &outcome {
        if let Some(o) = catalog.get_mut(&r.oer_id) {
            o.record_recommendation();
        }
    }
    outcome
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::importance::SkillImportanceRecord;
    use crate::learner::PersonalInfo;
    use chrono::NaiveDate;

    fn learner(levels: &[(&str, f64)]) -> LearnerProfile {
        LearnerProfile {
            user_id: "u".into(),
            selected_job: "data scientist".into(),
            skill_levels: levels.iter().map(|(s, l)| (s.to_string(), *l)).collect(),
            personal: PersonalInfo::new("berlin", "f", "msc"),
            pref_resources: BTreeMap::new(),
            pref_long: 50.0,
            pref_short: 50.0,
            pref_check: 50.0,
            pref_accessibility: 50.0,
        }
    }

    fn job(entries: &[(&str, f64)]) -> JobSkillProfile {
        let date = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
        JobSkillProfile {
            job: "data scientist".into(),
            location: String::new(),
            entries: entries
                .iter()
                .map(|(s, i)| SkillImportanceRecord {
                    skill: s.to_string(),
                    job: "data scientist".into(),
                    location: String::new(),
                    importance: *i,
                    last_updated: date,
                })
                .collect(),
        }
    }

    fn oer(id: &str, skill: &str, level: f64) -> OerRecord {
        let mut o = OerRecord::new_default(id, "wisc", skill, "a", "u");
        o.level = level;
        o
    }

    #[test]
    fn target_skill_rules() {
        let profile = job(&[("sql", 100.0), ("python", 90.0)]);
        let p = learner(&[("sql", 100.0), ("python", 40.0)]);
        assert_eq!(target_skill(&p, &profile).unwrap().0, "python");
        let done = learner(&[("sql", 100.0), ("python", 100.0)]);
        assert!(target_skill(&done, &profile).is_none());
        let tie = job(&[("sql", 80.0), ("excel", 80.0)]);
        assert_eq!(target_skill(&learner(&[]), &tie).unwrap().0, "excel");
    }

    #[test]
    fn band_widening() {
        let p = learner(&[("sql", 0.0)]);
        let cat = vec![oer("a", "sql", 0.0), oer("b", "sql", 50.0), oer("c", "sql", 100.0)];
        let none = BTreeSet::new();
        let ids = |v: Vec<&OerRecord>| v.into_iter().map(|o| o.oer_id.clone()).collect::<Vec<_>>();
        assert_eq!(ids(candidate_set(&p, "sql", &cat, &none, 25.0)), ["a"]);
        let blocked = BTreeSet::from(["a".to_string()]);
        assert_eq!(ids(candidate_set(&p, "sql", &cat, &blocked, 25.0)), ["b"]);
        let blocked = BTreeSet::from(["a".to_string(), "b".to_string()]);
        assert_eq!(ids(candidate_set(&p, "sql", &cat, &blocked, 25.0)), ["c"]);
        let mut excluded = cat.clone();
        for o in &mut excluded {
            o.excluded_for_skill = true;
        }
        assert!(candidate_set(&p, "sql", &excluded, &none, 25.0).is_empty());
    }

    #[test]
    fn cosine_basics() {
        let v = [1.0, 2.0, 3.0];
        assert!((cosine(&v, &v) - 1.0).abs() < 1e-15);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]), 0.0);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 1.0]), 0.0);
        let scaled: Vec<f64> = v.iter().map(|x| x * 7.5).collect();
        assert!((cosine(&v, &[3.0, 1.0, 2.0]) - cosine(&scaled, &[3.0, 1.0, 2.0])).abs() < 1e-15);
    }

    #[test]
    fn dominant_length_wins() {
        let mut p = learner(&[]);
        p.pref_long = 100.0;
        p.pref_short = 0.0;
        let mut long = oer("z-long", "sql", 0.0);
        long.set_length(100.0);
        let mut short = oer("a-short", "sql", 0.0);
        short.set_length(0.0);
        let mut cat: BTreeMap<String, OerRecord> =
            [long, short].into_iter().map(|o| (o.oer_id.clone(), o)).collect();
        let now = Utc::now();
        match recommend(&p, &job(&[("sql", 100.0)]), &mut cat, &UserHistory::default(), 25.0, "r1", now) {
            RecommendOutcome::Issued(r) => {
                assert_eq!(r.oer_id, "z-long");
                assert_eq!(r.status, RecommendationStatus::Pending);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(cat["z-long"].total_recom, 1);
        assert_eq!(cat["a-short"].total_recom, 0);
    }

    #[test]
    fn demoted_only_when_nothing_else() {
        let p = learner(&[]);
        let mut cat: BTreeMap<String, OerRecord> = [oer("a", "sql", 0.0), oer("b", "sql", 0.0)]
            .into_iter()
            .map(|o| (o.oer_id.clone(), o))
            .collect();
        let profile = job(&[("sql", 100.0)]);
        let mut h = UserHistory::default();
        h.demoted.insert("sql".into(), BTreeSet::from(["a".to_string()]));
        let pick = |cat: &mut BTreeMap<String, OerRecord>, h: &UserHistory| match recommend(
            &p,
            &profile,
            cat,
            h,
            25.0,
            "r",
            Utc::now(),
        ) {
            RecommendOutcome::Issued(r) => r.oer_id,
            other => panic!("{other:?}"),
        };
        assert_eq!(pick(&mut cat, &h), "b");
        h.blocked.insert("b".into());
        assert_eq!(pick(&mut cat, &h), "a");
        h.blocked.insert("a".into());
        assert_eq!(
            recommend(&p, &profile, &mut cat, &h, 25.0, "r", Utc::now()),
            RecommendOutcome::CatalogGap { skill: "sql".into() }
        );
    }
}
