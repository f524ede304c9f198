//! Event-sourced engine state and the commands that mutate it.
//!
//! Every mutation is expressed as an [`Event`] carrying its full effect, so
//! replaying a log through [`EngineState::apply`] reproduces the state without
//! recomputing anything.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Duration, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use tracing::{info, warn};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::importance::{
    job_matches, normalize_rates, occurrence_rates, refresh_profile, HeadingDetector,
    JobSkillProfile, SkillSentenceDetector,
};
use crate::learner::{
    apply_rating, equality_values, init_profile, EqualityWeights, LearnerProfile, NewLearner,
    Period, PersonalInfo, RatingEvent,
};
use crate::oer::{exclude_below_average, ingest, refit_properties, OerRecord, PropertyScales, RawOer};
use crate::recommender::{
    repositories, select, RecommendOutcome, Recommendation, RecommendationStatus, UserHistory,
};
use crate::store::Store;
use crate::tfidf::SkillTerm;
use crate::vacancy::{normalize_location, split_sections, HeadingRules, RawVacancy};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Event {
    CorpusLoaded {
        vacancies: Vec<RawVacancy>,
        skill_terms: Vec<SkillTerm>,
    },
    ProfilesPublished {
        profiles: Vec<JobSkillProfile>,
    },
    OersImported {
        records: Vec<OerRecord>,
    },
    LearnerCreated {
        profile: LearnerProfile,
    },
    SkillsUpdated {
        user_id: String,
        skills: BTreeMap<String, f64>,
    },
    RecommendationIssued {
        recommendation: Recommendation,
    },
    Rated {
        recommendation_id: String,
        rating: RatingEvent,
        profile: LearnerProfile,
    },
    MarkedIrrelevant {
        recommendation_id: String,
        at: DateTime<Utc>,
    },
    Changed {
        recommendation_id: String,
        at: DateTime<Utc>,
    },
    BatchApplied {
        at: DateTime<Utc>,
        weights: EqualityWeights,
        oers: Vec<OerRecord>,
        profiles: Vec<JobSkillProfile>,
        ratings_seen: usize,
        importance_refreshed: Option<NaiveDate>,
        /// Pending recommendations whose OER the batch excluded.
        #[serde(default)]
        withdrawn: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineState {
    pub learners: BTreeMap<String, LearnerProfile>,
    pub catalog: BTreeMap<String, OerRecord>,
    /// Sorted by job, then location.
    pub profiles: Vec<JobSkillProfile>,
    pub recommendations: BTreeMap<String, Recommendation>,
    /// Open recommendation per user.
    pub pending: BTreeMap<String, String>,
    pub history: BTreeMap<String, UserHistory>,
    pub ratings: Vec<RatingEvent>,
    pub weights: EqualityWeights,
    pub corpus: Vec<RawVacancy>,
    pub skill_terms: Vec<SkillTerm>,
    pub learners_created: u64,
    pub recommendations_issued: u64,
    /// Ratings already folded into a batch.
    pub ratings_seen: usize,
    pub last_batch: Option<DateTime<Utc>>,
    pub last_importance_refresh: Option<NaiveDate>,
}

impl Default for EngineState {
    fn default() -> Self {
        EngineState {
            learners: BTreeMap::new(),
            catalog: BTreeMap::new(),
            profiles: Vec::new(),
            recommendations: BTreeMap::new(),
            pending: BTreeMap::new(),
            history: BTreeMap::new(),
            ratings: Vec::new(),
            weights: EqualityWeights::uniform(),
            corpus: Vec::new(),
            skill_terms: Vec::new(),
            learners_created: 0,
            recommendations_issued: 0,
            ratings_seen: 0,
            last_batch: None,
            last_importance_refresh: None,
        }
    }
}

fn missing(what: &str, id: &str) -> Error {
    Error::NotFound(format!("{what} `{id}`"))
}

impl EngineState {
    pub fn apply(&mut self, event: &Event) -> Result<()> {
        match event {
            Event::CorpusLoaded {
                vacancies,
                skill_terms,
            } => {
                self.corpus = vacancies.clone();
                self.skill_terms = skill_terms.clone();
            }
            Event::ProfilesPublished { profiles } => {
                for p in profiles {
                    self.put_profile(p.clone());
                }
            }
            Event::OersImported { records } => {
                for r in records {
                    self.catalog.insert(r.oer_id.clone(), r.clone());
                }
            }
            Event::LearnerCreated { profile } => {
                self.learners_created += 1;
                self.learners.insert(profile.user_id.clone(), profile.clone());
                self.history.entry(profile.user_id.clone()).or_default();
            }
            Event::SkillsUpdated { user_id, skills } => {
                let learner = self
                    .learners
                    .get_mut(user_id)
                    .ok_or_else(|| missing("learner", user_id))?;
                for (skill, level) in skills {
                    learner.skill_levels.insert(skill.clone(), *level);
                }
            }
            Event::RecommendationIssued { recommendation } => {
                let r = recommendation;
                self.recommendations_issued += 1;
                self.catalog
                    .get_mut(&r.oer_id)
                    .ok_or_else(|| missing("oer", &r.oer_id))?
                    .record_recommendation();
                self.pending.insert(r.user_id.clone(), r.recommendation_id.clone());
                self.recommendations.insert(r.recommendation_id.clone(), r.clone());
            }
            Event::Rated {
                recommendation_id,
                rating,
                profile,
            } => {
                let r = self.close(recommendation_id, RecommendationStatus::Rated)?;
                self.history
                    .entry(r.user_id.clone())
                    .or_default()
                    .blocked
                    .insert(r.oer_id.clone());
                self.ratings.push(rating.clone());
                self.learners.insert(profile.user_id.clone(), profile.clone());
            }
            Event::MarkedIrrelevant {
                recommendation_id, ..
            } => {
                let r = self.close(recommendation_id, RecommendationStatus::Irrelevant)?;
                self.catalog
                    .get_mut(&r.oer_id)
                    .ok_or_else(|| missing("oer", &r.oer_id))?
                    .record_irrelevant();
                self.history
                    .entry(r.user_id.clone())
                    .or_default()
                    .blocked
                    .insert(r.oer_id.clone());
            }
            Event::Changed {
                recommendation_id, ..
            } => {
                let r = self.close(recommendation_id, RecommendationStatus::Changed)?;
                self.history
                    .entry(r.user_id.clone())
                    .or_default()
                    .demoted
                    .entry(r.skill.clone())
                    .or_default()
                    .insert(r.oer_id.clone());
            }
            Event::BatchApplied {
                at,
                weights,
                oers,
                profiles,
                ratings_seen,
                importance_refreshed,
                withdrawn,
            } => {
                self.weights = weights.clone();
                for o in oers {
                    self.catalog.insert(o.oer_id.clone(), o.clone());
                }
                for p in profiles {
                    self.put_profile(p.clone());
                }
                self.ratings_seen = *ratings_seen;
                self.last_batch = Some(*at);
                if importance_refreshed.is_some() {
                    self.last_importance_refresh = *importance_refreshed;
                }
                for rid in withdrawn {
                    self.close(rid, RecommendationStatus::Withdrawn)?;
                }
            }
        }
        Ok(())
    }

    fn close(&mut self, rid: &str, status: RecommendationStatus) -> Result<Recommendation> {
        let r = self
            .recommendations
            .get_mut(rid)
            .ok_or_else(|| missing("recommendation", rid))?;
        if r.status != RecommendationStatus::Pending {
            return Err(Error::State(format!(
                "recommendation `{rid}` already has feedback ({:?})",
                r.status
            )));
        }
        r.status = status;
        let r = r.clone();
        if self.pending.get(&r.user_id) == Some(&r.recommendation_id) {
            self.pending.remove(&r.user_id);
        }
        Ok(r)
    }

    fn put_profile(&mut self, profile: JobSkillProfile) {
        match self
            .profiles
            .binary_search_by(|p| (&p.job, &p.location).cmp(&(&profile.job, &profile.location)))
        {
            Ok(i) => self.profiles[i] = profile,
            Err(i) => self.profiles.insert(i, profile),
        }
    }

    /// Profile for `job` at `location`, else the first profile for `job`.
    pub fn profile_for(&self, job: &str, location: &str) -> Option<&JobSkillProfile> {
        let job = job.trim().to_lowercase();
        let location = normalize_location(location);
        let for_job = || self.profiles.iter().filter(|p| p.job.to_lowercase() == job);
        for_job()
            .find(|p| p.location == location)
            .or_else(|| for_job().next())
    }

    pub fn jobs(&self, query: &str) -> Vec<String> {
        self.profiles
            .iter()
            .filter(|p| job_matches(query, &p.job))
            .map(|p| p.job.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn counts(&self) -> BTreeMap<String, usize> {
        BTreeMap::from([
            ("learners".to_string(), self.learners.len()),
            ("oers".to_string(), self.catalog.len()),
            ("profiles".to_string(), self.profiles.len()),
            ("recommendations".to_string(), self.recommendations.len()),
            ("ratings".to_string(), self.ratings.len()),
            ("vacancies".to_string(), self.corpus.len()),
        ])
    }
}

/// Registration request for a new learner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreateLearner {
    pub job: String,
    pub personal: PersonalInfo,
    #[serde(default)]
    pub skill_levels: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackResult {
    pub recommendation: Recommendation,
    pub profile: LearnerProfile,
    pub next: RecommendOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub period_start: DateTime<Utc>,
    pub period_end: DateTime<Utc>,
    pub new_ratings: usize,
    pub equality_recomputed: bool,
    pub weights: EqualityWeights,
    pub refits: usize,
    pub refit_failures: usize,
    pub excluded: usize,
    pub exclusion_changes: usize,
    pub profiles_refreshed: usize,
    pub withdrawn: usize,
    /// Nothing changed and nothing was persisted.
    pub noop: bool,
}

fn validate_levels(levels: &BTreeMap<String, f64>) -> Result<()> {
    for (skill, level) in levels {
        if !(0.0..=100.0).contains(level) {
            return Err(Error::Invalid(format!(
                "skill level for `{skill}` must lie in [0, 100], got {level}"
            )));
        }
    }
    Ok(())
}

pub struct Engine {
    state: EngineState,
    config: Config,
    store: Option<Store>,
    detector: Box<dyn SkillSentenceDetector + Send + Sync>,
    events_since_snapshot: u64,
}

impl std::fmt::Debug for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Engine")
            .field("config", &self.config)
            .field("counts", &self.state.counts())
            .finish()
    }
}

impl Engine {
    /// Engine without persistence.
    pub fn in_memory(config: Config) -> Result<Self> {
        config.validate()?;
        Ok(Engine {
            state: EngineState::default(),
            config,
            store: None,
            detector: Box::new(HeadingDetector::default()),
            events_since_snapshot: 0,
        })
    }

    /// Restores state from `config.data_dir` (snapshot plus log replay).
    pub fn open(config: Config) -> Result<Self> {
        config.validate()?;
        let (store, state, report) = Store::open(&config.data_dir)?;
        info!(
            snapshot_seq = report.snapshot_seq,
            replayed = report.replayed,
            torn_tail = report.torn_tail,
            "state restored"
        );
        Ok(Engine {
            state,
            config,
            store: Some(store),
            detector: Box::new(HeadingDetector::default()),
            events_since_snapshot: report.replayed as u64,
        })
    }

    pub fn with_detector(mut self, detector: Box<dyn SkillSentenceDetector + Send + Sync>) -> Self {
        self.detector = detector;
        self
    }

    pub fn state(&self) -> &EngineState {
        &self.state
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    fn commit(&mut self, events: Vec<Event>) -> Result<()> {
        if events.is_empty() {
            return Ok(());
        }
        if let Some(store) = self.store.as_mut() {
            store.append(&events)?;
        }
        for e in &events {
            self.state.apply(e)?;
        }
        self.events_since_snapshot += events.len() as u64;
        if self.store.is_some() && self.events_since_snapshot >= self.config.snapshot_every {
            self.snapshot(Utc::now())?;
        }
        Ok(())
    }

    pub fn snapshot(&mut self, now: DateTime<Utc>) -> Result<()> {
        if let Some(store) = self.store.as_mut() {
            store.write_snapshot(&self.state, now)?;
            self.events_since_snapshot = 0;
        }
        Ok(())
    }

    pub fn load_corpus(&mut self, vacancies: Vec<RawVacancy>, skill_terms: Vec<SkillTerm>) -> Result<()> {
        let rules = HeadingRules::default();
        let vacancies = vacancies
            .into_iter()
            .map(|v| if v.sections.is_empty() { split_sections(v, &rules) } else { v })
            .collect();
        self.commit(vec![Event::CorpusLoaded {
            vacancies,
            skill_terms,
        }])
    }

    pub fn publish_profiles(&mut self, profiles: Vec<JobSkillProfile>) -> Result<()> {
        self.commit(vec![Event::ProfilesPublished { profiles }])
    }

    pub fn import_records(&mut self, records: Vec<OerRecord>) -> Result<()> {
        self.commit(vec![Event::OersImported { records }])
    }

    /// Scales and cold-starts fetched repository records, skipping ids
    /// already in the catalog. Returns the number added.
    pub fn import_raw(&mut self, fetched: &[(String, Vec<RawOer>)], scales: &PropertyScales) -> Result<usize> {
        let existing: Vec<OerRecord> = self.state.catalog.values().cloned().collect();
        let records = ingest(fetched, &existing, scales);
        let added = records.len();
        self.import_records(records)?;
        Ok(added)
    }

    pub fn learner(&self, user_id: &str) -> Result<&LearnerProfile> {
        self.state
            .learners
            .get(user_id)
            .ok_or_else(|| missing("learner", user_id))
    }

    pub fn create_learner(&mut self, request: CreateLearner) -> Result<LearnerProfile> {
        if request.job.trim().is_empty() {
            return Err(Error::Invalid("job must not be empty".into()));
        }
        validate_levels(&request.skill_levels)?;
        let known = NewLearner {
            user_id: format!("u{:06}", self.state.learners_created + 1),
            selected_job: request.job.trim().to_lowercase(),
            skill_levels: request.skill_levels,
            personal: PersonalInfo::new(
                &request.personal.location,
                &request.personal.gender,
                &request.personal.education,
            ),
        };
        let pool: Vec<LearnerProfile> = self.state.learners.values().cloned().collect();
        let weights = if self.state.weights.is_empty() {
            EqualityWeights::uniform()
        } else {
            self.state.weights.clone()
        };
        let repos = repositories(self.state.catalog.values());
        let profile = init_profile(&known, &pool, &weights, self.config.k_neighbors, &repos);
        self.commit(vec![Event::LearnerCreated {
            profile: profile.clone(),
        }])?;
        Ok(profile)
    }

    pub fn update_skills(&mut self, user_id: &str, skills: BTreeMap<String, f64>) -> Result<LearnerProfile> {
        self.learner(user_id)?;
        validate_levels(&skills)?;
        self.commit(vec![Event::SkillsUpdated {
            user_id: user_id.to_string(),
            skills,
        }])?;
        Ok(self.learner(user_id)?.clone())
    }

    /// The user's open recommendation, or a newly issued one.
    pub fn recommendation(&mut self, user_id: &str, now: DateTime<Utc>) -> Result<RecommendOutcome> {
        let learner = self.learner(user_id)?;
        if let Some(rid) = self.state.pending.get(user_id) {
            return Ok(RecommendOutcome::Issued(self.state.recommendations[rid].clone()));
        }
        let profile = self
            .state
            .profile_for(&learner.selected_job, &learner.personal.location)
            .ok_or_else(|| {
                Error::NotFound(format!("skill profile for job `{}`", learner.selected_job))
            })?;
        let empty = UserHistory::default();
        let history = self.state.history.get(user_id).unwrap_or(&empty);
        let rid = format!("r{:06}", self.state.recommendations_issued + 1);
        let outcome = select(
            learner,
            profile,
            &self.state.catalog,
            history,
            self.config.level_band,
            &rid,
            now,
        );
        if let RecommendOutcome::Issued(r) = &outcome {
            self.commit(vec![Event::RecommendationIssued {
                recommendation: r.clone(),
            }])?;
        }
        Ok(outcome)
    }

    fn open_recommendation(&self, rid: &str) -> Result<&Recommendation> {
        let r = self
            .state
            .recommendations
            .get(rid)
            .ok_or_else(|| missing("recommendation", rid))?;
        if r.status != RecommendationStatus::Pending {
            return Err(Error::State(format!(
                "recommendation `{rid}` already has feedback ({:?})",
                r.status
            )));
        }
        Ok(r)
    }

    fn feedback_result(&mut self, rid: &str, user_id: &str, now: DateTime<Utc>) -> Result<FeedbackResult> {
        let next = self.recommendation(user_id, now)?;
        Ok(FeedbackResult {
            recommendation: self.state.recommendations[rid].clone(),
            profile: self.learner(user_id)?.clone(),
            next,
        })
    }

    pub fn rate(&mut self, rid: &str, stars: u8, now: DateTime<Utc>) -> Result<FeedbackResult> {
        let r = self.open_recommendation(rid)?.clone();
        let rating = RatingEvent::new(&r.user_id, &r.oer_id, rid, stars, now)
            .map_err(|e| Error::Invalid(e.to_string()))?;
        let oer = self
            .state
            .catalog
            .get(&r.oer_id)
            .ok_or_else(|| missing("oer", &r.oer_id))?;
        let profile = apply_rating(self.learner(&r.user_id)?, oer, &rating, &self.config.update_params())?;
        self.commit(vec![Event::Rated {
            recommendation_id: rid.to_string(),
            rating,
            profile,
        }])?;
        self.feedback_result(rid, &r.user_id, now)
    }

    pub fn mark_irrelevant(&mut self, rid: &str, now: DateTime<Utc>) -> Result<FeedbackResult> {
        let user = self.open_recommendation(rid)?.user_id.clone();
        self.commit(vec![Event::MarkedIrrelevant {
            recommendation_id: rid.to_string(),
            at: now,
        }])?;
        self.feedback_result(rid, &user, now)
    }

    pub fn change(&mut self, rid: &str, now: DateTime<Utc>) -> Result<FeedbackResult> {
        let user = self.open_recommendation(rid)?.user_id.clone();
        self.commit(vec![Event::Changed {
            recommendation_id: rid.to_string(),
            at: now,
        }])?;
        self.feedback_result(rid, &user, now)
    }

    /// Periodic jobs over the period ending at `now`: equality weights, OER
    /// refits, relevance exclusions and importance refresh, published as one
    /// event. Runs with nothing new to process change nothing.
    pub fn run_batch(&mut self, now: DateTime<Utc>) -> Result<BatchReport> {
        let period = Period {
            start: now - Duration::days(i64::from(self.config.batch_period_days)),
            end: now,
        };
        let state = &self.state;
        let new_ratings: Vec<&RatingEvent> = state.ratings[state.ratings_seen.min(state.ratings.len())..]
            .iter()
            .filter(|r| period.contains(r.timestamp))
            .collect();

        let mut weights = state.weights.clone();
        let mut equality_recomputed = false;
        if !new_ratings.is_empty() {
            let computed = equality_values(&state.ratings, &period, &state.learners);
            if !computed.is_empty() {
                weights = computed;
                equality_recomputed = true;
            }
        }

        let mut catalog = state.catalog.clone();
        let to_refit: BTreeSet<&str> = new_ratings.iter().map(|r| r.oer_id.as_str()).collect();
        let mut refits = 0;
        let mut refit_failures = 0;
        for oer_id in to_refit {
            let Some(oer) = catalog.get(oer_id) else {
                warn!(oer_id, "rated OER missing from catalog");
                refit_failures += 1;
                continue;
            };
            let raters: Vec<(LearnerProfile, RatingEvent)> = state
                .ratings
                .iter()
                .filter(|r| r.oer_id == oer_id && period.contains(r.timestamp))
                .filter_map(|r| Some((state.learners.get(&r.user_id)?.clone(), r.clone())))
                .collect();
            match refit_properties(oer, &raters, &self.config.gd) {
                Ok((updated, _)) if [updated.how_long, updated.quality, updated.accessibility].iter().all(|v| v.is_finite()) => {
                    catalog.insert(oer_id.to_string(), updated);
                    refits += 1;
                }
                Ok(_) => {
                    warn!(oer_id, "refit produced non-finite properties; skipped");
                    refit_failures += 1;
                }
                Err(e) => {
                    warn!(oer_id, error = %e, "refit failed; skipped");
                    refit_failures += 1;
                }
            }
        }

        let mut records: Vec<OerRecord> = catalog.into_values().collect();
        let skills: BTreeSet<String> = records.iter().map(|r| r.skill.clone()).collect();
        let mut excluded = 0;
        for skill in &skills {
            excluded += exclude_below_average(skill, &mut records).len();
        }
        let changed: Vec<OerRecord> = records
            .into_iter()
            .filter(|r| state.catalog.get(&r.oer_id) != Some(r))
            .collect();
        let exclusion_changes = changed
            .iter()
            .filter(|r| state.catalog[&r.oer_id].excluded_for_skill != r.excluded_for_skill)
            .count();

        let withdrawn: Vec<String> = state
            .pending
            .values()
            .filter(|rid| {
                let oer_id = &state.recommendations[*rid].oer_id;
                changed.iter().any(|r| &r.oer_id == oer_id && r.excluded_for_skill)
            })
            .cloned()
            .collect();

        let today = now.date_naive();
        let refresh_due = !state.corpus.is_empty()
            && state.last_importance_refresh.is_none_or(|last| {
                (today - last).num_days() >= i64::from(self.config.batch_period_days)
            });
        let mut profiles = Vec::new();
        if refresh_due {
            for p in &state.profiles {
                let mut terms: Vec<SkillTerm> = state.skill_terms.clone();
                for skill in p.skills() {
                    if !terms.iter().any(|t| t.term == skill) {
                        terms.push(SkillTerm {
                            term: skill.to_string(),
                            tfidf_score: 0.0,
                            document_frequency: 0,
                        });
                    }
                }
                let rates = occurrence_rates(
                    &state.corpus,
                    &p.job,
                    &p.location,
                    self.config.window_months,
                    today,
                    &terms,
                    self.detector.as_ref(),
                );
                let normalized = normalize_rates(&rates);
                profiles.push(refresh_profile(
                    Some(p),
                    &p.job,
                    &p.location,
                    &normalized,
                    self.config.alpha,
                    today,
                    self.config.top_k_skills,
                )?);
            }
        }

        let report = BatchReport {
            period_start: period.start,
            period_end: period.end,
            new_ratings: new_ratings.len(),
            equality_recomputed,
            weights: weights.clone(),
            refits,
            refit_failures,
            excluded,
            exclusion_changes,
            profiles_refreshed: profiles.len(),
            withdrawn: withdrawn.len(),
            noop: false,
        };
        let ratings_seen = state.ratings.len();
        let nothing_new = ratings_seen == state.ratings_seen
            && weights == state.weights
            && changed.is_empty()
            && !refresh_due;
        if nothing_new {
            return Ok(BatchReport { noop: true, ..report });
        }
        self.commit(vec![Event::BatchApplied {
            at: now,
            weights,
            oers: changed,
            profiles,
            ratings_seen,
            importance_refreshed: refresh_due.then_some(today),
            withdrawn,
        }])?;
        Ok(report)
    }
}
