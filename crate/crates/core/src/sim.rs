//! Closed-loop simulation with synthetic learners whose true preferences are
//! known, used to check that the engine's learned preferences and
//! recommendation quality move in the right direction.

use std::collections::BTreeMap;
use std::io::Write;

use chrono::{DateTime, Duration, NaiveDate, TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::engine::{CreateLearner, Engine};
use crate::error::{Error, Result};
use crate::importance::{build_profile, SkillImportanceRecord};
use crate::learner::PersonalInfo;
use crate::oer::OerRecord;
use crate::recommender::{cosine, RecommendOutcome};

pub const SIM_JOB: &str = "data analyst";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub n_learners: usize,
    pub n_oers: usize,
    pub steps: usize,
    pub seed: u64,
    /// Half-width of the uniform noise added to satisfaction.
    pub noise: f64,
    /// Batch jobs run after every `batch_every` steps.
    pub batch_every: usize,
    pub n_skills: usize,
    pub n_clusters: usize,
    /// Spread of planted preferences around their cluster centre.
    pub cluster_spread: f64,
    /// When set, OER properties scatter this far around the cluster centres.
    pub catalog_spread: Option<f64>,
    /// Probability that an OER sits in its cluster's home repository
    /// (0.5 makes repositories uninformative).
    pub repository_affinity: f64,
    /// Satisfaction is `1 - L1 / distance_scale`, clamped to `[0, 1]`.
    pub distance_scale: f64,
    /// Below this satisfaction the learner flags the OER irrelevant.
    pub irrelevant_below: f64,
    /// Below this satisfaction (and above the irrelevance cut) the learner asks for another OER.
    pub change_below: f64,
    pub engine: Config,
}

impl Default for SimConfig {
    fn default() -> Self {
        let engine = Config {
            eta: 0.5,
            level_step: 5.0,
            k_neighbors: 5,
            ..Config::default()
        };
        SimConfig {
            n_learners: 20,
            n_oers: 50,
            steps: 200,
            seed: 0,
            noise: 0.0,
            batch_every: 50,
            n_skills: 1,
            n_clusters: 4,
            cluster_spread: 10.0,
            catalog_spread: Some(15.0),
            repository_affinity: 0.9,
            distance_scale: 200.0,
            irrelevant_below: 0.1,
            change_below: 0.0,
            engine,
        }
    }
}

impl SimConfig {
    /// Every key is optional. Engine settings go under `[engine]`; a present
    /// `[engine]` table starts from the service defaults, not the sim ones.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SimConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_learners == 0 || self.n_oers == 0 || self.steps == 0 {
            return Err(Error::Config("learner, OER and step counts must be at least 1".into()));
        }
        if self.batch_every == 0 || self.n_skills == 0 || self.n_clusters == 0 {
            return Err(Error::Config("batch_every, n_skills and n_clusters must be at least 1".into()));
        }
        if !(self.distance_scale > 0.0) || !(self.noise >= 0.0) {
            return Err(Error::Config("distance_scale must be positive and noise non-negative".into()));
        }
        self.engine.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticLearner {
    pub user_id: String,
    pub cluster: usize,
    /// Planted `(long, short, check, accessibility)` with `long + short = 100`.
    pub planted: [f64; 4],
    pub personal: PersonalInfo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub user_id: String,
    /// Satisfaction with the issued OER; `None` when nothing was issued.
    pub satisfaction: Option<f64>,
    pub action: String,
    /// Mean over learners of the cosine between learned and planted preferences.
    pub mean_cosine: f64,
    /// Mean over learners of the L1 distance between learned and planted preferences.
    pub mean_l1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchRecovery {
    pub step: usize,
    pub refits: usize,
    /// Mean absolute error of engine-side length, quality and accessibility
    /// against the true values, over OERs rated so far.
    pub mean_abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub config: SimConfig,
    pub steps: Vec<StepRecord>,
    pub recoveries: Vec<BatchRecovery>,
    pub irrelevant: usize,
    pub changed: usize,
    pub rated: usize,
    pub idle: usize,
    /// Issues of OERs that were excluded for their skill at issue time.
    pub excluded_issued: usize,
    pub final_l1: BTreeMap<String, f64>,
    pub learners: Vec<SyntheticLearner>,
}

impl SimReport {
    pub fn mean_satisfaction(&self, range: std::ops::Range<usize>) -> Option<f64> {
        let values: Vec<f64> = self.steps[range].iter().filter_map(|s| s.satisfaction).collect();
        (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
    }

    pub fn max_final_l1(&self) -> f64 {
        self.final_l1.values().copied().fold(0.0, f64::max)
    }

    /// One JSON object per step, then one per batch, then a summary line.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e| Error::io("<metrics>", e);
        for s in &self.steps {
            serde_json::to_writer(&mut out, &serde_json::json!({"kind": "step", "step": s}))?;
            out.write_all(b"\n").map_err(io)?;
        }
        for r in &self.recoveries {
            serde_json::to_writer(&mut out, &serde_json::json!({"kind": "batch", "batch": r}))?;
            out.write_all(b"\n").map_err(io)?;
        }
        let summary = serde_json::json!({
            "kind": "summary",
            "rated": self.rated,
            "irrelevant": self.irrelevant,
            "changed": self.changed,
            "idle": self.idle,
            "excluded_issued": self.excluded_issued,
            "final_l1": self.final_l1,
        });
        serde_json::to_writer(&mut out, &summary)?;
        out.write_all(b"\n").map_err(io)?;
        Ok(())
    }
}

fn aligned(oer: &OerRecord) -> [f64; 4] {
    [oer.how_long, oer.how_short, oer.quality, oer.accessibility]
}

pub fn l1(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Satisfaction of a learner with planted preferences for an OER with the
/// given true properties.
pub fn satisfaction(planted: &[f64; 4], oer: &[f64; 4], distance_scale: f64, noise: f64) -> f64 {
    (1.0 - l1(planted, oer) / distance_scale + noise).clamp(0.0, 1.0)
}

pub fn stars_for(satisfaction: f64) -> u8 {
    (satisfaction.clamp(0.0, 1.0) * 4.0).round() as u8 + 1
}

pub fn sim_start() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap()
}

fn jitter(rng: &mut ChaCha8Rng, v: f64, spread: f64) -> f64 {
    let d = if spread > 0.0 { rng.gen_range(-spread..=spread) } else { 0.0 };
    (v + d).clamp(0.0, 100.0)
}

/// Preference centres `(long, check, accessibility)`, one per cluster.
pub fn generate_centres(rng: &mut ChaCha8Rng, n_clusters: usize) -> Vec<[f64; 3]> {
    (0..n_clusters)
        .map(|_| {
            [
                rng.gen_range(0.0..=100.0),
                rng.gen_range(0.0..=100.0),
                rng.gen_range(0.0..=100.0),
            ]
        })
        .collect()
}

/// Synthetic catalog: skills round-robin over two repositories. With a
/// `catalog_spread` the properties of OER `i` scatter around centre
/// `i mod n_clusters`, otherwise they are uniform.
pub fn generate_catalog(rng: &mut ChaCha8Rng, cfg: &SimConfig, centres: &[[f64; 3]]) -> Vec<OerRecord> {
    (0..cfg.n_oers)
        .map(|i| {
            let skill = format!("skill{}", i % cfg.n_skills);
            let cluster = i % centres.len();
            let repo = if rng.gen_bool(cfg.repository_affinity) == (cluster % 2 == 0) {
                "repo-a"
            } else {
                "repo-b"
            };
            let mut o = OerRecord::new_default(&format!("oer{i:03}"), repo, &skill, &format!("author{}", i % 5), "");
            o.url = format!("https://oer.example/{i}");
            o.title = format!("Resource {i} on {skill}");
            let [long, quality, access] = match cfg.catalog_spread {
                Some(spread) => centres[cluster].map(|c| jitter(rng, c, spread)),
                None => [(); 3].map(|_| rng.gen_range(0.0..=100.0)),
            };
            o.set_length(long);
            o.quality = quality;
            o.accessibility = access;
            o.level = rng.gen_range(0.0..=100.0);
            o
        })
        .collect()
}

/// Learners assigned to clusters round-robin; each cluster shares personal
/// info and a preference centre.
pub fn generate_learners(rng: &mut ChaCha8Rng, cfg: &SimConfig, centres: &[[f64; 3]]) -> Vec<SyntheticLearner> {
    let locations = ["berlin", "lisbon", "dublin", "vienna", "oslo", "porto"];
    let educations = ["bsc", "msc", "phd"];
    (0..cfg.n_learners)
        .map(|i| {
            let cluster = i % centres.len();
            let [long, check, access] = centres[cluster].map(|c| jitter(rng, c, cfg.cluster_spread));
            SyntheticLearner {
                user_id: String::new(),
                cluster,
                planted: [long, 100.0 - long, check, access],
                personal: PersonalInfo::new(
                    locations[cluster % locations.len()],
                    if cluster % 2 == 0 { "f" } else { "m" },
                    educations[cluster % educations.len()],
                ),
            }
        })
        .collect()
}

fn job_profile(n_skills: usize, date: NaiveDate) -> crate::importance::JobSkillProfile {
    let records = (0..n_skills)
        .map(|i| SkillImportanceRecord {
            skill: format!("skill{i}"),
            job: SIM_JOB.into(),
            location: String::new(),
            importance: 100.0 * (n_skills - i) as f64 / n_skills as f64,
            last_updated: date,
        })
        .collect();
    build_profile(SIM_JOB, "", records, None)
}

fn learned(engine: &Engine, user_id: &str) -> [f64; 4] {
    engine.state().learners[user_id].aligned_preferences()
}

fn snapshot_metrics(engine: &Engine, learners: &[SyntheticLearner]) -> (f64, f64) {
    let n = learners.len() as f64;
    let (c, d) = learners.iter().fold((0.0, 0.0), |(c, d), l| {
        let p = learned(engine, &l.user_id);
        (c + cosine(&p, &l.planted), d + l1(&p, &l.planted))
    });
    (c / n, d / n)
}

fn recovery_error(engine: &Engine, truth: &BTreeMap<String, OerRecord>) -> f64 {
    let rated: std::collections::BTreeSet<&str> =
        engine.state().ratings.iter().map(|r| r.oer_id.as_str()).collect();
    let errors: Vec<f64> = rated
        .iter()
        .filter_map(|id| Some((engine.state().catalog.get(*id)?, truth.get(*id)?)))
        .flat_map(|(e, t)| {
            [
                (e.how_long - t.how_long).abs(),
                (e.quality - t.quality).abs(),
                (e.accessibility - t.accessibility).abs(),
            ]
        })
        .collect();
    if errors.is_empty() {
        0.0
    } else {
        errors.iter().sum::<f64>() / errors.len() as f64
    }
}

/// Runs the issue, feedback and update loop. Step `t` serves learner
/// `t mod n_learners`; batch jobs run every `batch_every` steps. Each step
/// advances the clock by one hour.
pub fn run_sim(cfg: &SimConfig) -> Result<SimReport> {
    simulate(cfg).map(|(report, _)| report)
}

/// [`run_sim`], also handing back the engine in its final state.
pub fn simulate(cfg: &SimConfig) -> Result<(SimReport, Engine)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let centres = generate_centres(&mut rng, cfg.n_clusters);
    let truth_list = generate_catalog(&mut rng, cfg, &centres);
    let mut learners = generate_learners(&mut rng, cfg, &centres);
    let start = sim_start();

    let mut engine = Engine::in_memory(cfg.engine.clone())?;
    engine.import_records(truth_list.clone())?;
    engine.publish_profiles(vec![job_profile(cfg.n_skills, start.date_naive())])?;
    for l in &mut learners {
        let profile = engine.create_learner(CreateLearner {
            job: SIM_JOB.into(),
            personal: l.personal.clone(),
            skill_levels: BTreeMap::new(),
        })?;
        l.user_id = profile.user_id;
    }
    let truth: BTreeMap<String, OerRecord> =
        truth_list.into_iter().map(|o| (o.oer_id.clone(), o)).collect();

    let mut report = SimReport {
        config: cfg.clone(),
        steps: Vec::with_capacity(cfg.steps),
        recoveries: Vec::new(),
        irrelevant: 0,
        changed: 0,
        rated: 0,
        idle: 0,
        excluded_issued: 0,
        final_l1: BTreeMap::new(),
        learners: Vec::new(),
    };
    for step in 0..cfg.steps {
        let now = start + Duration::hours(step as i64 + 1);
        let learner = &learners[step % learners.len()];
        let outcome = engine.recommendation(&learner.user_id, now)?;
        let (sat, action) = match outcome {
            RecommendOutcome::Issued(rec) => {
                if engine.state().catalog[&rec.oer_id].excluded_for_skill {
                    report.excluded_issued += 1;
                }
                let noise = if cfg.noise > 0.0 {
                    rng.gen_range(-cfg.noise..=cfg.noise)
                } else {
                    0.0
                };
                let s = satisfaction(
                    &learner.planted,
                    &aligned(&truth[&rec.oer_id]),
                    cfg.distance_scale,
                    noise,
                );
                let action = if s < cfg.irrelevant_below {
                    engine.mark_irrelevant(&rec.recommendation_id, now)?;
                    report.irrelevant += 1;
                    "irrelevant"
                } else if s < cfg.change_below {
                    engine.change(&rec.recommendation_id, now)?;
                    report.changed += 1;
                    "change"
                } else {
                    engine.rate(&rec.recommendation_id, stars_for(s), now)?;
                    report.rated += 1;
                    "rate"
                };
                (Some(s), action)
            }
            RecommendOutcome::Completed => {
                report.idle += 1;
                (None, "completed")
            }
            RecommendOutcome::CatalogGap { .. } => {
                report.idle += 1;
                (None, "catalog_gap")
            }
        };
        if (step + 1) % cfg.batch_every == 0 {
            let batch = engine.run_batch(now)?;
            report.recoveries.push(BatchRecovery {
                step,
                refits: batch.refits,
                mean_abs_error: recovery_error(&engine, &truth),
            });
        }
        let (mean_cosine, mean_l1) = snapshot_metrics(&engine, &learners);
        report.steps.push(StepRecord {
            step,
            user_id: learner.user_id.clone(),
            satisfaction: sat,
            action: action.to_string(),
            mean_cosine,
            mean_l1,
        });
    }
    report.final_l1 = learners
        .iter()
        .map(|l| (l.user_id.clone(), l1(&learned(&engine, &l.user_id), &l.planted)))
        .collect();
    report.learners = learners;
    Ok((report, engine))
}
