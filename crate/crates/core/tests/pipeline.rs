//! Vacancy corpus to job skill profile, on recorded fixtures.

mod common;

use chrono::NaiveDate;

use common::*;
use skillrec_core::importance::{
    normalize_rates, occurrence_rates, read_profiles, refresh_profile, write_profile, HeadingDetector,
};
use skillrec_core::tfidf::extract_skill_terms;
use skillrec_core::vacancy::{
    label_corpus, load_vacancies, split_sections, vacancy_sentences, ColumnMap, HeadingRules, Label,
    RawVacancy,
};

fn load_split(name: &str) -> (Vec<RawVacancy>, usize) {
    let report = load_vacancies(&fixture(&format!("vacancies/{name}")), &ColumnMap::default()).unwrap();
    let rules = HeadingRules::default();
    let split = report.vacancies.into_iter().map(|v| split_sections(v, &rules)).collect();
    (split, report.skipped_empty)
}

#[test]
fn ten_vacancy_fixture_matches_hand_counts() {
    let (vacancies, skipped) = load_split("ten.csv");
    assert_eq!(skipped, 1);
    let ids: Vec<&str> = vacancies.iter().map(|v| v.id.as_str()).collect();
    assert_eq!(ids, ["v01", "v02", "v03", "v04", "v05", "v06", "v07", "v08", "v10"]);
    assert_eq!(vacancies[2].location, "berlin");

    // Sentences per vacancy, counted by hand from the fixture text.
    let counts: Vec<usize> = vacancies.iter().map(|v| vacancy_sentences(v).len()).collect();
    assert_eq!(counts, [3, 3, 3, 1, 1, 1, 2, 2, 4]);

    let v10 = &vacancies[8];
    let headings: Vec<Option<&str>> = v10.sections.iter().map(|s| s.heading.as_deref()).collect();
    assert_eq!(headings, [Some("about the role"), Some("required skills"), Some("required skills")]);
    assert_eq!(v10.sections[1].text, "Python.\nSQL.");
    assert_eq!(v10.sections[2].text, "Communication.");

    let labeled = label_corpus(&vacancies, &HeadingRules::default());
    let skill = labeled.iter().filter(|l| l.label == Label::Skill).count();
    assert_eq!((skill, labeled.len() - skill), (12, 6));
    // v08 has no skills section and contributes nothing.
    assert!(labeled.iter().all(|l| l.sentence.source_vacancy != "v08"));

    // Six in-window Berlin data scientist vacancies: v01 v02 v03 v07 v08 v10.
    let terms = extract_skill_terms(
        &labeled.iter().filter(|l| l.label == Label::Skill).map(|l| l.sentence.clone()).collect::<Vec<_>>(),
        1,
        usize::MAX,
    );
    let today = NaiveDate::from_ymd_opt(2024, 6, 30).unwrap();
    let rates = occurrence_rates(&vacancies, "data scientist", "Berlin", 6, today, &terms, &HeadingDetector::default());
    assert_eq!(rates["python"], 4.0 / 6.0);
    assert_eq!(rates["sql"], 3.0 / 6.0);
    assert_eq!(rates["tableau"], 2.0 / 6.0);
    let normalized = normalize_rates(&rates);
    assert_eq!(normalized["python"], 100.0);
    assert_eq!(normalized["sql"], 75.0);
    assert_eq!(normalized["tableau"], 50.0);
}

fn data_scientist_profile() -> String {
    let (vacancies, skipped) = load_split("data_scientist.csv");
    assert_eq!((vacancies.len(), skipped), (100, 0));
    let skill_sentences: Vec<_> = label_corpus(&vacancies, &HeadingRules::default())
        .into_iter()
        .filter(|l| l.label == Label::Skill)
        .map(|l| l.sentence)
        .collect();
    let terms = extract_skill_terms(&skill_sentences, 3, 20);
    let today = NaiveDate::from_ymd_opt(2024, 7, 1).unwrap();
    let rates = occurrence_rates(&vacancies, "data scientist", "berlin", 6, today, &terms, &HeadingDetector::default());
    let profile = refresh_profile(None, "data scientist", "berlin", &normalize_rates(&rates), 0.7, today, None).unwrap();
    let mut out = Vec::new();
    write_profile(&mut out, &profile).unwrap();
    String::from_utf8(out).unwrap()
}

#[test]
fn data_scientist_profile_matches_frozen_output() {
    let text = data_scientist_profile();
    let frozen_path = fixture("vacancies/data_scientist_profile.tsv");
    if std::env::var_os("SKILLREC_FREEZE").is_some() {
        std::fs::write(&frozen_path, &text).unwrap();
    }
    let frozen = std::fs::read_to_string(&frozen_path).unwrap();
    assert_eq!(text, frozen);
    let profiles = read_profiles(&frozen).unwrap();
    assert_eq!(profiles.len(), 1);
    let entries = &profiles[0].entries;
    assert_eq!(entries[0].importance, 100.0);
    assert!(entries.windows(2).all(|w| w[0].importance >= w[1].importance));
}
