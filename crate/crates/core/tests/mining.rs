mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use slimapi_core::usage::{mine, mine_sources, Corpus, ManifestEntry};

use common::oracle::{expected_counts, program, Program};
use common::{extract, fixtures};

fn programs(n: usize, seed: u64) -> Vec<Program> {
    let model = extract("minilearn", "1.0");
    (0..n).map(|i| program(&model, i, ChaCha8Rng::seed_from_u64(seed + i as u64))).collect()
}

#[test]
fn miner_matches_ground_truth() {
    let model = extract("minilearn", "1.0");
    let programs = programs(40, 7);
    let sources: Vec<(String, String)> = programs.iter().map(|p| (p.path.clone(), p.source.clone())).collect();
    let expected = expected_counts(&model, &programs);
    let events: usize = programs.iter().map(|p| p.events.len()).sum();
    assert!(events > 100, "generator produced only {events} events");
    assert!(programs.iter().any(|p| p.events.is_empty()));
    for jobs in [1, 3] {
        let doc = mine_sources(&sources, &model, jobs).unwrap();
        if doc.counts != expected {
            for p in &programs {
                let single = mine_sources(&[(p.path.clone(), p.source.clone())], &model, 1).unwrap();
                assert_eq!(single.counts, expected_counts(&model, std::slice::from_ref(p)), "{}\n{}", p.path, p.source);
            }
        }
        assert_eq!(doc.counts, expected);
        assert_eq!(doc.report.events_total, programs.iter().map(|p| p.events.len() as u64).sum::<u64>());
        assert_eq!(doc.report.files_skipped, 0);
    }
}

#[test]
fn corpus_with_notebook_and_manifest() {
    let model = extract("minilearn", "1.0");
    let root = fixtures().join("corpus");
    let all = mine(&Corpus::discover(&root).unwrap(), &model, 2).unwrap();
    assert_eq!(all.report.files_total, 4);
    assert_eq!(all.report.files_skipped, 1);
    assert_eq!(all.counts.class_uses("minilearn.models.Ridge"), 4);
    let alpha = all.counts.parameter("minilearn.models.Ridge.__init__#alpha").unwrap();
    assert_eq!(alpha.values.get("0.5"), Some(&2));

    let entries = Corpus::read_manifest(&root.join("manifest.json")).unwrap();
    assert_eq!(entries[0], ManifestEntry { path: "analysis.ipynb".into(), provenance: Some("notebook-1".into()) });
    let subset = mine(&Corpus::from_manifest(&root, entries).unwrap(), &model, 1).unwrap();
    assert_eq!(subset.report.files_total, 2);
    assert_eq!(subset.counts.class_uses("minilearn.models.Ridge"), 3);
}
