//! Inputs shared by the benchmarks.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slimapi_core::extract::{extract_api, SourceTree};
use slimapi_core::model::ApiModel;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Extracts the package at `fixtures/<rel>`.
pub fn fixture_model(rel: &str) -> ApiModel {
    let (tree, _) = SourceTree::discover(fixtures().join(rel), None, &[], &[]).expect("fixture exists");
    extract_api(&tree, "1.0").expect("fixture extracts").0
}

const STATEMENTS: &[&str] = &[
    "model = Ridge(alpha={v})",
    "model = Ridge(alpha={v}, fit_intercept=False)",
    "model.fit(X, y)",
    "pred = model.predict(X)",
    "lasso = models.Lasso({v}, copy_X=True).fit(X, y)",
    "tree = DecisionTreeClassifier(criterion='gini', max_depth={i})",
    "score = mse(y, pred)",
    "other = np.mean(X) + {v}",
];

/// `n` client programs against the minilearn fixture, `lines` statements each.
pub fn synthetic_corpus(n: usize, lines: usize, seed: u64) -> Vec<(String, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let mut src = String::from(
                "import numpy as np\nfrom minilearn import models\nfrom minilearn.models import Ridge, DecisionTreeClassifier\n\
                 from minilearn.metrics import mse\nX, y = [[0]], [0]\nmodel = Ridge()\n",
            );
            for _ in 0..lines {
                let template = STATEMENTS.choose(&mut rng).expect("non-empty");
                let stmt = template
                    .replace("{v}", &format!("{:.1}", rng.gen_range(0.0..3.0)))
                    .replace("{i}", &rng.gen_range(1..9).to_string());
                let _ = writeln!(src, "{stmt}");
            }
            (format!("program_{i}.py"), src)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use slimapi_core::usage::mine_sources;

    use super::*;

    #[test]
    fn synthetic_corpus_exercises_the_miner() {
        let model = fixture_model("minilearn");
        let programs = synthetic_corpus(20, 30, 1);
        assert_eq!(programs, synthetic_corpus(20, 30, 1));
        let doc = mine_sources(&programs, &model, 2).unwrap();
        assert_eq!(doc.report.files_skipped, 0);
        assert_eq!(doc.report.files_using_library, 20);
        // Every statement but the numpy one calls into the library at least once.
        let library_lines = programs
            .iter()
            .flat_map(|(_, src)| src.lines().skip(5))
            .filter(|l| !l.starts_with("other"))
            .count() as u64;
        assert!(doc.report.events_total >= library_lines, "{} < {library_lines}", doc.report.events_total);
    }
}
