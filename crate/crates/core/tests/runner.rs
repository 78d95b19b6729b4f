use std::fs;

use stacksure::prelude::*;
use stacksure::runner::report::{parse_records_csv, summary_csv};
use stacksure::runner::{emit_report, export_csv, load_csv, run_experiment, synthetic_dataset, ExperimentConfig};

const SMALL: &str = "repeats = 2
master_seed = 9
generator.p = 30
generator.sample_size = 60
generator.n_new = 300
protocol.k_outer = 3
protocol.k_inner = 3
protocol.bootstraps = 20
protocol.combiners = nnls, mean, best1
protocol.learners = lasso, naive_bayes, knn";

fn small(extra: &str) -> ExperimentConfig {
    ExperimentConfig::parse(&format!("{SMALL}\n{extra}")).unwrap()
}

#[test]
fn one_repeat_one_estimator_one_combiner_gives_one_record() {
    let cfg = ExperimentConfig::parse(
        "repeats = 1
         estimators = training_set
         protocol.combiners = mean
         protocol.learners = lasso
         generator.p = 20",
    )
    .unwrap();
    let bundle = run_experiment(&cfg).unwrap();
    assert_eq!(bundle.records.len(), 1);
    assert!(bundle.records[0].auc.is_some());
}

#[test]
fn record_count_is_repeats_times_estimators_times_combiners() {
    let cfg = small("");
    let bundle = run_experiment(&cfg).unwrap();
    assert_eq!(bundle.records.len(), 2 * 6 * 3);
    assert_eq!(bundle.summaries.len(), 6 * 3);
}

#[test]
fn reports_are_byte_identical_across_runs_and_worker_counts() {
    let cfg = small("estimators = training_set, bbc_sl, nested_cv");
    let mut cfg4 = cfg.clone();
    cfg4.worker_count = 4;
    let dirs: Vec<_> = [&cfg, &cfg, &cfg4]
        .into_iter()
        .map(|c| {
            let d = tempfile::tempdir().unwrap();
            emit_report(&run_experiment(c).unwrap(), d.path(), true).unwrap();
            d
        })
        .collect();
    let read = |i: usize, f: &str| fs::read_to_string(dirs[i].path().join(f)).unwrap();
    for f in ["records.csv", "summary.csv", "boxplot.csv", "report.json"] {
        assert!(read(0, f) == read(1, f), "{f} differs between identical runs");
    }
    // report.json embeds the config, worker count included
    for f in ["records.csv", "summary.csv", "boxplot.csv"] {
        assert!(read(0, f) == read(2, f), "{f} differs across worker counts");
    }
}

#[test]
fn records_reload_and_resummarize_to_the_written_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small("estimators = training_set, independent_cv, bbc_sl");
    emit_report(&run_experiment(&cfg).unwrap(), dir.path(), true).unwrap();
    let records = parse_records_csv(&fs::read_to_string(dir.path().join("records.csv")).unwrap()).unwrap();
    assert_eq!(summary_csv(&records), fs::read_to_string(dir.path().join("summary.csv")).unwrap());
}

#[test]
fn seed_changes_the_data() {
    let a = synthetic_dataset(&small(""), 0).unwrap();
    let mut other = small("");
    other.master_seed = 10;
    let b = synthetic_dataset(&other, 0).unwrap();
    let c = synthetic_dataset(&small(""), 1).unwrap();
    assert_ne!(a.features(), b.features());
    assert_ne!(a.features(), c.features());
}

#[test]
fn synthetic_csv_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    let data = synthetic_dataset(&small(""), 0).unwrap();
    export_csv(&data, &path).unwrap();
    let back = load_csv(&path).unwrap();
    assert_eq!(back.labels(), data.labels());
    for (x, y) in back.features().iter().zip(data.features()) {
        assert_eq!(x.to_bits(), y.to_bits());
    }
}

#[test]
fn csv_mode_runs_resampling_estimators() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    export_csv(&synthetic_dataset(&small(""), 0).unwrap(), &path).unwrap();
    let cfg = small(&format!(
        "mode = csv\ndata_path = {}\nestimators = training_set, independent_cv, bbc_sl, nested_cv",
        path.display()
    ));
    let bundle = run_experiment(&cfg).unwrap();
    assert_eq!(bundle.records.len(), 2 * 4 * 3);
    assert!(bundle.records.iter().all(|r| r.auc.is_some()));

    let oracle = format!("{SMALL}\nmode = csv\ndata_path = {}\nestimators = new_data", path.display());
    assert!(matches!(ExperimentConfig::parse(&oracle), Err(Error::Config(_))));
}

#[test]
fn shipped_configs_parse() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "conf") {
            let cfg = ExperimentConfig::load(&path, std::iter::empty()).unwrap();
            assert_eq!(ExperimentConfig::parse(&cfg.to_text()).unwrap(), cfg, "{}", path.display());
            seen += 1;
        }
    }
    assert!(seen >= 3);
}
