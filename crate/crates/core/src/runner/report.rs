//! Report files: `records.csv`, `summary.csv`, `report.json`, `boxplot.csv`,
//! `timings.csv` and `tasks.csv`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::combiners::CombinerMethod;
use crate::error::{Error, Result};

use super::config::Estimator;
use super::experiment::{summarize_records, EvaluationRecord, ReportBundle};

pub const UNDEFINED: &str = "undefined";

fn write(path: PathBuf, text: String) -> Result<PathBuf> {
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// `records.csv` text. Without `with_times` the `wall_time_ms` column is left
/// empty so the file depends only on the configuration.
pub fn records_csv(records: &[EvaluationRecord], with_times: bool) -> String {
    let mut s = String::from("estimator,combiner,repeat,seed,auc,wall_time_ms\n");
    for r in records {
        let auc = r.auc.map_or_else(|| UNDEFINED.to_string(), |a| a.to_string());
        let time = if with_times { format!("{:.0}", r.wall_time_ms) } else { String::new() };
        let _ = writeln!(s, "{},{},{},{},{},{}", r.estimator, r.combiner, r.repeat, r.seed, auc, time);
    }
    s
}

/// Parses `records.csv` back; times and notes are not restored.
pub fn parse_records_csv(text: &str) -> Result<Vec<EvaluationRecord>> {
    let bad = |line: usize, message: String| Error::Csv {
        path: PathBuf::from("records.csv"),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "estimator,combiner,repeat,seed,auc,wall_time_ms")) => {}
        _ => return Err(bad(1, "unexpected header".into())),
    }
    lines
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, line)| {
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != 6 {
                return Err(bad(i + 1, format!("expected 6 cells, found {}", cells.len())));
            }
            let num = |c: &str| bad(i + 1, format!("cannot parse '{c}'"));
            Ok(EvaluationRecord {
                estimator: cells[0].parse()?,
                combiner: cells[1].parse()?,
                repeat: cells[2].parse().map_err(|_| num(cells[2]))?,
                seed: cells[3].parse().map_err(|_| num(cells[3]))?,
                auc: match cells[4] {
                    UNDEFINED => None,
                    a => Some(a.parse().map_err(|_| num(a))?),
                },
                wall_time_ms: if cells[5].is_empty() {
                    0.0
                } else {
                    cells[5].parse().map_err(|_| num(cells[5]))?
                },
                note: None,
            })
        })
        .collect()
}

/// "0.700±0.000": mean ± standard error of the mean.
pub fn format_cell(mean: f64, se: f64) -> String {
    format!("{mean:.3}±{se:.3}")
}

/// Rows are combiners, columns estimators, cells mean±se over repeats.
pub fn summary_csv(records: &[EvaluationRecord]) -> String {
    let rows = summarize_records(records);
    let mut estimators: Vec<Estimator> = rows.iter().map(|r| r.estimator).collect();
    estimators.dedup();
    let mut combiners: Vec<CombinerMethod> = rows.iter().map(|r| r.combiner).collect();
    combiners.sort_unstable();
    combiners.dedup();
    let mut s = String::from("combiner");
    for e in &estimators {
        let _ = write!(s, ",{e}");
    }
    s.push('\n');
    for c in &combiners {
        s.push_str(c.name());
        for e in &estimators {
            let cell = rows
                .iter()
                .find(|r| r.estimator == *e && r.combiner == *c)
                .and_then(|r| r.stat.as_ref())
                .map_or_else(|| UNDEFINED.to_string(), |st| format_cell(st.mean, st.se_of_mean));
            let _ = write!(s, ",{cell}");
        }
        s.push('\n');
    }
    s
}

fn boxplot_csv(records: &[EvaluationRecord]) -> String {
    let mut s = String::from("estimator,combiner,repeat,auc\n");
    for r in records {
        if let Some(a) = r.auc {
            let _ = writeln!(s, "{},{},{},{a}", r.estimator, r.combiner, r.repeat);
        }
    }
    s
}

fn timings_csv(records: &[EvaluationRecord]) -> String {
    let mut s = String::from("estimator,combiner,repeat,wall_time_ms\n");
    for r in records {
        let _ = writeln!(s, "{},{},{},{:.3}", r.estimator, r.combiner, r.repeat, r.wall_time_ms);
    }
    s
}

fn tasks_csv(bundle: &ReportBundle) -> String {
    let mut s = String::from("repeat,task,wall_time_ms,base_fits\n");
    for t in &bundle.metadata.timings {
        let _ = writeln!(s, "{},{},{:.3},{}", t.repeat, t.task, t.wall_time_ms, t.base_fits);
    }
    s
}

fn report_json(bundle: &ReportBundle, with_times: bool) -> Result<String> {
    let mut value = serde_json::to_value(bundle).map_err(|e| Error::Config(e.to_string()))?;
    if !with_times {
        for r in value["records"].as_array_mut().into_iter().flatten() {
            r["wall_time_ms"] = json!(null);
        }
        value["metadata"]["timings"] = json!(null);
        value["metadata"]["total_wall_time_ms"] = json!(null);
    }
    let mut text = serde_json::to_string_pretty(&value).map_err(|e| Error::Config(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Writes every report file into `dir` (created if missing) and returns the
/// paths written. With `deterministic`, run times only go to `timings.csv`
/// and `tasks.csv`.
pub fn emit_report(bundle: &ReportBundle, dir: &Path, deterministic: bool) -> Result<Vec<PathBuf>> {
    if bundle.records.is_empty() {
        return Err(Error::EmptyReport);
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let with_times = !deterministic;
    Ok(vec![
        write(dir.join("records.csv"), records_csv(&bundle.records, with_times))?,
        write(dir.join("summary.csv"), summary_csv(&bundle.records))?,
        write(dir.join("report.json"), report_json(bundle, with_times)?)?,
        write(dir.join("boxplot.csv"), boxplot_csv(&bundle.records))?,
        write(dir.join("timings.csv"), timings_csv(&bundle.records))?,
        write(dir.join("tasks.csv"), tasks_csv(bundle))?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runner::experiment::RunMetadata;

    fn rec(estimator: Estimator, combiner: CombinerMethod, repeat: usize, auc: Option<f64>) -> EvaluationRecord {
        EvaluationRecord {
            estimator,
            combiner,
            repeat,
            seed: 42,
            auc,
            wall_time_ms: 1.5,
            note: None,
        }
    }

    fn bundle(records: Vec<EvaluationRecord>) -> ReportBundle {
        ReportBundle {
            summaries: summarize_records(&records),
            records,
            weights_log: Vec::new(),
            metadata: RunMetadata {
                version: "0".into(),
                config: String::new(),
                learners: Vec::new(),
                timings: Vec::new(),
                total_wall_time_ms: 0.0,
            },
        }
    }

    #[test]
    fn constant_cell_format() {
        let records = vec![
            rec(Estimator::BbcSl, CombinerMethod::Mean, 0, Some(0.7)),
            rec(Estimator::BbcSl, CombinerMethod::Mean, 1, Some(0.7)),
        ];
        assert_eq!(summary_csv(&records), "combiner,bbc_sl\nmean,0.700±0.000\n");
    }

    #[test]
    fn empty_report_is_refused() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(emit_report(&bundle(Vec::new()), dir.path(), true), Err(Error::EmptyReport)));
    }

    #[test]
    fn records_round_trip() {
        let records = vec![
            rec(Estimator::TrainingSet, CombinerMethod::Nnls, 0, Some(0.812_345_678_901_234_5)),
            rec(Estimator::TrainingSet, CombinerMethod::Nnls, 1, None),
            rec(Estimator::NestedCv, CombinerMethod::Best1, 0, Some(0.5)),
        ];
        let text = records_csv(&records, false);
        assert!(text.contains(",undefined,\n"));
        let back = parse_records_csv(&text).unwrap();
        assert_eq!(back.len(), 3);
        for (a, b) in records.iter().zip(&back) {
            assert_eq!((a.estimator, a.combiner, a.repeat, a.seed, a.auc), (b.estimator, b.combiner, b.repeat, b.seed, b.auc));
        }
        assert_eq!(summary_csv(&back), summary_csv(&records));
    }

    #[test]
    fn emits_all_files() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("nested/out");
        let b = bundle(vec![rec(Estimator::NestedCv, CombinerMethod::Mean, 0, Some(0.6))]);
        let files = emit_report(&b, &out, true).unwrap();
        assert_eq!(files.len(), 6);
        let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
        assert!(json["records"][0]["wall_time_ms"].is_null());
        let timed = fs::read_to_string(out.join("timings.csv")).unwrap();
        assert!(timed.contains("1.500"));
    }
}
