//! Aggregates over the record and feedback stores, and the plot-data files.
//!
//! | file | rows | columns |
//! |---|---|---|
//! | `fig5_error_rate.csv` | config | attempt-0 runs, failures, error rate % |
//! | `fig6_usage.csv` | config | inference s, execution s, input/output tokens |
//! | `fig7_scores_all.csv` | config | mean ratings over all trials |
//! | `fig8_scores_prompts_3_5.csv` | config | mean ratings over trials 3 and 5 |
//! | `fig9_scores_prompt_2.csv` | config | mean ratings over trial 2 |

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ObserverFeedback;
use crate::agent::TokenCounting;
use crate::bench::TrialRecord;
use crate::orchestrator::ConfigId;

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("no records for config {0}")]
    EmptyInput(ConfigId),
    #[error("record store is empty")]
    EmptyStore,
    #[error("no feedback for config {config} after filtering to trials {filter:?}")]
    EmptyAfterFilter { config: ConfigId, filter: Vec<u8> },
    #[error("unknown trial {0} (trials are 1-7)")]
    UnknownTrial(u8),
    #[error("records mix approximate and reported token counts; refusing to average them")]
    MixedTokenCounting,
    #[error("need {needed} successful runs of trial {trial} under config {config}, found {found}")]
    InsufficientRecords { config: ConfigId, trial: u8, found: usize, needed: usize },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// Percentage of attempt-0 executions for `config` that failed. Attempts
/// whose generation produced no program never ran and are not counted.
pub fn error_rate(records: &[TrialRecord], config: ConfigId) -> Result<f64, ReportError> {
    let runs: Vec<&TrialRecord> =
        records.iter().filter(|r| r.config == config && r.attempt_index == 0 && r.outcome.is_some()).collect();
    if runs.is_empty() {
        return Err(ReportError::EmptyInput(config));
    }
    let failures = runs.iter().filter(|r| r.execution_failure).count();
    Ok(100.0 * failures as f64 / runs.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UsageSummary {
    /// Attempt-0 generations that produced a program.
    pub generation_samples: usize,
    pub inference_mean: f64,
    pub input_tokens_mean: f64,
    pub output_tokens_mean: f64,
    /// Final attempts that ran.
    pub execution_samples: usize,
    pub execution_mean: f64,
    pub token_counting: TokenCounting,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Generation metrics from attempt 0, execution metrics from the final
/// attempt of each cell.
pub fn usage_summary(records: &[TrialRecord], config: ConfigId) -> Result<UsageSummary, ReportError> {
    let generations: Vec<&TrialRecord> =
        records.iter().filter(|r| r.config == config && r.attempt_index == 0 && r.program_source.is_some()).collect();
    let executions: Vec<&TrialRecord> =
        records.iter().filter(|r| r.config == config && r.is_final && r.outcome.is_some()).collect();
    if generations.is_empty() && executions.is_empty() {
        return Err(ReportError::EmptyInput(config));
    }
    let counting = generations.first().map(|r| r.generation.token_counting);
    if generations.iter().any(|r| Some(r.generation.token_counting) != counting) {
        return Err(ReportError::MixedTokenCounting);
    }
    Ok(UsageSummary {
        generation_samples: generations.len(),
        inference_mean: mean(generations.iter().map(|r| r.inference_duration)),
        input_tokens_mean: mean(generations.iter().map(|r| r.input_tokens as f64)),
        output_tokens_mean: mean(generations.iter().map(|r| r.output_tokens as f64)),
        execution_samples: executions.len(),
        execution_mean: mean(executions.iter().map(|r| r.execution_sim_time)),
        token_counting: counting.unwrap_or(TokenCounting::Approximate),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingMeans {
    pub samples: usize,
    pub success: f64,
    pub safety: f64,
    pub sociability: f64,
    pub expectation_diff: f64,
}

/// Mean ratings for `config`, optionally restricted to some trials.
pub fn performance_summary(
    feedback: &[ObserverFeedback],
    config: ConfigId,
    prompt_filter: Option<&BTreeSet<u8>>,
) -> Result<RatingMeans, ReportError> {
    let rows: Vec<&ObserverFeedback> =
        feedback.iter().filter(|f| f.config == config && prompt_filter.is_none_or(|p| p.contains(&f.trial))).collect();
    if rows.is_empty() {
        return Err(ReportError::EmptyAfterFilter {
            config,
            filter: prompt_filter.map_or_else(Vec::new, |p| p.iter().copied().collect()),
        });
    }
    Ok(RatingMeans {
        samples: rows.len(),
        success: mean(rows.iter().map(|f| f64::from(f.success))),
        safety: mean(rows.iter().map(|f| f64::from(f.safety))),
        sociability: mean(rows.iter().map(|f| f64::from(f.sociability))),
        expectation_diff: mean(rows.iter().map(|f| f64::from(f.expectation_diff))),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigAggregate {
    pub config: ConfigId,
    pub attempt0_runs: usize,
    pub attempt0_failures: usize,
    /// Attempt-0 generations that produced no program (not in the error rate).
    pub generation_failures: usize,
    pub cells_all_retries_failed: usize,
    pub error_rate: Option<f64>,
    pub usage: Option<UsageSummary>,
    pub ratings_all: Option<RatingMeans>,
    pub ratings_prompts_3_5: Option<RatingMeans>,
    pub ratings_prompt_2: Option<RatingMeans>,
    /// Ratings under the caller's filter, when one was given.
    pub ratings_filtered: Option<RatingMeans>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub total_records: usize,
    pub final_records: usize,
    pub feedback_rows: usize,
    pub prompt_filter: Option<Vec<u8>>,
    pub configs: Vec<ConfigAggregate>,
}

impl AggregateReport {
    pub fn build(
        records: &[TrialRecord],
        feedback: &[ObserverFeedback],
        prompt_filter: Option<&BTreeSet<u8>>,
    ) -> Result<Self, ReportError> {
        if records.is_empty() {
            return Err(ReportError::EmptyStore);
        }
        if let Some(t) = prompt_filter.and_then(|p| p.iter().find(|t| !(1..=7).contains(*t))) {
            return Err(ReportError::UnknownTrial(*t));
        }
        let present: BTreeSet<ConfigId> = records.iter().map(|r| r.config).collect();
        let three_five: BTreeSet<u8> = [3, 5].into();
        let two: BTreeSet<u8> = [2].into();
        let mut configs = Vec::new();
        for config in present {
            let attempt0 = records.iter().filter(|r| r.config == config && r.attempt_index == 0);
            let usage = match usage_summary(records, config) {
                Ok(u) => Some(u),
                Err(ReportError::EmptyInput(_)) => None,
                Err(e) => return Err(e),
            };
            configs.push(ConfigAggregate {
                config,
                attempt0_runs: attempt0.clone().filter(|r| r.outcome.is_some()).count(),
                attempt0_failures: attempt0.clone().filter(|r| r.execution_failure).count(),
                generation_failures: attempt0.filter(|r| r.generation_failed()).count(),
                cells_all_retries_failed: records.iter().filter(|r| r.config == config && r.all_retries_failed).count(),
                error_rate: error_rate(records, config).ok(),
                usage,
                ratings_all: performance_summary(feedback, config, None).ok(),
                ratings_prompts_3_5: performance_summary(feedback, config, Some(&three_five)).ok(),
                ratings_prompt_2: performance_summary(feedback, config, Some(&two)).ok(),
                ratings_filtered: prompt_filter.and_then(|p| performance_summary(feedback, config, Some(p)).ok()),
            });
        }
        Ok(AggregateReport {
            total_records: records.len(),
            final_records: records.iter().filter(|r| r.is_final).count(),
            feedback_rows: feedback.len(),
            prompt_filter: prompt_filter.map(|p| p.iter().copied().collect()),
            configs,
        })
    }
}

/// Paths written by [`emit_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReportArtifacts {
    pub aggregate: PathBuf,
    pub tables: Vec<PathBuf>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn scores_table(report: &AggregateReport, pick: impl Fn(&ConfigAggregate) -> Option<&RatingMeans>) -> String {
    let mut out = String::from("config,samples,success_mean,safety_mean,sociability_mean,expectation_diff_mean\n");
    for c in &report.configs {
        let m = pick(c);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            c.config,
            m.map_or(0, |m| m.samples),
            opt(m.map(|m| m.success)),
            opt(m.map(|m| m.safety)),
            opt(m.map(|m| m.sociability)),
            opt(m.map(|m| m.expectation_diff)),
        );
    }
    out
}

/// Writes `aggregate.json` and the per-figure CSV tables into `out_dir`.
/// With a prompt filter, an extra `scores_prompts_<ids>.csv` is written.
/// Output is a pure function of the inputs.
pub fn emit_report(
    records: &[TrialRecord],
    feedback: &[ObserverFeedback],
    prompt_filter: Option<&BTreeSet<u8>>,
    out_dir: &Path,
) -> Result<ReportArtifacts, ReportError> {
    let report = AggregateReport::build(records, feedback, prompt_filter)?;
    let io_err = |path: &Path| {
        let path = path.to_owned();
        move |source| ReportError::Io { path, source }
    };
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;

    let mut fig5 = String::from("config,attempt0_runs,attempt0_failures,error_rate_pct\n");
    let mut fig6 = String::from(
        "config,generation_samples,inference_s_mean,execution_samples,execution_s_mean,input_tokens_mean,output_tokens_mean,token_counting\n",
    );
    for c in &report.configs {
        let _ = writeln!(fig5, "{},{},{},{}", c.config, c.attempt0_runs, c.attempt0_failures, opt(c.error_rate));
        let u = c.usage.as_ref();
        let _ = writeln!(
            fig6,
            "{},{},{},{},{},{},{},{}",
            c.config,
            u.map_or(0, |u| u.generation_samples),
            opt(u.map(|u| u.inference_mean)),
            u.map_or(0, |u| u.execution_samples),
            opt(u.map(|u| u.execution_mean)),
            opt(u.map(|u| u.input_tokens_mean)),
            opt(u.map(|u| u.output_tokens_mean)),
            u.map(|u| u.token_counting.to_string()).unwrap_or_default(),
        );
    }
    let mut files = vec![
        ("fig5_error_rate.csv".to_owned(), fig5),
        ("fig6_usage.csv".to_owned(), fig6),
        ("fig7_scores_all.csv".to_owned(), scores_table(&report, |c| c.ratings_all.as_ref())),
        ("fig8_scores_prompts_3_5.csv".to_owned(), scores_table(&report, |c| c.ratings_prompts_3_5.as_ref())),
        ("fig9_scores_prompt_2.csv".to_owned(), scores_table(&report, |c| c.ratings_prompt_2.as_ref())),
    ];
    if let Some(filter) = prompt_filter {
        let ids: Vec<String> = filter.iter().map(u8::to_string).collect();
        files.push((
            format!("scores_prompts_{}.csv", ids.join("_")),
            scores_table(&report, |c| c.ratings_filtered.as_ref()),
        ));
    }

    let aggregate = out_dir.join("aggregate.json");
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    fs::write(&aggregate, json).map_err(io_err(&aggregate))?;
    let mut tables = Vec::new();
    for (name, body) in files {
        let path = out_dir.join(name);
        fs::write(&path, body).map_err(io_err(&path))?;
        tables.push(path);
    }
    Ok(ReportArtifacts { aggregate, tables })
}
