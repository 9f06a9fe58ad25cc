//! Anonymized code-review bundle.
//!
//! Picks successful final programs for a few prompts, pretty-prints them
//! (which also drops comments a model may have used to sign its work),
//! shuffles them with a seeded RNG and writes `sample_NN.robo` files. The
//! mapping back to configurations goes only into `sealed_key.json`.

use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ReportError;
use crate::bench::{trial, TrialRecord};
use crate::lang::{parse, pretty_print};
use crate::orchestrator::ConfigId;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SealedKeyEntry {
    pub sample: String,
    pub config: ConfigId,
    pub trial: u8,
    pub repetition: u8,
    pub attempt_index: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseSample {
    pub name: String,
    pub path: PathBuf,
    pub trial: u8,
    /// Header plus pretty-printed program, exactly as written.
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseStudy {
    pub seed: u64,
    pub samples: Vec<CaseSample>,
    pub key_path: PathBuf,
    pub key: Vec<SealedKeyEntry>,
}

#[derive(Serialize)]
struct SealedKey<'a> {
    seed: u64,
    samples: &'a [SealedKeyEntry],
}

/// Exports `per_config` programs for every (config, prompt) pair present in
/// `records`, shuffled with `seed`. Repetitions are taken in order.
pub fn export_case_study(
    records: &[TrialRecord],
    prompts: &[u8],
    per_config: usize,
    seed: u64,
    out_dir: &Path,
) -> Result<CaseStudy, ReportError> {
    if records.is_empty() {
        return Err(ReportError::EmptyStore);
    }
    if let Some(&t) = prompts.iter().find(|t| trial(**t).is_none()) {
        return Err(ReportError::UnknownTrial(t));
    }
    let mut picked: Vec<&TrialRecord> = Vec::new();
    for config in ConfigId::ALL {
        for &prompt in prompts {
            let mut ok: Vec<&TrialRecord> = records
                .iter()
                .filter(|r| r.config == config && r.trial == prompt && r.is_final && r.succeeded())
                .collect();
            ok.sort_by_key(|r| r.key());
            if ok.len() < per_config {
                return Err(ReportError::InsufficientRecords {
                    config,
                    trial: prompt,
                    found: ok.len(),
                    needed: per_config,
                });
            }
            picked.extend(ok.into_iter().take(per_config));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    picked.shuffle(&mut rng);

    let io_err = |path: &Path| {
        let path = path.to_owned();
        move |source| ReportError::Io { path, source }
    };
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut samples = Vec::new();
    let mut key = Vec::new();
    for (i, r) in picked.iter().enumerate() {
        let name = format!("sample_{:02}", i + 1);
        let source = r.program_source.as_deref().unwrap_or_default();
        // a successful run implies the program parses
        let program = parse(source).map(|p| pretty_print(&p)).unwrap_or_else(|_| source.to_owned());
        let prompt = trial(r.trial).map(|t| t.prompt).unwrap_or_default();
        let text = format!("# {name}\n# prompt {}: {prompt}\n\n{program}", r.trial);
        let path = out_dir.join(format!("{name}.robo"));
        fs::write(&path, &text).map_err(io_err(&path))?;
        key.push(SealedKeyEntry {
            sample: name.clone(),
            config: r.config,
            trial: r.trial,
            repetition: r.repetition,
            attempt_index: r.attempt_index,
        });
        samples.push(CaseSample { name, path, trial: r.trial, text });
    }
    let key_path = out_dir.join("sealed_key.json");
    let mut json = serde_json::to_string_pretty(&SealedKey { seed, samples: &key }).expect("key serializes");
    json.push('\n');
    fs::write(&key_path, json).map_err(io_err(&key_path))?;
    Ok(CaseStudy { seed, samples, key_path, key })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feedback::tests::record;

    fn store() -> Vec<TrialRecord> {
        let mut records = Vec::new();
        for config in ConfigId::ALL {
            for trial in [3, 5] {
                for rep in 1..=3 {
                    let mut r = record(config, trial, rep, 0, true, true);
                    r.program_source = Some(format!("# written by config {config}\nsay(\"rep {rep}\")\n"));
                    records.push(r);
                }
            }
        }
        records
    }

    #[test]
    fn twelve_anonymous_samples() {
        let dir = tempfile::tempdir().unwrap();
        let study = export_case_study(&store(), &[3, 5], 2, 7, dir.path()).unwrap();
        assert_eq!(study.samples.len(), 12);
        assert!(study.key_path.exists());
        for s in &study.samples {
            assert!(!s.text.contains("config"), "{}", s.text);
            assert_eq!(fs::read_to_string(&s.path).unwrap(), s.text);
        }
        let again = export_case_study(&store(), &[3, 5], 2, 7, dir.path()).unwrap();
        assert_eq!(study.key, again.key);
        let other = export_case_study(&store(), &[3, 5], 2, 8, dir.path()).unwrap();
        assert_ne!(study.key, other.key);
    }

    #[test]
    fn missing_successes_are_reported() {
        let dir = tempfile::tempdir().unwrap();
        let records: Vec<TrialRecord> =
            store().into_iter().filter(|r| !(r.config == ConfigId::C && r.trial == 5)).collect();
        let err = export_case_study(&records, &[3, 5], 2, 7, dir.path()).unwrap_err();
        assert!(matches!(err, ReportError::InsufficientRecords { config: ConfigId::C, trial: 5, found: 0, needed: 2 }));
    }
}
