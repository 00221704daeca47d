use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::PipelineError;

/// An authentic parallel file and how many times it is repeated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixPart {
    pub path: PathBuf,
    pub oversample: u32,
}

/// Which side is adjusted to reach the requested ratio.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Balance {
    /// Keep every synthetic line and cycle through the authentic pool until
    /// it reaches its share.
    #[default]
    ReplicateAuthentic,
    /// Keep the authentic pool and take only the first lines of the synthetic file.
    TruncateSynthetic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixSpec {
    pub authentic: Vec<MixPart>,
    pub synthetic: PathBuf,
    pub ratio_authentic: u64,
    pub ratio_synthetic: u64,
    pub seed: u64,
    pub balance: Balance,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixSummary {
    /// Authentic lines after oversampling, before balancing.
    pub authentic_oversampled: u64,
    pub authentic_lines: u64,
    pub synthetic_lines: u64,
    pub total_lines: u64,
}

fn read_parallel(path: &Path) -> Result<Vec<String>, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|source| PipelineError::File {
        path: path.to_path_buf(),
        source,
    })?;
    text.lines()
        .enumerate()
        .map(|(i, line)| {
            if line.contains('\t') {
                Ok(line.to_string())
            } else {
                Err(PipelineError::NotParallel {
                    path: path.display().to_string(),
                    line: i + 1,
                })
            }
        })
        .collect()
}

/// `round(count * num / denom)` in integer arithmetic, halves up.
fn scale(count: u64, num: u64, denom: u64) -> u64 {
    ((count as u128 * num as u128 * 2 + denom as u128) / (denom as u128 * 2)) as u64
}

/// Final (authentic, synthetic) line counts for pools of `authentic` lines
/// (after oversampling) and `synthetic` lines.
pub fn mix_counts(
    authentic: u64,
    synthetic: u64,
    ratio_authentic: u64,
    ratio_synthetic: u64,
    balance: Balance,
) -> Result<(u64, u64), PipelineError> {
    let ratio_err = |message: String| PipelineError::Ratio {
        ratio: format!("{ratio_authentic}:{ratio_synthetic}"),
        message,
    };
    if ratio_authentic == 0 || ratio_synthetic == 0 {
        return Err(ratio_err("both ratio terms must be positive".into()));
    }
    if authentic == 0 {
        return Err(PipelineError::EmptyAuthentic);
    }
    match balance {
        Balance::ReplicateAuthentic => {
            let target = scale(synthetic, ratio_authentic, ratio_synthetic);
            if target < authentic {
                return Err(ratio_err(format!(
                    "{authentic} authentic lines need at least {} synthetic lines, found {synthetic}",
                    scale(authentic, ratio_synthetic, ratio_authentic),
                )));
            }
            Ok((target, synthetic))
        }
        Balance::TruncateSynthetic => {
            let target = scale(authentic, ratio_synthetic, ratio_authentic);
            if target > synthetic {
                return Err(ratio_err(format!(
                    "{authentic} authentic lines need {target} synthetic lines, found {synthetic}"
                )));
            }
            Ok((authentic, target))
        }
    }
}

/// Writes the shuffled mix of authentic and synthetic lines to `out`.
///
/// Every input file is held in memory once; the shuffle permutes line
/// references, so memory grows with the input size plus 16 bytes per output line.
pub fn build_mix<W: Write>(spec: &MixSpec, out: &mut W) -> Result<MixSummary, PipelineError> {
    if spec.ratio_authentic == 0 || spec.ratio_synthetic == 0 {
        return Err(PipelineError::Ratio {
            ratio: format!("{}:{}", spec.ratio_authentic, spec.ratio_synthetic),
            message: "both ratio terms must be positive".into(),
        });
    }
    if spec.authentic.is_empty() {
        return Err(PipelineError::EmptyAuthentic);
    }
    let mut files = Vec::with_capacity(spec.authentic.len() + 1);
    let mut authentic: Vec<(u32, u32)> = Vec::new();
    for part in &spec.authentic {
        if part.oversample == 0 {
            return Err(PipelineError::Ratio {
                ratio: format!("{}:{}", spec.ratio_authentic, spec.ratio_synthetic),
                message: format!("oversample factor of {} must be at least 1", part.path.display()),
            });
        }
        let id = files.len() as u32;
        let lines = read_parallel(&part.path)?;
        for _ in 0..part.oversample {
            authentic.extend((0..lines.len() as u32).map(|i| (id, i)));
        }
        files.push(lines);
    }
    if authentic.is_empty() {
        return Err(PipelineError::EmptyAuthentic);
    }
    let synthetic_id = files.len() as u32;
    let synthetic_file = read_parallel(&spec.synthetic)?;
    let mut synthetic: Vec<(u32, u32)> = (0..synthetic_file.len() as u32).map(|i| (synthetic_id, i)).collect();
    files.push(synthetic_file);

    let oversampled = authentic.len() as u64;
    let (authentic_target, synthetic_target) = mix_counts(
        oversampled,
        synthetic.len() as u64,
        spec.ratio_authentic,
        spec.ratio_synthetic,
        spec.balance,
    )?;
    let base = authentic.clone();
    authentic.extend(base.iter().cycle().take((authentic_target - oversampled) as usize));
    synthetic.truncate(synthetic_target as usize);

    let summary = MixSummary {
        authentic_oversampled: oversampled,
        authentic_lines: authentic.len() as u64,
        synthetic_lines: synthetic.len() as u64,
        total_lines: (authentic.len() + synthetic.len()) as u64,
    };
    let mut pool = authentic;
    pool.extend(synthetic);
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    pool.shuffle(&mut rng);
    for (file, line) in pool {
        out.write_all(files[file as usize][line as usize].as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write_lines(dir: &Path, name: &str, prefix: &str, n: usize) -> PathBuf {
        let path = dir.join(name);
        let body: String = (0..n).map(|i| format!("{prefix} {i}\t{prefix} ok {i}\n")).collect();
        fs::write(&path, body).unwrap();
        path
    }

    #[test]
    fn scale_rounds() {
        assert_eq!(scale(200, 2, 1), 400);
        assert_eq!(scale(3, 1, 2), 2);
        assert_eq!(scale(5, 1, 4), 1);
    }

    #[test]
    fn large_pool_counts() {
        assert_eq!(
            mix_counts(500_000, 10_000_000, 1, 20, Balance::ReplicateAuthentic).unwrap(),
            (500_000, 10_000_000)
        );
        assert_eq!(
            mix_counts(5_000_000, 10_000_000, 1, 2, Balance::TruncateSynthetic).unwrap(),
            (5_000_000, 10_000_000)
        );
        assert_eq!(
            mix_counts(100, 1000, 1, 2, Balance::ReplicateAuthentic).unwrap(),
            (500, 1000)
        );
        assert_eq!(
            mix_counts(100, 1000, 1, 2, Balance::TruncateSynthetic).unwrap(),
            (100, 200)
        );
    }

    #[test]
    fn errors() {
        let dir = tempfile::tempdir().unwrap();
        let syn = write_lines(dir.path(), "syn", "s", 10);
        let bad = dir.path().join("bad");
        fs::write(&bad, "ok\tok\nno tab here\n").unwrap();
        let mut spec = MixSpec {
            authentic: vec![],
            synthetic: syn.clone(),
            ratio_authentic: 1,
            ratio_synthetic: 2,
            seed: 1,
            balance: Balance::ReplicateAuthentic,
        };
        assert!(matches!(
            build_mix(&spec, &mut Vec::new()),
            Err(PipelineError::EmptyAuthentic)
        ));
        spec.authentic = vec![MixPart {
            path: bad,
            oversample: 1,
        }];
        assert!(matches!(
            build_mix(&spec, &mut Vec::new()),
            Err(PipelineError::NotParallel { line: 2, .. })
        ));
        spec.authentic = vec![MixPart {
            path: write_lines(dir.path(), "a", "a", 8),
            oversample: 1,
        }];
        assert!(matches!(
            build_mix(&spec, &mut Vec::new()),
            Err(PipelineError::Ratio { .. })
        ));
        spec.balance = Balance::TruncateSynthetic;
        assert!(matches!(
            build_mix(&spec, &mut Vec::new()),
            Err(PipelineError::Ratio { .. })
        ));
        let empty = dir.path().join("empty");
        fs::write(&empty, "").unwrap();
        spec.authentic = vec![MixPart {
            path: empty,
            oversample: 3,
        }];
        assert!(matches!(
            build_mix(&spec, &mut Vec::new()),
            Err(PipelineError::EmptyAuthentic)
        ));
    }

    #[test]
    fn replicate_cycles_authentic() {
        let dir = tempfile::tempdir().unwrap();
        let spec = MixSpec {
            authentic: vec![MixPart {
                path: write_lines(dir.path(), "a", "a", 3),
                oversample: 1,
            }],
            synthetic: write_lines(dir.path(), "s", "s", 14),
            ratio_authentic: 1,
            ratio_synthetic: 2,
            seed: 3,
            balance: Balance::ReplicateAuthentic,
        };
        let mut out = Vec::new();
        let summary = build_mix(&spec, &mut out).unwrap();
        assert_eq!(summary.authentic_lines, 7);
        assert_eq!(summary.synthetic_lines, 14);
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("a 0\t")).count(), 3);
        assert_eq!(text.lines().filter(|l| l.starts_with("a 2\t")).count(), 2);
    }
}
