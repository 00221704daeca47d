use std::io::{self, BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{NoiseError, NoiseStats, Noiser};
use crate::text::tokenize_with;

const CHUNK_LINES: usize = 8192;
const PROGRESS_EVERY: u64 = 1_000_000;

/// Destination for (noisy, clean) sentence pairs.
pub trait PairSink {
    fn write_pair(&mut self, noisy: &str, clean: &str) -> io::Result<()>;

    fn finish(&mut self) -> io::Result<()> {
        Ok(())
    }
}

/// Writes `noisy<TAB>clean` lines.
pub struct TsvSink<W: Write>(pub W);

impl<W: Write> PairSink for TsvSink<W> {
    fn write_pair(&mut self, noisy: &str, clean: &str) -> io::Result<()> {
        writeln!(self.0, "{noisy}\t{clean}")
    }

    fn finish(&mut self) -> io::Result<()> {
        self.0.flush()
    }
}

/// Writes noisy and clean sentences to two line-aligned outputs.
pub struct SplitSink<A: Write, B: Write> {
    pub noisy: A,
    pub clean: B,
}

impl<A: Write, B: Write> PairSink for SplitSink<A, B> {
    fn write_pair(&mut self, noisy: &str, clean: &str) -> io::Result<()> {
        writeln!(self.noisy, "{noisy}")?;
        writeln!(self.clean, "{clean}")
    }

    fn finish(&mut self) -> io::Result<()> {
        self.noisy.flush()?;
        self.clean.flush()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesisSummary {
    pub lines_read: u64,
    pub pairs_written: u64,
    pub skipped_malformed: u64,
    pub stats: NoiseStats,
}

/// Corrupts every line of `input` (one sentence per line) and writes the
/// pairs to `sink` in input order, stopping after `max_sentences` pairs.
///
/// Line `i` (0-based, counting malformed lines) is corrupted as record `i`.
/// `pool` only changes throughput. Malformed UTF-8 lines are skipped; if
/// more than 1% of the lines read were skipped the run fails after writing.
pub fn synthesize_corpus<R: BufRead>(
    mut input: R,
    noiser: &Noiser,
    sink: &mut dyn PairSink,
    pool: Option<&rayon::ThreadPool>,
) -> Result<SynthesisSummary, NoiseError> {
    let cfg = noiser.config();
    let mut summary = SynthesisSummary::default();
    let mut buf = Vec::new();
    let mut eof = false;
    while !eof && summary.pairs_written < cfg.max_sentences {
        let remaining = cfg.max_sentences - summary.pairs_written;
        let mut chunk: Vec<(u64, String)> = Vec::with_capacity(CHUNK_LINES);
        while (chunk.len() as u64) < remaining.min(CHUNK_LINES as u64) {
            buf.clear();
            if input.read_until(b'\n', &mut buf)? == 0 {
                eof = true;
                break;
            }
            let index = summary.lines_read;
            summary.lines_read += 1;
            if summary.lines_read % PROGRESS_EVERY == 0 {
                log::info!("read {} lines", summary.lines_read);
            }
            while matches!(buf.last(), Some(b'\n' | b'\r')) {
                buf.pop();
            }
            match std::str::from_utf8(&buf) {
                Ok(line) => chunk.push((index, line.to_string())),
                Err(_) => {
                    summary.skipped_malformed += 1;
                    log::warn!("skipping line {}: invalid UTF-8", index + 1);
                }
            }
        }
        let work = || {
            chunk
                .par_iter()
                .map(|(index, line)| {
                    let clean = tokenize_with(line, cfg.tokenize);
                    let (noisy, stats) = noiser.corrupt_sentence_with_stats(&clean, *index);
                    (noisy.to_string(), clean.to_string(), stats)
                })
                .collect::<Vec<_>>()
        };
        let results = match pool {
            Some(pool) => pool.install(work),
            None => work(),
        };
        for (noisy, clean, stats) in results {
            sink.write_pair(&noisy, &clean)?;
            summary.stats.merge(&stats);
            summary.pairs_written += 1;
        }
    }
    sink.finish()?;
    log::info!(
        "wrote {} pairs from {} lines ({} skipped)",
        summary.pairs_written,
        summary.lines_read,
        summary.skipped_malformed
    );
    if summary.skipped_malformed * 100 > summary.lines_read {
        return Err(NoiseError::TooManyMalformed {
            skipped: summary.skipped_malformed,
            lines: summary.lines_read,
        });
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{ConfusionLexicon, NoiseConfig};
    use crate::text::builtin_profile;

    fn noiser(max: u64) -> Noiser {
        let mut cfg = NoiseConfig::new(builtin_profile("cs").unwrap(), 9);
        cfg.max_sentences = max;
        let lex = ConfusionLexicon::from_vocabulary([("pes", 1), ("les", 1), ("ves", 1)]);
        Noiser::new(cfg, lex).unwrap()
    }

    fn run(
        input: &[u8],
        noiser: &Noiser,
        pool: Option<&rayon::ThreadPool>,
    ) -> (Vec<u8>, Result<SynthesisSummary, NoiseError>) {
        let mut out = Vec::new();
        let res = synthesize_corpus(input, noiser, &mut TsvSink(&mut out), pool);
        (out, res)
    }

    #[test]
    fn caps_output() {
        let (out, res) = run(b"a b c\nd e f\ng h i\n", &noiser(2), None);
        let summary = res.unwrap();
        assert_eq!(summary.pairs_written, 2);
        assert_eq!(String::from_utf8(out).unwrap().lines().count(), 2);
    }

    #[test]
    fn clean_side_is_tokenized() {
        let (out, _) = run(b"Pes, les.\n", &noiser(10), None);
        let out = String::from_utf8(out).unwrap();
        assert_eq!(out.trim_end().split('\t').nth(1), Some("Pes , les ."));
    }

    #[test]
    fn deterministic_across_pools() {
        let input: Vec<u8> = (0..500)
            .map(|i| format!("věta číslo {i} má několik slov a pes je les .\n"))
            .collect::<String>()
            .into_bytes();
        let n = noiser(1000);
        let (a, _) = run(&input, &n, None);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let (b, _) = run(&input, &n, Some(&pool));
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let (c, _) = run(&input, &n, Some(&one));
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn malformed_lines() {
        let mut input = Vec::new();
        for _ in 0..200 {
            input.extend_from_slice(b"slovo slovo\n");
        }
        input.extend_from_slice(b"\xff\xfe\n");
        let (out, res) = run(&input, &noiser(1000), None);
        let summary = res.unwrap();
        assert_eq!(summary.skipped_malformed, 1);
        assert_eq!(summary.pairs_written, 200);
        assert_eq!(out.iter().filter(|&&b| b == b'\n').count(), 200);

        let (_, res) = run(b"ok\n\xff\n", &noiser(1000), None);
        assert!(matches!(
            res,
            Err(NoiseError::TooManyMalformed { skipped: 1, lines: 2 })
        ));
    }
}
