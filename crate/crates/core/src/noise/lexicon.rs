use std::collections::{HashMap, HashSet};
use std::io::BufRead;
use std::sync::OnceLock;

use thiserror::Error;

pub const DEFAULT_MAX_EDIT_DISTANCE: usize = 2;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("{file} line {line}: {message}")]
    Format {
        file: &'static str,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabEntry {
    pub word: String,
    pub freq: u64,
}

/// Substitution candidates and the dictionary used for word insertion.
///
/// Explicit proposals take precedence. Words without an entry fall back to
/// vocabulary words within `max_edit_distance` (optimal string alignment
/// distance over lower-cased characters).
#[derive(Debug)]
pub struct ConfusionLexicon {
    proposals: HashMap<String, Vec<String>>,
    vocabulary: Vec<VocabEntry>,
    max_edit_distance: usize,
    index: OnceLock<DeletionIndex>,
}

impl Clone for ConfusionLexicon {
    fn clone(&self) -> Self {
        ConfusionLexicon {
            proposals: self.proposals.clone(),
            vocabulary: self.vocabulary.clone(),
            max_edit_distance: self.max_edit_distance,
            index: OnceLock::new(),
        }
    }
}

impl Default for ConfusionLexicon {
    fn default() -> Self {
        Self::new()
    }
}

impl ConfusionLexicon {
    pub fn new() -> Self {
        ConfusionLexicon {
            proposals: HashMap::new(),
            vocabulary: Vec::new(),
            max_edit_distance: DEFAULT_MAX_EDIT_DISTANCE,
            index: OnceLock::new(),
        }
    }

    /// Builds a lexicon from `(word, frequency)` pairs. Repeated words have
    /// their frequencies summed; words containing whitespace are ignored.
    pub fn from_vocabulary<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut lex = ConfusionLexicon::new();
        let mut seen: HashMap<String, usize> = HashMap::new();
        for (word, freq) in words {
            let word = word.into();
            if word.is_empty() || word.chars().any(char::is_whitespace) {
                continue;
            }
            match seen.get(&word) {
                Some(&i) => lex.vocabulary[i].freq += freq,
                None => {
                    seen.insert(word.clone(), lex.vocabulary.len());
                    lex.vocabulary.push(VocabEntry { word, freq });
                }
            }
        }
        lex
    }

    /// Reads a vocabulary file: one word per line, optionally followed by a
    /// tab and a frequency (default 1).
    pub fn read_vocabulary<R: BufRead>(reader: R) -> Result<Self, LexiconError> {
        let mut entries = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let (word, freq) = match line.split_once('\t') {
                Some((w, f)) => {
                    let freq = f.trim().parse::<u64>().map_err(|_| LexiconError::Format {
                        file: "vocabulary",
                        line: i + 1,
                        message: format!("frequency {f:?} is not a non-negative integer"),
                    })?;
                    (w, freq)
                }
                None => (line, 1),
            };
            let word = word.trim();
            if word.chars().any(char::is_whitespace) {
                return Err(LexiconError::Format {
                    file: "vocabulary",
                    line: i + 1,
                    message: format!("word {word:?} contains whitespace"),
                });
            }
            entries.push((word.to_string(), freq));
        }
        Ok(Self::from_vocabulary(entries))
    }

    /// Adds explicit proposals from a file of `word<TAB>cand<TAB>cand...` lines.
    /// Candidates equal to their word are dropped.
    pub fn read_proposals<R: BufRead>(&mut self, reader: R) -> Result<(), LexiconError> {
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let word = fields.next().unwrap_or_default().trim();
            if word.is_empty() {
                return Err(LexiconError::Format {
                    file: "proposals",
                    line: i + 1,
                    message: "empty word".into(),
                });
            }
            self.add_proposals(word, fields.map(str::trim));
        }
        Ok(())
    }

    pub fn add_proposals<I, S>(&mut self, word: &str, candidates: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let list = self.proposals.entry(word.to_string()).or_default();
        for c in candidates {
            let c = c.as_ref().trim();
            if !c.is_empty() && c != word && !list.iter().any(|x| x == c) {
                list.push(c.to_string());
            }
        }
    }

    pub fn with_max_edit_distance(mut self, distance: usize) -> Self {
        self.max_edit_distance = distance;
        self.index = OnceLock::new();
        self
    }

    pub fn max_edit_distance(&self) -> usize {
        self.max_edit_distance
    }

    pub fn vocabulary(&self) -> &[VocabEntry] {
        &self.vocabulary
    }

    pub fn explicit_proposals(&self, word: &str) -> Option<&[String]> {
        self.proposals.get(word).map(Vec::as_slice)
    }

    /// Substitution candidates for `word`, best first.
    ///
    /// Without an explicit entry, candidates are vocabulary words within the
    /// edit-distance limit, ordered by distance, then descending frequency,
    /// then lexicographically. Case-insensitive duplicates of `word` are excluded.
    pub fn propose(&self, word: &str) -> Vec<String> {
        if let Some(list) = self.proposals.get(word) {
            return list.clone();
        }
        if self.vocabulary.is_empty() {
            return Vec::new();
        }
        let index = self
            .index
            .get_or_init(|| DeletionIndex::build(&self.vocabulary, self.max_edit_distance));
        let query: Vec<char> = word.to_lowercase().chars().collect();
        let mut ids = HashSet::new();
        for variant in deletions(&query, self.max_edit_distance) {
            if let Some(hits) = index.buckets.get(&variant) {
                ids.extend(hits.iter().copied());
            }
        }
        let mut found: Vec<(usize, &VocabEntry)> = ids
            .into_iter()
            .filter_map(|id| {
                let d = osa_distance(&query, &index.lowered[id as usize]);
                (d > 0 && d <= self.max_edit_distance).then(|| (d, &self.vocabulary[id as usize]))
            })
            .collect();
        found.sort_by(|(da, a), (db, b)| da.cmp(db).then(b.freq.cmp(&a.freq)).then_with(|| a.word.cmp(&b.word)));
        found.into_iter().map(|(_, e)| e.word.clone()).collect()
    }
}

/// Maps every string reachable by deleting up to `max` characters from a
/// lower-cased vocabulary word to the ids of those words.
#[derive(Debug)]
struct DeletionIndex {
    lowered: Vec<Vec<char>>,
    buckets: HashMap<Vec<char>, Vec<u32>>,
}

impl DeletionIndex {
    fn build(vocabulary: &[VocabEntry], max: usize) -> Self {
        let lowered: Vec<Vec<char>> = vocabulary
            .iter()
            .map(|e| e.word.to_lowercase().chars().collect())
            .collect();
        let mut buckets: HashMap<Vec<char>, Vec<u32>> = HashMap::new();
        for (id, word) in lowered.iter().enumerate() {
            for variant in deletions(word, max) {
                buckets.entry(variant).or_default().push(id as u32);
            }
        }
        DeletionIndex { lowered, buckets }
    }
}

/// All distinct strings obtained by deleting at most `max` characters, including the input.
fn deletions(word: &[char], max: usize) -> HashSet<Vec<char>> {
    let mut all = HashSet::from([word.to_vec()]);
    let mut frontier = vec![word.to_vec()];
    for _ in 0..max {
        let mut next = Vec::new();
        for w in &frontier {
            for i in 0..w.len() {
                let mut shorter = w.clone();
                shorter.remove(i);
                if all.insert(shorter.clone()) {
                    next.push(shorter);
                }
            }
        }
        frontier = next;
    }
    all
}

/// Optimal string alignment distance: Levenshtein plus adjacent transpositions.
pub fn osa_distance(a: &[char], b: &[char]) -> usize {
    let (n, m) = (a.len(), b.len());
    let mut prev2 = vec![0usize; m + 1];
    let mut prev: Vec<usize> = (0..=m).collect();
    let mut cur = vec![0usize; m + 1];
    for i in 1..=n {
        cur[0] = i;
        for j in 1..=m {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            let mut d = (prev[j] + 1).min(cur[j - 1] + 1).min(prev[j - 1] + cost);
            if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                d = d.min(prev2[j - 2] + 1);
            }
            cur[j] = d;
        }
        std::mem::swap(&mut prev2, &mut prev);
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn chars(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    /// Recursive definition of the restricted Damerau-Levenshtein distance.
    fn osa_reference(a: &[char], b: &[char]) -> usize {
        fn go(a: &[char], b: &[char], i: usize, j: usize, memo: &mut HashMap<(usize, usize), usize>) -> usize {
            if i == 0 {
                return j;
            }
            if j == 0 {
                return i;
            }
            if let Some(&v) = memo.get(&(i, j)) {
                return v;
            }
            let mut best = go(a, b, i - 1, j, memo) + 1;
            best = best.min(go(a, b, i, j - 1, memo) + 1);
            best = best.min(go(a, b, i - 1, j - 1, memo) + usize::from(a[i - 1] != b[j - 1]));
            if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                best = best.min(go(a, b, i - 2, j - 2, memo) + 1);
            }
            memo.insert((i, j), best);
            best
        }
        go(a, b, a.len(), b.len(), &mut HashMap::new())
    }

    fn brute_force_propose(lex: &ConfusionLexicon, word: &str) -> Vec<String> {
        let q = chars(&word.to_lowercase());
        let mut found: Vec<(usize, u64, String)> = lex
            .vocabulary()
            .iter()
            .filter_map(|e| {
                let d = osa_reference(&q, &chars(&e.word.to_lowercase()));
                (d > 0 && d <= lex.max_edit_distance()).then(|| (d, u64::MAX - e.freq, e.word.clone()))
            })
            .collect();
        found.sort();
        found.into_iter().map(|(_, _, w)| w).collect()
    }

    #[test]
    fn distances() {
        assert_eq!(osa_distance(&chars("kat"), &chars("kap")), 1);
        assert_eq!(osa_distance(&chars("kat"), &chars("xyz")), 3);
        assert_eq!(osa_distance(&chars("ab"), &chars("ba")), 1);
        assert_eq!(osa_distance(&chars(""), &chars("abc")), 3);
        assert_eq!(osa_distance(&chars("ca"), &chars("abc")), 3);
    }

    #[test]
    fn explicit_proposals_win() {
        let mut lex = ConfusionLexicon::from_vocabulary([("kap", 1)]);
        lex.add_proposals("kat", ["kot", "kat", "kit"]);
        assert_eq!(lex.propose("kat"), ["kot", "kit"]);
    }

    #[test]
    fn fallback_orders_by_distance() {
        let lex = ConfusionLexicon::from_vocabulary([("kap", 1), ("kit", 1), ("xyz", 1)]);
        assert_eq!(lex.propose("kat"), brute_force_propose(&lex, "kat"));
        assert_eq!(lex.propose("kat"), ["kap", "kit"]);
        let lex = ConfusionLexicon::from_vocabulary([("kit", 5), ("kap", 1), ("Kat", 9), ("ka", 3), ("katse", 7)]);
        assert_eq!(lex.propose("kat"), ["kit", "ka", "kap", "katse"]);
    }

    #[test]
    fn empty_lexicon() {
        assert!(ConfusionLexicon::new().propose("anything").is_empty());
    }

    #[test]
    fn reads_files() {
        let lex = ConfusionLexicon::read_vocabulary("pes\t10\nkočka\n\nPes\t2\npes\t1\n".as_bytes()).unwrap();
        assert_eq!(
            lex.vocabulary(),
            &[
                VocabEntry {
                    word: "pes".into(),
                    freq: 11
                },
                VocabEntry {
                    word: "kočka".into(),
                    freq: 1
                },
                VocabEntry {
                    word: "Pes".into(),
                    freq: 2
                },
            ]
        );
        assert!(ConfusionLexicon::read_vocabulary("pes\tmany\n".as_bytes()).is_err());
        let mut lex = ConfusionLexicon::new();
        lex.read_proposals("pes\tpas\tpos\npes\tpas\n".as_bytes()).unwrap();
        assert_eq!(lex.explicit_proposals("pes").unwrap(), ["pas", "pos"]);
    }

    proptest! {
        #[test]
        fn osa_matches_recursive_definition(a in "[abc]{0,7}", b in "[abc]{0,7}") {
            prop_assert_eq!(osa_distance(&chars(&a), &chars(&b)), osa_reference(&chars(&a), &chars(&b)));
        }

        #[test]
        fn index_matches_brute_force(
            vocab in proptest::collection::vec(("[abcAB]{1,6}", 1u64..5), 0..30),
            word in "[abcB]{0,6}",
        ) {
            let lex = ConfusionLexicon::from_vocabulary(vocab);
            prop_assert_eq!(lex.propose(&word), brute_force_propose(&lex, &word));
        }
    }
}
