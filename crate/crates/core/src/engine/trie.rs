use std::collections::{BTreeMap, BTreeSet, HashMap};

use log::warn;

use super::{GhostError, Language, Utilities};

#[derive(Debug, Clone, PartialEq)]
pub struct WordEntry {
    pub word: String,
    pub utilities: Utilities,
}

impl WordEntry {
    pub fn new(word: impl Into<String>, utilities: Utilities) -> Self {
        Self { word: word.into(), utilities }
    }
}

#[derive(Debug, Default, Clone)]
struct Node {
    next: BTreeSet<char>,
    word: Option<Utilities>,
}

/// Word-list language over `char`.
///
/// Spelling any word ends the game, so a word that extends another word can
/// never be reached; such words are dropped at construction and reported by
/// [`TrieLanguage::pruned`].
#[derive(Debug, Clone)]
pub struct TrieLanguage {
    nodes: HashMap<String, Node>,
    words: Vec<WordEntry>,
    pruned: Vec<String>,
    constant_sum: Option<f64>,
}

impl TrieLanguage {
    pub fn new(entries: Vec<WordEntry>) -> Result<Self, GhostError> {
        let mut by_word: BTreeMap<String, Utilities> = BTreeMap::new();
        for e in entries {
            if e.word.is_empty() {
                continue;
            }
            if !(e.utilities.u1.is_finite() && e.utilities.u2.is_finite()) {
                return Err(GhostError::WordList {
                    line: 0,
                    message: format!("non-finite utility for {:?}", e.word),
                });
            }
            by_word.insert(e.word, e.utilities);
        }
        if by_word.is_empty() {
            return Err(GhostError::EmptyLanguage);
        }

        // Sorted order puts every word right after the words that prefix it.
        let mut kept: Vec<WordEntry> = Vec::new();
        let mut pruned = Vec::new();
        let mut kept_set: BTreeSet<String> = BTreeSet::new();
        for (word, u) in by_word {
            let shadowed = word
                .char_indices()
                .skip(1)
                .any(|(i, _)| kept_set.contains(&word[..i]));
            if shadowed {
                warn!("word {word:?} extends a shorter word and can never be reached; pruned");
                pruned.push(word);
            } else {
                kept_set.insert(word.clone());
                kept.push(WordEntry::new(word, u));
            }
        }

        let mut nodes: HashMap<String, Node> = HashMap::new();
        for entry in &kept {
            let mut prefix = String::new();
            for c in entry.word.chars() {
                nodes.entry(prefix.clone()).or_default().next.insert(c);
                prefix.push(c);
            }
            nodes.entry(prefix).or_default().word = Some(entry.utilities);
        }

        let first = kept[0].utilities;
        let sum = first.u1 + first.u2;
        let constant_sum = kept
            .iter()
            .all(|e| e.utilities.u1 + e.utilities.u2 == sum)
            .then_some(sum);

        Ok(Self { nodes, words: kept, pruned, constant_sum })
    }

    /// Reachable words, sorted.
    pub fn words(&self) -> &[WordEntry] {
        &self.words
    }

    /// Words dropped because a shorter word ends the game first.
    pub fn pruned(&self) -> &[String] {
        &self.pruned
    }

    fn node(&self, prefix: &[char]) -> Result<&Node, GhostError> {
        let key: String = prefix.iter().collect();
        self.nodes.get(&key).ok_or(GhostError::InvalidPrefix(key))
    }
}

impl Language for TrieLanguage {
    type Symbol = char;
    type Key = String;

    fn legal_moves(&self, prefix: &[char]) -> Result<Vec<char>, GhostError> {
        let node = self.node(prefix)?;
        if node.word.is_some() {
            return Ok(Vec::new());
        }
        Ok(node.next.iter().copied().collect())
    }

    fn terminal_utilities(&self, prefix: &[char]) -> Result<Option<Utilities>, GhostError> {
        Ok(self.node(prefix)?.word)
    }

    fn state_key(&self, prefix: &[char]) -> String {
        prefix.iter().collect()
    }

    fn constant_sum(&self) -> Option<f64> {
        self.constant_sum
    }
}

/// Parse a word list: one word per line, optionally followed by a tab and
/// `u1<TAB>u2` (or `u1 u2`). Words without utilities score `(0, 0)`.
pub fn parse_word_list(text: &str) -> Result<Vec<WordEntry>, GhostError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let (word, rest) = match line.split_once('\t') {
            Some((w, r)) => (w.trim(), Some(r)),
            None => (line.trim(), None),
        };
        let utilities = match rest {
            None => Utilities::new(0.0, 0.0),
            Some(r) => {
                let nums: Vec<&str> = r.split(|c: char| c == '\t' || c == ' ').filter(|s| !s.is_empty()).collect();
                if nums.len() != 2 {
                    return Err(GhostError::WordList {
                        line: i + 1,
                        message: format!("expected two utilities after the word, found {}", nums.len()),
                    });
                }
                let parse = |s: &str| {
                    s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| GhostError::WordList {
                        line: i + 1,
                        message: format!("bad utility {s:?}"),
                    })
                };
                Utilities::new(parse(nums[0])?, parse(nums[1])?)
            }
        };
        out.push(WordEntry::new(word, utilities));
    }
    Ok(out)
}

/// English-vs-Spanish Ghost: words of at least `min_len` letters from either
/// list; `u1 = -u2` is +1 for English-only, 0 for shared, -1 for Spanish-only.
pub fn english_spanish_language(
    english: &[String],
    spanish: &[String],
    min_len: usize,
) -> Result<TrieLanguage, GhostError> {
    let long = |w: &&String| w.chars().count() >= min_len;
    let en: BTreeSet<&String> = english.iter().filter(long).collect();
    let es: BTreeSet<&String> = spanish.iter().filter(long).collect();
    let entries = en
        .union(&es)
        .map(|w| {
            let u1 = match (en.contains(w), es.contains(w)) {
                (true, false) => 1.0,
                (true, true) => 0.0,
                _ => -1.0,
            };
            WordEntry::new(w.as_str(), Utilities::new(u1, -u1))
        })
        .collect();
    TrieLanguage::new(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Solver;

    fn entries(ws: &[&str]) -> Vec<WordEntry> {
        ws.iter().map(|w| WordEntry::new(*w, Utilities::new(0.0, 0.0))).collect()
    }

    #[test]
    fn prefixes_and_terminality() {
        let l = TrieLanguage::new(entries(&["ab", "ac"])).unwrap();
        assert_eq!(l.legal_moves(&['a']).unwrap(), vec!['b', 'c']);
        assert_eq!(l.legal_moves(&[]).unwrap(), vec!['a']);
        assert!(l.legal_moves(&['a', 'b']).unwrap().is_empty());
        assert!(l.is_terminal(&['a', 'c']).unwrap());
        assert_eq!(l.legal_moves(&['b']), Err(GhostError::InvalidPrefix("b".into())));
    }

    #[test]
    fn extensions_of_words_are_pruned() {
        let l = TrieLanguage::new(entries(&["ab", "abc", "abd", "x"])).unwrap();
        assert_eq!(l.pruned(), &["abc".to_string(), "abd".to_string()]);
        assert_eq!(l.words().len(), 2);
        assert!(l.legal_moves(&['a', 'b']).unwrap().is_empty());
    }

    #[test]
    fn empty_language() {
        assert_eq!(TrieLanguage::new(vec![]).err(), Some(GhostError::EmptyLanguage));
        assert_eq!(TrieLanguage::new(entries(&[""])).err(), Some(GhostError::EmptyLanguage));
    }

    #[test]
    fn word_list_format() {
        let parsed = parse_word_list("cat\t1\t-1\ndog\n\nemu\t0.5 0.25\n").unwrap();
        assert_eq!(parsed.len(), 3);
        assert_eq!(parsed[0].utilities, Utilities::new(1.0, -1.0));
        assert_eq!(parsed[1].utilities, Utilities::new(0.0, 0.0));
        assert_eq!(parsed[2].utilities, Utilities::new(0.5, 0.25));
        let err = parse_word_list("ok\nbad\tx\ty\n").unwrap_err();
        assert!(matches!(err, GhostError::WordList { line: 2, .. }));
        assert!(matches!(parse_word_list("a\t1\n"), Err(GhostError::WordList { line: 1, .. })));
    }

    #[test]
    fn english_spanish_scoring() {
        let en: Vec<String> = ["bat", "dime", "no"].iter().map(|s| s.to_string()).collect();
        let es: Vec<String> = ["dime", "casa"].iter().map(|s| s.to_string()).collect();
        let l = english_spanish_language(&en, &es, 3).unwrap();
        let ws: Vec<(&str, f64)> = l.words().iter().map(|e| (e.word.as_str(), e.utilities.u1)).collect();
        assert_eq!(ws, vec![("bat", 1.0), ("casa", -1.0), ("dime", 0.0)]);
        assert_eq!(l.constant_sum(), Some(0.0));
        // P1 chooses the opening letter; "b" leads only to an English word.
        let v = Solver::new().solve(&l, &[]).unwrap();
        assert_eq!((v.u1, v.principal_move), (1.0, Some('b')));
    }
}
