//! Tokenization of plain text into words and punctuation marks, and
//! extraction of the interval series built on top of the token stream.
//!
//! Two series are derived from a [`TokenStream`]:
//!
//! - inter-punctuation intervals (IPI): number of words between consecutive
//!   marks of any class;
//! - sentence lengths (SLV): number of words between consecutive
//!   sentence-terminating marks, with internal marks transparent.
//!
//! Words are maximal runs of Unicode letters and digits. A joiner character
//! (hyphen or apostrophe by default) binds into a word only when it sits
//! between two word characters, so `word-pair` and `it's` are single words
//! while a leading `'` is left to the mark inventory.

use std::collections::BTreeSet;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Canonical form of an ellipsis. Runs of three or more ASCII dots are
/// normalized to it whenever it appears in the inventory.
pub const ELLIPSIS: &str = "\u{2026}";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("mark {0:?} is listed as both internal and terminal")]
    OverlappingMark(String),
    #[error("empty string in the punctuation inventory")]
    EmptyMark,
    #[error("mark {0:?} contains word characters")]
    WordCharacterInMark(String),
    #[error("joiner {0:?} is a letter or digit")]
    AlphanumericJoiner(char),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkClass {
    Internal,
    Terminal,
}

impl MarkClass {
    pub fn as_str(self) -> &'static str {
        match self {
            MarkClass::Internal => "internal",
            MarkClass::Terminal => "terminal",
        }
    }
}

/// Which characters, besides letters and digits, may appear inside a word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordPolicy {
    /// Characters that join two word-character runs into one word.
    pub joiners: BTreeSet<char>,
}

impl Default for WordPolicy {
    fn default() -> Self {
        Self {
            joiners: ['-', '\u{2010}', '\'', '\u{2019}'].into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PunctuationConfig {
    pub internal_marks: BTreeSet<String>,
    pub terminal_marks: BTreeSet<String>,
    /// Merge adjacent marks (zero-word gaps) into one boundary.
    pub collapse_runs: bool,
    pub word_policy: WordPolicy,
}

impl Default for PunctuationConfig {
    fn default() -> Self {
        let internal = [
            ",", ";", ":", "\u{2014}", "\u{2013}", "(", ")", "\"", "\u{201C}", "\u{201D}",
            "\u{00AB}", "\u{00BB}", "'", "\u{2018}", "\u{2019}",
        ];
        let terminal = [".", "!", "?", ELLIPSIS];
        Self {
            internal_marks: internal.iter().map(|s| s.to_string()).collect(),
            terminal_marks: terminal.iter().map(|s| s.to_string()).collect(),
            collapse_runs: true,
            word_policy: WordPolicy::default(),
        }
    }
}

impl PunctuationConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for mark in self.internal_marks.iter().chain(&self.terminal_marks) {
            if mark.is_empty() {
                return Err(ConfigError::EmptyMark);
            }
            if mark.chars().any(char::is_alphanumeric) {
                return Err(ConfigError::WordCharacterInMark(mark.clone()));
            }
        }
        if let Some(mark) = self
            .internal_marks
            .intersection(&self.terminal_marks)
            .next()
        {
            return Err(ConfigError::OverlappingMark(mark.clone()));
        }
        if let Some(&c) = self
            .word_policy
            .joiners
            .iter()
            .find(|c| c.is_alphanumeric())
        {
            return Err(ConfigError::AlphanumericJoiner(c));
        }
        Ok(())
    }

    pub fn class_of(&self, mark: &str) -> Option<MarkClass> {
        if self.terminal_marks.contains(mark) {
            Some(MarkClass::Terminal)
        } else if self.internal_marks.contains(mark) {
            Some(MarkClass::Internal)
        } else {
            None
        }
    }

    /// Inventory sorted longest first, for greedy matching.
    fn matchers(&self) -> Vec<(&str, MarkClass)> {
        let mut all: Vec<(&str, MarkClass)> = self
            .terminal_marks
            .iter()
            .map(|m| (m.as_str(), MarkClass::Terminal))
            .chain(
                self.internal_marks
                    .iter()
                    .filter(|m| !self.terminal_marks.contains(*m))
                    .map(|m| (m.as_str(), MarkClass::Internal)),
            )
            .collect();
        all.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(b.0)));
        all
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Word,
    Mark(MarkClass),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token<'a> {
    pub kind: TokenKind,
    /// Source slice for words and ordinary marks; [`ELLIPSIS`] for a
    /// normalized run of dots.
    pub text: &'a str,
    /// Byte range in the source text.
    pub span: Range<usize>,
    /// Number of words seen so far, including this one for words.
    pub word_index: usize,
}

impl Token<'_> {
    pub fn is_word(&self) -> bool {
        self.kind == TokenKind::Word
    }

    pub fn mark_class(&self) -> Option<MarkClass> {
        match self.kind {
            TokenKind::Mark(class) => Some(class),
            TokenKind::Word => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenStream<'a> {
    pub tokens: Vec<Token<'a>>,
    pub total_words: usize,
}

impl<'a> TokenStream<'a> {
    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn words(&self) -> impl Iterator<Item = &Token<'a>> {
        self.tokens.iter().filter(|t| t.is_word())
    }

    pub fn marks(&self) -> impl Iterator<Item = &Token<'a>> {
        self.tokens.iter().filter(|t| !t.is_word())
    }
}

pub fn tokenize<'a>(text: &'a str, config: &PunctuationConfig) -> TokenStream<'a> {
    let matchers = config.matchers();
    let ellipsis_class = config.class_of(ELLIPSIS);
    let joiners = &config.word_policy.joiners;

    let mut tokens = Vec::new();
    let mut words = 0usize;
    let mut pos = 0usize;

    while pos < text.len() {
        let rest = &text[pos..];
        let c = rest.chars().next().expect("pos is on a char boundary");

        if c.is_alphanumeric() {
            let end = pos + word_len(rest, joiners);
            words += 1;
            tokens.push(Token {
                kind: TokenKind::Word,
                text: &text[pos..end],
                span: pos..end,
                word_index: words,
            });
            pos = end;
            continue;
        }

        if let Some(class) = ellipsis_class {
            let dots = rest.bytes().take_while(|&b| b == b'.').count();
            if dots >= 3 {
                tokens.push(Token {
                    kind: TokenKind::Mark(class),
                    text: ELLIPSIS,
                    span: pos..pos + dots,
                    word_index: words,
                });
                pos += dots;
                continue;
            }
        }

        if let Some(&(mark, class)) = matchers.iter().find(|(m, _)| rest.starts_with(m)) {
            let end = pos + mark.len();
            tokens.push(Token {
                kind: TokenKind::Mark(class),
                text: &text[pos..end],
                span: pos..end,
                word_index: words,
            });
            pos = end;
            continue;
        }

        // separator
        pos += c.len_utf8();
    }

    TokenStream {
        tokens,
        total_words: words,
    }
}

/// Byte length of the word starting at the beginning of `s`.
fn word_len(s: &str, joiners: &BTreeSet<char>) -> usize {
    let mut end = 0;
    let mut iter = s.char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        if c.is_alphanumeric() {
            end = i + c.len_utf8();
        } else if joiners.contains(&c) && end == i {
            match iter.peek() {
                Some(&(_, next)) if next.is_alphanumeric() => {}
                _ => break,
            }
        } else {
            break;
        }
    }
    end
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    Ipi,
    Slv,
}

impl SeriesKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SeriesKind::Ipi => "ipi",
            SeriesKind::Slv => "slv",
        }
    }
}

/// Word counts between consecutive boundaries.
///
/// With `collapse_runs` enabled every value is at least 1; without it,
/// adjacent marks produce zero-length intervals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalSeries {
    pub kind: SeriesKind,
    pub values: Vec<u64>,
    pub total_words: usize,
    /// Words after the final retained boundary.
    pub dropped_tail: usize,
    /// Marks absorbed into a neighbouring boundary because no word
    /// separated them from it.
    pub collapsed_runs: usize,
}

impl IntervalSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.values.iter().map(|&v| v as f64).collect()
    }
}

pub fn extract_ipi(stream: &TokenStream<'_>, config: &PunctuationConfig) -> IntervalSeries {
    extract(stream, SeriesKind::Ipi, config.collapse_runs, |_| true)
}

pub fn extract_slv(stream: &TokenStream<'_>, config: &PunctuationConfig) -> IntervalSeries {
    extract(stream, SeriesKind::Slv, config.collapse_runs, |class| {
        class == MarkClass::Terminal
    })
}

fn extract(
    stream: &TokenStream<'_>,
    kind: SeriesKind,
    collapse: bool,
    is_boundary: impl Fn(MarkClass) -> bool,
) -> IntervalSeries {
    let mut values = Vec::new();
    let mut last = 0usize;
    let mut collapsed = 0usize;

    for token in &stream.tokens {
        let Some(class) = token.mark_class() else {
            continue;
        };
        if !is_boundary(class) {
            continue;
        }
        let gap = token.word_index - last;
        if gap == 0 && collapse {
            collapsed += 1;
            continue;
        }
        values.push(gap as u64);
        last = token.word_index;
    }

    IntervalSeries {
        kind,
        values,
        total_words: stream.total_words,
        dropped_tail: stream.total_words - last,
        collapsed_runs: collapsed,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkPosition {
    pub word_index: usize,
    pub class: MarkClass,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PunctuationProfile {
    pub text_id: String,
    pub positions: Vec<MarkPosition>,
}

/// Mark positions whose word index lies in `range` (inclusive on both ends).
///
/// Marks sharing a word index are merged into one position, classed
/// terminal if any of them is terminal, so positions are strictly
/// increasing. An inverted range yields an empty profile.
pub fn punctuation_profile(
    stream: &TokenStream<'_>,
    range: std::ops::RangeInclusive<usize>,
    text_id: impl Into<String>,
) -> PunctuationProfile {
    let mut positions: Vec<MarkPosition> = Vec::new();
    for token in &stream.tokens {
        let Some(class) = token.mark_class() else {
            continue;
        };
        if !range.contains(&token.word_index) {
            continue;
        }
        match positions.last_mut() {
            Some(last) if last.word_index == token.word_index => {
                last.class = last.class.max(class);
            }
            _ => positions.push(MarkPosition {
                word_index: token.word_index,
                class,
            }),
        }
    }
    PunctuationProfile {
        text_id: text_id.into(),
        positions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> PunctuationConfig {
        PunctuationConfig::default()
    }

    fn shape<'a>(stream: &TokenStream<'a>) -> Vec<(bool, &'a str)> {
        stream
            .tokens
            .iter()
            .map(|t| (t.is_word(), t.text))
            .collect()
    }

    #[test]
    fn default_config_is_valid() {
        cfg().validate().unwrap();
    }

    #[test]
    fn tokenizes_words_and_marks() {
        let s = tokenize("One, two three. Four?", &cfg());
        assert_eq!(
            shape(&s),
            vec![
                (true, "One"),
                (false, ","),
                (true, "two"),
                (true, "three"),
                (false, "."),
                (true, "Four"),
                (false, "?"),
            ]
        );
        assert_eq!(s.total_words, 4);
        let idx: Vec<usize> = s.tokens.iter().map(|t| t.word_index).collect();
        assert_eq!(idx, vec![1, 1, 2, 3, 3, 4, 4]);
    }

    #[test]
    fn empty_text_gives_empty_stream() {
        let s = tokenize("", &cfg());
        assert!(s.is_empty());
        assert_eq!(s.total_words, 0);
    }

    #[test]
    fn joiners_bind_inside_words_only() {
        let s = tokenize("word-pair it's fine.", &cfg());
        let words: Vec<&str> = s.words().map(|t| t.text).collect();
        assert_eq!(words, vec!["word-pair", "it's", "fine"]);
        let marks: Vec<&str> = s.marks().map(|t| t.text).collect();
        assert_eq!(marks, vec!["."]);

        let s = tokenize("'quoted' - dash- -x", &cfg());
        let words: Vec<&str> = s.words().map(|t| t.text).collect();
        assert_eq!(words, vec!["quoted", "dash", "x"]);
        let marks: Vec<&str> = s.marks().map(|t| t.text).collect();
        assert_eq!(marks, vec!["'", "'"]);
    }

    #[test]
    fn unicode_words_and_marks() {
        let s = tokenize("Żółw — «бег» 42…", &cfg());
        assert_eq!(
            shape(&s),
            vec![
                (true, "Żółw"),
                (false, "\u{2014}"),
                (false, "«"),
                (true, "бег"),
                (false, "»"),
                (true, "42"),
                (false, ELLIPSIS),
            ]
        );
    }

    #[test]
    fn dot_runs_become_one_ellipsis() {
        let s = tokenize("A... b. c....", &cfg());
        let marks: Vec<(&str, Option<MarkClass>)> =
            s.marks().map(|t| (t.text, t.mark_class())).collect();
        assert_eq!(
            marks,
            vec![
                (ELLIPSIS, Some(MarkClass::Terminal)),
                (".", Some(MarkClass::Terminal)),
                (ELLIPSIS, Some(MarkClass::Terminal)),
            ]
        );
        assert_eq!(s.tokens[1].span, 1..4);
    }

    #[test]
    fn ellipsis_can_be_reclassified_internal() {
        let mut c = cfg();
        c.terminal_marks.remove(ELLIPSIS);
        c.internal_marks.insert(ELLIPSIS.to_string());
        let s = tokenize("wait... now.", &c);
        assert_eq!(s.tokens[1].mark_class(), Some(MarkClass::Internal));
        assert_eq!(extract_slv(&s, &c).values, vec![2]);
    }

    #[test]
    fn multi_char_marks_match_longest_first() {
        let mut c = cfg();
        c.internal_marks.insert("--".to_string());
        let s = tokenize("a--b-c", &c);
        let words: Vec<&str> = s.words().map(|t| t.text).collect();
        assert_eq!(words, vec!["a", "b-c"]);
        assert_eq!(s.marks().map(|t| t.text).collect::<Vec<_>>(), vec!["--"]);
    }

    #[test]
    fn ipi_hand_counts() {
        let c = cfg();
        let s = tokenize("One, two three. Four?", &c);
        let ipi = extract_ipi(&s, &c);
        assert_eq!(ipi.values, vec![1, 2, 1]);
        assert_eq!(ipi.dropped_tail, 0);

        let s = tokenize("Hello", &c);
        let ipi = extract_ipi(&s, &c);
        assert!(ipi.values.is_empty());
        assert_eq!(ipi.dropped_tail, 1);

        let s = tokenize("A... b.", &c);
        let ipi = extract_ipi(&s, &c);
        assert_eq!(ipi.values, vec![1, 1]);
        assert_eq!(ipi.collapsed_runs, 0);
    }

    #[test]
    fn slv_hand_counts() {
        let c = cfg();
        let s = tokenize("One, two three. Four?", &c);
        assert_eq!(extract_slv(&s, &c).values, vec![3, 1]);

        let s = tokenize("No terminator here,", &c);
        let slv = extract_slv(&s, &c);
        assert!(slv.values.is_empty());
        assert_eq!(slv.dropped_tail, 3);
    }

    #[test]
    fn runs_collapse_or_yield_zero_gaps() {
        let mut c = cfg();
        let s = tokenize("\"Stop!\" he said, \"now.\"", &c);
        let ipi = extract_ipi(&s, &c);
        assert_eq!(ipi.values, vec![1, 2, 1]);
        // leading quote, closing quote after "!", closing quote after "."
        assert_eq!(ipi.collapsed_runs, 4);
        let slv = extract_slv(&s, &c);
        assert_eq!(slv.values, vec![1, 3]);

        c.collapse_runs = false;
        let ipi = extract_ipi(&s, &c);
        assert_eq!(ipi.values, vec![0, 1, 0, 2, 0, 1, 0]);
        assert_eq!(ipi.collapsed_runs, 0);
        assert_eq!(ipi.dropped_tail, 0);
    }

    #[test]
    fn empty_inventory_yields_no_intervals() {
        let c = PunctuationConfig {
            internal_marks: BTreeSet::new(),
            terminal_marks: BTreeSet::new(),
            ..cfg()
        };
        let s = tokenize("Hi, there. You!", &c);
        let ipi = extract_ipi(&s, &c);
        assert!(ipi.values.is_empty());
        assert_eq!(ipi.dropped_tail, 3);
    }

    #[test]
    fn profile_positions() {
        let c = cfg();
        let s = tokenize("One, two three. Four?", &c);
        let full = punctuation_profile(&s, 0..=s.total_words, "t");
        let pos: Vec<(usize, MarkClass)> = full
            .positions
            .iter()
            .map(|p| (p.word_index, p.class))
            .collect();
        assert_eq!(
            pos,
            vec![
                (1, MarkClass::Internal),
                (3, MarkClass::Terminal),
                (4, MarkClass::Terminal)
            ]
        );
        let part = punctuation_profile(&s, 2..=4, "t");
        assert_eq!(part.positions.len(), 2);
        assert_eq!(part.positions[0].word_index, 3);

        let empty = tokenize("", &c);
        assert!(punctuation_profile(&empty, 0..=0, "e").positions.is_empty());
        #[allow(clippy::reversed_empty_ranges)]
        let inverted = punctuation_profile(&s, 3..=1, "t");
        assert!(inverted.positions.is_empty());
    }

    #[test]
    fn profile_merges_marks_at_same_index() {
        let c = cfg();
        let s = tokenize("yes, \"no.\" maybe", &c);
        let p = punctuation_profile(&s, 0..=3, "t");
        let pos: Vec<(usize, MarkClass)> = p
            .positions
            .iter()
            .map(|p| (p.word_index, p.class))
            .collect();
        assert_eq!(
            pos,
            vec![(1, MarkClass::Internal), (2, MarkClass::Terminal)]
        );
    }

    #[test]
    fn config_validation() {
        let mut c = cfg();
        c.internal_marks.insert(".".into());
        assert_eq!(c.validate(), Err(ConfigError::OverlappingMark(".".into())));

        let mut c = cfg();
        c.terminal_marks.insert("a.".into());
        assert!(matches!(
            c.validate(),
            Err(ConfigError::WordCharacterInMark(_))
        ));

        let mut c = cfg();
        c.internal_marks.insert(String::new());
        assert_eq!(c.validate(), Err(ConfigError::EmptyMark));

        let mut c = cfg();
        c.word_policy.joiners.insert('x');
        assert_eq!(c.validate(), Err(ConfigError::AlphanumericJoiner('x')));
    }
}
