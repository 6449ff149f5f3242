//! Histograms, fingerprints and their on-disk formats.
//!
//! A [`Histogram`] maps each observed symbol to its count; a [`Fingerprint`]
//! forgets the labels and keeps only `Φ_j`, the number of symbols seen
//! exactly `j` times. Every symmetric property estimator in this crate is a
//! function of the fingerprint alone.

use std::collections::BTreeMap;
use std::io::{BufRead, Read};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Per-symbol occurrence counts. Stored counts are always `>= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram<S: Ord = String> {
    counts: BTreeMap<S, u64>,
    n: u64,
}

impl<S: Ord> Default for Histogram<S> {
    fn default() -> Self {
        Histogram {
            counts: BTreeMap::new(),
            n: 0,
        }
    }
}

impl<S: Ord> Histogram<S> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Exact multiset count of a symbol stream.
    pub fn from_symbols<I: IntoIterator<Item = S>>(symbols: I) -> Self {
        let mut h = Self::new();
        for s in symbols {
            h.add(s, 1);
        }
        h
    }

    /// Builds from `(symbol, count)` pairs; zero counts are skipped and
    /// repeated symbols accumulate.
    pub fn from_counts<I: IntoIterator<Item = (S, u64)>>(pairs: I) -> Self {
        let mut h = Self::new();
        for (s, c) in pairs {
            h.add(s, c);
        }
        h
    }

    pub fn add(&mut self, symbol: S, count: u64) {
        if count == 0 {
            return;
        }
        *self.counts.entry(symbol).or_insert(0) += count;
        self.n += count;
    }

    pub fn get(&self, symbol: &S) -> u64 {
        self.counts.get(symbol).copied().unwrap_or(0)
    }

    /// Total sample size.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Number of distinct observed symbols.
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&S, u64)> + '_ {
        self.counts.iter().map(|(s, &c)| (s, c))
    }

    pub fn counts(&self) -> impl Iterator<Item = u64> + '_ {
        self.counts.values().copied()
    }

    pub fn fingerprint(&self) -> Fingerprint {
        Fingerprint::from_counts(self.counts())
    }
}

impl<S: Ord> FromIterator<S> for Histogram<S> {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Histogram::from_symbols(iter)
    }
}

/// Exact multiset count of a symbol stream.
pub fn build_histogram<S: Ord, I: IntoIterator<Item = S>>(symbols: I) -> Histogram<S> {
    Histogram::from_symbols(symbols)
}

pub fn build_fingerprint<S: Ord>(h: &Histogram<S>) -> Fingerprint {
    h.fingerprint()
}

/// Sparse fingerprint: `Φ_j` for every multiplicity `j >= 1` with `Φ_j > 0`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Fingerprint {
    phi: BTreeMap<u64, u64>,
    n: u64,
}

impl Fingerprint {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fingerprint of a list of per-symbol counts; zeros are ignored.
    pub fn from_counts<I: IntoIterator<Item = u64>>(counts: I) -> Self {
        let mut fp = Fingerprint::new();
        for c in counts.into_iter().filter(|&c| c > 0) {
            *fp.phi.entry(c).or_insert(0) += 1;
            fp.n += c;
        }
        fp
    }

    /// Builds from `(j, Φ_j)` pairs. Rejects `j = 0`, `Φ_j = 0`, repeated `j`
    /// and sample sizes that overflow.
    pub fn from_entries<I: IntoIterator<Item = (u64, u64)>>(entries: I) -> Result<Self> {
        let mut fp = Fingerprint::new();
        for (j, phi) in entries {
            fp.insert(j, phi)?;
        }
        Ok(fp)
    }

    fn insert(&mut self, j: u64, phi: u64) -> Result<()> {
        if j == 0 || phi == 0 {
            return Err(Error::domain(format!(
                "fingerprint entries must be positive, got j = {j}, phi = {phi}"
            )));
        }
        if self.phi.contains_key(&j) {
            return Err(Error::domain(format!("duplicate multiplicity j = {j}")));
        }
        let mass = j
            .checked_mul(phi)
            .and_then(|m| m.checked_add(self.n))
            .ok_or_else(|| Error::domain("sample size overflows u64"))?;
        self.phi.insert(j, phi);
        self.n = mass;
        Ok(())
    }

    /// `Φ_j`, zero when absent (and for `j = 0`, which is never observed).
    pub fn get(&self, j: u64) -> u64 {
        self.phi.get(&j).copied().unwrap_or(0)
    }

    /// Sample size `Σ_j j Φ_j`.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Number of distinct observed symbols, `Σ_j Φ_j`.
    pub fn observed_support(&self) -> u64 {
        self.phi.values().sum()
    }

    pub fn max_multiplicity(&self) -> u64 {
        self.phi.keys().next_back().copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    /// `(j, Φ_j)` in increasing `j`.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.phi.iter().map(|(&j, &p)| (j, p))
    }

    /// A histogram with synthetic labels `0, 1, ...` having this fingerprint.
    pub fn to_histogram(&self) -> Histogram<u64> {
        let mut h = Histogram::new();
        let mut label = 0u64;
        for (j, phi) in self.iter() {
            for _ in 0..phi {
                h.add(label, j);
                label += 1;
            }
        }
        h
    }

    /// Writes the `j Phi_j` line format.
    pub fn to_text(&self) -> String {
        self.iter().map(|(j, p)| format!("{j} {p}\n")).collect()
    }
}

/// Lower-cased runs of alphabetic characters. Every other character
/// (whitespace, digits, punctuation, apostrophes, hyphens) is a delimiter.
pub fn tokenize_words(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphabetic())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    /// `symbol<TAB>count` per line.
    Counts,
    /// `j<SPACE>Phi_j` per line, strictly increasing `j`.
    Fingerprint,
    /// Raw UTF-8 text, tokenized by [`tokenize_words`].
    Text,
}

impl FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "counts" => Ok(InputFormat::Counts),
            "fingerprint" | "fp" => Ok(InputFormat::Fingerprint),
            "text" => Ok(InputFormat::Text),
            other => Err(Error::Input(format!("unknown input format `{other}`"))),
        }
    }
}

/// Parses a fingerprint from any of the supported formats. When
/// `declared_n` is given, the parsed sample size must match it.
pub fn parse_input<R: Read>(reader: R, format: InputFormat, declared_n: Option<u64>) -> Result<Fingerprint> {
    let fp = match format {
        InputFormat::Counts => parse_counts(reader)?.fingerprint(),
        InputFormat::Fingerprint => parse_fingerprint(reader)?,
        InputFormat::Text => parse_text(reader)?.fingerprint(),
    };
    if let Some(n) = declared_n {
        if fp.n() != n {
            return Err(Error::Input(format!(
                "sum of j * Phi_j is {} but n = {n} was declared",
                fp.n()
            )));
        }
    }
    Ok(fp)
}

fn lines<R: Read>(reader: R) -> impl Iterator<Item = (usize, Result<String>)> {
    std::io::BufReader::new(reader)
        .lines()
        .enumerate()
        .map(|(i, l)| {
            let line = l.map_err(|e| match e.kind() {
                std::io::ErrorKind::InvalidData => Error::Input(format!("line {}: invalid UTF-8", i + 1)),
                _ => Error::Io(e),
            });
            (i + 1, line)
        })
}

fn skip(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#')
}

fn positive(field: &str, line: usize, what: &str) -> Result<u64> {
    let v: u64 = field
        .trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("{what} `{field}` is not a positive integer")))?;
    if v == 0 {
        return Err(Error::parse(line, format!("{what} must be positive")));
    }
    Ok(v)
}

/// Parses the `symbol<TAB>count` format. Blank lines and `#` comments are skipped.
pub fn parse_counts<R: Read>(reader: R) -> Result<Histogram<String>> {
    let mut h = Histogram::new();
    for (no, line) in lines(reader) {
        let line = line?;
        if skip(&line) {
            continue;
        }
        let (sym, count) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(no, "expected `symbol<TAB>count`"))?;
        let count = positive(count, no, "count")?;
        if h.get(&sym.to_string()) > 0 {
            return Err(Error::parse(no, format!("duplicate symbol `{sym}`")));
        }
        h.add(sym.to_string(), count);
    }
    Ok(h)
}

/// Parses the `j Phi_j` format.
pub fn parse_fingerprint<R: Read>(reader: R) -> Result<Fingerprint> {
    let mut fp = Fingerprint::new();
    let mut last_j = 0u64;
    for (no, line) in lines(reader) {
        let line = line?;
        if skip(&line) {
            continue;
        }
        let mut fields = line.split_whitespace();
        let (Some(j), Some(phi), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::parse(no, "expected `j Phi_j`"));
        };
        let j = positive(j, no, "multiplicity")?;
        let phi = positive(phi, no, "Phi_j")?;
        if j == last_j {
            return Err(Error::parse(no, format!("duplicate multiplicity j = {j}")));
        }
        if j < last_j {
            return Err(Error::parse(no, format!("multiplicities must increase ({j} after {last_j})")));
        }
        fp.insert(j, phi).map_err(|e| Error::parse(no, e.to_string()))?;
        last_j = j;
    }
    Ok(fp)
}

/// Reads UTF-8 text and counts its words.
pub fn parse_text<R: Read>(mut reader: R) -> Result<Histogram<String>> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    let text = String::from_utf8(bytes)
        .map_err(|e| Error::Input(format!("invalid UTF-8 at byte {}", e.utf8_error().valid_up_to())))?;
    Ok(Histogram::from_symbols(tokenize_words(&text)))
}
