//! Brute-force ground truth, independent of the morphism machinery:
//! additive-power detection on arbitrary finite words over integer
//! alphabets, plus backtracking searches for long power-free words.

use std::time::{Duration, Instant};

use crate::Error;

/// A finite alphabet of distinct nonnegative integers, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntAlphabet {
    letters: Vec<u32>,
}

impl IntAlphabet {
    pub fn new(mut letters: Vec<u32>) -> Result<IntAlphabet, Error> {
        letters.sort_unstable();
        letters.dedup();
        if letters.is_empty() {
            return Err(Error::BadAlphabet);
        }
        Ok(IntAlphabet { letters })
    }

    pub fn letters(&self) -> &[u32] {
        &self.letters
    }

    /// Parse "0,1,2" or a digit string like "012".
    pub fn parse(s: &str) -> Result<IntAlphabet, Error> {
        IntAlphabet::new(parse_word(s)?)
    }

    pub fn contains(&self, letter: u32) -> bool {
        self.letters.binary_search(&letter).is_ok()
    }
}

/// Location of an additive k-th power: k consecutive blocks of length
/// `block_len` starting at `start`, all with equal sums.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct PowerWitness {
    pub start: usize,
    pub block_len: usize,
    pub order: usize,
}

fn prefix_sums(word: &[u32]) -> Vec<u64> {
    let mut s = Vec::with_capacity(word.len() + 1);
    s.push(0u64);
    for &a in word {
        s.push(s.last().unwrap() + a as u64);
    }
    s
}

/// First additive k-th power by least start, then least block length,
/// using prefix sums so each candidate costs O(k).
pub fn find_additive_power(word: &[u32], k: usize) -> Option<PowerWitness> {
    assert!(k >= 2);
    let n = word.len();
    let s = prefix_sums(word);
    for start in 0..n {
        let max_len = (n - start) / k;
        for block_len in 1..=max_len {
            let first = s[start + block_len] - s[start];
            if (1..k).all(|j| {
                s[start + (j + 1) * block_len] - s[start + j * block_len] == first
            }) {
                return Some(PowerWitness {
                    start,
                    block_len,
                    order: k,
                });
            }
        }
    }
    None
}

/// Reference oracle: identical scan order, but every block sum is
/// recomputed by direct summation.
pub fn find_additive_power_naive(word: &[u32], k: usize) -> Option<PowerWitness> {
    assert!(k >= 2);
    let n = word.len();
    let block_sum =
        |from: usize, len: usize| -> u64 { word[from..from + len].iter().map(|&a| a as u64).sum() };
    for start in 0..n {
        for block_len in 1..=(n - start) / k {
            let first = block_sum(start, block_len);
            if (1..k).all(|j| block_sum(start + j * block_len, block_len) == first) {
                return Some(PowerWitness {
                    start,
                    block_len,
                    order: k,
                });
            }
        }
    }
    None
}

/// Does appending the last letter keep the word additive-k-power-free?
/// Only blocks ending at the new position need checking; `sums` must
/// already include the new letter.
fn extension_ok(sums: &[u64], k: usize) -> bool {
    let len = sums.len() - 1;
    for block_len in 1..=len / k {
        let base = len - k * block_len;
        let first = sums[base + block_len] - sums[base];
        if (1..k).all(|j| {
            sums[base + (j + 1) * block_len] - sums[base + j * block_len] == first
        }) {
            return false;
        }
    }
    true
}

/// Result of a depth-first search for a long power-free word.
#[derive(Clone, Debug)]
pub struct DfsReport {
    pub word: Vec<u32>,
    /// The target length was reached.
    pub reached_max_len: bool,
    /// Wall-clock budget ran out first.
    pub budget_exhausted: bool,
    /// The whole tree was explored without reaching the target.
    pub tree_exhausted: bool,
    pub nodes: u64,
    pub elapsed: Duration,
}

/// Depth-first search for the longest additive-k-power-free word, trying
/// letters in ascending value order, with an incremental suffix check per
/// extension. Returns the longest word seen when the budget, the target
/// length or the whole tree is exhausted.
pub fn dfs_longest(
    alphabet: &IntAlphabet,
    k: usize,
    max_len: usize,
    budget: Duration,
) -> DfsReport {
    assert!(k >= 2);
    let start = Instant::now();
    let letters = alphabet.letters();
    let mut word: Vec<u32> = Vec::new();
    let mut sums: Vec<u64> = vec![0];
    let mut best: Vec<u32> = Vec::new();
    let mut stack: Vec<usize> = vec![0];
    let mut nodes = 0u64;
    let mut budget_exhausted = false;
    let mut reached = max_len == 0;

    while let Some(next) = stack.last_mut() {
        if reached {
            break;
        }
        if nodes % 1024 == 0 && start.elapsed() > budget {
            budget_exhausted = true;
            break;
        }
        let i = *next;
        if i >= letters.len() {
            stack.pop();
            if !word.is_empty() {
                word.pop();
                sums.pop();
            }
            continue;
        }
        *next += 1;
        let a = letters[i];
        word.push(a);
        sums.push(sums.last().unwrap() + a as u64);
        nodes += 1;
        if extension_ok(&sums, k) {
            if word.len() > best.len() {
                best = word.clone();
            }
            if word.len() >= max_len {
                reached = true;
                break;
            }
            stack.push(0);
        } else {
            word.pop();
            sums.pop();
        }
    }

    DfsReport {
        word: best,
        reached_max_len: reached,
        budget_exhausted,
        tree_exhausted: !reached && !budget_exhausted,
        nodes,
        elapsed: start.elapsed(),
    }
}

/// Result of exhausting the whole search tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExhaustiveReport {
    /// Exact maximum length of an additive-k-power-free word.
    pub max_len: usize,
    /// Number of words attaining the maximum.
    pub witness_count: u64,
    pub nodes: u64,
}

/// Complete depth-first enumeration of all additive-k-power-free words.
/// Aborts with an error if any word exceeds `ceiling`, which signals that
/// the tree may be infinite.
pub fn exhaustive_max_length(
    alphabet: &IntAlphabet,
    k: usize,
    ceiling: usize,
) -> Result<ExhaustiveReport, Error> {
    assert!(k >= 2);
    let letters = alphabet.letters();
    let mut word: Vec<u32> = Vec::new();
    let mut sums: Vec<u64> = vec![0];
    let mut stack: Vec<usize> = vec![0];
    let mut max_len = 0usize;
    let mut witness_count = 0u64;
    let mut nodes = 0u64;

    while let Some(next) = stack.last_mut() {
        let i = *next;
        if i >= letters.len() {
            stack.pop();
            if !word.is_empty() {
                word.pop();
                sums.pop();
            }
            continue;
        }
        *next += 1;
        let a = letters[i];
        word.push(a);
        sums.push(sums.last().unwrap() + a as u64);
        nodes += 1;
        if extension_ok(&sums, k) {
            if word.len() > ceiling {
                return Err(Error::DepthCeiling { ceiling });
            }
            if word.len() > max_len {
                max_len = word.len();
                witness_count = 1;
            } else if word.len() == max_len {
                witness_count += 1;
            }
            stack.push(0);
        } else {
            word.pop();
            sums.pop();
        }
    }

    Ok(ExhaustiveReport {
        max_len,
        witness_count,
        nodes,
    })
}

/// Every letter of the word belongs to the alphabet.
pub fn validate_word(word: &[u32], alphabet: &IntAlphabet) -> Result<(), Error> {
    if word.iter().any(|&a| !alphabet.contains(a)) {
        return Err(Error::LetterOutsideAlphabet);
    }
    Ok(())
}

/// Parse a word: comma-separated integers when a comma is present,
/// otherwise one digit per letter.
pub fn parse_word(s: &str) -> Result<Vec<u32>, Error> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if s.contains(',') {
        s.split(',')
            .map(|part| {
                part.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::WordParse(part.trim().to_string()))
            })
            .collect()
    } else {
        s.chars()
            .map(|c| c.to_digit(10).ok_or(Error::BadWord(c)))
            .collect()
    }
}

/// Render a word as digits when possible, comma-separated otherwise.
pub fn format_word(word: &[u32]) -> String {
    if word.iter().all(|&a| a <= 9) {
        word.iter().map(|a| a.to_string()).collect()
    } else {
        word.iter()
            .map(|a| a.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}
