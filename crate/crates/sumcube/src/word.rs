//! The morphism engine: the alphabet {0, 1, 3, 4}, the morphism
//! 0→03, 1→43, 3→1, 4→01, its fixed point, and the bookkeeping maps
//! (Parikh vectors, image lengths, position parents) the rest of the
//! pipeline is built on.

use std::fmt;
use std::str::FromStr;

use crate::Error;

/// A letter of the alphabet Σ = {0, 1, 3, 4}.
///
/// The discriminant is the letter's integer value (used in block sums);
/// [`Letter::index`] gives its rank 0..4 in alphabet order.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Letter {
    L0 = 0,
    L1 = 1,
    L3 = 3,
    L4 = 4,
}

/// Alphabet in canonical order; `ALPHABET[i].index() == i`.
pub const ALPHABET: [Letter; 4] = [Letter::L0, Letter::L1, Letter::L3, Letter::L4];

impl Letter {
    /// Integer value of the letter (0, 1, 3 or 4).
    pub fn value(self) -> u8 {
        self as u8
    }

    /// Rank in alphabet order: 0↦0, 1↦1, 3↦2, 4↦3.
    pub fn index(self) -> usize {
        match self {
            Letter::L0 => 0,
            Letter::L1 => 1,
            Letter::L3 => 2,
            Letter::L4 => 3,
        }
    }

    pub fn from_index(i: usize) -> Letter {
        ALPHABET[i]
    }

    pub fn from_value(v: u8) -> Result<Letter, Error> {
        match v {
            0 => Ok(Letter::L0),
            1 => Ok(Letter::L1),
            3 => Ok(Letter::L3),
            4 => Ok(Letter::L4),
            _ => Err(Error::BadLetter(v)),
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// A finite word over Σ.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new() -> Word {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Word {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of the letter values.
    pub fn sum(&self) -> u64 {
        self.0.iter().map(|l| l.value() as u64).sum()
    }

    /// Letter values as plain integers (the oracle's word representation).
    pub fn to_values(&self) -> Vec<u32> {
        self.0.iter().map(|l| l.value() as u32).collect()
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word, Error> {
        s.chars()
            .map(|c| {
                c.to_digit(10)
                    .ok_or(Error::BadWord(c))
                    .and_then(|d| Letter::from_value(d as u8))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// An integer 4-vector indexed by alphabet rank: counts of (0, 1, 3, 4)
/// when it is a Parikh vector, arbitrary integers elsewhere (lattice
/// members, template differences).
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vec4(pub [i64; 4]);

impl Vec4 {
    pub const ZERO: Vec4 = Vec4([0; 4]);

    pub fn new(n0: i64, n1: i64, n3: i64, n4: i64) -> Vec4 {
        Vec4([n0, n1, n3, n4])
    }

    /// Unit Parikh vector of a single letter.
    pub fn unit(l: Letter) -> Vec4 {
        let mut v = [0i64; 4];
        v[l.index()] = 1;
        Vec4(v)
    }

    pub fn dot(&self, other: &Vec4) -> i64 {
        (0..4).map(|i| self.0[i] * other.0[i]).sum()
    }

    pub fn norm_sq(&self) -> i64 {
        self.dot(self)
    }
}

impl std::ops::Add for Vec4 {
    type Output = Vec4;
    fn add(self, rhs: Vec4) -> Vec4 {
        Vec4([
            self.0[0] + rhs.0[0],
            self.0[1] + rhs.0[1],
            self.0[2] + rhs.0[2],
            self.0[3] + rhs.0[3],
        ])
    }
}

impl std::ops::Sub for Vec4 {
    type Output = Vec4;
    fn sub(self, rhs: Vec4) -> Vec4 {
        Vec4([
            self.0[0] - rhs.0[0],
            self.0[1] - rhs.0[1],
            self.0[2] - rhs.0[2],
            self.0[3] - rhs.0[3],
        ])
    }
}

impl std::ops::Neg for Vec4 {
    type Output = Vec4;
    fn neg(self) -> Vec4 {
        Vec4([-self.0[0], -self.0[1], -self.0[2], -self.0[3]])
    }
}

impl std::ops::Mul<i64> for Vec4 {
    type Output = Vec4;
    fn mul(self, k: i64) -> Vec4 {
        Vec4([self.0[0] * k, self.0[1] * k, self.0[2] * k, self.0[3] * k])
    }
}

impl fmt::Display for Vec4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

/// Parikh vector: componentwise letter counts of a word.
pub fn parikh(w: &Word) -> Vec4 {
    let mut v = [0i64; 4];
    for l in w.letters() {
        v[l.index()] += 1;
    }
    Vec4(v)
}

/// A nonerasing morphism over Σ whose image of 0 starts with 0, so
/// iterating from 0 yields an infinite fixed point.
#[derive(Clone, Debug)]
pub struct Morphism {
    images: [Word; 4],
}

impl Morphism {
    pub fn new(images: [Word; 4]) -> Result<Morphism, Error> {
        if images.iter().any(|w| w.is_empty()) {
            return Err(Error::ErasingMorphism);
        }
        if images[0].letters()[0] != Letter::L0 {
            return Err(Error::NotProlongable);
        }
        Ok(Morphism { images })
    }

    /// The canonical morphism 0→03, 1→43, 3→1, 4→01 studied by this crate.
    pub fn canonical() -> Morphism {
        let img = |s: &str| s.parse::<Word>().expect("valid image");
        Morphism::new([img("03"), img("43"), img("1"), img("01")]).expect("canonical is valid")
    }

    pub fn image(&self, l: Letter) -> &Word {
        &self.images[l.index()]
    }

    /// Apply the morphism: concatenation of the letter images in order.
    pub fn apply(&self, w: &Word) -> Word {
        let mut out = Vec::with_capacity(w.len() * 2);
        for &l in w.letters() {
            out.extend_from_slice(self.image(l).letters());
        }
        Word(out)
    }

    /// Composition `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Morphism) -> Result<Morphism, Error> {
        let images = [
            self.apply(other.image(Letter::L0)),
            self.apply(other.image(Letter::L1)),
            self.apply(other.image(Letter::L3)),
            self.apply(other.image(Letter::L4)),
        ];
        Morphism::new(images)
    }

    /// Incidence matrix: column `a` is the Parikh vector of the image of
    /// the `a`-th letter, so that ψ(φ(x)) = M ψ(x) for every word x.
    pub fn incidence_matrix(&self) -> IncidenceMatrix {
        let mut m = [[0i64; 4]; 4];
        for (j, l) in ALPHABET.iter().enumerate() {
            let col = parikh(self.image(*l));
            for i in 0..4 {
                m[i][j] = col.0[i];
            }
        }
        IncidenceMatrix(m)
    }
}

/// 4×4 integer matrix, row-major.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct IncidenceMatrix(pub [[i64; 4]; 4]);

impl IncidenceMatrix {
    pub fn mul_vec(&self, v: &Vec4) -> Vec4 {
        let mut out = [0i64; 4];
        for i in 0..4 {
            out[i] = (0..4).map(|j| self.0[i][j] * v.0[j]).sum();
        }
        Vec4(out)
    }

    pub fn identity() -> IncidenceMatrix {
        let mut m = [[0i64; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        IncidenceMatrix(m)
    }
}

/// Streaming generator of the fixed point w = φ^ω(0).
///
/// Letters are produced by block substitution: a cursor consumes already
/// emitted letters and appends their images, so generating a length-n
/// prefix costs O(n) and repeated queries never recompute from scratch.
/// The image lengths recorded along the way serve η(p) = |φ(w[0,p))| and,
/// by binary search over the monotone η table, parent(p). Cumulative
/// letter counts serve σ(p) = ψ(w[0,p)).
pub struct FixedPoint {
    morphism: Morphism,
    letters: Vec<Letter>,
    /// eta[p] = |φ(w[0,p))| for p = 0..=consumed.
    eta: Vec<usize>,
    /// counts[p] = Parikh vector of w[0,p), as running totals.
    counts: Vec<[i64; 4]>,
    /// Next position to consume.
    cursor: usize,
}

impl Default for FixedPoint {
    fn default() -> Self {
        FixedPoint::new()
    }
}

impl FixedPoint {
    pub fn new() -> FixedPoint {
        let morphism = Morphism::canonical();
        // Seed with φ(0); position 0 counts as consumed, so the cursor
        // always lags the emitted length (η(p) > p for p ≥ 1).
        let letters = morphism.image(Letter::L0).letters().to_vec();
        let mut counts = vec![[0i64; 4]];
        for (i, l) in letters.iter().enumerate() {
            let mut c = counts[i];
            c[l.index()] += 1;
            counts.push(c);
        }
        let eta = vec![0, letters.len()];
        FixedPoint {
            morphism,
            letters,
            eta,
            counts,
            cursor: 1,
        }
    }

    pub fn morphism(&self) -> &Morphism {
        &self.morphism
    }

    fn step(&mut self) {
        let l = self.letters[self.cursor];
        for &m in self.morphism.image(l).letters() {
            let mut c = *self.counts.last().expect("nonempty");
            c[m.index()] += 1;
            self.letters.push(m);
            self.counts.push(c);
        }
        self.cursor += 1;
        self.eta.push(self.letters.len());
    }

    fn ensure_letters(&mut self, n: usize) {
        while self.letters.len() < n {
            self.step();
        }
    }

    fn ensure_consumed(&mut self, p: usize) {
        while self.cursor < p {
            self.step();
        }
    }

    /// The length-n prefix of w.
    pub fn prefix(&mut self, n: usize) -> Word {
        self.ensure_letters(n);
        Word(self.letters[..n].to_vec())
    }

    /// w[p], 0-indexed.
    pub fn letter(&mut self, p: usize) -> Letter {
        self.ensure_letters(p + 1);
        self.letters[p]
    }

    /// η(p) = |φ(w[0,p))|, the length of the image of the length-p prefix.
    pub fn eta(&mut self, p: usize) -> usize {
        self.ensure_consumed(p);
        self.eta[p]
    }

    /// The unique t with η(t) ≤ p < η(t+1).
    pub fn parent(&mut self, p: usize) -> usize {
        // η(cursor) = emitted length, so η exceeds p once p+1 letters exist.
        self.ensure_letters(p + 1);
        self.eta.partition_point(|&e| e <= p) - 1
    }

    /// σ(p) = ψ(w[0,p)), the Parikh vector of the length-p prefix.
    pub fn sigma(&mut self, p: usize) -> Vec4 {
        self.ensure_letters(p);
        Vec4(self.counts[p])
    }
}

/// A window of the two-sided fixed point: `letters[origin]` is the first
/// letter of the right-infinite half, everything before it belongs to the
/// left-infinite half.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoSidedWindow {
    pub letters: Word,
    pub origin: usize,
}

impl TwoSidedWindow {
    /// Window text with the seam marked by a period before `origin`.
    pub fn seam_string(&self) -> String {
        let s = self.letters.to_string();
        format!("{}.{}", &s[..self.origin], &s[self.origin..])
    }
}

/// 2n letters of the two-sided additive-cube-free word centered at the
/// seam: n letters of the left-infinite half (indices −n..−1) followed by
/// n letters of the right-infinite half (indices 0..n−1).
///
/// Both halves are generated with h = φ²: the left half extends 3 leftward
/// (h(3) = 43) and the right half extends 0 rightward (h(0) = 031), so
/// every window is a factor of some φᵏ(30).
pub fn two_sided_window(n: usize) -> TwoSidedWindow {
    assert!(n >= 1, "window must have at least one letter per side");
    let phi = Morphism::canonical();
    let h = phi.compose(&phi).expect("φ² is a valid morphism");

    // h^k(3) is a suffix of h^{k+1}(3); keep iterating until long enough.
    let mut left: Word = "3".parse().expect("valid");
    while left.len() < n {
        left = h.apply(&left);
    }
    // h^k(0) is a prefix of h^{k+1}(0).
    let mut right: Word = "0".parse().expect("valid");
    while right.len() < n {
        right = h.apply(&right);
    }

    let mut letters = left.letters()[left.len() - n..].to_vec();
    letters.extend_from_slice(&right.letters()[..n]);
    TwoSidedWindow {
        letters: Word(letters),
        origin: n,
    }
}
