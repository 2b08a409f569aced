//! Freely reduced words over a finite alphabet of free generators.
//!
//! Every [`Word`] is kept in free normal form: no letter is ever adjacent to
//! its inverse. The empty word is the identity and renders as `1`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Mul;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("malformed exponent in `{0}`")]
    MalformedExponent(String),
    #[error("malformed token `{0}`")]
    MalformedToken(String),
    #[error("generator index {index} out of range for rank {rank}")]
    GeneratorOutOfRange { index: usize, rank: usize },
    #[error("alphabet mismatch: [{left}] vs [{right}]")]
    AlphabetMismatch { left: String, right: String },
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
}

/// An ordered list of generator names. The rank is the number of names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    names: Vec<String>,
}

pub(crate) fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Arc<Self>, WordError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(WordError::InvalidAlphabet("rank must be at least 1".into()));
        }
        for (i, name) in names.iter().enumerate() {
            if !is_valid_name(name) {
                return Err(WordError::InvalidAlphabet(format!(
                    "`{name}` is not a valid generator name"
                )));
            }
            if names[..i].contains(name) {
                return Err(WordError::InvalidAlphabet(format!("duplicate generator `{name}`")));
            }
        }
        Ok(Arc::new(Alphabet { names }))
    }

    /// `prefix1 .. prefixN`, e.g. `y1 y2 y3`.
    pub fn numbered(prefix: &str, rank: usize) -> Result<Arc<Self>, WordError> {
        Self::new((1..=rank).map(|i| format!("{prefix}{i}")))
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, gen: usize) -> &str {
        &self.names[gen]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    fn describe(&self) -> String {
        self.names.join(",")
    }
}

pub(crate) fn same_alphabet(a: &Arc<Alphabet>, b: &Arc<Alphabet>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

pub(crate) fn check_alphabet(a: &Arc<Alphabet>, b: &Arc<Alphabet>) -> Result<(), WordError> {
    if same_alphabet(a, b) {
        Ok(())
    } else {
        Err(WordError::AlphabetMismatch { left: a.describe(), right: b.describe() })
    }
}

/// One signed occurrence of a generator. `gen` is a 0-based index.
///
/// The derived order compares generator index first, then sign with the
/// positive letter before the inverse one. Canonical class representatives
/// are least rotations under this order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    gen: u32,
    inverse: bool,
}

impl Letter {
    pub fn new(gen: usize, positive: bool) -> Self {
        Letter { gen: gen as u32, inverse: !positive }
    }

    pub fn pos(gen: usize) -> Self {
        Self::new(gen, true)
    }

    pub fn neg(gen: usize) -> Self {
        Self::new(gen, false)
    }

    pub fn gen(self) -> usize {
        self.gen as usize
    }

    pub fn is_positive(self) -> bool {
        !self.inverse
    }

    /// +1 or -1.
    pub fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn inverse(self) -> Self {
        Letter { gen: self.gen, inverse: !self.inverse }
    }

    pub fn cancels(self, other: Letter) -> bool {
        self.gen == other.gen && self.inverse != other.inverse
    }
}

/// Free reduction of a raw letter sequence (stack based, single pass).
pub fn reduce_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::new();
    for l in letters {
        match out.last() {
            Some(&top) if top.cancels(l) => {
                out.pop();
            }
            _ => out.push(l),
        }
    }
    out
}

/// A freely reduced word. Equality is equality of group elements.
#[derive(Clone)]
pub struct Word {
    alphabet: Arc<Alphabet>,
    letters: Vec<Letter>,
}

impl PartialEq for Word {
    fn eq(&self, other: &Self) -> bool {
        self.letters == other.letters && same_alphabet(&self.alphabet, &other.alphabet)
    }
}

impl Eq for Word {}

impl std::hash::Hash for Word {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.letters.hash(state);
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({})", self)
    }
}

impl Word {
    pub fn identity(alphabet: &Arc<Alphabet>) -> Self {
        Word { alphabet: alphabet.clone(), letters: Vec::new() }
    }

    /// The single-letter word for generator `gen` (0-based).
    pub fn generator(alphabet: &Arc<Alphabet>, gen: usize) -> Result<Self, WordError> {
        Self::reduce(alphabet, [Letter::pos(gen)])
    }

    /// Reduces an arbitrary letter sequence, checking generator bounds.
    pub fn reduce<I>(alphabet: &Arc<Alphabet>, letters: I) -> Result<Self, WordError>
    where
        I: IntoIterator<Item = Letter>,
    {
        let rank = alphabet.rank();
        let mut bad = None;
        let letters = reduce_letters(letters.into_iter().inspect(|l| {
            if l.gen() >= rank && bad.is_none() {
                bad = Some(l.gen());
            }
        }));
        if let Some(index) = bad {
            return Err(WordError::GeneratorOutOfRange { index, rank });
        }
        Ok(Word { alphabet: alphabet.clone(), letters })
    }

    /// Caller guarantees the letters are reduced and in range.
    pub(crate) fn from_reduced(alphabet: Arc<Alphabet>, letters: Vec<Letter>) -> Self {
        debug_assert!(letters.windows(2).all(|p| !p[0].cancels(p[1])));
        Word { alphabet, letters }
    }

    /// Parses the textual word grammar: whitespace separated atoms `name` or
    /// `name^int`, or the single token `1` for the identity.
    pub fn parse(text: &str, alphabet: &Arc<Alphabet>) -> Result<Self, WordError> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens == ["1"] {
            return Ok(Self::identity(alphabet));
        }
        let mut raw = Vec::new();
        for tok in tokens {
            let (name, exp) = match tok.split_once('^') {
                Some((name, exp)) => {
                    let exp: i64 = parse_exponent(exp)
                        .ok_or_else(|| WordError::MalformedExponent(tok.to_string()))?;
                    (name, exp)
                }
                None => (tok, 1),
            };
            if !is_valid_name(name) {
                return Err(WordError::MalformedToken(tok.to_string()));
            }
            let gen = alphabet
                .index_of(name)
                .ok_or_else(|| WordError::UnknownGenerator(name.to_string()))?;
            let letter = Letter::new(gen, exp > 0);
            raw.extend(std::iter::repeat_n(letter, exp.unsigned_abs() as usize));
        }
        Ok(Word { alphabet: alphabet.clone(), letters: reduce_letters(raw) })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    pub fn concat(&self, other: &Word) -> Result<Word, WordError> {
        check_alphabet(&self.alphabet, &other.alphabet)?;
        let a = &self.letters;
        let b = &other.letters;
        let mut k = 0;
        while k < a.len() && k < b.len() && a[a.len() - 1 - k].cancels(b[k]) {
            k += 1;
        }
        let mut letters = Vec::with_capacity(a.len() + b.len() - 2 * k);
        letters.extend_from_slice(&a[..a.len() - k]);
        letters.extend_from_slice(&b[k..]);
        Ok(Word { alphabet: self.alphabet.clone(), letters })
    }

    pub fn inverse(&self) -> Word {
        let letters = self.letters.iter().rev().map(|l| l.inverse()).collect();
        Word { alphabet: self.alphabet.clone(), letters }
    }

    /// `self^n`; negative `n` gives powers of the inverse.
    pub fn pow(&self, n: i64) -> Word {
        if n == 0 || self.is_empty() {
            return Word::identity(&self.alphabet);
        }
        let (core, conj) = self.cyclic_reduce();
        let base: &[Letter] = &core.letters;
        let times = n.unsigned_abs() as usize;
        let mut letters = Vec::with_capacity(2 * conj.len() + times * base.len());
        letters.extend_from_slice(&conj.letters);
        if n > 0 {
            for _ in 0..times {
                letters.extend_from_slice(base);
            }
        } else {
            let inv: Vec<Letter> = base.iter().rev().map(|l| l.inverse()).collect();
            for _ in 0..times {
                letters.extend_from_slice(&inv);
            }
        }
        letters.extend(conj.letters.iter().rev().map(|l| l.inverse()));
        Word { alphabet: self.alphabet.clone(), letters }
    }

    /// Splits `self = conjugator * core * conjugator^-1` with `core`
    /// cyclically reduced.
    pub fn cyclic_reduce(&self) -> (CyclicWord, Word) {
        let n = self.letters.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.letters[k].cancels(self.letters[n - 1 - k]) {
            k += 1;
        }
        let core = CyclicWord {
            alphabet: self.alphabet.clone(),
            letters: self.letters[k..n - k].to_vec(),
        };
        let conj = Word { alphabet: self.alphabet.clone(), letters: self.letters[..k].to_vec() };
        (core, conj)
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(a), Some(b)) => self.len() == 1 || !a.cancels(b),
            _ => true,
        }
    }

    /// Canonical representative of the conjugacy class of `self`, or of the
    /// class together with the class of the inverse when `oriented` is false.
    pub fn canonical_class(&self, oriented: bool) -> CyclicWord {
        let (core, _) = self.cyclic_reduce();
        core.canonical(oriented)
    }

    /// Maximal runs of one generator with constant sign, as `(gen, signed count)`.
    pub fn runs(&self) -> Vec<(usize, i64)> {
        letter_runs(&self.letters)
    }

    pub fn render(&self) -> String {
        render_letters(&self.alphabet, &self.letters)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Panics on alphabet mismatch; use [`Word::concat`] for the checked form.
impl Mul<&Word> for &Word {
    type Output = Word;

    fn mul(self, rhs: &Word) -> Word {
        self.concat(rhs).expect("multiplying words over different alphabets")
    }
}

fn parse_exponent(s: &str) -> Option<i64> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

pub(crate) fn letter_runs(letters: &[Letter]) -> Vec<(usize, i64)> {
    let mut runs: Vec<(usize, i64)> = Vec::new();
    let mut prev: Option<Letter> = None;
    for &l in letters {
        match (prev, runs.last_mut()) {
            (Some(p), Some(run)) if p == l => run.1 += l.sign(),
            _ => runs.push((l.gen(), l.sign())),
        }
        prev = Some(l);
    }
    runs
}

fn render_letters(alphabet: &Alphabet, letters: &[Letter]) -> String {
    if letters.is_empty() {
        return "1".to_string();
    }
    letter_runs(letters)
        .into_iter()
        .map(|(gen, k)| {
            if k == 1 {
                alphabet.name(gen).to_string()
            } else {
                format!("{}^{}", alphabet.name(gen), k)
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// A cyclically reduced word, standing for its conjugacy class.
///
/// Equality is structural; compare [`CyclicWord::canonical`] outputs to test
/// conjugacy.
#[derive(Clone)]
pub struct CyclicWord {
    alphabet: Arc<Alphabet>,
    letters: Vec<Letter>,
}

impl PartialEq for CyclicWord {
    fn eq(&self, other: &Self) -> bool {
        self.letters == other.letters && same_alphabet(&self.alphabet, &other.alphabet)
    }
}

impl Eq for CyclicWord {}

impl PartialOrd for CyclicWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CyclicWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters.cmp(&other.letters)
    }
}

impl std::hash::Hash for CyclicWord {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.letters.hash(state);
    }
}

impl fmt::Debug for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CyclicWord({})", self)
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_letters(&self.alphabet, &self.letters))
    }
}

impl CyclicWord {
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn to_word(&self) -> Word {
        Word::from_reduced(self.alphabet.clone(), self.letters.clone())
    }

    pub fn rotate(&self, k: usize) -> CyclicWord {
        let mut letters = self.letters.clone();
        if !letters.is_empty() {
            let k = k % letters.len();
            letters.rotate_left(k);
        }
        CyclicWord { alphabet: self.alphabet.clone(), letters }
    }

    pub fn inverse(&self) -> CyclicWord {
        CyclicWord {
            alphabet: self.alphabet.clone(),
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Least rotation; with `oriented == false`, the lesser of the least
    /// rotations of the word and of its inverse.
    pub fn canonical(&self, oriented: bool) -> CyclicWord {
        let fwd = self.rotate(least_rotation(&self.letters));
        if oriented {
            return fwd;
        }
        let inv = self.inverse();
        let bwd = inv.rotate(least_rotation(&inv.letters));
        fwd.min(bwd)
    }
}

/// Start index of the lexicographically least rotation.
pub fn least_rotation<T: Ord>(s: &[T]) -> usize {
    let n = s.len();
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        let a = &s[(i + k) % n];
        let b = &s[(j + k) % n];
        match a.cmp(b) {
            Ordering::Equal => {
                k += 1;
                continue;
            }
            Ordering::Greater => i += k + 1,
            Ordering::Less => j += k + 1,
        }
        if i == j {
            j += 1;
        }
        k = 0;
    }
    i.min(j)
}
