//! The two-parameter family of maps from a free group of rank `2g` onto a
//! subgroup of the rank-3 free group `<y1, y2, y3>`, together with the
//! checks run for one parameter pair.
//!
//! With `w1 = y1 y2 y3` and `w2 = y3^-3 y2^-l y1^3`, the generator images are
//! defined recursively:
//!
//! ```text
//! x1       -> y3^3
//! x(4i+1)  -> y3^-1 y2^-1 . x(4i) . y2^l y3^3
//! x(4i+2)  -> y1^3 . x(4i+1) . y1
//! x(4i+3)  -> y3^-3 y2^-l . x(4i+2) . y2 y3
//! x(4i+4)  -> y1^-1 . x(4i+3) . y1^-3
//! ```
//!
//! and are claimed to agree with closed forms built from `A = w1^-1 w2` and
//! `B = w1 w2^-1`. The recursion is authoritative; the closed forms are
//! checked against it.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::abelian::{image_matrix, quotient_order, QuotientOrder};
use crate::hom::{random_reduced_word_with, Homomorphism};
use crate::stallings::is_injective;
use crate::word::{Alphabet, CyclicWord, Letter, Word};

pub const REPORT_SCHEMA: &str = "fgkit-report/1";
pub const DEFAULT_SEED: u64 = 0x5eed_2024;
pub const BLOCK_SAMPLES_PER_PARITY: usize = 200;
pub const BLOCK_SAMPLE_MAX_LEN: usize = 8;
pub const BLOCK_EXHAUSTIVE_LEN: usize = 3;

const Y1: usize = 0;
const Y2: usize = 1;
const Y3: usize = 2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamError {
    #[error("g must be even")]
    OddGenus(i64),
    #[error("g must be ≥ 2")]
    GenusTooSmall(i64),
    #[error("l must be ≥ 3")]
    WindingTooSmall(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PaperParams {
    g: u32,
    l: u32,
}

impl PaperParams {
    pub fn new(g: i64, l: i64) -> Result<Self, ParamError> {
        check_genus(g)?;
        if l < 3 {
            return Err(ParamError::WindingTooSmall(l));
        }
        let l = u32::try_from(l).map_err(|_| ParamError::WindingTooSmall(l))?;
        Ok(PaperParams { g: g as u32, l })
    }

    pub fn g(self) -> usize {
        self.g as usize
    }

    pub fn l(self) -> i64 {
        self.l as i64
    }

    /// The order stated in the literature for the abelianized quotient.
    pub fn paper_order(self) -> u64 {
        4 * self.l as u64 + 4
    }
}

fn check_genus(g: i64) -> Result<(), ParamError> {
    if g % 2 != 0 {
        return Err(ParamError::OddGenus(g));
    }
    if g < 2 || g > u32::MAX as i64 {
        return Err(ParamError::GenusTooSmall(g));
    }
    Ok(())
}

pub fn codomain() -> Arc<Alphabet> {
    Alphabet::numbered("y", 3).expect("y1..y3")
}

pub fn domain(g: usize) -> Arc<Alphabet> {
    Alphabet::numbered("x", 2 * g).expect("x1..x2g")
}

fn y(alpha: &Arc<Alphabet>, text: &str) -> Word {
    Word::parse(text, alpha).expect("built-in word")
}

/// `w1 = y1 y2 y3`, `w2 = y3^-3 y2^-l y1^3` over `y1..y3`.
pub fn build_w1_w2(l: i64) -> (Word, Word) {
    let c = codomain();
    (y(&c, "y1 y2 y3"), y(&c, &format!("y3^-3 y2^{} y1^3", -l)))
}

/// Position of the 1-based generator `k` as `k = 4i + j`, `j` in 1..=4.
fn block_position(k: usize) -> (usize, usize) {
    let j = (k - 1) % 4 + 1;
    ((k - j) / 4, j)
}

pub fn phi_images_recursive(p: PaperParams) -> Vec<Word> {
    let c = codomain();
    let l = p.l();
    let left = [
        y(&c, "y3^-1 y2^-1"),
        y(&c, "y1^3"),
        y(&c, &format!("y3^-3 y2^{}", -l)),
        y(&c, "y1^-1"),
    ];
    let right = [
        y(&c, &format!("y2^{l} y3^3")),
        y(&c, "y1"),
        y(&c, "y2 y3"),
        y(&c, "y1^-3"),
    ];
    let mut images = vec![y(&c, "y3^3")];
    for k in 2..=2 * p.g() {
        let (_, j) = block_position(k);
        let prev = images.last().expect("x1 image");
        images.push(&(&left[j - 1] * prev) * &right[j - 1]);
    }
    images
}

pub fn phi_images_closed(p: PaperParams) -> Vec<Word> {
    let c = codomain();
    let (w1, w2) = build_w1_w2(p.l());
    let a = &w1.inverse() * &w2;
    let b = &w1 * &w2.inverse();
    let y3_cubed = y(&c, "y3^3");
    (1..=2 * p.g())
        .map(|k| {
            let (i, j) = block_position(k);
            let middle = &(&a.pow(i as i64) * &y3_cubed) * &b.pow(i as i64);
            match j {
                1 => middle,
                2 => &(&y(&c, "y1^3") * &middle) * &y(&c, "y1"),
                3 => &(&w2 * &middle) * &w1,
                _ => {
                    let inner = &(&w2 * &middle) * &w1;
                    &(&y(&c, "y1^-1") * &inner) * &y(&c, "y1^-3")
                }
            }
        })
        .collect()
}

/// The map `x_k -> phi(x_k)` from the recursive definition.
pub fn phi(p: PaperParams) -> Homomorphism {
    Homomorphism::new(domain(p.g()), codomain(), phi_images_recursive(p))
        .expect("2g images over y1..y3")
}

/// Which of the four conjugation identities in `A = w1^-1 w2`, `B = w1 w2^-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IdentityBranch {
    /// `B^j w1 A^i = w2 A^(i-j-1)` for `i > j`
    W1Above,
    /// `B^j w1 A^i = B^(j-i) w1` for `i <= j`
    W1Below,
    /// `B^j w2 A^i = w2 A^(i-j)` for `i >= j`
    W2Above,
    /// `B^j w2 A^i = B^(j-i-1) w1` for `i < j`
    W2Below,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IdentityFailure {
    pub branch: IdentityBranch,
    pub i: usize,
    pub j: usize,
    pub l: i64,
}

/// First `(branch, i, j, l)` at which an identity fails, if any.
pub fn find_identity_failure(i_max: usize, j_max: usize, l: i64) -> Option<IdentityFailure> {
    let (w1, w2) = build_w1_w2(l);
    let a = &w1.inverse() * &w2;
    let b = &w1 * &w2.inverse();
    let pa = |n: usize| a.pow(n as i64);
    let pb = |n: usize| b.pow(n as i64);
    for i in 0..=i_max {
        for j in 0..=j_max {
            let lhs1 = &(&pb(j) * &w1) * &pa(i);
            let (branch1, rhs1) = if i > j {
                (IdentityBranch::W1Above, &w2 * &pa(i - j - 1))
            } else {
                (IdentityBranch::W1Below, &pb(j - i) * &w1)
            };
            if lhs1 != rhs1 {
                return Some(IdentityFailure { branch: branch1, i, j, l });
            }
            let lhs2 = &(&pb(j) * &w2) * &pa(i);
            let (branch2, rhs2) = if i >= j {
                (IdentityBranch::W2Above, &w2 * &pa(i - j))
            } else {
                (IdentityBranch::W2Below, &pb(j - i - 1) * &w1)
            };
            if lhs2 != rhs2 {
                return Some(IdentityFailure { branch: branch2, i, j, l });
            }
        }
    }
    None
}

pub fn check_identities_36_37(i_max: usize, j_max: usize, l: i64) -> bool {
    find_identity_failure(i_max, j_max, l).is_none()
}

/// The boundary word: odd generators ascending with alternating signs, the
/// same block with signs flipped, even generators descending with
/// alternating signs starting negative, and that block flipped.
pub fn boundary_word(g: i64) -> Result<Word, ParamError> {
    check_genus(g)?;
    let g = g as usize;
    let dom = domain(g);
    // 0-based indices: x(2m+1) is index 2m, x(2m) is index 2m-1
    let odd: Vec<Letter> = (0..g).map(|m| Letter::new(2 * m, m % 2 == 0)).collect();
    let even: Vec<Letter> =
        (0..g).map(|m| Letter::new(2 * (g - m) - 1, m % 2 == 1)).collect();
    let flip = |block: &[Letter]| block.iter().map(|l| l.inverse()).collect::<Vec<_>>();
    let letters = [odd.clone(), flip(&odd), even.clone(), flip(&even)].concat();
    let w = Word::reduce(&dom, letters).expect("indices below 2g");
    debug_assert_eq!(w.len(), 4 * g);
    Ok(w)
}

/// Canonical class of the image of the boundary word.
pub fn boundary_class(p: PaperParams, oriented: bool) -> CyclicWord {
    let bw = boundary_word(p.g() as i64).expect("validated params");
    phi(p).apply(&bw).expect("domain word").canonical_class(oriented)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlopeCheck {
    pub g: usize,
    pub oriented: bool,
    pub l_values: Vec<i64>,
    pub distinct: bool,
    pub nontrivial: bool,
    /// Pairs of parameters whose classes coincide.
    pub collisions: Vec<(i64, i64)>,
}

impl SlopeCheck {
    pub fn ok(&self) -> bool {
        self.distinct && self.nontrivial
    }
}

pub fn slope_check(g: i64, l_values: &[i64], oriented: bool) -> Result<SlopeCheck, ParamError> {
    let params = l_values
        .iter()
        .map(|&l| PaperParams::new(g, l))
        .collect::<Result<Vec<_>, _>>()?;
    let classes: Vec<CyclicWord> = params.iter().map(|&p| boundary_class(p, oriented)).collect();
    let mut collisions = Vec::new();
    for a in 0..classes.len() {
        for b in a + 1..classes.len() {
            if classes[a] == classes[b] {
                collisions.push((l_values[a], l_values[b]));
            }
        }
    }
    Ok(SlopeCheck {
        g: g as usize,
        oriented,
        l_values: l_values.to_vec(),
        distinct: collisions.is_empty(),
        nontrivial: classes.iter().all(|c| !c.is_empty()),
        collisions,
    })
}

/// Unoriented comparison: true iff all classes are nontrivial and pairwise
/// distinct.
pub fn slope_distinctness(g: i64, l_values: &[i64]) -> Result<bool, ParamError> {
    Ok(slope_check(g, l_values, false)?.ok())
}

/// Generators of one parity: `Even` is `x2, x4, ..`, `Odd` is `x1, x3, ..`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn domain_index(self, m: usize) -> usize {
        match self {
            Parity::Odd => 2 * m,
            Parity::Even => 2 * m + 1,
        }
    }

    fn allowed_end(self, l: Letter) -> bool {
        match self {
            Parity::Even => l.gen() == Y1,
            Parity::Odd => l.gen() == Y2 || l.gen() == Y3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockLetterCheck {
    pub checked: usize,
    pub counterexample: Option<String>,
}

impl BlockLetterCheck {
    pub fn ok(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// All reduced words of length `1..=max_len` over `rank` generators, as
/// letter sequences over indices `0..rank`.
pub fn reduced_words_up_to(rank: usize, max_len: usize) -> Vec<Vec<Letter>> {
    let letters: Vec<Letter> =
        (0..rank).flat_map(|g| [Letter::pos(g), Letter::neg(g)]).collect();
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for &l in &letters {
                if w.last().is_some_and(|&p| p.cancels(l)) {
                    continue;
                }
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Checks that every nontrivial word in one parity class of generators maps
/// to a nontrivial word whose first and last letters are `y1^±1` (even
/// generators) or lie in `{y2^±1, y3^±1}` (odd generators).
pub fn check_block_letters(
    p: PaperParams,
    parity: Parity,
    exhaustive_len: usize,
    samples: usize,
    max_sample_len: usize,
    seed: u64,
) -> BlockLetterCheck {
    let h = phi(p);
    let dom = h.domain().clone();
    let sub_rank = p.g();
    let sub = Alphabet::numbered("s", sub_rank).expect("sub alphabet");
    let lift = |letters: &[Letter]| {
        Word::reduce(
            &dom,
            letters.iter().map(|l| Letter::new(parity.domain_index(l.gen()), l.is_positive())),
        )
        .expect("in range")
    };
    let mut checked = 0;
    let mut check = |u: Word| -> Option<String> {
        checked += 1;
        let img = h.apply(&u).expect("domain word");
        let good = match (img.first(), img.last()) {
            (Some(a), Some(b)) => parity.allowed_end(a) && parity.allowed_end(b),
            _ => false,
        };
        (!good).then(|| format!("{:?} word {} maps to {}", parity, u, img))
    };
    for letters in reduced_words_up_to(sub_rank, exhaustive_len) {
        if let Some(bad) = check(lift(&letters)) {
            return BlockLetterCheck { checked, counterexample: Some(bad) };
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let len = rng.gen_range(1..=max_sample_len);
        let w = random_reduced_word_with(&sub, len, &mut rng);
        if let Some(bad) = check(lift(w.letters())) {
            return BlockLetterCheck { checked, counterexample: Some(bad) };
        }
    }
    BlockLetterCheck { checked, counterexample: None }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub params: PaperParams,
    pub injective: bool,
    pub image_rank: usize,
    pub closed_form_ok: bool,
    pub identities_36_37_ok: bool,
    pub block_letter_ok: bool,
    pub quotient_order: QuotientOrder,
    pub paper_order: u64,
    pub paper_order_match: bool,
    #[serde(serialize_with = "serialize_display")]
    pub boundary_class: CyclicWord,
    pub hard_ok: bool,
    pub failures: Vec<String>,
    pub warnings: Vec<String>,
    /// Milliseconds per check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

fn serialize_display<T: std::fmt::Display, S: serde::Serializer>(
    v: &T,
    s: S,
) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl VerificationReport {
    pub fn without_timings(mut self) -> Self {
        self.timings = None;
        self
    }
}

pub fn verify(p: PaperParams) -> VerificationReport {
    verify_with_seed(p, DEFAULT_SEED)
}

pub fn verify_with_seed(p: PaperParams, seed: u64) -> VerificationReport {
    let mut timings = BTreeMap::new();
    let mut failures = Vec::new();
    let mut warnings = Vec::new();
    let mut timed = |name: &str, start: Instant| {
        timings.insert(name.to_string(), start.elapsed().as_secs_f64() * 1e3);
    };

    let t = Instant::now();
    let recursive = phi_images_recursive(p);
    let closed = phi_images_closed(p);
    let mismatched: Vec<usize> =
        (0..recursive.len()).filter(|&k| recursive[k] != closed[k]).map(|k| k + 1).collect();
    let closed_form_ok = mismatched.is_empty();
    if !closed_form_ok {
        failures.push(format!("closed form differs from recursion at x{mismatched:?}"));
    }
    timed("closed_form", t);

    let t = Instant::now();
    let failure = find_identity_failure(p.g(), p.g(), p.l());
    if let Some(f) = failure {
        failures.push(format!("identity {:?} fails at i={} j={} l={}", f.branch, f.i, f.j, f.l));
    }
    let identities_36_37_ok = failure.is_none();
    timed("identities", t);

    let t = Instant::now();
    let mut block_letter_ok = true;
    for (k, parity) in [Parity::Even, Parity::Odd].into_iter().enumerate() {
        let check = check_block_letters(
            p,
            parity,
            BLOCK_EXHAUSTIVE_LEN,
            BLOCK_SAMPLES_PER_PARITY,
            BLOCK_SAMPLE_MAX_LEN,
            seed.wrapping_add(k as u64),
        );
        if let Some(bad) = check.counterexample {
            block_letter_ok = false;
            failures.push(format!("block letters: {bad}"));
        }
    }
    timed("block_letters", t);

    let h = Homomorphism::new(domain(p.g()), codomain(), recursive).expect("valid images");

    let t = Instant::now();
    let (injective, cert) = is_injective(&h);
    if !injective {
        failures.push(format!(
            "image rank {} below domain rank {}",
            cert.image_rank, cert.domain_rank
        ));
    }
    timed("injectivity", t);

    let t = Instant::now();
    let quotient_order = match quotient_order(&image_matrix(&h), 3) {
        Ok(q) => q,
        Err(e) => {
            failures.push(format!("quotient order: {e}"));
            QuotientOrder::Infinite
        }
    };
    if !quotient_order.is_finite() {
        failures.push("abelianized quotient is infinite".to_string());
    }
    let paper_order = p.paper_order();
    let paper_order_match = quotient_order == QuotientOrder::Finite(paper_order);
    if !paper_order_match {
        warnings.push(format!(
            "WARNING: quotient order {quotient_order} differs from 4l+4 = {paper_order}"
        ));
    }
    timed("quotient_order", t);

    let t = Instant::now();
    let bw = boundary_word(p.g() as i64).expect("validated params");
    let boundary_class = h.apply(&bw).expect("domain word").canonical_class(false);
    if boundary_class.is_empty() {
        failures.push("boundary image is trivial".to_string());
    }
    timed("boundary_class", t);

    VerificationReport {
        params: p,
        injective,
        image_rank: cert.image_rank,
        closed_form_ok,
        identities_36_37_ok,
        block_letter_ok,
        quotient_order,
        paper_order,
        paper_order_match,
        boundary_class,
        hard_ok: failures.is_empty(),
        failures,
        warnings,
        timings: Some(timings),
    }
}
