//! Homomorphisms between free groups, given by the images of generators.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Map;
use thiserror::Error;

use crate::word::{check_alphabet, reduce_letters, Alphabet, Letter, Word, WordError};

#[derive(Debug, Error)]
pub enum HomError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("expected {expected} images, got {got}")]
    ImageCount { expected: usize, got: usize },
    #[error("missing image for generator `{0}`")]
    MissingImage(String),
    #[error("image for unknown generator `{0}`")]
    UnknownImage(String),
    #[error("invalid homomorphism JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homomorphism {
    domain: Arc<Alphabet>,
    codomain: Arc<Alphabet>,
    images: Vec<Word>,
}

impl Homomorphism {
    pub fn new(
        domain: Arc<Alphabet>,
        codomain: Arc<Alphabet>,
        images: Vec<Word>,
    ) -> Result<Self, HomError> {
        if images.len() != domain.rank() {
            return Err(HomError::ImageCount { expected: domain.rank(), got: images.len() });
        }
        for img in &images {
            check_alphabet(img.alphabet(), &codomain)?;
        }
        Ok(Homomorphism { domain, codomain, images })
    }

    pub fn identity(alphabet: &Arc<Alphabet>) -> Self {
        let images = (0..alphabet.rank())
            .map(|g| Word::from_reduced(alphabet.clone(), vec![Letter::pos(g)]))
            .collect();
        Homomorphism { domain: alphabet.clone(), codomain: alphabet.clone(), images }
    }

    pub fn domain(&self) -> &Arc<Alphabet> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<Alphabet> {
        &self.codomain
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, gen: usize) -> &Word {
        &self.images[gen]
    }

    pub fn apply(&self, w: &Word) -> Result<Word, HomError> {
        check_alphabet(w.alphabet(), &self.domain)?;
        let letters = reduce_letters(w.letters().iter().flat_map(|&l| {
            let img = self.images[l.gen()].letters();
            let inv = !l.is_positive();
            let n = img.len();
            (0..n).map(move |i| if inv { img[n - 1 - i].inverse() } else { img[i] })
        }));
        Ok(Word::from_reduced(self.codomain.clone(), letters))
    }

    /// `outer ∘ inner`: first `inner`, then `outer`.
    pub fn compose(outer: &Homomorphism, inner: &Homomorphism) -> Result<Homomorphism, HomError> {
        check_alphabet(&inner.codomain, &outer.domain)?;
        let images = inner.images.iter().map(|w| outer.apply(w)).collect::<Result<_, _>>()?;
        Ok(Homomorphism {
            domain: inner.domain.clone(),
            codomain: outer.codomain.clone(),
            images,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let images: Map<String, serde_json::Value> = self
            .domain
            .names()
            .iter()
            .zip(&self.images)
            .map(|(name, img)| (name.clone(), img.render().into()))
            .collect();
        let wire = HomWire {
            domain: self.domain.names().to_vec(),
            codomain: self.codomain.names().to_vec(),
            images,
        };
        serde_json::to_value(wire).expect("homomorphism JSON")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, HomError> {
        let wire: HomWire = serde_json::from_value(value.clone())?;
        let domain = Alphabet::new(wire.domain)?;
        let codomain = Alphabet::new(wire.codomain)?;
        for name in wire.images.keys() {
            if domain.index_of(name).is_none() {
                return Err(HomError::UnknownImage(name.clone()));
            }
        }
        let images = domain
            .names()
            .iter()
            .map(|name| {
                let text = wire
                    .images
                    .get(name)
                    .and_then(|v| v.as_str())
                    .ok_or_else(|| HomError::MissingImage(name.clone()))?;
                Ok(Word::parse(text, &codomain)?)
            })
            .collect::<Result<Vec<_>, HomError>>()?;
        Homomorphism::new(domain, codomain, images)
    }
}

#[derive(Serialize, Deserialize)]
struct HomWire {
    domain: Vec<String>,
    codomain: Vec<String>,
    images: Map<String, serde_json::Value>,
}

/// Uniform non-backtracking walk: the first letter is uniform over all
/// `2 * rank` letters, each later one over the `2 * rank - 1` letters that do
/// not cancel its predecessor. Deterministic in `seed`.
pub fn random_reduced_word(alphabet: &Arc<Alphabet>, length: usize, seed: u64) -> Word {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_reduced_word_with(alphabet, length, &mut rng)
}

pub fn random_reduced_word_with<R: Rng + ?Sized>(
    alphabet: &Arc<Alphabet>,
    length: usize,
    rng: &mut R,
) -> Word {
    let choices = 2 * alphabet.rank();
    let letter_of = |i: usize| Letter::new(i / 2, i.is_multiple_of(2));
    let mut letters: Vec<Letter> = Vec::with_capacity(length);
    for _ in 0..length {
        let next = match letters.last() {
            None => letter_of(rng.gen_range(0..choices)),
            Some(&prev) => {
                // skip the slot of prev's inverse
                let forbidden = prev.inverse();
                let mut i = rng.gen_range(0..choices - 1);
                if letter_of(i) >= forbidden {
                    i += 1;
                }
                let l = letter_of(i);
                debug_assert!(!l.cancels(prev));
                l
            }
        };
        letters.push(next);
    }
    Word::from_reduced(alphabet.clone(), letters)
}
