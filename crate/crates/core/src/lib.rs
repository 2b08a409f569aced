//! Free-group computations: reduced words, homomorphisms, Stallings
//! foldings and abelianization, plus a verifier for the `phi_{g,l}` family
//! of surface-group maps into the rank-3 free group.

pub mod abelian;
pub mod cli;
pub mod family;
pub mod hom;
pub mod stallings;
pub mod word;

pub use abelian::{
    exponent_vector, image_matrix, quotient_order, smith_normal_form, ExponentVector, IntMatrix,
    QuotientOrder, SmithForm,
};
pub use family::{verify, PaperParams, VerificationReport};
pub use hom::{random_reduced_word, Homomorphism};
pub use stallings::{is_injective, InjectivityCertificate, SubgroupGraph};
pub use word::{Alphabet, CyclicWord, Letter, Word, WordError};
