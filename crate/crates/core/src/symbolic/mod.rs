// SPDX-License-Identifier: Apache-2.0

//! Subshifts of finite type, 1-block codes and factor pairs.

mod code;
mod pair;
mod presentation;
mod sft;
mod words;

pub use code::BlockCode;
pub use pair::{validate_factor_pair, Counterexample, FactorPair, ValidationReport};
pub use presentation::{image_presentation, SoficPresentation};
pub use sft::{Alphabet, Sft, Word};
pub use words::{
    count_words, enumerate_words, higher_block_recode, log_count, perron_entropy, BlockRecoding,
    WordIter,
};
