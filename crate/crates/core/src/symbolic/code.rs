// SPDX-License-Identifier: Apache-2.0

use super::sft::{Alphabet, Sft, Word};
use super::words::{higher_block_recode, BlockRecoding};
use crate::error::{Error, Result};

/// Sliding block code `x -> y` with memory 0 and anticipation `window - 1`.
///
/// For `window == 1` the table is indexed by domain symbol. For larger windows
/// it is indexed by the base-`domain_size` value of the window word (most
/// significant symbol first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockCode {
    domain_size: usize,
    codomain: Alphabet,
    window: usize,
    table: Vec<usize>,
}

impl BlockCode {
    pub fn new(domain_size: usize, codomain: Alphabet, table: Vec<usize>) -> Result<Self> {
        Self::with_window(domain_size, codomain, 1, table)
    }

    pub fn with_window(
        domain_size: usize,
        codomain: Alphabet,
        window: usize,
        table: Vec<usize>,
    ) -> Result<Self> {
        if window == 0 {
            return Err(Error::invalid("code_window", "must be at least 1"));
        }
        let expected = domain_size
            .checked_pow(window as u32)
            .ok_or_else(|| Error::invalid("code_window", "table size overflows"))?;
        if table.len() != expected {
            return Err(Error::invalid(
                "code",
                format!("expected {expected} entries, found {}", table.len()),
            ));
        }
        if let Some((i, &v)) = table.iter().enumerate().find(|(_, &v)| v >= codomain.size()) {
            return Err(Error::invalid(
                format!("code[{i}]"),
                format!("image {v} outside codomain of size {}", codomain.size()),
            ));
        }
        Ok(BlockCode {
            domain_size,
            codomain,
            window,
            table,
        })
    }

    /// Code sending every symbol to `0` in a one-letter codomain.
    pub fn collapse(domain_size: usize) -> Self {
        BlockCode {
            domain_size,
            codomain: Alphabet::new(1).expect("nonzero"),
            window: 1,
            table: vec![0; domain_size],
        }
    }

    pub fn identity(domain_size: usize) -> Self {
        BlockCode {
            domain_size,
            codomain: Alphabet::new(domain_size).expect("nonzero"),
            window: 1,
            table: (0..domain_size).collect(),
        }
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn codomain(&self) -> &Alphabet {
        &self.codomain
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    /// Image of a symbol; window-1 codes only.
    #[inline]
    pub fn apply(&self, symbol: usize) -> usize {
        debug_assert_eq!(self.window, 1);
        self.table[symbol]
    }

    /// Image of a word under a window-1 code.
    pub fn image(&self, word: &[usize]) -> Word {
        debug_assert_eq!(self.window, 1);
        Word(word.iter().map(|&s| self.table[s]).collect())
    }

    fn window_value(&self, window: &[usize]) -> usize {
        let idx = window.iter().fold(0usize, |acc, &s| acc * self.domain_size + s);
        self.table[idx]
    }

    /// Re-indexes a window-1 code after the domain was pruned to `kept` symbols.
    pub(crate) fn restrict_domain(&self, kept: &[usize]) -> BlockCode {
        assert_eq!(self.window, 1);
        BlockCode {
            domain_size: kept.len(),
            codomain: self.codomain.clone(),
            window: 1,
            table: kept.iter().map(|&i| self.table[i]).collect(),
        }
    }

    /// Recodes `x` to its `window`-block presentation and returns the
    /// equivalent window-1 code on it.
    pub fn to_one_block(&self, x: &Sft, cap: u64) -> Result<(BlockRecoding, BlockCode)> {
        if self.domain_size != x.size() {
            return Err(Error::invalid(
                "code",
                format!(
                    "domain size {} does not match shift alphabet {}",
                    self.domain_size,
                    x.size()
                ),
            ));
        }
        let recoding = higher_block_recode(x, self.window, cap)?;
        let table = recoding
            .dictionary
            .iter()
            .map(|w| self.window_value(&w.0))
            .collect();
        let code = BlockCode {
            domain_size: recoding.sft.size(),
            codomain: self.codomain.clone(),
            window: 1,
            table,
        };
        Ok((recoding, code))
    }
}
