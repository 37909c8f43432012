// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::symbolic::{enumerate_words, BlockRecoding, Sft};

/// Locally constant potential: `f(x) = table[x_0 .. x_{k-1}]`.
///
/// Entries not listed in the table take `default` when one is set, which is
/// how `f = 0` and constant potentials are represented without an alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    window: usize,
    table: BTreeMap<Vec<usize>, f64>,
    default: Option<f64>,
}

impl Potential {
    pub fn zero() -> Self {
        Potential::constant(0.0)
    }

    pub fn constant(c: f64) -> Self {
        Potential {
            window: 1,
            table: BTreeMap::new(),
            default: Some(c),
        }
    }

    /// Window-1 potential with `f(x) = values[x_0]`.
    pub fn symbolwise(values: &[f64]) -> Self {
        Potential {
            window: 1,
            table: values
                .iter()
                .enumerate()
                .map(|(i, &v)| (vec![i], v))
                .collect(),
            default: None,
        }
    }

    pub fn from_table(window: usize, table: BTreeMap<Vec<usize>, f64>) -> Result<Self> {
        if window == 0 {
            return Err(Error::invalid("window", "must be at least 1"));
        }
        for (k, v) in &table {
            if k.len() != window {
                return Err(Error::invalid(
                    format!("potential[{}]", join(k)),
                    format!("key length {} differs from window {window}", k.len()),
                ));
            }
            if !v.is_finite() {
                return Err(Error::invalid(
                    format!("potential[{}]", join(k)),
                    "value must be finite",
                ));
            }
        }
        Ok(Potential {
            window,
            table,
            default: None,
        })
    }

    /// Tabulates `f` on every admissible `window`-word of `x`.
    pub fn tabulate(
        x: &Sft,
        window: usize,
        cap: u64,
        mut f: impl FnMut(&[usize]) -> f64,
    ) -> Result<Self> {
        let mut table = BTreeMap::new();
        for w in enumerate_words(x, window, cap)? {
            let v = f(&w.0);
            table.insert(w.0, v);
        }
        Potential::from_table(window, table)
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn table(&self) -> &BTreeMap<Vec<usize>, f64> {
        &self.table
    }

    /// Value on a window word. Panics if the word has no value, which
    /// [`Potential::validate_for`] rules out for admissible words.
    #[inline]
    pub fn value(&self, window: &[usize]) -> f64 {
        debug_assert_eq!(window.len(), self.window);
        match self.table.get(window) {
            Some(&v) => v,
            None => self.default.unwrap_or_else(|| {
                panic!("potential has no value on window {window:?}")
            }),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.default.unwrap_or(0.0) == 0.0 && self.table.values().all(|&v| v == 0.0)
    }

    /// Checks that every admissible window word of `x` has a value and every
    /// listed word is admissible.
    pub fn validate_for(&self, x: &Sft, cap: u64) -> Result<()> {
        for k in self.table.keys() {
            if !x.is_admissible(k) {
                return Err(Error::invalid(
                    format!("potential[{}]", join(k)),
                    "window word is not admissible",
                ));
            }
        }
        if self.default.is_none() {
            for w in enumerate_words(x, self.window, cap)? {
                if !self.table.contains_key(&w.0) {
                    return Err(Error::invalid(
                        format!("potential[{}]", join(&w.0)),
                        "missing value for admissible window word",
                    ));
                }
            }
        }
        Ok(())
    }

    /// `(min, max)` of the potential over admissible window words.
    pub fn range_on(&self, x: &Sft, cap: u64) -> Result<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for w in enumerate_words(x, self.window, cap)? {
            let v = self.value(&w.0);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Ok((lo, hi))
    }

    /// `f + c`.
    pub fn shifted(&self, c: f64) -> Potential {
        Potential {
            window: self.window,
            table: self.table.iter().map(|(k, v)| (k.clone(), v + c)).collect(),
            default: self.default.map(|d| d + c),
        }
    }

    /// The same function expressed on the `block`-block presentation given by
    /// `recoding`.
    pub fn to_blocks(&self, recoding: &BlockRecoding, block: usize, cap: u64) -> Result<Potential> {
        let window = if self.window >= block {
            self.window - block + 1
        } else {
            1
        };
        Potential::tabulate(&recoding.sft, window, cap, |symbols| {
            let mut word: Vec<usize> = recoding.dictionary[symbols[0]].0.clone();
            for &s in &symbols[1..] {
                word.push(*recoding.dictionary[s].0.last().expect("nonempty"));
            }
            self.value(&word[..self.window])
        })
    }
}

fn join(k: &[usize]) -> String {
    k.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
}
