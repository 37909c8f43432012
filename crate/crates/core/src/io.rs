// SPDX-License-Identifier: Apache-2.0

//! JSON input files: systems, potentials, measures and carpets.
//!
//! A system file looks like
//!
//! ```json
//! {"alphabet_size": 3, "transitions": [[1,1,0],[0,1,1],[1,0,1]],
//!  "code": [0,0,1], "labels": {"x": ["a","b","c"], "y": ["u","v"]}}
//! ```
//!
//! `alphabet_size` may also be `[|X|, |Y|]`; `labels` may be a plain array of
//! `X` labels; an optional `code_window` makes `code` a table over
//! `code_window`-words in base `|X|`, most significant symbol first.
//! Symbols that cannot occur in a bi-infinite sequence are pruned, and
//! potentials and measures read later are re-indexed to match.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use serde_json::Value;

use crate::carpets::{CarpetSpec, SoficCarpetSpec};
use crate::cover::Potential;
use crate::error::{Error, Result};
use crate::measures::MarkovMeasure;
use crate::symbolic::{Alphabet, BlockCode, BlockRecoding, FactorPair, Sft};
use crate::Limits;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Sizes {
    One(usize),
    Two([usize; 2]),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Labels {
    Upstairs(Vec<String>),
    Both {
        #[serde(default)]
        x: Option<Vec<String>>,
        #[serde(default)]
        y: Option<Vec<String>>,
    },
}

/// Raw contents of a system file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    alphabet_size: Sizes,
    transitions: Vec<Vec<u8>>,
    code: Vec<usize>,
    #[serde(default)]
    code_window: Option<usize>,
    #[serde(default)]
    labels: Option<Labels>,
}

/// A loaded factor pair together with the bookkeeping needed to translate
/// user-indexed potentials and measures onto it.
#[derive(Debug, Clone)]
pub struct System {
    pub pair: FactorPair,
    /// Declared shift after pruning, before any block recoding.
    pub base: Sft,
    /// Original index of each surviving symbol of the declared alphabet.
    pub origin: Vec<usize>,
    /// Set when a windowed code forced a higher block presentation.
    pub recoding: Option<(BlockRecoding, usize)>,
}

impl System {
    /// Wraps an already-built pair (no pruning, no recoding).
    pub fn from_pair(pair: FactorPair) -> Self {
        let origin = (0..pair.x().size()).collect();
        System {
            base: pair.x().clone(),
            pair,
            origin,
            recoding: None,
        }
    }

    /// Re-indexes a potential written over the declared alphabet.
    pub fn potential(&self, raw: &Potential, limits: &Limits) -> Result<Potential> {
        let pruned = if raw.table().is_empty() {
            raw.clone()
        } else {
            let position: BTreeMap<usize, usize> =
                self.origin.iter().enumerate().map(|(i, &o)| (o, i)).collect();
            let table = raw
                .table()
                .iter()
                .filter_map(|(k, &v)| {
                    let mapped: Option<Vec<usize>> = k.iter().map(|s| position.get(s).copied()).collect();
                    mapped.map(|m| (m, v))
                })
                .collect();
            Potential::from_table(raw.window(), table)?
        };
        match &self.recoding {
            None => {
                pruned.validate_for(self.pair.x(), limits.word_cap)?;
                Ok(pruned)
            }
            Some((recoding, block)) => {
                pruned.validate_for(&self.base, limits.word_cap)?;
                pruned.to_blocks(recoding, *block, limits.word_cap)
            }
        }
    }

    /// Measure over the declared alphabet; only for 1-block codes.
    pub fn measure(&self, file: &MeasureFile) -> Result<MarkovMeasure> {
        if self.recoding.is_some() {
            return Err(Error::invalid("measure", "measures need a 1-block code"));
        }
        let n = file.pi.len();
        if file.p.len() != n {
            return Err(Error::invalid("P", format!("expected {n} rows, found {}", file.p.len())));
        }
        for (i, row) in file.p.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(format!("P[{i}]"), format!("expected {n} entries, found {}", row.len())));
            }
        }
        for i in 0..n {
            if !self.origin.contains(&i) && file.pi[i] != 0.0 {
                return Err(Error::invalid(format!("pi[{i}]"), "mass on a pruned symbol"));
            }
        }
        let pi = self.origin.iter().map(|&o| file.pi[o]).collect();
        let p = self
            .origin
            .iter()
            .map(|&i| self.origin.iter().map(|&j| file.p[i][j]).collect())
            .collect();
        MarkovMeasure::with_stationary(self.pair.x().clone(), pi, p)
    }
}

/// Builds the pair described by a system file.
pub fn build_system(file: &SystemFile, limits: &Limits) -> Result<System> {
    let (nx, ny) = match file.alphabet_size {
        Sizes::One(n) => (n, None),
        Sizes::Two([a, b]) => (a, Some(b)),
    };
    let (x_labels, y_labels) = match &file.labels {
        None => (None, None),
        Some(Labels::Upstairs(x)) => (Some(x.clone()), None),
        Some(Labels::Both { x, y }) => (x.clone(), y.clone()),
    };
    let transitions: Vec<Vec<bool>> = file
        .transitions
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, &v)| match v {
                    0 => Ok(false),
                    1 => Ok(true),
                    _ => Err(Error::invalid(format!("transitions[{i}][{j}]"), format!("{v} is not 0 or 1"))),
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let x_alphabet = match x_labels {
        Some(l) if l.len() != nx => {
            return Err(Error::invalid("labels.x", format!("{} labels for {nx} symbols", l.len())))
        }
        Some(l) => Alphabet::with_labels(l)?,
        None => Alphabet::new(nx).map_err(|_| Error::invalid("alphabet_size", "must be positive"))?,
    };
    let ny = match (ny, &y_labels) {
        (Some(n), _) => n,
        (None, Some(l)) => l.len(),
        (None, None) => file.code.iter().max().map_or(1, |m| m + 1),
    };
    let y_alphabet = match y_labels {
        Some(l) if l.len() != ny => {
            return Err(Error::invalid("labels.y", format!("{} labels for {ny} symbols", l.len())))
        }
        Some(l) => Alphabet::with_labels(l)?,
        None => Alphabet::new(ny).map_err(|_| Error::invalid("alphabet_size", "codomain must be nonempty"))?,
    };
    let window = file.code_window.unwrap_or(1);
    let code = BlockCode::with_window(nx, y_alphabet, window, file.code.clone())?;
    if let Some(missing) = (0..ny).find(|y| !file.code.contains(y)) {
        return Err(Error::invalid(
            "code",
            format!("symbol {missing} of the codomain is never hit; the code must be onto"),
        ));
    }
    let x = Sft::new(x_alphabet, transitions)?;
    let origin = x.origin().to_vec();
    let code = if origin.len() == nx {
        code
    } else {
        restrict_windowed(&code, &origin)?
    };
    let (pair, recoding) = FactorPair::from_block_code(&x, &code, limits)?;
    Ok(System {
        pair,
        base: x,
        origin,
        recoding: recoding.map(|r| (r, window)),
    })
}

fn restrict_windowed(code: &BlockCode, kept: &[usize]) -> Result<BlockCode> {
    let k = code.window();
    let n = kept.len();
    let big = code.domain_size();
    let table = (0..n.pow(k as u32))
        .map(|mut idx| {
            let mut orig = 0;
            let mut digits = vec![0; k];
            for d in digits.iter_mut().rev() {
                *d = kept[idx % n];
                idx /= n;
            }
            for d in digits {
                orig = orig * big + d;
            }
            code.table()[orig]
        })
        .collect();
    BlockCode::with_window(n, code.codomain().clone(), k, table)
}

pub fn parse_system(text: &str, limits: &Limits) -> Result<System> {
    let file: SystemFile = serde_json::from_str(text)?;
    build_system(&file, limits)
}

pub fn load_system(path: &Path, limits: &Limits) -> Result<System> {
    parse_system(&read(path)?, limits)
}

/// `{"window": k, "0,1": 0.5, ...}`: values on `k`-words over the declared alphabet.
pub fn parse_potential(text: &str) -> Result<Potential> {
    let value: Value = serde_json::from_str(text)?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::invalid("potential", "expected a JSON object"))?;
    let window = match obj.get("window") {
        Some(v) => v
            .as_u64()
            .filter(|&k| k >= 1)
            .ok_or_else(|| Error::invalid("window", "must be a positive integer"))? as usize,
        None => return Err(Error::invalid("window", "missing")),
    };
    let mut table = BTreeMap::new();
    for (key, v) in obj {
        if key == "window" {
            continue;
        }
        let word: Vec<usize> = key
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::invalid(format!("potential[{key}]"), "key is not a comma-separated word"))?;
        let x = v
            .as_f64()
            .ok_or_else(|| Error::invalid(format!("potential[{key}]"), "value is not a number"))?;
        table.insert(word, x);
    }
    Potential::from_table(window, table)
}

pub fn load_potential(path: &Path) -> Result<Potential> {
    parse_potential(&read(path)?)
}

/// `{"pi": [...], "P": [[...]]}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFile {
    pub pi: Vec<f64>,
    #[serde(rename = "P")]
    pub p: Vec<Vec<f64>>,
}

pub fn load_measure(path: &Path) -> Result<MeasureFile> {
    Ok(serde_json::from_str(&read(path)?)?)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct CarpetFile {
    a: u32,
    b: u32,
    #[serde(rename = "R")]
    r: Vec<[u32; 2]>,
    #[serde(default)]
    digit_transitions: Option<Vec<Vec<u8>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CarpetInput {
    Plain(CarpetSpec),
    Sofic(SoficCarpetSpec),
}

impl CarpetInput {
    pub fn carpet(&self) -> &CarpetSpec {
        match self {
            CarpetInput::Plain(c) => c,
            CarpetInput::Sofic(s) => &s.carpet,
        }
    }
}

pub fn parse_carpet(text: &str) -> Result<CarpetInput> {
    let file: CarpetFile = serde_json::from_str(text)?;
    carpet_from(file)
}

fn carpet_from(file: CarpetFile) -> Result<CarpetInput> {
    let carpet = CarpetSpec::new(file.a, file.b, file.r.iter().map(|d| (d[0], d[1])).collect())?;
    match file.digit_transitions {
        None => Ok(CarpetInput::Plain(carpet)),
        Some(rows) => {
            let t = rows
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(j, &v)| match v {
                            0 => Ok(false),
                            1 => Ok(true),
                            _ => Err(Error::invalid(
                                format!("digit_transitions[{i}][{j}]"),
                                format!("{v} is not 0 or 1"),
                            )),
                        })
                        .collect()
                })
                .collect::<Result<_>>()?;
            Ok(CarpetInput::Sofic(SoficCarpetSpec::new(carpet, t)?))
        }
    }
}

pub fn load_carpet(path: &Path) -> Result<CarpetInput> {
    parse_carpet(&read(path)?)
}

/// Either kind of input file, told apart by its keys.
#[derive(Debug, Clone)]
pub enum Input {
    System(Box<System>),
    Carpet(CarpetInput),
}

pub fn parse_input(text: &str, limits: &Limits) -> Result<Input> {
    let value: Value = serde_json::from_str(text)?;
    if value.get("R").is_some() {
        Ok(Input::Carpet(carpet_from(serde_json::from_value(value)?)?))
    } else {
        let file: SystemFile = serde_json::from_value(value)?;
        Ok(Input::System(Box::new(build_system(&file, limits)?)))
    }
}

pub fn load_input(path: &Path, limits: &Limits) -> Result<Input> {
    parse_input(&read(path)?, limits)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| {
        Error::invalid("input", format!("cannot read {}: {e}", path.display()))
    })
}
