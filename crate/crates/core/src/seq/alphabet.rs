use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::numeric::RatVec;

pub const BEGIN: &str = "#";
pub const END: &str = "$";

/// Ordered finite alphabet containing `#` and `$`, with an embedding
/// `f_b : Σ → Q^{d_b}` that sends both markers to zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AlphabetJson", into = "AlphabetJson")]
pub struct Alphabet {
    symbols: Vec<String>,
    embeddings: Vec<RatVec>,
    d_b: usize,
}

#[derive(Serialize, Deserialize)]
struct AlphabetJson {
    symbols: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d_b: Option<usize>,
    #[serde(default)]
    embeddings: BTreeMap<String, RatVec>,
}

impl TryFrom<AlphabetJson> for Alphabet {
    type Error = Error;

    fn try_from(raw: AlphabetJson) -> Result<Self> {
        for name in raw.embeddings.keys() {
            if !raw.symbols.contains(name) {
                return Err(Error::UnknownSymbol(name.clone()));
            }
        }
        let d_b = match raw.d_b {
            Some(d) => d,
            None => raw
                .embeddings
                .values()
                .next()
                .map(RatVec::dim)
                .ok_or_else(|| Error::InvalidSpec("alphabet needs d_b or at least one embedding".into()))?,
        };
        let pairs = raw
            .symbols
            .iter()
            .map(|s| {
                let e = raw.embeddings.get(s).cloned().unwrap_or_else(|| RatVec::zeros(d_b));
                (s.clone(), e)
            })
            .collect();
        Alphabet::new(d_b, pairs)
    }
}

impl From<Alphabet> for AlphabetJson {
    fn from(a: Alphabet) -> Self {
        AlphabetJson {
            d_b: Some(a.d_b),
            embeddings: a.symbols.iter().cloned().zip(a.embeddings.iter().cloned()).collect(),
            symbols: a.symbols,
        }
    }
}

impl Alphabet {
    /// Alphabet in the given symbol order.
    pub fn new(d_b: usize, symbols: Vec<(String, RatVec)>) -> Result<Self> {
        let mut names: Vec<String> = Vec::with_capacity(symbols.len());
        let mut embeddings = Vec::with_capacity(symbols.len());
        for (name, e) in symbols {
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(Error::InvalidSpec(format!("bad symbol name {name:?}")));
            }
            if names.contains(&name) {
                return Err(Error::InvalidSpec(format!("duplicate symbol {name:?}")));
            }
            check_dim(&format!("embedding of {name:?}"), d_b, e.dim())?;
            if (name == BEGIN || name == END) && !e.is_zero() {
                return Err(Error::InvalidSpec(format!("{name:?} must embed to zero")));
            }
            names.push(name);
            embeddings.push(e);
        }
        for marker in [BEGIN, END] {
            if !names.iter().any(|n| n == marker) {
                return Err(Error::InvalidSpec(format!("alphabet lacks {marker:?}")));
            }
        }
        Ok(Alphabet {
            symbols: names,
            embeddings,
            d_b,
        })
    }

    /// `#`, the payload symbols in order, then `$`.
    pub fn with_payload(d_b: usize, payload: &[(&str, RatVec)]) -> Result<Self> {
        let mut all = vec![(BEGIN.to_string(), RatVec::zeros(d_b))];
        all.extend(payload.iter().map(|(s, e)| (s.to_string(), e.clone())));
        all.push((END.to_string(), RatVec::zeros(d_b)));
        Self::new(d_b, all)
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn payload(&self) -> impl Iterator<Item = &str> {
        self.symbols
            .iter()
            .map(String::as_str)
            .filter(|s| *s != BEGIN && *s != END)
    }

    pub fn index_of(&self, symbol: &str) -> Result<usize> {
        self.symbols
            .iter()
            .position(|s| s == symbol)
            .ok_or_else(|| Error::UnknownSymbol(symbol.to_string()))
    }

    pub fn begin_index(&self) -> usize {
        self.index_of(BEGIN).expect("validated at construction")
    }

    pub fn end_index(&self) -> usize {
        self.index_of(END).expect("validated at construction")
    }

    pub fn embed(&self, symbol: &str) -> Result<&RatVec> {
        Ok(&self.embeddings[self.index_of(symbol)?])
    }

    pub fn embedding(&self, index: usize) -> &RatVec {
        &self.embeddings[index]
    }

    /// Splits on whitespace; a single token that is not itself a symbol is
    /// split into characters when each one is.
    pub fn tokenize(&self, text: &str) -> Result<Vec<String>> {
        let tokens: Vec<String> = text.split_whitespace().map(str::to_string).collect();
        if tokens.len() == 1 && self.index_of(&tokens[0]).is_err() {
            let chars: Vec<String> = tokens[0].chars().map(String::from).collect();
            if chars.iter().all(|c| self.index_of(c).is_ok()) {
                return Ok(chars);
            }
        }
        for t in &tokens {
            self.index_of(t)?;
        }
        Ok(tokens)
    }

    /// Known symbols, `#` only at position 0, `$` only at the last position,
    /// and optionally a mandatory trailing `$`.
    pub fn validate_input(&self, input: &[String], require_end: bool) -> Result<()> {
        if input.is_empty() {
            return Err(Error::InvalidInput("empty input".into()));
        }
        let last = input.len() - 1;
        for (i, s) in input.iter().enumerate() {
            self.index_of(s)?;
            if s == BEGIN && i != 0 {
                return Err(Error::InvalidInput(format!("'#' at position {i}")));
            }
            if s == END && i != last {
                return Err(Error::InvalidInput(format!("'$' at position {i} before the end")));
            }
        }
        if require_end && input[last] != END {
            return Err(Error::InvalidInput("input must end with '$'".into()));
        }
        Ok(())
    }
}

pub fn symbols(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_string).collect()
}
