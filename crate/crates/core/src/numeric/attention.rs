use serde::{Deserialize, Serialize};

use super::linalg::RatVec;
use super::rat::Rat;
use crate::error::{check_dim, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScoringKind {
    /// `-|<q, k>|`
    #[serde(rename = "NEG_ABS_DOT")]
    NegAbsDot,
    /// `<q, k>`
    #[serde(rename = "DOT")]
    Dot,
}

pub fn score(kind: ScoringKind, q: &RatVec, k: &RatVec) -> Result<Rat> {
    let dot = q.dot(k)?;
    Ok(match kind {
        ScoringKind::NegAbsDot => -dot.abs(),
        ScoringKind::Dot => dot,
    })
}

/// Uniform weight `1/M` on the `M` maximizers, zero elsewhere.
pub fn hardmax(xs: &[Rat]) -> Result<RatVec> {
    let max = xs.iter().max().ok_or(Error::Empty("hardmax"))?;
    let ties = xs.iter().filter(|x| *x == max).count();
    let w = Rat::from(ties).recip()?;
    Ok(RatVec::new(
        xs.iter()
            .map(|x| if x == max { w.clone() } else { Rat::zero() })
            .collect(),
    ))
}

/// Result of one hard-attention read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attended {
    pub output: RatVec,
    pub weights: RatVec,
}

/// `Σ_i hardmax(score(q, k_i))_i · v_i` over the given keys and values.
pub fn attention(kind: ScoringKind, q: &RatVec, keys: &[RatVec], values: &[RatVec]) -> Result<Attended> {
    if keys.is_empty() {
        return Err(Error::Empty("attention"));
    }
    check_dim("attention values", keys.len(), values.len())?;
    let scores = keys
        .iter()
        .map(|k| score(kind, q, k))
        .collect::<Result<Vec<_>>>()?;
    let weights = hardmax(&scores)?;
    let dim = values[0].dim();
    let mut sum = RatVec::zeros(dim);
    let mut share = None;
    for (w, v) in weights.iter().zip(values) {
        check_dim("attention value width", dim, v.dim())?;
        if !w.is_zero() {
            sum.add_assign(v);
            share = Some(w.clone());
        }
    }
    let share = share.expect("hardmax always selects at least one entry");
    Ok(Attended {
        output: sum.scale(&share),
        weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(xs: &[i64]) -> Vec<Rat> {
        xs.iter().map(|&x| Rat::int(x)).collect()
    }

    #[test]
    fn hardmax_ties_split_evenly() {
        let w = hardmax(&ints(&[2, 5, 5, 1])).unwrap();
        assert_eq!(
            w,
            RatVec::new(vec![Rat::zero(), Rat::frac(1, 2), Rat::frac(1, 2), Rat::zero()])
        );
    }

    #[test]
    fn hardmax_empty_is_error() {
        assert!(matches!(hardmax(&[]), Err(Error::Empty(_))));
    }

    #[test]
    fn neg_abs_dot_prefers_orthogonal() {
        let q = RatVec::from_ints(&[3, 1]);
        let k = [RatVec::from_ints(&[-1, 1]), RatVec::from_ints(&[-1, 3]), RatVec::from_ints(&[-1, 4])];
        let s: Vec<_> = k.iter().map(|k| score(ScoringKind::NegAbsDot, &q, k).unwrap()).collect();
        assert_eq!(s, ints(&[-2, 0, -1]));
        assert_eq!(score(ScoringKind::Dot, &q, &k[2]).unwrap(), Rat::int(1));
    }

    #[test]
    fn attention_averages_tied_values() {
        let q = RatVec::from_ints(&[1]);
        let keys = [RatVec::from_ints(&[1]), RatVec::from_ints(&[0]), RatVec::from_ints(&[1])];
        let vals = [RatVec::from_ints(&[4, 0]), RatVec::from_ints(&[9, 9]), RatVec::from_ints(&[0, 2])];
        let a = attention(ScoringKind::Dot, &q, &keys, &vals).unwrap();
        assert_eq!(a.output, RatVec::from_ints(&[2, 1]));
        assert_eq!(a.weights.get(1), &Rat::zero());
    }

    #[test]
    fn attention_rejects_mismatches() {
        let q = RatVec::from_ints(&[1]);
        assert!(attention(ScoringKind::Dot, &q, &[], &[]).is_err());
        let keys = [RatVec::from_ints(&[1, 0])];
        let vals = [RatVec::from_ints(&[1])];
        assert!(attention(ScoringKind::Dot, &q, &keys, &vals).is_err());
    }
}
