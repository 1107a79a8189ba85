use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::exec::{map_indexed, Exec};
use crate::numeric::{Rat, RatVec};

/// Largest `n` accepted by [`enumerate_reachable`].
pub const MAX_VALUES: usize = 20;

const CHUNK_BITS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReachableSet {
    pub n: usize,
    /// `2^n − 1` nonempty subsets.
    pub subset_count: u64,
    pub outputs: BTreeSet<RatVec>,
}

impl ReachableSet {
    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    pub fn contains(&self, v: &RatVec) -> bool {
        self.outputs.contains(v)
    }
}

/// Every average `(1/|S|) Σ_{i∈S} v_i` over nonempty subsets `S`, i.e. every
/// vector a hard-attention head can return over `values`.
pub fn enumerate_reachable(values: &[RatVec]) -> Result<ReachableSet> {
    enumerate_reachable_with(values, Exec::default())
}

pub fn enumerate_reachable_with(values: &[RatVec], exec: Exec) -> Result<ReachableSet> {
    let n = values.len();
    if n > MAX_VALUES {
        return Err(Error::InvalidInput(format!("{n} values exceed the limit of {MAX_VALUES}")));
    }
    let dim = values.first().map_or(0, RatVec::dim);
    for v in values {
        check_dim("reachable value", dim, v.dim())?;
    }
    let total: u64 = 1 << n;
    let chunk: u64 = 1 << CHUNK_BITS.min(n);
    let chunks = (total / chunk) as usize;
    let parts = map_indexed(exec, chunks, |c| walk_chunk(values, c as u64 * chunk, (c as u64 + 1) * chunk));
    let mut outputs = BTreeSet::new();
    for p in parts {
        outputs.extend(p);
    }
    Ok(ReachableSet {
        n,
        subset_count: total - 1,
        outputs,
    })
}

/// Subsets `gray(i)` for `i` in `lo..hi`, where consecutive Gray codes
/// differ in the bit `trailing_zeros(i)`.
fn walk_chunk(values: &[RatVec], lo: u64, hi: u64) -> BTreeSet<RatVec> {
    let dim = values.first().map_or(0, RatVec::dim);
    let gray = |i: u64| i ^ (i >> 1);
    let mut mask = gray(lo);
    let mut sum = RatVec::zeros(dim);
    for (i, v) in values.iter().enumerate() {
        if mask >> i & 1 == 1 {
            sum.add_assign(v);
        }
    }
    let mut out = BTreeSet::new();
    let mut i = lo;
    loop {
        if mask != 0 {
            out.insert(sum.scale(&Rat::frac(1, mask.count_ones() as i64)));
        }
        i += 1;
        if i == hi {
            break;
        }
        let bit = i.trailing_zeros() as usize;
        mask ^= 1 << bit;
        let v = &values[bit];
        sum = if mask >> bit & 1 == 1 {
            sum.add(v).expect("checked dims")
        } else {
            sum.sub(v).expect("checked dims")
        };
    }
    out
}
