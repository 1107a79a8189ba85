//! Layered σ-circuit builder that lowers to an [`Ffn`].
//!
//! Gates live on numbered layers; layer 0 holds the inputs. A gate reads
//! only the previous layer, so operands from lower layers are carried
//! forward through identity units `σ(x) = x`, which is exact for values in
//! `[0, 1]`. Lifting an input coordinate therefore requires it to lie in
//! `[0, 1]`; wider inputs go through [`Circuit::split`].

use std::collections::HashMap;

use crate::error::Result;
use crate::numeric::{Rat, RatMat, RatVec};
use crate::seq::{Ffn, FfnLayer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signal {
    layer: usize,
    index: usize,
}

pub type Terms = Vec<(Signal, Rat)>;

#[derive(Debug, Clone)]
struct Gate {
    terms: Vec<(usize, Rat)>,
    bias: Rat,
}

#[derive(Debug, Clone)]
pub struct Circuit {
    input_dim: usize,
    layers: Vec<Vec<Gate>>,
    lifted: HashMap<(Signal, usize), Signal>,
}

/// An output coordinate: `Σ c·signal + bias`.
#[derive(Debug, Clone, Default)]
pub struct Output {
    pub terms: Terms,
    pub bias: Rat,
}

impl Output {
    pub fn new(terms: Terms, bias: Rat) -> Self {
        Output { terms, bias }
    }

    pub fn of(s: Signal) -> Self {
        Output::new(vec![(s, Rat::one())], Rat::zero())
    }

    pub fn zero() -> Self {
        Output::default()
    }
}

impl Circuit {
    pub fn new(input_dim: usize) -> Self {
        Circuit {
            input_dim,
            layers: Vec::new(),
            lifted: HashMap::new(),
        }
    }

    pub fn input(&self, i: usize) -> Signal {
        assert!(i < self.input_dim, "input {i} out of range");
        Signal { layer: 0, index: i }
    }

    fn push(&mut self, layer: usize, gate: Gate) -> Signal {
        while self.layers.len() < layer {
            self.layers.push(Vec::new());
        }
        let units = &mut self.layers[layer - 1];
        units.push(gate);
        Signal {
            layer,
            index: units.len() - 1,
        }
    }

    /// `σ(Σ c·s + bias)`, placed one layer above its deepest operand.
    pub fn gate(&mut self, terms: &[(Signal, Rat)], bias: Rat) -> Signal {
        let layer = terms.iter().map(|(s, _)| s.layer).max().unwrap_or(0) + 1;
        let mut combined: Vec<(usize, Rat)> = Vec::new();
        for (s, c) in terms {
            if c.is_zero() {
                continue;
            }
            let s = self.lift(*s, layer - 1);
            match combined.iter_mut().find(|(i, _)| *i == s.index) {
                Some((_, acc)) => *acc += c,
                None => combined.push((s.index, c.clone())),
            }
        }
        combined.retain(|(_, c)| !c.is_zero());
        self.push(layer, Gate { terms: combined, bias })
    }

    /// Constant `σ(bias)` on layer 1.
    pub fn constant(&mut self, bias: Rat) -> Signal {
        self.push(1, Gate { terms: Vec::new(), bias })
    }

    /// Carries `s` up to `layer` through identity units.
    pub fn lift(&mut self, s: Signal, layer: usize) -> Signal {
        assert!(s.layer <= layer, "cannot lower a signal");
        if s.layer == layer {
            return s;
        }
        if let Some(&hit) = self.lifted.get(&(s, layer)) {
            return hit;
        }
        let below = self.lift(s, layer - 1);
        let out = self.push(
            layer,
            Gate {
                terms: vec![(below.index, Rat::one())],
                bias: Rat::zero(),
            },
        );
        self.lifted.insert((s, layer), out);
        out
    }

    /// Units `pos, neg` on layer 1 with `x = Σ pos − Σ neg` for every
    /// value of input `i` in `[lo, hi]`.
    pub fn split(&mut self, i: usize, lo: &Rat, hi: &Rat) -> (Vec<Signal>, Vec<Signal>) {
        let x = self.input(i);
        let up = if hi.is_positive() { hi.ceil_to_usize() } else { 0 };
        let down = if lo.is_negative() { (-lo).ceil_to_usize() } else { 0 };
        let pos = (0..up)
            .map(|k| self.gate(&[(x, Rat::one())], -Rat::from(k)))
            .collect();
        let neg = (0..down)
            .map(|k| self.gate(&[(x, -Rat::one())], -Rat::from(k)))
            .collect();
        (pos, neg)
    }

    /// Terms reproducing input `i` (times `coef`) from its split units.
    pub fn split_terms(&mut self, i: usize, lo: &Rat, hi: &Rat, coef: &Rat) -> Terms {
        let (pos, neg) = self.split(i, lo, hi);
        pos.into_iter()
            .map(|s| (s, coef.clone()))
            .chain(neg.into_iter().map(|s| (s, -coef)))
            .collect()
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Lowers to an `Ffn`. Every output reads the top layer, so all signals
    /// are lifted there first; the last layer is σ-activated iff
    /// `activate_last`.
    pub fn finish(mut self, outputs: &[Output], activate_last: bool) -> Result<Ffn> {
        let top = outputs
            .iter()
            .flat_map(|o| o.terms.iter().map(|(s, _)| s.layer))
            .max()
            .unwrap_or(0);
        let mut last_terms: Vec<Vec<(usize, Rat)>> = Vec::with_capacity(outputs.len());
        for o in outputs {
            let mut row: Vec<(usize, Rat)> = Vec::new();
            for (s, c) in &o.terms {
                if c.is_zero() {
                    continue;
                }
                let s = self.lift(*s, top);
                match row.iter_mut().find(|(i, _)| *i == s.index) {
                    Some((_, acc)) => *acc += c,
                    None => row.push((s.index, c.clone())),
                }
            }
            last_terms.push(row);
        }
        self.layers.truncate(top);
        let width = |l: usize, layers: &[Vec<Gate>], input_dim: usize| {
            if l == 0 {
                input_dim
            } else {
                layers[l - 1].len()
            }
        };
        let mut ffn_layers = Vec::with_capacity(top + 1);
        for (l, gates) in self.layers.iter().enumerate() {
            let mut w = RatMat::zeros(gates.len(), width(l, &self.layers, self.input_dim));
            let mut b = Vec::with_capacity(gates.len());
            for (r, g) in gates.iter().enumerate() {
                for (c, x) in &g.terms {
                    w.add_to(r, *c, x);
                }
                b.push(g.bias.clone());
            }
            ffn_layers.push(FfnLayer::new(w, RatVec::new(b))?);
        }
        let mut last = RatMat::zeros(outputs.len(), width(top, &self.layers, self.input_dim));
        for (r, row) in last_terms.into_iter().enumerate() {
            for (c, x) in row {
                last.add_to(r, c, &x);
            }
        }
        let bias = RatVec::new(outputs.iter().map(|o| o.bias.clone()).collect());
        ffn_layers.push(FfnLayer::new(last, bias)?);
        Ffn::new(ffn_layers, activate_last)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rat {
        Rat::frac(p, q)
    }

    #[test]
    fn and_gate_with_lift() {
        let mut c = Circuit::new(2);
        let (a, b) = (c.input(0), c.input(1));
        let and = c.gate(&[(a, Rat::one()), (b, Rat::one())], -Rat::one());
        let deeper = c.gate(&[(and, Rat::one())], Rat::zero());
        let ffn = c
            .finish(&[Output::of(deeper), Output::of(a)], true)
            .unwrap();
        assert_eq!(ffn.depth(), 3);
        for (x, y) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let out = ffn.apply(&RatVec::from_ints(&[x, y])).unwrap();
            assert_eq!(out, RatVec::from_ints(&[x * y, x]));
        }
    }

    #[test]
    fn split_reconstructs_wide_values() {
        let mut c = Circuit::new(1);
        let terms = c.split_terms(0, &r(-5, 2), &r(7, 3), &Rat::one());
        let ffn = c.finish(&[Output::new(terms, Rat::zero())], false).unwrap();
        assert_eq!(ffn.depth(), 2);
        for x in [r(-5, 2), r(-1, 3), Rat::zero(), r(1, 2), r(7, 3), Rat::int(2)] {
            let out = ffn.apply(&RatVec::new(vec![x.clone()])).unwrap();
            assert_eq!(out.get(0), &x);
        }
    }

    #[test]
    fn purely_affine_outputs_make_one_layer() {
        let c = Circuit::new(2);
        let (a, b) = (c.input(0), c.input(1));
        let out = Output::new(vec![(a, Rat::int(3)), (b, Rat::int(-1))], r(1, 2));
        let ffn = c.finish(&[out], false).unwrap();
        assert_eq!(ffn.depth(), 1);
        let y = ffn.apply(&RatVec::from_ints(&[2, 5])).unwrap();
        assert_eq!(y.get(0), &r(3, 2));
    }
}
