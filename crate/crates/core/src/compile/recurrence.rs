//! The decoder FFN that advances the RNN by one step inside a Transformer
//! residual stream, shared by both compilers.

use crate::circuit::{Circuit, Output, Signal, Terms};
use crate::error::{Error, Result};
use crate::numeric::{affine, Rat};
use crate::seq::{affine_bounds, Alphabet, Bounds, RnnSpec};

/// A coordinate of the FFN input to be cancelled, with its value range.
#[derive(Debug, Clone)]
pub(crate) struct Cancel {
    pub coord: usize,
    pub lo: Rat,
    pub hi: Rat,
}

impl Cancel {
    pub fn unit(coord: usize) -> Self {
        Cancel {
            coord,
            lo: Rat::zero(),
            hi: Rat::one(),
        }
    }
}

pub(crate) fn hull(bounds: &mut [(Rat, Rat)], v: &[Rat]) {
    for ((lo, hi), x) in bounds.iter_mut().zip(v) {
        if x < lo {
            *lo = x.clone();
        }
        if x > hi {
            *hi = x.clone();
        }
    }
}

/// Per-coordinate range of `f_b` over the alphabet (markers included).
pub(crate) fn embedding_bounds(alphabet: &Alphabet) -> Bounds {
    let mut b = vec![(Rat::zero(), Rat::zero()); alphabet.d_b()];
    for i in 0..alphabet.len() {
        hull(&mut b, alphabet.embedding(i).as_slice());
    }
    b
}

/// Range of every hidden coordinate over all reachable states: `h0` joined
/// with the image of `g`.
pub(crate) fn hidden_bounds(rnn: &RnnSpec) -> Result<Bounds> {
    let g = &rnn.g;
    let mut b: Bounds = if g.activate_last() {
        vec![(Rat::zero(), Rat::one()); rnn.d_h]
    } else {
        let layers = g.layers();
        let last = &layers[layers.len() - 1];
        let unit = vec![(Rat::zero(), Rat::one()); last.w.cols()];
        affine_bounds(&last.w, &last.b, &unit)
    };
    hull(&mut b, rnn.h0.as_slice());
    Ok(b)
}

pub(crate) fn reject_affine(rnn: &RnnSpec) -> Result<()> {
    if rnn.g.is_affine() {
        return Err(Error::Unsupported(
            "g is a single affine layer without activation; its state is unbounded".into(),
        ));
    }
    Ok(())
}

/// FFN of width `d` whose output is `g(W_h h + W_x s + b) − h` on the
/// `h` block, `−s` on the `s` block, `−x` on each extra cancelled
/// coordinate, and zero elsewhere. Inputs `h` and `s` are read at offsets
/// `h_at` and `s_at`.
pub(crate) fn recurrence_ffn(
    rnn: &RnnSpec,
    alphabet: &Alphabet,
    d: usize,
    h_at: usize,
    s_at: usize,
    extra: &[Cancel],
) -> Result<crate::seq::Ffn> {
    reject_affine(rnn)?;
    let g = &rnn.g;
    let layers = g.layers();
    let first = &layers[0];
    let m_h = first.w.matmul(&rnn.w_h)?;
    let m_x = first.w.matmul(&rnn.w_x)?;
    let c1 = affine(&first.w, &rnn.b, &first.b)?;

    let mut c = Circuit::new(d);
    let mut units: Vec<Signal> = Vec::new();
    for r in 0..first.w.rows() {
        let mut terms: Terms = Vec::new();
        for (j, x) in m_h.row_entries(r) {
            terms.push((c.input(h_at + j), x.clone()));
        }
        for (j, x) in m_x.row_entries(r) {
            terms.push((c.input(s_at + j), x.clone()));
        }
        units.push(c.gate(&terms, c1.get(r).clone()));
    }
    let depth = layers.len();
    let mut g_out: Vec<Output> = Vec::new();
    for (i, layer) in layers.iter().enumerate().skip(1) {
        let rows: Vec<Output> = (0..layer.w.rows())
            .map(|r| {
                let terms = layer
                    .w
                    .row_entries(r)
                    .iter()
                    .map(|(j, x)| (units[*j], x.clone()))
                    .collect();
                Output::new(terms, layer.b.get(r).clone())
            })
            .collect();
        if i + 1 == depth && !g.activate_last() {
            g_out = rows;
        } else {
            units = rows.into_iter().map(|o| c.gate(&o.terms, o.bias)).collect();
        }
    }
    if g_out.is_empty() {
        g_out = units.iter().map(|&u| Output::of(u)).collect();
    }

    let hb = hidden_bounds(rnn)?;
    let sb = embedding_bounds(alphabet);
    let minus = -Rat::one();
    let mut outputs = vec![Output::zero(); d];
    for (i, mut o) in g_out.into_iter().enumerate() {
        let (lo, hi) = &hb[i];
        o.terms.extend(c.split_terms(h_at + i, lo, hi, &minus));
        outputs[h_at + i] = o;
    }
    for (j, (lo, hi)) in sb.iter().enumerate() {
        outputs[s_at + j] = Output::new(c.split_terms(s_at + j, lo, hi, &minus), Rat::zero());
    }
    for x in extra {
        outputs[x.coord] = Output::new(c.split_terms(x.coord, &x.lo, &x.hi, &minus), Rat::zero());
    }
    c.finish(&outputs, false)
}
