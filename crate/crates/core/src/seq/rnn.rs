use serde::{Deserialize, Serialize};

use super::alphabet::{Alphabet, END};
use super::ffn::Ffn;
use crate::error::{check_dim, Error, Result};
use crate::numeric::{affine, require_square, Rat, RatMat, RatVec};

/// The run halts once `h[index] == target`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Halt {
    pub index: usize,
    pub target: Rat,
}

impl Halt {
    pub fn new(index: usize, target: Rat) -> Self {
        Halt { index, target }
    }

    pub fn reached(&self, h: &RatVec) -> bool {
        h.get(self.index) == &self.target
    }
}

/// `h_t = g(W_h h_{t-1} + W_x f_b(s_t) + b)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RnnJson", into = "RnnJson")]
pub struct RnnSpec {
    pub d_h: usize,
    pub d_b: usize,
    pub w_h: RatMat,
    pub w_x: RatMat,
    pub b: RatVec,
    pub g: Ffn,
    pub h0: RatVec,
    pub halt: Halt,
}

#[derive(Serialize, Deserialize)]
struct RnnJson {
    d_h: usize,
    d_b: usize,
    #[serde(rename = "W_h")]
    w_h: RatMat,
    #[serde(rename = "W_x")]
    w_x: RatMat,
    b: RatVec,
    g: Ffn,
    h0: RatVec,
    halt: Halt,
}

impl TryFrom<RnnJson> for RnnSpec {
    type Error = Error;

    fn try_from(r: RnnJson) -> Result<Self> {
        RnnSpec::new(r.d_h, r.d_b, r.w_h, r.w_x, r.b, r.g, r.h0, r.halt)
    }
}

impl From<RnnSpec> for RnnJson {
    fn from(r: RnnSpec) -> Self {
        RnnJson {
            d_h: r.d_h,
            d_b: r.d_b,
            w_h: r.w_h,
            w_x: r.w_x,
            b: r.b,
            g: r.g,
            h0: r.h0,
            halt: r.halt,
        }
    }
}

impl RnnSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        d_h: usize,
        d_b: usize,
        w_h: RatMat,
        w_x: RatMat,
        b: RatVec,
        g: Ffn,
        h0: RatVec,
        halt: Halt,
    ) -> Result<Self> {
        let spec = RnnSpec {
            d_h,
            d_b,
            w_h,
            w_x,
            b,
            g,
            h0,
            halt,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        require_square("W_h", &self.w_h, self.d_h)?;
        check_dim("W_x rows", self.d_h, self.w_x.rows())?;
        check_dim("W_x cols", self.d_b, self.w_x.cols())?;
        check_dim("b", self.d_h, self.b.dim())?;
        check_dim("g input", self.d_h, self.g.in_dim())?;
        check_dim("g output", self.d_h, self.g.out_dim())?;
        check_dim("h0", self.d_h, self.h0.dim())?;
        if self.halt.index >= self.d_h {
            return Err(Error::InvalidSpec(format!(
                "halt index {} outside d_h = {}",
                self.halt.index, self.d_h
            )));
        }
        Ok(())
    }

    /// Pre-activation `W_h h + W_x x + b`.
    pub fn preactivation(&self, h: &RatVec, x: &RatVec) -> Result<RatVec> {
        let hx = affine(&self.w_h, h, &self.b)?;
        hx.add(&self.w_x.matvec(x)?)
    }

    pub fn with_halt(&self, halt: Halt) -> Result<Self> {
        let mut s = self.clone();
        s.halt = halt;
        s.validate()?;
        Ok(s)
    }
}

pub fn rnn_step(spec: &RnnSpec, h: &RatVec, x: &RatVec) -> Result<RatVec> {
    spec.g.apply(&spec.preactivation(h, x)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RnnTrace {
    /// `h_0 .. h_T`.
    pub hidden_states: Vec<RatVec>,
    /// Symbol consumed at steps `1 ..= T`, with `$` padding past the input.
    pub consumed: Vec<String>,
    pub halted: bool,
    pub halt_step: Option<usize>,
}

/// Runs until the halt condition holds or `max_steps` steps were taken.
/// The input must end with `$`; it is padded with `$` afterwards.
pub fn rnn_run(spec: &RnnSpec, alphabet: &Alphabet, input: &[String], max_steps: usize) -> Result<RnnTrace> {
    check_dim("alphabet embedding width", spec.d_b, alphabet.d_b())?;
    alphabet.validate_input(input, true)?;
    let mut h = spec.h0.clone();
    let mut trace = RnnTrace {
        hidden_states: vec![h.clone()],
        consumed: Vec::new(),
        halted: false,
        halt_step: None,
    };
    if spec.halt.reached(&h) {
        trace.halted = true;
        trace.halt_step = Some(0);
        return Ok(trace);
    }
    for t in 1..=max_steps {
        let sym = input.get(t - 1).map_or(END, String::as_str);
        h = rnn_step(spec, &h, alphabet.embed(sym)?)?;
        trace.consumed.push(sym.to_string());
        trace.hidden_states.push(h.clone());
        if spec.halt.reached(&h) {
            trace.halted = true;
            trace.halt_step = Some(t);
            break;
        }
    }
    Ok(trace)
}
