use crate::error::{Error, Result};
use crate::numeric::{sigma, Rat};

/// Cantor code of a stack with digits `0..radix`:
/// `Ψ = Σ_i (2a_i + 1) / (2·radix)^i`, with `a_1` the top.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CantorCode {
    radix: usize,
}

impl CantorCode {
    pub const BINARY: CantorCode = CantorCode { radix: 2 };

    pub fn new(radix: usize) -> Result<Self> {
        if radix < 2 {
            return Err(Error::InvalidSpec(format!("stack radix {radix} < 2")));
        }
        Ok(CantorCode { radix })
    }

    pub fn radix(&self) -> usize {
        self.radix
    }

    pub fn base(&self) -> Rat {
        Rat::from(2 * self.radix)
    }

    /// Value added by a push of digit `a`: `(2a + 1) / base`.
    pub fn digit_weight(&self, a: usize) -> Rat {
        Rat::from(2 * a + 1) / self.base()
    }

    fn check_digit(&self, a: usize) -> Result<()> {
        if a >= self.radix {
            return Err(Error::InvalidInput(format!("digit {a} outside radix {}", self.radix)));
        }
        Ok(())
    }

    /// `digits[0]` is the top of the stack.
    pub fn encode(&self, digits: &[usize]) -> Result<Rat> {
        let mut psi = Rat::zero();
        for &a in digits.iter().rev() {
            psi = self.push(&psi, a)?;
        }
        Ok(psi)
    }

    pub fn push(&self, psi: &Rat, a: usize) -> Result<Rat> {
        self.check_digit(a)?;
        Ok(psi / self.base() + self.digit_weight(a))
    }

    /// `σ(base·Ψ − 2a)`: 1 iff the top digit is at least `a` (for `a ≥ 1`),
    /// and for `a = 0` the nonempty indicator.
    pub fn step(&self, psi: &Rat, a: usize) -> Rat {
        sigma(&(self.base() * psi - Rat::from(2 * a)))
    }

    pub fn nonempty(&self, psi: &Rat) -> Rat {
        self.step(psi, 0)
    }

    pub fn top(&self, psi: &Rat) -> Option<usize> {
        if self.nonempty(psi).is_zero() {
            return None;
        }
        Some((1..self.radix).filter(|&a| self.step(psi, a).is_one()).count())
    }

    pub fn pop(&self, psi: &Rat) -> Result<(Rat, usize)> {
        let a = self.top(psi).ok_or(Error::StackUnderflow)?;
        Ok((self.base() * psi - Rat::from(2 * a + 1), a))
    }

    /// Digits top first; fails on values that are not finite codes.
    pub fn decode(&self, psi: &Rat) -> Result<Vec<usize>> {
        let limit = psi.denom().bits() as usize + 1;
        let mut digits = Vec::new();
        let mut cur = psi.clone();
        while !cur.is_zero() {
            if digits.len() > limit || cur.is_negative() || cur >= Rat::one() {
                return Err(Error::InvalidInput(format!("{psi} is not a stack code")));
            }
            let (rest, a) = self.pop(&cur)?;
            let slack = self.base() * &cur - Rat::from(2 * a + 1);
            if slack.is_negative() {
                return Err(Error::InvalidInput(format!("{psi} is not a stack code")));
            }
            digits.push(a);
            cur = rest;
        }
        Ok(digits)
    }
}

pub fn stack_encode(bits: &[u8]) -> Result<Rat> {
    let digits: Vec<usize> = bits.iter().map(|&b| b as usize).collect();
    CantorCode::BINARY.encode(&digits)
}

pub fn stack_push(psi: &Rat, bit: u8) -> Result<Rat> {
    CantorCode::BINARY.push(psi, bit as usize)
}

pub fn stack_pop(psi: &Rat) -> Result<(Rat, u8)> {
    CantorCode::BINARY.pop(psi).map(|(r, a)| (r, a as u8))
}

/// `σ(4Ψ − 2)`.
pub fn stack_top(psi: &Rat) -> Rat {
    CantorCode::BINARY.step(psi, 1)
}

/// `σ(4Ψ)`.
pub fn stack_nonempty(psi: &Rat) -> Rat {
    CantorCode::BINARY.nonempty(psi)
}

pub fn stack_decode(psi: &Rat) -> Result<Vec<u8>> {
    Ok(CantorCode::BINARY
        .decode(psi)?
        .into_iter()
        .map(|a| a as u8)
        .collect())
}
