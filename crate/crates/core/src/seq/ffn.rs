use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::numeric::{affine, sigma, Rat, RatMat, RatVec};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FfnLayer {
    #[serde(rename = "W")]
    pub w: RatMat,
    pub b: RatVec,
}

impl FfnLayer {
    pub fn new(w: RatMat, b: RatVec) -> Result<Self> {
        check_dim("layer bias", w.rows(), b.dim())?;
        Ok(FfnLayer { w, b })
    }
}

/// Stack of affine layers, each followed by σ except possibly the last one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FfnJson")]
pub struct Ffn {
    layers: Vec<FfnLayer>,
    activate_last: bool,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FfnJson {
    Full {
        layers: Vec<FfnLayer>,
        #[serde(default = "yes")]
        activate_last: bool,
    },
    Bare(Vec<FfnLayer>),
}

fn yes() -> bool {
    true
}

impl TryFrom<FfnJson> for Ffn {
    type Error = Error;

    fn try_from(raw: FfnJson) -> Result<Self> {
        match raw {
            FfnJson::Full { layers, activate_last } => Ffn::new(layers, activate_last),
            FfnJson::Bare(layers) => Ffn::new(layers, true),
        }
    }
}

/// Closed interval `[lo, hi]` per coordinate.
pub type Bounds = Vec<(Rat, Rat)>;

impl Ffn {
    pub fn new(layers: Vec<FfnLayer>, activate_last: bool) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidSpec("feed-forward network has no layers".into()));
        }
        for (i, l) in layers.iter().enumerate() {
            check_dim(&format!("layer {i} bias"), l.w.rows(), l.b.dim())?;
            if i > 0 {
                check_dim(&format!("layer {i} input"), layers[i - 1].w.rows(), l.w.cols())?;
            }
        }
        Ok(Ffn { layers, activate_last })
    }

    /// Single `d x d` zero layer without activation.
    pub fn zero(d: usize) -> Self {
        Ffn {
            layers: vec![FfnLayer {
                w: RatMat::zeros(d, d),
                b: RatVec::zeros(d),
            }],
            activate_last: false,
        }
    }

    /// Single activated identity layer, i.e. `σ` itself.
    pub fn sigma_identity(d: usize) -> Self {
        Ffn {
            layers: vec![FfnLayer {
                w: RatMat::identity(d),
                b: RatVec::zeros(d),
            }],
            activate_last: true,
        }
    }

    pub fn layers(&self) -> &[FfnLayer] {
        &self.layers
    }

    pub fn activate_last(&self) -> bool {
        self.activate_last
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn in_dim(&self) -> usize {
        self.layers[0].w.cols()
    }

    pub fn out_dim(&self) -> usize {
        self.layers.last().expect("nonempty").w.rows()
    }

    /// One unactivated affine layer: the output is unbounded.
    pub fn is_affine(&self) -> bool {
        self.layers.len() == 1 && !self.activate_last
    }

    fn activated(&self, i: usize) -> bool {
        i + 1 < self.layers.len() || self.activate_last
    }

    pub fn apply(&self, x: &RatVec) -> Result<RatVec> {
        let mut v = x.clone();
        for (i, l) in self.layers.iter().enumerate() {
            v = affine(&l.w, &v, &l.b)?;
            if self.activated(i) {
                v = v.map_sigma();
            }
        }
        Ok(v)
    }

    /// Interval image of the box `input`.
    pub fn output_bounds(&self, input: &[(Rat, Rat)]) -> Result<Bounds> {
        check_dim("bounds input", self.in_dim(), input.len())?;
        let mut cur: Bounds = input.to_vec();
        for (i, l) in self.layers.iter().enumerate() {
            let mut next = affine_bounds(&l.w, &l.b, &cur);
            if self.activated(i) {
                next = next.into_iter().map(|(lo, hi)| (sigma(&lo), sigma(&hi))).collect();
            }
            cur = next;
        }
        Ok(cur)
    }
}

pub(crate) fn affine_bounds(w: &RatMat, b: &RatVec, input: &[(Rat, Rat)]) -> Bounds {
    (0..w.rows())
        .map(|r| {
            let mut lo = b.get(r).clone();
            let mut hi = b.get(r).clone();
            for (c, x) in w.row_entries(r) {
                let (a, z) = &input[*c];
                if x.is_positive() {
                    lo += &(x * a);
                    hi += &(x * z);
                } else {
                    lo += &(x * z);
                    hi += &(x * a);
                }
            }
            (lo, hi)
        })
        .collect()
}
