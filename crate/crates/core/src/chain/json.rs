//! JSON document form of [`ChainSpec`]. Complex numbers are `[re, im]` pairs.

use serde::{Deserialize, Serialize};

use super::{CentralBlock, ChainSpec};
use crate::error::{Error, Result};
use crate::C64;

/// Provenance carried alongside a spec.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecMeta {
    pub family: String,
    pub seed: Option<u64>,
}

type Pair = [f64; 2];

fn pair(z: C64) -> Pair {
    [z.re, z.im]
}

fn unpair(p: Pair) -> C64 {
    C64::new(p[0], p[1])
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CentralDoc {
    alpha: Pair,
    gamma: Pair,
    delta_upper: Pair,
    delta_lower: Pair,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecDoc {
    k: usize,
    a: Vec<Pair>,
    b: Vec<Pair>,
    c: Vec<Pair>,
    flip_mask: Vec<bool>,
    central: CentralDoc,
    edge_beta: Pair,
    meta: SpecMeta,
}

impl ChainSpec {
    /// Canonical pretty-printed JSON; stable under parse/serialize round trips.
    pub fn to_json(&self) -> String {
        let doc = SpecDoc {
            k: self.k,
            a: self.a.iter().copied().map(pair).collect(),
            b: self.b.iter().copied().map(pair).collect(),
            c: self.c.iter().copied().map(pair).collect(),
            flip_mask: self.flip_mask.clone(),
            central: CentralDoc {
                alpha: pair(self.central.alpha),
                gamma: pair(self.central.gamma),
                delta_upper: pair(self.central.delta_upper),
                delta_lower: pair(self.central.delta_lower),
            },
            edge_beta: pair(self.edge_beta),
            meta: self.meta.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("spec document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SpecDoc = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
        let to_c = |v: Vec<Pair>| v.into_iter().map(unpair).collect::<Vec<_>>();
        let central = CentralBlock::general(
            unpair(doc.central.alpha),
            unpair(doc.central.gamma),
            unpair(doc.central.delta_upper),
            unpair(doc.central.delta_lower),
        );
        let spec = ChainSpec::new(doc.k, to_c(doc.a), to_c(doc.b), to_c(doc.c), central)?
            .with_flip_mask(doc.flip_mask)?
            .with_edge_beta(unpair(doc.edge_beta))
            .with_meta(doc.meta);
        Ok(spec)
    }
}
