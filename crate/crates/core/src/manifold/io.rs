use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{tri_index, tri_len, Branch, ManifoldSeries};
use crate::error::{Error, Result};
use crate::lattice::ModelParams;

/// One coefficient block; `a[i - 1]` is component `i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct Block {
    n: usize,
    m: usize,
    a: [f64; 4],
}

#[derive(Serialize, Deserialize)]
struct SeriesDocument {
    params: ModelParams,
    branch: Branch,
    order: usize,
    rates: [f64; 2],
    scale: [f64; 2],
    coefficients: Vec<Block>,
}

impl Serialize for ManifoldSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut coefficients = Vec::with_capacity(self.coeffs.len());
        for d in 0..=self.order {
            for n in (0..=d).rev() {
                let m = d - n;
                coefficients.push(Block {
                    n,
                    m,
                    a: self.coeffs[tri_index(n, m)],
                });
            }
        }
        SeriesDocument {
            params: self.params,
            branch: self.branch,
            order: self.order,
            rates: self.rates,
            scale: self.scale,
            coefficients,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ManifoldSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let doc = SeriesDocument::deserialize(d)?;
        let mut coeffs = vec![[0.0; 4]; tri_len(doc.order)];
        let mut seen = vec![false; coeffs.len()];
        for b in doc.coefficients {
            if b.n + b.m > doc.order {
                return Err(D::Error::custom(format!(
                    "block ({}, {}) exceeds order {}",
                    b.n, b.m, doc.order
                )));
            }
            let idx = tri_index(b.n, b.m);
            coeffs[idx] = b.a;
            seen[idx] = true;
        }
        if !seen.iter().all(|&s| s) {
            return Err(D::Error::custom("coefficient table is incomplete"));
        }
        Ok(ManifoldSeries {
            branch: doc.branch,
            order: doc.order,
            rates: doc.rates,
            scale: doc.scale,
            params: doc.params,
            coeffs,
        })
    }
}

impl ManifoldSeries {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer(out, self).map_err(Error::from)
    }

    pub fn read_json<R: Read>(input: R) -> Result<Self> {
        serde_json::from_reader(input).map_err(Error::from)
    }
}
