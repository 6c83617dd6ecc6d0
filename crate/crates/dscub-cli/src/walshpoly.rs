//! JSON input format for finite Walsh polynomials:
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "base": 2,
//!   "terms": [
//!     { "k": [0, 0], "re": 1.0, "im": 0.0 },
//!     { "k": [3, 1], "re": 0.25, "im": -0.5 }
//!   ]
//! }
//! ```

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use anyhow::Context;
use dscub::{WalshPolynomial, Wavenumber};
use num_complex::Complex64;
use serde::Deserialize;

#[derive(Deserialize)]
struct PolyFile {
    dimension: usize,
    base: u32,
    terms: Vec<TermSpec>,
}

#[derive(Deserialize)]
struct TermSpec {
    k: Vec<u64>,
    re: f64,
    im: f64,
}

pub fn load(path: &Path) -> anyhow::Result<WalshPolynomial> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let spec: PolyFile = serde_json::from_reader(BufReader::new(file))
        .with_context(|| format!("parsing {}", path.display()))?;
    if spec.base == 2 {
        let cap = 1u64 << dscub::digital::BASE2_PRECISION;
        for t in &spec.terms {
            if let Some(&kj) = t.k.iter().find(|&&kj| kj >= cap) {
                anyhow::bail!("wavenumber component {kj} exceeds the representable precision");
            }
        }
    }
    let terms = spec
        .terms
        .into_iter()
        .map(|t| (Wavenumber::new(t.k), Complex64::new(t.re, t.im)))
        .collect();
    WalshPolynomial::new(terms, spec.dimension, spec.base)
        .with_context(|| format!("validating {}", path.display()))
}
