//! Multipartite tensor-product shapes and bipartitions of the parties.

use crate::error::{Error, Result};

/// Local dimensions of a multipartite system, party 0 being the most
/// significant tensor factor in row-major index order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsystemShape {
    dims: Vec<usize>,
    total: usize,
}

impl SubsystemShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidShape("no parties".into()));
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidShape(format!("local dimension {d} < 2")));
        }
        let total = dims.iter().product();
        Ok(Self { dims, total })
    }

    /// Uniform shape with `k` parties of local dimension `d`.
    pub fn uniform(d: usize, k: usize) -> Result<Self> {
        Self::new(vec![d; k])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// Row-major stride of each party index.
    pub fn strides(&self) -> Vec<usize> {
        let k = self.dims.len();
        let mut s = vec![1usize; k];
        for p in (0..k.saturating_sub(1)).rev() {
            s[p] = s[p + 1] * self.dims[p + 1];
        }
        s
    }

    /// Decompose a global basis index into per-party digits.
    pub fn digits(&self, mut g: usize) -> Vec<usize> {
        let strides = self.strides();
        let mut out = vec![0usize; self.dims.len()];
        for (p, &s) in strides.iter().enumerate() {
            out[p] = g / s;
            g %= s;
        }
        out
    }

    pub fn index_of(&self, digits: &[usize]) -> usize {
        let strides = self.strides();
        digits.iter().zip(&strides).map(|(d, s)| d * s).sum()
    }
}

/// A two-block split of the parties. The stored block always contains
/// party 0, so each cut has a single canonical representation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bipartition {
    shape: SubsystemShape,
    block: Vec<usize>,
}

impl Bipartition {
    pub fn new(shape: SubsystemShape, mut block: Vec<usize>) -> Result<Self> {
        let k = shape.parties();
        if k < 2 {
            return Err(Error::NoBipartition(k));
        }
        block.sort_unstable();
        block.dedup();
        if block.is_empty() || block.len() == k {
            return Err(Error::InvalidBipartition(
                "block must be a nonempty proper subset".into(),
            ));
        }
        if block.iter().any(|&p| p >= k) {
            return Err(Error::InvalidBipartition("party index out of range".into()));
        }
        if !block.contains(&0) {
            // canonicalize: store the complement block, which contains party 0
            let comp: Vec<usize> = (0..k).filter(|p| !block.contains(p)).collect();
            block = comp;
        }
        Ok(Self { shape, block })
    }

    pub fn shape(&self) -> &SubsystemShape {
        &self.shape
    }

    /// Parties in the canonical block (contains party 0).
    pub fn block(&self) -> &[usize] {
        &self.block
    }

    pub fn complement(&self) -> Vec<usize> {
        (0..self.shape.parties())
            .filter(|p| !self.block.contains(p))
            .collect()
    }

    pub fn block_dim(&self) -> usize {
        self.block.iter().map(|&p| self.shape.dims()[p]).product()
    }

    pub fn complement_dim(&self) -> usize {
        self.shape.total() / self.block_dim()
    }

    /// Split a global index into (block index, complement index), both in
    /// the row-major order of the parties within each side.
    pub fn split_index(&self, g: usize) -> (usize, usize) {
        let digits = self.shape.digits(g);
        let mut ib = 0usize;
        for &p in &self.block {
            ib = ib * self.shape.dims()[p] + digits[p];
        }
        let mut ic = 0usize;
        for p in 0..self.shape.parties() {
            if !self.block.contains(&p) {
                ic = ic * self.shape.dims()[p] + digits[p];
            }
        }
        (ib, ic)
    }

    /// Inverse of [`split_index`](Self::split_index).
    pub fn join_index(&self, mut ib: usize, mut ic: usize) -> usize {
        let k = self.shape.parties();
        let mut digits = vec![0usize; k];
        for &p in self.block.iter().rev() {
            digits[p] = ib % self.shape.dims()[p];
            ib /= self.shape.dims()[p];
        }
        for p in (0..k).rev() {
            if !self.block.contains(&p) {
                digits[p] = ic % self.shape.dims()[p];
                ic /= self.shape.dims()[p];
            }
        }
        self.shape.index_of(&digits)
    }

    /// Label like `0|12` (block parties, bar, complement parties).
    pub fn label(&self) -> String {
        let b: String = self.block.iter().map(|p| p.to_string()).collect();
        let c: String = self.complement().iter().map(|p| p.to_string()).collect();
        format!("{b}|{c}")
    }

    /// Parse a label such as `0|12` or `0,1|2`. Only the left block is read;
    /// it is validated against the shape and canonicalized.
    pub fn parse(shape: &SubsystemShape, label: &str) -> Result<Self> {
        let left = label
            .split('|')
            .next()
            .ok_or_else(|| Error::Parse(format!("bad cut label {label:?}")))?;
        let mut block = Vec::new();
        if left.contains(',') {
            for tok in left.split(',') {
                let p: usize = tok
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad party index {tok:?}")))?;
                block.push(p);
            }
        } else {
            for ch in left.trim().chars() {
                let p = ch
                    .to_digit(10)
                    .ok_or_else(|| Error::Parse(format!("bad party digit {ch:?}")))?;
                block.push(p as usize);
            }
        }
        Bipartition::new(shape.clone(), block)
    }
}

/// All 2^(k-1) - 1 bipartitions of a k-party shape, in a fixed order.
pub fn enumerate_bipartitions(shape: &SubsystemShape) -> Result<Vec<Bipartition>> {
    let k = shape.parties();
    if k < 2 {
        return Err(Error::NoBipartition(k));
    }
    let mut out = Vec::with_capacity((1usize << (k - 1)) - 1);
    // subsets of {1, .., k-1} joined with party 0, excluding the full set
    for mask in 0..(1u64 << (k - 1)) {
        let mut block = vec![0usize];
        for p in 1..k {
            if mask & (1 << (p - 1)) != 0 {
                block.push(p);
            }
        }
        if block.len() == k {
            continue;
        }
        out.push(Bipartition::new(shape.clone(), block)?);
    }
    Ok(out)
}
