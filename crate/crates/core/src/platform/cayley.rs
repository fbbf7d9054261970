use crate::error::{Error, Result};

use super::{fnv1a, Element, PlatformId};

/// Largest Cayley table accepted.
pub const MAX_CAYLEY_SIZE: u32 = 4096;

/// A finite monoid given by its full multiplication table.
///
/// Elements are the indices `0..size`; row `a` of the table holds the products `a·b`.
/// Construction only checks the table's shape. The algebraic laws are checked by
/// [`super::validate_platform`], so deliberately broken tables can be built and diagnosed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyTable {
    size: u32,
    identity: u32,
    table: Vec<u32>,
    width: usize,
    id: PlatformId,
}

impl CayleyTable {
    pub fn new(size: u32, identity: u32, table: Vec<u32>) -> Result<Self> {
        if size == 0 || size > MAX_CAYLEY_SIZE {
            return Err(Error::InvalidPlatform(format!("cayley size {size} outside 1..={MAX_CAYLEY_SIZE}")));
        }
        if table.len() != (size as usize) * (size as usize) {
            return Err(Error::InvalidPlatform(format!(
                "cayley table has {} entries, expected {}",
                table.len(),
                size as usize * size as usize
            )));
        }
        if identity >= size {
            return Err(Error::InvalidPlatform(format!("identity index {identity} out of range")));
        }
        if let Some(bad) = table.iter().find(|&&v| v >= size) {
            return Err(Error::InvalidPlatform(format!("table entry {bad} out of range")));
        }
        let width = index_width(size);
        let mut bytes = Vec::with_capacity(table.len() * 4 + 16);
        bytes.extend_from_slice(b"cayley");
        bytes.extend_from_slice(&size.to_be_bytes());
        bytes.extend_from_slice(&identity.to_be_bytes());
        for v in &table {
            bytes.extend_from_slice(&v.to_be_bytes());
        }
        Ok(CayleyTable { size, identity, table, width, id: PlatformId(fnv1a(&bytes)) })
    }

    /// Builds the table from a product function on indices.
    pub fn from_fn(size: u32, identity: u32, mut product: impl FnMut(u32, u32) -> u32) -> Result<Self> {
        let mut table = Vec::with_capacity(size as usize * size as usize);
        for a in 0..size {
            for b in 0..size {
                table.push(product(a, b));
            }
        }
        Self::new(size, identity, table)
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn identity_index(&self) -> u32 {
        self.identity
    }

    pub fn id(&self) -> PlatformId {
        self.id
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn product(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize * self.size as usize + b as usize]
    }

    /// Row-major view of the table.
    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn element(&self, index: u32) -> Result<Element> {
        if index >= self.size {
            return Err(Error::Decode(format!("index {index} out of range for size {}", self.size)));
        }
        Ok(self.element_unchecked(index))
    }

    pub(crate) fn element_unchecked(&self, index: u32) -> Element {
        let be = index.to_be_bytes();
        Element::from_parts(self.id, &be[4 - self.width..])
    }

    pub(crate) fn index_of(&self, a: &Element) -> u32 {
        a.payload().iter().fold(0u32, |acc, &b| (acc << 8) | b as u32)
    }

    pub(crate) fn decode(&self, bytes: &[u8]) -> Result<Element> {
        if bytes.len() != self.width {
            return Err(Error::Decode(format!("payload has {} bytes, expected {}", bytes.len(), self.width)));
        }
        let index = bytes.iter().fold(0u32, |acc, &b| (acc << 8) | b as u32);
        self.element(index)
    }

    /// Returns a copy with one table entry replaced; used to build corrupted fixtures.
    pub fn with_entry(&self, a: u32, b: u32, value: u32) -> Result<Self> {
        let mut table = self.table.clone();
        table[a as usize * self.size as usize + b as usize] = value;
        Self::new(self.size, self.identity, table)
    }
}

fn index_width(size: u32) -> usize {
    let max = size.saturating_sub(1);
    ((32 - max.leading_zeros()) as usize).div_ceil(8).max(1)
}
