use smallvec::SmallVec;

use crate::error::{Error, Result};

use super::ring::Ring;
use super::{fnv1a, Element, PlatformId};

/// Matrix platforms with at most this many elements are treated as enumerable.
pub const MAX_ENUMERABLE_MATRICES: u64 = 4096;

pub(crate) type Entries = SmallVec<[u32; 16]>;

/// `d×d` matrices over a coefficient ring, under multiplication only.
///
/// Payload layout: row-major, each entry a fixed-width big-endian unsigned integer whose
/// width is the byte length of the largest entry value (`order - 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixSemigroup {
    dim: usize,
    ring: Ring,
    width: usize,
    size_bound: u64,
    id: PlatformId,
}

impl MatrixSemigroup {
    pub fn new(dim: usize, ring: Ring) -> Result<Self> {
        if dim == 0 || dim > 16 {
            return Err(Error::InvalidPlatform(format!("matrix dimension {dim} outside 1..=16")));
        }
        let max = ring.order() - 1;
        let width = ((32 - max.leading_zeros()) as usize).div_ceil(8).max(1);
        let mut ident = format!("matrix d={dim} q={}", ring.order());
        if let Ring::Galois(f) = &ring {
            ident.push_str(&format!(" p={} poly={:?}", f.characteristic(), f.modulus_poly()));
        }
        let id = PlatformId(fnv1a(ident.as_bytes()));
        let size_bound = element_count(dim, ring.order()).unwrap_or(u64::MAX);
        Ok(MatrixSemigroup { dim, ring, width, size_bound, id })
    }

    /// Overrides the default `q^(d²)` orbit size bound.
    pub fn with_size_bound(mut self, bound: u64) -> Self {
        self.size_bound = bound.max(1);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn id(&self) -> PlatformId {
        self.id
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn size_bound(&self) -> u64 {
        self.size_bound
    }

    /// Exact number of elements when it fits in a `u64`.
    pub fn element_count(&self) -> Option<u64> {
        element_count(self.dim, self.ring.order())
    }

    pub fn is_enumerable(&self) -> bool {
        self.element_count().is_some_and(|c| c <= MAX_ENUMERABLE_MATRICES)
    }

    pub fn payload_width(&self) -> usize {
        self.dim * self.dim * self.width
    }

    /// Builds an element from row-major entries, reducing nothing: entries must be in range.
    pub fn element(&self, entries: &[u32]) -> Result<Element> {
        if entries.len() != self.dim * self.dim {
            return Err(Error::Decode(format!("expected {} entries, got {}", self.dim * self.dim, entries.len())));
        }
        if let Some(bad) = entries.iter().find(|&&v| v >= self.ring.order()) {
            return Err(Error::Decode(format!("entry {bad} out of range")));
        }
        Ok(self.element_unchecked(entries))
    }

    /// Builds an element from signed entries reduced modulo `m` (only for `Z_m`).
    pub fn element_mod(&self, entries: &[i64]) -> Result<Element> {
        match self.ring {
            Ring::Modular { modulus } => {
                let reduced: Vec<u32> = entries.iter().map(|v| v.rem_euclid(modulus as i64) as u32).collect();
                self.element(&reduced)
            }
            Ring::Galois(_) => Err(Error::InvalidPlatform("element_mod requires a Z_m ring".into())),
        }
    }

    pub(crate) fn element_unchecked(&self, entries: &[u32]) -> Element {
        let mut payload: SmallVec<[u8; 32]> = SmallVec::with_capacity(entries.len() * self.width);
        for v in entries {
            let be = v.to_be_bytes();
            payload.extend_from_slice(&be[4 - self.width..]);
        }
        Element::from_parts(self.id, &payload)
    }

    pub(crate) fn entries(&self, a: &Element) -> Entries {
        a.payload().chunks_exact(self.width).map(|c| c.iter().fold(0u32, |acc, &b| (acc << 8) | b as u32)).collect()
    }

    pub fn entries_of(&self, a: &Element) -> Result<Vec<u32>> {
        if a.platform_id() != self.id {
            return Err(Error::PlatformMismatch);
        }
        Ok(self.entries(a).to_vec())
    }

    pub(crate) fn decode(&self, bytes: &[u8]) -> Result<Element> {
        if bytes.len() != self.payload_width() {
            return Err(Error::Decode(format!("payload has {} bytes, expected {}", bytes.len(), self.payload_width())));
        }
        let entries: Entries =
            bytes.chunks_exact(self.width).map(|c| c.iter().fold(0u32, |acc, &b| (acc << 8) | b as u32)).collect();
        self.element(&entries)
    }

    pub(crate) fn identity_entries(&self) -> Entries {
        let mut e: Entries = SmallVec::from_elem(0, self.dim * self.dim);
        for i in 0..self.dim {
            e[i * self.dim + i] = 1;
        }
        e
    }

    pub(crate) fn mul_entries(&self, a: &[u32], b: &[u32]) -> Entries {
        let d = self.dim;
        let mut out: Entries = SmallVec::from_elem(0, d * d);
        match self.ring {
            Ring::Modular { modulus } => {
                let m = modulus as u64;
                for i in 0..d {
                    for j in 0..d {
                        let mut acc = 0u64;
                        for k in 0..d {
                            acc = (acc + a[i * d + k] as u64 * b[k * d + j] as u64 % m) % m;
                        }
                        out[i * d + j] = acc as u32;
                    }
                }
            }
            Ring::Galois(_) => {
                let r = &self.ring;
                for i in 0..d {
                    for j in 0..d {
                        let mut acc = 0u32;
                        for k in 0..d {
                            acc = r.add(acc, r.mul(a[i * d + k], b[k * d + j]));
                        }
                        out[i * d + j] = acc;
                    }
                }
            }
        }
        out
    }

    pub(crate) fn frobenius_entries(&self, a: &[u32], t: u64) -> Entries {
        a.iter().map(|&v| self.ring.frobenius(v, t)).collect()
    }

    /// Determinant by cofactor expansion (ring operations only).
    pub fn determinant(&self, a: &Element) -> Result<u32> {
        if a.platform_id() != self.id {
            return Err(Error::PlatformMismatch);
        }
        let entries = self.entries(a);
        Ok(det(&self.ring, &entries, self.dim))
    }

    /// Inverse via the adjugate, if the determinant is a unit.
    pub fn inverse(&self, a: &Element) -> Result<Option<Element>> {
        if self.dim > 8 {
            return Err(Error::InvalidPlatform("matrix inversion supported up to dimension 8".into()));
        }
        let d = self.dim;
        let entries = self.entries(a);
        let Some(det_inv) = self.ring.inv(det(&self.ring, &entries, d)) else {
            return Ok(None);
        };
        if d == 1 {
            return Ok(Some(self.element_unchecked(&[det_inv])));
        }
        let mut inv: Entries = SmallVec::from_elem(0, d * d);
        for i in 0..d {
            for j in 0..d {
                let minor = minor(&entries, d, i, j);
                let mut c = det(&self.ring, &minor, d - 1);
                if (i + j) % 2 == 1 {
                    c = self.ring.neg(c);
                }
                // adj[j][i] = cofactor[i][j]
                inv[j * d + i] = self.ring.mul(c, det_inv);
            }
        }
        Ok(Some(self.element_unchecked(&inv)))
    }

    /// All elements in index order (entry digits base `q`, first entry most significant).
    pub(crate) fn enumerate(&self) -> Option<Vec<Element>> {
        let count = self.element_count()?;
        if count > MAX_ENUMERABLE_MATRICES {
            return None;
        }
        let q = self.ring.order() as u64;
        let n = self.dim * self.dim;
        Some(
            (0..count)
                .map(|mut idx| {
                    let mut entries: Entries = SmallVec::from_elem(0, n);
                    for slot in (0..n).rev() {
                        entries[slot] = (idx % q) as u32;
                        idx /= q;
                    }
                    self.element_unchecked(&entries)
                })
                .collect(),
        )
    }

    pub(crate) fn random_entries(&self, rng: &mut impl rand::Rng) -> Entries {
        let q = self.ring.order();
        (0..self.dim * self.dim).map(|_| rng.gen_range(0..q)).collect()
    }
}

fn element_count(dim: usize, q: u32) -> Option<u64> {
    (q as u64).checked_pow((dim * dim) as u32)
}

fn minor(a: &[u32], d: usize, row: usize, col: usize) -> Entries {
    let mut out = Entries::with_capacity((d - 1) * (d - 1));
    for i in (0..d).filter(|&i| i != row) {
        for j in (0..d).filter(|&j| j != col) {
            out.push(a[i * d + j]);
        }
    }
    out
}

fn det(ring: &Ring, a: &[u32], d: usize) -> u32 {
    match d {
        0 => 1,
        1 => a[0],
        2 => ring.sub(ring.mul(a[0], a[3]), ring.mul(a[1], a[2])),
        _ => {
            let mut acc = 0u32;
            for j in 0..d {
                if a[j] == 0 {
                    continue;
                }
                let term = ring.mul(a[j], det(ring, &minor(a, d, 0, j), d - 1));
                acc = if j % 2 == 0 { ring.add(acc, term) } else { ring.sub(acc, term) };
            }
            acc
        }
    }
}
