use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

use super::{Element, Platform};

/// Number of precomputed doubling levels for table endomorphisms (covers every `u64` power).
const DOUBLING_LEVELS: usize = 64;

/// A public endomorphism `φ` of a platform, with `φ^k` derivable for any `k ≥ 0`.
///
/// Powers are applied lazily: `φ^k(a)` never materializes the composed map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Endomorphism {
    /// Conjugation `a ↦ h_inv · a · h`. A genuine endomorphism only when `h · h_inv` is the
    /// identity; [`Endomorphism::check`] enforces this.
    Inner { h: Element, h_inv: Element },
    /// Entrywise `a ↦ a^(p^e)` on matrices over a field of characteristic `p`.
    Frobenius { exponent: u32 },
    /// Arbitrary function table on an enumerated platform.
    Table(Arc<EndoTable>),
}

/// Function table of an endomorphism of a Cayley platform, with doubling tables
/// `φ^(2^i)` for logarithmic-time powers.
#[derive(Clone)]
pub struct EndoTable {
    map: Vec<u32>,
    doublings: Vec<Vec<u32>>,
}

impl EndoTable {
    pub fn new(map: Vec<u32>) -> Self {
        let mut doublings = Vec::with_capacity(DOUBLING_LEVELS);
        let mut cur = map.clone();
        for _ in 0..DOUBLING_LEVELS {
            let next: Vec<u32> = cur.iter().map(|&v| cur[v as usize]).collect();
            doublings.push(std::mem::replace(&mut cur, next));
        }
        EndoTable { map, doublings }
    }

    pub fn map(&self) -> &[u32] {
        &self.map
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// `φ^k(index)`.
    pub fn power(&self, mut k: u64, mut index: u32) -> u32 {
        let mut level = 0;
        while k > 0 {
            if k & 1 == 1 {
                index = self.doublings[level][index as usize];
            }
            k >>= 1;
            level += 1;
        }
        index
    }
}

impl PartialEq for EndoTable {
    fn eq(&self, other: &Self) -> bool {
        self.map == other.map
    }
}

impl Eq for EndoTable {}

impl fmt::Debug for EndoTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EndoTable").field("map", &self.map).finish()
    }
}

impl Endomorphism {
    pub fn table(map: Vec<u32>) -> Self {
        Endomorphism::Table(Arc::new(EndoTable::new(map)))
    }

    /// The identity endomorphism of `platform`.
    pub fn identity(platform: &Platform) -> Self {
        match platform {
            Platform::Cayley(t) => Endomorphism::table((0..t.size()).collect()),
            Platform::Matrix(_) => {
                let id = platform.identity();
                Endomorphism::Inner { h: id.clone(), h_inv: id }
            }
        }
    }

    /// Conjugation by `h`, computing its inverse. Fails when `h` is not a unit.
    pub fn inner(platform: &Platform, h: Element) -> Result<Self> {
        platform.check(&h)?;
        let h_inv = platform.unit_inverse(&h)?.ok_or_else(Endomorphism::not_invertible)?;
        Ok(Endomorphism::Inner { h, h_inv })
    }

    /// Conjugation by `h` with a caller-supplied inverse, rejected unless the pair is
    /// genuinely inverse.
    pub fn conjugation(platform: &Platform, h: Element, h_inv: Element) -> Result<Self> {
        let e = Endomorphism::Inner { h, h_inv };
        e.check(platform)?;
        Ok(e)
    }

    pub fn frobenius(platform: &Platform, exponent: u32) -> Result<Self> {
        let e = Endomorphism::Frobenius { exponent };
        e.check(platform)?;
        Ok(e)
    }

    fn not_invertible() -> Error {
        Error::InvalidEndomorphism("conjugator is not invertible".into())
    }

    /// Structural validity: descriptor matches the platform and inner pairs are inverse.
    /// The homomorphism law itself is checked by [`super::validate_platform`].
    pub fn check(&self, platform: &Platform) -> Result<()> {
        match self {
            Endomorphism::Inner { h, h_inv } => {
                platform.check(h)?;
                platform.check(h_inv)?;
                let id = platform.identity();
                if platform.mul_unchecked(h, h_inv) != id || platform.mul_unchecked(h_inv, h) != id {
                    return Err(Error::InvalidEndomorphism("inner conjugator pair is not mutually inverse".into()));
                }
                Ok(())
            }
            Endomorphism::Frobenius { .. } => match platform {
                Platform::Matrix(m) if m.ring().field_characteristic().is_some() => Ok(()),
                Platform::Matrix(_) => {
                    Err(Error::InvalidEndomorphism("frobenius requires a field coefficient ring".into()))
                }
                Platform::Cayley(_) => {
                    Err(Error::InvalidEndomorphism("frobenius is only defined on matrix platforms".into()))
                }
            },
            Endomorphism::Table(t) => match platform {
                Platform::Cayley(c) => {
                    if t.len() != c.size() as usize {
                        return Err(Error::InvalidEndomorphism(format!(
                            "table has {} entries, platform has {} elements",
                            t.len(),
                            c.size()
                        )));
                    }
                    if t.map().iter().any(|&v| v >= c.size()) {
                        return Err(Error::InvalidEndomorphism("table value out of range".into()));
                    }
                    Ok(())
                }
                Platform::Matrix(_) => {
                    Err(Error::InvalidEndomorphism("function tables are only supported on cayley platforms".into()))
                }
            },
        }
    }

    /// `φ^k(a)`.
    pub fn apply(&self, platform: &Platform, k: u64, a: &Element) -> Result<Element> {
        platform.check(a)?;
        self.check(platform)?;
        Ok(self.apply_unchecked(platform, k, a))
    }

    pub(crate) fn apply_unchecked(&self, platform: &Platform, k: u64, a: &Element) -> Element {
        if k == 0 {
            return a.clone();
        }
        match (self, platform) {
            (Endomorphism::Inner { h, h_inv }, _) => {
                let left = platform.pow_unchecked(h_inv, k);
                let right = platform.pow_unchecked(h, k);
                platform.mul_unchecked(&platform.mul_unchecked(&left, a), &right)
            }
            (Endomorphism::Frobenius { exponent }, Platform::Matrix(m)) => {
                let t = (*exponent as u64 % m.ring().degree() as u64) * (k % m.ring().degree() as u64);
                let entries = m.frobenius_entries(&m.entries(a), t);
                m.element_unchecked(&entries)
            }
            (Endomorphism::Table(t), Platform::Cayley(c)) => c.element_unchecked(t.power(k, c.index_of(a))),
            _ => unreachable!("descriptor/platform pairing is validated on construction"),
        }
    }

    /// Text form used by transcript files: `inner h=<hex> hinv=<hex>`, `frobenius e=<k>`,
    /// or `table map=<i,i,...>`.
    pub fn descriptor(&self) -> String {
        match self {
            Endomorphism::Inner { h, h_inv } => format!("inner h={} hinv={}", h.to_hex(), h_inv.to_hex()),
            Endomorphism::Frobenius { exponent } => format!("frobenius e={exponent}"),
            Endomorphism::Table(t) => {
                let parts: Vec<String> = t.map().iter().map(u32::to_string).collect();
                format!("table map={}", parts.join(","))
            }
        }
    }

    /// Parses [`Endomorphism::descriptor`] output against `platform`.
    pub fn parse_descriptor(platform: &Platform, text: &str) -> Result<Self> {
        let mut words = text.split_whitespace();
        let kind = words.next().ok_or_else(|| Error::InvalidEndomorphism("empty descriptor".into()))?;
        let fields = super::key_values(words)?;
        let get = |key: &str| {
            fields
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| Error::InvalidEndomorphism(format!("{kind} descriptor missing `{key}`")))
        };
        let e = match kind {
            "inner" => {
                let h = platform.element_from_hex(get("h")?)?;
                let h_inv = platform.element_from_hex(get("hinv")?)?;
                Endomorphism::Inner { h, h_inv }
            }
            "frobenius" => {
                let exponent =
                    get("e")?.parse().map_err(|_| Error::InvalidEndomorphism("bad frobenius exponent".into()))?;
                Endomorphism::Frobenius { exponent }
            }
            "table" => {
                let map = get("map")?
                    .split(',')
                    .map(|v| v.trim().parse::<u32>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::InvalidEndomorphism("bad table entry".into()))?;
                Endomorphism::table(map)
            }
            other => return Err(Error::InvalidEndomorphism(format!("unknown kind `{other}`"))),
        };
        e.check(platform)?;
        Ok(e)
    }
}
