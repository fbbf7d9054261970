//! Line-oriented text formats read and written by the CLI.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::holomorph::Pair;
use crate::orbit::OrbitProfile;
use crate::platform::{key_values, CayleyTable, Element, Endomorphism, Platform};
use crate::protocol::{SdlpInstance, Transcript};

pub const TRANSCRIPT_FORMAT: &str = "spdh-v1";
pub const INSTANCE_FORMAT: &str = "sdlp-v1";
pub const PROFILE_FORMAT: &str = "orbit-v1";

/// A parsed platform file with its endomorphism and optional base element.
#[derive(Debug, Clone)]
pub struct PlatformSpec {
    pub platform: Arc<Platform>,
    pub endo: Endomorphism,
    pub g: Option<Element>,
}

impl PlatformSpec {
    /// Pairs the platform with `g`, falling back to the file's own `g`.
    pub fn pair(&self, g: Option<Element>) -> Result<Pair> {
        let g = g.or_else(|| self.g.clone()).ok_or_else(|| Error::Precondition("no base element g given".into()))?;
        Pair::new(self.platform.clone(), g, self.endo.clone())
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !(l.starts_with('#') && !l.starts_with("#planted")))
}

/// Parses a Cayley table file or a one-line matrix config.
///
/// Cayley files: `cayley n=<size>`, `identity=<i>`, `n` rows of `n` indices, then
/// `endo=<n indices>`, and optionally `g=<index>`. Matrix configs:
/// `matrix d=<d> m=<m> [ext=<k>] [bound=<N>] endo=inner h=<hex> | endo=frobenius [e=<k>] | endo=identity`,
/// optionally followed by `g=<hex>` on the same or the next line.
pub fn parse_platform_file(text: &str) -> Result<PlatformSpec> {
    let mut lines = content_lines(text).peekable();
    let (line_no, first) = lines.next().ok_or_else(|| Error::parse(1, "empty platform file"))?;
    match first.split_whitespace().next() {
        Some("cayley") => parse_cayley(line_no, first, lines),
        Some("matrix") => parse_matrix(line_no, first, lines),
        _ => Err(Error::parse(line_no, "expected `cayley` or `matrix` header")),
    }
}

fn indices(line: usize, text: &str, expect: usize) -> Result<Vec<u32>> {
    let v = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|w| !w.is_empty())
        .map(|w| w.parse::<u32>().map_err(|_| Error::parse(line, format!("bad index `{w}`"))))
        .collect::<Result<Vec<_>>>()?;
    if v.len() != expect {
        return Err(Error::parse(line, format!("expected {expect} indices, found {}", v.len())));
    }
    Ok(v)
}

fn field<'a>(line: usize, text: &'a str, key: &str) -> Result<&'a str> {
    text.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .map(str::trim)
        .ok_or_else(|| Error::parse(line, format!("expected `{key}=`")))
}

fn parse_cayley<'a>(
    line_no: usize,
    header: &str,
    mut lines: impl Iterator<Item = (usize, &'a str)>,
) -> Result<PlatformSpec> {
    let kv = key_values(header.split_whitespace().skip(1))?;
    let n = match kv.as_slice() {
        [(k, v)] if k == "n" => v.parse::<u32>().map_err(|_| Error::parse(line_no, "bad size"))?,
        _ => return Err(Error::parse(line_no, "header must be `cayley n=<size>`")),
    };
    let mut next = |what: &str| lines.next().ok_or_else(|| Error::parse(line_no, format!("missing {what}")));
    let (l, text) = next("identity line")?;
    let identity = field(l, text, "identity")?.parse::<u32>().map_err(|_| Error::parse(l, "bad identity"))?;
    let mut table = Vec::with_capacity((n as usize) * (n as usize));
    for _ in 0..n {
        let (l, text) = next("table row")?;
        table.extend(indices(l, text, n as usize)?);
    }
    let (l, text) = next("endo line")?;
    let map = indices(l, field(l, text, "endo")?, n as usize)?;
    let table = CayleyTable::new(n, identity, table)?;
    let platform = Arc::new(Platform::Cayley(table));
    let endo = Endomorphism::table(map);
    endo.check(&platform)?;
    let g = match lines.next() {
        Some((l, text)) => {
            let idx = field(l, text, "g")?.parse::<u32>().map_err(|_| Error::parse(l, "bad g index"))?;
            Some(platform.cayley().unwrap().element(idx)?)
        }
        None => None,
    };
    if let Some((l, _)) = lines.next() {
        return Err(Error::parse(l, "unexpected trailing line"));
    }
    Ok(PlatformSpec { platform, endo, g })
}

fn parse_matrix<'a>(
    line_no: usize,
    first: &str,
    mut lines: impl Iterator<Item = (usize, &'a str)>,
) -> Result<PlatformSpec> {
    let (platform, extras) = Platform::parse_config_with_extras(first)?;
    let platform = Arc::new(platform);
    let get = |key: &str| extras.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
    for (k, _) in &extras {
        if !matches!(k.as_str(), "endo" | "h" | "e" | "g") {
            return Err(Error::parse(line_no, format!("unknown key `{k}`")));
        }
    }
    let endo = match get("endo") {
        Some("inner") => {
            let h = get("h").ok_or_else(|| Error::parse(line_no, "inner endomorphism needs h=<hex>"))?;
            Endomorphism::inner(&platform, platform.element_from_hex(h)?)?
        }
        Some("frobenius") => {
            let e = get("e").unwrap_or("1").parse::<u32>().map_err(|_| Error::parse(line_no, "bad exponent"))?;
            Endomorphism::frobenius(&platform, e)?
        }
        Some("identity") | None => Endomorphism::identity(&platform),
        Some(other) => return Err(Error::parse(line_no, format!("unknown endo kind `{other}`"))),
    };
    let mut g = get("g").map(|h| platform.element_from_hex(h)).transpose()?;
    if let Some((l, text)) = lines.next() {
        if g.is_some() {
            return Err(Error::parse(l, "g given twice"));
        }
        g = Some(platform.element_from_hex(field(l, text, "g")?)?);
    }
    if let Some((l, _)) = lines.next() {
        return Err(Error::parse(l, "unexpected trailing line"));
    }
    Ok(PlatformSpec { platform, endo, g })
}

/// Renders a Cayley platform file.
pub fn write_cayley_file(table: &CayleyTable, endo: &[u32], g: Option<u32>) -> String {
    let n = table.size() as usize;
    let mut out = format!("cayley n={n}\nidentity={}\n", table.identity_index());
    for row in table.table().chunks(n) {
        let row: Vec<String> = row.iter().map(u32::to_string).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    let map: Vec<String> = endo.iter().map(u32::to_string).collect();
    out.push_str(&format!("endo={}\n", map.join(" ")));
    if let Some(g) = g {
        out.push_str(&format!("g={g}\n"));
    }
    out
}

/// `key=value` lines, each key at most once, consumed by name.
struct Fields<'a> {
    entries: Vec<(usize, &'a str, &'a str)>,
    planted: Option<(usize, &'a str)>,
}

impl<'a> Fields<'a> {
    fn parse(text: &'a str) -> Result<Self> {
        let mut entries: Vec<(usize, &str, &str)> = Vec::new();
        let mut planted = None;
        for (line, l) in content_lines(text) {
            if let Some(rest) = l.strip_prefix("#planted") {
                if planted.is_some() {
                    return Err(Error::parse(line, "duplicate #planted section"));
                }
                planted = Some((line, rest.trim()));
                continue;
            }
            let (k, v) = l.split_once('=').ok_or_else(|| Error::parse(line, "expected key=value"))?;
            if entries.iter().any(|(_, key, _)| *key == k) {
                return Err(Error::parse(line, format!("duplicate key `{k}`")));
            }
            entries.push((line, k, v));
        }
        Ok(Fields { entries, planted })
    }

    fn take(&mut self, key: &str) -> Result<(usize, &'a str)> {
        let pos = self
            .entries
            .iter()
            .position(|(_, k, _)| *k == key)
            .ok_or_else(|| Error::parse(0, format!("missing `{key}`")))?;
        let (line, _, v) = self.entries.remove(pos);
        Ok((line, v))
    }

    fn take_u64(&mut self, key: &str) -> Result<u64> {
        let (line, v) = self.take(key)?;
        v.parse().map_err(|_| Error::parse(line, format!("bad integer for `{key}`")))
    }

    fn expect_format(&mut self, format: &str) -> Result<()> {
        let (line, v) = self.take("format")?;
        if v != format {
            return Err(Error::parse(line, format!("expected format={format}, found {v}")));
        }
        Ok(())
    }

    fn pair(&mut self) -> Result<Pair> {
        let (_, config) = self.take("platform")?;
        let platform = Arc::new(Platform::parse_config(config)?);
        let (_, g) = self.take("g")?;
        let g = platform.element_from_hex(g)?;
        let (_, endo) = self.take("endo")?;
        let endo = Endomorphism::parse_descriptor(&platform, endo)?;
        Pair::new(platform, g, endo)
    }

    fn element(&mut self, pair: &Pair, key: &str) -> Result<Element> {
        let (_, v) = self.take(key)?;
        pair.platform().element_from_hex(v)
    }

    fn planted(&self, keys: &[&str]) -> Result<Option<Vec<u64>>> {
        let Some((line, text)) = self.planted else { return Ok(None) };
        let kv = key_values(text.split_whitespace()).map_err(|_| Error::parse(line, "bad #planted section"))?;
        let mut out = Vec::new();
        for key in keys {
            let v = kv
                .iter()
                .find(|(k, _)| k == key)
                .ok_or_else(|| Error::parse(line, format!("#planted missing `{key}`")))?;
            out.push(v.1.parse().map_err(|_| Error::parse(line, format!("bad planted `{key}`")))?);
        }
        if kv.len() != keys.len() {
            return Err(Error::parse(line, "unexpected key in #planted section"));
        }
        Ok(Some(out))
    }

    fn finish(self) -> Result<()> {
        match self.entries.first() {
            Some((line, k, _)) => Err(Error::parse(*line, format!("unknown key `{k}`"))),
            None => Ok(()),
        }
    }
}

fn pair_header(format: &str, pair: &Pair) -> String {
    format!(
        "format={format}\nplatform={}\ng={}\nendo={}\n",
        pair.platform().config_string(),
        pair.g().to_hex(),
        pair.endo().descriptor()
    )
}

/// Serializes a transcript; the planted section appears only when present.
pub fn write_transcript(t: &Transcript) -> String {
    let mut out = pair_header(TRANSCRIPT_FORMAT, &t.pair);
    out.push_str(&format!("A={}\nB={}\n", t.a.to_hex(), t.b.to_hex()));
    if let Some((x, y)) = t.planted {
        out.push_str(&format!("#planted x={x} y={y}\n"));
    }
    out
}

pub fn parse_transcript(text: &str) -> Result<Transcript> {
    let mut f = Fields::parse(text)?;
    f.expect_format(TRANSCRIPT_FORMAT)?;
    let pair = f.pair()?;
    let a = f.element(&pair, "A")?;
    let b = f.element(&pair, "B")?;
    let planted = f.planted(&["x", "y"])?.map(|v| (v[0], v[1]));
    f.finish()?;
    Ok(Transcript { pair, a, b, planted })
}

/// Serializes an SDLP instance, writing the planted answer only if `with_planted`.
pub fn write_instance(inst: &SdlpInstance, with_planted: bool) -> String {
    let mut out = pair_header(INSTANCE_FORMAT, &inst.pair);
    out.push_str(&format!("target={}\nbound={}\n", inst.target.to_hex(), inst.bound));
    if let (true, Some(x)) = (with_planted, inst.planted) {
        out.push_str(&format!("#planted x={x}\n"));
    }
    out
}

pub fn parse_instance(text: &str) -> Result<SdlpInstance> {
    let mut f = Fields::parse(text)?;
    f.expect_format(INSTANCE_FORMAT)?;
    let pair = f.pair()?;
    let target = f.element(&pair, "target")?;
    let bound = f.take_u64("bound")?;
    let planted = f.planted(&["x"])?.map(|v| v[0]);
    f.finish()?;
    Ok(SdlpInstance { pair, target, bound, planted })
}

/// Serializes a pair with its orbit profile.
pub fn write_profile(pair: &Pair, profile: &OrbitProfile) -> String {
    let mut out = pair_header(PROFILE_FORMAT, pair);
    out.push_str(&format!(
        "n={}\nr={}\ntotal={}\nanchor={}\n",
        profile.n,
        profile.r,
        profile.total(),
        profile.cycle_anchor.to_hex()
    ));
    out
}

pub fn parse_profile(text: &str) -> Result<(Pair, OrbitProfile)> {
    let mut f = Fields::parse(text)?;
    f.expect_format(PROFILE_FORMAT)?;
    let pair = f.pair()?;
    let n = f.take_u64("n")?;
    let r = f.take_u64("r")?;
    let total = f.take_u64("total")?;
    let cycle_anchor = f.element(&pair, "anchor")?;
    f.finish()?;
    if n == 0 || r == 0 {
        return Err(Error::parse(0, "n and r must be positive"));
    }
    let profile = OrbitProfile { n, r, cycle_anchor };
    if total != profile.total() {
        return Err(Error::parse(0, "total must equal n + r - 1"));
    }
    if pair.s_at(n) != profile.cycle_anchor {
        return Err(Error::parse(0, "anchor is not s(n)"));
    }
    Ok((pair, profile))
}
