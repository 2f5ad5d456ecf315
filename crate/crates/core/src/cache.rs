//! JSON-lines persistence of Kazhdan-Lusztig tables.
//!
//! The first line is a [`CacheHeader`]. Each following line is one polynomial record
//! `{"w": [...], "y": [...], "p": [[exp, coeff], ...]}` with `P_{y,w}` written in `q = v^2`,
//! sorted by `(l(w), ShortLex w, l(y), ShortLex y)`. Optional structure-constant records
//! `{"x": [...], "y": [...], "h": [[z, poly], ...]}` follow the polynomials. Words list
//! generator labels.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::coxeter::{Ball, CoxeterDatum, TypeLabel};
use crate::error::{Error, Result};
use crate::hecke::{KLTable, CONVENTION_TAG};
use crate::laurent::LaurentPoly;

pub const FORMAT_TAG: &str = "klc";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheHeader {
    pub format: String,
    pub version: u32,
    #[serde(rename = "type")]
    pub label: String,
    pub radius: usize,
    pub extended: bool,
    pub convention: String,
    pub generator_checksum: String,
}

impl CacheHeader {
    pub fn for_table(table: &KLTable) -> CacheHeader {
        let d = table.ball().datum();
        CacheHeader {
            format: FORMAT_TAG.into(),
            version: FORMAT_VERSION,
            label: d.label().to_string(),
            radius: table.radius(),
            extended: d.is_extended(),
            convention: CONVENTION_TAG.into(),
            generator_checksum: d.checksum().to_string(),
        }
    }

    fn datum(&self) -> Result<CoxeterDatum> {
        if self.format != FORMAT_TAG || self.version != FORMAT_VERSION {
            return Err(Error::Format(format!("unknown cache format {} v{}", self.format, self.version)));
        }
        if self.convention != CONVENTION_TAG {
            return Err(Error::Format(format!("cache uses convention {}", self.convention)));
        }
        let label: TypeLabel = self.label.parse()?;
        let datum = CoxeterDatum::new(label, self.extended);
        if datum.checksum() != self.generator_checksum {
            return Err(Error::Format("generator checksum does not match this build".into()));
        }
        Ok(datum)
    }
}

#[derive(Serialize, Deserialize)]
struct PRecord {
    w: Vec<u32>,
    y: Vec<u32>,
    p: LaurentPoly,
}

#[derive(Serialize, Deserialize)]
struct HRecord {
    x: Vec<u32>,
    y: Vec<u32>,
    h: Vec<(Vec<u32>, LaurentPoly)>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Record {
    P(PRecord),
    H(HRecord),
}

fn labels(table: &KLTable, core: usize) -> Vec<u32> {
    let d = table.ball().datum();
    table.ball().core_word(core).iter().map(|&s| d.gen_label(s)).collect()
}

/// The cache text for a table; byte-identical for identical tables. With `include_h`, every
/// structure-constant row inside the ball is appended (computing it if needed).
pub fn render(table: &KLTable, include_h: bool) -> String {
    let mut out = serde_json::to_string(&CacheHeader::for_table(table)).expect("serializable");
    out.push('\n');
    for (y, w, p) in table.core_polynomials() {
        let rec = PRecord { w: labels(table, w), y: labels(table, y), p: p.clone() };
        out.push_str(&serde_json::to_string(&rec).expect("serializable"));
        out.push('\n');
    }
    if include_h {
        let n = table.ball().core_count();
        for x in 0..n {
            for y in 0..n {
                if let Ok(row) = table.core_h_row(x, y) {
                    let h = row.iter().map(|(z, c)| (labels(table, *z as usize), c.clone())).collect();
                    let rec = HRecord { x: labels(table, x), y: labels(table, y), h };
                    out.push_str(&serde_json::to_string(&rec).expect("serializable"));
                    out.push('\n');
                }
            }
        }
    }
    out
}

/// Writes the cache atomically. Returns `false` when an identical file already exists.
pub fn write_cache(table: &KLTable, path: &Path, include_h: bool) -> Result<bool> {
    let text = render(table, include_h);
    if fs::read(path).is_ok_and(|old| old == text.as_bytes()) {
        return Ok(false);
    }
    let name = path.file_name().ok_or_else(|| Error::Format(format!("bad cache path {}", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(text.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result?;
    Ok(true)
}

pub fn read_header(text: &str) -> Result<CacheHeader> {
    let first = text.lines().next().ok_or_else(|| Error::Format("empty cache".into()))?;
    Ok(serde_json::from_str(first)?)
}

/// Parses cache text back into a table. The header, record order, every polynomial (against a
/// fresh run of the recursion) and every stored structure constant are checked.
pub fn parse(text: &str) -> Result<KLTable> {
    let header = read_header(text)?;
    let datum = header.datum()?;
    let ball = Ball::enumerate(&datum, header.radius)?;
    let core_of = |word: &[u32]| -> Result<usize> {
        let idx: Vec<usize> = word.iter().map(|&l| datum.gen_index(l)).collect::<Result<_>>()?;
        let w = datum.from_word(&idx)?;
        let id = ball.core_id_of(&w).ok_or(Error::NotInBall)?;
        if ball.core_word(id) != idx.as_slice() {
            return Err(Error::Format(format!("word {word:?} is not in ShortLex normal form")));
        }
        Ok(id)
    };
    let mut polys = Vec::new();
    let mut rows = Vec::new();
    let mut last: Option<(usize, usize)> = None;
    for (n, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let rec: Record = serde_json::from_str(line).map_err(|e| Error::Format(format!("line {}: {e}", n + 1)))?;
        match rec {
            Record::P(r) => {
                if !rows.is_empty() {
                    return Err(Error::Format(format!("line {}: polynomial after structure constants", n + 1)));
                }
                let key = (core_of(&r.w)?, core_of(&r.y)?);
                if last.is_some_and(|k| k >= key) {
                    return Err(Error::Format(format!("line {}: records out of order", n + 1)));
                }
                last = Some(key);
                polys.push((key.1, key.0, r.p));
            }
            Record::H(r) => rows.push(r),
        }
    }
    let table = KLTable::from_polynomials(ball.clone(), polys)?;
    let fresh = KLTable::compute(ball.clone());
    if let Some((y, w, _)) = table.core_polynomials().zip(fresh.core_polynomials()).find(|(a, b)| a != b).map(|t| t.0) {
        return Err(Error::Format(format!("stored P for core pair ({y}, {w}) differs from the recursion")));
    }
    for r in rows {
        let (x, y) = (core_of(&r.x)?, core_of(&r.y)?);
        let stored: Vec<(u32, LaurentPoly)> =
            r.h.into_iter().map(|(z, c)| Ok((core_of(&z)? as u32, c))).collect::<Result<_>>()?;
        if table.core_h_row(x, y)? != stored.as_slice() {
            return Err(Error::Format(format!("stored structure constants for {:?} * {:?} disagree", r.x, r.y)));
        }
    }
    Ok(table)
}

pub fn read_cache(path: &Path) -> Result<KLTable> {
    parse(&fs::read_to_string(path)?)
}
