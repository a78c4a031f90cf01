use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intset::{strip_comment, IntSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MapKind {
    Single,
    TFold(usize),
}

/// An explicit finite bijection onto its image.
///
/// Keys are 1-tuples for a single map and `t`-tuples for a `t`-fold map.
/// Image values are pairwise distinct.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawMap", into = "RawMap")]
pub struct MapTable {
    kind: MapKind,
    entries: BTreeMap<Vec<BigInt>, BigInt>,
}

#[derive(Serialize, Deserialize)]
struct RawMap {
    kind: MapKind,
    entries: Vec<(Vec<BigInt>, BigInt)>,
}

impl TryFrom<RawMap> for MapTable {
    type Error = Error;
    fn try_from(raw: RawMap) -> Result<Self> {
        MapTable::build(raw.kind, raw.entries)
    }
}

impl From<MapTable> for RawMap {
    fn from(m: MapTable) -> Self {
        RawMap {
            kind: m.kind,
            entries: m.entries.into_iter().collect(),
        }
    }
}

impl MapTable {
    fn build(kind: MapKind, pairs: Vec<(Vec<BigInt>, BigInt)>) -> Result<Self> {
        let width = match kind {
            MapKind::Single => 1,
            MapKind::TFold(0) => return Err(Error::NonBijective("t must be positive".into())),
            MapKind::TFold(t) => t,
        };
        let mut entries = BTreeMap::new();
        let mut seen = BTreeSet::new();
        for (k, v) in pairs {
            if k.len() != width {
                return Err(Error::ArityMismatch {
                    expected: width,
                    found: k.len(),
                });
            }
            if !seen.insert(v.clone()) {
                return Err(Error::NonBijective(format!("value {v} appears twice")));
            }
            let shown = fmt_key(&k);
            if entries.insert(k, v).is_some() {
                return Err(Error::NonBijective(format!("key {shown} appears twice")));
            }
        }
        Ok(MapTable { kind, entries })
    }

    pub fn single<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BigInt, BigInt)>,
    {
        MapTable::build(MapKind::Single, pairs.into_iter().map(|(k, v)| (vec![k], v)).collect())
    }

    pub fn tfold<I>(t: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<BigInt>, BigInt)>,
    {
        MapTable::build(MapKind::TFold(t), pairs.into_iter().collect())
    }

    pub fn identity(set: &IntSet) -> Self {
        MapTable::single(set.elements().iter().map(|a| (a.clone(), a.clone()))).expect("identity is a bijection")
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    /// Fold count; 1 for a single map.
    pub fn t(&self) -> usize {
        match self.kind {
            MapKind::Single => 1,
            MapKind::TFold(t) => t,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &[BigInt]) -> Option<&BigInt> {
        self.entries.get(key)
    }

    pub fn apply(&self, a: &BigInt) -> Option<&BigInt> {
        self.entries.get(std::slice::from_ref(a))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&[BigInt], &BigInt)> {
        self.entries.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn image(&self) -> Result<IntSet> {
        IntSet::new(self.entries.values().cloned())
    }

    /// `then ∘ self` for single maps; every image of `self` must be a key of `then`.
    pub fn compose(&self, then: &MapTable) -> Result<MapTable> {
        if self.t() != 1 || then.t() != 1 {
            return Err(Error::Precondition("compose expects single maps".into()));
        }
        let pairs = self
            .entries
            .iter()
            .map(|(k, v)| {
                then.apply(v)
                    .map(|w| (k[0].clone(), w.clone()))
                    .ok_or_else(|| Error::NonBijective(format!("{v} is outside the domain of the second map")))
            })
            .collect::<Result<Vec<_>>>()?;
        MapTable::single(pairs)
    }

    /// Composes a `t`-fold map `self: A^t → D` with a `t'`-fold map
    /// `then: D^{t'} → E` into the `t·t'`-fold map
    /// `(a_1, …, a_{tt'}) ↦ then(self(a_1..a_t), …, self(a_{(t'-1)t+1}..a_{tt'}))`.
    pub fn compose_tfold(&self, then: &MapTable) -> Result<MapTable> {
        let t = self.t();
        let t2 = then.t();
        let keys: Vec<(&Vec<BigInt>, &BigInt)> = self.entries.iter().collect();
        let total = (keys.len() as u64)
            .checked_pow(t2 as u32)
            .ok_or_else(|| Error::Precondition("composed table is too large".into()))?;
        let mut pairs = Vec::with_capacity(total as usize);
        let mut digits = vec![0usize; t2];
        for code in 0..total {
            crate::solutions::decode_tuple(code, keys.len(), t2, &mut digits);
            let mut key = Vec::with_capacity(t * t2);
            let mut mid = Vec::with_capacity(t2);
            for &d in &digits {
                key.extend(keys[d].0.iter().cloned());
                mid.push(keys[d].1.clone());
            }
            let v = then.get(&mid).ok_or_else(|| {
                Error::NonBijective(format!("{} is outside the domain of the second map", fmt_key(&mid)))
            })?;
            pairs.push((key, v.clone()));
        }
        MapTable::tfold(t * t2, pairs)
    }

    /// Parses `key -> value` lines. Comma-separated keys make a `t`-fold table.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut width: Option<usize> = None;
        let mut commas = false;
        for (no, raw) in text.lines().enumerate() {
            let line_no = no + 1;
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once("->")
                .ok_or_else(|| Error::parse(line_no, "expected `key -> value`"))?;
            commas |= k.contains(',');
            let key = k
                .split(',')
                .map(|w| {
                    w.trim()
                        .parse::<BigInt>()
                        .map_err(|_| Error::parse(line_no, format!("bad key component {:?}", w.trim())))
                })
                .collect::<Result<Vec<_>>>()?;
            match width {
                None => width = Some(key.len()),
                Some(w) if w != key.len() => {
                    return Err(Error::parse(
                        line_no,
                        format!("key has {} components, expected {w}", key.len()),
                    ))
                }
                _ => {}
            }
            let value: BigInt = v
                .trim()
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad value {:?}", v.trim())))?;
            pairs.push((key, value));
        }
        let kind = match width {
            None => return Err(Error::parse(0, "map file has no entries")),
            Some(1) if !commas => MapKind::Single,
            Some(w) => MapKind::TFold(w),
        };
        MapTable::build(kind, pairs).map_err(|e| Error::parse(0, e))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(&fmt_key(k));
            out.push_str(" -> ");
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    }
}

fn fmt_key(k: &[BigInt]) -> String {
    k.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for MapTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: i64) -> BigInt {
        x.into()
    }

    #[test]
    fn rejects_duplicate_values() {
        let err = MapTable::single([(b(0), b(1)), (b(2), b(1))]).unwrap_err();
        assert!(matches!(err, Error::NonBijective(_)));
    }

    #[test]
    fn text_round_trip_single_and_tfold() {
        let m = MapTable::parse_text("0 -> 0\n100 -> 1 # c\n200 -> 2\n").unwrap();
        assert_eq!(m.kind(), MapKind::Single);
        assert_eq!(MapTable::parse_text(&m.to_text()).unwrap(), m);

        let w = MapTable::parse_text("0,1 -> 7\n1,0 -> 5\n").unwrap();
        assert_eq!(w.kind(), MapKind::TFold(2));
        assert_eq!(w.get(&[b(0), b(1)]), Some(&b(7)));
        assert_eq!(MapTable::parse_text(&w.to_text()).unwrap(), w);

        assert!(MapTable::parse_text("0,1 -> 7\n1 -> 5\n").is_err());
        assert!(MapTable::parse_text("0 => 1\n").is_err());
    }

    #[test]
    fn composition() {
        let f = MapTable::single([(b(0), b(10)), (b(1), b(20))]).unwrap();
        let g = MapTable::single([(b(10), b(-1)), (b(20), b(1))]).unwrap();
        let h = f.compose(&g).unwrap();
        assert_eq!(h.apply(&b(0)), Some(&b(-1)));
        assert_eq!(h.apply(&b(1)), Some(&b(1)));
        assert!(g.compose(&f).is_err());
    }
}
