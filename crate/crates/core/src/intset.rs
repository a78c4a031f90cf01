use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite, nonempty set of integers kept in ascending order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<BigInt>", into = "Vec<BigInt>")]
pub struct IntSet {
    elements: Vec<BigInt>,
}

/// The three size measures of a set: `card`, `diam = max - min + 1`
/// and `env = max |a| + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measures {
    pub card: usize,
    pub diam: BigInt,
    pub env: BigInt,
}

impl IntSet {
    /// Builds a set from arbitrary input; duplicates collapse and order is
    /// irrelevant.
    pub fn new<I, T>(items: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        let mut elements: Vec<BigInt> = items.into_iter().map(Into::into).collect();
        if elements.is_empty() {
            return Err(Error::EmptySet);
        }
        elements.sort();
        elements.dedup();
        Ok(IntSet { elements })
    }

    pub fn elements(&self) -> &[BigInt] {
        &self.elements
    }

    pub fn card(&self) -> usize {
        self.elements.len()
    }

    pub fn min(&self) -> &BigInt {
        &self.elements[0]
    }

    pub fn max(&self) -> &BigInt {
        &self.elements[self.elements.len() - 1]
    }

    pub fn contains(&self, value: &BigInt) -> bool {
        self.index_of(value).is_some()
    }

    /// Position of `value` in the sorted element list.
    pub fn index_of(&self, value: &BigInt) -> Option<usize> {
        self.elements.binary_search(value).ok()
    }

    pub fn diam(&self) -> BigInt {
        self.max() - self.min() + BigInt::one()
    }

    pub fn env(&self) -> BigInt {
        let hi = self.max().abs();
        let lo = self.min().abs();
        hi.max(lo) + BigInt::one()
    }

    pub fn measures(&self) -> Measures {
        Measures {
            card: self.card(),
            diam: self.diam(),
            env: self.env(),
        }
    }

    /// Image of the set under `f`; fails if `f` is not injective on it.
    pub fn map<F>(&self, f: F) -> Result<IntSet>
    where
        F: FnMut(&BigInt) -> BigInt,
    {
        let image = IntSet::new(self.elements.iter().map(f))?;
        if image.card() != self.card() {
            return Err(Error::NonBijective("two elements share an image".to_string()));
        }
        Ok(image)
    }

    /// Parses the set file format: one integer per line, `#` starts a
    /// comment, blank lines ignored.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut items = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let value: BigInt = line
                .parse()
                .map_err(|_| Error::parse(no + 1, format!("not an integer: {line:?}")))?;
            items.push(value);
        }
        IntSet::new(items).map_err(|_| Error::parse(0, "set file contains no elements"))
    }

    /// Canonical text form, sorted, one element per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.elements {
            out.push_str(&e.to_string());
            out.push('\n');
        }
        out
    }
}

pub(crate) fn strip_comment(raw: &str) -> &str {
    match raw.find('#') {
        Some(i) => raw[..i].trim(),
        None => raw.trim(),
    }
}

/// Free-function form of [`IntSet::measures`].
pub fn measures(set: &IntSet) -> Measures {
    set.measures()
}

impl TryFrom<Vec<BigInt>> for IntSet {
    type Error = Error;

    fn try_from(v: Vec<BigInt>) -> Result<Self> {
        IntSet::new(v)
    }
}

impl From<IntSet> for Vec<BigInt> {
    fn from(s: IntSet) -> Self {
        s.elements
    }
}

impl fmt::Display for IntSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.elements.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}
