//! Places of `Q`: the finite primes and the archimedean place.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::is_prime;
use crate::error::{Error, Result};

/// A place of `Q`. Finite places sort before the archimedean one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Finite(u64),
    Infinity,
}

impl Place {
    pub fn finite(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Place::Finite(p))
    }

    pub fn prime(&self) -> Option<u64> {
        match *self {
            Place::Finite(p) => Some(p),
            Place::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Place::Infinity)
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "{p}"),
            Place::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Place {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "inf" | "infinity" | "∞" => Ok(Place::Infinity),
            _ => {
                let p = s
                    .parse::<u64>()
                    .map_err(|e| Error::Parse(format!("place `{s}`: {e}")))?;
                Place::finite(p)
            }
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Place {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A finite set of places that always contains `∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PlaceSet {
    finite_primes: BTreeSet<u64>,
}

impl PlaceSet {
    pub fn new(primes: impl IntoIterator<Item = u64>) -> Result<Self> {
        let finite_primes: BTreeSet<u64> = primes.into_iter().collect();
        if let Some(&p) = finite_primes.iter().find(|&&p| !is_prime(p)) {
            return Err(Error::NotPrime(p));
        }
        Ok(PlaceSet { finite_primes })
    }

    /// Parse a comma-separated prime list such as `2,3,7`. A trailing `inf`
    /// entry is accepted and ignored since `∞` is always present.
    pub fn parse(s: &str) -> Result<Self> {
        let mut primes = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part.parse::<Place>()? {
                Place::Finite(p) => primes.push(p),
                Place::Infinity => {}
            }
        }
        Self::new(primes)
    }

    pub fn finite_primes(&self) -> &BTreeSet<u64> {
        &self.finite_primes
    }

    pub fn contains(&self, place: &Place) -> bool {
        match place {
            Place::Finite(p) => self.finite_primes.contains(p),
            Place::Infinity => true,
        }
    }

    /// All places, finite primes ascending then `∞`.
    pub fn places(&self) -> Vec<Place> {
        self.finite_primes
            .iter()
            .map(|&p| Place::Finite(p))
            .chain(std::iter::once(Place::Infinity))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.finite_primes.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for PlaceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.places().iter().map(Place::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl Serialize for PlaceSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.places().serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_order() {
        let s = PlaceSet::parse("7,2,3,inf").unwrap();
        assert_eq!(s.to_string(), "{2,3,7,inf}");
        assert_eq!(s.len(), 4);
        assert!(s.contains(&Place::Infinity));
        assert!(PlaceSet::parse("2,4").is_err());
        assert!(Place::Finite(1000) < Place::Infinity);
        assert_eq!("inf".parse::<Place>().unwrap(), Place::Infinity);
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"["2","3","7","inf"]"#);
    }
}
