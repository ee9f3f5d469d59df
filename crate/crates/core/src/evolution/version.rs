use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Segment {
    Num(u64),
    Text(String),
}

/// A dotted version compared numerically segment by segment. Trailing zero
/// segments are insignificant (`1.0 == 1`); non-numeric segments sort after
/// numeric ones and among themselves lexicographically.
#[derive(Debug, Clone)]
pub struct Version {
    text: String,
    key: Vec<Segment>,
}

impl Version {
    pub fn parse(text: &str) -> Self {
        let mut key: Vec<Segment> = text
            .trim()
            .split('.')
            .map(|s| match s.parse::<u64>() {
                Ok(n) if s.bytes().all(|b| b.is_ascii_digit()) => Segment::Num(n),
                _ => Segment::Text(s.to_owned()),
            })
            .collect();
        while key.last() == Some(&Segment::Num(0)) {
            key.pop();
        }
        Self { text: text.trim().to_owned(), key }
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

impl PartialEq for Version {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for Version {}

impl PartialOrd for Version {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Version {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.cmp(&other.key)
    }
}

impl fmt::Display for Version {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl Serialize for Version {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

impl<'de> Deserialize<'de> for Version {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Self::parse(&String::deserialize(d)?))
    }
}
