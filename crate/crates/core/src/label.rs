use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// UCCA edge categories, declared in head-priority order (C first, U last).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    C,
    N,
    H,
    P,
    S,
    A,
    D,
    T,
    E,
    R,
    F,
    L,
    LR,
    LA,
    G,
    Terminal,
    U,
}

impl Label {
    pub const ALL: [Label; 17] = [
        Label::C,
        Label::N,
        Label::H,
        Label::P,
        Label::S,
        Label::A,
        Label::D,
        Label::T,
        Label::E,
        Label::R,
        Label::F,
        Label::L,
        Label::LR,
        Label::LA,
        Label::G,
        Label::Terminal,
        Label::U,
    ];

    /// Rank used by the head function; lower wins.
    pub fn priority(self) -> usize {
        self as usize
    }

    /// Whether a transition may carry this label.
    pub fn is_parsable(self) -> bool {
        !matches!(self, Label::Terminal | Label::LR | Label::LA)
    }

    pub fn is_linkage(self) -> bool {
        matches!(self, Label::LR | Label::LA)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::C => "C",
            Label::N => "N",
            Label::H => "H",
            Label::P => "P",
            Label::S => "S",
            Label::A => "A",
            Label::D => "D",
            Label::T => "T",
            Label::E => "E",
            Label::R => "R",
            Label::F => "F",
            Label::L => "L",
            Label::LR => "LR",
            Label::LA => "LA",
            Label::G => "G",
            Label::Terminal => "Terminal",
            Label::U => "U",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Label::ALL
            .iter()
            .copied()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn priority_is_total_with_center_first() {
        assert_eq!(Label::ALL[0], Label::C);
        assert_eq!(Label::ALL[16], Label::U);
        for w in Label::ALL.windows(2) {
            assert!(w[0].priority() < w[1].priority());
        }
    }

    #[test]
    fn round_trips_text() {
        for l in Label::ALL {
            assert_eq!(l.as_str().parse::<Label>().unwrap(), l);
        }
        assert!("X".parse::<Label>().is_err());
    }

    #[test]
    fn transition_labels_exclude_reserved() {
        let banned: Vec<_> = Label::ALL.iter().filter(|l| !l.is_parsable()).collect();
        assert_eq!(banned, [&Label::LR, &Label::LA, &Label::Terminal]);
    }
}
