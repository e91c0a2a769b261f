//! Index slots in lowered form.
//!
//! Every index is stored lowered. An upper holomorphic index is an
//! antiholomorphic slot contracted through the (implicit) Levi form, so a
//! contraction is always a pair of one holomorphic and one antiholomorphic
//! slot sharing a label. Reeb slots carry no label and never contract.

use std::fmt;

use serde::{Deserialize, Serialize};

pub type Label = u32;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum Kind {
    Hol,
    Anti,
    Reeb,
}

impl Kind {
    pub fn flip(self) -> Kind {
        match self {
            Kind::Hol => Kind::Anti,
            Kind::Anti => Kind::Hol,
            Kind::Reeb => Kind::Reeb,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            Kind::Hol => "h",
            Kind::Anti => "a",
            Kind::Reeb => "0",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Slot {
    Hol(Label),
    Anti(Label),
    Reeb,
}

impl Slot {
    pub fn new(kind: Kind, label: Label) -> Slot {
        match kind {
            Kind::Hol => Slot::Hol(label),
            Kind::Anti => Slot::Anti(label),
            Kind::Reeb => Slot::Reeb,
        }
    }

    pub fn kind(self) -> Kind {
        match self {
            Slot::Hol(_) => Kind::Hol,
            Slot::Anti(_) => Kind::Anti,
            Slot::Reeb => Kind::Reeb,
        }
    }

    pub fn label(self) -> Option<Label> {
        match self {
            Slot::Hol(l) | Slot::Anti(l) => Some(l),
            Slot::Reeb => None,
        }
    }

    pub fn with_label(self, l: Label) -> Slot {
        match self {
            Slot::Hol(_) => Slot::Hol(l),
            Slot::Anti(_) => Slot::Anti(l),
            Slot::Reeb => Slot::Reeb,
        }
    }

    pub fn flip(self) -> Slot {
        match self {
            Slot::Hol(l) => Slot::Anti(l),
            Slot::Anti(l) => Slot::Hol(l),
            Slot::Reeb => Slot::Reeb,
        }
    }
}

const LETTERS: &[u8] = b"abcdefghjklmopqrstuvwxyz";

/// Printable name of a label: `a`, `b`, ..., then `a1`, `b1`, ...
pub fn label_name(l: Label) -> String {
    let base = LETTERS.len() as u32;
    let c = LETTERS[(l % base) as usize] as char;
    let k = l / base;
    if k == 0 {
        c.to_string()
    } else {
        format!("{}{}", c, k)
    }
}

/// Inverse of [`label_name`].
pub fn parse_label_name(s: &str) -> Option<Label> {
    let mut chars = s.chars();
    let c = chars.next()?;
    let pos = LETTERS.iter().position(|&x| x as char == c)? as u32;
    let rest: String = chars.collect();
    let k: u32 = if rest.is_empty() {
        0
    } else {
        if !rest.chars().all(|d| d.is_ascii_digit()) || rest.starts_with('0') {
            return None;
        }
        rest.parse().ok()?
    };
    Some(k * LETTERS.len() as u32 + pos)
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_names_round_trip() {
        for l in 0..200 {
            assert_eq!(parse_label_name(&label_name(l)), Some(l));
        }
        assert_eq!(parse_label_name("i"), None);
        assert_eq!(parse_label_name("n"), None);
    }
}
