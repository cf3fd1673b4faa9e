use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A family of bitstrings of a fixed length, sampled uniformly.
///
/// Pinned strings start and end with `0`; solus strings have no two adjacent
/// `1`s. The empty string is treated as solus but not pinned, so pinned
/// ensembles are empty at length zero (there is no 1-free composition of 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ensemble {
    Unconstrained,
    Pinned,
    Solus,
    PinnedSolus,
}

impl Ensemble {
    pub const ALL: [Ensemble; 4] = [
        Ensemble::Unconstrained,
        Ensemble::PinnedSolus,
        Ensemble::Pinned,
        Ensemble::Solus,
    ];

    /// 1 when adjacent `1`s are forbidden, else 0.
    pub fn kappa(self) -> usize {
        match self {
            Ensemble::Unconstrained | Ensemble::Pinned => 0,
            Ensemble::Solus | Ensemble::PinnedSolus => 1,
        }
    }

    pub fn is_pinned(self) -> bool {
        matches!(self, Ensemble::Pinned | Ensemble::PinnedSolus)
    }

    pub fn is_solus(self) -> bool {
        self.kappa() == 1
    }

    pub fn name(self) -> &'static str {
        match self {
            Ensemble::Unconstrained => "unconstrained",
            Ensemble::Pinned => "pinned",
            Ensemble::Solus => "solus",
            Ensemble::PinnedSolus => "pinned-solus",
        }
    }

    /// Membership test on a string given as bits, first bit first.
    pub fn admits(self, bits: &[bool]) -> bool {
        if self.is_pinned() {
            match (bits.first(), bits.last()) {
                (Some(false), Some(false)) => {}
                _ => return false,
            }
        }
        if self.is_solus() && bits.windows(2).any(|w| w[0] && w[1]) {
            return false;
        }
        true
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown {kind} `{value}`")]
pub struct ParseNameError {
    kind: &'static str,
    value: String,
}

impl FromStr for Ensemble {
    type Err = ParseNameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "unconstrained" | "unrestricted" => Ok(Ensemble::Unconstrained),
            "pinned" => Ok(Ensemble::Pinned),
            "solus" => Ok(Ensemble::Solus),
            "pinned-solus" | "one-free" | "1-free" => Ok(Ensemble::PinnedSolus),
            _ => Err(ParseNameError {
                kind: "ensemble",
                value: s.to_string(),
            }),
        }
    }
}

/// Composition families: all compositions, or those with every part >= 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Unrestricted,
    OneFree,
}

impl Family {
    pub const ALL: [Family; 2] = [Family::Unrestricted, Family::OneFree];

    /// The bitstring ensemble in bijection with this family.
    pub fn ensemble(self) -> Ensemble {
        match self {
            Family::Unrestricted => Ensemble::Unconstrained,
            Family::OneFree => Ensemble::PinnedSolus,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Unrestricted => "unrestricted",
            Family::OneFree => "one-free",
        }
    }

    /// The maximum-part asymptotics of the 1-free family are conjectural.
    pub fn asymptotics_conjectural(self) -> bool {
        matches!(self, Family::OneFree)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = ParseNameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "unrestricted" | "unconstrained" => Ok(Family::Unrestricted),
            "one-free" | "1-free" | "restricted" | "pinned-solus" => Ok(Family::OneFree),
            _ => Err(ParseNameError {
                kind: "family",
                value: s.to_string(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<bool> {
        s.bytes().map(|b| b == b'1').collect()
    }

    #[test]
    fn kappa_marks_solus() {
        for e in Ensemble::ALL {
            assert_eq!(e.kappa() == 1, e.is_solus());
        }
    }

    #[test]
    fn pinned_solus_is_conjunction() {
        for len in 0..=10u32 {
            for mask in 0u32..(1 << len) {
                let b: Vec<bool> = (0..len).rev().map(|i| mask >> i & 1 == 1).collect();
                assert_eq!(
                    Ensemble::PinnedSolus.admits(&b),
                    Ensemble::Pinned.admits(&b) && Ensemble::Solus.admits(&b)
                );
            }
        }
    }

    #[test]
    fn membership_examples() {
        assert!(Ensemble::Pinned.admits(&bits("0110")));
        assert!(!Ensemble::PinnedSolus.admits(&bits("0110")));
        assert!(Ensemble::Solus.admits(&bits("101")));
        assert!(!Ensemble::Pinned.admits(&bits("101")));
        assert!(Ensemble::Pinned.admits(&bits("0")));
        assert!(!Ensemble::Pinned.admits(&[]));
        assert!(Ensemble::Solus.admits(&[]));
    }

    #[test]
    fn names_round_trip() {
        for e in Ensemble::ALL {
            assert_eq!(e.name().parse::<Ensemble>().unwrap(), e);
        }
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("bogus".parse::<Ensemble>().is_err());
    }
}
