use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

use crate::decimal;

/// How a [`Solution`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstructionMethod {
    /// `n = 4r`: `x = r + 1`, `t = r(r+1)/2`.
    Mod4Zero,
    /// `n = 4r + 2`: `x = r + 1`, `t = (2r+1)(r+1)`.
    Mod4Two,
    /// `n = 4r + 3`: `x = r + 1`, `t = 2(4r+3)(r+1)`.
    Mod4Three,
    /// `n ≡ 1 (mod 4)` with a divisor `b ≡ 3 (mod 4)`.
    DivisorB(u64),
    /// First perfect-square `F` found by the parametric search.
    ParametricSearch { x: u64, t: u64 },
    /// Exhaustive enumeration.
    Oracle,
}

/// Fieldless version of [`ConstructionMethod`], used as a report key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MethodTag {
    Mod4Zero,
    Mod4Two,
    Mod4Three,
    DivisorB,
    ParametricSearch,
    Oracle,
}

impl MethodTag {
    pub const ALL: [MethodTag; 6] = [
        MethodTag::Mod4Zero,
        MethodTag::Mod4Two,
        MethodTag::Mod4Three,
        MethodTag::DivisorB,
        MethodTag::ParametricSearch,
        MethodTag::Oracle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MethodTag::Mod4Zero => "Mod4Zero",
            MethodTag::Mod4Two => "Mod4Two",
            MethodTag::Mod4Three => "Mod4Three",
            MethodTag::DivisorB => "DivisorB",
            MethodTag::ParametricSearch => "ParametricSearch",
            MethodTag::Oracle => "Oracle",
        }
    }

    pub fn is_mod4(self) -> bool {
        matches!(
            self,
            MethodTag::Mod4Zero | MethodTag::Mod4Two | MethodTag::Mod4Three
        )
    }
}

impl fmt::Display for MethodTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl ConstructionMethod {
    pub fn tag(&self) -> MethodTag {
        match self {
            ConstructionMethod::Mod4Zero => MethodTag::Mod4Zero,
            ConstructionMethod::Mod4Two => MethodTag::Mod4Two,
            ConstructionMethod::Mod4Three => MethodTag::Mod4Three,
            ConstructionMethod::DivisorB(_) => MethodTag::DivisorB,
            ConstructionMethod::ParametricSearch { .. } => MethodTag::ParametricSearch,
            ConstructionMethod::Oracle => MethodTag::Oracle,
        }
    }
}

impl fmt::Display for ConstructionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstructionMethod::DivisorB(b) => write!(f, "DivisorB({b})"),
            ConstructionMethod::ParametricSearch { x, t } => {
                write!(f, "ParametricSearch(x={x},t={t})")
            }
            other => f.write_str(other.tag().as_str()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseMethodError(String);

impl fmt::Display for ParseMethodError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unrecognised construction method `{}`", self.0)
    }
}

impl std::error::Error for ParseMethodError {}

impl FromStr for ConstructionMethod {
    type Err = ParseMethodError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseMethodError(s.to_owned());
        let simple = match s {
            "Mod4Zero" => Some(ConstructionMethod::Mod4Zero),
            "Mod4Two" => Some(ConstructionMethod::Mod4Two),
            "Mod4Three" => Some(ConstructionMethod::Mod4Three),
            "Oracle" => Some(ConstructionMethod::Oracle),
            _ => None,
        };
        if let Some(m) = simple {
            return Ok(m);
        }
        if let Some(inner) = s
            .strip_prefix("DivisorB(")
            .and_then(|r| r.strip_suffix(')'))
        {
            return inner
                .parse()
                .map(ConstructionMethod::DivisorB)
                .map_err(|_| err());
        }
        if let Some(inner) = s
            .strip_prefix("ParametricSearch(")
            .and_then(|r| r.strip_suffix(')'))
        {
            let (xs, ts) = inner.split_once(',').ok_or_else(err)?;
            let x = xs
                .strip_prefix("x=")
                .ok_or_else(err)?
                .parse()
                .map_err(|_| err())?;
            let t = ts
                .strip_prefix("t=")
                .ok_or_else(err)?
                .parse()
                .map_err(|_| err())?;
            return Ok(ConstructionMethod::ParametricSearch { x, t });
        }
        Err(err())
    }
}

impl Serialize for ConstructionMethod {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ConstructionMethod {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        decimal::deserialize(d)
    }
}

/// A verified decomposition `k/n = 1/x + 1/y + 1/z`.
///
/// Values are only handed out after `n(xy + yz + zx) = kxyz` has been
/// checked exactly. `t` and `m` are present when the triple came out of the
/// quadratic parametrization: `y = t(kx−n) + m`, `z = t(kx−n) − m`, `m² = F`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    #[serde(with = "decimal")]
    pub k: u64,
    #[serde(with = "decimal")]
    pub n: u64,
    #[serde(with = "decimal")]
    pub x: u64,
    #[serde(with = "decimal")]
    pub y: u128,
    #[serde(with = "decimal")]
    pub z: u128,
    pub method: ConstructionMethod,
    #[serde(
        with = "decimal::opt",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub t: Option<u64>,
    #[serde(
        with = "decimal::opt",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub m: Option<u128>,
}

impl Solution {
    pub fn is_symmetric(&self) -> bool {
        self.y == self.z
    }

    pub(crate) fn with_method(mut self, method: ConstructionMethod) -> Self {
        self.method = method;
        self
    }
}
