//! The source->target pair matrix: every ordered position pair within each
//! dataset (cross-position), and the four shared placements bridged in both
//! directions between the datasets (cross-configuration).

use std::fmt;
use std::str::FromStr;

use crate::error::{DafdError, Result};
use crate::ingest::Position;

pub const UPFALL: &str = "upfall";
pub const UMAFALL: &str = "umafall";

/// UP-Fall accelerometer placements.
pub const UPFALL_POSITIONS: [Position; 5] = [
    Position::N,
    Position::WA,
    Position::RP,
    Position::WR,
    Position::A,
];

/// UMAFall placements used cross-position; the left-pocket smartphone is
/// excluded because its hardware differs from the IMU nodes.
pub const UMAFALL_POSITIONS: [Position; 4] =
    [Position::C, Position::WA, Position::WR, Position::A];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    CrossPosition,
    CrossConfig,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::CrossPosition => "cross_position",
            Scenario::CrossConfig => "cross_config",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "cross_position" => Ok(Scenario::CrossPosition),
            "cross_config" => Ok(Scenario::CrossConfig),
            other => Err(format!(
                "unknown scenario {other:?} (expected cross_position|cross_config)"
            )),
        }
    }
}

/// One side of a pair: a dataset and a sensor position, written
/// `dataset/POSITION`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PairSide {
    pub dataset: String,
    pub position: Position,
}

impl fmt::Display for PairSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.dataset, self.position)
    }
}

impl FromStr for PairSide {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (dataset, pos) = s
            .split_once('/')
            .ok_or_else(|| format!("pair side {s:?} must be dataset/POSITION"))?;
        Ok(PairSide {
            dataset: dataset.to_string(),
            position: pos.parse()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PairSpec {
    pub scenario: Scenario,
    pub source: PairSide,
    pub target: PairSide,
}

impl PairSpec {
    pub fn new(source: PairSide, target: PairSide) -> Self {
        let scenario = if source.dataset == target.dataset {
            Scenario::CrossPosition
        } else {
            Scenario::CrossConfig
        };
        PairSpec {
            scenario,
            source,
            target,
        }
    }
}

impl fmt::Display for PairSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.source, self.target)
    }
}

impl FromStr for PairSpec {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (src, tgt) = s
            .split_once(':')
            .ok_or_else(|| format!("pair {s:?} must be SRC:TGT, e.g. upfall/WA:upfall/RP"))?;
        Ok(PairSpec::new(src.parse()?, tgt.parse()?))
    }
}

fn cross_position_pairs(dataset: &str, positions: &[Position]) -> Vec<PairSpec> {
    let mut out = Vec::new();
    for &src in positions {
        for &tgt in positions {
            if src != tgt {
                out.push(PairSpec::new(
                    PairSide {
                        dataset: dataset.to_string(),
                        position: src,
                    },
                    PairSide {
                        dataset: dataset.to_string(),
                        position: tgt,
                    },
                ));
            }
        }
    }
    out
}

/// Placements shared by both datasets; the pocket sensors bridge RP <-> LP.
const CROSS_CONFIG_BRIDGES: [(Position, Position); 4] = [
    (Position::WA, Position::WA),
    (Position::RP, Position::LP),
    (Position::WR, Position::WR),
    (Position::A, Position::A),
];

fn cross_config_pairs() -> Vec<PairSpec> {
    let mut out = Vec::new();
    for (up_pos, uma_pos) in CROSS_CONFIG_BRIDGES {
        out.push(PairSpec::new(
            PairSide {
                dataset: UPFALL.into(),
                position: up_pos,
            },
            PairSide {
                dataset: UMAFALL.into(),
                position: uma_pos,
            },
        ));
    }
    for (up_pos, uma_pos) in CROSS_CONFIG_BRIDGES {
        out.push(PairSpec::new(
            PairSide {
                dataset: UMAFALL.into(),
                position: uma_pos,
            },
            PairSide {
                dataset: UPFALL.into(),
                position: up_pos,
            },
        ));
    }
    out
}

/// Enumerates the pair matrix. Cross-position without a dataset filter yields
/// all 32 pairs (20 UP-Fall + 12 UMAFall); cross-configuration yields the 8
/// bridged pairs.
pub fn enumerate_pairs(scenario: Scenario, dataset: Option<&str>) -> Result<Vec<PairSpec>> {
    match scenario {
        Scenario::CrossPosition => match dataset {
            None => {
                let mut all = cross_position_pairs(UPFALL, &UPFALL_POSITIONS);
                all.extend(cross_position_pairs(UMAFALL, &UMAFALL_POSITIONS));
                Ok(all)
            }
            Some(UPFALL) => Ok(cross_position_pairs(UPFALL, &UPFALL_POSITIONS)),
            Some(UMAFALL) => Ok(cross_position_pairs(UMAFALL, &UMAFALL_POSITIONS)),
            Some(other) => Err(DafdError::InvalidArgument(format!(
                "unknown dataset {other:?} (expected {UPFALL} or {UMAFALL})"
            ))),
        },
        Scenario::CrossConfig => Ok(cross_config_pairs()),
    }
}
