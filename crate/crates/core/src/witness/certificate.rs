use serde::{Deserialize, Serialize};

use crate::group::{Character, GroupElement};
use crate::trigpoly::PolynomialRecord;

pub const SCHEMA: &str = "witness/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    HighFrequency,
    FreshCoordinate,
    BlockBasis,
    Tower,
    LpFreshBasis,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::HighFrequency => "high-frequency",
            Method::FreshCoordinate => "fresh-coordinate",
            Method::BlockBasis => "block-basis",
            Method::Tower => "tower",
            Method::LpFreshBasis => "lp-fresh-basis",
        };
        f.write_str(s)
    }
}

/// Sparse vector in `ℓ^p` as `(index, re, im)` triples.
pub type SparseRecord = Vec<(u64, f64, f64)>;

/// The space, the family and the witness a certificate speaks about.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "kebab-case")]
pub enum Subject {
    /// `C_Λ(G)` with the sup norm.
    Continuous {
        group: String,
        lambda: Vec<Character>,
        family: Vec<PolynomialRecord>,
        witness: PolynomialRecord,
    },
    /// `ℓ^p` with witness the basis vector `e_m`.
    Sequence {
        p: f64,
        family: Vec<SparseRecord>,
        witness_index: u64,
    },
}

/// Lower bound for `‖f_k + g‖` read off at `point`:
/// `achieved = value - slack`, the slack absorbing norm-certificate widths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionBound {
    pub index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<GroupElement>,
    pub value: f64,
    pub slack: f64,
    pub achieved: f64,
    /// `‖x_k + e_m‖_p` for sequence-space certificates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plus_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusAlignment {
    /// Coordinates of the grid maximizer of `|f_k|`.
    pub maximizer: GroupElement,
    /// Angle `ϑ` of the maximizer on the torus factor.
    pub theta: f64,
    /// Exact solution `φ` of `e^{isφ} = f_k(ϑ, a) / g(1, a)` nearest `ϑ`.
    pub phi: f64,
    /// Grid coordinate used for the bound.
    pub grid_point: u64,
    pub defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordinateAlignment {
    pub maximizer: GroupElement,
    pub u: u64,
    pub defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedAlignment {
    /// Maximizer `x^(k)` of `|f_k|`.
    pub x: GroupElement,
    /// Correction `y^(k)`; the bound is read at the point combining both.
    pub y: GroupElement,
    pub defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockCandidate {
    pub characters: Vec<Character>,
    /// Covering radius of the part of the image in the annulus `|z| ≥ 1 - n₀δ`.
    pub covering_radius: f64,
    /// Whether that part, thickened by `2n₀√δ`, meets every `2π/n₀` sector.
    pub sector_criterion: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Parameters {
    HighFrequency {
        factor: usize,
        s: i64,
        delta: f64,
        degrees: Vec<u64>,
        required_s: f64,
        alignments: Vec<TorusAlignment>,
    },
    FreshCoordinate {
        factor: usize,
        s: u64,
        image_order: u64,
        g: Character,
        alignments: Vec<CoordinateAlignment>,
    },
    BlockBasis {
        head: Vec<usize>,
        gamma: Character,
        lambda0: Vec<Character>,
        block_width: usize,
        required_width: usize,
        n0: u64,
        delta: f64,
        candidates: Vec<BlockCandidate>,
        s0: usize,
        phase_offset: f64,
        alignments: Vec<MixedAlignment>,
    },
    Tower {
        l0: usize,
        l1: u64,
        l1_arc: u64,
        g: Character,
        coset_order: u64,
        annihilator_order: u64,
        alignments: Vec<MixedAlignment>,
    },
    LpFreshBasis {
        m: u64,
    },
    /// Every family member is the same polynomial `f`; `g = f/‖f‖` gives
    /// `‖f + g‖ = 2` at the maximizer.
    SelfAligned { scale: f64 },
    /// `ε ≥ 2`: any unit vector of the space is a witness.
    Degenerate {
        g: Character,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TowerCase {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attempt {
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// How the tower-based dispatcher reached its witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dispatch {
    /// `|Γ_l|` for `l = 1, ..., L`.
    pub level_orders: Vec<u64>,
    pub l0: usize,
    /// `|(Λ ∩ Γ_{l₀}) \ Δ|`.
    pub fresh_in_level: usize,
    pub min_fresh: usize,
    pub case: TowerCase,
    pub attempts: Vec<Attempt>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub schema: String,
    pub method: Method,
    pub target_eps: f64,
    pub target: f64,
    pub subject: Subject,
    pub per_function: Vec<FunctionBound>,
    pub parameters: Parameters,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dispatch: Option<Dispatch>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl WitnessCertificate {
    pub fn min_achieved(&self) -> f64 {
        self.per_function
            .iter()
            .map(|b| b.achieved)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn meets_target(&self) -> bool {
        self.min_achieved() >= self.target - crate::group::TAU_EXACT
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates always serialize")
    }
}
