use serde::{Deserialize, Serialize};

/// Resource limits shared by the exploratory operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Caps {
    /// Largest free-group ball `enumerate_ball` may materialize.
    pub max_free_ball: u64,
    /// Largest Cayley ball / enumerated group.
    pub max_group_ball: u64,
    /// Word-map evaluations allowed per value-set computation.
    pub max_evaluations: u64,
    /// Radius up to which `nu` compares kernels.
    pub nu_cap: usize,
    /// Last sequence index sampled.
    pub r_max: u64,
}

impl Default for Caps {
    fn default() -> Caps {
        Caps {
            max_free_ball: 2_000_000,
            max_group_ball: 200_000,
            max_evaluations: 10_000_000,
            nu_cap: 16,
            r_max: 50,
        }
    }
}
