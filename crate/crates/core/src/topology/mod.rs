//! Cayley balls as labelled digraphs, the ultrametric on marked groups, and
//! convergence of sequences.

mod ball;
mod nu;
mod sequence;

pub use ball::{ball_isomorphism, balls_isomorphic, build_ball, BallCode, BallVertex, Edge, LabeledBall};
pub use nu::{distance, distance_any_rank, nu, nu_diagonal, nu_enumerated, Distance, NuResult};
pub use sequence::{
    eventual_membership, matching_radius, member_balls, three_conditions, verify_convergence,
    ConvergenceReport, GroupSequence, MatchingReport, MembershipReport, ThreeConditions,
};
