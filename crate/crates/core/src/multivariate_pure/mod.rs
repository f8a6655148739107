//! Pure-DP high-dimensional mean estimation: a grid cover around a rough
//! center, pairwise matches along projections, and exponential-mechanism
//! selection by score.

mod estimator;
mod game;
mod grid;

pub use estimator::{match_groups, pdp_highd_mean, projection_radius, PureHighDimEstimate, PureHighDimMean};
pub use game::{defeat_cost, match_outcome, project_clamp, score, score_cap, MatchOutcome, ScoreTable, TIE_RADIUS};
pub use grid::{CandidateGrid, DEFAULT_GRID_CAP};
