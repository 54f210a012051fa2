//! Moment machinery: exact recursions with closed-form limits, Monte Carlo
//! moment estimation over replica ensembles, and the bound checkers used by
//! the batch verdicts.

mod checks;
mod estimate;
mod recursion;

pub use checks::{
    check_eta_moment_bound, check_martingale_zero_mean, check_pathwise_timeaverage,
    check_theta_growth_ensemble, check_theta_growth_pathwise, check_timeaverage_theta_power,
    check_uniform_second_moment, pathwise_timeaverage_point, BoundFlag, PATHWISE_SLACK_COEFF,
};
pub use estimate::{
    batch_means, estimate_moments, GridSamples, MomentEstimate, MomentReport, NeumaierSum,
};
pub use recursion::{even_recursion, limiting_moment, odd_recursion, MomentRecursionTable};
