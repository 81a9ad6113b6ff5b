//! Forward constructions: forces whose steady states have a prescribed
//! expansion, and the fields and spaces those constructions rely on.

mod io;
mod norms;
mod plan;
mod vanishing;
mod witness;

pub use io::{read_plan, write_evaluation, write_plan, PLAN_FILE};
pub use norms::{l_u_solve, operator_norms, OperatorNorms};
pub use plan::{
    build_force_expansion, evaluate_plan, ForceCase, ForceExpansionPlan, PlanEvaluation, PlanPoint, GAMMA, H_MARGIN,
    MAX_DRAWS,
};
pub use vanishing::{vanishing_limit_pair, VanishingPair};
pub use witness::{find_bs_witness, planar_partner, zero_bs_subspace, BsWitness, ZeroBsSpace, WITNESS_MARGIN, ZERO_BS_TOL};
