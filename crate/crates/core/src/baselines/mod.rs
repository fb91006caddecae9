//! Baseline planners: a Lagrangian dual UCT (CC-POMCP) and payoff UCT with
//! a tree-flow linear program (RAMCP).

mod ccpomcp;
mod flow;
mod ramcp;
mod scalar;
mod simplex;

pub use ccpomcp::{ccpomcp_plan_episode, CcPomcp, CcPomcpConfig, LagrangeState};
pub use flow::{
    build_flow_lp, solve_flow_dense, solve_flow_lp, solve_flow_structured, FlowAction, FlowEdge, FlowNode,
    FlowSolution, FlowTree,
};
pub use ramcp::{ramcp_plan_episode, uct_plan_episode, RamcpConfig};
pub use scalar::{ScalarAction, ScalarNode, ScalarOutcome, ScalarUct};
pub use simplex::{lp_solve, Constraint, ConstraintKind, LinearProgram, LpOutcome};
