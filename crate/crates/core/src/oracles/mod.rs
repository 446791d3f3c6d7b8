//! Independent numerical checks: truncated superoperator evolution,
//! quadrature of the completeness relations, and the verification suite.

pub mod completeness;
pub mod quadrature;
pub mod report;
pub mod suite;
pub mod superop;

pub use completeness::{
    check_momentum_completeness, check_position_product_completeness, check_position_star_completeness,
    CompletenessCheck,
};
pub use quadrature::{QuadratureResult, QuadratureRule, QuadratureSpec};
pub use report::{CheckRow, SuiteReport};
pub use suite::{run_suite, SuiteConfig};
pub use superop::{
    build_hamiltonian_superop, evolve_kernel_oracle, oracle_ladder, KernelOracle, LadderCase, LadderReport,
    SuperOperator,
};
