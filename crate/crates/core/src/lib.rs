//! Desk-scale simulator for two qutrit nonclassicality tests: Wright's
//! inequality (single yes/no questions) and the KCBS noncontextuality
//! inequality (sequential compatible measurements).
//!
//! Layers, from exact to stochastic:
//!
//! * [`qutrit`]: states, questions, Born rule and Lüders updates.
//! * [`inequality`]: quantum values, exhaustive classical bounds, classical
//!   strategies; [`optimize`] searches for the maximal violation.
//! * [`sequential`]: joint distributions of ordered measurement pairs and the
//!   arrival-time readout encoding.
//! * [`photonic`]: polarization/path encoding and Jones-calculus measurement
//!   devices with time-multiplexed outputs.
//! * [`lab`]: noise models, photon-count sampling, estimators with error bars
//!   and end-to-end experiment runs.

pub mod error;
pub mod inequality;
pub mod lab;
pub mod optimize;
pub mod photonic;
pub mod qutrit;
pub mod sequential;
pub mod simplex;

pub use error::{Error, Result};
pub use inequality::{
    classical_kcbs_bound, classical_strategy_kcbs, classical_strategy_wright,
    classical_wright_bound, kcbs_quantum_bound, kcbs_value, wright_quantum_bound, wright_value,
    BoundReport, ClassicalStrategy, KcbsEvaluation,
};
pub use lab::{
    estimate_kcbs, estimate_wright, run_experiment, CountTable, Estimate, Experiment,
    ExperimentConfig, ExperimentReport, NoiseModel, ShotPlan, Source,
};
pub use optimize::{maximize_violation, OptimizationResult, OptimizeConfig, Target};
pub use photonic::{
    build_device, cascade, encode, verify_device, DeviceFidelity, MeasurementDevice, ModeState,
    OpticalElement, SlotTable,
};
pub use qutrit::{
    born_probability, check_exclusive, expectation, luders_update, make_pentagram, DensityMatrix,
    Outcome, Pentagram, Question, QuestionCycle, State, StateVector,
};
pub use sequential::{
    correlation, joint_distribution, kcbs_run, marginal_consistency, outcome_to_timeslot,
    JointDistribution, KcbsRun, Order, Slot, TimeSlot,
};
