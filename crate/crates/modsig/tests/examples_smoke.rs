//! Runs every example in-process so a broken example fails the suite.

#[path = "../examples/significance_test.rs"]
mod significance_test;
#[path = "../examples/model_selection.rs"]
mod model_selection;
#[path = "../examples/diagnostics.rs"]
mod diagnostics;
#[path = "../examples/bootstrap.rs"]
mod bootstrap;
#[path = "../examples/standard_errors.rs"]
mod standard_errors;
#[path = "../examples/null_calibration.rs"]
mod null_calibration;

#[test]
fn significance_test_runs() {
    significance_test::main();
}

#[test]
fn model_selection_runs() {
    model_selection::main();
}

#[test]
fn diagnostics_runs() {
    diagnostics::main();
}

#[test]
fn bootstrap_runs() {
    bootstrap::main();
}

#[test]
fn standard_errors_runs() {
    standard_errors::main();
}

#[test]
fn null_calibration_runs() {
    null_calibration::main();
}
