//! Randomized property suites (fixed seed, 1000 cases each).

mod common;

use common::props;

#[test]
fn reduction_is_idempotent() {
    props::reduction_idempotence(&common::atlas()).unwrap();
}

#[test]
fn inverses_cancel() {
    props::inverse_cancellation(&common::atlas()).unwrap();
}

#[test]
fn homology_is_a_homomorphism_matching_the_vector_oracle() {
    props::homomorphism(&common::atlas()).unwrap();
}

#[test]
fn abelianized_pi1_action_is_the_homology_action() {
    props::abelianization_functoriality(&common::atlas()).unwrap();
}

#[test]
fn random_accepted_steps_preserve_homology() {
    props::step_soundness(&common::atlas()).unwrap();
}

#[test]
fn shipped_steps_preserve_homology() {
    let n = props::shipped_step_soundness(&common::atlas(), &common::scripts()).unwrap();
    assert!(n > 0);
}
