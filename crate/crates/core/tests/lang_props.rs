//! Printer/parser round trips and interpreter totality.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};

use proptest::prelude::*;
use robobench::lang::{parse, pretty_print, run_source, validate_source, ExecStatus, Limits};
use robobench::world::{spawn_world, WorldState};

use common::{arbitrary_program, fixture_programs, plausible_program, pure_infinite_loop, token_soup};

#[test]
fn fixtures_round_trip() {
    for (name, source) in fixture_programs() {
        let program = parse(&source).unwrap_or_else(|e| panic!("{name}: {e}"));
        let printed = pretty_print(&program);
        assert_eq!(parse(&printed).unwrap(), program, "{name}");
        // printing is a fixed point after one pass
        assert_eq!(pretty_print(&parse(&printed).unwrap()), printed, "{name}");
        assert!(validate_source(&source).is_empty(), "{name}");
    }
}

#[test]
fn infinite_loops_stop_at_the_step_limit() {
    for seed in 0..50 {
        let source = pure_infinite_loop(seed);
        let limits = Limits { max_steps: 500 + seed * 97, ..Limits::default() };
        let out = run_source(&source, &mut spawn_world(1).unwrap(), limits);
        assert_eq!(out.status, ExecStatus::StepLimitExceeded, "{source}");
        assert_eq!(out.steps_used, limits.max_steps, "{source}");
        assert!(out.action_trace.is_empty());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn generated_trees_round_trip(seed in any::<u64>()) {
        let program = arbitrary_program(seed);
        let printed = pretty_print(&program);
        let reparsed = parse(&printed).map_err(|e| TestCaseError::fail(format!("{e}\n{printed}")))?;
        prop_assert_eq!(reparsed, program, "{}", printed);
    }

    #[test]
    fn parser_is_total(seed in any::<u64>()) {
        let source = token_soup(seed);
        let result = catch_unwind(|| validate_source(&source));
        prop_assert!(result.is_ok(), "panicked on {:?}", source);
    }

    #[test]
    fn parser_is_total_on_arbitrary_text(source in "\\PC{0,64}") {
        prop_assert!(catch_unwind(|| validate_source(&source)).is_ok());
    }

    #[test]
    fn plausible_programs_end_in_a_known_status(seed in any::<u64>(), context in 1u8..=7) {
        let source = plausible_program(seed);
        let limits = Limits { max_steps: 20_000, ..Limits::default() };
        let mut world = spawn_world(context).unwrap();
        let out = catch_unwind(AssertUnwindSafe(|| run_source(&source, &mut world, limits)));
        let out = out.map_err(|_| TestCaseError::fail(format!("panicked on\n{source}")))?;
        prop_assert!(out.steps_used <= limits.max_steps);
        prop_assert!(out.sim_time_elapsed <= limits.max_sim_time + limits.max_wait + 1e-9 || out.status != ExecStatus::Success);
        if out.status == ExecStatus::StepLimitExceeded {
            prop_assert_eq!(out.steps_used, limits.max_steps);
        }
        prop_assert!(world.bounds().contains(world.robot().position));
    }

    #[test]
    fn execution_is_deterministic(seed in any::<u64>()) {
        let source = plausible_program(seed);
        let limits = Limits { max_steps: 5_000, ..Limits::default() };
        let a = run_source(&source, &mut spawn_world(3).unwrap(), limits);
        let b = run_source(&source, &mut spawn_world(3).unwrap(), limits);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn arbitrary_trees_never_panic_the_interpreter(seed in any::<u64>()) {
        let source = pretty_print(&arbitrary_program(seed));
        let limits = Limits { max_steps: 2_000, ..Limits::default() };
        let r = catch_unwind(AssertUnwindSafe(|| run_source(&source, &mut WorldState::empty(), limits)));
        prop_assert!(r.is_ok(), "panicked on\n{}", source);
    }
}
