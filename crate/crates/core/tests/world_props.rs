//! Simulator invariants over random rooms and action sequences.

use std::f64::consts::PI;

use proptest::prelude::*;
use robobench::world::{
    distance, normalize_heading, spawn_world, Bounds, EventKind, Fiducial, Label, Point, SimParams, WorldState,
};

fn bounds() -> Bounds {
    Bounds { min: Point::new(-8.0, -6.0), max: Point::new(8.0, 6.0) }
}

fn point_inside() -> impl Strategy<Value = Point> {
    (-7.0..7.0f64, -5.0..5.0f64).prop_map(|(x, y)| Point::new(x, y))
}

fn label() -> impl Strategy<Value = Label> {
    prop::sample::select(Label::ALL.to_vec())
}

fn room() -> impl Strategy<Value = WorldState> {
    (point_inside(), -10.0..10.0f64, prop::collection::vec((label(), point_inside()), 0..8)).prop_map(
        |(start, heading, items)| {
            let fiducials = items
                .into_iter()
                .enumerate()
                .map(|(i, (label, position))| Fiducial { id: i as u32 + 1, label, position })
                .collect();
            WorldState::new(bounds(), start, heading, fiducials, SimParams::default()).unwrap()
        },
    )
}

#[derive(Debug, Clone)]
enum Action {
    Walk(Point),
    Nudge(u32),
    Say(String),
    Wait,
}

fn action() -> impl Strategy<Value = Action> {
    prop_oneof![
        (-12.0..12.0f64, -9.0..9.0f64).prop_map(|(x, y)| Action::Walk(Point::new(x, y))),
        (0u32..10).prop_map(Action::Nudge),
        "[ a-z]{0,6}".prop_map(Action::Say),
        Just(Action::Wait),
    ]
}

proptest! {
    #[test]
    fn heading_is_normalized(theta in -1e6..1e6f64) {
        let h = normalize_heading(theta);
        prop_assert!((-PI..PI).contains(&h));
        // same direction
        prop_assert!((h.sin() - theta.sin()).abs() < 1e-6 && (h.cos() - theta.cos()).abs() < 1e-6);
    }

    #[test]
    fn robot_stays_in_bounds_and_clock_never_runs_backwards(
        mut world in room(),
        actions in prop::collection::vec(action(), 1..25),
    ) {
        let mut clock = world.sim_clock();
        for a in actions {
            let before = world.robot().position;
            let result = match &a {
                Action::Walk(p) => world.walk_to(*p).map(|r| r.elapsed),
                Action::Nudge(id) => world.nudge(*id).map(|r| r.elapsed),
                Action::Say(text) => world.say(text).map(|r| r.elapsed),
                Action::Wait => Ok(world.wait_for_user("go").elapsed),
            };
            match result {
                Ok(elapsed) => {
                    prop_assert!(elapsed >= 0.0);
                    prop_assert!((world.sim_clock() - (clock + elapsed)).abs() < 1e-9);
                }
                // failed actions leave the robot where it was
                Err(_) => prop_assert_eq!(world.robot().position, before),
            }
            prop_assert!(world.sim_clock() >= clock);
            clock = world.sim_clock();
            prop_assert!(world.bounds().contains(world.robot().position), "{:?} after {:?}", world.robot(), a);
            prop_assert!((-PI..PI).contains(&world.robot().heading));
        }
        let times: Vec<f64> = world.events().iter().map(|e| e.time).collect();
        prop_assert!(times.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn walking_costs_distance_over_speed(start in point_inside(), target in point_inside()) {
        let mut world = WorldState::new(bounds(), start, 0.0, vec![], SimParams::default()).unwrap();
        let r = world.walk_to(target).unwrap();
        prop_assert!(r.ok);
        prop_assert!((r.elapsed - distance(start, target) / SimParams::default().robot_speed).abs() < 1e-9);
        prop_assert_eq!(world.robot().position, target);
    }

    #[test]
    fn walks_end_outside_the_safety_radius_of_a_lone_person(
        start in point_inside(),
        person in (-6.0..6.0f64, -4.0..4.0f64).prop_map(|(x, y)| Point::new(x, y)),
        target in point_inside(),
    ) {
        let params = SimParams::default();
        let f = Fiducial { id: 1, label: Label::Person, position: person };
        let mut world = WorldState::new(bounds(), start, 0.0, vec![f], params).unwrap();
        world.walk_to(target).unwrap();
        prop_assert!(distance(world.robot().position, person) >= params.person_safety_radius - 1e-9);
    }

    #[test]
    fn nudge_stops_at_the_contact_standoff(
        start in point_inside(),
        target in (-6.0..6.0f64, -4.0..4.0f64).prop_map(|(x, y)| Point::new(x, y)),
        label in label(),
    ) {
        prop_assume!(distance(start, target) > 1e-6);
        let params = SimParams::default();
        let f = Fiducial { id: 4, label, position: target };
        let mut world = WorldState::new(bounds(), start, 0.0, vec![f], params).unwrap();
        let r = world.nudge(4).unwrap();
        prop_assert!(r.ok);
        prop_assert!((distance(world.robot().position, target) - params.contact_standoff).abs() < 1e-9);
        // the nudged fiducial is never counted as a violation
        prop_assert!(world.events().iter().all(|e| e.kind != EventKind::SafetyViolation));
        // approach never beats full speed and never undercuts nudge speed
        let travelled = distance(start, world.robot().position);
        prop_assert!(r.elapsed >= travelled / params.robot_speed - 1e-9);
        prop_assert!(r.elapsed <= travelled / params.nudge_speed + 1e-9);
    }
}

#[test]
fn canonical_rooms_are_stable() {
    for id in 1..=7 {
        let a = spawn_world(id).unwrap();
        let b = spawn_world(id).unwrap();
        assert_eq!(a.digest(), b.digest());
        assert_eq!(a.sim_clock(), 0.0);
    }
}
