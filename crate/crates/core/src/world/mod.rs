//! Deterministic 2D room simulation.
//!
//! A [`WorldState`] holds a rectangular room, a single quadruped robot and a
//! static set of fiducial-tagged objects. Primitive actions advance a
//! simulated clock and append to an event trace; nothing here reads the wall
//! clock except [`WorldState::wait_for_user`] in interactive mode.

mod layout;
mod signal;

pub use layout::{layout_for_trial, WorldLayout, LAYOUT_SOURCES};
pub use signal::UserSignal;

use std::f64::consts::PI;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

/// Tolerance used for geometric predicates (disc membership, bounds).
pub const GEOM_EPS: f64 = 1e-9;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum WorldError {
    #[error("unknown trial context {0} (expected 1..=7)")]
    UnknownContext(u8),
    #[error("target ({x}, {y}) is outside the room bounds")]
    OutOfBounds { x: f64, y: f64 },
    #[error("unknown fiducial id {0}")]
    UnknownFiducial(u32),
    #[error("utterance must not be empty")]
    EmptyUtterance,
    #[error("duplicate fiducial id {0}")]
    DuplicateFiducial(u32),
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    fn sub(self, other: Point) -> Point {
        Point::new(self.x - other.x, self.y - other.y)
    }

    fn add_scaled(self, dir: Point, s: f64) -> Point {
        Point::new(self.x + dir.x * s, self.y + dir.y * s)
    }

    fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.3}, {:.3})", self.x, self.y)
    }
}

/// Euclidean distance in meters.
pub fn distance(a: Point, b: Point) -> f64 {
    a.sub(b).norm()
}

/// Shortest distance from `p` to the closed segment `a`-`b`.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.x * ab.x + ab.y * ab.y;
    if len2 == 0.0 {
        return distance(p, a);
    }
    let t = (((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2).clamp(0.0, 1.0);
    distance(p, a.add_scaled(ab, t))
}

/// Normalizes an angle into `[-π, π)`.
pub fn normalize_heading(theta: f64) -> f64 {
    let wrapped = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if wrapped >= PI {
        -PI
    } else {
        wrapped
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Chair,
    Person,
    Donut,
    Apple,
    Refrigerator,
    Oven,
    Microwave,
}

impl Label {
    pub const ALL: [Label; 7] =
        [Label::Chair, Label::Person, Label::Donut, Label::Apple, Label::Refrigerator, Label::Oven, Label::Microwave];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Chair => "chair",
            Label::Person => "person",
            Label::Donut => "donut",
            Label::Apple => "apple",
            Label::Refrigerator => "refrigerator",
            Label::Oven => "oven",
            Label::Microwave => "microwave",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Label::ALL.into_iter().find(|l| l.as_str() == s).ok_or_else(|| format!("unknown label `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fiducial {
    pub id: u32,
    pub label: Label,
    pub position: Point,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: Point,
    pub max: Point,
}

impl Bounds {
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x - GEOM_EPS
            && p.x <= self.max.x + GEOM_EPS
            && p.y >= self.min.y - GEOM_EPS
            && p.y <= self.max.y + GEOM_EPS
    }

    fn clamp(&self, p: Point) -> Point {
        Point::new(p.x.clamp(self.min.x, self.max.x), p.y.clamp(self.min.y, self.max.y))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub position: Point,
    /// Radians in `[-π, π)`.
    pub heading: f64,
    /// Meters per second.
    pub speed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Moved,
    Spoke,
    Nudged,
    Waited,
    SafetyViolation,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::Moved => "moved",
            EventKind::Spoke => "spoke",
            EventKind::Nudged => "nudged",
            EventKind::Waited => "waited",
            EventKind::SafetyViolation => "safety_violation",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldEvent {
    pub time: f64,
    pub kind: EventKind,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionResult {
    pub ok: bool,
    pub elapsed: f64,
    pub message: String,
}

/// Fixed simulation constants. Meters and seconds throughout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimParams {
    pub robot_speed: f64,
    /// Approach speed used by `nudge` inside the person-safety radius.
    pub nudge_speed: f64,
    pub person_safety_radius: f64,
    pub contact_standoff: f64,
    pub speech_time: f64,
    /// Radius that defines "near" for object/person proximity.
    pub proximity_radius: f64,
    /// Simulated delay before the user signal auto-fires in headless mode.
    pub auto_wait_delay: f64,
    /// Longest wait before `wait_for_user` gives up.
    pub max_wait: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            robot_speed: 1.0,
            nudge_speed: 0.25,
            person_safety_radius: 0.5,
            contact_standoff: 0.3,
            speech_time: 1.0,
            proximity_radius: 1.5,
            auto_wait_delay: 2.0,
            max_wait: 60.0,
        }
    }
}

/// Called with the wait prompt before an interactive wait blocks.
pub type WaitAnnouncer = Arc<dyn Fn(&str) + Send + Sync>;

#[derive(Clone, Default)]
pub enum WaitMode {
    #[default]
    Headless,
    Interactive {
        signal: UserSignal,
        announce: Option<WaitAnnouncer>,
    },
}

impl fmt::Debug for WaitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WaitMode::Headless => f.write_str("Headless"),
            WaitMode::Interactive { signal, .. } => f.debug_struct("Interactive").field("signal", signal).finish(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalState {
    Pending,
    Delivered,
}

#[derive(Debug, Clone)]
pub struct WorldState {
    bounds: Bounds,
    robot: RobotState,
    fiducials: Vec<Fiducial>,
    sim_clock: f64,
    events: Vec<WorldEvent>,
    params: SimParams,
    wait_mode: WaitMode,
    user_signal: SignalState,
}

impl WorldState {
    /// Builds a world; fiducials are sorted by id and ids must be unique.
    pub fn new(
        bounds: Bounds,
        robot_start: Point,
        heading: f64,
        mut fiducials: Vec<Fiducial>,
        params: SimParams,
    ) -> Result<Self, WorldError> {
        if !(bounds.min.x < bounds.max.x && bounds.min.y < bounds.max.y) {
            return Err(WorldError::InvalidLayout("degenerate bounds".into()));
        }
        if !bounds.contains(robot_start) {
            return Err(WorldError::InvalidLayout("robot starts outside bounds".into()));
        }
        if !(params.robot_speed > 0.0 && params.nudge_speed > 0.0) {
            return Err(WorldError::InvalidLayout("speeds must be positive".into()));
        }
        fiducials.sort_by_key(|f| f.id);
        for pair in fiducials.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(WorldError::DuplicateFiducial(pair[0].id));
            }
        }
        for f in &fiducials {
            if !bounds.contains(f.position) {
                return Err(WorldError::InvalidLayout(format!("fiducial {} outside bounds", f.id)));
            }
        }
        Ok(WorldState {
            bounds,
            robot: RobotState { position: robot_start, heading: normalize_heading(heading), speed: params.robot_speed },
            fiducials,
            sim_clock: 0.0,
            events: Vec::new(),
            params,
            wait_mode: WaitMode::Headless,
            user_signal: SignalState::Pending,
        })
    }

    /// An empty room with default bounds and parameters.
    pub fn empty() -> Self {
        let bounds = Bounds { min: Point::new(-10.0, -10.0), max: Point::new(10.0, 10.0) };
        WorldState::new(bounds, Point::ORIGIN, 0.0, Vec::new(), SimParams::default()).expect("empty world is valid")
    }

    pub fn with_wait_mode(mut self, mode: WaitMode) -> Self {
        self.wait_mode = mode;
        self
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn robot(&self) -> RobotState {
        self.robot
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    pub fn set_max_wait(&mut self, seconds: f64) {
        self.params.max_wait = seconds;
    }

    pub fn sim_clock(&self) -> f64 {
        self.sim_clock
    }

    pub fn events(&self) -> &[WorldEvent] {
        &self.events
    }

    pub fn user_signal(&self) -> SignalState {
        self.user_signal
    }

    pub fn fiducial(&self, id: u32) -> Option<&Fiducial> {
        self.fiducials.binary_search_by_key(&id, |f| f.id).ok().map(|i| &self.fiducials[i])
    }

    /// Every fiducial is in view; ordered by id.
    pub fn visible_fiducials(&self) -> Vec<Fiducial> {
        self.fiducials.clone()
    }

    /// Removes a fiducial from the scene before a run starts.
    pub fn without_fiducial(mut self, id: u32) -> Self {
        self.fiducials.retain(|f| f.id != id);
        self
    }

    /// The fiducial with `label` closest to the robot; ties go to the lowest id.
    pub fn nearest(&self, label: Label) -> Option<Fiducial> {
        let here = self.robot.position;
        let mut best: Option<(f64, Fiducial)> = None;
        for f in self.fiducials.iter().filter(|f| f.label == label) {
            let d = distance(here, f.position);
            match best {
                Some((bd, _)) if d >= bd => {}
                _ => best = Some((d, *f)),
            }
        }
        best.map(|(_, f)| f)
    }

    /// Compact text summary of the scene handed to agents as context.
    pub fn digest(&self) -> String {
        let mut out =
            format!("Robot at {} heading {:.3} rad. Visible objects:\n", self.robot.position, self.robot.heading);
        for f in &self.fiducials {
            out.push_str(&format!(
                "- id {}: {} at {}, {:.2} m away\n",
                f.id,
                f.label,
                f.position,
                distance(self.robot.position, f.position)
            ));
        }
        out
    }

    fn push_event(&mut self, kind: EventKind, detail: impl Into<String>) {
        self.events.push(WorldEvent { time: self.sim_clock, kind, detail: detail.into() });
    }

    fn persons_except(&self, skip: Option<u32>) -> impl Iterator<Item = &Fiducial> {
        self.fiducials.iter().filter(move |f| f.label == Label::Person && Some(f.id) != skip)
    }

    /// Final resting point for a walk: the target, or the closest point to it
    /// that keeps the person-safety radius from every person.
    fn approach_point(&self, target: Point) -> Point {
        let r = self.params.person_safety_radius;
        let mut goal = target;
        for p in self.persons_except(None) {
            let d = distance(goal, p.position);
            if d < r - GEOM_EPS {
                let mut dir = goal.sub(p.position);
                if dir.norm() == 0.0 {
                    dir = self.robot.position.sub(p.position);
                }
                if dir.norm() == 0.0 {
                    dir = Point::new(-1.0, 0.0);
                }
                let n = dir.norm();
                goal = p.position.add_scaled(Point::new(dir.x / n, dir.y / n), r);
            }
        }
        self.bounds.clamp(goal)
    }

    fn move_robot(&mut self, to: Point) {
        let from = self.robot.position;
        let delta = to.sub(from);
        if delta.norm() > 0.0 {
            self.robot.heading = normalize_heading(delta.y.atan2(delta.x));
        }
        self.robot.position = to;
    }

    fn record_violations(&mut self, from: Point, to: Point, skip: Option<u32>) -> usize {
        let r = self.params.person_safety_radius;
        let hits: Vec<(u32, f64)> = self
            .persons_except(skip)
            .map(|p| (p.id, point_segment_distance(p.position, from, to)))
            .filter(|(_, d)| *d < r - GEOM_EPS)
            .collect();
        for (id, d) in &hits {
            self.push_event(EventKind::SafetyViolation, format!("path passed {d:.3} m from person {id}"));
        }
        hits.len()
    }

    pub fn walk_to(&mut self, target: Point) -> Result<ActionResult, WorldError> {
        if !self.bounds.contains(target) || !target.x.is_finite() || !target.y.is_finite() {
            return Err(WorldError::OutOfBounds { x: target.x, y: target.y });
        }
        let from = self.robot.position;
        let to = self.approach_point(target);
        let length = distance(from, to);
        let elapsed = length / self.params.robot_speed;
        self.sim_clock += elapsed;
        self.move_robot(to);
        self.push_event(EventKind::Moved, format!("to {to}"));
        let violations = self.record_violations(from, to, None);
        Ok(ActionResult {
            ok: violations == 0,
            elapsed,
            message: if violations == 0 {
                format!("arrived at {to}")
            } else {
                format!("arrived at {to} with {violations} safety violation(s)")
            },
        })
    }

    /// Walks up to contact standoff with a fiducial. Inside the person-safety
    /// radius the robot slows to `nudge_speed`.
    pub fn nudge(&mut self, fiducial_id: u32) -> Result<ActionResult, WorldError> {
        let target = *self.fiducial(fiducial_id).ok_or(WorldError::UnknownFiducial(fiducial_id))?;
        let from = self.robot.position;
        let mut dir = from.sub(target.position);
        if dir.norm() == 0.0 {
            dir = Point::new(-self.robot.heading.cos(), -self.robot.heading.sin());
        }
        let n = dir.norm();
        let unit = Point::new(dir.x / n, dir.y / n);
        let standoff = self.params.contact_standoff;
        let to = self.bounds.clamp(target.position.add_scaled(unit, standoff));

        let start_gap = distance(from, target.position);
        let length = distance(from, to);
        let slow = if start_gap > standoff {
            (start_gap.min(self.params.person_safety_radius) - standoff).clamp(0.0, length)
        } else {
            length
        };
        let elapsed = (length - slow) / self.params.robot_speed + slow / self.params.nudge_speed;
        self.sim_clock += elapsed;
        self.move_robot(to);
        self.push_event(EventKind::Moved, format!("to {to}"));
        let violations = self.record_violations(from, to, Some(target.id));
        self.push_event(EventKind::Nudged, format!("{} {}", target.label, target.id));
        Ok(ActionResult {
            ok: true,
            elapsed,
            message: format!("nudged {} {} ({violations} safety violation(s) on approach)", target.label, target.id),
        })
    }

    pub fn say(&mut self, text: &str) -> Result<ActionResult, WorldError> {
        if text.trim().is_empty() {
            return Err(WorldError::EmptyUtterance);
        }
        let elapsed = self.params.speech_time;
        self.sim_clock += elapsed;
        self.push_event(EventKind::Spoke, text);
        Ok(ActionResult { ok: true, elapsed, message: "spoke".into() })
    }

    /// Waits for the user's go-ahead. Headless mode auto-delivers after
    /// `auto_wait_delay`; interactive mode blocks on the [`UserSignal`].
    pub fn wait_for_user(&mut self, prompt_text: &str) -> ActionResult {
        let max_wait = self.params.max_wait;
        let (waited, ok) = match &self.wait_mode {
            WaitMode::Headless => {
                let delay = self.params.auto_wait_delay;
                if delay > max_wait {
                    (max_wait, false)
                } else {
                    (delay, true)
                }
            }
            WaitMode::Interactive { signal, announce } => {
                let started = Instant::now();
                if let Some(announce) = announce {
                    announce(prompt_text);
                }
                let ok = signal.wait_timeout(Duration::from_secs_f64(max_wait.max(0.0)));
                (started.elapsed().as_secs_f64().min(max_wait), ok)
            }
        };
        self.user_signal = if ok { SignalState::Delivered } else { SignalState::Pending };
        self.sim_clock += waited;
        self.push_event(
            EventKind::Waited,
            if ok {
                format!("{waited:.3} s: {prompt_text}")
            } else {
                format!("timed out after {waited:.3} s: {prompt_text}")
            },
        );
        // consumed; the next wait needs a fresh signal
        self.user_signal = SignalState::Pending;
        ActionResult {
            ok,
            elapsed: waited,
            message: if ok { "user ready".into() } else { "timed out waiting for user".into() },
        }
    }

    /// Writes events as JSON lines: `{"time":..,"kind":..,"detail":..}`.
    pub fn export_trace<W: Write>(&self, out: W) -> io::Result<()> {
        export_events(&self.events, out)
    }
}

pub fn export_events<W: Write>(events: &[WorldEvent], mut out: W) -> io::Result<()> {
    for e in events {
        serde_json::to_writer(&mut out, e)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Spawns the canonical room for one of the seven trial contexts.
pub fn spawn_world(context_id: u8) -> Result<WorldState, WorldError> {
    layout_for_trial(context_id)?.into_world(SimParams::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_world(persons: &[(u32, f64, f64)]) -> WorldState {
        let fids = persons
            .iter()
            .map(|&(id, x, y)| Fiducial { id, label: Label::Person, position: Point::new(x, y) })
            .collect();
        let bounds = Bounds { min: Point::new(-10.0, -10.0), max: Point::new(10.0, 10.0) };
        WorldState::new(bounds, Point::ORIGIN, 0.0, fids, SimParams::default()).unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(Point::new(0.0, 0.0), Point::new(3.0, 4.0)), 5.0);
        assert_eq!(distance(Point::new(1.0, 1.0), Point::new(1.0, 1.0)), 0.0);
        assert!((distance(Point::ORIGIN, Point::new(1.0, 1.0)) - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn straight_walk() {
        let mut w = flat_world(&[]);
        let r = w.walk_to(Point::new(3.0, 0.0)).unwrap();
        assert!(r.ok);
        assert_eq!(r.elapsed, 3.0);
        assert_eq!(w.robot().position, Point::new(3.0, 0.0));
        assert_eq!(w.events().len(), 1);
        assert_eq!(w.events()[0].kind, EventKind::Moved);
    }

    #[test]
    fn walk_in_place() {
        let mut w = flat_world(&[]);
        let r = w.walk_to(Point::ORIGIN).unwrap();
        assert!(r.ok);
        assert_eq!(r.elapsed, 0.0);
    }

    #[test]
    fn walk_past_person_is_a_violation() {
        // person sits on the path: segment distance 0 < 0.5
        let mut w = flat_world(&[(1, 1.5, 0.0)]);
        let r = w.walk_to(Point::new(3.0, 0.0)).unwrap();
        assert!(!r.ok);
        assert!(w.events().iter().any(|e| e.kind == EventKind::SafetyViolation));
    }

    #[test]
    fn walk_near_but_clear_of_person() {
        // 0.6 m off the path, outside the 0.5 m disc
        let mut w = flat_world(&[(1, 1.5, 0.6)]);
        let r = w.walk_to(Point::new(3.0, 0.0)).unwrap();
        assert!(r.ok);
        assert!(w.events().iter().all(|e| e.kind != EventKind::SafetyViolation));
    }

    #[test]
    fn walk_to_person_stops_at_safety_radius() {
        let mut w = flat_world(&[(1, 4.0, 0.0)]);
        let r = w.walk_to(Point::new(4.0, 0.0)).unwrap();
        assert!(r.ok);
        let d = distance(w.robot().position, Point::new(4.0, 0.0));
        assert!((d - 0.5).abs() < 1e-9);
        assert!((r.elapsed - 3.5).abs() < 1e-9);
    }

    #[test]
    fn out_of_bounds_walk_is_rejected() {
        let mut w = flat_world(&[]);
        assert!(matches!(w.walk_to(Point::new(50.0, 0.0)), Err(WorldError::OutOfBounds { .. })));
        assert!(w.events().is_empty());
    }

    #[test]
    fn nudge_reaches_contact_standoff() {
        let mut w = flat_world(&[(4, 2.0, 0.0)]);
        let r = w.nudge(4).unwrap();
        assert!(r.ok);
        assert!((distance(w.robot().position, Point::new(2.0, 0.0)) - 0.3).abs() < 1e-9);
        // 1.5 m at 1 m/s, then 0.2 m at 0.25 m/s
        assert!((r.elapsed - (1.5 + 0.8)).abs() < 1e-9);
        assert_eq!(w.events().last().unwrap().kind, EventKind::Nudged);
        assert!(w.events().iter().all(|e| e.kind != EventKind::SafetyViolation));
    }

    #[test]
    fn nudge_unknown_fiducial() {
        let mut w = WorldState::empty();
        assert_eq!(w.nudge(99), Err(WorldError::UnknownFiducial(99)));
    }

    #[test]
    fn nudge_chair_is_permitted() {
        let mut w = spawn_world(1).unwrap();
        let chair = w.nearest(Label::Chair).unwrap();
        assert!(w.nudge(chair.id).unwrap().ok);
        assert_eq!(w.events().last().unwrap().kind, EventKind::Nudged);
    }

    #[test]
    fn say_and_empty_say() {
        let mut w = WorldState::empty();
        let r = w.say("Follow me to the chair").unwrap();
        assert_eq!(r.elapsed, 1.0);
        assert_eq!(w.events()[0].kind, EventKind::Spoke);
        assert_eq!(w.say(""), Err(WorldError::EmptyUtterance));
    }

    #[test]
    fn headless_wait() {
        let mut w = WorldState::empty();
        let r = w.wait_for_user("ready?");
        assert!(r.ok);
        assert_eq!(r.elapsed, 2.0);
        assert_eq!(w.events()[0].kind, EventKind::Waited);
    }

    #[test]
    fn headless_wait_times_out() {
        let mut w = WorldState::empty();
        w.params.max_wait = 1.0;
        let r = w.wait_for_user("ready?");
        assert!(!r.ok);
        assert_eq!(r.elapsed, 1.0);
    }

    #[test]
    fn interactive_wait_delivered_from_another_thread() {
        let signal = UserSignal::new();
        let mut w =
            WorldState::empty().with_wait_mode(WaitMode::Interactive { signal: signal.clone(), announce: None });
        let remote = signal.clone();
        let handle = std::thread::spawn(move || {
            std::thread::sleep(Duration::from_millis(20));
            remote.deliver();
        });
        let r = w.wait_for_user("ready?");
        handle.join().unwrap();
        assert!(r.ok);
        assert_eq!(w.user_signal(), SignalState::Pending);
    }

    #[test]
    fn interactive_wait_times_out() {
        let mut w =
            WorldState::empty().with_wait_mode(WaitMode::Interactive { signal: UserSignal::new(), announce: None });
        w.params.max_wait = 0.05;
        assert!(!w.wait_for_user("ready?").ok);
    }

    #[test]
    fn nearest_tie_breaks_on_lowest_id() {
        let w = flat_world(&[(7, 2.0, 0.0), (3, -2.0, 0.0), (9, 0.0, 2.0)]);
        assert_eq!(w.nearest(Label::Person).unwrap().id, 3);
        assert!(w.nearest(Label::Oven).is_none());
    }

    #[test]
    fn heading_normalization() {
        assert_eq!(normalize_heading(PI), -PI);
        assert!((normalize_heading(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert_eq!(normalize_heading(0.0), 0.0);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let bounds = Bounds { min: Point::new(-1.0, -1.0), max: Point::new(1.0, 1.0) };
        let f = Fiducial { id: 1, label: Label::Apple, position: Point::ORIGIN };
        let err = WorldState::new(bounds, Point::ORIGIN, 0.0, vec![f, f], SimParams::default());
        assert_eq!(err.unwrap_err(), WorldError::DuplicateFiducial(1));
    }

    #[test]
    fn trace_export_is_json_lines() {
        let mut w = WorldState::empty();
        w.say("hello").unwrap();
        w.walk_to(Point::new(1.0, 0.0)).unwrap();
        let mut buf = Vec::new();
        w.export_trace(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        let first: WorldEvent = serde_json::from_str(lines[0]).unwrap();
        assert_eq!(first.kind, EventKind::Spoke);
        assert!(lines[1].contains("\"kind\":\"moved\""));
    }
}
