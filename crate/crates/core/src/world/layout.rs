//! Room layouts as TOML documents.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Bounds, Fiducial, Label, Point, SimParams, WorldError, WorldState};

/// Canonical layouts for trial contexts 1 through 7, in order.
pub const LAYOUT_SOURCES: [&str; 7] = [
    include_str!("../../fixtures/layouts/trial1.toml"),
    include_str!("../../fixtures/layouts/trial2.toml"),
    include_str!("../../fixtures/layouts/trial3.toml"),
    include_str!("../../fixtures/layouts/trial4.toml"),
    include_str!("../../fixtures/layouts/trial5.toml"),
    include_str!("../../fixtures/layouts/trial6.toml"),
    include_str!("../../fixtures/layouts/trial7.toml"),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotStart {
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub heading: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiducialRecord {
    pub id: u32,
    pub label: Label,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldLayout {
    pub name: String,
    pub bounds: Bounds,
    pub robot: RobotStart,
    #[serde(default, rename = "fiducial")]
    pub fiducials: Vec<FiducialRecord>,
}

impl WorldLayout {
    pub fn from_toml(text: &str) -> Result<Self, WorldError> {
        toml::from_str(text).map_err(|e| WorldError::InvalidLayout(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("layout serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, WorldError> {
        let text = fs::read_to_string(path.as_ref())
            .map_err(|e| WorldError::InvalidLayout(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_toml(&text)
    }

    pub fn into_world(self, params: SimParams) -> Result<WorldState, WorldError> {
        let fiducials = self
            .fiducials
            .iter()
            .map(|r| Fiducial { id: r.id, label: r.label, position: Point::new(r.x, r.y) })
            .collect();
        WorldState::new(self.bounds, Point::new(self.robot.x, self.robot.y), self.robot.heading, fiducials, params)
    }
}

pub fn layout_for_trial(context_id: u8) -> Result<WorldLayout, WorldError> {
    let idx = usize::from(context_id)
        .checked_sub(1)
        .filter(|i| *i < LAYOUT_SOURCES.len())
        .ok_or(WorldError::UnknownContext(context_id))?;
    WorldLayout::from_toml(LAYOUT_SOURCES[idx])
}
