pub mod directional;
mod recurrence;
pub mod vanilla;
