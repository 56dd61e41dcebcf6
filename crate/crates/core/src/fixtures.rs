//! The bundled example extensions, as config text.

use crate::config::RunConfig;
use crate::error::Result;

pub const AS_INDEPENDENT_P2: &str = include_str!("../fixtures/as_independent_p2.toml");
pub const AS_INDEPENDENT_P3: &str = include_str!("../fixtures/as_independent_p3.toml");
pub const AS_INDEPENDENT_P5: &str = include_str!("../fixtures/as_independent_p5.toml");
pub const AS_DEPENDENT: &str = include_str!("../fixtures/as_dependent.toml");
pub const KUMMER_P2: &str = include_str!("../fixtures/kummer_p2.toml");
pub const TOWER: &str = include_str!("../fixtures/tower.toml");
pub const TOWER_STAGED: &str = include_str!("../fixtures/tower_staged.toml");

pub const ALL: [(&str, &str); 7] = [
    ("as_independent_p2", AS_INDEPENDENT_P2),
    ("as_independent_p3", AS_INDEPENDENT_P3),
    ("as_independent_p5", AS_INDEPENDENT_P5),
    ("as_dependent", AS_DEPENDENT),
    ("kummer_p2", KUMMER_P2),
    ("tower", TOWER),
    ("tower_staged", TOWER_STAGED),
];

/// Parses one of the bundled configs.
pub fn load(text: &str) -> Result<RunConfig> {
    RunConfig::from_toml(text)
}
