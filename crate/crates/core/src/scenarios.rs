//! Scenarios shipped with the library.

use crate::error::{invalid, Result};
use crate::io::read_scenario;
use crate::sim::Scenario;

const BUILTIN: &[(&str, &str)] = &[
    ("balanced_demo", include_str!("../scenarios/balanced_demo.toml")),
    ("crisis_demo", include_str!("../scenarios/crisis_demo.toml")),
    ("green_transition_demo", include_str!("../scenarios/green_transition_demo.toml")),
    ("pandemic_demo", include_str!("../scenarios/pandemic_demo.toml")),
];

/// Builtin scenario names in sorted order.
pub fn names() -> impl Iterator<Item = &'static str> {
    BUILTIN.iter().map(|(n, _)| *n)
}

/// The TOML source of a builtin scenario.
pub fn source(name: &str) -> Option<&'static str> {
    BUILTIN.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Parses a builtin scenario. `None` if no scenario has that name.
pub fn builtin(name: &str) -> Option<Result<Scenario>> {
    source(name).map(|s| read_scenario(s.as_bytes()))
}

/// Like [`builtin`] with an unknown name reported as an error.
pub fn load(name: &str) -> Result<Scenario> {
    builtin(name).unwrap_or_else(|| Err(invalid(format!("unknown scenario {name:?}"))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_builtins_parse() {
        for name in names() {
            let s = load(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(s.name, name);
        }
        assert!(builtin("nope").is_none());
        let sorted: Vec<_> = names().collect();
        assert!(sorted.windows(2).all(|w| w[0] < w[1]));
    }
}
