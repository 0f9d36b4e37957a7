//! Scenes shipped with the library.

use crate::error::{Error, Result};
use crate::world::World;

const SCENES: [(&str, &str); 3] = [
    ("single_room", include_str!("../worlds/single_room.txt")),
    ("two_rooms", include_str!("../worlds/two_rooms.txt")),
    ("loop", include_str!("../worlds/loop.txt")),
];

/// Names of the bundled scenes.
pub fn names() -> impl Iterator<Item = &'static str> {
    SCENES.iter().map(|(n, _)| *n)
}

/// Scene text by name.
pub fn source(name: &str) -> Option<&'static str> {
    SCENES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn load(name: &str) -> Result<World> {
    let text = source(name).ok_or_else(|| Error::invalid(format!("no bundled world named '{name}'")))?;
    World::parse(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_parse() {
        for n in names() {
            let w = load(n).unwrap();
            assert!(w.landmarks().len() >= 10);
            let s = w.start();
            assert!(w.bounds().contains(s.x, s.y) && !w.inside_obstacle(s.x, s.y));
        }
        assert!(load("nowhere").is_err());
    }
}
