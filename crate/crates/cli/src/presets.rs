//! Scenario configs shipped with the binary.

pub const PRESETS: &[(&str, &str)] = &[
    (
        "free-saturation",
        include_str!("../presets/free-saturation.toml"),
    ),
    (
        "free-mandelstam",
        include_str!("../presets/free-mandelstam.toml"),
    ),
    ("accel-return", include_str!("../presets/accel-return.toml")),
    ("sho-case1", include_str!("../presets/sho-case1.toml")),
    (
        "sho-case2-pulsate",
        include_str!("../presets/sho-case2-pulsate.toml"),
    ),
    ("sho-anticorr", include_str!("../presets/sho-anticorr.toml")),
    (
        "inverted-runaway",
        include_str!("../presets/inverted-runaway.toml"),
    ),
];

pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}
