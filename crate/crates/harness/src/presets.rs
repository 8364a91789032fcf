//! Spec files shipped with the crate, embedded at build time.

pub const PRESETS: &[(&str, &str)] = &[
    ("smoke", include_str!("../presets/smoke.toml")),
    ("table1", include_str!("../presets/table1.toml")),
    ("table2", include_str!("../presets/table2.toml")),
    ("table3", include_str!("../presets/table3.toml")),
    ("table4", include_str!("../presets/table4.toml")),
    ("table5", include_str!("../presets/table5.toml")),
    ("table6", include_str!("../presets/table6.toml")),
    ("table7", include_str!("../presets/table7.toml")),
    ("table8", include_str!("../presets/table8.toml")),
];

pub fn get(id: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(k, _)| *k == id).map(|(_, v)| *v)
}

pub fn ids() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(k, _)| *k)
}
