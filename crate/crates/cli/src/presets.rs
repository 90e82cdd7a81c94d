//! Bundled experiment configurations.

pub const PRESETS: &[(&str, &str)] = &[
    ("encode_fig4c", include_str!("../presets/encode_fig4c.toml")),
    ("fig3_ch", include_str!("../presets/fig3_ch.toml")),
    ("fig3_ch_path", include_str!("../presets/fig3_ch_path.toml")),
    ("fig3_cnot", include_str!("../presets/fig3_cnot.toml")),
    ("fig3_cnot_path", include_str!("../presets/fig3_cnot_path.toml")),
    ("fig3_cz", include_str!("../presets/fig3_cz.toml")),
    ("fig3_identity", include_str!("../presets/fig3_identity.toml")),
    ("fig3_iswap", include_str!("../presets/fig3_iswap.toml")),
    ("fig3_sqrt_swap", include_str!("../presets/fig3_sqrt_swap.toml")),
    ("fig3_swap", include_str!("../presets/fig3_swap.toml")),
    ("fig4a", include_str!("../presets/fig4a.toml")),
    ("fig4b", include_str!("../presets/fig4b.toml")),
    ("fig4c", include_str!("../presets/fig4c.toml")),
    ("fig4d", include_str!("../presets/fig4d.toml")),
    ("fig5a", include_str!("../presets/fig5a.toml")),
    ("fig5b", include_str!("../presets/fig5b.toml")),
    ("figS10a", include_str!("../presets/figS10a.toml")),
    ("figS10b", include_str!("../presets/figS10b.toml")),
    ("figS10c", include_str!("../presets/figS10c.toml")),
    ("figS11a", include_str!("../presets/figS11a.toml")),
    ("figS11b", include_str!("../presets/figS11b.toml")),
    ("figS11c", include_str!("../presets/figS11c.toml")),
    ("figS12a", include_str!("../presets/figS12a.toml")),
    ("figS12b", include_str!("../presets/figS12b.toml")),
    ("figS12c", include_str!("../presets/figS12c.toml")),
    ("figS13a", include_str!("../presets/figS13a.toml")),
    ("figS13b", include_str!("../presets/figS13b.toml")),
    ("figS1a", include_str!("../presets/figS1a.toml")),
    ("figS1b", include_str!("../presets/figS1b.toml")),
    ("figS1c", include_str!("../presets/figS1c.toml")),
    ("figS1d", include_str!("../presets/figS1d.toml")),
];

pub fn get(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

/// The `description` line of a preset, if any.
pub fn description(text: &str) -> &str {
    text.lines()
        .find_map(|l| l.strip_prefix("description = "))
        .map(|d| d.trim_matches('"'))
        .unwrap_or("")
}
