//! Window sizes and defaults for event assembly, loaded from `key=value` files.

use std::fs;
use std::path::Path;

use crate::error::ConfigError;
use crate::measure::ArrestRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeuristicConfig {
    /// Max token distance from an ANIMAL to a PRODUCT on its right for the two
    /// to form one event ("elephant ivory" has distance 1).
    pub pairing_window: usize,
    /// Max token distance from a CARDINAL to the species/product it counts.
    pub quantity_window: usize,
    /// Max token distance from an arrest lexeme to its number.
    pub arrest_window: usize,
    /// Arrest count when a lexeme appears without a number.
    pub arrest_default: u32,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        Self {
            pairing_window: 3,
            quantity_window: 2,
            arrest_window: 5,
            arrest_default: 1,
        }
    }
}

impl HeuristicConfig {
    /// Parses `key=value` lines. Blank lines and `#` comments are ignored;
    /// keys not present keep their defaults.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut config = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| ConfigError::Parse { line: i + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, found `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let number: u32 = value
                .parse()
                .map_err(|_| err(format!("`{value}` is not a non-negative integer")))?;
            match key {
                "pairing_window" => config.pairing_window = number as usize,
                "quantity_window" => config.quantity_window = number as usize,
                "arrest_window" => config.arrest_window = number as usize,
                "arrest_default" => config.arrest_default = number,
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn arrest_rule(&self) -> ArrestRule {
        ArrestRule {
            window: self.arrest_window,
            default_count: self.arrest_default,
        }
    }

    /// Inverse of [`parse`](Self::parse).
    pub fn to_text(&self) -> String {
        format!(
            "pairing_window={}\nquantity_window={}\narrest_window={}\narrest_default={}\n",
            self.pairing_window, self.quantity_window, self.arrest_window, self.arrest_default
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        assert_eq!(HeuristicConfig::parse("").unwrap(), HeuristicConfig::default());
        let config = HeuristicConfig::parse("# tuned\npairing_window = 1\n\narrest_default=0\n").unwrap();
        assert_eq!(config.pairing_window, 1);
        assert_eq!(config.arrest_default, 0);
        assert_eq!(config.quantity_window, 2);
        assert_eq!(HeuristicConfig::parse(&config.to_text()).unwrap(), config);
    }

    #[test]
    fn errors_carry_line_numbers() {
        for (text, line) in [
            ("x\n", 1),
            ("\nfoo=1\n", 2),
            ("pairing_window=-1", 1),
            ("arrest_window=", 1),
        ] {
            match HeuristicConfig::parse(text) {
                Err(ConfigError::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }
}
