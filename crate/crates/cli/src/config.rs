use std::path::Path;

use serde::Deserialize;

use crate::CliError;

/// Optional settings read from `--config`. Every field can also be given as
/// a flag; flags win, then this file, then built-in defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: Option<String>,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    pub nu: Option<f64>,
    pub g: Option<f64>,
    pub h: Option<f64>,
    pub z: Option<f64>,
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
    /// `start:stop:step` for `scan`.
    pub z_grid: Option<String>,
    pub bracket: Option<[f64; 2]>,
    pub samples: Option<usize>,
    pub margin: Option<f64>,
    pub verify: Option<bool>,
    pub branch: Option<String>,
    pub weights: Option<Vec<f64>>,
    pub epsilon: Option<f64>,
    pub tol: Option<f64>,
    pub out: Option<String>,
    pub report: Option<String>,
    pub quiet: Option<bool>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("invalid config {}: {e}", path.display())))
    }
}

/// `start:stop:step` with an inclusive end point.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(CliError::config(format!("grid `{text}` must have the form start:stop:step")));
    };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| CliError::config(format!("bad number `{s}` in grid `{text}`")));
    ptgraph_core::stability::linear_grid(num(start)?, num(stop)?, num(step)?).map_err(CliError::from)
}

pub fn parse_weights(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| CliError::config(format!("bad weight `{s}`"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_forms() {
        assert_eq!(parse_grid("0:1:0.5").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("-1:1:1").unwrap(), vec![-1.0, 0.0, 1.0]);
        for bad in ["", "0:1", "0:1:0", "1:0:0.1", "a:1:0.1", "0:1:0.1:2"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn weights() {
        assert_eq!(parse_weights("1, 2,3").unwrap(), vec![1.0, 2.0, 3.0]);
        assert!(parse_weights("1,x").is_err());
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"gama": 1.0}"#).is_err());
        let c: RunConfig = serde_json::from_str(r#"{"K": 3, "bracket": [1.001, 1.1]}"#).unwrap();
        assert_eq!(c.k, Some(3));
        assert_eq!(c.bracket, Some([1.001, 1.1]));
    }
}
