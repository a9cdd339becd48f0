//! Flag/file configuration merging and value parsing.
//!
//! Every command resolves its parameters with the precedence
//! flag > config file > built-in default, and echoes the fully resolved
//! values into its output artifact.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;

/// Optional values a JSON config file may supply. Field names match the
/// long flag names with `-` replaced by `_`.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub n_alice: Option<usize>,
    pub n_bob: Option<usize>,
    pub alpha: Option<String>,
    pub beta: Option<String>,
    pub kind: Option<String>,
    pub grid: Option<String>,
    pub p: Option<f64>,
    pub format: Option<crate::output::OutputFormat>,
    pub out: Option<PathBuf>,
    pub normalize: Option<bool>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
                serde_json::from_str(&text)
                    .map_err(|e| format!("cannot parse config {}: {e}", p.display()))
            }
        }
    }
}

/// Parse one amplitude pair `re,im:re,im`.
pub fn parse_amplitudes(text: &str) -> Result<(Complex64, Complex64), String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 2 {
        return Err(format!(
            "expected two complex numbers 're,im:re,im', got '{text}'"
        ));
    }
    let mut out = [Complex64::default(); 2];
    for (slot, part) in out.iter_mut().zip(&parts) {
        let nums: Vec<&str> = part.split(',').collect();
        if nums.len() != 2 {
            return Err(format!("expected 're,im', got '{part}'"));
        }
        let re: f64 = nums[0]
            .trim()
            .parse()
            .map_err(|e| format!("bad real part '{}': {e}", nums[0]))?;
        let im: f64 = nums[1]
            .trim()
            .parse()
            .map_err(|e| format!("bad imaginary part '{}': {e}", nums[1]))?;
        *slot = Complex64::new(re, im);
    }
    Ok((out[0], out[1]))
}

/// Apply the `--normalize` policy to a parsed coefficient pair.
///
/// With `normalize`, pairs whose norm deviates from 1 by at most `1e-3` are
/// rescaled exactly; larger deviations are rejected rather than silently
/// accepted. Without it the pair passes through untouched (the simulator's
/// own `1e-9` construction tolerance then applies).
pub fn normalize_pair(
    c0: Complex64,
    c1: Complex64,
    normalize: bool,
) -> Result<(Complex64, Complex64), String> {
    if !normalize {
        return Ok((c0, c1));
    }
    let norm = (c0.norm_sqr() + c1.norm_sqr()).sqrt();
    if (norm - 1.0).abs() > 1e-3 {
        return Err(format!(
            "amplitudes deviate from unit norm by {:.3e}; --normalize only absorbs deviations up to 1e-3",
            (norm - 1.0).abs()
        ));
    }
    Ok((c0 / norm, c1 / norm))
}

/// Parse an inclusive grid spec `start:stop:count`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected 'start:stop:count', got '{text}'"));
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|e| format!("bad grid start '{}': {e}", parts[0]))?;
    let stop: f64 = parts[1]
        .parse()
        .map_err(|e| format!("bad grid stop '{}': {e}", parts[1]))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|e| format!("bad grid count '{}': {e}", parts[2]))?;
    if count < 2 {
        return Err("grid needs at least two points".into());
    }
    if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&stop) || stop <= start {
        return Err(format!("grid [{start}, {stop}] must be increasing within [0, 1]"));
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            if i == count - 1 {
                stop
            } else {
                start + step * i as f64
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_amplitudes() {
        let (c0, c1) = parse_amplitudes("0.6,0:0,0.8").unwrap();
        assert_eq!(c0, Complex64::new(0.6, 0.0));
        assert_eq!(c1, Complex64::new(0.0, 0.8));
        assert!(parse_amplitudes("1,0").is_err());
        assert!(parse_amplitudes("1:0").is_err());
        assert!(parse_amplitudes("a,b:c,d").is_err());
    }

    #[test]
    fn normalize_policy() {
        let near = Complex64::new(0.7071068, 0.0);
        // Slightly off unit norm: rejected raw, accepted with --normalize.
        let (c0, c1) = normalize_pair(near, near, true).unwrap();
        assert!((c0.norm_sqr() + c1.norm_sqr() - 1.0).abs() < 1e-15);
        let far = Complex64::new(1.0, 0.0);
        assert!(normalize_pair(far, far, true).is_err());
        assert_eq!(normalize_pair(far, far, false).unwrap(), (far, far));
    }

    #[test]
    fn parses_grid() {
        let g = parse_grid("0:1:11").unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[10], 1.0);
        assert!((g[5] - 0.5).abs() < 1e-15);
        assert!(parse_grid("0:1:1").is_err());
        assert!(parse_grid("0.5:0.2:5").is_err());
        assert!(parse_grid("0:2:5").is_err());
    }
}
