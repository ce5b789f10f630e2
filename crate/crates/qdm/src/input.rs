//! The `.toric` input format: a TOML document with the keys `rays`,
//! `max_cones` (1-based ray indices), `m`, `l`, `cutoff` and `lambda_mode`.

use std::path::Path;

use qdm_core::series::Cutoff;
use qdm_core::toric::{LambdaMode, ToricSuperspace};
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInput {
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
    m: Vec<Vec<i64>>,
    #[serde(default)]
    l: Vec<Vec<i64>>,
    cutoff: Option<Vec<u32>>,
    lambda_mode: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputFile {
    pub rays: Vec<Vec<i64>>,
    /// 0-based ray indices.
    pub max_cones: Vec<Vec<usize>>,
    pub m: Vec<Vec<i64>>,
    pub l: Vec<Vec<i64>>,
    pub cutoff: Option<Cutoff>,
    pub lambda_mode: Option<LambdaMode>,
}

impl InputFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawInput = toml::from_str(text).map_err(|e| CliError::Parse(e.message().to_string()))?;
        let max_cones = raw
            .max_cones
            .iter()
            .map(|cone| {
                cone.iter()
                    .map(|&i| i.checked_sub(1).ok_or_else(|| CliError::Parse("ray indices start at 1".into())))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let lambda_mode = raw.lambda_mode.as_deref().map(parse_lambda).transpose()?;
        Ok(Self { rays: raw.rays, max_cones, m: raw.m, l: raw.l, cutoff: raw.cutoff.map(Cutoff::new), lambda_mode })
    }

    pub fn space(&self) -> Result<ToricSuperspace> {
        Ok(ToricSuperspace::new(self.rays.clone(), self.max_cones.clone(), self.m.clone(), self.l.clone())?)
    }

    /// Number of Kähler variables, read from the width of `m`.
    pub fn rank(&self) -> usize {
        self.m.first().map_or(0, Vec::len)
    }
}

pub fn parse_lambda(text: &str) -> Result<LambdaMode> {
    match text {
        "zero" => Ok(LambdaMode::Zero),
        "symbolic" => Ok(LambdaMode::Symbolic),
        other => Err(CliError::Parse(format!("unknown lambda mode `{other}`"))),
    }
}

/// Parses `3,4` or `a=3,b=4` (also `q1=3,q2=4`) into a box of the given rank.
pub fn parse_cutoff(text: &str, rank: usize) -> Result<Cutoff> {
    let parts: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    let bad = |what: &str| CliError::Parse(format!("cutoff `{text}`: {what}"));
    let number = |s: &str| s.trim().parse::<u32>().map_err(|_| bad("expected nonnegative integers"));
    let orders = if parts.iter().any(|p| p.contains('=')) {
        let mut orders = vec![None; rank];
        for part in &parts {
            let (key, value) = part.split_once('=').ok_or_else(|| bad("mixed named and positional entries"))?;
            let key = key.trim();
            let index = match key.strip_prefix('q') {
                Some(n) if !n.is_empty() => n.parse::<usize>().ok().and_then(|a| a.checked_sub(1)),
                _ if key.len() == 1 && key.as_bytes()[0].is_ascii_lowercase() => {
                    Some((key.as_bytes()[0] - b'a') as usize)
                }
                _ => None,
            }
            .filter(|&a| a < rank)
            .ok_or_else(|| bad(&format!("unknown variable `{key}`")))?;
            if orders[index].replace(number(value)?).is_some() {
                return Err(bad(&format!("variable `{key}` given twice")));
            }
        }
        orders.into_iter().collect::<Option<Vec<u32>>>().ok_or_else(|| bad("missing variables"))?
    } else {
        parts.iter().map(|p| number(p)).collect::<Result<Vec<u32>>>()?
    };
    if orders.len() != rank {
        return Err(bad(&format!("expected {rank} entries")));
    }
    Ok(Cutoff::new(orders))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_forms_agree() {
        let plain = parse_cutoff("3,4", 2).unwrap();
        assert_eq!(parse_cutoff("a=3,b=4", 2).unwrap(), plain);
        assert_eq!(parse_cutoff("b=4, a=3", 2).unwrap(), plain);
        assert_eq!(parse_cutoff("q1=3,q2=4", 2).unwrap(), plain);
        assert!(parse_cutoff("3", 2).is_err());
        assert!(parse_cutoff("a=3", 2).is_err());
        assert!(parse_cutoff("a=3,c=1", 2).is_err());
        assert!(parse_cutoff("3,-1", 2).is_err());
    }

    #[test]
    fn cones_are_one_based() {
        let text = "rays = [[1], [-1]]\nmax_cones = [[1], [2]]\nm = [[1], [1]]\n";
        let input = InputFile::parse(text).unwrap();
        assert_eq!(input.max_cones, vec![vec![0], vec![1]]);
        assert!(input.space().is_ok());
        let zero = "rays = [[1], [-1]]\nmax_cones = [[0], [1]]\nm = [[1], [1]]\n";
        assert_eq!(InputFile::parse(zero).unwrap_err().exit_code(), 1);
        assert_eq!(InputFile::parse("rays = 3").unwrap_err().exit_code(), 1);
    }
}
