//! JSON form of an instance: labeled points with a panel, given either as
//! spanning functions or as section values over a designated section.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::configmodel::{panel_from_pencil, ConfigError, Configuration, Panel};
use crate::exactlin::{LinAlgError, Mat, Scalar, Subspace};

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("invalid rational {0:?}")]
    BadRational(String),
    #[error("instance gives neither \"panel\" nor \"sections\" with \"sigma_prime\"")]
    NoPanel,
    #[error("instance gives both \"panel\" and \"sections\"")]
    AmbiguousPanel,
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// Formats a rational as `p/q`, or `p` when integral.
pub fn rat_to_string(x: &Scalar) -> String {
    x.to_string()
}

pub fn parse_rat(s: &str) -> Result<Scalar, InstanceError> {
    s.trim().parse::<Scalar>().map_err(|_| InstanceError::BadRational(s.to_string()))
}

pub fn rats_to_strings(v: &[Scalar]) -> Vec<String> {
    v.iter().map(rat_to_string).collect()
}

pub fn parse_rats(v: &[String]) -> Result<Vec<Scalar>, InstanceError> {
    v.iter().map(|s| parse_rat(s)).collect()
}

/// Parses a comma-separated list such as `"0,1/2,-3"`.
pub fn parse_rat_list(s: &str) -> Result<Vec<Scalar>, InstanceError> {
    s.split(',').map(parse_rat).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointRecord {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub points: Vec<PointRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub panel: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sections: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_prime: Option<usize>,
}

impl InstanceRecord {
    /// Record of a panel, listing its RREF basis.
    pub fn from_panel(p: &Panel) -> Self {
        let cfg = p.config();
        let points = (0..cfg.len())
            .map(|i| PointRecord {
                label: cfg.label(i).to_string(),
                coords: cfg.coords().map(|cs| rats_to_strings(&cs[i])),
            })
            .collect();
        let panel = p.space().vectors().iter().map(|v| rats_to_strings(v)).collect();
        InstanceRecord { schema: Some("1".into()), points, panel: Some(panel), sections: None, sigma_prime: None }
    }

    pub fn to_panel(&self) -> Result<Panel, InstanceError> {
        let labels: Vec<String> = self.points.iter().map(|p| p.label.clone()).collect();
        let coords = if self.points.iter().any(|p| p.coords.is_some()) {
            let cs = self
                .points
                .iter()
                .map(|p| parse_rats(p.coords.as_deref().unwrap_or(&[])))
                .collect::<Result<Vec<_>, _>>()?;
            Some(cs)
        } else {
            None
        };
        let config = Configuration::new(labels, coords)?;
        let d = config.len();
        let rows = |rs: &[Vec<String>]| -> Result<Vec<Vec<Scalar>>, InstanceError> {
            rs.iter().map(|r| parse_rats(r)).collect()
        };
        match (&self.panel, &self.sections, self.sigma_prime) {
            (Some(_), Some(_), _) => Err(InstanceError::AmbiguousPanel),
            (Some(panel), None, _) => {
                let vs = rows(panel)?;
                if let Some(v) = vs.iter().find(|v| v.len() != d) {
                    return Err(ConfigError::ConfigMismatch { expected: d, found: v.len() }.into());
                }
                Ok(Panel::new(config, Subspace::from_rows(d, &vs)?)?)
            }
            (None, Some(sections), Some(sigma)) => {
                let m = Mat::from_rows(d, &rows(sections)?)?;
                Ok(panel_from_pencil(config, &m, sigma)?)
            }
            _ => Err(InstanceError::NoPanel),
        }
    }
}

pub fn parse_instance(json: &str) -> Result<Panel, InstanceError> {
    let rec: InstanceRecord = serde_json::from_str(json)?;
    rec.to_panel()
}
