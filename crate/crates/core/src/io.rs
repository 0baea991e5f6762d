//! JSON fan and divisor files.
//!
//! ```json
//! {"dim": 2, "rays": [[1,0],[0,1],[-1,-2]], "max_cones": [[0,1],[1,2],[2,0]], "name": "P(1,1,2)"}
//! {"coeffs": [0,0,1]}
//! ```
//!
//! Ray order in the file is the ray indexing everywhere else.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fan::{validate_fan, Fan, FanError, ValidationReport};
use crate::riemann_roch::{Divisor, RrError};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed file: {0}")]
    Parse(#[from] serde_json::Error),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanFile {
    pub dim: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl FanFile {
    pub fn parse(text: &str) -> Result<Self, FileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &str) -> Result<Self, FileError> {
        Self::parse(&read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }

    pub fn from_fan(fan: &Fan) -> Self {
        FanFile {
            dim: fan.dim(),
            rays: fan.rays().to_vec(),
            max_cones: fan.max_cones().to_vec(),
            name: fan.name().map(str::to_owned),
        }
    }

    pub fn validate(&self, check_intersections: bool) -> ValidationReport {
        validate_fan(self.dim, &self.rays, &self.max_cones, check_intersections)
    }

    /// Builds the fan; `trusted` skips the pairwise intersection check.
    pub fn to_fan(&self, trusted: bool) -> Result<Fan, FanError> {
        let (rays, cones) = (self.rays.clone(), self.max_cones.clone());
        let fan = if trusted {
            Fan::new_trusted(self.dim, rays, cones)?
        } else {
            Fan::new(self.dim, rays, cones)?
        };
        Ok(match &self.name {
            Some(n) => fan.with_name(n.clone()),
            None => fan,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivisorFile {
    pub coeffs: Vec<i64>,
}

impl DivisorFile {
    pub fn parse(text: &str) -> Result<Self, FileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &str) -> Result<Self, FileError> {
        Self::parse(&read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }

    pub fn to_divisor(&self, fan: &Fan) -> Result<Divisor, RrError> {
        Divisor::new(fan, self.coeffs.clone())
    }
}

fn read_to_string(path: &str) -> Result<String, FileError> {
    std::fs::read_to_string(path).map_err(|source| FileError::Read { path: path.to_owned(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_documented_example() {
        let f = FanFile::parse(
            r#"{"dim": 2, "rays": [[1,0],[0,1],[-1,-2]], "max_cones": [[0,1],[1,2],[2,0]], "name": "P(1,1,2)"}"#,
        )
        .unwrap();
        assert_eq!(f.rays[2], vec![-1, -2]);
        let fan = f.to_fan(false).unwrap();
        assert_eq!(fan.name(), Some("P(1,1,2)"));
        assert_eq!(fan.multiplicity(&[0, 2]).unwrap(), 2);
        let d = DivisorFile::parse(r#"{"coeffs": [0,0,1]}"#).unwrap();
        assert_eq!(d.to_divisor(&fan).unwrap().coeffs(), &[0, 0, 1]);
    }

    #[test]
    fn rejects_malformed() {
        assert!(FanFile::parse("{\"dim\": 2, \"rays\": [[1,0]]").is_err());
        assert!(FanFile::parse(r#"{"dim": 2, "rays": [], "max_cones": [], "extra": 1}"#).is_err());
        assert!(DivisorFile::parse(r#"{"coeffs": [0.5]}"#).is_err());
    }

    fn fan_file() -> impl Strategy<Value = FanFile> {
        (
            1usize..4,
            proptest::collection::vec(proptest::collection::vec(-5i64..5, 1..4), 0..5),
            proptest::collection::vec(proptest::collection::vec(0usize..6, 0..4), 0..4),
            proptest::option::of("[a-zA-Z0-9() ]{0,8}"),
        )
            .prop_map(|(dim, rays, max_cones, name)| FanFile { dim, rays, max_cones, name })
    }

    proptest! {
        #[test]
        fn fan_file_round_trip(f in fan_file()) {
            prop_assert_eq!(FanFile::parse(&f.to_json()).unwrap(), f);
        }

        #[test]
        fn divisor_file_round_trip(coeffs in proptest::collection::vec(any::<i64>(), 0..8)) {
            let d = DivisorFile { coeffs };
            prop_assert_eq!(DivisorFile::parse(&d.to_json()).unwrap(), d);
        }
    }
}
