use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Deterministic map from the first reconstruction alphabet to the cribbed symbol alphabet.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct CribFunction {
    map: Vec<usize>,
    image_size: usize,
}

impl CribFunction {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        if map.is_empty() {
            return Err(Error::Usage("crib function over an empty alphabet".into()));
        }
        let image_size = map.iter().max().map_or(0, |m| m + 1);
        if image_size > map.len() {
            return Err(Error::Usage(format!(
                "crib image size {image_size} exceeds domain size {}",
                map.len()
            )));
        }
        Ok(Self { map, image_size })
    }

    pub fn identity(n: usize) -> Self {
        Self { map: (0..n).collect(), image_size: n }
    }

    pub fn constant(n: usize) -> Self {
        Self { map: vec![0; n], image_size: 1 }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn domain_size(&self) -> usize {
        self.map.len()
    }

    pub fn image_size(&self) -> usize {
        self.image_size
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &z)| i == z)
    }
}

impl TryFrom<Vec<usize>> for CribFunction {
    type Error = Error;

    fn try_from(map: Vec<usize>) -> Result<Self> {
        Self::new(map)
    }
}

impl From<CribFunction> for Vec<usize> {
    fn from(g: CribFunction) -> Self {
        g.map
    }
}
