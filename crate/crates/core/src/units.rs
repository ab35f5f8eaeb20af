use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Logarithm base used for every reported rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateUnit {
    #[default]
    Bits,
    Nats,
}

impl RateUnit {
    pub fn log(self, x: f64) -> f64 {
        match self {
            RateUnit::Bits => x.log2(),
            RateUnit::Nats => x.ln(),
        }
    }

    /// `log(1 + x)`, accurate for small `x`.
    pub fn log1p(self, x: f64) -> f64 {
        self.from_nats(x.ln_1p())
    }

    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            RateUnit::Bits => nats / LN_2,
            RateUnit::Nats => nats,
        }
    }
}

impl fmt::Display for RateUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RateUnit::Bits => "bits",
            RateUnit::Nats => "nats",
        })
    }
}

impl FromStr for RateUnit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bits" => Ok(RateUnit::Bits),
            "nats" => Ok(RateUnit::Nats),
            other => Err(format!("unknown rate unit `{other}` (expected bits or nats)")),
        }
    }
}
