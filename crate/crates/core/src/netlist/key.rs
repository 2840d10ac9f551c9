// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{GateGraph, NetlistError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LockScheme {
    Trll,
    Mux,
    Lut,
    SfllHd,
}

impl LockScheme {
    pub const ALL: [LockScheme; 4] = [Self::Trll, Self::SfllHd, Self::Mux, Self::Lut];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Trll => "trll",
            Self::Mux => "mux",
            Self::Lut => "lut",
            Self::SfllHd => "sfllhd",
        }
    }
}

impl fmt::Display for LockScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LockScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "trll" => Ok(Self::Trll),
            "mux" => Ok(Self::Mux),
            "lut" => Ok(Self::Lut),
            "sfllhd" | "sfll" => Ok(Self::SfllHd),
            other => Err(format!("unknown lock scheme `{other}`")),
        }
    }
}

impl Serialize for LockScheme {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for LockScheme {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Secret key and ground truth emitted by a locking transform.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyRecord {
    pub scheme: LockScheme,
    #[serde(rename = "key_inputs")]
    pub key_input_names: Vec<String>,
    #[serde(with = "bit_string")]
    pub key_bits: Vec<bool>,
    #[serde(rename = "lock_gates")]
    pub ground_truth_lock_gates: Vec<String>,
}

impl KeyRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("key record serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Checks the record against the locked graph it describes.
    pub fn check(&self, g: &GateGraph) -> Result<(), NetlistError> {
        if self.key_input_names.len() != self.key_bits.len() {
            return Err(NetlistError::BadKey(format!(
                "{} names but {} bits",
                self.key_input_names.len(),
                self.key_bits.len()
            )));
        }
        for k in &self.key_input_names {
            match g.find(k) {
                Some(id) if g.node(id).is_input() => {}
                _ => return Err(NetlistError::BadKey(k.clone())),
            }
        }
        for l in &self.ground_truth_lock_gates {
            match g.find(l) {
                Some(id) if !g.node(id).is_input() => {}
                _ => return Err(NetlistError::BadLabel(l.clone())),
            }
        }
        Ok(())
    }

    /// Key bits as a `(name, value)` list.
    pub fn assignment(&self) -> Vec<(String, bool)> {
        self.key_input_names
            .iter()
            .cloned()
            .zip(self.key_bits.iter().copied())
            .collect()
    }
}

mod bit_string {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bits: &[bool], s: S) -> Result<S::Ok, S::Error> {
        let text: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        s.serialize_str(&text)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
        let text = String::deserialize(d)?;
        text.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(serde::de::Error::custom(format!("bad key bit `{other}`"))),
            })
            .collect()
    }
}
