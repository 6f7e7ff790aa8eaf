//! Output rows for grid sweeps and their CSV / JSON encodings.

use std::fmt;
use std::io::{self, Write};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::analytic::{RewardBound, StubbornLevel};

/// A cell value: a real metric, a level, or the infinite level / reward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReportValue {
    Real(f64),
    Level(u32),
    Infinite,
}

impl From<StubbornLevel> for ReportValue {
    fn from(level: StubbornLevel) -> Self {
        match level {
            StubbornLevel::Finite(l) => ReportValue::Level(l),
            StubbornLevel::Infinite => ReportValue::Infinite,
        }
    }
}

impl From<RewardBound> for ReportValue {
    fn from(r: RewardBound) -> Self {
        match r {
            RewardBound::Finite(v) => ReportValue::Real(v),
            RewardBound::Infinite => ReportValue::Infinite,
        }
    }
}

impl From<f64> for ReportValue {
    fn from(v: f64) -> Self {
        ReportValue::Real(v)
    }
}

/// Six fixed decimals, with negative zero printed as zero.
pub fn fixed6(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

impl fmt::Display for ReportValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReportValue::Real(v) => f.write_str(&fixed6(*v)),
            ReportValue::Level(l) => write!(f, "{l}"),
            ReportValue::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for ReportValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ReportValue::Real(v) => s.serialize_f64(*v),
            ReportValue::Level(l) => s.serialize_u32(*l),
            ReportValue::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ReportValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct Visitor;

        impl serde::de::Visitor<'_> for Visitor {
            type Value = ReportValue;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }

            fn visit_f64<E: serde::de::Error>(self, v: f64) -> Result<Self::Value, E> {
                Ok(ReportValue::Real(v))
            }

            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<Self::Value, E> {
                u32::try_from(v)
                    .map(ReportValue::Level)
                    .map_err(|_| E::custom(format!("level {v} out of range")))
            }

            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<Self::Value, E> {
                Err(E::custom(format!("negative level {v}")))
            }

            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<Self::Value, E> {
                if v == "inf" {
                    Ok(ReportValue::Infinite)
                } else {
                    Err(E::custom(format!("unexpected string {v:?}")))
                }
            }
        }

        d.deserialize_any(Visitor)
    }
}

/// Optional decomposition of a cell value.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Aux {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numerator: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub denominator: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
}

impl Aux {
    pub fn is_empty(&self) -> bool {
        self.numerator.is_none() && self.denominator.is_none() && self.std_error.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub alpha: f64,
    pub gamma: f64,
    pub value: ReportValue,
    #[serde(default, skip_serializing_if = "Aux::is_empty")]
    pub aux: Aux,
}

type AuxColumn = (&'static str, fn(&Aux) -> Option<f64>);

/// Writes `alpha,gamma,value` plus whichever aux columns any row carries.
pub fn write_csv<W: Write>(rows: &[ReportRow], mut out: W) -> io::Result<()> {
    let columns: [AuxColumn; 3] = [
        ("numerator", |a| a.numerator),
        ("denominator", |a| a.denominator),
        ("std_error", |a| a.std_error),
    ];
    let present: Vec<_> = columns
        .iter()
        .filter(|(_, get)| rows.iter().any(|r| get(&r.aux).is_some()))
        .collect();

    let mut header = String::from("alpha,gamma,value");
    for (name, _) in &present {
        header.push(',');
        header.push_str(name);
    }
    writeln!(out, "{header}")?;
    for row in rows {
        let mut line = format!("{},{},{}", fixed6(row.alpha), fixed6(row.gamma), row.value);
        for (_, get) in &present {
            line.push(',');
            if let Some(v) = get(&row.aux) {
                line.push_str(&fixed6(v));
            }
        }
        writeln!(out, "{line}")?;
    }
    out.flush()
}

pub fn write_json<W: Write>(rows: &[ReportRow], mut out: W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    writeln!(out)?;
    out.flush()
}
