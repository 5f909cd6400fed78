//! Instance naming scheme.
//!
//! Generated instances are named after their model and parameters, e.g.
//! `ba_n-29_m-9_132`, `er_n-29_p-0.227_123`, `cws_n-29_k-6_p-0.412_148`.
//! Real-valued parameters carry exactly three decimal places; the trailing
//! integer is a task id that distinguishes instances without encoding
//! anything about the graph.

use alloc::format;
use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::math;

/// Model-specific naming parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelParams {
    /// Erdős-Rényi with edge probability `p`.
    Er { p: f64 },
    /// Barabási-Albert with attachment count `m`.
    Ba { m: u32 },
    /// Connected Watts-Strogatz with ring degree `k` and rewiring
    /// probability `p`.
    Cws { k: u32, p: f64 },
}

impl ModelParams {
    pub fn model(&self) -> &'static str {
        match self {
            ModelParams::Er { .. } => "er",
            ModelParams::Ba { .. } => "ba",
            ModelParams::Cws { .. } => "cws",
        }
    }
}

/// A parsed instance name.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceName {
    n: u32,
    params: ModelParams,
    task_id: u64,
}

impl InstanceName {
    /// Real parameters are quantized to three decimals on construction so
    /// that formatting and parsing round-trip exactly.
    pub fn new(n: u32, params: ModelParams, task_id: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParam(format!("instance size n = {n} < 2")));
        }
        let params = match params {
            ModelParams::Er { p } => ModelParams::Er { p: quantize(p)? },
            ModelParams::Ba { m } => ModelParams::Ba { m },
            ModelParams::Cws { k, p } => ModelParams::Cws { k, p: quantize(p)? },
        };
        Ok(Self { n, params, task_id })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn params(&self) -> ModelParams {
        self.params
    }

    pub fn task_id(&self) -> u64 {
        self.task_id
    }

    pub fn model(&self) -> &'static str {
        self.params.model()
    }

    /// The on-disk file name, `<name>.gml`.
    pub fn file_name(&self) -> String {
        format!("{self}.gml")
    }
}

fn quantize(p: f64) -> Result<f64> {
    if !p.is_finite() || p < 0.0 {
        return Err(Error::InvalidParam(format!("real name parameter {p}")));
    }
    Ok(math::round(p * 1000.0) / 1000.0)
}

impl fmt::Display for InstanceName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.params {
            ModelParams::Er { p } => {
                write!(f, "er_n-{}_p-{:.3}_{}", self.n, p, self.task_id)
            }
            ModelParams::Ba { m } => write!(f, "ba_n-{}_m-{}_{}", self.n, m, self.task_id),
            ModelParams::Cws { k, p } => {
                write!(f, "cws_n-{}_k-{}_p-{:.3}_{}", self.n, k, p, self.task_id)
            }
        }
    }
}

impl FromStr for InstanceName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.strip_suffix(".gml").unwrap_or(s);
        let fields: alloc::vec::Vec<&str> = s.split('_').collect();
        let err = |reason: &str| Error::NameParse(format!("{reason} in {s:?}"));
        if fields.len() < 2 {
            return Err(err("too few fields"));
        }
        let task_id: u64 = fields[fields.len() - 1]
            .parse()
            .map_err(|_| err("non-numeric task id"))?;
        let n = parse_field::<u32>(fields.get(1).copied(), "n", s)?;
        let params = match fields[0] {
            "er" => {
                expect_len(&fields, 4, s)?;
                let p = parse_field::<f64>(fields.get(2).copied(), "p", s)?;
                ModelParams::Er { p }
            }
            "ba" => {
                expect_len(&fields, 4, s)?;
                let m = parse_field::<u32>(fields.get(2).copied(), "m", s)?;
                ModelParams::Ba { m }
            }
            "cws" => {
                expect_len(&fields, 5, s)?;
                let k = parse_field::<u32>(fields.get(2).copied(), "k", s)?;
                let p = parse_field::<f64>(fields.get(3).copied(), "p", s)?;
                ModelParams::Cws { k, p }
            }
            other => {
                return Err(Error::NameParse(format!(
                    "unknown model prefix {other:?} in {s:?}"
                )))
            }
        };
        InstanceName::new(n, params, task_id)
    }
}

fn expect_len(fields: &[&str], want: usize, full: &str) -> Result<()> {
    if fields.len() != want {
        return Err(Error::NameParse(format!(
            "expected {want} fields, found {} in {full:?}",
            fields.len()
        )));
    }
    Ok(())
}

fn parse_field<T: FromStr>(field: Option<&str>, key: &str, full: &str) -> Result<T> {
    let field = field.ok_or_else(|| Error::NameParse(format!("missing {key} in {full:?}")))?;
    let value = field
        .strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('-'))
        .ok_or_else(|| Error::NameParse(format!("expected {key}-<value>, found {field:?}")))?;
    value
        .parse()
        .map_err(|_| Error::NameParse(format!("non-numeric {key} field {value:?} in {full:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_published_names() {
        let ba = InstanceName::new(29, ModelParams::Ba { m: 9 }, 132).unwrap();
        assert_eq!(ba.to_string(), "ba_n-29_m-9_132");
        let er = InstanceName::new(29, ModelParams::Er { p: 0.227 }, 123).unwrap();
        assert_eq!(er.to_string(), "er_n-29_p-0.227_123");
        let cws = InstanceName::new(29, ModelParams::Cws { k: 6, p: 0.412 }, 148).unwrap();
        assert_eq!(cws.to_string(), "cws_n-29_k-6_p-0.412_148");
    }

    #[test]
    fn parse_round_trip() {
        for s in [
            "ba_n-29_m-9_132",
            "er_n-29_p-0.227_123",
            "cws_n-29_k-6_p-0.412_148",
            "ba_n-29_m-6_239",
            "er_n-29_p-0.493_195",
            "cws_n-29_k-6_p-0.229_199",
        ] {
            let name: InstanceName = s.parse().unwrap();
            assert_eq!(name.to_string(), s);
            let again: InstanceName = name.to_string().parse().unwrap();
            assert_eq!(name, again);
        }
    }

    #[test]
    fn three_decimal_padding() {
        let er = InstanceName::new(10, ModelParams::Er { p: 0.5 }, 0).unwrap();
        assert_eq!(er.to_string(), "er_n-10_p-0.500_0");
    }

    #[test]
    fn gml_suffix_accepted() {
        let name: InstanceName = "ba_n-29_m-9_132.gml".parse().unwrap();
        assert_eq!(name.file_name(), "ba_n-29_m-9_132.gml");
    }

    #[test]
    fn rejects_malformed() {
        assert!("zz_n-29_m-9_1".parse::<InstanceName>().is_err());
        assert!("ba_n-29_m-9".parse::<InstanceName>().is_err());
        assert!("ba_n-29_m-x_7".parse::<InstanceName>().is_err());
        assert!("ba_m-9_n-29_7".parse::<InstanceName>().is_err());
        assert!("er_n-29_p-0.227".parse::<InstanceName>().is_err());
        assert!("".parse::<InstanceName>().is_err());
    }
}
