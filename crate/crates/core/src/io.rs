//! JSON file formats for channels, stochastic matrices and MPS tensors.
//!
//! Complex entries are `[re, im]` pairs; plain numbers are read as real.
//!
//! ```text
//! channel     {"D": 2, "kraus": [ [[ [re, im], ...], ...], ... ], "tp": true}
//! stochastic  {"D": 3, "entries": [[a_00, a_01, ...], ...]}   (column-stochastic)
//! mps         {"d": 3, "D": 2, "matrices": [ ... ]}
//! ```

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::channel::{KrausChannel, StochasticMatrix};
use crate::error::{invalid, Error, Result};
use crate::mps::MpsTensor;
use crate::numerics::{ComplexMatrix, TolerancePolicy, C64};

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(untagged)]
enum Entry {
    Pair([f64; 2]),
    Real(f64),
}

impl Entry {
    fn value(self) -> C64 {
        match self {
            Entry::Pair([re, im]) => C64::new(re, im),
            Entry::Real(re) => C64::new(re, 0.0),
        }
    }
}

type RawMatrix = Vec<Vec<Entry>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelFile {
    #[serde(rename = "D")]
    dim: usize,
    kraus: Vec<RawMatrix>,
    tp: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StochasticFile {
    #[serde(rename = "D")]
    dim: usize,
    entries: Vec<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MpsFile {
    d: usize,
    #[serde(rename = "D")]
    dim: usize,
    matrices: Vec<RawMatrix>,
}

/// A parsed input file.
#[derive(Debug, Clone)]
pub enum Input {
    /// The reduced channel and the Kraus list exactly as written.
    Channel {
        channel: KrausChannel,
        raw: Vec<ComplexMatrix>,
    },
    Stochastic(StochasticMatrix),
    Tensor(MpsTensor),
}

fn parse_err(e: serde_json::Error) -> Error {
    if e.line() == 0 {
        invalid(format!("malformed JSON: {e}"))
    } else {
        let msg = e.to_string();
        // serde_json appends " at line L column C"; report the position first
        let body = msg.split(" at line ").next().unwrap_or(&msg);
        invalid(format!("malformed JSON at line {} column {}: {body}", e.line(), e.column()))
    }
}

fn to_matrix(raw: RawMatrix, dim: usize, what: &str) -> Result<ComplexMatrix> {
    if raw.len() != dim || raw.iter().any(|r| r.len() != dim) {
        return Err(invalid(format!("{what} is not {dim}x{dim}")));
    }
    let data = raw.into_iter().flatten().map(Entry::value).collect();
    ComplexMatrix::new(dim, dim, data).map_err(|e| invalid(format!("{what}: {e}")))
}

fn from_matrix(m: &ComplexMatrix) -> RawMatrix {
    (0..m.rows()).map(|r| (0..m.cols()).map(|c| Entry::Pair([m.get(r, c).re, m.get(r, c).im])).collect()).collect()
}

/// Parses a channel file. A `"tp": true` claim must hold within `tp_abs`.
pub fn parse_channel(text: &str, pol: &TolerancePolicy) -> Result<(KrausChannel, Vec<ComplexMatrix>)> {
    let f: ChannelFile = serde_json::from_str(text).map_err(parse_err)?;
    channel_from(f, pol)
}

fn channel_from(f: ChannelFile, pol: &TolerancePolicy) -> Result<(KrausChannel, Vec<ComplexMatrix>)> {
    if f.dim == 0 {
        return Err(invalid("D must be positive"));
    }
    let raw = f
        .kraus
        .into_iter()
        .enumerate()
        .map(|(k, m)| to_matrix(m, f.dim, &format!("Kraus operator {k}")))
        .collect::<Result<Vec<_>>>()?;
    let ch = KrausChannel::new(raw.clone(), pol)?;
    if f.tp == Some(true) && !ch.is_tp() {
        return Err(invalid(format!(
            "file declares tp but sum A^dag A deviates from identity by {:E}",
            ch.tp_deviation()
        )));
    }
    Ok((ch, raw))
}

pub fn parse_stochastic(text: &str, pol: &TolerancePolicy) -> Result<StochasticMatrix> {
    let f: StochasticFile = serde_json::from_str(text).map_err(parse_err)?;
    stochastic_from(f, pol)
}

fn stochastic_from(f: StochasticFile, pol: &TolerancePolicy) -> Result<StochasticMatrix> {
    if f.entries.len() != f.dim || f.entries.iter().any(|r| r.len() != f.dim) {
        return Err(invalid(format!("entries is not {0}x{0}", f.dim)));
    }
    StochasticMatrix::new(f.entries, pol)
}

pub fn parse_mps(text: &str) -> Result<MpsTensor> {
    let f: MpsFile = serde_json::from_str(text).map_err(parse_err)?;
    mps_from(f)
}

fn mps_from(f: MpsFile) -> Result<MpsTensor> {
    if f.matrices.len() != f.d {
        return Err(invalid(format!("expected d = {} matrices, found {}", f.d, f.matrices.len())));
    }
    let mats = f
        .matrices
        .into_iter()
        .enumerate()
        .map(|(k, m)| to_matrix(m, f.dim, &format!("matrix {k}")))
        .collect::<Result<Vec<_>>>()?;
    MpsTensor::new(mats)
}

/// Parses any of the three formats, told apart by their keys.
pub fn parse_any(text: &str, pol: &TolerancePolicy) -> Result<Input> {
    let v: Value = serde_json::from_str(text).map_err(parse_err)?;
    let has = |k: &str| v.get(k).is_some();
    if has("kraus") {
        let (channel, raw) = channel_from(serde_json::from_value(v).map_err(parse_err)?, pol)?;
        Ok(Input::Channel { channel, raw })
    } else if has("entries") {
        Ok(Input::Stochastic(stochastic_from(serde_json::from_value(v).map_err(parse_err)?, pol)?))
    } else if has("matrices") {
        Ok(Input::Tensor(mps_from(serde_json::from_value(v).map_err(parse_err)?)?))
    } else {
        Err(invalid("unrecognized input: expected a \"kraus\", \"entries\" or \"matrices\" field"))
    }
}

#[derive(Serialize)]
struct ChannelOut {
    #[serde(rename = "D")]
    dim: usize,
    kraus: Vec<RawMatrix>,
    tp: bool,
}

/// Channel file text for `ch` (reduced Kraus list).
pub fn channel_to_json(ch: &KrausChannel) -> String {
    serde_json::to_string(&ChannelOut {
        dim: ch.dim(),
        kraus: ch.kraus().iter().map(from_matrix).collect(),
        tp: ch.is_tp(),
    })
    .expect("serializable")
}

/// Stochastic file text for `s`.
pub fn stochastic_to_json(s: &StochasticMatrix) -> String {
    let n = s.dim();
    let entries: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| s.get(i, j)).collect()).collect();
    serde_json::json!({ "D": n, "entries": entries }).to_string()
}

/// MPS file text for `t`.
pub fn mps_to_json(t: &MpsTensor) -> String {
    let mats: Vec<RawMatrix> = t.matrices().iter().map(from_matrix).collect();
    serde_json::json!({ "d": t.phys_d(), "D": t.bond_dim(), "matrices": mats }).to_string()
}
