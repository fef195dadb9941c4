//! Analysis reports and their deterministic JSON serialization.

use std::io;
use std::time::Instant;

use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter, PrettyFormatter};
use sha2::{Digest, Sha256};

use crate::channel::{validate, KrausChannel, ValidationReport};
use crate::error::{Error, Result};
use crate::indices::{primitivity_report_with_index, IndexOptions, PrimitivityReport};
use crate::numerics::{exact::ExactSpanEngine, ComplexMatrix, TolerancePolicy, C64};
use crate::spectral::{
    classify_from_report, spectral_report, zero_error_from_parts, PrimitivityVerdict, SpectralReport, ZeroErrorVerdict,
};

/// Complex number as `[re, im]`.
struct Pair(C64);

impl Serialize for Pair {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.0.re, self.0.im].serialize(s)
    }
}

pub(crate) fn ser_complex_vec<S: Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&Pair(*z))?;
    }
    seq.end()
}

pub(crate) fn ser_complex_opt<S: Serializer>(v: &Option<C64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.map(Pair).serialize(s)
}

struct Rows<'a>(&'a ComplexMatrix);

impl Serialize for Rows<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m = self.0;
        let mut seq = s.serialize_seq(Some(m.rows()))?;
        for r in 0..m.rows() {
            let row: Vec<Pair> = (0..m.cols()).map(|c| Pair(m.get(r, c))).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

pub(crate) fn ser_matrix_opt<S: Serializer>(m: &Option<ComplexMatrix>, s: S) -> std::result::Result<S::Ok, S::Error> {
    m.as_ref().map(Rows).serialize(s)
}

/// Wall time per stage, in seconds.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Timing {
    pub validation: f64,
    pub spectral: f64,
    pub indices: f64,
    pub total: f64,
}

/// Everything `analyze` reports about one channel.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    /// SHA-256 of the input bytes (or of the generator spec), hex encoded.
    pub input_digest: String,
    pub dim: usize,
    pub exact: bool,
    pub tolerance: TolerancePolicy,
    pub validation: ValidationReport,
    pub spectral: SpectralReport,
    pub verdict: PrimitivityVerdict,
    pub primitivity: PrimitivityReport,
    pub zero_error: ZeroErrorVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

/// Options for [`analyze`].
#[derive(Debug, Clone, Copy, Default)]
pub struct AnalyzeOptions {
    pub index: IndexOptions,
    /// Compute `i` with the exact Gaussian-integer engine on `raw_kraus`.
    pub exact: bool,
    pub timing: bool,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Runs every analysis stage on `ch`. `raw_kraus` is the Kraus list as
/// supplied, used by the exact engine.
pub fn analyze(
    ch: &KrausChannel,
    raw_kraus: &[ComplexMatrix],
    input: &[u8],
    opts: &AnalyzeOptions,
    pol: &TolerancePolicy,
) -> Result<AnalysisReport> {
    let start = Instant::now();
    let validation = validate(ch, pol);
    let t_val = start.elapsed().as_secs_f64();

    let s0 = Instant::now();
    let spectral = spectral_report(ch, pol)?;
    let verdict = classify_from_report(&spectral, pol);
    let t_spec = s0.elapsed().as_secs_f64();

    let s1 = Instant::now();
    let i = if opts.exact {
        ExactSpanEngine::new(raw_kraus)?.kraus_rank_index()
    } else {
        crate::indices::kraus_rank_index(ch, pol)?
    };
    let primitivity = primitivity_report_with_index(ch, i, &opts.index, pol)?;
    let zero_error = zero_error_from_parts(&spectral, primitivity.q_upper, pol);
    let t_idx = s1.elapsed().as_secs_f64();

    let report = AnalysisReport {
        input_digest: sha256_hex(input),
        dim: ch.dim(),
        exact: opts.exact,
        tolerance: *pol,
        validation,
        spectral,
        verdict,
        primitivity,
        zero_error,
        timing: opts.timing.then(|| Timing {
            validation: t_val,
            spectral: t_spec,
            indices: t_idx,
            total: start.elapsed().as_secs_f64(),
        }),
    };
    report.check_consistency()?;
    Ok(report)
}

impl AnalysisReport {
    /// Finite `i` must coincide with a primitive spectral verdict.
    pub fn check_consistency(&self) -> Result<()> {
        let finite = self.primitivity.i_index.is_some();
        if finite != self.verdict.is_primitive() {
            return Err(Error::NumericalFailure(format!(
                "inconsistent analysis: i = {:?} but spectral verdict is {:?}",
                self.primitivity.i_index, self.verdict
            )));
        }
        Ok(())
    }

    /// Human-readable summary.
    pub fn to_text(&self) -> String {
        let p = &self.primitivity;
        let opt = |v: Option<usize>| v.map_or_else(|| "none".to_string(), |v| v.to_string());
        let mut out = String::new();
        let mut line = |k: &str, v: String| out.push_str(&format!("{k:<18}{v}\n"));
        line("input sha256", self.input_digest.clone());
        line("D", self.dim.to_string());
        line("d", self.validation.d_independent.to_string());
        line("trace preserving", format!("{} (deviation {:E})", self.validation.is_tp, self.validation.tp_deviation));
        line("spectral radius", format!("{:E}", self.spectral.spectral_radius));
        line("peripheral", self.spectral.peripheral.len().to_string());
        line("period", self.spectral.period.to_string());
        line("lambda2", format!("{:E}", self.spectral.lambda2_modulus));
        line("verdict", format!("{:?}", self.verdict));
        line("i", opt(p.i_index));
        line(
            "q",
            match (p.q_lower, p.q_upper) {
                (Some(lo), Some(hi)) if p.q_exact => format!("{lo} (exact, bracket [{lo}, {hi}])"),
                (Some(lo), Some(hi)) => format!("[{lo}, {hi}]"),
                _ => "none".into(),
            },
        );
        line(
            "wielandt case",
            format!(
                "{} bound {} {}",
                p.thm1_case.as_str(),
                p.thm1_bound,
                if p.bound_respected { "respected" } else { "VIOLATED" }
            ),
        );
        line(
            "zero error",
            format!(
                "{:?} ({:?}{})",
                self.zero_error.case,
                self.zero_error.reason,
                self.zero_error.n_threshold.map_or(String::new(), |n| format!(", n_threshold {n}"))
            ),
        );
        if let Some(t) = &self.timing {
            line("time total", format!("{:.3} s", t.total));
        }
        out
    }
}

/// JSON formatter writing floats as shortest round-trip decimals with an
/// uppercase exponent (`5E-1`); non-finite values become `null`.
pub struct ExpFormatter<F>(pub F);

macro_rules! delegate {
    ($($name:ident),*) => {
        $(fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
            self.0.$name(w)
        })*
    };
}

impl<F: Formatter> Formatter for ExpFormatter<F> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(w, "{value:E}")
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    delegate!(
        begin_array,
        end_array,
        begin_object,
        end_object,
        end_object_key,
        begin_object_value,
        end_object_value,
        end_array_value
    );

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
}

/// Serializes with [`ExpFormatter`], compact or indented.
pub fn to_json<T: Serialize>(value: &T, pretty: bool) -> String {
    let mut buf = Vec::new();
    let res = if pretty {
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExpFormatter(PrettyFormatter::new()));
        value.serialize(&mut ser)
    } else {
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExpFormatter(CompactFormatter));
        value.serialize(&mut ser)
    };
    res.expect("report types serialize infallibly");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}
