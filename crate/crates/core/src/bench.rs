//! Operation-count, size and timing reports.
//!
//! Cost audits run a full keygen / sign-all / verify-all walk with the
//! thread-local counters. Size audits evaluate the closed-form size rows
//! next to measured artifacts and the published reference values. Timings
//! are wall-clock medians and informational only: the reference cycle
//! counts were taken on other hardware against builds not in this repo.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use crate::counters::{measure, CostCounters};
use crate::error::Result;
use crate::frog;
use crate::hash::{Seed, DIGEST_LEN};
use crate::scheme::{BaseScheme, OneTimeSignature};
use crate::signer::{verify, Construction, SchemeId, Signer};
use crate::star;

/// Published measurements (cycles and octets) for one scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReferenceRow {
    pub scheme: &'static str,
    pub keygen_cycles: u64,
    pub sign_cycles: u64,
    pub verify_cycles: u64,
    pub sig_bytes: usize,
    pub pk_bytes: usize,
    pub sk_bytes: usize,
}

const fn row(
    scheme: &'static str,
    keygen_cycles: u64,
    sign_cycles: u64,
    verify_cycles: u64,
    sig_bytes: usize,
    pk_bytes: usize,
    sk_bytes: usize,
) -> ReferenceRow {
    ReferenceRow { scheme, keygen_cycles, sign_cycles, verify_cycles, sig_bytes, pk_bytes, sk_bytes }
}

/// Reference table, version 1. Cycle counts are from a commodity laptop.
pub const REFERENCE_TABLE: [ReferenceRow; 16] = [
    row("XMSS-MT-SHA2_20/2_256", 9_236_557_672, 24_554_349, 5_186_460, 4_963, 64, 5_998),
    row("XMSS-MT-SHA2_20/4_256", 729_631_517, 14_364_265, 10_188_082, 9_251, 64, 10_938),
    row("XMSS-MT-SHA2_40/2_256", 9_404_925_498_412, 26_628_986, 5_377_454, 5_605, 64, 9_600),
    row("XMSS-MT-SHA2_60/3_256", 14_234_635_667_761, 29_584_259, 7_619_770, 8_392, 64, 16_629),
    row("XMSS-MT-SHA2_60/6_256", 31_682_214_982, 31_391_553, 16_521_985, 14_824, 64, 24_507),
    row("XMSS-MT-SHA2_60/12_256", 1_946_231_536, 15_474_825, 33_375_298, 27_688, 64, 38_095),
    row("FROG-BLISS", 2_102_770, 12_517_153, 999_972, 7_054, 32, 80_076),
    row("FROG-Dilithium", 815_322, 5_544_419, 994_438, 13_624, 32, 634_176),
    row("FROG-Dilithium-AVX2", 261_832, 1_369_462, 432_882, 13_624, 32, 634_176),
    row("FROG-WOTS+(SHA256)", 810_768, 2_031_100, 959_158, 27_872, 32, 715_840),
    row("FROG-WOTS+(SHAKE256)", 2_223_760, 5_559_400, 2_223_760, 27_872, 32, 715_840),
    row("FROG*-BLISS", 62_828_244, 12_782_583, 5_113_672, 4_766, 32, 10_640),
    row("FROG*-Dilithium", 28_642_638, 5_830_749, 5_080_468, 11_305, 32, 85_362),
    row("FROG*-Dilithium-AVX2", 10_306_122, 1_655_792, 1_711_132, 11_305, 32, 85_362),
    row("FROG*-WOTS+(SHA256)", 17_804_064, 2_296_530, 4_868_788, 25_552, 32, 107_040),
    row("FROG*-WOTS+(SHAKE256)", 40_027_680, 5_829_010, 13_346_740, 25_552, 32, 107_040),
];

/// Reference row matching a scheme id, if the table has one.
pub fn reference_for(id: &SchemeId) -> Option<&'static ReferenceRow> {
    let prefix = match id.construction {
        Construction::Frog => "FROG-",
        Construction::Star => "FROG*-",
    };
    let suffix = match id.base.name().as_str() {
        "wots-sha256" => "WOTS+(SHA256)",
        "wots-shake256" => "WOTS+(SHAKE256)",
        "mock-dilithium" => "Dilithium",
        "mock-bliss2" => "BLISS",
        _ => return None,
    };
    REFERENCE_TABLE.iter().find(|r| r.scheme.strip_prefix(prefix) == Some(suffix))
}

/// `log2 κ` and `log2 t` at κ = 128, t = 2^64.
pub const LOG_KAPPA: usize = 7;
pub const LOG_T: usize = 64;
pub const LOG_LOG_T: usize = 6;
pub const KAPPA_BITS: usize = 128;

/// Closed-form private key sizes. The `κ (log t)^2` term is given both as
/// bits and as octets since the unit is not stated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SkFormula {
    pub term_as_bits: usize,
    pub term_as_octets: usize,
}

pub fn frog_sk_formula(sk: usize, pk: usize) -> SkFormula {
    let fixed = (2 + LOG_KAPPA) * sk + 6 * pk + 4 * LOG_KAPPA * DIGEST_LEN + 3 * LOG_T * DIGEST_LEN;
    let sq = KAPPA_BITS * LOG_T * LOG_T;
    SkFormula { term_as_bits: fixed + sq, term_as_octets: fixed + sq / 8 }
}

pub fn star_sk_formula(sk: usize, pk: usize) -> SkFormula {
    let sq = KAPPA_BITS * LOG_T * LOG_T;
    let with = |kappa: usize, sq: usize| LOG_LOG_T * (2 * sk + 6 * pk + 4 * kappa) + sq + sk * LOG_KAPPA;
    SkFormula { term_as_bits: with(KAPPA_BITS, sq), term_as_octets: with(KAPPA_BITS / 8, sq / 8) }
}

/// Counter trace of a full walk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostAudit {
    pub scheme: String,
    pub param: u32,
    pub keygen: CostCounters,
    pub sign: Vec<CostCounters>,
    pub verify: Vec<CostCounters>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub max: CostCounters,
    pub mean_keygen: f64,
    pub mean_sign: f64,
    pub mean_verify: f64,
    pub mean_hash: f64,
}

fn summarize(v: &[CostCounters]) -> Summary {
    let n = v.len().max(1) as f64;
    let mut max = CostCounters::default();
    let mut sum = CostCounters::default();
    for c in v {
        max.base_keygen = max.base_keygen.max(c.base_keygen);
        max.base_sign = max.base_sign.max(c.base_sign);
        max.base_verify = max.base_verify.max(c.base_verify);
        max.hash = max.hash.max(c.hash);
        sum.base_keygen += c.base_keygen;
        sum.base_sign += c.base_sign;
        sum.base_verify += c.base_verify;
        sum.hash += c.hash;
    }
    Summary {
        max,
        mean_keygen: sum.base_keygen as f64 / n,
        mean_sign: sum.base_sign as f64 / n,
        mean_verify: sum.base_verify as f64 / n,
        mean_hash: sum.hash as f64 / n,
    }
}

impl CostAudit {
    pub fn sign_summary(&self) -> Summary {
        summarize(&self.sign)
    }

    pub fn verify_summary(&self) -> Summary {
        summarize(&self.verify)
    }

    /// One line per period: `period,phase,keygen,sign,verify,hash`.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("period,phase,base_keygen,base_sign,base_verify,hash\n");
        let line = |out: &mut String, p: &str, ph: &str, c: &CostCounters| {
            let _ = writeln!(out, "{p},{ph},{},{},{},{}", c.base_keygen, c.base_sign, c.base_verify, c.hash);
        };
        line(&mut out, "-", "keygen", &self.keygen);
        for (t, (s, v)) in self.sign.iter().zip(&self.verify).enumerate() {
            line(&mut out, &t.to_string(), "sign", s);
            line(&mut out, &t.to_string(), "verify", v);
        }
        out
    }
}

/// Largest capacity a cost audit walks.
pub const MAX_AUDIT_CAPACITY: u128 = 1 << 12;

pub fn run_cost_audit(id: &SchemeId, param: u32, seed: &Seed) -> Result<CostAudit> {
    let cap = id.capacity(param);
    if cap > MAX_AUDIT_CAPACITY {
        return Err(crate::Error::InvalidParameter(format!("capacity {cap} too large for a full walk")));
    }
    let (keyed, keygen) = measure(|| Signer::keygen(id, seed, param));
    let (mut signer, pk) = keyed?;
    let mut sign = Vec::new();
    let mut ver = Vec::new();
    for t in 0..cap as u64 {
        let msg = t.to_le_bytes();
        let (sig, c) = measure(|| signer.sign(&msg));
        let sig = sig?;
        sign.push(c);
        let (ok, c) = measure(|| verify(id, &pk, &msg, &sig));
        if !ok {
            return Err(crate::Error::InvalidParameter(format!("period {t} failed to verify")));
        }
        ver.push(c);
    }
    Ok(CostAudit { scheme: id.name(), param, keygen, sign, verify: ver })
}

/// One line of the size report. `measured` is the length this
/// implementation emits for the same artifact at full scale.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeRow {
    pub label: String,
    pub formula: usize,
    pub measured: usize,
    pub reference: Option<usize>,
}

impl SizeRow {
    pub fn delta_vs_reference(&self) -> Option<i64> {
        self.reference.map(|p| self.formula as i64 - p as i64)
    }
}

/// Size report for one construction over `base`: closed-form value,
/// this implementation's full-scale length, and the reference value.
pub fn run_size_audit(id: &SchemeId) -> Vec<SizeRow> {
    let d = id.base.descriptor();
    let reference = reference_for(id);
    let (sig_formula, sig_measured, sk) = match id.construction {
        Construction::Frog => (
            frog::formula_signature_len(d.sig_size, d.pk_size),
            // worst period of a 65-leaf instance: lower tree 63
            frog::declared_signature_len(&id.base, 65, u64::MAX - 1),
            frog_sk_formula(d.sk_size, d.pk_size),
        ),
        Construction::Star => (
            star::formula_signature_len(d.sig_size, d.pk_size),
            star::declared_signature_len(&id.base, star::MAX_DEPTH),
            star_sk_formula(d.sk_size, d.pk_size),
        ),
    };
    vec![
        SizeRow {
            label: format!("{} signature", id.name()),
            formula: sig_formula,
            measured: sig_measured,
            reference: reference.map(|r| r.sig_bytes),
        },
        SizeRow { label: format!("{} public key", id.name()), formula: DIGEST_LEN, measured: DIGEST_LEN, reference: reference.map(|r| r.pk_bytes) },
        SizeRow {
            label: format!("{} private key (κ(log t)² in bits)", id.name()),
            formula: sk.term_as_bits,
            measured: 0,
            reference: reference.map(|r| r.sk_bytes),
        },
        SizeRow {
            label: format!("{} private key (κ(log t)² in octets)", id.name()),
            formula: sk.term_as_octets,
            measured: 0,
            reference: reference.map(|r| r.sk_bytes),
        },
    ]
}

pub fn size_report_table(rows: &[SizeRow]) -> String {
    let mut out = format!("{:<58} {:>10} {:>10} {:>10} {:>8}\n", "artifact", "formula", "measured", "reference", "delta");
    for r in rows {
        let measured = if r.measured == 0 { "-".to_string() } else { r.measured.to_string() };
        let reference = r.reference.map_or("-".to_string(), |p| p.to_string());
        let delta = r.delta_vs_reference().map_or("-".to_string(), |d| format!("{d:+}"));
        let _ = writeln!(out, "{:<58} {:>10} {:>10} {:>10} {:>8}", r.label, r.formula, measured, reference, delta);
    }
    out
}

/// Columns: `artifact,formula,measured,reference,delta` (empty when absent).
pub fn size_report_csv(rows: &[SizeRow]) -> String {
    let mut out = String::from("artifact,formula,measured,reference,delta\n");
    for r in rows {
        let measured = if r.measured == 0 { String::new() } else { r.measured.to_string() };
        let reference = r.reference.map_or(String::new(), |p| p.to_string());
        let delta = r.delta_vs_reference().map_or(String::new(), |d| d.to_string());
        let _ = writeln!(out, "{},{},{},{},{}", r.label, r.formula, measured, reference, delta);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimingReport {
    pub scheme: String,
    pub repetitions: usize,
    pub keygen: Duration,
    pub sign: Duration,
    pub verify: Duration,
}

fn median(mut v: Vec<Duration>) -> Duration {
    v.sort();
    v.get(v.len() / 2).copied().unwrap_or_default()
}

/// Medians over `repetitions` runs. Each sign sample advances a fresh
/// instance by one period; verify reuses the first signature.
pub fn run_timing(id: &SchemeId, param: u32, repetitions: usize) -> Result<TimingReport> {
    let reps = repetitions.max(1);
    let mut kg = Vec::with_capacity(reps);
    let mut sg = Vec::with_capacity(reps);
    let mut vf = Vec::with_capacity(reps);
    for r in 0..reps {
        let seed = Seed([r as u8; 16]);
        let t0 = Instant::now();
        let (mut s, pk) = Signer::keygen(id, &seed, param)?;
        kg.push(t0.elapsed());
        let t0 = Instant::now();
        let sig = s.sign(b"timing")?;
        sg.push(t0.elapsed());
        let t0 = Instant::now();
        let ok = verify(id, &pk, b"timing", &sig);
        vf.push(t0.elapsed());
        debug_assert!(ok);
    }
    Ok(TimingReport { scheme: id.name(), repetitions: reps, keygen: median(kg), sign: median(sg), verify: median(vf) })
}

pub fn timing_table(t: &TimingReport) -> String {
    let mut out = format!("{} ({} repetitions, wall-clock medians, informational)\n", t.scheme, t.repetitions);
    for (phase, d) in [("keygen", t.keygen), ("sign", t.sign), ("verify", t.verify)] {
        let _ = writeln!(out, "  {phase:<7} {:>12.3} µs", d.as_secs_f64() * 1e6);
    }
    out.push_str("\nreference cycle counts (other hardware; not comparable):\n");
    out.push_str(&reference_table());
    out
}

/// Columns: `scheme,phase,median_ns,repetitions`.
pub fn timing_csv(t: &TimingReport) -> String {
    let mut out = String::from("scheme,phase,median_ns,repetitions\n");
    for (phase, d) in [("keygen", t.keygen), ("sign", t.sign), ("verify", t.verify)] {
        let _ = writeln!(out, "{},{phase},{},{}", t.scheme, d.as_nanos(), t.repetitions);
    }
    out
}

pub fn reference_table() -> String {
    let mut out = format!(
        "{:<24} {:>20} {:>12} {:>12} {:>8} {:>6} {:>9}\n",
        "scheme", "keygen cyc", "sign cyc", "verify cyc", "sig B", "pk B", "sk B"
    );
    for r in &REFERENCE_TABLE {
        let _ = writeln!(
            out,
            "{:<24} {:>20} {:>12} {:>12} {:>8} {:>6} {:>9}",
            r.scheme, r.keygen_cycles, r.sign_cycles, r.verify_cycles, r.sig_bytes, r.pk_bytes, r.sk_bytes
        );
    }
    out
}

/// Columns: `scheme,keygen_cycles,sign_cycles,verify_cycles,sig_bytes,pk_bytes,sk_bytes`.
pub fn reference_csv() -> String {
    let mut out = String::from("scheme,keygen_cycles,sign_cycles,verify_cycles,sig_bytes,pk_bytes,sk_bytes\n");
    for r in &REFERENCE_TABLE {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.scheme, r.keygen_cycles, r.sign_cycles, r.verify_cycles, r.sig_bytes, r.pk_bytes, r.sk_bytes
        );
    }
    out
}

pub fn cost_report_table(a: &CostAudit) -> String {
    let s = a.sign_summary();
    let v = a.verify_summary();
    let k = &a.keygen;
    let mut out = format!("{} param={} periods={}\n", a.scheme, a.param, a.sign.len());
    let _ = writeln!(out, "  keygen: {} base keygen, {} base sign, {} hash", k.base_keygen, k.base_sign, k.hash);
    let _ = writeln!(
        out,
        "  sign:   max {} keygen / {} sign / {} hash; mean {:.3} / {:.3} / {:.3}",
        s.max.base_keygen, s.max.base_sign, s.max.hash, s.mean_keygen, s.mean_sign, s.mean_hash
    );
    let _ = writeln!(
        out,
        "  verify: max {} verify / {} hash; mean {:.3} / {:.3}",
        v.max.base_verify, v.max.hash, v.mean_verify, v.mean_hash
    );
    out
}

/// Descriptor of a base scheme for reports.
pub fn describe_base(base: &BaseScheme) -> String {
    let d = base.descriptor();
    format!("{}: sig {} B, pk {} B, sk {} B", d.name, d.sig_size, d.pk_size, d.sk_size)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> SchemeId {
        SchemeId::parse(s, true).unwrap()
    }

    #[test]
    fn reference_rows_are_found() {
        assert_eq!(reference_for(&id("frogstar-wots-sha256")).unwrap().sig_bytes, 25_552);
        assert_eq!(reference_for(&id("frog-mock-bliss2")).unwrap().sig_bytes, 7_054);
        assert_eq!(REFERENCE_TABLE[5].sig_bytes, 27_688);
    }

    #[test]
    fn audit_is_deterministic() {
        let a = run_cost_audit(&id("frog-wots-sha256"), 3, &Seed([1; 16])).unwrap();
        let b = run_cost_audit(&id("frog-wots-sha256"), 3, &Seed([1; 16])).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.sign.len(), 7);
        assert!(a.trace_csv().lines().count() == 1 + 1 + 14);
    }

    #[test]
    fn size_rows_carry_formula_values() {
        let r = run_size_audit(&id("frog-wots-sha256"));
        assert_eq!(r[0].formula, 27_840);
        assert_eq!(r[0].delta_vs_reference(), Some(-32));
        let r = run_size_audit(&id("frogstar-mock-bliss2"));
        assert_eq!(r[0].formula, 4_766);
        assert_eq!(r[1].measured, 32);
        assert!(size_report_csv(&r).starts_with("artifact,formula"));
    }

    #[test]
    fn timing_has_three_phases() {
        let t = run_timing(&id("frogstar-wots-sha256"), 0, 1).unwrap();
        let s = timing_table(&t);
        for p in ["keygen", "sign", "verify", "XMSS-MT-SHA2_60/12_256"] {
            assert!(s.contains(p));
        }
        assert_eq!(timing_csv(&t).lines().count(), 4);
    }
}
