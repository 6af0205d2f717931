//! `fspq`: key generation, signing, verification and reports.
//!
//! Exit codes: 0 success or accept, 1 reject, 2 bad arguments, 3 I/O or
//! corrupt state, 4 exhausted key, 5 rollback hazard.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fspq_core::bench;
use fspq_core::compositions::CompositeSignature;
use fspq_core::signer::{verify, Construction, SchemeId, Signer};
use fspq_core::store::{self, FaultPoint, StateFile, StateLock};
use fspq_core::{Digest, Error, OneTimeSignature, Seed};
use rand::RngCore;

/// Set to 1 to honour FSPQ_SEED and FSPQ_FAULT.
const TEST_MODE_ENV: &str = "FSPQ_TEST_MODE";
const SEED_ENV: &str = "FSPQ_SEED";
const FAULT_ENV: &str = "FSPQ_FAULT";

const EXIT_REJECT: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_EXHAUSTED: u8 = 4;
const EXIT_ROLLBACK: u8 = 5;

#[derive(Parser)]
#[command(name = "fspq", version, about = "Forward-secure hash-based signatures")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a key: writes the state file and a 32-octet public key.
    Keygen(KeygenArgs),
    /// Sign a message and advance the state.
    Sign(SignArgs),
    /// Verify a signature. Never touches a state file.
    Verify(VerifyArgs),
    /// Show period, remaining capacity and size of a state file.
    Info(InfoArgs),
    /// Operation-count, size and timing reports.
    Bench(BenchArgs),
}

#[derive(Args)]
struct KeygenArgs {
    /// frog-<base> or frogstar-<base>; bases: wots-sha256, wots-shake256, mock-dilithium, mock-bliss2
    #[arg(long)]
    scheme: String,
    /// Exponent: 2^L - 1 periods for frog (L upper leaves), 2^E for frogstar (E a power of two)
    #[arg(long)]
    capacity: u32,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    pk: PathBuf,
    /// 16-octet seed as hex; random when absent
    #[arg(long)]
    seed_hex: Option<String>,
    /// Permit the insecure size-model mock bases
    #[arg(long)]
    allow_mock: bool,
}

#[derive(Args)]
struct SignArgs {
    #[arg(long)]
    state: PathBuf,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    sig_out: PathBuf,
    #[arg(long)]
    allow_mock: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    pk: PathBuf,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    sig: PathBuf,
    /// Expected scheme id; defaults to the one named in the signature
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    allow_mock: bool,
}

#[derive(Args)]
struct InfoArgs {
    #[arg(long)]
    state: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Report {
    Cost,
    Size,
    Timing,
    Reference,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Table,
    Csv,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(value_enum)]
    report: Report,
    #[arg(long, default_value = "frog-wots-sha256")]
    scheme: String,
    /// Same meaning as for keygen
    #[arg(long, default_value_t = 4)]
    capacity: u32,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    #[arg(long)]
    allow_mock: bool,
}

/// Failure carrying the exit code it maps to.
struct Fail {
    code: u8,
    msg: String,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::UnknownScheme(_) | Error::InvalidParameter(_) | Error::MockNotAllowed(_) => EXIT_USAGE,
            Error::Exhausted => EXIT_EXHAUSTED,
            Error::RollbackHazard { .. } => EXIT_ROLLBACK,
            _ => EXIT_IO,
        };
        Fail { code, msg: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Fail {
    Fail { code: EXIT_USAGE, msg: msg.into() }
}

fn io_fail(path: &Path, e: std::io::Error) -> Fail {
    Fail { code: EXIT_IO, msg: format!("{}: {e}", path.display()) }
}

fn read(path: &Path) -> Result<Vec<u8>, Fail> {
    fs::read(path).map_err(|e| io_fail(path, e))
}

fn test_mode() -> bool {
    std::env::var(TEST_MODE_ENV).as_deref() == Ok("1")
}

fn parse_seed(hex_str: &str) -> Result<Seed, Fail> {
    let bytes = hex::decode(hex_str.trim()).map_err(|e| usage(format!("--seed-hex: {e}")))?;
    Seed::from_slice(&bytes).ok_or_else(|| usage("--seed-hex must be 16 octets (32 hex digits)"))
}

fn pick_seed(arg: Option<&str>) -> Result<Seed, Fail> {
    if let Some(h) = arg {
        return parse_seed(h);
    }
    if let Ok(h) = std::env::var(SEED_ENV) {
        if !test_mode() {
            return Err(usage(format!("{SEED_ENV} is only honoured with {TEST_MODE_ENV}=1")));
        }
        return parse_seed(&h);
    }
    let mut s = Seed([0; 16]);
    rand::rngs::OsRng.fill_bytes(&mut s.0);
    Ok(s)
}

/// Converts the `--capacity` exponent into the construction parameter.
fn construction_param(id: &SchemeId, exponent: u32) -> Result<u32, Fail> {
    match id.construction {
        Construction::Frog => {
            if exponent == 0 || exponent > fspq_core::frog::MAX_UPPER_LEAVES {
                return Err(usage(format!(
                    "--capacity for frog is L in 1..={} (2^L - 1 periods)",
                    fspq_core::frog::MAX_UPPER_LEAVES
                )));
            }
            Ok(exponent)
        }
        Construction::Star => {
            if !exponent.is_power_of_two() || exponent > 1 << fspq_core::star::MAX_DEPTH {
                return Err(usage("--capacity for frogstar is E in {1,2,4,...,64} (2^E periods)"));
            }
            Ok(exponent.trailing_zeros())
        }
    }
}

fn scheme(name: &str, allow_mock: bool) -> Result<SchemeId, Fail> {
    SchemeId::parse(name, allow_mock).map_err(|e| {
        let mut f = Fail::from(e);
        f.msg = format!("{}\nknown schemes: {}", f.msg, SchemeId::all().join(", "));
        f
    })
}

fn fault() -> Result<Option<FaultPoint>, Fail> {
    match std::env::var(FAULT_ENV) {
        Ok(name) if test_mode() => {
            FaultPoint::from_name(&name).map(Some).ok_or_else(|| usage(format!("unknown fault point `{name}`")))
        }
        _ => Ok(None),
    }
}

fn cmd_keygen(a: KeygenArgs) -> Result<(), Fail> {
    let id = scheme(&a.scheme, a.allow_mock)?;
    let param = construction_param(&id, a.capacity)?;
    let seed = pick_seed(a.seed_hex.as_deref())?;
    let (signer, pk) = Signer::keygen(&id, &seed, param)?;
    drop(seed);
    let _lock = StateLock::acquire(&a.out)?;
    if a.out.exists() {
        return Err(usage(format!("{} exists; refusing to overwrite a key state", a.out.display())));
    }
    // a mark left by a deleted state would flag the new key as rolled back
    let _ = fs::remove_file(store::high_water_path(&a.out));
    store::save(&a.out, &StateFile::from_signer(&signer))?;
    fs::write(&a.pk, pk.as_bytes()).map_err(|e| io_fail(&a.pk, e))?;
    let d = id.base.descriptor();
    println!("scheme:    {}", id.name());
    println!("capacity:  {}", signer.capacity());
    println!("base:      {} (sig {} B, pk {} B, sk {} B)", d.name, d.sig_size, d.pk_size, d.sk_size);
    println!("signature: {} B at period 0", id.signature_len(param, 0));
    println!("pk:        {}", hex::encode(pk.as_bytes()));
    Ok(())
}

fn cmd_sign(a: SignArgs) -> Result<(), Fail> {
    let message = read(&a.input)?;
    let _lock = StateLock::acquire(&a.state)?;
    let file = store::load(&a.state)?;
    scheme(&file.scheme_id, a.allow_mock)?;
    let mut signer = file.to_signer()?;
    let sig = signer.sign_current(&message)?;
    signer.update()?;
    // the advanced state is durable before the signature leaves this process
    store::save_with_fault(&a.state, &StateFile::from_signer(&signer), fault()?)?;
    fs::write(&a.sig_out, sig.to_bytes()).map_err(|e| io_fail(&a.sig_out, e))?;
    println!("period {}", sig.period);
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> Result<bool, Fail> {
    let pk_bytes = read(&a.pk)?;
    let message = read(&a.input)?;
    let sig_bytes = read(&a.sig)?;
    let Some(pk) = Digest::from_slice(&pk_bytes) else {
        return Ok(false);
    };
    let Ok(sig) = CompositeSignature::from_bytes(&sig_bytes) else {
        return Ok(false);
    };
    let id = scheme(a.scheme.as_deref().unwrap_or(&sig.scheme_id), a.allow_mock)?;
    Ok(verify(&id, &pk, &message, &sig))
}

fn cmd_info(a: InfoArgs) -> Result<(), Fail> {
    let size = fs::metadata(&a.state).map_err(|e| io_fail(&a.state, e))?.len();
    let file = store::load_file(&a.state)?;
    let signer = file.to_signer()?;
    println!("scheme:    {}", file.scheme_id);
    println!("period:    {}", signer.period());
    println!("capacity:  {}", signer.capacity());
    println!("remaining: {}", signer.remaining());
    println!("size:      {size} B");
    if let Some(h) = store::read_high_water(&a.state)? {
        println!("high-water mark: {h}");
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<(), Fail> {
    let csv = a.format == Format::Csv;
    if let Report::Reference = a.report {
        print!("{}", if csv { bench::reference_csv() } else { bench::reference_table() });
        return Ok(());
    }
    let id = scheme(&a.scheme, a.allow_mock)?;
    let param = construction_param(&id, a.capacity)?;
    match a.report {
        Report::Cost => {
            let audit = bench::run_cost_audit(&id, param, &Seed([0; 16]))?;
            print!("{}", if csv { audit.trace_csv() } else { bench::cost_report_table(&audit) });
        }
        Report::Size => {
            let rows = bench::run_size_audit(&id);
            print!("{}", if csv { bench::size_report_csv(&rows) } else { bench::size_report_table(&rows) });
        }
        Report::Timing => {
            let t = bench::run_timing(&id, param, a.reps)?;
            print!("{}", if csv { bench::timing_csv(&t) } else { bench::timing_table(&t) });
        }
        Report::Reference => unreachable!(),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Keygen(a) => cmd_keygen(a),
        Cmd::Sign(a) => cmd_sign(a),
        Cmd::Verify(a) => match cmd_verify(a) {
            Ok(true) => {
                println!("accept");
                Ok(())
            }
            Ok(false) => {
                println!("reject");
                return ExitCode::from(EXIT_REJECT);
            }
            Err(f) => Err(f),
        },
        Cmd::Info(a) => cmd_info(a),
        Cmd::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("fspq: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
