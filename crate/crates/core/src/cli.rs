//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a mathematical check failed, 2 usage or input
//! error.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::dyadic::{LpExponent, Resolution};
use crate::error::{Error, Result};
use crate::exact::rational_to_f64;
use crate::experiments::{
    modulus_profile, ratio_sweep_with_cap, verify_all_lemmas, LemmaConfig, RecordStatus,
    TestFunction, DEFAULT_SEED,
};
use crate::kernels::{fejer_norm_max, kernel_norm_table, FEJER_L1_SUP};
use crate::report::{
    approx_csv, kernel_norms_csv, lemma_csv, modulus_csv, parse_function, parse_spectrum, to_json,
    validation_csv, write_function, write_spectrum, ModulusRow,
};
use crate::walsh::{fwht_forward, fwht_inverse};
use crate::weights::{
    build_scheme, read_weight_file, validate_with_cap, WeightFamily, DEFAULT_C2_CAP,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const DEFAULT_RESOLUTION: u32 = 10;
const DEFAULT_LEMMA_RESOLUTION: u32 = 8;

#[derive(Parser, Debug)]
#[command(
    name = "walshvp",
    version,
    about = "Walsh-Fourier analysis and de la Vallee Poussin mean experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Forward (or inverse) Walsh-Paley transform in the text exchange format.
    Transform(Flags),
    /// Exact L1 norms of the Dirichlet and Fejer kernels.
    KernelNorms(Flags),
    /// Run every kernel lemma check and print the report.
    VerifyLemmas(Flags),
    /// Approximation error against the modulus of continuity, per block.
    Approx(Flags),
    /// Modulus of continuity at each dyadic level.
    Modulus(Flags),
    /// Check a weight scheme against the theorem hypotheses.
    WeightsValidate(Flags),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Flags shared by every subcommand; a TOML file given by `--config` uses
/// the same keys and fills in whatever the command line leaves unset.
#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    #[arg(long)]
    pub resolution: Option<u32>,
    /// abs_power:<a>, indicator:<n>, walsh:<k>=<c>,..., random[:seed], step_mix[:seed]
    #[arg(long)]
    pub function: Option<String>,
    /// Exchange-format file read by `transform` (`-` for stdin).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Family name (uniform, linear_up, linear_down, cesaro:<a>) or a k,t CSV file.
    #[arg(long)]
    pub weights: Option<String>,
    /// Comma-separated exponents, `inf` allowed.
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub nmin: Option<u32>,
    #[arg(long)]
    pub nmax: Option<u32>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file, `-` for stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Cap on t_last (2^{n+1}-1) for non-decreasing weights.
    #[arg(long)]
    pub cmax: Option<f64>,
    /// Randomized instances of the modulus inequality in `verify-lemmas`.
    #[arg(long)]
    pub instances: Option<usize>,
    /// Random rational schemes in the decomposition check.
    #[arg(long)]
    pub schemes: Option<usize>,
    /// `transform`: read a spectrum and synthesize samples.
    #[arg(long)]
    #[serde(default)]
    pub inverse: bool,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

macro_rules! fill {
    ($dst:ident, $src:ident, $($field:ident),*) => {
        $( if $dst.$field.is_none() { $dst.$field = $src.$field; } )*
    };
}

impl Flags {
    /// Fill unset fields from `other`.
    pub fn merge(mut self, other: Flags) -> Flags {
        fill!(
            self, other, resolution, function, input, weights, p, nmin, nmax, n, seed, out, format,
            cmax, instances, schemes
        );
        self.inverse |= other.inverse;
        self
    }

    pub fn load_config(path: &Path) -> Result<Flags> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| Error::Parse {
            line: e
                .span()
                .map(|s| text[..s.start].lines().count().max(1))
                .unwrap_or(0),
            message: e.message().to_string(),
        })
    }

    fn resolution_or(&self, default: u32) -> Result<Resolution> {
        Resolution::new(self.resolution.unwrap_or(default))
    }

    fn p_list(&self) -> Result<Vec<LpExponent>> {
        match &self.p {
            None => Ok(LpExponent::standard().to_vec()),
            Some(s) => s.split(',').map(str::parse).collect(),
        }
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    fn cmax(&self) -> f64 {
        self.cmax.unwrap_or(DEFAULT_C2_CAP)
    }

    fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    /// Bare `random` / `step_mix` take their seed from `--seed`.
    fn test_function(&self) -> Result<TestFunction> {
        let spec = self.function.as_deref().ok_or(Error::UnknownSpec {
            what: "function",
            value: "(missing --function)".into(),
        })?;
        match spec.trim() {
            "random" | "step_mix" | "stepmix" => format!("{spec}:{}", self.seed()).parse(),
            s => s.parse(),
        }
    }

    fn weight_family(&self) -> Result<WeightFamily> {
        let spec = self.weights.as_deref().ok_or(Error::UnknownSpec {
            what: "weights",
            value: "(missing --weights)".into(),
        })?;
        spec.parse()
    }
}

/// What a subcommand produced.
struct Outcome {
    text: String,
    passed: bool,
}

fn ok(text: String) -> Outcome {
    Outcome { text, passed: true }
}

fn read_input(path: &Path) -> Result<String> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
        return Ok(text);
    }
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn transform(flags: &Flags) -> Result<Outcome> {
    if flags.inverse {
        let path = flags.input.as_deref().ok_or(Error::UnknownSpec {
            what: "input",
            value: "(--inverse needs --input)".into(),
        })?;
        let f = fwht_inverse(&parse_spectrum(&read_input(path)?)?);
        return Ok(ok(match flags.format() {
            Format::Csv => write_function(&f),
            Format::Json => to_json(&serde_json::json!({
                "resolution": f.resolution().bits(),
                "values": f.values(),
            })),
        }));
    }
    let f = match &flags.input {
        Some(path) => parse_function(&read_input(path)?)?,
        None => flags
            .test_function()?
            .sample(flags.resolution_or(DEFAULT_RESOLUTION)?)?,
    };
    let s = fwht_forward(&f);
    Ok(ok(match flags.format() {
        Format::Csv => write_spectrum(&s),
        Format::Json => to_json(&serde_json::json!({
            "resolution": s.resolution().bits(),
            "coeffs": s.coeffs(),
        })),
    }))
}

fn kernel_norms(flags: &Flags) -> Result<Outcome> {
    let res = flags.resolution_or(DEFAULT_RESOLUTION)?;
    let n_max = flags.nmax.map(|n| n as usize).unwrap_or(res.len());
    let rows = kernel_norm_table(n_max, res)?;
    let passed = fejer_norm_max(&rows).is_none_or(|(_, m)| m <= FEJER_L1_SUP);
    let text = match flags.format() {
        Format::Csv => kernel_norms_csv(&rows),
        Format::Json => to_json(
            &rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "n": r.n,
                        "l1_dirichlet": rational_to_f64(&r.l1_dirichlet),
                        "l1_fejer": rational_to_f64(&r.l1_fejer),
                        "l1_fejer_exact": r.l1_fejer.to_string(),
                    })
                })
                .collect::<Vec<_>>(),
        ),
    };
    Ok(Outcome { text, passed })
}

fn verify_lemmas(flags: &Flags, stderr: &mut dyn Write) -> Result<Outcome> {
    let res = flags.resolution_or(DEFAULT_LEMMA_RESOLUTION)?;
    let defaults = LemmaConfig::default();
    let config = LemmaConfig {
        seed: flags.seed(),
        inequality_instances: flags.instances.unwrap_or(defaults.inequality_instances),
        random_schemes: flags.schemes.unwrap_or(defaults.random_schemes),
        ..defaults
    };
    let report = verify_all_lemmas(res, &config)?;
    let _ = writeln!(
        stderr,
        "# seed={} max_fejer_l1={} at n={}",
        report.seed, report.fejer_max.1, report.fejer_max.0
    );
    let passed = report.all_pass();
    let text = match flags.format() {
        Format::Csv => lemma_csv(&report),
        Format::Json => to_json(&report),
    };
    Ok(Outcome { text, passed })
}

#[derive(Serialize)]
struct ApproxJson<'a> {
    function: String,
    weights: String,
    resolution: u32,
    seed: u64,
    sup_ratio: f64,
    sup_c2: f64,
    records: &'a [crate::experiments::ApproxRecord],
}

fn approx(flags: &Flags, stderr: &mut dyn Write) -> Result<Outcome> {
    let res = flags.resolution_or(DEFAULT_RESOLUTION)?;
    let function = flags.test_function()?;
    let family = flags.weight_family()?;
    let p_list = flags.p_list()?;
    let nmin = flags.nmin.unwrap_or(1);
    let nmax = flags.nmax.unwrap_or(res.bits().saturating_sub(2));
    if nmin == 0 || nmin > nmax || nmax + 1 > res.bits() {
        return Err(Error::OutOfRange {
            what: "block range (need 1 <= nmin <= nmax <= N - 1)",
            value: nmax as u64,
            limit: res.bits() as u64 - 1,
        });
    }
    let f = function.sample(res)?;
    let sweep = ratio_sweep_with_cap(&f, &family, nmin..=nmax, &p_list, flags.cmax())?;
    let _ = writeln!(
        stderr,
        "# function={function} weights={} seed={} sup_ratio={} sup_c2={}",
        sweep.family,
        flags.seed(),
        sweep.sup_ratio,
        sweep.sup_c2
    );
    let passed = sweep.records.iter().all(|r| r.status == RecordStatus::Ok);
    let text = match flags.format() {
        Format::Csv => approx_csv(&sweep.records),
        Format::Json => to_json(&ApproxJson {
            function: function.to_string(),
            weights: sweep.family.clone(),
            resolution: res.bits(),
            seed: flags.seed(),
            sup_ratio: sweep.sup_ratio,
            sup_c2: sweep.sup_c2,
            records: &sweep.records,
        }),
    };
    Ok(Outcome { text, passed })
}

fn modulus(flags: &Flags) -> Result<Outcome> {
    let res = flags.resolution_or(DEFAULT_RESOLUTION)?;
    let f = flags.test_function()?.sample(res)?;
    let nmin = flags.nmin.unwrap_or(0);
    let nmax = flags.nmax.unwrap_or(res.bits());
    let mut rows = Vec::new();
    for p in flags.p_list()? {
        for (n, modulus) in modulus_profile(&f, p, nmin..=nmax)? {
            rows.push(ModulusRow { n, p, modulus });
        }
    }
    rows.sort_by_key(|r| r.n);
    Ok(ok(match flags.format() {
        Format::Csv => modulus_csv(&rows),
        Format::Json => to_json(&rows),
    }))
}

fn weights_validate(flags: &Flags) -> Result<Outcome> {
    let scheme = match flags.weight_family()? {
        WeightFamily::Custom { path, normalize } => {
            let mut w = read_weight_file(&path)?;
            if normalize {
                w = w.normalized()?;
            }
            if let Some(n) = flags.n {
                if n != w.block() {
                    return Err(Error::OutOfRange {
                        what: "--n (weight file block)",
                        value: n as u64,
                        limit: w.block() as u64,
                    });
                }
            }
            w
        }
        family => {
            let n = flags.n.ok_or(Error::UnknownSpec {
                what: "block",
                value: "(a weight family needs --n)".into(),
            })?;
            build_scheme(&family, n)?
        }
    };
    let report = validate_with_cap(&scheme, flags.cmax());
    let passed = report.theorem_applies();
    Ok(Outcome {
        text: match flags.format() {
            Format::Csv => validation_csv(&report),
            Format::Json => to_json(&report),
        },
        passed,
    })
}

fn write_output(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) if path.as_os_str() != "-" => {
            fs::write(path, text).map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })
        }
        _ => stdout
            .write_all(text.as_bytes())
            .map_err(|source| Error::Io {
                path: PathBuf::from("-"),
                source,
            }),
    }
}

/// Parse `argv` (program name first) and run, writing to the given streams.
pub fn run_with_io<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let (command, flags) = match cli.command {
        Command::Transform(f) => ("transform", f),
        Command::KernelNorms(f) => ("kernel-norms", f),
        Command::VerifyLemmas(f) => ("verify-lemmas", f),
        Command::Approx(f) => ("approx", f),
        Command::Modulus(f) => ("modulus", f),
        Command::WeightsValidate(f) => ("weights-validate", f),
    };
    let result = (|| {
        let flags = match &flags.config {
            Some(path) => flags.clone().merge(Flags::load_config(path)?),
            None => flags,
        };
        let outcome = match command {
            "transform" => transform(&flags),
            "kernel-norms" => kernel_norms(&flags),
            "verify-lemmas" => verify_lemmas(&flags, stderr),
            "approx" => approx(&flags, stderr),
            "modulus" => modulus(&flags),
            _ => weights_validate(&flags),
        }?;
        write_output(flags.out.as_deref(), &outcome.text, stdout)?;
        Ok::<_, Error>(outcome.passed)
    })();
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            let _ = writeln!(stderr, "walshvp {command}: check failed");
            EXIT_CHECK_FAILED
        }
        Err(e) => {
            let _ = writeln!(stderr, "walshvp {command}: {e}");
            EXIT_USAGE
        }
    }
}

/// Entry point for the binary.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with_io(argv, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("walshvp").chain(args.iter().copied());
        let code = run_with_io(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn usage_errors_exit_2() {
        let (code, _, err) = run_capture(&["approx", "--bogus"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("Usage"));
        assert_eq!(run_capture(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&[]).0, EXIT_USAGE);
        assert_eq!(
            run_capture(&["approx", "--weights", "uniform"]).0,
            EXIT_USAGE
        );
        let (code, _, err) = run_capture(&[
            "approx",
            "--function",
            "abs_power:1",
            "--weights",
            "uniform",
            "--resolution",
            "6",
            "--nmax",
            "6",
        ]);
        assert_eq!(code, EXIT_USAGE, "{err}");
        assert_eq!(
            run_capture(&["modulus", "--function", "random", "--p", "0.5"]).0,
            EXIT_USAGE
        );
    }

    #[test]
    fn help_exits_0() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("verify-lemmas"));
    }

    #[test]
    fn flags_override_config() {
        let cfg = Flags {
            resolution: Some(9),
            seed: Some(3),
            p: Some("1".into()),
            ..Flags::default()
        };
        let cli = Flags {
            resolution: Some(7),
            ..Flags::default()
        };
        let merged = cli.merge(cfg);
        assert_eq!(merged.resolution, Some(7));
        assert_eq!(merged.seed, Some(3));
        assert_eq!(merged.p_list().unwrap(), vec![LpExponent::ONE]);
    }

    #[test]
    fn config_parsing() {
        let flags: Flags = toml::from_str(
            "resolution = 6\nfunction = \"abs_power:1\"\np = \"2,inf\"\nformat = \"json\"\n",
        )
        .unwrap();
        assert_eq!(flags.resolution, Some(6));
        assert_eq!(flags.format, Some(Format::Json));
        assert_eq!(
            flags.p_list().unwrap(),
            vec![LpExponent::TWO, LpExponent::Infinity]
        );
        assert!(toml::from_str::<Flags>("colour = 1").is_err());
    }

    #[test]
    fn bare_random_takes_seed_flag() {
        let flags = Flags {
            function: Some("random".into()),
            seed: Some(11),
            ..Flags::default()
        };
        assert_eq!(
            flags.test_function().unwrap(),
            TestFunction::RandomBounded(11)
        );
    }
}
