use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dehn_core::amod::{self, AModule, ModuleSpec, Side};
use dehn_core::barcx::{self, SweepBounds};
use dehn_core::f2lin::Barcode;
use dehn_core::freecert::{self, FreeWord};
use dehn_core::homlat::MilnorLattice;
use dehn_core::tw;
use dehn_core::zigzag::{zigzag, SphereSpec, ZigzagCat};
use dehn_core::Error;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

/// Twisted complexes, A-infinity modules and Dehn twists over Z2.
#[derive(Debug, Parser)]
#[command(name = "dehn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Barcode of a module given as JSON.
    Classify {
        #[arg(long)]
        module: PathBuf,
    },
    /// Minimal module with a given barcode.
    Canonical {
        #[arg(long)]
        barcode: PathBuf,
        #[arg(long, value_enum, default_value_t = SideArg::Right)]
        side: SideArg,
    },
    /// Cohomology rank of the truncated bar complex.
    Bar {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(short)]
        n: usize,
    },
    /// Checks the rank inequalities over all small minimal module pairs.
    Sweep {
        #[arg(long)]
        max_dim: usize,
        #[arg(long)]
        max_n: usize,
        /// Only torsion summands with k >= 3 (default minimum is 2).
        #[arg(long)]
        strengthened: bool,
        #[arg(long)]
        min_k: Option<usize>,
        #[arg(long, default_value_t = 6)]
        max_k: usize,
    },
    /// hf between two braid-word spheres.
    Hf {
        #[arg(short)]
        m: usize,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Compares the bar model of the n-th twist with the iterated twist.
    Tn {
        #[arg(short)]
        m: usize,
        #[arg(long = "L")]
        l: usize,
        #[arg(long)]
        x: String,
        #[arg(short)]
        n: usize,
    },
    /// Homology class of a braid-word sphere.
    Homology {
        #[arg(short)]
        m: usize,
        #[arg(long)]
        dim_mod4: u8,
        #[arg(long)]
        word: String,
    },
    /// Checks hf >= 2 and non-isomorphism for a pair of spheres.
    PropertyS {
        #[arg(short)]
        m: usize,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        /// Extra witness spheres; defaults to every P_j and both inputs.
        #[arg(long)]
        witness: Vec<String>,
    },
    /// Prefix trace and nontriviality witness for a word in two twists.
    Certify {
        #[arg(short)]
        m: usize,
        #[arg(long = "L")]
        l: String,
        #[arg(long = "Lp")]
        lp: String,
        #[arg(long)]
        word: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SideArg {
    Left,
    Right,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
        }
    }
}

struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::Invariant(_) => (3, "internal"),
            Error::Parse { .. } => (2, "parse"),
            Error::Validation(_) => (2, "validation"),
            Error::Dimension(_) => (2, "dimension"),
            Error::InvalidArgument(_) => (2, "invalid_argument"),
            Error::Unsupported(_) => (2, "unsupported"),
        };
        Failure {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

fn input_error(kind: &'static str, message: String) -> Failure {
    Failure {
        code: 2,
        kind,
        message,
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| input_error("io", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| input_error("json", format!("{}: {e}", path.display())))
}

fn read_module(path: &Path) -> Result<AModule, Failure> {
    let spec: ModuleSpec = read_json(path)?;
    let m = AModule::from_spec(&spec)?;
    let bad = m.validate();
    if !bad.is_empty() {
        return Err(input_error(
            "validation",
            format!("{}: A-infinity relations fail at orders {bad:?}", path.display()),
        ));
    }
    Ok(m)
}

fn sphere_arg(z: &ZigzagCat, text: &str) -> Result<tw::TwObject, Failure> {
    let spec: SphereSpec = text.parse()?;
    Ok(z.sphere(&spec)?)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable output")
}

fn run(cmd: Command) -> Result<Value, Failure> {
    match cmd {
        Command::Classify { module } => {
            let m = read_module(&module)?;
            Ok(to_value(&amod::classify(&m)?))
        }
        Command::Canonical { barcode, side } => {
            let b: Barcode = read_json(&barcode)?;
            let b = Barcode::new(b.free_rank, b.torsion);
            if b.torsion.contains(&0) {
                return Err(input_error("invalid_argument", "torsion exponents must be positive".into()));
            }
            Ok(to_value(&amod::canonical(&b, side.into()).to_spec()))
        }
        Command::Bar { left, right, n } => {
            let m = read_module(&left)?;
            let nm = read_module(&right)?;
            Ok(json!({ "rank": barcx::bar_rank(&m, &nm, n)? }))
        }
        Command::Sweep {
            max_dim,
            max_n,
            strengthened,
            min_k,
            max_k,
        } => {
            let min_k = min_k.unwrap_or(if strengthened { 3 } else { 2 });
            if min_k < 2 || max_k < min_k {
                return Err(input_error("invalid_argument", "need 2 <= min-k <= max-k".into()));
            }
            let report = barcx::inequality_sweep(SweepBounds {
                max_dim,
                max_n,
                min_k,
                max_k,
            });
            Ok(to_value(&report))
        }
        Command::Hf { m, x, y } => {
            let z = zigzag(m)?;
            let ox = sphere_arg(&z, &x)?;
            let oy = sphere_arg(&z, &y)?;
            Ok(json!({ "hf": z.hf(&ox, &oy)? }))
        }
        Command::Tn { m, l, x, n } => {
            let z = zigzag(m)?;
            let ox = sphere_arg(&z, &x)?;
            z.plain(l)?;
            let t = tw::build_tn(z.category(), l - 1, &ox, n)?;
            let twisted = z.twist_power(l, n as i64, &ox)?;
            let mut bar_side = Vec::new();
            let mut twist_side = Vec::new();
            for j in 1..=m {
                let pj = z.plain(j)?;
                bar_side.push(z.hf(&pj, &t)?);
                twist_side.push(z.hf(&twisted, &pj)?);
            }
            if bar_side != twist_side {
                return Err(Failure::from(Error::Invariant(format!(
                    "bar model ranks {bar_side:?} differ from twist ranks {twist_side:?}"
                ))));
            }
            Ok(json!({
                "n": n,
                "tn_copies": t.len(),
                "twist_copies": twisted.len(),
                "hf_tn": bar_side,
                "hf_twist": twist_side,
                "agree": true,
            }))
        }
        Command::Homology { m, dim_mod4, word } => {
            let lat = MilnorLattice::new(m, dim_mod4)?;
            let spec: SphereSpec = word.parse()?;
            zigzag(m)?.check_word(&spec.word)?;
            let class = lat.homology_class(&spec.word, spec.base)?;
            let self_pairing = lat.pairing(&class, &class)?;
            Ok(json!({
                "class": class,
                "self_pairing": self_pairing,
                "convention": {
                    "twist_sign": lat.sign,
                    "sigma": lat.sigma,
                    "chi": lat.chi,
                    "form": lat.form,
                },
            }))
        }
        Command::PropertyS { m, a, b, witness } => {
            let z = zigzag(m)?;
            let a: SphereSpec = a.parse()?;
            let b: SphereSpec = b.parse()?;
            let mut witnesses = freecert::default_witnesses(&z, &a, &b);
            for w in &witness {
                witnesses.push(w.parse()?);
            }
            Ok(to_value(&freecert::property_s(&z, &a, &b, &witnesses)?))
        }
        Command::Certify { m, l, lp, word } => {
            let z = zigzag(m)?;
            let l: SphereSpec = l.parse()?;
            let lp: SphereSpec = lp.parse()?;
            let w: FreeWord = word.parse()?;
            Ok(to_value(&freecert::certify_word(&z, &l, &lp, &w)?))
        }
    }
}

fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                emit(&e.to_string());
                return ExitCode::SUCCESS;
            }
            let out = json!({ "error": { "kind": "usage", "message": e.to_string().trim_end() } });
            emit(&format!("{out}\n"));
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(v) => {
            emit(&format!("{v}\n"));
            ExitCode::SUCCESS
        }
        Err(f) => {
            emit(&format!("{}\n", json!({ "error": { "kind": f.kind, "message": f.message } })));
            ExitCode::from(f.code)
        }
    }
}
