use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use danielewski::membership::Certificate;
use danielewski::parse::{
    parse_automorphism, parse_constant, parse_field, parse_polynomial, parse_surface,
};
use danielewski::rational::format_rational;
use danielewski::{
    AlgebraicVectorField, BracketExpression, Error, LndVerdict, Potential, Surface,
    DEFAULT_LND_BOUND,
};

#[derive(Parser)]
#[command(name = "danielewski", version, about = "Exact algebra on Danielewski surfaces xy = p(z)")]
struct Cli {
    /// The polynomial p(z), e.g. "z^2 - 1".
    #[arg(long, global = true)]
    surface: Option<String>,

    #[arg(long, global = true, value_enum, env = "DANIELEWSKI_FORMAT", default_value = "text")]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Normal form of an expression in x, y, z.
    Reduce {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Product of two expressions.
    Mul {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Lie bracket of two fields.
    Bracket { a: String, b: String },
    /// Potential of a volume-preserving field.
    Potential { field: String },
    /// Volume-preserving field with the given potential.
    Hamiltonian {
        #[arg(allow_hyphen_values = true)]
        potential: String,
    },
    /// Whether a field has zero divergence against dx/x ∧ dz.
    IsVolumePreserving { field: String },
    /// Whether a field kills x, y and z after finitely many applications.
    LndCheck {
        field: String,
        #[arg(long, default_value_t = DEFAULT_LND_BOUND)]
        max_iter: usize,
    },
    /// Whether a potential lies in the Lie algebra generated by LNDs.
    Decide {
        #[arg(allow_hyphen_values = true)]
        potential: String,
    },
    /// Bracket certificate for a potential.
    Certify {
        #[arg(allow_hyphen_values = true)]
        potential: String,
        #[arg(long)]
        shears_only: bool,
        #[arg(long, default_value_t = 12)]
        max_degree: u32,
        /// Write the certificate document here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check a certificate document.
    VerifyCert {
        file: PathBuf,
        /// Check against this potential instead of the one in the file.
        #[arg(long, allow_hyphen_values = true)]
        potential: Option<String>,
    },
    /// Push a field forward along an automorphism word.
    Conjugate { word: String, field: String },
    /// The word FIRST followed by SECOND, in normal form.
    Compose { first: String, second: String },
    /// The constant J with φ*ω = J·ω.
    VolumeFactor { word: String },
    /// Whether the default field family spans the tangent space at a point.
    FlexCheck {
        #[arg(allow_hyphen_values = true)]
        x: String,
        #[arg(allow_hyphen_values = true)]
        y: String,
        #[arg(allow_hyphen_values = true)]
        z: String,
    },
    /// Equivariant certificate for an anti-invariant monomial on xy = z^2 - 1.
    Z2Certify {
        #[arg(allow_hyphen_values = true)]
        monomial: String,
    },
    /// Certify every anti-invariant monomial up to a degree on xy = z^2 - 1.
    Z2Check {
        #[arg(long, default_value_t = 7)]
        max_degree: u32,
    },
}

enum Failure {
    Core(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Core(e) if e.is_internal() => 3,
            Failure::Core(Error::NotInLieAlgebra { .. } | Error::SearchExhausted { .. }) => 1,
            Failure::Core(_) => 2,
        }
    }

    fn code(&self) -> &'static str {
        match self {
            Failure::Usage(_) => "usage",
            Failure::Core(e) => e.code(),
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
        }
    }
}

struct Report {
    success: bool,
    text: String,
    json: Value,
}

impl Report {
    fn ok(text: impl Into<String>, json: Value) -> Self {
        Self {
            success: true,
            text: text.into(),
            json,
        }
    }

    fn verdict(success: bool, text: impl Into<String>, json: Value) -> Self {
        Self {
            success,
            text: text.into(),
            json,
        }
    }
}

type Outcome = Result<Report, Failure>;

fn surface(cli: &Cli) -> Result<Surface, Failure> {
    let src = cli
        .surface
        .as_deref()
        .ok_or_else(|| Failure::Usage("--surface is required for this command".into()))?;
    Ok(parse_surface(src)?)
}

fn field_json(v: &AlgebraicVectorField) -> Value {
    json!({
        "x": v.img_x().to_string(),
        "y": v.img_y().to_string(),
        "z": v.img_z().to_string(),
    })
}

fn field(s: &Surface, src: &str) -> Result<AlgebraicVectorField, Failure> {
    Ok(parse_field(src)?.resolve(s)?)
}

fn potential(s: &Surface, src: &str) -> Result<Potential, Failure> {
    Ok(Potential::new(parse_polynomial(s, src)?))
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Reduce { expr } => {
            let s = surface(cli)?;
            let e = parse_polynomial(&s, expr)?;
            Ok(Report::ok(e.to_string(), json!({ "result": e.to_string() })))
        }
        Command::Mul { a, b } => {
            let s = surface(cli)?;
            let e = s.mul(&parse_polynomial(&s, a)?, &parse_polynomial(&s, b)?);
            Ok(Report::ok(e.to_string(), json!({ "result": e.to_string() })))
        }
        Command::Bracket { a, b } => {
            let s = surface(cli)?;
            let v = s.bracket(&field(&s, a)?, &field(&s, b)?);
            Ok(Report::ok(v.to_string(), json!({ "field": field_json(&v) })))
        }
        Command::Potential { field: src } => {
            let s = surface(cli)?;
            let v = field(&s, src)?;
            if !s.is_volume_preserving(&v) {
                return Err(Error::NotVolumePreserving.into());
            }
            let f = s.potential_of(&v)?;
            Ok(Report::ok(f.to_string(), json!({ "potential": f.to_string() })))
        }
        Command::Hamiltonian { potential: src } => {
            let s = surface(cli)?;
            let v = s.hamiltonian_of(&potential(&s, src)?)?;
            Ok(Report::ok(v.to_string(), json!({ "field": field_json(&v) })))
        }
        Command::IsVolumePreserving { field: src } => {
            let s = surface(cli)?;
            let yes = s.is_volume_preserving(&field(&s, src)?);
            Ok(Report::verdict(yes, yes.to_string(), json!({ "volume_preserving": yes })))
        }
        Command::LndCheck { field: src, max_iter } => {
            let s = surface(cli)?;
            Ok(match s.lnd_check(&field(&s, src)?, *max_iter) {
                LndVerdict::NilpotentWithDegree(n) => Report::ok(
                    format!("nilpotent with degree {n}"),
                    json!({ "nilpotent": true, "degree": n }),
                ),
                LndVerdict::NotNilpotentWithinBound(b) => Report::verdict(
                    false,
                    format!("not nilpotent within {b} iterations"),
                    json!({ "nilpotent": false, "bound": b }),
                ),
            })
        }
        Command::Decide { potential: src } => {
            let s = surface(cli)?;
            let v = s.decide(&potential(&s, src)?);
            let rem = v.witness_remainder.to_string();
            let word = if v.accepted { "accepted" } else { "rejected" };
            Ok(Report::verdict(
                v.accepted,
                format!("{word} (remainder {rem})"),
                json!({
                    "accepted": v.accepted,
                    "remainder": rem,
                    "potential": v.normalized_potential.to_string(),
                }),
            ))
        }
        Command::Certify {
            potential: src,
            shears_only,
            max_degree,
            output,
        } => {
            let s = surface(cli)?;
            let f = potential(&s, src)?;
            let expression = if *shears_only {
                s.certify_shears_only(&f, *max_degree)?
            } else {
                s.avdp_decompose(&f)?
            };
            let cert = Certificate {
                surface: s,
                potential: f,
                expression,
            };
            let doc = cert.to_json_string();
            let size = cert.expression.size();
            let mut text = cert.expression.to_string();
            if let Some(path) = output {
                fs::write(path, format!("{doc}\n"))
                    .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
                text = format!("wrote {} ({size} nodes)", path.display());
            }
            Ok(Report::ok(text, cert.to_json()))
        }
        Command::VerifyCert { file, potential: claimed } => {
            let src = fs::read_to_string(file)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", file.display())))?;
            let cert = Certificate::from_json_str(&src)?;
            if let Some(flag) = &cli.surface {
                if parse_surface(flag)?.p() != cert.surface.p() {
                    return Err(Failure::Usage(format!(
                        "certificate is for p = {}, not {flag}",
                        cert.surface.p()
                    )));
                }
            }
            let target = match claimed {
                Some(p) => potential(&cert.surface, p)?,
                None => cert.potential.clone(),
            };
            let ok = cert.surface.verify_certificate(&cert.expression, &target);
            Ok(Report::verdict(
                ok,
                ok.to_string(),
                json!({ "verified": ok, "potential": target.to_string() }),
            ))
        }
        Command::Conjugate { word, field: src } => {
            let s = surface(cli)?;
            let phi = s.automorphism(&parse_automorphism(word)?)?;
            let v = s.conjugate_field(&phi, &field(&s, src)?);
            Ok(Report::ok(v.to_string(), json!({ "field": field_json(&v) })))
        }
        Command::Compose { first, second } => {
            let s = surface(cli)?;
            let a = s.automorphism(&parse_automorphism(first)?)?;
            let b = s.automorphism(&parse_automorphism(second)?)?;
            let c = s.compose(&b, &a);
            let [x, y, z] = c.images().each_ref().map(ToString::to_string);
            Ok(Report::ok(
                format!("{c}\n(x, y, z) -> ({x}, {y}, {z})"),
                json!({ "word": c.to_string(), "images": { "x": x, "y": y, "z": z } }),
            ))
        }
        Command::VolumeFactor { word } => {
            let s = surface(cli)?;
            let j = s.volume_factor(&s.automorphism(&parse_automorphism(word)?)?)?;
            let j = format_rational(&j);
            Ok(Report::ok(j.clone(), json!({ "volume_factor": j })))
        }
        Command::FlexCheck { x, y, z } => {
            let s = surface(cli)?;
            let point = [parse_constant(x)?, parse_constant(y)?, parse_constant(z)?];
            let ok = s.flex_check(&point)?;
            Ok(Report::verdict(ok, ok.to_string(), json!({ "spans": ok })))
        }
        Command::Z2Certify { monomial } => {
            let s = surface(cli)?;
            let e = parse_polynomial(&s, monomial)?;
            let mut terms = e.terms();
            let (m, c) = match (terms.next(), terms.next()) {
                (Some(t), None) => t,
                _ => return Err(Failure::Usage(format!("{monomial:?} is not a single monomial"))),
            };
            let cert = BracketExpression::scaled(c.clone(), &s.z2_certificate(m)?);
            let f = Potential::new(e.clone());
            let ok = s.verify_certificate(&cert, &f);
            let doc = Certificate {
                surface: s,
                potential: f,
                expression: cert,
            };
            Ok(Report::verdict(
                ok,
                doc.expression.to_string(),
                json!({ "verified": ok, "certificate": doc.to_json() }),
            ))
        }
        Command::Z2Check { max_degree } => {
            let s = surface(cli)?;
            let r = s.z2_avdp_check(*max_degree)?;
            let mut text = String::new();
            for row in &r.rows {
                text.push_str(&format!("{:<12} {:>5}  {}\n", row.monomial.to_string(), row.size, row.verified));
            }
            text.push_str(&format!(
                "{} monomials, leaves invariant: {}, all verified: {}",
                r.rows.len(),
                r.leaves_invariant,
                r.all_verified()
            ));
            let rows: Vec<Value> = r
                .rows
                .iter()
                .map(|row| json!({ "monomial": row.monomial.to_string(), "size": row.size, "verified": row.verified }))
                .collect();
            Ok(Report::verdict(
                r.all_verified(),
                text,
                json!({ "max_degree": r.max_degree, "rows": rows, "leaves_invariant": r.leaves_invariant }),
            ))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            match cli.format {
                Format::Text => println!("{}", report.text),
                Format::Json => println!("{}", serde_json::to_string_pretty(&report.json).expect("json")),
            }
            ExitCode::from(if report.success { 0 } else { 1 })
        }
        Err(f) => {
            match cli.format {
                Format::Text => eprintln!("error[{}]: {}", f.code(), f.message()),
                Format::Json => eprintln!(
                    "{}",
                    json!({ "error": { "code": f.code(), "message": f.message() } })
                ),
            }
            ExitCode::from(f.exit_code())
        }
    }
}
