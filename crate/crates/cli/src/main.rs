//! Command-line front end for the Hurwitz-series library: exact, scriptable,
//! byte-identical output for identical inputs.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hurwitz_galois::diffgalois::{self, group_descriptor, spectral_data};
use hurwitz_galois::hurwitz::SeriesRepr;
use hurwitz_galois::linalg::MatrixRepr;
use hurwitz_galois::linode::{operator_from_basis, wronskian, OperatorRepr};
use hurwitz_galois::{
    Error, FieldElem, FieldSpec, HurwitzSeries, LinearOperator, Matrix, Precision,
};

const SIGN_NOTE: &str = "Operator coefficients a0,a1,...,a_{n-1} define the monic operator \
d^n + a_{n-1} d^{n-1} + ... + a1 d + a0, so the characteristic polynomial is \
X^n + a_{n-1} X^{n-1} + ... + a0. Series-valued coefficients are accepted only \
through a JSON operator file; finite coefficient lists there are padded with \
zeros, which fixes the operator beyond the truncation point.";

#[derive(Parser)]
#[command(name = "hurwitz", version, about = "Exact arithmetic for Hurwitz series, linear ODEs, and their automorphism groups", long_about = None, after_long_help = SIGN_NOTE)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Args)]
struct Common {
    /// Base field: Q or gf:p with p prime
    #[arg(long, default_value = "Q", value_parser = parse_field)]
    field: FieldSpec,
    /// Number of coefficients shown or checked
    #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(usize))]
    precision: usize,
    /// table: whitespace-separated canonical elements, one series per line;
    /// json: the structured schema. Defaults to table, except for group and
    /// spectral which default to json.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl Common {
    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

fn parse_field(s: &str) -> Result<FieldSpec, Error> {
    s.parse()
}

#[derive(Args)]
struct OperatorArgs {
    /// Constant coefficients "a0,a1,..." (order = count)
    #[arg(long, conflicts_with = "op_json", allow_hyphen_values = true)]
    coeffs: Option<String>,
    /// JSON operator file (schema: {"field", "order", "coeffs"}); its field
    /// entry must match --field
    #[arg(long)]
    op_json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve L(y) = 0 with given initial coefficients
    Solve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        op: OperatorArgs,
        /// Initial coefficients "c0,...,c_{n-1}"
        #[arg(long, allow_hyphen_values = true)]
        ic: String,
    },
    /// Standard solution basis of L (identity initial conditions)
    Basis {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        op: OperatorArgs,
    },
    /// Apply L to a series
    Apply {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        op: OperatorArgs,
        /// Series coefficients "c0,c1,..." (zero beyond the list)
        #[arg(long, allow_hyphen_values = true)]
        series: String,
    },
    /// Hurwitz product of two series
    Mul {
        #[command(flatten)]
        common: Common,
        /// Series coefficients, given twice
        #[arg(long, num_args = 1, required = true, allow_hyphen_values = true)]
        series: Vec<String>,
    },
    /// The exponential series (1, beta, beta^2, ...)
    Exp {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
    },
    /// Wronskian of one or more series
    Wronskian {
        #[command(flatten)]
        common: Common,
        /// Series coefficients, repeatable
        #[arg(long, num_args = 1, required = true, allow_hyphen_values = true)]
        series: Vec<String>,
    },
    /// Reconstruct the monic operator annihilating a basis (unit Wronskian)
    FromBasis {
        #[command(flatten)]
        common: Common,
        /// Series coefficients, repeatable
        #[arg(long, num_args = 1, required = true, allow_hyphen_values = true)]
        series: Vec<String>,
    },
    /// Automorphism group of the solution space as an explicit matrix group
    Group {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        op: OperatorArgs,
    },
    /// Spectral decomposition S + N with change of basis T (requires the
    /// characteristic polynomial to split over the base field)
    Spectral {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        op: OperatorArgs,
    },
    /// Apply a group element to the standard solution basis
    Act {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        op: OperatorArgs,
        /// Matrix rows separated by ';', entries by ',' — e.g. "1,1;0,1"
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // Every Display string begins with the error name, so this line
            // is both human-readable and grep-able by name.
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn parse_elems(list: &str, spec: FieldSpec) -> Result<Vec<FieldElem>, Error> {
    list.split(',')
        .map(|s| FieldElem::parse(s.trim(), spec))
        .collect()
}

fn parse_series(list: &str, spec: FieldSpec) -> Result<HurwitzSeries, Error> {
    HurwitzSeries::from_coeffs(spec, parse_elems(list, spec)?)
}

fn parse_matrix(text: &str, spec: FieldSpec) -> Result<Matrix, Error> {
    let rows: Vec<Vec<FieldElem>> = text
        .split(';')
        .map(|row| parse_elems(row, spec))
        .collect::<Result<_, _>>()?;
    Matrix::from_rows(spec, rows)
}

fn load_operator(op: &OperatorArgs, spec: FieldSpec) -> Result<LinearOperator, Error> {
    match (&op.coeffs, &op.op_json) {
        (Some(list), None) => LinearOperator::constant(spec, parse_elems(list, spec)?),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::ParseError { pos: 0, msg: format!("{}: {e}", path.display()) })?;
            let repr: OperatorRepr = serde_json::from_str(&text)
                .map_err(|e| Error::ParseError { pos: 0, msg: e.to_string() })?;
            let parsed = repr.to_operator()?;
            if parsed.spec() != spec {
                return Err(Error::MixedFields);
            }
            Ok(parsed)
        }
        _ => Err(Error::ParseError {
            pos: 0,
            msg: "exactly one of --coeffs or --op-json is required".into(),
        }),
    }
}

fn precision(common: &Common) -> Result<Precision, Error> {
    if common.precision == 0 {
        return Err(Error::ParseError { pos: 0, msg: "--precision must be at least 1".into() });
    }
    Ok(Precision::new(common.precision))
}

fn emit_series(common: &Common, series: &[HurwitzSeries]) -> Result<(), Error> {
    let p = precision(common)?;
    match common.format_or(Format::Table) {
        Format::Table => {
            for s in series {
                let line: Vec<String> =
                    s.truncate(p).iter().map(|c| c.to_string()).collect();
                println!("{}", line.join(" "));
            }
        }
        Format::Json => {
            let reprs: Vec<SeriesRepr> = series.iter().map(|s| s.to_repr(p)).collect();
            let payload = if reprs.len() == 1 {
                serde_json::to_string_pretty(&reprs[0])
            } else {
                serde_json::to_string_pretty(&reprs)
            };
            println!("{}", payload.expect("serialization cannot fail"));
        }
    }
    Ok(())
}

fn emit_json<T: serde::Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serialization cannot fail")
    );
}

fn emit_matrix_table(m: &MatrixRepr) {
    for row in &m.entries {
        println!("{}", row.join(" "));
    }
}

fn run(cmd: Cmd) -> Result<(), Error> {
    match cmd {
        Cmd::Solve { common, op, ic } => {
            let l = load_operator(&op, common.field)?;
            let init = parse_elems(&ic, common.field)?;
            let y = l.solve_ivp(&init)?;
            emit_series(&common, &[y])
        }
        Cmd::Basis { common, op } => {
            let l = load_operator(&op, common.field)?;
            let sb = l.solution_basis();
            emit_series(&common, &sb.basis)
        }
        Cmd::Apply { common, op, series } => {
            let l = load_operator(&op, common.field)?;
            let y = parse_series(&series, common.field)?;
            emit_series(&common, &[l.apply(&y)?])
        }
        Cmd::Mul { common, series } => {
            if series.len() != 2 {
                return Err(Error::ParseError {
                    pos: 0,
                    msg: "mul needs exactly two --series arguments".into(),
                });
            }
            let a = parse_series(&series[0], common.field)?;
            let b = parse_series(&series[1], common.field)?;
            emit_series(&common, &[a.mul(&b)?])
        }
        Cmd::Exp { common, beta } => {
            let b = FieldElem::parse(&beta, common.field)?;
            emit_series(&common, &[HurwitzSeries::exponential(b)])
        }
        Cmd::Wronskian { common, series } => {
            let tuple: Vec<HurwitzSeries> = series
                .iter()
                .map(|s| parse_series(s, common.field))
                .collect::<Result<_, _>>()?;
            emit_series(&common, &[wronskian(&tuple)?])
        }
        Cmd::FromBasis { common, series } => {
            let p = precision(&common)?;
            let tuple: Vec<HurwitzSeries> = series
                .iter()
                .map(|s| parse_series(s, common.field))
                .collect::<Result<_, _>>()?;
            let l = operator_from_basis(&tuple, p)?;
            match common.format_or(Format::Table) {
                Format::Json => emit_json(&l.to_repr(p)),
                Format::Table => {
                    for i in 0..l.order() {
                        let line: Vec<String> =
                            l.coeff(i).truncate(p).iter().map(|c| c.to_string()).collect();
                        println!("{}", line.join(" "));
                    }
                }
            }
            Ok(())
        }
        Cmd::Group { common, op } => {
            let l = load_operator(&op, common.field)?;
            let d = group_descriptor(&l)?;
            let repr = d.to_repr();
            match common.format_or(Format::Json) {
                Format::Json => emit_json(&repr),
                Format::Table => {
                    println!("order {}", repr.n);
                    println!("constraint {:?}", d.constraint());
                    println!("companion");
                    emit_matrix_table(&repr.b);
                    for (i, basis) in repr.algebra_basis.iter().enumerate() {
                        println!("algebra_basis {i}");
                        emit_matrix_table(basis);
                    }
                }
            }
            Ok(())
        }
        Cmd::Spectral { common, op } => {
            let l = load_operator(&op, common.field)?;
            let sd = spectral_data(&l)?;
            let repr = sd.to_repr();
            match common.format_or(Format::Json) {
                Format::Json => emit_json(&repr),
                Format::Table => {
                    println!("roots {}", repr.roots.join(" "));
                    let mult: Vec<String> =
                        repr.multiplicities.iter().map(|m| m.to_string()).collect();
                    println!("multiplicities {}", mult.join(" "));
                    println!("S");
                    emit_matrix_table(&repr.s);
                    println!("N");
                    emit_matrix_table(&repr.n);
                    println!("T");
                    emit_matrix_table(&repr.t);
                }
            }
            Ok(())
        }
        Cmd::Act { common, op, matrix } => {
            let l = load_operator(&op, common.field)?;
            let c = parse_matrix(&matrix, common.field)?;
            let d = group_descriptor(&l)?;
            let sb = l.solution_basis();
            let images = diffgalois::act(&c, &d, &sb)?;
            emit_series(&common, &images)
        }
    }
}
