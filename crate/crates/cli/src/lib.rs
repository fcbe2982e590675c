//! Argument handling and command dispatch for the `lattice-skein` binary.
//!
//! [`run`] takes the argument list and two writers and returns the process
//! exit code, so the whole front end can be driven from tests.

use std::ffi::OsString;
use std::io::{self, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use lattice_skein::census::{self, CensusError, CensusRow};
use lattice_skein::states::{StateIter, DEFAULT_STATE_CAP};
use lattice_skein::{
    expand, realize, BoardShape, Budget, CatalanState, Engine, RealizeError, SkeinError, StateError,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FORBIDDEN: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;
pub const EXIT_INTERNAL: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "lattice-skein",
    version,
    about = "Catalan states and Kauffman bracket coefficients of the lattice crossing L(m,n)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Board {
    /// Number of horizontal strands (rows of crossings).
    m: usize,
    /// Number of vertical strands (columns of crossings).
    n: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print every nonzero coefficient r(C) of L(m,n).
    Expand {
        #[command(flatten)]
        board: Board,
        #[arg(long, value_enum, default_value_t = EngineArg::Transfer)]
        engine: EngineArg,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print the coefficient r(S) of one state.
    Coeff {
        #[command(flatten)]
        board: Board,
        #[arg(long)]
        state: String,
        #[arg(long, value_enum, default_value_t = EngineArg::Transfer)]
        engine: EngineArg,
    },
    /// Print a marker grid resolving to the state, or FORBIDDEN.
    Realize {
        #[command(flatten)]
        board: Board,
        #[arg(long)]
        state: String,
    },
    /// Report whether a state is realizable, with d_h and d_v.
    Check {
        #[command(flatten)]
        board: Board,
        #[arg(long)]
        state: String,
    },
    /// Catalan, excluded and realizable state counts.
    Count {
        #[command(flatten)]
        board: Board,
        /// Recompute the counts by scanning states and expanding L(m,n).
        #[arg(long)]
        verify: bool,
        /// Emit CSV rows for every board 1..=m by 1..=n.
        #[arg(long)]
        table: bool,
    },
    /// Stream Catalan states in canonical order.
    Enumerate {
        #[command(flatten)]
        board: Board,
        #[arg(long)]
        realizable_only: bool,
        #[arg(long)]
        limit: Option<u64>,
    },
    /// Print the Dyck word of a state and its maximum height.
    Dyck {
        #[command(flatten)]
        board: Board,
        #[arg(long)]
        state: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EngineArg {
    Brute,
    Transfer,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Brute => Engine::BruteForce,
            EngineArg::Transfer => Engine::Transfer,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// A failed command: exit code plus the message for stderr.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl ToString) -> Self {
        Self {
            code,
            message: message.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        // A closed pipe (e.g. `| head`) ends output early but is not a failure.
        if e.kind() == io::ErrorKind::BrokenPipe {
            return Failure::new(EXIT_OK, "");
        }
        Failure::new(EXIT_INTERNAL, format!("write failed: {e}"))
    }
}

impl From<StateError> for Failure {
    fn from(e: StateError) -> Self {
        let code = match e {
            StateError::TooManyStates { .. } => EXIT_BUDGET,
            _ => EXIT_USAGE,
        };
        Failure::new(code, e)
    }
}

impl From<SkeinError> for Failure {
    fn from(e: SkeinError) -> Self {
        match e {
            SkeinError::State(s) => s.into(),
            SkeinError::Budget(_) => Failure::new(EXIT_BUDGET, e),
            SkeinError::Laurent(_) => Failure::new(EXIT_BUDGET, e),
            SkeinError::Grid(_) | SkeinError::Table(_) => Failure::new(EXIT_INTERNAL, e),
        }
    }
}

impl From<CensusError> for Failure {
    fn from(e: CensusError) -> Self {
        let code = match e {
            CensusError::Overflow(_) | CensusError::Laurent(_) => EXIT_BUDGET,
            CensusError::State(_) | CensusError::InvalidParams { .. } => EXIT_USAGE,
            CensusError::Inconsistent { .. } => EXIT_INTERNAL,
        };
        Failure::new(code, e)
    }
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(f) if f.code == EXIT_OK => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn shape_of(board: &Board) -> Result<BoardShape, Failure> {
    Ok(BoardShape::new(board.m, board.n)?)
}

fn parse_state(board: &Board, text: &str) -> Result<CatalanState, Failure> {
    Ok(CatalanState::parse(text, shape_of(board)?)?)
}

fn budget() -> Result<Budget, Failure> {
    Budget::from_env().map_err(|e| Failure::new(EXIT_USAGE, e))
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<u8, Failure> {
    match command {
        Command::Expand {
            board,
            engine,
            format,
        } => {
            let engine = Engine::from(engine);
            let table = expand(shape_of(&board)?, engine, &budget()?)?;
            match format {
                Format::Json => writeln!(out, "{}", table.to_json(engine.name()))?,
                Format::Text => {
                    for (state, coeff) in table.iter() {
                        writeln!(out, "{state}\t{coeff}")?;
                    }
                }
            }
        }
        Command::Coeff {
            board,
            state,
            engine,
        } => {
            let state = parse_state(&board, &state)?;
            let table = expand(state.shape(), engine.into(), &budget()?)?;
            writeln!(out, "{}", table.get(&state))?;
        }
        Command::Realize { board, state } => {
            let state = parse_state(&board, &state)?;
            match realize(&state) {
                Ok(grid) => writeln!(out, "{grid}")?,
                Err(RealizeError::Forbidden { d_h, d_v }) => {
                    writeln!(out, "FORBIDDEN d_h={d_h} d_v={d_v}")?;
                    return Ok(EXIT_FORBIDDEN);
                }
                Err(e @ RealizeError::Internal(_)) => {
                    return Err(Failure::new(EXIT_INTERNAL, e));
                }
            }
        }
        Command::Check { board, state } => {
            let r = parse_state(&board, &state)?.realizability();
            let verdict = if r.realizable {
                "realizable"
            } else {
                "forbidden"
            };
            writeln!(out, "{verdict} d_h={} d_v={}", r.d_h, r.d_v)?;
        }
        Command::Count {
            board,
            verify,
            table,
        } => {
            if table {
                if verify {
                    for m in 1..=board.m {
                        for n in 1..=board.n {
                            verify_counts(&Board { m, n })?;
                        }
                    }
                }
                write!(out, "{}", census::census_csv(board.m, board.n)?)?;
            } else {
                let row = CensusRow::compute(board.m, board.n)?;
                if verify {
                    verify_counts(&board)?;
                }
                writeln!(
                    out,
                    "catalan={} excluded_h={} excluded_v={} realizable={}",
                    row.catalan, row.excluded_h, row.excluded_v, row.realizable
                )?;
            }
        }
        Command::Enumerate {
            board,
            realizable_only,
            limit,
        } => {
            let mut emitted = 0u64;
            for state in StateIter::new(shape_of(&board)?) {
                if limit.is_some_and(|l| emitted >= l) {
                    break;
                }
                if realizable_only && !state.is_realizable() {
                    continue;
                }
                writeln!(out, "{state}")?;
                emitted += 1;
            }
        }
        Command::Dyck { board, state } => {
            let word = parse_state(&board, &state)?.dyck_word();
            writeln!(out, "{word} max_height={}", word.max_height())?;
        }
    }
    Ok(EXIT_OK)
}

/// Recomputes the census row by scanning every state and by expanding
/// L(m,n); any disagreement is an internal failure.
fn verify_counts(board: &Board) -> Result<(), Failure> {
    let shape = shape_of(board)?;
    let row = CensusRow::compute(board.m, board.n)?;
    let total = lattice_skein::states::catalan(board.m + board.n).unwrap_or(u128::MAX);
    if total > DEFAULT_STATE_CAP {
        return Err(Failure::new(
            EXIT_BUDGET,
            format!("verification would scan {total} states"),
        ));
    }
    let scan = census::scan_counts(shape);
    let engine_keys = expand(shape, Engine::Transfer, &budget()?)?.len() as u128;
    let checks = [
        ("catalan", row.catalan, scan.total),
        ("excluded_h", row.excluded_h, scan.excluded_h),
        ("excluded_v", row.excluded_v, scan.excluded_v),
        ("realizable", row.realizable, scan.total - scan.forbidden),
        ("realizable (expansion)", row.realizable, engine_keys),
    ];
    for (name, formula, observed) in checks {
        if formula != observed {
            return Err(Failure::new(
                EXIT_INTERNAL,
                format!("{name} for {shape}: formula {formula}, recomputed {observed}"),
            ));
        }
    }
    Ok(())
}
