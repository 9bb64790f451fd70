//! Library side of the `mfact` binary: argument parsing, command dispatch
//! and report rendering. [`run`] is the whole program minus process exit.

pub mod args;
pub mod commands;
pub mod output;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use mfact::bounds::{Precision, Status};
use mfact::cache::{self, CacheFile};
use mfact::vpart::PCounter;
use mfact::Error;

use crate::args::Cli;
use crate::commands::{execute, Context, Outcome};
use crate::output::render;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAIL: i32 = 1;
    pub const UNDECIDED: i32 = 2;
    pub const USAGE: i32 = 3;
    pub const RESOURCE: i32 = 4;
}

/// Exit code for an error raised by the library.
pub fn error_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) | Error::Domain(_) | Error::UndefinedForOne => exit::USAGE,
        Error::InputTooLarge { .. }
        | Error::PrecisionExhausted { .. }
        | Error::BudgetExceeded { .. }
        | Error::IncompleteInput
        | Error::Parse { .. }
        | Error::VersionMismatch { .. }
        | Error::Conflict { .. }
        | Error::Io(_) => exit::RESOURCE,
    }
}

fn status_code(s: Option<Status>) -> i32 {
    match s {
        None | Some(Status::Pass) => exit::OK,
        Some(Status::Fail) => exit::FAIL,
        Some(Status::Undecided) => exit::UNDECIDED,
    }
}

fn render_outcome(o: &Outcome, cli: &Cli) -> Result<String, String> {
    let f = cli.format;
    match o {
        Outcome::F(d) => render(d, f),
        Outcome::Pvec(d) => render(d, f),
        Outcome::Partition(d) => render(d, f),
        Outcome::Bell(d) => render(d, f),
        Outcome::Bound(d) => render(d.as_ref(), f),
        Outcome::Verify(d) => render(d, f),
        Outcome::Spectrum(d) => render(d, f),
        Outcome::Conjecture(d) => render(d, f),
    }
}

fn load_cache(cli: &Cli, counter: &PCounter) -> Result<CacheFile, Error> {
    let Some(path) = &cli.cache else {
        return Ok(CacheFile::new());
    };
    if !path.exists() {
        return Ok(CacheFile::new());
    }
    let file = cache::load(path)?;
    cache::verify_sample(&file, cache::SAMPLE_SIZE, 0, cli.state_budget)?;
    file.seed(counter);
    Ok(file)
}

fn save_cache(cli: &Cli, loaded: &CacheFile, counter: &PCounter) -> Result<(), Error> {
    if let Some(path) = &cli.cache {
        let merged = cache::merge(loaded, &CacheFile::from_counter(counter))?;
        if merged != *loaded || !path.exists() {
            cache::store(&merged, path)?;
        }
    }
    Ok(())
}

fn run_parsed(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let counter = PCounter::with_state_budget(cli.state_budget);
    let body = || -> Result<(String, Option<Status>), Error> {
        let loaded = load_cache(cli, &counter)?;
        let ctx = Context {
            counter: &counter,
            precision: Precision::with_cap(cli.precision_cap),
            tail_tol: cli.tail_tol,
        };
        let outcome = execute(&cli.command, &ctx)?;
        let text = render_outcome(&outcome, cli).map_err(Error::InvalidInput)?;
        save_cache(cli, &loaded, &counter)?;
        Ok((text, outcome.status()))
    };
    let result = match cli.workers {
        Some(k) => match rayon::ThreadPoolBuilder::new()
            .num_threads(k as usize)
            .build()
        {
            Ok(pool) => pool.install(body),
            Err(e) => {
                let _ = writeln!(err, "error: cannot start {k} workers: {e}");
                return exit::RESOURCE;
            }
        },
        None => body(),
    };
    match result {
        Ok((text, status)) => {
            if out.write_all(text.as_bytes()).is_err() {
                return exit::RESOURCE;
            }
            status_code(status)
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            error_code(&e)
        }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// writing the report to `out` and diagnostics to `err`. Returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run_parsed(&cli, out, err),
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    exit::OK
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    exit::USAGE
                }
            }
        }
    }
}
